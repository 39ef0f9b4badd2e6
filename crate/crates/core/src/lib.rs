//! Group-aware contact analysis for public-transit trajectories.
//!
//! The crate turns passenger trips into a contact network, splits it per trip
//! into atomic groups (maximal cliques), links groups that transfer together,
//! scores passenger pairs by how often they travel together across trips, and
//! ranks trips by simulated infection risk.
//!
//! ```
//! use transitmesh::{build_contact_graph, enumerate_all, Dataset, LegRecord, TripRecord};
//!
//! let ds = Dataset::from_records(
//!     vec![TripRecord::new("t1", "r1", 400)],
//!     vec![
//!         LegRecord::new("alice", "t1", 400, 430),
//!         LegRecord::new("bob", "t1", 410, 440),
//!         LegRecord::new("carol", "t1", 435, 450),
//!     ],
//! )?;
//! let contacts = build_contact_graph(&ds);
//! assert_eq!(contacts.edges().len(), 2);
//! let groups = enumerate_all(&contacts, &ds, false).groups;
//! assert_eq!(groups.len(), 2);
//! # Ok::<(), transitmesh::Error>(())
//! ```

pub mod cli;
pub mod cliques;
pub mod community;
pub mod contact;
pub mod epidemic;
pub mod error;
pub mod ingest;
pub mod output;
pub mod pipeline;
pub mod transfer;

pub use crate::cliques::{
    bron_kerbosch, enumerate_all, interval_cliques, number_groups, partition, raw_cliques, AtomicGroup, Enumeration,
    GroupId, TimingReport, TripSubgraph,
};
pub use crate::community::{
    build_community_graph, co_memberships, community_graph_from_transfers, connection_strength, extract_communities,
    CoMembership, Community, CommunityEdge, CommunityGraph,
};
pub use crate::contact::{build_contact_graph, degree_distribution, overlap, prune, ContactEdge, ContactGraph};
pub use crate::epidemic::{
    assign_weights, rank_trips, replicate_rng, run_si, run_si_on, RiskReport, SiConfig, SiNetwork, TransmissionWeights,
    TripRisk, WeightParams,
};
pub use crate::error::{Error, Result};
pub use crate::ingest::{
    generate_synthetic, load_trajectories, Dataset, GroupSizeDistribution, LegRecord, Minutes, PassengerId,
    SyntheticConfig, TrajectoryLeg, TripId, TripMeta, TripRecord,
};
pub use crate::pipeline::{run_pipeline, Manifest, PipelineConfig};
pub use crate::transfer::{
    build_transfer_graph, score_trip_pairs, top_k_pairs, TransferEdge, TransferGraph, TripPairScore,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/data.md")]
    mod data {}
    #[doc = include_str!("../../../book/src/contacts.md")]
    mod contacts {}
    #[doc = include_str!("../../../book/src/groups.md")]
    mod groups {}
    #[doc = include_str!("../../../book/src/transfers.md")]
    mod transfers {}
    #[doc = include_str!("../../../book/src/communities.md")]
    mod communities {}
    #[doc = include_str!("../../../book/src/risk.md")]
    mod risk {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
