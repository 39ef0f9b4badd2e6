//! On-disk artifact formats.
//!
//! | artifact          | columns / shape                                              |
//! |-------------------|--------------------------------------------------------------|
//! | contact edges     | `u,v,trip_id,contact_start,duration`                         |
//! | groups            | `group_id,trip_id,member_count,members` (members `;`-joined) |
//! | transfer edges    | `from_group,to_group,from_trip,to_trip,weight`               |
//! | pair scores       | `trip_i,trip_j,m`                                            |
//! | community edges   | `u,v,strength`                                               |
//! | communities       | JSON array of `{component_id, members, size}`                |
//! | risk report       | JSON `{config, per_trip, per_passenger?}`                    |
//!
//! Every file is written to a temporary sibling and renamed into place.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cliques::{AtomicGroup, GroupId};
use crate::community::{Community, CommunityEdge, CommunityGraph};
use crate::contact::{ContactEdge, ContactGraph};
use crate::epidemic::{RiskReport, TripRisk};
use crate::error::{Error, Result};
use crate::ingest::{read_records, Dataset, Minutes, PassengerId, TripId};
use crate::transfer::{TransferGraph, TripPairScore};

pub const CONTACTS_HEADER: [&str; 5] = ["u", "v", "trip_id", "contact_start", "duration"];
pub const GROUPS_HEADER: [&str; 4] = ["group_id", "trip_id", "member_count", "members"];
pub const TRANSFER_HEADER: [&str; 5] = ["from_group", "to_group", "from_trip", "to_trip", "weight"];
pub const PAIR_SCORES_HEADER: [&str; 3] = ["trip_i", "trip_j", "m"];
pub const COMMUNITY_EDGES_HEADER: [&str; 3] = ["u", "v", "strength"];

/// Writes `path` through a temporary file in the same directory, so readers
/// never observe a partial file.
pub fn write_atomic(path: &Path, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        write(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub(crate) fn write_csv<W: Write, T: Serialize>(
    w: W,
    header: &[&str],
    rows: impl IntoIterator<Item = T>,
) -> io::Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(header)?;
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn lookup_passenger(ds: &Dataset, file: &str, line: u64, name: &str) -> Result<PassengerId> {
    ds.passenger_id(name).ok_or_else(|| Error::Invalid {
        file: file.to_owned(),
        line,
        message: format!("unknown passenger_id {name:?}"),
    })
}

fn lookup_trip(ds: &Dataset, file: &str, line: u64, name: &str) -> Result<TripId> {
    ds.trip_id(name).ok_or_else(|| Error::Invalid {
        file: file.to_owned(),
        line,
        message: format!("unknown trip_id {name:?}"),
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct ContactRow {
    u: String,
    v: String,
    trip_id: String,
    contact_start: Minutes,
    duration: Minutes,
}

pub fn write_contacts<W: Write>(ds: &Dataset, g: &ContactGraph, w: W) -> io::Result<()> {
    write_csv(
        w,
        &CONTACTS_HEADER,
        g.edges().iter().map(|e| ContactRow {
            u: ds.passenger_name(e.u).to_owned(),
            v: ds.passenger_name(e.v).to_owned(),
            trip_id: ds.trip_name(e.trip).to_owned(),
            contact_start: e.contact_start,
            duration: e.duration,
        }),
    )
}

/// Reads a contact edge list; `tau` is recorded as the graph's threshold.
pub fn read_contacts<R: Read>(ds: &Dataset, r: R, file: &str, tau: Minutes) -> Result<ContactGraph> {
    let rows: Vec<(u64, ContactRow)> = read_records(r, file, &CONTACTS_HEADER)?;
    let mut edges = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        if row.duration == 0 {
            return Err(Error::Invalid {
                file: file.to_owned(),
                line,
                message: "contact duration must be positive".into(),
            });
        }
        edges.push(ContactEdge {
            trip: lookup_trip(ds, file, line, &row.trip_id)?,
            u: lookup_passenger(ds, file, line, &row.u)?,
            v: lookup_passenger(ds, file, line, &row.v)?,
            contact_start: row.contact_start,
            duration: row.duration,
        });
    }
    Ok(ContactGraph::from_edges(edges, tau))
}

pub fn load_contacts(ds: &Dataset, path: &Path, tau: Minutes) -> Result<ContactGraph> {
    read_contacts(ds, open(path)?, &path.display().to_string(), tau)
}

#[derive(Debug, Serialize, Deserialize)]
struct GroupRow {
    group_id: u32,
    trip_id: String,
    member_count: usize,
    members: String,
}

pub fn write_groups<W: Write>(ds: &Dataset, groups: &[AtomicGroup], w: W) -> io::Result<()> {
    write_csv(
        w,
        &GROUPS_HEADER,
        groups.iter().map(|g| {
            let mut names: Vec<&str> = g.members.iter().map(|&p| ds.passenger_name(p)).collect();
            names.sort_unstable();
            GroupRow {
                group_id: g.id.0,
                trip_id: ds.trip_name(g.trip).to_owned(),
                member_count: g.members.len(),
                members: names.join(";"),
            }
        }),
    )
}

pub fn read_groups<R: Read>(ds: &Dataset, r: R, file: &str) -> Result<Vec<AtomicGroup>> {
    let rows: Vec<(u64, GroupRow)> = read_records(r, file, &GROUPS_HEADER)?;
    let mut groups = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        let mut members = row
            .members
            .split(';')
            .map(|name| lookup_passenger(ds, file, line, name))
            .collect::<Result<Vec<_>>>()?;
        members.sort_unstable();
        if members.len() != row.member_count {
            return Err(Error::Invalid {
                file: file.to_owned(),
                line,
                message: format!("member_count {} but {} members listed", row.member_count, members.len()),
            });
        }
        groups.push(AtomicGroup {
            id: GroupId(row.group_id),
            trip: lookup_trip(ds, file, line, &row.trip_id)?,
            members,
        });
    }
    Ok(groups)
}

pub fn load_groups(ds: &Dataset, path: &Path) -> Result<Vec<AtomicGroup>> {
    read_groups(ds, open(path)?, &path.display().to_string())
}

#[derive(Debug, Serialize, Deserialize)]
struct TransferRow {
    from_group: u32,
    to_group: u32,
    from_trip: String,
    to_trip: String,
    weight: usize,
}

pub fn write_transfer_edges<W: Write>(ds: &Dataset, f: &TransferGraph, w: W) -> io::Result<()> {
    write_csv(
        w,
        &TRANSFER_HEADER,
        f.edges().iter().map(|e| TransferRow {
            from_group: e.from.0,
            to_group: e.to.0,
            from_trip: ds.trip_name(f.group(e.from).trip).to_owned(),
            to_trip: ds.trip_name(f.group(e.to).trip).to_owned(),
            weight: e.weight(),
        }),
    )
}

#[derive(Debug, Serialize, Deserialize)]
struct PairScoreRow {
    trip_i: String,
    trip_j: String,
    m: u64,
}

pub fn write_pair_scores<W: Write>(ds: &Dataset, scores: &[TripPairScore], w: W) -> io::Result<()> {
    write_csv(
        w,
        &PAIR_SCORES_HEADER,
        scores.iter().map(|s| PairScoreRow {
            trip_i: ds.trip_name(s.trip_i).to_owned(),
            trip_j: ds.trip_name(s.trip_j).to_owned(),
            m: s.m,
        }),
    )
}

#[derive(Debug, Serialize, Deserialize)]
struct CommunityEdgeRow {
    u: String,
    v: String,
    strength: u64,
}

pub fn write_community_edges<W: Write>(ds: &Dataset, h: &CommunityGraph, w: W) -> io::Result<()> {
    write_csv(
        w,
        &COMMUNITY_EDGES_HEADER,
        h.edges().iter().map(|e| CommunityEdgeRow {
            u: ds.passenger_name(e.u).to_owned(),
            v: ds.passenger_name(e.v).to_owned(),
            strength: e.strength,
        }),
    )
}

pub fn read_community_edges<R: Read>(ds: &Dataset, r: R, file: &str) -> Result<CommunityGraph> {
    let rows: Vec<(u64, CommunityEdgeRow)> = read_records(r, file, &COMMUNITY_EDGES_HEADER)?;
    let mut edges = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        edges.push(CommunityEdge {
            u: lookup_passenger(ds, file, line, &row.u)?,
            v: lookup_passenger(ds, file, line, &row.v)?,
            strength: row.strength,
        });
    }
    Ok(CommunityGraph::from_edges(edges))
}

pub fn load_community_edges(ds: &Dataset, path: &Path) -> Result<CommunityGraph> {
    read_community_edges(ds, open(path)?, &path.display().to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommunityRecord {
    pub component_id: usize,
    pub members: Vec<String>,
    pub size: usize,
}

pub fn community_records(ds: &Dataset, communities: &[Community]) -> Vec<CommunityRecord> {
    communities
        .iter()
        .enumerate()
        .map(|(i, c)| CommunityRecord {
            component_id: i,
            members: c.members.iter().map(|&p| ds.passenger_name(p).to_owned()).collect(),
            size: c.size(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskConfigRecord {
    pub iterations: usize,
    pub replicates: usize,
    pub seed_count: usize,
    pub rng_seed: u64,
    pub fixed_seeds: Option<Vec<String>>,
    pub strength_cap: u64,
    pub scaled_lo: f64,
    pub scaled_hi: f64,
    pub base_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripRiskRecord {
    pub trip_id: String,
    pub route_id: String,
    pub start_time: Minutes,
    pub score: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassengerRiskRecord {
    pub passenger_id: String,
    pub likelihood: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReportRecord {
    pub config: RiskConfigRecord,
    pub per_trip: Vec<TripRiskRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per_passenger: Option<Vec<PassengerRiskRecord>>,
}

pub fn risk_report_record(
    ds: &Dataset,
    report: &RiskReport,
    weights: &crate::epidemic::WeightParams,
    ranked: &[TripRisk],
    with_passengers: bool,
) -> RiskReportRecord {
    let cfg = &report.config;
    RiskReportRecord {
        config: RiskConfigRecord {
            iterations: cfg.iterations,
            replicates: cfg.replicates,
            seed_count: cfg.fixed_seeds.as_ref().map_or(cfg.seed_count, Vec::len),
            rng_seed: cfg.rng_seed,
            fixed_seeds: cfg
                .fixed_seeds
                .as_ref()
                .map(|s| s.iter().map(|&p| ds.passenger_name(p).to_owned()).collect()),
            strength_cap: weights.cap,
            scaled_lo: weights.lo,
            scaled_hi: weights.hi,
            base_prob: weights.base_prob,
        },
        per_trip: ranked
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let t = ds.trip(r.trip);
                TripRiskRecord {
                    trip_id: t.trip_id.clone(),
                    route_id: t.route_id.clone(),
                    start_time: t.start_time,
                    score: r.score,
                    rank: i + 1,
                }
            })
            .collect(),
        per_passenger: with_passengers.then(|| {
            report
                .likelihoods()
                .map(|(p, likelihood)| PassengerRiskRecord {
                    passenger_id: ds.passenger_name(p).to_owned(),
                    likelihood,
                })
                .collect()
        }),
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(io::Error::other)?;
        writeln!(w)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::build_contact_graph;
    use crate::ingest::{LegRecord, TripRecord};

    fn ds() -> Dataset {
        Dataset::from_records(
            vec![TripRecord::new("t1", "r1", 400), TripRecord::new("t2", "r1", 450)],
            vec![
                LegRecord::new("a", "t1", 400, 430),
                LegRecord::new("b", "t1", 410, 440),
                LegRecord::new("c", "t1", 405, 420),
                LegRecord::new("a", "t2", 450, 470),
            ],
        )
        .unwrap()
    }

    #[test]
    fn contacts_round_trip() {
        let d = ds();
        let g = build_contact_graph(&d);
        let mut buf = Vec::new();
        write_contacts(&d, &g, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("u,v,trip_id,contact_start,duration\na,b,t1,410,20\n"));
        assert_eq!(read_contacts(&d, buf.as_slice(), "contacts", 0).unwrap(), g);
    }

    #[test]
    fn groups_round_trip() {
        let d = ds();
        let g = build_contact_graph(&d);
        let groups = crate::cliques::enumerate_all(&g, &d, false).groups;
        let mut buf = Vec::new();
        write_groups(&d, &groups, &mut buf).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().contains("0,t1,3,a;b;c\n"));
        assert_eq!(read_groups(&d, buf.as_slice(), "groups").unwrap(), groups);
    }

    #[test]
    fn empty_outputs_still_have_headers() {
        let d = ds();
        let mut buf = Vec::new();
        write_community_edges(&d, &CommunityGraph::default(), &mut buf).unwrap();
        assert_eq!(buf, b"u,v,strength\n");
    }

    #[test]
    fn unknown_names_rejected() {
        let d = ds();
        let err = read_community_edges(&d, "u,v,strength\na,zz,3\n".as_bytes(), "h").unwrap_err();
        assert!(matches!(err, Error::Invalid { line: 2, .. }), "{err}");
        let err = read_groups(
            &d,
            "group_id,trip_id,member_count,members\n0,t1,3,a;b\n".as_bytes(),
            "g",
        )
        .unwrap_err();
        assert!(err.to_string().contains("member_count"), "{err}");
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.txt");
        std::fs::write(&path, "old").unwrap();
        write_atomic(&path, |w| w.write_all(b"new")).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "new");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
