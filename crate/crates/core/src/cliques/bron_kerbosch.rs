use fixedbitset::FixedBitSet;

/// An undirected simple graph on `0..n` with sorted adjacency lists.
#[derive(Debug, Clone)]
pub(crate) struct LocalGraph {
    adj: Vec<Vec<u32>>,
}

impl LocalGraph {
    pub(crate) fn new(n: usize, pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (a, b) in pairs {
            if a != b {
                adj[a as usize].push(b);
                adj[b as usize].push(a);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        LocalGraph { adj }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&(b as u32)).is_ok()
    }
}

/// Vertices in degeneracy order (repeatedly remove a minimum-degree vertex),
/// using the bucket scheme of Batagelj and Zaversnik.
pub(crate) fn degeneracy_order(g: &LocalGraph) -> Vec<usize> {
    let n = g.len();
    let mut deg: Vec<usize> = g.adj.iter().map(Vec::len).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);

    let mut bin = vec![0usize; max_deg + 1];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut vert = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[deg[v]];
        vert[pos[v]] = v;
        bin[deg[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let v = vert[i];
        for &u in &g.adj[v] {
            let u = u as usize;
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw];
                if u != w {
                    pos[u] = pw;
                    vert[pu] = w;
                    pos[w] = pu;
                    vert[pw] = u;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    vert
}

/// All maximal cliques, each sorted ascending, the list sorted
/// lexicographically. Isolated vertices come out as singletons.
pub(crate) fn maximal_cliques(g: &LocalGraph) -> Vec<Vec<u32>> {
    let n = g.len();
    let order = degeneracy_order(g);
    let mut rank = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }

    let mut out = Vec::new();
    let mut r = Vec::new();
    for &v in &order {
        let mut p = FixedBitSet::with_capacity(n);
        let mut x = FixedBitSet::with_capacity(n);
        for &w in &g.adj[v] {
            let w = w as usize;
            if rank[w] > rank[v] {
                p.insert(w);
            } else {
                x.insert(w);
            }
        }
        r.push(v as u32);
        expand(g, &mut r, p, x, &mut out);
        r.pop();
    }

    for c in &mut out {
        c.sort_unstable();
    }
    out.sort_unstable();
    out
}

fn expand(g: &LocalGraph, r: &mut Vec<u32>, mut p: FixedBitSet, mut x: FixedBitSet, out: &mut Vec<Vec<u32>>) {
    if p.is_clear() {
        if x.is_clear() {
            out.push(r.clone());
        }
        return;
    }

    // Tomita pivot: the vertex of P ∪ X with the most neighbours in P.
    let pivot = p
        .ones()
        .chain(x.ones())
        .max_by_key(|&u| g.adj[u].iter().filter(|&&w| p.contains(w as usize)).count())
        .expect("P is non-empty");
    let candidates: Vec<usize> = p.ones().filter(|&v| !g.adjacent(pivot, v)).collect();

    let n = g.len();
    for v in candidates {
        let mut next_p = FixedBitSet::with_capacity(n);
        let mut next_x = FixedBitSet::with_capacity(n);
        for &w in &g.adj[v] {
            let w = w as usize;
            if p.contains(w) {
                next_p.insert(w);
            } else if x.contains(w) {
                next_x.insert(w);
            }
        }
        r.push(v as u32);
        expand(g, r, next_p, next_x, out);
        r.pop();
        p.set(v, false);
        x.insert(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degeneracy_order_peels_low_degree_first() {
        // Triangle 0-1-2 with a pendant 3 on vertex 0.
        let g = LocalGraph::new(4, [(0, 1), (1, 2), (0, 2), (0, 3)]);
        let order = degeneracy_order(&g);
        assert_eq!(order[0], 3);
        let mut sorted = order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2, 3]);
    }

    #[test]
    fn small_cases() {
        assert!(maximal_cliques(&LocalGraph::new(0, [])).is_empty());
        assert_eq!(maximal_cliques(&LocalGraph::new(2, [])), vec![vec![0], vec![1]]);
        let triangle = LocalGraph::new(3, [(0, 1), (1, 2), (0, 2)]);
        assert_eq!(maximal_cliques(&triangle), vec![vec![0, 1, 2]]);
        let path = LocalGraph::new(3, [(0, 1), (1, 2)]);
        assert_eq!(maximal_cliques(&path), vec![vec![0, 1], vec![1, 2]]);
    }

    #[test]
    fn square_with_diagonal() {
        // a=0 b=1 c=2 d=3, edges ab bc cd da ac
        let g = LocalGraph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        assert_eq!(maximal_cliques(&g), vec![vec![0, 1, 2], vec![0, 2, 3]]);
    }
}
