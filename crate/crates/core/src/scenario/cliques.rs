use super::OrthoGraph;
use crate::error::{Error, Result};

/// Vertex-count guard for clique enumeration (one `u64` mask per vertex).
pub const CLIQUE_LIMIT: usize = 64;

/// All maximal cliques as sorted index lists, sorted lexicographically.
pub fn maximal_cliques(g: &OrthoGraph) -> Result<Vec<Vec<usize>>> {
    let n = g.num_vertices();
    if n > CLIQUE_LIMIT {
        return Err(Error::TooLarge {
            what: "clique enumeration",
            size: n,
            limit: CLIQUE_LIMIT,
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let adj: Vec<u64> = (0..n)
        .map(|v| g.neighbours(v).fold(0u64, |m, u| m | (1 << u)))
        .collect();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut out = Vec::new();
    bron_kerbosch(&adj, 0, all, 0, &mut out);
    let mut cliques: Vec<Vec<usize>> = out.into_iter().map(members).collect();
    cliques.sort();
    Ok(cliques)
}

fn members(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask & (1 << i) != 0).collect()
}

fn bron_kerbosch(adj: &[u64], r: u64, mut p: u64, mut x: u64, out: &mut Vec<u64>) {
    if p == 0 {
        if x == 0 {
            out.push(r);
        }
        return;
    }
    // pivot with the most neighbours in p
    let candidates = p | x;
    let pivot = (0..adj.len())
        .filter(|&u| candidates & (1 << u) != 0)
        .max_by_key(|&u| (adj[u] & p).count_ones())
        .expect("p is nonempty");
    let mut todo = p & !adj[pivot];
    while todo != 0 {
        let v = todo.trailing_zeros() as usize;
        let bit = 1u64 << v;
        todo &= !bit;
        bron_kerbosch(adj, r | bit, p & adj[v], x & adj[v], out);
        p &= !bit;
        x |= bit;
    }
}
