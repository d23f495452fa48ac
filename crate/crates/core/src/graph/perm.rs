use std::collections::HashSet;

use crate::error::{Error, Result};

use super::Graph;

pub const PERM_CLOSURE_CAP: usize = 2_000_000;

/// `a` then `b`: `v ↦ b[a[v]]`.
pub fn compose(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().map(|&x| b[x as usize]).collect()
}

pub fn invert(a: &[u32]) -> Vec<u32> {
    let mut inv = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        inv[x as usize] = i as u32;
    }
    inv
}

/// Whether `perm` is a bijection on the vertices that preserves adjacency.
pub fn is_automorphism(g: &Graph, perm: &[u32]) -> bool {
    let n = g.n();
    if perm.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &x in perm {
        if x as usize >= n || std::mem::replace(&mut seen[x as usize], true) {
            return false;
        }
    }
    (0..n).all(|v| g.degree(v) == g.degree(perm[v] as usize))
        && g.edges().all(|(u, v)| g.adjacent(perm[u] as usize, perm[v] as usize))
}

/// Order of the group generated by `gens`, by explicit closure.
pub fn closure_order(gens: &[Vec<u32>], cap: usize) -> Result<usize> {
    let Some(n) = gens.first().map(Vec::len) else {
        return Ok(1);
    };
    let id: Vec<u32> = (0..n as u32).collect();
    let mut seen: HashSet<Vec<u32>> = HashSet::from([id.clone()]);
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = compose(&x, g);
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return Err(Error::GroupTooLarge(cap));
                }
                seen.insert(y.clone());
                frontier.push(y);
            }
        }
    }
    Ok(seen.len())
}
