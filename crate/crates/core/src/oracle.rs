//! Exact minimum vertex cover: exhaustive enumeration for small graphs and a
//! bitmask branch-and-bound for residuals up to [`BRANCH_AND_BOUND_MAX`]
//! vertices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSubset};
use crate::kernel::greedy_upper_bound;

pub const EXHAUSTIVE_MAX: usize = 20;
pub const BRANCH_AND_BOUND_MAX: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactMethod {
    Exhaustive,
    BranchAndBound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub opt_cover: VertexSubset,
    pub opt_size: usize,
    /// `|E| - opt_size`, the maximum profit-cover value.
    pub opt_profit: i64,
    pub method: ExactMethod,
}

impl ExactResult {
    fn new(g: &Graph, cover: VertexSubset, method: ExactMethod) -> Self {
        let k = cover.len();
        Self {
            opt_cover: cover,
            opt_size: k,
            opt_profit: g.num_edges() as i64 - k as i64,
            method,
        }
    }
}

/// Exhaustive below [`EXHAUSTIVE_MAX`] + 1 vertices, branch-and-bound above.
pub fn min_vertex_cover_exact(g: &Graph) -> Result<ExactResult> {
    if g.num_vertices() <= EXHAUSTIVE_MAX {
        min_vertex_cover_exhaustive(g)
    } else {
        min_vertex_cover_branch_and_bound(g)
    }
}

/// Maximum profit cover and its value (`|E| - minVC`).
pub fn max_profit_exact(g: &Graph) -> Result<(VertexSubset, i64)> {
    let r = min_vertex_cover_exact(g)?;
    Ok((r.opt_cover, r.opt_profit))
}

fn masks(g: &Graph) -> Vec<u128> {
    (0..g.num_vertices())
        .map(|v| g.neighbors(v).iter().fold(0u128, |m, &w| m | 1 << w))
        .collect()
}

/// Scans every subset; among minimum covers returns the numerically smallest
/// membership mask.
pub fn min_vertex_cover_exhaustive(g: &Graph) -> Result<ExactResult> {
    let n = g.num_vertices();
    if n > EXHAUSTIVE_MAX {
        return Err(Error::Capacity {
            what: "vertices for exhaustive search",
            actual: n,
            limit: EXHAUSTIVE_MAX,
        });
    }
    let adj: Vec<u32> = masks(g).into_iter().map(|m| m as u32).collect();
    let mut best: Option<(u32, u32)> = None;
    for mask in 0u32..(1u32 << n) {
        let size = mask.count_ones();
        if best.is_some_and(|(s, _)| size >= s) {
            continue;
        }
        // Cover iff every vertex outside has its whole neighbourhood inside.
        let is_cover = (0..n).all(|v| mask >> v & 1 == 1 || adj[v] & !mask == 0);
        if is_cover {
            best = Some((size, mask));
        }
    }
    let (_, mask) = best.expect("the full vertex set is always a cover");
    let cover = VertexSubset::from_bits(n, mask as u64);
    Ok(ExactResult::new(g, cover, ExactMethod::Exhaustive))
}

struct Search<'a> {
    adj: &'a [u128],
    best_size: usize,
    best: u128,
}

#[inline]
fn bit(v: u32) -> u128 {
    1u128 << v
}

impl Search<'_> {
    fn run(&mut self, mut alive: u128, mut chosen: u128, mut size: usize) {
        // Isolated vertices, pendants and degree-two triangles.
        loop {
            let mut changed = false;
            let mut rest = alive;
            while rest != 0 {
                let v = rest.trailing_zeros();
                rest &= rest - 1;
                if alive & bit(v) == 0 {
                    continue;
                }
                let nb = self.adj[v as usize] & alive;
                match nb.count_ones() {
                    0 => {
                        alive &= !bit(v);
                        changed = true;
                    }
                    1 => {
                        chosen |= nb;
                        size += 1;
                        alive &= !(nb | bit(v));
                        changed = true;
                    }
                    2 => {
                        let a = nb.trailing_zeros();
                        let b = (nb & (nb - 1)).trailing_zeros();
                        if self.adj[a as usize] & bit(b) != 0 {
                            chosen |= nb;
                            size += 2;
                            alive &= !(nb | bit(v));
                            changed = true;
                        }
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }
        if size >= self.best_size {
            return;
        }
        if alive == 0 {
            self.best_size = size;
            self.best = chosen;
            return;
        }
        // Greedy maximal matching lower bound.
        let mut matched = 0;
        let mut rem = alive;
        while rem != 0 {
            let v = rem.trailing_zeros();
            rem &= !bit(v);
            let nb = self.adj[v as usize] & rem;
            if nb != 0 {
                rem &= !bit(nb.trailing_zeros());
                matched += 1;
            }
        }
        if size + matched >= self.best_size {
            return;
        }
        let mut pick = 0;
        let mut pick_deg = 0;
        let mut rest = alive;
        while rest != 0 {
            let v = rest.trailing_zeros();
            rest &= rest - 1;
            let d = (self.adj[v as usize] & alive).count_ones();
            if d > pick_deg {
                pick = v;
                pick_deg = d;
            }
        }
        self.run(alive & !bit(pick), chosen | bit(pick), size + 1);
        let nb = self.adj[pick as usize] & alive;
        self.run(alive & !(nb | bit(pick)), chosen | nb, size + nb.count_ones() as usize);
    }
}

/// Branches on a maximum-degree vertex: either it joins the cover or all its
/// neighbours do.
pub fn min_vertex_cover_branch_and_bound(g: &Graph) -> Result<ExactResult> {
    let n = g.num_vertices();
    if n > BRANCH_AND_BOUND_MAX {
        return Err(Error::Capacity {
            what: "vertices for branch-and-bound",
            actual: n,
            limit: BRANCH_AND_BOUND_MAX,
        });
    }
    let adj = masks(g);
    let (k, incumbent) = greedy_upper_bound(g);
    let mut search = Search {
        adj: &adj,
        best_size: k,
        best: incumbent.iter().fold(0u128, |m, v| m | 1 << v),
    };
    let all = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    search.run(all, 0, 0);
    let cover = VertexSubset::from_mask((0..n).map(|v| search.best >> v & 1 == 1).collect());
    Ok(ExactResult::new(g, cover, ExactMethod::BranchAndBound))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_named_graphs() {
        assert_eq!(min_vertex_cover_exact(&Graph::complete(3)).unwrap().opt_size, 2);
        assert_eq!(min_vertex_cover_exact(&Graph::cycle(5)).unwrap().opt_size, 3);
        let (_, profit) = max_profit_exact(&Graph::complete(2)).unwrap();
        assert_eq!(profit, 0);
    }

    #[test]
    fn capacity_errors() {
        let big = Graph::path(21);
        assert!(matches!(
            min_vertex_cover_exhaustive(&big),
            Err(Error::Capacity { .. })
        ));
        let huge = Graph::path(129);
        assert!(matches!(
            min_vertex_cover_branch_and_bound(&huge),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn branch_and_bound_handles_medium_graphs() {
        let g = crate::instances::gen_regular(40, 3, 7).unwrap();
        let r = min_vertex_cover_branch_and_bound(&g).unwrap();
        assert!(g.is_vertex_cover(&r.opt_cover).unwrap());
        assert_eq!(r.method, ExactMethod::BranchAndBound);
        // Edgeless and complete corner cases.
        assert_eq!(min_vertex_cover_branch_and_bound(&Graph::empty(3)).unwrap().opt_size, 0);
        assert_eq!(min_vertex_cover_branch_and_bound(&Graph::complete(7)).unwrap().opt_size, 6);
    }
}
