//! Turning a sampled bitstring into a vertex cover and then into the answer
//! for the requested problem.
//!
//! A decoded bitstring `S` is completed by covering the edges of `G[V \ S]`.
//! Each added vertex covers at least one new edge and redundancy removal only
//! shrinks the set, so the result satisfies `|C| ≤ |E| − profit(S)`: the
//! profit of the repaired cover is never below the profit of the sample.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::graph::{Graph, VertexSubset};
use crate::kernel::{reconstruct, reduce, KernelResult, RuleSet};
use crate::pipeline::Problem;

/// Drops cover vertices whose every neighbour is also in the cover, scanning
/// by descending degree and then descending label.
pub fn remove_redundant(g: &Graph, cover: &VertexSubset) -> Result<VertexSubset> {
    if !g.is_vertex_cover(cover)? {
        return Err(domain("remove_redundant needs a vertex cover"));
    }
    let mut order: Vec<usize> = cover.iter().collect();
    order.sort_by_key(|&v| std::cmp::Reverse((g.degree(v), g.label(v))));
    let mut out = cover.clone();
    for v in order {
        if g.neighbors(v).iter().all(|&w| out.contains(w)) {
            out.remove(v);
        }
    }
    Ok(out)
}

/// Scans edges in order and, for each uncovered edge, adds the endpoint with
/// more uncovered incident edges (ties to the smaller label).
pub fn greedy_cover_completion(g: &Graph, partial: &VertexSubset) -> Result<VertexSubset> {
    if partial.host_size() != g.num_vertices() {
        return Err(domain("subset does not belong to this graph"));
    }
    let mut cover = partial.clone();
    let mut uncovered: Vec<usize> = (0..g.num_vertices())
        .map(|v| {
            if cover.contains(v) {
                0
            } else {
                g.neighbors(v).iter().filter(|&&w| !cover.contains(w)).count()
            }
        })
        .collect();
    for (u, v) in g.edges() {
        if cover.contains(u) || cover.contains(v) {
            continue;
        }
        let pick = match uncovered[u].cmp(&uncovered[v]) {
            std::cmp::Ordering::Greater => u,
            std::cmp::Ordering::Less => v,
            std::cmp::Ordering::Equal => {
                if g.label(u) < g.label(v) {
                    u
                } else {
                    v
                }
            }
        };
        cover.insert(pick);
        uncovered[pick] = 0;
        for &w in g.neighbors(pick) {
            if !cover.contains(w) {
                uncovered[w] -= 1;
            }
        }
    }
    Ok(cover)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefineRoute {
    Greedy,
    ReductionRules,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinedSolution {
    pub cover: VertexSubset,
    pub profit_before: i64,
    pub profit_after: i64,
    pub route: RefineRoute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RefineOptions {
    /// Also try kernelizing the uncovered subgraph; the smaller cover wins.
    pub use_rules: bool,
}

/// Repairs the decoded set `bits` into a vertex cover of `g`.
pub fn refine(g: &Graph, bits: &VertexSubset, opts: RefineOptions) -> Result<RefinedSolution> {
    let profit_before = g.profit(bits)?;
    let greedy = remove_redundant(g, &greedy_cover_completion(g, bits)?)?;
    let mut best = (greedy, RefineRoute::Greedy);
    if opts.use_rules {
        let by_rules = complete_with_rules(g, bits)?;
        if by_rules.len() < best.0.len() {
            best = (by_rules, RefineRoute::ReductionRules);
        }
    }
    let (cover, route) = best;
    let profit_after = g.profit(&cover)?;
    debug_assert!(g.is_vertex_cover(&cover)?);
    debug_assert!(cover.len() as i64 <= g.num_edges() as i64 - profit_before);
    Ok(RefinedSolution { cover, profit_before, profit_after, route })
}

fn complete_with_rules(g: &Graph, bits: &VertexSubset) -> Result<VertexSubset> {
    let outside: Vec<usize> = (0..g.num_vertices()).filter(|&v| !bits.contains(v)).collect();
    let u = g.induced_subgraph(&outside);
    let kernel = reduce(&u, RuleSet::all());
    let residual = &kernel.reduced;
    let residual_cover = remove_redundant(
        residual,
        &greedy_cover_completion(residual, &VertexSubset::empty(residual.num_vertices()))?,
    )?;
    // Minimal on U, hence no larger than |E(U)|.
    let cover_u = remove_redundant(&u, &reconstruct(&kernel, &u, &residual_cover)?)?;
    let mut cover = bits.clone();
    for i in cover_u.iter() {
        cover.insert(outside[i]);
    }
    remove_redundant(g, &cover)
}

/// Lifts a cover of the reduced graph to `work` (the graph the kernel was
/// built from) and turns it into a solution of `problem`. For the clique
/// problem `work` must be the complement of the input graph; the returned set
/// is then a clique of the input.
pub fn finalize(
    problem: Problem,
    work: &Graph,
    kernel: &KernelResult,
    reduced_cover: &VertexSubset,
) -> Result<VertexSubset> {
    let cover = reconstruct(kernel, work, reduced_cover)?;
    Ok(match problem {
        Problem::MinVc => cover,
        Problem::MaxIs | Problem::MaxCl => cover.complement(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subset(n: usize, members: &[usize]) -> VertexSubset {
        VertexSubset::from_members(n, members.iter().copied()).unwrap()
    }

    #[test]
    fn redundancy_examples() {
        let k2 = Graph::complete(2);
        assert_eq!(remove_redundant(&k2, &subset(2, &[0, 1])).unwrap().to_vec(), vec![0]);
        let c4 = Graph::cycle(4);
        assert_eq!(remove_redundant(&c4, &subset(4, &[0, 1, 2])).unwrap().to_vec(), vec![0, 2]);
        assert!(remove_redundant(&c4, &subset(4, &[0])).is_err());
    }

    #[test]
    fn greedy_completion_examples() {
        let g = Graph::path(3);
        assert_eq!(greedy_cover_completion(&g, &subset(3, &[])).unwrap().to_vec(), vec![1]);
        let k2 = Graph::complete(2);
        assert_eq!(greedy_cover_completion(&k2, &subset(2, &[])).unwrap().to_vec(), vec![0]);
    }

    #[test]
    fn refine_on_empty_sample_of_triangle() {
        let t = Graph::complete(3);
        let r = refine(&t, &subset(3, &[]), RefineOptions::default()).unwrap();
        assert_eq!(r.cover.len(), 2);
        assert_eq!((r.profit_before, r.profit_after), (0, 1));
        let r = refine(&t, &subset(3, &[]), RefineOptions { use_rules: true }).unwrap();
        assert_eq!(r.cover.len(), 2);
    }

    #[test]
    fn finalize_problems() {
        let p3 = Graph::path(3);
        let k = reduce(&p3, RuleSet::none());
        let cover = subset(3, &[1]);
        assert_eq!(finalize(Problem::MinVc, &p3, &k, &cover).unwrap().to_vec(), vec![1]);
        assert_eq!(finalize(Problem::MaxIs, &p3, &k, &cover).unwrap().to_vec(), vec![0, 2]);
    }
}
