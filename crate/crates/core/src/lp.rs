//! Half-integral optimum of the vertex cover LP relaxation,
//! `min Σ x_v  s.t.  x_u + x_v >= 1, x >= 0`, computed combinatorially on the
//! bipartite double cover.
//!
//! The double cover `H` has a left and a right copy of every vertex and an edge
//! `u_L v_R` for each (ordered) edge `uv`. Minimum vertex covers of `H` are
//! exactly the optimal half-integral LP solutions (`x_v` = number of copies of
//! `v` in the cover, halved). Of all optima we return the one with as many
//! `1/2` entries as possible:
//!
//! * `x_v = 0` iff `v_L` is missed by some maximum matching of `H`
//!   (even-alternating reachable from a free left vertex);
//! * `x_v = 1` iff `v` neighbours such a vertex;
//! * `x_v = 1/2` otherwise.

use std::collections::VecDeque;

use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HalfValue {
    Zero,
    Half,
    One,
}

impl HalfValue {
    /// Value in half units (0, 1 or 2).
    pub fn halves(self) -> usize {
        match self {
            Self::Zero => 0,
            Self::Half => 1,
            Self::One => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub values: Vec<HalfValue>,
}

impl LpSolution {
    /// Objective value `Σ x_v` in half units.
    pub fn objective_halves(&self) -> usize {
        self.values.iter().map(|v| v.halves()).sum()
    }

    pub fn objective(&self) -> f64 {
        self.objective_halves() as f64 / 2.0
    }

    pub fn with_value(&self, target: HalfValue) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(v, &x)| (x == target).then_some(v))
            .collect()
    }
}

const NIL: usize = usize::MAX;

/// Hopcroft–Karp on a bipartite graph whose left and right sides share the
/// index range `0..n` and whose left vertex `u` sees right vertices `adj[u]`.
/// Returns `mate_left`, `mate_right`.
fn hopcroft_karp(adj: &[Vec<usize>]) -> (Vec<usize>, Vec<usize>) {
    let n = adj.len();
    let mut mate_l = vec![NIL; n];
    let mut mate_r = vec![NIL; n];
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    let mut cursor = vec![0usize; n];
    let mut stack: Vec<usize> = Vec::new();

    loop {
        // BFS layering from free left vertices.
        queue.clear();
        for u in 0..n {
            if mate_l[u] == NIL {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &r in &adj[u] {
                let w = mate_r[r];
                if w == NIL {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }

        // Iterative DFS along the layering.
        cursor.iter_mut().for_each(|c| *c = 0);
        for root in 0..n {
            if mate_l[root] != NIL {
                continue;
            }
            stack.clear();
            stack.push(root);
            while let Some(&u) = stack.last() {
                if cursor[u] == adj[u].len() {
                    dist[u] = usize::MAX;
                    stack.pop();
                    continue;
                }
                let r = adj[u][cursor[u]];
                let w = mate_r[r];
                if w == NIL {
                    // Augment along the stack.
                    for &x in stack.iter().rev() {
                        let rr = adj[x][cursor[x]];
                        mate_l[x] = rr;
                        mate_r[rr] = x;
                    }
                    break;
                }
                if dist[w] != usize::MAX && dist[w] == dist[u] + 1 {
                    stack.push(w);
                } else {
                    cursor[u] += 1;
                }
            }
        }
    }
    (mate_l, mate_r)
}

/// Optimal half-integral LP solution with maximal half support.
pub fn solve_vc_lp(g: &Graph) -> LpSolution {
    let n = g.num_vertices();
    let adj: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v).to_vec()).collect();
    let (mate_l, mate_r) = hopcroft_karp(&adj);

    // Left vertices reachable from free left vertices by alternating paths
    // (non-matching edge left→right, matching edge right→left).
    let mut reach = vec![false; n];
    let mut queue = VecDeque::new();
    for u in 0..n {
        if mate_l[u] == NIL {
            reach[u] = true;
            queue.push_back(u);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &r in &adj[u] {
            let w = mate_r[r];
            if w != NIL && !reach[w] {
                reach[w] = true;
                queue.push_back(w);
            }
        }
    }

    let mut values = vec![HalfValue::Half; n];
    for v in 0..n {
        if reach[v] {
            values[v] = HalfValue::Zero;
        }
    }
    for (v, x) in values.iter_mut().enumerate() {
        if *x == HalfValue::Half && g.neighbors(v).iter().any(|&w| reach[w]) {
            *x = HalfValue::One;
        }
    }
    debug_assert_eq!(
        values.iter().map(|x| x.halves()).sum::<usize>(),
        mate_l.iter().filter(|&&m| m != NIL).count(),
        "LP objective (in halves) equals the double-cover matching number"
    );
    LpSolution { values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use HalfValue::*;

    /// Enumerates all `{0, 1/2, 1}` assignments; returns (optimum in halves,
    /// every optimal assignment).
    fn brute_force(g: &Graph) -> (usize, Vec<Vec<HalfValue>>) {
        let n = g.num_vertices();
        let mut best = usize::MAX;
        let mut optima = Vec::new();
        let total = 3usize.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let x: Vec<HalfValue> = (0..n)
                .map(|_| {
                    let d = c % 3;
                    c /= 3;
                    [Zero, Half, One][d]
                })
                .collect();
            if g.edges().any(|(u, v)| x[u].halves() + x[v].halves() < 2) {
                continue;
            }
            let obj: usize = x.iter().map(|h| h.halves()).sum();
            if obj < best {
                best = obj;
                optima.clear();
            }
            if obj == best {
                optima.push(x);
            }
        }
        (best, optima)
    }

    #[test]
    fn star_puts_center_in_cover() {
        let lp = solve_vc_lp(&Graph::star(3));
        assert_eq!(lp.values, vec![One, Zero, Zero, Zero]);
    }

    #[test]
    fn even_cycle_and_edge_are_all_half() {
        assert_eq!(solve_vc_lp(&Graph::cycle(4)).values, vec![Half; 4]);
        assert_eq!(solve_vc_lp(&Graph::complete(2)).values, vec![Half; 2]);
        assert_eq!(solve_vc_lp(&Graph::cycle(5)).values, vec![Half; 5]);
    }

    #[test]
    fn matches_enumeration_on_small_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..150 {
            let n = rng.gen_range(1..=7);
            let p = rng.gen_range(0.1..0.9);
            let edges: Vec<_> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .filter(|_| rng.gen::<f64>() < p)
                .collect();
            let g = Graph::from_edges(n, edges).unwrap();
            let (opt, optima) = brute_force(&g);
            let lp = solve_vc_lp(&g);
            assert_eq!(lp.objective_halves(), opt, "objective on {:?}", g.label_edges());
            assert!(optima.contains(&lp.values), "solution not among optima");
            // Zero/One entries are exactly those fixed across every optimum.
            for v in 0..n {
                let fixed_zero = optima.iter().all(|x| x[v] == Zero);
                let fixed_one = optima.iter().all(|x| x[v] == One);
                assert_eq!(lp.values[v] == Zero, fixed_zero);
                assert_eq!(lp.values[v] == One, fixed_one);
            }
        }
    }
}
