//! Penalty-free maximum profit cover objective.
//!
//! QUBO (maximize): `Σ_{uv∈E} (x_u + x_v − x_u x_v) − Σ_v x_v`, i.e. linear
//! coefficient `deg(v) − 1` and quadratic coefficient `−1` per edge.
//!
//! Ising (minimize), with `Z_v = 1 − 2 x_v` so that selected vertices map to
//! `−1`: `¼ Σ_{uv} (Z_u Z_v + Z_u + Z_v) − ½ Σ_v Z_v + Δ` where
//! `Δ = |V|/2 − 3|E|/4`. Every coefficient is a multiple of ¼, so energies are
//! kept exactly as integer quarter units. For every assignment the energy is
//! the negated profit.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Qubo {
    pub n: usize,
    pub linear: Vec<i64>,
    /// `(u, v, coefficient)` with `u < v`.
    pub quadratic: Vec<(usize, usize, i64)>,
    pub sense: Sense,
}

impl Qubo {
    pub fn value(&self, x: &[bool]) -> Result<i64> {
        check_len(self.n, x)?;
        let lin: i64 = (0..self.n).filter(|&v| x[v]).map(|v| self.linear[v]).sum();
        let quad: i64 = self
            .quadratic
            .iter()
            .filter(|&&(u, v, _)| x[u] && x[v])
            .map(|&(_, _, c)| c)
            .sum();
        Ok(lin + quad)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn check_len(n: usize, x: &[bool]) -> Result<()> {
    if x.len() != n {
        return Err(domain(format!(
            "bitstring has length {}, model has {n} variables",
            x.len()
        )));
    }
    Ok(())
}

pub fn build_qubo(g: &Graph) -> Result<Qubo> {
    if g.is_empty() {
        return Err(domain("cannot build a QUBO for an empty graph"));
    }
    Ok(Qubo {
        n: g.num_vertices(),
        linear: (0..g.num_vertices()).map(|v| g.degree(v) as i64 - 1).collect(),
        quadratic: g.edges().map(|(u, v)| (u, v, -1)).collect(),
        sense: Sense::Maximize,
    })
}

/// Diagonal Ising Hamiltonian with coefficients in quarter units.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsingModel {
    pub n: usize,
    /// `(u, v, J)` on the edges of the graph, `J` in quarter units.
    pub couplings: Vec<(usize, usize, i64)>,
    /// Field `h_v` on `Z_v`, quarter units.
    pub fields: Vec<i64>,
    /// Constant offset Δ, quarter units.
    pub offset_quarters: i64,
    /// Label of the vertex behind each qubit; qubit `v` is bit `v` of a basis
    /// index (bit 0 least significant).
    pub vertex_labels: Vec<u64>,
    /// Per-qubit neighbour masks, kept for fast energy tables.
    #[serde(skip)]
    neighbor_masks: Vec<u64>,
}

pub fn build_ising(g: &Graph) -> Result<IsingModel> {
    if g.is_empty() {
        return Err(domain("cannot build an Ising model for an empty graph"));
    }
    let n = g.num_vertices();
    let neighbor_masks = if n <= 64 {
        (0..n)
            .map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << w))
            .collect()
    } else {
        Vec::new()
    };
    Ok(IsingModel {
        n,
        couplings: g.edges().map(|(u, v)| (u, v, 1)).collect(),
        fields: (0..n).map(|v| g.degree(v) as i64 - 2).collect(),
        offset_quarters: 2 * n as i64 - 3 * g.num_edges() as i64,
        vertex_labels: g.labels().to_vec(),
        neighbor_masks,
    })
}

impl IsingModel {
    pub fn num_edges(&self) -> usize {
        self.couplings.len()
    }

    /// Δ = |V|/2 − 3|E|/4.
    pub fn offset(&self) -> f64 {
        self.offset_quarters as f64 / 4.0
    }

    /// Energy of an assignment in quarter units.
    pub fn energy_quarters(&self, x: &[bool]) -> Result<i64> {
        check_len(self.n, x)?;
        let z = |v: usize| if x[v] { -1 } else { 1 };
        let pair: i64 = self.couplings.iter().map(|&(u, v, j)| j * z(u) * z(v)).sum();
        let single: i64 = (0..self.n).map(|v| self.fields[v] * z(v)).sum();
        Ok(pair + single + self.offset_quarters)
    }

    pub fn energy(&self, x: &[bool]) -> Result<f64> {
        Ok(self.energy_quarters(x)? as f64 / 4.0)
    }

    /// Energy of basis state `index` (bit `v` = qubit `v`) in quarter units.
    pub fn energy_quarters_of_index(&self, index: u64) -> i64 {
        let x: Vec<bool> = (0..self.n).map(|v| index >> v & 1 == 1).collect();
        self.energy_quarters(&x).expect("length matches by construction")
    }

    /// Profit of basis state `index`, i.e. the negated energy. Always an
    /// integer.
    pub fn profit_of_index(&self, index: u64) -> i64 {
        let q = self.energy_quarters_of_index(index);
        debug_assert_eq!(q % 4, 0, "profit-cover energies are integral");
        -q / 4
    }

    /// Profit of every basis state, built incrementally: adding the highest
    /// set bit `k` to a prefix assignment gains `|N(k) \ prefix| − 1`.
    pub fn profit_table(&self) -> Vec<i32> {
        assert!(self.n <= 40, "profit table limited to 40 qubits");
        let size = 1usize << self.n;
        let mut table = vec![0i32; size];
        for k in 0..self.n {
            let low = (1usize << k) - 1;
            let deg = self.neighbor_masks[k].count_ones() as i32;
            let mask_low = self.neighbor_masks[k] & low as u64;
            for x in 0..(1usize << k) {
                let selected = (x as u64 & mask_low).count_ones() as i32;
                table[x | 1 << k] = table[x] + deg - selected - 1;
            }
        }
        table
    }

    /// Maps a bitstring index to the labels of the selected vertices.
    pub fn selected_labels(&self, index: u64) -> Vec<u64> {
        (0..self.n)
            .filter(|&v| index >> v & 1 == 1)
            .map(|v| self.vertex_labels[v])
            .collect()
    }
}

/// Fixed-width bitstring for basis index `x` on `n` qubits, qubit 0 rightmost.
pub fn bitstring(x: u64, n: usize) -> String {
    (0..n)
        .rev()
        .map(|v| if x >> v & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Inverse of [`bitstring`].
pub fn parse_bitstring(s: &str) -> Result<u64> {
    if s.len() > 64 || s.is_empty() {
        return Err(domain(format!("bitstring '{s}' must have 1..=64 characters")));
    }
    u64::from_str_radix(s, 2).map_err(|_| domain(format!("invalid bitstring '{s}'")))
}
