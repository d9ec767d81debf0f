//! Statevector QAOA for the profit-cover Ising model.
//!
//! The state starts in `|+⟩^n`; layer `k` applies `exp(−iγ_k H)` (diagonal)
//! followed by `RX(2β_k)` on every qubit. Basis index bit `v` is qubit `v`.
//!
//! Work is split into fixed-size chunks. Reductions add per-chunk partial
//! sums in chunk order, so results are bit-identical whether or not the
//! chunks run on several threads.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{bitstring, parse_bitstring, IsingModel};
use crate::optimize::{nelder_mead, NelderMeadOptions};

pub const DEFAULT_MAX_QUBITS: usize = 25;
const CHUNK: usize = 1 << 12;

/// Per-layer angles `γ_k` and `β_k`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AngleSchedule {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ScheduleJson {
    p: usize,
    gammas: Vec<f64>,
    betas: Vec<f64>,
}

impl Serialize for AngleSchedule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ScheduleJson { p: self.p(), gammas: self.gammas.clone(), betas: self.betas.clone() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AngleSchedule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ScheduleJson::deserialize(d)?;
        AngleSchedule::new(raw.gammas, raw.betas)
            .ok()
            .filter(|a| a.p() == raw.p)
            .ok_or_else(|| serde::de::Error::custom("p must equal the length of gammas and betas"))
    }
}

impl AngleSchedule {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.len() != betas.len() {
            return Err(Error::Domain(format!(
                "{} gammas but {} betas",
                gammas.len(),
                betas.len()
            )));
        }
        Ok(Self { gammas, betas })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn push(&mut self, gamma: f64, beta: f64) {
        self.gammas.push(gamma);
        self.betas.push(beta);
    }

    /// The first `p` layers.
    pub fn prefix(&self, p: usize) -> Self {
        let p = p.min(self.p());
        Self { gammas: self.gammas[..p].to_vec(), betas: self.betas[..p].to_vec() }
    }

    pub fn layers(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.gammas.iter().copied().zip(self.betas.iter().copied())
    }
}

#[cfg(feature = "parallel")]
fn for_each_chunk<T: Send>(data: &mut [T], f: impl Fn(usize, &mut [T]) + Sync) {
    use rayon::prelude::*;
    data.par_chunks_mut(CHUNK).enumerate().for_each(|(i, c)| f(i, c));
}

#[cfg(not(feature = "parallel"))]
fn for_each_chunk<T: Send>(data: &mut [T], f: impl Fn(usize, &mut [T]) + Sync) {
    data.chunks_mut(CHUNK).enumerate().for_each(|(i, c)| f(i, c));
}

#[cfg(feature = "parallel")]
fn for_each_chunk_pair<T: Send>(a: &mut [T], b: &mut [T], f: impl Fn(&mut [T], &mut [T]) + Sync) {
    use rayon::prelude::*;
    a.par_chunks_mut(CHUNK).zip(b.par_chunks_mut(CHUNK)).for_each(|(x, y)| f(x, y));
}

#[cfg(not(feature = "parallel"))]
fn for_each_chunk_pair<T: Send>(a: &mut [T], b: &mut [T], f: impl Fn(&mut [T], &mut [T]) + Sync) {
    a.chunks_mut(CHUNK).zip(b.chunks_mut(CHUNK)).for_each(|(x, y)| f(x, y));
}

/// Sum of `f(chunk_start, chunk)` over fixed chunks, added in chunk order.
fn chunked_sum<T: Sync>(data: &[T], f: impl Fn(usize, &[T]) -> f64 + Sync + Send) -> f64 {
    #[cfg(feature = "parallel")]
    let partials: Vec<f64> = {
        use rayon::prelude::*;
        data.par_chunks(CHUNK).enumerate().map(|(i, c)| f(i * CHUNK, c)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<f64> = data.chunks(CHUNK).enumerate().map(|(i, c)| f(i * CHUNK, c)).collect();
    partials.iter().sum()
}

/// Diagonal of the cost Hamiltonian plus scratch needed to evolve states.
#[derive(Debug, Clone)]
pub struct Simulator {
    n: usize,
    /// Profit (= −energy) of every basis state.
    profits: Vec<i32>,
    min_profit: i32,
    max_profit: i32,
    offset: f64,
}

impl Simulator {
    pub fn new(model: &IsingModel, max_qubits: usize) -> Result<Self> {
        let limit = max_qubits.min(40);
        if model.n > limit {
            return Err(Error::Capacity { what: "qubits", actual: model.n, limit });
        }
        let profits = model.profit_table();
        let min_profit = *profits.iter().min().expect("nonempty");
        let max_profit = *profits.iter().max().expect("nonempty");
        Ok(Self { n: model.n, profits, min_profit, max_profit, offset: model.offset() })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn profits(&self) -> &[i32] {
        &self.profits
    }

    /// Largest profit over all basis states.
    pub fn max_profit(&self) -> i64 {
        self.max_profit as i64
    }

    /// Expected energy of the uniform superposition.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn uniform_state(&self) -> Vec<Complex64> {
        let dim = 1usize << self.n;
        vec![Complex64::new(1.0 / (dim as f64).sqrt(), 0.0); dim]
    }

    pub fn apply_layer(&self, state: &mut [Complex64], gamma: f64, beta: f64) {
        // Energy is −profit, so the phase on x is exp(+iγ·profit(x)).
        let phases: Vec<Complex64> = (self.min_profit..=self.max_profit)
            .map(|p| Complex64::from_polar(1.0, gamma * p as f64))
            .collect();
        let min = self.min_profit;
        let profits = &self.profits;
        for_each_chunk(state, |i, chunk| {
            let base = i * CHUNK;
            for (k, a) in chunk.iter_mut().enumerate() {
                *a *= phases[(profits[base + k] - min) as usize];
            }
        });
        let (c, s) = (beta.cos(), beta.sin());
        for q in 0..self.n {
            apply_rx(state, q, c, s);
        }
    }

    pub fn evolve(&self, schedule: &AngleSchedule) -> Vec<Complex64> {
        let mut state = self.uniform_state();
        for (g, b) in schedule.layers() {
            self.apply_layer(&mut state, g, b);
        }
        state
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn expectation(&self, state: &[Complex64]) -> f64 {
        let profits = &self.profits;
        -chunked_sum(state, |start, chunk| {
            chunk
                .iter()
                .enumerate()
                .map(|(k, a)| a.norm_sqr() * profits[start + k] as f64)
                .sum()
        })
    }

    pub fn norm_sqr(&self, state: &[Complex64]) -> f64 {
        chunked_sum(state, |_, chunk| chunk.iter().map(|a| a.norm_sqr()).sum())
    }

    pub fn probabilities(&self, state: &[Complex64]) -> Vec<f64> {
        state.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Draws `shots` basis states from `|ψ|²` by inverse-CDF lookup.
    pub fn sample(&self, state: &[Complex64], shots: u64, seed: u64) -> BTreeMap<u64, u64> {
        let mut cdf = Vec::with_capacity(state.len());
        let mut acc = 0.0;
        for a in state {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let total = acc;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = BTreeMap::new();
        for _ in 0..shots {
            let u = rng.gen::<f64>() * total;
            let idx = cdf.partition_point(|&c| c <= u).min(state.len() - 1);
            *counts.entry(idx as u64).or_insert(0) += 1;
        }
        counts
    }
}

/// `exp(−iβX)` on qubit `q`: `[[c, −is], [−is, c]]`.
fn apply_rx(state: &mut [Complex64], q: usize, c: f64, s: f64) {
    let stride = 1usize << q;
    let mix = |lo: &mut [Complex64], hi: &mut [Complex64]| {
        for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x0, x1) = (*a0, *a1);
            *a0 = Complex64::new(c * x0.re + s * x1.im, c * x0.im - s * x1.re);
            *a1 = Complex64::new(c * x1.re + s * x0.im, c * x1.im - s * x0.re);
        }
    };
    if 2 * stride <= CHUNK {
        for_each_chunk(state, |_, chunk| {
            for block in chunk.chunks_mut(2 * stride) {
                let (lo, hi) = block.split_at_mut(stride);
                mix(lo, hi);
            }
        });
    } else {
        for block in state.chunks_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for_each_chunk_pair(lo, hi, |x, y| mix(x, y));
        }
    }
}

/// Final state of the circuit.
pub fn evolve(model: &IsingModel, schedule: &AngleSchedule) -> Result<Vec<Complex64>> {
    Ok(Simulator::new(model, DEFAULT_MAX_QUBITS)?.evolve(schedule))
}

/// `⟨H⟩` after the circuit; equals Δ for `p = 0`.
pub fn expectation(model: &IsingModel, schedule: &AngleSchedule) -> Result<f64> {
    let sim = Simulator::new(model, DEFAULT_MAX_QUBITS)?;
    Ok(sim.expectation(&sim.evolve(schedule)))
}

pub fn sample(
    model: &IsingModel,
    schedule: &AngleSchedule,
    shots: u64,
    seed: u64,
) -> Result<SampleDistribution> {
    let sim = Simulator::new(model, DEFAULT_MAX_QUBITS)?;
    let state = sim.evolve(schedule);
    Ok(SampleDistribution::new(model.n, shots, seed, sim.sample(&state, shots, seed)))
}

/// Uniform random bitstrings without building a statevector.
pub fn sample_uniform(n: usize, shots: u64, seed: u64) -> Result<SampleDistribution> {
    if n == 0 || n > 64 {
        return Err(Error::Capacity { what: "bits for uniform sampling", actual: n, limit: 64 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        *counts.entry(rng.gen::<u64>() & mask).or_insert(0) += 1;
    }
    Ok(SampleDistribution::new(n, shots, seed, counts))
}

/// Measurement counts keyed by basis index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleDistribution {
    pub n: usize,
    pub shots: u64,
    pub seed: u64,
    pub counts: BTreeMap<u64, u64>,
}

#[derive(Serialize, Deserialize)]
struct DistributionJson {
    shots: u64,
    seed: u64,
    counts: BTreeMap<String, u64>,
}

impl SampleDistribution {
    pub fn new(n: usize, shots: u64, seed: u64, counts: BTreeMap<u64, u64>) -> Self {
        Self { n, shots, seed, counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn to_json(&self) -> Result<String> {
        let json = DistributionJson {
            shots: self.shots,
            seed: self.seed,
            counts: self.counts.iter().map(|(&x, &c)| (bitstring(x, self.n), c)).collect(),
        };
        Ok(serde_json::to_string_pretty(&json)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: DistributionJson = serde_json::from_str(s)?;
        let n = raw.counts.keys().next().map_or(0, |k| k.len());
        let mut counts = BTreeMap::new();
        for (k, c) in raw.counts {
            if k.len() != n {
                return Err(Error::Domain("bitstring keys differ in length".into()));
            }
            counts.insert(parse_bitstring(&k)?, c);
        }
        Ok(Self { n, shots: raw.shots, seed: raw.seed, counts })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Nelder–Mead starting points `(γ, β)`.
    pub starts: Vec<(f64, f64)>,
    /// Extra uniformly drawn starts in `[0, π) × [0, π/2)`, seeded.
    pub random_starts: usize,
    /// Objective evaluations per layer, shared by all starts.
    pub evals_per_layer: usize,
    pub initial_step: f64,
    pub max_qubits: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            starts: vec![(0.15, 0.4), (0.15, 1.2), (0.6, 0.4), (0.6, 1.2)],
            random_starts: 0,
            evals_per_layer: 200,
            initial_step: 0.1,
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerLog {
    pub layer: usize,
    pub gamma: f64,
    pub beta: f64,
    pub expectation: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    /// `⟨H⟩` of the uniform state, i.e. Δ.
    pub initial_expectation: f64,
    pub layers: Vec<LayerLog>,
}

impl TrainLog {
    /// Expectation after `p` trained layers (`p = 0` gives Δ).
    pub fn expectation_at(&self, p: usize) -> Option<f64> {
        match p {
            0 => Some(self.initial_expectation),
            _ => self.layers.get(p - 1).map(|l| l.expectation),
        }
    }
}

/// Layerwise training: layer `k` is optimized with layers `1..k` frozen. The
/// identity layer `(0, 0)` is always a candidate, so the trained expectation
/// never increases with depth.
pub fn train_layerwise(
    model: &IsingModel,
    p_max: usize,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<(AngleSchedule, TrainLog)> {
    let sim = Simulator::new(model, cfg.max_qubits)?;
    train_with(&sim, p_max, cfg, seed)
}

pub fn train_with(
    sim: &Simulator,
    p_max: usize,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<(AngleSchedule, TrainLog)> {
    let mut starts = cfg.starts.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cfg.random_starts {
        starts.push((
            rng.gen_range(0.0..std::f64::consts::PI),
            rng.gen_range(0.0..std::f64::consts::FRAC_PI_2),
        ));
    }
    let mut frozen = sim.uniform_state();
    let mut schedule = AngleSchedule::empty();
    let mut log = TrainLog { initial_expectation: sim.expectation(&frozen), layers: Vec::new() };
    let mut scratch = frozen.clone();

    for layer in 1..=p_max {
        let mut objective = |[g, b]: [f64; 2]| {
            scratch.copy_from_slice(&frozen);
            sim.apply_layer(&mut scratch, g, b);
            sim.expectation(&scratch)
        };
        let mut best = ([0.0, 0.0], objective([0.0, 0.0]));
        if !best.1.is_finite() {
            best.1 = f64::INFINITY;
        }
        let mut used = 1;
        let share = cfg.evals_per_layer.saturating_sub(1) / starts.len().max(1);
        if share > 0 {
            for &(g0, b0) in &starts {
                let opts = NelderMeadOptions {
                    initial_step: cfg.initial_step,
                    max_evals: share,
                    ..Default::default()
                };
                let m = nelder_mead(&mut objective, [g0, b0], &opts);
                used += m.evaluations;
                if m.value < best.1 {
                    best = (m.x, m.value);
                }
            }
        }
        if !best.1.is_finite() {
            return Err(Error::Training(format!("no finite objective value at layer {layer}")));
        }
        let [g, b] = best.0;
        sim.apply_layer(&mut frozen, g, b);
        schedule.push(g, b);
        log.layers.push(LayerLog {
            layer,
            gamma: g,
            beta: b,
            expectation: best.1,
            evaluations: used,
        });
    }
    Ok((schedule, log))
}
