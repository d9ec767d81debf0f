//! End-to-end run: load, (complement,) kernelize, solve the residual, repair,
//! reconstruct and verify.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSubset};
use crate::instances::InstanceSpec;
use crate::kernel::{reduce, KernelResult, RuleSet};
use crate::model::build_ising;
use crate::oracle::min_vertex_cover_exact;
use crate::postprocess::{finalize, refine, RefineOptions, RefinedSolution};
use crate::qaoa::{
    sample_uniform, train_with, AngleSchedule, SampleDistribution, Simulator, TrainConfig,
    TrainLog, DEFAULT_MAX_QUBITS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    MinVc,
    MaxIs,
    MaxCl,
}

impl FromStr for Problem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "minvc" | "min_vc" | "vc" => Ok(Self::MinVc),
            "maxis" | "max_is" | "mis" => Ok(Self::MaxIs),
            "maxcl" | "max_cl" | "clique" => Ok(Self::MaxCl),
            _ => Err(Error::Domain(format!("unknown problem '{s}'"))),
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::MinVc => "minvc",
            Self::MaxIs => "maxis",
            Self::MaxCl => "maxcl",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    #[default]
    Qaoa,
    Exact,
    /// Uniformly random bitstrings, i.e. a depth-zero circuit.
    Random,
}

impl FromStr for SolverKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qaoa" => Ok(Self::Qaoa),
            "exact" => Ok(Self::Exact),
            "random" => Ok(Self::Random),
            _ => Err(Error::Domain(format!("unknown solver '{s}'"))),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Qaoa => "qaoa",
            Self::Exact => "exact",
            Self::Random => "random",
        })
    }
}

fn default_layers() -> usize {
    1
}
fn default_shots() -> u64 {
    10_000
}
fn default_max_qubits() -> usize {
    DEFAULT_MAX_QUBITS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub problem: Problem,
    pub instance: InstanceSpec,
    #[serde(default = "default_layers")]
    pub layers: usize,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub rules: RuleSet,
    #[serde(default)]
    pub skip_preprocess: bool,
    #[serde(default)]
    pub solver: SolverKind,
    #[serde(default = "default_max_qubits")]
    pub max_qubits: usize,
    /// Also try the reduction-rule route when repairing samples.
    #[serde(default)]
    pub refine_with_rules: bool,
    #[serde(default)]
    pub train: TrainConfig,
    /// Free-text note on a known result, copied into the report as is.
    #[serde(default)]
    pub reference: Option<String>,
    /// Wall-clock timings make the report non-reproducible, so they are off
    /// unless asked for.
    #[serde(default)]
    pub record_timings: bool,
}

impl PipelineConfig {
    pub fn new(problem: Problem, instance: InstanceSpec) -> Self {
        Self {
            problem,
            instance,
            layers: default_layers(),
            shots: default_shots(),
            seed: 0,
            rules: RuleSet::all(),
            skip_preprocess: false,
            solver: SolverKind::Qaoa,
            max_qubits: DEFAULT_MAX_QUBITS,
            refine_with_rules: false,
            train: TrainConfig::default(),
            reference: None,
            record_timings: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// Reduction rules alone produced the answer.
    SolvedByRules,
    /// A residual kernel was handed to the solver.
    Solved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitStats {
    pub layers: usize,
    pub two_qubit_gates: usize,
    /// Layers times the colour count of a greedy edge colouring.
    pub two_qubit_depth: usize,
    pub estimated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub load_ms: f64,
    pub reduce_ms: f64,
    pub solve_ms: f64,
    pub postprocess_ms: f64,
}

/// One row of results. Field order follows the usual results table: graph
/// size, kernel size, raw and repaired profit, then the answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub instance: String,
    pub problem: Problem,
    pub vertices: usize,
    pub edges: usize,
    /// Edge count of the complement when solving for cliques.
    pub complement_edges: Option<usize>,
    pub v_safe: usize,
    pub folds: usize,
    pub residual_vertices: usize,
    pub residual_edges: usize,
    pub best_sampled_profit: Option<i64>,
    pub post_processed_profit: Option<i64>,
    pub solution_size: usize,
    pub reference: Option<String>,
    pub status: RunStatus,
    pub solver: String,
    /// Vertex labels of the answer, ascending.
    pub solution: Vec<u64>,
    pub cover_size: usize,
    pub layers: usize,
    pub shots: u64,
    pub seed: u64,
    pub rules: RuleSet,
    pub circuit: Option<CircuitStats>,
    pub training: Option<TrainLog>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings: Option<Timings>,
}

/// Everything a run produced, for callers that want more than the report.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub report: PipelineReport,
    pub kernel: KernelResult,
    pub schedule: Option<AngleSchedule>,
    pub distribution: Option<SampleDistribution>,
    pub refined: Option<RefinedSolution>,
}

pub fn run(config: &PipelineConfig) -> Result<PipelineReport> {
    Ok(run_detailed(config)?.report)
}

pub fn run_detailed(config: &PipelineConfig) -> Result<PipelineRun> {
    let t0 = Instant::now();
    let graph = config.instance.build()?;
    let load_ms = ms(t0);
    run_on_graph(&config.instance.name(), &graph, config, load_ms)
}

/// Runs on an already built graph; `config.instance` is only used for naming
/// by [`run_detailed`].
pub fn run_on_graph(
    name: &str,
    graph: &Graph,
    config: &PipelineConfig,
    load_ms: f64,
) -> Result<PipelineRun> {
    let work = match config.problem {
        Problem::MaxCl => graph.complement(),
        _ => graph.clone(),
    };

    let t = Instant::now();
    let rules = if config.skip_preprocess { RuleSet::none() } else { config.rules };
    let kernel = reduce(&work, rules);
    let reduce_ms = ms(t);
    let residual = &kernel.reduced;

    let t = Instant::now();
    let mut schedule = None;
    let mut distribution = None;
    let mut training = None;
    let mut circuit = None;
    let (cover_reduced, best_sampled, refined) = if residual.num_edges() == 0 {
        (VertexSubset::empty(residual.num_vertices()), None, None)
    } else {
        match config.solver {
            SolverKind::Exact => (min_vertex_cover_exact(residual)?.opt_cover, None, None),
            SolverKind::Qaoa | SolverKind::Random => {
                let dist = if config.solver == SolverKind::Qaoa {
                    let model = build_ising(residual)?;
                    let mut cfg = config.train.clone();
                    cfg.max_qubits = config.max_qubits;
                    let sim = Simulator::new(&model, config.max_qubits)?;
                    let (sched, log) = train_with(&sim, config.layers, &cfg, config.seed)?;
                    let state = sim.evolve(&sched);
                    let counts = sim.sample(&state, config.shots, config.seed);
                    circuit = Some(circuit_stats(residual, config.layers));
                    schedule = Some(sched);
                    training = Some(log);
                    SampleDistribution::new(model.n, config.shots, config.seed, counts)
                } else {
                    sample_uniform(residual.num_vertices(), config.shots, config.seed)?
                };
                let (best_x, best_profit) = best_sample(residual, &dist)?;
                let bits = VertexSubset::from_bits(residual.num_vertices(), best_x);
                let refined = refine(
                    residual,
                    &bits,
                    RefineOptions { use_rules: config.refine_with_rules },
                )?;
                distribution = Some(dist);
                (refined.cover.clone(), Some(best_profit), Some(refined))
            }
        }
    };
    let solve_ms = ms(t);

    let t = Instant::now();
    let solution = finalize(config.problem, &work, &kernel, &cover_reduced)?;
    verify(config.problem, graph, &solution)?;
    let postprocess_ms = ms(t);
    let cover_size = match config.problem {
        Problem::MinVc => solution.len(),
        _ => graph.num_vertices() - solution.len(),
    };

    let mut labels: Vec<u64> = solution.iter().map(|v| graph.label(v)).collect();
    labels.sort_unstable();
    let report = PipelineReport {
        instance: name.to_string(),
        problem: config.problem,
        vertices: graph.num_vertices(),
        edges: graph.num_edges(),
        complement_edges: (config.problem == Problem::MaxCl).then(|| work.num_edges()),
        v_safe: kernel.v_safe.len(),
        folds: kernel.folds.len(),
        residual_vertices: residual.num_vertices(),
        residual_edges: residual.num_edges(),
        best_sampled_profit: best_sampled,
        post_processed_profit: refined.as_ref().map(|r| r.profit_after),
        solution_size: solution.len(),
        reference: config.reference.clone(),
        status: if residual.num_edges() == 0 { RunStatus::SolvedByRules } else { RunStatus::Solved },
        solver: if residual.num_edges() == 0 { "bypassed".into() } else { config.solver.to_string() },
        solution: labels,
        cover_size,
        layers: config.layers,
        shots: config.shots,
        seed: config.seed,
        rules,
        circuit,
        training,
        timings: config.record_timings.then_some(Timings { load_ms, reduce_ms, solve_ms, postprocess_ms }),
    };
    Ok(PipelineRun { report, kernel, schedule, distribution, refined })
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Highest-profit sampled bitstring; ties go to the most frequent, then to
/// the smallest index.
fn best_sample(g: &Graph, dist: &SampleDistribution) -> Result<(u64, i64)> {
    let mut best: Option<(i64, u64, u64)> = None;
    for (&x, &c) in &dist.counts {
        let p = g.profit(&VertexSubset::from_bits(g.num_vertices(), x))?;
        if best.is_none_or(|(bp, bc, _)| (p, c) > (bp, bc)) {
            best = Some((p, c, x));
        }
    }
    best.map(|(p, _, x)| (x, p))
        .ok_or_else(|| Error::Infeasible("no samples drawn".into()))
}

fn verify(problem: Problem, g: &Graph, s: &VertexSubset) -> Result<()> {
    let ok = match problem {
        Problem::MinVc => g.is_vertex_cover(s)?,
        Problem::MaxIs => g.is_independent_set(s)?,
        Problem::MaxCl => g.is_clique(s)?,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Infeasible(format!("final {problem} solution failed verification")))
    }
}

/// Number of colours used by a first-fit edge colouring in edge order.
pub fn greedy_edge_colors(g: &Graph) -> usize {
    let mut used: Vec<Vec<usize>> = vec![Vec::new(); g.num_vertices()];
    let mut colors = 0;
    for (u, v) in g.edges() {
        let c = (0..).find(|c| !used[u].contains(c) && !used[v].contains(c)).expect("unbounded");
        used[u].push(c);
        used[v].push(c);
        colors = colors.max(c + 1);
    }
    colors
}

pub fn circuit_stats(g: &Graph, layers: usize) -> CircuitStats {
    CircuitStats {
        layers,
        two_qubit_gates: layers * g.num_edges(),
        two_qubit_depth: layers * greedy_edge_colors(g),
        estimated: true,
    }
}

/// Outcome of one batch entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRow {
    pub instance: String,
    pub report: Option<PipelineReport>,
    pub error: Option<String>,
}

/// Runs every configuration; failures are recorded per row.
pub fn batch(configs: &[PipelineConfig]) -> Vec<BatchRow> {
    let one = |c: &PipelineConfig| match run(c) {
        Ok(r) => BatchRow { instance: c.instance.name(), report: Some(r), error: None },
        Err(e) => BatchRow { instance: c.instance.name(), report: None, error: Some(e.to_string()) },
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        configs.par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        configs.iter().map(one).collect()
    }
}

fn cell<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub const CSV_HEADER: &str = "instance,problem,vertices,edges,complement_edges,v_safe,folds,\
residual_vertices,residual_edges,best_sampled_profit,post_processed_profit,solution_size,\
reference,status,solver,error";

pub fn report_csv_row(r: &PipelineReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},",
        r.instance,
        r.problem,
        r.vertices,
        r.edges,
        cell(r.complement_edges),
        r.v_safe,
        r.folds,
        r.residual_vertices,
        r.residual_edges,
        cell(r.best_sampled_profit),
        cell(r.post_processed_profit),
        r.solution_size,
        r.reference.as_deref().unwrap_or("").replace([',', '\n'], ";"),
        serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
        r.solver,
    )
}

pub fn batch_csv(rows: &[BatchRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for row in rows {
        match (&row.report, &row.error) {
            (Some(r), _) => out.push_str(&report_csv_row(r)),
            (None, e) => {
                let msg = e.as_deref().unwrap_or("").replace([',', '\n'], ";");
                out.push_str(&format!("{},,,,,,,,,,,,,error,,{msg}", row.instance));
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(problem: Problem, n: usize, p: f64, seed: u64) -> PipelineConfig {
        PipelineConfig::new(problem, InstanceSpec::ErdosRenyi { n, p, seed })
    }

    #[test]
    fn solvers_agree_on_small_graph() {
        for problem in [Problem::MinVc, Problem::MaxIs, Problem::MaxCl] {
            let mut c = cfg(problem, 9, 0.4, 3);
            c.solver = SolverKind::Exact;
            let exact = run(&c).unwrap();
            c.solver = SolverKind::Qaoa;
            c.layers = 2;
            c.shots = 2000;
            let q = run(&c).unwrap();
            assert!(q.solution_size <= exact.solution_size || problem == Problem::MinVc);
            if problem == Problem::MinVc {
                assert!(q.solution_size >= exact.solution_size);
            }
        }
    }

    #[test]
    fn edge_colouring_of_cycles() {
        assert_eq!(greedy_edge_colors(&Graph::cycle(4)), 2);
        assert_eq!(greedy_edge_colors(&Graph::cycle(5)), 3);
        assert_eq!(circuit_stats(&Graph::cycle(4), 3).two_qubit_gates, 12);
    }

    #[test]
    fn timings_only_when_requested() {
        let mut c = cfg(Problem::MinVc, 8, 0.3, 1);
        let r = serde_json::to_string(&run(&c).unwrap()).unwrap();
        assert!(!r.contains("timings"));
        c.record_timings = true;
        assert!(run(&c).unwrap().timings.is_some());
    }

    #[test]
    fn capacity_error_for_large_residual() {
        let mut c = cfg(Problem::MinVc, 14, 0.5, 2);
        c.skip_preprocess = true;
        c.max_qubits = 10;
        assert!(matches!(run(&c), Err(Error::Capacity { .. })));
    }
}
