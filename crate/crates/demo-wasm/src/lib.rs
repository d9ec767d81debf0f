//! Browser bindings: a depth-one energy landscape, layerwise training with
//! sampling, and kernelization of a generated graph. Every entry point
//! returns a JSON string for the page script to draw.

use cover_core::graph::{Graph, VertexSubset};
use cover_core::instances::{gen_erdos_renyi_connected, gen_regular};
use cover_core::kernel::{reconstruct, reduce, RuleSet};
use cover_core::metrics::summarize_exact;
use cover_core::model::{bitstring, build_ising};
use cover_core::oracle::min_vertex_cover_exact;
use cover_core::postprocess::{refine, RefineOptions};
use cover_core::qaoa::{train_with, AngleSchedule, Simulator, TrainConfig};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest graph simulated in the page; keeps each update interactive.
pub const MAX_DEMO_QUBITS: usize = 16;

pub fn make_graph(kind: &str, n: usize, param: f64, seed: u64) -> Result<Graph, String> {
    let g = match kind {
        "er" => gen_erdos_renyi_connected(n, param, seed),
        "regular" => gen_regular(n, param as usize, seed),
        "cycle" => Ok(Graph::cycle(n)),
        "complete" => Ok(Graph::complete(n)),
        other => return Err(format!("unknown graph kind '{other}'")),
    };
    g.map_err(|e| e.to_string())
}

fn simulator(g: &Graph) -> Result<(cover_core::IsingModel, Simulator), String> {
    let m = build_ising(g).map_err(|e| e.to_string())?;
    let sim = Simulator::new(&m, MAX_DEMO_QUBITS).map_err(|e| e.to_string())?;
    Ok((m, sim))
}

/// Expected profit `−⟨H⟩` of a single layer on a `resolution²` grid over
/// `γ ∈ [0, π)`, `β ∈ [0, π/2)`.
pub fn landscape_json(g: &Graph, resolution: usize) -> Result<Value, String> {
    let (m, sim) = simulator(g)?;
    let res = resolution.clamp(2, 128);
    let gammas: Vec<f64> = (0..res).map(|i| std::f64::consts::PI * i as f64 / res as f64).collect();
    let betas: Vec<f64> = (0..res).map(|j| std::f64::consts::FRAC_PI_2 * j as f64 / res as f64).collect();
    let mut values = Vec::with_capacity(res);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for &b in &betas {
        let row: Vec<f64> = gammas
            .iter()
            .map(|&gm| {
                let schedule = AngleSchedule::new(vec![gm], vec![b]).expect("equal lengths");
                -sim.expectation(&sim.evolve(&schedule))
            })
            .collect();
        for (i, &v) in row.iter().enumerate() {
            if v > best.0 {
                best = (v, gammas[i], b);
            }
        }
        values.push(row);
    }
    Ok(json!({
        "n": m.n,
        "edges": g.label_edges(),
        "uniform_profit": -m.offset(),
        "max_profit": sim.max_profit(),
        "gammas": gammas,
        "betas": betas,
        "values": values,
        "best": { "profit": best.0, "gamma": best.1, "beta": best.2 },
    }))
}

/// Trains up to `layers`, reports per-depth quality and samples the final
/// circuit.
pub fn train_json(g: &Graph, layers: usize, shots: u64, seed: u64) -> Result<Value, String> {
    let (m, sim) = simulator(g)?;
    let opt = min_vertex_cover_exact(g).map_err(|e| e.to_string())?.opt_profit;
    let cfg = TrainConfig { max_qubits: MAX_DEMO_QUBITS, ..TrainConfig::default() };
    let (schedule, log) = train_with(&sim, layers.min(12), &cfg, seed).map_err(|e| e.to_string())?;

    let mut depths = Vec::new();
    for p in 0..=schedule.p() {
        let state = sim.evolve(&schedule.prefix(p));
        let s = summarize_exact(&sim.probabilities(&state), sim.profits(), opt).map_err(|e| e.to_string())?;
        depths.push(json!({
            "p": p,
            "expected_profit": -log.expectation_at(p).expect("trained"),
            "mass_optimal": s.mass_optimal,
            "mass_90": s.mass_90,
            "mass_80": s.mass_80,
        }));
    }

    let state = sim.evolve(&schedule);
    let counts = sim.sample(&state, shots.clamp(1, 1_000_000), seed);
    let mut by_profit = std::collections::BTreeMap::<i64, u64>::new();
    for (&x, &c) in &counts {
        *by_profit.entry(m.profit_of_index(x)).or_default() += c;
    }
    let mut top: Vec<(u64, u64)> = counts.iter().map(|(&x, &c)| (x, c)).collect();
    top.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    top.truncate(10);

    let best_x = counts
        .keys()
        .copied()
        .max_by_key(|&x| (m.profit_of_index(x), std::cmp::Reverse(x)))
        .ok_or("no samples")?;
    let refined = refine(g, &VertexSubset::from_bits(g.num_vertices(), best_x), RefineOptions::default())
        .map_err(|e| e.to_string())?;
    let cover: Vec<u64> = refined.cover.iter().map(|v| g.label(v)).collect();
    let independent: Vec<u64> = refined.cover.complement().iter().map(|v| g.label(v)).collect();

    Ok(json!({
        "n": m.n,
        "edges": g.label_edges(),
        "opt_profit": opt,
        "schedule": schedule,
        "depths": depths,
        "profit_histogram": by_profit.into_iter().collect::<Vec<_>>(),
        "top_bitstrings": top.into_iter().map(|(x, c)| json!({
            "bits": bitstring(x, m.n),
            "count": c,
            "profit": m.profit_of_index(x),
        })).collect::<Vec<_>>(),
        "best_sample": { "bits": bitstring(best_x, m.n), "profit": refined.profit_before },
        "cover": cover,
        "independent_set": independent,
    }))
}

/// Kernel of `g` under `rules` plus a minimum cover lifted back from it.
pub fn kernel_json(g: &Graph, rules: &str) -> Result<Value, String> {
    let rules: RuleSet = rules.parse().map_err(|e: cover_core::Error| e.to_string())?;
    let k = reduce(g, rules);
    let residual_cover = min_vertex_cover_exact(&k.reduced).map_err(|e| e.to_string())?.opt_cover;
    let cover = reconstruct(&k, g, &residual_cover).map_err(|e| e.to_string())?;
    let dump = k.dump();
    Ok(json!({
        "vertices": g.labels(),
        "edges": g.label_edges(),
        "kernel": dump,
        "cover": cover.iter().map(|v| g.label(v)).collect::<Vec<_>>(),
    }))
}

fn to_js(v: Result<Value, String>) -> Result<String, JsValue> {
    v.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn landscape(kind: &str, n: usize, param: f64, seed: u32, resolution: usize) -> Result<String, JsValue> {
    to_js(make_graph(kind, n, param, seed.into()).and_then(|g| landscape_json(&g, resolution)))
}

#[wasm_bindgen]
pub fn train(kind: &str, n: usize, param: f64, seed: u32, layers: usize, shots: u32) -> Result<String, JsValue> {
    to_js(make_graph(kind, n, param, seed.into()).and_then(|g| train_json(&g, layers, shots.into(), seed.into())))
}

#[wasm_bindgen]
pub fn kernelize(kind: &str, n: usize, param: f64, seed: u32, rules: &str) -> Result<String, JsValue> {
    to_js(make_graph(kind, n, param, seed.into()).and_then(|g| kernel_json(&g, rules)))
}
