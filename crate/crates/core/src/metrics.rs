//! Quality summaries of sampled (or exact) output distributions.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::model::IsingModel;
use crate::qaoa::{SampleDistribution, Simulator, TrainConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub best_profit: i64,
    pub most_likely_profit: i64,
    pub weighted_average_profit: f64,
    pub opt_profit: i64,
    /// `best / opt`, only defined for a positive optimum.
    pub approx_ratio_best: Option<f64>,
    /// Probability mass on optimal bitstrings.
    pub mass_optimal: f64,
    /// Mass with profit at least 90% (resp. 80%) of a positive optimum.
    pub mass_90: Option<f64>,
    pub mass_80: Option<f64>,
}

/// Summary of weighted bitstrings `(index, weight)`; weights need not be
/// normalized. Ties for the most likely bitstring go to the smallest index,
/// which is also the lexicographically smallest bitstring.
fn summarize_weighted(
    items: impl Iterator<Item = (u64, f64)>,
    profit: impl Fn(u64) -> i64,
    opt_profit: i64,
) -> Result<DistributionSummary> {
    let mut total = 0.0;
    let mut sum = 0.0;
    let mut best: Option<i64> = None;
    let mut likely: Option<(f64, u64)> = None;
    let (mut m_opt, mut m90, mut m80) = (0.0, 0.0, 0.0);
    for (x, w) in items {
        if w <= 0.0 {
            continue;
        }
        let p = profit(x);
        total += w;
        sum += w * p as f64;
        best = Some(best.map_or(p, |b| b.max(p)));
        if likely.is_none_or(|(lw, _)| w > lw) {
            likely = Some((w, x));
        }
        if p >= opt_profit {
            m_opt += w;
        }
        if 10 * p >= 9 * opt_profit {
            m90 += w;
        }
        if 10 * p >= 8 * opt_profit {
            m80 += w;
        }
    }
    let (Some(best_profit), Some((_, likely_x))) = (best, likely) else {
        return Err(domain("distribution has no mass"));
    };
    let positive = opt_profit > 0;
    Ok(DistributionSummary {
        best_profit,
        most_likely_profit: profit(likely_x),
        weighted_average_profit: sum / total,
        opt_profit,
        approx_ratio_best: positive.then(|| best_profit as f64 / opt_profit as f64),
        mass_optimal: m_opt / total,
        mass_90: positive.then(|| m90 / total),
        mass_80: positive.then(|| m80 / total),
    })
}

/// Summary of a sampled distribution; `opt_profit` comes from an exact solver.
pub fn summarize(
    dist: &SampleDistribution,
    model: &IsingModel,
    opt_profit: i64,
) -> Result<DistributionSummary> {
    if dist.n != model.n {
        return Err(domain(format!(
            "distribution over {} bits, model has {} qubits",
            dist.n, model.n
        )));
    }
    summarize_weighted(
        dist.counts.iter().map(|(&x, &c)| (x, c as f64)),
        |x| model.profit_of_index(x),
        opt_profit,
    )
}

/// Same summary for exact probabilities `probs[x]` with profits `profits[x]`.
pub fn summarize_exact(probs: &[f64], profits: &[i32], opt_profit: i64) -> Result<DistributionSummary> {
    if probs.len() != profits.len() {
        return Err(domain("probability and profit tables differ in length"));
    }
    summarize_weighted(
        probs.iter().enumerate().map(|(x, &p)| (x as u64, p)),
        |x| profits[x as usize] as i64,
        opt_profit,
    )
}

/// Mean size of the covers obtained by completing each sample, assuming the
/// ideal `|E| − profit` size.
pub fn expected_cover_size(summary: &DistributionSummary, num_edges: usize) -> f64 {
    num_edges as f64 - summary.weighted_average_profit
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthRow {
    pub instance: String,
    pub p: usize,
    pub expectation: f64,
    pub best_profit: i64,
    pub most_likely_profit: i64,
    pub weighted_average_profit: f64,
    pub opt_profit: i64,
    pub approx_ratio_best: Option<f64>,
    pub mass_optimal: f64,
    pub mass_90: Option<f64>,
    pub mass_80: Option<f64>,
}

/// Trains once up to `max(p_list)` and evaluates every requested prefix.
pub fn depth_sweep(
    instance: &str,
    model: &IsingModel,
    p_list: &[usize],
    cfg: &TrainConfig,
    shots: u64,
    seed: u64,
    opt_profit: i64,
) -> Result<Vec<DepthRow>> {
    let sim = Simulator::new(model, cfg.max_qubits)?;
    let p_max = p_list.iter().copied().max().unwrap_or(0);
    let (schedule, log) = crate::qaoa::train_with(&sim, p_max, cfg, seed)?;
    p_list
        .iter()
        .map(|&p| {
            let state = sim.evolve(&schedule.prefix(p));
            let counts = sim.sample(&state, shots, seed);
            let dist = SampleDistribution::new(model.n, shots, seed, counts);
            let s = summarize(&dist, model, opt_profit)?;
            Ok(DepthRow {
                instance: instance.to_string(),
                p,
                expectation: log.expectation_at(p).expect("trained to p_max"),
                best_profit: s.best_profit,
                most_likely_profit: s.most_likely_profit,
                weighted_average_profit: s.weighted_average_profit,
                opt_profit,
                approx_ratio_best: s.approx_ratio_best,
                mass_optimal: s.mass_optimal,
                mass_90: s.mass_90,
                mass_80: s.mass_80,
            })
        })
        .collect()
}

fn opt_cell(x: Option<f64>) -> String {
    x.map(|v| format!("{v}")).unwrap_or_default()
}

pub fn depth_rows_csv(rows: &[DepthRow]) -> String {
    let mut out = String::from(
        "instance,p,expectation,best_profit,most_likely_profit,weighted_average_profit,\
         opt_profit,approx_ratio_best,mass_optimal,mass_90,mass_80\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.instance,
            r.p,
            r.expectation,
            r.best_profit,
            r.most_likely_profit,
            r.weighted_average_profit,
            r.opt_profit,
            opt_cell(r.approx_ratio_best),
            r.mass_optimal,
            opt_cell(r.mass_90),
            opt_cell(r.mass_80),
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanVar {
    pub mean: f64,
    pub variance: f64,
    pub count: usize,
}

impl MeanVar {
    /// Population variance; `None` for an empty sample.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some(Self { mean, variance, count: values.len() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthAggregate {
    pub p: usize,
    pub approx_ratio_best: Option<MeanVar>,
    pub mass_optimal: Option<MeanVar>,
    pub mass_90: Option<MeanVar>,
    pub mass_80: Option<MeanVar>,
}

/// Mean and variance across instances, per depth. Undefined metrics are
/// left out of their column.
pub fn aggregate_by_depth(rows: &[DepthRow]) -> Vec<DepthAggregate> {
    let mut depths: Vec<usize> = rows.iter().map(|r| r.p).collect();
    depths.sort_unstable();
    depths.dedup();
    depths
        .into_iter()
        .map(|p| {
            let at: Vec<&DepthRow> = rows.iter().filter(|r| r.p == p).collect();
            let col = |f: &dyn Fn(&DepthRow) -> Option<f64>| {
                MeanVar::of(&at.iter().filter_map(|r| f(r)).collect::<Vec<_>>())
            };
            DepthAggregate {
                p,
                approx_ratio_best: col(&|r| r.approx_ratio_best),
                mass_optimal: col(&|r| Some(r.mass_optimal)),
                mass_90: col(&|r| r.mass_90),
                mass_80: col(&|r| r.mass_80),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::model::build_ising;
    use std::collections::BTreeMap;

    #[test]
    fn summary_of_hand_made_distribution() {
        // Path 0-1-2: profit(010) = 1 is optimal, profit(000) = 0, profit(111) = -1.
        let m = build_ising(&Graph::path(3)).unwrap();
        let counts = BTreeMap::from([(0b010, 5), (0b000, 3), (0b111, 2)]);
        let d = SampleDistribution::new(3, 10, 0, counts);
        let s = summarize(&d, &m, 1).unwrap();
        assert_eq!(s.best_profit, 1);
        assert_eq!(s.most_likely_profit, 1);
        assert!((s.weighted_average_profit - 0.3).abs() < 1e-12);
        assert_eq!(s.approx_ratio_best, Some(1.0));
        assert!((s.mass_optimal - 0.5).abs() < 1e-12);
        assert_eq!(s.mass_90, Some(0.5));
        assert!((expected_cover_size(&s, 2) - 1.7).abs() < 1e-12);
    }

    #[test]
    fn undefined_ratios_for_nonpositive_optimum() {
        let m = build_ising(&Graph::complete(2)).unwrap();
        let d = SampleDistribution::new(2, 4, 0, BTreeMap::from([(0b01, 2), (0b10, 2)]));
        let s = summarize(&d, &m, 0).unwrap();
        assert_eq!(s.approx_ratio_best, None);
        assert_eq!(s.mass_90, None);
        assert_eq!(s.mass_optimal, 1.0);
        // Equal counts: the smaller bitstring "01" is reported.
        assert_eq!(s.most_likely_profit, 0);
    }

    #[test]
    fn mean_var() {
        let mv = MeanVar::of(&[1.0, 3.0]).unwrap();
        assert_eq!((mv.mean, mv.variance, mv.count), (2.0, 1.0, 2));
        assert!(MeanVar::of(&[]).is_none());
    }
}
