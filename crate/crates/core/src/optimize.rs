//! Two-parameter Nelder–Mead minimization with an evaluation budget.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub initial_step: f64,
    pub max_evals: usize,
    /// Stop when the spread of simplex values drops below this.
    pub f_tolerance: f64,
    /// Stop when the simplex diameter drops below this.
    pub x_tolerance: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.1,
            max_evals: 50,
            f_tolerance: 1e-10,
            x_tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: [f64; 2],
    pub value: f64,
    pub evaluations: usize,
}

/// Minimizes `f` starting from `x0`. Non-finite values are treated as `+∞`,
/// so the returned minimum can be infinite only if every evaluation was.
pub fn nelder_mead(
    mut f: impl FnMut([f64; 2]) -> f64,
    x0: [f64; 2],
    opts: &NelderMeadOptions,
) -> Minimum {
    let mut evals = 0usize;
    let mut eval = |x: [f64; 2], evals: &mut usize| {
        *evals += 1;
        let y = f(x);
        if y.is_finite() {
            y
        } else {
            f64::INFINITY
        }
    };
    let budget = opts.max_evals.max(1);

    let mut simplex: Vec<([f64; 2], f64)> = Vec::with_capacity(3);
    for x in [
        x0,
        [x0[0] + opts.initial_step, x0[1]],
        [x0[0], x0[1] + opts.initial_step],
    ] {
        if evals == budget {
            break;
        }
        let y = eval(x, &mut evals);
        simplex.push((x, y));
    }
    let best = |s: &[([f64; 2], f64)], evals| {
        let (x, value) = *s
            .iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("simplex has at least one point");
        Minimum { x, value, evaluations: evals }
    };
    if simplex.len() < 3 {
        return best(&simplex, evals);
    }

    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];

    while evals < budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[2].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| (x[0] - simplex[0].0[0]).hypot(x[1] - simplex[0].0[1]))
            .fold(0.0, f64::max);
        if (spread.is_finite() && spread <= opts.f_tolerance) || diameter <= opts.x_tolerance {
            break;
        }
        let centroid = lerp(simplex[0].0, simplex[1].0, 0.5);
        let worst = simplex[2];

        let reflected = lerp(centroid, worst.0, -1.0);
        let fr = eval(reflected, &mut evals);
        if fr < simplex[0].1 {
            if evals < budget {
                let expanded = lerp(centroid, worst.0, -2.0);
                let fe = eval(expanded, &mut evals);
                simplex[2] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            } else {
                simplex[2] = (reflected, fr);
            }
            continue;
        }
        if fr < simplex[1].1 {
            simplex[2] = (reflected, fr);
            continue;
        }
        if evals == budget {
            if fr < worst.1 {
                simplex[2] = (reflected, fr);
            }
            break;
        }
        // Contraction, outside if the reflection improved on the worst point.
        let (contracted, fc) = if fr < worst.1 {
            let c = lerp(centroid, reflected, 0.5);
            (c, eval(c, &mut evals))
        } else {
            let c = lerp(centroid, worst.0, 0.5);
            (c, eval(c, &mut evals))
        };
        if fc < worst.1.min(fr) {
            simplex[2] = (contracted, fc);
            continue;
        }
        if fr < worst.1 {
            simplex[2] = (reflected, fr);
        }
        // Shrink toward the best vertex.
        for i in 1..3 {
            if evals == budget {
                break;
            }
            let x = lerp(simplex[0].0, simplex[i].0, 0.5);
            let y = eval(x, &mut evals);
            simplex[i] = (x, y);
        }
    }
    best(&simplex, evals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let opts = NelderMeadOptions { max_evals: 200, ..Default::default() };
        let m = nelder_mead(|[x, y]| (x - 1.0).powi(2) + 3.0 * (y + 0.5).powi(2), [0.0, 0.0], &opts);
        assert!((m.x[0] - 1.0).abs() < 1e-3 && (m.x[1] + 0.5).abs() < 1e-3, "{m:?}");
        assert!(m.evaluations <= 200);
    }

    #[test]
    fn respects_budget_and_never_beats_start_by_luck() {
        let mut calls = 0;
        let opts = NelderMeadOptions { max_evals: 7, ..Default::default() };
        let m = nelder_mead(
            |[x, y]| {
                calls += 1;
                x.sin() + y.cos()
            },
            [0.3, 0.2],
            &opts,
        );
        assert_eq!(calls, m.evaluations);
        assert!(m.evaluations <= 7);
        assert!(m.value <= 0.3f64.sin() + 0.2f64.cos());
    }

    #[test]
    fn non_finite_values_are_avoided() {
        let opts = NelderMeadOptions { max_evals: 60, ..Default::default() };
        let m = nelder_mead(|[x, _]| if x > 0.05 { f64::NAN } else { x * x }, [0.0, 0.0], &opts);
        assert!(m.value.is_finite());
    }
}
