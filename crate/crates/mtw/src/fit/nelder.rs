//! Derivative-free Nelder–Mead simplex minimizer.
//!
//! Standard reflection/expansion/contraction/shrink coefficients
//! (1, 2, 0.5, 0.5). The objective is free to return +∞ (used for box
//! rejection), which the ordering handles like any other bad value.

/// Stopping controls.
#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    /// Step added to each coordinate of the start point to build the
    /// initial simplex.
    pub initial_step: f64,
    /// Convergence when the simplex diameter (∞-norm over vertex pairs)
    /// drops below this.
    pub diameter_tol: f64,
    /// Objective-evaluation budget.
    pub max_evals: usize,
}

/// Minimization outcome.
#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Best value after each accepted step.
    pub trace: Vec<f64>,
}

pub fn minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    start: &[f64],
    opts: &NelderMeadOptions,
) -> NelderMeadResult {
    let dim = start.len();
    assert!(dim >= 1);
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    // orthogonal initial simplex
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = eval(start, &mut evals);
    simplex.push((start.to_vec(), v0));
    for i in 0..dim {
        let mut p = start.to_vec();
        p[i] += opts.initial_step;
        let v = eval(&p, &mut evals);
        simplex.push((p, v));
    }
    let mut trace = Vec::new();

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        trace.push(simplex[0].1);

        // diameter in the transformed coordinates
        let mut diameter = 0.0f64;
        for i in 0..dim {
            let lo = simplex.iter().map(|(p, _)| p[i]).fold(f64::INFINITY, f64::min);
            let hi = simplex
                .iter()
                .map(|(p, _)| p[i])
                .fold(f64::NEG_INFINITY, f64::max);
            diameter = diameter.max(hi - lo);
        }
        if diameter < opts.diameter_tol {
            let (best_point, best_value) = simplex.swap_remove(0);
            return NelderMeadResult {
                best_point,
                best_value,
                evaluations: evals,
                converged: true,
                trace,
            };
        }
        if evals >= opts.max_evals {
            let (best_point, best_value) = simplex.swap_remove(0);
            return NelderMeadResult {
                best_point,
                best_value,
                evaluations: evals,
                converged: false,
                trace,
            };
        }

        // centroid of all but the worst
        let mut centroid = vec![0.0; dim];
        for (p, _) in &simplex[..dim] {
            for (c, &x) in centroid.iter_mut().zip(p) {
                *c += x;
            }
        }
        for c in &mut centroid {
            *c /= dim as f64;
        }
        let worst = simplex[dim].clone();
        let at = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(&c, &w)| c + coef * (c - w))
                .collect()
        };

        let reflected = at(1.0);
        let fr = eval(&reflected, &mut evals);
        if fr < simplex[0].1 {
            let expanded = at(2.0);
            let fe = eval(&expanded, &mut evals);
            simplex[dim] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
            continue;
        }
        // contraction (outside if the reflection improved on the worst)
        let contracted = if fr < worst.1 { at(0.5) } else { at(-0.5) };
        let fc = eval(&contracted, &mut evals);
        if fc < worst.1.min(fr) {
            simplex[dim] = (contracted, fc);
            continue;
        }
        // shrink toward the best vertex
        let best = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            let p: Vec<f64> = best
                .iter()
                .zip(&entry.0)
                .map(|(&b, &x)| b + 0.5 * (x - b))
                .collect();
            let v = eval(&p, &mut evals);
            *entry = (p, v);
        }
    }
}
