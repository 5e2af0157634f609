//! Deterministic derivative-free minimization: a coarse seed grid followed by
//! Nelder-Mead simplex refinement. No randomness anywhere, so identical
//! inputs give identical optima.

/// Outcome of a minimization run.
#[derive(Debug, Clone)]
pub struct MinResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    /// False when the evaluation budget ran out before the energy tolerance
    /// was met; `x`/`f` then hold the best point seen.
    pub converged: bool,
}

/// Minimize over the given seed points, refining the best with Nelder-Mead.
pub fn grid_then_nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    seeds: &[Vec<f64>],
    f_tol: f64,
    budget: usize,
) -> MinResult {
    let mut evals = 0usize;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for s in seeds {
        let v = f(s);
        evals += 1;
        if best.as_ref().map_or(true, |(bv, _)| v < *bv) {
            best = Some((v, s.clone()));
        }
    }
    let (_, x0) = best.expect("at least one seed");
    let inner = nelder_mead(&mut f, &x0, f_tol, budget.saturating_sub(evals));
    MinResult { evaluations: evals + inner.evaluations, ..inner }
}

/// Standard Nelder-Mead with a deterministic initial simplex.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x0: &[f64],
    f_tol: f64,
    budget: usize,
) -> MinResult {
    let n = x0.len();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let fx0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), fx0));
    for i in 0..n {
        let mut x = x0.to_vec();
        let step = if x[i].abs() > 1e-8 { 0.1 * x[i].abs() } else { 0.1 };
        x[i] += step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    let mut converged = false;
    while evals < budget {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        if simplex[n].1 - simplex[0].1 < f_tol {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let reflect: Vec<f64> = (0..n)
            .map(|j| centroid[j] + alpha * (centroid[j] - worst.0[j]))
            .collect();
        let fr = eval(&reflect, &mut evals);
        if fr < simplex[0].1 {
            let expand: Vec<f64> = (0..n)
                .map(|j| centroid[j] + gamma * (reflect[j] - centroid[j]))
                .collect();
            let fe = eval(&expand, &mut evals);
            simplex[n] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflect, fr);
        } else {
            let contract: Vec<f64> = (0..n)
                .map(|j| centroid[j] + rho * (worst.0[j] - centroid[j]))
                .collect();
            let fc = eval(&contract, &mut evals);
            if fc < worst.1 {
                simplex[n] = (contract, fc);
            } else {
                let best = simplex[0].0.clone();
                for item in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = (0..n)
                        .map(|j| best[j] + sigma * (item.0[j] - best[j]))
                        .collect();
                    let v = eval(&x, &mut evals);
                    *item = (x, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    MinResult {
        x: simplex[0].0.clone(),
        f: simplex[0].1,
        evaluations: evals,
        converged,
    }
}

/// Log-spaced seed values in [lo, hi].
pub fn geomspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let r = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| lo * (r * i as f64).exp()).collect()
}

/// Linearly spaced seed values in [lo, hi].
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let f = |x: &[f64]| (x[0] - 1.5).powi(2) + 3.0 * (x[1] + 0.5).powi(2) + 2.0;
        let seeds: Vec<Vec<f64>> = linspace(-2.0, 2.0, 5)
            .into_iter()
            .flat_map(|a| linspace(-2.0, 2.0, 5).into_iter().map(move |b| vec![a, b]))
            .collect();
        let r = grid_then_nelder_mead(f, &seeds, 1e-12, 2000);
        assert!(r.converged);
        assert!((r.x[0] - 1.5).abs() < 1e-5 && (r.x[1] + 0.5).abs() < 1e-5);
        assert!((r.f - 2.0).abs() < 1e-10);
    }

    #[test]
    fn is_deterministic() {
        let f = |x: &[f64]| x[0].sin() * (2.3 * x[1]).cos() + 0.1 * x[0] * x[0];
        let seeds: Vec<Vec<f64>> = linspace(-3.0, 3.0, 7)
            .into_iter()
            .flat_map(|a| linspace(-3.0, 3.0, 7).into_iter().map(move |b| vec![a, b]))
            .collect();
        let r1 = grid_then_nelder_mead(f, &seeds, 1e-10, 1500);
        let r2 = grid_then_nelder_mead(f, &seeds, 1e-10, 1500);
        assert_eq!(r1.x, r2.x);
        assert_eq!(r1.evaluations, r2.evaluations);
    }

    #[test]
    fn budget_exhaustion_reports_best_so_far() {
        let f = |x: &[f64]| (x[0] - 4.0).powi(2);
        let r = grid_then_nelder_mead(f, &[vec![0.0]], 1e-16, 5);
        assert!(!r.converged);
        assert!(r.f.is_finite());
    }
}
