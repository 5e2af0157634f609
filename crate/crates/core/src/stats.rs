//! Observables and statistical post-processing: staggered density,
//! truncation metrics, rms shot error, and bootstrap uncertainties.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::model::PhysicalBasis;
use crate::simulate::PhysicalEvent;
use crate::{CMat, CVec, Error, Result};

/// Site-resolved staggered density χ_n, optionally with uncertainties.
#[derive(Debug, Clone)]
pub struct DensityProfile {
    pub chi: Vec<f64>,
    pub err: Option<Vec<f64>>,
}

/// χ_n = ⟨ξ†ξ⟩_n on even sites, 1 − ⟨ξ†ξ⟩_n on odd sites, from a
/// probability vector over the canonical physical basis.
pub fn staggered_density_from_probs(basis: &PhysicalBasis, probs: &[f64]) -> Result<DensityProfile> {
    if probs.len() != basis.len() {
        return Err(Error::LengthMismatch(probs.len(), basis.len()));
    }
    let n = basis.spec().n_sites;
    let mut chi = vec![0.0; n];
    for (p, s) in probs.iter().zip(basis.states()) {
        for (site, c) in chi.iter_mut().enumerate() {
            *c += p * density_weight(s, site);
        }
    }
    Ok(DensityProfile { chi, err: None })
}

fn density_weight(s: &crate::model::BasisState, site: usize) -> f64 {
    let occ = s.fermion(site) as f64;
    if site % 2 == 0 {
        occ
    } else {
        1.0 - occ
    }
}

/// χ_n of a normalized state over the physical basis.
pub fn staggered_density(basis: &PhysicalBasis, state: &CVec) -> Result<DensityProfile> {
    let probs: Vec<f64> = state.iter().map(|a| a.norm_sqr()).collect();
    staggered_density_from_probs(basis, &probs)
}

/// Periodic second moment of a density profile about the center `mu`
/// (a positional spread measure for wave-packet comparisons).
pub fn positional_second_moment(profile: &DensityProfile, mu: f64) -> f64 {
    let n = profile.chi.len() as f64;
    let total: f64 = profile.chi.iter().sum();
    profile
        .chi
        .iter()
        .enumerate()
        .map(|(site, c)| {
            let d = (site as f64 - mu).rem_euclid(n);
            let d = d.min(n - d);
            c * d * d
        })
        .sum::<f64>()
        / total
}

/// Fidelity and relative energy difference of a truncated state against the
/// reference: (|⟨t|e⟩|², |E_t − E_e| / |E_e|).
pub fn trunc_metrics(psi_trunc: &CVec, psi_exact: &CVec, h: &CMat) -> Result<(f64, f64)> {
    let f = crate::spectra::fidelity(psi_trunc, psi_exact)?;
    let e_t = (psi_trunc.adjoint() * h * psi_trunc)[(0, 0)].re;
    let e_e = (psi_exact.adjoint() * h * psi_exact)[(0, 0)].re;
    if e_e.abs() < 1e-300 {
        return Err(Error::ZeroNorm);
    }
    Ok((f, (e_t - e_e).abs() / e_e.abs()))
}

/// Root-mean-square difference of two probability vectors over the same
/// physical labels: √(Σ_i (a_i − b_i)² / N).
pub fn rms_error(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len() as f64;
    Ok((a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / n).sqrt())
}

/// Bootstrap means and standard deviations per basis-state probability and
/// per staggered density site.
#[derive(Debug, Clone)]
pub struct BootstrapReport {
    pub n_resamples: usize,
    pub prob_mean: Vec<f64>,
    pub prob_std: Vec<f64>,
    pub chi_mean: Vec<f64>,
    /// Uncertainty on χ_n by linear propagation from the probability
    /// standard deviations.
    pub chi_err: Vec<f64>,
}

/// Resample the physical events with replacement; inside each resample drop
/// ancilla = 0 events and renormalize. Resamples run in parallel under
/// deterministic per-resample sub-seeds.
pub fn bootstrap(
    events: &[PhysicalEvent],
    basis: &PhysicalBasis,
    n_resamples: usize,
    seed: u64,
) -> Result<BootstrapReport> {
    if events.is_empty() {
        return Err(Error::EmptyEvents);
    }
    let d = basis.len();
    let n_ev = events.len();
    let sums: Vec<(Vec<f64>, Vec<f64>)> = (0..n_resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(r as u64 + 1)));
            let mut counts = vec![0.0f64; d];
            let mut kept = 0usize;
            for _ in 0..n_ev {
                let e = events[rng.gen_range(0..n_ev)];
                if e.ancilla == 1 {
                    counts[e.basis_index] += 1.0;
                    kept += 1;
                }
            }
            if kept > 0 {
                for c in counts.iter_mut() {
                    *c /= kept as f64;
                }
            }
            let sq: Vec<f64> = counts.iter().map(|c| c * c).collect();
            (counts, sq)
        })
        .collect();
    let mut mean = vec![0.0; d];
    let mut mean_sq = vec![0.0; d];
    for (c, sq) in &sums {
        for i in 0..d {
            mean[i] += c[i];
            mean_sq[i] += sq[i];
        }
    }
    let nr = n_resamples as f64;
    let mut std = vec![0.0; d];
    for i in 0..d {
        mean[i] /= nr;
        std[i] = (mean_sq[i] / nr - mean[i] * mean[i]).max(0.0).sqrt();
    }
    let n_sites = basis.spec().n_sites;
    let mut chi_mean = vec![0.0; n_sites];
    let mut chi_err = vec![0.0; n_sites];
    for (i, s) in basis.states().iter().enumerate() {
        for site in 0..n_sites {
            let w = density_weight(s, site);
            chi_mean[site] += mean[i] * w;
            chi_err[site] += (w * std[i]).powi(2);
        }
    }
    for e in chi_err.iter_mut() {
        *e = e.sqrt();
    }
    Ok(BootstrapReport { n_resamples, prob_mean: mean, prob_std: std, chi_mean, chi_err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{enumerate_physical_basis, GaugeGroup, LatticeSpec};
    use num_complex::Complex64;

    fn z2_basis() -> PhysicalBasis {
        let spec = LatticeSpec::new(GaugeGroup::Z2, 6, 1.0, -0.3, 1).unwrap();
        enumerate_physical_basis(&spec).unwrap()
    }

    #[test]
    fn vacuum_density_is_zero() {
        let basis = z2_basis();
        let mut v = CVec::zeros(40);
        v[basis.vacuum_index()] = Complex64::new(1.0, 0.0);
        let chi = staggered_density(&basis, &v).unwrap();
        assert!(chi.chi.iter().all(|&c| c.abs() < 1e-14));
    }

    #[test]
    fn density_balance_in_half_filled_sector() {
        // Σ_even χ = Σ_odd χ for every Q = N/2 state
        let basis = z2_basis();
        let mut probs = vec![0.0; 40];
        probs[3] = 0.25;
        probs[17] = 0.5;
        probs[30] = 0.25;
        let chi = staggered_density_from_probs(&basis, &probs).unwrap().chi;
        let even: f64 = chi.iter().step_by(2).sum();
        let odd: f64 = chi.iter().skip(1).step_by(2).sum();
        assert!((even - odd).abs() < 1e-12);
    }

    #[test]
    fn rms_error_properties() {
        let a = vec![0.2, 0.3, 0.5];
        let b = vec![0.25, 0.35, 0.4];
        let e1 = rms_error(&a, &b).unwrap();
        let e2 = rms_error(&b, &a).unwrap();
        assert!((e1 - e2).abs() < 1e-15 && e1 > 0.0);
        assert_eq!(rms_error(&a, &a).unwrap(), 0.0);
        assert!(rms_error(&a, &[0.5, 0.5]).is_err());
    }

    #[test]
    fn trunc_metrics_identity() {
        let basis = z2_basis();
        let h = crate::model::build_hamiltonian(basis.spec())
            .unwrap()
            .matrix(&basis)
            .unwrap();
        let gs = crate::spectra::diagonalize(&h).unwrap().ground_state().clone();
        let (f, de) = trunc_metrics(&gs, &gs, &h).unwrap();
        assert!((f - 1.0).abs() < 1e-12 && de < 1e-14);
    }

    #[test]
    fn bootstrap_degenerate_and_bernoulli() {
        let basis = z2_basis();
        // all-identical events → zero spread
        let events = vec![PhysicalEvent { basis_index: 5, ancilla: 1 }; 200];
        let rep = bootstrap(&events, &basis, 500, 11).unwrap();
        assert!((rep.prob_mean[5] - 1.0).abs() < 1e-12);
        assert!(rep.prob_std.iter().all(|&s| s < 1e-12));
        // Bernoulli(0.3) toy sample: bootstrap stderr tracks √(p(1−p)/n)
        let n = 500usize;
        let p = 0.3;
        let k = (p * n as f64).round() as usize;
        let mut ev = Vec::new();
        for i in 0..n {
            ev.push(PhysicalEvent { basis_index: usize::from(i < k), ancilla: 1 });
        }
        let rep = bootstrap(&ev, &basis, 10_000, 42).unwrap();
        let expect = (p * (1.0 - p) / n as f64).sqrt();
        assert!(
            (rep.prob_std[1] - expect).abs() / expect < 0.1,
            "bootstrap stderr {} vs closed form {}",
            rep.prob_std[1],
            expect
        );
        assert!(bootstrap(&[], &basis, 10, 1).is_err());
    }
}
