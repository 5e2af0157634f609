//! Interacting meson creation operators and Gaussian wave packets.
//!
//! A momentum-k meson creation operator is assembled from bare mesons
//! ℳ_{m,n} (a fermion–antifermion pair joined by the shorter flux string):
//!
//! ```text
//!   b†_k = Σ_{p+q=k} η(p,q) Σ_{m,n} 𝒞(p,m) 𝒟(q,n) ℳ_{m,n},
//! ```
//!
//! where p, q run over the Brillouin zone Γ̃ = {2πj/N} ∩ [−π/2, π/2), the
//! spinor weights are
//!
//! ```text
//!   𝒞(p,m) = √((m_f+ω_p)/(2πω_p)) e^{ipm} (𝒫_even + v_p 𝒫_odd),
//!   𝒟(q,n) = √((m_f+ω_q)/(2πω_q)) e^{iqn} (−v_q 𝒫_even + 𝒫_odd),
//!   ω_k = √(m_f² + sin²k),   v_k = sin k / (m_f + ω_k),
//! ```
//!
//! and the relative-momentum profile is a Gaussian
//! η(p,q) ∝ e^{iμᴬ(p−q)/2} e^{−(p−q)²/(4σᴬ²)} normalized over the pairs
//! admitted at fixed k. A wave packet smears the b†_k with an outer Gaussian
//! profile Ψ(k) ∝ e^{−ikμ} e^{−(k−k₀)²/(4σ²)}; its position-space form is the
//! coefficient table C_{m,n} consumed by the circuit synthesis.
//!
//! Sector parameters (σᴬ_k, μᴬ_k) are fixed by minimizing ⟨H⟩ of the
//! normalized, vacuum-orthogonalized state b†_k|Ω⟩ with a deterministic
//! seed-grid + Nelder-Mead search.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::model::{brillouin_zone, LatticeSpec, PhysicalBasis};
use crate::ops::{LocalOp, OperatorSum};
use crate::optimize::{geomspace, grid_then_nelder_mead, linspace};
use crate::spectra::fidelity;
use crate::{CMat, CVec, Error, Result, I1};

pub fn omega(k: f64, m_f: f64) -> f64 {
    (m_f * m_f + k.sin() * k.sin()).sqrt()
}

pub fn velocity(k: f64, m_f: f64) -> f64 {
    k.sin() / (m_f + omega(k, m_f))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinorRole {
    /// 𝒞: weights the created fermion (even-site dominated).
    Fermion,
    /// 𝒟: weights the annihilated fermion, i.e. the created antifermion
    /// (odd-site dominated).
    Antifermion,
}

/// Spinor weight 𝒞(p, site) or 𝒟(p, site).
pub fn spinor_weight(p: f64, site: usize, role: SpinorRole, m_f: f64) -> Complex64 {
    let w = omega(p, m_f);
    let amp = ((m_f + w) / (2.0 * PI * w)).sqrt();
    let parity = match (role, site % 2) {
        (SpinorRole::Fermion, 0) => 1.0,
        (SpinorRole::Fermion, _) => velocity(p, m_f),
        (SpinorRole::Antifermion, 0) => -velocity(p, m_f),
        (SpinorRole::Antifermion, _) => 1.0,
    };
    (I1 * p * site as f64).exp() * amp * parity
}

/// Outer Gaussian wave-packet profile.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WavePacketSpec {
    /// Momentum-space width σ > 0.
    pub sigma: f64,
    /// Position-space center μ.
    pub mu: f64,
    /// Momentum-space center k₀.
    pub k0: f64,
}

impl WavePacketSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sigma <= 0.0 || !self.sigma.is_finite() {
            return Err(Error::InvalidSpec(format!("wave-packet sigma must be > 0, got {}", self.sigma)));
        }
        Ok(())
    }

    /// Ψ(k) over the Brillouin zone, normalized to Σ|Ψ|² = 1.
    pub fn profile(&self, n_sites: usize) -> Vec<(f64, Complex64)> {
        let ks = brillouin_zone(n_sites);
        let mut vals: Vec<Complex64> = ks
            .iter()
            .map(|&k| {
                ((-I1) * k * self.mu).exp()
                    * (-(k - self.k0).powi(2) / (4.0 * self.sigma * self.sigma)).exp()
            })
            .collect();
        let norm: f64 = vals.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for v in vals.iter_mut() {
            *v /= norm;
        }
        ks.into_iter().zip(vals).collect()
    }
}

/// Inner ansatz parameters of one momentum sector.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SectorParams {
    pub k: f64,
    /// Relative-momentum width σᴬ_k > 0.
    pub sigma_a: f64,
    /// Constituent-separation center μᴬ_k.
    pub mu_a: f64,
}

/// Optimized parameters for every sector of the Brillouin zone.
#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize)]
pub struct AnsatzParams {
    pub sectors: Vec<SectorParams>,
}

impl AnsatzParams {
    pub fn get(&self, k: f64) -> Result<&SectorParams> {
        self.sectors
            .iter()
            .find(|s| (s.k - k).abs() < 1e-9)
            .ok_or(Error::OffGridMomentum(k))
    }
}

/// The constituent-momentum pairs (p, q) admitted at total momentum k:
/// every p ∈ Γ̃ with q = k − p also in Γ̃.
pub fn admitted_pairs(n_sites: usize, k: f64) -> Vec<(f64, f64)> {
    let lo = -PI / 2.0 - 1e-12;
    let hi = PI / 2.0 - 1e-12;
    brillouin_zone(n_sites)
        .into_iter()
        .filter_map(|p| {
            let q = k - p;
            (q >= lo && q < hi).then_some((p, q))
        })
        .collect()
}

/// Normalized η(p,q) over the admitted pairs, evaluated in the log domain so
/// that extreme widths stay finite.
pub fn eta_normalized(pairs: &[(f64, f64)], params: &SectorParams) -> Vec<Complex64> {
    let sigma = params.sigma_a.abs().max(1e-12);
    let logs: Vec<f64> = pairs
        .iter()
        .map(|(p, q)| -(p - q).powi(2) / (4.0 * sigma * sigma))
        .collect();
    let lmax = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut vals: Vec<Complex64> = pairs
        .iter()
        .zip(&logs)
        .map(|((p, q), l)| (I1 * params.mu_a * (p - q) / 2.0).exp() * (l - lmax).exp())
        .collect();
    let norm: f64 = vals.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    for v in vals.iter_mut() {
        *v /= norm;
    }
    vals
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Wrapping {
    Forward,
    Backward,
    /// |m−n| = N/2: both wrappings, each weighted 1/√2.
    BothHalved,
}

/// A gauge-invariant bare-meson creation operator ℳ_{m,n}.
#[derive(Debug, Clone)]
pub struct BareMeson {
    pub m: usize,
    pub n: usize,
    pub wrapping: Wrapping,
    /// Flux-string length (shorter arc; 0 for m = n).
    pub length: usize,
    pub operator: OperatorSum,
}

/// Build ℳ_{m,n}: ξ†_m ξ_m for m = n, otherwise ξ†_m (flux string) ξ_n along
/// the shorter wrapping. Links on the forward arc (m → n in increasing site
/// order) are lowered, links on the backward arc are raised; that is the
/// unique assignment commuting with every Gauss-law generator. Equal-length
/// wrappings are summed with coefficients 1/√2.
pub fn build_bare_meson(spec: &LatticeSpec, m: usize, n: usize) -> Result<BareMeson> {
    let nn = spec.n_sites;
    if m >= nn || n >= nn {
        return Err(Error::InvalidSpec(format!("meson sites ({m},{n}) outside lattice")));
    }
    if m == n {
        let op = OperatorSum::product_term(
            spec,
            Complex64::new(1.0, 0.0),
            &[(m, LocalOp::number())],
            &[],
        );
        return Ok(BareMeson { m, n, wrapping: Wrapping::Forward, length: 0, operator: op });
    }
    let fwd_len = (n + nn - m) % nn;
    let bwd_len = nn - fwd_len;
    let (wrapping, arcs): (Wrapping, Vec<(bool, f64)>) = match fwd_len.cmp(&bwd_len) {
        std::cmp::Ordering::Less => (Wrapping::Forward, vec![(true, 1.0)]),
        std::cmp::Ordering::Greater => (Wrapping::Backward, vec![(false, 1.0)]),
        std::cmp::Ordering::Equal => (
            Wrapping::BothHalved,
            vec![(true, 1.0 / 2f64.sqrt()), (false, 1.0 / 2f64.sqrt())],
        ),
    };
    let mut op = OperatorSum::zero(spec);
    for (forward, weight) in arcs {
        let links: Vec<usize> = if forward {
            (0..fwd_len).map(|j| (m + j) % nn).collect()
        } else {
            (0..bwd_len).map(|j| (m + nn - 1 - j) % nn).collect()
        };
        let link_op = if forward {
            LocalOp::link_u(spec.group, spec.cutoff)
        } else {
            LocalOp::link_udag(spec.group, spec.cutoff)
        };
        let link_ops: Vec<(usize, LocalOp)> = links.iter().map(|&l| (l, link_op.clone())).collect();
        let string = OperatorSum::product_term(spec, Complex64::new(weight, 0.0), &[], &link_ops);
        let branch = OperatorSum::fermion_create(spec, m)
            .mul(&string)
            .mul(&OperatorSum::fermion_annihilate(spec, n));
        op = op.add(&branch);
    }
    Ok(BareMeson { m, n, wrapping, length: fwd_len.min(bwd_len), operator: op })
}

/// The N² bare-meson states ℳ_{m,n}|Ω⟩, precomputed once per vacuum so that
/// sector assemblies and parameter scans are cheap.
pub struct MesonFrame {
    spec: LatticeSpec,
    /// `applied[m][n] = ℳ_{m,n}|Ω⟩` over the physical basis.
    applied: Vec<Vec<CVec>>,
}

impl MesonFrame {
    pub fn new(spec: &LatticeSpec, basis: &PhysicalBasis, vacuum: &CVec) -> Result<Self> {
        let n = spec.n_sites;
        let mut applied = Vec::with_capacity(n);
        for m in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let meson = build_bare_meson(spec, m, j)?;
                row.push(meson.operator.apply_vec(basis, vacuum)?);
            }
            applied.push(row);
        }
        Ok(Self { spec: *spec, applied })
    }

    /// B(p,q)|Ω⟩ = Σ_{m,n} 𝒞(p,m) 𝒟(q,n) ℳ_{m,n}|Ω⟩.
    fn pair_state(&self, p: f64, q: f64) -> CVec {
        let n = self.spec.n_sites;
        let dim = self.applied[0][0].len();
        let mut out = CVec::zeros(dim);
        for m in 0..n {
            let cm = spinor_weight(p, m, SpinorRole::Fermion, self.spec.m_f);
            for j in 0..n {
                let dn = spinor_weight(q, j, SpinorRole::Antifermion, self.spec.m_f);
                out += &self.applied[m][j] * (cm * dn);
            }
        }
        out
    }
}

/// Precomputed Gram data of one momentum sector: energies and overlaps of any
/// η-combination reduce to small-matrix contractions.
pub struct SectorAssembly {
    pub k: f64,
    pub n_sites: usize,
    pub pairs: Vec<(f64, f64)>,
    /// D×P matrix of pair states.
    w: CMat,
    gram: CMat,
    h_gram: CMat,
    vac_overlap: CVec,
    e_vacuum: f64,
    vacuum: CVec,
}

impl SectorAssembly {
    pub fn new(
        frame: &MesonFrame,
        h: &CMat,
        vacuum: &CVec,
        k: f64,
    ) -> Result<Self> {
        let pairs = admitted_pairs(frame.spec.n_sites, k);
        if pairs.is_empty() {
            return Err(Error::EmptySector);
        }
        let dim = vacuum.len();
        let mut w = CMat::zeros(dim, pairs.len());
        for (j, (p, q)) in pairs.iter().enumerate() {
            w.set_column(j, &frame.pair_state(*p, *q));
        }
        let gram = w.adjoint() * &w;
        let h_gram = w.adjoint() * h * &w;
        let vac_overlap = w.adjoint() * vacuum;
        let e_vacuum = (vacuum.adjoint() * h * vacuum)[(0, 0)].re;
        Ok(Self {
            k,
            n_sites: frame.spec.n_sites,
            pairs,
            w,
            gram,
            h_gram,
            vac_overlap,
            e_vacuum,
            vacuum: vacuum.clone(),
        })
    }

    /// Energy of the normalized, vacuum-orthogonalized ansatz state.
    /// Returns +∞-like values for degenerate parameter choices.
    pub fn energy(&self, params: &SectorParams) -> f64 {
        let eta = CVec::from_vec(eta_normalized(&self.pairs, params));
        let num = (eta.adjoint() * &self.h_gram * &eta)[(0, 0)].re;
        let den = (eta.adjoint() * &self.gram * &eta)[(0, 0)].re;
        let ov = self.vac_overlap.dotc(&eta);
        let den_proj = den - ov.norm_sqr();
        if !den_proj.is_finite() || den_proj < 1e-14 {
            return f64::MAX;
        }
        (num - self.e_vacuum * ov.norm_sqr()) / den_proj
    }

    /// The normalized, vacuum-orthogonalized state b†_k|Ω⟩.
    pub fn state(&self, params: &SectorParams) -> Result<CVec> {
        let eta = CVec::from_vec(eta_normalized(&self.pairs, params));
        let mut psi = &self.w * &eta;
        let ov = self.vacuum.dotc(&psi);
        psi -= &self.vacuum * ov;
        let n = psi.norm();
        if n < 1e-12 {
            return Err(Error::ZeroNorm);
        }
        Ok(psi / Complex64::new(n, 0.0))
    }
}

/// Assemble b†_k and the state it creates.
pub fn build_bk(
    spec: &LatticeSpec,
    basis: &PhysicalBasis,
    vacuum: &CVec,
    k: f64,
    params: &SectorParams,
) -> Result<(OperatorSum, CVec)> {
    let pairs = admitted_pairs(spec.n_sites, k);
    if pairs.is_empty() {
        return Err(Error::EmptySector);
    }
    let eta = eta_normalized(&pairs, params);
    let mut op = OperatorSum::zero(spec);
    for ((p, q), e) in pairs.iter().zip(&eta) {
        for m in 0..spec.n_sites {
            let cm = spinor_weight(*p, m, SpinorRole::Fermion, spec.m_f);
            for n in 0..spec.n_sites {
                let dn = spinor_weight(*q, n, SpinorRole::Antifermion, spec.m_f);
                let meson = build_bare_meson(spec, m, n)?;
                op = op.add(&meson.operator.scale(e * cm * dn));
            }
        }
    }
    let mut psi = op.apply_vec(basis, vacuum)?;
    let ov = vacuum.dotc(&psi);
    psi -= vacuum * ov;
    let n = psi.norm();
    if n < 1e-12 {
        return Err(Error::ZeroNorm);
    }
    Ok((op, psi / Complex64::new(n, 0.0)))
}

/// Result of optimizing one momentum sector.
#[derive(Debug, Clone, serde::Serialize)]
pub struct OptimizedSector {
    pub params: SectorParams,
    pub energy: f64,
    /// Fidelity against the exact sector eigenstate, when one was supplied.
    pub fidelity: Option<f64>,
    pub converged: bool,
    pub evaluations: usize,
}

/// Seed grid from the design budget: 16 log-spaced widths × 16 linear centers.
fn seed_grid(n_sites: usize) -> Vec<Vec<f64>> {
    let half = n_sites as f64 / 2.0;
    geomspace(0.1, 2.0 * PI, 16)
        .into_iter()
        .flat_map(|s| linspace(-half, half, 16).into_iter().map(move |m| vec![s, m]))
        .collect()
}

/// Minimize ⟨H⟩ over (σᴬ_k, μᴬ_k); deterministic (fixed seed grid, energy
/// tolerance 10⁻⁸, budget 2000 evaluations).
pub fn optimize_ansatz(
    assembly: &SectorAssembly,
    exact: Option<&CVec>,
) -> Result<OptimizedSector> {
    let k = assembly.k;
    let objective = |x: &[f64]| {
        assembly.energy(&SectorParams { k, sigma_a: x[0].abs(), mu_a: x[1] })
    };
    let res = grid_then_nelder_mead(objective, &seed_grid(assembly.n_sites), 1e-8, 2000);
    let params = SectorParams { k, sigma_a: res.x[0].abs(), mu_a: res.x[1] };
    let state = assembly.state(&params)?;
    let fid = match exact {
        Some(target) => Some(fidelity(target, &state)?),
        None => None,
    };
    Ok(OptimizedSector {
        params,
        energy: res.f,
        fidelity: fid,
        converged: res.converged,
        evaluations: res.evaluations,
    })
}

/// Optimize every sector of the Brillouin zone (independent parallel jobs).
pub fn optimize_all_sectors(
    spec: &LatticeSpec,
    basis: &PhysicalBasis,
    h: &CMat,
    vacuum: &CVec,
    exact: &[(f64, CVec)],
) -> Result<Vec<OptimizedSector>> {
    let frame = MesonFrame::new(spec, basis, vacuum)?;
    brillouin_zone(spec.n_sites)
        .into_par_iter()
        .map(|k| {
            let assembly = SectorAssembly::new(&frame, h, vacuum, k)?;
            let target = exact
                .iter()
                .find(|(kk, _)| (kk - k).abs() < 1e-9)
                .map(|(_, v)| v);
            optimize_ansatz(&assembly, target)
        })
        .collect()
}

/// Position-space wave-packet coefficients C_{m,n} with their phases.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub n_sites: usize,
    pub c: CMat,
}

impl CoefficientTable {
    pub fn coeff(&self, m: usize, n: usize) -> Complex64 {
        self.c[(m, n)]
    }

    pub fn phase(&self, m: usize, n: usize) -> f64 {
        self.c[(m, n)].arg()
    }

    /// Entries sorted by descending |C_{m,n}|, ties broken lexicographically
    /// by (m, n) — the deterministic circuit ordering.
    pub fn magnitude_sorted(&self) -> Vec<(usize, usize, f64)> {
        let mut v: Vec<(usize, usize, f64)> = (0..self.n_sites)
            .flat_map(|m| (0..self.n_sites).map(move |n| (m, n)))
            .map(|(m, n)| (m, n, self.c[(m, n)].norm()))
            .collect();
        v.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap().then((a.0, a.1).cmp(&(b.0, b.1))));
        v
    }

    /// Entries with |C_{m,n}| ≥ θ_c in the deterministic circuit order.
    pub fn surviving(&self, theta_c: f64) -> Vec<(usize, usize)> {
        self.magnitude_sorted()
            .into_iter()
            .filter(|(_, _, a)| *a >= theta_c && *a > 0.0)
            .map(|(m, n, _)| (m, n))
            .collect()
    }

    /// CSV rows `m,n,re,im,abs`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,n,re,im,abs\n");
        for m in 0..self.n_sites {
            for n in 0..self.n_sites {
                let c = self.c[(m, n)];
                out.push_str(&format!("{m},{n},{:.16e},{:.16e},{:.16e}\n", c.re, c.im, c.norm()));
            }
        }
        out
    }
}

/// Convolve the outer profile Ψ(k) with the optimized inner ansatz to get
/// the position-space coefficients C_{m,n}.
pub fn build_cmn(
    spec: &LatticeSpec,
    wp: &WavePacketSpec,
    params: &AnsatzParams,
) -> Result<CoefficientTable> {
    wp.validate()?;
    let nn = spec.n_sites;
    let mut c = CMat::zeros(nn, nn);
    for (k, psi_k) in wp.profile(nn) {
        let sector = params.get(k)?;
        let pairs = admitted_pairs(nn, k);
        let eta = eta_normalized(&pairs, sector);
        for ((p, q), e) in pairs.iter().zip(&eta) {
            for m in 0..nn {
                let cm = spinor_weight(*p, m, SpinorRole::Fermion, spec.m_f);
                for n in 0..nn {
                    let dn = spinor_weight(*q, n, SpinorRole::Antifermion, spec.m_f);
                    c[(m, n)] += psi_k * e * cm * dn;
                }
            }
        }
    }
    Ok(CoefficientTable { n_sites: nn, c })
}

/// The reference wave-packet state |Ψ⟩ = normalize(Σ_k Ψ(k) b†_k|Ω⟩), built
/// from the normalized vacuum-orthogonalized sector states.
pub fn wavepacket_exact(
    spec: &LatticeSpec,
    basis: &PhysicalBasis,
    h: &CMat,
    vacuum: &CVec,
    wp: &WavePacketSpec,
    params: &AnsatzParams,
) -> Result<CVec> {
    wp.validate()?;
    let frame = MesonFrame::new(spec, basis, vacuum)?;
    let mut out = CVec::zeros(basis.len());
    for (k, psi_k) in wp.profile(spec.n_sites) {
        let assembly = SectorAssembly::new(&frame, h, vacuum, k)?;
        out += assembly.state(params.get(k)?)? * psi_k;
    }
    let n = out.norm();
    if n < 1e-12 {
        return Err(Error::ZeroNorm);
    }
    Ok(out / Complex64::new(n, 0.0))
}

/// Encoding-condition diagnostics for the raw wave-packet operator
/// b†_Ψ = Σ C_{m,n} ℳ_{m,n}: returns (‖b_Ψ|Ω⟩‖, ‖([b_Ψ, b†_Ψ] − 𝟙)|Ω⟩‖,
/// ‖b†_Ψ|Ω⟩‖). The first must be small for the ancilla encoding to be exact;
/// the second measures how far the operator is from a canonical creation
/// operator on the vacuum.
pub fn encoding_diagnostics(
    spec: &LatticeSpec,
    basis: &PhysicalBasis,
    vacuum: &CVec,
    table: &CoefficientTable,
) -> Result<(f64, f64, f64)> {
    let dim = basis.len();
    let mut bdag = CMat::zeros(dim, dim);
    for m in 0..spec.n_sites {
        for n in 0..spec.n_sites {
            let coeff = table.coeff(m, n);
            if coeff.norm() == 0.0 {
                continue;
            }
            let meson = build_bare_meson(spec, m, n)?.operator.to_matrix(basis)?;
            bdag += meson * coeff;
        }
    }
    let b = bdag.adjoint();
    let annihilation = (&b * vacuum).norm();
    let comm = &b * &bdag - &bdag * &b;
    let defect = ((comm - CMat::identity(dim, dim)) * vacuum).norm();
    let creation_norm = (&bdag * vacuum).norm();
    Ok((annihilation, defect, creation_norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_hamiltonian, enumerate_physical_basis, GaugeGroup};
    use crate::spectra::diagonalize;

    #[test]
    fn spinor_weights_at_zero_momentum() {
        // ω₀ = m_f and v₀ = 0, so 𝒞(0, even) = √(1/π) at m_f = 1 and the
        // odd-site (antifermion-even-site) weights vanish
        let c_even = spinor_weight(0.0, 2, SpinorRole::Fermion, 1.0);
        assert!((c_even.re - (1.0 / PI).sqrt()).abs() < 1e-14 && c_even.im.abs() < 1e-14);
        assert!(spinor_weight(0.0, 3, SpinorRole::Fermion, 1.0).norm() < 1e-14);
        assert!(spinor_weight(0.0, 2, SpinorRole::Antifermion, 1.0).norm() < 1e-14);
    }

    #[test]
    fn bare_meson_shapes() {
        let spec = LatticeSpec::new(GaugeGroup::Z2, 6, 1.0, -0.3, 1).unwrap();
        let m01 = build_bare_meson(&spec, 0, 1).unwrap();
        assert_eq!(m01.wrapping, Wrapping::Forward);
        assert_eq!(m01.operator.terms.len(), 1);
        let m03 = build_bare_meson(&spec, 0, 3).unwrap();
        assert_eq!(m03.wrapping, Wrapping::BothHalved);
        assert_eq!(m03.operator.terms.len(), 2);
        let diag = build_bare_meson(&spec, 2, 2).unwrap();
        let basis = enumerate_physical_basis(&spec).unwrap();
        let m = diag.operator.to_matrix(&basis).unwrap();
        for i in 0..40 {
            for j in 0..40 {
                if i != j {
                    assert!(m[(i, j)].norm() < 1e-15);
                }
            }
            let expect = basis.states()[i].fermion(2) as f64;
            assert!((m[(i, i)].re - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn mesons_are_gauge_invariant() {
        for spec in [
            LatticeSpec::new(GaugeGroup::Z2, 6, 1.0, -0.3, 1).unwrap(),
            LatticeSpec::new(GaugeGroup::U1, 4, 1.0, 1.0, 1).unwrap(),
        ] {
            for m in 0..spec.n_sites {
                for n in 0..spec.n_sites {
                    let meson = build_bare_meson(&spec, m, n).unwrap();
                    assert!(
                        crate::model::commutes_with_gauss(&spec, &meson.operator),
                        "meson ({m},{n}) violates the Gauss law"
                    );
                }
            }
        }
    }

    #[test]
    fn admitted_pairs_structure() {
        // k = 0 pairs every p with −p; the zone edge keeps only in-zone pairs
        let p0 = admitted_pairs(6, 0.0);
        assert_eq!(p0.len(), 3);
        let pe = admitted_pairs(6, PI / 3.0);
        assert_eq!(pe.len(), 2);
        for (p, q) in pe {
            assert!((p + q - PI / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bk_state_lives_in_its_momentum_sector() {
        let spec = LatticeSpec::new(GaugeGroup::Z2, 6, 1.0, -0.3, 1).unwrap();
        let basis = enumerate_physical_basis(&spec).unwrap();
        let h = build_hamiltonian(&spec).unwrap().matrix(&basis).unwrap();
        let full = diagonalize(&h).unwrap();
        let vacuum = full.ground_state();
        let k = PI / 3.0;
        let params = SectorParams { k, sigma_a: 0.8, mu_a: 0.4 };
        let (_, psi) = build_bk(&spec, &basis, vacuum, k, &params).unwrap();
        let t = crate::model::translation_operator(&spec).matrix(&basis);
        let tv = &t * &psi;
        assert!((tv - &psi * (I1 * (-2.0) * k).exp()).norm() < 1e-8);
        // momentum superselection: projectors onto other sectors annihilate it
        for kp in brillouin_zone(6) {
            if (kp - k).abs() < 1e-9 {
                continue;
            }
            let p = crate::model::momentum_projector(&spec, &basis, kp).unwrap();
            assert!((p * &psi).norm() < 1e-8);
        }
    }

    #[test]
    fn assembly_energy_matches_explicit_state() {
        let spec = LatticeSpec::new(GaugeGroup::Z2, 6, 1.0, -0.3, 1).unwrap();
        let basis = enumerate_physical_basis(&spec).unwrap();
        let h = build_hamiltonian(&spec).unwrap().matrix(&basis).unwrap();
        let full = diagonalize(&h).unwrap();
        let vacuum = full.ground_state();
        let frame = MesonFrame::new(&spec, &basis, vacuum).unwrap();
        let assembly = SectorAssembly::new(&frame, &h, vacuum, 0.0).unwrap();
        let params = SectorParams { k: 0.0, sigma_a: 1.1, mu_a: -0.2 };
        let fast = assembly.energy(&params);
        let psi = assembly.state(&params).unwrap();
        let slow = (psi.adjoint() * &h * &psi)[(0, 0)].re;
        assert!((fast - slow).abs() < 1e-10);
        // and the assembly state equals the full operator construction
        let (_, psi_op) = build_bk(&spec, &basis, vacuum, 0.0, &params).unwrap();
        assert!((fidelity(&psi, &psi_op).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn delta_profile_collapses_to_single_sector() {
        let spec = LatticeSpec::new(GaugeGroup::Z2, 6, 1.0, -0.3, 1).unwrap();
        let basis = enumerate_physical_basis(&spec).unwrap();
        let h = build_hamiltonian(&spec).unwrap().matrix(&basis).unwrap();
        let vacuum = diagonalize(&h).unwrap().ground_state().clone();
        let params = AnsatzParams {
            sectors: brillouin_zone(6)
                .into_iter()
                .map(|k| SectorParams { k, sigma_a: 0.9, mu_a: 0.1 })
                .collect(),
        };
        // a very narrow profile keeps only the k0 sector
        let wp = WavePacketSpec { sigma: 1e-4, mu: 0.0, k0: 0.0 };
        let psi = wavepacket_exact(&spec, &basis, &h, &vacuum, &wp, &params).unwrap();
        let frame = MesonFrame::new(&spec, &basis, &vacuum).unwrap();
        let assembly = SectorAssembly::new(&frame, &h, &vacuum, 0.0).unwrap();
        let single = assembly.state(params.get(0.0).unwrap()).unwrap();
        assert!((fidelity(&psi, &single).unwrap() - 1.0).abs() < 1e-10);
        // zero width rejected
        assert!(build_cmn(&spec, &WavePacketSpec { sigma: 0.0, mu: 0.0, k0: 0.0 }, &params).is_err());
    }

    #[test]
    fn cmn_operator_equals_momentum_assembly_on_vacuum() {
        // Σ C_{m,n} ℳ_{m,n}|Ω⟩ equals Σ_k Ψ(k) b†_k|Ω⟩ built from raw
        // (unnormalized) sector operators
        let spec = LatticeSpec::new(GaugeGroup::Z2, 6, 1.0, -0.3, 1).unwrap();
        let basis = enumerate_physical_basis(&spec).unwrap();
        let h = build_hamiltonian(&spec).unwrap().matrix(&basis).unwrap();
        let vacuum = diagonalize(&h).unwrap().ground_state().clone();
        let params = AnsatzParams {
            sectors: brillouin_zone(6)
                .into_iter()
                .map(|k| SectorParams { k, sigma_a: 1.0, mu_a: 0.3 })
                .collect(),
        };
        let wp = WavePacketSpec { sigma: PI / 6.0, mu: 3.0, k0: 0.0 };
        let table = build_cmn(&spec, &wp, &params).unwrap();
        let mut lhs = CVec::zeros(40);
        for m in 0..6 {
            for n in 0..6 {
                let meson = build_bare_meson(&spec, m, n).unwrap();
                lhs += meson.operator.apply_vec(&basis, &vacuum).unwrap() * table.coeff(m, n);
            }
        }
        let mut rhs = CVec::zeros(40);
        for (k, psi_k) in wp.profile(6) {
            let pairs = admitted_pairs(6, k);
            let eta = eta_normalized(&pairs, params.get(k).unwrap());
            for ((p, q), e) in pairs.iter().zip(&eta) {
                for m in 0..6 {
                    let cm = spinor_weight(*p, m, SpinorRole::Fermion, 1.0);
                    for n in 0..6 {
                        let dn = spinor_weight(*q, n, SpinorRole::Antifermion, 1.0);
                        let meson = build_bare_meson(&spec, m, n).unwrap();
                        rhs += meson.operator.apply_vec(&basis, &vacuum).unwrap()
                            * (psi_k * e * cm * dn);
                    }
                }
            }
        }
        assert!((lhs - rhs).norm() < 1e-10);
    }
}
