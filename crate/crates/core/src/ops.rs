//! Operator algebra over the fermion/link product lattice.
//!
//! An [`OperatorSum`] is a complex-weighted sum of product terms. Each term
//! carries one local operator per staggered site (acting on the fermion
//! qubit) and one per link (acting on the link register: dimension 2 for Z2,
//! 2Λ+1 for U(1)). Fermionic statistics are encoded at this level through
//! Jordan-Wigner strings, so all local operators commute site-wise and
//! products are plain site-by-site compositions.
//!
//! Every named local operator (Paulis, σ±, projectors, link raise/lower,
//! electric field) maps a basis state to at most one basis state, and that
//! property is closed under products and adjoints. Addition, multiplication
//! and Hermitian conjugation of sums are therefore exact.

use num_complex::Complex64;
use std::collections::BTreeMap;

use crate::model::{BasisState, GaugeGroup, LatticeSpec, PhysicalBasis};
use crate::{CMat, CVec, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A single-site operator with at most one nonzero entry per column
/// (a generalized permutation matrix).
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOp {
    dim: usize,
    /// `cols[j] = Some((i, a))` means the operator maps `|j⟩` to `a|i⟩`.
    cols: Vec<Option<(usize, Complex64)>>,
}

impl LocalOp {
    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            cols: (0..dim).map(|j| Some((j, ONE))).collect(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, cols: vec![None; dim] }
    }

    fn from_entries(dim: usize, entries: &[(usize, usize, Complex64)]) -> Self {
        let mut cols = vec![None; dim];
        for &(i, j, a) in entries {
            assert!(cols[j].is_none(), "more than one entry per column");
            cols[j] = Some((i, a));
        }
        Self { dim, cols }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_identity(&self) -> bool {
        self.cols
            .iter()
            .enumerate()
            .all(|(j, c)| matches!(c, Some((i, a)) if *i == j && *a == ONE))
    }

    /// Apply to basis index `j`, returning `(i, amplitude)` or `None`.
    pub fn apply(&self, j: usize) -> Option<(usize, Complex64)> {
        self.cols[j]
    }

    /// Operator product `self · rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let cols = (0..self.dim)
            .map(|j| {
                let (k, b) = rhs.cols[j]?;
                let (i, a) = self.cols[k]?;
                Some((i, a * b))
            })
            .collect();
        Self { dim: self.dim, cols }
    }

    pub fn adjoint(&self) -> Self {
        let mut cols = vec![None; self.dim];
        for (j, c) in self.cols.iter().enumerate() {
            if let Some((i, a)) = c {
                assert!(cols[*i].is_none(), "adjoint of non-generalized-permutation");
                cols[*i] = Some((j, a.conj()));
            }
        }
        Self { dim: self.dim, cols }
    }

    // --- fermion-site operators (dim 2, |1⟩ = occupied) ---

    pub fn sigma_x() -> Self {
        Self::from_entries(2, &[(1, 0, ONE), (0, 1, ONE)])
    }

    pub fn sigma_y() -> Self {
        Self::from_entries(2, &[(1, 0, Complex64::new(0.0, 1.0)), (0, 1, Complex64::new(0.0, -1.0))])
    }

    pub fn sigma_z() -> Self {
        Self::from_entries(2, &[(0, 0, ONE), (1, 1, -ONE)])
    }

    /// σ⁺ = |0⟩⟨1| (annihilates the occupied state).
    pub fn sigma_plus() -> Self {
        Self::from_entries(2, &[(0, 1, ONE)])
    }

    /// σ⁻ = |1⟩⟨0| (creates the occupied state).
    pub fn sigma_minus() -> Self {
        Self::from_entries(2, &[(1, 0, ONE)])
    }

    /// Occupation number ξ†ξ = |1⟩⟨1|.
    pub fn number() -> Self {
        Self::from_entries(2, &[(1, 1, ONE)])
    }

    // --- link operators ---

    /// Gauge-link operator `U`. For Z2 this is the spin flip σ̃ˣ. For U(1) it
    /// lowers the electric flux, `U|ℓ⟩ = |ℓ−1⟩`, which is the direction that
    /// commutes with the Gauss-law convention of this crate (flux annihilated
    /// at the cutoff boundary).
    pub fn link_u(group: GaugeGroup, cutoff: u32) -> Self {
        match group {
            GaugeGroup::Z2 => Self::sigma_x(),
            GaugeGroup::U1 => {
                let d = (2 * cutoff + 1) as usize;
                let entries: Vec<_> = (1..d).map(|j| (j - 1, j, ONE)).collect();
                Self::from_entries(d, &entries)
            }
        }
    }

    /// Adjoint gauge-link operator `U†` (raises the U(1) flux).
    pub fn link_udag(group: GaugeGroup, cutoff: u32) -> Self {
        Self::link_u(group, cutoff).adjoint()
    }

    /// Electric-field operator `E` (diagonal: ±1 for Z2, ℓ for U(1)).
    pub fn link_e(group: GaugeGroup, cutoff: u32) -> Self {
        match group {
            GaugeGroup::Z2 => Self::from_entries(2, &[(0, 0, ONE), (1, 1, -ONE)]),
            GaugeGroup::U1 => {
                let d = (2 * cutoff + 1) as usize;
                let entries: Vec<_> = (0..d)
                    .map(|j| (j, j, Complex64::new(j as f64 - cutoff as f64, 0.0)))
                    .collect();
                Self::from_entries(d, &entries)
            }
        }
    }

    /// `E²` (identity for Z2, diagonal ℓ² for U(1)).
    pub fn link_e2(group: GaugeGroup, cutoff: u32) -> Self {
        let e = Self::link_e(group, cutoff);
        e.compose(&e)
    }
}

/// One product term: a complex coefficient times one local operator per
/// fermion site and per link.
#[derive(Debug, Clone)]
pub struct Term {
    pub coeff: Complex64,
    pub sites: Vec<LocalOp>,
    pub links: Vec<LocalOp>,
}

impl Term {
    fn identity(n_sites: usize, link_dim: usize) -> Self {
        Self {
            coeff: ONE,
            sites: vec![LocalOp::identity(2); n_sites],
            links: vec![LocalOp::identity(link_dim); n_sites],
        }
    }

    /// Apply to a basis state. Returns `None` when annihilated.
    pub fn apply(&self, state: &BasisState, cutoff: u32) -> Option<(Complex64, BasisState)> {
        let mut amp = self.coeff;
        let mut occ = state.occ;
        for (n, op) in self.sites.iter().enumerate() {
            let bit = (state.occ >> n) & 1;
            let (new_bit, a) = op.apply(bit as usize)?;
            amp *= a;
            occ = (occ & !(1 << n)) | ((new_bit as u32) << n);
        }
        let mut links = state.links.clone();
        for (n, op) in self.links.iter().enumerate() {
            let j = link_index(state.links[n], cutoff, op.dim());
            let (i, a) = op.apply(j)?;
            amp *= a;
            links[n] = link_value(i, cutoff, op.dim());
        }
        if amp == ZERO {
            return None;
        }
        Some((amp, BasisState { occ, links }))
    }
}

fn link_index(value: i8, cutoff: u32, dim: usize) -> usize {
    if dim == 2 {
        // Z2: value +1 ↦ index 0, −1 ↦ index 1
        if value > 0 { 0 } else { 1 }
    } else {
        (value as i32 + cutoff as i32) as usize
    }
}

fn link_value(index: usize, cutoff: u32, dim: usize) -> i8 {
    if dim == 2 {
        if index == 0 { 1 } else { -1 }
    } else {
        (index as i32 - cutoff as i32) as i8
    }
}

/// A complex-weighted sum of product terms over a fixed lattice.
#[derive(Debug, Clone)]
pub struct OperatorSum {
    pub group: GaugeGroup,
    pub n_sites: usize,
    pub cutoff: u32,
    pub terms: Vec<Term>,
}

impl OperatorSum {
    pub fn zero(spec: &LatticeSpec) -> Self {
        Self {
            group: spec.group,
            n_sites: spec.n_sites,
            cutoff: spec.cutoff,
            terms: Vec::new(),
        }
    }

    pub fn identity(spec: &LatticeSpec) -> Self {
        let mut s = Self::zero(spec);
        s.terms.push(Term::identity(spec.n_sites, spec.link_dim()));
        s
    }

    fn link_dim(&self) -> usize {
        match self.group {
            GaugeGroup::Z2 => 2,
            GaugeGroup::U1 => (2 * self.cutoff + 1) as usize,
        }
    }

    /// Single term with the given site/link factors (identity elsewhere).
    pub fn product_term(
        spec: &LatticeSpec,
        coeff: Complex64,
        site_ops: &[(usize, LocalOp)],
        link_ops: &[(usize, LocalOp)],
    ) -> Self {
        let mut t = Term::identity(spec.n_sites, spec.link_dim());
        t.coeff = coeff;
        for (n, op) in site_ops {
            t.sites[*n] = t.sites[*n].compose(op);
        }
        for (n, op) in link_ops {
            t.links[*n] = t.links[*n].compose(op);
        }
        let mut s = Self::zero(spec);
        s.terms.push(t);
        s
    }

    /// Fermion creation ξ†ₙ in Jordan-Wigner form: (Π_{m<n} σᶻₘ) σ⁻ₙ.
    pub fn fermion_create(spec: &LatticeSpec, n: usize) -> Self {
        let mut site_ops: Vec<(usize, LocalOp)> =
            (0..n).map(|m| (m, LocalOp::sigma_z())).collect();
        site_ops.push((n, LocalOp::sigma_minus()));
        Self::product_term(spec, ONE, &site_ops, &[])
    }

    /// Fermion annihilation ξₙ in Jordan-Wigner form: (Π_{m<n} σᶻₘ) σ⁺ₙ.
    pub fn fermion_annihilate(spec: &LatticeSpec, n: usize) -> Self {
        let mut site_ops: Vec<(usize, LocalOp)> =
            (0..n).map(|m| (m, LocalOp::sigma_z())).collect();
        site_ops.push((n, LocalOp::sigma_plus()));
        Self::product_term(spec, ONE, &site_ops, &[])
    }

    /// Total fermion number Q = Σ ξ†ₙξₙ.
    pub fn total_number(spec: &LatticeSpec) -> Self {
        let mut s = Self::zero(spec);
        for n in 0..spec.n_sites {
            s = s.add(&Self::product_term(spec, ONE, &[(n, LocalOp::number())], &[]));
        }
        s
    }

    /// Winding operator Π_n U_n (all links).
    pub fn winding(spec: &LatticeSpec) -> Self {
        let u = LocalOp::link_u(spec.group, spec.cutoff);
        let link_ops: Vec<_> = (0..spec.n_sites).map(|n| (n, u.clone())).collect();
        Self::product_term(spec, ONE, &[], &link_ops)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.terms.extend(rhs.terms.iter().cloned());
        out
    }

    pub fn scale(&self, a: Complex64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff *= a;
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self {
            group: self.group,
            n_sites: self.n_sites,
            cutoff: self.cutoff,
            terms: Vec::with_capacity(self.terms.len() * rhs.terms.len()),
        };
        for a in &self.terms {
            for b in &rhs.terms {
                let sites = a
                    .sites
                    .iter()
                    .zip(&b.sites)
                    .map(|(x, y)| x.compose(y))
                    .collect();
                let links = a
                    .links
                    .iter()
                    .zip(&b.links)
                    .map(|(x, y)| x.compose(y))
                    .collect();
                out.terms.push(Term { coeff: a.coeff * b.coeff, sites, links });
            }
        }
        out
    }

    /// Hermitian conjugate, term by term.
    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff = t.coeff.conj();
            for op in t.sites.iter_mut() {
                *op = op.adjoint();
            }
            for op in t.links.iter_mut() {
                *op = op.adjoint();
            }
        }
        out
    }

    /// Collapse to a canonical map from operator signature to coefficient.
    ///
    /// Each local factor is rescaled so its first nonzero entry is 1, with the
    /// scale folded into the term coefficient; the signature is then exact and
    /// hashable, so algebraic identities (Hermiticity, cancellation) can be
    /// checked at the coefficient level.
    fn normal_form(&self) -> BTreeMap<Vec<(usize, Option<(usize, u64, u64)>)>, Complex64> {
        let mut map: BTreeMap<_, Complex64> = BTreeMap::new();
        for t in &self.terms {
            let mut coeff = t.coeff;
            let mut key = Vec::new();
            for (slot, op) in t.sites.iter().chain(t.links.iter()).enumerate() {
                let mut scale = ZERO;
                for c in op.cols.iter().flatten() {
                    scale = c.1;
                    break;
                }
                if scale == ZERO && op.cols.iter().all(|c| c.is_none()) {
                    coeff = ZERO;
                }
                let canon = |x: f64| if x == 0.0 { 0u64 } else { x.to_bits() };
                for (j, c) in op.cols.iter().enumerate() {
                    match c {
                        Some((i, a)) => {
                            let r = if scale == ZERO { *a } else { a / scale };
                            key.push((slot * 64 + j, Some((*i, canon(r.re), canon(r.im)))));
                        }
                        None => key.push((slot * 64 + j, None)),
                    }
                }
                if scale != ZERO {
                    coeff *= scale;
                }
            }
            *map.entry(key).or_insert(ZERO) += coeff;
        }
        map.retain(|_, v| *v != ZERO);
        map
    }

    /// Coefficient-level Hermiticity check.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let a = self.normal_form();
        let b = self.adjoint().normal_form();
        if a.len() != b.len() {
            return false;
        }
        a.iter().all(|(k, v)| match b.get(k) {
            Some(w) => (v - w).norm() <= tol,
            None => false,
        })
    }

    /// Apply to a dense vector over the given physical basis.
    pub fn apply_vec(&self, basis: &PhysicalBasis, v: &CVec) -> Result<CVec> {
        if v.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                got: v.len(),
            });
        }
        let mut out = CVec::zeros(basis.len());
        for (i, state) in basis.states().iter().enumerate() {
            if v[i] == ZERO {
                continue;
            }
            for t in &self.terms {
                if let Some((amp, target)) = t.apply(state, self.cutoff) {
                    match basis.position(&target) {
                        Some(j) => out[j] += amp * v[i],
                        None => {
                            return Err(Error::LeftPhysicalSpace);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Dense matrix over the given physical basis.
    ///
    /// Errors if any term maps a basis state outside the basis (the operator
    /// does not preserve the physical space).
    pub fn to_matrix(&self, basis: &PhysicalBasis) -> Result<CMat> {
        let d = basis.len();
        let mut m = CMat::zeros(d, d);
        for (i, state) in basis.states().iter().enumerate() {
            for t in &self.terms {
                if let Some((amp, target)) = t.apply(state, self.cutoff) {
                    match basis.position(&target) {
                        Some(j) => m[(j, i)] += amp,
                        None => return Err(Error::LeftPhysicalSpace),
                    }
                }
            }
        }
        Ok(m)
    }

    /// Iterate the action on every state of the full (unconstrained) product
    /// space, calling `f(source, amplitude, target)` for each nonzero matrix
    /// element. Intended for small lattices only.
    pub fn for_each_full_element<F: FnMut(&BasisState, Complex64, &BasisState)>(&self, mut f: F) {
        let n = self.n_sites;
        let ld = self.link_dim();
        let n_link_conf = ld.pow(n as u32);
        for occ in 0u32..(1 << n) {
            for lc in 0..n_link_conf {
                let mut links = vec![0i8; n];
                let mut rem = lc;
                for l in links.iter_mut() {
                    *l = link_value(rem % ld, self.cutoff, ld);
                    rem /= ld;
                }
                let src = BasisState { occ, links };
                for t in &self.terms {
                    if let Some((amp, dst)) = t.apply(&src, self.cutoff) {
                        f(&src, amp, &dst);
                    }
                }
            }
        }
    }

    /// Dense matrix on the full product space (2^N · d^N dimensional).
    pub fn to_matrix_full(&self) -> CMat {
        let n = self.n_sites;
        let ld = self.link_dim();
        let dim = (1usize << n) * ld.pow(n as u32);
        let index = |s: &BasisState| -> usize {
            let mut li = 0usize;
            for l in s.links.iter().rev() {
                li = li * ld + link_index(*l, self.cutoff, ld);
            }
            (s.occ as usize) + (li << n)
        };
        let mut m = CMat::zeros(dim, dim);
        self.for_each_full_element(|src, amp, dst| {
            m[(index(dst), index(src))] += amp;
        });
        m
    }
}
