//! Lattice definition, Gauss-law physical space, Hamiltonian and symmetries.
//!
//! The lattice is a periodic chain of N staggered sites (fermions on even
//! sites, antifermions on odd sites) with one gauge link per site. The
//! Hamiltonian is
//!
//! ```text
//!   H = -(i/2) Σ_n (ξ†_n U_n ξ_{n+1} - H.c.)  +  m_f Σ_n (-1)^n ξ†_n ξ_n
//!       + ε Σ_n f(E_n),      f(E) = E for Z2,  E² for U(1),
//! ```
//!
//! with ξ_N ≡ ξ_0. The hopping phase convention is the one in which the
//! staggered spinor weights ω_k = √(m_f² + sin²k), v_k = sin k/(m_f + ω_k)
//! diagonalize the free-fermion limit; it is related to the convention with a
//! real +1/2 hopping coefficient by a site-local phase redefinition of the
//! fermion fields, and the two have identical spectra and identical
//! basis-state probabilities for every gauge-invariant observable.
//!
//! Physical states satisfy the local Gauss laws
//!
//! ```text
//!   Z2:   E_n E_{n-1} (-1)^{ξ†ξ_n + n mod 2} = +1  at every n,
//!   U(1): E_n - E_{n-1} + ξ†ξ_n - (n mod 2)  =  0  at every n,
//! ```
//!
//! and carry total fermion number Q = N/2. For U(1) the link operator U in
//! the Hamiltonian lowers the flux, which is the direction that commutes with
//! the Gauss law above.

use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;

use crate::ops::{LocalOp, OperatorSum};
use crate::{CMat, Error, Result, I1};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum GaugeGroup {
    Z2,
    U1,
}

impl std::fmt::Display for GaugeGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GaugeGroup::Z2 => write!(f, "Z2"),
            GaugeGroup::U1 => write!(f, "U1"),
        }
    }
}

/// Defining data of the lattice model.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LatticeSpec {
    pub group: GaugeGroup,
    /// Number of staggered sites N (even).
    pub n_sites: usize,
    /// Fermion mass m_f ≥ 0 (lattice units, a = 1).
    pub m_f: f64,
    /// Electric-field strength ε.
    pub epsilon: f64,
    /// Electric-field cutoff Λ (U(1) only; ℓ ∈ [−Λ, Λ]).
    pub cutoff: u32,
}

impl LatticeSpec {
    pub fn new(group: GaugeGroup, n_sites: usize, m_f: f64, epsilon: f64, cutoff: u32) -> Result<Self> {
        let spec = Self { group, n_sites, m_f, epsilon, cutoff };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites == 0 || self.n_sites % 2 != 0 {
            return Err(Error::InvalidSpec(format!(
                "n_sites must be even and positive, got {}",
                self.n_sites
            )));
        }
        if self.m_f < 0.0 || !self.m_f.is_finite() || !self.epsilon.is_finite() {
            return Err(Error::InvalidSpec("m_f must be ≥ 0 and couplings finite".into()));
        }
        if self.group == GaugeGroup::U1 && self.cutoff < 1 {
            return Err(Error::InvalidSpec("U(1) requires cutoff Λ ≥ 1".into()));
        }
        Ok(())
    }

    /// Local dimension of one link register.
    pub fn link_dim(&self) -> usize {
        match self.group {
            GaugeGroup::Z2 => 2,
            GaugeGroup::U1 => (2 * self.cutoff + 1) as usize,
        }
    }

    /// The efficient Jordan-Wigner circuit synthesis assumes N ≡ 2 (mod 4),
    /// so that shorter-arc strings carry no boundary sign in the Q = N/2
    /// sector.
    pub fn efficient_jw_ok(&self) -> bool {
        self.n_sites % 4 == 2
    }

    /// Parse a `key = value` config (keys: group, n_sites, m_f, epsilon, cutoff).
    pub fn parse_config(text: &str) -> Result<Self> {
        let mut group = None;
        let mut n_sites = None;
        let mut m_f = None;
        let mut epsilon = None;
        let mut cutoff = 1u32;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            let bad = |what: &str| Error::Config(format!("line {}: bad {what}: {v}", lineno + 1));
            match k {
                "group" => {
                    group = Some(match v.to_ascii_lowercase().as_str() {
                        "z2" => GaugeGroup::Z2,
                        "u1" | "u(1)" => GaugeGroup::U1,
                        _ => return Err(bad("group")),
                    })
                }
                "n_sites" => n_sites = Some(v.parse().map_err(|_| bad("n_sites"))?),
                "m_f" => m_f = Some(v.parse().map_err(|_| bad("m_f"))?),
                "epsilon" => epsilon = Some(v.parse().map_err(|_| bad("epsilon"))?),
                "cutoff" => cutoff = v.parse().map_err(|_| bad("cutoff"))?,
                _ => return Err(Error::Config(format!("line {}: unknown key {k}", lineno + 1))),
            }
        }
        let miss = |what: &str| Error::Config(format!("missing key {what}"));
        Self::new(
            group.ok_or_else(|| miss("group"))?,
            n_sites.ok_or_else(|| miss("n_sites"))?,
            m_f.ok_or_else(|| miss("m_f"))?,
            epsilon.ok_or_else(|| miss("epsilon"))?,
            cutoff,
        )
    }
}

/// One configuration of the lattice: fermion occupations plus link values.
///
/// Bit n of `occ` is the ξ†ξ eigenvalue at site n. `links[n]` holds the
/// electric eigenvalue on the link emanating from site n: ±1 for Z2, the flux
/// ℓ ∈ [−Λ, Λ] for U(1).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisState {
    pub occ: u32,
    pub links: Vec<i8>,
}

impl BasisState {
    pub fn fermion(&self, n: usize) -> u8 {
        ((self.occ >> n) & 1) as u8
    }

    pub fn fermion_number(&self) -> u32 {
        self.occ.count_ones()
    }
}

/// Gauss-law eigenvalue at site n: the Z2 case returns ±1 (physical = +1),
/// the U(1) case returns the integer divergence defect (physical = 0).
pub fn gauss_eigenvalue(spec: &LatticeSpec, state: &BasisState, n: usize) -> i32 {
    let nm1 = (n + spec.n_sites - 1) % spec.n_sites;
    let f = state.fermion(n) as i32;
    match spec.group {
        GaugeGroup::Z2 => {
            let sign = if (f + (n % 2) as i32) % 2 == 0 { 1 } else { -1 };
            state.links[n] as i32 * state.links[nm1] as i32 * sign
        }
        GaugeGroup::U1 => state.links[n] as i32 - state.links[nm1] as i32 + f - (n % 2) as i32,
    }
}

pub fn is_physical(spec: &LatticeSpec, state: &BasisState) -> bool {
    let target = match spec.group {
        GaugeGroup::Z2 => 1,
        GaugeGroup::U1 => 0,
    };
    state.fermion_number() as usize == spec.n_sites / 2
        && (0..spec.n_sites).all(|n| gauss_eigenvalue(spec, state, n) == target)
}

/// The strong-coupling vacuum: no fermions or antifermions, every link in its
/// lowest electric state (for Z2 that depends on the sign of ε; for U(1) it
/// is ℓ = 0).
pub fn strong_coupling_vacuum(spec: &LatticeSpec) -> BasisState {
    let mut occ = 0u32;
    for n in (1..spec.n_sites).step_by(2) {
        occ |= 1 << n;
    }
    let link = match spec.group {
        GaugeGroup::Z2 => {
            if spec.epsilon <= 0.0 {
                1
            } else {
                -1
            }
        }
        GaugeGroup::U1 => 0,
    };
    BasisState { occ, links: vec![link; spec.n_sites] }
}

/// The Gauss-law physical basis in canonical order, with the label
/// permutation used by all probability outputs.
#[derive(Debug, Clone)]
pub struct PhysicalBasis {
    spec: LatticeSpec,
    states: Vec<BasisState>,
    index: HashMap<BasisState, usize>,
    /// `labels[i]` is the output label of canonical state i. Identity unless
    /// a published labeling fixture exists for this lattice.
    labels: Vec<usize>,
}

impl PhysicalBasis {
    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn position(&self, s: &BasisState) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn label(&self, canonical_index: usize) -> usize {
        self.labels[canonical_index]
    }

    /// Canonical index of the state carrying the given output label.
    pub fn index_of_label(&self, label: usize) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn vacuum_index(&self) -> usize {
        self.position(&strong_coupling_vacuum(&self.spec))
            .expect("strong-coupling vacuum is physical")
    }

    /// CSV table `label,f_0,b_0,…,f_{N-1},b_{N-1}`, rows ordered by label.
    /// Z2 links are written as 0 (E = +1) / 1 (E = −1); U(1) links as ℓ.
    pub fn to_csv(&self) -> String {
        let n = self.spec.n_sites;
        let mut head = String::from("label");
        for i in 0..n {
            head.push_str(&format!(",f_{i},b_{i}"));
        }
        let mut rows: Vec<(usize, String)> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mut row = self.labels[i].to_string();
                for site in 0..n {
                    let b = match self.spec.group {
                        GaugeGroup::Z2 => i8::from(s.links[site] < 0),
                        GaugeGroup::U1 => s.links[site],
                    };
                    row.push_str(&format!(",{},{}", s.fermion(site), b));
                }
                (self.labels[i], row)
            })
            .collect();
        rows.sort_by_key(|(l, _)| *l);
        let mut out = head;
        out.push('\n');
        for (_, row) in rows {
            out.push_str(&row);
            out.push('\n');
        }
        out
    }
}

/// Enumerate all Gauss-law-satisfying configurations with Q = N/2.
///
/// Canonical order: by fermion occupation read as a big-endian integer
/// (site 0 = most significant bit), then by link values.
pub fn enumerate_physical_basis(spec: &LatticeSpec) -> Result<PhysicalBasis> {
    spec.validate()?;
    let n = spec.n_sites;
    let lam = spec.cutoff as i32;
    let mut states = Vec::new();
    for occ in 0u32..(1 << n) {
        if occ.count_ones() as usize != n / 2 {
            continue;
        }
        let f = |site: usize| ((occ >> site) & 1) as i32;
        match spec.group {
            GaugeGroup::Z2 => {
                for e0 in [1i8, -1] {
                    let mut links = vec![0i8; n];
                    links[0] = e0;
                    for site in 1..n {
                        let flip = (f(site) + (site % 2) as i32) % 2 != 0;
                        links[site] = if flip { -links[site - 1] } else { links[site - 1] };
                    }
                    let closes = links[0] as i32 * links[n - 1] as i32
                        * (if f(0) % 2 == 0 { 1 } else { -1 })
                        == 1;
                    if closes {
                        states.push(BasisState { occ, links });
                    }
                }
            }
            GaugeGroup::U1 => {
                'seed: for l0 in -lam..=lam {
                    let mut links = vec![0i8; n];
                    links[0] = l0 as i8;
                    for site in 1..n {
                        let l = links[site - 1] as i32 - f(site) + (site % 2) as i32;
                        if l.abs() > lam {
                            continue 'seed;
                        }
                        links[site] = l as i8;
                    }
                    if links[0] as i32 - links[n - 1] as i32 + f(0) == 0 {
                        states.push(BasisState { occ, links });
                    }
                }
            }
        }
    }
    states.sort_by_key(|s| {
        let big: u32 = (0..n).fold(0, |acc, site| (acc << 1) | ((s.occ >> site) & 1));
        (big, s.links.clone())
    });
    let index: HashMap<_, _> = states.iter().cloned().zip(0..).collect();
    let labels = label_permutation(spec, &states, &index)?;
    Ok(PhysicalBasis { spec: *spec, states, index, labels })
}

/// Published label tables for the 6-site lattices. Other sizes use canonical
/// indices as labels.
fn label_permutation(
    spec: &LatticeSpec,
    states: &[BasisState],
    index: &HashMap<BasisState, usize>,
) -> Result<Vec<usize>> {
    let fixture = match (spec.group, spec.n_sites, spec.cutoff) {
        (GaugeGroup::Z2, 6, _) => Some(include_str!("../fixtures/labels_z2_n6.csv")),
        (GaugeGroup::U1, 6, 1) => Some(include_str!("../fixtures/labels_u1_n6_l1.csv")),
        _ => None,
    };
    let Some(fixture) = fixture else {
        return Ok((0..states.len()).collect());
    };
    let mut labels = vec![usize::MAX; states.len()];
    for line in fixture.lines().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<i32> = line
            .split(',')
            .map(|x| x.trim().parse().map_err(|_| Error::Config(format!("bad label fixture row: {line}"))))
            .collect::<Result<_>>()?;
        let label = fields[0] as usize;
        let n = spec.n_sites;
        let mut occ = 0u32;
        let mut links = vec![0i8; n];
        for site in 0..n {
            occ |= (fields[1 + 2 * site] as u32 & 1) << site;
            links[site] = match spec.group {
                GaugeGroup::Z2 => {
                    if fields[2 + 2 * site] == 0 {
                        1
                    } else {
                        -1
                    }
                }
                GaugeGroup::U1 => fields[2 + 2 * site] as i8,
            };
        }
        let state = BasisState { occ, links };
        let i = index.get(&state).ok_or_else(|| {
            Error::Config(format!("label fixture row {label} is not a physical state"))
        })?;
        labels[*i] = label;
    }
    if labels.iter().any(|&l| l == usize::MAX) {
        return Err(Error::Config("label fixture does not cover the basis".into()));
    }
    Ok(labels)
}

/// The three tagged parts of the Hamiltonian.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub hopping: OperatorSum,
    pub mass: OperatorSum,
    pub electric: OperatorSum,
}

impl Hamiltonian {
    pub fn total(&self) -> OperatorSum {
        self.hopping.add(&self.mass).add(&self.electric)
    }

    /// Dense matrix of the full Hamiltonian on the physical basis.
    pub fn matrix(&self, basis: &PhysicalBasis) -> Result<CMat> {
        self.total().to_matrix(basis)
    }
}

/// Build H = hopping + mass + electric with periodic boundary conditions.
pub fn build_hamiltonian(spec: &LatticeSpec) -> Result<Hamiltonian> {
    spec.validate()?;
    let n = spec.n_sites;
    let mut hopping = OperatorSum::zero(spec);
    for site in 0..n {
        let np1 = (site + 1) % n;
        let hop = OperatorSum::fermion_create(spec, site)
            .mul(&OperatorSum::product_term(
                spec,
                Complex64::new(0.0, -0.5),
                &[],
                &[(site, LocalOp::link_u(spec.group, spec.cutoff))],
            ))
            .mul(&OperatorSum::fermion_annihilate(spec, np1));
        hopping = hopping.add(&hop).add(&hop.adjoint());
    }
    let mut mass = OperatorSum::zero(spec);
    for site in 0..n {
        let sign = if site % 2 == 0 { 1.0 } else { -1.0 };
        mass = mass.add(&OperatorSum::product_term(
            spec,
            Complex64::new(spec.m_f * sign, 0.0),
            &[(site, LocalOp::number())],
            &[],
        ));
    }
    let mut electric = OperatorSum::zero(spec);
    for site in 0..n {
        let f_e = match spec.group {
            GaugeGroup::Z2 => LocalOp::link_e(spec.group, spec.cutoff),
            GaugeGroup::U1 => LocalOp::link_e2(spec.group, spec.cutoff),
        };
        electric = electric.add(&OperatorSum::product_term(
            spec,
            Complex64::new(spec.epsilon, 0.0),
            &[],
            &[(site, f_e)],
        ));
    }
    Ok(Hamiltonian { hopping, mass, electric })
}

/// Check that an operator commutes with every local Gauss-law generator, by
/// verifying that each nonzero matrix element on the full product space
/// connects states with identical Gauss eigenvalues at every site.
pub fn commutes_with_gauss(spec: &LatticeSpec, op: &OperatorSum) -> bool {
    let mut ok = true;
    op.for_each_full_element(|src, _amp, dst| {
        for n in 0..spec.n_sites {
            if gauss_eigenvalue(spec, src, n) != gauss_eigenvalue(spec, dst, n) {
                ok = false;
            }
        }
    });
    ok
}

/// Translation by two staggered sites.
///
/// Acting on a configuration it shifts fermions and links forward by two
/// sites; the fermionic reordering sign for a Q-particle state with w
/// occupied sites wrapping the boundary is (−1)^{w(Q−w)} (always +1 in the
/// odd-Q sectors used here).
#[derive(Debug, Clone, Copy)]
pub struct Translation {
    n_sites: usize,
}

pub fn translation_operator(spec: &LatticeSpec) -> Translation {
    Translation { n_sites: spec.n_sites }
}

impl Translation {
    pub fn apply(&self, s: &BasisState) -> (f64, BasisState) {
        let n = self.n_sites;
        let mut occ = 0u32;
        let mut links = vec![0i8; n];
        for site in 0..n {
            let from = (site + n - 2) % n;
            occ |= ((s.occ >> from) & 1) << site;
            links[site] = s.links[from];
        }
        let q = s.occ.count_ones();
        let w = ((s.occ >> (n - 2)) & 1) + ((s.occ >> (n - 1)) & 1);
        let sign = if (w * (q - w)) % 2 == 0 { 1.0 } else { -1.0 };
        (sign, BasisState { occ, links })
    }

    /// Signed permutation matrix on the physical basis.
    pub fn matrix(&self, basis: &PhysicalBasis) -> CMat {
        let d = basis.len();
        let mut m = CMat::zeros(d, d);
        for (i, s) in basis.states().iter().enumerate() {
            let (sign, t) = self.apply(s);
            let j = basis.position(&t).expect("translation preserves the physical space");
            m[(j, i)] = Complex64::new(sign, 0.0);
        }
        m
    }
}

/// The Brillouin zone of the two-site-periodic lattice: the N/2 momenta
/// k = 2πj/N inside [−π/2, π/2), ascending.
pub fn brillouin_zone(n_sites: usize) -> Vec<f64> {
    let n = n_sites as i64;
    (-n / 2..n / 2)
        .map(|j| 2.0 * PI * j as f64 / n as f64)
        .filter(|&k| (-PI / 2.0..PI / 2.0 - 1e-12).contains(&k))
        .collect()
}

fn on_bz_grid(n_sites: usize, k: f64) -> Option<f64> {
    brillouin_zone(n_sites)
        .into_iter()
        .find(|&g| (g - k).abs() < 1e-9)
}

/// Momentum projector P_k = (2/N) Σ_j e^{+i2kj} T₂^j on the physical basis.
pub fn momentum_projector(spec: &LatticeSpec, basis: &PhysicalBasis, k: f64) -> Result<CMat> {
    let k = on_bz_grid(spec.n_sites, k).ok_or(Error::OffGridMomentum(k))?;
    let d = basis.len();
    let t = translation_operator(spec).matrix(basis);
    let mut power = CMat::identity(d, d);
    let mut p = CMat::zeros(d, d);
    for j in 0..spec.n_sites / 2 {
        let phase = (I1 * 2.0 * k * j as f64).exp();
        p += &power * phase;
        power = &t * power;
    }
    Ok(p * Complex64::new(2.0 / spec.n_sites as f64, 0.0))
}

/// Orthonormal basis of the momentum-k sector, built from translation orbits
/// of physical configurations. Columns span range(P_k).
pub fn momentum_sector_basis(spec: &LatticeSpec, basis: &PhysicalBasis, k: f64) -> Result<CMat> {
    let k = on_bz_grid(spec.n_sites, k).ok_or(Error::OffGridMomentum(k))?;
    let t = translation_operator(spec);
    let d = basis.len();
    let mut seen = vec![false; d];
    let mut cols: Vec<crate::CVec> = Vec::new();
    for rep in 0..d {
        if seen[rep] {
            continue;
        }
        // walk the orbit, accumulating the fermionic signs
        let mut orbit = vec![(rep, 1.0f64)];
        seen[rep] = true;
        let mut cur = basis.states()[rep].clone();
        let mut sign = 1.0;
        let closing;
        loop {
            let (s, next) = t.apply(&cur);
            sign *= s;
            let j = basis.position(&next).expect("translation preserves the physical space");
            if j == rep {
                closing = sign;
                break;
            }
            seen[j] = true;
            orbit.push((j, sign));
            cur = next;
        }
        // the sector admits this orbit iff e^{-i2k·len} matches the closing sign
        let len = orbit.len();
        let phase = (-I1 * 2.0 * k * len as f64).exp();
        if (phase - Complex64::new(closing, 0.0)).norm() > 1e-9 {
            continue;
        }
        let mut col = crate::CVec::zeros(d);
        let norm = (len as f64).sqrt();
        for (j, (site, s)) in orbit.iter().enumerate() {
            col[*site] = (I1 * 2.0 * k * j as f64).exp() * *s / norm;
        }
        cols.push(col);
    }
    if cols.is_empty() {
        return Err(Error::EmptySector);
    }
    let mut m = CMat::zeros(d, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    Ok(m)
}

/// Qubit assignment: fermion and link registers interleaved per site
/// (f₀ b₀ f₁ b₁ …), optionally followed by one ancilla.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitLayout {
    pub n_sites: usize,
    pub bits_per_link: usize,
    pub has_ancilla: bool,
}

impl QubitLayout {
    pub fn for_spec(spec: &LatticeSpec, ancilla: bool) -> Self {
        let bits = match spec.group {
            GaugeGroup::Z2 => 1,
            GaugeGroup::U1 => (usize::BITS - (spec.link_dim() - 1).leading_zeros()) as usize,
        };
        Self { n_sites: spec.n_sites, bits_per_link: bits, has_ancilla: ancilla }
    }

    pub fn fermion(&self, n: usize) -> usize {
        debug_assert!(n < self.n_sites);
        n * (1 + self.bits_per_link)
    }

    pub fn link_bit(&self, n: usize, bit: usize) -> usize {
        debug_assert!(n < self.n_sites && bit < self.bits_per_link);
        n * (1 + self.bits_per_link) + 1 + bit
    }

    /// Z2 convenience: the single qubit of link n.
    pub fn link(&self, n: usize) -> usize {
        self.link_bit(n, 0)
    }

    pub fn ancilla(&self) -> Option<usize> {
        self.has_ancilla
            .then_some(self.n_sites * (1 + self.bits_per_link))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_sites * (1 + self.bits_per_link) + usize::from(self.has_ancilla)
    }
}
