//! Gate-level synthesis for the Z2 theory: the variational ground-state
//! circuit, the ancilla-encoded wave-packet circuit built from
//! singular-value-decomposition blocks, and closed-form CNOT accounting.
//!
//! All emitted circuits are exact products of the intended operator
//! exponentials (global phase included), so they can be compared against
//! dense matrix exponentials at machine precision. CNOT budgets per block:
//! 6 per hopping link, 2 for a zero-length meson, and (l+2) + (2l+4) + (l+2)
//! for an l-length meson (the diagonalizing circuit, the diagonal rotation,
//! and its inverse).
//!
//! The shorter-arc Jordan-Wigner strings used here require N ≡ 2 (mod 4) so
//! that the boundary string factor is +1 throughout the Q = N/2 sector.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::ansatz::{build_bare_meson, CoefficientTable, Wrapping};
use crate::model::{GaugeGroup, LatticeSpec, QubitLayout};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gate {
    Hadamard { q: usize },
    PauliX { q: usize },
    Rz { q: usize, angle: f64 },
    Rx { q: usize, angle: f64 },
    Ry { q: usize, angle: f64 },
    Cnot { control: usize, target: usize },
    /// diag(1, e^{iθ}) on one qubit.
    Phase { q: usize, angle: f64 },
}

impl Gate {
    pub fn operands(&self) -> Vec<usize> {
        match *self {
            Gate::Hadamard { q }
            | Gate::PauliX { q }
            | Gate::Rz { q, .. }
            | Gate::Rx { q, .. }
            | Gate::Ry { q, .. }
            | Gate::Phase { q, .. } => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rz { angle, .. }
            | Gate::Rx { angle, .. }
            | Gate::Ry { angle, .. }
            | Gate::Phase { angle, .. } => Some(angle),
            _ => None,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Gate::Hadamard { .. } => "h",
            Gate::PauliX { .. } => "x",
            Gate::Rz { .. } => "rz",
            Gate::Rx { .. } => "rx",
            Gate::Ry { .. } => "ry",
            Gate::Cnot { .. } => "cnot",
            Gate::Phase { .. } => "phase",
        }
    }
}

/// Gate totals by kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GateCounts {
    pub hadamard: usize,
    pub pauli_x: usize,
    pub rz: usize,
    pub rx: usize,
    pub ry: usize,
    pub phase: usize,
    pub cnot: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CircuitMetadata {
    pub kind: String,
    pub n_trotter: usize,
    pub n_order: usize,
    pub theta_c: f64,
    pub counts: GateCounts,
    /// Analytic CNOT prediction the built circuit must satisfy.
    pub cnot_predicted: usize,
    pub summand_order: String,
    pub parameters: serde_json::Value,
}

/// An ordered gate list over a declared qubit layout.
#[derive(Debug, Clone)]
pub struct Circuit {
    pub layout: QubitLayout,
    pub gates: Vec<Gate>,
    pub metadata: CircuitMetadata,
}

impl Circuit {
    fn new(layout: QubitLayout, kind: &str) -> Self {
        Self {
            layout,
            gates: Vec::new(),
            metadata: CircuitMetadata {
                kind: kind.to_string(),
                n_trotter: 0,
                n_order: 0,
                theta_c: 0.0,
                counts: GateCounts::default(),
                cnot_predicted: 0,
                summand_order: String::new(),
                parameters: serde_json::Value::Null,
            },
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.layout.n_qubits()
    }

    fn push(&mut self, g: Gate) {
        debug_assert!(g.operands().iter().all(|&q| q < self.n_qubits()));
        debug_assert!(g.angle().map_or(true, f64::is_finite));
        self.gates.push(g);
    }

    fn extend(&mut self, gs: impl IntoIterator<Item = Gate>) {
        for g in gs {
            self.push(g);
        }
    }

    /// Recount gates from the emitted list.
    pub fn recount(&self) -> GateCounts {
        let mut c = GateCounts::default();
        for g in &self.gates {
            match g {
                Gate::Hadamard { .. } => c.hadamard += 1,
                Gate::PauliX { .. } => c.pauli_x += 1,
                Gate::Rz { .. } => c.rz += 1,
                Gate::Rx { .. } => c.rx += 1,
                Gate::Ry { .. } => c.ry += 1,
                Gate::Phase { .. } => c.phase += 1,
                Gate::Cnot { .. } => c.cnot += 1,
            }
        }
        c
    }

    pub fn cnot_count(&self) -> usize {
        self.recount().cnot
    }

    fn seal(&mut self) {
        self.metadata.counts = self.recount();
    }

    /// OpenQASM 2.0 text.
    pub fn to_qasm(&self) -> String {
        let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
        out.push_str(&format!("qreg q[{}];\n", self.n_qubits()));
        for g in &self.gates {
            let line = match *g {
                Gate::Hadamard { q } => format!("h q[{q}];"),
                Gate::PauliX { q } => format!("x q[{q}];"),
                Gate::Rz { q, angle } => format!("rz({angle}) q[{q}];"),
                Gate::Rx { q, angle } => format!("rx({angle}) q[{q}];"),
                Gate::Ry { q, angle } => format!("ry({angle}) q[{q}];"),
                Gate::Cnot { control, target } => format!("cx q[{control}],q[{target}];"),
                Gate::Phase { q, angle } => format!("u1({angle}) q[{q}];"),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    /// Line-oriented gate list: `kind operands… [angle]`.
    pub fn to_gate_list(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str(g.name());
            for q in g.operands() {
                out.push_str(&format!(" {q}"));
            }
            if let Some(a) = g.angle() {
                out.push_str(&format!(" {a}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn metadata_json(&self) -> String {
        serde_json::to_string_pretty(&self.metadata).expect("metadata serializes")
    }
}

/// Variational ground-state circuit parameters.
#[derive(Debug, Clone, Copy, Serialize, serde::Deserialize)]
pub struct GsParams {
    pub theta_h: f64,
    pub theta_eps: f64,
    /// Retained for multi-layer circuits; a pure phase layer when the input
    /// is the strong-coupling vacuum, so it defaults to zero.
    pub theta_m: f64,
    pub n_layers: usize,
}

impl GsParams {
    pub fn single_layer(theta_h: f64, theta_eps: f64) -> Self {
        Self { theta_h, theta_eps, theta_m: 0.0, n_layers: 1 }
    }

    /// θ^ε reduced to (−π, π].
    pub fn theta_eps_mod_2pi(&self) -> f64 {
        let mut t = self.theta_eps.rem_euclid(2.0 * PI);
        if t > PI {
            t -= 2.0 * PI;
        }
        t
    }
}

fn require_z2_efficient(spec: &LatticeSpec) -> Result<()> {
    if spec.group != GaugeGroup::Z2 {
        return Err(Error::InvalidSpec("circuit synthesis is Z2-only".into()));
    }
    if !spec.efficient_jw_ok() {
        return Err(Error::InvalidSpec(format!(
            "efficient Jordan-Wigner synthesis needs n_sites ≡ 2 (mod 4), got {}",
            spec.n_sites
        )));
    }
    Ok(())
}

/// X gates preparing the strong-coupling vacuum from |0…0⟩: antifermion
/// sites occupied, links in the low-energy spin state.
fn vacuum_prep(spec: &LatticeSpec, layout: &QubitLayout) -> Vec<Gate> {
    let mut gates = Vec::new();
    for n in (1..spec.n_sites).step_by(2) {
        gates.push(Gate::PauliX { q: layout.fermion(n) });
    }
    if spec.epsilon > 0.0 {
        for n in 0..spec.n_sites {
            gates.push(Gate::PauliX { q: layout.link(n) });
        }
    }
    gates
}

/// e^{iθ H_link} for the hopping term on one link,
/// H_link = ¼ (X_f Y_f' − Y_f X_f') X̃_b, synthesized with 6 CNOTs.
fn hopping_exponential(layout: &QubitLayout, site: usize, theta: f64) -> Vec<Gate> {
    let n_sites = layout.n_sites;
    let f = layout.fermion(site);
    let g = layout.fermion((site + 1) % n_sites);
    let b = layout.link(site);
    vec![
        Gate::Phase { q: g, angle: -PI / 2.0 },
        Gate::Cnot { control: f, target: g },
        Gate::Hadamard { q: f },
        Gate::Hadamard { q: b },
        Gate::Cnot { control: f, target: b },
        Gate::Cnot { control: g, target: b },
        Gate::Rz { q: b, angle: theta / 2.0 },
        Gate::Cnot { control: g, target: b },
        Gate::Rz { q: b, angle: -theta / 2.0 },
        Gate::Cnot { control: f, target: b },
        Gate::Hadamard { q: f },
        Gate::Hadamard { q: b },
        Gate::Cnot { control: f, target: g },
        Gate::Phase { q: g, angle: PI / 2.0 },
    ]
}

/// Ground-state preparation circuit: vacuum prep from |0…0⟩, then per layer
/// the per-link hopping exponentials e^{iθ_h H^h_{n,n+1}} (n ascending), the
/// mass phases, and the electric-field rotations. 6N CNOTs per layer.
pub fn gs_circuit(spec: &LatticeSpec, params: &GsParams) -> Result<Circuit> {
    require_z2_efficient(spec)?;
    let layout = QubitLayout::for_spec(spec, false);
    let mut c = Circuit::new(layout, "ground_state");
    c.extend(vacuum_prep(spec, &layout));
    for _ in 0..params.n_layers {
        for n in 0..spec.n_sites {
            c.extend(hopping_exponential(&layout, n, params.theta_h));
        }
        if params.theta_m != 0.0 {
            for n in 0..spec.n_sites {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                // e^{iθ_m m_f (−1)^n |1⟩⟨1|}
                c.push(Gate::Phase {
                    q: layout.fermion(n),
                    angle: params.theta_m * spec.m_f * sign,
                });
            }
        }
        for n in 0..spec.n_sites {
            // e^{iθ_ε ε Z̃} = Rz(−2θ_ε ε)
            c.push(Gate::Rz { q: layout.link(n), angle: -2.0 * params.theta_eps * spec.epsilon });
        }
    }
    c.metadata.cnot_predicted = 6 * spec.n_sites * params.n_layers;
    c.metadata.parameters = serde_json::json!({
        "theta_h": params.theta_h,
        "theta_eps": params.theta_eps,
        "theta_eps_mod_2pi": params.theta_eps_mod_2pi(),
        "theta_m": params.theta_m,
        "n_layers": params.n_layers,
    });
    c.metadata.summand_order = "hopping links ascending, then mass, then electric".into();
    c.seal();
    debug_assert_eq!(c.cnot_count(), c.metadata.cnot_predicted);
    Ok(c)
}

/// One arc of a bare meson, resolved for circuit emission.
struct Arc {
    links: Vec<usize>,
    interior: Vec<usize>,
}

fn arcs_of(spec: &LatticeSpec, m: usize, n: usize, wrapping: Wrapping) -> Vec<(Arc, f64)> {
    let nn = spec.n_sites;
    let fwd_len = (n + nn - m) % nn;
    let bwd_len = nn - fwd_len;
    let fwd = || Arc {
        links: (0..fwd_len).map(|j| (m + j) % nn).collect(),
        interior: (1..fwd_len).map(|j| (m + j) % nn).collect(),
    };
    let bwd = || Arc {
        links: (0..bwd_len).map(|j| (m + nn - 1 - j) % nn).collect(),
        interior: (1..bwd_len).map(|j| (m + nn - j) % nn).collect(),
    };
    match wrapping {
        Wrapping::Forward => vec![(fwd(), 1.0)],
        Wrapping::Backward => vec![(bwd(), 1.0)],
        Wrapping::BothHalved => {
            let w = 1.0 / 2f64.sqrt();
            vec![(fwd(), w), (bwd(), w)]
        }
    }
}

/// Gates for e^{−iθ Θ_{m,n}} where Θ_{m,n} is the ancilla encoding of one
/// meson summand with coefficient `coeff`:
///
/// ```text
///   Θ_{m,n} = coeff · ℳ̃_{m,n} ⊗ |1⟩⟨0|_a + H.c.
/// ```
///
/// Zero-length mesons reduce to a two-qubit rotation (2 CNOTs). For an
/// l-length meson the fragment is 𝒰† e^{−iθ𝒟} 𝒰 on the arc qubits and the
/// ancilla; equal-length wrappings commute exactly and are emitted as two
/// consecutive blocks at weight 1/√2 each. A zero coefficient yields an
/// empty fragment.
pub fn svd_block(
    spec: &LatticeSpec,
    layout: &QubitLayout,
    meson: &crate::ansatz::BareMeson,
    coeff: Complex64,
    theta: f64,
) -> Result<Vec<Gate>> {
    require_z2_efficient(spec)?;
    let a = layout
        .ancilla()
        .ok_or_else(|| Error::Layout("svd_block needs an ancilla qubit".into()))?;
    if coeff.norm() == 0.0 {
        return Ok(Vec::new());
    }
    let (m, n) = (meson.m, meson.n);
    let mut gates = Vec::new();
    if m == n {
        // Θ = |C| |1⟩⟨1|_m ⊗ (cosφ X + sinφ Y)_a
        let (mag, phi) = (coeff.norm(), coeff.arg());
        let fm = layout.fermion(m);
        gates.extend([
            Gate::Rz { q: a, angle: -phi },
            Gate::Hadamard { q: a },
            Gate::Cnot { control: fm, target: a },
            Gate::Rz { q: a, angle: -theta * mag },
            Gate::Cnot { control: fm, target: a },
            Gate::Hadamard { q: a },
            Gate::Rx { q: a, angle: theta * mag },
            Gate::Rz { q: a, angle: phi },
        ]);
        return Ok(gates);
    }
    let (fm, fn_) = (layout.fermion(m), layout.fermion(n));
    for (arc, weight) in arcs_of(spec, m, n, meson.wrapping) {
        let c = coeff * weight;
        let (mag, phi) = (c.norm(), c.arg());
        // 𝒰: X_a, ancilla-controlled arc flips, Rz_a(φ), X_a, H_a
        let mut u = vec![Gate::PauliX { q: a }];
        for &l in &arc.links {
            u.push(Gate::Cnot { control: a, target: layout.link(l) });
        }
        u.push(Gate::Cnot { control: a, target: fn_ });
        u.push(Gate::Cnot { control: a, target: fm });
        u.push(Gate::Rz { q: a, angle: phi });
        u.push(Gate::PauliX { q: a });
        u.push(Gate::Hadamard { q: a });
        // e^{−iθ𝒟}: parity ladder of the interior string into the ancilla,
        // then the four projector rotations walked over (m, n) inclusion
        let interior: Vec<usize> = arc.interior.iter().map(|&s| layout.fermion(s)).collect();
        let alpha = theta * mag;
        let mut d = Vec::new();
        for w in interior.windows(2) {
            d.push(Gate::Cnot { control: w[0], target: w[1] });
        }
        if let Some(&last) = interior.last() {
            d.push(Gate::Cnot { control: last, target: a });
        }
        d.extend([
            Gate::Cnot { control: fm, target: a },
            Gate::Cnot { control: fn_, target: a },
            Gate::Rz { q: a, angle: -alpha / 2.0 },
            Gate::Cnot { control: fn_, target: a },
            Gate::Rz { q: a, angle: -alpha / 2.0 },
            Gate::Cnot { control: fm, target: a },
            Gate::Rz { q: a, angle: alpha / 2.0 },
            Gate::Cnot { control: fn_, target: a },
            Gate::Rz { q: a, angle: alpha / 2.0 },
            Gate::Cnot { control: fn_, target: a },
        ]);
        if let Some(&last) = interior.last() {
            d.push(Gate::Cnot { control: last, target: a });
        }
        for w in interior.windows(2).rev() {
            d.push(Gate::Cnot { control: w[0], target: w[1] });
        }
        // fragment = 𝒰, e^{−iθ𝒟}, 𝒰†
        let mut udag: Vec<Gate> = u
            .iter()
            .rev()
            .map(|g| match *g {
                Gate::Rz { q, angle } => Gate::Rz { q, angle: -angle },
                Gate::Phase { q, angle } => Gate::Phase { q, angle: -angle },
                other => other,
            })
            .collect();
        gates.append(&mut u);
        gates.append(&mut d);
        gates.append(&mut udag);
    }
    Ok(gates)
}

/// CNOT cost of one meson summand of the given length (both wrappings for a
/// tie at length N/2).
pub fn meson_block_cnots(n_sites: usize, m: usize, n: usize) -> usize {
    if m == n {
        return 2;
    }
    let l = ((n + n_sites - m) % n_sites).min((m + n_sites - n) % n_sites);
    let per_branch = 4 * l + 8;
    if 2 * l == n_sites {
        2 * per_branch
    } else {
        per_branch
    }
}

/// Wave-packet preparation circuit: the second-order Trotterization of
/// e^{−i(π/2) Σ Θ_{m,n}} over the summands with |C_{m,n}| ≥ θ_c, ordered by
/// descending magnitude (ties lexicographic by (m, n)).
pub fn wp_circuit(
    spec: &LatticeSpec,
    table: &CoefficientTable,
    n_trotter: usize,
    theta_c: f64,
) -> Result<Circuit> {
    require_z2_efficient(spec)?;
    if n_trotter == 0 {
        return Err(Error::InvalidSpec("n_trotter must be ≥ 1".into()));
    }
    let kept = table.surviving(theta_c);
    if kept.is_empty() {
        return Err(Error::EmptyTable(theta_c));
    }
    let layout = QubitLayout::for_spec(spec, true);
    let mut c = Circuit::new(layout, "wave_packet");
    let mesons: Vec<_> = kept
        .iter()
        .map(|&(m, n)| build_bare_meson(spec, m, n))
        .collect::<Result<_>>()?;
    // second-order product formula: each Trotter step applies the summand
    // list forward and then reversed at half the step angle
    let theta = (PI / 2.0) / n_trotter as f64 / 2.0;
    let mut step: Vec<Gate> = Vec::new();
    for (meson, &(m, n)) in mesons.iter().zip(&kept) {
        step.extend(svd_block(spec, &layout, meson, table.coeff(m, n), theta)?);
    }
    for (meson, &(m, n)) in mesons.iter().zip(&kept).rev() {
        step.extend(svd_block(spec, &layout, meson, table.coeff(m, n), theta)?);
    }
    for _ in 0..n_trotter {
        c.extend(step.iter().copied());
    }
    let per_application: usize = kept
        .iter()
        .map(|&(m, n)| meson_block_cnots(spec.n_sites, m, n))
        .sum();
    c.metadata.n_trotter = n_trotter;
    c.metadata.n_order = 2;
    c.metadata.theta_c = theta_c;
    c.metadata.cnot_predicted = per_application * 2 * n_trotter;
    c.metadata.summand_order = "descending |C_{m,n}|, ties lexicographic by (m,n)".into();
    c.metadata.parameters = serde_json::json!({
        "kept_terms": kept.len(),
        "cnot_per_application": per_application,
    });
    c.seal();
    debug_assert_eq!(c.cnot_count(), c.metadata.cnot_predicted);
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    /// Ground-state circuit: 2N qubits, 6N CNOTs per layer.
    Gs,
    /// Untruncated wave-packet circuit: (N³ + 10N² + 2N) · 2 N_Trotter.
    Full,
    /// Mesons of length ≤ 1 only: 26N · 2 N_Trotter (an upper bound for any
    /// truncation keeping only those lengths).
    OneMesonTruncated,
}

/// Closed-form (qubits, CNOTs) for the three canonical circuit shapes.
pub fn predict_gate_counts(
    spec: &LatticeSpec,
    mode: CountMode,
    n_trotter: usize,
) -> Result<(usize, usize)> {
    require_z2_efficient(spec)?;
    let n = spec.n_sites;
    Ok(match mode {
        CountMode::Gs => (2 * n, 6 * n),
        CountMode::Full => (2 * n + 1, (n * n * n + 10 * n * n + 2 * n) * 2 * n_trotter),
        CountMode::OneMesonTruncated => (2 * n + 1, 26 * n * 2 * n_trotter),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> LatticeSpec {
        LatticeSpec::new(GaugeGroup::Z2, 6, 1.0, -0.3, 1).unwrap()
    }

    #[test]
    fn gs_circuit_has_6n_cnots() {
        let c = gs_circuit(&spec(), &GsParams::single_layer(-0.3, 1.2)).unwrap();
        assert_eq!(c.cnot_count(), 36);
        assert_eq!(c.metadata.counts.cnot, 36);
        assert_eq!(c.n_qubits(), 12);
        let c2 = gs_circuit(
            &spec(),
            &GsParams { theta_h: 0.1, theta_eps: 0.2, theta_m: 0.3, n_layers: 2 },
        )
        .unwrap();
        assert_eq!(c2.cnot_count(), 72);
    }

    #[test]
    fn rejects_u1_and_bad_sizes() {
        let u1 = LatticeSpec::new(GaugeGroup::U1, 6, 1.0, 1.0, 1).unwrap();
        assert!(gs_circuit(&u1, &GsParams::single_layer(0.1, 0.1)).is_err());
        let n8 = LatticeSpec::new(GaugeGroup::Z2, 8, 1.0, -0.3, 1).unwrap();
        assert!(predict_gate_counts(&n8, CountMode::Full, 1).is_err());
    }

    #[test]
    fn predicted_counts_evaluate_table() {
        let s = spec();
        assert_eq!(predict_gate_counts(&s, CountMode::Gs, 1).unwrap(), (12, 36));
        assert_eq!(predict_gate_counts(&s, CountMode::Full, 1).unwrap(), (13, 1176));
        assert_eq!(predict_gate_counts(&s, CountMode::OneMesonTruncated, 1).unwrap(), (13, 312));
        // N = 10: N³ + 10N² + 2N = 2020 (cross-checked against the generated
        // circuit gate list in the integration tests)
        let s10 = LatticeSpec::new(GaugeGroup::Z2, 10, 1.0, -0.3, 1).unwrap();
        let (q, c) = predict_gate_counts(&s10, CountMode::Full, 1).unwrap();
        assert_eq!((q, c), (21, 2020 * 2));
    }

    #[test]
    fn svd_block_cnot_budget() {
        let s = spec();
        let layout = QubitLayout::for_spec(&s, true);
        let count = |m: usize, n: usize| {
            let meson = build_bare_meson(&s, m, n).unwrap();
            svd_block(&s, &layout, &meson, Complex64::new(0.3, 0.1), 0.7)
                .unwrap()
                .iter()
                .filter(|g| matches!(g, Gate::Cnot { .. }))
                .count()
        };
        assert_eq!(count(0, 0), 2);
        assert_eq!(count(0, 1), 12); // l = 1: (1+2)·2 + (2·1+4)
        assert_eq!(count(0, 2), 16); // l = 2
        assert_eq!(count(5, 2), 40); // tie |m−n| = 3: two branches of 20
        for (m, n) in [(0usize, 0usize), (0, 1), (0, 2), (5, 2)] {
            assert_eq!(count(m, n), meson_block_cnots(6, m, n));
        }
        // zero coefficient gives an empty fragment
        let meson = build_bare_meson(&s, 0, 1).unwrap();
        assert!(svd_block(&s, &layout, &meson, Complex64::new(0.0, 0.0), 0.7)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn theta_counting_identity() {
        // summing the closed-form block costs over all N² pairs reproduces
        // the full-circuit CNOT formula
        let n = 6usize;
        let total: usize = (0..n)
            .flat_map(|m| (0..n).map(move |l| (m, l)))
            .map(|(m, l)| meson_block_cnots(n, m, l))
            .sum();
        assert_eq!(total, n * n * n + 10 * n * n + 2 * n);
    }

    #[test]
    fn qasm_and_gate_list_render() {
        let c = gs_circuit(&spec(), &GsParams::single_layer(-0.34, 3.66)).unwrap();
        let qasm = c.to_qasm();
        assert!(qasm.starts_with("OPENQASM 2.0;"));
        assert!(qasm.contains("qreg q[12];"));
        assert!(qasm.contains("cx q["));
        let list = c.to_gate_list();
        assert_eq!(list.lines().count(), c.gates.len());
        assert!(list.lines().any(|l| l.starts_with("cnot ")));
        let js: serde_json::Value = serde_json::from_str(&c.metadata_json()).unwrap();
        assert_eq!(js["counts"]["cnot"], 36);
    }
}
