//! Statevector execution of circuits, finite-shot sampling, symmetry-based
//! mitigation, and a depolarizing noise channel.
//!
//! Qubit q is bit q of the amplitude index (qubit 0 least significant), so a
//! measured bitstring reads (f₀ b₀ f₁ b₁ … a) left to right under the
//! interleaved layout. Sampling uses a counter-based RNG (ChaCha8) seeded
//! explicitly: identical (circuit, seed) pairs reproduce identical shots.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate};
use crate::model::{GaugeGroup, PhysicalBasis, QubitLayout};
use crate::ops::OperatorSum;
use crate::{CVec, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Full complex amplitude vector over 2^n_qubits computational states.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub n_qubits: usize,
    pub amps: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩.
    pub fn zero_state(n_qubits: usize) -> Self {
        assert!(n_qubits <= 21, "statevector ceiling is 21 qubits");
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Embed a physical-basis vector into the qubit register (ancilla, when
    /// present in the layout, is set to |0⟩).
    pub fn from_physical(
        basis: &PhysicalBasis,
        layout: &QubitLayout,
        v: &CVec,
    ) -> Result<Self> {
        if v.len() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), got: v.len() });
        }
        let mut state = Self {
            n_qubits: layout.n_qubits(),
            amps: vec![ZERO; 1 << layout.n_qubits()],
        };
        for (i, s) in basis.states().iter().enumerate() {
            state.amps[qubit_index_of(basis, layout, s)] = v[i];
        }
        Ok(state)
    }

    /// Project onto the physical subspace at the given ancilla value,
    /// returning the (unnormalized) physical-basis vector and the total
    /// probability captured.
    pub fn to_physical(
        &self,
        basis: &PhysicalBasis,
        layout: &QubitLayout,
        ancilla: Option<u8>,
    ) -> Result<(CVec, f64)> {
        if layout.n_qubits() != self.n_qubits {
            return Err(Error::Layout(format!(
                "layout has {} qubits, state has {}",
                layout.n_qubits(),
                self.n_qubits
            )));
        }
        let mut v = CVec::zeros(basis.len());
        for (i, s) in basis.states().iter().enumerate() {
            let mut idx = qubit_index_of(basis, layout, s);
            if let (Some(a), Some(aq)) = (ancilla, layout.ancilla()) {
                idx |= (a as usize) << aq;
            }
            v[i] = self.amps[idx];
        }
        let captured = v.norm_squared();
        Ok((v, captured))
    }

    fn apply_1q(&mut self, q: usize, u: [[Complex64; 2]; 2]) {
        let step = 1usize << q;
        let dim = self.amps.len();
        let mut base = 0;
        while base < dim {
            for i in base..base + step {
                let j = i | step;
                let (a0, a1) = (self.amps[i], self.amps[j]);
                self.amps[i] = u[0][0] * a0 + u[0][1] * a1;
                self.amps[j] = u[1][0] * a0 + u[1][1] * a1;
            }
            base += 2 * step;
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let (c, t) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }

    pub fn apply_gate(&mut self, g: &Gate) {
        match *g {
            Gate::Hadamard { q } => {
                let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.apply_1q(q, [[s, s], [s, -s]]);
            }
            Gate::PauliX { q } => {
                let one = Complex64::new(1.0, 0.0);
                self.apply_1q(q, [[ZERO, one], [one, ZERO]]);
            }
            Gate::Rz { q, angle } => {
                let e = Complex64::from_polar(1.0, -angle / 2.0);
                self.apply_1q(q, [[e, ZERO], [ZERO, e.conj()]]);
            }
            Gate::Rx { q, angle } => {
                let c = Complex64::new((angle / 2.0).cos(), 0.0);
                let s = Complex64::new(0.0, -(angle / 2.0).sin());
                self.apply_1q(q, [[c, s], [s, c]]);
            }
            Gate::Ry { q, angle } => {
                let c = Complex64::new((angle / 2.0).cos(), 0.0);
                let s = Complex64::new((angle / 2.0).sin(), 0.0);
                self.apply_1q(q, [[c, -s], [s, c]]);
            }
            Gate::Cnot { control, target } => self.apply_cnot(control, target),
            Gate::Phase { q, angle } => {
                let one = Complex64::new(1.0, 0.0);
                self.apply_1q(q, [[one, ZERO], [ZERO, Complex64::from_polar(1.0, angle)]]);
            }
        }
    }
}

/// Index of a classical configuration in the qubit register.
pub fn qubit_index_of(basis: &PhysicalBasis, layout: &QubitLayout, s: &crate::model::BasisState) -> usize {
    let spec = basis.spec();
    let mut idx = 0usize;
    for n in 0..spec.n_sites {
        idx |= (s.fermion(n) as usize) << layout.fermion(n);
        match spec.group {
            GaugeGroup::Z2 => {
                idx |= usize::from(s.links[n] < 0) << layout.link(n);
            }
            GaugeGroup::U1 => {
                let code = (s.links[n] as i32 + spec.cutoff as i32) as usize;
                for b in 0..layout.bits_per_link {
                    idx |= ((code >> b) & 1) << layout.link_bit(n, b);
                }
            }
        }
    }
    idx
}

/// Exact amplitude evolution; preserves the norm.
pub fn run(circuit: &Circuit, initial: &StateVector) -> Result<StateVector> {
    if initial.n_qubits != circuit.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: circuit.n_qubits(),
            got: initial.n_qubits,
        });
    }
    let mut state = initial.clone();
    for g in &circuit.gates {
        state.apply_gate(g);
    }
    Ok(state)
}

/// ⟨ψ|O|ψ⟩ for an operator over the Z2 qubit layout.
pub fn expectation(
    op: &OperatorSum,
    state: &StateVector,
    basis: &PhysicalBasis,
    layout: &QubitLayout,
) -> Result<f64> {
    if basis.spec().group != GaugeGroup::Z2 {
        return Err(Error::InvalidSpec("qubit expectation values are Z2-only".into()));
    }
    let n = basis.spec().n_sites;
    let dim = 1usize << layout.n_qubits();
    if state.amps.len() != dim {
        return Err(Error::Layout("state does not match layout".into()));
    }
    let mut acc = ZERO;
    // ancilla (when present) is untouched by lattice operators
    let lattice_bits = n * 2;
    for i in 0..state.amps.len() {
        if state.amps[i] == ZERO {
            continue;
        }
        let conf = decode_z2(i, n, layout);
        for t in &op.terms {
            if let Some((amp, dst)) = t.apply(&conf, basis.spec().cutoff) {
                let mut j = encode_z2(&dst, layout);
                j |= i >> lattice_bits << lattice_bits;
                acc += state.amps[j].conj() * amp * state.amps[i];
            }
        }
    }
    Ok(acc.re)
}

fn decode_z2(index: usize, n_sites: usize, layout: &QubitLayout) -> crate::model::BasisState {
    let mut occ = 0u32;
    let mut links = vec![0i8; n_sites];
    for n in 0..n_sites {
        occ |= (((index >> layout.fermion(n)) & 1) as u32) << n;
        links[n] = if (index >> layout.link(n)) & 1 == 0 { 1 } else { -1 };
    }
    crate::model::BasisState { occ, links }
}

fn encode_z2(s: &crate::model::BasisState, layout: &QubitLayout) -> usize {
    let mut idx = 0usize;
    for n in 0..layout.n_sites {
        idx |= (s.fermion(n) as usize) << layout.fermion(n);
        idx |= usize::from(s.links[n] < 0) << layout.link(n);
    }
    idx
}

/// Computational-basis measurement outcomes of one sampling run.
#[derive(Debug, Clone)]
pub struct ShotRecord {
    pub n_qubits: usize,
    pub seed: u64,
    /// One basis index per shot.
    pub outcomes: Vec<usize>,
}

impl ShotRecord {
    pub fn n_shots(&self) -> usize {
        self.outcomes.len()
    }

    /// Bitstring of one shot in qubit order (f₀ b₀ f₁ b₁ … a).
    pub fn bitstring(&self, shot: usize) -> String {
        (0..self.n_qubits)
            .map(|q| char::from(b'0' + ((self.outcomes[shot] >> q) & 1) as u8))
            .collect()
    }

    /// CSV rows `shot_index,bitstring`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("shot_index,bitstring\n");
        for i in 0..self.n_shots() {
            out.push_str(&format!("{i},{}\n", self.bitstring(i)));
        }
        out
    }
}

/// Draw i.i.d. computational-basis samples from |amplitudes|².
pub fn sample(state: &StateVector, n_shots: usize, seed: u64) -> Result<ShotRecord> {
    let dev = (state.norm() - 1.0).abs();
    if dev > 1e-8 {
        return Err(Error::NotNormalized(dev));
    }
    let mut cumulative = Vec::with_capacity(state.amps.len());
    let mut acc = 0.0;
    for a in &state.amps {
        acc += a.norm_sqr();
        cumulative.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outcomes = (0..n_shots)
        .map(|_| {
            let r: f64 = rng.gen::<f64>() * total;
            cumulative.partition_point(|&c| c <= r).min(state.amps.len() - 1)
        })
        .collect();
    Ok(ShotRecord { n_qubits: state.n_qubits, seed, outcomes })
}

/// One retained measurement event: physical-basis index plus ancilla value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhysicalEvent {
    pub basis_index: usize,
    pub ancilla: u8,
}

/// Result of symmetry-based mitigation.
#[derive(Debug, Clone)]
pub struct Mitigated {
    /// Normalized probabilities over canonical physical-basis indices.
    pub probabilities: Vec<f64>,
    pub n_shots: usize,
    /// Events inside the physical space (any ancilla value).
    pub n_physical: usize,
    /// Physical events with ancilla = 1 (all physical events when the layout
    /// has no ancilla); these are the ones counted in `probabilities`.
    pub n_ancilla1: usize,
    /// The retained physical events, for resampling.
    pub events: Vec<PhysicalEvent>,
}

/// Keep only Gauss-law-satisfying bitstrings; among those drop ancilla = 0
/// events; renormalize the survivors to unit total probability.
pub fn mitigate(
    record: &ShotRecord,
    basis: &PhysicalBasis,
    layout: &QubitLayout,
) -> Result<Mitigated> {
    if layout.n_qubits() != record.n_qubits {
        return Err(Error::Layout("shot record does not match layout".into()));
    }
    let spec = basis.spec();
    let mut events = Vec::new();
    for &o in &record.outcomes {
        let conf = match spec.group {
            GaugeGroup::Z2 => decode_z2(o, spec.n_sites, layout),
            GaugeGroup::U1 => {
                let mut occ = 0u32;
                let mut links = vec![0i8; spec.n_sites];
                let mut valid = true;
                for n in 0..spec.n_sites {
                    occ |= (((o >> layout.fermion(n)) & 1) as u32) << n;
                    let mut code = 0usize;
                    for b in 0..layout.bits_per_link {
                        code |= ((o >> layout.link_bit(n, b)) & 1) << b;
                    }
                    let l = code as i32 - spec.cutoff as i32;
                    if l.abs() > spec.cutoff as i32 {
                        valid = false;
                        break;
                    }
                    links[n] = l as i8;
                }
                if !valid {
                    continue;
                }
                crate::model::BasisState { occ, links }
            }
        };
        if let Some(i) = basis.position(&conf) {
            let a = match layout.ancilla() {
                Some(aq) => ((o >> aq) & 1) as u8,
                None => 1,
            };
            events.push(PhysicalEvent { basis_index: i, ancilla: a });
        }
    }
    let n_physical = events.len();
    let kept: Vec<&PhysicalEvent> = events.iter().filter(|e| e.ancilla == 1).collect();
    if kept.is_empty() {
        return Err(Error::EmptyEvents);
    }
    let mut probabilities = vec![0.0; basis.len()];
    for e in &kept {
        probabilities[e.basis_index] += 1.0;
    }
    let total = kept.len() as f64;
    for p in probabilities.iter_mut() {
        *p /= total;
    }
    Ok(Mitigated {
        probabilities,
        n_shots: record.n_shots(),
        n_physical,
        n_ancilla1: kept.len(),
        events,
    })
}

/// Depolarizing channel: after every gate, each operand qubit suffers an
/// independent uniformly random Pauli with probability p (p_1q for
/// single-qubit gates, p_2q for CNOTs). A stand-in noise source used only to
/// exercise the mitigation pipeline.
#[derive(Debug, Clone, Copy)]
pub struct Depolarizing {
    pub p_1q: f64,
    pub p_2q: f64,
}

impl Depolarizing {
    pub fn validate(&self) -> Result<()> {
        for p in [self.p_1q, self.p_2q] {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::InvalidSpec(format!("noise probability {p} outside [0, 1)")));
            }
        }
        Ok(())
    }

    /// Sample shots through noisy trajectories (one full statevector
    /// evolution per shot). Deterministic under the seed.
    pub fn sample_noisy(
        &self,
        circuit: &Circuit,
        initial: &StateVector,
        n_shots: usize,
        seed: u64,
    ) -> Result<ShotRecord> {
        self.validate()?;
        if initial.n_qubits != circuit.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: circuit.n_qubits(),
                got: initial.n_qubits,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut outcomes = Vec::with_capacity(n_shots);
        for _ in 0..n_shots {
            let mut state = initial.clone();
            for g in &circuit.gates {
                state.apply_gate(g);
                let p = match g {
                    Gate::Cnot { .. } => self.p_2q,
                    _ => self.p_1q,
                };
                for q in g.operands() {
                    if p > 0.0 && rng.gen::<f64>() < p {
                        let pauli_z = [
                            [Complex64::new(1.0, 0.0), ZERO],
                            [ZERO, Complex64::new(-1.0, 0.0)],
                        ];
                        let pauli_y = [
                            [ZERO, Complex64::new(0.0, -1.0)],
                            [Complex64::new(0.0, 1.0), ZERO],
                        ];
                        match rng.gen_range(0..3) {
                            0 => state.apply_gate(&Gate::PauliX { q }),
                            1 => state.apply_1q(q, pauli_y),
                            _ => state.apply_1q(q, pauli_z),
                        }
                    }
                }
            }
            let r: f64 = rng.gen::<f64>();
            let mut acc = 0.0;
            let mut chosen = state.amps.len() - 1;
            for (i, a) in state.amps.iter().enumerate() {
                acc += a.norm_sqr();
                if r < acc {
                    chosen = i;
                    break;
                }
            }
            outcomes.push(chosen);
        }
        Ok(ShotRecord { n_qubits: initial.n_qubits, seed, outcomes })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{gs_circuit, GsParams};
    use crate::model::{enumerate_physical_basis, LatticeSpec};

    #[test]
    fn gate_actions_match_defining_matrices() {
        // apply each gate to random two-qubit states and compare against the
        // dense 4×4 matrix action
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let gates: Vec<(Gate, Vec<Complex64>)> = vec![
            (Gate::Hadamard { q: 0 }, dense_1q([[h, h], [h, -h]], 0)),
            (
                Gate::Rz { q: 1, angle: 0.7 },
                dense_1q(
                    [
                        [Complex64::from_polar(1.0, -0.35), ZERO],
                        [ZERO, Complex64::from_polar(1.0, 0.35)],
                    ],
                    1,
                ),
            ),
            (
                Gate::Phase { q: 0, angle: -1.2 },
                dense_1q(
                    [[Complex64::new(1.0, 0.0), ZERO], [ZERO, Complex64::from_polar(1.0, -1.2)]],
                    0,
                ),
            ),
        ];
        let mut rng_state = 0x9e3779b97f4a7c15u64;
        let mut rnd = || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((rng_state >> 33) as f64) / (1u64 << 31) as f64 - 1.0
        };
        for (gate, dense) in gates {
            let mut psi = StateVector::zero_state(2);
            for a in psi.amps.iter_mut() {
                *a = Complex64::new(rnd(), rnd());
            }
            let n = psi.norm();
            for a in psi.amps.iter_mut() {
                *a /= n;
            }
            let mut expect = vec![ZERO; 4];
            for (i, row) in expect.iter_mut().enumerate() {
                for j in 0..4 {
                    *row += dense[i * 4 + j] * psi.amps[j];
                }
            }
            let mut got = psi.clone();
            got.apply_gate(&gate);
            for i in 0..4 {
                assert!((got.amps[i] - expect[i]).norm() < 1e-12);
            }
        }
        // CNOT truth table
        let mut s = StateVector::zero_state(2);
        s.apply_gate(&Gate::PauliX { q: 0 });
        s.apply_gate(&Gate::Cnot { control: 0, target: 1 });
        assert!((s.amps[3].norm() - 1.0).abs() < 1e-12);
    }

    fn dense_1q(u: [[Complex64; 2]; 2], q: usize) -> Vec<Complex64> {
        let mut m = vec![ZERO; 16];
        for i in 0..4usize {
            for j in 0..4usize {
                let (bi, bj) = ((i >> q) & 1, (j >> q) & 1);
                let other = 1 - q;
                if (i >> other) & 1 == (j >> other) & 1 {
                    m[i * 4 + j] = u[bi][bj];
                }
            }
        }
        m
    }

    #[test]
    fn empty_circuit_is_identity_and_dimensions_checked() {
        let spec = LatticeSpec::new(GaugeGroup::Z2, 6, 1.0, -0.3, 1).unwrap();
        let c = gs_circuit(&spec, &GsParams::single_layer(0.0, 0.0)).unwrap();
        // θ = 0: output equals the strong-coupling vacuum
        let out = run(&c, &StateVector::zero_state(12)).unwrap();
        let basis = enumerate_physical_basis(&spec).unwrap();
        let layout = QubitLayout::for_spec(&spec, false);
        let vac = crate::model::strong_coupling_vacuum(&spec);
        let idx = qubit_index_of(&basis, &layout, &vac);
        assert!((out.amps[idx].norm() - 1.0).abs() < 1e-12);
        assert!(run(&c, &StateVector::zero_state(13)).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_concentrated_for_basis_states() {
        let mut s = StateVector::zero_state(3);
        s.apply_gate(&Gate::PauliX { q: 2 });
        let r1 = sample(&s, 50, 7).unwrap();
        let r2 = sample(&s, 50, 7).unwrap();
        assert_eq!(r1.outcomes, r2.outcomes);
        assert!(r1.outcomes.iter().all(|&o| o == 4));
        assert_eq!(r1.bitstring(0), "001");
    }

    #[test]
    fn sampling_frequencies_track_probabilities() {
        // 2-qubit superposition sampled 10⁶ times: frequencies within 3σ
        let mut s = StateVector::zero_state(2);
        s.apply_gate(&Gate::Hadamard { q: 0 });
        s.apply_gate(&Gate::Ry { q: 1, angle: 1.1 });
        let p = s.probabilities();
        let r = sample(&s, 1_000_000, 123).unwrap();
        let mut freq = [0.0f64; 4];
        for &o in &r.outcomes {
            freq[o] += 1.0;
        }
        for f in freq.iter_mut() {
            *f /= 1e6;
        }
        for i in 0..4 {
            let sigma = (p[i] * (1.0 - p[i]) / 1e6).sqrt();
            assert!(
                (freq[i] - p[i]).abs() < 3.0 * sigma + 1e-9,
                "bin {i}: {} vs {}",
                freq[i],
                p[i]
            );
        }
    }

    #[test]
    fn depolarizing_p0_matches_noiseless_path() {
        let spec = LatticeSpec::new(GaugeGroup::Z2, 6, 1.0, -0.3, 1).unwrap();
        let c = gs_circuit(&spec, &GsParams::single_layer(-0.3, 1.0)).unwrap();
        let init = StateVector::zero_state(12);
        let noisy = Depolarizing { p_1q: 0.0, p_2q: 0.0 }
            .sample_noisy(&c, &init, 40, 99)
            .unwrap();
        // same RNG stream structure: each trajectory draws one uniform
        let out = run(&c, &init).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for shot in 0..40 {
            let r: f64 = rng.gen();
            let mut acc = 0.0;
            let mut chosen = out.amps.len() - 1;
            for (i, a) in out.amps.iter().enumerate() {
                acc += a.norm_sqr();
                if r < acc {
                    chosen = i;
                    break;
                }
            }
            assert_eq!(noisy.outcomes[shot], chosen);
        }
        assert!(Depolarizing { p_1q: 1.0, p_2q: 0.0 }.validate().is_err());
    }
}
