//! Statevector simulation of one-qubit teleportation over an `α|01⟩ + β|10⟩`
//! resource, and the state preparation for two-qubit gate teleportation.
//!
//! Registers are small (≤ 12 qubits) dense vectors. The first label is the
//! most significant bit of the basis index, so for labels `[Ã, A, B]` the
//! amplitude of `|010⟩` sits at index 2.

use std::fmt;

use nalgebra::{Matrix2, Matrix4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::dynamics::{ser_complex, C64};
use crate::error::{invalid, Error, Result};

pub const MAX_QUBITS: usize = 12;
pub const UNITARY_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-12;

/// Qubit being teleported.
pub const INPUT: &str = "Ã";
/// Alice's half of the resource (first chain site).
pub const ALICE: &str = "A";
/// Bob's half of the resource (last chain site).
pub const BOB: &str = "B";
/// Bob's local partner qubit in gate teleportation.
pub const BOB_PARTNER: &str = "B̃";

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense pure state of a labelled qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitRegister {
    labels: Vec<String>,
    amplitudes: Vec<C64>,
}

impl QubitRegister {
    pub fn new(labels: Vec<String>, amplitudes: Vec<C64>) -> Result<Self> {
        let n = labels.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::ResourceLimit {
                what: "register qubits",
                limit: MAX_QUBITS,
                requested: n,
            });
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return invalid(format!("duplicate qubit label {l}"));
            }
        }
        if amplitudes.len() != 1 << n {
            return invalid(format!(
                "{} amplitudes for {n} qubits (expected {})",
                amplitudes.len(),
                1usize << n
            ));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return invalid(format!("register state is not normalized (norm² = {norm})"));
        }
        Ok(Self { labels, amplitudes })
    }

    /// Single-qubit state `a|0⟩ + b|1⟩`.
    pub fn qubit(label: &str, a: C64, b: C64) -> Result<Self> {
        Self::new(vec![label.to_string()], vec![a, b])
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Amplitude of the basis state spelled as a bit string in label order.
    pub fn amplitude_of(&self, bits: &str) -> C64 {
        let idx = usize::from_str_radix(bits, 2).expect("bit string");
        self.amplitudes[idx]
    }

    /// `self ⊗ other`, labels concatenated.
    pub fn tensor(&self, other: &QubitRegister) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|&x| other.amplitudes.iter().map(move |&y| x * y))
            .collect();
        Self::new(labels, amplitudes)
    }

    fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown qubit label {label}")))
    }

    /// Bit mask of the named qubit in a basis index.
    fn mask(&self, label: &str) -> Result<usize> {
        Ok(1 << (self.n_qubits() - 1 - self.position(label)?))
    }

    fn apply_one(&mut self, q: usize, m: &Matrix2<C64>) {
        for s in 0..self.amplitudes.len() {
            if s & q == 0 {
                let (a0, a1) = (self.amplitudes[s], self.amplitudes[s | q]);
                self.amplitudes[s] = m[(0, 0)] * a0 + m[(0, 1)] * a1;
                self.amplitudes[s | q] = m[(1, 0)] * a0 + m[(1, 1)] * a1;
            }
        }
    }

    fn apply_two(&mut self, hi: usize, lo: usize, m: &Matrix4<C64>) {
        for s in 0..self.amplitudes.len() {
            if s & (hi | lo) == 0 {
                let idx = [s, s | lo, s | hi, s | hi | lo];
                let v = idx.map(|i| self.amplitudes[i]);
                for (r, &i) in idx.iter().enumerate() {
                    self.amplitudes[i] = (0..4).map(|c| m[(r, c)] * v[c]).sum();
                }
            }
        }
    }

    /// Apply `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        match gate {
            Gate::H(q) => {
                let q = self.mask(q)?;
                self.apply_one(q, &hadamard());
            }
            Gate::X(q) => {
                let q = self.mask(q)?;
                self.apply_one(q, &pauli_x());
            }
            Gate::Z(q) => {
                let q = self.mask(q)?;
                self.apply_one(q, &pauli_z());
            }
            Gate::U1(q, m) => {
                check_unitary(m.as_slice(), 2)?;
                let q = self.mask(q)?;
                self.apply_one(q, m);
            }
            Gate::Cnot { control, target } => {
                let (c, t) = self.distinct_masks(control, target)?;
                self.apply_two(c, t, &cnot());
            }
            Gate::U2(q1, q2, m) => {
                check_unitary(m.as_slice(), 4)?;
                let (hi, lo) = self.distinct_masks(q1, q2)?;
                self.apply_two(hi, lo, m);
            }
        }
        Ok(())
    }

    fn distinct_masks(&self, a: &str, b: &str) -> Result<(usize, usize)> {
        if a == b {
            return invalid(format!("two-qubit gate needs distinct qubits, got {a} twice"));
        }
        Ok((self.mask(a)?, self.mask(b)?))
    }

    /// Reduced density matrix of one qubit.
    pub fn reduced_qubit(&self, label: &str) -> Result<Matrix2<C64>> {
        let q = self.mask(label)?;
        let mut rho = Matrix2::zeros();
        for s in 0..self.amplitudes.len() {
            if s & q == 0 {
                let (a0, a1) = (self.amplitudes[s], self.amplitudes[s | q]);
                rho[(0, 0)] += a0 * a0.conj();
                rho[(0, 1)] += a0 * a1.conj();
                rho[(1, 0)] += a1 * a0.conj();
                rho[(1, 1)] += a1 * a1.conj();
            }
        }
        Ok(rho)
    }
}

fn check_unitary(entries: &[C64], n: usize) -> Result<()> {
    // column-major n×n
    for i in 0..n {
        for j in 0..n {
            let dot: C64 = (0..n)
                .map(|k| entries[k + i * n].conj() * entries[k + j * n])
                .sum();
            let expected = if i == j { 1.0 } else { 0.0 };
            if (dot - expected).norm() > UNITARY_TOL {
                return invalid("gate matrix is not unitary");
            }
        }
    }
    Ok(())
}

pub fn hadamard() -> Matrix2<C64> {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Matrix2::new(h, h, h, -h)
}

pub fn pauli_x() -> Matrix2<C64> {
    Matrix2::new(ZERO, ONE, ONE, ZERO)
}

pub fn pauli_z() -> Matrix2<C64> {
    Matrix2::new(ONE, ZERO, ZERO, -ONE)
}

/// CNOT with the first (high) qubit as control.
pub fn cnot() -> Matrix4<C64> {
    let mut m = Matrix4::zeros();
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(2, 3)] = ONE;
    m[(3, 2)] = ONE;
    m
}

/// Gates addressed by qubit label. For `U2(q1, q2, m)` the row/column index
/// of `m` is `2·bit(q1) + bit(q2)`.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)] // gates are applied one at a time, never stored in bulk
pub enum Gate {
    Cnot { control: String, target: String },
    H(String),
    X(String),
    Z(String),
    U1(String, Matrix2<C64>),
    U2(String, String, Matrix4<C64>),
}

impl Gate {
    pub fn cnot(control: &str, target: &str) -> Self {
        Gate::Cnot {
            control: control.to_string(),
            target: target.to_string(),
        }
    }
}

/// Return `gate` applied to a copy of `state`.
pub fn apply_gate(state: &QubitRegister, gate: &Gate) -> Result<QubitRegister> {
    let mut out = state.clone();
    out.apply(gate)?;
    Ok(out)
}

/// Two-bit measurement result; the high bit belongs to the first measured
/// qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Outcome(u8);

impl Outcome {
    pub const ALL: [Outcome; 4] = [Outcome(0), Outcome(1), Outcome(2), Outcome(3)];

    pub fn new(first: bool, second: bool) -> Self {
        Outcome(((first as u8) << 1) | second as u8)
    }

    pub fn first(self) -> bool {
        self.0 & 2 != 0
    }

    pub fn second(self) -> bool {
        self.0 & 1 != 0
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.first() as u8, self.second() as u8)
    }
}

impl std::str::FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "00" => Ok(Outcome(0)),
            "01" => Ok(Outcome(1)),
            "10" => Ok(Outcome(2)),
            "11" => Ok(Outcome(3)),
            _ => invalid(format!("outcome must be one of 00, 01, 10, 11; got {s}")),
        }
    }
}

impl Serialize for Outcome {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureMode {
    /// All four outcomes with their Born probabilities.
    Enumerate,
    /// One outcome drawn from a ChaCha8 generator seeded with `seed`.
    Sample { seed: u64 },
}

/// One measurement branch. `state` is the collapsed, renormalized register,
/// absent when the outcome has zero probability.
#[derive(Debug, Clone)]
pub struct Branch {
    pub outcome: Outcome,
    pub probability: f64,
    pub state: Option<QubitRegister>,
}

/// Probabilities below this are reported as impossible outcomes.
const ZERO_PROBABILITY: f64 = 1e-14;

/// Projective Z-basis measurement of two qubits.
pub fn measure_two(state: &QubitRegister, q1: &str, q2: &str, mode: MeasureMode) -> Result<Vec<Branch>> {
    let (m1, m2) = state.distinct_masks(q1, q2)?;
    let outcome_of = |s: usize| Outcome::new(s & m1 != 0, s & m2 != 0);
    let mut probs = [0.0; 4];
    for (s, a) in state.amplitudes.iter().enumerate() {
        probs[outcome_of(s).0 as usize] += a.norm_sqr();
    }
    let collapse = |o: Outcome| -> Option<QubitRegister> {
        let p = probs[o.0 as usize];
        if p < ZERO_PROBABILITY {
            return None;
        }
        let scale = 1.0 / p.sqrt();
        let amplitudes = state
            .amplitudes
            .iter()
            .enumerate()
            .map(|(s, &a)| if outcome_of(s) == o { a * scale } else { ZERO })
            .collect();
        Some(QubitRegister {
            labels: state.labels.clone(),
            amplitudes,
        })
    };
    let branch = |o: Outcome| Branch {
        outcome: o,
        probability: probs[o.0 as usize],
        state: collapse(o),
    };
    Ok(match mode {
        MeasureMode::Enumerate => Outcome::ALL.iter().map(|&o| branch(o)).collect(),
        MeasureMode::Sample { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u: f64 = rng.random();
            let total: f64 = probs.iter().sum();
            let mut acc = 0.0;
            let mut pick = Outcome::ALL
                .into_iter()
                .rfind(|o| probs[o.0 as usize] >= ZERO_PROBABILITY)
                .unwrap_or(Outcome(0));
            for o in Outcome::ALL {
                acc += probs[o.0 as usize] / total;
                if u < acc && probs[o.0 as usize] >= ZERO_PROBABILITY {
                    pick = o;
                    break;
                }
            }
            vec![branch(pick)]
        }
    })
}

/// Bob's correction for an `(Ã, A)` outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Correction {
    X,
    I,
    /// `σ_z σ_x`: X first, then Z.
    ZX,
    Z,
}

impl Correction {
    pub fn gates(self, qubit: &str) -> Vec<Gate> {
        let q = qubit.to_string();
        match self {
            Correction::X => vec![Gate::X(q)],
            Correction::I => vec![],
            Correction::ZX => vec![Gate::X(q.clone()), Gate::Z(q)],
            Correction::Z => vec![Gate::Z(q)],
        }
    }
}

impl fmt::Display for Correction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Correction::X => "X",
            Correction::I => "I",
            Correction::ZX => "ZX",
            Correction::Z => "Z",
        })
    }
}

/// Correction table for the `α|01⟩ + β|10⟩` resource.
pub fn correction_for(outcome: Outcome) -> Correction {
    match (outcome.first(), outcome.second()) {
        (false, false) => Correction::X,
        (false, true) => Correction::I,
        (true, false) => Correction::ZX,
        (true, true) => Correction::Z,
    }
}

/// Shared pair `alpha01 |01⟩_AB + alpha10 |10⟩_AB`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawResource")]
pub struct EntangledResource {
    #[serde(serialize_with = "ser_complex")]
    alpha01: C64,
    #[serde(serialize_with = "ser_complex")]
    alpha10: C64,
}

#[derive(Deserialize)]
struct RawResource {
    alpha01: [f64; 2],
    alpha10: [f64; 2],
}

impl TryFrom<RawResource> for EntangledResource {
    type Error = Error;

    fn try_from(raw: RawResource) -> Result<Self> {
        EntangledResource::new(
            C64::new(raw.alpha01[0], raw.alpha01[1]),
            C64::new(raw.alpha10[0], raw.alpha10[1]),
        )
    }
}

impl EntangledResource {
    pub fn new(alpha01: C64, alpha10: C64) -> Result<Self> {
        let norm = alpha01.norm_sqr() + alpha10.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return invalid(format!("resource is not normalized (norm² = {norm})"));
        }
        Ok(Self { alpha01, alpha10 })
    }

    /// `(|01⟩ + |10⟩)/√2`.
    pub fn bell() -> Self {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            alpha01: h,
            alpha10: h,
        }
    }

    /// Rescale an unnormalized pair of amplitudes onto the unit sphere.
    pub fn normalized(alpha01: C64, alpha10: C64) -> Result<Self> {
        let norm = (alpha01.norm_sqr() + alpha10.norm_sqr()).sqrt();
        if norm == 0.0 {
            return invalid("cannot normalize a vanishing resource");
        }
        Ok(Self {
            alpha01: alpha01 / norm,
            alpha10: alpha10 / norm,
        })
    }

    pub fn alpha01(&self) -> C64 {
        self.alpha01
    }

    pub fn alpha10(&self) -> C64 {
        self.alpha10
    }

    pub fn concurrence(&self) -> f64 {
        (2.0 * (self.alpha01 * self.alpha10).norm()).min(1.0)
    }

    fn register(&self) -> QubitRegister {
        QubitRegister {
            labels: vec![ALICE.to_string(), BOB.to_string()],
            amplitudes: vec![ZERO, self.alpha01, self.alpha10, ZERO],
        }
    }
}

fn input_qubit(label: &str, a: C64, b: C64) -> Result<QubitRegister> {
    let norm = a.norm_sqr() + b.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOL {
        return invalid(format!("|a|² + |b|² must be 1, got {norm}"));
    }
    QubitRegister::qubit(label, a, b)
}

/// `(a|0⟩ + b|1⟩)_Ã ⊗ resource_AB` with labels `[Ã, A, B]`.
pub fn prepare_phi1(a: C64, b: C64, resource: &EntangledResource) -> Result<QubitRegister> {
    input_qubit(INPUT, a, b)?.tensor(&resource.register())
}

/// Result of one teleportation branch. `fidelity` is `None` for outcomes that
/// cannot occur.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TeleportRecord {
    pub outcome: Outcome,
    pub probability: f64,
    #[serde(serialize_with = "ser_display")]
    pub correction: Correction,
    pub fidelity: Option<f64>,
}

fn ser_display<S: Serializer>(c: &Correction, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(c)
}

/// `⟨target| ρ |target⟩` for target `a|0⟩ + b|1⟩`.
fn fidelity(rho: &Matrix2<C64>, a: C64, b: C64) -> f64 {
    let t = [a, b];
    let mut f = ZERO;
    for i in 0..2 {
        for j in 0..2 {
            f += t[i].conj() * rho[(i, j)] * t[j];
        }
    }
    f.re.clamp(0.0, 1.0)
}

/// Teleport the state held by `input` onto `bob` using the pair
/// `(alice, bob)`: CNOT(input → alice), H(input), measure `(input, alice)`,
/// apply the tabulated correction to `bob`, and score the result against
/// `a|0⟩ + b|1⟩`. Works on registers carrying extra spectator qubits.
pub fn run_protocol(
    register: &QubitRegister,
    labels: (&str, &str, &str),
    target: (C64, C64),
    mode: MeasureMode,
) -> Result<Vec<TeleportRecord>> {
    let (input, alice, bob) = labels;
    let mut state = register.clone();
    state.apply(&Gate::cnot(input, alice))?;
    state.apply(&Gate::H(input.to_string()))?;
    measure_two(&state, input, alice, mode)?
        .into_iter()
        .map(|branch| {
            let correction = correction_for(branch.outcome);
            let fidelity = match branch.state {
                Some(mut s) => {
                    for g in correction.gates(bob) {
                        s.apply(&g)?;
                    }
                    Some(fidelity(&s.reduced_qubit(bob)?, target.0, target.1))
                }
                None => None,
            };
            Ok(TeleportRecord {
                outcome: branch.outcome,
                probability: branch.probability,
                correction,
                fidelity,
            })
        })
        .collect()
}

/// Full teleportation of `a|0⟩ + b|1⟩` through `resource`.
pub fn teleport(a: C64, b: C64, resource: &EntangledResource, mode: MeasureMode) -> Result<Vec<TeleportRecord>> {
    let phi1 = prepare_phi1(a, b, resource)?;
    run_protocol(&phi1, (INPUT, ALICE, BOB), (a, b), mode)
}

/// `Σ p·F` over the records that carry a fidelity.
pub fn expected_fidelity(records: &[TeleportRecord]) -> f64 {
    records
        .iter()
        .filter_map(|r| r.fidelity.map(|f| r.probability * f))
        .sum()
}

/// Machine-readable summary of a teleportation run.
#[derive(Debug, Clone, Serialize)]
pub struct TeleportReport {
    #[serde(serialize_with = "ser_complex")]
    pub a: C64,
    #[serde(serialize_with = "ser_complex")]
    pub b: C64,
    /// `[alpha01, alpha10]`.
    #[serde(serialize_with = "ser_resource_pair")]
    pub resource: EntangledResource,
    pub records: Vec<TeleportRecord>,
    /// Averaged over all outcomes, also in sample mode.
    pub expected_fidelity: f64,
    pub seed: Option<u64>,
}

fn ser_resource_pair<S: Serializer>(r: &EntangledResource, s: S) -> std::result::Result<S::Ok, S::Error> {
    [[r.alpha01.re, r.alpha01.im], [r.alpha10.re, r.alpha10.im]].serialize(s)
}

/// Run [`teleport`] and package the result.
pub fn teleport_report(a: C64, b: C64, resource: &EntangledResource, mode: MeasureMode) -> Result<TeleportReport> {
    let all = teleport(a, b, resource, MeasureMode::Enumerate)?;
    let (records, seed) = match mode {
        MeasureMode::Enumerate => (all.clone(), None),
        MeasureMode::Sample { seed } => (teleport(a, b, resource, mode)?, Some(seed)),
    };
    Ok(TeleportReport {
        a,
        b,
        resource: *resource,
        records,
        expected_fidelity: expected_fidelity(&all),
        seed,
    })
}

/// `U_{ÃA} U_{B̃B} (a|0⟩ + b|1⟩)_Ã ⊗ resource_AB ⊗ |χ⟩_B̃`, labels
/// `[Ã, A, B, B̃]`. `u_bb` is indexed as `2·bit(B̃) + bit(B)`.
pub fn prepare_gate_state(
    a: C64,
    b: C64,
    chi: (C64, C64),
    u_aa: &Matrix4<C64>,
    u_bb: &Matrix4<C64>,
    resource: &EntangledResource,
) -> Result<QubitRegister> {
    let chi = input_qubit(BOB_PARTNER, chi.0, chi.1)?;
    let mut state = prepare_phi1(a, b, resource)?.tensor(&chi)?;
    state.apply(&Gate::U2(INPUT.into(), ALICE.into(), *u_aa))?;
    state.apply(&Gate::U2(BOB_PARTNER.into(), BOB.into(), *u_bb))?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn phi1_basis_input() {
        let s = prepare_phi1(ONE, ZERO, &EntangledResource::bell()).unwrap();
        assert!((s.amplitude_of("010") - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((s.amplitude_of("001") - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn phi1_superposition_input() {
        let h = c(FRAC_1_SQRT_2);
        let s = prepare_phi1(h, h, &EntangledResource::bell()).unwrap();
        for bits in ["001", "010", "101", "110"] {
            assert!((s.amplitude_of(bits) - c(0.5)).norm() < 1e-15);
        }
    }

    #[test]
    fn product_resource_has_no_entanglement() {
        let r = EntangledResource::new(ONE, ZERO).unwrap();
        assert_eq!(r.concurrence(), 0.0);
        assert!(EntangledResource::new(ONE, ONE).is_err());
    }

    #[test]
    fn unnormalized_input_rejected() {
        assert!(prepare_phi1(ONE, ONE, &EntangledResource::bell()).is_err());
    }

    #[test]
    fn single_qubit_gates() {
        let mut s = QubitRegister::qubit("q", ONE, ZERO).unwrap();
        s.apply(&Gate::X("q".into())).unwrap();
        assert_eq!(s.amplitudes(), &[ZERO, ONE]);
        let start = QubitRegister::qubit("q", c(0.6), C64::new(0.0, 0.8)).unwrap();
        let mut t = start.clone();
        t.apply(&Gate::H("q".into())).unwrap();
        t.apply(&Gate::H("q".into())).unwrap();
        for (x, y) in t.amplitudes().iter().zip(start.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn gate_errors() {
        let s = prepare_phi1(ONE, ZERO, &EntangledResource::bell()).unwrap();
        assert!(apply_gate(&s, &Gate::X("nope".into())).is_err());
        assert!(apply_gate(&s, &Gate::cnot(ALICE, ALICE)).is_err());
        let not_unitary = Matrix2::new(ONE, ONE, ZERO, ONE);
        assert!(apply_gate(&s, &Gate::U1(BOB.into(), not_unitary)).is_err());
        let not_unitary4 = Matrix4::from_diagonal_element(c(2.0));
        assert!(apply_gate(&s, &Gate::U2(BOB.into(), ALICE.into(), not_unitary4)).is_err());
    }

    #[test]
    fn protocol_intermediate_state() {
        let (a, b) = (c(0.6), C64::new(0.0, 0.8));
        let mut s = prepare_phi1(a, b, &EntangledResource::bell()).unwrap();
        s.apply(&Gate::cnot(INPUT, ALICE)).unwrap();
        s.apply(&Gate::H(INPUT.into())).unwrap();
        // |ÃA⟩ ⊗ B-state, each weighted 1/2
        let expected: [(&str, C64, C64); 4] = [
            ("00", b, a),
            ("01", a, b),
            ("10", -b, a),
            ("11", a, -b),
        ];
        for (prefix, b0, b1) in expected {
            let got0 = s.amplitude_of(&format!("{prefix}0"));
            let got1 = s.amplitude_of(&format!("{prefix}1"));
            assert!((got0 - b0 * 0.5).norm() < 1e-12, "{prefix}");
            assert!((got1 - b1 * 0.5).norm() < 1e-12, "{prefix}");
        }
    }

    #[test]
    fn corrections() {
        assert_eq!(correction_for("00".parse().unwrap()), Correction::X);
        assert_eq!(correction_for("01".parse().unwrap()), Correction::I);
        assert_eq!(correction_for("10".parse().unwrap()), Correction::ZX);
        assert_eq!(correction_for("11".parse().unwrap()), Correction::Z);
        assert!("2".parse::<Outcome>().is_err());
    }

    #[test]
    fn product_state_measurement() {
        let s = QubitRegister::new(
            vec!["p".into(), "q".into(), "r".into()],
            vec![c(0.6), c(0.8), ZERO, ZERO, ZERO, ZERO, ZERO, ZERO],
        )
        .unwrap();
        let br = measure_two(&s, "p", "q", MeasureMode::Enumerate).unwrap();
        assert!((br[0].probability - 1.0).abs() < 1e-15);
        assert!(br[1..].iter().all(|b| b.probability == 0.0 && b.state.is_none()));
        let sampled = measure_two(&s, "p", "q", MeasureMode::Sample { seed: 3 }).unwrap();
        assert_eq!(sampled.len(), 1);
        assert_eq!(sampled[0].outcome.to_string(), "00");
    }

    #[test]
    fn bell_teleport_is_deterministic() {
        let (a, b) = (C64::new(0.3, 0.4), C64::new(-0.5, FRAC_1_SQRT_2));
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (a, b) = (a / norm, b / norm);
        let records = teleport(a, b, &EntangledResource::bell(), MeasureMode::Enumerate).unwrap();
        assert_eq!(records.len(), 4);
        for r in &records {
            assert!((r.probability - 0.25).abs() < 1e-12);
            assert!((r.fidelity.unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn correction_order_is_a_global_phase() {
        // ZX = -XZ, so either reading of the table recovers the state
        let (a, b) = (c(0.6), C64::new(0.0, 0.8));
        let mut s = prepare_phi1(a, b, &EntangledResource::bell()).unwrap();
        s.apply(&Gate::cnot(INPUT, ALICE)).unwrap();
        s.apply(&Gate::H(INPUT.into())).unwrap();
        let br = measure_two(&s, INPUT, ALICE, MeasureMode::Enumerate).unwrap();
        let mut xz = br[2].state.clone().unwrap();
        for g in Correction::ZX.gates(BOB) {
            xz.apply(&g).unwrap();
        }
        let mut zx = br[2].state.clone().unwrap();
        zx.apply(&Gate::Z(BOB.into())).unwrap();
        zx.apply(&Gate::X(BOB.into())).unwrap();
        for (p, q) in xz.amplitudes().iter().zip(zx.amplitudes()) {
            assert!((p + q).norm() < 1e-15);
        }
        assert!((fidelity(&xz.reduced_qubit(BOB).unwrap(), a, b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampling_is_reproducible() {
        let h = c(FRAC_1_SQRT_2);
        let r = EntangledResource::bell();
        let first = teleport(h, h, &r, MeasureMode::Sample { seed: 42 }).unwrap();
        for _ in 0..5 {
            assert_eq!(teleport(h, h, &r, MeasureMode::Sample { seed: 42 }).unwrap(), first);
        }
        let outcomes: std::collections::BTreeSet<_> = (0..64)
            .map(|seed| teleport(h, h, &r, MeasureMode::Sample { seed }).unwrap()[0].outcome)
            .collect();
        assert_eq!(outcomes.len(), 4);
    }

    #[test]
    fn identity_gate_preparation() {
        let h = c(FRAC_1_SQRT_2);
        let id = Matrix4::identity();
        let s = prepare_gate_state(h, h, (c(0.6), c(0.8)), &id, &id, &EntangledResource::bell()).unwrap();
        let phi1 = prepare_phi1(h, h, &EntangledResource::bell()).unwrap();
        let expected = phi1.tensor(&QubitRegister::qubit(BOB_PARTNER, c(0.6), c(0.8)).unwrap()).unwrap();
        assert_eq!(s.labels(), expected.labels());
        for (x, y) in s.amplitudes().iter().zip(expected.amplitudes()) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn report_json_shape() {
        let rep = teleport_report(ONE, ZERO, &EntangledResource::bell(), MeasureMode::Enumerate).unwrap();
        let v: serde_json::Value = serde_json::to_value(&rep).unwrap();
        assert_eq!(v["a"], serde_json::json!([1.0, 0.0]));
        assert_eq!(v["records"][0]["outcome"], "00");
        assert_eq!(v["records"][0]["correction"], "X");
        assert_eq!(v["records"].as_array().unwrap().len(), 4);
        assert!(v["seed"].is_null());
        assert_eq!(v["resource"].as_array().unwrap().len(), 2);
    }
}
