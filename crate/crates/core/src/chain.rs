//! Coupling profiles of the nearest-neighbour XX chain and the Hamiltonian
//! matrices they induce.
//!
//! Sites and couplings are 1-indexed in this documentation: coupling `D_j`
//! links sites `j` and `j + 1`. In memory and on disk `couplings[j - 1]`
//! holds `D_j`.
//!
//! The one-excitation block uses `D_j` itself as the off-diagonal entry, so
//! that the closed-form transfer amplitudes and the Bell time `π/μ` hold
//! without rescaling. The dense 2^N oracle is built with the same convention,
//! `H = Σ_j D_j (σ⁺_j σ⁻_{j+1} + σ⁻_j σ⁺_{j+1})`.

use std::f64::consts::SQRT_2;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Relative tolerance for the exact-symmetry checks of engineered profiles.
pub const SYMMETRY_RTOL: f64 = 1e-12;

/// Largest chain accepted by [`full_hilbert_hamiltonian`].
pub const MAX_DENSE_SITES: usize = 12;

/// Nearest-neighbour couplings `D_1 … D_{N-1}` of an odd chain of `N` sites,
/// together with the frequency scale `μ` used to build (or to time) it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile")]
pub struct CouplingProfile {
    n_sites: usize,
    mu: f64,
    couplings: Vec<f64>,
}

#[derive(Deserialize)]
struct RawProfile {
    n_sites: usize,
    mu: f64,
    couplings: Vec<f64>,
}

impl TryFrom<RawProfile> for CouplingProfile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        CouplingProfile::new(raw.n_sites, raw.mu, raw.couplings)
    }
}

fn check_chain_length(n_sites: usize) -> Result<()> {
    if n_sites < 3 {
        return invalid(format!("n must be at least 3, got {n_sites}"));
    }
    if n_sites.is_multiple_of(2) {
        return invalid(format!("n must be odd, got {n_sites}"));
    }
    Ok(())
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu.is_finite() && mu > 0.0) {
        return invalid(format!("mu must be positive, got {mu}"));
    }
    Ok(())
}

impl CouplingProfile {
    /// Build a profile, checking the structural invariants (odd `N ≥ 3`,
    /// `μ > 0`, `N - 1` positive couplings). The engineered-family symmetries
    /// are not enforced here; see [`validate_profile`].
    pub fn new(n_sites: usize, mu: f64, couplings: Vec<f64>) -> Result<Self> {
        check_chain_length(n_sites)?;
        check_mu(mu)?;
        if couplings.len() != n_sites - 1 {
            return invalid(format!(
                "expected {} couplings for {} sites, got {}",
                n_sites - 1,
                n_sites,
                couplings.len()
            ));
        }
        if let Some((j, d)) = couplings
            .iter()
            .enumerate()
            .find(|(_, d)| !(d.is_finite() && **d > 0.0))
        {
            return invalid(format!("coupling D_{} must be positive, got {d}", j + 1));
        }
        Ok(Self {
            n_sites,
            mu,
            couplings,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    /// `D_j` with 1-based `j`.
    pub fn coupling(&self, j: usize) -> f64 {
        self.couplings[j - 1]
    }

    /// Index of the central site, `(N + 1) / 2`, 1-based.
    pub fn center_site(&self) -> usize {
        self.n_sites.div_ceil(2)
    }

    /// Number of sites of the folded chain, `(N + 1) / 2`.
    pub fn halved_sites(&self) -> usize {
        self.n_sites.div_ceil(2)
    }

    /// Same couplings under a different `μ`.
    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::new(self.n_sites, mu, self.couplings.clone())
    }

    /// Same `N` and `μ` with new couplings.
    pub fn with_couplings(&self, couplings: Vec<f64>) -> Result<Self> {
        Self::new(self.n_sites, self.mu, couplings)
    }

    pub fn max_coupling(&self) -> f64 {
        self.couplings.iter().copied().fold(f64::MIN, f64::max)
    }

    /// True when the couplings coincide with [`engineered_couplings`] for this
    /// profile's `N` and `μ` (relative tolerance [`SYMMETRY_RTOL`]).
    pub fn is_engineered(&self) -> bool {
        let reference = match engineered_couplings(self.n_sites, self.mu) {
            Ok(p) => p,
            Err(_) => return false,
        };
        self.couplings
            .iter()
            .zip(reference.couplings())
            .all(|(a, b)| close(*a, *b))
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= SYMMETRY_RTOL * a.abs().max(b.abs())
}

/// Engineered couplings for an odd chain of `n_sites` sites.
///
/// The first half is `D_k = (μ/2)·√(k((N+1)/2 - k))` for `k < (N-1)/2`, with
/// the bridge coupling `D_{(N-1)/2} = μ/(2√2)·√((N-1)/2)`; the second half is
/// the mirror image.
pub fn engineered_couplings(n_sites: usize, mu: f64) -> Result<CouplingProfile> {
    check_chain_length(n_sites)?;
    check_mu(mu)?;
    let half_len = (n_sites - 1) / 2;
    let folded = n_sites.div_ceil(2) as f64;
    let mut couplings = vec![0.0; n_sites - 1];
    for k in 1..=half_len {
        let d = if k < half_len {
            let k = k as f64;
            0.5 * mu * (k * (folded - k)).sqrt()
        } else {
            mu / (2.0 * SQRT_2) * (half_len as f64).sqrt()
        };
        couplings[k - 1] = d;
        couplings[n_sites - 1 - k] = d;
    }
    CouplingProfile::new(n_sites, mu, couplings)
}

/// Which structural relation of the engineered family is broken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// `D_{N-i} = D_i`.
    MirrorSymmetry,
    /// `D_{(N-1)/2 - k + 1} = D_k` for `2 ≤ k ≤ ⌊(N-1)/4⌋`.
    InternalSymmetry,
    /// `D_{(N-1)/2} = D_1 / √2`.
    BridgeCondition,
}

/// One violated relation: the two coupling indices involved (1-based) and
/// the absolute residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: Constraint,
    pub indices: (usize, usize),
    pub residual: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j) = self.indices;
        match self.constraint {
            Constraint::MirrorSymmetry => write!(f, "mirror symmetry D_{j} = D_{i}")?,
            Constraint::InternalSymmetry => write!(f, "internal symmetry D_{j} = D_{i}")?,
            Constraint::BridgeCondition => write!(f, "bridge condition D_{j} = D_{i}/sqrt(2)")?,
        }
        write!(f, " violated (residual {:e})", self.residual)
    }
}

/// Check the three engineered-family relations. Never fails; an empty list
/// means the profile has the full symmetry of the engineered family.
///
/// For `N = 3` the bridge relation would relate `D_1` to itself and is not
/// checked.
pub fn validate_profile(profile: &CouplingProfile) -> Vec<Violation> {
    let n = profile.n_sites();
    let half = (n - 1) / 2;
    let d = |j: usize| profile.coupling(j);
    let mut out = Vec::new();
    let mut check = |constraint, indices: (usize, usize), lhs: f64, rhs: f64| {
        if !close(lhs, rhs) {
            out.push(Violation {
                constraint,
                indices,
                residual: (lhs - rhs).abs(),
            });
        }
    };
    for i in 1..=half {
        check(Constraint::MirrorSymmetry, (i, n - i), d(n - i), d(i));
    }
    for k in 2..=half / 2 {
        let partner = half - k + 1;
        check(Constraint::InternalSymmetry, (k, partner), d(partner), d(k));
    }
    if half >= 2 {
        check(Constraint::BridgeCondition, (1, half), d(half), d(1) / SQRT_2);
    }
    out
}

/// Real symmetric tridiagonal matrix with zero diagonal, stored by its
/// off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalHamiltonian {
    off_diagonal: Vec<f64>,
}

impl TridiagonalHamiltonian {
    pub fn new(off_diagonal: Vec<f64>) -> Result<Self> {
        if off_diagonal.is_empty() {
            return invalid("tridiagonal matrix needs at least one off-diagonal entry");
        }
        if off_diagonal.iter().any(|d| !d.is_finite()) {
            return invalid("off-diagonal entries must be finite");
        }
        Ok(Self { off_diagonal })
    }

    pub fn dimension(&self) -> usize {
        self.off_diagonal.len() + 1
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dimension();
        let mut m = DMatrix::zeros(n, n);
        for (j, &d) in self.off_diagonal.iter().enumerate() {
            m[(j, j + 1)] = d;
            m[(j + 1, j)] = d;
        }
        m
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn norm_inf(&self) -> f64 {
        let e = &self.off_diagonal;
        (0..self.dimension())
            .map(|i| {
                let left = if i > 0 { e[i - 1].abs() } else { 0.0 };
                let right = e.get(i).map_or(0.0, |d| d.abs());
                left + right
            })
            .fold(0.0, f64::max)
    }
}

/// The N×N one-excitation block: off-diagonal entry `j` is `D_j`.
pub fn one_excitation_hamiltonian(profile: &CouplingProfile) -> TridiagonalHamiltonian {
    TridiagonalHamiltonian {
        off_diagonal: profile.couplings().to_vec(),
    }
}

/// The `(N+1)/2`-site chain obtained by folding a symmetric chain about its
/// centre. Its couplings are `D_1 … D_{(N-1)/2 - 1}` followed by
/// `√2·D_{(N-1)/2}`, which equals `D_1` under the bridge condition.
pub fn halved_hamiltonian(profile: &CouplingProfile) -> Result<TridiagonalHamiltonian> {
    let violations = validate_profile(profile);
    if let Some(v) = violations.first() {
        return Err(Error::PreconditionViolation(format!(
            "halved chain needs a symmetric engineered profile: {v}"
        )));
    }
    let half = (profile.n_sites() - 1) / 2;
    let mut off: Vec<f64> = profile.couplings()[..half - 1].to_vec();
    off.push(SQRT_2 * profile.coupling(half));
    TridiagonalHamiltonian::new(off)
}

/// Index of the basis state with only `site` (1-based) excited, for an
/// `n`-qubit register in which site 1 is the most significant bit.
pub fn one_excitation_index(n_sites: usize, site: usize) -> usize {
    1 << (n_sites - site)
}

/// Dense XX Hamiltonian on the full `2^N` space for the given couplings
/// (`N = couplings.len() + 1`). Site 1 is the most significant bit.
pub fn full_hilbert_hamiltonian(couplings: &[f64]) -> Result<DMatrix<f64>> {
    let n = couplings.len() + 1;
    if n > MAX_DENSE_SITES {
        return Err(Error::ResourceLimit {
            what: "dense Hilbert-space sites",
            limit: MAX_DENSE_SITES,
            requested: n,
        });
    }
    let dim = 1usize << n;
    let mut h = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        for (j, &d) in couplings.iter().enumerate() {
            let mask = (1 << (n - 1 - j)) | (1 << (n - 2 - j));
            let bits = s & mask;
            if bits != 0 && bits != mask {
                h[(s ^ mask, s)] += d;
            }
        }
    }
    Ok(h)
}

/// Diagonal of the total excitation-number operator on `n` qubits.
pub fn excitation_numbers(n_sites: usize) -> Vec<f64> {
    (0..1usize << n_sites)
        .map(|s| s.count_ones() as f64)
        .collect()
}
