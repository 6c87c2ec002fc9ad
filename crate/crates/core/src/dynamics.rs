//! Time evolution in the one-excitation sector, the Bell decomposition of the
//! evolved state, and the closed-form transfer amplitudes of the engineered
//! chain.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::io::Write;

use nalgebra::Complex;
use serde::Serialize;

use crate::chain::{one_excitation_hamiltonian, CouplingProfile};
use crate::eigen::{eigendecompose, EigenSystem, Parity};
use crate::error::{invalid, Result};
use crate::exec::Exec;

pub type C64 = Complex<f64>;

/// Norm tolerance for user-supplied site states.
pub const NORM_TOL: f64 = 1e-12;

/// One-excitation pure state: `amplitudes[j - 1]` is the amplitude of `|j⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteAmplitudeState {
    amplitudes: Vec<C64>,
}

impl SiteAmplitudeState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return invalid("state needs at least one site");
        }
        let norm = norm_sqr(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return invalid(format!("state is not normalized (norm² = {norm})"));
        }
        Ok(Self { amplitudes })
    }

    /// `|site⟩`, 1-based.
    pub fn basis(n_sites: usize, site: usize) -> Result<Self> {
        if site == 0 || site > n_sites {
            return invalid(format!("site {site} outside 1..={n_sites}"));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); n_sites];
        amplitudes[site - 1] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    /// Excitation on the central site of an odd chain.
    pub fn center_excited(n_sites: usize) -> Result<Self> {
        Self::basis(n_sites, n_sites.div_ceil(2))
    }

    pub fn n_sites(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Amplitude of `|site⟩`, 1-based.
    pub fn amplitude(&self, site: usize) -> C64 {
        self.amplitudes[site - 1]
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }
}

/// Complex numbers serialize as `[re, im]`.
pub(crate) fn ser_complex<S: serde::Serializer>(c: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [c.re, c.im].serialize(s)
}

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// Split of a site state into the end-pair component and the rest:
/// `a_1 |10⟩_AB + a_N |01⟩_AB` (interior in the ground state) plus a residual
/// of norm `beta_norm`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellDecomposition {
    #[serde(serialize_with = "ser_complex")]
    pub alpha_first: C64,
    #[serde(serialize_with = "ser_complex")]
    pub alpha_last: C64,
    pub beta_norm: f64,
    /// `arg(a_1)`, or 0 when `a_1` vanishes.
    pub phase: f64,
}

/// `U diag(e^{-iλt}) Uᵀ ψ`.
pub fn evolve(eig: &EigenSystem, initial: &SiteAmplitudeState, t: f64) -> Result<SiteAmplitudeState> {
    let n = eig.dimension();
    if initial.n_sites() != n {
        return invalid(format!(
            "state has {} sites but the Hamiltonian has dimension {n}",
            initial.n_sites()
        ));
    }
    let u = eig.vectors();
    let psi = initial.amplitudes();
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (k, &lambda) in eig.eigenvalues().iter().enumerate() {
        let col = u.column(k);
        let overlap: C64 = col.iter().zip(psi).map(|(&u, &a)| a * u).sum();
        let c = overlap * C64::from_polar(1.0, -lambda * t);
        for (o, &u) in out.iter_mut().zip(col.iter()) {
            *o += c * u;
        }
    }
    Ok(SiteAmplitudeState { amplitudes: out })
}

/// `⟨to| e^{-iHt} |from⟩` (1-based sites) as a spectral sum.
pub fn transition_amplitude(eig: &EigenSystem, to: usize, from: usize, t: f64) -> C64 {
    spectral_sum(eig, to, from, t, |_| true)
}

fn spectral_sum(
    eig: &EigenSystem,
    to: usize,
    from: usize,
    t: f64,
    keep: impl Fn(usize) -> bool,
) -> C64 {
    eig.eigenvalues()
        .iter()
        .enumerate()
        .filter(|(k, _)| keep(*k))
        .map(|(k, &lambda)| {
            C64::from_polar(eig.component(to, k) * eig.component(from, k), -lambda * t)
        })
        .sum()
}

fn center(eig: &EigenSystem) -> usize {
    eig.dimension().div_ceil(2)
}

/// `⟨1| e^{-iHt} |(N+1)/2⟩`.
pub fn center_to_end_amplitude(eig: &EigenSystem, t: f64) -> C64 {
    transition_amplitude(eig, 1, center(eig), t)
}

/// `⟨N| e^{-iHt} |(N+1)/2⟩`.
pub fn center_to_far_end_amplitude(eig: &EigenSystem, t: f64) -> C64 {
    transition_amplitude(eig, eig.dimension(), center(eig), t)
}

/// [`center_to_end_amplitude`] restricted to mirror-symmetric eigenvectors.
pub fn center_to_end_symmetric_only(eig: &EigenSystem, t: f64) -> C64 {
    spectral_sum(eig, 1, center(eig), t, |k| {
        eig.parity()[k] == Parity::Symmetric
    })
}

/// `(-i)^m` without rounding error.
fn minus_i_pow(m: usize) -> C64 {
    match m % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, -1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 1.0),
    }
}

/// `(-i sin(μt/2))^m`.
fn transfer_power(m: usize, mu: f64, t: f64) -> C64 {
    let s = (0.5 * mu * t).sin();
    minus_i_pow(m) * s.powi(m as i32)
}

/// Closed form of `⟨1| e^{-iHt} |(N+1)/2⟩` for the engineered chain:
/// `(1/√2)(-i sin(μt/2))^{(N-1)/2}`.
pub fn analytic_center_to_end(n_sites: usize, mu: f64, t: f64) -> C64 {
    transfer_power((n_sites - 1) / 2, mu, t) * FRAC_1_SQRT_2
}

/// End-to-end amplitude of the engineered `M`-site chain:
/// `(-i sin(μt/2))^{M-1}`.
pub fn analytic_halved_transfer(m_sites: usize, mu: f64, t: f64) -> C64 {
    transfer_power(m_sites.saturating_sub(1), mu, t)
}

/// Time at which the engineered chain forms the end-to-end Bell pair, `π/μ`.
pub fn bell_time(mu: f64) -> Result<f64> {
    if !(mu.is_finite() && mu > 0.0) {
        return invalid(format!("mu must be positive, got {mu}"));
    }
    Ok(PI / mu)
}

pub fn bell_decomposition(state: &SiteAmplitudeState) -> BellDecomposition {
    let a1 = state.amplitude(1);
    let an = state.amplitude(state.n_sites());
    let n = state.n_sites();
    let beta_sqr: f64 = state.amplitudes()[1..n - 1].iter().map(|a| a.norm_sqr()).sum();
    BellDecomposition {
        alpha_first: a1,
        alpha_last: an,
        beta_norm: beta_sqr.sqrt(),
        phase: if a1.norm() > 0.0 { a1.arg() } else { 0.0 },
    }
}

/// Concurrence of the two end qubits. For a one-excitation pure state the
/// reduced pair state is `|a_1|²`, `|a_N|²` coherences plus a `|00⟩`
/// admixture, which gives `C = 2|a_1 a_N|`.
pub fn concurrence_ab(state: &SiteAmplitudeState) -> f64 {
    let a1 = state.amplitude(1);
    let an = state.amplitude(state.n_sites());
    (2.0 * (a1 * an).norm()).min(1.0)
}

/// Centre-excited initial state evolved to time `t` under `profile`.
pub fn evolve_center(profile: &CouplingProfile, t: f64) -> Result<SiteAmplitudeState> {
    let eig = eigendecompose(&one_excitation_hamiltonian(profile))?;
    evolve(&eig, &SiteAmplitudeState::center_excited(profile.n_sites())?, t)
}

/// Uniform time grid `lo, lo + step, …` up to `hi` inclusive. The last point
/// snaps to `hi` when it is within rounding of it.
pub fn time_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0) {
        return invalid(format!("time step must be positive, got {step}"));
    }
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return invalid(format!("empty time range {lo}:{hi}"));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=count).map(|i| lo + i as f64 * step).collect();
    if let Some(last) = grid.last_mut() {
        if (hi - *last).abs() <= 1e-9 * step {
            *last = hi;
        }
    }
    Ok(grid)
}

/// One row of the amplitude-sweep table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudeRow {
    pub t: f64,
    pub re_amp: f64,
    pub im_amp: f64,
    pub prob: f64,
    pub analytic_prob: Option<f64>,
    pub abs_err: Option<f64>,
    /// Whether the closed-form columns apply to this profile.
    pub engineered: bool,
}

/// `⟨1|e^{-iHt}|c⟩` on a time grid. The closed-form columns are filled only
/// for profiles equal to the engineered couplings of their `(N, μ)`.
pub fn amplitude_sweep(profile: &CouplingProfile, grid: &[f64], exec: Exec) -> Result<Vec<AmplitudeRow>> {
    let eig = eigendecompose(&one_excitation_hamiltonian(profile))?;
    let engineered = profile.is_engineered();
    let (n, mu) = (profile.n_sites(), profile.mu());
    Ok(exec.map_slice(grid, |&t| {
        let amp = center_to_end_amplitude(&eig, t);
        let analytic = engineered.then(|| analytic_center_to_end(n, mu, t));
        AmplitudeRow {
            t,
            re_amp: amp.re,
            im_amp: amp.im,
            prob: amp.norm_sqr(),
            analytic_prob: analytic.map(|a| a.norm_sqr()),
            abs_err: analytic.map(|a| (amp - a).norm()),
            engineered,
        }
    }))
}

/// Write the sweep as CSV with a header row.
pub fn write_amplitude_csv<W: Write>(rows: &[AmplitudeRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
