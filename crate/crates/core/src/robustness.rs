//! Sensitivity of the Bell pair to coupling errors, and the hardware bound on
//! chain length.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::io::Write;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::chain::CouplingProfile;
use crate::dynamics::{bell_decomposition, concurrence_ab, evolve_center, ser_complex, C64};
use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::teleport::{expected_fidelity, teleport, EntangledResource, MeasureMode};

/// How to corrupt a profile. Swap indices are 1-based coupling indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerturbationSpec {
    Swap(usize, usize),
    /// Multiply every coupling by `1 + ε`, `ε ~ N(0, σ²)`; draws with
    /// `1 + ε ≤ 0` are rejected and redrawn.
    RelativeNoise { sigma: f64, seed: u64 },
}

pub fn perturb(profile: &CouplingProfile, spec: PerturbationSpec) -> Result<CouplingProfile> {
    let mut d = profile.couplings().to_vec();
    match spec {
        PerturbationSpec::Swap(i, j) => {
            let len = d.len();
            if !(1..=len).contains(&i) || !(1..=len).contains(&j) {
                return invalid(format!("swap indices ({i}, {j}) outside 1..={len}"));
            }
            d.swap(i - 1, j - 1);
        }
        PerturbationSpec::RelativeNoise { sigma, seed } => {
            if !(sigma.is_finite() && sigma >= 0.0) {
                return invalid(format!("sigma must be non-negative, got {sigma}"));
            }
            if sigma > 0.0 {
                let normal = Normal::new(0.0, sigma).expect("finite sigma");
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for x in &mut d {
                    let factor = loop {
                        let f = 1.0 + normal.sample(&mut rng);
                        if f > 0.0 {
                            break f;
                        }
                    };
                    *x *= factor;
                }
            }
        }
    }
    profile.with_couplings(d)
}

/// End-pair entanglement after evolving the centre-excited state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub time: f64,
    pub concurrence: f64,
    #[serde(serialize_with = "ser_complex")]
    pub alpha_first: C64,
    #[serde(serialize_with = "ser_complex")]
    pub alpha_last: C64,
    /// Norm of the component outside the end-pair subspace.
    pub residual_norm: f64,
    /// The end-pair block renormalized into a pure resource; absent when
    /// both end amplitudes vanish.
    pub resource: Option<EntangledResource>,
}

pub fn entanglement_at(profile: &CouplingProfile, t: f64) -> Result<EntanglementReport> {
    let state = evolve_center(profile, t)?;
    let bell = bell_decomposition(&state);
    // site 1 excited ↔ |10⟩_AB, site N excited ↔ |01⟩_AB
    let resource = EntangledResource::normalized(bell.alpha_last, bell.alpha_first).ok();
    Ok(EntanglementReport {
        time: t,
        concurrence: concurrence_ab(&state),
        alpha_first: bell.alpha_first,
        alpha_last: bell.alpha_last,
        residual_norm: bell.beta_norm,
        resource,
    })
}

/// [`entanglement_at`] the design time `π/μ` of the profile.
pub fn entanglement_at_t0(profile: &CouplingProfile) -> Result<EntanglementReport> {
    entanglement_at(profile, PI / profile.mu())
}

/// Largest coupling of the engineered odd `n`-site chain at scale `mu`, in
/// closed form.
pub fn d_max_at(n_sites: u64, mu: f64) -> f64 {
    let half = (n_sites - 1) / 2;
    let folded = n_sites.div_ceil(2) as f64;
    let bridge = mu / (2.0 * SQRT_2) * (half as f64).sqrt();
    if half < 2 {
        return bridge;
    }
    let k = (n_sites.div_ceil(2) / 2).clamp(1, half - 1) as f64;
    let interior = 0.5 * mu * (k * (folded - k)).sqrt();
    interior.max(bridge)
}

/// Chain-length bound for a hardware coupling ceiling `g_max` (SI units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub mu: f64,
    pub g_max: f64,
    pub t0: f64,
    /// `⌊8 g_max / μ⌋`.
    pub n_max: u64,
    /// Largest odd chain length not exceeding `n_max`.
    pub largest_odd_chain: Option<u64>,
    /// Peak engineered coupling of that chain.
    pub d_max: Option<f64>,
    /// No chain with at least three sites fits under the bound.
    pub degenerate: bool,
}

impl FeasibilityReport {
    pub fn d_max_at(&self, n_sites: u64) -> f64 {
        d_max_at(n_sites, self.mu)
    }
}

pub fn feasibility(mu: f64, g_max: f64) -> Result<FeasibilityReport> {
    if !(mu.is_finite() && mu > 0.0) {
        return invalid(format!("mu must be positive, got {mu}"));
    }
    if !(g_max.is_finite() && g_max > 0.0) {
        return invalid(format!("g_max must be positive, got {g_max}"));
    }
    let n_max = (8.0 * g_max / mu).floor() as u64;
    let largest_odd_chain = match n_max {
        0..=2 => None,
        n if n % 2 == 1 => Some(n),
        n => Some(n - 1),
    };
    Ok(FeasibilityReport {
        mu,
        g_max,
        t0: PI / mu,
        n_max,
        largest_odd_chain,
        d_max: largest_odd_chain.map(|n| d_max_at(n, mu)),
        degenerate: largest_odd_chain.is_none(),
    })
}

/// Perturbation family for [`sweep_entanglement`].
#[derive(Debug, Clone, PartialEq)]
pub enum SweepFamily {
    /// `trials` independent noise draws.
    RelativeNoise { sigma: f64 },
    /// Every `D_j ↔ D_{j+1}`, one row each.
    AdjacentSwaps,
    /// The listed swaps, one row each.
    Swaps(Vec<(usize, usize)>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub trial: usize,
    pub param: String,
    pub concurrence: f64,
    pub residual_norm: f64,
    /// Teleportation of the probe state through the renormalized resource.
    pub expected_fidelity: Option<f64>,
}

/// State teleported in the sweeps: `(|0⟩ + |1⟩)/√2`.
pub const PROBE_STATE: (C64, C64) = (C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0));

/// Seed of trial `trial` under `master`; independent of evaluation order.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(trial);
    rng.next_u64()
}

/// Teleportation quality of an entanglement report's resource.
pub fn probe_fidelity(report: &EntanglementReport) -> Result<Option<f64>> {
    report
        .resource
        .map(|r| {
            let (a, b) = PROBE_STATE;
            teleport(a, b, &r, MeasureMode::Enumerate).map(|recs| expected_fidelity(&recs))
        })
        .transpose()
}

pub fn sweep_entanglement(
    profile: &CouplingProfile,
    family: &SweepFamily,
    trials: usize,
    seed: u64,
    exec: Exec,
) -> Result<Vec<SweepRow>> {
    if trials == 0 {
        return invalid("trials must be at least 1");
    }
    let specs: Vec<(PerturbationSpec, String)> = match family {
        SweepFamily::RelativeNoise { sigma } => (0..trials)
            .map(|t| {
                let spec = PerturbationSpec::RelativeNoise {
                    sigma: *sigma,
                    seed: trial_seed(seed, t as u64),
                };
                (spec, sigma.to_string())
            })
            .collect(),
        SweepFamily::AdjacentSwaps => (1..profile.couplings().len())
            .map(|j| (PerturbationSpec::Swap(j, j + 1), format!("swap({j},{})", j + 1)))
            .collect(),
        SweepFamily::Swaps(pairs) => pairs
            .iter()
            .map(|&(i, j)| (PerturbationSpec::Swap(i, j), format!("swap({i},{j})")))
            .collect(),
    };
    exec.map_indexed(specs.len(), |trial| {
        let (spec, param) = &specs[trial];
        let perturbed = perturb(profile, *spec)?;
        let report = entanglement_at_t0(&perturbed)?;
        Ok(SweepRow {
            trial,
            param: param.clone(),
            concurrence: report.concurrence,
            residual_norm: report.residual_norm,
            expected_fidelity: probe_fidelity(&report)?,
        })
    })
    .into_iter()
    .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{engineered_couplings, validate_profile, Constraint};

    #[test]
    fn trivial_perturbations() {
        let p = engineered_couplings(9, 1.0).unwrap();
        assert_eq!(perturb(&p, PerturbationSpec::Swap(1, 1)).unwrap(), p);
        let noise = PerturbationSpec::RelativeNoise { sigma: 0.0, seed: 99 };
        assert_eq!(perturb(&p, noise).unwrap(), p);
        assert!(perturb(&p, PerturbationSpec::Swap(0, 2)).is_err());
        assert!(perturb(&p, PerturbationSpec::Swap(2, 9)).is_err());
    }

    #[test]
    fn swap_breaks_structure() {
        let p = engineered_couplings(9, 1.0).unwrap();
        let q = perturb(&p, PerturbationSpec::Swap(2, 4)).unwrap();
        let kinds: Vec<_> = validate_profile(&q).iter().map(|v| v.constraint).collect();
        assert!(kinds.contains(&Constraint::InternalSymmetry));
        assert!(kinds.contains(&Constraint::BridgeCondition));
    }

    #[test]
    fn noise_is_seed_deterministic() {
        let p = engineered_couplings(11, 1.0).unwrap();
        let spec = PerturbationSpec::RelativeNoise { sigma: 0.05, seed: 7 };
        assert_eq!(perturb(&p, spec).unwrap(), perturb(&p, spec).unwrap());
        let other = PerturbationSpec::RelativeNoise { sigma: 0.05, seed: 8 };
        assert_ne!(perturb(&p, spec).unwrap(), perturb(&p, other).unwrap());
    }

    #[test]
    fn heavy_noise_keeps_couplings_positive() {
        let p = engineered_couplings(21, 1.0).unwrap();
        for seed in 0..20 {
            let q = perturb(&p, PerturbationSpec::RelativeNoise { sigma: 2.0, seed }).unwrap();
            assert!(q.couplings().iter().all(|&d| d > 0.0));
        }
    }

    #[test]
    fn engineered_chains_are_maximally_entangled() {
        for n in [3usize, 9] {
            let r = entanglement_at_t0(&engineered_couplings(n, 1.0).unwrap()).unwrap();
            assert!((r.concurrence - 1.0).abs() < 1e-10, "n={n}");
            assert!(r.residual_norm < 1e-9);
            assert!((r.resource.unwrap().concurrence() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn swap_2_4_regression() {
        let p = engineered_couplings(9, 1.0).unwrap();
        let r = entanglement_at_t0(&perturb(&p, PerturbationSpec::Swap(2, 4)).unwrap()).unwrap();
        // first computed value, pinned
        assert!((r.concurrence - SWAP_2_4_CONCURRENCE).abs() < 1e-9, "{}", r.concurrence);
        assert!(r.concurrence < 1.0 - 1e-6);
    }

    const SWAP_2_4_CONCURRENCE: f64 = 0.5878486686285511;

    #[test]
    fn feasibility_values() {
        let f = feasibility(1e4, 7.3e8).unwrap();
        assert_eq!(f.n_max, 584000);
        assert!((f.t0 - 3.1416e-4).abs() / 3.1416e-4 < 5e-3);
        assert_eq!(f.largest_odd_chain, Some(583999));
        let g = feasibility(1.0, 1.0 / 8.0).unwrap();
        assert_eq!(g.n_max, 1);
        assert!(g.degenerate);
        assert!(feasibility(0.0, 1.0).is_err());
        assert!(feasibility(1.0, -1.0).is_err());
    }

    #[test]
    fn closed_form_peak_matches_profile() {
        for n in (3..=61).step_by(2) {
            for mu in [0.5, 1.0, 2.0] {
                let p = engineered_couplings(n, mu).unwrap();
                assert!((d_max_at(n as u64, mu) - p.max_coupling()).abs() < 1e-14 * p.max_coupling().max(1.0));
            }
        }
    }

    #[test]
    fn sweep_shapes() {
        let p = engineered_couplings(9, 1.0).unwrap();
        let rows = sweep_entanglement(&p, &SweepFamily::AdjacentSwaps, 1, 0, Exec::Sequential).unwrap();
        // eight couplings, seven neighbouring pairs
        assert_eq!(rows.len(), 7);
        assert_eq!(rows[0].param, "swap(1,2)");
        let rows = sweep_entanglement(&p, &SweepFamily::RelativeNoise { sigma: 0.0 }, 5, 1, Exec::Sequential).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| (r.concurrence - 1.0).abs() < 1e-10));
        assert!(sweep_entanglement(&p, &SweepFamily::AdjacentSwaps, 0, 0, Exec::Sequential).is_err());
    }

    #[test]
    fn sweep_is_order_independent() {
        let p = engineered_couplings(9, 1.0).unwrap();
        let fam = SweepFamily::RelativeNoise { sigma: 1e-2 };
        let a = sweep_entanglement(&p, &fam, 16, 5, Exec::Sequential).unwrap();
        let b = sweep_entanglement(&p, &fam, 16, 5, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
