//! Derivative-free search for mirror-symmetric coupling profiles that put the
//! end pair into a maximally entangled state at some time in a window.
//!
//! The outer loop is a box-constrained Nelder–Mead over the `(N-1)/2`
//! independent couplings; for every candidate the best time is found by a
//! grid scan refined with golden-section search.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chain::{one_excitation_hamiltonian, CouplingProfile};
use crate::dynamics::{center_to_end_amplitude, center_to_far_end_amplitude};
use crate::eigen::{eigendecompose, EigenSystem};
use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::robustness::trial_seed;

/// Objective value below which a search counts as converged.
pub const CONVERGENCE_THRESHOLD: f64 = 1e-10;
pub const DEFAULT_RESTARTS: usize = 8;

const TIME_GRID_POINTS: usize = 512;
const GOLDEN_STEPS: usize = 80;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchProblem {
    pub n_sites: usize,
    /// Scale stored on returned profiles.
    pub mu: f64,
    pub t_window: (f64, f64),
    pub bounds: (f64, f64),
    /// Starting couplings `D_1 … D_{(N-1)/2}` for the first restart; later
    /// restarts start uniformly at random inside the bounds.
    pub initial: Option<Vec<f64>>,
    pub restarts: usize,
}

impl SearchProblem {
    /// Window `[0, 2π/μ]` and bounds `[0.05μ, max(1, N/4)·μ]`.
    pub fn new(n_sites: usize, mu: f64) -> Result<Self> {
        let window = 2.0 * std::f64::consts::PI / mu;
        let hi = mu * (n_sites as f64 / 4.0).max(1.0);
        let p = Self {
            n_sites,
            mu,
            t_window: (0.0, window),
            bounds: (0.05 * mu, hi),
            initial: None,
            restarts: DEFAULT_RESTARTS,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn free_parameters(&self) -> usize {
        (self.n_sites - 1) / 2
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 3 || self.n_sites.is_multiple_of(2) {
            return invalid(format!("n must be odd and at least 3, got {}", self.n_sites));
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return invalid(format!("mu must be positive, got {}", self.mu));
        }
        let (lo, hi) = self.bounds;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
            return invalid(format!("coupling bounds must satisfy 0 < lo < hi, got [{lo}, {hi}]"));
        }
        let (t0, t1) = self.t_window;
        if !(t0.is_finite() && t1.is_finite() && t0 >= 0.0 && t1 > t0) {
            return invalid(format!("time window must satisfy 0 <= t_min < t_max, got [{t0}, {t1}]"));
        }
        if self.restarts == 0 {
            return invalid("at least one restart is required");
        }
        if let Some(x) = &self.initial {
            if x.len() != self.free_parameters() {
                return invalid(format!(
                    "initial point has {} couplings, expected {}",
                    x.len(),
                    self.free_parameters()
                ));
            }
        }
        Ok(())
    }

    /// Mirror-symmetric profile from its first-half couplings.
    pub fn profile_from(&self, half: &[f64]) -> Result<CouplingProfile> {
        let n = self.n_sites;
        let mut d = vec![0.0; n - 1];
        for (i, &x) in half.iter().enumerate() {
            d[i] = x;
            d[n - 2 - i] = x;
        }
        CouplingProfile::new(n, self.mu, d)
    }

    fn clamp(&self, x: &mut [f64]) {
        for v in x {
            *v = v.clamp(self.bounds.0, self.bounds.1);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub profile: CouplingProfile,
    pub best_time: f64,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub restart: usize,
}

fn deviation(eig: &EigenSystem, t: f64) -> f64 {
    let p1 = center_to_end_amplitude(eig, t).norm_sqr();
    let pn = center_to_far_end_amplitude(eig, t).norm_sqr();
    (p1 - 0.5).powi(2) + (pn - 0.5).powi(2)
}

/// `(|⟨1|e^{-iHt}|c⟩|² - ½)² + (|⟨N|e^{-iHt}|c⟩|² - ½)²`.
pub fn objective(profile: &CouplingProfile, t: f64) -> Result<f64> {
    let eig = eigendecompose(&one_excitation_hamiltonian(profile))?;
    Ok(deviation(&eig, t))
}

/// Best time in `window` for a fixed Hamiltonian: grid scan, then
/// golden-section refinement around the best grid point.
pub fn best_time(eig: &EigenSystem, window: (f64, f64)) -> (f64, f64) {
    let (lo, hi) = window;
    let h = (hi - lo) / (TIME_GRID_POINTS - 1) as f64;
    let grid_t = |i: usize| if i + 1 == TIME_GRID_POINTS { hi } else { lo + i as f64 * h };
    let (best_i, _) = (0..TIME_GRID_POINTS)
        .map(|i| (i, deviation(eig, grid_t(i))))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid");
    let mut a = grid_t(best_i.saturating_sub(1));
    let mut b = grid_t((best_i + 1).min(TIME_GRID_POINTS - 1));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (deviation(eig, c), deviation(eig, d));
    for _ in 0..GOLDEN_STEPS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = deviation(eig, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = deviation(eig, d);
        }
    }
    let grid_best = (grid_t(best_i), deviation(eig, grid_t(best_i)));
    let refined = if fc < fd { (c, fc) } else { (d, fd) };
    if refined.1 <= grid_best.1 {
        refined
    } else {
        grid_best
    }
}

/// Objective of a candidate after optimizing the time.
fn evaluate(problem: &SearchProblem, half: &[f64]) -> Result<(f64, f64)> {
    let profile = problem.profile_from(half)?;
    let eig = eigendecompose(&one_excitation_hamiltonian(&profile))?;
    let (t, f) = best_time(&eig, problem.t_window);
    Ok((f, t))
}

struct Vertex {
    x: Vec<f64>,
    f: f64,
    t: f64,
}

fn vertex(problem: &SearchProblem, mut x: Vec<f64>) -> Result<Vertex> {
    problem.clamp(&mut x);
    let (f, t) = evaluate(problem, &x)?;
    Ok(Vertex { x, f, t })
}

fn affine(a: &[f64], b: &[f64], coef: f64) -> Vec<f64> {
    // a + coef·(b - a)
    a.iter().zip(b).map(|(x, y)| x + coef * (y - x)).collect()
}

/// One Nelder–Mead run from `start`.
fn nelder_mead(problem: &SearchProblem, start: Vec<f64>, max_iters: usize, restart: usize) -> Result<SearchResult> {
    let dim = start.len();
    let (lo, hi) = problem.bounds;
    let step = 0.1 * (hi - lo);
    let mut simplex = vec![vertex(problem, start)?];
    let mut iterations = 0;
    if simplex[0].f >= CONVERGENCE_THRESHOLD {
        for i in 0..dim {
            let mut x = simplex[0].x.clone();
            x[i] = if x[i] + step <= hi { x[i] + step } else { x[i] - step };
            simplex.push(vertex(problem, x)?);
        }
        let by_value = |a: &Vertex, b: &Vertex| a.f.partial_cmp(&b.f).unwrap_or(Ordering::Equal);
        while iterations < max_iters {
            simplex.sort_by(by_value);
            if simplex[0].f < CONVERGENCE_THRESHOLD {
                break;
            }
            iterations += 1;
            let worst = &simplex[dim];
            let centroid: Vec<f64> = (0..dim)
                .map(|j| simplex[..dim].iter().map(|v| v.x[j]).sum::<f64>() / dim as f64)
                .collect();
            let reflected = vertex(problem, affine(&worst.x, &centroid, 2.0))?;
            if reflected.f < simplex[0].f {
                let expanded = vertex(problem, affine(&worst.x, &centroid, 3.0))?;
                simplex[dim] = if expanded.f < reflected.f { expanded } else { reflected };
            } else if reflected.f < simplex[dim - 1].f {
                simplex[dim] = reflected;
            } else {
                let contracted = if reflected.f < worst.f {
                    vertex(problem, affine(&centroid, &reflected.x, 0.5))?
                } else {
                    vertex(problem, affine(&centroid, &worst.x, 0.5))?
                };
                if contracted.f < worst.f.min(reflected.f) {
                    simplex[dim] = contracted;
                } else {
                    let best = simplex[0].x.clone();
                    for v in simplex.iter_mut().skip(1) {
                        *v = vertex(problem, affine(&best, &v.x, 0.5))?;
                    }
                }
            }
            let spread = simplex.iter().map(|v| v.f).fold(f64::MIN, f64::max)
                - simplex.iter().map(|v| v.f).fold(f64::MAX, f64::min);
            let size = simplex
                .iter()
                .skip(1)
                .map(|v| v.x.iter().zip(&simplex[0].x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if spread == 0.0 && size < 1e-14 * hi {
                break;
            }
        }
        simplex.sort_by(by_value);
    }
    let best = &simplex[0];
    Ok(SearchResult {
        profile: problem.profile_from(&best.x)?,
        best_time: best.t,
        objective: best.f,
        iterations,
        converged: best.f < CONVERGENCE_THRESHOLD,
        restart,
    })
}

/// Run every restart and return the results in restart order.
pub fn minimize_all(problem: &SearchProblem, seed: u64, max_iters: usize, exec: Exec) -> Result<Vec<SearchResult>> {
    problem.validate()?;
    if max_iters == 0 {
        return invalid("max_iters must be at least 1");
    }
    let (lo, hi) = problem.bounds;
    exec.map_indexed(problem.restarts, |r| {
        let start = match (&problem.initial, r) {
            (Some(x), 0) => x.clone(),
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, r as u64));
                (0..problem.free_parameters())
                    .map(|_| rng.random_range(lo..hi))
                    .collect()
            }
        };
        nelder_mead(problem, start, max_iters, r)
    })
    .into_iter()
    .collect()
}

/// Best restart, ordered by objective then restart index.
pub fn minimize(problem: &SearchProblem, seed: u64, max_iters: usize) -> Result<SearchResult> {
    minimize_with(problem, seed, max_iters, Exec::default())
}

pub fn minimize_with(problem: &SearchProblem, seed: u64, max_iters: usize, exec: Exec) -> Result<SearchResult> {
    let all = minimize_all(problem, seed, max_iters, exec)?;
    Ok(all
        .into_iter()
        .min_by(|a, b| a.objective.total_cmp(&b.objective).then(a.restart.cmp(&b.restart)))
        .expect("at least one restart"))
}
