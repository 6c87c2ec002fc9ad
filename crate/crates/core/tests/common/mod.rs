//! Reference computations that share no code path with the library: dense
//! Taylor propagators, explicit Kronecker-product circuits and the Wootters
//! concurrence formula.
#![allow(dead_code)]

use nalgebra::{Complex, DMatrix, DVector, Matrix4};

pub type C = Complex<f64>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Engineered couplings evaluated term by term.
pub fn engineered_scalar(n: usize, mu: f64) -> Vec<f64> {
    let m = (n + 1) as f64 / 2.0;
    let half = (n - 1) / 2;
    let mut first = Vec::new();
    for k in 1..half {
        let k = k as f64;
        first.push(mu / 2.0 * (k * (m - k)).sqrt());
    }
    first.push(mu / (2.0 * 2f64.sqrt()) * ((n - 1) as f64 / 2.0).sqrt());
    let mut full = first.clone();
    full.extend(first.iter().rev());
    full
}

/// Sparse matrix as (row, col, value) triplets.
pub struct Sparse {
    pub dim: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl Sparse {
    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut entries = Vec::new();
        for r in 0..m.nrows() {
            for col in 0..m.ncols() {
                if m[(r, col)] != 0.0 {
                    entries.push((r, col, m[(r, col)]));
                }
            }
        }
        Sparse { dim: m.nrows(), entries }
    }

    fn apply(&self, v: &[C]) -> Vec<C> {
        let mut out = vec![C::new(0.0, 0.0); self.dim];
        for &(r, col, x) in &self.entries {
            out[r] += v[col] * x;
        }
        out
    }

    fn norm_bound(&self) -> f64 {
        let mut rows = vec![0.0; self.dim];
        for &(r, _, x) in &self.entries {
            rows[r] += x.abs();
        }
        rows.into_iter().fold(0.0, f64::max)
    }
}

/// `exp(-iHt) v` by a truncated Taylor series on short sub-steps.
pub fn taylor_propagate(h: &Sparse, v: &[C], t: f64) -> Vec<C> {
    let bound = h.norm_bound() * t.abs();
    let steps = (bound / 0.25).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let mut state = v.to_vec();
    for _ in 0..steps {
        let mut term = state.clone();
        let mut acc = state.clone();
        for k in 1..40 {
            let hv = h.apply(&term);
            let factor = C::new(0.0, -dt / k as f64);
            term = hv.iter().map(|x| x * factor).collect();
            for (a, b) in acc.iter_mut().zip(&term) {
                *a += b;
            }
            if term.iter().map(|x| x.norm()).fold(0.0, f64::max) < 1e-20 {
                break;
            }
        }
        state = acc;
    }
    state
}

/// Dense tridiagonal matrix from its off-diagonal.
pub fn tridiagonal(off: &[f64]) -> DMatrix<f64> {
    let n = off.len() + 1;
    let mut m = DMatrix::zeros(n, n);
    for (j, &d) in off.iter().enumerate() {
        m[(j, j + 1)] = d;
        m[(j + 1, j)] = d;
    }
    m
}

/// `⟨to| exp(-iHt) |from⟩` (1-based) for a tridiagonal chain via Taylor.
pub fn dense_transition(off: &[f64], to: usize, from: usize, t: f64) -> C {
    let h = Sparse::from_dense(&tridiagonal(off));
    let mut v = vec![C::new(0.0, 0.0); off.len() + 1];
    v[from - 1] = C::new(1.0, 0.0);
    taylor_propagate(&h, &v, t)[to - 1]
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn wootters(rho: &Matrix4<C>) -> f64 {
    let sy = nalgebra::Matrix2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0));
    let yy = sy.kronecker(&sy);
    let rho_tilde = yy * rho.conjugate() * yy;
    let eig = rho.symmetric_eigen();
    let sqrt_rho = eig.eigenvectors
        * Matrix4::from_diagonal(&eig.eigenvalues.map(|x| c(x.max(0.0).sqrt(), 0.0)))
        * eig.eigenvectors.adjoint();
    let m = sqrt_rho * rho_tilde * sqrt_rho;
    let m = (m + m.adjoint()) * c(0.5, 0.0);
    let mut lambdas: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().map(|x| x.max(0.0).sqrt()).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}

/// Reduced density matrix of the end pair (A = site 1, B = site N) for a
/// one-excitation pure state, basis `|AB⟩ = 00, 01, 10, 11`.
pub fn end_pair_density(amps: &[C]) -> Matrix4<C> {
    let n = amps.len();
    let (a1, an) = (amps[0], amps[n - 1]);
    let rest: f64 = amps[1..n - 1].iter().map(|a| a.norm_sqr()).sum();
    let psi = nalgebra::Vector4::new(c(0.0, 0.0), an, a1, c(0.0, 0.0));
    let mut rho = psi * psi.adjoint();
    rho[(0, 0)] += c(rest, 0.0);
    rho
}

pub fn kron(mats: &[DMatrix<C>]) -> DMatrix<C> {
    mats.iter()
        .skip(1)
        .fold(mats[0].clone(), |acc, m| acc.kronecker(m))
}

pub fn id2() -> DMatrix<C> {
    DMatrix::identity(2, 2)
}

pub fn x2() -> DMatrix<C> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn z2() -> DMatrix<C> {
    DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

pub fn h2() -> DMatrix<C> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)])
}

pub fn proj(bit: usize) -> DMatrix<C> {
    let mut p = DMatrix::zeros(2, 2);
    p[(bit, bit)] = c(1.0, 0.0);
    p
}

/// Teleportation of `a|0⟩ + b|1⟩` over `alpha01|01⟩ + alpha10|10⟩` with
/// explicit 8×8 operators. Returns `(probability, fidelity)` per outcome in
/// the order 00, 01, 10, 11.
pub fn brute_force_teleport(a: C, b: C, alpha01: C, alpha10: C) -> Vec<(f64, f64)> {
    let input = DVector::from_vec(vec![a, b]);
    let pair = DVector::from_vec(vec![c(0.0, 0.0), alpha01, alpha10, c(0.0, 0.0)]);
    let psi = input.kronecker(&pair);
    let cnot = kron(&[proj(0), id2(), id2()]) + kron(&[proj(1), x2(), id2()]);
    let had = kron(&[h2(), id2(), id2()]);
    let corrections = [x2(), id2(), z2() * x2(), z2()];
    let mut out = Vec::new();
    for (o, corr) in corrections.iter().enumerate() {
        let p = kron(&[proj(o >> 1), proj(o & 1), id2()]);
        let full = kron(&[id2(), id2(), corr.clone()]) * &p * &had * &cnot;
        let phi = &full * &psi;
        let prob = phi.norm_squared();
        let fid = if prob > 1e-14 {
            let bob = [phi[o << 1], phi[(o << 1) | 1]];
            let overlap = a.conj() * bob[0] + b.conj() * bob[1];
            overlap.norm_sqr() / prob
        } else {
            f64::NAN
        };
        out.push((prob, fid));
    }
    out
}
