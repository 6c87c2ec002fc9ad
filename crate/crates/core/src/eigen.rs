//! Symmetric tridiagonal eigensolver (implicit QL with Wilkinson-type
//! shifts), after the Martin–Wilkinson `tql2` procedure.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::chain::TridiagonalHamiltonian;
use crate::error::{invalid, Error, Result};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues closer than this (relative to the spectral radius) are treated
/// as one cluster when separating parities.
const CLUSTER_RTOL: f64 = 1e-5;

/// Tolerance on the mirror residual used to label eigenvectors.
pub const PARITY_TOL: f64 = 1e-9;

/// Behaviour of an eigenvector under the reflection `j ↦ N + 1 - j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Symmetric,
    Antisymmetric,
    /// Neither relation holds; only happens for chains without mirror
    /// symmetry.
    Indefinite,
}

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
///
/// Each eigenvector is sign-normalized so that its first non-negligible
/// component is positive.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    eigenvalues: Vec<f64>,
    vectors: DMatrix<f64>,
    parity: Vec<Parity>,
}

impl EigenSystem {
    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Matrix `U` whose column `k` is the `k`-th eigenvector.
    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn parity(&self) -> &[Parity] {
        &self.parity
    }

    /// Component `u_{site,k}` with 1-based `site` and 0-based `k`.
    pub fn component(&self, site: usize, k: usize) -> f64 {
        self.vectors[(site - 1, k)]
    }
}

/// Full eigendecomposition of a zero-diagonal symmetric tridiagonal matrix
/// with positive off-diagonal entries.
pub fn eigendecompose(h: &TridiagonalHamiltonian) -> Result<EigenSystem> {
    if h.off_diagonal().iter().any(|&d| d <= 0.0) {
        return invalid("eigendecompose expects positive off-diagonal entries");
    }
    let n = h.dimension();
    let mut diag = vec![0.0; n];
    let mut off = h.off_diagonal().to_vec();
    off.push(0.0);
    let mut z = DMatrix::<f64>::identity(n, n);
    tql2(&mut diag, &mut off, &mut z)?;

    if is_mirror_symmetric(h.off_diagonal()) {
        separate_parities(&h.to_dense(), &mut diag, &mut z);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| diag[k]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = z.column(src).clone_owned();
        let scale = col.amax();
        if let Some(first) = col.iter().copied().find(|x| x.abs() > 1e-12 * scale) {
            if first < 0.0 {
                col.neg_mut();
            }
        }
        vectors.set_column(dst, &col);
    }
    let parity = (0..n).map(|k| classify(&vectors, k)).collect();
    Ok(EigenSystem {
        eigenvalues,
        vectors,
        parity,
    })
}

fn is_mirror_symmetric(off: &[f64]) -> bool {
    let n = off.len();
    (0..n).all(|i| (off[i] - off[n - 1 - i]).abs() <= 1e-12 * off[i].abs().max(off[n - 1 - i].abs()))
}

/// Within clusters of numerically degenerate eigenvalues, rotate the basis
/// onto mirror-symmetric and mirror-antisymmetric vectors. Large engineered
/// chains have symmetric/antisymmetric pairs split by less than machine
/// precision, and the solver returns arbitrary mixtures of them.
fn separate_parities(a: &DMatrix<f64>, values: &mut [f64], z: &mut DMatrix<f64>) {
    let n = values.len();
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| values[x].total_cmp(&values[y]));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] - values[order[end - 1]] <= CLUSTER_RTOL * scale {
            end += 1;
        }
        if end - start > 1 {
            let cols = &order[start..end];
            let mut pairs: Vec<(f64, DVector<f64>)> = Vec::with_capacity(cols.len());
            for sign in [1.0, -1.0] {
                let block = parity_subspace(z, cols, sign);
                if block.is_empty() {
                    continue;
                }
                // Rayleigh-Ritz inside the parity subspace
                let b = DMatrix::from_columns(&block);
                let small = b.transpose() * a * &b;
                let ritz = small.symmetric_eigen();
                for (i, &value) in ritz.eigenvalues.iter().enumerate() {
                    let v = &b * ritz.eigenvectors.column(i);
                    let norm = v.norm();
                    pairs.push((value, v / norm));
                }
            }
            if pairs.len() == cols.len() {
                for (&k, (value, v)) in cols.iter().zip(pairs) {
                    values[k] = value;
                    z.set_column(k, &v);
                }
            }
        }
        start = end;
    }
}

/// Orthonormal basis of the (anti)symmetric projections of the columns
/// `cols` of `z`. The projections have singular values 0 or 1, so pivoted
/// Gram-Schmidt with a 1/2 cutoff recovers the rank exactly.
fn parity_subspace(z: &DMatrix<f64>, cols: &[usize], sign: f64) -> Vec<DVector<f64>> {
    let n = z.nrows();
    let mut candidates: Vec<DVector<f64>> = cols
        .iter()
        .map(|&k| {
            let u = z.column(k);
            DVector::from_fn(n, |j, _| 0.5 * (u[j] + sign * u[n - 1 - j]))
        })
        .collect();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    loop {
        for c in candidates.iter_mut() {
            for b in &basis {
                let overlap = b.dot(c);
                c.axpy(-overlap, b, 1.0);
            }
        }
        let Some((i, norm)) = candidates
            .iter()
            .map(|c| c.norm())
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(&y.1))
        else {
            break;
        };
        if norm < 0.5 {
            break;
        }
        basis.push(candidates.swap_remove(i) / norm);
    }
    basis
}

fn classify(vectors: &DMatrix<f64>, k: usize) -> Parity {
    let n = vectors.nrows();
    let col = vectors.column(k);
    let (mut sym, mut anti) = (0.0f64, 0.0f64);
    for j in 0..n {
        let (a, b) = (col[j], col[n - 1 - j]);
        sym = sym.max((a - b).abs());
        anti = anti.max((a + b).abs());
    }
    if sym <= PARITY_TOL {
        Parity::Symmetric
    } else if anti <= PARITY_TOL {
        Parity::Antisymmetric
    } else {
        Parity::Indefinite
    }
}

/// Implicit QL on `(d, e)` where `e[i]` couples rows `i` and `i + 1` and
/// `e[n-1] = 0`. Accumulates the rotations into `z`.
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut DMatrix<f64>) -> Result<()> {
    let n = d.len();
    let eps = f64::EPSILON;
    let mut shift = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_SWEEPS_PER_EIGENVALUE {
                    return Err(Error::NumericFailure { dimension: n });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                shift += h;

                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let zk1 = z[(k, i + 1)];
                        let zk = z[(k, i)];
                        z[(k, i + 1)] = s * zk + c * zk1;
                        z[(k, i)] = c * zk - s * zk1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += shift;
        e[l] = 0.0;
    }
    Ok(())
}
