//! Thin wrappers over faer's dense solvers plus spectrum multiset matching.

use faer::{c64, Mat, MatRef, Side};

use crate::{Error, Result};

fn solver<E: std::fmt::Debug>(e: E) -> Error {
    Error::Solver(format!("{e:?}"))
}

/// Eigenvalues of a real symmetric matrix (lower triangle read), ascending.
pub fn symmetric_eigenvalues(m: MatRef<'_, f64>) -> Result<Vec<f64>> {
    let mut ev = m.self_adjoint_eigenvalues(Side::Lower).map_err(solver)?;
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Eigenpairs of a real symmetric matrix, ascending. Column `k` of the matrix pairs with value `k`.
pub fn symmetric_eigen(m: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(solver)?;
    let s = evd.S().column_vector();
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    let values = order.iter().map(|&k| s[k]).collect();
    let u = evd.U();
    let vectors = Mat::from_fn(m.nrows(), m.ncols(), |i, j| u[(i, order[j])]);
    Ok((values, vectors))
}

/// Eigenpairs of a complex Hermitian matrix, ascending.
pub fn hermitian_eigen(m: MatRef<'_, c64>) -> Result<(Vec<f64>, Mat<c64>)> {
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(solver)?;
    let s = evd.S().column_vector();
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| s[a].re.total_cmp(&s[b].re));
    let values = order.iter().map(|&k| s[k].re).collect();
    let u = evd.U();
    let vectors = Mat::from_fn(m.nrows(), m.ncols(), |i, j| u[(i, order[j])]);
    Ok((values, vectors))
}

/// Eigenvalues of a general real matrix.
pub fn eigenvalues(m: MatRef<'_, f64>) -> Result<Vec<c64>> {
    m.eigenvalues().map_err(solver)
}

/// Eigenvalues of a general complex matrix.
pub fn complex_eigenvalues(m: MatRef<'_, c64>) -> Result<Vec<c64>> {
    m.eigenvalues().map_err(solver)
}

/// Eigenvalues and right eigenvectors of a general real matrix.
pub fn eigen(m: MatRef<'_, f64>) -> Result<(Vec<c64>, Mat<c64>)> {
    let evd = m.eigen().map_err(solver)?;
    let values = evd.S().column_vector().iter().copied().collect();
    Ok((values, evd.U().to_owned()))
}

/// Singular values, descending.
pub fn singular_values(m: MatRef<'_, f64>) -> Result<Vec<f64>> {
    m.singular_values().map_err(solver)
}

/// Orthonormal basis (as columns) of the right null space of `m`: right singular vectors whose
/// singular value is at most `tol`. Uses a thin SVD, so `m` should have at least as many rows
/// as columns.
pub fn null_space(m: MatRef<'_, c64>, tol: f64) -> Result<Mat<c64>> {
    let svd = m.thin_svd().map_err(solver)?;
    let s = svd.S().column_vector();
    let keep: Vec<usize> = (0..s.nrows()).filter(|&k| s[k].re <= tol).collect();
    let v = svd.V();
    Ok(Mat::from_fn(m.ncols(), keep.len(), |i, j| v[(i, keep[j])]))
}

pub fn max_abs_diff(a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).abs());
        }
    }
    worst
}

pub fn max_abs_diff_c(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

pub fn to_complex(m: MatRef<'_, f64>) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| c64::new(m[(i, j)], 0.0))
}

/// `max |(M^† M - I)_{ij}|`.
pub fn isometry_defect(m: MatRef<'_, c64>) -> f64 {
    let g = m.adjoint() * m;
    let mut worst = 0.0f64;
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - c64::new(target, 0.0)).norm());
        }
    }
    worst
}

pub fn inner(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[c64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `|<a|b>|^2` for unit vectors.
pub fn fidelity(a: &[c64], b: &[c64]) -> f64 {
    inner(a, b).norm_sqr()
}

/// Outcome of pairing two spectra element by element.
#[derive(Clone, Debug, Default)]
pub struct SpectrumMatch {
    /// Largest distance between paired eigenvalues.
    pub max_mismatch: f64,
    /// Elements of the left list with no partner within tolerance.
    pub unmatched_left: Vec<c64>,
    /// Elements of the right list left over after pairing.
    pub unmatched_right: Vec<c64>,
}

impl SpectrumMatch {
    pub fn is_equal(&self) -> bool {
        self.unmatched_left.is_empty() && self.unmatched_right.is_empty()
    }

    /// Left is a sub-multiset of right.
    pub fn left_included(&self) -> bool {
        self.unmatched_left.is_empty()
    }

    /// Every leftover element of the right list lies within `tol` of `value`.
    pub fn right_leftovers_near(&self, value: c64, tol: f64) -> bool {
        self.unmatched_right.iter().all(|z| (z - value).norm() <= tol)
    }
}

fn by_re_im(a: &c64, b: &c64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Greedy multiset matching: both lists sorted by (re, im), each left element paired with the
/// nearest unused right element within `tol`.
pub fn match_spectra(left: &[c64], right: &[c64], tol: f64) -> SpectrumMatch {
    let mut l = left.to_vec();
    let mut r = right.to_vec();
    l.sort_by(by_re_im);
    r.sort_by(by_re_im);
    let mut used = vec![false; r.len()];
    let mut out = SpectrumMatch::default();
    for z in l {
        let start = r.partition_point(|w| w.re < z.re - tol);
        let mut best: Option<(usize, f64)> = None;
        for (k, w) in r.iter().enumerate().skip(start) {
            if w.re > z.re + tol {
                break;
            }
            if used[k] {
                continue;
            }
            let d = (w - z).norm();
            if d <= tol && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((k, d));
            }
        }
        match best {
            Some((k, d)) => {
                used[k] = true;
                out.max_mismatch = out.max_mismatch.max(d);
            }
            None => out.unmatched_left.push(z),
        }
    }
    out.unmatched_right = r.into_iter().zip(used).filter(|(_, u)| !u).map(|(w, _)| w).collect();
    out
}

pub fn real_to_complex(values: &[f64]) -> Vec<c64> {
    values.iter().map(|&v| c64::new(v, 0.0)).collect()
}
