//! Dense and tridiagonal symmetric eigensolvers, quadrature, root finding
//! and Hermite functions.

use crate::error::{Error, Result};
use serde::Serialize;

/// Relative bisection tolerance for tridiagonal eigenvalues.
pub const BISECTION_RTOL: f64 = 1e-13;
/// Residual tolerance of inverse iteration, relative to the matrix norm.
pub const INVERSE_RESIDUAL_TOL: f64 = 1e-10;
pub const INVERSE_MAX_ITERATIONS: usize = 50;
/// Half-width of the isolation window checked before inverse iteration.
pub const ISOLATION_WINDOW: f64 = 1e-8;
/// Jacobi stops once the off-diagonal Frobenius norm is below this times the full norm.
pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 30;
/// Negative eigenvalues above `-PSD_TOL * ||S||` are clamped by `sym_sqrt`.
pub const PSD_TOL: f64 = 1e-12;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct TriDiag {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
    off_sq: Vec<f64>,
}

impl TriDiag {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidInput(
                "tridiagonal matrix needs n >= 1".into(),
            ));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidInput(format!(
                "offdiag length {} does not match n - 1 = {}",
                offdiag.len(),
                diag.len() - 1
            )));
        }
        if diag.iter().chain(offdiag.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite tridiagonal entry".into()));
        }
        let off_sq = offdiag.iter().map(|e| e * e).collect();
        Ok(Self {
            diag,
            offdiag,
            off_sq,
        })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 {
                self.offdiag[i - 1].abs()
            } else {
                0.0
            };
            let right = if i + 1 < n {
                self.offdiag[i].abs()
            } else {
                0.0
            };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Infinity-norm bound, used to scale residual tolerances.
    pub fn norm(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * v[i];
            if i > 0 {
                acc += self.offdiag[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc += self.offdiag[i] * v[i + 1];
            }
            out[i] = acc;
        }
        out
    }

    fn pivot_guard(&self) -> f64 {
        let emax = self.off_sq.iter().cloned().fold(1.0_f64, f64::max);
        f64::MIN_POSITIVE * emax
    }
}

/// Number of eigenvalues of `t` strictly below `x`.
///
/// Counts negative pivots of the LDLᵀ factorization of `t - x`; pivots that
/// vanish are replaced by a tiny negative value.
pub fn sturm_count(t: &TriDiag, x: f64) -> usize {
    sturm_count_guarded(t, x, t.pivot_guard())
}

fn sturm_count_guarded(t: &TriDiag, x: f64, guard: f64) -> usize {
    let d = &t.diag;
    let e2 = &t.off_sq;
    let mut count = 0;
    let mut q = d[0] - x;
    if q.abs() < guard {
        q = -guard;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        q = (d[i] - x) - e2[i - 1] / q;
        if q.abs() < guard {
            q = -guard;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `count` smallest eigenvalues in ascending order.
pub fn tridiag_eigs(t: &TriDiag, count: usize) -> Result<Vec<f64>> {
    if count == 0 || count > t.len() {
        return Err(Error::InvalidInput(format!(
            "eigenvalue count {count} outside 1..={}",
            t.len()
        )));
    }
    let (lo, hi) = bisection_bounds(t);
    let guard = t.pivot_guard();
    let mut out = Vec::with_capacity(count);
    let mut floor = lo;
    for index in 0..count {
        let value = bisect_index(t, index, floor, hi, guard)?;
        out.push(value);
        floor = value - BISECTION_RTOL * value.abs().max(1.0);
    }
    Ok(out)
}

/// Eigenvalue number `index` (0-based, ascending).
pub fn tridiag_eig_index(t: &TriDiag, index: usize) -> Result<f64> {
    if index >= t.len() {
        return Err(Error::InvalidInput(format!(
            "eigenvalue index {index} outside 0..{}",
            t.len()
        )));
    }
    let (lo, hi) = bisection_bounds(t);
    bisect_index(t, index, lo, hi, t.pivot_guard())
}

/// Eigenvalue number `index`, trying the bracket `[lo, hi]` first and falling
/// back to Gershgorin bounds when it does not enclose the eigenvalue.
pub fn tridiag_eig_index_in(t: &TriDiag, index: usize, lo: f64, hi: f64) -> Result<f64> {
    let guard = t.pivot_guard();
    if index < t.len()
        && lo < hi
        && sturm_count_guarded(t, lo, guard) <= index
        && sturm_count_guarded(t, hi, guard) > index
    {
        return bisect_index(t, index, lo, hi, guard);
    }
    tridiag_eig_index(t, index)
}

fn bisection_bounds(t: &TriDiag) -> (f64, f64) {
    let (lo, hi) = t.gershgorin();
    let pad = 1e-10 * lo.abs().max(hi.abs()).max(1.0);
    (lo - pad, hi + pad)
}

fn bisect_index(t: &TriDiag, index: usize, lo: f64, hi: f64, guard: f64) -> Result<f64> {
    let mut a = lo;
    let mut b = hi;
    if sturm_count_guarded(t, a, guard) > index || sturm_count_guarded(t, b, guard) <= index {
        return Err(Error::Bracket {
            index,
            lo: a,
            hi: b,
        });
    }
    loop {
        let mid = 0.5 * (a + b);
        let tol = BISECTION_RTOL * a.abs().max(b.abs()).max(1.0);
        if b - a <= tol || mid <= a || mid >= b {
            return Ok(mid);
        }
        if sturm_count_guarded(t, mid, guard) > index {
            b = mid;
        } else {
            a = mid;
        }
    }
}

/// LU factors of a shifted tridiagonal matrix with partial pivoting.
struct TriLu {
    d: Vec<f64>,
    dl: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TriLu {
    fn factor(t: &TriDiag, shift: f64) -> Self {
        let n = t.len();
        let mut d: Vec<f64> = t.diag.iter().map(|v| v - shift).collect();
        let mut dl = t.offdiag.clone();
        let mut du = t.offdiag.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        let tiny = f64::EPSILON * t.norm();
        for v in d.iter_mut() {
            if v.abs() < tiny {
                *v = if *v < 0.0 { -tiny } else { tiny };
            }
        }
        Self {
            d,
            dl,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i] - self.dl[i] * b[i + 1];
                b[i] = b[i + 1];
                b[i + 1] = temp;
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

/// Unit eigenvector for the eigenvalue of `t` closest to `mu`.
///
/// The sign is whatever the iteration produces; callers impose their own
/// convention.
pub fn inverse_iteration(t: &TriDiag, mu: f64) -> Result<Vec<f64>> {
    let window = ISOLATION_WINDOW * mu.abs().max(1.0);
    let guard = t.pivot_guard();
    let count =
        sturm_count_guarded(t, mu + window, guard) - sturm_count_guarded(t, mu - window, guard);
    if count != 1 {
        return Err(Error::Degenerate { mu, count, window });
    }
    let n = t.len();
    let norm = t.norm();
    let lu = TriLu::factor(t, mu);
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.25 * ((i as f64) * 0.7).sin())
        .collect();
    normalize(&mut v);
    let mut residual = f64::INFINITY;
    for _ in 0..INVERSE_MAX_ITERATIONS {
        lu.solve(&mut v);
        normalize(&mut v);
        let tv = t.apply(&v);
        let rq: f64 = v.iter().zip(&tv).map(|(a, b)| a * b).sum();
        residual = tv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - rq * b).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= INVERSE_RESIDUAL_TOL * norm {
            return Ok(v);
        }
    }
    Err(Error::InverseIteration {
        iterations: INVERSE_MAX_ITERATIONS,
        residual,
    })
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
}

/// Dense real symmetric matrix; symmetry is enforced on every write.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.set(i, i, *v);
        }
        m
    }

    /// Builds from `f(i, j)` evaluated on the lower triangle `j <= i`.
    pub fn from_lower<F: FnMut(usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds from full rows; only the lower triangle is read.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput(
                "symmetric matrix needs square rows, n >= 1".into(),
            ));
        }
        Ok(Self::from_lower(n, |i, j| rows[i][j]))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        compensated_sum((0..self.n).map(|i| self.get(i, i)))
    }

    /// Product with another symmetric matrix (general result).
    pub fn mul(&self, other: &SymMatrix) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            let a = self.row(i);
            for j in 0..n {
                // other is symmetric, so its column j equals its row j.
                let b = other.row(j);
                out.set(i, j, a.iter().zip(b).map(|(x, y)| x * y).sum());
            }
        }
        out
    }

    /// `R diag(d) R` for symmetric `R`.
    pub fn congruence_diag(&self, d: &[f64]) -> SymMatrix {
        let n = self.n;
        let scaled: Vec<f64> = (0..n)
            .flat_map(|i| {
                self.row(i)
                    .iter()
                    .zip(d)
                    .map(|(r, dq)| r * dq)
                    .collect::<Vec<_>>()
            })
            .collect();
        let mut out = SymMatrix::zeros(n);
        for i in 0..n {
            let a = &scaled[i * n..(i + 1) * n];
            for j in 0..=i {
                let b = self.row(j);
                out.set(i, j, a.iter().zip(b).map(|(x, y)| x * y).sum());
            }
        }
        out
    }
}

/// Eigen-decomposition returned by [`jacobi_eigs`]; column `i` of `vectors`
/// belongs to `values[i]`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

/// Cyclic Jacobi eigen-decomposition; eigenvalues ascending.
pub fn jacobi_eigs(s: &SymMatrix) -> Result<SymEigen> {
    let (values, vt) = jacobi(s, true)?;
    let vt = vt.expect("vectors requested");
    let n = s.order();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut vectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors.set(i, col, vt[src * n + i]);
        }
    }
    Ok(SymEigen {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors,
    })
}

/// Eigenvalues only, ascending.
pub fn jacobi_eigenvalues(s: &SymMatrix) -> Result<Vec<f64>> {
    let (mut values, _) = jacobi(s, false)?;
    values.sort_by(|a, b| a.total_cmp(b));
    Ok(values)
}

#[allow(clippy::type_complexity)]
fn jacobi(s: &SymMatrix, with_vectors: bool) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let n = s.order();
    let mut a = s.data.clone();
    let mut vt = if with_vectors {
        let mut id = vec![0.0; n * n];
        for i in 0..n {
            id[i * n + i] = 1.0;
        }
        Some(id)
    } else {
        None
    };
    let total = s.frobenius_norm();
    let target = JACOBI_TOL * total;
    let off_norm = |a: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..i {
                acc += 2.0 * a[i * n + j] * a[i * n + j];
            }
        }
        acc.sqrt()
    };
    let mut off = off_norm(&a);
    let mut sweeps = 0;
    while off > target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::JacobiConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // Skip rotations that cannot change the diagonal in floating point.
                if sweeps > 3 && apq.abs() < 1e-18 * (app.abs() + aqq.abs()) {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                rotate_rows(&mut a, n, p, q, c, sn);
                for k in 0..n {
                    if k != p && k != q {
                        a[k * n + p] = a[p * n + k];
                        a[k * n + q] = a[q * n + k];
                    }
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                if let Some(v) = vt.as_mut() {
                    rotate_rows(v, n, p, q, c, sn);
                }
            }
        }
        off = off_norm(&a);
    }
    let values = (0..n).map(|i| a[i * n + i]).collect();
    Ok((values, vt))
}

#[inline]
fn rotate_rows(a: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = a.split_at_mut(q * n);
    let rp = &mut head[p * n..(p + 1) * n];
    let rq = &mut tail[..n];
    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
        let xp = *x;
        let yq = *y;
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

/// Maximum implicit QL iterations per eigenvalue.
pub const QL_MAX_ITERATIONS: usize = 60;

/// Householder reduction to tridiagonal form. Returns (d, e) with the
/// subdiagonal in `e[1..]`, and the accumulated transform in `a` (row-major,
/// columns are the basis) when `vectors` is set.
fn householder_tridiagonal(a: &mut [f64], n: usize, vectors: bool) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[i * n + k].abs()).sum();
            if scale == 0.0 {
                e[i] = a[i * n + l];
            } else {
                for k in 0..=l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let f = a[i * n + l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                let mut f = 0.0;
                for j in 0..=l {
                    if vectors {
                        a[j * n + i] = a[i * n + j] / h;
                    }
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j * n + k] * a[i * n + k];
                    }
                    for k in (j + 1)..=l {
                        g += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g / h;
                    f += e[j] * a[i * n + j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j * n + k] -= f * e[k] + g * a[i * n + k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if vectors {
            if d[i] != 0.0 {
                for j in 0..i {
                    let mut g = 0.0;
                    for k in 0..i {
                        g += a[i * n + k] * a[k * n + j];
                    }
                    for k in 0..i {
                        a[k * n + j] -= g * a[k * n + i];
                    }
                }
            }
            d[i] = a[i * n + i];
            a[i * n + i] = 1.0;
            for j in 0..i {
                a[j * n + i] = 0.0;
                a[i * n + j] = 0.0;
            }
        } else {
            d[i] = a[i * n + i];
        }
    }
    (d, e)
}

/// Implicit QL with Wilkinson shifts on (d, e); rotations are applied to the
/// rows of `zt` when given.
fn implicit_ql(d: &mut [f64], e: &mut [f64], mut zt: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    if n > 0 {
        e[n - 1] = 0.0;
    }
    // couplings at the roundoff level of the reduction itself are deflated
    let norm = d
        .iter()
        .zip(e.iter())
        .fold(0.0_f64, |m, (a, b)| m.max(a.abs() + 2.0 * b.abs()));
    let floor = f64::EPSILON * norm;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd + floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > QL_MAX_ITERATIONS {
                return Err(Error::QlConvergence {
                    index: l,
                    iterations,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = zt.as_deref_mut() {
                    let (head, tail) = z.split_at_mut((i + 1) * n);
                    let zi = &mut head[i * n..];
                    for (a, b) in zi.iter_mut().zip(tail[..n].iter_mut()) {
                        let f = *b;
                        *b = s * *a + c * f;
                        *a = c * *a - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Householder tridiagonalization followed by implicit QL; eigenvalues
/// ascending, same layout as [`jacobi_eigs`].
pub fn sym_eigs(s: &SymMatrix) -> Result<SymEigen> {
    let n = s.order();
    let mut a = s.data.clone();
    let (mut d, mut e) = householder_tridiagonal(&mut a, n, true);
    // rows of zt are the basis vectors
    let mut zt = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            zt[k * n + i] = a[i * n + k];
        }
    }
    implicit_ql(&mut d, &mut e, Some(&mut zt))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[x].total_cmp(&d[y]));
    let mut vectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors.set(i, col, zt[src * n + i]);
        }
    }
    Ok(SymEigen {
        values: order.iter().map(|&i| d[i]).collect(),
        vectors,
    })
}

/// Eigenvalues only, ascending, by Householder + implicit QL.
pub fn sym_eigenvalues(s: &SymMatrix) -> Result<Vec<f64>> {
    let n = s.order();
    let mut a = s.data.clone();
    let (mut d, mut e) = householder_tridiagonal(&mut a, n, false);
    implicit_ql(&mut d, &mut e, None)?;
    d.sort_by(|x, y| x.total_cmp(y));
    Ok(d)
}

/// Principal square root of a symmetric positive semidefinite matrix.
pub fn sym_sqrt(s: &SymMatrix) -> Result<SymMatrix> {
    sym_sqrt_with_tolerance(s, PSD_TOL)
}

/// As [`sym_sqrt`], accepting negative eigenvalues down to
/// `−rel_tol·max|λ|` (clipped to zero).
pub fn sym_sqrt_with_tolerance(s: &SymMatrix, rel_tol: f64) -> Result<SymMatrix> {
    let eig = sym_eigs(s)?;
    let n = s.order();
    let scale = eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tolerance = rel_tol * scale;
    if let Some(&min) = eig.values.first() {
        if min < -tolerance {
            return Err(Error::NotPsd {
                eigenvalue: min,
                tolerance,
            });
        }
    }
    // B = V diag(lambda^{1/4}); R = B Bᵀ
    let roots: Vec<f64> = eig
        .values
        .iter()
        .map(|v| v.max(0.0).sqrt().sqrt())
        .collect();
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            b[i * n + k] = eig.vectors.get(i, k) * roots[k];
        }
    }
    let mut r = SymMatrix::zeros(n);
    for i in 0..n {
        let bi = &b[i * n..(i + 1) * n];
        for j in 0..=i {
            let bj = &b[j * n..(j + 1) * n];
            r.set(i, j, bi.iter().zip(bj).map(|(x, y)| x * y).sum());
        }
    }
    Ok(r)
}

/// Brent's method on a sign-changing bracket.
pub fn brent_root<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NoSignChange { a, b, fa, fb });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Ok(b)
}

/// Normalized Hermite function φ_j (φ₁ is the Gaussian ground state).
pub fn hermite_phi(j: usize, x: f64) -> f64 {
    assert!(j >= 1, "Hermite index starts at 1");
    let p0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    if j == 1 {
        return p0;
    }
    let mut prev = p0;
    let mut cur = std::f64::consts::SQRT_2 * x * p0;
    for q in 1..(j - 1) {
        let qf = q as f64;
        let next = x * (2.0 / (qf + 1.0)).sqrt() * cur - (qf / (qf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        compensated_sum(self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)))
    }
}

/// Gauss–Legendre rule with `n` nodes on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> QuadratureRule {
    assert!(n >= 1 && a < b, "gauss_legendre needs n >= 1 and a < b");
    let (xs, ws) = legendre_reference(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    QuadratureRule {
        nodes: xs.iter().map(|x| mid + half * x).collect(),
        weights: ws.iter().map(|w| half * w).collect(),
    }
}

/// Composite Gauss–Legendre rule with `n` nodes on each panel between
/// consecutive `edges`.
pub fn composite_gauss_legendre(n: usize, edges: &[f64]) -> QuadratureRule {
    let (xs, ws) = legendre_reference(n);
    let mut nodes = Vec::with_capacity(n * edges.len());
    let mut weights = Vec::with_capacity(n * edges.len());
    for pair in edges.windows(2) {
        let half = 0.5 * (pair[1] - pair[0]);
        let mid = 0.5 * (pair[1] + pair[0]);
        for (x, w) in xs.iter().zip(&ws) {
            nodes.push(mid + half * x);
            weights.push(half * w);
        }
    }
    QuadratureRule { nodes, weights }
}

/// Nodes (ascending) and weights of the n-point rule on [−1, 1].
fn legendre_reference(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        xs[n - 1 - i] = x;
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        xs[n / 2] = 0.0;
    }
    (xs, ws)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Cubic Hermite interpolation on a uniform grid from values and slopes.
#[derive(Debug, Clone)]
pub struct UniformHermite {
    start: f64,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl UniformHermite {
    pub fn new(start: f64, step: f64, values: Vec<f64>, slopes: Vec<f64>) -> Self {
        assert!(values.len() == slopes.len() && values.len() >= 2 && step > 0.0);
        Self {
            start,
            step,
            values,
            slopes,
        }
    }

    pub fn end(&self) -> f64 {
        self.start + self.step * (self.values.len() - 1) as f64
    }

    /// Interpolated value; zero beyond the last node.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let u = (x - self.start) / self.step;
        if u < 0.0 {
            return self.values[0];
        }
        let i = u as usize;
        if i + 1 >= self.values.len() {
            return if i + 1 == self.values.len() && u == i as f64 {
                self.values[i]
            } else {
                0.0
            };
        }
        let t = u - i as f64;
        let h = self.step;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.values[i]
            + h10 * h * self.slopes[i]
            + h01 * self.values[i + 1]
            + h11 * h * self.slopes[i + 1]
    }
}
