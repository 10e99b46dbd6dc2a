//! Small dense/banded linear-algebra kernels: symmetric banded storage,
//! Cholesky factorizations, a symmetric eigensolver (Householder
//! tridiagonalization + implicit-shift QL with eigenvector accumulation),
//! and compensated (Neumaier) summation for high-relative-accuracy
//! quadratic forms.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not positive definite (pivot {index} is {pivot:e})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("QL iteration did not converge for eigenvalue {index}")]
    NoConvergence { index: usize },
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
}

/// Symmetric matrix stored by lower diagonals: `band[d][i] = A[i+d][i]`
/// for `d = 0..=bandwidth`. Entries with `|row - col| > bandwidth` are
/// structurally zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSymMatrix {
    n: usize,
    bandwidth: usize,
    bands: Vec<Vec<f64>>,
}

impl BandedSymMatrix {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        let bandwidth = bandwidth.min(n.saturating_sub(1));
        let bands = (0..=bandwidth).map(|d| vec![0.0; n - d]).collect();
        Self { n, bandwidth, bands }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        if d > self.bandwidth {
            0.0
        } else {
            self.bands[d][lo]
        }
    }

    /// Adds `v` to the (i, j) = (j, i) entry. Out-of-band targets are
    /// rejected at the call site by panic: assembly never produces them.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        assert!(d <= self.bandwidth, "entry ({i},{j}) outside bandwidth {}", self.bandwidth);
        self.bands[d][lo] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let mut acc = self.bands[0][i] * x[i];
            for d in 1..=self.bandwidth {
                if i >= d {
                    acc += self.bands[d][i - d] * x[i - d];
                }
                if i + d < self.n {
                    acc += self.bands[d][i] * x[i + d];
                }
            }
            y[i] = acc;
        }
        y
    }

    /// Quadratic form xᵀAx with compensated accumulation; the banded
    /// terms cancel heavily for smooth x, so naive summation loses
    /// relative accuracy exactly where eigenvalue errors are measured.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n);
        let mut acc = NeumaierAcc::new();
        for i in 0..self.n {
            acc.add(self.bands[0][i] * x[i] * x[i]);
            for d in 1..=self.bandwidth {
                if i + d < self.n {
                    acc.add(2.0 * self.bands[d][i] * x[i] * x[i + d]);
                }
            }
        }
        acc.value()
    }

    /// |x|ᵀ|A||x| = Σ |A_ij||x_i||x_j|: the scale against which entrywise
    /// rounding of A perturbs the quadratic form xᵀAx. Multiplied by
    /// machine epsilon this bounds the floating-point noise floor of
    /// Rayleigh quotients, which is what limits computed eigenvalue
    /// accuracy once discretization errors drop below it.
    pub fn abs_quad_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n);
        let mut acc = 0.0;
        for i in 0..self.n {
            acc += self.bands[0][i].abs() * x[i] * x[i];
            for d in 1..=self.bandwidth {
                if i + d < self.n {
                    acc += 2.0 * self.bands[d][i].abs() * (x[i] * x[i + d]).abs();
                }
            }
        }
        acc
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in i.saturating_sub(self.bandwidth)..=(i + self.bandwidth).min(self.n - 1) {
                a.set(i, j, self.get(i, j));
            }
        }
        a
    }

    pub fn max_abs(&self) -> f64 {
        self.bands.iter().flat_map(|b| b.iter()).fold(0.0, |m, &v| m.max(v.abs()))
    }

    /// Removes the first and last row/column (strong boundary-condition
    /// imposition on clamped spline spaces).
    pub fn strip_first_last(&self) -> Self {
        assert!(self.n > 2, "cannot strip a {}x{} matrix", self.n, self.n);
        let m = self.n - 2;
        let mut out = Self::zeros(m, self.bandwidth);
        for d in 0..=out.bandwidth {
            for i in 0..m - d {
                out.bands[d][i] = self.bands[d][i + 1];
            }
        }
        out
    }

    /// Cholesky factorization A = LLᵀ with L lower-banded of the same
    /// bandwidth. Fails on non-positive pivots.
    pub fn cholesky(&self) -> Result<BandedCholesky, LinalgError> {
        let n = self.n;
        let bw = self.bandwidth;
        let mut l = BandedSymMatrix::zeros(n, bw);
        for j in 0..n {
            let mut s = self.get(j, j);
            for k in j.saturating_sub(bw)..j {
                let v = l.get(j, k);
                s -= v * v;
            }
            if s <= 0.0 || !s.is_finite() {
                return Err(LinalgError::NotPositiveDefinite { index: j, pivot: s });
            }
            let ljj = s.sqrt();
            l.bands[0][j] = ljj;
            for i in j + 1..=(j + bw).min(n - 1) {
                let mut s = self.get(i, j);
                for k in i.saturating_sub(bw)..j {
                    s -= l.get(i, k) * l.get(j, k);
                }
                l.bands[i - j][j] = s / ljj;
            }
        }
        Ok(BandedCholesky { l })
    }
}

/// Lower-banded Cholesky factor with forward/backward substitution.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    l: BandedSymMatrix,
}

impl BandedCholesky {
    pub fn dim(&self) -> usize {
        self.l.n
    }

    /// Solves L y = b in place.
    pub fn solve_lower(&self, b: &mut [f64]) {
        let n = self.l.n;
        let bw = self.l.bandwidth;
        for i in 0..n {
            let mut s = b[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.l.get(i, k) * b[k];
            }
            b[i] = s / self.l.bands[0][i];
        }
    }

    /// Solves Lᵀ y = b in place.
    pub fn solve_lower_transpose(&self, b: &mut [f64]) {
        let n = self.l.n;
        let bw = self.l.bandwidth;
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..=(i + bw).min(n - 1) {
                s -= self.l.get(k, i) * b[k];
            }
            b[i] = s / self.l.bands[0][i];
        }
    }

    /// Solves A x = b (A = LLᵀ) in place.
    pub fn solve(&self, b: &mut [f64]) {
        self.solve_lower(b);
        self.solve_lower_transpose(b);
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n, n);
        for i in 0..n {
            a.set(i, i, 1.0);
        }
        a
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut a = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c);
            a.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        a
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

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[f64]) {
        assert_eq!(col.len(), self.rows);
        for (i, &v) in col.iter().enumerate() {
            self.set(i, j, v);
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            y[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        y
    }

    /// Quadratic form xᵀAx with compensated accumulation (A symmetric).
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        assert_eq!(self.rows, self.cols);
        assert_eq!(x.len(), self.rows);
        let mut acc = NeumaierAcc::new();
        for i in 0..self.rows {
            acc.add(self.get(i, i) * x[i] * x[i]);
            for j in i + 1..self.cols {
                acc.add(2.0 * self.get(i, j) * x[i] * x[j]);
            }
        }
        acc.value()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    /// Cholesky factorization A = LLᵀ for dense symmetric A.
    pub fn cholesky(&self) -> Result<DenseCholesky, LinalgError> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut l = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut s = self.get(j, j);
            for k in 0..j {
                let v = l.get(j, k);
                s -= v * v;
            }
            if s <= 0.0 || !s.is_finite() {
                return Err(LinalgError::NotPositiveDefinite { index: j, pivot: s });
            }
            let ljj = s.sqrt();
            l.set(j, j, ljj);
            for i in j + 1..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, s / ljj);
            }
        }
        Ok(DenseCholesky { l })
    }
}

/// Dense lower Cholesky factor with substitution solves.
#[derive(Debug, Clone)]
pub struct DenseCholesky {
    l: DenseMatrix,
}

impl DenseCholesky {
    pub fn dim(&self) -> usize {
        self.l.rows
    }

    pub fn solve_lower(&self, b: &mut [f64]) {
        let n = self.l.rows;
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l.get(i, k) * b[k];
            }
            b[i] = s / self.l.get(i, i);
        }
    }

    pub fn solve_lower_transpose(&self, b: &mut [f64]) {
        let n = self.l.rows;
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= self.l.get(k, i) * b[k];
            }
            b[i] = s / self.l.get(i, i);
        }
    }

    pub fn solve(&self, b: &mut [f64]) {
        self.solve_lower(b);
        self.solve_lower_transpose(b);
    }
}

/// Neumaier (improved Kahan) compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierAcc {
    sum: f64,
    comp: f64,
}

impl NeumaierAcc {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator of terms.
pub fn compensated_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = NeumaierAcc::new();
    for t in terms {
        acc.add(t);
    }
    acc.value()
}

/// Compensated dot product.
pub fn compensated_dot(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    compensated_sum(x.iter().zip(y).map(|(a, b)| a * b))
}

fn pythag(a: f64, b: f64) -> f64 {
    let (a, b) = (a.abs(), b.abs());
    if a > b {
        a * (1.0 + (b / a).powi(2)).sqrt()
    } else if b == 0.0 {
        0.0
    } else {
        b * (1.0 + (a / b).powi(2)).sqrt()
    }
}

/// Eigendecomposition of a dense symmetric matrix: ascending eigenvalues
/// and an orthogonal matrix whose columns are the matching eigenvectors.
///
/// Householder reduction to tridiagonal form with accumulated
/// transformations, followed by the implicit-shift QL iteration.
pub fn sym_eigen(a: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix), LinalgError> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    if n == 0 {
        return Ok((Vec::new(), DenseMatrix::zeros(0, 0)));
    }
    let mut z = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut z, &mut d, &mut e);
    ql_implicit(&mut d, &mut e, &mut z)?;
    sort_eigenpairs(&mut d, &mut z);
    Ok((d, z))
}

/// Householder reduction; on exit `z` holds the accumulated orthogonal
/// transformation, `d` the diagonal and `e` the subdiagonal (e[0] unused).
fn tridiagonalize(z: &mut DenseMatrix, d: &mut [f64], e: &mut [f64]) {
    let n = z.rows;
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut scale = 0.0;
            for k in 0..=l {
                scale += z.get(i, k).abs();
            }
            if scale == 0.0 {
                e[i] = z.get(i, l);
            } else {
                for k in 0..=l {
                    let v = z.get(i, k) / scale;
                    z.set(i, k, v);
                    h += v * v;
                }
                let f = z.get(i, l);
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                z.set(i, l, f - g);
                let mut f_acc = 0.0;
                for j in 0..=l {
                    z.set(j, i, z.get(i, j) / h);
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += z.get(j, k) * z.get(i, k);
                    }
                    for k in j + 1..=l {
                        g += z.get(k, j) * z.get(i, k);
                    }
                    e[j] = g / h;
                    f_acc += e[j] * z.get(i, j);
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = z.get(i, j);
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let v = z.get(j, k) - (f * e[k] + g * z.get(i, k));
                        z.set(j, k, v);
                    }
                }
            }
        } else {
            e[i] = z.get(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += z.get(i, k) * z.get(k, j);
                }
                for k in 0..i {
                    let v = z.get(k, j) - g * z.get(k, i);
                    z.set(k, j, v);
                }
            }
        }
        d[i] = z.get(i, i);
        z.set(i, i, 1.0);
        for j in 0..i {
            z.set(j, i, 0.0);
            z.set(i, j, 0.0);
        }
    }
}

/// Implicit-shift QL iteration on the tridiagonal (d, e) with eigenvector
/// accumulation into the columns of `z`.
fn ql_implicit(d: &mut [f64], e: &mut [f64], z: &mut DenseMatrix) -> Result<(), LinalgError> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iter == 50 {
                return Err(LinalgError::NoConvergence { index: l });
            }
            iter += 1;
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = pythag(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = pythag(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z.get(k, i + 1);
                    z.set(k, i + 1, s * z.get(k, i) + c * f);
                    z.set(k, i, c * z.get(k, i) - s * f);
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn sort_eigenpairs(d: &mut [f64], z: &mut DenseMatrix) {
    let n = d.len();
    for i in 0..n {
        let mut k = i;
        for j in i + 1..n {
            if d[j] < d[k] {
                k = j;
            }
        }
        if k != i {
            d.swap(i, k);
            for r in 0..z.rows {
                let t = z.get(r, i);
                z.set(r, i, z.get(r, k));
                z.set(r, k, t);
            }
        }
    }
}
