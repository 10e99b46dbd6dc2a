//! Uniform maximum-continuity B-spline spaces on an interval: clamped
//! (open) knot vectors, Cox-de Boor basis evaluation, first derivatives,
//! and the element partition.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SplineError {
    #[error("invalid spline space: {reason}")]
    InvalidSpec { reason: String },
    #[error("evaluation point {x} outside the domain [{a}, {b}]")]
    OutOfDomain { x: f64, a: f64, b: f64 },
}

/// Clamped knot vector with uniformly spaced, simple interior knots:
/// first and last knots repeated `p + 1` times, giving a degree-`p`,
/// C^{p-1} spline space with `n + p` basis functions on `n` elements.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    knots: Vec<f64>,
    degree: usize,
}

impl KnotVector {
    pub fn uniform_open(a: f64, b: f64, n_elements: usize, p: usize) -> Result<Self, SplineError> {
        if b <= a || !a.is_finite() || !b.is_finite() {
            return Err(SplineError::InvalidSpec {
                reason: format!("domain [{a}, {b}] is not a proper interval"),
            });
        }
        if n_elements < 1 {
            return Err(SplineError::InvalidSpec { reason: "need at least one element".into() });
        }
        if p < 1 {
            return Err(SplineError::InvalidSpec { reason: "degree must be at least 1".into() });
        }
        let mut knots = Vec::with_capacity(n_elements + 1 + 2 * p);
        knots.extend(std::iter::repeat_n(a, p));
        // Breakpoints computed as convex combinations so both endpoints
        // are hit exactly regardless of rounding.
        for i in 0..=n_elements {
            let t = i as f64 / n_elements as f64;
            knots.push(a * (1.0 - t) + b * t);
        }
        knots.extend(std::iter::repeat_n(b, p));
        Ok(Self { knots, degree: p })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    pub fn num_elements(&self) -> usize {
        self.knots.len() - 2 * self.degree - 1
    }

    pub fn num_basis(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// Index s with knots[s] <= x < knots[s+1]; at x = b the last
    /// non-empty span is returned so the final basis function evaluates
    /// to 1 there (closed right endpoint of the last indicator).
    fn find_span(&self, x: f64) -> usize {
        let p = self.degree;
        let n = self.num_basis();
        if x >= self.knots[n] {
            return n - 1;
        }
        // Uniform interior spacing admits direct bucketing, then a local
        // correction for rounding at breakpoints.
        let (a, b) = self.domain();
        let ne = self.num_elements();
        let t = (x - a) / (b - a) * ne as f64;
        let mut s = p + (t.floor() as usize).min(ne - 1);
        while x < self.knots[s] {
            s -= 1;
        }
        while x >= self.knots[s + 1] {
            s += 1;
        }
        s
    }
}

/// Degree-p spline space: a knot vector plus its basis-count bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    kv: KnotVector,
}

impl BasisSpec {
    pub fn new(kv: KnotVector) -> Self {
        Self { kv }
    }

    pub fn uniform_open(a: f64, b: f64, n_elements: usize, p: usize) -> Result<Self, SplineError> {
        Ok(Self::new(KnotVector::uniform_open(a, b, n_elements, p)?))
    }

    pub fn knot_vector(&self) -> &KnotVector {
        &self.kv
    }

    pub fn degree(&self) -> usize {
        self.kv.degree()
    }

    pub fn domain(&self) -> (f64, f64) {
        self.kv.domain()
    }

    pub fn num_elements(&self) -> usize {
        self.kv.num_elements()
    }

    pub fn num_basis(&self) -> usize {
        self.kv.num_basis()
    }

    fn check_domain(&self, x: f64) -> Result<(), SplineError> {
        let (a, b) = self.domain();
        if x < a || x > b || !x.is_finite() {
            return Err(SplineError::OutOfDomain { x, a, b });
        }
        Ok(())
    }
}

/// One mesh element with its affine map from a reference interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element {
    pub index: usize,
    pub x_left: f64,
    pub x_right: f64,
    /// (x_right - x_left) / |reference interval|.
    pub jacobian: f64,
}

/// The element partition of the domain, with Jacobians of the affine maps
/// from a reference interval of the given length (2 for rules on [-1,1]).
pub fn elements_of(spec: &BasisSpec, reference_length: f64) -> Vec<Element> {
    assert!(reference_length > 0.0);
    let p = spec.degree();
    let knots = spec.kv.knots();
    (0..spec.num_elements())
        .map(|e| {
            let x_left = knots[p + e];
            let x_right = knots[p + e + 1];
            Element { index: e, x_left, x_right, jacobian: (x_right - x_left) / reference_length }
        })
        .collect()
}

/// Values of the p+1 basis functions supported at x, as
/// (global basis index, value) pairs in ascending index order.
///
/// Triangular Cox-de Boor evaluation (only the non-vanishing functions),
/// with the 0/0 := 0 convention handled structurally.
pub fn eval_basis(spec: &BasisSpec, x: f64) -> Result<Vec<(usize, f64)>, SplineError> {
    spec.check_domain(x)?;
    let p = spec.degree();
    let span = spec.kv.find_span(x);
    let vals = basis_values_at_span(spec.kv.knots(), p, span, x);
    Ok((0..=p).map(|r| (span - p + r, vals[r])).collect())
}

/// First derivatives of the p+1 basis functions supported at x,
/// via the degree-reduction formula
/// φ'_{j,p} = p (φ_{j,p-1}/(t_{j+p}-t_j) - φ_{j+1,p-1}/(t_{j+p+1}-t_{j+1})).
pub fn eval_basis_deriv(spec: &BasisSpec, x: f64) -> Result<Vec<(usize, f64)>, SplineError> {
    spec.check_domain(x)?;
    let p = spec.degree();
    let knots = spec.kv.knots();
    let span = spec.kv.find_span(x);
    // Degree p-1 functions that are nonzero at x: indices span-p+1 ..= span.
    let lower = basis_values_at_span(knots, p - 1, span, x);
    let first_lower = span + 1 - p;
    let low_val = |j: usize| -> f64 {
        if j < first_lower || j > span {
            0.0
        } else {
            lower[j - first_lower]
        }
    };
    let mut out = Vec::with_capacity(p + 1);
    for j in span - p..=span {
        let left_den = knots[j + p] - knots[j];
        let right_den = knots[j + p + 1] - knots[j + 1];
        let left = if left_den > 0.0 { low_val(j) / left_den } else { 0.0 };
        let right = if right_den > 0.0 { low_val(j + 1) / right_den } else { 0.0 };
        out.push((j, p as f64 * (left - right)));
    }
    Ok(out)
}

/// Non-vanishing degree-`deg` basis values at `x` for a span index taken
/// from the *degree-p* space; returns values for indices
/// span-deg ..= span in order.
fn basis_values_at_span(knots: &[f64], deg: usize, span: usize, x: f64) -> Vec<f64> {
    let mut vals = vec![0.0; deg + 1];
    vals[0] = 1.0;
    let mut left = vec![0.0; deg + 1];
    let mut right = vec![0.0; deg + 1];
    for j in 1..=deg {
        left[j] = x - knots[span + 1 - j];
        right[j] = knots[span + j] - x;
        let mut saved = 0.0;
        for r in 0..j {
            let den = right[r + 1] + left[j - r];
            let temp = if den != 0.0 { vals[r] / den } else { 0.0 };
            vals[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        vals[j] = saved;
    }
    vals
}
