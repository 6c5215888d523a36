//! Sampled functions on one-dimensional grids.

use alloc::vec::Vec;

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("grid needs at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("grid is not uniformly spaced")]
    NonUniform,
    #[error("grids do not match")]
    Mismatch,
    #[error("points and values differ in length ({points} vs {values})")]
    LengthMismatch { points: usize, values: usize },
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("grid points must be strictly increasing")]
    NotIncreasing,
}

/// Samples `values[i]` at `points[i]`. Points are strictly increasing; the
/// differential operators additionally require uniform spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    points: Vec<f64>,
    values: Vec<Complex64>,
}

/// `n` uniformly spaced points from `lo` to `hi` inclusive.
pub fn uniform_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { hi } else { lo + i as f64 * h }).collect()
}

impl GridFunction {
    pub fn new(points: Vec<f64>, values: Vec<Complex64>) -> Result<Self, GridError> {
        if points.len() != values.len() {
            return Err(GridError::LengthMismatch { points: points.len(), values: values.len() });
        }
        if points.len() < 2 {
            return Err(GridError::TooFewPoints { min: 2, got: points.len() });
        }
        if points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(GridError::NotIncreasing);
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(GridError::NonFinite(i));
        }
        Ok(Self { points, values })
    }

    pub fn from_real(points: Vec<f64>, values: Vec<f64>) -> Result<Self, GridError> {
        Self::new(points, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples `f` on `n` uniform points of `[lo, hi]`.
    pub fn sample<F>(lo: f64, hi: f64, n: usize, f: F) -> Result<Self, GridError>
    where
        F: Fn(f64) -> Complex64,
    {
        let points = uniform_points(lo, hi, n);
        let values = points.iter().map(|&x| f(x)).collect();
        Self::new(points, values)
    }

    pub fn sample_real<F>(lo: f64, hi: f64, n: usize, f: F) -> Result<Self, GridError>
    where
        F: Fn(f64) -> f64,
    {
        Self::sample(lo, hi, n, |x| Complex64::new(f(x), 0.0))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Same points, new values.
    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self, GridError> {
        Self::new(self.points.clone(), values)
    }

    /// Uniform spacing `h`, or `None` when spacing varies by more than `1e-9·h`.
    pub fn spacing(&self) -> Option<f64> {
        let n = self.points.len();
        let h = (self.points[n - 1] - self.points[0]) / (n - 1) as f64;
        let uniform = self.points.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h);
        uniform.then_some(h)
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.points.len() == other.points.len()
            && self.points.iter().zip(&other.points).all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + a.abs()))
    }

    /// Trapezoid-rule inner product `⟨self, other⟩ = Σ wᵢ conj(fᵢ) gᵢ`.
    pub fn inner(&self, other: &Self) -> Result<Complex64, GridError> {
        if !self.same_grid(other) {
            return Err(GridError::Mismatch);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.points.len() - 1 {
            let dx = self.points[i + 1] - self.points[i];
            let left = self.values[i].conj() * other.values[i];
            let right = self.values[i + 1].conj() * other.values[i + 1];
            acc += (left + right) * (0.5 * dx);
        }
        Ok(acc)
    }

    /// `∫|f|²` by the trapezoid rule.
    pub fn norm_sq(&self) -> f64 {
        self.inner(self).map(|z| z.re).unwrap_or(f64::NAN)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Sign changes of the real part, ignoring samples below `1e-10` of the
    /// maximum amplitude.
    pub fn sign_changes(&self) -> usize {
        let reals = self.real_parts();
        count_sign_changes(&reals)
    }

    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }
}

pub fn count_sign_changes(values: &[f64]) -> usize {
    let floor = 1e-10 * values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut last = 0.0f64;
    let mut changes = 0;
    for &v in values {
        if v.abs() <= floor {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            changes += 1;
        }
        last = v;
    }
    changes
}
