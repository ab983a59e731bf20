//! Riemann-Liouville integral and Caputo derivative on uniform grids.
//!
//! Both operators return exactly zero at `t0` (an empty history). The Caputo
//! derivative uses the L1 scheme for `0 < alpha < 1`, which is `O(h^(2 - alpha))`
//! for smooth functions, and ordinary finite differences at `alpha = 1`.

use thiserror::Error;

use crate::special_fn::{gamma, rgamma};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FracError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("non-finite sample at node {index}")]
    NonFinite { index: usize },
}

/// Uniform sampling `t_j = t0 + j h`, `j = 0..=n_steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    h: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, h: f64, n_steps: usize) -> Result<Self, FracError> {
        if !t0.is_finite() {
            return Err(FracError::Grid(format!("t0 must be finite, got {t0}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(FracError::Grid(format!("step must be positive, got {h}")));
        }
        if n_steps == 0 {
            return Err(FracError::Grid("at least one step is required".into()));
        }
        Ok(Self { t0, h, n_steps })
    }

    /// Grid covering `[t0, t_end]` with step `h`. The span must be an integer
    /// multiple of `h` up to rounding.
    pub fn spanning(t0: f64, t_end: f64, h: f64) -> Result<Self, FracError> {
        if !(t_end > t0) {
            return Err(FracError::Grid(format!("t_end ({t_end}) must exceed t0 ({t0})")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(FracError::Grid(format!("step must be positive, got {h}")));
        }
        let steps = (t_end - t0) / h;
        let n = steps.round();
        if (steps - n).abs() > 1e-6 * steps.max(1.0) || n < 1.0 {
            return Err(FracError::Grid(format!(
                "span {} is not a multiple of h = {h}",
                t_end - t0
            )));
        }
        Self::new(t0, h, n as usize)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t_end(&self) -> f64 {
        self.node(self.n_steps)
    }

    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.h
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n_steps).map(move |j| self.node(j))
    }

    /// Same span with half the step.
    pub fn refined(&self) -> Self {
        Self {
            t0: self.t0,
            h: 0.5 * self.h,
            n_steps: 2 * self.n_steps,
        }
    }
}

/// Samples of a scalar function, one per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSeries {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl SampleSeries {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self, FracError> {
        if values.len() != grid.len() {
            return Err(FracError::Shape(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(FracError::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: FnMut(f64) -> f64>(grid: TimeGrid, mut f: F) -> Result<Self, FracError> {
        let values = grid.nodes().map(&mut f).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map<F: FnMut(f64) -> f64>(&self, f: F) -> Result<Self, FracError> {
        Self::new(self.grid, self.values.iter().copied().map(f).collect())
    }

    /// Pointwise combination of two series on the same grid.
    pub fn zip_with<F: FnMut(f64, f64) -> f64>(
        &self,
        other: &SampleSeries,
        mut f: F,
    ) -> Result<Self, FracError> {
        if self.grid != other.grid {
            return Err(FracError::Shape("series live on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(self.grid, values)
    }
}

/// Fractional order in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(alpha: f64) -> Result<Self, FracError> {
        if alpha > 0.0 && alpha <= 1.0 {
            Ok(Self(alpha))
        } else {
            Err(FracError::Domain(format!(
                "fractional order must lie in (0, 1], got {alpha}"
            )))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.0
    }

    pub fn is_integer(&self) -> bool {
        self.0 == 1.0
    }
}

/// L1 history weights `b_m = (m+1)^(1-alpha) - m^(1-alpha)`, `m = 0..n`.
///
/// The Caputo value at node `k` is
/// `h^-alpha / Gamma(2-alpha) * sum_{j<k} b_{k-1-j} (f_{j+1} - f_j)`.
pub fn l1_weights(n: usize, order: FracOrder) -> Vec<f64> {
    let e = 1.0 - order.alpha();
    let mut prev = 0.0_f64;
    (0..n)
        .map(|m| {
            let next = ((m + 1) as f64).powf(e);
            let w = next - prev;
            prev = next;
            w
        })
        .collect()
}

/// Caputo derivative of order `alpha` of the sampled function.
pub fn caputo_l1(f: &SampleSeries, order: FracOrder) -> Result<SampleSeries, FracError> {
    let n = f.len();
    if n < 2 {
        return Err(FracError::Shape("Caputo derivative needs at least two nodes".into()));
    }
    let h = f.grid.h();
    let v = &f.values;
    if order.is_integer() {
        return SampleSeries::new(f.grid, first_derivative(v, h));
    }

    let alpha = order.alpha();
    let scale = h.powf(-alpha) * rgamma(2.0 - alpha);
    let weights = l1_weights(n - 1, order);
    let diffs: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
    let mut out = vec![0.0; n];
    for (k, slot) in out.iter_mut().enumerate().skip(1) {
        // weight index k-1-j pairs the most recent increment with b_0
        let acc: f64 = diffs[..k]
            .iter()
            .rev()
            .zip(&weights)
            .map(|(d, w)| d * w)
            .sum();
        *slot = scale * acc;
    }
    SampleSeries::new(f.grid, out)
}

fn first_derivative(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let mut out = vec![0.0; n];
    if n == 2 {
        let d = (v[1] - v[0]) / h;
        out[0] = d;
        out[1] = d;
        return out;
    }
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    for k in 1..n - 1 {
        out[k] = (v[k + 1] - v[k - 1]) / (2.0 * h);
    }
    out[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    out
}

/// Riemann-Liouville integral of order `mu` by product trapezoidal quadrature
/// (the integrand is replaced by its piecewise-linear interpolant).
pub fn rl_integral(f: &SampleSeries, mu: f64) -> Result<SampleSeries, FracError> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(FracError::Domain(format!(
            "integral order must be positive, got {mu}"
        )));
    }
    let n = f.len();
    let h = f.grid.h();
    let v = &f.values;
    // m^(mu+1) and m^mu for m = 0..n
    let p1: Vec<f64> = (0..=n).map(|m| (m as f64).powf(mu + 1.0)).collect();
    let p0: Vec<f64> = (0..=n).map(|m| (m as f64).powf(mu)).collect();
    // interior weight for lag m >= 1
    let interior: Vec<f64> = (0..n)
        .map(|m| {
            if m == 0 {
                1.0
            } else {
                p1[m + 1] - 2.0 * p1[m] + p1[m - 1]
            }
        })
        .collect();
    let scale = h.powf(mu) * rgamma(mu + 2.0);
    let mut out = vec![0.0; n];
    for (k, slot) in out.iter_mut().enumerate().skip(1) {
        let kf = k as f64;
        let first = p1[k - 1] - (kf - 1.0 - mu) * p0[k];
        let mut acc = first * v[0];
        for j in 1..=k {
            acc += interior[k - j] * v[j];
        }
        *slot = scale * acc;
    }
    SampleSeries::new(f.grid, out)
}

/// Exact Caputo derivative of `(t - t0)^p`:
/// `Gamma(p+1) / Gamma(p+1-alpha) * (t - t0)^(p-alpha)`.
pub fn caputo_power_oracle(p: f64, order: FracOrder, t: f64, t0: f64) -> Result<f64, FracError> {
    if !(p >= 1.0) {
        return Err(FracError::Domain(format!("power must be at least 1, got {p}")));
    }
    if !(t >= t0) {
        return Err(FracError::Domain(format!("t ({t}) precedes t0 ({t0})")));
    }
    let alpha = order.alpha();
    let lower = p + 1.0 - alpha;
    if lower <= 0.0 && lower == lower.floor() {
        return Err(FracError::Domain(format!("Gamma pole at {lower}")));
    }
    let num = gamma(p + 1.0).map_err(|e| FracError::Domain(e.to_string()))?;
    Ok(num * rgamma(lower) * (t - t0).powf(p - alpha))
}
