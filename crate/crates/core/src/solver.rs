//! Fractional Adams-Bashforth-Moulton predictor-corrector (PECE) for
//! commensurate systems `C D^alpha x = f(t, x)`, `x(t0) = x0`.
//!
//! With `b_{j,k+1} = (k+1-j)^alpha - (k-j)^alpha`, step `k -> k+1` computes
//!
//! ```text
//! x^P      = x0 + h^alpha / Gamma(alpha+1) * sum_{j<=k} b_{j,k+1} f_j
//! x_{k+1}  = x0 + h^alpha / Gamma(alpha+2) * ( f(t_{k+1}, x^P) + sum_{j<=k} a_{j,k+1} f_j )
//! a_{0,k+1} = k^(alpha+1) - (k-alpha)(k+1)^alpha
//! a_{j,k+1} = (k-j+2)^(alpha+1) + (k-j)^(alpha+1) - 2(k-j+1)^(alpha+1),  1 <= j <= k
//! ```
//!
//! The full history is kept, so a run of `N` steps costs `O(N^2)`.

use thiserror::Error;

use crate::expr::{EvalError, Expr};
use crate::frac_ops::{FracError, FracOrder, SampleSeries, TimeGrid};
use crate::special_fn::rgamma;

/// States beyond this magnitude abort the run.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid system: {0}")]
    Config(String),
    #[error("solution diverged after step {last_valid_step}")]
    Divergence { last_valid_step: usize },
    #[error("right-hand side failed at step {step}: {source}")]
    Eval { step: usize, source: EvalError },
    #[error(transparent)]
    Grid(#[from] FracError),
    #[error("at h = {h}: {source}")]
    AtStep { h: f64, source: Box<SolveError> },
}

/// A fractional-order system with expression right-hand sides.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemDef {
    label: String,
    order: FracOrder,
    x0: Vec<f64>,
    rhs: Vec<Expr>,
}

impl SystemDef {
    pub fn new(
        label: impl Into<String>,
        order: FracOrder,
        x0: Vec<f64>,
        rhs: Vec<Expr>,
    ) -> Result<Self, SolveError> {
        let dim = x0.len();
        if dim == 0 {
            return Err(SolveError::Config("system dimension must be at least 1".into()));
        }
        if rhs.len() != dim {
            return Err(SolveError::Config(format!(
                "{} right-hand sides for a {dim}-dimensional state",
                rhs.len()
            )));
        }
        if let Some(v) = x0.iter().find(|v| !v.is_finite()) {
            return Err(SolveError::Config(format!("initial state {v} is not finite")));
        }
        for (i, e) in rhs.iter().enumerate() {
            let m = e.max_state_index();
            if m > dim {
                return Err(SolveError::Config(format!(
                    "rhs{} references x{m} but dim = {dim}",
                    i + 1
                )));
            }
            if e.uses_var(crate::expr::Var::Radius) {
                return Err(SolveError::Config(format!(
                    "rhs{} references the radius variable r",
                    i + 1
                )));
            }
        }
        Ok(Self {
            label: label.into(),
            order,
            x0,
            rhs,
        })
    }

    /// Parse the right-hand sides from text.
    pub fn from_text(
        label: impl Into<String>,
        alpha: f64,
        x0: Vec<f64>,
        rhs: &[&str],
    ) -> Result<Self, SolveError> {
        let order = FracOrder::new(alpha)?;
        let rhs = rhs
            .iter()
            .enumerate()
            .map(|(i, s)| {
                Expr::parse(s).map_err(|e| SolveError::Config(format!("rhs{}: {e}", i + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(label, order, x0, rhs)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self) -> FracOrder {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn rhs(&self) -> &[Expr] {
        &self.rhs
    }

    /// Copy with a different initial state.
    pub fn with_x0(&self, x0: Vec<f64>) -> Result<Self, SolveError> {
        Self::new(self.label.clone(), self.order, x0, self.rhs.clone())
    }

    /// Copy with a different order.
    pub fn with_order(&self, order: FracOrder) -> Self {
        Self {
            order,
            ..self.clone()
        }
    }

    fn eval_into(&self, t: f64, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        for (slot, e) in out.iter_mut().zip(&self.rhs) {
            *slot = e.eval(t, x)?;
        }
        Ok(())
    }
}

/// Solver output: one series per state component on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: TimeGrid,
    states: Vec<SampleSeries>,
    system: SystemDef,
}

impl Trajectory {
    pub fn new(system: SystemDef, states: Vec<SampleSeries>) -> Result<Self, SolveError> {
        let Some(first) = states.first() else {
            return Err(SolveError::Config("trajectory without states".into()));
        };
        let grid = *first.grid();
        if states.len() != system.dim() || states.iter().any(|s| *s.grid() != grid) {
            return Err(SolveError::Config("state series do not match the system".into()));
        }
        Ok(Self {
            grid,
            states,
            system,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn states(&self) -> &[SampleSeries] {
        &self.states
    }

    pub fn system(&self) -> &SystemDef {
        &self.system
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// State vector at node `j`.
    pub fn state(&self, j: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.values()[j]).collect()
    }

    /// Euclidean norm of the state at every node.
    pub fn norms(&self) -> Vec<f64> {
        (0..self.len())
            .map(|j| {
                self.states
                    .iter()
                    .map(|s| s.values()[j] * s.values()[j])
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }
}

/// Integrate `system` over `grid`.
pub fn solve(system: &SystemDef, grid: &TimeGrid) -> Result<Trajectory, SolveError> {
    let columns = solve_with(system.order(), system.x0(), grid, |t, x, out| {
        system.eval_into(t, x, out)
    })?;
    let states = columns
        .into_iter()
        .map(|v| SampleSeries::new(*grid, v))
        .collect::<Result<Vec<_>, _>>()?;
    Trajectory::new(system.clone(), states)
}

/// Integrate a right-hand side given as a closure writing `f(t, x)` into its
/// third argument. Returns one column of samples per component.
pub fn solve_with<F>(
    order: FracOrder,
    x0: &[f64],
    grid: &TimeGrid,
    mut field: F,
) -> Result<Vec<Vec<f64>>, SolveError>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<(), EvalError>,
{
    let dim = x0.len();
    if dim == 0 {
        return Err(SolveError::Config("empty initial state".into()));
    }
    let n = grid.n_steps();
    let alpha = order.alpha();
    let h = grid.h();

    // lag-indexed weights
    let pow_a: Vec<f64> = (0..=n + 1).map(|m| (m as f64).powf(alpha)).collect();
    let pow_a1: Vec<f64> = (0..=n + 1).map(|m| (m as f64).powf(alpha + 1.0)).collect();
    let pred_w: Vec<f64> = (0..=n).map(|m| pow_a[m + 1] - pow_a[m]).collect();
    let corr_w: Vec<f64> = (0..=n)
        .map(|m| {
            if m == 0 {
                0.0
            } else {
                pow_a1[m + 1] + pow_a1[m - 1] - 2.0 * pow_a1[m]
            }
        })
        .collect();
    let h_alpha = h.powf(alpha);
    let pred_scale = h_alpha * rgamma(alpha + 1.0);
    let corr_scale = h_alpha * rgamma(alpha + 2.0);

    let mut states = vec![0.0; (n + 1) * dim];
    let mut fhist = vec![0.0; (n + 1) * dim];
    states[..dim].copy_from_slice(x0);
    field(grid.node(0), x0, &mut fhist[..dim])
        .map_err(|source| SolveError::Eval { step: 0, source })?;
    check_finite(&fhist[..dim], 0)?;

    let mut pred_acc = vec![0.0; dim];
    let mut corr_acc = vec![0.0; dim];
    let mut xp = vec![0.0; dim];
    let mut fp = vec![0.0; dim];

    for k in 0..n {
        let kf = k as f64;
        pred_acc.iter_mut().for_each(|v| *v = 0.0);
        corr_acc.iter_mut().for_each(|v| *v = 0.0);

        let a0 = pow_a1[k] - (kf - alpha) * pow_a[k + 1];
        for i in 0..dim {
            let f0 = fhist[i];
            pred_acc[i] = pred_w[k] * f0;
            corr_acc[i] = a0 * f0;
        }
        for j in 1..=k {
            let row = &fhist[j * dim..(j + 1) * dim];
            let bw = pred_w[k - j];
            let aw = corr_w[k - j + 1];
            for i in 0..dim {
                pred_acc[i] += bw * row[i];
                corr_acc[i] += aw * row[i];
            }
        }

        for i in 0..dim {
            xp[i] = x0[i] + pred_scale * pred_acc[i];
        }
        check_state(&xp, k)?;
        let t_next = grid.node(k + 1);
        field(t_next, &xp, &mut fp).map_err(|source| SolveError::Eval {
            step: k + 1,
            source,
        })?;
        check_finite(&fp, k)?;

        let next = &mut states[(k + 1) * dim..(k + 2) * dim];
        for i in 0..dim {
            next[i] = x0[i] + corr_scale * (fp[i] + corr_acc[i]);
        }
        check_state(next, k)?;
        let current = &states[(k + 1) * dim..(k + 2) * dim];
        field(t_next, current, &mut fhist[(k + 1) * dim..(k + 2) * dim]).map_err(|source| {
            SolveError::Eval {
                step: k + 1,
                source,
            }
        })?;
        check_finite(&fhist[(k + 1) * dim..(k + 2) * dim], k)?;
    }

    Ok((0..dim)
        .map(|i| (0..=n).map(|j| states[j * dim + i]).collect())
        .collect())
}

fn check_state(x: &[f64], last_valid_step: usize) -> Result<(), SolveError> {
    if x.iter().all(|v| v.is_finite() && v.abs() <= DIVERGENCE_LIMIT) {
        Ok(())
    } else {
        Err(SolveError::Divergence { last_valid_step })
    }
}

fn check_finite(f: &[f64], last_valid_step: usize) -> Result<(), SolveError> {
    if f.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(SolveError::Divergence { last_valid_step })
    }
}

/// Self-convergence measurement against a reference run at `min(h) / 4`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub h_ref: f64,
    /// `(h, max error over shared nodes and components)`
    pub entries: Vec<(f64, f64)>,
    /// Least-squares slope of `ln(error)` against `ln(h)`; `None` when some
    /// error is exactly zero.
    pub fitted_order: Option<f64>,
}

impl ConvergenceReport {
    /// Order expected for smooth fields, `min(2, 1 + alpha)`.
    pub fn expected_order(order: FracOrder) -> f64 {
        (1.0 + order.alpha()).min(2.0)
    }
}

pub fn convergence_study(
    system: &SystemDef,
    t0: f64,
    t_end: f64,
    h_list: &[f64],
) -> Result<ConvergenceReport, SolveError> {
    if h_list.len() < 2 {
        return Err(SolveError::Config("convergence study needs at least two step sizes".into()));
    }
    if h_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(SolveError::Config("step sizes must be strictly decreasing".into()));
    }
    let h_min = h_list[h_list.len() - 1];
    let h_ref = h_min / 4.0;
    let ref_grid = TimeGrid::spanning(t0, t_end, h_ref)?;
    let reference = solve(system, &ref_grid).map_err(|e| SolveError::AtStep {
        h: h_ref,
        source: Box::new(e),
    })?;

    let mut entries = Vec::with_capacity(h_list.len());
    for &h in h_list {
        let ratio = (h / h_ref).round();
        if ((h / h_ref) - ratio).abs() > 1e-9 * ratio {
            return Err(SolveError::Config(format!(
                "h = {h} is not an integer multiple of the reference step {h_ref}"
            )));
        }
        let stride = ratio as usize;
        let grid = TimeGrid::spanning(t0, t_end, h)?;
        let run = solve(system, &grid).map_err(|e| SolveError::AtStep {
            h,
            source: Box::new(e),
        })?;
        let mut err = 0.0_f64;
        for (coarse, fine) in run.states().iter().zip(reference.states()) {
            for (j, v) in coarse.values().iter().enumerate() {
                err = err.max((v - fine.values()[j * stride]).abs());
            }
        }
        entries.push((h, err));
    }

    let fitted_order = if entries.iter().all(|&(_, e)| e > 0.0) {
        let pts: Vec<(f64, f64)> = entries.iter().map(|&(h, e)| (h.ln(), e.ln())).collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    } else {
        None
    };

    Ok(ConvergenceReport {
        h_ref,
        entries,
        fitted_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn system_validation() {
        assert!(SystemDef::from_text("s", 0.5, vec![1.0], &["-x2"]).is_err());
        assert!(SystemDef::from_text("s", 0.5, vec![1.0, 2.0], &["-x1"]).is_err());
        assert!(SystemDef::from_text("s", 1.5, vec![1.0], &["-x1"]).is_err());
        assert!(SystemDef::from_text("s", 0.5, vec![1.0], &["-x1 + r"]).is_err());
        assert!(SystemDef::from_text("s", 0.5, vec![], &[]).is_err());
    }

    #[test]
    fn zero_field_is_constant() {
        let sys = SystemDef::from_text("zero", 0.6, vec![7.0], &["0"]).unwrap();
        let grid = TimeGrid::spanning(0.0, 3.0, 0.01).unwrap();
        let traj = solve(&sys, &grid).unwrap();
        assert!(traj.states()[0].values().iter().all(|&v| v == 7.0));
    }

    #[test]
    fn first_node_is_initial_state() {
        let sys = SystemDef::from_text("s", 0.8, vec![0.1, -3.3], &["-x1*x2", "sin(t) - x2"]).unwrap();
        let grid = TimeGrid::spanning(0.0, 1.0, 0.05).unwrap();
        let traj = solve(&sys, &grid).unwrap();
        assert_eq!(traj.state(0), vec![0.1, -3.3]);
    }

    #[test]
    fn divergence_is_reported() {
        let sys = SystemDef::from_text("blowup", 0.9, vec![1.0], &["x1^3"]).unwrap();
        let grid = TimeGrid::spanning(0.0, 10.0, 0.01).unwrap();
        match solve(&sys, &grid) {
            Err(SolveError::Divergence { last_valid_step }) => assert!(last_valid_step < 1000),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn eval_errors_carry_the_step() {
        let sys = SystemDef::from_text("pole", 0.5, vec![1.0], &["1/(t - 0.5)"]).unwrap();
        let grid = TimeGrid::spanning(0.0, 1.0, 0.1).unwrap();
        match solve(&sys, &grid) {
            Err(SolveError::Eval { step, source }) => {
                assert_eq!(step, 5);
                assert!(matches!(source, EvalError::DivisionByZero { .. }));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn convergence_study_validation() {
        let sys = SystemDef::from_text("s", 0.5, vec![1.0], &["-x1"]).unwrap();
        assert!(convergence_study(&sys, 0.0, 1.0, &[0.01]).is_err());
        assert!(convergence_study(&sys, 0.0, 1.0, &[0.005, 0.01]).is_err());
    }

    #[test]
    fn zero_field_has_zero_errors() {
        let sys = SystemDef::from_text("zero", 0.5, vec![2.0], &["0"]).unwrap();
        let rep = convergence_study(&sys, 0.0, 1.0, &[0.1, 0.05]).unwrap();
        assert!(rep.entries.iter().all(|&(_, e)| e == 0.0));
        assert_eq!(rep.fitted_order, None);
    }
}
