//! Lyapunov-certificate checks along computed trajectories.
//!
//! A candidate `V(t, x)` is certified numerically by three families of
//! checks: the class-K sandwich `gamma1(|x|) <= V <= gamma2(|x|)`, the
//! dissipation inequality `C D^alpha V(t, x(t)) <= -gamma3(|x|)`, and a
//! Mittag-Leffler decay envelope on `|x|^2`. Norms are Euclidean.

use thiserror::Error;

use crate::expr::{EvalError, Expr, Var};
use crate::frac_ops::{caputo_l1, FracError, FracOrder, SampleSeries};
use crate::ineq::{default_tolerance, Direction, IneqError, IneqReport};
use crate::solver::Trajectory;
use crate::special_fn::{mittag_leffler, MLParams, SpecialFnError};

/// Class-K functions are checked on `r = k r_max / CLASS_K_SAMPLES`.
pub const CLASS_K_R_MAX: f64 = 10.0;
pub const CLASS_K_SAMPLES: usize = 200;

/// Relative headroom on the Mittag-Leffler envelope.
pub const ENVELOPE_SLACK: f64 = 0.05;

/// Rounding allowance for the sandwich comparison, in units of machine
/// epsilon relative to the compared magnitudes.
pub const SANDWICH_ULPS: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("evaluation failed at node {node}: {source}")]
    Eval { node: usize, source: EvalError },
    #[error(transparent)]
    Ineq(#[from] IneqError),
    #[error(transparent)]
    Frac(#[from] FracError),
    #[error(transparent)]
    Special(#[from] SpecialFnError),
}

/// Check that `gamma(r)` is a class-K function on the sampled grid.
pub fn validate_class_k(name: &str, gamma: &Expr) -> Result<(), StabilityError> {
    if gamma.uses_state() || gamma.uses_time() {
        return Err(StabilityError::Config(format!("{name} = '{gamma}' must depend on r only")));
    }
    let eval = |r: f64| {
        gamma
            .eval_radius(r)
            .map_err(|e| StabilityError::Config(format!("{name} = '{gamma}' at r = {r}: {e}")))
    };
    let at_zero = eval(0.0)?;
    if at_zero != 0.0 {
        return Err(StabilityError::Config(format!(
            "{name} = '{gamma}' is {at_zero} at r = 0, not 0"
        )));
    }
    let mut prev = at_zero;
    for k in 1..=CLASS_K_SAMPLES {
        let r = CLASS_K_R_MAX * k as f64 / CLASS_K_SAMPLES as f64;
        let v = eval(r)?;
        if !(v > prev) {
            return Err(StabilityError::Config(format!(
                "{name} = '{gamma}' is not strictly increasing near r = {r}"
            )));
        }
        prev = v;
    }
    Ok(())
}

/// `V(t, x)` with optional class-K bounds and dissipation rate.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovCandidate {
    expr: Expr,
    lower: Option<Expr>,
    upper: Option<Expr>,
    rate: Option<Expr>,
}

impl LyapunovCandidate {
    pub fn new(expr: Expr) -> Result<Self, StabilityError> {
        if expr.uses_var(Var::Radius) {
            return Err(StabilityError::Config(format!("V = '{expr}' must not use r")));
        }
        Ok(Self {
            expr,
            lower: None,
            upper: None,
            rate: None,
        })
    }

    /// Parse `V` and optional `gamma1`, `gamma2`, `gamma3` from text.
    pub fn parse(
        v: &str,
        lower: Option<&str>,
        upper: Option<&str>,
        rate: Option<&str>,
    ) -> Result<Self, StabilityError> {
        let p = |what: &str, s: &str| {
            Expr::parse(s).map_err(|e| StabilityError::Config(format!("{what}: {e}")))
        };
        let mut c = Self::new(p("V", v)?)?;
        if let (Some(l), Some(u)) = (lower, upper) {
            c = c.with_bounds(p("gamma1", l)?, p("gamma2", u)?)?;
        } else if lower.is_some() || upper.is_some() {
            return Err(StabilityError::Config("gamma1 and gamma2 must be given together".into()));
        }
        if let Some(r) = rate {
            c = c.with_rate(p("gamma3", r)?)?;
        }
        Ok(c)
    }

    pub fn with_bounds(mut self, lower: Expr, upper: Expr) -> Result<Self, StabilityError> {
        validate_class_k("gamma1", &lower)?;
        validate_class_k("gamma2", &upper)?;
        self.lower = Some(lower);
        self.upper = Some(upper);
        Ok(self)
    }

    pub fn with_rate(mut self, rate: Expr) -> Result<Self, StabilityError> {
        validate_class_k("gamma3", &rate)?;
        self.rate = Some(rate);
        Ok(self)
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn lower(&self) -> Option<&Expr> {
        self.lower.as_ref()
    }

    pub fn upper(&self) -> Option<&Expr> {
        self.upper.as_ref()
    }

    pub fn rate(&self) -> Option<&Expr> {
        self.rate.as_ref()
    }
}

fn eval_radius_at(gamma: &Expr, r: f64, node: usize) -> Result<f64, StabilityError> {
    gamma
        .eval_radius(r)
        .map_err(|source| StabilityError::Eval { node, source })
}

/// `V(t_j, x(t_j))` at every node.
pub fn evaluate_candidate(
    v: &LyapunovCandidate,
    traj: &Trajectory,
) -> Result<SampleSeries, StabilityError> {
    let need = v.expr.max_state_index();
    if need > traj.dim() {
        return Err(StabilityError::Config(format!(
            "V references x{need} but the trajectory has dimension {}",
            traj.dim()
        )));
    }
    let grid = *traj.grid();
    let values = grid
        .nodes()
        .enumerate()
        .map(|(j, t)| {
            v.expr
                .eval(t, &traj.state(j))
                .map_err(|source| StabilityError::Eval { node: j, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SampleSeries::new(grid, values)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichReport {
    pub ok: bool,
    /// `min_j min(V - gamma1, gamma2 - V)`
    pub worst_slack: f64,
    pub worst_node: usize,
}

/// `gamma1(|x|) <= V(t, x) <= gamma2(|x|)` at every node.
pub fn check_sandwich(
    v: &LyapunovCandidate,
    traj: &Trajectory,
) -> Result<SandwichReport, StabilityError> {
    let (Some(lower), Some(upper)) = (v.lower(), v.upper()) else {
        return Err(StabilityError::Config("sandwich check needs gamma1 and gamma2".into()));
    };
    let vs = evaluate_candidate(v, traj)?;
    let norms = traj.norms();
    let mut report = SandwichReport {
        ok: true,
        worst_slack: f64::INFINITY,
        worst_node: 0,
    };
    for (j, (&vj, &r)) in vs.values().iter().zip(&norms).enumerate() {
        let lo = eval_radius_at(lower, r, j)?;
        let hi = eval_radius_at(upper, r, j)?;
        let slack = (vj - lo).min(hi - vj);
        let allowance = SANDWICH_ULPS * f64::EPSILON * vj.abs().max(lo.abs()).max(hi.abs());
        if slack < -allowance {
            report.ok = false;
        }
        if slack < report.worst_slack {
            report.worst_slack = slack;
            report.worst_node = j;
        }
    }
    Ok(report)
}

/// `C D^alpha V(t, x(t)) <= -gamma3(|x(t)|)`, with the derivative taken by
/// the L1 scheme on the sampled composite.
///
/// Node 0 is excluded: the scheme's zero-history convention returns 0 there,
/// while the true derivative of `V` along a fractional trajectory is
/// generally nonzero at `t0`.
pub fn check_dissipation(
    v: &LyapunovCandidate,
    traj: &Trajectory,
    order: FracOrder,
) -> Result<IneqReport, StabilityError> {
    let Some(rate) = v.rate() else {
        return Err(StabilityError::Config("dissipation check needs gamma3".into()));
    };
    let vs = evaluate_candidate(v, traj)?;
    let dv = caputo_l1(&vs, order)?;
    let norms = traj.norms();
    let bound = norms
        .iter()
        .enumerate()
        .map(|(j, &r)| eval_radius_at(rate, r, j).map(|g| -g))
        .collect::<Result<Vec<_>, _>>()?;
    let grid = *traj.grid();
    let mut lhs = dv.into_values();
    let mut rhs = bound;
    // node 0 compares equal by construction
    lhs[0] = 0.0;
    rhs[0] = 0.0;
    let rhs = SampleSeries::new(grid, rhs)?;
    let tol = default_tolerance(&grid, order, rhs.max_abs());
    Ok(IneqReport::with_tol(SampleSeries::new(grid, lhs)?, rhs, Direction::AtMost, tol)?)
}

/// `|x(t_j)|^2 <= amplification * E_alpha(-rate t_j^alpha) * |x(0)|^2 * (1 + 0.05)`.
pub fn check_ml_envelope(
    traj: &Trajectory,
    order: FracOrder,
    rate: f64,
    amplification: f64,
) -> Result<IneqReport, StabilityError> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(StabilityError::Domain(format!("envelope rate must be > 0, got {rate}")));
    }
    if !(amplification > 0.0) || !amplification.is_finite() {
        return Err(StabilityError::Domain(format!(
            "envelope amplification must be > 0, got {amplification}"
        )));
    }
    let params = MLParams::one(order.alpha())?;
    let grid = *traj.grid();
    let norms = traj.norms();
    let n0 = norms[0] * norms[0];
    let lhs = SampleSeries::new(grid, norms.iter().map(|r| r * r).collect())?;
    let rhs = grid
        .nodes()
        .map(|t| {
            let z = -rate * (t - grid.t0()).powf(order.alpha());
            mittag_leffler(params, z).map(|e| amplification * e * n0 * (1.0 + ENVELOPE_SLACK))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rhs = SampleSeries::new(grid, rhs)?;
    Ok(IneqReport::with_tol(lhs, rhs, Direction::AtMost, 0.0)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallReport {
    pub ok: bool,
    pub radius: f64,
    pub max_norm: f64,
    /// First node with `|x| > radius`.
    pub first_exit: Option<usize>,
}

/// `|x(t_j)| <= r` at every node, for `0 < r < 1`.
pub fn check_local_ball(traj: &Trajectory, r: f64) -> Result<BallReport, StabilityError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(StabilityError::Domain(format!("ball radius must lie in (0, 1), got {r}")));
    }
    let norms = traj.norms();
    let first_exit = norms.iter().position(|&n| n > r);
    Ok(BallReport {
        ok: first_exit.is_none(),
        radius: r,
        max_norm: norms.iter().copied().fold(0.0, f64::max),
        first_exit,
    })
}

/// Outcome of all checks run for one candidate and trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub sandwich: Option<SandwichReport>,
    pub dissipation: Option<IneqReport>,
    pub envelope: Option<IneqReport>,
    pub ball: Option<BallReport>,
}

impl StabilityReport {
    pub fn passed(&self) -> bool {
        self.sandwich.map_or(true, |s| s.ok)
            && self.dissipation.as_ref().map_or(true, IneqReport::passed)
            && self.envelope.as_ref().map_or(true, IneqReport::passed)
            && self.ball.map_or(true, |b| b.ok)
    }

    /// Human-readable block, one check per line.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        if let Some(s) = &self.sandwich {
            out.push_str(&format!(
                "sandwich,{},worst_slack={:e},node={}\n",
                pass_str(s.ok),
                s.worst_slack,
                s.worst_node
            ));
        }
        if let Some(d) = &self.dissipation {
            out.push_str(&format!(
                "dissipation,{},max_violation={:e},tol={:e}\n",
                d.verdict().as_str(),
                d.max_violation(),
                d.tol()
            ));
        }
        if let Some(e) = &self.envelope {
            out.push_str(&format!(
                "ml_envelope,{},max_violation={:e}\n",
                e.verdict().as_str(),
                e.max_violation()
            ));
        }
        if let Some(b) = &self.ball {
            out.push_str(&format!(
                "ball,{},radius={},max_norm={:e}\n",
                pass_str(b.ok),
                b.radius,
                b.max_norm
            ));
        }
        out
    }
}

fn pass_str(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}
