//! Numerical verification of Caputo product and power inequalities.
//!
//! Every verifier samples both sides of an inequality with the L1 scheme and
//! returns an [`IneqReport`]. Discretization can produce small spurious
//! violations, so a report passes when the worst violation is below
//! `10 h^min(1, 2-alpha) * scale`, or when it shrinks by at least a factor
//! 1.5 under grid halving and the refined run is within tolerance.

mod generate;
mod report;
pub mod suite;

use thiserror::Error;

use crate::expr::{BinOp, EvalError, Expr, Var};
use crate::frac_ops::{caputo_l1, FracError, FracOrder, SampleSeries, TimeGrid};

pub use generate::{
    generate_composite, generate_instance, BetaProfile, CompositeInstance, CompositeProfile,
    Instance, Profile, XKind,
};
pub use report::{default_tolerance, Direction, IneqReport, Refinement, Verdict};

/// Lower bound on `x` when `x^beta` is formed with `beta < 1`.
pub const SINGULARITY_FLOOR: f64 = 1e-8;

/// Residual bound for exact algebraic identities, relative to their scale.
pub const IDENTITY_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IneqError {
    #[error("envelope: {0}")]
    Envelope(String),
    #[error("precondition violated at node {node}: {message}")]
    Precondition { node: usize, message: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("x^{beta} with beta < 1 needs x >= {SINGULARITY_FLOOR}, but x[{node}] = {value}")]
    Singularity { node: usize, beta: f64, value: f64 },
    #[error(transparent)]
    Frac(#[from] FracError),
    #[error("envelope evaluation at node {node}: {source}")]
    Eval { node: usize, source: EvalError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnvelopeKind {
    MonoDecreasing,
    MonoIncreasing,
    NonnegDecreasing,
    PositiveDecreasing,
}

impl EnvelopeKind {
    pub fn is_decreasing(self) -> bool {
        !matches!(self, EnvelopeKind::MonoIncreasing)
    }

    pub fn name(self) -> &'static str {
        match self {
            EnvelopeKind::MonoDecreasing => "mono_decreasing",
            EnvelopeKind::MonoIncreasing => "mono_increasing",
            EnvelopeKind::NonnegDecreasing => "nonneg_decreasing",
            EnvelopeKind::PositiveDecreasing => "positive_decreasing",
        }
    }
}

/// A monotone multiplier `phi(t)` given as an expression in `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSpec {
    kind: EnvelopeKind,
    expr: Expr,
}

impl EnvelopeSpec {
    pub fn new(kind: EnvelopeKind, expr: Expr) -> Result<Self, IneqError> {
        if expr.uses_state() || expr.uses_var(Var::Radius) {
            return Err(IneqError::Envelope(format!(
                "'{expr}' must depend on t only"
            )));
        }
        Ok(Self { kind, expr })
    }

    pub fn parse(kind: EnvelopeKind, text: &str) -> Result<Self, IneqError> {
        let expr = Expr::parse(text).map_err(|e| IneqError::Envelope(e.to_string()))?;
        Self::new(kind, expr)
    }

    pub fn constant(kind: EnvelopeKind, value: f64) -> Self {
        Self {
            kind,
            expr: Expr::Num(value),
        }
    }

    pub fn kind(&self) -> EnvelopeKind {
        self.kind
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// `1 / phi` as an increasing envelope; requires a positive decreasing `phi`.
    pub fn reciprocal(&self) -> Result<Self, IneqError> {
        if self.kind != EnvelopeKind::PositiveDecreasing {
            return Err(IneqError::Envelope(format!(
                "reciprocal needs a positive_decreasing envelope, got {}",
                self.kind.name()
            )));
        }
        Ok(Self {
            kind: EnvelopeKind::MonoIncreasing,
            expr: Expr::Binary {
                op: BinOp::Div,
                lhs: Box::new(Expr::Num(1.0)),
                rhs: Box::new(self.expr.clone()),
            },
        })
    }

    /// Sample on `grid`, checking monotonicity and sign for the declared kind.
    pub fn sample(&self, grid: &TimeGrid) -> Result<SampleSeries, IneqError> {
        let values = grid
            .nodes()
            .enumerate()
            .map(|(node, t)| {
                self.expr
                    .eval(t, &[])
                    .map_err(|source| IneqError::Eval { node, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        for (j, w) in values.windows(2).enumerate() {
            // a few ulps of slack for rounding in the expression itself
            let slack = 4.0 * f64::EPSILON * w[0].abs().max(w[1].abs());
            let bad = if self.kind.is_decreasing() {
                w[1] > w[0] + slack
            } else {
                w[1] < w[0] - slack
            };
            if bad {
                return Err(IneqError::Envelope(format!(
                    "'{}' is not {} between nodes {j} and {} ({} -> {})",
                    self.expr,
                    if self.kind.is_decreasing() { "decreasing" } else { "increasing" },
                    j + 1,
                    w[0],
                    w[1]
                )));
            }
        }
        let sign_ok: Option<fn(f64) -> bool> = match self.kind {
            EnvelopeKind::NonnegDecreasing => Some(|v| v >= 0.0),
            EnvelopeKind::PositiveDecreasing => Some(|v| v > 0.0),
            _ => None,
        };
        if let Some(ok) = sign_ok {
            if let Some(j) = values.iter().position(|&v| !ok(v)) {
                return Err(IneqError::Envelope(format!(
                    "'{}' violates the {} sign condition at node {j} (value {})",
                    self.expr,
                    self.kind.name(),
                    values[j]
                )));
            }
        }
        Ok(SampleSeries::new(*grid, values)?)
    }
}

/// A rational exponent `num / den`, stored in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: u64,
    den: u64,
}

impl Rational {
    pub fn new(num: u64, den: u64) -> Result<Self, IneqError> {
        if den == 0 {
            return Err(IneqError::Domain("rational exponent with zero denominator".into()));
        }
        let g = gcd(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn integer(k: u64) -> Self {
        Self { num: k, den: 1 }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Even numerator in lowest terms, so `x^(num/den) = |x|^(num/den)`.
    pub fn has_even_numerator(&self) -> bool {
        self.num % 2 == 0 && self.num > 0
    }
}

impl std::fmt::Display for Rational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// `x^beta`, with `x^beta = |x|^beta` for negative `x` when `even` is set.
fn pow_even(x: f64, beta: f64, even: bool) -> f64 {
    if x >= 0.0 || !even {
        x.powf(beta)
    } else {
        (-x).powf(beta)
    }
}

/// Derivative of [`pow_even`] in `x`: `beta sgn(x) |x|^(beta-1)`.
fn dpow_even(x: f64, beta: f64) -> f64 {
    if beta == 1.0 {
        return 1.0;
    }
    if x == 0.0 {
        return if beta > 1.0 { 0.0 } else { f64::INFINITY };
    }
    x.signum() * beta * x.abs().powf(beta - 1.0)
}

fn require_nonneg(x: &SampleSeries, what: &str) -> Result<(), IneqError> {
    match x.values().iter().position(|&v| v < 0.0) {
        Some(node) => Err(IneqError::Precondition {
            node,
            message: format!("{what} must be non-negative, got {}", x.values()[node]),
        }),
        None => Ok(()),
    }
}

fn require_positive(x: &SampleSeries, what: &str) -> Result<(), IneqError> {
    match x.values().iter().position(|&v| v <= 0.0) {
        Some(node) => Err(IneqError::Precondition {
            node,
            message: format!("{what} must be positive, got {}", x.values()[node]),
        }),
        None => Ok(()),
    }
}

fn require_floor(x: &SampleSeries, beta: f64) -> Result<(), IneqError> {
    if beta > 0.0 && beta < 1.0 {
        if let Some(node) = x.values().iter().position(|&v| v < SINGULARITY_FLOOR) {
            return Err(IneqError::Singularity {
                node,
                beta,
                value: x.values()[node],
            });
        }
    }
    Ok(())
}

fn require_decreasing(phi: &EnvelopeSpec) -> Result<(), IneqError> {
    if phi.kind().is_decreasing() {
        Ok(())
    } else {
        Err(IneqError::Envelope(format!(
            "expected a decreasing envelope, got {}",
            phi.kind().name()
        )))
    }
}

fn times(a: &SampleSeries, b: &SampleSeries) -> Result<SampleSeries, IneqError> {
    Ok(a.zip_with(b, |u, v| u * v)?)
}

/// `C D^alpha (phi x) <= phi C D^alpha x` for decreasing `phi` and `x >= 0`.
pub fn verify_product_decreasing(
    phi: &EnvelopeSpec,
    x: &SampleSeries,
    order: FracOrder,
) -> Result<IneqReport, IneqError> {
    require_decreasing(phi)?;
    require_nonneg(x, "x")?;
    let p = phi.sample(x.grid())?;
    product_report(&p, x, order, Direction::AtMost)
}

/// `C D^alpha (phi x) >= phi C D^alpha x` for increasing `phi` and `x >= 0`.
pub fn verify_product_increasing(
    phi: &EnvelopeSpec,
    x: &SampleSeries,
    order: FracOrder,
) -> Result<IneqReport, IneqError> {
    if phi.kind() != EnvelopeKind::MonoIncreasing {
        return Err(IneqError::Envelope(format!(
            "expected an increasing envelope, got {}",
            phi.kind().name()
        )));
    }
    require_nonneg(x, "x")?;
    let p = phi.sample(x.grid())?;
    product_report(&p, x, order, Direction::AtLeast)
}

fn product_report(
    phi: &SampleSeries,
    x: &SampleSeries,
    order: FracOrder,
    direction: Direction,
) -> Result<IneqReport, IneqError> {
    let lhs = caputo_l1(&times(phi, x)?, order)?;
    let rhs = times(phi, &caputo_l1(x, order)?)?;
    IneqReport::new(lhs, rhs, direction, order)
}

/// `C D^alpha (phi^(2n+1) x^beta) <= phi^(2n+1) C D^alpha x^beta` for
/// decreasing `phi`, `x >= 0` and real `beta >= 0`.
pub fn verify_odd_power_envelope(
    phi: &EnvelopeSpec,
    n: u32,
    x: &SampleSeries,
    beta: f64,
    order: FracOrder,
) -> Result<IneqReport, IneqError> {
    require_decreasing(phi)?;
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(IneqError::Domain(format!("beta must be >= 0, got {beta}")));
    }
    require_nonneg(x, "x")?;
    require_floor(x, beta)?;
    let p = phi.sample(x.grid())?.map(|v| v.powi(2 * n as i32 + 1))?;
    let xb = x.map(|v| v.powf(beta))?;
    product_report(&p, &xb, order, Direction::AtMost)
}

/// `C D^alpha (phi x^(2k)) <= phi C D^alpha x^(2k)` for non-negative
/// decreasing `phi` and any real `x`.
pub fn verify_even_power_envelope(
    phi: &EnvelopeSpec,
    k: u32,
    x: &SampleSeries,
    order: FracOrder,
) -> Result<IneqReport, IneqError> {
    require_decreasing(phi)?;
    if k == 0 {
        return Err(IneqError::Domain("the even power 2k needs k >= 1".into()));
    }
    let p = phi.sample(x.grid())?;
    require_nonneg(&p, "phi")?;
    let xb = x.map(|v| v.powi(2 * k as i32))?;
    product_report(&p, &xb, order, Direction::AtMost)
}

/// `C D^alpha x^beta <= beta x^(beta-1) C D^alpha x` for `beta >= 1`.
///
/// With `require_nonneg` set, `x >= 0` is required and any `beta >= 1` is
/// allowed. Otherwise `x` may change sign and `beta` must have an even
/// numerator.
pub fn verify_power_rule(
    x: &SampleSeries,
    beta: Rational,
    order: FracOrder,
    require_nonneg_x: bool,
) -> Result<IneqReport, IneqError> {
    let b = beta.value();
    if b < 1.0 {
        return Err(IneqError::Domain(format!("beta = {beta} is below 1")));
    }
    if require_nonneg_x {
        require_nonneg(x, "x")?;
    } else if !beta.has_even_numerator() {
        return Err(IneqError::Domain(format!(
            "beta = {beta} needs an even numerator for sign-changing x"
        )));
    }
    let even = beta.has_even_numerator();
    let xb = x.map(|v| pow_even(v, b, even))?;
    let lhs = caputo_l1(&xb, order)?;
    let dx = caputo_l1(x, order)?;
    let rhs = SampleSeries::from_fn(*x.grid(), {
        let xv = x.values();
        let dv = dx.values();
        let mut j = 0;
        move |_| {
            let v = dpow_even(xv[j], b) * dv[j];
            j += 1;
            v
        }
    })?;
    IneqReport::new(lhs, rhs, Direction::AtMost, order)
}

/// One summand `coef * phi^p * x_component^beta` of a composite function.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerTerm {
    /// 0-based index into the state series.
    pub component: usize,
    pub coef: f64,
    pub p: f64,
    pub beta: Rational,
    pub envelope: Option<EnvelopeSpec>,
}

impl PowerTerm {
    pub fn plain(component: usize, coef: f64, beta: Rational) -> Self {
        Self {
            component,
            coef,
            p: 1.0,
            beta,
            envelope: None,
        }
    }

    pub fn enveloped(component: usize, coef: f64, envelope: EnvelopeSpec, p: f64, beta: Rational) -> Self {
        Self {
            component,
            coef,
            p,
            beta,
            envelope: Some(envelope),
        }
    }
}

/// `C D^alpha sum_i c_i phi_i^p_i x_i^beta_i <= sum_i c_i phi_i^p_i beta_i x_i^(beta_i-1) C D^alpha x_i`.
///
/// Covers every sum of enveloped and plain power terms with non-negative
/// coefficients, `p >= 1`, and `beta >= 1` (even numerator unless the
/// component is non-negative throughout).
pub fn verify_composite(
    terms: &[PowerTerm],
    xs: &[SampleSeries],
    order: FracOrder,
) -> Result<IneqReport, IneqError> {
    let Some(first) = xs.first() else {
        return Err(IneqError::Domain("no state series".into()));
    };
    if terms.is_empty() {
        return Err(IneqError::Domain("no terms".into()));
    }
    let grid = *first.grid();
    if xs.iter().any(|s| *s.grid() != grid) {
        return Err(IneqError::Domain("state series live on different grids".into()));
    }
    let mut total = vec![0.0; grid.len()];
    let mut bound = vec![0.0; grid.len()];
    let mut derivs: Vec<Option<SampleSeries>> = vec![None; xs.len()];
    for (i, term) in terms.iter().enumerate() {
        let x = xs.get(term.component).ok_or_else(|| {
            IneqError::Domain(format!(
                "term {i} references component {} of {}",
                term.component,
                xs.len()
            ))
        })?;
        if !(term.coef >= 0.0) {
            return Err(IneqError::Domain(format!("term {i}: coefficient {} < 0", term.coef)));
        }
        if !(term.p >= 1.0) {
            return Err(IneqError::Domain(format!("term {i}: envelope power {} < 1", term.p)));
        }
        let b = term.beta.value();
        if b < 1.0 {
            return Err(IneqError::Domain(format!("term {i}: beta = {} < 1", term.beta)));
        }
        let even = term.beta.has_even_numerator();
        if !even && x.values().iter().any(|&v| v < 0.0) {
            return Err(IneqError::Domain(format!(
                "term {i}: beta = {} has an odd numerator but x{} changes sign",
                term.beta,
                term.component + 1
            )));
        }
        let weight = match &term.envelope {
            Some(env) => {
                require_decreasing(env)?;
                let s = env.sample(&grid)?;
                require_nonneg(&s, "envelope")?;
                s.map(|v| term.coef * v.powf(term.p))?.into_values()
            }
            None => vec![term.coef; grid.len()],
        };
        let dx = match &derivs[term.component] {
            Some(d) => d.clone(),
            None => {
                let d = caputo_l1(x, order)?;
                derivs[term.component] = Some(d.clone());
                d
            }
        };
        for j in 0..grid.len() {
            let v = x.values()[j];
            total[j] += weight[j] * pow_even(v, b, even);
            bound[j] += weight[j] * dpow_even(v, b) * dx.values()[j];
        }
    }
    let lhs = caputo_l1(&SampleSeries::new(grid, total)?, order)?;
    let rhs = SampleSeries::new(grid, bound)?;
    IneqReport::new(lhs, rhs, Direction::AtMost, order)
}

/// Outcome of evaluating an exact algebraic identity on sampled data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub max_residual: f64,
    pub scale: f64,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.max_residual <= IDENTITY_RTOL * self.scale
    }

    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.max_residual / self.scale
        } else {
            self.max_residual
        }
    }
}

struct PowerPieces {
    /// C D^alpha (phi x^beta)
    d_phi_xb: Vec<f64>,
    /// C D^alpha x^beta
    d_xb: Vec<f64>,
    /// beta x^(beta-1) C D^alpha x
    chain: Vec<f64>,
    phi: Vec<f64>,
}

fn power_pieces(
    phi: &SampleSeries,
    x: &SampleSeries,
    beta: f64,
    order: FracOrder,
) -> Result<PowerPieces, IneqError> {
    let xb = x.map(|v| v.powf(beta))?;
    let d_phi_xb = caputo_l1(&times(phi, &xb)?, order)?.into_values();
    let d_xb = caputo_l1(&xb, order)?.into_values();
    let dx = caputo_l1(x, order)?;
    let chain = x
        .values()
        .iter()
        .zip(dx.values())
        .map(|(&v, &d)| beta * v.powf(beta - 1.0) * d)
        .collect();
    Ok(PowerPieces {
        d_phi_xb,
        d_xb,
        chain,
        phi: phi.values().to_vec(),
    })
}

/// Evaluates the two-bracket split
/// `D(phi x^b) - phi b x^(b-1) D x = [D(phi x^b) - phi D x^b] + phi [D x^b - b x^(b-1) D x]`
/// on the discrete operator and returns the worst pointwise residual.
pub fn verify_decomposition_nr4(
    phi: &EnvelopeSpec,
    x: &SampleSeries,
    beta: f64,
    order: FracOrder,
) -> Result<IdentityCheck, IneqError> {
    require_decreasing(phi)?;
    if !(beta >= 1.0) {
        return Err(IneqError::Domain(format!("beta must be >= 1, got {beta}")));
    }
    require_nonneg(x, "x")?;
    let p = phi.sample(x.grid())?;
    require_nonneg(&p, "phi")?;
    let pc = power_pieces(&p, x, beta, order)?;
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;
    for j in 0..x.len() {
        let phi_j = pc.phi[j];
        let left = pc.d_phi_xb[j] - phi_j * pc.chain[j];
        let right = (pc.d_phi_xb[j] - phi_j * pc.d_xb[j]) + phi_j * (pc.d_xb[j] - pc.chain[j]);
        worst = worst.max((left - right).abs());
        scale = scale
            .max(pc.d_phi_xb[j].abs())
            .max((phi_j * pc.chain[j]).abs())
            .max((phi_j * pc.d_xb[j]).abs());
    }
    Ok(IdentityCheck {
        max_residual: worst,
        scale,
    })
}

/// Pieces of the `f + g` split of `D x^b - b x^(b-1) D x` with a positive
/// decreasing envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct Nr6Decomposition {
    /// `f = (1/phi) [D(phi x^b) - phi b x^(b-1) D x]`
    pub f: SampleSeries,
    /// `g = (1/phi) [phi D x^b - D(phi x^b)]`
    pub g: SampleSeries,
    /// `D(phi x^b) <= phi b x^(b-1) D x`, equivalent to `f <= 0`.
    pub f_report: IneqReport,
    /// `D((1/phi) (phi x^b)) >= (1/phi) D(phi x^b)`, equivalent to `g >= 0`.
    pub g_report: IneqReport,
    /// `max(0, max g)`: how far `g` rises above zero.
    pub g_max_positive: f64,
    /// Residual of `D x^b - b x^(b-1) D x = f + g`.
    pub identity: IdentityCheck,
}

pub fn verify_decomposition_nr6(
    phi: &EnvelopeSpec,
    x: &SampleSeries,
    beta: f64,
    order: FracOrder,
) -> Result<Nr6Decomposition, IneqError> {
    if phi.kind() != EnvelopeKind::PositiveDecreasing {
        return Err(IneqError::Envelope(format!(
            "expected a positive_decreasing envelope, got {}",
            phi.kind().name()
        )));
    }
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(IneqError::Domain(format!("beta must be >= 0, got {beta}")));
    }
    require_positive(x, "x")?;
    let grid = *x.grid();
    let p = phi.sample(&grid)?;
    let pc = power_pieces(&p, x, beta, order)?;
    let n = x.len();
    let mut f = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(n);
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;
    for j in 0..n {
        let phi_j = pc.phi[j];
        let fj = (pc.d_phi_xb[j] - phi_j * pc.chain[j]) / phi_j;
        let gj = (phi_j * pc.d_xb[j] - pc.d_phi_xb[j]) / phi_j;
        let target = pc.d_xb[j] - pc.chain[j];
        worst = worst.max((target - (fj + gj)).abs());
        scale = scale.max(pc.d_xb[j].abs()).max(pc.chain[j].abs()).max(fj.abs()).max(gj.abs());
        f.push(fj);
        g.push(gj);
    }
    let f_report = IneqReport::new(
        SampleSeries::new(grid, pc.d_phi_xb.clone())?,
        SampleSeries::new(grid, pc.phi.iter().zip(&pc.chain).map(|(a, b)| a * b).collect())?,
        Direction::AtMost,
        order,
    )?;
    let y = SampleSeries::new(grid, pc.phi.iter().zip(x.values()).map(|(a, v)| a * v.powf(beta)).collect())?;
    let g_report = verify_product_increasing(&phi.reciprocal()?, &y, order)?;
    let g_max_positive = g.iter().copied().fold(0.0, f64::max);
    Ok(Nr6Decomposition {
        f: SampleSeries::new(grid, f)?,
        g: SampleSeries::new(grid, g)?,
        f_report,
        g_report,
        g_max_positive,
        identity: IdentityCheck {
            max_residual: worst,
            scale,
        },
    })
}
