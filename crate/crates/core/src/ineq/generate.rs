//! Seeded random instances for the inequality suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::Expr;
use crate::frac_ops::{FracOrder, SampleSeries, TimeGrid};

use super::{EnvelopeKind, EnvelopeSpec, IneqError, PowerTerm, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XKind {
    /// `q(t)^2 + c` with `c >= 0`
    Nonneg,
    /// `q(t)^2 + c` with `c >= 0.1`
    Positive,
    /// raw trigonometric polynomial `q(t)`
    SignChanging,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaProfile {
    pub min: f64,
    pub max: f64,
    /// Restrict to exponents whose numerator in lowest terms is even.
    pub even_numerator: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Profile {
    pub envelope: EnvelopeKind,
    pub x: XKind,
    pub beta: BetaProfile,
    /// `alpha` is drawn uniformly from `[lo, hi]`.
    pub alpha: (f64, f64),
}

impl Default for Profile {
    fn default() -> Self {
        Self {
            envelope: EnvelopeKind::MonoDecreasing,
            x: XKind::Nonneg,
            beta: BetaProfile {
                min: 1.0,
                max: 4.0,
                even_numerator: false,
            },
            alpha: (0.1, 0.99),
        }
    }
}

/// One randomly drawn (envelope, x, beta, alpha) tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub seed: u64,
    pub envelope: EnvelopeSpec,
    pub x: Expr,
    pub beta: Rational,
    pub order: FracOrder,
    /// Odd-power index for `phi^(2n+1)` checks, drawn from `0..=2`.
    pub n: u32,
}

impl Instance {
    pub fn sample_x(&self, grid: &TimeGrid) -> Result<SampleSeries, IneqError> {
        sample_expr(&self.x, grid)
    }

    pub fn describe(&self) -> String {
        format!(
            "seed={} alpha={:?} phi[{}]={} x={} beta={} n={}",
            self.seed,
            self.order.alpha(),
            self.envelope.kind().name(),
            self.envelope.expr(),
            self.x,
            self.beta,
            self.n
        )
    }
}

/// A sum of power terms over several state components.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeInstance {
    pub seed: u64,
    pub terms: Vec<PowerTerm>,
    pub xs: Vec<Expr>,
    pub order: FracOrder,
}

impl CompositeInstance {
    pub fn sample_xs(&self, grid: &TimeGrid) -> Result<Vec<SampleSeries>, IneqError> {
        self.xs.iter().map(|e| sample_expr(e, grid)).collect()
    }

    pub fn describe(&self) -> String {
        let xs: Vec<String> = self.xs.iter().enumerate().map(|(i, e)| format!("x{}={e}", i + 1)).collect();
        let terms: Vec<String> = self
            .terms
            .iter()
            .map(|t| match &t.envelope {
                Some(env) => format!(
                    "{:?}*({})^{:?}*x{}^{}",
                    t.coef,
                    env.expr(),
                    t.p,
                    t.component + 1,
                    t.beta
                ),
                None => format!("{:?}*x{}^{}", t.coef, t.component + 1, t.beta),
            })
            .collect();
        format!(
            "seed={} alpha={:?} {} V={}",
            self.seed,
            self.order.alpha(),
            xs.join(" "),
            terms.join(" + ")
        )
    }
}

fn sample_expr(e: &Expr, grid: &TimeGrid) -> Result<SampleSeries, IneqError> {
    let values = grid
        .nodes()
        .enumerate()
        .map(|(node, t)| e.eval(t, &[]).map_err(|source| IneqError::Eval { node, source }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SampleSeries::new(*grid, values)?)
}

fn parse(text: &str) -> Expr {
    // generated text is well formed by construction
    Expr::parse(text).unwrap_or_else(|e| panic!("generated expression '{text}': {e}"))
}

fn num(v: f64) -> String {
    if v < 0.0 {
        format!("({v:?})")
    } else {
        format!("{v:?}")
    }
}

fn draw_envelope(rng: &mut ChaCha8Rng, kind: EnvelopeKind) -> EnvelopeSpec {
    let c0 = match kind {
        EnvelopeKind::MonoDecreasing | EnvelopeKind::MonoIncreasing => rng.gen_range(-1.0..1.0),
        EnvelopeKind::NonnegDecreasing => rng.gen_range(0.0..1.0),
        EnvelopeKind::PositiveDecreasing => rng.gen_range(0.05..1.0),
    };
    let increasing = kind == EnvelopeKind::MonoIncreasing;
    let text = if rng.gen_bool(0.5) {
        let k = rng.gen_range(1..=3);
        let parts: Vec<String> = (0..k)
            .map(|_| {
                let c = rng.gen_range(0.2..2.0);
                let l = rng.gen_range(0.1..2.0);
                if increasing {
                    format!("{}*(1 - exp(-{}*t))", num(c), num(l))
                } else {
                    format!("{}*exp(-{}*t)", num(c), num(l))
                }
            })
            .collect();
        format!("{} + {}", num(c0), parts.join(" + "))
    } else {
        let c = rng.gen_range(0.5..2.0);
        let a = rng.gen_range(0.1..2.0);
        let m = rng.gen_range(1..=3);
        if increasing {
            format!("{} + {}*(1 + {}*t)^{m}", num(c0), num(c), num(a * 0.25))
        } else {
            format!("{} + {}/(1 + {}*t)^{m}", num(c0), num(c), num(a))
        }
    };
    EnvelopeSpec::new(kind, parse(&text)).expect("generated envelopes depend on t only")
}

fn draw_x(rng: &mut ChaCha8Rng, kind: XKind) -> Expr {
    let deg = rng.gen_range(1..=4);
    let w = rng.gen_range(0.3..1.5);
    let a0 = match kind {
        XKind::SignChanging => rng.gen_range(-0.3..0.3),
        _ => rng.gen_range(-1.0..1.0),
    };
    let mut q = num(a0);
    for k in 1..=deg {
        let a = rng.gen_range(-1.0..1.0) / k as f64;
        let b = rng.gen_range(-1.0..1.0) / k as f64;
        let f = w * k as f64;
        q.push_str(&format!(
            " + {}*cos({}*t) + {}*sin({}*t)",
            num(a),
            num(f),
            num(b),
            num(f)
        ));
    }
    let text = match kind {
        XKind::SignChanging => q,
        XKind::Nonneg => format!("({q})^2 + {}", num(rng.gen_range(0.0..0.5))),
        XKind::Positive => format!("({q})^2 + {}", num(rng.gen_range(0.1..1.0))),
    };
    parse(&text)
}

fn draw_beta(rng: &mut ChaCha8Rng, p: &BetaProfile) -> Rational {
    // odd denominators keep an even numerator even after reduction
    let dens: &[u64] = if p.even_numerator { &[1, 3] } else { &[1, 2, 3] };
    let den = dens[rng.gen_range(0..dens.len())];
    let lo = (p.min * den as f64).ceil() as u64;
    let hi = (p.max * den as f64).floor() as u64;
    let candidates: Vec<u64> = (lo..=hi)
        .filter(|n| !p.even_numerator || (n % 2 == 0 && *n > 0))
        .collect();
    if candidates.is_empty() {
        let fallback = if p.even_numerator { 2 } else { lo.max(1) };
        return Rational::new(fallback, 1).expect("nonzero denominator");
    }
    let n = candidates[rng.gen_range(0..candidates.len())];
    Rational::new(n, den).expect("nonzero denominator")
}

fn draw_order(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> FracOrder {
    let a = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
    FracOrder::new(a).expect("profile alpha range lies in (0, 1]")
}

/// Deterministic instance for `seed` under `profile`.
pub fn generate_instance(seed: u64, profile: &Profile) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let envelope = draw_envelope(&mut rng, profile.envelope);
    let x = draw_x(&mut rng, profile.x);
    let beta = draw_beta(&mut rng, &profile.beta);
    let order = draw_order(&mut rng, profile.alpha);
    let n = rng.gen_range(0..=2);
    Instance {
        seed,
        envelope,
        x,
        beta,
        order,
        n,
    }
}

/// Which summands a composite instance may contain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeProfile {
    pub x: XKind,
    pub max_components: usize,
    /// `c phi^p x^beta`
    pub enveloped: bool,
    /// `d x^beta`
    pub plain: bool,
    /// `a x^gamma` with an exponent independent of `beta`
    pub extra_power: bool,
    pub beta: BetaProfile,
    /// Allow `p > 1` on envelopes.
    pub envelope_power: bool,
    pub alpha: (f64, f64),
}

pub fn generate_composite(seed: u64, profile: &CompositeProfile) -> CompositeInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(1..=profile.max_components.max(1));
    let mut xs = Vec::with_capacity(m);
    let mut terms = Vec::new();
    for i in 0..m {
        xs.push(draw_x(&mut rng, profile.x));
        let beta = draw_beta(&mut rng, &profile.beta);
        if profile.enveloped {
            let env = draw_envelope(&mut rng, EnvelopeKind::NonnegDecreasing);
            let p = if profile.envelope_power {
                rng.gen_range(1.0..3.0)
            } else {
                1.0
            };
            terms.push(PowerTerm::enveloped(i, rng.gen_range(0.0..2.0), env, p, beta));
        }
        if profile.plain {
            terms.push(PowerTerm::plain(i, rng.gen_range(0.0..2.0), beta));
        }
        if profile.extra_power {
            let gamma = draw_beta(&mut rng, &profile.beta);
            terms.push(PowerTerm::plain(i, rng.gen_range(0.0..2.0), gamma));
        }
    }
    let order = draw_order(&mut rng, profile.alpha);
    CompositeInstance {
        seed,
        terms,
        xs,
        order,
    }
}
