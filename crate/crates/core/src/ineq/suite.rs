//! Named randomized suites, one per inequality family.
//!
//! Every suite draws `count` instances from seeds derived from a base seed,
//! checks each on `[0, 5]` with `h = 0.01`, and re-checks failing instances on
//! the halved grid before deciding.

use thiserror::Error;

use crate::frac_ops::TimeGrid;

use super::generate::CompositeProfile;
use super::{
    generate_composite, generate_instance, verify_composite, verify_decomposition_nr4,
    verify_decomposition_nr6, verify_even_power_envelope, verify_odd_power_envelope,
    verify_power_rule, verify_product_decreasing, verify_product_increasing, BetaProfile,
    EnvelopeKind, IneqError, IneqReport, Profile, XKind, IDENTITY_RTOL,
};

/// Every suite name accepted by [`run_suite`].
pub const SUITE_NAMES: &[&str] = &[
    "nr1",
    "nr1_inc",
    "nr2",
    "nr3",
    "nr3_even",
    "lemma3",
    "lemma4",
    "nr7",
    "nr8",
    "nr9",
    "nr10",
    "nr11",
    "nr12",
    "nr4_identity",
    "nr6",
];

pub const SUITE_T_END: f64 = 5.0;
pub const SUITE_H: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SuiteError {
    #[error("unknown check '{0}'")]
    Unknown(String),
    #[error("instance with seed {seed}: {source}")]
    Instance { seed: u64, source: IneqError },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceOutcome {
    pub seed: u64,
    pub passed: bool,
    pub max_violation: f64,
    pub tol: f64,
    pub refinement_ratio: Option<f64>,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSummary {
    pub name: String,
    pub instances: usize,
    pub passes: usize,
    pub max_violation: f64,
    pub outcomes: Vec<InstanceOutcome>,
}

impl SuiteSummary {
    pub fn all_passed(&self) -> bool {
        self.passes == self.instances
    }
}

/// Seed of instance `i` in a suite run with `base`.
pub fn instance_seed(base: u64, i: usize) -> u64 {
    base.wrapping_mul(1_000_003).wrapping_add(i as u64)
}

pub fn suite_grid() -> TimeGrid {
    TimeGrid::spanning(0.0, SUITE_T_END, SUITE_H).expect("fixed suite grid is valid")
}

pub fn is_suite(name: &str) -> bool {
    SUITE_NAMES.contains(&name)
}

const ALPHA: (f64, f64) = (0.1, 1.0);

fn beta(min: f64, max: f64, even: bool) -> BetaProfile {
    BetaProfile {
        min,
        max,
        even_numerator: even,
    }
}

fn profile(envelope: EnvelopeKind, x: XKind, b: BetaProfile) -> Profile {
    Profile {
        envelope,
        x,
        beta: b,
        alpha: ALPHA,
    }
}

fn composite(x: XKind, max_components: usize, b: BetaProfile, parts: (bool, bool, bool), envelope_power: bool) -> CompositeProfile {
    CompositeProfile {
        x,
        max_components,
        enveloped: parts.0,
        plain: parts.1,
        extra_power: parts.2,
        beta: b,
        envelope_power,
        alpha: ALPHA,
    }
}

/// Check on `grid`; a failing report is re-run on the halved grid.
fn decide<F>(grid: &TimeGrid, check: F) -> Result<IneqReport, IneqError>
where
    F: Fn(&TimeGrid) -> Result<IneqReport, IneqError>,
{
    let coarse = check(grid)?;
    if coarse.passed() {
        return Ok(coarse);
    }
    let fine = check(&grid.refined())?;
    Ok(coarse.refine_with(&fine))
}

fn outcome(seed: u64, description: String, report: &IneqReport) -> InstanceOutcome {
    InstanceOutcome {
        seed,
        passed: report.passed(),
        max_violation: report.max_violation(),
        tol: report.tol(),
        refinement_ratio: report.refinement_ratio(),
        description,
    }
}

fn run_one(name: &str, seed: u64, grid: &TimeGrid) -> Result<InstanceOutcome, IneqError> {
    use EnvelopeKind::*;
    use XKind::*;

    let single = |p: Profile, check: &dyn Fn(&super::Instance, &TimeGrid) -> Result<IneqReport, IneqError>| {
        let inst = generate_instance(seed, &p);
        let report = decide(grid, |g| check(&inst, g))?;
        Ok(outcome(seed, inst.describe(), &report))
    };
    let multi = |p: CompositeProfile| {
        let inst = generate_composite(seed, &p);
        let report = decide(grid, |g| verify_composite(&inst.terms, &inst.sample_xs(g)?, inst.order))?;
        Ok(outcome(seed, inst.describe(), &report))
    };

    match name {
        "nr1" => single(profile(MonoDecreasing, Nonneg, beta(1.0, 1.0, false)), &|i, g| {
            verify_product_decreasing(&i.envelope, &i.sample_x(g)?, i.order)
        }),
        "nr1_inc" => single(profile(MonoIncreasing, Nonneg, beta(1.0, 1.0, false)), &|i, g| {
            verify_product_increasing(&i.envelope, &i.sample_x(g)?, i.order)
        }),
        "nr2" => single(profile(MonoDecreasing, Positive, beta(0.0, 4.0, false)), &|i, g| {
            verify_odd_power_envelope(&i.envelope, i.n, &i.sample_x(g)?, i.beta.value(), i.order)
        }),
        "nr3" => single(profile(NonnegDecreasing, Positive, beta(0.0, 4.0, false)), &|i, g| {
            verify_odd_power_envelope(&i.envelope, 0, &i.sample_x(g)?, i.beta.value(), i.order)
        }),
        "nr3_even" => single(profile(NonnegDecreasing, SignChanging, beta(2.0, 2.0, true)), &|i, g| {
            verify_even_power_envelope(&i.envelope, i.n + 1, &i.sample_x(g)?, i.order)
        }),
        "lemma3" => single(profile(MonoDecreasing, Nonneg, beta(1.0, 4.0, false)), &|i, g| {
            verify_power_rule(&i.sample_x(g)?, i.beta, i.order, true)
        }),
        "lemma4" => single(profile(MonoDecreasing, SignChanging, beta(1.0, 4.0, true)), &|i, g| {
            verify_power_rule(&i.sample_x(g)?, i.beta, i.order, false)
        }),
        "nr7" => multi(composite(SignChanging, 1, beta(1.0, 4.0, true), (true, false, false), false)),
        "nr8" => multi(composite(Nonneg, 1, beta(1.0, 4.0, false), (true, false, false), true)),
        "nr9" => multi(composite(Nonneg, 3, beta(1.0, 4.0, false), (true, false, false), true)),
        "nr10" => multi(composite(SignChanging, 3, beta(1.0, 4.0, true), (true, false, false), true)),
        "nr11" => multi(composite(SignChanging, 3, beta(1.0, 4.0, true), (true, true, false), true)),
        "nr12" => multi(composite(SignChanging, 3, beta(1.0, 4.0, true), (true, true, true), true)),
        "nr4_identity" => {
            let inst = generate_instance(seed, &profile(NonnegDecreasing, Nonneg, beta(1.0, 4.0, false)));
            let check = verify_decomposition_nr4(&inst.envelope, &inst.sample_x(grid)?, inst.beta.value(), inst.order)?;
            Ok(InstanceOutcome {
                seed,
                passed: check.holds(),
                max_violation: check.relative(),
                tol: IDENTITY_RTOL,
                refinement_ratio: None,
                description: inst.describe(),
            })
        }
        "nr6" => {
            let inst = generate_instance(seed, &profile(PositiveDecreasing, Positive, beta(1.0, 4.0, false)));
            let run = |g: &TimeGrid| {
                verify_decomposition_nr6(&inst.envelope, &inst.sample_x(g)?, inst.beta.value(), inst.order)
            };
            let d = run(grid)?;
            let (mut f, mut g_rep) = (d.f_report.clone(), d.g_report.clone());
            if !f.passed() || !g_rep.passed() {
                let fine = run(&grid.refined())?;
                f = f.refine_with(&fine.f_report);
                g_rep = g_rep.refine_with(&fine.g_report);
            }
            let worst = if f.max_violation() > g_rep.max_violation() { &f } else { &g_rep };
            Ok(InstanceOutcome {
                seed,
                passed: f.passed() && g_rep.passed() && d.identity.holds(),
                max_violation: worst.max_violation(),
                tol: worst.tol(),
                refinement_ratio: worst.refinement_ratio(),
                description: inst.describe(),
            })
        }
        other => unreachable!("suite '{other}' is listed but has no runner"),
    }
}

/// Run `count` instances of the named suite on the standard suite grid.
pub fn run_suite(name: &str, seed: u64, count: usize) -> Result<SuiteSummary, SuiteError> {
    if !is_suite(name) {
        return Err(SuiteError::Unknown(name.to_string()));
    }
    let grid = suite_grid();
    let mut outcomes = Vec::with_capacity(count);
    for i in 0..count {
        let s = instance_seed(seed, i);
        let o = run_one(name, s, &grid).map_err(|source| SuiteError::Instance { seed: s, source })?;
        outcomes.push(o);
    }
    let passes = outcomes.iter().filter(|o| o.passed).count();
    let max_violation = outcomes.iter().map(|o| o.max_violation).fold(0.0, f64::max);
    Ok(SuiteSummary {
        name: name.to_string(),
        instances: count,
        passes,
        max_violation,
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert_eq!(run_suite("bogus", 0, 1), Err(SuiteError::Unknown("bogus".into())));
    }

    #[test]
    fn every_suite_runs() {
        for name in SUITE_NAMES {
            let s = run_suite(name, 1, 3).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(s.instances, 3);
            assert!(s.all_passed(), "{name}: {:?}", s.outcomes);
        }
    }
}
