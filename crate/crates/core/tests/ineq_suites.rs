//! Seeded inequality suites at full size, plus structural properties of the
//! verifiers.

use std::time::Instant;

use fracstab_core::ineq::suite::{run_suite, SUITE_NAMES};
use fracstab_core::ineq::{
    generate_instance, verify_product_decreasing, verify_product_increasing, Direction,
    EnvelopeKind, EnvelopeSpec, IneqError, IneqReport, Profile,
};
use fracstab_core::{FracOrder, SampleSeries, TimeGrid};

#[test]
fn all_suites_pass_on_200_instances() {
    let start = Instant::now();
    for name in SUITE_NAMES {
        let count = if *name == "nr4_identity" { 50 } else { 200 };
        let s = run_suite(name, 7, count).unwrap();
        let refined = s.outcomes.iter().filter(|o| o.refinement_ratio.is_some()).count();
        println!(
            "{name}: {}/{} pass, max violation {:e}, refined {refined}",
            s.passes, s.instances, s.max_violation
        );
        let failed: Vec<_> = s.outcomes.iter().filter(|o| !o.passed).collect();
        assert!(failed.is_empty(), "{name}: {failed:#?}");
    }
    println!("elapsed {:?}", start.elapsed());
}

#[test]
fn suites_are_deterministic() {
    assert_eq!(run_suite("nr12", 3, 20).unwrap(), run_suite("nr12", 3, 20).unwrap());
}

#[test]
fn seed_zero_instance_is_frozen() {
    let inst = generate_instance(0, &Profile::default());
    let golden = include_str!("golden/instance_seed0.txt");
    assert_eq!(inst.describe(), golden.trim_end());
}

#[test]
fn increasing_profile_into_decreasing_check_is_rejected() {
    let p = Profile {
        envelope: EnvelopeKind::MonoIncreasing,
        ..Profile::default()
    };
    let grid = TimeGrid::spanning(0.0, 5.0, 0.01).unwrap();
    let inst = generate_instance(5, &p);
    let x = inst.sample_x(&grid).unwrap();
    assert!(matches!(
        verify_product_decreasing(&inst.envelope, &x, inst.order),
        Err(IneqError::Envelope(_))
    ));
    // relabelling the same expression does not get past the sampled check
    let relabelled = EnvelopeSpec::new(EnvelopeKind::MonoDecreasing, inst.envelope.expr().clone()).unwrap();
    assert!(matches!(
        verify_product_decreasing(&relabelled, &x, inst.order),
        Err(IneqError::Envelope(_))
    ));
}

#[test]
fn reversed_inequalities_fail() {
    // The product inequality is strict for strictly monotone envelopes, so
    // flipping its direction must produce real violations.
    let grid = TimeGrid::spanning(0.0, 5.0, 0.01).unwrap();
    let mut flipped_failures = 0;
    for seed in 0..50 {
        let inst = generate_instance(seed, &Profile::default());
        let x = inst.sample_x(&grid).unwrap();
        let r = verify_product_decreasing(&inst.envelope, &x, inst.order).unwrap();
        let flipped = IneqReport::new(r.lhs().clone(), r.rhs().clone(), Direction::AtLeast, inst.order).unwrap();
        if !flipped.passed() {
            flipped_failures += 1;
        }
    }
    assert!(flipped_failures >= 45, "only {flipped_failures} of 50 flipped checks failed");
}

#[test]
fn reciprocal_duality() {
    let grid = TimeGrid::spanning(0.0, 5.0, 0.01).unwrap();
    for (phi, a) in [("exp(-t)", 0.3), ("2/(1+t)", 0.7), ("0.5 + exp(-2*t)", 0.95)] {
        let order = FracOrder::new(a).unwrap();
        let dec = EnvelopeSpec::parse(EnvelopeKind::PositiveDecreasing, phi).unwrap();
        let inc = dec.reciprocal().unwrap();
        let x = SampleSeries::from_fn(grid, |t| 1.0 + (t - 2.0).powi(2)).unwrap();
        let ri = verify_product_increasing(&inc, &x, order).unwrap();
        let rd = verify_product_decreasing(&dec, &x, order).unwrap();
        assert_eq!(ri.verdict(), rd.verdict(), "{phi}");
        assert!(ri.passed());
    }
}
