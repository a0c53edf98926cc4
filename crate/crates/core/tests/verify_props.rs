use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thresh_core::config::{ConfigBox, Configuration};
use thresh_core::interval::Interval;
use thresh_core::scheme::{bundled, ratio, ThreshScheme};
use thresh_core::verify::{margin, run_verification, Budget, Verdict, VerifyJob, VerifyReport};

fn job(s: ThreshScheme, alpha: f64, floor: f64, region: ConfigBox, budget: Budget) -> VerifyJob {
    VerifyJob::new(s, alpha, floor, region, budget).unwrap()
}

fn region(b1: (f64, f64), b2: (f64, f64), rho: (f64, f64)) -> ConfigBox {
    ConfigBox::new(
        Interval::new(b1.0, b1.1),
        Interval::new(b2.0, b2.1),
        Interval::new(rho.0, rho.1),
    )
    .unwrap()
}

/// Counts sampled valid configurations above the floor whose float ratio
/// falls below alpha.
fn sampled_violations(j: &VerifyJob, samples: usize, seed: u64) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = &j.region;
    let (mut seen, mut bad) = (0, 0);
    for _ in 0..samples {
        let c = Configuration {
            b1: rng.random_range(r.b1.lo()..=r.b1.hi()),
            b2: rng.random_range(r.b2.lo()..=r.b2.hi()),
            rho: rng.random_range(r.rho.lo()..=r.rho.hi()),
        };
        if !c.is_valid() || c.completeness() < j.floor {
            continue;
        }
        seen += 1;
        if ratio(&c, &j.scheme) < j.alpha - 1e-9 {
            bad += 1;
        }
    }
    (seen, bad)
}

fn check_counterexample(j: &VerifyJob, rep: &VerifyReport) {
    let cx = rep
        .counterexample
        .expect("counterexample verdict carries a witness");
    let c = cx.config();
    assert!(c.is_valid() && c.completeness() >= j.floor);
    assert!(ratio(&c, &j.scheme) < j.alpha);
    assert!(margin(&ConfigBox::point(&c), &j.scheme, j.alpha).hi() < 0.0);
}

#[test]
fn certified_region_survives_sampling() {
    let j = job(
        bundled::dicut7(),
        0.87,
        0.05,
        region((0.1, 0.3), (0.1, 0.3), (-0.8, -0.4)),
        Budget::default(),
    );
    let rep = run_verification(&j, 1, 2).unwrap();
    assert_eq!(rep.verdict, Verdict::Certified);
    let (seen, bad) = sampled_violations(&j, 100_000, 1);
    assert!(seen > 10_000, "{seen}");
    assert_eq!(bad, 0);
}

#[test]
fn counterexample_recertifies() {
    let j = job(
        bundled::dicut7(),
        0.876,
        0.05,
        region((0.1, 0.25), (0.1, 0.25), (-0.8, -0.5)),
        Budget::default(),
    );
    let rep = run_verification(&j, 1, 2).unwrap();
    assert_eq!(rep.verdict, Verdict::Counterexample);
    check_counterexample(&j, &rep);
}

#[test]
fn verdict_independent_of_workers() {
    let j = job(
        bundled::and3(),
        0.87,
        0.1,
        region((-0.4, 0.0), (-0.2, 0.2), (-0.9, 0.0)),
        Budget::default(),
    );
    let reports: Vec<VerifyReport> = [1, 2, 3]
        .iter()
        .map(|&w| run_verification(&j, w, 3).unwrap())
        .collect();
    assert_eq!(reports[0].verdict, Verdict::Certified);
    for r in &reports[1..] {
        assert_eq!(r.verdict, reports[0].verdict);
        assert_eq!(r.boxes, reports[0].boxes);
        assert_eq!(r.depth, reports[0].depth);
    }
}

#[test]
fn depth_cap_is_respected() {
    let budget = Budget {
        max_boxes: 1_000_000,
        max_depth: 3,
    };
    let j = job(bundled::dicut7(), 0.8744, 1e-3, ConfigBox::full(), budget);
    let rep = run_verification(&j, 1, 1).unwrap();
    assert_eq!(rep.verdict, Verdict::BudgetExhausted);
    assert!(rep.depth <= 3);
    assert!(rep.frontier > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn verdicts_agree_with_sampling(b1 in -0.9f64..0.8, b2 in -0.9f64..0.8, r in -1.0f64..0.9, alpha in 0.80f64..0.88) {
        let j = job(
            bundled::dicut7(),
            alpha,
            0.05,
            region((b1, b1 + 0.1), (b2, b2 + 0.1), (r, r + 0.1)),
            Budget { max_boxes: 20_000, max_depth: 30 },
        );
        let rep = run_verification(&j, 1, 1).unwrap();
        prop_assert!(rep.depth <= 30);
        match rep.verdict {
            Verdict::Certified => prop_assert_eq!(sampled_violations(&j, 2000, 7).1, 0),
            Verdict::Counterexample => check_counterexample(&j, &rep),
            Verdict::BudgetExhausted => {}
        }
    }
}
