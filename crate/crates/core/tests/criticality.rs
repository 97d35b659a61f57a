use approx::assert_relative_eq;
use percolate_core::criticality::*;
use percolate_core::engine::{Dynamics, Log2Rule, SqrtRule, ThresholdRule};
use percolate_core::graph::ModelLaw;
use percolate_core::influence::{ActivationProfile, InfluenceSpec};
use percolate_core::{Error, Params};
use proptest::prelude::*;
use statrs::distribution::{Binomial, DiscreteCDF};
use std::sync::Arc;

fn basic(r: usize) -> ActivationProfile {
    ActivationProfile::basic(r, 64).unwrap()
}

fn influence(r: &str, w: &str) -> ActivationProfile {
    InfluenceSpec::parse(r, w).unwrap().profile(64).unwrap()
}

#[test]
fn gnp_small_system() {
    let pred = critical_gnp(100_000, 2e-4, &basic(2)).unwrap();
    assert_relative_eq!(pred.a_c, 125.0, max_relative = 1e-12);
    assert_relative_eq!(pred.t_c, 250.0, max_relative = 1e-12);
    assert_eq!(pred.rho_star, 2);
}

#[test]
fn gnp_large_system_with_quarter_activation() {
    // q = 1/4 at rho* = 2: weights 1 with probability 1/2
    let profile = influence("const:2", "1:0.5,0.5:0.5");
    assert_eq!(profile.rho_star, 2);
    assert_relative_eq!(profile.q_rho_star(), 0.25, max_relative = 1e-12);
    let pred = critical_gnp(100_000_000, 2e-6, &profile).unwrap();
    assert_relative_eq!(pred.a_c, 5000.0, max_relative = 1e-9);
}

#[test]
fn gnp_signed_weights() {
    for (z, want) in [(0.6, 125.0 / 0.36), (0.4, 781.25)] {
        let profile = influence("const:2", &format!("1:{z},-1:{}", 1.0 - z));
        let small = critical_gnp(100_000, 2e-4, &profile).unwrap();
        let large = critical_gnp(10_000_000, 2e-5, &profile).unwrap();
        assert_relative_eq!(small.a_c, want, max_relative = 1e-9);
        assert_relative_eq!(large.a_c, want, max_relative = 1e-9);
    }
}

#[test]
fn gnp_rejects_zero_activation() {
    let mut profile = basic(2);
    for q in profile.q.iter_mut() {
        *q = 0.0;
    }
    assert!(critical_gnp(1000, 0.01, &profile).is_err());
}

#[test]
fn equivalent_laws_give_equal_critical_size() {
    // P(W = 2) = 0.5 and P(R = 6) = 0.4 in every law, other atoms differ
    let weights = ["2:0.5,-1:0.5", "2:0.5,1:0.2,-1:0.3"];
    let thresholds = ["6:0.4,9:0.6", "6:0.4,7:0.3,11:0.3"];
    let mut values = Vec::new();
    for w in weights {
        for r in thresholds {
            let profile = influence(r, w);
            assert_eq!(profile.rho_star, 3);
            assert_relative_eq!(profile.q_rho_star(), 0.4 * 0.125, max_relative = 1e-12);
            values.push(critical_gnp(1_000_000, 1e-4, &profile).unwrap().a_c);
        }
    }
    for v in &values[1..] {
        assert_relative_eq!(*v, values[0], max_relative = 1e-12);
    }
}

#[test]
fn gnm_values() {
    let pred = critical_gnm(1_000_000, 15_000_000, 2).unwrap();
    // (1/2) / (30 * 3e-5) = 555.55...
    assert_relative_eq!(pred.a_c, 0.5 / (30.0 * 3e-5), max_relative = 1e-12);
    assert!((pred.a_c - 555.6).abs() < 0.05);
    // a_c scales as M^(-r/(r-1))
    let four = critical_gnm(1_000_000, 60_000_000, 2).unwrap();
    assert_relative_eq!(pred.a_c / four.a_c, 16.0, max_relative = 1e-12);
    let three = critical_gnm(1_000_000, 15_000_000, 3).unwrap();
    let three_four = critical_gnm(1_000_000, 60_000_000, 3).unwrap();
    assert_relative_eq!(three.a_c / three_four.a_c, 8.0, max_relative = 1e-12);
    assert!(critical_gnm(10, 20, 1).is_err());
}

#[test]
fn gnm_is_gnp_under_substitution() {
    for (n, m, r) in [(1_000_000usize, 15_000_000usize, 2u32), (50_000, 2_000_000, 3), (10_000, 400_000, 4)] {
        let gnm = critical_gnm(n, m, r).unwrap();
        let p = 2.0 * m as f64 / (n as f64 * n as f64);
        let gnp = critical_gnp(n, p, &basic(r as usize)).unwrap();
        assert_relative_eq!(gnm.a_c, gnp.a_c, max_relative = 1e-12);
    }
}

#[test]
fn config_values() {
    let mixed = [(10u32, 0.5), (50u32, 0.5)];
    let ds = d_star(&mixed, 2).unwrap();
    // (1/3)^2 (8/30) / 2 + (5/3)^2 (48/30) / 2
    let want = (1.0 / 9.0) * (8.0 / 30.0) * 0.5 + (25.0 / 9.0) * (48.0 / 30.0) * 0.5;
    assert_relative_eq!(ds, want, max_relative = 1e-12);
    assert!((ds - 2.2370).abs() < 5e-5);
    let a_mixed = critical_config(1_000_000, &mixed, 2).unwrap().a_c;
    assert_relative_eq!(a_mixed, 0.5 * 1e6 / (900.0 * want), max_relative = 1e-12);
    assert!((a_mixed - 248.3).abs() < 0.05);

    let constant = critical_config(1_000_000, &[(30, 1.0)], 2).unwrap();
    assert_relative_eq!(constant.d_star.unwrap(), 28.0 / 30.0, max_relative = 1e-12);
    assert!((constant.a_c - 595.2).abs() < 0.05);
    let gnm = critical_gnm(1_000_000, 15_000_000, 2).unwrap().a_c;
    assert!(constant.a_c > gnm && gnm > a_mixed);
    assert_relative_eq!(constant.a_c, (1.0 - 1.0 / 2.0) * constant.t_c, max_relative = 1e-12);
}

#[test]
fn config_single_atom_approaches_gnm() {
    for d in [100u32, 1000, 10_000] {
        let n = 10_000_000usize;
        let cfg = critical_config(n, &[(d, 1.0)], 2).unwrap().a_c;
        let gnm = critical_gnm(n, n * d as usize / 2, 2).unwrap().a_c;
        assert_relative_eq!(cfg / gnm, d as f64 / (d - 2) as f64, max_relative = 1e-12);
    }
}

#[test]
fn config_without_degrees_above_r() {
    assert!(critical_config(100, &[(2, 1.0)], 2).is_err());
    assert!(critical_config(100, &[(2, 0.5)], 2).is_err());
}

#[test]
fn numeric_matches_closed_form_at_high_degree() {
    let n = 1_000_000;
    let law = [(200u32, 1.0)];
    let closed = critical_config(n, &law, 2).unwrap();
    let numeric = critical_config_numeric(n, &law, &percolate_core::engine::ConstantRule(2)).unwrap();
    assert!(
        (numeric.a_c / closed.a_c - 1.0).abs() < 0.01,
        "numeric {} closed {}",
        numeric.a_c,
        closed.a_c
    );
    assert!((numeric.t_c / closed.t_c - 1.0).abs() < 0.02);
}

#[test]
fn numeric_at_moderate_degree_uses_exact_binomial() {
    // the closed form replaces C(30,2) by 30^2/2, which moves a_c by about 6%
    let n = 1_000_000;
    let law = [(30u32, 1.0)];
    let closed = critical_config(n, &law, 2).unwrap().a_c;
    let numeric = critical_config_numeric(n, &law, &percolate_core::engine::ConstantRule(2)).unwrap().a_c;
    // brute-force minimum of the exact drift is 630.50
    assert!((numeric - 630.504).abs() < 0.01, "{numeric} vs {closed}");
}

#[test]
fn numeric_drift_oracle() {
    // independent brute-force minimization of the drift on a fine grid
    let n = 100_000usize;
    let law = [(20u32, 0.3), (60u32, 0.5), (300u32, 0.2)];
    let rule = SqrtRule;
    let d_bar: f64 = law.iter().map(|&(d, p)| d as f64 * p).sum();
    let tail = |d: u32, r: u32, x: f64| -> f64 {
        let b = Binomial::new(x, d as u64).unwrap();
        if r == 0 { 1.0 } else { b.sf(r as u64 - 1) }
    };
    let drift = |x: f64| -> f64 {
        law.iter()
            .map(|&(d, p)| {
                let r = rule.threshold(d);
                if d > r { tail(d, r, x) * (d - r) as f64 * p } else { 0.0 }
            })
            .sum::<f64>()
            - d_bar * x
    };
    let mut best = f64::INFINITY;
    for i in 1..200_000 {
        let x = i as f64 / 200_000.0 * 0.2;
        best = best.min(drift(x));
    }
    let oracle = -(n as f64) * best / d_bar;
    let pred = critical_config_numeric(n, &law, &rule).unwrap();
    assert_relative_eq!(pred.a_c, oracle, max_relative = 1e-4);
}

#[test]
fn numeric_degenerate_and_invalid() {
    let n = 1000;
    assert!(matches!(
        critical_config_numeric(n, &[(2, 1.0)], &percolate_core::engine::ConstantRule(2)),
        Err(Error::Degenerate { .. })
    ));
    #[derive(Debug)]
    struct One;
    impl ThresholdRule for One {
        fn name(&self) -> String {
            "one".into()
        }
        fn threshold(&self, _: u32) -> u32 {
            1
        }
    }
    assert!(critical_config_numeric(n, &[(10, 1.0)], &One).is_err());
    assert!(critical_config_numeric(n, &[(40, 0.5), (400, 0.5)], &Log2Rule).is_ok());
}

#[test]
fn powerlaw_moments() {
    assert_eq!(powerlaw_moment_asymptotic(1.0, 3.0, 10.0, 1e9).unwrap(), 20.0);
    let exact = powerlaw_moment(1.0, 3.0, 10, 1_000_000).unwrap();
    assert!((exact / 20.0 - 1.0).abs() < 0.06, "{exact}");
    for (beta, lo, hi) in [(2.5, 10, 1000), (0.5, 3, 50), (1.0, 10, 300)] {
        assert_relative_eq!(powerlaw_moment(0.0, beta, lo, hi).unwrap(), 1.0, max_relative = 1e-12);
    }
    let m = powerlaw_moment(1.0, 1.0, 10, 300).unwrap();
    assert!((m - 84.0).abs() < 1.0, "{m}");
    assert!(matches!(
        powerlaw_moment_asymptotic(1.0, 2.0, 10.0, 100.0),
        Err(Error::BranchBoundary(_))
    ));
    assert!(matches!(
        powerlaw_moment_asymptotic(1.0, 1.0, 10.0, 100.0),
        Err(Error::BranchBoundary(_))
    ));
    assert!(powerlaw_moment(1.0, 2.0, 20, 10).is_err());
}

#[test]
fn powerlaw_asymptotic_branches_track_exact_sums() {
    // far from branch points each asymptotic branch is the large-cutoff limit
    let cases = [(1.0, 4.0, 5u32, 100_000u32), (2.0, 2.5, 5, 100_000), (1.0, 0.5, 5, 100_000)];
    for (k, beta, lo, hi) in cases {
        let exact = powerlaw_moment(k, beta, lo, hi).unwrap();
        let asym = powerlaw_moment_asymptotic(k, beta, lo as f64, hi as f64).unwrap();
        assert!((exact / asym - 1.0).abs() < 0.25, "k={k} beta={beta}: {exact} vs {asym}");
    }
}

#[test]
fn scaling_exponents() {
    assert_relative_eq!(scaling_exponent_ac(2, 2.5, 0.0, 2.0 / 3.0).unwrap(), 0.0, epsilon = 1e-12);
    assert_relative_eq!(
        scaling_exponent_ac(6, 2.5, 0.0, 2.0 / 3.0).unwrap(),
        1.0 - (2.0 / 3.0 * 5.5) / 5.0,
        max_relative = 1e-12
    );
    let a = scaling_exponent_ac(3, 1.2, 0.1, 0.5).unwrap();
    let b = scaling_exponent_ac(3, 1.8, 0.1, 0.5).unwrap();
    assert_relative_eq!(a, 1.0 - 0.5 * 3.0 / 2.0, max_relative = 1e-12);
    assert_eq!(a, b);
    assert_relative_eq!(scaling_exponent_ac(2, 5.0, 0.2, 0.5).unwrap(), 1.0 - 0.4, max_relative = 1e-12);
    for (r, beta, gamma) in [(2, 2.0, 0.0), (2, 4.0, 0.1), (3, 6.0, 0.0)] {
        assert!(matches!(
            scaling_exponent_ac(r, beta, gamma, 0.5),
            Err(Error::BranchBoundary(_))
        ));
    }
}

#[test]
fn block_two_communities() {
    let (p, q) = (0.01, 0.002);
    let probs = vec![vec![p, q], vec![q, 0.02]];
    assert_relative_eq!(p_hat_multinomial(&probs, 0, 2), p + q, max_relative = 1e-12);
    assert_relative_eq!(p_hat(&probs, 1), 0.02 + q, max_relative = 1e-12);

    let decoupled = vec![vec![p, 0.0], vec![0.0, 0.02]];
    let per = block_critical(&[5000, 8000], &decoupled, 2).unwrap();
    let iso0 = critical_gnp(5000, p, &basic(2)).unwrap().a_c;
    let iso1 = critical_gnp(8000, 0.02, &basic(2)).unwrap().a_c;
    assert_relative_eq!(per[0].a_c_bar, iso0, max_relative = 1e-12);
    assert_relative_eq!(per[1].a_c_bar, iso1, max_relative = 1e-12);
    assert_eq!(per[0].a_c_bar, per[0].a_c_reduced);
}

#[test]
fn block_rejects_asymmetry() {
    let probs = vec![vec![0.01, 0.002], vec![0.003, 0.01]];
    assert!(block_critical(&[100, 100], &probs, 2).is_err());
    assert!(block_critical(&[100], &probs, 2).is_err());
}

#[test]
fn seed_bounds() {
    let sym = vec![vec![0.01, 0.001], vec![0.001, 0.01]];
    let b = block_seed_bounds(&[10_000, 10_000], &sym, 2, 0.05).unwrap();
    assert_eq!(b.optimal_community, 0);
    assert!(b.uniform_bound > 0.0 && b.optimal_bound > 0.0);

    let (n1, p1, n2, p2) = (20_000usize, 0.004, 10_000usize, 0.001);
    let probs = vec![vec![p1, 1e-4], vec![1e-4, p2]];
    let b = block_seed_bounds(&[n1, n2], &probs, 3, 0.05).unwrap();
    assert_eq!(b.optimal_community, 0);
    let want = 1.05 * (2.0 / 3.0) * (2.0 / (n1 as f64 * p1.powi(3))).sqrt();
    assert_relative_eq!(b.optimal_bound, want, max_relative = 1e-12);

    // heterogeneous three communities: both uniform bounds are finite and
    // concentrating seeds never needs more than seeding uniformly
    let sizes = [30_000usize, 5_000, 15_000];
    let probs = vec![
        vec![0.001, 2e-5, 1e-5],
        vec![2e-5, 0.01, 3e-5],
        vec![1e-5, 3e-5, 0.002],
    ];
    let b = block_seed_bounds(&sizes, &probs, 2, 0.05).unwrap();
    assert_eq!(b.optimal_community, 1);
    assert_relative_eq!(b.uniform_via_optimal, b.optimal_bound * 50_000.0 / 5_000.0, max_relative = 1e-12);
    assert!(b.optimal_bound < b.uniform_bound);
    assert!(b.optimal_bound < b.uniform_via_optimal);
}

#[test]
fn rate_function_and_phi() {
    assert_eq!(rate_h(1.0), 0.0);
    assert_eq!(rate_h(0.0), 1.0);
    assert_eq!(rate_h(-0.5), f64::INFINITY);
    let phi_half = phi(2, 0.5).unwrap();
    assert_relative_eq!(phi_half, 1.0 - 0.5f64.sqrt(), epsilon = 1e-11);
    assert!((subcritical_ratio(2, 0.5).unwrap() - 1.1716).abs() < 1e-4);
    assert!(rate_constants(2, 1.0, 0.1).is_err());
    let rc = rate_constants(3, 0.4, 0.1).unwrap();
    assert!(rc.c1.is_none() && rc.c2.unwrap() > 0.0 && rc.phi.is_some());
}

fn c1_grid_oracle(rho: usize, alpha: f64, lo: f64, hi: f64) -> f64 {
    let r = rho as f64;
    let k = alpha * (r - 1.0);
    let h = |y: f64| if y < 0.0 { f64::INFINITY } else if y == 0.0 { 1.0 } else { 1.0 - y + y * y.ln() };
    let steps = 2_000_000;
    (0..=steps)
        .map(|i| lo + (hi - lo) * i as f64 / steps as f64)
        .map(|x| x.powf(r) / k * h((x * r - k) / x.powf(r)))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn c1_against_grid() {
    let got = c1(2, 2.0).unwrap();
    let oracle = c1_grid_oracle(2, 2.0, 1.0, 10.0);
    assert!(got > 0.0);
    assert!((got - oracle).abs() < 1e-6, "{got} vs {oracle}");
    let got = c1(3, 1.5).unwrap();
    let oracle = c1_grid_oracle(3, 1.5, 1.0, 10.0);
    assert!((got - oracle).abs() < 1e-6, "{got} vs {oracle}");
}

#[test]
fn tail_bounds() {
    assert_relative_eq!(binom_tail_bound(1000, 0.1, 100, TailSide::Lower).unwrap(), 1.0, epsilon = 1e-12);
    let lower = binom_tail_bound(1000, 0.1, 50, TailSide::Lower).unwrap();
    assert_relative_eq!(lower, (-100.0 * (1.0 - 0.5 + 0.5 * 0.5f64.ln())).exp(), max_relative = 1e-12);
    let b = Binomial::new(0.1, 1000).unwrap();
    assert!(lower >= b.cdf(50));
    let upper = binom_tail_bound(1000, 0.1, 150, TailSide::Upper).unwrap();
    assert!(upper >= b.sf(149));
    assert!(binom_tail_bound(1000, 0.1, 150, TailSide::Lower).is_err());
    assert!(binom_tail_bound(1000, 0.1, 50, TailSide::Upper).is_err());
}

#[test]
fn tail_bounds_dominate_exact_tails_on_grid() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 200 {
        let n: u64 = rng.random_range(5..3000);
        let p: f64 = rng.random_range(0.001..0.999);
        let k: u64 = rng.random_range(0..=n);
        let mu = n as f64 * p;
        let b = Binomial::new(p, n).unwrap();
        let (side, exact) = if (k as f64) <= mu {
            (TailSide::Lower, b.cdf(k))
        } else {
            (TailSide::Upper, b.sf(k - 1))
        };
        let bound = binom_tail_bound(n, p, k, side).unwrap();
        assert!(bound >= exact * (1.0 - 1e-9), "n={n} p={p} k={k}: {bound} < {exact}");
        checked += 1;
    }
}

#[test]
fn predictor_registry() {
    let reg = predictors();
    assert_eq!(reg.names(), vec!["block", "config", "config-numeric", "gnm", "gnp"]);
    let basic2 = Dynamics::Influence(InfluenceSpec::basic(2).unwrap());
    let law = ModelLaw::Gnp { n: 100_000, p: 2e-4 };
    let name = default_predictor(&law, &basic2);
    let pred = reg.create(name, &Params::new()).unwrap().predict(&law, &basic2).unwrap();
    assert_relative_eq!(pred.a_c, 125.0, max_relative = 1e-12);

    let degrees = ModelLaw::Degrees { n: 1000, law: vec![(10, 0.5), (50, 0.5)] };
    assert_eq!(default_predictor(&degrees, &basic2), "config");
    let log2 = Dynamics::DegreeRule(Arc::new(Log2Rule));
    assert_eq!(default_predictor(&degrees, &log2), "config-numeric");
    assert!(reg.create("config", &Params::new()).unwrap().predict(&degrees, &log2).is_err());
    assert!(reg.create("gnm", &Params::new()).unwrap().predict(&law, &basic2).is_err());

    let block = ModelLaw::Block { sizes: vec![1000, 1000], probs: vec![vec![0.02, 0.001], vec![0.001, 0.02]] };
    let pred = reg.create("block", &Params::new().with("epsilon", 0.05)).unwrap().predict(&block, &basic2).unwrap();
    assert_eq!(pred.p_hat.as_ref().unwrap().len(), 2);
    assert_relative_eq!(pred.p_hat.unwrap()[0], 0.021, max_relative = 1e-12);

    let signed = Dynamics::Influence(InfluenceSpec::parse("const:2", "1:0.6,-1:0.4").unwrap());
    assert!(reg.create("gnm", &Params::new()).unwrap().predict(&ModelLaw::Gnm { n: 1000, m: 10_000 }, &signed).is_err());
}

proptest! {
    #[test]
    fn p_hat_identity(entries in proptest::collection::vec(1e-4f64..0.05, 6), r in 2u32..6) {
        let m = vec![
            vec![entries[0], entries[1], entries[2]],
            vec![entries[1], entries[3], entries[4]],
            vec![entries[2], entries[4], entries[5]],
        ];
        for k in 0..3 {
            let direct = p_hat_multinomial(&m, k, r);
            prop_assert!((direct - p_hat(&m, k)).abs() <= 1e-12 * p_hat(&m, k).max(1e-3));
        }
    }

    #[test]
    fn closed_form_relation(n in 1_000usize..10_000_000, d in 5.0f64..500.0, rho in 2usize..6) {
        let p = d / n as f64;
        let pred = critical_gnp(n, p, &basic(rho)).unwrap();
        prop_assert!(pred.a_c > 0.0);
        prop_assert!((pred.a_c - (1.0 - 1.0 / rho as f64) * pred.t_c).abs() <= 1e-12 * pred.a_c);
    }

    #[test]
    fn a_c_decreasing(n in 1_000usize..1_000_000, d in 5.0f64..200.0, w in 0.55f64..0.95, rho in 2usize..5) {
        let p = d / n as f64;
        let base = critical_gnp(n, p, &basic(rho)).unwrap().a_c;
        prop_assert!(critical_gnp(n, p * 1.1, &basic(rho)).unwrap().a_c < base);
        prop_assert!(critical_gnp(n * 2, p, &basic(rho)).unwrap().a_c < base);
        // weaker weights lower q_rho*
        let weak = influence(&format!("const:{rho}"), &format!("1:{w},0.5:{}", 1.0 - w));
        prop_assert_eq!(weak.rho_star, rho);
        prop_assert!(critical_gnp(n, p, &weak).unwrap().a_c > base);
    }

    #[test]
    fn phi_is_a_root(alpha in 0.001f64..0.999, rho in 2usize..8) {
        let x = phi(rho, alpha).unwrap();
        let r = rho as f64;
        prop_assert!(x > 0.0 && x < 1.0);
        prop_assert!((x - x.powf(r) / r - alpha * (1.0 - 1.0 / r)).abs() < 1e-10);
        prop_assert!(phi(rho, alpha * 0.99).unwrap() < x);
    }

    #[test]
    fn c1_positive(alpha in 1.01f64..20.0, rho in 2usize..6) {
        prop_assert!(c1(rho, alpha).unwrap() > 0.0);
    }
}

#[test]
fn phi_limits() {
    assert!(phi(2, 1e-9).unwrap() < 1e-8);
    assert!(phi(3, 1e-9).unwrap() < 1e-8);
    assert!(phi(2, 1.0 - 1e-10).unwrap() > 0.999);
    assert!(phi(4, 1.0 - 1e-10).unwrap() > 0.99);
}
