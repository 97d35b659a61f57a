use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

/// Exhaustive oracle: enumerate every weight sequence of length `rho` and
/// check whether some prefix sum reaches the threshold.
fn enumerate_q(spec: &InfluenceSpec, rho: usize) -> f64 {
    let w = spec.weight.atoms();
    let k = w.len();
    let mut total = 0.0;
    for &(r, rp) in spec.threshold.atoms() {
        for code in 0..k.pow(rho as u32) {
            let mut c = code;
            let mut sum = 0.0;
            let mut prob = 1.0;
            let mut hit = false;
            for _ in 0..rho {
                let (v, p) = w[c % k];
                c /= k;
                sum += v;
                prob *= p;
                hit |= sum >= r - 1e-9;
            }
            if hit {
                total += rp * prob;
            }
        }
    }
    total
}

fn d1() -> DiscreteDistribution {
    "2:0.5,-1:0.5".parse().unwrap()
}
fn d2() -> DiscreteDistribution {
    "-4:0.4,1:0.1,2:0.5".parse().unwrap()
}
fn d3() -> DiscreteDistribution {
    "6:0.5,9:0.5".parse().unwrap()
}
fn d4() -> DiscreteDistribution {
    "6:0.5,8:0.25,20:0.25".parse().unwrap()
}

#[test]
fn unit_weights_reduce_to_basic_bootstrap() {
    let spec = InfluenceSpec::basic(2).unwrap();
    let prof = spec.profile(DEFAULT_RHO_MAX).unwrap();
    assert_eq!(prof.rho_star, 2);
    assert_eq!(prof.q[2], 1.0);
    assert_eq!((prof.q_infinity, prof.q_infinity_exact), (1.0, true));
    assert_eq!(prof, ActivationProfile::basic(2, DEFAULT_RHO_MAX).unwrap());
}

#[test]
fn four_pairings_share_rho_star() {
    for w in [d1(), d2()] {
        for r in [d3(), d4()] {
            let expected = r.prob(6.0) * w.prob(2.0).powi(3);
            let spec = InfluenceSpec::new(r.clone(), w.clone()).unwrap();
            let prof = spec.profile(16).unwrap();
            assert_eq!(prof.rho_star, 3, "{w} x {r}");
            assert_relative_eq!(prof.q[3], expected, max_relative = 1e-12);
            assert_eq!(prof.q[2], 0.0);
        }
    }
    assert!(d2().mean() < 0.0);
}

#[test]
fn gamblers_ruin_closed_form() {
    let spec = InfluenceSpec::parse("const:2", "1:0.4,-1:0.6").unwrap();
    let prof = spec.profile(DEFAULT_RHO_MAX).unwrap();
    assert_eq!(prof.rho_star, 2);
    assert_relative_eq!(prof.q[2], 0.16, max_relative = 1e-12);
    assert!(prof.q_infinity_exact);
    assert_relative_eq!(prof.q_infinity, 4.0 / 9.0, max_relative = 1e-12);
    assert_relative_eq!(prof.q[5], enumerate_q(&spec, 5), max_relative = 1e-12);
    // the table converges from below to the closed form
    assert!(prof.q[64] <= prof.q_infinity + 1e-15);
    // exact rational walk DP, 64 steps
    assert_relative_eq!(prof.q[64], 0.43744800966992126, max_relative = 1e-12);
}

#[test]
fn zero_drift_walk_is_recurrent() {
    let spec = InfluenceSpec::parse("const:2", "1:0.5,-1:0.5").unwrap();
    let prof = spec.profile(DEFAULT_RHO_MAX).unwrap();
    assert_eq!((prof.q_infinity, prof.q_infinity_exact), (1.0, true));
}

#[test]
fn negative_drift_with_long_steps_is_a_flagged_bound() {
    let spec = InfluenceSpec::parse("const:3", "2:0.3,-1:0.7").unwrap();
    let prof = spec.profile(64).unwrap();
    assert!(!prof.q_infinity_exact);
    assert_eq!(prof.q_infinity, prof.q[64]);

    // Monte Carlo of the walk itself: 10^7 walks of 64 steps.
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let samples = 10_000_000u64;
    let mut hits = 0u64;
    for _ in 0..samples {
        let mut s = 0i32;
        for _ in 0..64 {
            s += if rng.random::<f64>() < 0.3 { 2 } else { -1 };
            if s >= 3 {
                hits += 1;
                break;
            }
        }
    }
    let est = hits as f64 / samples as f64;
    let se = (est * (1.0 - est) / samples as f64).sqrt();
    assert!(
        (est - prof.q[64]).abs() < 5.0 * se,
        "dp {} vs mc {est} (se {se})",
        prof.q[64]
    );
}

#[test]
fn rho_max_too_small() {
    let spec = InfluenceSpec::parse("const:9", "const:1").unwrap();
    assert!(matches!(spec.profile(4), Err(Error::NoRhoStar { rho_max: 4 })));
    assert!(spec.profile(1).is_err());
    assert_eq!(spec.profile(9).unwrap().rho_star, 9);
}

#[test]
fn rejects_degenerate_specs() {
    assert!(InfluenceSpec::parse("const:2", "const:0").is_err());
    assert!(InfluenceSpec::parse("const:2", "const:2").is_err());
    assert!(InfluenceSpec::parse("const:1", "const:1").is_err());
    assert!(InfluenceSpec::parse("const:2", "-1:1").is_err());
    assert!(InfluenceSpec::parse("const:-2", "const:1").is_err());
    let s = InfluenceSpec::parse("const:2", "1:0.4,-1:0.6").unwrap();
    assert!(s.sequential_semantics());
    assert!(!InfluenceSpec::basic(2).unwrap().sequential_semantics());
}

#[test]
fn pi_exact_examples() {
    let basic = ActivationProfile::basic(2, DEFAULT_RHO_MAX).unwrap();
    assert_eq!(pi_exact(0, 0.3, &basic).value, 0.0);
    let v = pi_exact(3, 0.5, &basic);
    assert_relative_eq!(v.value, 0.5, max_relative = 1e-12);
    assert!(v.exact);
    // far past the table, still exact because the profile is saturated
    let v = pi_exact(10_000, 1e-3, &basic);
    assert!(v.exact);
    assert_relative_eq!(v.value, crate::numeric::binom_sf(10_000, 2, 1e-3), max_relative = 1e-9);

    let ruin = InfluenceSpec::parse("const:3", "2:0.3,-1:0.7")
        .unwrap()
        .profile(16)
        .unwrap();
    assert!(!pi_exact(100, 0.5, &ruin).exact);
    assert!(pi_exact(10, 0.5, &ruin).exact);
}

#[test]
fn pi_exact_matches_counter_monte_carlo() {
    let spec = InfluenceSpec::new(d3(), d1()).unwrap();
    let prof = spec.profile(DEFAULT_RHO_MAX).unwrap();
    let (t, p) = (10u64, 0.1);
    let exact = pi_exact(t, p, &prof).value;

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let runs = 1_000_000u64;
    let mut hits = 0u64;
    for _ in 0..runs {
        let r = spec.threshold.sample(&mut rng);
        let mut m = 0.0;
        for _ in 0..t {
            if rng.random::<f64>() < p {
                m += spec.weight.sample(&mut rng);
                if m >= r {
                    hits += 1;
                    break;
                }
            }
        }
    }
    let est = hits as f64 / runs as f64;
    let se = (exact * (1.0 - exact) / runs as f64).sqrt();
    assert!((est - exact).abs() < 5.0 * se, "exact {exact} mc {est}");
}

#[test]
fn pi_asymptotic_examples() {
    let basic = ActivationProfile::basic(2, DEFAULT_RHO_MAX).unwrap();
    assert_relative_eq!(pi_asymptotic(100, 1e-4, &basic).unwrap(), 5e-5, max_relative = 1e-12);
    assert_eq!(pi_asymptotic(0, 1e-4, &basic).unwrap(), 0.0);
    let exact = pi_exact(100, 1e-4, &basic).value;
    let approx = pi_asymptotic(100, 1e-4, &basic).unwrap();
    assert!((exact - approx).abs() / exact < 0.05);
    assert!(matches!(
        pi_asymptotic(2000, 1e-4, &basic),
        Err(Error::OutOfRegime { .. })
    ));
}

fn arb_spec() -> impl Strategy<Value = InfluenceSpec> {
    // weights on a half-integer lattice in [-3, 2], thresholds above max W
    (
        prop::collection::btree_map(-6i32..=4, 1u32..10, 1..4),
        prop::collection::btree_map(1i32..=12, 1u32..10, 1..3),
    )
        .prop_filter_map("needs positive max weight", |(w, r)| {
            let w_max = *w.keys().next_back()?;
            if w_max <= 0 {
                return None;
            }
            let wt: u32 = w.values().sum();
            let weight = DiscreteDistribution::new(
                w.iter().map(|(&v, &c)| (v as f64 * 0.5, c as f64 / wt as f64)),
            )
            .ok()?;
            let rt: u32 = r.values().sum();
            let threshold = DiscreteDistribution::new(
                r.iter()
                    .map(|(&v, &c)| (weight.max() + v as f64 * 0.5, c as f64 / rt as f64)),
            )
            .ok()?;
            InfluenceSpec::new(threshold, weight).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dp_matches_enumeration(spec in arb_spec()) {
        let prof = match spec.profile(8) {
            Ok(p) => p,
            Err(Error::NoRhoStar { .. }) => {
                for rho in 0..=8 {
                    prop_assert!(enumerate_q(&spec, rho) == 0.0);
                }
                return Ok(());
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        for rho in 0..=8 {
            let brute = enumerate_q(&spec, rho);
            prop_assert!((prof.q[rho] - brute).abs() <= 1e-12 * brute.max(1.0),
                "rho {}: dp {} brute {}", rho, prof.q[rho], brute);
        }
    }

    #[test]
    fn q_is_nondecreasing_and_bounded(spec in arb_spec()) {
        if let Ok(prof) = spec.profile(32) {
            prop_assert!(prof.q.windows(2).all(|w| w[0] <= w[1] + 1e-15));
            prop_assert!(prof.q.iter().all(|&q| q <= prof.q_infinity + 1e-12));
            prop_assert!(prof.q_infinity <= 1.0 + 1e-12);
            prop_assert_eq!(prof.q[0], 0.0);
            prop_assert_eq!(prof.q[1], 0.0);
            prop_assert!(prof.q[prof.rho_star] > 0.0);
        }
    }

    #[test]
    fn shifting_mass_to_the_top_atom_never_lowers_q(spec in arb_spec(), shift in 0.0f64..1.0) {
        let atoms = spec.weight.atoms();
        prop_assume!(atoms.len() >= 2);
        let moved = atoms[0].1 * shift;
        let mut new_atoms = atoms.to_vec();
        new_atoms[0].1 -= moved;
        let last = new_atoms.len() - 1;
        new_atoms[last].1 += moved;
        let heavier = InfluenceSpec::new(
            spec.threshold.clone(),
            DiscreteDistribution::new(new_atoms).unwrap(),
        ).unwrap();
        if let (Ok(a), Ok(b)) = (spec.profile(16), heavier.profile(16)) {
            for rho in 0..=16 {
                prop_assert!(b.q[rho] >= a.q[rho] - 1e-12);
            }
        }
    }

    #[test]
    fn pi_monotone_in_t_and_p(spec in arb_spec(), p in 0.001f64..0.9, t in 0u64..200) {
        if let Ok(prof) = spec.profile(32) {
            let a = pi_exact(t, p, &prof).value;
            let b = pi_exact(t + 1, p, &prof).value;
            let c = pi_exact(t, (p * 1.1).min(1.0), &prof).value;
            prop_assert!(b >= a - 1e-12);
            prop_assert!(c >= a - 1e-12);
        }
    }
}
