use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

use approxlat::density::{banach_density_emp, folner_measure, subset_generate, FolnerSpec, SubsetSpec};
use approxlat::exactnum::{int_rat, rat, Rational};
use approxlat::ipsystems::{verify_power_containment, ShrunkScheme};
use approxlat::patterns::{default_margin, gap_set, sumset, PatternQuery};
use approxlat::scheme::{enumerate, PadicScheme, QuadScheme, Scheme};
use approxlat::transversal::{difference_set, patch_census, separation_check};

const CAP: u64 = 100_000_000;

fn lam() -> QuadScheme {
    QuadScheme::new(2, rat(1, 1), true).unwrap()
}

#[test]
fn bernoulli_counts_follow_the_binomial_law() {
    let s = lam();
    let all = enumerate(&s, &s.interval(int_rat(100_000)), CAP).unwrap();
    let n = all.len() as f64;
    let theta = 1.0 / 3.0;
    for seed in 0..10 {
        let p = subset_generate(&all, &SubsetSpec::Bernoulli { theta: rat(1, 3), seed });
        let sigma = (n * theta * (1.0 - theta)).sqrt();
        let dev = (p.len() as f64 - n * theta).abs();
        assert!(dev <= 3.0 * sigma, "seed {seed}: {} of {n}, {:.1} sigma", p.len(), dev / sigma);
    }
}

#[test]
fn half_subwindow_banach_density() {
    let s = lam();
    let region = s.interval(int_rat(100_000));
    let all = enumerate(&s, &region, CAP).unwrap();
    let p = subset_generate(&all, &SubsetSpec::Subwindow { w: rat(1, 2) });
    // window length 1000
    let d = banach_density_emp(&s, &p, &region, &int_rat(500)).unwrap();
    let target = 0.5 / 2f64.sqrt();
    let got = d.to_f64().unwrap();
    assert!((got - target).abs() / target < 0.05, "{got} vs {target}");
    assert!(got >= target);
}

#[test]
fn shrunk_powers_for_small_n() {
    let s = lam();
    for n in 1..=4 {
        let sh = ShrunkScheme::new(&s, n).unwrap();
        for t in [50, 200] {
            let r = verify_power_containment(&sh, &s.interval(int_rat(t)), CAP).unwrap();
            assert_eq!(r.violations, 0, "n={n} T={t}");
        }
        let next = ShrunkScheme::new(&s, n + 1).unwrap();
        let a = enumerate(&sh.shrunk, &s.interval(int_rat(300)), CAP).unwrap();
        let b = enumerate(&next.shrunk, &s.interval(int_rat(300)), CAP).unwrap();
        assert!(b.is_subset_of(&a), "Delta_{} not inside Delta_{n}", n + 1);
    }
}

#[test]
fn patch_variety_grows_with_radius() {
    let s = lam();
    let set = enumerate(&s, &s.interval(int_rat(2000)), CAP).unwrap();
    let inner = s.interval(int_rat(1900));
    let mut last = 0;
    for rho in 1..=8 {
        let stats = patch_census(&s, &set, &inner, &int_rat(rho)).unwrap();
        let total: Rational = stats.patches.keys().map(|k| stats.frequency(k)).sum();
        assert_eq!(total, int_rat(1));
        assert!(stats.distinct() >= last, "rho {rho}");
        last = stats.distinct();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn haar_measure_is_translation_invariant(
        m in -500i64..500, n in -300i64..300, t in 1i64..400, extra in 1i64..50,
    ) {
        let s = lam();
        let c = s.point(m, n);
        let scales = vec![int_rat(t), int_rat(t + extra)];
        let centred = FolnerSpec::centered(&s, scales.clone()).unwrap();
        let moved = FolnerSpec::new(&s, scales, Some(vec![c.clone(), c]), None).unwrap();
        for j in 0..2 {
            prop_assert_eq!(folner_measure(&s, &centred, j).unwrap(), folner_measure(&s, &moved, j).unwrap());
        }
        let p = PadicScheme::new(3, rat(1, 1), true).unwrap();
        let x = p.point(m, (t % 5) as u32);
        let level = (extra % 6) - 1;
        prop_assert_eq!(p.measure(&p.ball(&x, &level)), p.measure(&p.ball(&p.zero(), &level)));
    }

    #[test]
    fn bernoulli_subsets_nest(seed in any::<u64>(), a in 1i64..100, b in 1i64..100, t in 10i64..300) {
        let s = lam();
        let all = enumerate(&s, &s.interval(int_rat(t)), CAP).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        let small = subset_generate(&all, &SubsetSpec::Bernoulli { theta: rat(lo, 100), seed });
        let big = subset_generate(&all, &SubsetSpec::Bernoulli { theta: rat(hi, 100), seed });
        prop_assert!(small.is_subset_of(&big));
    }

    #[test]
    fn default_margin_keeps_displacements_inside(
        t in 60i64..200, e in 1i64..15, f1 in -2i64..=2, f2 in -1i64..=1, seed in any::<u64>(),
    ) {
        let s = lam();
        let region = s.interval(int_rat(t));
        let all = enumerate(&s, &region, CAP).unwrap();
        let cands = enumerate(&s, &s.interval(int_rat(e)), CAP).unwrap();
        let mut pattern = vec![s.point(1, 0)];
        if (f1, f2) != (1, 0) {
            pattern.push(s.point(f1, f2));
        }
        let q = PatternQuery::dilation(pattern).unwrap();
        let margin = default_margin(&s, &all, &cands, &q.endos());
        let inner = s.shrink(&region, &margin);
        prop_assume!(inner.is_some());
        let inner = inner.unwrap();
        for x in all.iter().filter(|x| s.in_region(&inner, x)) {
            for l in cands.iter() {
                for e in q.endos() {
                    prop_assert!(s.in_region(&region, &s.add(x, &e.apply(&s, l))));
                }
            }
        }
        let p = subset_generate(&all, &SubsetSpec::Bernoulli { theta: rat(1, 2), seed });
        prop_assert!(gap_set(&s, &p, &inner, &cands, &q).is_ok());
    }

    #[test]
    fn sumsets_are_symmetric_and_obey_the_norm_bound(t in 5i64..80, q in 1u32..=3) {
        let s = lam();
        let set = enumerate(&s, &s.interval(int_rat(t)), CAP).unwrap();
        let sums = sumset(&s, &set, q, CAP).unwrap();
        for x in sums.iter() {
            prop_assert!(sums.contains(&s.neg(x)));
            prop_assert!(s.in_lambda_q(x, q as u64));
            if !x.is_zero() {
                prop_assert!(x.norm() != BigInt::zero());
            }
        }
    }

    #[test]
    fn difference_sets_are_symmetric_with_nonzero_norms(t in 5i64..120, r in 1i64..15, order in 1u8..=2) {
        let s = lam();
        let set = enumerate(&s, &s.interval(int_rat(t)), CAP).unwrap();
        let xi = difference_set(&s, &set, &int_rat(r), order, CAP).unwrap();
        prop_assert!(xi.differences.contains(&s.zero()));
        for x in xi.differences.iter() {
            prop_assert!(xi.differences.contains(&s.neg(x)));
            prop_assert!(s.star_within(x, &int_rat(2 * order as i64), false));
            if !x.is_zero() {
                prop_assert!(x.norm() != BigInt::zero());
            }
        }
    }

    #[test]
    fn separation_is_monotone_in_the_radius(num in 0i64..200, smaller in 0i64..200, q in 1u64..=2) {
        let s = lam();
        let set = enumerate(&s, &s.interval(int_rat(40)), CAP).unwrap();
        let xi = difference_set(&s, &set, &int_rat(6), 1, CAP).unwrap();
        let v = rat(num, 100);
        let v2 = rat(num.min(smaller), 100);
        let scan = int_rat(3);
        let at = separation_check(&s, &xi, q, &v, &scan, CAP).unwrap();
        let below = separation_check(&s, &xi, q, &v2, &scan, CAP).unwrap();
        if at.ok {
            prop_assert!(below.ok);
        }
        if let Some(mu) = &at.max_admissible_radius {
            // |mu| |mu*| >= 1 with |mu*| <= (2 + q) w
            prop_assert!(mu.cmp_rational(&rat(1, 2 + q as i64)).is_ge());
        }
    }
}
