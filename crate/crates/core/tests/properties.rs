mod common;

use mlrc::bounds::{
    all_bounds, bound_equal_delta, bound_ml, bound_multi, bound_r_delta, bound_r_local, bound_two_locality, ceil_div,
    Part,
};
use mlrc::code::{verify_locality, ErasurePattern, LocalityPart, LocalityProfile, Repairer};
use mlrc::construct::{build_multi_delta_lrc, ConstructionParams};
use mlrc::sim::{self, Failures, SimConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn value(b: Result<mlrc::bounds::BoundResult, mlrc::bounds::BoundsError>) -> Option<i64> {
    b.ok().and_then(|b| b.value)
}

/// Two or three parts with strictly increasing `r`.
fn ml_parts() -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::vec((1usize..14, 1usize..4), 2..=3).prop_map(|v| {
        let mut r = 0;
        v.into_iter()
            .map(|(n, dr)| {
                r += dr;
                (n, r)
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn ceil_div_matches_float(a in -1000i64..1000, b in 1i64..50) {
        prop_assert_eq!(ceil_div(a, b), (a as f64 / b as f64).ceil() as i64);
    }

    #[test]
    fn r_delta_reduces_to_r_local(n in 1usize..60, kf in 0.0f64..1.0, r in 1usize..10) {
        let k = 1 + ((n - 1) as f64 * kf) as usize;
        prop_assert_eq!(bound_r_delta(n, k, r, 2).unwrap().value, bound_r_local(n, k, r).unwrap().value);
    }

    #[test]
    fn r_delta_monotone_and_below_singleton(n in 2usize..60, kf in 0.0f64..1.0, r in 1usize..10, d in 2usize..6) {
        let k = 1 + ((n - 2) as f64 * kf) as usize;
        let single = (n - k + 1) as i64;
        if let Some(v) = bound_r_delta(n, k, r, d).unwrap().value {
            prop_assert!(v <= single);
            if let Some(w) = bound_r_delta(n, k, r, d + 1).unwrap().value {
                prop_assert!(w <= v);
            }
            if let Some(w) = bound_r_delta(n, k + 1, r, d).unwrap().value {
                prop_assert!(w <= v);
            }
        }
    }

    #[test]
    fn delta_two_specialisations_agree(parts in ml_parts(), kf in 0.0f64..1.0) {
        let n: usize = parts.iter().map(|p| p.0).sum();
        let k = 1 + ((n - 1) as f64 * kf) as usize;
        let full: Vec<Part> = parts.iter().map(|&(a, b)| Part::new(a, b, 2)).collect();
        let ml = value(bound_ml(n, k, &parts));
        if ml.is_some() {
            prop_assert_eq!(value(bound_multi(n, k, &full)), ml);
            prop_assert_eq!(value(bound_equal_delta(n, k, &parts, 2)), ml);
            if parts.len() == 2 {
                prop_assert_eq!(value(bound_two_locality(n, k, full[0], full[1])), ml);
            }
        }
    }

    #[test]
    fn two_parts_match_general(n1 in 1usize..16, n2 in 1usize..16, r1 in 1usize..4, dr in 0usize..3,
                               d1 in 2usize..5, dd in 0usize..3, kf in 0.0f64..1.0) {
        let d2 = (d1 - dd).max(2);
        let (p1, p2) = (Part::new(n1, r1, d1), Part::new(n2, r1 + dr, d2));
        let n = n1 + n2;
        let k = 1 + ((n - 1) as f64 * kf) as usize;
        let two = bound_two_locality(n, k, p1, p2).unwrap();
        let multi = bound_multi(n, k, &[p1, p2]).unwrap();
        if two.applicable && multi.applicable && two.formula == mlrc::bounds::Formula::TwoLocality {
            prop_assert_eq!(two.value, multi.value);
        }
    }

    #[test]
    fn multi_bound_dominates_r_delta(parts in prop::collection::vec((1usize..10, 1usize..4, 2usize..4), 2..=3),
                                     kf in 0.0f64..1.0) {
        let mut parts: Vec<Part> = parts.into_iter().map(|(n, r, d)| Part::new(n, r, d)).collect();
        parts.sort_by_key(|p| p.r);
        let mut ds: Vec<usize> = parts.iter().map(|p| p.delta).collect();
        ds.sort_unstable_by(|a, b| b.cmp(a));
        for (p, d) in parts.iter_mut().zip(ds) {
            p.delta = d;
        }
        let n: usize = parts.iter().map(|p| p.n).sum();
        let k = 1 + ((n - 1) as f64 * kf) as usize;
        let last = *parts.last().unwrap();
        if let (Some(m), Some(rd)) = (value(bound_multi(n, k, &parts)), value(bound_r_delta(n, k, last.r, last.delta))) {
            prop_assert!(m <= rd, "multi {} > r-delta {}", m, rd);
        }
    }
}

fn constructible() -> Vec<ConstructionParams> {
    let mut out = Vec::new();
    for delta in 2..=3 {
        for r1 in 2..=3 {
            for r2 in r1..=4 {
                let (m1, m2) = (r1 + delta - 1, r2 + delta - 1);
                for g1 in 1..=2 {
                    for g2 in 1..=2 {
                        let (n1, n2) = (g1 * m1, g2 * m2);
                        if n1 + n2 > 16 {
                            continue;
                        }
                        for k in 1..=n1 + n2 {
                            let p = ConstructionParams { parts: vec![(n1, r1), (n2, r2)], k, delta, q: None };
                            if p.validate().is_empty() {
                                out.push(p);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[test]
fn constructions_meet_their_bound() {
    let all = constructible();
    assert!(all.len() >= 20, "only {} parameter sets", all.len());
    for p in all {
        let out = build_multi_delta_lrc(&p).unwrap();
        let c = &out.certificate;
        assert_eq!(out.code.k(), p.k, "{p:?}");
        assert_eq!(out.code.parity_check().rows(), c.n - p.k);
        assert!(c.achieved_d >= c.d_prime);
        assert!(c.optimal, "{p:?}: d = {} bound = {:?} ({})", c.achieved_d, c.bound_d, c.bound_formula);
        let hints: Vec<Vec<usize>> = out.groups.iter().map(|g| g.1.clone()).collect();
        assert!(verify_locality(&out.code, &out.profile, &hints).unwrap().is_certified());
        // Every applicable bound is an upper bound on the achieved distance.
        let parts: Vec<Part> = out.profile.params().into_iter().map(|(a, b, d)| Part::new(a, b, d)).collect();
        for b in all_bounds(c.n, c.k, &parts, None) {
            if let Some(v) = b.value {
                assert!(c.achieved_d as i64 <= v, "{p:?}: {} gives {v} < d = {}", b.formula, c.achieved_d);
            }
        }
    }
}

#[test]
fn bounds_are_sound_on_random_codes() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    for _ in 0..40 {
        let c = common::random_code(&mut rng);
        let d = c.min_distance() as i64;
        for r in 1..=c.k() {
            for delta in 2..=3 {
                let p = LocalityProfile::new(vec![LocalityPart { indices: (0..c.n()).collect(), r, delta }]);
                if verify_locality(&c, &p, &[]).unwrap().is_certified() {
                    checked += 1;
                    if let Some(v) = bound_r_delta(c.n(), c.k(), r, delta).unwrap().value {
                        assert!(d <= v);
                    }
                    if let Some(v) = bound_r_local(c.n(), c.k(), r).unwrap().value {
                        assert!(d <= v);
                    }
                }
            }
        }
    }
    assert!(checked > 10);
}

fn t4() -> mlrc::construct::ConstructionOutput {
    build_multi_delta_lrc(&ConstructionParams { parts: vec![(6, 2), (8, 3)], k: 8, delta: 2, q: Some(17) }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn repair_recovers_below_distance(msg in prop::collection::vec(0u32..17, 8),
                                      erased in prop::collection::btree_set(0usize..14, 0..=3)) {
        let out = t4();
        let hints: Vec<Vec<usize>> = out.groups.iter().map(|g| g.1.clone()).collect();
        let cert = verify_locality(&out.code, &out.profile, &hints).unwrap();
        let rep = Repairer::new(&out.code, &out.profile, cert.certificate().unwrap()).unwrap();
        let word = out.code.encode(&msg).unwrap();
        let erased: Vec<usize> = erased.into_iter().collect();
        let got = rep.repair(&word, &ErasurePattern::new(14, &erased).unwrap()).unwrap();
        prop_assert_eq!(got.word, word);
        prop_assert_eq!(got.symbols.len(), erased.len());
    }
}

#[test]
fn simulation_ignores_thread_count() {
    let out = t4();
    let hints: Vec<Vec<usize>> = out.groups.iter().map(|g| g.1.clone()).collect();
    let cfg = SimConfig { trials: 2000, failures: Failures::Range { min: 1, max: 5 }, seed: 42, within_group: false };
    let parallel = sim::run(&out.code, &out.profile, &hints, &cfg).unwrap();
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| sim::run(&out.code, &out.profile, &hints, &cfg).unwrap());
    assert_eq!(serde_json::to_string(&parallel).unwrap(), serde_json::to_string(&serial).unwrap());
}

#[test]
fn in_group_failures_are_always_local() {
    let out = t4();
    let hints: Vec<Vec<usize>> = out.groups.iter().map(|g| g.1.clone()).collect();
    let cfg = SimConfig { trials: 1000, failures: Failures::Fixed(1), seed: 3, within_group: true };
    let rep = sim::run(&out.code, &out.profile, &hints, &cfg).unwrap();
    assert_eq!(rep.all_local, 1000);
    assert!(rep.parts.iter().all(|p| p.local_success_rate == Some(1.0)));
}
