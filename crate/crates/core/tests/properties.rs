//! Invariants that hold for every scheme, checked on builtins and generated schemes.

mod common;

use std::sync::OnceLock;

use common::matching_scheme;
use paperfold::criterion::{injectivity_radius, Analysis, CriterionParams};
use paperfold::modulus::Modulus;
use paperfold::rational::{fmt_rat, rat, to_f64, Rat};
use paperfold::scar::{ball_component, build_scar, Base, ScarPair, TailMode};
use paperfold::scheme::{builtin_example, parse_scheme, truncate, BoundaryParam, BUILTIN_NAMES};
use proptest::prelude::*;

fn seq() -> &'static Analysis {
    static AN: OnceLock<Analysis> = OnceLock::new();
    AN.get_or_init(|| {
        let pair = ScarPair::build(truncate(&builtin_example("seq").unwrap(), &rat(1, 256)).unwrap()).unwrap();
        let rbar = injectivity_radius(&pair).unwrap();
        Analysis::new(pair, CriterionParams::new(rbar, rat(9, 40)).unwrap(), &rbar).unwrap()
    })
}

fn cantor() -> &'static Analysis {
    static AN: OnceLock<Analysis> = OnceLock::new();
    AN.get_or_init(|| {
        let pair = ScarPair::build(truncate(&builtin_example("cantor").unwrap(), &rat(1, 64)).unwrap()).unwrap();
        Analysis::new(pair, CriterionParams::new(rat(1, 6), rat(1, 4)).unwrap(), &rat(1, 6)).unwrap()
    })
}

fn analyses() -> [&'static Analysis; 2] {
    [seq(), cantor()]
}

/// Boundary parameter `k / 2^12` on the unit square.
fn grid_param(k: u32) -> BoundaryParam {
    BoundaryParam::new(0, rat(k as i128, 1 << 12))
}

#[test]
fn builtin_scars_are_trees_with_euler_characteristic_two() {
    for name in BUILTIN_NAMES {
        let scheme = builtin_example(name).unwrap();
        for eps in [rat(1, 16), rat(1, 64)] {
            let fs = truncate(&scheme, &eps).unwrap();
            // The free realization keeps every gap as its own arc and may close cycles.
            let tree = build_scar(std::sync::Arc::new(fs), TailMode::Collapse).unwrap();
            assert!(tree.graph.is_connected(), "{name}");
            assert_eq!(tree.graph.edges.len() + 1, tree.graph.node_count(), "{name}: not acyclic");
            assert_eq!(tree.euler_characteristic(), 2, "{name} at {}", fmt_rat(&eps));
        }
    }
}

#[test]
fn ncc_is_nonincreasing() {
    for an in analyses() {
        let rbar = an.params.rbar;
        let radii: Vec<Rat> = (1..=256).map(|k| rbar * rat(k, 256)).collect();
        let counts: Vec<usize> = radii.iter().map(|r| an.component_count(r)).collect();
        assert!(counts.windows(2).all(|w| w[0] >= w[1]), "{counts:?}");
    }
}

#[test]
fn rho_vanishes_at_zero_and_increases() {
    for an in analyses() {
        let md = Modulus::new(an).unwrap();
        let top = md.params.delta / Rat::from_integer(2);
        let ts: Vec<Rat> = (0..=32).map(|k| top * rat(k, 32)).collect();
        for k in [0, 7, 100, 1000, 3000] {
            let s = md.sample(&grid_param(k), &(top / Rat::from_integer(4))).unwrap();
            let rho: Vec<f64> = ts.iter().map(|t| md.rho_point(&s, t).unwrap().rho).collect();
            assert_eq!(rho[0], 0.0);
            assert!(rho.windows(2).all(|w| w[0] <= w[1]), "{rho:?}");
            // Below the collar height the prefactor t/h alone is strictly increasing.
            assert!(rho[1..=8].windows(2).all(|w| w[0] < w[1]), "{rho:?}");
        }
    }
}

#[test]
fn rho_is_strictly_increasing_where_the_profile_is_certified() {
    let md = Modulus::new(cantor()).unwrap();
    let s = md.sample(&BoundaryParam::new(0, rat(1, 1)), &rat(0, 1)).unwrap();
    let top = md.params.delta / Rat::from_integer(2);
    let rho: Vec<f64> = (0..=16).map(|k| md.rho_point(&s, &(top * rat(k, 16))).unwrap().rho).collect();
    assert!(rho.windows(2).all(|w| w[0] < w[1]), "{rho:?}");
}

#[test]
fn rho_is_continuous_at_the_collar_height() {
    for an in analyses() {
        let md = Modulus::new(an).unwrap();
        let h = md.params.delta / Rat::from_integer(8);
        let eps = h / Rat::from_integer(1 << 20);
        for k in [5, 300, 2000] {
            let s = md.sample(&grid_param(k), &h).unwrap();
            let below = md.rho_point(&s, &(h - eps)).unwrap().rho;
            let at = md.rho_point(&s, &h).unwrap().rho;
            let above = md.rho_point(&s, &(h + eps)).unwrap().rho;
            assert!(below <= at && at <= above);
            assert!(above - below <= 1e-4 * at, "{below} {at} {above}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scar_distance_is_a_metric(a in 0u32..16384, b in 0u32..16384, c in 0u32..16384, which in 0usize..2) {
        let pair = &analyses()[which].pair;
        let (x, y, z) = (grid_param(a), grid_param(b), grid_param(c));
        for tree in [&pair.collapse, &pair.free] {
            let d = |p: &BoundaryParam, q: &BoundaryParam| tree.distance(p, q).unwrap();
            prop_assert_eq!(d(&x, &x), Rat::from_integer(0));
            prop_assert_eq!(d(&x, &y), d(&y, &x));
            prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
            prop_assert!(!d(&x, &y).is_negative());
        }
        let b = pair.distance(&x, &y).unwrap();
        prop_assert!(b.lo <= b.hi);
    }

    #[test]
    fn generated_fold_schemes_are_spheres(n in 1usize..=8, bits in proptest::collection::vec(any::<bool>(), 16)) {
        let text = matching_scheme(n, &bits);
        let scheme = parse_scheme(&text).unwrap();
        let fs = std::sync::Arc::new(truncate(&scheme, &rat(1, 64)).unwrap());
        for mode in [TailMode::Collapse, TailMode::Free] {
            let tree = build_scar(fs.clone(), mode).unwrap();
            prop_assert!(tree.graph.is_connected());
            prop_assert_eq!(tree.graph.edges.len() + 1, tree.graph.node_count());
            prop_assert_eq!(tree.euler_characteristic(), 2);
        }
    }

    #[test]
    fn component_measure_is_at_least_the_diameter(k in 0u32..16384, num in 1i128..256, which in 0usize..2) {
        let an = analyses()[which];
        let tree = &an.pair.collapse;
        let r = an.params.rbar * rat(num, 256);
        let x = tree.locate(&grid_param(k)).unwrap();
        for base in [Base::Singular, Base::Point(x.clone())] {
            if let Ok(info) = ball_component(tree, &base, &x, &r) {
                prop_assert!(info.cm >= r + r, "cm {} at r {}", fmt_rat(&info.cm), fmt_rat(&r));
            }
        }
    }

    #[test]
    fn goodness_never_exceeds_m_over_2r(num in 1i128..=1024, which in 0usize..2) {
        let an = analyses()[which];
        let (rbar, m) = (an.params.rbar, to_f64(&an.params.m));
        let lo = rbar / Rat::from_integer(64);
        let s = lo + (rbar - lo) * rat(num, 1024);
        for q in an.pair.collapse.singular_points().iter().take(4) {
            let q = an.pair.collapse.representative(q);
            let prof = an.singular_profile(&q, &lo, &rbar).unwrap();
            prop_assert!(prof.iota(&s) <= m / (2.0 * to_f64(&s)) * (1.0 + 1e-12));
        }
        let prof = an.point_profile(&grid_param(1234), &lo, &rbar).unwrap();
        prop_assert!(prof.iota(&s) <= m / (2.0 * to_f64(&s)) * (1.0 + 1e-12));
    }
}
