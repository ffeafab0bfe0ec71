mod common;

use std::f64::consts::FRAC_1_SQRT_2;

use gh_ansatz::covering::Covering;
use gh_ansatz::paths::{
    crossing_bound, fingerprint_distance, horizontal_length, region_constants, length_profile, path_length_between,
    radial_graph_fingerprint, Metric, ParamPath, PathPoint,
};
use gh_ansatz::sampling::disc_samples;
use gh_ansatz::Complex;
use nalgebra::Vector3;
use proptest::prelude::*;

fn point(r: f64, a: f64) -> Complex {
    Complex::from_polar(r, a)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn additive_over_concatenation(r1 in 0.0f64..0.8, a1 in 0.0f64..6.28, r2 in 0.0f64..0.8, a2 in 0.0f64..6.28, r3 in 0.0f64..0.8, a3 in 0.0f64..6.28) {
        let cov = Covering::default();
        let p = ParamPath::segment(point(r1, a1), point(r2, a2));
        let q = ParamPath::segment(point(r2, a2), point(r3, a3));
        let pq = p.concat(&q).unwrap();
        for m in [Metric::Euclidean, Metric::SpherePullback(&cov)] {
            let whole = path_length_between(&pq, &m, 0.0, 1.0).unwrap();
            let parts = path_length_between(&p, &m, 0.0, 1.0).unwrap() + path_length_between(&q, &m, 0.0, 1.0).unwrap();
            prop_assert!((whole - parts).abs() < 1e-9, "{}: {whole} vs {parts}", m.tag());
        }
    }

    #[test]
    fn profiles_are_monotone(a in 0.0f64..6.28) {
        let cov = Covering::default();
        let prof = length_profile(&ParamPath::radial(a), &Metric::SpherePullback(&cov), &[0.3, 0.6, 0.9, 0.99]).unwrap();
        prop_assert!(prof.is_monotone());
    }

    /// Pointwise `g_𝔻 ≥ (1/√2)·Φ*g_{S²}`, which integrates to the length bound.
    #[test]
    fn conformal_bound(r in 0.0f64..0.95, a in 0.0f64..6.28, d in 0.0f64..6.28) {
        let data = common::blaschke_data();
        let p = PathPoint::disc(point(r, a));
        let w = Vector3::new(d.cos(), d.sin(), 0.0);
        let disc = Metric::Disc(&data).speed(&p, &w).unwrap();
        let sphere = Metric::SpherePullback(data.covering()).speed(&p, &w).unwrap();
        prop_assert!(disc >= (FRAC_1_SQRT_2 - 1e-6) * sphere, "{disc} vs {sphere}");
    }

    #[test]
    fn crossing_lower_bound(height in 0.7f64..0.95) {
        let cov = Covering::default();
        let consts = region_constants(0.1).unwrap();
        for k in [3u32, 5] {
            let len = path_length_between(&ParamPath::crossing(k, height), &Metric::SpherePullback(&cov), 0.0, 1.0).unwrap();
            prop_assert!(len >= crossing_bound(k, &consts) - 1e-6, "k {k}: {len}");
        }
    }
}

#[test]
fn conformal_bound_on_lengths() {
    let data = common::blaschke_data();
    let path = ParamPath::segment(point(0.1, 0.3), point(0.9, 2.0));
    let disc = path_length_between(&path, &Metric::Disc(&data), 0.0, 1.0).unwrap();
    let sphere = path_length_between(&path, &Metric::SpherePullback(data.covering()), 0.0, 1.0).unwrap();
    assert!(disc >= (FRAC_1_SQRT_2 - 1e-6) * sphere);
}

#[test]
fn fingerprint_examples() {
    use gh_ansatz::complex::{apply_mu, MuSpec};
    let data = common::blaschke_data();
    let samples = disc_samples(100, 0.9, 11);
    let print = |mu: MuSpec| radial_graph_fingerprint(&apply_mu(mu, data.psi_fn().clone()).unwrap(), &samples).unwrap();
    let one = print(MuSpec::Scale { c: 1.0 });
    let two = print(MuSpec::Scale { c: 2.0 });
    let pert = print(MuSpec::Perturb { eps: 0.05 });
    assert_eq!(fingerprint_distance(&one, &one).unwrap(), 0.0);
    let sup = one.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    assert!((fingerprint_distance(&one, &two).unwrap() - sup).abs() < 1e-15);
    assert!(fingerprint_distance(&one, &pert).unwrap() > 1e-4);
}

#[test]
fn constant_path_has_zero_lengths() {
    let data = common::blaschke_data();
    let p = ParamPath::constant(PathPoint { z: point(0.2, 1.0), theta: 0.5 });
    let l = horizontal_length(&p, &data, true).unwrap();
    assert_eq!((l.g3_length, l.short_length, l.max_beta), (0.0, 0.0, 0.0));
}
