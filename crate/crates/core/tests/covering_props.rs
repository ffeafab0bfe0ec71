mod common;

use gh_ansatz::covering::{stereo_lift, stereo_project, Covering, StereoCoord};
use gh_ansatz::sampling::square_grid;
use gh_ansatz::tessellation::word_map;
use gh_ansatz::Complex;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    /// Even words generate the orientation-preserving deck group.
    #[test]
    fn deck_invariance(raw in prop::collection::vec(0u8..3, 2..7), seed in 0u64..1000) {
        let mut word = common::reduce(&raw);
        if word.len() % 2 == 1 {
            word.pop();
        }
        let g = word_map(&word);
        let cov = Covering::default();
        for z in gh_ansatz::sampling::disc_samples(20, 0.5, seed) {
            let gz = g.apply(z);
            prop_assume!(gz.norm() < 0.999);
            let (p, q) = (cov.phi(z).unwrap().point, cov.phi(gz).unwrap().point);
            prop_assert!(p.distance(&q) < 1e-9, "word {word} z {z}: {:e}", p.distance(&q));
        }
    }

    #[test]
    fn stereo_round_trip(re in -5.0f64..5.0, im in -5.0f64..5.0) {
        let w = Complex::new(re, im);
        let p = stereo_lift(StereoCoord::Finite(w));
        prop_assert!((p.norm() - 1.0).abs() < 1e-12);
        match stereo_project(&p) {
            StereoCoord::Finite(back) => prop_assert!((back - w).norm() < 1e-12 * (1.0 + w.norm_sqr())),
            StereoCoord::Infinity => prop_assert!(false, "finite w lifted to the pole"),
        }
    }
}

/// The 60×60 grid is restricted to |z| ≤ 0.6; deeper in a horoball
/// |dw/dz| is exponentially small by construction.
#[test]
fn derivative_nonvanishing_on_grid() {
    let cov = Covering::default();
    let pts = square_grid(60, 0.6, 0.6);
    assert!(pts.len() > 2000);
    for z in pts {
        let s = cov.phi(z).unwrap();
        let d = s.chart_derivative.norm();
        assert!(d > 1e-8, "|dw/dz| = {d:e} at {z}");
    }
}
