#![allow(dead_code)]

use std::sync::Arc;

use gh_ansatz::ansatz::HolomorphicData;
use gh_ansatz::complex::{BlaschkePsi, BlaschkeSpec, I};
use gh_ansatz::covering::Covering;
use gh_ansatz::Complex;

/// Eighteen zeros targeting the base vertices, base 10.
pub fn blaschke_data() -> HolomorphicData {
    let vertices = [Complex::new(1.0, 0.0), I, Complex::new(-1.0, 0.0)];
    let spec = BlaschkeSpec::vertex_targeted(&vertices, 10.0, 6).unwrap();
    HolomorphicData::new(Covering::default(), Arc::new(BlaschkePsi::new(spec).unwrap())).unwrap()
}

/// Reduced reflection words: no letter repeated consecutively.
pub fn reduce(raw: &[u8]) -> String {
    let mut w = String::new();
    for &b in raw {
        let c = char::from(b'0' + b % 3);
        if !w.ends_with(c) {
            w.push(c);
        }
    }
    w
}
