//! Shared fixtures for the benchmarks.

use tiltkit::closure::MonomialRing;
use tiltkit::{Ring, RingCtx, RingExt, TiltElem};

pub fn kummer() -> Ring {
    RingCtx::parse("Zp[p^(1/p^2)] p=3 M=4").unwrap()
}

/// The uniformizer flat `(3, x^3, x)` of the Kummer ring.
pub fn uniformizer_flat() -> TiltElem {
    let r = kummer();
    tiltkit::tilt_lift(&r, r.parse_seq("3, x^3, x").unwrap()).unwrap()
}

/// `1_flat` over `Z/p^m` at the given depth.
pub fn one_flat(p: u64, m: u32, depth: usize) -> TiltElem {
    TiltElem::one(&RingCtx::zmod(p, m).unwrap(), depth)
}

pub fn cusp() -> MonomialRing {
    MonomialRing::parse("Fp[t^2,t^3] p=5", Some("t^2")).unwrap()
}
