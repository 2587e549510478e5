use super::*;
use proptest::prelude::*;

fn ring(s: &str) -> Ring {
    RingCtx::parse(s).unwrap()
}

#[test]
fn descriptors_round_trip() {
    for d in ["Zp p=5 M=2", "Zp[p^(1/p^2)] p=3 M=2", "Fq q=9", "Fp[t^(1/p^1)]/t^4 p=2", "Zq q=4 M=3"] {
        assert_eq!(ring(d).descriptor(), d);
    }
    assert_eq!(ring("Zq q=5 M=2").kind(), RingKind::ZmodPM);
}

#[test]
fn bad_descriptors() {
    for d in ["", "Zp p=4 M=2", "Zp p=5", "Fq q=12", "Zp p=5 M=2 M=3", "Qp p=5 M=1", "Fp[t^(1/p^1)]/t^0 p=2", "Zp p=5 M=0"] {
        assert!(RingCtx::parse(d).is_err(), "{d}");
    }
}

#[test]
fn kummer_relation() {
    let r = ring("Zp[p^(1/p^1)] p=3 M=2");
    let x = r.generator();
    assert_eq!(x.pow(3), r.from_int(3));
    assert_eq!(x.pow(6), r.from_int(0).checked_add(&r.from_int(9)).unwrap());
    assert!(x.pow(6).is_zero());
    assert_eq!(r.parse_elem("2*x^4 + 1").unwrap(), r.from_coeffs(&[1, 6]).unwrap());
}

#[test]
fn series_truncation_and_parsing() {
    let r = ring("Fp[t^(1/p^1)]/t^2 p=2");
    let a = r.parse_elem("t^(1/2) + t").unwrap();
    assert_eq!(a.coeffs(), &[0, 1, 1, 0]);
    assert_eq!(a.to_string(), "t^(1/2) + t");
    assert_eq!(a.pow(2), r.parse_elem("t").unwrap());
    assert!(r.parse_elem("t^(1/4)").is_err());
    assert!(r.parse_elem("t^5").unwrap().is_zero());
    assert_eq!(a.to_json(), json!([[1, 1], [2, 1]]));
    assert_eq!(r.elem_from_json(&a.to_json()).unwrap(), a);
}

#[test]
fn finite_field_generator_is_primitive() {
    for q in [4u64, 8, 9, 25, 27, 49, 81, 7] {
        let r = RingCtx::finite_field(q).unwrap();
        let g = r.generator();
        let mut seen = std::collections::HashSet::new();
        let mut acc = r.one();
        for _ in 0..q - 1 {
            assert!(seen.insert(acc.clone()));
            acc = &acc * &g;
        }
        assert!(acc.is_one(), "q = {q}");
    }
}

#[test]
fn inverses() {
    let r = ring("Zp p=3 M=5");
    assert_eq!(r.from_int(2).inverse().unwrap(), r.from_int(122));
    assert!(r.from_int(3).inverse().is_none());
    for d in ["Zq q=9 M=2", "Zp[p^(1/p^1)] p=2 M=3", "Fq q=8", "Fp[t^(1/p^1)]/t^3 p=3"] {
        let r = ring(d);
        for a in r.elements().unwrap().filter(|a| a.is_unit()) {
            assert!((&a * &a.inverse().unwrap()).is_one(), "{d}: {a}");
        }
    }
}

#[test]
fn structural_nzd_matches_enumeration() {
    for d in ["Zp p=2 M=3", "Zp[p^(1/p^1)] p=2 M=2", "Zq q=4 M=2", "Fp[t^(1/p^1)]/t^2 p=2", "Fq q=9", "Zp p=5 M=1"] {
        let r = ring(d);
        for a in r.elements().unwrap() {
            let s = a.is_nonzerodivisor();
            let e = a.is_nonzerodivisor_by_enumeration().unwrap();
            assert_eq!(s.nonzerodivisor, e.nonzerodivisor, "{d}: {a}");
            if let Some(w) = s.witness {
                assert!(!w.is_zero() && (&a * &w).is_zero());
            }
        }
    }
}

#[test]
fn enumeration_cap_is_enforced() {
    let r = ring("Zp p=5 M=10");
    assert!(matches!(r.elements(), Err(Error::TooLarge { .. })));
}

#[test]
fn frobenius_preimages() {
    let f = ring("Fq q=27");
    for a in f.elements().unwrap() {
        assert_eq!(a.frobenius_preimage().unwrap().frobenius().unwrap(), a);
    }
    let s = ring("Fp[t^(1/p^0)]/t^4 p=3");
    assert!(matches!(s.parse_elem("t").unwrap().frobenius_preimage(), Err(Error::NoPreimage)));
    assert!(ring("Zp p=3 M=2").one().frobenius().is_err());
}

#[test]
fn residue_projection_and_lift() {
    let r = ring("Zq q=9 M=2");
    let a = r.parse_elem("4*x + 7").unwrap();
    let abar = a.proj_mod_p().unwrap();
    assert_eq!(abar.ctx().descriptor(), "Fq q=9");
    assert_eq!(abar.coeffs(), &[1, 1]);
    let lifted = r.lift_residue(&abar).unwrap();
    assert!(lifted.congruent(&a, 1).unwrap());
    let k = ring("Zp[p^(1/p^1)] p=2 M=2");
    assert_eq!(k.residue_ctx().unwrap().descriptor(), "Fp[t^(1/p^0)]/t^2 p=2");
}

#[test]
fn mismatched_contexts_error() {
    let a = ring("Zp p=5 M=2").one();
    let b = ring("Zp p=5 M=3").one();
    assert!(matches!(a.checked_add(&b), Err(Error::CtxMismatch(_))));
}

fn any_ring() -> impl Strategy<Value = Ring> {
    prop_oneof![
        Just("Zp p=2 M=4"),
        Just("Zp p=7 M=2"),
        Just("Zp[p^(1/p^1)] p=3 M=2"),
        Just("Zp[p^(1/p^2)] p=2 M=3"),
        Just("Fq q=8"),
        Just("Fq q=25"),
        Just("Zq q=9 M=3"),
        Just("Fp[t^(1/p^1)]/t^3 p=2"),
    ]
    .prop_map(ring)
}

fn ring_and_elems(n: usize) -> impl Strategy<Value = (Ring, Vec<RingElem>)> {
    any_ring().prop_flat_map(move |r| {
        let len = r.len();
        let m = r.modulus();
        let elem = prop::collection::vec(0..m, len);
        (Just(r), prop::collection::vec(elem, n))
    })
    .prop_map(|(r, cs)| {
        let es = cs.into_iter().map(|c| r.from_coeffs(&c.iter().map(|&x| x as i128).collect::<Vec<_>>()).unwrap()).collect();
        (r, es)
    })
}

proptest! {
    #[test]
    fn ring_axioms((r, es) in ring_and_elems(3)) {
        let (a, b, c) = (&es[0], &es[1], &es[2]);
        prop_assert_eq!(&(a + b) + c, a + &(b + c));
        prop_assert_eq!(&(a * b) * c, a * &(b * c));
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!(a * &(b + c), &(a * b) + &(a * c));
        prop_assert_eq!(a * &r.one(), a.clone());
        prop_assert!((a + &a.neg()).is_zero());
    }

    #[test]
    fn frobenius_is_additive_mod_p((r, es) in ring_and_elems(2)) {
        let p = r.p();
        let (a, b) = (&es[0], &es[1]);
        let lhs = (a + b).pow(p);
        let rhs = &a.pow(p) + &b.pow(p);
        prop_assert!(lhs.congruent(&rhs, 1).unwrap());
    }

    /// `a = b mod p^r` with `r >= 1` gives `a^(p^k) = b^(p^k) mod p^(r+k)`.
    #[test]
    fn power_congruence((r, es) in ring_and_elems(2), k in 0u32..3) {
        if !r.is_mixed() {
            return Ok(());
        }
        let (a, d) = (&es[0], &es[1]);
        let b = a + &d.scale(r.p());
        let lhs = a.pow_p_times(k);
        let rhs = b.pow_p_times(k);
        prop_assert!(lhs.congruent(&rhs, 1 + k).unwrap());
    }

    #[test]
    fn enumeration_index_round_trip(idx in 0u64..729) {
        let r = ring("Zq q=9 M=3");
        let idx = idx % r.size().unwrap() as u64;
        prop_assert_eq!(r.element_at(idx).index(), idx);
    }
}
