use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tiltkit::*;

fn ring(s: &str) -> Ring {
    RingCtx::parse(s).unwrap()
}

#[test]
fn uniformizer_flat() {
    let r = ring("Zp[p^(1/p^2)] p=3 M=4");
    let w = tilt_lift(&r, r.parse_seq("3, x^3, x").unwrap()).unwrap();
    assert_eq!(sharp(&w), (r.from_int(3), 3));
    let sq = tilt_mul(&w, &w).unwrap();
    assert_eq!(sq.seq(), r.parse_seq("9, x^6, x^2").unwrap().as_slice());
    assert!(tilt_mul(&w, &TiltElem::zero(&r, 2)).unwrap().is_zero());
    let f = tilt_frobenius(&w);
    assert_eq!(f.seq(), r.parse_seq("27, 3, x^3").unwrap().as_slice());
    assert!(tilt_frobenius_inv(&f).unwrap().same_at(&w.truncate(1), 4).unwrap());
}

#[test]
fn limits_and_incompatibility() {
    let r = ring("Zp p=5 M=2");
    assert_eq!(limit_pth_powers(&r, &r.parse_seq("2, 2").unwrap()).unwrap(), (r.from_int(7), 2));
    assert!(matches!(tilt_lift(&r, r.parse_seq("2, 2").unwrap()), Err(Error::Incompatible { index: 1, valuation: 1 })));
    let r = ring("Zp p=3 M=4");
    assert_eq!(limit_pth_powers(&r, &r.parse_seq("4, 1").unwrap()).unwrap(), (r.from_int(1), 2));
    assert_eq!(limit_pth_powers(&r, &r.parse_seq("1, 1, 1, 1").unwrap()).unwrap(), (r.from_int(1), 4));
    assert!(matches!(limit_pth_powers(&r, &r.parse_seq("1, 2").unwrap()), Err(Error::NotCauchy { index: 1 })));
}

#[test]
fn sharp_not_additive() {
    let r = ring("Zp p=5 M=2");
    let one = TiltElem::one(&r, 2);
    let two = tilt_add(&one, &one).unwrap();
    assert_eq!(sharp(&two), (r.from_int(7), 2));
    assert!(matches!(tilt_add_to(&one, &one, 3), Err(Error::InsufficientDepth { requested: 3, achievable: 2 })));
    let shallow = TiltElem::one(&r, 1);
    assert_eq!(tilt_add(&shallow, &shallow).unwrap().seq()[0], r.from_int(7));
}

#[test]
fn char_p_addition_is_componentwise() {
    let r = ring("Fp[t^(1/p^2)]/t^2 p=3");
    let x = tilt_lift(&r, r.parse_seq("t, t^(1/3), t^(1/9)").unwrap()).unwrap();
    let y = tilt_lift(&r, r.parse_seq("1 + t, 1 + t^(1/3), 1 + t^(1/9)").unwrap()).unwrap();
    let s = tilt_add(&x, &y).unwrap();
    let expected: Vec<RingElem> = x.seq().iter().zip(y.seq()).map(|(a, b)| a + b).collect();
    assert_eq!(s.seq(), &expected[..s.seq().len()]);
}

#[test]
fn teichmuller_examples() {
    let w = WittCtx::new(5, 2).unwrap();
    let two = w.residue().from_int(2);
    assert_eq!(teichmuller(&two, &w).unwrap(), w.ring().from_int(7));
    for (q, m) in [(2, 3), (5, 2), (9, 3)] {
        assert!(sharp_equals_teichmuller(&WittCtx::new(q, m).unwrap()).unwrap().is_holds());
    }
    let w2 = WittCtx::new(2, 4).unwrap();
    let root = unique_p_root_in_sharp_image(&w2.ring().from_int(1), &w2).unwrap();
    assert_eq!(root.root, w2.ring().from_int(1));
    assert_eq!(root.all_roots.unwrap().len(), 4);
    assert!(matches!(unique_p_root_in_sharp_image(&w2.ring().from_int(15), &w2), Err(Error::NotInImage)));
}

#[test]
fn injective_sharp_examples() {
    for d in ["Zp p=2 M=3", "Zp p=5 M=2"] {
        assert!(tilt::tilt_is_injective_sharp(&ring(d), 3).unwrap().is_holds(), "{d}");
    }
}

#[test]
fn json_round_trip() {
    let r = ring("Zq q=9 M=2");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = r.residue_ctx().unwrap().random_elem(&mut rng);
    let x = TiltElem::from_residues(&r, &witt::root_system(&a, 2).unwrap()).unwrap();
    let back = TiltElem::from_json(&x.to_json()).unwrap();
    assert!(back.same_at(&x, 2).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sharp_is_multiplicative(seed in any::<u64>(), idx in 0usize..4, depth in 1usize..5) {
        let r = ring(["Zp p=3 M=3", "Zp p=2 M=4", "Zq q=4 M=3", "Zp[p^(1/p^1)] p=3 M=2"][idx]);
        let res = r.residue_ctx().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mk = |rng: &mut ChaCha8Rng| {
            let top = res.random_elem(rng);
            let mut seq: Vec<RingElem> = (0..=depth).map(|k| top.pow_p_times((depth - k) as u32)).collect();
            seq.truncate(depth + 1);
            TiltElem::from_residues(&r, &seq).unwrap()
        };
        let (x, y) = (mk(&mut rng), mk(&mut rng));
        let (sx, px) = sharp(&x);
        let (sy, _) = sharp(&y);
        let (sxy, pxy) = sharp(&tilt_mul(&x, &y).unwrap());
        prop_assert_eq!(px, pxy);
        prop_assert!((&sx * &sy).congruent(&sxy, pxy).unwrap());
    }
}
