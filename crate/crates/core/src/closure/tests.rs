use super::*;
use proptest::prelude::*;

fn mono(s: &str) -> MonomialRing {
    MonomialRing::parse(s, None).unwrap()
}

#[test]
fn descriptors() {
    for d in ["Fp[t^2,t^3] p=5", "Fp[t^(1/3)] p=3 K=1", "Fp[t^(2/3),t] p=3 K=1"] {
        assert_eq!(mono(d).descriptor(), d);
    }
    assert_eq!(mono("Fp[t^(1/3)] p=3").depth(), 1);
    assert_eq!(mono("Fp[t] p=2 K=2").gens(), &[4]);
    for d in ["Fp[t^(1/2)] p=3", "Fp[t^0] p=3", "Fp[t^2] p=4", "Fp[t^-1] p=3", "Zp[t] p=3", "Fp[t] q=3"] {
        assert!(MonomialRing::parse(d, None).is_err(), "{d}");
    }
    assert!(MonomialRing::parse("Fp[t^2,t^3] p=5", Some("t")).is_err());
    assert_eq!(MonomialRing::parse("Fp[t^2,t^3] p=5", Some("t^3")).unwrap().uniformizer(), 3);
}

#[test]
fn cusp_almost_integral() {
    let a = mono("Fp[t^2,t^3] p=5");
    let t = a.parse_elem("t").unwrap();
    let rep = is_almost_integral(&t, &a, DEFAULT_POWER_BOUND).unwrap();
    assert!(rep.is_holds());
    assert_eq!(rep.details["c"], 1);
    assert_eq!(rep.details["multiplier_exponent"], 2);
    let inv = a.parse_elem("t^-1").unwrap();
    assert_eq!(is_almost_integral(&inv, &a, 50).unwrap().verdict, Verdict::FailsWithWitness);
    let mixed = a.parse_elem("1 + t + 3*t^5").unwrap();
    assert!(is_almost_integral(&mixed, &a, 50).unwrap().details["bounded_check_agrees"].as_bool().unwrap());
}

#[test]
fn cusp_integral_and_proot() {
    let a = mono("Fp[t^2,t^3] p=5");
    let t = a.parse_elem("t").unwrap();
    let rep = is_integral(&t, &a, DEFAULT_DEGREE_BOUND).unwrap();
    assert!(rep.is_holds());
    assert_eq!(rep.details["relation"], "X^2 - (t^2)");
    let rep = is_p_root_closed(&a);
    assert_eq!(rep.verdict, Verdict::FailsWithWitness);
    assert_eq!(rep.witness.unwrap()["b"], "t");
    assert!(is_p_root_closed(&mono("Fp[t^(1/3)] p=3")).is_holds());
}

#[test]
fn localization_membership() {
    let a = mono("Fp[t^2,t^4] p=3");
    assert!(matches!(is_almost_integral(&a.parse_elem("t").unwrap(), &a, 10), Err(Error::BadElement(_))));
    let b = mono("Fp[t^(1/3)] p=3");
    assert!(matches!(b.parse_elem("t^(1/9)"), Err(Error::BadElement(_))));
}

#[test]
fn closure_of_two_thirds() {
    let a = mono("Fp[t^(2/3),t] p=3 K=1");
    let b = complete_integral_closure_monoid(&a);
    assert_eq!(b.descriptor(), "Fp[t^(1/3)] p=3 K=1");
    let rep = closure_report(&a).unwrap();
    assert!(rep.is_holds());
    assert_eq!(rep.details["idempotent"], true);
    assert_eq!(complete_integral_closure_monoid(&b), b);
}

#[test]
fn semiperfect_rings() {
    let strict = is_semiperfect(&RingCtx::parse("Fq q=9").unwrap()).unwrap();
    assert!(strict.is_holds());
    let r = RingCtx::parse("Fp[t^(1/p^1)]/t^2 p=3").unwrap();
    let rep = is_semiperfect(&r).unwrap();
    assert!(rep.is_holds());
    assert_eq!(rep.details["strict"], false);
    let flat = RingCtx::parse("Fp[t^(1/p^0)]/t^2 p=2").unwrap();
    let rep = is_semiperfect(&flat).unwrap();
    assert_eq!(rep.verdict, Verdict::FailsWithWitness);
    assert!(is_semiperfect(&RingCtx::parse("Zp p=3 M=2").unwrap()).is_err());
}

#[test]
fn transfer_examples() {
    let a = mono("Fp[t^2,t^3] p=3");
    let b = mono("Fp[t] p=3");
    let rep = ideal_transfer_check(&a, &b, &[4]).unwrap();
    assert!(rep.is_holds());
    assert_eq!(rep.details["monoid_side"]["integrally_closed"], false);
    assert_eq!(rep.details["quotient_side"]["integrally_closed"], false);
    let rep = ideal_transfer_check(&b, &b, &[2]).unwrap();
    assert!(rep.is_holds());
    assert_eq!(rep.details["monoid_side"]["integrally_closed"], true);
    assert!(matches!(ideal_transfer_check(&a, &b, &[1]), Err(Error::HypothesisFail(_))));
    assert!(matches!(ideal_transfer_check(&b, &a, &[4]), Err(Error::HypothesisFail(_))));
}

#[test]
fn random_transfer_instances_agree() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let (a, b, i) = random_transfer_instance(&mut rng);
        let rep = ideal_transfer_check(&a, &b, &i).unwrap();
        assert!(rep.is_holds(), "{a} {b} {i:?} {}", rep.to_json());
    }
}

#[test]
fn mt1_models() {
    let control = mono("Fp[t^2,t^3] p=5");
    let rep = mt1_conclusion_check(&control);
    assert_eq!(rep.verdict, Verdict::FailsWithWitness);
    assert_eq!(rep.details["hypothesis_violated"], true);
    assert_eq!(rep.details["consistent"], true);
    assert_eq!(rep.witness.unwrap()["almost_integral_non_member"], "t");
    let good = MonomialRing::parse("Fp[t^(1/3)] p=3", Some("t")).unwrap();
    let rep = mt1_conclusion_check(&good);
    assert!(rep.is_holds(), "{}", rep.to_json());
    let shallow = mono("Fp[t^(1/3)] p=3");
    assert_eq!(mt1_conclusion_check(&shallow).details["perf"], false);
}

#[test]
fn mt1_kummer_shadow() {
    let r = RingCtx::parse("Zp[p^(1/p^1)] p=3 M=3").unwrap();
    let rep = mt1_conclusion_check_mixed(&r, &r.from_int(3)).unwrap();
    assert!(rep.is_holds(), "{}", rep.to_json());
}

#[test]
fn mt2_kummer() {
    let r = RingCtx::parse("Zp[p^(1/p^2)] p=3 M=4").unwrap();
    let x = r.generator();
    let rep = mt2_hypotheses_audit(&r, &x).unwrap();
    assert!(rep.is_holds(), "{}", rep.to_json());
    let h1 = &rep.details["nonzero_divisor"];
    assert_eq!(h1["strict_finite_ring"], false);
    let h2 = &rep.details["p_in_w_pow_p_A"];
    assert_eq!(h2["verified"], true);
    assert_eq!(h2["y"], "x^6");
    assert_eq!(rep.details["semiperfect_residue"]["within_depth"], true);
}

#[test]
fn mt2_zmod_fails() {
    let r = RingCtx::parse("Zp p=3 M=4").unwrap();
    let rep = mt2_hypotheses_audit(&r, &r.from_int(3)).unwrap();
    assert_eq!(rep.verdict, Verdict::FailsWithWitness);
    assert_eq!(rep.details["p_in_w_pow_p_A"]["holds"], false);
    assert!(mt2_hypotheses_audit(&RingCtx::parse("Fq q=3").unwrap(), &RingCtx::parse("Fq q=3").unwrap().one()).is_err());
}

#[test]
fn pi_valuations() {
    let r = RingCtx::parse("Zp[p^(1/p^1)] p=3 M=2").unwrap();
    assert_eq!(pi_valuation(&r.parse_elem("3*x + 9").unwrap()), Some(4));
    assert_eq!(pi_valuation(&r.parse_elem("x^2 + 3").unwrap()), Some(2));
    assert_eq!(pi_valuation(&r.zero()), None);
}

fn brute_monoid(gens: &[u64], limit: usize) -> Vec<bool> {
    let mut reach = vec![false; limit];
    reach[0] = true;
    for e in 1..limit {
        reach[e] = gens.iter().any(|&a| a as usize <= e && reach[e - a as usize]);
    }
    reach
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn monomial_checks_match_brute_force(
        p in prop::sample::select(vec![2u64, 3, 5]),
        gens in prop::collection::vec(1u64..9, 1..4),
        e in -6i64..30,
        wi in 0usize..4,
    ) {
        let limit = 4000;
        let reach = brute_monoid(&gens, limit);
        // every conductor here is far below `limit`
        let gg = gens.iter().fold(0, |a, &b| num_integer::gcd(a, b)) as i64;
        let inside = |v: i64| v >= 0 && if (v as usize) < limit { reach[v as usize] } else { v % gg == 0 };
        let elems: Vec<u64> = (1..40).filter(|&v| reach[v as usize]).collect();
        let w = elems[wi % elems.len()];
        let a = MonomialRing::new(p, 0, &gens, w).unwrap();
        let g = a.monoid().gcd() as i64;
        let e = e - e.rem_euclid(g);
        let x = a.monomial(e);

        let brute_ai = (0..100i64).any(|c| (0..2000i64).all(|n| inside(c * w as i64 + n * e)));
        let rep = is_almost_integral(&x, &a, 50).unwrap();
        prop_assert_eq!(rep.is_holds(), brute_ai);
        if brute_ai {
            let c = rep.details["c"].as_i64().unwrap();
            prop_assert!((0..2000i64).all(|n| inside(c * w as i64 + n * e)));
            prop_assert!(c == 0 || !(0..2000i64).all(|n| inside((c - 1) * w as i64 + n * e)));
        }

        let brute_int = (1..60i64).any(|m| inside(m * e));
        prop_assert_eq!(is_integral(&x, &a, 12).unwrap().is_holds(), brute_int);

        let brute_proot = !(0..150i64).any(|v| v % g == 0 && !inside(v) && inside(p as i64 * v));
        prop_assert_eq!(is_p_root_closed(&a).is_holds(), brute_proot);
    }
}
