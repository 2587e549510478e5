//! Valuation rings modeled by their value groups: `Z`, `Z^2` with the
//! lexicographic order, and `Q`. A ring element is a value `v >= 0`; an
//! element `x` of the fraction field is almost integral when some `c >= 0`
//! has `c + n v(x) >= 0` for every `n >= 0`.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Rational64;
use serde_json::{json, Value};

use crate::arith::enumeration_cap;
use crate::arith::modular::{inv_mod, is_prime, valuation};
use crate::error::{Error, Result};
use crate::report::{refs, CheckReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueGroup {
    /// `Z`, a discrete rank-one group.
    Integers,
    /// `Z^2`, lexicographic with the first coordinate dominant.
    Lex2,
    /// `Q`, divisible of rank one (hull of `Z[1/p]`).
    Rationals,
}

impl ValueGroup {
    pub fn rank(self) -> u32 {
        match self {
            ValueGroup::Lex2 => 2,
            _ => 1,
        }
    }

    pub fn dim(self) -> usize {
        self.rank() as usize
    }

    pub fn from_rank(rank: u32) -> Result<ValueGroup> {
        match rank {
            1 => Ok(ValueGroup::Integers),
            2 => Ok(ValueGroup::Lex2),
            r => Err(Error::UnsupportedRank(r)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ValueGroup::Integers => "Z",
            ValueGroup::Lex2 => "Z^2 lex",
            ValueGroup::Rationals => "Q",
        }
    }

    pub fn zero(self) -> GroupElem {
        GroupElem(vec![Rational64::from_integer(0); self.dim()])
    }

    fn admits(self, x: &GroupElem) -> bool {
        x.0.len() == self.dim() && (self == ValueGroup::Rationals || x.0.iter().all(|c| c.is_integer()))
    }

    /// Parse `3`, `-1/2` (for `Q`) or `(0,-3)`.
    pub fn parse(self, s: &str) -> Result<GroupElem> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let coords = inner
            .split(',')
            .map(|c| c.trim().parse::<Rational64>().map_err(|_| Error::Parse(format!("`{c}` is not a number"))))
            .collect::<Result<Vec<_>>>()?;
        let x = GroupElem(coords);
        if !self.admits(&x) {
            return Err(Error::BadElement(format!("{s} is not an element of {}", self.name())));
        }
        Ok(x)
    }
}

/// An element of a value group, coordinates compared lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElem(pub Vec<Rational64>);

impl GroupElem {
    pub fn ints(v: &[i64]) -> GroupElem {
        GroupElem(v.iter().map(|&a| Rational64::from_integer(a)).collect())
    }

    pub fn add(&self, o: &GroupElem) -> GroupElem {
        GroupElem(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, n: i64) -> GroupElem {
        GroupElem(self.0.iter().map(|a| a * n).collect())
    }

    pub fn sign(&self) -> Ordering {
        self.0.iter().map(|c| c.cmp(&Rational64::from_integer(0))).find(|o| *o != Ordering::Equal).unwrap_or(Ordering::Equal)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.sign() != Ordering::Less
    }

    /// The dominant coordinate.
    pub fn lead(&self) -> Rational64 {
        self.0[0]
    }

    pub fn to_json(&self) -> Value {
        json!(self.to_string())
    }
}

impl PartialOrd for GroupElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupElem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A valuation ring `{v >= 0}` of a value group with the value of a
/// pseudouniformizer `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValModel {
    group: ValueGroup,
    t_val: GroupElem,
}

impl ValModel {
    pub fn new(group: ValueGroup, t_val: GroupElem) -> Result<ValModel> {
        if !group.admits(&t_val) {
            return Err(Error::BadElement(format!("{t_val} is not an element of {}", group.name())));
        }
        if t_val.sign() != Ordering::Greater {
            return Err(Error::BadElement(format!("the value of t must be positive, got {t_val}")));
        }
        Ok(ValModel { group, t_val })
    }

    /// `Z` with `t` of value 1, or `Z^2` lex with `t` of value `(1,0)`.
    pub fn standard(rank: u32) -> Result<ValModel> {
        let group = ValueGroup::from_rank(rank)?;
        let mut t = vec![0; group.dim()];
        t[0] = 1;
        ValModel::new(group, GroupElem::ints(&t))
    }

    pub fn rationals() -> ValModel {
        ValModel::new(ValueGroup::Rationals, GroupElem::ints(&[1])).unwrap()
    }

    pub fn group(&self) -> ValueGroup {
        self.group
    }

    pub fn t_val(&self) -> &GroupElem {
        &self.t_val
    }

    pub fn contains(&self, x: &GroupElem) -> bool {
        x.is_nonnegative()
    }

    fn check(&self, x: &GroupElem) -> Result<()> {
        if self.group.admits(x) {
            Ok(())
        } else {
            Err(Error::BadElement(format!("{x} is not an element of {}", self.group.name())))
        }
    }
}

/// A value condition describing a subring of the fraction field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueSet {
    /// `{xi >= 0}`: the ring itself.
    NonNegative,
    /// `{xi_1 >= 0}`: the localization at the height-one prime.
    DominantNonNegative,
    /// Every value: the fraction field.
    Whole,
}

impl ValueSet {
    pub fn contains(self, x: &GroupElem) -> bool {
        match self {
            ValueSet::NonNegative => x.is_nonnegative(),
            ValueSet::DominantNonNegative => x.lead() >= Rational64::from_integer(0),
            ValueSet::Whole => true,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            ValueSet::NonNegative => "{xi >= 0}",
            ValueSet::DominantNonNegative => "{xi_1 >= 0}",
            ValueSet::Whole => "all values",
        }
    }

    /// Almost integrality over the subring this set describes: some `c` in
    /// the set with `c + n xi` in the set for all `n`. In every case this
    /// only depends on the sign of the dominant coordinate.
    pub fn almost_integral(self, x: &GroupElem) -> bool {
        match self {
            ValueSet::Whole => true,
            _ => x.lead() >= Rational64::from_integer(0),
        }
    }
}

/// Exact almost integrality of a value `xi` over the model.
pub fn val_almost_integral(xi: &GroupElem, model: &ValModel) -> Result<CheckReport> {
    model.check(xi)?;
    let zero = Rational64::from_integer(0);
    let rep = if xi.is_nonnegative() {
        CheckReport::holds("val-almost-integral").with_detail("c", model.group.zero().to_string()).with_detail("c_as_power_of_t", 0)
    } else if xi.lead() >= zero {
        // Infinitesimally negative: the lead coordinate of c + n xi stays c_1 > 0.
        let mut c = vec![0; model.group.dim()];
        c[0] = 1;
        let c = GroupElem::ints(&c);
        let t_power = (model.t_val.lead() > zero).then(|| (c.lead() / model.t_val.lead()).ceil().to_integer());
        CheckReport::holds("val-almost-integral").with_detail("c", c.to_string()).with_detail("c_as_power_of_t", json!(t_power))
    } else {
        let c = &model.t_val;
        let n = (c.lead() / -xi.lead()).floor().to_integer() + 1;
        CheckReport::fails("val-almost-integral", json!({"c": c.to_string(), "diverging_n": n, "c_plus_n_xi": c.add(&xi.scale(n)).to_string()}))
            .with_detail("reason", "the dominant coordinate of c + n xi is eventually negative for every c")
    };
    Ok(rep
        .with_ref(refs::ALMOST_INTEGRAL)
        .with_detail("xi", xi.to_string())
        .with_detail("group", model.group.name())
        .with_detail("t_val", model.t_val.to_string()))
}

/// The value condition of the complete integral closure of the model in
/// its fraction field.
pub fn val_cic(model: &ValModel) -> Result<ValueSet> {
    match model.group {
        ValueGroup::Integers | ValueGroup::Rationals => Ok(ValueSet::NonNegative),
        ValueGroup::Lex2 => Ok(ValueSet::DominantNonNegative),
    }
}

/// Grid values `|xi_i| <= bound`; for `Q` also the halves and thirds.
pub fn grid(group: ValueGroup, bound: i64) -> Vec<GroupElem> {
    let r = -bound..=bound;
    match group {
        ValueGroup::Integers => r.map(|a| GroupElem::ints(&[a])).collect(),
        ValueGroup::Lex2 => r.clone().flat_map(|a| r.clone().map(move |b| GroupElem::ints(&[a, b]))).collect(),
        ValueGroup::Rationals => {
            let mut v: Vec<GroupElem> = (1..=3).flat_map(|d| r.clone().map(move |a| GroupElem(vec![Rational64::new(a, d)]))).collect();
            v.sort();
            v.dedup();
            v
        }
    }
}

/// [`val_cic`] verified on a grid: membership agrees with the exact
/// operator, the set is idempotent, and for `Z^2` lex it lies strictly
/// between the ring and the group.
pub fn val_cic_report(model: &ValModel, bound: i64) -> Result<CheckReport> {
    let set = val_cic(model)?;
    let values = grid(model.group, bound);
    let mut mismatch = None;
    let mut not_idempotent = None;
    let (mut in_ring, mut in_cic) = (0usize, 0usize);
    for xi in &values {
        let ai = val_almost_integral(xi, model)?.is_holds();
        if ai != set.contains(xi) && mismatch.is_none() {
            mismatch = Some(xi.clone());
        }
        if set.almost_integral(xi) != set.contains(xi) && not_idempotent.is_none() {
            not_idempotent = Some(xi.clone());
        }
        in_ring += model.contains(xi) as usize;
        in_cic += set.contains(xi) as usize;
    }
    let fixed_point = set == ValueSet::NonNegative;
    let strictly_between = in_ring < in_cic && in_cic < values.len();
    let expected_shape = match model.group {
        ValueGroup::Lex2 => strictly_between,
        _ => fixed_point,
    };
    let mut rep = match (&mismatch, &not_idempotent) {
        (None, None) if expected_shape => CheckReport::holds("val-cic"),
        (Some(x), _) => CheckReport::fails("val-cic", json!({"value": x.to_string(), "problem": "membership disagrees with almost integrality"})),
        (_, Some(x)) => CheckReport::fails("val-cic", json!({"value": x.to_string(), "problem": "not idempotent"})),
        _ => CheckReport::fails("val-cic", json!({"problem": "unexpected shape"})),
    };
    rep.set_detail("group", model.group.name());
    rep.set_detail("closure", set.describe());
    rep.set_detail("fixed_point", fixed_point);
    rep.set_detail("idempotent", not_idempotent.is_none());
    rep.set_detail("grid_size", values.len());
    rep.set_detail("ring_count", in_ring);
    rep.set_detail("closure_count", in_cic);
    rep.set_detail("strictly_between", strictly_between);
    rep.set_detail("height_one_prime", val_height_one_exists(model));
    let r = match model.group {
        ValueGroup::Lex2 => refs::KRULL_LOCALIZATION,
        _ => refs::KRULL_RANK_ONE,
    };
    Ok(rep.with_ref(r).with_ref(refs::CIC_CLOSED).with_bound("grid", bound))
}

/// A subgroup of `Z^r` offered as a convex-subgroup candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    pub name: String,
    gens: Vec<Vec<i64>>,
}

impl Subgroup {
    /// Membership for subgroups generated by vectors in echelon form.
    fn contains(&self, x: &[i64]) -> bool {
        let mut x = x.to_vec();
        for g in &self.gens {
            let Some(i) = g.iter().position(|&c| c != 0) else { continue };
            if x[i] % g[i] != 0 {
                return false;
            }
            let q = x[i] / g[i];
            for (xj, gj) in x.iter_mut().zip(g) {
                *xj -= q * gj;
            }
        }
        x.iter().all(|&c| c == 0)
    }
}

/// Convex subgroups of `Z^r` lex found by testing candidates on a grid:
/// `H` is convex when `0 <= y <= h` with `h` in `H` forces `y` in `H`.
/// Candidates are the trivial group, the whole group and the subgroups
/// generated by one or two small vectors.
pub fn convex_subgroups(group: ValueGroup, bound: i64) -> Vec<Subgroup> {
    let r = group.dim();
    let vectors: Vec<Vec<i64>> = match r {
        1 => (1..=3).map(|a| vec![a]).collect(),
        _ => (-2..=2).flat_map(|a| (-2..=2).map(move |b| vec![a, b])).filter(|v| v.iter().any(|&c| c != 0)).filter(|v| GroupElem::ints(v).sign() == Ordering::Greater).collect(),
    };
    let mut cands = vec![Subgroup { name: "0".into(), gens: vec![] }];
    for v in &vectors {
        cands.push(Subgroup { name: format!("<{}>", GroupElem::ints(v)), gens: vec![v.clone()] });
    }
    if r == 2 {
        cands.push(Subgroup { name: "Z^2".into(), gens: vec![vec![1, 0], vec![0, 1]] });
    }
    let pts: Vec<Vec<i64>> = match r {
        1 => (-bound..=bound).map(|a| vec![a]).collect(),
        _ => (-bound..=bound).flat_map(|a| (-bound..=bound).map(move |b| vec![a, b])).collect(),
    };
    let le = |a: &[i64], b: &[i64]| a <= b;
    let mut out: Vec<Subgroup> = Vec::new();
    for h in cands {
        let members: Vec<&Vec<i64>> = pts.iter().filter(|x| h.contains(x)).collect();
        let convex = pts.iter().filter(|y| le(&vec![0; r], y)).all(|y| h.contains(y) || !members.iter().any(|m| le(y, m)));
        let dup = out.iter().any(|o| pts.iter().all(|x| o.contains(x) == h.contains(x)));
        if convex && !dup {
            out.push(h);
        }
    }
    out
}

/// Whether the model has a prime of height one, i.e. a smallest nonzero
/// convex subgroup. `Z` and `Q` are archimedean; for `Z^2` lex it is
/// `0 x Z`.
pub fn val_height_one_exists(model: &ValModel) -> bool {
    match model.group {
        ValueGroup::Integers | ValueGroup::Rationals => true,
        ValueGroup::Lex2 => convex_subgroups(model.group, 4).len() >= 2,
    }
}

/// Checks on the truncated tower `Z/p^M` modeling the completion of
/// `Z_(p)`: every nonzero class has a valuation below `M` with unit
/// cofactor; the ideals form the chain `p^k Z/p^M`, `k = 0..M`; and
/// rationals with denominators prime to `p` stay distinct whenever their
/// difference has valuation below `M`.
pub fn val_completion_check(p: u64, m: u32) -> Result<CheckReport> {
    if !is_prime(p) {
        return Err(Error::BadParameter(format!("p = {p} is not prime")));
    }
    if m == 0 {
        return Err(Error::BadParameter("precision must be at least 1".into()));
    }
    let n = p.checked_pow(m).filter(|&n| n <= enumeration_cap()).ok_or_else(|| Error::TooLarge { size: format!("{p}^{m}"), cap: enumeration_cap() })?;

    let mut value_map_ok = true;
    // Sizes of {a : v(a) >= k}; zero lies in each.
    let mut ideal_sizes = vec![1u64; m as usize + 1];
    for a in 1..n {
        let v = valuation(a, p).unwrap();
        let unit = a / p.pow(v);
        value_map_ok &= v < m && !unit.is_multiple_of(p);
        for k in 0..=v {
            ideal_sizes[k as usize] += 1;
        }
    }
    let chain_ok = ideal_sizes.iter().enumerate().all(|(k, &s)| s == p.pow(m - k as u32)) && ideal_sizes.windows(2).all(|w| w[0] > w[1]);
    // Principal ideals: a Z/p^M has p^(M - v(a)) elements, so it is the k = v(a) member.
    let principal_ok = (1..n).step_by(((n / 64).max(1)) as usize).all(|a| {
        let v = valuation(a, p).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        let mut x = 0u64;
        for _ in 0..n {
            seen.insert(x);
            x = (x + a) % n;
        }
        seen.len() as u64 == p.pow(m - v)
    });

    let image = |num: i64, den: i64| -> Option<u64> {
        let d = inv_mod(den.rem_euclid(n as i64) as u64, n)?;
        Some(((num.rem_euclid(n as i64) as u128 * d as u128) % n as u128) as u64)
    };
    let mut rats: Vec<Rational64> = Vec::new();
    for den in 1..=12i64 {
        if (den as u64).is_multiple_of(p) {
            continue;
        }
        for num in -12..=12i64 {
            rats.push(Rational64::new(num, den));
        }
    }
    rats.sort();
    rats.dedup();
    let mut injective_ok = true;
    let mut collisions = 0usize;
    for (i, x) in rats.iter().enumerate() {
        for y in &rats[i + 1..] {
            let same = image(*x.numer(), *x.denom()) == image(*y.numer(), *y.denom());
            let diff = x - y;
            let v = valuation(diff.numer().unsigned_abs(), p).unwrap_or(u32::MAX);
            if same {
                collisions += 1;
                injective_ok &= v >= m;
            }
        }
    }
    let ok = value_map_ok && chain_ok && principal_ok && injective_ok;
    let mut rep = if ok {
        CheckReport::holds("completion")
    } else {
        CheckReport::fails("completion", json!({"value_map": value_map_ok, "ideal_chain": chain_ok, "principal_ideals": principal_ok, "injective": injective_ok}))
    };
    rep.set_detail("p", p);
    rep.set_detail("precision", m);
    rep.set_detail("value_map_extends", value_map_ok);
    rep.set_detail("ideal_chain", ideal_sizes);
    rep.set_detail("chain_length", m + 1);
    rep.set_detail("ideals_totally_ordered", chain_ok && principal_ok);
    rep.set_detail("injective_at_precision", injective_ok);
    rep.set_detail("certified_precision", m);
    rep.set_detail("rationals_checked", rats.len());
    rep.set_detail("collisions_with_valuation_at_least_M", collisions);
    if p != 2 {
        rep.set_detail("image_of_1/2", image(1, 2));
    }
    rep.set_detail("image_of_2", image(2, 1));
    Ok(rep.with_ref(refs::COMPLETION).with_bound("modulus", n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lex(a: i64, b: i64) -> GroupElem {
        GroupElem::ints(&[a, b])
    }

    /// Brute force: some `c` on a grid works for all `n` up to a bound.
    fn brute(xi: &GroupElem, dim: usize) -> bool {
        let cs: Vec<GroupElem> = match dim {
            1 => (0..=40).map(|a| GroupElem::ints(&[a])).collect(),
            _ => (0..=40).flat_map(|a| (-40..=40).map(move |b| lex(a, b))).filter(|c| c.is_nonnegative()).collect(),
        };
        cs.iter().any(|c| (0..1000).all(|n| c.add(&xi.scale(n)).is_nonnegative()))
    }

    #[test]
    fn rank_two_examples() {
        let m = ValModel::standard(2).unwrap();
        let rep = val_almost_integral(&lex(0, -3), &m).unwrap();
        assert!(rep.is_holds());
        assert_eq!(rep.details["c"], "(1,0)");
        assert!(val_almost_integral(&lex(0, 0), &m).unwrap().is_holds());
        let rep = val_almost_integral(&lex(-1, 5), &m).unwrap();
        assert!(!rep.is_holds());
        assert_eq!(rep.witness.unwrap()["diverging_n"], 2);
        assert!(val_almost_integral(&GroupElem::ints(&[1]), &m).is_err());
    }

    #[test]
    fn model_validation() {
        assert!(ValModel::new(ValueGroup::Lex2, lex(0, 0)).is_err());
        assert!(ValModel::new(ValueGroup::Lex2, lex(0, 1)).is_ok());
        assert!(ValModel::new(ValueGroup::Integers, GroupElem(vec![Rational64::new(1, 2)])).is_err());
        assert!(matches!(ValModel::standard(3), Err(Error::UnsupportedRank(3))));
        assert_eq!(ValueGroup::Lex2.parse("(0,-3)").unwrap(), lex(0, -3));
        assert_eq!(ValueGroup::Rationals.parse("-1/2").unwrap(), GroupElem(vec![Rational64::new(-1, 2)]));
        assert!(ValueGroup::Integers.parse("1/2").is_err());
    }

    #[test]
    fn krull_sets() {
        for model in [ValModel::standard(1).unwrap(), ValModel::rationals()] {
            let rep = val_cic_report(&model, 20).unwrap();
            assert!(rep.is_holds());
            assert_eq!(rep.details["fixed_point"], true);
        }
        let rep = val_cic_report(&ValModel::standard(2).unwrap(), 20).unwrap();
        assert!(rep.is_holds());
        assert_eq!(rep.details["closure"], "{xi_1 >= 0}");
        assert_eq!(rep.details["strictly_between"], true);
        assert_eq!(rep.details["ring_count"], 20 * 41 + 21);
        assert_eq!(rep.details["closure_count"], 21 * 41);
    }

    #[test]
    fn convex_subgroup_enumeration() {
        let names: Vec<String> = convex_subgroups(ValueGroup::Lex2, 4).into_iter().map(|h| h.name).collect();
        assert_eq!(names, vec!["0", "<(0,1)>", "Z^2"]);
        assert_eq!(convex_subgroups(ValueGroup::Integers, 6).len(), 2);
        assert!(val_height_one_exists(&ValModel::standard(2).unwrap()));
    }

    #[test]
    fn completion_tower() {
        let rep = val_completion_check(3, 5).unwrap();
        assert!(rep.is_holds(), "{}", rep.to_json());
        assert_eq!(rep.details["image_of_1/2"], 122);
        assert_eq!(rep.details["image_of_2"], 2);
        assert_eq!(rep.details["ideal_chain"], json!([243, 81, 27, 9, 3, 1]));
        assert!(val_completion_check(2, 6).unwrap().is_holds());
        assert!(val_completion_check(4, 2).is_err());
    }

    #[test]
    fn agrees_with_monomial_closure() {
        use crate::closure::{is_almost_integral, MonomialRing};
        let a = MonomialRing::parse("Fp[t^(1/9)] p=3", Some("t")).unwrap();
        let q = ValModel::rationals();
        for e in -30i64..30 {
            let x = a.monomial(e);
            let v = GroupElem(vec![Rational64::new(e, 9)]);
            assert_eq!(is_almost_integral(&x, &a, 20).unwrap().is_holds(), val_almost_integral(&v, &q).unwrap().is_holds(), "{e}");
        }
    }

    proptest! {
        #[test]
        fn matches_brute_force(a in -20i64..=20, b in -20i64..=20) {
            let m = ValModel::standard(2).unwrap();
            prop_assert_eq!(val_almost_integral(&lex(a, b), &m).unwrap().is_holds(), brute(&lex(a, b), 2));
            let z = ValModel::standard(1).unwrap();
            let x = GroupElem::ints(&[a]);
            prop_assert_eq!(val_almost_integral(&x, &z).unwrap().is_holds(), brute(&x, 1));
        }

        #[test]
        fn monotone(a in -20i64..=20, b in -20i64..=20, da in 0i64..5, db in -5i64..5) {
            let m = ValModel::standard(2).unwrap();
            let eta = lex(a, b).add(&lex(da, db));
            prop_assume!(eta >= lex(a, b));
            if val_almost_integral(&lex(a, b), &m).unwrap().is_holds() {
                prop_assert!(val_almost_integral(&eta, &m).unwrap().is_holds());
            }
        }
    }
}
