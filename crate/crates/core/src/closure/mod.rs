//! Closure properties of monomial rings `F_p[S]`, `S` a finitely generated
//! monoid of exponents in `(1/p^K) Z>=0`, and hypothesis audits for the
//! tilting transfer theorems.
//!
//! Exponents are stored scaled by `p^K`. With `g = gcd(S)` and `w` the
//! exponent of the uniformizer, `A[1/t^w]` is the Laurent ring in `t^g`, so
//! almost integrality, integrality and p-root closedness reduce to
//! statements about `S` that can be decided exactly.

pub mod semigroup;

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde_json::{json, Value};

use crate::arith::expr::{parse_terms, Denominator};
use crate::arith::modular::{checked_pow, is_prime, reduce_signed, valuation};
use crate::arith::{Ring, RingCtx, RingElem, RingExt, RingKind};
use crate::error::{Error, Result};
use crate::report::{refs, CheckReport, Verdict};
pub use semigroup::ExponentMonoid;

/// Default power bound for bounded cross-checks.
pub const DEFAULT_POWER_BOUND: u64 = 50;
/// Default degree bound for monic relations.
pub const DEFAULT_DEGREE_BOUND: u64 = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialRing {
    p: u64,
    k: u32,
    monoid: ExponentMonoid,
    w: u64,
}

fn scale_exponent(p: u64, k: u32, num: i64, den: Denominator) -> Result<i64> {
    let den = den.resolve(p)?;
    let scale = checked_pow(p, k).ok_or_else(|| Error::BadParameter("root depth too large".into()))? as i128;
    let n = num as i128 * scale;
    if n % den as i128 != 0 {
        return Err(Error::BadElement(format!("exponent {num}/{den} is not representable at depth {k}")));
    }
    Ok((n / den as i128) as i64)
}

/// Root depth needed to represent `num/den`, if `den` is a power of `p`
/// after reduction.
fn needed_depth(p: u64, num: i64, den: Denominator) -> Result<u32> {
    let den = den.resolve(p)?;
    let g = num_integer::gcd(num.unsigned_abs(), den);
    let d = den / g;
    let (q, j) = match crate::arith::modular::prime_power(d) {
        None if d == 1 => return Ok(0),
        Some(pair) => pair,
        None => return Err(Error::BadElement(format!("denominator {d} is not a power of {p}"))),
    };
    if q != p {
        return Err(Error::BadElement(format!("denominator {d} is not a power of {p}")));
    }
    Ok(j)
}

fn fmt_exponent(e: i64, scale: u64) -> String {
    let g = num_integer::gcd(e.unsigned_abs(), scale) as i64;
    let (n, d) = (e / g, scale as i64 / g);
    match (n, d) {
        (0, _) => "1".into(),
        (1, 1) => "t".into(),
        (_, 1) => format!("t^{n}"),
        _ => format!("t^({n}/{d})"),
    }
}

impl MonomialRing {
    /// `F_p[t^(gens/p^K)]` with uniformizer `t^(w/p^K)`; exponents scaled.
    pub fn new(p: u64, k: u32, gens: &[u64], w: u64) -> Result<MonomialRing> {
        if !is_prime(p) {
            return Err(Error::BadParameter(format!("p = {p} is not prime")));
        }
        if k > 12 || checked_pow(p, k).is_none() {
            return Err(Error::BadParameter(format!("root depth {k} too large")));
        }
        let monoid = ExponentMonoid::new(gens)?;
        if w == 0 || !monoid.contains(w as i64) {
            return Err(Error::BadElement(format!("uniformizer exponent {} must be a positive element of the monoid", fmt_exponent(w as i64, p.pow(k)))));
        }
        Ok(MonomialRing { p, k, monoid, w })
    }

    /// Parse `Fp[t^2,t^3] p=5`, `Fp[t^(1/3)] p=3`, `Fp[t^(2/3),t] p=3 K=1`.
    /// The uniformizer defaults to the smallest generator.
    pub fn parse(descriptor: &str, uniformizer: Option<&str>) -> Result<MonomialRing> {
        let mut words = descriptor.split_whitespace();
        let head = words.next().ok_or_else(|| Error::Parse("empty monomial ring".into()))?;
        let inner = head.strip_prefix("Fp[").and_then(|r| r.strip_suffix(']')).ok_or_else(|| Error::Parse(format!("expected `Fp[...]`, got `{head}`")))?;
        let (mut p, mut k) = (None, None);
        for w in words {
            let (key, val) = w.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got `{w}`")))?;
            let val: u64 = val.parse().map_err(|_| Error::Parse(format!("`{val}` is not an integer")))?;
            match key {
                "p" => p = Some(val),
                "K" => k = Some(val as u32),
                _ => return Err(Error::Parse(format!("unknown key `{key}`"))),
            }
        }
        let p = p.ok_or_else(|| Error::Parse("missing `p=`".into()))?;
        if !is_prime(p) {
            return Err(Error::BadParameter(format!("p = {p} is not prime")));
        }
        let mut raw = Vec::new();
        for part in inner.split(',') {
            let terms = parse_terms(part, &['t'])?;
            match terms.as_slice() {
                [t] if t.coeff == 1 && t.var.is_some() && t.num > 0 => raw.push((t.num, t.den)),
                _ => return Err(Error::Parse(format!("generator `{part}` must be a monomial t^e with e > 0"))),
            }
        }
        let mut depth = k.unwrap_or(0);
        for &(num, den) in &raw {
            depth = depth.max(needed_depth(p, num, den)?);
        }
        let gens = raw.iter().map(|&(n, d)| scale_exponent(p, depth, n, d).map(|e| e as u64)).collect::<Result<Vec<_>>>()?;
        let w = match uniformizer {
            Some(u) => {
                let (num, den) = crate::arith::expr::parse_monomial_exponent(u, 't')?;
                let e = scale_exponent(p, depth, num, den)?;
                if e <= 0 {
                    return Err(Error::BadElement(format!("uniformizer `{u}` must have positive exponent")));
                }
                e as u64
            }
            None => *gens.iter().min().unwrap(),
        };
        MonomialRing::new(p, depth, &gens, w)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn depth(&self) -> u32 {
        self.k
    }
    /// `p^K`: exponents are stored multiplied by this.
    pub fn scale(&self) -> u64 {
        self.p.pow(self.k)
    }
    pub fn monoid(&self) -> &ExponentMonoid {
        &self.monoid
    }
    pub fn gens(&self) -> &[u64] {
        self.monoid.gens()
    }
    pub fn uniformizer(&self) -> u64 {
        self.w
    }

    pub fn uniformizer_string(&self) -> String {
        fmt_exponent(self.w as i64, self.scale())
    }

    pub fn contains(&self, e: i64) -> bool {
        self.monoid.contains(e)
    }

    /// Same ring, different uniformizer.
    pub fn with_uniformizer(&self, w: u64) -> Result<MonomialRing> {
        MonomialRing::new(self.p, self.k, self.gens(), w)
    }

    pub fn monomial(&self, e: i64) -> MonoElem {
        MonoElem::monomial(self.p, e, 1)
    }

    pub fn exponent_string(&self, e: i64) -> String {
        fmt_exponent(e, self.scale())
    }

    pub fn parse_elem(&self, s: &str) -> Result<MonoElem> {
        let mut terms = BTreeMap::new();
        for t in parse_terms(s, &['t'])? {
            let e = if t.var.is_some() { scale_exponent(self.p, self.k, t.num, t.den)? } else { 0 };
            let c = terms.entry(e).or_insert(0u64);
            *c = (*c + reduce_signed(t.coeff, self.p)) % self.p;
        }
        terms.retain(|_, c| *c != 0);
        Ok(MonoElem { p: self.p, terms })
    }

    /// Reject elements outside `A[1/t^w]`, the Laurent ring in `t^g`.
    fn check_localized(&self, x: &MonoElem) -> Result<()> {
        if x.p != self.p {
            return Err(Error::CtxMismatch(format!("characteristic {} vs {}", x.p, self.p)));
        }
        let g = self.monoid.gcd() as i64;
        if let Some(&e) = x.terms.keys().find(|&&e| e % g != 0) {
            return Err(Error::BadElement(format!("{} is not in A[1/{}]", self.exponent_string(e), self.uniformizer_string())));
        }
        Ok(())
    }

    fn contains_elem(&self, x: &MonoElem) -> bool {
        x.terms.keys().all(|&e| self.contains(e))
    }

    pub fn descriptor(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for MonomialRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.gens().iter().map(|&e| fmt_exponent(e as i64, self.scale())).collect();
        write!(f, "Fp[{}] p={}", gens.join(","), self.p)?;
        if self.k > 0 {
            write!(f, " K={}", self.k)?;
        }
        Ok(())
    }
}

/// A Laurent polynomial in `t^(1/p^K)` over `F_p`, exponents scaled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoElem {
    p: u64,
    terms: BTreeMap<i64, u64>,
}

impl MonoElem {
    pub fn monomial(p: u64, e: i64, c: u64) -> MonoElem {
        let mut terms = BTreeMap::new();
        if !c.is_multiple_of(p) {
            terms.insert(e, c % p);
        }
        MonoElem { p, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn exponents(&self) -> impl Iterator<Item = i64> + '_ {
        self.terms.keys().copied()
    }

    /// The t-adic valuation (scaled), `None` for zero.
    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn mul(&self, other: &MonoElem) -> MonoElem {
        let mut terms = BTreeMap::new();
        for (&a, &c) in &self.terms {
            for (&b, &d) in &other.terms {
                let slot = terms.entry(a + b).or_insert(0u64);
                *slot = (*slot + c * d) % self.p;
            }
        }
        terms.retain(|_, c| *c != 0);
        MonoElem { p: self.p, terms }
    }

    pub fn shift(&self, e: i64) -> MonoElem {
        MonoElem { p: self.p, terms: self.terms.iter().map(|(&a, &c)| (a + e, c)).collect() }
    }

    pub fn pow(&self, mut n: u64) -> MonoElem {
        let mut acc = MonoElem::monomial(self.p, 0, 1);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn render(&self, scale: u64) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&e, &c)| match (fmt_exponent(e, scale).as_str(), c) {
                ("1", c) => c.to_string(),
                (m, 1) => m.to_string(),
                (m, c) => format!("{c}*{m}"),
            })
            .collect();
        parts.join(" + ")
    }

    /// `[[scaled exponent, coefficient], ...]`.
    pub fn to_json(&self) -> Value {
        Value::Array(self.terms.iter().map(|(&e, &c)| json!([e, c])).collect())
    }
}

fn base_report(check: &str, verdict: Verdict, a: &MonomialRing) -> CheckReport {
    CheckReport::new(check, verdict).with_detail("ring", a.descriptor()).with_detail("uniformizer", a.uniformizer_string()).with_bound("exponent_scale", a.scale())
}

/// Smallest `c >= 0` with `c w + n e` in `S` for every `n >= 0` (`e >= 0`).
fn minimal_multiplier(a: &MonomialRing, e: i64) -> u64 {
    let cond = a.monoid.conductor() as i64;
    let w = a.w as i64;
    let mut c = 0i64;
    loop {
        let ok = if e == 0 { a.contains(c * w) } else { (0..).map(|n| c * w + n * e).take_while(|&v| v < cond).all(|v| a.contains(v)) };
        if ok {
            return c as u64;
        }
        c += 1;
    }
}

/// Decide whether `x` in `A[1/t^w]` is almost integral over `A`. The
/// answer is exact: `t^(cw) x^n` in `A` for all `n` forces the t-adic
/// valuation of `x` to be nonnegative, and conversely `c w >= conductor`
/// works for every `x` of nonnegative valuation. The powers `n <= bound`
/// are also checked directly against the certified `c`.
pub fn is_almost_integral(x: &MonoElem, a: &MonomialRing, bound: u64) -> Result<CheckReport> {
    a.check_localized(x)?;
    let scale = a.scale();
    let Some(v) = x.min_exponent() else {
        return Ok(base_report("almost-integral", Verdict::Holds, a).with_ref(refs::ALMOST_INTEGRAL).with_detail("c", 0).with_detail("element", "0"));
    };
    if v < 0 {
        let w = a.w as i64;
        let cw_for = |c: i64| (c * w) / -v + 1;
        return Ok(CheckReport::fails("almost-integral", json!({"element": x.to_json(), "min_exponent": a.exponent_string(v)}))
            .with_ref(refs::ALMOST_INTEGRAL)
            .with_detail("ring", a.descriptor())
            .with_detail("uniformizer", a.uniformizer_string())
            .with_detail("element", x.render(scale))
            .with_detail("reason", format!("t^(c w) x^n has valuation c w + n v < 0 once n > c w / |v|, e.g. n = {} for c = 1", cw_for(1)))
            .with_bound("exponent_scale", scale));
    }
    let cond = a.monoid.conductor();
    let c_sufficient = cond.div_ceil(a.w);
    let c = if x.is_monomial() { minimal_multiplier(a, v) } else { c_sufficient };
    let tw = MonoElem::monomial(a.p, (c * a.w) as i64, 1);
    let mut power = MonoElem::monomial(a.p, 0, 1);
    let mut bounded_ok = true;
    for _ in 0..=bound {
        if !a.contains_elem(&tw.mul(&power)) {
            bounded_ok = false;
            break;
        }
        power = power.mul(x);
    }
    debug_assert!(bounded_ok);
    Ok(base_report("almost-integral", Verdict::Holds, a)
        .with_ref(refs::ALMOST_INTEGRAL)
        .with_bound("powers_checked", bound)
        .with_detail("element", x.render(scale))
        .with_detail("c", c)
        .with_detail("c_minimal", x.is_monomial())
        .with_detail("multiplier", fmt_exponent((c * a.w) as i64, scale))
        .with_detail("multiplier_exponent", c * a.w)
        .with_detail("bounded_check_agrees", bounded_ok)
        .with_detail("method", "exact: t-adic valuation and monoid conductor"))
}

/// Decide integrality of `x` over `A`. Since `F_p[S]` has normalization
/// `F_p[t^g]`, `x` is integral iff its valuation is nonnegative; a monic
/// relation `X^m - x^m` is exhibited with the least `m <= degree_bound`
/// such that `x^m` lies in `A`, or else the least power of `p` that works.
pub fn is_integral(x: &MonoElem, a: &MonomialRing, degree_bound: u64) -> Result<CheckReport> {
    a.check_localized(x)?;
    let scale = a.scale();
    let v = x.min_exponent().unwrap_or(0);
    if v < 0 {
        return Ok(CheckReport::fails("integral", json!({"element": x.to_json(), "min_exponent": a.exponent_string(v)}))
            .with_ref(refs::INTEGRAL)
            .with_detail("ring", a.descriptor())
            .with_detail("element", x.render(scale))
            .with_detail("reason", "a monic relation forces nonnegative valuation")
            .with_bound("degree", degree_bound));
    }
    let mut m = (1..=degree_bound.max(1)).find(|&m| a.contains_elem(&x.pow(m)));
    if m.is_none() {
        let mut q = a.p;
        while !a.contains_elem(&x.pow(q)) {
            q *= a.p;
        }
        m = Some(q);
    }
    let m = m.unwrap();
    let xm = x.pow(m);
    Ok(base_report("integral", Verdict::Holds, a)
        .with_ref(refs::INTEGRAL)
        .with_bound("degree", degree_bound)
        .with_detail("element", x.render(scale))
        .with_detail("relation", format!("X^{m} - ({})", xm.render(scale)))
        .with_detail("relation_degree", m)
        .with_detail("method", "exact: normalization of a monoid ring"))
}

/// Least `m >= 1` with `m e` in `S`, if any within `limit`.
fn integrality_degree(a: &MonomialRing, e: i64, limit: u64) -> Option<u64> {
    (1..=limit).find(|&m| a.contains(m as i64 * e))
}

/// Whether `b^p` in `A` forces `b` in `A` for `b` in `A[1/t^w]`. In
/// characteristic `p`, `b^p = sum c_i t^(p e_i)`, so it suffices to scan the
/// gaps `e` of `S` for `p e` in `S`.
pub fn is_p_root_closed(a: &MonomialRing) -> CheckReport {
    let scale = a.scale();
    let witness = a.monoid.gaps().into_iter().find(|&e| a.contains((a.p * e) as i64));
    let rep = match witness {
        Some(e) => {
            let b = a.exponent_string(e as i64);
            CheckReport::fails("p-root-closed", json!({"b": b, "b_exponent": e, "b_pow_p": a.exponent_string((a.p * e) as i64)}))
                .with_detail("ring", a.descriptor())
                .with_detail("uniformizer", a.uniformizer_string())
                .with_bound("exponent_scale", scale)
        }
        None => base_report("p-root-closed", Verdict::Holds, a),
    };
    rep.with_ref(refs::P_ROOT_CLOSED)
        .with_bound("conductor", a.monoid.conductor())
        .with_detail("gaps", a.monoid.gaps().len())
        .with_detail("scope", "exponents representable at the ring's root depth")
}

/// Frobenius surjectivity on a finite characteristic-p ring. For the
/// truncated series rings of positive root depth, elements of the deepest
/// level can only acquire roots one level further down; the check then also
/// reports surjectivity onto the elements whose scaled exponents are all
/// divisible by `p`, and that is the verdict.
pub fn is_semiperfect(r: &Ring) -> Result<CheckReport> {
    if !r.is_char_p() {
        return Err(Error::CtxMismatch(format!("{r} does not have characteristic p")));
    }
    let size = r.check_enumerable()?;
    let p = r.p();
    let mut hit = vec![false; size as usize];
    for a in r.elements()? {
        hit[a.pow(p).index() as usize] = true;
    }
    let strict_witness = (0..size).find(|&i| !hit[i as usize]).map(|i| r.element_at(i));
    let series = matches!(r.kind(), RingKind::PerfSeries | RingKind::KummerQuot) && r.depth() >= 1;
    let mut rep = if series {
        let sublevel: Vec<u64> = (0..size).filter(|&i| r.element_at(i).coeffs().iter().enumerate().all(|(e, &c)| c == 0 || (e as u64).is_multiple_of(p))).collect();
        let within_witness = sublevel.iter().find(|&&i| !hit[i as usize]).map(|&i| r.element_at(i));
        let mut rep = match &within_witness {
            None => CheckReport::holds("semiperfect"),
            Some(w) => CheckReport::fails("semiperfect", w.to_json()),
        };
        rep.set_detail("within_depth", within_witness.is_none());
        rep.set_detail("sublevel_size", sublevel.len());
        rep.set_detail("mode", "within depth: every element of root depth K-1 has a p-th root");
        rep
    } else {
        match &strict_witness {
            None => CheckReport::holds("semiperfect"),
            Some(w) => CheckReport::fails("semiperfect", w.to_json()),
        }
        .with_detail("mode", "strict")
    };
    rep.set_detail("ctx", r.descriptor());
    rep.set_detail("strict", strict_witness.is_none());
    if let Some(w) = &strict_witness {
        rep.set_detail("strict_witness", w.to_string());
    }
    Ok(rep.with_ref(refs::SEMIPERFECT).with_bound("ring_size", size))
}

/// Evaluate both sides of "A integrally closed in B iff A/I integrally
/// closed in B/I" for monomial `A` inside `B` and `I = sum t^i B` contained
/// in `A`: side one on the monoids, side two on the finite quotients.
pub fn ideal_transfer_check(a: &MonomialRing, b: &MonomialRing, ideal: &[u64]) -> Result<CheckReport> {
    if a.p != b.p || a.k != b.k {
        return Err(Error::HypothesisFail(format!("{a} and {b} differ in characteristic or root depth")));
    }
    if let Some(&e) = a.gens().iter().find(|&&e| !b.contains(e as i64)) {
        return Err(Error::HypothesisFail(format!("generator {} of A is not in B", a.exponent_string(e as i64))));
    }
    if ideal.is_empty() {
        return Err(Error::HypothesisFail("the ideal needs a generator".into()));
    }
    for &i in ideal {
        if !b.contains(i as i64) {
            return Err(Error::HypothesisFail(format!("{} is not a monomial of B", b.exponent_string(i as i64))));
        }
    }
    // I B inside A: i + T inside S. Beyond the conductor of S only divisibility by gcd(S) matters.
    let ga = a.monoid.gcd();
    let cond_a = a.monoid.conductor();
    for &i in ideal {
        if i % ga != 0 || b.gens().iter().any(|&t| t % ga != 0) {
            return Err(Error::HypothesisFail(format!("{} B is not contained in A", b.exponent_string(i as i64))));
        }
        if let Some(t) = (0..cond_a.saturating_sub(i)).find(|&t| b.contains(t as i64) && !a.contains((i + t) as i64)) {
            return Err(Error::HypothesisFail(format!("{} * {} lies in I B but not in A", b.exponent_string(i as i64), b.exponent_string(t as i64))));
        }
    }

    // Side one: every monomial generator of B is integral over A; closed iff all lie in A.
    let limit = 4 * (cond_a + b.gens().iter().max().copied().unwrap_or(1)) + 64;
    let mut side1: Option<(u64, u64)> = None;
    for &e in b.gens() {
        if a.contains(e as i64) {
            continue;
        }
        if let Some(m) = integrality_degree(a, e as i64, limit) {
            side1 = Some((e, m));
            break;
        }
    }

    // Side two: B/I has basis t^e, e in T \ I, a finite set.
    let in_ideal = |e: u64| ideal.iter().any(|&i| e >= i && b.contains((e - i) as i64));
    let top = ideal.iter().min().unwrap() + b.monoid.conductor() + b.monoid.gcd();
    let basis: Vec<u64> = (0..top).filter(|&e| b.contains(e as i64) && !in_ideal(e)).collect();
    let n = basis.len();
    let pos: BTreeMap<u64, usize> = basis.iter().enumerate().map(|(j, &e)| (e, j)).collect();
    let p = a.p;
    let mul = |x: &[u64], y: &[u64]| -> Vec<u64> {
        let mut out = vec![0u64; n];
        for (i, &c) in x.iter().enumerate().filter(|(_, c)| **c != 0) {
            for (j, &d) in y.iter().enumerate().filter(|(_, d)| **d != 0) {
                if let Some(&k) = pos.get(&(basis[i] + basis[j])) {
                    out[k] = (out[k] + c * d) % p;
                }
            }
        }
        out
    };
    let in_a = |x: &[u64]| x.iter().enumerate().all(|(j, &c)| c == 0 || a.contains(basis[j] as i64));
    let cap = crate::arith::enumeration_cap();
    let full = (p as f64).powi(n as i32) <= cap.min(1 << 16) as f64;
    let candidates: Box<dyn Iterator<Item = Vec<u64>>> = if full {
        let total = p.pow(n as u32);
        Box::new((0..total).map(move |mut idx| {
            let mut v = vec![0u64; n];
            for slot in v.iter_mut() {
                *slot = idx % p;
                idx /= p;
            }
            v
        }))
    } else {
        // B/I is graded by exponent, so a homogeneous witness exists whenever any does.
        Box::new((0..n).map(move |j| {
            let mut v = vec![0u64; n];
            v[j] = 1;
            v
        }))
    };
    let mut side2: Option<(Vec<u64>, u64)> = None;
    let mut inconclusive = false;
    for x in candidates {
        if in_a(&x) {
            continue;
        }
        let mut power = x.clone();
        let mut found = None;
        for m in 1..=64u64 {
            if in_a(&power) {
                found = Some(m);
                break;
            }
            power = mul(&power, &x);
        }
        match found {
            Some(m) => {
                side2 = Some((x, m));
                break;
            }
            None => inconclusive = true,
        }
    }
    let render = |x: &[u64]| -> String {
        let mut e = MonoElem { p, terms: BTreeMap::new() };
        for (j, &c) in x.iter().enumerate().filter(|(_, c)| **c != 0) {
            e.terms.insert(basis[j] as i64, c);
        }
        e.render(a.scale())
    };
    let closed1 = side1.is_none();
    let closed2 = side2.is_none() && !inconclusive;
    let s1 = match side1 {
        None => json!({"integrally_closed": true}),
        Some((e, m)) => json!({"integrally_closed": false, "witness": a.exponent_string(e as i64), "relation": format!("X^{m} - {}", a.exponent_string((m * e) as i64))}),
    };
    let s2 = match &side2 {
        None => json!({"integrally_closed": closed2}),
        Some((x, m)) => json!({"integrally_closed": false, "witness": render(x), "relation_degree": m}),
    };
    let agree = closed1 == closed2;
    let mut rep = if inconclusive && side2.is_none() {
        CheckReport::inconclusive("ideal-transfer")
    } else if agree {
        CheckReport::holds("ideal-transfer")
    } else {
        CheckReport::fails("ideal-transfer", json!({"monoid_side": s1.clone(), "quotient_side": s2.clone()}))
    };
    rep.set_detail("A", a.descriptor());
    rep.set_detail("B", b.descriptor());
    rep.set_detail("I", ideal.iter().map(|&i| b.exponent_string(i as i64)).collect::<Vec<_>>());
    rep.set_detail("monoid_side", s1);
    rep.set_detail("quotient_side", s2);
    rep.set_detail("agree", agree);
    rep.set_detail("quotient_dimension", n);
    Ok(rep
        .with_ref(refs::IDEAL_TRANSFER)
        .with_ref(refs::INTEGRAL)
        .with_bound("quotient_search", if full { "all elements" } else { "homogeneous elements" })
        .with_bound("relation_degree", 64))
}

/// A random valid instance for [`ideal_transfer_check`]: `B = F_p[T]` with
/// `gcd(T) = 1`, `A` generated by some elements of `T` together with every
/// element of `T` from `c` on, and `I` generated by elements of `T` at or
/// above `c`, so that `I B` lies in `A`.
pub fn random_transfer_instance<R: Rng + ?Sized>(rng: &mut R) -> (MonomialRing, MonomialRing, Vec<u64>) {
    let p = [2u64, 3, 5][rng.random_range(0..3)];
    loop {
        let ngens = rng.random_range(1..=3);
        let mut tg: Vec<u64> = (0..ngens).map(|_| rng.random_range(1..=5)).collect();
        if tg.iter().fold(0, |g, &a| num_integer::gcd(g, a)) != 1 {
            tg.push(1);
        }
        let Ok(t_monoid) = ExponentMonoid::new(&tg) else { continue };
        let c = t_monoid.conductor() + rng.random_range(0..=4);
        let t_elems = t_monoid.elements_below(2 * c.max(1));
        let mut sg: Vec<u64> = t_elems.iter().copied().filter(|&e| e >= c.max(1)).collect();
        for &e in t_elems.iter().filter(|&&e| e > 0 && e < c) {
            if rng.random_bool(0.4) {
                sg.push(e);
            }
        }
        let w = c.max(1);
        let (Ok(a), Ok(b)) = (MonomialRing::new(p, 0, &sg, w), MonomialRing::new(p, 0, &tg, w)) else { continue };
        let above: Vec<u64> = t_monoid.elements_below(c + 6).into_iter().filter(|&e| e >= c.max(1)).collect();
        let k = rng.random_range(1..=2.min(above.len()));
        let mut ideal: Vec<u64> = (0..k).map(|_| above[rng.random_range(0..above.len())]).collect();
        ideal.sort_unstable();
        ideal.dedup();
        return (a, b, ideal);
    }
}

/// The complete integral closure of `A` in `A[1/t^w]`: the saturation
/// `g Z>=0` of `S`, i.e. `F_p[t^g]`.
pub fn complete_integral_closure_monoid(a: &MonomialRing) -> MonomialRing {
    let g = a.monoid.gcd();
    MonomialRing::new(a.p, a.k, &[g], a.w).expect("saturation contains the uniformizer")
}

/// Report on [`complete_integral_closure_monoid`]: the closure, with checks
/// that it contains `A`, that each of its generators is almost integral over
/// `A`, and that applying the operation again changes nothing.
pub fn closure_report(a: &MonomialRing) -> Result<CheckReport> {
    let b = complete_integral_closure_monoid(a);
    let again = complete_integral_closure_monoid(&b);
    let extensive = a.gens().iter().all(|&e| b.contains(e as i64));
    let mut gens_almost_integral = true;
    for &e in b.gens() {
        gens_almost_integral &= is_almost_integral(&a.monomial(e as i64), a, DEFAULT_POWER_BOUND)?.is_holds();
    }
    let idempotent = again == b;
    let ok = extensive && gens_almost_integral && idempotent;
    let mut rep = if ok { CheckReport::holds("complete-integral-closure") } else { CheckReport::fails("complete-integral-closure", json!({"closure": b.descriptor(), "again": again.descriptor()})) };
    rep.set_detail("ring", a.descriptor());
    rep.set_detail("closure", b.descriptor());
    rep.set_detail("changed", b != *a);
    rep.set_detail("extensive", extensive);
    rep.set_detail("generators_almost_integral", gens_almost_integral);
    rep.set_detail("idempotent", idempotent);
    rep.set_detail("completely_integrally_closed", b.monoid == a.monoid);
    Ok(rep.with_ref(refs::CIC_CLOSED).with_ref(refs::ALMOST_INTEGRAL))
}

/// Whether `A` is completely integrally closed in `A[1/t^w]`, with the
/// smallest almost integral non-member as witness.
fn cic_witness(a: &MonomialRing) -> Option<u64> {
    a.monoid.gaps().into_iter().next()
}

/// Complete integral closedness passing to the tilt, on a characteristic-p
/// monomial model: if `A` satisfies (Perf) for `t^w` and is completely
/// integrally closed in `A[1/t^w]`, so is the depth-K tilt model. The tilt model in sharp
/// coordinates is `p^K S`: `t^s` has the root chain `t^(s/p^j)`, `j <= K`, in
/// `A` exactly when `s/p^K` lies in `S`.
pub fn mt1_conclusion_check(a: &MonomialRing) -> CheckReport {
    let scale = a.scale();
    let perf_depth = a.k.max(1);
    let missing_root = (1..=perf_depth).find(|&j| {
        let d = a.p.pow(j);
        !a.w.is_multiple_of(d) || !a.contains((a.w / d) as i64)
    });
    let perf = missing_root.is_none();
    let a_gap = cic_witness(a);
    let tilt_gens: Vec<u64> = a.gens().iter().map(|&e| e * scale).collect();
    let tilt = MonomialRing::new(a.p, 2 * a.k, &tilt_gens, a.w * scale).expect("tilt monoid is valid");
    let tilt_gap = cic_witness(&tilt);
    let hyp_ok = perf && a_gap.is_none();
    let consistent = !hyp_ok || tilt_gap.is_none();
    let mut rep = if hyp_ok {
        match tilt_gap {
            None => CheckReport::holds("mt1-conclusion"),
            Some(e) => CheckReport::fails("mt1-conclusion", json!({"tilt_almost_integral_non_member": tilt.exponent_string(e as i64)})),
        }
    } else if let Some(e) = a_gap {
        CheckReport::fails("mt1-conclusion", json!({"hypothesis": "A completely integrally closed", "almost_integral_non_member": a.exponent_string(e as i64)}))
    } else {
        CheckReport::fails("mt1-conclusion", json!({"hypothesis": "(Perf)", "missing_root": format!("{}^(1/{})", a.uniformizer_string(), a.p.pow(missing_root.unwrap()))}))
    };
    rep.set_detail("ring", a.descriptor());
    rep.set_detail("uniformizer", a.uniformizer_string());
    rep.set_detail("perf", perf);
    rep.set_detail("a_completely_integrally_closed", a_gap.is_none());
    rep.set_detail("tilt_model", tilt.descriptor());
    rep.set_detail("tilt_completely_integrally_closed", tilt_gap.is_none());
    rep.set_detail("hypothesis_violated", !hyp_ok);
    rep.set_detail("consistent", consistent);
    rep.with_ref(refs::TILT_CIC).with_ref(refs::CIC_CLOSED).with_bound("perf_depth", perf_depth).with_bound("exponent_scale", scale)
}

/// The uniformizer-adic valuation on `Z/p^M[x]/(x^n - p)` (`n = 1` for
/// `Z/p^M`): `min(i + n v_p(c_i))`, in units of `1/n`. `None` for zero.
pub fn pi_valuation(a: &RingElem) -> Option<u64> {
    let ctx = a.ctx();
    let n = ctx.len() as u64;
    a.coeffs().iter().enumerate().filter_map(|(i, &c)| valuation(c, ctx.p()).map(|v| i as u64 + n * v as u64)).min()
}

/// Divide by the uniformizer `x` (or `p` for `Z/p^M`), assuming valuation
/// at least one; the top coefficient becomes undetermined and is set to 0.
fn divide_by_uniformizer(a: &RingElem) -> RingElem {
    let ctx = a.ctx();
    let p = ctx.p();
    let c = a.coeffs();
    let n = c.len();
    let mut out = vec![0i128; n];
    out[..(n - 1)].copy_from_slice(&c[1..].iter().map(|&v| v as i128).collect::<Vec<_>>());
    out[n - 1] = (c[0] / p) as i128;
    ctx.from_coeffs(&out).expect("length matches")
}

fn require_mixed(ctx: &Ring) -> Result<()> {
    match ctx.kind() {
        RingKind::KummerQuot | RingKind::ZmodPM if !ctx.is_char_p() => Ok(()),
        _ => Err(Error::CtxMismatch(format!("{ctx} is not Z/p^M or Z/p^M[x]/(x^(p^K) - p) with M >= 2"))),
    }
}

/// The value-monoid shadow of a totally ramified `Z_p[p^(1/p^K)]`:
/// valuations in `(1/p^K) Z>=0`, uniformizer at the valuation of `w`.
pub fn exponent_shadow(ctx: &Ring, w: &RingElem) -> Result<MonomialRing> {
    require_mixed(ctx)?;
    let v = pi_valuation(w).ok_or_else(|| Error::BadElement("the uniformizer is zero".into()))?;
    let k = if ctx.kind() == RingKind::KummerQuot { ctx.depth() } else { 0 };
    MonomialRing::new(ctx.p(), k, &[1], v)
}

/// The same transfer on a mixed-characteristic model, evaluated on its
/// exponent shadow.
pub fn mt1_conclusion_check_mixed(ctx: &Ring, w: &RingElem) -> Result<CheckReport> {
    let shadow = exponent_shadow(ctx, w)?;
    let mut rep = mt1_conclusion_check(&shadow);
    rep.set_detail("ctx", ctx.descriptor());
    rep.set_detail("model", "exponent shadow: valuations of elements, an approximation of the ring itself");
    Ok(rep)
}

/// Audit the hypotheses under which integral closedness passes to the tilt,
/// for `A` and `w`: (i) `w` is a nonzero divisor, (ii) `p` in `w^p A`, (iii) `A/pA` semiperfect, (iv) `A`
/// integrally closed in `A[1/w]`.
pub fn mt2_hypotheses_audit(ctx: &Ring, w: &RingElem) -> Result<CheckReport> {
    require_mixed(ctx)?;
    if **w.ctx() != **ctx {
        return Err(Error::CtxMismatch(format!("{} vs {}", w.ctx(), ctx)));
    }
    let p = ctx.p();
    let n = ctx.len() as u64;
    let mut failures: Vec<(&str, Value)> = Vec::new();

    // (i) In the finite ring every non-unit is a zero divisor; the verdict
    // uses the ring being approximated, a domain, where w != 0 suffices.
    let strict = w.is_nonzerodivisor();
    let nzd = !w.is_zero();
    let h1 = json!({
        "holds": nzd,
        "strict_finite_ring": strict.nonzerodivisor,
        "strict_witness": strict.witness.as_ref().map(RingElem::to_string),
        "rule": "nonzero in the complete domain approximated modulo p^M",
    });
    if !nzd {
        failures.push(("nonzero divisor", json!({"w": w.to_string()})));
    }

    // (ii) p in w^p A: compare valuations, then exhibit y with w^p y = p.
    let v = pi_valuation(w);
    let h2 = match v {
        Some(v) if p * v <= n => {
            let mut u = w.pow(p);
            for _ in 0..p * v {
                u = divide_by_uniformizer(&u);
            }
            let y = &ctx.generator().pow(n - p * v) * &u.inverse().expect("unit part");
            let check = &w.pow(p) * &y == ctx.from_int(p as i128);
            json!({"holds": check, "y": y.to_string(), "w_valuation": format!("{v}/{n}"), "verified": check})
        }
        Some(v) => {
            failures.push(("p in w^p A", json!({"w_pow_p_valuation": format!("{}/{n}", p * v), "p_valuation": format!("{n}/{n}")})));
            json!({"holds": false, "w_valuation": format!("{v}/{n}"), "reason": "valuation of w^p exceeds that of p"})
        }
        None => {
            failures.push(("p in w^p A", json!({"w": "0"})));
            json!({"holds": false, "reason": "w is zero"})
        }
    };

    // (iii) A/pA; for the Kummer quotient it is F_p[t^(1/p^K)]/(t).
    let residue = if ctx.kind() == RingKind::KummerQuot { RingCtx::perf_series(p, ctx.depth(), 1)? } else { ctx.residue_ctx()? };
    let sp = is_semiperfect(&residue)?;
    if !sp.is_holds() {
        failures.push(("A/pA semiperfect", sp.witness.clone().unwrap_or(Value::Null)));
    }
    let h3 = json!({
        "holds": sp.is_holds(),
        "residue": residue.descriptor(),
        "strict": sp.details.get("strict"),
        "within_depth": sp.details.get("within_depth"),
    });

    // (iv) Integral closedness of A in A[1/w], on the exponent shadow.
    let h4 = match v {
        Some(_) => {
            let shadow = exponent_shadow(ctx, w)?;
            let gap = shadow.monoid.gaps().into_iter().next();
            if let Some(e) = gap {
                failures.push(("A integrally closed in A[1/w]", json!(shadow.exponent_string(e as i64))));
            }
            json!({"holds": gap.is_none(), "model": "exponent shadow", "shadow": shadow.descriptor()})
        }
        None => json!({"holds": false, "reason": "A[1/w] is zero"}),
    };

    let mut rep = match failures.first() {
        None => CheckReport::holds("mt2-audit"),
        Some((name, wit)) => CheckReport::fails("mt2-audit", json!({"hypothesis": name, "witness": wit})),
    };
    rep.set_detail("ctx", ctx.descriptor());
    rep.set_detail("uniformizer", w.to_string());
    rep.set_detail("nonzero_divisor", h1);
    rep.set_detail("p_in_w_pow_p_A", h2);
    rep.set_detail("semiperfect_residue", h3);
    rep.set_detail("integrally_closed", h4);
    rep.set_detail("failed", failures.iter().map(|(n, _)| *n).collect::<Vec<_>>());
    Ok(rep.with_ref(refs::TILT_IC).with_ref(refs::SEMIPERFECT).with_bound("precision", ctx.precision()))
}

#[cfg(test)]
mod tests;
