//! Exact arithmetic in truncated rings.
//!
//! Every supported ring is realised as `(Z/p^M)[s] / (s^n - r(s))` for a
//! reduction polynomial `r` of degree `< n`:
//!
//! | kind          | ring                               | `s`           | relation            |
//! |---------------|------------------------------------|---------------|---------------------|
//! | `ZmodPM`      | `Z/p^M`                            | –             | `n = 1`             |
//! | `KummerQuot`  | `Z/p^M[x]/(x^(p^K) - p)`           | `x`           | `x^(p^K) = p`       |
//! | `FiniteField` | `F_q`, `q = p^d`                   | generator `g` | `f(g) = 0`          |
//! | `PerfSeries`  | `F_p[t^(1/p^K)]/(t^B)`             | `t^(1/p^K)`   | `s^(B p^K) = 0`     |
//! | `Unramified`  | `W_M(F_q) = Z/p^M[x]/(f)`          | `x`           | lift of `f`         |
//!
//! Elements are coefficient vectors in `s` with entries in `[0, p^M)`, so
//! equality is equality of representations.

pub mod expr;
pub mod modular;

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use expr::{parse_terms, Denominator};
use modular::{add_mod, checked_pow, inv_mod, is_prime, mul_mod, prime_factors, prime_power, reduce_signed, sub_mod};

/// Default cap on exhaustive enumeration; `TILTKIT_MAX_ENUM` overrides it.
pub const DEFAULT_ENUM_CAP: u64 = 1_000_000;

pub fn enumeration_cap() -> u64 {
    std::env::var("TILTKIT_MAX_ENUM")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ENUM_CAP)
}

const MAX_LEN: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RingKind {
    ZmodPM,
    KummerQuot,
    FiniteField,
    PerfSeries,
    Unramified,
}

pub type Ring = Arc<RingCtx>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingCtx {
    kind: RingKind,
    p: u64,
    m: u32,
    k: u32,
    b: u64,
    d: u32,
    modulus: u64,
    len: usize,
    /// Nonzero terms `(j, r_j)` of `s^len = sum r_j s^j`.
    reduction: Vec<(usize, u64)>,
    /// Low coefficients of the monic defining polynomial (finite field kinds).
    defining: Vec<u64>,
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::BadParameter(format!("p = {p} is not prime")))
    }
}

fn prime_power_modulus(p: u64, m: u32) -> Result<u64> {
    if m < 1 {
        return Err(Error::BadParameter("M must be at least 1".into()));
    }
    match checked_pow(p, m) {
        Some(v) if v < (1u64 << 62) => Ok(v),
        _ => Err(Error::BadParameter(format!("p^M = {p}^{m} does not fit in 62 bits"))),
    }
}

/// Multiply two polynomials over `F_p` modulo the monic `x^d + sum f_i x^i`.
fn fp_poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let d = f.len();
    let mut acc = vec![0u64; 2 * d];
    for (i, &x) in a.iter().enumerate().filter(|(_, x)| **x != 0) {
        for (j, &y) in b.iter().enumerate() {
            acc[i + j] = (acc[i + j] + x * y) % p;
        }
    }
    for deg in (d..2 * d).rev() {
        let c = acc[deg];
        if c == 0 {
            continue;
        }
        acc[deg] = 0;
        for (j, &fj) in f.iter().enumerate() {
            let idx = deg - d + j;
            acc[idx] = (acc[idx] + (p - c) * fj) % p;
        }
    }
    acc.truncate(d);
    acc
}

fn fp_poly_pow_x(f: &[u64], p: u64, mut e: u64) -> Vec<u64> {
    let d = f.len();
    let mut base = vec![0u64; d];
    if d == 1 {
        base[0] = (p - f[0]) % p;
    } else {
        base[1] = 1;
    }
    let mut acc = vec![0u64; d];
    acc[0] = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_poly_mulmod(&acc, &base, f, p);
        }
        base = fp_poly_mulmod(&base, &base, f, p);
        e >>= 1;
    }
    acc
}

/// First monic degree-`d` polynomial over `F_p` (coefficients read as base-`p`
/// digits, constant term least significant) whose root `x` has multiplicative
/// order `p^d - 1`. Such a polynomial is irreducible and primitive.
pub fn primitive_modulus(p: u64, d: u32) -> Vec<u64> {
    let q = p.pow(d);
    let order = q - 1;
    let factors = prime_factors(order);
    let mut one = vec![0u64; d as usize];
    one[0] = 1;
    for idx in 0..q {
        let mut f = vec![0u64; d as usize];
        let mut rest = idx;
        for c in f.iter_mut() {
            *c = rest % p;
            rest /= p;
        }
        if f[0] == 0 {
            continue;
        }
        if fp_poly_pow_x(&f, p, order) != one {
            continue;
        }
        if factors.iter().all(|r| fp_poly_pow_x(&f, p, order / r) != one) {
            return f;
        }
    }
    unreachable!("every finite field has a primitive element")
}

impl RingCtx {
    fn build(kind: RingKind, p: u64, m: u32, k: u32, b: u64, d: u32, len: usize, reduction: Vec<(usize, u64)>, defining: Vec<u64>) -> Result<Ring> {
        let modulus = prime_power_modulus(p, m)?;
        if len == 0 || len > MAX_LEN {
            return Err(Error::BadParameter(format!("representation length {len} outside [1, {MAX_LEN}]")));
        }
        let reduction = reduction.into_iter().filter(|&(_, r)| r % modulus != 0).map(|(j, r)| (j, r % modulus)).collect();
        Ok(Arc::new(RingCtx { kind, p, m, k, b, d, modulus, len, reduction, defining }))
    }

    /// `Z/p^M`.
    pub fn zmod(p: u64, m: u32) -> Result<Ring> {
        check_prime(p)?;
        Self::build(RingKind::ZmodPM, p, m, 0, 1, 1, 1, vec![], vec![])
    }

    /// `Z/p^M[x]/(x^(p^K) - p)`.
    pub fn kummer(p: u64, k: u32, m: u32) -> Result<Ring> {
        check_prime(p)?;
        let n = checked_pow(p, k).filter(|&n| n as usize <= MAX_LEN).ok_or_else(|| Error::BadParameter(format!("p^K = {p}^{k} too large")))?;
        Self::build(RingKind::KummerQuot, p, m, k, 1, 1, n as usize, vec![(0, p)], vec![])
    }

    /// `F_q` with a primitive defining polynomial.
    pub fn finite_field(q: u64) -> Result<Ring> {
        let (p, d) = prime_power(q).ok_or_else(|| Error::BadParameter(format!("q = {q} is not a prime power")))?;
        if q > 1 << 24 {
            return Err(Error::BadParameter(format!("q = {q} too large")));
        }
        let f = primitive_modulus(p, d);
        let red = f.iter().enumerate().map(|(j, &c)| (j, (p - c) % p)).collect();
        Self::build(RingKind::FiniteField, p, 1, 0, 1, d, d as usize, red, f)
    }

    /// `F_p[t^(1/p^K)]/(t^B)`.
    pub fn perf_series(p: u64, k: u32, b: u64) -> Result<Ring> {
        check_prime(p)?;
        if b < 1 {
            return Err(Error::BadParameter("B must be at least 1".into()));
        }
        let len = checked_pow(p, k).and_then(|n| n.checked_mul(b)).filter(|&n| n as usize <= MAX_LEN).ok_or_else(|| Error::BadParameter("B * p^K too large".into()))?;
        Self::build(RingKind::PerfSeries, p, 1, k, b, 1, len as usize, vec![], vec![])
    }

    /// `W_M(F_q)` realised as `Z/p^M[x]/(f)` with `f` the lift of the
    /// primitive modulus of `F_q`. For `q = p` this is `Z/p^M`.
    pub fn unramified(q: u64, m: u32) -> Result<Ring> {
        let (p, d) = prime_power(q).ok_or_else(|| Error::BadParameter(format!("q = {q} is not a prime power")))?;
        if d == 1 {
            return Self::zmod(p, m);
        }
        if q > 1 << 24 {
            return Err(Error::BadParameter(format!("q = {q} too large")));
        }
        let modulus = prime_power_modulus(p, m)?;
        let f = primitive_modulus(p, d);
        let red = f.iter().enumerate().map(|(j, &c)| (j, (modulus - c) % modulus)).collect();
        Self::build(RingKind::Unramified, p, m, 0, 1, d, d as usize, red, f)
    }

    /// Parse a ring descriptor:
    /// `Zp p=<p> M=<M>`, `Zp[p^(1/p^<K>)] p=<p> M=<M>`, `Fq q=<q>`,
    /// `Fp[t^(1/p^<K>)]/t^<B> p=<p>`, and `Zq q=<q> M=<M>` for `W_M(F_q)`.
    pub fn parse(descriptor: &str) -> Result<Ring> {
        let mut words = descriptor.split_whitespace();
        let head = words.next().ok_or_else(|| Error::Parse("empty ring descriptor".into()))?;
        let mut p = None;
        let mut m = None;
        let mut q = None;
        for w in words {
            let (key, val) = w.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got `{w}`")))?;
            let val: u64 = val.parse().map_err(|_| Error::Parse(format!("`{val}` is not an integer")))?;
            let slot = match key {
                "p" => &mut p,
                "M" => &mut m,
                "q" => &mut q,
                _ => return Err(Error::Parse(format!("unknown key `{key}`"))),
            };
            if slot.replace(val).is_some() {
                return Err(Error::Parse(format!("duplicate key `{key}`")));
            }
        }
        let need = |v: Option<u64>, k: &str| v.ok_or_else(|| Error::Parse(format!("missing `{k}=`")));
        let forbid = |v: Option<u64>, k: &str| match v {
            Some(_) => Err(Error::Parse(format!("unexpected `{k}=`"))),
            None => Ok(()),
        };
        let small = |v: u64| u32::try_from(v).map_err(|_| Error::BadParameter(format!("{v} too large")));
        if head == "Zp" {
            forbid(q, "q")?;
            return Self::zmod(need(p, "p")?, small(need(m, "M")?)?);
        }
        if head == "Fq" {
            forbid(p, "p")?;
            forbid(m, "M")?;
            return Self::finite_field(need(q, "q")?);
        }
        if head == "Zq" {
            forbid(p, "p")?;
            return Self::unramified(need(q, "q")?, small(need(m, "M")?)?);
        }
        if let Some(rest) = head.strip_prefix("Zp[p^(1/p^").and_then(|r| r.strip_suffix(")]")) {
            forbid(q, "q")?;
            let k = rest.parse::<u32>().map_err(|_| Error::Parse(format!("bad root depth `{rest}`")))?;
            return Self::kummer(need(p, "p")?, k, small(need(m, "M")?)?);
        }
        if let Some(rest) = head.strip_prefix("Fp[t^(1/p^") {
            forbid(q, "q")?;
            forbid(m, "M")?;
            let (k, b) = rest.split_once(")]/t^").ok_or_else(|| Error::Parse(format!("malformed series descriptor `{head}`")))?;
            let k = k.parse::<u32>().map_err(|_| Error::Parse(format!("bad root depth `{k}`")))?;
            let b = b.parse::<u64>().map_err(|_| Error::Parse(format!("bad truncation `{b}`")))?;
            return Self::perf_series(need(p, "p")?, k, b);
        }
        Err(Error::Parse(format!("unrecognised ring `{head}`")))
    }

    pub fn kind(&self) -> RingKind {
        self.kind
    }
    pub fn p(&self) -> u64 {
        self.p
    }
    /// p-adic precision exponent `M` (1 for characteristic-p kinds).
    pub fn precision(&self) -> u32 {
        self.m
    }
    /// Root depth `K`.
    pub fn depth(&self) -> u32 {
        self.k
    }
    pub fn truncation(&self) -> u64 {
        self.b
    }
    pub fn degree(&self) -> u32 {
        self.d
    }
    /// `p^M`, the modulus of every coefficient.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }
    pub fn len(&self) -> usize {
        self.len
    }
    pub fn residue_field_size(&self) -> u64 {
        self.p.pow(self.d)
    }
    pub fn defining_polynomial(&self) -> &[u64] {
        &self.defining
    }

    pub fn is_char_p(&self) -> bool {
        self.modulus == self.p
    }

    pub fn is_mixed(&self) -> bool {
        matches!(self.kind, RingKind::ZmodPM | RingKind::KummerQuot | RingKind::Unramified)
    }

    /// Frobenius preimages are computed by the exponent rule in these
    /// truncated-monomial rings (`F_p[s]/s^n`).
    fn is_series_like(&self) -> bool {
        self.is_char_p() && matches!(self.kind, RingKind::PerfSeries | RingKind::KummerQuot)
    }

    fn is_field_like(&self) -> bool {
        self.is_char_p() && matches!(self.kind, RingKind::FiniteField | RingKind::ZmodPM | RingKind::Unramified)
    }

    pub fn descriptor(&self) -> String {
        self.to_string()
    }

    /// Number of elements, `None` if it overflows `u128`.
    pub fn size(&self) -> Option<u128> {
        (self.modulus as u128).checked_pow(self.len as u32)
    }

    pub fn size_string(&self) -> String {
        match self.size() {
            Some(s) => s.to_string(),
            None => format!("{}^{}", self.modulus, self.len),
        }
    }

    pub fn check_enumerable(&self) -> Result<u64> {
        let cap = enumeration_cap();
        match self.size() {
            Some(s) if s <= cap as u128 => Ok(s as u64),
            _ => Err(Error::TooLarge { size: self.size_string(), cap }),
        }
    }

    /// The characteristic-p ring `A/pA` for mixed kinds:
    /// `Z/p^M -> F_p`, `W_M(F_q) -> F_q`, and for the Kummer quotient
    /// `F_p[t]/(t^(p^K))` with `t` the class of `x`.
    pub fn residue_ctx(&self) -> Result<Ring> {
        match self.kind {
            RingKind::ZmodPM => RingCtx::finite_field(self.p),
            RingKind::Unramified => RingCtx::finite_field(self.residue_field_size()),
            RingKind::KummerQuot => RingCtx::perf_series(self.p, 0, self.len as u64),
            _ => Err(Error::CtxMismatch(format!("{self} already has characteristic p"))),
        }
    }
}

impl fmt::Display for RingCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            RingKind::ZmodPM => write!(f, "Zp p={} M={}", self.p, self.m),
            RingKind::KummerQuot => write!(f, "Zp[p^(1/p^{})] p={} M={}", self.k, self.p, self.m),
            RingKind::FiniteField => write!(f, "Fq q={}", self.residue_field_size()),
            RingKind::PerfSeries => write!(f, "Fp[t^(1/p^{})]/t^{} p={}", self.k, self.b, self.p),
            RingKind::Unramified => write!(f, "Zq q={} M={}", self.residue_field_size(), self.m),
        }
    }
}

/// An element of a [`RingCtx`] in canonical form.
#[derive(Clone)]
pub struct RingElem {
    ctx: Ring,
    c: Vec<u64>,
}

impl PartialEq for RingElem {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx) && self.c == other.c
    }
}

impl Eq for RingElem {}

impl std::hash::Hash for RingElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.c.hash(state);
    }
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in [{}]", self, self.ctx)
    }
}

pub trait RingExt {
    fn zero(&self) -> RingElem;
    fn one(&self) -> RingElem;
    fn from_int(&self, v: i128) -> RingElem;
    fn from_coeffs(&self, coeffs: &[i128]) -> Result<RingElem>;
    fn generator(&self) -> RingElem;
    fn monomial(&self, scaled_exp: usize, coeff: u64) -> RingElem;
    fn parse_elem(&self, s: &str) -> Result<RingElem>;
    fn parse_seq(&self, s: &str) -> Result<Vec<RingElem>>;
    fn elem_from_json(&self, v: &Value) -> Result<RingElem>;
    fn element_at(&self, index: u64) -> RingElem;
    fn elements(&self) -> Result<ElementIter>;
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> RingElem;
    fn lift_residue(&self, r: &RingElem) -> Result<RingElem>;
    fn socle(&self) -> RingElem;
}

impl RingExt for Ring {
    fn zero(&self) -> RingElem {
        RingElem { ctx: self.clone(), c: vec![0; self.len] }
    }

    fn one(&self) -> RingElem {
        self.from_int(1)
    }

    fn from_int(&self, v: i128) -> RingElem {
        let mut e = self.zero();
        e.c[0] = reduce_signed(v, self.modulus);
        e
    }

    fn from_coeffs(&self, coeffs: &[i128]) -> Result<RingElem> {
        if coeffs.len() > self.len {
            return Err(Error::BadElement(format!("{} coefficients for a ring of rank {}", coeffs.len(), self.len)));
        }
        let mut e = self.zero();
        for (slot, &v) in e.c.iter_mut().zip(coeffs) {
            *slot = reduce_signed(v, self.modulus);
        }
        Ok(e)
    }

    /// The class of `s`: `x`, the field generator `g`, or `t^(1/p^K)`.
    fn generator(&self) -> RingElem {
        let mut e = self.zero();
        if self.len == 1 {
            for &(_, r) in &self.reduction {
                e.c[0] = r;
            }
        } else {
            e.c[1] = 1;
        }
        e
    }

    /// `coeff * s^scaled_exp`, reduced.
    fn monomial(&self, scaled_exp: usize, coeff: u64) -> RingElem {
        if scaled_exp < self.len {
            let mut e = self.zero();
            e.c[scaled_exp] = coeff % self.modulus;
            return e;
        }
        if self.kind == RingKind::PerfSeries {
            return self.zero();
        }
        self.generator().pow(scaled_exp as u64).scale(coeff)
    }

    fn parse_elem(&self, s: &str) -> Result<RingElem> {
        let vars: &[char] = match self.kind {
            RingKind::ZmodPM => &[],
            RingKind::KummerQuot => &['x'],
            RingKind::FiniteField | RingKind::Unramified => &['g', 'x'],
            RingKind::PerfSeries => &['t'],
        };
        let mut acc = self.zero();
        for term in parse_terms(s, vars)? {
            let coeff = reduce_signed(term.coeff, self.modulus);
            let piece = match term.var {
                None => self.from_int(term.coeff),
                Some(_) if self.kind == RingKind::PerfSeries => {
                    let den = term.den.resolve(self.p)?;
                    let scale = self.p.pow(self.k) as i128;
                    let num = term.num as i128 * scale;
                    if term.num < 0 || num % den as i128 != 0 {
                        return Err(Error::BadElement(format!("exponent {}/{} not representable at depth {}", term.num, den, self.k)));
                    }
                    self.monomial((num / den as i128) as usize, coeff)
                }
                Some(_) => {
                    if term.den != Denominator::Int(1) || term.num < 0 {
                        return Err(Error::BadElement(format!("exponent of `{s}` must be a nonnegative integer")));
                    }
                    self.monomial(term.num as usize, coeff)
                }
            };
            acc = &acc + &piece;
        }
        Ok(acc)
    }

    fn parse_seq(&self, s: &str) -> Result<Vec<RingElem>> {
        s.split(',').map(|part| self.parse_elem(part)).collect()
    }

    fn elem_from_json(&self, v: &Value) -> Result<RingElem> {
        let arr = v.as_array().ok_or_else(|| Error::Parse("element JSON must be an array".into()))?;
        let num = |x: &Value| x.as_i64().map(|n| n as i128).ok_or_else(|| Error::Parse(format!("`{x}` is not an integer")));
        if self.kind == RingKind::PerfSeries {
            let mut e = self.zero();
            for pair in arr {
                let pr = pair.as_array().filter(|a| a.len() == 2).ok_or_else(|| Error::Parse("expected [exponent, coefficient] pairs".into()))?;
                let exp = num(&pr[0])?;
                if exp < 0 {
                    return Err(Error::BadElement("negative exponent".into()));
                }
                e = &e + &self.monomial(exp as usize, reduce_signed(num(&pr[1])?, self.modulus));
            }
            Ok(e)
        } else {
            let coeffs = arr.iter().map(num).collect::<Result<Vec<_>>>()?;
            self.from_coeffs(&coeffs)
        }
    }

    fn element_at(&self, mut index: u64) -> RingElem {
        let mut e = self.zero();
        for slot in e.c.iter_mut() {
            *slot = index % self.modulus;
            index /= self.modulus;
        }
        e
    }

    fn elements(&self) -> Result<ElementIter> {
        let size = self.check_enumerable()?;
        Ok(ElementIter { ctx: self.clone(), next: 0, size })
    }

    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> RingElem {
        let mut e = self.zero();
        for slot in e.c.iter_mut() {
            *slot = rng.random_range(0..self.modulus);
        }
        e
    }

    /// Canonical lift of an element of [`RingCtx::residue_ctx`].
    fn lift_residue(&self, r: &RingElem) -> Result<RingElem> {
        let expected = self.residue_ctx()?;
        if *r.ctx != *expected {
            return Err(Error::CtxMismatch(format!("{} is not the residue ring of {}", r.ctx, self)));
        }
        Ok(RingElem { ctx: self.clone(), c: r.c.clone() })
    }

    /// A nonzero element killed by the maximal ideal. Every kind here is a
    /// finite local ring, so it annihilates every non-unit.
    fn socle(&self) -> RingElem {
        let top = self.modulus / self.p;
        match self.kind {
            RingKind::FiniteField => self.one(),
            RingKind::PerfSeries => self.monomial(self.len - 1, 1),
            RingKind::KummerQuot => self.monomial(self.len - 1, top),
            RingKind::ZmodPM | RingKind::Unramified => self.from_int(top as i128),
        }
    }
}

/// Iterates every element of an enumerable ring in index order.
pub struct ElementIter {
    ctx: Ring,
    next: u64,
    size: u64,
}

impl Iterator for ElementIter {
    type Item = RingElem;
    fn next(&mut self) -> Option<RingElem> {
        if self.next >= self.size {
            return None;
        }
        let e = self.ctx.element_at(self.next);
        self.next += 1;
        Some(e)
    }
    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = (self.size - self.next) as usize;
        (r, Some(r))
    }
}

/// Result of the zero-divisor test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NzdCheck {
    pub nonzerodivisor: bool,
    /// Nonzero `b` with `a * b = 0` when `a` is a zero divisor.
    pub witness: Option<RingElem>,
    pub method: &'static str,
}

impl RingElem {
    pub fn ctx(&self) -> &Ring {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 % self.ctx.modulus && self.c[1..].iter().all(|&x| x == 0)
    }

    fn same_ctx(&self, other: &RingElem) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::CtxMismatch(format!("{} vs {}", self.ctx, other.ctx)))
        }
    }

    pub fn checked_add(&self, other: &RingElem) -> Result<RingElem> {
        self.same_ctx(other)?;
        let m = self.ctx.modulus;
        let c = self.c.iter().zip(&other.c).map(|(&a, &b)| add_mod(a, b, m)).collect();
        Ok(RingElem { ctx: self.ctx.clone(), c })
    }

    pub fn checked_sub(&self, other: &RingElem) -> Result<RingElem> {
        self.same_ctx(other)?;
        let m = self.ctx.modulus;
        let c = self.c.iter().zip(&other.c).map(|(&a, &b)| sub_mod(a, b, m)).collect();
        Ok(RingElem { ctx: self.ctx.clone(), c })
    }

    pub fn checked_mul(&self, other: &RingElem) -> Result<RingElem> {
        self.same_ctx(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn neg(&self) -> RingElem {
        let m = self.ctx.modulus;
        RingElem { ctx: self.ctx.clone(), c: self.c.iter().map(|&a| sub_mod(0, a, m)).collect() }
    }

    /// Multiply by an integer scalar.
    pub fn scale(&self, s: u64) -> RingElem {
        let m = self.ctx.modulus;
        let s = s % m;
        RingElem { ctx: self.ctx.clone(), c: self.c.iter().map(|&a| mul_mod(a, s, m)).collect() }
    }

    fn mul_unchecked(&self, other: &RingElem) -> RingElem {
        let ctx = &self.ctx;
        let (n, m) = (ctx.len, ctx.modulus);
        if n == 1 {
            return RingElem { ctx: ctx.clone(), c: vec![mul_mod(self.c[0], other.c[0], m)] };
        }
        let truncating = ctx.reduction.is_empty();
        let mut acc = vec![0u64; if truncating { n } else { 2 * n - 1 }];
        for (i, &a) in self.c.iter().enumerate().filter(|(_, a)| **a != 0) {
            let limit = if truncating { n - i } else { n };
            for (j, &b) in other.c[..limit].iter().enumerate().filter(|(_, b)| **b != 0) {
                acc[i + j] = add_mod(acc[i + j], mul_mod(a, b, m), m);
            }
        }
        if !truncating {
            for deg in (n..2 * n - 1).rev() {
                let c = acc[deg];
                if c == 0 {
                    continue;
                }
                acc[deg] = 0;
                for &(j, r) in &ctx.reduction {
                    let idx = deg - n + j;
                    acc[idx] = add_mod(acc[idx], mul_mod(c, r, m), m);
                }
            }
            acc.truncate(n);
        }
        RingElem { ctx: ctx.clone(), c: acc }
    }

    pub fn pow(&self, mut e: u64) -> RingElem {
        let mut acc = self.ctx.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// `self^(p^k)` by `k` successive p-th powers.
    pub fn pow_p_times(&self, k: u32) -> RingElem {
        let p = self.ctx.p;
        (0..k).fold(self.clone(), |acc, _| acc.pow(p))
    }

    /// Minimum p-adic valuation of the coefficients, `M` for zero.
    pub fn p_valuation(&self) -> u32 {
        let p = self.ctx.p;
        self.c.iter().filter_map(|&x| modular::valuation(x, p)).min().unwrap_or(self.ctx.m).min(self.ctx.m)
    }

    /// Whether every coefficient of `self - other` is divisible by `p^r`.
    pub fn congruent(&self, other: &RingElem, r: u32) -> Result<bool> {
        Ok(self.checked_sub(other)?.p_valuation() >= r.min(self.ctx.m))
    }

    /// Image in `A/pA`.
    pub fn proj_mod_p(&self) -> Result<RingElem> {
        let target = self.ctx.residue_ctx()?;
        let p = self.ctx.p;
        Ok(RingElem { c: self.c.iter().map(|&x| x % p).collect(), ctx: target })
    }

    pub fn frobenius(&self) -> Result<RingElem> {
        if !self.ctx.is_char_p() {
            return Err(Error::CtxMismatch(format!("Frobenius needs characteristic p, got {}", self.ctx)));
        }
        Ok(self.pow(self.ctx.p))
    }

    /// Some `b` with `b^p = self`: the unique one in a finite field, and the
    /// one of least degree in a truncated series ring.
    pub fn frobenius_preimage(&self) -> Result<RingElem> {
        let ctx = &self.ctx;
        if ctx.is_field_like() {
            return Ok(self.pow(ctx.p.pow(ctx.d - 1)));
        }
        if !ctx.is_series_like() {
            return Err(Error::CtxMismatch(format!("Frobenius needs characteristic p, got {}", ctx)));
        }
        let p = ctx.p as usize;
        let mut out = ctx.zero();
        for (e, &c) in self.c.iter().enumerate().filter(|(_, c)| **c != 0) {
            if e % p != 0 {
                return Err(Error::NoPreimage);
            }
            out.c[e / p] = c;
        }
        Ok(out)
    }

    /// Image in the residue field; units are exactly the elements with a
    /// nonzero image.
    fn residue_field_nonzero(&self) -> bool {
        let p = self.ctx.p;
        match self.ctx.kind {
            RingKind::FiniteField | RingKind::Unramified => self.c.iter().any(|&x| x % p != 0),
            _ => !self.c[0].is_multiple_of(p),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.residue_field_nonzero()
    }

    pub fn inverse(&self) -> Option<RingElem> {
        if !self.is_unit() {
            return None;
        }
        let ctx = &self.ctx;
        let p = ctx.p;
        let mut y = match ctx.kind {
            RingKind::FiniteField => return Some(self.pow(ctx.residue_field_size() - 2)),
            RingKind::Unramified => {
                let r = self.proj_mod_p().ok()?;
                let r_inv = r.pow(ctx.residue_field_size() - 2);
                ctx.lift_residue(&r_inv).ok()?
            }
            _ => ctx.from_int(inv_mod(self.c[0] % p, p)? as i128),
        };
        // Newton: the error 1 - a*y lies in the nilpotent maximal ideal and squares each step.
        for _ in 0..128 {
            let err = &ctx.one() - &self.mul_unchecked(&y);
            if err.is_zero() {
                return Some(y);
            }
            y = y.mul_unchecked(&(&ctx.one() + &err));
        }
        None
    }

    /// Decide whether `self` is a nonzero divisor. All supported rings are
    /// finite local rings, where the nonzero divisors are the units and the
    /// socle annihilates every non-unit.
    pub fn is_nonzerodivisor(&self) -> NzdCheck {
        if self.is_unit() {
            return NzdCheck { nonzerodivisor: true, witness: None, method: "structural: unit of a finite local ring" };
        }
        let s = self.ctx.socle();
        debug_assert!(self.mul_unchecked(&s).is_zero());
        NzdCheck { nonzerodivisor: false, witness: Some(s), method: "structural: socle annihilates the maximal ideal" }
    }

    /// Exhaustive zero-divisor search, for cross-checking the structural rule.
    pub fn is_nonzerodivisor_by_enumeration(&self) -> Result<NzdCheck> {
        for b in self.ctx.elements()? {
            if !b.is_zero() && self.mul_unchecked(&b).is_zero() {
                return Ok(NzdCheck { nonzerodivisor: false, witness: Some(b), method: "enumeration" });
            }
        }
        Ok(NzdCheck { nonzerodivisor: true, witness: None, method: "enumeration" })
    }

    /// Index in the enumeration order of [`RingExt::elements`].
    pub fn index(&self) -> u64 {
        self.c.iter().rev().fold(0u64, |acc, &x| acc.wrapping_mul(self.ctx.modulus).wrapping_add(x))
    }

    pub fn to_json(&self) -> Value {
        if self.ctx.kind == RingKind::PerfSeries {
            Value::Array(self.c.iter().enumerate().filter(|(_, c)| **c != 0).map(|(e, &c)| json!([e, c])).collect())
        } else {
            json!(self.c)
        }
    }
}

fn fmt_exponent(num: u64, den: u64) -> String {
    let g = num_integer::gcd(num, den);
    let (n, d) = (num / g, den / g);
    match (n, d) {
        (1, 1) => String::new(),
        (_, 1) => format!("^{n}"),
        _ => format!("^({n}/{d})"),
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ctx = &self.ctx;
        let (var, den) = match ctx.kind {
            RingKind::ZmodPM => ("", 1),
            RingKind::KummerQuot | RingKind::Unramified => ("x", 1),
            RingKind::FiniteField => ("g", 1),
            RingKind::PerfSeries => ("t", ctx.p.pow(ctx.k)),
        };
        let mut parts = Vec::new();
        for (e, &c) in self.c.iter().enumerate().filter(|(_, c)| **c != 0) {
            if e == 0 || (ctx.len == 1) {
                parts.push(c.to_string());
                continue;
            }
            let mono = format!("{var}{}", fmt_exponent(e as u64, den));
            parts.push(if c == 1 { mono } else { format!("{c}*{mono}") });
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a> std::ops::$tr<&'a RingElem> for &'a RingElem {
            type Output = RingElem;
            /// Panics on a context mismatch; use the `checked_*` form to get an error.
            fn $method(self, rhs: &'a RingElem) -> RingElem {
                self.$checked(rhs).expect("ring context mismatch")
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

/// Public operation set over a shared context.
pub fn ring_make(descriptor: &str) -> Result<Ring> {
    RingCtx::parse(descriptor)
}

pub fn elem_add(a: &RingElem, b: &RingElem) -> Result<RingElem> {
    a.checked_add(b)
}

pub fn elem_mul(a: &RingElem, b: &RingElem) -> Result<RingElem> {
    a.checked_mul(b)
}

pub fn elem_neg(a: &RingElem) -> RingElem {
    a.neg()
}

pub fn elem_pow(a: &RingElem, n: u64) -> RingElem {
    a.pow(n)
}

#[cfg(test)]
mod tests;
