//! The tilt at finite depth.
//!
//! A [`TiltElem`] is a finite sequence `a_0, ..., a_D` in `A` with
//! `a_{n+1}^p = a_n` modulo `p^prec`, i.e. a truncation of an element of
//! `lim_{x -> x^p} A`. Its residues mod `p` form the corresponding element of
//! the inverse limit of `A/pA` along Frobenius.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::arith::{Ring, RingCtx, RingElem, RingExt};
use crate::error::{Error, Result};
use crate::report::{refs, CheckReport};

#[derive(Debug, Clone)]
pub struct TiltElem {
    ctx: Ring,
    seq: Vec<RingElem>,
    prec: u32,
}

fn check_ctx(ctx: &Ring, seq: &[RingElem]) -> Result<()> {
    if seq.is_empty() {
        return Err(Error::BadElement("a tilt element needs at least one component".into()));
    }
    for a in seq {
        if **a.ctx() != **ctx {
            return Err(Error::CtxMismatch(format!("{} vs {}", a.ctx(), ctx)));
        }
    }
    Ok(())
}

/// First `n` with `a_{n+1}^p != a_n mod p^r`, with the valuation of the defect.
fn first_defect(ctx: &Ring, seq: &[RingElem], r: u32) -> Option<(usize, u32)> {
    let p = ctx.p();
    seq.windows(2).enumerate().find_map(|(n, w)| {
        let defect = &w[1].pow(p) - &w[0];
        let v = defect.p_valuation();
        (v < r).then_some((n + 1, v))
    })
}

/// Lift an exactly compatible sequence `a_0, ..., a_D` (`a_{n+1}^p = a_n`).
/// `Incompatible` names the first index `n + 1` whose p-th power misses `a_n`.
pub fn tilt_lift(ctx: &Ring, seq: Vec<RingElem>) -> Result<TiltElem> {
    TiltElem::with_precision(ctx, seq, ctx.precision())
}

/// The common value of `c_k^(p^k)` for an infinite continuation of
/// `c_0, ..., c_L` with `c_{k+1}^p = c_k mod p`, i.e. `c_L^(p^L)`, which is
/// certified modulo `p^min(L+1, M)`.
pub fn limit_pth_powers(ctx: &Ring, approximants: &[RingElem]) -> Result<(RingElem, u32)> {
    check_ctx(ctx, approximants)?;
    if let Some((index, _)) = first_defect(ctx, approximants, 1) {
        return Err(Error::NotCauchy { index });
    }
    let l = approximants.len() - 1;
    let value = approximants[l].pow_p_times(l as u32);
    let prec = (l as u32 + 1).min(ctx.precision());
    Ok((value, prec))
}

impl TiltElem {
    /// Accept a sequence compatible modulo `p^prec`, `1 <= prec <= M`.
    pub fn with_precision(ctx: &Ring, seq: Vec<RingElem>, prec: u32) -> Result<TiltElem> {
        check_ctx(ctx, &seq)?;
        if prec < 1 || prec > ctx.precision() {
            return Err(Error::BadParameter(format!("precision {prec} outside [1, {}]", ctx.precision())));
        }
        if let Some((index, valuation)) = first_defect(ctx, &seq, prec) {
            return Err(Error::Incompatible { index, valuation });
        }
        Ok(TiltElem { ctx: ctx.clone(), seq, prec })
    }

    /// The Monoid Lemma lift of a Frobenius-compatible residue sequence
    /// `r_0, ..., r_L` in `A/pA`: component `n` is the limit of
    /// `lift(r_{n+k})^(p^k)`, which is `lift(r_L)^(p^(L-n))`. The result is
    /// exactly compatible; component `n` agrees with the limit of any longer
    /// residue sequence modulo `p^min(L-n+1, M)`.
    pub fn from_residues(ctx: &Ring, residues: &[RingElem]) -> Result<TiltElem> {
        let res_ctx = ctx.residue_ctx()?;
        check_ctx(&res_ctx, residues)?;
        if let Some((index, valuation)) = first_defect(&res_ctx, residues, 1) {
            return Err(Error::Incompatible { index, valuation });
        }
        let lifts = residues.iter().map(|r| ctx.lift_residue(r)).collect::<Result<Vec<_>>>()?;
        let seq = (0..lifts.len()).map(|n| limit_pth_powers(ctx, &lifts[n..]).map(|(v, _)| v)).collect::<Result<Vec<_>>>()?;
        Ok(TiltElem { ctx: ctx.clone(), seq, prec: ctx.precision() })
    }

    /// `(1, 1, ..., 1)`.
    pub fn one(ctx: &Ring, depth: usize) -> TiltElem {
        TiltElem { ctx: ctx.clone(), seq: vec![ctx.one(); depth + 1], prec: ctx.precision() }
    }

    pub fn zero(ctx: &Ring, depth: usize) -> TiltElem {
        TiltElem { ctx: ctx.clone(), seq: vec![ctx.zero(); depth + 1], prec: ctx.precision() }
    }

    pub fn ctx(&self) -> &Ring {
        &self.ctx
    }
    pub fn seq(&self) -> &[RingElem] {
        &self.seq
    }
    pub fn depth(&self) -> usize {
        self.seq.len() - 1
    }
    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.seq.iter().all(RingElem::is_zero)
    }

    /// Residues mod `p`: the element of the Frobenius inverse limit of `A/pA`.
    /// Characteristic-p contexts are returned unchanged.
    pub fn residues(&self) -> Result<Vec<RingElem>> {
        // Z/p and F_q-lifts at M = 1 still reduce into their residue field.
        if self.ctx.residue_ctx().is_err() {
            return Ok(self.seq.clone());
        }
        self.seq.iter().map(RingElem::proj_mod_p).collect()
    }

    /// Componentwise congruence mod `p^r` up to the common depth.
    pub fn same_at(&self, other: &TiltElem, r: u32) -> Result<bool> {
        same_ctx(self, other)?;
        for (a, b) in self.seq.iter().zip(&other.seq) {
            if !a.congruent(b, r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn truncate(&self, depth: usize) -> TiltElem {
        let mut t = self.clone();
        t.seq.truncate(depth + 1);
        t
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ctx": self.ctx.descriptor(),
            "seq": self.seq.iter().map(RingElem::to_json).collect::<Vec<_>>(),
            "prec": self.prec,
        })
    }

    pub fn from_json(v: &Value) -> Result<TiltElem> {
        let desc = v.get("ctx").and_then(Value::as_str).ok_or_else(|| Error::Parse("missing `ctx`".into()))?;
        let ctx = RingCtx::parse(desc)?;
        let seq = v.get("seq").and_then(Value::as_array).ok_or_else(|| Error::Parse("missing `seq`".into()))?;
        let seq = seq.iter().map(|e| ctx.elem_from_json(e)).collect::<Result<Vec<_>>>()?;
        let prec = match v.get("prec") {
            Some(p) => p.as_u64().ok_or_else(|| Error::Parse("`prec` must be an integer".into()))? as u32,
            None => ctx.precision(),
        };
        TiltElem::with_precision(&ctx, seq, prec)
    }
}

fn same_ctx(x: &TiltElem, y: &TiltElem) -> Result<()> {
    if *x.ctx != *y.ctx {
        return Err(Error::CtxMismatch(format!("{} vs {}", x.ctx, y.ctx)));
    }
    Ok(())
}

/// `x^sharp`, the 0-th component of the Monoid Lemma representative,
/// certified modulo `p^min(D+1, M)`.
pub fn sharp(x: &TiltElem) -> (RingElem, u32) {
    limit_pth_powers(&x.ctx, &x.seq).expect("tilt elements are compatible mod p")
}

/// Largest precision `tilt_add` can certify for these operands.
pub fn max_add_precision(x: &TiltElem, y: &TiltElem) -> u32 {
    let d = x.depth().min(y.depth()) as u32;
    (d + 1).min(x.ctx.precision())
}

/// Sum at the largest certifiable precision `P = min(D+1, M)`.
pub fn tilt_add(x: &TiltElem, y: &TiltElem) -> Result<TiltElem> {
    tilt_add_to(x, y, max_add_precision(x, y))
}

/// Sum certified modulo `p^target`. Component `n` is the limit of
/// `(a_{n+m} + b_{n+m})^(p^m)` over `m < target`, so `target - 1` components
/// are consumed and the result has depth `D - target + 1`.
pub fn tilt_add_to(x: &TiltElem, y: &TiltElem, target: u32) -> Result<TiltElem> {
    same_ctx(x, y)?;
    let achievable = max_add_precision(x, y);
    if target > achievable {
        return Err(Error::InsufficientDepth { requested: target, achievable });
    }
    if target < 1 {
        return Err(Error::BadParameter("target precision must be at least 1".into()));
    }
    let d = x.depth().min(y.depth());
    let sums: Vec<RingElem> = x.seq.iter().zip(&y.seq).map(|(a, b)| a + b).collect();
    let width = target as usize;
    let seq = (0..=d + 1 - width).map(|n| limit_pth_powers(&x.ctx, &sums[n..n + width]).map(|(v, _)| v)).collect::<Result<Vec<_>>>()?;
    TiltElem::with_precision(&x.ctx, seq, target)
}

pub fn tilt_neg(x: &TiltElem) -> TiltElem {
    // (-1)^flat = (-1, -1, ...) for odd p; for p = 2, -1 = 1 in the tilt.
    if x.ctx.p() == 2 {
        return x.clone();
    }
    TiltElem { ctx: x.ctx.clone(), seq: x.seq.iter().map(RingElem::neg).collect(), prec: x.prec }
}

pub fn tilt_mul(x: &TiltElem, y: &TiltElem) -> Result<TiltElem> {
    same_ctx(x, y)?;
    let seq = x.seq.iter().zip(&y.seq).map(|(a, b)| a * b).collect();
    Ok(TiltElem { ctx: x.ctx.clone(), seq, prec: x.prec.min(y.prec) })
}

/// Componentwise p-th powers.
pub fn tilt_frobenius(x: &TiltElem) -> TiltElem {
    let p = x.ctx.p();
    TiltElem { ctx: x.ctx.clone(), seq: x.seq.iter().map(|a| a.pow(p)).collect(), prec: x.prec }
}

/// Left shift `(a_1, ..., a_D)`.
pub fn tilt_frobenius_inv(x: &TiltElem) -> Result<TiltElem> {
    if x.depth() == 0 {
        return Err(Error::InsufficientDepth { requested: 1, achievable: 0 });
    }
    Ok(TiltElem { ctx: x.ctx.clone(), seq: x.seq[1..].to_vec(), prec: x.prec })
}

/// The functional graph of `x -> x^p` on an enumerable ring.
pub struct PowerGraph {
    ctx: Ring,
    image: Vec<u64>,
    periodic: Vec<bool>,
}

impl PowerGraph {
    pub fn new(ctx: &Ring) -> Result<PowerGraph> {
        let size = ctx.check_enumerable()? as usize;
        let p = ctx.p();
        let image: Vec<u64> = (0..size as u64).map(|i| ctx.element_at(i).pow(p).index()).collect();
        // Peel off vertices of in-degree zero; what remains are the cycles.
        let mut indeg = vec![0u32; size];
        for &j in &image {
            indeg[j as usize] += 1;
        }
        let mut periodic = vec![true; size];
        let mut stack: Vec<usize> = (0..size).filter(|&i| indeg[i] == 0).collect();
        while let Some(i) = stack.pop() {
            periodic[i] = false;
            let j = image[i] as usize;
            indeg[j] -= 1;
            if indeg[j] == 0 {
                stack.push(j);
            }
        }
        Ok(PowerGraph { ctx: ctx.clone(), image, periodic })
    }

    pub fn size(&self) -> usize {
        self.image.len()
    }

    pub fn pth_power(&self, i: u64) -> u64 {
        self.image[i as usize]
    }

    /// Elements admitting p-th root chains of every length: the eventual image
    /// of `x -> x^p`, equal to the set of its periodic points.
    pub fn is_extendable(&self, i: u64) -> bool {
        self.periodic[i as usize]
    }

    pub fn extendable(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.size() as u64).filter(|&i| self.periodic[i as usize])
    }

    /// All `b` with `b^p = a`.
    pub fn preimages(&self) -> Vec<Vec<u64>> {
        let mut pre = vec![Vec::new(); self.size()];
        for (i, &j) in self.image.iter().enumerate() {
            pre[j as usize].push(i as u64);
        }
        pre
    }

    /// On the eventual image `x -> x^p` is a bijection; this is its inverse.
    pub fn periodic_root(&self) -> BTreeMap<u64, u64> {
        self.extendable().map(|i| (self.image[i as usize], i)).collect()
    }

    /// Every genuine depth-`depth` tilt element: the unique extendable chain
    /// above each extendable `a_0`.
    pub fn extendable_systems(&self, depth: usize) -> Vec<TiltElem> {
        let root = self.periodic_root();
        self.extendable()
            .map(|a0| {
                let mut idx = vec![a0];
                for _ in 0..depth {
                    idx.push(root[idx.last().unwrap()]);
                }
                TiltElem { ctx: self.ctx.clone(), seq: idx.iter().map(|&i| self.ctx.element_at(i)).collect(), prec: self.ctx.precision() }
            })
            .collect()
    }
}

/// Search for two distinct genuine compatible systems with the same `a_0`.
/// Systems of depth `depth` that are compatible but cannot be continued to
/// greater depth are truncation artifacts; they are counted and one pair is
/// reported in the details, but they are not elements of the tilt.
pub fn tilt_is_injective_sharp(ctx: &Ring, depth: usize) -> Result<CheckReport> {
    let g = PowerGraph::new(ctx)?;
    let pre = g.preimages();
    let cap = crate::arith::enumeration_cap();
    let mut systems: u64 = 0;
    let mut artifact_pair: Option<(Vec<u64>, Vec<u64>)> = None;
    let mut artifact_roots: u64 = 0;
    let mut witness: Option<(Vec<u64>, Vec<u64>)> = None;
    for a0 in 0..g.size() as u64 {
        let mut chains = vec![vec![a0]];
        for _ in 0..depth {
            let mut next = Vec::new();
            for c in &chains {
                for &b in &pre[*c.last().unwrap() as usize] {
                    let mut c2 = c.clone();
                    c2.push(b);
                    next.push(c2);
                }
            }
            chains = next;
            if chains.len() as u64 > cap {
                return Err(Error::TooLarge { size: format!(">{}", chains.len()), cap });
            }
        }
        systems += chains.len() as u64;
        if systems > cap {
            return Err(Error::TooLarge { size: format!(">{systems}"), cap });
        }
        let (genuine, truncated): (Vec<_>, Vec<_>) = chains.into_iter().partition(|c| c.iter().all(|&i| g.is_extendable(i)));
        if genuine.len() > 1 && witness.is_none() {
            witness = Some((genuine[0].clone(), genuine[1].clone()));
        }
        if !truncated.is_empty() && !genuine.is_empty() {
            artifact_roots += 1;
            if artifact_pair.is_none() {
                artifact_pair = Some((genuine[0].clone(), truncated[0].clone()));
            }
        }
    }
    let show = |c: &[u64]| Value::Array(c.iter().map(|&i| ctx.element_at(i).to_json()).collect());
    let mut report = match witness {
        Some((a, b)) => CheckReport::fails("tilt-injective-sharp", json!([show(&a), show(&b)])),
        None => CheckReport::holds("tilt-injective-sharp"),
    };
    report = report
        .with_ref(refs::SHARP_INJECTIVE)
        .with_ref(refs::MONOID_LEMMA)
        .with_bound("depth", depth)
        .with_bound("ring_size", g.size())
        .with_detail("ctx", ctx.descriptor())
        .with_detail("compatible_systems", systems)
        .with_detail("tilt_size", g.extendable().count())
        .with_detail("truncation_artifact_roots", artifact_roots);
    if let Some((a, b)) = artifact_pair {
        report.set_detail("truncation_artifact_example", json!([show(&a), show(&b)]));
    }
    Ok(report)
}

/// Exhaustive reducedness check over genuine tilt elements of the given depth:
/// no nonzero `x` with `x^(p^k) = 0`. In a finite ring every nilpotent
/// satisfies this for `p^k` at least the ring size, so `k` is chosen so.
pub fn tilt_reducedness_check(ctx: &Ring, depth: usize) -> Result<CheckReport> {
    let g = PowerGraph::new(ctx)?;
    let size = g.size() as u64;
    let mut k = 0u32;
    while ctx.p().pow(k) < size {
        k += 1;
    }
    let elems = g.extendable_systems(depth);
    for x in &elems {
        let mut y = x.clone();
        for _ in 0..k {
            y = tilt_frobenius(&y);
        }
        if !x.is_zero() && y.is_zero() {
            return Ok(CheckReport::fails("tilt-reduced", x.to_json()).with_ref(refs::TILT_PERFECT));
        }
    }
    Ok(CheckReport::holds("tilt-reduced")
        .with_ref(refs::TILT_PERFECT)
        .with_bound("depth", depth)
        .with_bound("frobenius_iterations", k)
        .with_detail("ctx", ctx.descriptor())
        .with_detail("elements_checked", elems.len()))
}

/// Exhaustive search for zero divisors among genuine tilt elements.
pub fn tilt_domain_check(ctx: &Ring, depth: usize) -> Result<CheckReport> {
    let g = PowerGraph::new(ctx)?;
    let elems: Vec<TiltElem> = g.extendable_systems(depth).into_iter().filter(|x| !x.is_zero()).collect();
    let pairs = (elems.len() as u64).pow(2);
    let cap = crate::arith::enumeration_cap();
    if pairs > cap {
        return Err(Error::TooLarge { size: pairs.to_string(), cap });
    }
    for (i, x) in elems.iter().enumerate() {
        for y in &elems[i..] {
            if tilt_mul(x, y)?.is_zero() {
                return Ok(CheckReport::fails("tilt-domain", json!([x.to_json(), y.to_json()])).with_ref(refs::TILT_DOMAIN));
            }
        }
    }
    Ok(CheckReport::holds("tilt-domain")
        .with_ref(refs::TILT_DOMAIN)
        .with_bound("depth", depth)
        .with_detail("ctx", ctx.descriptor())
        .with_detail("nonzero_elements", elems.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(s: &str) -> Ring {
        RingCtx::parse(s).unwrap()
    }

    #[test]
    fn lift_validates_compatibility() {
        let r = ring("Zp[p^(1/p^2)] p=3 M=4");
        let w = tilt_lift(&r, r.parse_seq("3,x^3,x").unwrap()).unwrap();
        assert_eq!(w.depth(), 2);
        assert_eq!(w.prec(), 4);
        assert_eq!(sharp(&w), (r.from_int(3), 3));

        let z = ring("Zp p=5 M=2");
        match tilt_lift(&z, z.parse_seq("2,2").unwrap()) {
            Err(Error::Incompatible { index: 1, valuation: 1 }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn limits_match_worked_values() {
        let z25 = ring("Zp p=5 M=2");
        assert_eq!(limit_pth_powers(&z25, &z25.parse_seq("2,2").unwrap()).unwrap(), (z25.from_int(7), 2));
        let z81 = ring("Zp p=3 M=4");
        assert_eq!(limit_pth_powers(&z81, &z81.parse_seq("4,1").unwrap()).unwrap(), (z81.from_int(1), 2));
        assert_eq!(limit_pth_powers(&z81, &z81.parse_seq("1,1,1,1").unwrap()).unwrap(), (z81.from_int(1), 4));
        assert!(matches!(limit_pth_powers(&z81, &z81.parse_seq("2,1").unwrap()), Err(Error::NotCauchy { index: 1 })));
    }

    #[test]
    fn sharp_is_not_additive() {
        let z = ring("Zp p=5 M=2");
        let one = TiltElem::one(&z, 1);
        let two = tilt_add(&one, &one).unwrap();
        assert_eq!(two.depth(), 0);
        assert_eq!(sharp(&two).0, z.from_int(7));
        assert_ne!(sharp(&two).0, &sharp(&one).0 + &sharp(&one).0);
        assert!(matches!(tilt_add_to(&one, &one, 3), Err(Error::InsufficientDepth { requested: 3, achievable: 2 })));
    }

    #[test]
    fn products_and_shifts() {
        let r = ring("Zp[p^(1/p^2)] p=3 M=4");
        let w = tilt_lift(&r, r.parse_seq("3,x^3,x").unwrap()).unwrap();
        let sq = tilt_mul(&w, &w).unwrap();
        assert_eq!(sq.seq(), r.parse_seq("9,x^6,x^2").unwrap().as_slice());
        let back = tilt_frobenius_inv(&tilt_frobenius(&w)).unwrap();
        assert!(back.same_at(&w, 4).unwrap());
        assert_eq!(back.depth(), 1);
        assert!(tilt_frobenius_inv(&TiltElem::one(&r, 0)).is_err());
    }

    #[test]
    fn char_p_addition_is_componentwise() {
        let r = ring("Fp[t^(1/p^2)]/t^2 p=2");
        let x = tilt_lift(&r, r.parse_seq("t,t^(1/2),t^(1/4)").unwrap()).unwrap();
        let s = tilt_add(&x, &TiltElem::one(&r, 2)).unwrap();
        assert_eq!(s.depth(), 2);
        assert_eq!(s.seq()[2], r.parse_elem("1 + t^(1/4)").unwrap());
        let inv = tilt_frobenius_inv(&x).unwrap();
        assert_eq!(inv.seq(), r.parse_seq("t^(1/2),t^(1/4)").unwrap().as_slice());
    }

    #[test]
    fn residue_lift_round_trip() {
        let r = ring("Zp p=5 M=3");
        let f = r.residue_ctx().unwrap();
        let res = vec![f.from_int(2); 4];
        let x = TiltElem::from_residues(&r, &res).unwrap();
        assert_eq!(x.residues().unwrap(), res);
        assert_eq!(sharp(&x).0, r.from_int(57));
        assert_eq!(sharp(&x).0.pow(5), sharp(&x).0);
    }

    #[test]
    fn injective_sharp_and_artifacts() {
        let z8 = ring("Zp p=2 M=3");
        let rep = tilt_is_injective_sharp(&z8, 2).unwrap();
        assert!(rep.is_holds());
        assert_eq!(rep.details["tilt_size"], json!(2));
        let z4 = ring("Zp p=2 M=2");
        let rep = tilt_is_injective_sharp(&z4, 1).unwrap();
        assert!(rep.is_holds());
        assert_eq!(rep.details["truncation_artifact_roots"], json!(2));
        let s = ring("Fp[t^(1/p^0)]/t^2 p=3");
        let rep = tilt_is_injective_sharp(&s, 2).unwrap();
        assert!(rep.is_holds());
        assert_eq!(rep.details["tilt_size"], json!(3));
    }

    #[test]
    fn reduced_and_domain() {
        for d in ["Zp p=3 M=2", "Zp[p^(1/p^1)] p=2 M=2", "Fp[t^(1/p^1)]/t^2 p=3", "Zq q=4 M=2"] {
            let r = ring(d);
            assert!(tilt_reducedness_check(&r, 2).unwrap().is_holds(), "{d}");
            assert!(tilt_domain_check(&r, 2).unwrap().is_holds(), "{d}");
        }
    }

    #[test]
    fn json_round_trip() {
        let r = ring("Zp[p^(1/p^2)] p=3 M=4");
        let w = tilt_lift(&r, r.parse_seq("3,x^3,x").unwrap()).unwrap();
        let back = TiltElem::from_json(&w.to_json()).unwrap();
        assert!(back.same_at(&w, 4).unwrap());
        assert_eq!(back.to_json(), w.to_json());
    }
}
