//! Truncated Witt vectors `W_M(F_q)` and Teichmuller lifts.
//!
//! `W_M(F_q)` is realised as `Z/p^M[x]/(f)` where `f` lifts the primitive
//! modulus used for `F_q`, so reduction mod `p` lands exactly in the
//! [`RingCtx::finite_field`] presentation.

use serde_json::{json, Value};

use crate::arith::modular::prime_power;
use crate::arith::{Ring, RingCtx, RingElem, RingExt, RingKind};
use crate::error::{Error, Result};
use crate::report::{refs, CheckReport};
use crate::tilt::{sharp, PowerGraph, TiltElem};

#[derive(Debug, Clone)]
pub struct WittCtx {
    q: u64,
    m: u32,
    ring: Ring,
    residue: Ring,
}

impl WittCtx {
    pub fn new(q: u64, m: u32) -> Result<WittCtx> {
        let ring = RingCtx::unramified(q, m)?;
        let residue = ring.residue_ctx()?;
        Ok(WittCtx { q, m, ring, residue })
    }

    /// View an existing unramified context (`Z/p^M` or `Zq`) as Witt vectors.
    pub fn from_ring(ring: &Ring) -> Result<WittCtx> {
        match ring.kind() {
            RingKind::ZmodPM | RingKind::Unramified => WittCtx::new(ring.residue_field_size(), ring.precision()),
            _ => Err(Error::CtxMismatch(format!("{ring} is not an unramified ring of Witt vectors"))),
        }
    }

    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn precision(&self) -> u32 {
        self.m
    }
    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn residue(&self) -> &Ring {
        &self.residue
    }

    /// Low coefficients of the monic modulus of `F_q` (empty for `q = p`, where
    /// the field is `Z/p`).
    pub fn defining_polynomial(&self) -> Vec<u64> {
        if self.residue.degree() == 1 {
            Vec::new()
        } else {
            self.residue.defining_polynomial().to_vec()
        }
    }
}

/// The Teichmuller lift with the sequence of iterates `y, y^q, y^(q^2), ...`
/// starting from the canonical lift; stable after at most `M - 1` steps.
pub fn teichmuller_trace(a: &RingElem, ctx: &WittCtx) -> Result<Vec<RingElem>> {
    if **a.ctx() != *ctx.residue {
        return Err(Error::CtxMismatch(format!("{} is not the residue field {}", a.ctx(), ctx.residue)));
    }
    let mut trace = vec![ctx.ring.lift_residue(a)?];
    loop {
        let y = trace.last().unwrap().pow(ctx.q);
        if y == *trace.last().unwrap() {
            return Ok(trace);
        }
        debug_assert!(trace.len() < ctx.m as usize + 1);
        trace.push(y);
    }
}

/// The unique `w` with `w^q = w` and `w = a mod p`.
pub fn teichmuller(a: &RingElem, ctx: &WittCtx) -> Result<RingElem> {
    Ok(teichmuller_trace(a, ctx)?.pop().unwrap())
}

/// The tilt element `(a, a^(1/p), ..., a^(1/p^D))` of a residue `a`.
pub fn root_system(a: &RingElem, depth: usize) -> Result<Vec<RingElem>> {
    let mut seq = vec![a.clone()];
    for _ in 0..depth {
        let next = seq.last().unwrap().frobenius_preimage()?;
        seq.push(next);
    }
    Ok(seq)
}

/// Compare `sharp` of the lifted root system with the Teichmuller lift for
/// every element of `F_q`, exactly mod `p^M`.
pub fn sharp_equals_teichmuller(ctx: &WittCtx) -> Result<CheckReport> {
    if ctx.q > 81 || ctx.m > 6 {
        return Err(Error::TooLarge { size: format!("q={} M={}", ctx.q, ctx.m), cap: 81 });
    }
    let depth = ctx.m.saturating_sub(1) as usize;
    let mut checked = 0u64;
    for a in ctx.residue.elements()? {
        let x = TiltElem::from_residues(&ctx.ring, &root_system(&a, depth)?)?;
        let (s, prec) = sharp(&x);
        let w = teichmuller(&a, ctx)?;
        if prec < ctx.m || s != w {
            return Ok(CheckReport::fails("sharp-equals-teichmuller", json!({"a": a.to_json(), "sharp": s.to_json(), "teichmuller": w.to_json(), "prec": prec}))
                .with_ref(refs::TEICHMULLER)
                .with_detail("ctx", ctx.ring.descriptor()));
        }
        checked += 1;
    }
    Ok(CheckReport::holds("sharp-equals-teichmuller")
        .with_ref(refs::TEICHMULLER)
        .with_ref(refs::SHARP_MAP)
        .with_bound("depth", depth)
        .with_detail("ctx", ctx.ring.descriptor())
        .with_detail("defining_polynomial", ctx.defining_polynomial())
        .with_detail("elements_checked", checked))
}

/// The root of `t^p = a` inside the sharp image, with the full list of roots
/// in the ring when it is small enough to enumerate.
#[derive(Debug, Clone)]
pub struct ImageRoot {
    pub root: RingElem,
    pub all_roots: Option<Vec<RingElem>>,
}

impl ImageRoot {
    pub fn roots_in_image(&self, ctx: &WittCtx) -> Option<Vec<RingElem>> {
        let all = self.all_roots.as_ref()?;
        Some(all.iter().filter(|r| in_sharp_image(r, ctx)).cloned().collect())
    }

    pub fn to_report(&self, ctx: &WittCtx) -> CheckReport {
        let in_image = self.roots_in_image(ctx);
        let mut rep = match &in_image {
            Some(v) if v.len() != 1 => CheckReport::fails("unique-root-in-sharp-image", Value::Array(v.iter().map(RingElem::to_json).collect())),
            _ => CheckReport::holds("unique-root-in-sharp-image"),
        };
        rep = rep.with_ref(refs::UNIQUE_ROOT).with_detail("ctx", ctx.ring.descriptor()).with_detail("root", self.root.to_json());
        if let (Some(all), Some(img)) = (&self.all_roots, &in_image) {
            rep.set_detail("all_roots", Value::Array(all.iter().map(RingElem::to_json).collect()));
            rep.set_detail("roots_in_image", img.len());
        }
        rep
    }
}

/// `a` lies in the sharp image iff it is the Teichmuller lift of its residue.
pub fn in_sharp_image(a: &RingElem, ctx: &WittCtx) -> bool {
    a.proj_mod_p().and_then(|r| teichmuller(&r, ctx)).map(|w| w == *a).unwrap_or(false)
}

pub fn unique_p_root_in_sharp_image(a: &RingElem, ctx: &WittCtx) -> Result<ImageRoot> {
    if **a.ctx() != *ctx.ring {
        return Err(Error::CtxMismatch(format!("{} vs {}", a.ctx(), ctx.ring)));
    }
    if !in_sharp_image(a, ctx) {
        return Err(Error::NotInImage);
    }
    let root = teichmuller(&a.proj_mod_p()?.frobenius_preimage()?, ctx)?;
    debug_assert_eq!(root.pow(ctx.ring.p()), *a);
    let p = ctx.ring.p();
    let all_roots = match ctx.ring.elements() {
        Ok(it) => Some(it.filter(|y| y.pow(p) == *a).collect()),
        Err(Error::TooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(ImageRoot { root, all_roots })
}

/// Outcome of a full scan of `x -> x^p` on one ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootScan {
    pub ring_size: u64,
    /// Size of the eventual image of `x -> x^p`, i.e. of the sharp image.
    pub image_size: u64,
    /// An image element with a number of image roots other than one.
    pub violation: Option<(u64, u64)>,
}

/// Count, for every `a` in the eventual image of `x -> x^p`, how many
/// elements of that image are p-th roots of `a`.
pub fn scan_image_roots(image: &[u32]) -> RootScan {
    let n = image.len();
    let mut indeg = vec![0u32; n];
    for &j in image {
        indeg[j as usize] += 1;
    }
    // Peel vertices of in-degree zero; the survivors are the periodic points.
    let mut periodic = vec![true; n];
    let mut stack: Vec<u32> = (0..n as u32).filter(|&i| indeg[i as usize] == 0).collect();
    while let Some(i) = stack.pop() {
        periodic[i as usize] = false;
        let j = image[i as usize];
        indeg[j as usize] -= 1;
        if indeg[j as usize] == 0 {
            stack.push(j);
        }
    }
    // Reuse the in-degree array as the count of periodic roots.
    indeg.iter_mut().for_each(|c| *c = 0);
    let mut image_size = 0u64;
    for (y, &img) in image.iter().enumerate() {
        if periodic[y] {
            indeg[img as usize] += 1;
            image_size += 1;
        }
    }
    let violation = (0..n).find(|&a| periodic[a] && indeg[a] != 1).map(|a| (a as u64, indeg[a] as u64));
    RootScan { ring_size: n as u64, image_size, violation }
}

/// Smallest prime factor and cofactor `x / spf(x)` for `0..n`.
pub struct FactorTable {
    spf: Vec<u32>,
    cofactor: Vec<u32>,
}

impl FactorTable {
    pub fn new(n: usize) -> FactorTable {
        let mut spf = vec![0u32; n];
        for i in 2..n {
            if spf[i] == 0 {
                for j in (i..n).step_by(i) {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                }
            }
        }
        let cofactor = (0..n).map(|x| if spf[x] == 0 { 0 } else { x as u32 / spf[x] }).collect();
        FactorTable { spf, cofactor }
    }

    pub fn is_prime(&self, x: u64) -> bool {
        x >= 2 && self.spf[x as usize] as u64 == x
    }
}

/// `x -> x^p mod p^M` for every residue, using complete multiplicativity so
/// only primes need a modular exponentiation. The table must cover `0..p^M`.
pub fn zmod_power_map(p: u64, m: u32, table: &FactorTable) -> Vec<u32> {
    let n = p.pow(m);
    assert!(n <= table.spf.len() as u64 && n < 1 << 31);
    let minv = u64::MAX / n;
    let reduce = |x: u64| {
        let q = ((x as u128 * minv as u128) >> 64) as u64;
        let r = x - q * n;
        if r >= n {
            r - n
        } else {
            r
        }
    };
    // On units the exponent may be reduced modulo |(Z/p^M)^*| = (p-1) p^(M-1).
    let unit_exp = p % ((p - 1) * (n / p));
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = reduce(acc * b);
            }
            b = reduce(b * b);
            e >>= 1;
        }
        acc
    };
    let mut f = vec![0u32; n as usize];
    if n > 1 {
        f[1] = 1;
    }
    for x in 2..n as usize {
        let s = table.spf[x] as usize;
        f[x] = if s == x {
            pow(x as u64, if x as u64 == p { p } else { unit_exp }) as u32
        } else {
            reduce(f[s] as u64 * f[table.cofactor[x] as usize] as u64) as u32
        };
    }
    f
}

/// Full-enumeration check that each element of the sharp image has exactly
/// one p-th root in the sharp image, over every `Z/p^M` with `p^M <= limit`
/// and every `W_M(F_q)` with `q` non-prime and `q^M <= limit`.
pub fn unique_root_sweep(limit: u64) -> Result<CheckReport> {
    let cap = crate::arith::enumeration_cap();
    if limit > cap {
        return Err(Error::TooLarge { size: limit.to_string(), cap });
    }
    let table = FactorTable::new(limit as usize + 1);
    let mut rings = 0u64;
    let mut elements = 0u64;
    let mut record = |desc: String, scan: RootScan, q: u64| -> Option<CheckReport> {
        rings += 1;
        elements += scan.ring_size;
        if let Some((a, c)) = scan.violation {
            return Some(CheckReport::fails("unique-root-sweep", json!({"ctx": desc, "index": a, "image_roots": c})));
        }
        if scan.image_size != q {
            return Some(CheckReport::fails("unique-root-sweep", json!({"ctx": desc, "image_size": scan.image_size, "expected": q})));
        }
        None
    };
    for p in 2..=limit {
        if !table.is_prime(p) {
            continue;
        }
        let mut m = 1;
        while p.checked_pow(m).is_some_and(|n| n <= limit) {
            if let Some(fail) = record(format!("Zp p={p} M={m}"), scan_image_roots(&zmod_power_map(p, m, &table)), p) {
                return Ok(fail.with_ref(refs::UNIQUE_ROOT));
            }
            m += 1;
        }
    }
    for q in 4..=limit {
        let Some((_, d)) = prime_power(q) else { continue };
        if d < 2 {
            continue;
        }
        let mut m = 1;
        while q.checked_pow(m).is_some_and(|n| n <= limit) {
            let ring = RingCtx::unramified(q, m)?;
            let graph = PowerGraph::new(&ring)?;
            let image: Vec<u32> = (0..graph.size() as u64).map(|i| graph.pth_power(i) as u32).collect();
            if let Some(fail) = record(ring.descriptor(), scan_image_roots(&image), q) {
                return Ok(fail.with_ref(refs::UNIQUE_ROOT));
            }
            m += 1;
        }
    }
    Ok(CheckReport::holds("unique-root-sweep")
        .with_ref(refs::UNIQUE_ROOT)
        .with_ref(refs::TEICHMULLER)
        .with_bound("ring_size", limit)
        .with_detail("rings", rings)
        .with_detail("elements", elements))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::modular::pow_mod;

    /// Brute force: the unique lift `y` of `a` with `y^q = y`.
    fn teichmuller_oracle(a: &RingElem, ctx: &WittCtx) -> RingElem {
        let found: Vec<RingElem> = ctx.ring().elements().unwrap().filter(|y| y.pow(ctx.q()) == *y && y.proj_mod_p().unwrap() == *a).collect();
        assert_eq!(found.len(), 1);
        found[0].clone()
    }

    #[test]
    fn teichmuller_of_two_mod_25() {
        let w = WittCtx::new(5, 2).unwrap();
        let two = w.residue().from_int(2);
        let trace = teichmuller_trace(&two, &w).unwrap();
        assert_eq!(trace.iter().map(|e| e.coeffs()[0]).collect::<Vec<_>>(), vec![2, 7]);
        assert_eq!(teichmuller(&w.residue().zero(), &w).unwrap(), w.ring().zero());
        assert_eq!(teichmuller(&w.residue().one(), &w).unwrap(), w.ring().one());
    }

    #[test]
    fn teichmuller_matches_oracle_and_is_multiplicative() {
        for (q, m) in [(4, 3), (9, 2), (5, 3), (8, 2), (2, 5)] {
            let w = WittCtx::new(q, m).unwrap();
            let elems: Vec<_> = w.residue().elements().unwrap().collect();
            for a in &elems {
                let t = teichmuller(a, &w).unwrap();
                assert_eq!(t, teichmuller_oracle(a, &w));
                assert!(teichmuller_trace(a, &w).unwrap().len() <= m as usize);
                for b in &elems {
                    assert_eq!(teichmuller(&(a * b), &w).unwrap(), &t * &teichmuller(b, &w).unwrap());
                }
            }
        }
    }

    #[test]
    fn sharp_agrees_with_teichmuller() {
        for (q, m) in [(2, 3), (5, 2), (9, 3), (4, 1), (27, 2)] {
            assert!(sharp_equals_teichmuller(&WittCtx::new(q, m).unwrap()).unwrap().is_holds(), "q={q} M={m}");
        }
        assert!(sharp_equals_teichmuller(&WittCtx::new(83, 2).unwrap()).is_err());
    }

    #[test]
    fn square_roots_of_one_mod_16() {
        let w = WittCtx::new(2, 4).unwrap();
        let res = unique_p_root_in_sharp_image(&w.ring().one(), &w).unwrap();
        let all: Vec<u64> = res.all_roots.as_ref().unwrap().iter().map(|e| e.coeffs()[0]).collect();
        assert_eq!(all, vec![1, 7, 9, 15]);
        assert_eq!(res.root, w.ring().one());
        assert_eq!(res.roots_in_image(&w).unwrap().len(), 1);
        assert!(res.to_report(&w).is_holds());
        assert!(matches!(unique_p_root_in_sharp_image(&w.ring().from_int(15), &w), Err(Error::NotInImage)));
    }

    #[test]
    fn root_of_teichmuller_two_mod_25() {
        let w = WittCtx::new(5, 2).unwrap();
        let res = unique_p_root_in_sharp_image(&w.ring().from_int(7), &w).unwrap();
        assert_eq!(res.root, w.ring().from_int(7));
        assert_eq!(res.roots_in_image(&w).unwrap(), vec![w.ring().from_int(7)]);
        let zero = unique_p_root_in_sharp_image(&w.ring().zero(), &w).unwrap();
        assert!(zero.root.is_zero());
    }

    #[test]
    fn fast_power_map_matches_pow() {
        let table = FactorTable::new(1000);
        let f = zmod_power_map(3, 6, &table);
        for x in 0..729u64 {
            assert_eq!(f[x as usize] as u64, pow_mod(x, 3, 729));
        }
    }

    #[test]
    fn small_sweep() {
        let rep = unique_root_sweep(2000).unwrap();
        assert!(rep.is_holds(), "{:?}", rep);
    }
}
