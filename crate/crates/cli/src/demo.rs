//! Narrated walkthroughs of the named results, with every intermediate
//! value and its precision certificate.

use serde_json::{json, Value};

use tiltkit::closure;
use tiltkit::tilt::{self, TiltElem};
use tiltkit::valuation::{self, GroupElem, ValModel, ValueSet};
use tiltkit::witt::{self, WittCtx};
use tiltkit::{Error, Result, RingCtx, RingElem, RingExt};

pub const DEMOS: [&str; 5] = ["monoid-lemma", "teichmuller", "minus-one", "krull-rank2", "mt2-audit"];

pub struct Demo {
    pub text: String,
    pub json: Value,
}

pub fn run_demo(name: &str) -> Result<Demo> {
    match name {
        "monoid-lemma" => monoid_lemma(),
        "teichmuller" => teichmuller_demo(),
        "minus-one" => minus_one(),
        "krull-rank2" => krull_rank2(),
        "mt2-audit" => mt2_audit(),
        other => Err(Error::UnknownDemo(format!("{other} (known: {})", DEMOS.join(", ")))),
    }
}

fn monoid_lemma() -> Result<Demo> {
    let r = RingCtx::parse("Zp p=5 M=2")?;
    let one = TiltElem::one(&r, 2);
    let mut t = String::new();
    t += &format!("ring {r}; 1_flat at depth 2 = ({}) prec {}\n", seq_str(one.seq()), one.prec());
    let sums: Vec<RingElem> = one.seq().iter().map(|a| a + a).collect();
    t += &format!("componentwise sums a_n + b_n = ({})\n", seq_str(&sums));
    let mut steps = Vec::new();
    for m in 0..2 {
        let (v, prec) = tilt::limit_pth_powers(&r, &sums[..=m])?;
        t += &format!("  m = {m}: (a_m + b_m)^(5^{m}) = {v}, certified mod 5^{prec}\n");
        steps.push(json!({"m": m, "value": v.to_string(), "precision": prec}));
    }
    let two = tilt::tilt_add(&one, &one)?;
    let (s, prec) = tilt::sharp(&two);
    let naive = &tilt::sharp(&one).0 + &tilt::sharp(&one).0;
    t += &format!("1_flat + 1_flat = ({}) prec {}\n", seq_str(two.seq()), two.prec());
    t += &format!("sharp(1_flat + 1_flat) = {s} mod 5^{prec}, while sharp(1_flat) + sharp(1_flat) = {naive}\n");
    t += "sharp is multiplicative but not additive\n";
    let json = json!({
        "ctx": r.descriptor(),
        "limit_steps": steps,
        "sum": two.to_json(),
        "sharp_of_sum": s.to_string(),
        "sum_of_sharps": naive.to_string(),
        "precision": prec,
    });
    Ok(Demo { text: t, json })
}

fn teichmuller_demo() -> Result<Demo> {
    let ctx = WittCtx::new(5, 2)?;
    let mut t = format!("W_2(F_5) = {}; iterate y -> y^5 from the canonical lift\n", ctx.ring());
    let mut rows = Vec::new();
    for a in ctx.residue().elements()? {
        let trace = witt::teichmuller_trace(&a, &ctx)?;
        let depth = ctx.precision() as usize - 1;
        let x = TiltElem::from_residues(ctx.ring(), &witt::root_system(&a, depth)?)?;
        let (s, prec) = tilt::sharp(&x);
        t += &format!("  a = {a}: iterates {} ; sharp = {s} (mod 5^{prec})\n", seq_str(&trace));
        rows.push(json!({"a": a.to_string(), "iterates": trace.iter().map(RingElem::to_string).collect::<Vec<_>>(), "sharp": s.to_string(), "precision": prec}));
    }
    let rep = witt::sharp_equals_teichmuller(&ctx)?;
    t += &format!("sharp equals the Teichmuller lift on all of F_5: {}\n", rep.is_holds());
    Ok(Demo { text: t, json: json!({"ctx": ctx.ring().descriptor(), "rows": rows, "report": rep.to_json()}) })
}

fn minus_one() -> Result<Demo> {
    let mut t = String::from("p = 2: the sharp image is the Teichmuller image {0, 1}\n");
    let mut rows = Vec::new();
    for m in 2..=6 {
        let ctx = WittCtx::new(2, m)?;
        let r = ctx.ring();
        let image: Vec<String> = r.elements()?.filter(|a| witt::in_sharp_image(a, &ctx)).map(|a| a.to_string()).collect();
        let roots: Vec<String> = r.elements()?.filter(|a| a.pow(2).is_one()).map(|a| a.to_string()).collect();
        let minus = r.from_int(-1);
        let in_image = witt::in_sharp_image(&minus, &ctx);
        t += &format!("  Z/2^{m}: image {{{}}}; roots of t^2 = 1: {{{}}}; -1 = {minus} in image: {in_image}\n", image.join(", "), roots.join(", "));
        rows.push(json!({"M": m, "image": image, "roots_of_one": roots, "minus_one_in_image": in_image}));
    }
    Ok(Demo { text: t, json: json!({"rows": rows}) })
}

fn krull_rank2() -> Result<Demo> {
    let model = ValModel::standard(2)?;
    let bound = 20;
    let grid = valuation::grid(model.group(), bound);
    let sets = [("V", ValueSet::NonNegative), ("V_p", valuation::val_cic(&model)?), ("K", ValueSet::Whole)];
    let mut t = format!("value group Z^2 lex, t of value {}\n", model.t_val());
    let mut rows = Vec::new();
    for (name, set) in sets {
        let count = grid.iter().filter(|x| set.contains(x)).count();
        t += &format!("  {name}: {} ({count} of {} grid values with |xi_i| <= {bound})\n", set.describe(), grid.len());
        rows.push(json!({"ring": name, "values": set.describe(), "grid_count": count}));
    }
    for xi in [GroupElem::ints(&[0, -3]), GroupElem::ints(&[-1, 5])] {
        let rep = valuation::val_almost_integral(&xi, &model)?;
        t += &format!("  xi = {xi}: almost integral {}\n", rep.is_holds());
    }
    let rep = valuation::val_cic_report(&model, bound)?;
    t += &format!("V is strictly inside V_p, strictly inside K: {}\n", rep.details["strictly_between"]);
    Ok(Demo { text: t, json: json!({"sets": rows, "report": rep.to_json()}) })
}

fn mt2_audit() -> Result<Demo> {
    let mut t = String::new();
    let mut reports = Vec::new();
    for (desc, w) in [("Zp[p^(1/p^2)] p=3 M=4", "x"), ("Zp p=3 M=4", "3")] {
        let r = RingCtx::parse(desc)?;
        let w = r.parse_elem(w)?;
        let rep = closure::mt2_hypotheses_audit(&r, &w)?;
        t += &format!("A = {desc}, w = {w}\n");
        for key in ["nonzero_divisor", "p_in_w_pow_p_A", "semiperfect_residue", "integrally_closed"] {
            t += &format!("  {key}: {}\n", rep.details[key]);
        }
        t += &format!("  verdict: {:?}\n", rep.verdict);
        reports.push(rep.to_json());
    }
    Ok(Demo { text: t, json: json!({"audits": reports}) })
}

fn seq_str(s: &[RingElem]) -> String {
    s.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", ")
}
