//! The `tiltkit` command line: argument parsing, dispatch to the library,
//! and plain or JSON rendering. [`run`] returns the exit status together
//! with everything that would be written, so it can be tested in-process.

pub mod demo;
pub mod suite;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tiltkit::closure::{self, MonomialRing};
use tiltkit::tilt::{self, TiltElem};
use tiltkit::valuation::{self, ValModel, ValueGroup};
use tiltkit::witt::{self, WittCtx};
use tiltkit::{CheckReport, Error, Ring, RingCtx, RingElem, RingExt, Verdict};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "tiltkit", version, about = "Finite-precision tilts, sharp maps, Teichmuller lifts and closure checks")]
pub struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tilt elements: build, combine and inspect compatible p-power systems.
    Tilt {
        #[command(subcommand)]
        op: TiltOp,
    },
    /// The sharp map of a compatible system.
    Sharp(SeqArgs),
    /// Teichmuller lifts in W_M(F_q).
    Teich(TeichArgs),
    /// Closure-property checks.
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        #[command(flatten)]
        args: CheckArgs,
    },
    /// Complete integral closure of value-group models.
    Krull(KrullArgs),
    /// The completion of Z_(p) modeled by Z/p^M.
    Completion {
        #[arg(long)]
        p: u64,
        #[arg(long = "M")]
        m: u32,
    },
    /// Narrated walkthroughs.
    Demo {
        /// monoid-lemma, teichmuller, minus-one, krull-rank2 or mt2-audit.
        name: String,
    },
    /// The full acceptance suite.
    Suite {
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(clap::Args, Debug, Clone)]
pub struct SeqArgs {
    /// Ring descriptor, e.g. "Zp[p^(1/p^2)] p=3 M=4".
    #[arg(long)]
    pub ring: Option<String>,
    /// Comma-separated components a_0, a_1, ..., a_D.
    #[arg(long)]
    pub seq: Option<String>,
    /// A tilt element as JSON {"ctx", "seq", "prec"}.
    #[arg(long)]
    pub elem: Option<String>,
    /// Certified precision of the given sequence (defaults to M).
    #[arg(long)]
    pub prec: Option<u32>,
}

#[derive(Subcommand, Debug)]
pub enum TiltOp {
    /// Validate a compatible sequence and emit it as JSON.
    Lift(SeqArgs),
    /// Lift a Frobenius-compatible residue sequence by p-power limits.
    FromResidues(SeqArgs),
    Sharp(SeqArgs),
    Add(BinaryArgs),
    Mul(BinaryArgs),
    Frob(SeqArgs),
    Frobinv(SeqArgs),
    /// Search for distinct compatible systems with the same sharp.
    Injective(DepthArgs),
    /// Search for nonzero nilpotent tilt elements.
    Reduced(DepthArgs),
    /// Search for zero divisors among nonzero tilt elements.
    Domain(DepthArgs),
}

#[derive(clap::Args, Debug)]
pub struct BinaryArgs {
    #[command(flatten)]
    pub x: SeqArgs,
    /// Second operand components (same ring).
    #[arg(long)]
    pub seq2: Option<String>,
    /// Second operand as JSON.
    #[arg(long)]
    pub elem2: Option<String>,
    /// Target precision for addition.
    #[arg(long)]
    pub target: Option<u32>,
}

#[derive(clap::Args, Debug)]
pub struct DepthArgs {
    #[arg(long)]
    pub ring: String,
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
}

#[derive(clap::Args, Debug)]
pub struct TeichArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long = "M")]
    pub m: u32,
    /// Residue to lift; without it every residue is checked against sharp.
    #[arg(long)]
    pub a: Option<String>,
    /// Find the p-th root of this ring element inside the sharp image.
    #[arg(long)]
    pub root: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    AlmostIntegral,
    Integral,
    Proot,
    Semiperfect,
    Mt1,
    Mt2,
    Closure,
    Transfer,
}

#[derive(clap::Args, Debug)]
pub struct CheckArgs {
    #[arg(long)]
    pub ring: String,
    #[arg(long)]
    pub elem: Option<String>,
    #[arg(long)]
    pub uniformizer: Option<String>,
    /// Power bound (almost integrality) or degree bound (integrality).
    #[arg(long)]
    pub bound: Option<u64>,
    /// Overring B for the ideal transfer check.
    #[arg(long)]
    pub over: Option<String>,
    /// Comma-separated monomial generators of the ideal I of B.
    #[arg(long)]
    pub ideal: Option<String>,
}

#[derive(clap::Args, Debug)]
pub struct KrullArgs {
    /// `grid` verifies ranks 1 and 2 and Q on the value grid.
    #[arg(value_parser = ["grid"])]
    pub mode: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub rank: u32,
    /// Use Q as value group instead of Z^rank.
    #[arg(long)]
    pub rational: bool,
    #[arg(long, default_value_t = 20)]
    pub bound: i64,
    /// Decide almost integrality of this value, e.g. "(0,-3)".
    #[arg(long)]
    pub xi: Option<String>,
}

/// What a command printed and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code_for_error(e: &Error) -> i32 {
    match e {
        Error::TooLarge { .. } | Error::InsufficientDepth { .. } => EXIT_LIMIT,
        _ => EXIT_USAGE,
    }
}

pub fn exit_code_for_verdict(v: Verdict) -> i32 {
    match v {
        Verdict::Holds => EXIT_HOLDS,
        Verdict::FailsWithWitness => EXIT_FAILS,
        Verdict::InconclusiveAtBound => EXIT_INCONCLUSIVE,
    }
}

/// Plain-text rendering of a report.
pub fn render_report(r: &CheckReport) -> String {
    let mut out = format!("{}: {}\n", r.check, serde_json::to_value(r.verdict).unwrap().as_str().unwrap());
    if let Some(w) = &r.witness {
        out += &format!("  witness: {}\n", plain(w));
    }
    for (k, v) in &r.details {
        out += &format!("  {k}: {}\n", plain(v));
    }
    for (k, v) in &r.bounds {
        out += &format!("  bound {k}: {}\n", plain(v));
    }
    for s in &r.refs {
        out += &format!("  ref: {s}\n");
    }
    out
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).unwrap() + "\n"
}

/// Result of a command before rendering.
enum Output {
    Report(CheckReport),
    /// Plain text, JSON, exit code.
    Value(String, Value, i32),
}

fn report_out(json: bool, r: &CheckReport) -> (String, i32) {
    let text = if json { pretty(&r.to_json()) } else { render_report(r) };
    (text, exit_code_for_verdict(r.verdict))
}

/// Run `tiltkit` with `args` (program name first).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_HOLDS };
            let text = e.render().to_string();
            return if e.use_stderr() { Outcome { code, stdout: String::new(), stderr: text } } else { Outcome { code, stdout: text, stderr: String::new() } };
        }
    };
    let json = cli.json;
    match dispatch(cli.command) {
        Ok(Output::Report(r)) => {
            let (stdout, code) = report_out(json, &r);
            Outcome { code, stdout, stderr: String::new() }
        }
        Ok(Output::Value(text, v, code)) => Outcome { code, stdout: if json { pretty(&v) } else { text }, stderr: String::new() },
        Err(e) => {
            let code = exit_code_for_error(&e);
            let stdout = if json { pretty(&json!({"error": e.to_string(), "exit": code})) } else { String::new() };
            Outcome { code, stdout, stderr: format!("error: {e}\n") }
        }
    }
}

fn parse_ring(s: &str) -> tiltkit::Result<Ring> {
    RingCtx::parse(s)
}

/// A tilt element from `--elem` JSON or `--ring` with `--seq`.
fn tilt_operand(ring: &Option<String>, seq: &Option<String>, elem: &Option<String>, prec: Option<u32>) -> tiltkit::Result<TiltElem> {
    match (elem, ring, seq) {
        (Some(e), _, _) => {
            let v: Value = serde_json::from_str(e).map_err(|err| Error::Parse(format!("bad tilt element JSON: {err}")))?;
            TiltElem::from_json(&v)
        }
        (None, Some(r), Some(s)) => {
            let ctx = parse_ring(r)?;
            let seq = ctx.parse_seq(s)?;
            TiltElem::with_precision(&ctx, seq, prec.unwrap_or(ctx.precision()))
        }
        _ => Err(Error::Parse("give --elem, or --ring with --seq".into())),
    }
}

fn seq_operand(a: &SeqArgs) -> tiltkit::Result<TiltElem> {
    tilt_operand(&a.ring, &a.seq, &a.elem, a.prec)
}

fn tilt_value(x: &TiltElem) -> Output {
    let text = format!("({}) prec {}\n", x.seq().iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", "), x.prec());
    Output::Value(text, x.to_json(), EXIT_HOLDS)
}

fn sharp_value(x: &TiltElem) -> Output {
    let (s, prec) = tilt::sharp(x);
    Output::Value(format!("{s}\n"), json!({"sharp": s.to_string(), "coeffs": s.to_json(), "precision": prec, "ctx": x.ctx().descriptor()}), EXIT_HOLDS)
}

fn dispatch(cmd: Command) -> tiltkit::Result<Output> {
    match cmd {
        Command::Tilt { op } => dispatch_tilt(op),
        Command::Sharp(a) => Ok(sharp_value(&seq_operand(&a)?)),
        Command::Teich(a) => dispatch_teich(a),
        Command::Check { kind, args } => dispatch_check(kind, args).map(Output::Report),
        Command::Krull(a) => dispatch_krull(a),
        Command::Completion { p, m } => valuation::val_completion_check(p, m).map(Output::Report),
        Command::Demo { name } => {
            let d = demo::run_demo(&name)?;
            Ok(Output::Value(d.text, d.json, EXIT_HOLDS))
        }
        Command::Suite { seed } => {
            let s = suite::run_suite(seed);
            let code = if s.all_passed() { EXIT_HOLDS } else { EXIT_FAILS };
            Ok(Output::Value(s.render(), s.to_json(), code))
        }
    }
}

fn dispatch_tilt(op: TiltOp) -> tiltkit::Result<Output> {
    match op {
        TiltOp::Lift(a) => Ok(tilt_value(&seq_operand(&a)?)),
        TiltOp::FromResidues(a) => {
            let (Some(r), Some(s)) = (&a.ring, &a.seq) else { return Err(Error::Parse("give --ring and --seq (residues)".into())) };
            let ctx = parse_ring(r)?;
            let res = ctx.residue_ctx()?.parse_seq(s)?;
            Ok(tilt_value(&TiltElem::from_residues(&ctx, &res)?))
        }
        TiltOp::Sharp(a) => Ok(sharp_value(&seq_operand(&a)?)),
        TiltOp::Add(b) => {
            let (x, y) = binary(&b)?;
            let s = match b.target {
                Some(t) => tilt::tilt_add_to(&x, &y, t)?,
                None => tilt::tilt_add(&x, &y)?,
            };
            Ok(tilt_value(&s))
        }
        TiltOp::Mul(b) => {
            let (x, y) = binary(&b)?;
            Ok(tilt_value(&tilt::tilt_mul(&x, &y)?))
        }
        TiltOp::Frob(a) => Ok(tilt_value(&tilt::tilt_frobenius(&seq_operand(&a)?))),
        TiltOp::Frobinv(a) => Ok(tilt_value(&tilt::tilt_frobenius_inv(&seq_operand(&a)?)?)),
        TiltOp::Injective(d) => tilt::tilt_is_injective_sharp(&parse_ring(&d.ring)?, d.depth).map(Output::Report),
        TiltOp::Reduced(d) => tilt::tilt_reducedness_check(&parse_ring(&d.ring)?, d.depth).map(Output::Report),
        TiltOp::Domain(d) => tilt::tilt_domain_check(&parse_ring(&d.ring)?, d.depth).map(Output::Report),
    }
}

fn binary(b: &BinaryArgs) -> tiltkit::Result<(TiltElem, TiltElem)> {
    let x = seq_operand(&b.x)?;
    let y = tilt_operand(&b.x.ring, &b.seq2, &b.elem2, b.x.prec)?;
    Ok((x, y))
}

fn dispatch_teich(a: TeichArgs) -> tiltkit::Result<Output> {
    let ctx = WittCtx::new(a.q, a.m)?;
    if let Some(r) = &a.root {
        let elem = ctx.ring().parse_elem(r)?;
        let found = witt::unique_p_root_in_sharp_image(&elem, &ctx)?;
        return Ok(Output::Report(found.to_report(&ctx)));
    }
    match &a.a {
        Some(s) => {
            let res = ctx.residue().parse_elem(s)?;
            let trace = witt::teichmuller_trace(&res, &ctx)?;
            let w = trace.last().unwrap().clone();
            let text = format!("{w}\n");
            let v = json!({
                "a": res.to_string(),
                "teichmuller": w.to_string(),
                "coeffs": w.to_json(),
                "iterates": trace.iter().map(RingElem::to_string).collect::<Vec<_>>(),
                "ctx": ctx.ring().descriptor(),
                "defining_polynomial": ctx.defining_polynomial(),
            });
            Ok(Output::Value(text, v, EXIT_HOLDS))
        }
        None => witt::sharp_equals_teichmuller(&ctx).map(Output::Report),
    }
}

fn monomial_ring(a: &CheckArgs) -> tiltkit::Result<MonomialRing> {
    MonomialRing::parse(&a.ring, a.uniformizer.as_deref())
}

fn is_monomial_descriptor(s: &str) -> bool {
    s.trim_start().starts_with("Fp[") && !s.contains("]/")
}

fn dispatch_check(kind: CheckKind, a: CheckArgs) -> tiltkit::Result<CheckReport> {
    let elem = || a.elem.as_deref().ok_or_else(|| Error::Parse("missing --elem".into()));
    match kind {
        CheckKind::AlmostIntegral => {
            let r = monomial_ring(&a)?;
            let x = r.parse_elem(elem()?)?;
            closure::is_almost_integral(&x, &r, a.bound.unwrap_or(closure::DEFAULT_POWER_BOUND))
        }
        CheckKind::Integral => {
            let r = monomial_ring(&a)?;
            let x = r.parse_elem(elem()?)?;
            closure::is_integral(&x, &r, a.bound.unwrap_or(closure::DEFAULT_DEGREE_BOUND))
        }
        CheckKind::Proot => Ok(closure::is_p_root_closed(&monomial_ring(&a)?)),
        CheckKind::Closure => closure::closure_report(&monomial_ring(&a)?),
        CheckKind::Semiperfect => closure::is_semiperfect(&parse_ring(&a.ring)?),
        CheckKind::Mt1 if is_monomial_descriptor(&a.ring) => Ok(closure::mt1_conclusion_check(&monomial_ring(&a)?)),
        CheckKind::Mt1 => {
            let ctx = parse_ring(&a.ring)?;
            let w = mixed_uniformizer(&ctx, &a)?;
            closure::mt1_conclusion_check_mixed(&ctx, &w)
        }
        CheckKind::Mt2 => {
            let ctx = parse_ring(&a.ring)?;
            let w = mixed_uniformizer(&ctx, &a)?;
            closure::mt2_hypotheses_audit(&ctx, &w)
        }
        CheckKind::Transfer => {
            let r = monomial_ring(&a)?;
            let b = MonomialRing::parse(a.over.as_deref().ok_or_else(|| Error::Parse("missing --over".into()))?, None)?;
            let ideal = a.ideal.as_deref().ok_or_else(|| Error::Parse("missing --ideal".into()))?;
            let gens = ideal
                .split(',')
                .map(|m| {
                    let x = b.parse_elem(m)?;
                    match (x.is_monomial(), x.min_exponent()) {
                        (true, Some(e)) if e >= 0 => Ok(e as u64),
                        _ => Err(Error::BadElement(format!("ideal generator `{m}` must be a monomial of B"))),
                    }
                })
                .collect::<tiltkit::Result<Vec<_>>>()?;
            closure::ideal_transfer_check(&r, &b, &gens)
        }
    }
}

fn mixed_uniformizer(ctx: &Ring, a: &CheckArgs) -> tiltkit::Result<RingElem> {
    match &a.uniformizer {
        Some(u) => ctx.parse_elem(u),
        None => Ok(ctx.generator()),
    }
}

fn dispatch_krull(a: KrullArgs) -> tiltkit::Result<Output> {
    if a.mode.is_some() {
        let mut rows = Vec::new();
        let mut text = String::new();
        let mut ok = true;
        for model in [ValModel::standard(1)?, ValModel::standard(2)?, ValModel::rationals()] {
            let r = valuation::val_cic_report(&model, a.bound)?;
            ok &= r.is_holds();
            text += &render_report(&r);
            rows.push(r.to_json());
        }
        let code = if ok { EXIT_HOLDS } else { EXIT_FAILS };
        return Ok(Output::Value(text, json!({"bound": a.bound, "models": rows}), code));
    }
    let model = if a.rational { ValModel::rationals() } else { ValModel::standard(a.rank)? };
    match &a.xi {
        Some(s) => {
            let group: ValueGroup = model.group();
            valuation::val_almost_integral(&group.parse(s)?, &model).map(Output::Report)
        }
        None => valuation::val_cic_report(&model, a.bound).map(Output::Report),
    }
}
