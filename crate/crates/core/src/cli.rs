//! Command-line surface: argument parsing, dispatch to the solvers and
//! report assembly. Exit codes: 0 success, 1 domain or resource error,
//! 2 usage error.

use std::collections::HashSet;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::constants::{c3, kappa5, kappa_report, problem_data, C3Variant, CertifiedUpper, PiExponent, ProblemData};
use crate::decomposition::{build_a1, enumerate_box, Radius};
use crate::error::Error;
use crate::forms::{
    family_equivalence_test, inverse_witness, ns_inequality_solve, s_equivalence_test, twist_search, BinaryForm, EquivOutcome,
    FamilyCase, TwistVector,
};
use crate::interval::Ival;
use crate::number_field::{FieldConfig, FieldElement, NumberField};
use crate::rational::{parse_q, Q};
use crate::report::{elem, elems, error_document, ival, rat, render, Format, Report, Table};
use crate::s_arith::{delta_k, DeltaK, PrimeSelector, SContext, SUnitExponents};
use crate::sunit::solve_unit_equation;
use crate::thue_mahler::{
    canonicalize, classify_subsums, partition_classes, solve_classic, solve_family_direct, solve_family_factored, verify_family_solution,
    A1Cache, CanonicalRep, FamilySolution,
};

#[derive(Parser, Debug)]
#[command(name = "thue-mahler", version, about = "Exact solvers and constants for Thue–Mahler family equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Field configuration file (JSON: min_poly, basis, h_K, fundamental_units, trust_level)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Defining polynomial, constant term first (alternative to --config)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub poly: Option<String>,
    /// Rational primes below S, e.g. "2,3" or "5:0" for one prime above 5
    #[arg(long, global = true, default_value = "")]
    pub primes: String,
    #[arg(long, global = true, default_value = "1", allow_hyphen_values = true)]
    pub mu: String,
    /// Comma-separated field elements; coordinates in the power basis are joined by ':'
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alphas: Option<String>,
    /// Exponent or coordinate box, depending on the command
    #[serde(rename = "box")]
    #[arg(long = "box", global = true)]
    pub box_: Option<i64>,
    #[arg(long, global = true)]
    pub xy_box: Option<i64>,
    #[arg(long, global = true, env = "THUE_MAHLER_PRECISION", default_value_t = 128)]
    pub precision: u32,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
    #[serde(skip)]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 100_000_000)]
    pub cap: u128,
    /// Worker threads; results do not depend on it
    #[serde(skip)]
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// In verify mode configuration data marked trusted is refused
    #[arg(long, global = true, value_enum, default_value_t = Mode::Trust)]
    pub mode: Mode,
    /// Recorded in the header for replaying randomized property runs
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Trust,
    Verify,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum C3Arg {
    Paper,
    Alt,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum PiArg {
    R2,
    RSquared,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Direct,
    Factored,
    Both,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct KappaOpts {
    /// Height threshold H for the search behind δ_K
    #[arg(long, default_value = "1/10")]
    pub height: String,
    #[arg(long, value_enum, default_value_t = C3Arg::Paper)]
    pub c3_variant: C3Arg,
    #[arg(long, value_enum, default_value_t = PiArg::R2)]
    pub pi_exponent: PiArg,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Field invariants, units, class number and the primes of S
    Field,
    /// The counting constants c₃, κ₁ … κ₆ of a family problem
    Constants {
        #[command(flatten)]
        kappa: KappaOpts,
    },
    /// Integers with every |σγ| ≤ Q, against the counting bound
    EnumerateBox {
        #[arg(long)]
        bound: String,
    },
    /// The set A₁(m) of S-norm-m representatives
    A1 {
        #[arg(long)]
        m: String,
        #[command(flatten)]
        kappa: KappaOpts,
    },
    /// δ₁X₁ + ⋯ + δ_ℓX_ℓ = 1 over the S-unit exponent box
    SunitSolve {
        #[arg(long, allow_hyphen_values = true)]
        deltas: String,
    },
    /// Search the family equation with the direct and factored strategies
    SolveFamily {
        #[arg(long, value_enum, default_value_t = Strategy::Both)]
        strategy: Strategy,
        #[arg(long)]
        u_box: Option<i64>,
        #[arg(long)]
        v_box: Option<i64>,
        #[command(flatten)]
        kappa: KappaOpts,
    },
    /// Π(x − α_iy) = με over a coordinate box
    SolveClassic {
        /// Keep only gcd(xy, p₁⋯p_t) = 1 (over Q)
        #[arg(long)]
        coprime: bool,
    },
    /// Vanishing-subsum analysis of T for one solution
    ClassifySubsums {
        /// x,y,z,ε₁,ε₂,ε₃,ε
        #[arg(long, allow_hyphen_values = true)]
        solution: String,
        #[arg(long, default_value_t = 2)]
        i: usize,
        #[command(flatten)]
        kappa: KappaOpts,
    },
    /// Canonical representative of the S³-class of a solution
    Canonicalize {
        #[arg(long, allow_hyphen_values = true)]
        solution: String,
        #[command(flatten)]
        kappa: KappaOpts,
    },
    /// f_ε(x, y) = ±k p₁^{z₁}⋯p_t^{z_t} over twists ε
    TwistSearch {
        /// Coefficients a₀, …, a_n of f
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        k: String,
        /// Explicit twists (elements of Q(α)); otherwise the S-unit box
        #[arg(long, allow_hyphen_values = true)]
        eps: Option<String>,
    },
    /// S-equivalence of two forms, or of two twisted families
    Equiv {
        #[arg(long, allow_hyphen_values = true)]
        form: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        form2: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        eps: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        eps2: Option<String>,
        #[arg(long, default_value_t = 0)]
        unit_box: i64,
    },
    /// 0 < N_S(f(x, y)) ≤ m over a coordinate box
    NsSolve {
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long, default_value = "1")]
        m: String,
        #[arg(long)]
        nontrivial: bool,
    },
    /// Certified δ_K from an exhaustive height search
    DeltaK {
        #[arg(long, default_value = "1/10")]
        height: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Field => "field",
            Command::Constants { .. } => "constants",
            Command::EnumerateBox { .. } => "enumerate-box",
            Command::A1 { .. } => "a1",
            Command::SunitSolve { .. } => "sunit-solve",
            Command::SolveFamily { .. } => "solve-family",
            Command::SolveClassic { .. } => "solve-classic",
            Command::ClassifySubsums { .. } => "classify-subsums",
            Command::Canonicalize { .. } => "canonicalize",
            Command::TwistSearch { .. } => "twist-search",
            Command::Equiv { .. } => "equiv",
            Command::NsSolve { .. } => "ns-solve",
            Command::DeltaK { .. } => "delta-k",
        }
    }
}

/// Failures of a run: usage problems exit with 2, domain errors with 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_rational(s: &str, what: &str) -> CliResult<Q> {
    parse_q(s).ok_or_else(|| usage(format!("--{what}: not a rational number: {s:?}")))
}

fn parse_int(s: &str, what: &str) -> CliResult<BigInt> {
    s.trim().parse().map_err(|_| usage(format!("--{what}: not an integer: {s:?}")))
}

fn parse_elems(k: &NumberField, s: &str) -> CliResult<Vec<FieldElement>> {
    if s.trim().is_empty() {
        return Ok(vec![]);
    }
    Ok(s.split(',').map(|t| k.parse(t)).collect::<crate::Result<Vec<_>>>()?)
}

fn field_config(c: &Common) -> CliResult<FieldConfig> {
    let cfg = match (&c.config, &c.poly) {
        (Some(_), Some(_)) => return Err(usage("give either --config or --poly, not both")),
        (Some(p), None) => {
            let text = std::fs::read_to_string(p).map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str::<FieldConfig>(&text)
                .map_err(|e| CliError::Domain(Error::InvalidInput(format!("field config: {e}"))))?
        }
        (None, Some(p)) => FieldConfig {
            min_poly: p.split(',').map(|t| Value::String(t.trim().to_string())).collect(),
            ..Default::default()
        },
        (None, None) => return Err(usage("this command needs the field: pass --config PATH or --poly COEFFS")),
    };
    if c.mode == Mode::Verify && cfg.trusted() {
        return Err(Error::TrustViolation("the field config is marked trusted".into()).into());
    }
    Ok(cfg)
}

fn context(c: &Common, cfg: &FieldConfig) -> CliResult<SContext> {
    let k = Arc::new(NumberField::from_config(cfg)?);
    let sel = PrimeSelector::parse_list(&c.primes)?;
    Ok(SContext::new(k, &sel, c.precision)?)
}

fn exps_json(e: &SUnitExponents) -> Value {
    json!({ "torsion": e.torsion, "units": e.units, "primes": e.primes })
}

fn cu(x: &CertifiedUpper) -> Value {
    x.to_json()
}

struct Kappa {
    c3: Ival,
    kappa5: CertifiedUpper,
    delta: DeltaK,
}

fn kappa_setup(ctx: &SContext, o: &KappaOpts, cap: u128) -> CliResult<Kappa> {
    let h = parse_rational(&o.height, "height")?;
    let delta = delta_k(ctx.k(), &h, cap, ctx.prec)?;
    let c3v = c3(ctx.r, ctx.k().d, &delta.value, c3_variant(o));
    let k5 = kappa5(ctx, &c3v, pi_exponent(o));
    Ok(Kappa { c3: c3v, kappa5: k5, delta })
}

fn c3_variant(o: &KappaOpts) -> C3Variant {
    match o.c3_variant {
        C3Arg::Paper => C3Variant::Paper,
        C3Arg::Alt => C3Variant::Alt,
    }
}

fn pi_exponent(o: &KappaOpts) -> PiExponent {
    match o.pi_exponent {
        PiArg::R2 => PiExponent::R2,
        PiArg::RSquared => PiExponent::RSquared,
    }
}

fn delta_json(d: &DeltaK) -> Value {
    json!({
        "value": ival(&d.value),
        "threshold": rat(&d.threshold),
        "witness": d.witness.as_ref().map(elem),
        "enumerated": d.enumerated,
    })
}

fn family_problem(c: &Common, ctx: &SContext) -> CliResult<ProblemData> {
    let k = ctx.k();
    let mu = k.parse(&c.mu)?;
    let al = parse_elems(k, c.alphas.as_deref().ok_or_else(|| usage("--alphas is required"))?)?;
    let al: [FieldElement; 3] = al.try_into().map_err(|_| usage("--alphas needs exactly three elements"))?;
    Ok(problem_data(ctx, &mu, &al)?)
}

fn parse_solution(k: &NumberField, s: &str) -> CliResult<[FieldElement; 7]> {
    parse_elems(k, s)?.try_into().map_err(|_| usage("--solution needs seven elements x,y,z,ε₁,ε₂,ε₃,ε"))
}

fn solution_row(s: &FamilySolution, class: usize) -> Vec<String> {
    let mut v: Vec<String> = s.tuple().iter().map(|e| e.to_string()).collect();
    v.push(class.to_string());
    v
}

fn solution_json(s: &FamilySolution, class: usize) -> Value {
    json!({
        "x": elem(&s.x), "y": elem(&s.y), "z": elem(&s.z),
        "eps1": elem(&s.eps_i[0]), "eps2": elem(&s.eps_i[1]), "eps3": elem(&s.eps_i[2]),
        "eps": elem(&s.eps), "class_id": class,
    })
}

fn family_table(sols: &[FamilySolution], ids: &[usize]) -> Table {
    let mut t = Table::new(&["x", "y", "z", "eps1", "eps2", "eps3", "eps", "class_id"]);
    for (s, &c) in sols.iter().zip(ids) {
        t.push(solution_row(s, c));
    }
    t
}

fn rep_json(k: &NumberField, r: &CanonicalRep) -> Value {
    json!({
        "x0": elem(&r.x0), "y0": elem(&r.y0), "eps0": elem(&r.eps0), "u2": elem(&r.u2), "u3": elem(&r.u3),
        "tuple": elems(&r.tuple(k)),
        "key": {
            "k_prime": r.key.k_p.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "gamma": elems(&r.key.gamma), "u": elems(&r.key.u), "v": elems(&r.key.v),
        },
        "w": elems(&r.w), "eta": elem(&r.eta), "eta_tilde": elem(&r.eta_t),
    })
}

/// Run a parsed invocation.
pub fn execute(cli: &Cli) -> CliResult<Report> {
    let c = &cli.common;
    let mut config = serde_json::to_value(c).expect("serializable");
    config["args"] = serde_json::to_value(&cli.command).expect("serializable");
    let needs_field = !matches!(cli.command, Command::TwistSearch { .. });
    let cfg = if needs_field { Some(field_config(c)?) } else { None };
    config["field"] = serde_json::to_value(&cfg).expect("serializable");
    let command = cli.command.name().to_string();
    let mut table = None;
    let result = match &cli.command {
        Command::Field => {
            let ctx = context(c, cfg.as_ref().unwrap())?;
            let k = ctx.k();
            let ud = &ctx.unit_data;
            let primes: Vec<Value> = ctx
                .primes
                .iter()
                .map(|sp| {
                    json!({
                        "p": sp.ideal.p, "e": sp.ideal.e, "f": sp.ideal.f, "index": sp.ideal.index,
                        "norm": sp.ideal.norm().to_string(), "generator": elem(&sp.generator), "step": sp.step,
                    })
                })
                .collect();
            json!({
                "degree": k.d, "r1": k.r1, "r2": k.r2,
                "discriminant": k.disc.to_string(),
                "integral_basis": elems(&k.basis),
                "unit_rank": ctx.r, "w": ud.w, "zeta": elem(&ud.zeta),
                "fundamental_units": elems(&ud.fundamental_units),
                "regulator": ival(&ud.regulator),
                "h_K": ud.h_k, "h_K_provenance": ud.h_k_provenance.as_str(),
                "theta": ival(&k.theta(ctx.prec)),
                "s_primes": primes, "t": ctx.t, "s": ctx.s, "nu": ctx.nu.to_string(),
            })
        }
        Command::Constants { kappa } => {
            let ctx = context(c, cfg.as_ref().unwrap())?;
            let pd = family_problem(c, &ctx)?;
            let kp = kappa_setup(&ctx, kappa, c.cap)?;
            let rep = kappa_report(&ctx, &pd, &kp.delta, c3_variant(kappa), pi_exponent(kappa))?;
            let mut v = rep.to_json();
            v["q"] = json!(pd.q.to_string());
            v["k"] = rat(&pd.k);
            v["delta_K"] = delta_json(&kp.delta);
            v
        }
        Command::EnumerateBox { bound } => {
            let ctx_k = Arc::new(NumberField::from_config(cfg.as_ref().unwrap())?);
            let q = parse_rational(bound, "bound")?;
            let e = enumerate_box(&ctx_k, &Radius::Rational(q.clone()), c.cap, c.precision)?;
            let mut t = Table::new(&["gamma"]);
            for g in &e.elements {
                t.push(vec![g.to_string()]);
            }
            table = Some(t);
            json!({
                "bound": rat(&q), "count": e.elements.len(), "count_bound": ival(&e.bound),
                "within_bound": Q::from_integer(e.elements.len().into()) <= e.bound.hi,
                "elements": elems(&e.elements),
            })
        }
        Command::A1 { m, kappa } => {
            let ctx = context(c, cfg.as_ref().unwrap())?;
            let m = parse_int(m, "m")?;
            let kp = kappa_setup(&ctx, kappa, c.cap)?;
            let a = build_a1(&ctx, &m, &kp.c3, &kp.kappa5, c.cap)?;
            let mut t = Table::new(&["gamma"]);
            for g in &a.gammas {
                t.push(vec![g.to_string()]);
            }
            table = Some(t);
            json!({
                "m": m.to_string(), "count": a.gammas.len(), "kappa5": cu(&kp.kappa5), "kappa5_m": cu(&a.kappa5m),
                "within_bound": a.kappa5m.admits(&BigInt::from(a.gammas.len())),
                "gammas": elems(&a.gammas),
            })
        }
        Command::SunitSolve { deltas } => {
            let ctx = context(c, cfg.as_ref().unwrap())?;
            let ds = parse_elems(ctx.k(), deltas)?;
            if ds.is_empty() {
                return Err(usage("--deltas needs at least one element"));
            }
            let b = c.box_.unwrap_or(10);
            let r = solve_unit_equation(&ctx, &ds, b, c.cap)?;
            let header: Vec<String> = (1..=ds.len()).map(|i| format!("x{i}")).collect();
            let mut t = Table { header, rows: vec![] };
            for s in &r.solutions {
                t.push(s.xs.iter().map(|u| u.value.to_string()).collect());
            }
            table = Some(t);
            let sols: Vec<Value> = r
                .solutions
                .iter()
                .map(|s| json!({ "values": s.xs.iter().map(|u| elem(&u.value)).collect::<Vec<_>>(),
                                 "exponents": s.xs.iter().map(|u| exps_json(&u.exps)).collect::<Vec<_>>() }))
                .collect();
            json!({
                "count": r.solutions.len(), "degenerate": r.degenerate, "bound": cu(&r.bound),
                "searched": r.searched.to_string(), "box": b, "solutions": sols,
            })
        }
        Command::SolveFamily { strategy, u_box, v_box, kappa } => {
            let ctx = context(c, cfg.as_ref().unwrap())?;
            let pd = family_problem(c, &ctx)?;
            let (xy, eb) = (c.xy_box.unwrap_or(2), c.box_.unwrap_or(1));
            let kp = kappa_setup(&ctx, kappa, c.cap)?;
            let rep = kappa_report(&ctx, &pd, &kp.delta, c3_variant(kappa), pi_exponent(kappa))?;
            let mut out = serde_json::Map::new();
            let want_direct = *strategy != Strategy::Factored;
            let want_factored = *strategy != Strategy::Direct;
            let direct = if want_direct { Some(solve_family_direct(&ctx, &pd, xy, eb, c.cap)?) } else { None };
            let factored = if want_factored {
                let a1 = A1Cache::new(&ctx, &pd.m, &kp.c3, &kp.kappa5, c.cap)?;
                let f = solve_family_factored(&ctx, &pd, &a1, u_box.unwrap_or(eb), v_box.unwrap_or(eb), c.cap)?;
                if let Some(d) = &direct {
                    out.insert("cross_check".into(), cross_check(&ctx, &pd, &a1, d, &f, u_box.unwrap_or(eb), v_box.unwrap_or(eb), c.cap)?);
                }
                Some(f)
            } else {
                None
            };
            let primary = direct.as_ref().or(factored.as_ref()).unwrap();
            let (ids, n) = partition_classes(&ctx, primary)?;
            table = Some(family_table(primary, &ids));
            let within = rep.kappa1.admits(&BigInt::from(n));
            out.insert("strategy".into(), json!(if want_direct { "direct" } else { "factored" }));
            out.insert("count".into(), json!(primary.len()));
            out.insert("classes".into(), json!(n));
            out.insert("kappa1".into(), cu(&rep.kappa1));
            out.insert("classes_within_kappa1".into(), json!(within));
            if let (Some(_), Some(f)) = (&direct, &factored) {
                out.insert("factored_count".into(), json!(f.len()));
            }
            out.insert("solutions".into(), Value::Array(primary.iter().zip(&ids).map(|(s, &i)| solution_json(s, i)).collect()));
            Value::Object(out)
        }
        Command::SolveClassic { coprime } => {
            let ctx = context(c, cfg.as_ref().unwrap())?;
            let k = ctx.k();
            let mu = k.parse(&c.mu)?;
            let al = parse_elems(k, c.alphas.as_deref().ok_or_else(|| usage("--alphas is required"))?)?;
            let r = solve_classic(&ctx, &al, &mu, c.xy_box.unwrap_or(6), *coprime, c.cap)?;
            let mut t = Table::new(&["x", "y", "eps", "class_id"]);
            for s in &r.solutions {
                t.push(vec![s.x.to_string(), s.y.to_string(), s.eps.to_string(), s.class.to_string()]);
            }
            table = Some(t);
            json!({
                "count": r.solutions.len(), "classes": r.classes, "warning": r.warning,
                "solutions": r.solutions.iter().map(|s| json!({"x": elem(&s.x), "y": elem(&s.y), "eps": elem(&s.eps), "class_id": s.class})).collect::<Vec<_>>(),
            })
        }
        Command::ClassifySubsums { solution, i, kappa } => {
            let ctx = context(c, cfg.as_ref().unwrap())?;
            let k = ctx.k();
            let pd = family_problem(c, &ctx)?;
            let sol = verify_family_solution(&ctx, &pd, &parse_solution(k, solution)?)?;
            if sol.trivial {
                return Err(Error::Precondition("the subsum analysis needs a nontrivial solution".into()).into());
            }
            let kp = kappa_setup(&ctx, kappa, c.cap)?;
            let a1 = A1Cache::new(&ctx, &pd.m, &kp.c3, &kp.kappa5, c.cap)?;
            let rep = canonicalize(&ctx, &pd, &sol, &a1)?;
            let cert = classify_subsums(&ctx, &pd, &sol, *i, Some((&rep.key.gamma, &rep.w)))?;
            json!({
                "case": cert.case.as_str(),
                "permutation": cert.perm.iter().map(|j| j + 1).collect::<Vec<_>>(),
                "sign": cert.sign,
                "terms": cert.terms.iter().map(|t| json!({"sign": t.sign, "beta": t.b + 1, "alpha_tilde": t.a + 1, "value": elem(&t.value)})).collect::<Vec<_>>(),
                "vanishing": cert.vanishing,
                "relations": cert.relations.iter().map(|r| json!({"deltas": elems(&r.deltas), "xs": elems(&r.xs)})).collect::<Vec<_>>(),
            })
        }
        Command::Canonicalize { solution, kappa } => {
            let ctx = context(c, cfg.as_ref().unwrap())?;
            let k = ctx.k();
            let pd = family_problem(c, &ctx)?;
            let sol = verify_family_solution(&ctx, &pd, &parse_solution(k, solution)?)?;
            let kp = kappa_setup(&ctx, kappa, c.cap)?;
            let a1 = A1Cache::new(&ctx, &pd.m, &kp.c3, &kp.kappa5, c.cap)?;
            let rep = canonicalize(&ctx, &pd, &sol, &a1)?;
            let rep_sol = verify_family_solution(&ctx, &pd, &rep.tuple(k))?;
            let mut v = rep_json(k, &rep);
            v["s3_dependence_witness"] = match crate::thue_mahler::s3_dependence_test(&ctx, &sol, &rep_sol)? {
                Some(l) => elems(&l),
                None => return Err(Error::Inconsistent("canonical representative is not S³-dependent on the input".into()).into()),
            };
            v
        }
        Command::TwistSearch { form, k: kv, eps } => {
            let f = BinaryForm::parse(form)?;
            let kv = parse_int(kv, "k")?;
            let list = match eps {
                Some(s) => {
                    let (field, _) = f.root_field()?;
                    Some(parse_elems(&field, s)?)
                }
                None => None,
            };
            let primes: Vec<u64> = if c.primes.trim().is_empty() {
                vec![]
            } else {
                c.primes.split(',').map(|p| p.trim().parse().map_err(|_| usage(format!("bad prime {p:?}")))).collect::<CliResult<_>>()?
            };
            let r = twist_search(&f, &kv, &primes, list, c.box_.unwrap_or(1), c.xy_box.unwrap_or(10), c.precision, c.cap)?;
            let mut t = Table::new(&["x", "y", "eps", "sign", "z", "class_id"]);
            for s in &r.solutions {
                let z: Vec<String> = s.z.iter().map(|e| e.to_string()).collect();
                t.push(vec![s.x.to_string(), s.y.to_string(), s.eps.to_string(), s.sign.to_string(), z.join(" "), s.class.to_string()]);
            }
            table = Some(t);
            json!({
                "twists": r.twists,
                "rejected": r.rejected.iter().map(|(e, why)| json!({"eps": elem(e), "reason": why})).collect::<Vec<_>>(),
                "count": r.solutions.len(), "classes": r.classes, "max_class_size": r.max_multiplicity, "class_size_bound": 4,
                "solutions": r.solutions.iter().map(|s| json!({
                    "x": s.x.to_string(), "y": s.y.to_string(), "eps": elem(&s.eps), "eps_exponents": exps_json(&s.eps_exps),
                    "sign": s.sign, "z": s.z, "class_id": s.class,
                })).collect::<Vec<_>>(),
            })
        }
        Command::Equiv { form, form2, eps, eps2, unit_box } => {
            let ctx = context(c, cfg.as_ref().unwrap())?;
            let k = ctx.k();
            match (form, form2, eps, eps2) {
                (Some(f), Some(g), None, None) => {
                    let (f, g) = (BinaryForm::parse(f)?.lift(k), BinaryForm::parse(g)?.lift(k));
                    match s_equivalence_test(&ctx, &f, &g, c.box_.unwrap_or(1), *unit_box, c.cap)? {
                        EquivOutcome::Equivalent(w) => json!({
                            "outcome": "equivalent",
                            "witness": { "alpha": elem(&w.m[0]), "beta": elem(&w.m[1]), "gamma": elem(&w.m[2]), "delta": elem(&w.m[3]), "eta": elem(&w.eta) },
                            "inverse_verified": inverse_witness(&ctx, &f, &g, &w).is_some(),
                        }),
                        EquivOutcome::NotFoundWithinBox { tried } => json!({ "outcome": "not-found-within-box", "tried": tried.to_string() }),
                    }
                }
                (None, None, Some(e1), Some(e2)) => {
                    let al = parse_elems(k, c.alphas.as_deref().ok_or_else(|| usage("--alphas is required"))?)?;
                    let t1 = TwistVector::new(&ctx, &al, parse_elems(k, e1)?)?;
                    let t2 = TwistVector::new(&ctx, &al, parse_elems(k, e2)?)?;
                    let r = family_equivalence_test(&ctx, &al, &t1, &t2)?;
                    let mut v = json!({
                        "antidiagonal_matchings_checked": r.antidiagonal_matchings_checked,
                        "triangular_matchings_checked": r.triangular_matchings_checked,
                    });
                    match &r.witness {
                        Some((case, perm, w)) => {
                            v["outcome"] = json!("equivalent");
                            v["case"] = json!(match case { FamilyCase::Triangular => "gamma-zero", FamilyCase::AntiDiagonal => "antidiagonal" });
                            v["matching"] = json!(perm.iter().map(|j| j + 1).collect::<Vec<_>>());
                            v["witness"] = json!({ "alpha": elem(&w.m[0]), "beta": elem(&w.m[1]), "gamma": elem(&w.m[2]), "delta": elem(&w.m[3]), "eta": elem(&w.eta) });
                        }
                        None => v["outcome"] = json!("inequivalent-in-structural-cases"),
                    }
                    v
                }
                _ => return Err(usage("equiv needs either --form and --form2, or --alphas with --eps and --eps2")),
            }
        }
        Command::NsSolve { form, m, nontrivial } => {
            let ctx = context(c, cfg.as_ref().unwrap())?;
            let f = BinaryForm::parse(form)?;
            let m = parse_int(m, "m")?;
            let sols = ns_inequality_solve(&ctx, &f, &m, c.xy_box.unwrap_or(10), *nontrivial, c.cap)?;
            let mut t = Table::new(&["x", "y", "value", "ns", "class_id"]);
            for s in &sols {
                t.push(vec![s.x.to_string(), s.y.to_string(), s.value.to_string(), s.ns.to_string(), s.class.to_string()]);
            }
            table = Some(t);
            let classes = sols.iter().map(|s| s.class + 1).max().unwrap_or(0);
            json!({
                "count": sols.len(), "classes": classes,
                "solutions": sols.iter().map(|s| json!({"x": elem(&s.x), "y": elem(&s.y), "value": elem(&s.value), "ns": s.ns.to_string(), "class_id": s.class})).collect::<Vec<_>>(),
            })
        }
        Command::DeltaK { height } => {
            let k = NumberField::from_config(cfg.as_ref().unwrap())?;
            let h = parse_rational(height, "height")?;
            let d = delta_k(&k, &h, c.cap, c.precision)?;
            delta_json(&d)
        }
    };
    Ok(Report { command, config, result, table })
}

/// Canonicalize every direct solution and look its representative up among
/// the factored ones whenever the representative lies in the factored boxes.
#[allow(clippy::too_many_arguments)]
fn cross_check(
    ctx: &SContext,
    pd: &ProblemData,
    a1: &A1Cache,
    direct: &[FamilySolution],
    factored: &[FamilySolution],
    u_box: i64,
    v_box: i64,
    cap: u128,
) -> crate::Result<Value> {
    let k = ctx.k();
    let uu: HashSet<FieldElement> = crate::sunit::sunits_in_box(ctx, u_box, cap)?.into_iter().map(|u| u.value).collect();
    let vv: HashSet<FieldElement> = crate::sunit::sunits_in_box(ctx, v_box, cap)?.into_iter().map(|u| u.value).collect();
    let have: HashSet<[FieldElement; 7]> = factored.iter().map(|f| f.tuple()).collect();
    let outcomes: Vec<crate::Result<(bool, bool)>> = direct
        .par_iter()
        .map(|s| {
            let rep = canonicalize(ctx, pd, s, a1)?;
            let comparable = uu.contains(&rep.u2) && uu.contains(&rep.u3) && rep.key.v.iter().all(|v| vv.contains(v));
            Ok((comparable, comparable && have.contains(&rep.tuple(k))))
        })
        .collect();
    let (mut comparable, mut found) = (0usize, 0usize);
    for o in outcomes {
        let (c, f) = o?;
        comparable += c as usize;
        found += f as usize;
    }
    Ok(json!({
        "canonicalized": direct.len(),
        "comparable": comparable,
        "found_in_factored": found,
        "agree": comparable == found,
    }))
}

/// Parse, execute and write the report; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.common.workers.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start workers: {e}");
            return 1;
        }
    };
    let format = match cli.common.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    let outcome = pool.install(|| execute(&cli));
    let (bytes, code) = match outcome {
        Ok(r) => match render(&r, format) {
            Ok(b) => (b, 0),
            Err(e) => (error_bytes(&cli, &e), 1),
        },
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}\n\nFor more information, try '--help'.");
            return 2;
        }
        Err(CliError::Domain(e)) => (error_bytes(&cli, &e), 1),
    };
    let written = match &cli.common.out {
        Some(p) => std::fs::write(p, &bytes),
        None => std::io::stdout().write_all(&bytes),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write the report: {e}");
        return 1;
    }
    code
}

fn error_bytes(cli: &Cli, e: &Error) -> Vec<u8> {
    let mut config = serde_json::to_value(&cli.common).expect("serializable");
    config["args"] = serde_json::to_value(&cli.command).expect("serializable");
    let mut s = serde_json::to_string_pretty(&error_document(cli.command.name(), &config, e)).expect("serializable");
    s.push('\n');
    s.into_bytes()
}
