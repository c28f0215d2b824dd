//! `fdcalc`: exact difference calculus on finite presheaf categories.
//!
//! Every input is a JSON file (`-` reads stdin) and every result goes to
//! stdout as JSON. Exit status is 0 when everything checked holds, 1 when a
//! check fails or an input is rejected, 2 on a usage error.

use std::io::{Read, Write};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fdcalc::chain::{check_gamma_laws, NaturalityInputs, TransExpr};
use fdcalc::fincat::{FinCategory, Obj};
use fdcalc::funcalc::{core, delta_a, higher_delta, higher_delta_iterated, jacobian, tense_certify, FunctorExpr};
use fdcalc::json::{
    category_from_json, category_to_json, certificate_to_json, expr_from_json, expr_to_json, nat_from_json, nat_to_json,
    parse_str, presheaf_from_json, presheaf_to_json, profunctor_from_json, profunctor_to_json, render,
    sequence_from_json, sequence_to_json, subobject_from_json, subobject_to_json,
};
use fdcalc::newton::{check_counit_iso, check_unit_iso, delta_star, NewtonData};
use fdcalc::presheaf::Presheaf;
use fdcalc::prof::{compose, left_hom, right_hom, tensor_presheaf};
use fdcalc::random::Bounds;
use fdcalc::suites::{run_suite, SuiteOptions, SuiteReport, SUITES};

mod report;

#[derive(Parser)]
#[command(name = "fdcalc", version, about = "Exact difference calculus for functors between presheaf categories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Category,
    Presheaf,
    Nat,
    Subobject,
    Profunctor,
    Sequence,
    Functor,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    /// `Q ⦸ R`, right adjoint to `− ⊗ Q`
    Left,
    /// `R ⊘ P`, right adjoint to `P ⊗ −`
    Right,
}

#[derive(Clone, Copy, ValueEnum)]
enum NewtonCheck {
    Unit,
    Counit,
    Idempotent,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a value and print its canonical form.
    Validate {
        #[arg(value_enum)]
        kind: Kind,
        file: String,
    },
    /// The composite `Q ⊗ P` of profunctors `P: A ⇸ B`, `Q: B ⇸ C`.
    Compose {
        #[arg(long)]
        q: String,
        #[arg(long)]
        p: String,
    },
    /// `P ⊗ Φ` for a profunctor `P: A ⇸ B` and a presheaf `Φ` on `A`.
    Tensor {
        #[arg(long)]
        p: String,
        #[arg(long)]
        at: String,
    },
    /// A closed structure: `--side left Q R` gives `Q ⦸ R`, `--side right R P` gives `R ⊘ P`.
    Hom {
        #[arg(long, value_enum)]
        side: Side,
        first: String,
        second: String,
    },
    /// The core profunctor of a functor: its values on representables.
    Core {
        #[arg(long)]
        functor: String,
    },
    /// The partial difference `Δ_A[F](Φ)`.
    Diff {
        #[arg(long)]
        functor: String,
        #[arg(long)]
        at: String,
        #[arg(long)]
        object: String,
    },
    /// The Jacobian profunctor `∂F(Φ)`.
    Jacobian {
        #[arg(long)]
        functor: String,
        #[arg(long)]
        at: String,
    },
    /// A higher difference along a comma separated sequence of objects.
    HigherDiff {
        #[arg(long)]
        functor: String,
        #[arg(long)]
        at: String,
        #[arg(long, value_delimiter = ',', required = true)]
        sequence: Vec<String>,
        /// take differences one at a time instead of reading off new elements
        #[arg(long)]
        iterated: bool,
    },
    /// The Newton series of a functor up to an arity.
    Newton {
        #[arg(long)]
        functor: String,
        #[arg(long)]
        max_arity: usize,
        #[arg(long, value_enum)]
        check: Option<NewtonCheck>,
        /// extra presheaf to test the counit at
        #[arg(long)]
        at: Option<String>,
    },
    /// Run verification suites (`all` runs every suite).
    Verify {
        suites: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 3)]
        max_objects: usize,
        #[arg(long, default_value_t = 3)]
        max_elems: usize,
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
        #[arg(long)]
        cases: Option<usize>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// chain-rule on given functors instead of random ones
        #[arg(long = "F")]
        f: Option<String>,
        #[arg(long = "G")]
        g: Option<String>,
        #[arg(long = "H")]
        h: Option<String>,
        #[arg(long)]
        at: Option<String>,
    },
    /// Render saved `verify --format json` output as text.
    Report { file: String },
}

/// How a command ended when it did not simply succeed.
enum Failure {
    Usage(String),
    Failed(String),
}

impl From<fdcalc::Error> for Failure {
    fn from(e: fdcalc::Error) -> Failure {
        Failure::Failed(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Failed(format!("stdin: {}", e)))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Failed(format!("{}: {}", path, e)))
    }
}

fn load(path: &str) -> Result<Value, Failure> {
    parse_str(&read_input(path)?).map_err(|e| Failure::Failed(format!("{}: {}", path, e)))
}

fn located<T>(path: &str, r: fdcalc::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Failed(format!("{}: {}", path, e)))
}

fn functor(path: &str) -> Result<FunctorExpr, Failure> {
    located(path, expr_from_json(&load(path)?))
}

fn presheaf(path: &str) -> Result<Arc<Presheaf>, Failure> {
    located(path, presheaf_from_json(&load(path)?))
}

fn object(c: &FinCategory, name: &str) -> Result<Obj, Failure> {
    c.find_object(name).map_err(|e| Failure::Failed(e.to_string()))
}

fn emit(v: &Value) {
    out(&format!("{}\n", render(v)));
}

/// Writes to stdout; a closed pipe is not an error worth a panic.
fn out(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn certificate(f: &FunctorExpr) -> Value {
    match tense_certify(f) {
        Ok(c) => json!({"tense": true, "derivation": certificate_to_json(&c)}),
        Err(e) => json!({"tense": false, "reason": e.to_string()}),
    }
}

fn validate(kind: Kind, file: &str) -> Outcome {
    let v = load(file)?;
    let canon = located(
        file,
        match kind {
            Kind::Category => category_from_json(&v).map(|c| category_to_json(&c)),
            Kind::Presheaf => presheaf_from_json(&v).map(|p| presheaf_to_json(&p)),
            Kind::Nat => nat_from_json(&v).map(|t| nat_to_json(&t)),
            Kind::Subobject => subobject_from_json(&v).map(|s| subobject_to_json(&s)),
            Kind::Profunctor => profunctor_from_json(&v).map(|p| profunctor_to_json(&p)),
            Kind::Sequence => sequence_from_json(&v).map(|s| sequence_to_json(&s)),
            Kind::Functor => expr_from_json(&v).map(|f| expr_to_json(&f)),
        },
    )?;
    emit(&canon);
    Ok(true)
}

fn witnesses(data: &NewtonData) -> Vec<Value> {
    let (gen, prof) = (data.gen(), data.sequence.prof());
    let cod = data.source.cod();
    let mut out = Vec::new();
    for s in gen.objects() {
        let at = &data.deltas[s].evaluation.value;
        for b in cod.objects() {
            for (k, cell) in prof.cell(s, b).iter().enumerate() {
                out.push(json!({
                    "sequence": gen.object_name(s),
                    "target": cod.object_name(b),
                    "cell": cell,
                    "witness": at.label(b, data.witness(s, b, k)),
                }));
            }
        }
    }
    out
}

fn newton(path: &str, max_arity: usize, check: Option<NewtonCheck>, at: Option<&str>) -> Outcome {
    let f = functor(path)?;
    let data = delta_star(&f, max_arity)?;
    let mut out = json!({
        "maxArity": max_arity,
        "cells": data.arity_profile(),
        "sequence": sequence_to_json(&data.sequence),
        "witnesses": witnesses(&data),
    });
    let mut ok = true;
    match check {
        None => {}
        Some(NewtonCheck::Unit) => {
            let s = match &f {
                FunctorExpr::AnalyticSoft(s) => s.clone(),
                _ => data.sequence.clone(),
            };
            let r = check_unit_iso(&s);
            ok = r.iso;
            let cells: Vec<Value> = r
                .cells
                .iter()
                .map(|c| json!({"sequence": c.sequence, "target": c.target, "expected": c.expected, "found": c.found}))
                .collect();
            out["unit"] = json!({"iso": r.iso, "cells": cells, "failure": r.failure});
        }
        Some(c) => {
            let dom = f.dom();
            let mut tests = vec![Arc::new(Presheaf::terminal(dom.clone()))];
            for a in dom.objects() {
                tests.push(Arc::new(Presheaf::representable(dom, a)?));
            }
            if let Some(p) = at {
                tests.push(presheaf(p)?);
            }
            let r = check_counit_iso(&f, max_arity, &tests);
            if let Some(msg) = &r.failure {
                return Err(Failure::Failed(msg.clone()));
            }
            let kinds: Vec<&str> = r.kinds.iter().map(|k| k.name()).collect();
            out["counit"] = json!({"iso": r.all_iso(), "kinds": kinds});
            out["idempotent"] = json!(r.idempotent);
            // a non-invertible counit is information, not a failure
            if let NewtonCheck::Idempotent = c {
                ok = r.idempotent;
            }
        }
    }
    emit(&out);
    Ok(ok)
}

fn seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("FDCALC_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("FDCALC_SEED is not an unsigned integer: {}", v))),
        Err(_) => Ok(1),
    }
}

fn print_reports(reports: &[SuiteReport], format: Format) {
    match format {
        Format::Text => out(&report::render_all(reports)),
        Format::Json => emit(&report::to_json(reports)),
    }
}

fn chain_rule_on(f: &str, g: &str, h: Option<&str>, at: &str, format: Format) -> Outcome {
    let (f, g) = (functor(f)?, functor(g)?);
    let h = match h {
        Some(p) => functor(p)?,
        None => FunctorExpr::identity(g.cod()),
    };
    let phi = presheaf(at)?;
    let inputs = NaturalityInputs {
        maps: vec![fdcalc::presheaf::NatTrans::identity(&phi)],
        f_trans: vec![TransExpr::Identity(f.clone()), TransExpr::Inl(f.clone(), f.clone())],
        g_trans: vec![TransExpr::Identity(g.clone()), TransExpr::Inr(g.clone(), g.clone())],
    };
    let laws = check_gamma_laws(&f, &g, &h, &phi, &inputs);
    let checks: Vec<Value> = laws
        .checks
        .iter()
        .map(|c| json!({"law": c.law, "holds": c.holds, "witness": c.witness}))
        .collect();
    let passed = laws.all_hold();
    match format {
        Format::Json => emit(&json!({"suite": "chain-rule", "passed": passed, "checks": checks})),
        Format::Text => {
            let mut text = String::new();
            for c in &laws.checks {
                text.push_str(&format!("  {}  {}\n", if c.holds { "PASS" } else { "FAIL" }, c.law));
                if let Some(w) = &c.witness {
                    text.push_str(&format!("        {}\n", w));
                }
            }
            text.push_str(&format!("result  {}\n", if passed { "PASS" } else { "FAIL" }));
            out(&text);
        }
    }
    Ok(passed)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { kind, file } => validate(kind, &file),
        Command::Compose { q, p } => {
            let (qv, pv) = (located(&q, profunctor_from_json(&load(&q)?))?, located(&p, profunctor_from_json(&load(&p)?))?);
            emit(&profunctor_to_json(&compose(&qv, &pv)?.value));
            Ok(true)
        }
        Command::Tensor { p, at } => {
            let pv = located(&p, profunctor_from_json(&load(&p)?))?;
            emit(&presheaf_to_json(&tensor_presheaf(&pv, &*presheaf(&at)?)?.value));
            Ok(true)
        }
        Command::Hom { side, first, second } => {
            let x = located(&first, profunctor_from_json(&load(&first)?))?;
            let y = located(&second, profunctor_from_json(&load(&second)?))?;
            let h = match side {
                Side::Left => left_hom(&x, &y)?,
                Side::Right => right_hom(&x, &y)?,
            };
            emit(&profunctor_to_json(&h.value));
            Ok(true)
        }
        Command::Core { functor: path } => {
            let f = functor(&path)?;
            emit(&profunctor_to_json(&core(&f)?.value));
            Ok(true)
        }
        Command::Diff { functor: path, at, object: name } => {
            let (f, phi) = (functor(&path)?, presheaf(&at)?);
            let a = object(f.dom(), &name)?;
            let d = delta_a(&f, a, &phi)?;
            emit(&json!({"difference": presheaf_to_json(&d.presheaf().0), "certificate": certificate(&f)}));
            Ok(true)
        }
        Command::Jacobian { functor: path, at } => {
            let (f, phi) = (functor(&path)?, presheaf(&at)?);
            let j = jacobian(&f, &phi)?;
            emit(&json!({"jacobian": profunctor_to_json(&j.value), "certificate": certificate(&f)}));
            Ok(true)
        }
        Command::HigherDiff { functor: path, at, sequence, iterated } => {
            let (f, phi) = (functor(&path)?, presheaf(&at)?);
            let seq = sequence.iter().map(|n| object(f.dom(), n)).collect::<Result<Vec<_>, _>>()?;
            let d = if iterated {
                higher_delta_iterated(&f, &seq, &phi)?
            } else {
                higher_delta(&f, &seq, &phi)?
            };
            emit(&json!({
                "sequence": sequence,
                "difference": presheaf_to_json(&d.sub.to_presheaf().0),
                "certificate": certificate(&f),
            }));
            Ok(true)
        }
        Command::Newton { functor: path, max_arity, check, at } => newton(&path, max_arity, check, at.as_deref()),
        Command::Verify {
            suites,
            seed: flag,
            max_objects,
            max_elems,
            max_arity,
            cases,
            format,
            f,
            g,
            h,
            at,
        } => {
            if suites.is_empty() {
                return Err(Failure::Usage(format!("name at least one suite: {} or all", SUITES.join(", "))));
            }
            if f.is_some() || g.is_some() || at.is_some() {
                return match (suites.as_slice(), f, g, at) {
                    ([s], Some(f), Some(g), Some(at)) if s == "chain-rule" => {
                        chain_rule_on(&f, &g, h.as_deref(), &at, format)
                    }
                    _ => Err(Failure::Usage("--F, --G and --at go together, with the chain-rule suite alone".into())),
                };
            }
            let names: Vec<String> = if suites.iter().any(|s| s == "all") {
                SUITES.iter().map(|s| s.to_string()).collect()
            } else {
                suites
            };
            if let Some(bad) = names.iter().find(|n| !SUITES.contains(&n.as_str())) {
                return Err(Failure::Usage(format!("unknown suite {}", bad)));
            }
            let opts = SuiteOptions {
                seed: seed(flag)?,
                bounds: Bounds {
                    max_objects,
                    max_elems,
                    max_arity,
                },
                cases,
            };
            let reports = names.iter().map(|n| run_suite(n, &opts)).collect::<fdcalc::Result<Vec<_>>>()?;
            print_reports(&reports, format);
            Ok(reports.iter().all(SuiteReport::passed))
        }
        Command::Report { file } => {
            let reports = report::from_json(&load(&file)?).map_err(|e| Failure::Failed(format!("{}: {}", file, e)))?;
            if reports.is_empty() {
                return Err(Failure::Usage("the report lists no suites".into()));
            }
            print_reports(&reports, Format::Text);
            Ok(reports.iter().all(SuiteReport::passed))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Failed(msg)) => {
            eprintln!("fdcalc: {}", msg);
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("fdcalc: {}", msg);
            ExitCode::from(2)
        }
    }
}
