//! Verification suites: seeded random instances run through the law checks,
//! collected into a deterministic report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analytic::{
    addition_comparison, analytic_eval, boolean_image_violation, diverse_factorize, generated, is_diverse, nabla,
    nabla_comparison, representatives_diverse, SymmetricSequence,
};
use crate::chain::{check_gamma_laws, NaturalityInputs, TransExpr};
use crate::error::{Error, Result};
use crate::fincat::{FinCategory, Obj, SeqMode};
use crate::funcalc::{
    check_affine_reduction, check_clairaut, check_compose_scalar, check_jacobian_tense, check_linear_scalar,
    check_partial_decomposition, check_product_rule, check_sum_rule, delta_a, higher_delta, identity_base_case,
    eval, linear_base_case, FunctorExpr,
};
use crate::json::{category_to_json, expr_to_json, nat_to_json, presheaf_to_json, profunctor_to_json, sequence_to_json};
use crate::newton::{check_counit_iso, check_round_trips, check_unit_iso, delta_star};
use crate::presheaf::{boolean_factorize, is_pi0_surjective, nat_transformations, NatTrans, Presheaf};
use crate::prof::{
    associator, compose, hom_transpose, hom_untranspose, left_hom, left_unitor, prof_morphisms, right_hom,
    right_unitor,
};
use crate::random::{enumerate_presheaves, Acceptance, Bounds, Gen, Grammar};

pub const SUITES: [&str; 10] = [
    "prof-laws",
    "boolean-factorization",
    "delta-rules",
    "clairaut",
    "analytic-nabla",
    "addition-formula",
    "newton-unit",
    "newton-counit",
    "chain-rule",
    "diverse",
];

const MORPHISM_BOUND: u128 = 20_000;
const MAX_COUNTEREXAMPLES: usize = 10;

/// The statement a suite exercises, in words.
pub fn anchor(suite: &str) -> Option<&'static str> {
    Some(match suite {
        "prof-laws" => {
            "composition of discrete profunctors is the matrix product, the closed structures are the matching \
             exponentials, composition is unital and associative, and tensor is left adjoint to hom"
        }
        "boolean-factorization" => {
            "every transformation factors as a component-surjective map followed by a complemented mono, \
             with unique fill-ins"
        }
        "delta-rules" => {
            "the difference of the identity is representable, the difference of a linear functor is a row of \
             its profunctor, and differences obey the sum, product and scalar rules"
        }
        "clairaut" => "iterated differences count new elements and do not depend on the order of the variables",
        "analytic-nabla" => "the difference of an analytic functor is the analytic functor of the derived sequence",
        "addition-formula" => "an analytic functor at a sum splits as a double coend over pairs of arities",
        "newton-unit" => "a soft sequence is recovered from the higher differences of its analytic functor at zero",
        "newton-counit" => {
            "the Newton series of a soft analytic functor is the functor itself, and taking Newton series is \
             idempotent"
        }
        "chain-rule" => "the chain rule comparison is well defined, unital, associative and natural",
        "diverse" => {
            "soft analytic classes keep their Boolean image and have diverse representatives, and picked \
             elements factor through a diverse family"
        }
        _ => return None,
    })
}

fn default_cases(suite: &str) -> usize {
    match suite {
        "prof-laws" | "delta-rules" => 50,
        "boolean-factorization" => 100,
        "clairaut" | "newton-unit" | "newton-counit" => 30,
        _ => 20,
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    pub bounds: Bounds,
    pub cases: Option<usize>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 1,
            bounds: Bounds::default(),
            cases: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawTally {
    pub law: String,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub case: usize,
    pub law: String,
    pub message: String,
    pub instance: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub anchor: String,
    pub seed: u64,
    pub bounds: Bounds,
    pub instances: usize,
    pub laws: Vec<LawTally>,
    pub counterexamples: Vec<Counterexample>,
    pub acceptance: BTreeMap<String, Acceptance>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.laws.iter().all(|l| l.failed == 0)
    }

    pub fn law(&self, name: &str) -> Option<&LawTally> {
        self.laws.iter().find(|l| l.law == name)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("reports serialize")
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "suite   {}", self.suite);
        let _ = writeln!(s, "checks  {}", self.anchor);
        let _ = writeln!(
            s,
            "seed    {}  instances {}  bounds objects≤{} elements≤{} arity≤{}",
            self.seed, self.instances, self.bounds.max_objects, self.bounds.max_elems, self.bounds.max_arity
        );
        let width = self.laws.iter().map(|l| l.law.chars().count()).max().unwrap_or(0);
        for l in &self.laws {
            let pad = width - l.law.chars().count();
            let _ = writeln!(
                s,
                "  {}  {}{}  {}/{}",
                if l.failed == 0 { "PASS" } else { "FAIL" },
                l.law,
                " ".repeat(pad),
                l.passed,
                l.passed + l.failed
            );
        }
        if !self.counterexamples.is_empty() {
            let _ = writeln!(s, "counterexamples");
            for c in &self.counterexamples {
                let _ = writeln!(s, "  case {} / {}: {}", c.case, c.law, c.message);
                let body = serde_json::to_string(&c.instance).unwrap_or_default();
                let _ = writeln!(s, "    {}", body);
            }
        }
        if !self.acceptance.is_empty() {
            let rates: Vec<String> = self
                .acceptance
                .iter()
                .map(|(k, a)| format!("{} {}/{}", k, a.accepted, a.tried))
                .collect();
            let _ = writeln!(s, "accepted draws  {}", rates.join(", "));
        }
        let _ = writeln!(s, "result  {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }
}

/// What one case records: law outcomes in order and the instance it ran on.
#[derive(Default)]
struct Case {
    outcomes: Vec<(String, std::result::Result<(), String>)>,
    instance: serde_json::Map<String, Value>,
}

impl Case {
    fn law(&mut self, name: impl Into<String>, r: Result<()>) {
        self.outcomes.push((name.into(), r.map_err(|e| e.to_string())));
    }

    fn holds(&mut self, name: impl Into<String>, ok: bool, why: impl FnOnce() -> String) {
        self.outcomes.push((name.into(), if ok { Ok(()) } else { Err(why()) }));
    }

    fn show(&mut self, key: &str, v: Value) {
        self.instance.insert(key.to_string(), v);
    }
}

type CaseFn = fn(&mut Gen, &Bounds, usize, &mut Case) -> Result<()>;

pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<SuiteReport> {
    let anchor = anchor(name).ok_or_else(|| Error::UnknownSuite(name.to_string()))?;
    let run: CaseFn = match name {
        "prof-laws" => prof_laws,
        "boolean-factorization" => boolean_case,
        "delta-rules" => delta_rules,
        "clairaut" => clairaut,
        "analytic-nabla" => analytic_nabla,
        "addition-formula" => addition_formula,
        "newton-unit" => newton_unit,
        "newton-counit" => newton_counit,
        "chain-rule" => chain_rule,
        _ => diverse,
    };
    let cases = opts.cases.unwrap_or_else(|| default_cases(name));
    let mut gen = Gen::new(opts.seed);
    let mut tallies: Vec<LawTally> = Vec::new();
    let mut counterexamples = Vec::new();
    for i in 0..cases {
        let mut case = Case::default();
        if let Err(e) = run(&mut gen, &opts.bounds, i, &mut case) {
            case.law("case completes", Err(e));
        }
        for (law, outcome) in case.outcomes {
            let t = match tallies.iter().position(|t| t.law == law) {
                Some(k) => &mut tallies[k],
                None => {
                    tallies.push(LawTally {
                        law: law.clone(),
                        passed: 0,
                        failed: 0,
                    });
                    tallies.last_mut().unwrap()
                }
            };
            match outcome {
                Ok(()) => t.passed += 1,
                Err(message) => {
                    t.failed += 1;
                    if counterexamples.len() < MAX_COUNTEREXAMPLES {
                        counterexamples.push(Counterexample {
                            case: i,
                            law,
                            message,
                            instance: Value::Object(case.instance.clone()),
                        });
                    }
                }
            }
        }
    }
    Ok(SuiteReport {
        suite: name.to_string(),
        anchor: anchor.to_string(),
        seed: opts.seed,
        bounds: opts.bounds,
        instances: cases,
        laws: tallies,
        counterexamples,
        acceptance: gen.stats().iter().map(|(k, v)| (k.to_string(), *v)).collect(),
    })
}

fn small(b: &Bounds) -> usize {
    b.max_objects.min(2)
}

fn prof_laws(g: &mut Gen, b: &Bounds, _: usize, case: &mut Case) -> Result<()> {
    // discrete: cardinalities against the matrix formulas
    let (da, db, dc) = (g.discrete(b.max_objects), g.discrete(b.max_objects), g.discrete(b.max_objects));
    let p = g.discrete_profunctor(&da, &db, 3, "p");
    let q = g.discrete_profunctor(&db, &dc, 3, "q");
    let r = g.discrete_profunctor(&da, &dc, 3, "r");
    case.show("discreteP", profunctor_to_json(&p));
    case.show("discreteQ", profunctor_to_json(&q));
    case.show("discreteR", profunctor_to_json(&r));
    let comp = compose(&q, &p)?;
    let lh = left_hom(&q, &r)?;
    let rh = right_hom(&r, &p)?;
    let pow = |base: usize, exp: usize| (base as u128).pow(exp as u32);
    let mut bad = Vec::new();
    for a in da.objects() {
        for c in dc.objects() {
            let want: usize = db.objects().map(|x| q.size(x, c) * p.size(a, x)).sum();
            if comp.value.size(a, c) != want {
                bad.push(format!("tensor ({}, {}) has {} elements, expected {}", a, c, comp.value.size(a, c), want));
            }
        }
        for x in db.objects() {
            let want: u128 = dc.objects().map(|c| pow(r.size(a, c), q.size(x, c))).product();
            if lh.value.size(a, x) as u128 != want {
                bad.push(format!("left hom ({}, {}) has {}, expected {}", a, x, lh.value.size(a, x), want));
            }
        }
    }
    for x in db.objects() {
        for c in dc.objects() {
            let want: u128 = da.objects().map(|a| pow(r.size(a, c), p.size(a, x))).product();
            if rh.value.size(x, c) as u128 != want {
                bad.push(format!("right hom ({}, {}) has {}, expected {}", x, c, rh.value.size(x, c), want));
            }
        }
    }
    case.holds("discrete cardinalities", bad.is_empty(), || bad.join("; "));

    // general small categories
    let (ca, cb, cc, cd) = (g.category(small(b)), g.category(small(b)), g.category(small(b)), g.category(small(b)));
    let p = g.profunctor(&ca, &cb, b.max_elems)?;
    let q = g.profunctor(&cb, &cc, b.max_elems)?;
    let r = g.profunctor(&ca, &cc, b.max_elems)?;
    let s = g.profunctor(&cc, &cd, b.max_elems)?;
    case.show("P", profunctor_to_json(&p));
    case.show("Q", profunctor_to_json(&q));
    case.show("R", profunctor_to_json(&r));
    let unitors = left_unitor(&p).and_then(|l| Ok(l.is_iso() && right_unitor(&p)?.is_iso()));
    case.law("unitors", unitors.and_then(|ok| ok.then_some(()).ok_or(Error::LawViolation("unitor not invertible".into()))));
    case.law(
        "associator",
        associator(&s, &q, &p).and_then(|m| {
            m.is_iso()
                .then_some(())
                .ok_or(Error::LawViolation("associator not invertible".into()))
        }),
    );
    case.law("tensor-hom transposes", adjunction_round_trip(&p, &q, &r));
    Ok(())
}

/// Transposing along `Q ⊗ − ⊣ Q ⦸ −` and back is the identity both ways, and
/// the two hom-sets have the same size.
pub fn adjunction_round_trip(
    p: &Arc<crate::prof::Profunctor>,
    q: &Arc<crate::prof::Profunctor>,
    r: &Arc<crate::prof::Profunctor>,
) -> Result<()> {
    let comp = compose(q, p)?;
    let hom = left_hom(q, r)?;
    let ms = prof_morphisms(&comp.value, r, MORPHISM_BOUND)?;
    let ns = prof_morphisms(p, &hom.value, MORPHISM_BOUND)?;
    if ms.len() != ns.len() {
        return Err(Error::LawViolation(format!("{} maps out of the tensor but {} into the hom", ms.len(), ns.len())));
    }
    for m in &ms {
        let back = hom_untranspose(&comp, &hom, r, &hom_transpose(&comp, &hom, m)?)?;
        if back.components() != m.components() {
            return Err(Error::LawViolation("down after up changes a map out of the tensor".into()));
        }
    }
    for n in &ns {
        let back = hom_transpose(&comp, &hom, &hom_untranspose(&comp, &hom, r, n)?)?;
        if back.components() != n.components() {
            return Err(Error::LawViolation("up after down changes a map into the hom".into()));
        }
    }
    Ok(())
}

fn boolean_case(g: &mut Gen, b: &Bounds, _: usize, case: &mut Case) -> Result<()> {
    let base = g.category(b.max_objects);
    let t = g.nat_trans(&base, b.max_elems)?;
    case.show("base", category_to_json(&base));
    case.show("t", nat_to_json(&t));
    let f = boolean_factorize(&t);
    let composite = f.m.after(&f.e)?;
    case.holds("factorizes", composite.components() == t.components(), || "m ∘ e differs from t".into());
    case.holds("e is component-surjective", is_pi0_surjective(&f.e), || "e misses a component".into());
    case.holds("m is a complemented mono", f.m.is_mono() && f.middle.is_complemented(), || {
        "m is not a complemented mono".into()
    });
    // square e ⊥ m2 built from s ∘ t = m2 ∘ e2
    let d2 = g.presheaf(&base, b.max_elems)?;
    let s = g.nat_from(t.dst(), &d2).unwrap_or_else(|| NatTrans::identity(t.dst()));
    let f2 = boolean_factorize(&s.after(&t)?);
    let v = s.after(&f.m)?;
    let lifts = nat_transformations(f.e.dst(), f2.e.dst(), MORPHISM_BOUND)?
        .into_iter()
        .filter(|d| {
            d.after(&f.e).map(|x| x.components() == f2.e.components()).unwrap_or(false)
                && f2.m.after(d).map(|x| x.components() == v.components()).unwrap_or(false)
        })
        .count();
    case.holds("unique fill-in", lifts == 1, || format!("{} fill-ins", lifts));
    Ok(())
}

fn delta_rules(g: &mut Gen, b: &Bounds, _: usize, case: &mut Case) -> Result<()> {
    let base = g.category(small(b));
    let phi = g.presheaf(&base, b.max_elems)?;
    let gr = Grammar {
        compose: false,
        ..Grammar::default()
    };
    let f = g.functor(&base, b, &gr)?;
    let h = g.functor(&base, b, &gr)?;
    let p = g.profunctor(&base, &base, b.max_elems)?;
    let a = g.below(base.object_count());
    case.show("base", category_to_json(&base));
    case.show("phi", presheaf_to_json(&phi));
    case.show("F", expr_to_json(&f));
    case.show("G", expr_to_json(&h));
    case.show("P", profunctor_to_json(&p));
    case.law(
        "identity base case",
        base.objects().try_for_each(|o| identity_base_case(&base, o, &phi).map(|_| ())),
    );
    case.law("linear base case", base.objects().try_for_each(|o| linear_base_case(&p, o, &phi).map(|_| ())));
    case.law("partial decomposition", check_partial_decomposition(&f, a, &phi));
    case.law("sum rule", check_sum_rule(&f, &h, &phi));
    case.law("product rule", check_product_rule(&[f.clone(), h.clone()], &phi));
    if g.coin(0.3) {
        let k = g.leaf(&base, b, &gr)?;
        case.show("H", expr_to_json(&k));
        case.law("product rule", check_product_rule(&[f.clone(), h.clone(), k], &phi));
    }
    case.law("linear scalar rule", check_linear_scalar(&p, &f, &phi));
    let outer = if g.coin(0.5) { FunctorExpr::linear(&p) } else { FunctorExpr::identity(&base) };
    case.law("composite scalar rule", check_compose_scalar(&outer, &f, a, &phi));
    case.law("affine reduction", check_affine_reduction(&f, a, &phi));
    let psi = g.presheaf(&base, 1)?;
    let sum = Arc::new(Presheaf::coproduct(&[&phi, &psi])?);
    let inj = Presheaf::injection(&[&phi, &psi], 0, &sum);
    case.law("natural along complemented monos", check_jacobian_tense(&f, &inj));
    Ok(())
}

fn clairaut(g: &mut Gen, b: &Bounds, _: usize, case: &mut Case) -> Result<()> {
    let base = g.category(small(b));
    let phi = g.presheaf(&base, b.max_elems.min(2))?;
    let gr = Grammar {
        compose: false,
        ..Grammar::default()
    };
    let f = g.functor(&base, b, &gr)?;
    let n = 1 + g.below(3);
    let seq: Vec<Obj> = (0..n).map(|_| g.below(base.object_count())).collect();
    case.show("base", category_to_json(&base));
    case.show("phi", presheaf_to_json(&phi));
    case.show("F", expr_to_json(&f));
    case.show("sequence", json!(seq));
    case.law("iterated equals new elements", higher_delta(&f, &seq, &phi).map(|_| ()));
    case.law("order independence", check_clairaut(&f, &seq, &phi));
    Ok(())
}

/// `X + sym² X` over the one-object category.
pub fn x_plus_sym2() -> Result<SymmetricSequence> {
    let one = Arc::new(FinCategory::terminal());
    let gen = generated(&one, 3, SeqMode::Strict);
    let free = SymmetricSequence::free(&gen, &one, &[(vec![0], 0, "x".into()), (vec![0, 0], 0, "q".into())])?;
    free.quotient(&[(vec![0, 0], 0, 0, 1)])
}

/// `(∇_A S)~(Φ) → S̃(Φ + A(A, −))` is a bijection onto the new elements.
pub fn check_nabla_at(s: &SymmetricSequence, a: Obj, phi: &Arc<Presheaf>) -> Result<()> {
    let nab = nabla(s, a)?;
    let d = delta_a(&FunctorExpr::analytic(s), a, phi)?;
    let ev = d.at_shifted.analytic().ok_or(Error::EndpointMismatch)?;
    let t = nabla_comparison(s, &nab, phi, ev)?;
    if !t.is_mono() {
        return Err(Error::LawViolation("comparison is not injective".into()));
    }
    if t.image().membership() != d.sub.membership() {
        return Err(Error::LawViolation("comparison image differs from the new elements".into()));
    }
    Ok(())
}

fn analytic_nabla(g: &mut Gen, b: &Bounds, i: usize, case: &mut Case) -> Result<()> {
    if i == 0 {
        let s = x_plus_sym2()?;
        let one = s.base().clone();
        let sizes = (0..4)
            .map(|n| {
                let phi = Arc::new(Presheaf::from_fn(
                    one.clone(),
                    vec![(0..n).map(|k| format!("x{}", k)).collect()],
                    |_, x| x,
                ));
                let d = delta_a(&FunctorExpr::analytic(&s), 0, &phi)?;
                Ok((n, d.sub.size(0)))
            })
            .collect::<Result<Vec<_>>>()?;
        case.holds("one-object count n + 2", sizes.iter().all(|&(n, k)| k == n + 2), || format!("{:?}", sizes));
    }
    let base = Arc::new(if i % 2 == 0 { FinCategory::arrow() } else { FinCategory::discrete(&["a0", "a1"]) });
    let arity = b.max_arity.min(3);
    let s = g.sequence(&base, &base, arity, SeqMode::Strict, 40)?;
    let a = g.below(base.object_count());
    case.show("sequence", sequence_to_json(&s));
    case.show("object", json!(base.object_name(a)));
    let all = enumerate_presheaves(&base, 3)?;
    let mut res = Ok(());
    for phi in &all {
        if let Err(e) = check_nabla_at(&s, a, phi) {
            case.show("phi", presheaf_to_json(phi));
            res = Err(e);
            break;
        }
    }
    case.law("difference is the derived sequence", res);
    Ok(())
}

fn addition_formula(g: &mut Gen, b: &Bounds, _: usize, case: &mut Case) -> Result<()> {
    let base = g.category(small(b));
    let mode = if g.coin(0.5) { SeqMode::Strict } else { SeqMode::Soft };
    let s = g.sequence(&base, &base, b.max_arity.min(3), mode, 30)?;
    let p1 = g.presheaf(&base, b.max_elems)?;
    let p2 = g.presheaf(&base, b.max_elems)?;
    case.show("sequence", sequence_to_json(&s));
    case.show("phi1", presheaf_to_json(&p1));
    case.show("phi2", presheaf_to_json(&p2));
    let sum = Arc::new(Presheaf::coproduct(&[&p1, &p2])?);
    let ev = analytic_eval(&s, &sum)?;
    let rows = addition_comparison(&s, &p1, &p2, &ev)?;
    let mut bad = None;
    for (bo, (n, row)) in rows.iter().enumerate() {
        let mut seen = row.clone();
        seen.sort_unstable();
        if *n != ev.value.size(bo) || seen != (0..*n).collect::<Vec<_>>() {
            bad = Some(format!("at {} the double coend has {} classes onto {} elements", bo, n, ev.value.size(bo)));
            break;
        }
    }
    case.holds("double coend bijects", bad.is_none(), || bad.unwrap_or_default());
    Ok(())
}

fn newton_unit(g: &mut Gen, b: &Bounds, i: usize, case: &mut Case) -> Result<()> {
    let base = g.category(small(b));
    let n = b.max_arity.min(3);
    let s = g.sequence(&base, &base, n, SeqMode::Soft, 30)?;
    case.show("sequence", sequence_to_json(&s));
    let unit = check_unit_iso(&s);
    case.holds("unit is a natural bijection", unit.iso, || unit.failure.clone().unwrap_or_default());
    let f = if i % 2 == 0 {
        FunctorExpr::analytic(&s)
    } else {
        let gr = Grammar {
            depth: 0,
            ..Grammar::default()
        };
        g.functor(&base, b, &gr)?
    };
    case.show("F", expr_to_json(&f));
    case.law("transposes round trip", newton_round_trips(&s, &f, n, 4));
    Ok(())
}

/// Transposes up to `limit` maps `S → Δ_*[F](0)` there and back.
pub fn newton_round_trips(s: &SymmetricSequence, f: &FunctorExpr, n: usize, limit: usize) -> Result<()> {
    let data = delta_star(f, n)?;
    let us = match prof_morphisms(s.prof(), data.sequence.prof(), MORPHISM_BOUND) {
        Ok(us) => us,
        Err(Error::SizeGuardExceeded { .. }) => return Ok(()),
        Err(e) => return Err(e),
    };
    us.iter().take(limit).try_for_each(|u| check_round_trips(&data, s, u))
}

fn newton_counit(g: &mut Gen, b: &Bounds, i: usize, case: &mut Case) -> Result<()> {
    let base = g.category(small(b));
    let n = b.max_arity.min(3);
    let f = match i % 3 {
        0 => FunctorExpr::analytic(&g.sequence(&base, &base, n, SeqMode::Soft, 30)?),
        1 => FunctorExpr::monomial(&g.tense_profunctor(&base, &base, b.max_elems.min(2))?),
        _ => g.functor(&base, b, &Grammar::default())?,
    };
    let tests = (0..3)
        .map(|_| g.presheaf(&base, b.max_elems))
        .collect::<Result<Vec<_>>>()?;
    case.show("F", expr_to_json(&f));
    let r = check_counit_iso(&f, n, &tests);
    case.holds("computed without error", r.failure.is_none(), || r.failure.clone().unwrap_or_default());
    case.holds("idempotent", r.idempotent, || "Δ_* of the counit is not invertible".into());
    if matches!(f, FunctorExpr::AnalyticSoft(_)) {
        case.holds("counit invertible on soft analytic", r.all_iso(), || {
            format!("counit kinds {:?}", r.kinds.iter().map(|k| k.name()).collect::<Vec<_>>())
        });
    }
    Ok(())
}

fn chain_rule(g: &mut Gen, b: &Bounds, _: usize, case: &mut Case) -> Result<()> {
    let base = g.category(small(b));
    let gr = Grammar {
        compose: false,
        ..Grammar::default()
    };
    let bb = Bounds {
        max_elems: b.max_elems.min(2),
        ..*b
    };
    // G∘F grows like a power of |FΦ|; keep the composite small enough that
    // the Jacobians stay cheap
    let (f, h, phi) = g.sample("chain-instance", |g| {
        let f = g.functor(&base, &bb, &gr).ok()?;
        let h = g.functor(&base, &bb, &gr).ok()?;
        let phi = g.presheaf(&base, bb.max_elems).ok()?;
        composite_fits(&f, &h, &phi).then_some((f, h, phi))
    })?;
    let k = g.leaf(&base, &bb, &gr)?;
    case.show("base", category_to_json(&base));
    case.show("F", expr_to_json(&f));
    case.show("G", expr_to_json(&h));
    case.show("H", expr_to_json(&k));
    case.show("phi", presheaf_to_json(&phi));
    let inputs = naturality_inputs(g, &f, &h, &phi, bb.max_elems)?;
    let report = check_gamma_laws(&f, &h, &k, &phi, &inputs);
    for c in report.checks {
        let law = c.law.split(" #").next().unwrap_or(&c.law).to_string();
        case.holds(law, c.holds, || c.witness.clone().unwrap_or_default());
    }
    Ok(())
}

const CHAIN_INNER: usize = 4;
const CHAIN_OUTER: usize = 64;

fn composite_fits(f: &FunctorExpr, h: &FunctorExpr, phi: &Arc<Presheaf>) -> bool {
    let Ok(inner) = eval(f, phi) else { return false };
    if inner.value.total_size() > CHAIN_INNER {
        return false;
    }
    eval(h, &inner.value).is_ok_and(|outer| outer.value.total_size() <= CHAIN_OUTER)
}

/// A random map out of `Φ` plus identities and coproduct injections out of
/// `F` and `G`.
pub fn naturality_inputs(
    g: &mut Gen,
    f: &FunctorExpr,
    h: &FunctorExpr,
    phi: &Arc<Presheaf>,
    max_elems: usize,
) -> Result<NaturalityInputs> {
    let psi = g.presheaf(phi.base(), max_elems)?;
    let mut maps = vec![NatTrans::identity(phi)];
    if composite_fits(f, h, &psi) {
        if let Some(t) = g.nat_from(phi, &psi) {
            maps.push(t);
        }
    }
    Ok(NaturalityInputs {
        maps,
        f_trans: vec![TransExpr::Identity(f.clone()), TransExpr::Inl(f.clone(), h.clone())],
        g_trans: vec![TransExpr::Identity(h.clone()), TransExpr::Inr(f.clone(), h.clone())],
    })
}

fn diverse(g: &mut Gen, b: &Bounds, _: usize, case: &mut Case) -> Result<()> {
    let base = g.category(small(b));
    let s = g.sequence(&base, &base, b.max_arity.min(3), SeqMode::Soft, 30)?;
    let phi = g.presheaf(&base, b.max_elems)?;
    case.show("sequence", sequence_to_json(&s));
    case.show("phi", presheaf_to_json(&phi));
    let ev = analytic_eval(&s, &phi)?;
    let v = boolean_image_violation(&ev);
    case.holds("classes keep their Boolean image", v.is_none(), || v.clone().unwrap_or_default());
    case.holds("representatives are diverse", representatives_diverse(&ev), || {
        "a class has no diverse representative".into()
    });
    let inhabited: Vec<Obj> = base.objects().filter(|&a| phi.size(a) > 0).collect();
    if !inhabited.is_empty() {
        let k = 1 + g.below(3);
        let objs: Vec<Obj> = (0..k).map(|_| *g.pick(&inhabited)).collect();
        let xs: Vec<usize> = objs.iter().map(|&a| g.below(phi.size(a))).collect();
        let src = Arc::new(Presheaf::sum_of_representables(&base, &objs)?);
        let t = NatTrans::from_elements(src, &phi, &xs)?;
        let fz = diverse_factorize(&t)?;
        case.law(
            "factors through a diverse family",
            is_diverse(&fz.psi).and_then(|ok| {
                let back = fz.psi.after(&fz.restriction)?;
                if ok && back.components() == t.components() {
                    Ok(())
                } else {
                    Err(Error::LawViolation("diverse factorization does not recompose".into()))
                }
            }),
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(matches!(run_suite("nope", &SuiteOptions::default()), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn every_suite_has_an_anchor() {
        for s in SUITES {
            assert!(anchor(s).is_some());
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let opts = SuiteOptions {
            seed: 11,
            cases: Some(5),
            ..SuiteOptions::default()
        };
        let a = run_suite("boolean-factorization", &opts).unwrap();
        let b = run_suite("boolean-factorization", &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.passed(), "{}", a.render_text());
    }

    #[test]
    fn x_plus_sym2_cells() {
        let s = x_plus_sym2().unwrap();
        assert_eq!(s.cell(&[0], 0).len(), 1);
        assert_eq!(s.cell(&[0, 0], 0).len(), 1);
    }
}
