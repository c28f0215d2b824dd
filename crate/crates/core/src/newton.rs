//! Iterated differences at 0 packaged as a soft symmetric sequence, the
//! Newton series `F ↦ (Δ_*[F](0))~`, its transposes, and the unit and
//! counit checks.

use std::collections::HashMap;
use std::sync::Arc;

use crate::analytic::{analytic_eval, analytic_map, generated, sum_generators, seq_rep_map, AnalyticEval, SymmetricSequence};
use crate::error::{Error, Result};
use crate::fincat::{seq_name, FinCategory, Obj, SeqMode};
use crate::funcalc::{eval, eval_nat, higher_delta_iterated, higher_delta_new, is_tense_square, slot_map, tense_certify, FunctorExpr, HigherDelta};
use crate::presheaf::{NatTrans, Presheaf};
use crate::prof::{ProfMorphism, Profunctor};

/// `Δ_*[F](0)` with a witness new element behind every cell.
#[derive(Clone, Debug)]
pub struct NewtonData {
    pub source: FunctorExpr,
    pub max_arity: usize,
    pub sequence: SymmetricSequence,
    /// indexed by sequence object; the ambient is `Q(A⃗) = Σ A(A_i, −)`
    pub deltas: Vec<HigherDelta>,
    members: Vec<Vec<Vec<usize>>>,
    position: Vec<Vec<HashMap<usize, usize>>>,
}

impl NewtonData {
    pub fn gen(&self) -> &Arc<FinCategory> {
        self.sequence.gen()
    }

    /// `Q(A⃗)` for a sequence object.
    pub fn q(&self, s: Obj) -> &Arc<Presheaf> {
        &self.deltas[s].ambient
    }

    /// The new element of `F(Q(A⃗))(b)` behind cell element `k`.
    pub fn witness(&self, s: Obj, b: Obj, k: usize) -> usize {
        self.members[s][b][k]
    }

    pub fn position(&self, s: Obj, b: Obj, x: usize) -> Option<usize> {
        self.position[s][b].get(&x).copied()
    }

    /// Cell sizes grouped by arity, summed over sequences and targets.
    pub fn arity_profile(&self) -> Vec<usize> {
        self.sequence.arity_profile()
    }
}

pub fn delta_star(f: &FunctorExpr, max_arity: usize) -> Result<NewtonData> {
    tense_certify(f)?;
    let base = f.dom().clone();
    let cod = f.cod().clone();
    let gen = generated(&base, max_arity, SeqMode::Soft);
    let info = gen.seq_info().expect("generated categories carry sequence data");
    let zero = Arc::new(Presheaf::empty(base.clone()));
    let deltas = gen
        .objects()
        .map(|s| higher_delta_new(f, info.entries(s), &zero))
        .collect::<Result<Vec<_>>>()?;
    let members: Vec<Vec<Vec<usize>>> = deltas
        .iter()
        .map(|d| cod.objects().map(|b| d.sub.members(b)).collect())
        .collect();
    let position: Vec<Vec<HashMap<usize, usize>>> = members
        .iter()
        .map(|rows| rows.iter().map(|ms| ms.iter().enumerate().map(|(k, &x)| (x, k)).collect()).collect())
        .collect();
    let nb = cod.object_count();
    let cells = gen
        .objects()
        .flat_map(|s| cod.objects().map(move |b| (s, b)))
        .map(|(s, b)| {
            members[s][b]
                .iter()
                .map(|&x| deltas[s].evaluation.value.label(b, x).to_string())
                .collect()
        })
        .collect::<Vec<Vec<String>>>();
    debug_assert_eq!(cells.len(), gen.object_count() * nb);
    let mut left = Vec::with_capacity(gen.morphism_count());
    for m in gen.morphisms() {
        let (s, d) = (gen.src(m), gen.dst(m));
        let r = seq_rep_map(&base, info.morphism(m), &deltas[d].ambient, &deltas[s].ambient)?;
        let fr = eval_nat(f, &r, &deltas[d].evaluation, &deltas[s].evaluation)?;
        let per_b = cod
            .objects()
            .map(|b| {
                members[d][b]
                    .iter()
                    .map(|&x| {
                        position[s][b]
                            .get(&fr.apply(b, x))
                            .copied()
                            .ok_or_else(|| Error::ActionEscapesNewElements(gen.morphism_name(m).to_string()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        left.push(per_b);
    }
    let mut right = Vec::with_capacity(cod.morphism_count());
    for g in cod.morphisms() {
        let (b, b2) = (cod.src(g), cod.dst(g));
        let per_s = gen
            .objects()
            .map(|s| {
                let v = &deltas[s].evaluation.value;
                members[s][b]
                    .iter()
                    .map(|&x| {
                        position[s][b2]
                            .get(&v.act(g, x))
                            .copied()
                            .ok_or_else(|| Error::ActionEscapesNewElements(cod.morphism_name(g).to_string()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        right.push(per_s);
    }
    let prof = Profunctor::new(gen, cod, cells, left, right)?;
    Ok(NewtonData {
        source: f.clone(),
        max_arity,
        sequence: SymmetricSequence::new(Arc::new(prof))?,
        deltas,
        members,
        position,
    })
}

/// `F̄ = (Δ_*[F](0))~`.
pub fn newton_functor(f: &FunctorExpr, max_arity: usize) -> Result<FunctorExpr> {
    Ok(FunctorExpr::AnalyticSoft(delta_star(f, max_arity)?.sequence))
}

/// Re-derives every cell through iterated single differences.
pub fn check_iterated_cells(data: &NewtonData) -> Result<()> {
    let info = data.gen().seq_info().expect("sequence data");
    let zero = Arc::new(Presheaf::empty(data.source.dom().clone()));
    for s in data.gen().objects() {
        let it = higher_delta_iterated(&data.source, info.entries(s), &zero)?;
        if it.sub.membership() != data.deltas[s].sub.membership() {
            return Err(Error::LawViolation(format!(
                "iterated differences disagree at {}",
                data.gen().object_name(s)
            )));
        }
    }
    Ok(())
}

fn check_transpose_ends(data: &NewtonData, s: &SymmetricSequence, u: &ProfMorphism) -> Result<()> {
    if **u.src() != **s.prof() || **u.dst() != **data.sequence.prof() {
        return Err(Error::EndpointMismatch);
    }
    Ok(())
}

/// `t[p, φ] = F(φ̄)(u(p))` at `Φ`, checked on every member of every class.
pub fn transpose_up(data: &NewtonData, s: &SymmetricSequence, u: &ProfMorphism, phi: &Arc<Presheaf>) -> Result<NatTrans> {
    check_transpose_ends(data, s, u)?;
    let f = &data.source;
    let ev = analytic_eval(s, phi)?;
    let at_phi = eval(f, phi)?;
    let mut cache: HashMap<(Obj, Vec<usize>), NatTrans> = HashMap::new();
    let mut comps = Vec::new();
    for b in f.cod().objects() {
        let classes = ev.class_members(b);
        let mut row = Vec::with_capacity(classes.len());
        for (cl, members) in classes.into_iter().enumerate() {
            let mut image = None;
            for (so, tuple, p) in members {
                let key = (so, tuple);
                if !cache.contains_key(&key) {
                    let bar = NatTrans::from_elements(data.q(so).clone(), phi, &key.1)?;
                    let m = eval_nat(f, &bar, &data.deltas[so].evaluation, &at_phi)?;
                    cache.insert(key.clone(), m);
                }
                let y = cache[&key].apply(b, data.witness(so, b, u.apply(so, b, p)));
                match image {
                    None => image = Some(y),
                    Some(z) if z != y => return Err(Error::NotWellDefined(ev.value.label(b, cl).to_string())),
                    _ => {}
                }
            }
            row.push(image.expect("coend classes are nonempty"));
        }
        comps.push(row);
    }
    NatTrans::new(ev.value.clone(), at_phi.value.clone(), comps)
}

/// `S̃(Q(A⃗))` for every sequence object.
pub fn evaluations_at_q(data: &NewtonData, s: &SymmetricSequence) -> Result<Vec<AnalyticEval>> {
    data.gen().objects().map(|o| analytic_eval(s, data.q(o))).collect()
}

/// The family `t_{Q(A⃗)}` of `transpose_up(u)` over all sequence objects.
pub fn transpose_family(data: &NewtonData, s: &SymmetricSequence, u: &ProfMorphism) -> Result<Vec<NatTrans>> {
    data.gen().objects().map(|o| transpose_up(data, s, u, data.q(o))).collect()
}

/// The element `[p, id]` of `S̃(Q(A⃗))(b)`.
fn unit_class(ev: &AnalyticEval, q: &Presheaf, so: Obj, b: Obj, p: usize) -> Result<usize> {
    let tuple: Vec<usize> = sum_generators(q)?.into_iter().map(|(_, x)| x).collect();
    Ok(ev.class_of(b, so, &tuple, p))
}

/// `u(p) = t[p, id]` from a family `t_{Q(A⃗)}: S̃(Q(A⃗)) → F(Q(A⃗))`, after
/// checking the naturality squares along every subsum inclusion are pullbacks.
pub fn transpose_down(data: &NewtonData, s: &SymmetricSequence, family: &[NatTrans]) -> Result<ProfMorphism> {
    let gen = data.gen();
    let info = gen.seq_info().expect("sequence data");
    let f = &data.source;
    if family.len() != gen.object_count() {
        return Err(Error::EndpointMismatch);
    }
    let evs = evaluations_at_q(data, s)?;
    for so in gen.objects() {
        if **family[so].src() != *evs[so].value || **family[so].dst() != *data.deltas[so].evaluation.value {
            return Err(Error::EndpointMismatch);
        }
    }
    for so in gen.objects() {
        let entries = info.entries(so);
        for j in 0..entries.len() {
            let mut shorter = entries.to_vec();
            shorter.remove(j);
            let sub = info.object_of(&shorter).expect("prefixes of sequences are sequences");
            let slots: Vec<usize> = (0..=shorter.len()).map(|k| if k <= j { k } else { k + 1 }).collect();
            let (dsub, dfull) = (&data.deltas[sub], &data.deltas[so]);
            let i = slot_map(&dsub.parts, &dsub.ambient, &dfull.parts, &dfull.ambient, &slots)?;
            let si = analytic_map(s, &i, &evs[sub], &evs[so]);
            let fi = eval_nat(f, &i, &dsub.evaluation, &dfull.evaluation)?;
            if !is_tense_square(&si, &family[sub], &family[so], &fi) {
                return Err(Error::NotTense {
                    node: gen.object_name(so).to_string(),
                    witness: format!("square along omitting slot {} is not a pullback", j),
                });
            }
        }
    }
    let cod = f.cod();
    let mut comps = Vec::new();
    for so in gen.objects() {
        for b in cod.objects() {
            let row = (0..s.prof().size(so, b))
                .map(|p| {
                    let x = family[so].apply(b, unit_class(&evs[so], data.q(so), so, b, p)?);
                    data.position(so, b, x)
                        .ok_or_else(|| Error::NotNew(format!("{} at {}", s.prof().cell(so, b)[p], gen.object_name(so))))
                })
                .collect::<Result<Vec<_>>>()?;
            comps.push(row);
        }
    }
    ProfMorphism::new(s.prof().clone(), data.sequence.prof().clone(), comps)
}

/// `t ↦ u ↦ t` and `u ↦ t ↦ u` are identities.
pub fn check_round_trips(data: &NewtonData, s: &SymmetricSequence, u: &ProfMorphism) -> Result<()> {
    let family = transpose_family(data, s, u)?;
    let back = transpose_down(data, s, &family)?;
    if back.components() != u.components() {
        return Err(Error::LawViolation("transposing down after up changes u".into()));
    }
    let again = transpose_family(data, s, &back)?;
    if again.iter().zip(&family).any(|(x, y)| x.components() != y.components()) {
        return Err(Error::LawViolation("transposing up after down changes t".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellCount {
    pub sequence: String,
    pub target: String,
    pub expected: usize,
    pub found: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitReport {
    pub iso: bool,
    pub cells: Vec<CellCount>,
    pub failure: Option<String>,
}

/// The unit `S → Δ_*[S̃](0)`, `p ↦ [p, id]`, is a natural bijection.
pub fn check_unit_iso(s: &SymmetricSequence) -> UnitReport {
    let fail = |msg: String, cells| UnitReport {
        iso: false,
        cells,
        failure: Some(msg),
    };
    if s.mode() != SeqMode::Soft {
        return fail("the unit needs a soft sequence".into(), Vec::new());
    }
    let data = match delta_star(&FunctorExpr::AnalyticSoft(s.clone()), s.max_arity()) {
        Ok(d) => d,
        Err(e) => return fail(e.to_string(), Vec::new()),
    };
    let (gen, cod) = (data.gen().clone(), s.target().clone());
    let mut cells = Vec::new();
    for so in gen.objects() {
        for b in cod.objects() {
            cells.push(CellCount {
                sequence: seq_name(s.base(), gen.seq_info().expect("sequence data").entries(so)),
                target: cod.object_name(b).to_string(),
                expected: s.prof().size(so, b),
                found: data.sequence.prof().size(so, b),
            });
        }
    }
    let mut comps = Vec::new();
    for so in gen.objects() {
        let ev = match data.deltas[so].evaluation.analytic() {
            Some(ev) => ev,
            None => return fail("evaluation lost its coend tables".into(), cells),
        };
        for b in cod.objects() {
            let mut row = Vec::new();
            for p in 0..s.prof().size(so, b) {
                let cl = match unit_class(ev, data.q(so), so, b, p) {
                    Ok(c) => c,
                    Err(e) => return fail(e.to_string(), cells),
                };
                match data.position(so, b, cl) {
                    Some(k) => row.push(k),
                    None => {
                        return fail(
                            format!("[{}, id] at {} is not new", s.prof().cell(so, b)[p], gen.object_name(so)),
                            cells,
                        )
                    }
                }
            }
            comps.push(row);
        }
    }
    match ProfMorphism::new(s.prof().clone(), data.sequence.prof().clone(), comps) {
        Ok(m) if m.is_iso() => UnitReport {
            iso: true,
            cells,
            failure: None,
        },
        Ok(m) => {
            let bad = gen
                .objects()
                .flat_map(|so| cod.objects().map(move |b| (so, b)))
                .find(|&(so, b)| {
                    let row = &m.components()[so * cod.object_count() + b];
                    let mut seen = row.clone();
                    seen.sort_unstable();
                    seen.dedup();
                    seen.len() != row.len() || row.len() != data.sequence.prof().size(so, b)
                })
                .map(|(so, b)| format!("cell ({}, {})", gen.object_name(so), cod.object_name(b)))
                .unwrap_or_default();
            fail(format!("unit is not a bijection at {}", bad), cells)
        }
        Err(e) => fail(format!("unit is not equivariant: {}", e), cells),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CounitKind {
    Iso,
    Mono,
    Neither,
}

impl CounitKind {
    pub fn of(t: &NatTrans) -> CounitKind {
        if t.is_iso() {
            CounitKind::Iso
        } else if t.is_mono() {
            CounitKind::Mono
        } else {
            CounitKind::Neither
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CounitKind::Iso => "iso",
            CounitKind::Mono => "mono",
            CounitKind::Neither => "neither",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounitReport {
    pub kinds: Vec<CounitKind>,
    pub idempotent: bool,
    pub failure: Option<String>,
}

impl CounitReport {
    pub fn all_iso(&self) -> bool {
        self.kinds.iter().all(|&k| k == CounitKind::Iso)
    }
}

/// `F̄(Φ) → F(Φ)`.
pub fn counit(data: &NewtonData, phi: &Arc<Presheaf>) -> Result<NatTrans> {
    let id = ProfMorphism::identity(data.sequence.prof());
    transpose_up(data, &data.sequence, &id, phi)
}

/// `Δ_*` of the counit, `Δ_*[F̄](0) → Δ_*[F](0)`; an isomorphism when the
/// comonad is idempotent at `F`.
pub fn idempotence_map(data: &NewtonData) -> Result<ProfMorphism> {
    let again = delta_star(&FunctorExpr::AnalyticSoft(data.sequence.clone()), data.max_arity)?;
    let cod = data.source.cod();
    let mut comps = Vec::new();
    for so in data.gen().objects() {
        let eps = counit(data, data.q(so))?;
        for b in cod.objects() {
            let row = (0..again.sequence.prof().size(so, b))
                .map(|k| {
                    data.position(so, b, eps.apply(b, again.witness(so, b, k)))
                        .ok_or_else(|| Error::NotNew(again.sequence.prof().cell(so, b)[k].clone()))
                })
                .collect::<Result<Vec<_>>>()?;
            comps.push(row);
        }
    }
    ProfMorphism::new(again.sequence.prof().clone(), data.sequence.prof().clone(), comps)
}

pub fn check_counit_iso(f: &FunctorExpr, max_arity: usize, tests: &[Arc<Presheaf>]) -> CounitReport {
    let data = match delta_star(f, max_arity) {
        Ok(d) => d,
        Err(e) => {
            return CounitReport {
                kinds: Vec::new(),
                idempotent: false,
                failure: Some(e.to_string()),
            }
        }
    };
    let mut kinds = Vec::with_capacity(tests.len());
    for phi in tests {
        match counit(&data, phi) {
            Ok(t) => kinds.push(CounitKind::of(&t)),
            Err(e) => {
                return CounitReport {
                    kinds,
                    idempotent: false,
                    failure: Some(e.to_string()),
                }
            }
        }
    }
    let (idempotent, failure) = match idempotence_map(&data) {
        Ok(m) if m.is_iso() => (true, None),
        Ok(_) => (false, Some("Δ_* of the counit is not invertible".into())),
        Err(e) => (false, Some(e.to_string())),
    };
    CounitReport {
        kinds,
        idempotent,
        failure,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::tests::{one, set_of, trivial_on_one};
    use crate::analytic::soften;
    use crate::funcalc::tests::square;
    use crate::presheaf::fixtures::{arr, phi_arr};
    use crate::prof::identity_prof;

    fn cospan() -> Arc<FinCategory> {
        Arc::new(FinCategory::poset(&["x", "y", "z"], &[(0, 2), (1, 2)], |a, b| format!("{}{}", a, b)))
    }

    /// `Φ ↦ Φ(x) ×_{Φ(z)} Φ(y)`.
    pub(crate) fn pullback_functor() -> FunctorExpr {
        let c = cospan();
        let cells = c.objects().map(|_| vec!["*".to_string()]).collect();
        let p = Profunctor::from_fn(one(), c, cells, |_, _, x| x, |_, _, x| x);
        FunctorExpr::monomial(&Arc::new(p))
    }

    /// Over `1`: `P_1 = {p}`, `P_2 = {q}`, every action trivial, so `q` restricts to `p`.
    fn restricting() -> SymmetricSequence {
        trivial_on_one(SeqMode::Soft, 2, &[(1, "p"), (2, "q")])
    }

    #[test]
    fn delta_star_examples() {
        let s = one();
        let d = delta_star(&square(&s), 3).unwrap();
        assert_eq!(d.arity_profile(), vec![0, 1, 2, 0]);
        check_iterated_cells(&d).unwrap();
        let a = arr();
        let d = delta_star(&FunctorExpr::identity(&a), 2).unwrap();
        let info = d.gen().seq_info().unwrap();
        for so in d.gen().objects() {
            for b in a.objects() {
                let e = info.entries(so);
                let expect = if e.len() == 1 { a.hom(e[0], b).len() } else { 0 };
                assert_eq!(d.sequence.prof().size(so, b), expect);
            }
        }
        let p = Arc::new(identity_prof(&a));
        let d = delta_star(&FunctorExpr::linear(&p), 2).unwrap();
        assert_eq!(d.arity_profile(), vec![0, 3, 0]);
    }

    #[test]
    fn newton_of_linear_and_identity() {
        let a = arr();
        let phi = phi_arr(&a);
        for f in [FunctorExpr::identity(&a), FunctorExpr::linear(&Arc::new(identity_prof(&a)))] {
            let r = check_counit_iso(&f, 2, &[phi.clone(), Arc::new(Presheaf::terminal(a.clone()))]);
            assert!(r.all_iso() && r.idempotent, "{:?}", r);
        }
        let c = FunctorExpr::constant(&a, &phi);
        let d = delta_star(&c, 2).unwrap();
        assert_eq!(d.arity_profile(), vec![3, 0, 0]);
        assert!(check_counit_iso(&c, 2, &[phi]).all_iso());
    }

    #[test]
    fn unit_examples() {
        let r = check_unit_iso(&restricting());
        assert!(r.iso, "{:?}", r);
        assert!(r.cells.iter().all(|c| c.expected == c.found));
        let strict = trivial_on_one(SeqMode::Strict, 2, &[(1, "p"), (2, "q")]);
        assert!(check_unit_iso(&soften(&strict).unwrap()).iso);
        let gen = generated(&one(), 2, SeqMode::Soft);
        assert!(check_unit_iso(&SymmetricSequence::empty(&gen, &one()).unwrap()).iso);
        assert!(!check_unit_iso(&strict).iso);
    }

    #[test]
    fn counit_of_analytic_and_pullback() {
        let s = restricting();
        let f = FunctorExpr::analytic(&s);
        let tests: Vec<_> = (0..4).map(set_of).collect();
        let r = check_counit_iso(&f, 2, &tests);
        assert!(r.all_iso() && r.idempotent, "{:?}", r);
        let pb = pullback_functor();
        tense_certify(&pb).unwrap();
        let c = cospan();
        let two = Arc::new(
            Presheaf::from_fn(c.clone(), vec![vec!["a".into(), "b".into()], vec!["c".into()], vec!["d".into()]], |f, x| {
                if c.is_identity(f) { x } else { 0 }
            }),
        );
        let r = check_counit_iso(&pb, 3, &[two]);
        assert!(r.idempotent, "{:?}", r);
        assert_ne!(r.kinds[0], CounitKind::Iso);
    }

    #[test]
    fn transposes() {
        let s = restricting();
        let f = FunctorExpr::analytic(&s);
        let data = delta_star(&f, 2).unwrap();
        let u = transpose_down(&data, &data.sequence, &transpose_family(&data, &data.sequence, &ProfMorphism::identity(data.sequence.prof())).unwrap()).unwrap();
        assert!(u.is_iso());
        check_round_trips(&data, &data.sequence, &ProfMorphism::identity(data.sequence.prof())).unwrap();
        let empty = SymmetricSequence::empty(data.gen(), &one()).unwrap();
        let zero = ProfMorphism::new(empty.prof().clone(), data.sequence.prof().clone(), vec![vec![]; data.gen().object_count()]).unwrap();
        check_round_trips(&data, &empty, &zero).unwrap();
    }

    #[test]
    fn collapsing_family_is_rejected() {
        let s = restricting();
        let data = delta_star(&square(&one()), 2).unwrap();
        let evs = evaluations_at_q(&data, &s).unwrap();
        // send everything to the first element of F(Q), which is old whenever Q has two summands
        let family: Vec<NatTrans> = data
            .gen()
            .objects()
            .map(|so| {
                let dst = data.deltas[so].evaluation.value.clone();
                let n = evs[so].value.size(0);
                NatTrans::new(evs[so].value.clone(), dst.clone(), vec![vec![0; n]]).unwrap_or_else(|_| NatTrans::identity(&dst))
            })
            .collect();
        let err = transpose_down(&data, &s, &family).unwrap_err();
        assert!(matches!(err, Error::NotTense { .. } | Error::NotNew(_) | Error::EndpointMismatch), "{:?}", err);
    }
}
