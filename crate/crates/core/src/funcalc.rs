//! A grammar of tense functors `Set^A → Set^B`, their evaluation on
//! presheaves and transformations, partial and higher differences, the
//! Jacobian profunctor and the checks for the difference rules.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::analytic::{analytic_eval, analytic_map, AnalyticEval, SymmetricSequence};
use crate::error::{Error, Result};
use crate::fincat::{permutations, same, FinCategory, Obj, SeqMode};
use crate::presheaf::{flatten, is_pullback, unflatten, NatTrans, Presheaf, Subobject};
use crate::prof::{
    compose, hom_tense_check, left_hom, tensor_map, tensor_presheaf, HomProf, ProfMorphism, Profunctor, Tensor,
};

/// A functor expression. `Monomial(P)` for `P: A ⇸ B` denotes `P ⦸ (−): Set^B → Set^A`;
/// `Compose(G, F)` is `G ∘ F`.
#[derive(Clone, Debug)]
pub enum FunctorExpr {
    Identity(Arc<FinCategory>),
    Constant {
        dom: Arc<FinCategory>,
        value: Arc<Presheaf>,
    },
    Linear(Arc<Profunctor>),
    Monomial(Arc<Profunctor>),
    AnalyticStrict(SymmetricSequence),
    AnalyticSoft(SymmetricSequence),
    Sum(Arc<FunctorExpr>, Arc<FunctorExpr>),
    Product(Arc<FunctorExpr>, Arc<FunctorExpr>),
    Compose(Arc<FunctorExpr>, Arc<FunctorExpr>),
}

use FunctorExpr::*;

impl FunctorExpr {
    pub fn identity(a: &Arc<FinCategory>) -> FunctorExpr {
        Identity(a.clone())
    }

    pub fn constant(dom: &Arc<FinCategory>, value: &Arc<Presheaf>) -> FunctorExpr {
        Constant {
            dom: dom.clone(),
            value: value.clone(),
        }
    }

    pub fn linear(p: &Arc<Profunctor>) -> FunctorExpr {
        Linear(p.clone())
    }

    pub fn monomial(p: &Arc<Profunctor>) -> FunctorExpr {
        Monomial(p.clone())
    }

    /// Strict or soft according to the sequence's mode.
    pub fn analytic(s: &SymmetricSequence) -> FunctorExpr {
        match s.mode() {
            SeqMode::Strict => AnalyticStrict(s.clone()),
            SeqMode::Soft => AnalyticSoft(s.clone()),
        }
    }

    pub fn sum(f: FunctorExpr, g: FunctorExpr) -> Result<FunctorExpr> {
        check_parallel(&f, &g)?;
        Ok(Sum(Arc::new(f), Arc::new(g)))
    }

    pub fn product(f: FunctorExpr, g: FunctorExpr) -> Result<FunctorExpr> {
        check_parallel(&f, &g)?;
        Ok(Product(Arc::new(f), Arc::new(g)))
    }

    /// `g ∘ f`.
    pub fn compose(g: FunctorExpr, f: FunctorExpr) -> Result<FunctorExpr> {
        if !same(f.cod(), g.dom()) {
            return Err(Error::EndpointMismatch);
        }
        Ok(Compose(Arc::new(g), Arc::new(f)))
    }

    /// `S_A = Id + A(A, −)` on an endo-base.
    pub fn shift(base: &Arc<FinCategory>, a: Obj) -> Result<FunctorExpr> {
        let rep = Arc::new(Presheaf::representable(base, a)?);
        FunctorExpr::sum(Identity(base.clone()), FunctorExpr::constant(base, &rep))
    }

    pub fn dom(&self) -> &Arc<FinCategory> {
        match self {
            Identity(a) => a,
            Constant { dom, .. } => dom,
            Linear(p) => p.src(),
            Monomial(p) => p.dst(),
            AnalyticStrict(s) | AnalyticSoft(s) => s.base(),
            Sum(f, _) | Product(f, _) => f.dom(),
            Compose(_, f) => f.dom(),
        }
    }

    pub fn cod(&self) -> &Arc<FinCategory> {
        match self {
            Identity(a) => a,
            Constant { value, .. } => value.base(),
            Linear(p) => p.dst(),
            Monomial(p) => p.src(),
            AnalyticStrict(s) | AnalyticSoft(s) => s.target(),
            Sum(f, _) | Product(f, _) => f.cod(),
            Compose(g, _) => g.cod(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Identity(_) => "Identity",
            Constant { .. } => "Constant",
            Linear(_) => "Linear",
            Monomial(_) => "Monomial",
            AnalyticStrict(_) => "AnalyticStrict",
            AnalyticSoft(_) => "AnalyticSoft",
            Sum(..) => "Sum",
            Product(..) => "Product",
            Compose(..) => "Compose",
        }
    }

    /// Whether the grammar guarantees `F(Φ + Ψ) ≅ F(Φ) + F(Ψ)`.
    pub fn preserves_binary_coproducts(&self) -> bool {
        match self {
            Identity(_) | Linear(_) => true,
            Constant { value, .. } => value.total_size() == 0,
            Sum(f, g) | Compose(f, g) => f.preserves_binary_coproducts() && g.preserves_binary_coproducts(),
            _ => false,
        }
    }
}

impl fmt::Display for FunctorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sum(x, y) => write!(f, "({} + {})", x, y),
            Product(x, y) => write!(f, "({} × {})", x, y),
            Compose(g, x) => write!(f, "{}∘{}", g, x),
            other => f.write_str(other.kind()),
        }
    }
}

fn check_parallel(f: &FunctorExpr, g: &FunctorExpr) -> Result<()> {
    if same(f.dom(), g.dom()) && same(f.cod(), g.cod()) {
        Ok(())
    } else {
        Err(Error::EndpointMismatch)
    }
}

/// `F(Φ)` with whatever intermediate tables are needed to apply `F` to maps.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub value: Arc<Presheaf>,
    pub input: Arc<Presheaf>,
    detail: Detail,
}

#[derive(Clone, Debug)]
enum Detail {
    Plain,
    Tensor(Tensor),
    Hom(HomProf),
    Analytic(AnalyticEval),
    Pair(Box<Evaluation>, Box<Evaluation>),
    /// inner `F(Φ)`, outer `G(F(Φ))`
    Nested(Box<Evaluation>, Box<Evaluation>),
}

impl Evaluation {
    pub fn tensor(&self) -> Option<&Tensor> {
        match &self.detail {
            Detail::Tensor(t) => Some(t),
            _ => None,
        }
    }

    pub fn hom(&self) -> Option<&HomProf> {
        match &self.detail {
            Detail::Hom(h) => Some(h),
            _ => None,
        }
    }

    pub fn analytic(&self) -> Option<&AnalyticEval> {
        match &self.detail {
            Detail::Analytic(a) => Some(a),
            _ => None,
        }
    }

    /// Summand or factor evaluations of a sum or product.
    pub fn pair(&self) -> Option<(&Evaluation, &Evaluation)> {
        match &self.detail {
            Detail::Pair(x, y) => Some((x, y)),
            _ => None,
        }
    }

    /// `(F(Φ), G(F(Φ)))` for a composite.
    pub fn nested(&self) -> Option<(&Evaluation, &Evaluation)> {
        match &self.detail {
            Detail::Nested(x, y) => Some((x, y)),
            _ => None,
        }
    }
}

pub fn eval(f: &FunctorExpr, phi: &Arc<Presheaf>) -> Result<Evaluation> {
    if !same(f.dom(), phi.base()) {
        return Err(Error::BaseMismatch);
    }
    let (value, detail) = match f {
        Identity(_) => (phi.clone(), Detail::Plain),
        Constant { value, .. } => (value.clone(), Detail::Plain),
        Linear(p) => {
            let t = tensor_presheaf(p, phi)?;
            (t.value.clone(), Detail::Tensor(t))
        }
        Monomial(p) => {
            let r = Profunctor::from_presheaf_column(phi);
            let h = left_hom(p, &r)?;
            (Arc::new(h.value.row_presheaf(0)), Detail::Hom(h))
        }
        AnalyticStrict(s) | AnalyticSoft(s) => {
            let ev = analytic_eval(s, phi)?;
            (ev.value.clone(), Detail::Analytic(ev))
        }
        Sum(x, y) | Product(x, y) => {
            let (ex, ey) = (eval(x, phi)?, eval(y, phi)?);
            let parts = [&*ex.value, &*ey.value];
            let v = if matches!(f, Sum(..)) {
                Presheaf::coproduct(&parts)?
            } else {
                Presheaf::product(&parts)?
            };
            (Arc::new(v), Detail::Pair(Box::new(ex), Box::new(ey)))
        }
        Compose(g, x) => {
            let inner = eval(x, phi)?;
            let outer = eval(g, &inner.value)?;
            (outer.value.clone(), Detail::Nested(Box::new(inner), Box::new(outer)))
        }
    };
    Ok(Evaluation {
        value,
        input: phi.clone(),
        detail,
    })
}

/// `F(t): F(Φ) → F(Ψ)` between precomputed evaluations at `Φ = t.src`, `Ψ = t.dst`.
pub fn eval_nat(f: &FunctorExpr, t: &NatTrans, src: &Evaluation, dst: &Evaluation) -> Result<NatTrans> {
    if **t.src() != *src.input || **t.dst() != *dst.input {
        return Err(Error::EndpointMismatch);
    }
    match (f, &src.detail, &dst.detail) {
        (Identity(_), _, _) => NatTrans::new(src.value.clone(), dst.value.clone(), t.components().to_vec()),
        (Constant { .. }, _, _) => Ok(NatTrans::identity(&src.value)),
        (Linear(p), Detail::Tensor(a), Detail::Tensor(b)) => Ok(tensor_map(p, t, a, b)),
        (Monomial(p), Detail::Hom(h1), Detail::Hom(h2)) => {
            let comps = p
                .src()
                .objects()
                .map(|a| {
                    (0..src.value.size(a))
                        .map(|k| {
                            let fam: Vec<Vec<usize>> = h1
                                .family(0, a, k)
                                .iter()
                                .enumerate()
                                .map(|(c, row)| row.iter().map(|&v| t.apply(c, v)).collect())
                                .collect();
                            h2.lookup(0, a, &fam)
                                .ok_or_else(|| Error::NotNatural(src.value.label(a, k).to_string()))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            NatTrans::new(src.value.clone(), dst.value.clone(), comps)
        }
        (AnalyticStrict(s) | AnalyticSoft(s), Detail::Analytic(a), Detail::Analytic(b)) => Ok(analytic_map(s, t, a, b)),
        (Sum(x, y) | Product(x, y), Detail::Pair(sx, sy), Detail::Pair(dx, dy)) => {
            let tx = eval_nat(x, t, sx, dx)?;
            let ty = eval_nat(y, t, sy, dy)?;
            Ok(if matches!(f, Sum(..)) {
                NatTrans::coproduct_between(src.value.clone(), dst.value.clone(), &[&tx, &ty])
            } else {
                NatTrans::product_between(src.value.clone(), dst.value.clone(), &[&tx, &ty])
            })
        }
        (Compose(g, x), Detail::Nested(si, so), Detail::Nested(di, dout)) => {
            let inner = eval_nat(x, t, si, di)?;
            eval_nat(g, &inner, so, dout)
        }
        _ => Err(Error::EndpointMismatch),
    }
}

/// `F(t)`, evaluating both endpoints.
pub fn map(f: &FunctorExpr, t: &NatTrans) -> Result<NatTrans> {
    eval_nat(f, t, &eval(f, t.src())?, &eval(f, t.dst())?)
}

/// The reason each node of an expression is tense.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TenseRule {
    Cocontinuous,
    HomPi0,
    Analytic,
    ClosureSum,
    ClosureProduct,
    ClosureCompose,
    Constant,
    Identity,
}

impl TenseRule {
    pub fn name(self) -> &'static str {
        match self {
            TenseRule::Cocontinuous => "cocontinuous",
            TenseRule::HomPi0 => "hom-π0",
            TenseRule::Analytic => "analytic",
            TenseRule::ClosureSum => "closure-sum",
            TenseRule::ClosureProduct => "closure-product",
            TenseRule::ClosureCompose => "closure-compose",
            TenseRule::Constant => "constant",
            TenseRule::Identity => "identity",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TenseCertificate {
    pub node: String,
    pub rule: TenseRule,
    pub children: Vec<TenseCertificate>,
}

impl TenseCertificate {
    /// `(node, rule)` pairs in preorder.
    pub fn flatten(&self) -> Vec<(String, &'static str)> {
        let mut out = vec![(self.node.clone(), self.rule.name())];
        for c in &self.children {
            out.extend(c.flatten());
        }
        out
    }
}

pub fn tense_certify(f: &FunctorExpr) -> Result<TenseCertificate> {
    certify_at(f, "root".to_string())
}

fn certify_at(f: &FunctorExpr, node: String) -> Result<TenseCertificate> {
    let leaf = |rule| TenseCertificate {
        node: node.clone(),
        rule,
        children: Vec::new(),
    };
    Ok(match f {
        Identity(_) => leaf(TenseRule::Identity),
        Constant { .. } => leaf(TenseRule::Constant),
        Linear(_) => leaf(TenseRule::Cocontinuous),
        AnalyticStrict(_) | AnalyticSoft(_) => leaf(TenseRule::Analytic),
        Monomial(p) => {
            let h = hom_tense_check(p);
            if let Some((m, b, x)) = h.witness {
                return Err(Error::NotTense {
                    node: format!("{} (Monomial)", node),
                    witness: format!("{} misses the component of {} at {}", m, x, b),
                });
            }
            leaf(TenseRule::HomPi0)
        }
        Sum(x, y) | Product(x, y) | Compose(x, y) => {
            let rule = match f {
                Sum(..) => TenseRule::ClosureSum,
                Product(..) => TenseRule::ClosureProduct,
                _ => TenseRule::ClosureCompose,
            };
            TenseCertificate {
                children: vec![certify_at(x, format!("{}/0", node))?, certify_at(y, format!("{}/1", node))?],
                node,
                rule,
            }
        }
    })
}

/// Coproduct of a list of presheaves (at least one).
pub fn sum_of(parts: &[Arc<Presheaf>]) -> Result<Arc<Presheaf>> {
    let refs: Vec<&Presheaf> = parts.iter().map(|p| &**p).collect();
    Ok(Arc::new(Presheaf::coproduct(&refs)?))
}

/// The map between coproducts sending summand `k` identically to summand `slots[k]`.
pub fn slot_map(
    src_parts: &[Arc<Presheaf>],
    src: &Arc<Presheaf>,
    dst_parts: &[Arc<Presheaf>],
    dst: &Arc<Presheaf>,
    slots: &[usize],
) -> Result<NatTrans> {
    if slots.len() != src_parts.len() || slots.iter().zip(src_parts).any(|(&j, p)| j >= dst_parts.len() || **p != *dst_parts[j]) {
        return Err(Error::EndpointMismatch);
    }
    let comps = src
        .base()
        .objects()
        .map(|a| {
            let mut row = Vec::with_capacity(src.size(a));
            for (k, p) in src_parts.iter().enumerate() {
                let off: usize = dst_parts[..slots[k]].iter().map(|q| q.size(a)).sum();
                row.extend((0..p.size(a)).map(|x| x + off));
            }
            row
        })
        .collect();
    NatTrans::new(src.clone(), dst.clone(), comps)
}

/// `[t_0, t_1, …]: Σ src_k → dst` out of a given coproduct.
pub fn copair(src: &Arc<Presheaf>, parts: &[&NatTrans]) -> Result<NatTrans> {
    let dst = parts.first().map(|t| t.dst().clone()).ok_or(Error::EndpointMismatch)?;
    let comps = src
        .base()
        .objects()
        .map(|a| parts.iter().flat_map(|t| t.component(a).iter().copied()).collect())
        .collect();
    NatTrans::new(src.clone(), dst, comps)
}

fn not_mono(t: &NatTrans) -> Error {
    Error::NotTense {
        node: "root".into(),
        witness: format!("F(injection) into {} is not mono", t.dst().total_size()),
    }
}

/// `Δ_A[F](Φ) ⊆ F(Φ + A(A, −))` with everything used to build it.
#[derive(Clone, Debug)]
pub struct Delta {
    pub a: Obj,
    pub phi: Arc<Presheaf>,
    pub rep: Arc<Presheaf>,
    /// `Φ + A(A, −)`
    pub shifted: Arc<Presheaf>,
    pub at_phi: Evaluation,
    pub at_shifted: Evaluation,
    /// `F(inj₁)`
    pub inclusion: NatTrans,
    pub sub: Subobject,
}

impl Delta {
    pub fn presheaf(&self) -> (Arc<Presheaf>, NatTrans) {
        self.sub.to_presheaf()
    }

    /// The preimage under `F(inj₁)` of an old element.
    pub fn preimage(&self, b: Obj, y: usize) -> Option<usize> {
        self.inclusion.component(b).iter().position(|&x| x == y)
    }
}

pub fn delta_a(f: &FunctorExpr, a: Obj, phi: &Arc<Presheaf>) -> Result<Delta> {
    let at_phi = eval(f, phi)?;
    delta_from(f, a, phi, at_phi)
}

fn delta_from(f: &FunctorExpr, a: Obj, phi: &Arc<Presheaf>, at_phi: Evaluation) -> Result<Delta> {
    let rep = Arc::new(Presheaf::representable(phi.base(), a)?);
    let shifted = Arc::new(Presheaf::coproduct(&[phi, &rep])?);
    let inj = Presheaf::injection(&[phi, &rep], 0, &shifted);
    let at_shifted = eval(f, &shifted)?;
    let inclusion = eval_nat(f, &inj, &at_phi, &at_shifted)?;
    if !inclusion.is_mono() {
        return Err(not_mono(&inclusion));
    }
    let sub = inclusion.image().complement()?;
    Ok(Delta {
        a,
        phi: phi.clone(),
        rep,
        shifted,
        at_phi,
        at_shifted,
        inclusion,
        sub,
    })
}

/// `Δ[F](Φ): A ⇸ B` with its cells realized inside `F(Φ + A(a, −))(b)`.
#[derive(Clone, Debug)]
pub struct Jacobian {
    pub value: Arc<Profunctor>,
    pub phi: Arc<Presheaf>,
    pub at_phi: Evaluation,
    pub deltas: Vec<Delta>,
    members: Vec<Vec<Vec<usize>>>,
    position: Vec<Vec<HashMap<usize, usize>>>,
}

impl Jacobian {
    /// The element of `F(Φ + A(a, −))(b)` realizing cell element `k`.
    pub fn element(&self, a: Obj, b: Obj, k: usize) -> usize {
        self.members[a][b][k]
    }

    /// The cell index of a new element.
    pub fn position(&self, a: Obj, b: Obj, x: usize) -> Option<usize> {
        self.position[a][b].get(&x).copied()
    }
}

/// `Φ + A(f, −): Φ + A(a, −) → Φ + A(a', −)` for `f: a' → a`.
pub fn shift_map(base: &FinCategory, f: crate::fincat::Mor, from: &Delta, to: &Delta) -> NatTrans {
    let id = NatTrans::identity(&from.phi);
    let r = NatTrans::rep_map_between(base, f, from.rep.clone(), to.rep.clone());
    NatTrans::coproduct_between(from.shifted.clone(), to.shifted.clone(), &[&id, &r])
}

pub fn jacobian(f: &FunctorExpr, phi: &Arc<Presheaf>) -> Result<Jacobian> {
    let at_phi = eval(f, phi)?;
    let (ca, cb) = (f.dom().clone(), f.cod().clone());
    let deltas = ca
        .objects()
        .map(|a| delta_from(f, a, phi, at_phi.clone()))
        .collect::<Result<Vec<_>>>()?;
    let members: Vec<Vec<Vec<usize>>> = deltas
        .iter()
        .map(|d| cb.objects().map(|b| d.sub.members(b)).collect())
        .collect();
    let position: Vec<Vec<HashMap<usize, usize>>> = members
        .iter()
        .map(|rows| rows.iter().map(|ms| ms.iter().enumerate().map(|(k, &x)| (x, k)).collect()).collect())
        .collect();
    let cells = ca
        .objects()
        .flat_map(|a| cb.objects().map(move |b| (a, b)))
        .map(|(a, b)| {
            members[a][b]
                .iter()
                .map(|&x| deltas[a].at_shifted.value.label(b, x).to_string())
                .collect()
        })
        .collect();
    let mut left = Vec::with_capacity(ca.morphism_count());
    for m in ca.morphisms() {
        let (a2, a) = (ca.src(m), ca.dst(m));
        let sm = shift_map(&ca, m, &deltas[a], &deltas[a2]);
        let fm = eval_nat(f, &sm, &deltas[a].at_shifted, &deltas[a2].at_shifted)?;
        let mut per_b = Vec::with_capacity(cb.object_count());
        for b in cb.objects() {
            let row = members[a][b]
                .iter()
                .map(|&x| {
                    position[a2][b].get(&fm.apply(b, x)).copied().ok_or_else(|| {
                        Error::ActionEscapesNewElements(format!("{} on {}", ca.morphism_name(m), cb.object_name(b)))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            per_b.push(row);
        }
        left.push(per_b);
    }
    let mut right = Vec::with_capacity(cb.morphism_count());
    for g in cb.morphisms() {
        let (b, b2) = (cb.src(g), cb.dst(g));
        let mut per_a = Vec::with_capacity(ca.object_count());
        for a in ca.objects() {
            let v = &deltas[a].at_shifted.value;
            let row = members[a][b]
                .iter()
                .map(|&x| {
                    position[a][b2]
                        .get(&v.act(g, x))
                        .copied()
                        .ok_or_else(|| Error::ActionEscapesNewElements(cb.morphism_name(g).to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            per_a.push(row);
        }
        right.push(per_a);
    }
    let value = Arc::new(Profunctor::new(ca, cb, cells, left, right)?);
    Ok(Jacobian {
        value,
        phi: phi.clone(),
        at_phi,
        deltas,
        members,
        position,
    })
}

/// `Δ[F](φ): Δ[F](Φ) → Δ[F](Ψ)`, the restriction of `F(φ + 1)`.
pub fn jacobian_map(f: &FunctorExpr, phi: &NatTrans, src: &Jacobian, dst: &Jacobian) -> Result<ProfMorphism> {
    let (ca, cb) = (f.dom(), f.cod());
    let mut comps = Vec::with_capacity(ca.object_count() * cb.object_count());
    for a in ca.objects() {
        let (ds, dd) = (&src.deltas[a], &dst.deltas[a]);
        let id = NatTrans::identity(&ds.rep);
        let m = NatTrans::coproduct_between(ds.shifted.clone(), dd.shifted.clone(), &[phi, &id]);
        let fm = eval_nat(f, &m, &ds.at_shifted, &dd.at_shifted)?;
        for b in cb.objects() {
            let row = (0..src.value.size(a, b))
                .map(|k| {
                    dst.position(a, b, fm.apply(b, src.element(a, b, k)))
                        .ok_or_else(|| Error::NotNew(src.value.cell(a, b)[k].clone()))
                })
                .collect::<Result<Vec<_>>>()?;
            comps.push(row);
        }
    }
    ProfMorphism::new(src.value.clone(), dst.value.clone(), comps)
}

/// A higher difference as a subobject of `F(Φ + Σ A(A_i, −))`.
#[derive(Clone, Debug)]
pub struct HigherDelta {
    pub seq: Vec<Obj>,
    /// `[Φ, A(A_1, −), …]`
    pub parts: Vec<Arc<Presheaf>>,
    pub ambient: Arc<Presheaf>,
    pub evaluation: Evaluation,
    pub sub: Subobject,
}

fn reps(base: &Arc<FinCategory>, seq: &[Obj]) -> Result<Vec<Arc<Presheaf>>> {
    seq.iter().map(|&a| Presheaf::representable(base, a).map(Arc::new)).collect()
}

/// Elements of `F(Σ parts)` outside the image of every subsum omitting one of
/// the summands `parts[fixed..]`.
pub fn new_elements(f: &FunctorExpr, parts: &[Arc<Presheaf>], fixed: usize, at: &Evaluation) -> Result<Subobject> {
    let mut old = Subobject::empty(at.value.clone());
    for j in fixed..parts.len() {
        let sub_parts: Vec<Arc<Presheaf>> = parts
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, p)| p.clone())
            .collect();
        let slots: Vec<usize> = (0..parts.len()).filter(|&i| i != j).collect();
        let s = if sub_parts.is_empty() {
            Arc::new(Presheaf::empty(at.input.base().clone()))
        } else {
            sum_of(&sub_parts)?
        };
        let incl = if sub_parts.is_empty() {
            NatTrans::new(s.clone(), at.input.clone(), at.input.base().objects().map(|_| Vec::new()).collect())?
        } else {
            slot_map(&sub_parts, &s, parts, &at.input, &slots)?
        };
        let fi = eval_nat(f, &incl, &eval(f, &s)?, at)?;
        if !fi.is_mono() {
            return Err(not_mono(&fi));
        }
        let img = fi.image();
        if !img.is_complemented() {
            img.complement()?;
        }
        old = old.join(&img);
    }
    old.complement()
}

/// The direct new-element formula.
pub fn higher_delta_new(f: &FunctorExpr, seq: &[Obj], phi: &Arc<Presheaf>) -> Result<HigherDelta> {
    let mut parts = vec![phi.clone()];
    parts.extend(reps(phi.base(), seq)?);
    let ambient = sum_of(&parts)?;
    let evaluation = eval(f, &ambient)?;
    let sub = new_elements(f, &parts, 1, &evaluation)?;
    Ok(HigherDelta {
        seq: seq.to_vec(),
        parts,
        ambient,
        evaluation,
        sub,
    })
}

/// `Δ_{A_n} ⋯ Δ_{A_1}[F](Φ)`, reindexed into `F(Φ + Σ A(A_i, −))`.
pub fn higher_delta_iterated(f: &FunctorExpr, seq: &[Obj], phi: &Arc<Presheaf>) -> Result<HigherDelta> {
    let (parts, ambient, evaluation, sub) = iterate(f, vec![phi.clone()], seq)?;
    Ok(HigherDelta {
        seq: seq.to_vec(),
        parts,
        ambient,
        evaluation,
        sub,
    })
}

type Iterated = (Vec<Arc<Presheaf>>, Arc<Presheaf>, Evaluation, Subobject);

fn iterate(f: &FunctorExpr, parts: Vec<Arc<Presheaf>>, seq: &[Obj]) -> Result<Iterated> {
    let Some((&an, rest)) = seq.split_last() else {
        let sum = sum_of(&parts)?;
        let ev = eval(f, &sum)?;
        let sub = Subobject::full(ev.value.clone());
        return Ok((parts, sum, ev, sub));
    };
    let base = parts[0].base().clone();
    let np = parts.len();
    let rep_n = Arc::new(Presheaf::representable(&base, an)?);
    let mut shifted = parts.clone();
    shifted.push(rep_n.clone());
    // the inner difference at Ψ + A(A_n, −) and at Ψ
    let (dparts, dsum, dev, dsub) = iterate(f, shifted, rest)?;
    let (eparts, esum, eev, esub) = iterate(f, parts, rest)?;
    let slots: Vec<usize> = (0..eparts.len()).map(|k| if k < np { k } else { k + 1 }).collect();
    let finc = eval_nat(f, &slot_map(&eparts, &esum, &dparts, &dsum, &slots)?, &eev, &dev)?;
    let cod = f.cod();
    let mut keep: Vec<Vec<bool>> = dsub.membership().to_vec();
    for b in cod.objects() {
        for x in esub.members(b) {
            let y = finc.apply(b, x);
            if !dsub.contains(b, y) {
                return Err(Error::ActionEscapesNewElements(format!("inclusion at {}", cod.object_name(b))));
            }
            keep[b][y] = false;
        }
    }
    let mut tparts = eparts;
    tparts.push(rep_n);
    let tsum = sum_of(&tparts)?;
    let tev = eval(f, &tsum)?;
    let last = dparts.len() - 1;
    let slots: Vec<usize> = (0..dparts.len())
        .map(|k| match k.cmp(&np) {
            std::cmp::Ordering::Less => k,
            std::cmp::Ordering::Equal => last,
            std::cmp::Ordering::Greater => k - 1,
        })
        .collect();
    let fiso = eval_nat(f, &slot_map(&dparts, &dsum, &tparts, &tsum, &slots)?, &dev, &tev)?;
    let mut member: Vec<Vec<bool>> = cod.objects().map(|b| vec![false; tev.value.size(b)]).collect();
    for b in cod.objects() {
        for (x, &k) in keep[b].iter().enumerate() {
            if k {
                member[b][fiso.apply(b, x)] = true;
            }
        }
    }
    let sub = Subobject::new(tev.value.clone(), member)?;
    Ok((tparts, tsum, tev, sub))
}

/// Both formulas, which must agree.
pub fn higher_delta(f: &FunctorExpr, seq: &[Obj], phi: &Arc<Presheaf>) -> Result<HigherDelta> {
    let direct = higher_delta_new(f, seq, phi)?;
    let iterated = higher_delta_iterated(f, seq, phi)?;
    if direct.sub.membership() != iterated.sub.membership() {
        return Err(Error::LawViolation(format!(
            "iterated and new-element differences disagree for {:?}",
            seq
        )));
    }
    Ok(direct)
}

/// The higher difference for every reordering of `seq` maps onto the same
/// subobject under the canonical reindexing isomorphism.
pub fn check_clairaut(f: &FunctorExpr, seq: &[Obj], phi: &Arc<Presheaf>) -> Result<()> {
    let reference = higher_delta_new(f, seq, phi)?;
    for sigma in permutations(seq.len()) {
        let permuted: Vec<Obj> = sigma.iter().map(|&i| seq[i]).collect();
        let h = higher_delta_new(f, &permuted, phi)?;
        let mut slots = vec![0];
        slots.extend(sigma.iter().map(|&i| i + 1));
        let iso = slot_map(&h.parts, &h.ambient, &reference.parts, &reference.ambient, &slots)?;
        let fiso = eval_nat(f, &iso, &h.evaluation, &reference.evaluation)?;
        let image = h.sub.to_presheaf().1;
        let moved = fiso.after(&image)?.image();
        if moved.membership() != reference.sub.membership() {
            return Err(Error::LawViolation(format!("reordering {:?} of {:?}", sigma, seq)));
        }
    }
    Ok(())
}

/// The transformation `u: F(Φ) + B(b, −) → F(Φ + A(a, −))` of a new element.
pub fn ppi_of_element(f: &FunctorExpr, phi: &Arc<Presheaf>, a: Obj, b: Obj, x: usize) -> Result<NatTrans> {
    ppi_from_delta(&delta_a(f, a, phi)?, b, x)
}

pub fn ppi_from_delta(d: &Delta, b: Obj, x: usize) -> Result<NatTrans> {
    let fphi = &d.at_phi.value;
    let target = &d.at_shifted.value;
    if b >= target.base().object_count() || x >= target.size(b) {
        return Err(Error::UnknownElement(x.to_string()));
    }
    if !d.sub.contains(b, x) {
        return Err(Error::NotNew(target.label(b, x).to_string()));
    }
    let repb = Arc::new(Presheaf::representable(target.base(), b)?);
    let dom = Arc::new(Presheaf::coproduct(&[fphi, &repb])?);
    let xbar = NatTrans::from_elements(repb.clone(), target, &[x])?;
    let u = copair(&dom, &[&d.inclusion, &xbar])?;
    let inj1 = Presheaf::injection(&[fphi, &repb], 0, &dom);
    if !is_pullback(&inj1, &NatTrans::identity(fphi), &u, &d.inclusion) {
        return Err(Error::NotPPI(target.label(b, x).to_string()));
    }
    if ppi_to_element(&u, fphi, b) != x {
        return Err(Error::NotPPI(format!("round trip of {}", target.label(b, x))));
    }
    Ok(u)
}

/// `u(b)(inj₂(1_b))`.
pub fn ppi_to_element(u: &NatTrans, fphi: &Presheaf, b: Obj) -> usize {
    let c = fphi.base();
    u.apply(b, fphi.size(b) + c.identity(b) - c.hom(b, b).start)
}

/// `D[F](Φ, Ψ) = Δ[F](Φ) ⊗ Ψ`.
pub fn difference_operator(f: &FunctorExpr, phi: &Arc<Presheaf>, psi: &Arc<Presheaf>) -> Result<(Jacobian, Tensor)> {
    let j = jacobian(f, phi)?;
    let t = tensor_presheaf(&j.value, psi)?;
    Ok((j, t))
}

/// `T[F](Φ, Ψ) = (F(Φ), D[F](Φ, Ψ))`.
pub fn tangent(f: &FunctorExpr, phi: &Arc<Presheaf>, psi: &Arc<Presheaf>) -> Result<(Arc<Presheaf>, Arc<Presheaf>)> {
    let (j, t) = difference_operator(f, phi, psi)?;
    Ok((j.at_phi.value.clone(), t.value))
}

/// `Cor(F)(a, b) = F(A(a, −))(b)`.
#[derive(Clone, Debug)]
pub struct Core {
    pub value: Arc<Profunctor>,
    pub reps: Vec<Arc<Presheaf>>,
    pub evals: Vec<Evaluation>,
}

pub fn core(f: &FunctorExpr) -> Result<Core> {
    let (ca, cb) = (f.dom().clone(), f.cod().clone());
    let reps = reps(&ca, &ca.objects().collect::<Vec<_>>())?;
    let evals = reps.iter().map(|r| eval(f, r)).collect::<Result<Vec<_>>>()?;
    let maps = ca
        .morphisms()
        .map(|m| {
            let (a2, a) = (ca.src(m), ca.dst(m));
            let r = NatTrans::rep_map_between(&ca, m, reps[a].clone(), reps[a2].clone());
            eval_nat(f, &r, &evals[a], &evals[a2])
        })
        .collect::<Result<Vec<_>>>()?;
    let cells = ca
        .objects()
        .flat_map(|a| cb.objects().map(move |b| (a, b)))
        .map(|(a, b)| evals[a].value.labels(b).to_vec())
        .collect();
    let left = maps
        .iter()
        .map(|t| cb.objects().map(|b| t.component(b).to_vec()).collect())
        .collect();
    let right = cb
        .morphisms()
        .map(|g| ca.objects().map(|a| evals[a].value.action(g).to_vec()).collect())
        .collect();
    let value = Arc::new(Profunctor::new(ca, cb, cells, left, right)?);
    Ok(Core { value, reps, evals })
}

/// `Cor(F) ⊗ Φ → F(Φ)`, `[x, y] ↦ F(x̄)(y)`, checked on every generator.
pub fn core_counit(f: &FunctorExpr, phi: &Arc<Presheaf>) -> Result<NatTrans> {
    let c = core(f)?;
    let t = tensor_presheaf(&c.value, phi)?;
    let at_phi = eval(f, phi)?;
    let mut cache: HashMap<(Obj, usize), NatTrans> = HashMap::new();
    let mut comps = Vec::new();
    for b in f.cod().objects() {
        let co = t.coend(b);
        let mut row = vec![usize::MAX; co.class_count()];
        for g in 0..co.generator_count() {
            let (a, x, y) = co.generator(g);
            let fx = match cache.get(&(a, x)) {
                Some(m) => m,
                None => {
                    let xbar = NatTrans::from_elements(c.reps[a].clone(), phi, &[x])?;
                    let m = eval_nat(f, &xbar, &c.evals[a], &at_phi)?;
                    cache.entry((a, x)).or_insert(m)
                }
            };
            let img = fx.apply(b, y);
            let cl = co.class_of_generator(g);
            if row[cl] == usize::MAX {
                row[cl] = img;
            } else if row[cl] != img {
                return Err(Error::NotWellDefined(t.value.label(b, cl).to_string()));
            }
        }
        comps.push(row);
    }
    NatTrans::new(t.value.clone(), at_phi.value.clone(), comps)
}

/// The naturality square of `α` along `i: Ψ → Φ` is a pullback.
pub fn is_tense_square(f_i: &NatTrans, alpha_psi: &NatTrans, alpha_phi: &NatTrans, g_i: &NatTrans) -> bool {
    is_pullback(alpha_psi, f_i, g_i, alpha_phi)
}

/// `F(i)` is a mono with complemented image, for a complemented mono `i`.
pub fn preserves_complemented(f: &FunctorExpr, i: &NatTrans) -> Result<bool> {
    let fi = map(f, i)?;
    Ok(fi.is_mono() && fi.image().is_complemented())
}

/// `F(i)` is a mono.
pub fn preserves_mono(f: &FunctorExpr, i: &NatTrans) -> Result<bool> {
    Ok(map(f, i)?.is_mono())
}

fn law(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::LawViolation(what()))
    }
}

/// `F(Φ) + Δ_A[F](Φ) → F(Φ + A(A, −))` is an isomorphism.
pub fn check_partial_decomposition(f: &FunctorExpr, a: Obj, phi: &Arc<Presheaf>) -> Result<()> {
    let d = delta_a(f, a, phi)?;
    let (dp, incl) = d.presheaf();
    let dom = Arc::new(Presheaf::coproduct(&[&d.at_phi.value, &dp])?);
    let m = copair(&dom, &[&d.inclusion, &incl])?;
    law(m.is_iso(), || format!("F(Φ) + Δ → F(Φ + A({}, −)) is not invertible", a))
}

/// `Δ[F + G](Φ) ≅ Δ[F](Φ) + Δ[G](Φ)` as profunctors.
pub fn check_sum_rule(f: &FunctorExpr, g: &FunctorExpr, phi: &Arc<Presheaf>) -> Result<()> {
    let s = FunctorExpr::sum(f.clone(), g.clone())?;
    let (js, jf, jg) = (jacobian(&s, phi)?, jacobian(f, phi)?, jacobian(g, phi)?);
    let target = Arc::new(Profunctor::coproduct(&[&jf.value, &jg.value])?);
    let mut comps = Vec::new();
    for a in f.dom().objects() {
        for b in f.cod().objects() {
            let nf = jf.deltas[a].at_shifted.value.size(b);
            let row = (0..js.value.size(a, b))
                .map(|k| {
                    let x = js.element(a, b, k);
                    let hit = if x < nf {
                        jf.position(a, b, x)
                    } else {
                        jg.position(a, b, x - nf).map(|y| y + jf.value.size(a, b))
                    };
                    hit.ok_or_else(|| Error::LawViolation(format!("sum rule at {}", js.value.cell(a, b)[k])))
                })
                .collect::<Result<Vec<_>>>()?;
            comps.push(row);
        }
    }
    let m = ProfMorphism::new(js.value.clone(), target, comps)?;
    law(m.is_iso(), || "sum rule map is not invertible".into())
}

/// The product rule for a finite family: a new tuple is classified by the
/// nonempty set of coordinates that are new, giving
/// `Δ[Π F_i] ≅ Σ_{∅≠S} Π_{i∈S} Δ[F_i] × Π_{i∉S} F_i(Φ)`.
pub fn check_product_rule(fs: &[FunctorExpr], phi: &Arc<Presheaf>) -> Result<()> {
    let (first, rest) = fs.split_first().ok_or(Error::EndpointMismatch)?;
    let mut expr = first.clone();
    for g in rest {
        expr = FunctorExpr::product(expr, g.clone())?;
    }
    let n = fs.len();
    let jp = jacobian(&expr, phi)?;
    let js = fs.iter().map(|g| jacobian(g, phi)).collect::<Result<Vec<_>>>()?;
    let ca = first.dom();
    let consts: Vec<Profunctor> = js.iter().map(|j| Profunctor::constant(ca, &j.at_phi.value)).collect();
    let blocks = (1..1usize << n)
        .map(|mask| {
            let parts: Vec<&Profunctor> = (0..n)
                .map(|i| if mask >> i & 1 == 1 { &*js[i].value } else { &consts[i] })
                .collect();
            Profunctor::product(&parts)
        })
        .collect::<Result<Vec<_>>>()?;
    let target = Arc::new(Profunctor::coproduct(&blocks.iter().collect::<Vec<_>>())?);
    let mut comps = Vec::new();
    for a in ca.objects() {
        for b in first.cod().objects() {
            let sizes: Vec<usize> = js.iter().map(|j| j.deltas[a].at_shifted.value.size(b)).collect();
            let row = (0..jp.value.size(a, b))
                .map(|k| {
                    let coords = unflatten(jp.element(a, b, k), sizes.iter().copied());
                    let new: Vec<Option<usize>> = (0..n).map(|i| js[i].position(a, b, coords[i])).collect();
                    let mask: usize = (0..n).filter(|&i| new[i].is_some()).map(|i| 1 << i).sum();
                    if mask == 0 {
                        return Err(Error::LawViolation(format!("old tuple {} in the difference", jp.value.cell(a, b)[k])));
                    }
                    let mut block = Vec::with_capacity(n);
                    let mut radix = Vec::with_capacity(n);
                    for i in 0..n {
                        if let Some(p) = new[i] {
                            block.push(p);
                            radix.push(js[i].value.size(a, b));
                        } else {
                            let y = js[i].deltas[a]
                                .preimage(b, coords[i])
                                .ok_or_else(|| Error::LawViolation("coordinate neither old nor new".into()))?;
                            block.push(y);
                            radix.push(js[i].at_phi.value.size(b));
                        }
                    }
                    let off: usize = blocks[..mask - 1].iter().map(|p| p.size(a, b)).sum();
                    Ok(off + flatten(&block, radix.into_iter()))
                })
                .collect::<Result<Vec<_>>>()?;
            comps.push(row);
        }
    }
    let m = ProfMorphism::new(jp.value.clone(), target, comps)?;
    law(m.is_iso(), || "product rule classification is not invertible".into())
}

/// `Δ[P ⊗ F](Φ) ≅ P ∘ Δ[F](Φ)`, `[x, p] ↦ [F-inclusion of x, p]`.
pub fn check_linear_scalar(p: &Arc<Profunctor>, f: &FunctorExpr, phi: &Arc<Presheaf>) -> Result<()> {
    let expr = FunctorExpr::compose(Linear(p.clone()), f.clone())?;
    let jf = jacobian(f, phi)?;
    let jpf = jacobian(&expr, phi)?;
    let comp = compose(p, &jf.value)?;
    let m = comp.morphism_from_generators(&jpf.value, |a, c, b, x, y| {
        let outer = jpf.deltas[a].at_shifted.nested().ok_or(Error::EndpointMismatch)?.1;
        let t = outer.tensor().ok_or(Error::EndpointMismatch)?;
        let cls = t.class(c, b, jf.element(a, b, x), y);
        jpf.position(a, c, cls)
            .ok_or_else(|| Error::LawViolation(format!("P ⊗ Δ lands outside the difference at {}", outer.value.label(c, cls))))
    })?;
    law(m.is_iso(), || "P ⊗ Δ[F] → Δ[P ⊗ F] is not invertible".into())
}

/// For `G` preserving binary coproducts, `Δ_A[G∘F](Φ)` is the image of
/// `G(Δ_A[F](Φ) ↪ F(Φ + A(A, −)))`.
pub fn check_compose_scalar(g: &FunctorExpr, f: &FunctorExpr, a: Obj, phi: &Arc<Presheaf>) -> Result<()> {
    if !g.preserves_binary_coproducts() {
        return Err(Error::LawViolation(format!("{} need not preserve binary coproducts", g)));
    }
    let expr = FunctorExpr::compose(g.clone(), f.clone())?;
    let d = delta_a(&expr, a, phi)?;
    let df = delta_a(f, a, phi)?;
    let (dp, incl) = df.presheaf();
    let outer = d.at_shifted.nested().ok_or(Error::EndpointMismatch)?.1;
    let gi = eval_nat(g, &incl, &eval(g, &dp)?, outer)?;
    law(gi.is_mono() && gi.image().membership() == d.sub.membership(), || {
        "G(Δ[F]) differs from Δ[G∘F]".into()
    })
}

/// `Δ_A[F](Φ)(B)` has the size of the one-variable difference at 0 of
/// `X ↦ F(A(A, −)·X + Φ)(B)`.
pub fn check_affine_reduction(f: &FunctorExpr, a: Obj, phi: &Arc<Presheaf>) -> Result<()> {
    let one = Arc::new(FinCategory::terminal());
    let rep = Presheaf::representable(phi.base(), a)?;
    let scale = Arc::new(Profunctor::from_presheaf_column(&rep));
    let translate = FunctorExpr::sum(Linear(scale), FunctorExpr::constant(&one, phi))?;
    let g = FunctorExpr::compose(f.clone(), translate)?;
    let zero = Arc::new(Presheaf::empty(one));
    let dg = delta_a(&g, 0, &zero)?;
    let df = delta_a(f, a, phi)?;
    for b in f.cod().objects() {
        law(dg.sub.size(b) == df.sub.size(b), || {
            format!("translated difference has {} elements at {}, expected {}", dg.sub.size(b), b, df.sub.size(b))
        })?;
    }
    Ok(())
}

/// `Δ[F](−)` sends a complemented mono to a mono with complemented image.
pub fn check_jacobian_tense(f: &FunctorExpr, i: &NatTrans) -> Result<()> {
    law(i.image().is_complemented() && i.is_mono(), || "input is not a complemented mono".into())?;
    let (js, jd) = (jacobian(f, i.src())?, jacobian(f, i.dst())?);
    let m = jacobian_map(f, i, &js, &jd)?;
    law(m.is_mono(), || "Δ[F](i) is not mono".into())?;
    let as_presheaf = |p: &Profunctor| Arc::new(p.to_presheaf());
    let (ps, pd) = (as_presheaf(&js.value), as_presheaf(&jd.value));
    let t = NatTrans::new(ps, pd, {
        let nb = f.cod().object_count();
        (0..f.dom().object_count() * nb).map(|o| m.components()[o].clone()).collect()
    })?;
    law(t.image().is_complemented(), || "Δ[F](i) has a non-complemented image".into())
}

/// `A(A, −) → Δ_A[Id](Φ)`, `f ↦ inj₂(f)`, checked to be an isomorphism.
pub fn identity_base_case(base: &Arc<FinCategory>, a: Obj, phi: &Arc<Presheaf>) -> Result<NatTrans> {
    let d = delta_a(&Identity(base.clone()), a, phi)?;
    let (dp, incl) = d.presheaf();
    let comps = base
        .objects()
        .map(|b| {
            (0..d.rep.size(b))
                .map(|i| {
                    let y = phi.size(b) + i;
                    incl.component(b).iter().position(|&z| z == y).ok_or_else(|| {
                        Error::LawViolation(format!("{} is not new in Φ + A({}, −)", d.rep.label(b, i), a))
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let t = NatTrans::new(d.rep.clone(), dp, comps)?;
    law(t.is_iso(), || format!("A({}, −) → Δ[Id] is not invertible", a))?;
    Ok(t)
}

/// `P(A, −) → Δ_A[P ⊗ −](Φ)`, `p ↦ [1_A, p]`, checked to be an isomorphism.
pub fn linear_base_case(p: &Arc<Profunctor>, a: Obj, phi: &Arc<Presheaf>) -> Result<NatTrans> {
    let d = delta_a(&Linear(p.clone()), a, phi)?;
    let (dp, incl) = d.presheaf();
    let t = d.at_shifted.tensor().ok_or(Error::EndpointMismatch)?;
    let base = p.src();
    let unit = phi.size(a) + (base.identity(a) - base.hom(a, a).start);
    let row = Arc::new(p.row_presheaf(a));
    let comps = p
        .dst()
        .objects()
        .map(|b| {
            (0..p.size(a, b))
                .map(|q| {
                    let y = t.class(b, a, unit, q);
                    incl.component(b).iter().position(|&z| z == y).ok_or_else(|| {
                        Error::LawViolation(format!("[1, {}] is not new", p.cell(a, b)[q]))
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let m = NatTrans::new(row, dp, comps)?;
    law(m.is_iso(), || format!("P({}, −) → Δ[P ⊗ −] is not invertible", a))?;
    Ok(m)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::analytic::tests::{set_of, trivial_on_one};
    use crate::prof::identity_prof;
    use crate::presheaf::fixtures::*;

    pub(crate) fn set() -> Arc<FinCategory> {
        Arc::new(FinCategory::terminal())
    }

    pub(crate) fn square(c: &Arc<FinCategory>) -> FunctorExpr {
        FunctorExpr::product(Identity(c.clone()), Identity(c.clone())).unwrap()
    }

    /// `P: Arr ⇸ 1` with `P(1) = {a, b}`, `P(0) = {c}`.
    pub(crate) fn collapsing() -> Arc<Profunctor> {
        let a = arr();
        let e = a.find_morphism("e").unwrap();
        let cells = vec![vec!["c".to_string()], vec!["a".to_string(), "b".to_string()]];
        Arc::new(Profunctor::from_fn(a, set(), cells, move |f, _, x| if f == e { 0 } else { x }, |_, _, x| x))
    }

    #[test]
    fn base_cases_on_arrow() {
        let a = arr();
        let phi = phi_arr(&a);
        for o in a.objects() {
            assert_eq!(identity_base_case(&a, o, &phi).unwrap().src().total_size(), a.hom(o, 0).len() + a.hom(o, 1).len());
            linear_base_case(&Arc::new(identity_prof(&a)), o, &phi).unwrap();
            linear_base_case(&collapsing(), o, &phi).unwrap();
        }
    }

    #[test]
    fn eval_examples() {
        let a = arr();
        let phi = phi_arr(&a);
        assert_eq!(*eval(&Identity(a.clone()), &phi).unwrap().value, *phi);
        let lin = Linear(Arc::new(identity_prof(&a)));
        let v = eval(&lin, &phi).unwrap().value;
        assert_eq!((v.size(0), v.size(1)), (1, 2));
        let s = set();
        assert_eq!(eval(&square(&s), &set_of(3)).unwrap().value.size(0), 9);
    }

    #[test]
    fn eval_nat_is_functorial() {
        let a = arr();
        let phi = phi_arr(&a);
        let ends = crate::presheaf::nat_transformations(&phi, &phi, 1000).unwrap();
        let exprs = [
            Linear(Arc::new(identity_prof(&a))),
            square(&a),
            FunctorExpr::sum(Identity(a.clone()), square(&a)).unwrap(),
            FunctorExpr::compose(square(&a), Linear(Arc::new(identity_prof(&a)))).unwrap(),
        ];
        for f in &exprs {
            let id = map(f, &NatTrans::identity(&phi)).unwrap();
            assert!(id.is_iso() && id.components().iter().all(|r| r.iter().enumerate().all(|(x, &y)| x == y)));
            for t in &ends {
                for u in &ends {
                    let lhs = map(f, &u.after(t).unwrap()).unwrap();
                    let rhs = map(f, u).unwrap().after(&map(f, t).unwrap()).unwrap();
                    assert_eq!(lhs.components(), rhs.components());
                }
            }
        }
    }

    #[test]
    fn linear_need_not_preserve_monos() {
        let a = arr();
        let f = Linear(collapsing());
        let t = NatTrans::rep_map(&a, a.find_morphism("e").unwrap());
        assert!(t.is_mono());
        assert!(!preserves_mono(&f, &t).unwrap());
        assert!(tense_certify(&f).is_ok());
    }

    #[test]
    fn monomial_that_is_not_tense() {
        let a = arr();
        let one = set();
        let cells = vec![vec!["u".to_string()], vec![]];
        let p = Arc::new(Profunctor::from_fn(a, one.clone(), cells, |_, _, x| x, |_, _, x| x));
        let f = Monomial(p);
        match tense_certify(&f) {
            Err(Error::NotTense { witness, .. }) => assert!(witness.starts_with('e')),
            other => panic!("{:?}", other),
        }
        let x = set_of(1);
        let x1 = set_of(2);
        let i = NatTrans::new(x.clone(), x1, vec![vec![0]]).unwrap();
        assert!(i.image().is_complemented());
        assert!(!preserves_complemented(&f, &i).unwrap());
        assert!(preserves_mono(&f, &i).unwrap());
    }

    #[test]
    fn certificates() {
        let one = set();
        let s = trivial_on_one(SeqMode::Strict, 2, &[(1, "p"), (2, "q")]);
        let f = FunctorExpr::compose(Linear(Arc::new(identity_prof(&one))), FunctorExpr::analytic(&s)).unwrap();
        let c = tense_certify(&f).unwrap();
        assert_eq!(c.rule, TenseRule::ClosureCompose);
        assert_eq!(c.flatten().len(), 3);
    }

    #[test]
    fn delta_examples() {
        let a = arr();
        let phi = phi_arr(&a);
        for o in a.objects() {
            let d = delta_a(&Identity(a.clone()), o, &phi).unwrap();
            let r = Presheaf::representable(&a, o).unwrap();
            for b in a.objects() {
                assert_eq!(d.sub.size(b), r.size(b));
            }
        }
        let p = collapsing();
        let d = delta_a(&Linear(p.clone()), 1, &set_of(1)).unwrap_err();
        assert!(matches!(d, Error::BaseMismatch));
        let psi = Arc::new(Presheaf::terminal(arr()));
        for o in 0..2 {
            let d = delta_a(&Linear(p.clone()), o, &psi).unwrap();
            assert_eq!(d.sub.size(0), p.size(o, 0));
        }
        let s = set();
        let d = delta_a(&square(&s), 0, &set_of(2)).unwrap();
        assert_eq!(d.sub.size(0), 5);
    }

    #[test]
    fn jacobian_examples() {
        let a = arr();
        let phi = phi_arr(&a);
        let id = Arc::new(identity_prof(&a));
        assert_eq!(jacobian(&Identity(a.clone()), &phi).unwrap().value.cell_sizes(), id.cell_sizes());
        let j = jacobian(&Linear(id.clone()), &phi).unwrap();
        assert_eq!(j.value.cell_sizes(), id.cell_sizes());
        let psi = Arc::new(Presheaf::terminal(a.clone()));
        let f = FunctorExpr::sum(Linear(id.clone()), FunctorExpr::constant(&a, &psi)).unwrap();
        let j = jacobian(&f, &phi).unwrap();
        let c = core(&Linear(id.clone())).unwrap();
        assert_eq!(j.value.cell_sizes(), c.value.cell_sizes());
    }

    #[test]
    fn higher_examples() {
        let a = arr();
        let phi = phi_arr(&a);
        let h = higher_delta(&square(&a), &[], &phi).unwrap();
        assert_eq!(h.sub.total_size(), eval(&square(&a), &phi).unwrap().value.total_size());
        let h = higher_delta(&Identity(a.clone()), &[0, 1], &phi).unwrap();
        assert_eq!(h.sub.total_size(), 0);
        let s = set();
        let zero = Arc::new(Presheaf::empty(s.clone()));
        let h = higher_delta(&square(&s), &[0, 0], &zero).unwrap();
        assert_eq!(h.sub.size(0), 2);
        for seq in [vec![0, 1], vec![1, 0, 1], vec![0, 0, 1]] {
            higher_delta(&square(&a), &seq, &phi).unwrap();
            check_clairaut(&square(&a), &seq, &phi).unwrap();
        }
    }

    #[test]
    fn ppi_examples() {
        let a = arr();
        let phi = phi_arr(&a);
        let d = delta_a(&Identity(a.clone()), 0, &phi).unwrap();
        let x = phi.size(0);
        let u = ppi_from_delta(&d, 0, x).unwrap();
        assert!(u.is_iso());
        let bad = ppi_from_delta(&d, 0, 0).unwrap_err();
        assert!(matches!(bad, Error::NotNew(_)));
        let lin = Linear(Arc::new(identity_prof(&a)));
        let d = delta_a(&lin, 0, &phi).unwrap();
        for b in a.objects() {
            for x in d.sub.members(b) {
                let u = ppi_from_delta(&d, b, x).unwrap();
                assert_eq!(ppi_to_element(&u, &d.at_phi.value, b), x);
            }
        }
    }

    #[test]
    fn difference_operator_examples() {
        let a = arr();
        let phi = phi_arr(&a);
        let f = square(&a);
        let zero = Arc::new(Presheaf::empty(a.clone()));
        assert_eq!(difference_operator(&f, &phi, &zero).unwrap().1.value.total_size(), 0);
        for o in a.objects() {
            let rep = Arc::new(Presheaf::representable(&a, o).unwrap());
            let (_, t) = difference_operator(&f, &phi, &rep).unwrap();
            let d = delta_a(&f, o, &phi).unwrap();
            for b in a.objects() {
                assert_eq!(t.value.size(b), d.sub.size(b));
            }
        }
    }

    #[test]
    fn core_examples() {
        let a = arr();
        let id = Arc::new(identity_prof(&a));
        assert_eq!(core(&Linear(id.clone())).unwrap().value.cell_sizes(), id.cell_sizes());
        assert_eq!(core(&Identity(a.clone())).unwrap().value.cell_sizes(), id.cell_sizes());
        let phi = phi_arr(&a);
        let c = core(&FunctorExpr::constant(&a, &phi)).unwrap();
        assert_eq!(c.value.cell_sizes(), vec![vec![1, 2], vec![1, 2]]);
        assert!(core_counit(&Linear(id), &phi).unwrap().is_iso());
        let s = set();
        let t = core_counit(&square(&s), &set_of(2)).unwrap();
        assert_eq!((t.src().size(0), t.dst().size(0)), (2, 4));
        assert!(t.is_mono() && !t.is_epi());
    }

    #[test]
    fn difference_rules() {
        let a = arr();
        let phi = phi_arr(&a);
        let id = Arc::new(identity_prof(&a));
        let f = square(&a);
        let g = Linear(id.clone());
        check_sum_rule(&f, &g, &phi).unwrap();
        check_product_rule(&[f.clone(), g.clone()], &phi).unwrap();
        check_product_rule(&[Identity(a.clone()), g.clone(), f.clone()], &phi).unwrap();
        check_linear_scalar(&id, &f, &phi).unwrap();
        check_compose_scalar(&g, &f, 0, &phi).unwrap();
        for o in a.objects() {
            check_partial_decomposition(&f, o, &phi).unwrap();
            check_affine_reduction(&f, o, &phi).unwrap();
        }
        let sub = Subobject::from_elements(phi.clone(), &[vec![0], vec![0]]).unwrap();
        let (_, i) = sub.to_presheaf();
        check_jacobian_tense(&f, &i).unwrap();
    }
}
