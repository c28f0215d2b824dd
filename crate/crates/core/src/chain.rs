//! The lax chain rule `γ: Δ[G](FΦ) ∘ Δ[F](Φ) → Δ[GF](Φ)`, its laws, and
//! composition of tangent functors.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use crate::analytic::SymmetricSequence;
use crate::error::{Error, Result};
use crate::fincat::Obj;
use crate::funcalc::{eval, eval_nat, jacobian, jacobian_map, ppi_from_delta, tense_certify, Evaluation, FunctorExpr, Jacobian};
use crate::presheaf::{unflatten, NatTrans, Presheaf};
use crate::prof::{compose, tensor_presheaf, Composite, ProfMorphism};

/// Natural transformations between grammar functors.
#[derive(Clone, Debug)]
pub enum TransExpr {
    Identity(FunctorExpr),
    /// `F → F + G`
    Inl(FunctorExpr, FunctorExpr),
    /// `G → F + G`
    Inr(FunctorExpr, FunctorExpr),
    Sum(Arc<TransExpr>, Arc<TransExpr>),
    Product(Arc<TransExpr>, Arc<TransExpr>),
    /// `β ∘ α`
    Vertical(Arc<TransExpr>, Arc<TransExpr>),
    /// `Hα`
    Whisker(FunctorExpr, Arc<TransExpr>),
    /// `αF`
    Precompose(Arc<TransExpr>, FunctorExpr),
    /// `P ⊗ − → P' ⊗ −`
    LinearMap(ProfMorphism),
    /// `F → F × F`
    Diagonal(FunctorExpr),
    /// `S̃ → S̃'` from a map of sequences of the same mode
    FromSequence {
        map: ProfMorphism,
        src: SymmetricSequence,
        dst: SymmetricSequence,
    },
    /// `F₀ × F₁ → F_i`; not tense in general
    Projection(FunctorExpr, FunctorExpr, usize),
}

impl TransExpr {
    pub fn src(&self) -> Result<FunctorExpr> {
        use TransExpr::*;
        Ok(match self {
            Identity(f) | Inl(f, _) | Diagonal(f) => f.clone(),
            Inr(_, g) => g.clone(),
            Sum(a, b) => FunctorExpr::sum(a.src()?, b.src()?)?,
            Product(a, b) => FunctorExpr::product(a.src()?, b.src()?)?,
            Vertical(_, a) => a.src()?,
            Whisker(h, a) => FunctorExpr::compose(h.clone(), a.src()?)?,
            Precompose(a, f) => FunctorExpr::compose(a.src()?, f.clone())?,
            LinearMap(m) => FunctorExpr::linear(m.src()),
            FromSequence { src, .. } => FunctorExpr::analytic(src),
            Projection(f, g, _) => FunctorExpr::product(f.clone(), g.clone())?,
        })
    }

    pub fn dst(&self) -> Result<FunctorExpr> {
        use TransExpr::*;
        Ok(match self {
            Identity(f) => f.clone(),
            Inl(f, g) | Inr(f, g) => FunctorExpr::sum(f.clone(), g.clone())?,
            Sum(a, b) => FunctorExpr::sum(a.dst()?, b.dst()?)?,
            Product(a, b) => FunctorExpr::product(a.dst()?, b.dst()?)?,
            Vertical(b, _) => b.dst()?,
            Whisker(h, a) => FunctorExpr::compose(h.clone(), a.dst()?)?,
            Precompose(a, f) => FunctorExpr::compose(a.dst()?, f.clone())?,
            LinearMap(m) => FunctorExpr::linear(m.dst()),
            Diagonal(f) => FunctorExpr::product(f.clone(), f.clone())?,
            FromSequence { dst, .. } => FunctorExpr::analytic(dst),
            Projection(f, g, i) => if *i == 0 { f.clone() } else { g.clone() },
        })
    }

    /// Tense by construction; projections are the only exception.
    pub fn is_certified_tense(&self) -> bool {
        use TransExpr::*;
        match self {
            Projection(..) => false,
            Sum(a, b) | Product(a, b) | Vertical(a, b) => a.is_certified_tense() && b.is_certified_tense(),
            Whisker(_, a) | Precompose(a, _) => a.is_certified_tense(),
            _ => true,
        }
    }
}

fn relabel(src: &Arc<Presheaf>, dst: &Arc<Presheaf>, f: impl Fn(Obj, usize) -> usize) -> Result<NatTrans> {
    let comps = src
        .base()
        .objects()
        .map(|b| (0..src.size(b)).map(|x| f(b, x)).collect())
        .collect();
    NatTrans::new(src.clone(), dst.clone(), comps)
}

fn detail_missing() -> Error {
    Error::EndpointMismatch
}

/// `α_X` between evaluations of `α.src()` and `α.dst()` at the same `X`.
pub fn component_with(alpha: &TransExpr, se: &Evaluation, de: &Evaluation) -> Result<NatTrans> {
    use TransExpr::*;
    if *se.input != *de.input {
        return Err(Error::EndpointMismatch);
    }
    match alpha {
        Identity(_) => relabel(&se.value, &de.value, |_, x| x),
        Inl(..) => relabel(&se.value, &de.value, |_, x| x),
        Inr(..) => {
            let (l, _) = de.pair().ok_or_else(detail_missing)?;
            relabel(&se.value, &de.value, |b, x| l.value.size(b) + x)
        }
        Sum(a, b) | Product(a, b) => {
            let ((s1, s2), (d1, d2)) = (se.pair().ok_or_else(detail_missing)?, de.pair().ok_or_else(detail_missing)?);
            let (ta, tb) = (component_with(a, s1, d1)?, component_with(b, s2, d2)?);
            Ok(if matches!(alpha, Sum(..)) {
                NatTrans::coproduct_between(se.value.clone(), de.value.clone(), &[&ta, &tb])
            } else {
                NatTrans::product_between(se.value.clone(), de.value.clone(), &[&ta, &tb])
            })
        }
        Vertical(b, a) => {
            let mid = eval(&a.dst()?, &se.input)?;
            let ta = component_with(a, se, &mid)?;
            component_with(b, &mid, de)?.after(&ta)
        }
        Whisker(h, a) => {
            let ((si, so), (di, dout)) = (se.nested().ok_or_else(detail_missing)?, de.nested().ok_or_else(detail_missing)?);
            let ta = component_with(a, si, di)?;
            eval_nat(h, &ta, so, dout)
        }
        Precompose(a, _) => {
            let ((_, so), (_, dout)) = (se.nested().ok_or_else(detail_missing)?, de.nested().ok_or_else(detail_missing)?);
            component_with(a, so, dout)
        }
        LinearMap(m) => {
            let (st, dt) = (se.tensor().ok_or_else(detail_missing)?, de.tensor().ok_or_else(detail_missing)?);
            relabel(&se.value, &de.value, |b, k| {
                let (a, x, p) = st.representative(b, k);
                dt.class(b, a, x, m.apply(a, b, p))
            })
        }
        Diagonal(_) => relabel(&se.value, &de.value, |b, x| x * se.value.size(b) + x),
        FromSequence { map, .. } => {
            let (sa, da) = (se.analytic().ok_or_else(detail_missing)?, de.analytic().ok_or_else(detail_missing)?);
            relabel(&se.value, &de.value, |b, k| {
                let (s, tuple, p) = sa.element(b, k);
                da.class_of(b, s, &tuple, map.apply(s, b, p))
            })
        }
        Projection(_, _, i) => {
            let (l, r) = se.pair().ok_or_else(detail_missing)?;
            relabel(&se.value, &de.value, |b, x| unflatten(x, [l.value.size(b), r.value.size(b)].into_iter())[*i])
        }
    }
}

pub fn component(alpha: &TransExpr, x: &Arc<Presheaf>) -> Result<NatTrans> {
    component_with(alpha, &eval(&alpha.src()?, x)?, &eval(&alpha.dst()?, x)?)
}

/// `Δ[α](Φ): Δ[F](Φ) → Δ[F'](Φ)`, the restriction of `α` at `Φ + A(a, −)`;
/// `NotNew` when `α` is not tense.
pub fn delta_trans(alpha: &TransExpr, src: &Jacobian, dst: &Jacobian) -> Result<ProfMorphism> {
    let (ca, cb) = (src.value.src().clone(), src.value.dst().clone());
    let mut comps = Vec::new();
    for a in ca.objects() {
        let t = component_with(alpha, &src.deltas[a].at_shifted, &dst.deltas[a].at_shifted)?;
        for b in cb.objects() {
            let row = (0..src.value.size(a, b))
                .map(|k| {
                    dst.position(a, b, t.apply(b, src.element(a, b, k)))
                        .ok_or_else(|| Error::NotNew(src.value.cell(a, b)[k].clone()))
                })
                .collect::<Result<Vec<_>>>()?;
            comps.push(row);
        }
    }
    ProfMorphism::new(src.value.clone(), dst.value.clone(), comps)
}

/// The Jacobians `γ` needs, and `G(t̂)` cached per element of `Δ[F](Φ)`.
pub struct GammaContext {
    pub f: FunctorExpr,
    pub g: FunctorExpr,
    pub gf: FunctorExpr,
    pub jf: Jacobian,
    pub jg: Jacobian,
    pub jgf: Jacobian,
    lifted: RefCell<HashMap<(Obj, Obj, usize), NatTrans>>,
}

impl GammaContext {
    pub fn new(f: &FunctorExpr, g: &FunctorExpr, phi: &Arc<Presheaf>) -> Result<GammaContext> {
        tense_certify(f)?;
        tense_certify(g)?;
        let gf = FunctorExpr::compose(g.clone(), f.clone())?;
        let jf = jacobian(f, phi)?;
        let jg = jacobian(g, &jf.at_phi.value)?;
        let jgf = jacobian(&gf, phi)?;
        Ok(GammaContext {
            f: f.clone(),
            g: g.clone(),
            gf,
            jf,
            jg,
            jgf,
            lifted: RefCell::new(HashMap::new()),
        })
    }

    /// `G(t̂)(c)(u)` as an element of `GF(Φ + A(a, −))(c)`.
    pub fn raw(&self, a: Obj, b: Obj, c: Obj, x: usize, y: usize) -> Result<usize> {
        let key = (a, b, x);
        if !self.lifted.borrow().contains_key(&key) {
            let t = ppi_from_delta(&self.jf.deltas[a], b, self.jf.element(a, b, x))?;
            let outer = self.jgf.deltas[a].at_shifted.nested().ok_or_else(detail_missing)?.1;
            let gt = eval_nat(&self.g, &t, &self.jg.deltas[b].at_shifted, outer)?;
            self.lifted.borrow_mut().insert(key, gt);
        }
        Ok(self.lifted.borrow()[&key].apply(c, self.jg.element(b, c, y)))
    }

    /// `γ(u ⊗ t)` as a cell element of `Δ[GF](Φ)(a, c)`.
    pub fn apply(&self, a: Obj, b: Obj, c: Obj, x: usize, y: usize) -> Result<usize> {
        let z = self.raw(a, b, c, x, y)?;
        self.jgf.position(a, c, z).ok_or_else(|| {
            Error::NotNew(self.jgf.deltas[a].at_shifted.value.label(c, z).to_string())
        })
    }

    /// Every generator `(a, b, c, t, u)` of the domain composite.
    pub fn generators(&self) -> Vec<(Obj, Obj, Obj, usize, usize)> {
        let (ca, cb, cc) = (self.f.dom(), self.f.cod(), self.g.cod());
        let mut out = Vec::new();
        for a in ca.objects() {
            for b in cb.objects() {
                for c in cc.objects() {
                    for x in 0..self.jf.value.size(a, b) {
                        for y in 0..self.jg.value.size(b, c) {
                            out.push((a, b, c, x, y));
                        }
                    }
                }
            }
        }
        out
    }
}

pub struct Gamma {
    pub context: GammaContext,
    pub domain: Composite,
    pub map: ProfMorphism,
}

/// `γ(Φ)`, checked constant on every coend class and new on every generator.
pub fn gamma(f: &FunctorExpr, g: &FunctorExpr, phi: &Arc<Presheaf>) -> Result<Gamma> {
    let context = GammaContext::new(f, g, phi)?;
    let domain = compose(&context.jg.value, &context.jf.value)?;
    let map = domain.morphism_from_generators(&context.jgf.value, |a, c, b, x, y| context.apply(a, b, c, x, y))?;
    Ok(Gamma { context, domain, map })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawCheck {
    pub law: String,
    pub holds: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LawReport {
    pub checks: Vec<LawCheck>,
}

impl LawReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn record(&mut self, law: impl Into<String>, outcome: Result<()>) {
        let (holds, witness) = match outcome {
            Ok(()) => (true, None),
            Err(e) => (false, Some(e.to_string())),
        };
        self.checks.push(LawCheck {
            law: law.into(),
            holds,
            witness,
        });
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

/// Extra data for the naturality laws.
#[derive(Clone, Debug, Default)]
pub struct NaturalityInputs {
    /// maps `Φ → Ψ` out of the base point
    pub maps: Vec<NatTrans>,
    /// transformations out of `F`
    pub f_trans: Vec<TransExpr>,
    /// transformations out of `G`
    pub g_trans: Vec<TransExpr>,
}

fn agree(lhs: usize, rhs: usize, what: impl FnOnce() -> String) -> Result<()> {
    if lhs == rhs {
        Ok(())
    } else {
        Err(Error::LawViolation(what()))
    }
}

/// Both bracketings of `w ⊗ u ⊗ t` land on the same element of `HGF(Φ + A(a, −))(d)`.
pub fn check_associativity(f: &FunctorExpr, g: &FunctorExpr, h: &FunctorExpr, phi: &Arc<Presheaf>) -> Result<()> {
    let gf = GammaContext::new(f, g, phi)?;
    let h_gf = GammaContext::new(&gf.gf, h, phi)?;
    let hg = GammaContext::new(g, h, &gf.jf.at_phi.value)?;
    let hg_f = GammaContext::new(f, &hg.gf, phi)?;
    for (a, b, c, x, y) in gf.generators() {
        let w = gf.apply(a, b, c, x, y)?;
        for d in h.cod().objects() {
            for v in 0..hg.jg.value.size(c, d) {
                let left = h_gf.raw(a, c, d, w, v)?;
                let z = hg.apply(b, c, d, y, v)?;
                let right = hg_f.raw(a, b, d, x, z)?;
                agree(left, right, || format!("bracketings differ on ({}, {}, {}) at {}", x, y, v, d))?;
            }
        }
    }
    Ok(())
}

/// `γ` against `φ: Φ → Ψ`.
pub fn check_natural_in_phi(f: &FunctorExpr, g: &FunctorExpr, map: &NatTrans) -> Result<()> {
    let (c1, c2) = (GammaContext::new(f, g, map.src())?, GammaContext::new(f, g, map.dst())?);
    let jf = jacobian_map(f, map, &c1.jf, &c2.jf)?;
    let fmap = eval_nat(f, map, &c1.jf.at_phi, &c2.jf.at_phi)?;
    let jg = jacobian_map(g, &fmap, &c1.jg, &c2.jg)?;
    let jgf = jacobian_map(&c1.gf, map, &c1.jgf, &c2.jgf)?;
    for (a, b, c, x, y) in c1.generators() {
        let lhs = jgf.apply(a, c, c1.apply(a, b, c, x, y)?);
        let rhs = c2.apply(a, b, c, jf.apply(a, b, x), jg.apply(b, c, y))?;
        agree(lhs, rhs, || format!("naturality in Φ fails on ({}, {})", x, y))?;
    }
    Ok(())
}

/// `γ` against `α: F ⇒ F'`.
pub fn check_natural_in_f(alpha: &TransExpr, g: &FunctorExpr, phi: &Arc<Presheaf>) -> Result<()> {
    let (f, f2) = (alpha.src()?, alpha.dst()?);
    let (c1, c2) = (GammaContext::new(&f, g, phi)?, GammaContext::new(&f2, g, phi)?);
    let da = delta_trans(alpha, &c1.jf, &c2.jf)?;
    let at_phi = component_with(alpha, &c1.jf.at_phi, &c2.jf.at_phi)?;
    let dg = jacobian_map(g, &at_phi, &c1.jg, &c2.jg)?;
    let dga = delta_trans(&TransExpr::Whisker(g.clone(), Arc::new(alpha.clone())), &c1.jgf, &c2.jgf)?;
    for (a, b, c, x, y) in c1.generators() {
        let lhs = dga.apply(a, c, c1.apply(a, b, c, x, y)?);
        let rhs = c2.apply(a, b, c, da.apply(a, b, x), dg.apply(b, c, y))?;
        agree(lhs, rhs, || format!("naturality in F fails on ({}, {})", x, y))?;
    }
    Ok(())
}

/// `γ` against `β: G ⇒ G'`.
pub fn check_natural_in_g(f: &FunctorExpr, beta: &TransExpr, phi: &Arc<Presheaf>) -> Result<()> {
    let (g, g2) = (beta.src()?, beta.dst()?);
    let (c1, c2) = (GammaContext::new(f, &g, phi)?, GammaContext::new(f, &g2, phi)?);
    let db = delta_trans(beta, &c1.jg, &c2.jg)?;
    let dbf = delta_trans(&TransExpr::Precompose(Arc::new(beta.clone()), f.clone()), &c1.jgf, &c2.jgf)?;
    for (a, b, c, x, y) in c1.generators() {
        let lhs = dbf.apply(a, c, c1.apply(a, b, c, x, y)?);
        let rhs = c2.apply(a, b, c, x, db.apply(b, c, y))?;
        agree(lhs, rhs, || format!("naturality in G fails on ({}, {})", x, y))?;
    }
    Ok(())
}

/// `γ` is invertible when either side is an identity functor.
pub fn check_unitors(f: &FunctorExpr, phi: &Arc<Presheaf>) -> Result<()> {
    let left = gamma(f, &FunctorExpr::identity(f.cod()), phi)?;
    let right = gamma(&FunctorExpr::identity(f.dom()), f, phi)?;
    if !left.map.is_iso() {
        return Err(Error::LawViolation("left unitor is not invertible".into()));
    }
    if !right.map.is_iso() {
        return Err(Error::LawViolation("right unitor is not invertible".into()));
    }
    Ok(())
}

pub fn check_gamma_laws(
    f: &FunctorExpr,
    g: &FunctorExpr,
    h: &FunctorExpr,
    phi: &Arc<Presheaf>,
    inputs: &NaturalityInputs,
) -> LawReport {
    let mut report = LawReport::default();
    report.record("well-defined", gamma(f, g, phi).map(|_| ()));
    report.record("associativity", check_associativity(f, g, h, phi));
    let fphi = eval(f, phi).map(|e| e.value);
    let gfphi = fphi.clone().and_then(|x| eval(g, &x).map(|e| e.value));
    report.record("unitors", check_unitors(f, phi));
    report.record("unitors", fphi.and_then(|x| check_unitors(g, &x)));
    report.record("unitors", gfphi.and_then(|x| check_unitors(h, &x)));
    for (i, m) in inputs.maps.iter().enumerate() {
        report.record(format!("natural in Φ #{}", i), check_natural_in_phi(f, g, m));
    }
    for (i, a) in inputs.f_trans.iter().enumerate() {
        report.record(format!("natural in F #{}", i), check_natural_in_f(a, g, phi));
    }
    for (i, b) in inputs.g_trans.iter().enumerate() {
        report.record(format!("natural in G #{}", i), check_natural_in_g(f, b, phi));
    }
    report
}

/// `(1, γ ⊗ Ψ): T[G](T[F](Φ, Ψ)) → T[GF](Φ, Ψ)`.
pub struct TangentMap {
    pub first: NatTrans,
    pub second: NatTrans,
}

pub fn tangent_compose(f: &FunctorExpr, g: &FunctorExpr, phi: &Arc<Presheaf>, psi: &Arc<Presheaf>) -> Result<TangentMap> {
    let ctx = GammaContext::new(f, g, phi)?;
    let inner = tensor_presheaf(&ctx.jf.value, psi)?;
    let outer = tensor_presheaf(&ctx.jg.value, &inner.value)?;
    let target = tensor_presheaf(&ctx.jgf.value, psi)?;
    let members: Vec<Vec<Vec<usize>>> = f.cod().objects().map(|b| inner.coend(b).members()).collect();
    let mut comps = Vec::new();
    for c in g.cod().objects() {
        let co = outer.coend(c);
        let mut row = vec![usize::MAX; co.class_count()];
        for gen in 0..co.generator_count() {
            let (b, k, u) = co.generator(gen);
            let cl = co.class_of_generator(gen);
            for &g1 in &members[b][k] {
                let (a, y, t) = inner.coend(b).generator(g1);
                let img = target.class(c, a, y, ctx.apply(a, b, c, t, u)?);
                if row[cl] == usize::MAX {
                    row[cl] = img;
                } else if row[cl] != img {
                    return Err(Error::NotWellDefined(outer.value.label(c, cl).to_string()));
                }
            }
        }
        comps.push(row);
    }
    let second = NatTrans::new(outer.value.clone(), target.value.clone(), comps)?;
    let first = relabel(&ctx.jg.at_phi.value, &ctx.jgf.at_phi.value, |_, x| x)?;
    Ok(TangentMap { first, second })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::tests::{one, set_of, trivial_on_one};
    use crate::fincat::SeqMode;
    use crate::funcalc::tests::square;
    use crate::presheaf::fixtures::{arr, phi_arr};
    use crate::prof::{identity_prof, Profunctor};

    fn scalar(n: usize) -> Arc<Profunctor> {
        let cells = vec![(0..n).map(|i| format!("p{}", i)).collect()];
        Arc::new(Profunctor::from_fn(one(), one(), cells, |_, _, x| x, |_, _, x| x))
    }

    #[test]
    fn unitors_are_bijections() {
        let a = arr();
        let phi = phi_arr(&a);
        for f in [square(&a), FunctorExpr::linear(&Arc::new(identity_prof(&a)))] {
            check_unitors(&f, &phi).unwrap();
        }
    }

    #[test]
    fn square_after_square() {
        let s = one();
        let g = gamma(&square(&s), &square(&s), &set_of(1)).unwrap();
        assert_eq!(g.domain.value.size(0, 0), 9);
        assert_eq!(g.context.jgf.value.size(0, 0), 15);
        assert!(g.map.is_mono() && !g.map.is_iso());
    }

    #[test]
    fn linear_triple() {
        let (p, q, r) = (FunctorExpr::linear(&scalar(2)), FunctorExpr::linear(&scalar(3)), FunctorExpr::linear(&scalar(1)));
        let x = set_of(2);
        assert!(gamma(&p, &q, &x).unwrap().map.is_iso());
        let m = NatTrans::new(x.clone(), set_of(1), vec![vec![0, 0]]).unwrap();
        let inputs = NaturalityInputs {
            maps: vec![m],
            f_trans: vec![TransExpr::Identity(p.clone())],
            g_trans: vec![TransExpr::Inl(q.clone(), r.clone())],
        };
        let rep = check_gamma_laws(&p, &q, &r, &x, &inputs);
        assert!(rep.all_hold(), "{:?}", rep);
    }

    #[test]
    fn mixed_triple() {
        let s = one();
        let (f, g, h) = (square(&s), FunctorExpr::linear(&scalar(2)), square(&s));
        let x = set_of(1);
        let incl = NatTrans::new(x.clone(), set_of(2), vec![vec![1]]).unwrap();
        let inputs = NaturalityInputs {
            maps: vec![incl, NatTrans::new(x.clone(), set_of(2), vec![vec![0]]).unwrap()],
            f_trans: vec![TransExpr::Diagonal(FunctorExpr::identity(&s)), TransExpr::Inr(g.clone(), f.clone())],
            g_trans: vec![TransExpr::LinearMap(ProfMorphism::new(scalar(2), scalar(3), vec![vec![2, 0]]).unwrap())],
        };
        let rep = check_gamma_laws(&f, &g, &h, &x, &inputs);
        assert!(rep.all_hold(), "{:?}", rep);
    }

    #[test]
    fn projection_is_not_tense() {
        let s = one();
        let id = FunctorExpr::identity(&s);
        let pr = TransExpr::Projection(id.clone(), id.clone(), 0);
        assert!(!pr.is_certified_tense());
        let src = jacobian(&pr.src().unwrap(), &set_of(1)).unwrap();
        let dst = jacobian(&pr.dst().unwrap(), &set_of(1)).unwrap();
        assert!(matches!(delta_trans(&pr, &src, &dst), Err(Error::NotNew(_))));
        let err = check_natural_in_f(&pr, &square(&s), &set_of(1)).unwrap_err();
        assert!(matches!(err, Error::NotNew(_)));
    }

    #[test]
    fn components_are_natural() {
        let a = arr();
        let phi = phi_arr(&a);
        let id = FunctorExpr::identity(&a);
        let sq = square(&a);
        let st = trivial_on_one(SeqMode::Strict, 2, &[(1, "p"), (2, "q")]);
        let st2 = trivial_on_one(SeqMode::Strict, 2, &[(2, "q")]);
        let to = ProfMorphism::new(st2.prof().clone(), st.prof().clone(), st2.prof().cell_sizes().iter().flatten().map(|&n| vec![0; n]).collect()).unwrap();
        let exprs = vec![
            TransExpr::Vertical(Arc::new(TransExpr::Diagonal(sq.clone())), Arc::new(TransExpr::Diagonal(id.clone()))),
            TransExpr::Sum(Arc::new(TransExpr::Identity(id.clone())), Arc::new(TransExpr::Diagonal(id.clone()))),
            TransExpr::Product(Arc::new(TransExpr::Inl(id.clone(), sq.clone())), Arc::new(TransExpr::Identity(id.clone()))),
            TransExpr::Whisker(sq.clone(), Arc::new(TransExpr::Diagonal(id.clone()))),
            TransExpr::Precompose(Arc::new(TransExpr::Diagonal(id.clone())), sq.clone()),
        ];
        for e in &exprs {
            component(e, &phi).unwrap();
        }
        let x = set_of(2);
        let t = component(&TransExpr::FromSequence { map: to, src: st2, dst: st }, &x).unwrap();
        assert_eq!((t.src().size(0), t.dst().size(0)), (3, 5));
    }

    #[test]
    fn tangent_examples() {
        let a = arr();
        let phi = phi_arr(&a);
        let (f, g) = (square(&a), FunctorExpr::linear(&Arc::new(identity_prof(&a))));
        let zero = Arc::new(Presheaf::empty(a.clone()));
        let t = tangent_compose(&f, &g, &phi, &zero).unwrap();
        assert_eq!(t.second.src().total_size(), 0);
        assert!(t.first.is_iso());
        let rep = Arc::new(Presheaf::representable(&a, 1).unwrap());
        let t = tangent_compose(&f, &g, &phi, &rep).unwrap();
        let gm = gamma(&f, &g, &phi).unwrap();
        for c in a.objects() {
            assert_eq!(t.second.src().size(c), gm.domain.value.size(1, c));
        }
        let (p, q) = (FunctorExpr::linear(&scalar(2)), FunctorExpr::linear(&scalar(3)));
        assert!(tangent_compose(&p, &q, &set_of(1), &set_of(2)).unwrap().second.is_iso());
    }
}
