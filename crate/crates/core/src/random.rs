//! Seeded random instances. Everything is drawn from a `ChaCha8Rng` seeded
//! with `seed_from_u64`, so a seed fixes every instance bit for bit.
//!
//! Presheaves are built as quotients of random sums of representables, which
//! reaches every finite presheaf; draws exceeding the size bound are rejected
//! and counted.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{generated, SymmetricSequence};
use crate::error::{Error, Result};
use crate::fincat::{cartesian, opposite, product_category, FinCategory, Obj, SeqMode};
use crate::funcalc::FunctorExpr;
use crate::presheaf::{nat_transformations, NatTrans, Presheaf};
use crate::prof::{hom_tense_check, Profunctor};

const MAX_TRIES: u64 = 500;
const ENUM_BOUND: u128 = 20_000;

/// Size bounds for generated instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub max_objects: usize,
    pub max_elems: usize,
    pub max_arity: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_objects: 3,
            max_elems: 3,
            max_arity: 3,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Acceptance {
    pub tried: u64,
    pub accepted: u64,
}

impl Acceptance {
    pub fn rate(&self) -> f64 {
        if self.tried == 0 {
            1.0
        } else {
            self.accepted as f64 / self.tried as f64
        }
    }
}

/// Which leaves and nodes the functor grammar may use.
#[derive(Clone, Copy, Debug)]
pub struct Grammar {
    pub depth: usize,
    pub constant: bool,
    pub linear: bool,
    pub monomial: bool,
    pub strict: bool,
    pub soft: bool,
    pub compose: bool,
}

impl Default for Grammar {
    fn default() -> Self {
        Grammar {
            depth: 1,
            constant: true,
            linear: true,
            monomial: true,
            strict: true,
            soft: true,
            compose: true,
        }
    }
}

pub struct Gen {
    rng: ChaCha8Rng,
    stats: BTreeMap<&'static str, Acceptance>,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            stats: BTreeMap::new(),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn stats(&self) -> &BTreeMap<&'static str, Acceptance> {
        &self.stats
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn upto(&mut self, n: usize) -> usize {
        self.rng.random_range(0..=n)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        xs.choose(&mut self.rng).expect("nonempty choice")
    }

    fn note(&mut self, kind: &'static str, ok: bool) {
        let e = self.stats.entry(kind).or_default();
        e.tried += 1;
        if ok {
            e.accepted += 1;
        }
    }

    /// Retries `draw` until it yields a value, counting attempts under `kind`.
    pub fn sample<T>(&mut self, kind: &'static str, mut draw: impl FnMut(&mut Gen) -> Option<T>) -> Result<T> {
        for _ in 0..MAX_TRIES {
            let got = draw(self);
            self.note(kind, got.is_some());
            if let Some(v) = got {
                return Ok(v);
            }
        }
        Err(Error::LawViolation(format!("no {} accepted after {} draws", kind, MAX_TRIES)))
    }

    /// A random poset on `1..=max_objects` objects (edges only go up in index,
    /// so every draw is antisymmetric), or with small probability a one-object
    /// monoid.
    pub fn category(&mut self, max_objects: usize) -> Arc<FinCategory> {
        let c = if self.coin(0.15) {
            if self.coin(0.5) {
                FinCategory::idempotent()
            } else {
                FinCategory::cyclic_group(2)
            }
        } else {
            self.poset(max_objects)
        };
        self.note("category", true);
        Arc::new(c)
    }

    pub fn poset(&mut self, max_objects: usize) -> FinCategory {
        let n = 1 + self.below(max_objects.max(1));
        let names: Vec<String> = (0..n).map(|i| format!("a{}", i)).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut rel = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.coin(0.4) {
                    rel.push((i, j));
                }
            }
        }
        FinCategory::poset(&refs, &rel, |a, b| {
            if a == b {
                format!("id{}", a)
            } else {
                format!("a{}a{}", a, b)
            }
        })
    }

    pub fn discrete(&mut self, max_objects: usize) -> Arc<FinCategory> {
        let n = 1 + self.below(max_objects.max(1));
        let names: Vec<String> = (0..n).map(|i| format!("d{}", i)).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Arc::new(FinCategory::discrete(&refs))
    }

    /// A quotient of a sum of at most `max_elems` representables, with at
    /// most `max_elems` elements in total.
    pub fn presheaf(&mut self, base: &Arc<FinCategory>, max_elems: usize) -> Result<Arc<Presheaf>> {
        self.sample("presheaf", |g| {
            let k = g.upto(max_elems);
            let objs: Vec<Obj> = (0..k).map(|_| g.below(base.object_count())).collect();
            let sum = Presheaf::sum_of_representables(base, &objs).ok()?;
            if sum.total_size() > max_elems {
                return None;
            }
            let mut pairs = Vec::new();
            for _ in 0..g.upto(2) {
                let a = g.below(base.object_count());
                if sum.size(a) >= 2 {
                    pairs.push((a, g.below(sum.size(a)), g.below(sum.size(a))));
                }
            }
            let (q, _) = sum.quotient(&pairs);
            Some(Arc::new(q))
        })
    }

    /// A random transformation between two random presheaves on one base.
    pub fn nat_trans(&mut self, base: &Arc<FinCategory>, max_elems: usize) -> Result<NatTrans> {
        self.sample("nat-trans", |g| {
            let s = g.presheaf(base, max_elems).ok()?;
            let d = g.presheaf(base, max_elems).ok()?;
            let all = nat_transformations(&s, &d, ENUM_BOUND).ok()?;
            if all.is_empty() {
                None
            } else {
                Some(g.pick(&all).clone())
            }
        })
    }

    /// A transformation out of `src` chosen uniformly among all of them.
    pub fn nat_from(&mut self, src: &Arc<Presheaf>, dst: &Arc<Presheaf>) -> Option<NatTrans> {
        let all = nat_transformations(src, dst, ENUM_BOUND).ok()?;
        self.note("nat-trans", !all.is_empty());
        if all.is_empty() {
            None
        } else {
            Some(self.pick(&all).clone())
        }
    }

    /// Cells of random sizes `0..=max_cell`; only identities act.
    pub fn discrete_profunctor(
        &mut self,
        a: &Arc<FinCategory>,
        b: &Arc<FinCategory>,
        max_cell: usize,
        tag: &str,
    ) -> Arc<Profunctor> {
        let cells = (0..a.object_count() * b.object_count())
            .map(|i| (0..self.upto(max_cell)).map(|k| format!("{}{}_{}", tag, i, k)).collect())
            .collect();
        self.note("profunctor", true);
        Arc::new(Profunctor::from_fn(a.clone(), b.clone(), cells, |_, _, x| x, |_, _, x| x))
    }

    /// A random presheaf on `A^op × B`, read as a profunctor `A ⇸ B`.
    pub fn profunctor(&mut self, a: &Arc<FinCategory>, b: &Arc<FinCategory>, max_elems: usize) -> Result<Arc<Profunctor>> {
        let prod = Arc::new(product_category(&Arc::new(opposite(a)), b));
        let phi = self.presheaf(&prod, max_elems)?;
        Ok(Arc::new(Profunctor::from_presheaf(a, b, &phi)?))
    }

    /// A profunctor passing the tenseness test for `P ⦸ (−)`.
    pub fn tense_profunctor(
        &mut self,
        a: &Arc<FinCategory>,
        b: &Arc<FinCategory>,
        max_elems: usize,
    ) -> Result<Arc<Profunctor>> {
        let prod = Arc::new(product_category(&Arc::new(opposite(a)), b));
        self.sample("tense-profunctor", |g| {
            let phi = g.presheaf(&prod, max_elems).ok()?;
            let p = Profunctor::from_presheaf(a, b, &phi).ok()?;
            hom_tense_check(&p).holds.then(|| Arc::new(p))
        })
    }

    /// A quotient of a free sequence on one or two random generators, with
    /// at most `max_cells` elements over all cells.
    pub fn sequence(
        &mut self,
        base: &Arc<FinCategory>,
        target: &Arc<FinCategory>,
        max_arity: usize,
        mode: SeqMode,
        max_cells: usize,
    ) -> Result<SymmetricSequence> {
        let gen = generated(base, max_arity, mode);
        self.sample("sequence", |g| {
            let k = 1 + g.below(2);
            let gens: Vec<(Vec<Obj>, Obj, String)> = (0..k)
                .map(|i| {
                    let n = g.upto(max_arity);
                    let entries = (0..n).map(|_| g.below(base.object_count())).collect();
                    (entries, g.below(target.object_count()), format!("g{}", i))
                })
                .collect();
            let s = SymmetricSequence::free(&gen, target, &gens).ok()?;
            if s.total_size() > max_cells {
                return None;
            }
            let info = s.info();
            let mut pairs = Vec::new();
            for _ in 0..g.upto(2) {
                let so = g.below(gen.object_count());
                let b = g.below(target.object_count());
                let n = s.prof().size(so, b);
                if n >= 2 {
                    pairs.push((info.entries(so).to_vec(), b, g.below(n), g.below(n)));
                }
            }
            s.quotient(&pairs).ok()
        })
    }

    /// A random endofunctor expression on `base`.
    pub fn functor(&mut self, base: &Arc<FinCategory>, b: &Bounds, gr: &Grammar) -> Result<FunctorExpr> {
        self.functor_at(base, b, gr, gr.depth)
    }

    fn functor_at(&mut self, base: &Arc<FinCategory>, b: &Bounds, gr: &Grammar, depth: usize) -> Result<FunctorExpr> {
        if depth > 0 && self.coin(0.5) {
            let node = self.below(if gr.compose { 3 } else { 2 });
            let l = self.functor_at(base, b, gr, depth - 1)?;
            let r = self.functor_at(base, b, gr, depth - 1)?;
            return match node {
                0 => FunctorExpr::sum(l, r),
                1 => FunctorExpr::product(l, r),
                _ => FunctorExpr::compose(l, r),
            };
        }
        self.leaf(base, b, gr)
    }

    pub fn leaf(&mut self, base: &Arc<FinCategory>, b: &Bounds, gr: &Grammar) -> Result<FunctorExpr> {
        let mut kinds = vec![0];
        for (k, on) in [gr.constant, gr.linear, gr.monomial, gr.strict, gr.soft].into_iter().enumerate() {
            if on {
                kinds.push(k + 1);
            }
        }
        let small = b.max_elems.min(2);
        Ok(match *self.pick(&kinds) {
            0 => FunctorExpr::identity(base),
            1 => FunctorExpr::constant(base, &self.presheaf(base, small)?),
            2 => FunctorExpr::linear(&self.profunctor(base, base, b.max_elems)?),
            3 => FunctorExpr::monomial(&self.tense_profunctor(base, base, small)?),
            k => {
                let mode = if k == 4 { SeqMode::Strict } else { SeqMode::Soft };
                let arity = b.max_arity.min(2);
                FunctorExpr::analytic(&self.sequence(base, base, arity, mode, 2 * b.max_elems)?)
            }
        })
    }
}

/// Every presheaf on `base` with at most `max_total` elements, one per
/// labelled action table. Elements at `a` are labelled `a:i`.
pub fn enumerate_presheaves(base: &Arc<FinCategory>, max_total: usize) -> Result<Vec<Arc<Presheaf>>> {
    let n = base.object_count();
    let mut out = Vec::new();
    let size_ranges: Vec<std::ops::Range<usize>> = (0..n).map(|_| 0..max_total + 1).collect();
    for sizes in cartesian(&size_ranges) {
        if sizes.iter().sum::<usize>() > max_total {
            continue;
        }
        let moving: Vec<_> = base.morphisms().filter(|&f| !base.is_identity(f)).collect();
        let ranges: Vec<std::ops::Range<usize>> = moving
            .iter()
            .flat_map(|&f| {
                let (m, k) = (sizes[base.src(f)], sizes[base.dst(f)]);
                (0..m).map(move |_| 0..k)
            })
            .collect();
        let count: u128 = ranges.iter().map(|r| r.len() as u128).product();
        if count > ENUM_BOUND {
            return Err(Error::LawViolation(format!("{} candidate action tables exceed the bound", count)));
        }
        let elems: Vec<Vec<String>> = base
            .objects()
            .map(|a| (0..sizes[a]).map(|i| format!("{}:{}", base.object_name(a), i)).collect())
            .collect();
        for choice in cartesian(&ranges) {
            let mut it = choice.into_iter();
            let mut action = Vec::with_capacity(base.morphism_count());
            for f in base.morphisms() {
                let m = sizes[base.src(f)];
                if base.is_identity(f) {
                    action.push((0..m).collect());
                } else {
                    action.push(it.by_ref().take(m).collect());
                }
            }
            if let Ok(p) = Presheaf::new(base.clone(), elems.clone(), action) {
                out.push(Arc::new(p));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn presheaves_on_arrow() {
        let a = Arc::new(FinCategory::arrow());
        let all = enumerate_presheaves(&a, 2).unwrap();
        // sizes (0,0) (0,1) (0,2) (1,0)x0 (1,1) (2,0)x0 : 1 + 1 + 1 + 1 + 0 = 4 after (1,0) and (2,0) vanish
        assert_eq!(all.len(), 4);
        let d = Arc::new(FinCategory::discrete(&["a0", "a1"]));
        // (n0, n1) with n0 + n1 ≤ 3
        assert_eq!(enumerate_presheaves(&d, 3).unwrap().len(), 10);
    }

    #[test]
    fn same_seed_same_instances() {
        let draw = |seed| {
            let mut g = Gen::new(seed);
            let c = g.category(3);
            let p = g.presheaf(&c, 3).unwrap();
            (c.to_desc(), (*p).clone())
        };
        assert_eq!(draw(7), draw(7));
    }

    #[test]
    fn sequences_respect_bounds() {
        let mut g = Gen::new(3);
        let one = Arc::new(FinCategory::terminal());
        for _ in 0..10 {
            let s = g.sequence(&one, &one, 3, SeqMode::Strict, 6).unwrap();
            assert!(s.total_size() <= 6);
            s.prof().check().unwrap();
        }
        assert!(g.stats()["sequence"].accepted == 10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn generated_presheaves_are_valid(seed in any::<u64>(), objs in 1usize..=3, elems in 0usize..=3) {
            let mut g = Gen::new(seed);
            let c = g.category(objs);
            prop_assert!(c.object_count() <= objs);
            c.check_laws().unwrap();
            let p = g.presheaf(&c, elems).unwrap();
            prop_assert!(p.total_size() <= elems);
            p.check().unwrap();
        }

        #[test]
        fn generated_profunctors_are_valid(seed in any::<u64>()) {
            let mut g = Gen::new(seed);
            let a = g.category(2);
            let b = g.category(2);
            let p = g.profunctor(&a, &b, 3).unwrap();
            p.check().unwrap();
            prop_assert!(p.total_size() <= 3);
        }

        #[test]
        fn generated_functors_have_endpoints(seed in any::<u64>()) {
            let mut g = Gen::new(seed);
            let a = g.category(2);
            let f = g.functor(&a, &Bounds::default(), &Grammar::default()).unwrap();
            prop_assert!(crate::fincat::same(f.dom(), &a));
            prop_assert!(crate::fincat::same(f.cod(), &a));
        }
    }
}
