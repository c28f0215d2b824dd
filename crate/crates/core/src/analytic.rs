//! Symmetric sequences (profunctors `!A ⇸ B`) and soft symmetric sequences
//! (`↓A ⇸ B`), the analytic functors they determine, the difference `∇_A`,
//! softening, the profunctor `Q`, and diverse transformations.
//!
//! Truncation: a sequence of maximum arity `N` lives over the generated
//! category truncated at `N`. Coends over the truncated category are exact
//! because cells vanish above `N` and every identification between
//! generators of length at most `N` is witnessed by a morphism between
//! sequences of length at most `N`. `∇_A` spends one unit of that budget.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::coend::{Coend, TableFamily, UnionFind};
use crate::error::{Error, Result};
use crate::fincat::{
    compose_seq, permutations, same, sequence_category, FinCategory, FinFunctor, Mor, Obj, SeqInfo, SeqMode,
    SeqMorphism,
};
use crate::presheaf::{flatten, unflatten, NatTrans, Presheaf};
use crate::prof::{compose, contravariant_rep, tensor_map, tensor_presheaf, Profunctor, Tensor};

/// A profunctor from a generated sequence category to a target category.
#[derive(Clone, Debug)]
pub struct SymmetricSequence {
    prof: Arc<Profunctor>,
}

impl PartialEq for SymmetricSequence {
    fn eq(&self, other: &Self) -> bool {
        *self.prof == *other.prof
    }
}

/// `!A` or `↓A` truncated at `max_arity`.
pub fn generated(base: &Arc<FinCategory>, max_arity: usize, mode: SeqMode) -> Arc<FinCategory> {
    Arc::new(sequence_category(base, max_arity, mode))
}

fn seq_info(gen: &FinCategory) -> Result<&SeqInfo> {
    gen.seq_info().ok_or(Error::ModeError {
        expected: "sequence-indexed".into(),
    })
}

/// `m ⊕ m'`: the juxtaposition of two sequence morphisms; `n1` is the
/// source length of `m`.
pub fn juxtapose(m: &SeqMorphism, n1: usize, m2: &SeqMorphism) -> SeqMorphism {
    SeqMorphism {
        sigma: m.sigma.iter().copied().chain(m2.sigma.iter().map(|&i| i + n1)).collect(),
        components: m.components.iter().chain(&m2.components).copied().collect(),
    }
}

/// Identity sequence morphism on `entries`.
pub fn seq_identity(base: &FinCategory, entries: &[Obj]) -> SeqMorphism {
    SeqMorphism {
        sigma: (0..entries.len()).collect(),
        components: entries.iter().map(|&o| base.identity(o)).collect(),
    }
}

impl SymmetricSequence {
    pub fn new(prof: Arc<Profunctor>) -> Result<SymmetricSequence> {
        seq_info(prof.src())?;
        Ok(SymmetricSequence { prof })
    }

    /// Builds and checks a sequence from closures. `left(m, src_entries, b, x)`
    /// acts along `m: src → dst` on `x ∈ S(dst; b)`.
    pub fn from_fn(
        gen: &Arc<FinCategory>,
        target: &Arc<FinCategory>,
        cells: impl Fn(&[Obj], Obj) -> Vec<String>,
        left: impl Fn(&SeqMorphism, &[Obj], Obj, usize) -> usize,
        right: impl Fn(Mor, &[Obj], usize) -> usize,
    ) -> Result<SymmetricSequence> {
        let info = seq_info(gen)?;
        let cell_table: Vec<Vec<String>> = gen
            .objects()
            .flat_map(|s| target.objects().map(move |b| (s, b)))
            .map(|(s, b)| cells(info.entries(s), b))
            .collect();
        let nb = target.object_count();
        let l = gen
            .morphisms()
            .map(|f| {
                let (s, d) = (gen.src(f), gen.dst(f));
                target
                    .objects()
                    .map(|b| {
                        (0..cell_table[d * nb + b].len())
                            .map(|x| left(info.morphism(f), info.entries(s), b, x))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let r = target
            .morphisms()
            .map(|g| {
                gen.objects()
                    .map(|s| {
                        (0..cell_table[s * nb + target.src(g)].len())
                            .map(|x| right(g, info.entries(s), x))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let p = Profunctor::new(gen.clone(), target.clone(), cell_table, l, r)?;
        SymmetricSequence::new(Arc::new(p))
    }

    pub fn empty(gen: &Arc<FinCategory>, target: &Arc<FinCategory>) -> Result<SymmetricSequence> {
        SymmetricSequence::from_fn(gen, target, |_, _| Vec::new(), |_, _, _, x| x, |_, _, x| x)
    }

    /// The free sequence on generators `(entries, b, label)`:
    /// `S(s'; b') = Σ_k gen(s', s_k) × B(b_k, b')`.
    pub fn free(
        gen: &Arc<FinCategory>,
        target: &Arc<FinCategory>,
        gens: &[(Vec<Obj>, Obj, String)],
    ) -> Result<SymmetricSequence> {
        let info = seq_info(gen)?;
        let mut objs = Vec::with_capacity(gens.len());
        for (entries, b, _) in gens {
            let s = info.object_of(entries).ok_or(Error::ArityBudget {
                needed: entries.len(),
                available: info.max_arity,
            })?;
            if *b >= target.object_count() {
                return Err(Error::UnknownObject(b.to_string()));
            }
            objs.push((s, *b));
        }
        // (k, h, g) with h: s' → s_k and g: b_k → b'
        let index = |s2: Obj, b2: Obj, k: usize, h: Mor, g: Mor| -> usize {
            let mut off = 0;
            for &(s, b) in &objs[..k] {
                off += gen.hom(s2, s).len() * target.hom(b, b2).len();
            }
            let (s, b) = objs[k];
            off + (h - gen.hom(s2, s).start) * target.hom(b, b2).len() + (g - target.hom(b, b2).start)
        };
        let decode = |s2: Obj, b2: Obj, mut x: usize| -> (usize, Mor, Mor) {
            for (k, &(s, b)) in objs.iter().enumerate() {
                let (hs, gs) = (gen.hom(s2, s), target.hom(b, b2));
                let n = hs.len() * gs.len();
                if x < n {
                    return (k, hs.start + x / gs.len(), gs.start + x % gs.len());
                }
                x -= n;
            }
            unreachable!("element index out of range")
        };
        let mut cell_table = Vec::new();
        for s2 in gen.objects() {
            for b2 in target.objects() {
                let mut labels = Vec::new();
                for (k, &(s, b)) in objs.iter().enumerate() {
                    for h in gen.hom(s2, s) {
                        for g in target.hom(b, b2) {
                            labels.push(if gen.is_identity(h) && target.is_identity(g) {
                                gens[k].2.clone()
                            } else {
                                format!("{}·{}·{}", gens[k].2, gen.morphism_name(h), target.morphism_name(g))
                            });
                        }
                    }
                }
                cell_table.push(labels);
            }
        }
        let p = Profunctor::from_fn(
            gen.clone(),
            target.clone(),
            cell_table,
            |m, b2, x| {
                let (s1, s2) = (gen.src(m), gen.dst(m));
                let (k, h, g) = decode(s2, b2, x);
                index(s1, b2, k, gen.comp(h, m), g)
            },
            |g2, s2, x| {
                let (b, b2) = (target.src(g2), target.dst(g2));
                let (k, h, g) = decode(s2, b, x);
                index(s2, b2, k, h, target.comp(g2, g))
            },
        );
        SymmetricSequence::new(Arc::new(p))
    }

    /// Quotient by the congruence generated by `(entries, b, x, y)`.
    pub fn quotient(&self, pairs: &[(Vec<Obj>, Obj, usize, usize)]) -> Result<SymmetricSequence> {
        let info = self.info();
        let mut flat = Vec::with_capacity(pairs.len());
        for (entries, b, x, y) in pairs {
            let s = info.object_of(entries).ok_or(Error::UnknownObject(format!("{:?}", entries)))?;
            let n = self.prof.size(s, *b);
            if *x >= n || *y >= n {
                return Err(Error::UnknownElement(format!("{} or {}", x, y)));
            }
            flat.push((s, *b, *x, *y));
        }
        let (q, _) = self.prof.quotient(&flat);
        SymmetricSequence::new(Arc::new(q))
    }

    pub fn prof(&self) -> &Arc<Profunctor> {
        &self.prof
    }

    pub fn info(&self) -> &SeqInfo {
        self.prof.src().seq_info().expect("checked at construction")
    }

    pub fn mode(&self) -> SeqMode {
        self.info().mode
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.info().base
    }

    pub fn gen(&self) -> &Arc<FinCategory> {
        self.prof.src()
    }

    pub fn target(&self) -> &Arc<FinCategory> {
        self.prof.dst()
    }

    pub fn max_arity(&self) -> usize {
        self.info().max_arity
    }

    pub fn seq_object(&self, entries: &[Obj]) -> Option<Obj> {
        self.info().object_of(entries)
    }

    /// `S(entries; b)`, empty above the maximum arity.
    pub fn cell(&self, entries: &[Obj], b: Obj) -> &[String] {
        match self.seq_object(entries) {
            Some(s) => self.prof.cell(s, b),
            None => &[],
        }
    }

    pub fn total_size(&self) -> usize {
        self.prof.total_size()
    }

    /// Cell sizes per arity, summed over sequences and target objects.
    pub fn arity_profile(&self) -> Vec<usize> {
        let info = self.info();
        let mut out = vec![0; info.max_arity + 1];
        for s in self.gen().objects() {
            for b in self.target().objects() {
                out[info.entries(s).len()] += self.prof.size(s, b);
            }
        }
        out
    }

    /// Morphism index in the generated category.
    pub fn find(&self, src_entries: &[Obj], m: &SeqMorphism) -> Result<Mor> {
        let info = self.info();
        let s = info
            .object_of(src_entries)
            .ok_or(Error::UnknownObject(format!("{:?}", src_entries)))?;
        info.find(s, m).ok_or(Error::UnknownMorphism(format!("{:?}", m.sigma)))
    }
}

/// `ΠΦ` as a presheaf on a generated category: `ΠΦ(A⃗) = Π Φ(A_i)`, acting by
/// `(x_i) ↦ (Φ(f_j)(x_{σj}))_j`. Tuples are numbered in mixed radix, first
/// coordinate most significant.
#[derive(Clone, Debug)]
pub struct Power {
    pub value: Arc<Presheaf>,
    pub phi: Arc<Presheaf>,
    gen: Arc<FinCategory>,
}

impl Power {
    pub fn new(gen: &Arc<FinCategory>, phi: &Arc<Presheaf>) -> Result<Power> {
        let info = seq_info(gen)?;
        if !same(&info.base, phi.base()) {
            return Err(Error::BaseMismatch);
        }
        let elems = gen
            .objects()
            .map(|s| {
                let e = info.entries(s);
                let ranges: Vec<_> = e.iter().map(|&a| 0..phi.size(a)).collect();
                crate::fincat::cartesian(&ranges)
                    .into_iter()
                    .map(|t| {
                        let ls: Vec<&str> = t.iter().zip(e).map(|(&x, &a)| phi.label(a, x)).collect();
                        format!("⟨{}⟩", ls.join(","))
                    })
                    .collect()
            })
            .collect();
        let value = Presheaf::from_fn(gen.clone(), elems, |m, x| {
            let (s, d) = (gen.src(m), gen.dst(m));
            let (es, ed) = (info.entries(s), info.entries(d));
            let t = unflatten(x, es.iter().map(|&a| phi.size(a)));
            let sm = info.morphism(m);
            let img: Vec<usize> = sm
                .sigma
                .iter()
                .zip(&sm.components)
                .map(|(&i, &f)| phi.act(f, t[i]))
                .collect();
            flatten(&img, ed.iter().map(|&a| phi.size(a)))
        });
        Ok(Power {
            value: Arc::new(value),
            phi: phi.clone(),
            gen: gen.clone(),
        })
    }

    pub fn decode(&self, s: Obj, x: usize) -> Vec<usize> {
        let e = self.gen.seq_info().unwrap().entries(s);
        unflatten(x, e.iter().map(|&a| self.phi.size(a)))
    }

    pub fn encode(&self, s: Obj, t: &[usize]) -> usize {
        let e = self.gen.seq_info().unwrap().entries(s);
        flatten(t, e.iter().map(|&a| self.phi.size(a)))
    }

    /// `Πt: ΠΦ → ΠΨ`.
    pub fn map(&self, t: &NatTrans, dst: &Power) -> NatTrans {
        let info = self.gen.seq_info().unwrap();
        let comps = self
            .gen
            .objects()
            .map(|s| {
                let e = info.entries(s);
                (0..self.value.size(s))
                    .map(|x| {
                        let tup = self.decode(s, x);
                        let img: Vec<usize> = tup.iter().zip(e).map(|(&v, &a)| t.apply(a, v)).collect();
                        dst.encode(s, &img)
                    })
                    .collect()
            })
            .collect();
        NatTrans::from_parts(self.value.clone(), dst.value.clone(), comps)
    }
}

/// The value of an analytic functor, with the coend tables that produced it.
/// Generators at `b` are `(sequence, tuple, p)`.
#[derive(Clone, Debug)]
pub struct AnalyticEval {
    pub value: Arc<Presheaf>,
    pub tensor: Tensor,
    pub power: Power,
}

impl AnalyticEval {
    /// Canonical representative `(sequence, tuple, p)` of element `k` at `b`.
    pub fn element(&self, b: Obj, k: usize) -> (Obj, Vec<usize>, usize) {
        let (s, x, p) = self.tensor.representative(b, k);
        (s, self.power.decode(s, x), p)
    }

    pub fn class_of(&self, b: Obj, s: Obj, tuple: &[usize], p: usize) -> usize {
        self.tensor.class(b, s, self.power.encode(s, tuple), p)
    }

    /// Every generator `(sequence, tuple, p)` of every class at `b`.
    pub fn class_members(&self, b: Obj) -> Vec<Vec<(Obj, Vec<usize>, usize)>> {
        let co = self.tensor.coend(b);
        co.members()
            .into_iter()
            .map(|gs| {
                gs.into_iter()
                    .map(|g| {
                        let (s, x, p) = co.generator(g);
                        (s, self.power.decode(s, x), p)
                    })
                    .collect()
            })
            .collect()
    }
}

/// `S̃(Φ) = ∫^{A⃗} S(A⃗; −) × ΠΦ(A⃗)`.
pub fn analytic_eval(s: &SymmetricSequence, phi: &Arc<Presheaf>) -> Result<AnalyticEval> {
    let power = Power::new(s.gen(), phi)?;
    let tensor = tensor_presheaf(s.prof(), &power.value)?;
    Ok(AnalyticEval {
        value: tensor.value.clone(),
        tensor,
        power,
    })
}

/// `S̃(t)`: `[p, φ] ↦ [p, t∘φ]`.
pub fn analytic_map(s: &SymmetricSequence, t: &NatTrans, src: &AnalyticEval, dst: &AnalyticEval) -> NatTrans {
    let pm = src.power.map(t, &dst.power);
    tensor_map(s.prof(), &pm, &src.tensor, &dst.tensor)
}

/// `∇_A S` together with the orbit data of each cell.
#[derive(Clone, Debug)]
pub struct Nabla {
    pub value: SymmetricSequence,
    /// Per cell `(X⃗, b)`: the elements as `(n, orbit minimum in S(X⃗⊗A^n; b))`.
    pub orbits: Vec<Vec<(usize, usize)>>,
    pub a: Obj,
}

/// `∇_A S(X⃗; b) = Σ_{n≥1} S(X⃗ ⊗ A^n; b) / S_n` with `S_n` permuting the
/// appended copies of `A`. Output arity is one less than the input's.
pub fn nabla(s: &SymmetricSequence, a: Obj) -> Result<Nabla> {
    if s.mode() != SeqMode::Strict {
        return Err(Error::ModeError {
            expected: "strict".into(),
        });
    }
    let base = s.base().clone();
    if a >= base.object_count() {
        return Err(Error::UnknownObject(a.to_string()));
    }
    let n_max = s.max_arity();
    let out_arity = n_max.saturating_sub(1);
    let gen2 = generated(&base, out_arity, SeqMode::Strict);
    let info2 = gen2.seq_info().unwrap();
    let target = s.target().clone();
    let nb = target.object_count();
    let p = s.prof();
    let ida = base.identity(a);
    let extend = |x: &[Obj], n: usize| -> Vec<Obj> { x.iter().copied().chain(std::iter::repeat_n(a, n)).collect() };
    // permutations of the appended block, as morphisms of the input category
    let mut group: HashMap<(Obj, usize), Vec<Mor>> = HashMap::new();
    let orbit_min = |y: &[Obj], xlen: usize, b: Obj, x: usize, group: &mut HashMap<(Obj, usize), Vec<Mor>>| -> Result<usize> {
        let ys = s.seq_object(y).unwrap();
        let n = y.len() - xlen;
        let ms = match group.get(&(ys, xlen)) {
            Some(ms) => ms.clone(),
            None => {
                let mut ms = Vec::new();
                for pi in permutations(n) {
                    let m = juxtapose(&seq_identity(&base, &y[..xlen]), xlen, &SeqMorphism {
                        sigma: pi,
                        components: vec![ida; n],
                    });
                    ms.push(s.find(y, &m)?);
                }
                group.insert((ys, xlen), ms.clone());
                ms
            }
        };
        Ok(ms.iter().map(|&m| p.left_act(m, b, x)).min().unwrap_or(x))
    };
    let mut orbits = Vec::with_capacity(gen2.object_count() * nb);
    let mut index: Vec<HashMap<(usize, usize), usize>> = Vec::new();
    for xo in gen2.objects() {
        let x = info2.entries(xo).to_vec();
        for b in target.objects() {
            let mut cell = Vec::new();
            for n in 1..=(n_max - x.len().min(n_max)) {
                let y = extend(&x, n);
                let ys = s.seq_object(&y).unwrap();
                let mut reps = BTreeSet::new();
                for e in 0..p.size(ys, b) {
                    reps.insert(orbit_min(&y, x.len(), b, e, &mut group)?);
                }
                cell.extend(reps.into_iter().map(|r| (n, r)));
            }
            index.push(cell.iter().enumerate().map(|(k, &key)| (key, k)).collect());
            orbits.push(cell);
        }
    }
    let cells: Vec<Vec<String>> = gen2
        .objects()
        .flat_map(|xo| target.objects().map(move |b| (xo, b)))
        .map(|(xo, b)| {
            let x = info2.entries(xo);
            orbits[xo * nb + b]
                .iter()
                .map(|&(n, r)| {
                    let ys = s.seq_object(&extend(x, n)).unwrap();
                    format!("[{}]", p.cell(ys, b)[r])
                })
                .collect()
        })
        .collect();
    let mut left = Vec::with_capacity(gen2.morphism_count());
    for m in gen2.morphisms() {
        let (x1o, x2o) = (gen2.src(m), gen2.dst(m));
        let (x1, x2) = (info2.entries(x1o), info2.entries(x2o));
        let mut per_b = Vec::with_capacity(nb);
        for b in target.objects() {
            let mut row = Vec::new();
            for &(n, r) in &orbits[x2o * nb + b] {
                let y1 = extend(x1, n);
                let y2 = extend(x2, n);
                let mm = juxtapose(info2.morphism(m), x1.len(), &seq_identity(&base, &y2[x2.len()..]));
                let big = s.find(&y1, &mm)?;
                debug_assert_eq!(gen2.src(m), x1o);
                let img = orbit_min(&y1, x1.len(), b, p.left_act(big, b, r), &mut group)?;
                row.push(index[x1o * nb + b][&(n, img)]);
            }
            per_b.push(row);
        }
        left.push(per_b);
    }
    let mut right = Vec::with_capacity(target.morphism_count());
    for g in target.morphisms() {
        let (b, b2) = (target.src(g), target.dst(g));
        let mut per_x = Vec::with_capacity(gen2.object_count());
        for xo in gen2.objects() {
            let x = info2.entries(xo);
            let mut row = Vec::new();
            for &(n, r) in &orbits[xo * nb + b] {
                let y = extend(x, n);
                let ys = s.seq_object(&y).unwrap();
                let img = orbit_min(&y, x.len(), b2, p.right_act(g, ys, r), &mut group)?;
                row.push(index[xo * nb + b2][&(n, img)]);
            }
            per_x.push(row);
        }
        right.push(per_x);
    }
    let prof = Profunctor::new(gen2, target, cells, left, right)?;
    Ok(Nabla {
        value: SymmetricSequence::new(Arc::new(prof))?,
        orbits,
        a,
    })
}

/// The comparison `(∇_A S)~(Φ) → S̃(Φ + A(A, −))`,
/// `[[p], φ] ↦ [p, φ ⊕ ι^n]` with `ι = inj₂(1_A)`, checked constant on classes.
/// `shifted` must be `coproduct(Φ, A(A, −))`.
pub fn nabla_comparison(
    s: &SymmetricSequence,
    nab: &Nabla,
    phi: &Arc<Presheaf>,
    shifted: &AnalyticEval,
) -> Result<NatTrans> {
    let ev = analytic_eval(&nab.value, phi)?;
    let base = s.base();
    let a = nab.a;
    let info2 = nab.value.info();
    let nb = s.target().object_count();
    let iota = phi.size(a) + (base.identity(a) - base.hom(a, a).start);
    let mut comps = Vec::with_capacity(nb);
    for b in s.target().objects() {
        let co = ev.tensor.coend(b);
        let mut row = vec![usize::MAX; co.class_count()];
        for g in 0..co.generator_count() {
            let (xo, tx, e) = co.generator(g);
            let x = info2.entries(xo);
            let (n, r) = nab.orbits[xo * nb + b][e];
            let mut y = x.to_vec();
            y.extend(std::iter::repeat_n(a, n));
            let ys = s.seq_object(&y).ok_or(Error::ArityBudget {
                needed: y.len(),
                available: s.max_arity(),
            })?;
            let mut tup = ev.power.decode(xo, tx);
            tup.extend(std::iter::repeat_n(iota, n));
            let img = shifted.class_of(b, ys, &tup, r);
            let cl = co.class_of_generator(g);
            if row[cl] == usize::MAX {
                row[cl] = img;
            } else if row[cl] != img {
                return Err(Error::NotWellDefined(ev.value.label(b, cl).to_string()));
            }
        }
        comps.push(row);
    }
    NatTrans::new(ev.value.clone(), shifted.value.clone(), comps)
}

/// The inclusion `!A → ↓A` at a common truncation level.
pub fn strict_to_soft(strict: &Arc<FinCategory>, soft: &Arc<FinCategory>) -> Result<FinFunctor> {
    let (si, di) = (seq_info(strict)?, seq_info(soft)?);
    if si.mode != SeqMode::Strict || di.mode != SeqMode::Soft || si.max_arity != di.max_arity {
        return Err(Error::ModeError {
            expected: "strict and soft pair".into(),
        });
    }
    let objects: Vec<Obj> = strict.objects().map(|s| di.object_of(si.entries(s)).unwrap()).collect();
    let morphisms = strict
        .morphisms()
        .map(|m| di.find(objects[strict.src(m)], si.morphism(m)).unwrap())
        .collect();
    FinFunctor::new(strict.clone(), soft.clone(), objects, morphisms)
}

/// `P′ = P ⊗_{!A} ↓A(−, J−)`, the soft sequence whose soft analytic functor
/// agrees with the analytic functor of `P`.
pub fn soften(s: &SymmetricSequence) -> Result<SymmetricSequence> {
    if s.mode() != SeqMode::Strict {
        return Err(Error::ModeError {
            expected: "strict".into(),
        });
    }
    let soft = generated(s.base(), s.max_arity(), SeqMode::Soft);
    let j = strict_to_soft(s.gen(), &soft)?;
    let jstar = Arc::new(contravariant_rep(&j));
    let c = compose(s.prof(), &jstar)?;
    SymmetricSequence::new(c.value)
}

/// Orbit count `Σ_{m_i ≥ 1} |S(A_1^{m_1}, …; b) / Π S_{m_i}|`, the closed
/// form for the cells of a softened sequence.
pub fn soften_orbit_count(s: &SymmetricSequence, entries: &[Obj], b: Obj) -> Result<usize> {
    let base = s.base();
    let n = entries.len();
    let budget = s.max_arity();
    let mut total = 0;
    if n == 0 {
        return Ok(s.cell(&[], b).len());
    }
    let ranges: Vec<_> = (0..n).map(|_| 1..budget + 1).collect();
    for ms in crate::fincat::cartesian(&ranges) {
        if ms.iter().sum::<usize>() > budget {
            continue;
        }
        let y: Vec<Obj> = entries.iter().zip(&ms).flat_map(|(&a, &m)| std::iter::repeat_n(a, m)).collect();
        let ys = s.seq_object(&y).unwrap();
        let size = s.prof().size(ys, b);
        if size == 0 {
            continue;
        }
        let mut uf = UnionFind::new(size);
        let mut off = 0;
        for &m in &ms {
            for pi in permutations(m) {
                let sigma: Vec<usize> = (0..y.len())
                    .map(|j| if j >= off && j < off + m { off + pi[j - off] } else { j })
                    .collect();
                let mm = SeqMorphism {
                    sigma,
                    components: y.iter().map(|&o| base.identity(o)).collect(),
                };
                let f = s.find(&y, &mm)?;
                for x in 0..size {
                    uf.union(x, s.prof().left_act(f, b, x));
                }
            }
            off += m;
        }
        total += uf.classes().1.len();
    }
    Ok(total)
}

/// `Q(A⃗; X) = Σ_i A(A_i, X)` as a profunctor from the generated category to `A`.
pub fn q_profunctor(gen: &Arc<FinCategory>) -> Result<Profunctor> {
    let info = seq_info(gen)?;
    let base = info.base.clone();
    let na = base.object_count();
    let offset = |e: &[Obj], i: usize, x: Obj| -> usize { e[..i].iter().map(|&c| base.hom(c, x).len()).sum() };
    let decode = |e: &[Obj], x: Obj, mut k: usize| -> (usize, Mor) {
        for (i, &c) in e.iter().enumerate() {
            let h = base.hom(c, x);
            if k < h.len() {
                return (i, h.start + k);
            }
            k -= h.len();
        }
        unreachable!("element index out of range")
    };
    let cells = gen
        .objects()
        .flat_map(|s| (0..na).map(move |x| (s, x)))
        .map(|(s, x)| {
            let e = info.entries(s);
            e.iter()
                .enumerate()
                .flat_map(|(i, &c)| base.hom(c, x).map(move |h| (i, h)))
                .map(|(i, h)| format!("{}:{}", i, base.morphism_name(h)))
                .collect()
        })
        .collect();
    Ok(Profunctor::from_fn(
        gen.clone(),
        base.clone(),
        cells,
        |m, x, k| {
            let (s1, s2) = (gen.src(m), gen.dst(m));
            let (e1, e2) = (info.entries(s1), info.entries(s2));
            let (j, h) = decode(e2, x, k);
            let sm = info.morphism(m);
            let i = sm.sigma[j];
            offset(e1, i, x) + base.comp(h, sm.components[j]) - base.hom(e1[i], x).start
        },
        |g, s, k| {
            let e = info.entries(s);
            let (x, x2) = (base.src(g), base.dst(g));
            let (i, h) = decode(e, x, k);
            offset(e, i, x2) + base.comp(g, h) - base.hom(e[i], x2).start
        },
    ))
}

/// The element `1_{A_i}` of each summand of a tagged sum of representables.
pub fn sum_generators(src: &Presheaf) -> Result<Vec<(Obj, usize)>> {
    let tags = src.rep_tags().ok_or(Error::NotSumOfReps)?;
    let base = src.base();
    Ok(tags
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let off: usize = tags[..i].iter().map(|&c| base.hom(c, a).len()).sum();
            (a, off + base.identity(a) - base.hom(a, a).start)
        })
        .collect())
}

/// `Σ_σ A(f_i, −): Σ_i A(A_i, −) → Σ_j A(C_j, −)` for `m: C⃗ → A⃗`; both
/// presheaves must be tagged sums with these entries.
pub fn seq_rep_map(base: &FinCategory, m: &SeqMorphism, src: &Arc<Presheaf>, dst: &Arc<Presheaf>) -> Result<NatTrans> {
    let (ta, tc) = (
        src.rep_tags().ok_or(Error::NotSumOfReps)?.to_vec(),
        dst.rep_tags().ok_or(Error::NotSumOfReps)?.to_vec(),
    );
    if m.sigma.len() != ta.len() {
        return Err(Error::NotSumOfReps);
    }
    let comps = base
        .objects()
        .map(|x| {
            let mut row = Vec::new();
            for (i, &ai) in ta.iter().enumerate() {
                let c = m.sigma[i];
                let off: usize = tc[..c].iter().map(|&o| base.hom(o, x).len()).sum();
                for h in base.hom(ai, x) {
                    let k = base.comp(h, m.components[i]);
                    row.push(off + k - base.hom(tc[c], x).start);
                }
            }
            row
        })
        .collect();
    NatTrans::new(src.clone(), dst.clone(), comps)
}

/// The elements `φ(A_i)(1_{A_i})` picked by a map out of a tagged sum.
pub fn picked_elements(t: &NatTrans) -> Result<Vec<(Obj, usize)>> {
    Ok(sum_generators(t.src())?
        .into_iter()
        .map(|(a, g)| (a, t.apply(a, g)))
        .collect())
}

/// Ancestors `(C, y)` of `x ∈ Φ(a)` with a witnessing morphism `C → a`.
pub fn ancestors(phi: &Presheaf, a: Obj, x: usize) -> Vec<(Obj, usize, Mor)> {
    let base = phi.base();
    let mut out = Vec::new();
    for c in base.objects() {
        for y in 0..phi.size(c) {
            if let Some(f) = base.hom(c, a).find(|&f| phi.act(f, y) == x) {
                out.push((c, y, f));
            }
        }
    }
    out
}

/// Least common ancestor `(C, y, f, g)` of two elements, if any.
pub fn common_ancestor(phi: &Presheaf, u: (Obj, usize), v: (Obj, usize)) -> Option<(Obj, usize, Mor, Mor)> {
    let av = ancestors(phi, v.0, v.1);
    ancestors(phi, u.0, u.1).into_iter().find_map(|(c, y, f)| {
        av.iter()
            .find(|&&(c2, y2, _)| c2 == c && y2 == y)
            .map(|&(_, _, g)| (c, y, f, g))
    })
}

pub fn is_diverse_sequence(phi: &Presheaf, xs: &[(Obj, usize)]) -> bool {
    (0..xs.len()).all(|i| (i + 1..xs.len()).all(|j| common_ancestor(phi, xs[i], xs[j]).is_none()))
}

pub fn is_diverse(t: &NatTrans) -> Result<bool> {
    Ok(is_diverse_sequence(t.dst(), &picked_elements(t)?))
}

/// `φ = ψ ∘ Σ_σ A(f_i, −)` with `ψ: Σ A(C_j, −) → Φ` diverse.
#[derive(Clone, Debug)]
pub struct DiverseFactorization {
    pub entries: Vec<Obj>,
    pub elements: Vec<usize>,
    /// `C⃗ → A⃗` in `↓A`.
    pub morphism: SeqMorphism,
    pub psi: NatTrans,
    pub restriction: NatTrans,
}

/// Merges related summands, least pair first, until the picked elements are
/// diverse. Each merge shortens the sequence by one.
pub fn diverse_factorize(t: &NatTrans) -> Result<DiverseFactorization> {
    let phi = t.dst().clone();
    let base = phi.base().clone();
    let xs = picked_elements(t)?;
    let target: Vec<Obj> = xs.iter().map(|p| p.0).collect();
    let mut cur: Vec<(Obj, usize)> = xs.clone();
    let mut m = seq_identity(&base, &target);
    'merge: loop {
        for i in 0..cur.len() {
            for j in i + 1..cur.len() {
                if let Some((c, y, f, g)) = common_ancestor(&phi, cur[i], cur[j]) {
                    // the merge morphism: new sequence → cur
                    let mut next = cur.clone();
                    next[i] = (c, y);
                    next.remove(j);
                    let sigma: Vec<usize> = (0..cur.len())
                        .map(|k| match k.cmp(&j) {
                            std::cmp::Ordering::Less => k,
                            std::cmp::Ordering::Equal => i,
                            std::cmp::Ordering::Greater => k - 1,
                        })
                        .collect();
                    let components = (0..cur.len())
                        .map(|k| {
                            if k == i {
                                f
                            } else if k == j {
                                g
                            } else {
                                base.identity(cur[k].0)
                            }
                        })
                        .collect();
                    let step = SeqMorphism { sigma, components };
                    m = compose_seq(&base, &step, &m);
                    cur = next;
                    continue 'merge;
                }
            }
        }
        break;
    }
    let entries: Vec<Obj> = cur.iter().map(|p| p.0).collect();
    let elements: Vec<usize> = cur.iter().map(|p| p.1).collect();
    let csum = Arc::new(Presheaf::sum_of_representables(&base, &entries)?);
    let psi = NatTrans::from_elements(csum.clone(), &phi, &elements)?;
    let restriction = seq_rep_map(&base, &m, t.src(), &csum)?;
    Ok(DiverseFactorization {
        entries,
        elements,
        morphism: m,
        psi,
        restriction,
    })
}

/// Every generator of a class of a soft analytic value touches the same
/// components of `Φ` (the Boolean image of `φ` is a class invariant).
/// Returns the first offending class label.
pub fn boolean_image_violation(ev: &AnalyticEval) -> Option<String> {
    let phi = &ev.power.phi;
    let comps = phi.pi0();
    let info = ev.power.gen.seq_info().unwrap();
    for b in 0..ev.value.base().object_count() {
        for (k, members) in ev.class_members(b).iter().enumerate() {
            let image = |(s, t, _): &(Obj, Vec<usize>, usize)| -> BTreeSet<usize> {
                info.entries(*s).iter().zip(t).map(|(&a, &x)| comps.of[a][x]).collect()
            };
            let first = image(&members[0]);
            if members.iter().any(|m| image(m) != first) {
                return Some(ev.value.label(b, k).to_string());
            }
        }
    }
    None
}

/// Whether the canonical representative of every class has a diverse tuple.
pub fn representatives_diverse(ev: &AnalyticEval) -> bool {
    let phi = &ev.power.phi;
    let info = ev.power.gen.seq_info().unwrap();
    (0..ev.value.base().object_count()).all(|b| {
        (0..ev.value.size(b)).all(|k| {
            let (s, t, _) = ev.element(b, k);
            let xs: Vec<(Obj, usize)> = info.entries(s).iter().copied().zip(t).collect();
            is_diverse_sequence(phi, &xs)
        })
    })
}

/// The comparison from the double coend
/// `∫^{X⃗,Y⃗} S(X⃗⊗Y⃗; b) × ΠΦ₁(X⃗) × ΠΦ₂(Y⃗)` to `S̃(Φ₁ + Φ₂)(b)`, one row per `b`,
/// checked constant on classes. `sum` must be `coproduct(Φ₁, Φ₂)`.
pub fn addition_comparison(
    s: &SymmetricSequence,
    phi1: &Arc<Presheaf>,
    phi2: &Arc<Presheaf>,
    sum: &AnalyticEval,
) -> Result<Vec<(usize, Vec<usize>)>> {
    let gen = s.gen();
    let info = s.info();
    let base = s.base();
    let p1 = Power::new(gen, phi1)?;
    let p2 = Power::new(gen, phi2)?;
    let n_max = s.max_arity();
    let pairs: Vec<(Obj, Obj)> = gen
        .objects()
        .flat_map(|x| gen.objects().map(move |y| (x, y)))
        .filter(|&(x, y)| info.entries(x).len() + info.entries(y).len() <= n_max)
        .collect();
    let pair_index: HashMap<(Obj, Obj), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let concat = |x: Obj, y: Obj| -> Obj {
        let mut e = info.entries(x).to_vec();
        e.extend_from_slice(info.entries(y));
        info.object_of(&e).unwrap()
    };
    let mut arrows = Vec::new();
    // (pair src, pair dst, morphism of the concatenated sequences)
    let mut arrow_data = Vec::new();
    for (i, &(x, y)) in pairs.iter().enumerate() {
        // soft morphisms lengthen sequences; arrows leaving the truncation carry no relation
        for m in gen.out_of(x).filter(|&m| !gen.is_identity(m)) {
            let Some(&j) = pair_index.get(&(gen.dst(m), y)) else {
                continue;
            };
            let mm = juxtapose(info.morphism(m), info.entries(x).len(), &seq_identity(base, info.entries(y)));
            arrows.push((i, j, arrows.len()));
            arrow_data.push((m, true, s.find(&[info.entries(x), info.entries(y)].concat(), &mm)?));
        }
        for m in gen.out_of(y).filter(|&m| !gen.is_identity(m)) {
            let Some(&j) = pair_index.get(&(x, gen.dst(m))) else {
                continue;
            };
            let mm = juxtapose(&seq_identity(base, info.entries(x)), info.entries(x).len(), info.morphism(m));
            arrows.push((i, j, arrows.len()));
            arrow_data.push((m, false, s.find(&[info.entries(x), info.entries(y)].concat(), &mm)?));
        }
    }
    let mut out = Vec::new();
    for b in s.target().objects() {
        let k = TableFamily {
            sizes: pairs.iter().map(|&(x, y)| s.prof().size(concat(x, y), b)).collect(),
            action: arrow_data
                .iter()
                .zip(&arrows)
                .map(|(&(_, _, big), &(_, j, _))| {
                    let (x2, y2) = pairs[j];
                    (0..s.prof().size(concat(x2, y2), b)).map(|e| s.prof().left_act(big, b, e)).collect()
                })
                .collect(),
        };
        let l = TableFamily {
            sizes: pairs.iter().map(|&(x, y)| p1.value.size(x) * p2.value.size(y)).collect(),
            action: arrow_data
                .iter()
                .zip(&arrows)
                .map(|(&(m, first, _), &(i, _, _))| {
                    let (x, y) = pairs[i];
                    let (j2, jy) = if first {
                        (p2.value.size(y), gen.dst(m))
                    } else {
                        (p2.value.size(gen.dst(m)), y)
                    };
                    let _ = jy;
                    (0..p1.value.size(x) * p2.value.size(y))
                        .map(|v| {
                            let (u1, u2) = (v / p2.value.size(y), v % p2.value.size(y));
                            if first {
                                p1.value.act(m, u1) * j2 + u2
                            } else {
                                u1 * j2 + p2.value.act(m, u2)
                            }
                        })
                        .collect()
                })
                .collect(),
        };
        let co = Coend::over_arrows(pairs.len(), &arrows, &k, &l);
        let mut row = vec![usize::MAX; co.class_count()];
        for g in 0..co.generator_count() {
            let (pi, v, e) = co.generator(g);
            let (x, y) = pairs[pi];
            let (u1, u2) = (v / p2.value.size(y), v % p2.value.size(y));
            let mut tup: Vec<usize> = p1.decode(x, u1);
            let ey = info.entries(y);
            tup.extend(p2.decode(y, u2).iter().zip(ey).map(|(&w, &a)| phi1.size(a) + w));
            let img = sum.class_of(b, concat(x, y), &tup, e);
            let cl = co.class_of_generator(g);
            if row[cl] == usize::MAX {
                row[cl] = img;
            } else if row[cl] != img {
                return Err(Error::NotWellDefined(format!("double coend class {} at {}", cl, b)));
            }
        }
        out.push((co.class_count(), row));
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::presheaf::fixtures::*;

    pub(crate) fn one() -> Arc<FinCategory> {
        Arc::new(FinCategory::terminal())
    }

    pub(crate) fn set_of(n: usize) -> Arc<Presheaf> {
        let one = one();
        let elems = vec![(0..n).map(|i| format!("x{}", i)).collect()];
        Arc::new(Presheaf::new(one.clone(), elems, vec![(0..n).collect()]).unwrap())
    }

    /// Over `1`: one element per listed arity, every morphism acting trivially.
    pub(crate) fn trivial_on_one(mode: SeqMode, max: usize, arities: &[(usize, &str)]) -> SymmetricSequence {
        let base = one();
        let gen = generated(&base, max, mode);
        SymmetricSequence::from_fn(
            &gen,
            &base,
            |e, _| arities.iter().filter(|(n, _)| *n == e.len()).map(|(_, l)| l.to_string()).collect(),
            |_, _, _, _| 0,
            |_, _, x| x,
        )
        .unwrap()
    }

    fn card(s: &SymmetricSequence, n: usize) -> usize {
        analytic_eval(s, &set_of(n)).unwrap().value.size(0)
    }

    #[test]
    fn strict_square_counts() {
        let s = trivial_on_one(SeqMode::Strict, 3, &[(1, "p"), (2, "q")]);
        for n in 0..4 {
            assert_eq!(card(&s, n), n + n * (n + 1) / 2);
        }
    }

    #[test]
    fn soft_square_counts() {
        let s = trivial_on_one(SeqMode::Soft, 3, &[(1, "p"), (2, "q")]);
        for n in 0..4 {
            assert_eq!(card(&s, n), n + n * (n.saturating_sub(1)) / 2);
        }
    }

    #[test]
    fn arity_zero_is_constant() {
        let s = trivial_on_one(SeqMode::Strict, 2, &[(0, "c")]);
        for n in 0..3 {
            assert_eq!(card(&s, n), 1);
        }
    }

    #[test]
    fn nabla_of_square() {
        let s = trivial_on_one(SeqMode::Strict, 3, &[(1, "p"), (2, "q")]);
        let nb = nabla(&s, 0).unwrap();
        assert_eq!(nb.value.max_arity(), 2);
        assert_eq!(nb.value.cell(&[], 0).len(), 2);
        assert_eq!(nb.value.cell(&[0], 0).len(), 1);
        assert_eq!(nb.value.cell(&[0, 0], 0).len(), 0);
        let c = trivial_on_one(SeqMode::Strict, 2, &[(0, "c")]);
        assert_eq!(nabla(&c, 0).unwrap().value.total_size(), 0);
        // Δ[x + sym² x](n) = n + 2 ... = |(∇S)~(n)|
        for n in 0..4 {
            assert_eq!(card(&nb.value, n), n + 2);
        }
    }

    #[test]
    fn nabla_rejects_soft() {
        let s = trivial_on_one(SeqMode::Soft, 2, &[(1, "p")]);
        assert!(matches!(nabla(&s, 0), Err(Error::ModeError { .. })));
    }

    #[test]
    fn nabla_comparison_is_bijective_on_sets() {
        let s = trivial_on_one(SeqMode::Strict, 3, &[(1, "p"), (2, "q")]);
        let nb = nabla(&s, 0).unwrap();
        for n in 0..3 {
            let phi = set_of(n);
            let rep = Presheaf::representable(&one(), 0).unwrap();
            let shifted = Arc::new(Presheaf::coproduct(&[&phi, &rep]).unwrap());
            let ev = analytic_eval(&s, &shifted).unwrap();
            let t = nabla_comparison(&s, &nb, &phi, &ev).unwrap();
            assert!(t.is_mono());
            assert_eq!(t.src().size(0) + card(&s, n), ev.value.size(0));
        }
    }

    #[test]
    fn soften_cells() {
        let s = trivial_on_one(SeqMode::Strict, 2, &[(1, "p")]);
        let p = soften(&s).unwrap();
        assert_eq!(p.mode(), SeqMode::Soft);
        assert_eq!(p.arity_profile(), vec![0, 1, 0]);
        let s2 = trivial_on_one(SeqMode::Strict, 2, &[(2, "q")]);
        let p2 = soften(&s2).unwrap();
        assert_eq!(p2.cell(&[0], 0).len(), 1);
        assert_eq!(p2.cell(&[0, 0], 0).len(), 1);
        for e in [vec![], vec![0], vec![0, 0]] {
            assert_eq!(p2.cell(&e, 0).len(), soften_orbit_count(&s2, &e, 0).unwrap());
        }
        for n in 0..4 {
            assert_eq!(card(&s2, n), card(&p2, n));
        }
    }

    #[test]
    fn soften_agrees_on_arrow() {
        let a = arr();
        let gen = generated(&a, 2, SeqMode::Strict);
        let s = SymmetricSequence::free(&gen, &one(), &[(vec![0, 1], 0, "g".into())]).unwrap();
        let p = soften(&s).unwrap();
        let phi = phi_arr(&a);
        assert_eq!(
            analytic_eval(&s, &phi).unwrap().value.size(0),
            analytic_eval(&p, &phi).unwrap().value.size(0)
        );
        for e in [vec![0], vec![1], vec![0, 1], vec![1, 0], vec![1, 1]] {
            assert_eq!(p.cell(&e, 0).len(), soften_orbit_count(&s, &e, 0).unwrap());
        }
    }

    #[test]
    fn q_rows_have_one_component_per_entry() {
        let a = arr();
        let gen = generated(&a, 2, SeqMode::Strict);
        let q = q_profunctor(&gen).unwrap();
        let info = gen.seq_info().unwrap();
        for s in gen.objects() {
            assert_eq!(q.row_presheaf(s).pi0().count(), info.entries(s).len());
        }
        assert!(crate::prof::hom_tense_check(&q).holds);
        let soft = generated(&a, 2, SeqMode::Soft);
        assert!(crate::prof::hom_tense_check(&q_profunctor(&soft).unwrap()).holds);
    }

    #[test]
    fn diverse_examples() {
        let a = arr();
        let phi = phi_arr(&a);
        let src = Arc::new(Presheaf::sum_of_representables(&a, &[1, 1]).unwrap());
        // x ↦ (y, z): picks y and z
        let t = NatTrans::from_elements(src.clone(), &phi, &[0, 1]).unwrap();
        assert!(is_diverse(&t).unwrap());
        let t2 = NatTrans::from_elements(src.clone(), &phi, &[0, 0]).unwrap();
        assert!(!is_diverse(&t2).unwrap());
        let f = diverse_factorize(&t2).unwrap();
        assert_eq!(f.entries.len(), 1);
        assert!(is_diverse(&f.psi).unwrap());
        assert_eq!(f.psi.after(&f.restriction).unwrap().components(), t2.components());
        let single = Arc::new(Presheaf::sum_of_representables(&a, &[0]).unwrap());
        assert!(is_diverse(&NatTrans::from_elements(single, &phi, &[0]).unwrap()).unwrap());
    }

    #[test]
    fn soft_classes_keep_boolean_image_and_have_diverse_representatives() {
        let s = trivial_on_one(SeqMode::Soft, 3, &[(1, "p"), (2, "q")]);
        let ev = analytic_eval(&s, &set_of(3)).unwrap();
        assert!(boolean_image_violation(&ev).is_none());
        assert!(representatives_diverse(&ev));
    }

    #[test]
    fn addition_formula_on_sets() {
        let s = trivial_on_one(SeqMode::Strict, 3, &[(1, "p"), (2, "q")]);
        let (p1, p2) = (set_of(1), set_of(2));
        let sum = Arc::new(Presheaf::coproduct(&[&p1, &p2]).unwrap());
        let ev = analytic_eval(&s, &sum).unwrap();
        let rows = addition_comparison(&s, &p1, &p2, &ev).unwrap();
        let (n, row) = &rows[0];
        assert_eq!(*n, ev.value.size(0));
        let mut seen: Vec<usize> = row.clone();
        seen.sort();
        assert_eq!(seen, (0..*n).collect::<Vec<_>>());
    }

    #[test]
    fn addition_formula_soft_near_the_truncation() {
        let gen = generated(&one(), 3, SeqMode::Soft);
        let s = SymmetricSequence::free(&gen, &one(), &[(vec![0], 0, "p".into()), (vec![0, 0, 0], 0, "r".into())]).unwrap();
        let (p1, p2) = (set_of(2), set_of(1));
        let sum = Arc::new(Presheaf::coproduct(&[&p1, &p2]).unwrap());
        let ev = analytic_eval(&s, &sum).unwrap();
        let (n, row) = &addition_comparison(&s, &p1, &p2, &ev).unwrap()[0];
        assert_eq!(*n, ev.value.size(0));
        let mut seen = row.clone();
        seen.sort();
        assert_eq!(seen, (0..*n).collect::<Vec<_>>());
    }

    #[test]
    fn free_sequence_is_valid() {
        let a = arr();
        let gen = generated(&a, 2, SeqMode::Soft);
        let s = SymmetricSequence::free(&gen, &a, &[(vec![0, 0], 1, "g".into())]).unwrap();
        s.prof().check().unwrap();
        assert!(s.cell(&[0, 0], 1).len() == 2);
        let q = s.quotient(&[(vec![0, 0], 1, 0, 1)]).unwrap();
        assert_eq!(q.cell(&[0, 0], 1).len(), 1);
    }
}
