//! Finite set-valued functors `A → Set`, natural transformations, subobjects,
//! components, complemented subobjects and the Boolean factorization.

use std::collections::HashMap;
use std::sync::Arc;

use crate::coend::{Family, UnionFind};
use crate::error::{Error, Result};
use crate::fincat::{same, FinCategory, Mor, Obj};
use crate::natenum;

/// A functor `A → Set` with finite values. Elements are indices `0..size(a)`;
/// labels are kept for display and serialization and are unique per object.
#[derive(Clone, Debug)]
pub struct Presheaf {
    base: Arc<FinCategory>,
    elems: Vec<Vec<String>>,
    action: Vec<Vec<usize>>,
    rep_tags: Option<Vec<Obj>>,
}

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        same(&self.base, &other.base) && self.elems == other.elems && self.action == other.action
    }
}

impl Family for Presheaf {
    fn size(&self, a: Obj) -> usize {
        self.elems[a].len()
    }

    fn act(&self, f: Mor, x: usize) -> usize {
        self.action[f][x]
    }
}

impl Presheaf {
    /// Checked constructor; `action[f]` maps `elems[src f]` into `elems[dst f]`.
    pub fn new(base: Arc<FinCategory>, elems: Vec<Vec<String>>, action: Vec<Vec<usize>>) -> Result<Presheaf> {
        if elems.len() != base.object_count() || action.len() != base.morphism_count() {
            return Err(Error::NotFunctorial("table sizes do not match the base".into()));
        }
        for row in &elems {
            let mut seen = std::collections::HashSet::new();
            for l in row {
                if !seen.insert(l) {
                    return Err(Error::DuplicateId(l.clone()));
                }
            }
        }
        let p = Presheaf {
            base,
            elems,
            action,
            rep_tags: None,
        };
        p.check()?;
        Ok(p)
    }

    pub(crate) fn from_parts(base: Arc<FinCategory>, elems: Vec<Vec<String>>, action: Vec<Vec<usize>>) -> Presheaf {
        let p = Presheaf {
            base,
            elems,
            action,
            rep_tags: None,
        };
        debug_assert!(p.check().is_ok(), "internal presheaf is not functorial");
        p
    }

    /// Builds the action tables from a closure.
    pub(crate) fn from_fn(
        base: Arc<FinCategory>,
        elems: Vec<Vec<String>>,
        act: impl Fn(Mor, usize) -> usize,
    ) -> Presheaf {
        let action = base
            .morphisms()
            .map(|f| (0..elems[base.src(f)].len()).map(|x| act(f, x)).collect())
            .collect();
        Presheaf::from_parts(base, elems, action)
    }

    /// Functor laws: ranges, identities, composition.
    pub fn check(&self) -> Result<()> {
        let c = &self.base;
        for f in c.morphisms() {
            let (a, b) = (c.src(f), c.dst(f));
            if self.action[f].len() != self.size(a) || self.action[f].iter().any(|&y| y >= self.size(b)) {
                return Err(Error::NotFunctorial(c.morphism_name(f).to_string()));
            }
        }
        for a in c.objects() {
            let id = c.identity(a);
            if self.action[id].iter().enumerate().any(|(x, &y)| x != y) {
                return Err(Error::NotFunctorial(c.morphism_name(id).to_string()));
            }
        }
        for f in c.morphisms() {
            for g in c.out_of(c.dst(f)) {
                let gf = c.comp(g, f);
                for x in 0..self.size(c.src(f)) {
                    if self.action[gf][x] != self.action[g][self.action[f][x]] {
                        return Err(Error::NotFunctorial(format!(
                            "{} after {}",
                            c.morphism_name(g),
                            c.morphism_name(f)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn empty(base: Arc<FinCategory>) -> Presheaf {
        let n = base.object_count();
        let action = base.morphisms().map(|_| Vec::new()).collect();
        Presheaf {
            base,
            elems: vec![Vec::new(); n],
            action,
            rep_tags: Some(Vec::new()),
        }
    }

    /// The terminal presheaf, a singleton `*` everywhere.
    pub fn terminal(base: Arc<FinCategory>) -> Presheaf {
        let n = base.object_count();
        let action = base.morphisms().map(|_| vec![0]).collect();
        Presheaf::from_parts(base, vec![vec!["*".to_string()]; n], action)
    }

    /// `A(a, −)`, elements labelled by morphism names.
    pub fn representable(base: &Arc<FinCategory>, a: Obj) -> Result<Presheaf> {
        if a >= base.object_count() {
            return Err(Error::UnknownObject(a.to_string()));
        }
        let elems = base
            .objects()
            .map(|b| base.hom(a, b).map(|h| base.morphism_name(h).to_string()).collect())
            .collect();
        let c = base.clone();
        let mut p = Presheaf::from_fn(base.clone(), elems, move |g, x| {
            let h = c.hom(a, c.src(g)).start + x;
            c.comp(g, h) - c.hom(a, c.dst(g)).start
        });
        p.rep_tags = Some(vec![a]);
        Ok(p)
    }

    /// `Σ_i A(a_i, −)`, tagged so that transformations out of it can be classified.
    pub fn sum_of_representables(base: &Arc<FinCategory>, objs: &[Obj]) -> Result<Presheaf> {
        let reps = objs
            .iter()
            .map(|&a| Presheaf::representable(base, a))
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<&Presheaf> = reps.iter().collect();
        if refs.is_empty() {
            return Ok(Presheaf::empty(base.clone()));
        }
        Presheaf::coproduct(&refs)
    }

    pub fn rep_tags(&self) -> Option<&[Obj]> {
        self.rep_tags.as_deref()
    }

    pub fn size(&self, a: Obj) -> usize {
        self.elems[a].len()
    }

    pub fn total_size(&self) -> usize {
        self.elems.iter().map(|e| e.len()).sum()
    }

    pub fn labels(&self, a: Obj) -> &[String] {
        &self.elems[a]
    }

    pub fn label(&self, a: Obj, x: usize) -> &str {
        &self.elems[a][x]
    }

    pub fn find_element(&self, a: Obj, label: &str) -> Result<usize> {
        self.elems[a]
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownElement(label.to_string()))
    }

    pub fn act(&self, f: Mor, x: usize) -> usize {
        self.action[f][x]
    }

    pub fn action(&self, f: Mor) -> &[usize] {
        &self.action[f]
    }

    /// Offsets for a flat numbering of all elements, object-major.
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.elems.len() + 1);
        let mut t = 0;
        for e in &self.elems {
            out.push(t);
            t += e.len();
        }
        out.push(t);
        out
    }

    /// Disjoint union; elements of summand `k` are labelled `k:label`.
    pub fn coproduct(parts: &[&Presheaf]) -> Result<Presheaf> {
        let base = parts.first().map(|p| p.base.clone()).ok_or(Error::BaseMismatch)?;
        if parts.iter().any(|p| !same(&p.base, &base)) {
            return Err(Error::BaseMismatch);
        }
        let n = base.object_count();
        let mut elems = vec![Vec::new(); n];
        let mut offsets = vec![vec![0; n]; parts.len()];
        for (k, p) in parts.iter().enumerate() {
            for a in 0..n {
                offsets[k][a] = elems[a].len();
                elems[a].extend(p.elems[a].iter().map(|l| format!("{}:{}", k, l)));
            }
        }
        let mut action = Vec::with_capacity(base.morphism_count());
        for f in base.morphisms() {
            let (a, b) = (base.src(f), base.dst(f));
            let mut row = Vec::with_capacity(elems[a].len());
            for (k, p) in parts.iter().enumerate() {
                row.extend(p.action[f].iter().map(|&y| y + offsets[k][b]));
            }
            action.push(row);
        }
        let tags = parts
            .iter()
            .map(|p| p.rep_tags.clone())
            .collect::<Option<Vec<Vec<Obj>>>>()
            .map(|v| v.concat());
        Ok(Presheaf {
            base,
            elems,
            action,
            rep_tags: tags,
        })
    }

    pub fn sum(&self, other: &Presheaf) -> Result<Presheaf> {
        Presheaf::coproduct(&[self, other])
    }

    /// Injection of summand `k` into `coproduct(parts)` (given as `target`).
    pub fn injection(parts: &[&Presheaf], k: usize, target: &Arc<Presheaf>) -> NatTrans {
        let n = target.base.object_count();
        let comps = (0..n)
            .map(|a| {
                let off: usize = parts[..k].iter().map(|p| p.size(a)).sum();
                (0..parts[k].size(a)).map(|x| x + off).collect()
            })
            .collect();
        NatTrans::from_parts(Arc::new(parts[k].clone()), target.clone(), comps)
    }

    /// Cartesian product, lexicographic element order, labels `(x,y,…)`.
    pub fn product(parts: &[&Presheaf]) -> Result<Presheaf> {
        let base = parts.first().map(|p| p.base.clone()).ok_or(Error::BaseMismatch)?;
        if parts.iter().any(|p| !same(&p.base, &base)) {
            return Err(Error::BaseMismatch);
        }
        let n = base.object_count();
        let elems: Vec<Vec<String>> = (0..n)
            .map(|a| {
                let ranges: Vec<_> = parts.iter().map(|p| 0..p.size(a)).collect();
                crate::fincat::cartesian(&ranges)
                    .into_iter()
                    .map(|t| {
                        let ls: Vec<&str> = t.iter().zip(parts).map(|(&x, p)| p.label(a, x)).collect();
                        format!("({})", ls.join(","))
                    })
                    .collect()
            })
            .collect();
        let b2 = base.clone();
        let p = Presheaf::from_fn(base, elems, |f, x| {
            let (a, b) = (b2.src(f), b2.dst(f));
            let coords = unflatten(x, parts.iter().map(|p| p.size(a)));
            let image: Vec<usize> = coords.iter().zip(parts).map(|(&c, p)| p.act(f, c)).collect();
            flatten(&image, parts.iter().map(|p| p.size(b)))
        });
        Ok(p)
    }

    pub fn times(&self, other: &Presheaf) -> Result<Presheaf> {
        Presheaf::product(&[self, other])
    }

    /// Components of the category of elements.
    pub fn pi0(&self) -> Components {
        let offsets = self.offsets();
        let mut uf = UnionFind::new(*offsets.last().unwrap());
        for f in self.base.morphisms() {
            let (a, b) = (self.base.src(f), self.base.dst(f));
            for x in 0..self.size(a) {
                uf.union(offsets[a] + x, offsets[b] + self.action[f][x]);
            }
        }
        let (labels, reps) = uf.classes();
        let of = (0..self.elems.len())
            .map(|a| (0..self.size(a)).map(|x| labels[offsets[a] + x]).collect())
            .collect();
        let members = {
            let mut m = vec![Vec::new(); reps.len()];
            for a in 0..self.elems.len() {
                for x in 0..self.size(a) {
                    m[labels[offsets[a] + x]].push((a, x));
                }
            }
            m
        };
        Components { of, members }
    }

    /// Quotient by the congruence generated by `pairs` of elements `(a, x, y)`.
    /// Returns the quotient and the projection components.
    pub fn quotient(&self, pairs: &[(Obj, usize, usize)]) -> (Presheaf, Vec<Vec<usize>>) {
        let offsets = self.offsets();
        let mut uf = UnionFind::new(*offsets.last().unwrap());
        let mut work: Vec<(Obj, usize, usize)> = pairs.to_vec();
        while let Some((a, x, y)) = work.pop() {
            if uf.union(offsets[a] + x, offsets[a] + y) {
                for f in self.base.out_of(a) {
                    if !self.base.is_identity(f) {
                        work.push((self.base.dst(f), self.action[f][x], self.action[f][y]));
                    }
                }
            }
        }
        let mut proj: Vec<Vec<usize>> = Vec::with_capacity(self.elems.len());
        let mut elems = Vec::with_capacity(self.elems.len());
        for a in 0..self.elems.len() {
            let mut root_index: HashMap<usize, usize> = HashMap::new();
            let mut labels = Vec::new();
            let mut row = Vec::with_capacity(self.size(a));
            for x in 0..self.size(a) {
                let r = uf.find(offsets[a] + x);
                let idx = *root_index.entry(r).or_insert_with(|| {
                    labels.push(self.elems[a][x].clone());
                    labels.len() - 1
                });
                row.push(idx);
            }
            proj.push(row);
            elems.push(labels);
        }
        let base = self.base.clone();
        let rep: Vec<Vec<usize>> = proj
            .iter()
            .map(|row| {
                let mut first = vec![usize::MAX; row.iter().copied().max().map_or(0, |m| m + 1)];
                for (x, &c) in row.iter().enumerate() {
                    if first[c] == usize::MAX {
                        first[c] = x;
                    }
                }
                first
            })
            .collect();
        let q = Presheaf::from_fn(base.clone(), elems, |f, c| {
            let x = rep[base.src(f)][c];
            proj[base.dst(f)][self.action[f][x]]
        });
        (q, proj)
    }
}

/// Mixed-radix coordinates of `x`, first coordinate most significant.
pub(crate) fn unflatten(mut x: usize, radices: impl DoubleEndedIterator<Item = usize> + ExactSizeIterator) -> Vec<usize> {
    let rs: Vec<usize> = radices.collect();
    let mut out = vec![0; rs.len()];
    for i in (0..rs.len()).rev() {
        out[i] = x % rs[i].max(1);
        x /= rs[i].max(1);
    }
    out
}

pub(crate) fn flatten(coords: &[usize], radices: impl Iterator<Item = usize>) -> usize {
    let mut x = 0;
    for (c, r) in coords.iter().zip(radices) {
        x = x * r + c;
    }
    x
}

/// Connected components of the category of elements, numbered by least element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    /// Component of each element, per object.
    pub of: Vec<Vec<usize>>,
    /// Elements `(object, index)` of each component.
    pub members: Vec<Vec<(Obj, usize)>>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.members.len()
    }
}

/// A natural transformation between presheaves on the same base.
#[derive(Clone, Debug)]
pub struct NatTrans {
    src: Arc<Presheaf>,
    dst: Arc<Presheaf>,
    comps: Vec<Vec<usize>>,
}

impl PartialEq for NatTrans {
    fn eq(&self, other: &Self) -> bool {
        *self.src == *other.src && *self.dst == *other.dst && self.comps == other.comps
    }
}

impl NatTrans {
    /// Checked constructor.
    pub fn new(src: Arc<Presheaf>, dst: Arc<Presheaf>, comps: Vec<Vec<usize>>) -> Result<NatTrans> {
        if !same(&src.base, &dst.base) {
            return Err(Error::BaseMismatch);
        }
        let t = NatTrans { src, dst, comps };
        t.check()?;
        Ok(t)
    }

    pub(crate) fn from_parts(src: Arc<Presheaf>, dst: Arc<Presheaf>, comps: Vec<Vec<usize>>) -> NatTrans {
        let t = NatTrans { src, dst, comps };
        debug_assert!(t.check().is_ok(), "internal transformation is not natural");
        t
    }

    pub fn check(&self) -> Result<()> {
        let c = &self.src.base;
        if self.comps.len() != c.object_count() {
            return Err(Error::NotNatural("component count".into()));
        }
        for a in c.objects() {
            if self.comps[a].len() != self.src.size(a) || self.comps[a].iter().any(|&y| y >= self.dst.size(a)) {
                return Err(Error::NotNatural(format!("component at {}", c.object_name(a))));
            }
        }
        for f in c.morphisms() {
            let (a, b) = (c.src(f), c.dst(f));
            for x in 0..self.src.size(a) {
                if self.comps[b][self.src.act(f, x)] != self.dst.act(f, self.comps[a][x]) {
                    return Err(Error::NotNatural(c.morphism_name(f).to_string()));
                }
            }
        }
        Ok(())
    }

    pub fn identity(p: &Arc<Presheaf>) -> NatTrans {
        let comps = p.elems.iter().map(|e| (0..e.len()).collect()).collect();
        NatTrans {
            src: p.clone(),
            dst: p.clone(),
            comps,
        }
    }

    pub fn src(&self) -> &Arc<Presheaf> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<Presheaf> {
        &self.dst
    }

    pub fn apply(&self, a: Obj, x: usize) -> usize {
        self.comps[a][x]
    }

    pub fn component(&self, a: Obj) -> &[usize] {
        &self.comps[a]
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.comps
    }

    /// `self ∘ t`.
    pub fn after(&self, t: &NatTrans) -> Result<NatTrans> {
        if *t.dst != *self.src {
            return Err(Error::EndpointMismatch);
        }
        let comps = t
            .comps
            .iter()
            .enumerate()
            .map(|(a, row)| row.iter().map(|&y| self.comps[a][y]).collect())
            .collect();
        Ok(NatTrans {
            src: t.src.clone(),
            dst: self.dst.clone(),
            comps,
        })
    }

    pub fn is_mono(&self) -> bool {
        self.comps.iter().enumerate().all(|(a, row)| {
            let mut hit = vec![false; self.dst.size(a)];
            row.iter().all(|&y| !std::mem::replace(&mut hit[y], true))
        })
    }

    pub fn is_epi(&self) -> bool {
        self.comps.iter().enumerate().all(|(a, row)| {
            let mut hit = vec![false; self.dst.size(a)];
            for &y in row {
                hit[y] = true;
            }
            hit.iter().all(|&h| h)
        })
    }

    pub fn is_iso(&self) -> bool {
        self.is_mono() && self.is_epi()
    }

    pub fn image(&self) -> Subobject {
        let member = self
            .comps
            .iter()
            .enumerate()
            .map(|(a, row)| {
                let mut m = vec![false; self.dst.size(a)];
                for &y in row {
                    m[y] = true;
                }
                m
            })
            .collect();
        Subobject {
            parent: self.dst.clone(),
            member,
        }
    }

    /// Componentwise sum `Σ t_k : Σ src_k → Σ dst_k` between given coproducts.
    pub(crate) fn coproduct_between(src: Arc<Presheaf>, dst: Arc<Presheaf>, parts: &[&NatTrans]) -> NatTrans {
        let n = src.base.object_count();
        let comps = (0..n)
            .map(|a| {
                let mut row = Vec::with_capacity(src.size(a));
                let mut off = 0;
                for t in parts {
                    row.extend(t.comps[a].iter().map(|&y| y + off));
                    off += t.dst.size(a);
                }
                row
            })
            .collect();
        NatTrans::from_parts(src, dst, comps)
    }

    /// Componentwise sum, building both coproducts.
    pub fn coproduct(parts: &[&NatTrans]) -> Result<NatTrans> {
        let srcs: Vec<&Presheaf> = parts.iter().map(|t| &*t.src).collect();
        let dsts: Vec<&Presheaf> = parts.iter().map(|t| &*t.dst).collect();
        let src = Arc::new(Presheaf::coproduct(&srcs)?);
        let dst = Arc::new(Presheaf::coproduct(&dsts)?);
        Ok(NatTrans::coproduct_between(src, dst, parts))
    }

    /// Componentwise product between given products.
    pub(crate) fn product_between(src: Arc<Presheaf>, dst: Arc<Presheaf>, parts: &[&NatTrans]) -> NatTrans {
        let n = src.base.object_count();
        let comps = (0..n)
            .map(|a| {
                (0..src.size(a))
                    .map(|x| {
                        let coords = unflatten(x, parts.iter().map(|t| t.src.size(a)));
                        let img: Vec<usize> = coords.iter().zip(parts).map(|(&c, t)| t.comps[a][c]).collect();
                        flatten(&img, parts.iter().map(|t| t.dst.size(a)))
                    })
                    .collect()
            })
            .collect();
        NatTrans::from_parts(src, dst, comps)
    }

    pub fn product(parts: &[&NatTrans]) -> Result<NatTrans> {
        let srcs: Vec<&Presheaf> = parts.iter().map(|t| &*t.src).collect();
        let dsts: Vec<&Presheaf> = parts.iter().map(|t| &*t.dst).collect();
        let src = Arc::new(Presheaf::product(&srcs)?);
        let dst = Arc::new(Presheaf::product(&dsts)?);
        Ok(NatTrans::product_between(src, dst, parts))
    }

    /// The Yoneda transform `x̄: A(a, −) → Φ` of `x ∈ Φ(a)`.
    pub fn yoneda(phi: &Arc<Presheaf>, a: Obj, x: usize) -> Result<NatTrans> {
        let rep = Arc::new(Presheaf::representable(&phi.base, a)?);
        NatTrans::from_elements(rep, phi, &[x])
    }

    /// The transformation `Σ_i A(a_i, −) → Φ` picking `xs[i] ∈ Φ(a_i)`.
    pub fn from_elements(src: Arc<Presheaf>, phi: &Arc<Presheaf>, xs: &[usize]) -> Result<NatTrans> {
        let tags = src.rep_tags.clone().ok_or(Error::NotSumOfReps)?;
        if tags.len() != xs.len() {
            return Err(Error::NotSumOfReps);
        }
        let c = &phi.base;
        let comps = c
            .objects()
            .map(|b| {
                let mut row = Vec::new();
                for (i, &a) in tags.iter().enumerate() {
                    for h in c.hom(a, b) {
                        row.push(phi.act(h, xs[i]));
                    }
                }
                row
            })
            .collect();
        Ok(NatTrans::from_parts(src, phi.clone(), comps))
    }

    /// `A(f, −): A(a', −) → A(a, −)` for `f: a → a'`, given both representables.
    pub fn rep_map_between(base: &FinCategory, f: Mor, src: Arc<Presheaf>, dst: Arc<Presheaf>) -> NatTrans {
        let (a, a2) = (base.src(f), base.dst(f));
        let comps = base
            .objects()
            .map(|b| {
                base.hom(a2, b)
                    .map(|h| base.comp(h, f) - base.hom(a, b).start)
                    .collect()
            })
            .collect();
        NatTrans::from_parts(src, dst, comps)
    }

    pub fn rep_map(base: &Arc<FinCategory>, f: Mor) -> NatTrans {
        let src = Arc::new(Presheaf::representable(base, base.dst(f)).expect("object exists"));
        let dst = Arc::new(Presheaf::representable(base, base.src(f)).expect("object exists"));
        NatTrans::rep_map_between(base, f, src, dst)
    }
}

/// A subobject of a presheaf, stored as a membership table.
#[derive(Clone, Debug, PartialEq)]
pub struct Subobject {
    parent: Arc<Presheaf>,
    member: Vec<Vec<bool>>,
}

impl Subobject {
    pub fn new(parent: Arc<Presheaf>, member: Vec<Vec<bool>>) -> Result<Subobject> {
        if member.len() != parent.elems.len()
            || member.iter().zip(&parent.elems).any(|(m, e)| m.len() != e.len())
        {
            return Err(Error::NotClosed("table size".into()));
        }
        let s = Subobject { parent, member };
        let c = &s.parent.base;
        for f in c.morphisms() {
            let (a, b) = (c.src(f), c.dst(f));
            for x in 0..s.parent.size(a) {
                if s.member[a][x] && !s.member[b][s.parent.act(f, x)] {
                    return Err(Error::NotClosed(c.morphism_name(f).to_string()));
                }
            }
        }
        Ok(s)
    }

    pub(crate) fn from_parts(parent: Arc<Presheaf>, member: Vec<Vec<bool>>) -> Subobject {
        Subobject { parent, member }
    }

    pub fn from_elements(parent: Arc<Presheaf>, subset: &[Vec<usize>]) -> Result<Subobject> {
        let mut member: Vec<Vec<bool>> = parent.elems.iter().map(|e| vec![false; e.len()]).collect();
        for (a, xs) in subset.iter().enumerate() {
            for &x in xs {
                *member
                    .get_mut(a)
                    .and_then(|m| m.get_mut(x))
                    .ok_or_else(|| Error::UnknownElement(x.to_string()))? = true;
            }
        }
        Subobject::new(parent, member)
    }

    pub fn full(parent: Arc<Presheaf>) -> Subobject {
        let member = parent.elems.iter().map(|e| vec![true; e.len()]).collect();
        Subobject { parent, member }
    }

    pub fn empty(parent: Arc<Presheaf>) -> Subobject {
        let member = parent.elems.iter().map(|e| vec![false; e.len()]).collect();
        Subobject { parent, member }
    }

    pub fn parent(&self) -> &Arc<Presheaf> {
        &self.parent
    }

    pub fn contains(&self, a: Obj, x: usize) -> bool {
        self.member[a][x]
    }

    pub fn membership(&self) -> &[Vec<bool>] {
        &self.member
    }

    pub fn members(&self, a: Obj) -> Vec<usize> {
        (0..self.member[a].len()).filter(|&x| self.member[a][x]).collect()
    }

    pub fn size(&self, a: Obj) -> usize {
        self.member[a].iter().filter(|&&m| m).count()
    }

    pub fn total_size(&self) -> usize {
        self.member.iter().flatten().filter(|&&m| m).count()
    }

    /// A morphism `f` and element `x ∉ Ψ` with `Φf(x) ∈ Ψ`, if any.
    pub fn complemented_witness(&self) -> Option<(Mor, Obj, usize)> {
        let c = &self.parent.base;
        for f in c.morphisms() {
            let (a, b) = (c.src(f), c.dst(f));
            for x in 0..self.parent.size(a) {
                if self.member[a][x] != self.member[b][self.parent.act(f, x)] {
                    return Some((f, a, x));
                }
            }
        }
        None
    }

    pub fn is_complemented(&self) -> bool {
        self.complemented_witness().is_none()
    }

    /// `¬Ψ(a) = {x | ∀f: a → a', Φf(x) ∉ Ψ(a')}`.
    pub fn negate(&self) -> Subobject {
        let c = &self.parent.base;
        let member = c
            .objects()
            .map(|a| {
                (0..self.parent.size(a))
                    .map(|x| c.out_of(a).all(|f| !self.member[c.dst(f)][self.parent.act(f, x)]))
                    .collect()
            })
            .collect();
        Subobject {
            parent: self.parent.clone(),
            member,
        }
    }

    pub fn complement(&self) -> Result<Subobject> {
        if let Some((f, a, x)) = self.complemented_witness() {
            return Err(Error::NotComplemented {
                morphism: self.parent.base.morphism_name(f).to_string(),
                element: self.parent.label(a, x).to_string(),
            });
        }
        Ok(Subobject {
            parent: self.parent.clone(),
            member: self.member.iter().map(|r| r.iter().map(|m| !m).collect()).collect(),
        })
    }

    pub fn meet(&self, other: &Subobject) -> Subobject {
        self.zip(other, |a, b| a && b)
    }

    pub fn join(&self, other: &Subobject) -> Subobject {
        self.zip(other, |a, b| a || b)
    }

    fn zip(&self, other: &Subobject, op: impl Fn(bool, bool) -> bool) -> Subobject {
        let member = self
            .member
            .iter()
            .zip(&other.member)
            .map(|(r, s)| r.iter().zip(s).map(|(&a, &b)| op(a, b)).collect())
            .collect();
        Subobject {
            parent: self.parent.clone(),
            member,
        }
    }

    pub fn is_subset_of(&self, other: &Subobject) -> bool {
        self.member
            .iter()
            .zip(&other.member)
            .all(|(r, s)| r.iter().zip(s).all(|(&a, &b)| !a || b))
    }

    /// Inverse image along `t: Θ → Φ`.
    pub fn pullback(&self, t: &NatTrans) -> Subobject {
        let member = t
            .comps
            .iter()
            .enumerate()
            .map(|(a, row)| row.iter().map(|&y| self.member[a][y]).collect())
            .collect();
        Subobject {
            parent: t.src.clone(),
            member,
        }
    }

    /// The subpresheaf as a presheaf in its own right, elements in parent
    /// order, with the inclusion transformation.
    pub fn to_presheaf(&self) -> (Arc<Presheaf>, NatTrans) {
        let c = self.parent.base.clone();
        let members: Vec<Vec<usize>> = c.objects().map(|a| self.members(a)).collect();
        let mut position: Vec<Vec<usize>> = self.member.iter().map(|r| vec![usize::MAX; r.len()]).collect();
        for (a, ms) in members.iter().enumerate() {
            for (i, &x) in ms.iter().enumerate() {
                position[a][x] = i;
            }
        }
        let elems = members
            .iter()
            .enumerate()
            .map(|(a, ms)| ms.iter().map(|&x| self.parent.elems[a][x].clone()).collect())
            .collect();
        let p = Arc::new(Presheaf::from_fn(c.clone(), elems, |f, i| {
            let x = members[c.src(f)][i];
            position[c.dst(f)][self.parent.act(f, x)]
        }));
        let incl = NatTrans::from_parts(p.clone(), self.parent.clone(), members);
        (p, incl)
    }
}

/// True when every component of `t.dst` contains an image element.
pub fn is_pi0_surjective(t: &NatTrans) -> bool {
    let comps = t.dst.pi0();
    let mut hit = vec![false; comps.count()];
    for (a, row) in t.comps.iter().enumerate() {
        for &y in row {
            hit[comps.of[a][y]] = true;
        }
    }
    hit.iter().all(|&h| h)
}

/// The Boolean factorization `t = m ∘ e` with `e` π0-surjective and `m` a
/// complemented mono; the middle object is the union of components of the
/// codomain that meet the image.
#[derive(Clone, Debug)]
pub struct BooleanFactorization {
    pub middle: Subobject,
    pub e: NatTrans,
    pub m: NatTrans,
}

pub fn boolean_factorize(t: &NatTrans) -> BooleanFactorization {
    let comps = t.dst.pi0();
    let mut hit = vec![false; comps.count()];
    for (a, row) in t.comps.iter().enumerate() {
        for &y in row {
            hit[comps.of[a][y]] = true;
        }
    }
    let member = comps
        .of
        .iter()
        .map(|row| row.iter().map(|&c| hit[c]).collect())
        .collect();
    let middle = Subobject::from_parts(t.dst.clone(), member);
    let (mid, m) = middle.to_presheaf();
    let e_comps = t
        .comps
        .iter()
        .enumerate()
        .map(|(a, row)| {
            row.iter()
                .map(|&y| m.comps[a].iter().position(|&z| z == y).expect("image lies in the middle"))
                .collect()
        })
        .collect();
    let e = NatTrans::from_parts(t.src.clone(), mid, e_comps);
    BooleanFactorization { middle, e, m }
}

/// Decomposition of a transformation between sums of representables as
/// `Σ_α A(f_j, −)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepSumMap {
    /// Summand of the codomain receiving summand `j` of the domain.
    pub alpha: Vec<usize>,
    /// `f_j: A_{α(j)} → C_j`.
    pub components: Vec<Mor>,
    pub complemented_mono: bool,
    pub pi0_surjective: bool,
}

pub fn classify_sum_of_reps(t: &NatTrans) -> Result<RepSumMap> {
    let src_tags = t.src.rep_tags.as_ref().ok_or(Error::NotSumOfReps)?;
    let dst_tags = t.dst.rep_tags.as_ref().ok_or(Error::NotSumOfReps)?;
    let c = &t.src.base;
    let mut alpha = Vec::with_capacity(src_tags.len());
    let mut components = Vec::with_capacity(src_tags.len());
    for (j, &cj) in src_tags.iter().enumerate() {
        // position of ι_j(1_{C_j}) in the domain at C_j
        let before: usize = src_tags[..j].iter().map(|&a| c.hom(a, cj).len()).sum();
        let x = before + (c.identity(cj) - c.hom(cj, cj).start);
        let mut y = t.comps[cj][x];
        let mut i = 0;
        loop {
            let len = c.hom(dst_tags[i], cj).len();
            if y < len {
                break;
            }
            y -= len;
            i += 1;
        }
        alpha.push(i);
        components.push(c.hom(dst_tags[i], cj).start + y);
    }
    let mut hit = vec![0usize; dst_tags.len()];
    for &i in &alpha {
        hit[i] += 1;
    }
    let injective = hit.iter().all(|&h| h <= 1);
    let onto = hit.iter().all(|&h| h >= 1);
    Ok(RepSumMap {
        complemented_mono: injective && components.iter().all(|&f| c.is_iso(f)),
        pi0_surjective: onto,
        alpha,
        components,
    })
}

/// Whether the square `right ∘ top = bottom ∘ left` commutes and `P` is the
/// fibred product of `X → Z ← Y`, objectwise.
pub fn is_pullback(top: &NatTrans, left: &NatTrans, right: &NatTrans, bottom: &NatTrans) -> bool {
    let c = top.src.base.clone();
    for a in c.objects() {
        let n = top.src.size(a);
        for p in 0..n {
            if right.comps[a][top.comps[a][p]] != bottom.comps[a][left.comps[a][p]] {
                return false;
            }
        }
        let mut seen = HashMap::new();
        for p in 0..n {
            if seen.insert((top.comps[a][p], left.comps[a][p]), p).is_some() {
                return false;
            }
        }
        let mut fibre = 0;
        for x in 0..right.src.size(a) {
            for y in 0..bottom.src.size(a) {
                if right.comps[a][x] == bottom.comps[a][y] {
                    fibre += 1;
                }
            }
        }
        if fibre != n {
            return false;
        }
    }
    true
}

/// All natural transformations `src → dst`, guarded by `bound` raw candidates.
pub fn nat_transformations(src: &Arc<Presheaf>, dst: &Arc<Presheaf>, bound: u128) -> Result<Vec<NatTrans>> {
    if !same(&src.base, &dst.base) {
        return Err(Error::BaseMismatch);
    }
    let c = &src.base;
    let arrows: Vec<(Obj, Obj, Mor)> = c
        .morphisms()
        .filter(|&f| !c.is_identity(f))
        .map(|f| (c.src(f), c.dst(f), f))
        .collect();
    let all = natenum::enumerate(c.object_count(), &arrows, &**src, &**dst, bound)?;
    Ok(all
        .into_iter()
        .map(|comps| NatTrans::from_parts(src.clone(), dst.clone(), comps))
        .collect())
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn arr() -> Arc<FinCategory> {
        Arc::new(FinCategory::arrow())
    }

    /// Φ(0) = {x}, Φ(1) = {y, z}, Φ(e): x ↦ y.
    pub fn phi_arr(base: &Arc<FinCategory>) -> Arc<Presheaf> {
        let e = base.find_morphism("e").unwrap();
        let mut action = vec![vec![]; 3];
        for f in base.morphisms() {
            action[f] = if f == e {
                vec![0]
            } else if base.src(f) == 0 {
                vec![0]
            } else {
                vec![0, 1]
            };
        }
        Arc::new(
            Presheaf::new(
                base.clone(),
                vec![vec!["x".into()], vec!["y".into(), "z".into()]],
                action,
            )
            .unwrap(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn representables_of_arrow() {
        let a = arr();
        let r0 = Presheaf::representable(&a, 0).unwrap();
        assert_eq!(r0.labels(0), ["id0"]);
        assert_eq!(r0.labels(1), ["e"]);
        let r1 = Presheaf::representable(&a, 1).unwrap();
        assert_eq!(r1.size(0), 0);
        assert_eq!(r1.labels(1), ["id1"]);
        assert!(Presheaf::representable(&a, 5).is_err());
    }

    #[test]
    fn discrete_representable_is_indicator() {
        let d = Arc::new(FinCategory::discrete(&["a0", "a1"]));
        let r = Presheaf::representable(&d, 0).unwrap();
        assert_eq!((r.size(0), r.size(1)), (1, 0));
    }

    #[test]
    fn sums_and_products() {
        let a = arr();
        let phi = phi_arr(&a);
        let r0 = Presheaf::representable(&a, 0).unwrap();
        let s = phi.sum(&r0).unwrap();
        assert_eq!(s.size(1), 3);
        let zero = Presheaf::empty(a.clone());
        assert_eq!(phi.sum(&zero).unwrap().size(1), 2);
        let p = phi.times(&phi).unwrap();
        assert_eq!(p.size(1), 4);
        p.check().unwrap();
        let one = Presheaf::terminal(a.clone());
        assert_eq!(phi.times(&one).unwrap().size(1), 2);
        assert_eq!(phi.times(&zero).unwrap().total_size(), 0);
        let sum = Arc::new(s);
        let parts = [&*phi, &r0];
        for k in 0..2 {
            let inj = Presheaf::injection(&parts, k, &sum);
            inj.check().unwrap();
            assert!(inj.image().is_complemented());
        }
    }

    #[test]
    fn components_of_phi_arr() {
        let a = arr();
        let phi = phi_arr(&a);
        let c = phi.pi0();
        assert_eq!(c.members, vec![vec![(0, 0), (1, 0)], vec![(1, 1)]]);
        assert_eq!(Presheaf::representable(&a, 0).unwrap().pi0().count(), 1);
        assert_eq!(Presheaf::empty(a).pi0().count(), 0);
    }

    #[test]
    fn complemented_criteria() {
        let a = arr();
        let phi = phi_arr(&a);
        let xy = Subobject::from_elements(phi.clone(), &[vec![0], vec![0]]).unwrap();
        assert!(xy.is_complemented());
        let y = Subobject::from_elements(phi.clone(), &[vec![], vec![0]]).unwrap();
        assert!(!y.is_complemented());
        assert!(Subobject::full(phi.clone()).is_complemented());
        assert_eq!(y.negate().members(1), vec![1]);
        assert_eq!(y.negate().members(0), Vec::<usize>::new());
        let nn = y.negate().negate();
        assert_eq!((nn.members(0), nn.members(1)), (vec![0], vec![0]));
        assert_eq!(Subobject::full(phi.clone()).negate().total_size(), 0);
        assert_eq!(xy.complement().unwrap().members(1), vec![1]);
        assert_eq!(Subobject::full(phi.clone()).complement().unwrap().total_size(), 0);
        assert_eq!(
            y.complement(),
            Err(Error::NotComplemented {
                morphism: "e".into(),
                element: "x".into()
            })
        );
    }

    #[test]
    fn pi0_surjectivity_and_factorization() {
        let a = arr();
        let phi = phi_arr(&a);
        let r1 = Arc::new(Presheaf::representable(&a, 1).unwrap());
        let t = NatTrans::from_elements(r1, &phi, &[0]).unwrap();
        assert!(!is_pi0_surjective(&t));
        assert!(is_pi0_surjective(&NatTrans::identity(&phi)));
        let f = boolean_factorize(&t);
        assert_eq!((f.middle.members(0), f.middle.members(1)), (vec![0], vec![0]));
        assert_eq!(f.m.after(&f.e).unwrap(), t);
        assert!(is_pi0_surjective(&f.e));
        let id = boolean_factorize(&NatTrans::identity(&phi));
        assert_eq!(id.middle, Subobject::full(phi.clone()));
        let zero = Arc::new(Presheaf::empty(a.clone()));
        let z = NatTrans::new(zero, phi.clone(), vec![vec![], vec![]]).unwrap();
        assert_eq!(boolean_factorize(&z).middle.total_size(), 0);
        let r0 = Arc::new(Presheaf::representable(&a, 0).unwrap());
        let inj = Presheaf::injection(&[&*phi, &*r0], 0, &Arc::new(phi.sum(&r0).unwrap()));
        assert!(!is_pi0_surjective(&inj));
    }

    #[test]
    fn sums_of_representables_classified() {
        let a = arr();
        let two = Arc::new(Presheaf::sum_of_representables(&a, &[0, 0]).unwrap());
        let one = Arc::new(Presheaf::sum_of_representables(&a, &[0]).unwrap());
        let codiag = NatTrans::from_elements(two, &one, &[0, 0]).unwrap();
        let c = classify_sum_of_reps(&codiag).unwrap();
        assert_eq!(c.alpha, vec![0, 0]);
        assert!(c.pi0_surjective && !c.complemented_mono);

        let e = a.find_morphism("e").unwrap();
        let t = NatTrans::rep_map(&a, e);
        let c = classify_sum_of_reps(&t).unwrap();
        assert_eq!((c.alpha.clone(), c.components.clone()), (vec![0], vec![e]));
        assert!(!c.complemented_mono);

        let id = NatTrans::identity(&one);
        let c = classify_sum_of_reps(&id).unwrap();
        assert!(c.complemented_mono && c.pi0_surjective);

        let phi = phi_arr(&a);
        assert_eq!(
            classify_sum_of_reps(&NatTrans::identity(&phi)),
            Err(Error::NotSumOfReps)
        );
    }

    #[test]
    fn quotient_closes_under_action() {
        let a = arr();
        let r0 = Presheaf::representable(&a, 0).unwrap();
        let two = r0.sum(&r0).unwrap();
        let (q, proj) = two.quotient(&[(0, 0, 1)]);
        assert_eq!((q.size(0), q.size(1)), (1, 1));
        assert_eq!(proj[1], vec![0, 0]);
        q.check().unwrap();
    }

    #[test]
    fn enumeration_matches_yoneda() {
        let a = arr();
        let phi = phi_arr(&a);
        for o in a.objects() {
            let r = Arc::new(Presheaf::representable(&a, o).unwrap());
            assert_eq!(nat_transformations(&r, &phi, natenum::DEFAULT_BOUND).unwrap().len(), phi.size(o));
        }
    }

    #[test]
    fn pullback_of_complemented_injection() {
        let a = arr();
        let phi = phi_arr(&a);
        let xy = Subobject::from_elements(phi.clone(), &[vec![0], vec![0]]).unwrap();
        let (p, incl) = xy.to_presheaf();
        let id_p = NatTrans::identity(&p);
        assert!(is_pullback(&id_p, &id_p, &incl, &incl));
        let ff = NatTrans::identity(&phi);
        assert!(!is_pullback(&incl, &incl, &ff, &ff) || p.total_size() == phi.total_size());
    }
}
