//! Finite categories given by explicit composition tables, together with the
//! opposite and product constructions and the sequence categories `!A`
//! (permutations) and `↓A` (surjections) truncated at a maximum length.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Obj = usize;
pub type Mor = usize;

/// Which sequence category a generated category is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeqMode {
    /// `!A`: morphisms indexed by bijections.
    Strict,
    /// `↓A`: morphisms indexed by surjections.
    Soft,
}

impl SeqMode {
    pub fn tag(self) -> &'static str {
        match self {
            SeqMode::Strict => "bang",
            SeqMode::Soft => "down",
        }
    }
}

/// A morphism `⟨A_1..A_n⟩ → ⟨C_1..C_m⟩` of a sequence category: `sigma[j]` is the
/// source index feeding target slot `j`, and `components[j]: A_{sigma[j]} → C_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeqMorphism {
    pub sigma: Vec<usize>,
    pub components: Vec<Mor>,
}

#[derive(Debug)]
pub struct SeqInfo {
    pub mode: SeqMode,
    pub base: Arc<FinCategory>,
    pub max_arity: usize,
    objects: Vec<Vec<Obj>>,
    morphisms: Vec<SeqMorphism>,
    object_index: HashMap<Vec<Obj>, Obj>,
    morphism_index: HashMap<(Obj, SeqMorphism), Mor>,
}

impl SeqInfo {
    pub fn entries(&self, x: Obj) -> &[Obj] {
        &self.objects[x]
    }

    pub fn morphism(&self, f: Mor) -> &SeqMorphism {
        &self.morphisms[f]
    }

    pub fn object_of(&self, entries: &[Obj]) -> Option<Obj> {
        self.object_index.get(entries).copied()
    }

    pub fn find(&self, src: Obj, m: &SeqMorphism) -> Option<Mor> {
        self.morphism_index.get(&(src, m.clone())).copied()
    }
}

#[derive(Debug)]
pub struct ProductInfo {
    pub left: Arc<FinCategory>,
    pub right: Arc<FinCategory>,
    pairs: Vec<(Mor, Mor)>,
    index: Vec<Mor>,
}

#[derive(Debug)]
pub struct OppositeInfo {
    pub original: Arc<FinCategory>,
    from_original: Vec<Mor>,
    to_original: Vec<Mor>,
}

#[derive(Debug)]
enum Origin {
    Plain,
    Seq(SeqInfo),
    Product(ProductInfo),
    Opposite(OppositeInfo),
}

/// A finite category. Morphisms are stored sorted by `(src, dst, declaration)`,
/// so every hom-set is a contiguous index range.
pub struct FinCategory {
    objects: Vec<String>,
    object_index: HashMap<String, Obj>,
    morphisms: Vec<String>,
    morphism_index: HashMap<String, Mor>,
    src: Vec<Obj>,
    dst: Vec<Obj>,
    identities: Vec<Mor>,
    hom: Vec<Range<usize>>,
    out_ranges: Vec<Range<usize>>,
    incoming: Vec<Vec<Mor>>,
    incoming_pos: Vec<usize>,
    table: Vec<Vec<Mor>>,
    origin: Origin,
}

impl fmt::Debug for FinCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinCategory")
            .field("objects", &self.objects)
            .field("morphisms", &self.morphisms.len())
            .finish()
    }
}

impl PartialEq for FinCategory {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.morphisms == other.morphisms
            && self.src == other.src
            && self.dst == other.dst
            && self.identities == other.identities
            && self.table == other.table
    }
}

impl Eq for FinCategory {}

/// True when two shared categories are the same category (pointer or structure).
pub fn same(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Raw description accepted by [`validate_category`], mirroring the JSON form.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct CategoryDesc {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismDesc>,
    #[serde(default)]
    pub compose: Vec<[String; 3]>,
    #[serde(default)]
    pub identities: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MorphismDesc {
    pub id: String,
    pub src: String,
    pub dst: String,
}

/// Checks a raw table and builds the category. Composites with an identity may
/// be omitted; every other composable pair must be listed.
pub fn validate_category(desc: &CategoryDesc) -> Result<FinCategory> {
    let mut object_index = HashMap::new();
    for (i, o) in desc.objects.iter().enumerate() {
        if object_index.insert(o.clone(), i).is_some() {
            return Err(Error::DuplicateId(o.clone()));
        }
    }
    let mut decl = Vec::with_capacity(desc.morphisms.len());
    let mut seen = HashMap::new();
    for (i, m) in desc.morphisms.iter().enumerate() {
        if seen.insert(m.id.clone(), i).is_some() {
            return Err(Error::DuplicateId(m.id.clone()));
        }
        let s = *object_index
            .get(&m.src)
            .ok_or_else(|| Error::DanglingEndpoint(m.id.clone()))?;
        let d = *object_index
            .get(&m.dst)
            .ok_or_else(|| Error::DanglingEndpoint(m.id.clone()))?;
        decl.push((s, d, i));
    }
    decl.sort();
    let mut position = vec![0; decl.len()];
    for (k, &(_, _, i)) in decl.iter().enumerate() {
        position[i] = k;
    }
    let lookup = |name: &str| -> Result<Mor> {
        seen.get(name)
            .map(|&i| position[i])
            .ok_or_else(|| Error::UnknownMorphism(name.to_string()))
    };
    let n = desc.objects.len();
    let mut identities = vec![usize::MAX; n];
    for (o, m) in &desc.identities {
        let oi = *object_index
            .get(o)
            .ok_or_else(|| Error::UnknownObject(o.clone()))?;
        let mi = lookup(m)?;
        let (s, d, _) = decl[mi];
        if s != oi || d != oi {
            return Err(Error::BadIdentity(o.clone()));
        }
        identities[oi] = mi;
    }
    if let Some(o) = identities.iter().position(|&m| m == usize::MAX) {
        return Err(Error::BadIdentity(desc.objects[o].clone()));
    }
    let name_of = |m: Mor| desc.morphisms[decl[m].2].id.clone();
    let is_identity = |m: Mor| identities[decl[m].0] == m;

    let mut table: HashMap<(Mor, Mor), Mor> = HashMap::new();
    for [g, f, gf] in &desc.compose {
        let (g, f, gf) = (lookup(g)?, lookup(f)?, lookup(gf)?);
        if is_identity(f) && gf != g && decl[g].0 == decl[f].1 {
            return Err(Error::BadIdentity(desc.objects[decl[f].0].clone()));
        }
        if is_identity(g) && gf != f && decl[g].0 == decl[f].1 {
            return Err(Error::BadIdentity(desc.objects[decl[g].0].clone()));
        }
        if decl[f].1 != decl[g].0 || decl[gf].0 != decl[f].0 || decl[gf].1 != decl[g].1 {
            return Err(Error::IllTypedComposite {
                g: name_of(g),
                f: name_of(f),
            });
        }
        table.insert((g, f), gf);
    }
    let m = decl.len();
    for f in 0..m {
        let (s, d, _) = decl[f];
        table.entry((f, identities[s])).or_insert(f);
        table.entry((identities[d], f)).or_insert(f);
    }
    for f in 0..m {
        for g in 0..m {
            if decl[f].1 == decl[g].0 && !table.contains_key(&(g, f)) {
                return Err(Error::MissingComposite {
                    g: name_of(g),
                    f: name_of(f),
                });
            }
        }
    }
    let morphisms: Vec<(String, Obj, Obj)> = (0..m).map(|k| (name_of(k), decl[k].0, decl[k].1)).collect();
    let cat = FinCategory::assemble(
        desc.objects.clone(),
        morphisms,
        identities,
        |g, f| table[&(g, f)],
        Origin::Plain,
    )?;
    cat.check_laws()?;
    Ok(cat)
}

impl FinCategory {
    /// Builds the index structures. `morphisms` must already be sorted by
    /// `(src, dst)`; `compose(g, f)` is only called on composable pairs.
    fn assemble(
        objects: Vec<String>,
        morphisms: Vec<(String, Obj, Obj)>,
        identities: Vec<Mor>,
        compose: impl Fn(Mor, Mor) -> Mor,
        origin: Origin,
    ) -> Result<FinCategory> {
        let n = objects.len();
        let mut object_index = HashMap::with_capacity(n);
        for (i, o) in objects.iter().enumerate() {
            if object_index.insert(o.clone(), i).is_some() {
                return Err(Error::DuplicateId(o.clone()));
            }
        }
        let mut morphism_index = HashMap::with_capacity(morphisms.len());
        let mut names = Vec::with_capacity(morphisms.len());
        let mut src = Vec::with_capacity(morphisms.len());
        let mut dst = Vec::with_capacity(morphisms.len());
        for (i, (name, s, d)) in morphisms.into_iter().enumerate() {
            if morphism_index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateId(name));
            }
            names.push(name);
            src.push(s);
            dst.push(d);
        }
        let m = names.len();
        let mut hom = vec![0..0; n * n];
        let mut k = 0;
        while k < m {
            let (s, d) = (src[k], dst[k]);
            let start = k;
            while k < m && src[k] == s && dst[k] == d {
                k += 1;
            }
            hom[s * n + d] = start..k;
        }
        let mut out_ranges = vec![0..0; n];
        for f in (0..m).rev() {
            let r = &mut out_ranges[src[f]];
            if r.start == r.end {
                *r = f..f + 1;
            } else {
                r.start = f;
            }
        }
        let mut incoming = vec![Vec::new(); n];
        let mut incoming_pos = vec![0; m];
        for f in 0..m {
            incoming_pos[f] = incoming[dst[f]].len();
            incoming[dst[f]].push(f);
        }
        let table = (0..m)
            .map(|g| incoming[src[g]].iter().map(|&f| compose(g, f)).collect())
            .collect();
        Ok(FinCategory {
            objects,
            object_index,
            morphisms: names,
            morphism_index,
            src,
            dst,
            identities,
            hom,
            out_ranges,
            incoming,
            incoming_pos,
            table,
            origin,
        })
    }

    /// Builds a category from a composition closure, sorting morphisms by
    /// `(src, dst, declaration)` and checking the category laws.
    pub fn from_fn(
        objects: Vec<String>,
        morphisms: Vec<(String, Obj, Obj)>,
        identities: Vec<Mor>,
        compose: impl Fn(Mor, Mor) -> Mor,
    ) -> Result<FinCategory> {
        let mut order: Vec<usize> = (0..morphisms.len()).collect();
        order.sort_by_key(|&i| (morphisms[i].1, morphisms[i].2, i));
        let mut position = vec![0; order.len()];
        for (k, &i) in order.iter().enumerate() {
            position[i] = k;
        }
        let sorted = order.iter().map(|&i| morphisms[i].clone()).collect();
        let ids = identities.iter().map(|&i| position[i]).collect();
        let cat = FinCategory::assemble(
            objects,
            sorted,
            ids,
            |g, f| position[compose(order[g], order[f])],
            Origin::Plain,
        )?;
        cat.check_laws()?;
        Ok(cat)
    }

    /// The terminal category `1` with one object `•`.
    pub fn terminal() -> FinCategory {
        FinCategory::discrete(&["•"])
    }

    /// The walking arrow: objects `0, 1` and one non-identity `e: 0 → 1`.
    pub fn arrow() -> FinCategory {
        FinCategory::poset(&["0", "1"], &[(0, 1)], |a, b| {
            if a == b {
                format!("id{}", a)
            } else {
                "e".to_string()
            }
        })
    }

    pub fn discrete(names: &[&str]) -> FinCategory {
        FinCategory::poset(names, &[], |a, _| format!("id{}", names[a]))
    }

    /// The preorder generated by `relations` (reflexive-transitive closure).
    /// The closure must be antisymmetric for the result to be a poset, but any
    /// preorder is accepted. `name(a, b)` names the unique morphism `a → b`.
    pub fn poset(
        names: &[&str],
        relations: &[(usize, usize)],
        name: impl Fn(usize, usize) -> String,
    ) -> FinCategory {
        let n = names.len();
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in relations {
            le[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if le[i][k] && le[k][j] {
                        le[i][j] = true;
                    }
                }
            }
        }
        let mut morphisms = Vec::new();
        let mut index = vec![vec![usize::MAX; n]; n];
        for a in 0..n {
            for b in 0..n {
                if le[a][b] {
                    index[a][b] = morphisms.len();
                    morphisms.push((name(a, b), a, b));
                }
            }
        }
        let identities = (0..n).map(|a| index[a][a]).collect();
        let ends: Vec<(Obj, Obj)> = morphisms.iter().map(|m| (m.1, m.2)).collect();
        FinCategory::from_fn(
            names.iter().map(|s| s.to_string()).collect(),
            morphisms,
            identities,
            |g, f| index[ends[f].0][ends[g].1],
        )
        .expect("preorders are categories")
    }

    /// The chain `0 → 1 → … → n-1`.
    pub fn chain(n: usize) -> FinCategory {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let rel: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        FinCategory::poset(&refs, &rel, |a, b| {
            if a == b {
                format!("id{}", a)
            } else {
                format!("{}<{}", a, b)
            }
        })
    }

    /// One object with the cyclic group of order `n` as endomorphisms.
    pub fn cyclic_group(n: usize) -> FinCategory {
        let morphisms = (0..n).map(|k| (format!("r{}", k), 0, 0)).collect();
        FinCategory::from_fn(vec!["•".into()], morphisms, vec![0], |g, f| (g + f) % n)
            .expect("groups are categories")
    }

    /// One object whose endomorphisms are `{id, p}` with `p∘p = p`.
    pub fn idempotent() -> FinCategory {
        let morphisms = vec![("id".into(), 0, 0), ("p".into(), 0, 0)];
        FinCategory::from_fn(vec!["•".into()], morphisms, vec![0], |g, f| g.max(f))
            .expect("idempotent monoid is a category")
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> Range<Obj> {
        0..self.objects.len()
    }

    pub fn morphisms(&self) -> Range<Mor> {
        0..self.morphisms.len()
    }

    pub fn object_name(&self, a: Obj) -> &str {
        &self.objects[a]
    }

    pub fn morphism_name(&self, f: Mor) -> &str {
        &self.morphisms[f]
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn find_object(&self, name: &str) -> Result<Obj> {
        self.object_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    pub fn find_morphism(&self, name: &str) -> Result<Mor> {
        self.morphism_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownMorphism(name.to_string()))
    }

    pub fn src(&self, f: Mor) -> Obj {
        self.src[f]
    }

    pub fn dst(&self, f: Mor) -> Obj {
        self.dst[f]
    }

    pub fn identity(&self, a: Obj) -> Mor {
        self.identities[a]
    }

    pub fn is_identity(&self, f: Mor) -> bool {
        self.identities[self.src[f]] == f
    }

    /// The hom-set `a → b` as an index range.
    pub fn hom(&self, a: Obj, b: Obj) -> Range<Mor> {
        self.hom[a * self.objects.len() + b].clone()
    }

    /// All morphisms out of `a`, in index order.
    pub fn outgoing(&self, a: Obj) -> Range<Mor> {
        self.out_ranges[a].clone()
    }

    /// Morphisms into `a`, in index order.
    pub fn incoming(&self, a: Obj) -> &[Mor] {
        &self.incoming[a]
    }

    /// `g ∘ f`, or `None` when not composable.
    pub fn compose(&self, g: Mor, f: Mor) -> Option<Mor> {
        if self.dst[f] != self.src[g] {
            return None;
        }
        Some(self.table[g][self.incoming_pos[f]])
    }

    /// `g ∘ f` for a pair known to be composable.
    pub fn comp(&self, g: Mor, f: Mor) -> Mor {
        debug_assert_eq!(self.dst[f], self.src[g]);
        self.table[g][self.incoming_pos[f]]
    }

    pub fn inverse(&self, f: Mor) -> Option<Mor> {
        let (a, b) = (self.src[f], self.dst[f]);
        self.hom(b, a).find(|&g| {
            self.comp(g, f) == self.identities[a] && self.comp(f, g) == self.identities[b]
        })
    }

    pub fn is_iso(&self, f: Mor) -> bool {
        self.inverse(f).is_some()
    }

    pub fn is_groupoid(&self) -> bool {
        self.morphisms().all(|f| self.is_iso(f))
    }

    /// Exhaustive check of identity and associativity laws.
    pub fn check_laws(&self) -> Result<()> {
        for f in self.morphisms() {
            let (a, b) = (self.src[f], self.dst[f]);
            if self.comp(f, self.identities[a]) != f {
                return Err(Error::BadIdentity(self.objects[a].clone()));
            }
            if self.comp(self.identities[b], f) != f {
                return Err(Error::BadIdentity(self.objects[b].clone()));
            }
        }
        for f in self.morphisms() {
            let b = self.dst[f];
            for g in self.outgoing_list(b) {
                let gf = self.comp(g, f);
                for h in self.outgoing_list(self.dst[g]) {
                    if self.comp(h, gf) != self.comp(self.comp(h, g), f) {
                        return Err(Error::NonAssociative {
                            f: self.morphisms[f].clone(),
                            g: self.morphisms[g].clone(),
                            h: self.morphisms[h].clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn outgoing_list(&self, a: Obj) -> Range<Mor> {
        self.out_ranges[a].clone()
    }

    /// Morphisms out of `a`, as an iterator over all targets.
    pub fn out_of(&self, a: Obj) -> Range<Mor> {
        self.out_ranges[a].clone()
    }

    pub fn seq_info(&self) -> Option<&SeqInfo> {
        match &self.origin {
            Origin::Seq(s) => Some(s),
            _ => None,
        }
    }

    pub fn product_info(&self) -> Option<&ProductInfo> {
        match &self.origin {
            Origin::Product(p) => Some(p),
            _ => None,
        }
    }

    pub fn opposite_info(&self) -> Option<&OppositeInfo> {
        match &self.origin {
            Origin::Opposite(o) => Some(o),
            _ => None,
        }
    }

    pub fn to_desc(&self) -> CategoryDesc {
        let mut compose = Vec::new();
        for f in self.morphisms() {
            for g in self.outgoing_list(self.dst[f]) {
                compose.push([
                    self.morphisms[g].clone(),
                    self.morphisms[f].clone(),
                    self.morphisms[self.comp(g, f)].clone(),
                ]);
            }
        }
        CategoryDesc {
            objects: self.objects.clone(),
            morphisms: self
                .morphisms()
                .map(|f| MorphismDesc {
                    id: self.morphisms[f].clone(),
                    src: self.objects[self.src[f]].clone(),
                    dst: self.objects[self.dst[f]].clone(),
                })
                .collect(),
            compose,
            identities: self
                .objects()
                .map(|a| (self.objects[a].clone(), self.morphisms[self.identities[a]].clone()))
                .collect(),
        }
    }
}

impl OppositeInfo {
    /// Index in the opposite category of a morphism of the original.
    pub fn from_original(&self, f: Mor) -> Mor {
        self.from_original[f]
    }

    pub fn to_original(&self, f: Mor) -> Mor {
        self.to_original[f]
    }
}

impl ProductInfo {
    pub fn pair(&self, m: Mor) -> (Mor, Mor) {
        self.pairs[m]
    }

    pub fn morphism(&self, f: Mor, g: Mor) -> Mor {
        self.index[f * self.right.morphism_count() + g]
    }

    pub fn object(&self, a: Obj, b: Obj) -> Obj {
        a * self.right.object_count() + b
    }
}

/// `C^op`: same objects, reversed morphisms, `g ∘_op f = f ∘ g`.
pub fn opposite(c: &Arc<FinCategory>) -> FinCategory {
    let m = c.morphism_count();
    let mut order: Vec<Mor> = (0..m).collect();
    order.sort_by_key(|&f| (c.dst[f], c.src[f], f));
    let mut from_original = vec![0; m];
    for (k, &f) in order.iter().enumerate() {
        from_original[f] = k;
    }
    let morphisms = order
        .iter()
        .map(|&f| (c.morphisms[f].clone(), c.dst[f], c.src[f]))
        .collect();
    let identities = c.identities.iter().map(|&f| from_original[f]).collect();
    let fo = from_original.clone();
    let to = order.clone();
    FinCategory::assemble(
        c.objects.clone(),
        morphisms,
        identities,
        |g, f| fo[c.comp(to[f], to[g])],
        Origin::Opposite(OppositeInfo {
            original: c.clone(),
            from_original,
            to_original: order,
        }),
    )
    .expect("opposite of a valid category")
}

/// `C × D` with objects `(c, d)` at index `c·|D| + d`.
pub fn product_category(c: &Arc<FinCategory>, d: &Arc<FinCategory>) -> FinCategory {
    let (nc, nd) = (c.object_count(), d.object_count());
    let md = d.morphism_count();
    let mut objects = Vec::with_capacity(nc * nd);
    for a in 0..nc {
        for b in 0..nd {
            objects.push(format!("({},{})", c.objects[a], d.objects[b]));
        }
    }
    let mut morphisms = Vec::new();
    let mut pairs = Vec::new();
    let mut index = vec![0; c.morphism_count() * md];
    for a in 0..nc {
        for b in 0..nd {
            for a2 in 0..nc {
                for b2 in 0..nd {
                    for f in c.hom(a, a2) {
                        for g in d.hom(b, b2) {
                            index[f * md + g] = pairs.len();
                            pairs.push((f, g));
                            morphisms.push((
                                format!("({},{})", c.morphisms[f], d.morphisms[g]),
                                a * nd + b,
                                a2 * nd + b2,
                            ));
                        }
                    }
                }
            }
        }
    }
    let mut identities = Vec::with_capacity(nc * nd);
    for a in 0..nc {
        for b in 0..nd {
            identities.push(index[c.identities[a] * md + d.identities[b]]);
        }
    }
    let compose = |g: Mor, f: Mor| {
        let (g1, g2) = pairs[g];
        let (f1, f2) = pairs[f];
        index[c.comp(g1, f1) * md + d.comp(g2, f2)]
    };
    let cat = FinCategory::assemble(objects, morphisms, identities, compose, Origin::Plain)
        .expect("product of valid categories");
    FinCategory {
        origin: Origin::Product(ProductInfo {
            left: c.clone(),
            right: d.clone(),
            pairs,
            index,
        }),
        ..cat
    }
}

/// `!A` truncated at sequences of length `max_arity`.
pub fn free_symmetric(a: &Arc<FinCategory>, max_arity: usize) -> FinCategory {
    sequence_category(a, max_arity, SeqMode::Strict)
}

/// `↓A` truncated at sequences of length `max_arity`.
pub fn free_soft(a: &Arc<FinCategory>, max_arity: usize) -> FinCategory {
    sequence_category(a, max_arity, SeqMode::Soft)
}

pub fn sequence_category(a: &Arc<FinCategory>, max_arity: usize, mode: SeqMode) -> FinCategory {
    let seqs = sequences(a.object_count(), max_arity);
    let mut object_index = HashMap::new();
    for (i, s) in seqs.iter().enumerate() {
        object_index.insert(s.clone(), i);
    }
    let mut morphisms = Vec::new();
    let mut names = Vec::new();
    let mut morphism_index = HashMap::new();
    let mut perms_cache: HashMap<(usize, usize), Vec<Vec<usize>>> = HashMap::new();
    for (xi, x) in seqs.iter().enumerate() {
        for (yi, y) in seqs.iter().enumerate() {
            let (n, m) = (x.len(), y.len());
            let sigmas = perms_cache
                .entry((m, n))
                .or_insert_with(|| match mode {
                    SeqMode::Strict if m == n => permutations(n),
                    SeqMode::Strict => Vec::new(),
                    SeqMode::Soft => surjections(m, n),
                })
                .clone();
            for sigma in sigmas {
                let ranges: Vec<Range<Mor>> = (0..m).map(|j| a.hom(x[sigma[j]], y[j])).collect();
                for components in cartesian(&ranges) {
                    let sm = SeqMorphism {
                        sigma: sigma.clone(),
                        components,
                    };
                    morphism_index.insert((xi, sm.clone()), morphisms.len());
                    names.push((seq_morphism_name(a, &sm), xi, yi));
                    morphisms.push(sm);
                }
            }
        }
    }
    let identities = seqs
        .iter()
        .enumerate()
        .map(|(xi, x)| {
            let sm = SeqMorphism {
                sigma: (0..x.len()).collect(),
                components: x.iter().map(|&o| a.identities[o]).collect(),
            };
            morphism_index[&(xi, sm)]
        })
        .collect();
    let srcs: Vec<Obj> = names.iter().map(|n| n.1).collect();
    let compose = |g: Mor, f: Mor| {
        let (mf, mg) = (&morphisms[f], &morphisms[g]);
        let sm = compose_seq(a, mf, mg);
        morphism_index[&(srcs[f], sm)]
    };
    let objects = seqs.iter().map(|s| seq_name(a, s)).collect();
    let cat = FinCategory::assemble(objects, names, identities, compose, Origin::Plain)
        .expect("sequence categories are well formed");
    FinCategory {
        origin: Origin::Seq(SeqInfo {
            mode,
            base: a.clone(),
            max_arity,
            objects: seqs,
            morphisms,
            object_index,
            morphism_index,
        }),
        ..cat
    }
}

/// `(τ,⟨g⟩) ∘ (σ,⟨f⟩) = (στ, ⟨g_k f_{τk}⟩)`.
pub fn compose_seq(a: &FinCategory, f: &SeqMorphism, g: &SeqMorphism) -> SeqMorphism {
    let sigma = g.sigma.iter().map(|&t| f.sigma[t]).collect();
    let components = g
        .sigma
        .iter()
        .zip(&g.components)
        .map(|(&t, &gk)| a.comp(gk, f.components[t]))
        .collect();
    SeqMorphism { sigma, components }
}

pub fn seq_name(a: &FinCategory, s: &[Obj]) -> String {
    let parts: Vec<&str> = s.iter().map(|&o| a.object_name(o)).collect();
    format!("<{}>", parts.join(","))
}

fn seq_morphism_name(a: &FinCategory, m: &SeqMorphism) -> String {
    let sigma: Vec<String> = m.sigma.iter().map(|i| i.to_string()).collect();
    let comps: Vec<&str> = m.components.iter().map(|&f| a.morphism_name(f)).collect();
    format!("[{};{}]", sigma.join(" "), comps.join(","))
}

/// All sequences over `n` letters of length at most `max`, shortlex ordered.
pub fn sequences(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &layer {
            for o in 0..n {
                let mut t: Vec<usize> = s.clone();
                t.push(o);
                next.push(t);
            }
        }
        if next.is_empty() {
            break;
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn go(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(n, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    go(n, &mut cur, &mut used, &mut out);
    out
}

/// Surjections `m ↠ n` as value lists, in lexicographic order.
pub fn surjections(m: usize, n: usize) -> Vec<Vec<usize>> {
    if n > m || (n == 0 && m > 0) {
        return Vec::new();
    }
    let mut out = Vec::new();
    for f in cartesian(&vec![0..n; m]) {
        let mut hit = vec![false; n];
        for &v in &f {
            hit[v] = true;
        }
        if hit.iter().all(|&h| h) {
            out.push(f);
        }
    }
    out
}

/// Cartesian product of ranges, lexicographic (last coordinate fastest).
pub fn cartesian(ranges: &[Range<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(ranges.len())];
    for r in ranges {
        let mut next = Vec::with_capacity(out.len() * r.len());
        for prefix in &out {
            for v in r.clone() {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// A functor between finite categories, checked on construction.
#[derive(Clone, Debug)]
pub struct FinFunctor {
    pub src: Arc<FinCategory>,
    pub dst: Arc<FinCategory>,
    objects: Vec<Obj>,
    morphisms: Vec<Mor>,
}

impl FinFunctor {
    pub fn new(
        src: Arc<FinCategory>,
        dst: Arc<FinCategory>,
        objects: Vec<Obj>,
        morphisms: Vec<Mor>,
    ) -> Result<FinFunctor> {
        if objects.len() != src.object_count() || morphisms.len() != src.morphism_count() {
            return Err(Error::NotFunctorial("wrong table size".into()));
        }
        for f in src.morphisms() {
            let h = morphisms[f];
            if dst.src(h) != objects[src.src(f)] || dst.dst(h) != objects[src.dst(f)] {
                return Err(Error::NotFunctorial(src.morphism_name(f).to_string()));
            }
        }
        for a in src.objects() {
            if morphisms[src.identity(a)] != dst.identity(objects[a]) {
                return Err(Error::NotFunctorial(src.object_name(a).to_string()));
            }
        }
        for f in src.morphisms() {
            for g in src.out_of(src.dst(f)) {
                if morphisms[src.comp(g, f)] != dst.comp(morphisms[g], morphisms[f]) {
                    return Err(Error::NotFunctorial(src.morphism_name(g).to_string()));
                }
            }
        }
        Ok(FinFunctor {
            src,
            dst,
            objects,
            morphisms,
        })
    }

    pub fn on_object(&self, a: Obj) -> Obj {
        self.objects[a]
    }

    pub fn on_morphism(&self, f: Mor) -> Mor {
        self.morphisms[f]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(c: FinCategory) -> Arc<FinCategory> {
        Arc::new(c)
    }

    fn arrow_desc() -> CategoryDesc {
        serde_json::from_str(
            r#"{"objects":["0","1"],
                "morphisms":[{"id":"id0","src":"0","dst":"0"},{"id":"id1","src":"1","dst":"1"},{"id":"e","src":"0","dst":"1"}],
                "compose":[["e","id0","e"],["id1","e","e"]],
                "identities":{"0":"id0","1":"id1"}}"#,
        )
        .unwrap()
    }

    #[test]
    fn arrow_description_validates() {
        let c = validate_category(&arrow_desc()).unwrap();
        assert_eq!(c.morphism_count(), 3);
        assert_eq!(c, FinCategory::arrow());
    }

    #[test]
    fn wrong_identity_composite_is_rejected() {
        let mut d = arrow_desc();
        d.compose[0] = ["e".into(), "id0".into(), "id0".into()];
        assert_eq!(validate_category(&d), Err(Error::BadIdentity("0".into())));
    }

    #[test]
    fn wrong_triple_composite_is_reported() {
        // chain 0 → 1 → 2 plus a parallel arrow 0 → 2 so that a bad entry is typeable
        let d: CategoryDesc = serde_json::from_str(
            r#"{"objects":["0","1","2","3"],
                "morphisms":[{"id":"a","src":"0","dst":"1"},{"id":"b","src":"1","dst":"2"},{"id":"c","src":"2","dst":"3"},
                             {"id":"ba","src":"0","dst":"2"},{"id":"cb","src":"1","dst":"3"},
                             {"id":"x","src":"0","dst":"3"},{"id":"y","src":"0","dst":"3"},
                             {"id":"i0","src":"0","dst":"0"},{"id":"i1","src":"1","dst":"1"},{"id":"i2","src":"2","dst":"2"},{"id":"i3","src":"3","dst":"3"}],
                "compose":[["b","a","ba"],["c","b","cb"],["c","ba","x"],["cb","a","y"]],
                "identities":{"0":"i0","1":"i1","2":"i2","3":"i3"}}"#,
        )
        .unwrap();
        assert!(matches!(validate_category(&d), Err(Error::NonAssociative { .. })));
    }

    #[test]
    fn dangling_endpoint() {
        let mut d = arrow_desc();
        d.morphisms[2].dst = "7".into();
        assert_eq!(validate_category(&d), Err(Error::DanglingEndpoint("e".into())));
    }

    #[test]
    fn opposite_reverses_and_is_involutive() {
        let arr = arc(FinCategory::arrow());
        let op = arc(opposite(&arr));
        let e = op.find_morphism("e").unwrap();
        assert_eq!((op.src(e), op.dst(e)), (1, 0));
        assert_eq!(opposite(&op), *arr);
        let d2 = arc(FinCategory::discrete(&["a0", "a1"]));
        assert_eq!(opposite(&d2), *d2);
    }

    #[test]
    fn product_sizes() {
        let one = arc(FinCategory::terminal());
        let arr = arc(FinCategory::arrow());
        let d2 = arc(FinCategory::discrete(&["a0", "a1"]));
        let p = product_category(&one, &arr);
        assert_eq!((p.object_count(), p.morphism_count()), (2, 3));
        let p = product_category(&d2, &d2);
        assert_eq!((p.object_count(), p.morphism_count()), (4, 4));
        let p = product_category(&arr, &arr);
        assert_eq!(p.morphism_count(), 9);
        p.check_laws().unwrap();
    }

    #[test]
    fn symmetric_group_homs() {
        let one = arc(FinCategory::terminal());
        let bang = free_symmetric(&one, 3);
        let info = bang.seq_info().unwrap();
        for n in 0..=3 {
            let x = info.object_of(&vec![0; n]).unwrap();
            let fact: usize = (1..=n).product();
            assert_eq!(bang.hom(x, x).len(), fact);
        }
        let x1 = info.object_of(&[0]).unwrap();
        let x2 = info.object_of(&[0, 0]).unwrap();
        assert!(bang.hom(x1, x2).is_empty());
        bang.check_laws().unwrap();
    }

    #[test]
    fn arrow_bang_hom() {
        let arr = arc(FinCategory::arrow());
        let bang = free_symmetric(&arr, 2);
        let info = bang.seq_info().unwrap();
        let x = info.object_of(&[0, 0]).unwrap();
        let y = info.object_of(&[1, 1]).unwrap();
        assert_eq!(bang.hom(x, y).len(), 2);
        bang.check_laws().unwrap();
    }

    #[test]
    fn soft_homs() {
        let one = arc(FinCategory::terminal());
        let down = free_soft(&one, 3);
        let info = down.seq_info().unwrap();
        let s = |n: usize| info.object_of(&vec![0; n]).unwrap();
        assert_eq!(down.hom(s(1), s(3)).len(), 1);
        assert_eq!(down.hom(s(2), s(3)).len(), 6);
        assert!(down.hom(s(2), s(1)).is_empty());
        assert_eq!(down.hom(s(0), s(0)).len(), 1);
        down.check_laws().unwrap();
    }

    #[test]
    fn strict_embeds_in_soft() {
        let arr = arc(FinCategory::arrow());
        let bang = free_symmetric(&arr, 3);
        let down = free_soft(&arr, 3);
        let (bi, di) = (bang.seq_info().unwrap(), down.seq_info().unwrap());
        let image: Vec<Mor> = bang
            .morphisms()
            .map(|f| di.find(bang.src(f), bi.morphism(f)).unwrap())
            .collect();
        for f in bang.morphisms() {
            for g in bang.out_of(bang.dst(f)) {
                assert_eq!(image[bang.comp(g, f)], down.comp(image[g], image[f]));
            }
        }
    }

    #[test]
    fn discrete_bang_counts_matching_permutations() {
        let d2 = arc(FinCategory::discrete(&["a0", "a1"]));
        let bang = free_symmetric(&d2, 3);
        let info = bang.seq_info().unwrap();
        for x in bang.objects() {
            for y in bang.objects() {
                let (sx, sy) = (info.entries(x), info.entries(y));
                let expected = if sx.len() == sy.len() {
                    permutations(sx.len())
                        .iter()
                        .filter(|s| (0..sy.len()).all(|i| sx[s[i]] == sy[i]))
                        .count()
                } else {
                    0
                };
                assert_eq!(bang.hom(x, y).len(), expected);
            }
        }
    }

    #[test]
    fn small_groups_and_monoids() {
        let z3 = FinCategory::cyclic_group(3);
        assert!(z3.is_groupoid());
        let idem = FinCategory::idempotent();
        assert!(!idem.is_groupoid());
        assert_eq!(FinCategory::chain(3).morphism_count(), 6);
    }

    #[test]
    fn outgoing_covers_all() {
        let c = FinCategory::chain(3);
        for a in c.objects() {
            let v: Vec<Mor> = c.out_of(a).collect();
            assert!(v.iter().all(|&f| c.src(f) == a));
            assert_eq!(v.len(), 3 - a);
        }
    }
}
