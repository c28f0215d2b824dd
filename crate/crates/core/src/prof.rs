//! Profunctors `A ⇸ B` (functors `A^op × B → Set`) as matrices of finite sets
//! with two-sided actions: coend composition, the two closed structures,
//! tensoring with presheaves, transposition and the component test for
//! monomial functors.

use std::collections::HashMap;
use std::sync::Arc;

use crate::coend::{Coend, Family, TableFamily, UnionFind};
use crate::error::{Error, Result};
use crate::fincat::{cartesian, opposite, product_category, same, FinCategory, FinFunctor, Mor, Obj};
use crate::natenum;
use crate::presheaf::{flatten, unflatten, NatTrans, Presheaf};

/// A profunctor `A ⇸ B`. `left[f][b]` maps `P(a, b) → P(a', b)` for
/// `f: a' → a`; `right[g][a]` maps `P(a, b) → P(a, b')` for `g: b → b'`.
#[derive(Clone, Debug)]
pub struct Profunctor {
    src: Arc<FinCategory>,
    dst: Arc<FinCategory>,
    cells: Vec<Vec<String>>,
    left: Vec<Vec<Vec<usize>>>,
    right: Vec<Vec<Vec<usize>>>,
}

impl PartialEq for Profunctor {
    fn eq(&self, other: &Self) -> bool {
        same(&self.src, &other.src)
            && same(&self.dst, &other.dst)
            && self.cells == other.cells
            && self.left == other.left
            && self.right == other.right
    }
}

/// The row `P(a, −)`, covariant over `B`.
pub struct Row<'a> {
    p: &'a Profunctor,
    a: Obj,
}

impl Family for Row<'_> {
    fn size(&self, b: Obj) -> usize {
        self.p.size(self.a, b)
    }

    fn act(&self, g: Mor, x: usize) -> usize {
        self.p.right[g][self.a][x]
    }
}

/// The column `P(−, b)`, contravariant over `A`.
pub struct Column<'a> {
    p: &'a Profunctor,
    b: Obj,
}

impl Family for Column<'_> {
    fn size(&self, a: Obj) -> usize {
        self.p.size(a, self.b)
    }

    fn act(&self, f: Mor, x: usize) -> usize {
        self.p.left[f][self.b][x]
    }
}

fn non_identity_arrows(c: &FinCategory) -> Vec<(Obj, Obj, Mor)> {
    c.morphisms()
        .filter(|&f| !c.is_identity(f))
        .map(|f| (c.src(f), c.dst(f), f))
        .collect()
}

fn reversed_arrows(c: &FinCategory) -> Vec<(Obj, Obj, Mor)> {
    c.morphisms()
        .filter(|&f| !c.is_identity(f))
        .map(|f| (c.dst(f), c.src(f), f))
        .collect()
}

impl Profunctor {
    /// Checked constructor. `cells` is indexed by `a·|B| + b`.
    pub fn new(
        src: Arc<FinCategory>,
        dst: Arc<FinCategory>,
        cells: Vec<Vec<String>>,
        left: Vec<Vec<Vec<usize>>>,
        right: Vec<Vec<Vec<usize>>>,
    ) -> Result<Profunctor> {
        let p = Profunctor {
            src,
            dst,
            cells,
            left,
            right,
        };
        p.check()?;
        Ok(p)
    }

    pub(crate) fn from_parts(
        src: Arc<FinCategory>,
        dst: Arc<FinCategory>,
        cells: Vec<Vec<String>>,
        left: Vec<Vec<Vec<usize>>>,
        right: Vec<Vec<Vec<usize>>>,
    ) -> Profunctor {
        let p = Profunctor {
            src,
            dst,
            cells,
            left,
            right,
        };
        debug_assert!(p.check().is_ok(), "internal profunctor is not a bimodule");
        p
    }

    /// Builds the action tables from closures on cell elements.
    pub(crate) fn from_fn(
        src: Arc<FinCategory>,
        dst: Arc<FinCategory>,
        cells: Vec<Vec<String>>,
        left: impl Fn(Mor, Obj, usize) -> usize,
        right: impl Fn(Mor, Obj, usize) -> usize,
    ) -> Profunctor {
        let nb = dst.object_count();
        let l = src
            .morphisms()
            .map(|f| {
                dst.objects()
                    .map(|b| (0..cells[src.dst(f) * nb + b].len()).map(|x| left(f, b, x)).collect())
                    .collect()
            })
            .collect();
        let r = dst
            .morphisms()
            .map(|g| {
                src.objects()
                    .map(|a| (0..cells[a * nb + dst.src(g)].len()).map(|x| right(g, a, x)).collect())
                    .collect()
            })
            .collect();
        Profunctor::from_parts(src, dst, cells, l, r)
    }

    /// Functoriality in each variable and commutation of the two actions.
    pub fn check(&self) -> Result<()> {
        let (ca, cb) = (&self.src, &self.dst);
        let (na, nb) = (ca.object_count(), cb.object_count());
        if self.cells.len() != na * nb || self.left.len() != ca.morphism_count() || self.right.len() != cb.morphism_count() {
            return Err(Error::NotFunctorial("table sizes".into()));
        }
        for f in ca.morphisms() {
            if self.left[f].len() != nb {
                return Err(Error::NotFunctorial(ca.morphism_name(f).to_string()));
            }
            for b in cb.objects() {
                let row = &self.left[f][b];
                if row.len() != self.size(ca.dst(f), b) || row.iter().any(|&y| y >= self.size(ca.src(f), b)) {
                    return Err(Error::NotFunctorial(ca.morphism_name(f).to_string()));
                }
            }
        }
        for g in cb.morphisms() {
            if self.right[g].len() != na {
                return Err(Error::NotFunctorial(cb.morphism_name(g).to_string()));
            }
            for a in ca.objects() {
                let row = &self.right[g][a];
                if row.len() != self.size(a, cb.src(g)) || row.iter().any(|&y| y >= self.size(a, cb.dst(g))) {
                    return Err(Error::NotFunctorial(cb.morphism_name(g).to_string()));
                }
            }
        }
        for a in ca.objects() {
            let id = ca.identity(a);
            for b in cb.objects() {
                if self.left[id][b].iter().enumerate().any(|(x, &y)| x != y) {
                    return Err(Error::NotFunctorial(ca.morphism_name(id).to_string()));
                }
            }
        }
        for b in cb.objects() {
            let id = cb.identity(b);
            for a in ca.objects() {
                if self.right[id][a].iter().enumerate().any(|(x, &y)| x != y) {
                    return Err(Error::NotFunctorial(cb.morphism_name(id).to_string()));
                }
            }
        }
        for f in ca.morphisms() {
            for g in ca.out_of(ca.dst(f)) {
                let gf = ca.comp(g, f);
                for b in cb.objects() {
                    for x in 0..self.size(ca.dst(g), b) {
                        if self.left[gf][b][x] != self.left[f][b][self.left[g][b][x]] {
                            return Err(Error::NotFunctorial(format!(
                                "{} after {}",
                                ca.morphism_name(g),
                                ca.morphism_name(f)
                            )));
                        }
                    }
                }
            }
        }
        for g in cb.morphisms() {
            for h in cb.out_of(cb.dst(g)) {
                let hg = cb.comp(h, g);
                for a in ca.objects() {
                    for x in 0..self.size(a, cb.src(g)) {
                        if self.right[hg][a][x] != self.right[h][a][self.right[g][a][x]] {
                            return Err(Error::NotFunctorial(format!(
                                "{} after {}",
                                cb.morphism_name(h),
                                cb.morphism_name(g)
                            )));
                        }
                    }
                }
            }
        }
        for f in ca.morphisms() {
            let (a2, a) = (ca.src(f), ca.dst(f));
            for g in cb.morphisms() {
                let (b, b2) = (cb.src(g), cb.dst(g));
                for x in 0..self.size(a, b) {
                    let one = self.right[g][a2][self.left[f][b][x]];
                    let two = self.left[f][b2][self.right[g][a][x]];
                    if one != two {
                        return Err(Error::NotFunctorial(format!(
                            "actions of {} and {} do not commute",
                            ca.morphism_name(f),
                            cb.morphism_name(g)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn src(&self) -> &Arc<FinCategory> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<FinCategory> {
        &self.dst
    }

    fn idx(&self, a: Obj, b: Obj) -> usize {
        a * self.dst.object_count() + b
    }

    pub fn size(&self, a: Obj, b: Obj) -> usize {
        self.cells[self.idx(a, b)].len()
    }

    pub fn cell(&self, a: Obj, b: Obj) -> &[String] {
        &self.cells[self.idx(a, b)]
    }

    pub fn cell_sizes(&self) -> Vec<Vec<usize>> {
        self.src
            .objects()
            .map(|a| self.dst.objects().map(|b| self.size(a, b)).collect())
            .collect()
    }

    pub fn total_size(&self) -> usize {
        self.cells.iter().map(|c| c.len()).sum()
    }

    /// `P(f, b)(x)` for `f: a' → a` and `x ∈ P(a, b)`.
    pub fn left_act(&self, f: Mor, b: Obj, x: usize) -> usize {
        self.left[f][b][x]
    }

    /// `P(a, g)(x)` for `g: b → b'` and `x ∈ P(a, b)`.
    pub fn right_act(&self, g: Mor, a: Obj, x: usize) -> usize {
        self.right[g][a][x]
    }

    pub fn row(&self, a: Obj) -> Row<'_> {
        Row { p: self, a }
    }

    pub fn column(&self, b: Obj) -> Column<'_> {
        Column { p: self, b }
    }

    /// The row `P(a, −)` as a presheaf on `B`.
    pub fn row_presheaf(&self, a: Obj) -> Presheaf {
        let elems = self.dst.objects().map(|b| self.cell(a, b).to_vec()).collect();
        Presheaf::from_fn(self.dst.clone(), elems, |g, x| self.right[g][a][x])
    }

    /// Quotient by the bimodule congruence generated by `pairs` of elements
    /// `(a, b, x, y)` of the same cell. Returns the quotient and the
    /// projection, one row per cell. Classes keep the label of their least member.
    pub fn quotient(&self, pairs: &[(Obj, Obj, usize, usize)]) -> (Profunctor, Vec<Vec<usize>>) {
        let (ca, cb) = (&self.src, &self.dst);
        let mut offsets = Vec::with_capacity(self.cells.len() + 1);
        let mut total = 0;
        for c in &self.cells {
            offsets.push(total);
            total += c.len();
        }
        let mut uf = UnionFind::new(total);
        let mut work: Vec<(Obj, Obj, usize, usize)> = pairs.to_vec();
        while let Some((a, b, x, y)) = work.pop() {
            let i = self.idx(a, b);
            if !uf.union(offsets[i] + x, offsets[i] + y) {
                continue;
            }
            for &f in ca.incoming(a) {
                if !ca.is_identity(f) {
                    work.push((ca.src(f), b, self.left[f][b][x], self.left[f][b][y]));
                }
            }
            for g in cb.out_of(b) {
                if !cb.is_identity(g) {
                    work.push((a, cb.dst(g), self.right[g][a][x], self.right[g][a][y]));
                }
            }
        }
        let (labels, reps) = uf.classes();
        let mut proj = Vec::with_capacity(self.cells.len());
        let mut cells = Vec::with_capacity(self.cells.len());
        let mut first: Vec<Vec<usize>> = Vec::with_capacity(self.cells.len());
        for (i, c) in self.cells.iter().enumerate() {
            let mut local: HashMap<usize, usize> = HashMap::new();
            let mut row = Vec::with_capacity(c.len());
            let mut names = Vec::new();
            let mut firsts = Vec::new();
            for x in 0..c.len() {
                let cl = labels[offsets[i] + x];
                let k = *local.entry(cl).or_insert_with(|| {
                    names.push(self.cells[i][reps[cl] - offsets[i]].clone());
                    firsts.push(x);
                    names.len() - 1
                });
                row.push(k);
            }
            proj.push(row);
            cells.push(names);
            first.push(firsts);
        }
        let nb = cb.object_count();
        let q = Profunctor::from_fn(
            ca.clone(),
            cb.clone(),
            cells,
            |f, b, k| {
                let x = first[ca.dst(f) * nb + b][k];
                proj[ca.src(f) * nb + b][self.left[f][b][x]]
            },
            |g, a, k| {
                let x = first[a * nb + cb.src(g)][k];
                proj[a * nb + cb.dst(g)][self.right[g][a][x]]
            },
        );
        (q, proj)
    }

    /// A presheaf on `1` seen as a profunctor `1 ⇸ B`, and back.
    pub fn from_presheaf_column(phi: &Presheaf) -> Profunctor {
        let one = Arc::new(FinCategory::terminal());
        let b = phi.base().clone();
        let cells = b.objects().map(|o| phi.labels(o).to_vec()).collect();
        Profunctor::from_fn(one, b, cells, |_, _, x| x, |g, _, x| phi.act(g, x))
    }

    /// The same data as a presheaf on `A^op × B`.
    pub fn to_presheaf(&self) -> Presheaf {
        let op = Arc::new(opposite(&self.src));
        let prod = Arc::new(product_category(&op, &self.dst));
        let info = prod.product_info().expect("product category");
        let opi = op.opposite_info().expect("opposite category");
        let elems = self.cells.clone();
        Presheaf::from_fn(prod.clone(), elems, |m, x| {
            let (fo, g) = info.pair(m);
            let f = opi.to_original(fo);
            self.right[g][self.src.src(f)][self.left[f][self.dst.src(g)][x]]
        })
    }

    /// Inverse of [`Profunctor::to_presheaf`]; `phi` must live on `A^op × B`.
    pub fn from_presheaf(src: &Arc<FinCategory>, dst: &Arc<FinCategory>, phi: &Presheaf) -> Result<Profunctor> {
        let prod = phi.base().clone();
        let info = prod.product_info().ok_or(Error::BaseMismatch)?;
        let opi = info.left.opposite_info().ok_or(Error::BaseMismatch)?;
        if !same(&opi.original, src) || !same(&info.right, dst) {
            return Err(Error::BaseMismatch);
        }
        let nb = dst.object_count();
        let cells = (0..src.object_count() * nb).map(|o| phi.labels(o).to_vec()).collect();
        Ok(Profunctor::from_fn(
            src.clone(),
            dst.clone(),
            cells,
            |f, b, x| phi.act(info.morphism(opi.from_original(f), dst.identity(b)), x),
            |g, a, x| {
                let ida = info.left.identity(a);
                phi.act(info.morphism(ida, g), x)
            },
        ))
    }
}

impl Profunctor {
    /// Cellwise disjoint union, elements of part `k` labelled `k:label`.
    pub fn coproduct(parts: &[&Profunctor]) -> Result<Profunctor> {
        let first = parts.first().ok_or(Error::EndpointMismatch)?;
        let (ca, cb) = (first.src.clone(), first.dst.clone());
        if parts.iter().any(|p| !same(&p.src, &ca) || !same(&p.dst, &cb)) {
            return Err(Error::EndpointMismatch);
        }
        let nb = cb.object_count();
        let cells = (0..first.cells.len())
            .map(|o| {
                parts
                    .iter()
                    .enumerate()
                    .flat_map(|(k, p)| p.cells[o].iter().map(move |l| format!("{}:{}", k, l)))
                    .collect()
            })
            .collect();
        let locate = |o: usize, mut x: usize| -> (usize, usize) {
            for (k, p) in parts.iter().enumerate() {
                if x < p.cells[o].len() {
                    return (k, x);
                }
                x -= p.cells[o].len();
            }
            unreachable!("element index out of range")
        };
        let offset = |o: usize, k: usize| -> usize { parts[..k].iter().map(|p| p.cells[o].len()).sum() };
        Ok(Profunctor::from_fn(
            ca.clone(),
            cb.clone(),
            cells,
            |f, b, x| {
                let (k, y) = locate(ca.dst(f) * nb + b, x);
                offset(ca.src(f) * nb + b, k) + parts[k].left[f][b][y]
            },
            |g, a, x| {
                let (k, y) = locate(a * nb + cb.src(g), x);
                offset(a * nb + cb.dst(g), k) + parts[k].right[g][a][y]
            },
        ))
    }

    /// Cellwise cartesian product, lexicographic element order.
    pub fn product(parts: &[&Profunctor]) -> Result<Profunctor> {
        let first = parts.first().ok_or(Error::EndpointMismatch)?;
        let (ca, cb) = (first.src.clone(), first.dst.clone());
        if parts.iter().any(|p| !same(&p.src, &ca) || !same(&p.dst, &cb)) {
            return Err(Error::EndpointMismatch);
        }
        let nb = cb.object_count();
        let sizes = |o: usize| parts.iter().map(move |p| p.cells[o].len());
        let cells = (0..first.cells.len())
            .map(|o| {
                let ranges: Vec<_> = parts.iter().map(|p| 0..p.cells[o].len()).collect();
                cartesian(&ranges)
                    .into_iter()
                    .map(|t| {
                        let ls: Vec<&str> = t.iter().zip(parts).map(|(&x, p)| p.cells[o][x].as_str()).collect();
                        format!("({})", ls.join(","))
                    })
                    .collect()
            })
            .collect();
        Ok(Profunctor::from_fn(
            ca.clone(),
            cb.clone(),
            cells,
            |f, b, x| {
                let t = unflatten(x, sizes(ca.dst(f) * nb + b));
                let img: Vec<usize> = t.iter().zip(parts).map(|(&y, p)| p.left[f][b][y]).collect();
                flatten(&img, sizes(ca.src(f) * nb + b))
            },
            |g, a, x| {
                let t = unflatten(x, sizes(a * nb + cb.src(g)));
                let img: Vec<usize> = t.iter().zip(parts).map(|(&y, p)| p.right[g][a][y]).collect();
                flatten(&img, sizes(a * nb + cb.dst(g)))
            },
        ))
    }

    /// `P(a, b) = Ψ(b)` with `A` acting trivially.
    pub fn constant(src: &Arc<FinCategory>, psi: &Presheaf) -> Profunctor {
        let cb = psi.base().clone();
        let cells = src
            .objects()
            .flat_map(|_| cb.objects().map(|b| psi.labels(b).to_vec()))
            .collect();
        Profunctor::from_fn(src.clone(), cb, cells, |_, _, x| x, |g, _, x| psi.act(g, x))
    }
}

/// A morphism of profunctors with the same endpoints, one function per cell.
#[derive(Clone, Debug)]
pub struct ProfMorphism {
    src: Arc<Profunctor>,
    dst: Arc<Profunctor>,
    comps: Vec<Vec<usize>>,
}

impl PartialEq for ProfMorphism {
    fn eq(&self, other: &Self) -> bool {
        *self.src == *other.src && *self.dst == *other.dst && self.comps == other.comps
    }
}

impl ProfMorphism {
    pub fn new(src: Arc<Profunctor>, dst: Arc<Profunctor>, comps: Vec<Vec<usize>>) -> Result<ProfMorphism> {
        if !same(&src.src, &dst.src) || !same(&src.dst, &dst.dst) {
            return Err(Error::EndpointMismatch);
        }
        let m = ProfMorphism { src, dst, comps };
        m.check()?;
        Ok(m)
    }

    pub(crate) fn from_parts(src: Arc<Profunctor>, dst: Arc<Profunctor>, comps: Vec<Vec<usize>>) -> ProfMorphism {
        ProfMorphism { src, dst, comps }
    }

    pub fn check(&self) -> Result<()> {
        let (p, q) = (&self.src, &self.dst);
        let (ca, cb) = (&p.src, &p.dst);
        for a in ca.objects() {
            for b in cb.objects() {
                let row = &self.comps[p.idx(a, b)];
                if row.len() != p.size(a, b) || row.iter().any(|&y| y >= q.size(a, b)) {
                    return Err(Error::NotNatural(format!("cell ({},{})", ca.object_name(a), cb.object_name(b))));
                }
            }
        }
        for f in ca.morphisms() {
            let (a2, a) = (ca.src(f), ca.dst(f));
            for b in cb.objects() {
                for x in 0..p.size(a, b) {
                    if self.comps[p.idx(a2, b)][p.left[f][b][x]] != q.left[f][b][self.comps[p.idx(a, b)][x]] {
                        return Err(Error::NotNatural(ca.morphism_name(f).to_string()));
                    }
                }
            }
        }
        for g in cb.morphisms() {
            let (b, b2) = (cb.src(g), cb.dst(g));
            for a in ca.objects() {
                for x in 0..p.size(a, b) {
                    if self.comps[p.idx(a, b2)][p.right[g][a][x]] != q.right[g][a][self.comps[p.idx(a, b)][x]] {
                        return Err(Error::NotNatural(cb.morphism_name(g).to_string()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn identity(p: &Arc<Profunctor>) -> ProfMorphism {
        let comps = p.cells.iter().map(|c| (0..c.len()).collect()).collect();
        ProfMorphism {
            src: p.clone(),
            dst: p.clone(),
            comps,
        }
    }

    pub fn src(&self) -> &Arc<Profunctor> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<Profunctor> {
        &self.dst
    }

    pub fn apply(&self, a: Obj, b: Obj, x: usize) -> usize {
        self.comps[self.src.idx(a, b)][x]
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.comps
    }

    /// `self ∘ m`.
    pub fn after(&self, m: &ProfMorphism) -> Result<ProfMorphism> {
        if *m.dst != *self.src {
            return Err(Error::EndpointMismatch);
        }
        let comps = m
            .comps
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().map(|&y| self.comps[i][y]).collect())
            .collect();
        Ok(ProfMorphism {
            src: m.src.clone(),
            dst: self.dst.clone(),
            comps,
        })
    }

    pub fn is_iso(&self) -> bool {
        self.comps.iter().enumerate().all(|(i, row)| {
            let mut hit = vec![false; self.dst.cells[i].len()];
            for &y in row {
                if std::mem::replace(&mut hit[y], true) {
                    return false;
                }
            }
            hit.iter().all(|&h| h)
        })
    }

    pub fn is_mono(&self) -> bool {
        self.comps.iter().enumerate().all(|(i, row)| {
            let mut hit = vec![false; self.dst.cells[i].len()];
            row.iter().all(|&y| !std::mem::replace(&mut hit[y], true))
        })
    }
}

/// All morphisms `p → q`, enumerated as natural families over the cells.
pub fn prof_morphisms(p: &Arc<Profunctor>, q: &Arc<Profunctor>, bound: u128) -> Result<Vec<ProfMorphism>> {
    if !same(&p.src, &q.src) || !same(&p.dst, &q.dst) {
        return Err(Error::EndpointMismatch);
    }
    let (ca, cb) = (&p.src, &p.dst);
    let nb = cb.object_count();
    let mut arrows = Vec::new();
    let mut pt = TableFamily {
        sizes: p.cells.iter().map(|c| c.len()).collect(),
        action: Vec::new(),
    };
    let mut qt = TableFamily {
        sizes: q.cells.iter().map(|c| c.len()).collect(),
        action: Vec::new(),
    };
    for f in ca.morphisms().filter(|&f| !ca.is_identity(f)) {
        for b in cb.objects() {
            arrows.push((ca.dst(f) * nb + b, ca.src(f) * nb + b, pt.action.len()));
            pt.action.push(p.left[f][b].clone());
            qt.action.push(q.left[f][b].clone());
        }
    }
    for g in cb.morphisms().filter(|&g| !cb.is_identity(g)) {
        for a in ca.objects() {
            arrows.push((a * nb + cb.src(g), a * nb + cb.dst(g), pt.action.len()));
            pt.action.push(p.right[g][a].clone());
            qt.action.push(q.right[g][a].clone());
        }
    }
    let all = natenum::enumerate(p.cells.len(), &arrows, &pt, &qt, bound)?;
    Ok(all
        .into_iter()
        .map(|comps| ProfMorphism::from_parts(p.clone(), q.clone(), comps))
        .collect())
}

/// `Q ⊗ P` with the coend tables retained, one per outer cell `(a, c)`.
/// Generators of cell `(a, c)` are `(b, x ∈ P(a,b), y ∈ Q(b,c))`.
#[derive(Clone, Debug)]
pub struct Composite {
    pub value: Arc<Profunctor>,
    pub p: Arc<Profunctor>,
    pub q: Arc<Profunctor>,
    coends: Vec<Coend>,
}

impl Composite {
    pub fn coend(&self, a: Obj, c: Obj) -> &Coend {
        &self.coends[a * self.q.dst.object_count() + c]
    }

    /// Class of `y ⊗ x` in cell `(a, c)`.
    pub fn class(&self, a: Obj, c: Obj, b: Obj, x: usize, y: usize) -> usize {
        self.coend(a, c).class(b, x, y)
    }

    /// Canonical representative `(b, x, y)` of a class.
    pub fn representative(&self, a: Obj, c: Obj, class: usize) -> (Obj, usize, usize) {
        self.coend(a, c).representative(class)
    }

    /// Builds the morphism `Q ⊗ P → target` from a formula on generators,
    /// checking that it is constant on every class.
    pub fn morphism_from_generators(
        &self,
        target: &Arc<Profunctor>,
        formula: impl Fn(Obj, Obj, Obj, usize, usize) -> Result<usize>,
    ) -> Result<ProfMorphism> {
        let v = &self.value;
        let mut comps = Vec::with_capacity(v.cells.len());
        for a in v.src.objects() {
            for c in v.dst.objects() {
                let co = self.coend(a, c);
                let mut row = vec![usize::MAX; co.class_count()];
                for g in 0..co.generator_count() {
                    let (b, x, y) = co.generator(g);
                    let img = formula(a, c, b, x, y)?;
                    let cl = co.class_of_generator(g);
                    if row[cl] == usize::MAX {
                        row[cl] = img;
                    } else if row[cl] != img {
                        return Err(Error::NotWellDefined(v.cell(a, c)[cl].clone()));
                    }
                }
                comps.push(row);
            }
        }
        ProfMorphism::new(self.value.clone(), target.clone(), comps)
    }
}

/// `Q ⊗ P: A ⇸ C` for `P: A ⇸ B` and `Q: B ⇸ C`.
pub fn compose(q: &Arc<Profunctor>, p: &Arc<Profunctor>) -> Result<Composite> {
    if !same(&p.dst, &q.src) {
        return Err(Error::EndpointMismatch);
    }
    let (ca, cb, cc) = (p.src.clone(), p.dst.clone(), q.dst.clone());
    let mut coends = Vec::with_capacity(ca.object_count() * cc.object_count());
    let mut cells = Vec::with_capacity(coends.capacity());
    for a in ca.objects() {
        for c in cc.objects() {
            let co = Coend::compute(&cb, &q.column(c), &p.row(a));
            let labels = (0..co.class_count())
                .map(|k| {
                    let (b, x, y) = co.representative(k);
                    format!("{}⊗{}", q.cell(b, c)[y], p.cell(a, b)[x])
                })
                .collect();
            cells.push(labels);
            coends.push(co);
        }
    }
    let nc = cc.object_count();
    let value = Profunctor::from_fn(
        ca.clone(),
        cc.clone(),
        cells,
        |f, c, k| {
            let (a2, a) = (ca.src(f), ca.dst(f));
            let (b, x, y) = coends[a * nc + c].representative(k);
            coends[a2 * nc + c].class(b, p.left[f][b][x], y)
        },
        |g, a, k| {
            let (c, c2) = (cc.src(g), cc.dst(g));
            let (b, x, y) = coends[a * nc + c].representative(k);
            coends[a * nc + c2].class(b, x, q.right[g][b][y])
        },
    );
    Ok(Composite {
        value: Arc::new(value),
        p: p.clone(),
        q: q.clone(),
        coends,
    })
}

/// The hom profunctor `A(a, a')`.
pub fn identity_prof(a: &Arc<FinCategory>) -> Profunctor {
    let cells = a
        .objects()
        .flat_map(|x| a.objects().map(move |y| (x, y)))
        .map(|(x, y)| a.hom(x, y).map(|h| a.morphism_name(h).to_string()).collect())
        .collect();
    Profunctor::from_fn(
        a.clone(),
        a.clone(),
        cells,
        |f, b, i| {
            let h = a.hom(a.dst(f), b).start + i;
            a.comp(h, f) - a.hom(a.src(f), b).start
        },
        |g, x, i| {
            let h = a.hom(x, a.src(g)).start + i;
            a.comp(g, h) - a.hom(x, a.dst(g)).start
        },
    )
}

/// `F_*(a, b) = B(Fa, b)`.
pub fn covariant_rep(f: &FinFunctor) -> Profunctor {
    let (ca, cb) = (f.src.clone(), f.dst.clone());
    let cells = ca
        .objects()
        .flat_map(|a| cb.objects().map(move |b| (a, b)))
        .map(|(a, b)| cb.hom(f.on_object(a), b).map(|h| cb.morphism_name(h).to_string()).collect())
        .collect();
    Profunctor::from_fn(
        ca.clone(),
        cb.clone(),
        cells,
        |m, b, i| {
            let (a2, a) = (ca.src(m), ca.dst(m));
            let h = cb.hom(f.on_object(a), b).start + i;
            cb.comp(h, f.on_morphism(m)) - cb.hom(f.on_object(a2), b).start
        },
        |g, a, i| {
            let fa = f.on_object(a);
            let h = cb.hom(fa, cb.src(g)).start + i;
            cb.comp(g, h) - cb.hom(fa, cb.dst(g)).start
        },
    )
}

/// `F^*(b, a) = B(b, Fa)`.
pub fn contravariant_rep(f: &FinFunctor) -> Profunctor {
    let (ca, cb) = (f.src.clone(), f.dst.clone());
    let cells = cb
        .objects()
        .flat_map(|b| ca.objects().map(move |a| (b, a)))
        .map(|(b, a)| cb.hom(b, f.on_object(a)).map(|h| cb.morphism_name(h).to_string()).collect())
        .collect();
    Profunctor::from_fn(
        cb.clone(),
        ca.clone(),
        cells,
        |g, a, i| {
            let (b2, b) = (cb.src(g), cb.dst(g));
            let fa = f.on_object(a);
            let h = cb.hom(b, fa).start + i;
            cb.comp(h, g) - cb.hom(b2, fa).start
        },
        |m, b, i| {
            let (a, a2) = (ca.src(m), ca.dst(m));
            let h = cb.hom(b, f.on_object(a)).start + i;
            cb.comp(f.on_morphism(m), h) - cb.hom(b, f.on_object(a2)).start
        },
    )
}

/// `P ⊗_A Φ` with its coend tables retained, one per `b`.
/// Generators at `b` are `(a, x ∈ Φ(a), p ∈ P(a, b))`.
#[derive(Clone, Debug)]
pub struct Tensor {
    pub value: Arc<Presheaf>,
    coends: Vec<Coend>,
}

impl Tensor {
    pub fn coend(&self, b: Obj) -> &Coend {
        &self.coends[b]
    }

    pub fn class(&self, b: Obj, a: Obj, x: usize, p: usize) -> usize {
        self.coends[b].class(a, x, p)
    }

    pub fn representative(&self, b: Obj, class: usize) -> (Obj, usize, usize) {
        self.coends[b].representative(class)
    }
}

pub fn tensor_presheaf(p: &Profunctor, phi: &Presheaf) -> Result<Tensor> {
    if !same(&p.src, phi.base()) {
        return Err(Error::BaseMismatch);
    }
    let (ca, cb) = (&p.src, &p.dst);
    let mut coends = Vec::with_capacity(cb.object_count());
    let mut elems = Vec::with_capacity(cb.object_count());
    for b in cb.objects() {
        let co = Coend::compute(ca, &p.column(b), phi);
        elems.push(
            (0..co.class_count())
                .map(|k| {
                    let (a, x, q) = co.representative(k);
                    format!("{}⊗{}", p.cell(a, b)[q], phi.label(a, x))
                })
                .collect(),
        );
        coends.push(co);
    }
    let value = Presheaf::from_fn(cb.clone(), elems, |g, k| {
        let (b, b2) = (cb.src(g), cb.dst(g));
        let (a, x, q) = coends[b].representative(k);
        coends[b2].class(a, x, p.right[g][a][q])
    });
    Ok(Tensor {
        value: Arc::new(value),
        coends,
    })
}

/// `P ⊗ t: P ⊗ Φ → P ⊗ Ψ` between precomputed tensors.
pub fn tensor_map(p: &Profunctor, t: &NatTrans, src: &Tensor, dst: &Tensor) -> NatTrans {
    let comps = p
        .dst
        .objects()
        .map(|b| {
            (0..src.value.size(b))
                .map(|k| {
                    let (a, x, q) = src.representative(b, k);
                    dst.class(b, a, t.apply(a, x), q)
                })
                .collect()
        })
        .collect();
    NatTrans::from_parts(src.value.clone(), dst.value.clone(), comps)
}

/// A closed-structure profunctor whose cells are natural families, with the
/// families kept so that elements can be decoded and looked up.
#[derive(Clone, Debug)]
pub struct HomProf {
    pub value: Arc<Profunctor>,
    families: Vec<Vec<Vec<Vec<usize>>>>,
    index: Vec<HashMap<Vec<Vec<usize>>, usize>>,
}

impl HomProf {
    /// The family of cell element `k` at `(a, b)`, indexed by inner object.
    pub fn family(&self, a: Obj, b: Obj, k: usize) -> &[Vec<usize>] {
        &self.families[a * self.value.dst.object_count() + b][k]
    }

    pub fn lookup(&self, a: Obj, b: Obj, fam: &[Vec<usize>]) -> Option<usize> {
        self.index[a * self.value.dst.object_count() + b].get(fam).copied()
    }
}

fn family_label(fam: &[Vec<usize>], labels: impl Fn(Obj, usize) -> String) -> String {
    let parts: Vec<String> = fam
        .iter()
        .enumerate()
        .flat_map(|(c, row)| row.iter().map(move |&v| (c, v)).collect::<Vec<_>>())
        .map(|(c, v)| labels(c, v))
        .collect();
    format!("{{{}}}", parts.join(","))
}

/// `Q ⦸_C R: A ⇸ B`, cells `(a, b)` = C-natural families `Q(b, −) → R(a, −)`.
pub fn left_hom(q: &Profunctor, r: &Profunctor) -> Result<HomProf> {
    left_hom_bounded(q, r, natenum::DEFAULT_BOUND)
}

pub fn left_hom_bounded(q: &Profunctor, r: &Profunctor, bound: u128) -> Result<HomProf> {
    if !same(&q.dst, &r.dst) {
        return Err(Error::EndpointMismatch);
    }
    let (ca, cb, cc) = (r.src.clone(), q.src.clone(), q.dst.clone());
    let arrows = non_identity_arrows(&cc);
    let nb = cb.object_count();
    let mut families = Vec::with_capacity(ca.object_count() * nb);
    let mut index = Vec::with_capacity(families.capacity());
    let mut cells = Vec::with_capacity(families.capacity());
    for a in ca.objects() {
        for b in cb.objects() {
            let fams = natenum::enumerate(cc.object_count(), &arrows, &q.row(b), &r.row(a), bound)?;
            cells.push(
                fams.iter()
                    .map(|f| family_label(f, |c, v| r.cell(a, c)[v].clone()))
                    .collect(),
            );
            index.push(fams.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect::<HashMap<_, _>>());
            families.push(fams);
        }
    }
    let value = Profunctor::from_fn(
        ca.clone(),
        cb.clone(),
        cells,
        |f, b, k| {
            let (a2, a) = (ca.src(f), ca.dst(f));
            let fam = &families[a * nb + b][k];
            let img: Vec<Vec<usize>> = fam
                .iter()
                .enumerate()
                .map(|(c, row)| row.iter().map(|&v| r.left[f][c][v]).collect())
                .collect();
            index[a2 * nb + b][&img]
        },
        |g, a, k| {
            let (b, b2) = (cb.src(g), cb.dst(g));
            let fam = &families[a * nb + b][k];
            let img: Vec<Vec<usize>> = cc
                .objects()
                .map(|c| (0..q.size(b2, c)).map(|y| fam[c][q.left[g][c][y]]).collect())
                .collect();
            index[a * nb + b2][&img]
        },
    );
    Ok(HomProf {
        value: Arc::new(value),
        families,
        index,
    })
}

/// `R ⊘_A P: B ⇸ C`, cells `(b, c)` = A-natural families `P(−, b) → R(−, c)`.
pub fn right_hom(r: &Profunctor, p: &Profunctor) -> Result<HomProf> {
    right_hom_bounded(r, p, natenum::DEFAULT_BOUND)
}

pub fn right_hom_bounded(r: &Profunctor, p: &Profunctor, bound: u128) -> Result<HomProf> {
    if !same(&r.src, &p.src) {
        return Err(Error::EndpointMismatch);
    }
    let (ca, cb, cc) = (p.src.clone(), p.dst.clone(), r.dst.clone());
    let arrows = reversed_arrows(&ca);
    let nc = cc.object_count();
    let mut families = Vec::with_capacity(cb.object_count() * nc);
    let mut index = Vec::with_capacity(families.capacity());
    let mut cells = Vec::with_capacity(families.capacity());
    for b in cb.objects() {
        for c in cc.objects() {
            let fams = natenum::enumerate(ca.object_count(), &arrows, &p.column(b), &r.column(c), bound)?;
            cells.push(
                fams.iter()
                    .map(|f| family_label(f, |a, v| r.cell(a, c)[v].clone()))
                    .collect(),
            );
            index.push(fams.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect::<HashMap<_, _>>());
            families.push(fams);
        }
    }
    let value = Profunctor::from_fn(
        cb.clone(),
        cc.clone(),
        cells,
        |g, c, k| {
            let (b2, b) = (cb.src(g), cb.dst(g));
            let fam = &families[b * nc + c][k];
            let img: Vec<Vec<usize>> = ca
                .objects()
                .map(|a| (0..p.size(a, b2)).map(|x| fam[a][p.right[g][a][x]]).collect())
                .collect();
            index[b2 * nc + c][&img]
        },
        |h, b, k| {
            let (c, c2) = (cc.src(h), cc.dst(h));
            let fam = &families[b * nc + c][k];
            let img: Vec<Vec<usize>> = fam
                .iter()
                .enumerate()
                .map(|(a, row)| row.iter().map(|&v| r.right[h][a][v]).collect())
                .collect();
            index[b * nc + c2][&img]
        },
    );
    Ok(HomProf {
        value: Arc::new(value),
        families,
        index,
    })
}

/// `P^⊤: B^op ⇸ A^op` with `P^⊤(b, a) = P(a, b)`.
pub fn transpose(p: &Profunctor) -> Profunctor {
    let bop = Arc::new(opposite(&p.dst));
    let aop = Arc::new(opposite(&p.src));
    let (bi, ai) = (bop.opposite_info().unwrap(), aop.opposite_info().unwrap());
    let na = p.src.object_count();
    let cells = p
        .dst
        .objects()
        .flat_map(|b| (0..na).map(move |a| (a, b)))
        .map(|(a, b)| p.cell(a, b).to_vec())
        .collect();
    Profunctor::from_fn(
        bop.clone(),
        aop.clone(),
        cells,
        |m, a, x| p.right[bi.to_original(m)][a][x],
        |n, b, x| p.left[ai.to_original(n)][b][x],
    )
}

/// Outcome of the component test: every `f: a → a'` must induce a surjection
/// `π0 P(a', −) → π0 P(a, −)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomTense {
    pub holds: bool,
    /// Failing morphism and a representative `(b, element)` of a missed component.
    pub witness: Option<(String, String, String)>,
}

pub fn hom_tense_check(p: &Profunctor) -> HomTense {
    let rows: Vec<Presheaf> = p.src.objects().map(|a| p.row_presheaf(a)).collect();
    let comps: Vec<_> = rows.iter().map(|r| r.pi0()).collect();
    for f in p.src.morphisms() {
        let (a, a2) = (p.src.src(f), p.src.dst(f));
        let mut hit = vec![false; comps[a].count()];
        for b in p.dst.objects() {
            for x in 0..p.size(a2, b) {
                hit[comps[a].of[b][p.left[f][b][x]]] = true;
            }
        }
        if let Some(k) = hit.iter().position(|&h| !h) {
            let (b, x) = comps[a].members[k][0];
            return HomTense {
                holds: false,
                witness: Some((
                    p.src.morphism_name(f).to_string(),
                    p.dst.object_name(b).to_string(),
                    p.cell(a, b)[x].clone(),
                )),
            };
        }
    }
    HomTense {
        holds: true,
        witness: None,
    }
}

/// `Id ⊗ P → P`, `[h ⊗ x] ↦ P(a, h)(x)`.
pub fn left_unitor(p: &Arc<Profunctor>) -> Result<ProfMorphism> {
    let id = Arc::new(identity_prof(&p.dst));
    let comp = compose(&id, p)?;
    let cb = p.dst.clone();
    comp.morphism_from_generators(p, |a, c, b, x, h| {
        let g = cb.hom(b, c).start + h;
        Ok(p.right[g][a][x])
    })
}

/// `P ⊗ Id → P`, `[x ⊗ h] ↦ P(h, b)(x)`.
pub fn right_unitor(p: &Arc<Profunctor>) -> Result<ProfMorphism> {
    let id = Arc::new(identity_prof(&p.src));
    let comp = compose(p, &id)?;
    let ca = p.src.clone();
    comp.morphism_from_generators(p, |a, b, a2, h, x| {
        let f = ca.hom(a, a2).start + h;
        Ok(p.left[f][b][x])
    })
}

/// `(R ⊗ Q) ⊗ P → R ⊗ (Q ⊗ P)`, `[[z ⊗ y] ⊗ x] ↦ [z ⊗ [y ⊗ x]]`.
pub fn associator(r: &Arc<Profunctor>, q: &Arc<Profunctor>, p: &Arc<Profunctor>) -> Result<ProfMorphism> {
    let rq = compose(r, q)?;
    let left = compose(&rq.value, p)?;
    let qp = compose(q, p)?;
    let right = compose(r, &qp.value)?;
    // well-definedness must hold for every inner representative, not only the canonical one
    let v = &left.value;
    let mut comps = Vec::new();
    for a in v.src.objects() {
        for d in v.dst.objects() {
            let co = left.coend(a, d);
            let mut row = vec![usize::MAX; co.class_count()];
            for g in 0..co.generator_count() {
                let (b, x, w) = co.generator(g);
                let cl = co.class_of_generator(g);
                let inner = rq.coend(b, d);
                for ig in 0..inner.generator_count() {
                    if inner.class_of_generator(ig) != w {
                        continue;
                    }
                    let (c, y, z) = inner.generator(ig);
                    let img = right.class(a, d, c, qp.class(a, c, b, x, y), z);
                    if row[cl] == usize::MAX {
                        row[cl] = img;
                    } else if row[cl] != img {
                        return Err(Error::NotWellDefined(v.cell(a, d)[cl].clone()));
                    }
                }
            }
            comps.push(row);
        }
    }
    ProfMorphism::new(left.value.clone(), right.value.clone(), comps)
}

/// `⌈m⌉: P → Q ⦸ R` for `m: Q ⊗ P → R`, sending `x ∈ P(a, b)` to the family
/// `y ↦ m[y ⊗ x]`.
pub fn hom_transpose(comp: &Composite, hom: &HomProf, m: &ProfMorphism) -> Result<ProfMorphism> {
    let (p, q) = (&comp.p, &comp.q);
    let cc = q.dst.clone();
    let mut comps = Vec::with_capacity(p.cells.len());
    for a in p.src.objects() {
        for b in p.dst.objects() {
            let mut row = Vec::with_capacity(p.size(a, b));
            for x in 0..p.size(a, b) {
                let fam: Vec<Vec<usize>> = cc
                    .objects()
                    .map(|c| (0..q.size(b, c)).map(|y| m.apply(a, c, comp.class(a, c, b, x, y))).collect())
                    .collect();
                row.push(hom.lookup(a, b, &fam).ok_or_else(|| {
                    Error::NotWellDefined(format!("transpose of {} is not natural", p.cell(a, b)[x]))
                })?);
            }
            comps.push(row);
        }
    }
    ProfMorphism::new(p.clone(), hom.value.clone(), comps)
}

/// Inverse of [`hom_transpose`]: `[y ⊗ x] ↦ n(x)(y)`.
pub fn hom_untranspose(
    comp: &Composite,
    hom: &HomProf,
    target: &Arc<Profunctor>,
    n: &ProfMorphism,
) -> Result<ProfMorphism> {
    comp.morphism_from_generators(target, |a, c, b, x, y| Ok(hom.family(a, b, n.apply(a, b, x))[c][y]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presheaf::fixtures::*;

    fn d2() -> Arc<FinCategory> {
        Arc::new(FinCategory::discrete(&["a0", "a1"]))
    }

    /// Discrete profunctor with the given cell sizes.
    pub(crate) fn discrete(a: &Arc<FinCategory>, b: &Arc<FinCategory>, sizes: &[&[usize]], tag: &str) -> Arc<Profunctor> {
        let cells = sizes
            .iter()
            .flat_map(|row| row.iter().copied())
            .enumerate()
            .map(|(i, n)| (0..n).map(|k| format!("{}{}_{}", tag, i, k)).collect())
            .collect();
        Arc::new(Profunctor::from_fn(a.clone(), b.clone(), cells, |_, _, x| x, |_, _, x| x))
    }

    #[test]
    fn discrete_composition_is_matrix_product() {
        let d = d2();
        let p = discrete(&d, &d, &[&[1, 2], &[0, 1]], "p");
        let q = discrete(&d, &d, &[&[2, 0], &[3, 1]], "q");
        let c = compose(&q, &p).unwrap();
        assert_eq!(c.value.size(0, 0), 8);
        assert_eq!(c.value.cell_sizes(), vec![vec![8, 2], vec![3, 1]]);
    }

    #[test]
    fn identity_is_unit() {
        let a = arr();
        let id = Arc::new(identity_prof(&a));
        assert_eq!(id.cell(0, 1), ["e"]);
        let c = compose(&id, &id).unwrap();
        assert_eq!(c.value.cell_sizes(), id.cell_sizes());
        assert!(left_unitor(&id).unwrap().is_iso());
        assert!(right_unitor(&id).unwrap().is_iso());
        let d = d2();
        assert_eq!(identity_prof(&d).cell_sizes(), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn tensor_with_hom_is_identity() {
        let a = arr();
        let phi = phi_arr(&a);
        let id = identity_prof(&a);
        let t = tensor_presheaf(&id, &phi).unwrap();
        assert_eq!((t.value.size(0), t.value.size(1)), (1, 2));
    }

    #[test]
    fn discrete_homs_match_power_formulas() {
        let d = d2();
        let q = discrete(&d, &d, &[&[1, 2], &[0, 1]], "q");
        let r = discrete(&d, &d, &[&[2, 1], &[3, 2]], "r");
        let lh = left_hom(&q, &r).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let expected: usize = (0..2).map(|c| r.size(a, c).pow(q.size(b, c) as u32)).product();
                assert_eq!(lh.value.size(a, b), expected);
            }
        }
        let p = q.clone();
        let rh = right_hom(&r, &p).unwrap();
        for b in 0..2 {
            for c in 0..2 {
                let expected: usize = (0..2).map(|a| r.size(a, c).pow(p.size(a, b) as u32)).product();
                assert_eq!(rh.value.size(b, c), expected);
            }
        }
    }

    #[test]
    fn empty_rows_give_singleton_homs() {
        let d = d2();
        let q = discrete(&d, &d, &[&[0, 0], &[0, 0]], "q");
        let r = discrete(&d, &d, &[&[0, 1], &[0, 0]], "r");
        let lh = left_hom(&q, &r).unwrap();
        assert_eq!(lh.value.cell_sizes(), vec![vec![1, 1], vec![1, 1]]);
    }

    #[test]
    fn right_hom_with_identity() {
        let a = arr();
        let id = Arc::new(identity_prof(&a));
        let rh = right_hom(&id, &id).unwrap();
        assert_eq!(rh.value.cell_sizes(), id.cell_sizes());
    }

    #[test]
    fn transpose_is_involutive() {
        let a = arr();
        let id = identity_prof(&a);
        let t = transpose(&id);
        let back = transpose(&t);
        assert_eq!(back, id);
        let d = d2();
        let p = discrete(&d, &d, &[&[1, 2], &[0, 3]], "p");
        assert_eq!(transpose(&p).cell_sizes(), vec![vec![1, 0], vec![2, 3]]);
    }

    #[test]
    fn component_test_fixtures() {
        let a = arr();
        assert!(hom_tense_check(&identity_prof(&a)).holds);
        let one = Arc::new(FinCategory::terminal());
        // P(0, •) = 1, P(1, •) = ∅
        let p = Profunctor::from_fn(a.clone(), one, vec![vec!["p".into()], vec![]], |_, _, x| x, |_, _, x| x);
        let h = hom_tense_check(&p);
        assert!(!h.holds);
        assert_eq!(h.witness.unwrap().0, "e");
    }

    #[test]
    fn presheaf_round_trip() {
        let a = arr();
        let id = identity_prof(&a);
        let ph = id.to_presheaf();
        ph.check().unwrap();
        let back = Profunctor::from_presheaf(&a, &a, &ph).unwrap();
        assert_eq!(back, id);
    }

    #[test]
    fn associator_is_iso_on_arrow() {
        let a = arr();
        let id = Arc::new(identity_prof(&a));
        assert!(associator(&id, &id, &id).unwrap().is_iso());
    }

    #[test]
    fn enumerated_morphisms_are_natural() {
        let a = arr();
        let id = Arc::new(identity_prof(&a));
        let ms = prof_morphisms(&id, &id, natenum::DEFAULT_BOUND).unwrap();
        // endomorphisms of the hom profunctor correspond to the centre: only the identity here
        assert_eq!(ms.len(), 1);
        ms[0].check().unwrap();
    }

    #[test]
    fn hom_transpose_round_trips() {
        let a = arr();
        let id = Arc::new(identity_prof(&a));
        let comp = compose(&id, &id).unwrap();
        let hom = left_hom(&id, &id).unwrap();
        let ms = prof_morphisms(&comp.value, &id, natenum::DEFAULT_BOUND).unwrap();
        assert!(!ms.is_empty());
        for m in &ms {
            let up = hom_transpose(&comp, &hom, m).unwrap();
            let down = hom_untranspose(&comp, &hom, &id, &up).unwrap();
            assert_eq!(down.components(), m.components());
        }
    }
}
