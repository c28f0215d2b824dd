//! Coends of finite set-valued functors, computed as connected components of
//! the category of elements with a union-find structure.

use crate::fincat::{FinCategory, Mor, Obj};

/// Disjoint sets with path halving; the root of a class is not meaningful,
/// use [`UnionFind::classes`] for canonical labels.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when two different classes were merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }

    /// Class label of every element, classes numbered by their least member,
    /// together with that least member for each class.
    pub fn classes(&mut self) -> (Vec<usize>, Vec<usize>) {
        let n = self.parent.len();
        let mut label_of_root = vec![usize::MAX; n];
        let mut labels = vec![0; n];
        let mut reps = Vec::new();
        for x in 0..n {
            let r = self.find(x);
            if label_of_root[r] == usize::MAX {
                label_of_root[r] = reps.len();
                reps.push(x);
            }
            labels[x] = label_of_root[r];
        }
        (labels, reps)
    }
}

/// A functor on a finite category, viewed through sizes and an action.
/// Covariant families act along `f: a → b` as `F(a) → F(b)`; contravariant
/// ones as `F(b) → F(a)`.
pub trait Family {
    fn size(&self, a: Obj) -> usize;
    fn act(&self, f: Mor, x: usize) -> usize;
}

/// Family given by explicit tables.
#[derive(Clone, Debug, Default)]
pub struct TableFamily {
    pub sizes: Vec<usize>,
    pub action: Vec<Vec<usize>>,
}

impl Family for TableFamily {
    fn size(&self, a: Obj) -> usize {
        self.sizes[a]
    }

    fn act(&self, f: Mor, x: usize) -> usize {
        self.action[f][x]
    }
}

/// The coend `∫^c K(c) × L(c)` for contravariant `K` and covariant `L`.
/// Generators `(c, l, k)` are numbered object-major, then by `l`, then by `k`;
/// each class is represented by its least generator.
#[derive(Clone, Debug)]
pub struct Coend {
    offsets: Vec<usize>,
    k_sizes: Vec<usize>,
    class_of: Vec<usize>,
    reps: Vec<usize>,
}

impl Coend {
    /// Computes the coend over the morphisms of `shape`. Only the morphisms are
    /// used, so any generating set of arrows gives the same quotient.
    pub fn compute<K: Family, L: Family>(shape: &FinCategory, k: &K, l: &L) -> Coend {
        let arrows: Vec<(Obj, Obj, Mor)> = shape
            .morphisms()
            .filter(|&f| !shape.is_identity(f))
            .map(|f| (shape.src(f), shape.dst(f), f))
            .collect();
        Coend::over_arrows(shape.object_count(), &arrows, k, l)
    }

    /// Coend over an explicit list of arrows `(src, dst, label)`; `label` is
    /// what gets passed to the families' `act`.
    pub fn over_arrows<K: Family, L: Family>(
        objects: usize,
        arrows: &[(Obj, Obj, Mor)],
        k: &K,
        l: &L,
    ) -> Coend {
        let mut offsets = Vec::with_capacity(objects + 1);
        let mut k_sizes = Vec::with_capacity(objects);
        let mut total = 0;
        for c in 0..objects {
            offsets.push(total);
            k_sizes.push(k.size(c));
            total += k.size(c) * l.size(c);
        }
        offsets.push(total);
        let mut uf = UnionFind::new(total);
        for &(c, d, f) in arrows {
            let (kd, lc) = (k.size(d), l.size(c));
            if kd == 0 || lc == 0 {
                continue;
            }
            let kc = k_sizes[c];
            for kk in 0..kd {
                let pulled = k.act(f, kk);
                for ll in 0..lc {
                    let pushed = l.act(f, ll);
                    let left = offsets[c] + ll * kc + pulled;
                    let right = offsets[d] + pushed * kd + kk;
                    uf.union(left, right);
                }
            }
        }
        let (class_of, reps) = uf.classes();
        Coend {
            offsets,
            k_sizes,
            class_of,
            reps,
        }
    }

    pub fn class_count(&self) -> usize {
        self.reps.len()
    }

    pub fn generator_count(&self) -> usize {
        self.class_of.len()
    }

    /// Class of the generator `(c, l, k)`.
    pub fn class(&self, c: Obj, l: usize, k: usize) -> usize {
        self.class_of[self.offsets[c] + l * self.k_sizes[c] + k]
    }

    /// Generator `(c, l, k)` with a given flat index.
    pub fn generator(&self, g: usize) -> (Obj, usize, usize) {
        let c = match self.offsets.binary_search(&g) {
            Ok(mut i) => {
                while self.offsets[i + 1] == g {
                    i += 1;
                }
                i
            }
            Err(i) => i - 1,
        };
        let r = g - self.offsets[c];
        (c, r / self.k_sizes[c], r % self.k_sizes[c])
    }

    /// Least generator of a class.
    pub fn representative(&self, class: usize) -> (Obj, usize, usize) {
        self.generator(self.reps[class])
    }

    pub fn class_of_generator(&self, g: usize) -> usize {
        self.class_of[g]
    }

    /// All generators of every class, grouped by class.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.reps.len()];
        for (g, &c) in self.class_of.iter().enumerate() {
            out[c].push(g);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn union_find_labels_by_least_member() {
        let mut uf = UnionFind::new(5);
        uf.union(3, 1);
        uf.union(4, 0);
        let (labels, reps) = uf.classes();
        assert_eq!(labels, vec![0, 1, 2, 1, 0]);
        assert_eq!(reps, vec![0, 1, 2]);
    }

    #[test]
    fn discrete_coend_is_sum_of_products() {
        let d = FinCategory::discrete(&["a", "b"]);
        let k = TableFamily {
            sizes: vec![2, 3],
            action: vec![vec![0, 1], vec![0, 1, 2]],
        };
        let l = TableFamily {
            sizes: vec![1, 2],
            action: vec![vec![0], vec![0, 1]],
        };
        let c = Coend::compute(&d, &k, &l);
        assert_eq!(c.class_count(), 2 + 6);
        for g in 0..c.generator_count() {
            let (o, ll, kk) = c.generator(g);
            assert_eq!(c.class(o, ll, kk), c.class_of_generator(g));
        }
    }

    #[test]
    fn arrow_coend_identifies_along_e() {
        // K = hom(-, 1) contravariant: K(0) = {e}, K(1) = {id1}; L = {x} ↦ {y, z}
        let arr = Arc::new(FinCategory::arrow());
        let e = arr.find_morphism("e").unwrap();
        let mut kact = vec![vec![]; 3];
        let mut lact = vec![vec![]; 3];
        for f in arr.morphisms() {
            kact[f] = vec![0];
            lact[f] = if f == e { vec![0] } else if arr.src(f) == 0 { vec![0] } else { vec![0, 1] };
        }
        let k = TableFamily { sizes: vec![1, 1], action: kact };
        let l = TableFamily { sizes: vec![1, 2], action: lact };
        let c = Coend::compute(&arr, &k, &l);
        // (0, x, e) ~ (1, y, id1): classes {x~y}, {z}
        assert_eq!(c.class_count(), 2);
        assert_eq!(c.class(0, 0, 0), c.class(1, 0, 0));
    }
}
