//! Guarded enumeration of natural families between finite set-valued functors.
//!
//! Both functors are given as [`Family`] values over the same list of arrows;
//! a family `α` must satisfy `α(dst(f), F f x) = G f (α(src(f), x))` for every
//! arrow `f`. Contravariant problems are expressed by listing reversed arrows.
//! Any generating set of arrows works: assignments propagate transitively.

use crate::coend::Family;
use crate::error::{Error, Result};
use crate::fincat::{Mor, Obj};

/// Default cap on the size of the raw candidate space.
pub const DEFAULT_BOUND: u128 = 1_000_000;

/// Number of raw candidate functions `Π_a |G a|^{|F a|}`, saturating.
pub fn candidate_count<S: Family, D: Family>(objects: usize, src: &S, dst: &D) -> Option<u128> {
    let mut total: u128 = 1;
    for a in 0..objects {
        let (s, d) = (src.size(a), dst.size(a));
        if s > 0 && d == 0 {
            return Some(0);
        }
        for _ in 0..s {
            total = total.checked_mul(d as u128)?;
        }
    }
    Some(total)
}

/// All natural families, in lexicographic order of their image lists
/// (objects in order, elements in order).
pub fn enumerate<S: Family, D: Family>(
    objects: usize,
    arrows: &[(Obj, Obj, Mor)],
    src: &S,
    dst: &D,
    bound: u128,
) -> Result<Vec<Vec<Vec<usize>>>> {
    match candidate_count(objects, src, dst) {
        Some(0) => return Ok(Vec::new()),
        Some(c) if c <= bound => {}
        Some(c) => {
            return Err(Error::SizeGuardExceeded {
                candidates: c.to_string(),
                bound,
            })
        }
        None => {
            return Err(Error::SizeGuardExceeded {
                candidates: "more than 2^128".into(),
                bound,
            })
        }
    }
    let mut out_arrows: Vec<Vec<(Obj, Mor)>> = vec![Vec::new(); objects];
    for &(a, b, f) in arrows {
        out_arrows[a].push((b, f));
    }
    let order: Vec<(Obj, usize)> = (0..objects)
        .flat_map(|a| (0..src.size(a)).map(move |x| (a, x)))
        .collect();
    let mut assign: Vec<Vec<Option<usize>>> =
        (0..objects).map(|a| vec![None; src.size(a)]).collect();
    let mut results = Vec::new();
    let mut trail: Vec<(Obj, usize)> = Vec::new();
    search(
        0,
        &order,
        &out_arrows,
        src,
        dst,
        &mut assign,
        &mut trail,
        &mut results,
    );
    Ok(results)
}

#[allow(clippy::too_many_arguments)]
fn search<S: Family, D: Family>(
    pos: usize,
    order: &[(Obj, usize)],
    out_arrows: &[Vec<(Obj, Mor)>],
    src: &S,
    dst: &D,
    assign: &mut Vec<Vec<Option<usize>>>,
    trail: &mut Vec<(Obj, usize)>,
    results: &mut Vec<Vec<Vec<usize>>>,
) {
    let mut pos = pos;
    while pos < order.len() && assign[order[pos].0][order[pos].1].is_some() {
        pos += 1;
    }
    if pos == order.len() {
        results.push(
            assign
                .iter()
                .map(|row| row.iter().map(|v| v.unwrap()).collect())
                .collect(),
        );
        return;
    }
    let (a, x) = order[pos];
    for v in 0..dst.size(a) {
        let mark = trail.len();
        assign[a][x] = Some(v);
        trail.push((a, x));
        let mut ok = true;
        let mut frontier = vec![(a, x, v)];
        'prop: while let Some((c, y, w)) = frontier.pop() {
            for &(d, f) in &out_arrows[c] {
                let y2 = src.act(f, y);
                let w2 = dst.act(f, w);
                match assign[d][y2] {
                    Some(existing) if existing != w2 => {
                        ok = false;
                        break 'prop;
                    }
                    Some(_) => {}
                    None => {
                        assign[d][y2] = Some(w2);
                        trail.push((d, y2));
                        frontier.push((d, y2, w2));
                    }
                }
            }
        }
        if ok {
            search(pos + 1, order, out_arrows, src, dst, assign, trail, results);
        }
        while trail.len() > mark {
            let (b, y) = trail.pop().unwrap();
            assign[b][y] = None;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coend::TableFamily;

    #[test]
    fn discrete_count_is_power() {
        let s = TableFamily {
            sizes: vec![2, 1],
            action: vec![],
        };
        let d = TableFamily {
            sizes: vec![3, 2],
            action: vec![],
        };
        let all = enumerate(2, &[], &s, &d, DEFAULT_BOUND).unwrap();
        assert_eq!(all.len(), 9 * 2);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn guard_fires() {
        let s = TableFamily {
            sizes: vec![30],
            action: vec![],
        };
        let d = TableFamily {
            sizes: vec![3],
            action: vec![],
        };
        assert!(matches!(
            enumerate(1, &[], &s, &d, DEFAULT_BOUND),
            Err(Error::SizeGuardExceeded { .. })
        ));
    }

    #[test]
    fn empty_source_has_one_family() {
        let s = TableFamily {
            sizes: vec![0],
            action: vec![],
        };
        let d = TableFamily {
            sizes: vec![0],
            action: vec![],
        };
        assert_eq!(enumerate(1, &[], &s, &d, DEFAULT_BOUND).unwrap().len(), 1);
    }
}
