//! JSON forms of every value, parsed with pointer-located errors and
//! serialized in canonical order.
//!
//! A category is either a table `{"objects", "morphisms", "compose",
//! "identities"}`, a generated header `{"generated": {"kind", "base",
//! "maxArity"}}`, or one of the names `"1"`, `"Arr"`, `"D2"`, `"cospan"`,
//! `"idempotent"`, `"chain:N"`, `"discrete:N"`, `"cyclic:N"`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::analytic::{generated, SymmetricSequence};
use crate::error::{Error, Result};
use crate::fincat::{seq_name, validate_category, CategoryDesc, FinCategory, MorphismDesc, Obj, SeqMode};
use crate::funcalc::{FunctorExpr, TenseCertificate};
use crate::presheaf::{NatTrans, Presheaf, Subobject};
use crate::prof::{ProfMorphism, Profunctor};

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

/// A value together with its JSON pointer.
struct Node<'a> {
    v: &'a Value,
    ptr: String,
}

impl<'a> Node<'a> {
    fn root(v: &'a Value) -> Node<'a> {
        Node { v, ptr: String::new() }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::schema(if self.ptr.is_empty() { "/".to_string() } else { self.ptr.clone() }, msg)
    }

    fn child(&self, key: &str, v: &'a Value) -> Node<'a> {
        Node {
            v,
            ptr: format!("{}/{}", self.ptr, escape(key)),
        }
    }

    fn get(&self, key: &str) -> Option<Node<'a>> {
        self.v.get(key).map(|v| self.child(key, v))
    }

    fn field(&self, key: &str) -> Result<Node<'a>> {
        self.get(key)
            .ok_or_else(|| Error::schema(format!("{}/{}", self.ptr, escape(key)), "missing field"))
    }

    fn str(&self) -> Result<&'a str> {
        self.v.as_str().ok_or_else(|| self.err("expected a string"))
    }

    fn usize(&self) -> Result<usize> {
        self.v
            .as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| self.err("expected a non-negative integer"))
    }

    fn items(&self) -> Result<Vec<Node<'a>>> {
        let arr = self.v.as_array().ok_or_else(|| self.err("expected an array"))?;
        Ok(arr
            .iter()
            .enumerate()
            .map(|(i, v)| self.child(&i.to_string(), v))
            .collect())
    }

    fn entries(&self) -> Result<Vec<(&'a str, Node<'a>)>> {
        let map = self.v.as_object().ok_or_else(|| self.err("expected an object"))?;
        Ok(map.iter().map(|(k, v)| (k.as_str(), self.child(k, v))).collect())
    }

    fn strings(&self) -> Result<Vec<String>> {
        self.items()?.iter().map(|n| n.str().map(str::to_string)).collect()
    }
}

/// Parses a JSON string into a value.
pub fn parse_str(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::schema("/", format!("invalid JSON: {}", e)))
}

/// Pretty, key-sorted rendering.
pub fn render(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values always serialize")
}

// ---------------------------------------------------------------- categories

pub fn builtin_category(name: &str) -> Option<FinCategory> {
    let sized = |prefix: &str| name.strip_prefix(prefix).and_then(|n| n.parse::<usize>().ok());
    Some(match name {
        "1" | "terminal" => FinCategory::terminal(),
        "Arr" | "arrow" => FinCategory::arrow(),
        "D2" => FinCategory::discrete(&["a0", "a1"]),
        "cospan" => FinCategory::poset(&["x", "y", "z"], &[(0, 2), (1, 2)], |a, b| {
            let n = ["x", "y", "z"];
            if a == b {
                format!("id{}", n[a])
            } else {
                format!("{}{}", n[a], n[b])
            }
        }),
        "idempotent" => FinCategory::idempotent(),
        _ => {
            if let Some(n) = sized("chain:") {
                FinCategory::chain(n)
            } else if let Some(n) = sized("cyclic:").filter(|&n| n > 0) {
                FinCategory::cyclic_group(n)
            } else if let Some(n) = sized("discrete:") {
                let names: Vec<String> = (0..n).map(|i| format!("a{}", i)).collect();
                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                FinCategory::discrete(&refs)
            } else {
                return None;
            }
        }
    })
}

pub fn category_from_json(v: &Value) -> Result<Arc<FinCategory>> {
    category_node(&Node::root(v))
}

fn category_node(n: &Node) -> Result<Arc<FinCategory>> {
    if let Some(name) = n.v.as_str() {
        return builtin_category(name)
            .map(Arc::new)
            .ok_or_else(|| n.err(format!("unknown category name {}", name)));
    }
    if let Some(g) = n.get("generated") {
        let mode = match g.field("kind")?.str()? {
            "bang" => SeqMode::Strict,
            "down" => SeqMode::Soft,
            other => return Err(g.field("kind")?.err(format!("unknown kind {}", other))),
        };
        let base = category_node(&g.field("base")?)?;
        let max = g.field("maxArity")?.usize()?;
        return Ok(generated(&base, max, mode));
    }
    let objects = n.field("objects")?.strings()?;
    let mut morphisms = Vec::new();
    for m in n.field("morphisms")?.items()? {
        morphisms.push(MorphismDesc {
            id: m.field("id")?.str()?.to_string(),
            src: m.field("src")?.str()?.to_string(),
            dst: m.field("dst")?.str()?.to_string(),
        });
    }
    let mut compose = Vec::new();
    if let Some(c) = n.get("compose") {
        for t in c.items()? {
            let parts = t.strings()?;
            let triple: [String; 3] = parts
                .try_into()
                .map_err(|_| t.err("expected [g, f, g∘f]"))?;
            compose.push(triple);
        }
    }
    let mut identities = BTreeMap::new();
    if let Some(ids) = n.get("identities") {
        for (o, m) in ids.entries()? {
            identities.insert(o.to_string(), m.str()?.to_string());
        }
    }
    let desc = CategoryDesc {
        objects,
        morphisms,
        compose,
        identities,
    };
    Ok(Arc::new(validate_category(&desc)?))
}

pub fn category_to_json(c: &FinCategory) -> Value {
    if let Some(info) = c.seq_info() {
        return json!({
            "generated": {
                "kind": info.mode.tag(),
                "base": category_to_json(&info.base),
                "maxArity": info.max_arity,
            }
        });
    }
    serde_json::to_value(c.to_desc()).expect("descriptions serialize")
}

// ---------------------------------------------------------------- lookups

fn object_of(c: &FinCategory, n: &Node, name: &str) -> Result<Obj> {
    c.find_object(name).map_err(|_| n.err(format!("unknown object {}", name)))
}

fn index_labels(labels: &[String]) -> HashMap<&str, usize> {
    labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect()
}

/// Reads `{elem: elem}` into a total table over `src`.
fn read_map(n: &Node, src: &[String], dst: &[String]) -> Result<Vec<usize>> {
    let (si, di) = (index_labels(src), index_labels(dst));
    let mut row = vec![usize::MAX; src.len()];
    for (k, v) in n.entries()? {
        let x = *si.get(k).ok_or_else(|| v.err(format!("unknown source element {}", k)))?;
        let target = v.str()?;
        row[x] = *di
            .get(target)
            .ok_or_else(|| v.err(format!("unknown target element {}", target)))?;
    }
    if let Some(x) = row.iter().position(|&y| y == usize::MAX) {
        return Err(n.err(format!("no image for element {}", src[x])));
    }
    Ok(row)
}

fn write_map(src: &[String], dst: &[String], row: &[usize]) -> Value {
    let map: Map<String, Value> = row
        .iter()
        .enumerate()
        .map(|(x, &y)| (src[x].clone(), Value::String(dst[y].clone())))
        .collect();
    Value::Object(map)
}

fn sorted(mut v: Vec<String>) -> Vec<String> {
    v.sort();
    v
}

fn read_ids(n: &Node) -> Result<Vec<String>> {
    let ids = sorted(n.strings()?);
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(n.err(format!("duplicate element {}", w[0])));
    }
    Ok(ids)
}

// ---------------------------------------------------------------- presheaves

pub fn presheaf_from_json(v: &Value) -> Result<Arc<Presheaf>> {
    presheaf_node(&Node::root(v))
}

fn presheaf_node(n: &Node) -> Result<Arc<Presheaf>> {
    let base = category_node(&n.field("base")?)?;
    let mut elems = vec![Vec::new(); base.object_count()];
    let en = n.field("elems")?;
    for (o, ids) in en.entries()? {
        elems[object_of(&base, &ids, o)?] = read_ids(&ids)?;
    }
    let mut action: Vec<Option<Vec<usize>>> = vec![None; base.morphism_count()];
    if let Some(an) = n.get("action") {
        for (m, map) in an.entries()? {
            let f = base
                .find_morphism(m)
                .map_err(|_| map.err(format!("unknown morphism {}", m)))?;
            action[f] = Some(read_map(&map, &elems[base.src(f)], &elems[base.dst(f)])?);
        }
    }
    let mut table = Vec::with_capacity(action.len());
    for (f, row) in action.into_iter().enumerate() {
        match row {
            Some(r) => table.push(r),
            None if base.is_identity(f) => table.push((0..elems[base.src(f)].len()).collect()),
            None if elems[base.src(f)].is_empty() => table.push(Vec::new()),
            None => {
                return Err(Error::schema(
                    format!("{}/action/{}", n.ptr, escape(base.morphism_name(f))),
                    "missing action",
                ))
            }
        }
    }
    Ok(Arc::new(Presheaf::new(base, elems, table)?))
}

fn elems_json(p: &Presheaf, members: impl Fn(Obj) -> Vec<usize>) -> Value {
    let c = p.base();
    let map: Map<String, Value> = c
        .objects()
        .map(|a| {
            let ids = sorted(members(a).into_iter().map(|x| p.label(a, x).to_string()).collect());
            (c.object_name(a).to_string(), json!(ids))
        })
        .collect();
    Value::Object(map)
}

pub fn presheaf_to_json(p: &Presheaf) -> Value {
    let c = p.base();
    let action: Map<String, Value> = c
        .morphisms()
        .filter(|&f| !c.is_identity(f))
        .map(|f| {
            (
                c.morphism_name(f).to_string(),
                write_map(p.labels(c.src(f)), p.labels(c.dst(f)), p.action(f)),
            )
        })
        .collect();
    json!({
        "base": category_to_json(c),
        "elems": elems_json(p, |a| (0..p.size(a)).collect()),
        "action": action,
    })
}

pub fn subobject_to_json(s: &Subobject) -> Value {
    json!({
        "parent": presheaf_to_json(s.parent()),
        "subset": elems_json(s.parent(), |a| s.members(a)),
    })
}

pub fn subobject_from_json(v: &Value) -> Result<Subobject> {
    let n = Node::root(v);
    let parent = presheaf_node(&n.field("parent")?)?;
    let mut subset = vec![Vec::new(); parent.base().object_count()];
    for (o, ids) in n.field("subset")?.entries()? {
        let a = object_of(parent.base(), &ids, o)?;
        let idx = index_labels(parent.labels(a));
        for id in ids.items()? {
            let s = id.str()?;
            subset[a].push(*idx.get(s).ok_or_else(|| id.err(format!("unknown element {}", s)))?);
        }
    }
    Subobject::from_elements(parent, &subset)
}

pub fn nat_to_json(t: &NatTrans) -> Value {
    let (s, d) = (t.src(), t.dst());
    let comps: Map<String, Value> = s
        .base()
        .objects()
        .map(|a| (s.base().object_name(a).to_string(), write_map(s.labels(a), d.labels(a), t.component(a))))
        .collect();
    json!({
        "src": presheaf_to_json(s),
        "dst": presheaf_to_json(d),
        "components": comps,
    })
}

pub fn nat_from_json(v: &Value) -> Result<NatTrans> {
    let n = Node::root(v);
    let src = presheaf_node(&n.field("src")?)?;
    let dst = presheaf_node(&n.field("dst")?)?;
    let base = src.base().clone();
    let mut comps: Vec<Option<Vec<usize>>> = vec![None; base.object_count()];
    let cn = n.field("components")?;
    for (o, map) in cn.entries()? {
        let a = object_of(&base, &map, o)?;
        comps[a] = Some(read_map(&map, src.labels(a), dst.labels(a))?);
    }
    let comps = comps
        .into_iter()
        .enumerate()
        .map(|(a, c)| match c {
            Some(r) => Ok(r),
            None if src.size(a) == 0 => Ok(Vec::new()),
            None => Err(cn.err(format!("missing component at {}", base.object_name(a)))),
        })
        .collect::<Result<Vec<_>>>()?;
    NatTrans::new(src, dst, comps)
}

// ---------------------------------------------------------------- profunctors

/// Cell keys `(a,b)` using display names.
fn cell_key(a: &str, b: &str) -> String {
    format!("({},{})", a, b)
}

fn src_name(c: &FinCategory, a: Obj) -> String {
    match c.seq_info() {
        Some(info) => seq_name(&info.base, info.entries(a)),
        None => c.object_name(a).to_string(),
    }
}

pub fn profunctor_to_json(p: &Profunctor) -> Value {
    let mut v = profunctor_body(p);
    v["src"] = category_to_json(p.src());
    v["dst"] = category_to_json(p.dst());
    v
}

fn profunctor_body(p: &Profunctor) -> Value {
    let (ca, cb) = (p.src(), p.dst());
    let mut cells = Map::new();
    for a in ca.objects() {
        for b in cb.objects() {
            cells.insert(cell_key(&src_name(ca, a), cb.object_name(b)), json!(sorted(p.cell(a, b).to_vec())));
        }
    }
    let mut left = Map::new();
    for f in ca.morphisms().filter(|&f| !ca.is_identity(f)) {
        let (a2, a) = (ca.src(f), ca.dst(f));
        let per_b: Map<String, Value> = cb
            .objects()
            .map(|b| {
                let row: Vec<usize> = (0..p.size(a, b)).map(|x| p.left_act(f, b, x)).collect();
                (cb.object_name(b).to_string(), write_map(p.cell(a, b), p.cell(a2, b), &row))
            })
            .collect();
        left.insert(ca.morphism_name(f).to_string(), Value::Object(per_b));
    }
    let mut right = Map::new();
    for g in cb.morphisms().filter(|&g| !cb.is_identity(g)) {
        let (b, b2) = (cb.src(g), cb.dst(g));
        let per_a: Map<String, Value> = ca
            .objects()
            .map(|a| {
                let row: Vec<usize> = (0..p.size(a, b)).map(|x| p.right_act(g, a, x)).collect();
                (src_name(ca, a), write_map(p.cell(a, b), p.cell(a, b2), &row))
            })
            .collect();
        right.insert(cb.morphism_name(g).to_string(), Value::Object(per_a));
    }
    json!({ "cells": cells, "leftAction": left, "rightAction": right })
}

fn profunctor_tables(n: &Node, ca: &Arc<FinCategory>, cb: &Arc<FinCategory>) -> Result<Profunctor> {
    let nb = cb.object_count();
    let mut keys = HashMap::new();
    for a in ca.objects() {
        for b in cb.objects() {
            keys.insert(cell_key(&src_name(ca, a), cb.object_name(b)), (a, b));
        }
    }
    let mut cells = vec![Vec::new(); ca.object_count() * nb];
    for (k, ids) in n.field("cells")?.entries()? {
        let &(a, b) = keys.get(k).ok_or_else(|| ids.err(format!("unknown cell {}", k)))?;
        cells[a * nb + b] = read_ids(&ids)?;
    }
    let src_names: HashMap<String, Obj> = ca.objects().map(|a| (src_name(ca, a), a)).collect();
    let mut left: Vec<Vec<Option<Vec<usize>>>> = vec![vec![None; nb]; ca.morphism_count()];
    if let Some(ln) = n.get("leftAction").or_else(|| n.get("seqAction")) {
        for (m, per_b) in ln.entries()? {
            let f = ca.find_morphism(m).map_err(|_| per_b.err(format!("unknown morphism {}", m)))?;
            let (a2, a) = (ca.src(f), ca.dst(f));
            for (bn, map) in per_b.entries()? {
                let b = object_of(cb, &map, bn)?;
                left[f][b] = Some(read_map(&map, &cells[a * nb + b], &cells[a2 * nb + b])?);
            }
        }
    }
    let mut right: Vec<Vec<Option<Vec<usize>>>> = vec![vec![None; ca.object_count()]; cb.morphism_count()];
    if let Some(rn) = n.get("rightAction").or_else(|| n.get("targetAction")) {
        for (m, per_a) in rn.entries()? {
            let g = cb.find_morphism(m).map_err(|_| per_a.err(format!("unknown morphism {}", m)))?;
            let (b, b2) = (cb.src(g), cb.dst(g));
            for (an, map) in per_a.entries()? {
                let a = *src_names.get(an).ok_or_else(|| map.err(format!("unknown object {}", an)))?;
                right[g][a] = Some(read_map(&map, &cells[a * nb + b], &cells[a * nb + b2])?);
            }
        }
    }
    let fill = |row: Option<Vec<usize>>, size: usize, identity: bool, ptr: String| match row {
        Some(r) => Ok(r),
        None if identity || size == 0 => Ok((0..size).collect()),
        None => Err(Error::schema(ptr, "missing action")),
    };
    let left = left
        .into_iter()
        .enumerate()
        .map(|(f, rows)| {
            rows.into_iter()
                .enumerate()
                .map(|(b, r)| {
                    let ptr = format!("{}/leftAction/{}/{}", n.ptr, escape(ca.morphism_name(f)), escape(cb.object_name(b)));
                    fill(r, cells[ca.dst(f) * nb + b].len(), ca.is_identity(f), ptr)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let right = right
        .into_iter()
        .enumerate()
        .map(|(g, rows)| {
            rows.into_iter()
                .enumerate()
                .map(|(a, r)| {
                    let ptr = format!("{}/rightAction/{}/{}", n.ptr, escape(cb.morphism_name(g)), escape(&src_name(ca, a)));
                    fill(r, cells[a * nb + cb.src(g)].len(), cb.is_identity(g), ptr)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Profunctor::new(ca.clone(), cb.clone(), cells, left, right)
}

pub fn profunctor_from_json(v: &Value) -> Result<Arc<Profunctor>> {
    profunctor_node(&Node::root(v))
}

fn profunctor_node(n: &Node) -> Result<Arc<Profunctor>> {
    let ca = category_node(&n.field("src")?)?;
    let cb = category_node(&n.field("dst")?)?;
    Ok(Arc::new(profunctor_tables(n, &ca, &cb)?))
}

pub fn prof_morphism_to_json(m: &ProfMorphism) -> Value {
    let (s, d) = (m.src(), m.dst());
    let (ca, cb) = (s.src(), s.dst());
    let mut comps = Map::new();
    for a in ca.objects() {
        for b in cb.objects() {
            let row: Vec<usize> = (0..s.size(a, b)).map(|x| m.apply(a, b, x)).collect();
            comps.insert(cell_key(&src_name(ca, a), cb.object_name(b)), write_map(s.cell(a, b), d.cell(a, b), &row));
        }
    }
    json!({ "src": profunctor_to_json(s), "dst": profunctor_to_json(d), "components": comps })
}

// ---------------------------------------------------------------- sequences

pub fn sequence_to_json(s: &SymmetricSequence) -> Value {
    let body = profunctor_body(s.prof());
    json!({
        "mode": match s.mode() { SeqMode::Strict => "strict", SeqMode::Soft => "soft" },
        "base": category_to_json(s.base()),
        "target": category_to_json(s.target()),
        "maxArity": s.max_arity(),
        "cells": body["cells"],
        "seqAction": body["leftAction"],
        "targetAction": body["rightAction"],
    })
}

pub fn sequence_from_json(v: &Value) -> Result<SymmetricSequence> {
    sequence_node(&Node::root(v))
}

/// Either full tables, or `"generators": [{"seq", "target", "label"}]` with
/// optional `"relations": [{"seq", "target", "left", "right"}]` identifying
/// elements of the free sequence.
fn sequence_node(n: &Node) -> Result<SymmetricSequence> {
    let mode_node = n.field("mode")?;
    let mode = match mode_node.str()? {
        "strict" => SeqMode::Strict,
        "soft" => SeqMode::Soft,
        other => return Err(mode_node.err(format!("unknown mode {}", other))),
    };
    let base = category_node(&n.field("base")?)?;
    let target = category_node(&n.field("target")?)?;
    let max = n.field("maxArity")?.usize()?;
    let gen = generated(&base, max, mode);
    let entries_of = |node: &Node| -> Result<Vec<Obj>> {
        node.strings()?.iter().map(|o| object_of(&base, node, o)).collect()
    };
    if let Some(gens) = n.get("generators") {
        let mut list = Vec::new();
        for g in gens.items()? {
            let t = g.field("target")?;
            list.push((entries_of(&g.field("seq")?)?, object_of(&target, &t, t.str()?)?, g.field("label")?.str()?.to_string()));
        }
        let free = SymmetricSequence::free(&gen, &target, &list)?;
        let Some(rels) = n.get("relations") else {
            return Ok(free);
        };
        let mut pairs = Vec::new();
        for r in rels.items()? {
            let entries = entries_of(&r.field("seq")?)?;
            let t = r.field("target")?;
            let b = object_of(&target, &t, t.str()?)?;
            let s = gen
                .seq_info()
                .and_then(|i| i.object_of(&entries))
                .ok_or_else(|| r.err("sequence longer than maxArity"))?;
            let labels = free.prof().cell(s, b);
            let find = |key: &str| -> Result<usize> {
                let node = r.field(key)?;
                let l = node.str()?;
                labels.iter().position(|x| x == l).ok_or_else(|| node.err(format!("unknown element {}", l)))
            };
            pairs.push((entries, b, find("left")?, find("right")?));
        }
        return free.quotient(&pairs);
    }
    SymmetricSequence::new(Arc::new(profunctor_tables(n, &gen, &target)?))
}

// ---------------------------------------------------------------- expressions

pub fn expr_to_json(f: &FunctorExpr) -> Value {
    use FunctorExpr::*;
    match f {
        Identity(a) => json!({ "kind": "Identity", "base": category_to_json(a) }),
        Constant { dom, value } => json!({ "kind": "Constant", "dom": category_to_json(dom), "value": presheaf_to_json(value) }),
        Linear(p) => json!({ "kind": "Linear", "profunctor": profunctor_to_json(p) }),
        Monomial(p) => json!({ "kind": "Monomial", "profunctor": profunctor_to_json(p) }),
        AnalyticStrict(s) => json!({ "kind": "AnalyticStrict", "sequence": sequence_to_json(s) }),
        AnalyticSoft(s) => json!({ "kind": "AnalyticSoft", "sequence": sequence_to_json(s) }),
        Sum(x, y) => json!({ "kind": "Sum", "left": expr_to_json(x), "right": expr_to_json(y) }),
        Product(x, y) => json!({ "kind": "Product", "left": expr_to_json(x), "right": expr_to_json(y) }),
        Compose(g, x) => json!({ "kind": "Compose", "outer": expr_to_json(g), "inner": expr_to_json(x) }),
    }
}

pub fn expr_from_json(v: &Value) -> Result<FunctorExpr> {
    expr_node(&Node::root(v))
}

fn expr_node(n: &Node) -> Result<FunctorExpr> {
    let kind_node = n.field("kind")?;
    let kind = kind_node.str()?;
    let pair = |a: &str, b: &str| -> Result<(FunctorExpr, FunctorExpr)> {
        Ok((expr_node(&n.field(a)?)?, expr_node(&n.field(b)?)?))
    };
    let located = |r: Result<FunctorExpr>| r.map_err(|e| match e {
        Error::EndpointMismatch => n.err("endpoints do not match"),
        other => other,
    });
    match kind {
        "Identity" => Ok(FunctorExpr::identity(&category_node(&n.field("base")?)?)),
        "Constant" => {
            let value = presheaf_node(&n.field("value")?)?;
            let dom = match n.get("dom") {
                Some(d) => category_node(&d)?,
                None => value.base().clone(),
            };
            Ok(FunctorExpr::constant(&dom, &value))
        }
        "Linear" => Ok(FunctorExpr::linear(&profunctor_node(&n.field("profunctor")?)?)),
        "Monomial" => Ok(FunctorExpr::monomial(&profunctor_node(&n.field("profunctor")?)?)),
        "Analytic" | "AnalyticStrict" | "AnalyticSoft" => {
            let s = sequence_node(&n.field("sequence")?)?;
            let want = match kind {
                "AnalyticStrict" => Some(SeqMode::Strict),
                "AnalyticSoft" => Some(SeqMode::Soft),
                _ => None,
            };
            if want.is_some_and(|m| m != s.mode()) {
                return Err(Error::ModeError {
                    expected: kind.trim_start_matches("Analytic").to_lowercase(),
                });
            }
            Ok(FunctorExpr::analytic(&s))
        }
        "Sum" => located(pair("left", "right").and_then(|(x, y)| FunctorExpr::sum(x, y))),
        "Product" => located(pair("left", "right").and_then(|(x, y)| FunctorExpr::product(x, y))),
        "Compose" => located(pair("outer", "inner").and_then(|(g, x)| FunctorExpr::compose(g, x))),
        "Shift" => {
            let base = category_node(&n.field("base")?)?;
            let on = n.field("object")?;
            let a = object_of(&base, &on, on.str()?)?;
            FunctorExpr::shift(&base, a)
        }
        other => Err(kind_node.err(format!("unknown functor kind {}", other))),
    }
}

pub fn certificate_to_json(c: &TenseCertificate) -> Value {
    json!({
        "node": c.node,
        "rule": c.rule.name(),
        "children": c.children.iter().map(certificate_to_json).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presheaf::fixtures::{arr, phi_arr};
    use crate::prof::identity_prof;

    #[test]
    fn presheaf_round_trip() {
        let phi = phi_arr(&arr());
        let v = presheaf_to_json(&phi);
        let back = presheaf_from_json(&v).unwrap();
        assert_eq!(presheaf_to_json(&back), v);
    }

    #[test]
    fn permuted_lists_canonicalize() {
        let a = json!({"base": "Arr", "elems": {"0": ["x"], "1": ["y", "z"]}, "action": {"e": {"x": "y"}}});
        let b = json!({"base": "Arr", "elems": {"1": ["z", "y"], "0": ["x"]}, "action": {"e": {"x": "y"}}});
        let (pa, pb) = (presheaf_from_json(&a).unwrap(), presheaf_from_json(&b).unwrap());
        assert_eq!(render(&presheaf_to_json(&pa)), render(&presheaf_to_json(&pb)));
    }

    #[test]
    fn malformed_action_has_pointer() {
        let bad = json!({"base": "Arr", "elems": {"0": ["x"], "1": ["y"]}, "action": {"e": {"x": "w"}}});
        match presheaf_from_json(&bad) {
            Err(Error::SchemaError { pointer, .. }) => assert_eq!(pointer, "/action/e/x"),
            other => panic!("{:?}", other),
        }
        let missing = json!({"base": "Arr", "elems": {"0": ["x"], "1": ["y"]}});
        match presheaf_from_json(&missing) {
            Err(Error::SchemaError { pointer, .. }) => assert_eq!(pointer, "/action/e"),
            other => panic!("{:?}", other),
        }
        match presheaf_from_json(&json!({"elems": {}})) {
            Err(Error::SchemaError { pointer, .. }) => assert_eq!(pointer, "/base"),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn category_forms() {
        let a = arr();
        let v = category_to_json(&a);
        assert_eq!(*category_from_json(&v).unwrap(), *a);
        let g = generated(&a, 2, SeqMode::Soft);
        let back = category_from_json(&category_to_json(&g)).unwrap();
        assert_eq!(*back, *g);
        assert!(category_from_json(&json!("nope")).is_err());
        assert_eq!(category_from_json(&json!("chain:3")).unwrap().object_count(), 3);
    }

    #[test]
    fn profunctor_and_expr_round_trip() {
        let p = Arc::new(identity_prof(&arr()));
        let v = profunctor_to_json(&p);
        assert_eq!(*profunctor_from_json(&v).unwrap(), *p);
        let f = FunctorExpr::product(FunctorExpr::linear(&p), FunctorExpr::identity(&arr())).unwrap();
        let e = expr_to_json(&f);
        assert_eq!(expr_to_json(&expr_from_json(&e).unwrap()), e);
        let bad = json!({"kind": "Sum", "left": {"kind": "Identity", "base": "Arr"}, "right": {"kind": "Identity", "base": "1"}});
        assert!(matches!(expr_from_json(&bad), Err(Error::SchemaError { .. })));
    }

    #[test]
    fn sequence_forms() {
        let v = json!({
            "mode": "soft", "base": "1", "target": "1", "maxArity": 2,
            "generators": [{"seq": ["•"], "target": "•", "label": "p"}, {"seq": ["•", "•"], "target": "•", "label": "q"}],
        });
        let s = sequence_from_json(&v).unwrap();
        let full = sequence_to_json(&s);
        let back = sequence_from_json(&full).unwrap();
        assert_eq!(back, s);
        let t = subobject_to_json(&Subobject::full(phi_arr(&arr())));
        assert_eq!(subobject_to_json(&subobject_from_json(&t).unwrap()), t);
    }
}
