//! JSON documents for posets, modules, covers and resolutions.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::approx::{Cover, Resolution};
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix};
use crate::module::{IntervalMultiset, Morphism, PersModule};
use crate::poset::{Poset, PosetDoc};

/// A poset given inline or as a path to a poset document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PosetRef {
    Inline(PosetDoc),
    File(String),
}

/// `{"poset": ..., "p": 2, "dims": {label: n}, "maps": {"a->b": [[..]]}}`
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDoc {
    pub poset: PosetRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(default)]
    pub dims: Map<String, Value>,
    #[serde(default)]
    pub maps: Map<String, Value>,
}

pub fn parse_poset(text: &str) -> Result<Poset> {
    let doc: PosetDoc = serde_json::from_str(text)?;
    Poset::from_doc(&doc)
}

pub fn read_poset_file(path: &Path) -> Result<Poset> {
    parse_poset(&std::fs::read_to_string(path)?)
}

pub fn poset_to_json(p: &Poset) -> String {
    serde_json::to_string_pretty(&p.to_doc()).expect("poset documents serialize")
}

/// Loads an inline poset, or a poset file relative to `base`.
pub fn resolve_poset(r: &PosetRef, base: Option<&Path>) -> Result<Poset> {
    match r {
        PosetRef::Inline(doc) => Poset::from_doc(doc),
        PosetRef::File(f) => {
            let path = match base {
                Some(b) => b.join(f),
                None => f.into(),
            };
            read_poset_file(&path)
        }
    }
}

fn parse_matrix(field: Field, key: &str, v: &Value, rows: usize, cols: usize) -> Result<Matrix> {
    let bad = |why: String| Error::Schema(format!("maps.{key}: {why}"));
    let arr = v.as_array().ok_or_else(|| bad("expected an array of rows".into()))?;
    if arr.len() != rows {
        return Err(bad(format!("expected {rows}x{cols}, got {} rows", arr.len())));
    }
    let mut out = Vec::with_capacity(rows);
    for (i, row) in arr.iter().enumerate() {
        let r = row
            .as_array()
            .ok_or_else(|| bad(format!("row {i} is not an array")))?;
        if r.len() != cols {
            return Err(bad(format!("expected {rows}x{cols}, row {i} has {} entries", r.len())));
        }
        let vals = r
            .iter()
            .enumerate()
            .map(|(j, x)| {
                x.as_i64()
                    .ok_or_else(|| bad(format!("entry ({i},{j}) is not an integer")))
            })
            .collect::<Result<Vec<i64>>>()?;
        out.push(vals);
    }
    Ok(Matrix::from_rows(field, cols, &out))
}

/// Builds and validates a module from a document. `default_field` applies
/// when the document has no `p`; `base` resolves a poset file reference.
pub fn module_from_doc(doc: &ModuleDoc, default_field: Field, base: Option<&Path>) -> Result<PersModule> {
    let host = Arc::new(resolve_poset(&doc.poset, base)?);
    let field = match doc.p {
        Some(p) => Field::new(p)?,
        None => default_field,
    };
    let mut dims = vec![0usize; host.len()];
    for (label, v) in &doc.dims {
        let a = host
            .index_of(label)
            .map_err(|_| Error::Schema(format!("dims: unknown element `{label}`")))?;
        dims[a] = v
            .as_u64()
            .ok_or_else(|| Error::Schema(format!("dims.{label}: expected a nonnegative integer")))?
            as usize;
    }
    let mut maps: Vec<Matrix> = host
        .hasse()
        .iter()
        .map(|&(a, b)| Matrix::zeros(field, dims[b], dims[a]))
        .collect();
    for (key, v) in &doc.maps {
        let (src, dst) = key
            .split_once("->")
            .ok_or_else(|| Error::Schema(format!("maps: key `{key}` is not of the form `a->b`")))?;
        let a = host
            .index_of(src.trim())
            .map_err(|_| Error::Schema(format!("maps.{key}: unknown element `{src}`")))?;
        let b = host
            .index_of(dst.trim())
            .map_err(|_| Error::Schema(format!("maps.{key}: unknown element `{dst}`")))?;
        let e = host
            .edge_index(a, b)
            .ok_or_else(|| Error::Schema(format!("maps.{key}: not a covering relation")))?;
        maps[e] = parse_matrix(field, key, v, dims[b], dims[a])?;
    }
    PersModule::new(host, field, dims, maps)
}

pub fn parse_module(text: &str, default_field: Field, base: Option<&Path>) -> Result<PersModule> {
    let doc: ModuleDoc = serde_json::from_str(text)?;
    module_from_doc(&doc, default_field, base)
}

pub fn read_module_file(path: &Path, default_field: Field) -> Result<PersModule> {
    let text = std::fs::read_to_string(path)?;
    parse_module(&text, default_field, path.parent())
}

fn matrix_value(m: &Matrix) -> Value {
    json!(m.row_vecs())
}

/// Inline poset, every dimension, and only the maps with a nonzero entry.
pub fn module_to_doc(m: &PersModule) -> ModuleDoc {
    let host = m.host();
    let mut dims = Map::new();
    for a in 0..host.len() {
        dims.insert(host.label(a).to_string(), json!(m.dim(a)));
    }
    let mut maps = Map::new();
    for (e, &(a, b)) in host.hasse().iter().enumerate() {
        let mat = m.edge_map(e);
        if !mat.is_zero() {
            maps.insert(format!("{}->{}", host.label(a), host.label(b)), matrix_value(mat));
        }
    }
    ModuleDoc {
        poset: PosetRef::Inline(host.to_doc()),
        p: Some(m.field().characteristic()),
        dims,
        maps,
    }
}

pub fn module_to_json(m: &PersModule) -> String {
    serde_json::to_string_pretty(&module_to_doc(m)).expect("module documents serialize")
}

/// `{"{a,b}": multiplicity, ...}` in canonical order.
pub fn multiset_value(host: &Poset, ms: &IntervalMultiset) -> Value {
    let mut map = Map::new();
    for (iv, k) in &ms.pairs {
        map.insert(host.format_set(iv.members()), json!(k));
    }
    Value::Object(map)
}

/// Per-element blocks keyed by label.
pub fn morphism_value(f: &Morphism) -> Value {
    let host = f.source().host();
    let mut map = Map::new();
    for a in 0..host.len() {
        map.insert(host.label(a).to_string(), matrix_value(f.block(a)));
    }
    Value::Object(map)
}

pub fn cover_value(c: &Cover) -> Value {
    let host = c.target.host();
    let generators: Vec<Value> = c
        .generators
        .iter()
        .map(|(iv, g)| {
            let mut vectors = Map::new();
            for &a in iv.members() {
                vectors.insert(host.label(a).to_string(), json!(g.block(a).column(0)));
            }
            json!({ "interval": iv.labels(host), "vectors": vectors })
        })
        .collect();
    json!({
        "summands": multiset_value(host, &c.summands),
        "generators": generators,
        "map": morphism_value(&c.map),
    })
}

pub fn resolution_value(r: &Resolution) -> Value {
    let host = r.target.host();
    json!({
        "length": r.length(),
        "terms": r.terms.iter().map(|t| multiset_value(host, t)).collect::<Vec<_>>(),
        "augmentation": r.augmentation.as_ref().map(morphism_value),
        "differentials": r.differentials.iter().map(morphism_value).collect::<Vec<_>>(),
        "hom_solves": r.hom_solves,
    })
}
