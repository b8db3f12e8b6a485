//! File formats: complexes, point lists and result files, all JSON.
//!
//! A point names its carrier cell by the label used in the complex file and
//! gives local coordinates. A vertex takes none. An edge takes one, the
//! parameter from the first to the second listed end. A triangle takes
//! three barycentric coordinates, with respect to the two ends of its first
//! listed edge (in listed order) followed by its remaining vertex.
//!
//! Floats are written in the shortest form that parses back to the same
//! value, so every file round-trips exactly.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::complex::{Label, PointRef, RawComplex, TriangleComplex};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CarrierKind {
    Vertex,
    Edge,
    Triangle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Carrier {
    pub kind: CarrierKind,
    pub id: Label,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSpec {
    pub carrier: Carrier,
    #[serde(default)]
    pub coords: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFile {
    pub points: Vec<PointSpec>,
}

/// Point files may also be a bare array of points.
#[derive(Deserialize)]
#[serde(untagged)]
enum PointFileForm {
    Wrapped(PointFile),
    Bare(Vec<PointSpec>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub kind: String,
    pub location: Value,
    pub diagnostics: Value,
}

fn parse_err(what: &str, e: serde_json::Error) -> Error {
    Error::Input(format!("cannot parse {what}: {e}"))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn parse_complex(text: &str) -> Result<RawComplex> {
    serde_json::from_str(text).map_err(|e| parse_err("complex", e))
}

/// Read and validate a complex file.
pub fn read_complex(path: &Path) -> Result<TriangleComplex> {
    TriangleComplex::validate(&parse_complex(&read(path)?)?)
}

pub fn parse_points(text: &str) -> Result<Vec<PointSpec>> {
    match serde_json::from_str(text).map_err(|e| parse_err("points", e))? {
        PointFileForm::Wrapped(f) => Ok(f.points),
        PointFileForm::Bare(v) => Ok(v),
    }
}

pub fn read_points(path: &Path) -> Result<Vec<PointSpec>> {
    parse_points(&read(path)?)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json(value)).map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

/// Resolve a point spec against a complex.
pub fn to_point(x: &TriangleComplex, s: &PointSpec) -> Result<PointRef> {
    let unknown = || Error::Input(format!("unknown {:?} {}", s.carrier.kind, s.carrier.id));
    let arity = |n: usize| {
        if s.coords.len() == n {
            Ok(())
        } else {
            Err(Error::CoordsOutOfRange(format!("{:?} {} needs {n} coordinates", s.carrier.kind, s.carrier.id)))
        }
    };
    let p = match s.carrier.kind {
        CarrierKind::Vertex => {
            arity(0)?;
            PointRef::Vertex(x.vertex_by_label(&s.carrier.id).ok_or_else(unknown)?)
        }
        CarrierKind::Edge => {
            arity(1)?;
            PointRef::Edge { edge: x.edge_by_label(&s.carrier.id).ok_or_else(unknown)?, t: s.coords[0] }
        }
        CarrierKind::Triangle => {
            arity(3)?;
            let tri = x.tri_by_label(&s.carrier.id).ok_or_else(unknown)?;
            PointRef::Tri { tri, bary: [s.coords[0], s.coords[1], s.coords[2]] }
        }
    };
    x.canonicalize(&p)
}

pub fn to_points(x: &TriangleComplex, specs: &[PointSpec]) -> Result<Vec<PointRef>> {
    specs.iter().map(|s| to_point(x, s)).collect()
}

/// Describe a point by labels of the complex.
pub fn from_point(x: &TriangleComplex, p: &PointRef) -> PointSpec {
    match *p {
        PointRef::Vertex(v) => PointSpec { carrier: Carrier { kind: CarrierKind::Vertex, id: x.vertex_labels[v].clone() }, coords: vec![] },
        PointRef::Edge { edge, t } => {
            PointSpec { carrier: Carrier { kind: CarrierKind::Edge, id: x.edge_labels[edge].clone() }, coords: vec![t] }
        }
        PointRef::Tri { tri, bary } => {
            PointSpec { carrier: Carrier { kind: CarrierKind::Triangle, id: x.tri_labels[tri].clone() }, coords: bary.to_vec() }
        }
    }
}
