//! JSON file formats for diagrams, elements, clopen sets, measures,
//! characters and matrices. Rationals are written as `"p/q"` strings in
//! lowest terms (`"p"` when `q = 1`); vertex keys are decimal strings.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::character::{Alpha, CharacterSpec};
use crate::clopen::ClopenSet;
use crate::diagram::{BratteliDiagram, Tail};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::matrix::IntMatrix;
use crate::measure::InvariantMeasure;
use crate::perm::Perm;
use crate::value::{format_rational, parse_rational, Rational, Value};

/// Parses JSON text, reporting the line and column of syntax or shape errors.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("file types serialize")
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        location: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_json(&text).map_err(|e| match e {
        Error::Parse { location, message } => Error::Parse {
            location: format!("{}: {location}", path.display()),
            message,
        },
        other => other,
    })
}

fn field_error(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        location: location.into(),
        message: message.into(),
    }
}

fn parse_key(key: &str, location: &str) -> Result<usize> {
    key.parse()
        .map_err(|_| field_error(location, format!("key {key:?} is not a non-negative integer")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailSpec {
    Explicit,
    Stationary(IntMatrix),
    Br,
    Odometer(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramFile {
    pub levels: Vec<usize>,
    #[serde(default)]
    pub incidence: Vec<IntMatrix>,
    #[serde(default = "explicit_tail")]
    pub tail: TailSpec,
}

fn explicit_tail() -> TailSpec {
    TailSpec::Explicit
}

impl DiagramFile {
    pub fn to_diagram(&self) -> Result<BratteliDiagram> {
        let tail = match &self.tail {
            TailSpec::Explicit => Tail::Explicit,
            TailSpec::Stationary(m) => Tail::Stationary(m.clone()),
            TailSpec::Br => Tail::BrFamily,
            TailSpec::Odometer(b) => Tail::Odometer(*b),
        };
        BratteliDiagram::new(self.levels.clone(), self.incidence.clone(), tail)
    }

    /// The file describing `d`; telescoped diagrams are written out
    /// explicitly to `depth` levels.
    pub fn from_diagram(d: &BratteliDiagram, depth: usize) -> Result<DiagramFile> {
        let tail = match d.tail() {
            Tail::Explicit => TailSpec::Explicit,
            Tail::Stationary(m) => TailSpec::Stationary(m.clone()),
            Tail::BrFamily => TailSpec::Br,
            Tail::Odometer(b) => TailSpec::Odometer(*b),
            Tail::Telescoped(_) => {
                let levels = (0..=depth).map(|n| d.vertex_count(n)).collect::<Result<_>>()?;
                let incidence = (0..depth).map(|n| d.incidence(n)).collect::<Result<_>>()?;
                return Ok(DiagramFile {
                    levels,
                    incidence,
                    tail: TailSpec::Explicit,
                });
            }
        };
        Ok(DiagramFile {
            levels: d.prefix_counts().to_vec(),
            incidence: d.prefix_incidence().to_vec(),
            tail,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementFile {
    pub level: usize,
    /// Vertices without an entry are fixed.
    #[serde(default)]
    pub perms: BTreeMap<String, Vec<usize>>,
}

impl ElementFile {
    pub fn to_element(&self, d: &BratteliDiagram) -> Result<GroupElement> {
        let h = d.path_counts(self.level)?;
        let mut perms: Vec<Perm> = h.iter().map(|&c| Perm::identity(c as usize)).collect();
        for (key, images) in &self.perms {
            let location = format!("perms.{key}");
            let v = parse_key(key, &location)?;
            if v >= h.len() {
                return Err(Error::NoSuchVertex {
                    level: self.level,
                    vertex: v,
                });
            }
            if images.len() as u64 != h[v] {
                return Err(field_error(
                    location,
                    format!("{} images for {} paths", images.len(), h[v]),
                ));
            }
            perms[v] = Perm::from_images(images.clone())?;
        }
        GroupElement::from_perms(d, self.level, perms)
    }

    /// Writes `g` at its own level, listing only the vertices it moves.
    pub fn from_element(g: &GroupElement) -> ElementFile {
        ElementFile {
            level: g.level(),
            perms: g
                .perms()
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_identity())
                .map(|(v, p)| (v.to_string(), p.images().to_vec()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClopenFile {
    pub level: usize,
    /// Member path indices per vertex; absent vertices contribute nothing.
    #[serde(default)]
    pub members: BTreeMap<String, Vec<usize>>,
}

impl ClopenFile {
    pub fn to_set(&self, d: &BratteliDiagram) -> Result<ClopenSet> {
        let k = d.vertex_count(self.level)?;
        let mut sets = vec![Vec::new(); k];
        for (key, idx) in &self.members {
            let v = parse_key(key, &format!("members.{key}"))?;
            if v >= k {
                return Err(Error::NoSuchVertex {
                    level: self.level,
                    vertex: v,
                });
            }
            sets[v] = idx.clone();
        }
        ClopenSet::from_indices(d, self.level, &sets)
    }

    pub fn from_set(a: &ClopenSet) -> ClopenFile {
        ClopenFile {
            level: a.level(),
            members: (0..a.members().len())
                .filter(|&v| a.count_at(v) > 0)
                .map(|v| (v.to_string(), a.indices(v)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureTail {
    /// The listed weights are the whole certificate.
    Explicit,
    /// The diagram's built-in measure; listed weights must agree with it.
    Builtin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    #[serde(default)]
    pub weights: BTreeMap<String, BTreeMap<String, String>>,
    pub tail: MeasureTail,
}

impl MeasureFile {
    /// The listed weights as a table for levels `0..=max level`.
    pub fn table(&self) -> Result<Vec<Vec<Value>>> {
        let mut levels: BTreeMap<usize, BTreeMap<usize, Rational>> = BTreeMap::new();
        for (lk, row) in &self.weights {
            let n = parse_key(lk, &format!("weights.{lk}"))?;
            let entry = levels.entry(n).or_default();
            for (vk, w) in row {
                let location = format!("weights.{lk}.{vk}");
                let v = parse_key(vk, &location)?;
                let r = parse_rational(w).map_err(|_| field_error(&location, format!("{w:?} is not a rational")))?;
                entry.insert(v, r);
            }
        }
        let top = match levels.keys().next_back() {
            Some(&t) => t,
            None => return Ok(Vec::new()),
        };
        (0..=top)
            .map(|n| {
                let row = levels
                    .get(&n)
                    .ok_or_else(|| field_error(format!("weights.{n}"), "level missing"))?;
                let len = row.keys().next_back().map_or(0, |&v| v + 1);
                (0..len)
                    .map(|v| {
                        row.get(&v)
                            .map(|r| Value::exact(r.clone()))
                            .ok_or_else(|| field_error(format!("weights.{n}.{v}"), "vertex missing"))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn to_measure(&self, d: &BratteliDiagram) -> Result<InvariantMeasure> {
        let table = self.table()?;
        match self.tail {
            MeasureTail::Explicit => {
                if table.is_empty() {
                    return Err(field_error("weights", "an explicit measure needs weights"));
                }
                InvariantMeasure::validate_certificate(d, &table, table.len() - 1)
            }
            MeasureTail::Builtin => {
                let m = InvariantMeasure::builtin(d)?;
                for (n, row) in table.iter().enumerate() {
                    let want = m.weights(n)?;
                    for (v, w) in row.iter().enumerate() {
                        if want.get(v).is_none_or(|x| !x.overlaps(w)) {
                            return Err(Error::ConsistencyViolation {
                                level: n,
                                vertex: v,
                                lhs: w.to_string(),
                                rhs: want.get(v).map_or("none".into(), |x| x.to_string()),
                            });
                        }
                    }
                }
                Ok(m)
            }
        }
    }

    /// Explicit file with the exact weights of `m` on levels `0..=depth`.
    pub fn from_measure(m: &InvariantMeasure, depth: usize) -> Result<MeasureFile> {
        let mut weights = BTreeMap::new();
        for n in 0..=depth {
            let row = m.weights(n)?;
            let mut out = BTreeMap::new();
            for (v, w) in row.iter().enumerate() {
                let r = w
                    .as_exact()
                    .ok_or_else(|| Error::MeasureMismatch(format!("weight {n}.{v} is not exact")))?;
                out.insert(v.to_string(), format_rational(r));
            }
            weights.insert(n.to_string(), out);
        }
        Ok(MeasureFile {
            weights,
            tail: MeasureTail::Explicit,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaFile {
    Finite(u32),
    Named(AlphaName),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlphaName {
    #[serde(rename = "inf")]
    Inf,
}

impl From<AlphaFile> for Alpha {
    fn from(a: AlphaFile) -> Alpha {
        match a {
            AlphaFile::Finite(k) => Alpha::Finite(k),
            AlphaFile::Named(AlphaName::Inf) => Alpha::Infinite,
        }
    }
}

impl From<Alpha> for AlphaFile {
    fn from(a: Alpha) -> AlphaFile {
        match a {
            Alpha::Finite(k) => AlphaFile::Finite(k),
            Alpha::Infinite => AlphaFile::Named(AlphaName::Inf),
        }
    }
}

/// Where a character term takes its measure from: `"builtin"`, a path to a
/// measure file (relative to the character file), or an inline measure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasureRef {
    Inline(MeasureFile),
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub measure: MeasureRef,
    pub alpha: AlphaFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterFile {
    pub terms: Vec<TermFile>,
}

impl CharacterFile {
    /// `base` is the directory relative to which measure paths resolve.
    pub fn to_spec(&self, d: &BratteliDiagram, base: &Path) -> Result<CharacterSpec> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let m = match &t.measure {
                    MeasureRef::Inline(m) => m.to_measure(d)?,
                    MeasureRef::Named(name) if name == "builtin" => InvariantMeasure::builtin(d)?,
                    MeasureRef::Named(path) => read_json::<MeasureFile>(&base.join(path))?.to_measure(d)?,
                };
                Ok((m, t.alpha.into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CharacterSpec::new(terms))
    }

    /// Built-in measure with the given exponents.
    pub fn builtin(alphas: &[Alpha]) -> CharacterFile {
        CharacterFile {
            terms: alphas
                .iter()
                .map(|&a| TermFile {
                    measure: MeasureRef::Named("builtin".into()),
                    alpha: a.into(),
                })
                .collect(),
        }
    }
}

/// A square matrix of `"p/q"` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixFile(pub Vec<Vec<String>>);

impl MatrixFile {
    pub fn to_matrix(&self) -> Result<Vec<Vec<Rational>>> {
        self.0
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, s)| {
                        parse_rational(s).map_err(|_| field_error(format!("[{i}][{j}]"), format!("{s:?} is not a rational")))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn from_matrix(m: &[Vec<Rational>]) -> MatrixFile {
        MatrixFile(m.iter().map(|r| r.iter().map(format_rational).collect()).collect())
    }
}
