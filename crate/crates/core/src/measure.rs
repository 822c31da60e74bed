//! Invariant probability measures on the path space.
//!
//! A measure invariant under the full group gives every cylinder ending at
//! a vertex `v` of level `n` the same weight `q_v^{(n)}`; the weights satisfy
//!
//! ```text
//! q_v^{(n)} = Σ_w f_{w,v} q_w^{(n+1)}        Σ_v h_v^{(n)} q_v^{(n)} = 1
//! ```

use num::{BigInt, One, Signed, Zero};

use crate::clopen::ClopenSet;
use crate::diagram::{BratteliDiagram, Cuts, Tail};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::value::{format_rational, int, Rational, Value};

/// Interval weights from the hull method are refined until their width is at
/// most `2^-APPROX_BITS`.
const APPROX_BITS: u32 = 48;

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantMeasure {
    rule: Rule,
}

#[derive(Debug, Clone, PartialEq)]
enum Rule {
    /// Explicit weights for levels `0..table.len()`.
    Table(Vec<Vec<Value>>),
    /// Weights for levels `0..=L` stored; deeper levels scale the level-`L`
    /// weights by a closed-form factor.
    Closed {
        lower: Vec<Vec<Value>>,
        scale: Scale,
    },
    /// Weights enclosed by pushing the level-`N` simplex down to the level.
    Hull(Box<BratteliDiagram>),
    Telescoped {
        parent: Box<InvariantMeasure>,
        cuts: Cuts,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Scale {
    /// `q^{(n)} = q^{(L)} / b^{n-L}`.
    Geometric(BigInt),
    /// `q^{(n)} = q^{(L)} (L+1)! / (n+1)!`.
    Factorial,
}

impl InvariantMeasure {
    /// Checks the consistency and normalization equations for levels
    /// `0..=depth` of `table`.
    pub fn validate_certificate(
        d: &BratteliDiagram,
        table: &[Vec<Value>],
        depth: usize,
    ) -> Result<InvariantMeasure> {
        if table.len() <= depth {
            return Err(Error::DepthExceeded {
                requested: depth,
                available: table.len().saturating_sub(1),
            });
        }
        let table = &table[..=depth];
        let t = d.table(depth)?;
        for (n, row) in table.iter().enumerate() {
            if row.len() != t.vertex_count(n) {
                return Err(Error::MeasureMismatch(format!(
                    "level {n} has {} vertices, certificate gives {} weights",
                    t.vertex_count(n),
                    row.len()
                )));
            }
            if let Some(v) = row.iter().position(|q| q.lo().is_negative()) {
                return Err(Error::NegativeWeight { level: n, vertex: v });
            }
            let total = row
                .iter()
                .zip(t.counts(n))
                .fold(Value::zero(), |acc, (q, &h)| acc.add(&q.scale(&int(h))));
            if !total.overlaps(&Value::one()) {
                return Err(Error::NotNormalized {
                    level: n,
                    total: total.to_string(),
                });
            }
        }
        for n in 0..depth {
            let f = t.incidence(n);
            for v in 0..t.vertex_count(n) {
                let rhs = (0..t.vertex_count(n + 1)).fold(Value::zero(), |acc, w| {
                    acc.add(&table[n + 1][w].scale(&int(f.get(w, v))))
                });
                let lhs = &table[n][v];
                let ok = if lhs.is_exact() && rhs.is_exact() {
                    *lhs == rhs
                } else {
                    lhs.overlaps(&rhs)
                };
                if !ok {
                    return Err(Error::ConsistencyViolation {
                        level: n,
                        vertex: v,
                        lhs: lhs.to_string(),
                        rhs: rhs.to_string(),
                    });
                }
            }
        }
        Ok(InvariantMeasure {
            rule: Rule::Table(table.to_vec()),
        })
    }

    /// The unique invariant measure of an odometer, B_R or primitive
    /// stationary tail (and of telescopes of those).
    pub fn builtin(d: &BratteliDiagram) -> Result<InvariantMeasure> {
        let l = d.prefix_depth();
        let t = d.table(l)?;
        let rule = match d.tail() {
            Tail::Explicit => {
                return Err(Error::NoBuiltinMeasure(
                    "explicit diagrams carry no tail rule".into(),
                ))
            }
            Tail::Telescoped(tel) => Rule::Telescoped {
                parent: Box::new(InvariantMeasure::builtin(&tel.parent)?),
                cuts: tel.cuts.clone(),
            },
            Tail::Odometer(b) => Rule::Closed {
                lower: push_down(&t, uniform_top(t.counts(l))),
                scale: Scale::Geometric(BigInt::from(*b)),
            },
            Tail::BrFamily => Rule::Closed {
                lower: push_down(&t, uniform_top(t.counts(l))),
                scale: Scale::Factorial,
            },
            Tail::Stationary(f) => {
                if !f.is_primitive() {
                    return Err(Error::NotPrimitive);
                }
                match perron_left_exact(f) {
                    Some((lambda, y)) => {
                        let norm: Rational = y
                            .iter()
                            .zip(t.counts(l))
                            .map(|(yv, &h)| yv * int(h))
                            .sum();
                        let top = y.iter().map(|yv| Value::exact(yv / &norm)).collect();
                        Rule::Closed {
                            lower: push_down(&t, top),
                            scale: Scale::Geometric(lambda),
                        }
                    }
                    None => Rule::Hull(Box::new(d.clone())),
                }
            }
        };
        Ok(InvariantMeasure { rule })
    }

    /// The same measure seen on `d.telescope(cuts)`.
    pub fn telescoped(&self, cuts: &Cuts) -> InvariantMeasure {
        InvariantMeasure {
            rule: Rule::Telescoped {
                parent: Box::new(self.clone()),
                cuts: cuts.clone(),
            },
        }
    }

    /// Deepest level with known weights, `None` if unbounded.
    pub fn depth(&self) -> Option<usize> {
        match &self.rule {
            Rule::Table(t) => Some(t.len() - 1),
            Rule::Closed { .. } | Rule::Hull(_) => None,
            Rule::Telescoped { parent, cuts } => {
                let pd = parent.depth();
                match (pd, cuts.depth()) {
                    (None, cd) => cd,
                    (Some(p), _) => Some((0..).take_while(|&k| cuts.level(k).is_some_and(|m| m <= p)).count() - 1),
                }
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        match &self.rule {
            Rule::Table(t) => t.iter().flatten().all(Value::is_exact),
            Rule::Closed { lower, .. } => lower.iter().flatten().all(Value::is_exact),
            Rule::Hull(_) => false,
            Rule::Telescoped { parent, .. } => parent.is_exact(),
        }
    }

    /// Cylinder weights `q_v^{(n)}` for every vertex of level `n`.
    pub fn weights(&self, n: usize) -> Result<Vec<Value>> {
        match &self.rule {
            Rule::Table(t) => t.get(n).cloned().ok_or(Error::DepthExceeded {
                requested: n,
                available: t.len() - 1,
            }),
            Rule::Closed { lower, scale } => {
                let l = lower.len() - 1;
                if n <= l {
                    return Ok(lower[n].clone());
                }
                let factor = match scale {
                    Scale::Geometric(b) => {
                        Rational::new(BigInt::one(), num::pow(b.clone(), n - l))
                    }
                    Scale::Factorial => {
                        let mut r = Rational::one();
                        for k in l + 2..=n + 1 {
                            r /= int(k as u64);
                        }
                        r
                    }
                };
                Ok(match scale {
                    Scale::Geometric(_) => lower[l].iter().map(|q| q.scale(&factor)).collect(),
                    // B_R tails carry one common weight on n + 1 vertices
                    Scale::Factorial => vec![lower[l][0].scale(&factor); n + 1],
                })
            }
            Rule::Hull(d) => hull_weights(d, n),
            Rule::Telescoped { parent, cuts } => {
                let m = cuts.level(n).ok_or(Error::DepthExceeded {
                    requested: n,
                    available: cuts.depth().unwrap_or(0),
                })?;
                parent.weights(m)
            }
        }
    }

    pub fn weight(&self, n: usize, v: usize) -> Result<Value> {
        self.weights(n)?
            .get(v)
            .cloned()
            .ok_or(Error::NoSuchVertex { level: n, vertex: v })
    }

    /// `Σ_v |S_v| q_v^{(n)}` for a level-`n` clopen set.
    pub fn measure_of(&self, a: &ClopenSet) -> Result<Value> {
        let w = self.weights(a.level())?;
        if w.len() != a.members().len() {
            return Err(Error::MeasureMismatch(format!(
                "set has {} vertices at level {}, measure has {}",
                a.members().len(),
                a.level(),
                w.len()
            )));
        }
        Ok((0..w.len()).fold(Value::zero(), |acc, v| {
            acc.add(&w[v].scale(&int(a.count_at(v) as u64)))
        }))
    }

    /// Weights for levels `0..=depth` (e.g. to re-check with
    /// [`InvariantMeasure::validate_certificate`]).
    pub fn table(&self, depth: usize) -> Result<Vec<Vec<Value>>> {
        (0..=depth).map(|n| self.weights(n)).collect()
    }
}

fn uniform_top(h: &[u64]) -> Vec<Value> {
    let total: u64 = h.iter().sum();
    vec![Value::exact(Rational::new(BigInt::one(), BigInt::from(total))); h.len()]
}

/// Extends level-`L` weights to all shallower levels via consistency.
fn push_down(t: &crate::diagram::LevelTable, top: Vec<Value>) -> Vec<Vec<Value>> {
    let l = t.depth();
    let mut out = vec![top];
    for n in (0..l).rev() {
        let f = t.incidence(n);
        let next = &out[0];
        let row = (0..t.vertex_count(n))
            .map(|v| {
                (0..t.vertex_count(n + 1)).fold(Value::zero(), |acc, w| {
                    acc.add(&next[w].scale(&int(f.get(w, v))))
                })
            })
            .collect();
        out.insert(0, row);
    }
    out
}

/// Integer Perron root `λ` of `F` with a positive left eigenvector
/// (`Fᵀ y = λ y`), if one exists.
fn perron_left_exact(f: &IntMatrix) -> Option<(BigInt, Vec<Rational>)> {
    let k = f.nrows();
    let col_sums: Vec<u64> = (0..k).map(|c| (0..k).map(|r| f.get(r, c)).sum()).collect();
    let (lo, hi) = (*col_sums.iter().min()?, *col_sums.iter().max()?);
    for lambda in lo..=hi {
        let mut m: Vec<Vec<Rational>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let x = int(f.get(j, i));
                        if i == j {
                            x - int(lambda)
                        } else {
                            x
                        }
                    })
                    .collect()
            })
            .collect();
        if let Some(y) = kernel_vector(&mut m) {
            let y = if y.iter().any(Signed::is_negative) {
                y.into_iter().map(|x| -x).collect::<Vec<_>>()
            } else {
                y
            };
            if y.iter().all(Signed::is_positive) {
                return Some((BigInt::from(lambda), y));
            }
        }
    }
    None
}

/// A spanning vector of a one-dimensional kernel, by exact elimination.
fn kernel_vector(m: &mut [Vec<Rational>]) -> Option<Vec<Rational>> {
    let (rows, cols) = (m.len(), m[0].len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for j in 0..cols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for j in 0..cols {
                    let t = &m[r][j] * &factor;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if cols - pivots.len() != 1 {
        return None;
    }
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    let mut y = vec![Rational::zero(); cols];
    y[free] = Rational::one();
    for (i, &pc) in pivots.iter().enumerate() {
        y[pc] = -m[i][free].clone();
    }
    Some(y)
}

/// Images of the level-`top` simplex vertices `e_w / h_w^{(top)}` at every
/// level `0..=top`, index `[level][vertex of top][coordinate]`.
fn simplex_images(d: &BratteliDiagram, top: usize) -> Result<Vec<Vec<Vec<Rational>>>> {
    let t = d.table(top)?;
    let k = t.vertex_count(top);
    let mut cur: Vec<Vec<Rational>> = (0..k)
        .map(|w| {
            let mut e = vec![Rational::zero(); k];
            e[w] = Rational::new(BigInt::one(), BigInt::from(t.counts(top)[w]));
            e
        })
        .collect();
    let mut out = vec![cur.clone()];
    for n in (0..top).rev() {
        let f = t.incidence(n);
        cur = cur
            .iter()
            .map(|q| {
                (0..t.vertex_count(n))
                    .map(|v| {
                        (0..t.vertex_count(n + 1))
                            .filter(|&w| f.get(w, v) > 0)
                            .map(|w| &q[w] * int(f.get(w, v)))
                            .sum()
                    })
                    .collect()
            })
            .collect();
        out.push(cur.clone());
    }
    out.reverse();
    Ok(out)
}

fn hull_weights(d: &BratteliDiagram, n: usize) -> Result<Vec<Value>> {
    let eps = Rational::new(BigInt::one(), num::pow(BigInt::from(2), APPROX_BITS as usize));
    let mut extra = 8;
    loop {
        let images = simplex_images(d, n + extra)?;
        let pts = &images[n];
        let k = pts[0].len();
        let vals: Vec<Value> = (0..k)
            .map(|v| {
                let lo = pts.iter().map(|p| &p[v]).min().unwrap().clone();
                let hi = pts.iter().map(|p| &p[v]).max().unwrap().clone();
                Value::interval(lo, hi)
            })
            .collect();
        if vals.iter().all(|q| q.width() <= eps) || extra >= 256 {
            return Ok(vals);
        }
        extra *= 2;
    }
}

/// Finite-depth picture of the simplex of invariant measures.
#[derive(Debug, Clone, PartialEq)]
pub struct HullEstimate {
    pub depth: usize,
    pub levels: Vec<HullLevel>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullLevel {
    pub level: usize,
    /// Image of each level-`depth` simplex vertex at this level.
    pub points: Vec<Vec<Rational>>,
    /// Largest sup-norm distance between two points.
    pub diameter: Rational,
}

impl HullEstimate {
    /// Points at `level` that are pairwise farther apart than `tol`, greedily
    /// clustered; a rough count of apparent extreme measures.
    pub fn apparent_extremes(&self, level: usize, tol: &Rational) -> usize {
        let pts = &self.levels[level].points;
        let mut reps: Vec<&Vec<Rational>> = Vec::new();
        for p in pts {
            if reps.iter().all(|r| sup_dist(r, p) > *tol) {
                reps.push(p);
            }
        }
        reps.len()
    }
}

fn sup_dist(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

/// Pushes the vertices of the level-`depth` measure simplex down to every
/// shallower level. Never claims that the reported points are ergodic.
pub fn ergodic_hull_estimate(d: &BratteliDiagram, depth: usize) -> Result<HullEstimate> {
    let images = simplex_images(d, depth)?;
    let levels = images
        .into_iter()
        .enumerate()
        .map(|(level, points)| {
            let mut diameter = Rational::zero();
            for i in 0..points.len() {
                for j in i + 1..points.len() {
                    diameter = diameter.max(sup_dist(&points[i], &points[j]));
                }
            }
            HullLevel {
                level,
                points,
                diameter,
            }
        })
        .collect();
    Ok(HullEstimate { depth, levels })
}

/// Formats a weight row as `p/q` strings.
pub fn format_weights(row: &[Value]) -> Vec<String> {
    row.iter()
        .map(|v| match v.as_exact() {
            Some(r) => format_rational(r),
            None => v.to_string(),
        })
        .collect()
}
