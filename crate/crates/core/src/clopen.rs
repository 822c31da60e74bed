//! Clopen subsets of the path space, represented as unions of level-`n`
//! cylinders.

use std::collections::HashMap;

use crate::diagram::{BratteliDiagram, LevelTable};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::perm::Perm;

/// A union of cylinders at a fixed level: `members[v][i]` says whether the
/// cylinder of the `i`-th path ending at vertex `v` belongs to the set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClopenSet {
    level: usize,
    members: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    Union,
    Intersect,
    Minus,
    Complement,
}

/// Result of [`ClopenSet::can_halve`].
#[derive(Debug, Clone)]
pub enum Halving {
    Yes {
        level: usize,
        first: ClopenSet,
        second: ClopenSet,
        /// Swaps `first` and `second`, fixes everything outside them.
        involution: GroupElement,
    },
    No(usize),
}

impl ClopenSet {
    pub(crate) fn from_members(level: usize, members: Vec<Vec<bool>>) -> ClopenSet {
        ClopenSet { level, members }
    }

    pub fn empty(d: &BratteliDiagram, n: usize) -> Result<ClopenSet> {
        let h = d.path_counts(n)?;
        Ok(ClopenSet {
            level: n,
            members: h.iter().map(|&c| vec![false; c as usize]).collect(),
        })
    }

    /// The whole path space `X`, at level `n`.
    pub fn full(d: &BratteliDiagram, n: usize) -> Result<ClopenSet> {
        let h = d.path_counts(n)?;
        Ok(ClopenSet {
            level: n,
            members: h.iter().map(|&c| vec![true; c as usize]).collect(),
        })
    }

    /// Builds a set from per-vertex index lists.
    pub fn from_indices(d: &BratteliDiagram, n: usize, sets: &[Vec<usize>]) -> Result<ClopenSet> {
        let mut a = ClopenSet::empty(d, n)?;
        if sets.len() > a.members.len() {
            return Err(Error::NoSuchVertex {
                level: n,
                vertex: sets.len() - 1,
            });
        }
        for (v, idx) in sets.iter().enumerate() {
            for &i in idx {
                let count = a.members[v].len();
                *a.members[v].get_mut(i).ok_or(Error::IndexOutOfRange {
                    level: n,
                    vertex: v,
                    index: i,
                    count: count as u64,
                })? = true;
            }
        }
        Ok(a)
    }

    /// Cylinder of a single finite path.
    pub fn cylinder(d: &BratteliDiagram, n: usize, v: usize, i: usize) -> Result<ClopenSet> {
        let mut sets = vec![vec![]; v + 1];
        sets[v].push(i);
        ClopenSet::from_indices(d, n, &sets)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn members(&self) -> &[Vec<bool>] {
        &self.members
    }

    pub fn contains(&self, v: usize, i: usize) -> bool {
        self.members[v][i]
    }

    /// Member indices at vertex `v`, ascending.
    pub fn indices(&self, v: usize) -> Vec<usize> {
        self.members[v]
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn count_at(&self, v: usize) -> usize {
        self.members[v].iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.members.iter().flatten().all(|&b| !b)
    }

    pub fn is_full(&self) -> bool {
        self.members.iter().flatten().all(|&b| b)
    }

    /// The same set described by level-`m` cylinders.
    pub fn refine(&self, d: &BratteliDiagram, m: usize) -> Result<ClopenSet> {
        if m < self.level {
            return Err(Error::ArgumentOutOfRange(format!(
                "cannot refine a level-{} set to level {m}",
                self.level
            )));
        }
        if m == self.level {
            return Ok(self.clone());
        }
        let t = d.table(m)?;
        Ok(self.refine_with(&t, m))
    }

    pub(crate) fn refine_with(&self, t: &LevelTable, m: usize) -> ClopenSet {
        let mut cur = self.members.clone();
        for n in self.level + 1..=m {
            cur = (0..t.vertex_count(n))
                .map(|v| {
                    (0..t.count(n, v))
                        .map(|i| {
                            let (w, p, _) = t.locate(n, v, i);
                            cur[w][p]
                        })
                        .collect()
                })
                .collect();
        }
        ClopenSet {
            level: m,
            members: cur,
        }
    }

    /// Boolean operation after refining both operands to the deeper level.
    /// `other` is ignored for [`BoolOp::Complement`].
    pub fn boolean(
        &self,
        d: &BratteliDiagram,
        op: BoolOp,
        other: Option<&ClopenSet>,
    ) -> Result<ClopenSet> {
        if op == BoolOp::Complement {
            return Ok(self.complement());
        }
        let other = other.ok_or_else(|| {
            Error::ArgumentOutOfRange(format!("{op:?} needs a second operand"))
        })?;
        let m = self.level.max(other.level);
        let (a, b) = (self.refine(d, m)?, other.refine(d, m)?);
        let f: fn(bool, bool) -> bool = match op {
            BoolOp::Union => |x, y| x || y,
            BoolOp::Intersect => |x, y| x && y,
            BoolOp::Minus => |x, y| x && !y,
            BoolOp::Complement => unreachable!(),
        };
        let members = a
            .members
            .iter()
            .zip(&b.members)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(&x, &y)| f(x, y)).collect())
            .collect();
        Ok(ClopenSet { level: m, members })
    }

    pub fn union(&self, d: &BratteliDiagram, other: &ClopenSet) -> Result<ClopenSet> {
        self.boolean(d, BoolOp::Union, Some(other))
    }

    pub fn intersect(&self, d: &BratteliDiagram, other: &ClopenSet) -> Result<ClopenSet> {
        self.boolean(d, BoolOp::Intersect, Some(other))
    }

    pub fn minus(&self, d: &BratteliDiagram, other: &ClopenSet) -> Result<ClopenSet> {
        self.boolean(d, BoolOp::Minus, Some(other))
    }

    pub fn complement(&self) -> ClopenSet {
        ClopenSet {
            level: self.level,
            members: self
                .members
                .iter()
                .map(|r| r.iter().map(|&b| !b).collect())
                .collect(),
        }
    }

    /// Equality as subsets of `X`.
    pub fn same_set(&self, d: &BratteliDiagram, other: &ClopenSet) -> Result<bool> {
        let m = self.level.max(other.level);
        Ok(self.refine(d, m)? == other.refine(d, m)?)
    }

    pub fn is_subset(&self, d: &BratteliDiagram, other: &ClopenSet) -> Result<bool> {
        Ok(self.minus(d, other)?.is_empty())
    }

    /// Whether the set is stable under every permutation of level-`n`
    /// prefixes that keeps the level-`n` vertex.
    pub fn is_gn_invariant(&self, d: &BratteliDiagram, n: usize) -> Result<bool> {
        let a = if self.level < n {
            self.refine(d, n)?
        } else {
            self.clone()
        };
        let m = a.level;
        let t = d.table(m)?;
        // Membership must be a function of (level-m vertex, path with its
        // level-n prefix index replaced by 0).
        let mut seen: HashMap<(usize, usize), bool> = HashMap::new();
        for v in 0..t.vertex_count(m) {
            for i in 0..t.count(m, v) {
                let key = (v, suffix_key(&t, n, m, v, i));
                let b = a.members[v][i];
                if *seen.entry(key).or_insert(b) != b {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Looks for a level at which every vertex carries an even number of the
    /// set's paths, and splits the set into two halves swapped by an
    /// involution.
    pub fn can_halve(&self, d: &BratteliDiagram, bound: usize) -> Result<Halving> {
        if self.is_empty() {
            return Err(Error::ArgumentOutOfRange("cannot halve the empty set".into()));
        }
        let bound = d.depth().map_or(bound, |dd| dd.min(bound));
        if bound < self.level {
            return Ok(Halving::No(bound));
        }
        let t = d.table(bound)?;
        for m in self.level..=bound {
            let a = self.refine_with(&t, m);
            if (0..t.vertex_count(m)).any(|v| a.count_at(v) % 2 == 1) {
                continue;
            }
            let mut first = ClopenSet::empty(d, m)?;
            let mut second = first.clone();
            let mut perms = Vec::with_capacity(t.vertex_count(m));
            for v in 0..t.vertex_count(m) {
                let idx = a.indices(v);
                let mut images: Vec<usize> = (0..t.count(m, v)).collect();
                for pair in idx.chunks(2) {
                    first.members[v][pair[0]] = true;
                    second.members[v][pair[1]] = true;
                    images.swap(pair[0], pair[1]);
                }
                perms.push(Perm::from_images_unchecked(images));
            }
            let involution = GroupElement::from_perms(d, m, perms)?;
            return Ok(Halving::Yes {
                level: m,
                first,
                second,
                involution,
            });
        }
        Ok(Halving::No(bound))
    }
}

/// Index of the level-`m` path `(v, i)` after replacing its level-`n` prefix by
/// the prefix with index 0 at the same vertex.
pub(crate) fn suffix_key(t: &LevelTable, n: usize, m: usize, v: usize, i: usize) -> usize {
    let mut steps = Vec::with_capacity(m - n);
    let (mut x, mut j) = (v, i);
    for level in (n + 1..=m).rev() {
        let (w, p, e) = t.locate(level, x, j);
        steps.push((level, x, w, e));
        x = w;
        j = p;
    }
    let mut idx = 0;
    for &(level, x, w, e) in steps.iter().rev() {
        idx = t.index_at(level, x, w, idx, e);
    }
    idx
}
