//! Elements of the full group as per-vertex permutations of path indices.
//!
//! `G_n` is the product over level-`n` vertices `v` of the symmetric group on
//! the `h_v` paths ending at `v`. An element of `G_n` acts on an infinite path
//! by permuting its first `n` edges and keeping the tail. Elements are kept
//! at the least level at which they are defined; binary operations embed
//! both operands into the deeper level first.

use crate::clopen::ClopenSet;
use crate::diagram::{BratteliDiagram, Cuts, LevelTable, Segments};
use crate::error::{Error, Result};
use crate::measure::InvariantMeasure;
use crate::perm::Perm;
use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    level: usize,
    perms: Vec<Perm>,
}

/// Per-vertex cycle types and per-path periods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleData {
    pub level: usize,
    pub cycle_types: Vec<Vec<usize>>,
    pub periods: Vec<Vec<usize>>,
}

impl CycleData {
    pub fn even_cycles(&self) -> bool {
        self.cycle_types
            .iter()
            .flatten()
            .all(|&l| l == 1 || l % 2 == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Conjugacy {
    /// `q` with `q g q⁻¹ = h`.
    Conjugate(GroupElement),
    NotAtThisLevel,
}

impl GroupElement {
    /// The identity, defined at level 0.
    pub fn identity() -> GroupElement {
        GroupElement {
            level: 0,
            perms: vec![Perm::identity(1)],
        }
    }

    /// Builds an element from one permutation per level-`n` vertex.
    pub fn from_perms(d: &BratteliDiagram, n: usize, perms: Vec<Perm>) -> Result<GroupElement> {
        let h = d.path_counts(n)?;
        if perms.len() != h.len() {
            return Err(Error::NotAPermutation(format!(
                "level {n} has {} vertices, got {} permutations",
                h.len(),
                perms.len()
            )));
        }
        for (v, (p, &c)) in perms.iter().zip(&h).enumerate() {
            if p.len() as u64 != c {
                return Err(Error::NotAPermutation(format!(
                    "vertex {v} at level {n} has {c} paths, permutation has {}",
                    p.len()
                )));
            }
        }
        let t = d.table(n)?;
        Ok(GroupElement { level: n, perms }.reduced_with(&t))
    }

    /// Element acting at a single vertex, identity elsewhere.
    pub fn at_vertex(d: &BratteliDiagram, n: usize, v: usize, p: Perm) -> Result<GroupElement> {
        let h = d.path_counts(n)?;
        let mut perms: Vec<Perm> = h.iter().map(|&c| Perm::identity(c as usize)).collect();
        if v >= perms.len() {
            return Err(Error::NoSuchVertex { level: n, vertex: v });
        }
        perms[v] = p;
        GroupElement::from_perms(d, n, perms)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn perms(&self) -> &[Perm] {
        &self.perms
    }

    pub fn is_identity(&self) -> bool {
        self.perms.iter().all(Perm::is_identity)
    }

    /// The same homeomorphism written at level `m`.
    pub fn embed(&self, d: &BratteliDiagram, m: usize) -> Result<GroupElement> {
        if m < self.level {
            return Err(Error::ArgumentOutOfRange(format!(
                "cannot embed a level-{} element at level {m}",
                self.level
            )));
        }
        let t = d.table(m)?;
        Ok(self.embed_with(&t, m))
    }

    pub(crate) fn embed_with(&self, t: &LevelTable, m: usize) -> GroupElement {
        let mut perms = self.perms.clone();
        for n in self.level + 1..=m {
            perms = (0..t.vertex_count(n))
                .map(|v| {
                    let images = (0..t.count(n, v))
                        .map(|i| {
                            let (w, p, e) = t.locate(n, v, i);
                            t.index_at(n, v, w, perms[w].apply(p), e)
                        })
                        .collect();
                    Perm::from_images_unchecked(images)
                })
                .collect();
        }
        GroupElement { level: m, perms }
    }

    /// Lowers the level while the element is the image of a shallower one.
    pub fn reduced(&self, d: &BratteliDiagram) -> Result<GroupElement> {
        let t = d.table(self.level)?;
        Ok(self.clone().reduced_with(&t))
    }

    pub(crate) fn reduced_with(mut self, t: &LevelTable) -> GroupElement {
        while self.level > 0 {
            match self.lower(t) {
                Some(g) => self = g,
                None => break,
            }
        }
        self
    }

    fn lower(&self, t: &LevelTable) -> Option<GroupElement> {
        let n = self.level;
        let mut lower: Vec<Vec<Option<usize>>> = (0..t.vertex_count(n - 1))
            .map(|w| vec![None; t.count(n - 1, w)])
            .collect();
        for (v, sigma) in self.perms.iter().enumerate() {
            for i in 0..sigma.len() {
                let (w, p, e) = t.locate(n, v, i);
                let (w2, p2, e2) = t.locate(n, v, sigma.apply(i));
                if w2 != w || e2 != e {
                    return None;
                }
                match lower[w][p] {
                    None => lower[w][p] = Some(p2),
                    Some(q) if q == p2 => {}
                    Some(_) => return None,
                }
            }
        }
        let perms = lower
            .into_iter()
            .map(|row| Perm::from_images_unchecked(row.into_iter().map(|x| x.unwrap()).collect()))
            .collect();
        Some(GroupElement {
            level: n - 1,
            perms,
        })
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, d: &BratteliDiagram, other: &GroupElement) -> Result<GroupElement> {
        let m = self.level.max(other.level);
        let t = d.table(m)?;
        let (a, b) = (self.embed_with(&t, m), other.embed_with(&t, m));
        let perms = a.perms.iter().zip(&b.perms).map(|(x, y)| x.compose(y)).collect();
        Ok(GroupElement { level: m, perms }.reduced_with(&t))
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            level: self.level,
            perms: self.perms.iter().map(Perm::inverse).collect(),
        }
    }

    /// `q self q⁻¹`.
    pub fn conjugate_by(&self, d: &BratteliDiagram, q: &GroupElement) -> Result<GroupElement> {
        q.compose(d, self)?.compose(d, &q.inverse())
    }

    /// Equality as homeomorphisms of the path space.
    pub fn same_as(&self, d: &BratteliDiagram, other: &GroupElement) -> Result<bool> {
        let m = self.level.max(other.level);
        Ok(self.embed(d, m)? == other.embed(d, m)?)
    }

    /// Image `(v, σ_v(i))` of a path of the element's level.
    pub fn apply(&self, v: usize, i: usize) -> usize {
        self.perms[v].apply(i)
    }

    pub fn fix(&self) -> ClopenSet {
        let members = self
            .perms
            .iter()
            .map(|p| (0..p.len()).map(|i| p.apply(i) == i).collect())
            .collect();
        ClopenSet::from_members(self.level, members)
    }

    pub fn support(&self) -> ClopenSet {
        self.fix().complement()
    }

    /// `g(A)` as a clopen set.
    pub fn image_of(&self, d: &BratteliDiagram, a: &ClopenSet) -> Result<ClopenSet> {
        let m = self.level.max(a.level());
        let g = self.embed(d, m)?;
        let a = a.refine(d, m)?;
        let mut members: Vec<Vec<bool>> = a.members().iter().map(|r| vec![false; r.len()]).collect();
        for (v, row) in a.members().iter().enumerate() {
            for (i, &b) in row.iter().enumerate() {
                if b {
                    members[v][g.apply(v, i)] = true;
                }
            }
        }
        Ok(ClopenSet::from_members(m, members))
    }

    pub fn cycle_data(&self) -> CycleData {
        CycleData {
            level: self.level,
            cycle_types: self.perms.iter().map(Perm::cycle_type).collect(),
            periods: self.perms.iter().map(Perm::periods).collect(),
        }
    }

    pub fn consists_of_even_cycles(&self) -> bool {
        self.perms.iter().all(Perm::has_even_cycles)
    }

    /// Involution: `g² = e`.
    pub fn is_involution(&self) -> bool {
        self.perms.iter().all(|p| p.compose(p).is_identity())
    }

    /// Decides conjugacy inside `G_m` (after embedding both elements there).
    pub fn conjugate_at_level(
        &self,
        d: &BratteliDiagram,
        other: &GroupElement,
        m: usize,
    ) -> Result<Conjugacy> {
        if m < self.level.max(other.level) {
            return Err(Error::ArgumentOutOfRange(format!(
                "level {m} is below the elements' levels"
            )));
        }
        let t = d.table(m)?;
        let (a, b) = (self.embed_with(&t, m), other.embed_with(&t, m));
        let mut q = Vec::with_capacity(a.perms.len());
        for (x, y) in a.perms.iter().zip(&b.perms) {
            match x.conjugator_to(y) {
                Some(p) => q.push(p),
                None => return Ok(Conjugacy::NotAtThisLevel),
            }
        }
        Ok(Conjugacy::Conjugate(
            GroupElement { level: m, perms: q }.reduced_with(&t),
        ))
    }

    /// Path-by-path transport of an element of `d` to the telescoped diagram
    /// `td = d.telescope(cuts)`, written at telescoped level `k`.
    pub fn to_telescoped(
        &self,
        d: &BratteliDiagram,
        cuts: &Cuts,
        td: &BratteliDiagram,
        k: usize,
    ) -> Result<GroupElement> {
        let mk = cuts.level(k).ok_or_else(|| Error::InvalidCuts(format!("no cut {k}")))?;
        if mk < self.level {
            return Err(Error::ArgumentOutOfRange(format!(
                "cut level {mk} is below the element's level {}",
                self.level
            )));
        }
        let t = d.table(mk)?;
        let tt = td.table(k)?;
        let g = self.embed_with(&t, mk);
        let levels: Vec<usize> = (0..=k).map(|j| cuts.level(j).unwrap()).collect();
        let segs: Vec<Vec<Segments>> = levels
            .windows(2)
            .map(|w| {
                (0..t.vertex_count(w[0]))
                    .map(|u| Segments::new(&t, w[0], u, w[1]))
                    .collect()
            })
            .collect();
        let to_parent = |v: usize, i: usize| -> Result<(usize, usize)> {
            let tp = tt.path_of_index(k, v, i)?;
            let mut edges = Vec::with_capacity(mk);
            for (j, e) in tp.iter().enumerate() {
                edges.extend(segs[j][e.source].edges(&t, levels[j + 1], e.target, e.index));
            }
            t.index_of_path(&edges)
        };
        let from_parent = |v: usize, i: usize| -> Result<usize> {
            let edges = t.path_of_index(mk, v, i)?;
            let mut tp = Vec::with_capacity(k);
            for j in 0..k {
                let part = &edges[levels[j]..levels[j + 1]];
                let u = part.first().map_or(0, |e| e.source);
                tp.push(crate::diagram::Edge {
                    source: u,
                    target: part.last().unwrap().target,
                    index: segs[j][u].index(&t, part),
                });
            }
            Ok(tt.index_of_path(&tp)?.1)
        };
        let mut perms = Vec::with_capacity(tt.vertex_count(k));
        for v in 0..tt.vertex_count(k) {
            let mut images = Vec::with_capacity(tt.count(k, v));
            for i in 0..tt.count(k, v) {
                let (pv, pi) = to_parent(v, i)?;
                debug_assert_eq!(pv, v);
                images.push(from_parent(v, g.apply(pv, pi))?);
            }
            perms.push(Perm::from_images(images)?);
        }
        Ok(GroupElement { level: k, perms }.reduced_with(&tt))
    }
}

/// `D(g, h)`: the largest measure of `{x : g(x) != h(x)}` over the given
/// measures.
pub fn metric_d(
    d: &BratteliDiagram,
    g: &GroupElement,
    h: &GroupElement,
    measures: &[InvariantMeasure],
) -> Result<Value> {
    let disagreement = g.inverse().compose(d, h)?.support();
    let mut best: Option<Value> = None;
    for mu in measures {
        let v = mu.measure_of(&disagreement)?;
        best = Some(match best {
            None => v,
            Some(b) => {
                if v.lo() > b.hi() {
                    v
                } else if b.lo() > v.hi() {
                    b
                } else {
                    Value::interval(
                        std::cmp::max(b.lo().clone(), v.lo().clone()),
                        std::cmp::max(b.hi().clone(), v.hi().clone()),
                    )
                }
            }
        });
    }
    Ok(best.unwrap_or_else(Value::zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::InvariantMeasure;
    use crate::value::rat;

    fn odo() -> BratteliDiagram {
        BratteliDiagram::odometer(2).unwrap()
    }

    fn swap1(d: &BratteliDiagram) -> GroupElement {
        GroupElement::at_vertex(d, 1, 0, Perm::from_cycles(2, &[vec![0, 1]]).unwrap()).unwrap()
    }

    fn level2(d: &BratteliDiagram, cycles: &[Vec<usize>]) -> GroupElement {
        GroupElement::at_vertex(d, 2, 0, Perm::from_cycles(4, cycles).unwrap()).unwrap()
    }

    #[test]
    fn group_law_examples() {
        let d = odo();
        let s = swap1(&d);
        assert!(s.compose(&d, &s).unwrap().is_identity());
        assert_eq!(s.compose(&d, &s).unwrap(), GroupElement::identity());
        let a = level2(&d, &[vec![0, 1]]);
        let b = level2(&d, &[vec![2, 3]]);
        assert_eq!(a.compose(&d, &b).unwrap(), level2(&d, &[vec![0, 1], vec![2, 3]]));
        let g = level2(&d, &[vec![0, 1, 3]]);
        assert!(g.compose(&d, &g.inverse()).unwrap().is_identity());
    }

    #[test]
    fn embedding_examples() {
        let d = odo();
        let e = swap1(&d).embed(&d, 2).unwrap();
        assert_eq!(e.perms()[0].to_string(), "(0 2)(1 3)");
        assert!(GroupElement::identity().embed(&d, 3).unwrap().is_identity());
        let g = level2(&d, &[vec![0, 3, 1]]);
        assert_eq!(
            g.embed(&d, 3).unwrap().embed(&d, 5).unwrap(),
            g.embed(&d, 5).unwrap()
        );
        // (0 2)(1 3) at level 2 is stored at level 1
        assert_eq!(level2(&d, &[vec![0, 2], vec![1, 3]]).level(), 1);
    }

    #[test]
    fn support_examples() {
        let d = odo();
        let mu = InvariantMeasure::builtin(&d).unwrap();
        assert!(GroupElement::identity().fix().is_full());
        assert!(swap1(&d).fix().is_empty());
        let t = level2(&d, &[vec![0, 1]]);
        let fix = t.fix();
        assert_eq!(fix.indices(0), vec![2, 3]);
        assert_eq!(mu.measure_of(&fix).unwrap(), Value::exact(rat(1, 2)));
    }

    #[test]
    fn even_cycle_examples() {
        let d = odo();
        assert!(GroupElement::identity().consists_of_even_cycles());
        assert!(level2(&d, &[vec![0, 1, 2, 3]]).consists_of_even_cycles());
        assert!(!level2(&d, &[vec![0, 1, 2]]).consists_of_even_cycles());
    }

    #[test]
    fn conjugacy_examples() {
        let d = odo();
        let a = level2(&d, &[vec![0, 1]]);
        let b = level2(&d, &[vec![2, 3]]);
        match a.conjugate_at_level(&d, &b, 2).unwrap() {
            Conjugacy::Conjugate(q) => assert_eq!(a.conjugate_by(&d, &q).unwrap(), b),
            Conjugacy::NotAtThisLevel => panic!(),
        }
        for m in 2..6 {
            assert_eq!(
                a.conjugate_at_level(&d, &GroupElement::identity(), m).unwrap(),
                Conjugacy::NotAtThisLevel
            );
        }
    }

    #[test]
    fn metric_examples() {
        let d = odo();
        let mu = vec![InvariantMeasure::builtin(&d).unwrap()];
        let e = GroupElement::identity();
        let t = level2(&d, &[vec![0, 1]]);
        assert_eq!(metric_d(&d, &t, &t, &mu).unwrap(), Value::zero());
        assert_eq!(metric_d(&d, &swap1(&d), &e, &mu).unwrap(), Value::one());
        assert_eq!(metric_d(&d, &t, &e, &mu).unwrap(), Value::exact(rat(1, 2)));
    }

    #[test]
    fn telescope_transport_preserves_action() {
        let d = BratteliDiagram::br();
        let cuts = Cuts::every(2).unwrap();
        let td = d.telescope(&cuts).unwrap();
        let g = GroupElement::at_vertex(&d, 2, 1, Perm::from_cycles(2, &[vec![0, 1]]).unwrap()).unwrap();
        let h = GroupElement::at_vertex(&d, 3, 2, Perm::from_cycles(6, &[vec![0, 4, 5]]).unwrap()).unwrap();
        let tg = g.to_telescoped(&d, &cuts, &td, 2).unwrap();
        let th = h.to_telescoped(&d, &cuts, &td, 2).unwrap();
        let tgh = g.compose(&d, &h).unwrap().to_telescoped(&d, &cuts, &td, 2).unwrap();
        assert_eq!(tg.compose(&td, &th).unwrap(), tgh);
        assert_eq!(tg.level(), 1);
    }
}
