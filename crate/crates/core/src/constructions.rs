//! Explicit elements used to move group elements around by conjugation:
//! the involutions `h_n` that swap edges inside every bundle below a clopen
//! set, the pair of `p`-cycles whose quotient has only even cycles, and the
//! families `s_a` of conjugates of an element `s` built from those pairs.

use num::{BigInt, One};

use crate::clopen::ClopenSet;
use crate::diagram::{BratteliDiagram, Cuts};
use crate::error::{Error, Result};
use crate::group::{Conjugacy, GroupElement};
use crate::measure::InvariantMeasure;
use crate::perm::Perm;
use crate::value::{int, Rational, Value};

/// Fixed-edge statistics of one edge bundle used by `h_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleReport {
    pub source: usize,
    pub target: usize,
    pub size: u64,
    /// `(size mod 2) / size`.
    pub fixed_fraction: Rational,
}

#[derive(Debug, Clone)]
pub struct Hn {
    pub level: usize,
    pub element: GroupElement,
    pub bundles: Vec<BundleReport>,
}

impl Hn {
    pub fn max_fixed_fraction(&self) -> Rational {
        self.bundles
            .iter()
            .map(|b| b.fixed_fraction.clone())
            .max()
            .unwrap_or_default()
    }
}

/// Pairs the first `⌊f/2⌋` edges of a bundle with the next `⌊f/2⌋`.
fn pair_edge(e: usize, f: usize) -> usize {
    let half = f / 2;
    if e < half {
        e + half
    } else if e < 2 * half {
        e - half
    } else {
        e
    }
}

/// The involution of `G_{n+1}` that swaps the `(n+1)`-st edge inside each
/// bundle, on paths whose level-`n` prefix lies in `a`.
pub fn make_hn(d: &BratteliDiagram, a: &ClopenSet, n: usize) -> Result<Hn> {
    if a.level() > n {
        return Err(Error::ArgumentOutOfRange(format!(
            "set is defined at level {}, above n = {n}",
            a.level()
        )));
    }
    let t = d.table(n + 1)?;
    let a = a.refine_with(&t, n);
    let f = t.incidence(n);
    let mut bundles = Vec::new();
    for v in 0..t.vertex_count(n) {
        if a.count_at(v) == 0 {
            continue;
        }
        for w in 0..t.vertex_count(n + 1) {
            let size = f.get(w, v);
            match size {
                0 => {}
                1 => {
                    return Err(Error::NoPairableEdges {
                        level: n,
                        source_vertex: v,
                        target: w,
                    })
                }
                _ => bundles.push(BundleReport {
                    source: v,
                    target: w,
                    size,
                    fixed_fraction: Rational::new(BigInt::from(size % 2), BigInt::from(size)),
                }),
            }
        }
    }
    let perms = (0..t.vertex_count(n + 1))
        .map(|w| {
            let images = (0..t.count(n + 1, w))
                .map(|i| {
                    let (v, p, e) = t.locate(n + 1, w, i);
                    if a.contains(v, p) {
                        let size = f.get(w, v) as usize;
                        t.index_at(n + 1, w, v, p, pair_edge(e, size))
                    } else {
                        i
                    }
                })
                .collect();
            Perm::from_images(images)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Hn {
        level: n,
        element: GroupElement::from_perms(d, n + 1, perms)?,
        bundles,
    })
}

/// Two `p`-cycles on `m` points whose quotient `h0 h1⁻¹` has only even
/// cycles and moves every point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim1Pair {
    pub h0: Perm,
    pub h1: Perm,
    pub m: usize,
}

pub fn claim1_pair(p: usize) -> Result<Claim1Pair> {
    if p < 2 {
        return Err(Error::ArgumentOutOfRange(format!("p = {p} must be at least 2")));
    }
    let (m, c0, c1): (usize, Vec<usize>, Vec<usize>) = if p % 2 == 0 {
        (2 * p, (0..p).collect(), (p..2 * p).collect())
    } else {
        (2 * p - 2, (0..p).collect(), (p - 2..=2 * p - 3).rev().collect())
    };
    Ok(Claim1Pair {
        h0: Perm::from_cycles(m, &[c0])?,
        h1: Perm::from_cycles(m, &[c1])?,
        m,
    })
}

/// Permutation of a bundle of `f` edges: Claim-1 blocks of size `m` on the
/// first `⌊f/m⌋ m` edges, the rest fixed.
fn bundle_perm(f: usize, pair: &Claim1Pair, which: u8) -> Perm {
    let h = if which == 0 { &pair.h0 } else { &pair.h1 };
    let blocks = f / pair.m;
    let mut images: Vec<usize> = (0..f).collect();
    for b in 0..blocks {
        for j in 0..pair.m {
            images[b * pair.m + j] = b * pair.m + h.apply(j);
        }
    }
    Perm::from_images_unchecked(images)
}

/// The elements `s_a`, `a ∈ {0,1}^r`, on a telescope of the input diagram.
#[derive(Debug, Clone)]
pub struct SiFamily {
    pub cuts: Cuts,
    pub diagram: BratteliDiagram,
    /// `s` written on the telescoped diagram.
    pub base: GroupElement,
    pub eps: Rational,
    /// `(a, s_a)` in lexicographic order of `a`.
    pub elements: Vec<(Vec<u8>, GroupElement)>,
}

/// Smallest level `m > from` with every nonzero entry of
/// `F_{m-1} ⋯ F_from` satisfying `pred`.
fn next_level(
    d: &BratteliDiagram,
    from: usize,
    limit: usize,
    pred: impl Fn(u64) -> bool,
) -> Result<std::result::Result<usize, u64>> {
    let mut p = crate::matrix::IntMatrix::identity(d.vertex_count(from)?);
    let mut best = 0;
    for m in from + 1..=limit {
        let f = match d.incidence(m - 1) {
            Ok(f) => f,
            Err(_) => break,
        };
        p = match f.checked_mul(&p) {
            Some(p) => p,
            None => break,
        };
        let nonzero: Vec<u64> = p.rows().iter().flatten().copied().filter(|&x| x > 0).collect();
        best = nonzero.iter().copied().min().unwrap_or(0);
        if nonzero.iter().all(|&x| pred(x)) {
            return Ok(Ok(m));
        }
    }
    Ok(Err(best))
}

/// Builds `2^r` conjugates of `s` whose pairwise quotients consist of even
/// cycles and move all but less than `eps` of `supp(s)` in every invariant
/// measure. The diagram is telescoped so that `s` lives at level 1 and
/// every edge bundle below has more than `2p/eps` edges, `p` the largest
/// period of `s`.
pub fn si_family(d: &BratteliDiagram, s: &GroupElement, r: usize, eps: &Rational) -> Result<SiFamily> {
    if *eps <= Rational::default() {
        return Err(Error::ArgumentOutOfRange("eps must be positive".into()));
    }
    let base_level = s.level().max(1);
    let periods = s.embed(d, base_level)?.cycle_data().periods;
    let p_max = periods.iter().flatten().copied().max().unwrap_or(1);
    let required = int(2 * p_max as u64) / eps;
    let big_enough = |x: u64| int(x) > required;

    let mut levels = vec![0, base_level];
    let search = 96;
    for _ in 0..r {
        let from = *levels.last().unwrap();
        let limit = d.depth().map_or(from + search, |dd| dd.min(from + search));
        match next_level(d, from, limit, big_enough)? {
            Ok(m) => levels.push(m),
            Err(found) => {
                return Err(Error::BundlesTooSmall {
                    required: crate::value::format_rational(&required),
                    found,
                })
            }
        }
    }
    let cuts = Cuts::finite(levels)?;
    let td = d.telescope(&cuts)?;
    let st = s.to_telescoped(d, &cuts, &td, 1)?;
    let t = td.table(r + 1)?;
    let s1 = st.embed(&td, 1)?;
    let period_at = |u: usize, j: usize| s1.perms()[u].periods()[j];
    let pairs: Vec<Option<Claim1Pair>> = (0..=p_max)
        .map(|p| if p >= 2 { claim1_pair(p).ok() } else { None })
        .collect();

    // g[k][x]: the element acting on edge k + 2 (telescoped levels k+1 -> k+2)
    let mut gs: Vec<[GroupElement; 2]> = Vec::with_capacity(r);
    for k in 1..=r {
        let f = t.incidence(k);
        let build = |which: u8| -> Result<GroupElement> {
            let perms = (0..t.vertex_count(k + 1))
                .map(|w| {
                    let images = (0..t.count(k + 1, w))
                        .map(|i| {
                            let (v, q, e) = t.locate(k + 1, w, i);
                            let (u, j) = t.prefix_at(k, v, q, 1);
                            match &pairs[period_at(u, j)] {
                                Some(pair) => {
                                    let size = f.get(w, v) as usize;
                                    let e2 = bundle_perm(size, pair, which).apply(e);
                                    t.index_at(k + 1, w, v, q, e2)
                                }
                                None => i,
                            }
                        })
                        .collect();
                    Perm::from_images(images)
                })
                .collect::<Result<Vec<_>>>()?;
            GroupElement::from_perms(&td, k + 1, perms)
        };
        gs.push([build(0)?, build(1)?]);
    }

    let mut elements = Vec::with_capacity(1 << r);
    for bits in 0..(1usize << r) {
        let a: Vec<u8> = (0..r).map(|i| ((bits >> (r - 1 - i)) & 1) as u8).collect();
        let mut sa = st.clone();
        for (k, &ai) in a.iter().enumerate() {
            sa = sa.compose(&td, &gs[k][ai as usize])?;
        }
        elements.push((a, sa));
    }
    Ok(SiFamily {
        cuts,
        diagram: td,
        base: st,
        eps: eps.clone(),
        elements,
    })
}

#[derive(Debug, Clone)]
pub struct SiPairCheck {
    pub a: Vec<u8>,
    pub b: Vec<u8>,
    pub even_cycles: bool,
    /// `μ(supp(s) \ supp(s_a s_b⁻¹))` per measure.
    pub defects: Vec<Value>,
    pub defect_below_eps: bool,
}

#[derive(Debug, Clone)]
pub struct SiCheck {
    /// Per element: conjugate to `s` with a verified witness.
    pub conjugate: Vec<bool>,
    /// Per element: `supp(s_a) = supp(s)`.
    pub same_support: Vec<bool>,
    pub pairs: Vec<SiPairCheck>,
}

impl SiCheck {
    pub fn all_hold(&self) -> bool {
        self.conjugate.iter().all(|&b| b)
            && self.same_support.iter().all(|&b| b)
            && self
                .pairs
                .iter()
                .all(|p| p.even_cycles && p.defect_below_eps)
    }
}

impl SiFamily {
    /// Checks the three properties directly. `measures` are invariant
    /// measures of the original diagram.
    pub fn verify(&self, measures: &[InvariantMeasure]) -> Result<SiCheck> {
        let td = &self.diagram;
        let measures: Vec<InvariantMeasure> =
            measures.iter().map(|m| m.telescoped(&self.cuts)).collect();
        let top = self
            .elements
            .iter()
            .map(|(_, g)| g.level())
            .chain([self.base.level()])
            .max()
            .unwrap_or(0);
        let supp_s = self.base.support();
        let mut conjugate = Vec::new();
        let mut same_support = Vec::new();
        for (_, sa) in &self.elements {
            let ok = match self.base.conjugate_at_level(td, sa, top)? {
                Conjugacy::Conjugate(q) => self.base.conjugate_by(td, &q)?.same_as(td, sa)?,
                Conjugacy::NotAtThisLevel => false,
            };
            conjugate.push(ok);
            same_support.push(sa.support().same_set(td, &supp_s)?);
        }
        let mut pairs = Vec::new();
        for (i, (a, sa)) in self.elements.iter().enumerate() {
            for (b, sb) in &self.elements[i + 1..] {
                let q = sa.compose(td, &sb.inverse())?;
                let lost = supp_s.minus(td, &q.support())?;
                let defects = measures
                    .iter()
                    .map(|m| m.measure_of(&lost))
                    .collect::<Result<Vec<_>>>()?;
                let defect_below_eps = defects.iter().all(|v| *v.hi() < self.eps);
                pairs.push(SiPairCheck {
                    a: a.clone(),
                    b: b.clone(),
                    even_cycles: q.consists_of_even_cycles(),
                    defects,
                    defect_below_eps,
                });
            }
        }
        Ok(SiCheck {
            conjugate,
            same_support,
            pairs,
        })
    }
}

/// Upper bound on the measure of `Fix(h_n) ∩ A`, as a fraction of `μ(A)`.
pub fn hn_fixed_bound(hn: &Hn) -> Rational {
    let m = hn.max_fixed_fraction();
    if m > Rational::one() {
        Rational::one()
    } else {
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::rat;

    #[test]
    fn claim1_examples() {
        let c = claim1_pair(2).unwrap();
        assert_eq!((c.h0.to_string(), c.h1.to_string(), c.m), ("(0 1)".into(), "(2 3)".into(), 4));
        assert_eq!(c.h0.compose(&c.h1.inverse()).to_string(), "(0 1)(2 3)");

        let c = claim1_pair(3).unwrap();
        assert_eq!(c.m, 4);
        assert_eq!(c.h0.to_string(), "(0 1 2)");
        assert_eq!(c.h1, Perm::from_cycles(4, &[vec![3, 2, 1]]).unwrap());
        assert_eq!(c.h0.compose(&c.h1.inverse()).to_string(), "(0 1)(2 3)");

        let c = claim1_pair(4).unwrap();
        assert_eq!((c.h0.to_string(), c.h1.to_string(), c.m), ("(0 1 2 3)".into(), "(4 5 6 7)".into(), 8));
        assert!(claim1_pair(1).is_err());
    }

    #[test]
    fn hn_on_odometer() {
        let d = BratteliDiagram::odometer(2).unwrap();
        let x = ClopenSet::full(&d, 1).unwrap();
        let h = make_hn(&d, &x, 1).unwrap();
        assert!(h.element.is_involution());
        assert!(h.element.fix().is_empty());
        assert_eq!(h.element.level(), 2);
        assert_eq!(h.max_fixed_fraction(), rat(0, 1));
        let swap = GroupElement::at_vertex(&d, 1, 0, Perm::from_cycles(2, &[vec![0, 1]]).unwrap()).unwrap();
        for g in [GroupElement::identity(), swap] {
            let gh = g.compose(&d, &h.element).unwrap();
            let hg = h.element.compose(&d, &g).unwrap();
            assert_eq!(gh, hg);
        }
    }

    #[test]
    fn hn_needs_pairable_bundles() {
        let br = BratteliDiagram::br();
        let x = ClopenSet::full(&br, 1).unwrap();
        assert!(matches!(make_hn(&br, &x, 1), Err(Error::NoPairableEdges { .. })));

        let tb = br.telescope(&Cuts::every(2).unwrap()).unwrap();
        let x = ClopenSet::full(&tb, 1).unwrap();
        let h = make_hn(&tb, &x, 1).unwrap();
        assert!(h.element.is_involution());
        assert!(h.bundles.iter().all(|b| b.size == 4 && b.fixed_fraction == rat(0, 1)));
    }

    #[test]
    fn si_family_singleton_for_r0() {
        let d = BratteliDiagram::odometer(2).unwrap();
        let s = GroupElement::at_vertex(&d, 1, 0, Perm::from_cycles(2, &[vec![0, 1]]).unwrap()).unwrap();
        let fam = si_family(&d, &s, 0, &rat(1, 2)).unwrap();
        assert_eq!(fam.elements.len(), 1);
        assert_eq!(fam.elements[0].1, fam.base);
    }

    #[test]
    fn si_family_reports_small_bundles() {
        let one = BratteliDiagram::explicit(
            vec![1, 1, 1, 1],
            vec![crate::matrix::IntMatrix::filled(1, 1, 2); 3],
        )
        .unwrap();
        let s = GroupElement::at_vertex(&one, 1, 0, Perm::from_cycles(2, &[vec![0, 1]]).unwrap()).unwrap();
        assert!(matches!(
            si_family(&one, &s, 1, &rat(1, 2)),
            Err(Error::BundlesTooSmall { .. })
        ));
    }
}
