//! Characters `χ(g) = ∏ μ_i(Fix g)^{α_i}` of full groups, their axioms, and
//! the two convergence harnesses (asymptotic multiplicativity and the limit
//! of `χ(h_n)` towards a projection trace).

use std::fmt;

use num::{One, Signed, ToPrimitive, Zero};

use crate::clopen::ClopenSet;
use crate::constructions::make_hn;
use crate::diagram::{BratteliDiagram, Edge, Segments};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::measure::InvariantMeasure;
use crate::perm::Perm;
use crate::value::{format_rational, int, Rational, Value};

/// Exponent of one measure: a natural number or `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alpha {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Finite(k) => write!(f, "{k}"),
            Alpha::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterSpec {
    terms: Vec<(InvariantMeasure, Alpha)>,
}

impl CharacterSpec {
    pub fn new(terms: Vec<(InvariantMeasure, Alpha)>) -> CharacterSpec {
        CharacterSpec { terms }
    }

    /// A single measure with exponent `alpha`.
    pub fn single(measure: InvariantMeasure, alpha: Alpha) -> CharacterSpec {
        CharacterSpec::new(vec![(measure, alpha)])
    }

    pub fn terms(&self) -> &[(InvariantMeasure, Alpha)] {
        &self.terms
    }

    pub fn is_regular(&self) -> bool {
        self.terms.iter().any(|(_, a)| *a == Alpha::Infinite)
    }

    /// Checks that every measure has the vertex counts of `d` on levels
    /// `0..=depth`.
    pub fn check_against(&self, d: &BratteliDiagram, depth: usize) -> Result<()> {
        for (i, (m, _)) in self.terms.iter().enumerate() {
            for n in 0..=depth {
                let (have, want) = (m.weights(n)?.len(), d.vertex_count(n)?);
                if have != want {
                    return Err(Error::MeasureMismatch(format!(
                        "term {i}: {have} weights at level {n}, diagram has {want} vertices"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `φ(t) = ∏ t_i^{α_i}`; for a regular spec, 1 when every `t_i = 1` and
    /// 0 otherwise.
    pub fn phi(&self, t: &[Value]) -> Value {
        if self.is_regular() {
            return if t.iter().all(|x| x.as_exact().is_some_and(|r| r.is_one())) {
                Value::one()
            } else {
                Value::zero()
            };
        }
        self.terms
            .iter()
            .zip(t)
            .fold(Value::one(), |acc, ((_, a), x)| match a {
                Alpha::Finite(k) => acc.mul(&x.pow(*k)),
                Alpha::Infinite => unreachable!("handled above"),
            })
    }

    fn measures_of(&self, a: &ClopenSet) -> Result<Vec<Value>> {
        self.terms.iter().map(|(m, _)| m.measure_of(a)).collect()
    }

    /// `χ(g)`.
    pub fn eval(&self, g: &GroupElement) -> Result<Value> {
        if self.is_regular() {
            return Ok(if g.is_identity() { Value::one() } else { Value::zero() });
        }
        Ok(self.phi(&self.measures_of(&g.fix())?))
    }

    /// `tr(P^A) = φ(μ(X∖A))`, with `P^∅ = I`.
    pub fn trace_projection(&self, a: &ClopenSet) -> Result<Value> {
        if self.is_regular() {
            return Ok(if a.is_empty() { Value::one() } else { Value::zero() });
        }
        Ok(self.phi(&self.measures_of(&a.complement())?))
    }

    /// `M_ij = χ(g_i g_j⁻¹)`.
    pub fn gram_matrix(&self, d: &BratteliDiagram, elements: &[GroupElement]) -> Result<Vec<Vec<Value>>> {
        let inverses: Vec<GroupElement> = elements.iter().map(|g| g.inverse()).collect();
        elements
            .iter()
            .map(|gi| {
                inverses
                    .iter()
                    .map(|hj| self.eval(&gi.compose(d, hj)?))
                    .collect()
            })
            .collect()
    }

    /// Compares `χ(gh)` and `χ(hg)` on every unordered pair (including
    /// `g = h`, which is trivially central, only once).
    pub fn centrality_check(&self, d: &BratteliDiagram, elements: &[GroupElement]) -> Result<CentralityReport> {
        let mut report = CentralityReport::default();
        for (i, g) in elements.iter().enumerate() {
            for (j, h) in elements.iter().enumerate().skip(i + 1) {
                let gh = self.eval(&g.compose(d, h)?)?;
                let hg = self.eval(&h.compose(d, g)?)?;
                report.pairs_checked += 1;
                let differ = if gh.is_exact() && hg.is_exact() { gh != hg } else { !gh.overlaps(&hg) };
                if differ {
                    report.violations.push((i, j, gh, hg));
                }
            }
        }
        Ok(report)
    }
}

#[derive(Debug, Clone, Default)]
pub struct CentralityReport {
    pub pairs_checked: usize,
    /// `(i, j, χ(g_i g_j), χ(g_j g_i))` for pairs that differ.
    pub violations: Vec<(usize, usize, Value, Value)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PsdVerdict {
    Psd,
    /// A vector `x` with `xᵀMx < 0`.
    NotPsd(Vec<Rational>),
}

fn check_symmetric<T: PartialEq>(m: &[Vec<T>]) -> Result<()> {
    let n = m.len();
    for (i, row) in m.iter().enumerate() {
        if row.len() != n {
            return Err(Error::ArgumentOutOfRange(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        for j in 0..i {
            if m[i][j] != m[j][i] {
                return Err(Error::NotSymmetric(i, j));
            }
        }
    }
    Ok(())
}

/// `xᵀMx`.
pub fn quadratic_form(m: &[Vec<Rational>], x: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (i, row) in m.iter().enumerate() {
        for (j, mij) in row.iter().enumerate() {
            acc += &x[i] * mij * &x[j];
        }
    }
    acc
}

/// Exact positive-semidefiniteness by Schur-complement recursion. Sparse
/// witnesses (`e_i`, `e_i ± e_j`) are preferred when one exists.
pub fn psd_check_exact(m: &[Vec<Rational>]) -> Result<PsdVerdict> {
    check_symmetric(m)?;
    let n = m.len();
    let unit = |i: usize, j: Option<(usize, i64)>| {
        let mut x = vec![Rational::zero(); n];
        x[i] = Rational::one();
        if let Some((j, s)) = j {
            x[j] = Rational::from_integer(s.into());
        }
        x
    };
    for i in 0..n {
        if m[i][i].is_negative() {
            return Ok(PsdVerdict::NotPsd(unit(i, None)));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for s in [-1, 1] {
                let x = unit(i, Some((j, s)));
                if quadratic_form(m, &x).is_negative() {
                    return Ok(PsdVerdict::NotPsd(x));
                }
            }
        }
    }
    Ok(match schur_witness(m.to_vec()) {
        None => PsdVerdict::Psd,
        Some(x) => PsdVerdict::NotPsd(x),
    })
}

fn schur_witness(m: Vec<Vec<Rational>>) -> Option<Vec<Rational>> {
    let n = m.len();
    if n == 0 {
        return None;
    }
    let a = &m[0][0];
    let b: Vec<Rational> = m[0][1..].to_vec();
    if a.is_negative() {
        let mut x = vec![Rational::zero(); n];
        x[0] = Rational::one();
        return Some(x);
    }
    if a.is_zero() {
        if let Some(j) = b.iter().position(|x| !x.is_zero()) {
            // x = t e_0 + e_j with 2 t b_j + C_jj = -1
            let cjj = &m[j + 1][j + 1];
            let t = -(cjj + Rational::one()) / (int(2) * &b[j]);
            let mut x = vec![Rational::zero(); n];
            x[0] = t;
            x[j + 1] = Rational::one();
            return Some(x);
        }
        let minor: Vec<Vec<Rational>> = m[1..].iter().map(|r| r[1..].to_vec()).collect();
        return schur_witness(minor).map(|y| std::iter::once(Rational::zero()).chain(y).collect());
    }
    let s: Vec<Vec<Rational>> = (1..n)
        .map(|i| (1..n).map(|j| &m[i][j] - &b[i - 1] * &b[j - 1] / a).collect())
        .collect();
    schur_witness(s).map(|y| {
        let head = -y.iter().zip(&b).fold(Rational::zero(), |acc, (yi, bi)| acc + yi * bi) / a;
        std::iter::once(head).chain(y).collect()
    })
}

/// Floating-point variant of the same recursion. A pivot within `tol` of
/// zero is treated as zero when its row is also negligible; otherwise the
/// verdict is ambiguous.
pub fn psd_check_numeric(m: &[Vec<f64>], tol: f64) -> Result<PsdVerdict> {
    check_symmetric(m)?;
    let mut a: Vec<Vec<f64>> = m.to_vec();
    // rows of the accumulated back-substitution: x = T y
    let n = a.len();
    let mut step = 0;
    let mut lifts: Vec<(usize, Vec<f64>, f64)> = Vec::new();
    let mut active: Vec<usize> = (0..n).collect();
    while let Some(&p) = active.first() {
        let rest: Vec<usize> = active[1..].to_vec();
        let piv = a[p][p];
        let row_small = rest.iter().all(|&j| a[p][j].abs() <= tol);
        if piv < -tol {
            let mut x = vec![0.0; n];
            x[p] = 1.0;
            return Ok(PsdVerdict::NotPsd(lift_back(x, &lifts)));
        }
        if piv.abs() <= tol {
            if !row_small {
                return Err(Error::ToleranceAmbiguous {
                    step,
                    pivot: format!("{piv:e}"),
                });
            }
        } else {
            for &i in &rest {
                for &j in &rest {
                    a[i][j] -= a[i][p] * a[p][j] / piv;
                }
            }
            let coeffs: Vec<f64> = (0..n).map(|j| if rest.contains(&j) { a[p][j] } else { 0.0 }).collect();
            lifts.push((p, coeffs, piv));
        }
        active = rest;
        step += 1;
    }
    Ok(PsdVerdict::Psd)
}

fn lift_back(mut x: Vec<f64>, lifts: &[(usize, Vec<f64>, f64)]) -> Vec<Rational> {
    for (p, b, piv) in lifts.iter().rev() {
        x[*p] = -b.iter().zip(&x).map(|(bi, xi)| bi * xi).sum::<f64>() / piv;
    }
    x.iter()
        .map(|v| Rational::from_float(*v).unwrap_or_default())
        .collect()
}

/// Exact check when every entry is an exact rational; otherwise the
/// midpoints are checked numerically with tolerance `tol`.
pub fn psd_check(m: &[Vec<Value>], tol: f64) -> Result<PsdVerdict> {
    if m.iter().flatten().all(Value::is_exact) {
        let exact: Vec<Vec<Rational>> = m
            .iter()
            .map(|r| r.iter().map(|v| v.lo().clone()).collect())
            .collect();
        psd_check_exact(&exact)
    } else {
        let widest = m.iter().flatten().map(|v| v.width().to_f64().unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
        let approx: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(Value::to_f64).collect()).collect();
        psd_check_numeric(&approx, tol.max(widest * m.len() as f64))
    }
}

/// One step of the multiplicativity harness.
#[derive(Debug, Clone)]
pub struct MultStep {
    pub n: usize,
    /// Level at which membership in `B_n` is decided.
    pub set_level: usize,
    /// `μ_i(B_n)` as realized.
    pub achieved: Vec<Value>,
    pub h: GroupElement,
    pub chi_g: Value,
    pub chi_gh: Value,
    /// `χ(g) ∏ c_i^{α_i}`.
    pub predicted: Value,
    pub defect: Value,
}

/// How far below a level the harness searches for suitable levels.
const HARNESS_SEARCH: usize = 12;

impl CharacterSpec {
    /// For each `n`, builds a `G_n`-invariant set `B_n` with `μ_i(B_n)`
    /// closest to `targets[i]` (exactly, or within `tol`), an element `h_n`
    /// with `Fix(h_n) = B_n` that preserves level-`n` cylinders, and compares
    /// `χ(g h_n)` with `χ(g) ∏ c_i^{α_i}`.
    pub fn multiplicativity_harness(
        &self,
        d: &BratteliDiagram,
        g: &GroupElement,
        targets: &[Rational],
        levels: impl IntoIterator<Item = usize>,
        tol: &Rational,
    ) -> Result<Vec<MultStep>> {
        if targets.len() != self.terms.len() {
            return Err(Error::ArgumentOutOfRange(format!(
                "{} targets for {} measures",
                targets.len(),
                self.terms.len()
            )));
        }
        if targets.iter().any(|c| c.is_negative() || *c > Rational::one()) {
            return Err(Error::ArgumentOutOfRange("targets must lie in [0, 1]".into()));
        }
        let chi_g = self.eval(g)?;
        let predicted = chi_g.mul(&self.phi(&targets.iter().cloned().map(Value::exact).collect::<Vec<_>>()));
        let mut out = Vec::new();
        for n in levels {
            if g.level() > n {
                return Err(Error::ElementTooDeep { element: g.level(), level: n });
            }
            let (set_level, chosen, achieved) = self.choose_classes(d, n, targets, tol)?;
            let h = invariant_mover(d, n, set_level, &chosen)?;
            let chi_gh = self.eval(&g.compose(d, &h)?)?;
            let defect = chi_gh.sub(&predicted).abs();
            out.push(MultStep {
                n,
                set_level,
                achieved,
                h,
                chi_g: chi_g.clone(),
                chi_gh,
                predicted: predicted.clone(),
                defect,
            });
        }
        Ok(out)
    }

    /// Picks a level `N > n` and, for every class `(u, x)` of segments from
    /// level-`n` vertex `u` to level-`N` vertex `x`, how many of them (the
    /// first `k[u][x]`) belong to `B_n`.
    #[allow(clippy::type_complexity)]
    fn choose_classes(
        &self,
        d: &BratteliDiagram,
        n: usize,
        targets: &[Rational],
        tol: &Rational,
    ) -> Result<(usize, Vec<Vec<u64>>, Vec<Value>)> {
        let h_n = d.path_counts(n)?;
        let mut best: Option<(Rational, Vec<Value>)> = None;
        let limit = d.depth().map_or(n + HARNESS_SEARCH, |dd| dd.min(n + HARNESS_SEARCH));
        for big in n + 1..=limit {
            let seg = match d.product(n, big) {
                Ok(p) => p,
                Err(Error::CountOverflow(_)) => break,
                Err(e) => return Err(e),
            };
            let weights: Vec<Vec<Value>> = self
                .terms
                .iter()
                .map(|(m, _)| m.weights(big))
                .collect::<Result<_>>()?;
            // unit contribution of one segment in class (u, x) to measure i
            let classes: Vec<(usize, usize, u64, Vec<Rational>)> = (0..h_n.len())
                .flat_map(|u| (0..seg.nrows()).map(move |x| (u, x)))
                .filter_map(|(u, x)| {
                    let c = seg.get(x, u);
                    (c > 0).then(|| {
                        let unit = weights.iter().map(|w| w[x].midpoint() * int(h_n[u])).collect();
                        (u, x, c, unit)
                    })
                })
                .collect();
            let k = fit_counts(&classes, targets);
            let err = fit_error(&classes, &k, targets);
            let mut chosen = vec![vec![0u64; seg.nrows()]; h_n.len()];
            for ((u, x, _, _), kk) in classes.iter().zip(&k) {
                chosen[*u][*x] = *kk;
            }
            let achieved: Vec<Value> = (0..self.terms.len())
                .map(|i| {
                    classes.iter().zip(&k).fold(Value::zero(), |acc, ((u, x, _, _), kk)| {
                        acc.add(&weights[i][*x].scale(&int(h_n[*u] * kk)))
                    })
                })
                .collect();
            if err <= *tol {
                return Ok((big, chosen, achieved));
            }
            if best.as_ref().is_none_or(|(e, _)| err < *e) {
                best = Some((err, achieved));
            }
        }
        Err(Error::UnreachableTarget {
            best: best
                .map(|(_, a)| a.iter().map(|v| v.to_string()).collect())
                .unwrap_or_default(),
        })
    }
}

fn fit_error(classes: &[(usize, usize, u64, Vec<Rational>)], k: &[u64], targets: &[Rational]) -> Rational {
    (0..targets.len())
        .map(|i| {
            let s = classes
                .iter()
                .zip(k)
                .fold(Rational::zero(), |acc, ((_, _, _, unit), kk)| acc + &unit[i] * int(*kk));
            (s - &targets[i]).abs()
        })
        .max()
        .unwrap_or_default()
}

/// Coordinate search for segment counts; exact whenever a single sweep can
/// hit every target.
fn fit_counts(classes: &[(usize, usize, u64, Vec<Rational>)], targets: &[Rational]) -> Vec<u64> {
    let mut k = vec![0u64; classes.len()];
    for _ in 0..4 {
        for c in 0..classes.len() {
            let (_, _, max, unit) = &classes[c];
            let mut candidates = vec![0, *max];
            k[c] = 0;
            for i in 0..targets.len() {
                if unit[i].is_zero() {
                    continue;
                }
                let rest = classes
                    .iter()
                    .zip(&k)
                    .fold(Rational::zero(), |acc, ((_, _, _, u), kk)| acc + &u[i] * int(*kk));
                let want = (&targets[i] - rest) / &unit[i];
                for r in [want.floor(), want.ceil()] {
                    if let Some(r) = r.to_integer().to_i128() {
                        candidates.push(r.clamp(0, *max as i128) as u64);
                    }
                }
            }
            let best = candidates
                .into_iter()
                .min_by_key(|&cand| {
                    k[c] = cand;
                    fit_error(classes, &k, targets)
                })
                .unwrap();
            k[c] = best;
        }
    }
    k
}

/// The element fixing exactly the level-`big` paths whose segment from
/// level `n` is among the first `chosen[u][x]` of its class, and cyclically
/// shifting the next segment of every other path. Level-`n` prefixes are
/// never touched.
fn invariant_mover(d: &BratteliDiagram, n: usize, big: usize, chosen: &[Vec<u64>]) -> Result<GroupElement> {
    let t_big = d.table(big)?;
    let seg_n: Vec<Segments> = (0..t_big.vertex_count(n)).map(|u| Segments::new(&t_big, n, u, big)).collect();
    let moving: Vec<bool> = (0..t_big.vertex_count(big))
        .map(|x| (0..seg_n.len()).any(|u| chosen[u][x] < seg_n[u].count(big, x)))
        .collect();
    if !moving.iter().any(|&b| b) {
        return Ok(GroupElement::identity());
    }
    // a level above `big` where every bundle leaving a moving vertex has >= 2 segments
    let limit = d.depth().map_or(big + HARNESS_SEARCH, |dd| dd.min(big + HARNESS_SEARCH));
    let mut top = None;
    let mut last_err = None;
    for m in big + 1..=limit {
        let p = d.product(big, m)?;
        let bad = (0..p.ncols())
            .filter(|&x| moving[x])
            .find_map(|x| (0..p.nrows()).find(|&y| p.get(y, x) == 1).map(|y| (x, y)));
        match bad {
            None => {
                top = Some(m);
                break;
            }
            Some((x, y)) => {
                last_err = Some(Error::NoPairableEdges {
                    level: big,
                    source_vertex: x,
                    target: y,
                })
            }
        }
    }
    let top = match top {
        Some(m) => m,
        None => {
            return Err(last_err.unwrap_or(Error::DepthExceeded {
                requested: big + 1,
                available: big,
            }))
        }
    };
    let t = d.table(top)?;
    let seg_n: Vec<Segments> = (0..t.vertex_count(n)).map(|u| Segments::new(&t, n, u, big)).collect();
    let seg_big: Vec<Segments> = (0..t.vertex_count(big)).map(|x| Segments::new(&t, big, x, top)).collect();
    let perms = (0..t.vertex_count(top))
        .map(|y| {
            let images = (0..t.count(top, y))
                .map(|i| -> Result<usize> {
                    let edges = t.path_of_index(top, y, i)?;
                    let u = if n == 0 { 0 } else { edges[n - 1].target };
                    let x = edges[big - 1].target;
                    let sigma = seg_n[u].index(&t, &edges[n..big]) as u64;
                    if sigma < chosen[u][x] {
                        return Ok(i);
                    }
                    let c = seg_big[x].count(top, y) as usize;
                    let tau = seg_big[x].index(&t, &edges[big..top]);
                    let moved: Vec<Edge> = edges[..big]
                        .iter()
                        .cloned()
                        .chain(seg_big[x].edges(&t, top, y, (tau + 1) % c))
                        .collect();
                    Ok(t.index_of_path(&moved)?.1)
                })
                .collect::<Result<Vec<_>>>()?;
            Perm::from_images(images)
        })
        .collect::<Result<Vec<_>>>()?;
    GroupElement::from_perms(d, top, perms)
}

/// One step of the projection-limit check.
#[derive(Debug, Clone)]
pub struct ProjStep {
    pub n: usize,
    pub chi_h: Value,
    pub trace: Value,
    pub defect: Value,
    /// Bound on the defect from the per-bundle fixed fractions.
    pub bound: Value,
    pub within_bound: bool,
}

impl CharacterSpec {
    /// Compares `χ(h_n)` with `tr(P^A)` for each `n`.
    pub fn projection_limit_check(
        &self,
        d: &BratteliDiagram,
        a: &ClopenSet,
        levels: impl IntoIterator<Item = usize>,
    ) -> Result<Vec<ProjStep>> {
        let trace = self.trace_projection(a)?;
        let outside = self.measures_of(&a.complement())?;
        let inside = self.measures_of(a)?;
        let mut out = Vec::new();
        for n in levels {
            let hn = make_hn(d, a, n)?;
            let chi_h = self.eval(&hn.element)?;
            let defect = chi_h.sub(&trace).abs();
            let delta = hn.max_fixed_fraction();
            let bound = if self.is_regular() {
                Value::zero()
            } else {
                let grown: Vec<Value> = outside
                    .iter()
                    .zip(&inside)
                    .map(|(t, s)| t.add(&s.scale(&delta)))
                    .collect();
                self.phi(&grown).sub(&self.phi(&outside))
            };
            let within_bound = defect.lo() <= bound.hi();
            out.push(ProjStep {
                n,
                chi_h,
                trace: trace.clone(),
                defect,
                bound,
                within_bound,
            });
        }
        Ok(out)
    }
}

pub fn format_matrix(m: &[Vec<Value>]) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect()
}

pub fn format_vector(x: &[Rational]) -> String {
    format!("({})", x.iter().map(format_rational).collect::<Vec<_>>().join(","))
}
