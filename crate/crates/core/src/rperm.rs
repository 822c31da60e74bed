//! Rational permutations of `[0, 1)`: `g_s(x) = (s(⌊nx⌋) + {nx}) / n` for
//! a permutation `s` of `{0, …, n-1}`, and their identification with the
//! full group of the diagram whose level `n` has `n + 1` vertices, each
//! joined to every vertex of the next level by one edge.

use std::fmt;

use num::integer::lcm;
use num::{BigInt, One, Signed, ToPrimitive, Zero};

use crate::character::Alpha;
use crate::diagram::BratteliDiagram;
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::perm::Perm;
use crate::value::{int, Rational};

#[derive(Debug, Clone)]
pub struct RationalPermutation {
    perm: Perm,
}

impl RationalPermutation {
    pub fn new(perm: Perm) -> Result<RationalPermutation> {
        if perm.is_empty() {
            return Err(Error::ArgumentOutOfRange("denominator must be at least 1".into()));
        }
        Ok(RationalPermutation { perm })
    }

    pub fn identity(n: usize) -> RationalPermutation {
        RationalPermutation {
            perm: Perm::identity(n.max(1)),
        }
    }

    pub fn denominator(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &Perm {
        &self.perm
    }

    /// The same map on `n·m` subintervals: `s'(j) = m s(⌊j/m⌋) + j mod m`.
    pub fn refine(&self, m: usize) -> Result<RationalPermutation> {
        if m == 0 {
            return Err(Error::ArgumentOutOfRange("multiplier must be at least 1".into()));
        }
        let images = (0..self.denominator() * m)
            .map(|j| m * self.perm.apply(j / m) + j % m)
            .collect();
        Ok(RationalPermutation {
            perm: Perm::from_images_unchecked(images),
        })
    }

    fn at(&self, n: usize) -> RationalPermutation {
        self.refine(n / self.denominator()).expect("positive multiplier")
    }

    /// `self ∘ other` at the least common multiple of the denominators.
    pub fn compose(&self, other: &RationalPermutation) -> RationalPermutation {
        let n = lcm(self.denominator(), other.denominator());
        RationalPermutation {
            perm: self.at(n).perm.compose(&other.at(n).perm),
        }
    }

    pub fn inverse(&self) -> RationalPermutation {
        RationalPermutation {
            perm: self.perm.inverse(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.is_identity()
    }

    pub fn apply(&self, x: &Rational) -> Result<Rational> {
        if x.is_negative() || *x >= Rational::one() {
            return Err(Error::ArgumentOutOfRange(format!("{x} is not in [0, 1)")));
        }
        let n = int(self.denominator() as u64);
        let nx = x * &n;
        let block = nx.floor();
        let frac = &nx - &block;
        let j = block.to_integer().to_usize().expect("block index below n");
        Ok((int(self.perm.apply(j) as u64) + frac) / n)
    }

    /// Lebesgue measure of the fixed set: the fixed blocks over `n`.
    pub fn fix_measure(&self) -> Rational {
        Rational::new(
            BigInt::from(self.perm.fixed_points().count()),
            BigInt::from(self.denominator()),
        )
    }

    /// `χ_k(g) = λ(Fix g)^k`; `k = 0` is the identity character and `k = ∞`
    /// the regular one.
    pub fn char_r(&self, k: Alpha) -> Rational {
        match k {
            Alpha::Finite(k) => num::pow(self.fix_measure(), k as usize),
            Alpha::Infinite if self.is_identity() => Rational::one(),
            Alpha::Infinite => Rational::zero(),
        }
    }
}

impl PartialEq for RationalPermutation {
    fn eq(&self, other: &Self) -> bool {
        let n = lcm(self.denominator(), other.denominator());
        self.at(n).perm == other.at(n).perm
    }
}

impl Eq for RationalPermutation {}

impl fmt::Display for RationalPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {} blocks", self.perm, self.denominator())
    }
}

/// `i_n(a_1, …, a_n) = Σ a_k (n+1)!/(k+1)!`, evaluated without checking
/// that `a_k ≤ k`.
pub fn br_index_formula(digits: &[u64]) -> BigInt {
    let n = digits.len() as u64;
    let mut acc = BigInt::zero();
    for (k, &a) in (1u64..).zip(digits) {
        let weight: BigInt = (k + 2..=n + 1).map(BigInt::from).product();
        acc += BigInt::from(a) * weight;
    }
    acc
}

/// `i_n` on valid digit strings (`a_k ≤ k`).
pub fn br_index(digits: &[usize]) -> Result<usize> {
    let mut acc = 0usize;
    for (k, &a) in (1usize..).zip(digits) {
        if a > k {
            return Err(Error::ArgumentOutOfRange(format!("digit a_{k} = {a} exceeds {k}")));
        }
        acc = acc
            .checked_mul(k + 1)
            .and_then(|x| x.checked_add(a))
            .ok_or(Error::CountOverflow(k))?;
    }
    Ok(acc)
}

/// Inverse of [`br_index`] on `0..(n+1)!`.
pub fn br_digits(n: usize, mut j: usize) -> Result<Vec<usize>> {
    let total = (2..=n + 1).try_fold(1usize, |acc, k| acc.checked_mul(k)).ok_or(Error::CountOverflow(n))?;
    if j >= total {
        return Err(Error::ArgumentOutOfRange(format!("{j} is not below {total}")));
    }
    let mut digits = vec![0; n];
    for k in (1..=n).rev() {
        digits[k - 1] = j % (k + 1);
        j /= k + 1;
    }
    Ok(digits)
}

/// The rational permutation of `g` at level `n ≥ level(g)`, with
/// denominator `(n+1)!`. Paths are read as digit strings `a_k` = vertex
/// reached at level `k` and numbered by `i_n`.
pub fn to_rperm_at(d: &BratteliDiagram, g: &GroupElement, n: usize) -> Result<RationalPermutation> {
    if !d.is_br() {
        return Err(Error::WrongDiagram);
    }
    let g = g.embed(d, n)?;
    let t = d.table(n)?;
    let digits_of = |v: usize, i: usize| -> Result<Vec<usize>> {
        Ok(t.path_of_index(n, v, i)?.iter().map(|e| e.target).collect())
    };
    let total = t.total(n);
    let mut images = vec![0; total];
    for v in 0..t.vertex_count(n) {
        for i in 0..t.count(n, v) {
            let j = br_index(&digits_of(v, i)?)?;
            let k = br_index(&digits_of(v, g.apply(v, i))?)?;
            images[j] = k;
        }
    }
    RationalPermutation::new(Perm::from_images(images)?)
}

pub fn to_rperm(d: &BratteliDiagram, g: &GroupElement) -> Result<RationalPermutation> {
    to_rperm_at(d, g, g.level())
}

/// The element of level `n` acting on paths as `s` acts on their `i_n`
/// numbers. `s` must have `(n+1)!` points and preserve the last digit.
pub fn from_rperm(d: &BratteliDiagram, s: &RationalPermutation, n: usize) -> Result<GroupElement> {
    if !d.is_br() {
        return Err(Error::WrongDiagram);
    }
    let t = d.table(n)?;
    let s = if s.denominator() == t.total(n) {
        s.clone()
    } else if t.total(n) % s.denominator() == 0 {
        s.refine(t.total(n) / s.denominator())?
    } else {
        return Err(Error::ArgumentOutOfRange(format!(
            "denominator {} does not divide {}",
            s.denominator(),
            t.total(n)
        )));
    };
    let perms = (0..t.vertex_count(n))
        .map(|v| {
            let images = (0..t.count(n, v))
                .map(|i| {
                    let digits: Vec<usize> = t.path_of_index(n, v, i)?.iter().map(|e| e.target).collect();
                    let image = br_digits(n, s.perm().apply(br_index(&digits)?))?;
                    let edges = image
                        .iter()
                        .enumerate()
                        .map(|(k, &a)| crate::diagram::Edge {
                            source: if k == 0 { 0 } else { image[k - 1] },
                            target: a,
                            index: 0,
                        })
                        .collect::<Vec<_>>();
                    let (w, j) = t.index_of_path(&edges)?;
                    if w != v {
                        return Err(Error::NotAPermutation(format!(
                            "moves a path ending at vertex {v} to vertex {w}"
                        )));
                    }
                    Ok(j)
                })
                .collect::<Result<Vec<_>>>()?;
            Perm::from_images(images)
        })
        .collect::<Result<Vec<_>>>()?;
    GroupElement::from_perms(d, n, perms)
}

/// `g` as an element of the full group: the permutation of the
/// `i_{m-1}`-numbered level-`(m-1)` prefixes, with `m` the least level such
/// that the denominator divides `m!`, acting at level `m` and keeping the
/// last edge.
pub fn element_of_rperm(d: &BratteliDiagram, g: &RationalPermutation) -> Result<GroupElement> {
    let n = g.denominator();
    let mut m = 1usize;
    let mut fact = 1usize;
    while fact % n != 0 {
        m += 1;
        fact = fact.checked_mul(m).ok_or(Error::CountOverflow(m))?;
    }
    from_rperm(d, g, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::InvariantMeasure;
    use crate::value::rat;

    fn rp(n: usize, cycles: &[Vec<usize>]) -> RationalPermutation {
        RationalPermutation::new(Perm::from_cycles(n, cycles).unwrap()).unwrap()
    }

    #[test]
    fn refine_examples() {
        assert!(RationalPermutation::identity(3).refine(5).unwrap().is_identity());
        let r = rp(2, &[vec![0, 1]]).refine(2).unwrap();
        assert_eq!(r.perm(), &Perm::from_cycles(4, &[vec![0, 2], vec![1, 3]]).unwrap());
        let r = rp(3, &[vec![0, 1, 2]]).refine(2).unwrap();
        assert_eq!(r.perm(), &Perm::from_cycles(6, &[vec![0, 2, 4], vec![1, 3, 5]]).unwrap());
        assert!(rp(2, &[vec![0, 1]]).refine(0).is_err());
    }

    #[test]
    fn apply_examples() {
        assert_eq!(RationalPermutation::identity(1).apply(&rat(1, 3)).unwrap(), rat(1, 3));
        assert_eq!(rp(2, &[vec![0, 1]]).apply(&rat(1, 4)).unwrap(), rat(3, 4));
        assert!(rp(2, &[vec![0, 1]]).apply(&rat(1, 1)).is_err());
        assert!(rp(2, &[vec![0, 1]]).apply(&rat(-1, 5)).is_err());
        let g = rp(3, &[vec![0, 2]]);
        let h = rp(2, &[vec![0, 1]]);
        assert!(g.compose(&g.inverse()).is_identity());
        assert_eq!(g.compose(&h).denominator(), 6);
        assert_eq!(rp(2, &[vec![0, 1]]), rp(2, &[vec![0, 1]]).refine(3).unwrap());
    }

    #[test]
    fn fix_measure_examples() {
        let e = RationalPermutation::identity(4);
        assert_eq!(e.fix_measure(), rat(1, 1));
        assert_eq!(e.char_r(Alpha::Finite(3)), rat(1, 1));
        assert_eq!(e.char_r(Alpha::Infinite), rat(1, 1));
        let s = rp(2, &[vec![0, 1]]);
        assert_eq!(s.fix_measure(), rat(0, 1));
        assert_eq!(s.char_r(Alpha::Finite(1)), rat(0, 1));
        assert_eq!(s.char_r(Alpha::Finite(0)), rat(1, 1));
        let s = rp(3, &[vec![0, 1]]);
        assert_eq!(s.fix_measure(), rat(1, 3));
        assert_eq!(s.char_r(Alpha::Finite(2)), rat(1, 9));
        assert_eq!(s.char_r(Alpha::Infinite), rat(0, 1));
    }

    #[test]
    fn index_formula() {
        assert_eq!(br_index(&[1, 2]).unwrap(), 5);
        assert_eq!(br_index_formula(&[1, 2]), BigInt::from(5));
        assert_eq!(br_index_formula(&[2, 0, 3]), BigInt::from(27));
        assert!(br_index(&[2, 0, 3]).is_err());
        for n in 0..5 {
            let total: usize = (2..=n + 1).product();
            for j in 0..total {
                assert_eq!(br_index(&br_digits(n, j).unwrap()).unwrap(), j);
            }
        }
    }

    #[test]
    fn br_correspondence() {
        let d = BratteliDiagram::br();
        assert_eq!(
            to_rperm(&d, &GroupElement::identity()).unwrap(),
            RationalPermutation::identity(1)
        );
        assert!(to_rperm_at(&d, &GroupElement::identity(), 3).unwrap().is_identity());
        assert_eq!(to_rperm_at(&d, &GroupElement::identity(), 3).unwrap().denominator(), 24);

        let swap = GroupElement::at_vertex(&d, 2, 1, Perm::from_cycles(2, &[vec![0, 1]]).unwrap()).unwrap();
        let r = to_rperm(&d, &swap).unwrap();
        assert_eq!(r.denominator(), 6);
        let mu = InvariantMeasure::builtin(&d).unwrap();
        assert_eq!(&r.fix_measure(), mu.measure_of(&swap.fix()).unwrap().as_exact().unwrap());
        assert_eq!(from_rperm(&d, &r, 2).unwrap(), swap);

        let three = rp(3, &[vec![0, 1, 2]]);
        let g = element_of_rperm(&d, &three).unwrap();
        assert_eq!(g.level(), 3);
        assert_eq!(to_rperm(&d, &g).unwrap(), three);

        let odo = BratteliDiagram::odometer(2).unwrap();
        assert_eq!(to_rperm(&odo, &GroupElement::identity()), Err(Error::WrongDiagram));
    }
}
