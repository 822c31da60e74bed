//! Finite permutations of `{0, ..., n-1}`.

use std::fmt;

use crate::error::{Error, Result};

/// A permutation stored as its image vector: `self.apply(i) == images[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm {
            images: (0..n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::NotAPermutation(format!("{images:?}")));
            }
            seen[x] = true;
        }
        Ok(Perm { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Perm {
        debug_assert!(Perm::from_images(images.clone()).is_ok());
        Perm { images }
    }

    /// Builds a permutation of `{0..n}` from disjoint cycles; `(a b c)` sends
    /// `a -> b -> c -> a`.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Perm> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for c in cycles {
            for (k, &a) in c.iter().enumerate() {
                if a >= n || touched[a] {
                    return Err(Error::NotAPermutation(format!("cycles {cycles:?}")));
                }
                touched[a] = true;
                images[a] = c[(k + 1) % c.len()];
            }
        }
        Ok(Perm { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn into_images(self) -> Vec<usize> {
        self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.len(), other.len(), "permutation sizes differ");
        Perm {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Perm { images: inv }
    }

    pub fn fixed_points(&self) -> impl Iterator<Item = usize> + '_ {
        self.images
            .iter()
            .enumerate()
            .filter(|(i, x)| i == *x)
            .map(|(i, _)| i)
    }

    /// All cycles, including fixed points, each starting at its least element,
    /// ordered by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut c = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                c.push(x);
                x = self.images[x];
            }
            out.push(c);
        }
        out
    }

    /// Cycle lengths sorted in decreasing order (a partition of `len()`).
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    /// Period of every point under `self`.
    pub fn periods(&self) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        for c in self.cycles() {
            for &x in &c {
                out[x] = c.len();
            }
        }
        out
    }

    /// Every cycle has length 1 or an even length.
    pub fn has_even_cycles(&self) -> bool {
        self.cycles().iter().all(|c| c.len() == 1 || c.len() % 2 == 0)
    }

    /// Direct sum: `other` acts on `len()..len()+other.len()`.
    pub fn direct_sum(&self, other: &Perm) -> Perm {
        let n = self.len();
        let mut images = self.images.clone();
        images.extend(other.images.iter().map(|&x| x + n));
        Perm { images }
    }

    /// Some `q` with `q ∘ self ∘ q⁻¹ = other`, if the cycle types agree.
    pub fn conjugator_to(&self, other: &Perm) -> Option<Perm> {
        if self.len() != other.len() {
            return None;
        }
        let sort = |p: &Perm| {
            let mut c = p.cycles();
            c.sort_by_key(|c| std::cmp::Reverse(c.len()));
            c
        };
        let (a, b) = (sort(self), sort(other));
        if a.len() != b.len() || a.iter().zip(&b).any(|(x, y)| x.len() != y.len()) {
            return None;
        }
        let mut q = vec![0; self.len()];
        for (ca, cb) in a.iter().zip(&b) {
            for (x, y) in ca.iter().zip(cb) {
                q[*x] = *y;
            }
        }
        Some(Perm { images: q })
    }
}

impl fmt::Display for Perm {
    /// Cycle notation without fixed points; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for c in self.cycles().into_iter().filter(|c| c.len() > 1) {
            any = true;
            let parts: Vec<String> = c.iter().map(ToString::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cycle_notation_round_trip() {
        let p = Perm::from_cycles(5, &[vec![0, 2, 4]]).unwrap();
        assert_eq!(p.images(), &[2, 1, 4, 3, 0]);
        assert_eq!(p.to_string(), "(0 2 4)");
        assert_eq!(p.cycle_type(), vec![3, 1, 1]);
        assert!(!p.has_even_cycles());
        assert_eq!(Perm::identity(3).to_string(), "()");
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Perm::from_images(vec![0, 0]).is_err());
        assert!(Perm::from_images(vec![2, 0]).is_err());
        assert!(Perm::from_cycles(3, &[vec![0, 1], vec![1, 2]]).is_err());
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = Perm> {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Perm::from_images(v).unwrap())
    }

    proptest! {
        #[test]
        fn conjugator_conjugates((a, b) in (1usize..9).prop_flat_map(|n| (arb_perm(n), arb_perm(n)))) {
            match a.conjugator_to(&b) {
                Some(q) => prop_assert_eq!(q.compose(&a).compose(&q.inverse()), b),
                None => prop_assert_ne!(a.cycle_type(), b.cycle_type()),
            }
        }

        #[test]
        fn inverse_cancels(a in (1usize..12).prop_flat_map(arb_perm)) {
            prop_assert!(a.compose(&a.inverse()).is_identity());
            prop_assert_eq!(a.periods().iter().sum::<usize>() >= a.len(), true);
        }
    }
}
