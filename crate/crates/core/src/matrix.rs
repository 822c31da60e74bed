use serde::{Deserialize, Serialize};

/// Nonnegative integer matrix stored row-major.
///
/// Incidence matrices use the convention `F[w][v]` = number of edges from
/// `v` at level `n` to `w` at level `n + 1`, so `F` has `|V_{n+1}|` rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntMatrix {
    rows: Vec<Vec<u64>>,
}

impl IntMatrix {
    /// Builds a matrix from rows. Ragged input is accepted here and caught by
    /// [`IntMatrix::shape`] checks during diagram validation.
    pub fn from_rows(rows: Vec<Vec<u64>>) -> Self {
        IntMatrix { rows }
    }

    pub fn filled(rows: usize, cols: usize, value: u64) -> Self {
        IntMatrix {
            rows: vec![vec![value; cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::filled(n, n, 0);
        for i in 0..n {
            m.rows[i][i] = 1;
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// `Some((rows, cols))` when every row has the same length.
    pub fn shape(&self) -> Option<(usize, usize)> {
        let c = self.ncols();
        self.rows
            .iter()
            .all(|r| r.len() == c)
            .then_some((self.nrows(), c))
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.rows[row][col]
    }

    pub fn row(&self, row: usize) -> &[u64] {
        &self.rows[row]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    /// `self * other`, `None` on overflow.
    pub fn checked_mul(&self, other: &IntMatrix) -> Option<IntMatrix> {
        let (n, k) = (self.nrows(), self.ncols());
        let m = other.ncols();
        assert_eq!(k, other.nrows(), "matrix shapes do not chain");
        let mut out = vec![vec![0u64; m]; n];
        for i in 0..n {
            for (l, &a) in self.rows[i].iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for j in 0..m {
                    let t = a.checked_mul(other.rows[l][j])?;
                    out[i][j] = out[i][j].checked_add(t)?;
                }
            }
        }
        Some(IntMatrix { rows: out })
    }

    /// `self * x`, `None` on overflow.
    pub fn checked_apply(&self, x: &[u64]) -> Option<Vec<u64>> {
        self.rows
            .iter()
            .map(|r| {
                r.iter().zip(x).try_fold(0u64, |acc, (&a, &b)| {
                    acc.checked_add(a.checked_mul(b)?)
                })
            })
            .collect()
    }

    pub fn is_positive(&self) -> bool {
        self.rows.iter().flatten().all(|&x| x > 0)
    }

    pub fn all_entries(&self, pred: impl Fn(u64) -> bool) -> bool {
        self.rows.iter().flatten().all(|&x| pred(x))
    }

    pub fn min_entry(&self) -> u64 {
        self.rows.iter().flatten().copied().min().unwrap_or(0)
    }

    pub fn transpose(&self) -> IntMatrix {
        let (n, m) = (self.nrows(), self.ncols());
        let mut out = vec![vec![0u64; n]; m];
        for i in 0..n {
            for j in 0..m {
                out[j][i] = self.rows[i][j];
            }
        }
        IntMatrix { rows: out }
    }

    /// Boolean pattern product, used for primitivity tests without overflow.
    pub(crate) fn pattern_mul(&self, other: &IntMatrix) -> IntMatrix {
        let (n, m) = (self.nrows(), other.ncols());
        let mut out = vec![vec![0u64; m]; n];
        for i in 0..n {
            for (l, &a) in self.rows[i].iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for j in 0..m {
                    if other.rows[l][j] > 0 {
                        out[i][j] = 1;
                    }
                }
            }
        }
        IntMatrix { rows: out }
    }

    /// Primitive (some power strictly positive), via Wielandt's bound
    /// `(k - 1)^2 + 1` on the exponent.
    pub fn is_primitive(&self) -> bool {
        let k = self.nrows();
        if k == 0 || self.ncols() != k {
            return false;
        }
        let bound = (k - 1) * (k - 1) + 1;
        let mut p = self.pattern_mul(&IntMatrix::identity(k));
        for _ in 1..bound {
            if p.is_positive() {
                return true;
            }
            p = p.pattern_mul(self);
        }
        p.is_positive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_primitivity() {
        let f = IntMatrix::from_rows(vec![vec![1, 1], vec![1, 0]]);
        let f2 = f.checked_mul(&f).unwrap();
        assert_eq!(f2.rows(), &[vec![2, 1], vec![1, 1]]);
        assert!(f.is_primitive());
        assert!(!IntMatrix::identity(2).is_primitive());
        let swap = IntMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]);
        assert!(!swap.is_primitive());
    }

    #[test]
    fn overflow_is_reported() {
        let big = IntMatrix::from_rows(vec![vec![u64::MAX]]);
        assert!(big.checked_mul(&big).is_none());
    }
}
