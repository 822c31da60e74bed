mod common;

use bratteli::character::{psd_check_exact, quadratic_form, Alpha, CharacterSpec, PsdVerdict};
use bratteli::value::{rat, Rational};
use bratteli::{ClopenSet, InvariantMeasure, Value};
use common::*;
use num::{One, Signed, Zero};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn spec(alpha: u32) -> (bratteli::BratteliDiagram, CharacterSpec) {
    let d = odometer2();
    let mu = InvariantMeasure::builtin(&d).unwrap();
    (d, CharacterSpec::single(mu, Alpha::Finite(alpha)))
}

/// Odometer paths at level `n` whose `k`-th edge (1-based) is 1.
fn coordinate_set(d: &bratteli::BratteliDiagram, n: usize, k: usize) -> ClopenSet {
    let members: Vec<usize> = (0..1usize << n)
        .filter(|&i| d.path_of_index(n, 0, i).unwrap()[k - 1].index == 1)
        .collect();
    ClopenSet::from_indices(d, n, &[members]).unwrap()
}

/// Sylvester's criterion, by exact Gaussian elimination on every principal
/// submatrix.
fn sylvester_psd(m: &[Vec<Rational>]) -> bool {
    let n = m.len();
    (1u32..1 << n).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let mut a: Vec<Vec<Rational>> = idx.iter().map(|&i| idx.iter().map(|&j| m[i][j].clone()).collect()).collect();
        let k = a.len();
        let mut det = Rational::one();
        for c in 0..k {
            let Some(p) = (c..k).find(|&r| !a[r][c].is_zero()) else {
                return true;
            };
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            det *= a[c][c].clone();
            for r in c + 1..k {
                let f = &a[r][c] / &a[c][c];
                for j in c..k {
                    let s = &f * &a[c][j];
                    a[r][j] -= s;
                }
            }
        }
        !det.is_negative()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn psd_verdict_matches_sylvester(entries in proptest::collection::vec(-3i64..=3, 10), size in 1usize..=4) {
        let mut m = vec![vec![Rational::zero(); size]; size];
        let mut it = entries.into_iter();
        for i in 0..size {
            for j in i..size {
                let x = rat(it.next().unwrap_or(1), 1);
                m[i][j] = x.clone();
                m[j][i] = x;
            }
        }
        match psd_check_exact(&m).unwrap() {
            PsdVerdict::Psd => prop_assert!(sylvester_psd(&m)),
            PsdVerdict::NotPsd(x) => {
                prop_assert!(quadratic_form(&m, &x).is_negative());
                prop_assert!(!sylvester_psd(&m));
            }
        }
    }

    #[test]
    fn gram_of_rank_one_is_psd(v in proptest::collection::vec(-5i64..=5, 1..6)) {
        let m: Vec<Vec<Rational>> = v.iter().map(|a| v.iter().map(|b| rat(a * b, 1)).collect()).collect();
        prop_assert_eq!(psd_check_exact(&m).unwrap(), PsdVerdict::Psd);
    }

    #[test]
    fn phi_is_multiplicative_and_monotone(a in 0i64..=8, b in 0i64..=8, c in 0i64..=8, alpha in 0u32..4) {
        let (_, s) = spec(alpha);
        let t = |x: i64| vec![Value::exact(rat(x, 8))];
        let (ta, tb) = (t(a), t(b));
        let prod = vec![ta[0].mul(&tb[0])];
        prop_assert_eq!(s.phi(&prod), s.phi(&ta).mul(&s.phi(&tb)));
        if a <= c {
            prop_assert!(s.phi(&ta).hi() <= s.phi(&t(c)).lo());
        }
    }

    #[test]
    fn character_is_a_class_function(seed in any::<u64>(), alpha in 0u32..4) {
        let mut rng = StdRng::seed_from_u64(seed);
        for d in [odometer2(), even_br()] {
            let mu = InvariantMeasure::builtin(&d).unwrap();
            let s = CharacterSpec::single(mu, Alpha::Finite(alpha));
            let g = random_element(&mut rng, &d, 2);
            let q = random_element(&mut rng, &d, 2);
            prop_assert_eq!(s.eval(&g.conjugate_by(&d, &q).unwrap()).unwrap(), s.eval(&g).unwrap());
            prop_assert_eq!(s.eval(&g).unwrap(), s.trace_projection(&g.support()).unwrap());
        }
    }
}

#[test]
fn semigroup_law_on_independent_coordinates() {
    let (d, s) = spec(1);
    for n in 2..=4 {
        for k1 in 1..=n {
            for k2 in 1..=n {
                let a = coordinate_set(&d, n, k1);
                let b = coordinate_set(&d, n, k2);
                let lhs = s.trace_projection(&a).unwrap().mul(&s.trace_projection(&b).unwrap());
                let rhs = s.trace_projection(&a.union(&d, &b).unwrap()).unwrap();
                if k1 != k2 {
                    assert_eq!(lhs, rhs, "n = {n}, edges {k1}, {k2}");
                } else {
                    assert_eq!(rhs, s.trace_projection(&a).unwrap());
                }
            }
        }
    }
}

#[test]
fn union_trace_never_exceeds_the_smaller_trace() {
    let mut rng = StdRng::seed_from_u64(11);
    let d = even_br();
    let mu = InvariantMeasure::builtin(&d).unwrap();
    let s = CharacterSpec::single(mu, Alpha::Finite(2));
    for _ in 0..100 {
        let a = random_set(&mut rng, &d, 2);
        let b = random_set(&mut rng, &d, 1);
        let u = s.trace_projection(&a.union(&d, &b).unwrap()).unwrap();
        let ta = s.trace_projection(&a).unwrap();
        let tb = s.trace_projection(&b).unwrap();
        assert!(u.hi() <= ta.lo() && u.hi() <= tb.lo());
    }
}

#[test]
fn trivial_and_regular_characters() {
    let mut rng = StdRng::seed_from_u64(12);
    let d = odometer2();
    let mu = InvariantMeasure::builtin(&d).unwrap();
    let trivial = CharacterSpec::new(vec![(mu.clone(), Alpha::Finite(0)), (mu.clone(), Alpha::Finite(0))]);
    let regular = CharacterSpec::new(vec![(mu.clone(), Alpha::Finite(2)), (mu, Alpha::Infinite)]);
    for _ in 0..50 {
        let g = random_element(&mut rng, &d, 3);
        assert_eq!(trivial.eval(&g).unwrap(), Value::one());
        let want = if g.is_identity() { Value::one() } else { Value::zero() };
        assert_eq!(regular.eval(&g).unwrap(), want);
    }
}

#[test]
fn irrational_measures_give_intervals() {
    // Fibonacci: Perron eigenvalue is the golden ratio
    let d = bratteli::BratteliDiagram::stationary(
        vec![1, 1],
        bratteli::IntMatrix::from_rows(vec![vec![1, 1], vec![1, 0]]),
    )
    .unwrap();
    let mu = InvariantMeasure::builtin(&d).unwrap();
    assert!(!mu.is_exact());
    let s = CharacterSpec::single(mu, Alpha::Finite(1));
    let a = ClopenSet::cylinder(&d, 2, 0, 0).unwrap();
    let t = s.trace_projection(&a).unwrap();
    assert!(!t.is_exact());
    assert!(t.width() < rat(1, 1 << 20));
    // level-2 weights are (λ^-2, λ^-3) for the golden ratio λ
    let inv = (5f64.sqrt() - 1.0) / 2.0;
    assert!((t.to_f64() - (1.0 - inv.powi(2))).abs() < 1e-9, "{}", t.to_f64());
}
