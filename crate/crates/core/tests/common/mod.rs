//! Random instances shared by the integration and acceptance tests.
#![allow(dead_code)]

use bratteli::{BratteliDiagram, ClopenSet, Cuts, GroupElement, IntMatrix, Perm};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn odometer2() -> BratteliDiagram {
    BratteliDiagram::odometer(2).unwrap()
}

/// B_R telescoped to its even levels.
pub fn even_br() -> BratteliDiagram {
    BratteliDiagram::br().telescope(&Cuts::every(2).unwrap()).unwrap()
}

pub fn random_perm(rng: &mut impl Rng, n: usize) -> Perm {
    let mut images: Vec<usize> = (0..n).collect();
    images.shuffle(rng);
    Perm::from_images(images).unwrap()
}

/// A permutation moving only a few random points, so that fixed sets are
/// not almost always empty.
pub fn sparse_perm(rng: &mut impl Rng, n: usize) -> Perm {
    let k = rng.gen_range(0..=n.min(4));
    let mut pts: Vec<usize> = (0..n).collect();
    pts.shuffle(rng);
    let chosen = &pts[..k];
    let mut shuffled = chosen.to_vec();
    shuffled.shuffle(rng);
    let mut images: Vec<usize> = (0..n).collect();
    for (a, b) in chosen.iter().zip(&shuffled) {
        images[*a] = *b;
    }
    Perm::from_images(images).unwrap()
}

pub fn random_element(rng: &mut impl Rng, d: &BratteliDiagram, max_level: usize) -> GroupElement {
    let n = rng.gen_range(0..=max_level);
    let h = d.path_counts(n).unwrap();
    let perms = h
        .iter()
        .map(|&c| {
            if rng.gen_bool(0.5) {
                sparse_perm(rng, c as usize)
            } else {
                random_perm(rng, c as usize)
            }
        })
        .collect();
    GroupElement::from_perms(d, n, perms).unwrap()
}

pub fn random_set(rng: &mut impl Rng, d: &BratteliDiagram, n: usize) -> ClopenSet {
    let h = d.path_counts(n).unwrap();
    let sets: Vec<Vec<usize>> = h
        .iter()
        .map(|&c| (0..c as usize).filter(|_| rng.gen_bool(0.5)).collect())
        .collect();
    ClopenSet::from_indices(d, n, &sets).unwrap()
}

/// A random explicit diagram: `depth` levels of 1..=3 vertices, entries in
/// 0..=3 with no zero rows or columns.
pub fn random_diagram(rng: &mut impl Rng, depth: usize) -> BratteliDiagram {
    let mut counts = vec![1usize];
    for _ in 0..depth {
        counts.push(rng.gen_range(1..=3));
    }
    let incidence = (0..depth)
        .map(|n| {
            let (r, c) = (counts[n + 1], counts[n]);
            loop {
                let rows: Vec<Vec<u64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(0..=3)).collect()).collect();
                let rows_ok = rows.iter().all(|row| row.iter().any(|&x| x > 0));
                let cols_ok = (0..c).all(|j| rows.iter().any(|row| row[j] > 0));
                if rows_ok && cols_ok {
                    break IntMatrix::from_rows(rows);
                }
            }
        })
        .collect();
    BratteliDiagram::explicit(counts, incidence).unwrap()
}

/// All permutations of `0..n` (Heap's algorithm).
pub fn all_perms(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k - 1 {
            heap(k - 1, a, out);
            if k % 2 == 0 {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
        }
        heap(k - 1, a, out);
    }
    let mut out = Vec::new();
    heap(n, &mut (0..n).collect(), &mut out);
    out
}

/// Cycle lengths of a permutation given by its images, computed directly.
pub fn cycle_lengths(images: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; images.len()];
    let mut out = Vec::new();
    for start in 0..images.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = images[x];
            len += 1;
        }
        out.push(len);
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}
