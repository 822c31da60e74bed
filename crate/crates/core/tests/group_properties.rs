mod common;

use bratteli::{BratteliDiagram, ClopenSet, GroupElement};
use common::*;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn diagrams() -> Vec<BratteliDiagram> {
    vec![odometer2(), even_br(), BratteliDiagram::odometer(3).unwrap()]
}

fn sample(seed: u64, which: usize, level: usize) -> (BratteliDiagram, GroupElement, GroupElement, GroupElement) {
    let mut rng = StdRng::seed_from_u64(seed);
    let d = diagrams().swap_remove(which % 3);
    let g = random_element(&mut rng, &d, level);
    let h = random_element(&mut rng, &d, level);
    let k = random_element(&mut rng, &d, level);
    (d, g, h, k)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_axioms(seed in any::<u64>(), which in 0usize..3) {
        let (d, g, h, k) = sample(seed, which, 2);
        let left = g.compose(&d, &h).unwrap().compose(&d, &k).unwrap();
        let right = g.compose(&d, &h.compose(&d, &k).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert!(g.compose(&d, &g.inverse()).unwrap().is_identity());
        prop_assert_eq!(g.compose(&d, &GroupElement::identity()).unwrap(), g.clone());
    }

    #[test]
    fn embedding_does_not_change_the_element(seed in any::<u64>(), which in 0usize..3, extra in 0usize..2) {
        let (d, g, _, _) = sample(seed, which, 2);
        let e = g.embed(&d, g.level() + extra).unwrap();
        prop_assert!(e.same_as(&d, &g).unwrap());
        prop_assert_eq!(e.reduced(&d).unwrap(), g.clone());
        prop_assert!(e.fix().same_set(&d, &g.fix()).unwrap());
    }

    #[test]
    fn fix_and_support_partition(seed in any::<u64>(), which in 0usize..3) {
        let (d, g, _, _) = sample(seed, which, 2);
        let fix = g.fix();
        let supp = g.support();
        prop_assert!(fix.intersect(&d, &supp).unwrap().is_empty());
        prop_assert!(fix.union(&d, &supp).unwrap().is_full());
        // g maps its support onto itself and fixes Fix(g) pointwise
        prop_assert!(g.image_of(&d, &supp).unwrap().same_set(&d, &supp).unwrap());
    }

    #[test]
    fn conjugation_moves_fixed_sets(seed in any::<u64>(), which in 0usize..3) {
        let (d, g, q, _) = sample(seed, which, 2);
        let c = g.conjugate_by(&d, &q).unwrap();
        let moved = q.image_of(&d, &g.fix()).unwrap();
        prop_assert!(c.fix().same_set(&d, &moved).unwrap());
        prop_assert_eq!(c.cycle_data().level, c.level());
    }

    #[test]
    fn invariant_sets_are_preserved(seed in any::<u64>(), which in 0usize..3, n in 1usize..3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let d = diagrams().swap_remove(which);
        let a = random_set(&mut rng, &d, n);
        let g = random_element(&mut rng, &d, n);
        let image = g.image_of(&d, &a).unwrap();
        // every union of whole level-n vertex classes is G_n-invariant
        let classes: Vec<Vec<usize>> = (0..a.members().len())
            .map(|v| if a.count_at(v) > 0 { (0..a.members()[v].len()).collect() } else { vec![] })
            .collect();
        let b = ClopenSet::from_indices(&d, n, &classes).unwrap();
        prop_assert!(b.is_gn_invariant(&d, n).unwrap());
        prop_assert!(g.image_of(&d, &b).unwrap().same_set(&d, &b).unwrap());
        prop_assert_eq!(image.count_at(0), a.count_at(0));
    }
}

#[test]
fn conjugate_at_level_finds_witnesses() {
    let mut rng = StdRng::seed_from_u64(7);
    let d = odometer2();
    for _ in 0..50 {
        let g = random_element(&mut rng, &d, 3);
        let q = random_element(&mut rng, &d, 3);
        let c = g.conjugate_by(&d, &q).unwrap();
        match g.conjugate_at_level(&d, &c, 3).unwrap() {
            bratteli::Conjugacy::Conjugate(w) => assert!(g.conjugate_by(&d, &w).unwrap().same_as(&d, &c).unwrap()),
            bratteli::Conjugacy::NotAtThisLevel => panic!("conjugates not recognized"),
        }
    }
}
