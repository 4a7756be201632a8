//! Invariants over randomly generated spaces, presheaves and cocycles.

use std::collections::BTreeMap;
use std::sync::Arc;

use lien::gerbes::{
    cech_coboundary, check_cocycle2, cocycles2_equivalent, enumerate_cocycles2, h2, twist, Band,
    Cochain, Cocycle2,
};
use lien::groups::{inner_automorphism, FiniteGroup};
use lien::sheaves::{
    etale_space, evaluation_map, germ_morphism, is_sheaf, sections_sheaf, sheafify, Presheaf,
    StalkFunctor,
};
use lien::space::{bits, AbstractNerve, FinitePoset};
use lien::torsors::{
    check_cocycle1, classify_cocycles1, cocycles1_equivalent, enumerate_cocycles1, gauge1,
    CechCoefficients,
};
use lien::Budget;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spaces() -> Vec<FinitePoset> {
    vec![
        FinitePoset::from_labels(&["o", "c"], &[("c", "o")]).unwrap(),
        FinitePoset::from_labels(&["a", "b", "c"], &[("c", "a"), ("c", "b")]).unwrap(),
        FinitePoset::from_labels(&["x", "y", "z"], &[("z", "y"), ("y", "x")]).unwrap(),
        FinitePoset::pseudo_circle(),
    ]
}

fn random_sheaf(space: &FinitePoset, rng: &mut ChaCha8Rng) -> Presheaf {
    loop {
        let sizes: Vec<usize> = (0..space.len()).map(|_| rng.gen_range(0..=3)).collect();
        let mut edges = BTreeMap::new();
        let mut ok = true;
        for (a, b) in space.covering_pairs() {
            if sizes[a] > 0 && sizes[b] == 0 {
                ok = false;
                break;
            }
            edges.insert((a, b), (0..sizes[a]).map(|_| rng.gen_range(0..sizes[b])).collect());
        }
        if !ok {
            continue;
        }
        if let Ok(f) = StalkFunctor::new(space, sizes, &edges) {
            return Presheaf::from_functor(&f);
        }
    }
}

/// Quotients of subsets of a fixed set; relations refine and deletions grow
/// as the open grows.
fn random_presheaf(space: &FinitePoset, rng: &mut ChaCha8Rng) -> Presheaf {
    let a = rng.gen_range(1..=3usize);
    let parts: Vec<Vec<usize>> = (0..=space.len())
        .map(|_| (0..a).map(|_| rng.gen_range(0..a)).collect())
        .collect();
    let deleted: Vec<Vec<bool>> = (0..space.len())
        .map(|_| (0..a).map(|_| rng.gen_bool(0.2)).collect())
        .collect();
    let opens = space.open_masks();
    let key = |u: u64, e: usize| -> Vec<usize> {
        let mut k = vec![parts[space.len()][e]];
        k.extend(bits(u).map(|x| parts[x][e]));
        k
    };
    let classes: Vec<Vec<(Vec<usize>, usize)>> = opens
        .iter()
        .map(|&u| {
            let mut m = BTreeMap::new();
            for e in 0..a {
                if bits(u).all(|x| !deleted[x][e]) {
                    m.entry(key(u, e)).or_insert(e);
                }
            }
            m.into_iter().collect()
        })
        .collect();
    let sizes = classes.iter().map(Vec::len).collect();
    Presheaf::new(space, sizes, |u, v, s| {
        let k = key(opens[v], classes[u][s].1);
        classes[v].iter().position(|(kk, _)| *kk == k).unwrap()
    })
    .unwrap()
}

fn small_groups() -> Vec<FiniteGroup> {
    ["Z2", "Z3", "S3", "Z2xZ2", "Q8", "D4"]
        .iter()
        .map(|n| FiniteGroup::by_name(n).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sheaves_round_trip_through_etale_spaces(space in 0..4usize, seed: u64) {
        let x = &spaces()[space];
        let p = random_sheaf(x, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(is_sheaf(&p));
        let e = etale_space(&p);
        let g = sections_sheaf(&e);
        prop_assert!(germ_morphism(&p, &e, &g).is_isomorphism(&p, &g));
        let e2 = etale_space(&g);
        prop_assert!(e2.is_isomorphism_to(&e, &evaluation_map(&e, &g, &e2)));
    }

    #[test]
    fn sheafification_is_a_sheaf_and_idempotent(space in 0..4usize, seed: u64) {
        let x = &spaces()[space];
        let p = random_presheaf(x, &mut ChaCha8Rng::seed_from_u64(seed));
        let s = sheafify(&p);
        prop_assert!(is_sheaf(&s.sheaf));
        prop_assert!(s.unit.is_morphism(&p, &s.sheaf));
        prop_assert!(s.unit.is_locally_surjective(&s.sheaf));
        let again = sheafify(&s.sheaf);
        prop_assert!(again.unit.is_isomorphism(&s.sheaf, &again.sheaf));
        if is_sheaf(&p) {
            prop_assert!(s.unit.is_isomorphism(&p, &s.sheaf));
        }
    }

    #[test]
    fn inner_automorphisms_compose(g in 0..6usize, a in 0..8usize, b in 0..8usize) {
        let group = &small_groups()[g];
        let (a, b) = (a % group.order(), b % group.order());
        let ab = inner_automorphism(group, group.mul(a, b));
        prop_assert_eq!(inner_automorphism(group, a).compose(&inner_automorphism(group, b)), ab);
        prop_assert_eq!(group.mul(a, group.inv(a)), group.unit());
    }

    #[test]
    fn gauged_one_cocycles_stay_in_their_class(g in 0..4usize, pick: usize, seed: u64) {
        let group = &small_groups()[g];
        let n = AbstractNerve::triangle();
        let c = CechCoefficients::constant(&n, group).unwrap();
        let all = enumerate_cocycles1(&c, &Budget::default()).unwrap();
        let z = &all[pick % all.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f: Vec<usize> = (0..n.len()).map(|_| rng.gen_range(0..group.order())).collect();
        let w = gauge1(&c, z, &f);
        prop_assert!(check_cocycle1(&c, &w).holds());
        prop_assert!(cocycles1_equivalent(&c, z, &w, &Budget::default()).unwrap().is_some());
        let classes = classify_cocycles1(&c, &all, &Budget::default()).unwrap();
        prop_assert_eq!(classes.classes.iter().map(|k| k.size).sum::<usize>(), all.len());
    }

    #[test]
    fn twisted_two_cocycles_stay_in_their_class(g in 0..3usize, pick: usize, seed: u64) {
        let group = &small_groups()[g];
        let n = AbstractNerve::tetrahedron();
        let band = Arc::new(Band::constant(&n, group).unwrap());
        let all = enumerate_cocycles2(&band, &Budget::default()).unwrap();
        let c = Cocycle2::new(band.clone(), all[pick % all.len()].clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k: Vec<Vec<usize>> = n
            .simplices(2)
            .iter()
            .map(|_| vec![rng.gen_range(0..group.order())])
            .collect();
        let d = twist(&c, &k).unwrap();
        prop_assert!(check_cocycle2(&d).holds());
        prop_assert!(cocycles2_equivalent(&c, &d, &Budget::default()).unwrap().is_some());
        let h = h2(&band, &Budget::default()).unwrap();
        prop_assert_eq!(h.classes.iter().map(|k| k.size).sum::<usize>(), h.cocycles);
    }

    #[test]
    fn coboundary_squares_to_zero(order in 2..5usize, seed: u64) {
        let group = FiniteGroup::cyclic(order);
        let n = AbstractNerve::full_simplex_skeleton(5, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for degree in 0..3 {
            let c = Cochain {
                degree,
                values: n
                    .simplices(degree + 1)
                    .iter()
                    .map(|_| vec![rng.gen_range(0..order)])
                    .collect(),
            };
            let dd = cech_coboundary(&n, &group, &cech_coboundary(&n, &group, &c).unwrap()).unwrap();
            prop_assert!(dd.is_unit(&group));
        }
    }
}
