use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use strata0::divisor::{blowup_is_trivial, d_mu_boundary_form, d_mu_psi_form, volume};
use strata0::family::{
    marked_point_coords, on_curve, random_point, verify_ratio_identity, Coord, LocalChart,
};
use strata0::intersection::{keel_relation, product_number, psi_monomial};
use strata0::strata::*;
use strata0::Rational;

fn signature() -> impl Strategy<Value = Signature> {
    (2i64..=4, 4usize..=7)
        .prop_flat_map(|(d, n)| (Just(d), prop::collection::vec(1 - d..=2, n - 1)))
        .prop_filter_map("last entry out of range", |(d, mut k)| {
            let last = -2 * d - k.iter().sum::<i64>();
            if last < 1 - d {
                return None;
            }
            k.push(last);
            validate_signature(d, &k).ok()
        })
}

fn with_perm(max_n: usize) -> impl Strategy<Value = (Signature, Vec<usize>)> {
    signature()
        .prop_filter("too many markings", move |s| s.n() <= max_n)
        .prop_flat_map(|s| {
            let n = s.n();
            (Just(s), Just((1..=n).collect::<Vec<_>>()).prop_shuffle())
        })
}

fn with_tree() -> impl Strategy<Value = (Signature, StableTree)> {
    signature()
        .prop_filter("keep trees small", |s| s.n() <= 6)
        .prop_flat_map(|s| {
            let trees = enumerate_stable_trees(s.n(), s.n() - 3);
            let len = trees.len();
            (Just(s), (0..len).prop_map(move |i| trees[i].clone()))
        })
}

// Partitions up to the tie rule for balanced two-block partitions.
fn phat_key(p: &MultiBlockPartition) -> (Vec<usize>, BTreeSet<Vec<usize>>) {
    let b: Vec<Vec<usize>> = p.blocks().iter().map(|x| x.to_vec()).collect();
    if p.r() == 1 {
        (Vec::new(), b.into_iter().collect())
    } else {
        (b[0].clone(), b[1..].iter().cloned().collect())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weights_sum_to_two(s in signature()) {
        let total: Rational = s.weights().as_slice().iter().sum();
        prop_assert_eq!(total, Rational::from_integer(2.into()));
        prop_assert!(s.weights().as_slice().iter().all(|m| *m < Rational::one()));
    }

    #[test]
    fn boundary_weight_is_equivariant((s, perm) in with_perm(7)) {
        let ps = s.permuted(&perm);
        for p in enumerate_two_block(&s) {
            let q = TwoBlockPartition::from_split(p.split().permute(&perm), &ps);
            prop_assert_eq!(boundary_weight(&p, &s).unwrap(), boundary_weight(&q, &ps).unwrap());
        }
    }

    #[test]
    fn phat_and_exceptional_are_equivariant((s, perm) in with_perm(7)) {
        let ps = s.permuted(&perm);
        let a: BTreeSet<_> = enumerate_p_hat(&s).iter().map(|p| phat_key(&p.permute(&perm))).collect();
        let b: BTreeSet<_> = enumerate_p_hat(&ps).iter().map(phat_key).collect();
        prop_assert_eq!(a, b);
        let e = exceptional_divisor(&s);
        let pe = exceptional_divisor(&ps);
        for (p, c) in e.support() {
            prop_assert_eq!(&pe.coefficient(&p.permute(&perm)), c);
        }
        prop_assert_eq!(e.support().count(), pe.support().count());
    }

    #[test]
    fn volume_is_invariant((s, perm) in with_perm(6)) {
        let ps = s.permuted(&perm);
        match (volume(&s), volume(&ps)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.coefficient, b.coefficient),
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            _ => prop_assert!(false, "one side failed"),
        }
    }

    #[test]
    fn node_weights_balance((s, t) in with_tree()) {
        prop_assert!(weight_balance_defect(&t, &s).is_zero());
    }

    #[test]
    fn exponent_vectors_differ_on_one_edge((s, t) in with_tree()) {
        for (e, &(a, b)) in t.edges().iter().enumerate() {
            let ba = exponent_vector(&t, a, &s);
            let bb = exponent_vector(&t, b, &s);
            let p = TwoBlockPartition::from_split(t.edge_split(e), &s);
            let scaled = boundary_weight_scaled(&p, &s);
            for f in 0..t.num_edges() {
                if f == e {
                    let mut pair = [ba.entries()[f], bb.entries()[f]];
                    pair.sort();
                    prop_assert_eq!(pair, [0, scaled]);
                } else {
                    prop_assert_eq!(ba.entries()[f], bb.entries()[f]);
                }
            }
        }
    }

    #[test]
    fn support_matches_principal_count((s, t) in with_tree()) {
        let pa = principal_subcurves(&t, &s);
        prop_assert!(!pa.principal.is_empty());
        prop_assert_eq!(in_ideal_support(&t, &s), pa.principal.len() >= 2);
        prop_assert_eq!(fiber_projective_dim(&t, &s), pa.principal.len() - 1);
    }

    #[test]
    fn trivial_blowup_has_zero_exceptional_divisor(s in signature()) {
        if blowup_is_trivial(&s) {
            prop_assert!(exceptional_divisor(&s).is_zero());
        }
    }

    #[test]
    fn ideal_generators_come_from_principal_vertices((s, t) in with_tree()) {
        let pa = principal_subcurves(&t, &s);
        let gens = ideal_generators(&t, &s);
        prop_assert_eq!(gens.len(), pa.principal.len());
        for g in &gens {
            let hits = pa.principal.iter().filter(|grp| grp.iter().any(|&v| exponent_vector(&t, v, &s) == *g)).count();
            prop_assert!(hits >= 1);
        }
    }

    #[test]
    fn orders_identity(m in prop::collection::vec(1i64..=6, 2..=4)) {
        let m: Vec<BigInt> = m.into_iter().map(BigInt::from).collect();
        let orders = vanishing_orders_from_factors(&m);
        let total: BigInt = m.iter().product();
        let r = m.len() + 1;
        let lhs: BigInt = m.iter().zip(&orders).take(r - 1).map(|(a, b)| a * b).sum();
        prop_assert_eq!(lhs, BigInt::from(r as i64 - 1) * total);
    }

    #[test]
    fn psi_integrals(n in 4usize..=7, seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = vec![0usize; n];
        for _ in 0..n - 3 {
            a[rng.gen_range(0..n)] += 1;
        }
        let fact = |k: usize| (1..=k as u64).fold(BigInt::one(), |x, y| x * y);
        let expected = Rational::new(fact(n - 3), a.iter().map(|&x| fact(x)).product());
        prop_assert_eq!(psi_monomial(n, &a).unwrap(), expected);
    }

    #[test]
    fn keel_relations_do_not_change_products(s in signature().prop_filter("n = 5", |s| s.n() == 5), c in -3i64..=3) {
        let dmu = d_mu_boundary_form(&s);
        let shifted = dmu.add(&keel_relation(5, 1, 2, 3, 4).unwrap().scale(&Rational::from_integer(c.into())));
        prop_assert_eq!(product_number(5, &[dmu.clone(), dmu.clone()]).unwrap(), product_number(5, &[shifted.clone(), dmu.clone()]).unwrap());
        prop_assert_eq!(product_number(5, &[dmu.clone(), dmu]).unwrap(), product_number(5, &[shifted.clone(), shifted]).unwrap());
    }

    #[test]
    fn divisor_forms_agree_on_five_points(s in signature().prop_filter("n = 5", |s| s.n() == 5)) {
        let b = d_mu_boundary_form(&s);
        let p = d_mu_psi_form(&s);
        let bb = product_number(5, &[b.clone(), b.clone()]).unwrap();
        prop_assert_eq!(&bb, &product_number(5, &[b, p.clone()]).unwrap());
        prop_assert_eq!(&bb, &product_number(5, &[p.clone(), p]).unwrap());
    }

    #[test]
    fn marked_points_lie_on_the_curve((s, t) in with_tree(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = (0..t.num_edges()).map(|e| Rational::new((e as i64 + 2).into(), 7.into())).collect();
        let chart = LocalChart::random(s.clone(), t, params, &mut rng).unwrap();
        for i in 1..=s.n() {
            let coords = marked_point_coords(&chart, i).unwrap();
            let z: Option<Vec<Rational>> = coords.iter().map(|c| c.finite().cloned()).collect();
            if let Some(z) = z {
                prop_assert!(on_curve(&chart, &z));
            } else {
                prop_assert!(coords.contains(&Coord::Infinity));
            }
        }
        let p = random_point(&chart, 0, &mut rng).unwrap();
        prop_assert!(on_curve(&chart, &p));
    }

    #[test]
    fn ratio_identity_on_random_charts((s, t) in with_tree(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = (0..t.num_edges()).map(|e| Rational::new((3 - e as i64 * 5).into(), 11.into())).collect();
        let chart = LocalChart::random(s, t.clone(), params, &mut rng).unwrap();
        for &(a, b) in t.edges() {
            prop_assert!(verify_ratio_identity(&chart, a, b, 2, &mut rng).unwrap());
        }
        let last = t.num_vertices() - 1;
        prop_assert!(verify_ratio_identity(&chart, 0, last, 2, &mut rng).unwrap());
    }
}
