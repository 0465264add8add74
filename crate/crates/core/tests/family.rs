use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use strata0::family::*;
use strata0::strata::{exponent_vector, validate_signature, ExponentVector, Signature};
use strata0::{Marks, Rational};

fn m(v: &[usize]) -> Marks {
    Marks::from_iter(v.iter().copied())
}

fn q(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

fn fin(c: &Coord) -> Rational {
    c.finite().expect("finite").clone()
}

// Case (a): nu = (-2, -2).
fn case_a() -> (Signature, [Marks; 3]) {
    let sig = validate_signature(2, &[-1, -1, -1, -1, -1, -1, 1, 1]).unwrap();
    (sig, [m(&[3, 4, 5, 6]), m(&[1, 7]), m(&[2, 8])])
}

fn case_b() -> (Signature, [Marks; 3]) {
    let sig = validate_signature(2, &[0, 0, -1, -1, -1, 0, -1]).unwrap();
    (sig, [m(&[1, 2]), m(&[3, 4, 5]), m(&[6, 7])])
}

fn case_c() -> (Signature, [Marks; 3]) {
    let sig = validate_signature(2, &[2, -1, -1, -1, -1, -1, -1]).unwrap();
    (sig, [m(&[1]), m(&[2, 3, 4]), m(&[5, 6, 7])])
}

#[test]
fn case_labels() {
    assert_eq!(
        classify_codim2_case(&case_a().0, &case_a().1).unwrap(),
        Codim2Case::A
    );
    assert_eq!(
        classify_codim2_case(&case_b().0, &case_b().1).unwrap(),
        Codim2Case::B
    );
    assert_eq!(
        classify_codim2_case(&case_c().0, &case_c().1).unwrap(),
        Codim2Case::C
    );
}

#[test]
fn explicit_marked_point_sections() {
    let (sig, blocks) = case_a();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (t1, t2) = (q(3, 7), q(-5, 11));
    let c = codim2_chart(&sig, &blocks, t1.clone(), t2.clone(), false, &mut rng).unwrap();
    for i in blocks[0].iter() {
        let s = marked_point_coords(&c, i).unwrap();
        let x = fin(&s[0]);
        assert_eq!(fin(&s[1]), &t1 / &x);
        assert_eq!(fin(&s[2]), &t2 / (&x - Rational::one()));
    }
    for i in blocks[1].iter() {
        let s = marked_point_coords(&c, i).unwrap();
        let y = fin(&s[1]);
        assert_eq!(fin(&s[0]), &t1 / &y);
        assert_eq!(fin(&s[2]), &t2 * &y / (&t1 - &y));
    }
}

#[test]
fn explicit_ratio_formulas_match_closed_form() {
    for (sig, blocks) in [case_a(), case_b(), case_c()] {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = codim2_chart(&sig, &blocks, q(2, 9), q(-1, 13), false, &mut rng).unwrap();
        let (r1, r2) = codim2_explicit_ratios(&c, &blocks).unwrap();
        assert_eq!(r1, ratio_constant(&c, 1, 0).unwrap());
        assert_eq!(r2, ratio_constant(&c, 2, 0).unwrap());
        // and the sampled ratio agrees with the closed form
        let p = random_point(&c, 0, &mut rng).unwrap();
        assert_eq!(sampled_ratio(&c, 1, 0, &p).unwrap(), r1);
    }
}

#[test]
fn phi0_is_the_direct_product() {
    let (sig, blocks) = case_a();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let c = codim2_chart(&sig, &blocks, q(1, 2), q(1, 3), false, &mut rng).unwrap();
    let p = random_point(&c, 0, &mut rng).unwrap();
    let mut direct = Rational::one();
    for i in 1..=sig.n() {
        let a = fin(&marked_point_coords(&c, i).unwrap()[0]);
        direct *= (&p[0] - a).pow(sig.k(i) as i32);
    }
    assert_eq!(evaluate_phi(&c, 0, &p).unwrap().value, direct);
}

#[test]
fn all_pairs_pass_on_pinned_charts() {
    for (sig, blocks) in [case_a(), case_b(), case_c()] {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let c = codim2_chart(&sig, &blocks, q(4, 5), q(-3, 8), true, &mut rng).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                assert!(
                    verify_ratio_identity(&c, j, k, 5, &mut rng).unwrap(),
                    "{j}->{k}"
                );
            }
        }
    }
}

#[test]
fn pole_free_sampling_requires_smooth_fiber() {
    let (sig, blocks) = case_a();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let c = codim2_chart(&sig, &blocks, Rational::zero(), q(1, 2), false, &mut rng).unwrap();
    assert!(verify_ratio_identity(&c, 0, 1, 1, &mut rng).is_err());
}

#[test]
fn cocycle_and_reciprocity() {
    let (sig, blocks) = case_b();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = codim2_chart(&sig, &blocks, q(7, 3), q(2, 5), false, &mut rng).unwrap();
    let f = |a, b| ratio_constant(&c, a, b).unwrap();
    assert_eq!(f(1, 0) * f(0, 1), Rational::one());
    assert_eq!(path_ratio_constant(&c, 1, 2).unwrap(), f(1, 0) * f(0, 2));
    let p = random_point(&c, 1, &mut rng).unwrap();
    assert_eq!(sampled_ratio(&c, 1, 2, &p).unwrap(), f(1, 0) * f(0, 2));
}

#[test]
fn central_fiber_limits() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    // (c): every twisted section vanishes on every component
    let (sig, blocks) = case_c();
    let c = codim2_chart(&sig, &blocks, q(1, 3), q(1, 4), true, &mut rng).unwrap();
    for j in 0..3 {
        for comp in 0..3 {
            let z = q(17, 19) + Rational::from_integer(comp.into());
            assert!(central_fiber_restriction(&c, j, comp, &z)
                .unwrap()
                .is_zero());
        }
    }
    // (a): the limit lives on the central component and is nonzero there
    let (sig, blocks) = case_a();
    let c = codim2_chart(&sig, &blocks, q(1, 3), q(1, 4), true, &mut rng).unwrap();
    for j in 0..3 {
        assert!(!central_fiber_restriction(&c, j, 0, &q(37, 41))
            .unwrap()
            .is_zero());
        for comp in 1..3 {
            assert!(central_fiber_restriction(&c, j, comp, &q(37, 41))
                .unwrap()
                .is_zero());
        }
    }
}

#[test]
fn single_parameter_degenerations_stay_finite() {
    let (sig, blocks) = case_b();
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let tree = codim2_tree(&sig, &blocks).unwrap();
    for alpha in 0..2 {
        let mut t = vec![q(3, 5), q(-2, 7)];
        t[alpha] = Rational::zero();
        let c = LocalChart::random(sig.clone(), tree.clone(), t, &mut rng).unwrap();
        for j in 0..3 {
            let beta: ExponentVector = exponent_vector(&tree, j, &sig);
            if beta.entries()[alpha] != 0 {
                continue;
            }
            let p = random_point(&c, j, &mut rng).unwrap();
            let v = twisted_section_in(&c, j, j, &p).unwrap();
            let untwisted_zero = beta
                .entries()
                .iter()
                .zip(c.params())
                .any(|(b, t)| *b > 0 && t.is_zero());
            assert!(!untwisted_zero);
            assert!(!v.is_zero(), "j = {j}, alpha = {alpha}");
        }
    }
}

#[test]
fn beta_tables() {
    let (sig, blocks) = case_b();
    let tree = codim2_tree(&sig, &blocks).unwrap();
    let got: Vec<Vec<i64>> = (0..3).map(|j| exponent_vector(&tree, j, &sig).0).collect();
    assert_eq!(got, vec![vec![1, 0], vec![0, 0], vec![1, 1]]);
    let (sig, blocks) = case_c();
    let tree = codim2_tree(&sig, &blocks).unwrap();
    let got: Vec<Vec<i64>> = (0..3).map(|j| exponent_vector(&tree, j, &sig).0).collect();
    assert_eq!(got, vec![vec![1, 1], vec![0, 1], vec![1, 0]]);
}
