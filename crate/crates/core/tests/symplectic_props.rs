use cyclelab_core::homalg::lattice::vec_from_i64;
use cyclelab_core::symplectic::{
    content, intersection, orbit_compare, orbit_key, reverse_k, sample, transvection, transvection_matrix,
    Family, HVec, MatchResult, Splitting,
};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn vec_strategy(dim: usize) -> impl Strategy<Value = HVec> {
    prop::collection::vec(-6i64..=6, dim).prop_map(|v| vec_from_i64(&v))
}

fn nonzero(dim: usize) -> impl Strategy<Value = HVec> {
    vec_strategy(dim).prop_filter("nonzero", |v| v.iter().any(|x| !x.is_zero()))
}

fn family_for(g: usize, pick: usize) -> Family {
    if g >= 4 && pick % 2 == 1 {
        Family::Truncated(1 + pick / 2 % (g - 3))
    } else {
        Family::Full
    }
}

proptest! {
    #[test]
    fn form_is_bilinear_and_antisymmetric(
        u in vec_strategy(6), v in vec_strategy(6), w in vec_strategy(6), s in -5i64..5
    ) {
        let s = BigInt::from(s);
        let uv = intersection(&u, &v).unwrap();
        prop_assert_eq!(&uv, &-intersection(&v, &u).unwrap());
        let su_w: HVec = u.iter().zip(&w).map(|(a, b)| &s * a + b).collect();
        prop_assert_eq!(
            intersection(&su_w, &v).unwrap(),
            &s * &uv + intersection(&w, &v).unwrap()
        );
    }

    #[test]
    fn transvections_compose_and_preserve_form(
        gamma in nonzero(6), c in vec_strategy(6), d in vec_strategy(6),
        s in -4i64..4, t in -4i64..4
    ) {
        let (s, t) = (BigInt::from(s), BigInt::from(t));
        let tc = transvection(&gamma, &s, &c).unwrap();
        let td = transvection(&gamma, &s, &d).unwrap();
        prop_assert_eq!(intersection(&tc, &td).unwrap(), intersection(&c, &d).unwrap());
        let twice = transvection(&gamma, &t, &tc).unwrap();
        prop_assert_eq!(twice, transvection(&gamma, &(&s + &t), &c).unwrap());
    }

    #[test]
    fn shift_group_laws(seed in any::<u64>(), g in 3usize..6, pick in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let family = family_for(g, pick);
        let u = sample::splitting(&mut rng, g, family, 5, 5);
        let len = family.shift_len(g);
        let k = sample::shift_vector(&mut rng, len, 4);
        let k2 = sample::shift_vector(&mut rng, len, 4);
        let uk = u.shift(&k).unwrap();
        prop_assert!(uk.is_valid());
        let sum: Vec<BigInt> = k.iter().zip(&k2).map(|(a, b)| a + b).collect();
        prop_assert_eq!(uk.shift(&k2).unwrap(), u.shift(&sum).unwrap());
        prop_assert_eq!(uk == u, k.iter().all(Zero::is_zero));
        if family == Family::Full {
            prop_assert_eq!(uk.reverse().unwrap(), u.reverse().unwrap().shift(&reverse_k(&k)).unwrap());
        }
        prop_assert_eq!(
            orbit_compare(&u, &uk).unwrap(),
            MatchResult::Match { k: k.clone(), reversed: false }
        );
        prop_assert_eq!(orbit_key(&u).unwrap(), orbit_key(&uk).unwrap());
    }

    #[test]
    fn orbit_compare_is_an_equivalence(seed in any::<u64>(), g in 3usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = sample::splitting(&mut rng, g, Family::Full, 3, 4);
        let k = sample::shift_vector(&mut rng, g - 1, 3);
        let v = u.reverse().unwrap().shift(&k).unwrap();
        let refl = matches!(orbit_compare(&u, &u).unwrap(), MatchResult::Match { .. });
        let fwd = matches!(orbit_compare(&u, &v).unwrap(), MatchResult::Match { reversed: true, .. });
        let back = matches!(orbit_compare(&v, &u).unwrap(), MatchResult::Match { reversed: true, .. });
        prop_assert!(refl && fwd && back);
        // A random unrelated splitting with the same x: keys agree iff the orbits agree.
        let w = u.map(&sample::symplectic_matrix(&mut rng, g, 2));
        if w.x == u.x {
            let same = orbit_compare(&u, &w).unwrap() != MatchResult::NoMatch;
            prop_assert_eq!(same, orbit_key(&u).unwrap() == orbit_key(&w).unwrap());
        }
    }

    #[test]
    fn key_equality_matches_orbit_compare_under_small_moves(seed in any::<u64>()) {
        // Transvections along vectors orthogonal to x keep x fixed and sometimes stay in the orbit.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = 3;
        let u = sample::splitting(&mut rng, g, Family::Full, 3, 3);
        let gamma = loop {
            let y = sample::vector(&mut rng, 2 * g, 1);
            let z = sample::vector(&mut rng, 2 * g, 1);
            let (py, pz) = (intersection(&y, &u.x).unwrap(), intersection(&z, &u.x).unwrap());
            let v: HVec = z.iter().zip(&y).map(|(zi, yi)| &py * zi - &pz * yi).collect();
            let c = content(&v);
            if !c.is_zero() {
                break v.iter().map(|t| t / &c).collect::<HVec>();
            }
        };
        let m = transvection_matrix(&gamma, &BigInt::from(1)).unwrap();
        let w = u.map(&m);
        prop_assert!(w.is_valid());
        let same = orbit_compare(&u, &w).unwrap() != MatchResult::NoMatch;
        prop_assert_eq!(same, orbit_key(&u).unwrap() == orbit_key(&w).unwrap());
    }
}

#[test]
fn bounding_pair_criterion_is_exact_on_small_vectors() {
    // T_a ∘ T_b^{-1} is trivial on homology iff a = ±b.
    let range = [-1i64, 0, 1];
    let mut vs = Vec::new();
    for a in range {
        for b in range {
            for c in range {
                for d in range {
                    if (a, b, c, d) != (0, 0, 0, 0) {
                        vs.push(vec_from_i64(&[a, b, c, d]));
                    }
                }
            }
        }
    }
    let one = BigInt::from(1);
    for a in &vs {
        let ta = transvection_matrix(a, &one).unwrap();
        for b in &vs {
            let tb_inv = transvection_matrix(b, &-&one).unwrap();
            let trivial = ta.mul(&tb_inv).unwrap() == cyclelab_core::homalg::matrix::IntMatrix::identity(4);
            let neg_b: HVec = b.iter().map(|x| -x).collect();
            assert_eq!(trivial, a == b || *a == neg_b, "a={a:?} b={b:?}");
        }
    }
}

#[test]
fn truncated_family_reverse_is_refused() {
    let x = vec_from_i64(&[1, 0, 1, 0, 0, 0, 0, 0]);
    let s = Splitting::standard(4, Family::Truncated(1), x).unwrap();
    assert!(s.reverse().is_err());
}
