use cyclelab_core::cycle_complex::{build_cell, check_membership, enumerate_basic_cycles};
use cyclelab_core::homalg::chain::chain_homology;
use cyclelab_core::multicurve::{build_standard, perfectness_scan, sample as graphs, FamilyTag};
use cyclelab_core::symplectic::{sample, Family};
use cyclelab_core::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn chain_tag(g: usize, pick: usize) -> FamilyTag {
    if g >= 4 && pick % 2 == 1 {
        FamilyTag::Nn(1 + pick / 2 % (g - 3))
    } else {
        FamilyTag::N
    }
}

fn family_of(tag: FamilyTag) -> Family {
    match tag {
        FamilyTag::Nn(n) => Family::Truncated(n),
        _ => Family::Full,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn standard_chains_are_perfect_cubes(seed in any::<u64>(), g in 3usize..6, pick in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tag = chain_tag(g, pick);
        let s = sample::splitting(&mut rng, g, family_of(tag), 5, 4);
        let gr = build_standard(tag, &s, None).unwrap();
        let sel = perfectness_scan(&gr, tag, &s.x).unwrap();
        prop_assert_eq!(sel.len(), 1);
        let inv = gr.invariants().unwrap();
        let cell = build_cell(&gr, &s.x).unwrap();
        let cube = match tag {
            FamilyTag::Nn(n) => n,
            _ => g - 2,
        };
        prop_assert_eq!(cell.dimension, cube);
        prop_assert_eq!(cell.dimension, inv.size - inv.homology_rank);
        prop_assert_eq!(cell.dimension, inv.components - 1);
        prop_assert_eq!(cell.vertices.len(), 1 << cube);
    }

    #[test]
    fn members_satisfy_the_dimension_formula(seed in any::<u64>(), g in 3usize..5, splits in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (gr, s) = graphs::graph(&mut rng, g, splits, 0.2);
        prop_assume!(!gr.curves.is_empty());
        let mem = check_membership(&gr, &s.x).unwrap();
        let built = build_cell(&gr, &s.x);
        if mem.passes() {
            let cell = built.unwrap();
            let inv = gr.invariants().unwrap();
            prop_assert_eq!(cell.dimension, inv.size - inv.homology_rank);
            prop_assert_eq!(cell.dimension, inv.components - 1);

            // Vertices of the polytope are exactly the basic cycles.
            let mut vs: Vec<String> = cell.vertices.iter().map(|v| v.to_string()).collect();
            let mut bs: Vec<String> = enumerate_basic_cycles(&gr, &s.x).unwrap().iter().map(|v| v.to_string()).collect();
            vs.sort();
            bs.sort();
            prop_assert_eq!(vs, bs);

            // The cell is contractible: ∂² = 0 and reduced homology vanishes.
            let cc = cell.chain_complex().unwrap();
            prop_assert!(cc.check_square_zero().is_ok());
            let h = chain_homology(&cc).unwrap();
            prop_assert_eq!(h[0].free, 1);
            prop_assert!(h[0].torsion.is_empty());
            prop_assert!(h[1..].iter().all(|a| a.is_zero()));

            // Faces of faces are faces.
            for f in &cell.faces {
                for g2 in &cell.faces {
                    if g2.vertices.iter().all(|v| f.vertices.contains(v)) && g2.dimension <= f.dimension {
                        prop_assert!(g2.curves.iter().all(|c| f.curves.contains(c)));
                    }
                }
            }
        } else {
            let refused = matches!(built, Err(Error::Refused(_)));
            prop_assert!(refused);
        }
    }
}
