use super::*;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::Rng as _;
use std::collections::BTreeSet;

fn perm(images: &[usize]) -> Permutation {
    Permutation::from_images(images.to_vec()).unwrap()
}

fn cyc(degree: usize, cycles: &[&[usize]]) -> Permutation {
    let cycles: Vec<Vec<usize>> = cycles.iter().map(|c| c.to_vec()).collect();
    Permutation::from_cycles(degree, &cycles).unwrap()
}

/// Independent oracle: group order by breadth-first closure of generator
/// products. Only usable for small groups; the stabilizer chain is checked
/// against it.
fn closure_order(degree: usize, gens: &[Permutation]) -> usize {
    let mut elements: BTreeSet<Vec<usize>> = BTreeSet::new();
    elements.insert(Permutation::identity(degree).images().to_vec());
    let mut frontier: Vec<Permutation> = vec![Permutation::identity(degree)];
    while let Some(e) = frontier.pop() {
        for g in gens {
            let prod = g.compose(&e);
            if elements.insert(prod.images().to_vec()) {
                frontier.push(prod);
            }
        }
    }
    elements.len()
}

/// Independent oracle: orbit count on distinct s-tuples by direct BFS.
fn tuple_transitive(degree: usize, gens: &[Permutation], s: usize) -> bool {
    if s > degree {
        return false;
    }
    let start: Vec<usize> = (0..s).collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    seen.insert(start.clone());
    let mut queue = vec![start];
    while let Some(t) = queue.pop() {
        for g in gens {
            let img: Vec<usize> = t.iter().map(|&x| g.apply(x)).collect();
            if seen.insert(img.clone()) {
                queue.push(img);
            }
        }
    }
    let mut expected = 1usize;
    for i in 0..s {
        expected *= degree - i;
    }
    seen.len() == expected
}

fn rand_perm(rng: &mut impl rand::Rng, degree: usize) -> Permutation {
    let mut images: Vec<usize> = (0..degree).collect();
    for i in (1..degree).rev() {
        images.swap(i, rng.gen_range(0..=i));
    }
    Permutation::from_images(images).unwrap()
}

#[test]
fn cycle_type_identity() {
    let t = cycle_type(&Permutation::identity(6));
    assert_eq!(t.parts(), &[1, 1, 1, 1, 1, 1]);
}

#[test]
fn cycle_type_two_transpositions() {
    let t = cycle_type(&perm(&[1, 0, 3, 2, 4, 5]));
    assert_eq!(t.parts(), &[2, 2, 1, 1]);
}

#[test]
fn cycle_type_six_disjoint_transpositions_on_27() {
    // (1,6)(4,13)(8,25)(10,19)(11,16)(20,27) in 1-indexed notation
    let g = cyc(
        27,
        &[&[0, 5], &[3, 12], &[7, 24], &[9, 18], &[10, 15], &[19, 26]],
    );
    let t = cycle_type(&g);
    let mut expected = vec![2; 6];
    expected.extend(vec![1; 15]);
    assert_eq!(t.parts(), expected.as_slice());
    assert!(g.is_even());
}

#[test]
fn rejects_non_bijections() {
    assert!(Permutation::from_images(vec![0, 0, 1]).is_err());
    assert!(Permutation::from_images(vec![0, 3]).is_err());
}

#[test]
fn class_density_values_in_s6() {
    let d = |parts: &[usize]| class_density_symmetric(&CycleType::new(parts.to_vec()).unwrap());
    assert_eq!(d(&[2, 1, 1, 1, 1]), BigRational::new(15.into(), 720.into()));
    assert_eq!(d(&[5, 1]), BigRational::new(144.into(), 720.into()));
    assert_eq!(d(&[1, 1, 1, 1, 1, 1]), BigRational::new(1.into(), 720.into()));
}

#[test]
fn class_densities_sum_to_one_up_to_degree_10() {
    for d in 1..=10 {
        assert!(total_symmetric_density(d).is_one(), "degree {d}");
    }
}

#[test]
fn symmetric_group_order() {
    let g = generate_group(6, vec![cyc(6, &[&[0, 1]]), cyc(6, &[&[0, 1, 2, 3, 4, 5]])]).unwrap();
    assert_eq!(g.order(), BigUint::from(720u32));
    assert!(g.contains(&perm(&[5, 4, 3, 2, 1, 0])));
}

#[test]
fn empty_generators_give_trivial_group() {
    let g = generate_group(5, vec![]).unwrap();
    assert_eq!(g.order(), BigUint::one());
    assert!(g.contains(&Permutation::identity(5)));
    assert!(!g.contains(&cyc(5, &[&[0, 1]])));
}

#[test]
fn klein_four_group_order() {
    let g = generate_group(
        4,
        vec![cyc(4, &[&[0, 1], &[2, 3]]), cyc(4, &[&[0, 2], &[1, 3]])],
    )
    .unwrap();
    assert_eq!(g.order(), BigUint::from(4u32));
}

#[test]
fn degree_mismatch_is_rejected() {
    let err = generate_group(5, vec![cyc(4, &[&[0, 1]])]).unwrap_err();
    assert_eq!(
        err,
        GroupError::DegreeMismatch {
            expected: 5,
            found: 4
        }
    );
}

#[test]
fn transitivity_levels() {
    let s6 = generate_group(6, vec![cyc(6, &[&[0, 1]]), cyc(6, &[&[0, 1, 2, 3, 4, 5]])]).unwrap();
    assert_eq!(s6.transitivity_level(6), 6);

    let c3 = generate_group(3, vec![cyc(3, &[&[0, 1, 2]])]).unwrap();
    assert_eq!(c3.transitivity_level(2), 1);

    let klein = generate_group(
        4,
        vec![cyc(4, &[&[0, 1], &[2, 3]]), cyc(4, &[&[0, 2], &[1, 3]])],
    )
    .unwrap();
    assert_eq!(klein.transitivity_level(4), 1);

    let intransitive = generate_group(4, vec![cyc(4, &[&[0, 1]])]).unwrap();
    assert_eq!(intransitive.transitivity_level(2), 0);
}

#[test]
fn transitivity_matches_tuple_orbit_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let d = rng.gen_range(2..=6);
        let k = rng.gen_range(1..=2);
        let gens: Vec<Permutation> = (0..k).map(|_| rand_perm(&mut rng, d)).collect();
        let group = generate_group(d, gens.clone()).unwrap();
        let level = group.transitivity_level(d);
        for s in 1..=d {
            assert_eq!(
                tuple_transitive(d, &gens, s),
                s <= level,
                "degree {d}, s {s}, gens {gens:?}"
            );
        }
    }
}

#[test]
fn block_systems_of_c4() {
    let g = generate_group(4, vec![cyc(4, &[&[0, 1, 2, 3]])]).unwrap();
    let systems = g.block_systems().unwrap();
    assert_eq!(systems.len(), 1);
    assert_eq!(systems[0].blocks(), &[vec![0, 2], vec![1, 3]]);
}

#[test]
fn block_systems_only_minimal_ones_for_c8() {
    let g = generate_group(8, vec![cyc(8, &[&[0, 1, 2, 3, 4, 5, 6, 7]])]).unwrap();
    let systems = g.block_systems().unwrap();
    // the 4-block system of antipodal pairs refines the 2-block system, so
    // only the pairs survive
    assert_eq!(systems.len(), 1);
    assert_eq!(
        systems[0].blocks(),
        &[vec![0, 4], vec![1, 5], vec![2, 6], vec![3, 7]]
    );
}

#[test]
fn symmetric_group_is_primitive() {
    let g = generate_group(4, vec![cyc(4, &[&[0, 1]]), cyc(4, &[&[0, 1, 2, 3]])]).unwrap();
    assert!(g.block_systems().unwrap().is_empty());
}

#[test]
fn block_systems_require_transitivity() {
    let g = generate_group(4, vec![cyc(4, &[&[0, 1]]), cyc(4, &[&[2, 3]])]).unwrap();
    assert_eq!(g.block_systems().unwrap_err(), GroupError::NotTransitive);
}

#[test]
fn generators_map_blocks_to_blocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let d = rng.gen_range(4..=8);
        let gens: Vec<Permutation> = (0..2).map(|_| rand_perm(&mut rng, d)).collect();
        let group = generate_group(d, gens.clone()).unwrap();
        if !group.is_transitive() {
            continue;
        }
        for system in group.block_systems().unwrap() {
            let idx = system.block_of(d);
            for g in &gens {
                for block in system.blocks() {
                    let target = idx[g.apply(block[0])];
                    assert!(block.iter().all(|&x| idx[g.apply(x)] == target));
                }
            }
        }
    }
}

#[test]
fn jordan_full_symmetric_on_8_points() {
    let g = generate_group(
        8,
        vec![
            cyc(8, &[&[0, 1, 2, 3, 4, 5, 6, 7]]),
            cyc(8, &[&[0, 1, 2, 3, 4, 5, 6]]),
            cyc(8, &[&[0, 1, 2]]),
        ],
    )
    .unwrap();
    assert_eq!(g.order(), factorial(8));
    assert_eq!(g.jordan_verdict().unwrap(), JordanVerdict::FullSymmetric);
}

#[test]
fn jordan_alternating_on_7_points() {
    let g = generate_group(
        7,
        vec![cyc(7, &[&[0, 1, 2]]), cyc(7, &[&[0, 1, 2, 3, 4, 5, 6]])],
    )
    .unwrap();
    assert_eq!(g.order(), factorial(7) / BigUint::from(2u32));
    assert_eq!(
        g.jordan_verdict().unwrap(),
        JordanVerdict::AtLeastAlternating
    );
}

#[test]
fn jordan_inconclusive_on_c4() {
    let g = generate_group(4, vec![cyc(4, &[&[0, 1, 2, 3]])]).unwrap();
    assert_eq!(g.jordan_verdict().unwrap(), JordanVerdict::Inconclusive);
}

#[test]
fn jordan_alternating_via_p_cycle_without_order_match() {
    // A proper primitive subgroup containing a 3-cycle must trip the p-cycle
    // branch: take A_8, whose order check already matches d!/2, then check a
    // subgroup of S_9 built from A_8-style generators plus a 9-cycle.
    // <(0..8), (0 1 2)> is primitive and contains a 3-cycle with 3 < 7.
    let g = generate_group(
        9,
        vec![cyc(9, &[&[0, 1, 2, 3, 4, 5, 6, 7, 8]]), cyc(9, &[&[0, 1, 2]])],
    )
    .unwrap();
    let verdict = g.jordan_verdict().unwrap();
    assert_ne!(verdict, JordanVerdict::Inconclusive);
}

#[test]
fn wreath_containment_checks() {
    let s4 = generate_group(4, vec![cyc(4, &[&[0, 1]]), cyc(4, &[&[0, 1, 2, 3]])]).unwrap();
    let blocks = BlockSystem::new(vec![vec![0, 1], vec![2, 3]], 4).unwrap();
    assert!(!s4.wreath_containment(&blocks).unwrap());

    // C4 respects the antipodal pairs
    let c4 = generate_group(4, vec![cyc(4, &[&[0, 1, 2, 3]])]).unwrap();
    let pairs = BlockSystem::new(vec![vec![0, 2], vec![1, 3]], 4).unwrap();
    assert!(c4.wreath_containment(&pairs).unwrap());

    // singleton blocks always work
    let singletons = BlockSystem::new(vec![vec![0], vec![1], vec![2], vec![3]], 4).unwrap();
    assert!(s4.wreath_containment(&singletons).unwrap());
}

#[test]
fn malformed_partition_is_rejected() {
    assert!(BlockSystem::new(vec![vec![0, 1], vec![1, 2, 3]], 4).is_err());
    assert!(BlockSystem::new(vec![vec![0, 1], vec![2]], 4).is_err());
    assert!(BlockSystem::new(vec![vec![0, 1]], 4).is_err());
}

#[test]
fn chain_order_matches_closure_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..60 {
        let d = rng.gen_range(2..=8);
        let k = rng.gen_range(1..=3);
        let gens: Vec<Permutation> = (0..k).map(|_| rand_perm(&mut rng, d)).collect();
        let group = generate_group(d, gens.clone()).unwrap();
        let expected = closure_order(d, &gens);
        assert_eq!(
            group.order().to_usize().unwrap(),
            expected,
            "degree {d}, gens {gens:?}"
        );
    }
}

#[test]
fn order_invariant_under_generator_tweaks() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..25 {
        let d = rng.gen_range(3..=7);
        let mut gens: Vec<Permutation> = (0..3).map(|_| rand_perm(&mut rng, d)).collect();
        let order = generate_group(d, gens.clone()).unwrap().order();

        gens.reverse();
        assert_eq!(generate_group(d, gens.clone()).unwrap().order(), order);

        let mut inverted = gens.clone();
        inverted[0] = inverted[0].inverse();
        assert_eq!(generate_group(d, inverted).unwrap().order(), order);

        let mut multiplied = gens.clone();
        let h = gens[1].clone();
        multiplied[0] = h.compose(&multiplied[0]);
        assert_eq!(generate_group(d, multiplied).unwrap().order(), order);
    }
}

#[test]
fn element_order_and_pow() {
    let g = cyc(10, &[&[0, 1, 2], &[3, 4, 5, 6, 7]]);
    assert_eq!(g.element_order(), BigUint::from(15u32));
    assert!(g.pow(&BigUint::from(15u32)).is_identity());
    let fifth = g.pow(&BigUint::from(5u32));
    assert_eq!(cycle_type(&fifth).parts(), &[3, 1, 1, 1, 1, 1, 1, 1]);
}

proptest! {
    #[test]
    fn conjugation_preserves_cycle_type(seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(2..=10);
        let g = rand_perm(&mut rng, d);
        let h = rand_perm(&mut rng, d);
        let conj = h.compose(&g).compose(&h.inverse());
        prop_assert_eq!(cycle_type(&g), cycle_type(&conj));
    }

    #[test]
    fn cycle_type_parts_sum_to_degree(seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(1..=12);
        let g = rand_perm(&mut rng, d);
        prop_assert_eq!(cycle_type(&g).degree(), d);
    }

    #[test]
    fn inverse_composes_to_identity(seed in 0u64..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(1..=10);
        let g = rand_perm(&mut rng, d);
        prop_assert!(g.compose(&g.inverse()).is_identity());
        prop_assert!(g.inverse().compose(&g).is_identity());
    }
}
