//! Cross-module consistency: the support classification predicts structure
//! that the numerically computed monodromy group must exhibit, and the
//! wreath bound from the decomposition tree must contain the computed group.

use num_bigint::BigUint;
use num_traits::Zero;

use galmon_core::homotopy::{monodromy_generators, populate_fiber, TrackerConfig, C64};
use galmon_core::permgroup::{generate_group, GeneratedGroup, JordanVerdict};
use galmon_core::sparse::{classify, decomposition_tree, galois_bound, SupportSystem, Verdict};

fn monodromy_group(system: &SupportSystem, loops: usize, seed: u64) -> (GeneratedGroup, Vec<Vec<C64>>) {
    let cfg = TrackerConfig::with_seed(seed);
    let out = populate_fiber(system, &cfg).expect("fiber populates");
    assert_eq!(out.fiber.points.len() as u64, out.mv, "incomplete fiber");
    let mono = monodromy_generators(system, &out.fiber, loops, &cfg).expect("loops accepted");
    let group = generate_group(out.fiber.points.len(), mono.generators).unwrap();
    (group, out.fiber.points)
}

fn divides(a: &BigUint, b: &BigUint) -> bool {
    !a.is_zero() && (b % a).is_zero()
}

#[test]
fn dense_system_reaches_the_full_symmetric_group() {
    // generic dense bivariate quadrics: MV = 4, no structure, Gal = S4
    let dense = SupportSystem::from_points(vec![
        vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]],
        vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]],
    ])
    .unwrap();
    let c = classify(&dense).unwrap();
    assert_eq!(c.verdict, Verdict::FullSymmetric);
    let tree = decomposition_tree(&dense).unwrap();
    assert!(tree.is_leaf());
    let bound = galois_bound(&tree);
    assert_eq!(bound.order, BigUint::from(24u32));

    let (group, _) = monodromy_group(&dense, 30, 5);
    assert_eq!(group.order(), BigUint::from(24u32), "expected all of S4");
    assert_eq!(group.jordan_verdict().unwrap(), JordanVerdict::FullSymmetric);
    assert!(group.block_systems().unwrap().is_empty());
}

#[test]
fn lacunary_univariate_monodromy_respects_cube_root_orbits() {
    // f(x) = g(x^3) with deg g = 3: fibers are three orbits of size 3 under
    // multiplication by cube roots of unity
    let system =
        SupportSystem::from_points(vec![vec![vec![0], vec![3], vec![6], vec![9]]]).unwrap();
    let c = classify(&system).unwrap();
    assert_eq!(c.verdict, Verdict::ImprimitiveLacunary);
    assert_eq!(c.mv, 9);

    let (group, points) = monodromy_group(&system, 30, 11);
    // geometric blocks: points with equal |x| and arguments differing by
    // multiples of 2 pi / 3 are deck translates
    let omega = C64::from_polar(1.0, std::f64::consts::TAU / 3.0);
    let mut block_of = [usize::MAX; 9];
    let mut next_block = 0;
    for i in 0..9 {
        if block_of[i] != usize::MAX {
            continue;
        }
        block_of[i] = next_block;
        for (rot, candidate) in [(omega, 1), (omega * omega, 2)] {
            let target = points[i][0] * rot;
            let j = (0..9)
                .min_by(|&a, &b| {
                    (points[a][0] - target)
                        .norm()
                        .total_cmp(&(points[b][0] - target).norm())
                })
                .unwrap();
            assert!(
                (points[j][0] - target).norm() < 1e-6,
                "missing deck translate {candidate} of point {i}"
            );
            block_of[j] = next_block;
        }
        next_block += 1;
    }
    assert_eq!(next_block, 3, "expected 3 orbits of size 3");

    for g in group.generators() {
        for x in 0..9 {
            for y in 0..9 {
                if block_of[x] == block_of[y] {
                    assert_eq!(
                        block_of[g.apply(x)],
                        block_of[g.apply(y)],
                        "deck orbits not preserved by {g:?}"
                    );
                }
            }
        }
    }
    // the group certificate agrees: some block system exists
    assert!(!group.block_systems().unwrap().is_empty());
}

#[test]
fn triangular_system_monodromy_sits_inside_the_wreath_bound() {
    // f(y) quadratic, g(y, z) of z-degree 2: blocks are the fibers of the
    // projection to y, so Gal embeds in S2 wr S2 of order 8
    let system = SupportSystem::from_points(vec![
        vec![vec![0, 0], vec![1, 0], vec![2, 0]],
        vec![
            vec![0, 0],
            vec![1, 0],
            vec![0, 1],
            vec![1, 1],
            vec![0, 2],
            vec![1, 2],
        ],
    ])
    .unwrap();
    let c = classify(&system).unwrap();
    assert_eq!(c.verdict, Verdict::ImprimitiveTriangular);
    let tree = decomposition_tree(&system).unwrap();
    let bound = galois_bound(&tree);
    assert_eq!(bound.expr.to_string(), "S2 wr S2");
    assert_eq!(bound.order, BigUint::from(8u32));

    let (group, points) = monodromy_group(&system, 30, 3);
    assert!(
        divides(&group.order(), &bound.order),
        "group order {} outside the bound {}",
        group.order(),
        bound.order
    );
    // geometric blocks: equal y-coordinates
    for g in group.generators() {
        for x in 0..4 {
            for y in 0..4 {
                let same_fiber = (points[x][0] - points[y][0]).norm() < 1e-6;
                if same_fiber {
                    let (gx, gy) = (g.apply(x), g.apply(y));
                    assert!(
                        (points[gx][0] - points[gy][0]).norm() < 1e-6,
                        "projection fibers not preserved"
                    );
                }
            }
        }
    }
}

#[test]
fn monodromy_group_divides_the_tree_bound_for_the_running_example() {
    let sq = vec![
        vec![0, 0],
        vec![2, 0],
        vec![0, 2],
        vec![2, 2],
        vec![1, 1],
    ];
    let system = SupportSystem::from_points(vec![sq.clone(), sq]).unwrap();
    let bound = galois_bound(&decomposition_tree(&system).unwrap());
    let (group, _) = monodromy_group(&system, 40, 29);
    assert!(divides(&group.order(), &bound.order));
    assert!(!group.block_systems().unwrap().is_empty(), "group must be imprimitive");
}
