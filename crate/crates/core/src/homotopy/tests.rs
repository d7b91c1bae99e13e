use super::linalg::{dist, norm_inf};
use super::*;
use crate::permgroup::generate_group;
use crate::sparse::SupportSystem;
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn sys(supports: Vec<Vec<Vec<i64>>>) -> SupportSystem {
    SupportSystem::from_points(supports).unwrap()
}

fn square_plus_center() -> SupportSystem {
    let sq = vec![
        vec![0, 0],
        vec![2, 0],
        vec![0, 2],
        vec![2, 2],
        vec![1, 1],
    ];
    sys(vec![sq.clone(), sq])
}

#[test]
fn seeding_at_all_ones_makes_coefficients_sum_to_zero() {
    let system = square_plus_center();
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let ones = vec![C64::new(1.0, 0.0); 2];
    let point = seed_fiber(&system, &ones, &mut rng).unwrap();
    for cs in &point.coeffs {
        let total: C64 = cs.iter().sum();
        assert!(total.norm() < 1e-12, "sum {total}");
    }
}

#[test]
fn seeding_residual_is_tiny() {
    let system = square_plus_center();
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let x = random_torus_point(2, &mut rng);
    let point = seed_fiber(&system, &x, &mut rng).unwrap();
    let residual = norm_inf(&SparseEvaluator::new(&system).eval(&point, &x));
    assert!(residual < 1e-12, "residual {residual}");
}

#[test]
fn seeding_rejects_zero_coordinates() {
    let system = square_plus_center();
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let x = vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
    assert!(matches!(
        seed_fiber(&system, &x, &mut rng),
        Err(HomotopyError::ZeroCoordinate)
    ));
}

#[test]
fn seeded_linear_equation_vanishes_at_the_seed() {
    // n = 1, support {0, 1}: the seeded system is c (x - 2) up to scale
    let system = sys(vec![vec![vec![0], vec![1]]]);
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let x = vec![C64::new(2.0, 0.0)];
    let point = seed_fiber(&system, &x, &mut rng).unwrap();
    let root = -point.coeffs[0][0] / point.coeffs[0][1];
    assert!((root - C64::new(2.0, 0.0)).norm() < 1e-12);
}

#[test]
fn zero_length_segment_is_the_identity() {
    let system = square_plus_center();
    let cfg = TrackerConfig::with_seed(5);
    let out = populate_fiber(&system, &cfg).unwrap();
    let results = track_segment(
        &system,
        &out.fiber.base,
        &out.fiber.base,
        &out.fiber.points,
        &cfg,
    );
    for (start, res) in out.fiber.points.iter().zip(&results) {
        let end = res.as_ref().unwrap();
        assert!(dist(start, end) < 1e-9);
    }
}

#[test]
fn linear_root_tracks_from_one_to_three() {
    let system = sys(vec![vec![vec![0], vec![1]]]);
    let from = CoefficientPoint {
        coeffs: vec![vec![C64::new(-1.0, 0.0), C64::new(1.0, 0.0)]], // x - 1
    };
    let to = CoefficientPoint {
        coeffs: vec![vec![C64::new(-3.0, 0.0), C64::new(1.0, 0.0)]], // x - 3
    };
    let cfg = TrackerConfig::with_seed(0);
    let results = track_segment(&system, &from, &to, &[vec![C64::new(1.0, 0.0)]], &cfg);
    let end = results[0].as_ref().unwrap();
    assert!((end[0] - C64::new(3.0, 0.0)).norm() < 1e-8);
}

#[test]
fn populate_reaches_the_bkk_count() {
    for (system, expected) in [
        (square_plus_center(), 8u64),
        (sys(vec![vec![vec![0], vec![1], vec![2], vec![3]]]), 3),
    ] {
        let cfg = TrackerConfig::with_seed(7);
        let out = populate_fiber(&system, &cfg).unwrap();
        assert_eq!(out.mv, expected);
        assert_eq!(out.fiber.points.len() as u64, expected, "stagnated: {}", out.stagnated);
        // residual invariant on every fiber point
        let eval = SparseEvaluator::new(&system);
        for p in &out.fiber.points {
            assert!(norm_inf(&eval.eval(&out.fiber.base, p)) < cfg.newton_tol * 10.0);
        }
        // pairwise separation
        for (i, p) in out.fiber.points.iter().enumerate() {
            for q in &out.fiber.points[i + 1..] {
                assert!(dist(p, q) > 2.0 * cfg.cluster_tol);
            }
        }
    }
}

#[test]
fn populate_dense_bivariate_bezout() {
    let deg2: Vec<Vec<i64>> = vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![0, 2], vec![1, 1]];
    let deg3: Vec<Vec<i64>> = vec![
        vec![0, 0],
        vec![1, 0],
        vec![0, 1],
        vec![2, 1],
        vec![1, 2],
        vec![3, 0],
        vec![0, 3],
    ];
    let system = sys(vec![deg2, deg3]);
    let out = populate_fiber(&system, &TrackerConfig::with_seed(11)).unwrap();
    assert_eq!(out.mv, 6);
    assert_eq!(out.fiber.points.len(), 6);
}

#[test]
fn degenerate_loop_is_the_identity() {
    let system = square_plus_center();
    let cfg = TrackerConfig::with_seed(19);
    let out = populate_fiber(&system, &cfg).unwrap();
    let g = monodromy_loop(&system, &out.fiber, &out.fiber.base, &out.fiber.base, &cfg)
        .expect("degenerate loop tracks");
    assert!(g.is_identity());
}

#[test]
fn monodromy_requires_a_complete_fiber() {
    let system = square_plus_center();
    let cfg = TrackerConfig::with_seed(13);
    let out = populate_fiber(&system, &cfg).unwrap();
    let mut partial = out.fiber.clone();
    partial.points.pop();
    assert!(matches!(
        monodromy_generators(&system, &partial, 4, &cfg),
        Err(HomotopyError::IncompleteFiber { got: 7, expected: 8 })
    ));
}

/// Antipodal pairing of the square-plus-center fiber, checked geometrically.
fn antipodal_blocks(points: &[Vec<C64>], tol: f64) -> Vec<Vec<usize>> {
    let mut assigned = vec![false; points.len()];
    let mut blocks = Vec::new();
    for i in 0..points.len() {
        if assigned[i] {
            continue;
        }
        let negated: Vec<C64> = points[i].iter().map(|c| -c).collect();
        let partner = (0..points.len())
            .filter(|&j| j != i && !assigned[j])
            .min_by(|&a, &b| dist(&points[a], &negated).total_cmp(&dist(&points[b], &negated)))
            .expect("fiber has even size");
        assert!(
            dist(&points[partner], &negated) < tol,
            "no antipodal partner for point {i}"
        );
        assigned[i] = true;
        assigned[partner] = true;
        blocks.push(vec![i.min(partner), i.max(partner)]);
    }
    blocks
}

#[test]
fn square_plus_center_monodromy_preserves_antipodal_pairs() {
    let system = square_plus_center();
    let cfg = TrackerConfig::with_seed(17);
    let out = populate_fiber(&system, &cfg).unwrap();
    assert_eq!(out.fiber.points.len(), 8);
    let blocks = antipodal_blocks(&out.fiber.points, 1e-6);
    assert_eq!(blocks.len(), 4);

    let mono = monodromy_generators(&system, &out.fiber, 40, &cfg).unwrap();
    assert!(mono.generators.len() >= 20, "too many discarded loops");
    let block_of: Vec<usize> = {
        let mut idx = vec![0; 8];
        for (bi, b) in blocks.iter().enumerate() {
            for &x in b {
                idx[x] = bi;
            }
        }
        idx
    };
    for g in &mono.generators {
        for b in &blocks {
            let target = block_of[g.apply(b[0])];
            assert!(
                b.iter().all(|&x| block_of[g.apply(x)] == target),
                "permutation {g:?} broke blocks"
            );
        }
        assert!(g.is_even(), "odd permutation {g:?} appeared");
    }
    // the generated group is inside the wreath product: order divides 384
    let group = generate_group(8, mono.generators.clone()).unwrap();
    let order = group.order();
    assert!(
        (BigUint::from(384u32) % &order) == BigUint::from(0u32),
        "order {order}"
    );
}

#[test]
fn monodromy_is_deterministic_for_a_fixed_seed() {
    let system = square_plus_center();
    let cfg = TrackerConfig::with_seed(23);
    let a = populate_fiber(&system, &cfg).unwrap();
    let b = populate_fiber(&system, &cfg).unwrap();
    assert_eq!(a.fiber.points, b.fiber.points);
    let ma = monodromy_generators(&system, &a.fiber, 10, &cfg).unwrap();
    let mb = monodromy_generators(&system, &b.fiber, 10, &cfg).unwrap();
    assert_eq!(ma.generators, mb.generators);
    assert_eq!(ma.discarded_loops, mb.discarded_loops);
}

#[test]
fn four_planes_counts_and_incidence() {
    for b in [2usize, 3, 5] {
        let problem = four_planes_problem(b, 42).unwrap();
        assert_eq!(problem.solutions.len(), b);
        for ranks in problem.incidence_ranks(1e-8) {
            for (j, r) in ranks.iter().enumerate() {
                assert!(
                    *r < 2 + b,
                    "b = {b}: solution meets K^{j} in rank {r}, expected < {}",
                    2 + b
                );
            }
        }
    }
    assert!(matches!(
        four_planes_problem(1, 0),
        Err(HomotopyError::BadPlaneCount(1))
    ));
}

#[test]
fn four_planes_monodromy_generates_s3() {
    let problem = four_planes_problem(3, 7).unwrap();
    let cfg = TrackerConfig::with_seed(7);
    let mono = four_planes_monodromy(&problem, 40, &cfg).unwrap();
    assert!(mono.generators.len() >= 20);
    let group = generate_group(3, mono.generators.clone()).unwrap();
    assert_eq!(group.order(), BigUint::from(6u32), "expected S3");
}

#[test]
fn match_endpoints_guards_against_ambiguity() {
    let fiber = vec![
        vec![C64::new(0.0, 0.0)],
        vec![C64::new(1.0, 0.0)],
    ];
    let exact = vec![
        vec![C64::new(1.0, 1e-9)],
        vec![C64::new(0.0, 0.0)],
    ];
    assert_eq!(
        super::monodromy::match_endpoints(&fiber, &exact, 1e-6),
        Some(vec![1, 0])
    );
    // two fiber points too close to the endpoint: ambiguous
    let close = vec![
        vec![C64::new(0.0, 0.0)],
        vec![C64::new(4e-6, 0.0)],
    ];
    let endpoint = vec![vec![C64::new(1e-7, 0.0)], vec![C64::new(4e-6, 0.0)]];
    assert_eq!(
        super::monodromy::match_endpoints(&close, &endpoint, 1e-6),
        None
    );
    // collision: both endpoints match fiber point 0
    let collided = vec![
        vec![C64::new(1e-9, 0.0)],
        vec![C64::new(-1e-9, 0.0)],
    ];
    assert_eq!(
        super::monodromy::match_endpoints(&fiber, &collided, 1e-6),
        None
    );
}
