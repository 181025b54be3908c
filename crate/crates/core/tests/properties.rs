use std::collections::BTreeSet;

use approx::assert_relative_eq;
use gasket_core::decimation::{self, BRANCH_DOMAIN_MIN};
use gasket_core::ids::{self, IdsRegion};
use gasket_core::lattice::{
    build_ball, build_triangle, subdivide, translation_map, PartitionKind, TriangleSpec,
};
use gasket_core::operators::{
    assemble, free_laplacian, quadratic_form, restrict_potential, sample_potential, BoundaryCondition,
    Distribution, PotentialSpec,
};
use gasket_core::spectra::{count_below, count_sorted, counting_curve, eigenvalues_dense, uniform_grid};
use proptest::prelude::*;

fn distribution() -> impl Strategy<Value = Distribution> {
    prop_oneof![
        (0.0..5.0f64).prop_map(Distribution::Constant),
        (0.0..2.0f64, 0.5..12.0f64, 0.05..0.95f64).prop_map(|(a, w, p)| Distribution::Bernoulli {
            a,
            b: a + w,
            prob_b: p
        }),
        (0.0..2.0f64, 0.1..3.0f64).prop_map(|(a, w)| Distribution::Uniform { a, b: a + w }),
    ]
}

fn random_vector(n: usize, seed: u64) -> Vec<f64> {
    PotentialSpec::new(Distribution::Uniform { a: -1.0, b: 1.0 }, seed).sample(n, 0).unwrap()
}

#[test]
fn vertex_counts_up_to_eight() {
    for level in 0..=8u32 {
        let g = build_triangle(TriangleSpec::new(level)).unwrap();
        assert_eq!(g.len(), (3usize.pow(level + 1) + 3) / 2);
        assert_eq!(build_ball(level).unwrap().len(), 2 * g.len() - 1);
    }
}

#[test]
fn extreme_vertices_have_degree_two() {
    for level in 1..=5 {
        let spec = TriangleSpec::new(level);
        let g = build_triangle(spec).unwrap();
        let corners = spec.extreme_vertices();
        for (i, c) in g.vertices().iter().enumerate() {
            if corners.contains(c) {
                assert_eq!(g.region_degree()[i], 2);
            } else {
                assert_eq!(g.full_degree()[i], 4);
            }
        }
    }
}

#[test]
fn translation_maps_are_isomorphisms() {
    for level in 0..=4 {
        let host = build_triangle(TriangleSpec::new(level + 2)).unwrap();
        let pieces = subdivide(&host, level, PartitionKind::CoverP).unwrap().pieces;
        let source = TriangleSpec::new(level);
        let a = build_triangle(source).unwrap();
        for target in pieces.iter().flat_map(|p| [*p, p.mirrored(true)]) {
            let b = build_triangle(target).unwrap();
            let map = translation_map(&source, &target).unwrap();
            let image: BTreeSet<_> = a
                .edges()
                .iter()
                .map(|&(i, j)| {
                    let (x, y) = (map.apply(a.vertices()[i]), map.apply(a.vertices()[j]));
                    (x.min(y), x.max(y))
                })
                .collect();
            let expected: BTreeSet<_> = b
                .edges()
                .iter()
                .map(|&(i, j)| {
                    let (x, y) = (b.vertices()[i], b.vertices()[j]);
                    (x.min(y), x.max(y))
                })
                .collect();
            assert_eq!(image, expected, "level {level} target {target:?}");
        }
    }
}

#[test]
fn decay_ratios_approach_one_fifth() {
    let gap = decimation::neumann_gap(10).unwrap() / decimation::neumann_gap(9).unwrap();
    let ground = decimation::dirichlet_ground(10).unwrap() / decimation::dirichlet_ground(9).unwrap();
    assert!((gap - 0.2).abs() < 1e-6, "{gap}");
    assert!((ground - 0.2).abs() < 1e-6, "{ground}");
}

#[test]
fn decimation_matches_dense_probabilistic_spectrum() {
    for level in 1..=4 {
        let g = build_triangle(TriangleSpec::new(level)).unwrap();
        let dense: Vec<f64> = eigenvalues_dense(&gasket_core::operators::probabilistic_laplacian(&g).unwrap())
            .unwrap()
            .into_iter()
            .map(|x| -x)
            .collect();
        let mut dense = dense;
        dense.sort_by(f64::total_cmp);
        let exact = decimation::neumann_spectrum(level).unwrap();
        assert!(decimation::set_distance(exact.points(), &dense) < 1e-9, "level {level}");
    }
}

#[test]
fn combinatorial_probabilistic_sandwich() {
    for level in 1..=5 {
        let g = build_triangle(TriangleSpec::new(level)).unwrap();
        let comb = eigenvalues_dense(&free_laplacian(&g, BoundaryCondition::Neumann)).unwrap()[1];
        let prob = eigenvalues_dense(&gasket_core::operators::probabilistic_laplacian(&g).unwrap()).unwrap()[1];
        assert!(2.0 * prob <= comb + 1e-12 && comb <= 4.0 * prob + 1e-12, "level {level}");
    }
}

#[test]
fn doubling_trials_shrinks_stderr() {
    let grid = uniform_grid(0.5, 4.0, 8);
    let mut ratios = Vec::new();
    for rep in 0..10u64 {
        let spec = PotentialSpec::new(Distribution::Uniform { a: 0.0, b: 2.0 }, 100 + rep);
        let small = ids::estimate_ids(3, IdsRegion::Triangle, BoundaryCondition::Neumann, &spec, 16, &grid).unwrap();
        let large = ids::estimate_ids(3, IdsRegion::Triangle, BoundaryCondition::Neumann, &spec, 32, &grid).unwrap();
        let a: f64 = small.std_errors.iter().sum();
        let b: f64 = large.std_errors.iter().sum();
        ratios.push(b / a);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let expected = std::f64::consts::FRAC_1_SQRT_2;
    assert!((mean - expected).abs() <= 0.3 * expected, "mean ratio {mean}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn boundary_forms_are_ordered(level in 1u32..=4, truncated: bool, dist in distribution(), seed: u64) {
        let g = build_triangle(TriangleSpec::new(level).truncated(truncated)).unwrap();
        let v = sample_potential(&g, &PotentialSpec::new(dist, seed)).unwrap();
        let ops: Vec<_> = BoundaryCondition::ALL.iter().map(|&bc| assemble(&g, bc, &v).unwrap()).collect();
        for k in 0..40 {
            let f = random_vector(g.len(), seed.wrapping_add(k));
            let forms: Vec<f64> = ops.iter().map(|h| quadratic_form(h, &f).unwrap()).collect();
            // ALL is ordered Simple, Neumann, Dirichlet.
            prop_assert!(forms[1] <= forms[0] + 1e-12);
            prop_assert!(forms[0] <= forms[2] + 1e-12);
        }
    }

    #[test]
    fn neumann_form_is_edge_sum(level in 0u32..=5, ball: bool, seed: u64) {
        let g = if ball { build_ball(level).unwrap() } else { build_triangle(TriangleSpec::new(level)).unwrap() };
        let v = random_vector(g.len(), seed ^ 1).iter().map(|x| x.abs()).collect::<Vec<_>>();
        let f = random_vector(g.len(), seed);
        let h = assemble(&g, BoundaryCondition::Neumann, &v).unwrap();
        let edge_sum: f64 = g.edges().iter().map(|&(i, j)| (f[i] - f[j]).powi(2)).sum::<f64>()
            + v.iter().zip(&f).map(|(a, b)| a * b * b).sum::<f64>();
        assert_relative_eq!(quadratic_form(&h, &f).unwrap(), edge_sum, max_relative = 1e-10);
    }

    #[test]
    fn cover_is_additive(level in 1u32..=5, piece in 0u32..=4, seed: u64) {
        let piece = piece.min(level);
        let g = build_triangle(TriangleSpec::new(level)).unwrap();
        let f = random_vector(g.len(), seed);
        let zero = vec![0.0; g.len()];
        let whole = quadratic_form(&assemble(&g, BoundaryCondition::Neumann, &zero).unwrap(), &f).unwrap();
        let cover = subdivide(&g, piece, PartitionKind::CoverP).unwrap();
        let mut sum = 0.0;
        let mut multiplicity = 0usize;
        for spec in &cover.pieces {
            let p = build_triangle(*spec).unwrap();
            multiplicity += p.len();
            let fp = restrict_potential(&g, &f, &p).unwrap();
            sum += quadratic_form(&free_laplacian(&p, BoundaryCondition::Neumann), &fp).unwrap();
        }
        assert_relative_eq!(whole, sum, max_relative = 1e-12, epsilon = 1e-12);
        prop_assert!(multiplicity >= g.len());
    }

    #[test]
    fn disjoint_partition_is_exact(level in 1u32..=5, piece in 1u32..=4) {
        let piece = piece.min(level);
        let g = build_triangle(TriangleSpec::new(level)).unwrap();
        let part = subdivide(&g, piece, PartitionKind::DisjointPtilde).unwrap();
        let mut seen = BTreeSet::new();
        for spec in &part.pieces {
            for c in build_triangle(*spec).unwrap().vertices() {
                prop_assert!(seen.insert(*c));
            }
        }
        for c in &part.residual {
            prop_assert!(seen.insert(*c));
        }
        let all: BTreeSet<_> = g.vertices().iter().copied().collect();
        prop_assert_eq!(seen, all);
    }

    #[test]
    fn inertia_count_matches_dense(level in 0u32..=4, ball: bool, bc_index in 0usize..3, dist in distribution(), seed: u64) {
        let g = if ball { build_ball(level).unwrap() } else { build_triangle(TriangleSpec::new(level)).unwrap() };
        let v = sample_potential(&g, &PotentialSpec::new(dist, seed)).unwrap();
        let h = assemble(&g, BoundaryCondition::ALL[bc_index], &v).unwrap();
        let eig = eigenvalues_dense(&h).unwrap();
        let energies = PotentialSpec::new(Distribution::Uniform { a: -1.0, b: 22.0 }, seed).sample(25, 1).unwrap();
        for e in energies {
            prop_assert_eq!(count_below(&h, e).unwrap(), count_sorted(&eig, e));
        }
        // Counting at an eigenvalue includes it.
        let mid = eig[eig.len() / 2];
        prop_assert_eq!(count_below(&h, mid).unwrap(), count_sorted(&eig, mid));
    }

    #[test]
    fn counting_curves_are_monotone(level in 0u32..=4, dist in distribution(), seed: u64) {
        let g = build_triangle(TriangleSpec::new(level)).unwrap();
        let v = sample_potential(&g, &PotentialSpec::new(dist, seed)).unwrap();
        let h = assemble(&g, BoundaryCondition::Simple, &v).unwrap();
        let eig = eigenvalues_dense(&h).unwrap();
        let grid = uniform_grid(eig[0] - 1.0, eig[eig.len() - 1] + 1.0, 33);
        let c = counting_curve(&h, &grid).unwrap();
        prop_assert!(c.is_monotone());
        prop_assert_eq!(c.counts[0], 0);
        prop_assert_eq!(*c.counts.last().unwrap(), g.len());
    }

    #[test]
    fn ids_curves_are_valid(level in 1u32..=3, ball: bool, dist in distribution(), seed: u64, trials in 1usize..6) {
        let region = if ball { IdsRegion::Ball } else { IdsRegion::Triangle };
        let c = ids::estimate_ids(level, region, BoundaryCondition::Simple, &PotentialSpec::new(dist, seed), trials, &uniform_grid(0.0, 20.0, 21)).unwrap();
        prop_assert!(c.is_monotone());
        prop_assert!(c.mean.iter().all(|m| (0.0..=1.0).contains(m)));
        prop_assert!(c.std_errors.iter().all(|s| *s >= 0.0));
    }

    #[test]
    fn branch_identity(x in BRANCH_DOMAIN_MIN..=0.0f64) {
        prop_assert!((decimation::r(decimation::f(x).unwrap()) - x).abs() <= 1e-12);
        prop_assert!((decimation::r(decimation::f_lower(x).unwrap()) - x).abs() <= 1e-12);
    }

    #[test]
    fn generations_map_back(level in 1u32..=6) {
        let s = decimation::neumann_spectrum(level).unwrap();
        for (&z, &g) in s.points().iter().zip(s.generations()) {
            prop_assert!((-1.5..=0.0).contains(&z));
            if z == -1.5 {
                continue;
            }
            let mut w = z;
            for _ in 0..g {
                w = decimation::r(w);
            }
            prop_assert!(w.abs() < 1e-12 || (w + 0.75).abs() < 1e-12, "z={z} g={g} w={w}");
        }
    }

    #[test]
    fn assembly_is_deterministic(level in 0u32..=4, dist in distribution(), seed: u64) {
        let g = build_triangle(TriangleSpec::new(level)).unwrap();
        let spec = PotentialSpec::new(dist, seed);
        let a = assemble(&g, BoundaryCondition::ModifiedDirichlet, &sample_potential(&g, &spec).unwrap()).unwrap();
        let b = assemble(&g, BoundaryCondition::ModifiedDirichlet, &sample_potential(&g, &spec).unwrap()).unwrap();
        prop_assert_eq!(a.export_coordinate(), b.export_coordinate());
    }

    #[test]
    fn temple_bound_below_ground_state(level in 2u32..=4, dist in distribution(), seed: u64) {
        let g = build_triangle(TriangleSpec::new(level)).unwrap();
        let v = PotentialSpec::new(dist, seed).sample(g.len(), 0).unwrap();
        let t = ids::temple_lower_bound(level, &v).unwrap();
        prop_assert!(t.hypothesis_holds);
        prop_assert!(t.bound <= t.ground_state.unwrap() + 1e-12, "{t:?}");
    }
}
