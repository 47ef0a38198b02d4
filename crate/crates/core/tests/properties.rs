use proptest::prelude::*;

use cpma::cpma::{connect_cpma, extract_cpma, score_function, threshold_score, CpmaConfig};
use cpma::distfield::edt;
use cpma::grid::{read_grid, write_grid, Connectivity, GridFormat, Symmetry};
use cpma::metrics::{dubuisson_jain, hausdorff, jaccard, PointSet};
use cpma::perturb::{apply_noise, NoiseSpec};
use cpma::skeleton::{extract_mat, reconstruct};
use cpma::{synth, BinaryGrid, Dims, GridPoint};

fn grid_2d(max: usize) -> impl Strategy<Value = BinaryGrid> {
    (1..=max, 1..=max).prop_flat_map(|(nx, ny)| {
        prop::collection::vec(prop::bool::weighted(0.7), nx * ny)
            .prop_map(move |data| BinaryGrid::from_data(Dims::new2(nx, ny), data).unwrap())
    })
}

fn grid_3d(max: usize) -> impl Strategy<Value = BinaryGrid> {
    (1..=max, 1..=max, 1..=max).prop_flat_map(|(nx, ny, nz)| {
        prop::collection::vec(prop::bool::weighted(0.7), nx * ny * nz)
            .prop_map(move |data| BinaryGrid::from_data(Dims::new3(nx, ny, nz), data).unwrap())
    })
}

fn any_grid() -> impl Strategy<Value = BinaryGrid> {
    prop_oneof![3 => grid_2d(14), 1 => grid_3d(6)]
}

fn grid_pair() -> impl Strategy<Value = (BinaryGrid, BinaryGrid)> {
    (1..=10usize, 1..=10usize).prop_flat_map(|(nx, ny)| {
        let cells = || prop::collection::vec(prop::bool::ANY, nx * ny);
        (cells(), cells()).prop_map(move |(a, b)| {
            let d = Dims::new2(nx, ny);
            (BinaryGrid::from_data(d, a).unwrap(), BinaryGrid::from_data(d, b).unwrap())
        })
    })
}

fn point_set() -> impl Strategy<Value = PointSet> {
    prop::collection::vec((-30i64..30, -30i64..30, 0i64..3), 1..40)
        .prop_map(|v| PointSet::new(v.into_iter().map(|(x, y, z)| GridPoint::new([x, y, z])).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn edt_matches_nearest_background(g in any_grid()) {
        let field = edt(&g);
        let d = g.dims();
        let bg: Vec<GridPoint> = (0..d.len()).filter(|&i| !g.get(i)).map(|i| d.point(i)).collect();
        for i in 0..d.len() {
            let best = bg.iter().map(|q| d.point(i).dist2(q)).min();
            match best {
                Some(b) => {
                    prop_assert_eq!(field.dist2(i), b);
                    let f = field.feature(i);
                    prop_assert!(!g.get(f));
                    prop_assert_eq!(d.point(i).dist2(&d.point(f)), b);
                }
                None => prop_assert_eq!(field.dist2(i), i64::MAX),
            }
        }
    }

    #[test]
    fn mat_reconstructs_shape(g in any_grid()) {
        prop_assume!(!g.is_blank());
        let mat = extract_mat(&g);
        prop_assert_eq!(reconstruct(&mat, g.dims()), g.clone());
        prop_assert!(mat.indices().iter().all(|&i| g.get(i)));
    }

    #[test]
    fn grid_io_round_trips(g in any_grid()) {
        prop_assume!(!g.is_blank());
        let g = g.ensure_padded();
        let fmt = GridFormat::for_ndim(g.ndim());
        let back = read_grid(&write_grid(&g, fmt).unwrap(), fmt).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn metric_axioms(x in point_set(), y in point_set()) {
        let (h, d) = (hausdorff(&x, &y).unwrap(), dubuisson_jain(&x, &y).unwrap());
        prop_assert!(d <= h + 1e-12);
        prop_assert!((h - hausdorff(&y, &x).unwrap()).abs() < 1e-12);
        prop_assert!((d - dubuisson_jain(&y, &x).unwrap()).abs() < 1e-12);
        prop_assert_eq!(hausdorff(&x, &x).unwrap(), 0.0);
        prop_assert_eq!(dubuisson_jain(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn jaccard_bounds((a, b) in grid_pair()) {
        let j = jaccard(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&j));
        prop_assert_eq!(j, jaccard(&b, &a).unwrap());
        prop_assert_eq!(jaccard(&a, &a).unwrap(), 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn score_and_cpma_commute_with_symmetries(g in grid_2d(12)) {
        prop_assume!(!g.is_blank());
        let cfg = CpmaConfig::default();
        let (cp, field) = extract_cpma(&g, &cfg).unwrap();
        for s in Symmetry::all(2) {
            let moved = s.apply_grid(&g);
            let (cp2, field2) = extract_cpma(&moved, &cfg).unwrap();
            let expect = s.apply_field(&field);
            for (a, b) in field2.values().iter().zip(expect.values()) {
                prop_assert!((a - b).abs() < 1e-9);
            }
            let expect_mat = s.apply_mat(&cp);
            prop_assert_eq!(cp2.indices(), expect_mat.indices());
        }
    }

    #[test]
    fn score_values_are_fractions(g in any_grid()) {
        prop_assume!(!g.is_blank());
        let field = score_function(&g, &CpmaConfig::default()).unwrap();
        prop_assert!(field.values().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn connect_is_monotone_and_idempotent(g in grid_2d(14), tau in 0.05f64..0.95) {
        prop_assume!(!g.is_blank());
        let cfg = CpmaConfig::with_tau(tau);
        let field = score_function(&g, &cfg).unwrap();
        let raw = threshold_score(&g, &field, tau).unwrap();
        let once = connect_cpma(&raw, &field, &g, &cfg).unwrap();
        prop_assert!(raw.indices().iter().all(|&i| once.mat.contains(i)));
        prop_assert!(once.mat.indices().iter().all(|&i| g.get(i)));
        let twice = connect_cpma(&once.mat, &field, &g, &cfg).unwrap();
        prop_assert_eq!(&twice.mat, &once.mat);
        if !once.status.foreground_split && !once.status.cap_reached && !raw.is_empty() {
            prop_assert_eq!(once.mat.to_grid().components(Connectivity::Full).len(), 1);
        }
    }

    #[test]
    fn noise_keeps_blobs_connected(seed in 0u64..1000, level in 1usize..6) {
        let g = synth::random_blob(seed % 20, 64);
        let noisy = apply_noise(&g, &NoiseSpec::contour(level, seed)).unwrap();
        prop_assert_eq!(noisy.components(Connectivity::Full).len(), 1);
        prop_assert!(!noisy.touches_border());
        prop_assert_eq!(noisy.dims(), g.dims());
        prop_assert_eq!(apply_noise(&g, &NoiseSpec::contour(level, seed)).unwrap(), noisy);
    }
}
