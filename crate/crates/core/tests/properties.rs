use proptest::prelude::*;

use ldlab::energy::{box_energy, ReferenceConstants};
use ldlab::geometry::{complement_in_box, localize, offset_to_mu, perimeter, volume, VoxelSet};
use ldlab::harness::samples::{random_ellipsoid, sample_rng};
use ldlab::harness::{ordering_margins, rows_to_csv, Row, ORDERING_TOLERANCE};
use ldlab::kernels::{taylor_third_order, TAYLOR_KAPPA};
use ldlab::linalg::{norm, sub};
use ldlab::lowerbound::{certificate_value, localization_shift, optimize_certificate, yukawa_interaction_bound};
use ldlab::upperbound::{cubic_root_near_one, lattice_sum_inv4, moment_kill, verify_moments};

fn voxel_set(n: usize) -> impl Strategy<Value = VoxelSet> {
    proptest::collection::vec(any::<bool>(), n * n * n)
        .prop_map(move |bits| VoxelSet::from_occupancy(n as f64 * 0.5, n, bits).unwrap())
}

fn fraction_set(n: usize) -> impl Strategy<Value = (VoxelSet, f64)> {
    (0.05f64..0.95, any::<u64>()).prop_map(move |(theta, seed)| {
        let mut rng = sample_rng(seed, 0, 0);
        (VoxelSet::random_neutral(n as f64, n, theta, &mut rng).unwrap(), theta)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn localization_partitions_the_set(s in voxel_set(8), k in prop::sample::select(vec![1usize, 2, 4, 8]), o in (0usize..8, 0usize..8, 0usize..8)) {
        let r = k as f64 * s.h();
        let mu = offset_to_mu([o.0 % k, o.1 % k, o.2 % k], k, s.n());
        let pieces = localize(&s, r, mu).unwrap();
        let mut cover = VoxelSet::empty(s.l(), s.n()).unwrap();
        for p in &pieces {
            prop_assert!(!p.is_empty());
            prop_assert!(cover.is_disjoint(p));
            cover = cover.union(p).unwrap();
        }
        prop_assert_eq!(cover, s.clone());
        let v: f64 = pieces.iter().map(volume).sum();
        prop_assert!((v - volume(&s)).abs() < 1e-12);
    }

    #[test]
    fn best_shift_beats_average_beats_bound(s in voxel_set(8), k in prop::sample::select(vec![2usize, 4, 8])) {
        let loc = localization_shift(&s, k as f64 * s.h()).unwrap();
        prop_assert!(loc.piece_sum <= loc.average + 1e-9);
        prop_assert!(loc.average <= loc.bound + 1e-9);
        let pieces = localize(&s, k as f64 * s.h(), loc.mu0).unwrap();
        let sum: f64 = pieces.iter().map(perimeter).sum();
        prop_assert!((sum - loc.piece_sum).abs() < 1e-9);
    }

    #[test]
    fn complement_swaps_density_and_keeps_interaction(s in voxel_set(6), theta in 0.0f64..1.0) {
        let c = complement_in_box(&s);
        let a = box_energy(&s, theta).unwrap().interaction;
        let b = box_energy(&c, 1.0 - theta).unwrap().interaction;
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-300));
        prop_assert_eq!(complement_in_box(&c), s);
    }

    #[test]
    fn energy_is_invariant_under_cube_symmetries(s in voxel_set(6), theta in 0.0f64..1.0, p in 0usize..6, flips in any::<[bool; 3]>()) {
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let t = s.transformed(perms[p], flips);
        let a = box_energy(&s, theta).unwrap();
        let b = box_energy(&t, theta).unwrap();
        prop_assert!((a.total - b.total).abs() <= 1e-10 * a.total.abs().max(1e-300));
    }

    #[test]
    fn certificate_monotone(t1 in 1e-8f64..1.0, t2 in 1e-8f64..1.0, w in 1e-4f64..10.0, r in 0.1f64..1e3, e1 in 0.1f64..20.0, e2 in 0.1f64..20.0) {
        let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        let a = certificate_value(lo, w, r, e1).unwrap();
        let b = certificate_value(hi, w, r, e1).unwrap();
        prop_assert!(b.value <= a.value);
        prop_assert!(a.value <= a.e_star);
        let (el, eh) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(certificate_value(lo, w, r, el).unwrap().value <= certificate_value(lo, w, r, eh).unwrap().value);
    }

    #[test]
    fn refinement_never_loses(t in 1e-9f64..1.0) {
        let c = optimize_certificate(t, ReferenceConstants::ball_ansatz().e_star).unwrap();
        prop_assert!(c.value >= c.schedule.unwrap().value0);
        prop_assert!(c.value <= c.e_star);
    }

    #[test]
    fn cubic_root_residual(c1 in -0.3f64..0.3, c2 in -0.3f64..0.3) {
        let x = cubic_root_near_one(c1, c2).unwrap();
        let p = x * x * x - c1 * x * x - c2 * c2 * x - 1.0 + c1 * c2 * c2;
        prop_assert!(p.abs() <= 1e-12);
    }

    #[test]
    fn taylor_remainder_within_kappa(a in prop::array::uniform3(-1.0f64..1.0), d in prop::array::uniform3(-1.0f64..1.0), ratio in 4.0f64..200.0) {
        let (na, nd) = (norm(a), norm(d));
        prop_assume!(na > 1e-3 && nd > 1e-3);
        let nb = na / ratio;
        let b = d.map(|v| v / nd * nb);
        let err = (taylor_third_order(a, b).unwrap() - 1.0 / norm(sub(a, b))).abs();
        prop_assert!(err * na.powi(4) / nb.powi(3) <= TAYLOR_KAPPA);
    }

    #[test]
    fn inverse_quartic_brackets_nest(k1 in 1usize..30, k2 in 1usize..30) {
        let (a, b) = (lattice_sum_inv4(k1.min(k2)), lattice_sum_inv4(k1.max(k2)));
        prop_assert!(b.lower >= a.lower && b.upper <= a.upper);
        prop_assert!(b.lower <= b.upper);
    }

    #[test]
    fn csv_rows_parse_back(theta in 1e-9f64..1.0, l in 0.1f64..1e4, value in -1e3f64..1e3, slope in proptest::option::of(-5.0f64..5.0)) {
        let row = Row { mode: "lower".into(), theta, l, n: 16, value, reference: 5.0, gap: 5.0 - value, rate_fit_slope: slope, runtime_ms: 0 };
        let csv = rows_to_csv(std::slice::from_ref(&row));
        let line = csv.lines().nth(1).unwrap();
        let f: Vec<&str> = line.split(',').collect();
        prop_assert_eq!(f[1].parse::<f64>().unwrap(), theta);
        prop_assert_eq!(f[2].parse::<f64>().unwrap(), l);
        prop_assert_eq!(f[4].parse::<f64>().unwrap(), value);
        prop_assert_eq!(f[7].parse::<f64>().ok(), slope);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn boundary_condition_orderings((s, theta) in fraction_set(8)) {
        for m in ordering_margins(&s, theta).unwrap() {
            prop_assert!(m >= -ORDERING_TOLERANCE, "{m}");
        }
    }

    #[test]
    fn yukawa_minorizes_coulomb((s, theta) in fraction_set(8), omega in 0.05f64..5.0) {
        let b = yukawa_interaction_bound(&s, theta, omega).unwrap();
        prop_assert!(b.margin() >= -1e-8 * b.coulomb.abs(), "{b:?}");
    }

    #[test]
    fn moment_kill_cancels_low_moments(seed in any::<u64>(), theta in 1e-5f64..2e-4) {
        let mut rng = sample_rng(seed, 0, 0);
        let shape = random_ellipsoid(&mut rng);
        let l0 = (shape.volume() / theta).cbrt();
        let k = moment_kill(&shape, l0, theta).unwrap();
        prop_assert!((k.lambda.iter().product::<f64>() - 1.0).abs() <= 1e-12);
        let (q, d, p) = verify_moments(&shape, &k).unwrap();
        prop_assert!(q.max(d).max(p) <= 1e-6);
    }
}
