use ordpat_core::cov::{c_of_h, g_of_x, toeplitz_sigma, CovModel};
use ordpat_core::estimate::{c_hat, p_hat, q_hat, q_hat_all, SeriesView};
use ordpat_core::pattern::{
    encode_pattern, enumerate_patterns, partition_groups, pattern_of_increments, Pattern,
    ReversalGroup, RankVector,
};
use proptest::prelude::*;

fn window(max_order: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, 2..=max_order + 1)
}

proptest! {
    #[test]
    fn affine_maps_keep_the_pattern(w in window(8), a in 0.01f64..100.0, b in -50.0f64..50.0) {
        let moved: Vec<f64> = w.iter().map(|x| a * x + b).collect();
        // Affine maps can merge nearly equal values; only compare tie-free, well separated windows.
        let mut sorted = w.clone();
        sorted.sort_by(f64::total_cmp);
        prop_assume!(sorted.windows(2).all(|p| p[1] - p[0] > 1e-6));
        prop_assert_eq!(encode_pattern(&w).unwrap(), encode_pattern(&moved).unwrap());
    }

    #[test]
    fn negation_and_reversal(w in window(8)) {
        let mut sorted = w.clone();
        sorted.sort_by(f64::total_cmp);
        prop_assume!(sorted.windows(2).all(|p| p[1] > p[0]));
        let p = encode_pattern(&w).unwrap();
        let neg: Vec<f64> = w.iter().map(|x| -x).collect();
        let rev: Vec<f64> = w.iter().rev().copied().collect();
        prop_assert_eq!(encode_pattern(&neg).unwrap(), p.space_reverse());
        prop_assert_eq!(encode_pattern(&rev).unwrap(), p.time_reverse());
    }

    #[test]
    fn increments_agree_with_levels(levels in prop::collection::vec(-20i32..20, 2..10)) {
        let xi: Vec<f64> = levels.iter().map(|&v| v as f64).collect();
        let inc: Vec<f64> = xi.windows(2).map(|p| p[1] - p[0]).collect();
        let shifted: Vec<f64> = xi.iter().map(|v| v - xi[0]).collect();
        prop_assert_eq!(pattern_of_increments(&inc).unwrap(), encode_pattern(&shifted).unwrap());
        prop_assert_eq!(encode_pattern(&shifted).unwrap(), encode_pattern(&xi).unwrap());
    }

    #[test]
    fn index_round_trip(order in 1usize..=5, seed in any::<u64>()) {
        let count = (1..=order as u64 + 1).product::<u64>();
        let index = seed % count;
        let p = Pattern::from_index(order, index).unwrap();
        prop_assert_eq!(p.index(), index);
        prop_assert_eq!(Pattern::new(&p.to_vec()).unwrap(), p);
    }

    #[test]
    fn ranks_round_trip(w in window(8)) {
        let p = encode_pattern(&w).unwrap();
        prop_assert_eq!(RankVector::of(&w).unwrap().to_pattern().unwrap(), p);
    }

    #[test]
    fn levels_and_differences_give_same_frequencies(levels in prop::collection::vec(-30i32..30, 4..60), order in 1usize..=3) {
        prop_assume!(levels.len() > order + 1);
        let xi: Vec<f64> = levels.iter().map(|&v| v as f64).collect();
        let inc: Vec<f64> = xi.windows(2).map(|p| p[1] - p[0]).collect();
        let a = q_hat_all(&SeriesView::levels(&xi).unwrap(), order).unwrap();
        let b = q_hat_all(&SeriesView::increments(&inc).unwrap(), order).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn group_average_identity(x in prop::collection::vec(-5.0f64..5.0, 5..80)) {
        let s = SeriesView::levels(&x).unwrap();
        for g in partition_groups(2).unwrap() {
            let p = p_hat(&s, &g).unwrap().value;
            let total: f64 = g.members().iter().map(|m| q_hat(&s, m).unwrap().value).sum();
            prop_assert!((p * g.len() as f64 - total).abs() < 1e-12);
        }
        let turning = p_hat(&s, &ReversalGroup::turning_points()).unwrap().value;
        prop_assert_eq!(c_hat(&s).unwrap(), 4.0 * turning);
    }

    #[test]
    fn g_inverts_c(h in 0.001f64..0.999) {
        prop_assert!((g_of_x(c_of_h(h).unwrap()).unwrap() - h).abs() < 1e-12);
    }

    #[test]
    fn cholesky_reconstructs(h in 0.01f64..0.99, p in 1usize..=16) {
        let m = toeplitz_sigma(&CovModel::fgn(h).unwrap(), p).unwrap();
        let a = m.cholesky().to_dense();
        for i in 0..p {
            for j in 0..p {
                let v: f64 = (0..p).map(|k| a[i * p + k] * a[j * p + k]).sum();
                prop_assert!((v - m.get(i, j)).abs() < 1e-12);
            }
        }
        let v: Vec<f64> = (0..p).map(|i| (i as f64).sin()).collect();
        let x = m.solve(&v).unwrap();
        let back = m.mul_vec(&x);
        for (b, t) in back.iter().zip(&v) {
            prop_assert!((b - t).abs() < 1e-10);
        }
    }
}

#[test]
fn groups_partition_every_small_order() {
    for order in 1..=6 {
        let groups = partition_groups(order).unwrap();
        let total: usize = groups.iter().map(|g| g.len()).sum();
        assert_eq!(total, enumerate_patterns(order).unwrap().len());
        for g in &groups {
            assert!(g.len() == 2 || g.len() == 4);
            for m in g.members() {
                assert_eq!(&ReversalGroup::of(m), g);
            }
        }
    }
}

#[test]
fn round_trip_on_grid() {
    for i in 1..100 {
        let h = i as f64 / 100.0;
        assert!((g_of_x(c_of_h(h).unwrap()).unwrap() - h).abs() < 1e-12, "H={h}");
    }
}

#[test]
fn g_is_decreasing_below_two_thirds() {
    let mut last = f64::INFINITY;
    for i in 0..=666 {
        let v = g_of_x(i as f64 / 1000.0).unwrap();
        assert!(v < last);
        last = v;
    }
}
