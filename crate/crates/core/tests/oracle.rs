use ordpat_core::coeff::{
    hermite_rank_probe, increment_alpha_sum_check, mc_oracle, phi0, rank1_closed_form,
    rank2_closed_form, rank2_pattern_closed_form, HermiteRank, Target,
};
use ordpat_core::cov::{fgn_autocov, toeplitz_sigma, CovModel, ToeplitzCov};
use ordpat_core::pattern::{enumerate_patterns, partition_groups, Pattern, ReversalGroup};

const SAMPLES: u64 = 1_000_000;

fn within(est: f64, truth: f64, se: f64, k: f64) -> bool {
    (est - truth).abs() <= k * se
}

#[test]
fn order_one_closed_forms_match_oracle() {
    let r08 = fgn_autocov(0.8, 1).unwrap();
    for (i, r) in [-0.5, 0.0, 0.5, r08].into_iter().enumerate() {
        for pat in enumerate_patterns(2).unwrap() {
            let exact = rank1_closed_form(&pat, r).unwrap();
            let sigma = ToeplitzCov::lag_one(r).unwrap();
            let est = mc_oracle(&Target::Pattern(pat), &sigma, 1, SAMPLES, 100 + i as u64).unwrap();
            for k in 0..2 {
                assert!(
                    within(est.coefficients[k], exact.c[k], est.stderr[k], 4.0),
                    "{pat} r={r} k={k}: {} vs {} (se {})",
                    est.coefficients[k],
                    exact.c[k],
                    est.stderr[k]
                );
            }
            assert!(within(est.alpha_sum, exact.alpha_sum, est.alpha_sum_se, 4.0));
        }
    }
    let one = ToeplitzCov::identity(1).unwrap();
    let est = mc_oracle(&Target::Pattern(Pattern::new(&[1, 0]).unwrap()), &one, 1, SAMPLES, 5).unwrap();
    assert!(within(est.coefficients[0], phi0(), est.stderr[0], 3.0));
}

#[test]
fn monotone_example_at_fgn_lag_one() {
    let r = 0.51572;
    let sigma = ToeplitzCov::lag_one(r).unwrap();
    let est = mc_oracle(&Target::Pattern(Pattern::new(&[2, 1, 0]).unwrap()), &sigma, 1, SAMPLES, 42).unwrap();
    let want = phi0() * (1.0 + r) / 2.0;
    assert!((want - 0.302_343).abs() < 1e-6);
    assert!(within(est.coefficients[0], want, est.stderr[0], 3.0));
}

#[test]
fn order_two_pattern_closed_forms_match_oracle() {
    for (i, r) in [-0.4, 0.0, 0.5157, 0.7411].into_iter().enumerate() {
        let sigma = ToeplitzCov::lag_one(r).unwrap();
        for pat in enumerate_patterns(2).unwrap() {
            let exact = rank2_pattern_closed_form(&pat, r).unwrap();
            let est = mc_oracle(&Target::Pattern(pat), &sigma, 2, SAMPLES, 300 + i as u64).unwrap();
            for (k, want) in exact.iter().enumerate() {
                assert!(
                    within(est.coefficients[k], *want, est.stderr[k], 4.0),
                    "{pat} r={r} entry {k}: {} vs {want} (se {})",
                    est.coefficients[k],
                    est.stderr[k]
                );
            }
        }
    }
}

#[test]
fn group_alpha_sums_match_oracle() {
    for (i, r) in [0.0, 0.5157, 0.7411].into_iter().enumerate() {
        let sigma = ToeplitzCov::lag_one(r).unwrap();
        for g in partition_groups(2).unwrap() {
            let exact = rank2_closed_form(&g, r).unwrap();
            let est = mc_oracle(&Target::Group(g.clone()), &sigma, 2, SAMPLES, 500 + i as u64).unwrap();
            assert!(
                within(est.alpha_sum, exact.alpha_sum, est.alpha_sum_se, 3.0),
                "r={r}: {} vs {} (se {})",
                est.alpha_sum,
                exact.alpha_sum,
                est.alpha_sum_se
            );
        }
    }
}

#[test]
fn order_three_symmetries_hold_for_oracle() {
    for (i, r) in [-0.5, 0.0, 0.5].into_iter().enumerate() {
        let model = CovModel::table(vec![1.0, r, r * r], None).unwrap();
        let sigma = toeplitz_sigma(&model, 3).unwrap();
        for pat in enumerate_patterns(3).unwrap() {
            let seed = 700 + 10 * i as u64;
            let a = mc_oracle(&Target::Pattern(pat), &sigma, 1, 200_000, seed).unwrap();
            let s = mc_oracle(&Target::Pattern(pat.space_reverse()), &sigma, 1, 200_000, seed + 1).unwrap();
            let t = mc_oracle(&Target::Pattern(pat.time_reverse()), &sigma, 1, 200_000, seed + 2).unwrap();
            for k in 0..3 {
                let se = a.stderr[k].hypot(s.stderr[k]);
                assert!(within(a.coefficients[k], -s.coefficients[k], se, 4.0), "{pat} S k={k}");
                let se = a.stderr[k].hypot(t.stderr[2 - k]);
                assert!(within(a.coefficients[k], -t.coefficients[2 - k], se, 4.0), "{pat} T k={k}");
            }
        }
    }
}

#[test]
fn rank_probes() {
    let sigma = ToeplitzCov::lag_one(0.5157).unwrap();
    let single = Target::Pattern(Pattern::new(&[2, 1, 0]).unwrap());
    assert_eq!(hermite_rank_probe(&single, &sigma, 200_000, 1).unwrap().rank, HermiteRank::One);
    for g in partition_groups(2).unwrap() {
        let probe = hermite_rank_probe(&Target::Group(g), &sigma, 200_000, 2).unwrap();
        assert_eq!(probe.rank, HermiteRank::Two);
    }
    let one = ToeplitzCov::identity(1).unwrap();
    let g = ReversalGroup::of(&Pattern::new(&[1, 0]).unwrap());
    let probe = hermite_rank_probe(&Target::Group(g), &one, 200_000, 3).unwrap();
    assert_eq!(probe.rank, HermiteRank::AboveTwo);
}

#[test]
fn stationary_window_alpha_sum_vanishes() {
    let id3 = ToeplitzCov::identity(3).unwrap();
    let est = increment_alpha_sum_check(&Pattern::new(&[2, 1, 0]).unwrap(), &id3, SAMPLES, 11).unwrap();
    assert!(est.alpha_sum.abs() <= 4.0 * est.alpha_sum_se);
    assert!(est.coefficients.iter().zip(&est.stderr).any(|(c, s)| c.abs() > 6.0 * s));
    let sigma = toeplitz_sigma(&CovModel::fgn(0.8).unwrap(), 2).unwrap();
    let est = increment_alpha_sum_check(&Pattern::new(&[1, 0]).unwrap(), &sigma, SAMPLES, 12).unwrap();
    assert!(est.alpha_sum.abs() <= 4.0 * est.alpha_sum_se);
}
