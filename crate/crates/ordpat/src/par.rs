//! Rayon front ends for the sharded kernels in `ordpat-core`.
//!
//! Work is split into fixed-size chunks independent of the thread count and
//! merged in chunk order, so results do not depend on the pool size.

use ordpat_core::coeff::{OracleEstimate, OraclePlan, Target};
use ordpat_core::estimate::{estimate_from_count, Estimate, SeriesView};
use ordpat_core::Result;
use rayon::prelude::*;

/// Windows per counting chunk.
pub const CHUNK_WINDOWS: usize = 1 << 16;

fn chunks(n: usize) -> impl IndexedParallelIterator<Item = (usize, usize)> {
    (0..n.div_ceil(CHUNK_WINDOWS))
        .into_par_iter()
        .map(move |c| (c * CHUNK_WINDOWS, ((c + 1) * CHUNK_WINDOWS).min(n)))
}

pub fn run_plan(plan: &OraclePlan) -> OracleEstimate {
    let parts: Vec<_> = (0..plan.shards())
        .into_par_iter()
        .map(|s| plan.run_shard(s))
        .collect();
    let mut acc = plan.empty_accumulator();
    for p in &parts {
        acc.merge(p);
    }
    plan.finish(&acc)
}

/// Frequency of `target` over all windows of `series`.
pub fn estimate(series: &SeriesView, target: &Target) -> Result<Estimate> {
    let order = target.order();
    let n = series.window_count(order)?;
    let hits: u64 = chunks(n)
        .map(|(a, b)| series.count_range(order, a, b, |perm| target.matches(perm)))
        .sum();
    Ok(estimate_from_count(target.clone(), n, hits))
}

/// Pattern histogram indexed by Lehmer index.
pub fn histogram(series: &SeriesView, order: usize) -> Result<Vec<u64>> {
    let n = series.window_count(order)?;
    let parts: Vec<Vec<u64>> = chunks(n)
        .map(|(a, b)| series.histogram_range(order, a, b))
        .collect();
    let mut total = vec![0u64; parts.first().map_or(0, |p| p.len())];
    for p in parts {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ordpat_core::coeff::{self, Coordinates};
    use ordpat_core::estimate::q_hat_all;
    use ordpat_core::{Pattern, ToeplitzCov};

    #[test]
    fn parallel_matches_sequential() {
        let x: Vec<f64> = (0..200_000).map(|i| ((i * 7919) % 1013) as f64).collect();
        let s = SeriesView::levels(&x).unwrap();
        let h = histogram(&s, 3).unwrap();
        let n = s.window_count(3).unwrap() as f64;
        let q: Vec<f64> = h.iter().map(|&c| c as f64 / n).collect();
        assert_eq!(q, q_hat_all(&s, 3).unwrap());
        let t = Target::Pattern(Pattern::new(&[0, 1, 2, 3]).unwrap());
        let e = estimate(&s, &t).unwrap();
        assert_eq!(e.value, q[Pattern::new(&[0, 1, 2, 3]).unwrap().index() as usize]);

        let sigma = ToeplitzCov::lag_one(0.3).unwrap();
        let plan = OraclePlan::new(t.clone(), &ToeplitzCov::identity(3).unwrap(), Coordinates::Increments, 1, 300_000, 4).unwrap();
        assert_eq!(run_plan(&plan), coeff::run_plan(&plan));
        let _ = sigma;
    }
}
