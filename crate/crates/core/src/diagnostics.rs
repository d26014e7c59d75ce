//! Convergence heuristics and ensemble comparison statistics.
//!
//! The autocorrelation here is the two-window Pearson form: the correlation
//! of the series against itself shifted by the lag, with means and variances
//! taken over each window separately (not the stationary estimator with a
//! single global mean; the two agree asymptotically but can differ at short
//! lengths).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ensemble::EnsembleRecord;
use crate::error::{Error, Result};

/// Pearson correlation of `series[..m-lag]` with `series[lag..]`.
pub fn autocorrelation(series: &[f64], lag: usize) -> Result<f64> {
    if series.len() < lag + 2 {
        return Err(Error::SeriesTooShort {
            length: series.len(),
            lag,
        });
    }
    let m = series.len() - lag;
    let x = &series[..m];
    let y = &series[lag..];
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let (mx, my) = (mean(x), mean(y));
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for i in 0..m {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Err(Error::DegenerateSeries);
    }
    Ok(cov / (var_x * var_y).sqrt())
}

/// Autocorrelation at every lag `0..=max_lag`.
pub fn autocorrelation_curve(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    (0..=max_lag)
        .map(|lag| autocorrelation(series, lag))
        .collect()
}

/// Extracts the seats series from records (all records must carry it).
pub fn seats_series(records: &[EnsembleRecord]) -> Result<Vec<f64>> {
    records
        .iter()
        .map(|r| {
            r.seats_a
                .map(f64::from)
                .ok_or_else(|| Error::MissingStatistic {
                    stat: "seats_a".into(),
                })
        })
        .collect()
}

/// Five-number summary of one rank's share across an ensemble prefix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Per-rank summaries over the first `ceil(fraction * m)` records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialRankStats {
    pub fraction: f64,
    pub records_used: usize,
    pub ranks: Vec<RankSummary>,
}

/// Linear-interpolation quantile of an ascending-sorted slice.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Compares ranked-share distributions over growing prefixes of a run: for
/// each fraction, the per-rank five-number summary of the first
/// `ceil(fraction * m)` records.
pub fn partial_ensemble_rank_stats(
    records: &[EnsembleRecord],
    fractions: &[f64],
) -> Result<Vec<PartialRankStats>> {
    if records.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    for &f in fractions {
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::InvalidConfig {
                reason: format!("fraction {f} must lie in (0, 1]"),
            });
        }
    }
    let shares: Vec<&Vec<f64>> = records
        .iter()
        .map(|r| {
            r.ranked_shares_a
                .as_ref()
                .ok_or_else(|| Error::MissingStatistic {
                    stat: "ranked_shares_a".into(),
                })
        })
        .collect::<Result<_>>()?;
    let num_ranks = shares[0].len();
    for s in &shares {
        if s.len() != num_ranks {
            return Err(Error::MismatchedShares {
                expected: num_ranks,
                actual: s.len(),
            });
        }
    }

    let mut out = Vec::with_capacity(fractions.len());
    for &fraction in fractions {
        let used = ((fraction * records.len() as f64).ceil() as usize).clamp(1, records.len());
        let mut ranks = Vec::with_capacity(num_ranks);
        for rank in 0..num_ranks {
            let mut column: Vec<f64> = shares[..used].iter().map(|s| s[rank]).collect();
            column.sort_by(f64::total_cmp);
            ranks.push(RankSummary {
                min: column[0],
                q1: quantile(&column, 0.25),
                median: quantile(&column, 0.5),
                q3: quantile(&column, 0.75),
                max: column[used - 1],
            });
        }
        out.push(PartialRankStats {
            fraction,
            records_used: used,
            ranks,
        });
    }
    Ok(out)
}

/// Frequency table of `seats_a`; counts sum to the number of records.
pub fn seat_histogram(records: &[EnsembleRecord]) -> Result<BTreeMap<u32, u64>> {
    if records.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let mut hist = BTreeMap::new();
    for r in records {
        let seats = r.seats_a.ok_or_else(|| Error::MissingStatistic {
            stat: "seats_a".into(),
        })?;
        *hist.entry(seats).or_insert(0u64) += 1;
    }
    Ok(hist)
}

/// Total variation distance between two histograms after normalization;
/// 0 for identical shapes, 1 for disjoint supports. Computed over exact
/// integer counts so the result lands in [0, 1] and the extremes are exact.
pub fn histogram_distance(h1: &BTreeMap<u32, u64>, h2: &BTreeMap<u32, u64>) -> Result<f64> {
    let total1: u128 = h1.values().map(|&c| u128::from(c)).sum();
    let total2: u128 = h2.values().map(|&c| u128::from(c)).sum();
    if total1 == 0 || total2 == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let keys: std::collections::BTreeSet<u32> = h1.keys().chain(h2.keys()).copied().collect();
    // sum |a_i/A - b_i/B| = sum |a_i*B - b_i*A| / (A*B)
    let mut numerator: u128 = 0;
    for k in keys {
        let a = u128::from(*h1.get(&k).unwrap_or(&0));
        let b = u128::from(*h2.get(&k).unwrap_or(&0));
        numerator += (a * total2).abs_diff(b * total1);
    }
    Ok(numerator as f64 / (2 * total1 * total2) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(step: u64, seats: u32, shares: Vec<f64>) -> EnsembleRecord {
        EnsembleRecord {
            step,
            seats_a: Some(seats),
            ranked_shares_a: Some(shares),
            plan_digest: format!("{step:016x}"),
        }
    }

    #[test]
    fn lag_zero_is_exactly_one() {
        let series = vec![3.0, 1.0, 4.0, 1.0, 5.0, 9.0];
        assert_eq!(autocorrelation(&series, 0).unwrap(), 1.0);
    }

    #[test]
    fn alternating_series_lag_one_is_minus_one() {
        let series = vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0];
        assert_eq!(autocorrelation(&series, 1).unwrap(), -1.0);
    }

    #[test]
    fn constant_series_is_degenerate() {
        let series = vec![2.0; 10];
        assert!(matches!(
            autocorrelation(&series, 0),
            Err(Error::DegenerateSeries)
        ));
        assert!(matches!(
            autocorrelation(&series, 3),
            Err(Error::DegenerateSeries)
        ));
    }

    #[test]
    fn short_series_is_rejected() {
        let series = vec![1.0, 2.0, 3.0];
        assert!(matches!(
            autocorrelation(&series, 2),
            Err(Error::SeriesTooShort { .. })
        ));
        assert!(autocorrelation(&series, 1).is_ok());
    }

    #[test]
    fn curve_starts_at_one() {
        let series: Vec<f64> = (0..100).map(|i| ((i * 37) % 11) as f64).collect();
        let curve = autocorrelation_curve(&series, 5).unwrap();
        assert_eq!(curve.len(), 6);
        assert_eq!(curve[0], 1.0);
    }

    #[test]
    fn iid_noise_decorrelates() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_pcg::Pcg64Mcg::seed_from_u64(271828);
        let series: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        let curve = autocorrelation_curve(&series, 200).unwrap();
        for (lag, &value) in curve.iter().enumerate().skip(1) {
            assert!(value.abs() < 0.05, "lag {lag} has correlation {value}");
        }
    }

    #[test]
    fn autocorrelation_invariances() {
        let series = vec![2.0, 7.0, 1.0, 8.0, 2.0, 8.0, 1.0, 8.0];
        let base = autocorrelation(&series, 2).unwrap();
        let negated: Vec<f64> = series.iter().map(|x| -x).collect();
        assert!((autocorrelation(&negated, 2).unwrap() - base).abs() < 1e-12);
        let affine: Vec<f64> = series.iter().map(|x| 3.5 * x + 11.0).collect();
        assert!((autocorrelation(&affine, 2).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn partial_stats_identity_at_full_fraction() {
        let records: Vec<EnsembleRecord> = (0..50)
            .map(|i| record(i, 1, vec![i as f64 / 50.0, 0.5 + i as f64 / 100.0]))
            .collect();
        let stats = partial_ensemble_rank_stats(&records, &[1.0]).unwrap();
        assert_eq!(stats[0].records_used, 50);
        assert_eq!(stats[0].ranks.len(), 2);
        assert_eq!(stats[0].ranks[0].min, 0.0);
        assert_eq!(stats[0].ranks[0].max, 49.0 / 50.0);
    }

    #[test]
    fn partial_stats_single_record_collapses() {
        let records = vec![record(1, 2, vec![0.3, 0.7])];
        let stats = partial_ensemble_rank_stats(&records, &[0.1, 1.0]).unwrap();
        for s in &stats {
            assert_eq!(s.records_used, 1);
            for (rank, expected) in s.ranks.iter().zip([0.3, 0.7]) {
                assert_eq!(rank.min, expected);
                assert_eq!(rank.q1, expected);
                assert_eq!(rank.median, expected);
                assert_eq!(rank.q3, expected);
                assert_eq!(rank.max, expected);
            }
        }
    }

    #[test]
    fn partial_stats_rejects_bad_input() {
        assert!(matches!(
            partial_ensemble_rank_stats(&[], &[0.5]),
            Err(Error::EmptyEnsemble)
        ));
        let records = vec![record(1, 2, vec![0.3])];
        assert!(matches!(
            partial_ensemble_rank_stats(&records, &[0.0]),
            Err(Error::InvalidConfig { .. })
        ));
    }

    #[test]
    fn seat_histogram_counts() {
        let records = vec![
            record(1, 14, vec![]),
            record(2, 15, vec![]),
            record(3, 14, vec![]),
        ];
        let hist = seat_histogram(&records).unwrap();
        assert_eq!(hist, BTreeMap::from([(14, 2), (15, 1)]));
        assert_eq!(hist.values().sum::<u64>(), records.len() as u64);

        let one = seat_histogram(&records[..1]).unwrap();
        assert_eq!(one, BTreeMap::from([(14, 1)]));
    }

    #[test]
    fn histogram_distance_cases() {
        let a = BTreeMap::from([(1u32, 3u64), (2, 1)]);
        assert_eq!(histogram_distance(&a, &a).unwrap(), 0.0);

        let b = BTreeMap::from([(5u32, 4u64)]);
        assert_eq!(histogram_distance(&a, &b).unwrap(), 1.0);

        let c = BTreeMap::from([(1u32, 1u64), (2, 1)]);
        let d = BTreeMap::from([(1u32, 2u64)]);
        assert_eq!(histogram_distance(&c, &d).unwrap(), 0.5);

        // scale invariance of the normalized comparison
        let scaled = BTreeMap::from([(1u32, 30u64), (2, 10)]);
        assert_eq!(histogram_distance(&a, &scaled).unwrap(), 0.0);
    }
}
