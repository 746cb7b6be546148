//! Representative-day reduction for desk-scale runs.

use super::timeseries::{DataError, RawSeries};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DayStrategy {
    /// Keep the highest-peak days at unit weight and one representative per
    /// daily-mean stratum for the rest.
    PeakStratified,
}

/// A reduced set of operating days. `days` are indices into the source year,
/// `weights` say how many calendar days each one stands for, and `map` sends
/// every source day to its representative's slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DaySelection {
    pub days: Vec<usize>,
    pub weights: Vec<f64>,
    pub map: Vec<usize>,
}

impl DaySelection {
    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }
}

/// Pick `target` representative days. The top `ceil(target / 2)` days by
/// daily peak keep weight one so extremes are never inflated; the remaining
/// days are sorted by daily mean into equally sized strata, each represented
/// by the day closest to the stratum mean and weighted by the stratum size.
/// Weights always sum to the number of source days.
pub fn select_representative_days(
    series: &RawSeries,
    target: usize,
    strategy: DayStrategy,
) -> Result<DaySelection, DataError> {
    let DayStrategy::PeakStratified = strategy;
    let n_days = series.n_days();
    if target < 2 {
        return Err(DataError::Invalid(
            "representative-day count must be at least 2".into(),
        ));
    }
    if target > n_days {
        return Err(DataError::Invalid(format!(
            "cannot select {target} representative days from {n_days}"
        )));
    }

    let peaks: Vec<f64> = (0..n_days)
        .map(|j| series.day(j).iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let means: Vec<f64> = (0..n_days)
        .map(|j| series.day(j).iter().sum::<f64>() / 24.0)
        .collect();

    let n_top = target.div_ceil(2).min(target);
    let mut by_peak: Vec<usize> = (0..n_days).collect();
    by_peak.sort_by(|&a, &b| peaks[b].total_cmp(&peaks[a]).then(a.cmp(&b)));
    let mut top: Vec<usize> = by_peak[..n_top].to_vec();
    top.sort_unstable();

    let mut rest: Vec<usize> = (0..n_days).filter(|j| !top.contains(j)).collect();
    rest.sort_by(|&a, &b| means[a].total_cmp(&means[b]).then(a.cmp(&b)));
    let n_strata = target - n_top;

    // (day, weight, members) per selected slot, top days first.
    let mut picked: Vec<(usize, f64, Vec<usize>)> =
        top.iter().map(|&j| (j, 1.0, vec![j])).collect();
    if n_strata > 0 {
        let base = rest.len() / n_strata;
        let extra = rest.len() % n_strata;
        let mut start = 0;
        for s in 0..n_strata {
            let size = base + usize::from(s < extra);
            let members = rest[start..start + size].to_vec();
            start += size;
            let mean = members.iter().map(|&j| means[j]).sum::<f64>() / size as f64;
            let rep = members
                .iter()
                .copied()
                .min_by(|&a, &b| {
                    (means[a] - mean)
                        .abs()
                        .total_cmp(&(means[b] - mean).abs())
                        .then(a.cmp(&b))
                })
                .expect("stratum never empty");
            picked.push((rep, size as f64, members));
        }
    } else if !rest.is_empty() {
        return Err(DataError::Invalid(
            "representative-day target leaves unassigned days".into(),
        ));
    }

    picked.sort_by_key(|&(day, ..)| day);
    let mut map = vec![usize::MAX; n_days];
    for (slot, (_, _, members)) in picked.iter().enumerate() {
        for &m in members {
            map[m] = slot;
        }
    }
    debug_assert!(map.iter().all(|&s| s != usize::MAX));
    Ok(DaySelection {
        days: picked.iter().map(|&(d, ..)| d).collect(),
        weights: picked.iter().map(|&(_, w, _)| w).collect(),
        map,
    })
}
