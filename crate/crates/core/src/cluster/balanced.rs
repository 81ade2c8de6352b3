//! Balanced (equal-count) partition of sorted values into contiguous groups.

use crate::error::{Error, Result};
use crate::types::DurationIntervals;

/// Group sizes for `n` items in `k` groups: sizes differ by at most one and
/// the larger groups come first.
pub fn group_sizes(n: usize, k: usize) -> Vec<usize> {
    let (base, rem) = (n / k, n % k);
    (0..k).map(|i| base + usize::from(i < rem)).collect()
}

/// Sorts `values`, splits them by index into `k` equal-count groups and returns
/// the group means and the boundaries between neighbouring groups.
///
/// A boundary lies in `(max of lower group, min of upper group]`, so with the
/// labelling rule of [`DurationIntervals::index_of`] every training value maps
/// back to its own group whenever neighbouring groups do not share a value.
pub fn balanced_intervals(values: &[f64], k: usize) -> Result<DurationIntervals> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    if values.len() < k {
        return Err(Error::InsufficientData {
            what: "values",
            needed: k,
            got: values.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config(
            "non-finite value in balanced clustering input".into(),
        ));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);

    let mut groups = Vec::with_capacity(k);
    let mut start = 0;
    for size in group_sizes(sorted.len(), k) {
        groups.push(&sorted[start..start + size]);
        start += size;
    }

    let representatives = groups
        .iter()
        .map(|g| g.iter().sum::<f64>() / g.len() as f64)
        .collect();
    let boundaries = groups
        .windows(2)
        .map(|w| {
            let lo = *w[0].last().unwrap();
            let hi = w[1][0];
            let mid = lo + (hi - lo) / 2.0;
            if mid > lo {
                mid
            } else {
                hi
            }
        })
        .collect();
    Ok(DurationIntervals {
        boundaries,
        representatives,
    })
}
