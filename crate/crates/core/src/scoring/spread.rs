use crate::error::{Error, Result};
use crate::scalar::Real;

use super::CnsOutcome;

/// Percentile with linear interpolation between closest ranks
/// (`rank = (n - 1) · pct / 100`). `None` for empty input.
pub fn percentile<T: Real>(values: &[T], pct: f64) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let rank = (sorted.len() - 1) as f64 * pct / 100.0;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = T::from_f64_lossy(rank - lo as f64);
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * frac)
}

/// Fraction of runs in which each cycle's r′ lies strictly above the run's
/// `pct` percentile of scored r′ values.
///
/// `runs[k][c]` is the r′ of cycle `c` in run `k`. Unbounded values always
/// count as outliers; disregarded ones never do. A cycle disregarded in every
/// run has no spread number.
pub fn spread_number<T: Real>(runs: &[Vec<CnsOutcome<T>>], pct: f64) -> Result<Vec<Option<T>>> {
    if runs.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(pct > 0.0 && pct < 100.0) {
        return Err(Error::InvalidParam(format!("percentile must lie in (0, 100), got {pct}")));
    }
    let cycles = runs[0].len();
    if runs.iter().any(|r| r.len() != cycles) {
        return Err(Error::InvalidParam("runs cover different cycle sets".into()));
    }
    let mut outliers = vec![0usize; cycles];
    let mut scored = vec![false; cycles];
    for run in runs {
        let finite: Vec<T> = run.iter().filter_map(CnsOutcome::value).collect();
        let cut = percentile(&finite, pct);
        for (c, r) in run.iter().enumerate() {
            let hit = match *r {
                CnsOutcome::Score(x) => {
                    scored[c] = true;
                    cut.is_some_and(|cut| x > cut)
                }
                CnsOutcome::Unbounded => {
                    scored[c] = true;
                    true
                }
                CnsOutcome::Disregarded => false,
            };
            outliers[c] += hit as usize;
        }
    }
    let k = T::from_count(runs.len());
    Ok(outliers
        .into_iter()
        .zip(scored)
        .map(|(n, s)| s.then(|| T::from_count(n) / k))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use CnsOutcome::*;

    #[test]
    fn numpy_style_percentile() {
        assert_eq!(percentile(&[1.0, 2.0, 3.0, 4.0], 75.0), Some(3.25));
        assert_eq!(percentile(&[5.0], 75.0), Some(5.0));
        assert_eq!(percentile::<f64>(&[], 75.0), None);
        assert_eq!(percentile(&[4.0, 1.0, 3.0, 2.0, 5.0], 50.0), Some(3.0));
    }

    #[test]
    fn proportions() {
        // eight cycles: rank 5.25 of 7, so exactly the top two of each run
        // are outliers. A is always top, B twice, C once, D never.
        let base = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        let run = |tops: [usize; 2]| {
            let mut r = base;
            r[tops[0]] = 100.0;
            r[tops[1]] = 90.0;
            r.map(Score).to_vec()
        };
        let (a, b, c, d, e) = (0, 1, 2, 3, 4);
        let runs = vec![run([a, b]), run([a, b]), run([a, c]), run([a, e])];
        let r = spread_number(&runs, 75.0).unwrap();
        assert_eq!(r[a], Some(1.0));
        assert_eq!(r[b], Some(0.5));
        assert_eq!(r[c], Some(0.25));
        assert_eq!(r[d], Some(0.0));
        assert_eq!(r[e], Some(0.25));
    }

    #[test]
    fn null_handling() {
        let runs = vec![
            vec![Score(1.0), Disregarded, Unbounded],
            vec![Score(1.0), Disregarded, Score(0.5)],
        ];
        // second run: cut = 0.5 + 0.75 · 0.5 = 0.875 < 1.0
        assert_eq!(spread_number(&runs, 75.0).unwrap(), vec![Some(0.5), None, Some(0.5)]);
        assert!(spread_number::<f64>(&[], 75.0).is_err());
        assert!(spread_number(&runs, 100.0).is_err());
    }
}
