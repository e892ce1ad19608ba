use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::CnsOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CentralityVariant {
    #[default]
    Degree,
    PageRank,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunValue<T> {
    pub run: usize,
    pub p: f64,
    pub q: f64,
    pub r_prime: CnsOutcome<T>,
}

/// Min-max normalised series; `None` where the raw value was undefined.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NormalizedScores<T> {
    pub spread_number: Option<T>,
    pub betweenness: Option<T>,
    pub degree: Option<T>,
    pub closeness: Option<T>,
    pub con: Option<T>,
    pub pagerank: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleScoreCard<T> {
    pub cycle: usize,
    pub r_prime_per_run: Vec<RunValue<T>>,
    pub spread_number: Option<T>,
    pub cns_betweenness: CnsOutcome<T>,
    pub cns_degree: CnsOutcome<T>,
    pub cns_closeness: CnsOutcome<T>,
    pub cns_con: CnsOutcome<T>,
    pub cns_pagerank: CnsOutcome<T>,
    pub normalized: NormalizedScores<T>,
    /// `R` under the configured variant.
    pub r: Option<T>,
}

impl<T: Real> CycleScoreCard<T> {
    pub fn new(cycle: usize) -> Self {
        CycleScoreCard {
            cycle,
            r_prime_per_run: Vec::new(),
            spread_number: None,
            cns_betweenness: CnsOutcome::Disregarded,
            cns_degree: CnsOutcome::Disregarded,
            cns_closeness: CnsOutcome::Disregarded,
            cns_con: CnsOutcome::Disregarded,
            cns_pagerank: CnsOutcome::Disregarded,
            normalized: NormalizedScores::default(),
            r: None,
        }
    }
}

/// `(x − min) / (max − min)`; a constant series maps to 0.
pub fn min_max_normalize<T: Real>(values: &[Option<T>]) -> Result<Vec<Option<T>>> {
    let defined = values.iter().flatten();
    let min = defined.clone().copied().reduce(T::min).ok_or(Error::EmptyInput)?;
    let max = defined.copied().reduce(T::max).ok_or(Error::EmptyInput)?;
    let range = max - min;
    Ok(values
        .iter()
        .map(|v| {
            v.map(|x| {
                if range > T::zero() {
                    (x - min) / range
                } else {
                    T::zero()
                }
            })
        })
        .collect())
}

/// `R = (r + (1 − B) + (1 − D)) / 3` on normalised inputs.
pub fn r_formula<T: Real>(spread: T, betweenness: T, degree: T) -> T {
    let one = T::one();
    (spread + (one - betweenness) + (one - degree)) / T::from_count(3)
}

fn normalized_series<T: Real>(cards: &[CycleScoreCard<T>], get: impl Fn(&CycleScoreCard<T>) -> Option<T>) -> Vec<Option<T>> {
    let raw: Vec<Option<T>> = cards.iter().map(get).collect();
    min_max_normalize(&raw).unwrap_or_else(|_| vec![None; cards.len()])
}

/// Normalises the six per-cycle series across `cards` and computes `R`.
///
/// `R` is undefined for a cycle when any of its three ingredients is.
/// The pagerank variant uses CNS under PageRank in place of degree.
pub fn aggregate_r<T: Real>(cards: &mut [CycleScoreCard<T>], variant: CentralityVariant) {
    let spread = normalized_series(cards, |c| c.spread_number);
    let b = normalized_series(cards, |c| c.cns_betweenness.value());
    let d = normalized_series(cards, |c| c.cns_degree.value());
    let cl = normalized_series(cards, |c| c.cns_closeness.value());
    let con = normalized_series(cards, |c| c.cns_con.value());
    let pr = normalized_series(cards, |c| c.cns_pagerank.value());
    for (i, card) in cards.iter_mut().enumerate() {
        card.normalized = NormalizedScores {
            spread_number: spread[i],
            betweenness: b[i],
            degree: d[i],
            closeness: cl[i],
            con: con[i],
            pagerank: pr[i],
        };
        let third = match variant {
            CentralityVariant::Degree => d[i],
            CentralityVariant::PageRank => pr[i],
        };
        card.r = match (spread[i], b[i], third) {
            (Some(r), Some(b), Some(x)) => Some(r_formula(r, b, x)),
            _ => None,
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_examples() {
        let v = [Some(2.0), Some(4.0), Some(6.0)];
        assert_eq!(min_max_normalize(&v).unwrap(), vec![Some(0.0), Some(0.5), Some(1.0)]);
        let same = [Some(3.0), Some(3.0)];
        assert_eq!(min_max_normalize(&same).unwrap(), vec![Some(0.0), Some(0.0)]);
        let gaps = [None, Some(1.0), Some(3.0)];
        assert_eq!(min_max_normalize(&gaps).unwrap(), vec![None, Some(0.0), Some(1.0)]);
        assert!(min_max_normalize::<f64>(&[]).is_err());
        assert!(min_max_normalize::<f64>(&[None]).is_err());
    }

    #[test]
    fn formula_examples() {
        assert_eq!(r_formula(0.0, 1.0, 1.0), 0.0);
        assert_eq!(r_formula(1.0, 0.0, 0.0), 1.0);
        assert_eq!(r_formula(0.5, 0.5, 0.5), 0.5);
    }

    fn card(i: usize, r: f64, b: f64, d: f64, pr: f64) -> CycleScoreCard<f64> {
        CycleScoreCard {
            spread_number: Some(r),
            cns_betweenness: CnsOutcome::Score(b),
            cns_degree: CnsOutcome::Score(d),
            cns_closeness: CnsOutcome::Score(1.0),
            cns_con: CnsOutcome::Score(1.0),
            cns_pagerank: CnsOutcome::Score(pr),
            ..CycleScoreCard::new(i)
        }
    }

    #[test]
    fn aggregate_uses_normalised_ingredients() {
        let mut cards = vec![card(0, 0.0, 2.0, 1.0, 3.0), card(1, 0.5, 0.0, 3.0, 1.0), card(2, 1.0, 1.0, 2.0, 2.0)];
        aggregate_r(&mut cards, CentralityVariant::Degree);
        assert_eq!(cards[0].normalized.betweenness, Some(1.0));
        assert_eq!(cards[0].r, Some(r_formula(0.0, 1.0, 0.0)));
        assert_eq!(cards[1].r, Some(r_formula(0.5, 0.0, 1.0)));
        assert_eq!(cards[2].r, Some(r_formula(1.0, 0.5, 0.5)));
        // constant closeness normalises to zero
        assert_eq!(cards[2].normalized.closeness, Some(0.0));

        aggregate_r(&mut cards, CentralityVariant::PageRank);
        assert_eq!(cards[0].r, Some(r_formula(0.0, 1.0, 1.0)));
    }

    #[test]
    fn null_ingredient_nulls_r() {
        let mut cards = vec![card(0, 0.0, 2.0, 1.0, 1.0), card(1, 1.0, 1.0, 1.0, 1.0)];
        cards[1].cns_degree = CnsOutcome::Unbounded;
        aggregate_r(&mut cards, CentralityVariant::Degree);
        assert_eq!(cards[1].r, None);
        assert!(cards[0].r.is_some());
        assert_eq!(cards[1].normalized.spread_number, Some(1.0));
    }
}
