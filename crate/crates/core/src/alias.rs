//! Walker/Vose alias tables for O(1) sampling from a discrete distribution.

use rand::Rng;

#[derive(Debug, Clone)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<u32>,
}

impl AliasTable {
    /// Builds a table from non-negative weights. Returns `None` when the
    /// weights are empty or sum to zero.
    pub fn new(weights: &[f64]) -> Option<Self> {
        let n = weights.len();
        let total: f64 = weights.iter().sum();
        if n == 0 || !(total > 0.0) || !total.is_finite() {
            return None;
        }
        let mut prob: Vec<f64> = weights.iter().map(|w| w * n as f64 / total).collect();
        let mut alias = vec![0u32; n];
        let mut small = Vec::with_capacity(n);
        let mut large = Vec::with_capacity(n);
        for (i, &p) in prob.iter().enumerate() {
            if p < 1.0 {
                small.push(i);
            } else {
                large.push(i);
            }
        }
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            alias[s] = l as u32;
            prob[l] -= 1.0 - prob[s];
            if prob[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers are 1 up to rounding.
        for i in small.into_iter().chain(large) {
            prob[i] = 1.0;
        }
        Some(AliasTable { prob, alias })
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let i = rng.random_range(0..self.prob.len());
        if rng.random::<f64>() < self.prob[i] {
            i
        } else {
            self.alias[i] as usize
        }
    }

    /// Probability mass the table assigns to each outcome.
    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.prob.len() as f64;
        let mut out: Vec<f64> = self.prob.iter().map(|p| p / n).collect();
        for (i, p) in self.prob.iter().enumerate() {
            out[self.alias[i] as usize] += (1.0 - p) / n;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    #[test]
    fn degenerate_inputs() {
        assert!(AliasTable::new(&[]).is_none());
        assert!(AliasTable::new(&[0.0, 0.0]).is_none());
        let t = AliasTable::new(&[3.0]).unwrap();
        let mut rng = seed::rng(0);
        assert!((0..100).all(|_| t.sample(&mut rng) == 0));
    }

    #[test]
    fn encodes_distribution_exactly() {
        let w = [1.0, 2.0, 0.0, 4.0, 0.5];
        let t = AliasTable::new(&w).unwrap();
        let total: f64 = w.iter().sum();
        for (p, w) in t.probabilities().iter().zip(w) {
            assert!((p - w / total).abs() < 1e-12);
        }
    }

    #[test]
    fn empirical_frequencies() {
        let w = [0.1, 0.6, 0.3];
        let t = AliasTable::new(&w).unwrap();
        let mut rng = seed::rng(42);
        let mut counts = [0usize; 3];
        let n = 200_000;
        for _ in 0..n {
            counts[t.sample(&mut rng)] += 1;
        }
        for (c, w) in counts.iter().zip(w) {
            assert!((*c as f64 / n as f64 - w).abs() < 0.005);
        }
    }
}
