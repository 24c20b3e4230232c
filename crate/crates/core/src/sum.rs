//! Compensated summation.

use std::iter::Sum;
use std::ops::AddAssign;

/// Kahan–Babuška–Neumaier accumulator.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub const fn new() -> Self {
        Self { sum: 0.0, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another partial sum into this one, keeping both compensations.
    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, x: f64) {
        self.add(x);
    }
}

impl Sum<f64> for NeumaierSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().sum::<NeumaierSum>().value()
}

/// Reduces partial sums pairwise, so the association order depends only on
/// the number of partials and not on how they were produced.
pub fn pairwise_reduce(partials: &[NeumaierSum]) -> NeumaierSum {
    match partials.len() {
        0 => NeumaierSum::new(),
        1 => partials[0],
        len => {
            let (left, right) = partials.split_at(len / 2);
            let mut acc = pairwise_reduce(left);
            acc.merge(&pairwise_reduce(right));
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_low_bits() {
        let values = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(values.iter().sum::<f64>(), 0.0);
        assert_eq!(compensated_sum(values), 2.0);
    }

    #[test]
    fn many_small_terms() {
        let n = 1_000_000;
        let s = compensated_sum(std::iter::repeat_n(0.1, n));
        assert!((s - 100_000.0).abs() < 1e-9);
    }

    #[test]
    fn pairwise_matches_sequential() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1013) as f64 * 1e-3).collect();
        let parts: Vec<NeumaierSum> = xs.chunks(37).map(|c| c.iter().copied().sum()).collect();
        let a = pairwise_reduce(&parts).value();
        let b = compensated_sum(xs.iter().copied());
        assert!((a - b).abs() <= 1e-12 * b.abs());
    }
}
