use serde::{Deserialize, Serialize};

pub const BUCKETS: usize = 20;

/// Equal-width buckets over the observed range of a set of objective values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    /// `BUCKETS` buckets spanning `[min, max]`. The span is widened to at
    /// least `1e-6` of the largest magnitude so that runs agreeing to rounding
    /// error share a bucket instead of being spread over all of them.
    pub fn new(values: &[f64]) -> Self {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if values.is_empty() {
            return Histogram { lower: vec![], upper: vec![], counts: vec![] };
        }
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        let span = (hi - lo).max(1e-6 * scale);
        let width = span / BUCKETS as f64;
        let mut counts = vec![0; BUCKETS];
        for &v in values {
            let b = ((v - lo) / width).floor() as usize;
            counts[b.min(BUCKETS - 1)] += 1;
        }
        let lower = (0..BUCKETS).map(|b| lo + b as f64 * width).collect();
        let upper = (0..BUCKETS).map(|b| if b + 1 == BUCKETS { lo + span } else { lo + (b + 1) as f64 * width }).collect();
        Histogram { lower, upper, counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Share of values in the fullest bucket.
    pub fn modal_share(&self) -> f64 {
        let max = self.counts.iter().copied().max().unwrap_or(0);
        if self.total() == 0 {
            0.0
        } else {
            max as f64 / self.total() as f64
        }
    }

    /// Index of the fullest bucket, lowest on ties.
    pub fn modal_bucket(&self) -> Option<usize> {
        let max = self.counts.iter().copied().max()?;
        self.counts.iter().position(|&c| c == max)
    }
}
