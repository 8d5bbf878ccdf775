//! Order-stable parallel reductions.
//!
//! rayon's `sum` splits work adaptively, so floating-point totals can differ
//! between runs. Collecting first keeps the element order and the final
//! sequential pass makes the rounding reproducible.

use rayon::prelude::*;

pub(crate) trait DetSum {
    fn det_sum(self) -> f64;
}

impl<I> DetSum for I
where
    I: ParallelIterator<Item = f64>,
{
    fn det_sum(self) -> f64 {
        let parts: Vec<f64> = self.collect();
        parts.iter().sum()
    }
}
