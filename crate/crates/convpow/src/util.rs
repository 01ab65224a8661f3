//! Shared numeric helpers: compensated sums and cached FFT plans.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// l1 norm with pairwise block summation; keeps relative error near machine
/// precision even on multi-million-entry windows.
pub fn l1_norm(xs: &[f64]) -> f64 {
    block_sum(xs, |x| x.abs())
}

/// Plain sum with the same pairwise blocking.
pub fn sum(xs: &[f64]) -> f64 {
    block_sum(xs, |x| x)
}

fn block_sum(xs: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    const BLOCK: usize = 1024;
    if xs.len() <= BLOCK {
        return xs.iter().map(|&x| f(x)).sum();
    }
    let mut partials: Vec<f64> = xs.chunks(BLOCK).map(|c| c.iter().map(|&x| f(x)).sum()).collect();
    while partials.len() > 1 {
        partials = partials.chunks(2).map(|c| c.iter().sum()).collect();
    }
    partials[0]
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub fn plan_forward(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

pub fn plan_inverse(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// Smallest power of two >= n.
pub fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// In-place forward FFT.
pub fn fft_forward(buf: &mut [Complex64]) {
    plan_forward(buf.len()).process(buf);
}

/// In-place inverse FFT, normalized by 1/len.
pub fn fft_inverse(buf: &mut [Complex64]) {
    plan_inverse(buf.len()).process(buf);
    let scale = 1.0 / buf.len() as f64;
    for x in buf.iter_mut() {
        *x *= scale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_matches_naive_on_blocks() {
        let xs: Vec<f64> = (0..5000).map(|i| ((i * 37) % 101) as f64 - 50.0).collect();
        let naive: f64 = xs.iter().map(|x| x.abs()).sum();
        assert!((l1_norm(&xs) - naive).abs() < 1e-9);
    }

    #[test]
    fn fft_roundtrip() {
        let mut buf: Vec<Complex64> =
            (0..256).map(|i| Complex64::new((i % 7) as f64, 0.0)).collect();
        let orig = buf.clone();
        fft_forward(&mut buf);
        fft_inverse(&mut buf);
        for (a, b) in buf.iter().zip(orig.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
