//! Signed measures on Z with dense-window storage and certified l1 trimming.
//!
//! A [`LatticeMeasure`] is an offset plus a dense coefficient window plus a
//! `tail_bound`: the total l1 mass discarded by trimming since construction.
//! Every operation propagates the bound, so each reported l1 quantity is a
//! certified interval around the exact (untrimmed) value.

use num_complex::Complex64;

use crate::error::Error;
use crate::util;
use crate::Result;

/// Coefficients with absolute value at or below this are treated as zero
/// support when testing strict aperiodicity.
pub const SUPPORT_EPS: f64 = 1e-15;

/// Finitely supported signed measure on Z.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeMeasure {
    offset: i64,
    coeffs: Vec<f64>,
    tail_bound: f64,
}

impl LatticeMeasure {
    /// Builds a measure from a coefficient window starting at `offset`.
    ///
    /// Leading and trailing exact zeros are stripped (adjusting the offset);
    /// the result has `tail_bound = 0`.
    pub fn from_coeffs(offset: i64, coeffs: &[f64]) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("coefficients"));
        }
        let first = coeffs.iter().position(|&c| c != 0.0);
        let m = match first {
            None => LatticeMeasure { offset: 0, coeffs: vec![0.0], tail_bound: 0.0 },
            Some(lo) => {
                let hi = coeffs.iter().rposition(|&c| c != 0.0).unwrap();
                LatticeMeasure {
                    offset: offset + lo as i64,
                    coeffs: coeffs[lo..=hi].to_vec(),
                    tail_bound: 0.0,
                }
            }
        };
        Ok(m)
    }

    /// Point mass at `k`.
    pub fn delta(k: i64) -> Self {
        LatticeMeasure { offset: k, coeffs: vec![1.0], tail_bound: 0.0 }
    }

    /// The identically zero measure.
    pub fn zero() -> Self {
        LatticeMeasure { offset: 0, coeffs: vec![0.0], tail_bound: 0.0 }
    }

    pub(crate) fn from_parts(offset: i64, coeffs: Vec<f64>, tail_bound: f64) -> Self {
        let mut m = LatticeMeasure { offset, coeffs, tail_bound };
        m.strip_zero_ends();
        m
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the window is never empty; the zero measure stores [0.0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    /// Index of the last stored coefficient.
    pub fn max_index(&self) -> i64 {
        self.offset + self.coeffs.len() as i64 - 1
    }

    /// Coefficient at lattice site `k` (zero outside the window).
    pub fn at(&self, k: i64) -> f64 {
        let i = k - self.offset;
        if i < 0 || i >= self.coeffs.len() as i64 {
            0.0
        } else {
            self.coeffs[i as usize]
        }
    }

    /// Sum of stored coefficients.
    pub fn mass(&self) -> f64 {
        util::sum(&self.coeffs)
    }

    /// l1 norm of the stored window.
    pub fn l1_norm(&self) -> f64 {
        util::l1_norm(&self.coeffs)
    }

    /// mu_check: reverses the measure, `mu_check(n) = mu(-n)`.
    pub fn reverse(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        LatticeMeasure {
            offset: -self.max_index(),
            coeffs,
            tail_bound: self.tail_bound,
        }
    }

    /// Checks the probability contract: nonnegative coefficients up to noise
    /// and total mass 1 within the certified tail.
    pub fn check_probability(&self) -> Result<()> {
        if let Some(c) = self.coeffs.iter().find(|c| **c < -1e-12) {
            return Err(Error::NotProbability(format!("negative coefficient {c:.3e}")));
        }
        let mass = self.mass();
        if (mass - 1.0).abs() > self.tail_bound + 1e-9 {
            return Err(Error::NotProbability(format!(
                "mass {mass:.12} deviates from 1 beyond tail bound {:.3e}",
                self.tail_bound
            )));
        }
        Ok(())
    }

    fn strip_zero_ends(&mut self) {
        let first = self.coeffs.iter().position(|&c| c != 0.0);
        match first {
            None => {
                self.offset = 0;
                self.coeffs = vec![0.0];
            }
            Some(lo) => {
                let hi = self.coeffs.iter().rposition(|&c| c != 0.0).unwrap();
                if lo > 0 || hi + 1 < self.coeffs.len() {
                    self.coeffs.drain(hi + 1..);
                    self.coeffs.drain(..lo);
                    self.offset += lo as i64;
                }
            }
        }
    }

    /// Trims entries from the window ends, smallest absolute mass first,
    /// while the removed l1 mass stays within `budget`. Returns removed mass.
    fn trim_ends(&mut self, budget: f64) -> f64 {
        let mut removed = 0.0;
        let mut lo = 0usize;
        let mut hi = self.coeffs.len(); // exclusive
        while hi - lo > 1 {
            let left = self.coeffs[lo].abs();
            let right = self.coeffs[hi - 1].abs();
            let (v, is_left) = if left <= right { (left, true) } else { (right, false) };
            if removed + v > budget {
                break;
            }
            removed += v;
            if is_left {
                lo += 1;
            } else {
                hi -= 1;
            }
        }
        if lo > 0 || hi < self.coeffs.len() {
            self.coeffs.truncate(hi);
            self.coeffs.drain(..lo);
            self.offset += lo as i64;
        }
        self.strip_zero_ends();
        removed
    }

    /// Hard-caps the window width, trimming smallest-first from the ends
    /// regardless of budget. Returns the removed mass.
    fn enforce_window_cap(&mut self, cap: usize) -> f64 {
        let cap = cap.max(1);
        let mut removed = 0.0;
        let mut lo = 0usize;
        let mut hi = self.coeffs.len();
        while hi - lo > cap {
            let left = self.coeffs[lo].abs();
            let right = self.coeffs[hi - 1].abs();
            if left <= right {
                removed += left;
                lo += 1;
            } else {
                removed += right;
                hi -= 1;
            }
        }
        if lo > 0 || hi < self.coeffs.len() {
            self.coeffs.truncate(hi);
            self.coeffs.drain(..lo);
            self.offset += lo as i64;
        }
        self.strip_zero_ends();
        removed
    }
}

/// Which convolution evaluation path to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvPath {
    /// Pick direct or FFT by operation-count estimate.
    Auto,
    /// Quadratic direct summation.
    Direct,
    /// Zero-padded FFT (exact linear convolution up to roundoff).
    Fft,
}

/// Full convolution of `a` and `b`, then end-trimming within `trim_eps`.
///
/// `tail_bound` of the result is `|a|_1 tail(b) + |b|_1 tail(a) + trimmed`.
pub fn convolve(a: &LatticeMeasure, b: &LatticeMeasure, trim_eps: f64) -> Result<LatticeMeasure> {
    convolve_opts(a, b, trim_eps, None, ConvPath::Auto)
}

/// Convolution with an explicit evaluation path (both paths agree within
/// 1e-12 in l1; see tests).
pub fn convolve_path(
    a: &LatticeMeasure,
    b: &LatticeMeasure,
    trim_eps: f64,
    path: ConvPath,
) -> Result<LatticeMeasure> {
    convolve_opts(a, b, trim_eps, None, path)
}

pub(crate) fn convolve_opts(
    a: &LatticeMeasure,
    b: &LatticeMeasure,
    trim_eps: f64,
    max_window: Option<usize>,
    path: ConvPath,
) -> Result<LatticeMeasure> {
    if trim_eps < 0.0 || !trim_eps.is_finite() {
        return Err(Error::InvalidParameter(format!("trim_eps = {trim_eps}")));
    }
    let base_tail = a.l1_norm() * b.tail_bound + b.l1_norm() * a.tail_bound;
    if a.is_zero() || b.is_zero() {
        let mut z = LatticeMeasure::zero();
        z.tail_bound = base_tail;
        return Ok(z);
    }
    let (la, lb) = (a.coeffs.len(), b.coeffs.len());
    let out_len = la + lb - 1;
    let use_fft = match path {
        ConvPath::Direct => false,
        ConvPath::Fft => true,
        ConvPath::Auto => {
            let n = util::next_pow2(out_len);
            let fft_cost = 6.0 * n as f64 * (n as f64).log2();
            (la as f64) * (lb as f64) > fft_cost
        }
    };
    let coeffs = if use_fft {
        conv_fft(&a.coeffs, &b.coeffs)
    } else {
        conv_direct(&a.coeffs, &b.coeffs)
    };
    let mut out = LatticeMeasure { offset: a.offset + b.offset, coeffs, tail_bound: base_tail };
    out.strip_zero_ends();
    let mut removed = out.trim_ends(trim_eps);
    if let Some(cap) = max_window {
        removed += out.enforce_window_cap(cap);
    }
    out.tail_bound += removed;
    Ok(out)
}

fn conv_direct(a: &[f64], b: &[f64]) -> Vec<f64> {
    // inner loop over the longer array for contiguous writes
    let (short, long, _swapped) = if a.len() <= b.len() { (a, b, false) } else { (b, a, true) };
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &s) in short.iter().enumerate() {
        if s == 0.0 {
            continue;
        }
        for (j, &l) in long.iter().enumerate() {
            out[i + j] += s * l;
        }
    }
    out
}

fn conv_fft(a: &[f64], b: &[f64]) -> Vec<f64> {
    let out_len = a.len() + b.len() - 1;
    let n = util::next_pow2(out_len);
    let mut fa: Vec<Complex64> = Vec::with_capacity(n);
    fa.extend(a.iter().map(|&x| Complex64::new(x, 0.0)));
    fa.resize(n, Complex64::new(0.0, 0.0));
    let mut fb: Vec<Complex64> = Vec::with_capacity(n);
    fb.extend(b.iter().map(|&x| Complex64::new(x, 0.0)));
    fb.resize(n, Complex64::new(0.0, 0.0));
    util::fft_forward(&mut fa);
    util::fft_forward(&mut fb);
    for (x, y) in fa.iter_mut().zip(fb.iter()) {
        *x *= *y;
    }
    util::fft_inverse(&mut fa);
    fa.truncate(out_len);
    fa.into_iter().map(|z| z.re).collect()
}

/// alpha * a + (1 - alpha) * b with exact coefficients.
pub fn mixture(alpha: f64, a: &LatticeMeasure, b: &LatticeMeasure) -> Result<LatticeMeasure> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("mixture weight {alpha} outside [0,1]")));
    }
    let lo = a.offset.min(b.offset);
    let hi = a.max_index().max(b.max_index());
    let mut coeffs = vec![0.0; (hi - lo + 1) as usize];
    for (i, c) in a.coeffs.iter().enumerate() {
        coeffs[(a.offset - lo) as usize + i] += alpha * c;
    }
    for (i, c) in b.coeffs.iter().enumerate() {
        coeffs[(b.offset - lo) as usize + i] += (1.0 - alpha) * c;
    }
    Ok(LatticeMeasure::from_parts(
        lo,
        coeffs,
        alpha * a.tail_bound + (1.0 - alpha) * b.tail_bound,
    ))
}

/// Options shared by the sweep drivers.
#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    /// Total trim budget for the whole sweep (split evenly per step).
    pub trim_eps: f64,
    /// Hard cap on window width; overflow is trimmed and charged to the
    /// tail bound. `None` lets windows grow as the budget allows.
    pub max_window: Option<usize>,
    /// Evaluation path for the per-step convolutions.
    pub path: ConvPath,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { trim_eps: 1e-12, max_window: None, path: ConvPath::Auto }
    }
}

/// Streams mu^(*n) for n = 1..=n_max into `visit`, trimming each step with
/// budget `trim_eps / n_max` so that the cumulative certified tail stays
/// within `trim_eps` (plus any window-cap overflow).
pub fn power_sweep<F>(
    mu: &LatticeMeasure,
    n_max: u64,
    opts: SweepOptions,
    visit: &mut F,
) -> Result<()>
where
    F: FnMut(u64, &LatticeMeasure),
{
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be >= 1".into()));
    }
    mu.check_probability()?;
    let step_budget = opts.trim_eps / n_max as f64;
    let mut p = mu.clone();
    visit(1, &p);
    for n in 2..=n_max {
        p = convolve_opts(&p, mu, step_budget, opts.max_window, opts.path)?;
        visit(n, &p);
    }
    Ok(())
}

/// Collects the swept powers (convenience for small sweeps).
pub fn powers(mu: &LatticeMeasure, n_max: u64, opts: SweepOptions) -> Result<Vec<LatticeMeasure>> {
    let mut out = Vec::with_capacity(n_max as usize);
    power_sweep(mu, n_max, opts, &mut |_, p| out.push(p.clone()))?;
    Ok(out)
}

/// Values of a Ritt-type norm sweep: `values[i] = ns[i]^m * |(d0-mu)^{*m} * mu^{*ns[i]}|_1`.
#[derive(Debug, Clone)]
pub struct RittSweep {
    /// Difference order m.
    pub m: u32,
    /// The n values the sweep was evaluated at (increasing).
    pub ns: Vec<u64>,
    /// Nonnegative sweep values.
    pub values: Vec<f64>,
    /// Per-n bound (or estimate, for the ring engine) on the l1 error
    /// introduced by trimming; nondecreasing in n.
    pub tail_error: Vec<f64>,
}

impl RittSweep {
    /// Value at exact n, if swept.
    pub fn value_at(&self, n: u64) -> Option<f64> {
        self.ns.iter().position(|&k| k == n).map(|i| self.values[i])
    }

    /// Log-log growth exponent of the values on [n_lo, n_hi].
    pub fn fit_slope(&self, n_lo: u64, n_hi: u64) -> Result<f64> {
        let pts: Vec<(f64, f64)> = self
            .ns
            .iter()
            .zip(self.values.iter())
            .filter(|(&n, _)| n >= n_lo && n <= n_hi)
            .map(|(&n, &v)| (n as f64, v))
            .collect();
        growth_exponent_fit_points(&pts, n_lo as f64, n_hi as f64)
    }
}

/// Sweeps `n^m |(d0 - mu)^{*m} * mu^{*n}|_1` for n = 1..=n_max.
///
/// m = 0 gives the mass sequence; m = 1 is the Ritt quantity itself.
pub fn ritt_sweep(
    mu: &LatticeMeasure,
    m: u32,
    n_max: u64,
    opts: SweepOptions,
) -> Result<RittSweep> {
    let kernel = difference_kernel(mu, m)?;
    let kernel_norm = kernel.l1_norm();
    let mut ns = Vec::with_capacity(n_max as usize);
    let mut values = Vec::with_capacity(n_max as usize);
    let mut tail_error = Vec::with_capacity(n_max as usize);
    power_sweep(mu, n_max, opts, &mut |n, p| {
        let nm = (n as f64).powi(m as i32);
        let v = if m == 0 {
            p.l1_norm()
        } else {
            // no trimming on the norm-evaluation convolution
            let prod = convolve_opts(&kernel, p, 0.0, None, opts.path)
                .expect("norm convolution cannot fail");
            prod.l1_norm()
        };
        ns.push(n);
        values.push(nm * v);
        tail_error.push(nm * kernel_norm * p.tail_bound());
    })?;
    Ok(RittSweep { m, ns, values, tail_error })
}

/// (d0 - mu)^{*m}, computed exactly.
pub fn difference_kernel(mu: &LatticeMeasure, m: u32) -> Result<LatticeMeasure> {
    let diff = mixture_signed(&LatticeMeasure::delta(0), mu);
    let mut kernel = LatticeMeasure::delta(0);
    for _ in 0..m {
        kernel = convolve(&kernel, &diff, 0.0)?;
    }
    Ok(kernel)
}

/// d0 - mu as a signed measure (internal helper for difference kernels).
fn mixture_signed(a: &LatticeMeasure, b: &LatticeMeasure) -> LatticeMeasure {
    let lo = a.offset.min(b.offset);
    let hi = a.max_index().max(b.max_index());
    let mut coeffs = vec![0.0; (hi - lo + 1) as usize];
    for (i, c) in a.coeffs.iter().enumerate() {
        coeffs[(a.offset - lo) as usize + i] += c;
    }
    for (i, c) in b.coeffs.iter().enumerate() {
        coeffs[(b.offset - lo) as usize + i] -= c;
    }
    LatticeMeasure::from_parts(lo, coeffs, a.tail_bound + b.tail_bound)
}

/// Mass, mean and second moment over the stored window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub mass: f64,
    pub mean: f64,
    pub second_moment: f64,
    /// Set when tail_bound > 0: moments of the trimmed mass are unknown.
    pub trimmed: bool,
}

/// Windowed moments of order <= 2.
pub fn moments(mu: &LatticeMeasure, order: u8) -> Result<MomentReport> {
    if order > 2 {
        return Err(Error::InvalidParameter(format!("moment order {order} > 2")));
    }
    let mut mass = 0.0;
    let mut mean = 0.0;
    let mut second = 0.0;
    for (i, &c) in mu.coeffs.iter().enumerate() {
        let k = (mu.offset + i as i64) as f64;
        mass += c;
        if order >= 1 {
            mean += k * c;
        }
        if order >= 2 {
            second += k * k * c;
        }
    }
    Ok(MomentReport { mass, mean, second_moment: second, trimmed: mu.tail_bound > 0.0 })
}

/// True iff the support is not contained in a coset of a proper subgroup,
/// i.e. the gcd of pairwise support differences is 1.
///
/// Coefficients below [`SUPPORT_EPS`] in absolute value are treated as zero.
pub fn is_strictly_aperiodic(mu: &LatticeMeasure) -> Result<bool> {
    let support: Vec<i64> = mu
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.abs() > SUPPORT_EPS)
        .map(|(i, _)| mu.offset + i as i64)
        .collect();
    if support.is_empty() {
        return Err(Error::ZeroMeasure);
    }
    if support.len() == 1 {
        return Ok(false);
    }
    let mut g: u64 = 0;
    for w in support.windows(2) {
        g = gcd(g, (w[1] - w[0]).unsigned_abs());
        if g == 1 {
            return Ok(true);
        }
    }
    Ok(g == 1)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Least-squares slope of log(value) against log(n) for a dense series
/// (`series[i]` is the value at n = i + 1) restricted to [n_lo, n_hi].
pub fn growth_exponent_fit(series: &[f64], n_lo: u64, n_hi: u64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .enumerate()
        .map(|(i, &v)| ((i + 1) as f64, v))
        .filter(|(n, _)| *n >= n_lo as f64 && *n <= n_hi as f64)
        .collect();
    growth_exponent_fit_points(&pts, n_lo as f64, n_hi as f64)
}

/// Same fit, for series sampled at explicit abscissae.
pub fn growth_exponent_fit_points(points: &[(f64, f64)], n_lo: f64, n_hi: f64) -> Result<f64> {
    if n_hi < 2.0 * n_lo {
        return Err(Error::InvalidParameter(format!(
            "fit window [{n_lo}, {n_hi}] too narrow: need n_hi >= 2 n_lo"
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, &(n, v)) in points.iter().enumerate() {
        if n < n_lo || n > n_hi {
            continue;
        }
        if v <= 0.0 {
            return Err(Error::NonPositiveSeries { index: i, value: v });
        }
        xs.push(n.ln());
        ys.push(v.ln());
    }
    if xs.len() < 2 {
        return Err(Error::InvalidParameter("fewer than 2 points in fit window".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("degenerate fit window (single abscissa)".into()));
    }
    Ok(sxy / sxx)
}

/// Shared boundedness convention: a sweep counts as bounded when its fitted
/// growth exponent does not exceed this threshold.
pub const BOUNDED_SLOPE: f64 = 0.1;

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn half_half() -> LatticeMeasure {
        LatticeMeasure::from_coeffs(0, &[0.5, 0.5]).unwrap()
    }

    fn ternary() -> LatticeMeasure {
        LatticeMeasure::from_coeffs(-1, &[1.0 / 3.0; 3]).unwrap()
    }

    #[test]
    fn from_coeffs_identity_and_uniform() {
        let d0 = LatticeMeasure::from_coeffs(0, &[1.0]).unwrap();
        assert_eq!(d0, LatticeMeasure::delta(0));
        assert_eq!(d0.mass(), 1.0);
        let u = LatticeMeasure::from_coeffs(-1, &[1.0 / 3.0; 3]).unwrap();
        assert!((u.mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn from_coeffs_strips_zeros() {
        let m = LatticeMeasure::from_coeffs(0, &[0.0, 0.5, 0.5, 0.0]).unwrap();
        assert_eq!(m.offset(), 1);
        assert_eq!(m.coeffs(), &[0.5, 0.5]);
    }

    #[test]
    fn from_coeffs_rejects_bad_input() {
        assert_eq!(LatticeMeasure::from_coeffs(0, &[]), Err(Error::EmptyMeasure));
        assert!(LatticeMeasure::from_coeffs(0, &[f64::NAN]).is_err());
    }

    #[test]
    fn convolve_delta_is_identity() {
        let mu = LatticeMeasure::from_coeffs(-2, &[0.1, 0.4, 0.2, 0.3]).unwrap();
        let out = convolve(&LatticeMeasure::delta(0), &mu, 0.0).unwrap();
        assert_eq!(out, mu);
    }

    #[test]
    fn convolve_binomial_square() {
        let sq = convolve(&half_half(), &half_half(), 0.0).unwrap();
        assert_eq!(sq.offset(), 0);
        assert_eq!(sq.coeffs(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn convolve_trim_budget_and_tail() {
        let a = LatticeMeasure::from_coeffs(0, &[1e-14, 0.5, 0.5, 1e-14]).unwrap();
        let out = convolve(&a, &LatticeMeasure::delta(0), 1e-10).unwrap();
        // both tiny ends removed, tail bound charged
        assert_eq!(out.coeffs(), &[0.5, 0.5]);
        assert!(out.tail_bound() > 0.0 && out.tail_bound() <= 1e-10);
    }

    #[test]
    fn power_sweep_delta_shift() {
        let d1 = LatticeMeasure::delta(1);
        let ps = powers(&d1, 5, SweepOptions::default()).unwrap();
        for (i, p) in ps.iter().enumerate() {
            assert_eq!(*p, LatticeMeasure::delta(i as i64 + 1));
        }
    }

    #[test]
    fn power_sweep_binomial_row() {
        let ps = powers(&half_half(), 4, SweepOptions::default()).unwrap();
        let p4 = &ps[3];
        let want = [1.0, 4.0, 6.0, 4.0, 1.0].map(|x| x / 16.0);
        assert_eq!(p4.coeffs().len(), 5);
        for (a, b) in p4.coeffs().iter().zip(want.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn power_sweep_mass_conservation() {
        let mut ok = true;
        power_sweep(&ternary(), 64, SweepOptions::default(), &mut |_, p| {
            ok &= (p.mass() - 1.0).abs() <= p.tail_bound() + 1e-12;
        })
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn power_sweep_rejects_bad_input() {
        assert!(power_sweep(&ternary(), 0, SweepOptions::default(), &mut |_, _| {}).is_err());
        let signed = LatticeMeasure::from_coeffs(0, &[1.5, -0.5]).unwrap();
        assert!(power_sweep(&signed, 2, SweepOptions::default(), &mut |_, _| {}).is_err());
    }

    fn binom(n: u64, k: u64) -> u128 {
        let mut c: u128 = 1;
        for i in 0..k {
            c = c * (n - i) as u128 / (i + 1) as u128;
        }
        c
    }

    #[test]
    fn ritt_sweep_fixed_point_is_zero() {
        let sw = ritt_sweep(&LatticeMeasure::delta(0), 1, 10, SweepOptions::default()).unwrap();
        assert!(sw.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ritt_sweep_binomial_closed_form() {
        // n * 2^-n * C(n, floor(n/2)), from telescoping binomial-row differences
        let sw = ritt_sweep(&half_half(), 1, 24, SweepOptions::default()).unwrap();
        assert!((sw.value_at(1).unwrap() - 0.5).abs() < 1e-14);
        assert!((sw.value_at(2).unwrap() - 1.0).abs() < 1e-14);
        assert!((sw.value_at(4).unwrap() - 1.5).abs() < 1e-14);
        for (i, &n) in sw.ns.iter().enumerate() {
            let oracle = n as f64 * binom(n, n / 2) as f64 * (0.5f64).powi(n as i32);
            assert!(
                (sw.values[i] - oracle).abs() <= 1e-12 * oracle.max(1.0),
                "n = {n}: {} vs {oracle}",
                sw.values[i]
            );
        }
    }

    #[test]
    fn ritt_sweep_m0_is_mass() {
        let sw = ritt_sweep(&ternary(), 0, 16, SweepOptions::default()).unwrap();
        for &v in &sw.values {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn moments_examples() {
        let m = moments(&ternary(), 2).unwrap();
        assert!((m.mass - 1.0).abs() < 1e-15);
        assert!(m.mean.abs() < 1e-15);
        assert!((m.second_moment - 2.0 / 3.0).abs() < 1e-15);
        let d1 = moments(&LatticeMeasure::delta(1), 2).unwrap();
        assert_eq!((d1.mass, d1.mean, d1.second_moment), (1.0, 1.0, 1.0));
    }

    #[test]
    fn moments_geometric_mean() {
        // sum n 2^-(n+1) = 1
        let coeffs: Vec<f64> = (0..=60).map(|n| (0.5f64).powi(n + 1)).collect();
        let mu = LatticeMeasure::from_coeffs(0, &coeffs).unwrap();
        let m = moments(&mu, 2).unwrap();
        assert!((m.mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn aperiodicity_examples() {
        let on_01 = LatticeMeasure::from_coeffs(0, &[0.5, 0.5]).unwrap();
        assert!(is_strictly_aperiodic(&on_01).unwrap());
        let on_02 = LatticeMeasure::from_coeffs(0, &[0.5, 0.0, 0.5]).unwrap();
        assert!(!is_strictly_aperiodic(&on_02).unwrap());
        assert!(!is_strictly_aperiodic(&LatticeMeasure::delta(1)).unwrap());
        assert!(is_strictly_aperiodic(&LatticeMeasure::zero()).is_err());
    }

    #[test]
    fn combinator_examples() {
        assert_eq!(LatticeMeasure::delta(1).reverse(), LatticeMeasure::delta(-1));
        let mix = mixture(0.5, &LatticeMeasure::delta(1), &LatticeMeasure::delta(-1)).unwrap();
        assert_eq!(mix.offset(), -1);
        assert_eq!(mix.coeffs(), &[0.5, 0.0, 0.5]);
        assert!(mixture(1.5, &LatticeMeasure::delta(0), &LatticeMeasure::delta(0)).is_err());
    }

    #[test]
    fn growth_fit_examples() {
        let constant = vec![3.0; 100];
        assert!(growth_exponent_fit(&constant, 10, 100).unwrap().abs() < 1e-12);
        let sqrt: Vec<f64> = (1..=400).map(|n| (n as f64).sqrt()).collect();
        let s = growth_exponent_fit(&sqrt, 100, 400).unwrap();
        assert!((s - 0.5).abs() < 1e-6);
        let with_zero = vec![1.0, 0.0, 2.0, 3.0];
        assert!(growth_exponent_fit(&with_zero, 1, 4).is_err());
    }

    #[test]
    fn convolution_theorem_on_grid() {
        // FT(a * b) = FT(a) FT(b) on a 256-point grid
        let a = LatticeMeasure::from_coeffs(-3, &[0.2, -0.1, 0.4, 0.05, 0.25]).unwrap();
        let b = LatticeMeasure::from_coeffs(2, &[0.7, 0.1, -0.3]).unwrap();
        let c = convolve(&a, &b, 0.0).unwrap();
        let ft = |m: &LatticeMeasure, theta: f64| -> Complex64 {
            m.coeffs()
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let k = (m.offset() + i as i64) as f64;
                    Complex64::from_polar(1.0, k * theta) * v
                })
                .sum()
        };
        for j in 0..256 {
            let theta = std::f64::consts::PI * (j as f64 + 0.5) / 256.0;
            let lhs = ft(&c, theta);
            let rhs = ft(&a, theta) * ft(&b, theta);
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn two_paths_agree_on_long_inputs() {
        // deterministic pseudo-random signed inputs, length up to 4096
        let gen = |len: usize, seed: u64| -> Vec<f64> {
            let mut state = seed;
            (0..len)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
                })
                .collect()
        };
        for (la, lb) in [(4096, 4096), (4096, 37), (513, 2048)] {
            let a = LatticeMeasure::from_coeffs(-5, &gen(la, 17)).unwrap();
            let b = LatticeMeasure::from_coeffs(3, &gen(lb, 99)).unwrap();
            let d = convolve_path(&a, &b, 0.0, ConvPath::Direct).unwrap();
            let f = convolve_path(&a, &b, 0.0, ConvPath::Fft).unwrap();
            assert_eq!(d.offset(), f.offset());
            let mut l1_diff = 0.0;
            let lo = d.offset().min(f.offset());
            let hi = d.max_index().max(f.max_index());
            for k in lo..=hi {
                l1_diff += (d.at(k) - f.at(k)).abs();
            }
            // scale by input norms: inputs here have l1 of order len/2
            let scale = a.l1_norm() * b.l1_norm();
            assert!(l1_diff <= 1e-12 * scale.max(1.0), "l1 diff {l1_diff} at scale {scale}");
        }
    }

    proptest! {
        #[test]
        fn prop_young_inequality(
            av in proptest::collection::vec(-1.0f64..1.0, 1..40),
            bv in proptest::collection::vec(-1.0f64..1.0, 1..40),
        ) {
            let a = LatticeMeasure::from_coeffs(-2, &av).unwrap();
            let b = LatticeMeasure::from_coeffs(1, &bv).unwrap();
            let c = convolve(&a, &b, 0.0).unwrap();
            prop_assert!(c.l1_norm() <= a.l1_norm() * b.l1_norm() + 1e-10);
        }

        #[test]
        fn prop_reverse_involution(
            av in proptest::collection::vec(-1.0f64..1.0, 1..30),
            off in -10i64..10,
        ) {
            let a = LatticeMeasure::from_coeffs(off, &av).unwrap();
            prop_assert_eq!(a.reverse().reverse(), a);
        }

        #[test]
        fn prop_ritt_values_reverse_invariant(
            weights in proptest::collection::vec(0.01f64..1.0, 2..6),
        ) {
            let total: f64 = weights.iter().sum();
            let coeffs: Vec<f64> = weights.iter().map(|w| w / total).collect();
            let mu = LatticeMeasure::from_coeffs(-1, &coeffs).unwrap();
            let a = ritt_sweep(&mu, 1, 12, SweepOptions::default()).unwrap();
            let b = ritt_sweep(&mu.reverse(), 1, 12, SweepOptions::default()).unwrap();
            for (x, y) in a.values.iter().zip(b.values.iter()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
