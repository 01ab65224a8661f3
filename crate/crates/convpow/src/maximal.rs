//! Maximal operators over convolution powers, empirical weak-type (1,1)
//! constants, the truncated square function, and the spatial regularity
//! scan behind the Bellow-Calderon criterion.
//!
//! The weak-type supremum over lambda is computed exactly: on a finite
//! field the supremum of lambda #{Mf >= lambda} is attained at a field
//! value, so sorting descending and maximizing i * v_i needs no lambda
//! grid.

use crate::error::Error;
use crate::lattice::{
    convolve_opts, difference_kernel, growth_exponent_fit_points, power_sweep, ConvPath,
    LatticeMeasure, SweepOptions, BOUNDED_SLOPE,
};
use crate::monotone::Verdict;
use crate::Result;

/// Pointwise maximum field Mf(k) = max_{1<=n<=N} n^m |(d0-mu)^{*m} * mu^{*n} * f(k)|.
#[derive(Debug, Clone)]
pub struct MaximalField {
    offset: i64,
    values: Vec<f64>,
    pub horizon: u64,
    pub m: u32,
    pub input_norm: f64,
    /// Per-point bound on the error from trimming, maximized over n.
    pub error_bound: f64,
}

impl MaximalField {
    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, k: i64) -> f64 {
        let i = k - self.offset;
        if i < 0 || i >= self.values.len() as i64 {
            0.0
        } else {
            self.values[i as usize]
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

struct FieldAcc {
    lo: i64,
    values: Vec<f64>,
}

impl FieldAcc {
    fn new() -> Self {
        FieldAcc { lo: 0, values: Vec::new() }
    }

    fn absorb_max(&mut self, g: &LatticeMeasure, scale: f64) {
        if g.is_zero() {
            return;
        }
        let glo = g.offset();
        let ghi = g.max_index();
        if self.values.is_empty() {
            self.lo = glo;
            self.values = vec![0.0; (ghi - glo + 1) as usize];
        } else {
            if glo < self.lo {
                let mut grown = vec![0.0; (self.lo - glo) as usize];
                grown.extend_from_slice(&self.values);
                self.values = grown;
                self.lo = glo;
            }
            let hi = self.lo + self.values.len() as i64 - 1;
            if ghi > hi {
                self.values.resize(self.values.len() + (ghi - hi) as usize, 0.0);
            }
        }
        for (i, &c) in g.coeffs().iter().enumerate() {
            let idx = (glo - self.lo) as usize + i;
            let v = scale * c.abs();
            if v > self.values[idx] {
                self.values[idx] = v;
            }
        }
    }
}

fn validate_f(f: &LatticeMeasure) -> Result<f64> {
    let norm = f.l1_norm();
    if norm == 0.0 {
        return Err(Error::ZeroMeasure);
    }
    Ok(norm)
}

/// Running pointwise maximum over the power sweep for a batch of inputs,
/// with per-checkpoint snapshots. Shared driver for the maximal ops.
fn sweep_maximal(
    mu: &LatticeMeasure,
    m: u32,
    fs: &[&LatticeMeasure],
    n_horizon: u64,
    checkpoints: &[u64],
    opts: SweepOptions,
    mut on_checkpoint: impl FnMut(u64, &[FieldAcc]),
) -> Result<Vec<MaximalField>> {
    let norms: Vec<f64> = fs.iter().map(|f| validate_f(f)).collect::<Result<_>>()?;
    let kernel = difference_kernel(mu, m)?;
    let kernel_norm = kernel.l1_norm();
    let mut fields: Vec<FieldAcc> = fs.iter().map(|_| FieldAcc::new()).collect();
    let mut max_err = 0.0f64;
    let mut cp_iter = checkpoints.iter().peekable();
    let mut sweep_err = Ok(());
    power_sweep(mu, n_horizon, opts, &mut |n, p| {
        if sweep_err.is_err() {
            return;
        }
        let nm = (n as f64).powi(m as i32);
        let sig = if m == 0 {
            p.clone()
        } else {
            match convolve_opts(&kernel, p, 0.0, None, ConvPath::Auto) {
                Ok(s) => s,
                Err(e) => {
                    sweep_err = Err(e);
                    return;
                }
            }
        };
        for (f, acc) in fs.iter().zip(fields.iter_mut()) {
            match convolve_opts(&sig, f, 0.0, None, ConvPath::Auto) {
                Ok(g) => acc.absorb_max(&g, nm),
                Err(e) => {
                    sweep_err = Err(e);
                    return;
                }
            }
        }
        let f_sup = fs
            .iter()
            .map(|f| f.coeffs().iter().fold(0.0f64, |a, c| a.max(c.abs())))
            .fold(0.0f64, f64::max);
        max_err = max_err.max(nm * kernel_norm * p.tail_bound() * f_sup);
        while let Some(&&cp) = cp_iter.peek() {
            if cp == n {
                on_checkpoint(n, &fields);
                cp_iter.next();
            } else {
                break;
            }
        }
    })?;
    sweep_err?;
    Ok(fields
        .into_iter()
        .zip(norms.into_iter())
        .map(|(acc, input_norm)| MaximalField {
            offset: acc.lo,
            values: acc.values,
            horizon: n_horizon,
            m,
            input_norm,
            error_bound: max_err,
        })
        .collect())
}

/// Maximal field of one input over the horizon N.
pub fn maximal_function(
    mu: &LatticeMeasure,
    f: &LatticeMeasure,
    m: u32,
    n_horizon: u64,
    opts: SweepOptions,
) -> Result<MaximalField> {
    let mut out = sweep_maximal(mu, m, &[f], n_horizon, &[], opts, |_, _| {})?;
    Ok(out.pop().unwrap())
}

/// Empirical best constant in lambda #{Mf >= lambda} <= C |f|_1.
///
/// Returns (constant, maximizing lambda, 1-based level index).
pub fn weak_type_constant(field: &MaximalField) -> (f64, f64, usize) {
    let mut sorted: Vec<f64> = field.values.iter().cloned().filter(|v| *v > 0.0).collect();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut best = 0.0;
    let mut best_lambda = 0.0;
    let mut best_level = 0;
    for (i, &v) in sorted.iter().enumerate() {
        let c = (i + 1) as f64 * v;
        if c > best {
            best = c;
            best_lambda = v;
            best_level = i + 1;
        }
    }
    (best / field.input_norm, best_lambda, best_level)
}

/// Per-(f, N) weak-type constants over an N schedule, with the shared
/// stabilization verdict per input.
#[derive(Debug, Clone)]
pub struct StudyTable {
    pub m: u32,
    pub f_names: Vec<String>,
    pub ns: Vec<u64>,
    /// constants[f_index][checkpoint_index]
    pub constants: Vec<Vec<f64>>,
    /// |Mf|_2 / |f|_2 at each checkpoint (Marcinkiewicz sanity column)
    pub l2_ratios: Vec<Vec<f64>>,
    /// fitted slope of constants against N, per input
    pub slopes: Vec<Option<f64>>,
    pub verdicts: Vec<Verdict>,
}

/// Default N schedule 2^5 .. 2^12; stabilization is a log-scale phenomenon.
pub fn default_n_schedule() -> Vec<u64> {
    (5..=12).map(|j| 1u64 << j).collect()
}

/// The fixed, seeded input batch: a point mass, random +-1 inputs of dyadic
/// widths up to 64 drawn from SplitMix64(seed), and a two-bump input with
/// cancelling blocks.
pub fn default_batch(seed: u64) -> Vec<(String, LatticeMeasure)> {
    let mut out = vec![("delta0".to_string(), LatticeMeasure::delta(0))];
    let mut state = seed;
    let mut next = move || {
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    };
    for j in 0..=6u32 {
        let width = 1usize << j;
        let coeffs: Vec<f64> =
            (0..width).map(|_| if next() & 1 == 0 { 1.0 } else { -1.0 }).collect();
        out.push((format!("pm1_w{width}"), LatticeMeasure::from_coeffs(0, &coeffs).unwrap()));
    }
    let mut two_bump = vec![0.0; 40];
    for slot in two_bump.iter_mut().take(8) {
        *slot = 1.0;
    }
    for slot in two_bump.iter_mut().skip(32) {
        *slot = -1.0;
    }
    out.push(("two_bump".to_string(), LatticeMeasure::from_coeffs(0, &two_bump).unwrap()));
    out
}

/// Runs the weak-type study for one difference order m over a batch.
pub fn weak_type_study(
    mu: &LatticeMeasure,
    m: u32,
    batch: &[(String, LatticeMeasure)],
    schedule: &[u64],
    opts: SweepOptions,
) -> Result<StudyTable> {
    if batch.is_empty() {
        return Err(Error::InvalidParameter("empty f batch".into()));
    }
    if schedule.is_empty() || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("schedule must be increasing".into()));
    }
    let n_max = *schedule.last().unwrap();
    let fs: Vec<&LatticeMeasure> = batch.iter().map(|(_, f)| f).collect();
    let f_norms: Vec<f64> = fs.iter().map(|f| f.l1_norm()).collect();
    let f_l2: Vec<f64> =
        fs.iter().map(|f| f.coeffs().iter().map(|c| c * c).sum::<f64>().sqrt()).collect();
    let mut constants = vec![Vec::with_capacity(schedule.len()); batch.len()];
    let mut l2_ratios = vec![Vec::with_capacity(schedule.len()); batch.len()];
    sweep_maximal(mu, m, &fs, n_max, schedule, opts, |_, fields| {
        for (i, acc) in fields.iter().enumerate() {
            let snapshot = MaximalField {
                offset: acc.lo,
                values: acc.values.clone(),
                horizon: 0,
                m,
                input_norm: f_norms[i],
                error_bound: 0.0,
            };
            let (c, _, _) = weak_type_constant(&snapshot);
            constants[i].push(c);
            l2_ratios[i].push(snapshot.l2_norm() / f_l2[i]);
        }
    })?;
    let mut slopes = Vec::with_capacity(batch.len());
    let mut verdicts = Vec::with_capacity(batch.len());
    for c in &constants {
        let pts: Vec<(f64, f64)> =
            schedule.iter().zip(c.iter()).map(|(&n, &v)| (n as f64, v)).collect();
        let slope =
            growth_exponent_fit_points(&pts, schedule[0] as f64, n_max as f64).ok();
        verdicts.push(match slope {
            Some(s) if s > BOUNDED_SLOPE => Verdict::Growing,
            Some(_) => Verdict::Bounded,
            None => Verdict::Bounded, // all-zero constants cannot grow
        });
        slopes.push(slope);
    }
    Ok(StudyTable {
        m,
        f_names: batch.iter().map(|(n, _)| n.clone()).collect(),
        ns: schedule.to_vec(),
        constants,
        l2_ratios,
        slopes,
        verdicts,
    })
}

/// Truncated square function s_N(f)(k) and the l1 ratio trend.
#[derive(Debug, Clone)]
pub struct SquareField {
    pub offset: i64,
    pub values: Vec<f64>,
    /// (N, |s_N(f)|_1 / |f|_1) at geometric checkpoints.
    pub ratio_trend: Vec<(u64, f64)>,
}

impl SquareField {
    pub fn at(&self, k: i64) -> f64 {
        let i = k - self.offset;
        if i < 0 || i >= self.values.len() as i64 {
            0.0
        } else {
            self.values[i as usize]
        }
    }
}

/// s_N(f)(k) = (sum_{n<=N} n ((mu^{*n} - mu^{*(n+1)}) * f(k))^2)^{1/2}.
///
/// Exploratory: only the ratio trend is reported, no verdict.
pub fn square_function(
    mu: &LatticeMeasure,
    f: &LatticeMeasure,
    n_horizon: u64,
    opts: SweepOptions,
) -> Result<SquareField> {
    let f_norm = validate_f(f)?;
    let kernel = difference_kernel(mu, 1)?;
    let mut lo = 0i64;
    let mut sq: Vec<f64> = Vec::new();
    let mut trend = Vec::new();
    let mut next_cp = 1u64;
    let mut sweep_err = Ok(());
    power_sweep(mu, n_horizon, opts, &mut |n, p| {
        if sweep_err.is_err() {
            return;
        }
        let diff = convolve_opts(&kernel, p, 0.0, None, ConvPath::Auto);
        let g = diff.and_then(|d| convolve_opts(&d, f, 0.0, None, ConvPath::Auto));
        let g = match g {
            Ok(g) => g,
            Err(e) => {
                sweep_err = Err(e);
                return;
            }
        };
        if !g.is_zero() {
            let glo = g.offset();
            let ghi = g.max_index();
            if sq.is_empty() {
                lo = glo;
                sq = vec![0.0; (ghi - glo + 1) as usize];
            } else {
                if glo < lo {
                    let mut grown = vec![0.0; (lo - glo) as usize];
                    grown.extend_from_slice(&sq);
                    sq = grown;
                    lo = glo;
                }
                let hi = lo + sq.len() as i64 - 1;
                if ghi > hi {
                    sq.resize(sq.len() + (ghi - hi) as usize, 0.0);
                }
            }
            for (i, &c) in g.coeffs().iter().enumerate() {
                sq[(glo - lo) as usize + i] += n as f64 * c * c;
            }
        }
        if n == next_cp || n == n_horizon {
            let l1: f64 = sq.iter().map(|v| v.sqrt()).sum();
            trend.push((n, l1 / f_norm));
            next_cp *= 2;
        }
    })?;
    sweep_err?;
    Ok(SquareField {
        offset: lo,
        values: sq.into_iter().map(|v| v.sqrt()).collect(),
        ratio_trend: trend,
    })
}

/// Empirical constant of the spatial regularity bound
/// |sigma_n(k+l) - sigma_n(l)| <= C k / l^2 over 0 < 2|k| <= |l|.
#[derive(Debug, Clone)]
pub struct BcReport {
    pub sup: f64,
    /// (n, k, l) attaining the supremum.
    pub argmax: (u64, i64, i64),
    /// Running supremum at power-of-two horizons.
    pub sup_by_n: Vec<(u64, f64)>,
}

/// Scans l^2 |sigma_n(k+l) - sigma_n(l)| / k over the admissible ranges,
/// both signs of l, for sigma_n = n^m (d0-mu)^{*m} * mu^{*n}.
pub fn bc_spatial_check(
    mu: &LatticeMeasure,
    m: u32,
    n_horizon: u64,
    k_max: i64,
    l_max: i64,
    opts: SweepOptions,
) -> Result<BcReport> {
    if k_max < 1 || l_max < 2 {
        return Err(Error::InvalidParameter("need k_max >= 1 and l_max >= 2".into()));
    }
    let kernel = difference_kernel(mu, m)?;
    let mut sup = 0.0f64;
    let mut argmax = (0u64, 0i64, 0i64);
    let mut sup_by_n = Vec::new();
    let mut next_cp = 1u64;
    let mut sweep_err = Ok(());
    power_sweep(mu, n_horizon, opts, &mut |n, p| {
        if sweep_err.is_err() {
            return;
        }
        let nm = (n as f64).powi(m as i32);
        let sig = if m == 0 {
            p.clone()
        } else {
            match convolve_opts(&kernel, p, 0.0, None, ConvPath::Auto) {
                Ok(s) => s,
                Err(e) => {
                    sweep_err = Err(e);
                    return;
                }
            }
        };
        for l_abs in 2..=l_max {
            for &l in &[l_abs, -l_abs] {
                let cap = (l_abs / 2).min(k_max);
                for k in 1..=cap {
                    let diff = nm * (sig.at(l + k) - sig.at(l)).abs();
                    let ratio = (l_abs * l_abs) as f64 * diff / k as f64;
                    if ratio > sup {
                        sup = ratio;
                        argmax = (n, k, l);
                    }
                }
            }
        }
        if n == next_cp || n == n_horizon {
            sup_by_n.push((n, sup));
            next_cp *= 2;
        }
    })?;
    sweep_err?;
    Ok(BcReport { sup, argmax, sup_by_n })
}
