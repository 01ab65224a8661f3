//! Measure families built from representative measures on [0,1) or from
//! completely monotone functions.
//!
//! A representative measure nu is a finite list of atoms (t_i, w_i). The
//! three families differ in support and normalization:
//!
//! * CM:  supported on N,        sum w_i/(1-t_i)   = 1,   mu(n) = sum w_i t_i^n;
//! * CCM: supported on {-1} u N, sum w_i/(1-t_i)^2 = 1,   mu(-1) = sum w_i t_i/(1-t_i)^2 (centered);
//! * SCM: symmetric,             sum w_i/(1-t_i)   = 1/2, mu(0) = 2 sum w_i.
//!
//! Densities must be pre-discretized ([`discretize_density`] refines
//! geometrically toward both endpoints). Measures defined through a
//! completely monotone function (iterated-log family, `1-(1-t)^gamma`
//! coefficients) carry no nu; for them only coefficient-side tail models
//! are available.

use crate::error::Error;
use crate::lattice::LatticeMeasure;
use crate::Result;

/// Family tag of a representative measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Cm,
    Ccm,
    Scm,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Cm => "cm",
            Family::Ccm => "ccm",
            Family::Scm => "scm",
        }
    }

    /// Normalization target for sum of w_i * g(t_i).
    fn target(self) -> f64 {
        match self {
            Family::Cm | Family::Ccm => 1.0,
            Family::Scm => 0.5,
        }
    }

    fn weight_factor(self, t: f64) -> f64 {
        match self {
            Family::Cm | Family::Scm => 1.0 / (1.0 - t),
            Family::Ccm => 1.0 / ((1.0 - t) * (1.0 - t)),
        }
    }
}

/// Atomic representative measure nu with a family tag.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentativeMeasure {
    nodes: Vec<(f64, f64)>,
    family: Family,
}

impl RepresentativeMeasure {
    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// |sum w_i g(t_i) - target| of the family normalization.
    pub fn normalization_residual(&self) -> f64 {
        let s: f64 = self.nodes.iter().map(|&(t, w)| w * self.family.weight_factor(t)).sum();
        (s - self.family.target()).abs()
    }

    pub(crate) fn expect_family(&self, family: Family) -> Result<()> {
        if self.family != family {
            return Err(Error::FamilyMismatch {
                expected: family.name(),
                got: self.family.name(),
            });
        }
        Ok(())
    }

    /// Closed-form tail sum_{k>=n} mu(k) over the N-side coefficients.
    pub fn tail_mass(&self, n: u64) -> f64 {
        self.nodes.iter().map(|&(t, w)| w * powi_u(t, n) / (1.0 - t)).sum()
    }

    /// Closed-form tail sum_{k>=n} k mu(k).
    pub fn tail_first(&self, n: u64) -> f64 {
        self.nodes
            .iter()
            .map(|&(t, w)| {
                let q = 1.0 - t;
                w * powi_u(t, n) * (n as f64 * q + t) / (q * q)
            })
            .sum()
    }

    /// Closed-form tail sum_{k>=n} k^2 mu(k).
    pub fn tail_second(&self, n: u64) -> f64 {
        self.nodes
            .iter()
            .map(|&(t, w)| {
                let q = 1.0 - t;
                let nf = n as f64;
                let inner = nf * (nf * q + t) * q + t * (1.0 - nf) * q + 2.0 * t * (nf * q + t);
                w * powi_u(t, n) * inner / (q * q * q)
            })
            .sum()
    }
}

fn powi_u(t: f64, n: u64) -> f64 {
    if n <= i32::MAX as u64 {
        t.powi(n as i32)
    } else {
        t.powf(n as f64)
    }
}

/// Rescales raw atoms by the unique positive constant enforcing the
/// family normalization. Duplicate t values are merged.
pub fn normalize_nu(raw: &[(f64, f64)], family: Family) -> Result<RepresentativeMeasure> {
    if raw.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    for &(t, w) in raw {
        if !t.is_finite() || !w.is_finite() {
            return Err(Error::NonFinite("representative nodes"));
        }
        if t >= 1.0 {
            return Err(Error::AtomAtOne);
        }
        if t < 0.0 {
            return Err(Error::InvalidParameter(format!("node t = {t} < 0")));
        }
        if w < 0.0 {
            return Err(Error::InvalidParameter(format!("node weight {w} < 0")));
        }
    }
    let mut nodes: Vec<(f64, f64)> = raw.iter().copied().filter(|&(_, w)| w > 0.0).collect();
    if nodes.is_empty() {
        return Err(Error::ZeroWeight);
    }
    nodes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(nodes.len());
    for (t, w) in nodes {
        match merged.last_mut() {
            Some(last) if last.0 == t => last.1 += w,
            _ => merged.push((t, w)),
        }
    }
    let s: f64 = merged.iter().map(|&(t, w)| w * family.weight_factor(t)).sum();
    if s <= 0.0 || !s.is_finite() {
        return Err(Error::ZeroWeight);
    }
    let scale = family.target() / s;
    for node in merged.iter_mut() {
        node.1 *= scale;
    }
    Ok(RepresentativeMeasure { nodes: merged, family })
}

/// Moment sequence m[n] = sum w_i t_i^n for n = 0..=n_max, by per-node
/// geometric recursion.
pub fn moments_from_nu(nu: &RepresentativeMeasure, n_max: u64) -> Vec<f64> {
    let mut out = vec![0.0; n_max as usize + 1];
    for &(t, w) in nu.nodes() {
        let mut pow = w;
        for slot in out.iter_mut() {
            *slot += pow;
            pow *= t;
        }
    }
    out
}

/// Coefficient-side tail model attached to a built measure.
#[derive(Debug, Clone)]
pub enum TailModel {
    /// Only the stored window is known; tail sums carry the tail bound as slack.
    WindowOnly,
    /// Closed-form geometric tails through the attached nu.
    Nodes,
    /// Exact tail recurrence for the `1-(1-t)^gamma` coefficient family.
    Gamma { gamma: f64 },
    /// Integral-comparison remainder for an iterated-log function family.
    CmFunction { spec: CmFunctionSpec, scale: f64 },
}

/// A lattice measure together with how it was built.
#[derive(Debug, Clone)]
pub struct BuiltMeasure {
    pub measure: LatticeMeasure,
    pub nu: Option<RepresentativeMeasure>,
    pub tail: TailModel,
}

impl BuiltMeasure {
    /// Wraps a plain measure with no analytic tail information.
    pub fn from_lattice(measure: LatticeMeasure) -> Self {
        BuiltMeasure { measure, nu: None, tail: TailModel::WindowOnly }
    }

    /// Analytic sum_{k>=n} mu(k) over the N side, when a model is attached.
    pub fn analytic_tail_mass(&self, n: u64) -> Option<f64> {
        match &self.tail {
            TailModel::WindowOnly => None,
            TailModel::Nodes => self.nu.as_ref().map(|nu| nu.tail_mass(n)),
            TailModel::Gamma { gamma } => Some(gamma_tail(*gamma, n)),
            TailModel::CmFunction { spec, scale } => {
                let end = self.measure.max_index();
                if (n as i64) <= end {
                    let mut s = 0.0;
                    for k in (n as i64)..=end {
                        s += self.measure.at(k);
                    }
                    Some(s + scale * spec.tail_sum_estimate(end as u64 + 1))
                } else {
                    Some(scale * spec.tail_sum_estimate(n))
                }
            }
        }
    }

    /// Analytic sum_{k>=n} k mu(k), when available.
    pub fn analytic_tail_first(&self, n: u64) -> Option<f64> {
        match &self.tail {
            TailModel::Nodes => self.nu.as_ref().map(|nu| nu.tail_first(n)),
            _ => None,
        }
    }

    /// Analytic sum_{k>=n} k^2 mu(k), when available.
    pub fn analytic_tail_second(&self, n: u64) -> Option<f64> {
        match &self.tail {
            TailModel::Nodes => self.nu.as_ref().map(|nu| nu.tail_second(n)),
            _ => None,
        }
    }
}

/// Exact sum_{j>n} a_j(gamma) = prod_{j=1..n} (j - gamma)/j.
pub fn gamma_tail(gamma: f64, n: u64) -> f64 {
    let mut b = 1.0;
    for j in 1..=n {
        b *= (j as f64 - gamma) / j as f64;
    }
    b
}

fn required_n_for(tail_at: impl Fn(u64) -> f64, trim: f64, start: u64) -> u64 {
    let mut n = start.max(2);
    while tail_at(n) > trim && n < (1u64 << 42) {
        n *= 2;
    }
    n
}

/// Builds the CM probability measure of nu on a window [0, n_max].
///
/// The discarded tail sum_{n>n_max} mu(n) is computed in closed form per
/// node and must not exceed `trim`.
pub fn build_cm(nu: &RepresentativeMeasure, n_max: u64, trim: f64) -> Result<BuiltMeasure> {
    nu.expect_family(Family::Cm)?;
    let tail = nu.tail_mass(n_max + 1);
    if tail > trim {
        return Err(Error::TailTargetUnreachable {
            requested: trim,
            achievable: tail,
            required_n: required_n_for(|n| nu.tail_mass(n + 1), trim, n_max),
        });
    }
    let coeffs = moments_from_nu(nu, n_max);
    let measure = LatticeMeasure::from_parts(0, coeffs, tail);
    Ok(BuiltMeasure { measure, nu: Some(nu.clone()), tail: TailModel::Nodes })
}

/// Builds the centered CCM probability measure of nu: mu(-1) plus the
/// moment sequence on [0, n_max].
pub fn build_ccm(nu: &RepresentativeMeasure, n_max: u64, trim: f64) -> Result<BuiltMeasure> {
    nu.expect_family(Family::Ccm)?;
    let tail = nu.tail_mass(n_max + 1);
    if tail > trim {
        return Err(Error::TailTargetUnreachable {
            requested: trim,
            achievable: tail,
            required_n: required_n_for(|n| nu.tail_mass(n + 1), trim, n_max),
        });
    }
    let minus_one: f64 =
        nu.nodes().iter().map(|&(t, w)| w * t / ((1.0 - t) * (1.0 - t))).sum();
    let mut coeffs = Vec::with_capacity(n_max as usize + 2);
    coeffs.push(minus_one);
    coeffs.extend(moments_from_nu(nu, n_max));
    let measure = LatticeMeasure::from_parts(-1, coeffs, tail);
    Ok(BuiltMeasure { measure, nu: Some(nu.clone()), tail: TailModel::Nodes })
}

/// Builds the symmetric SCM probability measure of nu on [-n_max, n_max].
pub fn build_scm(nu: &RepresentativeMeasure, n_max: u64, trim: f64) -> Result<BuiltMeasure> {
    nu.expect_family(Family::Scm)?;
    let tail = 2.0 * nu.tail_mass(n_max + 1);
    if tail > trim {
        return Err(Error::TailTargetUnreachable {
            requested: trim,
            achievable: tail,
            required_n: required_n_for(|n| 2.0 * nu.tail_mass(n + 1), trim, n_max),
        });
    }
    let side = moments_from_nu(nu, n_max);
    let w = n_max as usize;
    let mut coeffs = vec![0.0; 2 * w + 1];
    coeffs[w] = 2.0 * side[0];
    for n in 1..=w {
        coeffs[w + n] = side[n];
        coeffs[w - n] = side[n];
    }
    let measure = LatticeMeasure::from_parts(-(n_max as i64), coeffs, tail);
    Ok(BuiltMeasure { measure, nu: Some(nu.clone()), tail: TailModel::Nodes })
}

/// Power series coefficients a_1..a_count of 1 - (1-t)^gamma.
///
/// a_1 = gamma, a_{n+1} = a_n (n - gamma)/(n + 1); all nonnegative with
/// partial sums <= 1.
pub fn gamma_series(gamma: f64, count: u64) -> Result<Vec<f64>> {
    if !(0.0 < gamma && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} outside (0,1)")));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut a = gamma;
    for n in 1..=count {
        out.push(a);
        a *= (n as f64 - gamma) / (n as f64 + 1.0);
    }
    Ok(out)
}

/// The probability measure mu(n) = a_{n+1}(gamma), stored for n < n_max,
/// with the exact tail recurrence attached.
pub fn gamma_coeffs(gamma: f64, n_max: u64) -> Result<BuiltMeasure> {
    let coeffs = gamma_series(gamma, n_max)?;
    let tail = gamma_tail(gamma, n_max);
    let measure = LatticeMeasure::from_parts(0, coeffs, tail);
    Ok(BuiltMeasure { measure, nu: None, tail: TailModel::Gamma { gamma } })
}

/// Exponents of an iterated-log completely monotone function
/// f(x) = x^-alpha L_1(x)^-alpha_1 ... L_k(x)^-alpha_k.
#[derive(Debug, Clone, PartialEq)]
pub struct CmFunctionSpec {
    pub alpha: f64,
    pub alphas: Vec<f64>,
}

impl CmFunctionSpec {
    pub fn new(alpha: f64, alphas: Vec<f64>) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 || alphas.iter().any(|a| !a.is_finite() || *a < 0.0)
        {
            return Err(Error::InvalidParameter("iterated-log exponents must be >= 0".into()));
        }
        Ok(CmFunctionSpec { alpha, alphas })
    }

    /// True iff sum_n f(n+1) converges: the first exponent differing from 1
    /// must exceed 1 (Bertrand series criterion).
    pub fn is_summable(&self) -> bool {
        let mut exps = vec![self.alpha];
        exps.extend_from_slice(&self.alphas);
        for &e in &exps {
            if e > 1.0 {
                return true;
            }
            if e < 1.0 {
                return false;
            }
        }
        false // all exponents exactly 1 diverges
    }

    /// Integral-comparison upper bound on sum_{n>N} f(n+1).
    pub fn tail_sum_bound(&self, n: u64) -> f64 {
        tail_integral(self, n as f64)
    }

    /// Midpoint estimate of sum_{k>=n} f(k+1) (much tighter than the bound).
    pub fn tail_sum_estimate(&self, n: u64) -> f64 {
        tail_integral(self, n as f64 - 0.5)
    }
}

/// Iterated logarithms: L_1(x) = log(1+x), L_{k+1}(x) = L_1(L_k(x)).
pub fn iterated_log(k: usize, x: f64) -> f64 {
    let mut v = (1.0 + x).ln();
    for _ in 1..k {
        v = (1.0 + v).ln();
    }
    v
}

/// Evaluates f(x) = x^-alpha prod_i L_i(x)^-alpha_i for x > 0.
pub fn iterlog_f(spec: &CmFunctionSpec, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::InvalidParameter(format!("iterlog_f needs x > 0, got {x}")));
    }
    let mut v = x.powf(-spec.alpha);
    let mut l = x;
    for &a in &spec.alphas {
        l = (1.0 + l).ln();
        if a != 0.0 {
            v *= l.powf(-a);
        }
    }
    Ok(v)
}

/// integral_{lower}^inf f(1+x) dx through the substitution x = lower/s^p,
/// which regularizes the power decay; composite Simpson on dyadic panels.
fn tail_integral(spec: &CmFunctionSpec, lower: f64) -> f64 {
    const P: f64 = 6.0;
    let lower = lower.max(1.0);
    let g = |s: f64| -> f64 {
        // p * lower * f(1 + lower * s^-p) * s^(-p-1)
        let x = lower * s.powf(-P);
        P * lower * iterlog_f(spec, 1.0 + x).unwrap() * s.powf(-P - 1.0)
    };
    let mut total = 0.0;
    // panels [2^-(j+1), 2^-j]; integrand decays to 0 toward s = 0 since
    // the series is summable (p(alpha-1) > 1 effectively)
    for j in 0..48 {
        let hi = (0.5f64).powi(j);
        let lo = hi / 2.0;
        total += simpson(&g, lo, hi, 256);
        if g(lo) * (hi - lo) < 1e-18 * total.max(1e-300) {
            break;
        }
    }
    total
}

fn simpson(g: &impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals.max(2) & !1usize;
    let h = (b - a) / n as f64;
    let mut s = g(a) + g(b);
    for i in 1..n {
        let x = a + h * i as f64;
        s += g(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Builds mu(n) = c f(n+1) on [0, n_max], c normalizing the window to mass 1.
///
/// The recorded tail bound is the integral-comparison bound on the
/// discarded c * sum_{n>n_max} f(n+1) and must not exceed `trim`.
pub fn build_from_cm_function(
    spec: &CmFunctionSpec,
    n_max: u64,
    trim: f64,
) -> Result<BuiltMeasure> {
    if !spec.is_summable() {
        return Err(Error::NotNormalizable(format!(
            "exponent pattern alpha={}, alphas={:?}",
            spec.alpha, spec.alphas
        )));
    }
    let mut coeffs = Vec::with_capacity(n_max as usize + 1);
    let mut sum = 0.0;
    for n in 0..=n_max {
        let v = iterlog_f(spec, n as f64 + 1.0)?;
        coeffs.push(v);
        sum += v;
    }
    let raw_tail = spec.tail_sum_bound(n_max);
    let scale = 1.0 / sum;
    let tail = raw_tail * scale;
    if tail > trim {
        return Err(Error::TailTargetUnreachable {
            requested: trim,
            achievable: tail,
            required_n: required_n_for(|n| spec.tail_sum_bound(n) * scale, trim, n_max),
        });
    }
    for c in coeffs.iter_mut() {
        *c *= scale;
    }
    let measure = LatticeMeasure::from_parts(0, coeffs, tail);
    Ok(BuiltMeasure {
        measure,
        nu: None,
        tail: TailModel::CmFunction { spec: spec.clone(), scale },
    })
}

/// Representative measure of the power-series family: the density
/// (sin(pi gamma)/pi) t^-gamma (1-t)^gamma discretized and CM-normalized.
///
/// Its moments reproduce the [`gamma_series`] coefficients to the
/// discretizer's accuracy (second order in 1/per_cell).
pub fn gamma_representative(
    gamma: f64,
    j_max: u32,
    per_cell: usize,
) -> Result<RepresentativeMeasure> {
    if !(0.0 < gamma && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} outside (0,1)")));
    }
    let scale = (std::f64::consts::PI * gamma).sin() / std::f64::consts::PI;
    let density = move |t: f64| scale * t.powf(-gamma) * (1.0 - t).powf(gamma);
    let atoms = discretize_density(&density, j_max, per_cell);
    normalize_nu(&atoms, Family::Cm)
}

/// Discretizes a density on (0,1) into atoms with geometric cell refinement
/// toward both endpoints (cells bounded by 2^-i and 1-2^-j), `per_cell`
/// equal subcells each; atom weight is the subcell integral, atom location
/// its centroid. The result still needs [`normalize_nu`].
pub fn discretize_density(
    density: &dyn Fn(f64) -> f64,
    j_max: u32,
    per_cell: usize,
) -> Vec<(f64, f64)> {
    let mut edges: Vec<f64> = Vec::new();
    for i in (1..=j_max).rev() {
        edges.push((0.5f64).powi(i as i32 + 1));
    }
    for j in 1..=j_max {
        edges.push(1.0 - (0.5f64).powi(j as i32));
    }
    edges.dedup();
    let mut atoms = Vec::new();
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let step = (hi - lo) / per_cell as f64;
        for s in 0..per_cell {
            let a = lo + step * s as f64;
            let b = a + step;
            let mass = simpson(&|t| density(t), a, b, 32);
            if mass <= 0.0 {
                continue;
            }
            let first = simpson(&|t| t * density(t), a, b, 32);
            let centroid = (first / mass).clamp(a, b);
            atoms.push((centroid, mass));
        }
    }
    atoms
}
