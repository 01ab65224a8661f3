//! TOML analysis configuration and measure construction.

use serde::Deserialize;

use convpow::families::{
    build_ccm, build_cm, build_from_cm_function, build_scm, gamma_coeffs, gamma_representative,
    normalize_nu, BuiltMeasure, CmFunctionSpec, Family,
};
use convpow::lattice::{self, LatticeMeasure};
use convpow::spectral::ThetaGrid;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default)]
    pub measure: Option<MeasureSpec>,
    /// Combinator stack: `load` pushes a measure, `mixture`/`convolve`
    /// combine the top two, `reverse` flips the top.
    #[serde(default)]
    pub combinator: Vec<CombinatorStep>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub analyses: Vec<String>,
    #[serde(default)]
    pub check: CheckSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub kind: String,
    // family measures
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub nodes: Vec<(f64, f64)>,
    // explicit coefficients
    #[serde(default)]
    pub offset: i64,
    #[serde(default)]
    pub coeffs: Vec<f64>,
    // gamma family
    #[serde(default)]
    pub gamma: Option<f64>,
    // iterated-log family
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default = "default_n_max")]
    pub n_max: u64,
    #[serde(default = "default_trim")]
    pub trim: f64,
    /// Attach the density-discretized representative measure to the gamma
    /// family (enables the nu-side analyses).
    #[serde(default = "default_true")]
    pub attach_nu: bool,
}

fn default_n_max() -> u64 {
    4096
}

fn default_trim() -> f64 {
    1e-9
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombinatorStep {
    pub op: String,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(flatten)]
    pub measure: Option<MeasureSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub theta_min: f64,
    pub ratio_log2: f64,
    pub uniform: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { theta_min: 1e-8, ratio_log2: 0.125, uniform: 2048 }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<ThetaGrid, String> {
        ThetaGrid::new(self.theta_min, self.ratio_log2, self.uniform).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub n_max: u64,
    pub m: Vec<u32>,
    pub trim: f64,
    pub max_window: Option<usize>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec { n_max: 2000, m: vec![1], trim: 1e-12, max_window: None }
    }
}

impl SweepSpec {
    pub fn options(&self) -> lattice::SweepOptions {
        lattice::SweepOptions {
            trim_eps: self.trim,
            max_window: self.max_window,
            path: lattice::ConvPath::Auto,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckSpec {
    /// n range for the discrete inequality checks.
    pub n_max: u64,
    /// x grid depth (x = 1 - 2^-j, j <= j_max) for the integral checks.
    pub j_max: u32,
    /// psi gauge: "family" (needs nu) or "quadratic".
    pub psi: String,
    /// Weak-type horizon exponent: N schedule 2^5..2^horizon_log2.
    pub horizon_log2: u32,
}

impl Default for CheckSpec {
    fn default() -> Self {
        CheckSpec { n_max: 100_000, j_max: 17, psi: "auto".into(), horizon_log2: 12 }
    }
}

pub fn parse_family(name: &str) -> Result<Family, String> {
    match name {
        "cm" => Ok(Family::Cm),
        "ccm" => Ok(Family::Ccm),
        "scm" => Ok(Family::Scm),
        other => Err(format!("unknown family '{other}' (expected cm|ccm|scm)")),
    }
}

pub fn build_measure_spec(spec: &MeasureSpec) -> Result<BuiltMeasure, String> {
    match spec.kind.as_str() {
        "family" => {
            let family = parse_family(
                spec.family.as_deref().ok_or("family measure needs `family`")?,
            )?;
            if spec.nodes.is_empty() {
                return Err("family measure needs `nodes`".into());
            }
            let nu = normalize_nu(&spec.nodes, family).map_err(|e| e.to_string())?;
            match family {
                Family::Cm => build_cm(&nu, spec.n_max, spec.trim),
                Family::Ccm => build_ccm(&nu, spec.n_max, spec.trim),
                Family::Scm => build_scm(&nu, spec.n_max, spec.trim),
            }
            .map_err(|e| e.to_string())
        }
        "coeffs" => {
            let m = LatticeMeasure::from_coeffs(spec.offset, &spec.coeffs)
                .map_err(|e| e.to_string())?;
            Ok(BuiltMeasure::from_lattice(m))
        }
        "gamma" => {
            let gamma = spec.gamma.ok_or("gamma measure needs `gamma`")?;
            let mut built = gamma_coeffs(gamma, spec.n_max).map_err(|e| e.to_string())?;
            if spec.attach_nu {
                built.nu = Some(gamma_representative(gamma, 34, 16).map_err(|e| e.to_string())?);
            }
            Ok(built)
        }
        "iterlog" => {
            let alpha = spec.alpha.ok_or("iterlog measure needs `alpha`")?;
            let f = CmFunctionSpec::new(alpha, spec.alphas.clone()).map_err(|e| e.to_string())?;
            build_from_cm_function(&f, spec.n_max, spec.trim).map_err(|e| e.to_string())
        }
        other => Err(format!(
            "unknown measure kind '{other}' (expected family|coeffs|gamma|iterlog)"
        )),
    }
}

/// Evaluates the combinator stack; ends with exactly one measure.
pub fn build_combinator(steps: &[CombinatorStep]) -> Result<BuiltMeasure, String> {
    let mut stack: Vec<BuiltMeasure> = Vec::new();
    for (i, step) in steps.iter().enumerate() {
        match step.op.as_str() {
            "load" => {
                let spec = step
                    .measure
                    .as_ref()
                    .ok_or_else(|| format!("combinator step {i}: load needs a measure spec"))?;
                stack.push(build_measure_spec(spec)?);
            }
            "reverse" => {
                let top =
                    stack.pop().ok_or_else(|| format!("combinator step {i}: empty stack"))?;
                stack.push(BuiltMeasure::from_lattice(top.measure.reverse()));
            }
            "mixture" => {
                let alpha = step
                    .alpha
                    .ok_or_else(|| format!("combinator step {i}: mixture needs alpha"))?;
                let b = stack.pop().ok_or_else(|| format!("combinator step {i}: need 2"))?;
                let a = stack.pop().ok_or_else(|| format!("combinator step {i}: need 2"))?;
                let m = lattice::mixture(alpha, &a.measure, &b.measure)
                    .map_err(|e| e.to_string())?;
                stack.push(BuiltMeasure::from_lattice(m));
            }
            "convolve" => {
                let b = stack.pop().ok_or_else(|| format!("combinator step {i}: need 2"))?;
                let a = stack.pop().ok_or_else(|| format!("combinator step {i}: need 2"))?;
                let m = lattice::convolve(&a.measure, &b.measure, 0.0)
                    .map_err(|e| e.to_string())?;
                stack.push(BuiltMeasure::from_lattice(m));
            }
            other => {
                return Err(format!(
                    "combinator step {i}: unknown op '{other}' (load|reverse|mixture|convolve)"
                ))
            }
        }
    }
    match stack.len() {
        1 => Ok(stack.pop().unwrap()),
        n => Err(format!("combinator stack ends with {n} measures (need exactly 1)")),
    }
}

pub fn build_from_config(cfg: &AnalysisConfig) -> Result<BuiltMeasure, String> {
    match (&cfg.measure, cfg.combinator.is_empty()) {
        (Some(spec), true) => build_measure_spec(spec),
        (None, false) => build_combinator(&cfg.combinator),
        (Some(_), false) => Err("give either [measure] or [[combinator]], not both".into()),
        (None, true) => Err("config needs a [measure] or a [[combinator]] list".into()),
    }
}
