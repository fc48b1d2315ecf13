//! Heat-leak time series: relaxation fits, residual limits and bootstrap.
//!
//! A cryostat heat leak is modelled as `q(t) = Σ A_k t^(-α_k) + Q0`. The
//! power-law terms describe slow relaxation (ortho-para conversion and
//! similar); `Q0` is the time-independent part that a heating model would
//! contribute to. With fixed exponents the fit is a weighted linear least
//! squares problem; a single exponent may be left free, in which case it is
//! found by a scan plus golden-section refinement of the profiled chi².

use std::fmt;
use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::models::{HeatingModel, LengthBound};
use crate::quantities::{format_auto, parse_quantity, Dimension, Material, Quantity};

/// Normal matrices with a condition estimate above this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Search interval for a free relaxation exponent.
pub const FREE_EXPONENT_RANGE: (f64, f64) = (0.1, 2.0);

/// Relative sigma assigned to noiseless synthetic samples.
pub const SIGMA_FLOOR_REL: f64 = 1e-6;
/// Absolute sigma floor (W) for synthetic samples whose model value is zero.
pub const SIGMA_FLOOR_ABS: f64 = 1e-30;

/// Exponent of the dominant heat-leak relaxation, `q ~ t^(-3/4)`.
pub const HEAT_LEAK_EXPONENT: f64 = 0.75;
/// Exponent of the stage temperature relaxation, `T ~ t^(-3/8)`.
pub const TEMPERATURE_EXPONENT: f64 = 0.375;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    /// Seconds since the start of the cooldown.
    pub t: f64,
    /// Heat leak, W.
    pub q: f64,
    /// One-sigma uncertainty of `q`, W.
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatLeakSeries {
    samples: Vec<Sample>,
    stage_mass: Quantity,
    stage_moles: Option<Quantity>,
    label: String,
}

impl HeatLeakSeries {
    pub fn new(
        samples: Vec<Sample>,
        stage_mass: Quantity,
        stage_moles: Option<Quantity>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let stage_mass = stage_mass.expect(Dimension::MASS)?;
        if stage_mass.value() <= 0.0 {
            return Err(Error::Input(format!(
                "stage mass must be positive, got {stage_mass}"
            )));
        }
        if let Some(moles) = stage_moles {
            if moles.expect(Dimension::AMOUNT)?.value() <= 0.0 {
                return Err(Error::Input("stage moles must be positive".into()));
            }
        }
        for (i, s) in samples.iter().enumerate() {
            if !(s.t.is_finite() && s.t > 0.0) {
                return Err(Error::Input(format!(
                    "sample {i}: time must be positive, got {}",
                    s.t
                )));
            }
            if !s.q.is_finite() {
                return Err(Error::Input(format!("sample {i}: heat leak is not finite")));
            }
            if !(s.sigma.is_finite() && s.sigma > 0.0) {
                return Err(Error::Input(format!(
                    "sample {i}: sigma must be positive, got {}",
                    s.sigma
                )));
            }
            if i > 0 && s.t <= samples[i - 1].t {
                return Err(Error::Input(format!(
                    "sample {i}: times must be strictly increasing"
                )));
            }
        }
        Ok(Self {
            samples,
            stage_mass,
            stage_moles,
            label: label.into(),
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn stage_mass(&self) -> Quantity {
        self.stage_mass
    }

    pub fn stage_moles(&self) -> Option<Quantity> {
        self.stage_moles
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_stage(mut self, mass: Quantity, moles: Option<Quantity>) -> Result<Self> {
        let samples = std::mem::take(&mut self.samples);
        Self::new(samples, mass, moles, self.label)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    fn with_values(&self, q: impl Iterator<Item = f64>) -> Self {
        let samples = self
            .samples
            .iter()
            .zip(q)
            .map(|(s, q)| Sample { q, ..*s })
            .collect();
        Self {
            samples,
            ..self.clone()
        }
    }

    /// Parses the comma-separated series format.
    ///
    /// ```text
    /// # label = copper stage
    /// # mass_kg = 17
    /// # moles = 267.5
    /// t_seconds,q_watts,sigma_watts
    /// 1e5,2.0e-9,1.0e-10
    /// ```
    ///
    /// `mass_kg` is required, `moles` and `label` are optional, the column
    /// header line is optional. Other `#` lines are ignored.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut mass = None;
        let mut moles = None;
        let mut label = String::new();
        let mut samples = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = lineno + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((key, value)) = comment.split_once('=') {
                    let value = value.trim();
                    let number = || {
                        value.parse::<f64>().map_err(|_| {
                            Error::parse(value, format!("line {lineno}: expected a number"))
                        })
                    };
                    match key.trim() {
                        "mass_kg" => mass = Some(Quantity::kilograms(number()?)?),
                        "moles" => moles = Some(Quantity::moles(number()?)?),
                        "label" => label = value.to_string(),
                        _ => {}
                    }
                }
                continue;
            }
            if samples.is_empty() && line.replace(' ', "") == "t_seconds,q_watts,sigma_watts" {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() < 3 {
                return Err(Error::Input(format!(
                    "line {lineno}: expected 3 columns t_seconds,q_watts,sigma_watts (missing sigma column?)"
                )));
            }
            if cols.len() > 3 {
                return Err(Error::Input(format!("line {lineno}: too many columns")));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::parse(s, format!("line {lineno}: malformed number")))
            };
            samples.push(Sample {
                t: parse(cols[0])?,
                q: parse(cols[1])?,
                sigma: parse(cols[2])?,
            });
        }
        let mass = mass.ok_or_else(|| Error::Input("missing `# mass_kg = ...` header".into()))?;
        Self::new(samples, mass, moles, label)
    }

    /// Writes the series in the format read by [`HeatLeakSeries::from_csv_str`].
    ///
    /// Numbers use the shortest representation that round-trips exactly.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        if !self.label.is_empty() {
            out.push_str(&format!("# label = {}\n", self.label));
        }
        out.push_str(&format!("# mass_kg = {}\n", self.stage_mass.value()));
        if let Some(m) = self.stage_moles {
            out.push_str(&format!("# moles = {}\n", m.value()));
        }
        out.push_str("t_seconds,q_watts,sigma_watts\n");
        for s in &self.samples {
            out.push_str(&format!("{:e},{:e},{:e}\n", s.t, s.q, s.sigma));
        }
        out
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_csv_str(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv_string())
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

/// Which relaxation terms to fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelaxationSpec {
    /// Power-law exponents `α_k` of the `t^(-α_k)` terms. With a free
    /// exponent this holds the single starting value, which is ignored.
    pub exponents: Vec<f64>,
    pub include_constant: bool,
    pub free_exponent: bool,
}

impl Default for RelaxationSpec {
    fn default() -> Self {
        Self {
            exponents: vec![HEAT_LEAK_EXPONENT],
            include_constant: true,
            free_exponent: false,
        }
    }
}

impl RelaxationSpec {
    pub fn fixed(exponents: Vec<f64>) -> Self {
        Self {
            exponents,
            ..Self::default()
        }
    }

    pub fn free() -> Self {
        Self {
            free_exponent: true,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, a) in self.exponents.iter().enumerate() {
            if !(a.is_finite() && *a > 0.0) {
                return Err(Error::Input(format!("exponent {a} must be positive")));
            }
            if self.exponents[..i].contains(a) {
                return Err(Error::Input(format!("duplicate exponent {a}")));
            }
        }
        if self.free_exponent && self.exponents.len() != 1 {
            return Err(Error::Input(
                "free-exponent mode supports exactly one relaxation term".into(),
            ));
        }
        if self.n_parameters() == 0 {
            return Err(Error::Input("nothing to fit".into()));
        }
        Ok(())
    }

    pub fn n_parameters(&self) -> usize {
        self.exponents.len() + usize::from(self.include_constant) + usize::from(self.free_exponent)
    }
}

/// Result of a relaxation fit.
///
/// Covariance rows/columns are ordered: amplitudes, then the constant (if
/// fitted), then the exponent (if free).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub exponents: Vec<f64>,
    /// W·s^α per term.
    pub amplitudes: Vec<f64>,
    /// Time-independent term, W. Zero when the `RelaxationSpec` has no constant.
    pub constant: f64,
    pub include_constant: bool,
    pub covariance: Vec<Vec<f64>>,
    pub chi2: f64,
    pub dof: usize,
    pub fitted_exponent: Option<f64>,
}

impl FitResult {
    pub fn n_parameters(&self) -> usize {
        self.covariance.len()
    }

    fn variance(&self, idx: usize) -> f64 {
        self.covariance[idx][idx].max(0.0)
    }

    pub fn amplitude_sd(&self, k: usize) -> f64 {
        self.variance(k).sqrt()
    }

    /// Standard error of the constant term, W (0 when not fitted).
    pub fn constant_sd(&self) -> f64 {
        if self.include_constant {
            self.variance(self.amplitudes.len()).sqrt()
        } else {
            0.0
        }
    }

    pub fn exponent_sd(&self) -> Option<f64> {
        self.fitted_exponent
            .map(|_| self.variance(self.n_parameters() - 1).sqrt())
    }

    pub fn constant_power(&self) -> Quantity {
        Quantity::watts(self.constant).expect("fitted constant is finite")
    }

    /// Fitted model value at time `t`.
    pub fn predict(&self, t: f64) -> f64 {
        model_value(&self.exponents, &self.amplitudes, self.constant, t)
    }

    pub fn reduced_chi2(&self) -> f64 {
        self.chi2 / self.dof as f64
    }
}

fn model_value(exponents: &[f64], amplitudes: &[f64], constant: f64, t: f64) -> f64 {
    exponents
        .iter()
        .zip(amplitudes)
        .map(|(a, amp)| amp * t.powf(-a))
        .sum::<f64>()
        + constant
}

struct LinearSolution {
    params: Vec<f64>,
    covariance: DMatrix<f64>,
    chi2: f64,
}

/// Weighted least squares for `y ≈ X β` via column-equilibrated normal equations.
fn weighted_least_squares(
    design: &DMatrix<f64>,
    y: &[f64],
    sigma: &[f64],
) -> Result<LinearSolution> {
    let (n, p) = design.shape();
    let mut z = design.clone();
    let mut wy = DVector::zeros(n);
    for i in 0..n {
        let w = 1.0 / sigma[i];
        z.row_mut(i).scale_mut(w);
        wy[i] = y[i] * w;
    }
    let norms: Vec<f64> = (0..p).map(|j| z.column(j).norm()).collect();
    for (j, c) in norms.iter().enumerate() {
        if !(c.is_finite() && *c > 0.0) {
            return Err(Error::Singular(format!("basis column {j} vanishes")));
        }
        z.column_mut(j).unscale_mut(*c);
    }
    let normal = z.transpose() * &z;
    let eig = SymmetricEigen::new(normal.clone());
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    // also catches NaN eigenvalues
    if min.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || max / min > MAX_CONDITION {
        return Err(Error::Singular(format!(
            "normal matrix condition estimate {:.3e} exceeds {MAX_CONDITION:e}",
            max / min
        )));
    }
    let inv = normal
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("normal matrix is not positive definite".into()))?
        .inverse();
    let rhs = z.transpose() * &wy;
    let mut beta_scaled = &inv * &rhs;
    // one round of iterative refinement on the normal equations
    let correction = &inv * (&rhs - &normal * &beta_scaled);
    beta_scaled += correction;

    let params: Vec<f64> = (0..p).map(|j| beta_scaled[j] / norms[j]).collect();
    let mut covariance = inv;
    for i in 0..p {
        for j in 0..p {
            covariance[(i, j)] /= norms[i] * norms[j];
        }
    }
    let fitted = design * DVector::from_column_slice(&params);
    let chi2 = (0..n)
        .map(|i| ((y[i] - fitted[i]) / sigma[i]).powi(2))
        .sum();
    Ok(LinearSolution {
        params,
        covariance,
        chi2,
    })
}

fn linear_design(
    series: &HeatLeakSeries,
    exponents: &[f64],
    include_constant: bool,
) -> DMatrix<f64> {
    let p = exponents.len() + usize::from(include_constant);
    DMatrix::from_fn(series.len(), p, |i, j| {
        let t = series.samples[i].t;
        if j < exponents.len() {
            t.powf(-exponents[j])
        } else {
            1.0
        }
    })
}

fn solve_fixed(
    series: &HeatLeakSeries,
    exponents: &[f64],
    include_constant: bool,
) -> Result<LinearSolution> {
    let design = linear_design(series, exponents, include_constant);
    let y: Vec<f64> = series.samples.iter().map(|s| s.q).collect();
    let sigma: Vec<f64> = series.samples.iter().map(|s| s.sigma).collect();
    weighted_least_squares(&design, &y, &sigma)
}

/// Minimizes `f` on `[lo, hi]` by golden-section search.
pub fn golden_section_min(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(c, fc), (d, fd), (x, fx)]
        .into_iter()
        .min_by(|l, r| l.1.total_cmp(&r.1))
        .expect("non-empty")
}

const EXPONENT_SCAN_POINTS: usize = 39;

fn fit_free_exponent(
    series: &HeatLeakSeries,
    include_constant: bool,
) -> Result<(f64, LinearSolution)> {
    let (lo, hi) = FREE_EXPONENT_RANGE;
    let chi2_at = |alpha: f64| {
        solve_fixed(series, &[alpha], include_constant)
            .map(|s| s.chi2)
            .unwrap_or(f64::INFINITY)
    };
    let step = (hi - lo) / (EXPONENT_SCAN_POINTS - 1) as f64;
    let grid: Vec<(f64, f64)> = (0..EXPONENT_SCAN_POINTS)
        .map(|i| {
            let a = lo + step * i as f64;
            (a, chi2_at(a))
        })
        .collect();
    let (best_idx, _) = grid
        .iter()
        .enumerate()
        .min_by(|l, r| l.1 .1.total_cmp(&r.1 .1))
        .expect("non-empty grid");
    if !grid[best_idx].1.is_finite() {
        return Err(Error::Singular(
            "no exponent in the scan range gives a solvable fit".into(),
        ));
    }
    let a = grid[best_idx.saturating_sub(1)].0;
    let b = grid[(best_idx + 1).min(grid.len() - 1)].0;
    let (alpha, _) = golden_section_min(chi2_at, a, b, 1e-10);
    let solution = solve_fixed(series, &[alpha], include_constant)?;
    Ok((alpha, solution))
}

/// Fits the relaxation model to a heat-leak series.
pub fn fit_relaxation(series: &HeatLeakSeries, spec: &RelaxationSpec) -> Result<FitResult> {
    spec.validate()?;
    let n_params = spec.n_parameters();
    let needed = (n_params + 2).max(4);
    if series.len() < needed {
        return Err(Error::Input(format!(
            "{} samples given, at least {needed} needed for {n_params} parameters",
            series.len()
        )));
    }
    let n_amp = spec.exponents.len();
    let (exponents, solution, fitted_exponent) = if spec.free_exponent {
        let (alpha, sol) = fit_free_exponent(series, spec.include_constant)?;
        (vec![alpha], sol, Some(alpha))
    } else {
        let sol = solve_fixed(series, &spec.exponents, spec.include_constant)?;
        (spec.exponents.clone(), sol, None)
    };
    let amplitudes = solution.params[..n_amp].to_vec();
    let constant = if spec.include_constant {
        solution.params[n_amp]
    } else {
        0.0
    };

    let covariance = match fitted_exponent {
        None => solution.covariance,
        Some(alpha) => {
            // Gauss-Newton covariance including the exponent column ∂q/∂α = -A ln(t) t^-α.
            let base = linear_design(series, &exponents, spec.include_constant);
            let p = base.ncols();
            let amp = amplitudes[0];
            let jac = DMatrix::from_fn(series.len(), p + 1, |i, j| {
                if j < p {
                    base[(i, j)]
                } else {
                    let t = series.samples[i].t;
                    -amp * t.ln() * t.powf(-alpha)
                }
            });
            let sigma: Vec<f64> = series.samples.iter().map(|s| s.sigma).collect();
            let zeros = vec![0.0; series.len()];
            weighted_least_squares(&jac, &zeros, &sigma)
                .map_err(|e| match e {
                    Error::Singular(msg) => {
                        Error::Singular(format!("free exponent is not identifiable: {msg}"))
                    }
                    other => other,
                })?
                .covariance
        }
    };
    let p = covariance.nrows();
    let covariance: Vec<Vec<f64>> = (0..p)
        .map(|i| {
            (0..p)
                .map(|j| 0.5 * (covariance[(i, j)] + covariance[(j, i)]))
                .collect()
        })
        .collect();

    Ok(FitResult {
        exponents,
        amplitudes,
        constant,
        include_constant: spec.include_constant,
        covariance,
        chi2: solution.chi2,
        dof: series.len() - n_params,
        fitted_exponent,
    })
}

/// Expected constant heat leak from cosmic muons and radioactivity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BackgroundBudget {
    /// W/mol.
    pub molar_power: Quantity,
    /// Fractional one-sigma uncertainty of `molar_power`.
    pub uncertainty_fraction: f64,
}

impl BackgroundBudget {
    pub fn new(molar_power: Quantity, uncertainty_fraction: f64) -> Result<Self> {
        let molar_power = molar_power.expect(Dimension::MOLAR_POWER)?;
        if molar_power.value() < 0.0 {
            return Err(Error::Domain(
                "background power must be non-negative".into(),
            ));
        }
        if !(uncertainty_fraction.is_finite() && uncertainty_fraction >= 0.0) {
            return Err(Error::Domain(
                "background uncertainty must be non-negative".into(),
            ));
        }
        Ok(Self {
            molar_power,
            uncertainty_fraction,
        })
    }

    pub fn none() -> Self {
        Self {
            molar_power: Quantity::watts_per_mol(0.0).expect("finite"),
            uncertainty_fraction: 0.0,
        }
    }
}

impl Default for BackgroundBudget {
    /// 1 pW/mol with a 50 % one-sigma uncertainty.
    fn default() -> Self {
        Self {
            molar_power: Quantity::watts_per_mol(1e-12).expect("finite"),
            uncertainty_fraction: 0.5,
        }
    }
}

pub const DEFAULT_CONFIDENCE: f64 = 0.95;

/// Unexplained time-independent specific power, W/kg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualLimit {
    /// Fitted constant minus background, per kg. May be negative.
    pub central: Quantity,
    pub sigma: Quantity,
    /// `max(central, 0) + z·sigma` with `z` the one-sided normal quantile.
    pub upper_limit: Quantity,
    pub confidence: f64,
}

/// One-sided standard normal quantile, floored at zero.
pub fn one_sided_z(confidence: f64) -> Result<f64> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Input(format!(
            "confidence must lie in (0, 1), got {confidence}"
        )));
    }
    let normal = Normal::standard();
    Ok(normal.inverse_cdf(confidence).max(0.0))
}

/// Converts a fit's constant term into a background-subtracted specific-power limit.
///
/// Background moles come from the series' `stage_moles` when present,
/// otherwise from the stage mass and `material`'s molar mass.
pub fn residual_specific_power(
    fit: &FitResult,
    series: &HeatLeakSeries,
    background: &BackgroundBudget,
    material: Option<&Material>,
    confidence: f64,
) -> Result<ResidualLimit> {
    let z = one_sided_z(confidence)?;
    let mass = series.stage_mass();
    let background_total = if background.molar_power.value() == 0.0 {
        Quantity::watts(0.0)?
    } else {
        let moles = match (series.stage_moles(), material) {
            (Some(m), _) => m,
            (None, Some(mat)) => mat.moles_in(mass)?,
            (None, None) => {
                return Err(Error::Input(
                    "molar background needs stage moles or a material to derive them".into(),
                ))
            }
        };
        background
            .molar_power
            .try_mul(moles)?
            .expect(Dimension::POWER)?
    };
    let central = fit
        .constant_power()
        .try_sub(background_total)?
        .try_div(mass)?
        .expect(Dimension::SPECIFIC_POWER)?;
    let background_sd = background_total.value() * background.uncertainty_fraction;
    let sigma = Quantity::watts(fit.constant_sd().hypot(background_sd))?
        .try_div(mass)?
        .expect(Dimension::SPECIFIC_POWER)?;
    let upper_limit = Quantity::watts_per_kg(central.value().max(0.0) + z * sigma.value())?;
    Ok(ResidualLimit {
        central,
        sigma,
        upper_limit,
        confidence,
    })
}

/// Full fit → residual → bound result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub fit: FitResult,
    pub residual: ResidualLimit,
    pub bound: LengthBound,
}

/// Runs the whole pipeline and keeps the intermediate results.
pub fn analyze_series(
    series: &HeatLeakSeries,
    spec: &RelaxationSpec,
    background: &BackgroundBudget,
    material: Option<&Material>,
    model: &HeatingModel,
    confidence: f64,
) -> Result<BoundReport> {
    let fit = fit_relaxation(series, spec)?;
    let residual = residual_specific_power(&fit, series, background, material, confidence)?;
    if residual.upper_limit.value() <= 0.0 {
        return Err(Error::NoFiniteBound);
    }
    let exps: Vec<String> = match fit.fitted_exponent {
        Some(a) => vec![format!("free -> {a:.4}")],
        None => fit.exponents.iter().map(|a| format!("{a}")).collect(),
    };
    let source = format!(
        "heat-leak fit '{}': exponents [{}], constant {}; background {} ± {}%; one-sided {} CL upper limit {}",
        series.label(),
        exps.join(", "),
        if spec.include_constant { "on" } else { "off" },
        format_auto(&background.molar_power, 4),
        background.uncertainty_fraction * 100.0,
        confidence,
        format_auto(&residual.upper_limit, 4),
    );
    let bound = model.invert_bound_with_source(residual.upper_limit, source)?;
    Ok(BoundReport {
        fit,
        residual,
        bound,
    })
}

/// Lower length bound implied by a heat-leak series.
pub fn bound_from_series(
    series: &HeatLeakSeries,
    spec: &RelaxationSpec,
    background: &BackgroundBudget,
    material: Option<&Material>,
    model: &HeatingModel,
    confidence: f64,
) -> Result<LengthBound> {
    analyze_series(series, spec, background, material, model, confidence).map(|r| r.bound)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Percentile {
    pub level: f64,
    pub value: f64,
}

/// Bootstrap distribution of the fitted constant term (W).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapSummary {
    pub n_replicates: usize,
    pub n_dropped: usize,
    /// Set when more than 10 % of replicates failed to fit.
    pub warning: bool,
    pub mean: f64,
    pub sd: f64,
    pub percentiles: Vec<Percentile>,
}

pub const BOOTSTRAP_LEVELS: [f64; 5] = [0.025, 0.16, 0.5, 0.84, 0.975];
pub const MIN_BOOTSTRAP_REPLICATES: usize = 100;

/// Per-replicate generator: stream `index` of the ChaCha generator seeded with `seed`.
fn replicate_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Linear-interpolation percentile of sorted data.
fn percentile_sorted(sorted: &[f64], level: f64) -> f64 {
    let pos = level * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Residual-resampling bootstrap of the constant term.
///
/// Residuals are standardized by their sigma, centered, and inflated by
/// `sqrt(n / dof)` before resampling, so heteroscedastic series resample
/// consistently. Replicates run in parallel; replicate `i` draws from its own
/// stream, so the summary depends only on `(series, spec, n_replicates, seed)`.
pub fn bootstrap_uncertainty(
    series: &HeatLeakSeries,
    spec: &RelaxationSpec,
    n_replicates: usize,
    seed: u64,
) -> Result<BootstrapSummary> {
    if n_replicates < MIN_BOOTSTRAP_REPLICATES {
        return Err(Error::Input(format!(
            "at least {MIN_BOOTSTRAP_REPLICATES} bootstrap replicates required, got {n_replicates}"
        )));
    }
    let base = fit_relaxation(series, spec)?;
    let n = series.len();
    let fitted: Vec<f64> = series.samples.iter().map(|s| base.predict(s.t)).collect();
    let mut standardized: Vec<f64> = series
        .samples
        .iter()
        .zip(&fitted)
        .map(|(s, f)| (s.q - f) / s.sigma)
        .collect();
    let mean_r = standardized.iter().sum::<f64>() / n as f64;
    let inflate = (n as f64 / base.dof as f64).sqrt();
    for r in &mut standardized {
        *r = (*r - mean_r) * inflate;
    }

    let constants: Vec<Option<f64>> = (0..n_replicates)
        .into_par_iter()
        .map(|index| {
            let mut rng = replicate_rng(seed, index);
            let q = series
                .samples
                .iter()
                .zip(&fitted)
                .map(|(s, f)| f + s.sigma * standardized[rng.random_range(0..n)])
                .collect::<Vec<_>>();
            fit_relaxation(&series.with_values(q.into_iter()), spec)
                .ok()
                .map(|fit| fit.constant)
        })
        .collect();

    let mut used: Vec<f64> = constants.into_iter().flatten().collect();
    let n_dropped = n_replicates - used.len();
    if used.len() < 2 {
        return Err(Error::Singular(format!(
            "{n_dropped} of {n_replicates} bootstrap replicates failed to fit"
        )));
    }
    let m = used.len() as f64;
    let mean = used.iter().sum::<f64>() / m;
    let sd = (used.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
    used.sort_by(f64::total_cmp);
    let percentiles = BOOTSTRAP_LEVELS
        .iter()
        .map(|&level| Percentile {
            level,
            value: percentile_sorted(&used, level),
        })
        .collect();
    Ok(BootstrapSummary {
        n_replicates,
        n_dropped,
        warning: n_dropped * 10 > n_replicates,
        mean,
        sd,
        percentiles,
    })
}

/// Generates a log-spaced synthetic series from the relaxation model.
///
/// Each sample gets Gaussian noise with standard deviation
/// `noise_fraction·|q_model|`, and that value is recorded as its sigma. With
/// zero noise the sigma is `SIGMA_FLOOR_REL·|q_model|` (at least
/// `SIGMA_FLOOR_ABS`) and the values equal the model exactly. The stage is
/// 1 kg with no mole count; use [`HeatLeakSeries::with_stage`] to change it.
pub fn generate_synthetic(
    spec: &RelaxationSpec,
    amplitudes: &[f64],
    constant: f64,
    noise_fraction: f64,
    n: usize,
    t_range: (f64, f64),
    seed: u64,
) -> Result<HeatLeakSeries> {
    spec.validate()?;
    if amplitudes.len() != spec.exponents.len() {
        return Err(Error::Input(format!(
            "{} amplitudes for {} exponents",
            amplitudes.len(),
            spec.exponents.len()
        )));
    }
    if n < 4 {
        return Err(Error::Input(format!(
            "at least 4 samples required, got {n}"
        )));
    }
    let (t0, t1) = t_range;
    if !(t0.is_finite() && t1.is_finite() && t0 > 0.0 && t1 > t0) {
        return Err(Error::Input(format!("invalid time range ({t0}, {t1})")));
    }
    if !(noise_fraction.is_finite() && noise_fraction >= 0.0) {
        return Err(Error::Input(format!(
            "invalid noise fraction {noise_fraction}"
        )));
    }
    if amplitudes.iter().any(|a| !a.is_finite()) || !constant.is_finite() {
        return Err(Error::Input("model parameters must be finite".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (l0, l1) = (t0.ln(), t1.ln());
    let samples = (0..n)
        .map(|i| {
            let t = match i {
                0 => t0,
                i if i == n - 1 => t1,
                i => (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp(),
            };
            let truth = model_value(&spec.exponents, amplitudes, constant, t);
            let sd = noise_fraction * truth.abs();
            let q = if sd > 0.0 {
                let z: f64 = StandardNormal.sample(&mut rng);
                truth + sd * z
            } else {
                truth
            };
            let sigma = sd.max(SIGMA_FLOOR_REL * truth.abs()).max(SIGMA_FLOOR_ABS);
            Sample { t, q, sigma }
        })
        .collect();
    HeatLeakSeries::new(samples, Quantity::kilograms(1.0)?, None, "synthetic")
}

/// Full recipe for a synthetic series, including stage metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyntheticConfig {
    pub spec: RelaxationSpec,
    pub amplitudes: Vec<f64>,
    /// W.
    pub constant: f64,
    pub noise_fraction: f64,
    pub n: usize,
    /// Seconds since cooldown start.
    pub t_range: (f64, f64),
    pub seed: u64,
    pub stage_mass: Quantity,
    pub stage_moles: Option<Quantity>,
    pub label: String,
}

impl SyntheticConfig {
    /// A 17 kg copper demagnetization stage observed from about one day to
    /// four months after cooldown. The heat leak relaxes as `t^(-3/4)` from
    /// roughly 2 nW at the start to tens of pW, on top of a constant of
    /// 1 pW/mol (≈ 15.7 pW/kg), i.e. exactly the expected muon and
    /// radioactivity background. 200 samples with 5 % noise.
    pub fn cryostat_scenario() -> Self {
        let copper = Material::copper();
        let mass = Quantity::kilograms(17.0).expect("finite");
        let moles = copper.moles_in(mass).expect("positive molar mass");
        Self {
            spec: RelaxationSpec::default(),
            amplitudes: vec![1.0e-5],
            constant: 1e-12 * moles.value(),
            noise_fraction: 0.05,
            n: 200,
            t_range: (1.0e5, 1.0e7),
            seed: 1995,
            stage_mass: mass,
            stage_moles: Some(moles),
            label: "copper nuclear stage, synthetic".into(),
        }
    }

    pub fn generate(&self) -> Result<HeatLeakSeries> {
        generate_synthetic(
            &self.spec,
            &self.amplitudes,
            self.constant,
            self.noise_fraction,
            self.n,
            self.t_range,
            self.seed,
        )?
        .with_stage(self.stage_mass, self.stage_moles)
        .map(|s| s.with_label(self.label.clone()))
    }
}

impl fmt::Display for FitResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (a, amp)) in self.exponents.iter().zip(&self.amplitudes).enumerate() {
            writeln!(
                f,
                "  A{k} (t^-{a:.4}) = {amp:.6e} ± {:.3e} W·s^{a:.4}",
                self.amplitude_sd(k)
            )?;
        }
        if let (Some(a), Some(sd)) = (self.fitted_exponent, self.exponent_sd()) {
            writeln!(f, "  exponent    = {a:.6} ± {sd:.3e}")?;
        }
        if self.include_constant {
            writeln!(
                f,
                "  constant    = {} ± {}",
                format_auto(&self.constant_power(), 4),
                format_auto(&Quantity::watts(self.constant_sd()).expect("finite"), 4)
            )?;
        }
        write!(f, "  chi2/dof    = {:.4} / {}", self.chi2, self.dof)
    }
}

/// Parses a comma-separated exponent list such as `0.75,0.375`.
pub fn parse_exponents(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .map_err(|_| Error::parse(s, "malformed exponent"))
        })
        .collect()
}

/// Parses a background power per mole, e.g. `1 pW/mol`.
pub fn parse_background(text: &str, uncertainty_fraction: f64) -> Result<BackgroundBudget> {
    BackgroundBudget::new(parse_quantity(text)?, uncertainty_fraction)
}
