//! The `collapse-bounds` command line.
//!
//! [`run`] parses arguments, executes one subcommand and returns a
//! [`CommandResult`]; the binary only prints it and exits. Exit codes:
//! 0 success, 1 input or parse error, 2 domain error, 3 numerical failure.
//!
//! With `--json` the payload is a single pretty-printed JSON document whose
//! keys are sorted, so identical inputs and seeds give identical bytes.
//! Every quantity appears there as `{"value": <SI>, "unit": <SI unit>,
//! "display": <human string>}` and the `display` strings are the ones the
//! human output prints.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::catalog::{self, Catalog, Constraint, ExclusionDataset};
use crate::error::{Error, Result};
use crate::heatleak::{self, BootstrapSummary, HeatLeakSeries, RelaxationSpec, SyntheticConfig};
use crate::models::{urms_from_debye_waller, HeatingModel, LengthBound, ModelKind};
use crate::quantities::{
    base_unit, format_auto, molar_to_specific, parse_quantity, Dimension, Material,
    PhysicalConstants, Quantity, DEFAULT_SIG_DIGITS,
};

/// Significant digits for reported length bounds.
pub const BOUND_SIG_DIGITS: usize = 3;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::Input(_) | Error::Io(_) | Error::Dimension { .. } => {
            EXIT_INPUT
        }
        Error::Domain(_)
        | Error::ModelMismatch { .. }
        | Error::IncomparableBounds { .. }
        | Error::NoFiniteBound => EXIT_DOMAIN,
        Error::Singular(_) => EXIT_NUMERICAL,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "collapse-bounds",
    version,
    about = "Spontaneous-heating bounds on gravity-related collapse models"
)]
struct Cli {
    /// Emit a single machine-readable JSON document.
    #[arg(long, global = true)]
    json: bool,

    /// Override G (m^3 kg^-1 s^-2) for sensitivity studies.
    #[arg(long, global = true, value_name = "VALUE")]
    gravitational_constant: Option<f64>,

    /// Override hbar (J s) for sensitivity studies.
    #[arg(long, global = true, value_name = "VALUE")]
    hbar: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Dp,
    Ccg,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Dp => ModelKind::DiosiPenrose,
            ModelArg::Ccg => ModelKind::ClassicalChannel,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Heating power predicted at a given length parameter.
    Predict {
        #[arg(long, value_enum)]
        model: ModelArg,
        /// Length parameter, e.g. "4.3 pm".
        #[arg(long, allow_hyphen_values = true)]
        length: String,
        /// Body mass for the total power, e.g. "17 kg".
        #[arg(long, allow_hyphen_values = true)]
        mass: Option<String>,
    },
    /// Lower bound on the length parameter from a specific-power limit.
    Invert {
        #[arg(long, value_enum)]
        model: ModelArg,
        /// Limit in W/kg units, or W/mol units together with --material.
        #[arg(long, allow_hyphen_values = true)]
        power: String,
        #[arg(long)]
        material: Option<String>,
    },
    /// Nuclear wave-function spread from a Debye-Waller factor.
    Urms {
        #[arg(long, conflicts_with = "b", required_unless_present = "b")]
        material: Option<String>,
        /// Debye-Waller factor, e.g. "0.146e-20 m^2".
        #[arg(long = "B", id = "b", allow_hyphen_values = true)]
        b: Option<String>,
    },
    /// Fit a heat-leak series and derive a length bound.
    Fit(FitArgs),
    /// Write a synthetic heat-leak series.
    Generate(GenerateArgs),
    /// Query the experiment catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Write exclusion-plot data as CSV or SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Series file (comma-separated, see the README for the format).
    #[arg(required_unless_present = "synthetic_selftest")]
    input: Option<PathBuf>,
    /// Comma-separated relaxation exponents.
    #[arg(long, default_value = "0.75")]
    exponents: String,
    /// Fit without a time-independent term.
    #[arg(long)]
    no_constant: bool,
    /// Fit a single exponent freely over [0.1, 2.0].
    #[arg(long)]
    free_exponent: bool,
    /// Background power per mole subtracted from the constant.
    #[arg(long, default_value = "1 pW/mol")]
    background: String,
    /// Fractional one-sigma uncertainty of the background.
    #[arg(long, default_value_t = 0.5)]
    background_uncertainty: f64,
    /// Material used to derive moles when the file has no `moles` header.
    #[arg(long)]
    material: Option<String>,
    /// One-sided confidence level of the upper limit.
    #[arg(long, default_value_t = heatleak::DEFAULT_CONFIDENCE)]
    confidence: f64,
    #[arg(long, value_enum, default_value = "dp")]
    model: ModelArg,
    /// Number of bootstrap replicates (requires --seed).
    #[arg(long)]
    bootstrap: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fit a noiseless synthetic series and report parameter recovery.
    #[arg(long)]
    synthetic_selftest: bool,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    seed: u64,
    /// Preset; explicit flags below override its fields.
    #[arg(long, value_enum)]
    scenario: Option<Scenario>,
    #[arg(long)]
    exponents: Option<String>,
    /// Comma-separated amplitudes in W s^alpha.
    #[arg(long, allow_hyphen_values = true)]
    amplitudes: Option<String>,
    /// Constant heat leak, e.g. "170 pW".
    #[arg(long, allow_hyphen_values = true)]
    constant: Option<String>,
    #[arg(long)]
    noise: Option<f64>,
    #[arg(short = 'n', long = "samples")]
    samples: Option<usize>,
    /// Time range in seconds, "start:end".
    #[arg(long)]
    t_range: Option<String>,
    #[arg(long)]
    mass: Option<String>,
    #[arg(long)]
    moles: Option<f64>,
    #[arg(long)]
    label: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Scenario {
    /// 17 kg copper stage with a 1 pW/mol constant heat leak.
    Cryostat,
}

#[derive(Debug, Subcommand)]
enum CatalogAction {
    /// List records and annotations.
    List,
    /// Bound from one record.
    Derive {
        name: String,
        #[arg(long, value_enum, default_value = "dp")]
        model: ModelArg,
    },
    /// All applicable records, strongest bound first.
    Rank {
        #[arg(long, value_enum, default_value = "dp")]
        model: ModelArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PlotFormat {
    Csv,
    Svg,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[arg(long, value_enum, default_value = "dp")]
    model: ModelArg,
    /// Comma-separated record names; all records when absent.
    #[arg(long)]
    records: Option<String>,
    /// Comma-separated `label:material` or `label:length` markers.
    #[arg(long)]
    markers: Option<String>,
    /// Length range "lo:hi", e.g. "1pm:10pm".
    #[arg(long, default_value = "1pm:10pm")]
    range: String,
    #[arg(long, default_value_t = 200)]
    n_points: usize,
    #[arg(long)]
    out: PathBuf,
    /// Output format; inferred from the file extension when absent.
    #[arg(long, value_enum)]
    format: Option<PlotFormat>,
}

struct Output {
    human: String,
    machine: Value,
}

/// Runs the command line given `args` (including the program name).
pub fn run<I, T>(args: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    CommandResult {
                        exit_code: EXIT_OK,
                        stdout: text,
                        stderr: String::new(),
                    }
                }
                _ => CommandResult {
                    exit_code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let stdout = if cli.json {
                let mut s = serde_json::to_string_pretty(&out.machine).expect("json");
                s.push('\n');
                s
            } else {
                out.human
            };
            CommandResult {
                exit_code: EXIT_OK,
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => CommandResult {
            exit_code: exit_code_for(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn execute(cli: &Cli) -> Result<Output> {
    let constants = match (cli.gravitational_constant, cli.hbar) {
        (None, None) => PhysicalConstants::codata2018(),
        (g, h) => {
            let d = PhysicalConstants::codata2018();
            PhysicalConstants::new(
                g.unwrap_or(d.gravitational_constant().value()),
                h.unwrap_or(d.reduced_planck().value()),
            )?
        }
    };
    let model = |m: ModelArg| HeatingModel::new(m.into(), constants);
    match &cli.command {
        Command::Predict {
            model: m,
            length,
            mass,
        } => cmd_predict(&model(*m), length, mass.as_deref()),
        Command::Invert {
            model: m,
            power,
            material,
        } => cmd_invert(&model(*m), power, material.as_deref()),
        Command::Urms { material, b } => cmd_urms(material.as_deref(), b.as_deref()),
        Command::Fit(args) => cmd_fit(args, constants),
        Command::Generate(args) => cmd_generate(args),
        Command::Catalog { action } => {
            let catalog = Catalog::from_env()?;
            match action {
                CatalogAction::List => cmd_catalog_list(&catalog),
                CatalogAction::Derive { name, model: m } => {
                    cmd_catalog_derive(&catalog, name, &model(*m))
                }
                CatalogAction::Rank { model: m } => cmd_catalog_rank(&catalog, &model(*m)),
            }
        }
        Command::Plot(args) => cmd_plot(args, &model(args.model)),
    }
}

fn quantity_json(q: &Quantity, sig: usize) -> Value {
    json!({
        "value": q.value(),
        "unit": base_unit(q.dim()),
        "display": format_auto(q, sig),
    })
}

fn bound_display(b: &LengthBound) -> String {
    format_auto(&b.value, BOUND_SIG_DIGITS)
}

fn bound_json(b: &LengthBound) -> Value {
    json!({
        "parameter": b.model.length_symbol(),
        "model": b.model.as_str(),
        "kind": "lower",
        "length": quantity_json(&b.value, BOUND_SIG_DIGITS),
        "source": b.source,
    })
}

fn parse_dim(text: &str, dim: Dimension) -> Result<Quantity> {
    parse_quantity(text)?.expect(dim)
}

fn lookup_material(name: &str) -> Result<Material> {
    Material::builtin(name).ok_or_else(|| Error::Input(format!("unknown material `{name}`")))
}

fn cmd_predict(model: &HeatingModel, length: &str, mass: Option<&str>) -> Result<Output> {
    let length = parse_dim(length, Dimension::LENGTH)?;
    let specific = model.specific_power(length)?;
    let specific_display = format_auto(&specific, DEFAULT_SIG_DIGITS);
    let mut human = format!(
        "model {}, {} = {}\nspecific power: {}\n",
        model.kind,
        model.kind.length_symbol(),
        format_auto(&length, DEFAULT_SIG_DIGITS),
        specific_display
    );
    let mut machine = json!({
        "command": "predict",
        "model": model.kind.as_str(),
        "length": quantity_json(&length, DEFAULT_SIG_DIGITS),
        "specific_power": quantity_json(&specific, DEFAULT_SIG_DIGITS),
    });
    if let Some(mass) = mass {
        let mass = parse_dim(mass, Dimension::MASS)?;
        let total = model.total_power(length, mass)?;
        human.push_str(&format!(
            "total power ({}): {}\n",
            format_auto(&mass, DEFAULT_SIG_DIGITS),
            format_auto(&total, DEFAULT_SIG_DIGITS)
        ));
        machine["mass"] = quantity_json(&mass, DEFAULT_SIG_DIGITS);
        machine["total_power"] = quantity_json(&total, DEFAULT_SIG_DIGITS);
    }
    Ok(Output { human, machine })
}

fn cmd_invert(model: &HeatingModel, power: &str, material: Option<&str>) -> Result<Output> {
    let raw = parse_quantity(power)?;
    let (limit, material) = if raw.dim() == Dimension::MOLAR_POWER {
        let name = material.ok_or_else(|| {
            Error::Input("a per-mole power needs --material to convert to W/kg".into())
        })?;
        let mat = lookup_material(name)?;
        (molar_to_specific(raw, &mat)?, Some(mat))
    } else {
        if let Some(name) = material {
            lookup_material(name)?;
        }
        (raw.expect(Dimension::SPECIFIC_POWER)?, None)
    };
    let bound = model.invert_bound(limit)?;
    let display = bound_display(&bound);
    let human = format!(
        "{} > {}  (model {}, specific power limit {})\n",
        model.kind.length_symbol(),
        display,
        model.kind,
        format_auto(&limit, DEFAULT_SIG_DIGITS)
    );
    let mut machine = json!({
        "command": "invert",
        "model": model.kind.as_str(),
        "input_power": quantity_json(&raw, DEFAULT_SIG_DIGITS),
        "specific_power_limit": quantity_json(&limit, DEFAULT_SIG_DIGITS),
        "bound": bound_json(&bound),
    });
    if let Some(mat) = material {
        machine["material"] = json!(mat.name());
    }
    Ok(Output { human, machine })
}

fn cmd_urms(material: Option<&str>, b: Option<&str>) -> Result<Output> {
    let (b, source) = match (material, b) {
        (Some(name), _) => {
            let mat = lookup_material(name)?;
            let b = mat.debye_waller_b().ok_or_else(|| {
                Error::Input(format!("material `{name}` has no Debye-Waller factor"))
            })?;
            (b, mat.name().to_string())
        }
        (None, Some(text)) => (parse_dim(text, Dimension::AREA)?, "given B".to_string()),
        (None, None) => return Err(Error::Input("give --material or --B".into())),
    };
    let u = urms_from_debye_waller(b)?;
    let display = format_auto(&u, DEFAULT_SIG_DIGITS);
    Ok(Output {
        human: format!("u_rms = {display}  ({source}, B = {:e} m^2)\n", b.value()),
        machine: json!({
            "command": "urms",
            "source": source,
            "debye_waller_b": quantity_json(&b, DEFAULT_SIG_DIGITS),
            "u_rms": quantity_json(&u, DEFAULT_SIG_DIGITS),
        }),
    })
}

fn fit_json(fit: &heatleak::FitResult) -> Value {
    let terms: Vec<Value> = fit
        .exponents
        .iter()
        .zip(&fit.amplitudes)
        .enumerate()
        .map(|(k, (a, amp))| json!({"exponent": a, "amplitude": amp, "amplitude_sd": fit.amplitude_sd(k)}))
        .collect();
    json!({
        "terms": terms,
        "constant": quantity_json(&fit.constant_power(), DEFAULT_SIG_DIGITS),
        "constant_sd": quantity_json(&Quantity::watts(fit.constant_sd()).expect("finite"), DEFAULT_SIG_DIGITS),
        "include_constant": fit.include_constant,
        "fitted_exponent": fit.fitted_exponent,
        "exponent_sd": fit.exponent_sd(),
        "covariance": fit.covariance,
        "chi2": fit.chi2,
        "dof": fit.dof,
    })
}

fn bootstrap_json(b: &BootstrapSummary, seed: u64) -> Value {
    json!({
        "seed": seed,
        "n_replicates": b.n_replicates,
        "n_dropped": b.n_dropped,
        "warning": b.warning,
        "mean": b.mean,
        "sd": b.sd,
        "percentiles": b.percentiles,
    })
}

fn relaxation_spec(args: &FitArgs) -> Result<RelaxationSpec> {
    let spec = RelaxationSpec {
        exponents: heatleak::parse_exponents(&args.exponents)?,
        include_constant: !args.no_constant,
        free_exponent: args.free_exponent,
    };
    spec.validate()?;
    Ok(spec)
}

fn cmd_fit(args: &FitArgs, constants: PhysicalConstants) -> Result<Output> {
    if args.synthetic_selftest {
        return fit_selftest();
    }
    let spec = relaxation_spec(args)?;
    let path = args.input.as_ref().expect("clap requires input");
    let series = HeatLeakSeries::load(path)?;
    let background = heatleak::parse_background(&args.background, args.background_uncertainty)?;
    let material = args.material.as_deref().map(lookup_material).transpose()?;
    let model = HeatingModel::new(args.model.into(), constants);
    let bootstrap_seed = match (args.bootstrap, args.seed) {
        (Some(_), None) => {
            return Err(Error::Input(
                "--bootstrap requires an explicit --seed".into(),
            ))
        }
        (Some(n), Some(seed)) => Some((n, seed)),
        (None, _) => None,
    };

    let report = heatleak::analyze_series(
        &series,
        &spec,
        &background,
        material.as_ref(),
        &model,
        args.confidence,
    )?;
    let r = &report.residual;
    let mut human = format!(
        "series '{}': {} samples, stage mass {}\nfit:\n{}\n",
        series.label(),
        series.len(),
        format_auto(&series.stage_mass(), DEFAULT_SIG_DIGITS),
        report.fit
    );
    human.push_str(&format!(
        "residual specific power: {} ± {}\nupper limit ({} one-sided): {}\nbound: {} > {}  (model {})\n",
        format_auto(&r.central, DEFAULT_SIG_DIGITS),
        format_auto(&r.sigma, DEFAULT_SIG_DIGITS),
        r.confidence,
        format_auto(&r.upper_limit, DEFAULT_SIG_DIGITS),
        report.bound.model.length_symbol(),
        bound_display(&report.bound),
        report.bound.model
    ));
    let mut machine = json!({
        "command": "fit",
        "series": {
            "label": series.label(),
            "n_samples": series.len(),
            "stage_mass": quantity_json(&series.stage_mass(), DEFAULT_SIG_DIGITS),
        },
        "spec": spec,
        "background": {
            "molar_power": quantity_json(&background.molar_power, DEFAULT_SIG_DIGITS),
            "uncertainty_fraction": background.uncertainty_fraction,
        },
        "fit": fit_json(&report.fit),
        "residual": {
            "central": quantity_json(&r.central, DEFAULT_SIG_DIGITS),
            "sigma": quantity_json(&r.sigma, DEFAULT_SIG_DIGITS),
            "upper_limit": quantity_json(&r.upper_limit, DEFAULT_SIG_DIGITS),
            "confidence": r.confidence,
        },
        "bound": bound_json(&report.bound),
    });
    if let Some((n, seed)) = bootstrap_seed {
        let boot = heatleak::bootstrap_uncertainty(&series, &spec, n, seed)?;
        human.push_str(&format!(
            "bootstrap ({n} replicates, seed {seed}): constant {} ± {}{}\n",
            format_auto(&Quantity::watts(boot.mean)?, DEFAULT_SIG_DIGITS),
            format_auto(&Quantity::watts(boot.sd)?, DEFAULT_SIG_DIGITS),
            if boot.warning {
                format!("  WARNING: {} replicates dropped", boot.n_dropped)
            } else {
                String::new()
            }
        ));
        machine["bootstrap"] = bootstrap_json(&boot, seed);
    }
    Ok(Output { human, machine })
}

/// Relative tolerance for the noiseless self-test.
const SELFTEST_TOLERANCE: f64 = 1e-9;

fn fit_selftest() -> Result<Output> {
    let mut config = SyntheticConfig::cryostat_scenario();
    config.noise_fraction = 0.0;
    let series = config.generate()?;
    let fit = heatleak::fit_relaxation(&series, &config.spec)?;
    let amp_err = ((fit.amplitudes[0] - config.amplitudes[0]) / config.amplitudes[0]).abs();
    let const_err = ((fit.constant - config.constant) / config.constant).abs();
    let exact = amp_err <= SELFTEST_TOLERANCE && const_err <= SELFTEST_TOLERANCE;
    let human = format!(
        "noiseless self-test ({} samples)\n  amplitude relative error: {amp_err:.3e}\n  constant relative error:  {const_err:.3e}\nexact recovery: {}\n",
        series.len(),
        if exact { "yes" } else { "NO" }
    );
    if !exact {
        return Err(Error::Singular(format!(
            "self-test failed: amplitude error {amp_err:e}, constant error {const_err:e}"
        )));
    }
    Ok(Output {
        human,
        machine: json!({
            "command": "fit-selftest",
            "n_samples": series.len(),
            "amplitude_relative_error": amp_err,
            "constant_relative_error": const_err,
            "tolerance": SELFTEST_TOLERANCE,
            "exact_recovery": exact,
        }),
    })
}

fn parse_range(text: &str) -> Result<(&str, &str)> {
    text.split_once(':')
        .ok_or_else(|| Error::parse(text, "expected a range `start:end`"))
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse().map_err(|_| Error::parse(s, "malformed number"))
        })
        .collect()
}

fn cmd_generate(args: &GenerateArgs) -> Result<Output> {
    let mut config = match args.scenario {
        Some(Scenario::Cryostat) => SyntheticConfig::cryostat_scenario(),
        None => SyntheticConfig {
            spec: RelaxationSpec::default(),
            amplitudes: vec![],
            constant: 0.0,
            noise_fraction: 0.0,
            n: 200,
            t_range: (1e5, 1e7),
            seed: 0,
            stage_mass: Quantity::kilograms(1.0)?,
            stage_moles: None,
            label: "synthetic".into(),
        },
    };
    config.seed = args.seed;
    if let Some(e) = &args.exponents {
        config.spec = RelaxationSpec::fixed(heatleak::parse_exponents(e)?);
    }
    if let Some(a) = &args.amplitudes {
        config.amplitudes = parse_f64_list(a)?;
    }
    if config.amplitudes.is_empty() {
        return Err(Error::Input(
            "--amplitudes required without --scenario".into(),
        ));
    }
    if let Some(c) = &args.constant {
        config.constant = parse_dim(c, Dimension::POWER)?.value();
    }
    if let Some(n) = args.noise {
        config.noise_fraction = n;
    }
    if let Some(n) = args.samples {
        config.n = n;
    }
    if let Some(r) = &args.t_range {
        let (a, b) = parse_range(r)?;
        let [a, b] = [a, b].map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::parse(s, "malformed time"))
        });
        config.t_range = (a?, b?);
    }
    if let Some(m) = &args.mass {
        config.stage_mass = parse_dim(m, Dimension::MASS)?;
    }
    if let Some(m) = args.moles {
        config.stage_moles = Some(Quantity::moles(m)?);
    }
    if let Some(l) = &args.label {
        config.label = l.clone();
    }
    let series = config.generate()?;
    let csv = series.to_csv_string();
    match &args.out {
        None => Ok(Output {
            human: csv.clone(),
            machine: json!({"command": "generate", "csv": csv, "config": config}),
        }),
        Some(path) => {
            std::fs::write(path, &csv)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            Ok(Output {
                human: format!("wrote {} samples to {}\n", series.len(), path.display()),
                machine: json!({
                    "command": "generate",
                    "path": path.display().to_string(),
                    "n_samples": series.len(),
                    "config": config,
                }),
            })
        }
    }
}

fn constraint_display(c: &Constraint) -> (String, Value) {
    match c {
        Constraint::SpecificPowerLimit { limit } => (
            format!("P < {}", format_auto(limit, DEFAULT_SIG_DIGITS)),
            json!({"kind": "specific-power-limit", "limit": quantity_json(limit, DEFAULT_SIG_DIGITS)}),
        ),
        Constraint::DirectLengthBound { length, model } => (
            format!(
                "{} > {} ({model})",
                model.length_symbol(),
                format_auto(length, BOUND_SIG_DIGITS)
            ),
            json!({"kind": "direct-length-bound", "model": model.as_str(), "length": quantity_json(length, BOUND_SIG_DIGITS)}),
        ),
    }
}

fn cmd_catalog_list(catalog: &Catalog) -> Result<Output> {
    let mut human = String::new();
    let mut records = Vec::new();
    for r in &catalog.records {
        let (text, value) = constraint_display(&r.constraint);
        human.push_str(&format!("{:<20} {:<28} {}\n", r.name, text, r.provenance));
        records.push(json!({
            "name": r.name,
            "constraint": value,
            "material": r.material,
            "temperature_note": r.temperature_note,
            "provenance": r.provenance,
            "reported": r.reported,
        }));
    }
    for a in &catalog.annotations {
        human.push_str(&format!("note [{}]: {}\n", a.name, a.note));
    }
    Ok(Output {
        human,
        machine: json!({
            "command": "catalog-list",
            "version": catalog.version,
            "records": records,
            "annotations": catalog.annotations,
        }),
    })
}

fn cmd_catalog_derive(catalog: &Catalog, name: &str, model: &HeatingModel) -> Result<Output> {
    let record = catalog.get(name)?;
    let bound = catalog::derive_bound(record, model)?;
    Ok(Output {
        human: format!(
            "{name}: {} > {}  (model {})\n",
            model.kind.length_symbol(),
            bound_display(&bound),
            model.kind
        ),
        machine: json!({"command": "catalog-derive", "name": name, "bound": bound_json(&bound)}),
    })
}

fn cmd_catalog_rank(catalog: &Catalog, model: &HeatingModel) -> Result<Output> {
    let records = catalog.applicable(model.kind);
    let ranked = catalog::rank_bounds(&records, model)?;
    let mut human = format!(
        "rank  record               {} lower bound (model {})\n",
        model.kind.length_symbol(),
        model.kind
    );
    let mut rows = Vec::new();
    for (i, (name, bound)) in ranked.iter().enumerate() {
        human.push_str(&format!(
            "{:>4}  {:<20} {}\n",
            i + 1,
            name,
            bound_display(bound)
        ));
        rows.push(json!({"rank": i + 1, "name": name, "bound": bound_json(bound)}));
    }
    Ok(Output {
        human,
        machine: json!({"command": "catalog-rank", "model": model.kind.as_str(), "ranking": rows}),
    })
}

fn parse_marker(spec: &str) -> Result<(String, Quantity)> {
    let (label, value) = spec
        .split_once(':')
        .ok_or_else(|| Error::parse(spec, "marker must be `label:material` or `label:length`"))?;
    let length = match Material::builtin(value) {
        Some(mat) => {
            let b = mat.debye_waller_b().ok_or_else(|| {
                Error::Input(format!("material `{value}` has no Debye-Waller factor"))
            })?;
            urms_from_debye_waller(b)?
        }
        None => parse_dim(value, Dimension::LENGTH)?,
    };
    Ok((label.trim().to_string(), length))
}

fn cmd_plot(args: &PlotArgs, model: &HeatingModel) -> Result<Output> {
    let catalog = Catalog::from_env()?;
    let records = match &args.records {
        None => catalog.records.clone(),
        Some(names) => names
            .split(',')
            .map(|n| catalog.get(n.trim()).cloned())
            .collect::<Result<Vec<_>>>()?,
    };
    let markers = match &args.markers {
        None => vec![],
        Some(list) => list
            .split(',')
            .map(parse_marker)
            .collect::<Result<Vec<_>>>()?,
    };
    let (lo, hi) = parse_range(&args.range)?;
    let range = (
        parse_dim(lo, Dimension::LENGTH)?,
        parse_dim(hi, Dimension::LENGTH)?,
    );
    let dataset = catalog::exclusion_dataset(model, &records, &markers, range, args.n_points)?;
    let format = match args.format {
        Some(f) => f,
        None => match args.out.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("svg") => PlotFormat::Svg,
            _ => PlotFormat::Csv,
        },
    };
    let text = match format {
        PlotFormat::Csv => dataset.to_csv(),
        PlotFormat::Svg => dataset.to_svg(),
    };
    std::fs::write(&args.out, text)
        .map_err(|e| Error::Io(format!("{}: {e}", args.out.display())))?;
    Ok(plot_output(&dataset, args, format))
}

fn plot_output(dataset: &ExclusionDataset, args: &PlotArgs, format: PlotFormat) -> Output {
    let format_name = match format {
        PlotFormat::Csv => "csv",
        PlotFormat::Svg => "svg",
    };
    let crossings = dataset.crossings();
    let length_q = |l: f64| Quantity::meters(l).expect("finite");
    let mut human = format!(
        "wrote {} ({format_name}, {} curve points, {} limit lines, {} markers)\n",
        args.out.display(),
        dataset.model_curve.len(),
        dataset.limit_lines.len(),
        dataset.marker_lines.len()
    );
    for c in &crossings {
        human.push_str(&format!(
            "crossing: {} at {}\n",
            c.label,
            format_auto(&length_q(c.length), BOUND_SIG_DIGITS)
        ));
    }
    let crossing_json: Vec<Value> = crossings
        .iter()
        .map(|c| {
            json!({
                "label": c.label,
                "length": quantity_json(&length_q(c.length), BOUND_SIG_DIGITS),
                "specific_power": quantity_json(&Quantity::watts_per_kg(c.specific_power).expect("finite"), DEFAULT_SIG_DIGITS),
            })
        })
        .collect();
    Output {
        human,
        machine: json!({
            "command": "plot",
            "model": dataset.model.as_str(),
            "path": args.out.display().to_string(),
            "format": format_name,
            "n_points": dataset.model_curve.len(),
            "limit_lines": dataset.limit_lines,
            "marker_lines": dataset.marker_lines,
            "crossings": crossing_json,
        }),
    }
}
