//! knds: horizon geometry, Laplace-spectrum traces, and parameter
//! reconstruction for Kerr-Newman-de Sitter spacetimes.
//!
//! Four commands: `forward` (parameters to horizons, geometry, and
//! closed-form traces), `spectrum` (direct numerical eigenvalues and trace
//! estimates for one profile), `inverse` (parameters back from a trace
//! set), `roundtrip` (forward then inverse, with the recovery error).
//!
//! All JSON output is deterministic: fixed field order, maps keyed in
//! sorted order, floats in shortest round-trip decimal form. Exit codes:
//! 0 success, 1 usage or input-schema error, 2 parameter/regime rejection,
//! 3 numerical failure, 4 reconstruction rejection.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use knds_core::spectrum::MIN_GRID_SIZE;
use knds_core::{
    assemble_operator, derive_geometry, eigenvalues, find_horizons, forward_traces, gamma0_closed,
    gammak_closed, reconstruct, trace_estimate, traces_from_spectrum, validate_regime,
    HorizonGeometry, OperatorSpec, Provenance, ReconstructionResult, SpacetimeParams, TraceSet,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;

const SCHEMA_VERSION: &str = "1";

#[derive(Parser)]
#[command(
    name = "knds",
    version,
    about = "Kerr-Newman-de Sitter horizon spectra and spectral parameter reconstruction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Horizon radii, per-horizon geometry, and closed-form traces.
    Forward(ForwardArgs),
    /// Numerical eigenvalues and trace estimates for one profile.
    Spectrum(SpectrumArgs),
    /// Reconstruct (m, a, Q, Lambda) from a trace set.
    Inverse(InverseArgs),
    /// Forward then inverse; reports the recovery error.
    Roundtrip(RoundtripArgs),
}

#[derive(Args)]
struct ParamArgs {
    /// Mass m > 0.
    #[arg(long)]
    mass: f64,
    /// Spin a >= 0.
    #[arg(long)]
    spin: f64,
    /// Charge Q >= 0.
    #[arg(long)]
    charge: f64,
    /// Cosmological constant Lambda > 0.
    #[arg(long)]
    lambda: f64,
}

impl ParamArgs {
    fn build(&self) -> Result<SpacetimeParams, Failure> {
        SpacetimeParams::new(self.mass, self.spin, self.charge, self.lambda).map_err(Failure::core)
    }
}

#[derive(Args)]
struct ForwardArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Mode numbers for gamma_k, comma-separated (k >= 1; gamma_0 is
    /// always included).
    #[arg(long, value_delimiter = ',', default_value = "1")]
    k: Vec<i32>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileKind {
    /// The round sphere, f = 1 - x^2.
    Round,
}

#[derive(Clone, Copy, ValueEnum)]
enum HorizonArg {
    Event,
    #[value(alias = "cosmo")]
    Cosmological,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

fn parse_grid(s: &str) -> Result<usize, String> {
    let grid: usize = s.parse().map_err(|e| format!("{e}"))?;
    if grid < MIN_GRID_SIZE {
        return Err(format!("grid size {grid} is below the minimum {MIN_GRID_SIZE}"));
    }
    Ok(grid)
}

#[derive(Args)]
struct SpectrumArgs {
    /// Named profile (alternative to --xi/--beta-sq or spacetime
    /// parameters).
    #[arg(long, value_enum)]
    profile: Option<ProfileKind>,
    /// Shape parameter xi of an explicit profile.
    #[arg(long)]
    xi: Option<f64>,
    /// Shape parameter beta^2 of an explicit profile.
    #[arg(long)]
    beta_sq: Option<f64>,
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long)]
    spin: Option<f64>,
    #[arg(long)]
    charge: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Which horizon of the given spacetime to analyze.
    #[arg(long, value_enum)]
    horizon: Option<HorizonArg>,
    /// Mode numbers, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    k: Vec<i32>,
    /// Grid size for the discretization (>= 64).
    #[arg(long, default_value = "1024", value_parser = parse_grid)]
    grid: usize,
    /// Eigenvalues per mode; trace estimates need at least 20.
    #[arg(long, default_value_t = 40)]
    count: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct InverseArgs {
    /// JSON trace file (see the schema in the README).
    #[arg(long)]
    traces: Option<PathBuf>,
    /// Inline alternative to --traces: all four values together.
    #[arg(long)]
    gamma0_event: Option<f64>,
    #[arg(long)]
    gamma1_event: Option<f64>,
    #[arg(long)]
    gamma0_cosmo: Option<f64>,
    #[arg(long)]
    gamma1_cosmo: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RoundtripArgs {
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long)]
    spin: Option<f64>,
    #[arg(long)]
    charge: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Seeded batch mode: draw parameter sets at random instead of taking
    /// them from flags.
    #[arg(long, conflicts_with_all = ["mass", "spin", "charge", "lambda"])]
    seed: Option<u64>,
    /// Number of draws in batch mode.
    #[arg(long, default_value_t = 50)]
    draws: usize,
    /// Measure traces from the numerical spectrum instead of the closed
    /// forms (slower; recovery errors reflect the spectral accuracy).
    #[arg(long)]
    use_numerical_traces: bool,
    /// Grid size for --use-numerical-traces.
    #[arg(long, default_value = "1024", value_parser = parse_grid)]
    grid: usize,
    /// Eigenvalues per mode for --use-numerical-traces.
    #[arg(long, default_value_t = 40)]
    count: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Failure carrying the process exit code; the message goes to stderr.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    fn schema(message: impl Into<String>) -> Self {
        Failure { code: 1, message: format!("trace file schema: {}", message.into()) }
    }

    fn io(err: std::io::Error, path: &PathBuf) -> Self {
        Failure { code: 1, message: format!("{}: {err}", path.display()) }
    }

    fn core(err: knds_core::Error) -> Self {
        let code = if err.stage().is_some() {
            4
        } else {
            use knds_core::Error as E;
            match err.root() {
                E::InvalidParams(_) | E::Regime(_) | E::NotAHorizon { .. } | E::Domain(_)
                | E::ZeroMode => 2,
                E::Quadrature(_) | E::Discretization(_) | E::Convergence { .. }
                | E::TailModel(_) => 3,
                E::DegenerateTraces(_) | E::NonPositiveLambda(_) | E::OutOfRange(_)
                | E::InconsistentTraces { .. } | E::NegativeRadiusSquared { .. }
                | E::SingularSystem(_) | E::Stage { .. } => 4,
            }
        };
        Failure { code, message: err.to_string() }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Command::Forward(args) => run_forward(&args),
        Command::Spectrum(args) => run_spectrum(&args),
        Command::Inverse(args) => run_inverse(&args),
        Command::Roundtrip(args) => run_roundtrip(&args),
    };
    if let Err(failure) = result {
        eprintln!("error: {}", failure.message);
        std::process::exit(failure.code);
    }
}

fn emit(text: String, output: &Option<PathBuf>) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::io(e, path)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(doc: &T, output: &Option<PathBuf>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(doc).expect("report serialization");
    text.push('\n');
    emit(text, output)
}

/// Sorted, deduplicated |k| list with k = 0 entries rejected.
fn mode_list(raw: &[i32], allow_zero: bool) -> Result<Vec<i32>, Failure> {
    if raw.is_empty() {
        return Err(Failure::usage("at least one mode number is required"));
    }
    let mut modes: Vec<i32> = raw.iter().map(|k| k.abs()).collect();
    modes.sort_unstable();
    modes.dedup();
    if !allow_zero && modes.first() == Some(&0) {
        return Err(Failure::usage(
            "k = 0 is always reported through gamma_0; list modes k >= 1",
        ));
    }
    Ok(modes)
}

#[derive(Serialize)]
struct GeometryBlock {
    radius: f64,
    eta: f64,
    beta: f64,
    xi: f64,
    area: f64,
    homothety: f64,
    gauss_curvature_pole: f64,
    gauss_curvature_equator: f64,
}

impl GeometryBlock {
    fn build(geometry: &HorizonGeometry) -> Result<Self, Failure> {
        Ok(GeometryBlock {
            radius: geometry.radius,
            eta: geometry.eta,
            beta: geometry.beta,
            xi: geometry.xi,
            area: geometry.area,
            homothety: geometry.homothety(),
            gauss_curvature_pole: geometry.gauss_curvature(1.0).map_err(Failure::core)?,
            gauss_curvature_equator: geometry.gauss_curvature(0.0).map_err(Failure::core)?,
        })
    }
}

#[derive(Serialize)]
struct HorizonBlock {
    negative_root: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    cauchy: Option<f64>,
    event: f64,
    cosmological: f64,
}

#[derive(Serialize)]
struct ForwardReport<'a> {
    schema_version: &'static str,
    params: &'a SpacetimeParams,
    regime: &'a knds_core::RegimeReport,
    horizons: HorizonBlock,
    event_geometry: GeometryBlock,
    cosmological_geometry: GeometryBlock,
    traces: TraceSet,
}

#[derive(Serialize)]
struct RegimeFailureReport<'a> {
    schema_version: &'static str,
    params: &'a SpacetimeParams,
    regime: &'a knds_core::RegimeReport,
}

fn run_forward(args: &ForwardArgs) -> Result<(), Failure> {
    let params = args.params.build()?;
    let regime = validate_regime(&params);
    let modes = mode_list(&args.k, false)?;

    let horizons = match find_horizons(&params) {
        Ok(h) => h,
        Err(err) => {
            // The regime report explains which precondition failed.
            emit_json(
                &RegimeFailureReport {
                    schema_version: SCHEMA_VERSION,
                    params: &params,
                    regime: &regime,
                },
                &args.output,
            )?;
            return Err(Failure::core(err));
        }
    };

    let event = derive_geometry(&params, horizons.event).map_err(Failure::core)?;
    let cosmo = derive_geometry(&params, horizons.cosmological).map_err(Failure::core)?;

    let fill = |geometry: &HorizonGeometry| -> Result<BTreeMap<i32, f64>, Failure> {
        modes
            .iter()
            .map(|&k| Ok((k, gammak_closed(geometry, k).map_err(Failure::core)?)))
            .collect()
    };
    let traces = TraceSet {
        gamma0_event: gamma0_closed(&event).map_err(Failure::core)?,
        gammak_event: fill(&event)?,
        gamma0_cosmo: gamma0_closed(&cosmo).map_err(Failure::core)?,
        gammak_cosmo: fill(&cosmo)?,
        provenance: Provenance::ClosedForm,
        note: (params.spin == 0.0)
            .then(|| "inverse not applicable: spin is zero".to_string()),
    };

    emit_json(
        &ForwardReport {
            schema_version: SCHEMA_VERSION,
            params: &params,
            regime: &regime,
            horizons: HorizonBlock {
                negative_root: horizons.negative_root,
                cauchy: horizons.cauchy,
                event: horizons.event,
                cosmological: horizons.cosmological,
            },
            event_geometry: GeometryBlock::build(&event)?,
            cosmological_geometry: GeometryBlock::build(&cosmo)?,
            traces,
        },
        &args.output,
    )
}

#[derive(Serialize)]
struct TraceBlock {
    partial: f64,
    tail_estimate: f64,
    total: f64,
    error_bound: f64,
    relative_difference_from_closed_form: f64,
}

#[derive(Serialize)]
struct ModeReport {
    k: i32,
    eigenvalues: Vec<f64>,
    eigenvalue_errors: Vec<f64>,
    closed_form_trace: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<TraceBlock>,
}

#[derive(Serialize)]
struct ProfileBlock {
    source: String,
    xi: f64,
    beta_sq: f64,
    homothety: f64,
}

#[derive(Serialize)]
struct SpectrumReport {
    schema_version: &'static str,
    profile: ProfileBlock,
    grid_size: usize,
    count: usize,
    modes: Vec<ModeReport>,
}

fn resolve_profile(args: &SpectrumArgs) -> Result<(HorizonGeometry, String), Failure> {
    let has_shape = args.xi.is_some() || args.beta_sq.is_some();
    let has_params = args.mass.is_some()
        || args.spin.is_some()
        || args.charge.is_some()
        || args.lambda.is_some()
        || args.horizon.is_some();

    match (args.profile, has_shape, has_params) {
        (Some(ProfileKind::Round), false, false) => Ok((
            HorizonGeometry::from_shape(1.0, 0.0, 0.0).map_err(Failure::core)?,
            "round".to_string(),
        )),
        (None, true, false) => {
            let (Some(xi), Some(beta_sq)) = (args.xi, args.beta_sq) else {
                return Err(Failure::usage(
                    "an explicit profile needs both --xi and --beta-sq",
                ));
            };
            Ok((
                HorizonGeometry::from_shape(1.0, beta_sq, xi).map_err(Failure::core)?,
                "explicit shape".to_string(),
            ))
        }
        (None, false, true) => {
            let (Some(mass), Some(spin), Some(charge), Some(lambda), Some(horizon)) =
                (args.mass, args.spin, args.charge, args.lambda, args.horizon)
            else {
                return Err(Failure::usage(
                    "a spacetime profile needs --mass, --spin, --charge, --lambda, and --horizon",
                ));
            };
            let params =
                SpacetimeParams::new(mass, spin, charge, lambda).map_err(Failure::core)?;
            let horizons = find_horizons(&params).map_err(Failure::core)?;
            let (radius, name) = match horizon {
                HorizonArg::Event => (horizons.event, "event horizon"),
                HorizonArg::Cosmological => (horizons.cosmological, "cosmological horizon"),
            };
            Ok((
                derive_geometry(&params, radius).map_err(Failure::core)?,
                name.to_string(),
            ))
        }
        _ => Err(Failure::usage(
            "choose exactly one profile source: --profile round, --xi/--beta-sq, or spacetime parameters with --horizon",
        )),
    }
}

fn run_spectrum(args: &SpectrumArgs) -> Result<(), Failure> {
    let (geometry, source) = resolve_profile(args)?;
    let modes = mode_list(&args.k, true)?;
    let homothety = geometry.homothety();

    let mut reports = Vec::with_capacity(modes.len());
    for &k in &modes {
        let spec = OperatorSpec::new(geometry.profile(), k, args.grid, homothety)
            .map_err(Failure::core)?;
        let op = assemble_operator(&spec).map_err(Failure::core)?;
        let eigs = eigenvalues(&op, args.count).map_err(Failure::core)?;

        let closed = if k == 0 {
            gamma0_closed(&geometry).map_err(Failure::core)?
        } else {
            gammak_closed(&geometry, k).map_err(Failure::core)?
        };

        let (values, errors, trace) = if eigs.len() >= 20 {
            let result = trace_estimate(&eigs, k, homothety).map_err(Failure::core)?;
            let block = TraceBlock {
                partial: result.trace_partial,
                tail_estimate: result.trace_tail_estimate,
                total: result.trace_total,
                error_bound: result.error_bound,
                relative_difference_from_closed_form: (result.trace_total - closed) / closed,
            };
            (result.eigenvalues, result.eigenvalue_errors, Some(block))
        } else {
            (
                eigs.iter().map(|e| e.value / homothety).collect(),
                eigs.iter().map(|e| e.error / homothety).collect(),
                None,
            )
        };

        reports.push(ModeReport {
            k,
            eigenvalues: values,
            eigenvalue_errors: errors,
            closed_form_trace: closed,
            trace,
        });
    }

    match args.format {
        OutputFormat::Json => emit_json(
            &SpectrumReport {
                schema_version: SCHEMA_VERSION,
                profile: ProfileBlock {
                    source,
                    xi: geometry.xi,
                    beta_sq: geometry.beta * geometry.beta,
                    homothety,
                },
                grid_size: args.grid,
                count: args.count,
                modes: reports,
            },
            &args.output,
        ),
        OutputFormat::Csv => {
            let mut text = String::from("k,j,lambda,error_estimate\n");
            for mode in &reports {
                for (j, (value, error)) in mode
                    .eigenvalues
                    .iter()
                    .zip(&mode.eigenvalue_errors)
                    .enumerate()
                {
                    text.push_str(&format!("{},{},{},{}\n", mode.k, j + 1, value, error));
                }
            }
            emit(text, &args.output)
        }
    }
}

/// On-disk trace input. Unknown fields are rejected so typos surface as
/// schema errors instead of silently ignored data.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TraceFile {
    schema_version: String,
    gamma0_event: f64,
    gamma1_event: f64,
    gamma0_cosmo: f64,
    gamma1_cosmo: f64,
    #[serde(default)]
    optional_gammak: Option<OptionalGammak>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct OptionalGammak {
    #[serde(default)]
    event: BTreeMap<i32, f64>,
    #[serde(default)]
    cosmo: BTreeMap<i32, f64>,
}

fn trace_set_from_file(path: &PathBuf) -> Result<TraceSet, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(e, path))?;
    let file: TraceFile = serde_json::from_str(&text).map_err(|e| Failure::schema(e.to_string()))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Failure::schema(format!(
            "unsupported schema_version {:?}, expected {SCHEMA_VERSION:?}",
            file.schema_version
        )));
    }
    for (name, value) in [
        ("gamma0_event", file.gamma0_event),
        ("gamma1_event", file.gamma1_event),
        ("gamma0_cosmo", file.gamma0_cosmo),
        ("gamma1_cosmo", file.gamma1_cosmo),
    ] {
        if !value.is_finite() {
            return Err(Failure::schema(format!("{name} must be finite, got {value}")));
        }
    }

    let optional = file.optional_gammak.unwrap_or_default();
    let mut gammak_event = BTreeMap::from([(1, file.gamma1_event)]);
    let mut gammak_cosmo = BTreeMap::from([(1, file.gamma1_cosmo)]);
    for (map, extra, name) in [
        (&mut gammak_event, optional.event, "event"),
        (&mut gammak_cosmo, optional.cosmo, "cosmo"),
    ] {
        for (k, value) in extra {
            if k < 2 {
                return Err(Failure::schema(format!(
                    "optional_gammak.{name} holds modes k >= 2, got {k}"
                )));
            }
            if !value.is_finite() {
                return Err(Failure::schema(format!(
                    "optional_gammak.{name}[{k}] must be finite, got {value}"
                )));
            }
            map.insert(k, value);
        }
    }

    Ok(TraceSet {
        gamma0_event: file.gamma0_event,
        gammak_event,
        gamma0_cosmo: file.gamma0_cosmo,
        gammak_cosmo,
        provenance: Provenance::ExternalInput,
        note: None,
    })
}

#[derive(Serialize)]
struct RecoveredParams {
    mass: f64,
    spin: f64,
    charge: f64,
    cosmological_constant: f64,
}

impl RecoveredParams {
    fn from_result(result: &ReconstructionResult) -> Self {
        RecoveredParams {
            mass: result.mass,
            spin: result.spin(),
            charge: result.charge(),
            cosmological_constant: result.cosmological_constant,
        }
    }
}

#[derive(Serialize)]
struct InverseReport {
    schema_version: &'static str,
    parameters: RecoveredParams,
    reconstruction: ReconstructionResult,
}

fn run_inverse(args: &InverseArgs) -> Result<(), Failure> {
    let inline: [Option<f64>; 4] = [
        args.gamma0_event,
        args.gamma1_event,
        args.gamma0_cosmo,
        args.gamma1_cosmo,
    ];
    let traces = match (&args.traces, inline.iter().any(Option::is_some)) {
        (Some(path), false) => trace_set_from_file(path)?,
        (None, true) => {
            let [Some(g0e), Some(g1e), Some(g0c), Some(g1c)] = inline else {
                return Err(Failure::usage(
                    "inline traces need all of --gamma0-event, --gamma1-event, --gamma0-cosmo, --gamma1-cosmo",
                ));
            };
            TraceSet {
                gamma0_event: g0e,
                gammak_event: BTreeMap::from([(1, g1e)]),
                gamma0_cosmo: g0c,
                gammak_cosmo: BTreeMap::from([(1, g1c)]),
                provenance: Provenance::ExternalInput,
                note: None,
            }
        }
        (Some(_), true) => {
            return Err(Failure::usage("--traces conflicts with inline trace flags"))
        }
        (None, false) => {
            return Err(Failure::usage("provide --traces FILE or the four inline trace flags"))
        }
    };

    let result = reconstruct(&traces).map_err(Failure::core)?;
    emit_json(
        &InverseReport {
            schema_version: SCHEMA_VERSION,
            parameters: RecoveredParams::from_result(&result),
            reconstruction: result,
        },
        &args.output,
    )
}

#[derive(Serialize)]
struct ParamErrors {
    mass: f64,
    spin: f64,
    charge: f64,
    cosmological_constant: f64,
}

/// Relative where the original is nonzero, absolute for a zero parameter.
fn parameter_error(original: f64, recovered: f64) -> f64 {
    if original == 0.0 {
        recovered.abs()
    } else {
        (recovered - original).abs() / original.abs()
    }
}

fn recovery_errors(original: &SpacetimeParams, recovered: &RecoveredParams) -> (ParamErrors, f64) {
    let errors = ParamErrors {
        mass: parameter_error(original.mass, recovered.mass),
        spin: parameter_error(original.spin, recovered.spin),
        charge: parameter_error(original.charge, recovered.charge),
        cosmological_constant: parameter_error(
            original.cosmological_constant,
            recovered.cosmological_constant,
        ),
    };
    let max = errors
        .mass
        .max(errors.spin)
        .max(errors.charge)
        .max(errors.cosmological_constant);
    (errors, max)
}

#[derive(Serialize)]
struct RoundtripReport {
    schema_version: &'static str,
    trace_source: Provenance,
    original: SpacetimeParams,
    recovered: RecoveredParams,
    errors: ParamErrors,
    max_error: f64,
}

#[derive(Serialize)]
struct DrawReport {
    original: SpacetimeParams,
    recovered: RecoveredParams,
    max_error: f64,
}

#[derive(Serialize)]
struct BatchReport {
    schema_version: &'static str,
    seed: u64,
    draws: usize,
    trace_source: Provenance,
    results: Vec<DrawReport>,
    max_error: f64,
}

fn roundtrip_once(
    params: &SpacetimeParams,
    args: &RoundtripArgs,
) -> Result<(RecoveredParams, f64), Failure> {
    let traces = if args.use_numerical_traces {
        traces_from_spectrum(params, 1, args.grid, args.count).map_err(Failure::core)?
    } else {
        forward_traces(params, 1).map_err(Failure::core)?
    };
    let result = reconstruct(&traces).map_err(Failure::core)?;
    let recovered = RecoveredParams::from_result(&result);
    let (_, max) = recovery_errors(params, &recovered);
    Ok((recovered, max))
}

fn run_roundtrip(args: &RoundtripArgs) -> Result<(), Failure> {
    let provenance = if args.use_numerical_traces {
        Provenance::NumericalSpectrum
    } else {
        Provenance::ClosedForm
    };

    if let Some(seed) = args.seed {
        if args.draws == 0 {
            return Err(Failure::usage("--draws must be positive"));
        }
        // Spins start away from zero: a = 0 carries no trace information
        // and is rejected by design.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut results = Vec::with_capacity(args.draws);
        let mut max_error = 0.0f64;
        for _ in 0..args.draws {
            let spin = rng.gen_range(0.02..=0.5);
            let charge = rng.gen_range(0.0..=0.4);
            let lambda = rng.gen_range(0.005..=0.1);
            let params =
                SpacetimeParams::new(1.0, spin, charge, lambda).map_err(Failure::core)?;
            let (recovered, max) = roundtrip_once(&params, args)?;
            max_error = max_error.max(max);
            results.push(DrawReport {
                original: params,
                recovered,
                max_error: max,
            });
        }
        emit_json(
            &BatchReport {
                schema_version: SCHEMA_VERSION,
                seed,
                draws: args.draws,
                trace_source: provenance,
                results,
                max_error,
            },
            &args.output,
        )
    } else {
        let (Some(mass), Some(spin), Some(charge), Some(lambda)) =
            (args.mass, args.spin, args.charge, args.lambda)
        else {
            return Err(Failure::usage(
                "provide --mass, --spin, --charge, --lambda, or --seed for a random batch",
            ));
        };
        let params = SpacetimeParams::new(mass, spin, charge, lambda).map_err(Failure::core)?;
        let (recovered, max_error) = roundtrip_once(&params, args)?;
        let (errors, _) = recovery_errors(&params, &recovered);
        emit_json(
            &RoundtripReport {
                schema_version: SCHEMA_VERSION,
                trace_source: provenance,
                original: params,
                recovered,
                errors,
                max_error,
            },
            &args.output,
        )
    }
}
