//! `vn1`: indirect spin-1 measurement calculations from a TOML description.
//!
//! Subcommands: `weak-values`, `measure`, `sweep`, `wigner`, `oracle-check`.
//! Exit codes: 0 success, 1 usage or configuration error, 2 orthogonal
//! preparation/postselection, 3 internal consistency failure.

mod config;
mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use config::{load_config, OutputFormat, RunConfig, SweepParameter, SweepScale};
use output::{fmt_f64, write_out, Csv, Record, Value};
use vn1_core::detector::{DetectorModel, GaussianDetector};
use vn1_core::engine::{self, EngineRoute, MeasurementSetup};
use vn1_core::error::Error as CoreError;
use vn1_core::oracle;
use vn1_core::weak_limit::{self, ValidityOptions};
use vn1_core::weak_values::{classify_special_case, weak_values_with_floor};

#[derive(Debug)]
enum CliErrorKind {
    Config,
    Orthogonal,
    Internal,
}

#[derive(Debug)]
pub struct CliError {
    kind: CliErrorKind,
    message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        Self {
            kind: CliErrorKind::Config,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Self {
            kind: CliErrorKind::Internal,
            message: message.into(),
        }
    }

    /// Core errors surfacing while building objects from the configuration.
    fn from_core_config(e: CoreError) -> Self {
        Self::config(e.to_string())
    }

    /// Core errors surfacing from a computation on a valid configuration.
    fn from_core_run(e: CoreError) -> Self {
        let kind = match e {
            CoreError::OrthogonalPostselection { .. } | CoreError::NoConditioning { .. } => {
                CliErrorKind::Orthogonal
            }
            CoreError::NegativeProbability { .. } | CoreError::InvalidState { .. } => {
                CliErrorKind::Internal
            }
            _ => CliErrorKind::Config,
        };
        Self {
            kind,
            message: e.to_string(),
        }
    }

    fn exit_code(&self) -> i32 {
        match self.kind {
            CliErrorKind::Config => 1,
            CliErrorKind::Orthogonal => 2,
            CliErrorKind::Internal => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "vn1",
    about = "Exact statistics of indirect von Neumann measurements of spin-1 systems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output format; defaults to the config's choice, else per command.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comparison tolerance for oracle checks.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Overlap, the five weak values, and the special-case classification.
    WeakValues(CommonArgs),
    /// Postselection probability and conditioned readout average.
    Measure {
        #[command(flatten)]
        common: CommonArgs,
        /// Also run the brute-force oracle and report the deviations.
        #[arg(long)]
        oracle: bool,
    },
    /// Parameter sweep (coupling or detector width) with the weak-limit
    /// expansions alongside the exact values.
    Sweep(CommonArgs),
    /// Discrete Wigner table with verified marginals.
    Wigner(CommonArgs),
    /// Engine versus brute-force oracle on the configured setup.
    OracleCheck(CommonArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through the error path with status 0
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Command::WeakValues(args) => cmd_weak_values(&args),
        Command::Measure { common, oracle } => cmd_measure(&common, oracle),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Wigner(args) => cmd_wigner(&args),
        Command::OracleCheck(args) => cmd_oracle_check(&args),
    };
    match result {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.exit_code());
        }
    }
}


fn emit_record(args: &CommonArgs, config: &RunConfig, record: Record) -> Result<(), CliError> {
    let format = args
        .format
        .or(config.output.format)
        .unwrap_or(OutputFormat::Record);
    let text = match format {
        OutputFormat::Record => record.finish()?,
        OutputFormat::Csv => record.finish_csv()?,
    };
    write_out(args.out.as_deref(), &text)
}

fn require_csv(args: &CommonArgs, config: &RunConfig, command: &str) -> Result<(), CliError> {
    let format = args.format.or(config.output.format).unwrap_or(OutputFormat::Csv);
    if format != OutputFormat::Csv {
        return Err(CliError::config(format!(
            "the {command} command emits tabular CSV; --format record is not available here"
        )));
    }
    Ok(())
}

fn config_hash(path: &std::path::Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let digest = Sha256::digest(&bytes);
    let mut hex = String::with_capacity(71);
    hex.push_str("sha256:");
    for b in digest {
        hex.push_str(&format!("{b:02x}"));
    }
    Ok(hex)
}

fn load(args: &CommonArgs) -> Result<(RunConfig, String), CliError> {
    Ok((load_config(&args.config)?, config_hash(&args.config)?))
}

fn cmd_weak_values(args: &CommonArgs) -> Result<(), CliError> {
    let (config, hash) = load(args)?;
    let setup = config.setup()?;
    let post = setup.effective_postselection();
    let wv = weak_values_with_floor(
        &setup.system,
        &post,
        &setup.observable,
        config.tolerances.omega_floor,
    )
    .map_err(CliError::from_core_run)?;
    let report = classify_special_case(&setup.system, &post, &setup.observable)
        .map_err(CliError::from_core_run)?;

    let mut record = Record::new("weak-values", &hash);
    record.push("omega", Value::Float(wv.omega));
    record.push_complex("a_w", wv.a_w.re, wv.a_w.im);
    record.push("b_w", Value::Float(wv.b_w));
    record.push_complex("c_w", wv.c_w.re, wv.c_w.im);
    record.push_complex("d_w", wv.d_w.re, wv.d_w.im);
    record.push("e_w", Value::Float(wv.e_w));
    record.push("flag_spin_half_like", Value::Bool(report.flags.spin_half_like));
    record.push("flag_commutes_with_s", Value::Bool(report.flags.commutes_with_s));
    record.push(
        "flag_commutes_with_s_squared",
        Value::Bool(report.flags.commutes_with_s_squared),
    );
    record.push("flag_pure_pure", Value::Bool(report.flags.pure_pure));
    record.push_terms(
        "residuals_spin_half",
        &[
            ("c_minus_one", report.spin_half.c_minus_one),
            ("d_minus_a", report.spin_half.d_minus_a),
            ("e_minus_one", report.spin_half.e_minus_one),
        ],
    );
    record.push_terms(
        "residuals_commuting",
        &[
            ("max_imaginary", report.commuting.max_imaginary),
            ("c_minus_b", report.commuting.c_minus_b),
            ("e_minus_b", report.commuting.e_minus_b),
            ("d_minus_a", report.commuting.d_minus_a),
        ],
    );
    record.push_terms(
        "residuals_s_squared_commuting",
        &[
            ("c_imaginary", report.s_squared_commuting.c_imaginary),
            ("d_minus_a", report.s_squared_commuting.d_minus_a),
            ("e_minus_c", report.s_squared_commuting.e_minus_c),
        ],
    );
    record.push_terms(
        "residuals_pure_pure",
        &[
            ("b_minus_a_sq", report.pure_pure.b_minus_a_sq),
            ("e_minus_c_sq", report.pure_pure.e_minus_c_sq),
            ("d_minus_a_cstar", report.pure_pure.d_minus_a_cstar),
        ],
    );
    emit_record(args, &config, record)
}

fn push_measurement(record: &mut Record, result: &engine::MeasurementResult) {
    record.push("omega", Value::Float(result.omega));
    record.push("p_f", Value::Float(result.p_f));
    record.push("avg_output", Value::Float(result.avg_output));
    record.push("readout_offset", Value::Float(result.readout_offset));
    record.push(
        "route",
        Value::Str(
            match result.route {
                EngineRoute::AnalyticMoments => "analytic-moments",
                EngineRoute::OperatorAverages => "operator-averages",
            }
            .into(),
        ),
    );
    record.push("imag_residue", Value::Float(result.imag_residue));
    record.push_terms("probability_terms", &result.probability_terms);
    record.push_terms("output_terms", &result.output_terms);
    if let Some(delta) = &result.wigner_route {
        record.push("wigner_route_p_f_delta", Value::Float(delta.p_f_delta));
        record.push("wigner_route_avg_delta", Value::Float(delta.avg_delta));
        record.push(
            "wigner_route_integer_coupling",
            Value::Bool(delta.integer_coupling),
        );
    }
    record.push_str_array("warnings", &result.warnings);
}

fn push_validity(record: &mut Record, config: &RunConfig, setup: &MeasurementSetup) {
    let validity = weak_limit::validity_check(
        &setup.detector,
        setup.lambda,
        ValidityOptions {
            wcond_threshold: config.tolerances.wcond_threshold,
            delta: config.tolerances.delta,
            n_max: 6,
        },
    );
    record.push("wcond_value", Value::Float(validity.wcond_value));
    record.push("wcond_pass", Value::Bool(validity.wcond_pass));
    record.push("wcond_delta", Value::Float(validity.delta));
    record.push_float_array("moment_margins", &validity.moment_margins);
    record.push(
        "gauge_offset_applied",
        Value::Float(validity.gauge_offset_applied),
    );
}

/// Brute-force numbers for the configured setup: exact dense evolution for
/// finite detectors, grid refinement for Gaussian ones (where the spread of
/// the two finest grids is the quadrature error bar).
fn oracle_numbers(
    setup: &MeasurementSetup,
) -> Result<(f64, f64, f64, f64), CliError> {
    let post = setup.effective_postselection();
    match &setup.detector {
        DetectorModel::Gaussian(g) => {
            let result = oracle::measure_gaussian(
                g,
                setup.system.matrix(),
                post.matrix(),
                &setup.observable,
                setup.lambda,
                &oracle::DEFAULT_GRID_LEVELS,
            )
            .map_err(CliError::from_core_run)?;
            Ok((result.p_f, result.avg, result.p_f_error_bar, result.avg_error_bar))
        }
        DetectorModel::Discrete(d) => {
            let (p_op, q_op) = d.conjugate_pair();
            let (p_f, avg) = oracle::measure_dense(
                setup.system.matrix(),
                post.matrix(),
                &setup.observable,
                d.state(),
                &q_op,
                &p_op,
                setup.lambda,
            )
            .map_err(CliError::from_core_run)?;
            Ok((p_f, avg, 0.0, 0.0))
        }
        DetectorModel::Matrix(m) => {
            let (p_f, avg) = oracle::measure_dense(
                setup.system.matrix(),
                post.matrix(),
                &setup.observable,
                m.state(),
                m.coupling_op(),
                m.readout_op(),
                setup.lambda,
            )
            .map_err(CliError::from_core_run)?;
            Ok((p_f, avg, 0.0, 0.0))
        }
    }
}

fn cmd_measure(args: &CommonArgs, with_oracle: bool) -> Result<(), CliError> {
    let (config, hash) = load(args)?;
    let setup = config.setup()?;
    let result = engine::run(&setup).map_err(CliError::from_core_run)?;
    let wv = setup.weak_values().map_err(CliError::from_core_run)?;

    let mut record = Record::new("measure", &hash);
    record.push("lambda", Value::Float(setup.lambda));
    record.push_complex("a_w", wv.a_w.re, wv.a_w.im);
    record.push("b_w", Value::Float(wv.b_w));
    record.push_complex("c_w", wv.c_w.re, wv.c_w.im);
    record.push_complex("d_w", wv.d_w.re, wv.d_w.im);
    record.push("e_w", Value::Float(wv.e_w));
    push_measurement(&mut record, &result);
    push_validity(&mut record, &config, &setup);

    if with_oracle {
        let tol = args.tol.unwrap_or(config.tolerances.oracle);
        let (p_f, avg, p_f_bar, avg_bar) = oracle_numbers(&setup)?;
        let comparison = oracle::compare(&result, p_f, avg, tol);
        record.push("oracle_p_f", Value::Float(p_f));
        record.push("oracle_avg", Value::Float(avg));
        record.push("oracle_p_f_delta", Value::Float(comparison.p_f_delta));
        record.push("oracle_avg_delta", Value::Float(comparison.avg_delta));
        record.push("oracle_p_f_error_bar", Value::Float(p_f_bar));
        record.push("oracle_avg_error_bar", Value::Float(avg_bar));
        record.push("oracle_tol", Value::Float(tol));
    }
    emit_record(args, &config, record)
}

fn cmd_oracle_check(args: &CommonArgs) -> Result<(), CliError> {
    let (config, hash) = load(args)?;
    let setup = config.setup()?;
    let result = engine::run(&setup).map_err(CliError::from_core_run)?;
    let tol = args.tol.unwrap_or(config.tolerances.oracle);
    let (p_f, avg, p_f_bar, avg_bar) = oracle_numbers(&setup)?;
    // grid discretization error dominates the budget for continuous
    // detectors; the refinement spread sets the floor of the comparison
    let effective_tol = tol.max(2.0 * p_f_bar).max(2.0 * avg_bar);
    let comparison = oracle::compare(&result, p_f, avg, effective_tol);

    let mut record = Record::new("oracle-check", &hash);
    record.push("lambda", Value::Float(setup.lambda));
    record.push("engine_p_f", Value::Float(result.p_f));
    record.push("engine_avg", Value::Float(result.avg_output));
    record.push("oracle_p_f", Value::Float(p_f));
    record.push("oracle_avg", Value::Float(avg));
    record.push("p_f_delta", Value::Float(comparison.p_f_delta));
    record.push("avg_delta", Value::Float(comparison.avg_delta));
    record.push("p_f_relative", Value::Float(comparison.p_f_relative));
    record.push("avg_relative", Value::Float(comparison.avg_relative));
    record.push("p_f_error_bar", Value::Float(p_f_bar));
    record.push("avg_error_bar", Value::Float(avg_bar));
    record.push("tol", Value::Float(tol));
    record.push("effective_tol", Value::Float(effective_tol));
    record.push("pass", Value::Bool(comparison.pass));
    emit_record(args, &config, record)?;
    if !comparison.pass {
        return Err(CliError::internal(format!(
            "engine and oracle disagree beyond {effective_tol:.3e}: |ΔP_f| = {:.3e}, |Δ⟨O⟩| = {:.3e}",
            comparison.p_f_delta, comparison.avg_delta
        )));
    }
    Ok(())
}

fn cmd_sweep(args: &CommonArgs) -> Result<(), CliError> {
    let (config, hash) = load(args)?;
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::config("sweep command needs a [sweep] section"))?;
    require_csv(args, &config, "sweep")?;
    match sweep.parameter {
        SweepParameter::Lambda => sweep_lambda(args, &config, &hash),
        SweepParameter::SigmaQ => sweep_sigma_q(args, &config, &hash),
    }
}

fn sweep_grid(sweep: &config::SweepSection) -> Result<Vec<f64>, CliError> {
    match sweep.scale {
        SweepScale::Log => weak_limit::log_grid(sweep.from, sweep.to, sweep.steps)
            .map_err(CliError::from_core_config),
        SweepScale::Linear => {
            let step = (sweep.to - sweep.from) / (sweep.steps - 1) as f64;
            Ok((0..sweep.steps)
                .map(|k| sweep.from + k as f64 * step)
                .collect())
        }
    }
}

fn sweep_lambda(args: &CommonArgs, config: &RunConfig, hash: &str) -> Result<(), CliError> {
    let sweep = config.sweep.as_ref().expect("checked by caller");
    let setup = config.setup()?;
    let lambdas = sweep_grid(sweep)?;
    let scan = weak_limit::convergence_scan(&setup, &lambdas, (sweep.from, sweep.to))
        .map_err(CliError::from_core_run)?;

    let mut csv = Csv::new(
        "sweep:lambda",
        hash,
        &[
            "lambda",
            "exact_p_f",
            "exact_avg",
            "second_order_p_f",
            "second_order_avg",
            "interpolation_p_f",
            "interpolation_avg",
            "linear_p_f",
            "linear_avg",
            "abs_err_second_order",
            "abs_err_interpolation",
            "abs_err_linear",
            "wcond_value",
            "wcond_pass",
        ],
    );
    let offset = scan.readout_offset;
    for row in &scan.rows {
        let validity = weak_limit::validity_check(
            &setup.detector,
            row.lambda,
            ValidityOptions {
                wcond_threshold: config.tolerances.wcond_threshold,
                delta: config.tolerances.delta,
                n_max: 1,
            },
        );
        let linear_cells = match (&row.linear, row.err_linear) {
            (Some(l), Some(e)) => (
                fmt_f64(l.p_f),
                fmt_f64(l.avg + offset),
                fmt_f64(e),
            ),
            _ => (String::new(), String::new(), String::new()),
        };
        csv.row(&[
            fmt_f64(row.lambda),
            fmt_f64(row.exact_p_f),
            fmt_f64(row.exact_avg),
            fmt_f64(row.second_order.p_f),
            fmt_f64(row.second_order.avg + offset),
            fmt_f64(row.interpolation.p_f),
            fmt_f64(row.interpolation.avg + offset),
            linear_cells.0,
            linear_cells.1,
            fmt_f64(row.err_second_order),
            fmt_f64(row.err_interpolation),
            linear_cells.2,
            fmt_f64(validity.wcond_value),
            (validity.wcond_pass as u8).to_string(),
        ]);
    }
    let fmt_slope = |fit: &weak_limit::SlopeFit| match fit.slope {
        Some(s) => fmt_f64(s),
        None => format!("degenerate({} usable points)", fit.points_used),
    };
    let mut text = csv.finish()?;
    text.push_str(&format!(
        "# fitted_slope_second_order: {}\n# fitted_slope_interpolation: {}\n# fitted_slope_linear: {}\n",
        fmt_slope(&scan.slope_second_order),
        fmt_slope(&scan.slope_interpolation),
        fmt_slope(&scan.slope_linear),
    ));
    write_out(args.out.as_deref(), &text)
}

fn sweep_sigma_q(args: &CommonArgs, config: &RunConfig, hash: &str) -> Result<(), CliError> {
    let sweep = config.sweep.as_ref().expect("checked by caller");
    let base = config
        .detector
        .gaussian
        .as_ref()
        .ok_or_else(|| CliError::config("sigma_q sweeps need a Gaussian detector"))?;
    let observable = config.observable()?;
    let system = config.preparation(observable.dim())?;
    let post = config.postselection_operator(observable.dim())?;
    let grid = sweep_grid(sweep)?;

    let mut csv = Csv::new(
        "sweep:sigma_q",
        hash,
        &["sigma_q", "p_f", "avg_output", "wcond_value", "wcond_pass"],
    );
    for &sigma_q in &grid {
        let det = GaussianDetector::new(base.mean_q, base.mean_p, sigma_q, base.sigma_p, base.cov_qp)
            .map_err(|e| {
                CliError::config(format!("sigma_q sweep point {sigma_q}: {e}"))
            })?;
        let setup = MeasurementSetup::new(
            system.clone(),
            post.clone(),
            observable.clone(),
            DetectorModel::Gaussian(det),
            config.lambda,
            config.readout(),
        )
        .map_err(CliError::from_core_config)?
        .with_omega_floor(config.tolerances.omega_floor);
        let result = engine::run(&setup).map_err(CliError::from_core_run)?;
        let wcond = 2.0 * config.lambda.abs() * sigma_q;
        csv.row(&[
            fmt_f64(sigma_q),
            fmt_f64(result.p_f),
            fmt_f64(result.avg_output),
            fmt_f64(wcond),
            ((wcond < config.tolerances.wcond_threshold) as u8).to_string(),
        ]);
    }
    write_out(args.out.as_deref(), &csv.finish()?)
}

fn cmd_wigner(args: &CommonArgs) -> Result<(), CliError> {
    let (config, hash) = load(args)?;
    require_csv(args, &config, "wigner")?;
    let model = config.detector_model()?;
    let DetectorModel::Discrete(det) = model else {
        return Err(CliError::config(
            "the wigner command needs a discrete detector",
        ));
    };
    let table = det.wigner();
    let d = det.dim();
    let f = vn1_core::detector::fourier_basis(d);

    // marginal identities are re-verified before anything is written
    for j in 0..d {
        let expect = det.state()[(j, j)].re;
        if (table.p_marginal(j) - expect).abs() > 1e-12 {
            return Err(CliError::internal(format!(
                "readout marginal {j} deviates from the state diagonal by {:.3e}",
                (table.p_marginal(j) - expect).abs()
            )));
        }
    }
    for k in 0..d {
        let col = f.column(k);
        let expect = (col.adjoint() * det.state() * col)[(0, 0)].re;
        if (table.q_marginal(k) - expect).abs() > 1e-12 {
            return Err(CliError::internal(format!(
                "coupling marginal {k} deviates from the conjugate-basis diagonal by {:.3e}",
                (table.q_marginal(k) - expect).abs()
            )));
        }
    }

    let mut csv = Csv::new(
        "wigner",
        &hash,
        &[
            "j_index",
            "k_index",
            "p",
            "q",
            "q_root_scale",
            "w",
            "p_marginal",
            "q_marginal",
        ],
    );
    for j in 0..d {
        for k in 0..d {
            csv.row(&[
                j.to_string(),
                k.to_string(),
                fmt_f64(table.p_values[j]),
                fmt_f64(table.q_values[k]),
                fmt_f64(table.q_values_root_scale[k]),
                fmt_f64(table.value(j, k)),
                fmt_f64(table.p_marginal(j)),
                fmt_f64(table.q_marginal(k)),
            ]);
        }
    }
    write_out(args.out.as_deref(), &csv.finish()?)
}
