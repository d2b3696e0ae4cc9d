//! The `hsn` command line: `solve`, `sweep` and `verify`.
//!
//! Exit codes: 0 success, 1 input error, 2 ill-posed frequencies, 3 failed
//! verification.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::halfspace::{synthesize, GridPoint, GridSpec, Problem, SolveOptions};
use crate::io::{read_frequency_field, write_report, write_solution_field, write_sweep_csv, write_synthesis, Manifest};
use crate::norms::{mode_norms, mode_norms_by_quadrature, norm_report};
use crate::operator::{make_biharmonic_rho, make_special_operator, slice_ellipticity, CoefTensor};
use crate::quadrature::QuadOptions;
use crate::symbol::{mode_basis, reduce, HalfSpace, ModeSolution, DEFAULT_ROOT_TOL};
use crate::verify::{
    continuation_certificate, duality_check, green_check, jump_check, linspace, random_field, random_frequency,
    random_self_adjoint, random_vector, rellich_check, solve_field, unit_frequencies, wellposedness_sweep,
    SweepOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_ILL_POSED: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Special,
    BiharmonicRho,
    File,
}

/// Fully resolved run configuration, echoed into every manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub operator: OperatorKind,
    pub operator_file: Option<PathBuf>,
    pub n: usize,
    pub m: u32,
    pub rho: f64,
    pub xi_min: f64,
    pub xi_max: f64,
    pub radial: usize,
    pub angular: usize,
    pub rtol: f64,
    pub root_tol: f64,
    pub quad_tol: f64,
    pub cond_max: f64,
    pub seed: u64,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.into()));
        if !(self.xi_min > 0.0 && self.xi_max > self.xi_min) {
            return bad("need 0 < xi_min < xi_max");
        }
        if self.n == 0 || self.m == 0 || self.radial == 0 || self.angular == 0 {
            return bad("n, m, radial and angular must be at least 1");
        }
        if !(self.rtol > 0.0 && self.root_tol > 0.0 && self.quad_tol > 0.0 && self.cond_max > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.operator == OperatorKind::File && self.operator_file.is_none() {
            return bad("--operator file requires --operator-file");
        }
        Ok(())
    }

    pub fn operator(&self) -> Result<CoefTensor> {
        match self.operator {
            OperatorKind::Special => Ok(make_special_operator(self.n, self.m)),
            OperatorKind::BiharmonicRho => Ok(make_biharmonic_rho(self.n, self.rho)),
            OperatorKind::File => {
                let path = self.operator_file.as_ref().expect("validated");
                let value: Value = serde_json::from_str(&fs::read_to_string(path)?)?;
                CoefTensor::from_json(&value)
            }
        }
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec {
            xi_min: self.xi_min,
            xi_max: self.xi_max,
            radial: self.radial,
            angular: self.angular,
        }
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            rtol: self.rtol,
            cond_max: self.cond_max,
            root_tol: self.root_tol,
        }
    }

    pub fn quad_options(&self) -> QuadOptions {
        QuadOptions {
            rel_tol: self.quad_tol,
            ..QuadOptions::default()
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hsn", version, about = "Half-space Neumann problems, one frequency at a time")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum, default_value = "special", global = true)]
    pub operator: OperatorKind,
    /// Coefficient tensor JSON for `--operator file`.
    #[arg(long, global = true)]
    pub operator_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1, global = true)]
    pub n: usize,
    #[arg(long, default_value_t = 2, global = true)]
    pub m: u32,
    #[arg(long, default_value_t = 0.0, global = true, allow_hyphen_values = true)]
    pub rho: f64,
    #[arg(long, default_value_t = 1e-3, global = true)]
    pub xi_min: f64,
    #[arg(long, default_value_t = 10.0, global = true)]
    pub xi_max: f64,
    #[arg(long, default_value_t = 48, global = true)]
    pub radial: usize,
    #[arg(long, default_value_t = 8, global = true)]
    pub angular: usize,
    #[arg(long, default_value_t = 1e-9, global = true)]
    pub rtol: f64,
    #[arg(long, default_value_t = DEFAULT_ROOT_TOL, global = true)]
    pub root_tol: f64,
    #[arg(long, default_value_t = 1e-9, global = true)]
    pub quad_tol: f64,
    #[arg(long, default_value_t = 1e12, global = true)]
    pub cond_max: f64,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[arg(long, default_value = "out", global = true)]
    pub out: PathBuf,
    /// JSON file whose keys override the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProblemKind {
    #[value(name = "neumann_L2")]
    NeumannL2,
    #[value(name = "neumann_rough")]
    NeumannRough,
    Dirichlet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    BiharmonicRho,
    Special,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Rellich,
    Jumps,
    Green,
    Adjoint,
    Continuation,
    Norms,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a boundary value problem for data given per frequency.
    Solve {
        /// CSV with columns xi_1..xi_n, weight, G0_re, G0_im, ...
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value = "neumann_L2")]
        problem: ProblemKind,
        #[arg(long, value_enum, default_value = "upper")]
        halfspace: Side,
    },
    /// Normalized smallest singular value of the Neumann symbol across a family.
    Sweep {
        #[arg(long, value_enum, default_value = "biharmonic-rho")]
        family: Family,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        /// Unit directions sampled per parameter value.
        #[arg(long, default_value_t = 8)]
        directions: usize,
    },
    /// Run one property suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Draw random self-adjoint perturbations of the special operator
        /// instead of using the configured operator.
        #[arg(long)]
        random_operators: bool,
    },
}

/// Merges the JSON object in `config` over the flag values.
pub fn resolve_config(common: &CommonArgs) -> Result<RunConfig> {
    let base = RunConfig {
        operator: common.operator,
        operator_file: common.operator_file.clone(),
        n: common.n,
        m: common.m,
        rho: common.rho,
        xi_min: common.xi_min,
        xi_max: common.xi_max,
        radial: common.radial,
        angular: common.angular,
        rtol: common.rtol,
        root_tol: common.root_tol,
        quad_tol: common.quad_tol,
        cond_max: common.cond_max,
        seed: common.seed,
        out: common.out.clone(),
    };
    let config = match &common.config {
        None => base,
        Some(path) => {
            let overrides: Value = serde_json::from_str(&fs::read_to_string(path)?)?;
            let Value::Object(overrides) = overrides else {
                return Err(Error::Malformed("config must be a JSON object".into()));
            };
            let mut merged = serde_json::to_value(&base)?;
            let object = merged.as_object_mut().expect("struct serializes to an object");
            for (k, v) in overrides {
                if !object.contains_key(&k) {
                    return Err(Error::Malformed(format!("unknown config key {k:?}")));
                }
                object.insert(k, v);
            }
            serde_json::from_value(merged)?
        }
    };
    config.validate()?;
    Ok(config)
}

/// Outcome of a command: exit code, a one-line summary and the files written.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub summary: String,
}

fn finish(config: &RunConfig, command: &str, inputs: &[&Path], outputs: &[&str], notes: Vec<String>) -> Result<()> {
    let mut manifest = Manifest::new(command, serde_json::to_value(config)?);
    for p in inputs {
        manifest.add_input(p)?;
    }
    manifest.outputs = outputs.iter().map(|s| s.to_string()).collect();
    manifest.notes = notes;
    manifest.write(&config.out)
}

pub fn cmd_solve(config: &RunConfig, data: &Path, problem: ProblemKind, side: Side) -> Result<Outcome> {
    let a = config.operator()?;
    let m = a.m() as usize;
    let field = read_frequency_field(data, m)?;
    if field.n != a.n() {
        return Err(Error::ShapeMismatch {
            expected: a.n(),
            found: field.n,
        });
    }
    let halfspace = match side {
        Side::Upper => HalfSpace::Upper,
        Side::Lower => HalfSpace::Lower,
    };
    let kind = match problem {
        ProblemKind::Dirichlet => Problem::Dirichlet,
        _ => Problem::Neumann,
    };
    let solved = solve_field(&a, &field, halfspace, kind, &config.solve_options())?;
    fs::create_dir_all(&config.out)?;
    write_solution_field(&config.out.join("solution.csv"), &solved, m)?;
    let n = a.n();
    let grid: Vec<GridPoint> = [0.0, 0.1, 0.5, 1.0, 2.0]
        .iter()
        .flat_map(|&t| {
            [-1.0, -0.5, 0.0, 0.5, 1.0].iter().map(move |&x| {
                let mut point = vec![0.0; n];
                point[0] = x;
                GridPoint {
                    x: point,
                    t: halfspace.sign() * t,
                }
            })
        })
        .collect();
    let values: Vec<Complex64> = synthesize(&solved, &grid, 0).into_iter().map(|v| v[0]).collect();
    write_synthesis(&config.out.join("synthesis.csv"), &grid, &values)?;
    let report = norm_report(&solved)?;
    write_report(&config.out.join("norms.json"), &report)?;
    let flagged = solved.samples.iter().filter(|s| !s.value.is_ok()).count();
    let problem_name = match problem {
        ProblemKind::NeumannL2 => "neumann_L2",
        ProblemKind::NeumannRough => "neumann_rough",
        ProblemKind::Dirichlet => "dirichlet",
    };
    let notes = vec![
        format!("problem: {problem_name}"),
        "neumann_L2_weighted and neumann_Wminus1_weighted are weighted L2 proxies for the dual norms".into(),
        format!("ill-posed frequencies: {flagged} of {}", solved.len()),
    ];
    finish(
        config,
        "solve",
        &[data],
        &["solution.csv", "synthesis.csv", "norms.json"],
        notes,
    )?;
    let code = if flagged > 0 { EXIT_ILL_POSED } else { EXIT_OK };
    Ok(Outcome {
        code,
        summary: format!("solved {} frequencies, {flagged} flagged ill-posed", solved.len() - flagged),
    })
}

pub fn cmd_sweep(config: &RunConfig, family: Family, from: f64, to: f64, steps: usize, directions: usize) -> Result<Outcome> {
    if steps == 0 || to < from || (steps > 1 && to == from) {
        return Err(Error::InvalidArgument("empty parameter range".into()));
    }
    let params = linspace(from, to, steps);
    let frequencies = unit_frequencies(config.n, directions);
    let opts = SweepOptions {
        root_tol: config.root_tol,
        ..SweepOptions::default()
    };
    let report = match family {
        Family::BiharmonicRho => wellposedness_sweep(|r| make_biharmonic_rho(config.n, r), &params, &frequencies, &opts)?,
        Family::Special => wellposedness_sweep(|_| make_special_operator(config.n, config.m), &params, &frequencies, &opts)?,
    };
    fs::create_dir_all(&config.out)?;
    write_sweep_csv(&config.out.join("sweep.csv"), &report)?;
    write_report(&config.out.join("sweep.json"), &report)?;
    let zeros = report
        .zeros
        .iter()
        .map(|z| format!("{z:.6}"))
        .collect::<Vec<_>>()
        .join(", ");
    finish(config, "sweep", &[], &["sweep.csv", "sweep.json"], vec![format!("zeros: [{zeros}]")])?;
    Ok(Outcome {
        code: EXIT_OK,
        summary: format!("{} parameter values, zeros at [{zeros}]", report.parameters.len()),
    })
}

/// Result of one verification suite.
#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub passed: bool,
    pub failure: Option<Value>,
    pub details: Value,
}

fn trial_operator(config: &RunConfig, random: bool, rng: &mut ChaCha8Rng) -> Result<(CoefTensor, f64)> {
    if random {
        random_self_adjoint(config.n, config.m, 0.3, 0.1, rng)
    } else {
        let a = config.operator()?;
        let lambda = slice_ellipticity(&a, 32)?.lambda_slice;
        Ok((a, lambda))
    }
}

fn run_suite(config: &RunConfig, suite: Suite, trials: usize, random: bool) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let quad = config.quad_options();
    let mut worst = 0.0f64;
    let mut failure = None;
    let mut record = |deviation: f64, tol: f64, context: Value, failure: &mut Option<Value>| {
        worst = worst.max(deviation);
        if !(deviation <= tol) && failure.is_none() {
            *failure = Some(context);
        }
    };
    let (name, tol, details) = match suite {
        Suite::Rellich => {
            let tol = 1e-9;
            let grid_spec = GridSpec {
                radial: config.radial.min(12),
                angular: config.angular.min(4),
                ..config.grid()
            };
            let mut margins = Vec::new();
            for trial in 0..trials {
                let (a, lambda) = trial_operator(config, random, &mut rng)?;
                let data = random_field(a.n(), a.m() as usize, &grid_spec, &mut rng)?;
                let field = solve_field(&a, &data, HalfSpace::Upper, Problem::Neumann, &config.solve_options())?;
                let report = rellich_check(&a, &field, lambda);
                let deviation = (-report.margin / (1.0 + report.rhs)).max(0.0);
                record(deviation, tol, json!({"trial": trial, "report": report}), &mut failure);
                margins.push(report.margin);
            }
            ("rellich", tol, json!({ "margins": margins }))
        }
        Suite::Jumps => {
            let tol = 1e-6;
            let mut single_worst = 0.0f64;
            for trial in 0..trials {
                let (a, _) = trial_operator(config, random, &mut rng)?;
                let xi = random_frequency(a.n(), &mut rng);
                let m = a.m() as usize;
                let g = random_vector(m, &mut rng);
                let f = random_vector(m, &mut rng);
                let r = jump_check(&a, &xi, &g, &f, quad)?;
                single_worst = single_worst.max(r.single_max());
                record(r.double_max(), tol, json!({"trial": trial, "xi": xi, "report": r}), &mut failure);
                record(r.single_max() * 1e3, tol, json!({"trial": trial, "xi": xi, "report": r}), &mut failure);
            }
            ("jumps", tol, json!({ "single_layer_max": single_worst }))
        }
        Suite::Green => {
            let tol = 1e-6;
            for trial in 0..trials {
                let (a, _) = trial_operator(config, random, &mut rng)?;
                let xi = random_frequency(a.n(), &mut rng);
                let sym = reduce(&a, &xi)?;
                let hs = if rng.gen_bool(0.5) { HalfSpace::Upper } else { HalfSpace::Lower };
                let basis = mode_basis(&sym, hs, config.root_tol)?;
                let w = ModeSolution::new(basis, random_vector(sym.m(), &mut rng));
                let s = sym.scale();
                let points: Vec<f64> = [0.05, 0.3, 1.0, 2.5, 6.0].iter().map(|t| t / s).collect();
                let (inside, outside) = green_check(&sym, &w, &points, quad)?;
                record(inside.max(outside), tol, json!({"trial": trial, "xi": xi, "inside": inside, "outside": outside}), &mut failure);
            }
            ("green", tol, Value::Null)
        }
        Suite::Adjoint => {
            let tol = 1e-6;
            for trial in 0..trials {
                let (a, _) = trial_operator(config, random, &mut rng)?;
                let xi = random_frequency(a.n(), &mut rng);
                let m = a.m() as usize;
                let v: Vec<Vec<Complex64>> = (0..4).map(|_| random_vector(m, &mut rng)).collect();
                let (single, double) = duality_check(&a, &xi, &v[0], &v[1], &v[2], &v[3], quad)?;
                record(single.max(double), tol, json!({"trial": trial, "xi": xi, "single": single, "double": double}), &mut failure);
            }
            ("adjoint", tol, Value::Null)
        }
        Suite::Continuation => {
            let a0 = make_special_operator(config.n, config.m);
            let a1 = config.operator()?;
            let report = continuation_certificate(&a0, &a1, &unit_frequencies(config.n, 8), 0.25)?;
            if !report.success {
                failure = Some(json!({
                    "failure_point": report.failure_point,
                    "frequency": report.failure_frequency,
                }));
                worst = 1.0;
            }
            ("continuation", 0.0, serde_json::to_value(&report)?)
        }
        Suite::Norms => {
            let tol = 1e-9;
            let opts = QuadOptions {
                rel_tol: 1e-12,
                ..quad
            };
            for trial in 0..trials {
                let (a, _) = trial_operator(config, random, &mut rng)?;
                let xi = random_frequency(a.n(), &mut rng);
                let sym = reduce(&a, &xi)?;
                let basis = mode_basis(&sym, HalfSpace::Upper, config.root_tol)?;
                let w = ModeSolution::new(basis, random_vector(sym.m(), &mut rng));
                let closed = mode_norms(&xi, sym.m(), &w)?;
                let (sf, rough) = mode_norms_by_quadrature(&xi, sym.m(), &w, opts)?;
                let dev = ((sf - closed.square_function).abs() / closed.square_function)
                    .max((rough - closed.square_function_rough).abs() / closed.square_function_rough);
                record(dev, tol, json!({"trial": trial, "xi": xi}), &mut failure);
            }
            ("norms", tol, Value::Null)
        }
    };
    Ok(SuiteReport {
        suite: name.into(),
        trials,
        tolerance: tol,
        max_deviation: worst,
        passed: failure.is_none(),
        failure,
        details,
    })
}

pub fn cmd_verify(config: &RunConfig, suite: Suite, trials: usize, random: bool) -> Result<Outcome> {
    let report = run_suite(config, suite, trials, random)?;
    fs::create_dir_all(&config.out)?;
    let file = format!("verify_{}.json", report.suite);
    write_report(&config.out.join(&file), &report)?;
    finish(config, "verify", &[], &[file.as_str()], vec![format!("suite: {}", report.suite)])?;
    let code = if report.passed { EXIT_OK } else { EXIT_VERIFY };
    let mut summary = format!(
        "{}: {} (max deviation {:e}, tolerance {:e})",
        report.suite,
        if report.passed { "pass" } else { "FAIL" },
        report.max_deviation,
        report.tolerance
    );
    if let Some(f) = &report.failure {
        summary.push_str(&format!("; failure: {f}"));
    }
    Ok(Outcome { code, summary })
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let result = resolve_config(&cli.common).and_then(|config| match cli.command {
        Command::Solve { data, problem, halfspace } => cmd_solve(&config, &data, problem, halfspace),
        Command::Sweep {
            family,
            from,
            to,
            steps,
            directions,
        } => cmd_sweep(&config, family, from, to, steps, directions),
        Command::Verify {
            suite,
            trials,
            random_operators,
        } => cmd_verify(&config, suite, trials, random_operators),
    });
    match result {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}
