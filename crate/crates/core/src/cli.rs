//! Command-line driver: `analyze`, `validate` and `bench`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, Vector3};
use serde::Serialize;

use crate::analysis::{analyze, bench, validate, ValidateOptions};
use crate::error::{Error, Result};
use crate::model::RobotModel;
use crate::regressor::{write_binary, write_csv};
use crate::robots;
use crate::tolerance;

/// Exit code for a completed run whose criteria failed.
pub const EXIT_FAIL: i32 = 1;
/// Exit code for invalid input or a failed computation.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "baseparam", version, about = "Base inertial parameters of rigid multibody robots")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytical regressor nullspace and base-parameter count.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Write the nullspace basis matrix (`.bin` for binary, otherwise CSV).
        #[arg(long, value_name = "PATH")]
        export_nullspace: Option<PathBuf>,
    },
    /// Cross-check the analytical nullspace against sampled regressors.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Number of random samples.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Seed of the sample generator.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Samples with cond(J_p) at or above this value are rejected.
        #[arg(long, default_value_t = tolerance::DEFAULT_COND_GATE)]
        cond_gate: f64,
        /// Rank tolerance relative to the largest pivot or singular value.
        #[arg(long, default_value_t = tolerance::DEFAULT_RANK_TOL)]
        rank_tol: f64,
        /// Lower bounds of the actuated-coordinate sampling box.
        #[arg(long, value_name = "A,B,...", value_delimiter = ',', allow_hyphen_values = true)]
        q_min: Option<Vec<f64>>,
        /// Upper bounds of the actuated-coordinate sampling box.
        #[arg(long, value_name = "A,B,...", value_delimiter = ',', allow_hyphen_values = true)]
        q_max: Option<Vec<f64>>,
        /// Evaluate samples on one thread.
        #[arg(long)]
        sequential: bool,
        /// Write the stacked regressor (`.bin` for binary, otherwise CSV).
        #[arg(long, value_name = "PATH")]
        export_regressor: Option<PathBuf>,
    },
    /// Median wall time of the nullspace construction.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        repetitions: usize,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Robot description file, or the name of a bundled robot
    /// (puma560, go2, 2rru1rrs, 2prs1psr).
    pub robot: String,
    /// Apparent gravity acceleration `x,y,z` replacing the model's
    /// (`0,0,9.81` when gravity pulls along -z).
    #[arg(long, value_name = "X,Y,Z", value_parser = parse_vec3, allow_hyphen_values = true)]
    pub gravity: Option<Vector3<f64>>,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    /// `key,value` rows of the flattened report.
    Csv,
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',').map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"))).collect()
}

fn parse_vec3(s: &str) -> std::result::Result<Vector3<f64>, String> {
    match parse_list(s)?.as_slice() {
        &[x, y, z] => Ok(Vector3::new(x, y, z)),
        v => Err(format!("expected 3 comma-separated numbers, found {}", v.len())),
    }
}

/// Loads a robot from a file, falling back to the bundled robot of the
/// same name (with or without a `.json` suffix).
pub fn load_robot(arg: &str) -> Result<RobotModel> {
    let path = Path::new(arg);
    if path.exists() {
        return RobotModel::load(path);
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
    match robots::bundled(stem) {
        Some(model) => model,
        None => RobotModel::load(path),
    }
}

/// Flattens a JSON value into `key,value` rows with dotted keys.
pub fn to_key_value_csv(value: &serde_json::Value) -> String {
    fn walk(prefix: &str, v: &serde_json::Value, out: &mut String) {
        use serde_json::Value;
        let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(map) => map.iter().for_each(|(k, x)| walk(&key(k), x, out)),
            Value::Array(items) => items.iter().enumerate().for_each(|(i, x)| walk(&key(&i.to_string()), x, out)),
            Value::String(s) if s.contains([',', '"', '\n']) => {
                out.push_str(&format!("{prefix},\"{}\"\n", s.replace('"', "\"\"")))
            }
            Value::String(s) => out.push_str(&format!("{prefix},{s}\n")),
            other => out.push_str(&format!("{prefix},{other}\n")),
        }
    }
    let mut out = String::from("key,value\n");
    walk("", value, &mut out);
    out
}

fn render<T: Serialize>(report: &T, format: Format) -> String {
    let value = serde_json::to_value(report).expect("reports serialize");
    match format {
        Format::Json => serde_json::to_string_pretty(&value).expect("reports serialize") + "\n",
        Format::Csv => to_key_value_csv(&value),
    }
}

fn export(m: &DMatrix<f64>, path: &Path) -> Result<()> {
    if path.extension().is_some_and(|e| e == "bin") {
        write_binary(m, path)
    } else {
        write_csv(m, path)
    }
}

/// Runs a parsed command. Returns the rendered report and whether the run
/// passed.
pub fn execute(cli: &Cli) -> Result<(String, bool, Option<PathBuf>)> {
    let load = |c: &Common| -> Result<RobotModel> {
        let model = load_robot(&c.robot)?;
        Ok(match c.gravity {
            Some(g) => model.with_gravity(g),
            None => model,
        })
    };
    match &cli.command {
        Command::Analyze { common, export_nullspace } => {
            let a = analyze(&load(common)?)?;
            if let Some(p) = export_nullspace {
                export(&a.b_null, p)?;
            }
            Ok((render(&a.report, common.format), true, common.out.clone()))
        }
        Command::Validate {
            common,
            samples,
            seed,
            cond_gate,
            rank_tol,
            q_min,
            q_max,
            sequential,
            export_regressor,
        } => {
            let mut model = load(common)?;
            for (bound, field) in [(q_min, "q-min"), (q_max, "q-max")] {
                if let Some(v) = bound {
                    if v.len() != model.n_a() {
                        return Err(Error::InvalidArgument(format!(
                            "--{field} needs {} values, found {}",
                            model.n_a(),
                            v.len()
                        )));
                    }
                }
            }
            if let Some(v) = q_min {
                model.sampling.min = v.clone();
            }
            if let Some(v) = q_max {
                model.sampling.max = v.clone();
            }
            if model.sampling.min.iter().zip(&model.sampling.max).any(|(a, b)| a > b) {
                return Err(Error::InvalidArgument("sampling box has min > max".into()));
            }
            let opts = ValidateOptions {
                samples: *samples,
                seed: *seed,
                cond_gate: *cond_gate,
                rank_tol: *rank_tol,
                parallel: !sequential,
            };
            let v = validate(&model, &opts)?;
            if let Some(p) = export_regressor {
                export(&v.stacked.y, p)?;
            }
            Ok((render(&v.report, common.format), v.report.pass, common.out.clone()))
        }
        Command::Bench { common, repetitions } => {
            let r = bench(&load(common)?, *repetitions)?;
            Ok((render(&r, common.format), true, common.out.clone()))
        }
    }
}

/// Parses arguments, runs the command and writes its report. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { 0 };
        }
    };
    let (text, pass, out) = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    let written = match &out {
        Some(p) => std::fs::write(p, &text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_ERROR;
    }
    if pass {
        0
    } else {
        eprintln!("FAIL");
        EXIT_FAIL
    }
}
