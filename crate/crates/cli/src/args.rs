//! Command-line surface and its merge with an optional JSON config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};
use tensordiag::{Field, LpParams};

use crate::literal::{self, PSpec};

/// Directory that receives `<command>.<format>` when `--out` is not given.
pub const OUT_DIR_ENV: &str = "TENSORDIAG_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "tensordiag",
    version,
    about = "Verification suites for diagonal tensors and orthogonally additive polynomials"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Degree (number of tensor factors).
    #[arg(long, global = true)]
    pub k: Option<u32>,
    /// Exponent of l_p, absolute (`3.5`) or relative to k (`k+1`, `2k`).
    #[arg(long, global = true)]
    pub p: Option<String>,
    /// Dimension of random instances.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Random cases per command, or per grid cell for `sweep`.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Tolerance override, e.g. `--tol numeric=1e-7`. Repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE", global = true)]
    pub tol: Vec<String>,
    /// Output file; stdout when absent and the output-directory variable is unset.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Worker threads for `sweep`. Does not affect the output.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// JSON file with defaults for any of the flags; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Record wall time per case (makes output run-dependent).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FieldArg {
    Real,
    #[default]
    Complex,
}

impl FieldArg {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldArg::Real => "real",
            FieldArg::Complex => "complex",
        }
    }
}

impl From<FieldArg> for Field {
    fn from(f: FieldArg) -> Field {
        match f {
            FieldArg::Real => Field::Real,
            FieldArg::Complex => Field::Complex,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact Rademacher product integrals over all level tuples.
    VerifyRademacher {
        /// Largest level.
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Projective norm of a diagonal tensor: closed form against both bounds.
    PiNorm(CoeffArgs),
    /// Norm of an orthogonally additive polynomial: closed form, witness and ascent.
    OaNorm {
        #[command(flatten)]
        coeffs: CoeffArgs,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long, value_enum)]
        field: Option<FieldArg>,
        /// Random unit vectors for the sup bound when p <= k.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Structural and behavioral orthogonal additivity.
    AdditivityTest {
        #[command(flatten)]
        coeffs: CoeffArgs,
        /// Disjoint pairs sampled per form.
        #[arg(long)]
        samples: Option<usize>,
        /// Run only this case of the random batch.
        #[arg(long, value_name = "CASE")]
        only_case: Option<usize>,
    },
    /// Diagonal of random symmetric forms against the estimated form norm.
    ZalduendoCheck {
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        iters: Option<usize>,
        /// Grid points for the cross-check oracle.
        #[arg(long)]
        grid_points: Option<usize>,
        #[arg(long, value_name = "CASE")]
        only_case: Option<usize>,
    },
    /// Random instances of every suite over a (k, p, n) grid.
    Sweep {
        #[arg(long, value_delimiter = ',')]
        ks: Option<Vec<u32>>,
        #[arg(long, value_delimiter = ',')]
        ps: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<usize>>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        iters: Option<usize>,
        /// Perturb the oracle of this case so its checks fail.
        #[arg(long, value_name = "CASE")]
        inject_failure: Option<usize>,
    },
}

#[derive(Debug, Args, Default)]
pub struct CoeffArgs {
    /// Comma-separated coefficients: `1,-2.5,3+4i`.
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    /// JSON array of coefficients (numbers, `[re, im]` or literal strings).
    #[arg(long)]
    pub coeffs_file: Option<PathBuf>,
}

/// Defaults that a config file may supply. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub k: Option<u32>,
    pub p: Option<Value>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    #[serde(default)]
    pub tol: BTreeMap<String, f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub workers: Option<usize>,
    pub timings: Option<bool>,
    pub depth: Option<u32>,
    pub coeffs: Option<Value>,
    pub restarts: Option<usize>,
    pub iters: Option<usize>,
    pub field: Option<FieldArg>,
    pub samples: Option<usize>,
    pub grid_points: Option<usize>,
    pub ks: Option<Vec<u32>>,
    pub ps: Option<Vec<Value>>,
    pub ns: Option<Vec<usize>>,
    pub inject_failure: Option<usize>,
    pub only_case: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Named tolerances with their defaults.
pub const DEFAULT_TOLERANCES: [(&str, f64); 11] = [
    ("sandwich", 1e-10),
    ("ordering", 1e-14),
    ("upper_low", 1e-12),
    ("witness", 1e-12),
    ("numeric", 1e-6),
    ("sup_bound", 1e-12),
    ("additivity", 1e-10),
    ("structural", 1e-12),
    ("extension", 1e-10),
    ("zalduendo", 1e-6),
    ("grid", 1e-4),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Self(
            DEFAULT_TOLERANCES
                .iter()
                .map(|&(k, v)| (k.to_string(), v))
                .collect(),
        )
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<(), String> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(format!(
                "tolerance {name} must be finite and nonnegative, got {value}"
            ));
        }
        match self.0.get_mut(name) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(format!(
                "unknown tolerance {name:?}; known: {}",
                DEFAULT_TOLERANCES.map(|(k, _)| k).join(", ")
            )),
        }
    }

    /// Parses `name=value`.
    pub fn apply(&mut self, assignment: &str) -> Result<(), String> {
        let (name, value) = assignment
            .split_once('=')
            .ok_or_else(|| format!("expected NAME=VALUE, got {assignment:?}"))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| format!("bad tolerance value in {assignment:?}"))?;
        self.set(name.trim(), value)
    }

    pub fn to_json(&self) -> Value {
        json!(self.0)
    }
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone)]
pub struct Config {
    pub command: CommandConfig,
    pub k: u32,
    pub p: PSpec,
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    pub tol: Tolerances,
    pub out: Output,
    pub format: Format,
    pub workers: usize,
    pub timings: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Stdout,
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub enum CommandConfig {
    VerifyRademacher {
        depth: u32,
    },
    PiNorm {
        coeffs: Option<Vec<Complex64>>,
    },
    OaNorm {
        coeffs: Option<Vec<Complex64>>,
        restarts: usize,
        iters: usize,
        field: FieldArg,
        samples: usize,
    },
    AdditivityTest {
        coeffs: Option<Vec<Complex64>>,
        samples: usize,
        only_case: Option<usize>,
    },
    ZalduendoCheck {
        restarts: usize,
        iters: usize,
        grid_points: usize,
        only_case: Option<usize>,
    },
    Sweep {
        ks: Vec<u32>,
        ps: Vec<PSpec>,
        ns: Vec<usize>,
        restarts: usize,
        iters: usize,
        inject_failure: Option<usize>,
    },
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::VerifyRademacher { .. } => "verify-rademacher",
            CommandConfig::PiNorm { .. } => "pi-norm",
            CommandConfig::OaNorm { .. } => "oa-norm",
            CommandConfig::AdditivityTest { .. } => "additivity-test",
            CommandConfig::ZalduendoCheck { .. } => "zalduendo-check",
            CommandConfig::Sweep { .. } => "sweep",
        }
    }
}

fn pspec_from_value(v: &Value) -> Result<PSpec, String> {
    match v {
        Value::Number(x) => x
            .as_f64()
            .map(PSpec::Absolute)
            .ok_or_else(|| format!("bad exponent {x}")),
        Value::String(s) => PSpec::parse(s),
        other => Err(format!("bad exponent {other}")),
    }
}

fn coeffs_from(args: &CoeffArgs, file: &FileConfig) -> Result<Option<Vec<Complex64>>, String> {
    if let Some(s) = &args.coeffs {
        return literal::parse_scalar_list(s).map(Some);
    }
    if let Some(path) = &args.coeffs_file {
        return literal::scalars_from_file(path).map(Some);
    }
    match &file.coeffs {
        None => Ok(None),
        Some(Value::String(s)) => literal::parse_scalar_list(s).map(Some),
        Some(v) => literal::scalars_from_json(v).map(Some),
    }
}

fn positive(name: &str, v: usize) -> Result<usize, String> {
    if v == 0 {
        Err(format!("{name} must be at least 1"))
    } else {
        Ok(v)
    }
}

impl Config {
    /// Merges flags over the config file over built-in defaults and validates.
    pub fn resolve(cli: Cli) -> Result<Self, String> {
        let common = cli.common;
        let file = match &common.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };

        let k = common.k.or(file.k).unwrap_or(2);
        let p = match (&common.p, &file.p) {
            (Some(s), _) => PSpec::parse(s)?,
            (None, Some(v)) => pspec_from_value(v)?,
            (None, None) => PSpec::Relative {
                scale: 2.0,
                shift: 0.0,
            },
        };
        let n = common.n.or(file.n).unwrap_or(4);
        let seed = common.seed.or(file.seed).unwrap_or(0);
        let trials = positive("trials", common.trials.or(file.trials).unwrap_or(50))?;

        let mut tol = Tolerances::default();
        for (name, &value) in &file.tol {
            tol.set(name, value)?;
        }
        for assignment in &common.tol {
            tol.apply(assignment)?;
        }

        let format = common.format.or(file.format).unwrap_or_default();
        let workers = positive(
            "workers",
            common
                .workers
                .or(file.workers)
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
        )?;
        let timings = common.timings || file.timings.unwrap_or(false);

        let command = match cli.command {
            Command::VerifyRademacher { depth } => CommandConfig::VerifyRademacher {
                depth: depth.or(file.depth).unwrap_or(3),
            },
            Command::PiNorm(args) => CommandConfig::PiNorm {
                coeffs: coeffs_from(&args, &file)?,
            },
            Command::OaNorm {
                coeffs,
                restarts,
                iters,
                field,
                samples,
            } => CommandConfig::OaNorm {
                coeffs: coeffs_from(&coeffs, &file)?,
                restarts: positive("restarts", restarts.or(file.restarts).unwrap_or(20))?,
                iters: positive("iters", iters.or(file.iters).unwrap_or(500))?,
                field: field.or(file.field).unwrap_or_default(),
                samples: samples.or(file.samples).unwrap_or(10_000),
            },
            Command::AdditivityTest {
                coeffs,
                samples,
                only_case,
            } => CommandConfig::AdditivityTest {
                coeffs: coeffs_from(&coeffs, &file)?,
                samples: positive("samples", samples.or(file.samples).unwrap_or(16))?,
                only_case: only_case.or(file.only_case),
            },
            Command::ZalduendoCheck {
                restarts,
                iters,
                grid_points,
                only_case,
            } => CommandConfig::ZalduendoCheck {
                only_case: only_case.or(file.only_case),
                restarts: positive("restarts", restarts.or(file.restarts).unwrap_or(20))?,
                iters: positive("iters", iters.or(file.iters).unwrap_or(500))?,
                grid_points: positive(
                    "grid-points",
                    grid_points.or(file.grid_points).unwrap_or(100_000),
                )?,
            },
            Command::Sweep {
                ks,
                ps,
                ns,
                restarts,
                iters,
                inject_failure,
            } => {
                let ps = match (ps, &file.ps) {
                    (Some(ps), _) => ps
                        .iter()
                        .map(|s| PSpec::parse(s))
                        .collect::<Result<_, _>>()?,
                    (None, Some(ps)) => {
                        ps.iter().map(pspec_from_value).collect::<Result<_, _>>()?
                    }
                    (None, None) => vec![
                        PSpec::Relative {
                            scale: 1.0,
                            shift: 1.0,
                        },
                        PSpec::Relative {
                            scale: 2.0,
                            shift: 0.0,
                        },
                    ],
                };
                let sweep = CommandConfig::Sweep {
                    ks: ks.or(file.ks.clone()).unwrap_or_else(|| vec![2, 3]),
                    ps,
                    ns: ns.or(file.ns.clone()).unwrap_or_else(|| vec![2, 4, 8]),
                    restarts: positive("restarts", restarts.or(file.restarts).unwrap_or(20))?,
                    iters: positive("iters", iters.or(file.iters).unwrap_or(500))?,
                    inject_failure: inject_failure.or(file.inject_failure),
                };
                if let CommandConfig::Sweep { ks, ps, ns, .. } = &sweep {
                    if ks.is_empty() || ps.is_empty() || ns.is_empty() {
                        return Err("sweep grid axes must be nonempty".into());
                    }
                    for &k in ks {
                        for p in ps {
                            LpParams::new(p.resolve(k), k).map_err(|e| e.to_string())?;
                        }
                    }
                }
                sweep
            }
        };

        // single-instance commands need valid (p, k) up front
        if !matches!(command, CommandConfig::Sweep { .. }) {
            LpParams::new(p.resolve(k), k).map_err(|e| e.to_string())?;
        }

        let out = match common.out.or(file.out) {
            Some(path) => Output::File(path),
            None => match std::env::var_os(OUT_DIR_ENV) {
                Some(dir) if !dir.is_empty() => {
                    let ext = match format {
                        Format::Json => "json",
                        Format::Csv => "csv",
                    };
                    Output::File(PathBuf::from(dir).join(format!("{}.{ext}", command.name())))
                }
                _ => Output::Stdout,
            },
        };

        Ok(Self {
            command,
            k,
            p,
            n,
            seed,
            trials,
            tol,
            out,
            format,
            workers,
            timings,
        })
    }

    pub fn params(&self) -> LpParams {
        LpParams::new(self.p.resolve(self.k), self.k).expect("validated in resolve")
    }

    /// Echo of the settings that determine the results. Output location
    /// and worker count are left out so they cannot change the bytes.
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "command": self.command.name(),
            "k": self.k,
            "p": self.p.to_string(),
            "n": self.n,
            "seed": self.seed,
            "trials": self.trials,
            "tol": self.tol.to_json(),
        });
        let extra = match &self.command {
            CommandConfig::VerifyRademacher { depth } => json!({ "depth": depth }),
            CommandConfig::PiNorm { coeffs } => {
                json!({ "coeffs": coeffs.as_deref().map(literal::format_scalar_list) })
            }
            CommandConfig::OaNorm {
                coeffs,
                restarts,
                iters,
                field,
                samples,
            } => json!({
                "coeffs": coeffs.as_deref().map(literal::format_scalar_list),
                "restarts": restarts,
                "iters": iters,
                "field": field.as_str(),
                "samples": samples,
            }),
            CommandConfig::AdditivityTest {
                coeffs,
                samples,
                only_case,
            } => json!({
                "coeffs": coeffs.as_deref().map(literal::format_scalar_list),
                "samples": samples,
                "only_case": only_case,
            }),
            CommandConfig::ZalduendoCheck {
                restarts,
                iters,
                grid_points,
                only_case,
            } => json!({
                "restarts": restarts,
                "iters": iters,
                "grid_points": grid_points,
                "only_case": only_case,
            }),
            CommandConfig::Sweep {
                ks,
                ps,
                ns,
                restarts,
                iters,
                inject_failure,
            } => json!({
                "ks": ks,
                "ps": ps.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "ns": ns,
                "restarts": restarts,
                "iters": iters,
                "inject_failure": inject_failure,
            }),
        };
        if let (Value::Object(base), Value::Object(extra)) = (&mut v, extra) {
            base.extend(extra);
        }
        v
    }
}
