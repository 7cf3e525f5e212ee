use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use texc_core::fan::{self, ValidateOptions};
use texc_core::mmp::{self, MmpOptions, DEFAULT_FLIP_GUARD};
use texc_core::{builtin, cohomology, collections, io, verify, Method, PipelineConfig, StackyFan};

/// Toric MMP and exceptional collections on toric DM stacks.
#[derive(Parser)]
#[command(name = "texc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FanArgs {
    /// Built-in fan name or path to a fan JSON file.
    #[arg(long)]
    fan: String,
    /// Seed for the completeness sweep in validation.
    #[arg(long)]
    seed: Option<u64>,
    /// Maximum number of flips before the program gives up.
    #[arg(long, env = "TEXC_FLIP_GUARD", default_value_t = DEFAULT_FLIP_GUARD)]
    flip_guard: usize,
}

impl FanArgs {
    fn load(&self) -> Result<StackyFan> {
        if let Some(f) = builtin::by_name(&self.fan) {
            return Ok(f);
        }
        let path = Path::new(&self.fan);
        if !path.exists() {
            bail!(
                "{:?} is neither a built-in fan ({}) nor a file",
                self.fan,
                builtin::NAMES.join(", ")
            );
        }
        let s = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        io::fan_from_json(&s).with_context(|| format!("parsing {}", path.display()))
    }

    fn validate_options(&self) -> ValidateOptions {
        let mut o = ValidateOptions::default();
        if let Some(s) = self.seed {
            o.seed = s;
        }
        o
    }

    fn mmp_options(&self) -> MmpOptions {
        MmpOptions {
            flip_guard: self.flip_guard,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Weight,
    Cech,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a fan and print diagnostics.
    CheckFan(FanArgs),
    /// List walls with their relations.
    Walls(FanArgs),
    /// Run the minimal model program.
    Mmp {
        #[command(flatten)]
        fan: FanArgs,
        /// Write the full step log here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Line bundle cohomology dimensions.
    Cohom {
        #[command(flatten)]
        fan: FanArgs,
        /// Divisor class, one integer per ray, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        class: Vec<i64>,
        #[arg(long, value_enum, default_value = "weight")]
        method: MethodArg,
    },
    /// Build an exceptional collection.
    Collection {
        #[command(flatten)]
        fan: FanArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a collection; exits nonzero on violations.
    Verify {
        #[command(flatten)]
        fan: FanArgs,
        #[arg(long)]
        collection: PathBuf,
    },
    /// Validate, run the MMP, build and verify.
    Pipeline {
        #[command(flatten)]
        fan: FanArgs,
        /// Directory for steps.json, collection.json and report.json.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn emit(v: &Value) {
    println!("{}", io::to_canonical_string(v));
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    fs::write(path, io::to_canonical_string(v) + "\n").with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::CheckFan(args) => {
            let f = args.load()?;
            let d = fan::validate_with(&f, &args.validate_options());
            let ok = d.is_ok();
            let mut out = json!({
                "ok": ok,
                "violations": d.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "fan": io::fan_to_value(&f),
            });
            if ok {
                out["picard_rank"] = json!(f.picard_rank());
                out["k0_rank"] = json!(fan::k0_rank(&f));
            }
            emit(&out);
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Walls(args) => {
            let f = args.load()?;
            let walls = fan::walls(&f)?;
            let out: Vec<Value> = walls
                .iter()
                .map(|w| {
                    let mut v = json!({ "wall_rays": w.wall_rays, "side_a": w.side_a, "side_b": w.side_b });
                    match mmp::wall_relation(&f, w) {
                        Ok(rel) => v["relation"] = io::relation_to_value(&rel),
                        Err(e) => v["error"] = json!(e.to_string()),
                    }
                    v
                })
                .collect();
            emit(&Value::Array(out));
            Ok(ExitCode::SUCCESS)
        }
        Command::Mmp { fan: args, trace } => {
            let f = args.load()?;
            fan::validate_with(&f, &args.validate_options()).into_result()?;
            let steps = mmp::run_mmp_with(&f, &args.mmp_options())?;
            let log: Vec<Value> = steps
                .iter()
                .map(|s| json!({ "kind": s.name(), "class": io::ints(&s.class), "relation": io::relation_to_value(s.relation()) }))
                .collect();
            if let Some(path) = trace {
                write_json(&path, &io::steps_to_value(&steps))?;
            }
            emit(&Value::Array(log));
            Ok(ExitCode::SUCCESS)
        }
        Command::Cohom {
            fan: args,
            class,
            method,
        } => {
            let f = args.load()?;
            if class.len() != f.n_rays() {
                bail!("--class needs {} entries, got {}", f.n_rays(), class.len());
            }
            let method = match method {
                MethodArg::Weight => Method::Weight,
                MethodArg::Cech => Method::Cech,
            };
            let t = cohomology::cohomology_dims(&f, &class, method)?;
            emit(&io::table_to_value(&t));
            Ok(ExitCode::SUCCESS)
        }
        Command::Collection { fan: args, out } => {
            let f = args.load()?;
            fan::validate_with(&f, &args.validate_options()).into_result()?;
            let c = collections::build_with(&f, &args.mmp_options())?;
            let v = io::collection_to_value(&c);
            match out {
                Some(path) => write_json(&path, &v)?,
                None => emit(&v),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { fan: args, collection } => {
            let f = args.load()?;
            let s = fs::read_to_string(&collection).with_context(|| format!("reading {}", collection.display()))?;
            let c = io::collection_from_json(&s).with_context(|| format!("parsing {}", collection.display()))?;
            let r = verify::verify_collection(&f, &c);
            emit(&io::report_to_value(&r));
            eprintln!("{}", r.human_summary());
            Ok(if r.has_violations() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Pipeline { fan: args, out_dir } => {
            let f = args.load()?;
            let cfg = PipelineConfig {
                mmp: args.mmp_options(),
                validate: args.validate_options(),
            };
            let out = texc_core::pipeline(&f, &cfg)?;
            let steps = io::steps_to_value(&out.steps);
            let coll = io::collection_to_value(&out.collection);
            let report = io::report_to_value(&out.report);
            if let Some(dir) = out_dir {
                fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                write_json(&dir.join("steps.json"), &steps)?;
                write_json(&dir.join("collection.json"), &coll)?;
                write_json(&dir.join("report.json"), &report)?;
            }
            emit(&json!({
                "steps": out.steps.iter().map(|s| s.name()).collect::<Vec<_>>(),
                "collection": coll,
                "summary": report["summary"],
                "cardinality": report["cardinality"],
            }));
            eprintln!("{}", out.report.human_summary());
            Ok(if out.report.has_violations() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
