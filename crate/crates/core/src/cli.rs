//! Command-line front end. `run` is the whole program; `main.rs` only maps
//! its return value to the process exit code.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analysis::{self, PhraseUnit};
use crate::caption::{self, BuildConfig, CaptionRecord, CleaningConfig, Split, SplitConfig};
use crate::error::{Error, Result};
use crate::iconclass::{load_annotations, CorrelateStore, IconclassNotation};
use crate::io::{read_caption_jsonl, read_jsonl, write_caption_jsonl, write_jsonl};
use crate::metrics::{self, EvalConfig, MeteorParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "iconcap",
    version,
    about = "Iconclass caption dataset and evaluation toolkit"
)]
struct Cli {
    /// Seed for every random choice (dataset splits).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write a JSON run report (tool version, resolved config, results).
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Present scores multiplied by 100.
    #[arg(long, global = true)]
    x100: bool,
    /// Suppress diagnostics on standard error.
    #[arg(long, global = true)]
    quiet: bool,
    /// Worker threads for parallel stages (default: logical cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse one notation and print its structure as JSON.
    Parse { code: String },
    /// Build caption records from annotations and correlates.
    Build(BuildArgs),
    /// Assign train/val/test splits to caption records.
    Split(SplitArgs),
    /// Score candidate captions against references.
    Eval(EvalArgs),
    /// Caption analyses.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Caption every id with the most frequent training caption.
    Baseline(BaselineArgs),
}

#[derive(Debug, Args)]
struct BuildArgs {
    /// Image-to-notations JSON object.
    #[arg(long)]
    annotations: PathBuf,
    /// Correlate table: TSV (`notation<TAB>text`) or `.json`.
    #[arg(long)]
    correlates: PathBuf,
    /// Caption records JSONL.
    #[arg(long)]
    out: PathBuf,
    /// Uppercase codes removed as `- CODE -` runs.
    #[arg(long, value_delimiter = ',', default_value = "BB")]
    stoplist: Vec<String>,
    /// Keep literal ", etc." in descriptions.
    #[arg(long)]
    keep_etc: bool,
    /// Keep repeated comma-separated segments.
    #[arg(long)]
    no_dedup: bool,
    /// Resolve missing codes through their parent notations.
    #[arg(long)]
    fallback: bool,
}

#[derive(Debug, Args)]
struct SplitArgs {
    /// Caption records written by `build`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Validation images.
    #[arg(long, default_value_t = 5_000)]
    val: usize,
    /// Test images.
    #[arg(long, default_value_t = 5_000)]
    test: usize,
    /// Receives records.jsonl, train.jsonl, val.jsonl and test.jsonl.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MeteorPreset {
    Universal,
    Classic,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Candidate caption JSONL (`image_id`, `caption`).
    #[arg(long)]
    candidates: PathBuf,
    /// Reference caption JSONL; repeated ids become multiple references.
    #[arg(long)]
    references: PathBuf,
    /// Also write the report as JSON to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-example scores as CSV to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// METEOR parameter preset.
    #[arg(long, value_enum, default_value = "universal")]
    meteor: MeteorPreset,
    /// Score punctuation tokens too.
    #[arg(long)]
    keep_punctuation: bool,
    /// Substitute for a zero BLEU n-gram precision.
    #[arg(long, default_value_t = metrics::DEFAULT_SMOOTHING_EPSILON)]
    epsilon: f64,
    /// ROUGE-L recall weight.
    #[arg(long, default_value_t = metrics::DEFAULT_BETA)]
    beta: f64,
}

#[derive(Debug, Subcommand)]
enum AnalyzeCommand {
    /// Phrase × genre distribution as CSV.
    Genres {
        /// `image_id,genre` CSV with header.
        #[arg(long)]
        genres: PathBuf,
        /// Caption JSONL (`image_id`, `caption`).
        #[arg(long)]
        captions: PathBuf,
        /// Number of phrases kept; 0 keeps all.
        #[arg(long, default_value_t = 20)]
        k: usize,
        /// Phrase unit: whole captions or comma-separated segments.
        #[arg(long, value_enum, default_value = "segment")]
        unit: PhraseUnit,
        /// Write the CSV matrix here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Caption length statistics as JSON.
    Lengths {
        #[arg(long)]
        captions: PathBuf,
    },
}

#[derive(Debug, Args)]
struct BaselineArgs {
    /// Training caption JSONL.
    #[arg(long)]
    train: PathBuf,
    /// Ids to caption: JSONL with `image_id`, or one id per line.
    #[arg(long)]
    ids: PathBuf,
    /// Output caption JSONL.
    #[arg(long)]
    out: PathBuf,
}

struct Context<'a> {
    cli: &'a Cli,
    stdout: &'a mut (dyn Write + Send),
    stderr: &'a mut (dyn Write + Send),
}

impl Context<'_> {
    fn print(&mut self, text: &str) -> Result<()> {
        writeln!(self.stdout, "{text}").map_err(|e| Error::io("<stdout>", e))
    }

    fn log(&mut self, text: &str) {
        if !self.cli.quiet {
            let _ = writeln!(self.stderr, "{text}");
        }
    }

    fn report(&mut self, command: &str, config: Value, results: Value) -> Result<()> {
        let Some(path) = &self.cli.report else {
            return Ok(());
        };
        let mut report = json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "config": config,
        });
        if let (Value::Object(out), Value::Object(fields)) = (&mut report, results) {
            out.extend(fields);
        }
        write_text(
            path,
            &format!("{}\n", serde_json::to_string_pretty(&report).expect("json")),
        )
    }

    fn globals(&self) -> Value {
        json!({
            "seed": self.cli.seed,
            "x100": self.cli.x100,
            "jobs": self.cli.jobs,
        })
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Runs the CLI: 0 on success, 1 on a domain error, 2 on a usage error.
pub fn run<I, T>(args: I, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };

    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start worker pool: {e}");
            return EXIT_DOMAIN;
        }
    };
    let mut ctx = Context {
        cli: &cli,
        stdout,
        stderr,
    };
    match pool.install(|| dispatch(&mut ctx)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(ctx.stderr, "error: {e}");
            EXIT_DOMAIN
        }
    }
}

fn dispatch(ctx: &mut Context<'_>) -> Result<()> {
    match &ctx.cli.command {
        Command::Parse { code } => {
            let notation = IconclassNotation::parse(code)?;
            ctx.print(&serde_json::to_string(&notation).expect("json"))
        }
        Command::Build(args) => build(ctx, args),
        Command::Split(args) => split(ctx, args),
        Command::Eval(args) => eval(ctx, args),
        Command::Analyze(cmd) => analyze(ctx, cmd),
        Command::Baseline(args) => baseline(ctx, args),
    }
}

fn build(ctx: &mut Context<'_>, args: &BuildArgs) -> Result<()> {
    let cfg = BuildConfig {
        cleaning: CleaningConfig {
            uppercase_stoplist: args
                .stoplist
                .iter()
                .filter(|s| !s.is_empty())
                .cloned()
                .collect(),
            drop_etc: !args.keep_etc,
            dedup: !args.no_dedup,
        },
        parent_fallback: args.fallback,
    };
    cfg.cleaning.validate()?;
    let annotations = load_annotations(&args.annotations)?;
    let store = CorrelateStore::load(&args.correlates)?;
    let (mut records, report) = caption::build_dataset(&annotations, &store, &cfg)?;
    records.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    write_jsonl(&args.out, &records)?;

    let summary = serde_json::to_value(report).expect("json");
    if ctx.cli.report.is_some() {
        let config = json!({
            "globals": ctx.globals(),
            "annotations": args.annotations,
            "correlates": args.correlates,
            "out": args.out,
            "build": cfg,
        });
        ctx.report("build", config, summary)
    } else {
        ctx.log(&serde_json::to_string(&summary).expect("json"));
        Ok(())
    }
}

fn split(ctx: &mut Context<'_>, args: &SplitArgs) -> Result<()> {
    let cfg = SplitConfig {
        seed: ctx.cli.seed,
        n_val: args.val,
        n_test: args.test,
    };
    let records: Vec<CaptionRecord> = read_jsonl(&args.input)?;
    let records = caption::assign_splits(records, &cfg)?;
    fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    write_jsonl(args.out_dir.join("records.jsonl"), &records)?;
    let mut counts = serde_json::Map::new();
    for s in [Split::Train, Split::Val, Split::Test] {
        let n = caption::export_jsonl(
            &records,
            args.out_dir.join(format!("{}.jsonl", s.as_str())),
            Some(s),
        )?;
        counts.insert(s.as_str().to_string(), n.into());
    }
    let counts = Value::Object(counts);
    ctx.print(&serde_json::to_string(&counts).expect("json"))?;
    let config = json!({
        "globals": ctx.globals(),
        "in": args.input,
        "out_dir": args.out_dir,
        "split": cfg,
    });
    ctx.report("split", config, json!({ "counts": counts }))
}

fn eval(ctx: &mut Context<'_>, args: &EvalArgs) -> Result<()> {
    let cfg = EvalConfig {
        smoothing_epsilon: args.epsilon,
        rouge_beta: args.beta,
        meteor: match args.meteor {
            MeteorPreset::Universal => MeteorParams::universal(),
            MeteorPreset::Classic => MeteorParams::classic(),
        },
        strip_punctuation: !args.keep_punctuation,
    };
    let mut report = metrics::evaluate(&args.candidates, &args.references, &cfg)?;
    if ctx.cli.x100 {
        report = report.x100();
    }
    let text = report.to_json();
    if let Some(path) = &args.out {
        write_text(path, &format!("{text}\n"))?;
    }
    if let Some(path) = &args.csv {
        write_text(path, &report.to_csv())?;
    }
    ctx.print(&text)?;
    let config = json!({
        "globals": ctx.globals(),
        "candidates": args.candidates,
        "references": args.references,
        "eval": cfg,
    });
    ctx.report("eval", config, json!({ "corpus": report.corpus }))
}

fn analyze(ctx: &mut Context<'_>, cmd: &AnalyzeCommand) -> Result<()> {
    match cmd {
        AnalyzeCommand::Genres {
            genres,
            captions,
            k,
            unit,
            out,
        } => {
            let labels = analysis::load_genres(genres)?;
            let caps = read_caption_jsonl(captions)?;
            let records = analysis::join_genres(&labels, &caps);
            let dist = analysis::genre_distribution(&records, (*k > 0).then_some(*k), *unit)?;
            let csv = dist.to_csv();
            match out {
                Some(path) => write_text(path, &csv)?,
                None => write!(ctx.stdout, "{csv}").map_err(|e| Error::io("<stdout>", e))?,
            }
            let config = json!({
                "globals": ctx.globals(),
                "genres": genres,
                "captions": captions,
                "k": k,
                "unit": unit,
            });
            ctx.report(
                "analyze genres",
                config,
                json!({ "records": records.len(), "phrases": dist.phrases.len() }),
            )
        }
        AnalyzeCommand::Lengths { captions } => {
            let caps = read_caption_jsonl(captions)?;
            let texts: Vec<&str> = caps.iter().map(|c| c.caption.as_str()).collect();
            let stats = analysis::length_stats(&texts);
            let stats = serde_json::to_value(&stats).expect("json");
            ctx.print(&serde_json::to_string_pretty(&stats).expect("json"))?;
            let config = json!({ "globals": ctx.globals(), "captions": captions });
            ctx.report("analyze lengths", config, json!({ "lengths": stats }))
        }
    }
}

fn read_ids(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|line| {
            serde_json::from_str::<Value>(line)
                .ok()
                .and_then(|v| v.get("image_id").and_then(Value::as_str).map(String::from))
                .unwrap_or_else(|| line.to_string())
        })
        .collect())
}

fn baseline(ctx: &mut Context<'_>, args: &BaselineArgs) -> Result<()> {
    let train = read_caption_jsonl(&args.train)?;
    let captions: Vec<&str> = train.iter().map(|l| l.caption.as_str()).collect();
    let ids = read_ids(&args.ids)?;
    let lines = analysis::frequency_baseline(&captions, &ids)?;
    write_caption_jsonl(&args.out, &lines)?;
    ctx.log(&format!(
        "baseline: {} captions written to {}",
        lines.len(),
        args.out.display()
    ));
    let config = json!({
        "globals": ctx.globals(),
        "train": args.train,
        "ids": args.ids,
        "out": args.out,
    });
    ctx.report("baseline", config, json!({ "written": lines.len() }))
}
