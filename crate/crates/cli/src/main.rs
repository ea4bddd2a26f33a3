use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use texaux_core::auxfiles::{parse_index_line, sort_index, AuxError};
use texaux_core::bib::{
    format_reference, ingest_refs, render_entry, write_structured, EntryLayout,
};
use texaux_core::{build, BuildConfig, BuildError, RefsMode};

/// Cross-reference, numbering and bibliography builds for plain-TeX style
/// documents.
#[derive(Parser)]
#[command(name = "texaux", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build `<job>.tex` into `<job>.txt` and its side files.
    Build {
        /// Job name, optionally with a `.tex` extension.
        job: String,
        #[command(flatten)]
        opts: BuildOpts,
        /// Directory for the outputs (defaults to the job's directory).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Parse and validate a document without writing anything.
    Check {
        file: PathBuf,
        #[command(flatten)]
        opts: BuildOpts,
    },
    /// Reference file utilities.
    Refs {
        #[command(subcommand)]
        command: RefsCommand,
    },
    /// Index utilities.
    Index {
        #[command(subcommand)]
        command: IndexCommand,
    },
}

#[derive(Subcommand)]
enum RefsCommand {
    /// Format every entry of a reference file to standard output.
    Format {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Plain)]
        mode: Mode,
        #[arg(long)]
        html: bool,
        #[arg(long, default_value_t = 36)]
        key_width: usize,
        #[arg(long, default_value_t = 80)]
        line_width: usize,
    },
}

#[derive(Subcommand)]
enum IndexCommand {
    /// Merge and sort `<job>.inx` (or the given `.inx` file).
    Sort { job: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Plain,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Args, Default)]
struct BuildOpts {
    #[arg(long, value_enum)]
    subsections: Option<Switch>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    key_width: Option<usize>,
    #[arg(long)]
    line_width: Option<usize>,
    #[arg(long)]
    max_passes: Option<usize>,
    #[arg(long)]
    lines_per_page: Option<usize>,
    /// Write the table of contents from the start of the document.
    #[arg(long)]
    toc: bool,
    #[arg(long)]
    no_index: bool,
    #[arg(long)]
    html: bool,
    /// Checkpoint `.lab` of a previous part to continue from.
    #[arg(long)]
    seed: Option<PathBuf>,
    /// Reference file (defaults to `<job>.ref` when present).
    #[arg(long)]
    refs: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::validation(format!("{}: {e}", path.display())))
}

fn read_optional(path: &Path) -> Result<Option<String>, Failure> {
    if path.exists() {
        read(path).map(Some)
    } else {
        Ok(None)
    }
}

struct Job {
    name: String,
    doc: PathBuf,
    config: BuildConfig,
    refs_path: Option<PathBuf>,
    refs: Option<String>,
    seed: Option<String>,
}

fn prepare(doc: &Path, opts: &BuildOpts) -> Result<Job, Failure> {
    let stem = doc.with_extension("");
    let name = stem
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "job".to_string());
    let mut config = BuildConfig::new(&name);
    if let Some(cfg) = read_optional(&stem.with_extension("cfg"))? {
        config
            .apply_cfg(&cfg)
            .map_err(|e| Failure::validation(format!("{}.cfg: {e}", stem.display())))?;
    }
    if let Some(s) = opts.subsections {
        config.subsections = matches!(s, Switch::On);
    }
    if let Some(m) = opts.mode {
        config.refs_mode = match m {
            Mode::Plain => RefsMode::Plain,
            Mode::Structured => RefsMode::Structured,
        };
    }
    if let Some(v) = opts.key_width {
        config.key_width = v;
    }
    if let Some(v) = opts.line_width {
        config.line_width = v;
    }
    if let Some(v) = opts.max_passes {
        config.max_passes = v;
    }
    if let Some(v) = opts.lines_per_page {
        config.lines_per_page = v;
    }
    config.toc_enabled |= opts.toc;
    config.index_enabled &= !opts.no_index;
    config.html |= opts.html;

    let refs_path = match &opts.refs {
        Some(p) => Some(p.clone()),
        None => Some(stem.with_extension("ref")).filter(|p| p.exists()),
    };
    let refs = refs_path.as_deref().map(read).transpose()?;
    let seed = opts.seed.as_deref().map(read).transpose()?;
    Ok(Job {
        name,
        doc: doc.to_path_buf(),
        config,
        refs_path,
        refs,
        seed,
    })
}

fn document_path(job: &str) -> PathBuf {
    let path = PathBuf::from(job);
    if path.extension().is_some_and(|e| e == "tex") {
        path
    } else {
        PathBuf::from(format!("{job}.tex"))
    }
}

fn describe(job: &Job, err: &BuildError) -> String {
    let file = match err {
        BuildError::Bib(_) => job
            .refs_path
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_default(),
        BuildError::Seed(_) | BuildError::Config(_) => String::new(),
        _ => job.doc.display().to_string(),
    };
    if file.is_empty() {
        err.to_string()
    } else {
        format!("{file}:{err}")
    }
}

fn run_build(job: &str, opts: &BuildOpts, out_dir: Option<&Path>) -> Result<(), Failure> {
    let doc = document_path(job);
    let job = prepare(&doc, opts)?;
    let source = read(&job.doc)?;
    let outcome = build(
        &job.config,
        &source,
        job.refs.as_deref(),
        job.seed.as_deref(),
    )
    .map_err(|e| Failure::validation(describe(&job, &e)))?;
    let dir = match out_dir {
        Some(d) => d.to_path_buf(),
        None => job.doc.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    fs::create_dir_all(if dir.as_os_str().is_empty() {
        Path::new(".")
    } else {
        &dir
    })
    .map_err(|e| Failure::validation(format!("{}: {e}", dir.display())))?;
    for (name, contents) in &outcome.files {
        let path = dir.join(name);
        fs::write(&path, contents)
            .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
    }
    for w in &outcome.report.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!(
        "{}: {} pass(es), {}",
        job.name,
        outcome.report.passes_run,
        if outcome.report.stable {
            "stable"
        } else {
            "not converged"
        }
    );
    if !outcome.report.stable {
        return Err(Failure {
            code: 2,
            message: format!(
                "{}: no fixed point after {} passes",
                job.name, outcome.report.passes_run
            ),
        });
    }
    Ok(())
}

fn run_check(file: &Path, opts: &BuildOpts) -> Result<(), Failure> {
    let job = prepare(file, opts)?;
    let source = read(&job.doc)?;
    let outcome = build(
        &job.config,
        &source,
        job.refs.as_deref(),
        job.seed.as_deref(),
    )
    .map_err(|e| Failure::validation(describe(&job, &e)))?;
    if !outcome.report.stable {
        return Err(Failure {
            code: 2,
            message: format!("{}: no fixed point", file.display()),
        });
    }
    println!("{}: ok", file.display());
    Ok(())
}

fn run_refs_format(
    file: &Path,
    mode: Mode,
    html: bool,
    layout: EntryLayout,
) -> Result<(), Failure> {
    let text = read(file)?;
    let fail = |e: &dyn std::fmt::Display| Failure::validation(format!("{}:{e}", file.display()));
    let db = ingest_refs(&text).map_err(|e| fail(&e))?;
    for record in &db.records {
        match mode {
            Mode::Plain => {
                let body = format_reference(record).map_err(|e| fail(&e))?;
                if html {
                    println!("<p>[{}] {}</p>", record.mark, body.to_html());
                } else {
                    for line in render_entry(record, &body, layout) {
                        println!("{line}");
                    }
                }
            }
            Mode::Structured => {
                for line in write_structured(record).map_err(|e| fail(&e))? {
                    println!("{line}");
                }
            }
        }
    }
    Ok(())
}

fn run_index_sort(job: &str) -> Result<(), Failure> {
    let path = if job.ends_with(".inx") {
        PathBuf::from(job)
    } else {
        PathBuf::from(format!("{job}.inx"))
    };
    let text = read(&path)?;
    let entries = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_index_line(i + 1, l))
        .collect::<Result<Vec<_>, AuxError>>()
        .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
    for group in sort_index(&entries) {
        println!("{group}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build { job, opts, out_dir } => run_build(job, opts, out_dir.as_deref()),
        Command::Check { file, opts } => run_check(file, opts),
        Command::Refs {
            command:
                RefsCommand::Format {
                    file,
                    mode,
                    html,
                    key_width,
                    line_width,
                },
        } => run_refs_format(
            file,
            *mode,
            *html,
            EntryLayout {
                key_width: *key_width,
                line_width: *line_width,
            },
        ),
        Command::Index {
            command: IndexCommand::Sort { job },
        } => run_index_sort(job),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
