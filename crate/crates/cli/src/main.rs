//! `pfold`: generate, enumerate, validate, solve, verify, score and render
//! paper-folding tasks.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pfold_core::{Facing, Family, HoleAttribute, LabelMode, Modality};

#[derive(Parser)]
#[command(name = "pfold", version, about = "Paper-folding task engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate tasks of one family.
    Generate(GenerateArgs),
    /// Generate the four standard corpora in one run.
    Dataset(DatasetArgs),
    /// Count (and optionally list) the valid sequences of a group.
    Enumerate(EnumerateArgs),
    /// Check an action sequence against the fold rules.
    Validate(ValidateArgs),
    /// Solve a task file, or every task under a directory.
    Solve(SolveArgs),
    /// Execute a plan and compare it with a planning task's target.
    Verify(VerifyArgs),
    /// Score answer files against their tasks.
    Score(ScoreArgs),
    /// Render a task as SVG (and optionally text).
    Render(RenderArgs),
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output root.
    #[arg(long, env = "PFOLD_OUT", default_value = "pfold-out")]
    out: PathBuf,
    /// Worker threads; output bytes do not depend on it.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Sidecar encodings: text, 2d, frames.
    #[arg(long, value_delimiter = ',', value_parser = parse_format)]
    formats: Vec<Format>,
    #[arg(long, default_value = "geometric", value_parser = parse_label_mode)]
    label_mode: LabelMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    TwoD,
    Frames,
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "text" => Ok(Format::Text),
        "2d" | "svg" => Ok(Format::TwoD),
        "frames" => Ok(Format::Frames),
        _ => Err(format!("unknown format {s:?} (text, 2d, frames)")),
    }
}

fn parse_label_mode(s: &str) -> Result<LabelMode, String> {
    s.parse().map_err(|e: pfold_core::Error| e.to_string())
}

/// Parsed `--groups` value; a newtype so clap treats it as one value.
#[derive(Clone)]
struct GroupList(Vec<u8>);

fn parse_groups(s: &str) -> Result<GroupList, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let (lo, hi) = part.split_once('-').unwrap_or((part, part));
        let lo: u8 = lo.trim().parse().map_err(|_| format!("bad group {part:?}"))?;
        let hi: u8 = hi.trim().parse().map_err(|_| format!("bad group {part:?}"))?;
        if lo == 0 || hi > 9 || lo > hi {
            return Err(format!("group range {part:?} outside 1-9"));
        }
        out.extend(lo..=hi);
    }
    out.sort_unstable();
    out.dedup();
    Ok(GroupList(out))
}

fn parse_holes(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s.split_once('-').unwrap_or((s, s));
    let lo = lo.parse().map_err(|_| format!("bad hole range {s:?}"))?;
    let hi = hi.parse().map_err(|_| format!("bad hole range {s:?}"))?;
    Ok((lo, hi))
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: pfold_core::Error| e.to_string())
}

fn parse_facing(s: &str) -> Result<Facing, String> {
    s.parse().map_err(|e: pfold_core::Error| e.to_string())
}

fn parse_attribute(s: &str) -> Result<HoleAttribute, String> {
    s.parse().map_err(|e: pfold_core::Error| e.to_string())
}

fn parse_modality(s: &str) -> Result<Modality, String> {
    s.parse().map_err(|e: pfold_core::Error| e.to_string())
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    /// Groups, e.g. `1-9` or `1,2,5`; defaults to every group of the family.
    #[arg(long, value_parser = parse_groups)]
    groups: Option<GroupList>,
    /// Total number of tasks, split evenly across groups.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Hole count range, e.g. `1-3`.
    #[arg(long, value_parser = parse_holes)]
    holes: Option<(usize, usize)>,
    #[arg(long, value_parser = parse_facing)]
    facing: Option<Facing>,
    /// Generalization categories.
    #[arg(long, value_delimiter = ',', value_parser = parse_attribute)]
    attributes: Vec<HoleAttribute>,
    /// One task per valid sequence of each group.
    #[arg(long)]
    exhaustive: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct DatasetArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Group 1-9; all groups when omitted.
    group: Option<u8>,
    /// Compare with the published counts; exit nonzero on mismatch.
    #[arg(long)]
    check: bool,
    /// Print every sequence.
    #[arg(long)]
    list: bool,
    /// Require a diagonal first fold in three-fold rotation sequences.
    #[arg(long)]
    strict_rotation: bool,
}

#[derive(Args)]
struct ValidateArgs {
    /// Actions, e.g. `H1-F R90 V2-F` (one or several arguments).
    #[arg(required = true, num_args = 1..)]
    actions: Vec<String>,
    #[arg(long)]
    strict_rotation: bool,
    /// Print the per-step rule trace.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct SolveArgs {
    /// Task file or directory of task files.
    input: PathBuf,
    /// Only accept tasks of this family.
    #[arg(long, value_parser = parse_family)]
    family: Option<Family>,
    /// Output file (single task) or directory; defaults to stdout or the output root.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value = "geometric", value_parser = parse_label_mode)]
    label_mode: LabelMode,
}

#[derive(Args)]
struct VerifyArgs {
    /// Planning answer file.
    plan: PathBuf,
    /// Planning task file.
    task: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    /// Directory of `<id>.answer.json` files.
    #[arg(long)]
    answers: PathBuf,
    /// Directory of task files.
    #[arg(long)]
    tasks: PathBuf,
    #[arg(long, default_value = "visual", value_parser = parse_modality)]
    modality: Modality,
    /// Exit nonzero when an answer has no task.
    #[arg(long)]
    strict: bool,
    /// Report file; defaults to `<answers>/report.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct RenderArgs {
    task: PathBuf,
    /// One image per step, including unfolding.
    #[arg(long)]
    steps: bool,
    /// Also write the text grid.
    #[arg(long)]
    text: bool,
    /// Render this answer next to the ground truth.
    #[arg(long)]
    answer: Option<PathBuf>,
    /// Output directory; defaults to the task's directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "geometric", value_parser = parse_label_mode)]
    label_mode: LabelMode,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Dataset(a) => commands::dataset(a),
        Command::Enumerate(a) => commands::enumerate(a),
        Command::Validate(a) => commands::validate(a),
        Command::Solve(a) => commands::solve(a),
        Command::Verify(a) => commands::verify(a),
        Command::Score(a) => commands::score(a),
        Command::Render(a) => commands::render(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
