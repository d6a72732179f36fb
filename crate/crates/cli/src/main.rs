//! `bcr`: enumerate hyper-power sets, condition and fuse belief assignments.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use bcr_core::{
    condition, dump_bba, format_significant, fuse, load_bba, parse_formula, scr_condition, Bba,
    BbaDocument, ConditionError, DocumentError, Element, FormulaError, FusionError, FusionRule,
    Part, Partition, RuleSpec, Space,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

const MASS_DIGITS: usize = 12;
/// Largest denominator tried when printing a mass as a fraction.
const MAX_DENOMINATOR: u64 = 10_000;

#[derive(Parser)]
#[command(
    name = "bcr",
    version,
    about = "Belief conditioning and fusion on hyper-power sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the elements of the hyper-power set with their DSm cardinals.
    Enumerate(EnumerateArgs),
    /// Condition a bba on a truth formula.
    Condition(ConditionArgs),
    /// Combine two bbas.
    Fuse(FuseArgs),
    /// Compare fusion-then-conditioning with conditioning-then-fusion.
    CompareCommute(CompareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Free,
    Shafer,
    Hybrid,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Take frame and model from a mass file.
    #[arg(long, conflicts_with_all = ["frame", "model", "empty"])]
    bba: Option<PathBuf>,
    /// Comma-separated atom names.
    #[arg(long, requires = "model")]
    frame: Option<String>,
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    /// Emptiness constraint for the hybrid model, e.g. "A & B". Repeatable.
    #[arg(long)]
    empty: Vec<String>,
    /// Add the D1/D2/D3 part of each element relative to this event.
    #[arg(long)]
    truth: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct ConditionArgs {
    file: PathBuf,
    #[arg(long)]
    truth: String,
    /// BCR1..BCR31 or SCR.
    #[arg(long)]
    rule: Conditioner,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct FuseArgs {
    first: PathBuf,
    second: PathBuf,
    /// dempster, dsmc, pcr5 or dsmh2.
    #[arg(long)]
    rule: FusionRule,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct CompareArgs {
    first: PathBuf,
    second: PathBuf,
    #[arg(long)]
    truth: String,
    /// dempster, dsmc, pcr5 or dsmh2.
    #[arg(long)]
    fusion: FusionRule,
    /// BCR1..BCR31 or SCR.
    #[arg(long)]
    bcr: Conditioner,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Clone, Copy, Debug)]
enum Conditioner {
    Bcr(RuleSpec),
    Scr,
}

impl FromStr for Conditioner {
    type Err = ConditionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("scr") {
            Ok(Conditioner::Scr)
        } else {
            s.parse().map(Conditioner::Bcr)
        }
    }
}

impl std::fmt::Display for Conditioner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Conditioner::Bcr(rule) => rule.fmt(f),
            Conditioner::Scr => f.write_str("SCR"),
        }
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Document { path: String, source: DocumentError },
    #[error("{0}")]
    Invalid(String),
    #[error("invalid formula {text:?}: {source}")]
    Formula { text: String, source: FormulaError },
    #[error(transparent)]
    Condition(#[from] ConditionError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
}

impl CliError {
    /// 1 for bad input, 2 when a valid input cannot be computed.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Condition(ConditionError::NoCandidates) => 2,
            CliError::Fusion(FusionError::TotalConflict | FusionError::ImplausibleEvent) => 2,
            _ => 1,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn load(path: &Path) -> Result<Bba, CliError> {
    load_bba(&read(path)?).map_err(|source| CliError::Document {
        path: path.display().to_string(),
        source,
    })
}

fn formula(space: &Space, text: &str) -> Result<Element, CliError> {
    parse_formula(space, text).map_err(|source| CliError::Formula {
        text: text.to_string(),
        source,
    })
}

fn truth(space: &Space, text: &str) -> Result<Element, CliError> {
    let event = formula(space, text)?;
    if event.is_empty() {
        return Err(CliError::Invalid(format!(
            "truth {text:?} is empty under the {} model",
            space.model().kind()
        )));
    }
    Ok(event)
}

fn same_space(m1: &Bba, m2: &Bba) -> Result<(), CliError> {
    if m1.space() == m2.space() {
        Ok(())
    } else {
        Err(CliError::Invalid(
            "the two mass files use different frames or models".into(),
        ))
    }
}

fn apply(bba: &Bba, event: Element, conditioner: Conditioner) -> Result<Bba, CliError> {
    match conditioner {
        Conditioner::Bcr(rule) => Ok(condition(bba, event, rule)?),
        Conditioner::Scr => Ok(scr_condition(bba, event)?),
    }
}

fn mass(x: f64) -> String {
    format_significant(x, MASS_DIGITS)
}

/// `p/q` when `x` is within 1e-12 of a fraction with a small denominator.
fn exact_fraction(x: f64) -> Option<String> {
    let (mut h0, mut h1, mut k0, mut k1) = (0u64, 1u64, 1u64, 0u64);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a > u32::MAX as f64 {
            return None;
        }
        let a = a as u64;
        let (h, k) = (a * h1 + h0, a * k1 + k0);
        if k > MAX_DENOMINATOR {
            return None;
        }
        if (h as f64 / k as f64 - x).abs() < 1e-12 {
            return Some(format!("{h}/{k}"));
        }
        (h0, h1, k0, k1) = (h1, h, k1, k);
        let frac = rest - a as f64;
        if frac < 1e-15 {
            return None;
        }
        rest = 1.0 / frac;
    }
    None
}

fn table(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c + 1 == row.len() {
                line.push_str(cell);
            } else {
                let pad = widths[c] - cell.chars().count();
                line.push_str(cell);
                line.push_str(&" ".repeat(pad + 2));
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn masses_csv(bba: &Bba) -> String {
    let mut out = String::from("element,mass\n");
    for (x, m) in bba.focal_canonical() {
        let _ = writeln!(out, "{},{}", bba.space().formula(&x), mass(m));
    }
    out
}

fn enumerate(args: &EnumerateArgs) -> Result<String, CliError> {
    let space = match (&args.bba, &args.frame, args.model) {
        (Some(path), _, _) => load(path)?.space().clone(),
        (None, Some(frame), Some(model)) => {
            let model = match model {
                ModelArg::Free => "free",
                ModelArg::Shafer => "shafer",
                ModelArg::Hybrid => "hybrid",
            };
            let mut text = format!("frame: {frame}\nmodel: {model}\n");
            for c in &args.empty {
                let _ = writeln!(text, "empty: {c}");
            }
            let doc =
                BbaDocument::parse(&text).map_err(|e| CliError::Invalid(e.kind.to_string()))?;
            Space::new(doc.frame, doc.model).map_err(|e| CliError::Invalid(e.to_string()))?
        }
        _ => {
            return Err(CliError::Invalid(
                "give either --bba or --frame with --model".into(),
            ))
        }
    };
    let partition = match &args.truth {
        Some(text) => Some(Partition::new(&space, truth(&space, text)?)?),
        None => None,
    };
    let elements = space.enumerate(true);
    let mut counts = [0usize; 3];
    let mut rows = Vec::with_capacity(elements.len() + 1);
    let mut header = vec!["element".to_string(), "cardinal".to_string()];
    if partition.is_some() {
        header.push("part".into());
    }
    rows.push(header);
    for x in &elements {
        let mut row = vec![space.formula(x), x.dsm_cardinal().to_string()];
        if let Some(p) = &partition {
            if x.is_empty() {
                row.push("-".into());
            } else {
                let part = p.part(x);
                counts[match part {
                    Part::D1 => 0,
                    Part::D2 => 1,
                    Part::D3 => 2,
                }] += 1;
                row.push(part.to_string());
            }
        }
        rows.push(row);
    }
    Ok(match args.format {
        Format::Csv => rows.iter().map(|r| r.join(",") + "\n").collect(),
        Format::Text => {
            let mut out = table(&rows);
            if partition.is_some() {
                let _ = writeln!(
                    out,
                    "# D1: {}, D2: {}, D3: {}",
                    counts[0], counts[1], counts[2]
                );
            }
            out
        }
    })
}

fn condition_cmd(args: &ConditionArgs) -> Result<String, CliError> {
    let prior = load(&args.file)?;
    let event = truth(prior.space(), &args.truth)?;
    let post = apply(&prior, event, args.rule)?;
    Ok(match args.format {
        Format::Text => dump_bba(&post),
        Format::Csv => masses_csv(&post),
    })
}

fn fuse_cmd(args: &FuseArgs) -> Result<String, CliError> {
    let m1 = load(&args.first)?;
    let m2 = load(&args.second)?;
    same_space(&m1, &m2)?;
    let fused = fuse(&m1, &m2, args.rule)?;
    Ok(match args.format {
        Format::Csv => masses_csv(&fused.bba),
        Format::Text => {
            let mut out = String::new();
            if matches!(args.rule, FusionRule::Dempster | FusionRule::Dsmc) {
                let _ = writeln!(out, "# conflict: {}", mass(fused.conflict));
            }
            out + &dump_bba(&fused.bba)
        }
    })
}

fn compare_cmd(args: &CompareArgs) -> Result<String, CliError> {
    let m1 = load(&args.first)?;
    let m2 = load(&args.second)?;
    same_space(&m1, &m2)?;
    let space = m1.space().clone();
    let event = truth(&space, &args.truth)?;
    let fc = apply(&fuse(&m1, &m2, args.fusion)?.bba, event, args.bcr)?;
    let cf = fuse(
        &apply(&m1, event, args.bcr)?,
        &apply(&m2, event, args.bcr)?,
        args.fusion,
    )?
    .bba;

    let mut elements: Vec<Element> = fc.focal().chain(cf.focal()).map(|(x, _)| *x).collect();
    space.sort_canonical(&mut elements);
    elements.dedup();
    let distance = fc.l1_distance(&cf);

    Ok(match args.format {
        Format::Csv => {
            let mut out = String::from("element,mass_fc,mass_cf,abs_diff\n");
            for x in &elements {
                let (a, b) = (fc.mass_of(x), cf.mass_of(x));
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    space.formula(x),
                    mass(a),
                    mass(b),
                    mass((a - b).abs())
                );
            }
            out
        }
        Format::Text => {
            let exact = |x: f64| exact_fraction(x).unwrap_or_else(|| "-".into());
            let mut rows = vec![vec![
                "element".to_string(),
                "m_FC".into(),
                "exact".into(),
                "m_CF".into(),
                "exact".into(),
            ]];
            for x in &elements {
                let (a, b) = (fc.mass_of(x), cf.mass_of(x));
                rows.push(vec![
                    space.formula(x),
                    format!("{a:.6}"),
                    exact(a),
                    format!("{b:.6}"),
                    exact(b),
                ]);
            }
            let mut out = format!(
                "# fusion: {}, conditioning: {}, truth: {}\n",
                args.fusion,
                args.bcr,
                space.formula(&event)
            );
            out += &table(&rows);
            let _ = writeln!(out, "L1 distance: {distance:.6}");
            out
        }
    })
}

fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Enumerate(args) => enumerate(args),
        Command::Condition(args) => condition_cmd(args),
        Command::Fuse(args) => fuse_cmd(args),
        Command::CompareCommute(args) => compare_cmd(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("bcr: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
