use std::fs::File;
use std::io::{self, BufReader, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use moment_decomp::decomp::{DecompRow, RowKind};
use moment_decomp::io::{
    compute_raw, parse_stats_input, render_table, InputError, InputFormat, OutputFormat,
    RenderConfig,
};
use moment_decomp::{
    sample_decomp, DecompRequest, DecompTable, GroupRef, MomentConventions, StatType,
};

/// Pool group statistics into a combined sample, recover a missing subgroup
/// from a pooled sample, or summarize raw data in one pass.
#[derive(Debug, Parser)]
#[command(name = "moment-decomp", version)]
struct Cli {
    /// Input file; standard input when omitted.
    input: Option<PathBuf>,

    /// Read raw numbers (whitespace separated) instead of a statistics table.
    #[arg(long)]
    raw: bool,

    /// Highest central power sum kept in raw mode (2..=16).
    #[arg(long, default_value_t = 4)]
    max_order: usize,

    /// Group holding the pooled sample, by 1-based position or name.
    #[arg(long, value_name = "REF")]
    pooled: Option<GroupRef>,

    /// Skewness convention: moment, fisher-pearson, adjusted-fisher-pearson.
    #[arg(long, default_value = "fisher-pearson")]
    skew_type: StatType,

    /// Kurtosis convention: moment, fisher-pearson, adjusted-fisher-pearson.
    #[arg(long, default_value = "fisher-pearson")]
    kurt_type: StatType,

    /// Kurtosis values are excess kurtosis (normal = 0).
    #[arg(long)]
    kurt_excess: bool,

    /// Take all conventions from a statistics package (spss, sas, stata, ...).
    #[arg(long, value_name = "NAME", conflicts_with_all = ["skew_type", "kurt_type", "kurt_excess"])]
    software: Option<String>,

    /// Add a standard deviation column.
    #[arg(long)]
    include_sd: bool,

    #[arg(long, default_value = "table")]
    format: OutputFormat,

    /// Significant digits in table output.
    #[arg(long, default_value_t = 7)]
    precision: usize,

    /// Input table format; guessed from the file extension, else CSV.
    #[arg(long)]
    input_format: Option<InputFormat>,

    /// Print the power sums behind the raw-mode summary to stderr.
    #[arg(long, requires = "raw")]
    dump_sums: bool,
}

enum Failure {
    /// Unreadable or malformed input.
    Input(String),
    /// Well-formed input that cannot be decomposed.
    Invalid(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<moment_decomp::Error> for Failure {
    fn from(e: moment_decomp::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn open(path: &Option<PathBuf>) -> Result<Box<dyn Read>, Failure> {
    match path {
        Some(p) => File::open(p)
            .map(|f| Box::new(f) as Box<dyn Read>)
            .map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => Ok(Box::new(io::stdin())),
    }
}

fn conventions(cli: &Cli) -> Result<MomentConventions, Failure> {
    match &cli.software {
        Some(name) => Ok(MomentConventions::for_software(name)?),
        None => Ok(MomentConventions::new(
            cli.skew_type,
            cli.kurt_type,
            cli.kurt_excess,
        )),
    }
}

fn run_raw(cli: &Cli, conv: &MomentConventions) -> Result<DecompTable, Failure> {
    let reader = BufReader::new(open(&cli.input)?);
    let summary = compute_raw(reader, conv, cli.max_order, cli.include_sd)?;
    if cli.dump_sums {
        let s = &summary.sums;
        eprintln!("n\t{}", s.n());
        eprintln!("mean\t{}", s.mean());
        for p in 2..=s.max_order() {
            eprintln!("SP{p}\t{}", s.sp(p));
        }
    }
    let order = summary
        .descriptor
        .order()
        .max(summary.sums.max_order().min(4));
    Ok(DecompTable {
        rows: vec![DecompRow {
            label: "1".to_string(),
            kind: RowKind::Input,
            stats: summary.descriptor,
        }],
        order,
        include_sd: cli.include_sd,
        warnings: Vec::new(),
    })
}

fn run_table(cli: &Cli, conv: MomentConventions) -> Result<DecompTable, Failure> {
    let mut bytes = Vec::new();
    open(&cli.input)?
        .read_to_end(&mut bytes)
        .map_err(|e| Failure::Input(e.to_string()))?;
    let format = cli.input_format.unwrap_or_else(|| {
        match cli
            .input
            .as_ref()
            .and_then(|p| p.extension())
            .and_then(|e| e.to_str())
        {
            Some(ext) if ext.eq_ignore_ascii_case("json") => InputFormat::Json,
            _ => InputFormat::Csv,
        }
    });
    let groups = parse_stats_input(&bytes, format)?;
    let req = DecompRequest {
        groups,
        conventions: conv,
        pooled: cli.pooled.clone(),
        include_sd: cli.include_sd,
    };
    Ok(sample_decomp(&req)?)
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let conv = conventions(cli)?;
    let table = if cli.raw {
        run_raw(cli, &conv)?
    } else {
        run_table(cli, conv)?
    };
    for w in &table.warnings {
        eprintln!("warning: {w}");
    }
    let cfg = RenderConfig {
        format: cli.format,
        precision: cli.precision,
    };
    Ok(render_table(&table, &cfg))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(out.as_bytes()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
