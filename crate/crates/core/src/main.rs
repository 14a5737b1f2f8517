use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use htruss::bench::{self, BenchOptions};
use htruss::generate;
use htruss::io::{load_edge_list, write_edge_list, write_trussness};
use htruss::{decompose, Error, Mode, RunStats};

/// Higher-order (k,h)-truss decomposition.
///
/// Without a subcommand, decomposes one graph and writes `u<TAB>v<TAB>trussness`
/// lines sorted by (u, v).
#[derive(Debug, Parser)]
#[command(
    name = "htruss",
    version,
    args_conflicts_with_subcommands = true,
    subcommand_negates_reqs = true
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decompose one graph (the default).
    Run(RunArgs),
    /// Time a grid of modes, hop thresholds and thread counts.
    Bench(BenchArgs),
    /// Write a seeded synthetic edge list.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Peel,
    Sync,
    Async,
    Pruned,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Peel => Mode::Peel,
            ModeArg::Sync => Mode::Sync,
            ModeArg::Async => Mode::Async,
            ModeArg::Pruned => Mode::Pruned,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StatsFormat {
    /// One `key=value` line.
    Kv,
    /// Header row plus one comma-separated record.
    Csv,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Edge list: whitespace-separated id pairs, `%`/`#` comments.
    #[arg(long, required = true)]
    input: Option<PathBuf>,

    /// Hop threshold.
    #[arg(long, required = true, value_parser = clap::value_parser!(u32).range(1..))]
    h: Option<u32>,

    #[arg(long, value_enum, default_value_t = ModeArg::Pruned)]
    mode: ModeArg,

    /// Worker threads [default: available parallelism].
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,

    /// Output path [default: standard output].
    #[arg(long)]
    output: Option<PathBuf>,

    /// Also write run statistics to this file.
    #[arg(long)]
    stats_out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = StatsFormat::Csv)]
    stats_format: StatsFormat,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    input: PathBuf,

    /// Hop thresholds (comma-separated).
    #[arg(long, value_delimiter = ',', required = true, value_parser = clap::value_parser!(u32).range(1..))]
    h: Vec<u32>,

    /// Modes (comma-separated).
    #[arg(long = "mode", value_enum, value_delimiter = ',', default_values_t = [ModeArg::Sync, ModeArg::Async, ModeArg::Pruned])]
    modes: Vec<ModeArg>,

    /// Thread counts (comma-separated).
    #[arg(long, value_delimiter = ',', default_values_t = [1u64], value_parser = clap::value_parser!(u64).range(1..))]
    threads: Vec<u64>,

    /// Repetitions per cell; the mean wall time is reported.
    #[arg(long, default_value_t = bench::DEFAULT_REPS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    reps: u64,

    /// Per-cell budget in seconds; 0 disables it. Cells over budget are INF.
    #[arg(long, default_value_t = bench::DEFAULT_TIMEOUT.as_secs())]
    timeout: u64,

    /// Write one CSV record per cell to this file.
    #[arg(long)]
    stats_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Model {
    /// G(n, p) random graph.
    Er,
    /// Barabási–Albert preferential attachment.
    Ba,
    Complete,
    Cycle,
    Path,
    Star,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    model: Model,

    /// Vertex count (leaf count for `star`).
    #[arg(long)]
    vertices: u64,

    /// Edge probability for `er`.
    #[arg(long, default_value_t = 0.1)]
    p: f64,

    /// Edges per new vertex for `ba`.
    #[arg(long, default_value_t = 3)]
    attach: u64,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output path [default: standard output].
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Some(Command::Run(args)) => run(args),
        Some(Command::Bench(args)) => run_bench(args),
        Some(Command::Generate(args)) => run_generate(args),
        None => run(cli.run),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("htruss: {e}");
            ExitCode::FAILURE
        }
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_error(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn io_error(path: &Path, source: io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn default_threads() -> u64 {
    std::thread::available_parallelism().map_or(1, |n| n.get() as u64)
}

fn run(args: RunArgs) -> Result<(), Error> {
    let input = args.input.expect("clap enforces --input");
    let h = args.h.expect("clap enforces --h");
    let threads = args.threads.unwrap_or_else(default_threads) as usize;
    let loaded = load_edge_list(&input)?;
    let (result, stats) = decompose(&loaded.graph, args.mode.into(), h, threads)?;

    let out_name = args
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("<stdout>"));
    let mut out = open_output(args.output.as_deref())?;
    write_trussness(&mut out, &loaded, &result)
        .and_then(|_| out.flush())
        .map_err(|e| io_error(&out_name, e))?;

    eprintln!("{}", stats.to_key_values());
    if let Some(path) = &args.stats_out {
        write_stats(path, &stats, args.stats_format)?;
    }
    Ok(())
}

fn write_stats(path: &Path, stats: &RunStats, format: StatsFormat) -> Result<(), Error> {
    let text = match format {
        StatsFormat::Kv => format!("{}\n", stats.to_key_values()),
        StatsFormat::Csv => format!("{}\n{}\n", RunStats::CSV_HEADER, stats.to_csv_row()),
    };
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

fn run_bench(args: BenchArgs) -> Result<(), Error> {
    let loaded = load_edge_list(&args.input)?;
    let g = &loaded.graph;
    let modes: Vec<Mode> = args.modes.iter().map(|&m| m.into()).collect();
    let threads: Vec<usize> = args.threads.iter().map(|&t| t as usize).collect();
    let cells = bench::grid(&modes, &args.h, &threads);
    let options = BenchOptions {
        reps: args.reps as usize,
        timeout: (args.timeout > 0).then(|| Duration::from_secs(args.timeout)),
    };
    println!(
        "graph {}: {} vertices, {} edges, {} cells x {} reps",
        args.input.display(),
        g.vertex_count(),
        g.edge_count(),
        cells.len(),
        options.reps
    );
    let rows = bench::run_bench(g, &cells, &options, |row| {
        eprintln!(
            "  {} h={} threads={} -> {}",
            row.cell.mode,
            row.cell.h,
            row.cell.workers,
            row.status.label()
        );
    });
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let stdout_name = Path::new("<stdout>");
    bench::write_table(&mut out, &rows).map_err(|e| io_error(stdout_name, e))?;
    if let Some(ratio) = bench::async_round_ratio(&rows) {
        writeln!(out, "mean rounds(async)/rounds(sync): {ratio:.3}")
            .map_err(|e| io_error(stdout_name, e))?;
    }
    if let Some(path) = &args.stats_out {
        let mut file = BufWriter::new(File::create(path).map_err(|e| io_error(path, e))?);
        bench::write_csv(&mut file, &rows)
            .and_then(|_| file.flush())
            .map_err(|e| io_error(path, e))?;
    }
    Ok(())
}

fn run_generate(args: GenerateArgs) -> Result<(), Error> {
    if !(0.0..=1.0).contains(&args.p) {
        return Err(Error::InvalidArgument(format!(
            "--p {} is not a probability",
            args.p
        )));
    }
    if args.model == Model::Ba && args.attach == 0 {
        return Err(Error::InvalidArgument(
            "--attach must be positive".to_string(),
        ));
    }
    let mut rng = generate::rng(args.seed);
    let g = match args.model {
        Model::Er => generate::erdos_renyi(args.vertices, args.p, &mut rng),
        Model::Ba => generate::barabasi_albert(args.vertices, args.attach, &mut rng),
        Model::Complete => generate::complete(args.vertices),
        Model::Cycle => generate::cycle(args.vertices),
        Model::Path => generate::path(args.vertices),
        Model::Star => generate::star(args.vertices),
    };
    let out_name = args
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("<stdout>"));
    let mut out = open_output(args.output.as_deref())?;
    write_edge_list(&mut out, &g)
        .and_then(|_| out.flush())
        .map_err(|e| io_error(&out_name, e))
}
