//! `branchpoint`: degree-Rips hierarchies, branch-point trees and stability
//! checks for point clouds stored as CSV.
//!
//! Exit codes: 0 success, 1 usage error, 2 bad input data, 3 a stability
//! check failed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use branchpoint::metric::{read_csv_path, CsvOptions};
use branchpoint::{
    build_gamma_with, config_hausdorff_distance, extract_branch_points_with, gen,
    phase_change_scales, phase_change_scales_merged, verify_interleaving, BranchCondition,
    BranchOptions, DistanceMatrix, Error, Execution, GammaTree, InterleavingReport, Metric,
    NestedPair, PointCloud,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "branchpoint",
    version,
    about = "Degree-Rips hierarchies and branch-point trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the component hierarchy of a cloud.
    Hierarchy {
        input: PathBuf,
        #[command(flatten)]
        tree: TreeArgs,
    },
    /// Extract the branch points of the hierarchy.
    Branches {
        input: PathBuf,
        #[command(flatten)]
        tree: TreeArgs,
        /// Drop the births at the smallest scale.
        #[arg(long)]
        strict_births: bool,
    },
    /// Merge-height ultrametric between the components at one scale, as CSV.
    Ultrametric {
        input: PathBuf,
        #[arg(long)]
        scale_index: usize,
        #[command(flatten)]
        tree: TreeArgs,
    },
    /// Hausdorff distance between the distinct-tuple configuration spaces.
    Confdist {
        x: PathBuf,
        y: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Verify the interleaving of the branch-point trees of X ⊆ Y.
    Stability {
        x: PathBuf,
        y: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
        /// Radius; defaults to just above the configuration distance.
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the stability check on seeded random nested pairs.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 20)]
        max_points: usize,
        /// Density; drawn per case from 0..=2 when omitted.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = Metric::Euclidean)]
        metric: Metric,
    },
}

#[derive(Args, Debug)]
struct CommonArgs {
    #[arg(long, default_value_t = 0)]
    k: usize,
    #[arg(long, default_value_t = Metric::Euclidean)]
    metric: Metric,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// Skip the first row.
    #[arg(long)]
    header: bool,
    /// Drop repeated points instead of failing.
    #[arg(long)]
    dedupe: bool,
}

#[derive(Args, Debug)]
struct TreeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Merge grid scales closer than this.
    #[arg(long)]
    epsilon_merge: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_data_error() {
            Failure::Data(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DATA)
        }
        Err(Failure::Verify) => ExitCode::from(EXIT_VERIFY),
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Hierarchy { input, tree } => cmd_hierarchy(&input, &tree),
        Command::Branches {
            input,
            tree,
            strict_births,
        } => cmd_branches(&input, &tree, strict_births),
        Command::Ultrametric {
            input,
            scale_index,
            tree,
        } => cmd_ultrametric(&input, scale_index, &tree),
        Command::Confdist { x, y, common } => cmd_confdist(&x, &y, &common),
        Command::Stability {
            x,
            y,
            common,
            r,
            out,
        } => cmd_stability(&x, &y, &common, r, out.as_deref()),
        Command::Fuzz {
            seed,
            count,
            max_points,
            k,
            metric,
        } => cmd_fuzz(seed, count, max_points, k, metric),
    }
}

fn load(path: &Path, args: &CommonArgs) -> Result<PointCloud, Failure> {
    if !args.delimiter.is_ascii() {
        return Err(Failure::Usage(format!(
            "delimiter `{}` is not a single-byte character",
            args.delimiter
        )));
    }
    let options = CsvOptions {
        delimiter: args.delimiter as u8,
        has_header: args.header,
        dedupe: args.dedupe,
    };
    let ingested = read_csv_path(path, options)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    if !ingested.dropped_rows.is_empty() {
        eprintln!(
            "warning: {}: dropped {} duplicate rows {:?}",
            path.display(),
            ingested.dropped_rows.len(),
            ingested.dropped_rows
        );
    }
    Ok(ingested.cloud)
}

fn build_tree(input: &Path, args: &TreeArgs) -> Result<(PointCloud, GammaTree), Failure> {
    let cloud = load(input, &args.common)?;
    let dm = DistanceMatrix::new(&cloud, args.common.metric);
    let grid = match args.epsilon_merge {
        Some(eps) if eps.is_nan() || eps < 0.0 => {
            return Err(Failure::Usage(format!(
                "--epsilon-merge {eps} must be non-negative"
            )))
        }
        Some(eps) => phase_change_scales_merged(&dm, eps),
        None => phase_change_scales(&dm),
    };
    let k = args.common.k;
    let tree = build_gamma_with(&dm, grid, k, Execution::default());
    if tree.is_empty() {
        eprintln!(
            "warning: no point has {k} neighbours at any scale ({} points); the tree is empty",
            cloud.len()
        );
    }
    Ok((cloud, tree))
}

/// Writes the artifact to `out`, or to stdout when no path is given.
fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Data(e.to_string()))
        }
    }
}

/// Summaries go to stdout when the artifact goes to a file, else to stderr.
fn summary(out: Option<&Path>, line: &str) {
    if out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn cmd_hierarchy(input: &Path, args: &TreeArgs) -> Outcome {
    let (cloud, tree) = build_tree(input, args)?;
    let text = match args.format {
        Format::Json => tree.to_json(),
        Format::Dot => tree.to_dot(),
    };
    emit(args.out.as_deref(), &with_newline(text))?;
    summary(
        args.out.as_deref(),
        &format!(
            "n={} k={} scales={} nodes={}",
            cloud.len(),
            tree.k(),
            tree.grid().len(),
            tree.node_count()
        ),
    );
    Ok(())
}

fn cmd_branches(input: &Path, args: &TreeArgs, strict_births: bool) -> Outcome {
    let (cloud, tree) = build_tree(input, args)?;
    let options = BranchOptions {
        strict_minimal_births: strict_births,
    };
    let bt = extract_branch_points_with(&tree, options);
    let text = match args.format {
        Format::Json => bt.to_json(),
        Format::Dot => bt.to_dot(),
    };
    emit(args.out.as_deref(), &with_newline(text))?;
    summary(
        args.out.as_deref(),
        &format!(
            "n={} k={} branch_points={} birth={} merge={}",
            cloud.len(),
            tree.k(),
            bt.len(),
            bt.count(BranchCondition::Birth),
            bt.count(BranchCondition::Merge)
        ),
    );
    Ok(())
}

fn cmd_ultrametric(input: &Path, scale_index: usize, args: &TreeArgs) -> Outcome {
    let (_, tree) = build_tree(input, args)?;
    let slice = tree.slice_ultrametric(scale_index)?;
    emit(args.out.as_deref(), &with_newline(slice.to_csv()))?;
    summary(
        args.out.as_deref(),
        &format!(
            "scale_index={} scale={} components={}",
            slice.scale_index,
            slice.scale,
            slice.len()
        ),
    );
    Ok(())
}

fn cmd_confdist(x: &Path, y: &Path, args: &CommonArgs) -> Outcome {
    let cx = load(x, args)?;
    let cy = load(y, args)?;
    let d = config_hausdorff_distance(&cx, &cy, args.k, args.metric)?;
    println!("{d:?}");
    Ok(())
}

fn cmd_stability(
    x: &Path,
    y: &Path,
    args: &CommonArgs,
    r: Option<f64>,
    out: Option<&Path>,
) -> Outcome {
    if let Some(r) = r {
        if !r.is_finite() || r < 0.0 {
            return Err(Failure::Usage(format!(
                "--r {r} must be a non-negative number"
            )));
        }
    }
    let cx = load(x, args)?;
    let cy = load(y, args)?;
    let pair = NestedPair::with_radius_unchecked(cx, cy, args.k, args.metric, r)?;
    let report = stability_report(&pair);
    emit(out, &with_newline(report.to_json()))?;
    let verdict = if report.pass { "pass" } else { "FAIL" };
    summary(
        out,
        &format!(
            "{verdict}: k={} r={} config_hausdorff={} max_shift={}",
            report.k, report.r, report.config_hausdorff, report.max_shift
        ),
    );
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

/// Runs the checks; a radius that does not exceed the configuration distance
/// always fails, whether or not the maps could be built.
fn stability_report(pair: &NestedPair) -> InterleavingReport {
    let (metric, k, r, cfg) = (pair.metric(), pair.k(), pair.r(), pair.config_distance());
    let mut report = match verify_interleaving(pair) {
        Ok(report) => report,
        Err(e) => return InterleavingReport::construction_failure(metric, k, r, cfg, &e),
    };
    if r.is_nan() || r <= cfg {
        report.pass = false;
        report.error = Some(Error::RadiusTooSmall { r, config: cfg }.to_string());
    }
    report
}

fn cmd_fuzz(seed: u64, count: u64, max_points: usize, k: Option<usize>, metric: Metric) -> Outcome {
    if max_points < 2 {
        return Err(Failure::Usage("--max-points must be at least 2".into()));
    }
    let mut failed = 0u64;
    for s in seed..seed.saturating_add(count) {
        let case = gen::fuzz_case(s, max_points, k);
        let (nx, ny, ck) = (case.x.len(), case.y.len(), case.k);
        let pair = NestedPair::new(case.x, case.y, case.k, metric, None)?;
        let report = stability_report(&pair);
        let verdict = if report.pass { "pass" } else { "FAIL" };
        println!(
            "seed {s}: {verdict} |X|={nx} |Y|={ny} k={ck} r={} max_shift={}",
            report.r, report.max_shift
        );
        if !report.pass {
            failed += 1;
            eprintln!("{}", report.to_json());
        }
    }
    println!("{} of {count} cases passed", count - failed);
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}
