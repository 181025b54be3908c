//! `gasket` command-line front end.
//!
//! Every command writes its data files into `--out` together with
//! `<command>.run.json`, the resolved run configuration. Flags may also come
//! from a `--config` file of `key=value` lines; command-line flags win.

pub mod suites;

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gasket_core::decimation::{self, DecimationSpectrum, Scale};
use gasket_core::ids::{self, FitKind, IdsRegion};
use gasket_core::lattice::{
    build_ball_with, build_triangle_with, export_edge_list, region_stats, triangle_vertex_count, Ambient, Capacity,
    LatticeRegion, TriangleSpec,
};
use gasket_core::operators::{
    fmt_f64, probabilistic_laplacian, sample_potential_trial, Assembler, BoundaryCondition, Distribution,
    HamiltonianMatrix, PotentialSpec,
};
use gasket_core::spectra::{self, count_sorted, counting_curve, eigenvalues_dense_with, CountingFunction};
use gasket_core::GasketError;
use serde::Serialize;

pub use suites::{Suite, SuiteOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Environment variable overriding `--threads`.
pub const THREADS_ENV: &str = "GASKET_THREADS";

#[derive(Debug, Parser)]
#[command(name = "gasket", version, about = "Anderson model on the Sierpinski lattice", args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a region and export its edge list and statistics.
    Lattice(LatticeArgs),
    /// Eigenvalues or counting function of one operator.
    Spectrum(SpectrumArgs),
    /// Monte-Carlo integrated density of states, optionally fitted.
    Ids(IdsArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Spectral decimation sets.
    Decimate(DecimateArgs),
    /// Fit a tail law to an IDS or counting CSV.
    Fit(FitArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Lattice(_) => "lattice",
            Command::Spectrum(_) => "spectrum",
            Command::Ids(_) => "ids",
            Command::Verify(_) => "verify",
            Command::Decimate(_) => "decimate",
            Command::Fit(_) => "fit",
        }
    }

    fn common(&self) -> &CommonArgs {
        match self {
            Command::Lattice(a) => &a.common,
            Command::Spectrum(a) => &a.common,
            Command::Ids(a) => &a.common,
            Command::Verify(a) => &a.common,
            Command::Decimate(a) => &a.common,
            Command::Fit(a) => &a.common,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CommonArgs {
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// `key=value` file of flag defaults.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Largest region level accepted.
    #[arg(long, default_value_t = gasket_core::lattice::DEFAULT_MAX_LEVEL)]
    pub max_level: u32,
}

impl CommonArgs {
    fn capacity(&self) -> Capacity {
        Capacity { max_level: self.max_level }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AmbientArg {
    Full,
    Half,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RegionArgs {
    /// Level `L` of the triangle or ball.
    #[arg(long)]
    pub level: Option<u32>,
    /// Remove the three extreme vertices.
    #[arg(long, conflicts_with = "ball")]
    pub truncated: bool,
    /// Use the mirrored triangle.
    #[arg(long, conflicts_with = "ball")]
    pub mirrored: bool,
    /// Use `B_L`, the triangle together with its mirror image.
    #[arg(long)]
    pub ball: bool,
    /// Ambient lattice for degrees.
    #[arg(long, value_enum, default_value = "full")]
    pub ambient: AmbientArg,
}

impl RegionArgs {
    fn build(&self, capacity: Capacity) -> anyhow::Result<LatticeRegion> {
        let level = self.level.ok_or_else(|| usage("--level is required"))?;
        let region = if self.ball {
            build_ball_with(level, capacity)?
        } else {
            let ambient = match self.ambient {
                AmbientArg::Full => Ambient::Full,
                AmbientArg::Half => Ambient::Half,
            };
            let spec = TriangleSpec::new(level).truncated(self.truncated).mirrored(self.mirrored);
            build_triangle_with(spec, ambient, capacity)?
        };
        Ok(region)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LatticeArgs {
    #[command(flatten)]
    pub region: RegionArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Energy grid: `uniform:lo,hi,n`, `geometric:lo,hi,n` or `list:e1,e2,...`.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    Uniform(f64, f64, usize),
    Geometric(f64, f64, usize),
    List(Vec<f64>),
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        match self {
            GridSpec::Uniform(lo, hi, n) => spectra::uniform_grid(*lo, *hi, *n),
            GridSpec::Geometric(lo, hi, n) => spectra::geometric_grid(*lo, *hi, *n),
            GridSpec::List(v) => v.clone(),
        }
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("cannot parse grid `{s}`");
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let nums: Vec<f64> = rest.split(',').map(|t| t.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
        let range = |nums: &[f64]| -> Result<(f64, f64, usize), String> {
            match nums {
                [lo, hi, n] if *n >= 1.0 && n.fract() == 0.0 && lo <= hi => Ok((*lo, *hi, *n as usize)),
                _ => Err(bad()),
            }
        };
        let grid = match kind {
            "uniform" => {
                let (lo, hi, n) = range(&nums)?;
                GridSpec::Uniform(lo, hi, n)
            }
            "geometric" => {
                let (lo, hi, n) = range(&nums)?;
                if lo <= 0.0 {
                    return Err(format!("geometric grid needs a positive lower end in `{s}`"));
                }
                GridSpec::Geometric(lo, hi, n)
            }
            "list" => {
                if nums.windows(2).any(|w| w[0] > w[1]) {
                    return Err(format!("grid list `{s}` is not sorted"));
                }
                GridSpec::List(nums)
            }
            _ => return Err(bad()),
        };
        Ok(grid)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridSpec::Uniform(lo, hi, n) => write!(f, "uniform:{lo},{hi},{n}"),
            GridSpec::Geometric(lo, hi, n) => write!(f, "geometric:{lo},{hi},{n}"),
            GridSpec::List(v) => {
                f.write_str("list:")?;
                let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                f.write_str(&items.join(","))
            }
        }
    }
}

impl Serialize for GridSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Fit window `lo,hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window(pub f64, pub f64);

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(',').ok_or_else(|| format!("window `{s}` must be lo,hi"))?;
        let (lo, hi): (f64, f64) = (
            a.trim().parse().map_err(|_| format!("bad window `{s}`"))?,
            b.trim().parse().map_err(|_| format!("bad window `{s}`"))?,
        );
        if !(lo > 0.0 && lo < hi) {
            return Err(format!("window `{s}` must satisfy 0 < lo < hi"));
        }
        Ok(Window(lo, hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LaplacianArg {
    /// Combinatorial `-Δ + V`.
    Combinatorial,
    /// Probabilistic `-Δ_p` in its symmetric form.
    Probabilistic,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub region: RegionArgs,
    /// Read the operator from a coordinate file instead of building it.
    #[arg(long, conflicts_with_all = ["level", "ball"])]
    pub matrix: Option<PathBuf>,
    #[arg(long, default_value = "simple")]
    pub bc: BoundaryCondition,
    #[arg(long, default_value = "const:0")]
    pub dist: Distribution,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Trial index selecting the potential sample.
    #[arg(long, default_value_t = 0)]
    pub trial: u64,
    /// Factor applied to the sampled potential.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, value_enum, default_value = "combinatorial")]
    pub laplacian: LaplacianArg,
    /// Count eigenvalues on the grid by inertia instead of diagonalizing.
    #[arg(long)]
    pub inertia: bool,
    /// Energies at which to count eigenvalues.
    #[arg(long)]
    pub grid: Option<GridSpec>,
    /// Largest dimension diagonalized densely.
    #[arg(long, default_value_t = spectra::DENSE_THRESHOLD)]
    pub dense_threshold: usize,
    /// Also write the matrix in coordinate format.
    #[arg(long)]
    pub export_matrix: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKindArg {
    /// `𝔾_L` in the half lattice.
    Triangle,
    /// `B_L` in the full lattice.
    Ball,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitArg {
    Power,
    Lifshitz,
    Exponential,
}

impl From<FitArg> for FitKind {
    fn from(f: FitArg) -> Self {
        match f {
            FitArg::Power => FitKind::Power,
            FitArg::Lifshitz => FitKind::Lifshitz,
            FitArg::Exponential => FitKind::Exponential,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IdsArgs {
    #[arg(long)]
    pub level: u32,
    #[arg(long, value_enum, default_value = "triangle")]
    pub region: RegionKindArg,
    #[arg(long, default_value = "simple")]
    pub bc: BoundaryCondition,
    #[arg(long)]
    pub dist: Distribution,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Number of potential samples (default 32, or 8 from level 8 on).
    #[arg(long)]
    pub trials: Option<usize>,
    /// Energy grid (default: geometric tail grid when fitting, else a
    /// uniform grid over the whole spectrum).
    #[arg(long)]
    pub grid: Option<GridSpec>,
    #[arg(long, value_enum)]
    pub fit: Option<FitArg>,
    #[arg(long)]
    pub window: Option<Window>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Restrict the suite to one level.
    #[arg(long)]
    pub level: Option<u32>,
    /// Potential samples per instance.
    #[arg(long, default_value_t = 20)]
    pub seeds: usize,
    /// Random matrices or instances (suite default when omitted).
    #[arg(long)]
    pub trials: Option<usize>,
    /// Largest iteration count for the iteration bounds.
    #[arg(long, default_value_t = 30)]
    pub n: u32,
    /// Random matrix dimension.
    #[arg(long, default_value_t = 40)]
    pub dim: usize,
    /// Sample points in [-1, 0] for the iteration bounds.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 64)]
    pub grid_points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Single distribution instead of the standard three.
    #[arg(long)]
    pub dist: Option<Distribution>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DecimateArgs {
    /// Neumann spectrum of `Δ_p` on `𝔾_ℓ`.
    #[arg(long, conflicts_with = "free", required_unless_present = "free")]
    pub neumann: bool,
    /// Approximation of the lattice spectrum.
    #[arg(long)]
    pub free: bool,
    #[arg(long, required_if_eq("neumann", "true"))]
    pub level: Option<u32>,
    #[arg(long, default_value_t = 3)]
    pub depth: u32,
    #[arg(long, default_value_t = spectra::JULIA_POINTS)]
    pub julia_points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Compare with the dense spectrum (`ℓ ≤ 5`).
    #[arg(long, requires = "neumann")]
    pub compare_dense: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    /// CSV with the energy in column 1 and values in column 2.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "lifshitz")]
    pub kind: FitArg,
    #[arg(long)]
    pub window: Option<Window>,
    /// Smallest value used in the fit.
    #[arg(long, default_value_t = 0.0)]
    pub min_value: f64,
    /// Divide values by this count (e.g. the region size for `E,count`).
    #[arg(long, default_value_t = 1.0)]
    pub normalize: f64,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Resolved configuration written next to every output.
#[derive(Debug, Serialize)]
pub struct RunConfig<'a, T: Serialize> {
    pub program: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub parameters: &'a T,
}

#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

/// Verification failure carrying the summary already printed.
#[derive(Debug)]
struct Failed(String);

impl fmt::Display for Failed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Failed {}

/// Exit code for an error returned by [`run`].
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<UsageError>().is_some() {
        return EXIT_USAGE;
    }
    if err.downcast_ref::<Failed>().is_some() {
        return EXIT_VERIFICATION;
    }
    match err.downcast_ref::<GasketError>() {
        Some(GasketError::Capacity(_)) => EXIT_RESOURCE,
        Some(GasketError::InvalidArguments(_)) | Some(GasketError::Validation(_)) | Some(GasketError::Domain { .. }) => {
            EXIT_USAGE
        }
        Some(GasketError::InsufficientData { .. }) | Some(GasketError::FactorizationBreakdown { .. }) => {
            EXIT_VERIFICATION
        }
        None if err.downcast_ref::<std::io::Error>().is_some() => EXIT_RESOURCE,
        None => EXIT_VERIFICATION,
    }
}

/// Splices `key=value` lines from `--config` files into the argument list
/// right after the subcommand, so later command-line flags override them.
pub fn expand_config(args: Vec<OsString>) -> anyhow::Result<Vec<OsString>> {
    let strings: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut path = None;
    for (i, a) in strings.iter().enumerate() {
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else if a == "--config" {
            path = strings.get(i + 1).cloned();
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = fs::read_to_string(&path).with_context(|| format!("reading config file {path}"))?;
    let mut injected = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{path}:{}: expected key=value", n + 1)))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') || key == "config" {
            return Err(usage(format!("{path}:{}: invalid key `{key}`", n + 1)));
        }
        match value.trim() {
            "true" => injected.push(OsString::from(format!("--{key}"))),
            "false" => {}
            v => injected.push(OsString::from(format!("--{key}={v}"))),
        }
    }
    let insert_at = strings.iter().skip(1).position(|a| !a.starts_with('-')).map_or(args.len(), |p| p + 2);
    let mut out = args;
    out.splice(insert_at..insert_at, injected);
    Ok(out)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from(args: Vec<OsString>) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return exit_code(&e);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

fn configure_threads(common: &CommonArgs) -> anyhow::Result<()> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| usage(format!("{THREADS_ENV}={v} is not a count")))?),
        Err(_) => common.threads,
    };
    if let Some(n) = threads {
        if n == 0 {
            return Err(usage("thread count must be positive"));
        }
        // A pool configured earlier in this process is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    configure_threads(cli.command.common())?;
    match &cli.command {
        Command::Lattice(a) => cmd_lattice(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Ids(a) => cmd_ids(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Decimate(a) => cmd_decimate(a),
        Command::Fit(a) => cmd_fit(a),
    }
}

struct Output<'a> {
    dir: &'a Path,
    command: &'static str,
}

impl<'a> Output<'a> {
    fn new<T: Serialize>(common: &'a CommonArgs, command: &'static str, params: &T) -> anyhow::Result<Self> {
        fs::create_dir_all(&common.out).with_context(|| format!("creating {}", common.out.display()))?;
        let out = Output { dir: &common.out, command };
        let config = RunConfig { program: "gasket", version: env!("CARGO_PKG_VERSION"), command, parameters: params };
        out.write(&format!("{command}.run.json"), &to_json(&config)?)?;
        Ok(out)
    }

    fn write(&self, name: &str, contents: &str) -> anyhow::Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    fn file(&self, suffix: &str) -> String {
        format!("{}.{suffix}", self.command)
    }
}

fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct LatticeSummary {
    label: String,
    expected_vertex_count: Option<usize>,
    #[serde(flatten)]
    stats: gasket_core::lattice::RegionStats,
}

fn cmd_lattice(a: &LatticeArgs) -> anyhow::Result<()> {
    let region = a.region.build(a.common.capacity())?;
    let out = Output::new(&a.common, "lattice", a)?;
    let level = a.region.level.expect("checked by build");
    let expected = if a.region.ball {
        gasket_core::lattice::ball_vertex_count(level)
    } else {
        triangle_vertex_count(level).map(|n| if a.region.truncated { n - 3 } else { n })
    };
    let summary = LatticeSummary {
        label: spectra::region_label(&region),
        expected_vertex_count: expected,
        stats: region_stats(&region),
    };
    out.write(&out.file("edges.txt"), &export_edge_list(&region))?;
    let json = to_json(&summary)?;
    out.write(&out.file("stats.json"), &json)?;
    print!("{json}");
    Ok(())
}

fn counts_csv(energies: &[f64], counts: &[usize]) -> String {
    CountingFunction { energies: energies.to_vec(), counts: counts.to_vec(), dimension: 0 }.to_csv()
}

fn cmd_spectrum(a: &SpectrumArgs) -> anyhow::Result<()> {
    let h = match &a.matrix {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            HamiltonianMatrix::parse_coordinate(&text)?
        }
        None => {
            let region = a.region.build(a.common.capacity())?;
            match a.laplacian {
                LaplacianArg::Probabilistic => probabilistic_laplacian(&region)?,
                LaplacianArg::Combinatorial => {
                    let spec = PotentialSpec::new(a.dist.clone(), a.seed).with_scale(a.scale);
                    let v = sample_potential_trial(&region, &spec, a.trial)?;
                    Assembler::new(&region, a.bc).assemble(&v)?
                }
            }
        }
    };
    let grid = a.grid.as_ref().map(GridSpec::points);
    if a.inertia && grid.is_none() {
        return Err(usage("--inertia needs --grid"));
    }
    let out = Output::new(&a.common, "spectrum", a)?;
    if a.export_matrix {
        out.write(&out.file("matrix.txt"), &h.export_coordinate())?;
    }
    if a.inertia {
        let grid = grid.expect("checked above");
        let curve = counting_curve(&h, &grid)?;
        out.write(&out.file("counts.csv"), &curve.to_csv())?;
        println!("dimension {}, {} energies counted by inertia", h.dim(), grid.len());
        return Ok(());
    }
    let eig = eigenvalues_dense_with(&h, a.dense_threshold)?;
    let mut csv = String::from("index,value\n");
    for (i, x) in eig.iter().enumerate() {
        csv.push_str(&format!("{i},{}\n", fmt_f64(*x)));
    }
    out.write(&out.file("eigenvalues.csv"), &csv)?;
    if let Some(grid) = grid {
        let counts: Vec<usize> = grid.iter().map(|&e| count_sorted(&eig, e)).collect();
        out.write(&out.file("counts.csv"), &counts_csv(&grid, &counts))?;
    }
    println!("dimension {}, eigenvalues in [{}, {}]", h.dim(), fmt_f64(eig[0]), fmt_f64(eig[eig.len() - 1]));
    Ok(())
}

/// Default number of IDS trials at `level`.
pub fn default_trials(level: u32) -> usize {
    if level >= 8 {
        8
    } else {
        32
    }
}

fn cmd_ids(a: &IdsArgs) -> anyhow::Result<()> {
    let trials = a.trials.unwrap_or_else(|| default_trials(a.level));
    if trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let spec = PotentialSpec::new(a.dist.clone(), a.seed).with_scale(a.scale);
    spec.validate()?;
    let grid = match (&a.grid, a.fit) {
        (Some(g), _) => g.points(),
        (None, Some(_)) => spectra::geometric_grid(1e-4, 1e-1, 61),
        (None, None) => spectra::uniform_grid(0.0, 16.0 + spec.support().1, 65),
    };
    let region = match a.region {
        RegionKindArg::Triangle => IdsRegion::Triangle,
        RegionKindArg::Ball => IdsRegion::Ball,
    };
    let area = ids::ids_region(a.level, region, a.common.capacity())?;
    let out = Output::new(&a.common, "ids", a)?;
    let curve = ids::estimate_ids_on(&area, a.level, region, a.bc, &spec, trials, &grid)?;
    out.write(&out.file("csv"), &curve.to_csv())?;
    println!("{} trials on {} vertices, {} energies", trials, curve.region_size, grid.len());
    if let Some(kind) = a.fit {
        let window = a.window.map_or(ids::DEFAULT_WINDOW, |w| (w.0, w.1));
        let fit = match kind {
            FitArg::Lifshitz => ids::lifshitz_fit(&curve, window)?,
            FitArg::Power => ids::free_ids_exponent(&curve, window)?,
            FitArg::Exponential => ids::exponential_fit(&curve, window)?,
        };
        let json = to_json(&fit)?;
        out.write(&out.file("fit.json"), &json)?;
        print!("{json}");
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> anyhow::Result<()> {
    let opts = SuiteOptions {
        level: a.level,
        seeds: a.seeds,
        trials: a.trials,
        n: a.n,
        dim: a.dim,
        samples: a.samples,
        grid_points: a.grid_points,
        seed: a.seed,
        dist: a.dist.clone(),
    };
    let out = Output::new(&a.common, "verify", a)?;
    let report = suites::run_suite(a.suite, &opts)?;
    out.write(&out.file("report.json"), &to_json(&report)?)?;
    println!("suite {}: {} checked, {} failed", report.suite, report.checked, report.failed);
    for r in report.failures().take(20) {
        println!("  FAIL {} [{}]: deviation {} > bound {}", r.lemma, r.instance, r.max_deviation, r.bound);
    }
    if report.pass {
        Ok(())
    } else {
        Err(anyhow::Error::new(Failed(format!("{} of {} checks failed", report.failed, report.checked))))
    }
}

#[derive(Serialize)]
struct DenseComparison {
    level: u32,
    decimation_points: usize,
    dense_eigenvalues: usize,
    distinct_dense: usize,
    set_distance: f64,
    tolerance: f64,
    /// Dense eigenvalues farther than the tolerance from every decimation point.
    unmatched_dense: Vec<f64>,
    /// Decimation points farther than the tolerance from every dense eigenvalue.
    unmatched_decimation: Vec<f64>,
    pass: bool,
}

fn compare_dense(level: u32, s: &DecimationSpectrum, capacity: Capacity) -> anyhow::Result<DenseComparison> {
    if level > 5 {
        return Err(usage("--compare-dense supports levels up to 5"));
    }
    let g = build_triangle_with(TriangleSpec::new(level), Ambient::Full, capacity)?;
    let mut dense: Vec<f64> = spectra::eigenvalues_dense(&probabilistic_laplacian(&g)?)?.iter().map(|x| -x).collect();
    dense.sort_by(f64::total_cmp);
    let tol = 1e-9;
    let unmatched = |a: &[f64], b: &[f64]| -> Vec<f64> {
        a.iter().copied().filter(|&x| decimation::directed_distance(&[x], b) > tol).collect()
    };
    let mut distinct = dense.clone();
    distinct.dedup_by(|x, y| (*x - *y).abs() <= tol);
    let distance = decimation::set_distance(s.points(), &dense);
    Ok(DenseComparison {
        level,
        decimation_points: s.len(),
        dense_eigenvalues: dense.len(),
        distinct_dense: distinct.len(),
        set_distance: distance,
        tolerance: tol,
        unmatched_dense: unmatched(&dense, s.points()),
        unmatched_decimation: unmatched(s.points(), &dense),
        pass: distance <= tol,
    })
}

fn cmd_decimate(a: &DecimateArgs) -> anyhow::Result<()> {
    let spectrum = if a.neumann {
        let level = a.level.ok_or_else(|| usage("--neumann needs --level"))?;
        if level == 0 {
            return Err(usage("--level must be at least 1"));
        }
        decimation::neumann_spectrum(level)?
    } else {
        decimation::free_spectrum_approx(a.depth, a.julia_points, a.seed)?
    };
    let out = Output::new(&a.common, "decimate", a)?;
    out.write(&out.file("csv"), &spectrum.to_csv())?;
    let comb = spectrum.values(Scale::Combinatorial);
    println!(
        "{} points, combinatorial range [{}, {}]",
        spectrum.len(),
        fmt_f64(comb[0]),
        fmt_f64(comb[comb.len() - 1])
    );
    if a.compare_dense {
        let level = a.level.expect("required with --neumann");
        let report = compare_dense(level, &spectrum, a.common.capacity())?;
        let json = to_json(&report)?;
        out.write(&out.file("comparison.json"), &json)?;
        print!("{json}");
        if !report.pass {
            return Err(anyhow::Error::new(Failed(format!("set distance {} exceeds 1e-9", report.set_distance))));
        }
    }
    Ok(())
}

/// Reads the first two numeric columns of a CSV with a header row.
pub fn read_curve(path: &Path) -> anyhow::Result<(Vec<f64>, Vec<f64>)> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (n, row) in reader.records().enumerate() {
        let row = row?;
        let field = |k: usize| -> anyhow::Result<f64> {
            row.get(k)
                .ok_or_else(|| anyhow!("{}: row {} has no column {}", path.display(), n + 2, k + 1))?
                .trim()
                .parse::<f64>()
                .with_context(|| format!("{}: row {}", path.display(), n + 2))
        };
        xs.push(field(0)?);
        ys.push(field(1)?);
    }
    if xs.is_empty() {
        bail!("{} has no data rows", path.display());
    }
    Ok((xs, ys))
}

fn cmd_fit(a: &FitArgs) -> anyhow::Result<()> {
    if !(a.normalize > 0.0) {
        return Err(usage("--normalize must be positive"));
    }
    let (e, values) = read_curve(&a.input).map_err(|err| usage(format!("{err:#}")))?;
    let values: Vec<f64> = values.iter().map(|v| v / a.normalize).collect();
    let window = a.window.map_or(ids::DEFAULT_WINDOW, |w| (w.0, w.1));
    let acceptance = match a.kind {
        FitArg::Lifshitz => Some(ids::FitAcceptance::lifshitz()),
        FitArg::Power => Some(ids::FitAcceptance::power()),
        FitArg::Exponential => None,
    };
    let out = Output::new(&a.common, "fit", a)?;
    let fit = ids::fit_curve(a.kind.into(), &e, &values, window, a.min_value, acceptance)?;
    let json = to_json(&fit)?;
    out.write(&out.file("json"), &json)?;
    print!("{json}");
    Ok(())
}
