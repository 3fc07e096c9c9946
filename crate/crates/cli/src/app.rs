//! Argument handling and subcommands for the `gxwt` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use gxwt_core::{
    analytic_cwt, channel_contributions, cone_of_influence, gxwt, interaction_spectrum, load_csv, make_grid,
    pairwise_gxwt, phase_band_summary, save_csv, select_channels, simulate_dyad, ChannelSelector, CoiMask, CoiPolicy,
    ContributionOptions, FrequencyGrid, GxwtGrid, MultiChannelSeries, RateSpec, SelectorFile, SimConfig,
};

use crate::gridfile::{GridError, GridFile};
use crate::svg::{self, Part};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Input(_) => EXIT_INPUT,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<gxwt_core::Error> for CliError {
    fn from(e: gxwt_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(
    name = "gxwt",
    version,
    about = "Generalized cross-wavelet transform of multichannel time series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = true)]
pub struct RateArgs {
    /// Sample rate in Hz.
    #[arg(long)]
    pub rate: Option<f64>,
    /// Name of a time column (seconds); sets the rate when --rate is absent.
    #[arg(long)]
    pub time_column: Option<String>,
}

impl RateArgs {
    fn load(&self, path: &Path) -> Result<MultiChannelSeries, CliError> {
        let spec = match self.rate {
            Some(r) if r.is_finite() && r > 0.0 => RateSpec::Hz(r),
            Some(r) => return Err(CliError::Usage(format!("--rate must be positive, got {r}"))),
            None => RateSpec::FromTimeColumn,
        };
        Ok(load_csv(path, spec, self.time_column.as_deref())?)
    }
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.1)]
    pub fmin: f64,
    #[arg(long, default_value_t = 8.0)]
    pub fmax: f64,
    #[arg(long, default_value_t = 8)]
    pub voices: u32,
    /// Morlet center frequency in cycles (at least 4).
    #[arg(long, default_value_t = gxwt_core::cwt::DEFAULT_CYCLES)]
    pub cycles: f64,
}

impl GridArgs {
    fn grid(&self) -> Result<FrequencyGrid, CliError> {
        Ok(make_grid(self.fmin, self.fmax, self.voices)?)
    }
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// First series (X).
    pub x: PathBuf,
    /// Second series (Y).
    pub y: PathBuf,
    #[command(flatten)]
    pub rate: RateArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Selector file with channel groups and triples.
    #[arg(long)]
    pub selectors: Option<PathBuf>,
    /// Group name from --selectors, or an inline list such as `hx,hy,f*`.
    #[arg(long)]
    pub select_x: Option<String>,
    #[arg(long)]
    pub select_y: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic sinusoid dyad as two CSV files.
    Simulate(SimulateArgs),
    /// Per-channel wavelet grids and the cone-of-influence mask.
    Cwt(CwtArgs),
    /// Transform of two series.
    Gxwt(GxwtArgs),
    /// Per-channel contribution grids.
    Contrib(ContribArgs),
    /// Interaction spectrum of a transform grid as CSV.
    Spectrum(SpectrumArgs),
    /// Band-averaged phase of a transform grid as CSV.
    Phase(PhaseArgs),
    /// SVG heatmap of a grid file.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 3)]
    pub channels: usize,
    #[arg(long, default_value_t = 1.0)]
    pub f0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_x: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_negative_numbers = true)]
    pub alpha_y: f64,
    #[arg(long, default_value_t = 2.0)]
    pub amp_x: f64,
    #[arg(long, default_value_t = 1.0)]
    pub amp_y: f64,
    #[arg(long, default_value_t = 0.25)]
    pub var_x: f64,
    #[arg(long, default_value_t = 0.5)]
    pub var_y: f64,
    #[arg(long, default_value_t = 100.0)]
    pub rate: f64,
    /// Seconds.
    #[arg(long, default_value_t = 128.0)]
    pub duration: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write a time column with this name.
    #[arg(long)]
    pub time_column: Option<String>,
    #[arg(long)]
    pub out_x: PathBuf,
    #[arg(long)]
    pub out_y: PathBuf,
}

#[derive(Debug, Args)]
pub struct CwtArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub rate: RateArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub selectors: Option<PathBuf>,
    #[arg(long)]
    pub select: Option<String>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct GxwtArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Couple only corresponding channels (equal channel counts required).
    #[arg(long)]
    pub pairwise: bool,
    /// Policy recorded for later summaries.
    #[arg(long, default_value = "coi-only")]
    pub coi_policy: CoiPolicy,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ContribArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Points with |c| at or below this are flagged invalid.
    #[arg(long, default_value_t = 0.0)]
    pub floor: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    pub grid: PathBuf,
    /// Mask grid; by default the cone of influence is rebuilt from the metadata.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    /// Overrides the policy stored in the grid (default coi-only).
    #[arg(long)]
    pub coi_policy: Option<CoiPolicy>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    pub grid: PathBuf,
    /// Frequency band `lo,hi` in Hz.
    #[arg(long, value_parser = parse_band)]
    pub band: (f64, f64),
    #[arg(long)]
    pub mask: Option<PathBuf>,
    #[arg(long)]
    pub coi_policy: Option<CoiPolicy>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    pub grid: PathBuf,
    #[arg(long, default_value = "modulus")]
    pub part: Part,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_band(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("bad number {a:?}"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("bad number {b:?}"))?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(format!("band must satisfy lo <= hi, got {lo},{hi}"));
    }
    Ok((lo, hi))
}

/// Folds clap's multi-line report into one line.
fn one_line(report: &str) -> String {
    report
        .lines()
        .take_while(|l| !l.starts_with("Usage:"))
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with("For more information"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("GXWT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("GXWT_THREADS must be a positive integer, got {raw:?}")))?;
    // A pool that already exists (repeated in-process runs) is kept.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs the CLI and returns the process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            eprintln!("gxwt: {}", one_line(&e.to_string()));
            return EXIT_USAGE;
        }
    };
    match configure_threads().and_then(|_| execute(&cli.command)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("gxwt: error: {}", e.to_string().replace('\n', " "));
            e.exit_code()
        }
    }
}

pub fn execute(cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::Simulate(a) => simulate(a),
        Command::Cwt(a) => cwt(a),
        Command::Gxwt(a) => transform(a),
        Command::Contrib(a) => contrib(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Phase(a) => phase(a),
        Command::Render(a) => render(a),
    }
}

fn simulate(a: &SimulateArgs) -> Result<(), CliError> {
    let cfg = SimConfig {
        n_channels: a.channels,
        f0: a.f0,
        alpha_x: a.alpha_x,
        alpha_y: a.alpha_y,
        amp_x: a.amp_x,
        amp_y: a.amp_y,
        var_x: a.var_x,
        var_y: a.var_y,
        sample_rate: a.rate,
        duration: a.duration,
        seed: a.seed,
    };
    let dyad = simulate_dyad(&cfg)?;
    save_csv(&dyad.x, &a.out_x, a.time_column.as_deref())?;
    save_csv(&dyad.y, &a.out_y, a.time_column.as_deref())?;
    Ok(())
}

fn read_selectors(path: Option<&Path>) -> Result<Option<SelectorFile>, CliError> {
    path.map(|p| {
        let text = std::fs::read_to_string(p).map_err(|e| io_err(p, e))?;
        Ok(SelectorFile::parse(&text)?)
    })
    .transpose()
}

fn prepare(
    series: MultiChannelSeries,
    selectors: Option<&SelectorFile>,
    select: Option<&str>,
) -> Result<MultiChannelSeries, CliError> {
    let series = match selectors {
        Some(f) => f.apply_triples(series)?,
        None => series,
    };
    let Some(sel) = select else {
        return Ok(series);
    };
    let chosen = match selectors.and_then(|f| f.group(sel)) {
        Some(group) => group.clone(),
        None => ChannelSelector::parse(sel)?,
    };
    Ok(select_channels(&series, &chosen)?)
}

fn load_pair(p: &PairArgs) -> Result<(MultiChannelSeries, MultiChannelSeries), CliError> {
    let selectors = read_selectors(p.selectors.as_deref())?;
    let x = prepare(p.rate.load(&p.x)?, selectors.as_ref(), p.select_x.as_deref())?;
    let y = prepare(p.rate.load(&p.y)?, selectors.as_ref(), p.select_y.as_deref())?;
    Ok((x, y))
}

/// Keeps file names portable; the index keeps them unique.
fn file_stem(index: usize, name: &str) -> String {
    let clean: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("{index:03}_{clean}")
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn save(file: &GridFile, path: &Path) -> Result<(), CliError> {
    let text = file.write_string()?;
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn cwt(a: &CwtArgs) -> Result<(), CliError> {
    let selectors = read_selectors(a.selectors.as_deref())?;
    let series = prepare(a.rate.load(&a.input)?, selectors.as_ref(), a.select.as_deref())?;
    let grid = a.grid.grid()?;
    let w = analytic_cwt(&series, &grid, a.grid.cycles)?;
    ensure_dir(&a.out_dir)?;
    for (k, name) in series.channel_names().iter().enumerate() {
        let path = a.out_dir.join(format!("{}.grid", file_stem(k, name)));
        save(&GridFile::from_wavelet_channel(&w, k), &path)?;
    }
    let mask = cone_of_influence(&grid, series.n_times(), series.sample_rate(), a.grid.cycles);
    save(
        &GridFile::from_mask(&mask, &grid, series.sample_rate(), a.grid.cycles),
        &a.out_dir.join("coi.grid"),
    )
}

fn transform(a: &GxwtArgs) -> Result<(), CliError> {
    let (x, y) = load_pair(&a.pair)?;
    if a.pairwise && x.n_channels() != y.n_channels() {
        // Checked before the wavelet work so the diagnostic is immediate.
        return Err(gxwt_core::Error::DimensionMismatch {
            n_x: x.n_channels(),
            n_y: y.n_channels(),
        }
        .into());
    }
    let grid = a.pair.grid.grid()?;
    let u = analytic_cwt(&x, &grid, a.pair.grid.cycles)?;
    let v = analytic_cwt(&y, &grid, a.pair.grid.cycles)?;
    let g = if a.pairwise {
        pairwise_gxwt(&u, &v)?
    } else {
        gxwt(&u, &v)?
    };
    save(&GridFile::from_gxwt(&g, Some(a.coi_policy)), &a.out)
}

fn contrib(a: &ContribArgs) -> Result<(), CliError> {
    if !(a.floor.is_finite() && a.floor >= 0.0) {
        return Err(CliError::Usage(format!("--floor must be nonnegative, got {}", a.floor)));
    }
    let (x, y) = load_pair(&a.pair)?;
    let grid = a.pair.grid.grid()?;
    let cycles = a.pair.grid.cycles;
    let u = analytic_cwt(&x, &grid, cycles)?;
    let v = analytic_cwt(&y, &grid, cycles)?;
    let g = gxwt(&u, &v)?;
    let c = channel_contributions(
        &u,
        &v,
        &g,
        ContributionOptions {
            validity_floor: a.floor,
        },
    )?;
    ensure_dir(&a.out_dir)?;
    let rate = x.sample_rate();
    for (prefix, tensor) in [("x", &c.x), ("y", &c.y)] {
        for (k, name) in tensor.channel_names().iter().enumerate() {
            let path = a.out_dir.join(format!("{prefix}_{}.grid", file_stem(k, name)));
            save(&GridFile::from_contribution(tensor, k, rate, cycles), &path)?;
        }
    }
    let flags = GridFile::from_flags(c.valid, &grid, g.n_times(), rate, cycles);
    save(&flags, &a.out_dir.join("valid.grid"))
}

fn load_transform(path: &Path) -> Result<(GridFile, GxwtGrid), CliError> {
    let file = GridFile::load(path).map_err(|e| match e {
        GridError::Io(io) => io_err(path, io),
        other => other.into(),
    })?;
    let g = file.to_gxwt()?;
    Ok((file, g))
}

fn resolve_mask(
    file: &GridFile,
    g: &GxwtGrid,
    mask: Option<&Path>,
    flag: Option<CoiPolicy>,
) -> Result<Option<CoiMask>, CliError> {
    let policy = flag.or(file.meta.coi_policy).unwrap_or_default();
    match (policy, mask) {
        (CoiPolicy::AllPoints, Some(_)) => Err(CliError::Usage("--mask conflicts with --coi-policy all-points".into())),
        (CoiPolicy::AllPoints, None) => Ok(None),
        (CoiPolicy::CoiOnly, Some(p)) => {
            let m = GridFile::load(p).map_err(|e| match e {
                GridError::Io(io) => io_err(p, io),
                other => other.into(),
            })?;
            Ok(Some(m.to_mask()?))
        }
        (CoiPolicy::CoiOnly, None) => Ok(Some(cone_of_influence(
            g.grid(),
            g.n_times(),
            g.sample_rate(),
            g.cycles(),
        ))),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| io_err(p, e)),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Input(format!("stdout: {e}"))),
    }
}

fn spectrum(a: &SpectrumArgs) -> Result<(), CliError> {
    let (file, g) = load_transform(&a.grid)?;
    let mask = resolve_mask(&file, &g, a.mask.as_deref(), a.coi_policy)?;
    let s = interaction_spectrum(&g, mask.as_ref())?;
    let mut buf = Vec::new();
    s.write_csv(&mut buf)?;
    emit(a.out.as_deref(), &buf)
}

fn phase(a: &PhaseArgs) -> Result<(), CliError> {
    let (file, g) = load_transform(&a.grid)?;
    let mask = resolve_mask(&file, &g, a.mask.as_deref(), a.coi_policy)?;
    let s = phase_band_summary(&g, a.band, mask.as_ref())?;
    let text = format!(
        "band_lo_hz,band_hi_hz,mean_phase_rad,resultant_length,n_points,coi_policy\n{:.16e},{:.16e},{:.16e},{:.16e},{},{}\n",
        s.band.0,
        s.band.1,
        s.mean_phase,
        s.resultant_length,
        s.n_points,
        s.coi_policy.as_str()
    );
    emit(a.out.as_deref(), text.as_bytes())
}

fn render(a: &RenderArgs) -> Result<(), CliError> {
    let file = GridFile::load(&a.grid).map_err(|e| match e {
        GridError::Io(io) => io_err(&a.grid, io),
        other => other.into(),
    })?;
    emit(Some(&a.out), svg::render(&file, a.part).as_bytes())
}
