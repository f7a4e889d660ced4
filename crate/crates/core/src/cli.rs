//! Command-line front end. `run` never exits the process, so it can be
//! driven from tests.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage, 3 parse or I/O,
//! 4 degenerate point or domain, 5 missing or vanishing anchor.

use std::ffi::OsString;
use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytic::{gcf_tomogram_analytic, gcf_wavefunction, gcf_width, GcfParams};
use crate::error::TomoError;
use crate::format::{DataFile, FormatError, Kind};
use crate::grid::{RealField2D, SampledWavefunction, UniformGrid1D};
use crate::reconstruct::{
    plane_grids, reconstruct_density_matrix, reconstruct_psi, reconstruct_wigner, relative_error_up_to_phase,
    InversionConfig, PhaseConvention,
};
use crate::source::{FromFresnel, Numerical, Product, TomogramSource};
use crate::tomography::{
    fresnel_tomogram, optical_tomogram_grid, symplectic_tomogram_plane, FresnelTomogram, TomogramPlane,
};
use crate::validate::{default_fixture_dir, run_validation, Level, ValidateOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;
pub const EXIT_ANCHOR: i32 = 5;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Parse(String),
    Tomo(TomoError),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Tomo(e) => match e {
                TomoError::InvalidInput(_) | TomoError::Shape(_) | TomoError::Unsupported(_) => EXIT_USAGE,
                TomoError::Degenerate { .. } | TomoError::Domain { .. } | TomoError::SingularFrequency => {
                    EXIT_DEGENERATE
                }
                TomoError::MissingAnchor | TomoError::NodeAtOrigin(_) => EXIT_ANCHOR,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Parse(m) => f.write_str(m),
            CliError::Tomo(e) => write!(f, "{e}"),
        }
    }
}

impl From<TomoError> for CliError {
    fn from(e: TomoError) -> Self {
        CliError::Tomo(e)
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Parse(e.to_string())
    }
}

fn io_err(path: &Path, e: io::Error) -> CliError {
    CliError::Parse(format!("{}: {e}", path.display()))
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "fresnel-tomo", version, about = "Symplectic, optical and Fresnel tomography of wavefunctions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Chirped Gaussian datasets: psi, the w(X', 1, nu') plane and an optional width map.
    Gcf(GcfArgs),
    /// Tomogram of a wavefunction file.
    Tomogram(TomogramArgs),
    /// Tomogram of a product of one-mode wavefunction files at one point.
    TomogramNd(TomogramNdArgs),
    /// Wavefunction, density matrix or Wigner function from tomogram files.
    Reconstruct(ReconstructArgs),
    /// Oracle validation suite.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TomogramKind {
    Symplectic,
    Fresnel,
    Optical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NdKind {
    Symplectic,
    Fresnel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Psi,
    Rho,
    Wigner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct GcfArgs {
    #[arg(long)]
    sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// X (and X') grid; defaults to [-8 sigma, 8 sigma] with 321 points.
    #[arg(long)]
    x_min: Option<f64>,
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long)]
    x_count: Option<usize>,
    #[arg(long, default_value_t = -2.0)]
    nu_min: f64,
    #[arg(long, default_value_t = 2.0)]
    nu_max: f64,
    #[arg(long, default_value_t = 81)]
    nu_count: usize,
    /// Also write width_map.dat, the tomogram width over (mu, nu).
    #[arg(long)]
    width_map: bool,
    #[arg(long, default_value_t = -2.0)]
    mu_min: f64,
    #[arg(long, default_value_t = 2.0)]
    mu_max: f64,
    #[arg(long, default_value_t = 81)]
    mu_count: usize,
    /// Output directory.
    #[arg(long, short)]
    output: PathBuf,
}

/// Inversion settings; flags override `--config`, which overrides defaults.
#[derive(Debug, Clone, Args)]
struct ConfigArgs {
    /// JSON file with InversionConfig fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    mu_window: Option<f64>,
    /// Raised-cosine roll-off fraction on the mu axis.
    #[arg(long)]
    taper: Option<f64>,
    #[arg(long)]
    x_window: Option<f64>,
    #[arg(long)]
    x_taper: Option<f64>,
    #[arg(long)]
    mu_step: Option<f64>,
    #[arg(long)]
    x_step: Option<f64>,
    #[arg(long)]
    samples_per_axis: Option<usize>,
    #[arg(long)]
    anchor_floor: Option<f64>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct TomogramArgs {
    /// Wavefunction file.
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, value_enum)]
    kind: TomogramKind,
    /// Single nu plane (symplectic).
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    nu_min: Option<f64>,
    #[arg(long)]
    nu_max: Option<f64>,
    /// Number of nu planes (symplectic, written as a directory) or nu rows (fresnel).
    #[arg(long)]
    nu_count: Option<usize>,
    /// X grid; defaults to the input grid.
    #[arg(long)]
    x_min: Option<f64>,
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long)]
    x_count: Option<usize>,
    #[arg(long, default_value_t = -2.0)]
    mu_min: f64,
    #[arg(long, default_value_t = 2.0)]
    mu_max: f64,
    #[arg(long, default_value_t = 41)]
    mu_count: usize,
    /// Single optical angle; stored together with theta + pi.
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    theta_min: f64,
    #[arg(long, default_value_t = std::f64::consts::PI)]
    theta_max: f64,
    #[arg(long, default_value_t = 181)]
    theta_count: usize,
    /// Use the (X, mu) grids the inversion expects instead of the grid flags.
    #[arg(long)]
    inversion_grid: bool,
    #[command(flatten)]
    cfg: ConfigArgs,
    /// Output file, or directory for a stack of symplectic planes.
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct TomogramNdArgs {
    /// One wavefunction file per mode.
    #[arg(long = "factor", required = true)]
    factors: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = NdKind::Symplectic)]
    kind: NdKind,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    x: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mu: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    nu: Vec<f64>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct ReconstructArgs {
    /// Tomogram files or directories of plane files.
    inputs: Vec<PathBuf>,
    #[arg(long, value_enum)]
    target: Target,
    #[command(flatten)]
    cfg: ConfigArgs,
    /// Density-matrix grid.
    #[arg(long, default_value_t = -3.0)]
    x_min: f64,
    #[arg(long, default_value_t = 3.0)]
    x_max: f64,
    #[arg(long, default_value_t = 25)]
    x_count: usize,
    /// Wigner grid.
    #[arg(long, default_value_t = -4.0)]
    q_min: f64,
    #[arg(long, default_value_t = 4.0)]
    q_max: f64,
    #[arg(long, default_value_t = 33)]
    q_count: usize,
    #[arg(long, default_value_t = -4.0)]
    p_min: f64,
    #[arg(long, default_value_t = 4.0)]
    p_max: f64,
    #[arg(long, default_value_t = 33)]
    p_count: usize,
    /// Wavefunction to compare a psi reconstruction against.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Also write the autocorrelation slices psi(nu) psi*(0).
    #[arg(long)]
    autocorrelation: Option<PathBuf>,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long, conflicts_with_all = ["full", "level"])]
    fast: bool,
    #[arg(long, conflicts_with = "level")]
    full: bool,
    #[arg(long, value_enum)]
    level: Option<LevelArg>,
    /// Rewrite the golden files before checking.
    #[arg(long)]
    regenerate: bool,
    #[arg(long)]
    fixtures: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let provenance = args.iter().map(|a| a.to_string_lossy().into_owned()).collect::<Vec<_>>().join(" ");
    let result = match cli.command {
        Command::Gcf(a) => cmd_gcf(a, &provenance),
        Command::Tomogram(a) => cmd_tomogram(a, &provenance),
        Command::TomogramNd(a) => cmd_tomogram_nd(a),
        Command::Reconstruct(a) => cmd_reconstruct(a, &provenance),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

fn diag(key: &str, value: impl std::fmt::Display) {
    eprintln!("{key}={value}");
}

fn diag_num(key: &str, value: f64) {
    eprintln!("{key}={value:.9e}");
}

fn axis(min: f64, max: f64, count: usize, name: &str) -> CliResult<UniformGrid1D> {
    if !(max > min) || count < 2 {
        return Err(CliError::Usage(format!(
            "--{name}-min/--{name}-max/--{name}-count must give max > min and count >= 2"
        )));
    }
    Ok(UniformGrid1D::from_range(min, max, count)?)
}

fn gcf_params(sigma: f64, alpha: f64) -> CliResult<GcfParams> {
    GcfParams::new(sigma, alpha).map_err(|e| CliError::Usage(e.to_string()))
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn write_file(file: DataFile, path: &Path) -> CliResult<()> {
    file.write(path)?;
    diag("output", path.display());
    Ok(())
}

fn cmd_gcf(a: GcfArgs, provenance: &str) -> CliResult<i32> {
    let p = gcf_params(a.sigma, a.alpha)?;
    let gx = axis(a.x_min.unwrap_or(-8.0 * a.sigma), a.x_max.unwrap_or(8.0 * a.sigma), a.x_count.unwrap_or(321), "x")?;
    let gnu = axis(a.nu_min, a.nu_max, a.nu_count, "nu")?;
    ensure_dir(&a.output)?;

    let tag = |f: DataFile| f.with_param("sigma", a.sigma).with_param("alpha", a.alpha).with_provenance(provenance);
    write_file(tag(DataFile::from_wavefunction(&gcf_wavefunction(p, gx))), &a.output.join("psi.dat"))?;

    // w(X', 1, nu') is the Fresnel tomogram of the field
    let plane = RealField2D::from_fn(gx, gnu, |x, nu| gcf_tomogram_analytic(p, x, 1.0, nu).unwrap_or(0.0));
    let plane = FresnelTomogram::new(plane)?;
    write_file(tag(DataFile::from_fresnel(&plane)).with_param("mu", 1.0), &a.output.join("fresnel_plane.dat"))?;

    if a.width_map {
        let gm = axis(a.mu_min, a.mu_max, a.mu_count, "mu")?;
        let map = RealField2D::from_fn(gm, gnu, |mu, nu| gcf_width(p, mu, nu));
        write_file(
            tag(DataFile::from_width_map(&map)).with_param("convention", "exp(-X^2/omega^2)"),
            &a.output.join("width_map.dat"),
        )?;
    }
    diag_num("peak", gcf_tomogram_analytic(p, 0.0, 1.0, 0.0)?);
    diag_num("width_at_nu0", gcf_width(p, 1.0, 0.0));
    Ok(EXIT_OK)
}

fn effective_config(c: &ConfigArgs) -> CliResult<InversionConfig> {
    let mut cfg = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            serde_json::from_str::<InversionConfig>(&text)
                .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?
        }
        None => InversionConfig::default(),
    };
    if let Some(v) = c.mu_window {
        cfg.mu_window = v;
    }
    if let Some(v) = c.taper {
        cfg.taper_fraction = v;
    }
    if let Some(v) = c.x_window {
        cfg.x_window = v;
    }
    if let Some(v) = c.x_taper {
        cfg.x_taper_fraction = v;
    }
    if let Some(v) = c.mu_step {
        cfg.mu_step = Some(v);
    }
    if let Some(v) = c.x_step {
        cfg.x_step = Some(v);
    }
    if let Some(v) = c.samples_per_axis {
        cfg.samples_per_axis = v;
    }
    if let Some(v) = c.anchor_floor {
        cfg.anchor_floor = v;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn with_config(provenance: &str, cfg: &InversionConfig) -> String {
    format!("{provenance} config={}", serde_json::to_string(cfg).unwrap_or_default())
}

fn read_wavefunction(path: &Path) -> CliResult<SampledWavefunction> {
    Ok(DataFile::read(path)?.to_wavefunction()?)
}

fn cmd_tomogram(a: TomogramArgs, provenance: &str) -> CliResult<i32> {
    let psi = read_wavefunction(&a.input)?;
    let g = *psi.grid();
    let gx = axis(a.x_min.unwrap_or(g.start()), a.x_max.unwrap_or(g.end()), a.x_count.unwrap_or(g.count()), "x")?;
    match a.kind {
        TomogramKind::Symplectic => symplectic_output(&a, &psi, gx, provenance),
        TomogramKind::Fresnel => {
            let gnu = axis(a.nu_min.unwrap_or(-2.0), a.nu_max.unwrap_or(2.0), a.nu_count.unwrap_or(81), "nu")?;
            let wf = fresnel_tomogram(&psi, gx, gnu)?;
            write_file(DataFile::from_fresnel(&wf).with_provenance(provenance), &a.output)?;
            Ok(EXIT_OK)
        }
        TomogramKind::Optical => {
            let gt = match a.theta {
                // a single angle needs a second row to form a grid; theta + pi carries the same data mirrored
                Some(t) => UniformGrid1D::new(t, std::f64::consts::PI, 2)?,
                None => axis(a.theta_min, a.theta_max, a.theta_count, "theta")?,
            };
            let opt = optical_tomogram_grid(&psi, gx, gt)?;
            write_file(DataFile::from_optical(&opt).with_provenance(provenance), &a.output)?;
            Ok(EXIT_OK)
        }
    }
}

fn symplectic_output(
    a: &TomogramArgs,
    psi: &SampledWavefunction,
    gx: UniformGrid1D,
    provenance: &str,
) -> CliResult<i32> {
    let (gx, gm, provenance) = if a.inversion_grid {
        let cfg = effective_config(&a.cfg)?;
        let (px, pm) = plane_grids(&cfg)?;
        (px, pm, with_config(provenance, &cfg))
    } else {
        (gx, axis(a.mu_min, a.mu_max, a.mu_count, "mu")?, provenance.to_string())
    };
    let stack = a.nu_count.is_some() || a.nu_min.is_some() || a.nu_max.is_some();
    match (a.nu, stack) {
        (Some(nu), false) => {
            let plane = symplectic_tomogram_plane(psi, gx, gm, nu)?;
            write_file(DataFile::from_plane(&plane).with_provenance(provenance), &a.output)?;
        }
        (None, true) => {
            let (Some(lo), Some(hi), Some(n)) = (a.nu_min, a.nu_max, a.nu_count) else {
                return Err(CliError::Usage("a plane stack needs --nu-min, --nu-max and --nu-count".into()));
            };
            let gnu = axis(lo, hi, n, "nu")?;
            ensure_dir(&a.output)?;
            for (k, nu) in gnu.points().enumerate() {
                let nu = if nu.abs() < 1e-12 * gnu.step() { 0.0 } else { nu };
                let plane = symplectic_tomogram_plane(psi, gx, gm, nu)?;
                DataFile::from_plane(&plane)
                    .with_provenance(provenance.clone())
                    .write(a.output.join(format!("plane_{k:04}.dat")))?;
            }
            diag("planes", gnu.count());
            diag("output", a.output.display());
        }
        _ => return Err(CliError::Usage("give either --nu or --nu-min/--nu-max/--nu-count".into())),
    }
    Ok(EXIT_OK)
}

fn cmd_tomogram_nd(a: TomogramNdArgs) -> CliResult<i32> {
    let n = a.factors.len();
    if n > 3 {
        return Err(CliError::Usage(format!("at most 3 modes are supported, got {n}")));
    }
    let mu = match a.kind {
        NdKind::Fresnel => vec![1.0; n],
        NdKind::Symplectic if a.mu.is_empty() => return Err(CliError::Usage("--mu is required for symplectic".into())),
        NdKind::Symplectic => a.mu.clone(),
    };
    if a.x.len() != n || a.nu.len() != n || mu.len() != n {
        return Err(CliError::Usage(format!("--x, --mu and --nu need {n} comma-separated values each")));
    }
    let factors = a.factors.iter().map(|p| read_wavefunction(p)).collect::<CliResult<Vec<_>>>()?;
    let product = Product(factors.iter().map(Numerical).collect());
    let value = crate::source::TomogramSourceNd::tomogram_nd(&product, &a.x, &mu, &a.nu)?;
    println!("value={value:.16e}");
    Ok(EXIT_OK)
}

/// Input paths with directories expanded to their sorted `.dat` entries.
fn expand_inputs(inputs: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut files = Vec::new();
    for path in inputs {
        if path.is_dir() {
            let mut entries: Vec<PathBuf> = std::fs::read_dir(path)
                .map_err(|e| io_err(path, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "dat"))
                .collect();
            entries.sort();
            files.extend(entries);
        } else {
            files.push(path.clone());
        }
    }
    if files.is_empty() {
        return Err(CliError::Usage("no input tomogram files given".into()));
    }
    Ok(files)
}

fn cmd_reconstruct(a: ReconstructArgs, provenance: &str) -> CliResult<i32> {
    let cfg = effective_config(&a.cfg)?;
    let files = expand_inputs(&a.inputs)?;
    match a.target {
        Target::Psi => reconstruct_psi_files(&a, &files, &cfg, provenance),
        Target::Rho | Target::Wigner => {
            if files.len() != 1 {
                return Err(CliError::Usage(format!(
                    "target {:?} takes one optical or Fresnel tomogram file, got {}",
                    a.target,
                    files.len()
                )));
            }
            let file = DataFile::read(&files[0])?;
            match file.manifest.kind {
                Kind::OpticalTomogram => {
                    let opt = file.to_optical()?;
                    let cfg = capped(cfg, opt.grid_x());
                    reconstruct_field(&a, &opt, &cfg, provenance)
                }
                Kind::FresnelTomogram => {
                    let wf = file.to_fresnel()?;
                    let cfg = capped(cfg, wf.grid_x());
                    reconstruct_field(&a, &FromFresnel(wf), &cfg, provenance)
                }
                other => Err(CliError::Usage(format!(
                    "target {:?} needs an optical_tomogram or fresnel_tomogram file, got {other:?}",
                    a.target
                ))),
            }
        }
    }
}

/// The characteristic-function integral may not reach past the file's X range.
fn capped(mut cfg: InversionConfig, gx: &UniformGrid1D) -> InversionConfig {
    let reach = gx.start().abs().min(gx.end().abs());
    if cfg.x_window > reach {
        diag_num("x_window_capped", reach);
        cfg.x_window = reach;
    }
    cfg
}

fn reconstruct_field<S: TomogramSource>(
    a: &ReconstructArgs,
    source: &S,
    cfg: &InversionConfig,
    provenance: &str,
) -> CliResult<i32> {
    let provenance = with_config(provenance, cfg);
    if a.target == Target::Rho {
        let rho = reconstruct_density_matrix(source, axis(a.x_min, a.x_max, a.x_count, "x")?, cfg)?;
        diag_num("asymmetry", rho.asymmetry());
        diag_num("trace_re", rho.trace().re);
        write_file(DataFile::from_density_matrix(&rho).with_provenance(provenance), &a.output)?;
    } else {
        let gq = axis(a.q_min, a.q_max, a.q_count, "q")?;
        let gp = axis(a.p_min, a.p_max, a.p_count, "p")?;
        let w = reconstruct_wigner(source, gq, gp, cfg)?;
        diag_num("imaginary_residue", w.imaginary_residue());
        diag_num("total", w.total());
        write_file(DataFile::from_wigner(&w).with_provenance(provenance), &a.output)?;
    }
    Ok(EXIT_OK)
}

fn reconstruct_psi_files(
    a: &ReconstructArgs,
    files: &[PathBuf],
    cfg: &InversionConfig,
    provenance: &str,
) -> CliResult<i32> {
    let planes = files.iter().map(|f| Ok(DataFile::read(f)?.to_plane()?)).collect::<CliResult<Vec<TomogramPlane>>>()?;
    let rec = reconstruct_psi(&planes, PhaseConvention::OriginRealPositive, cfg)?;
    diag("planes", planes.len());
    diag_num("norm_before", rec.norm_before);
    if let Some(reference) = &a.reference {
        let truth = read_wavefunction(reference)?;
        let resampled = SampledWavefunction::from_fn(*rec.psi.grid(), |x| truth.amplitude_at(x)).normalized();
        diag_num("relative_error", relative_error_up_to_phase(&rec.psi, &resampled)?);
    }
    let provenance = with_config(provenance, cfg);
    if let Some(path) = &a.autocorrelation {
        write_file(DataFile::from_autocorrelation(&rec.autocorrelation).with_provenance(provenance.clone()), path)?;
    }
    write_file(
        DataFile::from_wavefunction(&rec.psi)
            .with_param("phase_convention", "origin_real_positive")
            .with_provenance(provenance),
        &a.output,
    )?;
    Ok(EXIT_OK)
}

fn cmd_validate(a: ValidateArgs) -> CliResult<i32> {
    let level = match (a.full, a.level) {
        (true, _) | (_, Some(LevelArg::Full)) => Level::Full,
        _ => Level::Fast,
    };
    let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
    let opts = ValidateOptions {
        level,
        fixtures: a.fixtures.unwrap_or_else(default_fixture_dir),
        regenerate: a.regenerate,
        color: !no_color && io::stdout().is_terminal(),
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let report = run_validation(&opts, &mut out).map_err(|e| CliError::Parse(e.to_string()))?;
    writeln!(out, "SUMMARY passed={} failed={}", report.passed, report.failed)
        .map_err(|e| CliError::Parse(e.to_string()))?;
    Ok(if report.all_passed() { EXIT_OK } else { EXIT_VALIDATION })
}
