//! `comptex` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 input error, 3 internal error.

use std::ffi::OsString;
use std::io::Write;
use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use comptex::compositor::compose;
use comptex::geometry::{geometric_complement, rasterize, ComplementConfig, Polygon2D};
use comptex::saliency::{metrics, saliency_map, SaliencyParams};
use comptex::sweep::{
    export_csv, export_grid_csv, format_csv, format_grid_csv, plot_curves, run_grid, run_sweep_with, Execution,
    SweepAxis, SweepSpec,
};
use comptex::texture::{invert_complement, patch_complement, predominant_color, vst_complement};
use comptex::texture::{DEFAULT_HISTOGRAM_BINS, DEFAULT_VST_TOLERANCE};
use comptex::{BlendMode, ColorRGB, Image, Mask, Pose2D, Scene, VisMode};
use serde_json::json;

use crate::service::{load_scenes, serve, AppState};
use crate::trial::TrialLog;

pub const PORT_ENV: &str = "COMPTEX_PORT";
pub const DEFAULT_PORT: u16 = 8080;
/// Relative spread below which a saliency map is reported as uniform.
pub const UNIFORM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "comptex",
    version,
    about = "Complementary textures and salience-based alignment analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Photometric complement of a texture.
    Complement(ComplementArgs),
    /// Geometric primitives of a polygon, rasterized, plus a text listing.
    Geometry(GeometryArgs),
    /// Composite a scene with the replica at a pose.
    Render(RenderArgs),
    /// Eigen-PQFT saliency map of an image; metrics as JSON on stdout.
    Saliency(SaliencyArgs),
    /// Salience-versus-misalignment sweep to CSV (and optionally a plot).
    Sweep(SweepArgs),
    /// Start the HTTP alignment-trial service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct ComplementArgs {
    input: PathBuf,
    output: PathBuf,
    /// Target color for inversion, `r,g,b` in [0, 1] or `#rrggbb`.
    #[arg(long, default_value = "1,1,1")]
    target: ColorRGB,
    /// Video see-through complement: paint non-predominant pixels with the predominant color.
    #[arg(long, conflicts_with = "patch")]
    vst: bool,
    /// Color distance tolerance for `--vst`.
    #[arg(long, default_value_t = DEFAULT_VST_TOLERANCE, requires = "vst")]
    tol: f64,
    /// Histogram bins per channel for the predominant color.
    #[arg(long, default_value_t = DEFAULT_HISTOGRAM_BINS, requires = "vst")]
    bins: usize,
    /// Patch image pasted over the masked region.
    #[arg(long, requires = "mask")]
    patch: Option<PathBuf>,
    /// Region mask (white = replace).
    #[arg(long, requires = "patch")]
    mask: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GeometryArgs {
    /// Polygon file, one `x y` vertex per line, counter-clockwise.
    polygon: PathBuf,
    output: PathBuf,
    /// Write the primitive listing here instead of standard output.
    #[arg(long)]
    listing: Option<PathBuf>,
    /// Primitive kinds: edges, diagonals, bisectors, incircle, circumcircle, delaunay, all.
    #[arg(long, value_delimiter = ',')]
    primitives: Option<Vec<String>>,
    /// Interior grid side added to the Delaunay point set.
    #[arg(long, default_value_t = 0)]
    grid: usize,
    #[arg(long, default_value_t = 1.0)]
    stroke_width: f64,
    #[arg(long, default_value = "1,1,1")]
    color: ColorRGB,
    /// Raster size `WxH`; defaults to the polygon bounding box.
    #[arg(long)]
    size: Option<String>,
}

#[derive(Debug, Args)]
struct PoseArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    tx: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    ty: f64,
    /// Rotation, radians unless `--degrees`.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
}

#[derive(Debug, Args)]
struct RenderArgs {
    /// Fixture name or scene manifest path.
    #[arg(long)]
    scene: String,
    #[arg(long)]
    mode: VisMode,
    #[arg(long, default_value = "additive")]
    blend: BlendMode,
    /// Replica opacity; defaults to the blend mode's default.
    #[arg(long)]
    alpha: Option<f64>,
    #[command(flatten)]
    pose: PoseArgs,
    /// Interpret `--theta` in degrees.
    #[arg(long)]
    degrees: bool,
    output: PathBuf,
}

#[derive(Debug, Args)]
struct SaliencyOptions {
    #[arg(long, default_value_t = SaliencyParams::default().work_max_dim)]
    work_max_dim: usize,
    #[arg(long, default_value_t = SaliencyParams::default().sigma)]
    sigma: f64,
}

impl SaliencyOptions {
    fn params(&self) -> Result<SaliencyParams, Failure> {
        if self.work_max_dim == 0 || self.work_max_dim > 4096 {
            return Err(Failure::Usage("--work-max-dim must be in 1..=4096".into()));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Failure::Usage("--sigma must be finite and non-negative".into()));
        }
        Ok(SaliencyParams {
            work_max_dim: self.work_max_dim,
            sigma: self.sigma,
        })
    }
}

#[derive(Debug, Args)]
struct SaliencyArgs {
    input: PathBuf,
    /// Normalized heatmap output.
    heatmap: Option<PathBuf>,
    #[command(flatten)]
    options: SaliencyOptions,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Fixture name or scene manifest path.
    #[arg(long, default_value = "checker")]
    scene: String,
    #[arg(long, default_value = "translation_x")]
    axis: SweepAxis,
    /// Comma-separated, strictly increasing, containing the identity.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    offsets: Option<Vec<f64>>,
    /// Comma-separated modes; defaults to every mode the scene provides.
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<VisMode>>,
    #[arg(long, default_value = "additive")]
    blend: BlendMode,
    #[arg(long)]
    alpha: Option<f64>,
    /// Rotation offsets are given in degrees.
    #[arg(long)]
    degrees: bool,
    /// CSV output; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Line chart of both metrics.
    #[arg(long, conflicts_with = "grid_axis")]
    plot: Option<PathBuf>,
    /// Second axis for a combined grid sweep.
    #[arg(long, requires = "grid_offsets")]
    grid_axis: Option<SweepAxis>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "grid_axis")]
    grid_offsets: Option<Vec<f64>>,
    /// Evaluate cells on one thread.
    #[arg(long)]
    serial: bool,
    #[command(flatten)]
    options: SaliencyOptions,
}

#[derive(Debug, Args)]
struct ServeArgs {
    /// Port; falls back to the COMPTEX_PORT environment variable, then 8080.
    #[arg(long)]
    port: Option<u16>,
    #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
    host: IpAddr,
    /// Directory of additional `*.scene` manifests.
    #[arg(long)]
    scenes_dir: Option<PathBuf>,
    /// JSON-lines trial log, appended to.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Input(String),
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Internal(m) => f.write_str(m),
        }
    }
}

impl From<comptex::Error> for Failure {
    fn from(e: comptex::Error) -> Self {
        match e {
            comptex::Error::Encode(_) => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("comptex: {f}");
            f.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Complement(a) => complement(a),
        Command::Geometry(a) => geometry(a),
        Command::Render(a) => render(a),
        Command::Saliency(a) => saliency(a),
        Command::Sweep(a) => sweep(a),
        Command::Serve(a) => serve_cmd(a),
    }
}

fn complement(a: ComplementArgs) -> Result<(), Failure> {
    let tex = Image::load_png(&a.input)?;
    let out = if a.vst {
        let dom = predominant_color(&tex, a.bins)?;
        vst_complement(&tex, dom, a.tol)?
    } else if let (Some(patch), Some(mask)) = (&a.patch, &a.mask) {
        let patch = Image::load_png(patch)?;
        let mask = Mask::from_image(&Image::load_png(mask)?);
        patch_complement(&tex, &mask, &patch)?
    } else {
        invert_complement(&tex, a.target)
    };
    out.save_png(&a.output)?;
    Ok(())
}

fn parse_size(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Usage(format!("--size expects WxH, got `{s}`"));
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let (w, h): (usize, usize) = (
        w.trim().parse().map_err(|_| bad())?,
        h.trim().parse().map_err(|_| bad())?,
    );
    if w == 0 || h == 0 || w > 8192 || h > 8192 {
        return Err(Failure::Usage(format!("--size {s} outside 1..=8192")));
    }
    Ok((w, h))
}

fn geometry(a: GeometryArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&a.polygon).map_err(|e| comptex::Error::io(&a.polygon, e))?;
    let poly = Polygon2D::parse(&text)?;
    let mut config = match &a.primitives {
        None => ComplementConfig::default(),
        Some(kinds) => {
            let mut c = ComplementConfig::none();
            for k in kinds {
                match k.trim() {
                    "edges" => c.edges = true,
                    "diagonals" => c.diagonals = true,
                    "bisectors" => c.bisectors = true,
                    "incircle" => c.incircle = true,
                    "circumcircle" => c.circumcircle = true,
                    "delaunay" => c.delaunay = true,
                    "all" => c = ComplementConfig::all(),
                    other => return Err(Failure::Usage(format!("unknown primitive kind `{other}`"))),
                }
            }
            c
        }
    };
    if !(a.stroke_width.is_finite() && a.stroke_width > 0.0) {
        return Err(Failure::Usage("--stroke-width must be positive".into()));
    }
    config.delaunay_grid = a.grid;
    config.stroke_width = a.stroke_width;
    config.stroke_color = a.color;
    let prims = geometric_complement(&poly, &config)?;

    let (w, h) = match &a.size {
        Some(s) => parse_size(s)?,
        None => {
            let (_, hi) = poly.bounding_box();
            let extent = |v: f64| (v + a.stroke_width / 2.0).ceil() + 1.0;
            let (w, h) = (extent(hi.x), extent(hi.y));
            if !(w >= 1.0 && h >= 1.0 && w <= 8192.0 && h <= 8192.0) {
                return Err(Failure::Input(format!(
                    "polygon extent {w}x{h} unsuitable for a raster; pass --size"
                )));
            }
            (w as usize, h as usize)
        }
    };
    rasterize(&prims, w, h).save_png(&a.output)?;
    let listing = prims.listing();
    match &a.listing {
        Some(p) => std::fs::write(p, listing).map_err(|e| comptex::Error::io(p, e))?,
        None => print!("{listing}"),
    }
    Ok(())
}

fn check_alpha(alpha: Option<f64>, blend: BlendMode) -> Result<f64, Failure> {
    let alpha = alpha.unwrap_or(blend.default_alpha());
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Failure::Usage(format!("--alpha {alpha} outside [0, 1]")));
    }
    Ok(alpha)
}

fn render(a: RenderArgs) -> Result<(), Failure> {
    let scene = Scene::resolve(&a.scene)?;
    let alpha = check_alpha(a.alpha, a.blend)?;
    let theta = if a.degrees {
        a.pose.theta.to_radians()
    } else {
        a.pose.theta
    };
    let pose = Pose2D::new(a.pose.tx, a.pose.ty, theta, a.pose.scale)?;
    let frame = compose(&scene, a.mode, &pose, a.blend, alpha)?;
    frame.save_png(&a.output)?;
    Ok(())
}

fn saliency(a: SaliencyArgs) -> Result<(), Failure> {
    let params = a.options.params()?;
    let img = Image::load_png(&a.input)?;
    let map = saliency_map(&img, &params);
    let m = metrics(&map);
    let (min, mean) = (map.min(), map.mean());
    let uniform = m.max == 0.0 || (m.max - min) / mean <= UNIFORM_TOLERANCE;
    if let Some(path) = &a.heatmap {
        let file = std::fs::File::create(path).map_err(|e| comptex::Error::io(path, e))?;
        map.encode_heatmap_png(std::io::BufWriter::new(file))?;
    }
    let report = json!({
        "width": map.width(),
        "height": map.height(),
        "integral": m.integral,
        "max": m.max,
        "min": min,
        "mean": mean,
        "uniform": uniform,
    });
    println!("{report}");
    Ok(())
}

fn default_offsets(axis: SweepAxis) -> Vec<f64> {
    match axis {
        SweepAxis::TranslationX | SweepAxis::TranslationY => vec![0.0, 2.0, 4.0, 6.0, 8.0],
        SweepAxis::Rotation => [0.0f64, 2.0, 4.0, 8.0].iter().map(|d| d.to_radians()).collect(),
        SweepAxis::Scale => vec![0.8, 0.9, 1.0, 1.1, 1.25],
    }
}

fn axis_offsets(axis: SweepAxis, given: Option<Vec<f64>>, degrees: bool) -> Vec<f64> {
    match given {
        None => default_offsets(axis),
        Some(v) if degrees && axis == SweepAxis::Rotation => v.iter().map(|d| d.to_radians()).collect(),
        Some(v) => v,
    }
}

fn write_stdout(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::Internal(format!("writing standard output: {e}")))
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    let params = a.options.params()?;
    let scene = Scene::resolve(&a.scene)?;
    let alpha = check_alpha(a.alpha, a.blend)?;
    let modes = a.modes.clone().unwrap_or_else(|| scene.modes());
    let offsets = axis_offsets(a.axis, a.offsets.clone(), a.degrees);

    if let Some(grid_axis) = a.grid_axis {
        let grid_offsets = axis_offsets(grid_axis, a.grid_offsets.clone(), a.degrees);
        let rows = run_grid(
            &scene,
            &modes,
            [(a.axis, &offsets), (grid_axis, &grid_offsets)],
            a.blend,
            alpha,
            &params,
        )
        .map_err(|e| match e {
            comptex::Error::InvalidArgument(m) => Failure::Usage(m),
            e => e.into(),
        })?;
        return match &a.out {
            Some(p) => Ok(export_grid_csv(&rows, p)?),
            None => write_stdout(&format_grid_csv(&rows)),
        };
    }

    let spec = SweepSpec::new(a.axis, offsets, modes, a.blend, alpha).map_err(|e| Failure::Usage(e.to_string()))?;
    let execution = if a.serial {
        Execution::Serial
    } else {
        Execution::Parallel
    };
    let result = run_sweep_with(&scene, &spec, &params, execution)?;
    match &a.out {
        Some(p) => export_csv(&result, p)?,
        None => write_stdout(&format_csv(&result))?,
    }
    if let Some(p) = &a.plot {
        plot_curves(&result, p)?;
    }
    Ok(())
}

fn resolve_port(flag: Option<u16>) -> Result<u16, Failure> {
    if let Some(p) = flag {
        return Ok(p);
    }
    match std::env::var(PORT_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{PORT_ENV}=`{v}` is not a port number"))),
        Err(_) => Ok(DEFAULT_PORT),
    }
}

fn serve_cmd(a: ServeArgs) -> Result<(), Failure> {
    let port = resolve_port(a.port)?;
    let scenes = load_scenes(a.scenes_dir.as_deref())?;
    let log = match &a.log {
        Some(p) => Some(TrialLog::open(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let state = Arc::new(AppState::new(scenes, log));
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Internal(e.to_string()))?;
    runtime
        .block_on(serve(SocketAddr::new(a.host, port), state))
        .map_err(|e| Failure::Input(format!("cannot serve on {}:{port}: {e}", a.host)))
}
