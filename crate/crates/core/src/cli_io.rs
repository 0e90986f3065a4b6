//! Command-line configuration, dispatch and image/CSV serialization.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::Parser;
use num_complex::Complex;
use serde::Deserialize;

use crate::basin_engine::{
    compare_images, sweep, BasinImage, Engine, GridSpec, Label, StochasticSpec, SweepConfig,
};
use crate::error::{Error, Result};
use crate::function_core::{catalog_lookup, FunctionExpr, RootSpec};
use crate::iterative_methods::{MethodConfig, StepKind};
use crate::newton_flows::{FlowKind, IntegratorConfig, Stepper};
use crate::scalar::Real;
use crate::voronoi::reduced_sites;

/// Environment variable holding the default seed.
pub const SEED_ENV: &str = "BASINS_SEED";

/// Maximum number of distinct roots that can be coloured.
pub const MAX_ROOTS: usize = 8;

#[derive(Clone, Debug, Default, PartialEq, Parser, Deserialize)]
#[command(
    name = "basins",
    version,
    about = "Render basins of attraction of complex root finders"
)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct CliArgs {
    /// Catalog function, f1..f25
    #[arg(long)]
    pub function: Option<String>,
    /// Inline root list `re,im,mult;re,im,mult;...` (mult defaults to 1)
    #[arg(long, conflicts_with = "function")]
    pub roots: Option<String>,
    /// none | quotient | times_exp
    #[arg(long)]
    pub transform: Option<String>,
    /// newton | relaxed | random_relaxed | newton_opt | nqn | bnqn | bnqn_v2 |
    /// flow_plain | flow_fraction | flow_opt | voronoi
    #[arg(long)]
    pub engine: Option<String>,
    /// Pixels per axis
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// `x_min,x_max,y_min,y_max`
    #[arg(long, allow_hyphen_values = true)]
    pub bounds: Option<String>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub root_tol: Option<f64>,
    #[arg(long)]
    pub grad_tol: Option<f64>,
    /// Comma-separated shift candidates, e.g. `0,1,-1`
    #[arg(long, allow_hyphen_values = true)]
    pub delta_set: Option<String>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub gamma0: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Radius of the random relaxation disk, in (0.5, 1)
    #[arg(long)]
    pub rho: Option<f64>,
    /// Fixed relaxation factor for `relaxed`, `re` or `re,im`
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Basin tolerance in stochastic mode (default 10·epsilon)
    #[arg(long)]
    pub relaxed_root_tol: Option<f64>,
    /// Iterate on f + ε ξ (z³+2z−5) with fresh noise each step
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub stochastic: Option<bool>,
    /// rk4 | dp54
    #[arg(long)]
    pub stepper: Option<String>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out_ppm: Option<PathBuf>,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    /// PPM to compare the result against
    #[arg(long)]
    pub compare_with: Option<PathBuf>,
    /// TOML file with the same keys as the long flags; flags win
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl CliArgs {
    /// Fills every unset field from `other`.
    fn or(self, other: CliArgs) -> CliArgs {
        CliArgs {
            function: self.function.or(other.function),
            roots: self.roots.or(other.roots),
            transform: self.transform.or(other.transform),
            engine: self.engine.or(other.engine),
            grid_n: self.grid_n.or(other.grid_n),
            bounds: self.bounds.or(other.bounds),
            max_iter: self.max_iter.or(other.max_iter),
            root_tol: self.root_tol.or(other.root_tol),
            grad_tol: self.grad_tol.or(other.grad_tol),
            delta_set: self.delta_set.or(other.delta_set),
            tau: self.tau.or(other.tau),
            gamma0: self.gamma0.or(other.gamma0),
            theta: self.theta.or(other.theta),
            rho: self.rho.or(other.rho),
            alpha: self.alpha.or(other.alpha),
            epsilon: self.epsilon.or(other.epsilon),
            relaxed_root_tol: self.relaxed_root_tol.or(other.relaxed_root_tol),
            stochastic: self.stochastic.or(other.stochastic),
            stepper: self.stepper.or(other.stepper),
            h: self.h.or(other.h),
            t_end: self.t_end.or(other.t_end),
            seed: self.seed.or(other.seed),
            threads: self.threads.or(other.threads),
            out_ppm: self.out_ppm.or(other.out_ppm),
            out_csv: self.out_csv.or(other.out_csv),
            compare_with: self.compare_with.or(other.compare_with),
            config: self.config.or(other.config),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FunctionChoice {
    Catalog(String),
    Roots(Vec<RootSpec<f64>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transform {
    None,
    Quotient,
    TimesExp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineName {
    Newton,
    Relaxed,
    RandomRelaxed,
    NewtonOpt,
    Nqn,
    Bnqn,
    BnqnV2,
    FlowPlain,
    FlowFraction,
    FlowOpt,
    Voronoi,
}

impl EngineName {
    pub const ALL: [EngineName; 11] = [
        EngineName::Newton,
        EngineName::Relaxed,
        EngineName::RandomRelaxed,
        EngineName::NewtonOpt,
        EngineName::Nqn,
        EngineName::Bnqn,
        EngineName::BnqnV2,
        EngineName::FlowPlain,
        EngineName::FlowFraction,
        EngineName::FlowOpt,
        EngineName::Voronoi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EngineName::Newton => "newton",
            EngineName::Relaxed => "relaxed",
            EngineName::RandomRelaxed => "random_relaxed",
            EngineName::NewtonOpt => "newton_opt",
            EngineName::Nqn => "nqn",
            EngineName::Bnqn => "bnqn",
            EngineName::BnqnV2 => "bnqn_v2",
            EngineName::FlowPlain => "flow_plain",
            EngineName::FlowFraction => "flow_fraction",
            EngineName::FlowOpt => "flow_opt",
            EngineName::Voronoi => "voronoi",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::config(format!("unknown engine '{s}'")))
    }

    fn is_method(self) -> bool {
        !matches!(
            self,
            EngineName::FlowPlain
                | EngineName::FlowFraction
                | EngineName::FlowOpt
                | EngineName::Voronoi
        )
    }
}

/// Fully resolved run description.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub function: FunctionChoice,
    pub transform: Transform,
    pub engine: EngineName,
    /// Relaxation factor for `relaxed`.
    pub alpha: Complex<f64>,
    pub sweep: SweepConfig<f64>,
    pub grid: GridSpec<f64>,
    pub threads: Option<usize>,
    pub out_ppm: Option<PathBuf>,
    pub out_csv: Option<PathBuf>,
    pub compare_with: Option<PathBuf>,
}

impl RunConfig {
    pub fn build_function(&self) -> Result<FunctionExpr<f64>> {
        let base = match &self.function {
            FunctionChoice::Catalog(id) => catalog_lookup(id)?,
            FunctionChoice::Roots(roots) => FunctionExpr::from_roots(roots.clone())?,
        };
        match self.transform {
            Transform::None => Ok(base),
            Transform::Quotient => FunctionExpr::newton_quotient(base),
            Transform::TimesExp => Ok(FunctionExpr::times_exp(base)),
        }
    }

    pub fn engine(&self) -> Engine<f64> {
        match self.engine {
            EngineName::Newton => Engine::Method(StepKind::Newton),
            EngineName::Relaxed => Engine::Method(StepKind::Relaxed(self.alpha)),
            EngineName::RandomRelaxed => Engine::Method(StepKind::RandomRelaxed),
            EngineName::NewtonOpt => Engine::Method(StepKind::NewtonOpt),
            EngineName::Nqn => Engine::Method(StepKind::Nqn),
            EngineName::Bnqn | EngineName::BnqnV2 => Engine::Method(StepKind::Bnqn),
            EngineName::FlowPlain => Engine::Flow(FlowKind::Plain),
            EngineName::FlowFraction => Engine::Flow(FlowKind::Fraction),
            EngineName::FlowOpt => Engine::Flow(FlowKind::Optimization),
            EngineName::Voronoi => Engine::Voronoi,
        }
    }
}

fn parse_floats(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::config(format!("bad number '{}' in {what}", t.trim())))
        })
        .collect()
}

/// `re,im[,mult];...`
pub fn parse_roots(s: &str) -> Result<Vec<RootSpec<f64>>> {
    let mut out = Vec::new();
    for item in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = item.split(',').map(str::trim).collect();
        let bad = || Error::config(format!("bad root '{item}', expected re,im[,mult]"));
        if !(2..=3).contains(&parts.len()) {
            return Err(bad());
        }
        let re: f64 = parts[0].parse().map_err(|_| bad())?;
        let im: f64 = parts[1].parse().map_err(|_| bad())?;
        let mult: u32 = match parts.get(2) {
            Some(m) => m.parse().map_err(|_| bad())?,
            None => 1,
        };
        out.push(RootSpec::new(Complex::new(re, im), mult));
    }
    if out.is_empty() {
        return Err(Error::config("--roots is empty"));
    }
    Ok(out)
}

fn read_config_file(path: &Path) -> Result<CliArgs> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::config(format!("{SEED_ENV}='{v}' is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

/// Parses `argv` (program name first), merges the optional config file and
/// the seed environment variable, applies defaults and validates.
pub fn parse_config<I, S>(argv: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = CliArgs::try_parse_from(argv).map_err(Box::new)?;
    let file = match &cli.config {
        Some(path) => read_config_file(path)?,
        None => CliArgs::default(),
    };
    resolve(cli.or(file), env_seed()?)
}

/// Applies defaults to merged arguments and validates the result.
pub fn resolve(args: CliArgs, env_seed: Option<u64>) -> Result<RunConfig> {
    let function = match (args.function, args.roots) {
        (Some(_), Some(_)) => return Err(Error::config("give either --function or --roots")),
        (Some(id), None) => FunctionChoice::Catalog(id),
        (None, Some(r)) => FunctionChoice::Roots(parse_roots(&r)?),
        (None, None) => return Err(Error::config("--function or --roots is required")),
    };
    let transform = match args.transform.as_deref().unwrap_or("none") {
        "none" => Transform::None,
        "quotient" => Transform::Quotient,
        "times_exp" => Transform::TimesExp,
        other => return Err(Error::config(format!("unknown transform '{other}'"))),
    };
    let engine = EngineName::parse(args.engine.as_deref().unwrap_or("bnqn"))?;
    let seed = args.seed.or(env_seed).unwrap_or(0);

    let mut method = MethodConfig::<f64> {
        seed,
        ..MethodConfig::default()
    };
    if let Some(v) = args.max_iter {
        method.max_iter = v;
    }
    if let Some(v) = args.root_tol {
        method.root_tol = v;
    }
    if let Some(v) = args.grad_tol {
        method.grad_tol = v;
    }
    if let Some(s) = &args.delta_set {
        method.delta_set = parse_floats(s, "--delta-set")?;
    }
    if let Some(v) = args.tau {
        method.tau = v;
    }
    if let Some(v) = args.gamma0 {
        method.gamma0 = v;
    }
    if let Some(v) = args.rho {
        method.rho = v;
    }
    if engine == EngineName::BnqnV2 {
        if args.theta.is_some_and(|t| t != 1.0) {
            return Err(Error::config("bnqn_v2 fixes theta = 1"));
        }
        method.theta = 1.0;
    } else if let Some(v) = args.theta {
        method.theta = v;
    }

    let alpha = match &args.alpha {
        None => Complex::new(0.5, 0.0),
        Some(s) => match parse_floats(s, "--alpha")?.as_slice() {
            [re] => Complex::new(*re, 0.0),
            [re, im] => Complex::new(*re, *im),
            _ => return Err(Error::config("--alpha takes re or re,im")),
        },
    };
    if engine == EngineName::Relaxed && !(alpha.norm() > 0.0 && alpha.norm().is_finite()) {
        return Err(Error::config("--alpha must be finite and nonzero"));
    }

    let mut integrator = IntegratorConfig::<f64> {
        root_tol: method.root_tol,
        grad_tol: method.grad_tol,
        ..IntegratorConfig::default()
    };
    if let Some(v) = args.h {
        integrator.h = v;
    }
    if let Some(v) = args.t_end {
        integrator.t_end = v;
    }
    integrator.stepper = match args.stepper.as_deref().unwrap_or("rk4") {
        "rk4" => Stepper::Rk4,
        "dp54" => Stepper::Dp54,
        other => return Err(Error::config(format!("unknown stepper '{other}'"))),
    };

    let stochastic = if args.stochastic.unwrap_or(false) {
        let mut spec = StochasticSpec::new(args.epsilon.unwrap_or(1e-4));
        if let Some(t) = args.relaxed_root_tol {
            spec.relaxed_root_tol = t;
        }
        spec.validate()?;
        if !engine.is_method() {
            return Err(Error::config(format!(
                "--stochastic does not apply to {}",
                engine.name()
            )));
        }
        Some(spec)
    } else {
        if args.epsilon.is_some() || args.relaxed_root_tol.is_some() {
            return Err(Error::config(
                "--epsilon and --relaxed-root-tol need --stochastic",
            ));
        }
        None
    };

    if engine.is_method() {
        method.validate()?;
    } else if engine != EngineName::Voronoi {
        integrator.validate()?;
    }

    let n = args.grid_n.unwrap_or(240);
    let (x0, x1, y0, y1) = match &args.bounds {
        None => (-10.0, 10.0, -10.0, 10.0),
        Some(s) => match parse_floats(s, "--bounds")?.as_slice() {
            [a, b, c, d] => (*a, *b, *c, *d),
            _ => return Err(Error::config("--bounds takes x_min,x_max,y_min,y_max")),
        },
    };
    let grid = GridSpec::new(x0, x1, y0, y1, n, n)?.with_seeded_jitter(seed);

    if args.threads == Some(0) {
        return Err(Error::config("--threads must be at least 1"));
    }

    let config = RunConfig {
        function,
        transform,
        engine,
        alpha,
        sweep: SweepConfig {
            method,
            integrator,
            stochastic,
        },
        grid,
        threads: args.threads,
        out_ppm: args.out_ppm,
        out_csv: args.out_csv,
        compare_with: args.compare_with,
    };
    let f = config.build_function()?;
    let sites = reduced_sites(&f)?;
    if sites.len() > MAX_ROOTS {
        return Err(Error::config(format!(
            "{} distinct roots; at most {MAX_ROOTS} can be coloured",
            sites.len()
        )));
    }
    if stochastic.is_some() && f.poly_coeffs().is_none() {
        return Err(Error::NotPolynomial(f.kind_name()));
    }
    Ok(config)
}

/// RGB colours for root indices, then black.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Palette {
    pub roots: [[u8; 3]; MAX_ROOTS],
    pub black: [u8; 3],
}

impl Default for Palette {
    fn default() -> Self {
        Self {
            roots: [
                [0, 255, 0],
                [255, 255, 0],
                [0, 0, 255],
                [255, 0, 0],
                [255, 192, 203],
                [0, 255, 255],
                [255, 165, 0],
                [128, 0, 128],
            ],
            black: [0, 0, 0],
        }
    }
}

impl Palette {
    pub fn rgb(&self, label: Label) -> Option<[u8; 3]> {
        match label {
            Label::Root(k) => self.roots.get(k).copied(),
            Label::Black => Some(self.black),
        }
    }

    pub fn label(&self, rgb: [u8; 3]) -> Option<Label> {
        if rgb == self.black {
            return Some(Label::Black);
        }
        self.roots.iter().position(|c| *c == rgb).map(Label::Root)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Binary PPM, top row (largest y) first.
pub fn write_ppm<T>(image: &BasinImage<T>, palette: &Palette, path: &Path) -> Result<()> {
    let mut bytes = format!("P6\n{} {}\n255\n", image.width, image.height).into_bytes();
    bytes.reserve(image.labels.len() * 3);
    for j in (0..image.height).rev() {
        for &label in &image.labels[j * image.width..(j + 1) * image.width] {
            let rgb = palette
                .rgb(label)
                .ok_or_else(|| Error::config(format!("label {label:?} has no palette colour")))?;
            bytes.extend_from_slice(&rgb);
        }
    }
    std::fs::write(path, bytes).map_err(io_err(path))
}

/// Reads a P6 file written with `palette` back into labels.
pub fn read_ppm<T: Real>(path: &Path, palette: &Palette) -> Result<BasinImage<T>> {
    let mut data = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut data))
        .map_err(io_err(path))?;
    let bad = |reason: &str| Error::Format {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };

    // four whitespace-separated header tokens, then one whitespace byte
    let mut pos = 0;
    let mut tokens = Vec::with_capacity(4);
    while tokens.len() < 4 {
        while pos < data.len() && data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < data.len() && data[pos] == b'#' {
            while pos < data.len() && data[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < data.len() && !data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        tokens.push(String::from_utf8_lossy(&data[start..pos]).into_owned());
    }
    pos += 1;
    if tokens[0] != "P6" {
        return Err(bad("not a binary PPM (P6)"));
    }
    let dim = |t: &str| t.parse::<usize>().map_err(|_| bad("bad dimensions"));
    let (width, height) = (dim(&tokens[1])?, dim(&tokens[2])?);
    if tokens[3] != "255" {
        return Err(bad("max value must be 255"));
    }
    let pixels = data.get(pos..).unwrap_or(&[]);
    if pixels.len() != width * height * 3 {
        return Err(bad("pixel data length does not match header"));
    }
    let mut labels = vec![Label::Black; width * height];
    for (row, chunk) in pixels.chunks(width * 3).enumerate() {
        let j = height - 1 - row;
        for (i, rgb) in chunk.chunks(3).enumerate() {
            labels[j * width + i] = palette
                .label([rgb[0], rgb[1], rgb[2]])
                .ok_or_else(|| bad("colour outside the palette"))?;
        }
    }
    BasinImage::from_labels(width, height, labels)
}

/// One row per pixel in grid index order, floats to 17 significant digits.
pub fn write_csv<T: Real>(image: &BasinImage<T>, grid: &GridSpec<T>, path: &Path) -> Result<()> {
    if image.width != grid.nx || image.height != grid.ny {
        return Err(Error::DimensionMismatch(
            image.width,
            image.height,
            grid.nx,
            grid.ny,
        ));
    }
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(w, "ix,iy,x,y,label,iterations,terminal_re,terminal_im")?;
        for idx in 0..image.len() {
            let (i, j) = (idx % image.width, idx / image.width);
            let z = grid.pixel_center(i, j);
            let t = image.terminal[idx];
            let label = match image.labels[idx] {
                Label::Root(k) => format!("root{k}"),
                Label::Black => "black".to_string(),
            };
            writeln!(
                w,
                "{i},{j},{:.16e},{:.16e},{label},{},{:.16e},{:.16e}",
                z.re, z.im, image.iterations[idx], t.re, t.im
            )?;
        }
        w.flush()
    };
    write(&mut w).map_err(io_err(path))
}

/// What a run produced.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub image: BasinImage<f64>,
    /// `(all pixels, ignoring black)` mismatch against `--compare-with`.
    pub mismatch: Option<(f64, f64)>,
}

/// Executes a resolved configuration: sweep, write outputs, compare.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    let f = config.build_function()?;
    let engine = config.engine();
    let work = || sweep(engine, &f, &config.grid, &config.sweep);
    let image = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let palette = Palette::default();
    if let Some(path) = &config.out_ppm {
        write_ppm(&image, &palette, path)?;
    }
    if let Some(path) = &config.out_csv {
        write_csv(&image, &config.grid, path)?;
    }
    let mismatch = match &config.compare_with {
        Some(path) => {
            let other: BasinImage<f64> = read_ppm(path, &palette)?;
            Some((
                compare_images(&image, &other, false)?,
                compare_images(&image, &other, true)?,
            ))
        }
        None => None,
    };
    Ok(RunSummary { image, mismatch })
}
