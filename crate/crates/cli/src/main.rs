mod cache;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use sixjtv::asympt::{appendix_growth_check, growth_series, odd_range, GrowthSeries, SeriesKind};
use sixjtv::fsl::{filling_volume_bounds, fsl_tv, fsl_volume, load_fsl};
use sixjtv::lobachevsky::{AngleSextuple, V8};
use sixjtv::qarith::{Level, Precision, SignedLog};
use sixjtv::sixj::{bound_scan, central_tuple, sixj_eval, ScanOptions, Sextuple, DEFAULT_SCAN_CEILING};
use sixjtv::tetvol::{angles_from_thetas, truncated_tet_volume_detailed, DihedralAngles};
use sixjtv::tvstate::{load_triangulation, tv_state_sum_with, ColorSet};
use sixjtv::Error;

use cache::SixjCache;

#[derive(Parser)]
#[command(name = "sixjtv", version, about = "Quantum 6j-symbols, Turaev-Viro invariants and volume asymptotics at q = exp(2πi/r)")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Directory of the persistent 6j tables.
    #[arg(long, global = true, env = "SIXJTV_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "standard")]
    precision: PrecisionMode,
    /// Significant digits in extended mode (at most 31).
    #[arg(long, global = true, default_value_t = 31)]
    digits: u32,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PrecisionMode {
    Standard,
    Extended,
}

#[derive(Args, Clone, Copy)]
struct Range {
    /// A single level; overrides the range.
    #[arg(long)]
    r: Option<u32>,
    #[arg(long, default_value_t = 5)]
    r_min: u32,
    #[arg(long, default_value_t = 51)]
    r_max: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one 6j-symbol.
    Sixj {
        #[arg(long)]
        r: u32,
        /// Six comma-separated colors.
        #[arg(long, value_delimiter = ',')]
        tuple: Vec<u32>,
    },
    /// Exhaustive maximum-growth scan over admissible sextuples.
    BoundScan {
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = DEFAULT_SCAN_CEILING)]
        ceiling: u32,
        /// Allow r above the ceiling.
        #[arg(long)]
        force: bool,
    },
    /// Turaev-Viro state sum of a triangulation document.
    TvStateSum {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        range: Range,
        /// Restrict edge colors to even values.
        #[arg(long)]
        even: bool,
        /// Print the validated, normalized document and stop.
        #[arg(long)]
        normalize: bool,
    },
    /// Turaev-Viro invariants of a fundamental shadow link complement.
    FslTv {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        range: Range,
    },
    /// Growth series with the extrapolated limit.
    Growth {
        #[arg(long, value_enum, default_value = "central")]
        kind: Kind,
        /// FSL presentation (kind fsl) or `[{"r": .., "tuple": [..]}, ..]` (kind sextuples).
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        range: Range,
        /// Limit to compare against; defaults to v8 or 2c·v8.
        #[arg(long)]
        target: Option<f64>,
    },
    /// Volume of a truncated hyperideal tetrahedron from its dihedral angles.
    Tetvol {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        angles: Vec<f64>,
    },
    /// Compare the Lobachevsky-side limit, the tetrahedron volume and the realized growth series for θ.
    AppendixCheck {
        #[arg(long, value_delimiter = ',')]
        theta: Vec<f64>,
        #[arg(long, default_value_t = 11)]
        r_min: u32,
        #[arg(long, default_value_t = 201)]
        r_max: u32,
    },
    /// Dehn-filling volume bounds from lTV and the shortest slope length.
    FillBounds {
        #[arg(long, allow_negative_numbers = true)]
        ltv: f64,
        #[arg(long, allow_negative_numbers = true)]
        lmin: f64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Central,
    Fsl,
    Sextuples,
}

enum Failure {
    Usage(String),
    Input(String),
    Numeric(String),
    Infeasible(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::Infeasible(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Numeric(m) | Failure::Infeasible(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let m = e.to_string();
        match e {
            Error::LossOfSignificance { .. }
            | Error::ImaginaryResidue { .. }
            | Error::BranchCut(_)
            | Error::EmptyBracket { .. }
            | Error::OutsideBracket(..) => Failure::Numeric(m),
            Error::Infeasible(_) => Failure::Infeasible(m),
            Error::ScanCeiling { .. } => Failure::Usage(m),
            _ => Failure::Input(m),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn level(r: u32) -> Outcome<Level> {
    if r < 5 {
        return Err(Failure::Usage(format!("r must be odd and at least 5, got {r}")));
    }
    Level::new(r as i64).map_err(|e| Failure::Usage(e.to_string()))
}

fn levels(range: &Range) -> Outcome<Vec<u32>> {
    let rs = match range.r {
        Some(r) => vec![r],
        None => {
            if range.r_min > range.r_max {
                return Err(Failure::Usage(format!("empty range {}..{}", range.r_min, range.r_max)));
            }
            odd_range(range.r_min.max(5), range.r_max)
        }
    };
    for &r in &rs {
        level(r)?;
    }
    if rs.is_empty() {
        return Err(Failure::Usage("no odd level in range".into()));
    }
    Ok(rs)
}

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn json_out<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).unwrap() + "\n"
}

struct Ctx {
    format: Option<Format>,
    cache_dir: Option<PathBuf>,
    precision: Precision,
}

impl Ctx {
    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    /// 6j values through the disk cache when one is configured.
    fn sixj_values(&self, lvl: &Level, tuples: &[Sextuple]) -> Outcome<Vec<SignedLog>> {
        let mut cache = match &self.cache_dir {
            Some(dir) => Some(SixjCache::open(dir, lvl).map_err(|e| Failure::Input(format!("cache: {e}")))?),
            None => None,
        };
        let mut out = Vec::with_capacity(tuples.len());
        for s in tuples {
            let v = match cache.as_ref().and_then(|c| c.get(s)) {
                Some(v) => v,
                None => {
                    let v = sixj_eval(s, lvl, self.precision)?.value;
                    if let Some(c) = cache.as_mut() {
                        c.insert(s, v);
                    }
                    v
                }
            };
            out.push(v);
        }
        if let Some(c) = cache.as_mut() {
            c.save().map_err(|e| Failure::Input(format!("cache: {e}")))?;
        }
        Ok(out)
    }
}

fn growth(v: &SignedLog, r: u32) -> f64 {
    2.0 * std::f64::consts::PI / r as f64 * v.log_mag
}

fn sixj_cmd(ctx: &Ctx, r: u32, tuple: &[u32]) -> Outcome<String> {
    let lvl = level(r)?;
    let s = Sextuple(tuple.try_into().map_err(|_| Failure::Usage("--tuple needs six colors".into()))?);
    if !s.is_admissible(&lvl) {
        return Err(Failure::Input(format!("{s} is not {r}-admissible")));
    }
    let v = ctx.sixj_values(&lvl, &[s])?[0];
    let z = v.to_complex();
    let g = growth(&v, r);
    Ok(match ctx.format(Format::Json) {
        Format::Json => json_out(&json!({
            "r": r,
            "tuple": s,
            "value": [z.re, z.im],
            "magnitude": v.abs(),
            "log_magnitude": v.log_mag,
            "phase": [v.phase.re, v.phase.im],
            "growth": g,
        })),
        Format::Csv => format!(
            "r,tuple,re,im,magnitude,log_magnitude,growth\n{r},{},{},{},{},{},{}\n",
            s.0.map(|x| x.to_string()).join(" "),
            num(z.re),
            num(z.im),
            num(v.abs()),
            num(v.log_mag),
            num(g)
        ),
    })
}

fn bound_scan_cmd(ctx: &Ctx, r: u32, ceiling: u32, force: bool) -> Outcome<String> {
    let lvl = level(r)?;
    let rep = bound_scan(&lvl, &ScanOptions { ceiling, force })?;
    Ok(match ctx.format(Format::Json) {
        Format::Json => json_out(&rep),
        Format::Csv => {
            let mut out = String::from("r,max_growth,argmax,count_admissible,count_canonical,count_vanishing,count_extended\n");
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                rep.r,
                num(rep.max_growth),
                rep.argmax.0.map(|x| x.to_string()).join(" "),
                rep.count_admissible,
                rep.count_canonical,
                rep.count_vanishing,
                rep.count_extended
            )
            .unwrap();
            out
        }
    })
}

fn tv_cmd(ctx: &Ctx, input: &Path, range: &Range, even: bool, normalize: bool) -> Outcome<String> {
    let tri = load_triangulation(&read(input)?)?;
    if normalize {
        return Ok(tri.to_json() + "\n");
    }
    let set = if even { ColorSet::Even } else { ColorSet::All };
    let mut rows = Vec::new();
    for r in levels(range)? {
        rows.push(tv_state_sum_with(&tri, &level(r)?, set)?);
    }
    Ok(match ctx.format(Format::Csv) {
        Format::Json => json_out(&rows),
        Format::Csv => {
            let mut out = String::from("r,value,colorings_counted,imaginary_residue\n");
            for t in rows {
                writeln!(out, "{},{},{},{}", t.r, num(t.value), t.colorings_counted, num(t.imaginary_residue)).unwrap();
            }
            out
        }
    })
}

#[derive(Serialize)]
struct FslRow {
    r: u32,
    log_tv: f64,
    growth: f64,
    gap_to_2cv8: f64,
}

fn fsl_cmd(ctx: &Ctx, input: &Path, range: &Range) -> Outcome<String> {
    let p = load_fsl(&read(input)?)?;
    let vol = fsl_volume(&p);
    let mut rows = Vec::new();
    for r in levels(range)? {
        let t = fsl_tv(&p, &level(r)?)?;
        rows.push(FslRow { r, log_tv: t.log_tv, growth: t.growth, gap_to_2cv8: t.growth - vol });
    }
    Ok(match ctx.format(Format::Csv) {
        Format::Json => json_out(&rows),
        Format::Csv => {
            let mut out = String::from("r,log_tv,growth,gap_to_2cv8\n");
            for x in rows {
                writeln!(out, "{},{},{},{}", x.r, num(x.log_tv), num(x.growth), num(x.gap_to_2cv8)).unwrap();
            }
            out
        }
    })
}

#[derive(Deserialize)]
struct SequenceEntry {
    r: u32,
    tuple: [u32; 6],
}

fn series_out(ctx: &Ctx, s: &GrowthSeries, target: f64) -> String {
    match ctx.format(Format::Csv) {
        Format::Csv => s.to_csv(),
        Format::Json => json_out(&json!({
            "summary": s.summary(target),
            "points": s.points,
            "gaps": s.gaps,
        })),
    }
}

fn growth_cmd(ctx: &Ctx, kind: Kind, input: Option<&Path>, range: &Range, target: Option<f64>) -> Outcome<String> {
    let need_input = || input.ok_or_else(|| Failure::Usage("--input is required for this kind".into()));
    let (series, default_target) = match kind {
        Kind::Fsl => {
            let p = load_fsl(&read(need_input()?)?)?;
            let t = fsl_volume(&p);
            (growth_series(&SeriesKind::Fsl(p), &levels(range)?)?, t)
        }
        Kind::Central | Kind::Sextuples => {
            let pairs: Vec<(u32, Sextuple)> = if kind == Kind::Central {
                levels(range)?.into_iter().map(|r| Ok((r, central_tuple(&level(r)?)))).collect::<Outcome<_>>()?
            } else {
                let entries: Vec<SequenceEntry> =
                    serde_json::from_str(&read(need_input()?)?).map_err(|e| Failure::Input(e.to_string()))?;
                entries.into_iter().map(|e| (e.r, Sextuple(e.tuple))).collect()
            };
            let mut points = Vec::new();
            let mut gaps = Vec::new();
            for (r, s) in pairs {
                let lvl = level(r)?;
                if !s.is_admissible(&lvl) {
                    return Err(Failure::Input(format!("{s} is not {r}-admissible")));
                }
                let v = ctx.sixj_values(&lvl, &[s])?[0];
                if v.is_zero() {
                    gaps.push(r);
                } else {
                    points.push((r, growth(&v, r)));
                }
            }
            (GrowthSeries::from_points(points, gaps)?, V8)
        }
    };
    Ok(series_out(ctx, &series, target.unwrap_or(default_target)))
}

fn six(v: &[f64], what: &str) -> Outcome<[f64; 6]> {
    v.try_into().map_err(|_| Failure::Usage(format!("--{what} needs six values")))
}

fn tetvol_cmd(ctx: &Ctx, angles: &[f64]) -> Outcome<String> {
    let d = DihedralAngles::new(six(angles, "angles")?)?;
    let t = truncated_tet_volume_detailed(&d)?;
    Ok(match ctx.format(Format::Json) {
        Format::Json => json_out(&t),
        Format::Csv => format!("volume,degenerate\n{},{}\n", num(t.volume), t.degenerate),
    })
}

fn appendix_cmd(ctx: &Ctx, theta: &[f64], r_min: u32, r_max: u32) -> Outcome<String> {
    let theta = AngleSextuple::new(six(theta, "theta")?)?;
    let rs = levels(&Range { r: None, r_min, r_max })?;
    let check = appendix_growth_check(&theta, &rs)?;
    if check.series.points.is_empty() {
        return Err(Failure::Infeasible(format!("no level in {r_min}..={r_max} admits a color sequence for θ")));
    }
    let volume = truncated_tet_volume_detailed(&angles_from_thetas(&theta)).map(|t| t.volume).ok();
    Ok(match ctx.format(Format::Json) {
        Format::Json => json_out(&json!({
            "limit": check.limit,
            "volume": volume,
            "limit_minus_volume": volume.map(|v| check.limit - v),
            "summary": check.series.summary(check.limit),
            "gaps": check.series.gaps,
            "incoherent": check.incoherent,
            "tuples": check.tuples,
        })),
        Format::Csv => check.series.to_csv(),
    })
}

fn fill_cmd(ctx: &Ctx, ltv: f64, lmin: f64) -> Outcome<String> {
    let b = filling_volume_bounds(ltv, lmin)?;
    Ok(match ctx.format(Format::Json) {
        Format::Json => json_out(&b),
        Format::Csv => format!(
            "lower,upper,alpha,b\n{},{},{},{}\n",
            num(b.lower),
            num(b.upper),
            num(b.alpha),
            b.b.map(num).unwrap_or_default()
        ),
    })
}

fn run(cli: Cli) -> Outcome<String> {
    let g = &cli.global;
    if let Some(n) = g.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let precision = match g.precision {
        PrecisionMode::Standard => Precision::Standard,
        PrecisionMode::Extended => Precision::extended(g.digits),
    };
    let ctx = Ctx { format: g.format, cache_dir: g.cache_dir.clone(), precision };
    match &cli.command {
        Command::Sixj { r, tuple } => sixj_cmd(&ctx, *r, tuple),
        Command::BoundScan { r, ceiling, force } => bound_scan_cmd(&ctx, *r, *ceiling, *force),
        Command::TvStateSum { input, range, even, normalize } => tv_cmd(&ctx, input, range, *even, *normalize),
        Command::FslTv { input, range } => fsl_cmd(&ctx, input, range),
        Command::Growth { kind, input, range, target } => growth_cmd(&ctx, *kind, input.as_deref(), range, *target),
        Command::Tetvol { angles } => tetvol_cmd(&ctx, angles),
        Command::AppendixCheck { theta, r_min, r_max } => appendix_cmd(&ctx, theta, *r_min, *r_max),
        Command::FillBounds { ltv, lmin } => fill_cmd(&ctx, *ltv, *lmin),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let output = cli.global.output.clone();
    match run(cli) {
        Ok(text) => {
            match output {
                Some(path) => {
                    if let Err(e) = fs::write(&path, text) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
