//! Command-line front end: argument types, file formats and command runners.
//!
//! `run` never exits the process; it returns the text to print and the exit
//! code so that commands can be driven from tests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use linfb_core::duality::{verify_random_designs, DualityBatch};
use linfb_core::mimo::{
    search_feedback_design_with, ChannelSpec, DesignForm, Direction, FeedbackDesign, SearchOptions,
};
use linfb_core::simkit::{verify_power_lemma, verify_recursions, RngSpec};
use linfb_core::siso::{
    k_user_symmetric_sum_capacity, mac_siso_nofb_region, mac_siso_region, mac_siso_sum_capacity, miso_mac_region,
    nofb_bc_siso_region, phi_diagnostic, phi_k, rho_residual, rho_star, simo_mac_region, PhiVariant, SimoBeta,
};
use linfb_core::{DenseMatrix, LinfbError, RegionFrontier};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "linfb", version, about = "Linear-feedback capacity regions of two-user Gaussian MACs and BCs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve Ozarow's correlation equation.
    RhoStar(RhoArgs),
    /// Emit a capacity-region frontier.
    Region(RegionArgs),
    /// Sum-capacity of the scalar or K-user symmetric channel.
    SumCapacity(SumArgs),
    /// Check the MAC/BC duality identities on random designs.
    DualityCheck(DualityArgs),
    /// Random search for a good feedback design at fixed block length.
    Search(SearchArgs),
    /// Monte-Carlo power and recursion check of a design file.
    Simulate(SimulateArgs),
    /// Re-read a region file and emit it in another format.
    Convert(ConvertArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Channel {
    Mac,
    Bc,
}

impl From<Channel> for Direction {
    fn from(c: Channel) -> Self {
        match c {
            Channel::Mac => Direction::Mac,
            Channel::Bc => Direction::Bc,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Siso,
    Miso,
    Simo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SumModel {
    Siso,
    #[value(name = "k-user")]
    KUser,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct RhoArgs {
    #[arg(long)]
    pub h1: f64,
    #[arg(long)]
    pub h2: f64,
    #[arg(long)]
    pub p1: f64,
    #[arg(long)]
    pub p2: f64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct RegionArgs {
    #[arg(long, value_enum, default_value = "mac")]
    pub channel: Channel,
    #[arg(long, value_enum, default_value = "siso")]
    pub model: Model,
    /// Gain, or comma-separated vector for miso/simo.
    #[arg(long)]
    pub h1: String,
    #[arg(long)]
    pub h2: String,
    #[arg(long)]
    pub power: f64,
    #[arg(long, default_value_t = 101)]
    pub alpha_grid: usize,
    #[arg(long, default_value_t = 101)]
    pub rho_grid: usize,
    /// Union over this many correlation values for simo (0: use the channel cosine).
    #[arg(long, default_value_t = 0)]
    pub beta_grid: usize,
    /// Emit the no-feedback region instead (siso only).
    #[arg(long)]
    pub no_feedback: bool,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SumArgs {
    #[arg(long, value_enum, default_value = "siso")]
    pub model: SumModel,
    #[arg(long, value_enum, default_value = "mac")]
    pub channel: Channel,
    #[arg(long, default_value_t = 1.0)]
    pub h1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub h2: f64,
    /// Common gain of the K-user channel.
    #[arg(long, default_value_t = 1.0)]
    pub h: f64,
    #[arg(long)]
    pub power: f64,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// `printed` or `exponent-K`.
    #[arg(long, default_value = "exponent-K")]
    pub variant: String,
}

#[derive(Debug, Args)]
pub struct DualityArgs {
    /// Largest block length; every eta in 1..=N is checked.
    #[arg(long, default_value_t = 3)]
    pub eta: usize,
    /// Comma-separated channel shapes `RxC` (receive × transmit antennas).
    #[arg(long, default_value = "1x1,2x2")]
    pub dims: String,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Force the second feedback matrix to zero.
    #[arg(long)]
    pub one_sided: bool,
    /// Perturb the mapped design (negative control).
    #[arg(long, hide = true)]
    pub corrupt: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Channel description shared by `search` and `simulate`.
#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SpecArgs {
    #[arg(long, value_enum, default_value = "mac")]
    pub channel: Channel,
    /// Matrix rows separated by `;`, entries by `,`; a bare number is SISO.
    #[arg(long)]
    pub h1: String,
    #[arg(long)]
    pub h2: String,
    #[arg(long)]
    pub power: f64,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub eta: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 65)]
    pub rate_grid: usize,
    /// Directory receiving `design.json`, `frontier.csv` and `frontier.json`.
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub design: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Samples for the recursion check (A and C forms).
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(LinfbError),
    Io(PathBuf, std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<LinfbError> for CliError {
    fn from(e: LinfbError) -> Self {
        CliError::Core(e)
    }
}

/// Everything a command produces besides the files it writes.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { code: EXIT_OK, stdout }
    }
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::RhoStar(a) => cmd_rho_star(&a),
        Command::Region(a) => cmd_region(&a),
        Command::SumCapacity(a) => cmd_sum_capacity(&a),
        Command::DualityCheck(a) => cmd_duality_check(&a),
        Command::Search(a) => cmd_search(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Convert(a) => cmd_convert(&a),
    }
}

/// Size the global rayon pool from `LINFB_THREADS`, if set.
pub fn configure_threads(value: Option<&str>) -> Result<(), CliError> {
    let Some(v) = value else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("LINFB_THREADS must be a positive integer, got {v:?}")))?;
    // a second initialisation in the same process is harmless
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn usage(flag: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("invalid value for --{flag}: {msg}"))
}

fn nonneg(flag: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() && x >= 0.0 {
        Ok(x)
    } else {
        Err(usage(flag, format!("must be a finite nonnegative number, got {x}")))
    }
}

fn positive(flag: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(usage(flag, format!("must be a finite positive number, got {x}")))
    }
}

fn finite(flag: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(usage(flag, "must be finite"))
    }
}

fn grid(flag: &str, n: usize) -> Result<usize, CliError> {
    if n >= 2 {
        Ok(n)
    } else {
        Err(usage(flag, format!("grid needs at least 2 points, got {n}")))
    }
}

pub fn parse_vector(flag: &str, s: &str) -> Result<Vec<f64>, CliError> {
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| usage(flag, format!("{t:?} is not a number"))))
        .collect::<Result<Vec<_>, _>>()?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(usage(flag, "entries must be finite"));
    }
    Ok(v)
}

/// `"a,b;c,d"` → 2×2, `"a"` → 1×1.
pub fn parse_matrix(flag: &str, s: &str) -> Result<DenseMatrix, CliError> {
    let rows = s.split(';').map(|r| parse_vector(flag, r)).collect::<Result<Vec<_>, _>>()?;
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(usage(flag, "rows have different lengths"));
    }
    Ok(DenseMatrix::from_row_slice(rows.len(), cols, &rows.concat()))
}

fn scalar(flag: &str, s: &str) -> Result<f64, CliError> {
    match parse_vector(flag, s)?.as_slice() {
        [x] => Ok(*x),
        v => Err(usage(flag, format!("siso expects one gain, got {} entries", v.len()))),
    }
}

impl SpecArgs {
    pub fn to_spec(&self) -> Result<ChannelSpec, CliError> {
        let p = positive("power", self.power)?;
        let h1 = parse_matrix("h1", &self.h1)?;
        let h2 = parse_matrix("h2", &self.h2)?;
        if h1.ncols() != h2.ncols() {
            return Err(usage("h2", format!("needs {} columns to match --h1, got {}", h1.ncols(), h2.ncols())));
        }
        Ok(ChannelSpec::new(h1, h2, p, self.channel.into())?)
    }
}

fn cmd_rho_star(a: &RhoArgs) -> Result<Outcome, CliError> {
    let (h1, h2) = (finite("h1", a.h1)?, finite("h2", a.h2)?);
    let (p1, p2) = (nonneg("p1", a.p1)?, nonneg("p2", a.p2)?);
    let rho = rho_star(h1, h2, p1, p2);
    let res = rho_residual(h1, h2, p1, p2, rho);
    Ok(Outcome::ok(format!("rho = {rho:.17}\nresidual = {res:e}\n")))
}

/// Region of the requested model. BC requests are answered on the dual MAC:
/// the transposed channels swap the roles of MISO and SIMO.
pub fn region_frontier(a: &RegionArgs) -> Result<RegionFrontier, CliError> {
    let p = positive("power", a.power)?;
    let ag = grid("alpha-grid", a.alpha_grid)?;
    let rg = grid("rho-grid", a.rho_grid)?;
    let beta = match a.beta_grid {
        0 => SimoBeta::FromChannel,
        n => SimoBeta::Union(grid("beta-grid", n)?),
    };
    if a.no_feedback {
        if a.model != Model::Siso {
            return Err(usage("no-feedback", "only available with --model siso"));
        }
        let (h1, h2) = (scalar("h1", &a.h1)?, scalar("h2", &a.h2)?);
        let f = match a.channel {
            Channel::Mac => mac_siso_nofb_region(h1, h2, p, ag)?,
            Channel::Bc => nofb_bc_siso_region(h1, h2, p, ag)?.with_meta("channel", "bc"),
        };
        return Ok(f);
    }
    let dual_model = match (a.channel, a.model) {
        (Channel::Bc, Model::Miso) => Model::Simo,
        (Channel::Bc, Model::Simo) => Model::Miso,
        (_, m) => m,
    };
    let f = match dual_model {
        Model::Siso => mac_siso_region(scalar("h1", &a.h1)?, scalar("h2", &a.h2)?, p, ag, rg)?,
        Model::Miso => miso_mac_region(&parse_vector("h1", &a.h1)?, &parse_vector("h2", &a.h2)?, p, ag, rg)?,
        Model::Simo => {
            let (h1, h2) = (parse_vector("h1", &a.h1)?, parse_vector("h2", &a.h2)?);
            if h1.len() != h2.len() {
                return Err(usage("h2", format!("needs {} entries to match --h1", h1.len())));
            }
            simo_mac_region(&h1, &h2, p, ag, rg, beta)?
        }
    };
    Ok(match a.channel {
        Channel::Mac => f.with_meta("channel", "mac"),
        Channel::Bc => f.with_meta("channel", "bc").with_meta("via", "duality"),
    })
}

fn cmd_region(a: &RegionArgs) -> Result<Outcome, CliError> {
    let f = region_frontier(a)?;
    emit(&render(&f, a.format), a.output.as_deref())
}

fn emit(text: &str, output: Option<&Path>) -> Result<Outcome, CliError> {
    match output {
        Some(p) => {
            write_file(p, text)?;
            Ok(Outcome::ok(String::new()))
        }
        None => Ok(Outcome::ok(text.to_string())),
    }
}

fn write_file(p: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(p, text).map_err(|e| CliError::Io(p.to_path_buf(), e))
}

fn read_file(p: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(p).map_err(|e| CliError::Io(p.to_path_buf(), e))
}

fn cmd_sum_capacity(a: &SumArgs) -> Result<Outcome, CliError> {
    let p = nonneg("power", a.power)?;
    match a.model {
        SumModel::Siso => {
            let c = mac_siso_sum_capacity(finite("h1", a.h1)?, finite("h2", a.h2)?, p)?;
            let via = if a.channel == Channel::Bc { " (via duality)" } else { "" };
            Ok(Outcome::ok(format!("sum_capacity = {c:.17}{via}\n")))
        }
        SumModel::KUser => {
            let variant = PhiVariant::parse(&a.variant)
                .ok_or_else(|| usage("variant", format!("expected printed or exponent-K, got {:?}", a.variant)))?;
            if a.k < 2 {
                return Err(usage("k", format!("must be at least 2, got {}", a.k)));
            }
            let snr = finite("h", a.h)?.powi(2) * p;
            match phi_k(a.k, snr, variant) {
                Ok(phi) => {
                    let c = k_user_symmetric_sum_capacity(a.k, snr, variant)?;
                    Ok(Outcome::ok(format!("phi = {phi:.17}\nsum_capacity = {c:.17}\n")))
                }
                Err(LinfbError::NoRoot { .. }) => {
                    let d = phi_diagnostic(a.k, snr, variant);
                    Ok(Outcome::ok(format!(
                        "variant {} has no root in [1, {}]\nresidual_at_1 = {:e}\nresidual_at_k = {:e}\nmin_abs_residual = {:e} at phi = {}\n",
                        variant.name(),
                        a.k,
                        d.residual_at_1,
                        d.residual_at_k,
                        d.min_abs_residual,
                        d.argmin
                    )))
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

/// `"2x3"` → (2, 3); a bare `"1"` is SISO.
pub fn parse_dims(s: &str) -> Result<Vec<(usize, usize)>, CliError> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            let parts: Vec<&str> = t.split('x').collect();
            let nums = parts.iter().map(|p| p.parse::<usize>()).collect::<Result<Vec<_>, _>>();
            match (parts.len(), nums) {
                (1, Ok(n)) if n[0] > 0 => Ok((n[0], n[0])),
                (2, Ok(n)) if n[0] > 0 && n[1] > 0 => Ok((n[0], n[1])),
                _ => Err(usage("dims", format!("expected RxC, got {t:?}"))),
            }
        })
        .collect()
}

/// Channel with standard normal entries; deterministic in `seed`.
pub fn random_spec(rows: usize, cols: usize, seed: u64) -> Result<ChannelSpec, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = || DenseMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut rng));
    let (h1, h2) = (m(), m());
    Ok(ChannelSpec::new(h1, h2, 1.0 + rows as f64, Direction::Mac)?)
}

#[derive(Serialize)]
struct DualityRun {
    dims: String,
    eta: usize,
    batch: DualityBatch,
}

#[derive(Serialize)]
struct DualitySummary {
    passed: bool,
    seed: u64,
    trials: usize,
    runs: Vec<DualityRun>,
}

fn cmd_duality_check(a: &DualityArgs) -> Result<Outcome, CliError> {
    if !(1..=4).contains(&a.eta) {
        return Err(usage("eta", format!("must be in 1..=4, got {}", a.eta)));
    }
    if a.trials == 0 {
        return Err(usage("trials", "must be at least 1"));
    }
    let mut runs = Vec::new();
    for (k, (r, c)) in parse_dims(&a.dims)?.into_iter().enumerate() {
        let spec = random_spec(r, c, a.seed.wrapping_add(1_000_003 * k as u64))?;
        for eta in 1..=a.eta {
            let batch = verify_random_designs(&spec, eta, a.trials, a.seed, a.one_sided, a.corrupt)?;
            runs.push(DualityRun { dims: format!("{r}x{c}"), eta, batch });
        }
    }
    let passed = runs.iter().all(|r| r.batch.passed);
    let summary = DualitySummary { passed, seed: a.seed, trials: a.trials, runs };
    if let Some(p) = &a.output {
        write_file(p, &(serde_json::to_string_pretty(&summary).expect("report serializes") + "\n"))?;
    }
    let worst = summary
        .runs
        .iter()
        .max_by(|x, y| x.batch.worst.max_residual().total_cmp(&y.batch.worst.max_residual()))
        .expect("at least one run");
    let mut out = String::new();
    for r in &summary.runs {
        let _ = writeln!(
            out,
            "dims {} eta {}: max residual {:.3e} ({}) {}",
            r.dims,
            r.eta,
            r.batch.worst.max_residual(),
            r.batch.worst_residual,
            if r.batch.passed { "ok" } else { "FAIL" }
        );
    }
    let _ = writeln!(
        out,
        "worst: {} = {:.3e} (dims {}, eta {}, trial {})",
        worst.batch.worst_residual,
        worst.batch.worst.max_residual(),
        worst.dims,
        worst.eta,
        worst.batch.worst_trial
    );
    Ok(Outcome { code: if passed { EXIT_OK } else { EXIT_VERIFY }, stdout: out })
}

fn cmd_search(a: &SearchArgs) -> Result<Outcome, CliError> {
    let spec = a.spec.to_spec()?;
    if !(1..=4).contains(&a.eta) {
        return Err(usage("eta", format!("must be in 1..=4, got {}", a.eta)));
    }
    if a.trials == 0 {
        return Err(usage("trials", "must be at least 1"));
    }
    let opts = SearchOptions { rate_grid: grid("rate-grid", a.rate_grid)?, ..SearchOptions::default() };
    let r = search_feedback_design_with(&spec, a.eta, a.trials, a.seed, opts)?;
    let dir = &a.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.clone(), e))?;
    write_file(&dir.join("design.json"), &r.best.to_json())?;
    write_file(&dir.join("frontier.csv"), &to_csv(&r.frontier))?;
    write_file(&dir.join("frontier.json"), &to_json(&r.frontier))?;
    let max_trial = r.trial_sum_rates.iter().chain(&r.refinement_sum_rates).fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    Ok(Outcome::ok(format!(
        "best_sum_rate = {:.17}\nmax_evaluated_sum_rate = {:.17}\nform = {}\n",
        r.best_sum_rate,
        max_trial,
        r.best.form.name()
    )))
}

#[derive(Serialize)]
struct SimulateReport {
    passed: bool,
    power: linfb_core::simkit::PowerReport,
    recursion: Option<linfb_core::simkit::RecursionReport>,
}

fn cmd_simulate(a: &SimulateArgs) -> Result<Outcome, CliError> {
    let spec = a.spec.to_spec()?;
    let design = FeedbackDesign::from_json(&read_file(&a.design)?, &spec).map_err(|e| usage("design", e))?;
    if a.trials < 2 {
        return Err(usage("trials", "must be at least 2"));
    }
    let power = verify_power_lemma(&design, &spec, a.trials, &RngSpec::new(a.seed, "power"), None)?;
    let recursion = match design.form {
        DesignForm::A | DesignForm::C => Some(verify_recursions(&design, &spec, a.samples, &RngSpec::new(a.seed, "recursion"))?),
        DesignForm::B | DesignForm::D => None,
    };
    let passed = power.passed && recursion.as_ref().is_none_or(|r| r.max_error < 1e-10);
    let report = SimulateReport { passed, power, recursion };
    if let Some(p) = &a.output {
        write_file(p, &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"))?;
    }
    let mut out = format!(
        "empirical = {:.9}\nanalytic = {:.9}\nstandard_error = {:.3e}\nidentity_residual = {:.3e}\n",
        report.power.empirical, report.power.analytic, report.power.standard_error, report.power.identity_residual
    );
    if let Some(r) = &report.recursion {
        let _ = writeln!(out, "recursion_max_error = {:.3e}", r.max_error);
    }
    let _ = writeln!(out, "{}", if passed { "ok" } else { "FAIL" });
    Ok(Outcome { code: if passed { EXIT_OK } else { EXIT_VERIFY }, stdout: out })
}

fn cmd_convert(a: &ConvertArgs) -> Result<Outcome, CliError> {
    let text = read_file(&a.input)?;
    let f = parse_region(&text).map_err(|m| usage("input", m))?;
    emit(&render(&f, a.format), a.output.as_deref())
}

// ---- file formats ----

pub fn render(f: &RegionFrontier, format: Format) -> String {
    match format {
        Format::Csv => to_csv(f),
        Format::Json => to_json(f),
        Format::Svg => to_svg(f),
    }
}

/// Decimal with 12 significant digits. The digit count is taken after
/// rounding, so re-formatting a parsed value reproduces the same text.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("exponent");
    let decimals = (11 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn to_csv(f: &RegionFrontier) -> String {
    let mut s = String::from("R1,R2\n");
    for &(a, b) in &f.points {
        let _ = writeln!(s, "{},{}", sig12(a), sig12(b));
    }
    s
}

pub fn to_json(f: &RegionFrontier) -> String {
    serde_json::to_string_pretty(f).expect("frontier serializes") + "\n"
}

/// Accepts either a CSV or a JSON region file.
pub fn parse_region(text: &str) -> Result<RegionFrontier, String> {
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(text).map_err(|e| e.to_string());
    }
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("R1,R2") {
        return Err("missing R1,R2 header".into());
    }
    let points = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (a, b) = l.split_once(',').ok_or_else(|| format!("bad row {l:?}"))?;
            let p = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?}"));
            Ok((p(a)?, p(b)?))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(RegionFrontier { points, meta: Default::default() })
}

pub fn to_svg(f: &RegionFrontier) -> String {
    let (w, h, m) = (480.0, 480.0, 48.0);
    let xmax = f.points.iter().map(|p| p.0).fold(0.0, f64::max).max(1e-12);
    let ymax = f.points.iter().map(|p| p.1).fold(0.0, f64::max).max(1e-12);
    let sx = |x: f64| m + x / xmax * (w - 2.0 * m);
    let sy = |y: f64| h - m - y / ymax * (h - 2.0 * m);
    // close the region onto both axes
    let mut pts = vec![(0.0, f.points.first().map_or(0.0, |p| p.1))];
    pts.extend(f.points.iter().copied());
    pts.push((f.points.last().map_or(0.0, |p| p.0), 0.0));
    let poly: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.3},{:.3}", sx(x), sy(y))).collect();
    let title = f.meta.get("kind").map_or("region", String::as_str);
    format!(
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">
  <line x1="{m}" y1="{yb}" x2="{xr}" y2="{yb}" stroke="black"/>
  <line x1="{m}" y1="{yb}" x2="{m}" y2="{m}" stroke="black"/>
  <polyline fill="none" stroke="steelblue" stroke-width="2" points="{poly}"/>
  <text x="{xr}" y="{xl}" text-anchor="end" font-size="12">R1 (max {xmax:.4})</text>
  <text x="{m}" y="{yl}" font-size="12">R2 (max {ymax:.4})</text>
  <text x="{cx}" y="20" text-anchor="middle" font-size="14">{title}</text>
</svg>
"#,
        yb = h - m,
        xr = w - m,
        xl = h - m + 20.0,
        yl = m - 8.0,
        cx = w / 2.0,
        poly = poly.join(" "),
    )
}
