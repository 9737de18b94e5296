//! Command-line front end: `verify-specfun`, `verify-kernels`, `classify`,
//! `solve-linear` and `solve`.
//!
//! Every setting is resolved as flag, then config file (`key = value` lines
//! with keys named like the flags), then default. The effective values are
//! echoed to `manifest.txt` in the output directory. Failures print a line
//! starting with `REASON:` and exit with 1 for invalid input or 2 for
//! accuracy or contraction failures.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::admissibility::{classify_case, exponent_profile, matching_cases, solvability_gate, Scalar};
use crate::elliptic::{solve_inhomogeneous, DuhamelQuadrature};
use crate::error::{Result, TricomiError};
use crate::hyperbolic::duhamel_t;
use crate::kernel_verifier::{check_domination, run_family_with_refinement, BoundFamily, ProbeGrid, ProbeQuadrature};
use crate::semilinear::{
    solve_mixed, CutoffProfile, IterationTrace, LinearNonlinearity, Manufactured, Nonlinearity, PowerNonlinearity,
    ProblemSpec, SolveConfig, ZeroNonlinearity,
};
use crate::spectral_grid::{forward_transform, lp_norm, sobolev_norm, write_field, SpatialField, TimeGrid, TimeSeries, TorusGrid};
use crate::specfun::verify_specfun;

#[derive(Debug, Parser)]
#[command(name = "tricomi", version, about = "Semilinear generalized Tricomi equation toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// Flat `key = value` file; flags take precedence over its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads (0 = rayon default).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Seed for randomized sweeps.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Elliptic,
    Hyperbolic,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Residual and property sweep over λ and Kummer's function.
    VerifySpecfun {
        #[arg(long)]
        quick: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Kernel bound-function probes with refinement stability.
    VerifyKernels {
        #[arg(long)]
        quick: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Exponent profile, solvability gate and case label.
    Classify {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        l: Option<u32>,
        #[arg(long)]
        s: Option<String>,
        #[arg(long)]
        mu: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Linear Duhamel solve with a smooth bump source.
    SolveLinear {
        #[arg(long, value_enum)]
        side: Side,
        #[arg(long)]
        l: Option<u32>,
        /// Weight exponent ν of the elliptic source (default m).
        #[arg(long)]
        nu: Option<f64>,
        /// Exponent of the reported L^p norm.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        period: Option<f64>,
        /// Source support `[0, T]`.
        #[arg(long = "T")]
        t_end: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Semilinear mixed solve on `[−T0, T0]`.
    Solve {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        l: Option<u32>,
        #[arg(long)]
        s: Option<String>,
        #[arg(long)]
        mu: Option<String>,
        #[arg(long = "T0")]
        t0: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        period: Option<f64>,
        #[arg(long)]
        f_preset: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

/// Effective settings: flags over file entries over defaults.
pub struct Settings {
    file: BTreeMap<String, String>,
    effective: BTreeMap<String, String>,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(TricomiError::Parse(format!("config line {}: expected key = value, got {raw:?}", i + 1)));
        };
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

impl Settings {
    pub fn load(config: Option<&Path>) -> Result<Self> {
        let file = match config {
            Some(p) => parse_config(&fs::read_to_string(p)?)?,
            None => BTreeMap::new(),
        };
        Ok(Settings {
            file,
            effective: BTreeMap::new(),
        })
    }

    /// True when the key came from a flag or the config file.
    fn given<T>(&self, key: &str, flag: &Option<T>) -> bool {
        flag.is_some() || self.file.contains_key(key)
    }

    pub fn get<T: FromStr + Display + Clone>(&mut self, key: &str, flag: &Option<T>, default: T) -> Result<T> {
        let v = match (flag, self.file.get(key)) {
            (Some(v), _) => v.clone(),
            (None, Some(s)) => s
                .parse()
                .map_err(|_| TricomiError::Parse(format!("config key {key}: cannot parse {s:?}")))?,
            (None, None) => default,
        };
        self.effective.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    /// A setting with no flag, read from the file or defaulted.
    pub fn file_or<T: FromStr + Display + Clone>(&mut self, key: &str, default: T) -> Result<T> {
        self.get(key, &None, default)
    }

    pub fn record(&mut self, key: &str, value: impl Display) {
        self.effective.insert(key.to_string(), value.to_string());
    }

    pub fn manifest(&self) -> String {
        self.effective.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

/// Parses a rational like `1/2`, a decimal or an integer.
fn scalar(key: &str, s: &str) -> Result<Scalar> {
    s.parse::<Scalar>()
        .map_err(|_| TricomiError::Parse(format!("{key}: cannot parse {s:?} as a number")))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn set_threads(n: usize) {
    if n > 0 {
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Entry point: parses `argv`, runs the subcommand and returns the exit code.
pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let first = e.to_string().lines().next().unwrap_or("invalid arguments").to_string();
            eprint!("{e}");
            eprintln!("REASON: usage: {}", first.trim_start_matches("error: "));
            return 1;
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("REASON: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

fn run(cmd: Command) -> Result<i32> {
    match cmd {
        Command::VerifySpecfun { quick, common } => verify_specfun_cmd(quick, &common),
        Command::VerifyKernels { quick, common } => verify_kernels_cmd(quick, &common),
        Command::Classify { n, l, s, mu, config } => classify_cmd(n, l, s, mu, config),
        Command::SolveLinear {
            side,
            l,
            nu,
            p,
            grid,
            period,
            t_end,
            common,
        } => solve_linear_cmd(side, l, nu, p, grid, period, t_end, &common),
        Command::Solve {
            n,
            l,
            s,
            mu,
            t0,
            grid,
            period,
            f_preset,
            common,
        } => solve_cmd(n, l, s, mu, t0, grid, period, f_preset, &common),
    }
}

fn common_settings(common: &Common, default_out: &str) -> Result<(Settings, PathBuf, u64)> {
    let mut st = Settings::load(common.config.as_deref())?;
    let out = PathBuf::from(st.get("out-dir", &common.out_dir.as_ref().map(|p| p.display().to_string()), default_out.to_string())?);
    let threads = st.get("threads", &common.threads, 0usize)?;
    let seed = st.get("seed", &common.seed, 1u64)?;
    set_threads(threads);
    ensure_dir(&out)?;
    Ok((st, out, seed))
}

fn verify_specfun_cmd(quick: bool, common: &Common) -> Result<i32> {
    let (mut st, out, _) = common_settings(common, "out/specfun")?;
    let quick = st.get("quick", &Some(quick).filter(|&q| q), false)?;
    let report = verify_specfun(quick)?;
    fs::write(out.join("specfun_residuals.csv"), report.csv())?;
    for p in &report.properties {
        let fitted = p.fitted.map_or(String::new(), |c| format!(" fitted={c:.6e}"));
        println!("{} {}{fitted}: {}", if p.passed { "PASS" } else { "FAIL" }, p.name, p.detail);
    }
    st.record("passed", report.passed());
    fs::write(out.join("manifest.txt"), st.manifest())?;
    if report.passed() {
        Ok(0)
    } else {
        let failed: Vec<&str> = report.properties.iter().filter(|p| !p.passed).map(|p| p.name.as_str()).collect();
        eprintln!("REASON: specfun properties failed: {}", failed.join("; "));
        Ok(2)
    }
}

/// Families and `(m, ν)` pairs probed by `verify-kernels`.
pub const KERNEL_SUITE: [(BoundFamily, u32, f64); 8] = [
    (BoundFamily::P1, 1, 1.0),
    (BoundFamily::P1, 3, 3.0),
    (BoundFamily::P2, 1, 1.0),
    (BoundFamily::P2, 3, 3.0),
    (BoundFamily::P5, 1, 0.5),
    (BoundFamily::P5, 3, 1.0),
    (BoundFamily::P6, 1, 0.5),
    (BoundFamily::P6, 3, 1.0),
];

/// Probe grid of the kernel suite: 16 × 14 points split into 112
/// calibration and 112 validation probes. The `a` range is fixed in the
/// scaled variable `a^{(m+2)/2}`, the exponent of λ's decay, so every order
/// sees the same dynamic range.
pub fn kernel_probe_grid(m: u32, quick: bool) -> Result<ProbeGrid> {
    let e = 3.0 / (m as f64 + 2.0);
    if quick {
        ProbeGrid::log(0.5f64.powf(e), 4.0f64.powf(e), 6, 0.05, 0.5, 4)
    } else {
        ProbeGrid::log(0.3f64.powf(e), 6.0f64.powf(e), 16, 0.03, 0.5, 14)
    }
}

fn verify_kernels_cmd(quick: bool, common: &Common) -> Result<i32> {
    let (mut st, out, seed) = common_settings(common, "out/kernels")?;
    let quick = st.get("quick", &Some(quick).filter(|&q| q), false)?;
    let quad = ProbeQuadrature::default();
    let mut csv = String::from("family,m,nu,resolution,set,a,b,s,measured,bound,ratio\n");
    let mut all = true;
    for (family, m, nu) in KERNEL_SUITE {
        let rep = run_family_with_refinement(family, m, nu, &kernel_probe_grid(m, quick)?, &quad)?;
        for (label, r) in [("base", &rep.base), ("refined", &rep.refined)] {
            for line in r.csv().lines().skip(1) {
                csv.push_str(&format!("{},{m},{nu},{label},{line}\n", family.name()));
            }
        }
        println!("{} drift={:.4} {}", rep.base.summary(), rep.drift(), if rep.passed() { "PASS" } else { "FAIL" });
        all &= rep.passed();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (m, nu) in [(1u32, 0.5), (3, 1.0)] {
        let worst = check_domination(m, nu, if quick { 50 } else { 400 }, &mut rng)?;
        println!("domination m={m} nu={nu}: worst ratio {worst:.6e} {}", if worst <= 1.0 { "PASS" } else { "FAIL" });
        all &= worst <= 1.0;
    }
    fs::write(out.join("kernels.csv"), csv)?;
    st.record("passed", all);
    fs::write(out.join("manifest.txt"), st.manifest())?;
    if all {
        Ok(0)
    } else {
        eprintln!("REASON: kernel bound probes failed; see kernels.csv");
        Ok(2)
    }
}

fn classify_cmd(n: Option<u32>, l: Option<u32>, s: Option<String>, mu: Option<String>, config: Option<PathBuf>) -> Result<i32> {
    let mut st = Settings::load(config.as_deref())?;
    let n = st.get("n", &n, 2)?;
    let l = st.get("l", &l, 1)?;
    let s = scalar("s", &st.get("s", &s, "1/2".to_string())?)?;
    let mu = scalar("mu", &st.get("mu", &mu, "2".to_string())?)?;
    let profile = exponent_profile(n, l, s, mu)?;
    for (k, v) in profile.table() {
        println!("{k} = {v}");
    }
    for w in &profile.warnings {
        println!("warning = {w}");
    }
    let gate = solvability_gate(&profile);
    println!("gate = {}", if gate.admissible { "admissible" } else { "rejected" });
    println!("gate_reason = {}", gate.reason);
    if !gate.admissible {
        eprintln!("REASON: {}", gate.reason);
        return Ok(1);
    }
    let case = classify_case(&profile)?;
    let matches: Vec<String> = matching_cases(&profile).iter().map(|c| c.to_string()).collect();
    println!("regime = {:?}", case.regime);
    println!("case = {}", case.case_id);
    println!("matching_headers = {}", matches.join(","));
    println!("target = {} ({})", case.target.name(), case.target.description());
    if let Some(note) = &case.note {
        println!("note = {note}");
    }
    Ok(0)
}

fn bump_1d(t: f64, lo: f64, hi: f64) -> f64 {
    let u = (2.0 * t - lo - hi) / (hi - lo);
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

fn gaussian(grid: &TorusGrid, amp: f64, width: f64) -> SpatialField {
    grid.sample(|x| amp * (-x.iter().map(|v| v * v).sum::<f64>() / (2.0 * width * width)).exp())
}

fn write_snapshots(dir: &Path, prefix: &str, fields: &[SpatialField]) -> Result<()> {
    ensure_dir(dir)?;
    for (i, f) in fields.iter().enumerate() {
        write_field(&dir.join(format!("{prefix}_{i:03}.fld")), f)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn solve_linear_cmd(
    side: Side,
    l: Option<u32>,
    nu: Option<f64>,
    p: Option<f64>,
    grid: Option<usize>,
    period: Option<f64>,
    t_end: Option<f64>,
    common: &Common,
) -> Result<i32> {
    let (mut st, out, _) = common_settings(common, "out/linear")?;
    let l = st.get("l", &l, 1u32)?;
    if l == 0 {
        return Err(TricomiError::domain("l must be at least 1"));
    }
    let m = 2 * l - 1;
    let points = st.get("grid", &grid, 32usize)?;
    let period = st.get("period", &period, 16.0)?;
    let t_end = st.get("T", &t_end, 1.0)?;
    let p = st.get("p", &p, 4.0)?;
    let gamma = st.file_or("gamma", 0.5)?;
    if !(t_end > 0.0) {
        return Err(TricomiError::domain(format!("T must be positive, got {t_end}")));
    }
    let space = TorusGrid::cube(2, points, period)?;
    let shape = gaussian(&space, 1.0, 1.0);
    let source_grid = TimeGrid::graded(0.0, t_end, 6, 10)?;
    let g = TimeSeries::from_fn(source_grid, |t| shape.scaled(bump_1d(t, 0.0, t_end)))?;
    let evals: Vec<f64> = (0..=16).map(|k| t_end * k as f64 / 16.0).collect();
    let (label, snapshots) = match side {
        Side::Elliptic => {
            let nu = st.get("nu", &nu, m as f64)?;
            let quad = DuhamelQuadrature {
                sigma_cutoff: t_end,
                ..DuhamelQuadrature::default()
            };
            let sol = solve_inhomogeneous(m, nu, &g, &quad, &evals)?;
            write_field(&out.join("initial_slope.fld"), &sol.initial_slope)?;
            ("tau", sol.snapshots)
        }
        Side::Hyperbolic => ("t", duhamel_t(l, &g, &evals)?),
    };
    write_snapshots(&out.join("fields"), "w", &snapshots)?;
    let mut csv = format!("{label},L2,Lp,Hs\n");
    for (t, f) in evals.iter().zip(&snapshots) {
        csv.push_str(&format!(
            "{t:.17e},{:.17e},{:.17e},{:.17e}\n",
            lp_norm(f, 2.0)?,
            lp_norm(f, p)?,
            sobolev_norm(&forward_transform(f)?, gamma)
        ));
    }
    fs::write(out.join("norms.csv"), csv)?;
    st.record("side", format!("{side:?}").to_lowercase());
    fs::write(out.join("manifest.txt"), st.manifest())?;
    Ok(0)
}

fn trace_rows(csv: &mut String, side: &str, trace: &IterationTrace) {
    for (k, d) in trace.diffs.iter().enumerate() {
        let ratio = if k > 0 && trace.diffs[k - 1] > 0.0 {
            format!("{:.17e}", d / trace.diffs[k - 1])
        } else {
            "nan".to_string()
        };
        csv.push_str(&format!("{},{d:.17e},{ratio},{side}\n", k + 1));
    }
}

#[allow(clippy::too_many_arguments)]
fn solve_cmd(
    n: Option<u32>,
    l: Option<u32>,
    s: Option<String>,
    mu: Option<String>,
    t0: Option<f64>,
    grid: Option<usize>,
    period: Option<f64>,
    f_preset: Option<String>,
    common: &Common,
) -> Result<i32> {
    let (mut st, out, seed) = common_settings(common, "out/solve")?;
    let mu_given = st.given("mu", &mu);
    let n = st.get("n", &n, 2u32)?;
    let l = st.get("l", &l, 1u32)?;
    let s = scalar("s", &st.get("s", &s, "1/2".to_string())?)?;
    let mu_val = scalar("mu", &st.get("mu", &mu, "2".to_string())?)?;
    let points = st.get("grid", &grid, 64usize)?;
    let period = st.get("period", &period, 16.0)?;
    let preset = st.get("f-preset", &f_preset, "power".to_string())?;
    let defaults = SolveConfig::default();
    let cfg = SolveConfig {
        t0: st.get("T0", &t0, defaults.t0)?,
        shrink_factor: st.file_or("shrink-factor", defaults.shrink_factor)?,
        max_shrinks: st.file_or("max-shrinks", defaults.max_shrinks)?,
        picard_tol: st.file_or("picard-tol", defaults.picard_tol)?,
        picard_max_iters: st.file_or("picard-max-iters", defaults.picard_max_iters)?,
        cutoff: CutoffProfile::parse(&st.file_or("cutoff", defaults.cutoff.name().to_string())?)?,
        time_panels: st.file_or("time-panels", defaults.time_panels)?,
        ramp_panels: st.file_or("ramp-panels", defaults.ramp_panels)?,
        nodes_per_panel: st.file_or("nodes-per-panel", defaults.nodes_per_panel)?,
        y_nodes: st.file_or("y-nodes", defaults.y_nodes)?,
        seed,
    };
    let amplitude = st.file_or("amplitude", 0.5)?;
    let coupling = st.file_or("coupling", 1.0)?;
    let radius = st.file_or("radius", 4.0)?;
    if !(1..=3).contains(&n) {
        return Err(TricomiError::domain(format!("n must be 1, 2 or 3 on the periodic grid, got {n}")));
    }
    if l == 0 {
        return Err(TricomiError::domain("l must be at least 1"));
    }
    cfg.validate()?;
    let space = TorusGrid::cube(n as usize, points, period)?;
    let phi = gaussian(&space, amplitude, 1.0);
    let mut manufactured: Option<Arc<Manufactured>> = None;
    let f: Arc<dyn Nonlinearity> = match preset.as_str() {
        "zero" => Arc::new(ZeroNonlinearity),
        "linear" => Arc::new(LinearNonlinearity { coefficient: coupling, radius }),
        "power" => Arc::new(PowerNonlinearity {
            coefficient: coupling,
            radius,
            mu: mu_val,
        }),
        "manufactured" => {
            let horizon = st.file_or("horizon", cfg.t0 / 2.0)?;
            let eta = space.sample(|x| {
                let r2: f64 = x.iter().enumerate().map(|(i, v)| (v - if i == 0 { 1.0 } else { -0.5 }).powi(2)).sum();
                0.6 * amplitude * (-r2 / (2.0 * 1.44)).exp()
            });
            let mf = Arc::new(Manufactured::new(l, &phi, &eta, horizon, 0.5 * coupling, radius)?);
            manufactured = Some(mf.clone());
            mf
        }
        other => {
            return Err(TricomiError::domain(format!(
                "f-preset must be one of zero, linear, power, manufactured; got {other:?}"
            )))
        }
    };
    if mu_given && f.mu() != mu_val {
        return Err(TricomiError::domain(format!(
            "preset {preset} has μ = {}, inconsistent with mu = {mu_val}",
            f.mu()
        )));
    }
    let problem = ProblemSpec::new(l, s, phi, f);
    let result = solve_mixed(&problem, &cfg);
    let sol = match result {
        Ok(sol) => sol,
        Err(TricomiError::NonContraction { reason, diffs }) => {
            let mut csv = String::from("iter,diff_norm,ratio,side\n");
            trace_rows(&mut csv, "failed", &IterationTrace::from_diffs(&diffs));
            fs::write(out.join("trace.csv"), csv)?;
            st.record("status", "non-contraction");
            fs::write(out.join("manifest.txt"), st.manifest())?;
            return Err(TricomiError::NonContraction { reason, diffs });
        }
        Err(e) => return Err(e),
    };

    let mut csv = String::from("t,L2,Lp0,Lp1,Hs\n");
    for r in &sol.norms {
        csv.push_str(&format!("{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n", r.t, r.l2, r.lp0, r.lp1, r.hs));
    }
    fs::write(out.join("norms.csv"), csv)?;
    let mut csv = String::from("iter,diff_norm,ratio,side\n");
    trace_rows(&mut csv, "elliptic", &sol.elliptic.trace);
    trace_rows(&mut csv, "hyperbolic", &sol.hyperbolic.trace);
    fs::write(out.join("trace.csv"), csv)?;
    write_snapshots(&out.join("fields"), "u", &sol.snapshots)?;
    write_field(&out.join("slope_at_zero.fld"), &sol.slope_at_zero)?;

    let el = crate::semilinear::contraction_diagnostics(&sol.elliptic.trace);
    let hy = crate::semilinear::contraction_diagnostics(&sol.hyperbolic.trace);
    st.record("status", "ok");
    st.record("case", sol.case.case_id);
    st.record("target", sol.case.target.name());
    st.record("T0.elliptic", sol.elliptic.t0);
    st.record("T0.hyperbolic", sol.hyperbolic.t0);
    st.record("ratio.elliptic", el.fitted_ratio.map_or("undefined".into(), |r| format!("{r:.17e}")));
    st.record("ratio.hyperbolic", hy.fitted_ratio.map_or("undefined".into(), |r| format!("{r:.17e}")));
    st.record("patch.value_jump", format!("{:.17e}", sol.patch.value_jump));
    st.record("patch.slope_mismatch", format!("{:.17e}", sol.patch.slope_mismatch));
    st.record("snapshots", sol.snapshots.len());
    if let Some(mf) = manufactured {
        let mut worst = 0.0f64;
        for (&t, u) in sol.times.iter().zip(&sol.snapshots) {
            let e = mf.exact(t)?;
            worst = worst.max(lp_norm(&u.axpy(-1.0, &e)?, 2.0)? / lp_norm(&e, 2.0)?);
        }
        st.record("manufactured.max_rel_l2_error", format!("{worst:.17e}"));
    }
    fs::write(out.join("manifest.txt"), st.manifest())?;
    println!(
        "case {} ({}), T0 = {} / {}, ratios {:?} / {:?}, slope mismatch {:.3e}",
        sol.case.case_id,
        sol.case.target.name(),
        sol.elliptic.t0,
        sol.hyperbolic.t0,
        el.fitted_ratio,
        hy.fitted_ratio,
        sol.patch.slope_mismatch
    );
    Ok(0)
}
