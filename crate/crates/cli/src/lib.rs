//! The `decay` command line.
//!
//! Exit codes: 0 ok or consistent, 1 inconsistent verdict, 2 usage or I/O
//! error, 3 unresolved.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use decay_core::besov::{classify_sets, dyadic_spectrum};
use decay_core::characterization::{default_j_window, verify_characterization, Status, VerifyOptions};
use decay_core::examples::{build, frozen_corpus, ExampleMeta, Family};
use decay_core::indicators::{decay_character, decay_indicator, default_r_search, phi_sweep, RhoGrid};
use decay_core::oracle::{crosscheck_evolution, crosscheck_phi};
use decay_core::profiles::{bin_cartesian_grid, RadialProfile};
use decay_core::semigroup::{evolution_trace, fit_decay, Symbol};
use decay_core::suite::{self, ALPHAS, CRITERIA};
use decay_core::Error;
use rayon::prelude::*;
use serde_json::json;

pub mod formats;
pub mod manifest;

use formats::{parse_list, parse_profile, parse_range, to_json};
use manifest::Run;

pub const OK: i32 = 0;
pub const INCONSISTENT: i32 = 1;
pub const USAGE: i32 = 2;
pub const UNRESOLVED: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Internal(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Errors caused by the input itself, as opposed to an analysis that could
/// not reach a verdict.
fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Domain(_)
            | Error::InvalidInput(_)
            | Error::EmptyProfile
            | Error::SegmentsOverlap { .. }
            | Error::NotSquareIntegrable { .. }
            | Error::ComponentMismatch { .. }
    )
}

#[derive(Parser, Debug)]
#[command(name = "decay", version, about = "Decay characters, dyadic spectra and semigroup decay of radial L2 data")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Build a named example profile.
    Example(ExampleArgs),
    /// Turn sampled data into a profile.
    #[command(subcommand)]
    Ingest(IngestCmd),
    /// Decay indicator and characters.
    Analyze(AnalyzeArgs),
    /// Littlewood-Paley block norms and set membership.
    Spectrum(SpectrumArgs),
    /// Evolved norms and the fitted decay exponent.
    Evolve(EvolveArgs),
    /// Check that the three criteria agree.
    Verify(VerifyArgs),
    /// Run the acceptance criteria over the frozen corpus.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug)]
pub struct ExampleArgs {
    /// v0, u0log, w0, pure_power, annulus or gaussian.
    pub family: String,
    #[arg(long)]
    pub n: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub r0: Option<f64>,
    #[arg(long)]
    pub depth: Option<u32>,
    /// Number of shells of w0.
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub inner_cut: Option<f64>,
    /// Profile JSON file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum IngestCmd {
    /// CSV with header `log2_lambda,magnitude`.
    Csv {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "sampled")]
        label: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// JSON sidecar `{n, shape, dxi}` plus little-endian f64 payload.
    Grid {
        #[arg(long)]
        header: PathBuf,
        #[arg(long)]
        payload: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub profile: PathBuf,
    /// `lo:hi:step` values of r.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "auto")]
    pub r_grid: Option<String>,
    /// Search for the characters (the default).
    #[arg(long)]
    pub auto: bool,
    /// Octaves of ρ above the grid floor.
    #[arg(long)]
    pub rho_octaves: Option<f64>,
    #[arg(long)]
    pub plot: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub profile: PathBuf,
    /// `lo:hi` block indices.
    #[arg(long, allow_hyphen_values = true)]
    pub j: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: f64,
    #[arg(long)]
    pub plot: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Comma-separated dampings, one per component; a single value is repeated.
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    pub c: String,
    #[arg(long, allow_hyphen_values = true, default_value = "-2:12")]
    pub t_decades: String,
    #[arg(long, default_value_t = 8)]
    pub per_decade: usize,
    #[arg(long, default_value_t = 10)]
    pub fit_window: usize,
    #[arg(long)]
    pub plot: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub profile: PathBuf,
    /// `σ` of `Ḃ^{−σ}`; derived from the characters when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true, default_value = "0.5,1,2")]
    pub alphas: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    #[arg(long, default_value = "paper")]
    pub suite: String,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` (without the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let shown: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(std::iter::once("decay".into()).chain(args)) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { USAGE } else { OK };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("decay: {e}");
        return USAGE;
    }
    match dispatch(cli.cmd, shown) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("decay: {e}");
            USAGE
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("DECAY_THREADS") else { return Ok(()) };
    let k: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|k| *k > 0)
        .ok_or_else(|| CliError::Usage(format!("DECAY_THREADS must be a positive integer, got {v:?}")))?;
    // a pool built earlier in the same process keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    Ok(())
}

fn dispatch(cmd: Cmd, args: Vec<String>) -> Result<i32, CliError> {
    match cmd {
        Cmd::Example(a) => cmd_example(a, args),
        Cmd::Ingest(a) => cmd_ingest(a, args),
        Cmd::Analyze(a) => cmd_analyze(a, args),
        Cmd::Spectrum(a) => cmd_spectrum(a, args),
        Cmd::Evolve(a) => cmd_evolve(a, args),
        Cmd::Verify(a) => cmd_verify(a, args),
        Cmd::Reproduce(a) => cmd_reproduce(a, args),
    }
}

fn sibling_manifest(file: &Path) -> PathBuf {
    let mut name = file.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    file.with_file_name(name)
}

/// Stages `primary` at `out/name` (or prints it), plus the extras.
fn finish(
    mut run: Run,
    out: Option<&Path>,
    name: &str,
    primary: Vec<u8>,
    extras: Vec<(String, Vec<u8>)>,
    code: i32,
) -> Result<i32, CliError> {
    match out {
        Some(dir) => {
            run.stage(dir.join(name), primary);
            for (n, b) in extras {
                run.stage(dir.join(n), b);
            }
            run.commit(&dir.join("manifest.json"), code)?;
        }
        None => {
            std::io::stdout().lock().write_all(&primary).map_err(|e| CliError::Io(format!("stdout: {e}")))?;
        }
    }
    Ok(code)
}

fn single_file(mut run: Run, out: Option<&Path>, bytes: Vec<u8>) -> Result<i32, CliError> {
    match out {
        Some(f) => {
            run.stage(f.to_path_buf(), bytes);
            run.commit(&sibling_manifest(f), OK)?;
        }
        None => std::io::stdout().lock().write_all(&bytes).map_err(|e| CliError::Io(format!("stdout: {e}")))?,
    }
    Ok(OK)
}

fn load(run: &mut Run, path: &Path) -> Result<(RadialProfile, Option<ExampleMeta>), CliError> {
    parse_profile(&run.read_text(path)?)
}

fn cmd_example(a: ExampleArgs, args: Vec<String>) -> Result<i32, CliError> {
    let family = Family::parse(&a.family).ok_or_else(|| CliError::Usage(format!("unknown family {:?}", a.family)))?;
    let mut params = BTreeMap::new();
    params.insert("n".to_string(), a.n as f64);
    let opt = [
        ("r", a.r),
        ("r0", a.r0),
        ("depth", a.depth.map(f64::from)),
        ("k", a.k.map(f64::from)),
        ("inner_cut", a.inner_cut),
    ];
    for (k, v) in opt {
        if let Some(v) = v {
            params.insert(k.to_string(), v);
        }
    }
    let (p, meta) = build(family, &params)?;
    let bytes = formats::profile_json(&p, Some(&meta))?;
    single_file(Run::new("example", args), a.out.as_deref(), bytes)
}

fn cmd_ingest(a: IngestCmd, args: Vec<String>) -> Result<i32, CliError> {
    let mut run = Run::new("ingest", args);
    let (p, out) = match a {
        IngestCmd::Csv { input, n, label, out } => {
            let text = run.read_text(&input)?;
            (formats::ingest_radial_csv(&text, n, &label)?, out)
        }
        IngestCmd::Grid { header, payload, out } => {
            let h = run.read_text(&header)?;
            let bytes = run.read(&payload)?;
            let (grid, samples) = formats::read_grid(&h, &bytes)?;
            (bin_cartesian_grid(&grid, &samples)?, out)
        }
    };
    single_file(run, out.as_deref(), formats::profile_json(&p, None)?)
}

fn base_grid(p: &RadialProfile, meta: Option<&ExampleMeta>) -> RhoGrid {
    meta.map(|m| m.rho_grid.clone()).unwrap_or_else(|| RhoGrid::auto(p))
}

fn file_tag(x: f64) -> String {
    format!("{x}").replace('-', "m")
}

fn gnuplot(csv: &[String], xlabel: &str, ylabel: &str) -> Vec<u8> {
    let mut s = format!(
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel '{xlabel}'\nset ylabel '{ylabel}'\nplot "
    );
    let series: Vec<String> = csv.iter().map(|f| format!("'{f}' using 1:2 with lines")).collect();
    s.push_str(&series.join(", \\\n     "));
    s.push('\n');
    s.into_bytes()
}

fn cmd_analyze(a: AnalyzeArgs, args: Vec<String>) -> Result<i32, CliError> {
    let mut run = Run::new("analyze", args);
    let (p, meta) = load(&mut run, &a.profile)?;
    let mut grid = base_grid(&p, meta.as_ref());
    if let Some(oct) = a.rho_octaves {
        if !(oct > 0.0 && oct.is_finite()) {
            return Err(CliError::Usage(format!("--rho-octaves must be positive, got {oct}")));
        }
        grid.log2_rho_max = grid.log2_rho_min + oct;
    }
    let (report, rs, code) = match &a.r_grid {
        Some(spec) => {
            let v = parse_range(spec, 3)?;
            let (lo, hi, step) = (v[0], v[1], v[2]);
            if !(step > 0.0 && lo <= hi) || (hi - lo) / step > 1e5 {
                return Err(CliError::Usage(format!("bad --r-grid {spec:?}")));
            }
            let k = ((hi - lo) / step + 1e-9).floor() as usize;
            let rs: Vec<f64> = (0..=k).map(|i| lo + i as f64 * step).collect();
            let reps: Vec<_> = rs.par_iter().map(|r| decay_indicator(&p, *r, &grid)).collect();
            let mut code = OK;
            let mut items = Vec::new();
            for (r, rep) in rs.iter().zip(reps) {
                match rep {
                    Ok(x) => items.push(json!({ "r": r, "indicator": x })),
                    Err(e) if is_input_error(&e) => return Err(e.into()),
                    Err(e) => {
                        code = UNRESOLVED;
                        items.push(json!({ "r": r, "unresolved": e.to_string() }));
                    }
                }
            }
            (json!({ "profile": p.label(), "rho_grid": grid, "indicators": items }), rs, code)
        }
        None => match decay_character(&p, default_r_search(p.dimension()), &grid) {
            Ok(c) => {
                let mut rs: Vec<f64> = [c.r_plus.finite(), c.r_minus.finite()].into_iter().flatten().collect();
                rs.dedup();
                (json!({ "profile": p.label(), "rho_grid": grid, "character": c }), rs, OK)
            }
            Err(e) if is_input_error(&e) => return Err(e.into()),
            Err(e) => {
                (json!({ "profile": p.label(), "rho_grid": grid, "unresolved": e.to_string() }), vec![], UNRESOLVED)
            }
        },
    };
    let mut extras = Vec::new();
    let mut names = Vec::new();
    for r in rs {
        let name = format!("phi_r{}.csv", file_tag(r));
        extras.push((name.clone(), formats::phi_csv(&phi_sweep(&p, r, &grid))));
        names.push(name);
    }
    if a.plot && !names.is_empty() {
        extras.push(("phi.gp".into(), gnuplot(&names, "log2 rho", "log2 Phi_r")));
    }
    finish(run, a.out.as_deref(), "report.json", to_json(&report)?, extras, code)
}

fn window(p: &RadialProfile, meta: Option<&ExampleMeta>) -> (i64, i64) {
    match meta {
        Some(m) => suite::spectrum_window(p, m),
        None => default_j_window(p),
    }
}

fn cmd_spectrum(a: SpectrumArgs, args: Vec<String>) -> Result<i32, CliError> {
    if !(a.sigma > 0.0 && a.sigma.is_finite()) {
        return Err(CliError::Usage(format!("--sigma must be positive, got {}", a.sigma)));
    }
    let mut run = Run::new("spectrum", args);
    let (p, meta) = load(&mut run, &a.profile)?;
    let (j0, j1) = match &a.j {
        Some(s) => {
            let v = parse_range(s, 2)?;
            if v.iter().any(|x| x.fract() != 0.0) || v[0] > v[1] {
                return Err(CliError::Usage(format!("bad --j {s:?}")));
            }
            (v[0] as i64, v[1] as i64)
        }
        None => window(&p, meta.as_ref()),
    };
    let sp = dyadic_spectrum(&p, j0, j1)?;
    let (sets, code) = match classify_sets(&sp, a.sigma) {
        Ok(v) => (json!(v), OK),
        Err(e) if is_input_error(&e) => return Err(e.into()),
        Err(e) => (json!({ "unresolved": e.to_string() }), UNRESOLVED),
    };
    let report = json!({ "profile": p.label(), "j_window": [j0, j1], "orthogonality_ratio": sp.orthogonality_ratio, "sets": sets });
    let mut extras = vec![("spectrum.csv".to_string(), formats::spectrum_csv(&sp))];
    if a.plot {
        extras.push(("spectrum.gp".into(), gnuplot(&["spectrum.csv".into()], "j", "log2 e_j")));
    }
    finish(run, a.out.as_deref(), "sets.json", to_json(&report)?, extras, code)
}

fn symbol(p: &RadialProfile, alpha: f64, c: &[f64]) -> Result<Symbol, CliError> {
    let k = p.component_count();
    let dampings = if c.len() == 1 { vec![c[0]; k] } else { c.to_vec() };
    Ok(Symbol::new(alpha, dampings)?)
}

fn cmd_evolve(a: EvolveArgs, args: Vec<String>) -> Result<i32, CliError> {
    let mut run = Run::new("evolve", args);
    let (p, _) = load(&mut run, &a.profile)?;
    let sym = symbol(&p, a.alpha, &parse_list(&a.c)?)?;
    let d = parse_range(&a.t_decades, 2)?;
    if d[0] >= d[1] || a.per_decade == 0 {
        return Err(CliError::Usage(format!("bad --t-decades {:?} or --per-decade {}", a.t_decades, a.per_decade)));
    }
    let tr = match evolution_trace(&p, &sym, (d[0], d[1]), a.per_decade) {
        Ok(t) => t,
        Err(e) if is_input_error(&e) => return Err(e.into()),
        Err(e) => {
            let report = json!({ "profile": p.label(), "symbol": sym, "unresolved": e.to_string() });
            return finish(run, a.out.as_deref(), "fit.json", to_json(&report)?, vec![], UNRESOLVED);
        }
    };
    let (fit, code) = match fit_decay(&tr, a.fit_window) {
        Ok(f) => (json!(f), OK),
        Err(e) if is_input_error(&e) => return Err(e.into()),
        Err(e) => (json!({ "unresolved": e.to_string() }), UNRESOLVED),
    };
    let report = json!({ "profile": p.label(), "symbol": sym, "fit": fit });
    let mut extras = vec![("trace.csv".to_string(), formats::trace_csv(&tr))];
    if a.plot {
        let mut gp = String::from("set logscale x\n");
        gp.push_str(std::str::from_utf8(&gnuplot(&["trace.csv".into()], "t", "log2 |e^{tL} f|")).unwrap());
        extras.push(("trace.gp".into(), gp.into_bytes()));
    }
    finish(run, a.out.as_deref(), "fit.json", to_json(&report)?, extras, code)
}

fn verify_options(p: &RadialProfile, meta: Option<&ExampleMeta>) -> VerifyOptions {
    match meta {
        Some(m) => {
            let mut o = VerifyOptions::default().with_rho_grid(m.rho_grid.clone());
            o.j_window = Some(suite::spectrum_window(p, m));
            o
        }
        None => VerifyOptions::default(),
    }
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Consistent => OK,
        Status::Inconsistent => INCONSISTENT,
        Status::Unresolved => UNRESOLVED,
    }
}

fn cmd_verify(a: VerifyArgs, args: Vec<String>) -> Result<i32, CliError> {
    if let Some(s) = a.sigma {
        if !(s > 0.0 && s.is_finite()) {
            return Err(CliError::Usage(format!("--sigma must be positive, got {s}")));
        }
    }
    let mut run = Run::new("verify", args);
    let (p, meta) = load(&mut run, &a.profile)?;
    let syms = parse_list(&a.alphas)?.into_iter().map(|al| symbol(&p, al, &[1.0])).collect::<Result<Vec<_>, _>>()?;
    let opts = verify_options(&p, meta.as_ref());
    let rep = verify_characterization(&p, a.sigma, &syms, &opts)?;
    let code = status_code(rep.status);
    finish(run, a.out.as_deref(), "report.json", to_json(&rep)?, vec![], code)
}

fn safe_name(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect()
}

fn oracle_lines(corpus: &[(RadialProfile, ExampleMeta)]) -> Result<Vec<u8>, CliError> {
    let mut jobs: Vec<(usize, Option<f64>, f64)> = Vec::new();
    for (i, (_, meta)) in corpus.iter().enumerate() {
        for u in meta.structural_radii.iter().take(12).chain([-7.5, -60.0].iter()) {
            jobs.push((i, None, *u));
        }
        for alpha in ALPHAS {
            for t in [1e-2, 1.0, 1e3, 1e6] {
                jobs.push((i, Some(alpha), t));
            }
        }
    }
    let lines: Vec<String> = jobs
        .par_iter()
        .map(|(i, alpha, x)| {
            let p = &corpus[*i].0;
            let rep = match alpha {
                None => crosscheck_phi(p, 0.0, *x),
                Some(al) => Symbol::fractional(*al, 1).and_then(|s| crosscheck_evolution(p, &s, *x)),
            };
            let v = match rep {
                Ok(r) => json!({ "profile": p.label(), "alpha": alpha, "x": x, "report": r }),
                Err(e) => json!({ "profile": p.label(), "alpha": alpha, "x": x, "error": e.to_string() }),
            };
            v.to_string()
        })
        .collect();
    Ok(lines.into_iter().flat_map(|l| (l + "\n").into_bytes()).collect())
}

fn cmd_reproduce(a: ReproduceArgs, args: Vec<String>) -> Result<i32, CliError> {
    if a.suite != "paper" {
        return Err(CliError::Usage(format!("unknown suite {:?}; the only suite is \"paper\"", a.suite)));
    }
    let mut run = Run::new("reproduce", args);
    let corpus = frozen_corpus()?;
    let outcomes: Vec<suite::Outcome> = CRITERIA.par_iter().map(|id| suite::run(*id)).collect();

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["criterion", "title", "status", "failures", "detail"])
        .map_err(|e| CliError::Internal(e.to_string()))?;
    for o in &outcomes {
        let status = if o.pass() { "pass" } else { "fail" };
        w.write_record([
            o.id.to_string(),
            o.title.clone(),
            status.into(),
            o.failures.len().to_string(),
            o.detail.clone(),
        ])
        .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let summary = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;

    let dir = &a.out;
    for (p, meta) in &corpus {
        run.stage(
            dir.join("corpus").join(format!("{}.json", safe_name(p.label()))),
            formats::profile_json(p, Some(meta))?,
        );
    }
    run.stage(dir.join("oracle.jsonl"), oracle_lines(&corpus)?);
    run.stage(dir.join("outcomes.json"), to_json(&outcomes)?);
    run.stage(dir.join("summary.csv"), summary.clone());
    let code = if outcomes.iter().all(suite::Outcome::pass) { OK } else { INCONSISTENT };
    run.commit(&dir.join("manifest.json"), code)?;
    std::io::stdout().lock().write_all(&summary).map_err(|e| CliError::Io(format!("stdout: {e}")))?;
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_name_sits_next_to_file() {
        assert_eq!(sibling_manifest(Path::new("a/w0.json")), PathBuf::from("a/w0.json.manifest.json"));
    }

    #[test]
    fn tags_are_filename_safe() {
        assert_eq!(file_tag(-0.5), "m0.5");
        assert_eq!(safe_name("gaussian n=3"), "gaussian_n_3");
    }

    #[test]
    fn input_errors_map_to_usage() {
        assert!(is_input_error(&Error::Domain("x")));
        assert!(!is_input_error(&Error::IndicatorNotResolved("x".into())));
    }
}
