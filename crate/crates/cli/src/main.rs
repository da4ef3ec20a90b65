//! `fockwit` command-line front end.
//!
//! Exit codes: 0 success, 2 input error, 3 truncation unsafe. An evaluation
//! that ran exits 0 whatever the verdicts are.
//!
//! Operator expressions (`verify --moment`) use the monomial text syntax:
//! modes are lettered `a, b, c, …` and separated by `|`; each segment is a
//! normal-ordered product such as `ad^2 a` (`ad` = creation, `a` = annihilation,
//! `^p` a power, factors joined by spaces or `*`). `1` is the identity,
//! e.g. `ad a | bd b` is `N_a N_b`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use fockwit::criteria::{
    evaluate_many, verify_f_bound_with, CriterionId, EvalConfig, Evaluation, FGrid, DEFAULT_MN_MAX,
    DEFAULT_PHI_GRID, DEFAULT_TOLERANCE,
};
use fockwit::fock::DEFAULT_GUARD_EPSILON;
use fockwit::moments::expect;
use fockwit::ppt::ppt_check;
use fockwit::report::{self, round_sig};
use fockwit::sampler::{sample_separable_mixture, RNG_NAME};
use fockwit::states::{
    alternating_even_cutoff, coherent_cutoff, gen_alternating_even, gen_bell01, gen_ghz_like,
    gen_mixed_s, gen_product_coherent, gen_tmsv, tmsv_cutoff,
};
use fockwit::sweep::{run_sweep, SweepFamily, SweepRange};
use fockwit::{Complex64, Error, FockState, OperatorMonomial};

const EXIT_INPUT: u8 = 2;
const EXIT_TRUNCATION: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "fockwit",
    version,
    about = "Moment-based entanglement criteria on truncated Fock spaces"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Relative tolerance for verdicts
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Guard-band weight limit. `evaluate` only checks the guard band when this is given.
    #[arg(long = "guard-eps", global = true)]
    guard_eps: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Base seed for sampling
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write an example state as a JSON state file
    Generate(GenerateArgs),
    /// Evaluate criteria on one or more state files
    Evaluate(EvaluateArgs),
    /// Sweep a generator parameter against one criterion
    Sweep(SweepArgs),
    /// Write seeded separable states and a manifest
    SampleSeparable(SampleArgs),
    /// Independent checks: partial transpose, single moments, guard band, F bound
    Verify(VerifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Generator {
    Bell01,
    MixedS,
    Tmsv,
    AltEven,
    Ghz3,
    Coherent,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(value_enum)]
    name: Generator,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    x: Option<f64>,
    /// One `re,im` pair per mode (repeat the flag)
    #[arg(long, allow_hyphen_values = true)]
    alpha: Vec<String>,
    /// Per-mode cutoff; chosen automatically when omitted
    #[arg(long)]
    cutoff: Option<usize>,
    /// Output path (stdout when omitted)
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// State files; evaluated concurrently, reported in the given order
    #[arg(long, num_args = 1.., required = true)]
    state: Vec<PathBuf>,
    /// Comma-separated criterion ids, or `all`
    #[arg(long, default_value = "all")]
    criteria: String,
    #[arg(long = "phi-grid", default_value_t = DEFAULT_PHI_GRID)]
    phi_grid: usize,
    #[arg(long = "mn-max", default_value_t = DEFAULT_MN_MAX)]
    mn_max: u32,
    /// Guard width in levels used with --guard-eps
    #[arg(long = "guard-width", default_value_t = 1)]
    guard_width: usize,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// mixed-s, tmsv or alt-even
    family: String,
    #[arg(long)]
    criterion: String,
    #[arg(long, allow_hyphen_values = true)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long)]
    step: f64,
    /// Fixed cutoff; chosen per point when omitted
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long = "phi-grid", default_value_t = DEFAULT_PHI_GRID)]
    phi_grid: usize,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 2)]
    modes: usize,
    #[arg(long, default_value_t = 3)]
    cutoff: usize,
    #[arg(long, default_value_t = 1)]
    components: usize,
    #[arg(long = "out-dir", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    state: Option<PathBuf>,
    /// Modes to transpose: letters or indices, comma-separated (e.g. `b`)
    #[arg(long)]
    ppt: Option<String>,
    /// Normal-ordered monomial whose expectation to report
    #[arg(long)]
    moment: Option<String>,
    /// Guard-band report for this creation power
    #[arg(long)]
    guard: Option<usize>,
    /// Minimize F over the default grid
    #[arg(long = "f-bound")]
    f_bound: bool,
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn input(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: EXIT_INPUT,
            error: error.into(),
        }
    }

    /// Truncation errors get their own code; everything else is an input error.
    fn classify(error: Error) -> Self {
        Failure {
            code: if error.is_truncation() {
                EXIT_TRUNCATION
            } else {
                EXIT_INPUT
            },
            error: error.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        match error.downcast_ref::<Error>() {
            Some(e) if e.is_truncation() => Failure {
                code: EXIT_TRUNCATION,
                error,
            },
            _ => Failure::input(error),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(&cli.global, a),
        Command::Evaluate(a) => cmd_evaluate(&cli.global, a),
        Command::Sweep(a) => cmd_sweep(&cli.global, a),
        Command::SampleSeparable(a) => cmd_sample(&cli.global, a),
        Command::Verify(a) => cmd_verify(&cli.global, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn check_global(g: &Global) -> CmdResult {
    if !(g.tol > 0.0 && g.tol.is_finite()) {
        return Err(Failure::input(anyhow!(
            "--tol must be positive, got {}",
            g.tol
        )));
    }
    if let Some(eps) = g.guard_eps {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Failure::input(anyhow!(
                "--guard-eps must be ≥ 0, got {eps}"
            )));
        }
    }
    Ok(())
}

fn require(v: Option<f64>, flag: &str) -> anyhow::Result<f64> {
    v.ok_or_else(|| anyhow!("missing --{flag}"))
}

fn parse_alpha(text: &str) -> anyhow::Result<Complex64> {
    let (re, im) = match text.split_once(',') {
        Some((re, im)) => (re.trim(), im.trim()),
        None => (text.trim(), "0"),
    };
    Ok(Complex64::new(
        re.parse()
            .with_context(|| format!("bad --alpha '{text}'"))?,
        im.parse()
            .with_context(|| format!("bad --alpha '{text}'"))?,
    ))
}

fn build_state(a: &GenerateArgs) -> anyhow::Result<FockState> {
    let state = match a.name {
        Generator::Bell01 => {
            let c = a.cutoff.unwrap_or(2);
            gen_bell01(&[c, c])?
        }
        Generator::MixedS => {
            let c = a.cutoff.unwrap_or(2);
            gen_mixed_s(require(a.s, "s")?, &[c, c])?
        }
        Generator::Tmsv => {
            let x = require(a.x, "x")?;
            gen_tmsv(x, a.cutoff.map_or_else(|| tmsv_cutoff(x), Ok)?)?
        }
        Generator::AltEven => {
            let x = require(a.x, "x")?;
            gen_alternating_even(x, a.cutoff.map_or_else(|| alternating_even_cutoff(x), Ok)?)?
        }
        Generator::Ghz3 => {
            let c = a.cutoff.unwrap_or(2);
            gen_ghz_like(&[c, c, c])?
        }
        Generator::Coherent => {
            if a.alpha.is_empty() {
                bail!("coherent needs one --alpha re,im per mode");
            }
            let alphas = a
                .alpha
                .iter()
                .map(|t| parse_alpha(t))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let cutoffs: Vec<usize> = match a.cutoff {
                Some(c) => vec![c; alphas.len()],
                None => {
                    let c = alphas
                        .iter()
                        .map(|&al| coherent_cutoff(al))
                        .max()
                        .unwrap_or(1);
                    vec![c.max(2); alphas.len()]
                }
            };
            gen_product_coherent(&alphas, &cutoffs)?
        }
    };
    Ok(state)
}

fn cmd_generate(g: &Global, a: GenerateArgs) -> CmdResult {
    check_global(g)?;
    // generation failures, truncation included, are parameter errors
    let state = build_state(&a).map_err(Failure::input)?;
    let text = state.to_json_string();
    match &a.out {
        Some(path) => fs::write(path, text + "\n")
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(Failure::input)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn load_state(path: &Path) -> anyhow::Result<FockState> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    FockState::from_json_str(&text)
        .with_context(|| format!("invalid state file {}", path.display()))
}

fn parse_criteria(spec: &str) -> anyhow::Result<Option<Vec<CriterionId>>> {
    if spec.trim() == "all" {
        return Ok(None);
    }
    let ids = spec
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<CriterionId>())
        .collect::<Result<Vec<_>, _>>()?;
    if ids.is_empty() {
        bail!("no criteria given (valid: {}, or all)", CriterionId::SYNTAX);
    }
    Ok(Some(ids))
}

/// Per-file outcome of a batch evaluation.
enum FileOutcome {
    Ran(Vec<Evaluation>),
    Failed(Failure),
}

fn evaluate_file(
    path: &Path,
    ids: Option<&[CriterionId]>,
    config: &EvalConfig,
    guard: Option<(usize, f64)>,
) -> FileOutcome {
    let state = match load_state(path) {
        Ok(s) => s,
        Err(e) => return FileOutcome::Failed(Failure::from(e)),
    };
    if let Some((width, eps)) = guard {
        let report = state.guard_band_check(width, eps);
        if !report.safe {
            return FileOutcome::Failed(Failure::classify(Error::TruncationUnsafe {
                leaked: report.leaked_weight,
                epsilon: eps,
            }))
            .with_path(path);
        }
    }
    let ids = match ids {
        Some(ids) => ids.to_vec(),
        None => match CriterionId::defaults_for(state.mode_count(), config) {
            Ok(ids) => ids,
            Err(e) => return FileOutcome::Failed(Failure::classify(e)).with_path(path),
        },
    };
    FileOutcome::Ran(evaluate_many(&state, &ids, config))
}

impl FileOutcome {
    fn with_path(self, path: &Path) -> Self {
        match self {
            FileOutcome::Failed(f) => FileOutcome::Failed(Failure {
                code: f.code,
                error: f.error.context(path.display().to_string()),
            }),
            ran => ran,
        }
    }
}

fn cmd_evaluate(g: &Global, a: EvaluateArgs) -> CmdResult {
    check_global(g)?;
    let config = EvalConfig {
        tol: g.tol,
        phi_grid: a.phi_grid,
        mn_max: a.mn_max,
        ..EvalConfig::default()
    };
    config.validate().map_err(Failure::classify)?;
    let ids = parse_criteria(&a.criteria).map_err(Failure::input)?;
    let guard = g.guard_eps.map(|eps| (a.guard_width, eps));
    let outcomes = config.exec.map(&a.state, |path| {
        // criteria run sequentially inside; the batch is the parallel axis
        let inner = EvalConfig {
            exec: fockwit::par::Exec::Sequential,
            ..config
        };
        evaluate_file(path, ids.as_deref(), &inner, guard)
    });

    let batch = a.state.len() > 1;
    let mut json_entries: Vec<Value> = Vec::new();
    let mut text = String::new();
    let mut worst: u8 = 0;
    for (path, outcome) in a.state.iter().zip(outcomes) {
        match outcome {
            FileOutcome::Failed(f) => {
                eprintln!("error: {:#}", f.error);
                worst = worst.max(f.code);
            }
            FileOutcome::Ran(evals) => {
                for e in &evals {
                    if let Err(err) = &e.outcome {
                        eprintln!("error: {}: {}: {err}", path.display(), e.criterion);
                        worst = worst.max(if err.is_truncation() {
                            EXIT_TRUNCATION
                        } else {
                            EXIT_INPUT
                        });
                    }
                }
                let entries = report::entries(&evals);
                if batch {
                    text.push_str(&format!("== {} ==\n", path.display()));
                }
                text.push_str(&report::to_text(&entries));
                for entry in &entries {
                    let mut v = serde_json::to_value(entry).expect("entries serialize");
                    if batch {
                        v["state"] = json!(path.display().to_string());
                    }
                    json_entries.push(v);
                }
            }
        }
    }
    match g.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json_entries).expect("json")
        ),
        Format::Text => print!("{text}"),
    }
    if worst == 0 {
        Ok(())
    } else {
        Err(Failure {
            code: worst,
            error: anyhow!("evaluation finished with errors"),
        })
    }
}

fn cmd_sweep(g: &Global, a: SweepArgs) -> CmdResult {
    check_global(g)?;
    let family: SweepFamily = a.family.parse().map_err(Failure::classify)?;
    let criterion: CriterionId = a.criterion.parse().map_err(Failure::classify)?;
    let config = EvalConfig {
        tol: g.tol,
        phi_grid: a.phi_grid,
        ..EvalConfig::default()
    };
    let range = SweepRange {
        from: a.from,
        to: a.to,
        step: a.step,
    };
    let report =
        run_sweep(family, range, criterion, a.cutoff, &config).map_err(Failure::classify)?;
    match g.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report.rounded()).expect("json")
        ),
        Format::Text => print!("{}", report.to_csv()),
    }
    Ok(())
}

#[derive(Serialize)]
struct ManifestEntry {
    seed: u64,
    file: String,
    weights: Vec<f64>,
}

#[derive(Serialize)]
struct Manifest {
    rng: &'static str,
    base_seed: u64,
    count: usize,
    modes: usize,
    cutoff: usize,
    components: usize,
    samples: Vec<ManifestEntry>,
}

fn cmd_sample(g: &Global, a: SampleArgs) -> CmdResult {
    check_global(g)?;
    if a.modes == 0 {
        return Err(Failure::input(anyhow!("--modes must be ≥ 1")));
    }
    fs::create_dir_all(&a.out_dir)
        .with_context(|| format!("cannot create {}", a.out_dir.display()))
        .map_err(Failure::input)?;
    let cutoffs = vec![a.cutoff; a.modes];
    let seeds: Vec<u64> = (0..a.count as u64)
        .map(|i| {
            g.seed
                .checked_add(i)
                .ok_or_else(|| anyhow!("seed range overflows u64"))
        })
        .collect::<anyhow::Result<_>>()
        .map_err(Failure::input)?;
    let config = EvalConfig::default();
    let written = config
        .exec
        .map(&seeds, |&seed| -> anyhow::Result<ManifestEntry> {
            let ensemble = sample_separable_mixture(seed, a.components, &cutoffs)?;
            let file = format!("sample-{seed}.json");
            let state = ensemble.to_state()?;
            fs::write(a.out_dir.join(&file), state.to_json_string() + "\n")
                .with_context(|| format!("cannot write {file}"))?;
            Ok(ManifestEntry {
                seed,
                file,
                weights: ensemble.components.iter().map(|c| c.probability).collect(),
            })
        });
    let samples = written.into_iter().collect::<anyhow::Result<Vec<_>>>()?;
    let manifest = Manifest {
        rng: RNG_NAME,
        base_seed: g.seed,
        count: a.count,
        modes: a.modes,
        cutoff: a.cutoff,
        components: a.components,
        samples,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("json");
    fs::write(a.out_dir.join("manifest.json"), text.clone() + "\n")
        .context("cannot write manifest.json")
        .map_err(Failure::input)?;
    if g.format == Format::Text {
        println!("wrote {} states to {}", manifest.count, a.out_dir.display());
    } else {
        println!("{text}");
    }
    Ok(())
}

/// `b` → 1, `0` → 0, `a,c` → [0, 2].
fn parse_modes(spec: &str) -> anyhow::Result<Vec<usize>> {
    spec.split(',')
        .map(|t| {
            let t = t.trim();
            if let Ok(i) = t.parse::<usize>() {
                return Ok(i);
            }
            match t.as_bytes() {
                [c @ b'a'..=b'z'] => Ok((c - b'a') as usize),
                _ => Err(anyhow!("bad mode '{t}' (use letters a, b, … or indices)")),
            }
        })
        .collect()
}

fn cmd_verify(g: &Global, a: VerifyArgs) -> CmdResult {
    check_global(g)?;
    let needs_state = a.ppt.is_some() || a.moment.is_some() || a.guard.is_some();
    if !needs_state && !a.f_bound {
        return Err(Failure::input(anyhow!(
            "nothing to verify: give --ppt, --moment, --guard or --f-bound"
        )));
    }
    let state = match (&a.state, needs_state) {
        (Some(p), _) => Some(load_state(p)?),
        (None, true) => return Err(Failure::input(anyhow!("--state is required"))),
        (None, false) => None,
    };
    let eps = g.guard_eps.unwrap_or(DEFAULT_GUARD_EPSILON);
    let mut out = serde_json::Map::new();
    if let (Some(spec), Some(state)) = (&a.ppt, &state) {
        let modes = parse_modes(spec).map_err(Failure::input)?;
        let mut r = ppt_check(state, &modes).map_err(Failure::classify)?;
        r.min_eigenvalue = round_sig(r.min_eigenvalue);
        r.negativity = round_sig(r.negativity);
        out.insert("ppt".into(), serde_json::to_value(r).expect("json"));
    }
    if let (Some(expr), Some(state)) = (&a.moment, &state) {
        let mono: OperatorMonomial = expr.parse().map_err(Failure::classify)?;
        let value = expect(state, &mono).map_err(Failure::classify)?;
        let image = state
            .apply_monomial_with(&mono, eps)
            .map_err(Failure::classify)?;
        out.insert(
            "moment".into(),
            json!({
                "operator": mono.to_string(),
                "re": round_sig(value.re),
                "im": round_sig(value.im),
                "leaked_weight": round_sig(image.leaked_weight),
            }),
        );
    }
    if let (Some(power), Some(state)) = (a.guard, &state) {
        let mut r = state.guard_band_check(power, eps);
        r.leaked_weight = round_sig(r.leaked_weight);
        out.insert("guard".into(), serde_json::to_value(r).expect("json"));
    }
    if a.f_bound {
        let mut r = verify_f_bound_with(&FGrid::default(), EvalConfig::default().exec)
            .map_err(Failure::classify)?;
        r.min_f = round_sig(r.min_f);
        out.insert("f_bound".into(), serde_json::to_value(r).expect("json"));
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&Value::Object(out)).expect("json")
    );
    Ok(())
}
