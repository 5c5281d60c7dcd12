use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bsfill_core::config::RunConfig;
use bsfill_core::filling::{
    curves_from_sample_sets, default_checkpoints, default_radius_grid, fit_curves, optimize_radius, run_experiment,
    CurveMeta, ExperimentMode, ExperimentPlan, FillingCurve, FitFingerprint, UnitarySource,
};
use bsfill_core::io::{self, SampleFormat};
use bsfill_core::math::{haar_random_unitary, UnitaryMatrix};
use bsfill_core::samplers::{InputState, SampleSet, Sampler, SamplerKind};
use bsfill_core::seed::sampling_seed;
use bsfill_core::validator::{validate, Decision, Hypothesis, Verdict, DEFAULT_THRESHOLD};
use bsfill_core::{wfn, Error, Result};

/// Boson sampling validation by sample-space filling.
#[derive(Parser)]
#[command(name = "bsfill", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a Haar-random unitary (`m`, `seed`) and write it to `unitary_out`.
    GenUnitary(Common),
    /// Collect `n_max` distinct samples from `sampler` into `samples_out`.
    Sample(Common),
    /// Run the filling experiment (or split `samples_in`) and write `curve_out`.
    Curve(Common),
    /// Fit a curve (`curve_in`, or one computed from the config) into `fingerprint_out`.
    Fit(Common),
    /// Pick the radius that best separates `samplers`; table to `scan_out`.
    RadiusScan(Common),
    /// Test a black box (`blackbox`) against reference fingerprints; verdict to `verdict_out`.
    Validate(Common),
    /// End-to-end preset experiment writing every artifact into `out_dir`.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Run configuration (`key = value` lines).
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    radius: Option<String>,
    #[arg(long)]
    sampler: Option<String>,
    #[arg(long)]
    iterations: Option<String>,
    #[arg(long = "n-max")]
    n_max: Option<String>,
    #[arg(long)]
    collision_free: bool,
    /// Primary output path of the subcommand (directory for `reproduce`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(short = 'm', long = "modes")]
    modes: Option<String>,
    #[arg(short = 'n', long = "photons")]
    photons: Option<String>,
    /// Any config key, e.g. `--set radii=4,6,8`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct ReproduceArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "n5m25")]
    preset: Preset,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// Boson, distinguishable and mean-field at n = 5, m = 25.
    N5m25,
    /// Boson, distinguishable and mean-field at n = 4, m = 16.
    N4m16,
    /// Collision-free distinguishable and uniform at n = 7, m = 49, R = 8.
    N7m49cf,
}

impl Preset {
    fn defaults(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Preset::N5m25 => &[
                ("m", "25"),
                ("n", "5"),
                ("n_max", "2000"),
                ("iterations", "10"),
                ("seed", "1"),
                ("samplers", "boson,distinguishable,meanfield"),
                ("radii", "2,4,6,8,10"),
            ],
            Preset::N4m16 => &[
                ("m", "16"),
                ("n", "4"),
                ("n_max", "500"),
                ("iterations", "10"),
                ("seed", "1"),
                ("samplers", "boson,distinguishable,meanfield"),
                ("radii", "2,4,6,8"),
            ],
            Preset::N7m49cf => &[
                ("m", "49"),
                ("n", "7"),
                ("n_max", "18000"),
                ("iterations", "10"),
                ("seed", "1"),
                ("collision_free", "true"),
                ("samplers", "distinguishable,uniform"),
                ("radii", "8"),
            ],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Preset::N5m25 => "n5m25",
            Preset::N4m16 => "n4m16",
            Preset::N7m49cf => "n7m49cf",
        }
    }
}

/// Successful runs either find nothing unusual or report an anomaly (exit 1).
enum Outcome {
    Clean,
    Anomaly(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenUnitary(c) => load(&c, &[]).and_then(|cfg| gen_unitary(&cfg, c.out.as_deref())),
        Command::Sample(c) => load(&c, &[]).and_then(|cfg| sample(&cfg, c.out.as_deref())),
        Command::Curve(c) => load(&c, &[]).and_then(|cfg| curve(&cfg, c.out.as_deref())),
        Command::Fit(c) => load(&c, &[]).and_then(|cfg| fit(&cfg, c.out.as_deref())),
        Command::RadiusScan(c) => load(&c, &[]).and_then(|cfg| radius_scan(&cfg, c.out.as_deref())),
        Command::Validate(c) => load(&c, &[]).and_then(|cfg| validate_cmd(&cfg, c.out.as_deref())),
        Command::Reproduce(r) => {
            load(&r.common, r.preset.defaults()).and_then(|cfg| reproduce(&cfg, r.preset, r.common.out.as_deref()))
        }
    };
    match result {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Anomaly(message)) => {
            eprintln!("anomaly: {message}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Preset defaults, then the config file, then `--set`, then dedicated flags.
fn load(c: &Common, defaults: &[(&str, &str)]) -> Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    for (k, v) in defaults {
        if cfg.get_raw(k).is_none() {
            cfg.set(k, v)?;
        }
    }
    for pair in &c.set {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config { key: pair.clone(), message: "expected KEY=VALUE".into() })?;
        cfg.set(k.trim(), v.trim())?;
    }
    let flags = [
        ("seed", &c.seed),
        ("radius", &c.radius),
        ("sampler", &c.sampler),
        ("iterations", &c.iterations),
        ("n_max", &c.n_max),
        ("m", &c.modes),
        ("n", &c.photons),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, v)?;
        }
    }
    if c.collision_free {
        cfg.set("collision_free", "true")?;
    }
    Ok(cfg)
}

/// Writes to `path`, or to stdout when no output is declared.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => io::write_text(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Error::Io { path: "<stdout>".into(), source: e })
        }
    }
}

fn or_flag<'a>(flag: Option<&'a Path>, key: &'a Option<PathBuf>) -> Option<&'a Path> {
    flag.or(key.as_deref())
}

fn gen_unitary(cfg: &RunConfig, out: Option<&Path>) -> Result<Outcome> {
    let m = *cfg.require("m", &cfg.modes)?;
    let u = haar_random_unitary(m, cfg.seed.unwrap_or(0))?;
    emit(or_flag(out, &cfg.unitary_out), &io::format_unitary(&u))?;
    eprintln!("unitary m={m} hash={} deviation={:.3e}", u.fingerprint(), u.deviation());
    Ok(Outcome::Clean)
}

/// `unitary_in` if given, otherwise the Haar unitary `gen-unitary` would draw.
fn unitary(cfg: &RunConfig) -> Result<UnitaryMatrix> {
    match &cfg.unitary_in {
        Some(path) => {
            let u = io::read_unitary(path)?;
            if let Some(m) = cfg.modes {
                if u.dim() != m {
                    return Err(Error::Config {
                        key: "unitary_in".into(),
                        message: format!("unitary is {0}x{0}, config has m = {m}", u.dim()),
                    });
                }
            }
            Ok(u)
        }
        None => haar_random_unitary(*cfg.require("m", &cfg.modes)?, cfg.seed.unwrap_or(0)),
    }
}

fn sample(cfg: &RunConfig, out: Option<&Path>) -> Result<Outcome> {
    let m = *cfg.require("m", &cfg.modes)?;
    let n = *cfg.require("n", &cfg.photons)?;
    let count = *cfg.require("n_max", &cfg.n_max)?;
    let kind = cfg.sampler.unwrap_or(SamplerKind::Boson);
    let seed = cfg.seed.unwrap_or(0);
    let u = if kind.needs_unitary() { Some(unitary(cfg)?) } else { None };
    let sampler = Sampler::prepare(kind, u.as_ref(), &InputState::new(m, n)?)?;
    let set = sampler.collect(count, sampling_seed(seed, 0), cfg.collision_free.unwrap_or(false))?;
    let format = cfg.samples_format.unwrap_or(SampleFormat::Occupation);
    emit(or_flag(out, &cfg.samples_out), &io::format_samples(&set, format, &cfg.provenance()))?;
    if let Some(path) = &cfg.edges_out {
        let radius = *cfg.require("radius", &cfg.radius)?;
        io::write_edges(path, &wfn::edges(&set, radius)?)?;
    }
    eprintln!("{kind}: {} distinct samples from {} accepted draws", set.len(), set.meta().raw_draw_count);
    Ok(Outcome::Clean)
}

fn read_samples(cfg: &RunConfig, path: &Path) -> Result<SampleSet> {
    let m = *cfg.require("m", &cfg.modes)?;
    let n = *cfg.require("n", &cfg.photons)?;
    let format = match cfg.samples_format {
        Some(f) => f,
        None => io::detect_format(path)?.unwrap_or(SampleFormat::Occupation),
    };
    let (set, report) = io::ingest_samples(path, format, m, n)?;
    eprintln!(
        "{}: {} lines, {} duplicates dropped, collision-free: {}",
        path.display(),
        report.lines,
        report.duplicates,
        report.collision_free
    );
    Ok(set)
}

/// Splits an ingested set into `iterations` consecutive blocks of `n_max`
/// samples (default: as many as fit) and builds their filling curve.
fn curve_from_samples(cfg: &RunConfig, set: &SampleSet, label: &str) -> Result<FillingCurve> {
    let iterations = cfg.iterations.unwrap_or(bsfill_core::filling::DEFAULT_ITERATIONS);
    let radius = *cfg.require("radius", &cfg.radius)?;
    let n_max = cfg.n_max.unwrap_or(set.len() / iterations.max(1));
    if iterations < 2 || n_max == 0 || n_max * iterations > set.len() {
        return Err(Error::Config {
            key: "n_max".into(),
            message: format!("{iterations} iterations of {n_max} samples need more than the {} available", set.len()),
        });
    }
    let checkpoints = cfg.checkpoints.clone().unwrap_or_else(|| default_checkpoints(n_max));
    let blocks: Vec<SampleSet> = set.chunks(n_max).into_iter().take(iterations).collect();
    let meta = CurveMeta {
        label: label.to_string(),
        mode: cfg.mode.unwrap_or(ExperimentMode::FixedU),
        modes: set.meta().modes,
        photons: set.meta().photons,
        radius,
        collision_free: set.meta().collision_free,
        master_seed: cfg.seed,
    };
    let mut curves = curves_from_sample_sets(&blocks, &checkpoints, &[radius], &meta)?;
    Ok(curves.remove(0))
}

fn source(cfg: &RunConfig, plan: &ExperimentPlan) -> Result<UnitarySource> {
    Ok(match plan.mode {
        ExperimentMode::FixedU if plan.sampler.needs_unitary() => UnitarySource::Fixed(unitary(cfg)?),
        _ => UnitarySource::Haar,
    })
}

fn simulate(cfg: &RunConfig, plan: &ExperimentPlan) -> Result<FillingCurve> {
    run_experiment(plan, &source(cfg, plan)?)
}

fn compute_curve(cfg: &RunConfig) -> Result<FillingCurve> {
    match &cfg.samples_in {
        Some(path) => {
            let set = read_samples(cfg, path)?;
            let label = set.meta().label.clone();
            curve_from_samples(cfg, &set, &label)
        }
        None => simulate(cfg, &cfg.plan()?),
    }
}

fn curve(cfg: &RunConfig, out: Option<&Path>) -> Result<Outcome> {
    let curve = compute_curve(cfg)?;
    let prov = cfg.provenance();
    emit(or_flag(out, &cfg.curve_out), &io::format_curve(&curve, &prov))?;
    if let Some(path) = &cfg.aggregate_out {
        io::write_aggregate(path, &curve, &prov)?;
    }
    Ok(Outcome::Clean)
}

fn fit(cfg: &RunConfig, out: Option<&Path>) -> Result<Outcome> {
    let curve = match &cfg.curve_in {
        Some(path) => io::read_curve(path)?,
        None => compute_curve(cfg)?,
    };
    let fp = fit_curves(&curve)?;
    emit(or_flag(out, &cfg.fingerprint_out), &io::format_fingerprints(&[fp], &cfg.provenance()))?;
    Ok(Outcome::Clean)
}

fn samplers(cfg: &RunConfig) -> Vec<SamplerKind> {
    cfg.samplers.clone().unwrap_or_else(|| vec![SamplerKind::Boson, SamplerKind::Distinguishable, SamplerKind::MeanField])
}

fn scan_plan(cfg: &RunConfig) -> Result<(ExperimentPlan, Vec<u32>)> {
    let n = *cfg.require("n", &cfg.photons)?;
    let radii = cfg.radii.clone().unwrap_or_else(|| default_radius_grid(n));
    let mut cfg = cfg.clone();
    if cfg.radius.is_none() {
        cfg.set("radius", &radii[0].to_string())?;
    }
    Ok((cfg.plan()?, radii))
}

fn radius_scan(cfg: &RunConfig, out: Option<&Path>) -> Result<Outcome> {
    let (plan, radii) = scan_plan(cfg)?;
    let threshold = cfg.threshold.unwrap_or(DEFAULT_THRESHOLD);
    let scan = match optimize_radius(&plan, &samplers(cfg), &radii, &source(cfg, &plan)?, threshold) {
        Err(Error::NoSeparation { threshold }) => {
            return Ok(Outcome::Anomaly(format!("no radius separates any sampler pair above {threshold}")))
        }
        other => other?,
    };
    let prov = cfg.provenance();
    emit(or_flag(out, &cfg.scan_out), &io::format_radius_scan(&scan, &prov))?;
    if let Some(path) = &cfg.fingerprint_out {
        io::write_fingerprints(path, &scan.chosen_row().fingerprints, &prov)?;
    }
    eprintln!("chosen radius {}", scan.chosen);
    Ok(Outcome::Clean)
}

/// Per-iteration size and collision-free flag of a black box given as raw samples.
#[derive(Clone, Copy)]
struct DumpShape {
    n_max: usize,
    collision_free: bool,
}

fn blackbox_fingerprint(cfg: &RunConfig) -> Result<(FitFingerprint, Option<DumpShape>)> {
    let path = cfg
        .blackbox
        .as_deref()
        .or(cfg.samples_in.as_deref())
        .ok_or_else(|| Error::Config { key: "blackbox".into(), message: "required but not set".into() })?;
    if io::is_fingerprint_file(path)? {
        let mut fps = io::read_fingerprints(path)?;
        if fps.len() != 1 {
            return Err(Error::Config {
                key: "blackbox".into(),
                message: format!("expected one fingerprint, file has {}", fps.len()),
            });
        }
        return Ok((fps.remove(0), None));
    }
    let set = read_samples(cfg, path)?;
    let curve = curve_from_samples(cfg, &set, "blackbox")?;
    let shape = DumpShape {
        n_max: *curve.checkpoints().last().expect("curves have checkpoints"),
        collision_free: set.meta().collision_free,
    };
    Ok((fit_curves(&curve)?, Some(shape)))
}

/// Fingerprints from `hypotheses` files, or simulated for every configured
/// sampler. A raw-sample black box is matched by drawing one long distinct
/// sequence per sampler and splitting it exactly as the black box was split.
fn hypotheses(cfg: &RunConfig, blackbox: &FitFingerprint, shape: Option<DumpShape>) -> Result<Vec<Hypothesis>> {
    if let Some(paths) = &cfg.hypotheses {
        let mut out = Vec::new();
        for path in paths {
            out.extend(io::read_fingerprints(path)?.into_iter().map(Hypothesis::new));
        }
        return Ok(out);
    }
    let mut cfg = cfg.clone();
    cfg.set("radius", &blackbox.radius.to_string())?;
    cfg.set("m", &blackbox.modes.to_string())?;
    cfg.set("n", &blackbox.photons.to_string())?;
    let kinds = samplers(&cfg);
    let Some(shape) = shape else {
        let template = cfg.plan()?;
        return kinds
            .into_iter()
            .map(|kind| {
                let plan = ExperimentPlan { sampler: kind, ..template.clone() };
                Ok(Hypothesis::new(fit_curves(&simulate(&cfg, &plan)?)?))
            })
            .collect();
    };
    cfg.set("n_max", &shape.n_max.to_string())?;
    let iterations = cfg.iterations.unwrap_or(bsfill_core::filling::DEFAULT_ITERATIONS);
    let input = InputState::new(blackbox.modes, blackbox.photons)?;
    let u = if kinds.iter().any(|k| k.needs_unitary()) { Some(unitary(&cfg)?) } else { None };
    let seed = cfg.seed.unwrap_or(0);
    kinds
        .into_iter()
        .enumerate()
        .map(|(i, kind)| {
            let sampler = Sampler::prepare(kind, u.as_ref().filter(|_| kind.needs_unitary()), &input)?;
            let set = sampler.collect(iterations * shape.n_max, sampling_seed(seed, i), shape.collision_free)?;
            Ok(Hypothesis::new(fit_curves(&curve_from_samples(&cfg, &set, kind.label())?)?))
        })
        .collect()
}

/// The reference hypothesis rejected, or every hypothesis rejected when no
/// reference is among them.
fn anomaly(verdict: &Verdict, reference: &str) -> Option<String> {
    match verdict.row(reference) {
        Some(row) if row.decision == Decision::Rejected => {
            Some(format!("reference hypothesis {reference} rejected (separation {:.3})", row.separation))
        }
        Some(_) => None,
        None if verdict.rejected().count() == verdict.rows.len() => Some("every hypothesis rejected".into()),
        None => None,
    }
}

fn validate_cmd(cfg: &RunConfig, out: Option<&Path>) -> Result<Outcome> {
    let (blackbox, shape) = blackbox_fingerprint(cfg)?;
    let hyps = hypotheses(cfg, &blackbox, shape)?;
    let verdict = validate(&blackbox, &hyps, cfg.threshold.unwrap_or(DEFAULT_THRESHOLD))?;
    emit(or_flag(out, &cfg.verdict_out), &io::format_verdict(&verdict, &cfg.provenance()))?;
    for row in &verdict.rows {
        eprintln!("{}: separation {:.3} ({}) -> {}", row.label, row.separation, row.dimensionality, row.decision);
    }
    let reference = cfg.reference.as_deref().unwrap_or(SamplerKind::Boson.label());
    Ok(match anomaly(&verdict, reference) {
        Some(message) => Outcome::Anomaly(message),
        None => Outcome::Clean,
    })
}

fn reproduce(cfg: &RunConfig, preset: Preset, out: Option<&Path>) -> Result<Outcome> {
    let dir = out.map(Path::to_path_buf).or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| {
        PathBuf::from(format!("reproduce-{}", preset.name()))
    });
    let (plan, radii) = scan_plan(cfg)?;
    let threshold = cfg.threshold.unwrap_or(DEFAULT_THRESHOLD);
    let kinds = samplers(cfg);
    let u = unitary(cfg)?;
    let source = match plan.mode {
        ExperimentMode::FixedU => UnitarySource::Fixed(u.clone()),
        ExperimentMode::VariedU => UnitarySource::Haar,
    };
    let scan = match optimize_radius(&plan, &kinds, &radii, &source, threshold) {
        Err(Error::NoSeparation { threshold }) => {
            return Ok(Outcome::Anomaly(format!("no radius separates any sampler pair above {threshold}")))
        }
        other => other?,
    };
    let prov = cfg.provenance();
    let row = scan.chosen_row();
    io::write_unitary(&dir.join("unitary.txt"), &u)?;
    io::write_text(&dir.join("scan.tsv"), &io::format_radius_scan(&scan, &prov))?;
    for curve in &row.curves {
        let label = curve.meta().label.to_ascii_lowercase();
        io::write_curve(&dir.join(format!("curve_{label}.tsv")), curve, &prov)?;
        io::write_aggregate(&dir.join(format!("aggregate_{label}.tsv")), curve, &prov)?;
    }
    io::write_fingerprints(&dir.join("fingerprints.tsv"), &row.fingerprints, &prov)?;

    println!("preset {} -> {}", preset.name(), dir.display());
    println!("radius {} (scanned {:?})", scan.chosen, radii);
    println!("label\talpha_mu\terr\talpha_sigma\terr\tbeta_sigma\terr");
    for f in &row.fingerprints {
        println!(
            "{}\t{:.4e}\t{:.1e}\t{:.4e}\t{:.1e}\t{:.4e}\t{:.1e}",
            f.label, f.values[0], f.errors[0], f.values[1], f.errors[1], f.values[2], f.errors[2]
        );
    }
    for (i, fp) in row.fingerprints.iter().enumerate() {
        let others: Vec<Hypothesis> =
            row.fingerprints.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, f)| Hypothesis::new(f.clone())).collect();
        let verdict = validate(fp, &others, threshold)?;
        let label = fp.label.to_ascii_lowercase();
        io::write_verdict(&dir.join(format!("verdict_{label}.tsv")), &verdict, &prov)?;
        for r in &verdict.rows {
            println!("{} vs {}: separation {:.3} ({}) -> {}", fp.label, r.label, r.separation, r.dimensionality, r.decision);
        }
    }
    let unseparated: Vec<String> =
        row.pairs.iter().filter(|(_, _, sep)| *sep <= threshold || sep.is_nan()).map(|(a, b, _)| format!("{a}/{b}")).collect();
    Ok(if unseparated.is_empty() {
        Outcome::Clean
    } else {
        Outcome::Anomaly(format!("pairs not separated: {}", unseparated.join(", ")))
    })
}
