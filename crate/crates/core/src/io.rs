//! On-disk formats.
//!
//! All text formats except the unitary file accept and emit `#` header lines
//! holding whitespace-separated `key=value` tokens.
//!
//! * Unitary: first line `m`, then `m` rows of `2m` floats (real and imaginary
//!   parts alternating), 17 significant digits.
//! * Samples, occupation format: `m` integers per line.
//! * Samples, mode-list format: header `#format=mode-list m=<m> n=<n>`, then
//!   `n` one-based mode indices per line (any order).
//! * Curves, aggregates, fingerprints and verdicts: tab-separated with a
//!   column header row.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::filling::{
    AggregateRow, CurveMeta, ExperimentMode, FillingCurve, FitFingerprint, IterationRow, Param, RadiusScan,
};
use crate::math::{OccupationList, UnitaryMatrix};
use crate::samplers::{SampleMeta, SampleSet};
use crate::validator::Verdict;

/// Extra `key=value` pairs written into a file header (config hash, seed, ...).
pub type Provenance = [(String, String)];

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn header_line(out: &mut String, pairs: impl IntoIterator<Item = (String, String)>) {
    let tokens: Vec<String> = pairs.into_iter().map(|(k, v)| format!("{k}={v}")).collect();
    if !tokens.is_empty() {
        let _ = writeln!(out, "# {}", tokens.join(" "));
    }
}

fn provenance_line(out: &mut String, provenance: &Provenance) {
    header_line(out, provenance.iter().cloned());
}

/// `key=value` tokens from every `#` line, plus the data lines with their
/// one-based line numbers.
fn split_header(text: &str) -> (BTreeMap<String, String>, Vec<(usize, &str)>) {
    let mut header = BTreeMap::new();
    let mut data = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix('#') {
            for token in rest.split_whitespace() {
                if let Some((k, v)) = token.split_once('=') {
                    header.insert(k.to_string(), v.to_string());
                }
            }
        } else if !trimmed.is_empty() {
            data.push((i + 1, trimmed));
        }
    }
    (header, data)
}

fn parse_field<T: FromStr>(path: &Path, line: usize, field: &str, what: &str) -> Result<T> {
    field.parse().map_err(|_| Error::parse(path, line, format!("invalid {what} `{field}`")))
}

// ---------------------------------------------------------------------------
// Unitary

pub fn write_unitary(path: &Path, u: &UnitaryMatrix) -> Result<()> {
    write(path, &format_unitary(u))
}

pub fn format_unitary(u: &UnitaryMatrix) -> String {
    let m = u.dim();
    let mut out = format!("{m}\n");
    for row in u.entries().rows() {
        let fields: Vec<String> = row.iter().flat_map(|z| [format!("{:.16e}", z.re), format!("{:.16e}", z.im)]).collect();
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_unitary(path: &Path) -> Result<UnitaryMatrix> {
    parse_unitary(path, &read(path)?)
}

pub fn parse_unitary(path: &Path, text: &str) -> Result<UnitaryMatrix> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (first_no, first) = lines.next().ok_or_else(|| Error::parse(path, 1, "empty unitary file"))?;
    let m: usize = parse_field(path, first_no + 1, first.trim(), "dimension")?;
    if m == 0 {
        return Err(Error::parse(path, first_no + 1, "dimension must be positive"));
    }
    let mut entries = Array2::zeros((m, m));
    for row in 0..m {
        let (no, line) = lines
            .next()
            .ok_or_else(|| Error::parse(path, first_no + 2 + row, format!("expected {m} rows, found {row}")))?;
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|f| parse_field(path, no + 1, f, "float"))
            .collect::<Result<_>>()?;
        if values.len() != 2 * m {
            return Err(Error::parse(path, no + 1, format!("expected {} floats, found {}", 2 * m, values.len())));
        }
        for col in 0..m {
            entries[[row, col]] = Complex64::new(values[2 * col], values[2 * col + 1]);
        }
    }
    if let Some((no, _)) = lines.next() {
        return Err(Error::parse(path, no + 1, "trailing data after the last row"));
    }
    UnitaryMatrix::new(entries)
}

// ---------------------------------------------------------------------------
// Samples

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleFormat {
    Occupation,
    ModeList,
}

impl FromStr for SampleFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "occupation" => Ok(SampleFormat::Occupation),
            "mode-list" | "modelist" | "mode_list" => Ok(SampleFormat::ModeList),
            _ => Err(Error::InvalidArgument(format!("unknown sample format `{s}`"))),
        }
    }
}

impl SampleFormat {
    fn name(self) -> &'static str {
        match self {
            SampleFormat::Occupation => "occupation",
            SampleFormat::ModeList => "mode-list",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IngestReport {
    pub lines: usize,
    pub duplicates: usize,
    pub collision_free: bool,
}

/// Format named in the file header, if any.
pub fn detect_format(path: &Path) -> Result<Option<SampleFormat>> {
    let text = read(path)?;
    let (header, _) = split_header(&text);
    header.get("format").map(|f| f.parse()).transpose()
}

pub fn ingest_samples(path: &Path, format: SampleFormat, modes: usize, photons: u32) -> Result<(SampleSet, IngestReport)> {
    parse_samples(path, &read(path)?, format, modes, photons)
}

pub fn parse_samples(
    path: &Path,
    text: &str,
    format: SampleFormat,
    modes: usize,
    photons: u32,
) -> Result<(SampleSet, IngestReport)> {
    let (header, data) = split_header(text);
    if let Some(declared) = header.get("format") {
        if declared.parse::<SampleFormat>()? != format {
            return Err(Error::parse(path, 1, format!("file declares format {declared}, expected {}", format.name())));
        }
    }
    for (key, expected) in [("m", modes as u64), ("n", u64::from(photons))] {
        if let Some(v) = header.get(key) {
            let got: u64 = parse_field(path, 1, v, key)?;
            if got != expected {
                return Err(Error::parse(path, 1, format!("header declares {key}={got}, expected {expected}")));
            }
        }
    }
    if data.is_empty() {
        return Err(Error::parse(path, 1, "no samples in file"));
    }

    let mut samples = Vec::with_capacity(data.len());
    for &(no, line) in &data {
        let values: Vec<u32> =
            line.split_whitespace().map(|f| parse_field(path, no, f, "integer")).collect::<Result<_>>()?;
        let s = match format {
            SampleFormat::Occupation => {
                if values.len() != modes {
                    return Err(Error::parse(path, no, format!("expected {modes} counts, found {}", values.len())));
                }
                OccupationList::new(values)
            }
            SampleFormat::ModeList => {
                if values.len() != photons as usize {
                    return Err(Error::parse(path, no, format!("expected {photons} mode indices, found {}", values.len())));
                }
                let zero_based = values
                    .iter()
                    .map(|&v| {
                        if v == 0 || v as usize > modes {
                            Err(Error::parse(path, no, format!("mode index {v} outside 1..={modes}")))
                        } else {
                            Ok(v as usize - 1)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                OccupationList::from_modes(modes, &zero_based)?
            }
        };
        s.check_shape(modes, photons).map_err(|e| Error::parse(path, no, e.to_string()))?;
        samples.push(s);
    }

    let all_collision_free = samples.iter().all(OccupationList::is_collision_free);
    let mut meta = SampleMeta::new(modes, photons, header.get("sampler").cloned().unwrap_or_else(|| "ingested".into()));
    meta.unitary_hash = header.get("unitary").filter(|v| *v != "none").cloned();
    meta.seed = header.get("seed").map(|v| parse_field(path, 1, v, "seed")).transpose()?;
    meta.collision_free = match header.get("collision_free") {
        Some(v) => parse_field(path, 1, v, "collision_free flag")?,
        None => all_collision_free,
    };
    meta.raw_draw_count = match header.get("raw_draws") {
        Some(v) => parse_field(path, 1, v, "raw draw count")?,
        None => samples.len() as u64,
    };
    let lines = samples.len();
    let (set, duplicates) = SampleSet::dedup_from(samples, meta)?;
    Ok((set, IngestReport { lines, duplicates, collision_free: all_collision_free }))
}

pub fn format_samples(set: &SampleSet, format: SampleFormat, provenance: &Provenance) -> String {
    let meta = set.meta();
    let mut out = String::new();
    let _ = writeln!(out, "#format={} m={} n={}", format.name(), meta.modes, meta.photons);
    let mut info = vec![
        ("sampler".to_string(), meta.label.clone()),
        ("collision_free".to_string(), meta.collision_free.to_string()),
        ("raw_draws".to_string(), meta.raw_draw_count.to_string()),
        ("unitary".to_string(), meta.unitary_hash.clone().unwrap_or_else(|| "none".into())),
    ];
    if let Some(seed) = meta.seed {
        info.push(("seed".to_string(), seed.to_string()));
    }
    header_line(&mut out, info);
    provenance_line(&mut out, provenance);
    for s in set.samples() {
        let fields: Vec<String> = match format {
            SampleFormat::Occupation => s.counts().iter().map(u32::to_string).collect(),
            SampleFormat::ModeList => s.photon_modes().iter().map(|m| (m + 1).to_string()).collect(),
        };
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_samples(path: &Path, set: &SampleSet, format: SampleFormat, provenance: &Provenance) -> Result<()> {
    write(path, &format_samples(set, format, provenance))
}

// ---------------------------------------------------------------------------
// Curves

const CURVE_COLUMNS: &str = "iteration\tN\tmu\tsigma";
const AGGREGATE_COLUMNS: &str = "N\tmean_mu\tstd_mu\tmean_sigma\tstd_sigma";

fn curve_meta_pairs(meta: &CurveMeta) -> Vec<(String, String)> {
    let mut pairs = vec![
        ("sampler".to_string(), meta.label.clone()),
        ("mode".to_string(), meta.mode.to_string()),
        ("m".to_string(), meta.modes.to_string()),
        ("n".to_string(), meta.photons.to_string()),
        ("radius".to_string(), meta.radius.to_string()),
        ("collision_free".to_string(), meta.collision_free.to_string()),
    ];
    if let Some(seed) = meta.master_seed {
        pairs.push(("seed".to_string(), seed.to_string()));
    }
    pairs
}

pub fn format_curve(curve: &FillingCurve, provenance: &Provenance) -> String {
    let mut out = String::new();
    header_line(&mut out, curve_meta_pairs(curve.meta()));
    provenance_line(&mut out, provenance);
    out.push_str(CURVE_COLUMNS);
    out.push('\n');
    for r in curve.rows() {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", r.iteration, r.n, r.mu, r.sigma);
    }
    out
}

pub fn format_aggregate(curve: &FillingCurve, provenance: &Provenance) -> String {
    let mut out = String::new();
    header_line(&mut out, curve_meta_pairs(curve.meta()));
    provenance_line(&mut out, provenance);
    out.push_str(AGGREGATE_COLUMNS);
    out.push('\n');
    for AggregateRow { n, mean_mu, std_mu, mean_sigma, std_sigma } in curve.aggregate() {
        let _ = writeln!(out, "{n}\t{mean_mu}\t{std_mu}\t{mean_sigma}\t{std_sigma}");
    }
    out
}

pub fn write_curve(path: &Path, curve: &FillingCurve, provenance: &Provenance) -> Result<()> {
    write(path, &format_curve(curve, provenance))
}

pub fn write_aggregate(path: &Path, curve: &FillingCurve, provenance: &Provenance) -> Result<()> {
    write(path, &format_aggregate(curve, provenance))
}

fn required<'a>(path: &Path, header: &'a BTreeMap<String, String>, key: &str) -> Result<&'a str> {
    header.get(key).map(String::as_str).ok_or_else(|| Error::parse(path, 1, format!("header is missing `{key}`")))
}

pub fn read_curve(path: &Path) -> Result<FillingCurve> {
    parse_curve(path, &read(path)?)
}

pub fn parse_curve(path: &Path, text: &str) -> Result<FillingCurve> {
    let (header, data) = split_header(text);
    let meta = CurveMeta {
        label: required(path, &header, "sampler")?.to_string(),
        mode: required(path, &header, "mode")?.parse()?,
        modes: parse_field(path, 1, required(path, &header, "m")?, "m")?,
        photons: parse_field(path, 1, required(path, &header, "n")?, "n")?,
        radius: parse_field(path, 1, required(path, &header, "radius")?, "radius")?,
        collision_free: parse_field(path, 1, required(path, &header, "collision_free")?, "collision_free")?,
        master_seed: header.get("seed").map(|s| parse_field(path, 1, s, "seed")).transpose()?,
    };
    let mut data = data.into_iter();
    match data.next() {
        Some((_, cols)) if cols.split_whitespace().eq(CURVE_COLUMNS.split('\t')) => {}
        Some((no, _)) => return Err(Error::parse(path, no, format!("expected column header `{CURVE_COLUMNS}`"))),
        None => return Err(Error::parse(path, 1, "empty curve file")),
    }
    let mut rows = Vec::new();
    for (no, line) in data {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 4 {
            return Err(Error::parse(path, no, format!("expected 4 fields, found {}", f.len())));
        }
        rows.push(IterationRow {
            iteration: parse_field(path, no, f[0], "iteration")?,
            n: parse_field(path, no, f[1], "N")?,
            mu: parse_field(path, no, f[2], "mu")?,
            sigma: parse_field(path, no, f[3], "sigma")?,
        });
    }
    let mut checkpoints: Vec<usize> = rows.iter().filter(|r| r.iteration == 0).map(|r| r.n).collect();
    checkpoints.dedup();
    FillingCurve::new(meta, checkpoints, rows).map_err(|e| Error::parse(path, 1, e.to_string()))
}

// ---------------------------------------------------------------------------
// Fingerprints

const FINGERPRINT_COLUMNS: &str =
    "label\tmode\tm\tn\tradius\talpha_mu\terr_alpha_mu\talpha_sigma\terr_alpha_sigma\tbeta_sigma\terr_beta_sigma";

pub fn format_fingerprints(fingerprints: &[FitFingerprint], provenance: &Provenance) -> String {
    let mut out = String::new();
    provenance_line(&mut out, provenance);
    out.push_str(FINGERPRINT_COLUMNS);
    out.push('\n');
    for f in fingerprints {
        let _ = write!(out, "{}\t{}\t{}\t{}\t{}", f.label, f.mode, f.modes, f.photons, f.radius);
        for p in Param::ALL {
            let _ = write!(out, "\t{}\t{}", f.value(p), f.error(p));
        }
        out.push('\n');
    }
    out
}

pub fn write_fingerprints(path: &Path, fingerprints: &[FitFingerprint], provenance: &Provenance) -> Result<()> {
    write(path, &format_fingerprints(fingerprints, provenance))
}

pub fn read_fingerprints(path: &Path) -> Result<Vec<FitFingerprint>> {
    parse_fingerprints(path, &read(path)?)
}

/// True when the file starts (after `#` lines) with the fingerprint column header.
pub fn is_fingerprint_file(path: &Path) -> Result<bool> {
    let text = read(path)?;
    let (_, data) = split_header(&text);
    Ok(data.first().is_some_and(|(_, l)| l.split_whitespace().eq(FINGERPRINT_COLUMNS.split('\t'))))
}

pub fn parse_fingerprints(path: &Path, text: &str) -> Result<Vec<FitFingerprint>> {
    let (_, data) = split_header(text);
    let mut data = data.into_iter();
    match data.next() {
        Some((_, cols)) if cols.split_whitespace().eq(FINGERPRINT_COLUMNS.split('\t')) => {}
        Some((no, _)) => return Err(Error::parse(path, no, "expected fingerprint column header")),
        None => return Err(Error::parse(path, 1, "empty fingerprint file")),
    }
    let out: Vec<FitFingerprint> = data
        .map(|(no, line)| {
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 11 {
                return Err(Error::parse(path, no, format!("expected 11 fields, found {}", f.len())));
            }
            let num = |i: usize, what: &str| parse_field::<f64>(path, no, f[i], what);
            let fp = FitFingerprint {
                label: f[0].to_string(),
                mode: f[1].parse::<ExperimentMode>().map_err(|e| Error::parse(path, no, e.to_string()))?,
                modes: parse_field(path, no, f[2], "m")?,
                photons: parse_field(path, no, f[3], "n")?,
                radius: parse_field(path, no, f[4], "radius")?,
                values: [num(5, "alpha_mu")?, num(7, "alpha_sigma")?, num(9, "beta_sigma")?],
                errors: [num(6, "err_alpha_mu")?, num(8, "err_alpha_sigma")?, num(10, "err_beta_sigma")?],
            };
            if fp.errors.iter().any(|e| e.is_nan() || *e < 0.0) {
                return Err(Error::parse(path, no, "standard errors must be non-negative"));
            }
            Ok(fp)
        })
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(Error::parse(path, 2, "no fingerprints in file"));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Verdicts and edge lists

pub fn format_verdict(verdict: &Verdict, provenance: &Provenance) -> String {
    let mut out = String::new();
    let dims: Vec<String> = verdict
        .rows
        .iter()
        .map(|r| {
            let names: Vec<&str> = r.dimensionality.params().iter().map(|p| p.name()).collect();
            format!("{}:{}", r.label, names.join(","))
        })
        .collect();
    header_line(
        &mut out,
        [
            ("threshold".to_string(), verdict.threshold.to_string()),
            ("radius".to_string(), verdict.radius.to_string()),
            ("m".to_string(), verdict.modes.to_string()),
            ("n".to_string(), verdict.photons.to_string()),
            ("dims".to_string(), dims.join(";")),
        ],
    );
    provenance_line(&mut out, provenance);
    out.push_str("label\tseparation\tdecision\n");
    for r in &verdict.rows {
        let _ = writeln!(out, "{}\t{}\t{}", r.label, r.separation, r.decision);
    }
    out
}

pub fn write_verdict(path: &Path, verdict: &Verdict, provenance: &Provenance) -> Result<()> {
    write(path, &format_verdict(verdict, provenance))
}

/// Every sampler pair's separation at every scanned radius.
pub fn format_radius_scan(scan: &RadiusScan, provenance: &Provenance) -> String {
    let mut out = String::new();
    header_line(
        &mut out,
        [("chosen".to_string(), scan.chosen.to_string()), ("threshold".to_string(), scan.threshold.to_string())],
    );
    provenance_line(&mut out, provenance);
    out.push_str("radius\tlabel_a\tlabel_b\tseparation\n");
    for row in &scan.rows {
        for (a, b, sep) in &row.pairs {
            let _ = writeln!(out, "{}\t{a}\t{b}\t{sep}", row.radius);
        }
    }
    out
}

pub fn write_edges(path: &Path, edges: &[(usize, usize)]) -> Result<()> {
    let mut out = String::with_capacity(edges.len() * 12);
    for (i, j) in edges {
        let _ = writeln!(out, "{i} {j}");
    }
    write(path, &out)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    write(path, text)
}
