//! CSV, JSON and plot-data outputs. Floats are written in shortest
//! round-trip form so that reports re-parse exactly and repeat byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::fit::{fit_time_law, Law, TimeLawFit};
use super::pseudo_orbit::SweepEntry;
use super::stability::paired_sharpness;
use super::{DiffusionRecord, ExperimentConfig, ExperimentError, StabilityRecord};

pub const DIFFUSION_CSV: &str = "diffusion.csv";
pub const STABILITY_CSV: &str = "stability.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const PLOT_DATA: &str = "time_law.dat";

const DIFFUSION_HEADER: [&str; 14] = [
    "mu",
    "k",
    "t_total",
    "theta",
    "jump",
    "delta_p",
    "delta_i",
    "aligned",
    "natural_drift",
    "final_action",
    "final_distance",
    "reached",
    "waits",
    "stabilization_turns",
];

const STABILITY_HEADER: [&str; 12] =
    ["mu", "band", "horizon", "max_drift", "min_abs_E", "sample", "violated", "phi0", "I0", "q0", "p0", "error"];

/// SHA-256 of the canonical TOML form of the config, hex encoded.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    hex::encode(Sha256::digest(cfg.to_toml().as_bytes()))
}

fn f(x: f64) -> String {
    format!("{x:?}")
}

/// Components joined by spaces.
fn vec_field(v: &[f64]) -> String {
    v.iter().map(|&x| f(x)).collect::<Vec<_>>().join(" ")
}

/// List entries joined by `;`.
fn list_field<I: IntoIterator<Item = String>>(items: I) -> String {
    items.into_iter().collect::<Vec<_>>().join(";")
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io { path: path.display().to_string(), source }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> ExperimentError + '_ {
    move |e| ExperimentError::Report { path: path.display().to_string(), message: e.to_string() }
}

fn write_csv(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for r in rows {
        w.write_record(&r).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<(), ExperimentError> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn diffusion_row(r: &DiffusionRecord) -> Vec<String> {
    vec![
        f(r.mu),
        r.k().to_string(),
        f(r.t_total()),
        list_field(r.thetas.iter().map(|&x| f(x))),
        list_field(r.jump_sizes.iter().map(|&x| f(x))),
        list_field(r.delta_p.iter().map(|&x| f(x))),
        list_field(r.delta_i.iter().map(|v| vec_field(v))),
        list_field(r.aligned.iter().map(|&a| (a as u8).to_string())),
        list_field(r.natural_drift.iter().map(|&x| f(x))),
        vec_field(&r.final_action),
        f(r.final_distance),
        r.reached.to_string(),
        r.waits.to_string(),
        r.stabilization_turns.to_string(),
    ]
}

fn stability_row(r: &StabilityRecord) -> Vec<String> {
    vec![
        f(r.mu),
        r.band.to_string(),
        f(r.horizon),
        f(r.max_drift),
        f(r.min_abs_e),
        r.sample.to_string(),
        r.violated.to_string(),
        vec_field(&r.phi0),
        vec_field(&r.action0),
        f(r.q0),
        f(r.p0),
        r.error.clone().unwrap_or_default(),
    ]
}

#[derive(Serialize)]
struct RunSummary {
    mu: f64,
    status: String,
    k: Option<usize>,
    t_total: Option<f64>,
    final_distance: Option<f64>,
    waits: Option<usize>,
    stabilization_turns: Option<usize>,
    median_transition: Option<f64>,
}

#[derive(Serialize)]
struct DiffusionSummary<'a> {
    experiment: &'static str,
    config_hash: String,
    seed: u64,
    c_jump: f64,
    runs: Vec<RunSummary>,
    fit: Option<TimeLawFit>,
    fit_error: Option<String>,
    config: &'a ExperimentConfig,
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Write `diffusion.csv`, `summary.json` and `time_law.dat` into `out_dir`.
pub fn emit_diffusion_reports(
    cfg: &ExperimentConfig,
    entries: &[SweepEntry],
    out_dir: &Path,
) -> Result<Vec<PathBuf>, ExperimentError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let records: Vec<&DiffusionRecord> = entries.iter().filter_map(|e| e.result.as_ref().ok()).collect();

    let csv_path = out_dir.join(DIFFUSION_CSV);
    write_csv(&csv_path, &DIFFUSION_HEADER, records.iter().map(|r| diffusion_row(r)).collect())?;

    let plot_path = out_dir.join(PLOT_DATA);
    let mut plot = String::from("# mu T_d (1/mu)ln(1/mu)\n");
    for r in records.iter().filter(|r| r.reached) {
        plot.push_str(&format!("{} {} {}\n", f(r.mu), f(r.t_total()), f(Law::InvMuLog.regressor(r.mu))));
    }
    fs::write(&plot_path, plot).map_err(io_err(&plot_path))?;

    let owned: Vec<DiffusionRecord> = records.iter().map(|r| (*r).clone()).collect();
    let (fit, fit_error) = match fit_time_law(&owned) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let runs = entries
        .iter()
        .map(|e| match &e.result {
            Ok(r) => RunSummary {
                mu: e.mu,
                status: if r.reached { "reached".into() } else { "not reached".into() },
                k: Some(r.k()),
                t_total: Some(r.t_total()),
                final_distance: Some(r.final_distance),
                waits: Some(r.waits),
                stabilization_turns: Some(r.stabilization_turns),
                median_transition: median(r.transition_durations()),
            },
            Err(err) => RunSummary {
                mu: e.mu,
                status: format!("error: {err}"),
                k: None,
                t_total: None,
                final_distance: None,
                waits: None,
                stabilization_turns: None,
                median_transition: None,
            },
        })
        .collect();
    let summary_path = out_dir.join(SUMMARY_JSON);
    write_json(
        &summary_path,
        &DiffusionSummary {
            experiment: "diffusion",
            config_hash: config_hash(cfg),
            seed: cfg.seed,
            c_jump: cfg.c_jump,
            runs,
            fit,
            fit_error,
            config: cfg,
        },
    )?;
    Ok(vec![csv_path, summary_path, plot_path])
}

#[derive(Serialize)]
struct BandSummary {
    mu: f64,
    band: usize,
    e_range: [f64; 2],
    samples: usize,
    max_drift: f64,
    violations: usize,
    aborted: usize,
}

#[derive(Serialize)]
struct Sharpness {
    mu: f64,
    near_band: usize,
    far_band: usize,
    pairs: usize,
    near_at_least_far: usize,
    fraction: f64,
}

#[derive(Serialize)]
struct StabilitySummary<'a> {
    experiment: &'static str,
    config_hash: String,
    seed: u64,
    kappa: f64,
    kappa0: f64,
    bands: Vec<BandSummary>,
    sharpness: Vec<Sharpness>,
    total_violations: usize,
    config: &'a ExperimentConfig,
}

/// Write `stability.csv` and `summary.json` into `out_dir`.
pub fn emit_stability_reports(
    cfg: &ExperimentConfig,
    records: &[StabilityRecord],
    out_dir: &Path,
) -> Result<Vec<PathBuf>, ExperimentError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let csv_path = out_dir.join(STABILITY_CSV);
    write_csv(&csv_path, &STABILITY_HEADER, records.iter().map(stability_row).collect())?;

    let mut bands = Vec::new();
    let mut sharpness = Vec::new();
    for &mu in &cfg.mu_list {
        let at_mu: Vec<StabilityRecord> = records.iter().filter(|r| r.mu == mu).cloned().collect();
        for (b, range) in cfg.bands.iter().enumerate() {
            let rs: Vec<&StabilityRecord> = at_mu.iter().filter(|r| r.band == b).collect();
            bands.push(BandSummary {
                mu,
                band: b,
                e_range: *range,
                samples: rs.len(),
                max_drift: rs.iter().map(|r| r.max_drift).fold(0.0, f64::max),
                violations: rs.iter().filter(|r| r.violated).count(),
                aborted: rs.iter().filter(|r| r.error.is_some()).count(),
            });
        }
        if cfg.bands.len() >= 2 {
            let far = cfg.bands.len() - 1;
            let t = paired_sharpness(&at_mu, 0, far);
            sharpness.push(Sharpness {
                mu,
                near_band: 0,
                far_band: far,
                pairs: t.pairs,
                near_at_least_far: t.near_at_least_far,
                fraction: t.fraction(),
            });
        }
    }
    let summary_path = out_dir.join(SUMMARY_JSON);
    write_json(
        &summary_path,
        &StabilitySummary {
            experiment: "stability",
            config_hash: config_hash(cfg),
            seed: cfg.seed,
            kappa: cfg.kappa,
            kappa0: cfg.kappa0,
            total_violations: records.iter().filter(|r| r.violated).count(),
            bands,
            sharpness,
            config: cfg,
        },
    )?;
    Ok(vec![csv_path, summary_path])
}

fn parse<T: std::str::FromStr>(path: &Path, field: &str, what: &str) -> Result<T, ExperimentError> {
    field.parse().map_err(|_| ExperimentError::Report {
        path: path.display().to_string(),
        message: format!("bad {what}: {field:?}"),
    })
}

fn parse_vec(path: &Path, field: &str, what: &str) -> Result<Vec<f64>, ExperimentError> {
    field.split_whitespace().map(|x| parse(path, x, what)).collect()
}

fn parse_list<T>(
    field: &str,
    mut item: impl FnMut(&str) -> Result<T, ExperimentError>,
) -> Result<Vec<T>, ExperimentError> {
    if field.is_empty() {
        return Ok(Vec::new());
    }
    field.split(';').map(&mut item).collect()
}

fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>, ExperimentError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let got: Vec<String> = r.headers().map_err(csv_err(path))?.iter().map(String::from).collect();
    if got != header {
        return Err(ExperimentError::Report {
            path: path.display().to_string(),
            message: format!("unexpected header {got:?}"),
        });
    }
    r.records().map(|x| x.map_err(csv_err(path))).collect()
}

/// Parse a `diffusion.csv` written by [`emit_diffusion_reports`].
pub fn read_diffusion_csv(path: &Path) -> Result<Vec<DiffusionRecord>, ExperimentError> {
    read_rows(path, &DIFFUSION_HEADER)?
        .iter()
        .map(|row| {
            let g = |i: usize| row.get(i).unwrap_or("");
            let thetas: Vec<f64> = parse_list(g(3), |x| parse(path, x, "theta"))?;
            let k: usize = parse(path, g(1), "k")?;
            if k != thetas.len() {
                return Err(ExperimentError::Report {
                    path: path.display().to_string(),
                    message: format!("k = {k} but {} gluing instants", thetas.len()),
                });
            }
            Ok(DiffusionRecord {
                mu: parse(path, g(0), "mu")?,
                thetas,
                jump_sizes: parse_list(g(4), |x| parse(path, x, "jump"))?,
                delta_p: parse_list(g(5), |x| parse(path, x, "delta_p"))?,
                delta_i: parse_list(g(6), |x| parse_vec(path, x, "delta_i"))?,
                aligned: parse_list(g(7), |x| Ok(x == "1"))?,
                natural_drift: parse_list(g(8), |x| parse(path, x, "natural_drift"))?,
                final_action: parse_vec(path, g(9), "final_action")?,
                final_distance: parse(path, g(10), "final_distance")?,
                reached: parse(path, g(11), "reached")?,
                waits: parse(path, g(12), "waits")?,
                stabilization_turns: parse(path, g(13), "stabilization_turns")?,
            })
        })
        .collect()
}

/// Parse a `stability.csv` written by [`emit_stability_reports`].
pub fn read_stability_csv(path: &Path) -> Result<Vec<StabilityRecord>, ExperimentError> {
    read_rows(path, &STABILITY_HEADER)?
        .iter()
        .map(|row| {
            let g = |i: usize| row.get(i).unwrap_or("");
            Ok(StabilityRecord {
                mu: parse(path, g(0), "mu")?,
                band: parse(path, g(1), "band")?,
                horizon: parse(path, g(2), "horizon")?,
                max_drift: parse(path, g(3), "max_drift")?,
                min_abs_e: parse(path, g(4), "min_abs_E")?,
                sample: parse(path, g(5), "sample")?,
                violated: parse(path, g(6), "violated")?,
                phi0: parse_vec(path, g(7), "phi0")?,
                action0: parse_vec(path, g(8), "I0")?,
                q0: parse(path, g(9), "q0")?,
                p0: parse(path, g(10), "p0")?,
                error: (!g(11).is_empty()).then(|| g(11).to_string()),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ExperimentConfig {
        ExperimentConfig::from_toml("pert = \"arnold\"\nmu_list = [0.05]\nomega_i = [0.4]\nomega_f = [0.6]\n").unwrap()
    }

    fn record() -> DiffusionRecord {
        DiffusionRecord {
            mu: 0.05,
            thetas: vec![0.1, 7.3, 15.25],
            jump_sizes: vec![0.04, 0.05, 0.0],
            delta_i: vec![vec![0.04], vec![0.0], vec![0.0]],
            delta_p: vec![0.0, 0.05, 0.0],
            aligned: vec![true, false, true],
            natural_drift: vec![0.01, 0.002],
            final_action: vec![0.59],
            final_distance: 0.01,
            reached: true,
            waits: 1,
            stabilization_turns: 0,
        }
    }

    #[test]
    fn empty_reports_have_headers() {
        let dir = tempfile::tempdir().unwrap();
        emit_diffusion_reports(&cfg(), &[], dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join(DIFFUSION_CSV)).unwrap();
        assert_eq!(text.trim_end(), DIFFUSION_HEADER.join(","));
        emit_stability_reports(&cfg(), &[], dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join(STABILITY_CSV)).unwrap();
        assert_eq!(text.trim_end(), STABILITY_HEADER.join(","));
    }

    #[test]
    fn diffusion_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let entries = vec![SweepEntry { mu: 0.05, result: Ok(record()) }];
        emit_diffusion_reports(&cfg(), &entries, dir.path()).unwrap();
        assert_eq!(read_diffusion_csv(&dir.path().join(DIFFUSION_CSV)).unwrap(), vec![record()]);
        let summary: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join(SUMMARY_JSON)).unwrap()).unwrap();
        assert_eq!(summary["config_hash"].as_str().unwrap(), config_hash(&cfg()));
        assert_eq!(summary["seed"], 0);
    }

    #[test]
    fn stability_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let recs = vec![StabilityRecord {
            mu: 1e-3,
            band: 2,
            sample: 4,
            horizon: 690.7755278982137,
            max_drift: 0.0123,
            min_abs_e: 0.61,
            violated: false,
            phi0: vec![1.0, 2.5],
            action0: vec![-0.3, 0.1],
            q0: 2.0,
            p0: -1.5,
            error: Some("integration blew up, somewhere".into()),
        }];
        emit_stability_reports(&cfg(), &recs, dir.path()).unwrap();
        assert_eq!(read_stability_csv(&dir.path().join(STABILITY_CSV)).unwrap(), recs);
    }

    #[test]
    fn hash_tracks_config() {
        let a = cfg();
        let mut b = cfg();
        assert_eq!(config_hash(&a), config_hash(&b));
        b.seed = 1;
        assert_ne!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 64);
    }
}
