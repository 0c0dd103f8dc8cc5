//! Declarative experiments: TOML configs, shipped presets, a parallel runner and
//! the CSV/JSON artifacts it writes.
//!
//! Every run draws from its own stream `(seed, run_id)` and BLAS is pinned to one
//! thread, so outputs do not depend on the worker count or scheduling.

mod config;
mod presets;
mod table;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;

pub use config::{
    DynamicsConfig, ExperimentConfig, ExperimentKind, HistogramConfig, ModelConfig, OneOrMany,
    Profile, RunPoint,
};
pub use presets::{preset, Preset, PRESETS};
pub use table::{format_float, Cell, Table};

use crate::baker::sloppy_baker_channel;
use crate::channels::superoperator_from_kraus;
use crate::dynamics::{distance_trajectory, fit_decay_rate, DecayFit, DecayTrajectory};
use crate::ensembles::{phi_moment_check, EnsembleSample, MomentReport};
use crate::matrix::set_blas_threads;
use crate::rng::{RngState, ALGORITHM};
use crate::spectral::{
    edelman_expected_real, erfc_bounds, imaginary_axis_density, radial_density, real_spectrum,
    spectrum_report, DensityHistogram, SpectrumReport,
};
use crate::{Complex64, Error, Result};

pub const SPECTRA_HEADER: &[&str] = &[
    "run_id",
    "eig_index",
    "re",
    "im",
    "is_leading",
    "is_real_flag",
];
pub const SUMMARY_HEADER: &[&str] = &[
    "run_id",
    "model",
    "N",
    "M",
    "K",
    "L",
    "delta",
    "gamma",
    "R",
    "N_R",
    "N_C",
    "eta",
    "eta_ref",
    "alpha_pred",
    "alpha",
    "fit_r2",
    "status",
];
pub const DENSITIES_HEADER: &[&str] = &["bin_center", "density", "lower_bound", "upper_bound"];
pub const DECAY_HEADER: &[&str] = &["run_id", "t", "distance"];
pub const MOMENTS_HEADER: &[&str] = &[
    "N",
    "M",
    "samples",
    "first_moment_max_z",
    "second_moment_max_z",
    "symmetry_defect",
    "offdiagonal_variance",
    "offdiagonal_variance_target",
];

enum RunData {
    Channel {
        report: SpectrumReport,
        decay: Option<(DecayTrajectory, DecayFit)>,
    },
    Ginibre {
        eigenvalues: Vec<(Complex64, bool)>,
        real_count: usize,
    },
}

struct RunRecord {
    run_id: usize,
    point: RunPoint,
    outcome: std::result::Result<RunData, String>,
}

/// In-memory result of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub tables: Vec<Table>,
    pub runs: usize,
    /// `(run_id, message)` for every failed run.
    pub failures: Vec<(usize, String)>,
}

impl ExperimentOutput {
    pub fn table(&self, file_name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.file_name == file_name)
    }
}

fn run_one(config: &ExperimentConfig, run_id: usize, point: &RunPoint) -> Result<RunData> {
    let mut rng = RngState::with_stream(config.seed, run_id as u64);
    let kraus = if config.experiment == ExperimentKind::BakerSpectrum {
        let params = config.baker_params(point).expect("validated baker point");
        sloppy_baker_channel(&params)?
    } else {
        let spec = config
            .ensemble_spec(point)
            .expect("validated ensemble point");
        match spec.draw(&mut rng)? {
            EnsembleSample::Channel(k) => k,
            EnsembleSample::Matrix(g) => {
                let s = real_spectrum(&g)?;
                let mut eigenvalues: Vec<(Complex64, bool)> =
                    s.eigenvalues.into_iter().zip(s.real_flags).collect();
                eigenvalues.sort_by(|a, b| b.0.norm().total_cmp(&a.0.norm()));
                return Ok(RunData::Ginibre {
                    eigenvalues,
                    real_count: s.real_count,
                });
            }
        }
    };
    let report = spectrum_report(&superoperator_from_kraus(&kraus), config.model.via_bloch)?;
    let decay = if config.experiment == ExperimentKind::Decay {
        let d = &config.dynamics;
        let traj = distance_trajectory(&kraus, d.steps, d.states, &mut rng)?;
        let fit = fit_decay_rate(&traj, &d.window())?;
        Some((traj, fit))
    } else {
        None
    };
    Ok(RunData::Channel { report, decay })
}

fn eta_reference(n_eff: usize) -> Option<f64> {
    edelman_expected_real(n_eff)
        .ok()
        .map(|e| e / (n_eff as f64).sqrt())
}

/// Runs the experiment on the current rayon pool without touching the filesystem.
pub fn execute(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let config = config.resolved();
    set_blas_threads(1);
    if config.experiment == ExperimentKind::MomentCheck {
        return execute_moments(&config);
    }

    let points = config.points();
    let per_point = config.samples_per_point();
    let jobs: Vec<(usize, RunPoint)> = points
        .iter()
        .enumerate()
        .flat_map(|(pi, p)| (0..per_point).map(move |s| (pi * per_point + s, *p)))
        .collect();
    let records: Vec<RunRecord> = jobs
        .par_iter()
        .map(|(run_id, point)| RunRecord {
            run_id: *run_id,
            point: *point,
            outcome: run_one(&config, *run_id, point).map_err(|e| e.to_string()),
        })
        .collect();

    let mut eta_refs: BTreeMap<usize, Option<f64>> = BTreeMap::new();
    let mut spectra = Table::new("spectra.csv", SPECTRA_HEADER);
    let mut summary = Table::new("summary.csv", SUMMARY_HEADER);
    let mut decay = Table::new("decay.csv", DECAY_HEADER);
    let mut failures = Vec::new();
    let mut reports = Vec::new();

    for rec in &records {
        let p = &rec.point;
        let model = match p.ensemble {
            Some(e) => e.to_string(),
            None => "baker".to_string(),
        };
        let mut row = vec![
            rec.run_id.into(),
            Cell::Text(model),
            p.n.into(),
            Cell::opt_int(p.m),
            Cell::opt_int(p.k),
            Cell::opt_int(p.l.map(|l| l as usize)),
            Cell::opt_float(p.delta),
        ];
        match &rec.outcome {
            Err(msg) => {
                failures.push((rec.run_id, msg.clone()));
                row.extend(std::iter::repeat_n(Cell::Empty, 9));
                row.push(Cell::Text(format!("error: {msg}")));
            }
            Ok(RunData::Ginibre {
                eigenvalues,
                real_count,
            }) => {
                for (i, (z, real)) in eigenvalues.iter().enumerate() {
                    spectra.push(vec![
                        rec.run_id.into(),
                        i.into(),
                        z.re.into(),
                        z.im.into(),
                        false.into(),
                        (*real).into(),
                    ]);
                }
                let n = p.n;
                let eta_ref = *eta_refs.entry(n).or_insert_with(|| eta_reference(n));
                row.extend([
                    Cell::Empty,
                    Cell::Empty,
                    (*real_count).into(),
                    (n - real_count).into(),
                    (*real_count as f64 / (n as f64).sqrt()).into(),
                    Cell::opt_float(eta_ref),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Text("ok".into()),
                ]);
            }
            Ok(RunData::Channel { report, decay: dec }) => {
                for (i, (z, real)) in report
                    .eigenvalues
                    .iter()
                    .zip(&report.real_flags)
                    .enumerate()
                {
                    spectra.push(vec![
                        rec.run_id.into(),
                        i.into(),
                        z.re.into(),
                        z.im.into(),
                        (i == 0).into(),
                        (*real).into(),
                    ]);
                }
                let n_eff = p.n * p.n - 1;
                let eta_ref = *eta_refs
                    .entry(n_eff)
                    .or_insert_with(|| eta_reference(n_eff));
                let alpha_pred = (!report.degenerate && report.subleading_radius > 0.0)
                    .then(|| report.predicted_rate());
                row.extend([
                    report.gap.into(),
                    report.subleading_radius.into(),
                    report.real_count.into(),
                    report.complex_count.into(),
                    (report.real_count as f64 / (n_eff as f64).sqrt()).into(),
                    Cell::opt_float(eta_ref),
                    Cell::opt_float(alpha_pred),
                    Cell::opt_float(dec.as_ref().map(|(_, f)| f.alpha)),
                    Cell::opt_float(dec.as_ref().map(|(_, f)| f.r_squared)),
                    Cell::Text("ok".into()),
                ]);
                if let Some((traj, _)) = dec {
                    for (t, d) in traj.mean_distance.iter().enumerate() {
                        decay.push(vec![rec.run_id.into(), t.into(), (*d).into()]);
                    }
                }
                reports.push(report.clone());
            }
        }
        summary.push(row);
    }

    let mut tables = vec![spectra, summary];
    if config.experiment == ExperimentKind::Decay {
        tables.push(decay);
    }
    if config.experiment == ExperimentKind::DensityProfile {
        if reports.is_empty() {
            failures.push((usize::MAX, "no successful runs to build a density".into()));
        } else {
            let m = points[0].m.expect("validated density point");
            tables.push(density_table(&config, &reports, m)?);
        }
    }
    Ok(ExperimentOutput {
        tables,
        runs: records.len(),
        failures,
    })
}

fn density_table(config: &ExperimentConfig, reports: &[SpectrumReport], m: usize) -> Result<Table> {
    let h = &config.histogram;
    let mut table = Table::new("densities.csv", DENSITIES_HEADER);
    let hist: DensityHistogram = match h.profile {
        Profile::Radial => radial_density(reports, m, h.bins(), h.range())?,
        Profile::ImaginaryAxis => {
            imaginary_axis_density(reports, m, h.band_halfwidth, h.bins(), h.range())?
        }
    };
    for (c, d) in hist.centers().into_iter().zip(&hist.density) {
        let (lo, hi) = match h.profile {
            Profile::Radial => (Cell::Empty, Cell::Empty),
            Profile::ImaginaryAxis => {
                let (lo, hi) = erfc_bounds(c, m as f64);
                (lo.into(), hi.into())
            }
        };
        table.push(vec![c.into(), (*d).into(), lo, hi]);
    }
    Ok(table)
}

fn execute_moments(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let points = config.points();
    let reports: Vec<std::result::Result<MomentReport, String>> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let mut rng = RngState::with_stream(config.seed, i as u64);
            phi_moment_check(p.n, p.m.expect("validated"), config.samples, &mut rng)
                .map_err(|e| e.to_string())
        })
        .collect();
    let mut table = Table::new("moments.csv", MOMENTS_HEADER);
    let mut failures = Vec::new();
    for (i, (p, r)) in points.iter().zip(reports).enumerate() {
        match r {
            Ok(r) => table.push(vec![
                r.n.into(),
                r.m.into(),
                r.samples.into(),
                r.first_moment_max_z.into(),
                Cell::opt_float(r.second_moment_max_z),
                r.symmetry_defect.into(),
                r.offdiagonal_variance.into(),
                (1.0 / (r.n * r.n * r.m) as f64).into(),
            ]),
            Err(msg) => {
                log::error!("moment check at N={}, M={:?} failed: {msg}", p.n, p.m);
                failures.push((i, msg));
            }
        }
    }
    Ok(ExperimentOutput {
        tables: vec![table],
        runs: points.len(),
        failures,
    })
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub runs: usize,
    pub failures: Vec<(usize, String)>,
    pub wall_time: Duration,
}

impl RunSummary {
    pub fn succeeded(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Executes on a dedicated pool of `threads` workers and writes all tables plus
/// `meta.json` into `out_dir`.
pub fn run_experiment(
    config: &ExperimentConfig,
    threads: usize,
    out_dir: &Path,
) -> Result<RunSummary> {
    config.validate()?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter {
            name: "threads",
            reason: e.to_string(),
        })?;
    let output = pool.install(|| execute(config))?;
    std::fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut files = Vec::new();
    for t in &output.tables {
        files.push(t.write(out_dir)?);
    }
    let wall_time = start.elapsed();
    let meta = serde_json::json!({
        "tool": "speclab",
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": config.experiment.name(),
        "seed": config.seed,
        "rng": ALGORITHM,
        "threads": threads.max(1),
        "runs": output.runs,
        "failed_runs": output.failures.iter().map(|(id, msg)| {
            serde_json::json!({ "run_id": id, "error": msg })
        }).collect::<Vec<_>>(),
        "files": output.tables.iter().map(|t| t.file_name).collect::<Vec<_>>(),
        "wall_time_seconds": wall_time.as_secs_f64(),
        "config": config.resolved(),
    });
    let meta_path = out_dir.join("meta.json");
    let text =
        serde_json::to_string_pretty(&meta).map_err(|e| Error::Serialization(e.to_string()))?;
    std::fs::write(&meta_path, text + "\n").map_err(|source| Error::Io {
        path: meta_path.clone(),
        source,
    })?;
    files.push(meta_path);
    Ok(RunSummary {
        out_dir: out_dir.to_path_buf(),
        files,
        runs: output.runs,
        failures: output.failures,
        wall_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(text: &str) -> ExperimentOutput {
        execute(&ExperimentConfig::from_toml_str(text).unwrap()).unwrap()
    }

    #[test]
    fn baker_run_has_one_leading_row_per_run() {
        let out = small("experiment = \"baker-spectrum\"\n[model]\nn = 8\nk = [2, 4]\nl = 2\nm = 2\ndelta = 0.25\nshift_mode = \"top\"\n");
        assert!(out.failures.is_empty());
        let spectra = out.table("spectra.csv").unwrap();
        assert_eq!(spectra.rows.len(), 2 * 64);
        let leading = spectra.rows.iter().filter(|r| r[4] == Cell::Int(1)).count();
        assert_eq!(leading, 2);
        assert_eq!(out.table("summary.csv").unwrap().rows.len(), 2);
    }

    #[test]
    fn failed_runs_become_error_rows() {
        // A single external field is unitary, so the decay run cannot find a unique invariant state.
        let out = small("experiment = \"decay\"\n[model]\nensemble = \"external_fields\"\nn = 3\nm = [1, 2]\n[dynamics]\nsteps = 10\nstates = 2\n");
        assert_eq!(out.failures.len(), 1);
        let summary = out.table("summary.csv").unwrap();
        match &summary.rows[0][16] {
            Cell::Text(s) => assert!(s.starts_with("error: degenerate")),
            other => panic!("{other:?}"),
        }
        assert_eq!(summary.rows[1][16], Cell::Text("ok".into()));
    }

    #[test]
    fn ginibre_rows() {
        let out = small("experiment = \"ginibre-compare\"\nsamples = 3\n[model]\nn = [2, 5]\n");
        let s = out.table("summary.csv").unwrap();
        assert_eq!(s.rows.len(), 6);
        assert_eq!(out.table("spectra.csv").unwrap().rows.len(), 3 * 2 + 3 * 5);
    }

    #[test]
    fn moments_table() {
        let out = small("experiment = \"moment-check\"\nsamples = 200\n[model]\nn = 2\nm = 2\n");
        let t = out.table("moments.csv").unwrap();
        assert_eq!(t.rows.len(), 1);
    }

    #[test]
    fn thread_count_does_not_change_bytes() {
        let c = ExperimentConfig::from_toml_str(
            "experiment = \"gap-scan\"\nsamples = 3\nseed = 9\n[model]\nn = 3\nm = [2, 3]\n",
        )
        .unwrap();
        let bytes = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            let out = pool.install(|| execute(&c)).unwrap();
            out.tables
                .iter()
                .map(|t| t.to_csv_bytes().unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(bytes(1), bytes(3));
    }
}
