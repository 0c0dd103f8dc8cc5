use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baker::{BakerParams, ShiftMode};
use crate::dynamics::{FitWindow, DEFAULT_STATES, DISTANCE_FLOOR};
use crate::ensembles::{EnsembleKind, EnsembleSpec, SECOND_MOMENT_MAX_N};
use crate::spectral::{RADIAL_BINS, RADIAL_MAX};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    BakerSpectrum,
    EnsembleSpectrum,
    GapScan,
    RealFractionScan,
    Decay,
    GinibreCompare,
    DensityProfile,
    MomentCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::BakerSpectrum => "baker-spectrum",
            Self::EnsembleSpectrum => "ensemble-spectrum",
            Self::GapScan => "gap-scan",
            Self::RealFractionScan => "real-fraction-scan",
            Self::Decay => "decay",
            Self::GinibreCompare => "ginibre-compare",
            Self::DensityProfile => "density-profile",
            Self::MomentCheck => "moment-check",
        }
    }

    fn uses_random_channels(self) -> bool {
        matches!(
            self,
            Self::EnsembleSpectrum
                | Self::GapScan
                | Self::RealFractionScan
                | Self::Decay
                | Self::DensityProfile
                | Self::MomentCheck
        )
    }
}

/// A scalar or a list of values to sweep over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn values(&self) -> Vec<T> {
        match self {
            Self::One(v) => vec![v.clone()],
            Self::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub ensemble: Option<OneOrMany<EnsembleKind>>,
    pub n: Option<OneOrMany<usize>>,
    pub m: Option<OneOrMany<usize>>,
    /// Use M = N² for every N instead of an explicit `m`.
    pub m_is_n_squared: bool,
    pub k: Option<OneOrMany<usize>>,
    pub l: Option<OneOrMany<u32>>,
    pub delta: Option<OneOrMany<f64>>,
    pub shift_mode: ShiftMode,
    pub p: Option<Vec<f64>>,
    /// Compute channel spectra through the real Bloch block and real Schur form.
    pub via_bloch: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            ensemble: None,
            n: None,
            m: None,
            m_is_n_squared: false,
            k: None,
            l: None,
            delta: None,
            shift_mode: ShiftMode::None,
            p: None,
            via_bloch: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    #[default]
    Radial,
    ImaginaryAxis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HistogramConfig {
    pub profile: Profile,
    /// Defaults: 50 (radial), 20 (imaginary axis).
    pub bins: Option<usize>,
    /// Upper end r_max (radial) or half-range y_max (imaginary axis).
    /// Defaults: 1.25 and 0.5.
    pub range: Option<f64>,
    pub band_halfwidth: f64,
}

impl Default for HistogramConfig {
    fn default() -> Self {
        Self {
            profile: Profile::Radial,
            bins: None,
            range: None,
            band_halfwidth: 0.1,
        }
    }
}

impl HistogramConfig {
    pub fn bins(&self) -> usize {
        self.bins.unwrap_or(match self.profile {
            Profile::Radial => RADIAL_BINS,
            Profile::ImaginaryAxis => 20,
        })
    }

    pub fn range(&self) -> f64 {
        self.range.unwrap_or(match self.profile {
            Profile::Radial => RADIAL_MAX,
            Profile::ImaginaryAxis => 0.5,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DynamicsConfig {
    pub steps: usize,
    pub states: usize,
    pub fit_start: usize,
    pub fit_end: Option<usize>,
    pub floor: f64,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            steps: 60,
            states: DEFAULT_STATES,
            fit_start: 1,
            fit_end: None,
            floor: DISTANCE_FLOOR,
        }
    }
}

impl DynamicsConfig {
    pub fn window(&self) -> FitWindow {
        FitWindow {
            start: self.fit_start,
            end: self.fit_end,
            floor: self.floor,
        }
    }
}

fn push_unique(errs: &mut Vec<String>, e: String) {
    if !errs.contains(&e) {
        errs.push(e);
    }
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub samples: usize,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub histogram: HistogramConfig,
    #[serde(default)]
    pub dynamics: DynamicsConfig,
}

/// One parameter point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunPoint {
    pub ensemble: Option<EnsembleKind>,
    pub n: usize,
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub l: Option<u32>,
    pub delta: Option<f64>,
}

impl ExperimentConfig {
    /// Parses and fully validates a TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::InvalidConfig {
            errors: vec![e.message().to_string()],
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// Copy with every implicit default written out.
    pub fn resolved(&self) -> Self {
        let mut out = self.clone();
        if self.experiment.uses_random_channels() && out.model.ensemble.is_none() {
            out.model.ensemble = Some(OneOrMany::One(EnsembleKind::Environmental));
        }
        if self.experiment == ExperimentKind::GinibreCompare {
            out.model.ensemble = Some(OneOrMany::One(EnsembleKind::RealGinibre));
        }
        if self.experiment == ExperimentKind::BakerSpectrum && out.model.delta.is_none() {
            out.model.delta = Some(OneOrMany::One(0.0));
        }
        out.histogram.bins = Some(self.histogram.bins());
        out.histogram.range = Some(self.histogram.range());
        out
    }

    /// Samples per point; deterministic models use one.
    pub fn samples_per_point(&self) -> usize {
        if self.experiment == ExperimentKind::BakerSpectrum {
            1
        } else {
            self.samples
        }
    }

    /// Sweep points in a fixed order: ensemble, N, M, K, L, Δ (last varies fastest).
    pub fn points(&self) -> Vec<RunPoint> {
        let r = self.resolved();
        let model = &r.model;
        let opt =
            |v: Option<Vec<usize>>| v.map_or(vec![None], |v| v.into_iter().map(Some).collect());
        let ensembles: Vec<Option<EnsembleKind>> = model
            .ensemble
            .as_ref()
            .map_or(vec![None], |e| e.values().into_iter().map(Some).collect());
        let ns = model.n.as_ref().map_or(Vec::new(), |n| n.values());
        let ks = opt(model.k.as_ref().map(|k| k.values()));
        let ls: Vec<Option<u32>> = model
            .l
            .as_ref()
            .map_or(vec![None], |l| l.values().into_iter().map(Some).collect());
        let deltas: Vec<Option<f64>> = model
            .delta
            .as_ref()
            .map_or(vec![None], |d| d.values().into_iter().map(Some).collect());
        let mut points = Vec::new();
        for &ensemble in &ensembles {
            for &n in &ns {
                let ms = if model.m_is_n_squared {
                    vec![Some(n * n)]
                } else if r.experiment == ExperimentKind::GinibreCompare {
                    vec![None]
                } else {
                    opt(model.m.as_ref().map(|m| m.values()))
                };
                for &m in &ms {
                    for &k in &ks {
                        for &l in &ls {
                            for &delta in &deltas {
                                points.push(RunPoint {
                                    ensemble,
                                    n,
                                    m,
                                    k,
                                    l,
                                    delta,
                                });
                            }
                        }
                    }
                }
            }
        }
        points
    }

    pub fn baker_params(&self, p: &RunPoint) -> Option<BakerParams> {
        Some(BakerParams {
            n: p.n,
            k: p.k?,
            l: p.l?,
            m: p.m?,
            delta: p.delta.unwrap_or(0.0),
            shift_mode: self.model.shift_mode,
        })
    }

    pub fn ensemble_spec(&self, p: &RunPoint) -> Option<EnsembleSpec> {
        Some(EnsembleSpec {
            kind: p.ensemble?,
            n: p.n,
            m: p.m.unwrap_or(0),
            p: self.model.p.clone(),
            samples: self.samples,
            seed: self.seed,
        })
    }

    /// Every violated constraint, in a stable order without duplicates.
    pub fn violations(&self) -> Vec<String> {
        let mut errs: Vec<String> = Vec::new();
        let kind = self.experiment;
        let name = kind.name();
        let model = &self.model;

        if self.samples == 0 {
            push_unique(&mut errs, "samples must be at least 1".into());
        }
        if model.n.as_ref().is_none_or(|n| n.values().is_empty()) {
            push_unique(&mut errs, format!("model.n is required for {name}"));
        }
        let needs_m = kind != ExperimentKind::GinibreCompare;
        if needs_m {
            match (&model.m, model.m_is_n_squared) {
                (None, false) => push_unique(&mut errs, format!("model.m is required for {name}")),
                (Some(_), true) => push_unique(
                    &mut errs,
                    "model.m and model.m_is_n_squared are mutually exclusive".into(),
                ),
                (Some(m), false) if m.values().is_empty() => {
                    push_unique(&mut errs, "model.m must not be empty".into())
                }
                _ => {}
            }
        } else {
            if model.m.is_some() || model.m_is_n_squared {
                push_unique(&mut errs, format!("model.m is not used by {name}"));
            }
        }
        for (key, list_empty) in [
            (
                "ensemble",
                model.ensemble.as_ref().map(|v| v.values().is_empty()),
            ),
            ("k", model.k.as_ref().map(|v| v.values().is_empty())),
            ("l", model.l.as_ref().map(|v| v.values().is_empty())),
            ("delta", model.delta.as_ref().map(|v| v.values().is_empty())),
        ] {
            if list_empty == Some(true) {
                push_unique(&mut errs, format!("model.{key} must not be empty"));
            }
        }

        if kind == ExperimentKind::BakerSpectrum {
            if model.k.is_none() {
                push_unique(&mut errs, "model.k is required for baker-spectrum".into());
            }
            if model.l.is_none() {
                push_unique(&mut errs, "model.l is required for baker-spectrum".into());
            }
            if model.ensemble.is_some() {
                push_unique(
                    &mut errs,
                    "model.ensemble is not used by baker-spectrum".into(),
                );
            }
            if model.p.is_some() {
                push_unique(&mut errs, "model.p is not used by baker-spectrum".into());
            }
        } else {
            for (key, set) in [
                ("k", model.k.is_some()),
                ("l", model.l.is_some()),
                ("delta", model.delta.is_some()),
            ] {
                if set {
                    push_unique(&mut errs, format!("model.{key} is not used by {name}"));
                }
            }
            if model.shift_mode != ShiftMode::None {
                push_unique(&mut errs, format!("model.shift_mode is not used by {name}"));
            }
        }

        if let Some(e) = &model.ensemble {
            for kind_e in e.values() {
                match (kind, kind_e) {
                    (ExperimentKind::GinibreCompare, EnsembleKind::RealGinibre) => {}
                    (ExperimentKind::GinibreCompare, other) => {
                        push_unique(&mut errs, format!("ginibre-compare samples real_ginibre only (got {other})"))
                    }
                    (ExperimentKind::MomentCheck, EnsembleKind::Environmental) => {}
                    (ExperimentKind::MomentCheck, other) => {
                        push_unique(&mut errs, format!("moment-check needs the environmental ensemble (got {other})"))
                    }
                    (_, EnsembleKind::RealGinibre) => {
                        push_unique(&mut errs, format!("real_ginibre is not a channel ensemble; use ginibre-compare instead of {name}"))
                    }
                    _ => {}
                }
            }
        }

        let points = if errs.is_empty() {
            self.points()
        } else {
            Vec::new()
        };
        for p in &points {
            if kind == ExperimentKind::BakerSpectrum {
                if let Some(bp) = self.baker_params(p) {
                    for e in bp.violations() {
                        push_unique(&mut errs, e);
                    }
                }
            } else if let Some(spec) = self.ensemble_spec(p) {
                for e in spec.violations() {
                    push_unique(&mut errs, e);
                }
            }
        }

        match kind {
            ExperimentKind::DensityProfile => {
                if points.len() > 1 {
                    push_unique(
                        &mut errs,
                        "density-profile takes a single (ensemble, N, M) point".into(),
                    );
                }
                let h = &self.histogram;
                if h.bins() == 0 {
                    push_unique(&mut errs, "histogram.bins must be at least 1".into());
                }
                if !(h.range() > 0.0) {
                    push_unique(&mut errs, "histogram.range must be positive".into());
                }
                if !(h.band_halfwidth > 0.0) {
                    push_unique(
                        &mut errs,
                        "histogram.band_halfwidth must be positive".into(),
                    );
                }
            }
            ExperimentKind::Decay => {
                let d = &self.dynamics;
                if d.steps == 0 {
                    push_unique(&mut errs, "dynamics.steps must be at least 1".into());
                }
                if d.states == 0 {
                    push_unique(&mut errs, "dynamics.states must be at least 1".into());
                }
                if d.fit_start >= d.steps {
                    push_unique(
                        &mut errs,
                        "dynamics.fit_start must be below dynamics.steps".into(),
                    );
                }
                if let Some(end) = d.fit_end {
                    if end < d.fit_start + 2 {
                        push_unique(
                            &mut errs,
                            "dynamics.fit_end must leave at least 3 points".into(),
                        );
                    }
                }
                if !(d.floor > 0.0) {
                    push_unique(&mut errs, "dynamics.floor must be positive".into());
                }
            }
            ExperimentKind::MomentCheck => {
                if self.samples < 100 {
                    push_unique(&mut errs, "moment-check needs samples >= 100".into());
                }
                for p in &points {
                    if p.n > SECOND_MOMENT_MAX_N {
                        log::warn!("moment-check at N={} skips second moments", p.n);
                    }
                }
            }
            _ => {}
        }
        errs
    }

    pub fn validate(&self) -> Result<()> {
        let errors = self.violations();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig { errors })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn errors(text: &str) -> Vec<String> {
        match ExperimentConfig::from_toml_str(text) {
            Err(Error::InvalidConfig { errors }) => errors,
            other => panic!("expected config errors, got {other:?}"),
        }
    }

    #[test]
    fn k_must_divide_n() {
        let e = errors("experiment = \"baker-spectrum\"\n[model]\nn = 10\nk = 4\nl = 1\nm = 2\n");
        assert!(e.contains(&"K must divide N".to_string()), "{e:?}");
    }

    #[test]
    fn shift_integrality() {
        let e = errors(
            "experiment = \"baker-spectrum\"\n[model]\nn = 32\nk = 4\nl = 8\nm = 2\ndelta = 0.3333333333333333\nshift_mode = \"top\"\n",
        );
        assert!(e.contains(&"NΔ/2 must be integer".to_string()), "{e:?}");
    }

    #[test]
    fn errors_are_aggregated() {
        let e = errors(
            "experiment = \"gap-scan\"\nsamples = 0\n[model]\nn = 9\nm = 2\nk = 3\nshift_mode = \"top\"\n",
        );
        assert!(e.len() >= 3, "{e:?}");
        assert!(e.iter().any(|x| x.contains("samples")));
        assert!(e.iter().any(|x| x.contains("model.k")));
    }

    #[test]
    fn unknown_keys_rejected() {
        let e = errors("experiment = \"gap-scan\"\nsampels = 3\n[model]\nn = 4\nm = 2\n");
        assert!(e[0].contains("sampels"), "{e:?}");
        let e = errors("experiment = \"gap-scan\"\n[model]\nn = 4\nm = 2\nkk = 1\n");
        assert!(e[0].contains("kk"), "{e:?}");
    }

    #[test]
    fn sweep_points_and_defaults() {
        let c = ExperimentConfig::from_toml_str(
            "experiment = \"gap-scan\"\nsamples = 3\n[model]\nn = 16\nm = [2, 4, 8, 16]\n",
        )
        .unwrap();
        let pts = c.points();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[2].m, Some(8));
        assert_eq!(pts[0].ensemble, Some(EnsembleKind::Environmental));
        let r = c.resolved();
        assert_eq!(r.histogram.bins, Some(50));
        assert_eq!(
            r.model.ensemble,
            Some(OneOrMany::One(EnsembleKind::Environmental))
        );
    }

    #[test]
    fn m_is_n_squared_points() {
        let c = ExperimentConfig::from_toml_str(
            "experiment = \"real-fraction-scan\"\n[model]\nn = [4, 6]\nm_is_n_squared = true\n",
        )
        .unwrap();
        let ms: Vec<_> = c.points().iter().map(|p| p.m).collect();
        assert_eq!(ms, vec![Some(16), Some(36)]);
    }

    #[test]
    fn kind_specific_rules() {
        let e = errors("experiment = \"moment-check\"\nsamples = 10\n[model]\nn = 2\nm = 2\nensemble = \"external_fields\"\n");
        assert_eq!(e.len(), 2, "{e:?}");
        let e = errors("experiment = \"density-profile\"\n[model]\nn = 4\nm = [2, 4]\n");
        assert!(e[0].contains("single"));
        let e = errors("experiment = \"ginibre-compare\"\n[model]\nn = 4\nm = 2\n");
        assert!(e[0].contains("not used"));
    }
}
