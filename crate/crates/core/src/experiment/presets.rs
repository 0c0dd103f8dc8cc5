use super::ExperimentConfig;
use crate::Result;

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    /// What the outputs are expected to show.
    pub target: &'static str,
    pub source: &'static str,
}

impl Preset {
    pub fn config(&self) -> Result<ExperimentConfig> {
        ExperimentConfig::from_toml_str(self.source)
    }
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "baker-spectrum",
        summary: "sloppy baker map, N=32, L=8, M=2, delta=1/4, K in {4, 32}",
        target: "z1 nondegenerate, |z2| <= 1/sqrt(2) + 0.1 at K=4, smaller gap at K=32",
        source: include_str!("../../presets/baker-spectrum.toml"),
    },
    Preset {
        name: "ensemble-spectrum",
        summary: "environmental, external-field and projected-unitary channels, N=16, M=4",
        target: "every run has one leading eigenvalue 1 and spectra inside the unit disk",
        source: include_str!("../../presets/ensemble-spectrum.toml"),
    },
    Preset {
        name: "gap-scan",
        summary: "environmental channels, N=16, M in {2, 4, 8, 16}, 20 samples each",
        target: "mean R*sqrt(M) in [0.85, 1.15], log-log slope of R vs M = -0.5 +- 0.1",
        source: include_str!("../../presets/gap-scan.toml"),
    },
    Preset {
        name: "radial-density",
        summary: "environmental channels, N=32, M=16, 10 samples, radial histogram",
        target: "density 2r on [0, 1], under 2% of mass beyond r = 1.1",
        source: include_str!("../../presets/radial-density.toml"),
    },
    Preset {
        name: "real-fraction-scan",
        summary: "environmental channels with M = N^2, N in {4, 6, 8}, 50 samples",
        target: "eta within 0.1 of the real Ginibre value at n = N^2 - 1",
        source: include_str!("../../presets/real-fraction-scan.toml"),
    },
    Preset {
        name: "decay",
        summary: "environmental channels, N=24, M in {8, 12}, 16 initial pure states",
        target:
            "ln d(t) linear (R^2 > 0.95), alpha within 20% of -ln(1 - gamma), alpha(12) > alpha(8)",
        source: include_str!("../../presets/decay.toml"),
    },
    Preset {
        name: "cross-section",
        summary: "environmental channels, N=8, M=64, 4000 samples, imaginary-axis density",
        target: "density compared with the erfc lower and upper bounds for 0.05 < |y| < 0.5",
        source: include_str!("../../presets/cross-section.toml"),
    },
];

pub fn preset(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_parse() {
        assert_eq!(PRESETS.len(), 7);
        for p in PRESETS {
            let c = p.config().unwrap_or_else(|e| panic!("{}: {e}", p.name));
            assert!(!c.points().is_empty());
        }
        assert!(preset("gap-scan").is_some());
        assert!(preset("nope").is_none());
    }
}
