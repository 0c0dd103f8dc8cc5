//! Quantized asymmetric baker maps followed by phase-space measurements.
//!
//! The unitary step is `B_K = F_N† · diag(F_{N/K}, F_{N−N/K})`. The measurement
//! splits momentum space into `M` equal blocks; for `M = 2` the upper block can
//! additionally be translated by `N·Δ/2` momentum quanta ("sloppy" map), or both
//! blocks by `N·Δ/4` towards the centre ("double sloppy").

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channels::KrausSet;
use crate::matrix::{cyclic_shift, dft_matrix, ComplexMatrix};
use crate::{Complex64, Error, Result};

/// Tolerance on ‖(B_K^L)†(B_K^L) − I‖_max after repeated multiplication.
pub const POWER_UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ShiftMode {
    #[default]
    None,
    Top,
    Both,
}

impl FromStr for ShiftMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "top" => Ok(Self::Top),
            "both" => Ok(Self::Both),
            other => Err(Error::InvalidParameter {
                name: "shift_mode",
                reason: format!("expected one of none, top, both; got `{other}`"),
            }),
        }
    }
}

impl std::fmt::Display for ShiftMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::None => "none",
            Self::Top => "top",
            Self::Both => "both",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BakerParams {
    pub n: usize,
    pub k: usize,
    pub l: u32,
    pub m: usize,
    pub delta: f64,
    pub shift_mode: ShiftMode,
}

impl BakerParams {
    /// Collects every violated constraint.
    pub fn violations(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let Self {
            n, k, l, m, delta, ..
        } = *self;
        if n < 2 || n % 2 != 0 {
            errs.push(format!("N must be even and at least 2 (got {n})"));
        }
        if k < 2 {
            errs.push(format!("K must be at least 2 (got {k})"));
        } else if n % k != 0 {
            errs.push("K must divide N".to_string());
        }
        if l < 1 {
            errs.push("L must be at least 1".to_string());
        }
        if m < 1 {
            errs.push(format!("M must be at least 1 (got {m})"));
        } else if n % m != 0 {
            errs.push("M must divide N".to_string());
        }
        if !(0.0..=1.0).contains(&delta) {
            errs.push(format!("delta must lie in [0, 1] (got {delta})"));
        }
        match self.shift_mode {
            ShiftMode::Top if integral(n as f64 * delta / 2.0).is_none() => {
                errs.push("NΔ/2 must be integer".to_string())
            }
            ShiftMode::Both if integral(n as f64 * delta / 4.0).is_none() => {
                errs.push("NΔ/4 must be integer".to_string())
            }
            _ => {}
        }
        errs
    }

    pub fn validate(&self) -> Result<()> {
        let errs = self.violations();
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name: "baker parameters",
                reason: errs.join("; "),
            })
        }
    }
}

fn integral(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() < 1e-9).then_some(r as i64)
}

fn block_diag(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim(), b.dim());
    ComplexMatrix::from_fn(na + nb, |r, c| match (r < na, c < na) {
        (true, true) => a[(r, c)],
        (false, false) => b[(r - na, c - na)],
        _ => Complex64::new(0.0, 0.0),
    })
}

/// B_K = F_N† · diag(F_{N/K}, F_{N−N/K}).
pub fn baker_unitary(n: usize, k: usize) -> Result<ComplexMatrix> {
    if k < 2 || n == 0 || !n.is_multiple_of(k) {
        return Err(Error::InvalidParameter {
            name: "K",
            reason: format!("K must be at least 2 and divide N (N={n}, K={k})"),
        });
    }
    let top = n / k;
    let blocks = block_diag(&dft_matrix(top), &dft_matrix(n - top));
    Ok(dft_matrix(n).adjoint_mul(&blocks))
}

/// Momentum translation V^p with V = F_N†·S·F_N; negative powers wrap mod N.
pub fn momentum_shift(n: usize, power: i64) -> ComplexMatrix {
    let p = power.rem_euclid(n as i64) as u32;
    let f = dft_matrix(n);
    f.adjoint_mul(&cyclic_shift(n).pow(p)).matmul(&f)
}

/// F_N† · P · F_N with P projecting on indices `[start, start + len)`.
fn momentum_projector(n: usize, start: usize, len: usize) -> ComplexMatrix {
    let f = dft_matrix(n);
    let diag: Vec<Complex64> = (0..n)
        .map(|i| {
            if (start..start + len).contains(&i) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    f.adjoint_mul(&ComplexMatrix::diagonal(&diag)).matmul(&f)
}

/// Piecewise-linear map f_K on [0, 1].
pub fn classical_shift_map(x: f64, k: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidParameter {
            name: "K",
            reason: format!("K must be at least 2 (got {k})"),
        });
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter {
            name: "x",
            reason: format!("x must lie in [0, 1] (got {x})"),
        });
    }
    let kf = k as f64;
    Ok(if x <= (kf - 1.0) / kf {
        kf * x / (kf - 1.0)
    } else {
        kf * x - kf + 1.0
    })
}

/// Kolmogorov–Sinai entropy of f_K in nats: mean log-slope under Lebesgue measure.
pub fn classical_entropy(k: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidParameter {
            name: "K",
            reason: format!("K must be at least 2 (got {k})"),
        });
    }
    let kf = k as f64;
    // ln(K/(K−1)) = −ln(1 − 1/K), accurate for large K.
    Ok(kf.ln() / kf + (kf - 1.0) / kf * (-(-1.0 / kf).ln_1p()))
}

/// Measurement Kraus operators D_m (projectors in momentum space, optionally shifted).
pub fn measurement_kraus(
    n: usize,
    m: usize,
    delta: f64,
    shift_mode: ShiftMode,
) -> Result<KrausSet> {
    let params = BakerParams {
        n,
        k: 2,
        l: 1,
        m,
        delta,
        shift_mode,
    };
    let errs: Vec<String> = params
        .violations()
        .into_iter()
        .filter(|e| !e.starts_with("K "))
        .collect();
    if !errs.is_empty() {
        return Err(Error::InvalidParameter {
            name: "measurement parameters",
            reason: errs.join("; "),
        });
    }
    let block = n / m;
    let mut ops: Vec<ComplexMatrix> = (0..m)
        .map(|b| momentum_projector(n, b * block, block))
        .collect();
    if m == 2 {
        match shift_mode {
            ShiftMode::None => {}
            ShiftMode::Top => {
                let s = integral(n as f64 * delta / 2.0).expect("validated");
                ops[1] = momentum_shift(n, -s).matmul(&ops[1]);
            }
            ShiftMode::Both => {
                let s = integral(n as f64 * delta / 4.0).expect("validated");
                ops[0] = momentum_shift(n, s).matmul(&ops[0]);
                ops[1] = momentum_shift(n, -s).matmul(&ops[1]);
            }
        }
    } else if shift_mode != ShiftMode::None && delta != 0.0 {
        log::warn!("shift_mode={shift_mode} ignored for M={m}: shifts are defined for M=2 only");
    }
    KrausSet::new(ops)
}

/// Kraus operators {D_m · B_K^L} of the generalized sloppy baker channel.
pub fn sloppy_baker_channel(p: &BakerParams) -> Result<KrausSet> {
    p.validate()?;
    let step = baker_unitary(p.n, p.k)?;
    let evolution = step.pow(p.l);
    let drift = evolution.unitarity_residual();
    if drift >= POWER_UNITARITY_TOL {
        return Err(Error::InvalidParameter {
            name: "L",
            reason: format!("B_K^L lost unitarity (residual {drift:.3e})"),
        });
    }
    let measurement = measurement_kraus(p.n, p.m, p.delta, p.shift_mode)?;
    KrausSet::new(
        measurement
            .operators()
            .iter()
            .map(|d| d.matmul(&evolution))
            .collect(),
    )
}
