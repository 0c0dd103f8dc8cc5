//! Relaxation of random pure states towards the invariant state under repeated
//! application of a channel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{invariant_state, superoperator_from_kraus, KrausSet};
use crate::matrix::{random_pure_state, trace_norm, ComplexMatrix, DensityMatrix};
use crate::rng::RngState;
use crate::stats::linear_fit;
use crate::{Error, Result};

/// Default number of random initial states.
pub const DEFAULT_STATES: usize = 16;

/// Distances at or below this are dominated by round-off and excluded from fits.
pub const DISTANCE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayTrajectory {
    /// Mean distance d(t) for t = 0..=T.
    pub mean_distance: Vec<f64>,
    /// `per_state[s][t]` = Tr|Φᵗ(ρ_s) − ω|.
    pub per_state: Vec<Vec<f64>>,
    /// ‖Φ(ω) − ω‖_max of the invariant state used.
    pub invariant_residual: f64,
    pub seed: u64,
}

impl DecayTrajectory {
    pub fn steps(&self) -> usize {
        self.mean_distance.len() - 1
    }

    pub fn states(&self) -> usize {
        self.per_state.len()
    }
}

/// Iterates `steps` applications of the channel on `states` random pure states
/// and records the trace distance Tr|ρ_t − ω| (no factor ½).
pub fn distance_trajectory(
    k: &KrausSet,
    steps: usize,
    states: usize,
    rng: &mut RngState,
) -> Result<DecayTrajectory> {
    if steps == 0 || states == 0 {
        return Err(Error::InvalidParameter {
            name: "trajectory",
            reason: format!(
                "need at least one step and one state (steps={steps}, states={states})"
            ),
        });
    }
    let omega = invariant_state(&superoperator_from_kraus(k))?;
    let target = omega.state.matrix();
    let n = k.dim();
    let initial: Vec<ComplexMatrix> = (0..states)
        .map(|_| DensityMatrix::pure(&random_pure_state(n, rng)).into_matrix())
        .collect();
    let per_state = initial
        .into_par_iter()
        .map(|mut rho| {
            let mut d = Vec::with_capacity(steps + 1);
            d.push(trace_norm(&(&rho - target))?);
            for _ in 0..steps {
                rho = k.apply(&rho)?;
                d.push(trace_norm(&(&rho - target))?);
            }
            Ok(d)
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let mean_distance = (0..=steps)
        .map(|t| per_state.iter().map(|d| d[t]).sum::<f64>() / states as f64)
        .collect();
    Ok(DecayTrajectory {
        mean_distance,
        per_state,
        invariant_residual: omega.residual,
        seed: rng.seed(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitWindow {
    /// First step included.
    pub start: usize,
    /// Last step included; the fit also stops before the first point at or below `floor`.
    pub end: Option<usize>,
    pub floor: f64,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self {
            start: 1,
            end: None,
            floor: DISTANCE_FLOOR,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub alpha: f64,
    /// ln d at t = 0 on the fitted line.
    pub intercept: f64,
    pub r_squared: f64,
    /// Steps actually used, inclusive.
    pub first_step: usize,
    pub last_step: usize,
}

/// Least-squares fit of ln d(t) = c − αt over the window.
pub fn fit_decay_rate(traj: &DecayTrajectory, window: &FitWindow) -> Result<DecayFit> {
    let d = &traj.mean_distance;
    let last = window.end.unwrap_or(usize::MAX).min(d.len() - 1);
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for (t, &v) in d.iter().enumerate().take(last + 1).skip(window.start) {
        if v <= window.floor {
            break;
        }
        ts.push(t as f64);
        ys.push(v.ln());
    }
    if ts.len() < 3 {
        return Err(Error::TooFewPoints {
            usable: ts.len(),
            required: 3,
        });
    }
    let fit = linear_fit(&ts, &ys).ok_or(Error::TooFewPoints {
        usable: ts.len(),
        required: 3,
    })?;
    Ok(DecayFit {
        alpha: -fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        first_step: window.start,
        last_step: window.start + ts.len() - 1,
    })
}
