//! Spectra of superoperators and real matrices, and statistics pooled over them.

use std::f64::consts::{FRAC_1_PI, PI, SQRT_2};

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::channels::{bloch_form, Superoperator, DEGENERACY_TOL};
use crate::matrix::{eig_general, eig_real_schur, RealMatrix};
use crate::{Complex64, Error, Result};

/// Relative threshold |Im z| < tol·‖S‖_F for calling an eigenvalue real on the
/// complex-solver route.
pub const COMPLEX_ROUTE_REAL_TOL: f64 = 1e-10;

/// Absolute error target for [`edelman_expected_real`].
pub const EDELMAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub n: usize,
    /// Sorted by descending modulus; `eigenvalues[0]` is z₁.
    pub eigenvalues: Vec<Complex64>,
    /// Real flag per eigenvalue, aligned with `eigenvalues`.
    pub real_flags: Vec<bool>,
    pub gap: f64,
    pub subleading_radius: f64,
    /// Real eigenvalues excluding z₁.
    pub real_count: usize,
    /// Complex eigenvalues excluding z₁.
    pub complex_count: usize,
    pub degenerate: bool,
    pub via_bloch: bool,
}

impl SpectrumReport {
    fn from_unsorted(n: usize, mut pairs: Vec<(Complex64, bool)>, via_bloch: bool) -> Self {
        pairs.sort_by(|a, b| b.0.norm().total_cmp(&a.0.norm()));
        // Among eigenvalues tied with the largest modulus (unitary channels), z₁ is the one nearest 1.
        if let Some(top) = pairs.first().map(|p| p.0.norm()) {
            let lead = pairs
                .iter()
                .enumerate()
                .take_while(|(_, p)| p.0.norm() > top - DEGENERACY_TOL)
                .min_by(|a, b| (a.1 .0 - 1.0).norm().total_cmp(&(b.1 .0 - 1.0).norm()))
                .map_or(0, |(i, _)| i);
            pairs[..=lead].rotate_right(1);
        }
        let (eigenvalues, real_flags): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let subleading_radius = eigenvalues.get(1).map_or(0.0, |z| z.norm());
        let real_count = real_flags.iter().skip(1).filter(|&&r| r).count();
        let complex_count = eigenvalues.len().saturating_sub(1) - real_count;
        Self {
            n,
            gap: (1.0 - subleading_radius).clamp(0.0, 1.0),
            subleading_radius,
            real_count,
            complex_count,
            degenerate: subleading_radius > 1.0 - DEGENERACY_TOL,
            eigenvalues,
            real_flags,
            via_bloch,
        }
    }

    /// Eigenvalues other than z₁.
    pub fn non_leading(&self) -> &[Complex64] {
        self.eigenvalues.get(1..).unwrap_or(&[])
    }

    /// α = −ln(1 − γ) = −ln R.
    pub fn predicted_rate(&self) -> f64 {
        -self.subleading_radius.ln()
    }
}

/// Spectrum of a channel. With `via_bloch` the spectrum is {1} ∪ spec(C) from
/// the real Schur form, and real eigenvalues are identified structurally.
pub fn spectrum_report(s: &Superoperator, via_bloch: bool) -> Result<SpectrumReport> {
    let n = s.n();
    let pairs = if via_bloch {
        let b = bloch_form(s)?;
        let mut pairs = vec![(Complex64::new(1.0, 0.0), true)];
        if n > 1 {
            pairs.extend(
                eig_real_schur(&b.contraction)?
                    .into_iter()
                    .map(|e| (e.value, e.is_real())),
            );
        }
        pairs
    } else {
        let tol = COMPLEX_ROUTE_REAL_TOL * s.matrix().frobenius_norm();
        eig_general(s.matrix())?
            .into_iter()
            .map(|z| (z, z.im.abs() < tol))
            .collect()
    };
    Ok(SpectrumReport::from_unsorted(n, pairs, via_bloch))
}

/// Eigenvalues of a real matrix with structural real flags.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSpectrum {
    pub eigenvalues: Vec<Complex64>,
    pub real_flags: Vec<bool>,
    pub real_count: usize,
}

pub fn real_spectrum(a: &RealMatrix) -> Result<RealSpectrum> {
    let eig = eig_real_schur(a)?;
    let real_flags: Vec<bool> = eig.iter().map(|e| e.is_real()).collect();
    Ok(RealSpectrum {
        real_count: real_flags.iter().filter(|&&r| r).count(),
        eigenvalues: eig.into_iter().map(|e| e.value).collect(),
        real_flags,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityHistogram {
    /// `bins + 1` edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
    /// Number of spectra pooled.
    pub sample_count: usize,
    /// Points that entered the selection but fell outside the binned range.
    pub outside: u64,
}

impl DensityHistogram {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    /// Σ density·width.
    pub fn integral(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.bin_width()
    }
}

/// Default radial histogram: 50 bins on [0, 1.25].
pub const RADIAL_BINS: usize = 50;
pub const RADIAL_MAX: f64 = 1.25;

/// Tolerance, in units of the bin width, for points sitting on an edge due to
/// round-off; they go to the upper bin.
const EDGE_SLACK: f64 = 1e-9;

fn bin_values(
    values: impl Iterator<Item = f64>,
    lo: f64,
    hi: f64,
    bins: usize,
) -> (Vec<f64>, Vec<u64>, u64) {
    let width = (hi - lo) / bins as f64;
    let edges = (0..=bins).map(|b| lo + b as f64 * width).collect();
    let mut counts = vec![0u64; bins];
    let mut outside = 0;
    for v in values {
        let pos = ((v - lo) / width + EDGE_SLACK).floor();
        if pos >= 0.0 && pos < bins as f64 {
            counts[pos as usize] += 1;
        } else {
            outside += 1;
        }
    }
    (edges, counts, outside)
}

fn check_bins(bins: usize, lo: f64, hi: f64) -> Result<()> {
    if bins == 0 || !(hi > lo) {
        return Err(Error::InvalidParameter {
            name: "bins",
            reason: format!(
                "need at least one bin on a nonempty range (bins={bins}, [{lo}, {hi}])"
            ),
        });
    }
    Ok(())
}

/// r_M = |z|·√M for every non-leading eigenvalue, pooled in input order.
pub fn rescaled_radii(spectra: &[SpectrumReport], m: usize) -> Vec<f64> {
    let s = (m as f64).sqrt();
    spectra
        .iter()
        .flat_map(|r| r.non_leading().iter().map(move |z| z.norm() * s))
        .collect()
}

/// Histogram of r_M on [0, r_max) normalized to unit integral over the binned range.
pub fn radial_density(
    spectra: &[SpectrumReport],
    m: usize,
    bins: usize,
    r_max: f64,
) -> Result<DensityHistogram> {
    if spectra.is_empty() {
        return Err(Error::EmptyInput("radial_density spectra"));
    }
    check_bins(bins, 0.0, r_max)?;
    let (edges, counts, outside) =
        bin_values(rescaled_radii(spectra, m).into_iter(), 0.0, r_max, bins);
    let inside: u64 = counts.iter().sum();
    if inside == 0 {
        return Err(Error::EmptyInput("radial_density binned range"));
    }
    let width = r_max / bins as f64;
    let density = counts
        .iter()
        .map(|&c| c as f64 / (inside as f64 * width))
        .collect();
    Ok(DensityHistogram {
        edges,
        counts,
        density,
        sample_count: spectra.len(),
        outside,
    })
}

/// η = ⟨N^R⟩ / √(N² − 1).
pub fn eta_ratio(reports: &[SpectrumReport]) -> Result<f64> {
    let first = reports
        .first()
        .ok_or(Error::EmptyInput("eta_ratio reports"))?;
    if let Some(other) = reports.iter().find(|r| r.n != first.n) {
        return Err(Error::MixedDimensions {
            first: first.n,
            other: other.n,
        });
    }
    if first.n < 2 {
        return Err(Error::InvalidParameter {
            name: "N",
            reason: "η needs N ≥ 2".to_string(),
        });
    }
    let mean = reports.iter().map(|r| r.real_count as f64).sum::<f64>() / reports.len() as f64;
    Ok(mean / ((first.n * first.n - 1) as f64).sqrt())
}

/// Expected number of real eigenvalues of an n×n real Ginibre matrix:
/// E_n = 1 + (√2/π) ∫₀¹ t^{1/2}(1 − t^{n−1}) / ((1 − t)^{3/2}(1 + t)) dt.
pub fn edelman_expected_real(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "n must be at least 1".to_string(),
        });
    }
    let power = (n - 1) as f64;
    // t = 1 − u² removes the (1 − t)^{-3/2} endpoint singularity.
    let integrand = |u: f64| {
        let u2 = u * u;
        let t = 1.0 - u2;
        let one_minus_tp = -(power * (-u2).ln_1p()).exp_m1();
        2.0 * t.sqrt() * one_minus_tp / (u2 * (1.0 + t))
    };
    let out = quadrature::double_exponential::integrate(integrand, 0.0, 1.0, EDELMAN_TOL);
    if !out.integral.is_finite() || out.error_estimate > 1e-8 {
        return Err(Error::Quadrature {
            error_estimate: out.error_estimate,
        });
    }
    Ok(1.0 + SQRT_2 / PI * out.integral)
}

/// Cross-section through the spectra along the imaginary axis: density of
/// y_M = √M·Im z among complex non-leading eigenvalues with
/// |√M·Re z| < `band_halfwidth`, on `bins` bins over [−y_max, y_max). Real
/// eigenvalues form a separate singular component on the axis and are skipped.
///
/// Normalized per unit y_M, per unit band width and per pooled non-leading
/// eigenvalue, so a uniform disk of radius 1/√M gives 1/π.
pub fn imaginary_axis_density(
    spectra: &[SpectrumReport],
    m: usize,
    band_halfwidth: f64,
    bins: usize,
    y_max: f64,
) -> Result<DensityHistogram> {
    axis_density_scaled(spectra, (m as f64).sqrt(), band_halfwidth, bins, y_max)
}

/// [`imaginary_axis_density`] with an arbitrary coordinate scale in place of √M.
pub fn axis_density_scaled(
    spectra: &[SpectrumReport],
    scale: f64,
    band_halfwidth: f64,
    bins: usize,
    y_max: f64,
) -> Result<DensityHistogram> {
    if spectra.is_empty() {
        return Err(Error::EmptyInput("imaginary_axis_density spectra"));
    }
    check_bins(bins, -y_max, y_max)?;
    if !(band_halfwidth > 0.0) {
        return Err(Error::InvalidParameter {
            name: "band_halfwidth",
            reason: format!("must be positive (got {band_halfwidth})"),
        });
    }
    let total: usize = spectra.iter().map(|r| r.non_leading().len()).sum();
    let selected = spectra
        .iter()
        .flat_map(|r| r.non_leading().iter().zip(&r.real_flags[1..]))
        .filter(|&(z, &real)| !real && (z.re * scale).abs() < band_halfwidth)
        .map(|(z, _)| z)
        .map(|z| z.im * scale);
    let (edges, counts, outside) = bin_values(selected, -y_max, y_max, bins);
    if counts.iter().sum::<u64>() + outside == 0 {
        return Err(Error::EmptyInput("imaginary_axis_density band"));
    }
    let width = 2.0 * y_max / bins as f64;
    let norm = total as f64 * width * 2.0 * band_halfwidth;
    let density = counts.iter().map(|&c| c as f64 / norm).collect();
    Ok(DensityHistogram {
        edges,
        counts,
        density,
        sample_count: spectra.len(),
        outside,
    })
}

/// Lower and upper bounds on the rescaled near-axis density at y:
/// (1/π)·2/(1 + √(1 + c/(M y²))) with c = 1 and c = 2/π respectively.
///
/// Cross-section tables pass the bin centre in y_M = √M·Im z, so the
/// depletion width in Im z is 1/M. For M = N² this matches the real Ginibre
/// width 1/√(M(N²−1)) of the N²−1 non-leading eigenvalues.
pub fn erfc_bounds(y: f64, m: f64) -> (f64, f64) {
    if y == 0.0 {
        return (0.0, 0.0);
    }
    let my2 = m * y * y;
    let bound = |c: f64| FRAC_1_PI * 2.0 / (1.0 + (1.0 + c / my2).sqrt());
    (bound(1.0), bound(2.0 / PI))
}

/// Bulk limit of the real Ginibre complex-eigenvalue density at distance y from
/// the real axis (unit-variance entries, unit bulk density 1/π):
/// (1/π)·√(2π)·|y|·e^{2y²}·erfc(√2|y|).
pub fn ginibre_axis_density(y: f64) -> f64 {
    let y = y.abs();
    if y == 0.0 {
        return 0.0;
    }
    let x = SQRT_2 * y;
    if x > 10.0 {
        // x√π·e^{x²}erfc(x) = 1 − 1/(2x²) + 3/(4x⁴) − 15/(8x⁶) + O(x⁻⁸).
        let w = 1.0 / (x * x);
        return FRAC_1_PI * (1.0 - w * (0.5 - w * (0.75 - w * 1.875)));
    }
    FRAC_1_PI * (2.0 * PI).sqrt() * y * (x * x).exp() * erfc(x)
}
