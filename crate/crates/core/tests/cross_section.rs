//! Near-axis depletion of Φ_E spectra in the real Ginibre coordinate
//! y' = √((N²−1)M)·Im z, where the N²−1 non-leading eigenvalues fill a disk of
//! radius √(N²−1) and the profile should match the unit-variance Ginibre one.

use speclab::channels::superoperator_from_kraus;
use speclab::ensembles::environmental_channel;
use speclab::rng::RngState;
use speclab::spectral::{
    axis_density_scaled, ginibre_axis_density, spectrum_report, SpectrumReport,
};

#[test]
fn environmental_cross_section_follows_ginibre_profile() {
    let (n, m) = (8usize, 64usize);
    let dim = (n * n - 1) as f64;
    let mut rng = RngState::new(2024);
    let reports: Vec<SpectrumReport> = (0..1000)
        .map(|_| {
            spectrum_report(
                &superoperator_from_kraus(&environmental_channel(n, m, &mut rng).unwrap()),
                true,
            )
            .unwrap()
        })
        .collect();
    // Band of 0.1 disk radii either side of the imaginary axis.
    let band = 0.1 * dim.sqrt();
    let hist = axis_density_scaled(&reports, (dim * m as f64).sqrt(), band, 10, 3.0).unwrap();
    for (c, &d) in hist.centers().iter().zip(&hist.density) {
        let scaled = d * dim;
        let expected = ginibre_axis_density(c.abs());
        assert!(
            (scaled - expected).abs() < 0.2 * expected,
            "y'={c}: {scaled} vs Ginibre {expected}"
        );
    }
}
