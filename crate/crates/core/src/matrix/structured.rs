use std::f64::consts::PI;

use super::ComplexMatrix;
use crate::Complex64;

/// Unitary discrete Fourier matrix, entry (j, k) = exp(−2πi·jk/N)/√N.
pub fn dft_matrix(n: usize) -> ComplexMatrix {
    let norm = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, |j, k| {
        // Reduce jk mod N first so large products keep full phase precision.
        let phase = -2.0 * PI * ((j * k) % n) as f64 / n as f64;
        Complex64::from_polar(norm, phase)
    })
}

/// Cyclic shift S with S·e_k = e_{(k+1) mod N}.
pub fn cyclic_shift(n: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(n);
    for k in 0..n {
        s[((k + 1) % n, k)] = Complex64::new(1.0, 0.0);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn dft_small_cases() {
        assert_eq!(dft_matrix(1), ComplexMatrix::identity(1));
        let f2 = dft_matrix(2);
        let expect = ComplexMatrix::from_real_rows(2, &[1.0, 1.0, 1.0, -1.0])
            .unwrap()
            .scale(Complex64::new(FRAC_1_SQRT_2, 0.0));
        assert!((&f2 - &expect).max_abs() < 1e-15);
    }

    #[test]
    fn dft_and_shift_unitary_up_to_256() {
        for n in (1..=256).step_by(17).chain([16, 64, 256]) {
            assert!(dft_matrix(n).unitarity_residual() < 1e-12, "N={n}");
            assert!(cyclic_shift(n).unitarity_residual() < 1e-12, "N={n}");
        }
    }

    #[test]
    fn shift_examples() {
        let s2 = cyclic_shift(2);
        assert_eq!(
            s2,
            ComplexMatrix::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
        );
        let s4 = cyclic_shift(4);
        let mut e3 = vec![Complex64::new(0.0, 0.0); 4];
        e3[3] = Complex64::new(1.0, 0.0);
        let out = s4.mul_vec(&e3);
        assert_eq!(out[0], Complex64::new(1.0, 0.0));
        for n in 1..=12 {
            // Exact: entries stay in {0, 1}.
            assert_eq!(cyclic_shift(n).pow(n as u32), ComplexMatrix::identity(n));
        }
    }
}
