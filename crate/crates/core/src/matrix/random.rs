use super::linalg::{qr_with_r_diagonal, thin_qr};
use super::ComplexMatrix;
use crate::rng::RngState;
use crate::Complex64;

/// N×N matrix of iid complex Gaussians with E|z|² = 1, filled column by column.
pub fn complex_ginibre(n: usize, rng: &mut RngState) -> ComplexMatrix {
    let data: Vec<Complex64> = (0..n * n).map(|_| rng.complex_normal()).collect();
    ComplexMatrix::from_col_major(n, data).expect("n*n entries")
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases of
/// R's diagonal moved into Q, which makes the factorization unique.
pub fn haar_unitary(n: usize, rng: &mut RngState) -> ComplexMatrix {
    let z = complex_ginibre(n, rng);
    let (mut q, r_diag) = qr_with_r_diagonal(&z).expect("QR of a finite square matrix");
    for (col, r) in r_diag.iter().enumerate() {
        let norm = r.norm();
        // Zero diagonal has probability zero; keep the column unchanged if it happens.
        let phase = if norm > 0.0 {
            r / norm
        } else {
            Complex64::new(1.0, 0.0)
        };
        for row in 0..n {
            q[(row, col)] *= phase;
        }
    }
    q
}

/// First `cols` columns of a Haar unitary on `rows` dimensions, column-major.
/// Any fixed set of columns of a Haar unitary has this law, so channels that
/// only read a few columns avoid the full O(rows³) factorization.
pub fn haar_isometry(rows: usize, cols: usize, rng: &mut RngState) -> Vec<Complex64> {
    let z: Vec<Complex64> = (0..rows * cols).map(|_| rng.complex_normal()).collect();
    let (mut q, r_diag) = thin_qr(rows, cols, z).expect("QR of a finite tall matrix");
    for (col, r) in r_diag.iter().enumerate() {
        let norm = r.norm();
        let phase = if norm > 0.0 {
            r / norm
        } else {
            Complex64::new(1.0, 0.0)
        };
        for z in &mut q[col * rows..(col + 1) * rows] {
            *z *= phase;
        }
    }
    q
}

/// Unitarily invariant random unit vector (normalized complex Gaussian).
pub fn random_pure_state(n: usize, rng: &mut RngState) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n).map(|_| rng.complex_normal()).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}
