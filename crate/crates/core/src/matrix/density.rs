use super::{eigvalsh, ComplexMatrix};
use crate::{Complex64, Error, Result};

/// Tolerance for Hermiticity, unit trace and positivity of a state.
pub const STATE_TOL: f64 = 1e-10;

/// Density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDefects {
    pub hermiticity: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl StateDefects {
    pub fn within(&self, tol: f64) -> bool {
        self.hermiticity <= tol && self.trace_error <= tol && self.min_eigenvalue >= -tol
    }
}

impl DensityMatrix {
    /// Validates the state invariants at [`STATE_TOL`].
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let defects = defects(&m)?;
        if defects.hermiticity > STATE_TOL {
            return Err(Error::NotHermitian {
                residual: defects.hermiticity,
            });
        }
        if defects.trace_error > STATE_TOL || defects.min_eigenvalue < -STATE_TOL {
            return Err(Error::InvalidParameter {
                name: "density matrix",
                reason: format!(
                    "trace error {:.3e}, min eigenvalue {:.3e}",
                    defects.trace_error, defects.min_eigenvalue
                ),
            });
        }
        Ok(Self(m))
    }

    /// Wraps a matrix produced by a trusted construction (e.g. a CPTP map
    /// applied to a state) without re-diagonalizing it.
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn pure(psi: &[Complex64]) -> Self {
        Self(ComplexMatrix::outer(psi, psi).expect("same vector"))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self(ComplexMatrix::identity(n).scale(Complex64::new(1.0 / n as f64, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn defects(&self) -> Result<StateDefects> {
        defects(&self.0)
    }
}

fn defects(m: &ComplexMatrix) -> Result<StateDefects> {
    if !m.is_finite() {
        return Err(Error::NonFinite("density matrix"));
    }
    let hermiticity = m.hermiticity_residual();
    let trace_error = (m.trace() - Complex64::new(1.0, 0.0)).norm();
    let min_eigenvalue = eigvalsh(&m.hermitian_part())?
        .first()
        .copied()
        .unwrap_or(0.0);
    Ok(StateDefects {
        hermiticity,
        trace_error,
        min_eigenvalue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_valid_states() {
        assert!(DensityMatrix::new(DensityMatrix::maximally_mixed(3).into_matrix()).is_ok());
        let psi = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let rho = DensityMatrix::pure(&psi);
        assert!(rho.defects().unwrap().within(1e-12));
    }

    #[test]
    fn rejects_bad_trace_and_negativity() {
        let m = ComplexMatrix::identity(2);
        assert!(DensityMatrix::new(m).is_err());
        let m = ComplexMatrix::from_real_rows(2, &[1.5, 0.0, 0.0, -0.5]).unwrap();
        assert!(DensityMatrix::new(m).is_err());
        let m = ComplexMatrix::from_real_rows(2, &[0.5, 0.1, 0.0, 0.5]).unwrap();
        assert!(matches!(
            DensityMatrix::new(m),
            Err(Error::NotHermitian { .. })
        ));
    }
}
