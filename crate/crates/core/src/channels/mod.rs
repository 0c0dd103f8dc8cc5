//! Completely positive trace-preserving maps in Kraus form and their
//! superoperator, Choi and real Bloch representations.
//!
//! Vectorization convention: row-major, `vec(ρ)[i·N + j] = ρ_ij`. With this
//! ordering the superoperator is exactly `Σ_m A_m ⊗ conj(A_m)` and its entries
//! read `Φ_{ij,kl} = Σ_m A_m[i,k]·conj(A_m[j,l])`, so `Φ(ρ)_ij = Σ_kl Φ_{ij,kl} ρ_kl`.

mod bloch;

pub use bloch::{bloch_form, gell_mann_basis, BlochForm, GellMannBasis, Generator};

use crate::matrix::{eig_general_with_vectors, eigvalsh, ComplexMatrix, DensityMatrix};
use crate::{Complex64, Error, Result};

/// Residual bound for trace preservation, ‖Σ A†A − I‖_max.
pub const TP_TOL: f64 = 1e-10;
/// Lower bound on the Choi spectrum accepted as completely positive.
pub const CP_TOL: f64 = 1e-10;
/// |z₂| above `1 − DEGENERACY_TOL` counts as a degenerate leading eigenvalue.
pub const DEGENERACY_TOL: f64 = 1e-6;

/// Ordered Kraus operators {A_m} of a common dimension N.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    dim: usize,
    operators: Vec<ComplexMatrix>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceCheck {
    pub trace_preserving: bool,
    pub residual: f64,
}

impl KrausSet {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or(Error::EmptyInput("Kraus operator list"))?;
        let dim = first.dim();
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "N",
                reason: "Kraus operators must be at least 1x1".into(),
            });
        }
        for op in &operators {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: op.dim(),
                });
            }
            if !op.is_finite() {
                return Err(Error::NonFinite("Kraus operator"));
            }
        }
        Ok(Self { dim, operators })
    }

    /// Like [`KrausSet::new`] but also enforces Σ A†A = I within [`TP_TOL`].
    pub fn new_trace_preserving(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let set = Self::new(operators)?;
        let check = set.trace_check();
        if !check.trace_preserving {
            return Err(Error::InvalidParameter {
                name: "Kraus operators",
                reason: format!("not trace preserving (residual {:.3e})", check.residual),
            });
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// Σ A_m† A_m compared against the identity.
    pub fn trace_check(&self) -> TraceCheck {
        let mut sum = ComplexMatrix::zeros(self.dim);
        for a in &self.operators {
            sum = &sum + &a.adjoint_mul(a);
        }
        let residual = (&sum - &ComplexMatrix::identity(self.dim)).max_abs();
        TraceCheck {
            trace_preserving: residual < TP_TOL,
            residual,
        }
    }

    /// Φ(X) = Σ A X A† for an arbitrary square X.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.dim(),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim);
        for a in &self.operators {
            out = &out + &a.matmul(x).mul_adjoint(a);
        }
        Ok(out)
    }
}

pub fn is_trace_preserving(k: &KrausSet) -> TraceCheck {
    k.trace_check()
}

/// ρ ↦ Σ A ρ A†. The output is a valid state whenever the Kraus set is CPTP.
pub fn apply_channel(k: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    k.apply(rho.matrix()).map(DensityMatrix::from_trusted)
}

/// Row-major vectorization.
pub fn vectorize(x: &ComplexMatrix) -> Vec<Complex64> {
    let n = x.dim();
    let mut v = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            v.push(x[(i, j)]);
        }
    }
    v
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &[Complex64]) -> Result<ComplexMatrix> {
    let n = (v.len() as f64).sqrt().round() as usize;
    if n * n != v.len() {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: v.len(),
        });
    }
    Ok(ComplexMatrix::from_fn(n, |i, j| v[i * n + j]))
}

/// N²×N² matrix of a linear map on N×N matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    n: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let big = matrix.dim();
        let n = (big as f64).sqrt().round() as usize;
        if n * n != big || n == 0 {
            return Err(Error::InvalidParameter {
                name: "superoperator",
                reason: format!("size {big} is not a positive perfect square"),
            });
        }
        Ok(Self { n, matrix })
    }

    pub fn from_kraus(k: &KrausSet) -> Self {
        superoperator_from_kraus(k)
    }

    /// Hilbert-space dimension N.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Φ_{ij,kl}.
    pub fn element(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.matrix[(i * self.n + j, k * self.n + l)]
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.dim(),
            });
        }
        unvectorize(&self.matrix.mul_vec(&vectorize(x)))
    }
}

/// Φ = Σ_m A_m ⊗ conj(A_m).
pub fn superoperator_from_kraus(k: &KrausSet) -> Superoperator {
    let n = k.dim();
    let big = n * n;
    let mut out = ComplexMatrix::zeros(big);
    let data = out.as_mut_slice();
    for a in k.operators() {
        // (A ⊗ Ā)[(i,j),(k,l)] = A[i,k]·conj(A[j,l]); column (k,l) is contiguous.
        for kk in 0..n {
            for l in 0..n {
                let col = kk * n + l;
                let dst = &mut data[col * big..(col + 1) * big];
                for i in 0..n {
                    let aik = a[(i, kk)];
                    for (j, &ajl) in a.column(l).iter().enumerate() {
                        dst[i * n + j] += aik * ajl.conj();
                    }
                }
            }
        }
    }
    Superoperator { n, matrix: out }
}

/// Unit-trace Choi matrix D = (1/N) Σ_ij Φ(|i⟩⟨j|) ⊗ |i⟩⟨j|.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    n: usize,
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Undoes the reshuffle, recovering the superoperator.
    pub fn to_superoperator(&self) -> Superoperator {
        let n = self.n;
        let scale = Complex64::new(n as f64, 0.0);
        let matrix = ComplexMatrix::from_fn(n * n, |row, col| {
            let (a, b) = (row / n, row % n);
            let (i, j) = (col / n, col % n);
            self.matrix[(a * n + i, b * n + j)] * scale
        });
        Superoperator { n, matrix }
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigvalsh(&self.matrix.hermitian_part())
    }
}

/// D[(a,i),(b,j)] = Φ_{ab,ij} / N.
pub fn choi_matrix(s: &Superoperator) -> ChoiMatrix {
    let n = s.n();
    let inv = Complex64::new(1.0 / n as f64, 0.0);
    let matrix = ComplexMatrix::from_fn(n * n, |row, col| {
        let (a, i) = (row / n, row % n);
        let (b, j) = (col / n, col % n);
        s.matrix()[(a * n + b, i * n + j)] * inv
    });
    ChoiMatrix { n, matrix }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityCheck {
    pub completely_positive: bool,
    pub min_eigenvalue: f64,
}

pub fn is_completely_positive(s: &Superoperator) -> Result<PositivityCheck> {
    let min_eigenvalue = choi_matrix(s)
        .eigenvalues()?
        .first()
        .copied()
        .unwrap_or(0.0);
    Ok(PositivityCheck {
        completely_positive: min_eigenvalue >= -CP_TOL,
        min_eigenvalue,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantState {
    pub state: DensityMatrix,
    /// ‖Φ(ω) − ω‖_max.
    pub residual: f64,
    /// |z₂| of the superoperator.
    pub subleading_modulus: f64,
}

/// Fixed point ω = Φ(ω) from the eigenvector of the eigenvalue nearest 1.
pub fn invariant_state(s: &Superoperator) -> Result<InvariantState> {
    let (values, vectors) = eig_general_with_vectors(s.matrix())?;
    let one = Complex64::new(1.0, 0.0);
    let lead = values
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - one).norm().total_cmp(&(b.1 - one).norm()))
        .map(|(k, _)| k)
        .ok_or(Error::EmptyInput("superoperator spectrum"))?;
    let subleading_modulus = values
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != lead)
        .map(|(_, z)| z.norm())
        .fold(0.0, f64::max);
    if subleading_modulus > 1.0 - DEGENERACY_TOL {
        return Err(Error::DegenerateLeadingEigenvalue {
            subleading: subleading_modulus,
        });
    }
    let omega = unvectorize(vectors.column(lead))?.hermitian_part();
    let trace = omega.trace();
    if trace.norm() == 0.0 {
        return Err(Error::InvalidParameter {
            name: "invariant state",
            reason: "leading eigenvector is traceless".into(),
        });
    }
    let omega = omega.scale(trace.inv());
    let residual = (&s.apply(&omega)? - &omega).max_abs();
    Ok(InvariantState {
        state: DensityMatrix::from_trusted(omega),
        residual,
        subleading_modulus,
    })
}
