//! Dense square matrices and the linear-algebra primitives built on them.
//!
//! Storage is column-major so buffers can be handed to BLAS/LAPACK without
//! copies. Indexing is always `(row, col)`.

mod dense;
mod density;
mod linalg;
mod random;
mod structured;

pub use dense::{ComplexMatrix, RealMatrix};
pub use density::{DensityMatrix, StateDefects, STATE_TOL};
pub use linalg::{
    eig_general, eig_general_with_vectors, eig_real_schur, eigvalsh, min_singular_value,
    set_blas_threads, trace_norm, EigenKind, SchurEigenvalue,
};
pub use random::{complex_ginibre, haar_isometry, haar_unitary, random_pure_state};
pub use structured::{cyclic_shift, dft_matrix};
