//! LAPACK-backed factorizations.
//!
//! All routines copy their input; callers keep ownership of immutable
//! matrices. Workspace sizes come from the standard `lwork = -1` query.

use std::os::raw::{c_char, c_int};

use lapack_sys::{dgees_, zgeev_, zgeqrf_, zgesvd_, zheev_, zungqr_};

use super::{ComplexMatrix, RealMatrix};
use crate::{Complex64, Error, Result};

extern "C" {
    fn openblas_set_num_threads(num_threads: c_int);
}

/// Pins the BLAS backend's internal thread count. The experiment runner sets
/// this to 1 so results do not depend on BLAS-level parallel reductions.
pub fn set_blas_threads(threads: usize) {
    // SAFETY: plain setter in libopenblas.
    unsafe { openblas_set_num_threads(threads.max(1) as c_int) }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn job(c: u8) -> *const c_char {
    match c {
        b'N' => c"N".as_ptr(),
        b'V' => c"V".as_ptr(),
        b'U' => c"U".as_ptr(),
        _ => unreachable!(),
    }
}

fn check_info(routine: &'static str, info: c_int, dim: usize, fingerprint: u64) -> Result<()> {
    match info {
        0 => Ok(()),
        i if i < 0 => Err(Error::LapackArgument { routine, arg: -i }),
        i => Err(Error::NoConvergence {
            routine,
            info: i,
            dim,
            fingerprint,
        }),
    }
}

fn workspace_len(query: Complex64) -> usize {
    (query.re as usize).max(1)
}

/// How an eigenvalue appeared in the real Schur form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EigenKind {
    /// 1×1 diagonal block: the eigenvalue is exactly real.
    Real,
    /// Member of a 2×2 block: one of a complex-conjugate pair.
    ConjugatePair,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchurEigenvalue {
    pub value: Complex64,
    pub kind: EigenKind,
}

impl SchurEigenvalue {
    pub fn is_real(&self) -> bool {
        self.kind == EigenKind::Real
    }
}

/// Eigenvalues of a general complex matrix (complex QR algorithm).
pub fn eig_general(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    zgeev(a, false).map(|(w, _)| w)
}

/// Eigenvalues together with right eigenvectors (columns of the returned matrix,
/// each normalized to unit Euclidean norm).
pub fn eig_general_with_vectors(a: &ComplexMatrix) -> Result<(Vec<Complex64>, ComplexMatrix)> {
    zgeev(a, true).map(|(w, v)| (w, v.expect("vectors requested")))
}

fn zgeev(a: &ComplexMatrix, vectors: bool) -> Result<(Vec<Complex64>, Option<ComplexMatrix>)> {
    if !a.is_finite() {
        return Err(Error::NonFinite("eigensolver input"));
    }
    let n = a.dim();
    if n == 0 {
        return Ok((Vec::new(), vectors.then(|| ComplexMatrix::zeros(0))));
    }
    let n_i = n as c_int;
    let mut work_a = a.as_slice().to_vec();
    let mut w = vec![ZERO; n];
    let mut vl = [ZERO; 1];
    let ldvr = if vectors { n_i } else { 1 };
    let mut vr = vec![ZERO; if vectors { n * n } else { 1 }];
    let mut rwork = vec![0.0; 2 * n];
    let mut query = [ZERO; 1];
    let mut info: c_int = 0;
    let jobvr = job(if vectors { b'V' } else { b'N' });
    // SAFETY: buffer sizes follow the zgeev contract; lwork = -1 is a query.
    unsafe {
        zgeev_(
            job(b'N'),
            jobvr,
            &n_i,
            work_a.as_mut_ptr() as *mut _,
            &n_i,
            w.as_mut_ptr() as *mut _,
            vl.as_mut_ptr() as *mut _,
            &1,
            vr.as_mut_ptr() as *mut _,
            &ldvr,
            query.as_mut_ptr() as *mut _,
            &-1,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    check_info("zgeev", info, n, a.fingerprint())?;
    let lwork = workspace_len(query[0]);
    let mut work = vec![ZERO; lwork];
    let lwork_i = lwork as c_int;
    // SAFETY: as above with a correctly sized workspace.
    unsafe {
        zgeev_(
            job(b'N'),
            jobvr,
            &n_i,
            work_a.as_mut_ptr() as *mut _,
            &n_i,
            w.as_mut_ptr() as *mut _,
            vl.as_mut_ptr() as *mut _,
            &1,
            vr.as_mut_ptr() as *mut _,
            &ldvr,
            work.as_mut_ptr() as *mut _,
            &lwork_i,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    check_info("zgeev", info, n, a.fingerprint())?;
    let vr = if vectors {
        Some(ComplexMatrix::from_col_major(n, vr)?)
    } else {
        None
    };
    Ok((w, vr))
}

/// Eigenvalues of a real matrix from its real Schur form.
///
/// The real/complex classification is structural: a 1×1 diagonal block yields
/// [`EigenKind::Real`], a standardized 2×2 block yields a conjugate pair. No
/// threshold on imaginary parts is involved.
pub fn eig_real_schur(a: &RealMatrix) -> Result<Vec<SchurEigenvalue>> {
    if !a.is_finite() {
        return Err(Error::NonFinite("eigensolver input"));
    }
    let n = a.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let n_i = n as c_int;
    let mut work_a = a.as_slice().to_vec();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let mut vs = [0.0; 1];
    let mut sdim: c_int = 0;
    let mut bwork = [0 as c_int; 1];
    let mut query = [0.0; 1];
    let mut info: c_int = 0;
    // SAFETY: jobvs = 'N', sort = 'N' so select/bwork/vs are not referenced.
    unsafe {
        dgees_(
            job(b'N'),
            job(b'N'),
            None,
            &n_i,
            work_a.as_mut_ptr(),
            &n_i,
            &mut sdim,
            wr.as_mut_ptr(),
            wi.as_mut_ptr(),
            vs.as_mut_ptr(),
            &1,
            query.as_mut_ptr(),
            &-1,
            bwork.as_mut_ptr(),
            &mut info,
        );
    }
    check_info("dgees", info, n, a.fingerprint())?;
    let lwork = (query[0] as usize).max(3 * n);
    let mut work = vec![0.0; lwork];
    let lwork_i = lwork as c_int;
    // SAFETY: as above with a correctly sized workspace.
    unsafe {
        dgees_(
            job(b'N'),
            job(b'N'),
            None,
            &n_i,
            work_a.as_mut_ptr(),
            &n_i,
            &mut sdim,
            wr.as_mut_ptr(),
            wi.as_mut_ptr(),
            vs.as_mut_ptr(),
            &1,
            work.as_mut_ptr(),
            &lwork_i,
            bwork.as_mut_ptr(),
            &mut info,
        );
    }
    check_info("dgees", info, n, a.fingerprint())?;
    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| SchurEigenvalue {
            value: Complex64::new(re, im),
            kind: if im == 0.0 {
                EigenKind::Real
            } else {
                EigenKind::ConjugatePair
            },
        })
        .collect())
}

/// Eigenvalues of a Hermitian matrix in ascending order (upper triangle is read).
pub fn eigvalsh(a: &ComplexMatrix) -> Result<Vec<f64>> {
    if !a.is_finite() {
        return Err(Error::NonFinite("eigensolver input"));
    }
    let n = a.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let n_i = n as c_int;
    let mut work_a = a.as_slice().to_vec();
    let mut w = vec![0.0; n];
    let mut rwork = vec![0.0; (3 * n).saturating_sub(2).max(1)];
    let mut query = [ZERO; 1];
    let mut info: c_int = 0;
    // SAFETY: zheev contract; first call is a workspace query.
    unsafe {
        zheev_(
            job(b'N'),
            job(b'U'),
            &n_i,
            work_a.as_mut_ptr() as *mut _,
            &n_i,
            w.as_mut_ptr(),
            query.as_mut_ptr() as *mut _,
            &-1,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    check_info("zheev", info, n, a.fingerprint())?;
    let lwork = workspace_len(query[0]).max(2 * n - 1);
    let mut work = vec![ZERO; lwork];
    let lwork_i = lwork as c_int;
    // SAFETY: as above.
    unsafe {
        zheev_(
            job(b'N'),
            job(b'U'),
            &n_i,
            work_a.as_mut_ptr() as *mut _,
            &n_i,
            w.as_mut_ptr(),
            work.as_mut_ptr() as *mut _,
            &lwork_i,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    check_info("zheev", info, n, a.fingerprint())?;
    Ok(w)
}

/// Smallest singular value.
pub fn min_singular_value(a: &ComplexMatrix) -> Result<f64> {
    let n = a.dim();
    if n == 0 {
        return Ok(0.0);
    }
    let n_i = n as c_int;
    let mut work_a = a.as_slice().to_vec();
    let mut s = vec![0.0; n];
    let mut u = [ZERO; 1];
    let mut vt = [ZERO; 1];
    let mut rwork = vec![0.0; 5 * n];
    let mut query = [ZERO; 1];
    let mut info: c_int = 0;
    // SAFETY: jobu = jobvt = 'N'; u and vt are not referenced.
    unsafe {
        zgesvd_(
            job(b'N'),
            job(b'N'),
            &n_i,
            &n_i,
            work_a.as_mut_ptr() as *mut _,
            &n_i,
            s.as_mut_ptr(),
            u.as_mut_ptr() as *mut _,
            &1,
            vt.as_mut_ptr() as *mut _,
            &1,
            query.as_mut_ptr() as *mut _,
            &-1,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    check_info("zgesvd", info, n, a.fingerprint())?;
    let lwork = workspace_len(query[0]);
    let mut work = vec![ZERO; lwork];
    let lwork_i = lwork as c_int;
    // SAFETY: as above.
    unsafe {
        zgesvd_(
            job(b'N'),
            job(b'N'),
            &n_i,
            &n_i,
            work_a.as_mut_ptr() as *mut _,
            &n_i,
            s.as_mut_ptr(),
            u.as_mut_ptr() as *mut _,
            &1,
            vt.as_mut_ptr() as *mut _,
            &1,
            work.as_mut_ptr() as *mut _,
            &lwork_i,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    check_info("zgesvd", info, n, a.fingerprint())?;
    Ok(s.into_iter().fold(f64::INFINITY, f64::min))
}

/// Householder QR: returns Q and the diagonal of R.
pub(crate) fn qr_with_r_diagonal(a: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<Complex64>)> {
    let n = a.dim();
    let (q, r_diag) = thin_qr(n, n, a.as_slice().to_vec())?;
    Ok((ComplexMatrix::from_col_major(n, q)?, r_diag))
}

/// Thin Householder QR of a column-major `rows`×`cols` matrix (rows ≥ cols):
/// returns the column-major Q with orthonormal columns and the diagonal of R.
pub(crate) fn thin_qr(
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    if rows < cols || data.len() != rows * cols {
        return Err(Error::InvalidParameter {
            name: "thin QR",
            reason: format!(
                "need rows ≥ cols and rows*cols entries ({rows}×{cols}, {} entries)",
                data.len()
            ),
        });
    }
    let m_i = rows as c_int;
    let n_i = cols as c_int;
    let mut q = data;
    let mut tau = vec![ZERO; cols.max(1)];
    let mut query = [ZERO; 1];
    let mut info: c_int = 0;
    // SAFETY: zgeqrf contract; first call is a workspace query.
    unsafe {
        zgeqrf_(
            &m_i,
            &n_i,
            q.as_mut_ptr() as *mut _,
            &m_i,
            tau.as_mut_ptr() as *mut _,
            query.as_mut_ptr() as *mut _,
            &-1,
            &mut info,
        );
    }
    check_info("zgeqrf", info, rows, 0)?;
    let mut work = vec![ZERO; workspace_len(query[0]).max(cols.max(1))];
    let lwork_i = work.len() as c_int;
    // SAFETY: as above.
    unsafe {
        zgeqrf_(
            &m_i,
            &n_i,
            q.as_mut_ptr() as *mut _,
            &m_i,
            tau.as_mut_ptr() as *mut _,
            work.as_mut_ptr() as *mut _,
            &lwork_i,
            &mut info,
        );
    }
    check_info("zgeqrf", info, rows, 0)?;
    let r_diag: Vec<Complex64> = (0..cols).map(|i| q[i * rows + i]).collect();
    // SAFETY: zungqr with the reflectors just produced; same workspace query pattern.
    unsafe {
        zungqr_(
            &m_i,
            &n_i,
            &n_i,
            q.as_mut_ptr() as *mut _,
            &m_i,
            tau.as_ptr() as *const _,
            query.as_mut_ptr() as *mut _,
            &-1,
            &mut info,
        );
    }
    check_info("zungqr", info, rows, 0)?;
    let mut work = vec![ZERO; workspace_len(query[0]).max(cols.max(1))];
    let lwork_i = work.len() as c_int;
    // SAFETY: as above.
    unsafe {
        zungqr_(
            &m_i,
            &n_i,
            &n_i,
            q.as_mut_ptr() as *mut _,
            &m_i,
            tau.as_ptr() as *const _,
            work.as_mut_ptr() as *mut _,
            &lwork_i,
            &mut info,
        );
    }
    check_info("zungqr", info, rows, 0)?;
    Ok((q, r_diag))
}

/// Tolerance on ‖A − A†‖_max accepted by [`trace_norm`].
pub const HERMITIAN_TOL: f64 = 1e-8;

/// Trace norm Σ|λᵢ| of a Hermitian matrix, evaluated on (A + A†)/2.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    let residual = a.hermiticity_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    Ok(eigvalsh(&a.hermitian_part())?
        .into_iter()
        .map(f64::abs)
        .sum())
}
