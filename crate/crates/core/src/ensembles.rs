//! Random channel ensembles, the real Ginibre sampler, and moment checks for
//! environmental channels.

use serde::{Deserialize, Serialize};

use crate::channels::{superoperator_from_kraus, KrausSet};
use crate::matrix::{haar_isometry, haar_unitary, ComplexMatrix, RealMatrix};
use crate::rng::RngState;
use crate::{Complex64, Error, Result};

/// Eigenvalues with |z| below `ZERO_TOL_PER_DIM · N` count as zero for Φ_P.
pub const ZERO_TOL_PER_DIM: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    Environmental,
    ExternalFields,
    ProjectedUnitary,
    RealGinibre,
}

impl std::fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Environmental => "environmental",
            Self::ExternalFields => "external_fields",
            Self::ProjectedUnitary => "projected_unitary",
            Self::RealGinibre => "real_ginibre",
        })
    }
}

/// One ensemble draw: a channel or, for `RealGinibre`, a bare real matrix.
#[derive(Debug, Clone)]
pub enum EnsembleSample {
    Channel(KrausSet),
    Matrix(RealMatrix),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    /// System dimension; raw matrix dimension for `RealGinibre`.
    pub n: usize,
    /// Number of Kraus operators (unused for `RealGinibre`).
    pub m: usize,
    /// Mixing weights for `ExternalFields`; uniform when absent.
    pub p: Option<Vec<f64>>,
    pub samples: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn violations(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if self.samples == 0 {
            errs.push("samples must be at least 1".to_string());
        }
        match self.kind {
            EnsembleKind::RealGinibre => {
                if self.n == 0 {
                    errs.push("n must be at least 1".to_string());
                }
            }
            kind => {
                if self.n < 2 {
                    errs.push(format!("N must be at least 2 (got {})", self.n));
                }
                if self.m == 0 {
                    errs.push("M must be at least 1".to_string());
                }
                if kind == EnsembleKind::ProjectedUnitary && self.m > 0 && !self.n.is_multiple_of(self.m) {
                    errs.push("M must divide N".to_string());
                }
                if kind == EnsembleKind::ExternalFields {
                    if let Some(p) = &self.p {
                        if let Err(e) = check_weights(p, self.m) {
                            errs.push(e);
                        }
                    }
                }
            }
        }
        if self.p.is_some() && self.kind != EnsembleKind::ExternalFields {
            errs.push(format!(
                "p is only accepted for external_fields (kind is {})",
                self.kind
            ));
        }
        errs
    }

    pub fn validate(&self) -> Result<()> {
        let errs = self.violations();
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name: "ensemble",
                reason: errs.join("; "),
            })
        }
    }

    /// Draw number `index`, using the stream `(seed, index)`.
    pub fn sample(&self, index: u64) -> Result<EnsembleSample> {
        self.draw(&mut RngState::with_stream(self.seed, index))
    }

    /// One draw from the given generator.
    pub fn draw(&self, rng: &mut RngState) -> Result<EnsembleSample> {
        Ok(match self.kind {
            EnsembleKind::Environmental => {
                EnsembleSample::Channel(environmental_channel(self.n, self.m, rng)?)
            }
            EnsembleKind::ExternalFields => EnsembleSample::Channel(random_external_fields(
                self.n,
                self.m,
                self.p.as_deref(),
                rng,
            )?),
            EnsembleKind::ProjectedUnitary => {
                EnsembleSample::Channel(projected_unitary_channel(self.n, self.m, rng)?)
            }
            EnsembleKind::RealGinibre => EnsembleSample::Matrix(real_ginibre(self.n, rng)),
        })
    }
}

fn check_weights(p: &[f64], m: usize) -> std::result::Result<(), String> {
    if p.len() != m {
        return Err(format!("p must have length M={m} (got {})", p.len()));
    }
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err("p must be nonnegative and finite".to_string());
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(format!("p must sum to 1 (sums to {total})"));
    }
    Ok(())
}

/// Φ_E: coupling to an M-dimensional environment in state e₀ through a Haar
/// unitary on C^N ⊗ C^M, then tracing the environment out.
///
/// Composite index is `s·M + e`; A_e[i, k] = U[i·M + e, k·M]. Only the N
/// columns k·M are drawn, as a Haar isometry, which has the same law.
pub fn environmental_channel(n: usize, m: usize, rng: &mut RngState) -> Result<KrausSet> {
    if n < 2 || m == 0 {
        return Err(Error::InvalidParameter {
            name: "environmental channel",
            reason: format!("need N ≥ 2 and M ≥ 1 (N={n}, M={m})"),
        });
    }
    // Only the columns with environment index 0 enter the Kraus operators.
    let rows = n * m;
    let v = haar_isometry(rows, n, rng);
    let ops = (0..m)
        .map(|e| ComplexMatrix::from_fn(n, |i, k| v[k * rows + i * m + e]))
        .collect();
    KrausSet::new_trace_preserving(ops)
}

/// Φ_R: {√p_m U_m} with independent Haar U_m; uniform weights when `p` is `None`.
pub fn random_external_fields(
    n: usize,
    m: usize,
    p: Option<&[f64]>,
    rng: &mut RngState,
) -> Result<KrausSet> {
    if n < 1 || m == 0 {
        return Err(Error::InvalidParameter {
            name: "external fields",
            reason: format!("need N ≥ 1 and M ≥ 1 (N={n}, M={m})"),
        });
    }
    let uniform = vec![1.0 / m as f64; m];
    let p = p.unwrap_or(&uniform);
    check_weights(p, m).map_err(|reason| Error::InvalidParameter { name: "p", reason })?;
    let ops = p
        .iter()
        .map(|&w| haar_unitary(n, rng).scale(Complex64::new(w.sqrt(), 0.0)))
        .collect();
    KrausSet::new_trace_preserving(ops)
}

/// Φ_P: A_m = P_m·U with P_m the projector on the m-th block of N/M basis vectors.
pub fn projected_unitary_channel(n: usize, m: usize, rng: &mut RngState) -> Result<KrausSet> {
    if m == 0 || n == 0 || !n.is_multiple_of(m) {
        return Err(Error::InvalidParameter {
            name: "M",
            reason: format!("M must divide N (N={n}, M={m})"),
        });
    }
    let u = haar_unitary(n, rng);
    let block = n / m;
    let ops = (0..m)
        .map(|b| {
            ComplexMatrix::from_fn(n, |r, c| {
                if r / block == b {
                    u[(r, c)]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    KrausSet::new_trace_preserving(ops)
}

/// Real Ginibre matrix with iid N(0, 1/n) entries.
pub fn real_ginibre(n: usize, rng: &mut RngState) -> RealMatrix {
    let sd = 1.0 / (n as f64).sqrt();
    let mut out = RealMatrix::zeros(n);
    for c in 0..n {
        for r in 0..n {
            out[(r, c)] = sd * rng.standard_normal();
        }
    }
    out
}

/// Number of eigenvalues treated as zero for dimension-N channels.
pub fn count_zero_eigenvalues(spectrum: &[Complex64], n: usize) -> usize {
    let tol = ZERO_TOL_PER_DIM * n as f64;
    spectrum.iter().filter(|z| z.norm() < tol).count()
}

/// ⟨Φ_{ij,kl}⟩ for environmental channels.
pub fn first_moment_exact(n: usize, (i, j, k, l): (usize, usize, usize, usize)) -> f64 {
    if i == j && k == l {
        1.0 / n as f64
    } else {
        0.0
    }
}

/// ⟨Φ_{ij,kl} Φ*_{ī j̄, k̄ l̄}⟩ for environmental channels with Haar coupling.
pub fn second_moment_exact(
    n: usize,
    m: usize,
    (i, j, k, l): (usize, usize, usize, usize),
    (ib, jb, kb, lb): (usize, usize, usize, usize),
) -> f64 {
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let (nf, mf) = (n as f64, m as f64);
    let big = nf * mf;
    let denom = big * big - 1.0;
    let lead = mf * mf * d(i, j) * d(ib, jb) * d(k, l) * d(kb, lb)
        + mf * d(i, ib) * d(j, jb) * d(k, kb) * d(l, lb);
    let cross = mf * mf * d(i, j) * d(ib, jb) * d(k, kb) * d(l, lb)
        + mf * d(i, ib) * d(j, jb) * d(k, l) * d(kb, lb);
    lead / denom - cross / (big * denom)
}

/// Largest dimension for which all N⁸ second moments are tabulated.
pub const SECOND_MOMENT_MAX_N: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub n: usize,
    pub m: usize,
    pub samples: usize,
    /// Max over elements and real/imaginary parts of |mean − exact| / stderr.
    pub first_moment_max_z: f64,
    /// Same for second moments; `None` when N exceeds [`SECOND_MOMENT_MAX_N`].
    pub second_moment_max_z: Option<f64>,
    /// max |Φ_{ij,kl} − conj(Φ_{ji,lk})| over all samples.
    pub symmetry_defect: f64,
    /// Pooled ⟨|Φ_{ij,kl}|²⟩ over elements with i ≠ j and k ≠ l.
    pub offdiagonal_variance: f64,
}

/// Running mean and second moment of real data.
#[derive(Debug, Clone, Copy, Default)]
struct Accumulator {
    sum: f64,
    sum_sq: f64,
}

impl Accumulator {
    fn push(&mut self, x: f64) {
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn z_score(&self, count: usize, exact: f64) -> f64 {
        let n = count as f64;
        let mean = self.sum / n;
        let var = (self.sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
        let se = (var / n).sqrt();
        let dev = (mean - exact).abs();
        if se < 1e-14 {
            // Deterministic element: demand agreement to round-off.
            if dev < 1e-10 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            dev / se
        }
    }
}

/// Compares sampled first and second moments of Φ_E elements with the exact
/// Haar averages.
pub fn phi_moment_check(
    n: usize,
    m: usize,
    samples: usize,
    rng: &mut RngState,
) -> Result<MomentReport> {
    if samples < 100 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: format!("moment checks need at least 100 samples (got {samples})"),
        });
    }
    let n2 = n * n;
    let n4 = n2 * n2;
    let track_second = n <= SECOND_MOMENT_MAX_N;
    let mut first = vec![[Accumulator::default(); 2]; n4];
    let mut second = if track_second {
        vec![[Accumulator::default(); 2]; n4 * n4]
    } else {
        Vec::new()
    };
    let mut symmetry_defect: f64 = 0.0;
    let mut offdiag_sum = 0.0;
    let mut offdiag_count = 0usize;
    let mut elems = vec![Complex64::new(0.0, 0.0); n4];
    let index = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * n + k) * n + l;

    for _ in 0..samples {
        let k_set = environmental_channel(n, m, rng)?;
        let s = superoperator_from_kraus(&k_set);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = s.element(i, j, k, l);
                        elems[index(i, j, k, l)] = v;
                        symmetry_defect =
                            symmetry_defect.max((v - s.element(j, i, l, k).conj()).norm());
                        if i != j && k != l {
                            offdiag_sum += v.norm_sqr();
                            offdiag_count += 1;
                        }
                    }
                }
            }
        }
        for (acc, v) in first.iter_mut().zip(&elems) {
            acc[0].push(v.re);
            acc[1].push(v.im);
        }
        if track_second {
            for (a, va) in elems.iter().enumerate() {
                let row = &mut second[a * n4..(a + 1) * n4];
                for (acc, vb) in row.iter_mut().zip(&elems) {
                    let p = va * vb.conj();
                    acc[0].push(p.re);
                    acc[1].push(p.im);
                }
            }
        }
    }

    let unpack = |a: usize| (a / (n * n * n), (a / (n * n)) % n, (a / n) % n, a % n);
    let mut first_moment_max_z: f64 = 0.0;
    for (a, acc) in first.iter().enumerate() {
        let exact = first_moment_exact(n, unpack(a));
        first_moment_max_z = first_moment_max_z
            .max(acc[0].z_score(samples, exact))
            .max(acc[1].z_score(samples, 0.0));
    }
    let second_moment_max_z = track_second.then(|| {
        let mut worst: f64 = 0.0;
        for a in 0..n4 {
            for b in 0..n4 {
                let exact = second_moment_exact(n, m, unpack(a), unpack(b));
                let acc = &second[a * n4 + b];
                worst = worst
                    .max(acc[0].z_score(samples, exact))
                    .max(acc[1].z_score(samples, 0.0));
            }
        }
        worst
    });

    Ok(MomentReport {
        n,
        m,
        samples,
        first_moment_max_z,
        second_moment_max_z,
        symmetry_defect,
        offdiagonal_variance: if offdiag_count > 0 {
            offdiag_sum / offdiag_count as f64
        } else {
            0.0
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{
        choi_matrix, invariant_state, is_completely_positive, is_trace_preserving,
        superoperator_from_kraus,
    };
    use crate::matrix::{eig_general, eig_real_schur, DensityMatrix};
    use crate::stats::mean_and_stderr;

    fn unital_defect(k: &KrausSet) -> f64 {
        let n = k.dim();
        let mixed = DensityMatrix::maximally_mixed(n).into_matrix();
        (&k.apply(&mixed).unwrap() - &mixed).max_abs()
    }

    #[test]
    fn environmental_is_cptp() {
        let mut rng = RngState::new(1);
        for (n, m) in [(2, 1), (3, 2), (4, 5), (2, 4)] {
            let k = environmental_channel(n, m, &mut rng).unwrap();
            assert_eq!(k.len(), m);
            assert!(is_trace_preserving(&k).residual < 1e-10);
            let s = superoperator_from_kraus(&k);
            assert!(is_completely_positive(&s).unwrap().completely_positive);
        }
        assert!(environmental_channel(1, 2, &mut rng).is_err());
    }

    #[test]
    fn full_rank_choi_when_m_is_n_squared() {
        let mut rng = RngState::new(2);
        for n in 2..=4 {
            let k = environmental_channel(n, n * n, &mut rng).unwrap();
            let ev = choi_matrix(&superoperator_from_kraus(&k))
                .eigenvalues()
                .unwrap();
            assert!(ev[0] > 1e-12, "N={n}: {}", ev[0]);
        }
    }

    #[test]
    fn external_fields_are_bistochastic() {
        let mut rng = RngState::new(3);
        let k = random_external_fields(8, 4, None, &mut rng).unwrap();
        assert!(unital_defect(&k) < 1e-10);
        let p = [0.5, 0.3, 0.2];
        let k = random_external_fields(5, 3, Some(&p), &mut rng).unwrap();
        assert!(unital_defect(&k) < 1e-10);
        let w = invariant_state(&superoperator_from_kraus(&k)).unwrap();
        let mixed = DensityMatrix::maximally_mixed(5).into_matrix();
        assert!((&w.state.into_matrix() - &mixed).max_abs() < 1e-8);
    }

    #[test]
    fn external_fields_spectrum_closed_under_conjugation() {
        let mut rng = RngState::new(4);
        let k = random_external_fields(8, 4, None, &mut rng).unwrap();
        let spec = eig_general(superoperator_from_kraus(&k).matrix()).unwrap();
        assert!(spec.iter().any(|z| (z - 1.0).norm() < 1e-8));
        for z in &spec {
            let d = spec
                .iter()
                .map(|w| (w - z.conj()).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(d < 1e-8);
        }
    }

    #[test]
    fn single_field_is_unitary() {
        let mut rng = RngState::new(5);
        let k = random_external_fields(4, 1, None, &mut rng).unwrap();
        let spec = eig_general(superoperator_from_kraus(&k).matrix()).unwrap();
        assert!(spec.iter().all(|z| (z.norm() - 1.0).abs() < 1e-10));
    }

    #[test]
    fn invalid_weights_rejected() {
        let mut rng = RngState::new(6);
        assert!(random_external_fields(4, 2, Some(&[0.5, 0.6]), &mut rng).is_err());
        assert!(random_external_fields(4, 2, Some(&[1.5, -0.5]), &mut rng).is_err());
        assert!(random_external_fields(4, 2, Some(&[1.0]), &mut rng).is_err());
    }

    #[test]
    fn projected_unitary_zero_count() {
        let mut rng = RngState::new(7);
        let k = projected_unitary_channel(8, 2, &mut rng).unwrap();
        assert!(is_trace_preserving(&k).residual < 1e-10);
        assert!(unital_defect(&k) < 1e-10);
        let spec = eig_general(superoperator_from_kraus(&k).matrix()).unwrap();
        assert_eq!(count_zero_eigenvalues(&spec, 8), 32);
        assert!(projected_unitary_channel(8, 3, &mut rng).is_err());
    }

    #[test]
    fn projected_unitary_full_dephasing() {
        let mut rng = RngState::new(8);
        let n = 5;
        let k = projected_unitary_channel(n, n, &mut rng).unwrap();
        // One step maps any state to a diagonal one.
        let psi = crate::matrix::random_pure_state(n, &mut rng);
        let out = k.apply(DensityMatrix::pure(&psi).matrix()).unwrap();
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    assert!(out[(r, c)].norm() < 1e-12);
                }
            }
        }
        let w = invariant_state(&superoperator_from_kraus(&k)).unwrap();
        let mixed = DensityMatrix::maximally_mixed(n).into_matrix();
        assert!((&w.state.into_matrix() - &mixed).max_abs() < 1e-8);
    }

    #[test]
    fn ginibre_entries_centered() {
        let mut rng = RngState::new(9);
        let g = real_ginibre(100, &mut rng);
        let (mean, se) = mean_and_stderr(g.as_slice());
        assert!(mean.abs() < 5.0 * se);
        let var: f64 = g.as_slice().iter().map(|x| x * x).sum::<f64>() / 10_000.0;
        assert!((var * 100.0 - 1.0).abs() < 0.05);
    }

    #[test]
    fn ginibre_2x2_real_count() {
        let mut rng = RngState::new(10);
        let counts: Vec<f64> = (0..100_000)
            .map(|_| {
                let g = real_ginibre(2, &mut rng);
                eig_real_schur(&g)
                    .unwrap()
                    .iter()
                    .filter(|e| e.is_real())
                    .count() as f64
            })
            .collect();
        let (mean, se) = mean_and_stderr(&counts);
        assert!((mean - 2f64.sqrt()).abs() < 3.0 * se, "{mean} ± {se}");
    }

    #[test]
    fn second_moment_sum_rules() {
        // Σ_i Φ_{ii,kl} = δ_kl is deterministic, so its variance vanishes.
        let (n, m) = (3, 2);
        for k in 0..n {
            for l in 0..n {
                let mut total = 0.0;
                for i in 0..n {
                    for ib in 0..n {
                        total += second_moment_exact(n, m, (i, i, k, l), (ib, ib, k, l));
                    }
                }
                let expect = if k == l { 1.0 } else { 0.0 };
                assert!((total - expect).abs() < 1e-12, "{k}{l}: {total}");
            }
        }
    }

    #[test]
    fn moments_small() {
        let mut rng = RngState::new(11);
        let r = phi_moment_check(2, 2, 2000, &mut rng).unwrap();
        assert!(r.first_moment_max_z < 5.0);
        assert!(r.second_moment_max_z.unwrap() < 5.0);
        assert_eq!(r.symmetry_defect, 0.0);
        assert!(phi_moment_check(2, 2, 50, &mut rng).is_err());
    }

    #[test]
    fn offdiagonal_variance_large_m() {
        let mut rng = RngState::new(12);
        let r = phi_moment_check(8, 16, 100, &mut rng).unwrap();
        assert!(r.second_moment_max_z.is_none());
        let target = 1.0 / (64.0 * 16.0);
        assert!((r.offdiagonal_variance / target - 1.0).abs() < 0.1);
    }

    #[test]
    fn spec_validation() {
        let spec = EnsembleSpec {
            kind: EnsembleKind::ProjectedUnitary,
            n: 8,
            m: 3,
            p: Some(vec![1.0, 0.0, 0.0]),
            samples: 0,
            seed: 0,
        };
        let errs = spec.violations();
        assert_eq!(errs.len(), 3, "{errs:?}");
        let ok = EnsembleSpec {
            kind: EnsembleKind::Environmental,
            n: 4,
            m: 2,
            p: None,
            samples: 1,
            seed: 3,
        };
        let (a, b) = match (ok.sample(5).unwrap(), ok.sample(5).unwrap()) {
            (EnsembleSample::Channel(a), EnsembleSample::Channel(b)) => (a, b),
            _ => unreachable!(),
        };
        assert_eq!(a.operators(), b.operators());
    }
}
