//! Real representation of Hermiticity-preserving maps in an orthonormal
//! Hermitian operator basis.
//!
//! With generators λ⁰ = I/√N, λ¹…λ^{N²−1} (generalized Gell-Mann matrices,
//! Tr λⁱλʲ = δ_ij) the entries Φ^{ij} = Tr(λⁱ Φ(λʲ)) are real. For a
//! trace-preserving map the first row is (1, 0, …, 0), the first column below
//! it is the translation vector κ, and the trailing block C carries the rest of
//! the spectrum.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::Superoperator;
use crate::matrix::RealMatrix;
use crate::{Complex64, Error, Result};

/// Largest |Im Φ^{ij}| tolerated before the map is rejected.
pub const IMAGINARY_TOL: f64 = 1e-8;

/// Sparse Hermitian generator: list of `(row, col, value)` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub entries: Vec<(usize, usize, Complex64)>,
}

impl Generator {
    pub fn to_dense(&self, n: usize) -> crate::matrix::ComplexMatrix {
        let mut m = crate::matrix::ComplexMatrix::zeros(n);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GellMannBasis {
    n: usize,
    generators: Vec<Generator>,
}

impl GellMannBasis {
    fn build(n: usize) -> Self {
        let mut generators = Vec::with_capacity(n * n);
        let inv_sqrt_n = 1.0 / (n as f64).sqrt();
        generators.push(Generator {
            entries: (0..n)
                .map(|i| (i, i, Complex64::new(inv_sqrt_n, 0.0)))
                .collect(),
        });
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for j in 0..n {
            for k in j + 1..n {
                generators.push(Generator {
                    entries: vec![
                        (j, k, Complex64::new(h, 0.0)),
                        (k, j, Complex64::new(h, 0.0)),
                    ],
                });
                generators.push(Generator {
                    entries: vec![
                        (j, k, Complex64::new(0.0, -h)),
                        (k, j, Complex64::new(0.0, h)),
                    ],
                });
            }
        }
        for l in 1..n {
            let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
            let mut entries: Vec<_> = (0..l).map(|m| (m, m, Complex64::new(norm, 0.0))).collect();
            entries.push((l, l, Complex64::new(-(l as f64) * norm, 0.0)));
            generators.push(Generator { entries });
        }
        let basis = Self { n, generators };
        let defect = basis.orthonormality_defect();
        assert!(
            defect < 1e-12,
            "Gell-Mann basis for N={n} not orthonormal: {defect:e}"
        );
        basis
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// max |Tr(λⁱλʲ) − δ_ij| computed sparsely.
    pub fn orthonormality_defect(&self) -> f64 {
        // Tr(λⁱλʲ) = Σ λⁱ[r,c]·λʲ[c,r]; index generators by their support.
        let mut by_position: HashMap<(usize, usize), Vec<(usize, Complex64)>> = HashMap::new();
        for (j, g) in self.generators.iter().enumerate() {
            for &(r, c, v) in &g.entries {
                by_position.entry((r, c)).or_default().push((j, v));
            }
        }
        let mut worst: f64 = 0.0;
        for (i, g) in self.generators.iter().enumerate() {
            let mut row: HashMap<usize, Complex64> = HashMap::new();
            for &(r, c, v) in &g.entries {
                if let Some(list) = by_position.get(&(c, r)) {
                    for &(j, w) in list {
                        *row.entry(j).or_default() += v * w;
                    }
                }
            }
            let diag = row.get(&i).copied().unwrap_or_default();
            worst = worst.max((diag - Complex64::new(1.0, 0.0)).norm());
            for (&j, &val) in &row {
                if j != i {
                    worst = worst.max(val.norm());
                }
            }
        }
        worst
    }
}

/// Cached generator basis for dimension `n`.
pub fn gell_mann_basis(n: usize) -> Arc<GellMannBasis> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GellMannBasis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(b) = cache.lock().expect("basis cache poisoned").get(&n) {
        return Arc::clone(b);
    }
    let built = Arc::new(GellMannBasis::build(n));
    Arc::clone(
        cache
            .lock()
            .expect("basis cache poisoned")
            .entry(n)
            .or_insert(built),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlochForm {
    pub n: usize,
    /// Full N²×N² real matrix Φ^{ij}.
    pub full: RealMatrix,
    /// Φ^{i0} for i ≥ 1.
    pub kappa: Vec<f64>,
    /// Trailing (N²−1)×(N²−1) block.
    pub contraction: RealMatrix,
    /// Largest |Im Φ^{ij}| discarded.
    pub max_imaginary: f64,
}

impl BlochForm {
    /// max |Φ^{0j} − δ_0j|; zero for trace-preserving maps.
    pub fn first_row_defect(&self) -> f64 {
        let dim = self.full.dim();
        (0..dim)
            .map(|j| (self.full[(0, j)] - if j == 0 { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    }
}

/// Φ^{ij} = Tr(λⁱ Φ(λʲ)), computed as G† S G with the sparse generator matrix G.
pub fn bloch_form(s: &Superoperator) -> Result<BlochForm> {
    let n = s.n();
    let big = n * n;
    let basis = gell_mann_basis(n);
    let sm = s.matrix();

    // T = S·G: column j is Σ_{(p,q)} λʲ[p,q]·S[:, p·N+q].
    let mut t = vec![Complex64::new(0.0, 0.0); big * big];
    for (j, g) in basis.generators().iter().enumerate() {
        let dst = &mut t[j * big..(j + 1) * big];
        for &(p, q, v) in &g.entries {
            for (d, &x) in dst.iter_mut().zip(sm.column(p * n + q)) {
                *d += x * v;
            }
        }
    }

    // Φ^{ij} = Σ_{(r,c)} λⁱ[r,c]·T[c·N+r, j].
    let mut max_imaginary: f64 = 0.0;
    let mut full = RealMatrix::zeros(big);
    for j in 0..big {
        let col = &t[j * big..(j + 1) * big];
        for (i, g) in basis.generators().iter().enumerate() {
            let z: Complex64 = g.entries.iter().map(|&(r, c, v)| v * col[c * n + r]).sum();
            max_imaginary = max_imaginary.max(z.im.abs());
            full[(i, j)] = z.re;
        }
    }
    if max_imaginary > IMAGINARY_TOL {
        return Err(Error::ImaginaryResidue {
            residue: max_imaginary,
        });
    }
    let kappa = (1..big).map(|i| full[(i, 0)]).collect();
    let contraction = full.trailing_block(1);
    Ok(BlochForm {
        n,
        full,
        kappa,
        contraction,
        max_imaginary,
    })
}
