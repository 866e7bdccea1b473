//! Density matrices, bipartitions, and the partial transpose / partial trace maps.

use crate::error::{MbnError, Result};
use crate::matrix::{hermitian_eigenvalues, hermiticity_defect, trace, CMatrix};

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = -1e-9;

/// Which subsystem of a bipartition an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    A,
    B,
}

/// A fixed N|M split of a composite Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bipartition {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl Bipartition {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a < 2 || dim_b < 2 {
            return Err(MbnError::InvalidDimension(format!(
                "bipartition {dim_a}|{dim_b}: both sides must be >= 2"
            )));
        }
        Ok(Self { dim_a, dim_b })
    }

    pub fn total_dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn check(&self, state_dim: usize) -> Result<()> {
        if self.total_dim() != state_dim {
            return Err(MbnError::InvalidBipartition {
                expected: self.total_dim(),
                actual: state_dim,
            });
        }
        Ok(())
    }
}

/// A validated quantum state. `strict` states are Hermitian, unit-trace, and PSD;
/// `quasi` states (linear-inversion output) skip the PSD check.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    mat: CMatrix,
    quasi: bool,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        Self::build(mat, false)
    }

    /// Hermitian trace-1 matrix that may fail positivity.
    pub fn new_quasi(mat: CMatrix) -> Result<Self> {
        Self::build(mat, true)
    }

    /// Like `new` but with a caller-supplied PSD floor, for states whose printed
    /// coefficients are rounded.
    pub fn with_psd_floor(mat: CMatrix, floor: f64) -> Result<Self> {
        let dm = Self::build(mat, true)?;
        let min_eig = dm.min_eigenvalue();
        if min_eig < floor {
            return Err(MbnError::NotPositive(min_eig));
        }
        Ok(Self { quasi: false, ..dm })
    }

    fn build(mat: CMatrix, quasi: bool) -> Result<Self> {
        let dim = mat.nrows();
        if dim == 0 || mat.ncols() != dim {
            return Err(MbnError::InvalidDimension(format!(
                "density matrix must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let h = hermiticity_defect(&mat);
        if h > HERMITICITY_TOL {
            return Err(MbnError::NotHermitian(h));
        }
        let tr = trace(&mat);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(MbnError::BadTrace(tr.re));
        }
        let dm = Self { dim, mat, quasi };
        if !quasi {
            let min_eig = dm.min_eigenvalue();
            if min_eig < PSD_TOL {
                return Err(MbnError::NotPositive(min_eig));
            }
        }
        Ok(dm)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn is_quasi(&self) -> bool {
        self.quasi
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.mat)[0]
    }

    pub fn purity(&self) -> f64 {
        crate::matrix::trace_of_product(&self.mat, &self.mat).re
    }
}

/// Transpose the chosen subsystem's indices.
pub fn partial_transpose(rho: &DensityMatrix, part: Part, bip: Bipartition) -> Result<CMatrix> {
    bip.check(rho.dim())?;
    let (n, m) = (bip.dim_a, bip.dim_b);
    let src = rho.matrix();
    let mut out = CMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..m {
            for k in 0..n {
                for l in 0..m {
                    let (r, c) = match part {
                        Part::A => (k * m + j, i * m + l),
                        Part::B => (i * m + l, k * m + j),
                    };
                    out[(r, c)] = src[(i * m + j, k * m + l)];
                }
            }
        }
    }
    Ok(out)
}

/// Trace out the complement of `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: Part, bip: Bipartition) -> Result<DensityMatrix> {
    bip.check(rho.dim())?;
    let (n, m) = (bip.dim_a, bip.dim_b);
    let src = rho.matrix();
    let mat = match keep {
        Part::A => CMatrix::from_fn(n, n, |i, k| {
            (0..m).map(|j| src[(i * m + j, k * m + j)]).sum()
        }),
        Part::B => CMatrix::from_fn(m, m, |j, l| {
            (0..n).map(|i| src[(i * m + j, i * m + l)]).sum()
        }),
    };
    DensityMatrix::new(mat)
}
