//! On-disk JSON representation of a bipartite state:
//! `{dim, bipartition: [N, M], matrix: rows of [re, im] pairs}`.

use crate::catalog::CatalogState;
use crate::error::{MbnError, Result};
use crate::matrix::CMatrix;
use crate::state::{Bipartition, DensityMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub dim: usize,
    pub bipartition: [usize; 2],
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_state(st: &CatalogState) -> Self {
        Self::from_parts(st.rho(), st.bip())
    }

    pub fn from_parts(rho: &DensityMatrix, bip: Bipartition) -> Self {
        let d = rho.dim();
        let matrix = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let z = rho.matrix()[(i, j)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        Self {
            dim: d,
            bipartition: [bip.dim_a, bip.dim_b],
            matrix,
        }
    }

    /// Validate and convert; `quasi` relaxes the PSD check for reconstructed
    /// states with negative eigenvalues.
    pub fn to_state(&self, quasi: bool) -> Result<(DensityMatrix, Bipartition)> {
        let bip = Bipartition::new(self.bipartition[0], self.bipartition[1])?;
        if bip.total_dim() != self.dim {
            return Err(MbnError::InvalidBipartition {
                expected: self.dim,
                actual: bip.total_dim(),
            });
        }
        if self.matrix.len() != self.dim || self.matrix.iter().any(|r| r.len() != self.dim) {
            return Err(MbnError::InvalidDimension(format!(
                "matrix is not {0}x{0}",
                self.dim
            )));
        }
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, &[re, im]) in row.iter().enumerate() {
                m[(i, j)] = Complex64::new(re, im);
            }
        }
        let rho = if quasi {
            DensityMatrix::new_quasi(m)?
        } else {
            DensityMatrix::new(m)?
        };
        Ok((rho, bip))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MbnError::DomainError(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| MbnError::DomainError(format!("cannot parse {}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| MbnError::Internal(e.to_string()))?;
        std::fs::write(path, text)
            .map_err(|e| MbnError::DomainError(format!("cannot write {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::matrix::max_abs_diff;

    #[test]
    fn roundtrip_preserves_matrix() {
        let st = catalog::horodecki_qutrit(3.5).unwrap();
        let sf = StateFile::from_state(&st);
        let json = serde_json::to_string(&sf).unwrap();
        let back: StateFile = serde_json::from_str(&json).unwrap();
        let (rho, bip) = back.to_state(false).unwrap();
        assert_eq!(bip, st.bip());
        assert!(max_abs_diff(rho.matrix(), st.rho().matrix()) < 1e-15);
    }

    #[test]
    fn bad_bipartition_rejected() {
        let st = catalog::me_state(2).unwrap();
        let mut sf = StateFile::from_state(&st);
        sf.bipartition = [2, 3];
        assert!(sf.to_state(false).is_err());
    }

    #[test]
    fn ragged_matrix_rejected() {
        let st = catalog::me_state(2).unwrap();
        let mut sf = StateFile::from_state(&st);
        sf.matrix[2].pop();
        assert!(sf.to_state(false).is_err());
    }

    #[test]
    fn quasi_flag_admits_negative_eigenvalues() {
        let st = catalog::me_state(2).unwrap();
        let mut sf = StateFile::from_state(&st);
        // push an off-diagonal past what positivity allows
        sf.matrix[0][3] = [0.6, 0.0];
        sf.matrix[3][0] = [0.6, 0.0];
        assert!(sf.to_state(false).is_err());
        assert!(sf.to_state(true).is_ok());
    }
}
