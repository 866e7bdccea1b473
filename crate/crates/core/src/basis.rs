//! Generator bases: generalized Gell-Mann matrices and rescaled Pauli strings.
//!
//! Both constructors use the Tr(G_i G_j) = 2 delta_ij normalization, matching
//! the single-qubit Pauli convention. The Gell-Mann ordering is frozen:
//! symmetric off-diagonal pairs (row-major by (j,k), j < k), then the
//! antisymmetric pairs in the same order, then the d-1 diagonal generators
//! by increasing rank.

use crate::error::{MbnError, Result};
use crate::matrix::{tensor, trace_of_product, CMatrix};
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct GeneratorBasis {
    dim: usize,
    generators: Vec<CMatrix>,
}

impl GeneratorBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn get(&self, i: usize) -> &CMatrix {
        &self.generators[i]
    }
}

/// Generalized Gell-Mann matrices for SU(d) in the canonical frozen order.
pub fn gell_mann_basis(d: usize) -> Result<GeneratorBasis> {
    if d < 2 {
        return Err(MbnError::InvalidDimension(format!(
            "gell_mann_basis requires d >= 2, got {d}"
        )));
    }
    let mut generators = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = Complex64::new(1.0, 0.0);
            m[(k, j)] = Complex64::new(1.0, 0.0);
            generators.push(m);
        }
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = Complex64::new(0.0, -1.0);
            m[(k, j)] = Complex64::new(0.0, 1.0);
            generators.push(m);
        }
    }
    for l in 1..d {
        let mut m = CMatrix::zeros(d, d);
        let scale = (2.0 / (l as f64 * (l as f64 + 1.0))).sqrt();
        for j in 0..l {
            m[(j, j)] = Complex64::new(scale, 0.0);
        }
        m[(l, l)] = Complex64::new(-(l as f64) * scale, 0.0);
        generators.push(m);
    }
    Ok(GeneratorBasis { dim: d, generators })
}

fn pauli(i: usize) -> CMatrix {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    match i {
        0 => CMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        1 => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        2 => CMatrix::from_row_slice(
            2,
            2,
            &[z, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), z],
        ),
        _ => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// The 4^k - 1 non-identity Pauli strings on k qubits, rescaled by
/// sqrt(2/2^k), in lexicographic order with I < X < Y < Z.
pub fn pauli_string_basis(k: usize) -> Result<GeneratorBasis> {
    if k < 1 {
        return Err(MbnError::InvalidDimension(format!(
            "pauli_string_basis requires k >= 1, got {k}"
        )));
    }
    let d = 1usize << k;
    let scale = Complex64::new((2.0 / d as f64).sqrt(), 0.0);
    let count = 4usize.pow(k as u32);
    let mut generators = Vec::with_capacity(count - 1);
    for code in 1..count {
        // base-4 digits, most significant = first qubit
        let mut m = CMatrix::identity(1, 1);
        for pos in (0..k).rev() {
            let digit = (code >> (2 * pos)) & 3;
            m = tensor(&m, &pauli(digit));
        }
        generators.push(m * scale);
    }
    Ok(GeneratorBasis { dim: d, generators })
}

/// Max deviation from the Tr(G_i G_j) = 2 delta_ij contract over all pairs.
pub fn orthogonality_defect(basis: &GeneratorBasis) -> f64 {
    let mut worst = 0.0f64;
    for (i, gi) in basis.generators().iter().enumerate() {
        for (j, gj) in basis.generators().iter().enumerate() {
            let t = trace_of_product(gi, gj);
            let expect = if i == j { 2.0 } else { 0.0 };
            worst = worst.max((t.re - expect).abs()).max(t.im.abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{hermiticity_defect, max_abs_diff, trace};

    #[test]
    fn d2_is_pauli_xyz() {
        let b = gell_mann_basis(2).unwrap();
        assert_eq!(b.len(), 3);
        assert!(max_abs_diff(b.get(0), &pauli(1)) < 1e-15);
        assert!(max_abs_diff(b.get(1), &pauli(2)) < 1e-15);
        assert!(max_abs_diff(b.get(2), &pauli(3)) < 1e-15);
    }

    #[test]
    fn gell_mann_counts_and_orthogonality() {
        for d in 2..=4 {
            let b = gell_mann_basis(d).unwrap();
            assert_eq!(b.len(), d * d - 1);
            assert!(orthogonality_defect(&b) < 1e-10);
            for g in b.generators() {
                assert!(hermiticity_defect(g) < 1e-12);
                assert!(trace(g).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_d_below_2() {
        assert!(gell_mann_basis(1).is_err());
        assert!(pauli_string_basis(0).is_err());
    }

    #[test]
    fn pauli_strings_k1_equal_gell_mann_d2() {
        let p = pauli_string_basis(1).unwrap();
        let g = gell_mann_basis(2).unwrap();
        for (a, b) in p.generators().iter().zip(g.generators()) {
            assert!(max_abs_diff(a, b) < 1e-15);
        }
    }

    #[test]
    fn pauli_strings_k2() {
        let b = pauli_string_basis(2).unwrap();
        assert_eq!(b.len(), 15);
        // first operator in lexicographic order is I (x) X, scaled by sqrt(1/2)
        let expect = tensor(&pauli(0), &pauli(1)) * Complex64::new(0.5f64.sqrt(), 0.0);
        assert!(max_abs_diff(b.get(0), &expect) < 1e-15);
        assert!(orthogonality_defect(&b) < 1e-10);
    }

    #[test]
    fn pauli_strings_k3_orthogonality() {
        let b = pauli_string_basis(3).unwrap();
        assert_eq!(b.len(), 63);
        assert!(orthogonality_defect(&b) < 1e-10);
    }
}
