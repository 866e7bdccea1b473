//! Bloch decomposition, the modified Bloch matrix family, the IBM separability
//! criterion, the MBN measure, and negativity.

use crate::basis::{gell_mann_basis, GeneratorBasis};
use crate::error::{MbnError, Result};
use crate::matrix::{identity, tensor, trace_norm_real, trace_of_product, EIG_ZERO_TOL};
use crate::state::{partial_transpose, Bipartition, DensityMatrix, Part};
use nalgebra::{DMatrix, DVector};
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::Mutex;

/// Local Bloch vectors and correlation matrix of a bipartite state.
#[derive(Debug, Clone)]
pub struct BlochDecomposition {
    pub bip: Bipartition,
    pub r: DVector<f64>,
    pub s: DVector<f64>,
    pub t: DMatrix<f64>,
}

/// The (m, a, b) triple parameterizing the modified Bloch matrix family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IbmParams {
    pub m: usize,
    pub a: f64,
    pub b: f64,
}

impl IbmParams {
    pub fn new(m: usize, a: f64, b: f64) -> Result<Self> {
        if m < 1 {
            return Err(MbnError::DomainError(format!("m must be >= 1, got {m}")));
        }
        if a < 0.0 || b < 0.0 {
            return Err(MbnError::DomainError(format!(
                "a, b must be >= 0, got a={a}, b={b}"
            )));
        }
        Ok(Self { m, a, b })
    }

    /// m = 4, a = sqrt(2/(M(M-1))), b = sqrt(2/(N(N-1))).
    pub fn defaults(bip: Bipartition) -> Self {
        let n = bip.dim_a as f64;
        let m = bip.dim_b as f64;
        Self {
            m: 4,
            a: (2.0 / (m * (m - 1.0))).sqrt(),
            b: (2.0 / (n * (n - 1.0))).sqrt(),
        }
    }

    pub const CM: Self = Self { m: 1, a: 0.0, b: 0.0 };
    pub const GCM: Self = Self { m: 1, a: 1.0, b: 1.0 };
}

#[derive(Debug, Clone)]
pub struct ModifiedBlochMatrix {
    pub matrix: DMatrix<f64>,
    pub params: IbmParams,
    pub bip: Bipartition,
}

/// r_i = (N/2) Tr(rho (G_i (x) 1)), s_j = (M/2) Tr(rho (1 (x) G_j)),
/// t_ij = (NM/4) Tr(rho (G_i (x) G_j)).
pub fn decompose(
    rho: &DensityMatrix,
    bip: Bipartition,
    basis_a: &GeneratorBasis,
    basis_b: &GeneratorBasis,
) -> Result<BlochDecomposition> {
    bip.check(rho.dim())?;
    if basis_a.dim() != bip.dim_a || basis_b.dim() != bip.dim_b {
        return Err(MbnError::InvalidDimension(format!(
            "basis dims {}|{} do not match bipartition {}|{}",
            basis_a.dim(),
            basis_b.dim(),
            bip.dim_a,
            bip.dim_b
        )));
    }
    let (n, m) = (bip.dim_a as f64, bip.dim_b as f64);
    let im_tol = 1e-10;
    let real = |z: num_complex::Complex64| -> Result<f64> {
        if z.im.abs() > im_tol {
            return Err(MbnError::NotHermitian(z.im.abs()));
        }
        Ok(z.re)
    };

    let ib = identity(bip.dim_b);
    let ia = identity(bip.dim_a);
    let mut r = DVector::zeros(basis_a.len());
    for (i, g) in basis_a.generators().iter().enumerate() {
        r[i] = real(trace_of_product(rho.matrix(), &tensor(g, &ib)))? * n / 2.0;
    }
    let mut s = DVector::zeros(basis_b.len());
    for (j, g) in basis_b.generators().iter().enumerate() {
        s[j] = real(trace_of_product(rho.matrix(), &tensor(&ia, g)))? * m / 2.0;
    }
    let mut t = DMatrix::zeros(basis_a.len(), basis_b.len());
    for (i, ga) in basis_a.generators().iter().enumerate() {
        for (j, gb) in basis_b.generators().iter().enumerate() {
            t[(i, j)] = real(trace_of_product(rho.matrix(), &tensor(ga, gb)))? * n * m / 4.0;
        }
    }
    Ok(BlochDecomposition { bip, r, s, t })
}

/// Prepend m scaled copies of the first row and column of the Bloch matrix.
pub fn modified_bloch(dec: &BlochDecomposition, p: IbmParams) -> ModifiedBlochMatrix {
    let (na, nb) = (dec.r.len(), dec.s.len());
    let m = p.m;
    let mut s = DMatrix::zeros(m + na, m + nb);
    for i in 0..m {
        for j in 0..m {
            s[(i, j)] = p.a * p.b;
        }
    }
    for i in 0..m {
        for j in 0..nb {
            s[(i, m + j)] = p.b * dec.s[j];
        }
    }
    for j in 0..m {
        for i in 0..na {
            s[(m + i, j)] = p.a * dec.r[i];
        }
    }
    for i in 0..na {
        for j in 0..nb {
            s[(m + i, m + j)] = dec.t[(i, j)];
        }
    }
    ModifiedBlochMatrix {
        matrix: s,
        params: p,
        bip: dec.bip,
    }
}

/// Separability threshold c.
///
/// Derived from the rank-one factorization S = [b 1_m; r][a 1_m; s]^T of a
/// product state: c = sqrt(m b^2 + (N^2-N)/2) * sqrt(m a^2 + (M^2-M)/2).
/// This pairing (b with N, a with M) makes the pure-product saturation
/// identity exact for all N, M, and coincides with the symmetric closed form
/// whenever a = b or N = M.
pub fn ibm_threshold(p: IbmParams, bip: Bipartition) -> f64 {
    let n = bip.dim_a as f64;
    let m = bip.dim_b as f64;
    let left = p.m as f64 * p.b * p.b + (n * n - n) / 2.0;
    let right = p.m as f64 * p.a * p.a + (m * m - m) / 2.0;
    left.sqrt() * right.sqrt()
}

/// |S_{m,a,b}|_tr - c. Negative for undetected (e.g. separable) states.
pub fn violation(rho: &DensityMatrix, bip: Bipartition, p: IbmParams) -> Result<f64> {
    let basis_a = gell_mann_basis(bip.dim_a)?;
    let basis_b = gell_mann_basis(bip.dim_b)?;
    let dec = decompose(rho, bip, &basis_a, &basis_b)?;
    let s = modified_bloch(&dec, p);
    Ok(trace_norm_real(&s.matrix) - ibm_threshold(p, bip))
}

// Normalizer cache: V(rho_m) per (bipartition, params). Pure function, so
// recomputation always yields the same value.
static NORMALIZER_CACHE: Lazy<Mutex<HashMap<(usize, usize, usize, u64, u64), f64>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn max_entangled_violation(bip: Bipartition, p: IbmParams) -> Result<f64> {
    let key = (
        bip.dim_a,
        bip.dim_b,
        p.m,
        p.a.to_bits(),
        p.b.to_bits(),
    );
    if let Some(&v) = NORMALIZER_CACHE.lock().unwrap().get(&key) {
        return Ok(v);
    }
    let rho_m = crate::catalog::max_entangled(bip)?;
    let v = violation(rho_m.rho(), bip, p)?;
    if v <= 0.0 {
        return Err(MbnError::Internal(format!(
            "normalizer V(rho_m) = {v} is not positive"
        )));
    }
    NORMALIZER_CACHE.lock().unwrap().insert(key, v);
    Ok(v)
}

/// MBN(rho) = max(0, V_rho) / V(rho_m).
pub fn mbn(rho: &DensityMatrix, bip: Bipartition, p: IbmParams) -> Result<f64> {
    let v = violation(rho, bip, p)?;
    let norm = max_entangled_violation(bip, p)?;
    Ok(v.max(0.0) / norm)
}

/// MBN with the paper's default parameters for the given bipartition.
pub fn mbn_default(rho: &DensityMatrix, bip: Bipartition) -> Result<f64> {
    mbn(rho, bip, IbmParams::defaults(bip))
}

/// Magnitude of the sum of negative eigenvalues of the partial transpose
/// over subsystem B.
pub fn negativity(rho: &DensityMatrix, bip: Bipartition) -> Result<f64> {
    let pt = partial_transpose(rho, Part::B, bip)?;
    let ev = crate::matrix::hermitian_eigenvalues(&pt);
    Ok(-ev
        .iter()
        .filter(|&&e| e < -EIG_ZERO_TOL)
        .sum::<f64>())
}

/// CM criterion violation: (m, a, b) = (1, 0, 0).
pub fn cm_value(rho: &DensityMatrix, bip: Bipartition) -> Result<f64> {
    violation(rho, bip, IbmParams::CM)
}

/// GCM criterion violation: (m, a, b) = (1, 1, 1).
pub fn gcm_value(rho: &DensityMatrix, bip: Bipartition) -> Result<f64> {
    violation(rho, bip, IbmParams::GCM)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::matrix::max_abs_diff;

    fn bell() -> DensityMatrix {
        catalog::max_entangled(Bipartition::new(2, 2).unwrap())
            .unwrap()
            .rho()
            .clone()
    }

    #[test]
    fn maximally_mixed_decomposition_is_zero() {
        let bip = Bipartition::new(2, 2).unwrap();
        let rho = DensityMatrix::new(identity(4) * num_complex::Complex64::new(0.25, 0.0)).unwrap();
        let ba = gell_mann_basis(2).unwrap();
        let dec = decompose(&rho, bip, &ba, &ba).unwrap();
        assert!(dec.r.amax() < 1e-12);
        assert!(dec.s.amax() < 1e-12);
        assert!(dec.t.amax() < 1e-12);
    }

    #[test]
    fn bell_correlation_matrix() {
        let bip = Bipartition::new(2, 2).unwrap();
        let ba = gell_mann_basis(2).unwrap();
        let dec = decompose(&bell(), bip, &ba, &ba).unwrap();
        assert!(dec.r.amax() < 1e-12);
        assert!(dec.s.amax() < 1e-12);
        let expect = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0, 1.0]));
        assert!((&dec.t - expect).amax() < 1e-10);
    }

    #[test]
    fn product_state_correlation_factorizes() {
        let mut rng = crate::matrix::rng_stream(31, 0);
        let bip = Bipartition::new(2, 3).unwrap();
        let a = crate::matrix::projector(&crate::matrix::haar_vector_with(2, &mut rng));
        let b = crate::matrix::projector(&crate::matrix::haar_vector_with(3, &mut rng));
        let rho = DensityMatrix::new(tensor(&a, &b)).unwrap();
        let dec = decompose(
            &rho,
            bip,
            &gell_mann_basis(2).unwrap(),
            &gell_mann_basis(3).unwrap(),
        )
        .unwrap();
        let outer = &dec.r * dec.s.transpose();
        assert!((&dec.t - outer).amax() < 1e-10);
    }

    #[test]
    fn reconstruction_identity() {
        // (1/NM)(1 + sum r_i G_i (x) 1 + sum s_j 1 (x) G_j + sum t_ij G_i (x) G_j) == rho
        let mut rng = crate::matrix::rng_stream(77, 0);
        let bip = Bipartition::new(2, 3).unwrap();
        let rho =
            DensityMatrix::new(crate::matrix::projector(&crate::matrix::haar_vector_with(
                6, &mut rng,
            )))
            .unwrap();
        let ba = gell_mann_basis(2).unwrap();
        let bb = gell_mann_basis(3).unwrap();
        let dec = decompose(&rho, bip, &ba, &bb).unwrap();
        let mut rec = identity(6);
        for (i, g) in ba.generators().iter().enumerate() {
            rec += tensor(g, &identity(3)) * num_complex::Complex64::new(dec.r[i], 0.0);
        }
        for (j, g) in bb.generators().iter().enumerate() {
            rec += tensor(&identity(2), g) * num_complex::Complex64::new(dec.s[j], 0.0);
        }
        for (i, ga) in ba.generators().iter().enumerate() {
            for (j, gb) in bb.generators().iter().enumerate() {
                rec += tensor(ga, gb) * num_complex::Complex64::new(dec.t[(i, j)], 0.0);
            }
        }
        rec /= num_complex::Complex64::new(6.0, 0.0);
        assert!(max_abs_diff(&rec, rho.matrix()) < 1e-10);
    }

    #[test]
    fn modified_bloch_block_layout() {
        let bip = Bipartition::new(3, 3).unwrap();
        let ba = gell_mann_basis(3).unwrap();
        let rho = catalog::max_entangled(bip).unwrap();
        let dec = decompose(rho.rho(), bip, &ba, &ba).unwrap();
        let p = IbmParams::new(4, 0.3, 0.7).unwrap();
        let s = modified_bloch(&dec, p);
        assert_eq!(s.matrix.nrows(), 12);
        assert_eq!(s.matrix.ncols(), 12);
        for i in 0..4 {
            for j in 0..4 {
                assert!((s.matrix[(i, j)] - 0.21).abs() < 1e-12);
            }
        }
        for i in 0..4 {
            for j in 0..8 {
                assert!((s.matrix[(i, 4 + j)] - 0.7 * dec.s[j]).abs() < 1e-12);
            }
        }
        for j in 0..4 {
            for i in 0..8 {
                assert!((s.matrix[(4 + i, j)] - 0.3 * dec.r[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gcm_matrix_is_unscaled_bloch_matrix() {
        let bip = Bipartition::new(2, 2).unwrap();
        let ba = gell_mann_basis(2).unwrap();
        let dec = decompose(&bell(), bip, &ba, &ba).unwrap();
        let s = modified_bloch(&dec, IbmParams::GCM);
        assert_eq!(s.matrix.nrows(), 4);
        assert!((s.matrix[(0, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn threshold_values() {
        let b22 = Bipartition::new(2, 2).unwrap();
        assert!((ibm_threshold(IbmParams::new(3, 0.0, 0.0).unwrap(), b22) - 1.0).abs() < 1e-12);
        assert!((ibm_threshold(IbmParams::GCM, b22) - 2.0).abs() < 1e-12);
        let b33 = Bipartition::new(3, 3).unwrap();
        let defaults = IbmParams::defaults(b33);
        assert_eq!(defaults.m, 4);
        assert!((defaults.a - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
        // for N = M both pairings agree: c = (4/3 + 3) = 13/3
        assert!((ibm_threshold(defaults, b33) - 13.0 / 3.0).abs() < 1e-12);
        // symmetric printed closed form as an independent check
        let printed = 0.5
            * ((2.0 * 4.0 * defaults.a * defaults.a + 6.0)
                * (2.0 * 4.0 * defaults.b * defaults.b + 6.0))
                .sqrt();
        assert!((ibm_threshold(defaults, b33) - printed).abs() < 1e-12);
    }

    #[test]
    fn bell_cm_violation_is_two() {
        let bip = Bipartition::new(2, 2).unwrap();
        assert!((cm_value(&bell(), bip).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn maximally_mixed_has_no_violation() {
        let bip = Bipartition::new(2, 2).unwrap();
        let rho = DensityMatrix::new(identity(4) * num_complex::Complex64::new(0.25, 0.0)).unwrap();
        assert!(violation(&rho, bip, IbmParams::defaults(bip)).unwrap() <= 0.0);
        assert!(cm_value(&rho, bip).unwrap() <= 0.0);
        assert!(gcm_value(&rho, bip).unwrap() <= 0.0);
        assert_eq!(mbn_default(&rho, bip).unwrap(), 0.0);
    }

    #[test]
    fn pure_product_saturates_threshold() {
        let mut rng = crate::matrix::rng_stream(4, 0);
        for (n, m) in [(2, 2), (2, 3), (3, 3)] {
            let bip = Bipartition::new(n, m).unwrap();
            for _ in 0..20 {
                let a = crate::matrix::projector(&crate::matrix::haar_vector_with(n, &mut rng));
                let b = crate::matrix::projector(&crate::matrix::haar_vector_with(m, &mut rng));
                let rho = DensityMatrix::new(tensor(&a, &b)).unwrap();
                let v = violation(&rho, bip, IbmParams::defaults(bip)).unwrap();
                assert!(v.abs() < 1e-8, "{n}|{m}: violation {v}");
            }
        }
    }

    #[test]
    fn bell_mbn_is_one_and_negativity_half() {
        let bip = Bipartition::new(2, 2).unwrap();
        assert!((mbn_default(&bell(), bip).unwrap() - 1.0).abs() < 1e-10);
        assert!((negativity(&bell(), bip).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn max_entangled_normalizes_to_one() {
        for (n, m) in [(2, 2), (3, 3), (2, 4)] {
            let bip = Bipartition::new(n, m).unwrap();
            let rho = catalog::max_entangled(bip).unwrap();
            assert!((mbn_default(rho.rho(), bip).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn product_state_negativity_is_zero() {
        let mut rng = crate::matrix::rng_stream(12, 0);
        let bip = Bipartition::new(2, 2).unwrap();
        let a = crate::matrix::projector(&crate::matrix::haar_vector_with(2, &mut rng));
        let b = crate::matrix::projector(&crate::matrix::haar_vector_with(2, &mut rng));
        let rho = DensityMatrix::new(tensor(&a, &b)).unwrap();
        assert!(negativity(&rho, bip).unwrap() < 1e-12);
        // pure products sit exactly on the saturation boundary, so the
        // clamped violation can round either way
        assert!(mbn_default(&rho, bip).unwrap() < 1e-12);
    }

    #[test]
    fn gcm_matches_explicit_params() {
        let bip = Bipartition::new(2, 2).unwrap();
        let v1 = gcm_value(&bell(), bip).unwrap();
        let v2 = violation(&bell(), bip, IbmParams::new(1, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!(v1, v2);
    }
}
