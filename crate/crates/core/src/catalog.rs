//! Constructors for every state used in the experiments, plus random-state
//! generators for the property suites.

use crate::basis::pauli_string_basis;
use crate::error::{MbnError, Result};
use crate::matrix::{
    haar_unitary_with, haar_vector_with, identity, projector, rng_stream, tensor, CMatrix,
    CVector, C_ONE,
};
use crate::state::{Bipartition, DensityMatrix};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Dirichlet, Distribution};

/// A labeled state together with its bipartition and build parameters.
#[derive(Debug, Clone)]
pub struct CatalogState {
    label: String,
    rho: DensityMatrix,
    bip: Bipartition,
    params: Vec<(String, f64)>,
}

impl CatalogState {
    pub fn new(
        label: impl Into<String>,
        rho: DensityMatrix,
        bip: Bipartition,
        params: Vec<(String, f64)>,
    ) -> Self {
        Self {
            label: label.into(),
            rho,
            bip,
            params,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn bip(&self) -> Bipartition {
        self.bip
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }
}

fn basis_ket(dim: usize, idx: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[idx] = C_ONE;
    v
}

/// |psi> = (1/sqrt(d)) sum_{i<d} |i,i>, d = min(N, M).
pub fn max_entangled(bip: Bipartition) -> Result<CatalogState> {
    let d = bip.dim_a.min(bip.dim_b);
    let mut v = CVector::zeros(bip.total_dim());
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        v[i * bip.dim_b + i] = amp;
    }
    Ok(CatalogState::new(
        format!("max_entangled_{}x{}", bip.dim_a, bip.dim_b),
        DensityMatrix::new(projector(&v))?,
        bip,
        vec![],
    ))
}

/// The two-qutrit family rho(alpha) = (2/7)|psi+><psi+| + (alpha/7) sigma+
/// + ((5-alpha)/7) sigma-, alpha in [2, 5].
pub fn horodecki_qutrit(alpha: f64) -> Result<CatalogState> {
    if !(2.0..=5.0).contains(&alpha) {
        return Err(MbnError::DomainError(format!(
            "horodecki_qutrit requires alpha in [2, 5], got {alpha}"
        )));
    }
    let bip = Bipartition::new(3, 3)?;
    let mut psi = CVector::zeros(9);
    let amp = Complex64::new(1.0 / 3.0f64.sqrt(), 0.0);
    psi[0] = amp; // |00>
    psi[4] = amp; // |11>
    psi[8] = amp; // |22>
    let proj = |i: usize, j: usize| projector(&basis_ket(9, 3 * i + j));
    let sigma_p = (proj(0, 1) + proj(1, 2) + proj(2, 0)) / Complex64::new(3.0, 0.0);
    let sigma_m = (proj(1, 0) + proj(2, 1) + proj(0, 2)) / Complex64::new(3.0, 0.0);
    let rho = projector(&psi) * Complex64::new(2.0 / 7.0, 0.0)
        + sigma_p * Complex64::new(alpha / 7.0, 0.0)
        + sigma_m * Complex64::new((5.0 - alpha) / 7.0, 0.0);
    Ok(CatalogState::new(
        "horodecki_qutrit",
        DensityMatrix::new(rho)?,
        bip,
        vec![("alpha".into(), alpha)],
    ))
}

/// p * rho + (1 - p) * 1/d.
pub fn mix_with_identity(st: &CatalogState, p: f64) -> Result<CatalogState> {
    if !(0.0..=1.0).contains(&p) {
        return Err(MbnError::DomainError(format!(
            "mixing parameter must be in [0, 1], got {p}"
        )));
    }
    let d = st.rho.dim();
    let mixed = st.rho.matrix() * Complex64::new(p, 0.0)
        + identity(d) * Complex64::new((1.0 - p) / d as f64, 0.0);
    let mut params = st.params.clone();
    params.push(("p".into(), p));
    Ok(CatalogState::new(
        format!("{}_mixed", st.label),
        DensityMatrix::new(mixed)?,
        st.bip,
        params,
    ))
}

/// The metrology-useful 4-qubit bound entangled state: a convex combination of
/// six pure states over two ququarts, PPT across the 4|4 cut.
///
/// The last two vectors are
/// (|03> + |12> + sqrt(2)|21>)/2 and (-|03> + |12> + sqrt(2)|30>)/2;
/// these are the unique unit vectors on the printed supports and signs for
/// which the mixture is PPT (the flat printed amplitudes are not normalizable
/// and break positivity of the partial transpose).
pub fn toth_4qubit() -> Result<CatalogState> {
    let bip = Bipartition::new(4, 4)?;
    let ket = |a: usize, b: usize| basis_ket(16, 4 * a + b);
    let inv_sqrt2 = Complex64::new(1.0 / 2.0f64.sqrt(), 0.0);
    let half = Complex64::new(0.5, 0.0);
    let sqrt2_half = Complex64::new(2.0f64.sqrt() / 2.0, 0.0);
    let vectors = [
        (ket(0, 1) + ket(2, 3)) * inv_sqrt2,
        (ket(1, 0) + ket(3, 2)) * inv_sqrt2,
        (ket(1, 1) + ket(2, 2)) * inv_sqrt2,
        (ket(0, 0) - ket(3, 3)) * inv_sqrt2,
        ket(0, 3) * half + ket(1, 2) * half + ket(2, 1) * sqrt2_half,
        -ket(0, 3) * half + ket(1, 2) * half + ket(3, 0) * sqrt2_half,
    ];
    let q = (2.0f64.sqrt() - 1.0) / 2.0;
    let p = (1.0 - 2.0 * q) / 4.0;
    let mut rho = CMatrix::zeros(16, 16);
    for (i, v) in vectors.iter().enumerate() {
        let w = if i < 4 { p } else { q };
        rho += projector(v) * Complex64::new(w, 0.0);
    }
    Ok(CatalogState::new(
        "toth_4qubit",
        DensityMatrix::new(rho)?,
        bip,
        vec![("p".into(), p), ("q".into(), q)],
    ))
}

/// The printed coefficients are rounded to six figures and put the state right
/// on the PSD boundary; allow that much slack when validating.
const BD_PSD_FLOOR: f64 = -5e-8;

/// The Bloch-diagonal 4-qubit bound entangled state.
///
/// The correlation basis is the 15 two-qubit Pauli strings in lexicographic
/// order (I < X < Y < Z). The printed coefficients multiply orthonormal
/// generators (Tr lambda^2 = 1, i.e. Pauli string / 2); under the crate's
/// Tr(G_i G_j) = 2 delta_ij convention that means t_ii/2 on each G_i (x) G_i.
/// This is the only reading under which the state is a PSD, PPT, IBM-violating
/// density matrix; the SU(4) Gell-Mann orderings all fail positivity.
pub fn bloch_diagonal_bd() -> Result<CatalogState> {
    let bip = Bipartition::new(4, 4)?;
    let basis = pauli_string_basis(2)?;
    let mut rho = identity(16) / Complex64::new(16.0, 0.0);
    for (i, g) in basis.generators().iter().enumerate() {
        let t = match i + 1 {
            1 | 2 | 3 | 4 | 5 | 8 | 11 | 13 | 15 => -0.0557066,
            6 | 10 | 12 => 0.0142664,
            _ => 0.0971467, // 7, 9, 14
        };
        rho += tensor(g, g) * Complex64::new(t / 2.0, 0.0);
    }
    let dm = DensityMatrix::with_psd_floor(rho, BD_PSD_FLOOR).map_err(|e| match e {
        MbnError::NotPositive(min_eig) => MbnError::OrderingMismatch(min_eig),
        other => other,
    })?;
    Ok(CatalogState::new("bloch_diagonal_bd", dm, bip, vec![]))
}

/// The maximal-entanglement reference states on k qubits, split first qubit
/// versus the rest.
pub fn me_state(k: usize) -> Result<CatalogState> {
    let bip = Bipartition::new(2, 1 << (k - 1).min(62))?;
    let v = match k {
        2 => {
            let mut v = CVector::zeros(4);
            let amp = Complex64::new(1.0 / 2.0f64.sqrt(), 0.0);
            v[0b00] = amp;
            v[0b11] = amp;
            v
        }
        3 => {
            let mut v = CVector::zeros(8);
            let amp = Complex64::new(1.0 / 2.0f64.sqrt(), 0.0);
            v[0b000] = amp;
            v[0b111] = amp;
            v
        }
        4 => {
            let mut v = CVector::zeros(16);
            let half = Complex64::new(0.5, 0.0);
            v[0b0000] = half;
            v[0b1100] = half;
            v[0b0011] = half;
            v[0b1111] = -half;
            v
        }
        _ => {
            return Err(MbnError::DomainError(format!(
                "me_state supports k in {{2, 3, 4}}, got {k}"
            )))
        }
    };
    Ok(CatalogState::new(
        format!("me{k}"),
        DensityMatrix::new(projector(&v))?,
        bip,
        vec![("qubits".into(), k as f64)],
    ))
}

/// Haar-random pure state on N * M.
pub fn random_pure(bip: Bipartition, seed: u64) -> Result<CatalogState> {
    let mut rng = rng_stream(seed, 0);
    random_pure_with(bip, &mut rng)
}

pub fn random_pure_with(bip: Bipartition, rng: &mut impl Rng) -> Result<CatalogState> {
    let v = haar_vector_with(bip.total_dim(), rng);
    Ok(CatalogState::new(
        "random_pure",
        DensityMatrix::new(projector(&v))?,
        bip,
        vec![],
    ))
}

/// Product of independent Haar-random pure locals.
pub fn random_product(bip: Bipartition, seed: u64) -> Result<CatalogState> {
    let mut rng = rng_stream(seed, 0);
    random_product_with(bip, &mut rng)
}

pub fn random_product_with(bip: Bipartition, rng: &mut impl Rng) -> Result<CatalogState> {
    let a = projector(&haar_vector_with(bip.dim_a, rng));
    let b = projector(&haar_vector_with(bip.dim_b, rng));
    Ok(CatalogState::new(
        "random_product",
        DensityMatrix::new(tensor(&a, &b))?,
        bip,
        vec![],
    ))
}

/// Mixture of up to 10 Haar-random pures with Dirichlet-uniform weights.
pub fn random_mixed(bip: Bipartition, seed: u64) -> Result<CatalogState> {
    let mut rng = rng_stream(seed, 0);
    random_mixed_with(bip, &mut rng)
}

pub fn random_mixed_with(bip: Bipartition, rng: &mut impl Rng) -> Result<CatalogState> {
    let k = rng.gen_range(2..=10usize);
    let weights = Dirichlet::new(&vec![1.0; k]).unwrap().sample(rng);
    let d = bip.total_dim();
    let mut rho = CMatrix::zeros(d, d);
    for w in weights {
        rho += projector(&haar_vector_with(d, rng)) * Complex64::new(w, 0.0);
    }
    Ok(CatalogState::new(
        "random_mixed",
        DensityMatrix::new(rho)?,
        bip,
        vec![],
    ))
}

/// Mixture of up to `max_terms` random product states: separable by construction.
pub fn random_separable_with(
    bip: Bipartition,
    max_terms: usize,
    rng: &mut impl Rng,
) -> Result<CatalogState> {
    let k = rng.gen_range(2..=max_terms.max(2));
    let weights = Dirichlet::new(&vec![1.0; k]).unwrap().sample(rng);
    let d = bip.total_dim();
    let mut rho = CMatrix::zeros(d, d);
    for w in weights {
        let a = projector(&haar_vector_with(bip.dim_a, rng));
        let b = projector(&haar_vector_with(bip.dim_b, rng));
        rho += tensor(&a, &b) * Complex64::new(w, 0.0);
    }
    Ok(CatalogState::new(
        "random_separable",
        DensityMatrix::new(rho)?,
        bip,
        vec![],
    ))
}

/// Independent Haar single-qubit unitaries applied to every qubit of a pure
/// qubit-system state, one sample per orbit member.
pub fn lu_orbit(st: &CatalogState, count: usize, seed: u64) -> Result<Vec<CatalogState>> {
    let dim = st.rho.dim();
    if !dim.is_power_of_two() {
        return Err(MbnError::InvalidDimension(format!(
            "lu_orbit requires a qubit system, got dim {dim}"
        )));
    }
    if (st.rho.purity() - 1.0).abs() > 1e-8 {
        return Err(MbnError::DomainError(
            "lu_orbit requires a pure state".into(),
        ));
    }
    let qubits = dim.trailing_zeros() as usize;
    let mut orbit = Vec::with_capacity(count);
    for idx in 0..count {
        let mut rng = rng_stream(seed, idx as u64);
        let mut u = CMatrix::identity(1, 1);
        for _ in 0..qubits {
            u = tensor(&u, &haar_unitary_with(2, &mut rng));
        }
        let rho = &u * st.rho.matrix() * u.adjoint();
        orbit.push(CatalogState::new(
            format!("{}_lu{idx}", st.label),
            DensityMatrix::new(rho)?,
            st.bip,
            st.params.clone(),
        ));
    }
    Ok(orbit)
}
