//! Dense complex matrix primitives shared by every other module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Eigenvalues with magnitude below this are treated as zero.
pub const EIG_ZERO_TOL: f64 = 1e-12;

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Kronecker product a (x) b.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().sum()
}

/// Tr(a b) without forming the full product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = C_ZERO;
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    m.clone().singular_values().iter().sum()
}

/// Sum of singular values of a real matrix.
pub fn trace_norm_real(m: &DMatrix<f64>) -> f64 {
    m.clone().singular_values().iter().sum()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let sym = nalgebra::SymmetricEigen::new(m.clone());
    let mut ev: Vec<f64> = sym.eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Deterministic RNG for a (seed, stream index) pair. Parallel trials each take
/// their own stream so execution order never changes results.
pub fn rng_stream(seed: u64, index: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed ^ splitmix64(index.wrapping_add(1)))
}

fn ginibre(d: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) / f64::sqrt(2.0)
    })
}

/// Haar-distributed unitary: Ginibre matrix + QR with the R diagonal phase-fixed.
pub fn haar_unitary(d: usize, seed: u64) -> CMatrix {
    let mut rng = rng_stream(seed, 0);
    haar_unitary_with(d, &mut rng)
}

pub fn haar_unitary_with(d: usize, rng: &mut impl Rng) -> CMatrix {
    let g = ginibre(d, rng);
    let qr = g.qr();
    let r_diag = qr.r().diagonal();
    let mut q = qr.q();
    for j in 0..d {
        let r = r_diag[j];
        let phase = if r.norm() > 0.0 { r / r.norm() } else { C_ONE };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-random pure state vector.
pub fn haar_vector_with(d: usize, rng: &mut impl Rng) -> CVector {
    let mut v = CVector::from_fn(d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let n = v.norm();
    v /= Complex64::new(n, 0.0);
    v
}

pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}
