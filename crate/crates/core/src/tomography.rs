//! Finite-shot state estimation by linear inversion, and the error-distribution
//! experiment comparing entanglement measures on the reconstructed states.

use crate::basis::{pauli_string_basis, GeneratorBasis};
use crate::dynamics::Measure;
use crate::error::{MbnError, Result};
use crate::matrix::{
    haar_unitary_with, hermiticity_defect, identity, rng_stream, tensor, CMatrix,
};
use crate::state::DensityMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use std::io::Write;

/// Eigenvalue groups of a Hermitian observable: (eigenvalue, projector).
struct ObservableEig {
    groups: Vec<(f64, CMatrix)>,
}

fn eigendecompose_grouped(obs: &CMatrix) -> Result<ObservableEig> {
    let defect = hermiticity_defect(obs);
    if defect > 1e-10 {
        return Err(MbnError::NotHermitian(defect));
    }
    let sym = nalgebra::SymmetricEigen::new(obs.clone());
    let d = obs.nrows();
    let mut groups: Vec<(f64, CMatrix)> = Vec::new();
    for k in 0..d {
        let ev = sym.eigenvalues[k];
        let v = sym.eigenvectors.column(k);
        let proj = &v * v.adjoint();
        match groups.iter_mut().find(|(e, _)| (*e - ev).abs() < 1e-9) {
            Some((_, p)) => *p += proj,
            None => groups.push((ev, proj)),
        }
    }
    Ok(ObservableEig { groups })
}

fn born_probabilities(eig: &ObservableEig, rho: &DensityMatrix) -> Vec<f64> {
    let mut probs: Vec<f64> = eig
        .groups
        .iter()
        .map(|(_, p)| crate::matrix::trace_of_product(p, rho.matrix()).re.max(0.0))
        .collect();
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    probs
}

fn multinomial(shots: u64, probs: &[f64], rng: &mut impl Rng) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = shots;
    let mut rest: f64 = 1.0;
    for (i, &p) in probs.iter().enumerate() {
        if i + 1 == probs.len() {
            counts[i] = remaining;
            break;
        }
        if remaining == 0 {
            break;
        }
        let cond = (p / rest).clamp(0.0, 1.0);
        let c = Binomial::new(remaining, cond).unwrap().sample(rng);
        counts[i] = c;
        remaining -= c;
        rest -= p;
        if rest <= 0.0 {
            break;
        }
    }
    counts
}

/// Estimate Tr(rho obs) from one multinomial sample of `shots` projective
/// measurements in the observable's eigenbasis.
pub fn simulate_expectation(
    rho: &DensityMatrix,
    obs: &CMatrix,
    shots: u64,
    seed: u64,
) -> Result<f64> {
    if shots < 1 {
        return Err(MbnError::DomainError("shots must be >= 1".into()));
    }
    let eig = eigendecompose_grouped(obs)?;
    let mut rng = rng_stream(seed, 0);
    Ok(sample_expectation(&eig, rho, shots, &mut rng))
}

fn sample_expectation(
    eig: &ObservableEig,
    rho: &DensityMatrix,
    shots: u64,
    rng: &mut impl Rng,
) -> f64 {
    let probs = born_probabilities(eig, rho);
    let counts = multinomial(shots, &probs, rng);
    eig.groups
        .iter()
        .zip(&counts)
        .map(|((ev, _), &c)| ev * c as f64 / shots as f64)
        .sum()
}

/// rho_est = (1/d)(1 + sum x_i G_i) with x_i = (d/2) <G_i>_est under the
/// Tr(G_i G_j) = 2 delta_ij convention. Hermitian and unit trace by
/// construction; positivity is not guaranteed.
pub fn linear_inversion(
    estimates: &[f64],
    basis: &GeneratorBasis,
    d: usize,
) -> Result<DensityMatrix> {
    if estimates.len() != basis.len() || basis.dim() != d {
        return Err(MbnError::InvalidDimension(format!(
            "linear_inversion: got {} estimates for a {}-generator basis of dim {}",
            estimates.len(),
            basis.len(),
            basis.dim()
        )));
    }
    let mut rho = identity(d);
    for (x, g) in estimates.iter().zip(basis.generators()) {
        rho += g * Complex64::new(x * d as f64 / 2.0, 0.0);
    }
    rho /= Complex64::new(d as f64, 0.0);
    DensityMatrix::new_quasi(rho)
}

/// Per-trial outcome of the error experiment for one measure.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub trial: usize,
    pub measure: String,
    pub e_true: f64,
    pub e_expt: f64,
    pub delta: f64,
}

/// Relative-error samples for each measure, one entry per trial.
#[derive(Debug, Clone)]
pub struct TomoResult {
    pub trials: usize,
    pub shots: u64,
    pub records: Vec<TrialRecord>,
    /// Trials whose reconstructed quasi-state had a negative eigenvalue.
    pub negative_eigenvalue_trials: usize,
}

impl TomoResult {
    pub fn deltas(&self, measure: &str) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.measure == measure)
            .map(|r| r.delta)
            .collect()
    }

    pub fn median_delta(&self, measure: &str) -> Result<f64> {
        let mut d = self.deltas(measure);
        if d.is_empty() {
            return Err(MbnError::UnknownMeasure(measure.to_string()));
        }
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = d.len();
        Ok(if n % 2 == 1 {
            d[n / 2]
        } else {
            0.5 * (d[n / 2 - 1] + d[n / 2])
        })
    }

    /// `trial,measure,E_true,E_expt,delta`
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "trial,measure,E_true,E_expt,delta")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{:.11e},{:.11e},{:.11e}",
                r.trial, r.measure, r.e_true, r.e_expt, r.delta
            )?;
        }
        Ok(())
    }
}

/// The finite-copies experiment: per trial, draw an LU-orbit member of the
/// reference pure state, estimate every Pauli-string expectation from `n`
/// shots each, linear-invert, and compare each measure on the quasi-state
/// against its value on the exact state. Deterministic per seed; trials are
/// independent streams, so execution order cannot change results.
pub fn error_experiment(
    state: &crate::catalog::CatalogState,
    n: u64,
    trials: usize,
    measures: &[Measure],
    seed: u64,
) -> Result<TomoResult> {
    let dim = state.rho().dim();
    if !dim.is_power_of_two() {
        return Err(MbnError::InvalidDimension(
            "error_experiment requires a qubit system".into(),
        ));
    }
    if (state.rho().purity() - 1.0).abs() > 1e-8 {
        return Err(MbnError::DomainError(
            "error_experiment requires a pure reference state".into(),
        ));
    }
    let qubits = dim.trailing_zeros() as usize;
    let basis = pauli_string_basis(qubits)?;
    let eigs: Vec<ObservableEig> = basis
        .generators()
        .iter()
        .map(eigendecompose_grouped)
        .collect::<Result<_>>()?;
    let bip = state.bip();

    let mut records = Vec::with_capacity(trials * measures.len());
    let mut negative_trials = 0usize;
    for trial in 0..trials {
        let mut rng = rng_stream(seed, trial as u64);
        let mut u = CMatrix::identity(1, 1);
        for _ in 0..qubits {
            u = tensor(&u, &haar_unitary_with(2, &mut rng));
        }
        let rho = DensityMatrix::new(&u * state.rho().matrix() * u.adjoint())?;

        let estimates: Vec<f64> = eigs
            .iter()
            .map(|e| sample_expectation(e, &rho, n, &mut rng))
            .collect();
        let est = linear_inversion(&estimates, &basis, dim)?;
        if est.min_eigenvalue() < -1e-12 {
            negative_trials += 1;
        }

        for m in measures {
            let e_true = m.evaluate(&rho, bip)?;
            if e_true <= 0.0 {
                return Err(MbnError::DegenerateReference);
            }
            let e_expt = m.evaluate(&est, bip)?;
            records.push(TrialRecord {
                trial,
                measure: m.name().to_string(),
                e_true,
                e_expt,
                delta: (e_true - e_expt).abs() / e_true,
            });
        }
    }
    Ok(TomoResult {
        trials,
        shots: n,
        records,
        negative_eigenvalue_trials: negative_trials,
    })
}

/// Uniform bins over [0, max delta]; frequencies sum to the sample count.
pub fn histogram(deltas: &[f64], bins: usize) -> Result<Vec<(f64, f64, usize)>> {
    if deltas.is_empty() {
        return Err(MbnError::EmptyInput("histogram of no samples".into()));
    }
    if bins < 1 {
        return Err(MbnError::DomainError("bins must be >= 1".into()));
    }
    let max = deltas.iter().cloned().fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
    let width = max / bins as f64;
    let mut counts = vec![0usize; bins];
    for &d in deltas {
        let idx = ((d / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (i as f64 * width, (i + 1) as f64 * width, c))
        .collect())
}

/// `bin_lo,bin_hi,count`
pub fn write_histogram_csv(
    hist: &[(f64, f64, usize)],
    out: &mut impl Write,
) -> std::io::Result<()> {
    writeln!(out, "bin_lo,bin_hi,count")?;
    for (lo, hi, c) in hist {
        writeln!(out, "{lo:.11e},{hi:.11e},{c}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::IbmParams;
    use crate::catalog;
    use crate::matrix::{max_abs_diff, projector, CVector, C_ONE};
    use crate::state::Bipartition;

    fn pauli_z() -> CMatrix {
        let mut z = identity(2);
        z[(1, 1)] = Complex64::new(-1.0, 0.0);
        z
    }

    #[test]
    fn deterministic_outcome_is_exact() {
        let mut v = CVector::zeros(2);
        v[0] = C_ONE;
        let rho = DensityMatrix::new(projector(&v)).unwrap();
        for shots in [1, 10, 1000] {
            let e = simulate_expectation(&rho, &pauli_z(), shots, 5).unwrap();
            assert_eq!(e, 1.0);
        }
    }

    #[test]
    fn shot_noise_scales_as_expected() {
        let rho = DensityMatrix::new(identity(2) * Complex64::new(0.5, 0.0)).unwrap();
        let e = simulate_expectation(&rho, &pauli_z(), 1_000_000, 11).unwrap();
        assert!(e.abs() < 0.005, "e = {e}"); // 3 sigma of 1/sqrt(shots)
    }

    #[test]
    fn large_shot_count_converges_to_trace() {
        let mut rng = rng_stream(23, 0);
        let st = catalog::random_mixed_with(Bipartition::new(2, 2).unwrap(), &mut rng).unwrap();
        let obs = tensor(&pauli_z(), &pauli_z());
        let exact = crate::matrix::trace_of_product(&obs, st.rho().matrix()).re;
        let e = simulate_expectation(st.rho(), &obs, 10_000_000, 13).unwrap();
        assert!((e - exact).abs() < 2e-3, "e = {e}, exact = {exact}");
    }

    #[test]
    fn unbiased_over_repetitions() {
        let mut rng = rng_stream(29, 0);
        let st = catalog::random_mixed_with(Bipartition::new(2, 2).unwrap(), &mut rng).unwrap();
        let obs = tensor(&pauli_z(), &identity(2));
        let eig = eigendecompose_grouped(&obs).unwrap();
        let exact = crate::matrix::trace_of_product(&obs, st.rho().matrix()).re;
        let reps = 10_000u64;
        let shots = 100u64;
        let mut mean = 0.0;
        for i in 0..reps {
            let mut r = rng_stream(101, i);
            mean += sample_expectation(&eig, st.rho(), shots, &mut r);
        }
        mean /= reps as f64;
        // 4 sigma of the multinomial standard error of the mean
        let sigma = (1.0 / (shots as f64 * reps as f64)).sqrt();
        assert!((mean - exact).abs() < 4.0 * sigma, "mean = {mean}, exact = {exact}");
    }

    #[test]
    fn exact_inversion_roundtrip() {
        let mut rng = rng_stream(31, 0);
        for k in 1..=4usize {
            let d = 1 << k;
            let basis = pauli_string_basis(k).unwrap();
            let st = catalog::random_mixed_with(Bipartition::new(2, d.max(4) / 2).unwrap(), &mut rng);
            let rho = match st {
                Ok(s) if s.rho().dim() == d => s.rho().clone(),
                _ => DensityMatrix::new(projector(&crate::matrix::haar_vector_with(
                    d, &mut rng,
                )))
                .unwrap(),
            };
            let exact: Vec<f64> = basis
                .generators()
                .iter()
                .map(|g| crate::matrix::trace_of_product(g, rho.matrix()).re)
                .collect();
            let rec = linear_inversion(&exact, &basis, d).unwrap();
            assert!(max_abs_diff(rec.matrix(), rho.matrix()) < 1e-10);
        }
    }

    #[test]
    fn all_zero_estimates_give_maximally_mixed() {
        let basis = pauli_string_basis(2).unwrap();
        let rec = linear_inversion(&vec![0.0; 15], &basis, 4).unwrap();
        let expect = identity(4) * Complex64::new(0.25, 0.0);
        assert!(max_abs_diff(rec.matrix(), &expect) < 1e-14);
    }

    #[test]
    fn noisy_inversion_can_go_negative() {
        // 3 qubits, n = 100: negative eigenvalues must show up within 100 trials
        let st = catalog::me_state(3).unwrap();
        let res = error_experiment(
            &st,
            100,
            100,
            &[Measure::Negativity],
            17,
        )
        .unwrap();
        assert!(res.negative_eigenvalue_trials > 0);
    }

    #[test]
    fn experiment_is_deterministic() {
        let st = catalog::me_state(2).unwrap();
        let measures = [
            Measure::Mbn(IbmParams::defaults(st.bip())),
            Measure::Negativity,
        ];
        let r1 = error_experiment(&st, 50, 10, &measures, 3).unwrap();
        let r2 = error_experiment(&st, 50, 10, &measures, 3).unwrap();
        for (a, b) in r1.records.iter().zip(&r2.records) {
            assert_eq!(a.delta, b.delta);
        }
    }

    #[test]
    fn histogram_basics() {
        let hist = histogram(&[0.5, 0.5, 0.5], 4).unwrap();
        let total: usize = hist.iter().map(|(_, _, c)| c).sum();
        assert_eq!(total, 3);
        let nonzero = hist.iter().filter(|(_, _, c)| *c > 0).count();
        assert_eq!(nonzero, 1);
        assert!(histogram(&[], 4).is_err());
    }

    #[test]
    fn histogram_of_uniform_data_is_roughly_flat() {
        let mut rng = rng_stream(43, 0);
        let data: Vec<f64> = (0..4000).map(|_| rng.gen::<f64>()).collect();
        let hist = histogram(&data, 8).unwrap();
        for (_, _, c) in &hist {
            assert!(*c > 300 && *c < 700, "bin count {c}");
        }
    }
}
