//! Noise-channel evolution, entanglement time sweeps, and extraction of ESD
//! times and freezing plateaus.

use crate::bloch::{cm_value, gcm_value, mbn, negativity, IbmParams};
use crate::error::{MbnError, Result};
use crate::matrix::{dagger, identity, max_abs_diff, CMatrix};
use crate::state::{Bipartition, DensityMatrix};
use num_complex::Complex64;
use std::io::Write;

/// Kraus channel with verified completeness sum K^d K = 1.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    ops: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        if ops.is_empty() {
            return Err(MbnError::EmptyInput("Kraus channel needs operators".into()));
        }
        let d = ops[0].nrows();
        let mut sum = CMatrix::zeros(d, d);
        for k in &ops {
            if k.nrows() != d || k.ncols() != d {
                return Err(MbnError::InvalidDimension(
                    "Kraus operators must share a square dimension".into(),
                ));
            }
            sum += dagger(k) * k;
        }
        let defect = max_abs_diff(&sum, &identity(d));
        if defect > 1e-10 {
            return Err(MbnError::IncompleteChannel(defect));
        }
        Ok(Self { ops })
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        self.ops[0].nrows()
    }
}

/// Local dephasing on k qubits: the single-qubit pair
/// {sqrt(alpha) I, sqrt(1-alpha) Z} with alpha = (1 + e^{-t/T2})/2, lifted to
/// all 2^k tensor combinations.
pub fn dephasing_channel(t: f64, t2: f64, k: usize) -> Result<KrausChannel> {
    if t < 0.0 || t2 <= 0.0 {
        return Err(MbnError::DomainError(format!(
            "dephasing requires t >= 0 and t2 > 0, got t={t}, t2={t2}"
        )));
    }
    let alpha = (1.0 + (-t / t2).exp()) / 2.0;
    let k0 = identity(2) * Complex64::new(alpha.sqrt(), 0.0);
    let mut z = identity(2);
    z[(1, 1)] = Complex64::new(-1.0, 0.0);
    let k1 = z * Complex64::new((1.0 - alpha).sqrt(), 0.0);
    let singles = [k0, k1];
    let mut ops = Vec::with_capacity(1 << k);
    for code in 0..(1usize << k) {
        let mut m = CMatrix::identity(1, 1);
        for pos in (0..k).rev() {
            m = crate::matrix::tensor(&m, &singles[(code >> pos) & 1]);
        }
        ops.push(m);
    }
    KrausChannel::new(ops)
}

/// rho -> sum K rho K^d.
pub fn apply_channel(rho: &DensityMatrix, ch: &KrausChannel) -> Result<DensityMatrix> {
    if ch.dim() != rho.dim() {
        return Err(MbnError::InvalidBipartition {
            expected: ch.dim(),
            actual: rho.dim(),
        });
    }
    let mut out = CMatrix::zeros(rho.dim(), rho.dim());
    for k in &ch.ops {
        out += k * rho.matrix() * dagger(k);
    }
    DensityMatrix::with_psd_floor(out, PSD_QUALITY_GATE)
}

/// PSD violation worse than this fails the evolved-state quality gate.
const PSD_QUALITY_GATE: f64 = -1e-7;

/// Which anticommutator the dissipator uses. `Standard` is GKSL
/// ({L^d L, rho}); `PaperLiteral` uses {L L^d, rho} as sometimes printed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DissipatorForm {
    Standard,
    PaperLiteral,
}

#[derive(Debug, Clone)]
pub struct LindbladModel {
    pub jumps: Vec<(CMatrix, f64)>,
    pub form: DissipatorForm,
}

impl LindbladModel {
    pub fn new(jumps: Vec<(CMatrix, f64)>, form: DissipatorForm) -> Result<Self> {
        for (_, gamma) in &jumps {
            if *gamma < 0.0 {
                return Err(MbnError::DomainError(format!(
                    "Lindblad rate must be >= 0, got {gamma}"
                )));
            }
        }
        Ok(Self { jumps, form })
    }

    fn rhs(&self, rho: &CMatrix) -> CMatrix {
        let d = rho.nrows();
        let mut out = CMatrix::zeros(d, d);
        for (l, gamma) in &self.jumps {
            let ld = dagger(l);
            let anti = match self.form {
                DissipatorForm::Standard => &ld * l,
                DissipatorForm::PaperLiteral => l * &ld,
            };
            let half = Complex64::new(0.5, 0.0);
            let term = l * rho * &ld - (rho * &anti + &anti * rho) * half;
            out += term * Complex64::new(*gamma, 0.0);
        }
        out
    }
}

/// One fixed-step RK4 step on the raw density matrix.
pub fn lindblad_step(rho: &CMatrix, model: &LindbladModel, dt: f64) -> CMatrix {
    let h = Complex64::new(dt, 0.0);
    let half = Complex64::new(0.5, 0.0);
    let k1 = model.rhs(rho);
    let k2 = model.rhs(&(rho + &k1 * h * half));
    let k3 = model.rhs(&(rho + &k2 * h * half));
    let k4 = model.rhs(&(rho + &k3 * h));
    rho + (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4)
        * (h / Complex64::new(6.0, 0.0))
}

/// Fixed-step RK4 integration, recording the state at every multiple of `dt`
/// up to `t_end`. Each step is re-Hermitized and trace-renormalized; trace
/// drift beyond 1e-6 in a single step aborts.
pub fn integrate(
    rho0: &DensityMatrix,
    model: &LindbladModel,
    t_end: f64,
    dt: f64,
) -> Result<Vec<(f64, DensityMatrix)>> {
    if dt <= 0.0 || t_end < 0.0 {
        return Err(MbnError::DomainError(format!(
            "integrate requires dt > 0 and t_end >= 0, got dt={dt}, t_end={t_end}"
        )));
    }
    let steps = (t_end / dt).round() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    out.push((0.0, rho0.clone()));
    let mut rho = rho0.matrix().clone();
    for i in 0..steps {
        rho = lindblad_step(&rho, model, dt);
        rho = (&rho + dagger(&rho)) * Complex64::new(0.5, 0.0);
        let tr = crate::matrix::trace(&rho).re;
        let drift = (tr - 1.0).abs();
        if drift > 1e-6 {
            return Err(MbnError::StepSize { drift, dt });
        }
        rho /= Complex64::new(tr, 0.0);
        let t = (i + 1) as f64 * dt;
        out.push((t, DensityMatrix::with_psd_floor(rho.clone(), PSD_QUALITY_GATE)?));
    }
    Ok(out)
}

/// An entanglement quantity evaluated along a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measure {
    Mbn(IbmParams),
    Negativity,
    Cm,
    Gcm,
}

impl Measure {
    pub fn name(&self) -> &'static str {
        match self {
            Measure::Mbn(_) => "mbn",
            Measure::Negativity => "negativity",
            Measure::Cm => "cm",
            Measure::Gcm => "gcm",
        }
    }

    pub fn evaluate(&self, rho: &DensityMatrix, bip: Bipartition) -> Result<f64> {
        match self {
            Measure::Mbn(p) => mbn(rho, bip, *p),
            Measure::Negativity => negativity(rho, bip),
            Measure::Cm => cm_value(rho, bip),
            Measure::Gcm => gcm_value(rho, bip),
        }
    }
}

/// Sampled measure values on an ascending time grid.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<(String, Vec<f64>)>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(MbnError::DomainError(
                "time grid must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            times,
            values: Vec::new(),
        })
    }

    pub fn push_series(&mut self, name: impl Into<String>, vals: Vec<f64>) -> Result<()> {
        if vals.len() != self.times.len() {
            return Err(MbnError::Internal(format!(
                "series length {} does not match grid length {}",
                vals.len(),
                self.times.len()
            )));
        }
        self.values.push((name.into(), vals));
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn names(&self) -> Vec<&str> {
        self.values.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&[f64]> {
        self.values
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
            .ok_or_else(|| MbnError::UnknownMeasure(name.to_string()))
    }

    /// Header `t,<m1>,<m2>,...`, one row per grid point, 12 significant digits.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        write!(out, "t")?;
        for (name, _) in &self.values {
            write!(out, ",{name}")?;
        }
        writeln!(out)?;
        for (i, t) in self.times.iter().enumerate() {
            write!(out, "{t:.11e}")?;
            for (_, vals) in &self.values {
                write!(out, ",{:.11e}", vals[i])?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// How the state at time t is produced during a sweep.
pub enum Evolution<'a> {
    /// A closed-form channel family t -> channel (stateless in t).
    KrausFamily(&'a dyn Fn(f64) -> Result<KrausChannel>),
    /// Sequential master-equation integration with the given step.
    Lindblad(&'a LindbladModel, f64),
}

/// Evaluate each measure at each grid time under the given evolution.
pub fn sweep(
    rho0: &DensityMatrix,
    bip: Bipartition,
    evolution: &Evolution,
    measures: &[Measure],
    t_grid: &[f64],
) -> Result<TimeSeries> {
    let mut ts = TimeSeries::new(t_grid.to_vec())?;
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(t_grid.len()); measures.len()];
    match evolution {
        Evolution::KrausFamily(family) => {
            for &t in t_grid {
                let rho_t = apply_channel(rho0, &family(t)?)?;
                for (col, m) in columns.iter_mut().zip(measures) {
                    col.push(m.evaluate(&rho_t, bip)?);
                }
            }
        }
        Evolution::Lindblad(model, dt) => {
            let t_end = *t_grid.last().unwrap_or(&0.0);
            let traj = integrate(rho0, model, t_end, *dt)?;
            for &t in t_grid {
                // nearest recorded step
                let idx = ((t / dt).round() as usize).min(traj.len() - 1);
                let rho_t = &traj[idx].1;
                for (col, m) in columns.iter_mut().zip(measures) {
                    col.push(m.evaluate(rho_t, bip)?);
                }
            }
        }
    }
    for (m, col) in measures.iter().zip(columns) {
        ts.push_series(m.name(), col)?;
    }
    Ok(ts)
}

/// Smallest grid time after which the series stays below `eps`, if any.
pub fn esd_time(ts: &TimeSeries, measure: &str, eps: f64) -> Result<Option<f64>> {
    let vals = ts.get(measure)?;
    let mut onset = None;
    for (i, v) in vals.iter().enumerate() {
        if *v < eps {
            if onset.is_none() {
                onset = Some(i);
            }
        } else {
            onset = None;
        }
    }
    Ok(onset.map(|i| ts.times[i]))
}

/// Like `esd_time` but refined by bisection on the underlying evolution to
/// within (grid step)/100.
pub fn esd_time_refined(
    ts: &TimeSeries,
    measure: &str,
    eps: f64,
    eval: impl Fn(f64) -> Result<f64>,
) -> Result<Option<f64>> {
    let coarse = match esd_time(ts, measure, eps)? {
        Some(t) => t,
        None => return Ok(None),
    };
    let times = ts.times();
    let idx = times.iter().position(|&t| t == coarse).unwrap();
    if idx == 0 {
        return Ok(Some(coarse));
    }
    let mut lo = times[idx - 1];
    let mut hi = coarse;
    let target = (hi - lo) / 100.0;
    while hi - lo > target {
        let mid = 0.5 * (lo + hi);
        if eval(mid)? < eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Mean over the first sliding window whose least-squares slope magnitude is
/// below `slope_tol` (per unit time); None if the series never flattens.
pub fn plateau_value(
    ts: &TimeSeries,
    measure: &str,
    window: usize,
    slope_tol: f64,
) -> Result<Option<f64>> {
    if window < 3 {
        return Err(MbnError::DomainError(format!(
            "plateau window must be >= 3, got {window}"
        )));
    }
    let vals = ts.get(measure)?;
    if vals.len() < window {
        return Ok(None);
    }
    for start in 0..=(vals.len() - window) {
        let tw = &ts.times[start..start + window];
        let vw = &vals[start..start + window];
        let n = window as f64;
        let tm = tw.iter().sum::<f64>() / n;
        let vm = vw.iter().sum::<f64>() / n;
        let num: f64 = tw.iter().zip(vw).map(|(t, v)| (t - tm) * (v - vm)).sum();
        let den: f64 = tw.iter().map(|t| (t - tm) * (t - tm)).sum();
        let slope = num / den;
        if slope.abs() < slope_tol {
            return Ok(Some(vm));
        }
    }
    Ok(None)
}
