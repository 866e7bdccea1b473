//! Command-line front end: measure ad-hoc states, regenerate the experiment
//! data sets, and export catalog states.

use clap::{Parser, Subcommand, ValueEnum};
use mbn_core::dynamics::{esd_time, esd_time_refined, plateau_value, Evolution, Measure};
use mbn_core::{
    apply_channel, catalog, dephasing_channel, error::MbnError, ibm_threshold, mbn, negativity,
    statefile::StateFile, sweep, tomography, Bipartition, CMatrix, DensityMatrix, DissipatorForm,
    IbmParams, LindbladModel,
};
use num_complex::Complex64;
use serde_json::json;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "mbn",
    about = "Modified Bloch norm entanglement toolkit",
    long_about = "Computes the modified Bloch norm (MBN) entanglement measure, negativity, and \
                  the CM/GCM criteria; regenerates the dephasing, Lindblad, and tomography \
                  experiment data sets.\n\nExit codes: 0 success, 1 domain error, 2 input/parse \
                  error."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(ValueEnum, Clone, Copy)]
enum FormArg {
    /// GKSL dissipator with {L^dag L, rho}
    Standard,
    /// Dissipator with {L L^dag, rho} as sometimes printed
    PaperLiteral,
}

impl From<FormArg> for DissipatorForm {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Standard => DissipatorForm::Standard,
            FormArg::PaperLiteral => DissipatorForm::PaperLiteral,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate MBN, negativity, and the CM/GCM criteria on a state file
    Measure {
        /// JSON state file: {dim, bipartition: [N, M], matrix: rows of [re, im]}
        state_file: PathBuf,
        /// Identity-block size m (default 4)
        #[arg(long)]
        m: Option<usize>,
        /// Local weight a (default sqrt(2/(M(M-1))))
        #[arg(long)]
        a: Option<f64>,
        /// Local weight b (default sqrt(2/(N(N-1))))
        #[arg(long)]
        b: Option<f64>,
        /// Accept Hermitian unit-trace matrices that are not PSD
        #[arg(long)]
        quasi: bool,
    },
    /// Two-qutrit Horodecki family mixed with white noise: measures vs p
    Example1 {
        /// Family parameter alpha in [2, 5]
        #[arg(long, default_value_t = 4.5)]
        alpha: f64,
        /// Grid step in the mixing parameter p
        #[arg(long, default_value_t = 0.005)]
        p_step: f64,
        /// CSV output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Four-qubit bound entangled state under local dephasing: measures vs t
    Example2 {
        /// Dephasing time T2 in seconds
        #[arg(long, default_value_t = 2.0)]
        t2: f64,
        /// Final time in seconds
        #[arg(long, default_value_t = 0.3)]
        t_end: f64,
        /// Number of grid points
        #[arg(long, default_value_t = 601)]
        points: usize,
        /// ESD detection threshold
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        /// CSV output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bloch-diagonal state under correlated amplitude damping: measures vs t
    Example3 {
        /// Damping rate gamma in 1/s
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Dissipator form
        #[arg(long, value_enum, default_value_t = FormArg::Standard)]
        form: FormArg,
        /// Final time in seconds
        #[arg(long, default_value_t = 3.0)]
        t_end: f64,
        /// Number of grid points
        #[arg(long, default_value_t = 3001)]
        points: usize,
        /// RK4 step in seconds
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Plateau detection window in grid points
        #[arg(long, default_value_t = 300)]
        window: usize,
        /// Plateau slope tolerance per second
        #[arg(long, default_value_t = 1e-3)]
        slope_tol: f64,
        /// ESD detection threshold
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        /// CSV output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shot-noise error experiment on the k-qubit reference state.
    ///
    /// "n copies" means n shots per Pauli-string observable; the paper does
    /// not divide copies among the 4^k - 1 observables.
    Tomo {
        /// Number of qubits (2, 3, or 4)
        #[arg(long)]
        k: usize,
        /// Shots per observable
        #[arg(long, default_value_t = 100)]
        n: u64,
        /// Number of LU-orbit trials
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// RNG seed
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Histogram bin count
        #[arg(long, default_value_t = 30)]
        bins: usize,
        /// Per-trial CSV path
        #[arg(long, default_value = "tomo_trials.csv")]
        trials_out: PathBuf,
        /// Histogram CSV path prefix (one file per measure)
        #[arg(long, default_value = "tomo_hist")]
        hist_prefix: String,
    },
    /// List or export the built-in state catalog
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Print the available state labels
    List,
    /// Write a catalog state as a JSON state file
    Export {
        /// One of the labels printed by `catalog list`
        label: String,
        /// Family parameter for horodecki_qutrit
        #[arg(long, default_value_t = 3.5)]
        alpha: f64,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct CliError {
    code: u8,
    msg: String,
}

impl From<MbnError> for CliError {
    fn from(e: MbnError) -> Self {
        CliError {
            code: 1,
            msg: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            code: 1,
            msg: e.to_string(),
        }
    }
}

fn parse_error(e: MbnError) -> CliError {
    CliError {
        code: 2,
        msg: e.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

fn run(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Measure {
            state_file,
            m,
            a,
            b,
            quasi,
        } => cmd_measure(&state_file, m, a, b, quasi),
        Cmd::Example1 { alpha, p_step, out } => cmd_example1(alpha, p_step, out.as_deref()),
        Cmd::Example2 {
            t2,
            t_end,
            points,
            eps,
            out,
        } => cmd_example2(t2, t_end, points, eps, out.as_deref()),
        Cmd::Example3 {
            gamma,
            form,
            t_end,
            points,
            dt,
            window,
            slope_tol,
            eps,
            out,
        } => cmd_example3(
            gamma,
            form.into(),
            t_end,
            points,
            dt,
            window,
            slope_tol,
            eps,
            out.as_deref(),
        ),
        Cmd::Tomo {
            k,
            n,
            trials,
            seed,
            bins,
            trials_out,
            hist_prefix,
        } => cmd_tomo(k, n, trials, seed, bins, &trials_out, &hist_prefix),
        Cmd::Catalog { cmd } => match cmd {
            CatalogCmd::List => {
                for label in CATALOG_LABELS {
                    println!("{label}");
                }
                Ok(())
            }
            CatalogCmd::Export { label, alpha, out } => {
                cmd_catalog_export(&label, alpha, out.as_deref())
            }
        },
    }
}

fn cmd_measure(
    path: &std::path::Path,
    m: Option<usize>,
    a: Option<f64>,
    b: Option<f64>,
    quasi: bool,
) -> Result<(), CliError> {
    let sf = StateFile::load(path).map_err(parse_error)?;
    let (rho, bip) = sf.to_state(quasi).map_err(parse_error)?;
    let defaults = IbmParams::defaults(bip);
    let params = IbmParams::new(
        m.unwrap_or(defaults.m),
        a.unwrap_or(defaults.a),
        b.unwrap_or(defaults.b),
    )?;
    let v = mbn_core::violation(&rho, bip, params)?;
    let c = ibm_threshold(params, bip);
    let report = json!({
        "bipartition": [bip.dim_a, bip.dim_b],
        "params": {"m": params.m, "a": params.a, "b": params.b},
        "trace_norm": v + c,
        "threshold_c": c,
        "violation": v,
        "mbn": mbn(&rho, bip, params)?,
        "negativity": negativity(&rho, bip)?,
        "cm_violation": mbn_core::cm_value(&rho, bip)?,
        "gcm_violation": mbn_core::gcm_value(&rho, bip)?,
    });
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(())
}

fn write_out(out: Option<&std::path::Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

/// Largest grid value whose measure is (numerically) zero.
fn last_zero(grid: &[f64], vals: &[f64]) -> Option<f64> {
    grid.iter()
        .zip(vals)
        .rev()
        .find(|(_, &v)| v <= 1e-12)
        .map(|(&p, _)| p)
}

fn cmd_example1(alpha: f64, p_step: f64, out: Option<&std::path::Path>) -> Result<(), CliError> {
    if p_step <= 0.0 || p_step > 1.0 {
        return Err(MbnError::DomainError(format!("p step must be in (0, 1], got {p_step}")).into());
    }
    let base = catalog::horodecki_qutrit(alpha)?;
    let bip = base.bip();
    let params = IbmParams::defaults(bip);
    let steps = (1.0 / p_step).round() as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| (i as f64 * p_step).min(1.0)).collect();
    let mut mbn_vals = Vec::with_capacity(grid.len());
    let mut neg_vals = Vec::with_capacity(grid.len());
    let mut csv = Vec::new();
    writeln!(csv, "p,mbn,negativity")?;
    for &p in &grid {
        let st = catalog::mix_with_identity(&base, p)?;
        let m = mbn(st.rho(), bip, params)?;
        let n = negativity(st.rho(), bip)?;
        writeln!(csv, "{p:.11e},{m:.11e},{n:.11e}")?;
        mbn_vals.push(m);
        neg_vals.push(n);
    }
    write_out(out, &csv)?;
    let summary = json!({
        "alpha": alpha,
        "p_star": {
            "mbn": last_zero(&grid, &mbn_vals),
            "negativity": last_zero(&grid, &neg_vals),
        },
    });
    eprintln!("{summary}");
    Ok(())
}

fn grid(t_end: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if points < 2 || t_end <= 0.0 {
        return Err(
            MbnError::DomainError("need t_end > 0 and at least 2 grid points".into()).into(),
        );
    }
    Ok((0..points)
        .map(|i| t_end * i as f64 / (points - 1) as f64)
        .collect())
}

fn cmd_example2(
    t2: f64,
    t_end: f64,
    points: usize,
    eps: f64,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let st = catalog::toth_4qubit()?;
    let bip = st.bip();
    let params = IbmParams::defaults(bip);
    let measures = [Measure::Mbn(params), Measure::Negativity];
    let family = |t: f64| dephasing_channel(t, t2, 4);
    let t_grid = grid(t_end, points)?;
    let ts = sweep(st.rho(), bip, &Evolution::KrausFamily(&family), &measures, &t_grid)?;
    let mut csv = Vec::new();
    ts.write_csv(&mut csv)?;
    write_out(out, &csv)?;

    let mut esd = serde_json::Map::new();
    for m in &measures {
        let eval = |t: f64| m.evaluate(&apply_channel(st.rho(), &family(t)?)?, bip);
        let t_star = esd_time_refined(&ts, m.name(), eps, eval)?;
        esd.insert(m.name().to_string(), json!(t_star));
    }
    eprintln!("{}", json!({ "t2": t2, "esd_time": esd }));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_example3(
    gamma: f64,
    form: DissipatorForm,
    t_end: f64,
    points: usize,
    dt: f64,
    window: usize,
    slope_tol: f64,
    eps: f64,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let st = catalog::bloch_diagonal_bd()?;
    let bip = st.bip();
    let measures = [Measure::Mbn(IbmParams::defaults(bip)), Measure::Negativity];
    let model = LindbladModel::new(vec![(collective_lowering(4), gamma)], form)?;
    let t_grid = grid(t_end, points)?;
    let ts = sweep(
        st.rho(),
        bip,
        &Evolution::Lindblad(&model, dt),
        &measures,
        &t_grid,
    )?;
    let mut csv = Vec::new();
    ts.write_csv(&mut csv)?;
    write_out(out, &csv)?;

    let mut esd = serde_json::Map::new();
    let mut plateau = serde_json::Map::new();
    for m in &measures {
        esd.insert(m.name().to_string(), json!(esd_time(&ts, m.name(), eps)?));
        plateau.insert(
            m.name().to_string(),
            json!(plateau_value(&ts, m.name(), window, slope_tol)?),
        );
    }
    eprintln!("{}", json!({ "gamma": gamma, "esd_time": esd, "plateau": plateau }));
    Ok(())
}

/// The k-fold tensor power of the single-qubit lowering operator.
fn collective_lowering(k: usize) -> CMatrix {
    let mut a = CMatrix::zeros(2, 2);
    a[(0, 1)] = Complex64::new(1.0, 0.0);
    let mut l = CMatrix::identity(1, 1);
    for _ in 0..k {
        l = mbn_core::matrix::tensor(&l, &a);
    }
    l
}

fn cmd_tomo(
    k: usize,
    n: u64,
    trials: usize,
    seed: u64,
    bins: usize,
    trials_out: &std::path::Path,
    hist_prefix: &str,
) -> Result<(), CliError> {
    let st = catalog::me_state(k)?;
    let measures = [
        Measure::Mbn(IbmParams::defaults(st.bip())),
        Measure::Negativity,
    ];
    let result = tomography::error_experiment(&st, n, trials, &measures, seed)?;

    let mut csv = Vec::new();
    result.write_csv(&mut csv)?;
    std::fs::write(trials_out, &csv)?;

    let mut medians = serde_json::Map::new();
    for m in &measures {
        let deltas = result.deltas(m.name());
        let hist = tomography::histogram(&deltas, bins)?;
        let mut buf = Vec::new();
        tomography::write_histogram_csv(&hist, &mut buf)?;
        std::fs::write(format!("{hist_prefix}_{}.csv", m.name()), &buf)?;
        medians.insert(m.name().to_string(), json!(result.median_delta(m.name())?));
    }
    println!(
        "{}",
        json!({
            "k": k,
            "n": n,
            "trials": trials,
            "seed": seed,
            "median_delta": medians,
            "negative_eigenvalue_trials": result.negative_eigenvalue_trials,
        })
    );
    Ok(())
}

const CATALOG_LABELS: &[&str] = &[
    "bell",
    "me2",
    "me3",
    "me4",
    "horodecki_qutrit",
    "toth_4qubit",
    "bloch_diagonal_bd",
    "max_mixed_3x3",
];

fn cmd_catalog_export(
    label: &str,
    alpha: f64,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let st = match label {
        "bell" | "me2" => catalog::me_state(2)?,
        "me3" => catalog::me_state(3)?,
        "me4" => catalog::me_state(4)?,
        "horodecki_qutrit" => catalog::horodecki_qutrit(alpha)?,
        "toth_4qubit" => catalog::toth_4qubit()?,
        "bloch_diagonal_bd" => catalog::bloch_diagonal_bd()?,
        "max_mixed_3x3" => {
            let bip = Bipartition::new(3, 3)?;
            let rho = DensityMatrix::new(
                mbn_core::matrix::identity(9) * Complex64::new(1.0 / 9.0, 0.0),
            )?;
            catalog::CatalogState::new("max_mixed_3x3", rho, bip, vec![])
        }
        _ => {
            return Err(CliError {
                code: 2,
                msg: format!("unknown catalog label '{label}'; see `mbn catalog list`"),
            })
        }
    };
    let sf = StateFile::from_state(&st);
    let text = serde_json::to_string_pretty(&sf).unwrap();
    write_out(out, text.as_bytes())?;
    if out.is_none() {
        println!();
    }
    Ok(())
}
