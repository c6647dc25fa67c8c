use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fock_oracle::{adaptive, coherent_dm, overlap_fock, squeezed_vacuum_dm, thermal_dm, two_mode_squeezed_dm, Complex, FockDensityMatrix};
use nfg_core::correlation::{
    check_monotonicity, nfg_after_channel, nfg_numeric, nfg_two_mode, nfg_upper_bound, NfgResult, OptimizerConfig,
    DEFAULT_SEED,
};
use nfg_core::families::{sweep, tmsv, SweepGrid};
use nfg_core::gaussian::{
    apply_gaussian_unitary, standard_form, validate_cm, CovarianceMatrix, Displacement, GaussianState, GaussianUnitary,
    Side, SymplecticMatrix, DEFAULT_TOL,
};
use nfg_core::overlap::overlap;
use serde_json::json;

use nfg_cli::error::CliError;
use nfg_cli::files::{ChannelFile, StateFile};

#[derive(Parser)]
#[command(name = "nfg", version, about = "Fidelity-based Gaussian correlation N_F^G from covariance matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Symplectic eigenvalues and physicality of a state file
    Validate {
        state: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Compute N_F^G (or its upper bound)
    Nfg {
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Closed)]
        method: MethodArg,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Apply a channel to the B mode and compare N_F^G before and after
    Channel {
        state: PathBuf,
        channel: PathBuf,
        #[arg(long)]
        compare_closed: bool,
        #[arg(long)]
        json: bool,
    },
    /// Tabulate N_F^G, D_G and Q over a squeezed-thermal-state grid as CSV
    Sweep(SweepArgs),
    /// Compare covariance-matrix overlaps with truncated Fock-basis traces
    OracleCheck {
        #[arg(long, value_delimiter = ',', default_value = "thermal,coherent,squeezed,tmsv")]
        families: Vec<Family>,
        #[arg(long)]
        json: bool,
    },
    /// Standard-form parameters (a, b, c, d) of a (1+1)-mode state
    StandardForm {
        state: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Closed,
    Numeric,
    Bound,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Thermal,
    Coherent,
    Squeezed,
    Tmsv,
}

#[derive(Args)]
struct OptArgs {
    /// Grid points per angle for --method numeric
    #[arg(long, default_value_t = 33)]
    grid_points: usize,
    #[arg(long, default_value_t = 60)]
    refine_iters: usize,
    #[arg(long, default_value_t = 4)]
    restarts: usize,
}

#[derive(Args)]
struct SweepArgs {
    /// Preset grid: 1 and 3 cover n̄ ∈ [0, 50], 2 and 4 cover n̄ ∈ [100000, 100500]
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4), conflicts_with_all = ["n_bar_min", "n_bar_max", "n_bar_steps", "mu_min", "mu_max", "mu_steps"])]
    figure: Option<u8>,
    #[arg(long, required_unless_present = "figure")]
    n_bar_min: Option<f64>,
    #[arg(long, required_unless_present = "figure")]
    n_bar_max: Option<f64>,
    #[arg(long, required_unless_present = "figure")]
    n_bar_steps: Option<usize>,
    #[arg(long, required_unless_present = "figure")]
    mu_min: Option<f64>,
    #[arg(long, required_unless_present = "figure")]
    mu_max: Option<f64>,
    #[arg(long, required_unless_present = "figure")]
    mu_steps: Option<usize>,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn seed() -> Result<u64, CliError> {
    match std::env::var("NFG_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| CliError::Parse(format!("NFG_SEED={s:?} is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn print_json(out: &mut impl Write, v: &serde_json::Value) -> Result<(), CliError> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("serialisable"))?;
    Ok(())
}

fn result_json(r: &NfgResult) -> serde_json::Value {
    json!({
        "value": r.value,
        "method": r.method.to_string(),
        "optimizer_theta": r.optimizer_theta,
        "lower_bound_only": r.lower_bound_only,
        "converged": r.converged,
    })
}

fn cmd_validate(out: &mut impl Write, path: &PathBuf, as_json: bool) -> Result<u8, CliError> {
    let file = StateFile::read(path)?;
    let report = validate_cm(&file.covariance()?, DEFAULT_TOL);
    if as_json {
        print_json(
            out,
            &json!({
                "symmetric": report.symmetric,
                "asymmetry": report.asymmetry,
                "positive_definite": report.positive_definite,
                "symplectic_eigenvalues": report.symplectic_eigenvalues,
                "physical": report.physical,
            }),
        )?;
    } else {
        let nus: Vec<String> = report.symplectic_eigenvalues.iter().map(|&v| num(v)).collect();
        writeln!(out, "modes: {}+{}", file.n_a, file.n_b)?;
        writeln!(out, "symmetric: {} (max asymmetry {})", report.symmetric, num(report.asymmetry))?;
        writeln!(out, "symplectic eigenvalues: [{}]", nus.join(", "))?;
        writeln!(out, "physical: {}", report.physical)?;
    }
    Ok(if report.physical { 0 } else { 1 })
}

fn cmd_nfg(out: &mut impl Write, path: &PathBuf, method: MethodArg, as_json: bool, opt: &OptArgs) -> Result<u8, CliError> {
    let state = StateFile::read(path)?.to_state()?;
    match method {
        MethodArg::Bound => {
            let b = nfg_upper_bound(&state)?;
            if as_json {
                print_json(out, &json!({ "upper_bound": b }))?;
            } else {
                writeln!(out, "upper bound: {}", num(b))?;
            }
        }
        MethodArg::Closed | MethodArg::Numeric => {
            let r = if let MethodArg::Closed = method {
                nfg_two_mode(&state)?
            } else {
                let cfg = OptimizerConfig {
                    grid_points: opt.grid_points,
                    refine_iters: opt.refine_iters,
                    restarts: opt.restarts,
                    seed: seed()?,
                    ..OptimizerConfig::default()
                };
                nfg_numeric(&state, &cfg)?
            };
            if as_json {
                print_json(out, &result_json(&r))?;
            } else {
                writeln!(out, "N_F^G: {}", num(r.value))?;
                writeln!(out, "method: {}", r.method)?;
                if let Some(t) = &r.optimizer_theta {
                    let t: Vec<String> = t.iter().map(|&x| num(x)).collect();
                    writeln!(out, "optimizer theta: [{}]", t.join(", "))?;
                }
                if r.lower_bound_only {
                    writeln!(out, "note: degenerate A spectrum, value is a lower bound")?;
                }
                if !r.converged {
                    writeln!(out, "warning: local refinement did not converge; best value reported")?;
                }
            }
        }
    }
    Ok(0)
}

fn cmd_channel(out: &mut impl Write, state: &PathBuf, channel: &PathBuf, compare: bool, as_json: bool) -> Result<u8, CliError> {
    let state = StateFile::read(state)?.to_state()?;
    let ch = ChannelFile::read(channel)?.to_channel()?;
    let rep = check_monotonicity(&state, &ch)?;
    let closed = if compare { Some(nfg_after_channel(&state, &ch)?.value) } else { None };
    if as_json {
        let mut v = json!({ "before": rep.before, "after": rep.after, "holds": rep.holds, "slack": rep.slack });
        if let Some(c) = closed {
            v["closed_form"] = json!(c);
            v["discrepancy"] = json!((c - rep.after).abs());
        }
        print_json(out, &v)?;
    } else {
        writeln!(out, "before: {}", num(rep.before))?;
        writeln!(out, "after: {}", num(rep.after))?;
        writeln!(out, "monotone: {} (slack {})", rep.holds, num(rep.slack))?;
        if let Some(c) = closed {
            writeln!(out, "closed form after: {}", num(c))?;
            writeln!(out, "discrepancy: {}", num((c - rep.after).abs()))?;
        }
    }
    Ok(if rep.holds { 0 } else { 1 })
}

fn cmd_sweep(out: &mut impl Write, args: &SweepArgs) -> Result<u8, CliError> {
    let grid = match args.figure {
        Some(f) => SweepGrid::figure(f)?,
        None => SweepGrid {
            n_bar_min: args.n_bar_min.unwrap_or_default(),
            n_bar_max: args.n_bar_max.unwrap_or_default(),
            n_bar_steps: args.n_bar_steps.unwrap_or_default(),
            mu_min: args.mu_min.unwrap_or_default(),
            mu_max: args.mu_max.unwrap_or_default(),
            mu_steps: args.mu_steps.unwrap_or_default(),
        },
    };
    let rows = sweep(&grid)?;
    let sink: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?),
        None => Box::new(&mut *out),
    };
    let mut w = csv::Writer::from_writer(sink);
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["n_bar", "mu", "nfg", "dg", "q", "nfg_minus_dg", "nfg_minus_q"]).map_err(io)?;
    for r in &rows {
        w.write_record([r.n_bar, r.mu, r.nfg, r.dg, r.q, r.nfg_minus_dg, r.nfg_minus_q].map(num)).map_err(io)?;
    }
    w.flush()?;
    Ok(0)
}

struct OracleRow {
    family: Family,
    label: String,
    cm: f64,
    fock: f64,
}

fn oracle_rows(families: &[Family]) -> Result<Vec<OracleRow>, CliError> {
    let fe = |e: fock_oracle::FockError| CliError::Domain(e.to_string());
    let vac1 = GaussianState::vacuum(1, 0)?;
    let mut rows = Vec::new();
    let mut push = |family, label: String, a: &GaussianState, b: &GaussianState, f: &dyn Fn(usize) -> fock_oracle::Result<FockDensityMatrix>, g: &dyn Fn(usize) -> fock_oracle::Result<FockDensityMatrix>| -> Result<(), CliError> {
        let cut = adaptive(f).map_err(fe)?.cutoff().max(adaptive(g).map_err(fe)?.cutoff());
        let fock = overlap_fock(&f(cut).map_err(fe)?, &g(cut).map_err(fe)?).map_err(fe)?;
        rows.push(OracleRow { family, label, cm: overlap(a, b)?.value, fock });
        Ok(())
    };
    for &fam in families {
        match fam {
            Family::Thermal => {
                for n in [0.5, 1.0, 3.0] {
                    let st = GaussianState::from_cm(CovarianceMatrix::thermal(n, 1)?, 1, 0)?;
                    push(fam, format!("n={n} with itself"), &st, &st, &|c| thermal_dm(n, c), &|c| thermal_dm(n, c))?;
                    push(fam, format!("n={n} vs vacuum"), &st, &vac1, &|c| thermal_dm(n, c), &|c| FockDensityMatrix::vacuum(1, c))?;
                }
            }
            Family::Coherent => {
                for a in [0.5, 1.0, 2.0] {
                    let st = vac1.with_mean(Displacement::from_slice(&[std::f64::consts::SQRT_2 * a, 0.0])?)?;
                    push(fam, format!("alpha={a} vs vacuum"), &st, &vac1, &|c| coherent_dm(Complex::new(a, 0.0), c), &|c| FockDensityMatrix::vacuum(1, c))?;
                }
            }
            Family::Squeezed => {
                for r in [0.25, 0.5, 1.0] {
                    let st = apply_gaussian_unitary(&vac1, &GaussianUnitary::from_symplectic(SymplecticMatrix::squeeze(r)), Side::A)?;
                    push(fam, format!("r={r} vs vacuum"), &st, &vac1, &|c| squeezed_vacuum_dm(r, c), &|c| FockDensityMatrix::vacuum(1, c))?;
                }
            }
            Family::Tmsv => {
                let vac2 = GaussianState::vacuum(1, 1)?;
                for r in [0.25, 0.5, 1.0] {
                    let st = tmsv(r)?;
                    push(fam, format!("r={r} vs vacuum"), &st, &vac2, &|c| two_mode_squeezed_dm(r, c), &|c| FockDensityMatrix::vacuum(2, c))?;
                }
            }
        }
    }
    Ok(rows)
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Thermal => "thermal",
        Family::Coherent => "coherent",
        Family::Squeezed => "squeezed",
        Family::Tmsv => "tmsv",
    }
}

fn cmd_oracle_check(out: &mut impl Write, families: &[Family], as_json: bool) -> Result<u8, CliError> {
    let rows = oracle_rows(families)?;
    let rel = |r: &OracleRow| (r.cm - r.fock).abs() / r.cm.abs();
    let ok = rows.iter().all(|r| rel(r) < 1e-6);
    if as_json {
        let v: Vec<_> = rows
            .iter()
            .map(|r| json!({ "family": family_name(r.family), "case": r.label, "cm": r.cm, "fock": r.fock, "rel_err": rel(r) }))
            .collect();
        print_json(out, &json!({ "rows": v, "pass": ok }))?;
    } else {
        writeln!(out, "{:<9} {:<20} {:>23} {:>23} {:>10}", "family", "case", "cm overlap", "fock overlap", "rel err")?;
        for r in &rows {
            writeln!(out, "{:<9} {:<20} {:>23} {:>23} {:>10.2e}", family_name(r.family), r.label, num(r.cm), num(r.fock), rel(r))?;
        }
        writeln!(out, "{}", if ok { "all within 1e-6" } else { "FAILED: relative error above 1e-6" })?;
    }
    Ok(if ok { 0 } else { 1 })
}

fn cmd_standard_form(out: &mut impl Write, path: &PathBuf, as_json: bool) -> Result<u8, CliError> {
    let state = StateFile::read(path)?.to_state()?;
    let sf = standard_form(&state)?;
    let p = sf.params;
    if as_json {
        print_json(out, &json!({ "a": p.a, "b": p.b, "c": p.c, "d": p.d }))?;
    } else {
        for (k, v) in [("a", p.a), ("b", p.b), ("c", p.c), ("d", p.d)] {
            writeln!(out, "{k}: {}", num(v))?;
        }
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Validate { state, json } => cmd_validate(&mut out, state, *json),
        Command::Nfg { state, method, json, opt } => cmd_nfg(&mut out, state, *method, *json, opt),
        Command::Channel { state, channel, compare_closed, json } => cmd_channel(&mut out, state, channel, *compare_closed, *json),
        Command::Sweep(args) => cmd_sweep(&mut out, args),
        Command::OracleCheck { families, json } => cmd_oracle_check(&mut out, families, *json),
        Command::StandardForm { state, json } => cmd_standard_form(&mut out, state, *json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("nfg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
