//! Command-line front end: configuration ingestion, certificate emission,
//! Melnikov sweeps, resonance solving, orbit location, and the acceptance
//! suite.
//!
//! Exit-code protocol: 0 certified/ok, 2 usage or configuration error,
//! 3 inconclusive certificate, 4 numerical failure.

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Arc;

use crate::certificate::{
    certify_family_with, certify_system_with, CertifyOptions, Verdict, A1_TOL,
    CONTOUR_ERROR_TOL, NONVANISH_TOL, TWIST_TOL,
};
use crate::elliptic::{
    complete_elliptic_e, complete_elliptic_k, jacobi_sn_cn_dn, EllipticModulus,
};
use crate::error::{Error, Result};
use crate::melnikov::{closed_form_j, duffing_forcing, melnikov_quadrature, solve_resonance};
use crate::model::catalog::{
    coupled_oscillators, duffing, pendulum_torque, DuffingBundle, DuffingVariant,
};
use crate::model::SystemModel;
use crate::orbits::{find_subharmonic, StroboscopicMap};
use crate::verify;

#[derive(Parser)]
#[command(
    name = "melcert",
    version,
    about = "Numerical nonintegrability certificates near resonant periodic orbits"
)]
struct Cli {
    /// Worker threads for grid fan-out (default: hardware parallelism;
    /// the MELCERT_THREADS environment variable takes precedence)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Jacobi elliptic functions and complete integrals
    Elliptic {
        #[command(subcommand)]
        cmd: EllipticCmd,
    },
    /// Compute a nonintegrability certificate
    Certify(CertifyArgs),
    /// Subharmonic Melnikov function reports
    Melnikov {
        #[command(subcommand)]
        cmd: MelnikovCmd,
    },
    /// Resonance-condition solving
    Resonance {
        #[command(subcommand)]
        cmd: ResonanceCmd,
    },
    /// Periodic-orbit location on the stroboscopic map
    Orbits {
        #[command(subcommand)]
        cmd: OrbitsCmd,
    },
    /// Run the acceptance suite and print a pass/fail table
    Verify,
}

#[derive(Subcommand)]
enum EllipticCmd {
    /// Evaluate sn, cn, dn at a complex argument, plus K and E
    Eval {
        /// Elliptic modulus, in (0, 1)
        #[arg(long)]
        k: f64,
        /// Complex argument, <re>[+<im>i]
        #[arg(long)]
        u: String,
    },
}

#[derive(Args)]
struct SystemArgs {
    /// Catalog selector (duffing:a=1, duffing:a=0, duffing:a=-1,inner,
    /// duffing:a=-1,inner-, duffing:a=-1,outer, pendulum, coupled) or a
    /// path to a JSON system definition
    #[arg(long)]
    system: String,
    /// Resonance numerator (orbit period = 2*pi*l/nu)
    #[arg(long)]
    l: Option<u32>,
    /// Resonance denominator (n periods of the orbit per 2*pi*l/nu)
    #[arg(long)]
    n: Option<u32>,
    /// Forcing frequency
    #[arg(long)]
    nu: Option<f64>,
    /// Damping coefficient
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Forcing or coupling amplitude
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Interaction shape parameter of the pendulum/coupled systems, in (0, 1)
    #[arg(long, default_value_t = 0.5)]
    kappa: f64,
    /// Resonant action value(s), comma-separated
    #[arg(long = "I", value_delimiter = ',')]
    action: Vec<f64>,
    /// Initial angle value(s), comma-separated
    #[arg(long, value_delimiter = ',')]
    theta: Vec<f64>,
    /// Natural frequencies of the coupled-oscillator system, comma-separated
    #[arg(long, value_delimiter = ',')]
    omega: Vec<f64>,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    sys: SystemArgs,
    /// Number of equispaced phases sampled
    #[arg(long, default_value_t = 64)]
    phi_grid: usize,
    /// Explicit contour radius (must not exceed the safe default)
    #[arg(long)]
    radius: Option<f64>,
    /// Output path for the certificate JSON (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum MelnikovCmd {
    /// CSV sweep of the Melnikov function over a phase grid
    Sweep {
        #[command(flatten)]
        sys: SystemArgs,
        /// Number of equispaced phases
        #[arg(long, default_value_t = 32)]
        grid: usize,
        /// Output path for the CSV (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ResonanceCmd {
    /// Solve the resonance condition n*T(param) = 2*pi*l/nu
    Solve {
        #[command(flatten)]
        sys: SystemArgs,
    },
}

#[derive(Subcommand)]
enum OrbitsCmd {
    /// Locate the subharmonic periodic orbit predicted by the Melnikov zeros
    Find {
        #[command(flatten)]
        sys: SystemArgs,
        /// Perturbation strength
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        /// Phase seed; the nearest Melnikov zero is targeted
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        /// Output path for the orbit JSON (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional CSV of one period of the located orbit
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
}

/// Entry point used by the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    init_threads(cli.threads);
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn init_threads(flag: Option<usize>) {
    let n = std::env::var("MELCERT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .or(flag);
    if let Some(n) = n.filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::ModulusOutOfRange(_)
        | Error::EmptyWindow
        | Error::ParamOutOfRange(..)
        | Error::NotCoprime(..)
        | Error::InvalidParameter(_)
        | Error::Config(_)
        | Error::Io(_)
        | Error::Json(_) => 2,
        _ => 4,
    }
}

fn dispatch(cmd: Cmd) -> Result<i32> {
    match cmd {
        Cmd::Elliptic {
            cmd: EllipticCmd::Eval { k, u },
        } => cmd_elliptic(k, &u),
        Cmd::Certify(args) => cmd_certify(args),
        Cmd::Melnikov {
            cmd: MelnikovCmd::Sweep { sys, grid, out },
        } => cmd_melnikov_sweep(sys, grid, out),
        Cmd::Resonance {
            cmd: ResonanceCmd::Solve { sys },
        } => cmd_resonance_solve(sys),
        Cmd::Orbits {
            cmd:
                OrbitsCmd::Find {
                    sys,
                    eps,
                    phi,
                    out,
                    trajectory,
                },
        } => cmd_orbits_find(sys, eps, phi, out, trajectory),
        Cmd::Verify => cmd_verify(),
    }
}

/// Parses a complex literal <re>[+<im>i] / <re>[-<im>i] / <im>i.
fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim();
    let bad = || Error::Config(format!("malformed complex literal at '{s}'"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some(body) = s.strip_suffix('i') {
        // split at the sign of the imaginary part, skipping a leading sign
        // and exponent signs
        let mut split = None;
        let bytes = body.as_bytes();
        for (idx, &b) in bytes.iter().enumerate().skip(1) {
            if (b == b'+' || b == b'-')
                && !matches!(bytes[idx - 1], b'e' | b'E')
            {
                split = Some(idx);
            }
        }
        match split {
            Some(idx) => {
                let re: f64 = body[..idx].parse().map_err(|_| bad())?;
                let im_str = &body[idx..];
                let im: f64 = if im_str == "+" || im_str == "-" {
                    format!("{im_str}1").parse().map_err(|_| bad())?
                } else {
                    im_str.parse().map_err(|_| bad())?
                };
                Ok(Complex64::new(re, im))
            }
            None => {
                let im: f64 = if body.is_empty() {
                    1.0
                } else {
                    body.parse().map_err(|_| bad())?
                };
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = s.parse().map_err(|_| bad())?;
        Ok(Complex64::new(re, 0.0))
    }
}

fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

fn cmd_elliptic(k: f64, u: &str) -> Result<i32> {
    let modulus = EllipticModulus::new(k)?;
    let z = parse_complex(u)?;
    let p = jacobi_sn_cn_dn(z, &modulus)?;
    let kk = complete_elliptic_k(&modulus);
    let ee = complete_elliptic_e(&modulus);
    println!("sn = {}", fmt_complex(p.sn));
    println!("cn = {}", fmt_complex(p.cn));
    println!("dn = {}", fmt_complex(p.dn));
    println!("K = {kk}");
    println!("E = {ee}");
    Ok(0)
}

/// Resolved selector for the catalog and user-defined systems.
enum SystemSel {
    Duffing(DuffingBundle),
    Pendulum,
    Coupled,
    User(Box<SystemModel>),
}

fn parse_system(s: &str) -> Result<SystemSel> {
    match s {
        "pendulum" | "pendulum_torque" => return Ok(SystemSel::Pendulum),
        "coupled" | "coupled_oscillators" => return Ok(SystemSel::Coupled),
        _ => {}
    }
    if let Some(rest) = s.strip_prefix("duffing:") {
        let variant = match rest {
            "a=1" | "a=+1" | "hardening" => DuffingVariant::Hardening,
            "a=0" | "cubic" => DuffingVariant::PureCubic,
            "a=-1,inner" | "a=-1,inner+" | "a=-1:inner" | "a=-1:inner+" => {
                DuffingVariant::InnerPlus
            }
            "a=-1,inner-" | "a=-1:inner-" => DuffingVariant::InnerMinus,
            "a=-1,outer" | "a=-1:outer" => DuffingVariant::Outer,
            "a=-1" => {
                return Err(Error::Config(
                    "duffing:a=-1 needs a branch: duffing:a=-1,inner / inner- / outer".into(),
                ))
            }
            other => return Err(Error::Config(format!("unknown duffing selector '{other}'"))),
        };
        return Ok(SystemSel::Duffing(duffing(variant)?));
    }
    if s.ends_with(".json") {
        return Ok(SystemSel::User(Box::new(load_user_system(s)?)));
    }
    Err(Error::Config(format!(
        "unknown system '{s}': expected duffing:..., pendulum, coupled, or a .json path"
    )))
}

fn require<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("missing required flag --{flag} for this system")))
}

fn resolved_config(sys: &SystemArgs, extra: Value) -> Value {
    let mut cfg = json!({
        "system": sys.system,
        "l": sys.l,
        "n": sys.n,
        "nu": sys.nu,
        "delta": sys.delta,
        "beta": sys.beta,
        "kappa": sys.kappa,
        "I": sys.action,
        "theta": sys.theta,
        "omega": sys.omega,
    });
    if let (Some(c), Some(e)) = (cfg.as_object_mut(), extra.as_object()) {
        for (k, v) in e {
            c.insert(k.clone(), v.clone());
        }
    }
    cfg
}

fn envelope(config: Value, result: Value) -> Value {
    json!({
        "tool": { "name": "melcert", "version": env!("CARGO_PKG_VERSION") },
        "config": config,
        "tolerances": {
            "nonvanish": NONVANISH_TOL,
            "a1": A1_TOL,
            "twist": TWIST_TOL,
            "contour_error": CONTOUR_ERROR_TOL,
        },
        "result": result,
    })
}

fn emit_json(value: &Value, out: Option<&PathBuf>) -> Result<()> {
    let text = format!("{}\n", serde_json::to_string_pretty(value)?);
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_text(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn coupled_defaults(sys: &SystemArgs) -> Result<(Arc<SystemModel>, Vec<f64>, Vec<f64>)> {
    if sys.action.is_empty() {
        return Err(Error::Config(
            "coupled system needs resonant actions, e.g. --I 0.9,1.8,1.8".into(),
        ));
    }
    let ell = sys.action.len();
    let naturals = if sys.omega.is_empty() {
        vec![1.0; ell]
    } else {
        sys.omega.clone()
    };
    let model = coupled_oscillators(sys.delta, sys.beta, sys.kappa, &naturals)?;
    let theta = if sys.theta.is_empty() {
        (0..ell).map(|j| 0.3 + 0.8 * j as f64).collect()
    } else {
        sys.theta.clone()
    };
    Ok((model, sys.action.clone(), theta))
}

fn cmd_certify(args: CertifyArgs) -> Result<i32> {
    let opts = CertifyOptions {
        phi_grid: args.phi_grid,
        radius: args.radius,
    };
    let sel = parse_system(&args.sys.system)?;
    let cert = match sel {
        SystemSel::Duffing(bundle) => {
            let l = require(args.sys.l, "l")?;
            let n = require(args.sys.n, "n")?;
            let nu = require(args.sys.nu, "nu")?;
            certify_family_with(&bundle, l, n, nu, args.sys.beta, args.sys.delta, &opts)?
        }
        SystemSel::Pendulum => {
            let model = pendulum_torque(args.sys.kappa)?;
            let action = if args.sys.action.is_empty() {
                vec![1.0]
            } else {
                args.sys.action.clone()
            };
            let theta = if args.sys.theta.is_empty() {
                vec![0.0]
            } else {
                args.sys.theta.clone()
            };
            certify_system_with(&model, &action, &theta, opts.radius)?
        }
        SystemSel::Coupled => {
            let (model, action, theta) = coupled_defaults(&args.sys)?;
            certify_system_with(&model, &action, &theta, opts.radius)?
        }
        SystemSel::User(model) => {
            if args.sys.action.is_empty() {
                return Err(Error::Config(
                    "user-defined system needs resonant actions via --I".into(),
                ));
            }
            let theta = if args.sys.theta.is_empty() {
                vec![0.0; model.dim_angle]
            } else {
                args.sys.theta.clone()
            };
            certify_system_with(&model, &args.sys.action, &theta, opts.radius)?
        }
    };
    let verdict = cert.verdict;
    let config = resolved_config(
        &args.sys,
        json!({ "phi_grid": args.phi_grid, "radius": args.radius }),
    );
    let body = envelope(config, serde_json::to_value(&cert)?);
    emit_json(&body, args.out.as_ref())?;
    if args.out.is_some() {
        println!("verdict: {verdict:?}");
    }
    Ok(match verdict {
        Verdict::Certified => 0,
        Verdict::Inconclusive => 3,
    })
}

fn duffing_with_resonance(
    sys: &SystemArgs,
) -> Result<(DuffingBundle, crate::melnikov::ResonanceSpec)> {
    let bundle = match parse_system(&sys.system)? {
        SystemSel::Duffing(b) => b,
        _ => {
            return Err(Error::Config(format!(
                "'{}' is not a forced-oscillator family; pick a duffing:... selector",
                sys.system
            )))
        }
    };
    let l = require(sys.l, "l")?;
    let n = require(sys.n, "n")?;
    let nu = require(sys.nu, "nu")?;
    let res = solve_resonance(&bundle.family, l, n, nu)?;
    Ok((bundle, res))
}

fn cmd_melnikov_sweep(sys: SystemArgs, grid: usize, out: Option<PathBuf>) -> Result<i32> {
    if grid == 0 {
        return Err(Error::Config("grid must be positive".into()));
    }
    let (bundle, res) = duffing_with_resonance(&sys)?;
    let cf = closed_form_j(&bundle, &res)?;
    let mut csv = String::from("phi,M_quad,M_closed,abs_err\n");
    use rayon::prelude::*;
    let rows: Vec<Result<(f64, f64, f64)>> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let phi = 2.0 * PI * i as f64 / grid as f64;
            let q = melnikov_quadrature(
                &bundle.family,
                &res,
                duffing_forcing(sys.beta, sys.delta),
                phi,
            )?;
            let c = cf.eval(sys.delta, sys.beta, phi);
            Ok((phi, q, c))
        })
        .collect();
    for row in rows {
        let (phi, q, c) = row?;
        csv.push_str(&format!("{phi},{q},{c},{}\n", (q - c).abs()));
    }
    let config = resolved_config(&sys, json!({ "grid": grid, "param_star": res.param_star }));
    eprintln!("config: {}", serde_json::to_string(&config)?);
    emit_text(&csv, out.as_ref())?;
    Ok(0)
}

fn cmd_resonance_solve(sys: SystemArgs) -> Result<i32> {
    let (bundle, res) = duffing_with_resonance(&sys)?;
    let t = bundle.family.period(res.param_star)?;
    let residual = (res.n as f64 * t - res.t_star).abs();
    let config = resolved_config(&sys, json!({}));
    eprintln!("config: {}", serde_json::to_string(&config)?);
    println!("param_star = {}", res.param_star);
    println!("omega_star = {}", res.omega_star);
    println!("residual = {residual:e}");
    Ok(0)
}

fn cmd_orbits_find(
    sys: SystemArgs,
    eps: f64,
    phi: f64,
    out: Option<PathBuf>,
    trajectory: Option<PathBuf>,
) -> Result<i32> {
    let (bundle, res) = duffing_with_resonance(&sys)?;
    let orbit = find_subharmonic(&bundle, &res, sys.delta, sys.beta, eps, phi)?;
    if let Some(path) = &trajectory {
        let map = StroboscopicMap::duffing(bundle.a, sys.beta, sys.delta, res.nu, eps, res.l);
        let samples = 256usize;
        let mut csv = String::from("t,x1,x2\n");
        let mut x = orbit.initial_state;
        let dt = map.period / samples as f64;
        csv.push_str(&format!("0,{},{}\n", x[0], x[1]));
        for i in 1..=samples {
            let t0 = (i - 1) as f64 * dt;
            x = map.flow(x, t0, t0 + dt)?;
            csv.push_str(&format!("{},{},{}\n", i as f64 * dt, x[0], x[1]));
        }
        std::fs::write(path, csv)?;
    }
    let config = resolved_config(&sys, json!({ "eps": eps, "phi": phi }));
    let body = envelope(config, serde_json::to_value(&orbit)?);
    emit_json(&body, out.as_ref())?;
    Ok(0)
}

fn cmd_verify() -> Result<i32> {
    let results = verify::run_all();
    print!("{}", verify::render_table(&results));
    Ok(if results.iter().all(|r| r.passed) {
        0
    } else {
        4
    })
}

// --- user-defined systems ---------------------------------------------------

/// One monomial-harmonic term: coefficient * prod_i I_i^exponents[i] *
/// trig(harmonics . theta), with trig = cos or sin.
#[derive(Debug, Deserialize)]
struct UserTerm {
    coefficient: f64,
    #[serde(default)]
    exponents: Vec<u32>,
    #[serde(default)]
    harmonics: Vec<i64>,
    #[serde(default = "default_kind")]
    kind: String,
}

fn default_kind() -> String {
    "cos".into()
}

/// One polynomial term of a frequency component.
#[derive(Debug, Deserialize)]
struct PolyTerm {
    coefficient: f64,
    #[serde(default)]
    exponents: Vec<u32>,
}

/// JSON system definition: dI/dt = eps*h(I, theta), dtheta/dt = omega(I) +
/// eps*g(I, theta), with h and g as term lists and omega polynomial in I.
#[derive(Debug, Deserialize)]
struct UserSystem {
    name: String,
    dim_action: usize,
    dim_angle: usize,
    omega: Vec<Vec<PolyTerm>>,
    h: Vec<Vec<UserTerm>>,
    #[serde(default)]
    g: Vec<Vec<UserTerm>>,
}

fn check_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::Config(format!(
            "{what}: expected {want} entries, found {got}"
        )));
    }
    Ok(())
}

fn monomial(action: &[f64], exponents: &[u32]) -> f64 {
    action
        .iter()
        .zip(exponents.iter())
        .map(|(a, e)| a.powi(*e as i32))
        .product()
}

fn load_user_system(path: &str) -> Result<SystemModel> {
    let text = std::fs::read_to_string(path)?;
    let def: UserSystem = serde_json::from_str(&text)?;
    if def.dim_action == 0 || def.dim_angle == 0 {
        return Err(Error::Config("system dimensions must be positive".into()));
    }
    check_len("omega", def.omega.len(), def.dim_angle)?;
    check_len("h", def.h.len(), def.dim_angle)?;
    if !def.g.is_empty() {
        check_len("g", def.g.len(), def.dim_action)?;
    }
    for (name, lists) in [("h", &def.h), ("g", &def.g)] {
        for (j, terms) in lists.iter().enumerate() {
            for t in terms {
                check_len(&format!("{name}[{j}] exponents"), t.exponents.len(), def.dim_action)?;
                check_len(&format!("{name}[{j}] harmonics"), t.harmonics.len(), def.dim_angle)?;
                if t.kind != "cos" && t.kind != "sin" {
                    return Err(Error::Config(format!(
                        "{name}[{j}]: kind must be 'cos' or 'sin', found '{}'",
                        t.kind
                    )));
                }
            }
        }
    }
    for (j, terms) in def.omega.iter().enumerate() {
        for t in terms {
            check_len(&format!("omega[{j}] exponents"), t.exponents.len(), def.dim_action)?;
        }
    }

    let omega_terms = def.omega;
    let omega_terms2: Vec<Vec<(f64, Vec<u32>)>> = omega_terms
        .iter()
        .map(|ts| ts.iter().map(|t| (t.coefficient, t.exponents.clone())).collect())
        .collect();
    let dim_action = def.dim_action;

    let omega_eval = {
        let terms = omega_terms2.clone();
        Arc::new(move |action: &[f64]| -> Vec<f64> {
            terms
                .iter()
                .map(|ts| ts.iter().map(|(c, e)| c * monomial(action, e)).sum())
                .collect()
        })
    };
    let d_omega = {
        let terms = omega_terms2;
        Arc::new(move |action: &[f64]| -> Vec<Vec<f64>> {
            terms
                .iter()
                .map(|ts| {
                    (0..dim_action)
                        .map(|c| {
                            ts.iter()
                                .map(|(coeff, e)| {
                                    if e[c] == 0 {
                                        0.0
                                    } else {
                                        let mut lowered = e.clone();
                                        lowered[c] -= 1;
                                        coeff * e[c] as f64 * monomial(action, &lowered)
                                    }
                                })
                                .sum()
                        })
                        .collect()
                })
                .collect()
        })
    };

    let rate_fn = |lists: Vec<Vec<UserTerm>>, dim: usize| {
        Arc::new(move |action: &[f64], angle: &[Complex64], _eps: f64| -> Vec<Complex64> {
            if lists.is_empty() {
                return vec![Complex64::new(0.0, 0.0); dim];
            }
            lists
                .iter()
                .map(|terms| {
                    terms
                        .iter()
                        .map(|t| {
                            let arg: Complex64 = t
                                .harmonics
                                .iter()
                                .zip(angle.iter())
                                .map(|(n, th)| th * *n as f64)
                                .sum();
                            let trig = if t.kind == "sin" { arg.sin() } else { arg.cos() };
                            trig * t.coefficient * monomial(action, &t.exponents)
                        })
                        .sum()
                })
                .collect()
        })
    };

    let mut parameters = BTreeMap::new();
    parameters.insert("dim_action".to_string(), def.dim_action as f64);
    parameters.insert("dim_angle".to_string(), def.dim_angle as f64);
    Ok(SystemModel::new(
        def.name,
        def.dim_action,
        def.dim_angle,
        parameters,
        omega_eval,
        d_omega,
        rate_fn(def.h, def.dim_angle),
        rate_fn(def.g, def.dim_action),
        None,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literal_forms() {
        assert_eq!(parse_complex("0").unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(parse_complex("1.5").unwrap(), Complex64::new(1.5, 0.0));
        assert_eq!(parse_complex("-2e-3").unwrap(), Complex64::new(-2e-3, 0.0));
        assert_eq!(parse_complex("1+2i").unwrap(), Complex64::new(1.0, 2.0));
        assert_eq!(parse_complex("1-2i").unwrap(), Complex64::new(1.0, -2.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("-0.5-1e-2i").unwrap(), Complex64::new(-0.5, -1e-2));
        assert_eq!(parse_complex("1e-3+2E+4i").unwrap(), Complex64::new(1e-3, 2e4));
        assert!(parse_complex("nope+i*").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn duffing_selectors() {
        assert!(matches!(
            parse_system("duffing:a=1").unwrap(),
            SystemSel::Duffing(_)
        ));
        assert!(matches!(
            parse_system("duffing:a=-1,inner-").unwrap(),
            SystemSel::Duffing(_)
        ));
        assert!(parse_system("duffing:a=-1").is_err());
        assert!(parse_system("duffing:a=2").is_err());
        assert!(parse_system("mystery").is_err());
        assert!(matches!(
            parse_system("pendulum").unwrap(),
            SystemSel::Pendulum
        ));
    }

    #[test]
    fn user_system_round_trip() {
        let def = r#"{
            "name": "toy",
            "dim_action": 2,
            "dim_angle": 2,
            "omega": [
                [{"coefficient": 1.0, "exponents": [1, 0]}],
                [{"coefficient": 1.0, "exponents": [0, 1]}]
            ],
            "h": [
                [{"coefficient": 0.5, "exponents": [0, 0], "harmonics": [1, -1], "kind": "sin"}],
                [{"coefficient": -0.5, "exponents": [0, 0], "harmonics": [1, -1], "kind": "sin"}]
            ],
            "g": []
        }"#;
        let dir = std::env::temp_dir().join("melcert-cli-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("toy.json");
        std::fs::write(&path, def).unwrap();
        let sys = load_user_system(path.to_str().unwrap()).unwrap();
        assert_eq!(sys.omega(&[1.0, 2.0]), vec![1.0, 2.0]);
        let d = sys.d_omega(&[1.0, 2.0]);
        assert_eq!(d, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let h = sys.h(
            &[1.0, 2.0],
            &[Complex64::new(0.4, 0.0), Complex64::new(0.1, 0.0)],
            0.0,
        );
        assert!((h[0].re - 0.5 * (0.3_f64).sin()).abs() < 1e-15);
        assert!((h[0] + h[1]).norm() < 1e-15);
    }
}
