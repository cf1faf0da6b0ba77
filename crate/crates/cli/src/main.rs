//! `fgap` — solve, count and verify even elliptic finite-gap potentials.
//!
//! Exit codes: 0 success, 1 invalid input or verification failure, 2 solver
//! warning (for example a certified count below the generic value).

mod verify;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fgap_core::dg::{self, SolveOptions, SolveReport, WeightConvention};
use fgap_core::pic;
use fgap_core::types::{self, c_map_inverse, g_alpha, geiser, AlphaVector, TypeVector};
use fgap_core::{Lattice, ToleranceConfig};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fgap", version, about = "Even elliptic finite-gap potentials: solving, counting, verification")]
struct Cli {
    /// JSON config file; command-line flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output format for reports.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum OutputFormat {
    Json,
    Csv,
    Pretty,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the pole system at depth 0, 1 or 2 and report the potentials.
    Solve(SolveArgs),
    /// Tabulate the counting formulas for a type or coefficient vector.
    Count(CountArgs),
    /// Spectral strata of the depth-2 family attached to a coefficient vector.
    Spectral {
        #[arg(long, value_parser = parse_vec4)]
        alpha: Option<Vec4>,
    },
    /// Exceptional neighbors of a type and their involution pairing.
    Exceptional {
        #[arg(long, value_parser = parse_vec4)]
        mu: Option<Vec4>,
    },
    /// Depth recursion for the family count, from closed-form base data or a
    /// user-supplied base file.
    Recursion {
        #[arg(long, value_parser = parse_vec4)]
        mu: Option<Vec4>,
        #[arg(long)]
        d: Option<i64>,
        /// JSON base data {"sv": [{"nu": [..], "l": .., "count": ..}], "pot0": {"d": count}}.
        #[arg(long)]
        base: Option<PathBuf>,
    },
    /// Run a verification suite: identities, counts, appendixb or lattice.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate the Weierstrass functions at a point.
    WpEval {
        #[arg(long, value_parser = parse_floats)]
        periods: Option<Floats>,
        #[arg(long, value_parser = parse_floats)]
        z: Option<Floats>,
    },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_parser = parse_vec4)]
    alpha: Option<Vec4>,
    #[arg(long)]
    d: Option<i64>,
    /// Half-periods as re_a,im_a,re_b,im_b.
    #[arg(long, value_parser = parse_floats)]
    periods: Option<Floats>,
    /// Branch values summing to zero: e1,e2,e3 (real) or re1,im1,...,im3.
    /// Solving then stays in branch coordinates and lifting is skipped.
    #[arg(long, value_parser = parse_floats)]
    e: Option<Floats>,
    /// Use the linear weight convention instead of the squared one.
    #[arg(long)]
    linear_weights: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Relative bound a lifted solution's residual must meet.
    #[arg(long)]
    residual_bound: Option<f64>,
    /// Write the solution table as CSV to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long, value_parser = parse_vec4)]
    mu: Option<Vec4>,
    #[arg(long, value_parser = parse_vec4)]
    alpha: Option<Vec4>,
    #[arg(long)]
    d: Option<i64>,
}

#[derive(Clone, Debug)]
struct Vec4([i64; 4]);

fn parse_vec4(s: &str) -> std::result::Result<Vec4, String> {
    let parts: Vec<i64> = s
        .split(',')
        .map(|p| p.trim().parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| format!("expected four comma-separated integers: {e}"))?;
    if parts.len() != 4 {
        return Err(format!("expected four entries, got {}", parts.len()));
    }
    Ok(Vec4([parts[0], parts[1], parts[2], parts[3]]))
}

#[derive(Clone, Debug)]
struct Floats(Vec<f64>);

fn parse_floats(s: &str) -> std::result::Result<Floats, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| format!("expected comma-separated numbers: {e}"))?;
    Ok(Floats(parts))
}

/// File-backed run configuration; any present field acts as a default that
/// command-line flags override.
#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RunConfig {
    periods: Option<Vec<f64>>,
    e: Option<Vec<f64>>,
    alpha: Option<[i64; 4]>,
    mu: Option<[i64; 4]>,
    d: Option<i64>,
    seed: Option<u64>,
    linear_weights: Option<bool>,
    format: Option<OutputFormat>,
    tolerances: Option<ToleranceConfig>,
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
        }
    }
}

fn lattice_from_floats(v: &[f64]) -> Result<Lattice> {
    if v.len() != 4 {
        bail!("--periods expects re_a,im_a,re_b,im_b");
    }
    Ok(Lattice::from_periods(
        Complex64::new(v[0], v[1]),
        Complex64::new(v[2], v[3]),
    )?)
}

fn branch_values_from_floats(v: &[f64]) -> Result<[Complex64; 3]> {
    match v.len() {
        3 => Ok([
            Complex64::new(v[0], 0.0),
            Complex64::new(v[1], 0.0),
            Complex64::new(v[2], 0.0),
        ]),
        6 => Ok([
            Complex64::new(v[0], v[1]),
            Complex64::new(v[2], v[3]),
            Complex64::new(v[4], v[5]),
        ]),
        n => bail!("--e expects 3 real or 3 complex (6 numbers) branch values, got {n}"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help and version requests are not errors
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = load_config(&cli.config)?;
    let format = cli.format.or(cfg.format).unwrap_or(OutputFormat::Json);
    match cli.cmd {
        Cmd::Solve(args) => cmd_solve(args, &cfg, format),
        Cmd::Count(args) => cmd_count(args, &cfg),
        Cmd::Spectral { alpha } => cmd_spectral(alpha, &cfg),
        Cmd::Exceptional { mu } => cmd_exceptional(mu, &cfg),
        Cmd::Recursion { mu, d, base } => cmd_recursion(mu, d, base, &cfg),
        Cmd::Verify { suite, seed } => verify::run_suite(&suite, seed),
        Cmd::WpEval { periods, z } => cmd_wp_eval(periods, z, &cfg),
    }
}

fn resolve_alpha(flag: Option<Vec4>, cfg: &RunConfig) -> Result<AlphaVector> {
    let v = flag
        .map(|v| v.0)
        .or(cfg.alpha)
        .ok_or_else(|| anyhow!("--alpha is required (or set it in the config file)"))?;
    Ok(AlphaVector::new(v)?)
}

fn resolve_mu(flag: Option<Vec4>, cfg: &RunConfig) -> Result<TypeVector> {
    let v = flag
        .map(|v| v.0)
        .or(cfg.mu)
        .ok_or_else(|| anyhow!("--mu is required (or set it in the config file)"))?;
    Ok(TypeVector::new(v)?)
}

fn cmd_solve(args: SolveArgs, cfg: &RunConfig, format: OutputFormat) -> Result<ExitCode> {
    let alpha = resolve_alpha(args.alpha, cfg)?;
    let depth = args.d.or(cfg.d).unwrap_or(2);
    if !(0..=2).contains(&depth) {
        bail!("solve supports depths 0, 1 and 2; got {depth}");
    }
    let mut tol = cfg.tolerances.unwrap_or_default();
    if let Some(rb) = args.residual_bound {
        tol.residual_bound = rb;
    }
    let opts = SolveOptions {
        tol,
        weights: if args.linear_weights || cfg.linear_weights.unwrap_or(false) {
            WeightConvention::Linear
        } else {
            WeightConvention::Squared
        },
        seed: args.seed.or(cfg.seed).unwrap_or(0),
        lift: true,
        newton_fallback: true,
    };

    let periods = args.periods.map(|f| f.0).or_else(|| cfg.periods.clone());
    let raw_e = args.e.map(|f| f.0).or_else(|| cfg.e.clone());

    let (report, notice): (SolveReport, Option<String>) = match (periods, raw_e) {
        (Some(p), _) => {
            let lat = lattice_from_floats(&p)?;
            let report = match depth {
                0 => dg::solve_d0(&alpha, &lat, &opts),
                1 => dg::solve_d1(&alpha, &lat, &opts)?,
                _ => dg::solve_d2(&alpha, &lat, &opts)?,
            };
            (report, None)
        }
        (None, Some(ev)) => {
            let e = branch_values_from_floats(&ev)?;
            let report = solve_in_branch_coordinates(&alpha, e, depth, &opts)?;
            let notice =
                "branch values only: solving in branch coordinates, lifting skipped".to_string();
            (report, Some(notice))
        }
        (None, None) => bail!("provide --periods or --e"),
    };

    if let Some(path) = &args.csv {
        std::fs::write(path, report.to_csv())
            .with_context(|| format!("writing {}", path.display()))?;
    }

    let mut body = serde_json::to_value(&report)?;
    if let Some(n) = notice {
        body["notice"] = Value::String(n);
    }
    emit(&body, format, |v| pretty_solve(v));

    // invalid inputs already failed; anything in `warnings` (shortfall,
    // bound breach, lift failure) is a warning exit
    Ok(if report.warnings.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn solve_in_branch_coordinates(
    alpha: &AlphaVector,
    e: [Complex64; 3],
    depth: i64,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let sys = dg::build_system_from_e(alpha, e, opts.weights)?;
    let (solutions, notes) = match depth {
        0 => (Vec::new(), Vec::new()),
        1 => (dg::solve_d1_xy(&sys, opts)?, Vec::new()),
        _ => dg::solve_d2_xy(&sys, opts)?,
    };
    let count = if depth == 0 { 1 } else { solutions.len() };
    Ok(SolveReport {
        alpha: *alpha,
        depth,
        degree_n: dg::potential_degree(alpha, depth),
        lattice: None,
        count,
        solutions: solutions
            .into_iter()
            .map(|s| dg::SolvedPotential {
                xs: s.xs,
                rhos: None,
                residuals: Vec::new(),
                poly_residual: s.poly_residual,
                multiplicity: s.multiplicity,
            })
            .collect(),
        warnings: Vec::new(),
        notes,
    })
}

fn cmd_count(args: CountArgs, cfg: &RunConfig) -> Result<ExitCode> {
    let depth = args.d.or(cfg.d).unwrap_or(2);
    let (mu, alpha) = match (&args.mu, &args.alpha) {
        (Some(_), Some(_)) => bail!("give exactly one of --mu and --alpha"),
        (Some(_), None) => (resolve_mu(args.mu, cfg)?, None),
        (None, Some(_)) => {
            let alpha = resolve_alpha(args.alpha, cfg)?;
            let (mu, _) = c_map_inverse(&alpha)?;
            (mu, Some(alpha))
        }
        (None, None) => {
            // fall back to whatever the config provides
            if cfg.mu.is_some() {
                (resolve_mu(None, cfg)?, None)
            } else {
                let alpha = resolve_alpha(None, cfg)?;
                let (mu, _) = c_map_inverse(&alpha)?;
                (mu, Some(alpha))
            }
        }
    };

    if depth > 2 {
        bail!(
            "no closed-form count at depth {depth}: use `fgap recursion` with base data"
        );
    }
    let severi = types::severi_count(&mu, depth)?;
    let base = types::standard_base(&mu, depth)?;
    let recursion = types::recursion_count(&mu, depth, &base, &types::standard_pot_zero())?;
    let mut body = json!({
        "mu": mu,
        "depth": depth,
        "severi_count": severi,
        "recursion_count": recursion,
        "degree_n": types::degree_of(&mu, depth)?,
    });
    if let Some(alpha) = alpha {
        let strata = types::spectral_enumeration(&alpha)?;
        let total: i64 = strata.iter().map(|s| s.count).sum();
        body["alpha"] = serde_json::to_value(alpha)?;
        body["g_alpha"] = json!(g_alpha(&alpha));
        body["potential_count"] = json!(total);
        body["strata"] = serde_json::to_value(&strata)?;
    }
    println!("{}", serde_json::to_string_pretty(&body)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_spectral(alpha: Option<Vec4>, cfg: &RunConfig) -> Result<ExitCode> {
    let alpha = resolve_alpha(alpha, cfg)?;
    let (mu, pairs) = c_map_inverse(&alpha)?;
    let strata = types::spectral_enumeration(&alpha)?;
    let total: i64 = strata.iter().map(|s| s.count).sum();
    let body = json!({
        "alpha": alpha,
        "mu": mu,
        "coefficient_map_pairs": pairs,
        "g_alpha": g_alpha(&alpha),
        "total": total,
        "strata": strata,
    });
    println!("{}", serde_json::to_string_pretty(&body)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_exceptional(mu: Option<Vec4>, cfg: &RunConfig) -> Result<ExitCode> {
    let mu = resolve_mu(mu, cfg)?;
    let neighbors = types::exceptional_neighbors(&mu)?;
    let entries: Vec<Value> = neighbors
        .iter()
        .map(|nu| {
            let img = geiser(&mu, nu).expect("neighbor image");
            json!({
                "nu": nu,
                "n": nu.stats().n,
                "involution_image": img,
                "fixed": img == *nu,
                "class": pic::class_of_gamma(nu),
            })
        })
        .collect();
    let report = pic::delpezzo_report(&mu)?;
    let body = json!({
        "mu": mu,
        "neighbor_count": neighbors.len(),
        "exceptional_count": report.exceptional_count,
        "positive_dim_fibers": report.positive_dim_fibers,
        "pencil_reducibles": report.pencil_reducibles,
        "omega_genus": report.omega_genus,
        "profile": report.profile,
        "basis_legend": pic::BASIS,
        "neighbors": entries,
    });
    println!("{}", serde_json::to_string_pretty(&body)?);
    Ok(ExitCode::SUCCESS)
}

#[derive(Deserialize)]
struct BaseFile {
    sv: Vec<BaseEntry>,
    #[serde(default)]
    pot0: std::collections::BTreeMap<String, i64>,
}

#[derive(Deserialize)]
struct BaseEntry {
    nu: [i64; 4],
    l: i64,
    count: i64,
}

fn cmd_recursion(
    mu: Option<Vec4>,
    d: Option<i64>,
    base_path: Option<PathBuf>,
    cfg: &RunConfig,
) -> Result<ExitCode> {
    let mu = resolve_mu(mu, cfg)?;
    let depth = d.or(cfg.d).unwrap_or(2);
    let (base, pot0) = match base_path {
        None => (types::standard_base(&mu, depth)?, types::standard_pot_zero()),
        Some(p) => {
            let text = std::fs::read_to_string(&p)
                .with_context(|| format!("reading base {}", p.display()))?;
            let file: BaseFile = serde_json::from_str(&text)?;
            let mut base = types::SeveriBase::new();
            for entry in file.sv {
                base.insert((TypeVector::new(entry.nu)?, entry.l), entry.count);
            }
            let mut pot0 = types::standard_pot_zero();
            for (k, v) in file.pot0 {
                pot0.insert(k.parse::<i64>().context("pot0 keys must be depths")?, v);
            }
            (base, pot0)
        }
    };
    let count = types::recursion_count(&mu, depth, &base, &pot0)?;
    let body = json!({
        "mu": mu,
        "depth": depth,
        "count": count,
        "required_base": types::required_base_entries(&mu, depth)?
            .iter()
            .map(|(nu, l)| json!({"nu": nu, "l": l}))
            .collect::<Vec<_>>(),
    });
    println!("{}", serde_json::to_string_pretty(&body)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_wp_eval(periods: Option<Floats>, z: Option<Floats>, cfg: &RunConfig) -> Result<ExitCode> {
    let p = periods
        .map(|f| f.0)
        .or_else(|| cfg.periods.clone())
        .ok_or_else(|| anyhow!("--periods is required"))?;
    let lat = lattice_from_floats(&p)?;
    let zv = z.ok_or_else(|| anyhow!("--z is required"))?.0;
    if zv.len() != 2 {
        bail!("--z expects re,im");
    }
    let v = lat.wp_all(Complex64::new(zv[0], zv[1]))?;
    let body = json!({
        "lattice": lat,
        "z": [zv[0], zv[1]],
        "wp": [v.p.re, v.p.im],
        "wp_prime": [v.dp.re, v.dp.im],
        "wp_second": [v.ddp.re, v.ddp.im],
        "g2": [lat.g2().re, lat.g2().im],
        "g3": [lat.g3().re, lat.g3().im],
        "e": lat.e().iter().map(|c| json!([c.re, c.im])).collect::<Vec<_>>(),
    });
    println!("{}", serde_json::to_string_pretty(&body)?);
    Ok(ExitCode::SUCCESS)
}

fn emit(body: &Value, format: OutputFormat, pretty: impl Fn(&Value) -> String) {
    match format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(body).unwrap()),
        OutputFormat::Csv => {
            // solutions as flat rows; everything else belongs to json mode
            if let Some(sols) = body["solutions"].as_array() {
                println!("re_x,im_x,re_y,im_y");
                for s in sols {
                    let x = &s["x"];
                    let y = &s["y"];
                    println!(
                        "{},{},{},{}",
                        x[0].as_f64().unwrap_or(0.0),
                        x[1].as_f64().unwrap_or(0.0),
                        y[0].as_f64().unwrap_or(0.0),
                        y[1].as_f64().unwrap_or(0.0)
                    );
                }
            }
        }
        OutputFormat::Pretty => println!("{}", pretty(body)),
    }
}

fn fmt_c(v: &Value) -> String {
    match (v[0].as_f64(), v[1].as_f64()) {
        (Some(re), Some(im)) => format!("{re:+.9}{im:+.9}i"),
        _ => "-".into(),
    }
}

fn pretty_solve(body: &Value) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "alpha {}, depth {}, degree n = {}, count {}\n",
        body["alpha"], body["depth"], body["degree_n"], body["count"]
    ));
    if let Some(sols) = body["solutions"].as_array() {
        for (i, s) in sols.iter().enumerate() {
            out.push_str(&format!("  #{i:02} x = {}", fmt_c(&s["x"])));
            if s["y"].is_array() {
                out.push_str(&format!("  y = {}", fmt_c(&s["y"])));
            }
            if s["rho1"].is_array() {
                out.push_str(&format!("  rho1 = {}", fmt_c(&s["rho1"])));
            }
            if s["rho2"].is_array() {
                out.push_str(&format!("  rho2 = {}", fmt_c(&s["rho2"])));
            }
            if let Some(res) = s["residuals"].as_array() {
                if !res.is_empty() {
                    out.push_str(&format!("  residuals {res:?}"));
                }
            }
            out.push('\n');
        }
    }
    if let Some(warns) = body["warnings"].as_array() {
        for w in warns {
            out.push_str(&format!("warning: {w}\n"));
        }
    }
    out
}
