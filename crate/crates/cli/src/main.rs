//! `holokern`: command-line front end to the holokern library.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use holokern::circled::{
    assemble, decompose, extract_blocks, growth_criterion, identity_decomposition_check, project,
    project_quadrature, projection_bound_check, BlockFamily, ExtractParams,
};
use holokern::domains::{delta, Contour, ReinhardtDomain};
use holokern::kernelop::{
    dual_growth_demo, dual_kernel_from_functional, dual_pair, dual_pair_exact, kernel_eval, matrix_from_kernel,
    matrix_of, phi_forward, phi_inverse, Functional, KernelCoefficients, NamedOperator, OperatorMatrix,
};
use holokern::quadrature::QuadratureSpec;
use holokern::report::{digest, RunReport};
use holokern::rng::SplitMix64;
use holokern::series::sup_norm;
use holokern::verify::{self, max_coeff_diff, Suite};
use holokern::{Complex64, Error, MultiIndex, PowerSeries, PrimitiveIndex};
use serde_json::json;

#[derive(Parser)]
#[command(name = "holokern", version, about = "Operator kernels, dual pairings and monomial projections on holomorphic function spaces")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Starting trapezoid nodes per circle (power of two, at least 8)
    #[arg(long, global = true, default_value_t = 16)]
    nodes: usize,
    /// Absolute convergence tolerance between node doublings
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 8)]
    max_doublings: u32,
    /// Seed of the SplitMix64 probe stream
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Also write the run report as JSON
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    /// Also write the run report as CSV
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Kernel coefficients of a named operator
    Kernel {
        /// identity | partial:<j> | euler | dilation:<c> | hadamard:pow<b> | hadamard:grow<b> | hadamard:invfact | multiplier:<g1>,..
        op: String,
        #[arg(short = 'n', long = "dim")]
        n: usize,
        #[arg(short = 'D', long = "degree")]
        degree: u32,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Apply a kernel to a series through the contour integral
    Apply {
        kernel: PathBuf,
        series: PathBuf,
        /// Radius of the integration circles
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Projection P_k of a series
    Project {
        series: PathBuf,
        #[command(flatten)]
        domain: DomainArg,
        /// Primitive index, comma separated
        #[arg(short, long, value_parser = parse_index)]
        k: MultiIndex,
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        #[arg(long, default_value_t = 0.8)]
        s: f64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// P_0 and all P_k with |k| <= N, with remainder and growth checks
    Decompose {
        series: PathBuf,
        #[command(flatten)]
        domain: DomainArg,
        #[arg(short = 'N', long = "max-degree")]
        max_degree: u32,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        s: f64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Split an operator matrix into blocks A∘P_k
    Extract {
        matrix: PathBuf,
        #[command(flatten)]
        domain: DomainArg,
        /// Target domain (defaults to --domain)
        #[arg(long, value_parser = parse_domain)]
        codomain: Option<ReinhardtDomain>,
        #[arg(short = 'N', long = "max-degree")]
        max_degree: u32,
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        #[arg(long, default_value_t = 0.8)]
        s: f64,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        /// Fixed epsilon; calibrated from the operator when absent
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 2)]
        probes: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Assemble blocks into one operator matrix
    Assemble {
        blocks: PathBuf,
        /// Use the recorded image of 1 as the constant part
        #[arg(long)]
        constant: bool,
        /// Reference matrix for an entrywise comparison
        #[arg(long)]
        compare: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Dual kernel of a functional, pairing, or the growth demonstration
    Dual {
        /// eval0 | ones | degree | growth | coeff:<a1>,..
        functional: Option<String>,
        #[arg(short = 'n', long = "dim")]
        n: usize,
        #[arg(short = 'D', long = "degree")]
        degree: u32,
        /// Pair the kernel with this series
        #[arg(long)]
        series: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Run the unbounded-growth demonstration instead
        #[arg(long)]
        growth_demo: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded property suite
    Verify {
        /// multiindex | series | quadrature | kernelop | circled | all
        #[arg(value_parser = parse_suite)]
        suite: Suite,
    },
    /// Render a saved run report
    Report { path: PathBuf },
}

#[derive(Args)]
struct DomainArg {
    /// polydisc:<r1>,<r2>,.. | ball:<n>:<radius> | pellipsoid:<r1>,..:<p1>,.. | inline JSON
    #[arg(long, value_parser = parse_domain)]
    domain: ReinhardtDomain,
}

fn parse_index(s: &str) -> Result<MultiIndex, String> {
    s.split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(MultiIndex::new)
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect()
}

fn parse_domain(s: &str) -> Result<ReinhardtDomain, String> {
    let d = if s.trim_start().starts_with('{') {
        serde_json::from_str::<ReinhardtDomain>(s).map_err(|e| e.to_string())?
    } else {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["polydisc", radii] => ReinhardtDomain::Polydisc { radii: parse_floats(radii)? },
            ["ball", n, r] => ReinhardtDomain::Ball {
                dim: n.parse().map_err(|e| format!("{e}"))?,
                radius: r.parse().map_err(|e| format!("{e}"))?,
            },
            ["pellipsoid", radii, p] => ReinhardtDomain::Pellipsoid {
                radii: parse_floats(radii)?,
                p: parse_floats(p)?,
            },
            _ => return Err(format!("unrecognized domain {s:?}")),
        }
    };
    d.validate().map_err(|e| e.to_string())?;
    Ok(d)
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure classes mapped to exit codes 2 (usage) and 3 (numeric).
enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotConverged { .. } | Error::Pole(_) | Error::ExhaustionExhausted { .. } => {
                Failure::Numeric(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Outcome<T> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn file_bytes(path: &Path) -> Vec<u8> {
    fs::read(path).unwrap_or_default()
}

/// What a command produced: an optional JSON artifact plus the report.
struct Run {
    artifact: Option<(serde_json::Value, Option<PathBuf>)>,
    report: RunReport,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let g = &cli.global;
    let q = match QuadratureSpec::new(g.nodes, g.tol, g.max_doublings) {
        Ok(q) => q,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match execute(&cli.command, g, &q) {
        Ok(mut run) => {
            run.report.timing = start.elapsed().as_secs_f64();
            finish(run, g)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("numeric failure: {m}");
            ExitCode::from(3)
        }
    }
}

fn finish(run: Run, g: &Global) -> ExitCode {
    let mut table_to_stderr = false;
    if let Some((value, path)) = run.artifact {
        let text = serde_json::to_string_pretty(&value).expect("artifact serializes");
        match path {
            Some(p) => {
                if let Err(e) = fs::write(&p, text + "\n") {
                    eprintln!("error: {}: {e}", p.display());
                    return ExitCode::from(2);
                }
            }
            None => {
                println!("{text}");
                table_to_stderr = true;
            }
        }
    }
    let table = run.report.to_table();
    if table_to_stderr {
        eprint!("{table}");
    } else {
        print!("{table}");
    }
    let writes = [
        (g.json_out.as_ref(), serde_json::to_string_pretty(&run.report).expect("report serializes") + "\n"),
        (g.csv.as_ref(), run.report.to_csv()),
    ];
    for (path, text) in writes {
        if let Some(p) = path {
            if let Err(e) = fs::write(p, text) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
    }
    if run.report.all_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("value serializes")
}

fn primitive(k: &MultiIndex) -> Outcome<PrimitiveIndex> {
    Ok(PrimitiveIndex::new(k.clone())?)
}

fn execute(cmd: &Command, g: &Global, q: &QuadratureSpec) -> Outcome<Run> {
    match cmd {
        Command::Kernel { op, n, degree, out } => {
            let named: NamedOperator = op.parse()?;
            let a = matrix_of(&named, *n, *degree)?;
            let k = phi_forward(&a);
            let mut report = RunReport::new(
                format!("kernel {op} -n {n} -D {degree}"),
                digest([op.as_bytes(), &n.to_le_bytes(), &degree.to_le_bytes()]),
            );
            if let Some((residual, tail)) = closed_form_check(&named, &k, *n, *degree)? {
                report.push("max |kernel - closed form| on grid", residual.0, tail, residual.1);
            }
            Ok(Run {
                artifact: Some((to_value(&k), out.clone())),
                report,
            })
        }
        Command::Apply { kernel, series, radius, out } => {
            let k: KernelCoefficients = read_json(kernel)?;
            let f: PowerSeries = read_json(series)?;
            let contour = Contour::centered(&vec![*radius; k.dim_zeta])?;
            let got = phi_inverse(&k, &f, &contour, q)?;
            let oracle = matrix_from_kernel(&k).apply(&f)?;
            let mut report = RunReport::new(
                format!("apply --radius {radius}"),
                digest([file_bytes(kernel).as_slice(), &file_bytes(series), &radius.to_le_bytes()]),
            );
            report.check_le("max |quadrature - matrix oracle| coefficient", max_coeff_diff(&got, &oracle), 1e-9);
            Ok(Run {
                artifact: Some((to_value(&got), out.clone())),
                report,
            })
        }
        Command::Project { series, domain, k, r, s, out } => {
            let f: PowerSeries = read_json(series)?;
            let dom = &domain.domain;
            let kp = primitive(k)?;
            let p = project(&f, &kp);
            let mut report = RunReport::new(
                format!("project -k {k} --r {r} --s {s}"),
                digest([file_bytes(series).as_slice(), to_value(dom).to_string().as_bytes()]),
            );
            let chk = projection_bound_check(&f, &kp, dom, *r, *s)?;
            report.push(format!("projection estimate k={k}"), chk.lhs, chk.rhs, chk.ok);
            if delta(dom, &kp).iter().all(|&x| x > 0.0) {
                let quad = project_quadrature(&f, &kp, dom, *s, q)?;
                report.check_le("contour form vs coefficient filter", max_coeff_diff(&quad, &p), 1e-8);
            }
            Ok(Run {
                artifact: Some((to_value(&p), out.clone())),
                report,
            })
        }
        Command::Decompose { series, domain, max_degree, r, s, out } => {
            let f: PowerSeries = read_json(series)?;
            let dom = &domain.domain;
            let dec = decompose(&f, dom, *max_degree, *r, *s)?;
            let mut report = RunReport::new(
                format!("decompose -N {max_degree} --r {r} --s {s}"),
                digest([file_bytes(series).as_slice(), to_value(dom).to_string().as_bytes()]),
            );
            let rem = sup_norm(&dec.remainder, dom, *r)?.lower;
            report.check_le("remainder beyond |k| <= N vs tail bound", rem, dec.residual_bound);
            let chk = identity_decomposition_check(&f, dom, *r, *s, *max_degree)?;
            report.push("remainder beyond |k| < N vs tail bound", chk.error_norm, chk.tail_bound, chk.ok);
            let fit = growth_criterion(&dec.parts, dom, *r)?;
            report.push("growth fit theta < 1", fit.theta, 1.0, fit.ok);
            for (k, part) in &dec.parts {
                let norm = sup_norm(part, dom, *r)?.upper;
                let env = fit.c * fit.theta.powi(k.degree() as i32);
                report.push(format!("part {k} norm"), norm, env, norm <= env * (1.0 + 1e-6));
            }
            let parts: Vec<serde_json::Value> = dec
                .parts
                .iter()
                .map(|(k, p)| json!({"k": k, "series": p}))
                .collect();
            let artifact = json!({
                "p0": {"re": dec.p0.re, "im": dec.p0.im},
                "parts": parts,
                "remainder": dec.remainder,
                "residual_bound": dec.residual_bound,
                "growth": fit,
            });
            Ok(Run {
                artifact: Some((artifact, out.clone())),
                report,
            })
        }
        Command::Extract {
            matrix,
            domain,
            codomain,
            max_degree,
            r,
            s,
            t,
            epsilon,
            probes,
            out,
        } => {
            let a: OperatorMatrix = read_json(matrix)?;
            let g1 = &domain.domain;
            let g2 = codomain.as_ref().unwrap_or(g1);
            let params = ExtractParams {
                max_degree: *max_degree,
                r: *r,
                s: *s,
                t: *t,
                epsilon: *epsilon,
                probes: *probes,
            };
            let mut rng = SplitMix64::new(g.seed);
            let fam = extract_blocks(&a, g1, g2, &params, &mut rng)?;
            let mut report = RunReport::new(
                format!("extract -N {max_degree} --r {r} --s {s} --t {t} --seed {}", g.seed),
                digest([file_bytes(matrix).as_slice(), to_value(g1).to_string().as_bytes()]),
            );
            for w in &fam.witnesses {
                report.push(format!("block {} bound witness", w.k), w.lhs, w.rhs, w.ok);
            }
            Ok(Run {
                artifact: Some((to_value(&fam), out.clone())),
                report,
            })
        }
        Command::Assemble { blocks, constant, compare, out } => {
            let fam: BlockFamily = read_json(blocks)?;
            let c = if *constant { fam.constant.as_ref() } else { None };
            let res = assemble(&fam, c)?;
            for k in &res.bound_violations {
                eprintln!("warning: block {k} violates the uniform bound on its probes");
            }
            let mut report = RunReport::new(
                format!("assemble{}", if *constant { " --constant" } else { "" }),
                digest([file_bytes(blocks).as_slice()]),
            );
            if let Some(path) = compare {
                let reference: OperatorMatrix = read_json(path)?;
                report.check_le(
                    "max entrywise |assembled - reference|",
                    res.matrix.max_abs_diff(&reference),
                    0.0,
                );
            }
            Ok(Run {
                artifact: Some((to_value(&res.matrix), out.clone())),
                report,
            })
        }
        Command::Dual {
            functional,
            n,
            degree,
            series,
            radius,
            growth_demo,
            out,
        } => {
            let mut report = RunReport::new(
                format!("dual -n {n} -D {degree}"),
                digest([functional.as_deref().unwrap_or("").as_bytes(), &n.to_le_bytes(), &degree.to_le_bytes()]),
            );
            if *growth_demo {
                let rows = dual_growth_demo(*n, *degree, &[1, 2, 4, 8, 16, 32])?;
                let mut prev = 0.0;
                for row in &rows {
                    report.push(format!("ratio N={}", row.n_param), row.ratio, prev, row.ratio > prev);
                    prev = row.ratio;
                }
                return Ok(Run {
                    artifact: Some((to_value(&rows), out.clone())),
                    report,
                });
            }
            let spec = functional
                .as_deref()
                .ok_or_else(|| Failure::Usage("a functional or --growth-demo is required".into()))?;
            let u: Functional = spec.parse()?;
            if let Functional::Coefficient(g) = &u {
                if g.dim() != *n {
                    return Err(Error::DimensionMismatch { expected: *n, found: g.dim() }.into());
                }
            }
            let kernel = dual_kernel_from_functional(|a| u.moment(a), *n, *degree);
            if let Some(path) = series {
                let f: PowerSeries = read_json(path)?;
                let contour = Contour::centered(&vec![*radius; *n])?;
                let quad = dual_pair(&kernel, &f, &contour, q)?;
                let exact = dual_pair_exact(&kernel, &f)?;
                report.push("pairing re", quad.re, exact.re, true);
                report.push("pairing im", quad.im, exact.im, true);
                report.check_le("|quadrature - coefficient sum|", (quad - exact).norm(), 1e-8);
            }
            Ok(Run {
                artifact: Some((to_value(&kernel), out.clone())),
                report,
            })
        }
        Command::Verify { suite } => {
            let report = verify::run(*suite, g.seed, q)?;
            Ok(Run { artifact: None, report })
        }
        Command::Report { path } => {
            let report: RunReport = read_json(path)?;
            Ok(Run { artifact: None, report })
        }
    }
}

/// Residual of the truncated kernel against its closed form on a grid with
/// `|ζ_j| ∈ [2, 3]`, `|z_j| ≤ 0.5`, and the truncation tail measured from a
/// longer expansion. Returns `((max residual, every point within its tail),
/// max tail)`.
fn closed_form_check(
    op: &NamedOperator,
    k: &KernelCoefficients,
    n: usize,
    degree: u32,
) -> Outcome<Option<((f64, bool), f64)>> {
    let probe = vec![Complex64::new(2.0, 0.0); n];
    if op.kernel_closed_form(&probe, &probe).is_none() {
        return Ok(None);
    }
    let long = phi_forward(&matrix_of(op, n, degree + 40)?);
    let tail_terms: BTreeMap<_, _> = long
        .entries()
        .filter(|((a, _), _)| a.degree() > degree)
        .map(|(key, v)| (key.clone(), v.norm()))
        .collect();
    let mut worst: f64 = 0.0;
    let mut worst_tail: f64 = 0.0;
    let mut all_ok = true;
    let grid: u32 = if n == 1 { 12 } else { 4 };
    let total = grid * grid;
    for flat in 0..total.pow(n as u32) {
        let mut rest = flat;
        let mut zeta = Vec::with_capacity(n);
        let mut z = Vec::with_capacity(n);
        for j in 0..n {
            let cell = rest % total;
            rest /= total;
            let (i, m) = ((cell / grid) as f64, (cell % grid) as f64);
            zeta.push(Complex64::from_polar(2.0 + i / grid as f64, 0.7 * m + 0.3 * j as f64));
            z.push(Complex64::from_polar(0.5 * m / grid as f64, 1.1 * i - 0.4 * j as f64));
        }
        let exact = op.kernel_closed_form(&zeta, &z).expect("closed form exists");
        let residual = (kernel_eval(k, &zeta, &z)? - exact).norm();
        let tail: f64 = tail_terms
            .iter()
            .map(|((a, b), v)| {
                let za: f64 = a.entries().iter().zip(&zeta).map(|(&e, w)| w.norm().powi(-(e as i32) - 1)).product();
                let zb: f64 = b.entries().iter().zip(&z).map(|(&e, w)| w.norm().powi(e as i32)).product();
                v * za * zb
            })
            .sum::<f64>()
            + 1e-14;
        all_ok &= residual <= tail;
        worst = worst.max(residual);
        worst_tail = worst_tail.max(tail);
    }
    Ok(Some(((worst, all_ok), worst_tail)))
}
