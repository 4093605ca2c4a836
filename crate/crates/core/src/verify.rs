//! Seeded property suites behind `holokern verify`.
//!
//! Every suite draws its probes from one [`SplitMix64`] stream, so equal seeds
//! give identical reports (timing aside).

use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;

use crate::circled::{
    assemble, decompose, extract_blocks, growth_criterion, identity_decomposition_check, project,
    project_quadrature, project_zero, projection_bound_check, topology_compare, ExtractParams,
};
use crate::domains::{eta_kkt_residual, eta_radii, Contour, CylindricalDomain, PlanarFactor, ReinhardtDomain};
use crate::error::{Error, Result};
use crate::kernelop::{
    dual_growth_demo, dual_kernel_from_functional, dual_pair, dual_pair_exact, kernel_eval, matrix_from_kernel,
    matrix_of, phi_forward, phi_inverse, NamedOperator,
};
use crate::multiindex::{count_degree, enumerate_indices, enumerate_primitives, indices_of_degree, primitive_factor, MultiIndex};
use crate::quadrature::{boundary_component_split, cauchy_transform_many, taylor_coeffs, QuadratureSpec};
use crate::report::{digest, RunReport};
use crate::rng::{random_polynomial, random_sparse_polynomial, SplitMix64};
use crate::series::{sup_norm, Holomorphic, PowerSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    MultiIndex,
    Series,
    Quadrature,
    KernelOp,
    Circled,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "multiindex" => Suite::MultiIndex,
            "series" => Suite::Series,
            "quadrature" => Suite::Quadrature,
            "kernelop" => Suite::KernelOp,
            "circled" => Suite::Circled,
            "all" => Suite::All,
            _ => return Err(Error::InvalidParameter(format!("unknown suite {s:?}"))),
        })
    }
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::MultiIndex => "multiindex",
            Suite::Series => "series",
            Suite::Quadrature => "quadrature",
            Suite::KernelOp => "kernelop",
            Suite::Circled => "circled",
            Suite::All => "all",
        }
    }
}

/// Runs a suite. Numerical failures inside a check are reported as failed
/// rows; only setup errors are returned as `Err`.
pub fn run(suite: Suite, seed: u64, q: &QuadratureSpec) -> Result<RunReport> {
    let start = Instant::now();
    let inputs = digest([suite.name().as_bytes(), &seed.to_le_bytes(), format!("{q:?}").as_bytes()]);
    let mut report = RunReport::new(format!("verify {} --seed {seed}", suite.name()), inputs);
    let mut rng = SplitMix64::new(seed);
    let parts: &[Suite] = match suite {
        Suite::All => &[Suite::MultiIndex, Suite::Series, Suite::Quadrature, Suite::KernelOp, Suite::Circled],
        _ => std::slice::from_ref(&suite),
    };
    for s in parts {
        match s {
            Suite::MultiIndex => multiindex_suite(&mut report),
            Suite::Series => series_suite(&mut report, &mut rng)?,
            Suite::Quadrature => quadrature_suite(&mut report, &mut rng, q)?,
            Suite::KernelOp => kernelop_suite(&mut report, &mut rng, q)?,
            Suite::Circled => circled_suite(&mut report, &mut rng, q)?,
            Suite::All => unreachable!(),
        }
    }
    report.timing = start.elapsed().as_secs_f64();
    Ok(report)
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn multiindex_suite(report: &mut RunReport) {
    for n in 1..=3usize {
        let mut unique = true;
        let mut counted = true;
        for d in 0..=12u32 {
            let level = indices_of_degree(n, d);
            counted &= level.len() as u64 == count_degree(n, d);
            for m in level.iter().filter(|m| !m.is_zero()) {
                // brute force: every (k, l) with l·k = m and gcd(k) = 1
                let hits: Vec<u32> = (1..=d)
                    .filter(|l| m.entries().iter().all(|e| e % l == 0))
                    .filter(|l| m.entries().iter().fold(0, |g, e| gcd(g, e / l)) == 1)
                    .collect();
                let fac = primitive_factor(m);
                unique &= hits.len() == 1
                    && fac.map(|(k, l)| l == hits[0] && k.as_index().scaled(l) == *m).unwrap_or(false);
            }
        }
        report.check(format!("multiindex: unique primitive factorization n={n} |m|<=12"), unique);
        report.check(format!("multiindex: count_degree matches enumeration n={n}"), counted);
        let all = enumerate_indices(n, 6);
        report.check(
            format!("multiindex: graded-lex enumeration sorted n={n}"),
            all.windows(2).all(|w| w[0] < w[1]),
        );
    }
    report.check(
        "multiindex: zero has no factorization",
        primitive_factor(&MultiIndex::zero(2)) == Err(Error::ZeroMultiIndex),
    );
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn series_suite(report: &mut RunReport, rng: &mut SplitMix64) -> Result<()> {
    let mut dil_err: f64 = 0.0;
    let mut ring_err: f64 = 0.0;
    let mut bracket_ok = true;
    for _ in 0..20 {
        let n = 1 + rng.below(3) as usize;
        let f = random_polynomial(rng, n, 5);
        let g = random_polynomial(rng, n, 5);
        let (a, b) = (rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0));
        let z: Vec<Complex64> = (0..n).map(|_| rng.point_in_disc(1.0)).collect();
        let lhs = f.dilate(a)?.dilate(b)?.eval(&z)?;
        dil_err = dil_err.max((lhs - f.dilate(a * b)?.eval(&z)?).norm());
        let fg = f.try_mul(&g, 10)?;
        ring_err = ring_err.max((fg.eval(&z)? - f.eval(&z)? * g.eval(&z)?).norm());
        let sum = f.try_add(&g)?;
        ring_err = ring_err.max((sum.eval(&z)? - f.eval(&z)? - g.eval(&z)?).norm());
        for dom in domain_kinds(n) {
            let nb = sup_norm(&f, &dom, 0.8)?;
            bracket_ok &= nb.lower <= nb.upper && nb.lower > 0.0;
        }
    }
    report.check_le("series: dilation composes (max abs err)", dil_err, 1e-12);
    report.check_le("series: product/sum agree with pointwise values", ring_err, 1e-10);
    report.check("series: sup-norm bracket lower <= upper", bracket_ok);

    let pd = ReinhardtDomain::unit_polydisc(2);
    let nb = sup_norm(&PowerSeries::from_terms(2, 2, [(MultiIndex::from([1, 0]), c(1.0)), (MultiIndex::from([0, 1]), c(1.0))])?, &pd, 0.5)?;
    report.check_le("series: sup-norm z1+z2 on 0.5 polydisc", (nb.lower - 1.0).abs() + (nb.upper - 1.0).abs(), 1e-12);
    Ok(())
}

fn domain_kinds(n: usize) -> Vec<ReinhardtDomain> {
    let mut v = vec![ReinhardtDomain::unit_polydisc(n), ReinhardtDomain::Ball { dim: n, radius: 1.0 }];
    let p: Vec<f64> = (0..n).map(|j| if j % 2 == 0 { 2.0 } else { 4.0 }).collect();
    v.push(ReinhardtDomain::Pellipsoid { radii: vec![1.0; n], p });
    v
}

fn quadrature_suite(report: &mut RunReport, rng: &mut SplitMix64, q: &QuadratureSpec) -> Result<()> {
    let mut cauchy_err: f64 = 0.0;
    let mut taylor_err: f64 = 0.0;
    for _ in 0..10 {
        let n = 1 + rng.below(2) as usize;
        let f = random_polynomial(rng, n, 8);
        let contour = Contour::centered(&vec![1.25; n])?;
        let pts: Vec<Vec<Complex64>> = (0..10).map(|_| (0..n).map(|_| rng.point_in_disc(1.0)).collect()).collect();
        let vals = cauchy_transform_many(&|z: &[Complex64]| f.value(z), &contour, &pts, q)?;
        for (z, v) in pts.iter().zip(vals) {
            cauchy_err = cauchy_err.max((v - f.eval(z)?).norm());
        }
        let idx = enumerate_indices(n, 8);
        let coeffs = taylor_coeffs(&|z: &[Complex64]| f.value(z), &contour, &idx, q)?;
        for (m, v) in idx.iter().zip(coeffs) {
            taylor_err = taylor_err.max((v - f.coeff(m)).norm());
        }
    }
    report.check_le("quadrature: Cauchy transform reproduces polynomials", cauchy_err, 1e-9);
    report.check_le("quadrature: Taylor coefficients of polynomials", taylor_err, 1e-9);

    let (err, classified) = split_check(2, q)?;
    report.check_le("quadrature: boundary components sum to f (annuli, n=2)", err, 1e-8);
    report.check("quadrature: monomial z1^-1 z2^2 lands in (inner, outer) only", classified);
    Ok(())
}

/// Sum of boundary components against `f` on an interior grid, and the
/// classification of a Laurent monomial.
pub fn split_check(n: usize, q: &QuadratureSpec) -> Result<(f64, bool)> {
    let factors: Vec<PlanarFactor> = (0..n)
        .map(|j| {
            if j % 2 == 0 {
                PlanarFactor::annulus(c(0.0), 0.5, 2.0)
            } else {
                PlanarFactor::annulus(Complex64::new(0.1, -0.2), 0.4, 1.5)
            }
        })
        .collect::<Result<_>>()?;
    let domain = CylindricalDomain::new(factors)?;
    let centers: Vec<Complex64> = domain.factors.iter().map(PlanarFactor::center).collect();
    let f = |z: &[Complex64]| -> Complex64 {
        z.iter()
            .zip(&centers)
            .enumerate()
            .map(|(j, (w, a))| {
                let u = w - a;
                (u - 4.0).inv() + 0.05 / (u * (u - 0.1)) + u.powu(j as u32 + 1)
            })
            .product()
    };
    let parts = boundary_component_split(&f, &domain, 48, q)?;
    let mut err: f64 = 0.0;
    for i in 0..5 {
        for j in 0..5 {
            let z: Vec<Complex64> = (0..n)
                .map(|d| {
                    let (inner, outer) = if d % 2 == 0 { (0.5, 2.0) } else { (0.4, 1.5) };
                    let rad = inner + (outer - inner) * (0.25 + 0.125 * ((i + d) % 5) as f64);
                    centers[d] + Complex64::from_polar(rad, 0.7 * j as f64 + 0.3 * d as f64)
                })
                .collect();
            let total: Complex64 = parts.iter().map(|p| p.eval(&z)).sum::<Result<Complex64>>()?;
            err = err.max((total - f(&z)).norm());
        }
    }

    let mono = |z: &[Complex64]| {
        let u: Vec<Complex64> = z.iter().zip(&centers).map(|(w, a)| w - a).collect();
        u[0].inv() * if n > 1 { u[1].powu(2) } else { c(1.0) }
    };
    let parts = boundary_component_split(&mono, &domain, 6, q)?;
    let mut classified = true;
    for p in &parts {
        let want = p.sides[0] == crate::quadrature::Side::Inner
            && (n == 1 || p.sides[1] == crate::quadrature::Side::Outer);
        let expect_idx: Vec<u32> = (0..n).map(|d| if d == 1 { 2 } else { 0 }).collect();
        for (e, v) in &p.coeffs {
            let target = want && e.entries() == expect_idx.as_slice();
            classified &= if target { (v - c(1.0)).norm() < 1e-12 } else { v.norm() < 1e-12 };
        }
        if want {
            classified &= (p.coeff(&MultiIndex::new(expect_idx)) - c(1.0)).norm() < 1e-12;
        }
    }
    Ok((err, classified))
}

fn kernelop_suite(report: &mut RunReport, rng: &mut SplitMix64, q: &QuadratureSpec) -> Result<()> {
    for n in 1..=2usize {
        let d = 6;
        let contour = Contour::centered(&vec![1.0; n])?;
        let mut bijective = true;
        let mut oracle_err: f64 = 0.0;
        for op in NamedOperator::zoo(n) {
            let a = matrix_of(&op, n, d)?;
            let k = phi_forward(&a);
            bijective &= matrix_from_kernel(&k) == a && phi_forward(&matrix_from_kernel(&k)) == k;
            for _ in 0..3 {
                let f = random_polynomial(rng, n, d);
                let got = phi_inverse(&k, &f, &contour, q)?;
                let want = a.apply(&f)?;
                oracle_err = oracle_err.max(max_coeff_diff(&got, &want));
            }
        }
        report.check(format!("kernelop: correspondence bijective on zoo n={n}"), bijective);
        report.check_le(format!("kernelop: inverse matches M*c_f on zoo n={n}"), oracle_err, 1e-9);

        let mut gram_err: f64 = 0.0;
        let idx = enumerate_indices(n, 4);
        for alpha in &idx {
            let u = dual_kernel_from_functional(
                |m| if m == alpha { c(1.0) } else { c(0.0) },
                n,
                4,
            );
            for beta in &idx {
                let f = PowerSeries::monomial(beta.clone(), c(1.0));
                let v = dual_pair(&u, &f, &contour, q)?;
                let want = if alpha == beta { 1.0 } else { 0.0 };
                gram_err = gram_err.max((v - c(want)).norm());
            }
        }
        report.check_le(format!("kernelop: Gram matrix is identity n={n} deg<=4"), gram_err, 1e-10);

        let mut pair_err: f64 = 0.0;
        for _ in 0..5 {
            let u = crate::series::LaurentSeries::from_terms(
                n,
                5,
                random_sparse_polynomial(rng, n, 5, 0.5).terms().map(|(m, v)| (m.clone(), *v)),
            )?;
            let f = random_polynomial(rng, n, 5);
            pair_err = pair_err.max((dual_pair(&u, &f, &contour, q)? - dual_pair_exact(&u, &f)?).norm());
        }
        report.check_le(format!("kernelop: pairing quadrature vs coefficient sum n={n}"), pair_err, 1e-8);

        let id = phi_forward(&matrix_of(&NamedOperator::Identity, n, 10)?);
        let mut closed_err: f64 = 0.0;
        let mut decay_ok = true;
        for _ in 0..20 {
            let zeta: Vec<Complex64> = (0..n).map(|_| Complex64::from_polar(rng.uniform(2.0, 4.0), rng.uniform(0.0, 6.3))).collect();
            let z: Vec<Complex64> = (0..n).map(|_| rng.point_in_disc(0.5)).collect();
            let exact = NamedOperator::Identity.kernel_closed_form(&zeta, &z).expect("closed form");
            closed_err = closed_err.max((kernel_eval(&id, &zeta, &z)? - exact).norm());
            let far: Vec<Complex64> = zeta.iter().map(|w| w * rng.uniform(1.0, 50.0)).collect();
            let min = far.iter().map(|w| w.norm()).fold(f64::INFINITY, f64::min);
            decay_ok &= kernel_eval(&id, &far, &z)?.norm() <= id.decay_constant(&z) / min * (1.0 + 1e-12);
        }
        report.check_le(
            format!("kernelop: identity kernel vs closed form n={n}"),
            closed_err,
            2.0 * 0.25f64.powi(11),
        );
        report.check(format!("kernelop: kernel vanishes like 1/min|zeta| n={n}"), decay_ok);
    }
    let rows = dual_growth_demo(1, 60, &[2, 4, 8, 16])?;
    report.check(
        "kernelop: dual growth ratios strictly increase over N=2,4,8,16",
        rows.windows(2).all(|w| w[1].ratio > w[0].ratio),
    );
    Ok(())
}

/// Largest coefficientwise difference of two series.
pub fn max_coeff_diff(a: &PowerSeries, b: &PowerSeries) -> f64 {
    a.terms()
        .map(|(m, v)| (v - b.coeff(m)).norm())
        .chain(b.terms().map(|(m, v)| (v - a.coeff(m)).norm()))
        .fold(0.0, f64::max)
}

fn circled_suite(report: &mut RunReport, rng: &mut SplitMix64, q: &QuadratureSpec) -> Result<()> {
    let mut idem = true;
    let mut complete = true;
    for _ in 0..10 {
        let n = 1 + rng.below(3) as usize;
        let f = random_polynomial(rng, n, 5);
        let ks = enumerate_primitives(n, 5);
        for k in &ks {
            let p = project(&f, k);
            idem &= project(&p, k) == p;
            idem &= ks.iter().filter(|k2| *k2 != k).all(|k2| project(&p, k2).is_zero());
        }
        let dec = decompose(&f, &ReinhardtDomain::unit_polydisc(n), 5, 0.3, 0.6)?;
        complete &= dec.remainder.is_zero() && dec.reconstruct()? == f && dec.p0 == project_zero(&f);
    }
    report.check("circled: projections idempotent and mutually orthogonal", idem);
    report.check("circled: p0 + sum of parts reconstructs polynomials", complete);

    let mut quad_err: f64 = 0.0;
    for dom in [ReinhardtDomain::unit_polydisc(2), ReinhardtDomain::Ball { dim: 2, radius: 1.0 }] {
        let f = random_polynomial(rng, 2, 6);
        for k in enumerate_primitives(2, 3) {
            if eta_radii(&dom, k.as_index()).iter().any(|&r| r <= 0.0) {
                continue;
            }
            let got = project_quadrature(&f, &k, &dom, 0.9, q)?;
            quad_err = quad_err.max(max_coeff_diff(&got, &project(&f, &k)));
        }
    }
    report.check_le("circled: contour projection matches coefficient filter", quad_err, 1e-8);

    let pairs = [(0.2, 0.5), (0.5, 0.8), (0.25, 0.5)];
    for dom in domain_kinds(2) {
        let mut proj_ok = true;
        let mut topo_ok = true;
        let mut ident_ok = true;
        for &(r, s) in &pairs {
            for _ in 0..5 {
                let f = random_polynomial(rng, 2, 6);
                for k in enumerate_primitives(2, 2) {
                    proj_ok &= projection_bound_check(&f, &k, &dom, r, s)?.ok;
                    topo_ok &= topology_compare(&project(&f, &k), &k, &dom, r, s)?.ok;
                }
                ident_ok &= identity_decomposition_check(&f, &dom, r, s, 3)?.ok;
            }
        }
        let kind = dom.kind_name();
        report.check(format!("circled: projection estimate holds ({kind})"), proj_ok);
        report.check(format!("circled: H_k norm comparison holds ({kind})"), topo_ok);
        report.check(format!("circled: decomposition remainder within tail ({kind})"), ident_ok);
        let k = MultiIndex::from([1, 2]);
        report.check_le(
            format!("circled: eta KKT residual ({kind})"),
            eta_kkt_residual(&dom, &k, &eta_radii(&dom, &k)),
            1e-9,
        );
    }

    let pd = ReinhardtDomain::unit_polydisc(2);
    let mut round_trip = true;
    let mut witnesses = true;
    for op in NamedOperator::zoo(2) {
        let a = matrix_of(&op, 2, 5)?;
        let params = ExtractParams {
            max_degree: 5,
            r: 0.5,
            s: 0.8,
            t: 0.5,
            epsilon: None,
            probes: 1,
        };
        let fam = extract_blocks(&a, &pd, &pd, &params, rng)?;
        let back = assemble(&fam, fam.constant.as_ref())?;
        round_trip &= back.matrix == a;
        witnesses &= back.bound_violations.is_empty();
    }
    report.check("circled: extract then assemble reproduces the zoo", round_trip);
    report.check("circled: block bound witnesses", witnesses);

    let geom: BTreeMap<_, _> = enumerate_primitives(2, 8)
        .into_iter()
        .map(|k| {
            let p = PowerSeries::monomial(k.as_index().clone(), c(0.6f64.powi(k.degree() as i32)));
            (k, p)
        })
        .collect();
    let fit = growth_criterion(&geom, &pd, 1.0)?;
    report.check_le("circled: growth fit recovers theta=0.6", (fit.theta - 0.6).abs(), 0.02);
    let flat: BTreeMap<_, _> = enumerate_primitives(2, 8)
        .into_iter()
        .map(|k| (k.clone(), PowerSeries::monomial(k.as_index().clone(), c(1.0))))
        .collect();
    report.check("circled: constant-norm family rejected", !growth_criterion(&flat, &pd, 1.0)?.ok);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_and_are_deterministic() {
        let q = QuadratureSpec::default();
        let a = run(Suite::All, 7, &q).unwrap();
        let failed: Vec<_> = a.rows.iter().filter(|r| !r.ok).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        let b = run(Suite::All, 7, &q).unwrap();
        assert_eq!(a.canonical_json(), b.canonical_json());
    }

    #[test]
    fn unknown_suite() {
        assert!("nosuch".parse::<Suite>().is_err());
    }
}
