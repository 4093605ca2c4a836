//! Acceptance criteria. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; exits nonzero if any fails.
#![allow(clippy::approx_constant)]

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use holokern::circled::{
    assemble, extract_blocks, growth_criterion, identity_decomposition_check, project, project_quadrature,
    projection_bound_check, ExtractParams,
};
use holokern::domains::{eta_radii, monomial_max, Contour, CylindricalDomain, PlanarFactor, ReinhardtDomain};
use holokern::kernelop::{
    dual_growth_demo, dual_kernel_from_functional, dual_pair, matrix_from_kernel, matrix_of, phi_forward, phi_inverse,
    NamedOperator,
};
use holokern::multiindex::{enumerate_indices, enumerate_primitives, primitive_factor};
use holokern::quadrature::{boundary_component_split, cauchy_transform_many, QuadratureSpec, Side};
use holokern::rng::{random_polynomial, SplitMix64};
use holokern::series::{Holomorphic, LaurentSeries};
use holokern::{Complex64, MultiIndex, PowerSeries, PrimitiveIndex};

const BUDGET: Duration = Duration::from_secs(60);

type Check = Result<String, String>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn q() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `Σ c_m z^m` evaluated term by term.
fn eval_direct(f: &PowerSeries, z: &[Complex64]) -> Complex64 {
    f.terms()
        .map(|(m, v)| m.entries().iter().zip(z).fold(*v, |acc, (&e, w)| acc * w.powu(e)))
        .sum()
}

fn max_diff(a: &PowerSeries, b: &BTreeMap<MultiIndex, Complex64>) -> f64 {
    let mut worst: f64 = 0.0;
    for (m, v) in a.terms() {
        worst = worst.max((v - b.get(m).copied().unwrap_or(c(0.0))).norm());
    }
    for (m, v) in b {
        worst = worst.max((v - a.coeff(m)).norm());
    }
    worst
}

/// Image of `f` under a zoo operator, from the definition of the operator.
fn apply_definition(op: &NamedOperator, f: &PowerSeries) -> BTreeMap<MultiIndex, Complex64> {
    let mut out = BTreeMap::new();
    for (m, v) in f.terms() {
        let e = m.entries();
        let (idx, w): (Vec<u32>, Complex64) = match op {
            NamedOperator::Identity => (e.to_vec(), *v),
            NamedOperator::Partial(j) => {
                if e[*j] == 0 {
                    continue;
                }
                let mut i = e.to_vec();
                i[*j] -= 1;
                (i, v * f64::from(e[*j]))
            }
            NamedOperator::Euler => (e.to_vec(), v * f64::from(e.iter().sum::<u32>())),
            NamedOperator::Hadamard(_) => (e.to_vec(), v * 2f64.powi(-(e.iter().sum::<u32>() as i32))),
            NamedOperator::Dilation(s) => (e.to_vec(), v * s.powi(e.iter().sum::<u32>() as i32)),
            NamedOperator::MonomialMultiplier(g) => (e.iter().zip(g.entries()).map(|(a, b)| a + b).collect(), *v),
        };
        *out.entry(MultiIndex::new(idx)).or_insert(c(0.0)) += w;
    }
    out
}

fn criterion_1() -> Check {
    let mut rng = SplitMix64::new(101);
    let mut worst: f64 = 0.0;
    for n in 1..=2 {
        let contour = Contour::centered(&vec![1.0; n]).unwrap();
        for op in NamedOperator::zoo(n) {
            let a = matrix_of(&op, n, 8).map_err(|e| e.to_string())?;
            let k = phi_forward(&a);
            ensure(matrix_from_kernel(&k) == a, || format!("{op} n={n}: matrix round trip not exact"))?;
            for _ in 0..20 {
                let f = random_polynomial(&mut rng, n, 8);
                let got = phi_inverse(&k, &f, &contour, &q()).map_err(|e| e.to_string())?;
                let d = max_diff(&got, &apply_definition(&op, &f));
                worst = worst.max(d);
                ensure(d <= 1e-9, || format!("{op} n={n}: inverse deviates by {d:e}"))?;
            }
        }
    }
    Ok(format!("6 operators, n=1,2, D=8, 20 polynomials each; max coefficient error {worst:.2e} <= 1e-9"))
}

fn criterion_2() -> Check {
    let mut rng = SplitMix64::new(202);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let n = 1 + i % 2;
        let deg = 1 + rng.below(12) as u32;
        let f = random_polynomial(&mut rng, n, deg);
        let contour = Contour::centered(&vec![1.25; n]).unwrap();
        let pts: Vec<Vec<Complex64>> = (0..50).map(|_| (0..n).map(|_| rng.point_in_disc(1.0)).collect()).collect();
        let vals = cauchy_transform_many(&|z: &[Complex64]| f.value(z), &contour, &pts, &q()).map_err(|e| e.to_string())?;
        for (z, v) in pts.iter().zip(vals) {
            worst = worst.max((v - eval_direct(&f, z)).norm());
        }
    }
    ensure(worst <= 1e-9, || format!("Cauchy reproduction error {worst:e}"))?;
    let mut id_worst: f64 = 0.0;
    for n in 1..=2 {
        let k = phi_forward(&matrix_of(&NamedOperator::Identity, n, 10).unwrap());
        let contour = Contour::centered(&vec![1.0; n]).unwrap();
        for _ in 0..10 {
            let f = random_polynomial(&mut rng, n, 10);
            let g = phi_inverse(&k, &f, &contour, &q()).map_err(|e| e.to_string())?;
            let want: BTreeMap<_, _> = f.terms().map(|(m, v)| (m.clone(), *v)).collect();
            id_worst = id_worst.max(max_diff(&g, &want));
        }
    }
    ensure(id_worst <= 1e-9, || format!("identity kernel error {id_worst:e}"))?;
    Ok(format!(
        "50 polynomials x 50 points: max error {worst:.2e}; identity kernel max error {id_worst:.2e} (both <= 1e-9)"
    ))
}

fn criterion_3() -> Check {
    let mut gram: f64 = 0.0;
    for n in 1..=2usize {
        let contour = Contour::centered(&vec![1.0; n]).unwrap();
        let basis = enumerate_indices(n, 6);
        for alpha in &basis {
            let u = dual_kernel_from_functional(|m| if m == alpha { c(1.0) } else { c(0.0) }, n, 6);
            // the kernel of the coefficient functional is (-1)^n λ^{-(α+1)}
            ensure(u.len() == 1 && u.coeff(alpha) == c(if n % 2 == 0 { 1.0 } else { -1.0 }), || {
                format!("dual basis element for {alpha} malformed")
            })?;
            for beta in &basis {
                let f = PowerSeries::monomial(beta.clone(), c(1.0));
                let v = dual_pair(&u, &f, &contour, &q()).map_err(|e| e.to_string())?;
                gram = gram.max((v - c(if alpha == beta { 1.0 } else { 0.0 })).norm());
            }
        }
    }
    ensure(gram <= 1e-10, || format!("Gram deviation {gram:e}"))?;

    let mut rng = SplitMix64::new(303);
    let mut pair: f64 = 0.0;
    for i in 0..20 {
        let n = 1 + i % 2;
        let f = random_polynomial(&mut rng, n, 6);
        let d = random_polynomial(&mut rng, n, 6);
        let u = LaurentSeries::from_terms(n, 6, d.terms().map(|(m, v)| (m.clone(), *v))).unwrap();
        let contour = Contour::centered(&vec![rng.uniform(0.8, 1.5); n]).unwrap();
        let quad = dual_pair(&u, &f, &contour, &q()).map_err(|e| e.to_string())?;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let oracle: Complex64 = d.terms().map(|(m, v)| v * f.coeff(m)).sum::<Complex64>() * sign;
        pair = pair.max((quad - oracle).norm());
    }
    ensure(pair <= 1e-8, || format!("pairing vs coefficient sum {pair:e}"))?;

    let rows = dual_growth_demo(1, 200, &[2, 4, 8, 16]).map_err(|e| e.to_string())?;
    // independent ratio: Σ (a+1) q^a / Σ q^a over a ≤ 200
    for row in &rows {
        let qn = 1.0 - 1.0 / f64::from(row.n_param);
        let num: f64 = (0..=200).map(|a| (a as f64 + 1.0) * qn.powi(a)).sum();
        let den: f64 = (0..=200).map(|a| qn.powi(a)).sum();
        ensure((row.ratio - num / den).abs() <= 1e-9 * num / den, || format!("growth ratio N={} off", row.n_param))?;
    }
    ensure(rows.windows(2).all(|w| w[1].ratio > w[0].ratio), || "growth ratios not increasing".into())?;
    let ratios: Vec<String> = rows.iter().map(|r| format!("{:.3}", r.ratio)).collect();
    Ok(format!(
        "Gram deviation {gram:.2e} <= 1e-10; pairing vs oracle {pair:.2e} <= 1e-8; growth ratios N=2,4,8,16: {}",
        ratios.join(" < ")
    ))
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn criterion_4() -> Check {
    let mut checked = 0usize;
    for n in 1..=4usize {
        for m in enumerate_indices(n, 30) {
            if m.is_zero() {
                ensure(primitive_factor(&m).is_err(), || "zero index factored".into())?;
                continue;
            }
            let deg = m.degree();
            let mut found = Vec::new();
            for l in 1..=deg {
                if m.entries().iter().all(|e| e % l == 0) {
                    let k: Vec<u32> = m.entries().iter().map(|e| e / l).collect();
                    if k.iter().fold(0, |g, &e| gcd(g, e)) == 1 {
                        found.push((k, l));
                    }
                }
            }
            let (k, l) = primitive_factor(&m).map_err(|e| e.to_string())?;
            ensure(found.len() == 1 && found[0].0 == k.entries() && found[0].1 == l, || {
                format!("factorization of {m}: brute force {found:?}, library ({k}, {l})")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} nonzero indices (n<=4, |m|<=30) have exactly one factorization, matched exactly"))
}

fn ball2() -> ReinhardtDomain {
    ReinhardtDomain::ball(2, 1.0).unwrap()
}

fn ellipsoid24() -> ReinhardtDomain {
    ReinhardtDomain::pellipsoid(vec![1.0, 1.0], vec![2.0, 4.0]).unwrap()
}

fn criterion_5() -> Check {
    let mut rng = SplitMix64::new(505);
    let mut quad: f64 = 0.0;
    let mut cases = 0;
    for (dom, positive_only) in [(ReinhardtDomain::unit_polydisc(2), false), (ball2(), true)] {
        for k in enumerate_primitives(2, 4) {
            if positive_only && k.entries().contains(&0) {
                continue;
            }
            let f = random_polynomial(&mut rng, 2, 8);
            let got = project_quadrature(&f, &k, &dom, 0.9, &q()).map_err(|e| e.to_string())?;
            let want: BTreeMap<_, _> = f
                .terms()
                .filter(|(m, _)| {
                    let g = m.entries().iter().fold(0, |g, &e| gcd(g, e));
                    g > 0 && m.entries().iter().map(|e| e / g).eq(k.entries().iter().copied())
                })
                .map(|(m, v)| (m.clone(), *v))
                .collect();
            quad = quad.max(max_diff(&got, &want));
            cases += 1;
        }
    }
    ensure(quad <= 1e-8, || format!("contour projection error {quad:e}"))?;
    let ball_err = project_quadrature(&random_polynomial(&mut rng, 2, 3), &PrimitiveIndex::new(MultiIndex::from([1, 0])).unwrap(), &ball2(), 0.9, &q());
    ensure(ball_err.is_err(), || "degenerate Δ(k) accepted".into())?;

    for n in 1..=3usize {
        let f = random_polynomial(&mut rng, n, 10);
        let ks = enumerate_primitives(n, 5);
        for k in &ks {
            let p = project(&f, k);
            ensure(project(&p, k) == p, || format!("P_k not idempotent for {k}"))?;
            for k2 in &ks {
                ensure(k2 == k || project(&p, k2).is_zero(), || format!("P_{k2} P_{k} != 0"))?;
            }
        }
    }

    let mut checks = 0;
    for dom in [ReinhardtDomain::unit_polydisc(2), ball2(), ellipsoid24()] {
        for (r, s) in [(0.2, 0.5), (0.5, 0.8), (0.6, 0.9)] {
            let ks = enumerate_primitives(2, 3);
            for i in 0..100 {
                let f = random_polynomial(&mut rng, 2, 6);
                let k = &ks[i % ks.len()];
                let chk = projection_bound_check(&f, k, &dom, r, s).map_err(|e| e.to_string())?;
                ensure(chk.ok, || format!("{} r={r} s={s} k={k}: {chk:?}", dom.kind_name()))?;
                checks += 1;
            }
        }
    }
    Ok(format!(
        "contour vs filter {quad:.2e} <= 1e-8 on {cases} (domain,k); idempotence/orthogonality exact; {checks} projection estimates ok"
    ))
}

/// Coefficient-one polynomial of degree `d` in two variables.
fn ones(d: u32) -> PowerSeries {
    PowerSeries::from_terms(2, d, enumerate_indices(2, d).into_iter().map(|m| (m, c(1.0)))).unwrap()
}

fn criterion_6() -> Check {
    let mut rng = SplitMix64::new(606);
    let mut configs = 0;
    for dom in [ReinhardtDomain::unit_polydisc(2), ball2(), ellipsoid24()] {
        for (r, s, big_n) in [(0.25, 0.5, 2), (0.3, 0.9, 4), (0.4, 0.6, 3)] {
            for _ in 0..10 {
                let f = random_polynomial(&mut rng, 2, 8);
                let chk = identity_decomposition_check(&f, &dom, r, s, big_n).map_err(|e| e.to_string())?;
                ensure(chk.ok, || format!("{} r={r} s={s} N={big_n}: {chk:?}", dom.kind_name()))?;
                configs += 1;
            }
        }
    }
    let f = ones(40);
    let pd = ReinhardtDomain::unit_polydisc(2);
    let (r, s, theta) = (0.25, 0.5, 0.5);
    let mut errs = Vec::new();
    for big_n in 2..=5u32 {
        let chk = identity_decomposition_check(&f, &pd, r, s, big_n).map_err(|e| e.to_string())?;
        ensure(chk.ok, || format!("geometric series N={big_n}: {chk:?}"))?;
        // positive coefficients: the sup over the polydisc is the sum at z = (r, r)
        let oracle: f64 = f
            .terms()
            .filter(|(m, _)| {
                let g = m.entries().iter().fold(0, |g, &e| gcd(g, e));
                g > 0 && m.degree() / g >= big_n
            })
            .map(|(m, _)| r.powi(m.degree() as i32))
            .sum();
        ensure((chk.error_norm - oracle).abs() <= 1e-12 * oracle, || {
            format!("remainder norm {} vs direct sum {oracle}", chk.error_norm)
        })?;
        errs.push(chk.error_norm);
    }
    let ratios: Vec<f64> = errs.windows(2).map(|w| w[1] / w[0]).collect();
    ensure(ratios.iter().all(|&x| x <= theta + 0.05), || format!("decay ratios {ratios:?}"))?;
    let shown: Vec<String> = ratios.iter().map(|x| format!("{x:.3}")).collect();
    Ok(format!(
        "{configs} configurations within tail bound; decay ratios N=2..5: {} <= {}",
        shown.join(", "),
        theta + 0.05
    ))
}

/// `max Π ρ_j^{k_j}` over the boundary profile `ρ_j = t_j^{1/p_j}` of the
/// unit p-ellipsoid in two variables: grid in `t`, then golden-section
/// refinement of the best cell.
fn eta_oracle(k: &MultiIndex, p: [f64; 2]) -> Vec<f64> {
    let radii = |t: f64| [t.powf(1.0 / p[0]), (1.0 - t).powf(1.0 / p[1])];
    let value = |t: f64| {
        let rho = radii(t);
        k.entries()
            .iter()
            .zip(rho)
            .map(|(&e, x)| if e == 0 { 1.0 } else { x.powi(e as i32) })
            .product::<f64>()
    };
    let steps: u32 = 10_000;
    let best = (0..=steps)
        .max_by(|&a, &b| value(a as f64 / steps as f64).total_cmp(&value(b as f64 / steps as f64)))
        .unwrap();
    let (mut lo, mut hi) = (
        (best.saturating_sub(1)) as f64 / steps as f64,
        (best + 1).min(steps) as f64 / steps as f64,
    );
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if value(a) < value(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for edge in [0.0, 1.0] {
        if value(edge) >= value(t) {
            t = edge;
        }
    }
    radii(t).to_vec()
}

fn criterion_7() -> Check {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (dom, p) in [(ball2(), [2.0, 2.0]), (ellipsoid24(), [2.0, 4.0])] {
        for k in enumerate_indices(2, 6).into_iter().filter(|m| !m.is_zero()) {
            let got = eta_radii(&dom, &k);
            let want = eta_oracle(&k, p);
            let d = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst = worst.max(d);
            ensure(d <= 1e-4, || format!("{} k={k}: {got:?} vs oracle {want:?}", dom.kind_name()))?;
            count += 1;
        }
    }
    let k11 = MultiIndex::from([1, 1]);
    let eta = eta_radii(&ball2(), &k11);
    ensure(eta.iter().all(|x| (x - 0.70711).abs() <= 1e-4), || format!("ball (1,1): {eta:?}"))?;
    let mm = monomial_max(&ball2(), &k11);
    ensure((mm - 0.5).abs() <= 1e-6, || format!("ball (1,1) monomial max {mm}"))?;
    Ok(format!(
        "{count} (domain,k) pairs within {worst:.2e} <= 1e-4 of grid search; ball (1,1) -> ({:.5}, {:.5}), max |z1 z2| = {mm:.6}",
        eta[0], eta[1]
    ))
}

fn criterion_8() -> Check {
    let mut rng = SplitMix64::new(808);
    let mut blocks = 0;
    for dom in [ReinhardtDomain::unit_polydisc(2), ball2()] {
        for op in NamedOperator::zoo(2) {
            let a = matrix_of(&op, 2, 6).map_err(|e| e.to_string())?;
            let params = ExtractParams {
                max_degree: 6,
                r: 0.5,
                s: 0.8,
                t: 0.6,
                epsilon: None,
                probes: 2,
            };
            let fam = extract_blocks(&a, &dom, &dom, &params, &mut rng).map_err(|e| e.to_string())?;
            let back = assemble(&fam, fam.constant.as_ref()).map_err(|e| e.to_string())?;
            ensure(back.matrix == a, || format!("{op} on {}: round trip differs", dom.kind_name()))?;
            for w in &fam.witnesses {
                ensure(w.ok, || format!("{op} on {}: witness {w:?}", dom.kind_name()))?;
            }
            // restriction property on the subspaces H_k
            for k in enumerate_primitives(2, 3) {
                let f = project(&random_polynomial(&mut rng, 2, 6), &k);
                let lhs = back.matrix.apply(&f).map_err(|e| e.to_string())?;
                let rhs = fam.blocks[&k].apply(&f).map_err(|e| e.to_string())?;
                ensure(lhs == rhs, || format!("{op}: A|H_k differs from A_k for k={k}"))?;
            }
            blocks += fam.witnesses.len();
        }
    }
    Ok(format!("6 operators on polydisc and ball reassembled exactly; {blocks} block witnesses ok"))
}

fn criterion_9() -> Check {
    let domains = vec![
        vec![PlanarFactor::annulus(c(0.0), 0.5, 2.0).unwrap()],
        vec![
            PlanarFactor::annulus(c(0.0), 0.5, 2.0).unwrap(),
            PlanarFactor::annulus(Complex64::new(0.2, -0.1), 0.4, 1.5).unwrap(),
        ],
        vec![
            PlanarFactor::disc(Complex64::new(-0.3, 0.0), 1.2).unwrap(),
            PlanarFactor::annulus(c(0.0), 0.6, 1.8).unwrap(),
        ],
    ];
    let mut worst: f64 = 0.0;
    let mut classified = 0;
    for factors in domains {
        let dom = CylindricalDomain::new(factors.clone()).unwrap();
        let centers: Vec<Complex64> = factors.iter().map(|f| f.center()).collect();
        let annular: Vec<bool> = factors.iter().map(|f| matches!(f, PlanarFactor::Annulus { .. })).collect();
        // poles at u = 0 and u = -0.15 sit in the hole of annulus factors only
        let f = |z: &[Complex64]| -> Complex64 {
            z.iter()
                .zip(&centers)
                .enumerate()
                .map(|(j, (w, a))| {
                    let u = w - a;
                    let inner = if annular[j] { 0.1 * (u * (u + 0.15)).inv() } else { c(0.0) };
                    (u - 5.0).inv() + inner + u.powu(j as u32 + 2) + 1.0
                })
                .product()
        };
        let parts = boundary_component_split(&f, &dom, 48, &q()).map_err(|e| e.to_string())?;
        for i in 0..6 {
            for j in 0..6 {
                let z: Vec<Complex64> = factors
                    .iter()
                    .enumerate()
                    .map(|(d, fac)| {
                        let (inner, outer) = match fac {
                            PlanarFactor::Disc { radius, .. } => (0.0, *radius),
                            PlanarFactor::Annulus { inner, outer, .. } => (*inner, *outer),
                        };
                        let rad = inner + (outer - inner) * (0.2 + 0.12 * ((i + 2 * d) % 6) as f64);
                        centers[d] + Complex64::from_polar(rad, 1.05 * j as f64 + 0.4 * d as f64)
                    })
                    .collect();
                let total: Complex64 = parts.iter().map(|p| p.eval(&z).unwrap()).sum();
                worst = worst.max((total - f(&z)).norm());
            }
        }
        ensure(worst <= 1e-8, || format!("component sum error {worst:e} on {factors:?}"))?;

        // monomials (z - a)^e, e_j ∈ [-3, 3]; on a disc factor only e_j ≥ 0 is holomorphic
        let ranges: Vec<Vec<i32>> = factors
            .iter()
            .map(|fac| match fac {
                PlanarFactor::Disc { .. } => (0..=3).collect(),
                PlanarFactor::Annulus { .. } => (-3..=3).collect(),
            })
            .collect();
        let mut exps = vec![vec![]];
        for r in &ranges {
            exps = exps
                .into_iter()
                .flat_map(|e: Vec<i32>| r.iter().map(move |&x| [e.clone(), vec![x]].concat()))
                .collect();
        }
        for e in exps {
            let g = |z: &[Complex64]| -> Complex64 {
                z.iter().zip(&centers).zip(&e).map(|((w, a), &x)| (w - a).powi(x)).product()
            };
            let parts = boundary_component_split(&g, &dom, 6, &q()).map_err(|e| e.to_string())?;
            let sides: Vec<Side> = e.iter().map(|&x| if x < 0 { Side::Inner } else { Side::Outer }).collect();
            let idx = MultiIndex::new(e.iter().map(|&x| if x < 0 { (-x - 1) as u32 } else { x as u32 }).collect());
            for p in &parts {
                for (m, v) in &p.coeffs {
                    let target = p.sides == sides && *m == idx;
                    let want = if target { 1.0 } else { 0.0 };
                    ensure((v - c(want)).norm() <= 1e-12, || {
                        format!("monomial {e:?}: component {:?} coefficient {m} = {v}", p.sides)
                    })?;
                }
                if p.sides == sides {
                    ensure((p.coeff(&idx) - c(1.0)).norm() <= 1e-12, || format!("monomial {e:?} lost"))?;
                }
            }
            classified += 1;
        }
    }
    Ok(format!("component sums within {worst:.2e} <= 1e-8 (n=1,2); {classified} monomials classified exactly"))
}

fn criterion_10() -> Check {
    let mut worst: f64 = 0.0;
    for dom in [ReinhardtDomain::unit_polydisc(2), ball2()] {
        for theta in [0.3f64, 0.5, 0.7, 0.9] {
            let parts: BTreeMap<_, _> = enumerate_primitives(2, 12)
                .into_iter()
                .map(|k| {
                    let scale = 1.5 * theta.powi(k.degree() as i32) / monomial_max(&dom, k.as_index());
                    (k.clone(), PowerSeries::monomial(k.as_index().clone(), c(scale)))
                })
                .collect();
            let fit = growth_criterion(&parts, &dom, 1.0).map_err(|e| e.to_string())?;
            let d = (fit.theta - theta).abs();
            worst = worst.max(d);
            ensure(fit.ok && d <= 0.02, || format!("{} θ={theta}: {fit:?}", dom.kind_name()))?;
        }
    }
    let pd = ReinhardtDomain::unit_polydisc(2);
    let flat: BTreeMap<_, _> = enumerate_primitives(2, 12)
        .into_iter()
        .map(|k| (k.clone(), PowerSeries::monomial(k.as_index().clone(), c(1.0))))
        .collect();
    let fit = growth_criterion(&flat, &pd, 1.0).map_err(|e| e.to_string())?;
    ensure(!fit.ok, || format!("constant-norm family accepted: {fit:?}"))?;
    Ok(format!(
        "theta in {{0.3,0.5,0.7,0.9}} recovered within {worst:.2e} <= 0.02; constant family rejected (theta={:.4})",
        fit.theta
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("1 kernel correspondence round trip", criterion_1),
        ("2 Cauchy reproduction", criterion_2),
        ("3 duality", criterion_3),
        ("4 primitive factorization", criterion_4),
        ("5 projections", criterion_5),
        ("6 identity decomposition", criterion_6),
        ("7 Delta(k) geometry", criterion_7),
        ("8 block extraction and assembly", criterion_8),
        ("9 boundary-component split", criterion_9),
        ("10 growth criterion", criterion_10),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match result {
            Ok(_) if elapsed > BUDGET => Err(format!("took {:.1}s > 60s", elapsed.as_secs_f64())),
            r => r,
        };
        match result {
            Ok(msg) => println!("PASS criterion {name}: {msg} [{:.2}s]", elapsed.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} [{:.2}s]", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 10 criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
