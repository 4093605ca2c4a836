//! Tensor trapezoid rule on products of circles.
//!
//! Every routine samples the integrand at `N` equispaced phases per circle
//! (`θ = 2π i/N`, the same `N` on all circles) and doubles `N` until two
//! successive results differ by less than the tolerance. Batched coefficient
//! extraction runs the same trapezoid sums through an n-dimensional FFT.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use crate::domains::{Circle, Contour, CylindricalDomain, PlanarFactor};
use crate::error::{Error, Result};
use crate::fourier;
use crate::multiindex::{enumerate_indices, MultiIndex};
use crate::series::{LaurentSeries, PowerSeries};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Discretization controls shared by all contour integrals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Starting node count per circle; a power of two, at least 8.
    pub nodes_per_circle: usize,
    pub tolerance: f64,
    pub max_doublings: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            nodes_per_circle: 16,
            tolerance: 1e-12,
            max_doublings: 8,
        }
    }
}

impl QuadratureSpec {
    pub fn new(nodes_per_circle: usize, tolerance: f64, max_doublings: u32) -> Result<Self> {
        let q = QuadratureSpec {
            nodes_per_circle,
            tolerance,
            max_doublings,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_circle < 8 || !self.nodes_per_circle.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "nodes per circle must be a power of two ≥ 8, got {}",
                self.nodes_per_circle
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// Value of a converged integral with its doubling history.
#[derive(Clone, Debug)]
pub struct Converged {
    pub value: Complex64,
    pub nodes: usize,
    /// `(N, I_N)` for every node count tried.
    pub history: Vec<(usize, Complex64)>,
}

/// Phases `ζ - a` on each circle for `N` nodes.
fn circle_offsets(circles: &[Circle], n_nodes: usize) -> Vec<Vec<Complex64>> {
    circles
        .iter()
        .map(|c| {
            (0..n_nodes)
                .map(|i| Complex64::from_polar(c.radius, 2.0 * PI * i as f64 / n_nodes as f64))
                .collect()
        })
        .collect()
}

/// Samples `f` at every node of the `N^n` grid (row-major, coordinate 0 most
/// significant).
fn sample_grid<F>(f: &F, contour: &Contour, n_nodes: usize) -> Vec<Complex64>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    let n = contour.dim();
    let offsets = circle_offsets(&contour.circles, n_nodes);
    let centers: Vec<Complex64> = contour.circles.iter().map(Circle::center).collect();
    (0..fourier::grid_len(n, n_nodes))
        .into_par_iter()
        .map_init(
            || (vec![0usize; n], vec![ZERO; n]),
            |(idx, z), flat| {
                fourier::unflatten(flat, n, n_nodes, idx);
                for j in 0..n {
                    z[j] = centers[j] + offsets[j][idx[j]];
                }
                f(z)
            },
        )
        .collect()
}

/// Fixed-shape pairwise summation tree.
pub(crate) fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => ZERO,
        1 => values[0],
        len if len <= 8 => values.iter().fold(ZERO, |a, b| a + b),
        len => {
            let (a, b) = values.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

fn trapezoid_once<F>(f: &F, contour: &Contour, n_nodes: usize) -> Complex64
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    let n = contour.dim();
    let offsets = circle_offsets(&contour.circles, n_nodes);
    let centers: Vec<Complex64> = contour.circles.iter().map(Circle::center).collect();
    // dζ_j = i (ζ_j - a_j) dθ_j
    let h = 2.0 * PI / n_nodes as f64;
    let weighted: Vec<Complex64> = (0..fourier::grid_len(n, n_nodes))
        .into_par_iter()
        .map_init(
            || (vec![0usize; n], vec![ZERO; n]),
            |(idx, z), flat| {
                fourier::unflatten(flat, n, n_nodes, idx);
                let mut w = Complex64::new(1.0, 0.0);
                for j in 0..n {
                    let off = offsets[j][idx[j]];
                    z[j] = centers[j] + off;
                    w *= Complex64::new(0.0, h) * off;
                }
                f(z) * w
            },
        )
        .collect();
    pairwise_sum(&weighted)
}

/// Runs `step(N)` for `N = N₀, 2N₀, ...` until the largest componentwise change
/// drops below the tolerance.
fn doubling<T, S>(
    q: &QuadratureSpec,
    start: usize,
    mut step: S,
) -> Result<(Vec<Complex64>, usize, Vec<(usize, T)>)>
where
    S: FnMut(usize) -> (Vec<Complex64>, T),
{
    q.validate()?;
    let mut n_nodes = start.max(q.nodes_per_circle).next_power_of_two();
    let (mut prev, tag) = step(n_nodes);
    let mut history = vec![(n_nodes, tag)];
    for round in 1..=q.max_doublings {
        n_nodes *= 2;
        let (cur, tag) = step(n_nodes);
        history.push((n_nodes, tag));
        let (worst, diff) = cur
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).norm())
            .enumerate()
            .fold((0, 0.0), |acc, (i, d)| if d > acc.1 || d.is_nan() { (i, d) } else { acc });
        if diff < q.tolerance {
            return Ok((cur, n_nodes, history));
        }
        if round == q.max_doublings {
            return Err(Error::NotConverged {
                doublings: q.max_doublings,
                last: cur[worst],
                previous: prev[worst],
            });
        }
        prev = cur;
    }
    let v = prev.first().copied().unwrap_or(ZERO);
    Err(Error::NotConverged {
        doublings: 0,
        last: v,
        previous: v,
    })
}

/// `∮_C f(ζ) dζ_1 ⋯ dζ_n` over positively oriented circles.
pub fn contour_integral<F>(f: &F, contour: &Contour, q: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    contour_integral_traced(f, contour, q).map(|c| c.value)
}

pub fn contour_integral_traced<F>(f: &F, contour: &Contour, q: &QuadratureSpec) -> Result<Converged>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    let (v, nodes, hist) = doubling(q, q.nodes_per_circle, |n_nodes| {
        let v = trapezoid_once(f, contour, n_nodes);
        (vec![v], v)
    })?;
    Ok(Converged {
        value: v[0],
        nodes,
        history: hist,
    })
}

fn check_inside(contour: &Contour, z: &[Complex64]) -> Result<()> {
    if z.len() != contour.dim() {
        return Err(Error::DimensionMismatch {
            expected: contour.dim(),
            found: z.len(),
        });
    }
    for (j, (c, w)) in contour.circles.iter().zip(z).enumerate() {
        if !((w - c.center()).norm() < c.radius) {
            return Err(Error::OutsideContour(j));
        }
    }
    Ok(())
}

/// `(2πi)^{-n} ∮_C f(w) / Π (w_j - z_j) dw`.
pub fn cauchy_transform<F>(f: &F, contour: &Contour, z: &[Complex64], q: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    cauchy_transform_many(f, contour, std::slice::from_ref(&z.to_vec()), q).map(|v| v[0])
}

/// Cauchy transform at many interior points sharing one set of samples of `f`
/// per node count.
pub fn cauchy_transform_many<F>(
    f: &F,
    contour: &Contour,
    points: &[Vec<Complex64>],
    q: &QuadratureSpec,
) -> Result<Vec<Complex64>>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    for z in points {
        check_inside(contour, z)?;
    }
    let n = contour.dim();
    let centers: Vec<Complex64> = contour.circles.iter().map(Circle::center).collect();
    let (v, _, _) = doubling(q, q.nodes_per_circle, |n_nodes| {
        let samples = sample_grid(f, contour, n_nodes);
        let offsets = circle_offsets(&contour.circles, n_nodes);
        let values: Vec<Complex64> = points
            .par_iter()
            .map(|z| {
                // (2πi)^{-1} ∮ g(w)/(w - z) dw ≈ N^{-1} Σ g(w_i) (w_i - a)/(w_i - z)
                let weights: Vec<Vec<Complex64>> = (0..n)
                    .map(|j| {
                        offsets[j]
                            .iter()
                            .map(|&off| off / (centers[j] + off - z[j]) / n_nodes as f64)
                            .collect()
                    })
                    .collect();
                contract(&samples, &weights, n_nodes)
            })
            .collect();
        (values, ())
    })?;
    Ok(v)
}

/// `Σ_i F[i] Π_j g_j[i_j]`, reducing the last axis first.
fn contract(samples: &[Complex64], weights: &[Vec<Complex64>], n_nodes: usize) -> Complex64 {
    let mut cur = samples.to_vec();
    for g in weights.iter().rev() {
        cur = cur
            .chunks(n_nodes)
            .map(|row| {
                let terms: Vec<Complex64> = row.iter().zip(g).map(|(a, b)| a * b).collect();
                pairwise_sum(&terms)
            })
            .collect();
    }
    cur[0]
}

/// Laurent coefficients `a_ν = (2πi)^{-n} ∮_C f(ζ) Π (ζ_j - a_j)^{-ν_j} dζ_j/(ζ_j - a_j)`
/// for integer exponent vectors `ν`, all computed from one FFT per node count.
pub fn laurent_coefficients<F>(
    f: &F,
    contour: &Contour,
    exponents: &[Vec<i64>],
    q: &QuadratureSpec,
) -> Result<Vec<Complex64>>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    let n = contour.dim();
    if let Some(e) = exponents.iter().find(|e| e.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: e.len(),
        });
    }
    let span = exponents
        .iter()
        .flat_map(|e| e.iter().map(|x| x.unsigned_abs() as usize))
        .max()
        .unwrap_or(0);
    let radii = contour.radii();
    let (v, _, _) = doubling(q, 2 * span + 2, |n_nodes| {
        let mut grid = sample_grid(f, contour, n_nodes);
        fourier::fft_nd(&mut grid, n, n_nodes, FftDirection::Forward);
        let norm = fourier::grid_len(n, n_nodes) as f64;
        let values = exponents
            .iter()
            .map(|e| {
                let off = fourier::wrapped_offset(e.iter().copied(), n_nodes);
                let scale: f64 = radii
                    .iter()
                    .zip(e)
                    .map(|(r, &ej)| r.powi(-(ej as i32)))
                    .product();
                grid[off] * scale / norm
            })
            .collect();
        (values, ())
    })?;
    Ok(v)
}

/// Taylor coefficient `c_α = (2πi)^{-n} ∮ f(ζ) ζ^{-α} dζ/ζ` on circles
/// centered at the origin.
pub fn taylor_coeff<F>(f: &F, contour: &Contour, alpha: &MultiIndex, q: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    taylor_coeffs(f, contour, std::slice::from_ref(alpha), q).map(|v| v[0])
}

pub fn taylor_coeffs<F>(
    f: &F,
    contour: &Contour,
    alphas: &[MultiIndex],
    q: &QuadratureSpec,
) -> Result<Vec<Complex64>>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    if let Some(j) = contour.circles.iter().position(|c| c.center != [0.0, 0.0]) {
        return Err(Error::NonCenteredContour(j));
    }
    let exps: Vec<Vec<i64>> = alphas
        .iter()
        .map(|a| a.entries().iter().map(|&e| i64::from(e)).collect())
        .collect();
    laurent_coefficients(f, contour, &exps, q)
}

/// Which boundary circle of an annulus factor a component integrates over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Outer,
    Inner,
}

/// Series in `z - a` whose coordinate `j` carries exponent `e_j` on an outer
/// side and `-(e_j + 1)` on an inner side.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentSeries {
    pub sides: Vec<Side>,
    pub centers: Vec<Complex64>,
    pub trunc: u32,
    pub coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl ComponentSeries {
    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn coeff(&self, e: &MultiIndex) -> Complex64 {
        self.coeffs.get(e).copied().unwrap_or(ZERO)
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: z.len(),
            });
        }
        let shifted: Vec<Complex64> = z.iter().zip(&self.centers).map(|(a, b)| a - b).collect();
        for (j, (s, w)) in self.sides.iter().zip(&shifted).enumerate() {
            if *s == Side::Inner && *w == ZERO {
                return Err(Error::Pole(j));
            }
        }
        Ok(self
            .coeffs
            .iter()
            .map(|(e, c)| {
                e.entries()
                    .iter()
                    .zip(&self.sides)
                    .zip(&shifted)
                    .fold(*c, |acc, ((&ej, s), w)| match s {
                        Side::Outer => acc * w.powu(ej),
                        Side::Inner => acc / w.powu(ej + 1),
                    })
            })
            .sum())
    }

    fn centered_at_origin(&self) -> bool {
        self.centers.iter().all(|c| *c == ZERO)
    }

    /// The component as a power series when every side is outer.
    pub fn as_power_series(&self) -> Option<PowerSeries> {
        (self.sides.iter().all(|s| *s == Side::Outer) && self.centered_at_origin()).then(|| {
            PowerSeries::from_terms(self.dim(), self.trunc, self.coeffs.clone()).unwrap()
        })
    }

    /// The component as a complement-side Laurent series when every side is inner.
    pub fn as_laurent_series(&self) -> Option<LaurentSeries> {
        (self.sides.iter().all(|s| *s == Side::Inner) && self.centered_at_origin()).then(|| {
            LaurentSeries::from_terms(self.dim(), self.trunc, self.coeffs.clone()).unwrap()
        })
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Splits `f` on a product of discs and annuli into the components
/// `f_m = (2πi)^{-n} ∮_{∂G_{1,m_1}} ⋯ ∮_{∂G_{n,m_n}} f(ζ)/(ζ - z) dζ`, one per
/// choice of boundary circle in each factor (inner circles oriented
/// negatively), each expanded to total degree `trunc`.
pub fn boundary_component_split<F>(
    f: &F,
    domain: &CylindricalDomain,
    trunc: u32,
    q: &QuadratureSpec,
) -> Result<Vec<ComponentSeries>>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    let n = domain.dim();
    let choices: Vec<Vec<(Side, f64)>> = domain
        .factors
        .iter()
        .map(|fac| match *fac {
            PlanarFactor::Disc { radius, .. } => vec![(Side::Outer, radius)],
            PlanarFactor::Annulus { inner, outer, .. } => {
                vec![(Side::Outer, outer), (Side::Inner, inner)]
            }
        })
        .collect();
    let centers: Vec<Complex64> = domain.factors.iter().map(PlanarFactor::center).collect();
    let indices = enumerate_indices(n, trunc);

    let mut selectors: Vec<Vec<usize>> = vec![vec![]];
    for ch in &choices {
        selectors = selectors
            .into_iter()
            .flat_map(|s| {
                (0..ch.len()).map(move |i| {
                    let mut t = s.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }

    selectors
        .into_iter()
        .map(|sel| {
            let sides: Vec<Side> = sel.iter().enumerate().map(|(j, &i)| choices[j][i].0).collect();
            let contour = Contour::new(
                sel.iter()
                    .enumerate()
                    .map(|(j, &i)| Circle::new(centers[j], choices[j][i].1))
                    .collect(),
            )?;
            let exps: Vec<Vec<i64>> = indices
                .iter()
                .map(|e| {
                    e.entries()
                        .iter()
                        .zip(&sides)
                        .map(|(&ej, s)| match s {
                            Side::Outer => i64::from(ej),
                            Side::Inner => -(i64::from(ej) + 1),
                        })
                        .collect()
                })
                .collect();
            let values = laurent_coefficients(f, &contour, &exps, q)?;
            let coeffs = indices
                .iter()
                .cloned()
                .zip(values)
                .filter(|(_, c)| *c != ZERO)
                .collect();
            Ok(ComponentSeries {
                sides,
                centers: centers.clone(),
                trunc,
                coeffs,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::Contour;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn residues() {
        let unit1 = Contour::centered(&[1.0]).unwrap();
        let v = contour_integral(&|z: &[Complex64]| z[0].inv(), &unit1, &q()).unwrap();
        assert!((v - c(0.0, 2.0 * PI)).norm() < 1e-12);

        let unit2 = Contour::centered(&[1.0, 1.0]).unwrap();
        let v = contour_integral(&|z: &[Complex64]| (z[0] * z[1]).inv(), &unit2, &q()).unwrap();
        let expect = c(0.0, 2.0 * PI).powu(2);
        assert!((v - expect).norm() < 1e-12);

        let v = contour_integral(&|z: &[Complex64]| z[0].exp() / z[0].powu(3), &unit1, &q()).unwrap();
        assert!((v - c(0.0, PI)).norm() < 1e-10);
    }

    #[test]
    fn laurent_monomials_exact() {
        let unit2 = Contour::centered(&[1.0, 1.0]).unwrap();
        for m0 in -4i32..=4 {
            for m1 in -4i32..=4 {
                let f = |z: &[Complex64]| z[0].powi(m0) * z[1].powi(m1) / (z[0] * z[1]);
                let v = contour_integral(&f, &unit2, &q()).unwrap();
                let expect = if m0 == 0 && m1 == 0 { c(0.0, 2.0 * PI).powu(2) } else { c(0.0, 0.0) };
                assert!((v - expect).norm() < 1e-13, "{m0} {m1}");
            }
        }
    }

    #[test]
    fn cauchy_examples() {
        let unit2 = Contour::centered(&[1.0, 1.0]).unwrap();
        let v = cauchy_transform(&|_: &[Complex64]| c(1.0, 0.0), &unit2, &[c(0.3, 0.0), c(0.0, -0.2)], &q()).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-12);
        let v = cauchy_transform(&|w: &[Complex64]| w[0] * w[1], &unit2, &[c(0.2, 0.0), c(0.0, 0.5)], &q()).unwrap();
        assert!((v - c(0.0, 0.1)).norm() < 1e-10);
        let unit1 = Contour::centered(&[1.0]).unwrap();
        let v = cauchy_transform(&|w: &[Complex64]| (c(2.0, 0.0) - w[0]).inv(), &unit1, &[c(0.5, 0.0)], &q()).unwrap();
        assert!((v - c(1.0 / 1.5, 0.0)).norm() < 1e-10);
        assert_eq!(
            cauchy_transform(&|_: &[Complex64]| c(1.0, 0.0), &unit1, &[c(1.0, 0.0)], &q()).unwrap_err(),
            Error::OutsideContour(0)
        );
    }

    #[test]
    fn taylor_examples() {
        let unit1 = Contour::centered(&[1.0]).unwrap();
        let v = taylor_coeff(&|z: &[Complex64]| z[0].exp(), &unit1, &MultiIndex::from([3]), &q()).unwrap();
        assert!((v - c(1.0 / 6.0, 0.0)).norm() < 1e-12);
        let unit2 = Contour::centered(&[1.0, 1.0]).unwrap();
        let v = taylor_coeff(&|z: &[Complex64]| z[0] * z[0] * z[1], &unit2, &MultiIndex::from([2, 1]), &q()).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-12);
        let r09 = Contour::centered(&[0.9, 0.9]).unwrap();
        let f = |z: &[Complex64]| (c(1.0, 0.0) - z[0] * z[1] / 2.0).inv();
        let v = taylor_coeff(&f, &r09, &MultiIndex::from([2, 2]), &q()).unwrap();
        assert!((v - c(0.25, 0.0)).norm() < 1e-8);

        let off = Contour::new(vec![Circle::new(c(0.1, 0.0), 1.0)]).unwrap();
        assert_eq!(
            taylor_coeff(&|z: &[Complex64]| z[0], &off, &MultiIndex::from([1]), &q()).unwrap_err(),
            Error::NonCenteredContour(0)
        );
    }

    #[test]
    fn non_convergence_reported() {
        // pole on the contour: successive sums never settle
        let unit1 = Contour::centered(&[1.0]).unwrap();
        let spec = QuadratureSpec::new(8, 1e-14, 3).unwrap();
        let f = |z: &[Complex64]| (z[0] - c(1.0, 1e-9)).inv().powu(2);
        assert!(matches!(contour_integral(&f, &unit1, &spec), Err(Error::NotConverged { .. })));
    }

    #[test]
    fn doubling_error_decays_geometrically() {
        let unit1 = Contour::centered(&[1.0]).unwrap();
        let spec = QuadratureSpec::new(8, 1e-15, 6).unwrap();
        let f = |z: &[Complex64]| (c(1.6, 0.0) - z[0]).inv() / z[0];
        let tr = contour_integral_traced(&f, &unit1, &spec).unwrap();
        let exact = c(0.0, 2.0 * PI) / 1.6;
        let errs: Vec<f64> = tr.history.iter().map(|(_, v)| (v - exact).norm()).collect();
        for w in errs.windows(2) {
            if w[0] > 1e-14 {
                assert!(w[1] / w[0] < 0.9, "{errs:?}");
            }
        }
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(12, 1e-10, 4).is_err());
        assert!(QuadratureSpec::new(4, 1e-10, 4).is_err());
        assert!(QuadratureSpec::new(8, 0.0, 4).is_err());
    }

    #[test]
    fn split_single_annulus() {
        let a = CylindricalDomain::new(vec![PlanarFactor::annulus(c(0.0, 0.0), 0.5, 2.0).unwrap()]).unwrap();
        let parts = boundary_component_split(&|z: &[Complex64]| z[0] + z[0].inv(), &a, 6, &q()).unwrap();
        assert_eq!(parts.len(), 2);
        let outer = parts.iter().find(|p| p.sides == vec![Side::Outer]).unwrap();
        let inner = parts.iter().find(|p| p.sides == vec![Side::Inner]).unwrap();
        assert!((outer.coeff(&MultiIndex::from([1])) - c(1.0, 0.0)).norm() < 1e-12);
        assert!((inner.coeff(&MultiIndex::from([0])) - c(1.0, 0.0)).norm() < 1e-12);
        assert!(outer.coeffs.iter().all(|(m, v)| m.entries() == [1] || v.norm() < 1e-12));
        assert!(inner.coeffs.iter().all(|(m, v)| m.entries() == [0] || v.norm() < 1e-12));

        let poly = boundary_component_split(&|z: &[Complex64]| z[0] * z[0] - 3.0 * z[0], &a, 6, &q()).unwrap();
        let inner = poly.iter().find(|p| p.sides == vec![Side::Inner]).unwrap();
        assert!(inner.max_abs_coeff() < 1e-12);
    }

    #[test]
    fn split_product_inverse() {
        let a = CylindricalDomain::new(vec![
            PlanarFactor::annulus(c(0.0, 0.0), 0.5, 2.0).unwrap(),
            PlanarFactor::annulus(c(0.0, 0.0), 0.5, 2.0).unwrap(),
        ])
        .unwrap();
        let parts = boundary_component_split(&|z: &[Complex64]| (z[0] * z[1]).inv(), &a, 5, &q()).unwrap();
        assert_eq!(parts.len(), 4);
        for p in &parts {
            if p.sides == vec![Side::Inner, Side::Inner] {
                let l = p.as_laurent_series().unwrap();
                assert!((l.coeff(&MultiIndex::from([0, 0])) - c(1.0, 0.0)).norm() < 1e-12);
                let z = [c(0.9, 0.3), c(-1.1, 0.2)];
                assert!((l.eval(&z).unwrap() - (z[0] * z[1]).inv()).norm() < 1e-12);
            } else {
                assert!(p.max_abs_coeff() < 1e-12, "{:?}", p.sides);
            }
        }
    }
}
