//! Operators in coefficient coordinates and their holomorphic kernels.
//!
//! An operator `A` acts on monomials by `A(w^α) = Σ_β M_{βα} z^β`. Its kernel
//! `a(ζ, z) = A(Π_j 1/(w_j - ζ_j))(z)` expands as `Σ c_{αβ} ζ^{-(α+1)} z^β` with
//! `c_{αβ} = (-1)^n M_{βα}`, and `A` is recovered from the kernel by
//! `Af(z) = (-1)^n (2πi)^{-n} ∮_C f(w) a(w, z) dw`.
//!
//! The same expansion with a linear functional `u` in place of `A` gives the
//! dual kernel `ũ(λ) = u(Π 1/(z_j - λ_j))` and the pairing
//! `u(f) = (-1)^n (2πi)^{-n} ∮ ũ(λ) f(λ) dλ`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domains::{Contour, ReinhardtDomain};
use crate::error::{Error, Result};
use crate::multiindex::{enumerate_indices, MultiIndex};
use crate::quadrature::{contour_integral, laurent_coefficients, QuadratureSpec};
use crate::rng::{random_polynomial, SplitMix64};
use crate::series::{reciprocals, sup_norm, Holomorphic, LaurentSeries, PowerSeries};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn sign(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Coefficient matrix `M_{βα}` of an operator `H(G_1) → H(G_2)` restricted to
/// inputs of degree `≤ trunc_in`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub dim_in: usize,
    pub dim_out: usize,
    pub trunc_in: u32,
    pub trunc_out: u32,
    entries: BTreeMap<(MultiIndex, MultiIndex), Complex64>,
}

impl OperatorMatrix {
    pub fn zero(dim_in: usize, dim_out: usize, trunc_in: u32, trunc_out: u32) -> Self {
        OperatorMatrix {
            dim_in,
            dim_out,
            trunc_in,
            trunc_out,
            entries: BTreeMap::new(),
        }
    }

    /// Sets `M_{βα}`; zero removes the entry.
    pub fn set(&mut self, beta: MultiIndex, alpha: MultiIndex, c: Complex64) -> Result<()> {
        check_index(&alpha, self.dim_in, self.trunc_in)?;
        check_index(&beta, self.dim_out, self.trunc_out)?;
        if c == ZERO {
            self.entries.remove(&(beta, alpha));
        } else {
            self.entries.insert((beta, alpha), c);
        }
        Ok(())
    }

    pub fn get(&self, beta: &MultiIndex, alpha: &MultiIndex) -> Complex64 {
        self.entries
            .get(&(beta.clone(), alpha.clone()))
            .copied()
            .unwrap_or(ZERO)
    }

    /// Nonzero entries as `((β, α), M_{βα})`, ordered by `β` then `α`.
    pub fn entries(&self) -> impl Iterator<Item = (&(MultiIndex, MultiIndex), &Complex64)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Column `α`: the coefficients of `A(w^α)`.
    pub fn column(&self, alpha: &MultiIndex) -> PowerSeries {
        PowerSeries::from_terms(
            self.dim_out,
            self.trunc_out,
            self.entries
                .iter()
                .filter(|((_, a), _)| a == alpha)
                .map(|((b, _), c)| (b.clone(), *c)),
        )
        .expect("entries respect the truncation")
    }

    /// Columns `α` carrying at least one nonzero entry.
    pub fn nonzero_columns(&self) -> Vec<MultiIndex> {
        let mut cols: Vec<MultiIndex> = self.entries.keys().map(|(_, a)| a.clone()).collect();
        cols.sort();
        cols.dedup();
        cols
    }

    /// Matrix-vector product `M · c_f`.
    pub fn apply(&self, f: &PowerSeries) -> Result<PowerSeries> {
        if f.dim() != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                found: f.dim(),
            });
        }
        if let Some((m, _)) = f.terms().find(|(m, _)| m.degree() > self.trunc_in) {
            return Err(Error::TruncationExceeded {
                degree: m.degree(),
                trunc: self.trunc_in,
            });
        }
        let mut acc: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for ((b, a), m) in &self.entries {
            let c = f.coeff(a);
            if c != ZERO {
                *acc.entry(b.clone()).or_insert(ZERO) += m * c;
            }
        }
        PowerSeries::from_terms(self.dim_out, self.trunc_out, acc)
    }

    /// `self ∘ other`: columns of `other` are mapped through `self`.
    pub fn compose(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        if other.dim_out != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                found: other.dim_out,
            });
        }
        let mut out = OperatorMatrix::zero(other.dim_in, self.dim_out, other.trunc_in, self.trunc_out);
        for alpha in other.nonzero_columns() {
            let col = self.apply(&other.column(&alpha))?;
            for (b, c) in col.terms() {
                out.set(b.clone(), alpha.clone(), *c)?;
            }
        }
        Ok(out)
    }

    /// Keeps only the columns accepted by `keep`.
    pub fn restrict_columns(&self, keep: impl Fn(&MultiIndex) -> bool) -> OperatorMatrix {
        OperatorMatrix {
            entries: self
                .entries
                .iter()
                .filter(|((_, a), _)| keep(a))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
            ..self.clone_shape()
        }
    }

    fn clone_shape(&self) -> OperatorMatrix {
        OperatorMatrix::zero(self.dim_in, self.dim_out, self.trunc_in, self.trunc_out)
    }

    /// Largest entrywise difference; shapes must agree in dimension.
    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        let keys: std::collections::BTreeSet<_> =
            self.entries.keys().chain(other.entries.keys()).collect();
        keys.into_iter()
            .map(|(b, a)| (self.get(b, a) - other.get(b, a)).norm())
            .fold(0.0, f64::max)
    }
}

fn check_index(m: &MultiIndex, dim: usize, trunc: u32) -> Result<()> {
    if m.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: m.dim(),
        });
    }
    if m.degree() > trunc {
        return Err(Error::TruncationExceeded {
            degree: m.degree(),
            trunc,
        });
    }
    Ok(())
}

/// Coefficients `c_{αβ}` of `a(ζ, z) = Σ c_{αβ} ζ^{-(α+1)} z^β`, holomorphic on
/// the complement of a polydisc in `ζ` and vanishing as any `|ζ_j| → ∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelCoefficients {
    pub dim_zeta: usize,
    pub dim_z: usize,
    pub trunc_zeta: u32,
    pub trunc_z: u32,
    entries: BTreeMap<(MultiIndex, MultiIndex), Complex64>,
}

impl KernelCoefficients {
    pub fn zero(dim_zeta: usize, dim_z: usize, trunc_zeta: u32, trunc_z: u32) -> Self {
        KernelCoefficients {
            dim_zeta,
            dim_z,
            trunc_zeta,
            trunc_z,
            entries: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, alpha: MultiIndex, beta: MultiIndex, c: Complex64) -> Result<()> {
        check_index(&alpha, self.dim_zeta, self.trunc_zeta)?;
        check_index(&beta, self.dim_z, self.trunc_z)?;
        if c == ZERO {
            self.entries.remove(&(alpha, beta));
        } else {
            self.entries.insert((alpha, beta), c);
        }
        Ok(())
    }

    pub fn get(&self, alpha: &MultiIndex, beta: &MultiIndex) -> Complex64 {
        self.entries
            .get(&(alpha.clone(), beta.clone()))
            .copied()
            .unwrap_or(ZERO)
    }

    /// Nonzero entries as `((α, β), c_{αβ})`.
    pub fn entries(&self) -> impl Iterator<Item = (&(MultiIndex, MultiIndex), &Complex64)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// `Σ |c_{αβ}|·|z^β|`: for `|ζ_j| ≥ 1` the kernel is bounded by this
    /// constant over `min_j |ζ_j|`.
    pub fn decay_constant(&self, z: &[Complex64]) -> f64 {
        self.entries
            .iter()
            .map(|((_, b), c)| {
                c.norm()
                    * b.entries()
                        .iter()
                        .zip(z)
                        .map(|(&e, w)| w.norm().powi(e as i32))
                        .product::<f64>()
            })
            .sum()
    }
}

/// Rule `α ↦ λ_α` of a Hadamard (coefficient) multiplier.
#[derive(Clone)]
pub enum HadamardRule {
    /// `λ_α = b^{-|α|}`
    InversePower(f64),
    /// `λ_α = b^{|α|}`
    Power(f64),
    /// `λ_α = 1/α!`
    InverseFactorial,
    Custom(Arc<dyn Fn(&MultiIndex) -> Complex64 + Send + Sync>),
}

impl HadamardRule {
    pub fn weight(&self, alpha: &MultiIndex) -> Complex64 {
        let d = alpha.degree() as i32;
        match self {
            HadamardRule::InversePower(b) => Complex64::new(b.powi(-d), 0.0),
            HadamardRule::Power(b) => Complex64::new(b.powi(d), 0.0),
            HadamardRule::InverseFactorial => Complex64::new(1.0 / alpha.factorial(), 0.0),
            HadamardRule::Custom(f) => f(alpha),
        }
    }
}

impl fmt::Debug for HadamardRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HadamardRule::InversePower(b) => write!(f, "pow{b}"),
            HadamardRule::Power(b) => write!(f, "grow{b}"),
            HadamardRule::InverseFactorial => write!(f, "invfact"),
            HadamardRule::Custom(_) => write!(f, "custom"),
        }
    }
}

/// The test zoo of exactly known bounded operators on `H(G) → H(G)`.
#[derive(Clone, Debug)]
pub enum NamedOperator {
    Identity,
    /// `∂/∂w_j`, zero-based axis.
    Partial(usize),
    /// `Σ_j w_j ∂/∂w_j`
    Euler,
    Hadamard(HadamardRule),
    /// `f ↦ f(c·)`
    Dilation(f64),
    /// `f ↦ z^γ f`
    MonomialMultiplier(MultiIndex),
}

impl NamedOperator {
    /// The six operators exercised by the round-trip suites in dimension `n`.
    pub fn zoo(n: usize) -> Vec<NamedOperator> {
        vec![
            NamedOperator::Identity,
            NamedOperator::Partial(0),
            NamedOperator::Euler,
            NamedOperator::Hadamard(HadamardRule::InversePower(2.0)),
            NamedOperator::Dilation(0.5),
            NamedOperator::MonomialMultiplier(MultiIndex::unit(n, 0)),
        ]
    }

    /// Degree growth of the output over the input truncation.
    fn output_trunc(&self, trunc: u32) -> u32 {
        match self {
            NamedOperator::MonomialMultiplier(g) => trunc + g.degree(),
            _ => trunc,
        }
    }

    /// Image of `w^α`, as `(β, coefficient)` or `None` when it vanishes.
    fn image(&self, alpha: &MultiIndex) -> Option<(MultiIndex, Complex64)> {
        let real = |x: f64| Complex64::new(x, 0.0);
        match self {
            NamedOperator::Identity => Some((alpha.clone(), real(1.0))),
            NamedOperator::Partial(j) => {
                let e = alpha.entries()[*j];
                (e > 0).then(|| {
                    (
                        alpha.minus(&MultiIndex::unit(alpha.dim(), *j)).unwrap(),
                        real(f64::from(e)),
                    )
                })
            }
            NamedOperator::Euler => {
                Some((alpha.clone(), real(f64::from(alpha.degree())))).filter(|(_, c)| c.re != 0.0)
            }
            NamedOperator::Hadamard(rule) => Some((alpha.clone(), rule.weight(alpha))),
            NamedOperator::Dilation(c) => Some((alpha.clone(), real(c.powi(alpha.degree() as i32)))),
            NamedOperator::MonomialMultiplier(g) => Some((alpha.plus(g), real(1.0))),
        }
    }

    /// Closed form of `Φ(A)(ζ, z)` when one is known.
    pub fn kernel_closed_form(&self, zeta: &[Complex64], z: &[Complex64]) -> Option<Complex64> {
        let cauchy = |w: &[Complex64]| -> Complex64 {
            w.iter().zip(zeta).map(|(a, b)| (a - b).inv()).product()
        };
        match self {
            NamedOperator::Identity => Some(cauchy(z)),
            NamedOperator::Partial(j) => Some(-cauchy(z) / (z[*j] - zeta[*j])),
            NamedOperator::Euler => {
                let base = cauchy(z);
                Some(
                    z.iter()
                        .zip(zeta)
                        .map(|(w, s)| -base * w / (w - s))
                        .sum(),
                )
            }
            NamedOperator::Hadamard(HadamardRule::InversePower(b)) => {
                let scaled: Vec<Complex64> = z.iter().map(|w| w / b).collect();
                Some(cauchy(&scaled))
            }
            NamedOperator::Hadamard(HadamardRule::Power(b)) => {
                let scaled: Vec<Complex64> = z.iter().map(|w| w * b).collect();
                Some(cauchy(&scaled))
            }
            NamedOperator::Hadamard(_) => None,
            NamedOperator::Dilation(c) => {
                let scaled: Vec<Complex64> = z.iter().map(|w| w * c).collect();
                Some(cauchy(&scaled))
            }
            NamedOperator::MonomialMultiplier(g) => Some(
                cauchy(z)
                    * z.iter()
                        .zip(g.entries())
                        .map(|(w, &e)| w.powu(e))
                        .product::<Complex64>(),
            ),
        }
    }
}

impl fmt::Display for NamedOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedOperator::Identity => write!(f, "identity"),
            NamedOperator::Partial(j) => write!(f, "partial:{}", j + 1),
            NamedOperator::Euler => write!(f, "euler"),
            NamedOperator::Hadamard(rule) => write!(f, "hadamard:{rule:?}"),
            NamedOperator::Dilation(c) => write!(f, "dilation:{c}"),
            NamedOperator::MonomialMultiplier(g) => {
                let parts: Vec<String> = g.entries().iter().map(u32::to_string).collect();
                write!(f, "multiplier:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for NamedOperator {
    type Err = Error;

    /// Parses `identity`, `euler`, `partial:<j>` (one-based), `dilation:<c>`,
    /// `hadamard:pow<b>`, `hadamard:grow<b>`, `hadamard:invfact`,
    /// `multiplier:<g1>,<g2>,...`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown operator spec {s:?}"));
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let num = |a: Option<&str>| -> Result<f64> {
            a.and_then(|x| x.parse::<f64>().ok())
                .filter(|x| x.is_finite())
                .ok_or_else(bad)
        };
        match (head, arg) {
            ("identity", None) => Ok(NamedOperator::Identity),
            ("euler", None) => Ok(NamedOperator::Euler),
            ("partial", Some(a)) => {
                let j: usize = a.parse().map_err(|_| bad())?;
                if j == 0 {
                    return Err(bad());
                }
                Ok(NamedOperator::Partial(j - 1))
            }
            ("dilation", a) => Ok(NamedOperator::Dilation(num(a)?)),
            ("hadamard", Some("invfact")) => Ok(NamedOperator::Hadamard(HadamardRule::InverseFactorial)),
            ("hadamard", Some(a)) if a.starts_with("pow") => Ok(NamedOperator::Hadamard(
                HadamardRule::InversePower(num(Some(&a[3..]))?),
            )),
            ("hadamard", Some(a)) if a.starts_with("grow") => Ok(NamedOperator::Hadamard(
                HadamardRule::Power(num(Some(&a[4..]))?),
            )),
            ("multiplier", Some(a)) => {
                let g = a
                    .split(',')
                    .map(|x| x.trim().parse::<u32>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad())?;
                if g.is_empty() {
                    return Err(bad());
                }
                Ok(NamedOperator::MonomialMultiplier(MultiIndex::new(g)))
            }
            _ => Err(bad()),
        }
    }
}

/// Exact coefficient matrix of a zoo operator on inputs of degree `≤ trunc`.
pub fn matrix_of(op: &NamedOperator, n: usize, trunc: u32) -> Result<OperatorMatrix> {
    match op {
        NamedOperator::Partial(j) if *j >= n => {
            return Err(Error::InvalidParameter(format!(
                "partial:{} in dimension {n}",
                j + 1
            )))
        }
        NamedOperator::MonomialMultiplier(g) if g.dim() != n => {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.dim(),
            })
        }
        _ => {}
    }
    let mut m = OperatorMatrix::zero(n, n, trunc, op.output_trunc(trunc));
    for alpha in enumerate_indices(n, trunc) {
        if let Some((beta, c)) = op.image(&alpha) {
            m.set(beta, alpha, c)?;
        }
    }
    Ok(m)
}

/// `Φ(A)`: `c_{αβ} = (-1)^n M_{βα}`.
pub fn phi_forward(a: &OperatorMatrix) -> KernelCoefficients {
    let s = sign(a.dim_in);
    KernelCoefficients {
        dim_zeta: a.dim_in,
        dim_z: a.dim_out,
        trunc_zeta: a.trunc_in,
        trunc_z: a.trunc_out,
        entries: a
            .entries
            .iter()
            .map(|((b, al), c)| ((al.clone(), b.clone()), c * s))
            .collect(),
    }
}

/// Inverse of the coefficient correspondence: `M_{βα} = (-1)^n c_{αβ}`.
pub fn matrix_from_kernel(k: &KernelCoefficients) -> OperatorMatrix {
    let s = sign(k.dim_zeta);
    OperatorMatrix {
        dim_in: k.dim_zeta,
        dim_out: k.dim_z,
        trunc_in: k.trunc_zeta,
        trunc_out: k.trunc_z,
        entries: k
            .entries
            .iter()
            .map(|((al, b), c)| ((b.clone(), al.clone()), c * s))
            .collect(),
    }
}

/// `a(ζ, z) = Σ c_{αβ} ζ^{-(α+1)} z^β`.
pub fn kernel_eval(k: &KernelCoefficients, zeta: &[Complex64], z: &[Complex64]) -> Result<Complex64> {
    if zeta.len() != k.dim_zeta {
        return Err(Error::DimensionMismatch {
            expected: k.dim_zeta,
            found: zeta.len(),
        });
    }
    if z.len() != k.dim_z {
        return Err(Error::DimensionMismatch {
            expected: k.dim_z,
            found: z.len(),
        });
    }
    let inv = reciprocals(zeta)?;
    let pre: Complex64 = inv.iter().product();
    Ok(k.entries
        .iter()
        .map(|((a, b), c)| {
            let za = a
                .entries()
                .iter()
                .zip(&inv)
                .fold(*c * pre, |acc, (&e, v)| acc * v.powu(e));
            b.entries()
                .iter()
                .zip(z)
                .fold(za, |acc, (&e, w)| acc * w.powu(e))
        })
        .sum())
}

fn check_inverse_inputs(k: &KernelCoefficients, f: &PowerSeries, contour: &Contour) -> Result<()> {
    for found in [f.dim(), contour.dim()] {
        if found != k.dim_zeta {
            return Err(Error::DimensionMismatch {
                expected: k.dim_zeta,
                found,
            });
        }
    }
    if let Some(j) = contour.circles.iter().position(|c| c.center != [0.0, 0.0]) {
        return Err(Error::NonCenteredContour(j));
    }
    if f.degree() > k.trunc_zeta {
        return Err(Error::TruncationExceeded {
            degree: f.degree(),
            trunc: k.trunc_zeta,
        });
    }
    Ok(())
}

/// `Φ^{-1}(a) f`: `Af(z) = (-1)^n (2πi)^{-n} ∮_C f(w) a(w, z) dw`, returned as
/// a power series in `z`.
///
/// Expanding `a(w, z) = Σ_β a_β(w) z^β` reduces each coefficient to the
/// contour integrals `(2πi)^{-n} ∮_C f(w) w^{-(α+1)} dw`, which are evaluated
/// by the trapezoid rule on `C` (all `α` from one batched transform).
pub fn phi_inverse(
    k: &KernelCoefficients,
    f: &PowerSeries,
    contour: &Contour,
    q: &QuadratureSpec,
) -> Result<PowerSeries> {
    check_inverse_inputs(k, f, contour)?;
    let mut alphas: Vec<MultiIndex> = k.entries.keys().map(|(a, _)| a.clone()).collect();
    alphas.sort();
    alphas.dedup();
    let exps: Vec<Vec<i64>> = alphas
        .iter()
        .map(|a| a.entries().iter().map(|&e| i64::from(e)).collect())
        .collect();
    let moments = laurent_coefficients(&|w: &[Complex64]| f.value(w), contour, &exps, q)?;
    let moment: BTreeMap<&MultiIndex, Complex64> = alphas.iter().zip(moments).collect();
    let s = sign(k.dim_zeta);
    let mut acc: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
    for ((a, b), c) in &k.entries {
        *acc.entry(b.clone()).or_insert(ZERO) += c * moment[a] * s;
    }
    PowerSeries::from_terms(k.dim_z, k.trunc_z, acc)
}

/// Pointwise `Af(z)` straight from the integral with the kernel sampled by
/// [`kernel_eval`] at every node.
pub fn phi_inverse_at(
    k: &KernelCoefficients,
    f: &PowerSeries,
    contour: &Contour,
    z: &[Complex64],
    q: &QuadratureSpec,
) -> Result<Complex64> {
    check_inverse_inputs(k, f, contour)?;
    kernel_eval(k, &vec![Complex64::new(1.0, 0.0); k.dim_zeta], z)?;
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let integrand = |w: &[Complex64]| f.value(w) * kernel_eval(k, w, z).unwrap_or(ZERO);
    let v = contour_integral(&integrand, contour, q)?;
    Ok(v * sign(k.dim_zeta) / two_pi_i.powu(k.dim_zeta as u32))
}

/// Both sides of the boundedness estimate
/// `|Af(z)| ≤ (2π)^{-n} sup_C |a(·, z)| · Π length(C_j) · sup_C |f|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InverseEstimate {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Checks the estimate at the given points. `sup_C |a(·, z)|` is taken over
/// the trapezoid nodes used for the integral, which bounds the discrete sum
/// exactly once the rule is exact for the integrand.
pub fn inverse_estimate_check(
    k: &KernelCoefficients,
    f: &PowerSeries,
    contour: &Contour,
    points: &[Vec<Complex64>],
    nodes: usize,
) -> Result<InverseEstimate> {
    check_inverse_inputs(k, f, contour)?;
    let af = matrix_from_kernel(k).apply(f)?;
    let radii = contour.radii();
    let f_sup = sup_norm(f, &ReinhardtDomain::polydisc(radii.clone())?, 1.0)?.upper;
    let lengths: f64 = contour.circles.iter().map(|c| c.length()).product();
    let scale = lengths / (2.0 * std::f64::consts::PI).powi(k.dim_zeta as i32);
    let n = k.dim_zeta;
    let mut lhs: f64 = 0.0;
    let mut rhs = f64::INFINITY;
    for z in points {
        lhs = lhs.max(af.eval(z)?.norm());
        let mut idx = vec![0usize; n];
        let mut a_sup: f64 = 0.0;
        for flat in 0..nodes.pow(n as u32) {
            crate::fourier::unflatten(flat, n, nodes, &mut idx);
            let w: Vec<Complex64> = idx
                .iter()
                .zip(&radii)
                .map(|(&i, r)| Complex64::from_polar(*r, 2.0 * std::f64::consts::PI * i as f64 / nodes as f64))
                .collect();
            a_sup = a_sup.max(kernel_eval(k, &w, z)?.norm());
        }
        rhs = rhs.min(scale * a_sup * f_sup);
        let point_ok = af.eval(z)?.norm() <= scale * a_sup * f_sup * (1.0 + 1e-12) + 1e-12;
        if !point_ok {
            return Ok(InverseEstimate { lhs, rhs, ok: false });
        }
    }
    Ok(InverseEstimate {
        lhs,
        rhs,
        ok: true,
    })
}

/// Lower estimate of the norm of `A` from `H(s·G_1)` to `H(r·G_2)`:
/// the largest ratio `‖Af‖_{rG_2}(lower) / ‖f‖_{sG_1}(upper)` over every
/// monomial probe `w^α` (`|α| ≤ trunc_in`) and `trials` gaussian polynomials.
pub fn operator_norm_estimate(
    a: &OperatorMatrix,
    g1: &ReinhardtDomain,
    g2: &ReinhardtDomain,
    r: f64,
    s: f64,
    trials: usize,
    rng: &mut SplitMix64,
) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0 && s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidParameter(format!("scales r={r}, s={s}")));
    }
    let ratio = |f: &PowerSeries| -> Result<f64> {
        let den = sup_norm(f, g1, s)?.upper;
        if den == 0.0 {
            return Ok(0.0);
        }
        Ok(sup_norm(&a.apply(f)?, g2, r)?.lower / den)
    };
    let mut best: f64 = 0.0;
    for alpha in enumerate_indices(a.dim_in, a.trunc_in) {
        best = best.max(ratio(&PowerSeries::monomial(alpha, Complex64::new(1.0, 0.0)))?);
    }
    for _ in 0..trials {
        best = best.max(ratio(&random_polynomial(rng, a.dim_in, a.trunc_in))?);
    }
    Ok(best)
}

/// `ũ` from the moments `u(z^α)`: `d_α = (-1)^n u(z^α)` for `|α| ≤ trunc`.
pub fn dual_kernel_from_functional(
    moments: impl Fn(&MultiIndex) -> Complex64,
    n: usize,
    trunc: u32,
) -> LaurentSeries {
    let s = sign(n);
    LaurentSeries::from_terms(
        n,
        trunc,
        enumerate_indices(n, trunc)
            .into_iter()
            .map(|a| {
                let c = moments(&a) * s;
                (a, c)
            }),
    )
    .expect("indices within truncation")
}

/// Linear functionals with closed-form moments `u(z^α)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Functional {
    /// `f ↦ f(0)`
    EvalZero,
    /// `u(z^α) = 1`
    Ones,
    /// `f ↦ c_γ(f)`
    Coefficient(MultiIndex),
    /// `u(z^α) = |α|`
    Degree,
    /// `u(z^α) = Π (α_j + 1)`
    Growth,
}

impl Functional {
    pub fn moment(&self, alpha: &MultiIndex) -> Complex64 {
        let v = match self {
            Functional::EvalZero => f64::from(u8::from(alpha.is_zero())),
            Functional::Ones => 1.0,
            Functional::Coefficient(g) => f64::from(u8::from(alpha == g)),
            Functional::Degree => f64::from(alpha.degree()),
            Functional::Growth => alpha.entries().iter().map(|&e| f64::from(e) + 1.0).product(),
        };
        Complex64::new(v, 0.0)
    }
}

impl FromStr for Functional {
    type Err = Error;

    /// `eval0`, `ones`, `degree`, `growth`, `coeff:<a1>,<a2>,...`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eval0" => Ok(Functional::EvalZero),
            "ones" => Ok(Functional::Ones),
            "degree" => Ok(Functional::Degree),
            "growth" => Ok(Functional::Growth),
            _ => {
                let idx = s
                    .strip_prefix("coeff:")
                    .and_then(|a| {
                        a.split(',')
                            .map(|x| x.trim().parse::<u32>().ok())
                            .collect::<Option<Vec<_>>>()
                    })
                    .filter(|v| !v.is_empty())
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown functional {s:?}")))?;
                Ok(Functional::Coefficient(MultiIndex::new(idx)))
            }
        }
    }
}

/// `u(f) = (-1)^n (2πi)^{-n} ∮_C ũ(λ) f(λ) dλ` by quadrature.
pub fn dual_pair(
    u: &LaurentSeries,
    f: &PowerSeries,
    contour: &Contour,
    q: &QuadratureSpec,
) -> Result<Complex64> {
    let n = u.dim();
    for found in [f.dim(), contour.dim()] {
        if found != n {
            return Err(Error::DimensionMismatch { expected: n, found });
        }
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let v = contour_integral(&|l: &[Complex64]| u.value(l) * f.value(l), contour, q)?;
    Ok(v * sign(n) / two_pi_i.powu(n as u32))
}

/// Coefficient form of the pairing: `(-1)^n Σ_α d_α c_α(f)`.
pub fn dual_pair_exact(u: &LaurentSeries, f: &PowerSeries) -> Result<Complex64> {
    if u.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: f.dim(),
        });
    }
    let s: Complex64 = u.terms().map(|(a, d)| d * f.coeff(a)).sum();
    Ok(s * sign(u.dim()))
}

/// One row of the growth demonstration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n_param: u32,
    pub pairing: f64,
    pub norm: f64,
    pub ratio: f64,
}

/// Pairs `ũ` with moments `Π (α_j + 1)` (a second-order pole at `λ = 1`) against
/// the probes `f_N(z) = Π_j (1 - z_j(1 - 1/N))^{-1}` truncated at `trunc`, and
/// reports `|u(f_N)| / ‖f_N‖` on the unit polydisc. The ratio grows without
/// bound, so no bounded functional has this `ũ` as its kernel.
pub fn dual_growth_demo(n: usize, trunc: u32, params: &[u32]) -> Result<Vec<GrowthRow>> {
    let u = dual_kernel_from_functional(|a| Functional::Growth.moment(a), n, trunc);
    let unit = ReinhardtDomain::unit_polydisc(n);
    params
        .iter()
        .map(|&big_n| {
            if big_n == 0 {
                return Err(Error::InvalidParameter("probe parameter N must be ≥ 1".into()));
            }
            let q = 1.0 - 1.0 / f64::from(big_n);
            let f = PowerSeries::from_terms(
                n,
                trunc,
                enumerate_indices(n, trunc)
                    .into_iter()
                    .map(|a| {
                        let c = Complex64::new(q.powi(a.degree() as i32), 0.0);
                        (a, c)
                    }),
            )?;
            let pairing = dual_pair_exact(&u, &f)?.norm();
            let norm = sup_norm(&f, &unit, 1.0)?.upper;
            Ok(GrowthRow {
                n_param: big_n,
                pairing,
                norm,
                ratio: pairing / norm,
            })
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct MatrixEntryJson {
    beta: MultiIndex,
    alpha: MultiIndex,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim_in: usize,
    dim_out: usize,
    trunc_in: u32,
    trunc_out: u32,
    entries: Vec<MatrixEntryJson>,
}

impl Serialize for OperatorMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            trunc_in: self.trunc_in,
            trunc_out: self.trunc_out,
            entries: self
                .entries
                .iter()
                .map(|((b, a), c)| MatrixEntryJson {
                    beta: b.clone(),
                    alpha: a.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OperatorMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        if j.dim_in == 0 || j.dim_out == 0 {
            return Err(serde::de::Error::custom("matrix dimension 0"));
        }
        let mut m = OperatorMatrix::zero(j.dim_in, j.dim_out, j.trunc_in, j.trunc_out);
        for e in j.entries {
            let prev = m.get(&e.beta, &e.alpha);
            m.set(e.beta, e.alpha, prev + Complex64::new(e.re, e.im))
                .map_err(serde::de::Error::custom)?;
        }
        Ok(m)
    }
}

#[derive(Serialize, Deserialize)]
struct KernelEntryJson {
    alpha: MultiIndex,
    beta: MultiIndex,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct KernelJson {
    dim_zeta: usize,
    dim_z: usize,
    trunc_zeta: u32,
    trunc_z: u32,
    entries: Vec<KernelEntryJson>,
}

impl Serialize for KernelCoefficients {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        KernelJson {
            dim_zeta: self.dim_zeta,
            dim_z: self.dim_z,
            trunc_zeta: self.trunc_zeta,
            trunc_z: self.trunc_z,
            entries: self
                .entries
                .iter()
                .map(|((a, b), c)| KernelEntryJson {
                    alpha: a.clone(),
                    beta: b.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for KernelCoefficients {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = KernelJson::deserialize(d)?;
        if j.dim_zeta == 0 || j.dim_z == 0 {
            return Err(serde::de::Error::custom("kernel dimension 0"));
        }
        let mut k = KernelCoefficients::zero(j.dim_zeta, j.dim_z, j.trunc_zeta, j.trunc_z);
        for e in j.entries {
            let prev = k.get(&e.alpha, &e.beta);
            k.set(e.alpha, e.beta, prev + Complex64::new(e.re, e.im))
                .map_err(serde::de::Error::custom)?;
        }
        Ok(k)
    }
}
