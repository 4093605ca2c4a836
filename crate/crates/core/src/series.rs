//! Truncated power series `Σ c_m z^m` and complement-side Laurent series
//! `Σ d_α λ^{-(α+1)}`, both truncated by total degree and stored sparsely.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use crate::domains::{monomial_max, monomial_modulus, ReinhardtDomain};
use crate::error::{Error, Result};
use crate::fourier;
use crate::multiindex::MultiIndex;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Sparse coefficient storage shared by both series kinds. Absent entries are
/// exact zeros; iteration is graded-lex.
#[derive(Clone, Debug, PartialEq)]
struct Terms {
    dim: usize,
    trunc: u32,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl Terms {
    fn new(dim: usize, trunc: u32) -> Self {
        assert!(dim >= 1, "series dimension must be ≥ 1");
        Terms {
            dim,
            trunc,
            coeffs: BTreeMap::new(),
        }
    }

    fn set(&mut self, idx: MultiIndex, c: Complex64) -> Result<()> {
        if idx.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: idx.dim(),
            });
        }
        if idx.degree() > self.trunc {
            return Err(Error::TruncationExceeded {
                degree: idx.degree(),
                trunc: self.trunc,
            });
        }
        if c == ZERO {
            self.coeffs.remove(&idx);
        } else {
            self.coeffs.insert(idx, c);
        }
        Ok(())
    }

    fn max_exponents(&self) -> Vec<u32> {
        let mut out = vec![0; self.dim];
        for m in self.coeffs.keys() {
            for (o, &e) in out.iter_mut().zip(m.entries()) {
                *o = (*o).max(e);
            }
        }
        out
    }

    /// `Σ c_m Π x_j^{m_j}` with per-coordinate power tables.
    fn eval_powers(&self, x: &[Complex64]) -> Complex64 {
        let maxe = self.max_exponents();
        let tables: Vec<Vec<Complex64>> = x
            .iter()
            .zip(&maxe)
            .map(|(&xj, &e)| {
                let mut t = Vec::with_capacity(e as usize + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..=e {
                    t.push(acc);
                    acc *= xj;
                }
                t
            })
            .collect();
        self.coeffs
            .iter()
            .map(|(m, c)| {
                m.entries()
                    .iter()
                    .zip(&tables)
                    .fold(*c, |acc, (&e, t)| acc * t[e as usize])
            })
            .sum()
    }
}

/// Truncated Taylor series in `dim` variables with total degree `≤ trunc`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries(Terms);

impl PowerSeries {
    pub fn zero(dim: usize, trunc: u32) -> Self {
        PowerSeries(Terms::new(dim, trunc))
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut s = PowerSeries::zero(dim, 0);
        s.set(MultiIndex::zero(dim), c).unwrap();
        s
    }

    pub fn monomial(m: MultiIndex, c: Complex64) -> Self {
        let mut s = PowerSeries::zero(m.dim(), m.degree());
        s.set(m, c).unwrap();
        s
    }

    pub fn from_terms(
        dim: usize,
        trunc: u32,
        terms: impl IntoIterator<Item = (MultiIndex, Complex64)>,
    ) -> Result<Self> {
        let mut s = PowerSeries::zero(dim, trunc);
        for (m, c) in terms {
            let prev = s.coeff(&m);
            s.set(m, prev + c)?;
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn trunc(&self) -> u32 {
        self.0.trunc
    }

    pub fn coeff(&self, m: &MultiIndex) -> Complex64 {
        self.0.coeffs.get(m).copied().unwrap_or(ZERO)
    }

    pub fn set(&mut self, m: MultiIndex, c: Complex64) -> Result<()> {
        self.0.set(m, c)
    }

    /// Nonzero terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.0.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.0.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.coeffs.is_empty()
    }

    /// Largest degree of a stored term (0 for the zero series).
    pub fn degree(&self) -> u32 {
        self.0.coeffs.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    pub fn max_exponents(&self) -> Vec<u32> {
        self.0.max_exponents()
    }

    /// Same coefficients under a larger (or equal) truncation bound.
    pub fn with_trunc(mut self, trunc: u32) -> Self {
        self.0.coeffs.retain(|m, _| m.degree() <= trunc);
        self.0.trunc = trunc;
        self
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        self.check_dim(z.len())?;
        Ok(self.0.eval_powers(z))
    }

    /// `c_m ↦ c_m r^{|m|}`, i.e. `z ↦ f(rz)`.
    pub fn dilate(&self, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!("dilation factor {r}")));
        }
        Ok(self.map_terms(|m, c| c * r.powi(m.degree() as i32)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map_terms(|_, c| c * s)
    }

    fn map_terms(&self, f: impl Fn(&MultiIndex, Complex64) -> Complex64) -> Self {
        let mut out = PowerSeries::zero(self.dim(), self.trunc());
        for (m, c) in self.terms() {
            out.set(m.clone(), f(m, *c)).unwrap();
        }
        out
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        let trunc = self.trunc().max(other.trunc());
        PowerSeries::from_terms(
            self.dim(),
            trunc,
            self.terms()
                .chain(other.terms())
                .map(|(m, c)| (m.clone(), *c)),
        )
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Product truncated at total degree `trunc`.
    pub fn try_mul(&self, other: &Self, trunc: u32) -> Result<Self> {
        self.check_dim(other.dim())?;
        let mut acc: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (a, ca) in self.terms() {
            if a.degree() > trunc {
                continue;
            }
            for (b, cb) in other.terms() {
                if a.degree() + b.degree() > trunc {
                    continue;
                }
                *acc.entry(a.plus(b)).or_insert(ZERO) += ca * cb;
            }
        }
        PowerSeries::from_terms(self.dim(), trunc, acc)
    }

    /// Values on the torus `|z_j| = radii_j` at `p` equispaced phases per
    /// coordinate (phase `2π i/p`), computed exactly by an inverse FFT; the
    /// aliasing of exponents modulo `p` is exact at the grid nodes.
    pub fn torus_values(&self, radii: &[f64], p: usize) -> Vec<Complex64> {
        let n = self.dim();
        let mut grid = vec![ZERO; fourier::grid_len(n, p)];
        for (m, c) in self.terms() {
            let w = monomial_modulus(radii, m);
            if w == 0.0 {
                continue;
            }
            let off = fourier::wrapped_offset(m.entries().iter().map(|&e| i64::from(e)), p);
            grid[off] += c * w;
        }
        fourier::fft_nd(&mut grid, n, p, FftDirection::Inverse);
        grid
    }
}

/// Complement-side series `g(λ) = Σ_α d_α λ^{-(α+1)}`; vanishes as any
/// `|λ_j| → ∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries(Terms);

impl LaurentSeries {
    pub fn zero(dim: usize, trunc: u32) -> Self {
        LaurentSeries(Terms::new(dim, trunc))
    }

    pub fn from_terms(
        dim: usize,
        trunc: u32,
        terms: impl IntoIterator<Item = (MultiIndex, Complex64)>,
    ) -> Result<Self> {
        let mut s = LaurentSeries::zero(dim, trunc);
        for (m, c) in terms {
            let prev = s.coeff(&m);
            s.set(m, prev + c)?;
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn trunc(&self) -> u32 {
        self.0.trunc
    }

    pub fn coeff(&self, a: &MultiIndex) -> Complex64 {
        self.0.coeffs.get(a).copied().unwrap_or(ZERO)
    }

    pub fn set(&mut self, a: MultiIndex, c: Complex64) -> Result<()> {
        self.0.set(a, c)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.0.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.0.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.coeffs.is_empty()
    }

    pub fn eval(&self, lambda: &[Complex64]) -> Result<Complex64> {
        if lambda.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: lambda.len(),
            });
        }
        let inv = reciprocals(lambda)?;
        let prefactor: Complex64 = inv.iter().product();
        Ok(prefactor * self.0.eval_powers(&inv))
    }
}

pub(crate) fn reciprocals(x: &[Complex64]) -> Result<Vec<Complex64>> {
    x.iter()
        .enumerate()
        .map(|(j, v)| {
            if *v == ZERO {
                Err(Error::Pole(j))
            } else {
                Ok(v.inv())
            }
        })
        .collect()
}

/// Either series kind, for code that samples a function on a contour.
pub trait Holomorphic: Sync {
    fn dim(&self) -> usize;
    fn value(&self, z: &[Complex64]) -> Complex64;
}

impl Holomorphic for PowerSeries {
    fn dim(&self) -> usize {
        PowerSeries::dim(self)
    }
    fn value(&self, z: &[Complex64]) -> Complex64 {
        self.0.eval_powers(z)
    }
}

impl Holomorphic for LaurentSeries {
    fn dim(&self) -> usize {
        LaurentSeries::dim(self)
    }
    fn value(&self, z: &[Complex64]) -> Complex64 {
        self.eval(z).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    }
}

/// Coefficients of `Π_j 1/(w_j - ζ_j) = (-1)^n Σ_α w^α ζ^{-(α+1)}` truncated
/// at `|α| ≤ trunc`, as a power series in `w`.
pub fn cauchy_kernel_series(zeta: &[Complex64], trunc: u32) -> Result<PowerSeries> {
    let n = zeta.len();
    let inv = reciprocals(zeta)?;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let base: Complex64 = inv.iter().product::<Complex64>() * sign;
    let mut out = PowerSeries::zero(n, trunc);
    for a in crate::multiindex::enumerate_indices(n, trunc) {
        let c = a
            .entries()
            .iter()
            .zip(&inv)
            .fold(base, |acc, (&e, v)| acc * v.powu(e));
        out.set(a, c)?;
    }
    Ok(out)
}

/// Lower and upper bracket of a sup-norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Sampling density for [`sup_norm_with`].
#[derive(Clone, Copy, Debug)]
pub struct SupNormSampling {
    /// Phases per coordinate (rounded up to a power of two).
    pub phases: usize,
    /// Simplex subdivisions for the radius profiles of non-polydisc domains.
    pub profile_resolution: u32,
}

impl SupNormSampling {
    pub fn default_for(f: &PowerSeries) -> Self {
        let n = f.dim();
        let maxe = f.max_exponents().into_iter().max().unwrap_or(0) as usize;
        let cap = match n {
            1 => 1024,
            2 => 128,
            3 => 32,
            _ => 16,
        };
        let phases = (8 * (maxe + 1)).next_power_of_two().clamp(16, cap);
        let profile_resolution = match n {
            1 => 1,
            2 => 24,
            3 => 12,
            _ => 6,
        };
        SupNormSampling {
            phases,
            profile_resolution,
        }
    }
}

/// Brackets `sup_{r·G} |f|`.
///
/// The lower value is the largest modulus on a tensor phase grid over a set of
/// outer-boundary radius profiles of `r·G` (the closure maximum is attained on
/// such profiles by the maximum principle in each coordinate). The upper value
/// is `Σ |c_m| sup_{r·G} |z^m|`. Single-term series are bracketed exactly.
pub fn sup_norm(f: &PowerSeries, domain: &ReinhardtDomain, r: f64) -> Result<NormBounds> {
    sup_norm_with(f, domain, r, SupNormSampling::default_for(f))
}

pub fn sup_norm_with(
    f: &PowerSeries,
    domain: &ReinhardtDomain,
    r: f64,
    sampling: SupNormSampling,
) -> Result<NormBounds> {
    if domain.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            found: f.dim(),
        });
    }
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("scale {r}")));
    }
    let upper: f64 = f
        .terms()
        .map(|(m, c)| c.norm() * r.powi(m.degree() as i32) * monomial_max(domain, m))
        .sum();
    if f.len() <= 1 {
        return Ok(NormBounds {
            lower: upper,
            upper,
        });
    }
    let scaled = domain.scaled(r);
    let p = sampling.phases.next_power_of_two();
    let lower = scaled
        .boundary_profiles(sampling.profile_resolution)
        .iter()
        .map(|radii| {
            f.torus_values(radii, p)
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    Ok(NormBounds {
        lower: lower.min(upper),
        upper,
    })
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    idx: MultiIndex,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    kind: String,
    dim: usize,
    trunc: u32,
    terms: Vec<TermJson>,
}

fn terms_to_json(kind: &str, t: &Terms) -> SeriesJson {
    SeriesJson {
        kind: kind.into(),
        dim: t.dim,
        trunc: t.trunc,
        terms: t
            .coeffs
            .iter()
            .map(|(m, c)| TermJson {
                idx: m.clone(),
                re: c.re,
                im: c.im,
            })
            .collect(),
    }
}

fn terms_from_json(expected_kind: &str, j: SeriesJson) -> Result<Terms> {
    if j.kind != expected_kind {
        return Err(Error::Malformed(format!(
            "expected series kind {expected_kind:?}, found {:?}",
            j.kind
        )));
    }
    if j.dim == 0 {
        return Err(Error::Malformed("series dimension 0".into()));
    }
    let mut t = Terms::new(j.dim, j.trunc);
    for term in j.terms {
        let c = Complex64::new(term.re, term.im);
        let prev = t.coeffs.get(&term.idx).copied().unwrap_or(ZERO);
        t.set(term.idx, prev + c)?;
    }
    Ok(t)
}

impl Serialize for PowerSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        terms_to_json("power", &self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PowerSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SeriesJson::deserialize(d)?;
        terms_from_json("power", j)
            .map(PowerSeries)
            .map_err(serde::de::Error::custom)
    }
}

impl Serialize for LaurentSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        terms_to_json("laurent", &self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SeriesJson::deserialize(d)?;
        terms_from_json("laurent", j)
            .map(LaurentSeries)
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_sparse_polynomial, SplitMix64};
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn mi<const N: usize>(v: [u32; N]) -> MultiIndex {
        MultiIndex::from(v)
    }

    #[test]
    fn eval_examples() {
        let f = PowerSeries::from_terms(2, 2, [(mi([0, 0]), c(1.0)), (mi([1, 1]), c(2.0))]).unwrap();
        assert_eq!(f.eval(&[c(0.5), c(1.0)]).unwrap(), c(2.0));
        assert_eq!(f.eval(&[c(0.0), c(0.0)]).unwrap(), f.coeff(&mi([0, 0])));

        let g = LaurentSeries::from_terms(1, 0, [(mi([0]), c(1.0))]).unwrap();
        assert_eq!(g.eval(&[c(2.0)]).unwrap(), c(0.5));
        assert_eq!(g.eval(&[c(0.0)]).unwrap_err(), Error::Pole(0));
    }

    #[test]
    fn exp_truncation() {
        let mut f = PowerSeries::zero(1, 10);
        let mut fact = 1.0;
        for k in 0..=10u32 {
            if k > 0 {
                fact *= f64::from(k);
            }
            f.set(mi([k]), c(1.0 / fact)).unwrap();
        }
        let v = f.eval(&[c(1.0)]).unwrap();
        assert!((v.re - std::f64::consts::E).abs() < 3e-7);
    }

    #[test]
    fn dilate_examples() {
        let f = PowerSeries::monomial(mi([2, 0]), c(1.0));
        assert_eq!(f.dilate(0.5).unwrap().coeff(&mi([2, 0])), c(0.25));
        assert_eq!(f.dilate(1.0).unwrap(), f);
        assert!(f.dilate(0.0).is_err());
    }

    #[test]
    fn dilate_matches_grid_evaluation() {
        // f = Σ_{|m|≤D} z^m; compare coefficient dilation with direct
        // evaluation f(0.9 z) on the boundary of 0.5·polydisc
        let d = 6;
        let f = PowerSeries::from_terms(
            2,
            d,
            crate::multiindex::enumerate_indices(2, d).into_iter().map(|m| (m, c(1.0))),
        )
        .unwrap();
        let g = f.dilate(0.9).unwrap();
        for i in 0..16 {
            for j in 0..16 {
                let z = [
                    Complex64::from_polar(0.5, i as f64 * 0.39),
                    Complex64::from_polar(0.5, j as f64 * 0.41),
                ];
                let direct = f.eval(&[z[0] * 0.9, z[1] * 0.9]).unwrap();
                assert!((g.eval(&z).unwrap() - direct).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn sup_norm_examples() {
        let pd = ReinhardtDomain::unit_polydisc(2);
        let f = PowerSeries::monomial(mi([1, 1]), c(1.0));
        let b = sup_norm(&f, &pd, 1.0).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 1.0));

        let ball = ReinhardtDomain::ball(2, 1.0).unwrap();
        let z1 = PowerSeries::monomial(mi([1, 0]), c(1.0));
        let b = sup_norm(&z1, &ball, 1.0).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 1.0));

        let s = PowerSeries::from_terms(2, 1, [(mi([1, 0]), c(1.0)), (mi([0, 1]), c(1.0))]).unwrap();
        let b = sup_norm(&s, &pd, 1.0).unwrap();
        assert!((b.lower - 2.0).abs() < 1e-6 && (b.upper - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sup_norm_phase_oracle() {
        // dense direct phase grid vs FFT torus sampling
        let mut rng = SplitMix64::new(11);
        let f = crate::rng::random_polynomial(&mut rng, 2, 4);
        let pd = ReinhardtDomain::polydisc(vec![0.8, 1.1]).unwrap();
        let b = sup_norm(&f, &pd, 0.9).unwrap();
        let mut best: f64 = 0.0;
        let steps = 400;
        for i in 0..steps {
            for j in 0..steps {
                let t = 2.0 * std::f64::consts::PI / steps as f64;
                let z = [
                    Complex64::from_polar(0.72, t * i as f64),
                    Complex64::from_polar(0.99, t * j as f64),
                ];
                best = best.max(f.eval(&z).unwrap().norm());
            }
        }
        assert!(b.lower <= best + 1e-12);
        assert!(best <= b.upper + 1e-12);
        assert!((b.lower - best).abs() / best < 5e-2);
    }

    #[test]
    fn arithmetic_examples() {
        let a = PowerSeries::from_terms(1, 1, [(mi([0]), c(1.0)), (mi([1]), c(1.0))]).unwrap();
        let b = PowerSeries::from_terms(1, 1, [(mi([0]), c(1.0)), (mi([1]), c(-1.0))]).unwrap();
        let p = a.try_mul(&b, 2).unwrap();
        assert_eq!(p.coeff(&mi([0])), c(1.0));
        assert_eq!(p.coeff(&mi([1])), c(0.0));
        assert_eq!(p.coeff(&mi([2])), c(-1.0));
        assert_eq!(p.len(), 2);

        let one = PowerSeries::constant(1, c(1.0));
        assert_eq!(a.try_mul(&one, 1).unwrap(), a);

        let geo = PowerSeries::from_terms(1, 5, (0..=5).map(|k| (mi([k]), c(1.0)))).unwrap();
        assert_eq!(geo.try_mul(&geo, 10).unwrap().coeff(&mi([4])), c(5.0));

        let two = PowerSeries::constant(2, c(1.0));
        assert!(matches!(a.try_add(&two), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn cauchy_kernel_examples() {
        let k = cauchy_kernel_series(&[c(2.0)], 2).unwrap();
        assert_eq!(k.coeff(&mi([0])), c(-0.5));
        assert_eq!(k.coeff(&mi([1])), c(-0.25));
        assert_eq!(k.coeff(&mi([2])), c(-0.125));

        let k2 = cauchy_kernel_series(&[c(2.0), c(3.0)], 3).unwrap();
        assert!((k2.coeff(&mi([0, 0])) - c(1.0 / 6.0)).norm() < 1e-16);

        for d in 0..12u32 {
            let k = cauchy_kernel_series(&[c(2.0)], d).unwrap();
            let err = (k.eval(&[c(0.5)]).unwrap() - c(1.0 / (0.5 - 2.0))).norm();
            assert!(err <= 0.25f64.powi(d as i32 + 1) / 1.5 + 1e-15);
        }
        assert_eq!(cauchy_kernel_series(&[c(1.0), c(0.0)], 2).unwrap_err(), Error::Pole(1));
    }

    #[test]
    fn cauchy_kernel_grid_tail() {
        let d = 10;
        for i in 0..8 {
            for j in 0..8 {
                let zeta = [
                    Complex64::from_polar(2.0 + i as f64 * 0.3, i as f64),
                    Complex64::from_polar(2.5, j as f64 * 0.7),
                ];
                let w = [
                    Complex64::from_polar(0.5, j as f64),
                    Complex64::from_polar(0.3 + 0.02 * i as f64, 1.0),
                ];
                let k = cauchy_kernel_series(&zeta, d).unwrap();
                let exact = (w[0] - zeta[0]).inv() * (w[1] - zeta[1]).inv();
                // tail of Σ_{|α|>D} |w|^α |ζ|^{-α-1} with ratios ≤ 1/4
                let tail: f64 = (d + 1..200)
                    .map(|m| (m + 1) as f64 * 0.25f64.powi(m as i32))
                    .sum::<f64>()
                    / 4.0;
                assert!((k.eval(&w).unwrap() - exact).norm() <= tail);
            }
        }
    }

    #[test]
    fn json_format() {
        let f = PowerSeries::from_terms(2, 3, [(mi([1, 1]), Complex64::new(2.0, -1.0)), (mi([0, 0]), c(1.0))])
            .unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(
            s,
            r#"{"kind":"power","dim":2,"trunc":3,"terms":[{"idx":[0,0],"re":1.0,"im":0.0},{"idx":[1,1],"re":2.0,"im":-1.0}]}"#
        );
        let back: PowerSeries = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<LaurentSeries>(&s).is_err());
        let bad = r#"{"kind":"power","dim":1,"trunc":1,"terms":[{"idx":[3],"re":1,"im":0}]}"#;
        assert!(serde_json::from_str::<PowerSeries>(bad).is_err());
    }

    fn arb_series(seed: u64) -> PowerSeries {
        let mut rng = SplitMix64::new(seed);
        random_sparse_polynomial(&mut rng, 2, 4, 0.4)
    }

    fn round(f: &PowerSeries) -> BTreeMap<MultiIndex, (i64, i64)> {
        f.terms()
            .map(|(m, c)| (m.clone(), ((c.re * 1e9).round() as i64, (c.im * 1e9).round() as i64)))
            .collect()
    }

    proptest! {
        #[test]
        fn dilation_composes(seed in 0u64..1000, r in 0.05f64..1.0, s in 0.05f64..1.0) {
            let f = arb_series(seed);
            let lhs = f.dilate(r).unwrap().dilate(s).unwrap();
            let rhs = f.dilate(r * s).unwrap();
            for (m, cf) in lhs.terms() {
                prop_assert!((cf - rhs.coeff(m)).norm() <= 1e-14 * cf.norm().max(1.0));
            }
            prop_assert_eq!(lhs.len(), rhs.len());
        }

        #[test]
        fn ring_axioms(a in 0u64..500, b in 500u64..1000, c3 in 1000u64..1500) {
            let (f, g, h) = (arb_series(a), arb_series(b), arb_series(c3));
            prop_assert_eq!(round(&f.try_mul(&g, 6).unwrap()), round(&g.try_mul(&f, 6).unwrap()));
            prop_assert_eq!(round(&f.try_add(&g).unwrap()), round(&g.try_add(&f).unwrap()));
            let left = f.try_mul(&g, 6).unwrap().try_mul(&h, 6).unwrap();
            let right = f.try_mul(&g.try_mul(&h, 6).unwrap(), 6).unwrap();
            prop_assert_eq!(round(&left), round(&right));
        }

        #[test]
        fn bracket_ordered(seed in 0u64..200, r in 0.1f64..1.0) {
            let f = arb_series(seed);
            let ball = ReinhardtDomain::ball(2, 1.0).unwrap();
            let b = sup_norm(&f, &ball, r).unwrap();
            prop_assert!(b.lower <= b.upper);
        }
    }
}
