//! Projections onto the subspaces `H_k` of a complete circled domain, the
//! decomposition `f = P_0 f + Σ_k P_k f`, its quantitative estimates, and
//! operators assembled from blocks acting on the individual `H_k`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domains::{delta, Contour, ReinhardtDomain};
use crate::error::{Error, Result};
use crate::kernelop::{operator_norm_estimate, OperatorMatrix};
use crate::multiindex::{count_degree, enumerate_primitives, primitive_factor, MultiIndex, PrimitiveIndex};
use crate::quadrature::{taylor_coeffs, QuadratureSpec};
use crate::rng::{random_polynomial, SplitMix64};
use crate::series::{sup_norm, Holomorphic, NormBounds, PowerSeries};

/// Slack added to every inequality check.
pub const CHECK_SLACK: f64 = 1e-9;

/// The primitive indices up to a degree together with their polydiscs `Δ(k)`.
#[derive(Clone, Debug)]
pub struct ProjectionFamily {
    pub domain: ReinhardtDomain,
    pub max_degree: u32,
    deltas: BTreeMap<PrimitiveIndex, Vec<f64>>,
}

impl ProjectionFamily {
    pub fn new(domain: ReinhardtDomain, max_degree: u32) -> Self {
        let deltas = enumerate_primitives(domain.dim(), max_degree)
            .into_iter()
            .map(|k| {
                let d = delta(&domain, &k);
                (k, d)
            })
            .collect();
        ProjectionFamily {
            domain,
            max_degree,
            deltas,
        }
    }

    pub fn primitives(&self) -> impl Iterator<Item = &PrimitiveIndex> {
        self.deltas.keys()
    }

    pub fn delta(&self, k: &PrimitiveIndex) -> Option<&[f64]> {
        self.deltas.get(k).map(Vec::as_slice)
    }
}

/// `P_k f = Σ_{l≥1} c_{kl} z^{kl}`.
pub fn project(f: &PowerSeries, k: &PrimitiveIndex) -> PowerSeries {
    PowerSeries::from_terms(
        f.dim(),
        f.trunc(),
        f.terms()
            .filter(|(m, _)| k.multiple_of(m).is_some())
            .map(|(m, c)| (m.clone(), *c)),
    )
    .expect("subset of valid terms")
}

/// `P_0 f = f(0)`.
pub fn project_zero(f: &PowerSeries) -> Complex64 {
    f.coeff(&MultiIndex::zero(f.dim()))
}

/// `P_k f` from the contour form: the coefficients `c_{kl}` are
/// `(2πi)^{-n} ∮ f(ζ) ζ^{-kl} dζ/ζ` over the distinguished boundary of
/// `s·Δ(k)`, for `|kl|` up to the degree of `f`.
pub fn project_quadrature(
    f: &PowerSeries,
    k: &PrimitiveIndex,
    domain: &ReinhardtDomain,
    s: f64,
    q: &QuadratureSpec,
) -> Result<PowerSeries> {
    check_dim(domain, f.dim())?;
    check_dim(domain, k.dim())?;
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidParameter(format!("shrink factor {s}")));
    }
    let radii: Vec<f64> = delta(domain, k).iter().map(|r| r * s).collect();
    if radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::DegenerateDelta);
    }
    let contour = Contour::centered(&radii)?;
    let top = f.degree() / k.degree();
    let alphas: Vec<MultiIndex> = (1..=top).map(|l| k.as_index().scaled(l)).collect();
    let coeffs = taylor_coeffs(&|z: &[Complex64]| f.value(z), &contour, &alphas, q)?;
    PowerSeries::from_terms(f.dim(), f.trunc(), alphas.into_iter().zip(coeffs))
}

fn check_dim(domain: &ReinhardtDomain, found: usize) -> Result<()> {
    if domain.dim() != found {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            found,
        });
    }
    Ok(())
}

fn check_scales(r: f64, s: f64) -> Result<f64> {
    if !(r > 0.0 && r < s && s < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < r < s < 1, got r={r}, s={s}"
        )));
    }
    Ok(r / s)
}

/// `Σ_{m≥N} C(n+m-1, n-1) θ^m`, summed until the terms stop mattering.
pub fn binomial_tail(n: usize, theta: f64, start: u32) -> f64 {
    if theta <= 0.0 {
        return if start == 0 { 1.0 } else { 0.0 };
    }
    let mut term = count_degree(n, start) as f64 * theta.powi(start as i32);
    let mut sum = 0.0;
    let mut m = start as f64;
    loop {
        sum += term;
        let ratio = (n as f64 + m) / (m + 1.0) * theta;
        term *= ratio;
        m += 1.0;
        if ratio < 1.0 && term <= sum * 1e-17 {
            break;
        }
        if m > 1e7 {
            break;
        }
    }
    sum
}

/// Output of [`decompose`].
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub p0: Complex64,
    pub parts: BTreeMap<PrimitiveIndex, PowerSeries>,
    /// `f - p0 - Σ parts`, exactly.
    pub remainder: PowerSeries,
    /// `2‖f‖_{sG} Σ_{m≥N} C(n+m-1,n-1) (r/s)^m`, bounding the remainder on `rG`.
    pub residual_bound: f64,
}

impl Decomposition {
    pub fn reconstruct(&self) -> Result<PowerSeries> {
        let mut acc = self.remainder.clone();
        acc = acc.try_add(&PowerSeries::constant(acc.dim(), self.p0).with_trunc(acc.trunc()))?;
        for part in self.parts.values() {
            acc = acc.try_add(part)?;
        }
        Ok(acc)
    }
}

/// `P_0 f` and `P_k f` for every primitive `|k| ≤ N`.
pub fn decompose(f: &PowerSeries, domain: &ReinhardtDomain, big_n: u32, r: f64, s: f64) -> Result<Decomposition> {
    check_dim(domain, f.dim())?;
    if big_n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let theta = check_scales(r, s)?;
    let parts: BTreeMap<PrimitiveIndex, PowerSeries> = enumerate_primitives(f.dim(), big_n)
        .into_iter()
        .map(|k| {
            let p = project(f, &k);
            (k, p)
        })
        .collect();
    let remainder = PowerSeries::from_terms(
        f.dim(),
        f.trunc(),
        f.terms()
            .filter(|(m, _)| match primitive_factor(m) {
                Ok((k, _)) => k.degree() > big_n,
                Err(_) => false,
            })
            .map(|(m, c)| (m.clone(), *c)),
    )?;
    let norm = sup_norm(f, domain, s)?.upper;
    Ok(Decomposition {
        p0: project_zero(f),
        parts,
        remainder,
        residual_bound: 2.0 * norm * binomial_tail(f.dim(), theta, big_n),
    })
}

/// Both sides of an estimate `lhs ≤ rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

impl BoundCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        BoundCheck {
            lhs,
            rhs,
            ok: lhs <= rhs + CHECK_SLACK,
        }
    }
}

/// Sup-norm bracket on the polydisc `c·Δ(k)`. Vanishing radii (the ball and
/// ellipsoids at indices with zero entries) are replaced by the smallest
/// positive float, which leaves every monomial that survives on `Δ(k)` intact.
fn delta_norm(f: &PowerSeries, domain: &ReinhardtDomain, k: &PrimitiveIndex, c: f64) -> Result<NormBounds> {
    let radii: Vec<f64> = delta(domain, k)
        .into_iter()
        .map(|r| r.max(f64::MIN_POSITIVE))
        .collect();
    sup_norm(f, &ReinhardtDomain::polydisc(radii)?, c)
}

fn geometric_factor(theta: f64, k: &PrimitiveIndex) -> f64 {
    let t = theta.powi(k.degree() as i32);
    t / (1.0 - t)
}

/// `‖P_k f‖_{rΔ(k)} ≤ r^{|k|}/(s^{|k|} - r^{|k|}) · ‖f‖_{sΔ(k)}`.
pub fn projection_bound_check(
    f: &PowerSeries,
    k: &PrimitiveIndex,
    domain: &ReinhardtDomain,
    r: f64,
    s: f64,
) -> Result<BoundCheck> {
    check_dim(domain, f.dim())?;
    let theta = check_scales(r, s)?;
    let lhs = delta_norm(&project(f, k), domain, k, r)?.lower;
    let rhs = geometric_factor(theta, k) * delta_norm(f, domain, k, s)?.upper;
    Ok(BoundCheck::new(lhs, rhs))
}

/// For `f ∈ H_k`: `‖f‖_{rG} ≤ ‖f‖_{sΔ(k)} · θ^{|k|}/(1 - θ^{|k|})`, `θ = r/s`.
pub fn topology_compare(
    f: &PowerSeries,
    k: &PrimitiveIndex,
    domain: &ReinhardtDomain,
    r: f64,
    s: f64,
) -> Result<BoundCheck> {
    check_dim(domain, f.dim())?;
    let theta = check_scales(r, s)?;
    if f.terms().any(|(m, _)| k.multiple_of(m).is_none()) {
        return Err(Error::NotInSubspace);
    }
    let lhs = sup_norm(f, domain, r)?.lower;
    let rhs = delta_norm(f, domain, k, s)?.upper * geometric_factor(theta, k);
    Ok(BoundCheck::new(lhs, rhs))
}

/// Fitted envelope `‖Q_k‖_{rG} ≤ C θ^{|k|}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    #[serde(rename = "C")]
    pub c: f64,
    pub theta: f64,
    pub ok: bool,
}

/// Least-squares fit of `ln ‖Q_k‖_{rG}` against `|k|` over the nonzero parts.
///
/// A family whose nonzero parts stop before its largest `|k|`, or span fewer
/// than two degrees, is finite and fits any `θ < 1`; it gets `θ = 1/2` unless
/// the fit is already smaller. `C` is the least constant with every norm
/// `≤ C θ^{|k|}`.
pub fn growth_criterion(
    parts: &BTreeMap<PrimitiveIndex, PowerSeries>,
    domain: &ReinhardtDomain,
    r: f64,
) -> Result<GrowthFit> {
    if parts.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut points = Vec::new();
    let mut top = 0;
    for (k, q) in parts {
        check_dim(domain, q.dim())?;
        top = top.max(k.degree());
        let norm = sup_norm(q, domain, r)?.upper;
        points.push((f64::from(k.degree()), norm));
    }
    let nonzero: Vec<(f64, f64)> = points.iter().copied().filter(|&(_, v)| v > 0.0).collect();
    let mut degrees: Vec<f64> = nonzero.iter().map(|p| p.0).collect();
    degrees.dedup();
    let fitted = if degrees.len() >= 2 {
        let m = nonzero.len() as f64;
        let mx = nonzero.iter().map(|p| p.0).sum::<f64>() / m;
        let my = nonzero.iter().map(|p| p.1.ln()).sum::<f64>() / m;
        let sxy: f64 = nonzero.iter().map(|p| (p.0 - mx) * (p.1.ln() - my)).sum();
        let sxx: f64 = nonzero.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some((sxy / sxx).exp())
    } else {
        None
    };
    let finite = nonzero.iter().map(|p| p.0).fold(0.0, f64::max) < f64::from(top) || degrees.len() < 2;
    let theta = match fitted {
        Some(t) if !finite => t,
        Some(t) => t.min(0.5),
        None => 0.5,
    };
    let c = nonzero
        .iter()
        .map(|&(d, v)| v / theta.powi(d as i32))
        .fold(0.0, f64::max);
    Ok(GrowthFit {
        c,
        theta,
        ok: theta < 1.0 - 1e-6,
    })
}

/// Remainder of the truncated decomposition against its tail bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionCheck {
    pub error_norm: f64,
    pub tail_bound: f64,
    pub ok: bool,
}

/// `‖f - P_0 f - Σ_{|k|<N} P_k f‖_{rG} ≤ 2‖f‖_{sG} Σ_{m≥N} C(n+m-1,n-1) θ^m`
/// with `θ = r/s`, which needs `θ^N ≤ 1/2`.
pub fn identity_decomposition_check(
    f: &PowerSeries,
    domain: &ReinhardtDomain,
    r: f64,
    s: f64,
    big_n: u32,
) -> Result<DecompositionCheck> {
    check_dim(domain, f.dim())?;
    let theta = check_scales(r, s)?;
    if big_n == 0 || theta.powi(big_n as i32) > 0.5 {
        return Err(Error::InvalidParameter(format!(
            "need (r/s)^N ≤ 1/2, got {}",
            theta.powi(big_n as i32)
        )));
    }
    let remainder = PowerSeries::from_terms(
        f.dim(),
        f.trunc(),
        f.terms()
            .filter(|(m, _)| match primitive_factor(m) {
                Ok((k, _)) => k.degree() >= big_n,
                Err(_) => false,
            })
            .map(|(m, c)| (m.clone(), *c)),
    )?;
    let error_norm = sup_norm(&remainder, domain, r)?.lower;
    let tail_bound = 2.0 * sup_norm(f, domain, s)?.upper * binomial_tail(f.dim(), theta, big_n);
    Ok(DecompositionCheck {
        error_norm,
        tail_bound,
        ok: error_norm <= tail_bound + CHECK_SLACK,
    })
}

/// Worst probe of the bound `‖(A∘P_k) f‖_{tG_2} ≤ C_k ‖f‖_{sΔ(k)}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockWitness {
    pub k: PrimitiveIndex,
    pub constant: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Operators `A_k = A∘P_k`, each a matrix on the columns `k·l`, with the
/// uniform bound data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockFamily {
    pub domain: ReinhardtDomain,
    pub codomain: ReinhardtDomain,
    pub r: f64,
    pub s: f64,
    pub t: f64,
    pub epsilon: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub trunc_in: u32,
    pub trunc_out: u32,
    /// Image of the constant `1`, when it was recorded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<PowerSeries>,
    #[serde(with = "block_list")]
    pub blocks: BTreeMap<PrimitiveIndex, OperatorMatrix>,
    #[serde(default)]
    pub witnesses: Vec<BlockWitness>,
}

impl BlockFamily {
    /// `L_k = s·Δ(k)`.
    pub fn carrier(&self, k: &PrimitiveIndex) -> Vec<f64> {
        delta(&self.domain, k).iter().map(|x| x * self.s).collect()
    }

    /// `r^{|k|} / (ε (s^{|k|} - r^{|k|}))`.
    pub fn block_constant(&self, k: &PrimitiveIndex) -> f64 {
        block_constant(self.r, self.s, self.epsilon, k)
    }
}

fn block_constant(r: f64, s: f64, epsilon: f64, k: &PrimitiveIndex) -> f64 {
    let d = k.degree() as i32;
    r.powi(d) / (epsilon * (s.powi(d) - r.powi(d)))
}

mod block_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        k: PrimitiveIndex,
        matrix: OperatorMatrix,
    }

    pub fn serialize<S: Serializer>(
        blocks: &BTreeMap<PrimitiveIndex, OperatorMatrix>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        blocks
            .iter()
            .map(|(k, m)| Entry {
                k: k.clone(),
                matrix: m.clone(),
            })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<PrimitiveIndex, OperatorMatrix>, D::Error> {
        let mut out = BTreeMap::new();
        for e in Vec::<Entry>::deserialize(d)? {
            let key = e.k.to_string();
            if out.insert(e.k, e.matrix).is_some() {
                return Err(serde::de::Error::custom(format!("duplicate block {key}")));
            }
        }
        Ok(out)
    }
}

/// Settings for [`extract_blocks`].
#[derive(Clone, Copy, Debug)]
pub struct ExtractParams {
    pub max_degree: u32,
    pub r: f64,
    pub s: f64,
    /// Output scale of the witnesses, `t·G_2`.
    pub t: f64,
    /// Fixed `ε`; calibrated from `A` when absent.
    pub epsilon: Option<f64>,
    /// Random probes per block for the witnesses.
    pub probes: usize,
}

/// Splits `A` into the blocks `A∘P_k`, `|k| ≤ N`.
///
/// When `ε` is not supplied it is `1/M` with `M` a norm estimate of `A` from
/// `H(rG_1)` to `H(tG_2)` taken over every monomial probe, so
/// `C_k = r^{|k|}/(ε(s^{|k|} - r^{|k|}))` dominates each block on `sΔ(k)`.
pub fn extract_blocks(
    a: &OperatorMatrix,
    g1: &ReinhardtDomain,
    g2: &ReinhardtDomain,
    params: &ExtractParams,
    rng: &mut SplitMix64,
) -> Result<BlockFamily> {
    check_dim(g1, a.dim_in)?;
    check_dim(g2, a.dim_out)?;
    let (r, s, t) = (params.r, params.s, params.t);
    check_scales(r, s)?;
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidParameter(format!("output scale t={t}")));
    }
    let epsilon = match params.epsilon {
        Some(e) if e > 0.0 && e.is_finite() => e,
        Some(e) => return Err(Error::InvalidParameter(format!("epsilon {e}"))),
        None => 1.0 / operator_norm_estimate(a, g1, g2, t, r, 0, rng)?.max(1e-300),
    };
    let mut blocks = BTreeMap::new();
    for k in enumerate_primitives(a.dim_in, params.max_degree) {
        blocks.insert(k.clone(), a.restrict_columns(|alpha| k.multiple_of(alpha).is_some()));
    }
    let zero = MultiIndex::zero(a.dim_in);
    let constant = Some(a.column(&zero));
    let mut witnesses = Vec::with_capacity(blocks.len());
    for (k, block) in &blocks {
        let ck = block_constant(r, s, epsilon, k);
        let mut worst = BlockWitness {
            k: k.clone(),
            constant: ck,
            lhs: 0.0,
            rhs: 0.0,
            ok: true,
        };
        let mut worst_gap = f64::NEG_INFINITY;
        for _ in 0..params.probes {
            let f = random_polynomial(rng, a.dim_in, a.trunc_in);
            let lhs = sup_norm(&block.apply(&f)?, g2, t)?.lower;
            let rhs = ck * delta_norm(&f, g1, k, s)?.upper;
            if lhs - rhs > worst_gap {
                worst_gap = lhs - rhs;
                worst.lhs = lhs;
                worst.rhs = rhs;
            }
        }
        worst.ok = worst.lhs <= worst.rhs * (1.0 + 1e-9) + CHECK_SLACK;
        witnesses.push(worst);
    }
    Ok(BlockFamily {
        domain: g1.clone(),
        codomain: g2.clone(),
        r,
        s,
        t,
        epsilon,
        c: r / (epsilon * (s - r)),
        trunc_in: a.trunc_in,
        trunc_out: a.trunc_out,
        constant,
        blocks,
        witnesses,
    })
}

/// Result of [`assemble`].
#[derive(Clone, Debug, PartialEq)]
pub struct Assembled {
    pub matrix: OperatorMatrix,
    /// Blocks whose recorded witness violated the uniform bound.
    pub bound_violations: Vec<PrimitiveIndex>,
}

/// `A = Σ_k A_k∘P_k`, plus `A(1) = constant` (zero when absent).
pub fn assemble(family: &BlockFamily, constant: Option<&PowerSeries>) -> Result<Assembled> {
    let (n_in, n_out) = (family.domain.dim(), family.codomain.dim());
    let mut trunc_out = family.trunc_out;
    let mut trunc_in = family.trunc_in;
    for m in family.blocks.values() {
        trunc_in = trunc_in.max(m.trunc_in);
        trunc_out = trunc_out.max(m.trunc_out);
    }
    if let Some(c) = constant {
        trunc_out = trunc_out.max(c.degree());
    }
    let mut out = OperatorMatrix::zero(n_in, n_out, trunc_in, trunc_out);
    for (k, block) in &family.blocks {
        if block.dim_in != n_in || block.dim_out != n_out || k.dim() != n_in {
            return Err(Error::DimensionMismatch {
                expected: n_in,
                found: block.dim_in,
            });
        }
        for ((beta, alpha), v) in block.entries() {
            if k.multiple_of(alpha).is_none() {
                return Err(Error::IllFormedBlock {
                    k: k.entries().to_vec(),
                    column: alpha.entries().to_vec(),
                });
            }
            out.set(beta.clone(), alpha.clone(), *v)?;
        }
    }
    if let Some(c) = constant {
        if c.dim() != n_out {
            return Err(Error::DimensionMismatch {
                expected: n_out,
                found: c.dim(),
            });
        }
        let zero = MultiIndex::zero(n_in);
        for (beta, v) in c.terms() {
            out.set(beta.clone(), zero.clone(), *v)?;
        }
    }
    Ok(Assembled {
        matrix: out,
        bound_violations: family
            .witnesses
            .iter()
            .filter(|w| !w.ok)
            .map(|w| w.k.clone())
            .collect(),
    })
}
