//! Domain descriptors: cylindrical products of discs and annuli, bounded
//! complete Reinhardt domains, product contours, complementary cylinders and
//! the polydiscs `Δ(k)` spanned by maximizers of `|z^k|` on the boundary.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::{MultiIndex, PrimitiveIndex};

/// A planar factor of a cylindrical domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PlanarFactor {
    Disc {
        center: [f64; 2],
        radius: f64,
    },
    Annulus {
        center: [f64; 2],
        inner: f64,
        outer: f64,
    },
}

impl PlanarFactor {
    pub fn disc(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("disc radius {radius}")));
        }
        Ok(PlanarFactor::Disc {
            center: [center.re, center.im],
            radius,
        })
    }

    pub fn annulus(center: Complex64, inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && inner < outer) || !outer.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "annulus radii {inner}, {outer}"
            )));
        }
        Ok(PlanarFactor::Annulus {
            center: [center.re, center.im],
            inner,
            outer,
        })
    }

    pub fn center(&self) -> Complex64 {
        match *self {
            PlanarFactor::Disc { center, .. } | PlanarFactor::Annulus { center, .. } => {
                Complex64::new(center[0], center[1])
            }
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let d = (z - self.center()).norm();
        match *self {
            PlanarFactor::Disc { radius, .. } => d < radius,
            PlanarFactor::Annulus { inner, outer, .. } => inner < d && d < outer,
        }
    }

    /// Boundary circles `(center, radius)`, outer first.
    pub fn boundary_circles(&self) -> Vec<(Complex64, f64)> {
        match *self {
            PlanarFactor::Disc { radius, .. } => vec![(self.center(), radius)],
            PlanarFactor::Annulus { inner, outer, .. } => {
                vec![(self.center(), outer), (self.center(), inner)]
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            PlanarFactor::Disc { center, radius } => {
                PlanarFactor::disc(Complex64::new(center[0], center[1]), radius).map(|_| ())
            }
            PlanarFactor::Annulus {
                center,
                inner,
                outer,
            } => PlanarFactor::annulus(Complex64::new(center[0], center[1]), inner, outer)
                .map(|_| ()),
        }
    }
}

/// `G = G_1 × ... × G_n` with each factor a disc or an annulus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylindricalDomain {
    pub factors: Vec<PlanarFactor>,
}

impl CylindricalDomain {
    pub fn new(factors: Vec<PlanarFactor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("cylinder needs n ≥ 1".into()));
        }
        for f in &factors {
            f.validate()?;
        }
        Ok(CylindricalDomain { factors })
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn contains(&self, z: &[Complex64]) -> bool {
        z.len() == self.dim() && self.factors.iter().zip(z).all(|(f, &w)| f.contains(w))
    }
}

/// A point of the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::Finite(z)
    }
}

/// Closed complement of a planar factor in the Riemann sphere.
#[derive(Clone, Debug, PartialEq)]
pub enum FactorComplement {
    /// `{|λ - a| ≥ ρ} ∪ {∞}`.
    Exterior { center: Complex64, radius: f64 },
    /// Two components: the closed inner disc `{|λ - a| ≤ ρ₋}` and the
    /// exterior `{|λ - a| ≥ ρ₊} ∪ {∞}`.
    Split {
        center: Complex64,
        inner: f64,
        outer: f64,
    },
}

impl FactorComplement {
    pub fn contains(&self, p: SpherePoint) -> bool {
        let z = match p {
            SpherePoint::Infinity => return true,
            SpherePoint::Finite(z) => z,
        };
        match *self {
            FactorComplement::Exterior { center, radius } => (z - center).norm() >= radius,
            FactorComplement::Split {
                center,
                inner,
                outer,
            } => {
                let d = (z - center).norm();
                d <= inner || d >= outer
            }
        }
    }

    pub fn component_count(&self) -> usize {
        match self {
            FactorComplement::Exterior { .. } => 1,
            FactorComplement::Split { .. } => 2,
        }
    }
}

/// Complementary cylinder `E^b = E_1^c × ... × E_n^c`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplementCylinder {
    pub factors: Vec<FactorComplement>,
}

impl ComplementCylinder {
    pub fn contains(&self, p: &[SpherePoint]) -> bool {
        p.len() == self.factors.len()
            && self.factors.iter().zip(p).all(|(f, &q)| f.contains(q))
    }
}

pub fn complement_cylinder(e: &CylindricalDomain) -> ComplementCylinder {
    let factors = e
        .factors
        .iter()
        .map(|f| match *f {
            PlanarFactor::Disc { radius, .. } => FactorComplement::Exterior {
                center: f.center(),
                radius,
            },
            PlanarFactor::Annulus { inner, outer, .. } => FactorComplement::Split {
                center: f.center(),
                inner,
                outer,
            },
        })
        .collect();
    ComplementCylinder { factors }
}

/// Bounded complete Reinhardt domain centered at the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ReinhardtDomain {
    /// `{ |z_j| < r_j }`
    Polydisc { radii: Vec<f64> },
    /// `{ |z| < r }` in `ℂ^dim`
    Ball { dim: usize, radius: f64 },
    /// `{ Σ (|z_j|/r_j)^{p_j} < 1 }`
    Pellipsoid { radii: Vec<f64>, p: Vec<f64> },
}

impl ReinhardtDomain {
    pub fn polydisc(radii: Vec<f64>) -> Result<Self> {
        let d = ReinhardtDomain::Polydisc { radii };
        d.validate()?;
        Ok(d)
    }

    pub fn unit_polydisc(n: usize) -> Self {
        ReinhardtDomain::Polydisc { radii: vec![1.0; n] }
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        let d = ReinhardtDomain::Ball { dim, radius };
        d.validate()?;
        Ok(d)
    }

    pub fn pellipsoid(radii: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        let d = ReinhardtDomain::Pellipsoid { radii, p };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: &[f64]| v.iter().all(|&x| x > 0.0 && x.is_finite());
        let ok = match self {
            ReinhardtDomain::Polydisc { radii } => !radii.is_empty() && positive(radii),
            ReinhardtDomain::Ball { dim, radius } => *dim >= 1 && positive(&[*radius]),
            ReinhardtDomain::Pellipsoid { radii, p } => {
                !radii.is_empty() && radii.len() == p.len() && positive(radii) && positive(p)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid domain {self:?}")))
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ReinhardtDomain::Polydisc { radii } => radii.len(),
            ReinhardtDomain::Ball { dim, .. } => *dim,
            ReinhardtDomain::Pellipsoid { radii, .. } => radii.len(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ReinhardtDomain::Polydisc { .. } => "polydisc",
            ReinhardtDomain::Ball { .. } => "ball",
            ReinhardtDomain::Pellipsoid { .. } => "pellipsoid",
        }
    }

    /// `c · G`.
    pub fn scaled(&self, c: f64) -> Self {
        match self {
            ReinhardtDomain::Polydisc { radii } => ReinhardtDomain::Polydisc {
                radii: radii.iter().map(|r| r * c).collect(),
            },
            ReinhardtDomain::Ball { dim, radius } => ReinhardtDomain::Ball {
                dim: *dim,
                radius: radius * c,
            },
            ReinhardtDomain::Pellipsoid { radii, p } => ReinhardtDomain::Pellipsoid {
                radii: radii.iter().map(|r| r * c).collect(),
                p: p.clone(),
            },
        }
    }

    /// Per-coordinate radii and exponents of the profile `Σ (ρ_j/r_j)^{p_j} ≤ 1`;
    /// `None` for polydiscs.
    fn profile(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            ReinhardtDomain::Polydisc { .. } => None,
            ReinhardtDomain::Ball { dim, radius } => Some((vec![*radius; *dim], vec![2.0; *dim])),
            ReinhardtDomain::Pellipsoid { radii, p } => Some((radii.clone(), p.clone())),
        }
    }

    /// Gauge of a modulus vector: `< 1` inside, `= 1` on the boundary.
    pub fn gauge(&self, moduli: &[f64]) -> f64 {
        match self {
            ReinhardtDomain::Polydisc { radii } => radii
                .iter()
                .zip(moduli)
                .map(|(r, m)| m / r)
                .fold(0.0, f64::max),
            _ => {
                let (radii, p) = self.profile().unwrap();
                radii
                    .iter()
                    .zip(&p)
                    .zip(moduli)
                    .map(|((r, p), m)| (m / r).powf(*p))
                    .sum()
            }
        }
    }

    pub fn contains(&self, z: &[Complex64]) -> bool {
        let moduli: Vec<f64> = z.iter().map(|w| w.norm()).collect();
        z.len() == self.dim() && self.gauge(&moduli) < 1.0
    }

    /// Largest modulus of coordinate `j` over the closure.
    pub fn coordinate_bound(&self, j: usize) -> f64 {
        match self {
            ReinhardtDomain::Polydisc { radii } => radii[j],
            ReinhardtDomain::Ball { radius, .. } => *radius,
            ReinhardtDomain::Pellipsoid { radii, .. } => radii[j],
        }
    }

    /// Radius profiles on the outer boundary used for sampling sup-norms.
    ///
    /// Polydiscs contribute their single distinguished-boundary profile. Other
    /// kinds use a simplex grid `t` with `resolution` subdivisions mapped to
    /// `ρ_j = r_j t_j^{1/p_j}`; this always contains the coordinate extremes.
    pub fn boundary_profiles(&self, resolution: u32) -> Vec<Vec<f64>> {
        match self.profile() {
            None => match self {
                ReinhardtDomain::Polydisc { radii } => vec![radii.clone()],
                _ => unreachable!(),
            },
            Some((radii, p)) => {
                let n = radii.len();
                crate::multiindex::indices_of_degree(n, resolution)
                    .into_iter()
                    .map(|t| {
                        t.entries()
                            .iter()
                            .enumerate()
                            .map(|(j, &tj)| {
                                radii[j] * (f64::from(tj) / f64::from(resolution)).powf(1.0 / p[j])
                            })
                            .collect()
                    })
                    .collect()
            }
        }
    }
}

/// Positively oriented circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Circle {
            center: [center.re, center.im],
            radius,
        }
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(self.center[0], self.center[1])
    }

    pub fn length(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.radius
    }
}

/// Product of positively oriented circles: a distinguished boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub circles: Vec<Circle>,
}

impl Contour {
    pub fn new(circles: Vec<Circle>) -> Result<Self> {
        if circles.is_empty() {
            return Err(Error::InvalidParameter("contour needs n ≥ 1".into()));
        }
        if let Some(c) = circles.iter().find(|c| !(c.radius > 0.0)) {
            return Err(Error::InvalidParameter(format!("circle radius {}", c.radius)));
        }
        Ok(Contour { circles })
    }

    /// Circles centered at the origin with the given radii.
    pub fn centered(radii: &[f64]) -> Result<Self> {
        Contour::new(
            radii
                .iter()
                .map(|&r| Circle::new(Complex64::new(0.0, 0.0), r))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.circles.len()
    }

    pub fn radii(&self) -> Vec<f64> {
        self.circles.iter().map(|c| c.radius).collect()
    }

    pub fn is_centered(&self) -> bool {
        self.circles.iter().all(|c| c.center == [0.0, 0.0])
    }
}

fn exhaustion_factor(level: u32) -> f64 {
    1.0 - 0.5f64.powi(level as i32 + 1)
}

/// Level `l` of the standard exhaustion of a Reinhardt domain: `(1 - 2^{-(l+1)})·G`.
pub fn exhaustion_reinhardt(g: &ReinhardtDomain, level: u32) -> ReinhardtDomain {
    g.scaled(exhaustion_factor(level))
}

/// Level `l` of the standard exhaustion of a cylindrical domain. Discs shrink
/// their radius; annuli move both boundary circles inward.
pub fn exhaustion_cylinder(g: &CylindricalDomain, level: u32) -> Result<CylindricalDomain> {
    let f = exhaustion_factor(level);
    let factors = g
        .factors
        .iter()
        .map(|factor| match *factor {
            PlanarFactor::Disc { radius, .. } => PlanarFactor::disc(factor.center(), radius * f),
            PlanarFactor::Annulus { inner, outer, .. } => {
                let (lo, hi) = (inner / f, outer * f);
                if lo >= hi {
                    Err(Error::ExhaustionExhausted { level })
                } else {
                    PlanarFactor::annulus(factor.center(), lo, hi)
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CylindricalDomain { factors })
}

/// Radius vector `R(η(k))` of a maximizer of `|z^k|` on `∂G`.
///
/// For polydiscs every radius is maximal. For balls and p-ellipsoids the
/// Lagrange conditions for maximizing `Σ k_j log ρ_j` subject to
/// `Σ (ρ_j/r_j)^{p_j} = 1` give `(ρ_j/r_j)^{p_j} = (k_j/p_j) / Σ_i (k_i/p_i)`;
/// coordinates with `k_j = 0` are forced to zero whenever some other
/// coordinate is positive.
pub fn eta_radii(g: &ReinhardtDomain, k: &MultiIndex) -> Vec<f64> {
    match g {
        ReinhardtDomain::Polydisc { radii } => radii.clone(),
        _ => {
            let (radii, p) = g.profile().unwrap();
            let weights: Vec<f64> = k
                .entries()
                .iter()
                .zip(&p)
                .map(|(&kj, pj)| f64::from(kj) / pj)
                .collect();
            let total: f64 = weights.iter().sum();
            if total == 0.0 {
                // k = 0: every boundary point is a maximizer; take the
                // equal-share profile.
                let n = radii.len() as f64;
                return radii
                    .iter()
                    .zip(&p)
                    .map(|(r, pj)| r * (1.0 / n).powf(1.0 / pj))
                    .collect();
            }
            radii
                .iter()
                .zip(&p)
                .zip(&weights)
                .map(|((r, pj), w)| r * (w / total).powf(1.0 / pj))
                .collect()
        }
    }
}

/// Residual of the Lagrange (KKT) conditions at `rho` for the problem solved by
/// [`eta_radii`]; only coordinates with `k_j > 0` enter the stationarity part.
pub fn eta_kkt_residual(g: &ReinhardtDomain, k: &MultiIndex, rho: &[f64]) -> f64 {
    let Some((radii, p)) = g.profile() else {
        return radii_gap(g, rho);
    };
    let feas = (g.gauge(rho) - 1.0).abs();
    let mu: f64 = k
        .entries()
        .iter()
        .zip(&p)
        .map(|(&kj, pj)| f64::from(kj) / pj)
        .sum();
    let stat = k
        .entries()
        .iter()
        .enumerate()
        .filter(|(_, &kj)| kj > 0)
        .map(|(j, &kj)| {
            let t = (rho[j] / radii[j]).powf(p[j]);
            (f64::from(kj) - mu * p[j] * t).abs()
        })
        .fold(0.0, f64::max);
    feas.max(stat)
}

fn radii_gap(g: &ReinhardtDomain, rho: &[f64]) -> f64 {
    (0..g.dim())
        .map(|j| (g.coordinate_bound(j) - rho[j]).abs())
        .fold(0.0, f64::max)
}

/// `max_{Ḡ} |z^k| = Π η_j^{k_j}` with `0⁰ = 1`.
pub fn monomial_max(g: &ReinhardtDomain, k: &MultiIndex) -> f64 {
    let eta = eta_radii(g, k);
    monomial_modulus(&eta, k)
}

pub(crate) fn monomial_modulus(radii: &[f64], k: &MultiIndex) -> f64 {
    radii
        .iter()
        .zip(k.entries())
        .map(|(r, &e)| if e == 0 { 1.0 } else { r.powi(e as i32) })
        .product()
}

/// Polyradius of `Δ(k)`.
pub fn delta(g: &ReinhardtDomain, k: &PrimitiveIndex) -> Vec<f64> {
    eta_radii(g, k.as_index())
}

/// Margin applied to the largest inscribed equal-radius polydisc for `Δ(0)`.
pub const DELTA_ZERO_MARGIN: f64 = 0.5;

/// Polyradius of `Δ(0)`: half the largest inscribed polydisc with equal radii.
pub fn delta_zero(g: &ReinhardtDomain) -> Vec<f64> {
    let n = g.dim();
    let rho = match g {
        ReinhardtDomain::Polydisc { radii } => radii.iter().cloned().fold(f64::INFINITY, f64::min),
        ReinhardtDomain::Ball { dim, radius } => radius / (*dim as f64).sqrt(),
        ReinhardtDomain::Pellipsoid { .. } => {
            // gauge((ρ,...,ρ)) is increasing in ρ
            let (mut lo, mut hi) = (0.0, (0..n).map(|j| g.coordinate_bound(j)).fold(f64::INFINITY, f64::min));
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g.gauge(&vec![mid; n]) <= 1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        }
    };
    vec![rho * DELTA_ZERO_MARGIN; n]
}
