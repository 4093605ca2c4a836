//! Seedable SplitMix64 stream used for every random probe.
//!
//! The stream is fully specified so that other implementations reproduce it:
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! return z ^ (z >> 31)                      (all arithmetic mod 2^64)
//! ```
//!
//! Uniforms are `(next >> 11) · 2^-53`. Normals use one Box–Muller draw per
//! pair of uniforms `u1, u2`: `sqrt(-2 ln(1 - u1)) · cos(2π u2)`. A standard
//! complex gaussian has independent real and imaginary parts, each a normal
//! divided by `√2`.

use num_complex::Complex64;

use crate::multiindex::enumerate_indices;
use crate::series::PowerSeries;

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `[0, bound)`.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn complex_normal(&mut self) -> Complex64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let re = self.normal() * s;
        let im = self.normal() * s;
        Complex64::new(re, im)
    }

    /// Point with modulus `< radius` and uniform phase.
    pub fn point_in_disc(&mut self, radius: f64) -> Complex64 {
        let rho = radius * self.next_f64().sqrt();
        Complex64::from_polar(rho, 2.0 * std::f64::consts::PI * self.next_f64())
    }
}

/// Polynomial in `n` variables of degree `≤ degree` with standard complex
/// gaussian coefficients on every monomial (graded-lex draw order).
pub fn random_polynomial(rng: &mut SplitMix64, n: usize, degree: u32) -> PowerSeries {
    let mut f = PowerSeries::zero(n, degree);
    for m in enumerate_indices(n, degree) {
        f.set(m, rng.complex_normal()).expect("degree within truncation");
    }
    f
}

/// Sparse variant: each monomial is kept with probability `density`.
pub fn random_sparse_polynomial(
    rng: &mut SplitMix64,
    n: usize,
    degree: u32,
    density: f64,
) -> PowerSeries {
    let mut f = PowerSeries::zero(n, degree);
    for m in enumerate_indices(n, degree) {
        let keep = rng.next_f64() < density;
        let c = rng.complex_normal();
        if keep {
            f.set(m, c).expect("degree within truncation");
        }
    }
    f
}
