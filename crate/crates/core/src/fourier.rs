//! Tensor FFTs on `P^n` phase grids.
//!
//! Grids are stored row-major with coordinate 0 most significant: the sample
//! at phases `(i_0, ..., i_{n-1})` lives at `Σ_j i_j P^{n-1-j}`.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

pub(crate) fn grid_len(n: usize, p: usize) -> usize {
    p.pow(n as u32)
}

/// Flat offset of a (possibly negative or oversized) integer exponent vector,
/// reduced modulo `p` in every coordinate.
pub(crate) fn wrapped_offset(exps: impl Iterator<Item = i64>, p: usize) -> usize {
    exps.fold(0usize, |acc, e| acc * p + e.rem_euclid(p as i64) as usize)
}

/// In-place unnormalized n-dimensional DFT.
///
/// `Forward` computes `Σ x_i e^{-2πi i·j/P}`, `Inverse` the `+` sign variant.
pub(crate) fn fft_nd(data: &mut [Complex64], n: usize, p: usize, direction: FftDirection) {
    debug_assert_eq!(data.len(), grid_len(n, p));
    if p == 1 {
        return;
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(p, direction);
    let mut line = vec![Complex64::new(0.0, 0.0); p];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..n {
        let stride = p.pow((n - 1 - axis) as u32);
        let block = stride * p;
        for start in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let base = start + offset;
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, v) in line.iter().enumerate() {
                    data[base + i * stride] = *v;
                }
            }
        }
    }
}

/// Index vector of flat offset `flat` on a `P^n` grid.
pub(crate) fn unflatten(mut flat: usize, n: usize, p: usize, out: &mut [usize]) {
    for j in (0..n).rev() {
        out[j] = flat % p;
        flat /= p;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_dft_2d() {
        let (n, p) = (2, 4);
        let data: Vec<Complex64> = (0..16)
            .map(|i| Complex64::new(i as f64, (i * i % 7) as f64))
            .collect();
        let mut fast = data.clone();
        fft_nd(&mut fast, n, p, FftDirection::Forward);
        let mut idx = [0usize; 2];
        let mut jdx = [0usize; 2];
        for j in 0..16 {
            unflatten(j, n, p, &mut jdx);
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, x) in data.iter().enumerate() {
                unflatten(i, n, p, &mut idx);
                let phase = -2.0 * std::f64::consts::PI
                    * ((idx[0] * jdx[0] + idx[1] * jdx[1]) as f64)
                    / p as f64;
                acc += x * Complex64::from_polar(1.0, phase);
            }
            assert!((acc - fast[j]).norm() < 1e-10);
        }
    }

    #[test]
    fn wrapped_offsets() {
        assert_eq!(wrapped_offset([1i64, -1].into_iter(), 4), 4 + 3);
        assert_eq!(wrapped_offset([5i64].into_iter(), 4), 1);
    }
}
