//! Centered two-dimensional DFTs used by the diffraction transform.
//!
//! `centered_dft2` evaluates, for every output index pair,
//!
//! ```text
//! out[v,u] = Σ_{j,i} f[j,i] · exp(±2πi[(j−n/2)(v−n/2) + (i−n/2)(u−n/2)]/n)
//! ```
//!
//! i.e. an unnormalized DFT with both input and output indices measured from
//! the grid center. For n divisible by 4 this reduces to a plain FFT wrapped
//! in checkerboard sign flips.

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum CenteredSign {
    /// exp(+2πi·jk/n) kernel.
    Plus,
    /// exp(−2πi·jk/n) kernel.
    Minus,
}

fn apply_checkerboard(data: &mut Array2<Complex64>) {
    for ((row, col), value) in data.indexed_iter_mut() {
        if (row + col) % 2 == 1 {
            *value = -*value;
        }
    }
}

fn fft_rows(data: &mut Array2<Complex64>, direction: FftDirection) {
    let n = data.ncols();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(n, direction);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for mut row in data.rows_mut() {
        let slice = row.as_slice_mut().expect("rows of a standard-layout array");
        fft.process_with_scratch(slice, &mut scratch);
    }
}

fn transpose(data: &Array2<Complex64>) -> Array2<Complex64> {
    data.t().as_standard_layout().into_owned()
}

/// In-place centered 2D DFT. `data` must be square with side divisible by 4.
pub(crate) fn centered_dft2(data: &mut Array2<Complex64>, sign: CenteredSign) {
    let n = data.nrows();
    assert_eq!(n, data.ncols(), "field grid must be square");
    assert_eq!(n % 4, 0, "centered transform needs n divisible by 4");

    let direction = match sign {
        CenteredSign::Plus => FftDirection::Inverse,
        CenteredSign::Minus => FftDirection::Forward,
    };

    apply_checkerboard(data);
    fft_rows(data, direction);
    *data = transpose(data);
    fft_rows(data, direction);
    *data = transpose(data);
    apply_checkerboard(data);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_centered_dft2(data: &Array2<Complex64>, sign: CenteredSign) -> Array2<Complex64> {
        let n = data.nrows() as isize;
        let h = n / 2;
        let s = match sign {
            CenteredSign::Plus => 1.0,
            CenteredSign::Minus => -1.0,
        };
        let mut out = Array2::zeros((n as usize, n as usize));
        for v in -h..h {
            for u in -h..h {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in -h..h {
                    for i in -h..h {
                        let arg = s * 2.0 * std::f64::consts::PI * ((j * v + i * u) as f64)
                            / (n as f64);
                        acc += data[((j + h) as usize, (i + h) as usize)]
                            * Complex64::from_polar(1.0, arg);
                    }
                }
                out[((v + h) as usize, (u + h) as usize)] = acc;
            }
        }
        out
    }

    #[test]
    fn matches_direct_sum() {
        let n = 32;
        let mut data = Array2::zeros((n, n));
        // Deterministic pseudo-random fill.
        let mut state = 0x9e3779b97f4a7c15u64;
        for value in data.iter_mut() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let re = ((state >> 11) as f64) / (1u64 << 53) as f64 - 0.5;
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let im = ((state >> 11) as f64) / (1u64 << 53) as f64 - 0.5;
            *value = Complex64::new(re, im);
        }

        for sign in [CenteredSign::Plus, CenteredSign::Minus] {
            let expected = direct_centered_dft2(&data, sign);
            let mut got = data.clone();
            centered_dft2(&mut got, sign);
            let max_err = got
                .iter()
                .zip(expected.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(max_err < 1e-10, "max error {max_err} for {sign:?}");
        }
    }

    #[test]
    fn parseval_holds() {
        let n = 32;
        let mut data: Array2<Complex64> = Array2::zeros((n, n));
        data[(5, 7)] = Complex64::new(1.0, -2.0);
        data[(20, 3)] = Complex64::new(0.5, 0.25);
        let input_energy: f64 = data.iter().map(|a| a.norm_sqr()).sum();
        centered_dft2(&mut data, CenteredSign::Plus);
        let output_energy: f64 = data.iter().map(|a| a.norm_sqr()).sum();
        let expected = input_energy * (n * n) as f64;
        assert!((output_energy - expected).abs() < 1e-9 * expected);
    }
}
