//! Thin wrappers around rustfft with orthonormal scaling.
//!
//! All transforms here use the unitary convention (a factor 1/sqrt(n) per
//! axis and direction) so that forward + inverse is the identity and the
//! discrete l2 norm is preserved exactly.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Planned 1D transform pair for a fixed length.
pub struct Fft1 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft1 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        debug_assert_eq!(data.len(), self.n);
        self.forward.process(data);
        let s = 1.0 / (self.n as f64).sqrt();
        data.iter_mut().for_each(|z| *z *= s);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        debug_assert_eq!(data.len(), self.n);
        self.inverse.process(data);
        let s = 1.0 / (self.n as f64).sqrt();
        data.iter_mut().for_each(|z| *z *= s);
    }
}

/// Planned 2D transform pair for fixed shape `(n0, n1)`.
///
/// Axis 1 rows are transformed in place; axis 0 goes through a per-column
/// scratch buffer. Plans are immutable and shareable; scratch lives on the
/// stack frame of each call so applications stay reentrant.
pub struct Fft2 {
    n0: usize,
    n1: usize,
    axis0: Fft1,
    axis1: Fft1,
}

impl Fft2 {
    pub fn new(n0: usize, n1: usize) -> Self {
        Self {
            n0,
            n1,
            axis0: Fft1::new(n0),
            axis1: Fft1::new(n1),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n0, self.n1)
    }

    pub fn forward(&self, data: &mut Array2<Complex64>) {
        self.transform(data, true);
    }

    pub fn inverse(&self, data: &mut Array2<Complex64>) {
        self.transform(data, false);
    }

    fn transform(&self, data: &mut Array2<Complex64>, fwd: bool) {
        debug_assert_eq!(data.dim(), (self.n0, self.n1));
        // rows (axis 1) are contiguous in standard layout
        for mut row in data.rows_mut() {
            let slice = row.as_slice_mut().expect("standard layout required");
            if fwd {
                self.axis1.forward(slice);
            } else {
                self.axis1.inverse(slice);
            }
        }
        // columns via scratch
        let mut col = vec![Complex64::default(); self.n0];
        for j in 0..self.n1 {
            for i in 0..self.n0 {
                col[i] = data[[i, j]];
            }
            if fwd {
                self.axis0.forward(&mut col);
            } else {
                self.axis0.inverse(&mut col);
            }
            for i in 0..self.n0 {
                data[[i, j]] = col[i];
            }
        }
    }
}

/// Band-limited interpolation onto a grid with twice as many points along
/// `axis` (same extent): zero-pad the spectrum and transform back.
///
/// The old Nyquist bin is split evenly between the two new half-band bins so
/// real data stays real. Amplitudes are preserved, so quadrature norms carry
/// over to the finer grid unchanged.
pub fn prolong_double(data: &Array2<Complex64>, axis: usize) -> Array2<Complex64> {
    let (n0, n1) = data.dim();
    let n = if axis == 0 { n0 } else { n1 };
    let fft = Fft1::new(n);
    let fft_fine = Fft1::new(2 * n);
    let out_dim = if axis == 0 { (2 * n0, n1) } else { (n0, 2 * n1) };
    let mut out = Array2::<Complex64>::zeros(out_dim);

    let lanes = if axis == 0 { n1 } else { n0 };
    let mut line = vec![Complex64::default(); n];
    let mut fine = vec![Complex64::default(); 2 * n];
    for lane in 0..lanes {
        for i in 0..n {
            line[i] = if axis == 0 { data[[i, lane]] } else { data[[lane, i]] };
        }
        fft.forward(&mut line);
        fine.iter_mut().for_each(|z| *z = Complex64::default());
        let pos_max = (n - 1) / 2;
        for (j, &v) in line.iter().enumerate() {
            if j <= pos_max {
                fine[j] = v;
            } else if n % 2 == 0 && j == n / 2 {
                fine[n / 2] = 0.5 * v;
                fine[2 * n - n / 2] = 0.5 * v;
            } else {
                fine[2 * n - (n - j)] = v;
            }
        }
        // unitary convention needs sqrt(2) to preserve amplitudes
        let s = 2.0f64.sqrt();
        fine.iter_mut().for_each(|z| *z *= s);
        fft_fine.inverse(&mut fine);
        for i in 0..2 * n {
            if axis == 0 {
                out[[i, lane]] = fine[i];
            } else {
                out[[lane, i]] = fine[i];
            }
        }
    }
    out
}

/// Angular wavenumbers in FFT storage order for `n` samples spaced `dx`:
/// `0, 1, ..., n/2-1, -n/2, ..., -1` times `2 pi / (n dx)`.
pub fn fft_wavenumbers(n: usize, dx: f64) -> Vec<f64> {
    let dk = std::f64::consts::TAU / (n as f64 * dx);
    (0..n)
        .map(|j| {
            let j = if j < n.div_ceil(2) { j as isize } else { j as isize - n as isize };
            j as f64 * dk
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    #[test]
    fn roundtrip_is_identity() {
        let fft = Fft2::new(16, 12);
        let mut a = Array2::from_shape_fn((16, 12), |(i, j)| {
            Complex64::new((i as f64 * 0.3).sin(), (j as f64 * 0.7).cos())
        });
        let orig = a.clone();
        fft.forward(&mut a);
        fft.inverse(&mut a);
        let err = a
            .iter()
            .zip(orig.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0f64, f64::max);
        assert!(err < 1e-13, "roundtrip error {err}");
    }

    #[test]
    fn forward_preserves_l2_norm() {
        let fft = Fft1::new(64);
        let mut v: Vec<Complex64> = (0..64)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.5).cos()))
            .collect();
        let n0: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        fft.forward(&mut v);
        let n1: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert!((n0 - n1).abs() < 1e-10 * n0);
    }

    #[test]
    fn prolongation_interpolates_band_limited_data() {
        // a Gaussian sampled on n points, prolonged to 2n, must match the
        // continuum values at the new points
        let n = 32;
        let half = 8.0;
        let dx = 2.0 * half / n as f64;
        let f = |x: f64| (-0.5 * x * x).exp() * Complex64::new((0.7 * x).cos(), (0.7 * x).sin());
        let coarse = Array2::from_shape_fn((n, 1), |(i, _)| f(-half + i as f64 * dx));
        let fine = prolong_double(&coarse, 0);
        assert_eq!(fine.dim(), (2 * n, 1));
        let dxf = dx / 2.0;
        for i in 0..2 * n {
            let x = -half + i as f64 * dxf;
            let err = (fine[[i, 0]] - f(x)).norm();
            assert!(err < 1e-10, "interpolation error {err} at x={x}");
        }
    }

    #[test]
    fn prolongation_preserves_quadrature_norm() {
        let n = 24;
        let coarse = Array2::from_shape_fn((4, n), |(i, j)| {
            let x = -6.0 + j as f64 * 0.5;
            Complex64::new((-0.3 * x * x).exp() * (i as f64 + 1.0), 0.1 * x)
        });
        let dx = 0.5;
        let norm_coarse: f64 = coarse.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx;
        let fine = prolong_double(&coarse, 1);
        let norm_fine: f64 = fine.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx / 2.0;
        assert!((norm_coarse - norm_fine).abs() < 1e-10 * norm_coarse);
    }

    #[test]
    fn wavenumber_order() {
        let k = fft_wavenumbers(8, 0.5);
        let dk = std::f64::consts::TAU / 4.0;
        assert_eq!(k[0], 0.0);
        assert!((k[1] - dk).abs() < 1e-15);
        assert!((k[4] + 4.0 * dk).abs() < 1e-15);
        assert!((k[7] + dk).abs() < 1e-15);
    }
}
