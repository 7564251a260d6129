//! Complex amplitude fields over the product grid (and 1D matter grids).

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{AxisGrid, ProductGrid};

/// Wavefunction on a 2D product grid: axis 0 is the matter coordinate,
/// axis 1 the cavity coordinate. Amplitudes carry the `dx dq` quadrature
/// convention, i.e. `norm_sqr() = sum |psi|^2 dx dq`.
#[derive(Debug, Clone)]
pub struct WaveField {
    pub grid: ProductGrid,
    pub data: Array2<Complex64>,
    pub time: f64,
}

impl WaveField {
    pub fn new(grid: ProductGrid, data: Array2<Complex64>) -> Result<Self> {
        if data.dim() != grid.shape() {
            return Err(Error::InvalidInput(format!(
                "field shape {:?} does not match grid {:?}",
                data.dim(),
                grid.shape()
            )));
        }
        Ok(Self { grid, data, time: 0.0 })
    }

    /// Zero field on a grid.
    pub fn zeros(grid: ProductGrid) -> Self {
        let shape = grid.shape();
        Self { grid, data: Array2::zeros(shape), time: 0.0 }
    }

    /// Product of two 1D factors: `psi(x, q) = f(x) g(q)`.
    pub fn from_product(grid: ProductGrid, matter: &Array1<Complex64>, cavity: &Array1<Complex64>) -> Result<Self> {
        if matter.len() != grid.matter.n || cavity.len() != grid.cavity.n {
            return Err(Error::InvalidInput("factor lengths do not match grid".into()));
        }
        let data = Array2::from_shape_fn(grid.shape(), |(i, j)| matter[i] * cavity[j]);
        Ok(Self { grid, data, time: 0.0 })
    }

    /// Normalized Gaussian `exp(-(x-x0)^2/(4 sx^2) + i p0 x / hbar)` in the
    /// matter coordinate times an arbitrary cavity factor.
    pub fn gaussian_matter(
        grid: ProductGrid,
        x0: f64,
        p0: f64,
        sigma: f64,
        cavity: &Array1<Complex64>,
    ) -> Result<Self> {
        let hbar = grid.hbar;
        let matter = gaussian_1d(&grid.matter, x0, p0, sigma, hbar);
        let mut f = Self::from_product(grid, &matter, cavity)?;
        f.renormalize();
        Ok(f)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.weight()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn renormalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let s = 1.0 / n;
            self.data.mapv_inplace(|z| z * s);
        }
    }

    /// `<self | other>` under grid quadrature.
    pub fn inner(&self, other: &WaveField) -> Complex64 {
        debug_assert_eq!(self.grid.shape(), other.grid.shape());
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.weight()
    }

    /// Probability mass within `band` grid cells of any boundary of either axis.
    ///
    /// Periodic propagation without absorbing boundaries requires this to stay
    /// negligible; callers abort when it grows past their tolerance.
    pub fn boundary_mass(&self, band: usize) -> f64 {
        let (nx, nq) = self.grid.shape();
        let mut acc = 0.0;
        for ((i, j), z) in self.data.indexed_iter() {
            if i < band || i >= nx - band || j < band || j >= nq - band {
                acc += z.norm_sqr();
            }
        }
        acc * self.grid.weight()
    }

    /// Expectation of a position-diagonal observable given as values over the grid.
    pub fn expect_diagonal(&self, values: &Array2<f64>) -> f64 {
        debug_assert_eq!(values.dim(), self.data.dim());
        self.data
            .iter()
            .zip(values.iter())
            .map(|(z, &v)| v * z.norm_sqr())
            .sum::<f64>()
            * self.grid.weight()
    }
}

/// Normalized 1D Gaussian with mean position `x0`, mean momentum `p0`, and
/// position spread `sigma` on an axis grid.
pub fn gaussian_1d(axis: &AxisGrid, x0: f64, p0: f64, sigma: f64, hbar: f64) -> Array1<Complex64> {
    // continuum prefactor (2 pi sigma^2)^(-1/4)
    let pref = 1.0 / (std::f64::consts::TAU.sqrt() * sigma).sqrt();
    let mut v: Array1<Complex64> = axis
        .points()
        .iter()
        .map(|&x| {
            let d = x - x0;
            let phase = p0 * x / hbar;
            Complex64::from_polar((-d * d / (4.0 * sigma * sigma)).exp() * pref, phase)
        })
        .collect();
    // exact grid normalization
    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>() * axis.dx;
    let s = 1.0 / n.sqrt();
    v.mapv_inplace(|z| z * s);
    v
}

/// 1D wavefunction over a matter axis.
#[derive(Debug, Clone)]
pub struct WaveLine {
    pub axis: AxisGrid,
    pub hbar: f64,
    pub data: Array1<Complex64>,
    pub time: f64,
}

impl WaveLine {
    pub fn new(axis: AxisGrid, hbar: f64, data: Array1<Complex64>) -> Result<Self> {
        if data.len() != axis.n {
            return Err(Error::InvalidInput("data length does not match axis".into()));
        }
        Ok(Self { axis, hbar, data, time: 0.0 })
    }

    pub fn gaussian(axis: AxisGrid, hbar: f64, x0: f64, p0: f64, sigma: f64) -> Self {
        let data = gaussian_1d(&axis, x0, p0, sigma, hbar);
        Self { axis, hbar, data, time: 0.0 }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.axis.dx
    }

    pub fn renormalize(&mut self) {
        let s = 1.0 / self.norm_sqr().sqrt();
        self.data.mapv_inplace(|z| z * s);
    }

    pub fn inner(&self, other: &WaveLine) -> Complex64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.axis.dx
    }

    pub fn boundary_mass(&self, band: usize) -> f64 {
        let n = self.axis.n;
        let mut acc = 0.0;
        for (i, z) in self.data.iter().enumerate() {
            if i < band || i >= n - band {
                acc += z.norm_sqr();
            }
        }
        acc * self.axis.dx
    }

    /// `<x>` and `<x^2>` in one pass.
    pub fn position_moments(&self) -> (f64, f64) {
        let xs = self.axis.points();
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (i, z) in self.data.iter().enumerate() {
            let w = z.norm_sqr();
            m1 += xs[i] * w;
            m2 += xs[i] * xs[i] * w;
        }
        (m1 * self.axis.dx, m2 * self.axis.dx)
    }
}
