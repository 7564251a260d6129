//! Discretization of the two-coordinate configuration space and the
//! number-basis ladder operators of the cavity oscillator.
//!
//! Position grids are uniform and periodic (the right endpoint is excluded),
//! so momentum operators act spectrally through the FFT. The cavity can be
//! discretized either in the physical coordinate `q` or in the rescaled
//! coordinate `Q` used in the strong-coupling regime, where the dressed
//! oscillator keeps an epsilon-independent width.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coupling::DressedParams;
use crate::error::{Error, Result};
use crate::fourier::fft_wavenumbers;

/// Which coordinate an axis discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisLabel {
    /// Matter coordinate `x`.
    MatterX,
    /// Physical cavity coordinate `q`.
    CavityQ,
    /// Rescaled cavity coordinate `Q` (unit-form dressed oscillator).
    CavityQRescaled,
}

/// Uniform periodic grid on one coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisGrid {
    pub label: AxisLabel,
    pub min: f64,
    pub max: f64,
    pub n: usize,
    pub dx: f64,
}

impl AxisGrid {
    pub fn new(label: AxisLabel, min: f64, max: f64, n: usize) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidInput(format!(
                "axis bounds must be finite, got [{min}, {max})"
            )));
        }
        if min >= max {
            return Err(Error::InvalidInput(format!(
                "axis requires min < max, got [{min}, {max})"
            )));
        }
        if n < 8 {
            return Err(Error::InvalidInput(format!("axis needs n >= 8 points, got {n}")));
        }
        if !n.is_power_of_two() {
            log::warn!("axis n = {n} is not a power of two; transforms will be slower");
        }
        let dx = (max - min) / n as f64;
        Ok(Self { label, min, max, n, dx })
    }

    /// Symmetric axis `[-half, half)` around zero.
    pub fn symmetric(label: AxisLabel, half: f64, n: usize) -> Result<Self> {
        Self::new(label, -half, half, n)
    }

    /// Cavity `q` axis sized from the dressed oscillator ground width
    /// `sigma_q = sqrt(hbar / (2 sqrt(mu) omega))`, with `n_sigma` standard
    /// deviations of support on each side (at least 6 to keep tails below
    /// the grid-support diagnostic).
    pub fn cavity_q_auto(d: &DressedParams, hbar: f64, omega: f64, n: usize, n_sigma: f64) -> Result<Self> {
        let sigma = (hbar / (2.0 * d.mu.sqrt() * omega)).sqrt();
        Self::symmetric(AxisLabel::CavityQ, n_sigma.max(6.0) * sigma, n)
    }

    /// Rescaled cavity `Q` axis; the dressed ground Gaussian has width
    /// `sqrt(hbar/2)` independent of the coupling.
    pub fn cavity_rescaled_auto(hbar: f64, n: usize, n_sigma: f64) -> Result<Self> {
        let sigma = (hbar / 2.0).sqrt();
        Self::symmetric(AxisLabel::CavityQRescaled, n_sigma.max(6.0) * sigma, n)
    }

    /// Grid coordinates (right endpoint excluded).
    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.min + i as f64 * self.dx).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        fft_wavenumbers(self.n, self.dx)
    }

    /// Conjugate momenta `hbar k` in FFT order; spans `[-pi hbar/dx, pi hbar/dx)`.
    pub fn momenta(&self, hbar: f64) -> Vec<f64> {
        self.wavenumbers().into_iter().map(|k| hbar * k).collect()
    }
}

/// Two-coordinate product grid: matter axis 0, cavity axis 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductGrid {
    pub matter: AxisGrid,
    pub cavity: AxisGrid,
    pub hbar: f64,
}

impl ProductGrid {
    pub fn new(matter: AxisGrid, cavity: AxisGrid, hbar: f64) -> Result<Self> {
        if matter.label != AxisLabel::MatterX {
            return Err(Error::InvalidInput("first axis must be the matter coordinate".into()));
        }
        if cavity.label == AxisLabel::MatterX {
            return Err(Error::InvalidInput("second axis must be a cavity coordinate".into()));
        }
        if !hbar.is_finite() || hbar <= 0.0 {
            return Err(Error::InvalidInput(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { matter, cavity, hbar })
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.matter.n * self.cavity.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.matter.n, self.cavity.n)
    }

    /// Quadrature weight `dx * dq` of one grid cell.
    pub fn weight(&self) -> f64 {
        self.matter.dx * self.cavity.dx
    }
}

/// Ladder and quadrature operators of the cavity oscillator truncated to the
/// lowest `n_max` number states.
///
/// Conventions: `a|n> = sqrt(n)|n-1>`, `q = i sqrt(hbar/(2 omega)) (a - a+)`,
/// `p = sqrt(hbar omega / 2) (a + a+)`. The commutator `[q, p] = i hbar`
/// holds exactly on the top-left `(n_max - 1)` block; the bottom-right corner
/// carries the truncation artifact `-i hbar (n_max - 1)`.
#[derive(Debug, Clone)]
pub struct FockLadder {
    pub n_max: usize,
    pub omega: f64,
    pub hbar: f64,
    pub lowering: Array2<Complex64>,
    pub raising: Array2<Complex64>,
    pub position: Array2<Complex64>,
    pub momentum: Array2<Complex64>,
}

pub fn fock_ladder(n_max: usize, omega: f64, hbar: f64) -> Result<FockLadder> {
    if n_max < 2 {
        return Err(Error::InvalidInput(format!("fock ladder needs n_max >= 2, got {n_max}")));
    }
    if omega <= 0.0 || hbar <= 0.0 {
        return Err(Error::InvalidInput("fock ladder needs positive omega, hbar".into()));
    }
    let mut lowering = Array2::<Complex64>::zeros((n_max, n_max));
    for n in 1..n_max {
        lowering[[n - 1, n]] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let raising = lowering.t().mapv(|z| z.conj());
    let qs = (hbar / (2.0 * omega)).sqrt();
    let ps = (hbar * omega / 2.0).sqrt();
    let i = Complex64::i();
    let position = (&lowering - &raising).mapv(|z| i * qs * z);
    let momentum = (&lowering + &raising).mapv(|z| ps * z);
    Ok(FockLadder { n_max, omega, hbar, lowering, raising, position, momentum })
}

/// Harmonic-oscillator eigenfunction `n` sampled on an axis, normalized to 1
/// under `dx` quadrature.
///
/// Uses the stable three-term recurrence for Hermite functions. A warning is
/// logged when the raw quadrature norm suggests more than 1e-12 of the state
/// lives outside the grid.
pub fn ho_eigenfunction_on_grid(
    n: usize,
    axis: &AxisGrid,
    mass: f64,
    freq: f64,
    hbar: f64,
) -> Result<Array1<f64>> {
    if mass <= 0.0 || freq <= 0.0 || hbar <= 0.0 {
        return Err(Error::InvalidInput("oscillator needs positive mass, freq, hbar".into()));
    }
    let alpha = (mass * freq / hbar).sqrt(); // u = alpha * x
    let points = axis.points();
    let mut phi_prev: Vec<f64> = Vec::new();
    let mut phi: Vec<f64> = points
        .iter()
        .map(|&x| {
            let u = alpha * x;
            (alpha * alpha / std::f64::consts::PI).powf(0.25) * (-0.5 * u * u).exp()
        })
        .collect();
    for k in 1..=n {
        let next: Vec<f64> = points
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let u = alpha * x;
                let mut v = (2.0 / k as f64).sqrt() * u * phi[i];
                if k >= 2 {
                    v -= ((k - 1) as f64 / k as f64).sqrt() * phi_prev[i];
                }
                v
            })
            .collect();
        phi_prev = std::mem::take(&mut phi);
        phi = next;
    }
    let raw_norm: f64 = phi.iter().map(|v| v * v).sum::<f64>() * axis.dx;
    if (raw_norm - 1.0).abs() > 1e-12 {
        log::warn!(
            "oscillator eigenfunction n={n} poorly supported on grid: |1 - quadrature norm| = {:.3e}",
            (raw_norm - 1.0).abs()
        );
    }
    let scale = 1.0 / raw_norm.sqrt();
    Ok(Array1::from_iter(phi.into_iter().map(|v| v * scale)))
}
