//! Matter potentials `V(x)`, their derivatives, and displaced evaluation
//! `V(x + c q)` over product grids.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::ProductGrid;

/// A 1D matter potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialModel {
    /// `V = 1/2 mass omega0^2 x^2`.
    Harmonic { mass: f64, omega0: f64 },
    /// Symmetric quartic double well `V = barrier (x^2 - a^2)^2 / a^4`
    /// with `V(0) = barrier` and minima `V(+-a) = 0`.
    QuarticDoubleWell { barrier: f64, minimum: f64 },
    /// `V = depth (1 - exp(-alpha (x - x_e)))^2`.
    Morse { depth: f64, alpha: f64, x_e: f64 },
    /// `V = sum_k coefficients[k] x^k`.
    Polynomial { coefficients: Vec<f64> },
}

impl PotentialModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialModel::Harmonic { mass, omega0 } => {
                if *mass <= 0.0 || *omega0 <= 0.0 {
                    return Err(Error::InvalidInput(
                        "harmonic potential needs positive mass and omega0".into(),
                    ));
                }
            }
            PotentialModel::QuarticDoubleWell { barrier, minimum } => {
                if *barrier <= 0.0 || *minimum <= 0.0 {
                    return Err(Error::InvalidInput(
                        "double well needs positive barrier height and minimum position".into(),
                    ));
                }
            }
            PotentialModel::Morse { depth, alpha, .. } => {
                if *depth <= 0.0 || *alpha <= 0.0 {
                    return Err(Error::InvalidInput("morse needs positive depth and alpha".into()));
                }
            }
            PotentialModel::Polynomial { coefficients } => {
                if coefficients.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidInput("polynomial coefficients must be finite".into()));
                }
            }
        }
        Ok(())
    }

    /// `V(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            PotentialModel::Harmonic { mass, omega0 } => 0.5 * mass * omega0 * omega0 * x * x,
            PotentialModel::QuarticDoubleWell { barrier, minimum } => {
                let a2 = minimum * minimum;
                let u = x * x - a2;
                barrier * u * u / (a2 * a2)
            }
            PotentialModel::Morse { depth, alpha, x_e } => {
                let u = 1.0 - (-alpha * (x - x_e)).exp();
                depth * u * u
            }
            PotentialModel::Polynomial { coefficients } => {
                // Horner
                coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
            }
        }
    }

    /// `V'(x)`.
    pub fn eval_derivative(&self, x: f64) -> f64 {
        match self {
            PotentialModel::Harmonic { mass, omega0 } => mass * omega0 * omega0 * x,
            PotentialModel::QuarticDoubleWell { barrier, minimum } => {
                let a2 = minimum * minimum;
                4.0 * barrier * x * (x * x - a2) / (a2 * a2)
            }
            PotentialModel::Morse { depth, alpha, x_e } => {
                let e = (-alpha * (x - x_e)).exp();
                2.0 * depth * alpha * e * (1.0 - e)
            }
            PotentialModel::Polynomial { coefficients } => coefficients
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, &c)| acc * x + k as f64 * c),
        }
    }

    /// A characteristic length used for finite-difference step scaling.
    pub fn length_scale(&self) -> f64 {
        match self {
            PotentialModel::Harmonic { .. } => 1.0,
            PotentialModel::QuarticDoubleWell { minimum, .. } => *minimum,
            PotentialModel::Morse { alpha, .. } => 1.0 / alpha,
            PotentialModel::Polynomial { .. } => 1.0,
        }
    }
}

/// Evaluate `V(x_i + zeta_eff * q_j)` over a product grid.
///
/// `zeta_eff` is the acceleration-gauge coupling `zeta` on physical `q`
/// grids, or the rescaled coupling `xi` on `Q` grids. With `zeta_eff = 0`
/// every row reduces to `V(x_i)`.
pub fn displaced_on_grid(model: &PotentialModel, grid: &ProductGrid, zeta_eff: f64) -> Array2<f64> {
    let xs = grid.matter.points();
    let qs = grid.cavity.points();
    Array2::from_shape_fn(grid.shape(), |(i, j)| model.eval(xs[i] + zeta_eff * qs[j]))
}
