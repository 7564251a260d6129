//! Grid operators for the coupled matter--cavity system in its different
//! gauge representations.
//!
//! Every two-dimensional form handled here splits into a kinetic part that
//! is diagonal in the 2D momentum representation (including the momentum
//! cross term of the MG gauge, which is just a quadratic symbol there) and a
//! potential part that is diagonal in position space. `GridOperator` stores
//! the two diagonal symbols plus transform plans, so applying the
//! Hamiltonian costs one forward and one inverse FFT.
//!
//! The kinetic symbol is symmetrized under momentum reflection before use.
//! On even-sized grids the Nyquist bin has no mirror partner, and keeping
//! the raw odd cross term there would make the discrete operator slightly
//! non-Hermitian.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coupling::{classify_regime, dressed_params, DressedParams, PhysicalParams, RegimeLabel};
use crate::error::{Error, Result};
use crate::field::{WaveField, WaveLine};
use crate::fourier::{Fft1, Fft2};
use crate::grid::{AxisGrid, AxisLabel, ProductGrid};
use crate::potential::{displaced_on_grid, PotentialModel};

/// Which Hamiltonian form to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    /// Momentum gauge: `(p + varsigma pc)^2/(2m) + V(x) + pc^2/2 + omega^2 q^2 / 2`.
    Mg,
    /// Acceleration gauge: `p^2/(2M) + V(x + zeta q) + pc^2/(2 mu) + mu Omega^2 q^2 / 2`.
    Ag,
    /// Acceleration gauge in rescaled cavity coordinates:
    /// `p^2/(2M) + V(x + xi Q) + Omega (P^2 + Q^2)/2`.
    AgRescaled,
    /// Weak-coupling truncation of the MG form: bare parts plus `(varsigma/m) p pc`.
    MgWeak,
    /// Weak-coupling truncation of the AG form: bare parts plus `zeta q V'(x)`.
    AgWeak,
}

impl Gauge {
    fn required_cavity_axis(self) -> AxisLabel {
        match self {
            Gauge::AgRescaled => AxisLabel::CavityQRescaled,
            _ => AxisLabel::CavityQ,
        }
    }
}

/// Full description of a 2D Hamiltonian to build.
#[derive(Debug, Clone)]
pub struct HamiltonianSpec {
    pub gauge: Gauge,
    pub physical: PhysicalParams,
    pub potential: PotentialModel,
    pub grid: ProductGrid,
}

impl HamiltonianSpec {
    pub fn new(
        gauge: Gauge,
        physical: PhysicalParams,
        potential: PotentialModel,
        grid: ProductGrid,
    ) -> Result<Self> {
        physical.validate()?;
        potential.validate()?;
        if (grid.hbar - physical.hbar).abs() > 1e-15 * physical.hbar {
            return Err(Error::InvalidInput(
                "grid hbar does not match the physical parameters".into(),
            ));
        }
        let want = gauge.required_cavity_axis();
        if grid.cavity.label != want {
            return Err(Error::InvalidInput(format!(
                "{gauge:?} requires a {want:?} cavity axis, grid has {:?}",
                grid.cavity.label
            )));
        }
        Ok(Self { gauge, physical, potential, grid })
    }

    pub fn dressed(&self) -> DressedParams {
        dressed_params(&self.physical).expect("validated in constructor")
    }
}

/// Hamiltonian realized as a pair of diagonal symbols over a product grid.
pub struct GridOperator {
    pub grid: ProductGrid,
    /// Kinetic symbol over the FFT-ordered 2D momentum grid.
    kinetic: Array2<f64>,
    /// Potential values over the position grid.
    potential: Array2<f64>,
    fft: Fft2,
    pub label: String,
}

impl GridOperator {
    fn from_parts(grid: ProductGrid, kinetic: Array2<f64>, potential: Array2<f64>, label: String) -> Self {
        let fft = Fft2::new(grid.matter.n, grid.cavity.n);
        let kinetic = symmetrize_symbol(kinetic);
        Self { grid, kinetic, potential, fft, label }
    }

    /// Apply the Hamiltonian: `H psi = iFFT(T * FFT(psi)) + V .* psi`.
    pub fn apply(&self, field: &WaveField) -> WaveField {
        let data = self.apply_data(&field.data);
        WaveField { grid: self.grid.clone(), data, time: field.time }
    }

    pub fn apply_data(&self, data: &Array2<Complex64>) -> Array2<Complex64> {
        let mut momentum = data.clone();
        self.fft.forward(&mut momentum);
        momentum
            .iter_mut()
            .zip(self.kinetic.iter())
            .for_each(|(z, &t)| *z *= t);
        self.fft.inverse(&mut momentum);
        momentum
            .iter_mut()
            .zip(self.potential.iter())
            .zip(data.iter())
            .for_each(|((out, &v), inp)| *out += v * inp);
        momentum
    }

    /// `<field | H | field>` (assumes the field is normalized).
    pub fn expectation(&self, field: &WaveField) -> f64 {
        let w = self.grid.weight();
        let pot: f64 = field
            .data
            .iter()
            .zip(self.potential.iter())
            .map(|(z, &v)| v * z.norm_sqr())
            .sum::<f64>()
            * w;
        let mut momentum = field.data.clone();
        self.fft.forward(&mut momentum);
        let kin: f64 = momentum
            .iter()
            .zip(self.kinetic.iter())
            .map(|(z, &t)| t * z.norm_sqr())
            .sum::<f64>()
            * w;
        kin + pot
    }

    /// Exact upper bound on the spectrum: `max T + max V`.
    pub fn upper_bound(&self) -> f64 {
        let t = self.kinetic.iter().cloned().fold(f64::MIN, f64::max);
        let v = self.potential.iter().cloned().fold(f64::MIN, f64::max);
        t + v
    }

    /// Lower bound on the spectrum: `min T + min V`.
    pub fn lower_bound(&self) -> f64 {
        let t = self.kinetic.iter().cloned().fold(f64::MAX, f64::min);
        let v = self.potential.iter().cloned().fold(f64::MAX, f64::min);
        t + v
    }

    pub fn kinetic_symbol(&self) -> &Array2<f64> {
        &self.kinetic
    }

    pub fn potential_values(&self) -> &Array2<f64> {
        &self.potential
    }

    /// Materialize the dense real-symmetric matrix in the position basis.
    ///
    /// Refuses above `cap` total grid points; the iterative eigensolver is
    /// the intended path there.
    pub fn dense(&self, cap: usize) -> Result<Array2<f64>> {
        let n = self.grid.len();
        if n > cap {
            return Err(Error::InvalidInput(format!(
                "dense materialization of dimension {n} exceeds cap {cap}"
            )));
        }
        let (nx, nq) = self.grid.shape();
        let mut h = Array2::<f64>::zeros((n, n));
        let mut basis = Array2::<Complex64>::zeros((nx, nq));
        for j in 0..n {
            basis[[j / nq, j % nq]] = Complex64::new(1.0, 0.0);
            let col = self.apply_data(&basis);
            for (i, z) in col.iter().enumerate() {
                h[[i, j]] = z.re;
            }
            basis[[j / nq, j % nq]] = Complex64::new(0.0, 0.0);
        }
        // symmetrize away FFT roundoff
        for i in 0..n {
            for j in (i + 1)..n {
                let s = 0.5 * (h[[i, j]] + h[[j, i]]);
                h[[i, j]] = s;
                h[[j, i]] = s;
            }
        }
        Ok(h)
    }
}

/// Average the momentum symbol with its reflection `k -> -k`.
///
/// Away from the Nyquist row/column this is exact for the quadratic forms
/// built here; on the Nyquist lines it removes the unpaired odd part.
fn symmetrize_symbol(mut t: Array2<f64>) -> Array2<f64> {
    let (n0, n1) = t.dim();
    let refl = |i: usize, n: usize| if i == 0 { 0 } else { n - i };
    for i in 0..n0 {
        for j in 0..n1 {
            let (ri, rj) = (refl(i, n0), refl(j, n1));
            if (ri, rj) > (i, j) {
                let s = 0.5 * (t[[i, j]] + t[[ri, rj]]);
                t[[i, j]] = s;
                t[[ri, rj]] = s;
            } else if (ri, rj) == (i, j) {
                // self-paired bins keep their value
            }
        }
    }
    // second pass for bins whose mirror was already visited
    for i in 0..n0 {
        for j in 0..n1 {
            let (ri, rj) = (refl(i, n0), refl(j, n1));
            t[[ri, rj]] = t[[i, j]];
        }
    }
    t
}

fn momentum_scale_check(spec: &HamiltonianSpec, kin_mass_matter: f64) {
    // coarse-grid diagnostic: the momentum grid should comfortably cover the
    // classical momentum sqrt(2 m (Vmax - Vmin)) over the matter range
    let xs = spec.grid.matter.points();
    let (vmin, vmax) = xs.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &x| {
        let v = spec.potential.eval(x);
        (lo.min(v), hi.max(v))
    });
    let p_classical = (2.0 * kin_mass_matter * (vmax - vmin).max(0.0)).sqrt();
    let p_grid = std::f64::consts::PI * spec.physical.hbar / spec.grid.matter.dx;
    if p_grid < 4.0 * p_classical {
        log::warn!(
            "matter momentum grid extent {p_grid:.3e} is below 4x the classical momentum scale {p_classical:.3e}; the grid may be too coarse"
        );
    }
}

/// Momentum-gauge Hamiltonian on an `x x q` grid.
pub fn build_mg(spec: &HamiltonianSpec) -> Result<GridOperator> {
    if spec.gauge != Gauge::Mg {
        return Err(Error::InvalidInput(format!("build_mg called with {:?}", spec.gauge)));
    }
    let d = spec.dressed();
    let p = &spec.physical;
    momentum_scale_check(spec, p.m);

    let pm = spec.grid.matter.momenta(p.hbar);
    let pc = spec.grid.cavity.momenta(p.hbar);
    let kinetic = Array2::from_shape_fn(spec.grid.shape(), |(i, j)| {
        let s = pm[i] + d.varsigma * pc[j];
        s * s / (2.0 * p.m) + 0.5 * pc[j] * pc[j]
    });

    let mut potential = displaced_on_grid(&spec.potential, &spec.grid, 0.0);
    let qs = spec.grid.cavity.points();
    for ((_, j), v) in potential.indexed_iter_mut() {
        *v += 0.5 * p.omega * p.omega * qs[j] * qs[j];
    }
    Ok(GridOperator::from_parts(spec.grid.clone(), kinetic, potential, "MG".into()))
}

/// Acceleration-gauge Hamiltonian on an `x x q` grid.
pub fn build_ag(spec: &HamiltonianSpec) -> Result<GridOperator> {
    if spec.gauge != Gauge::Ag {
        return Err(Error::InvalidInput(format!("build_ag called with {:?}", spec.gauge)));
    }
    let d = spec.dressed();
    let p = &spec.physical;
    momentum_scale_check(spec, d.big_m);

    let pm = spec.grid.matter.momenta(p.hbar);
    let pc = spec.grid.cavity.momenta(p.hbar);
    let kinetic = Array2::from_shape_fn(spec.grid.shape(), |(i, j)| {
        pm[i] * pm[i] / (2.0 * d.big_m) + pc[j] * pc[j] / (2.0 * d.mu)
    });

    let mut potential = displaced_on_grid(&spec.potential, &spec.grid, d.zeta);
    let qs = spec.grid.cavity.points();
    // mu Omega^2 = omega^2 exactly
    for ((_, j), v) in potential.indexed_iter_mut() {
        *v += 0.5 * p.omega * p.omega * qs[j] * qs[j];
    }
    Ok(GridOperator::from_parts(spec.grid.clone(), kinetic, potential, "AG".into()))
}

/// Acceleration-gauge Hamiltonian in rescaled cavity coordinates on an
/// `x x Q` grid.
pub fn build_ag_rescaled(spec: &HamiltonianSpec) -> Result<GridOperator> {
    if spec.gauge != Gauge::AgRescaled {
        return Err(Error::InvalidInput(format!(
            "build_ag_rescaled called with {:?}",
            spec.gauge
        )));
    }
    let d = spec.dressed();
    let p = &spec.physical;
    momentum_scale_check(spec, d.big_m);

    let pm = spec.grid.matter.momenta(p.hbar);
    let pc = spec.grid.cavity.momenta(p.hbar);
    let omega_d = d.omega_dressed;
    let kinetic = Array2::from_shape_fn(spec.grid.shape(), |(i, j)| {
        pm[i] * pm[i] / (2.0 * d.big_m) + 0.5 * omega_d * pc[j] * pc[j]
    });

    let mut potential = displaced_on_grid(&spec.potential, &spec.grid, d.xi);
    let qs = spec.grid.cavity.points();
    for ((_, j), v) in potential.indexed_iter_mut() {
        *v += 0.5 * omega_d * qs[j] * qs[j];
    }
    Ok(GridOperator::from_parts(spec.grid.clone(), kinetic, potential, "AG-rescaled".into()))
}

/// Leading-order weak-coupling truncations.
///
/// In the MG form the only coupling kept is `(varsigma/m) p pc`; in the AG
/// form it is `zeta q V'(x)`. The dropped remainders are `O(varsigma^2)` and
/// `O(zeta^2)` respectively.
pub fn build_weak_truncation(spec: &HamiltonianSpec) -> Result<GridOperator> {
    if spec.gauge != Gauge::MgWeak && spec.gauge != Gauge::AgWeak {
        return Err(Error::InvalidInput(format!(
            "build_weak_truncation called with {:?}",
            spec.gauge
        )));
    }
    let d = spec.dressed();
    let p = &spec.physical;
    momentum_scale_check(spec, p.m);
    if classify_regime(p)?.label != RegimeLabel::Weak {
        log::warn!(
            "weak-coupling truncation requested outside the weak regime (ratio {:.3e})",
            classify_regime(p)?.ratio
        );
    }

    let pm = spec.grid.matter.momenta(p.hbar);
    let pc = spec.grid.cavity.momenta(p.hbar);
    let qs = spec.grid.cavity.points();
    let xs = spec.grid.matter.points();

    let cross = spec.gauge == Gauge::MgWeak;
    let kinetic = Array2::from_shape_fn(spec.grid.shape(), |(i, j)| {
        let mut t = pm[i] * pm[i] / (2.0 * p.m) + 0.5 * pc[j] * pc[j];
        if cross {
            t += d.varsigma / p.m * pm[i] * pc[j];
        }
        t
    });

    let mut potential = displaced_on_grid(&spec.potential, &spec.grid, 0.0);
    for ((i, j), v) in potential.indexed_iter_mut() {
        *v += 0.5 * p.omega * p.omega * qs[j] * qs[j];
        if !cross {
            *v += d.zeta * qs[j] * spec.potential.eval_derivative(xs[i]);
        }
    }
    let label = if cross { "MG-weak" } else { "AG-weak" };
    Ok(GridOperator::from_parts(spec.grid.clone(), kinetic, potential, label.into()))
}

/// 1D Hamiltonian over a matter axis with diagonal kinetic and potential symbols.
pub struct LineOperator {
    pub axis: AxisGrid,
    pub hbar: f64,
    kinetic: Array1<f64>,
    potential: Array1<f64>,
    fft: Fft1,
    pub label: String,
}

impl LineOperator {
    fn from_parts(axis: AxisGrid, hbar: f64, kinetic: Array1<f64>, potential: Array1<f64>, label: String) -> Self {
        let fft = Fft1::new(axis.n);
        Self { axis, hbar, kinetic, potential, fft, label }
    }

    pub fn apply(&self, line: &WaveLine) -> WaveLine {
        let data = self.apply_data(&line.data);
        WaveLine { axis: self.axis.clone(), hbar: self.hbar, data, time: line.time }
    }

    pub fn apply_data(&self, data: &Array1<Complex64>) -> Array1<Complex64> {
        let mut v = data.to_vec();
        self.fft.forward(&mut v);
        v.iter_mut().zip(self.kinetic.iter()).for_each(|(z, &t)| *z *= t);
        self.fft.inverse(&mut v);
        let mut out = Array1::from_vec(v);
        out.iter_mut()
            .zip(self.potential.iter())
            .zip(data.iter())
            .for_each(|((o, &p), i)| *o += p * i);
        out
    }

    pub fn expectation(&self, line: &WaveLine) -> f64 {
        let pot: f64 = line
            .data
            .iter()
            .zip(self.potential.iter())
            .map(|(z, &v)| v * z.norm_sqr())
            .sum::<f64>()
            * self.axis.dx;
        let mut v = line.data.to_vec();
        self.fft.forward(&mut v);
        let kin: f64 = v
            .iter()
            .zip(self.kinetic.iter())
            .map(|(z, &t)| t * z.norm_sqr())
            .sum::<f64>()
            * self.axis.dx;
        kin + pot
    }

    pub fn upper_bound(&self) -> f64 {
        self.kinetic.iter().cloned().fold(f64::MIN, f64::max)
            + self.potential.iter().cloned().fold(f64::MIN, f64::max)
    }

    pub fn lower_bound(&self) -> f64 {
        self.kinetic.iter().cloned().fold(f64::MAX, f64::min)
            + self.potential.iter().cloned().fold(f64::MAX, f64::min)
    }

    pub fn kinetic_symbol(&self) -> &Array1<f64> {
        &self.kinetic
    }

    pub fn potential_values(&self) -> &Array1<f64> {
        &self.potential
    }

    pub fn dense(&self) -> Array2<f64> {
        let n = self.axis.n;
        let mut h = Array2::<f64>::zeros((n, n));
        let mut basis = Array1::<Complex64>::zeros(n);
        for j in 0..n {
            basis[j] = Complex64::new(1.0, 0.0);
            let col = self.apply_data(&basis);
            for (i, z) in col.iter().enumerate() {
                h[[i, j]] = z.re;
            }
            basis[j] = Complex64::new(0.0, 0.0);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let s = 0.5 * (h[[i, j]] + h[[j, i]]);
                h[[i, j]] = s;
                h[[j, i]] = s;
            }
        }
        h
    }
}

/// Dressed 1D matter Hamiltonian `p^2/(2 M(eps)) + V(x)`, equivalently
/// `-(hbar_eff^2 / 2m) d_xx + V(x)`: the strong-coupling limit form whose
/// Planck constant shrinks as the coupling grows.
pub fn build_semiclassical(
    physical: &PhysicalParams,
    potential: &PotentialModel,
    axis: &AxisGrid,
) -> Result<LineOperator> {
    physical.validate()?;
    potential.validate()?;
    if axis.label != AxisLabel::MatterX {
        return Err(Error::InvalidInput("semiclassical operator needs a matter axis".into()));
    }
    let d = dressed_params(physical)?;
    let pm = axis.momenta(physical.hbar);
    let kinetic = Array1::from_iter(pm.iter().map(|&p| p * p / (2.0 * d.big_m)));
    let xs = axis.points();
    let pot = Array1::from_iter(xs.iter().map(|&x| potential.eval(x)));
    Ok(LineOperator::from_parts(
        axis.clone(),
        physical.hbar,
        kinetic,
        pot,
        "semiclassical-matter".into(),
    ))
}

/// Direction of the gauge map acting on states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShearDirection {
    /// Take an AG-representation state to the MG representation:
    /// `psi_MG(x, q) = psi_AG(x - zeta q, q)`.
    AgToMg,
    /// Take an MG-representation state to the AG representation:
    /// `psi_AG(x, q) = psi_MG(x + zeta q, q)`.
    MgToAg,
}

/// Apply the gauge-mapping unitary as an exact spectral shear of each
/// constant-`q` row: a translation `x -> x +- zeta(eps) q`.
///
/// The shift is a pure phase in the matter momentum representation, so the
/// map is unitary to machine precision. Rows whose support would wrap around
/// the periodic boundary abort with the extent that would be needed.
pub fn apply_ma_unitary(
    field: &WaveField,
    physical: &PhysicalParams,
    direction: ShearDirection,
) -> Result<WaveField> {
    if field.grid.cavity.label != AxisLabel::CavityQ {
        return Err(Error::InvalidInput(
            "gauge shear acts on the physical q representation".into(),
        ));
    }
    let d = dressed_params(physical)?;
    let zeta = d.zeta;
    let qs = field.grid.cavity.points();
    let sign = match direction {
        ShearDirection::AgToMg => 1.0,
        ShearDirection::MgToAg => -1.0,
    };

    // wrap check: mass that a row would push across the periodic boundary
    let (nx, nq) = field.grid.shape();
    let axis = &field.grid.matter;
    let mut wrap_mass = 0.0;
    let mut max_shift: f64 = 0.0;
    for j in 0..nq {
        let delta = sign * zeta * qs[j];
        max_shift = max_shift.max(delta.abs());
        let cells = (delta.abs() / axis.dx).ceil() as usize;
        if cells == 0 {
            continue;
        }
        for i in 0..cells.min(nx) {
            let idx = if delta > 0.0 { nx - 1 - i } else { i };
            wrap_mass += field.data[[idx, j]].norm_sqr();
        }
    }
    wrap_mass *= field.grid.weight();
    if wrap_mass > 1e-10 {
        return Err(Error::GridSupport {
            reason: format!(
                "gauge shear wraps {wrap_mass:.3e} of the state across the matter boundary"
            ),
            required_extent: (axis.max - axis.min) + 2.0 * max_shift,
        });
    }

    let fft = Fft1::new(nx);
    let ks = axis.wavenumbers();
    let mut out = field.data.clone();
    let mut col = vec![Complex64::default(); nx];
    for j in 0..nq {
        let delta = sign * zeta * qs[j];
        for i in 0..nx {
            col[i] = out[[i, j]];
        }
        fft.forward(&mut col);
        for (z, &k) in col.iter_mut().zip(ks.iter()) {
            *z *= Complex64::from_polar(1.0, -k * delta);
        }
        fft.inverse(&mut col);
        for i in 0..nx {
            out[[i, j]] = col[i];
        }
    }
    Ok(WaveField { grid: field.grid.clone(), data: out, time: field.time })
}

/// Build the operator named by `spec.gauge`.
pub fn build(spec: &HamiltonianSpec) -> Result<GridOperator> {
    match spec.gauge {
        Gauge::Mg => build_mg(spec),
        Gauge::Ag => build_ag(spec),
        Gauge::AgRescaled => build_ag_rescaled(spec),
        Gauge::MgWeak | Gauge::AgWeak => build_weak_truncation(spec),
    }
}
