//! Parameter algebra of the matter--cavity coupling.
//!
//! Everything that depends on the bare coupling strength `epsilon` lives
//! here: the dimensionless momentum-gauge coupling, the dressed masses and
//! frequencies of the acceleration gauge, the rescaled coupling, and the
//! effective Planck constant that controls how classical the dressed matter
//! system looks. In a physical cavity the squared coupling scales inversely
//! with the mode volume, so the strong-coupling regime corresponds to very
//! tightly confined fields; here `epsilon` is just a number in model units.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bare inputs of the single-mode model: matter mass, cavity frequency,
/// Planck constant, and the momentum-gauge coupling strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Matter mass `m` (model units).
    pub m: f64,
    /// Cavity mode frequency `omega` (rad / time).
    pub omega: f64,
    /// Planck constant `hbar` (action).
    pub hbar: f64,
    /// Momentum-gauge coupling `epsilon`.
    pub epsilon: f64,
}

impl PhysicalParams {
    pub fn new(m: f64, omega: f64, hbar: f64, epsilon: f64) -> Result<Self> {
        let p = Self { m, omega, hbar, epsilon };
        p.validate()?;
        Ok(p)
    }

    /// Check positivity / finiteness of every field.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("m", self.m), ("omega", self.omega), ("hbar", self.hbar)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return Err(Error::InvalidInput(format!(
                "epsilon must be finite and non-negative, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// Same parameters at a different coupling.
    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self { epsilon, ..*self }
    }

    /// `m hbar omega^3`, the combination the coupling is measured against.
    fn action_scale(&self) -> f64 {
        self.m * self.hbar * self.omega.powi(3)
    }
}

/// Every `epsilon`-derived quantity of the model in one bundle.
///
/// The exact algebraic identities `mu * M = m`, `Omega * sqrt(mu) = omega`
/// and `hbar_eff * sqrt(M) = hbar * sqrt(m)` hold to machine precision by
/// construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedParams {
    /// Dimensionless momentum-gauge coupling `varsigma = (epsilon/omega) sqrt(2/(hbar omega))`.
    pub varsigma: f64,
    /// Dressed matter mass `M = m + 2 epsilon^2 / (hbar omega^3)`.
    pub big_m: f64,
    /// Acceleration-gauge coupling `zeta = epsilon omega sqrt(2 hbar omega) / (m hbar omega^3 + 2 epsilon^2)`.
    pub zeta: f64,
    /// Dressed cavity mass `mu = m / M`.
    pub mu: f64,
    /// Dressed cavity frequency `Omega = omega / sqrt(mu)`.
    pub omega_dressed: f64,
    /// Rescaled coupling `xi = zeta / sqrt(sqrt(mu) omega)` for the unit-form cavity oscillator.
    pub xi: f64,
    /// Effective Planck constant `hbar_eff = hbar sqrt(m / M)`.
    pub hbar_eff: f64,
    /// Coupling at which `zeta` peaks: `sqrt(m hbar omega^3 / 2)`.
    pub epsilon_max: f64,
}

/// Coarse classification of the coupling strength by the dimensionless
/// ratio `2 epsilon^2 / (m hbar omega^3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeLabel {
    Weak,
    Crossover,
    Strong,
}

impl std::fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegimeLabel::Weak => write!(f, "weak"),
            RegimeLabel::Crossover => write!(f, "crossover"),
            RegimeLabel::Strong => write!(f, "strong"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingRegime {
    pub label: RegimeLabel,
    /// `2 epsilon^2 / (m hbar omega^3)`; the weak/strong thresholds sit at
    /// 0.1 and 10 on this ratio.
    pub ratio: f64,
}

/// Ratio below which the coupling counts as weak.
pub const WEAK_THRESHOLD: f64 = 0.1;
/// Ratio above which the coupling counts as strong.
pub const STRONG_THRESHOLD: f64 = 10.0;

/// Compute all dressed parameters from the bare ones.
pub fn dressed_params(p: &PhysicalParams) -> Result<DressedParams> {
    p.validate()?;
    let PhysicalParams { m, omega, hbar, epsilon } = *p;

    let varsigma = (epsilon / omega) * (2.0 / (hbar * omega)).sqrt();
    let denom = m * hbar * omega.powi(3) + 2.0 * epsilon * epsilon;
    let big_m = denom / (hbar * omega.powi(3));
    let zeta = epsilon * omega * (2.0 * hbar * omega).sqrt() / denom;
    let mu = m / big_m;
    let omega_dressed = omega / mu.sqrt();
    let xi = zeta / (mu.sqrt() * omega).sqrt();
    let hbar_eff = hbar * (m / big_m).sqrt();
    let epsilon_max = epsilon_max(p)?;

    Ok(DressedParams {
        varsigma,
        big_m,
        zeta,
        mu,
        omega_dressed,
        xi,
        hbar_eff,
        epsilon_max,
    })
}

/// Coupling at which the acceleration-gauge coupling `zeta` is maximal,
/// `sqrt(m hbar omega^3 / 2)`. At this point `zeta = 1 / (2 sqrt(m))`.
pub fn epsilon_max(p: &PhysicalParams) -> Result<f64> {
    p.validate()?;
    Ok((p.action_scale() / 2.0).sqrt())
}

/// Classify the coupling by the ratio `2 epsilon^2 / (m hbar omega^3)`.
pub fn classify_regime(p: &PhysicalParams) -> Result<CouplingRegime> {
    p.validate()?;
    let ratio = 2.0 * p.epsilon * p.epsilon / p.action_scale();
    let label = if ratio < WEAK_THRESHOLD {
        RegimeLabel::Weak
    } else if ratio > STRONG_THRESHOLD {
        RegimeLabel::Strong
    } else {
        RegimeLabel::Crossover
    };
    Ok(CouplingRegime { label, ratio })
}

/// Inverse of the `hbar_eff(epsilon)` map: the coupling at which the
/// effective Planck constant reaches `target` (requires `0 < target <= hbar`).
pub fn epsilon_for_hbar_eff(p: &PhysicalParams, target: f64) -> Result<f64> {
    p.validate()?;
    if !(target > 0.0 && target <= p.hbar) {
        return Err(Error::InvalidInput(format!(
            "hbar_eff target must lie in (0, hbar={}], got {target}",
            p.hbar
        )));
    }
    // hbar_eff = hbar sqrt(m/M) with M = m + 2 eps^2/(hbar omega^3).
    let big_m = p.m * (p.hbar / target).powi(2);
    Ok(((big_m - p.m) * p.hbar * p.omega.powi(3) / 2.0).sqrt())
}

/// Human-readable diagnostics about the validity of the single-mode model
/// at the given coupling. Extreme couplings are reported, never rejected:
/// where exactly the single-mode picture breaks down is problem dependent.
pub fn regime_diagnostics(p: &PhysicalParams) -> Result<Vec<String>> {
    let regime = classify_regime(p)?;
    let mut notes = Vec::new();
    if regime.ratio > 1e4 {
        notes.push(format!(
            "coupling ratio 2*eps^2/(m*hbar*omega^3) = {:.3e} is extreme; \
             a single-mode cavity model without mass renormalization may no \
             longer be physical here",
            regime.ratio
        ));
    }
    Ok(notes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(m: f64, omega: f64, hbar: f64, epsilon: f64) -> PhysicalParams {
        PhysicalParams::new(m, omega, hbar, epsilon).unwrap()
    }

    #[test]
    fn interaction_free_limit() {
        let d = dressed_params(&params(1.0, 1.0, 1.0, 0.0)).unwrap();
        assert_eq!(d.big_m, 1.0);
        assert_eq!(d.zeta, 0.0);
        assert_eq!(d.mu, 1.0);
        assert_eq!(d.omega_dressed, 1.0);
        assert_eq!(d.hbar_eff, 1.0);
        assert_eq!(d.varsigma, 0.0);
    }

    #[test]
    fn zeta_peak_value_is_exact() {
        // At epsilon_max the coupling reaches 1/(2 sqrt(m)) exactly.
        let p = params(1.0, 1.0, 1.0, (0.5f64).sqrt());
        let d = dressed_params(&p).unwrap();
        assert_relative_eq!(d.zeta, 0.5, max_relative = 1e-15);
    }

    #[test]
    fn dressed_values_at_peak_coupling() {
        // Direct evaluation of the closed forms at epsilon = sqrt(1/2).
        let d = dressed_params(&params(1.0, 1.0, 1.0, (0.5f64).sqrt())).unwrap();
        assert_relative_eq!(d.big_m, 2.0, max_relative = 1e-14);
        assert_relative_eq!(d.mu, 0.5, max_relative = 1e-14);
        assert_relative_eq!(d.omega_dressed, 2.0f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(d.hbar_eff, 1.0 / 2.0f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn zeta_asymptote_matches_symbolic_limit() {
        // zeta * eps -> omega sqrt(2 hbar omega) / 2 as eps -> infinity.
        let p = params(2.0, 3.0, 1.0, 1e3);
        let d = dressed_params(&p).unwrap();
        let limit = 3.0 * 6.0f64.sqrt() / 2.0;
        assert_relative_eq!(d.zeta * 1e3, limit, max_relative = 1e-3);
    }

    #[test]
    fn epsilon_max_values() {
        assert_relative_eq!(
            epsilon_max(&params(1.0, 1.0, 1.0, 0.0)).unwrap(),
            0.70711,
            max_relative = 1e-4
        );
        assert_relative_eq!(
            epsilon_max(&params(4.0, 1.0, 1.0, 0.0)).unwrap(),
            1.41421,
            max_relative = 1e-4
        );
        assert_relative_eq!(epsilon_max(&params(1.0, 2.0, 1.0, 0.0)).unwrap(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn epsilon_max_is_argmax_of_zeta() {
        // Numerical argmax over a log grid lands on the closed form.
        let p0 = params(1.0, 2.0, 1.0, 0.0);
        let em = epsilon_max(&p0).unwrap();
        let mut best = (0.0, f64::NEG_INFINITY);
        let n = 20_000;
        for i in 0..n {
            let eps = 10f64.powf(-3.0 + 4.0 * i as f64 / (n - 1) as f64);
            let z = dressed_params(&p0.with_epsilon(eps)).unwrap().zeta;
            if z > best.1 {
                best = (eps, z);
            }
        }
        assert_relative_eq!(best.0, em, max_relative = 1e-3);
    }

    #[test]
    fn regime_classification() {
        let r = classify_regime(&params(1.0, 1.0, 1.0, 0.01)).unwrap();
        assert_eq!(r.label, RegimeLabel::Weak);
        assert_relative_eq!(r.ratio, 2e-4, max_relative = 1e-12);

        let r = classify_regime(&params(1.0, 1.0, 1.0, 10.0)).unwrap();
        assert_eq!(r.label, RegimeLabel::Strong);
        assert_relative_eq!(r.ratio, 200.0, max_relative = 1e-12);

        let r = classify_regime(&params(1.0, 1.0, 1.0, (0.5f64).sqrt())).unwrap();
        assert_eq!(r.label, RegimeLabel::Crossover);
        assert_relative_eq!(r.ratio, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(PhysicalParams::new(0.0, 1.0, 1.0, 0.0).is_err());
        assert!(PhysicalParams::new(1.0, -1.0, 1.0, 0.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, f64::NAN, 0.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn zeta_monotone_up_then_down() {
        let p0 = params(0.7, 1.3, 2.0, 0.0);
        let em = epsilon_max(&p0).unwrap();
        // strictly increasing below the peak, strictly decreasing above
        let mut prev = 0.0;
        for i in 1..200 {
            let eps = em * i as f64 / 200.0;
            let z = dressed_params(&p0.with_epsilon(eps)).unwrap().zeta;
            assert!(z > prev, "zeta not increasing at eps={eps}");
            prev = z;
        }
        prev = dressed_params(&p0.with_epsilon(em)).unwrap().zeta;
        for i in 1..200 {
            let eps = em * (1.0 + 9.0 * i as f64 / 200.0);
            let z = dressed_params(&p0.with_epsilon(eps)).unwrap().zeta;
            assert!(z < prev, "zeta not decreasing at eps={eps}");
            prev = z;
        }
    }

    #[test]
    fn weak_limit_of_zeta_is_linear() {
        // zeta/eps -> omega sqrt(2 hbar omega) / (m hbar omega^3) as eps -> 0
        let p0 = params(1.7, 0.9, 1.1, 0.0);
        let slope = p0.omega * (2.0 * p0.hbar * p0.omega).sqrt()
            / (p0.m * p0.hbar * p0.omega.powi(3));
        for eps in [1e-6, 1e-5, 1e-4] {
            let d = dressed_params(&p0.with_epsilon(eps)).unwrap();
            assert_relative_eq!(d.zeta / eps, slope, max_relative = 1e-6);
        }
    }

    #[test]
    fn loglog_slopes_in_the_strong_limit() {
        // hbar_eff ~ eps^-1, xi ~ eps^-1/2, Omega ~ eps^+1 far above the peak
        let p0 = params(1.0, 1.0, 1.0, 0.0);
        let em = epsilon_max(&p0).unwrap();
        let (e1, e2) = (1e2 * em, 1e4 * em);
        let d1 = dressed_params(&p0.with_epsilon(e1)).unwrap();
        let d2 = dressed_params(&p0.with_epsilon(e2)).unwrap();
        let slope = |a: f64, b: f64| (b / a).ln() / (e2 / e1).ln();
        assert_relative_eq!(slope(d1.hbar_eff, d2.hbar_eff), -1.0, max_relative = 0.01);
        assert_relative_eq!(slope(d1.xi, d2.xi), -0.5, max_relative = 0.01);
        assert_relative_eq!(slope(d1.omega_dressed, d2.omega_dressed), 1.0, max_relative = 0.01);
    }

    #[test]
    fn epsilon_for_hbar_eff_roundtrip() {
        let p0 = params(1.0, 1.0, 1.0, 0.0);
        for target in [0.9, 0.5, 0.1, 0.01] {
            let eps = epsilon_for_hbar_eff(&p0, target).unwrap();
            let d = dressed_params(&p0.with_epsilon(eps)).unwrap();
            assert_relative_eq!(d.hbar_eff, target, max_relative = 1e-12);
        }
        assert!(epsilon_for_hbar_eff(&p0, 1.5).is_err());
        assert!(epsilon_for_hbar_eff(&p0, 0.0).is_err());
    }
}
