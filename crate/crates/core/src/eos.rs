//! Barotropic equations of state.
//!
//! Two models are provided: the polytrope `P = K rho^gamma` and the white
//! dwarf law `P = A f(x)`, `rho = B x^3`, with
//! `f(x) = x (x^2+1)^{1/2} (2x^2-3) + 3 ln(x + sqrt(1+x^2))`.
//! Both expose the pressure, its first two density derivatives, the specific
//! enthalpy `H(rho) = int_0^rho P'(s)/s ds` and its inverse, plus the
//! near-vacuum exponent `gamma1` with `s^{1-gamma1} P'(s) -> K1 > 0`.
//!
//! The structural window is enforced at construction: below 6/5 equilibria
//! are not compactly supported, above 2 the boundary degeneracy changes
//! class. The right endpoint `gamma1 = 2` itself is accepted — the
//! equilibrium there is the classical closed-form sphere and serves as the
//! solver oracle — while the stability analysis proper assumes `gamma1 < 2`.

use crate::error::{Error, Result};

/// Lower bound of the admissible near-vacuum exponent window.
pub const GAMMA1_MIN: f64 = 1.2;
/// Upper bound of the admissible near-vacuum exponent window.
pub const GAMMA1_MAX: f64 = 2.0;

/// Pressure-law family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EosModel {
    /// `P = K rho^gamma`, `K > 0`, `gamma` dimensionless.
    Polytrope { k: f64, gamma: f64 },
    /// White dwarf: `P = A f((rho/B)^{1/3})` with `A, B > 0`.
    WhiteDwarf { a: f64, b: f64 },
}

/// A validated equation of state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquationOfState {
    model: EosModel,
    gamma1: f64,
}

impl EquationOfState {
    /// Polytrope `P = K rho^gamma`. Rejected unless `K > 0` and
    /// `gamma in (6/5, 2]`.
    pub fn polytrope(k: f64, gamma: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidEos(format!("K must be positive, got {k}")));
        }
        if !gamma.is_finite() || gamma <= GAMMA1_MIN || gamma > GAMMA1_MAX {
            return Err(Error::InvalidEos(format!(
                "gamma must lie in (6/5, 2], got {gamma}"
            )));
        }
        let eos = Self {
            model: EosModel::Polytrope { k, gamma },
            gamma1: gamma,
        };
        eos.validate_structure()?;
        Ok(eos)
    }

    /// White dwarf law with pressure scale `A` and density scale `B`.
    /// The small-`x` expansion `f(x) ~ (8/5) x^5` gives
    /// `P ~ (8A/5)(rho/B)^{5/3}`, so `gamma1 = 5/3`.
    pub fn white_dwarf(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidEos(format!(
                "A and B must be positive, got A = {a}, B = {b}"
            )));
        }
        let eos = Self {
            model: EosModel::WhiteDwarf { a, b },
            gamma1: 5.0 / 3.0,
        };
        eos.validate_structure()?;
        Ok(eos)
    }

    pub fn model(&self) -> EosModel {
        self.model
    }

    /// Near-vacuum exponent `gamma1`.
    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    /// Pressure `P(rho)`, defined for `rho >= 0` with `P(0) = 0`.
    pub fn pressure(&self, rho: f64) -> Result<f64> {
        if rho < 0.0 || !rho.is_finite() {
            return Err(Error::Domain(format!("pressure: rho = {rho}")));
        }
        Ok(match self.model {
            EosModel::Polytrope { k, gamma } => k * rho.powf(gamma),
            EosModel::WhiteDwarf { a, b } => a * wd_f((rho / b).cbrt()),
        })
    }

    /// `P'(rho)` for `rho > 0`.
    pub fn dpressure(&self, rho: f64) -> Result<f64> {
        if rho <= 0.0 || !rho.is_finite() {
            return Err(Error::Domain(format!("dpressure: rho = {rho}")));
        }
        Ok(match self.model {
            EosModel::Polytrope { k, gamma } => k * gamma * rho.powf(gamma - 1.0),
            EosModel::WhiteDwarf { a, b } => {
                // f'(x) = 8 x^4 / sqrt(1+x^2); chain rule with drho/dx = 3 B x^2
                let x = (rho / b).cbrt();
                8.0 * a / (3.0 * b) * x * x / (1.0 + x * x).sqrt()
            }
        })
    }

    /// `P''(rho)` for `rho > 0`; needed by the instability-side check (P2).
    pub fn d2pressure(&self, rho: f64) -> Result<f64> {
        if rho <= 0.0 || !rho.is_finite() {
            return Err(Error::Domain(format!("d2pressure: rho = {rho}")));
        }
        Ok(match self.model {
            EosModel::Polytrope { k, gamma } => {
                k * gamma * (gamma - 1.0) * rho.powf(gamma - 2.0)
            }
            EosModel::WhiteDwarf { a, b } => {
                let x = (rho / b).cbrt();
                8.0 * a / (9.0 * b * b) * (2.0 + x * x) / (x * (1.0 + x * x).powf(1.5))
            }
        })
    }

    /// Specific enthalpy `H(rho) = int_0^rho P'(s)/s ds`, with `H(0) = 0`.
    /// Closed forms for both models: `K gamma/(gamma-1) rho^{gamma-1}` and
    /// `(8A/B)(sqrt(1+x^2) - 1)`.
    pub fn enthalpy(&self, rho: f64) -> Result<f64> {
        if rho < 0.0 || !rho.is_finite() {
            return Err(Error::Domain(format!("enthalpy: rho = {rho}")));
        }
        Ok(match self.model {
            EosModel::Polytrope { k, gamma } => {
                k * gamma / (gamma - 1.0) * rho.powf(gamma - 1.0)
            }
            EosModel::WhiteDwarf { a, b } => {
                let x2 = (rho / b).cbrt().powi(2);
                // sqrt(1+x^2) - 1 written cancellation-free
                8.0 * a / b * (x2 / (1.0 + (1.0 + x2).sqrt()))
            }
        })
    }

    /// Monotone inverse of `enthalpy`.
    pub fn rho_from_enthalpy(&self, h: f64) -> Result<f64> {
        if h < 0.0 || !h.is_finite() {
            return Err(Error::Domain(format!("rho_from_enthalpy: h = {h}")));
        }
        Ok(match self.model {
            EosModel::Polytrope { k, gamma } => {
                ((gamma - 1.0) * h / (k * gamma)).powf(1.0 / (gamma - 1.0))
            }
            EosModel::WhiteDwarf { a, b } => {
                // sqrt(1+x^2) = 1 + t with t = B h / (8A): x^2 = t (t + 2)
                let t = b * h / (8.0 * a);
                let x2 = t * (t + 2.0);
                b * x2.sqrt().powi(3)
            }
        })
    }

    /// Enthalpy curvature `H'(rho) = P'(rho)/rho` for `rho > 0`.
    pub fn phi2(&self, rho: f64) -> Result<f64> {
        if rho <= 0.0 || !rho.is_finite() {
            return Err(Error::Domain(format!("phi2: rho = {rho}")));
        }
        Ok(self.dpressure(rho)? / rho)
    }

    /// Structural checks: `P' > 0` sampled over a wide density range and the
    /// near-vacuum limit `s^{1-gamma1} P'(s) -> K1 > 0`, tested by comparing
    /// the compensated derivative at `s = 1e-6` and `s = 1e-8` (ratio within
    /// 5% of 1).
    fn validate_structure(&self) -> Result<()> {
        for &s in &[1e-8, 1e-4, 1e-2, 1.0, 1e2, 1e4] {
            let dp = self.dpressure(s)?;
            if !(dp > 0.0) {
                return Err(Error::InvalidEos(format!("P'({s}) = {dp} not positive")));
            }
        }
        let c1 = 1e-6f64.powf(1.0 - self.gamma1) * self.dpressure(1e-6)?;
        let c2 = 1e-8f64.powf(1.0 - self.gamma1) * self.dpressure(1e-8)?;
        let ratio = c1 / c2;
        if !(ratio.is_finite() && (ratio - 1.0).abs() <= 0.05) {
            return Err(Error::InvalidEos(format!(
                "s^(1-gamma1) P'(s) not settling near vacuum: ratio {ratio}"
            )));
        }
        Ok(())
    }

    /// Instability-side check (P2): `s^{2-gamma0} P''(s) -> K2 > 0` with
    /// `gamma0 = gamma1`, sampled like the (1.3) check.
    pub fn check_p2(&self) -> Result<()> {
        let c1 = 1e-6f64.powf(2.0 - self.gamma1) * self.d2pressure(1e-6)?;
        let c2 = 1e-8f64.powf(2.0 - self.gamma1) * self.d2pressure(1e-8)?;
        if !(c1 > 0.0 && c2 > 0.0) {
            return Err(Error::InvalidEos("P'' not positive near vacuum".into()));
        }
        let ratio = c1 / c2;
        if !(ratio.is_finite() && (ratio - 1.0).abs() <= 0.05) {
            return Err(Error::InvalidEos(format!(
                "s^(2-gamma0) P''(s) not settling near vacuum: ratio {ratio}"
            )));
        }
        Ok(())
    }
}

/// White-dwarf structure function
/// `f(x) = x sqrt(x^2+1) (2x^2-3) + 3 ln(x + sqrt(1+x^2))`.
///
/// The closed form cancels to `(8/5) x^5` as `x -> 0`, losing all relative
/// accuracy below `x ~ 1e-2`; a Maclaurin series of the integral form
/// `8 int_0^x u^4 / sqrt(1+u^2) du` takes over there.
fn wd_f(x: f64) -> f64 {
    if x < 0.1 {
        // 8 sum_k (-1)^k c_k x^{5+2k}/(5+2k),  c_k = (2k-1)!!/(2k)!!
        let x2 = x * x;
        let mut c = 1.0;
        let mut p = x.powi(5);
        let mut acc = 0.0;
        for k in 0..16u32 {
            let term = c * p / (5 + 2 * k) as f64;
            acc += if k % 2 == 0 { term } else { -term };
            if term.abs() < f64::EPSILON * acc.abs() {
                break;
            }
            c *= (2 * k + 1) as f64 / (2 * k + 2) as f64;
            p *= x2;
        }
        8.0 * acc
    } else {
        let s = (1.0 + x * x).sqrt();
        x * s * (2.0 * x * x - 3.0) + 3.0 * (x + s).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gauss::gauss3;
    use approx::assert_relative_eq;

    fn wd11() -> EquationOfState {
        EquationOfState::white_dwarf(1.0, 1.0).unwrap()
    }

    /// Independent quadrature oracle for f(x) = 8 int_0^x u^4/sqrt(1+u^2) du.
    fn wd_f_quadrature(x: f64) -> f64 {
        let panels = 2000;
        let mut acc = 0.0;
        for i in 0..panels {
            let a = x * i as f64 / panels as f64;
            let b = x * (i + 1) as f64 / panels as f64;
            acc += gauss3(a, b, |u| u.powi(4) / (1.0 + u * u).sqrt());
        }
        8.0 * acc
    }

    #[test]
    fn pressure_polytrope_values() {
        let e = EquationOfState::polytrope(1.0, 1.5).unwrap();
        assert_eq!(e.pressure(0.0).unwrap(), 0.0);
        assert_relative_eq!(e.pressure(4.0).unwrap(), 8.0, max_relative = 1e-15);
        assert!(e.pressure(-1.0).is_err());
    }

    #[test]
    fn pressure_white_dwarf_against_quadrature_oracle() {
        let e = wd11();
        let oracle = wd_f_quadrature(1.0);
        // frozen from the oracle
        assert_relative_eq!(oracle, 1.229_907_2, max_relative = 1e-7);
        assert_relative_eq!(e.pressure(1.0).unwrap(), oracle, max_relative = 1e-12);
        // series/closed-form splice is smooth across x = 0.1
        for &rho in &[1e-4, 9.9e-4, 1.1e-3, 0.5e-2, 2e-3] {
            assert_relative_eq!(
                e.pressure(rho).unwrap(),
                wd_f_quadrature(rho.cbrt()),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn dpressure_values() {
        let e = EquationOfState::polytrope(1.0, 2.0).unwrap();
        assert_relative_eq!(e.dpressure(3.0).unwrap(), 6.0, max_relative = 1e-15);
        let e = EquationOfState::polytrope(2.0, 1.25).unwrap();
        assert_relative_eq!(e.dpressure(1.0).unwrap(), 2.5, max_relative = 1e-15);
        // white dwarf at rho = 1: (8/3)/sqrt(2), i.e. f'(x)/(3 B x^2) at x = 1
        assert_relative_eq!(
            wd11().dpressure(1.0).unwrap(),
            8.0 / 3.0 / 2f64.sqrt(),
            max_relative = 1e-15
        );
        assert!(wd11().dpressure(0.0).is_err());
    }

    #[test]
    fn enthalpy_values_and_inverse() {
        let e = EquationOfState::polytrope(1.0, 2.0).unwrap();
        assert_relative_eq!(e.enthalpy(1.0).unwrap(), 2.0, max_relative = 1e-15);
        assert_relative_eq!(e.rho_from_enthalpy(2.0).unwrap(), 1.0, max_relative = 1e-12);
        let w = wd11();
        let gold = 8.0 * (2f64.sqrt() - 1.0);
        assert_relative_eq!(w.enthalpy(1.0).unwrap(), gold, max_relative = 1e-14);
        assert_relative_eq!(w.rho_from_enthalpy(gold).unwrap(), 1.0, max_relative = 1e-12);
        assert_eq!(w.enthalpy(0.0).unwrap(), 0.0);
        assert_eq!(w.rho_from_enthalpy(0.0).unwrap(), 0.0);
        assert!(w.rho_from_enthalpy(-1.0).is_err());
    }

    #[test]
    fn phi2_values() {
        let e = EquationOfState::polytrope(1.0, 1.5).unwrap();
        assert_relative_eq!(e.phi2(1.0).unwrap(), 1.5, max_relative = 1e-15);
        let e = EquationOfState::polytrope(1.0, 2.0).unwrap();
        assert_relative_eq!(e.phi2(0.5).unwrap(), 2.0, max_relative = 1e-15);
        assert_relative_eq!(
            wd11().phi2(1.0).unwrap(),
            8.0 / 3.0 / 2f64.sqrt(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn gamma1_window_is_enforced() {
        assert!(EquationOfState::polytrope(1.0, 1.2).is_err());
        assert!(EquationOfState::polytrope(1.0, 2.0).is_ok());
        assert!(EquationOfState::polytrope(1.0, 2.0001).is_err());
        assert!(EquationOfState::polytrope(1.0, 1.1).is_err());
        assert!(EquationOfState::polytrope(-1.0, 1.5).is_err());
        assert!(EquationOfState::white_dwarf(0.0, 1.0).is_err());
        assert_eq!(wd11().gamma1(), 5.0 / 3.0);
    }

    #[test]
    fn near_vacuum_exponent_slope() {
        for eos in [
            EquationOfState::polytrope(1.0, 1.25).unwrap(),
            EquationOfState::polytrope(1.0, 1.5).unwrap(),
            wd11(),
        ] {
            let (s0, s1) = (1e-8, 1e-6);
            let slope = (eos.dpressure(s1).unwrap().ln() - eos.dpressure(s0).unwrap().ln())
                / (s1.ln() - s0.ln());
            let expect = eos.gamma1() - 1.0;
            assert!(
                (slope - expect).abs() <= 0.02 * expect.abs(),
                "slope {slope} vs gamma1-1 = {expect}"
            );
        }
    }

    #[test]
    fn p2_check_passes_for_bundled_models() {
        EquationOfState::polytrope(1.0, 1.25).unwrap().check_p2().unwrap();
        wd11().check_p2().unwrap();
    }

    #[test]
    fn derivative_consistency_central_difference() {
        for eos in [
            EquationOfState::polytrope(0.7, 1.4).unwrap(),
            wd11(),
        ] {
            for &rho in &[1e-6, 1e-3, 0.3, 1.0, 42.0, 1e3] {
                let h = 1e-5 * rho;
                let fd =
                    (eos.pressure(rho + h).unwrap() - eos.pressure(rho - h).unwrap()) / (2.0 * h);
                let dp = eos.dpressure(rho).unwrap();
                assert!(
                    (fd - dp).abs() <= 1e-6 * dp,
                    "rho = {rho}: fd = {fd}, dp = {dp}"
                );
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn monotone_and_roundtrip(
                log_rho in -8.0f64..3.0,
                gamma in 1.21f64..1.99,
                which in 0usize..2,
            ) {
                let eos = if which == 0 {
                    EquationOfState::polytrope(1.0, gamma).unwrap()
                } else {
                    EquationOfState::white_dwarf(1.0, 1.0).unwrap()
                };
                let rho = 10f64.powf(log_rho);
                let rho_b = rho * 1.7;
                prop_assert!(eos.pressure(rho).unwrap() < eos.pressure(rho_b).unwrap());
                prop_assert!(eos.enthalpy(rho).unwrap() < eos.enthalpy(rho_b).unwrap());
                let back = eos.rho_from_enthalpy(eos.enthalpy(rho).unwrap()).unwrap();
                prop_assert!((back - rho).abs() <= 1e-10 * rho,
                    "roundtrip {} -> {}", rho, back);
            }
        }
    }
}
