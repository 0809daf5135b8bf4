//! Logarithmic (Weber-Fechner) utilities of money and debt.
//!
//! All logarithms are natural; any other base is absorbed into the Weber
//! constant `q`.

use serde::{Deserialize, Serialize};

use crate::dist::DiscreteDistribution;
use crate::error::{invalid, Error, Result};

/// Default significance threshold, in monetary units.
pub const DEFAULT_GAMMA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UtilityKind {
    /// `q ln((S + x) / S)` for a change `x` in wealth `S`.
    BernoulliIncome,
    /// `-b ln((D + x) / D)` for a change `x` in debt `D`.
    BernoulliDebt,
    /// The identity on money.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityModel {
    pub kind: UtilityKind,
    /// Weber constant, utiles per unit of log ratio.
    pub q: f64,
    /// Initial wealth or initial debt.
    pub reference: f64,
    /// Smallest amount still significant; bounds the domain away from ruin.
    pub gamma: f64,
}

impl UtilityModel {
    pub fn income(q: f64, wealth: f64) -> Result<Self> {
        Self::new(UtilityKind::BernoulliIncome, q, wealth, DEFAULT_GAMMA)
    }

    pub fn debt(b: f64, debt: f64) -> Result<Self> {
        Self::new(UtilityKind::BernoulliDebt, b, debt, DEFAULT_GAMMA)
    }

    pub fn linear() -> Self {
        Self {
            kind: UtilityKind::Linear,
            q: 1.0,
            reference: 0.0,
            gamma: DEFAULT_GAMMA,
        }
    }

    pub fn new(kind: UtilityKind, q: f64, reference: f64, gamma: f64) -> Result<Self> {
        let model = Self {
            kind,
            q,
            reference,
            gamma,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn with_gamma(self, gamma: f64) -> Result<Self> {
        Self { gamma, ..self }.validate_owned()
    }

    pub fn with_q(self, q: f64) -> Result<Self> {
        Self { q, ..self }.validate_owned()
    }

    pub fn with_reference(self, reference: f64) -> Result<Self> {
        Self { reference, ..self }.validate_owned()
    }

    fn validate_owned(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q.is_finite() && self.q > 0.0) {
            return Err(invalid(format!("Weber constant must be positive, got {}", self.q)));
        }
        if self.is_logarithmic() {
            if !(self.reference.is_finite() && self.reference > 0.0) {
                return Err(invalid(format!(
                    "reference amount must be positive, got {}",
                    self.reference
                )));
            }
            if !(self.gamma.is_finite() && self.gamma > 0.0) {
                return Err(invalid(format!(
                    "significance threshold must be positive, got {}",
                    self.gamma
                )));
            }
        }
        Ok(())
    }

    pub fn is_logarithmic(&self) -> bool {
        self.kind != UtilityKind::Linear
    }

    /// Smallest increment excluded from the domain, `-reference + gamma`.
    pub fn threshold(&self) -> f64 {
        if self.is_logarithmic() {
            -self.reference + self.gamma
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Utility of a monetary increment.
    pub fn utility(&self, delta: f64) -> Result<f64> {
        if !delta.is_finite() {
            return Err(Error::NonFiniteValue(delta));
        }
        match self.kind {
            UtilityKind::Linear => Ok(delta),
            UtilityKind::BernoulliIncome | UtilityKind::BernoulliDebt => {
                let threshold = self.threshold();
                if delta <= threshold {
                    return Err(Error::BelowThreshold {
                        value: delta,
                        threshold,
                    });
                }
                // ln_1p keeps small increments on huge references accurate
                let log_ratio = (delta / self.reference).ln_1p();
                Ok(match self.kind {
                    UtilityKind::BernoulliIncome => self.q * log_ratio,
                    _ => -self.q * log_ratio,
                })
            }
        }
    }

    /// Monetary increment with utility `u`.
    pub fn inverse(&self, u: f64) -> Result<f64> {
        if !u.is_finite() {
            return Err(Error::NonFiniteValue(u));
        }
        let delta = match self.kind {
            UtilityKind::Linear => u,
            UtilityKind::BernoulliIncome => self.reference * (u / self.q).exp_m1(),
            UtilityKind::BernoulliDebt => self.reference * (-u / self.q).exp_m1(),
        };
        if delta <= self.threshold() {
            return Err(Error::BelowThreshold {
                value: delta,
                threshold: self.threshold(),
            });
        }
        Ok(delta)
    }
}

fn expect_kind(model: &UtilityModel, kind: UtilityKind) -> Result<()> {
    if model.kind == kind {
        Ok(())
    } else {
        Err(invalid(format!("expected a {kind:?} model, got {:?}", model.kind)))
    }
}

pub fn income_utility(delta: f64, model: &UtilityModel) -> Result<f64> {
    expect_kind(model, UtilityKind::BernoulliIncome)?;
    model.utility(delta)
}

pub fn debt_utility(delta_debt: f64, model: &UtilityModel) -> Result<f64> {
    expect_kind(model, UtilityKind::BernoulliDebt)?;
    model.utility(delta_debt)
}

pub fn linear_utility(delta: f64, model: &UtilityModel) -> Result<f64> {
    expect_kind(model, UtilityKind::Linear)?;
    model.utility(delta)
}

/// Weber constant that makes one just-noticeable difference at `reference`
/// worth exactly one utile. For debt, `jnd` is the size of the decrement.
pub fn calibrate_weber(reference: f64, jnd: f64, kind: UtilityKind) -> Result<f64> {
    if !(reference > 0.0 && jnd > 0.0 && reference.is_finite() && jnd.is_finite()) {
        return Err(invalid(format!(
            "calibration needs positive reference and jnd, got {reference} and {jnd}"
        )));
    }
    match kind {
        UtilityKind::BernoulliIncome => Ok(1.0 / (jnd / reference).ln_1p()),
        UtilityKind::BernoulliDebt => {
            if jnd >= reference {
                return Err(invalid("debt jnd must be smaller than the debt itself"));
            }
            Ok(-1.0 / (-jnd / reference).ln_1p())
        }
        UtilityKind::Linear => Err(invalid("the linear model has no Weber constant")),
    }
}

/// Maps every outcome to its utility, keeping the masses.
pub fn pushforward(outcomes: &DiscreteDistribution, model: &UtilityModel) -> Result<DiscreteDistribution> {
    model.validate()?;
    outcomes.try_map(|o| model.utility(o))
}

/// Utilities of the worst and best outcome, in that order of outcome.
pub fn utility_support(model: &UtilityModel, min_outcome: f64, max_outcome: f64) -> Result<(f64, f64)> {
    if min_outcome > max_outcome {
        return Err(invalid(format!("empty outcome range [{min_outcome}, {max_outcome}]")));
    }
    Ok((model.utility(min_outcome)?, model.utility(max_outcome)?))
}

/// Power-law sensation `c S^q`.
pub fn power_law_sensation(stimulus: f64, q: f64, c: f64) -> Result<f64> {
    if !(stimulus > 0.0) {
        return Err(invalid(format!("stimulus must be positive, got {stimulus}")));
    }
    Ok(c * stimulus.powf(q))
}

/// Log of the ratio of two power-law sensations, `q ln(s1 / s0)`.
pub fn log_ratio_sensation(s1: f64, s0: f64, q: f64) -> Result<f64> {
    if !(s1 > 0.0 && s0 > 0.0) {
        return Err(invalid(format!("stimuli must be positive, got {s1} and {s0}")));
    }
    Ok(q * (s1 / s0).ln())
}

/// Weber constant of the decibel scale, `10 / ln 10`.
pub const DECIBEL_Q: f64 = 10.0 / std::f64::consts::LN_10;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    #[test]
    fn one_jnd_is_one_utile() {
        let q = 1.0 / 1.01f64.ln();
        let m = UtilityModel::income(q, 1000.0).unwrap();
        assert_abs_diff_eq!(income_utility(10.0, &m).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(m.utility(0.0).unwrap(), 0.0);
    }

    #[test]
    fn income_loss_example() {
        let m = UtilityModel::income(100.0, 1500.0).unwrap();
        let u = income_utility(-500.0, &m).unwrap();
        assert!((u - -40.55).abs() < 0.05);
    }

    #[test]
    fn debt_examples() {
        let check = |debt: f64, expected: f64, tol: f64| {
            let m = UtilityModel::debt(40.0, debt).unwrap();
            let u = debt_utility(-500.0, &m).unwrap();
            assert!((u - expected).abs() < tol, "{debt}: {u}");
        };
        check(40000.0, 0.5, 0.01);
        check(2000.0, 11.5, 0.1);
        check(20000.0, 1.0, 0.05);
    }

    #[test]
    fn domain_is_enforced() {
        let m = UtilityModel::income(1.0, 100.0).unwrap();
        assert!(m.utility(-98.5).is_ok());
        let err = m.utility(-99.0).unwrap_err();
        assert!(err.is_domain_error());
        assert!(m.utility(-150.0).is_err());
        let wide = m.with_gamma(10.0).unwrap();
        assert!(wide.utility(-95.0).is_err());
    }

    #[test]
    fn kind_mismatch_and_bad_parameters() {
        let m = UtilityModel::income(1.0, 100.0).unwrap();
        assert!(debt_utility(1.0, &m).is_err());
        assert!(linear_utility(1.0, &m).is_err());
        assert!(UtilityModel::income(0.0, 100.0).is_err());
        assert!(UtilityModel::income(1.0, -5.0).is_err());
        assert!(UtilityModel::new(UtilityKind::BernoulliIncome, 1.0, 100.0, 0.0).is_err());
    }

    #[test]
    fn calibration() {
        let q = calibrate_weber(1000.0, 10.0, UtilityKind::BernoulliIncome).unwrap();
        assert!((q - 100.50).abs() < 0.01);
        let b = calibrate_weber(40000.0, 1000.0, UtilityKind::BernoulliDebt).unwrap();
        assert!((b - 39.5).abs() < 0.1);
        let s = 7.0;
        let unit = calibrate_weber(s, s * (std::f64::consts::E - 1.0), UtilityKind::BernoulliIncome).unwrap();
        assert_abs_diff_eq!(unit, 1.0, epsilon = 1e-12);
        assert!(calibrate_weber(-1.0, 10.0, UtilityKind::BernoulliIncome).is_err());
        assert!(calibrate_weber(1000.0, 0.0, UtilityKind::BernoulliDebt).is_err());
    }

    #[test]
    fn linear_is_identity() {
        let m = UtilityModel::linear();
        assert_eq!(linear_utility(5000.0, &m).unwrap(), 5000.0);
        assert_eq!(linear_utility(0.0, &m).unwrap(), 0.0);
        assert_eq!(m.utility(-1e12).unwrap(), -1e12);
    }

    #[test]
    fn wealthy_limit_is_linear() {
        let s = 1e9;
        let m = UtilityModel::income(s, s).unwrap();
        let u = m.utility(5000.0).unwrap();
        assert_relative_eq!(u, 5000.0, max_relative = 1e-4);
    }

    #[test]
    fn support_endpoints() {
        let m = UtilityModel::income(1.0, 200.0).unwrap();
        let (a, b) = utility_support(&m, -50.0, 50.0).unwrap();
        assert_abs_diff_eq!(a, -0.2877, epsilon = 1e-4);
        assert_abs_diff_eq!(b, 0.2231, epsilon = 1e-4);
        assert_eq!(
            utility_support(&UtilityModel::linear(), -4000.0, 0.0).unwrap(),
            (-4000.0, 0.0)
        );
        let student = UtilityModel::income(100.5, 300.0).unwrap();
        let (lo, hi) = utility_support(&student, -200.0, 200.0).unwrap();
        assert_abs_diff_eq!(lo, 100.5 * (100.0f64 / 300.0).ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 100.5 * (500.0f64 / 300.0).ln(), epsilon = 1e-12);
        assert!(utility_support(&m, 10.0, -10.0).is_err());
    }

    #[test]
    fn pushforward_of_point_mass() {
        let d = DiscreteDistribution::point_mass(0.0).unwrap();
        let u = pushforward(&d, &UtilityModel::income(3.0, 10.0).unwrap()).unwrap();
        assert_eq!(u.support(), &[(0.0, 1.0)]);
    }

    #[test]
    fn pushforward_names_offending_outcome() {
        let d = DiscreteDistribution::two_point(-500.0, 0.5, 10.0).unwrap();
        let err = pushforward(&d, &UtilityModel::income(1.0, 100.0).unwrap()).unwrap_err();
        assert_eq!(
            err,
            Error::BelowThreshold {
                value: -500.0,
                threshold: -99.0
            }
        );
    }

    #[test]
    fn power_law_identities() {
        assert_eq!(power_law_sensation(42.0, 1.0, 1.0).unwrap(), 42.0);
        assert_abs_diff_eq!(
            log_ratio_sensation(10.0, 1.0, DECIBEL_Q).unwrap(),
            10.0,
            epsilon = 1e-12
        );
        assert!(power_law_sensation(0.0, 1.0, 1.0).is_err());
        assert!(log_ratio_sensation(1.0, -1.0, 1.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn unit_change_invariance(s in 1.0f64..1e6, frac in -0.9f64..5.0, c in 1e-3f64..1e3, q in 0.1f64..200.0) {
            let delta = frac * s;
            let base = UtilityModel::income(q, s).unwrap().with_gamma(1e-9).unwrap();
            let scaled = UtilityModel::income(q, c * s).unwrap().with_gamma(1e-9).unwrap();
            let u1 = base.utility(delta).unwrap();
            let u2 = scaled.utility(c * delta).unwrap();
            prop_assert!((u1 - u2).abs() <= 1e-12 * u1.abs().max(1.0));
        }

        #[test]
        fn context_chaining(x in 1e-3f64..1e6, y in 1e-3f64..1e6, z in 1e-3f64..1e6, q in 0.1f64..200.0) {
            let direct = log_ratio_sensation(x, z, q).unwrap();
            let chained = log_ratio_sensation(x, y, q).unwrap() + log_ratio_sensation(y, z, q).unwrap();
            prop_assert!((direct - chained).abs() <= 1e-12 * q.max(1.0) * (1.0 + direct.abs()));
        }

        #[test]
        fn losses_hurt(s in 10.0f64..1e6, frac in 0.0f64..0.95, q in 0.1f64..200.0) {
            let m = UtilityModel::income(q, s).unwrap();
            let delta = -frac * s;
            let u = m.utility(delta).unwrap();
            if delta < 0.0 {
                prop_assert!(u < 0.0);
            } else {
                prop_assert_eq!(u, 0.0);
            }
        }

        #[test]
        fn debt_mirrors_income(d in 10.0f64..1e6, frac in -0.95f64..5.0, b in 0.1f64..200.0) {
            let x = frac * d;
            let debt = UtilityModel::debt(b, d).unwrap();
            let income = UtilityModel::income(b, d).unwrap();
            prop_assert!((debt.utility(x).unwrap() + income.utility(x).unwrap()).abs() <= 1e-12);
        }

        #[test]
        fn power_law_log_ratio(s0 in 1e-3f64..1e6, s1 in 1e-3f64..1e6, q in 0.1f64..3.0, c in 0.1f64..10.0) {
            let lhs = (power_law_sensation(s1, q, c).unwrap() / power_law_sensation(s0, q, c).unwrap()).ln();
            let rhs = log_ratio_sensation(s1, s0, q).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }

        #[test]
        fn pushforward_keeps_mass_and_order(
            raw in prop::collection::vec((-90i32..1000, 0.01f64..1.0), 1..40),
            q in 0.1f64..200.0,
        ) {
            let d = DiscreteDistribution::renormalized(raw.iter().map(|&(v, w)| (f64::from(v), w))).unwrap();
            let m = UtilityModel::income(q, 100.0).unwrap();
            let u = pushforward(&d, &m).unwrap();
            prop_assert_eq!(u.len(), d.len());
            prop_assert!((u.probabilities().sum::<f64>() - 1.0).abs() <= 1e-12);
            for ((_, po), (_, pu)) in d.support().iter().zip(u.support()) {
                prop_assert_eq!(po, pu);
            }
        }

        #[test]
        fn moments_scale_with_q(
            raw in prop::collection::vec((-90i32..1000, 0.01f64..1.0), 1..40),
            q in 0.1f64..200.0,
            c in 0.01f64..100.0,
        ) {
            let d = DiscreteDistribution::renormalized(raw.iter().map(|&(v, w)| (f64::from(v), w))).unwrap();
            let m = UtilityModel::income(q, 100.0).unwrap();
            let u1 = pushforward(&d, &m).unwrap();
            let u2 = pushforward(&d, &m.with_q(c * q).unwrap()).unwrap();
            let scale = 1e-12 * (1.0 + c * q * 10.0);
            prop_assert!((u2.mean() - c * u1.mean()).abs() <= scale);
            prop_assert!((u2.std() - c * u1.std()).abs() <= scale);
        }
    }
}
