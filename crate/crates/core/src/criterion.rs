//! The sum-of-bounds criterion of choice.
//!
//! Each decision is scored on its utility distribution by `LB + UB`, where
//! `LB = mean - a std` and `UB = mean + b std`. A bound that overshoots the
//! support of the distribution is replaced by the support extreme it passed.

use serde::{Deserialize, Serialize};

use crate::dist::{DecisionProblem, DiscreteDistribution};
use crate::error::{invalid, Error, Result};
use crate::utility::{pushforward, UtilityModel};

/// Relative tolerance under which two scores count as equal.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionMode {
    #[default]
    SumOfBounds,
    LowerOnly,
    UpperOnly,
    /// Twice the mean; plain expected-utility maximization.
    ExpectationOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsConfig {
    /// Multiplier of the standard deviation in the lower bound.
    pub caution: f64,
    /// Multiplier of the standard deviation in the upper bound.
    pub opportunity: f64,
    pub mode: CriterionMode,
    pub clip_to_support: bool,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self::k_sigma(1.0)
    }
}

impl BoundsConfig {
    /// Symmetric `k`-sigma bounds with clipping.
    pub fn k_sigma(k: f64) -> Self {
        Self {
            caution: k,
            opportunity: k,
            mode: CriterionMode::SumOfBounds,
            clip_to_support: true,
        }
    }

    pub fn with_mode(self, mode: CriterionMode) -> Self {
        Self { mode, ..self }
    }

    pub fn with_premiums(self, caution: f64, opportunity: f64) -> Self {
        Self {
            caution,
            opportunity,
            ..self
        }
    }

    pub fn without_clipping(self) -> Self {
        Self {
            clip_to_support: false,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("caution", self.caution), ("opportunity", self.opportunity)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} premium must be a nonnegative number, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsResult {
    pub mean: f64,
    pub std: f64,
    pub lb_raw: f64,
    pub ub_raw: f64,
    pub lb: f64,
    pub ub: f64,
    pub support_min: f64,
    pub support_max: f64,
    pub clipped_low: bool,
    pub clipped_high: bool,
}

impl BoundsResult {
    pub fn sum(&self) -> f64 {
        self.lb + self.ub
    }
}

/// Premium-adjusted bounds, then clipping of any bound that leaves the support.
pub fn bounds(dist: &DiscreteDistribution, cfg: &BoundsConfig) -> BoundsResult {
    let mean = dist.mean();
    let std = dist.std();
    let lb_raw = mean - cfg.caution * std;
    let ub_raw = mean + cfg.opportunity * std;
    let (support_min, support_max) = (dist.min_value(), dist.max_value());
    let clipped_low = cfg.clip_to_support && lb_raw < support_min;
    let clipped_high = cfg.clip_to_support && ub_raw > support_max;
    BoundsResult {
        mean,
        std,
        lb_raw,
        ub_raw,
        lb: if clipped_low { support_min } else { lb_raw },
        ub: if clipped_high { support_max } else { ub_raw },
        support_min,
        support_max,
        clipped_low,
        clipped_high,
    }
}

pub fn criterion_score(b: &BoundsResult, cfg: &BoundsConfig) -> f64 {
    match cfg.mode {
        CriterionMode::SumOfBounds => b.lb + b.ub,
        CriterionMode::LowerOnly => b.lb,
        CriterionMode::UpperOnly => b.ub,
        CriterionMode::ExpectationOnly => 2.0 * b.mean,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Prefer(usize),
    /// Every decision whose score ties the best one.
    Indifferent(Vec<usize>),
}

impl Verdict {
    pub fn preferred(&self) -> Option<usize> {
        match self {
            Verdict::Prefer(i) => Some(*i),
            Verdict::Indifferent(_) => None,
        }
    }
}

pub fn scores_tie(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs())
}

/// Argmax with ties resolved into an indifference set.
pub fn verdict_from_scores(scores: &[f64]) -> Verdict {
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let top: Vec<usize> = scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| scores_tie(s, best))
        .map(|(i, _)| i)
        .collect();
    match top.as_slice() {
        [only] => Verdict::Prefer(*only),
        _ => Verdict::Indifferent(top),
    }
}

/// Everything computed for one decision on the way to its score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionAnalysis {
    pub label: String,
    pub outcomes: DiscreteDistribution,
    pub utilities: DiscreteDistribution,
    pub bounds: BoundsResult,
    pub score: f64,
}

pub fn analyze_distribution(
    label: &str,
    outcomes: DiscreteDistribution,
    model: &UtilityModel,
    cfg: &BoundsConfig,
) -> Result<DecisionAnalysis> {
    let utilities = pushforward(&outcomes, model).map_err(|e| e.in_decision(label))?;
    let b = bounds(&utilities, cfg);
    Ok(DecisionAnalysis {
        label: label.to_string(),
        score: criterion_score(&b, cfg),
        outcomes,
        utilities,
        bounds: b,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preference {
    pub verdict: Verdict,
    pub scores: Vec<f64>,
    pub decisions: Vec<DecisionAnalysis>,
}

impl Preference {
    pub fn bounds(&self) -> impl Iterator<Item = &BoundsResult> {
        self.decisions.iter().map(|d| &d.bounds)
    }

    pub fn preferred_label(&self) -> Option<&str> {
        self.verdict.preferred().map(|i| self.decisions[i].label.as_str())
    }
}

/// Scores every decision without requiring a comparison partner.
pub fn analyze(
    labelled: Vec<(String, DiscreteDistribution)>,
    model: &UtilityModel,
    cfg: &BoundsConfig,
) -> Result<Vec<DecisionAnalysis>> {
    model.validate()?;
    cfg.validate()?;
    labelled
        .into_iter()
        .map(|(label, d)| analyze_distribution(&label, d, model, cfg))
        .collect()
}

/// Ranks already-built outcome distributions.
pub fn decide_distributions(
    labelled: Vec<(String, DiscreteDistribution)>,
    model: &UtilityModel,
    cfg: &BoundsConfig,
) -> Result<Preference> {
    if labelled.len() < 2 {
        return Err(Error::TooFewDecisions {
            required: 2,
            found: labelled.len(),
        });
    }
    let decisions = analyze(labelled, model, cfg)?;
    let scores: Vec<f64> = decisions.iter().map(|d| d.score).collect();
    Ok(Preference {
        verdict: verdict_from_scores(&scores),
        scores,
        decisions,
    })
}

/// Full pipeline: joint tables, event marginalization, utilities, bounds, verdict.
pub fn decide(problem: &DecisionProblem, model: &UtilityModel, cfg: &BoundsConfig) -> Result<Preference> {
    let dists = problem.outcome_distributions()?;
    decide_distributions(problem.labels().map(str::to_string).zip(dists).collect(), model, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::binomial_outcome_dist;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn labelled(ds: Vec<DiscreteDistribution>) -> Vec<(String, DiscreteDistribution)> {
        ds.into_iter()
            .enumerate()
            .map(|(i, d)| (format!("D{}", i + 1), d))
            .collect()
    }

    #[test]
    fn point_mass_bounds() {
        let b = bounds(
            &DiscreteDistribution::point_mass(3000.0).unwrap(),
            &BoundsConfig::default(),
        );
        assert_eq!((b.lb, b.ub), (3000.0, 3000.0));
        assert_eq!(b.sum(), 6000.0);
        assert!(!b.clipped_low && !b.clipped_high);
    }

    #[test]
    fn loss_gamble_clips_low() {
        let d = DiscreteDistribution::two_point(-4000.0, 0.8, 0.0).unwrap();
        let b = bounds(&d, &BoundsConfig::default());
        assert_abs_diff_eq!(b.mean, -3200.0, epsilon = 1e-9);
        assert_abs_diff_eq!(b.std, 1600.0, epsilon = 1e-9);
        assert_abs_diff_eq!(b.lb_raw, -4800.0, epsilon = 1e-9);
        assert!(b.clipped_low && !b.clipped_high);
        assert_eq!(b.lb, -4000.0);
        assert_abs_diff_eq!(b.ub, -1600.0, epsilon = 1e-9);
        assert_abs_diff_eq!(b.sum(), -5600.0, epsilon = 1e-9);
    }

    #[test]
    fn long_shot_clips_low_to_zero() {
        let d = DiscreteDistribution::two_point(5000.0, 0.001, 0.0).unwrap();
        let b = bounds(&d, &BoundsConfig::default());
        assert_abs_diff_eq!(b.std, 5000.0 * (0.001f64 * 0.999).sqrt(), epsilon = 1e-9);
        assert_eq!(b.lb, 0.0);
        let score = criterion_score(&b, &BoundsConfig::default());
        assert!((score - 163.07).abs() < 0.05);
    }

    #[test]
    fn double_overshoot_clips_both() {
        let d = DiscreteDistribution::two_point(10.0, 0.5, 0.0).unwrap();
        let b = bounds(&d, &BoundsConfig::k_sigma(3.0));
        assert!(b.clipped_low && b.clipped_high);
        assert_eq!(b.sum(), 10.0);
        let raw = bounds(&d, &BoundsConfig::k_sigma(3.0).without_clipping());
        assert_eq!((raw.lb, raw.ub), (raw.lb_raw, raw.ub_raw));
    }

    #[test]
    fn premiums_apply_before_clipping() {
        let d = DiscreteDistribution::two_point(-4000.0, 0.8, 0.0).unwrap();
        // with a small caution premium the lower bound stays inside the support
        let cfg = BoundsConfig::default().with_premiums(0.5, 1.0);
        let b = bounds(&d, &cfg);
        assert!(!b.clipped_low);
        assert_abs_diff_eq!(b.lb, -4000.0, epsilon = 1e-9);
        let cfg = BoundsConfig::default().with_premiums(0.25, 1.0);
        let b = bounds(&d, &cfg);
        assert!(!b.clipped_low);
        assert_abs_diff_eq!(b.lb, -3600.0, epsilon = 1e-9);
        assert!(BoundsConfig::default().with_premiums(-1.0, 1.0).validate().is_err());
    }

    #[test]
    fn modes() {
        let d = DiscreteDistribution::new([(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        let cfg = BoundsConfig::k_sigma(0.5);
        let b = bounds(&d, &cfg);
        assert_eq!(
            criterion_score(&b, &cfg),
            criterion_score(&b, &cfg.with_mode(CriterionMode::ExpectationOnly))
        );
        assert_eq!(criterion_score(&b, &cfg.with_mode(CriterionMode::LowerOnly)), -0.5);
        assert_eq!(criterion_score(&b, &cfg.with_mode(CriterionMode::UpperOnly)), 0.5);
    }

    #[test]
    fn identical_decisions_are_indifferent() {
        let d = binomial_outcome_dist(10, 0.3, 2.0).unwrap();
        let pref = decide_distributions(
            labelled(vec![d.clone(), d]),
            &UtilityModel::linear(),
            &BoundsConfig::default(),
        )
        .unwrap();
        assert_eq!(pref.verdict, Verdict::Indifferent(vec![0, 1]));
    }

    #[test]
    fn sure_loss_beats_gamble() {
        let gamble = DiscreteDistribution::two_point(-4000.0, 0.8, 0.0).unwrap();
        let sure = DiscreteDistribution::point_mass(-3000.0).unwrap();
        let pref = decide_distributions(
            labelled(vec![gamble, sure]),
            &UtilityModel::linear(),
            &BoundsConfig::default(),
        )
        .unwrap();
        assert_eq!(pref.verdict, Verdict::Prefer(0));
        assert_abs_diff_eq!(pref.scores[0], -5600.0, epsilon = 1e-9);
        assert_eq!(pref.scores[1], -6000.0);
    }

    #[test]
    fn errors_carry_decision_context() {
        let ok = DiscreteDistribution::point_mass(0.0).unwrap();
        let bad = DiscreteDistribution::point_mass(-500.0).unwrap();
        let err = decide_distributions(
            labelled(vec![ok.clone(), bad]),
            &UtilityModel::income(1.0, 100.0).unwrap(),
            &BoundsConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(&err, Error::InDecision { decision, .. } if decision == "D2"));
        assert!(err.is_domain_error());
        assert_eq!(
            decide_distributions(labelled(vec![ok]), &UtilityModel::linear(), &BoundsConfig::default()).unwrap_err(),
            Error::TooFewDecisions { required: 2, found: 1 }
        );
    }

    #[test]
    fn three_way_tie_reports_full_set() {
        assert_eq!(
            verdict_from_scores(&[1.0, 3.0, 3.0, 3.0 * (1.0 + 1e-12)]),
            Verdict::Indifferent(vec![1, 2, 3])
        );
        assert_eq!(verdict_from_scores(&[1.0, 3.0, 2.0]), Verdict::Prefer(1));
    }

    fn arb_dist() -> impl Strategy<Value = DiscreteDistribution> {
        prop::collection::vec((-80i32..400, 0.01f64..1.0), 1..8).prop_map(|raw| {
            DiscreteDistribution::renormalized(raw.into_iter().map(|(v, w)| (f64::from(v), w))).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn verdict_invariant_under_weber_constant(
            ds in prop::collection::vec(arb_dist(), 2..5),
            q in 0.1f64..10.0,
            c in 0.01f64..100.0,
        ) {
            let cfg = BoundsConfig::default();
            let m1 = UtilityModel::income(q, 100.0).unwrap();
            let m2 = m1.with_q(c * q).unwrap();
            let p1 = decide_distributions(labelled(ds.clone()), &m1, &cfg).unwrap();
            let p2 = decide_distributions(labelled(ds), &m2, &cfg).unwrap();
            for (s1, s2) in p1.scores.iter().zip(&p2.scores) {
                prop_assert!((s2 - c * s1).abs() <= 1e-9 * (1.0 + (c * s1).abs()));
            }
            prop_assert_eq!(p1.verdict, p2.verdict);
        }

        #[test]
        fn clip_coherence(d in arb_dist(), a in 0.0f64..3.0, b in 0.0f64..3.0) {
            let cfg = BoundsConfig::default().with_premiums(a, b);
            let r = bounds(&d, &cfg);
            prop_assert!(r.lb <= r.ub);
            if r.clipped_low { prop_assert_eq!(r.lb, r.support_min); }
            if r.clipped_high { prop_assert_eq!(r.ub, r.support_max); }
            if !r.clipped_low && !r.clipped_high {
                let expected = 2.0 * r.mean + (b - a) * r.std;
                prop_assert!((criterion_score(&r, &cfg) - expected).abs() <= 1e-12 * (1.0 + expected.abs() + r.std));
            }
        }

        #[test]
        fn dominance_is_respected(d1 in arb_dist(), d2 in arb_dist()) {
            let cfg = BoundsConfig::default();
            let (b1, b2) = (bounds(&d1, &cfg), bounds(&d2, &cfg));
            let pref = decide_distributions(labelled(vec![d1, d2]), &UtilityModel::linear(), &cfg).unwrap();
            let strict = b1.lb > b2.lb || b1.ub > b2.ub;
            if b1.lb >= b2.lb && b1.ub >= b2.ub && strict && !scores_tie(b1.sum(), b2.sum()) {
                prop_assert_eq!(pref.verdict, Verdict::Prefer(0));
            }
        }

        #[test]
        fn trade_off_follows_gain_against_loss(d1 in arb_dist(), d2 in arb_dist()) {
            let cfg = BoundsConfig::default();
            let (b1, b2) = (bounds(&d1, &cfg), bounds(&d2, &cfg));
            let pref = decide_distributions(labelled(vec![d1, d2]), &UtilityModel::linear(), &cfg).unwrap();
            // D1 gives up some lower bound to gain upper bound, or the reverse
            let ub_gain = b1.ub - b2.ub;
            let lb_loss = b2.lb - b1.lb;
            if !scores_tie(b1.sum(), b2.sum()) {
                if ub_gain > lb_loss {
                    prop_assert_eq!(pref.verdict, Verdict::Prefer(0));
                } else {
                    prop_assert_eq!(pref.verdict, Verdict::Prefer(1));
                }
            }
        }

        #[test]
        fn expectation_mode_is_mean_argmax(ds in prop::collection::vec(arb_dist(), 2..5), q in 0.1f64..10.0) {
            let cfg = BoundsConfig::default().with_mode(CriterionMode::ExpectationOnly);
            let model = UtilityModel::income(q, 100.0).unwrap();
            let pref = decide_distributions(labelled(ds.clone()), &model, &cfg).unwrap();
            let means: Vec<f64> = ds.iter().map(|d| pushforward(d, &model).unwrap().mean()).collect();
            prop_assert_eq!(pref.verdict, verdict_from_scores(&means));
        }
    }
}
