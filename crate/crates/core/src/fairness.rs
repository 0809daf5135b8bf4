//! Fair probabilities of certainty bets.
//!
//! A certainty bet pits an uncertain branch, paying `O_u` with probability
//! `p` and nothing otherwise, against a sure `O_c`. The fair probability is
//! the `p` at which both branches earn the same criterion score.

use serde::{Deserialize, Serialize};

use crate::criterion::{bounds, criterion_score, decide_distributions, BoundsConfig, BoundsResult, Preference};
use crate::dist::{check_probability, DiscreteDistribution};
use crate::error::{invalid, Error, Result};
use crate::utility::UtilityModel;

/// Interior scan points placed before bisection.
pub const SCAN_POINTS: usize = 10_001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertaintyBet {
    pub uncertain: f64,
    pub p: f64,
    pub certain: f64,
}

impl CertaintyBet {
    pub fn new(uncertain: f64, p: f64, certain: f64) -> Result<Self> {
        check_outcomes(certain, uncertain)?;
        check_probability(p)?;
        Ok(Self { uncertain, p, certain })
    }

    pub fn uncertain_distribution(&self) -> Result<DiscreteDistribution> {
        DiscreteDistribution::two_point(self.uncertain, self.p, 0.0)
    }

    pub fn certain_distribution(&self) -> Result<DiscreteDistribution> {
        DiscreteDistribution::point_mass(self.certain)
    }

    /// `O_c / O_u`, always in `(0, 1]`.
    pub fn ratio(&self) -> f64 {
        self.certain / self.uncertain
    }
}

fn check_outcomes(certain: f64, uncertain: f64) -> Result<()> {
    if !(certain.is_finite() && uncertain.is_finite()) || certain == 0.0 || uncertain == 0.0 {
        return Err(invalid("certainty bet outcomes must be finite and nonzero"));
    }
    if certain.signum() != uncertain.signum() {
        return Err(invalid("certain and uncertain outcomes must share a sign"));
    }
    if certain.abs() > uncertain.abs() {
        return Err(invalid("the certain outcome may not exceed the uncertain one in size"));
    }
    Ok(())
}

/// Which bounds of the uncertain branch were replaced by support extremes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClipRegime {
    None,
    Low,
    High,
    Both,
}

impl ClipRegime {
    fn of(b: &BoundsResult) -> Self {
        match (b.clipped_low, b.clipped_high) {
            (false, false) => ClipRegime::None,
            (true, false) => ClipRegime::Low,
            (false, true) => ClipRegime::High,
            (true, true) => ClipRegime::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FairRoot {
    pub p: f64,
    pub regime: ClipRegime,
    /// `(lb, ub)` of the uncertain branch at `p`, in utiles.
    pub interval: (f64, f64),
    /// Objective value left at `p`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessResult {
    pub certain: f64,
    pub uncertain: f64,
    /// Score of the sure branch, `2 u(O_c)` under sum-of-bounds.
    pub certain_score: f64,
    /// Ascending in `p`.
    pub roots: Vec<FairRoot>,
}

impl FairnessResult {
    pub fn p_fair(&self) -> f64 {
        self.roots[0].p
    }
}

/// Score of the uncertain branch at `p` minus the score of the sure branch.
pub fn fairness_objective(
    certain: f64,
    uncertain: f64,
    p: f64,
    model: &UtilityModel,
    cfg: &BoundsConfig,
) -> Result<f64> {
    let (score, _) = uncertain_score(uncertain, p, model, cfg)?;
    Ok(score - certain_score(certain, model, cfg)?)
}

fn certain_score(certain: f64, model: &UtilityModel, cfg: &BoundsConfig) -> Result<f64> {
    let u = DiscreteDistribution::point_mass(model.utility(certain)?)?;
    Ok(criterion_score(&bounds(&u, cfg), cfg))
}

fn uncertain_score(uncertain: f64, p: f64, model: &UtilityModel, cfg: &BoundsConfig) -> Result<(f64, BoundsResult)> {
    let u = DiscreteDistribution::two_point(model.utility(uncertain)?, p, model.utility(0.0)?)?;
    let b = bounds(&u, cfg);
    Ok((criterion_score(&b, cfg), b))
}

/// Every `p` in `[0, 1]` at which the two branches score equally.
///
/// A dense scan finds sign changes of the objective, each of which is
/// bisected until the bracket can no longer shrink.
pub fn fair_probability(
    certain: f64,
    uncertain: f64,
    model: &UtilityModel,
    cfg: &BoundsConfig,
) -> Result<FairnessResult> {
    check_outcomes(certain, uncertain)?;
    model.validate()?;
    cfg.validate()?;
    let target = certain_score(certain, model, cfg)?;
    let f = |p: f64| uncertain_score(uncertain, p, model, cfg).map(|(s, _)| s - target);

    let n = SCAN_POINTS;
    let grid = std::iter::once(0.0)
        .chain((1..=n).map(|i| i as f64 / (n + 1) as f64))
        .chain(std::iter::once(1.0));

    let mut roots = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    let mut zero_since_last = false;
    for p in grid {
        let v = f(p)?;
        if v == 0.0 {
            roots.push(p);
            zero_since_last = true;
            continue;
        }
        if let Some((lp, lv)) = last {
            if !zero_since_last && lv.signum() != v.signum() {
                roots.push(bisect(&f, lp, lv, p)?);
            }
        }
        last = Some((p, v));
        zero_since_last = false;
    }
    if roots.is_empty() {
        return Err(Error::NoFairProbability { certain, uncertain });
    }
    let roots = roots
        .into_iter()
        .map(|p| {
            let (score, b) = uncertain_score(uncertain, p, model, cfg)?;
            Ok(FairRoot {
                p,
                regime: ClipRegime::of(&b),
                interval: (b.lb, b.ub),
                residual: score - target,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FairnessResult {
        certain,
        uncertain,
        certain_score: target,
        roots,
    })
}

fn bisect<F>(f: &F, mut lo: f64, lo_val: f64, mut hi: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let lo_sign = lo_val.signum();
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid)?;
        if v == 0.0 {
            return Ok(mid);
        }
        if v.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // return whichever end of the collapsed bracket fits better
    Ok(if f(lo)?.abs() <= f(hi)?.abs() { lo } else { hi })
}

/// `(lb, ub)` of the uncertain branch at the first fair probability.
///
/// Under linear utility these are money amounts, e.g. `(0, 2 O_c)` for a
/// small positive sure thing.
pub fn fair_interval(result: &FairnessResult) -> (f64, f64) {
    result.roots[0].interval
}

/// Published closed forms of the fair interval under linear utility, k = 1.
pub fn linear_fair_interval(certain: f64, uncertain: f64) -> (f64, f64) {
    if uncertain > 0.0 {
        if certain <= uncertain / 2.0 {
            (0.0, 2.0 * certain)
        } else {
            (2.0 * certain - uncertain, uncertain)
        }
    } else if certain >= uncertain / 2.0 {
        (2.0 * certain, 0.0)
    } else {
        (uncertain, 2.0 * certain - uncertain)
    }
}

/// Fair probabilities for linear utility and symmetric `k`-sigma bounds,
/// solved analytically per clipping regime. `ratio` is `O_c / O_u`.
pub fn linear_fair_probability(ratio: f64, k: f64) -> Vec<f64> {
    let k2 = k * k;
    // lower bound clips at p < k²/(1+k²), upper bound at p > 1/(1+k²)
    let low_edge = k2 / (1.0 + k2);
    let high_edge = 1.0 / (1.0 + k2);
    let low_clip_only = |p: f64| p < low_edge && p <= high_edge;
    let high_clip_only = |p: f64| p > high_edge && p >= low_edge;

    let low_branch = |r: f64| -> Vec<f64> {
        // (1 + k²) p² - (4r + k²) p + 4r² = 0
        let (a, b, c) = (1.0 + k2, -(4.0 * r + k2), 4.0 * r * r);
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return Vec::new();
        }
        let s = disc.sqrt();
        vec![(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)]
    };

    let mut out = Vec::new();
    for p in low_branch(ratio) {
        if (0.0..=1.0).contains(&p) && low_clip_only(p) && 2.0 * ratio - p >= 0.0 {
            out.push(p);
        }
    }
    for q in low_branch(1.0 - ratio) {
        let p = 1.0 - q;
        if (0.0..=1.0).contains(&p) && high_clip_only(p) && 2.0 * (1.0 - ratio) - q >= 0.0 {
            out.push(p);
        }
    }
    if ratio >= low_edge && ratio <= high_edge {
        out.push(ratio);
    }
    if k2 > 1.0 && ratio == 0.5 {
        // both bounds clip on the whole middle band and every p there is fair
        out.push(high_edge);
    }
    if ratio >= 1.0 {
        out.push(1.0);
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    out
}

/// Fair probability when only expectations count: `O_c / O_u`.
pub fn expectation_fair_probability(certain: f64, uncertain: f64) -> Result<f64> {
    if uncertain == 0.0 || !uncertain.is_finite() || !certain.is_finite() {
        return Err(invalid("uncertain outcome must be finite and nonzero"));
    }
    Ok(certain / uncertain)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub ratio: f64,
    pub certain: f64,
    /// `None` where the solver found no root.
    pub p_fair: Option<f64>,
    pub root_count: usize,
}

/// Fair probability over a grid of ratios `O_c / O_u`.
///
/// Where several roots exist, the one closest to the previous point's choice
/// is kept, starting from the linear closed form.
pub fn fairness_curve(
    uncertain: f64,
    model: &UtilityModel,
    cfg: &BoundsConfig,
    grid: &[f64],
) -> Result<Vec<CurvePoint>> {
    for &r in grid {
        if !(r > 0.0 && r <= 1.0) {
            return Err(invalid(format!("curve ratios must lie in (0, 1], got {r}")));
        }
    }
    let solved: Vec<(f64, Option<Vec<f64>>)> = grid
        .iter()
        .map(|&r| {
            let certain = r * uncertain;
            match fair_probability(certain, uncertain, model, cfg) {
                Ok(res) => Ok((certain, Some(res.roots.iter().map(|x| x.p).collect()))),
                Err(e) if e.is_domain_error() => Err(e),
                Err(Error::NoFairProbability { .. }) => Ok((certain, None)),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;

    let mut previous = grid
        .first()
        .and_then(|&r| linear_fair_probability(r, cfg.caution).first().copied())
        .unwrap_or(0.5);
    Ok(grid
        .iter()
        .zip(solved)
        .map(|(&ratio, (certain, roots))| {
            let (p_fair, root_count) = match roots {
                Some(roots) => {
                    let chosen = roots
                        .iter()
                        .copied()
                        .min_by(|a, b| (a - previous).abs().total_cmp(&(b - previous).abs()))
                        .expect("solver returns at least one root");
                    previous = chosen;
                    (Some(chosen), roots.len())
                }
                None => (None, 0),
            };
            CurvePoint {
                ratio,
                certain,
                p_fair,
                root_count,
            }
        })
        .collect())
}

/// `n` evenly spaced ratios ending at 1: `1/n, 2/n, .., 1`.
pub fn ratio_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 / n as f64).collect()
}

/// The ratio `O_c / O_u` whose fair probability is exactly one half.
pub fn symmetry_ratio(uncertain: f64, model: &UtilityModel, cfg: &BoundsConfig) -> Result<f64> {
    let (score, _) = uncertain_score(uncertain, 0.5, model, cfg)?;
    let sure = DiscreteDistribution::point_mass(1.0)?;
    // the sure branch scores a fixed multiple of its utility
    let per_utile = criterion_score(&bounds(&sure, cfg), cfg);
    if per_utile == 0.0 {
        return Err(invalid("criterion ignores sure outcomes; no symmetry point"));
    }
    Ok(model.inverse(score / per_utile)? / uncertain)
}

/// Which side of the interval decides a certainty bet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSide {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KtPrediction {
    pub bet: CertaintyBet,
    /// Fair probability nearest the offered `p`.
    pub p_fair: f64,
    /// Bound with the larger change between the uncertain and the sure branch.
    pub dominating: BoundSide,
    /// Decision 0 is the uncertain branch, decision 1 the sure one.
    pub preference: Preference,
}

pub fn predict_kt_bet(bet: &CertaintyBet, model: &UtilityModel, cfg: &BoundsConfig) -> Result<KtPrediction> {
    let fair = fair_probability(bet.certain, bet.uncertain, model, cfg)?;
    let p_fair = fair
        .roots
        .iter()
        .map(|r| r.p)
        .min_by(|a, b| (a - bet.p).abs().total_cmp(&(b - bet.p).abs()))
        .expect("at least one root");
    let preference = decide_distributions(
        vec![
            ("uncertain".to_string(), bet.uncertain_distribution()?),
            ("certain".to_string(), bet.certain_distribution()?),
        ],
        model,
        cfg,
    )?;
    let (bu, bc) = (&preference.decisions[0].bounds, &preference.decisions[1].bounds);
    let dominating = if (bu.ub - bc.ub).abs() >= (bu.lb - bc.lb).abs() {
        BoundSide::Upper
    } else {
        BoundSide::Lower
    };
    Ok(KtPrediction {
        bet: *bet,
        p_fair,
        dominating,
        preference,
    })
}

/// Gains (`Plus`, parameter gamma) or losses (`Minus`, parameter delta).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbabilityWeighting {
    Plus,
    Minus,
}

/// Probability weight `p^g / (p^g + (1 - p)^(1/g))`.
///
/// The same form serves gains and losses; only the parameter differs.
pub fn kt_weight(p: f64, param: f64, _sign: ProbabilityWeighting) -> Result<f64> {
    check_probability(p)?;
    if !(param > 0.0 && param.is_finite()) {
        return Err(invalid(format!("weighting parameter must be positive, got {param}")));
    }
    if param == 1.0 {
        return Ok(p);
    }
    let num = p.powf(param);
    Ok(num / (num + (1.0 - p).powf(1.0 / param)))
}

/// Two-part value function: `x^alpha` for gains, `-lambda (-x)^beta` for losses.
pub fn kt_value(x: f64, alpha: f64, beta: f64, lambda: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0 && beta > 0.0 && beta <= 1.0) {
        return Err(invalid("value exponents must lie in (0, 1]"));
    }
    if !(lambda > 0.0) {
        return Err(invalid("loss aversion must be positive"));
    }
    Ok(if x >= 0.0 {
        x.powf(alpha)
    } else {
        -lambda * (-x).powf(beta)
    })
}
