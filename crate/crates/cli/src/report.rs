//! Report documents and their human and machine renderings.
//!
//! Numbers are rounded to [`SIGNIFICANT_DIGITS`] when a document is built,
//! so the machine form (TOML) parses back to an identical document.

use std::fmt::Write as _;

use bdt_core::criterion::DecisionAnalysis;
use bdt_core::fairness::{ClipRegime, FairnessResult};
use bdt_core::scenarios::{Check, ScenarioReport, Value};
use bdt_core::{BoundsConfig, BoundsResult, DiscreteDistribution, UtilityKind, UtilityModel, Verdict};
use serde::{Deserialize, Serialize};

pub const SIGNIFICANT_DIGITS: usize = 6;

/// `x` rounded to `digits` significant digits; non-finite values pass through.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let digits = digits.max(1);
    format!("{:.*e}", digits - 1, x)
        .parse()
        .expect("formatted float parses")
}

fn r(x: f64) -> f64 {
    round_sig(x, SIGNIFICANT_DIGITS)
}

/// Shortest text that reads back as `round_sig(x, digits)`.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    let x = round_sig(x, digits);
    if x != 0.0 && x.is_finite() && !(1e-4..1e9).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    pub utility: UtilityModel,
    pub criterion: BoundsConfig,
    pub decisions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    /// Set when one decision scores strictly best.
    pub preferred: Option<String>,
    /// All decisions tied for the best score.
    pub tied: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionReport {
    pub label: String,
    /// `[outcome, probability]` pairs in ascending outcome order.
    pub outcomes: Vec<[f64; 2]>,
    pub outcome_mean: f64,
    pub outcome_std: f64,
    pub bounds: BoundsResult,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub warnings: Vec<String>,
    pub inputs: InputEcho,
    pub verdict: Option<VerdictReport>,
    pub decisions: Vec<DecisionReport>,
}

fn rounded_dist(d: &DiscreteDistribution) -> Vec<[f64; 2]> {
    d.support().iter().map(|&(v, p)| [r(v), r(p)]).collect()
}

fn rounded_bounds(b: &BoundsResult) -> BoundsResult {
    BoundsResult {
        mean: r(b.mean),
        std: r(b.std),
        lb_raw: r(b.lb_raw),
        ub_raw: r(b.ub_raw),
        lb: r(b.lb),
        ub: r(b.ub),
        support_min: r(b.support_min),
        support_max: r(b.support_max),
        ..*b
    }
}

fn rounded_model(m: &UtilityModel) -> UtilityModel {
    UtilityModel {
        q: r(m.q),
        reference: r(m.reference),
        gamma: r(m.gamma),
        ..*m
    }
}

impl ReportDocument {
    pub fn new(analyses: &[DecisionAnalysis], model: &UtilityModel, config: &BoundsConfig) -> Self {
        let decisions: Vec<DecisionReport> = analyses
            .iter()
            .map(|a| DecisionReport {
                label: a.label.clone(),
                outcomes: rounded_dist(&a.outcomes),
                outcome_mean: r(a.outcomes.mean()),
                outcome_std: r(a.outcomes.std()),
                bounds: rounded_bounds(&a.bounds),
                score: r(a.score),
            })
            .collect();
        let (warnings, verdict) = if analyses.len() < 2 {
            (vec!["single decision".to_string()], None)
        } else {
            let scores: Vec<f64> = analyses.iter().map(|a| a.score).collect();
            let verdict = match bdt_core::criterion::verdict_from_scores(&scores) {
                Verdict::Prefer(i) => VerdictReport {
                    preferred: Some(analyses[i].label.clone()),
                    tied: Vec::new(),
                },
                Verdict::Indifferent(ix) => VerdictReport {
                    preferred: None,
                    tied: ix.into_iter().map(|i| analyses[i].label.clone()).collect(),
                },
            };
            (Vec::new(), Some(verdict))
        };
        Self {
            warnings,
            inputs: InputEcho {
                utility: rounded_model(model),
                criterion: BoundsConfig {
                    caution: r(config.caution),
                    opportunity: r(config.opportunity),
                    ..*config
                },
                decisions: analyses.iter().map(|a| a.label.clone()).collect(),
            },
            verdict,
            decisions,
        }
    }

    pub fn to_machine(&self) -> String {
        toml::to_string(self).expect("report serializes")
    }

    pub fn from_machine(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_human(&self, digits: usize) -> String {
        let f = |x: f64| fmt_sig(x, digits);
        let mut out = String::new();
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        let m = &self.inputs.utility;
        let _ = writeln!(out, "utility: {}", describe_model(m, digits));
        let c = &self.inputs.criterion;
        let _ = writeln!(
            out,
            "criterion: {:?}, caution {}, opportunity {}, clipping {}",
            c.mode,
            f(c.caution),
            f(c.opportunity),
            if c.clip_to_support { "on" } else { "off" }
        );
        for d in &self.decisions {
            let b = &d.bounds;
            let _ = writeln!(out, "\n{}", d.label);
            let _ = writeln!(out, "  outcome mean {}, std {}", f(d.outcome_mean), f(d.outcome_std));
            if d.outcomes.len() <= 12 {
                let atoms: Vec<String> = d
                    .outcomes
                    .iter()
                    .map(|[v, p]| format!("{}: {}", f(*v), f(*p)))
                    .collect();
                let _ = writeln!(out, "  outcomes {{{}}}", atoms.join(", "));
            } else {
                let _ = writeln!(out, "  outcomes: {} atoms", d.outcomes.len());
            }
            let _ = writeln!(out, "  utility mean {}, std {}", f(b.mean), f(b.std));
            let _ = writeln!(out, "  support [{}, {}]", f(b.support_min), f(b.support_max));
            let clip = |hit: bool| if hit { " (clipped)" } else { "" };
            let _ = writeln!(out, "  LB {} raw {}{}", f(b.lb), f(b.lb_raw), clip(b.clipped_low));
            let _ = writeln!(out, "  UB {} raw {}{}", f(b.ub), f(b.ub_raw), clip(b.clipped_high));
            let _ = writeln!(out, "  score {}", f(d.score));
        }
        match &self.verdict {
            Some(VerdictReport {
                preferred: Some(label), ..
            }) => {
                let _ = writeln!(out, "\nverdict: prefer {label}");
            }
            Some(v) => {
                let _ = writeln!(out, "\nverdict: indifferent between {}", v.tied.join(", "));
            }
            None => {}
        }
        out
    }
}

pub fn describe_model(m: &UtilityModel, digits: usize) -> String {
    let f = |x: f64| fmt_sig(x, digits);
    match m.kind {
        UtilityKind::Linear => "linear".to_string(),
        UtilityKind::BernoulliIncome => {
            format!("income, q {}, wealth {}, gamma {}", f(m.q), f(m.reference), f(m.gamma))
        }
        UtilityKind::BernoulliDebt => format!("debt, b {}, debt {}, gamma {}", f(m.q), f(m.reference), f(m.gamma)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootReport {
    pub p: f64,
    pub regime: ClipRegime,
    /// Bounds of the uncertain branch at `p`, in utiles.
    pub lb: f64,
    pub ub: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairReport {
    pub certain: f64,
    pub uncertain: f64,
    pub utility: UtilityModel,
    pub criterion: BoundsConfig,
    pub certain_score: f64,
    pub roots: Vec<RootReport>,
}

impl FairReport {
    pub fn new(result: &FairnessResult, model: &UtilityModel, config: &BoundsConfig) -> Self {
        Self {
            certain: r(result.certain),
            uncertain: r(result.uncertain),
            utility: rounded_model(model),
            criterion: BoundsConfig {
                caution: r(config.caution),
                opportunity: r(config.opportunity),
                ..*config
            },
            certain_score: r(result.certain_score),
            roots: result
                .roots
                .iter()
                .map(|root| RootReport {
                    p: r(root.p),
                    regime: root.regime,
                    lb: r(root.interval.0),
                    ub: r(root.interval.1),
                })
                .collect(),
        }
    }

    pub fn to_machine(&self) -> String {
        toml::to_string(self).expect("report serializes")
    }

    pub fn to_human(&self, digits: usize) -> String {
        let f = |x: f64| fmt_sig(x, digits);
        let mut out = format!(
            "certain {} against uncertain {}, {}\n",
            f(self.certain),
            f(self.uncertain),
            describe_model(&self.utility, digits)
        );
        for root in &self.roots {
            let _ = writeln!(
                out,
                "p_fair {}  clipping {:?}  interval ({}, {})",
                f(root.p),
                root.regime,
                f(root.lb),
                f(root.ub)
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDocument {
    pub passed: bool,
    pub scenarios: Vec<ScenarioReport>,
}

fn rounded_value(v: &Value) -> Value {
    match v {
        Value::Number(x) => Value::Number(r(*x)),
        other => other.clone(),
    }
}

impl ScenarioDocument {
    pub fn new(reports: Vec<ScenarioReport>) -> Self {
        let scenarios: Vec<ScenarioReport> = reports
            .into_iter()
            .map(|s| ScenarioReport {
                checks: s
                    .checks
                    .iter()
                    .map(|c| Check {
                        expected: rounded_value(&c.expected),
                        computed: rounded_value(&c.computed),
                        tolerance: r(c.tolerance),
                        ..c.clone()
                    })
                    .collect(),
                ..s
            })
            .collect();
        Self {
            passed: scenarios.iter().all(|s| s.passed),
            scenarios,
        }
    }

    pub fn to_machine(&self) -> String {
        toml::to_string(self).expect("report serializes")
    }

    pub fn from_machine(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_human(&self, digits: usize, verbose: bool) -> String {
        let show = |v: &Value| match v {
            Value::Number(x) => fmt_sig(*x, digits),
            Value::Choice(c) => c.clone(),
        };
        let mut out = String::new();
        for s in &self.scenarios {
            let _ = writeln!(
                out,
                "{} {}  {}",
                if s.passed { "PASS" } else { "FAIL" },
                s.id,
                s.description
            );
            for c in &s.checks {
                if verbose || !c.pass {
                    let _ = writeln!(
                        out,
                        "    {} {}: computed {}, expected {}{}  [{}]",
                        if c.pass { "ok  " } else { "MISS" },
                        c.quantity,
                        show(&c.computed),
                        show(&c.expected),
                        match c.expected {
                            Value::Number(_) => format!(" ± {}", fmt_sig(c.tolerance, digits)),
                            Value::Choice(_) => String::new(),
                        },
                        c.source
                    );
                }
            }
        }
        let failed = self.scenarios.iter().filter(|s| !s.passed).count();
        let _ = writeln!(
            out,
            "overall: {} ({} of {} scenarios passed)",
            if self.passed { "PASS" } else { "FAIL" },
            self.scenarios.len() - failed,
            self.scenarios.len()
        );
        out
    }
}
