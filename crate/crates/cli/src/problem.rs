//! Problem files: a TOML document describing decisions, a utility model and
//! the criterion settings.
//!
//! ```toml
//! [utility]
//! kind = "bernoulli_income"
//! q = 100
//! reference = 200
//!
//! [criterion]
//! k = 1
//!
//! [[decisions]]
//! label = "D1"
//! prior = [0.95, 0.05]
//! table = [[1, 0], [0.2, 0.8]]
//! outcomes = [0, -50]
//! ```
//!
//! A decision gives either `prior` + `table` + `outcomes`, `outcomes` +
//! `probabilities`, or a generated `source`.

use bdt_core::dist::{binomial_outcome_dist, mixture_binomial_outcome_dist};
use bdt_core::utility::{calibrate_weber, DEFAULT_GAMMA};
use bdt_core::{
    BoundsConfig, Categorical, ConditionalTable, CriterionMode, DecisionSpec, DiscreteDistribution, UtilityKind,
    UtilityModel,
};
use serde::{Deserialize, Serialize};

/// Row sums may be off by this much before renormalization.
pub const ROW_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    pub utility: UtilitySection,
    #[serde(default)]
    pub criterion: CriterionSection,
    pub decisions: Vec<DecisionEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilitySection {
    pub kind: UtilityKind,
    pub q: Option<f64>,
    /// Derive `q` from a just-noticeable difference at the reference.
    pub jnd: Option<f64>,
    #[serde(default)]
    pub reference: f64,
    pub gamma: Option<f64>,
}

impl Default for UtilitySection {
    fn default() -> Self {
        Self {
            kind: UtilityKind::Linear,
            q: None,
            jnd: None,
            reference: 0.0,
            gamma: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriterionSection {
    pub k: Option<f64>,
    /// `[caution, opportunity]`; defaults to `[k, k]`.
    pub premiums: Option<[f64; 2]>,
    pub mode: Option<CriterionMode>,
    pub clip: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionEntry {
    pub label: String,
    pub prior: Option<Vec<f64>>,
    pub table: Option<Vec<Vec<f64>>>,
    pub outcomes: Option<Vec<f64>>,
    pub probabilities: Option<Vec<f64>>,
    pub events: Option<Vec<String>>,
    pub outcome_labels: Option<Vec<String>>,
    pub source: Option<Source>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    /// Net return of `n` draws at even odds with success probability `p`.
    Binomial { n: u32, p: f64, fee: f64 },
    /// The same with `p` uniform over the compositions of an urn.
    MixtureBinomial { n: u32, urn_size: u32, fee: f64 },
}

#[derive(Debug, thiserror::Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("schema error at {at}: {msg}")]
    Schema { at: String, msg: String },
    #[error(transparent)]
    Core(#[from] bdt_core::Error),
}

fn schema(at: impl Into<String>, msg: impl Into<String>) -> ProblemError {
    ProblemError::Schema {
        at: at.into(),
        msg: msg.into(),
    }
}

/// Validated contents of a problem file.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub decisions: Vec<(String, DiscreteDistribution)>,
    pub model: UtilityModel,
    pub config: BoundsConfig,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, ProblemError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ProblemError> {
        let text = std::fs::read_to_string(path).map_err(|source| ProblemError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<Problem, ProblemError> {
        if self.decisions.is_empty() {
            return Err(schema("decisions", "at least one decision is required"));
        }
        let mut decisions = Vec::with_capacity(self.decisions.len());
        for (i, d) in self.decisions.iter().enumerate() {
            if decisions.iter().any(|(l, _)| l == &d.label) {
                return Err(schema(
                    format!("decisions[{i}].label"),
                    format!("duplicate label `{}`", d.label),
                ));
            }
            decisions.push((d.label.clone(), d.distribution(i)?));
        }
        Ok(Problem {
            decisions,
            model: self.utility.model()?,
            config: self.criterion.config()?,
        })
    }
}

impl UtilitySection {
    pub fn model(&self) -> Result<UtilityModel, ProblemError> {
        let gamma = self.gamma.unwrap_or(DEFAULT_GAMMA);
        let q = match (self.kind, self.q, self.jnd) {
            (_, Some(_), Some(_)) => return Err(schema("utility", "give either q or jnd, not both")),
            (UtilityKind::Linear, None, None) => 1.0,
            (_, Some(q), None) => q,
            (kind, None, Some(jnd)) => calibrate_weber(self.reference, jnd, kind)?,
            (_, None, None) => return Err(schema("utility.q", "a logarithmic utility needs q or jnd")),
        };
        Ok(UtilityModel::new(self.kind, q, self.reference, gamma)?)
    }
}

impl CriterionSection {
    pub fn config(&self) -> Result<BoundsConfig, ProblemError> {
        let k = self.k.unwrap_or(1.0);
        let [caution, opportunity] = self.premiums.unwrap_or([k, k]);
        let mut cfg = BoundsConfig::k_sigma(k)
            .with_premiums(caution, opportunity)
            .with_mode(self.mode.unwrap_or_default());
        if self.clip == Some(false) {
            cfg = cfg.without_clipping();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn check_row(at: &str, row: &[f64]) -> Result<Vec<f64>, ProblemError> {
    for (j, &p) in row.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(schema(format!("{at}[{j}]"), format!("probability {p} outside [0, 1]")));
        }
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > ROW_TOLERANCE {
        return Err(schema(
            at,
            format!("probabilities sum to {sum}, expected 1 within {ROW_TOLERANCE:e}"),
        ));
    }
    Ok(row.iter().map(|p| p / sum).collect())
}

impl DecisionEntry {
    fn distribution(&self, i: usize) -> Result<DiscreteDistribution, ProblemError> {
        let at = format!("decisions[{i}]");
        let tabulated = self.prior.is_some() || self.table.is_some();
        let listed = self.probabilities.is_some();
        match (self.source, tabulated, listed) {
            (Some(src), false, false) if self.outcomes.is_none() => Ok(src.distribution()?),
            (None, true, false) => self.tabulated(&at),
            (None, false, true) => {
                let outcomes = self
                    .outcomes
                    .as_ref()
                    .ok_or_else(|| schema(&at, "`probabilities` needs `outcomes`"))?;
                let probs = check_row(
                    &format!("{at}.probabilities"),
                    self.probabilities.as_deref().unwrap_or_default(),
                )?;
                if probs.len() != outcomes.len() {
                    return Err(schema(&at, "`outcomes` and `probabilities` differ in length"));
                }
                Ok(DiscreteDistribution::renormalized(outcomes.iter().copied().zip(probs))?)
            }
            _ => Err(schema(
                at,
                "give exactly one of `source`, `prior` with `table` and `outcomes`, or `outcomes` with `probabilities`",
            )),
        }
    }

    fn tabulated(&self, at: &str) -> Result<DiscreteDistribution, ProblemError> {
        let (Some(prior), Some(table), Some(outcomes)) = (&self.prior, &self.table, &self.outcomes) else {
            return Err(schema(at, "`prior`, `table` and `outcomes` go together"));
        };
        let prior = check_row(&format!("{at}.prior"), prior)?;
        let rows = table
            .iter()
            .enumerate()
            .map(|(j, row)| check_row(&format!("{at}.table[{j}]"), row))
            .collect::<Result<Vec<_>, _>>()?;
        let events = self
            .events
            .clone()
            .unwrap_or_else(|| (1..=rows.len()).map(|j| format!("E{j}")).collect());
        let outcome_labels = self
            .outcome_labels
            .clone()
            .unwrap_or_else(|| (1..=outcomes.len()).map(|k| format!("O{k}")).collect());
        let table = ConditionalTable::new(events, outcome_labels, rows)?;
        let spec = DecisionSpec::new(
            self.label.clone(),
            Categorical::renormalized(prior)?,
            table,
            outcomes.clone(),
        )?;
        Ok(spec.outcome_distribution()?)
    }
}

impl Source {
    pub fn distribution(&self) -> bdt_core::Result<DiscreteDistribution> {
        match *self {
            Source::Binomial { n, p, fee } => binomial_outcome_dist(n, p, fee),
            Source::MixtureBinomial { n, urn_size, fee } => mixture_binomial_outcome_dist(n, urn_size, fee),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SEATBELT: &str = include_str!("../problems/seatbelt.toml");

    #[test]
    fn seatbelt_file_validates() {
        let problem = ProblemFile::parse(SEATBELT).unwrap().validate().unwrap();
        assert_eq!(problem.decisions.len(), 2);
        let d1 = &problem.decisions[0].1;
        assert!((d1.probability_of(0.0) - 0.98695).abs() < 1e-12);
        assert_eq!(problem.model, UtilityModel::linear());
        assert_eq!(problem.config, BoundsConfig::default());
    }

    #[test]
    fn integers_read_as_numbers() {
        let text = "[[decisions]]\nlabel = \"a\"\noutcomes = [0, 10]\nprobabilities = [1, 0]\n";
        let problem = ProblemFile::parse(text).unwrap().validate().unwrap();
        assert_eq!(problem.decisions[0].1.support(), &[(0.0, 1.0)]);
    }

    #[test]
    fn rows_within_tolerance_are_renormalized() {
        let text = "[[decisions]]\nlabel = \"a\"\noutcomes = [0, 1]\nprobabilities = [0.3333334, 0.6666667]\n";
        let problem = ProblemFile::parse(text).unwrap().validate().unwrap();
        let total: f64 = problem.decisions[0].1.probabilities().sum();
        assert!((total - 1.0).abs() < 1e-15);

        let loose = "[[decisions]]\nlabel = \"a\"\noutcomes = [0, 1]\nprobabilities = [0.333, 0.666]\n";
        let err = ProblemFile::parse(loose).unwrap().validate().unwrap_err();
        assert!(matches!(err, ProblemError::Schema { .. }), "{err}");
    }

    #[test]
    fn unknown_fields_are_rejected_with_location() {
        let err =
            ProblemFile::parse("[utility]\nkind = \"linear\"\nwealth = 3\n[[decisions]]\nlabel = \"a\"\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("wealth"), "{msg}");
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn conflicting_decision_forms() {
        let text = "[[decisions]]\nlabel = \"a\"\noutcomes = [0]\nprobabilities = [1]\nsource = { kind = \"binomial\", n = 2, p = 0.5, fee = 1 }\n";
        assert!(ProblemFile::parse(text).unwrap().validate().is_err());
        let dup = "[[decisions]]\nlabel = \"a\"\noutcomes = [0]\nprobabilities = [1]\n[[decisions]]\nlabel = \"a\"\noutcomes = [0]\nprobabilities = [1]\n";
        assert!(ProblemFile::parse(dup).unwrap().validate().is_err());
    }

    #[test]
    fn calibrated_utility() {
        let section = UtilitySection {
            kind: UtilityKind::BernoulliIncome,
            q: None,
            jnd: Some(10.0),
            reference: 1000.0,
            gamma: None,
        };
        assert!((section.model().unwrap().q - 100.49917).abs() < 1e-5);
        let missing = UtilitySection { jnd: None, ..section };
        assert!(missing.model().is_err());
    }

    #[test]
    fn premiums_override_k() {
        let cfg = CriterionSection {
            k: Some(2.0),
            premiums: Some([0.5, 3.0]),
            mode: Some(CriterionMode::LowerOnly),
            clip: Some(false),
        }
        .config()
        .unwrap();
        assert_eq!((cfg.caution, cfg.opportunity), (0.5, 3.0));
        assert_eq!(cfg.mode, CriterionMode::LowerOnly);
        assert!(!cfg.clip_to_support);
    }
}
