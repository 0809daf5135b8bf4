//! Worked examples as executable regression cases.
//!
//! Every expected value carries its tolerance and a short note on where the
//! published figure comes from. Running a scenario recomputes everything
//! from first principles and compares.

use serde::{Deserialize, Serialize};

use crate::criterion::{bounds, decide, decide_distributions, BoundsConfig, Verdict};
use crate::dist::{
    binomial_outcome_dist, deciban, mixture_binomial_outcome_dist, posterior_odds, BinaryNetwork, Categorical,
    ConditionalTable, DecisionProblem, DecisionSpec, DiscreteDistribution, Odds,
};
use crate::error::{invalid, Error, Result};
use crate::fairness::{fair_probability, predict_kt_bet, BoundSide, CertaintyBet};
use crate::utility::{calibrate_weber, pushforward, utility_support, UtilityKind, UtilityModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Value {
    Number(f64),
    Choice(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub quantity: String,
    /// Where the published value appears.
    pub source: String,
    pub expected: Value,
    /// Absolute tolerance for numbers; unused for choices.
    pub tolerance: f64,
    pub computed: Value,
    pub pass: bool,
}

impl Check {
    fn number(quantity: &str, source: &str, expected: f64, tolerance: f64, computed: f64) -> Self {
        Self {
            quantity: quantity.into(),
            source: source.into(),
            expected: Value::Number(expected),
            tolerance,
            computed: Value::Number(computed),
            pass: (computed - expected).abs() <= tolerance,
        }
    }

    fn choice(quantity: &str, source: &str, expected: &str, computed: &str) -> Self {
        Self {
            quantity: quantity.into(),
            source: source.into(),
            expected: Value::Choice(expected.into()),
            tolerance: 0.0,
            computed: Value::Choice(computed.into()),
            pass: expected == computed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub id: String,
    pub description: String,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScenarioInfo {
    pub id: &'static str,
    pub description: &'static str,
}

type Runner = fn() -> Result<Vec<Check>>;

const CATALOG: &[(ScenarioInfo, Runner)] = &[
    (
        ScenarioInfo {
            id: "seatbelt",
            description: "seat belt choice: outcome marginals from event priors and conditional tables",
        },
        seatbelt,
    ),
    (
        ScenarioInfo {
            id: "ellsberg",
            description: "known versus unknown urn composition at wealth 200, q = 100 (moments at q = 1)",
        },
        ellsberg,
    ),
    (
        ScenarioInfo {
            id: "kt_risk_seeking_1",
            description: "0.001 chance of 5000 against a sure 5, linear utility",
        },
        kt_risk_seeking_1,
    ),
    (
        ScenarioInfo {
            id: "kt_risk_aversion_1",
            description: "0.001 chance of losing 5000 against a sure loss of 5, linear utility",
        },
        kt_risk_aversion_1,
    ),
    (
        ScenarioInfo {
            id: "kt_risk_seeking_2",
            description: "0.8 chance of losing 4000 against a sure loss of 3000, linear utility",
        },
        kt_risk_seeking_2,
    ),
    (
        ScenarioInfo {
            id: "kt_risk_aversion_2",
            description: "0.8 chance of 4000 against a sure 3000, linear utility",
        },
        kt_risk_aversion_2,
    ),
    (
        ScenarioInfo {
            id: "framing_group1",
            description: "gift of 1000 absorbed into wealth, then even chance of 1000 against a sure 500",
        },
        framing_group1,
    ),
    (
        ScenarioInfo {
            id: "framing_group2",
            description:
                "gift of 2000 absorbed into wealth, then even chance of losing 1000 against a sure loss of 500",
        },
        framing_group2,
    ),
    (
        ScenarioInfo {
            id: "debt_phd",
            description: "monthly repayment of 500 felt as lost income and as reduced debt",
        },
        debt_phd,
    ),
    (
        ScenarioInfo {
            id: "poor_debtor",
            description: "income of 700 and debt of 20000: lost income against extra debt",
        },
        poor_debtor,
    ),
    (
        ScenarioInfo {
            id: "fred",
            description: "burglar alarm explained away by an earthquake",
        },
        fred,
    ),
    (
        ScenarioInfo {
            id: "calibration",
            description: "Weber constants from just-noticeable differences, and the deciban scale",
        },
        calibration,
    ),
    (
        ScenarioInfo {
            id: "tom_w_odds",
            description: "base-rate odds of 1/3 overturned by a likelihood ratio above 3",
        },
        tom_w_odds,
    ),
];

/// Catalog in stable order.
pub fn list_scenarios() -> Vec<ScenarioInfo> {
    CATALOG.iter().map(|(info, _)| *info).collect()
}

pub fn run_scenario(id: &str) -> Result<ScenarioReport> {
    let (info, runner) = CATALOG
        .iter()
        .find(|(info, _)| info.id == id)
        .ok_or_else(|| Error::UnknownScenario(id.to_string()))?;
    let checks = runner()?;
    Ok(ScenarioReport {
        id: info.id.to_string(),
        description: info.description.to_string(),
        passed: checks.iter().all(|c| c.pass),
        checks,
    })
}

pub fn run_all() -> Result<Vec<ScenarioReport>> {
    CATALOG.iter().map(|(info, _)| run_scenario(info.id)).collect()
}

fn verdict_label(v: &Verdict, labels: &[&str]) -> String {
    match v {
        Verdict::Prefer(i) => labels[*i].to_string(),
        Verdict::Indifferent(_) => "indifferent".to_string(),
    }
}

// ---------------------------------------------------------------- seat belts

/// Event priors and outcome tables for wearing (`D1`) and not wearing (`D2`)
/// a seat belt. Outcomes are scored 0, -1, -2 for no harm, bruises, broken bones.
pub fn seatbelt_problem() -> Result<DecisionProblem> {
    let events: Vec<String> = ["no accident", "small accident", "severe accident"]
        .map(String::from)
        .into();
    let outcomes: Vec<String> = ["no harm", "some bruises", "broken bones"].map(String::from).into();
    let prior = Categorical::new(vec![0.950, 0.049, 0.001])?;
    let belt = ConditionalTable::new(
        events.clone(),
        outcomes.clone(),
        vec![vec![1.00, 0.00, 0.00], vec![0.75, 0.25, 0.00], vec![0.20, 0.70, 0.10]],
    )?;
    let no_belt = ConditionalTable::new(
        events,
        outcomes,
        vec![vec![1.00, 0.00, 0.00], vec![0.25, 0.75, 0.00], vec![0.10, 0.30, 0.60]],
    )?;
    let codes = vec![0.0, -1.0, -2.0];
    Ok(DecisionProblem::new(vec![
        DecisionSpec::new("D1", prior.clone(), belt, codes.clone())?,
        DecisionSpec::new("D2", prior, no_belt, codes)?,
    ]))
}

fn seatbelt() -> Result<Vec<Check>> {
    let problem = seatbelt_problem()?;
    let mut checks = Vec::new();
    let published = [
        ("D1", [0.9872, 0.0127, 0.0001], "marginal outcome table, seat belt worn"),
        ("D2", [0.9621, 0.0373, 0.0006], "marginal outcome table, no seat belt"),
    ];
    for (spec, (label, values, source)) in problem.decisions.iter().zip(published) {
        let marginal = spec.joint()?.outcome_marginal();
        for (k, (&expected, computed)) in values.iter().zip(marginal).enumerate() {
            checks.push(Check::number(
                &format!("P(O{} | {label})", k + 1),
                source,
                expected,
                5e-4,
                computed,
            ));
        }
    }
    let joint = problem.decisions[0].joint()?;
    checks.push(Check::number(
        "P(severe accident, bruises | D1)",
        "joint event-outcome table, seat belt worn",
        0.0007,
        5e-4,
        joint.entry(2, 1),
    ));
    checks.push(Check::number(
        "P(small accident, no harm | D1)",
        "joint event-outcome table, seat belt worn (printed rounded)",
        0.0370,
        5e-4,
        joint.entry(1, 0),
    ));
    Ok(checks)
}

// ---------------------------------------------------------------- Ellsberg

/// Net returns of 100 draws at a fee of 50 from a known 50/50 urn (`D1`)
/// and from a 1000-ball urn of unknown mix (`D2`).
pub fn ellsberg_distributions() -> Result<Vec<(String, DiscreteDistribution)>> {
    Ok(vec![
        ("D1".to_string(), binomial_outcome_dist(100, 0.5, 50.0)?),
        ("D2".to_string(), mixture_binomial_outcome_dist(100, 1000, 50.0)?),
    ])
}

pub const ELLSBERG_WEALTH: f64 = 200.0;
pub const ELLSBERG_Q: f64 = 100.0;

fn ellsberg() -> Result<Vec<Check>> {
    let dists = ellsberg_distributions()?;
    let (d1, d2) = (&dists[0].1, &dists[1].1);
    let mut checks = vec![
        Check::number("E(o | D1)", "known urn net return", 0.0, 1e-9, d1.mean()),
        Check::number("std(o | D1)", "known urn net return", 5.0, 1e-9, d1.std()),
        Check::number("E(o | D2)", "unknown urn net return", 0.0, 1e-6, d2.mean()),
        Check::number("std(o | D2)", "unknown urn net return", 29.0, 0.5, d2.std()),
    ];

    let unit = UtilityModel::income(1.0, ELLSBERG_WEALTH)?;
    let cfg = BoundsConfig::default();
    let u1 = pushforward(d1, &unit)?;
    let u2 = pushforward(d2, &unit)?;
    checks.push(Check::number(
        "E(u | D1), q = 1",
        "known urn utility moments",
        -0.0003,
        5e-5,
        u1.mean(),
    ));
    checks.push(Check::number(
        "std(u | D1), q = 1",
        "known urn utility moments",
        0.025,
        5e-5,
        u1.std(),
    ));
    checks.push(Check::number(
        "E(u | D2), q = 1",
        "unknown urn utility moments",
        -0.0108,
        5e-4,
        u2.mean(),
    ));
    checks.push(Check::number(
        "std(u | D2), q = 1",
        "unknown urn utility moments",
        0.1479,
        5e-4,
        u2.std(),
    ));
    let (a, b) = utility_support(&unit, -50.0, 50.0)?;
    checks.push(Check::number("a, q = 1", "utility support extremes", -0.2877, 1e-4, a));
    checks.push(Check::number("b, q = 1", "utility support extremes", 0.2231, 1e-4, b));
    let (b1, b2) = (bounds(&u1, &cfg), bounds(&u2, &cfg));
    checks.push(Check::number(
        "LB + UB | D1, q = 1",
        "known urn sum of bounds",
        -0.0006,
        1e-4,
        b1.sum(),
    ));
    checks.push(Check::number(
        "LB + UB | D2, q = 1",
        "unknown urn sum of bounds",
        -0.0216,
        5e-4,
        b2.sum(),
    ));

    let model = UtilityModel::income(ELLSBERG_Q, ELLSBERG_WEALTH)?;
    let pref = decide_distributions(dists, &model, &cfg)?;
    let (p1, p2) = (&pref.decisions[0].bounds, &pref.decisions[1].bounds);
    let gain = p1.lb - p2.lb;
    let loss = p2.ub - p1.ub;
    checks.push(Check::number(
        "lower-bound gain of D1, q = 100",
        "Ellsberg net utility discussion",
        13.34,
        0.05,
        gain,
    ));
    checks.push(Check::number(
        "upper-bound loss of D1, q = 100",
        "Ellsberg net utility discussion",
        11.24,
        0.05,
        loss,
    ));
    checks.push(Check::number(
        "net gain of D1, q = 100",
        "Ellsberg net utility discussion",
        2.10,
        0.05,
        gain - loss,
    ));
    checks.push(Check::choice(
        "preferred bet",
        "Ellsberg verdict",
        "D1",
        &verdict_label(&pref.verdict, &["D1", "D2"]),
    ));
    Ok(checks)
}

// ---------------------------------------------------------------- certainty bets

struct KtCase {
    bet: (f64, f64, f64),
    p_fair: f64,
    p_tol: f64,
    interval: (f64, f64),
    preferred: &'static str,
    dominating: BoundSide,
    source: &'static str,
}

fn kt_case(case: KtCase) -> Result<Vec<Check>> {
    let (ou, p, oc) = case.bet;
    let model = UtilityModel::linear();
    let cfg = BoundsConfig::default();
    let fair = fair_probability(oc, ou, &model, &cfg)?;
    let pred = predict_kt_bet(&CertaintyBet::new(ou, p, oc)?, &model, &cfg)?;
    let (lo, hi) = fair.roots[0].interval;
    let side = |s: BoundSide| match s {
        BoundSide::Lower => "lower",
        BoundSide::Upper => "upper",
    };
    Ok(vec![
        Check::number("fair probability", case.source, case.p_fair, case.p_tol, fair.p_fair()),
        Check::number("fair interval low", case.source, case.interval.0, 1e-9, lo),
        Check::number("fair interval high", case.source, case.interval.1, 1e-9, hi),
        Check::choice(
            "preferred bet",
            "reported majority choice",
            case.preferred,
            &verdict_label(&pred.preference.verdict, &["D1", "D2"]),
        ),
        Check::choice(
            "dominating bound",
            "reported reading of the bet",
            side(case.dominating),
            side(pred.dominating),
        ),
    ])
}

fn kt_risk_seeking_1() -> Result<Vec<Check>> {
    kt_case(KtCase {
        bet: (5000.0, 0.001, 5.0),
        p_fair: 3.985e-6,
        p_tol: 1e-8,
        interval: (0.0, 10.0),
        preferred: "D1",
        dominating: BoundSide::Upper,
        source: "long-shot gain, fair probability and interval",
    })
}

fn kt_risk_aversion_1() -> Result<Vec<Check>> {
    kt_case(KtCase {
        bet: (-5000.0, 0.001, -5.0),
        p_fair: 3.985e-6,
        p_tol: 1e-8,
        interval: (-10.0, 0.0),
        preferred: "D2",
        dominating: BoundSide::Lower,
        source: "long-shot loss, fair probability and interval",
    })
}

fn kt_risk_seeking_2() -> Result<Vec<Check>> {
    kt_case(KtCase {
        bet: (-4000.0, 0.8, -3000.0),
        p_fair: 0.8536,
        p_tol: 1e-4,
        interval: (-4000.0, -2000.0),
        preferred: "D1",
        dominating: BoundSide::Upper,
        source: "likely loss, fair probability and interval",
    })
}

fn kt_risk_aversion_2() -> Result<Vec<Check>> {
    kt_case(KtCase {
        bet: (4000.0, 0.8, 3000.0),
        p_fair: 0.8536,
        p_tol: 1e-4,
        interval: (2000.0, 4000.0),
        preferred: "D2",
        dominating: BoundSide::Lower,
        source: "likely gain, fair probability and interval",
    })
}

// ---------------------------------------------------------------- framing

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FramingMode {
    /// The gift raises the reference wealth; outcomes stay as stated.
    DiscountIntoWealth,
    /// The gift is added to every outcome; reference wealth stays put.
    DiscountIntoOutcomes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FramedProblem {
    pub decisions: Vec<(String, DiscreteDistribution)>,
    /// Added to the reference of logarithmic utility models.
    pub reference_shift: f64,
}

impl FramedProblem {
    /// `base` with its reference moved by the framing.
    pub fn model_for(&self, base: &UtilityModel) -> Result<UtilityModel> {
        if base.is_logarithmic() {
            base.with_reference(base.reference + self.reference_shift)
        } else {
            Ok(*base)
        }
    }
}

pub fn frame_problem(
    decisions: &[(String, DiscreteDistribution)],
    gift: f64,
    mode: FramingMode,
) -> Result<FramedProblem> {
    if !(gift.is_finite() && gift >= 0.0) {
        return Err(invalid(format!("gift must be a nonnegative amount, got {gift}")));
    }
    Ok(match mode {
        FramingMode::DiscountIntoWealth => FramedProblem {
            decisions: decisions.to_vec(),
            reference_shift: gift,
        },
        FramingMode::DiscountIntoOutcomes => FramedProblem {
            decisions: decisions
                .iter()
                .map(|(l, d)| Ok((l.clone(), d.shifted(gift)?)))
                .collect::<Result<_>>()?,
            reference_shift: 0.0,
        },
    })
}

/// Pre-gift wealth and Weber constant used for the framing verdicts.
pub const FRAMING_WEALTH: f64 = 1000.0;
pub const FRAMING_Q: f64 = 100.0;

/// Gift and stated options of each framing group.
pub fn framing_group(group: u8) -> Result<(f64, Vec<(String, DiscreteDistribution)>)> {
    let (gift, gamble, sure) = match group {
        1 => (1000.0, DiscreteDistribution::new([(0.0, 0.5), (1000.0, 0.5)])?, 500.0),
        2 => (2000.0, DiscreteDistribution::new([(-1000.0, 0.5), (0.0, 0.5)])?, -500.0),
        _ => return Err(invalid(format!("no framing group {group}"))),
    };
    Ok((
        gift,
        vec![
            ("D1".to_string(), gamble),
            ("D2".to_string(), DiscreteDistribution::point_mass(sure)?),
        ],
    ))
}

fn framing(group: u8, majority: &str) -> Result<Vec<Check>> {
    let (gift, stated) = framing_group(group)?;
    let (other_gift, other) = framing_group(3 - group)?;
    let mine = frame_problem(&stated, gift, FramingMode::DiscountIntoOutcomes)?;
    let theirs = frame_problem(&other, other_gift, FramingMode::DiscountIntoOutcomes)?;
    let same = if mine.decisions == theirs.decisions {
        "identical"
    } else {
        "different"
    };
    let framed = frame_problem(&stated, gift, FramingMode::DiscountIntoWealth)?;
    let model = framed.model_for(&UtilityModel::income(FRAMING_Q, FRAMING_WEALTH)?)?;
    let pref = decide_distributions(framed.decisions.clone(), &model, &BoundsConfig::default())?;
    Ok(vec![
        Check::choice(
            "both groups with gifts added to outcomes",
            "framing footnote on identical outcome distributions",
            "identical",
            same,
        ),
        Check::choice(
            "preferred bet, gift absorbed into wealth",
            "reported majority choice",
            majority,
            &verdict_label(&pref.verdict, &["D1", "D2"]),
        ),
    ])
}

fn framing_group1() -> Result<Vec<Check>> {
    framing(1, "D2")
}

fn framing_group2() -> Result<Vec<Check>> {
    framing(2, "D1")
}

// ---------------------------------------------------------------- debt

fn debt_phd() -> Result<Vec<Check>> {
    let income = UtilityModel::income(100.0, 1500.0)?;
    let mut checks = vec![Check::number(
        "income loss of 500 at income 1500, q = 100",
        "repayment felt as lost income (value quoted in the running text)",
        -40.5,
        0.1,
        income.utility(-500.0)?,
    )];
    for (debt, expected, tol) in [(40000.0, 0.5, 0.01), (2000.0, 11.5, 0.1), (20000.0, 1.0, 0.05)] {
        let model = UtilityModel::debt(40.0, debt)?;
        checks.push(Check::number(
            &format!("debt decrease of 500 at debt {debt}, b = 40"),
            "repayment felt as reduced debt",
            expected,
            tol,
            model.utility(-500.0)?,
        ));
    }
    Ok(checks)
}

fn poor_debtor() -> Result<Vec<Check>> {
    let income = UtilityModel::income(100.0, 700.0)?;
    let debt = UtilityModel::debt(40.0, 20000.0)?;
    let source = "poor debtor vignette";
    Ok(vec![
        Check::number("income loss of 500", source, -125.0, 1.0, income.utility(-500.0)?),
        Check::number("debt increase of 1000", source, -2.0, 1.0, debt.utility(1000.0)?),
        Check::number("income gain of 1000", source, 89.0, 1.0, income.utility(1000.0)?),
    ])
}

// ---------------------------------------------------------------- burglar alarm

/// Burglary `B` and earthquake `E` independent; alarm `A` rings when either
/// occurs, up to a leak `eps`.
pub fn fred_network(b: f64, e: f64, eps: f64) -> Result<BinaryNetwork> {
    let mut net = BinaryNetwork::new();
    net.add_root("B", b)?;
    net.add_root("E", e)?;
    net.add_variable("A", &["B", "E"], vec![eps, 1.0 - eps, 1.0 - eps, 1.0 - eps])?;
    Ok(net)
}

/// The same story for someone who never considers earthquakes.
pub fn fred_network_without_earthquakes(b: f64, eps: f64) -> Result<BinaryNetwork> {
    let mut net = BinaryNetwork::new();
    net.add_root("B", b)?;
    net.add_variable("A", &["B"], vec![eps, 1.0 - eps])?;
    Ok(net)
}

fn fred() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (b, e) in [(0.001, 0.01), (0.037, 0.146)] {
        let net = fred_network(b, e, 0.0)?;
        let tag = format!("b = {b}, e = {e}");
        checks.push(Check::number(
            &format!("P(B | A, E), {tag}"),
            "alarm explained away: posterior equals b",
            b,
            1e-12,
            net.enumerate_posterior("B", &[("A", true), ("E", true)])?,
        ));
        checks.push(Check::number(
            &format!("P(B | A), {tag}"),
            "alarm alone: b / (b + e - be)",
            b / (b + e - b * e),
            1e-12,
            net.enumerate_posterior("B", &[("A", true)])?,
        ));
        let naive = fred_network_without_earthquakes(b, 0.0)?;
        checks.push(Check::number(
            &format!("P(B | A) ignoring earthquakes, b = {b}"),
            "alarm without the earthquake hypothesis: certainty",
            1.0,
            1e-12,
            naive.enumerate_posterior("B", &[("A", true)])?,
        ));
    }
    Ok(checks)
}

// ---------------------------------------------------------------- scales

fn calibration() -> Result<Vec<Check>> {
    let q = calibrate_weber(1000.0, 10.0, UtilityKind::BernoulliIncome)?;
    let b = calibrate_weber(40000.0, 1000.0, UtilityKind::BernoulliDebt)?;
    let jnd = UtilityModel::income(1.0 / 1.01f64.ln(), 1000.0)?;
    Ok(vec![
        Check::number("income Weber constant", "jnd of 10 at wealth 1000", 100.50, 0.01, q),
        Check::number("debt Weber constant", "jnd of 1000 at debt 40000", 39.5, 0.1, b),
        Check::number(
            "utility of one jnd",
            "one jnd is one utile",
            1.0,
            1e-12,
            jnd.utility(10.0)?,
        ),
        Check::number("deciban(0.5)", "deciban scale", 0.0, 1e-12, deciban(0.5)?),
        Check::number("deciban(0.99)", "deciban scale", 19.96, 0.01, deciban(0.99)?),
        Check::number(
            "deciban(0.11) - deciban(0.10)",
            "deciban scale near ten percent",
            0.46,
            0.01,
            deciban(0.11)? - deciban(0.10)?,
        ),
    ])
}

fn tom_w_odds() -> Result<Vec<Check>> {
    let prior = Odds::new(1.0 / 3.0)?;
    let side = |o: Odds| if o.ratio() > 1.0 { "A1" } else { "A2" };
    let strong = posterior_odds(prior, Odds::new(4.0)?)?;
    let weak = posterior_odds(prior, Odds::new(2.0)?)?;
    Ok(vec![
        Check::number(
            "posterior odds, likelihood ratio 4",
            "base-rate odds of about 3 against",
            4.0 / 3.0,
            1e-12,
            strong.ratio(),
        ),
        Check::choice(
            "favoured hypothesis, likelihood ratio 4",
            "likelihood ratio above 3",
            "A1",
            side(strong),
        ),
        Check::choice(
            "favoured hypothesis, likelihood ratio 2",
            "likelihood ratio below 3",
            "A2",
            side(weak),
        ),
        Check::number(
            "likelihood ratio threshold",
            "inverted prior odds",
            3.0,
            1e-12,
            prior.inverted().ratio(),
        ),
    ])
}

/// The seat-belt problem run end to end; handy for smoke tests.
pub fn seatbelt_preference() -> Result<crate::criterion::Preference> {
    decide(&seatbelt_problem()?, &UtilityModel::linear(), &BoundsConfig::default())
}
