//! Comma-separated plot series. Each file opens with one `#` line naming
//! the figure, then a header row, then data.

use std::io::Write;

use bdt_core::fairness::{fairness_curve, ratio_grid};
use bdt_core::{BoundsConfig, DiscreteDistribution, UtilityModel};

use crate::report::{describe_model, fmt_sig, SIGNIFICANT_DIGITS};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub title: String,
    pub columns: [&'static str; 2],
    /// `None` marks a point with no value, written as an empty field.
    pub rows: Vec<(f64, Option<f64>)>,
}

impl Series {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# {}", self.title)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns)?;
        for (x, y) in &self.rows {
            let y = y.map(|y| fmt_sig(y, SIGNIFICANT_DIGITS)).unwrap_or_default();
            w.write_record([fmt_sig(*x, SIGNIFICANT_DIGITS), y])?;
        }
        w.flush()
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

/// Fair probability against `O_c / O_u` on `n` evenly spaced ratios.
pub fn fairness_series(uncertain: f64, model: &UtilityModel, cfg: &BoundsConfig, n: usize) -> bdt_core::Result<Series> {
    let points = fairness_curve(uncertain, model, cfg, &ratio_grid(n))?;
    Ok(Series {
        title: format!(
            "fair probability as a function of the certain outcome, O_u = {}, {}",
            fmt_sig(uncertain, SIGNIFICANT_DIGITS),
            describe_model(model, SIGNIFICANT_DIGITS)
        ),
        columns: ["ratio", "p_fair"],
        rows: points.iter().map(|pt| (pt.ratio, pt.p_fair)).collect(),
    })
}

/// Utility of a change in wealth over `n + 1` evenly spaced points.
pub fn utility_series(model: &UtilityModel, from: f64, to: f64, n: usize) -> bdt_core::Result<Series> {
    let n = n.max(1);
    let rows = (0..=n)
        .map(|i| {
            let delta = from + (to - from) * i as f64 / n as f64;
            // outside the domain the curve has a gap rather than an error
            (delta, model.utility(delta).ok())
        })
        .collect();
    Ok(Series {
        title: format!(
            "utility of a change in wealth, {}",
            describe_model(model, SIGNIFICANT_DIGITS)
        ),
        columns: ["delta", "utility"],
        rows,
    })
}

pub fn distribution_series(title: String, dist: &DiscreteDistribution) -> Series {
    Series {
        title,
        columns: ["outcome", "probability"],
        rows: dist.support().iter().map(|&(v, p)| (v, Some(p))).collect(),
    }
}
