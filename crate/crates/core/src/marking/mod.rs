//! Marking strategies. Every strategy here marks at least one element carrying
//! the largest estimator, and ties are broken by ascending element id.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::EstimatorField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Maximum,
    Doerfler,
    Equidistribution,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maximum" => Ok(Strategy::Maximum),
            "doerfler" | "dorfler" => Ok(Strategy::Doerfler),
            "equidistribution" => Ok(Strategy::Equidistribution),
            _ => Err(Error::Config(format!("unknown marking strategy '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkConfig {
    pub strategy: Strategy,
    pub theta: f64,
}

impl MarkConfig {
    pub fn new(strategy: Strategy, theta: f64) -> Result<Self> {
        let cfg = Self { strategy, theta };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::Config(format!("theta = {} not in (0, 1]", self.theta)));
        }
        Ok(())
    }
}

impl Default for MarkConfig {
    fn default() -> Self {
        Self { strategy: Strategy::Doerfler, theta: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkSet {
    /// Marked element ids, ascending.
    pub elements: Vec<usize>,
    /// Share of the squared global estimator carried by the marked elements.
    pub fraction: f64,
    /// Set when every estimator vanishes; nothing is marked then.
    pub converged: bool,
}

/// Marks elements of an estimator field.
pub fn mark(field: &EstimatorField, cfg: &MarkConfig) -> MarkSet {
    mark_values(&field.values(), cfg)
}

/// Marks from raw local estimator values.
pub fn mark_values(eta: &[f64], cfg: &MarkConfig) -> MarkSet {
    let max = eta.iter().cloned().fold(0.0, f64::max);
    let total: f64 = eta.iter().map(|e| e * e).sum();
    if max <= 0.0 {
        return MarkSet { elements: Vec::new(), fraction: 0.0, converged: true };
    }
    let mut elements: Vec<usize> = match cfg.strategy {
        Strategy::Maximum => (0..eta.len()).filter(|&t| eta[t] >= cfg.theta * max).collect(),
        Strategy::Equidistribution => {
            let threshold = cfg.theta * total.sqrt() / (eta.len() as f64).sqrt();
            // the argmax always satisfies this for theta <= 1; the second test guards rounding
            (0..eta.len()).filter(|&t| eta[t] >= threshold || eta[t] == max).collect()
        }
        Strategy::Doerfler => {
            let mut order: Vec<usize> = (0..eta.len()).collect();
            order.sort_by(|&a, &b| eta[b].total_cmp(&eta[a]).then(a.cmp(&b)));
            // a relative slack of a few ulps keeps exact ties such as 16 >= 0.8^2 * 25 marked minimally
            let goal = cfg.theta * cfg.theta * total * (1.0 - 4.0 * f64::EPSILON);
            let mut acc = 0.0;
            let mut take = 0;
            for &t in &order {
                acc += eta[t] * eta[t];
                take += 1;
                if acc >= goal {
                    break;
                }
            }
            order.truncate(take);
            order
        }
    };
    elements.sort_unstable();
    let fraction = elements.iter().map(|&t| eta[t] * eta[t]).sum::<f64>() / total;
    MarkSet { elements, fraction, converged: false }
}

/// Outcome of [`validate_marking`].
#[derive(Debug, Clone, PartialEq)]
pub struct MarkingReport {
    /// Largest ratio of an unmarked estimator to the largest marked one.
    pub worst_ratio: f64,
    pub max_marked: f64,
}

/// Checks that no unmarked element carries a larger estimator than every
/// marked element.
pub fn validate_marking(eta: &[f64], marked: &[usize]) -> Result<MarkingReport> {
    let mut is_marked = vec![false; eta.len()];
    for &t in marked {
        is_marked[t] = true;
    }
    let max_marked = marked.iter().map(|&t| eta[t]).fold(0.0, f64::max);
    let mut worst_ratio: f64 = 0.0;
    for (t, &e) in eta.iter().enumerate() {
        if is_marked[t] {
            continue;
        }
        if e > max_marked {
            return Err(Error::MarkingViolation { element: t, eta: e, max_marked });
        }
        if max_marked > 0.0 {
            worst_ratio = worst_ratio.max(e / max_marked);
        }
    }
    Ok(MarkingReport { worst_ratio, max_marked })
}
