//! Mechanical generation of complete Mamdani rule tables.
//!
//! Every combination of input labels gets exactly one rule. The consequent is
//! read off the surplus of normalized resource capacity over normalized job
//! demand: resources far below the demand are `poor`, a moderate shortfall
//! or a large overshoot (strong VMs wasted on small jobs) is `adequate`, and
//! a close match is `good`.

use serde::{Deserialize, Serialize};

use super::set::{Grade, Label, VariableName};
use crate::error::{Error, Result};

/// Tolerance used when comparing a surplus against a band threshold, so
/// thresholds hit exactly by the label arithmetic are classified stably.
const BAND_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyRule {
    /// Conjunction of (variable, label) terms.
    pub antecedent: Vec<(VariableName, Label)>,
    pub consequent: Grade,
}

impl FuzzyRule {
    pub fn label_of(&self, var: VariableName) -> Option<Label> {
        self.antecedent
            .iter()
            .find(|(v, _)| *v == var)
            .map(|&(_, l)| l)
    }
}

/// Surplus thresholds separating the output grades.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Bands {
    /// Surplus strictly below this is `poor`.
    pub poor_below: f64,
    /// Surplus in `[poor_below, good_from)` is `adequate`.
    pub good_from: f64,
    /// Surplus strictly above this is `adequate` (overshoot).
    pub overshoot_above: f64,
}

impl Default for Bands {
    fn default() -> Self {
        Self {
            poor_below: -0.5,
            good_from: -1.0 / 6.0,
            overshoot_above: 0.5,
        }
    }
}

impl Bands {
    pub fn validate(&self) -> Result<()> {
        if !(self.poor_below <= self.good_from && self.good_from <= self.overshoot_above) {
            return Err(Error::Config(format!(
                "bands must satisfy poor_below <= good_from <= overshoot_above, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn grade(&self, surplus: f64) -> Grade {
        if surplus < self.poor_below - BAND_EPS {
            Grade::Poor
        } else if surplus < self.good_from - BAND_EPS || surplus > self.overshoot_above + BAND_EPS {
            Grade::Adequate
        } else {
            Grade::Good
        }
    }
}

/// Generates the complete rule table for a demand variable and weighted
/// resource variables.
///
/// Rules are emitted in mixed-radix order over `inputs` (the first input is
/// the most significant digit), where `inputs[0]` is the demand variable and
/// the rest are `resources` in order.
pub fn generate_rules(
    demand: VariableName,
    resources: &[(VariableName, f64)],
    bands: &Bands,
) -> Result<Vec<FuzzyRule>> {
    bands.validate()?;
    let total_weight: f64 = resources.iter().map(|(_, w)| w).sum();
    if resources.is_empty() || resources.iter().any(|(_, w)| !(*w >= 0.0)) || total_weight <= 0.0 {
        return Err(Error::Config(format!(
            "resource weights must be non-negative with a positive sum, got {resources:?}"
        )));
    }
    let arity = resources.len() + 1;
    let count = 3usize.pow(arity as u32);
    let mut rules = Vec::with_capacity(count);
    for code in 0..count {
        let labels = decode(code, arity);
        let d = labels[0].index() as f64;
        let c: f64 = resources
            .iter()
            .zip(&labels[1..])
            .map(|((_, w), l)| w / total_weight * l.index() as f64)
            .sum();
        let surplus = c / 2.0 - d / 2.0;
        let mut antecedent = Vec::with_capacity(arity);
        antecedent.push((demand, labels[0]));
        antecedent.extend(resources.iter().zip(&labels[1..]).map(|((v, _), l)| (*v, *l)));
        rules.push(FuzzyRule {
            antecedent,
            consequent: bands.grade(surplus),
        });
    }
    Ok(rules)
}

fn decode(mut code: usize, arity: usize) -> Vec<Label> {
    let mut labels = vec![Label::Low; arity];
    for slot in labels.iter_mut().rev() {
        *slot = Label::from_index(code % 3).expect("digit < 3");
        code /= 3;
    }
    labels
}
