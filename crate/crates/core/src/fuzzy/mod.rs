//! Mamdani fuzzy inference used to score how well a VM suits a job.
//!
//! Three inference systems share the same linguistic variables and differ
//! only in which VM attributes they read:
//!
//! | variant     | inputs                                             |
//! |-------------|----------------------------------------------------|
//! | `TypeA`     | job length, VM mips, VM RAM                        |
//! | `TypeB`     | job length, VM bandwidth                           |
//! | `Crossover` | job length, VM bandwidth, VM mips, VM RAM          |

mod inference;
mod rules;
mod set;

pub use inference::{defuzzify_centroid, InferenceSystem, OutputRegion};
pub use rules::{generate_rules, Bands, FuzzyRule};
pub use set::{FuzzySet, Grade, Label, LinguisticVariable, Shape, VariableName};

use serde::{Deserialize, Serialize};

use crate::cloud::{Job, VmSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    TypeA,
    TypeB,
    Crossover,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::TypeA, Variant::TypeB, Variant::Crossover];

    pub fn inputs(self) -> &'static [VariableName] {
        use VariableName::*;
        match self {
            Variant::TypeA => &[JobLength, VmMips, VmRam],
            Variant::TypeB => &[JobLength, VmBandwidth],
            Variant::Crossover => &[JobLength, VmBandwidth, VmMips, VmRam],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::TypeA => "type_a",
            Variant::TypeB => "type_b",
            Variant::Crossover => "crossover",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Universe and optional explicit breakpoints of one variable. Missing
/// breakpoints fall back to the proportional template on the universe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableConfig {
    pub universe: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub low: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub medium: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub high: Option<Vec<f64>>,
}

impl VariableConfig {
    fn template(lo: f64, hi: f64) -> Self {
        Self {
            universe: [lo, hi],
            low: None,
            medium: None,
            high: None,
        }
    }

    fn explicit(lo: f64, hi: f64, low: &[f64], medium: &[f64], high: &[f64]) -> Self {
        Self {
            universe: [lo, hi],
            low: Some(low.to_vec()),
            medium: Some(medium.to_vec()),
            high: Some(high.to_vec()),
        }
    }

    pub fn build(&self, name: VariableName) -> Result<LinguisticVariable> {
        let [lo, hi] = self.universe;
        let template = LinguisticVariable::proportional(name, lo, hi)?;
        let pick = |given: &Option<Vec<f64>>, label: Label| -> Result<FuzzySet> {
            match given {
                Some(points) => Shape::from_breakpoints(points)
                    .map(FuzzySet::new)
                    .map_err(|e| Error::Config(format!("{}.{}: {e}", name.name(), label.name()))),
                None => Ok(template.set(label).clone()),
            }
        };
        LinguisticVariable::new(
            name,
            (lo, hi),
            [
                pick(&self.low, Label::Low)?,
                pick(&self.medium, Label::Medium)?,
                pick(&self.high, Label::High)?,
            ],
        )
    }
}

/// Capacity weights of the VM attributes read by one variant. Weights of
/// attributes the variant does not read are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weights {
    #[serde(default)]
    pub mips: f64,
    #[serde(default)]
    pub ram: f64,
    #[serde(default)]
    pub bandwidth: f64,
}

impl Weights {
    fn of(&self, var: VariableName) -> f64 {
        match var {
            VariableName::VmMips => self.mips,
            VariableName::VmRam => self.ram,
            VariableName::VmBandwidth => self.bandwidth,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VariantWeights {
    pub type_a: Weights,
    pub type_b: Weights,
    pub crossover: Weights,
}

impl Default for VariantWeights {
    fn default() -> Self {
        Self {
            type_a: Weights {
                mips: 0.6,
                ram: 0.4,
                bandwidth: 0.0,
            },
            type_b: Weights {
                mips: 0.0,
                ram: 0.0,
                bandwidth: 1.0,
            },
            crossover: Weights {
                mips: 0.5,
                ram: 0.3,
                bandwidth: 0.2,
            },
        }
    }
}

impl VariantWeights {
    fn of(&self, variant: Variant) -> &Weights {
        match variant {
            Variant::TypeA => &self.type_a,
            Variant::TypeB => &self.type_b,
            Variant::Crossover => &self.crossover,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FuzzyConfig {
    pub resolution: usize,
    pub job_length: VariableConfig,
    pub vm_mips: VariableConfig,
    pub vm_ram: VariableConfig,
    pub vm_bandwidth: VariableConfig,
    pub suitability: VariableConfig,
    pub weights: VariantWeights,
    pub bands: Bands,
}

impl Default for FuzzyConfig {
    fn default() -> Self {
        Self {
            resolution: 201,
            job_length: VariableConfig::template(1000.0, 20000.0),
            vm_mips: VariableConfig::explicit(
                500.0,
                2000.0,
                &[500.0, 500.0, 650.0, 1150.0],
                &[650.0, 1150.0, 1650.0],
                &[1150.0, 1650.0, 2000.0, 2000.0],
            ),
            vm_ram: VariableConfig::template(256.0, 2048.0),
            vm_bandwidth: VariableConfig::template(500.0, 1000.0),
            suitability: VariableConfig::explicit(
                0.0,
                1.0,
                &[0.0, 0.0, 0.25, 0.5],
                &[0.25, 0.5, 0.75],
                &[0.5, 0.75, 1.0, 1.0],
            ),
            weights: VariantWeights::default(),
            bands: Bands::default(),
        }
    }
}

impl FuzzyConfig {
    pub fn variable(&self, name: VariableName) -> Result<LinguisticVariable> {
        let cfg = match name {
            VariableName::JobLength => &self.job_length,
            VariableName::VmMips => &self.vm_mips,
            VariableName::VmRam => &self.vm_ram,
            VariableName::VmBandwidth => &self.vm_bandwidth,
            VariableName::Suitability => &self.suitability,
        };
        cfg.build(name)
    }

    pub fn system(&self, variant: Variant) -> Result<InferenceSystem> {
        let names = variant.inputs();
        let inputs = names
            .iter()
            .map(|&n| self.variable(n))
            .collect::<Result<Vec<_>>>()?;
        let weights = self.weights.of(variant);
        let resources: Vec<(VariableName, f64)> =
            names[1..].iter().map(|&n| (n, weights.of(n))).collect();
        let rules = generate_rules(names[0], &resources, &self.bands)?;
        InferenceSystem::new(inputs, self.variable(VariableName::Suitability)?, rules, self.resolution)
    }
}

/// The three inference systems used by the hybrid scheduler.
#[derive(Debug, Clone)]
pub struct SuitabilityModel {
    systems: [InferenceSystem; 3],
}

impl SuitabilityModel {
    pub fn new(cfg: &FuzzyConfig) -> Result<Self> {
        Ok(Self {
            systems: [
                cfg.system(Variant::TypeA)?,
                cfg.system(Variant::TypeB)?,
                cfg.system(Variant::Crossover)?,
            ],
        })
    }

    pub fn system(&self, variant: Variant) -> &InferenceSystem {
        &self.systems[variant.index()]
    }

    /// Crisp inputs for `variant`, in the order of [`Variant::inputs`].
    pub fn inputs(job: &Job, vm: &VmSpec, variant: Variant) -> Vec<f64> {
        variant
            .inputs()
            .iter()
            .map(|n| match n {
                VariableName::JobLength => job.length_mi,
                VariableName::VmMips => vm.mips,
                VariableName::VmRam => vm.ram_mb,
                VariableName::VmBandwidth => vm.bandwidth,
                VariableName::Suitability => unreachable!("suitability is never an input"),
            })
            .collect()
    }

    /// Defuzzified suitability of running `job` on `vm`, in `[0, 1]`.
    pub fn suitability(&self, job: &Job, vm: &VmSpec, variant: Variant) -> Result<f64> {
        self.system(variant).evaluate(&Self::inputs(job, vm, variant))
    }
}

impl Default for SuitabilityModel {
    fn default() -> Self {
        Self::new(&FuzzyConfig::default()).expect("embedded fuzzy defaults are valid")
    }
}
