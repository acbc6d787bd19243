use super::rules::FuzzyRule;
use super::set::{Grade, LinguisticVariable, VariableName};
use crate::error::{Error, Result};

/// Aggregated output fuzzy region sampled uniformly over the output universe.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputRegion {
    pub lo: f64,
    pub hi: f64,
    /// Membership at `lo + i * (hi - lo) / (len - 1)`.
    pub samples: Vec<f64>,
}

impl OutputRegion {
    pub fn x(&self, i: usize) -> f64 {
        sample_x(self.lo, self.hi, self.samples.len(), i)
    }

    /// Discrete centroid `sum(x_i * mu_i) / sum(mu_i)`.
    pub fn centroid(&self) -> Result<f64> {
        if self.samples.len() < 3 {
            return Err(Error::Config(format!(
                "output region needs at least 3 samples, got {}",
                self.samples.len()
            )));
        }
        let (mut moment, mut mass) = (0.0, 0.0);
        for (i, &mu) in self.samples.iter().enumerate() {
            moment += self.x(i) * mu;
            mass += mu;
        }
        if mass <= 0.0 {
            return Err(Error::EmptyRegion);
        }
        Ok(moment / mass)
    }
}

/// Crisp value from a sampled region by the discrete centroid.
pub fn defuzzify_centroid(region: &OutputRegion) -> Result<f64> {
    region.centroid()
}

fn sample_x(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    lo + (hi - lo) * i as f64 / (n - 1) as f64
}

/// Mamdani inference system over three-label inputs with a complete rule base.
///
/// Rules are compiled into a table indexed by the mixed-radix code of their
/// input labels (first input most significant).
#[derive(Debug, Clone)]
pub struct InferenceSystem {
    inputs: Vec<LinguisticVariable>,
    output: LinguisticVariable,
    rules: Vec<FuzzyRule>,
    table: Vec<Grade>,
    resolution: usize,
    // membership of each output grade at every sample point
    grade_curves: [Vec<f64>; 3],
}

impl InferenceSystem {
    pub fn new(
        inputs: Vec<LinguisticVariable>,
        output: LinguisticVariable,
        rules: Vec<FuzzyRule>,
        resolution: usize,
    ) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::Config("inference system needs at least one input".into()));
        }
        if resolution < 3 {
            return Err(Error::Config(format!(
                "resolution must be at least 3, got {resolution}"
            )));
        }
        if output.name() != VariableName::Suitability || output.universe() != (0.0, 1.0) {
            return Err(Error::Config(
                "output must be the suitability variable on [0, 1]".into(),
            ));
        }
        for (i, var) in inputs.iter().enumerate() {
            if inputs[..i].iter().any(|v| v.name() == var.name()) {
                return Err(Error::Config(format!("duplicate input {}", var.name().name())));
            }
        }
        let arity = inputs.len();
        let size = 3usize.pow(arity as u32);
        let mut table: Vec<Option<Grade>> = vec![None; size];
        for rule in &rules {
            if rule.antecedent.len() != arity {
                return Err(Error::Config(format!(
                    "rule {rule:?} must constrain all {arity} inputs"
                )));
            }
            let mut code = 0;
            for var in &inputs {
                let label = rule.label_of(var.name()).ok_or_else(|| {
                    Error::Config(format!(
                        "rule {rule:?} does not mention input {}",
                        var.name().name()
                    ))
                })?;
                code = code * 3 + label.index();
            }
            if table[code].replace(rule.consequent).is_some() {
                return Err(Error::Config(format!("duplicate rule for {:?}", rule.antecedent)));
            }
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(code, g)| {
                g.ok_or_else(|| Error::Config(format!("rule base incomplete: no rule for combination #{code}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let (lo, hi) = output.universe();
        let curve = |g: usize| {
            (0..resolution)
                .map(|i| output.sets()[g].membership(sample_x(lo, hi, resolution, i)))
                .collect::<Vec<_>>()
        };
        let grade_curves = [curve(0), curve(1), curve(2)];
        Ok(Self {
            inputs,
            output,
            rules,
            table,
            resolution,
            grade_curves,
        })
    }

    pub fn inputs(&self) -> &[LinguisticVariable] {
        &self.inputs
    }

    pub fn output(&self) -> &LinguisticVariable {
        &self.output
    }

    pub fn rules(&self) -> &[FuzzyRule] {
        &self.rules
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Firing strength aggregated per output grade: the max over rules with
    /// that consequent of the min of their antecedent degrees.
    pub fn grade_strengths(&self, crisp: &[f64]) -> Result<[f64; 3]> {
        if crisp.len() != self.inputs.len() {
            return Err(Error::Arity {
                expected: self.inputs.len(),
                got: crisp.len(),
            });
        }
        let degrees: Vec<[f64; 3]> = self
            .inputs
            .iter()
            .zip(crisp)
            .map(|(v, &x)| v.fuzzify(x))
            .collect();
        let mut strengths = [0.0f64; 3];
        self.accumulate(&degrees, 0, 0, 1.0, &mut strengths);
        Ok(strengths)
    }

    // Depth-first walk over label combinations, skipping zero degrees.
    fn accumulate(&self, degrees: &[[f64; 3]], depth: usize, code: usize, strength: f64, out: &mut [f64; 3]) {
        if depth == degrees.len() {
            let g = self.table[code].index();
            out[g] = out[g].max(strength);
            return;
        }
        for (label, &d) in degrees[depth].iter().enumerate() {
            if d > 0.0 {
                self.accumulate(degrees, depth + 1, code * 3 + label, strength.min(d), out);
            }
        }
    }

    /// Min-implication, max-aggregation output region.
    ///
    /// Clipping every rule's consequent at its strength and taking the
    /// pointwise max is identical to clipping each grade's curve at the
    /// strongest rule for that grade, which is what is computed here.
    pub fn infer(&self, crisp: &[f64]) -> Result<OutputRegion> {
        let strengths = self.grade_strengths(crisp)?;
        let samples = (0..self.resolution).map(|i| self.region_at(&strengths, i)).collect();
        let (lo, hi) = self.output.universe();
        Ok(OutputRegion { lo, hi, samples })
    }

    fn region_at(&self, strengths: &[f64; 3], i: usize) -> f64 {
        (0..3)
            .map(|g| strengths[g].min(self.grade_curves[g][i]))
            .fold(0.0, f64::max)
    }

    /// `infer` followed by centroid defuzzification, without materializing the region.
    pub fn evaluate(&self, crisp: &[f64]) -> Result<f64> {
        let strengths = self.grade_strengths(crisp)?;
        let (lo, hi) = self.output.universe();
        let (mut moment, mut mass) = (0.0, 0.0);
        for i in 0..self.resolution {
            let mu = self.region_at(&strengths, i);
            moment += sample_x(lo, hi, self.resolution, i) * mu;
            mass += mu;
        }
        if mass <= 0.0 {
            return Err(Error::EmptyRegion);
        }
        Ok(moment / mass)
    }
}
