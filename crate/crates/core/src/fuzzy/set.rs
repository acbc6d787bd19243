use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linguistic label of an input variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Low,
    Medium,
    High,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Low, Label::Medium, Label::High];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Label> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Low => "low",
            Label::Medium => "medium",
            Label::High => "high",
        }
    }
}

/// Linguistic label of the suitability output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grade {
    Poor,
    Adequate,
    Good,
}

impl Grade {
    pub const ALL: [Grade; 3] = [Grade::Poor, Grade::Adequate, Grade::Good];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Grade::Poor => "poor",
            Grade::Adequate => "adequate",
            Grade::Good => "good",
        }
    }
}

/// Names of the linguistic variables known to the scheduler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariableName {
    JobLength,
    VmMips,
    VmRam,
    VmBandwidth,
    Suitability,
}

impl VariableName {
    pub fn name(self) -> &'static str {
        match self {
            VariableName::JobLength => "job_length",
            VariableName::VmMips => "vm_mips",
            VariableName::VmRam => "vm_ram",
            VariableName::VmBandwidth => "vm_bandwidth",
            VariableName::Suitability => "suitability",
        }
    }
}

/// Piecewise-linear membership curve.
///
/// A trapezoid whose first two breakpoints coincide is a left shoulder and
/// holds membership 1 for every `x` below it; one whose last two coincide is
/// a right shoulder and holds 1 above it. This keeps boundary sets continuous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Triangle { a: f64, b: f64, c: f64 },
    Trapezoid { a: f64, b: f64, c: f64, d: f64 },
}

impl Shape {
    /// Builds a shape from 3 (triangle) or 4 (trapezoid) non-decreasing breakpoints.
    pub fn from_breakpoints(points: &[f64]) -> Result<Shape> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::Config(format!("non-finite breakpoint in {points:?}")));
        }
        if points.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Config(format!(
                "breakpoints must be non-decreasing, got {points:?}"
            )));
        }
        match *points {
            [a, b, c] => {
                if a == c {
                    return Err(Error::Config(format!("degenerate triangle {points:?}")));
                }
                Ok(Shape::Triangle { a, b, c })
            }
            [a, b, c, d] => {
                if a == d {
                    return Err(Error::Config(format!("degenerate trapezoid {points:?}")));
                }
                Ok(Shape::Trapezoid { a, b, c, d })
            }
            _ => Err(Error::Config(format!(
                "a fuzzy set needs 3 or 4 breakpoints, got {}",
                points.len()
            ))),
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Shape::Triangle { a, b, c } => vec![a, b, c],
            Shape::Trapezoid { a, b, c, d } => vec![a, b, c, d],
        }
    }

    pub fn first(&self) -> f64 {
        match *self {
            Shape::Triangle { a, .. } | Shape::Trapezoid { a, .. } => a,
        }
    }

    pub fn last(&self) -> f64 {
        match *self {
            Shape::Triangle { c, .. } => c,
            Shape::Trapezoid { d, .. } => d,
        }
    }

    pub fn membership(&self, x: f64) -> f64 {
        match *self {
            Shape::Triangle { a, b, c } => {
                if x < a || x > c {
                    0.0
                } else if x < b {
                    (x - a) / (b - a)
                } else if x == b {
                    1.0
                } else {
                    (c - x) / (c - b)
                }
            }
            Shape::Trapezoid { a, b, c, d } => {
                if x < a {
                    if a == b {
                        1.0
                    } else {
                        0.0
                    }
                } else if x < b {
                    (x - a) / (b - a)
                } else if x <= c {
                    1.0
                } else if x < d {
                    (d - x) / (d - c)
                } else if c == d {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// The x value at which the curve first reaches 1.
    pub fn peak(&self) -> f64 {
        match *self {
            Shape::Triangle { b, .. } | Shape::Trapezoid { b, .. } => b,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzySet {
    pub shape: Shape,
}

impl FuzzySet {
    pub fn new(shape: Shape) -> Self {
        Self { shape }
    }

    pub fn triangle(a: f64, b: f64, c: f64) -> Result<Self> {
        Shape::from_breakpoints(&[a, b, c]).map(Self::new)
    }

    pub fn trapezoid(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Shape::from_breakpoints(&[a, b, c, d]).map(Self::new)
    }

    /// Degree of membership of `x`, in `[0, 1]`.
    pub fn membership(&self, x: f64) -> f64 {
        self.shape.membership(x)
    }
}

/// A variable partitioned into three overlapping fuzzy sets ordered low to high.
#[derive(Debug, Clone, PartialEq)]
pub struct LinguisticVariable {
    name: VariableName,
    lo: f64,
    hi: f64,
    sets: [FuzzySet; 3],
}

impl LinguisticVariable {
    /// Validates the universe, the overlap rule (end of the first set is the
    /// start of the third) and complete coverage of the universe.
    pub fn new(name: VariableName, universe: (f64, f64), sets: [FuzzySet; 3]) -> Result<Self> {
        let (lo, hi) = universe;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Config(format!(
                "{}: universe [{lo}, {hi}] must satisfy lo < hi",
                name.name()
            )));
        }
        if sets[0].shape.last() != sets[2].shape.first() {
            return Err(Error::Config(format!(
                "{}: last breakpoint of the first set ({}) must equal the first breakpoint of the third set ({})",
                name.name(),
                sets[0].shape.last(),
                sets[2].shape.first()
            )));
        }
        let var = Self { name, lo, hi, sets };
        if let Some(x) = var.coverage_gap() {
            return Err(Error::Config(format!(
                "{}: no fuzzy set covers x = {x}",
                name.name()
            )));
        }
        Ok(var)
    }

    /// Three sets following the proportional template on `[lo, hi]`.
    pub fn proportional(name: VariableName, lo: f64, hi: f64) -> Result<Self> {
        let span = hi - lo;
        let at = |f: f64| lo + f * span;
        Self::new(
            name,
            (lo, hi),
            [
                FuzzySet::trapezoid(lo, lo, at(0.15), at(0.5))?,
                FuzzySet::triangle(at(0.15), at(0.5), at(0.85))?,
                FuzzySet::trapezoid(at(0.5), at(0.85), hi, hi)?,
            ],
        )
    }

    pub fn name(&self) -> VariableName {
        self.name
    }

    pub fn universe(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn sets(&self) -> &[FuzzySet; 3] {
        &self.sets
    }

    pub fn set(&self, label: Label) -> &FuzzySet {
        &self.sets[label.index()]
    }

    /// Degrees of `x` (saturated to the universe) in the low, medium and high sets.
    pub fn fuzzify(&self, x: f64) -> [f64; 3] {
        let x = x.clamp(self.lo, self.hi);
        [
            self.sets[0].membership(x),
            self.sets[1].membership(x),
            self.sets[2].membership(x),
        ]
    }

    // Each membership curve is linear between consecutive breakpoints, so a
    // zero of the pointwise max inside a segment forces a zero at its midpoint.
    fn coverage_gap(&self) -> Option<f64> {
        let mut xs: Vec<f64> = self
            .sets
            .iter()
            .flat_map(|s| s.shape.breakpoints())
            .chain([self.lo, self.hi])
            .filter(|x| (self.lo..=self.hi).contains(x))
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mids: Vec<f64> = xs.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        xs.into_iter()
            .chain(mids)
            .find(|&x| self.fuzzify(x).iter().all(|&d| d <= 0.0))
    }
}
