//! Fuzzy combination of left/right detector errors into a separator error.
//!
//! Each detector's cost is turned into a signed, normalised error. The two
//! errors are fuzzified over five linguistic terms and combined by a fixed
//! five-rule Mamdani system (OR = max, AND = min, min implication, max
//! aggregation) whose output is defuzzified by its centroid.

use serde::{Deserialize, Serialize};

use crate::induction::Calibration;

/// Guards the normalisation when all training costs coincide.
pub const EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Negative,
    NegativeSmall,
    Zero,
    PositiveSmall,
    Positive,
}

impl Term {
    pub const ALL: [Term; 5] =
        [Term::Negative, Term::NegativeSmall, Term::Zero, Term::PositiveSmall, Term::Positive];

    fn index(self) -> usize {
        self as usize
    }
}

/// Triangular membership function `(left, peak, right)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinguisticTerm {
    pub term: Term,
    pub left: f64,
    pub peak: f64,
    pub right: f64,
}

impl LinguisticTerm {
    pub fn membership(&self, x: f64) -> f64 {
        if x <= self.peak {
            if self.peak == self.left {
                return if x == self.peak { 1.0 } else { 0.0 };
            }
            (1.0 - (self.peak - x).abs() / (self.peak - self.left)).max(0.0)
        } else {
            if self.right == self.peak {
                return 0.0;
            }
            (1.0 - (x - self.peak).abs() / (self.right - self.peak)).max(0.0)
        }
    }
}

/// Shape of the five-term partition and of the defuzzification grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Partition {
    pub peaks: [f64; 5],
    pub half_width: f64,
    pub domain: [f64; 2],
    pub samples: usize,
}

impl Default for Partition {
    fn default() -> Self {
        Partition { peaks: [-1.0, -0.5, 0.0, 0.5, 1.0], half_width: 0.5, domain: [-1.5, 1.5], samples: 1001 }
    }
}

impl Partition {
    pub fn term(&self, term: Term) -> LinguisticTerm {
        let peak = self.peaks[term.index()];
        LinguisticTerm { term, left: peak - self.half_width, peak, right: peak + self.half_width }
    }

    /// Memberships of a crisp input. The input is clamped to the domain and
    /// the outermost terms saturate beyond their peaks, so every input belongs
    /// to the partition with total degree 1.
    pub fn fuzzify(&self, e: f64) -> Memberships {
        let e = e.clamp(self.domain[0], self.domain[1]);
        let mut degrees = [0.0; 5];
        for term in Term::ALL {
            let t = self.term(term);
            degrees[term.index()] = match term {
                Term::Negative if e <= t.peak => 1.0,
                Term::Positive if e >= t.peak => 1.0,
                _ => t.membership(e),
            };
        }
        Memberships(degrees)
    }

    /// Sample points of the output domain, mirror-symmetric around its centre.
    fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.samples.max(3) | 1;
        let centre = (self.domain[0] + self.domain[1]) / 2.0;
        let step = (self.domain[1] - self.domain[0]) / (n - 1) as f64;
        let mid = (n - 1) / 2;
        (0..n).map(move |k| centre + (k as f64 - mid as f64) * step)
    }
}

/// Degrees of membership in the five terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Memberships(pub [f64; 5]);

impl Memberships {
    /// Bit patterns of the degrees, usable as a map key.
    pub fn key(&self) -> [u64; 5] {
        self.0.map(f64::to_bits)
    }
}

impl Memberships {
    pub fn get(&self, term: Term) -> f64 {
        self.0[term.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connective {
    And,
    Or,
}

/// `if ErrorLeft is <left> <connective> ErrorRight is <right> then ErrorTot is <consequent>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuzzyRule {
    pub left: Term,
    pub right: Term,
    pub connective: Connective,
    pub consequent: Term,
}

impl FuzzyRule {
    const fn new(term: Term, connective: Connective) -> Self {
        FuzzyRule { left: term, right: term, connective, consequent: term }
    }

    pub fn strength(&self, left: &Memberships, right: &Memberships) -> f64 {
        let (a, b) = (left.get(self.left), right.get(self.right));
        match self.connective {
            Connective::And => a.min(b),
            Connective::Or => a.max(b),
        }
    }
}

/// The fixed rule base.
pub const RULES: [FuzzyRule; 5] = [
    FuzzyRule::new(Term::PositiveSmall, Connective::Or),
    FuzzyRule::new(Term::Positive, Connective::Or),
    FuzzyRule::new(Term::Zero, Connective::And),
    FuzzyRule::new(Term::NegativeSmall, Connective::Or),
    FuzzyRule::new(Term::Negative, Connective::Or),
];

/// How left and right errors are combined into ErrorTot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combiner {
    #[default]
    Fuzzy,
    /// Plain sum of the two errors.
    Sum,
}

/// How a detector cost is turned into an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorMode {
    /// Deviation from `c_moy`, scaled so `c_min`/`c_max` map to -1/+1.
    Midpoint,
    /// Distance outside `[c_min, c_max]`, as a fraction of `c_max`.
    #[default]
    Range,
    /// Zero at or above `c_moy`; below it, scaled so `c_min` maps to -1.
    Floor,
}

impl ErrorMode {
    pub fn error(self, cost: f64, calibration: &Calibration) -> f64 {
        match self {
            ErrorMode::Midpoint => detector_error(cost, calibration),
            ErrorMode::Range => range_error(cost, calibration),
            ErrorMode::Floor => floor_error(cost, calibration),
        }
    }
}

/// Signed deviation of a cost from the calibrated midpoint, normalised so
/// that the training extremes sit at -1 and +1.
pub fn detector_error(cost: f64, calibration: &Calibration) -> f64 {
    let scale = (calibration.c_max - calibration.c_moy).max(EPSILON);
    (cost - calibration.c_moy) / scale
}

/// Zero inside the calibrated cost range; outside it, the signed distance to
/// the nearest end of the range relative to `c_max`.
pub fn range_error(cost: f64, calibration: &Calibration) -> f64 {
    let scale = calibration.c_max.max(EPSILON);
    if cost < calibration.c_min {
        (cost - calibration.c_min) / scale
    } else if cost > calibration.c_max {
        (cost - calibration.c_max) / scale
    } else {
        0.0
    }
}

/// Zero for costs at or above `c_moy`; below it, the shortfall relative to
/// `c_moy - c_min`.
pub fn floor_error(cost: f64, calibration: &Calibration) -> f64 {
    if cost >= calibration.c_moy {
        0.0
    } else {
        (cost - calibration.c_moy) / (calibration.c_moy - calibration.c_min).max(EPSILON)
    }
}

/// Mamdani inference over the five rules followed by centroid defuzzification.
pub fn infer_error_tot(left: f64, right: f64, partition: &Partition) -> f64 {
    Engine::new(partition).infer(left, right)
}

/// A partition with the output-term memberships tabulated over its
/// defuzzification grid, for repeated inference.
#[derive(Debug, Clone)]
pub struct Engine {
    partition: Partition,
    xs: Vec<f64>,
    table: [Vec<f64>; 5],
}

impl Engine {
    pub fn new(partition: &Partition) -> Self {
        let xs: Vec<f64> = partition.grid().collect();
        let table = Term::ALL.map(|term| {
            let t = partition.term(term);
            xs.iter().map(|&x| t.membership(x)).collect()
        });
        Engine { partition: partition.clone(), xs, table }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn infer(&self, left: f64, right: f64) -> f64 {
        self.infer_memberships(&self.partition.fuzzify(left), &self.partition.fuzzify(right))
    }

    /// Inference from already fuzzified inputs.
    pub fn infer_memberships(&self, ml: &Memberships, mr: &Memberships) -> f64 {
        let fired: Vec<(&[f64], f64)> = RULES
            .iter()
            .map(|rule| (self.table[rule.consequent.index()].as_slice(), rule.strength(ml, mr)))
            .filter(|&(_, strength)| strength > 0.0)
            .collect();
        let aggregate =
            |k: usize| fired.iter().map(|(column, strength)| column[k].min(*strength)).fold(0.0, f64::max);

        // Mirrored samples are summed pairwise so that mirrored inputs give
        // exactly negated outputs.
        let xs = &self.xs;
        let n = xs.len();
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..n / 2 {
            let (a, b) = (xs[k], xs[n - 1 - k]);
            let (ma, mb) = (aggregate(k), aggregate(n - 1 - k));
            num += a * ma + b * mb;
            den += ma + mb;
        }
        let centre = xs[n / 2];
        let mc = aggregate(n / 2);
        num += centre * mc;
        den += mc;
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }
}

/// Combine normalised left/right errors with the configured combiner.
pub fn combine(left: f64, right: f64, combiner: Combiner, partition: &Partition) -> f64 {
    match combiner {
        Combiner::Fuzzy => infer_error_tot(left, right, partition),
        Combiner::Sum => left + right,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Partition {
        Partition::default()
    }

    #[test]
    fn engine_reuse_matches_fresh_inference() {
        let engine = Engine::new(&p());
        for (l, r) in [(-0.3, 0.2), (0.7, 0.7), (-1.2, 0.4), (0.0, -0.05)] {
            assert_eq!(engine.infer(l, r), infer_error_tot(l, r, &p()));
            let (ml, mr) = (p().fuzzify(l), p().fuzzify(r));
            assert_eq!(engine.infer_memberships(&ml, &mr), engine.infer(l, r));
        }
    }

    #[test]
    fn detector_error_examples() {
        let c = Calibration { c_min: 1.0, c_max: 3.0, c_moy: 2.0 };
        assert_eq!(detector_error(2.0, &c), 0.0);
        assert_eq!(detector_error(3.0, &c), 1.0);
        assert_eq!(detector_error(1.0, &c), -1.0);
        let flat = Calibration { c_min: 1.5, c_max: 1.5, c_moy: 1.5 };
        assert_eq!(detector_error(1.5, &flat), 0.0);
        assert!(detector_error(1.4, &flat) < -1e6);
    }

    #[test]
    fn range_error_is_zero_inside_range() {
        let c = Calibration { c_min: 1.0, c_max: 4.0, c_moy: 2.5 };
        assert_eq!(range_error(1.0, &c), 0.0);
        assert_eq!(range_error(4.0, &c), 0.0);
        assert_eq!(range_error(0.0, &c), -0.25);
        assert_eq!(range_error(5.0, &c), 0.25);
        let zero = Calibration { c_min: 0.0, c_max: 0.0, c_moy: 0.0 };
        assert_eq!(range_error(0.0, &zero), 0.0);
    }

    #[test]
    fn fuzzify_examples() {
        let m = p().fuzzify(0.0);
        assert_eq!(m.0, [0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(p().fuzzify(0.5).get(Term::PositiveSmall), 1.0);
        let m = p().fuzzify(0.25);
        assert_eq!(m.get(Term::Zero), 0.5);
        assert_eq!(m.get(Term::PositiveSmall), 0.5);
        assert_eq!(m.get(Term::Positive), 0.0);
    }

    #[test]
    fn peaks_have_full_membership() {
        for (term, peak) in Term::ALL.iter().zip(p().peaks) {
            assert_eq!(p().fuzzify(peak).get(*term), 1.0);
            assert_eq!(p().term(*term).membership(peak), 1.0);
        }
    }

    #[test]
    fn memberships_form_a_partition() {
        for k in 0..=300 {
            let e = -1.5 + k as f64 * 0.01;
            let total: f64 = p().fuzzify(e).0.iter().sum();
            assert!(total > 0.0 && total <= 1.0 + 1e-12, "e={e} total={total}");
        }
    }

    #[test]
    fn inference_examples() {
        assert_eq!(infer_error_tot(0.0, 0.0, &p()), 0.0);
        // Peaks other than 0 are not grid points of the 1001-sample grid.
        assert!((infer_error_tot(1.0, 1.0, &p()) - 1.0).abs() < 1e-5);
        assert!((infer_error_tot(-1.0, -1.0, &p()) + 1.0).abs() < 1e-5);
        assert!((infer_error_tot(0.5, 0.5, &p()) - 0.5).abs() < 1e-5);
        let a = infer_error_tot(0.3, 0.1, &p());
        assert_eq!(infer_error_tot(-0.3, -0.1, &p()), -a);
    }

    #[test]
    fn sum_combiner() {
        assert_eq!(combine(0.25, -0.5, Combiner::Sum, &p()), -0.25);
    }

    #[test]
    fn rule_base_matches_printed_rules() {
        let ors = RULES.iter().filter(|r| r.connective == Connective::Or).count();
        assert_eq!(ors, 4);
        assert_eq!(RULES[2].consequent, Term::Zero);
        assert_eq!(RULES[2].connective, Connective::And);
    }
}
