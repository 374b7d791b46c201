//! Learning separator detectors from labelled pages.
//!
//! For each (zone, edge, side) the training windows are folded into a
//! frequency matrix `f(i, j)`: how often token class `j` was seen at distance
//! `i` from the separator. A candidate window is then scored token by token
//! with two fuzzy degrees of truth, one for the position of the class and one
//! for how often it occurred, and the detector cost is their summed product.
//! The min/max cost over the training windows calibrates each detector.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::{Combiner, ErrorMode, Partition};
use crate::page_model::{
    compute_moyl, extract_windows, validate_labels, DetectorWindow, Edge, LabelError, MoyL, Side,
    ZoneKind, ZoneLabels,
};
use crate::tokenizer::{tokenize, TokenClass, CLASS_COUNT};

/// Identifies the model file format.
pub const MODEL_FORMAT: &str = "fuzzwrap-model";
/// Current model file version.
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrainError {
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("training windows disagree on side, zone, edge or length")]
    MixedWindows,
    #[error("page `{page_id}`: {source}")]
    Label { page_id: String, source: LabelError },
    #[error(transparent)]
    NoRecords(LabelError),
}

/// Counts of token classes per distance from a separator.
///
/// Row 0 is the separator point itself and always stays zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyMatrix {
    pub n_instances: u32,
    pub rows: Vec<[u32; CLASS_COUNT]>,
}

impl FrequencyMatrix {
    pub fn zeros(moyl: MoyL) -> Self {
        FrequencyMatrix { n_instances: 0, rows: vec![[0; CLASS_COUNT]; moyl.get() + 1] }
    }

    /// Window length this matrix was built for.
    pub fn moyl(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn count(&self, distance: usize, class: TokenClass) -> u32 {
        match (class.column(), self.rows.get(distance)) {
            (Some(col), Some(row)) => row[col],
            _ => 0,
        }
    }

    /// Total occurrences of `class` over all distances.
    pub fn column_total(&self, class: TokenClass) -> u32 {
        class.column().map_or(0, |col| self.rows.iter().map(|row| row[col]).sum())
    }

    /// Nearest distance where `class` was observed, with its count.
    ///
    /// Ties between equally near distances go to the larger count, then to the
    /// larger distance.
    pub fn nearest_observed(&self, class: TokenClass, distance: usize) -> Option<(usize, u32)> {
        (1..=self.moyl())
            .map(|d| (d, self.count(d, class)))
            .filter(|&(_, f)| f > 0)
            .min_by(|&(da, fa), &(db, fb)| {
                da.abs_diff(distance)
                    .cmp(&db.abs_diff(distance))
                    .then(fb.cmp(&fa))
                    .then(db.cmp(&da))
            })
    }

    fn add(&mut self, window: &DetectorWindow) {
        for distance in 1..=self.moyl() {
            if let Some(col) = window.class_at(distance).column() {
                self.rows[distance][col] += 1;
            }
        }
        self.n_instances += 1;
    }
}

/// Fold training windows for one detector into a frequency matrix.
pub fn build_frequency_matrix(windows: &[DetectorWindow]) -> Result<FrequencyMatrix, TrainError> {
    let first = windows.first().ok_or(TrainError::EmptyTrainingSet)?;
    let consistent = windows.iter().all(|w| {
        w.side == first.side && w.zone == first.zone && w.edge == first.edge && w.len() == first.len()
    });
    if !consistent {
        return Err(TrainError::MixedWindows);
    }
    let moyl = MoyL::new(first.len()).ok_or(TrainError::MixedWindows)?;
    let mut matrix = FrequencyMatrix::zeros(moyl);
    for window in windows {
        matrix.add(window);
    }
    Ok(matrix)
}

/// Degree of truth that `class` belongs at `distance`.
///
/// 1 where the class was observed at that distance, otherwise decaying
/// linearly with the gap to the nearest observed distance, reaching 0 at a
/// gap of `width`.
pub fn position_truth(m: &FrequencyMatrix, class: TokenClass, distance: usize, width: u32) -> f64 {
    match m.nearest_observed(class, distance) {
        None => 0.0,
        Some((nearest, _)) => {
            let gap = nearest.abs_diff(distance) as f64;
            (1.0 - gap / f64::from(width.max(1))).max(0.0)
        }
    }
}

/// Degree of truth of how often `class` occurred at (or nearest to) `distance`.
pub fn occurrence_truth(m: &FrequencyMatrix, class: TokenClass, distance: usize) -> f64 {
    if m.n_instances == 0 {
        return 0.0;
    }
    match m.nearest_observed(class, distance) {
        None => 0.0,
        Some((_, count)) => f64::from(count) / f64::from(m.n_instances),
    }
}

pub fn token_cost(m: &FrequencyMatrix, class: TokenClass, distance: usize, width: u32) -> f64 {
    if class == TokenClass::Pad {
        return 0.0;
    }
    position_truth(m, class, distance, width) * occurrence_truth(m, class, distance)
}

/// Sum of token costs over distances `1..=moyL` of `window`.
pub fn detector_cost(m: &FrequencyMatrix, window: &DetectorWindow, width: u32) -> f64 {
    detector_cost_with(window, |class, distance| token_cost(m, class, distance, width))
}

/// Detector cost with an arbitrary per-token cost function.
pub fn detector_cost_with(
    window: &DetectorWindow,
    mut cost: impl FnMut(TokenClass, usize) -> f64,
) -> f64 {
    (1..=window.len()).map(|d| cost(window.class_at(d), d)).sum()
}

/// Min, max and midpoint of the detector cost over the training windows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub c_min: f64,
    pub c_max: f64,
    pub c_moy: f64,
}

impl Calibration {
    pub fn from_costs(costs: impl IntoIterator<Item = f64>) -> Option<Self> {
        let (c_min, c_max) = costs
            .into_iter()
            .fold(None, |acc: Option<(f64, f64)>, c| match acc {
                None => Some((c, c)),
                Some((lo, hi)) => Some((lo.min(c), hi.max(c))),
            })?;
        Some(Calibration { c_min, c_max, c_moy: (c_min + c_max) / 2.0 })
    }
}

pub fn calibrate(
    m: &FrequencyMatrix,
    windows: &[DetectorWindow],
    width: u32,
) -> Result<Calibration, TrainError> {
    Calibration::from_costs(windows.iter().map(|w| detector_cost(m, w, width)))
        .ok_or(TrainError::EmptyTrainingSet)
}

/// A learned detector on one side of a separator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    pub side: Side,
    #[serde(flatten)]
    pub calibration: Calibration,
    pub matrix: FrequencyMatrix,
}

impl DetectorModel {
    pub fn learn(windows: &[DetectorWindow], width: u32) -> Result<Self, TrainError> {
        let matrix = build_frequency_matrix(windows)?;
        let calibration = calibrate(&matrix, windows, width)?;
        Ok(DetectorModel { side: windows[0].side, calibration, matrix })
    }

    pub fn cost(&self, window: &DetectorWindow, width: u32) -> f64 {
        detector_cost(&self.matrix, window, width)
    }
}

/// Begin or end separator of one zone: a left and a right detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatorModel {
    pub zone: ZoneKind,
    pub edge: Edge,
    pub left: DetectorModel,
    pub right: DetectorModel,
}

/// Tunables persisted with a wrapper. Missing fields take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WrapperConfig {
    /// Gap (in tokens) at which the position truth reaches zero.
    pub width: u32,
    /// Largest accepted |ErrorTot| for a separator hit.
    pub tau: f64,
    pub combiner: Combiner,
    pub error_mode: ErrorMode,
    pub partition: Partition,
}

impl Default for WrapperConfig {
    fn default() -> Self {
        WrapperConfig {
            width: 2,
            tau: 0.25,
            combiner: Combiner::Fuzzy,
            error_mode: ErrorMode::Range,
            partition: Partition::default(),
        }
    }
}

/// Everything needed to extract tuples from pages of one site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WrapperModel {
    pub format: String,
    pub version: u32,
    pub moyl: MoyL,
    pub config: WrapperConfig,
    pub separators: Vec<SeparatorModel>,
}

impl WrapperModel {
    pub fn separator(&self, zone: &ZoneKind, edge: Edge) -> Option<&SeparatorModel> {
        self.separators.iter().find(|s| &s.zone == zone && s.edge == edge)
    }

    /// Attribute names with learned separators, sorted.
    pub fn attribute_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .separators
            .iter()
            .filter_map(|s| match &s.zone {
                ZoneKind::Attribute(name) => Some(name.clone()),
                _ => None,
            })
            .collect();
        names.dedup();
        names
    }

    /// Pretty JSON with a trailing newline; field order is fixed by the types.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("model serialises");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// A page and its labels, as handed to [`train`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingPage {
    pub html: String,
    pub labels: ZoneLabels,
}

/// Learn a wrapper from labelled pages.
pub fn train(pages: &[TrainingPage], config: &WrapperConfig) -> Result<WrapperModel, TrainError> {
    if pages.is_empty() {
        return Err(TrainError::EmptyTrainingSet);
    }
    let mut all_tokens = Vec::with_capacity(pages.len());
    let mut all_labels = Vec::with_capacity(pages.len());
    for page in pages {
        let tokens = tokenize(&page.html);
        let labels = validate_labels(&page.html, &tokens, &page.labels).map_err(|source| {
            TrainError::Label { page_id: page.labels.page_id.clone(), source }
        })?;
        all_tokens.push(tokens);
        all_labels.push(labels);
    }
    let moyl = compute_moyl(&all_labels, &all_tokens).map_err(TrainError::NoRecords)?;

    let mut groups: BTreeMap<(ZoneKind, Edge, Side), Vec<DetectorWindow>> = BTreeMap::new();
    for (tokens, labels) in all_tokens.iter().zip(&all_labels) {
        for window in extract_windows(tokens, labels, moyl) {
            groups.entry((window.zone.clone(), window.edge, window.side)).or_default().push(window);
        }
    }

    let mut separators = Vec::new();
    let mut pending_left: Option<((ZoneKind, Edge), DetectorModel)> = None;
    for ((zone, edge, side), windows) in groups {
        let detector = DetectorModel::learn(&windows, config.width)?;
        match side {
            Side::Left => pending_left = Some(((zone, edge), detector)),
            Side::Right => {
                let ((left_zone, left_edge), left) =
                    pending_left.take().expect("left windows precede right windows");
                debug_assert!(left_zone == zone && left_edge == edge);
                separators.push(SeparatorModel { zone, edge, left, right: detector });
            }
        }
    }

    Ok(WrapperModel {
        format: MODEL_FORMAT.to_string(),
        version: MODEL_VERSION,
        moyl,
        config: config.clone(),
        separators,
    })
}
