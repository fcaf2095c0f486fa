use serde::Serialize;

/// A ratio with an inner/outer discretization bracket.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub op: String,
    pub n: usize,
    /// Free-form `key=value` description of the inputs.
    pub params: String,
    pub resolution: usize,
    pub value: f64,
    pub conservative: f64,
    pub optimistic: f64,
    pub seed: Option<u64>,
    /// The measured set was empty; the ratio is reported as 0.
    pub empty: bool,
    /// The bracket does not determine the ratio (a denominator side vanished).
    pub inconclusive: bool,
}

impl RatioReport {
    pub fn new(op: &str, n: usize, params: impl Into<String>, resolution: usize) -> Self {
        Self {
            op: op.into(),
            n,
            params: params.into(),
            resolution,
            value: 0.0,
            conservative: 0.0,
            optimistic: 0.0,
            seed: None,
            empty: false,
            inconclusive: false,
        }
    }

    pub fn width(&self) -> f64 {
        self.optimistic - self.conservative
    }

    pub fn with_values(mut self, value: f64, conservative: f64, optimistic: f64) -> Self {
        self.value = value;
        self.conservative = conservative.min(optimistic);
        self.optimistic = optimistic.max(conservative);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}
