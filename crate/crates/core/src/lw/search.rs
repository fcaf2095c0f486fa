use super::ratio::lw_ratio;
use crate::error::{Error, Result};
use crate::grid::Region;
use crate::heis::{HDim, HPoint};
use crate::report::RatioReport;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Parametric set families explored by [`extremizer_search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchFamily {
    /// `∏ [−w_a, w_a]`, one half-width per coordinate.
    Boxes,
    /// Korányi ball: radius, then center coordinates.
    KoranyiBall,
    /// Union of `[−1,1]^{2n} × [−1,1]` and a second box of scale `s`
    /// shifted by `d`: parameters `(s, d_1, .., d_{2n+1})`.
    TwoBoxes,
}

impl SearchFamily {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "boxes" => Ok(Self::Boxes),
            "koranyi-ball" => Ok(Self::KoranyiBall),
            "two-boxes" => Ok(Self::TwoBoxes),
            _ => Err(Error::InvalidParameter(format!("unknown search family {s:?}"))),
        }
    }

    /// Lower and upper bounds of the parameter box.
    pub fn bounds(self, n: HDim) -> (Vec<f64>, Vec<f64>) {
        let d = n.ambient();
        match self {
            Self::Boxes => (vec![0.2; d], vec![2.0; d]),
            Self::KoranyiBall => {
                let mut lo = vec![0.3];
                let mut hi = vec![2.0];
                lo.extend(vec![-1.0; d]);
                hi.extend(vec![1.0; d]);
                (lo, hi)
            }
            Self::TwoBoxes => {
                let mut lo = vec![0.2];
                let mut hi = vec![1.5];
                lo.extend(vec![-2.5; d]);
                hi.extend(vec![2.5; d]);
                (lo, hi)
            }
        }
    }

    pub fn region(self, n: HDim, params: &[f64]) -> Result<Region> {
        let d = n.ambient();
        match self {
            Self::Boxes => Region::centered_box(params),
            Self::KoranyiBall => {
                let c = &params[1..];
                Region::koranyi_ball(n, HPoint::new(c[..d - 1].to_vec(), c[d - 1])?, params[0])
            }
            Self::TwoBoxes => {
                let s = params[0];
                let shift = &params[1..];
                let a = Region::centered_box(&vec![1.0; d])?;
                let lo = shift.iter().map(|c| c - s).collect();
                let hi = shift.iter().map(|c| c + s).collect();
                Region::union(&a, &Region::axis_box(lo, hi)?)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Poll iterations per restart.
    pub iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    pub resolution: usize,
    /// Stop once the step falls below this fraction of the parameter range.
    pub min_step: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { iterations: 40, restarts: 3, seed: 0, resolution: 32, min_step: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub restart: usize,
    pub iteration: usize,
    pub params: Vec<f64>,
    pub ratio: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub family: SearchFamily,
    pub best_params: Vec<f64>,
    pub best_ratio: f64,
    /// Re-evaluation of the best parameters.
    pub best_report: RatioReport,
    pub trace: Vec<TraceEntry>,
    pub seed: u64,
}

fn objective(family: SearchFamily, n: HDim, unit: &[f64], lo: &[f64], hi: &[f64], res: usize) -> Option<f64> {
    let params: Vec<f64> = unit.iter().zip(lo.iter().zip(hi)).map(|(u, (l, h))| l + u * (h - l)).collect();
    let region = family.region(n, &params).ok()?;
    let r = lw_ratio(&region, n, res).ok()?;
    (!r.empty && !r.inconclusive && r.value.is_finite()).then_some(r.value)
}

/// Maximize `lw_ratio` over a parametric family by compass search.
///
/// Each restart polls `±step` along every coordinate of the normalized
/// parameter box, moves to the first improvement and halves the step when
/// none is found. Restart 0 starts at the box center; the others at seeded
/// random points. Restarts run in parallel and are merged in index order.
pub fn extremizer_search(family: SearchFamily, n: HDim, config: &SearchConfig) -> Result<SearchResult> {
    if config.restarts == 0 || config.resolution < 2 {
        return Err(Error::InvalidParameter("need restarts >= 1 and resolution >= 2".into()));
    }
    let (lo, hi) = family.bounds(n);
    let d = lo.len();
    let runs: Vec<(Option<(Vec<f64>, f64)>, Vec<TraceEntry>)> = (0..config.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(restart as u64);
            let mut x: Vec<f64> = if restart == 0 { vec![0.5; d] } else { (0..d).map(|_| rng.gen::<f64>()).collect() };
            let eval = |u: &[f64]| objective(family, n, u, &lo, &hi, config.resolution);
            let mut fx = eval(&x);
            let mut step = 0.25;
            let mut trace = Vec::new();
            for iteration in 0..config.iterations {
                if step < config.min_step {
                    break;
                }
                let mut moved = false;
                'poll: for a in 0..d {
                    for dir in [1.0, -1.0] {
                        let mut y = x.clone();
                        y[a] = (y[a] + dir * step).clamp(0.0, 1.0);
                        if y[a] == x[a] {
                            continue;
                        }
                        if let Some(fy) = eval(&y) {
                            if fx.map_or(true, |f| fy > f) {
                                x = y;
                                fx = Some(fy);
                                moved = true;
                                break 'poll;
                            }
                        }
                    }
                }
                if !moved {
                    step /= 2.0;
                }
                let params = x.iter().zip(lo.iter().zip(&hi)).map(|(u, (l, h))| l + u * (h - l)).collect();
                trace.push(TraceEntry { restart, iteration, params, ratio: fx.unwrap_or(f64::NAN), step });
            }
            (fx.map(|f| (x, f)), trace)
        })
        .collect();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut trace = Vec::new();
    for (run, t) in runs {
        trace.extend(t);
        if let Some((x, f)) = run {
            if best.as_ref().map_or(true, |b| f > b.1) {
                best = Some((x, f));
            }
        }
    }
    let (x, _) = best.ok_or(Error::BudgetExhausted)?;
    let best_params: Vec<f64> = x.iter().zip(lo.iter().zip(&hi)).map(|(u, (l, h))| l + u * (h - l)).collect();
    let best_report = lw_ratio(&family.region(n, &best_params)?, n, config.resolution)?.with_seed(config.seed);
    Ok(SearchResult { family, best_ratio: best_report.value, best_params, best_report, trace, seed: config.seed })
}
