//! The bundled acceptance suite: eleven numbered criteria, each measured,
//! timed and reported as a pass/fail line.

use super::fixtures::{gauge_bump, planar_box, planar_input, random_translations};
use crate::error::Result;
use crate::grid::{GridSpec, Region};
use crate::heis::{poly_height_family, HDim, HPoint, HeightFamily, PolyHeightSpec};
use crate::lw::{
    euclidean_counterexample, exponent_table, h1_box_ratio, invariance_with, lw_ratio, region_suite, sharpness_sweep,
    suite_ratios,
};
use crate::numeric::rel_diff;
use crate::planar::{
    l32l3_certificate, op_s, output_l3_norm, pairing_check, radon_transform_with, slice_grid, test_bank,
    NormSettings, PlanarOperator, RadonSampling, SCoeffs, Verdict,
};
use crate::sobolev::{isoperimetric_ratio, levelset_table, sobolev_ratio, BandCells};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AcceptanceLevel {
    /// Reduced resolutions; the whole suite finishes in a few minutes.
    Quick,
    /// The stated resolutions.
    Full,
}

impl AcceptanceLevel {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Self::Quick),
            "full" => Ok(Self::Full),
            _ => Err(crate::Error::InvalidParameter(format!("level must be quick or full, got {s:?}"))),
        }
    }

    fn pick<T>(self, quick: T, full: T) -> T {
        match self {
            Self::Quick => quick,
            Self::Full => full,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: &'static str,
    pub pass: bool,
    /// Measured values, human-readable.
    pub measured: String,
    pub seconds: f64,
    pub limit_seconds: Option<f64>,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        let limit = self.limit_seconds.map_or(String::new(), |l| format!(" / {l:.0} s"));
        write!(f, "[{tag}] criterion {:>2} {}: {} ({:.1} s{limit})", self.id, self.title, self.measured, self.seconds)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AcceptanceReport {
    pub level: AcceptanceLevel,
    pub results: Vec<CriterionResult>,
}

impl AcceptanceReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }
}

/// Criterion ids and titles in order.
pub const CRITERIA: [(usize, &str, Option<f64>); 11] = [
    (1, "H1 box sharpness", Some(60.0)),
    (2, "Euclidean counterexample", Some(5.0)),
    (3, "exponent arithmetic", Some(1.0)),
    (4, "Radon oracle", Some(60.0)),
    (5, "S-operator scaling", Some(90.0)),
    (6, "pairing identity", Some(60.0)),
    (7, "invariance suite", Some(180.0)),
    (8, "level-set lemma", Some(120.0)),
    (9, "degeneracy detection", Some(120.0)),
    (10, "H2 smoke test", Some(240.0)),
    (11, "empirical-constant stability", None),
];

type Outcome = Result<(bool, String)>;

fn h(n: usize) -> HDim {
    HDim::new(n).expect("n >= 1")
}

fn box_sharpness(level: AcceptanceLevel) -> Outcome {
    let res = level.pick(128, 256);
    let table = sharpness_sweep(h(1), &[0.5, 1.0, 2.0], res)?;
    let exact = h1_box_ratio();
    let worst = table.rows.iter().map(|r| rel_diff(r.1.value, exact)).fold(0.0, f64::max);
    let values: Vec<String> = table.rows.iter().map(|(r, rep)| format!("r={r}:{:.5}", rep.value)).collect();
    Ok((
        worst < 0.03 && table.spread < 0.01,
        format!("{} exact {exact:.5} max dev {:.2}% spread {:.3}% at {res}", values.join(" "), 100.0 * worst, 100.0 * table.spread),
    ))
}

fn euclid(_: AcceptanceLevel) -> Outcome {
    let r = euclidean_counterexample(0.01, 10.0)?;
    let ok = (r.lambda_max - 0.5).abs() < 1e-9 && (r.lambda_min - 0.75).abs() < 1e-9;
    Ok((ok, format!("lambda_max {} lambda_min {}", r.lambda_max, r.lambda_min)))
}

fn exponents(_: AcceptanceLevel) -> Outcome {
    let mut failed = Vec::new();
    let mut count = 0;
    for n in 1..=6 {
        for c in exponent_table(h(n))?.identities() {
            count += 1;
            if !c.holds {
                failed.push(format!("n={n} {}", c.name));
            }
        }
    }
    Ok((failed.is_empty(), format!("{count} identities for n=1..6, failures: {failed:?}")))
}

fn radon_oracle(level: AcceptanceLevel) -> Outcome {
    let cells = level.pick(128, 256);
    let disk = planar_input("disk", cells)?;
    let sino = radon_transform_with(&disk, 16, 257, RadonSampling { radius: None, line_samples: Some(512) })?;
    let chord_dev = (0..sino.angles.len()).map(|a| rel_diff(sino.at(a, 128), 2.0)).fold(0.0, f64::max);
    let settings = NormSettings::default();
    let radon = PlanarOperator::Radon { n_angles: 256, n_offsets: 256 };
    let mut ok = chord_dev < 0.02;
    let mut parts = vec![format!("chord dev {:.3}%", 100.0 * chord_dev)];
    for name in ["disk", "gaussian"] {
        let f = planar_input(name, cells)?;
        let t = output_l3_norm(&PlanarOperator::T, &f, &settings)?.value;
        let r = output_l3_norm(&radon, &f, &settings)?.value;
        ok &= t <= 1.03 * r;
        parts.push(format!("{name}: |Tf|3 {t:.4} <= |Rf|3 {r:.4}"));
    }
    Ok((ok, parts.join("; ")))
}

fn s_scaling(level: AcceptanceLevel) -> Outcome {
    let cells = level.pick(48, 64);
    let f = planar_input("disk", cells)?;
    let settings = NormSettings::default();
    let scaled = [1.0, 2.0, 4.0]
        .iter()
        .map(|&b| Ok(output_l3_norm(&PlanarOperator::S(SCoeffs::shear(b)), &f, &settings)?.value * b.cbrt()))
        .collect::<Result<Vec<f64>>>()?;
    let max = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = max / min - 1.0;

    let bump = planar_input("gaussian", cells)?;
    let c = SCoeffs { alpha: 1.0, beta: 1.5, gamma: 0.3, delta: -0.2, epsilon: 0.4, kappa: 0.1 };
    let out = GridSpec::covering(&[-1.0, -1.0], &[1.0, 1.0], &[24, 24], 0)?;
    let s = op_s(&bump, c, &out)?;
    let mu = PlanarOperator::Parabola { alpha: -c.alpha };
    let mut worst: f64 = 0.0;
    let (mut idx, mut p) = ([0usize; 2], [0.0; 2]);
    for flat in 0..out.len() {
        out.center_of(flat, &mut idx, &mut p);
        let (u, v) = c.parabola_reduction(p[0], p[1]);
        let rhs = c.alpha.abs().powf(-1.0 / 3.0) * mu.evaluate(&bump, u, v)?;
        worst = worst.max((s.samples[flat] - rhs).abs());
    }
    let reduction = worst / s.max_abs();
    Ok((
        spread < 0.02 && reduction < 0.03,
        format!(
            "|S_b f|3 b^(1/3) = {:?} spread {:.2e}; reduction max rel dev {:.2e}",
            scaled.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>(),
            spread,
            reduction
        ),
    ))
}

fn pairing(level: AcceptanceLevel) -> Outcome {
    let top = level.pick(64, 128);
    let err = |n: usize| -> Result<(f64, f64)> {
        let f1 = planar_box([0.0, 0.0], [1.0, 1.0], n)?;
        let f2 = planar_box([0.3, 0.2], [1.3, 1.2], n)?;
        let r = pairing_check(&f1, &f2, n)?;
        Ok((r.relative_error, r.lhs))
    };
    let (coarse, _) = err(top / 2)?;
    let (fine, lhs) = err(top)?;
    let ratio = fine / coarse;
    Ok((
        fine < 0.02 && (0.25..=0.75).contains(&ratio),
        format!("lhs {lhs:.5} rel err {:.3}% at {top}, {:.3}% at {}; ratio {ratio:.3}", 100.0 * fine, 100.0 * coarse, top / 2),
    ))
}

fn invariance(level: AcceptanceLevel) -> Outcome {
    let n = h(1);
    let translations = random_translations(n, 5, 2024)?;
    let dilations = [0.5, 2.0];
    let lw_res = level.pick(64, 128);
    let lw = invariance_with(&Region::heis_box(n, 1.0)?, &translations, &dilations, 0.02, |r| {
        Ok(lw_ratio(r, n, lw_res)?.value)
    })?;

    let cells = level.pick(48, 96);
    let base = sobolev_ratio(&gauge_bump(n, &HPoint::identity(n), 1.0, 1.0, cells)?, n)?.value;
    let mut sob_worst: f64 = 0.0;
    for p in &translations {
        let v = sobolev_ratio(&gauge_bump(n, p, 1.0, 1.0, cells)?, n)?.value;
        sob_worst = sob_worst.max(rel_diff(v, base));
    }
    for &r in &dilations {
        let v = sobolev_ratio(&gauge_bump(n, &HPoint::identity(n), r, 1.0, cells)?, n)?.value;
        sob_worst = sob_worst.max(rel_diff(v, base));
    }

    let iso_res = level.pick(48, 64);
    let ball = Region::euclidean_ball(vec![0.0; 3], 1.0)?;
    let iso = invariance_with(&ball, &translations, &dilations, 0.05, |r| Ok(isoperimetric_ratio(r, n, iso_res)?.value))?;
    let worst = |e: &crate::lw::InvarianceReport| e.entries.iter().map(|x| x.relative_change).fold(0.0, f64::max);
    Ok((
        lw.pass && sob_worst < 0.02 && iso.pass,
        format!(
            "lw max change {:.3}% (2%), sobolev {:.3}% (2%), isoperimetric {:.3}% (5%)",
            100.0 * worst(&lw),
            100.0 * sob_worst,
            100.0 * worst(&iso)
        ),
    ))
}

fn levelset(level: AcceptanceLevel) -> Outcome {
    let n = h(1);
    let cells = level.pick(64, 128);
    let u = gauge_bump(n, &HPoint::identity(n), 1.0, 3.0, cells)?;
    let table = levelset_table(&u, n, BandCells::Crossing)?;
    let checked: Vec<_> = table.iter().filter(|c| !c.empty).collect();
    let bad = checked.iter().filter(|c| c.lhs > 1.1 * c.rhs).count();
    let min_slack = checked.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min);
    Ok((
        bad == 0 && !checked.is_empty(),
        format!("{} nonempty (j,k), violations {bad}, min rhs/lhs {min_slack:.3} at {cells}", checked.len()),
    ))
}

fn degeneracy(level: AcceptanceLevel) -> Outcome {
    let n = h(2);
    let windows = [16.0, 32.0, 64.0];
    let settings = NormSettings::default();
    let slice = vec![0.3, -0.2];

    let degenerate = poly_height_family(&PolyHeightSpec::bilinear(n, vec![1.0, 2.0, 1.0, 0.0]))?;
    let bank = test_bank(level.pick(16, 24), 1, 3)?;
    let rep = l32l3_certificate(&degenerate, &[slice.clone()], &bank, &windows, &settings)?;
    let k1 = rep.entries_for(1).next().expect("one entry per k");
    let exp_ok = k1.verdict == Verdict::Degenerate && (k1.exponent - 1.0 / 3.0).abs() <= 0.2 / 3.0;

    let standard = HeightFamily::standard(n);
    let slices = slice_grid(2, level.pick(3, 5), 1.0);
    let std_rep = l32l3_certificate(&standard, &slices, &test_bank(16, 1, 3)?, &windows, &settings)?;
    let coarse = l32l3_certificate(&standard, &[slice.clone()], &test_bank(24, 1, 3)?, &windows, &settings)?.constant;
    let fine = l32l3_certificate(&standard, &[slice], &test_bank(48, 1, 3)?, &windows, &settings)?.constant;
    let refine = rel_diff(coarse, fine);
    Ok((
        exp_ok && std_rep.verdict == Verdict::Bounded && refine < 0.03,
        format!(
            "b=(1,2,1,0): k=1 {:?} exponent {:.4}; standard over {} slices {:?} constant {:.4}, refinement change {:.2}%",
            k1.verdict,
            k1.exponent,
            slices.len(),
            std_rep.verdict,
            std_rep.constant,
            100.0 * refine
        ),
    ))
}

/// Peak resident set size in bytes, where the platform reports it.
pub fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

fn h2_smoke(level: AcceptanceLevel) -> Outcome {
    let n = h(2);
    let res = level.pick(16, 24);
    let unit = Region::heis_box(n, 1.0)?;
    let base = lw_ratio(&unit, n, res)?;
    let mut values = vec![base.value];
    for r in [0.5, 2.0] {
        values.push(lw_ratio(&unit.dilate(r)?, n, res)?.value);
    }
    let worst = values.iter().map(|v| rel_diff(*v, base.value)).fold(0.0, f64::max);
    let finite = values.iter().all(|v| v.is_finite() && *v > 0.0);
    let rss = peak_rss_bytes();
    let mem_ok = rss.map_or(true, |b| b < 2 << 30);
    Ok((
        finite && worst < 0.05 && mem_ok,
        format!(
            "values {:?} max change {:.3}% at {res}; peak RSS {}",
            values.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>(),
            100.0 * worst,
            rss.map_or("n/a".into(), |b| format!("{} MiB", b >> 20))
        ),
    ))
}

fn constant_stability(level: AcceptanceLevel) -> Outcome {
    let n = h(1);
    let suite = region_suite()?;
    let (lo, hi) = level.pick((64, 128), (128, 256));
    let a = suite_ratios(&suite, n, lo)?;
    let b = suite_ratios(&suite, n, hi)?;
    let change = (b.max_conservative - a.max_conservative).abs();
    let width = b.rows[b.argmax].width();
    Ok((
        change < width,
        format!(
            "max conservative {:.4} ({}) at {lo}, {:.4} ({}) at {hi}; change {change:.4} < width {width:.4}",
            a.max_conservative,
            a.rows[a.argmax].params,
            b.max_conservative,
            b.rows[b.argmax].params
        ),
    ))
}

/// Run one criterion; errors are reported as failures.
pub fn run_criterion(id: usize, level: AcceptanceLevel) -> CriterionResult {
    let (_, title, limit) = CRITERIA.iter().copied().find(|c| c.0 == id).unwrap_or((id, "unknown", None));
    let f: fn(AcceptanceLevel) -> Outcome = match id {
        1 => box_sharpness,
        2 => euclid,
        3 => exponents,
        4 => radon_oracle,
        5 => s_scaling,
        6 => pairing,
        7 => invariance,
        8 => levelset,
        9 => degeneracy,
        10 => h2_smoke,
        11 => constant_stability,
        _ => |_| Ok((false, "no such criterion".into())),
    };
    let start = Instant::now();
    let outcome = f(level);
    let seconds = start.elapsed().as_secs_f64();
    let in_time = limit.map_or(true, |l| seconds <= l);
    let (pass, measured) = match outcome {
        Ok((ok, m)) if in_time => (ok, m),
        Ok((_, m)) => (false, format!("{m}; over time limit")),
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult { id, title, pass, measured, seconds, limit_seconds: limit }
}

/// Every criterion in order, printing each line as it completes.
pub fn acceptance(level: AcceptanceLevel, mut on_result: impl FnMut(&CriterionResult)) -> AcceptanceReport {
    let results = CRITERIA
        .iter()
        .map(|c| {
            let r = run_criterion(c.0, level);
            on_result(&r);
            r
        })
        .collect();
    AcceptanceReport { level, results }
}
