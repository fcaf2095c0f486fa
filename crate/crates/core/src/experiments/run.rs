use super::acceptance::{acceptance, AcceptanceLevel};
use super::fixtures::{gauge_bump, lw_inputs, named_region, planar_box, planar_input, random_translations};
use super::manifest::{Experiment, Manifest, Params, RunError, RunResult};
use crate::grid::Region;
use crate::heis::{poly_height_family, HDim, HPoint, HeightFamily, PolyHeightSpec};
use crate::lw::{
    euclidean_counterexample, extremizer_search, invariance_with, lw_ratio, lw_ratio_sampled, sharpness_sweep,
    strong_ratio, vertex_ratio, SearchConfig, SearchFamily, DENSE_MAX_N,
};
use crate::planar::{
    l32l3_certificate, output_l3_norm, pairing_check, slice_grid, test_bank, NormSettings, PlanarOperator, SCoeffs,
};
use crate::report::RatioReport;
use crate::sobolev::{isoperimetric_ratio, level_decomposition, levelset_table, sobolev_ratio, BandCells};
use serde::Serialize;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// What an experiment produced, before anything is written.
#[derive(Debug, Clone, Default)]
pub struct RunOutcome {
    pub rows: Vec<RatioReport>,
    /// Additional CSV tables: file name and contents.
    pub tables: Vec<(String, String)>,
    /// Human-readable lines for the terminal.
    pub log: Vec<String>,
    /// The experiment reports a failed check (acceptance criteria).
    pub failed: bool,
}

impl RunOutcome {
    fn rows(rows: Vec<RatioReport>) -> Self {
        Self { rows, ..Self::default() }
    }

    pub fn inconclusive(&self) -> bool {
        self.rows.iter().any(|r| r.inconclusive)
    }

    /// 0 on success, 2 when a bracket is inconclusive, 1 when a check failed.
    pub fn exit_code(&self) -> i32 {
        if self.failed {
            1
        } else if self.inconclusive() {
            2
        } else {
            0
        }
    }
}

fn scalar(op: &str, n: usize, params: String, resolution: usize, v: f64) -> RatioReport {
    RatioReport::new(op, n, params, resolution).with_values(v, v, v)
}

fn dim(p: &Params<'_>) -> RunResult<HDim> {
    Ok(HDim::new(p.usize("n", 1)?)?)
}

fn default_res(m: &Manifest, d: usize) -> usize {
    m.resolution.unwrap_or(d)
}

fn lw_ratio_exp(m: &Manifest) -> RunResult<RunOutcome> {
    let p = m.params();
    let n = dim(&p)?;
    let region = named_region(n, p.str("region", "heis-box")?, p.f64("r", 1.0)?)?;
    let row = if n.n() > DENSE_MAX_N {
        let samples = p.usize("samples", 200_000)?;
        lw_ratio_sampled(&region, n, samples, default_res(m, 16), m.seed)?
    } else {
        lw_ratio(&region, n, default_res(m, if n.n() == 1 { 64 } else { 16 }))?
    };
    Ok(RunOutcome::rows(vec![row]))
}

fn function_inputs(m: &Manifest) -> RunResult<(HDim, Vec<crate::grid::GridFunction>, String, usize)> {
    let p = m.params();
    let n = dim(&p)?;
    let kind = p.str("inputs", "boxes")?.to_string();
    let cells = p.usize("cells", if n.n() == 1 { 32 } else { 12 })?;
    let fs = lw_inputs(n, &kind, cells)?;
    Ok((n, fs, kind, default_res(m, if n.n() == 1 { 64 } else { 16 })))
}

fn strong_exp(m: &Manifest) -> RunResult<RunOutcome> {
    let (n, fs, kind, res) = function_inputs(m)?;
    let mut row = strong_ratio(&fs, n, res)?;
    row.params = format!("inputs={kind},{}", row.params);
    Ok(RunOutcome::rows(vec![row]))
}

fn vertex_exp(m: &Manifest) -> RunResult<RunOutcome> {
    let (n, fs, kind, res) = function_inputs(m)?;
    let ks: Vec<usize> = match m.params().opt_usize("k")? {
        Some(k) => vec![k],
        None => (1..=n.n()).collect(),
    };
    let mut rows = Vec::new();
    for k in ks {
        let mut row = vertex_ratio(&fs, n, k, res)?;
        row.params = format!("inputs={kind},{}", row.params);
        rows.push(row);
    }
    Ok(RunOutcome::rows(rows))
}

fn sharpness_exp(m: &Manifest) -> RunResult<RunOutcome> {
    let p = m.params();
    let n = dim(&p)?;
    let rs = p.f64_list("r", &[0.5, 1.0, 2.0])?;
    let table = sharpness_sweep(n, &rs, default_res(m, if n.n() == 1 { 128 } else { 16 }))?;
    let log = vec![format!("spread {:.4}%", 100.0 * table.spread)];
    Ok(RunOutcome { log, ..RunOutcome::rows(table.rows.into_iter().map(|r| r.1).collect()) })
}

fn euclid_exp(m: &Manifest) -> RunResult<RunOutcome> {
    let p = m.params();
    let delta = p.f64("delta", 0.01)?;
    let big = p.f64("R", 10.0)?;
    let r = euclidean_counterexample(delta, big)?;
    let params = format!("delta={delta},R={big}");
    let mut rows = vec![
        scalar("lambda-max", 1, params.clone(), 16, r.lambda_max),
        scalar("lambda-min", 1, params.clone(), 16, r.lambda_min),
    ];
    for (j, (c, o)) in r.heisenberg_projections_over_r3.iter().enumerate() {
        rows.push(
            RatioReport::new("heisenberg-projection-over-r3", 1, format!("{params},j={}", j + 1), 64)
                .with_values(r.heisenberg_exact_over_r3, *c, *o),
        );
    }
    Ok(RunOutcome::rows(rows))
}

fn radon_exp(m: &Manifest) -> RunResult<RunOutcome> {
    let p = m.params();
    let input = p.str("input", "disk")?;
    let cells = default_res(m, p.usize("cells", 128)?);
    let f = planar_input(input, cells)?;
    let radon = PlanarOperator::Radon { n_angles: p.usize("angles", 256)?, n_offsets: p.usize("offsets", 256)? };
    let s = NormSettings::default();
    let r = output_l3_norm(&radon, &f, &s)?.value;
    let t = output_l3_norm(&PlanarOperator::T, &f, &s)?.value;
    let params = format!("input={input}");
    Ok(RunOutcome::rows(vec![
        scalar("radon-l3", 1, params.clone(), cells, r),
        scalar("T-l3", 1, params.clone(), cells, t),
        scalar("T-over-radon", 1, params, cells, t / r),
    ]))
}

fn s_scaling_exp(m: &Manifest) -> RunResult<RunOutcome> {
    let p = m.params();
    let input = p.str("input", "disk")?;
    let cells = default_res(m, p.usize("cells", 64)?);
    let alpha = p.f64("alpha", 0.0)?;
    let f = planar_input(input, cells)?;
    let s = NormSettings::default();
    let mut rows = Vec::new();
    for beta in p.f64_list("beta", &[1.0, 2.0, 4.0])? {
        let op = PlanarOperator::S(SCoeffs { alpha, beta, ..SCoeffs::default() });
        let v = output_l3_norm(&op, &f, &s)?.value * beta.abs().cbrt();
        rows.push(scalar("s-norm-times-cbrt-beta", 1, format!("input={input},alpha={alpha},beta={beta}"), cells, v));
    }
    Ok(RunOutcome::rows(rows))
}

fn family_from(p: &Params<'_>, n: HDim) -> RunResult<HeightFamily> {
    match p.str("family", "standard")? {
        "standard" => Ok(HeightFamily::standard(n)),
        "zero" => Ok(HeightFamily::zero(n)),
        "bilinear" => {
            let b = p.f64_list("b", &[])?;
            Ok(poly_height_family(&PolyHeightSpec::bilinear(n, b))?)
        }
        other => Err(RunError::InvalidParams(format!("unknown family {other:?}"))),
    }
}

fn l32l3_exp(m: &Manifest) -> RunResult<RunOutcome> {
    let p = m.params();
    let n = dim(&p)?;
    let family = family_from(&p, n)?;
    let slices = slice_grid(n.n(), p.usize("side", 3)?, p.f64("extent", 1.0)?);
    let cells = default_res(m, p.usize("cells", 16)?);
    let bank = test_bank(cells, p.usize("random", 1)?, m.seed)?;
    let windows = p.f64_list("windows", &[16.0, 32.0, 64.0])?;
    let rep = l32l3_certificate(&family, &slices, &bank, &windows, &NormSettings::default())?;
    let rows = rep
        .entries
        .iter()
        .map(|e| {
            let lo = e.ratios.iter().copied().fold(f64::INFINITY, f64::min);
            RatioReport::new(
                "l32l3",
                n.n(),
                format!("family={},k={},slice={:?},verdict={:?},exponent={:.6}", rep.family, e.k, e.slice, e.verdict, e.exponent),
                cells,
            )
            .with_values(e.constant, lo, e.constant)
            .with_seed(m.seed)
        })
        .collect();
    let log = vec![format!("verdict {:?}, constant {:.6}", rep.verdict, rep.constant)];
    Ok(RunOutcome { log, ..RunOutcome::rows(rows) })
}

fn pairing_exp(m: &Manifest) -> RunResult<RunOutcome> {
    let p = m.params();
    let res = default_res(m, 128);
    let off = p.f64_list("offset", &[0.3, 0.2])?;
    if off.len() != 2 {
        return Err(RunError::InvalidParams("offset needs two numbers".into()));
    }
    let f1 = planar_box([0.0, 0.0], [1.0, 1.0], res)?;
    let f2 = planar_box([off[0], off[1]], [1.0 + off[0], 1.0 + off[1]], res)?;
    let r = pairing_check(&f1, &f2, res)?;
    let row = RatioReport::new("pairing", 1, format!("offset={off:?},rhs={}", r.rhs), res).with_values(
        r.lhs,
        r.lhs.min(r.rhs),
        r.lhs.max(r.rhs),
    );
    Ok(RunOutcome::rows(vec![row]))
}

fn center_from(p: &Params<'_>, n: HDim) -> RunResult<HPoint> {
    let x = p.f64_list("x", &vec![0.0; n.horizontal()])?;
    Ok(HPoint::new(x, p.f64("t", 0.0)?)?)
}

fn sobolev_exp(m: &Manifest) -> RunResult<RunOutcome> {
    let p = m.params();
    let n = dim(&p)?;
    let cells = default_res(m, if n.n() == 1 { 64 } else { 12 });
    let c = center_from(&p, n)?;
    let r = p.f64("r", 1.0)?;
    let u = gauge_bump(n, &c, r, p.f64("amplitude", 1.0)?, cells)?;
    let mut row = sobolev_ratio(&u, n)?;
    row.params = format!("bump(center={:?},r={r})", c.coords());
    Ok(RunOutcome::rows(vec![row]))
}

fn isoperimetric_exp(m: &Manifest) -> RunResult<RunOutcome> {
    let p = m.params();
    let n = dim(&p)?;
    let region = named_region(n, p.str("region", "euclidean-ball")?, p.f64("r", 1.0)?)?;
    Ok(RunOutcome::rows(vec![isoperimetric_ratio(&region, n, default_res(m, 64))?]))
}

fn levelset_exp(m: &Manifest) -> RunResult<RunOutcome> {
    let p = m.params();
    let n = dim(&p)?;
    let cells = default_res(m, 64);
    let band = match p.str("band", "crossing")? {
        "crossing" => BandCells::Crossing,
        "centers" => BandCells::Centers,
        other => return Err(RunError::InvalidParams(format!("band must be crossing or centers, got {other:?}"))),
    };
    let u = gauge_bump(n, &HPoint::identity(n), 1.0, p.f64("amplitude", 3.0)?, cells)?;
    let rows = levelset_table(&u, n, band)?
        .into_iter()
        .filter(|c| !c.empty)
        .map(|c| {
            RatioReport::new("levelset-lemma", n.n(), format!("j={},k={},lhs={},rhs={}", c.j, c.k, c.lhs, c.rhs), cells)
                .with_values(c.slack, c.slack, c.slack)
        })
        .collect();
    let mut levels = String::from("k,cell_count,measure\n");
    for (k, count, measure) in level_decomposition(&u).table() {
        levels.push_str(&format!("{k},{count},{measure}\n"));
    }
    Ok(RunOutcome { tables: vec![("levels.csv".into(), levels)], ..RunOutcome::rows(rows) })
}

fn search_exp(m: &Manifest) -> RunResult<RunOutcome> {
    let p = m.params();
    let n = dim(&p)?;
    let family = SearchFamily::parse(p.str("family", "boxes")?)?;
    let d = SearchConfig::default();
    let config = SearchConfig {
        iterations: p.usize("iterations", d.iterations)?,
        restarts: p.usize("restarts", d.restarts)?,
        seed: m.seed,
        resolution: default_res(m, d.resolution),
        min_step: p.f64("min_step", d.min_step)?,
    };
    let res = extremizer_search(family, n, &config)?;
    let mut row = res.best_report.clone().with_seed(m.seed);
    row.op = "search".into();
    row.params = format!("family={},best={:?}", p.str("family", "boxes")?, res.best_params);
    let mut trace = String::from("restart,iteration,ratio,step,params\n");
    for t in &res.trace {
        let params: Vec<String> = t.params.iter().map(|v| v.to_string()).collect();
        trace.push_str(&format!("{},{},{},{},{}\n", t.restart, t.iteration, t.ratio, t.step, params.join(" ")));
    }
    Ok(RunOutcome { tables: vec![("trace.csv".into(), trace)], ..RunOutcome::rows(vec![row]) })
}

fn invariance_exp(m: &Manifest) -> RunResult<RunOutcome> {
    let p = m.params();
    let n = dim(&p)?;
    let stat = p.str("stat", "lw")?;
    let translations = random_translations(n, p.usize("translations", 5)?, m.seed)?;
    let dilations = p.f64_list("dilations", &[0.5, 2.0])?;
    let (res, tol, rows) = match stat {
        "lw" | "isoperimetric" => {
            let default_region = if stat == "lw" { "heis-box" } else { "euclidean-ball" };
            let region = named_region(n, p.str("region", default_region)?, p.f64("r", 1.0)?)?;
            let res = default_res(m, if stat == "lw" { 128 } else { 64 });
            let tol = p.f64("tolerance", if stat == "lw" { 0.02 } else { 0.05 })?;
            let f = |r: &Region| -> crate::Result<f64> {
                if stat == "lw" {
                    Ok(lw_ratio(r, n, res)?.value)
                } else {
                    Ok(isoperimetric_ratio(r, n, res)?.value)
                }
            };
            let rep = invariance_with(&region, &translations, &dilations, tol, f)?;
            let mut rows = vec![scalar(stat, n.n(), "transform=identity".into(), res, rep.base)];
            rows.extend(rep.entries.iter().map(|e| {
                scalar(stat, n.n(), format!("transform={},change={},pass={}", e.transform, e.relative_change, e.pass), res, e.value)
            }));
            (res, tol, rows)
        }
        "sobolev" => {
            let res = default_res(m, 64);
            let tol = p.f64("tolerance", 0.02)?;
            let id = HPoint::identity(n);
            let value = |c: &HPoint, r: f64| -> RunResult<f64> { Ok(sobolev_ratio(&gauge_bump(n, c, r, 1.0, res)?, n)?.value) };
            let base = value(&id, 1.0)?;
            let mut rows = vec![scalar(stat, n.n(), "transform=identity".into(), res, base)];
            let mut push = |label: String, v: f64| {
                let change = crate::numeric::rel_diff(v, base);
                rows.push(scalar(stat, n.n(), format!("transform={label},change={change},pass={}", change <= tol), res, v));
            };
            for c in &translations {
                push(format!("translate(x={:?},t={})", c.x, c.t), value(c, 1.0)?);
            }
            for &r in &dilations {
                push(format!("dilate({r})"), value(&id, r)?);
            }
            (res, tol, rows)
        }
        other => return Err(RunError::InvalidParams(format!("stat must be lw, sobolev or isoperimetric, got {other:?}"))),
    };
    let failed = rows.iter().any(|r| r.params.ends_with("pass=false"));
    let log = vec![format!("{stat} invariance at {res}, tolerance {tol}: {}", if failed { "FAIL" } else { "pass" })];
    Ok(RunOutcome { rows, log, failed, ..RunOutcome::default() })
}

fn acceptance_exp(m: &Manifest) -> RunResult<RunOutcome> {
    let level = AcceptanceLevel::parse(m.params().str("level", "quick")?)?;
    let report = acceptance(level, |r| println!("{r}"));
    let rows = report
        .results
        .iter()
        .map(|r| {
            let v = if r.pass { 1.0 } else { 0.0 };
            scalar("acceptance", 0, format!("criterion={},seconds={:.3},measured={}", r.id, r.seconds, r.measured), 0, v)
        })
        .collect();
    Ok(RunOutcome { rows, failed: !report.all_pass(), ..RunOutcome::default() })
}

/// Run the experiment a manifest names, without writing anything.
pub fn execute(m: &Manifest) -> RunResult<RunOutcome> {
    let f = match m.experiment()? {
        Experiment::LwRatio => lw_ratio_exp,
        Experiment::Strong => strong_exp,
        Experiment::Vertex => vertex_exp,
        Experiment::Sharpness => sharpness_exp,
        Experiment::EuclidCounterexample => euclid_exp,
        Experiment::RadonNorm => radon_exp,
        Experiment::SScaling => s_scaling_exp,
        Experiment::L32l3 => l32l3_exp,
        Experiment::Pairing => pairing_exp,
        Experiment::Sobolev => sobolev_exp,
        Experiment::Isoperimetric => isoperimetric_exp,
        Experiment::LevelsetLemma => levelset_exp,
        Experiment::Search => search_exp,
        Experiment::Invariance => invariance_exp,
        Experiment::Acceptance => acceptance_exp,
    };
    f(m)
}

/// `results.csv` contents: one line per report, shortest round-trip floats.
pub fn results_csv(rows: &[RatioReport]) -> RunResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| RunError::Failed(crate::Error::Io(e.into()));
    w.write_record(["op", "n", "params", "resolution", "value", "conservative", "optimistic", "seed"]).map_err(io)?;
    for r in rows {
        w.write_record([
            r.op.clone(),
            r.n.to_string(),
            r.params.clone(),
            r.resolution.to_string(),
            r.value.to_string(),
            r.conservative.to_string(),
            r.optimistic.to_string(),
            r.seed.map_or(String::new(), |s| s.to_string()),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| RunError::Failed(crate::Error::Io(e.into_error())))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

#[derive(Debug, Clone, Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    wall_time_seconds: f64,
    threads: usize,
    exit_code: i32,
    manifest: &'a Manifest,
}

/// Paths written by [`run`].
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub outcome: RunOutcome,
    pub results: PathBuf,
    pub meta: PathBuf,
    pub exit_code: i32,
}

fn write(path: &Path, contents: &str) -> RunResult<()> {
    std::fs::write(path, contents).map_err(|e| RunError::Failed(e.into()))
}

/// Run a manifest and write `results.csv`, `meta.json` and any extra
/// tables into its output directory.
pub fn run(m: &Manifest) -> RunResult<RunArtifacts> {
    let start = Instant::now();
    let outcome = execute(m)?;
    let wall = start.elapsed().as_secs_f64();
    std::fs::create_dir_all(&m.output).map_err(|e| RunError::Failed(e.into()))?;
    let results = m.output.join("results.csv");
    write(&results, &results_csv(&outcome.rows)?)?;
    for (name, body) in &outcome.tables {
        write(&m.output.join(name), body)?;
    }
    let exit_code = outcome.exit_code();
    let meta = Meta {
        tool: "hlw",
        version: env!("CARGO_PKG_VERSION"),
        wall_time_seconds: wall,
        threads: rayon::current_num_threads(),
        exit_code,
        manifest: m,
    };
    let meta_path = m.output.join("meta.json");
    let text = serde_json::to_string_pretty(&json!(meta)).map_err(|e| RunError::Failed(e.into()))?;
    write(&meta_path, &text)?;
    Ok(RunArtifacts { outcome, results, meta: meta_path, exit_code })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn quick(e: Experiment) -> Manifest {
        Manifest::new(e)
    }

    #[test]
    fn euclid_rows_are_exact() {
        let out = execute(&quick(Experiment::EuclidCounterexample)).unwrap();
        assert_eq!(out.rows[0].op, "lambda-max");
        assert!((out.rows[0].value - 0.5).abs() < 1e-12);
        assert!((out.rows[1].value - 0.75).abs() < 1e-12);
        assert_eq!(out.exit_code(), 0);
    }

    #[test]
    fn sharpness_rows_agree() {
        let m = Manifest { resolution: Some(48), ..quick(Experiment::Sharpness) };
        let out = execute(&m).unwrap();
        assert_eq!(out.rows.len(), 3);
        let v: Vec<f64> = out.rows.iter().map(|r| r.value).collect();
        assert!(v.iter().all(|x| (x / v[0] - 1.0).abs() < 0.01), "{v:?}");
    }

    #[test]
    fn bad_params_map_to_65() {
        let m = quick(Experiment::LwRatio).with_param("region", json!("nowhere"));
        assert_eq!(execute(&m).unwrap_err().exit_code(), 65);
        let m = quick(Experiment::Invariance).with_param("stat", json!("volume"));
        assert_eq!(execute(&m).unwrap_err().exit_code(), 65);
        let m = Manifest { experiment: "nonsense".into(), ..quick(Experiment::Pairing) };
        assert_eq!(execute(&m).unwrap_err().exit_code(), 64);
    }

    #[test]
    fn csv_quotes_params() {
        let rows = vec![RatioReport::new("x", 1, "a=1,b=2", 8).with_values(1.5, 1.0, 2.0).with_seed(3)];
        let text = results_csv(&rows).unwrap();
        assert_eq!(
            text,
            "op,n,params,resolution,value,conservative,optimistic,seed\nx,1,\"a=1,b=2\",8,1.5,1,2,3\n"
        );
    }

    #[test]
    fn inconclusive_rows_give_exit_two() {
        let mut r = RatioReport::new("lw-ratio", 1, "", 4);
        r.inconclusive = true;
        assert_eq!(RunOutcome::rows(vec![r]).exit_code(), 2);
    }
}
