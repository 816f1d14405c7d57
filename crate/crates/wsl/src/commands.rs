//! One function per subcommand. Each builds its inputs, runs the core
//! computations, writes its files atomically and returns the exit outcome.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{Map, Value};
use wsl_core::distance::{geodesic_distance, DistanceQuery, SurfacePoint};
use wsl_core::geometry::{CriticalSphere, Validation, DEFAULT_GRID};
use wsl_core::math::PI;
use wsl_core::sequence::{
    default_battery, distributional_scalar_test, extract_limit, extrapolate_ratio, h1_convergence, ik_window,
    pole_cap_check, pole_volume_ratio, tangent_cone_portrait, ConePortrait, ConvergenceReport, IkWindow, LimitProfile,
    LimitReport, LimitVerdict, Pole, ScalarTestResult, TestFunction,
};
use wsl_core::swif::{rate_certificate, swif_upper_bound, LambdaMode, SwifBoundReport, SwifOptions};
use wsl_core::warping::{DerivativeSource, Representation};
use wsl_core::{GridFunction, HypothesisVerdict, RotSymManifold};

use crate::report::{ensure_dir, num, opt, provenance, to_json, write_atomic, Csv, Provenance};
use crate::spec::{self, LakzianSummary, ManifoldSpec, SequenceSpec};
use crate::{AnalyzeArgs, CliError, DistArgs, GenerateArgs, LambdaArg, Outcome, RateArgs, SequenceArgs, SwifArgs};

const LIP_TOL: f64 = 1e-4;

// ---------------------------------------------------------------- analyze

#[derive(Debug, Serialize)]
struct Marks {
    a: f64,
    b: f64,
}

#[derive(Debug, Serialize)]
struct AnalysisReport<'a> {
    provenance: Provenance,
    spec: &'a ManifoldSpec,
    grid: usize,
    derivative_source: DerivativeSource,
    validation: &'a Validation,
    volume: f64,
    diameter: f64,
    critical_spheres: Vec<CriticalSphere>,
    /// `None` when no sphere `{s = const}` is minimal.
    sym_min_area: Option<f64>,
    sym_min_area_note: &'static str,
    marks: Marks,
    verdict: HypothesisVerdict,
    /// `grid` or `analytic`: where the scalar sign used for `all_pass` comes from.
    scalar_source: &'static str,
    all_pass: bool,
    lakzian: Option<LakzianSummary>,
}

pub fn analyze(args: &AnalyzeArgs, cmd: &[String]) -> Result<Outcome, CliError> {
    let (spec, text) = spec::load_manifold(&args.spec)?;
    let built = spec.build()?;
    // Sample files are analyzed on their own nodes; resampling would add
    // interpolation error to the finite differences.
    let native = match (&spec, built.warping.representation()) {
        (ManifoldSpec::Samples { .. }, Representation::Sampled(p)) => p.grid().len(),
        _ => DEFAULT_GRID,
    };
    let grid = args.grid.unwrap_or(native);
    let m = RotSymManifold::with_grid(built.warping, grid)?;
    let d_cap = args.d_cap.unwrap_or(m.domain_end());
    let a_floor = args.a_floor.unwrap_or(0.0);
    if !(d_cap > 0.0) || !(a_floor >= 0.0) {
        return Err(CliError::Usage("--D-cap must be positive and --A-floor nonnegative".into()));
    }
    let verdict = m.validate_hypotheses(d_cap, a_floor);

    // The thin-spline layer is far below any grid spacing; its scalar sign is
    // taken from the closed-form Hawking mass instead.
    let analytic = built.lakzian.as_ref().map(|l| l.min_analytic_scalar > 0.0);
    let (scalar_source, all_pass) = match analytic {
        Some(ok) => {
            let mut eff = verdict.clone();
            eff.scalar_ok = ok;
            eff.lipschitz_inconsistent = ok && !eff.lipschitz_ok;
            ("analytic", eff.all_pass())
        }
        None => ("grid", verdict.all_pass()),
    };

    let nodes = m.nodes();
    let scalar = m.scalar_profile();
    let mean = m.mean_curvature_profile();
    let mut csv = Csv::new(&["s", "f", "f'", "f''", "scalar", "mean_curvature"]);
    for i in 0..nodes.len() {
        csv.row(&[num(nodes.s[i]), num(nodes.f[i]), num(nodes.d1[i]), num(nodes.d2[i]), opt(scalar[i]), opt(mean[i])]);
    }

    let (a, b) = m.monotonicity_marks();
    let sym = m.sym_min_area();
    let report = AnalysisReport {
        provenance: provenance(cmd, &[&text]),
        spec: &spec,
        grid,
        derivative_source: m.warping().derivative_source(),
        validation: m.validation(),
        volume: m.volume(),
        diameter: m.diameter(),
        critical_spheres: m.critical_spheres(),
        sym_min_area: sym.is_finite().then_some(sym),
        sym_min_area_note: "smallest symmetric minimal sphere: an upper bound candidate for MinA, not MinA itself",
        marks: Marks { a, b },
        verdict,
        scalar_source,
        all_pass,
        lakzian: built.lakzian,
    };
    ensure_dir(&args.out)?;
    write_atomic(&args.out.join("grid.csv"), &csv.into_bytes())?;
    write_atomic(&args.out.join("analysis.json"), &to_json(&report)?)?;

    let v = &report.verdict;
    Ok(Outcome::pass_if(
        all_pass,
        format!(
            "{}: min scalar {} at s = {}, volume {}, diameter {}, sym_min_area {}, max |f'| {}",
            if all_pass { "pass" } else { "fail" },
            num(v.min_scalar),
            num(v.min_scalar_at),
            num(report.volume),
            num(report.diameter),
            opt(report.sym_min_area),
            num(v.max_abs_slope),
        ),
    ))
}

// ---------------------------------------------------------------- dist

/// `s,azimuth,elevation`, angles in degrees.
pub fn parse_point(text: &str) -> Result<SurfacePoint, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let vals: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("point `{text}` must be s,azimuth,elevation")))?;
    if vals.len() != 3 || vals.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Usage(format!("point `{text}` must be s,azimuth,elevation")));
    }
    if !(-90.0..=90.0).contains(&vals[2]) {
        return Err(CliError::Usage(format!("elevation {} outside [-90, 90] degrees", vals[2])));
    }
    let deg = PI / 180.0;
    Ok(SurfacePoint::new(vals[0], (90.0 - vals[2]) * deg, vals[1] * deg))
}

pub fn dist(args: &DistArgs) -> Result<Outcome, CliError> {
    let (spec, _) = spec::load_manifold(&args.spec)?;
    let m = RotSymManifold::new(spec.build()?.warping)?;
    let mut q = DistanceQuery::new(parse_point(&args.p)?, parse_point(&args.q)?);
    q.resolution = args.mesh;
    let d = geodesic_distance(&m, &q)?;
    Ok(Outcome { code: 0, summary: num(d) })
}

// ---------------------------------------------------------------- sequence

#[derive(Debug, Serialize)]
struct LimitSummary {
    verdict: &'static str,
    indices: Vec<u32>,
    sup_norms: Vec<f64>,
    cauchy_distances: Vec<f64>,
    a_inf: Option<f64>,
    b_inf: Option<f64>,
    lipschitz_constant: Option<f64>,
    last_sup: Option<f64>,
    decay_exponent: Option<f64>,
    reason: Option<String>,
}

impl LimitSummary {
    fn of(r: &LimitReport) -> Self {
        let mut s = LimitSummary {
            verdict: "",
            indices: r.indices.clone(),
            sup_norms: r.sup_norms.clone(),
            cauchy_distances: r.cauchy_distances.clone(),
            a_inf: None,
            b_inf: None,
            lipschitz_constant: None,
            last_sup: None,
            decay_exponent: None,
            reason: None,
        };
        match &r.verdict {
            LimitVerdict::Limit { limit } => {
                s.verdict = "limit";
                s.a_inf = Some(limit.a_inf);
                s.b_inf = Some(limit.b_inf);
                s.lipschitz_constant = Some(limit.lipschitz_constant);
            }
            LimitVerdict::ZeroCurrent { last_sup, decay_exponent } => {
                s.verdict = "zero_current";
                s.last_sup = Some(*last_sup);
                s.decay_exponent = *decay_exponent;
            }
            LimitVerdict::NonConvergent { reason } => {
                s.verdict = "non_convergent";
                s.reason = Some(reason.clone());
            }
        }
        s
    }
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum TestOutcome {
    Done(ScalarTestResult),
    Skipped { test: TestFunction, skipped: String },
}

fn run_battery(profile: &GridFunction, tests: &[TestFunction]) -> Vec<TestOutcome> {
    distributional_scalar_test(profile, tests)
        .into_iter()
        .zip(tests)
        .map(|(r, t)| match r {
            Ok(v) => TestOutcome::Done(v),
            Err(e) => TestOutcome::Skipped { test: *t, skipped: e.to_string() },
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct MemberBattery {
    index: u32,
    passed: usize,
    failed: usize,
    skipped: usize,
    /// Centres of failing tests.
    failures: Vec<f64>,
}

impl MemberBattery {
    fn of(index: u32, outcomes: &[TestOutcome]) -> Self {
        let mut mb = MemberBattery { index, passed: 0, failed: 0, skipped: 0, failures: Vec::new() };
        for o in outcomes {
            match o {
                TestOutcome::Done(r) if r.pass => mb.passed += 1,
                TestOutcome::Done(r) => {
                    mb.failed += 1;
                    mb.failures.push(r.test.center);
                }
                TestOutcome::Skipped { .. } => mb.skipped += 1,
            }
        }
        mb
    }
}

#[derive(Debug, Serialize)]
struct Battery {
    limit: Vec<TestOutcome>,
    limit_summary: MemberBattery,
    members: Vec<MemberBattery>,
    /// Mean-curvature parameter of the weak inequality; only `H = 0` is tested.
    h: f64,
}

#[derive(Debug, Serialize)]
struct PoleRatios {
    left: Vec<(f64, f64)>,
    left_extrapolated: f64,
    right: Vec<(f64, f64)>,
    right_extrapolated: f64,
    /// `f∞(s) ≤ distance to the nearer end of the positive region`, near both ends.
    cap_check: bool,
}

#[derive(Debug, Serialize)]
struct SequenceReport<'a> {
    provenance: Provenance,
    spec: &'a SequenceSpec,
    k: u32,
    common_interval_end: f64,
    limit: LimitSummary,
    window: Option<IkWindow>,
    window_error: Option<String>,
    convergence: Option<ConvergenceReport>,
    convergence_error: Option<String>,
    scalar_tests: Option<Battery>,
    cone_portrait: Option<ConePortrait>,
    pole_ratios: Option<PoleRatios>,
    checks: Vec<(&'static str, bool)>,
    pass: bool,
}

fn pole_ratios(lim: &LimitProfile) -> Result<PoleRatios, CliError> {
    let r0 = (0.2f64).min(0.2 * (lim.b_inf - lim.a_inf));
    let radii: Vec<f64> = (0..4).map(|i| r0 / f64::from(1u32 << i)).collect();
    let left = pole_volume_ratio(lim, Pole::Left, &radii)?;
    let right = pole_volume_ratio(lim, Pole::Right, &radii)?;
    Ok(PoleRatios {
        left_extrapolated: extrapolate_ratio(&left),
        right_extrapolated: extrapolate_ratio(&right),
        left,
        right,
        cap_check: pole_cap_check(lim, 1e-6),
    })
}

pub fn sequence(args: &SequenceArgs, cmd: &[String]) -> Result<Outcome, CliError> {
    let text = spec::read_text(&args.spec)?;
    let seq_spec: SequenceSpec = spec::parse_json(&args.spec, &text)?;
    let seq = seq_spec.build()?;
    let lr = extract_limit(&seq)?;
    let k = args.k;

    let mut report = SequenceReport {
        provenance: provenance(cmd, &[&text]),
        spec: &seq_spec,
        k,
        common_interval_end: seq.common_interval_end(),
        limit: LimitSummary::of(&lr),
        window: None,
        window_error: None,
        convergence: None,
        convergence_error: None,
        scalar_tests: None,
        cone_portrait: None,
        pole_ratios: None,
        checks: Vec::new(),
        pass: true,
    };

    let mut norms = Csv::new(&[
        "index",
        "sup_norm",
        "cauchy_next",
        "h1_diff",
        "f1_diff",
        "sup_diff",
        "bv",
        "bv_margin",
        "min_f",
        "above_floor",
    ]);
    let mut limit_csv = None;

    match lr.limit() {
        None => {
            let ok = matches!(lr.verdict, LimitVerdict::ZeroCurrent { .. });
            report.checks.push(("limit_or_zero_current", ok));
        }
        Some(lim) => {
            report.checks.push(("limit_lipschitz", lim.lipschitz_constant <= 1.0 + LIP_TOL));
            let mut csv = Csv::new(&["s", "f_inf"]);
            for (i, v) in lim.f_inf.samples().iter().enumerate() {
                csv.row(&[num(lim.f_inf.x(i)), num(*v)]);
            }
            limit_csv = Some(csv);

            report.cone_portrait = Some(tangent_cone_portrait(lim, 200)?);
            report.pole_ratios = Some(pole_ratios(lim)?);

            match ik_window(lim, k) {
                Err(e) => {
                    report.window_error = Some(e.to_string());
                    report.checks.push(("window", false));
                }
                Ok(w) => {
                    report.window = Some(w);
                    match h1_convergence(&seq, &w) {
                        Ok(c) => {
                            report.checks.push(("bv_margin", c.min_bv_margin >= 0.0));
                            report.convergence = Some(c);
                        }
                        Err(e) => {
                            report.convergence_error = Some(e.to_string());
                            report.checks.push(("convergence", false));
                        }
                    }
                    let tests = default_battery(w.a, w.b);
                    let limit = run_battery(&lim.f_inf, &tests);
                    let limit_summary = MemberBattery::of(0, &limit);
                    report.checks.push(("limit_scalar_tests", limit_summary.failed == 0 && limit_summary.skipped == 0));
                    let extended = seq.extended()?;
                    let members = extended
                        .par_iter()
                        .zip(seq.indices().par_iter())
                        .map(|(g, &j)| MemberBattery::of(j, &run_battery(g, &tests)))
                        .collect();
                    report.scalar_tests = Some(Battery { limit, limit_summary, members, h: 0.0 });
                }
            }
        }
    }

    for (pos, &j) in lr.indices.iter().enumerate() {
        let member = report.convergence.as_ref().and_then(|c| c.members.iter().find(|m| m.index == j));
        let mut row = vec![j.to_string(), num(lr.sup_norms[pos]), opt(lr.cauchy_distances.get(pos).copied())];
        match member {
            Some(m) => row.extend([
                num(m.h1_diff),
                num(m.f1_diff),
                num(m.sup_diff),
                num(m.bv),
                num(m.bv_margin),
                num(m.min_f),
                m.above_floor.to_string(),
            ]),
            None => row.extend(std::iter::repeat_n("nan".to_string(), 6).chain(["false".to_string()])),
        }
        norms.row(&row);
    }

    report.pass = report.checks.iter().all(|(_, ok)| *ok);
    ensure_dir(&args.out)?;
    write_atomic(&args.out.join("norms.csv"), &norms.into_bytes())?;
    if let Some(csv) = limit_csv {
        write_atomic(&args.out.join("limit.csv"), &csv.into_bytes())?;
    }
    write_atomic(&args.out.join("report.json"), &to_json(&report)?)?;

    let mut summary = format!("verdict {}", report.limit.verdict);
    if let Some(w) = &report.window {
        summary += &format!(", I_{k} = [{}, {}]", num(w.a), num(w.b));
    }
    if let Some(c) = &report.convergence {
        summary += &format!(", BV bound {}, min margin {}", num(c.bv_bound), num(c.min_bv_margin));
    }
    let failed: Vec<&str> = report.checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    if !failed.is_empty() {
        summary += &format!(", failed: {}", failed.join(" "));
    }
    Ok(Outcome::pass_if(report.pass, summary))
}

// ---------------------------------------------------------------- swif-bound

#[derive(Debug, Serialize)]
struct SwifFile<'a> {
    provenance: Provenance,
    spec1: &'a ManifoldSpec,
    spec2: &'a ManifoldSpec,
    d_cap: f64,
    options: SwifOptions,
    note: &'static str,
    reports: Vec<SwifBoundReport>,
    margins_ok: bool,
}

/// `I_k` of a profile treated as its own limit.
fn profile_window(m: &RotSymManifold, k: u32) -> Result<IkWindow, CliError> {
    let nodes = m.warping().node_values(4097);
    let lip = nodes.d1.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let lim = LimitProfile {
        f_inf: GridFunction::new(0.0, m.domain_end(), nodes.f)?,
        a_inf: 0.0,
        b_inf: m.domain_end(),
        lipschitz_constant: lip,
    };
    Ok(ik_window(&lim, k)?)
}

/// The intersection of both superlevel windows, so the floor `1/k` holds
/// for both manifolds.
pub fn shared_window(m1: &RotSymManifold, m2: &RotSymManifold, k: u32) -> Result<IkWindow, CliError> {
    let w1 = profile_window(m1, k)?;
    let w2 = profile_window(m2, k)?;
    let w = IkWindow { k, a: w1.a.max(w2.a), b: w1.b.min(w2.b) };
    if !(w.a < w.b) {
        return Err(CliError::Usage(format!("windows of the two manifolds do not overlap at k = {k}")));
    }
    Ok(w)
}

pub fn swif_bound(args: &SwifArgs, cmd: &[String]) -> Result<Outcome, CliError> {
    let (s1, t1) = spec::load_manifold(&args.spec1)?;
    let (s2, t2) = spec::load_manifold(&args.spec2)?;
    let m1 = RotSymManifold::new(s1.build()?.warping)?;
    let m2 = RotSymManifold::new(s2.build()?.warping)?;
    if args.k.iter().any(|&k| k < 2) {
        return Err(CliError::Usage("every k must be at least 2".into()));
    }
    let opts = SwifOptions {
        lambda_mode: match args.lambda {
            LambdaArg::Certified => LambdaMode::Certified,
            LambdaArg::Sampled => LambdaMode::Sampled,
        },
        sample_lambda: !args.no_sample,
        n_pairs: args.pairs,
        resolution: args.mesh,
    };
    let reports: Vec<SwifBoundReport> = args
        .k
        .par_iter()
        .map(|&k| {
            let w = shared_window(&m1, &m2, k)?;
            Ok(swif_upper_bound(&m1, &m2, &w, args.d_cap, &opts)?)
        })
        .collect::<Result<_, CliError>>()?;
    let margins_ok = reports.iter().all(|r| r.volumes_1.margins_nonnegative() && r.volumes_2.margins_nonnegative());

    let mut csv = Csv::new(&[
        "k",
        "a_k",
        "b_k",
        "epsilon",
        "lambda_lower",
        "lambda_upper",
        "lambda_used",
        "h_bar",
        "angle",
        "bound",
        "excess_margin_1",
        "excess_margin_2",
        "margins_ok",
    ]);
    let mut lines = Vec::new();
    for r in &reports {
        csv.row(&[
            r.k.to_string(),
            num(r.window.a),
            num(r.window.b),
            num(r.epsilon),
            opt(r.lambda_lower),
            num(r.lambda_upper),
            num(r.lambda_used),
            num(r.h_bar),
            num(r.a),
            num(r.bound),
            num(r.volumes_1.excess_margin),
            num(r.volumes_2.excess_margin),
            (r.volumes_1.margins_nonnegative() && r.volumes_2.margins_nonnegative()).to_string(),
        ]);
        lines.push(format!("k={} bound={}", r.k, num(r.bound)));
    }
    let file = SwifFile {
        provenance: provenance(cmd, &[&t1, &t2]),
        spec1: &s1,
        spec2: &s2,
        d_cap: args.d_cap,
        options: opts,
        note: "lambda_lower is a sampled estimate of a supremum; lambda_upper is certified. \
               The bound uses lambda_used and is sound only in certified mode.",
        reports,
        margins_ok,
    };
    ensure_dir(&args.out)?;
    write_atomic(&args.out.join("bounds.csv"), &csv.into_bytes())?;
    write_atomic(&args.out.join("swif.json"), &to_json(&file)?)?;
    Ok(Outcome::pass_if(margins_ok, lines.join("\n")))
}

// ---------------------------------------------------------------- generate

fn parse_kv(items: &[String]) -> Result<Map<String, Value>, CliError> {
    let mut map = Map::new();
    for item in items {
        let (k, v) =
            item.split_once('=').ok_or_else(|| CliError::Usage(format!("parameter `{item}` must be key=value")))?;
        // JSON first (numbers, arrays), plain string otherwise.
        let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        map.insert(k.trim().to_string(), value);
    }
    Ok(map)
}

pub fn generate(args: &GenerateArgs) -> Result<Outcome, CliError> {
    if args.grid < 8 {
        return Err(CliError::Usage("--grid needs at least 8 samples".into()));
    }
    let params = parse_kv(&args.params)?;
    let built = spec::build_family(&args.family, &params)?;
    let l = built.warping.domain_end();
    let samples = built.warping.node_values(args.grid).f;
    let out = ManifoldSpec::Samples { samples, domain_end: l };
    if let Some(dir) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    write_atomic(&args.out, &to_json(&out)?)?;
    Ok(Outcome {
        code: 0,
        summary: format!("wrote {} samples on [0, {}] to {}", args.grid, num(l), display(&args.out)),
    })
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

// ---------------------------------------------------------------- certify-rate

pub fn certify_rate(args: &RateArgs) -> Result<Outcome, CliError> {
    Ok(Outcome { code: 0, summary: num(rate_certificate(args.d, args.d0, args.k, args.i)?) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_use_elevation() {
        let p = parse_point("1.5, 90, 0").unwrap();
        assert!((p.polar - PI / 2.0).abs() < 1e-15 && (p.azimuth - PI / 2.0).abs() < 1e-15);
        assert!(parse_point("1,2").is_err());
        assert!(parse_point("1,2,95").is_err());
    }

    #[test]
    fn kv_params() {
        let m = parse_kv(&["j=3".into(), "f=sin(s)".into()]).unwrap();
        assert_eq!(m["j"], Value::from(3));
        assert_eq!(m["f"], Value::from("sin(s)"));
        assert!(parse_kv(&["oops".into()]).is_err());
    }
}
