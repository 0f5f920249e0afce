use std::sync::Arc;

use rand::RngCore;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use cubature_core::bounds::{
    grp_hc_check, kernel_hc_check, khintchine_worst_ratio, log_concave_report, moment_report,
    tukey_bound, tukey_report, wiener_chaos_report, wiener_n_report, BoundReport, BoundValue,
    PowerLawTail,
};
use cubature_core::hull::{
    derive_seed, empirical_moment_ratio, estimate_nx, estimate_p, stream_rng, tukey_depth_upper,
    wendel_probability, Centering, FnSampler, GaussianSampler, NxEstimate, NxOptions,
    ProbabilityEstimate, RademacherSampler, Sampler, SamplerError, UniformBoxSampler,
};
use cubature_core::kernel::{
    build_kernel_quadrature, residual_tail_bound, sobolev_hc_params, tensor_eigs_above, wce,
    SobolevKernel, TensorEigenfunction,
};
use cubature_core::poly::{build_poly_cubature, MonomialFeatures, ProductDistribution, Univariate};
use cubature_core::wiener::{
    build_wiener_cubature, expected_bm_signature, expected_discretized_signature,
    sample_bm_path_from, TruncatedTensor, WienerTarget, WordBasis,
};
use cubature_core::{Construction, HullError, PointCloud64, Scalar};

use crate::args::*;
use crate::error::CliError;
use crate::output::{cell_f64, cell_opt, Report, Table};

pub fn run(cmd: &Command) -> Result<Report, CliError> {
    match cmd {
        Command::Poly(c) => pipeline(SweepTarget::Poly, c),
        Command::Wiener(c) => pipeline(SweepTarget::Wiener, c),
        Command::Kernel(c) => pipeline(SweepTarget::Kernel, c),
        Command::EstimateP(c) => estimate_p_cmd(c),
        Command::EstimateNx(c) => estimate_nx_cmd(c),
        Command::Bounds(c) => bounds_cmd(c),
        Command::HcCheck(c) => hc_cmd(c),
        Command::Depth(c) => depth_cmd(c),
        Command::Sweep(c) => sweep_cmd(c),
    }
}

/// Seed of repetition `r`: the base seed for a single run, derived otherwise.
pub fn repeat_seed(seed: u64, repeats: u64, r: u64) -> u64 {
    if repeats == 1 {
        seed
    } else {
        derive_seed(seed, r)
    }
}

fn to_f64<T: Scalar>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64_lossy()).collect()
}

fn univariate(d: Dist) -> Univariate {
    match d {
        Dist::Uniform01 => Univariate::Uniform01,
        Dist::Gaussian => Univariate::StandardGaussian,
        Dist::Rademacher => Univariate::Rademacher,
    }
}

fn wiener_target(t: Target) -> WienerTarget {
    match t {
        Target::Brownian => WienerTarget::Brownian,
        Target::Discretized => WienerTarget::Discretized,
    }
}

fn sobolev(model: &ModelArgs) -> Result<SobolevKernel, CliError> {
    let delta = model
        .delta
        .ok_or_else(|| CliError::config("kernel models need --delta in (0, 1)"))?;
    Ok(SobolevKernel::new(model.r, delta)?)
}

fn kernel_features(model: &ModelArgs) -> Result<(SobolevKernel, Vec<TensorEigenfunction>), CliError> {
    let k = sobolev(model)?;
    let eigs = tensor_eigs_above(&k, model.d, model.threshold)?
        .into_iter()
        .filter(|f| !f.is_constant())
        .collect();
    Ok((k, eigs))
}

fn check_model(model: &ModelArgs) -> Result<(), CliError> {
    if model.d == 0 {
        return Err(CliError::config("--d must be positive"));
    }
    if model.partitions == 0 {
        return Err(CliError::config("--partitions must be positive"));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::config(format!("--tol must be positive, got {tol}")));
    }
    Ok(())
}

/// Feature dimension `D` and feature labels of a pipeline.
fn feature_labels(kind: SweepTarget, model: &ModelArgs) -> Result<Vec<String>, CliError> {
    check_model(model)?;
    Ok(match kind {
        SweepTarget::Poly => {
            let m = u32::try_from(model.m).map_err(|_| CliError::config("--m too large"))?;
            MonomialFeatures::new(model.d, m)
                .indices()
                .iter()
                .filter(|i| !i.is_zero())
                .map(ToString::to_string)
                .collect()
        }
        SweepTarget::Wiener => {
            if model.m == 0 {
                return Err(CliError::config("--m must be positive for wiener"));
            }
            WordBasis::new(model.d, model.m).words()[1..]
                .iter()
                .map(ToString::to_string)
                .collect()
        }
        SweepTarget::Kernel => kernel_features(model)?.1.iter().map(TensorEigenfunction::label).collect(),
    })
}

struct Run {
    success: bool,
    json: Map<String, Value>,
    nodes: usize,
    residual: Option<f64>,
    wce: Option<f64>,
}

fn construction_fields<T: Scalar>(c: &Construction<T>, out: &mut Map<String, Value>) -> (usize, Option<f64>) {
    match c {
        Construction::Success(f) => {
            let residual = f.residual.to_f64_lossy();
            out.insert("success".into(), true.into());
            out.insert("weights".into(), json!(to_f64(&f.weights)));
            out.insert("indices".into(), json!(f.indices));
            out.insert("residual".into(), json!(residual));
            out.insert("separating_direction".into(), Value::Null);
            (f.len(), Some(residual))
        }
        Construction::Failure { direction, objective } => {
            out.insert("success".into(), false.into());
            out.insert("nodes".into(), json!([]));
            out.insert("weights".into(), json!([]));
            out.insert("indices".into(), json!([]));
            out.insert("residual".into(), Value::Null);
            out.insert("separating_direction".into(), json!(to_f64(direction)));
            out.insert("objective".into(), json!(objective.to_f64_lossy()));
            (0, None)
        }
    }
}

fn run_poly<T: Scalar>(model: &ModelArgs, n: usize, tol: f64, seed: u64) -> Result<Run, CliError> {
    let dist = ProductDistribution::new(univariate(model.dist), model.d);
    let m = u32::try_from(model.m).map_err(|_| CliError::config("--m too large"))?;
    let res = build_poly_cubature::<T>(&dist, m, n, seed, T::from_f64_lossy(tol))?;
    let mut json = Map::new();
    let (nodes, residual) = construction_fields(&res.construction, &mut json);
    if res.is_success() {
        json.insert("nodes".into(), json!(res.points));
    }
    Ok(Run {
        success: res.is_success(),
        json,
        nodes,
        residual,
        wce: None,
    })
}

fn run_wiener<T: Scalar>(model: &ModelArgs, n: usize, tol: f64, seed: u64) -> Result<Run, CliError> {
    let res = build_wiener_cubature::<T>(
        model.d,
        model.m,
        n,
        model.partitions,
        seed,
        T::from_f64_lossy(tol),
        wiener_target(model.target),
    )?;
    let mut json = Map::new();
    let (nodes, residual) = construction_fields(&res.construction, &mut json);
    if let Some(f) = res.construction.formula() {
        let feats: Vec<Vec<f64>> = f.nodes.iter().map(|v| to_f64(v)).collect();
        json.insert("nodes".into(), json!(feats));
        json.insert("path_ids".into(), json!(res.path_ids));
    }
    Ok(Run {
        success: res.is_success(),
        json,
        nodes,
        residual,
        wce: None,
    })
}

fn run_kernel(model: &ModelArgs, n: usize, tol: f64, seed: u64) -> Result<Run, CliError> {
    let k = sobolev(model)?;
    let res = build_kernel_quadrature(&k, model.d, model.threshold, n, seed, tol)?;
    let mut json = Map::new();
    let (nodes, residual) = construction_fields(&res.construction, &mut json);
    let mut err = None;
    if let Some(w) = res.weights() {
        json.insert("nodes".into(), json!(res.points));
        let e = wce(&res.points, w, &k, model.d)?;
        json.insert("wce".into(), json!(e));
        err = Some(e);
    }
    Ok(Run {
        success: res.is_success(),
        json,
        nodes,
        residual,
        wce: err,
    })
}

fn run_one(kind: SweepTarget, model: &ModelArgs, n: usize, tol: f64, precision: Precision, seed: u64) -> Result<Run, CliError> {
    let mut run = match (kind, precision) {
        (SweepTarget::Poly, Precision::F64) => run_poly::<f64>(model, n, tol, seed)?,
        (SweepTarget::Poly, Precision::F32) => run_poly::<f32>(model, n, tol, seed)?,
        (SweepTarget::Wiener, Precision::F64) => run_wiener::<f64>(model, n, tol, seed)?,
        (SweepTarget::Wiener, Precision::F32) => run_wiener::<f32>(model, n, tol, seed)?,
        (SweepTarget::Kernel, Precision::F64) => run_kernel(model, n, tol, seed)?,
        (SweepTarget::Kernel, Precision::F32) => {
            return Err(CliError::config("the kernel pipeline runs in f64 only"))
        }
    };
    run.json.insert("seed".into(), seed.into());
    run.json.insert("N".into(), n.into());
    Ok(run)
}

fn pipeline(kind: SweepTarget, c: &PipelineCmd) -> Result<Report, CliError> {
    check_tol(c.tol)?;
    let labels = feature_labels(kind, &c.model)?;
    let big_d = labels.len();
    if c.n < big_d + 1 {
        return Err(CliError::config(format!("need N >= D + 1 = {}, got {}", big_d + 1, c.n)));
    }
    let repeats = c.common.repeats;
    let runs: Vec<Run> = (0..repeats)
        .into_par_iter()
        .map(|r| run_one(kind, &c.model, c.n, c.tol, c.precision, repeat_seed(c.common.seed, repeats, r)))
        .collect::<Result<_, _>>()?;

    let mut table = Table::new(vec!["repeat", "seed", "N", "D", "success", "nodes", "residual", "wce"]);
    for (r, run) in runs.iter().enumerate() {
        table.push(vec![
            r.to_string(),
            run.json["seed"].to_string(),
            c.n.to_string(),
            big_d.to_string(),
            run.success.to_string(),
            run.nodes.to_string(),
            cell_opt(run.residual),
            cell_opt(run.wce),
        ]);
    }
    let mut results = Map::new();
    results.insert("D".into(), big_d.into());
    results.insert("N".into(), c.n.into());
    results.insert("features".into(), json!(labels));
    results.insert("successes".into(), runs.iter().filter(|r| r.success).count().into());
    match kind {
        SweepTarget::Wiener => {
            let basis = Arc::new(WordBasis::new(c.model.d, c.model.m));
            let target: TruncatedTensor<f64> = match c.model.target {
                Target::Brownian => expected_bm_signature(&basis),
                Target::Discretized => expected_discretized_signature(&basis, c.model.partitions)?,
            };
            results.insert("target".into(), json!(target.features()));
        }
        SweepTarget::Kernel => {
            let k = sobolev(&c.model)?;
            results.insert(
                "wce_squared_tail_bound".into(),
                json!(residual_tail_bound(&k, c.model.d, c.model.threshold)?),
            );
        }
        SweepTarget::Poly => {}
    }
    let success = runs.iter().all(|r| r.success);
    results.insert("runs".into(), Value::Array(runs.into_iter().map(|r| Value::Object(r.json)).collect()));
    Ok(Report {
        results,
        table,
        success,
        default_format: Format::Json,
    })
}

/// A sampler together with its default target point.
struct SamplerSpec {
    sampler: Box<dyn Sampler<f64>>,
    theta: Vec<f64>,
    /// Wendel's formula gives the exact probability.
    wendel: bool,
}

fn build_sampler(a: &SamplerArgs) -> Result<SamplerSpec, CliError> {
    let plain_dim = || {
        if a.big_d == 0 {
            Err(CliError::config("--D must be positive"))
        } else {
            Ok(a.big_d)
        }
    };
    let (sampler, theta): (Box<dyn Sampler<f64>>, Vec<f64>) = match a.sampler {
        SamplerKind::Gaussian => (Box::new(GaussianSampler { dim: plain_dim()? }), vec![0.0; a.big_d]),
        SamplerKind::Rademacher => (Box::new(RademacherSampler { dim: plain_dim()? }), vec![0.0; a.big_d]),
        SamplerKind::Uniform => (
            Box::new(UniformBoxSampler {
                dim: plain_dim()?,
                lo: -1.0,
                hi: 1.0,
            }),
            vec![0.0; a.big_d],
        ),
        SamplerKind::Poly => {
            check_model(&a.model)?;
            let m = u32::try_from(a.model.m).map_err(|_| CliError::config("--m too large"))?;
            let dist = ProductDistribution::new(univariate(a.model.dist), a.model.d);
            let feats = MonomialFeatures::new(a.model.d, m);
            let target = feats.target(&dist)?;
            let d = a.model.d;
            let s = FnSampler::new(feats.feature_dim(), move |rng: &mut dyn RngCore, out: &mut [f64]| {
                let mut x = vec![0.0; d];
                dist.draw_into(rng, &mut x);
                feats.eval_into(&x, out);
                Ok::<(), SamplerError>(())
            });
            (Box::new(s), target)
        }
        SamplerKind::Wiener => {
            check_model(&a.model)?;
            if a.model.m == 0 {
                return Err(CliError::config("--m must be positive for wiener"));
            }
            let basis = Arc::new(WordBasis::new(a.model.d, a.model.m));
            let target: TruncatedTensor<f64> = match a.model.target {
                Target::Brownian => expected_bm_signature(&basis),
                Target::Discretized => expected_discretized_signature(&basis, a.model.partitions)?,
            };
            let partitions = a.model.partitions;
            let b = basis.clone();
            let s = FnSampler::new(basis.len() - 1, move |rng: &mut dyn RngCore, out: &mut [f64]| {
                let path = sample_bm_path_from(rng, b.d(), partitions);
                let mut sig = TruncatedTensor::identity(b.clone());
                for inc in path.increments() {
                    sig.extend_by_segment(&inc).map_err(|e| SamplerError(e.to_string()))?;
                }
                out.copy_from_slice(sig.features());
                Ok(())
            });
            (Box::new(s), target.features().to_vec())
        }
        SamplerKind::Kernel => {
            check_model(&a.model)?;
            let (_, eigs) = kernel_features(&a.model)?;
            if eigs.is_empty() {
                return Err(CliError::config("no non-constant eigenfunction above --threshold"));
            }
            let d = a.model.d;
            let dim = eigs.len();
            let s = FnSampler::new(dim, move |rng: &mut dyn RngCore, out: &mut [f64]| {
                let x: Vec<f64> = (0..d).map(|_| rand::Rng::random::<f64>(rng)).collect();
                for (o, f) in out.iter_mut().zip(&eigs) {
                    *o = f.eval(&x);
                }
                Ok::<(), SamplerError>(())
            });
            (Box::new(s), vec![0.0; dim])
        }
    };
    let default_theta = theta;
    let theta = match &a.theta {
        Some(t) => {
            if t.len() != sampler.dim() {
                return Err(CliError::config(format!(
                    "--theta has {} entries, the sampler has dimension {}",
                    t.len(),
                    sampler.dim()
                )));
            }
            t.clone()
        }
        None => default_theta,
    };
    let wendel = a.sampler == SamplerKind::Gaussian && theta.iter().all(|x| *x == 0.0);
    Ok(SamplerSpec { sampler, theta, wendel })
}

/// Parses `3,5,8-10` into `[3, 5, 8, 9, 10]`.
pub fn parse_sizes(items: &[String], flag: &str) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for item in items.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        let bad = || CliError::config(format!("{flag}: cannot parse '{item}'"));
        match item.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(item.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(CliError::config(format!("{flag} is empty")));
    }
    Ok(out)
}

/// Parses ratios such as `1-20` (integer steps) or `0.5,2.5`.
pub fn parse_ratios(items: &[String]) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for item in items.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        if item.contains('-') {
            out.extend(parse_sizes(&[item.to_string()], "--ratios")?.into_iter().map(|x| x as f64));
        } else {
            let v: f64 = item
                .parse()
                .map_err(|_| CliError::config(format!("--ratios: cannot parse '{item}'")))?;
            out.push(v);
        }
    }
    if out.is_empty() {
        return Err(CliError::config("--ratios is empty"));
    }
    if let Some(bad) = out.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(CliError::config(format!("--ratios must be positive, got {bad}")));
    }
    Ok(out)
}

fn check_confidence(c: f64) -> Result<(), CliError> {
    if !(c > 0.0 && c < 1.0) {
        return Err(CliError::config(format!("--confidence must lie in (0, 1), got {c}")));
    }
    Ok(())
}

fn estimate_cells(e: &ProbabilityEstimate) -> [String; 6] {
    [
        cell_f64(e.estimate),
        cell_f64(e.ci_low),
        cell_f64(e.ci_high),
        e.trials.to_string(),
        e.successes.to_string(),
        e.indeterminate.to_string(),
    ]
}

fn estimate_p_cmd(c: &EstimatePCmd) -> Result<Report, CliError> {
    let sizes = parse_sizes(&c.n, "--N")?;
    if sizes.contains(&0) {
        return Err(CliError::config("--N must be positive"));
    }
    if c.trials == 0 {
        return Err(CliError::config("--trials must be positive"));
    }
    check_confidence(c.confidence)?;
    let spec = build_sampler(&c.sampler)?;
    let big_d = spec.sampler.dim();
    let mut table = Table::new(vec![
        "repeat", "seed", "N", "D", "estimate", "ci_low", "ci_high", "trials", "successes", "indeterminate",
        "confidence", "wendel",
    ]);
    let mut rows = Vec::new();
    for r in 0..c.common.repeats {
        let seed = repeat_seed(c.common.seed, c.common.repeats, r);
        for &n in &sizes {
            let e = estimate_p(&*spec.sampler, &spec.theta, n, c.trials, c.confidence, seed)?;
            let wendel = spec.wendel.then(|| wendel_probability(n as u64, big_d as u64));
            let mut row = vec![r.to_string(), seed.to_string(), n.to_string(), big_d.to_string()];
            row.extend(estimate_cells(&e));
            row.push(cell_f64(c.confidence));
            row.push(cell_opt(wendel));
            table.push(row);
            rows.push(json!({
                "repeat": r,
                "N": n,
                "estimate": e,
                "wendel": wendel,
            }));
        }
    }
    let mut results = Map::new();
    results.insert("D".into(), big_d.into());
    results.insert("theta".into(), json!(spec.theta));
    results.insert("estimates".into(), Value::Array(rows));
    Ok(Report {
        results,
        table,
        success: true,
        default_format: Format::Csv,
    })
}

fn estimate_nx_cmd(c: &EstimateNxCmd) -> Result<Report, CliError> {
    if c.trials == 0 || c.n_max == 0 {
        return Err(CliError::config("--trials and --n-max must be positive"));
    }
    check_confidence(c.confidence)?;
    let mut opts = NxOptions::new(c.trials, c.confidence, c.n_max);
    if let Some(m) = c.max_trials {
        if m < c.trials {
            return Err(CliError::config("--max-trials must be at least --trials"));
        }
        opts.max_trials = m;
    }
    let spec = build_sampler(&c.sampler)?;
    let big_d = spec.sampler.dim();
    let mut table = Table::new(vec![
        "repeat", "seed", "D", "status", "N_X", "ratio", "estimate", "ci_low", "ci_high", "trials", "successes",
        "indeterminate",
    ]);
    let mut rows = Vec::new();
    let mut all_found = true;
    for r in 0..c.common.repeats {
        let seed = repeat_seed(c.common.seed, c.common.repeats, r);
        let res = estimate_nx(&*spec.sampler, &spec.theta, seed, &opts)?;
        let (status, n, e) = match &res {
            NxEstimate::Found { n, estimate } => ("found", Some(*n), estimate),
            NxEstimate::Exceeded { last } => ("exceeded", None, last),
        };
        all_found &= n.is_some();
        let mut row = vec![
            r.to_string(),
            seed.to_string(),
            big_d.to_string(),
            status.to_string(),
            n.map(|n| n.to_string()).unwrap_or_default(),
            cell_opt(n.map(|n| n as f64 / big_d as f64)),
        ];
        row.extend(estimate_cells(e));
        table.push(row);
        rows.push(json!({
            "repeat": r,
            "seed": seed,
            "status": status,
            "N_X": n,
            "ratio": n.map(|n| n as f64 / big_d as f64),
            "estimate": e,
        }));
    }
    let mut results = Map::new();
    results.insert("D".into(), big_d.into());
    results.insert("theta".into(), json!(spec.theta));
    results.insert("max_trials".into(), opts.max_trials.into());
    results.insert("results".into(), Value::Array(rows));
    Ok(Report {
        results,
        table,
        success: all_found,
        default_format: Format::Csv,
    })
}

fn need<T: Copy>(v: Option<T>, flag: &str, what: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::config(format!("{what} needs {flag}")))
}

fn report_value(r: &BoundReport) -> Value {
    match r.value {
        BoundValue::Real(x) => json!(x),
        BoundValue::Integer(n) => json!(n),
        BoundValue::Interval { upper, .. } => json!(upper),
    }
}

fn report_table(reports: &[&BoundReport]) -> Table {
    let mut t = Table::new(vec!["name", "value", "lower", "satisfied", "clause"]);
    for r in reports {
        let (value, lower) = match r.value {
            BoundValue::Real(x) => (cell_f64(x), String::new()),
            BoundValue::Integer(n) => (n.to_string(), String::new()),
            BoundValue::Interval { lower, upper } => (upper.to_string(), cell_f64(lower)),
        };
        t.push(vec![
            r.name.as_str().to_string(),
            value,
            lower,
            r.satisfied.map(|b| b.to_string()).unwrap_or_default(),
            r.clause.to_string(),
        ]);
    }
    t
}

fn report_doc(report: &BoundReport, success: bool) -> Result<Report, CliError> {
    let mut results = Map::new();
    results.insert("value".into(), report_value(report));
    results.insert("report".into(), serde_json::to_value(report)?);
    Ok(Report {
        results,
        table: report_table(&[report]),
        success,
        default_format: Format::Json,
    })
}

fn bounds_cmd(c: &BoundsCmd) -> Result<Report, CliError> {
    let name = match c.name {
        BoundKind::Tukey => "tukey",
        BoundKind::LogConcave => "log_concave",
        BoundKind::Moment => "moment",
        BoundKind::WienerChaosK => "wiener_chaos_K",
        BoundKind::WienerN => "wiener_N",
    };
    let report = match c.name {
        BoundKind::Tukey => tukey_report(need(c.big_d, "--D", name)?, need(c.alpha, "--alpha", name)?)?,
        BoundKind::LogConcave => {
            let d = need(c.big_d, "--D", name)?;
            if d == 0 {
                return Err(CliError::config("--D must be positive"));
            }
            log_concave_report(d)
        }
        BoundKind::Moment => moment_report(need(c.big_d, "--D", name)?, need(c.k, "--K", name)?)?,
        BoundKind::WienerChaosK => wiener_chaos_report(need(c.n, "--n", name)?, need(c.p, "--p", name)?)?,
        BoundKind::WienerN => wiener_n_report(need(c.big_d, "--D", name)?, need(c.m, "--m", name)?)?,
    };
    report_doc(&report, true)
}

fn hc_cmd(c: &HcCmd) -> Result<Report, CliError> {
    match c.kind {
        HcKind::Grp => {
            let tail = match (c.tail_scale, c.tail_exponent) {
                (Some(scale), Some(exponent)) => Some(PowerLawTail { scale, exponent }),
                (None, None) => None,
                _ => return Err(CliError::config("--tail-scale and --tail-exponent go together")),
            };
            let lambdas = c.lambdas.clone().unwrap_or_default();
            let s = need(c.s, "--s", "grp")?;
            let t = need(c.t, "--t", "grp")?;
            let report = grp_hc_check(&lambdas, tail, s, t)?;
            let ok = report.satisfied != Some(false);
            report_doc(&report, ok)
        }
        HcKind::Kernel => {
            let report = kernel_hc_check(
                need(c.op_norm, "--op-norm", "kernel")?,
                need(c.trace, "--trace", "kernel")?,
                need(c.l4_norm, "--l4-norm", "kernel")?,
                need(c.r, "--r", "kernel")?,
                need(c.s, "--s", "kernel")?,
                c.diag_sup,
            )?;
            let ok = report.satisfied != Some(false);
            report_doc(&report, ok)
        }
        HcKind::Sobolev => {
            let r = need(c.r, "--r", "sobolev")?;
            if r.fract() != 0.0 || !(1.0..=4.0).contains(&r) {
                return Err(CliError::config(format!("sobolev needs an integer --r in 1..=4, got {r}")));
            }
            let hc = sobolev_hc_params(r as u32, need(c.delta, "--delta", "sobolev")?)?;
            let ok = hc.report.satisfied != Some(false);
            let mut doc = report_doc(&hc.report, ok)?;
            doc.results.insert("s".into(), json!(hc.s));
            doc.results.insert("t".into(), json!(hc.t));
            doc.results.insert("worked_example".into(), json!(hc.worked_example));
            Ok(doc)
        }
        HcKind::Khintchine => {
            let m = c
                .moments
                .as_deref()
                .ok_or_else(|| CliError::config("khintchine needs --moments m1,m2,m3,m4"))?;
            let moments: [f64; 4] = m
                .try_into()
                .map_err(|_| CliError::config(format!("--moments needs 4 values, got {}", m.len())))?;
            let k = need(c.k, "--K", "khintchine")?;
            if !(k > 0.0) {
                return Err(CliError::config("--K must be positive"));
            }
            let d = need(c.big_d, "--D", "khintchine")?;
            let worst = khintchine_worst_ratio(moments, d, c.directions, c.common.seed)?;
            let satisfied = worst <= k * (1.0 + 1e-12);
            let mut results = Map::new();
            results.insert("worst_ratio".into(), json!(worst));
            results.insert("K".into(), json!(k));
            results.insert("satisfied".into(), json!(satisfied));
            let mut table = Table::new(vec!["name", "worst_ratio", "K", "satisfied"]);
            table.push(vec!["khintchine".into(), cell_f64(worst), cell_f64(k), satisfied.to_string()]);
            Ok(Report {
                results,
                table,
                success: satisfied,
                default_format: Format::Json,
            })
        }
    }
}

fn depth_cmd(c: &DepthCmd) -> Result<Report, CliError> {
    if c.samples == 0 || c.directions == 0 {
        return Err(CliError::config("--samples and --directions must be positive"));
    }
    let spec = build_sampler(&c.sampler)?;
    let big_d = spec.sampler.dim();
    let centering = if c.center { Centering::Empirical } else { Centering::None };
    let mut table = Table::new(vec![
        "repeat", "seed", "D", "samples", "directions", "depth_upper", "n_lower", "n_upper", "p", "moment_ratio",
    ]);
    let mut rows = Vec::new();
    for r in 0..c.common.repeats {
        let seed = repeat_seed(c.common.seed, c.common.repeats, r);
        let pts: Vec<Vec<f64>> = (0..c.samples)
            .into_par_iter()
            .map(|i| {
                spec.sampler
                    .sample(&mut stream_rng(seed, i as u64))
                    .map_err(|source| HullError::Sampler { trial: i as u64, source })
            })
            .collect::<Result<_, _>>()?;
        let cloud = PointCloud64::new(pts)?;
        let depth = tukey_depth_upper(&cloud, &spec.theta, c.directions, seed)?;
        // The depth is overestimated, so only the lower N bound stays valid.
        let (n_lower, n_upper) = if depth > 0.0 {
            let (lo, hi) = tukey_bound(big_d as u64, depth)?;
            (Some(lo), Some(hi))
        } else {
            (None, None)
        };
        let ratio = match c.p {
            Some(p) => Some(empirical_moment_ratio(&*spec.sampler, p, c.directions, c.samples, seed, centering)?),
            None => None,
        };
        table.push(vec![
            r.to_string(),
            seed.to_string(),
            big_d.to_string(),
            c.samples.to_string(),
            c.directions.to_string(),
            cell_f64(depth),
            cell_opt(n_lower),
            n_upper.map(|x| x.to_string()).unwrap_or_default(),
            cell_opt(c.p),
            cell_opt(ratio.as_ref().map(|m| m.ratio)),
        ]);
        rows.push(json!({
            "repeat": r,
            "seed": seed,
            "depth_upper": depth,
            "n_lower": n_lower,
            "n_upper": n_upper,
            "moment_ratio": ratio.map(|m| json!({"p": c.p, "ratio": m.ratio, "direction": m.direction, "skipped": m.skipped})),
        }));
    }
    let mut results = Map::new();
    results.insert("D".into(), big_d.into());
    results.insert("theta".into(), json!(spec.theta));
    results.insert("results".into(), Value::Array(rows));
    Ok(Report {
        results,
        table,
        success: true,
        default_format: Format::Json,
    })
}

fn sweep_cmd(c: &SweepCmd) -> Result<Report, CliError> {
    check_tol(c.tol)?;
    let ratios = parse_ratios(&c.ratios)?;
    let big_d = feature_labels(c.pipeline, &c.model)?.len();
    let repeats = c.common.repeats;
    let sizes: Vec<usize> = ratios
        .iter()
        .map(|r| (r * big_d as f64 - 1e-9).ceil().max(1.0) as usize)
        .collect();
    let cells: Vec<(usize, u64)> = (0..sizes.len()).flat_map(|i| (0..repeats).map(move |r| (i, r))).collect();
    // N ≤ D points span at most a hyperplane, so a cell that small counts as a
    // failure without sampling.
    let outcomes: Vec<Result<bool, CliError>> = cells
        .par_iter()
        .map(|&(i, r)| {
            let n = sizes[i];
            if n <= big_d {
                return Ok(false);
            }
            let seed = repeat_seed(c.common.seed, repeats, r);
            run_one(c.pipeline, &c.model, n, c.tol, Precision::F64, seed).map(|run| run.success)
        })
        .collect();
    let mut table = Table::new(vec!["ratio", "N", "D", "runs", "successes", "indeterminate", "rate"]);
    let mut rows = Vec::new();
    let mut all = true;
    for (i, (&ratio, &n)) in ratios.iter().zip(&sizes).enumerate() {
        let (mut ok, mut indet) = (0u64, 0u64);
        for ((ci, _), out) in cells.iter().zip(&outcomes) {
            if *ci != i {
                continue;
            }
            match out {
                Ok(true) => ok += 1,
                Ok(false) => {}
                Err(e) if e.is_indeterminate() => indet += 1,
                Err(e) => return Err(CliError::config(format!("ratio {ratio}: {e}"))),
            }
        }
        all &= ok == repeats;
        let rate = ok as f64 / repeats as f64;
        table.push(vec![
            cell_f64(ratio),
            n.to_string(),
            big_d.to_string(),
            repeats.to_string(),
            ok.to_string(),
            indet.to_string(),
            cell_f64(rate),
        ]);
        rows.push(json!({
            "ratio": ratio, "N": n, "runs": repeats, "successes": ok, "indeterminate": indet, "rate": rate,
        }));
    }
    let mut results = Map::new();
    results.insert("D".into(), big_d.into());
    results.insert("cells".into(), Value::Array(rows));
    Ok(Report {
        results,
        table,
        success: all,
        default_format: Format::Csv,
    })
}
