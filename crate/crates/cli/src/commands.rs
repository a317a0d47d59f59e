//! One function per subcommand, each producing a [`Report`].

use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{self, BufWriter};
use std::path::Path;

use clap::ValueEnum;
use kcompound::certify;
use kcompound::compounds::{additive_compound, multiplicative_compound};
use kcompound::duality::{
    additive_duality_residual, exp_duality_residual, mu_duality_equality, multiplicative_duality_residual,
};
use kcompound::dynamics::{convergence_experiment, find_equilibrium, sample_box, ExperimentConfig, Terminal};
use kcompound::linalg::spd_sqrt;
use kcompound::lognorms::{mu, mu_compound_direct, mu_compound_scaled, mu_p, tau};
use kcompound::{HopfieldModel64, JacobianSampler, LogNormSpec, Matrix64, NormKind, Scaling64, TauSpec};
use serde_json::{json, Map, Value};

use crate::cli::{
    CertifyArgs, CompoundArgs, DualityArgs, Identity, Kind, LognormArgs, MethodKind, ModelKind, SimulateArgs, TauArgs,
};
use crate::error::{CliError, CliResult};
use crate::input::{self, HopfieldConfig, SimulationSection};
use crate::report::{self, num, vector, Report, Status};

/// Absolute tolerance of the multiplicative identity, times `max(1, |det A|)`.
pub const MULT_TOL: f64 = 1e-8;
/// Tolerance of the additive identity, times `max(1, |A|∞)`.
pub const ADD_TOL: f64 = 1e-10;
/// Relative tolerance of the exponential identity.
pub const EXP_TOL: f64 = 1e-7;
/// Tolerance of the log norm identity, times `max(1, |A|∞)`.
pub const MU_TOL: f64 = 1e-9;

/// Grid points per axis when a Hopfield model is sampled.
pub const DEFAULT_GRID: usize = 9;
/// Time points on `[0, π)` (one period) for the rotation example.
pub const DEFAULT_LTV_TIMES: usize = 100;
/// Every this many integration steps one row goes to a trajectory CSV.
pub const CSV_STRIDE: usize = 10;

fn name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn read_matrix(rep: &mut Report, role: &str, path: &Path) -> CliResult<Matrix64> {
    let f = input::load(path)?;
    rep.input(role, &f.digest);
    input::parse_matrix(&f.text, path)
}

fn read_vector(rep: &mut Report, role: &str, path: &Path) -> CliResult<Vec<f64>> {
    let f = input::load(path)?;
    rep.input(role, &f.digest);
    input::parse_vector(&f.text, path)
}

fn read_scaling(rep: &mut Report, path: Option<&Path>) -> CliResult<Option<Scaling64>> {
    path.map(|p| Ok(Scaling64::new(read_matrix(rep, "scaling", p)?)?)).transpose()
}

fn read_hopfield(rep: &mut Report, path: &Path) -> CliResult<(HopfieldConfig, HopfieldModel64)> {
    let f = input::load(path)?;
    rep.input("config", &f.digest);
    let cfg = HopfieldConfig::parse(&f.text, path)?;
    let model = cfg.build(path)?;
    Ok((cfg, model))
}

pub fn compound(a: &CompoundArgs) -> CliResult<Report> {
    let mut rep = Report::new("compound");
    rep.arg("input", path_str(&a.input)).arg("k", a.k).arg("kind", name(a.kind));
    if let Some(out) = &a.out {
        rep.arg("out", path_str(out));
    }
    let m = read_matrix(&mut rep, "input", &a.input)?;
    let c = match a.kind {
        Kind::Mult => multiplicative_compound(&m, a.k)?,
        Kind::Add => additive_compound(&m, a.k)?,
    }
    .into_matrix();
    if let Some(out) = &a.out {
        fs::write(out, input::format_matrix(&c)).map_err(|source| CliError::Write {
            path: out.clone(),
            source,
        })?;
    }
    rep.results = json!({ "rows": c.rows(), "cols": c.cols(), "matrix": report::matrix(&c) });
    Ok(rep)
}

pub fn lognorm(a: &LognormArgs) -> CliResult<Report> {
    let mut rep = Report::new("lognorm");
    rep.arg("input", path_str(&a.input)).arg("p", a.p.to_string());
    if let Some(k) = a.k {
        rep.arg("k", k);
    }
    if let Some(s) = &a.scaling {
        rep.arg("scaling", path_str(s));
    }
    let m = read_matrix(&mut rep, "input", &a.input)?;
    let scaling = read_scaling(&mut rep, a.scaling.as_deref())?;
    let value = match (a.k, scaling) {
        (None, None) => mu(&m, &LogNormSpec::new(a.p))?,
        (None, Some(s)) => mu(&m, &LogNormSpec::scaled(a.p, s))?,
        (Some(k), None) => mu_compound_direct(&m, k, a.p)?,
        (Some(k), Some(s)) => mu_compound_scaled(&m, k, a.p, Some(&s))?,
    };
    rep.results = json!({ "value": num(value) });
    Ok(rep)
}

pub fn tau_cmd(a: &TauArgs) -> CliResult<Report> {
    let mut rep = Report::new("tau");
    rep.arg("input", path_str(&a.input)).arg("k", a.k).arg("p", a.p.to_string());
    if let Some(s) = &a.scaling {
        rep.arg("scaling", path_str(s));
    }
    let m = read_matrix(&mut rep, "input", &a.input)?;
    let mut spec = TauSpec::new(a.p, a.k);
    if let Some(s) = read_scaling(&mut rep, a.scaling.as_deref())? {
        spec = spec.with_scaling(s);
    }
    rep.results = json!({ "value": num(tau(&m, &spec)?) });
    Ok(rep)
}

enum Model {
    Matrix(Matrix64),
    Hopfield(HopfieldModel64),
    Ltv,
}

fn usage(msg: String) -> CliError {
    CliError::Usage(msg)
}

/// Rejects options the chosen model and method would silently ignore.
fn check_options(a: &CertifyArgs) -> CliResult<()> {
    use MethodKind as M;
    let method = name(a.method);
    let reject = |flag: &str, allowed: bool| {
        if allowed {
            Ok(())
        } else {
            Err(usage(format!("{flag} is not used by --model {} --method {method}", name(a.model))))
        }
    };
    let sampled = a.model != ModelKind::Matrix && matches!(a.method, M::Direct | M::Tau | M::Smith);
    reject("--input", a.input.is_none() || a.model == ModelKind::Matrix)?;
    reject("--config", a.config.is_none() || a.model == ModelKind::Hopfield)?;
    reject("--weights", a.weights.is_none() || matches!(a.method, M::TraceDominance | M::Hopfield))?;
    reject("--scaling", a.scaling.is_none() || matches!(a.method, M::Direct | M::Tau | M::LocalStability))?;
    reject("--q", a.q.is_none() || a.method == M::Smith)?;
    reject("--theta", a.theta.is_none() || a.method == M::Smith)?;
    reject("--grid", a.grid.is_none() || sampled)?;
    reject("--samples", a.samples.is_none() || sampled)?;
    reject(
        "--at",
        a.at.is_none() || (a.model == ModelKind::Hopfield && matches!(a.method, M::LocalStability | M::LiWang)),
    )?;
    let fixed_norm = match a.method {
        M::TraceDominance | M::Hopfield => Some(NormKind::LInf),
        M::Smith => Some(NormKind::L2),
        _ => None,
    };
    match (a.p, fixed_norm, a.method) {
        (Some(_), None, M::LiWang) => Err(usage("--p is not used by --method li-wang".into())),
        (Some(p), Some(q), _) if p != q => Err(usage(format!("--method {method} works in the {q}-norm, got --p {p}"))),
        _ => Ok(()),
    }?;
    match (a.k, a.method) {
        (Some(k), M::LiWang | M::LocalStability) if k != 2 => {
            Err(usage(format!("--method {method} is a 2-compound test, got --k {k}")))
        }
        (None, M::LiWang | M::LocalStability) | (Some(_), _) => Ok(()),
        (None, _) => Err(usage(format!("--method {method} needs --k"))),
    }
}

fn sampler(model: &Model, a: &CertifyArgs) -> CliResult<JacobianSampler<f64>> {
    Ok(match model {
        Model::Matrix(m) => JacobianSampler::constant(m.clone())?,
        Model::Hopfield(h) => {
            let n = h.n();
            let (lo, hi) = (vec![-a.half_width; n], vec![a.half_width; n]);
            let s = JacobianSampler::hopfield(h.clone());
            match a.samples {
                Some(count) => s.with_random_states(&lo, &hi, count, a.seed)?,
                None => s.with_grid(&lo, &hi, a.grid.unwrap_or(DEFAULT_GRID))?,
            }
        }
        Model::Ltv => {
            let times = match a.samples {
                Some(count) => sample_box(&[0.0], &[PI], count, a.seed).into_iter().map(|t| t[0]).collect(),
                None => {
                    let count = a.grid.unwrap_or(DEFAULT_LTV_TIMES);
                    (0..count).map(|i| PI * i as f64 / count as f64).collect()
                }
            };
            JacobianSampler::ltv_rotation(times)
        }
    })
}

pub fn certify_cmd(a: &CertifyArgs) -> CliResult<Report> {
    let mut rep = Report::new("certify");
    rep.arg("model", name(a.model)).arg("method", name(a.method)).arg("eta", num(a.eta));
    if let Some(k) = a.k {
        rep.arg("k", k);
    }
    if let Some(p) = a.p {
        rep.arg("p", p.to_string());
    }
    for (key, path) in [
        ("input", &a.input),
        ("config", &a.config),
        ("weights", &a.weights),
        ("scaling", &a.scaling),
        ("q", &a.q),
    ] {
        if let Some(path) = path {
            rep.arg(key, path_str(path));
        }
    }
    if let Some(th) = a.theta {
        rep.arg("theta", num(th));
    }
    if a.model == ModelKind::Hopfield && matches!(a.method, MethodKind::Direct | MethodKind::Tau | MethodKind::Smith) {
        rep.arg("box", num(a.half_width));
    }
    if let Some(g) = a.grid {
        rep.arg("grid", g);
    }
    if let Some(s) = a.samples {
        rep.arg("samples", s).arg("seed", a.seed);
    }
    if let Some(at) = &a.at {
        rep.arg("at", vector(at));
    }
    check_options(a)?;

    let model = match a.model {
        ModelKind::Matrix => {
            let path = a.input.as_deref().ok_or_else(|| usage("--model matrix needs --input".into()))?;
            Model::Matrix(read_matrix(&mut rep, "input", path)?)
        }
        ModelKind::Hopfield => {
            let path = a.config.as_deref().ok_or_else(|| usage("--model hopfield needs --config".into()))?;
            Model::Hopfield(read_hopfield(&mut rep, path)?.1)
        }
        ModelKind::Ltv => Model::Ltv,
    };
    let unsupported = || {
        CliError::Unsupported(format!(
            "--method {} does not apply to --model {}",
            name(a.method),
            name(a.model)
        ))
    };
    let weights = a.weights.as_deref().map(|p| read_vector(&mut rep, "weights", p)).transpose()?;
    let scaling = read_scaling(&mut rep, a.scaling.as_deref())?;
    let p = a.p.unwrap_or(NormKind::LInf);
    let k = a.k.unwrap_or(2);
    let mut extra = Map::new();

    let cert = match a.method {
        MethodKind::Direct => certify::certify_direct(&sampler(&model, a)?, k, p, scaling.as_ref(), a.eta)?,
        MethodKind::Tau => certify::certify_tau(&sampler(&model, a)?, k, p, scaling.as_ref(), a.eta)?,
        MethodKind::TraceDominance => {
            let Model::Matrix(m) = &model else {
                return Err(unsupported());
            };
            let d = match weights {
                Some(d) => d,
                None => {
                    let found = certify::search_diagonal_weights(m, k)?;
                    extra.insert("weight_search".into(), json!(if found.is_some() { "found" } else { "not_found" }));
                    found.unwrap_or_else(|| vec![1.0; m.rows()])
                }
            };
            certify::trace_dominance(m, k, &d, a.eta)?
        }
        MethodKind::Smith => {
            let s = sampler(&model, a)?;
            let q = match a.q.as_deref() {
                Some(path) => read_matrix(&mut rep, "q", path)?,
                None => Matrix64::identity(s.dim()),
            };
            let samples = s
                .samples()
                .into_iter()
                .map(|(t, x)| Ok((t, s.evaluate(t, x)?)))
                .collect::<CliResult<Vec<_>>>()?;
            let theta = match a.theta {
                Some(th) => vec![th; samples.len()],
                None => {
                    let p = Scaling64::new(spd_sqrt(&q)?)?;
                    samples
                        .iter()
                        .map(|(_, j)| Ok(mu_p(&p.conjugate(&-j)?, NormKind::L2)?))
                        .collect::<CliResult<_>>()?
                }
            };
            certify::ltv_smith_certify(&samples, &q, &theta, k, a.eta)?
        }
        MethodKind::Hopfield => {
            let Model::Hopfield(h) = &model else {
                return Err(unsupported());
            };
            certify::hopfield_certify(h, k, weights.as_deref(), a.eta)?
        }
        MethodKind::LocalStability | MethodKind::LiWang => {
            let j = match &model {
                Model::Matrix(m) => m.clone(),
                Model::Hopfield(h) => {
                    let x0 = a.at.clone().unwrap_or_else(|| vec![0.0; h.n()]);
                    if x0.len() != h.n() {
                        return Err(usage(format!("--at has {} coordinates, the model has {}", x0.len(), h.n())));
                    }
                    let e = find_equilibrium(|x| h.field(x), |x| h.jacobian(x), &x0)?;
                    extra.insert("equilibrium".into(), vector(&e));
                    h.jacobian(&e)
                }
                Model::Ltv => return Err(unsupported()),
            };
            if a.method == MethodKind::LiWang {
                certify::li_wang_certificate(&j)?
            } else {
                certify::local_stability_certificate(&j, p, scaling.as_ref())?
            }
        }
    };
    extra.insert("certificate".into(), report::certificate(&cert));
    rep.results = Value::Object(extra);
    rep.status = Status::from_pass(cert.passed);
    Ok(rep)
}

fn check_entry(residual: f64, tolerance: f64) -> Value {
    json!({ "residual": num(residual), "tolerance": num(tolerance), "passed": residual <= tolerance })
}

pub fn duality_check(a: &DualityArgs) -> CliResult<Report> {
    let mut rep = Report::new("duality-check");
    rep.arg("input", path_str(&a.input)).arg("k", a.k).arg("which", name(a.which));
    let m = read_matrix(&mut rep, "input", &a.input)?;
    let scale = m.norm_inf().max(1.0);
    let (results, passed) = match a.which {
        Identity::Mult => {
            let r = multiplicative_duality_residual(&m, a.k)?;
            let det = kcompound::linalg::det(&m)?;
            let tol = MULT_TOL * det.abs().max(1.0);
            (check_entry(r, tol), r <= tol)
        }
        Identity::Add => {
            let r = additive_duality_residual(&m, a.k)?;
            (check_entry(r, ADD_TOL * scale), r <= ADD_TOL * scale)
        }
        Identity::Exp => {
            let r = exp_duality_residual(&m, a.k)?;
            (check_entry(r, EXP_TOL), r <= EXP_TOL)
        }
        Identity::Mu => {
            let tol = MU_TOL * scale;
            let mut all = true;
            let mut per_norm = Map::new();
            for p in NormKind::ALL {
                let (lhs, rhs) = mu_duality_equality(&m, a.k, &LogNormSpec::new(p))?;
                let gap = (lhs - rhs).abs();
                all &= gap <= tol;
                let mut entry = check_entry(gap, tol);
                entry["lhs"] = num(lhs);
                entry["rhs"] = num(rhs);
                per_norm.insert(p.to_string(), entry);
            }
            (json!({ "norms": per_norm, "passed": all }), all)
        }
    };
    rep.results = results;
    rep.status = Status::from_pass(passed);
    Ok(rep)
}

fn write_err(path: &Path) -> impl Fn(io::Error) -> CliError + '_ {
    move |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    }
}

pub fn simulate(a: &SimulateArgs) -> CliResult<Report> {
    let mut rep = Report::new("simulate");
    let (cfg, model) = read_hopfield(&mut rep, &a.config)?;
    let sim = cfg.simulation.clone().unwrap_or_default();
    let n = model.n();
    let trials = a.trials.or(sim.trials).unwrap_or(20);
    let seed = a.seed.or(sim.seed).unwrap_or(7);
    let t_end = a.t_end.or(sim.t_end).unwrap_or(35.0);
    let step = a.step.or(sim.step).unwrap_or(1e-3);
    let (lo, hi) = cfg.box_bounds(&a.config)?.unwrap_or_else(|| (vec![-3.0; n], vec![3.0; n]));
    rep.arg("config", path_str(&a.config))
        .arg("trials", trials)
        .arg("seed", seed)
        .arg("T", num(t_end))
        .arg("step", num(step))
        .arg("ic_lower", vector(&lo))
        .arg("ic_upper", vector(&hi));
    if let Some(dir) = &a.csv {
        rep.arg("csv", path_str(dir));
    }

    let SimulationSection {
        initial,
        equilibrium_guesses,
        ..
    } = sim;
    let guesses = if equilibrium_guesses.is_empty() {
        vec![vec![0.0; n], vec![1.0; n], vec![-1.0; n]]
    } else {
        equilibrium_guesses
    };
    for x in initial.iter().chain(&guesses) {
        if x.len() != n {
            return Err(CliError::parse(&a.config, format!("point {x:?} does not have {n} coordinates")));
        }
    }
    let mut ec = ExperimentConfig::new(n, trials, 0.0, 0.0, t_end, seed);
    ec.ic_lower = lo;
    ec.ic_upper = hi;
    ec.step = step;
    ec.fixed_initial = initial;
    ec.equilibrium_guesses = guesses;
    ec.keep_every = a.csv.as_ref().map(|_| CSV_STRIDE);
    let summary = convergence_experiment(&model, &ec)?;

    let mut files = Vec::new();
    if let Some(dir) = &a.csv {
        fs::create_dir_all(dir).map_err(write_err(dir))?;
        for (i, o) in summary.outcomes.iter().enumerate() {
            let Some(tr) = &o.trajectory else { continue };
            let file = format!("trajectory_{i:04}.csv");
            let path = dir.join(&file);
            let out = File::create(&path).map_err(write_err(&path))?;
            tr.write_csv(BufWriter::new(out))
                .map_err(|e| write_err(&path)(io::Error::other(e.to_string())))?;
            files.push(file);
        }
    }

    let runs: Vec<Value> = summary
        .outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let mut run = json!({
                "index": i,
                "initial": vector(&o.initial),
                "terminal_state": vector(&o.terminal_state),
                "class": o.terminal.label(),
            });
            match &o.terminal {
                Terminal::Converged { equilibrium, distance } => {
                    run["equilibrium"] = json!(equilibrium);
                    run["distance"] = num(*distance);
                }
                Terminal::Settled { tail_change } => run["tail_change"] = num(*tail_change),
                Terminal::BoundedNonconverged | Terminal::Diverged => {}
            }
            run
        })
        .collect();
    let settled = summary.total() - summary.converged() - summary.bounded_nonconverged - summary.diverged;
    let mut results = json!({
        "equilibria": summary.equilibria.iter().map(|e| vector(e)).collect::<Vec<_>>(),
        "converged_counts": summary.converged_counts,
        "total": summary.total(),
        "converged": summary.converged(),
        "settled_unmatched": settled,
        "bounded_nonconverged": summary.bounded_nonconverged,
        "diverged": summary.diverged,
        "all_converged": summary.all_converged(),
        "runs": runs,
    });
    if a.csv.is_some() {
        results["csv_files"] = json!(files);
    }
    rep.results = results;
    Ok(rep)
}
