//! The five commands.

use std::path::Path;

use ccc_core::coframe::checks::{
    dd_zero, dual_relations, geodesic_identities, reconstruction, verify_induced_structure, IdentityReport,
};
use ccc_core::cone::{double_bracket_check, geodesic_tangency_check, smooth_check, BracketMode};
use ccc_core::flatten::{equal_up_to_constant, ErrorKind, IntegrationMode};
use ccc_core::funcfield::Rationals;
use ccc_core::io::{coframe_json, variety_json};
use ccc_core::xi::constraints::{span_check, tangent_lines_nondegenerate};
use ccc_core::xi::xi_v;
use ccc_core::{
    adapted_cone, certify, conformal_closedness_test, models, parse_ratfunc, CertifyConfig, Chart,
    ClosednessVerdict, Coframe, Hypersurface, Status, XiConfig,
};
use serde::Serialize;

use crate::config::{Backend, CliError, Command, ModelKind, ProblemConfig, EXIT_CONFIG, EXIT_INTERNAL};
use crate::report::{Check, RunReport};

const DEFAULT_PRIME: u64 = 2_147_483_647;

pub fn run(command: &Command, cfg: &ProblemConfig) -> Result<RunReport, CliError> {
    let mut report = RunReport::new(cfg);
    match command {
        Command::Xi => xi(cfg, &mut report)?,
        Command::Certify { quadrature } => run_certify(cfg, *quadrature, &mut report)?,
        Command::VerifyIdentities { cases, degree } => verify_identities(cfg, *cases, *degree, &mut report)?,
        Command::Model {
            kind,
            scale,
            matrix,
            emit,
        } => model(cfg, *kind, scale.as_deref(), matrix.as_deref(), emit, &mut report)?,
        Command::Selftest => selftest(&mut report),
    }
    Ok(report)
}

fn rank_check(name: &str, r: &ccc_core::xi::constraints::RankReport) -> Check {
    Check::new(
        name,
        r.pass,
        format!("rank {} of {} from {} samples mod {}", r.rank, r.expected, r.samples, r.prime),
    )
}

fn xi(cfg: &ProblemConfig, report: &mut RunReport) -> Result<(), CliError> {
    let z = cfg.variety_or_default()?;
    let xcfg = cfg.xi_config();
    let mut rank_cfg = xcfg.clone();
    if rank_cfg.primes.is_empty() {
        rank_cfg.primes = vec![DEFAULT_PRIME];
    }

    let smooth = report.time("smooth_check", || smooth_check(&z))?;
    report.set("smooth", &smooth)?;
    let span = report.time("span_check", || span_check(&z, &rank_cfg))?;
    report.push(rank_check("span_check", &span));
    report.set("span_check", &span)?;
    let lines = report.time("tangent_lines", || tangent_lines_nondegenerate(&z, &rank_cfg))?;
    report.push(rank_check("tangent_lines_nondegenerate", &lines));
    report.set("tangent_lines", &lines)?;
    let x = report.time("xi_z", || ccc_core::xi_z(&z, &xcfg))?;
    let r = x.report();
    report.push(Check::new(
        "contains_xi_V",
        r.contains_xi_v,
        format!("dim Xi_V {}, dim Xi_Z {}", r.dim_xi_v, r.dim_xi_z),
    ));
    report.set("xi", &r)?;

    if !r.contains_xi_v {
        report.fail_internal();
    } else if !(span.pass && lines.pass && r.stable) {
        report.reject();
    }
    Ok(())
}

fn run_certify(cfg: &ProblemConfig, quadrature: bool, report: &mut RunReport) -> Result<(), CliError> {
    let z = cfg.variety_or_default()?;
    let omega = cfg.load_coframe()?.ok_or_else(|| CliError::Config("`certify` needs --coframe".into()))?;
    let cs = adapted_cone(&omega, &z)?;
    let x = report.time("xi_z", || ccc_core::xi_z(&z, &cfg.xi_config()))?;
    let mut ccfg = CertifyConfig {
        seed: cfg.seed(),
        ..CertifyConfig::default()
    };
    if let Some(n) = cfg.samples {
        ccfg.validation_samples = n;
    }
    if let Some(t) = cfg.tol {
        ccfg.validation_tol = t;
    }
    if quadrature {
        ccfg.integration = IntegrationMode::Quadrature;
    }
    let cert = report.time("certify", || certify(&cs, &x, &ccfg));
    report.set("certificate", &cert)?;
    match cert.status {
        Status::Flat | Status::ConformallyFlat => {}
        Status::Rejected => report.reject(),
        Status::Error => match cert.error.as_ref().map(|e| e.kind) {
            Some(ErrorKind::Input) => report.fail_with(EXIT_CONFIG, "error"),
            _ => report.fail_with(EXIT_INTERNAL, "error"),
        },
    }
    Ok(())
}

fn identity_check(case: usize, r: &IdentityReport) -> Check {
    Check::new(
        format!("case {case}: {}", r.name),
        r.pass,
        format!("{} failures, max residual {:e}", r.failures, r.max_residual),
    )
}

#[derive(Serialize)]
struct CaseSummary {
    case: usize,
    coframe_seed: u64,
    matrix: Vec<Vec<String>>,
    checks: usize,
    passed: usize,
}

fn verify_identities(cfg: &ProblemConfig, cases: usize, degree: u32, report: &mut RunReport) -> Result<(), CliError> {
    if cases == 0 || degree == 0 {
        return Err(CliError::Config("--cases and --degree must be positive".into()));
    }
    let z = cfg.variety_or_default()?;
    let n = z.n();
    let mode = match cfg.backend {
        Some(Backend::Rational) => BracketMode::Rational,
        Some(Backend::Float) => BracketMode::Float,
        _ => BracketMode::Prime,
    };
    let prime = cfg.primes.first().copied().unwrap_or(DEFAULT_PRIME);
    let samples = cfg.samples.unwrap_or(4);
    let tol = cfg.tol.unwrap_or(1e-8);
    let seed = cfg.seed();
    let mut summaries = Vec::new();
    let start = std::time::Instant::now();
    for case in 0..cases {
        let cseed = seed.wrapping_mul(1_000_003).wrapping_add(case as u64);
        let omega = models::random_polynomial(n, degree, cseed)?;
        let mut reports = vec![dd_zero(&omega), reconstruction(&omega)];
        reports.push(verify_induced_structure(&omega)?);
        reports.push(dual_relations(&omega)?);
        reports.push(geodesic_identities(&omega)?);
        let cs = adapted_cone(&omega, &z)?;
        reports.push(geodesic_tangency_check(&cs));
        let before = report.checks.len();
        for r in &reports {
            report.push(identity_check(case, r));
        }
        let db = double_bracket_check(&cs, mode, samples, cseed, prime, tol)?;
        report.push(Check::new(
            format!("case {case}: double_bracket"),
            db.pass,
            format!(
                "{} mode, {} samples, {} failures, max residual {:e}",
                serde_json::to_value(db.mode).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                db.samples,
                db.failures,
                db.max_residual
            ),
        ));
        let mine = &report.checks[before..];
        summaries.push(CaseSummary {
            case,
            coframe_seed: cseed,
            matrix: ccc_core::io::CoframeFile::from_coframe(&omega).matrix,
            checks: mine.len(),
            passed: mine.iter().filter(|c| c.pass).count(),
        });
    }
    report.timings.insert("cases".into(), start.elapsed().as_secs_f64());
    report.set("cases", &summaries)?;
    report.set("degree", degree)?;
    report.set("bracket_samples", samples)?;
    report.finish_checks();
    Ok(())
}

fn model_coframe(
    kind: ModelKind,
    n: usize,
    scale: Option<&str>,
    matrix: Option<&str>,
) -> Result<Coframe, CliError> {
    let chart = Chart::standard(n)?;
    match kind {
        ModelKind::Flat => {
            if scale.is_some() || matrix.is_some() {
                return Err(CliError::Config("the flat model takes no --scale or --matrix".into()));
            }
            Ok(models::flat(chart)?)
        }
        ModelKind::Rescaled => {
            if matrix.is_some() {
                return Err(CliError::Config("the rescaled model takes --scale, not --matrix".into()));
            }
            let s = parse_ratfunc(scale.unwrap_or("1/(1-x1)"), chart.variables())?;
            Ok(models::rescaled(chart, &s)?)
        }
        ModelKind::Twisted => {
            if scale.is_some() {
                return Err(CliError::Config("the twisted model takes --matrix, not --scale".into()));
            }
            match matrix {
                None => Ok(models::twisted_default(n)?),
                Some(text) => {
                    let rows: Vec<Vec<String>> = serde_json::from_str(text)
                        .map_err(|e| CliError::Config(format!("--matrix: {e}")))?;
                    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                        return Err(CliError::Config(format!("--matrix must be {n} by {n}")));
                    }
                    Ok(Coframe::from_strings(chart, &rows)?)
                }
            }
        }
    }
}

fn model(
    cfg: &ProblemConfig,
    kind: ModelKind,
    scale: Option<&str>,
    matrix: Option<&str>,
    dir: &Path,
    report: &mut RunReport,
) -> Result<(), CliError> {
    let z = cfg.variety_or_default()?;
    let omega = model_coframe(kind, z.n(), scale, matrix)?;
    adapted_cone(&omega, &z)?;
    std::fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?;
    let vpath = dir.join("variety.json");
    let cpath = dir.join("coframe.json");
    for (path, text) in [(&vpath, variety_json(&z)?), (&cpath, coframe_json(&omega)?)] {
        std::fs::write(path, text + "\n").map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    }
    let back = ccc_core::io::load_coframe(&cpath)?;
    let same = ccc_core::io::CoframeFile::from_coframe(&back) == ccc_core::io::CoframeFile::from_coframe(&omega);
    report.push(Check::new("round_trip", same, "reloaded coframe equals the emitted one"));
    report.set("model", kind)?;
    report.set("variety_file", vpath.display().to_string())?;
    report.set("coframe_file", cpath.display().to_string())?;
    report.set("coframe", ccc_core::io::CoframeFile::from_coframe(&omega))?;
    report.finish_checks();
    Ok(())
}

type Case = fn() -> Result<String, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn quartic() -> Result<Hypersurface, String> {
    Hypersurface::fermat(3, 4).map_err(err)
}

fn case_xi_v() -> Result<String, String> {
    for n in 3..=6 {
        let d = xi_v(Rationals, n).map_err(err)?.dim();
        if d != n {
            return Err(format!("n = {n}: dim {d}"));
        }
    }
    Ok("dim Xi_V = n for n = 3..6".into())
}

fn case_xi_z() -> Result<String, String> {
    let z = quartic()?;
    let x = ccc_core::xi_z(&z, &XiConfig::default()).map_err(err)?;
    let r = x.report();
    if r.dim_xi_z != 3 || !r.contains_xi_v || !r.stable {
        return Err(format!("dim {} contains {} stable {}", r.dim_xi_z, r.contains_xi_v, r.stable));
    }
    let t = tangent_lines_nondegenerate(&z, &XiConfig::default()).map_err(err)?;
    if !t.pass {
        return Err(format!("tangent-line rank {}", t.rank));
    }
    Ok(format!("Fermat quartic: dims ({}, {}) on {}", r.dim_xi_v, r.dim_xi_z, r.backend))
}

fn case_identities() -> Result<String, String> {
    let z = quartic()?;
    for seed in 0..3 {
        let omega = models::random_polynomial(3, 2, 1000 + seed).map_err(err)?;
        let mut reports = vec![dd_zero(&omega), reconstruction(&omega)];
        reports.push(verify_induced_structure(&omega).map_err(err)?);
        reports.push(dual_relations(&omega).map_err(err)?);
        reports.push(geodesic_identities(&omega).map_err(err)?);
        reports.push(geodesic_tangency_check(&adapted_cone(&omega, &z).map_err(err)?));
        if let Some(r) = reports.iter().find(|r| !r.pass) {
            return Err(format!("seed {seed}: {}", r.name));
        }
    }
    Ok("identity suite on 3 random coframes".into())
}

fn case_double_bracket() -> Result<String, String> {
    let z = quartic()?;
    let cs = adapted_cone(&models::rescaled_default(3).map_err(err)?, &z).map_err(err)?;
    let r = double_bracket_check(&cs, BracketMode::Rational, 10, 8, 0, 0.0).map_err(err)?;
    let cs = adapted_cone(&models::random_polynomial(3, 1, 88).map_err(err)?, &z).map_err(err)?;
    let f = double_bracket_check(&cs, BracketMode::Float, 10, 8, 0, 1e-8).map_err(err)?;
    let p = double_bracket_check(&cs, BracketMode::Prime, 10, 8, DEFAULT_PRIME, 0.0).map_err(err)?;
    if !(r.pass && f.pass && p.pass) {
        return Err(format!("failures: rational {}, float {}, prime {}", r.failures, f.failures, p.failures));
    }
    Ok(format!("rational, prime exact; float max relative error {:.1e}", f.max_residual))
}

fn case_closedness() -> Result<String, String> {
    let v = conformal_closedness_test(&models::rescaled_default(3).map_err(err)?).map_err(err)?;
    if !matches!(v, ClosednessVerdict::ConformallyClosed { .. }) {
        return Err(format!("rescaled: {}", v.name()));
    }
    let h = conformal_closedness_test(&models::heisenberg(3).map_err(err)?).map_err(err)?;
    if !matches!(h, ClosednessVerdict::NotConformallyClosed { .. }) {
        return Err(format!("heisenberg: {}", h.name()));
    }
    Ok("rescaled closed, Heisenberg not".into())
}

fn case_certify() -> Result<String, String> {
    let z = quartic()?;
    let x = ccc_core::xi_z(&z, &XiConfig::default()).map_err(err)?;
    let cfg = CertifyConfig::default();
    let run = |c: Coframe| -> Result<Status, String> {
        Ok(certify(&adapted_cone(&c, &z).map_err(err)?, &x, &cfg).status)
    };
    let flat = run(models::flat(Chart::standard(3).map_err(err)?).map_err(err)?)?;
    let resc = run(models::rescaled_default(3).map_err(err)?)?;
    let tw = run(models::twisted_default(3).map_err(err)?)?;
    if (flat, resc, tw) != (Status::Flat, Status::ConformallyFlat, Status::Rejected) {
        return Err(format!("flat {flat:?}, rescaled {resc:?}, twisted {tw:?}"));
    }
    for seed in 0..3 {
        let rt = models::round_trip(3, seed).map_err(err)?;
        let cert = certify(&adapted_cone(&rt.coframe, &z).map_err(err)?, &x, &cfg);
        let ok = cert
            .factor
            .as_ref()
            .and_then(|f| f.rational())
            .is_some_and(|f| equal_up_to_constant(&rt.f, f));
        if !ok {
            return Err(format!("round trip {seed}: {:?}", cert.status));
        }
    }
    Ok("flat, conformally flat, rejected; 3 round trips".into())
}

fn selftest(report: &mut RunReport) {
    let cases: [(&str, Case); 6] = [
        ("xi_v", case_xi_v),
        ("xi_z_fermat_quartic", case_xi_z),
        ("identity_suite", case_identities),
        ("double_bracket", case_double_bracket),
        ("conformal_closedness", case_closedness),
        ("certify_models", case_certify),
    ];
    for (name, f) in cases {
        let out = report.time(name, f);
        report.push(match out {
            Ok(d) => Check::new(name, true, d),
            Err(e) => Check::new(name, false, e),
        });
    }
    report.finish_checks();
}
