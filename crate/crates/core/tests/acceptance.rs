//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p ccc-core --test acceptance`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ccc_core::coframe::checks::{
    dd_zero, dual_relations, geodesic_identities, reconstruction, verify_induced_structure,
};
use ccc_core::cone::{double_bracket_check, geodesic_tangency_check, BracketMode};
use ccc_core::flatten::equal_up_to_constant;
use ccc_core::funcfield::{Rationals, Scalars};
use ccc_core::xi::constraints::tangent_lines_nondegenerate;
use ccc_core::xi::{iota, iota_identity, xi_v};
use ccc_core::{
    adapted_cone, certify, conformal_closedness_test, models, parse_ratfunc, CertifyConfig, Chart, ClosednessVerdict,
    Coframe, Hypersurface, RatFunc, Stage, Status, XiConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn quartic() -> Hypersurface {
    Hypersurface::fermat(3, 4).unwrap()
}

fn names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn c1() -> Outcome {
    let mut dims = Vec::new();
    for n in 3..=6 {
        let d = xi_v(Rationals, n).map_err(|e| e.to_string())?.dim();
        ensure(d == n, format!("n = {n}: dim {d}"))?;
        dims.push(d);
    }
    Ok(format!("dims {dims:?}"))
}

fn random_eta(rng: &mut ChaCha8Rng, n: usize) -> Vec<RatFunc> {
    (0..n)
        .map(|_| {
            let c0 = rng.gen_range(-4..=4);
            let j = rng.gen_range(1..=n);
            let c1 = rng.gen_range(-4..=4);
            let text = if rng.gen_bool(0.4) {
                let d = rng.gen_range(1..=3);
                format!("({c0} + ({c1})*x{j})/(1 + {d}*x{j}^2)")
            } else {
                format!("{c0} + ({c1})*x{j}")
            };
            parse_ratfunc(&text, &names(n)).unwrap()
        })
        .collect()
}

fn c2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..50 {
        let n = 3 + case % 2;
        let deg = if n == 3 { 2 } else { 1 };
        let omega = models::random_polynomial(n, deg, case as u64).unwrap();
        let eta = random_eta(&mut rng, n);
        let r = iota_identity(&eta, &omega);
        ensure(r.pass, format!("pair {case}: {} failures", r.failures))?;
    }
    Ok("50 pairs".into())
}

fn c3() -> Outcome {
    let mut count = 0;
    for seed in 0..25u64 {
        let omega = models::random_polynomial(3, 2, 1000 + seed).unwrap();
        let mut reports = vec![dd_zero(&omega), reconstruction(&omega)];
        for r in [
            verify_induced_structure(&omega),
            dual_relations(&omega),
            geodesic_identities(&omega),
        ] {
            reports.push(r.map_err(|e| format!("seed {seed}: {e}"))?);
        }
        for r in &reports {
            ensure(r.pass, format!("seed {seed}: {} failed ({} failures)", r.name, r.failures))?;
            count += 1;
        }
    }
    Ok(format!("{count} identity checks on 25 coframes"))
}

fn c4() -> Outcome {
    let z = quartic();
    for (name, c) in [
        ("flat", models::flat(Chart::standard(3).unwrap()).unwrap()),
        ("rescaled", models::rescaled_default(3).unwrap()),
        ("twisted", models::twisted_default(3).unwrap()),
    ] {
        let cs = adapted_cone(&c, &z).map_err(|e| e.to_string())?;
        let r = geodesic_tangency_check(&cs);
        ensure(r.pass, format!("{name}: {} failures", r.failures))?;
    }
    Ok("flat, rescaled, twisted".into())
}

fn c5() -> Outcome {
    let z = quartic();
    let cfg = XiConfig::default();
    ensure(cfg.primes.iter().all(|&p| p > 1 << 30), "primes must exceed 2^30")?;
    let x = ccc_core::xi_z(&z, &cfg).map_err(|e| e.to_string())?;
    ensure(x.prime.len() == 2, "two prime runs")?;
    for s in &x.prime {
        ensure(s.dim() == 3, format!("prime dim {}", s.dim()))?;
        let f = *s.field();
        for a in 0..3 {
            let e: Vec<u64> = (0..3).map(|i| if i == a { f.one() } else { f.zero() }).collect();
            let m = s.membership(&iota(&f, &e)).map_err(|e| e.to_string())?;
            ensure(
                m.is_member() && m.relative_residual() == 0.0,
                "iota(e) not exactly in the prime subspace",
            )?;
        }
    }
    let fl = x.float.as_ref().ok_or("no float run")?;
    ensure(fl.dim() == 3, format!("float dim {}", fl.dim()))?;
    ensure(x.contains_xi_v && x.stable, "containment or stability")?;
    let bf = common::fermat_plane_curve_brute_force(4, 10_007);
    ensure(bf.kernel_dim == 3 && bf.contains_iota, format!("oracle kernel dim {}", bf.kernel_dim))?;
    Ok(format!(
        "dims prime {:?}, float {}, oracle over F_10007 ({} points) {}",
        x.prime.iter().map(|s| s.dim()).collect::<Vec<_>>(),
        fl.dim(),
        bf.points,
        bf.kernel_dim
    ))
}

fn c6() -> Outcome {
    let r = tangent_lines_nondegenerate(&quartic(), &XiConfig::default()).map_err(|e| e.to_string())?;
    ensure(r.rank == 3 && r.pass, format!("rank {}", r.rank))?;
    Ok(format!("rank {} from {} samples mod {}", r.rank, r.samples, r.prime))
}

fn c7() -> Outcome {
    let resc = models::rescaled_default(3).unwrap();
    let v = conformal_closedness_test(&resc).map_err(|e| e.to_string())?;
    let ClosednessVerdict::ConformallyClosed { .. } = v else {
        return Err(format!("rescaled: {}", v.name()));
    };
    let z = quartic();
    let xz = ccc_core::xi_z(&z, &XiConfig::default()).map_err(|e| e.to_string())?;
    let cs = adapted_cone(&resc, &z).map_err(|e| e.to_string())?;
    let cert = certify(&cs, &xz, &CertifyConfig::default());
    ensure(cert.verdict.as_deref() == Some("conformally_closed"), format!("verdict {:?}", cert.verdict))?;
    ensure(cert.residuals.closedness_exact == Some(true), "d(f omega) not exactly zero")?;
    let f = cert.factor.as_ref().and_then(|f| f.rational()).ok_or("no rational factor")?;
    let want = parse_ratfunc("1-x1", &names(3)).unwrap();
    ensure(f == &want, format!("f = {f}"))?;

    let heis = conformal_closedness_test(&models::heisenberg(3).unwrap()).map_err(|e| e.to_string())?;
    let ClosednessVerdict::NotConformallyClosed { residual, .. } = heis else {
        return Err(format!("heisenberg: {}", heis.name()));
    };
    ensure(residual > 0.0, "zero residual")?;
    Ok(format!("f = 1-x1; heisenberg residual {residual:.3e}"))
}

fn c8() -> Outcome {
    let z = quartic();
    let cs = adapted_cone(&models::rescaled_default(3).unwrap(), &z).map_err(|e| e.to_string())?;
    let r = double_bracket_check(&cs, BracketMode::Rational, 50, 8, 0, 0.0).map_err(|e| e.to_string())?;
    ensure(r.pass && r.samples == 50 && r.max_residual == 0.0, format!("exact: {} failures", r.failures))?;

    let c = models::random_polynomial(3, 2, 88).unwrap();
    let cs = adapted_cone(&c, &z).map_err(|e| e.to_string())?;
    let f = double_bracket_check(&cs, BracketMode::Float, 50, 8, 0, 1e-8).map_err(|e| e.to_string())?;
    ensure(f.pass && f.max_residual < 1e-8, format!("float max relative error {:.3e}", f.max_residual))?;
    Ok(format!("exact at {} samples; float max relative error {:.3e}", r.samples, f.max_residual))
}

fn run_cert(c: &Coframe, z: &Hypersurface, xz: &ccc_core::XiZ) -> ccc_core::FlattenCertificate {
    certify(&adapted_cone(c, z).unwrap(), xz, &CertifyConfig::default())
}

fn c9() -> Outcome {
    let z = quartic();
    let xz = ccc_core::xi_z(&z, &XiConfig::default()).map_err(|e| e.to_string())?;

    let flat = run_cert(&models::flat(Chart::standard(3).unwrap()).unwrap(), &z, &xz);
    ensure(flat.status == Status::Flat, format!("flat: {:?}", flat.status))?;
    ensure(flat.zeta.components == ["x1", "x2", "x3"], format!("flat zeta {:?}", flat.zeta.components))?;

    let resc = run_cert(&models::rescaled_default(3).unwrap(), &z, &xz);
    ensure(resc.status == Status::ConformallyFlat, format!("rescaled: {:?} {:?}", resc.status, resc.error))?;
    ensure(resc.residuals.validation_samples >= 100, "fewer than 100 validation samples")?;
    let dev = resc.residuals.cone_product_deviation;
    ensure(dev < 1e-9, format!("deviation {dev:.3e}"))?;

    let tw = run_cert(&models::twisted_default(3).unwrap(), &z, &xz);
    ensure(
        tw.status == Status::Rejected && tw.stage == Stage::CharacteristicCheck,
        format!("twisted: {:?} at {:?}", tw.status, tw.stage),
    )?;
    let res = tw.witness.as_ref().and_then(|w| w.residual).ok_or("no witness residual")?;
    ensure(res > 10.0 * xz.tol, format!("twisted residual {res:.3e}"))?;
    Ok(format!("rescaled deviation {dev:.3e}; twisted residual {res:.3e}"))
}

fn c10() -> Outcome {
    let z = quartic();
    let xz = ccc_core::xi_z(&z, &XiConfig::default()).map_err(|e| e.to_string())?;
    for seed in 0..10 {
        let rt = models::round_trip(3, seed).unwrap();
        let cert = run_cert(&rt.coframe, &z, &xz);
        ensure(cert.status == Status::ConformallyFlat, format!("seed {seed}: {:?}", cert.status))?;
        let f = cert.factor.as_ref().and_then(|f| f.rational()).ok_or(format!("seed {seed}: no rational f"))?;
        ensure(equal_up_to_constant(&rt.f, f), format!("seed {seed}: {f} vs {}", rt.f))?;
    }
    Ok("10 seeds".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 10] = [
        ("dim Xi_V = n for n = 3..6", 1, c1),
        ("iota identity on 50 random pairs", 30, c2),
        ("identity suite on 25 random coframes", 300, c3),
        ("geodesic tangency on three models", 60, c4),
        ("Fermat quartic Xi_Z = Xi_V", 60, c5),
        ("tangent-line span rank", 30, c6),
        ("conformal closedness verdicts", 60, c7),
        ("double bracket identity", 120, c8),
        ("flat / conformally flat / rejected", 300, c9),
        ("round trip recovers f", 120, c10),
    ];
    let mut failed = 0;
    for (i, (name, bound, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let over = took > Duration::from_secs(bound);
        let pass = out.is_ok() && !over;
        if !pass {
            failed += 1;
        }
        let detail = match &out {
            Ok(s) if over => format!("{s}; exceeded {bound} s"),
            Ok(s) => s.clone(),
            Err(e) => e.clone(),
        };
        println!(
            "{} criterion {:>2}: {name} [{:.2}s / {bound}s] {detail}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            took.as_secs_f64()
        );
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
