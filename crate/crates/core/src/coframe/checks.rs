//! Exact verification of the coframe identities.
//!
//! Symbolic checks build the residual of an identity as rational functions
//! and count the entries that fail to vanish. Sampled checks evaluate the
//! two sides at points, exactly over the rationals or in double precision.

use num_traits::Zero;
use serde::Serialize;

use super::tangent::InducedCoframe;
use super::vector_field::VectorField;
use super::Coframe;
use crate::error::{Error, Result};
use crate::funcfield::{rational_to_f64, BigRational, RatFunc, Rationals, Reals};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Exact,
    Float,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub mode: CheckMode,
    /// Sample points used; 0 for a symbolic identity.
    pub samples: usize,
    /// Residual entries (symbolic) or sample points (sampled) that failed.
    pub failures: usize,
    pub max_residual: f64,
    pub pass: bool,
}

impl IdentityReport {
    /// Symbolic identity: every residual must be the zero rational function.
    /// `max_residual` is the largest residual magnitude at `probe`.
    pub fn symbolic<'a>(
        name: &str,
        residuals: impl IntoIterator<Item = &'a RatFunc>,
        probe: &[BigRational],
    ) -> Self {
        let mut failures = 0;
        let mut max_residual: f64 = 0.0;
        for r in residuals {
            if r.is_zero() {
                continue;
            }
            failures += 1;
            let m = r
                .evaluate(probe, &Rationals)
                .map(|v| rational_to_f64(&v).abs())
                .unwrap_or(f64::INFINITY);
            max_residual = max_residual.max(if m == 0.0 { f64::MIN_POSITIVE } else { m });
        }
        Self {
            name: name.to_string(),
            mode: CheckMode::Exact,
            samples: 0,
            failures,
            max_residual,
            pass: failures == 0,
        }
    }

    pub fn combine(name: &str, parts: &[IdentityReport]) -> Self {
        Self {
            name: name.to_string(),
            mode: if parts.iter().all(|p| p.mode == CheckMode::Exact) {
                CheckMode::Exact
            } else {
                CheckMode::Float
            },
            samples: parts.iter().map(|p| p.samples).max().unwrap_or(0),
            failures: parts.iter().map(|p| p.failures).sum(),
            max_residual: parts.iter().map(|p| p.max_residual).fold(0.0, f64::max),
            pass: parts.iter().all(|p| p.pass),
        }
    }
}

/// `d(dω) = 0`.
pub fn dd_zero(omega: &Coframe) -> IdentityReport {
    let dd = omega.exterior_derivative().exterior_derivative();
    IdentityReport::symbolic("d(d omega) = 0", dd.iter().flatten(), omega.chart().base_point())
}

/// `dω = σ♯(ω ∧ ω)`: rebuilding `dω` from the structure function.
pub fn reconstruction(omega: &Coframe) -> IdentityReport {
    let w = omega.exterior_derivative();
    let back = omega.structure_function().reconstruct(omega);
    let res: Vec<RatFunc> = w
        .components()
        .iter()
        .flatten()
        .zip(back.components().iter().flatten())
        .map(|(a, b)| a - b)
        .collect();
    IdentityReport::symbolic("d omega = sigma(omega ^ omega)", &res, omega.chart().base_point())
}

/// `df = Σ_a (D_a f) ω^a` for a function `f` on the chart.
pub fn d_lemma(omega: &Coframe, f: &RatFunc) -> IdentityReport {
    let n = omega.n();
    let dfr = omega.dual_frame();
    let daf: Vec<RatFunc> = (0..n).map(|a| dfr.field(a).apply(f)).collect();
    let res: Vec<RatFunc> = (0..n)
        .map(|j| {
            let mut acc = f.partial(j);
            for (a, d) in daf.iter().enumerate() {
                acc = &acc - &(d * omega.entry(a, j));
            }
            acc
        })
        .collect();
    IdentityReport::symbolic("df = (D f) omega", &res, omega.chart().base_point())
}

/// Residual fields `[D_a, D_b] - Σ_k δ^k_{ab} D_k` for `a > b`.
fn bracket_residuals(omega: &Coframe) -> Vec<VectorField> {
    let n = omega.n();
    let d = omega.dual_frame().fields();
    let s = omega.structure_function();
    super::pairs(n)
        .into_iter()
        .map(|(a, b)| {
            let coeffs: Vec<RatFunc> = (0..n).map(|k| s.delta(k, a, b)).collect();
            d[a].bracket(&d[b]).sub(&VectorField::combination(&coeffs, &d))
        })
        .collect()
}

/// `[D_ω, D_ω] = δ^ω♯ D_ω`, with `δ = -c`, checked at the sample points:
/// exactly over the rationals or to relative `tol` in double precision.
pub fn frame_bracket_check(
    omega: &Coframe,
    samples: &[Vec<BigRational>],
    mode: CheckMode,
    tol: f64,
) -> Result<IdentityReport> {
    let mut failures = 0;
    let mut max_residual: f64 = 0.0;
    match mode {
        CheckMode::Exact => {
            let res = bracket_residuals(omega);
            for p in samples {
                let mut bad = false;
                for r in &res {
                    for v in r.evaluate(p, &Rationals)? {
                        if !v.is_zero() {
                            bad = true;
                            max_residual = max_residual.max(rational_to_f64(&v).abs());
                        }
                    }
                }
                failures += bad as usize;
            }
        }
        CheckMode::Float => {
            let n = omega.n();
            let d = omega.dual_frame().fields();
            let s = omega.structure_function();
            let reals = Reals::default();
            for p in samples {
                let pf: Vec<f64> = p.iter().map(rational_to_f64).collect();
                let fields: Vec<Vec<f64>> =
                    d.iter().map(|f| f.evaluate(&pf, &reals)).collect::<Result<_>>()?;
                let mut worst: f64 = 0.0;
                for (a, b) in super::pairs(n) {
                    let lhs = d[a].bracket(&d[b]).evaluate(&pf, &reals)?;
                    let mut rhs = vec![0.0; n];
                    for (k, fk) in fields.iter().enumerate() {
                        let c = s.delta(k, a, b);
                        if c.is_zero() {
                            continue;
                        }
                        let cv = c.evaluate(&pf, &reals)?;
                        for (r, x) in rhs.iter_mut().zip(fk) {
                            *r += cv * x;
                        }
                    }
                    let scale = lhs.iter().chain(&rhs).fold(1.0_f64, |m, x| m.max(x.abs()));
                    for (l, r) in lhs.iter().zip(&rhs) {
                        worst = worst.max((l - r).abs() / scale);
                    }
                }
                max_residual = max_residual.max(worst);
                failures += (worst > tol) as usize;
            }
        }
    }
    Ok(IdentityReport {
        name: "[D, D] = delta(D)".into(),
        mode,
        samples: samples.len(),
        failures,
        max_residual,
        pass: failures == 0,
    })
}

/// Contraction of a 1-form row with a vector field.
fn contract(form: &[RatFunc], v: &VectorField) -> RatFunc {
    let mut acc = RatFunc::zero(v.nvars());
    for (f, x) in form.iter().zip(v.components()) {
        if !f.is_zero() && !x.is_zero() {
            acc = &acc + &(f * x);
        }
    }
    acc
}

fn kronecker(nv: usize, a: usize, b: usize) -> RatFunc {
    if a == b {
        RatFunc::one(nv)
    } else {
        RatFunc::zero(nv)
    }
}

/// The six dual relations `D_θ⌋θ = D_λ⌋λ = D_λμ = Id`,
/// `D_θμ = D_θ⌋λ = D_λ⌋θ = 0`, and `dπ(D_θ) = D_ω`.
pub fn dual_relations(omega: &Coframe) -> Result<IdentityReport> {
    let om = InducedCoframe::new(omega)?;
    let fr = om.dual_frame(omega);
    let n = omega.n();
    let nv = 2 * n;
    let dt = fr.d_theta.fields();
    let dl = fr.d_lambda.fields();
    let mut res = Vec::new();
    for k in 0..n {
        for a in 0..n {
            let id = kronecker(nv, k, a);
            res.push(&contract(&om.theta()[k], &dt[a]) - &id);
            res.push(&contract(&om.lambda()[k], &dl[a]) - &id);
            res.push(&dl[a].apply(&om.mu()[k]) - &id);
            res.push(dt[a].apply(&om.mu()[k]));
            res.push(contract(&om.lambda()[k], &dt[a]));
            res.push(contract(&om.theta()[k], &dl[a]));
        }
    }
    let dw = omega.dual_frame();
    for a in 0..n {
        for j in 0..n {
            res.push(&dt[a].components()[j] - &om.tangent_chart().lift(&dw.matrix()[j][a]));
        }
    }
    Ok(IdentityReport::symbolic(
        "dual relations",
        &res,
        om.tangent_chart().chart().base_point(),
    ))
}

/// `[D_θ, D_λ] = [D_λ, D_λ] = 0` and `[D_θ, D_θ] = (π*δ)♯ D_θ`.
pub fn tangent_brackets(omega: &Coframe) -> Result<IdentityReport> {
    let om = InducedCoframe::new(omega)?;
    let fr = om.dual_frame(omega);
    let n = omega.n();
    let dt = fr.d_theta.fields();
    let dl = fr.d_lambda.fields();
    let s = omega.structure_function();
    let mut res = Vec::new();
    for a in 0..n {
        for b in 0..n {
            res.extend_from_slice(dt[a].bracket(&dl[b]).components());
            if a > b {
                res.extend_from_slice(dl[a].bracket(&dl[b]).components());
                let coeffs: Vec<RatFunc> = (0..n)
                    .map(|k| om.tangent_chart().lift(&s.delta(k, a, b)))
                    .collect();
                let r = dt[a].bracket(&dt[b]).sub(&VectorField::combination(&coeffs, &dt));
                res.extend_from_slice(r.components());
            }
        }
    }
    Ok(IdentityReport::symbolic(
        "tangent frame brackets",
        &res,
        om.tangent_chart().chart().base_point(),
    ))
}

/// `[D_λ, γ] = D_θ` and `dπ(γ) = y`.
pub fn geodesic_identities(omega: &Coframe) -> Result<IdentityReport> {
    let om = InducedCoframe::new(omega)?;
    let fr = om.dual_frame(omega);
    let n = omega.n();
    let g = om.geodesic_flow(&fr);
    let dt = fr.d_theta.fields();
    let dl = fr.d_lambda.fields();
    let mut res = Vec::new();
    for a in 0..n {
        res.extend_from_slice(dl[a].bracket(&g).sub(&dt[a]).components());
    }
    for j in 0..n {
        res.push(&g.components()[j] - &om.tangent_chart().y(j));
    }
    Ok(IdentityReport::symbolic(
        "geodesic flow identities",
        &res,
        om.tangent_chart().chart().base_point(),
    ))
}

/// `σ^Ω = π*σ^ω`: the structure function of `Ω` vanishes outside the
/// `θ ∧ θ → θ` block, and on that block equals the pulled-back `σ^ω`.
pub fn verify_induced_structure(omega: &Coframe) -> Result<IdentityReport> {
    let om = InducedCoframe::new(omega)?;
    let fr = om.dual_frame(omega);
    let n = omega.n();
    let nv = 2 * n;
    let m = om.combined_matrix();
    let minv = fr.combined_matrix();
    let prod = crate::linalg::ratfunc_matmul(&m, &minv);
    for (i, row) in prod.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            if *e != kronecker(nv, i, j) {
                return Err(Error::Internal(
                    "block inverse of the induced coframe is wrong".into(),
                ));
            }
        }
    }
    let big = om.structure_function(&fr);
    let small = omega.structure_function();
    let mut res = Vec::new();
    for k in 0..nv {
        for (a, b) in super::pairs(nv) {
            let c = big.get(k, a, b);
            if k < n && a < n && b < n {
                res.push(&c - &om.tangent_chart().lift(&small.get(k, a, b)));
            } else {
                res.push(c);
            }
        }
    }
    Ok(IdentityReport::symbolic(
        "sigma(Omega) = pullback of sigma(omega)",
        &res,
        om.tangent_chart().chart().base_point(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coframe::Chart;
    use crate::funcfield::parse_ratfunc;

    fn coframe(rows: [[&str; 3]; 3]) -> Coframe {
        let v = ["x1", "x2", "x3"];
        let a = rows
            .iter()
            .map(|row| row.iter().map(|s| parse_ratfunc(s, &v).unwrap()).collect())
            .collect();
        Coframe::new(Chart::standard(3).unwrap(), a).unwrap()
    }

    fn all_models() -> Vec<Coframe> {
        let s = "1/(1-x1)";
        vec![
            coframe([["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]),
            coframe([["1", "0", "0"], ["0", "1", "0"], ["0", "x1", "1"]]),
            coframe([[s, "0", "0"], ["0", s, "0"], ["0", "0", s]]),
            coframe([["1", "0", "0"], ["0", "1", "x1"], ["0", "0", "1"]]),
            coframe([["1 + x2*x3", "x1", "0"], ["0", "1", "x1^2"], ["x3", "0", "2 - x2"]]),
        ]
    }

    #[test]
    fn identities_hold_on_models() {
        for c in all_models() {
            assert!(dd_zero(&c).pass);
            assert!(reconstruction(&c).pass);
            assert!(dual_relations(&c).unwrap().pass);
            assert!(tangent_brackets(&c).unwrap().pass);
            assert!(geodesic_identities(&c).unwrap().pass);
            let r = verify_induced_structure(&c).unwrap();
            assert!(r.pass, "{r:?}");
            let pts = c.sample_points(5, 11).unwrap();
            assert!(frame_bracket_check(&c, &pts, CheckMode::Exact, 0.0).unwrap().pass);
            let fl = frame_bracket_check(&c, &pts, CheckMode::Float, 1e-8).unwrap();
            assert!(fl.pass, "{fl:?}");
        }
    }

    #[test]
    fn heisenberg_bracket_coefficient() {
        let c = coframe([["1", "0", "0"], ["0", "1", "0"], ["0", "x1", "1"]]);
        let d = c.dual_frame().fields();
        let b = d[0].bracket(&d[1]);
        let s = c.structure_function();
        assert_eq!(b, d[2].scale(&s.delta(2, 0, 1)));
        assert_eq!(s.delta(2, 0, 1), RatFunc::from_int(3, -1));
    }

    #[test]
    fn d_lemma_on_random_function() {
        let c = coframe([["1 + x2*x3", "x1", "0"], ["0", "1", "x1^2"], ["x3", "0", "2 - x2"]]);
        let f = parse_ratfunc("(x1^2 - x3)/(1 + x2^2)", &["x1", "x2", "x3"]).unwrap();
        assert!(d_lemma(&c, &f).pass);
    }

    #[test]
    fn a_wrong_identity_is_caught() {
        let f = RatFunc::from_int(3, 2);
        let r = IdentityReport::symbolic("x", [&f], &[0.into(), 0.into(), 0.into()].map(BigRational::from_integer));
        assert!(!r.pass);
        assert_eq!(r.failures, 1);
        assert_eq!(r.max_residual, 2.0);
    }
}
