//! Dynamical checks on a cone structure: the geodesic flow preserves the
//! cone, the projected double bracket `[[ṽ, γ], γ]` reproduces the
//! structure function, and `σ^ω` takes values in `Ξ_Z`.
//!
//! Fiber-tangent fields are `ṽ = g♯D_λ` with `g = ḡ∘μ`, where
//! `ḡ_{ij} = (∂_j f) e_i - (∂_i f) e_j` is tangent to every level set of
//! `f`. Then `D_θ g = 0`, and at a smooth point of `Ẑ` the values of the
//! `ḡ_{ij}` span `ker ∇f`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sample::{sample_cone_float, sample_cone_modp, stream_rng};
use super::jet::point_brackets;
use super::ConeStructure;
use crate::coframe::{small_rational, IdentityReport, VectorField};
use crate::error::{Error, Result};
use crate::funcfield::{compose, BigRational, ComplexDd, ComplexDoubleDouble, PrimeField, RatFunc, Rationals, Scalars};
use crate::xi::{HomTensor, XiZ};

/// `γ(f∘μ)` must be the zero rational function.
pub fn geodesic_tangency_check(cs: &ConeStructure) -> IdentityReport {
    let gamma = cs.geodesic_flow();
    let r = gamma.apply(cs.cone_equation());
    IdentityReport::symbolic(
        "geodesic_tangency",
        [&r],
        cs.induced().tangent_chart().chart().base_point(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BracketMode {
    /// Exact, at rational points of the tangent chart.
    Rational,
    /// Exact, at points of the cone over a prime field.
    Prime,
    /// Double precision, at complex points of the cone.
    Float,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BracketSample {
    pub point: Vec<String>,
    /// The pair `(i, j)` of the field `ḡ_{ij}`.
    pub field: (usize, usize),
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BracketReport {
    pub mode: BracketMode,
    pub samples: usize,
    pub checked: usize,
    pub failures: usize,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub entries: Vec<BracketSample>,
}

/// The symbolic fields `g_{ij}` and `[[ṽ_{ij}, γ], γ]` on the tangent chart.
pub struct DoubleBrackets {
    pub pairs: Vec<(usize, usize)>,
    pub g: Vec<Vec<RatFunc>>,
    pub w: Vec<VectorField>,
}

pub fn double_brackets(cs: &ConeStructure) -> DoubleBrackets {
    let n = cs.coframe().n();
    let frame = cs.tangent_frame();
    let gamma = cs.induced().geodesic_flow(&frame);
    let mu = cs.induced().mu();
    let gf: Vec<RatFunc> = cs.hypersurface().gradient().iter().map(|g| compose(g, mu)).collect();
    let lambda_fields = frame.d_lambda.fields();
    let mut out = DoubleBrackets {
        pairs: Vec::new(),
        g: Vec::new(),
        w: Vec::new(),
    };
    for i in 0..n {
        for j in i + 1..n {
            let mut g = vec![RatFunc::zero(2 * n); n];
            g[i] = gf[j].clone();
            g[j] = -&gf[i];
            let vt = VectorField::combination(&g, &lambda_fields);
            let w = vt.bracket(&gamma).bracket(&gamma);
            out.pairs.push((i, j));
            out.g.push(g);
            out.w.push(w);
        }
    }
    out
}

/// Both sides at one point for every pair: `ω_x(dπ W)` and
/// `σ^ω_x(u, v)` with `u = μ`, `v = g`.
fn sides<F: Scalars>(cs: &ConeStructure, pt: &[F::Elem], field: &F) -> Result<Vec<(Vec<F::Elem>, Vec<F::Elem>)>> {
    let n = cs.coframe().n();
    let pb = point_brackets(cs, pt, field)?;
    let sigma = HomTensor::from_coords(n, cs.coframe().structure_at(&pt[..n], field)?)?;
    Ok(pb
        .w
        .iter()
        .zip(&pb.g)
        .map(|(w, g)| {
            let lhs = pb
                .a
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&w[..n])
                        .fold(field.zero(), |acc, (p, q)| field.add(&acc, &field.mul(p, q)))
                })
                .collect();
            (lhs, sigma.apply(field, &pb.mu, g))
        })
        .collect())
}

fn show<T: std::fmt::Display>(v: &[T]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

/// Checks `ω(dπ [[ṽ, γ], γ]) = σ^ω(u, v)` at `count` samples.
/// `tol` applies to the relative residual in float mode only.
pub fn double_bracket_check(
    cs: &ConeStructure,
    mode: BracketMode,
    count: usize,
    seed: u64,
    prime: u64,
    tol: f64,
) -> Result<BracketReport> {
    let n = cs.coframe().n();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut entries = Vec::new();
    let mut failures = 0;
    let mut max_residual: f64 = 0.0;
    match mode {
        BracketMode::Rational => {
            let xs = cs.coframe().sample_points(count, seed)?;
            for (s, x) in xs.into_iter().enumerate() {
                let mut rng = stream_rng(seed ^ 0xb0b, s as u64);
                let mut pt = x;
                pt.extend((0..n).map(|_| small_rational(&mut rng)));
                for (k, (lhs, rhs)) in sides(cs, &pt, &Rationals)?.into_iter().enumerate() {
                    let diff: f64 = lhs
                        .iter()
                        .zip(&rhs)
                        .map(|(a, b)| crate::funcfield::rational_to_f64(&(a - b)).abs())
                        .fold(0.0, f64::max);
                    if lhs != rhs {
                        failures += 1;
                        max_residual = max_residual.max(diff.max(f64::MIN_POSITIVE));
                    }
                    entries.push(BracketSample {
                        point: show(&pt),
                        field: pairs[k],
                        lhs: show(&lhs),
                        rhs: show(&rhs),
                        residual: diff,
                    });
                }
            }
        }
        BracketMode::Prime => {
            let field = PrimeField::new(prime)?;
            for cp in sample_cone_modp(cs, count, seed, prime)? {
                let pt: Vec<u64> = cp.x.iter().chain(&cp.y).copied().collect();
                for (k, (lhs, rhs)) in sides(cs, &pt, &field)?.into_iter().enumerate() {
                    let bad = lhs != rhs;
                    if bad {
                        failures += 1;
                        max_residual = 1.0;
                    }
                    entries.push(BracketSample {
                        point: show(&pt),
                        field: pairs[k],
                        lhs: show(&lhs),
                        rhs: show(&rhs),
                        residual: f64::from(u8::from(bad)),
                    });
                }
            }
        }
        BracketMode::Float => {
            let g = ComplexDoubleDouble;
            for cp in sample_cone_float(cs, count, seed)? {
                let mut u: Vec<ComplexDd> = cp.u.iter().map(|z| g.from_complex(*z)).collect();
                polish_dd(cs, &mut u)?;
                let x = cp.x.iter().map(|v| g.from_rational(v)).collect::<Result<Vec<_>>>()?;
                let a = cs.coframe().matrix_at(&x, &g)?;
                let b = crate::linalg::invert(&g, &a).ok_or(Error::Pole)?;
                let mut pt = x;
                pt.extend(b.iter().map(|row| {
                    row.iter()
                        .zip(&u)
                        .fold(g.zero(), |acc, (p, q)| g.add(&acc, &g.mul(p, q)))
                }));
                let shown: Vec<Complex64> = pt.iter().map(|z| g.to_complex(z)).collect();
                for (k, (lhs, rhs)) in sides(cs, &pt, &g)?.into_iter().enumerate() {
                    let diff: Vec<Complex64> = lhs.iter().zip(&rhs).map(|(p, q)| g.to_complex(&(p - q))).collect();
                    let lhs: Vec<Complex64> = lhs.iter().map(|z| g.to_complex(z)).collect();
                    let rhs: Vec<Complex64> = rhs.iter().map(|z| g.to_complex(z)).collect();
                    let r = relative(&lhs, &rhs, &diff);
                    if r >= tol {
                        failures += 1;
                    }
                    max_residual = max_residual.max(r);
                    entries.push(BracketSample {
                        point: show(&shown),
                        field: pairs[k],
                        lhs: show(&lhs),
                        rhs: show(&rhs),
                        residual: r,
                    });
                }
            }
        }
    }
    Ok(BracketReport {
        mode,
        samples: count,
        checked: entries.len(),
        failures,
        max_residual,
        tol,
        pass: failures == 0,
        entries,
    })
}

/// `‖d‖ / max(‖a‖, ‖b‖)` with `d = a - b`, or `‖d‖` when both sides are
/// below `1e-12`.
fn relative(a: &[Complex64], b: &[Complex64], d: &[Complex64]) -> f64 {
    let norm = |v: &[Complex64]| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let scale = norm(a).max(norm(b));
    if scale < 1e-12 {
        norm(d)
    } else {
        norm(d) / scale
    }
}

/// Two Newton steps on `f(u) = 0` in double-double precision, so the
/// point lies on `Ẑ` well below the float tolerance.
fn polish_dd(cs: &ConeStructure, u: &mut [ComplexDd]) -> Result<()> {
    let g = ComplexDoubleDouble;
    let z = cs.hypersurface();
    for _ in 0..2 {
        let f = z.f().evaluate(u, &g)?;
        let grad = z.gradient().iter().map(|p| p.evaluate(u, &g)).collect::<Result<Vec<_>>>()?;
        let gg = grad.iter().fold(g.zero(), |acc, x| g.add(&acc, &g.mul(x, &x.conj())));
        let Some(inv) = g.inv(&gg) else {
            return Ok(());
        };
        let step = g.mul(&f, &inv);
        for (x, gi) in u.iter_mut().zip(&grad) {
            *x = g.sub(x, &g.mul(&step, &gi.conj()));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharacteristicWitness {
    pub point: Vec<String>,
    pub sigma: Vec<String>,
    /// Relative least-squares residual against the float `Ξ_Z`, when computed.
    pub residual: Option<f64>,
    /// Primes whose `Ξ_Z` does not contain `σ^ω(x)`.
    pub prime_nonmember: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharacteristicReport {
    pub samples: usize,
    pub members: usize,
    pub pass: bool,
    pub tol: f64,
    pub witness: Option<CharacteristicWitness>,
    /// Recorded, not computed: uniqueness of the conic connection.
    pub assumption: String,
}

/// Tests `σ^ω(x) ∈ Ξ_Z` at `count` rational sample points.
pub fn characteristic_check(cs: &ConeStructure, xiz: &XiZ, count: usize, seed: u64) -> Result<CharacteristicReport> {
    let n = cs.coframe().n();
    let mut members = 0;
    let mut witness = None;
    for x in cs.coframe().sample_points(count, seed)? {
        let sigma = HomTensor::from_coords(n, cs.coframe().structure_at(&x, &Rationals)?)?;
        let mut prime_nonmember = Vec::new();
        for space in &xiz.prime {
            if !space.membership_rational(&sigma)?.is_member() {
                prime_nonmember.push(space.field().modulus());
            }
        }
        let mut residual = None;
        let mut float_ok = true;
        if let Some(space) = &xiz.float {
            let m = space.membership(&sigma.to_f64())?;
            float_ok = m.is_member();
            residual = Some(m.relative_residual());
        }
        if prime_nonmember.is_empty() && float_ok {
            members += 1;
        } else if witness.is_none() {
            witness = Some(CharacteristicWitness {
                point: show(&x),
                sigma: show(sigma.coords()),
                residual,
                prime_nonmember,
            });
        }
    }
    Ok(CharacteristicReport {
        samples: count,
        members,
        pass: witness.is_none(),
        tol: xiz.tol,
        witness,
        assumption: "the conic connection is unique (cohomological hypothesis, not computed)".into(),
    })
}

/// Random rational tangent-chart point over an admissible base point.
pub fn random_tangent_point<R: Rng>(x: Vec<BigRational>, rng: &mut R) -> Vec<BigRational> {
    let n = x.len();
    let mut pt = x;
    pt.extend((0..n).map(|_| small_rational(rng)));
    pt
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coframe::{Chart, Coframe};
    use crate::cone::{adapted_cone, Hypersurface};

    fn cs(rows: [[&str; 3]; 3]) -> ConeStructure {
        let c = Coframe::from_strings(Chart::standard(3).unwrap(), &rows.map(|r| r.to_vec())).unwrap();
        adapted_cone(&c, &Hypersurface::fermat(3, 4).unwrap()).unwrap()
    }

    /// Both sides at one point from the symbolic brackets.
    fn symbolic_sides<F: Scalars>(
        cs: &ConeStructure,
        db: &DoubleBrackets,
        k: usize,
        pt: &[F::Elem],
        field: &F,
    ) -> Result<(Vec<F::Elem>, Vec<F::Elem>)> {
        let n = cs.coframe().n();
        let x = &pt[..n];
        let a = cs.coframe().matrix_at(x, field)?;
        let w = db.w[k].evaluate(pt, field)?;
        let lhs: Vec<F::Elem> = a
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&w[..n])
                    .fold(field.zero(), |acc, (p, q)| field.add(&acc, &field.mul(p, q)))
            })
            .collect();
        let sigma = HomTensor::from_coords(n, cs.coframe().structure_at(x, field)?)?;
        let u = cs
            .induced()
            .mu()
            .iter()
            .map(|m| m.evaluate(pt, field))
            .collect::<Result<Vec<_>>>()?;
        let v = db.g[k]
            .iter()
            .map(|c| c.evaluate(pt, field))
            .collect::<Result<Vec<_>>>()?;
        Ok((lhs, sigma.apply(field, &u, &v)))
    }

    const FLAT: [[&str; 3]; 3] = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]];
    const S: &str = "1/(1-x1)";
    const RESCALED: [[&str; 3]; 3] = [[S, "0", "0"], ["0", S, "0"], ["0", "0", S]];
    const TWISTED: [[&str; 3]; 3] = [["1", "0", "0"], ["0", "1", "x1"], ["0", "0", "1"]];

    #[test]
    fn geodesic_flow_preserves_the_cone() {
        for rows in [FLAT, RESCALED, TWISTED] {
            assert!(geodesic_tangency_check(&cs(rows)).pass);
        }
    }

    #[test]
    fn double_bracket_flat_and_rescaled() {
        let flat = double_bracket_check(&cs(FLAT), BracketMode::Rational, 5, 1, 0, 0.0).unwrap();
        assert!(flat.pass);
        assert!(flat.entries.iter().all(|e| e.rhs.iter().all(|s| s == "0")));
        let r = double_bracket_check(&cs(RESCALED), BracketMode::Rational, 10, 2, 0, 0.0).unwrap();
        assert!(r.pass, "{:?}", r.entries.first());
        assert!(r.entries.iter().any(|e| e.rhs.iter().any(|s| s != "0")));
        let p = double_bracket_check(&cs(TWISTED), BracketMode::Prime, 10, 3, 2_147_483_647, 0.0).unwrap();
        assert!(p.pass);
        let f = double_bracket_check(&cs(TWISTED), BracketMode::Float, 10, 3, 0, 1e-8).unwrap();
        assert!(f.pass, "{}", f.max_residual);
    }

    #[test]
    fn jets_agree_with_symbolic_brackets() {
        let models = [
            cs(TWISTED),
            cs(RESCALED),
            adapted_cone(&crate::models::random_polynomial(3, 1, 88).unwrap(), &Hypersurface::fermat(3, 4).unwrap())
                .unwrap(),
        ];
        for c in &models {
            let db = double_brackets(c);
            let mut rng = stream_rng(7, 0);
            for x in c.coframe().sample_points(3, 5).unwrap() {
                let mut pt = x;
                pt.extend((0..3).map(|_| small_rational(&mut rng)));
                let jet = sides(c, &pt, &Rationals).unwrap();
                for (k, got) in jet.iter().enumerate() {
                    assert_eq!(got, &symbolic_sides(c, &db, k, &pt, &Rationals).unwrap());
                }
            }
        }
    }
}
