//! Reference coframes: the flat model, conformal rescalings, twists, the
//! Heisenberg coframe, and seeded random families.

use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coframe::{small_rational, Chart, Coframe};
use crate::error::{Error, Result};
use crate::funcfield::{parse_ratfunc, BigInt, BigRational, Monomial, MultiPoly, RatFunc, Rationals};

fn identity(n: usize) -> Vec<Vec<RatFunc>> {
    (0..n)
        .map(|k| {
            (0..n)
                .map(|j| if j == k { RatFunc::one(n) } else { RatFunc::zero(n) })
                .collect()
        })
        .collect()
}

/// `ω = dx`.
pub fn flat(chart: Chart) -> Result<Coframe> {
    let n = chart.n();
    Coframe::new(chart, identity(n))
}

/// `ω = s·dx`; `s` must be finite and nonzero at the base point.
pub fn rescaled(chart: Chart, s: &RatFunc) -> Result<Coframe> {
    let n = chart.n();
    if s.nvars() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: s.nvars(),
        });
    }
    match s.evaluate(chart.base_point(), &Rationals) {
        Ok(v) if !v.is_zero() => {}
        _ => {
            return Err(Error::InvalidInput(
                "the scale factor vanishes or has a pole at the base point".into(),
            ))
        }
    }
    let a = identity(n)
        .into_iter()
        .map(|row| row.iter().map(|e| e * s).collect())
        .collect();
    Coframe::new(chart, a)
}

/// `ω = (1/(1 - x1))·dx`.
pub fn rescaled_default(n: usize) -> Result<Coframe> {
    let chart = Chart::standard(n)?;
    let s = parse_ratfunc("1/(1-x1)", chart.variables())?;
    rescaled(chart, &s)
}

/// `ω = A(x)·dx` for a given matrix of rational functions.
pub fn twisted(chart: Chart, a: Vec<Vec<RatFunc>>) -> Result<Coframe> {
    Coframe::new(chart, a)
}

/// `A = I + x1·E_{23}`: `ω^2 = dx2 + x1 dx3`.
pub fn twisted_default(n: usize) -> Result<Coframe> {
    let chart = Chart::standard(n)?;
    let mut a = identity(n);
    a[1][2] = RatFunc::var(n, 0);
    Coframe::new(chart, a)
}

/// `ω^3 = dx3 - x1 dx2`, other components `dx_k`: `dω^3 = -ω^1∧ω^2`.
pub fn heisenberg(n: usize) -> Result<Coframe> {
    let chart = Chart::standard(n)?;
    let mut a = identity(n);
    a[2][1] = -RatFunc::var(n, 0);
    Coframe::new(chart, a)
}

fn rand_poly<R: Rng>(rng: &mut R, n: usize, deg: u32, density: f64) -> MultiPoly {
    let mut terms = Vec::new();
    for m in monomials(n, deg) {
        if rng.gen_bool(density) {
            terms.push((m, small_rational(rng)));
        }
    }
    MultiPoly::from_terms(n, terms)
}

fn monomials(n: usize, deg: u32) -> Vec<Monomial> {
    let mut out = vec![vec![0u16; n]];
    let mut frontier = out.clone();
    for _ in 0..deg {
        let mut next = Vec::new();
        for m in &frontier {
            let last = m.iter().rposition(|&e| e > 0).unwrap_or(0);
            for v in last..n {
                let mut m2 = m.clone();
                m2[v] += 1;
                next.push(m2);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// `A = I + P(x)` with polynomial entries of degree at most `deg`
/// vanishing at the origin, so `A(0) = I`.
pub fn random_polynomial(n: usize, deg: u32, seed: u64) -> Result<Coframe> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chart = Chart::standard(n)?;
    let zero = vec![0u16; n];
    let a: Vec<Vec<RatFunc>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|j| {
                    let p = rand_poly(&mut rng, n, deg, 0.3);
                    let c = p.coeff(&zero);
                    let mut p = &p - &MultiPoly::constant(n, c);
                    if j == k {
                        p = &p + &MultiPoly::one(n);
                    }
                    RatFunc::from_poly(p)
                })
                .collect()
        })
        .collect();
    Coframe::new(chart, a)
}

/// A seeded instance `ω = (1/f)·dζ` with `f` a product of powers of
/// affine and quadratic factors, each equal to 1 at the origin and
/// nonvanishing on the unit box, and `ζ` affine.
#[derive(Clone, Debug)]
pub struct RoundTrip {
    pub f: RatFunc,
    pub zeta_matrix: Vec<Vec<BigRational>>,
    pub zeta_offset: Vec<BigRational>,
    pub coframe: Coframe,
}

fn rand_int<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(rng.gen_range(lo..=hi)))
}

pub fn round_trip(n: usize, seed: u64) -> Result<RoundTrip> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chart = Chart::standard(n)?;
    let mut f = RatFunc::one(n);
    let nfactors = rng.gen_range(1..=3);
    for i in 0..nfactors {
        let mut p = MultiPoly::one(n);
        if i == 2 {
            // 1 + Σ c_j x_j^2 with c_j > 0: never vanishes on real points.
            for v in 0..n {
                let mut m = vec![0u16; n];
                m[v] = 2;
                p = &p + &MultiPoly::monomial(m, rand_int(&mut rng, 1, 3));
            }
        } else {
            let mut touched = false;
            for v in 0..n {
                let c = rand_int(&mut rng, -3, 3);
                touched |= !c.is_zero();
                p = &p + &MultiPoly::var(n, v).scale(&(c / BigRational::from_integer((4 * n as i64).into())));
            }
            if !touched {
                p = &p + &MultiPoly::var(n, 0);
            }
        }
        let mut e: i64 = rng.gen_range(-2..=2);
        if e == 0 {
            e = 1;
        }
        let pr = RatFunc::from_poly(p);
        let pe = pr.pow(e.unsigned_abs() as u32);
        f = if e > 0 { &f * &pe } else { &f / &pe };
    }
    let zeta_matrix = loop {
        let m: Vec<Vec<BigRational>> = (0..n)
            .map(|_| (0..n).map(|_| rand_int(&mut rng, -3, 3)).collect())
            .collect();
        if crate::linalg::invert(&Rationals, &m).is_some() {
            break m;
        }
    };
    let zeta_offset: Vec<BigRational> = (0..n).map(|_| small_rational(&mut rng)).collect();
    let inv = f.recip()?;
    let a = zeta_matrix
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| if c.is_zero() { RatFunc::zero(n) } else { inv.scale(c) })
                .collect()
        })
        .collect();
    let coframe = Coframe::new(chart, a)?;
    Ok(RoundTrip {
        f,
        zeta_matrix,
        zeta_offset,
        coframe,
    })
}

/// A constant invertible matrix with small integer entries.
pub fn random_constant(n: usize, seed: u64) -> Result<Coframe> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let m: Vec<Vec<BigRational>> = (0..n)
            .map(|_| (0..n).map(|_| rand_int(&mut rng, -3, 3)).collect())
            .collect();
        if crate::linalg::invert(&Rationals, &m).is_some() {
            let a = m
                .iter()
                .map(|row| row.iter().map(|c| RatFunc::constant(n, c.clone())).collect())
                .collect();
            return Coframe::new(Chart::standard(n)?, a);
        }
    }
}
