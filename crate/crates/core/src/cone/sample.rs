//! Points on the cone `Ẑ` and on cone structures.
//!
//! All coordinates but one are drawn at random and the remaining one is
//! solved for by univariate root finding, over a prime field (exact) or
//! over the complex numbers (double precision). Point `i` of a run draws
//! from its own ChaCha stream, so extending a sample keeps its prefix.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ConeStructure, Hypersurface};
use crate::error::{Error, Result};
use crate::funcfield::univariate::{complex_roots, roots};
use crate::funcfield::{rational_to_f64, BigRational, Complexes, ModPoly, PrimeField, Rationals, Scalars};
use crate::linalg;

/// Attempts per point before a sample index is given up.
const ATTEMPTS: usize = 64;

pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `Ẑ` and its gradient reduced modulo a prime.
#[derive(Clone, Debug)]
pub struct ModSampler {
    field: PrimeField,
    n: usize,
    f: ModPoly,
    grad: Vec<ModPoly>,
    free: Vec<usize>,
}

impl ModSampler {
    pub fn new(z: &Hypersurface, p: u64) -> Result<Self> {
        let field = PrimeField::new(p)?;
        let f = z.f().reduce_mod_prime(p)?;
        let grad = z
            .gradient()
            .iter()
            .map(|g| g.reduce_mod_prime(p))
            .collect::<Result<Vec<_>>>()?;
        let free: Vec<usize> = (0..z.n()).filter(|&i| f.terms().any(|(m, _)| m[i] > 0)).collect();
        if free.is_empty() {
            return Err(Error::InvalidHypersurface(format!("f vanishes modulo {p}")));
        }
        Ok(Self {
            field,
            n: z.n(),
            f,
            grad,
            free,
        })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn eval(&self, u: &[u64]) -> u64 {
        self.f.evaluate(u)
    }

    pub fn gradient(&self, u: &[u64]) -> Vec<u64> {
        self.grad.iter().map(|g| g.evaluate(u)).collect()
    }

    /// One attempt: random coordinates, then a random root in the free one.
    pub fn attempt<R: Rng>(&self, rng: &mut R, require_smooth: bool) -> Option<Vec<u64>> {
        let p = self.field.modulus();
        let m = self.free[rng.gen_range(0..self.free.len())];
        let mut u: Vec<u64> = (0..self.n).map(|_| rng.gen_range(0..p)).collect();
        let deg = self.f.terms().map(|(mono, _)| mono[m] as usize).max().unwrap_or(0);
        let mut uni = vec![0u64; deg + 1];
        let fld = &self.field;
        for (mono, c) in self.f.terms() {
            let mut t = *c;
            for (i, &e) in mono.iter().enumerate() {
                if i != m && e > 0 {
                    t = fld.mul(&t, &fld.pow(u[i], e as u64));
                }
            }
            let k = mono[m] as usize;
            uni[k] = fld.add(&uni[k], &t);
        }
        if uni.iter().all(|&c| c == 0) {
            u[m] = rng.gen_range(0..p);
        } else {
            let rs = roots(fld, &uni, rng);
            if rs.is_empty() {
                return None;
            }
            u[m] = rs[rng.gen_range(0..rs.len())];
        }
        if u.iter().all(|&c| c == 0) {
            return None;
        }
        debug_assert_eq!(self.eval(&u), 0);
        if require_smooth && self.gradient(&u).iter().all(|&g| g == 0) {
            return None;
        }
        Some(u)
    }

    /// Point number `index` of the run seeded by `seed`.
    pub fn point(&self, seed: u64, index: u64, require_smooth: bool) -> Option<Vec<u64>> {
        let mut rng = stream_rng(seed, index);
        (0..ATTEMPTS).find_map(|_| self.attempt(&mut rng, require_smooth))
    }
}

/// `Ẑ` and its gradient in double-precision complex arithmetic.
#[derive(Clone, Debug)]
pub struct ComplexSampler {
    n: usize,
    terms: Vec<(Vec<u16>, f64)>,
    grad: Vec<Vec<(Vec<u16>, f64)>>,
    scale: f64,
    free: Vec<usize>,
}

fn float_terms(p: &crate::funcfield::MultiPoly) -> Vec<(Vec<u16>, f64)> {
    p.terms().map(|(m, c)| (m.to_vec(), rational_to_f64(c))).collect()
}

fn eval_terms(terms: &[(Vec<u16>, f64)], u: &[Complex64]) -> Complex64 {
    terms.iter().fold(Complex64::new(0.0, 0.0), |acc, (m, c)| {
        let mut t = Complex64::new(*c, 0.0);
        for (x, &e) in u.iter().zip(m) {
            if e > 0 {
                t *= x.powu(e as u32);
            }
        }
        acc + t
    })
}

impl ComplexSampler {
    pub fn new(z: &Hypersurface) -> Self {
        let n = z.n();
        let terms = float_terms(z.f());
        let scale = terms.iter().map(|(_, c)| c.abs()).sum();
        Self {
            n,
            free: (0..n).filter(|&i| z.f().depends_on(i)).collect(),
            grad: z.gradient().iter().map(float_terms).collect(),
            terms,
            scale,
        }
    }

    pub fn eval(&self, u: &[Complex64]) -> Complex64 {
        eval_terms(&self.terms, u)
    }

    pub fn gradient(&self, u: &[Complex64]) -> Vec<Complex64> {
        self.grad.iter().map(|g| eval_terms(g, u)).collect()
    }

    /// `|f(u)|` relative to the coefficient size, for `‖u‖ = 1`.
    pub fn relative_value(&self, u: &[Complex64]) -> f64 {
        let norm = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let d = self.terms.first().map(|(m, _)| m.iter().map(|&e| e as i32).sum()).unwrap_or(0);
        self.eval(u).norm() / (self.scale * norm.powi(d))
    }

    pub fn attempt<R: Rng>(&self, rng: &mut R) -> Option<Vec<Complex64>> {
        let m = self.free[rng.gen_range(0..self.free.len())];
        let mut u: Vec<Complex64> = (0..self.n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let deg = self.terms.iter().map(|(mono, _)| mono[m] as usize).max().unwrap_or(0);
        let mut uni = vec![Complex64::new(0.0, 0.0); deg + 1];
        for (mono, c) in &self.terms {
            let mut t = Complex64::new(*c, 0.0);
            for (i, &e) in mono.iter().enumerate() {
                if i != m && e > 0 {
                    t *= u[i].powu(e as u32);
                }
            }
            uni[mono[m] as usize] += t;
        }
        let rs = complex_roots(&uni)?;
        if rs.is_empty() {
            return None;
        }
        u[m] = rs[rng.gen_range(0..rs.len())];
        let norm = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return None;
        }
        for x in u.iter_mut() {
            *x /= norm;
        }
        self.polish(&mut u);
        if self.relative_value(&u) > 1e-12 {
            return None;
        }
        let g = self.gradient(&u);
        if g.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt() < 1e-6 * self.scale {
            return None;
        }
        Some(u)
    }

    /// One Newton step along the gradient direction.
    pub fn polish(&self, u: &mut [Complex64]) {
        let g = self.gradient(u);
        let gg: f64 = g.iter().map(|x| x.norm_sqr()).sum();
        if gg == 0.0 {
            return;
        }
        let step = self.eval(u) / gg;
        for (x, gi) in u.iter_mut().zip(&g) {
            *x -= step * gi.conj();
        }
    }

    pub fn point(&self, seed: u64, index: u64) -> Option<Vec<Complex64>> {
        let mut rng = stream_rng(seed, index);
        (0..ATTEMPTS).find_map(|_| self.attempt(&mut rng))
    }
}

/// A cone point over `F_p`: base point `x`, fiber vector `y`, `u = A(x) y ∈ Ẑ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConePointModP {
    pub x: Vec<u64>,
    pub y: Vec<u64>,
    pub u: Vec<u64>,
}

/// A cone point with rational base point and complex fiber vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ConePointFloat {
    pub x: Vec<BigRational>,
    pub y: Vec<Complex64>,
    pub u: Vec<Complex64>,
}

fn mat_vec<F: Scalars>(field: &F, a: &[Vec<F::Elem>], v: &[F::Elem]) -> Vec<F::Elem> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(field.zero(), |acc, (x, y)| field.add(&acc, &field.mul(x, y)))
        })
        .collect()
}

/// `count` points with `F(x, y) = 0` exactly over `F_p` and `∇_y F ≠ 0`.
pub fn sample_cone_modp(cs: &ConeStructure, count: usize, seed: u64, p: u64) -> Result<Vec<ConePointModP>> {
    let sampler = ModSampler::new(cs.hypersurface(), p)?;
    let field = *sampler.field();
    let n = cs.coframe().n();
    let mut out = Vec::with_capacity(count);
    let mut index = 0u64;
    let max = (count * 4 + 16) as u64;
    while out.len() < count && index < max {
        let mut rng = stream_rng(seed ^ 0x5eed_c0de, index);
        let sample = (|| {
            let x: Vec<u64> = (0..n).map(|_| rng.gen_range(0..p)).collect();
            let a = cs.coframe().matrix_at(&x, &field).ok()?;
            let b = linalg::invert(&field, &a)?;
            let u = sampler.point(seed, index, true)?;
            let y = mat_vec(&field, &b, &u);
            Some(ConePointModP { x, y, u })
        })();
        index += 1;
        if let Some(pt) = sample {
            out.push(pt);
        }
    }
    if out.len() < count {
        return Err(Error::SamplingFailure {
            found: out.len(),
            needed: count,
            attempts: index as usize,
        });
    }
    Ok(out)
}

/// `count` points with rational base points and `|F(x, y)|` below `1e-12`
/// relative to the coefficient size, after one Newton polish of `u`.
pub fn sample_cone_float(cs: &ConeStructure, count: usize, seed: u64) -> Result<Vec<ConePointFloat>> {
    let sampler = ComplexSampler::new(cs.hypersurface());
    let xs = cs.coframe().sample_points(count, seed)?;
    let c = Complexes;
    let mut out = Vec::with_capacity(count);
    for (index, x) in xs.into_iter().enumerate() {
        let a = cs.coframe().matrix_at(&x, &Rationals)?;
        let ac: Vec<Vec<Complex64>> = a
            .iter()
            .map(|r| r.iter().map(|v| Complex64::new(rational_to_f64(v), 0.0)).collect())
            .collect();
        let b = linalg::invert(&c, &ac).ok_or(Error::Pole)?;
        let u = sampler
            .point(seed, index as u64)
            .ok_or(Error::SamplingFailure {
                found: out.len(),
                needed: count,
                attempts: ATTEMPTS,
            })?;
        let y = mat_vec(&c, &b, &u);
        out.push(ConePointFloat { x, y, u });
    }
    Ok(out)
}

/// Complex coordinates of a rational point.
pub fn complexify(x: &[BigRational]) -> Vec<Complex64> {
    x.iter()
        .map(|v| Complex64::new(rational_to_f64(v), 0.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::adapted_cone;
    use crate::coframe::{Chart, Coframe};

    #[test]
    fn fermat_points_mod_p_are_exact_and_deterministic() {
        let z = Hypersurface::fermat(3, 4).unwrap();
        let s = ModSampler::new(&z, 2_147_483_647).unwrap();
        for i in 0..20 {
            let u = s.point(11, i, true).unwrap();
            assert_eq!(s.eval(&u), 0);
            assert!(s.gradient(&u).iter().any(|&g| g != 0));
            assert_eq!(Some(u), s.point(11, i, true));
        }
    }

    #[test]
    fn complex_points_lie_on_the_cone() {
        let z = Hypersurface::parse("x1^4 + x2^4 + x3^4 + x1*x2*x3^2", 3).unwrap();
        let s = ComplexSampler::new(&z);
        for i in 0..20 {
            let u = s.point(5, i).unwrap();
            assert!(s.relative_value(&u) < 1e-12);
        }
    }

    #[test]
    fn cone_samples_satisfy_the_cone_equation() {
        let z = Hypersurface::fermat(3, 4).unwrap();
        let s = "1/(1-x1)";
        let rows = [vec![s, "0", "0"], vec!["0", s, "x1"], vec!["0", "0", s]];
        let c = Coframe::from_strings(Chart::standard(3).unwrap(), &rows).unwrap();
        let cs = adapted_cone(&c, &z).unwrap();
        let p = 1_073_741_827;
        let f = PrimeField::new(p).unwrap();
        let pts = sample_cone_modp(&cs, 10, 3, p).unwrap();
        for pt in &pts {
            let xy: Vec<u64> = pt.x.iter().chain(&pt.y).copied().collect();
            assert_eq!(cs.cone_equation().evaluate(&xy, &f).unwrap(), 0);
        }
        assert_eq!(pts, sample_cone_modp(&cs, 10, 3, p).unwrap());
        for pt in sample_cone_float(&cs, 10, 3).unwrap() {
            let mut xy = complexify(&pt.x);
            xy.extend(&pt.y);
            let v = cs.cone_equation().evaluate(&xy, &Complexes).unwrap();
            let ny: f64 = pt.y.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            assert!(v.norm() < 1e-10 * ny.powi(4).max(1.0), "{v}");
        }
    }
}
