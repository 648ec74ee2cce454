//! Truncated multivariate Taylor series, and the double bracket
//! `[[ṽ, γ], γ]` evaluated pointwise from third-order jets of `A`.
//!
//! A jet is valid to order `v` when its coefficients of degree `≤ v` are
//! exact. Products and inverses keep validity, a partial derivative
//! lowers it by one. Starting from `A` to order 3, `γ` and `ṽ` are valid
//! to order 2, `[ṽ, γ]` to order 1 and `[[ṽ, γ], γ]` to order 0.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::funcfield::{BigRational, Scalars};

use super::ConeStructure;

struct Layout {
    monos: Vec<Vec<u16>>,
    /// `(a, b, c)` with `monos[a] + monos[b] = monos[c]`.
    table: Vec<(u32, u32, u32)>,
    /// `raise[c][i]`: index of `monos[c] + e_i`, if within the order.
    raise: Vec<Vec<Option<usize>>>,
}

impl Layout {
    fn new(nvars: usize, order: usize) -> Self {
        let mut monos: Vec<Vec<u16>> = vec![vec![0; nvars]];
        let mut frontier = monos.clone();
        for _ in 0..order {
            let mut next = Vec::new();
            for m in &frontier {
                let last = m.iter().rposition(|&e| e > 0).unwrap_or(0);
                for v in last..nvars {
                    let mut m2 = m.clone();
                    m2[v] += 1;
                    next.push(m2);
                }
            }
            monos.extend(next.iter().cloned());
            frontier = next;
        }
        let index = |m: &[u16]| monos.iter().position(|x| x == m);
        let mut table = Vec::new();
        for (a, ma) in monos.iter().enumerate() {
            for (b, mb) in monos.iter().enumerate() {
                let s: Vec<u16> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                if let Some(c) = index(&s) {
                    table.push((a as u32, b as u32, c as u32));
                }
            }
        }
        let raise = monos
            .iter()
            .map(|m| {
                (0..nvars)
                    .map(|i| {
                        let mut m2 = m.clone();
                        m2[i] += 1;
                        index(&m2)
                    })
                    .collect()
            })
            .collect();
        Self { monos, table, raise }
    }
}

/// Power series in `nvars` variables truncated above `order`, over `F`.
#[derive(Clone)]
pub struct Jets<F: Scalars> {
    base: F,
    nvars: usize,
    order: usize,
    layout: Arc<Layout>,
}

impl<F: Scalars> Jets<F> {
    pub fn new(base: F, nvars: usize, order: usize) -> Self {
        Self {
            base,
            nvars,
            order,
            layout: Arc::new(Layout::new(nvars, order)),
        }
    }

    pub fn len(&self) -> usize {
        self.layout.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn base(&self) -> &F {
        &self.base
    }

    pub fn constant(&self, v: F::Elem) -> Vec<F::Elem> {
        let mut out = self.zero();
        out[0] = v;
        out
    }

    /// `v + t_i`.
    pub fn variable(&self, i: usize, v: F::Elem) -> Vec<F::Elem> {
        let mut out = self.constant(v);
        out[i + 1] = self.base.one();
        out
    }

    pub fn value(&self, a: &[F::Elem]) -> F::Elem {
        a[0].clone()
    }

    /// `∂a/∂t_i`.
    pub fn partial(&self, a: &[F::Elem], i: usize) -> Vec<F::Elem> {
        let l = &self.layout;
        (0..self.len())
            .map(|c| match l.raise[c][i] {
                Some(r) => self.base.mul(&a[r], &self.base.from_i64(i64::from(l.monos[c][i]) + 1)),
                None => self.base.zero(),
            })
            .collect()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }
}

impl<F: Scalars> Scalars for Jets<F> {
    type Elem = Vec<F::Elem>;

    fn zero(&self) -> Self::Elem {
        vec![self.base.zero(); self.len()]
    }
    fn one(&self) -> Self::Elem {
        self.constant(self.base.one())
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.base.sub(x, y)).collect()
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut out = self.zero();
        let az: Vec<bool> = a.iter().map(|x| self.base.is_zero(x)).collect();
        let bz: Vec<bool> = b.iter().map(|x| self.base.is_zero(x)).collect();
        for &(i, j, k) in &self.layout.table {
            let (i, j, k) = (i as usize, j as usize, k as usize);
            if !az[i] && !bz[j] {
                out[k] = self.base.add(&out[k], &self.base.mul(&a[i], &b[j]));
            }
        }
        out
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
    /// `1/(c + e) = c⁻¹ Σ_k (-e/c)^k`, defined when `c ≠ 0`.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        let ic = self.base.inv(&a[0])?;
        let mut e: Self::Elem = a.iter().map(|x| self.base.mul(x, &ic)).collect();
        e[0] = self.base.zero();
        let ne = self.neg(&e);
        let mut term = self.one();
        let mut sum = self.one();
        for _ in 0..self.order {
            term = self.mul(&term, &ne);
            sum = self.add(&sum, &term);
        }
        Some(sum.iter().map(|x| self.base.mul(x, &ic)).collect())
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.iter().all(|x| self.base.is_zero(x))
    }
    fn from_rational(&self, c: &BigRational) -> Result<Self::Elem> {
        Ok(self.constant(self.base.from_rational(c)?))
    }
    fn magnitude(&self, a: &Self::Elem) -> f64 {
        self.base.magnitude(&a[0])
    }
}

fn mat_mul<F: Scalars>(j: &Jets<F>, a: &[Vec<Vec<F::Elem>>], b: &[Vec<Vec<F::Elem>>]) -> Vec<Vec<Vec<F::Elem>>> {
    let (r, m, c) = (a.len(), b.len(), b[0].len());
    (0..r)
        .map(|i| {
            (0..c)
                .map(|k| (0..m).fold(j.zero(), |acc, l| j.add(&acc, &j.mul(&a[i][l], &b[l][k]))))
                .collect()
        })
        .collect()
}

/// `A⁻¹` as a jet from the inverse of the constant part:
/// `B = Σ_k (-B₀ E)^k B₀` with `E = A - A₀`.
fn invert<F: Scalars>(j: &Jets<F>, a: &[Vec<Vec<F::Elem>>]) -> Result<Vec<Vec<Vec<F::Elem>>>> {
    let f = j.base();
    let a0: Vec<Vec<F::Elem>> = a.iter().map(|r| r.iter().map(|x| x[0].clone()).collect()).collect();
    let b0 = crate::linalg::invert(f, &a0).ok_or(Error::Pole)?;
    let b0j: Vec<Vec<Vec<F::Elem>>> = b0.iter().map(|r| r.iter().map(|x| j.constant(x.clone())).collect()).collect();
    let e: Vec<Vec<Vec<F::Elem>>> = a
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    let mut y = x.clone();
                    y[0] = f.zero();
                    y
                })
                .collect()
        })
        .collect();
    let step: Vec<Vec<Vec<F::Elem>>> = mat_mul(j, &b0j, &e)
        .into_iter()
        .map(|r| r.iter().map(|x| j.neg(x)).collect())
        .collect();
    let mut term = b0j.clone();
    let mut sum = b0j;
    for _ in 0..j.order {
        term = mat_mul(j, &step, &term);
        for (sr, tr) in sum.iter_mut().zip(&term) {
            for (s, t) in sr.iter_mut().zip(tr) {
                *s = j.add(s, t);
            }
        }
    }
    Ok(sum)
}

/// `[X, Y]^a = X(Y^a) - Y(X^a)` on jets.
fn bracket<F: Scalars>(j: &Jets<F>, x: &[Vec<F::Elem>], y: &[Vec<F::Elem>]) -> Vec<Vec<F::Elem>> {
    let m = x.len();
    (0..m)
        .map(|a| {
            let mut acc = j.zero();
            for i in 0..m {
                acc = j.add(&acc, &j.mul(&x[i], &j.partial(&y[a], i)));
                acc = j.sub(&acc, &j.mul(&y[i], &j.partial(&x[a], i)));
            }
            acc
        })
        .collect()
}

/// Pointwise `[[ṽ_{ij}, γ], γ]` for each pair `i < j`, with the values of
/// `g_{ij}` and `μ`, at `pt = (x, y)`.
pub struct PointBrackets<E> {
    pub pairs: Vec<(usize, usize)>,
    pub w: Vec<Vec<E>>,
    pub g: Vec<Vec<E>>,
    pub mu: Vec<E>,
    pub a: Vec<Vec<E>>,
}

pub fn point_brackets<F: Scalars>(cs: &ConeStructure, pt: &[F::Elem], field: &F) -> Result<PointBrackets<F::Elem>> {
    let n = cs.coframe().n();
    let m = 2 * n;
    let j = Jets::new(field.clone(), m, 3);
    let t: Vec<Vec<F::Elem>> = pt.iter().enumerate().map(|(i, v)| j.variable(i, v.clone())).collect();
    let a = cs.coframe().matrix_at(&t[..n], &j)?;
    let mu: Vec<Vec<F::Elem>> = a
        .iter()
        .map(|row| row.iter().zip(&t[n..]).fold(j.zero(), |acc, (p, q)| j.add(&acc, &j.mul(p, q))))
        .collect();
    // C[k][i] = ∂μ^k/∂x_i
    let c: Vec<Vec<Vec<F::Elem>>> = mu.iter().map(|mk| (0..n).map(|i| j.partial(mk, i)).collect()).collect();
    let b = invert(&j, &a)?;
    let bcb = mat_mul(&j, &mat_mul(&j, &b, &c), &b);
    let d_theta: Vec<Vec<Vec<F::Elem>>> = (0..n)
        .map(|col| {
            (0..m)
                .map(|i| if i < n { b[i][col].clone() } else { j.neg(&bcb[i - n][col]) })
                .collect()
        })
        .collect();
    let d_lambda: Vec<Vec<Vec<F::Elem>>> = (0..n)
        .map(|col| (0..m).map(|i| if i < n { j.zero() } else { b[i - n][col].clone() }).collect())
        .collect();
    let combine = |coef: &[Vec<F::Elem>], fields: &[Vec<Vec<F::Elem>>]| -> Vec<Vec<F::Elem>> {
        (0..m)
            .map(|i| {
                coef.iter()
                    .zip(fields)
                    .fold(j.zero(), |acc, (c, fld)| j.add(&acc, &j.mul(c, &fld[i])))
            })
            .collect()
    };
    let gamma = combine(&mu, &d_theta);
    let grad = cs
        .hypersurface()
        .gradient()
        .iter()
        .map(|g| g.evaluate(&mu, &j))
        .collect::<Result<Vec<_>>>()?;
    let mut out = PointBrackets {
        pairs: Vec::new(),
        w: Vec::new(),
        g: Vec::new(),
        mu: mu.iter().map(|x| j.value(x)).collect(),
        a: a.iter().map(|r| r.iter().map(|x| j.value(x)).collect()).collect(),
    };
    for p in 0..n {
        for q in p + 1..n {
            let mut g = vec![j.zero(); n];
            g[p] = grad[q].clone();
            g[q] = j.neg(&grad[p]);
            let vt = combine(&g, &d_lambda);
            let w = bracket(&j, &bracket(&j, &vt, &gamma), &gamma);
            out.pairs.push((p, q));
            out.w.push(w.iter().map(|x| j.value(x)).collect());
            out.g.push(g.iter().map(|x| j.value(x)).collect());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcfield::{parse_ratfunc, PrimeField, Rationals};

    #[test]
    fn jet_arithmetic() {
        let j = Jets::new(Rationals, 2, 3);
        let q = |v: i64| BigRational::from_integer(v.into());
        let x = j.variable(0, q(2));
        let y = j.variable(1, q(-1));
        let f = parse_ratfunc("x1^2*x2/(1 + x2^2)", &["x1", "x2"]).unwrap();
        let v = f.evaluate(&[x.clone(), y.clone()], &j).unwrap();
        assert_eq!(j.value(&v), q(-2));
        let dx = j.partial(&v, 0);
        let dy = j.partial(&v, 1);
        let point = [q(2), q(-1)];
        assert_eq!(j.value(&dx), f.diff(0).unwrap().evaluate(&point, &Rationals).unwrap());
        assert_eq!(j.value(&dy), f.diff(1).unwrap().evaluate(&point, &Rationals).unwrap());
        let dxy = j.partial(&dx, 1);
        let want = f.diff(0).unwrap().diff(1).unwrap().evaluate(&point, &Rationals).unwrap();
        assert_eq!(j.value(&dxy), want);
        let inv = j.inv(&v).unwrap();
        assert_eq!(j.mul(&inv, &v), j.one());
        let p = Jets::new(PrimeField::new(101).unwrap(), 2, 2);
        assert!(p.inv(&p.variable(0, 0)).is_none());
    }
}
