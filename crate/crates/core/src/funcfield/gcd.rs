//! Multivariate polynomial gcd over the rationals.
//!
//! Most pairs met in coframe computations are coprime, so a modular image
//! test runs first: if the univariate images (all but one variable
//! specialised at random residues) are coprime with undiminished degree,
//! the true gcd has degree zero in that variable. Only when that test is
//! inconclusive does the recursive primitive pseudo-remainder sequence run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{PrimeField, Scalars};
use super::poly::MultiPoly;
use super::univariate;

const TEST_PRIME: u64 = 2_147_483_629;

/// Monic gcd (lexicographic leading coefficient 1); `gcd(0, 0) = 0`.
pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let n = a.nvars();
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(n);
    }
    let ma = a.min_exponents();
    let mb = b.min_exponents();
    let common: Vec<u16> = ma.iter().zip(&mb).map(|(x, y)| *x.min(y)).collect();
    let a1 = a.div_monomial(&ma);
    let b1 = b.div_monomial(&mb);
    let g = gcd_core(&a1, &b1);
    g.mul_monomial(&common).monic()
}

/// gcd of polynomials with no monomial factor.
fn gcd_core(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let n = a.nvars();
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(n);
    }
    if a.div_exact(b).is_some() {
        return b.monic();
    }
    if b.div_exact(a).is_some() {
        return a.monic();
    }
    // A variable present in only one argument: the gcd lies in that
    // argument's content with respect to the variable.
    for v in 0..n {
        match (a.depends_on(v), b.depends_on(v)) {
            (true, false) => return gcd_core(&content_in(a, v), b),
            (false, true) => return gcd_core(a, &content_in(b, v)),
            _ => {}
        }
    }
    let shared: Vec<usize> = (0..n).filter(|&v| a.depends_on(v)).collect();
    if shared.is_empty() {
        return MultiPoly::one(n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x9cd1_17e5 ^ (a.num_terms() as u64) << 20 ^ b.num_terms() as u64);
    let mut main = None;
    for &v in &shared {
        if !coprime_in(a, b, v, &mut rng) {
            main = Some(v);
            break;
        }
    }
    let Some(v) = main else {
        return MultiPoly::one(n);
    };
    prs_gcd(a, b, v)
}

/// True if the gcd of `a` and `b` certainly has degree 0 in `v`.
fn coprime_in(a: &MultiPoly, b: &MultiPoly, v: usize, rng: &mut ChaCha8Rng) -> bool {
    let f = PrimeField::new(TEST_PRIME).unwrap();
    let (Ok(ma), Ok(mb)) = (a.reduce_mod_prime(TEST_PRIME), b.reduce_mod_prime(TEST_PRIME)) else {
        return false;
    };
    let n = a.nvars();
    for _ in 0..2 {
        let point: Vec<u64> = (0..n).map(|_| rng.gen_range(1..TEST_PRIME)).collect();
        let ua = specialize(&f, &ma, v, &point);
        let ub = specialize(&f, &mb, v, &point);
        if univariate::degree(&ua) != Some(a.degree_in(v) as usize)
            || univariate::degree(&ub) != Some(b.degree_in(v) as usize)
        {
            continue;
        }
        let g = univariate::gcd(&f, &ua, &ub);
        return univariate::degree(&g) == Some(0);
    }
    false
}

/// False only if `d` certainly does not divide `n`: compares univariate
/// images modulo a prime at a random specialisation of all but one variable.
pub(crate) fn may_divide(d: &MultiPoly, n: &MultiPoly) -> bool {
    let Some(v) = (0..d.nvars()).find(|&v| d.depends_on(v)) else {
        return true;
    };
    if n.degree_in(v) < d.degree_in(v) {
        return n.is_zero();
    }
    let f = PrimeField::new(TEST_PRIME).unwrap();
    let (Ok(md), Ok(mn)) = (d.reduce_mod_prime(TEST_PRIME), n.reduce_mod_prime(TEST_PRIME)) else {
        return true;
    };
    let mut rng = ChaCha8Rng::seed_from_u64((d.num_terms() as u64) << 32 ^ n.num_terms() as u64);
    let point: Vec<u64> = (0..d.nvars()).map(|_| rng.gen_range(1..TEST_PRIME)).collect();
    let ud = specialize(&f, &md, v, &point);
    if univariate::degree(&ud) != Some(d.degree_in(v) as usize) {
        return true;
    }
    let un = specialize(&f, &mn, v, &point);
    univariate::rem(&f, &un, &ud).is_empty()
}

fn specialize(
    f: &PrimeField,
    p: &super::poly::ModPoly,
    v: usize,
    point: &[u64],
) -> Vec<u64> {
    let deg = p.terms().map(|(m, _)| m[v] as usize).max().unwrap_or(0);
    let mut out = vec![0u64; deg + 1];
    for (m, c) in p.terms() {
        let mut t = *c;
        for (i, &e) in m.iter().enumerate() {
            if i != v && e > 0 {
                t = f.mul(&t, &f.pow(point[i], e as u64));
            }
        }
        let k = m[v] as usize;
        out[k] = f.add(&out[k], &t);
    }
    univariate::trim(&mut out);
    out
}

/// gcd of the coefficients of `p` viewed as a polynomial in `v`.
pub fn content_in(p: &MultiPoly, v: usize) -> MultiPoly {
    let coeffs = p.coefficients_in(v);
    let mut g = MultiPoly::zero(p.nvars());
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        g = gcd(&g, c);
        if g.is_constant() {
            return MultiPoly::one(p.nvars());
        }
    }
    g
}

fn primitive_in(p: &MultiPoly, v: usize) -> MultiPoly {
    if p.is_zero() {
        return p.clone();
    }
    let c = content_in(p, v);
    p.div_exact(&c).expect("content divides")
}

fn var_power(n: usize, v: usize, k: u16) -> Vec<u16> {
    let mut m = vec![0; n];
    m[v] = k;
    m
}

/// Pseudo-remainder of `a` by `b` in variable `v`.
fn prem(a: &MultiPoly, b: &MultiPoly, v: usize) -> MultiPoly {
    let db = b.degree_in(v);
    let lb = b.coefficients_in(v).pop().unwrap();
    let mut r = a.clone();
    while !r.is_zero() && r.depends_on(v) && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.coefficients_in(v).pop().unwrap();
        let shift = var_power(a.nvars(), v, dr - db);
        r = &(&r * &lb) - &(&lr * &b.mul_monomial(&shift));
    }
    r
}

fn prs_gcd(a: &MultiPoly, b: &MultiPoly, v: usize) -> MultiPoly {
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let c = gcd(&ca, &cb);
    let mut p = a.div_exact(&ca).expect("content divides");
    let mut q = b.div_exact(&cb).expect("content divides");
    if p.degree_in(v) < q.degree_in(v) {
        std::mem::swap(&mut p, &mut q);
    }
    while !q.is_zero() {
        if !q.depends_on(v) {
            // Nonzero and free of v: the primitive gcd is 1.
            p = MultiPoly::one(a.nvars());
            break;
        }
        let r = prem(&p, &q, v);
        p = q;
        q = primitive_in(&r, v);
    }
    let g = primitive_in(&p, v);
    (&c * &g).monic()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcfield::parse::parse_poly;

    fn p(s: &str) -> MultiPoly {
        parse_poly(s, &["x1", "x2", "x3"]).unwrap()
    }

    #[test]
    fn common_factor_found() {
        let g = p("x1 - x2 + 3*x3");
        let a = &g * &p("x1^2 + x3");
        let b = &g * &p("x2*x3 - 7");
        assert_eq!(gcd(&a, &b), g.monic());
    }

    #[test]
    fn coprime_pair() {
        assert!(gcd(&p("x1^2 + x2^2 + 1"), &p("x1 - x2*x3")).is_one());
    }

    #[test]
    fn repeated_factor_and_monomial() {
        let g = p("1 - x1");
        let a = &g.pow(3) * &p("x2^2");
        let b = &g.pow(2) * &p("x2*x3 + 1");
        assert_eq!(gcd(&a, &b), g.pow(2).monic());
    }

    #[test]
    fn gcd_with_monomials() {
        assert_eq!(gcd(&p("x1^2*x2"), &p("x1*x2^3")), p("x1*x2"));
    }
}
