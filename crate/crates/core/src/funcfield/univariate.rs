//! Dense univariate polynomials over a prime field and over the complex
//! numbers, used for coprimality tests and for point sampling on cones.
//!
//! Coefficient vectors are stored lowest degree first.

use num_complex::Complex64;
use rand::Rng;

use super::field::{PrimeField, Scalars};

pub fn trim(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

pub fn degree(p: &[u64]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

fn sub(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out: Vec<u64> = (0..n)
        .map(|i| f.sub(a.get(i).unwrap_or(&0), b.get(i).unwrap_or(&0)))
        .collect();
    trim(&mut out);
    out
}

fn mul(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

/// Remainder of `a` modulo a nonzero `b`.
pub fn rem(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
    let db = degree(b).expect("division by zero polynomial");
    let inv_lead = f.inv(&b[db]).expect("nonzero leading coefficient");
    let mut r = a.to_vec();
    trim(&mut r);
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let q = f.mul(&r[dr], &inv_lead);
        let shift = dr - db;
        for (j, bj) in b.iter().enumerate().take(db + 1) {
            r[shift + j] = f.sub(&r[shift + j], &f.mul(&q, bj));
        }
        trim(&mut r);
    }
    r
}

/// Monic gcd.
pub fn gcd(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(f, &a, &b);
        a = b;
        b = r;
    }
    if let Some(d) = degree(&a) {
        let inv = f.inv(&a[d]).unwrap();
        for c in a.iter_mut() {
            *c = f.mul(c, &inv);
        }
    }
    a
}

/// `base^e mod modulus`.
fn pow_mod_poly(f: &PrimeField, base: &[u64], mut e: u64, modulus: &[u64]) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = rem(f, base, modulus);
    while e > 0 {
        if e & 1 == 1 {
            acc = rem(f, &mul(f, &acc, &b), modulus);
        }
        e >>= 1;
        if e > 0 {
            b = rem(f, &mul(f, &b, &b), modulus);
        }
    }
    acc
}

/// All distinct roots in the prime field, in increasing order.
/// The zero polynomial has every element as a root; callers handle it.
pub fn roots<R: Rng>(f: &PrimeField, poly: &[u64], rng: &mut R) -> Vec<u64> {
    let mut p = poly.to_vec();
    trim(&mut p);
    let Some(d) = degree(&p) else {
        return Vec::new();
    };
    if d == 0 {
        return Vec::new();
    }
    let q = f.modulus();
    // Distinct linear factors: gcd(p, x^q - x).
    let xq = pow_mod_poly(f, &[0, 1], q, &p);
    let g = gcd(f, &p, &sub(f, &xq, &[0, 1]));
    let mut out = Vec::new();
    split_linear(f, g, rng, &mut out);
    out.sort_unstable();
    out
}

fn split_linear<R: Rng>(f: &PrimeField, g: Vec<u64>, rng: &mut R, out: &mut Vec<u64>) {
    let Some(d) = degree(&g) else { return };
    match d {
        0 => {}
        1 => {
            // g = x + c (monic)
            out.push(f.neg(&g[0]));
        }
        _ => {
            let q = f.modulus();
            if q == 2 {
                // Both elements are roots of the squarefree product.
                out.extend([0, 1]);
                return;
            }
            loop {
                let a = rng.gen_range(0..q);
                let h = pow_mod_poly(f, &[a, 1], (q - 1) / 2, &g);
                let h1 = sub(f, &h, &[1]);
                let s = gcd(f, &g, &h1);
                let ds = degree(&s).unwrap_or(0);
                if ds > 0 && ds < d {
                    let other = div_exact(f, &g, &s);
                    split_linear(f, s, rng, out);
                    split_linear(f, other, rng, out);
                    return;
                }
            }
        }
    }
}

fn div_exact(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
    let db = degree(b).unwrap();
    let da = degree(a).unwrap();
    let inv_lead = f.inv(&b[db]).unwrap();
    let mut r = a.to_vec();
    let mut q = vec![0u64; da - db + 1];
    for k in (0..=da - db).rev() {
        let c = f.mul(&r[k + db], &inv_lead);
        q[k] = c;
        for (j, bj) in b.iter().enumerate().take(db + 1) {
            r[k + j] = f.sub(&r[k + j], &f.mul(&c, bj));
        }
    }
    trim(&mut q);
    q
}

/// Evaluate a complex polynomial (lowest degree first).
pub fn eval_c(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// All complex roots by Weierstrass (Durand-Kerner) iteration followed by
/// Newton polishing. Returns `None` if the iteration fails to converge.
pub fn complex_roots(p: &[Complex64]) -> Option<Vec<Complex64>> {
    let d = p.iter().rposition(|c| c.norm() > 0.0)?;
    if d == 0 {
        return Some(Vec::new());
    }
    let lead = p[d];
    let monic: Vec<Complex64> = p[..=d].iter().map(|c| c / lead).collect();
    let radius = 1.0 + monic[..d].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..d).map(|k| seed.powu(k as u32) * (radius / 2.0)).collect();
    let mut converged = false;
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..d {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                den = Complex64::new(1e-12, 0.0);
            }
            let step = eval_c(&monic, z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * radius {
            converged = true;
            break;
        }
    }
    let deriv: Vec<Complex64> = (1..=d).map(|k| monic[k] * k as f64).collect();
    for r in z.iter_mut() {
        for _ in 0..3 {
            let dv = eval_c(&deriv, *r);
            if dv.norm() == 0.0 {
                break;
            }
            *r -= eval_c(&monic, *r) / dv;
        }
    }
    let scale: f64 = monic.iter().map(|c| c.norm()).sum();
    let ok = z.iter().all(|r| {
        let mag = r.norm().max(1.0).powi(d as i32);
        eval_c(&monic, *r).norm() <= 1e-9 * scale * mag
    });
    (converged || ok).then_some(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn roots_of_split_quadratic() {
        let f = PrimeField::new(101).unwrap();
        // (x - 3)(x - 5) = x^2 - 8x + 15
        let p = vec![15, f.neg(&8), 1];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        assert_eq!(roots(&f, &p, &mut rng), vec![3, 5]);
    }

    #[test]
    fn irreducible_has_no_roots() {
        let f = PrimeField::new(7).unwrap();
        // x^2 + 1 has no roots mod 7 (7 = 3 mod 4)
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        assert!(roots(&f, &[1, 0, 1], &mut rng).is_empty());
    }

    #[test]
    fn fourth_roots_brute_force() {
        let f = PrimeField::new(10_007).unwrap();
        let c = 1234u64;
        let p = vec![f.neg(&c), 0, 0, 0, 1];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let fast = roots(&f, &p, &mut rng);
        let brute: Vec<u64> = (0..10_007).filter(|&t| f.pow(t, 4) == c).collect();
        assert_eq!(fast, brute);
    }

    #[test]
    fn complex_quartic_roots() {
        // z^4 + 1
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let r = complex_roots(&[one, zero, zero, zero, one]).unwrap();
        assert_eq!(r.len(), 4);
        for z in r {
            assert!((z.powu(4) + one).norm() < 1e-12);
        }
    }
}
