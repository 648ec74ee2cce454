//! Smoothness of `Z`: no common zero of the partial derivatives of `f`
//! other than the origin.
//!
//! Diagonal forms `Σ a_i x_i^d` are decided in closed form. Otherwise every
//! projective point over two small primes is tested; a singular point found
//! this way is lifted to small integers and confirmed over the rationals.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::Hypersurface;
use crate::error::Result;
use crate::funcfield::field::is_prime;
use crate::funcfield::{BigRational, Rationals};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SmoothVerdict {
    Smooth,
    Singular,
    Inconclusive { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothReport {
    #[serde(flatten)]
    pub verdict: SmoothVerdict,
    /// `diagonal` or `prime_search`.
    pub method: String,
    pub primes: Vec<u64>,
    /// A common zero of the partials, over `witness_prime` (or the
    /// rationals when `witness_exact`).
    pub witness: Option<Vec<i64>>,
    pub witness_prime: Option<u64>,
    pub witness_exact: bool,
}

impl SmoothReport {
    pub fn is_smooth(&self) -> bool {
        self.verdict == SmoothVerdict::Smooth
    }
}

/// Largest number of projective points enumerated per prime.
pub const SEARCH_BUDGET: u64 = 1_500_000;

pub fn smooth_check(z: &Hypersurface) -> Result<SmoothReport> {
    let n = z.n();
    let d = z.degree() as u64;
    if let Some(a) = z.diagonal_coefficients() {
        let (verdict, witness) = match a.iter().position(Zero::is_zero) {
            None => (SmoothVerdict::Smooth, None),
            Some(i) => {
                let mut w = vec![0i64; n];
                w[i] = 1;
                (SmoothVerdict::Singular, Some(w))
            }
        };
        let exact = witness.is_some();
        return Ok(SmoothReport {
            verdict,
            method: "diagonal".into(),
            primes: Vec::new(),
            witness,
            witness_prime: None,
            witness_exact: exact,
        });
    }
    // p^(n-1) + ... + 1 points; pick p so the count stays within budget.
    let mut p = (SEARCH_BUDGET as f64).powf(1.0 / (n as f64 - 1.0)).floor() as u64;
    let mut primes = Vec::new();
    while primes.len() < 2 && p > d + 1 {
        if is_prime(p) && d % p != 0 && z.f().reduce_mod_prime(p).is_ok() {
            primes.push(p);
        }
        p -= 1;
    }
    if primes.len() < 2 {
        return Ok(SmoothReport {
            verdict: SmoothVerdict::Inconclusive {
                reason: format!("no admissible search prime above the degree {d} within the budget"),
            },
            method: "prime_search".into(),
            primes,
            witness: None,
            witness_prime: None,
            witness_exact: false,
        });
    }
    let mut found = Vec::new();
    for &p in &primes {
        if let Some(w) = search(z, p)? {
            let lifted: Vec<i64> = w
                .iter()
                .map(|&c| if c > p / 2 { c as i64 - p as i64 } else { c as i64 })
                .collect();
            if is_singular_over_q(z, &lifted) {
                return Ok(SmoothReport {
                    verdict: SmoothVerdict::Singular,
                    method: "prime_search".into(),
                    primes,
                    witness: Some(lifted),
                    witness_prime: Some(p),
                    witness_exact: true,
                });
            }
            found.push((p, lifted));
        }
    }
    let (verdict, witness) = match found.len() {
        0 => (SmoothVerdict::Smooth, None),
        1 => (
            SmoothVerdict::Inconclusive {
                reason: format!("singular point modulo {} only", found[0].0),
            },
            Some(found[0].clone()),
        ),
        _ => (SmoothVerdict::Singular, Some(found[0].clone())),
    };
    Ok(SmoothReport {
        verdict,
        method: "prime_search".into(),
        primes,
        witness_prime: witness.as_ref().map(|w| w.0),
        witness: witness.map(|w| w.1),
        witness_exact: false,
    })
}

fn is_singular_over_q(z: &Hypersurface, w: &[i64]) -> bool {
    let pt: Vec<BigRational> = w.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect();
    pt.iter().any(|c| c.abs() > BigRational::zero())
        && z
            .gradient()
            .iter()
            .all(|g| g.evaluate(&pt, &Rationals).map(|v| v.is_zero()).unwrap_or(false))
}

/// First projective point over `F_p` where all partials vanish. Points are
/// normalized so the first nonzero coordinate is 1 and visited from
/// `(0, ..., 0, 1)` upward.
fn search(z: &Hypersurface, p: u64) -> Result<Option<Vec<u64>>> {
    let n = z.n();
    let grad = z
        .gradient()
        .iter()
        .map(|g| g.reduce_mod_prime(p))
        .collect::<Result<Vec<_>>>()?;
    for lead in (0..n).rev() {
        let free = n - lead - 1;
        let mut u = vec![0u64; n];
        u[lead] = 1;
        let total = p.pow(free as u32);
        for idx in 0..total {
            let mut r = idx;
            for slot in u.iter_mut().skip(lead + 1) {
                *slot = r % p;
                r /= p;
            }
            if grad.iter().all(|g| g.evaluate(&u) == 0) {
                return Ok(Some(u));
            }
        }
    }
    Ok(None)
}
