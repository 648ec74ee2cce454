//! Scalar fields used for evaluation and linear algebra.
//!
//! A [`Scalars`] implementation carries whatever context the arithmetic
//! needs (the modulus of a prime field, a tolerance for floats) so that
//! elements themselves stay plain values.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// Arithmetic over a ring of scalars that admits division by units.
pub trait Scalars: Clone + Send + Sync {
    type Elem: Clone + std::fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse, `None` for zero (or numerically zero).
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Image of a rational coefficient; fails for a prime dividing the denominator.
    fn from_rational(&self, c: &BigRational) -> Result<Self::Elem>;
    /// Magnitude used for residual reporting.
    fn magnitude(&self, a: &Self::Elem) -> f64;

    fn from_i64(&self, v: i64) -> Self::Elem {
        self.from_rational(&BigRational::from_integer(BigInt::from(v)))
            .expect("integers reduce in every field")
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|ib| self.mul(a, &ib))
    }
}

/// The rationals, exact.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Scalars for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::from_integer(1.into())
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn from_rational(&self, c: &BigRational) -> Result<BigRational> {
        Ok(c.clone())
    }
    fn magnitude(&self, a: &BigRational) -> f64 {
        rational_to_f64(&a.abs())
    }
}

/// The prime field `Z/pZ` for a prime `p < 2^32`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 32 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn pow(&self, base: u64, exp: u64) -> u64 {
        pow_mod(base, exp, self.p)
    }

    pub fn reduce_int(&self, v: &BigInt) -> u64 {
        let m = BigInt::from(self.p);
        let r = ((v % &m) + &m) % &m;
        r.to_u64().expect("residue fits in u64")
    }
}

impl Scalars for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        (*a % self.p != 0).then(|| pow_mod(*a, self.p - 2, self.p))
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a % self.p == 0
    }
    fn from_rational(&self, c: &BigRational) -> Result<u64> {
        let den = self.reduce_int(c.denom());
        if den == 0 {
            return Err(Error::BadPrime(self.p));
        }
        let num = self.reduce_int(c.numer());
        Ok(mul_mod(num, pow_mod(den, self.p - 2, self.p), self.p))
    }
    fn magnitude(&self, a: &u64) -> f64 {
        // Distance to zero in the symmetric residue system.
        (*a).min(self.p - *a) as f64
    }
}

/// Double-precision reals. `tol` is the absolute threshold below which a
/// value is treated as zero (used only for pivoting decisions).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reals {
    pub tol: f64,
}

impl Default for Reals {
    fn default() -> Self {
        Self { tol: 1e-8 }
    }
}

impl Scalars for Reals {
    type Elem = f64;

    fn zero(&self) -> f64 {
        0.0
    }
    fn one(&self) -> f64 {
        1.0
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn sub(&self, a: &f64, b: &f64) -> f64 {
        a - b
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn neg(&self, a: &f64) -> f64 {
        -a
    }
    fn inv(&self, a: &f64) -> Option<f64> {
        (*a != 0.0).then(|| 1.0 / a)
    }
    fn is_zero(&self, a: &f64) -> bool {
        *a == 0.0
    }
    fn from_rational(&self, c: &BigRational) -> Result<f64> {
        Ok(rational_to_f64(c))
    }
    fn magnitude(&self, a: &f64) -> f64 {
        a.abs()
    }
}

/// Double-precision complex numbers, for sampling varieties without real points.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Complexes;

impl Scalars for Complexes {
    type Elem = Complex64;

    fn zero(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
    fn one(&self) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }
    fn add(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a + b
    }
    fn sub(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a - b
    }
    fn mul(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a * b
    }
    fn neg(&self, a: &Complex64) -> Complex64 {
        -a
    }
    fn inv(&self, a: &Complex64) -> Option<Complex64> {
        (a.norm_sqr() != 0.0).then(|| a.inv())
    }
    fn is_zero(&self, a: &Complex64) -> bool {
        a.norm_sqr() == 0.0
    }
    fn from_rational(&self, c: &BigRational) -> Result<Complex64> {
        Ok(Complex64::new(rational_to_f64(c), 0.0))
    }
    fn magnitude(&self, a: &Complex64) -> f64 {
        a.norm()
    }
}

/// Complex numbers with double-double (about 32 digit) parts, for
/// pointwise checks whose float evaluation cancels badly.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComplexDoubleDouble;

pub type ComplexDd = Complex<TwoFloat>;

fn bigint_to_dd(v: &BigInt) -> TwoFloat {
    let hi = v.to_f64().unwrap_or(f64::NAN);
    let rest = BigInt::from_f64(hi).map(|h| v - h).and_then(|r| r.to_f64()).unwrap_or(0.0);
    TwoFloat::new_add(hi, rest)
}

impl ComplexDoubleDouble {
    pub fn from_complex(&self, z: Complex64) -> ComplexDd {
        Complex::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
    }

    pub fn to_complex(&self, z: &ComplexDd) -> Complex64 {
        Complex64::new(z.re.hi() + z.re.lo(), z.im.hi() + z.im.lo())
    }
}

impl Scalars for ComplexDoubleDouble {
    type Elem = ComplexDd;

    fn zero(&self) -> ComplexDd {
        Complex::new(TwoFloat::from(0.0), TwoFloat::from(0.0))
    }
    fn one(&self) -> ComplexDd {
        Complex::new(TwoFloat::from(1.0), TwoFloat::from(0.0))
    }
    fn add(&self, a: &ComplexDd, b: &ComplexDd) -> ComplexDd {
        a + b
    }
    fn sub(&self, a: &ComplexDd, b: &ComplexDd) -> ComplexDd {
        a - b
    }
    fn mul(&self, a: &ComplexDd, b: &ComplexDd) -> ComplexDd {
        a * b
    }
    fn neg(&self, a: &ComplexDd) -> ComplexDd {
        -a
    }
    fn inv(&self, a: &ComplexDd) -> Option<ComplexDd> {
        let n = a.re * a.re + a.im * a.im;
        (n.hi() != 0.0).then(|| Complex::new(a.re / n, -a.im / n))
    }
    fn is_zero(&self, a: &ComplexDd) -> bool {
        a.re.hi() == 0.0 && a.im.hi() == 0.0
    }
    fn from_rational(&self, c: &BigRational) -> Result<ComplexDd> {
        let v = bigint_to_dd(c.numer()) / bigint_to_dd(c.denom());
        Ok(Complex::new(v, TwoFloat::from(0.0)))
    }
    fn magnitude(&self, a: &ComplexDd) -> f64 {
        self.to_complex(a).norm()
    }
}

pub fn rational_to_f64(c: &BigRational) -> f64 {
    let n = c.numer().to_f64().unwrap_or(f64::NAN);
    let d = c.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        n / d
    } else {
        // Huge numerator/denominator: scale down before dividing.
        let shift = c.numer().bits().max(c.denom().bits()).saturating_sub(900) as usize;
        let n = (c.numer() >> shift).to_f64().unwrap_or(0.0);
        let d = (c.denom() >> shift).to_f64().unwrap_or(1.0);
        n / d
    }
}

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `>= n`.
pub fn next_prime(mut n: u64) -> u64 {
    while !is_prime(n) {
        n += 1;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert!(is_prime(2_147_483_647));
        assert!(is_prime(1_073_741_827));
        assert!(!is_prime(1_073_741_825));
        assert_eq!(next_prime(10_000), 10_007);
    }

    #[test]
    fn half_mod_seven_is_four() {
        let f = PrimeField::new(7).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(f.from_rational(&half).unwrap(), 4);
    }

    #[test]
    fn third_mod_three_is_bad_prime() {
        let f = PrimeField::new(3).unwrap();
        let third = BigRational::new(1.into(), 3.into());
        assert!(matches!(f.from_rational(&third), Err(Error::BadPrime(3))));
    }

    #[test]
    fn negative_rational_reduces() {
        let f = PrimeField::new(101).unwrap();
        let c = BigRational::new((-3).into(), 4.into());
        let v = f.from_rational(&c).unwrap();
        assert_eq!(f.mul(&v, &4), 98);
    }
}
