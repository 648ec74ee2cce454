//! Sparse multivariate polynomials with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::field::{PrimeField, Scalars};
use crate::error::{Error, Result};

/// Exponent vector; `m[i]` is the power of variable `i`.
pub type Monomial = Vec<u16>;

pub const DEFAULT_MAX_TERMS: usize = 100_000;

/// Term bound for every polynomial produced at a checked boundary.
/// Overridden once per process by the `CCC_MAX_TERMS` environment variable.
pub fn max_terms() -> usize {
    static BOUND: OnceLock<usize> = OnceLock::new();
    *BOUND.get_or_init(|| {
        std::env::var("CCC_MAX_TERMS")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&v: &usize| v > 0)
            .unwrap_or(DEFAULT_MAX_TERMS)
    })
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, rat(c))
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable {i} out of range for {nvars}");
        let mut m = vec![0; nvars];
        m[i] = 1;
        Self::monomial(m, BigRational::one())
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Self {
        let mut p = Self::zero(m.len());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.len(), nvars, "exponent vector length");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &[u16]) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.constant_term().is_one()
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&e| e as u32).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u16 {
        self.terms.keys().map(|m| m[v]).max().unwrap_or(0)
    }

    pub fn depends_on(&self, v: usize) -> bool {
        self.terms.keys().any(|m| m[v] > 0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self
            .terms
            .keys()
            .map(|m| m.iter().map(|&e| e as u32).sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Leading term in lexicographic order (x1 > x2 > ...).
    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Scaled so the lexicographic leading coefficient is 1; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some((_, c)) if !c.is_one() => self.scale(&c.recip()),
            _ => self.clone(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact partial derivative with respect to variable `i`.
    pub fn diff(&self, i: usize) -> Result<Self> {
        if i >= self.nvars {
            return Err(Error::IndexOutOfRange {
                index: i,
                nvars: self.nvars,
            });
        }
        Ok(self.partial(i))
    }

    pub(crate) fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            if m[i] == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2[i] -= 1;
            out.terms.insert(m2, c * rat(m[i] as i64));
        }
        out
    }

    /// Evaluation in any scalar field; fails only when a coefficient does
    /// not reduce (bad prime).
    pub fn evaluate<F: Scalars>(&self, point: &[F::Elem], field: &F) -> Result<F::Elem> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        // Power tables per variable.
        let mut powers: Vec<Vec<F::Elem>> = Vec::with_capacity(self.nvars);
        for (v, x) in point.iter().enumerate() {
            let d = self.degree_in(v) as usize;
            let mut row = Vec::with_capacity(d + 1);
            row.push(field.one());
            for k in 1..=d {
                let next = field.mul(&row[k - 1], x);
                row.push(next);
            }
            powers.push(row);
        }
        let mut acc = field.zero();
        for (m, c) in &self.terms {
            let mut t = field.from_rational(c)?;
            for (v, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = field.mul(&t, &powers[v][e as usize]);
                }
            }
            acc = field.add(&acc, &t);
        }
        Ok(acc)
    }

    pub fn reduce_mod_prime(&self, p: u64) -> Result<ModPoly> {
        let field = PrimeField::new(p)?;
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let v = field.from_rational(c)?;
            if v != 0 {
                terms.insert(m.clone(), v);
            }
        }
        Ok(ModPoly {
            field,
            nvars: self.nvars,
            terms,
        })
    }

    /// Re-home into `nvars` variables, sending variable `i` to `i + offset`.
    pub fn embed(&self, nvars: usize, offset: usize) -> Self {
        assert!(self.nvars + offset <= nvars);
        let terms = self.terms.iter().map(|(m, c)| {
            let mut m2 = vec![0; nvars];
            m2[offset..offset + self.nvars].copy_from_slice(m);
            (m2, c.clone())
        });
        Self {
            nvars,
            terms: terms.collect(),
        }
    }

    /// Substitute `args[i]` for variable `i`.
    pub fn compose(&self, args: &[MultiPoly]) -> Self {
        assert_eq!(args.len(), self.nvars);
        let target = args.first().map(|a| a.nvars).unwrap_or(0);
        let mut cache: Vec<Vec<MultiPoly>> = args.iter().map(|a| vec![MultiPoly::one(a.nvars)]).collect();
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(target, c.clone());
            for (v, &e) in m.iter().enumerate() {
                let e = e as usize;
                while cache[v].len() <= e {
                    let next = &cache[v][cache[v].len() - 1] * &args[v];
                    cache[v].push(next);
                }
                if e > 0 {
                    t = &t * &cache[v][e];
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Componentwise minimum of exponent vectors (the largest monomial divisor).
    pub fn min_exponents(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return vec![0; self.nvars];
        };
        let mut acc = first.clone();
        for m in it {
            for (a, &e) in acc.iter_mut().zip(m) {
                *a = (*a).min(e);
            }
        }
        acc
    }

    pub fn div_monomial(&self, d: &[u16]) -> Self {
        let terms = self.terms.iter().map(|(m, c)| {
            let m2: Monomial = m.iter().zip(d).map(|(&a, &b)| a - b).collect();
            (m2, c.clone())
        });
        Self {
            nvars: self.nvars,
            terms: terms.collect(),
        }
    }

    pub fn mul_monomial(&self, d: &[u16]) -> Self {
        let terms = self.terms.iter().map(|(m, c)| {
            let m2: Monomial = m.iter().zip(d).map(|(&a, &b)| a + b).collect();
            (m2, c.clone())
        });
        Self {
            nvars: self.nvars,
            terms: terms.collect(),
        }
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &MultiPoly) -> Option<MultiPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Self::zero(self.nvars));
        }
        if d.is_constant() {
            return Some(self.scale(&d.constant_term().recip()));
        }
        let (lm, lc) = d.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        // Quick degree rejections.
        for v in 0..self.nvars {
            if d.degree_in(v) > self.degree_in(v) {
                return None;
            }
        }
        let mut rem = self.terms.clone();
        let mut quot = BTreeMap::new();
        while let Some((rm, rc)) = rem.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            if rm.iter().zip(&lm).any(|(a, b)| a < b) {
                return None;
            }
            let qm: Monomial = rm.iter().zip(&lm).map(|(a, b)| a - b).collect();
            let qc = &rc / &lc;
            for (dm, dc) in &d.terms {
                let m: Monomial = qm.iter().zip(dm).map(|(a, b)| a + b).collect();
                let t = &qc * dc;
                match rem.entry(m) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(-t);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() -= t;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                }
            }
            quot.insert(qm, qc);
        }
        let quot = Self {
            nvars: self.nvars,
            terms: quot,
        };
        Some(quot)
    }

    /// Coefficients with respect to variable `v`: `self = sum_k out[k] * x_v^k`.
    pub fn coefficients_in(&self, v: usize) -> Vec<MultiPoly> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![MultiPoly::zero(self.nvars); deg + 1];
        for (m, c) in &self.terms {
            let k = m[v] as usize;
            let mut m2 = m.clone();
            m2[v] = 0;
            out[k].terms.insert(m2, c.clone());
        }
        out
    }

    pub fn check_size(&self) -> Result<()> {
        let bound = max_terms();
        if self.terms.len() > bound {
            return Err(Error::TermBound {
                terms: self.terms.len(),
                bound,
            });
        }
        Ok(())
    }

    /// Renders with the given variable names in a form the parser accepts.
    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

pub fn default_names(nvars: usize) -> Vec<String> {
    (1..=nvars).map(|i| format!("x{i}")).collect()
}

pub struct PolyDisplay<'a> {
    poly: &'a MultiPoly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        // Graded order, highest degree first, lex within a degree.
        let mut terms: Vec<_> = self.poly.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().map(|&e| e as u32).sum();
            let db: u32 = b.iter().map(|&e| e as u32).sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (idx, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let is_const = m.iter().all(|&e| e == 0);
            let mut first = true;
            if !abs.is_one() || is_const {
                write!(f, "{}", abs)?;
                first = false;
            }
            for (v, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write!(f, "{}", self.names[v])?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.nvars);
        write!(f, "{}", self.display(&names))
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let (big, small) = if self.terms.len() >= rhs.terms.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.nvars, rhs.nvars);
        if self.is_zero() || rhs.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        let mut out = MultiPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $f(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $f(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$f(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

/// A polynomial reduced modulo a prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPoly {
    field: PrimeField,
    nvars: usize,
    terms: BTreeMap<Monomial, u64>,
}

impl ModPoly {
    pub fn prime(&self) -> u64 {
        self.field.modulus()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &u64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &[u16]) -> u64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: u64) {
        let f = self.field;
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                if c != 0 {
                    e.insert(c);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = f.add(e.get(), &c);
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add(&self, other: &ModPoly) -> ModPoly {
        assert_eq!(self.field, other.field);
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn mul(&self, other: &ModPoly) -> ModPoly {
        assert_eq!(self.field, other.field);
        let mut out = ModPoly {
            field: self.field,
            nvars: self.nvars,
            terms: BTreeMap::new(),
        };
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, self.field.mul(ca, cb));
            }
        }
        out
    }

    pub fn evaluate(&self, point: &[u64]) -> u64 {
        let f = self.field;
        self.terms.iter().fold(0, |acc, (m, c)| {
            let t = m
                .iter()
                .zip(point)
                .fold(*c, |t, (&e, &x)| f.mul(&t, &f.pow(x, e as u64)));
            f.add(&acc, &t)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> MultiPoly {
        MultiPoly::var(3, i)
    }

    #[test]
    fn derivative_of_monomial() {
        // d/dx1 (x1^2 x2) = 2 x1 x2
        let p = &(&x(0) * &x(0)) * &x(1);
        let d = p.diff(0).unwrap();
        assert_eq!(d, (&x(0) * &x(1)).scale(&rat(2)));
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        assert!(MultiPoly::from_int(3, 7).diff(1).unwrap().is_zero());
    }

    #[test]
    fn derivative_index_out_of_range() {
        assert!(matches!(
            x(0).diff(3),
            Err(Error::IndexOutOfRange { index: 3, nvars: 3 })
        ));
    }

    #[test]
    fn exact_division() {
        let a = &x(0) - &x(1);
        let b = &x(0) + &x(1);
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert!(prod.div_exact(&x(2)).is_none());
    }

    #[test]
    fn evaluate_mod_prime() {
        let p = MultiPoly::var(1, 0).pow(2);
        let f = PrimeField::new(101).unwrap();
        assert_eq!(p.evaluate(&[5], &f).unwrap(), 25);
    }

    #[test]
    fn compose_substitutes() {
        // (x1 + x2)^2 at (x2, x3) -> (x2 + x3)^2
        let p = (&x(0) + &x(1)).pow(2);
        let q = p.compose(&[x(1), x(2), x(0)]);
        assert_eq!(q, (&x(1) + &x(2)).pow(2));
    }

    #[test]
    fn display_is_grammatical() {
        let p = &x(0).pow(2).scale(&BigRational::new(3.into(), 2.into())) - &MultiPoly::from_int(3, 1);
        assert_eq!(p.to_string(), "3/2*x1^2 - 1");
    }

    #[test]
    fn half_x_mod_seven() {
        let p = x(0).scale(&BigRational::new(1.into(), 2.into()));
        let r = p.reduce_mod_prime(7).unwrap();
        assert_eq!(r.coeff(&[1, 0, 0]), 4);
        let bad = x(0).scale(&BigRational::new(1.into(), 3.into()));
        assert!(matches!(bad.reduce_mod_prime(3), Err(Error::BadPrime(3))));
    }
}
