//! Rational functions over the rationals.
//!
//! The denominator is kept factored as `Π f_i^{e_i}` over monic,
//! pairwise coprime polynomials. Sums and products merge the factor lists
//! into a common coprime base, so cancellation reduces to trial division by
//! known factors; a general multivariate gcd runs only when a new
//! denominator is created from a numerator (`new`, `recip`) or when two
//! distinct factors share a component.
//!
//! Parsed and constructed values are fully reduced. After arithmetic the
//! numerator is coprime to every base factor it is not divisible by;
//! equality never relies on the representation being unique.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::field::Scalars;
use super::gcd::{gcd, may_divide};
use super::poly::{default_names, MultiPoly};
use crate::error::{Error, Result};

type Factors = Vec<(MultiPoly, u32)>;

#[derive(Clone)]
pub struct RatFunc {
    num: MultiPoly,
    factors: Factors,
    den: OnceLock<MultiPoly>,
}

fn poly_cmp(a: &MultiPoly, b: &MultiPoly) -> Ordering {
    a.total_degree()
        .cmp(&b.total_degree())
        .then(a.num_terms().cmp(&b.num_terms()))
        .then_with(|| a.terms().cmp(b.terms()))
}

fn poly_hash(p: &MultiPoly) -> u64 {
    let mut h = DefaultHasher::new();
    p.hash(&mut h);
    h.finish()
}

thread_local! {
    static COPRIME: RefCell<HashSet<(u64, u64)>> = RefCell::new(HashSet::new());
}

/// gcd of two monic factors, remembering pairs already found coprime.
fn factor_gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let (ha, hb) = (poly_hash(a), poly_hash(b));
    let key = if ha <= hb { (ha, hb) } else { (hb, ha) };
    if COPRIME.with(|c| c.borrow().contains(&key)) {
        return MultiPoly::one(a.nvars());
    }
    let g = gcd(a, b);
    if g.is_constant() {
        COPRIME.with(|c| {
            let mut c = c.borrow_mut();
            if c.len() > 100_000 {
                c.clear();
            }
            c.insert(key);
        });
    }
    g
}

/// Insert `extra` into the pairwise coprime `base`, splitting entries that
/// share a factor. Exponent vectors add under merging, so each entry records
/// the exact multiplicity of that base factor in every operand.
/// Returns true if any split happened.
fn coprime_base(base: &mut Vec<(MultiPoly, Vec<u32>)>, extra: Vec<(MultiPoly, Vec<u32>)>) -> bool {
    let mut split = false;
    let mut work = extra;
    'outer: while let Some((p, e)) = work.pop() {
        if p.is_constant() || e.iter().all(|&x| x == 0) {
            continue;
        }
        for idx in 0..base.len() {
            if base[idx].0 == p {
                for (x, y) in base[idx].1.iter_mut().zip(&e) {
                    *x += y;
                }
                continue 'outer;
            }
        }
        for idx in 0..base.len() {
            let g = factor_gcd(&base[idx].0, &p);
            if g.is_constant() {
                continue;
            }
            split = true;
            let (b, eb) = base.swap_remove(idx);
            let bq = b.div_exact(&g).expect("gcd divides").monic();
            let pq = p.div_exact(&g).expect("gcd divides").monic();
            let both: Vec<u32> = eb.iter().zip(&e).map(|(x, y)| x + y).collect();
            work.push((g, both));
            work.push((bq, eb));
            work.push((pq, e));
            continue 'outer;
        }
        base.push((p, e));
    }
    split
}

/// Squarefree, coprime pieces of a monic polynomial without monomial factor.
fn squarefree(p: &MultiPoly) -> Factors {
    for v in 0..p.nvars() {
        if !p.depends_on(v) {
            continue;
        }
        let g = gcd(p, &p.partial(v));
        if g.is_constant() {
            continue;
        }
        let q = p.div_exact(&g).expect("gcd divides").monic();
        let mut base: Vec<(MultiPoly, Vec<u32>)> = Vec::new();
        let pieces: Vec<(MultiPoly, Vec<u32>)> = squarefree(&g)
            .into_iter()
            .chain(squarefree(&q))
            .map(|(f, e)| (f, vec![e]))
            .collect();
        coprime_base(&mut base, pieces);
        return base.into_iter().map(|(f, e)| (f, e[0])).collect();
    }
    vec![(p.clone(), 1)]
}

/// `p = c * Π f^e` with monic, coprime, nonconstant `f`.
fn factor_denominator(p: &MultiPoly) -> (BigRational, Factors) {
    let n = p.nvars();
    let m = p.min_exponents();
    let rest = p.div_monomial(&m);
    let mut out: Factors = Vec::new();
    for (v, &e) in m.iter().enumerate() {
        if e > 0 {
            out.push((MultiPoly::var(n, v), e as u32));
        }
    }
    let c = rest.leading().map(|(_, c)| c.clone()).expect("nonzero");
    if !rest.is_constant() {
        out.extend(squarefree(&rest.monic()));
    }
    (c, out)
}

/// Divide out base factors from `num` while they divide it.
fn cancel(mut num: MultiPoly, base: &mut [(MultiPoly, u32)]) -> MultiPoly {
    if num.is_zero() {
        return num;
    }
    for (f, e) in base.iter_mut() {
        while *e > 0 && may_divide(f, &num) {
            match num.div_exact(f) {
                Some(q) => {
                    num = q;
                    *e -= 1;
                }
                None => break,
            }
        }
    }
    num
}

fn product(factors: &[(MultiPoly, u32)], nvars: usize) -> MultiPoly {
    let mut acc = MultiPoly::one(nvars);
    for (f, e) in factors {
        acc = &acc * &f.pow(*e);
    }
    acc
}

/// Common coprime base of several denominators, with per-operand exponents.
fn merge<'a>(operands: impl IntoIterator<Item = &'a Factors>, k: usize) -> (Vec<(MultiPoly, Vec<u32>)>, bool) {
    let mut base: Vec<(MultiPoly, Vec<u32>)> = Vec::new();
    let mut split = false;
    for (i, fs) in operands.into_iter().enumerate() {
        let items = fs
            .iter()
            .map(|(f, e)| {
                let mut v = vec![0; k];
                v[i] = *e;
                (f.clone(), v)
            })
            .collect();
        if i == 0 {
            base = items;
        } else {
            split |= coprime_base(&mut base, items);
        }
    }
    (base, split)
}

impl RatFunc {
    fn build(num: MultiPoly, mut factors: Factors) -> Self {
        if num.is_zero() {
            return Self::zero(num.nvars());
        }
        factors.retain(|(_, e)| *e > 0);
        factors.sort_by(|a, b| poly_cmp(&a.0, &b.0));
        Self {
            num,
            factors,
            den: OnceLock::new(),
        }
    }

    /// Reduced quotient; errors if `den` is the zero polynomial.
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Pole);
        }
        if num.is_zero() {
            return Ok(Self::zero(num.nvars()));
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let (c, fs) = factor_denominator(&den);
        Ok(Self::build(num.scale(&c.recip()), fs))
    }

    pub fn zero(nvars: usize) -> Self {
        Self::from_poly(MultiPoly::zero(nvars))
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_poly(MultiPoly::one(nvars))
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        Self {
            num: p,
            factors: Vec::new(),
            den: OnceLock::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        Self::from_poly(MultiPoly::constant(nvars, c))
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::from_poly(MultiPoly::from_int(nvars, c))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::from_poly(MultiPoly::var(nvars, i))
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn numer(&self) -> &MultiPoly {
        &self.num
    }

    /// The expanded (monic) denominator.
    pub fn denom(&self) -> &MultiPoly {
        self.den.get_or_init(|| product(&self.factors, self.nvars()))
    }

    /// Denominator factors `(f, e)`: monic, pairwise coprime, nonconstant.
    pub fn denom_factors(&self) -> &[(MultiPoly, u32)] {
        &self.factors
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.factors.is_empty() && self.num.is_constant()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        self.is_constant().then(|| self.num.constant_term())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars());
        }
        Self {
            num: self.num.scale(c),
            factors: self.factors.clone(),
            den: self.den.clone(),
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Pole);
        }
        let (c, fs) = factor_denominator(&self.num);
        Ok(Self::build(self.denom().scale(&c.recip()), fs))
    }

    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            return Self::one(self.nvars());
        }
        Self::build(
            self.num.pow(e),
            self.factors.iter().map(|(f, k)| (f.clone(), k * e)).collect(),
        )
    }

    /// Exact partial derivative by the quotient rule.
    pub fn diff(&self, i: usize) -> Result<Self> {
        if i >= self.nvars() {
            return Err(Error::IndexOutOfRange {
                index: i,
                nvars: self.nvars(),
            });
        }
        Ok(self.partial(i))
    }

    pub(crate) fn partial(&self, i: usize) -> Self {
        let n = self.nvars();
        let dn = self.num.partial(i);
        if self.factors.is_empty() {
            return Self::from_poly(dn);
        }
        let active: Vec<usize> = (0..self.factors.len())
            .filter(|&k| self.factors[k].0.depends_on(i))
            .collect();
        let mut fs = self.factors.clone();
        if active.is_empty() {
            let num = cancel(dn, &mut fs);
            return Self::build(num, fs);
        }
        // N/Π f^e differentiates to (N' Π f - N Σ e_f f' Π_{g≠f} g) / Π f^{e+1},
        // the products running over the factors that depend on x_i.
        let mut prod = MultiPoly::one(n);
        for &k in &active {
            prod = &prod * &self.factors[k].0;
        }
        let mut top = &dn * &prod;
        for &k in &active {
            let (f, e) = &self.factors[k];
            let mut t = f.partial(i).scale(&BigRational::from_integer((*e).into()));
            for &l in &active {
                if l != k {
                    t = &t * &self.factors[l].0;
                }
            }
            top = &top - &(&self.num * &t);
        }
        for &k in &active {
            fs[k].1 += 1;
        }
        let num = cancel(top, &mut fs);
        Self::build(num, fs)
    }

    /// Evaluation in a scalar field; `Error::Pole` if the denominator vanishes.
    pub fn evaluate<F: Scalars>(&self, point: &[F::Elem], field: &F) -> Result<F::Elem> {
        let mut d = field.one();
        for (f, e) in &self.factors {
            let v = f.evaluate(point, field)?;
            if field.is_zero(&v) {
                return Err(Error::Pole);
            }
            for _ in 0..*e {
                d = field.mul(&d, &v);
            }
        }
        let inv = field.inv(&d).ok_or(Error::Pole)?;
        let n = self.num.evaluate(point, field)?;
        Ok(field.mul(&n, &inv))
    }

    pub fn embed(&self, nvars: usize, offset: usize) -> Self {
        Self::build(
            self.num.embed(nvars, offset),
            self.factors
                .iter()
                .map(|(f, e)| (f.embed(nvars, offset), *e))
                .collect(),
        )
    }

    pub fn check_size(&self) -> Result<()> {
        self.num.check_size()?;
        self.denom().check_size()
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> RatDisplay<'a> {
        RatDisplay { r: self, names }
    }
}

/// `p(args)` for a polynomial `p` and rational-function arguments.
/// Arguments are brought over a common denominator first, so the result
/// needs only one cancellation pass.
pub fn compose(p: &MultiPoly, args: &[RatFunc]) -> RatFunc {
    assert_eq!(args.len(), p.nvars());
    let target = args.first().map(|a| a.nvars()).unwrap_or(0);
    if args.iter().all(RatFunc::is_polynomial) {
        let nums: Vec<MultiPoly> = args.iter().map(|a| a.num.clone()).collect();
        return RatFunc::from_poly(p.compose(&nums));
    }
    let k = args.len();
    let (base, _) = merge(args.iter().map(|a| &a.factors), k);
    let lcm: Vec<u32> = base.iter().map(|(_, e)| *e.iter().max().unwrap()).collect();
    let nums: Vec<MultiPoly> = args
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let mut t = a.num.clone();
            for ((f, e), l) in base.iter().zip(&lcm) {
                if l > &e[i] {
                    t = &t * &f.pow(l - e[i]);
                }
            }
            t
        })
        .collect();
    let common_factors: Factors = base.iter().zip(&lcm).map(|((f, _), l)| (f.clone(), *l)).collect();
    let common = product(&common_factors, target);
    // Homogenize each term against the common denominator.
    let d = p.total_degree();
    let mut den_pows = vec![MultiPoly::one(target)];
    for j in 1..=d as usize {
        let next = &den_pows[j - 1] * &common;
        den_pows.push(next);
    }
    let mut num_pows: Vec<Vec<MultiPoly>> = nums.iter().map(|_| vec![MultiPoly::one(target)]).collect();
    let mut total = MultiPoly::zero(target);
    for (m, c) in p.terms() {
        let deg: u32 = m.iter().map(|&e| e as u32).sum();
        let mut t = MultiPoly::constant(target, c.clone());
        for (v, &e) in m.iter().enumerate() {
            let e = e as usize;
            while num_pows[v].len() <= e {
                let next = &num_pows[v][num_pows[v].len() - 1] * &nums[v];
                num_pows[v].push(next);
            }
            if e > 0 {
                t = &t * &num_pows[v][e];
            }
        }
        t = &t * &den_pows[(d - deg) as usize];
        total = &total + &t;
    }
    let mut fs: Factors = common_factors.into_iter().map(|(f, l)| (f, l * d)).collect();
    let num = cancel(total, &mut fs);
    RatFunc::build(num, fs)
}

/// Common coprime base of the denominators of `items`, each factor with
/// its largest multiplicity.
pub fn denominator_base(items: &[&RatFunc]) -> Vec<(MultiPoly, u32)> {
    let (base, _) = merge(items.iter().map(|r| &r.factors), items.len());
    let mut out: Factors = base
        .into_iter()
        .map(|(f, e)| (f, e.into_iter().max().unwrap_or(0)))
        .filter(|(_, e)| *e > 0)
        .collect();
    out.sort_by(|a, b| poly_cmp(&a.0, &b.0));
    out
}

/// Rational functions in a fixed number of variables as a [`Scalars`] field,
/// so constant-tensor algebra can run with function entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RationalFunctions {
    pub nvars: usize,
}

impl Scalars for RationalFunctions {
    type Elem = RatFunc;

    fn zero(&self) -> RatFunc {
        RatFunc::zero(self.nvars)
    }
    fn one(&self) -> RatFunc {
        RatFunc::one(self.nvars)
    }
    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a + b
    }
    fn sub(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a - b
    }
    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a * b
    }
    fn neg(&self, a: &RatFunc) -> RatFunc {
        -a
    }
    fn inv(&self, a: &RatFunc) -> Option<RatFunc> {
        a.recip().ok()
    }
    fn is_zero(&self, a: &RatFunc) -> bool {
        a.is_zero()
    }
    fn from_rational(&self, c: &BigRational) -> Result<RatFunc> {
        Ok(RatFunc::constant(self.nvars, c.clone()))
    }
    fn magnitude(&self, a: &RatFunc) -> f64 {
        if a.is_zero() {
            0.0
        } else {
            1.0
        }
    }
}

pub struct RatDisplay<'a> {
    r: &'a RatFunc,
    names: &'a [String],
}

impl fmt::Display for RatDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.r.num.display(self.names);
        if self.r.is_polynomial() {
            return write!(f, "{num}");
        }
        let den_poly = self.r.denom();
        let den = den_poly.display(self.names);
        let simple_num = self.r.num.num_terms() <= 1 && !num.to_string().starts_with('-');
        let simple_den = den_poly.num_terms() == 1 && {
            let (_, c) = den_poly.leading().unwrap();
            c.is_one()
        };
        match (simple_num, simple_den) {
            (true, true) => write!(f, "{num}/{den}"),
            (true, false) => write!(f, "{num}/({den})"),
            (false, true) => write!(f, "({num})/{den}"),
            (false, false) => write!(f, "({num})/({den})"),
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.nvars());
        write!(f, "{}", self.display(&names))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        if self.factors == other.factors {
            return self.num == other.num;
        }
        (self - other).is_zero()
    }
}

impl Eq for RatFunc {}

impl<'a> Add<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.factors.is_empty() && rhs.factors.is_empty() {
            return RatFunc::from_poly(&self.num + &rhs.num);
        }
        if self.factors == rhs.factors {
            let mut fs = self.factors.clone();
            let num = cancel(&self.num + &rhs.num, &mut fs);
            return RatFunc::build(num, fs);
        }
        let nv = self.nvars();
        let (base, _) = merge([&self.factors, &rhs.factors], 2);
        let mut fa = MultiPoly::one(nv);
        let mut fb = MultiPoly::one(nv);
        let mut fs: Factors = Vec::with_capacity(base.len());
        for (f, e) in &base {
            let l = e[0].max(e[1]);
            if l > e[0] {
                fa = &fa * &f.pow(l - e[0]);
            }
            if l > e[1] {
                fb = &fb * &f.pow(l - e[1]);
            }
            fs.push((f.clone(), l));
        }
        let num = &(&self.num * &fa) + &(&rhs.num * &fb);
        let num = cancel(num, &mut fs);
        RatFunc::build(num, fs)
    }
}

impl<'a> Neg for &'a RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            factors: self.factors.clone(),
            den: self.den.clone(),
        }
    }
}

impl<'a> Sub<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero(self.nvars());
        }
        if self.factors.is_empty() && rhs.factors.is_empty() {
            return RatFunc::from_poly(&self.num * &rhs.num);
        }
        let (base, split) = merge([&self.factors, &rhs.factors], 2);
        let mut fs: Factors = base.iter().map(|(f, e)| (f.clone(), e[0] + e[1])).collect();
        if split {
            // Both numerators draw on one shared budget of exponents.
            let n1 = cancel(self.num.clone(), &mut fs);
            let n2 = cancel(rhs.num.clone(), &mut fs);
            return RatFunc::build(&n1 * &n2, fs);
        }
        // Without splitting, each numerator cancels only factors contributed
        // by the other side.
        let mut from_rhs: Factors = base.iter().map(|(f, e)| (f.clone(), e[1])).collect();
        let mut from_lhs: Factors = base.iter().map(|(f, e)| (f.clone(), e[0])).collect();
        let n1 = cancel(self.num.clone(), &mut from_rhs);
        let n2 = cancel(rhs.num.clone(), &mut from_lhs);
        for (k, (_, e)) in fs.iter_mut().enumerate() {
            *e = from_rhs[k].1 + from_lhs[k].1;
        }
        RatFunc::build(&n1 * &n2, fs)
    }
}

impl<'a> Div<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    /// Panics on division by the zero function; use `recip` to handle it.
    fn div(self, rhs: &RatFunc) -> RatFunc {
        self * &rhs.recip().expect("division by zero rational function")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $f(self, rhs: RatFunc) -> RatFunc {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $f(self, rhs: &RatFunc) -> RatFunc {
                (&self).$f(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl From<MultiPoly> for RatFunc {
    fn from(p: MultiPoly) -> Self {
        Self::from_poly(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcfield::field::Rationals;
    use crate::funcfield::parse::parse_ratfunc;
    use crate::funcfield::poly::rat;

    fn r(s: &str) -> RatFunc {
        parse_ratfunc(s, &["x1", "x2", "x3"]).unwrap()
    }

    #[test]
    fn derivative_of_reciprocal() {
        // d/dx1 1/(1-x1) = 1/(1-x1)^2
        assert_eq!(r("1/(1-x1)").diff(0).unwrap(), r("1/(1-x1)^2"));
    }

    #[test]
    fn cancellation_is_canonical() {
        let a = r("(x1^2 - x2^2)/(x1 - x2)");
        assert!(a.is_polynomial());
        assert_eq!(a.numer(), r("x1 + x2").numer());
    }

    #[test]
    fn addition_with_shared_factor() {
        let s = &r("1/(x1*(1-x2))") + &r("1/(x1*(1+x2))");
        assert_eq!(s, r("2/(x1*(1-x2^2))"));
    }

    #[test]
    fn evaluate_at_pole_errors() {
        let f = r("1/(1-x1)");
        assert_eq!(f.evaluate(&[rat(0), rat(0), rat(0)], &Rationals).unwrap(), rat(1));
        assert!(matches!(
            f.evaluate(&[rat(1), rat(0), rat(0)], &Rationals),
            Err(Error::Pole)
        ));
    }

    #[test]
    fn compose_rescaled_quartic() {
        let f = crate::funcfield::parse::parse_poly("x1^4+x2^4+x3^4", &["x1", "x2", "x3"]).unwrap();
        let s = r("1/(1-x1)");
        let args: Vec<RatFunc> = (0..3).map(|i| &RatFunc::var(3, i) * &s).collect();
        assert_eq!(compose(&f, &args), r("(x1^4+x2^4+x3^4)/(1-x1)^4"));
    }
}
