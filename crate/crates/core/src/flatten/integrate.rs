//! Potentials of closed rational 1-forms.
//!
//! A closed form `α = Σ α_j dx_j` is integrated symbolically with the
//! ansatz `h = N/D + Σ q_i log P_i`, where the `P_i` are the coprime
//! denominator factors of `α` with multiplicities `e_i`,
//! `D = Π P_i^{e_i - 1}` and `N` is a polynomial of bounded degree.
//! Clearing denominators makes `dh = α` a linear system over the rationals
//! in the coefficients of `N` and the `q_i`. When it has no solution the
//! form is integrated numerically along coordinate-axis polylines.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcfield::{denominator_base, rational_to_f64, BigRational, Monomial, MultiPoly, RatFunc, Rationals, Reals};
use crate::linalg::solve_in_span;

/// Largest number of unknowns in the symbolic ansatz.
pub const MAX_ANSATZ: usize = 3000;

/// `coeff * log(factor / factor(base))`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogTerm {
    pub coeff: BigRational,
    pub factor: MultiPoly,
    pub base_value: BigRational,
}

/// `h = rational + Σ logs`, vanishing at the base point.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    pub rational: RatFunc,
    pub logs: Vec<LogTerm>,
}

impl Potential {
    pub fn zero(nvars: usize) -> Self {
        Self {
            rational: RatFunc::zero(nvars),
            logs: Vec::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.rational.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.logs.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.logs.is_empty()
    }

    pub fn gradient(&self) -> Vec<RatFunc> {
        let n = self.nvars();
        (0..n)
            .map(|j| {
                let mut g = self.rational.partial(j);
                for t in &self.logs {
                    let dp = t.factor.partial(j);
                    if dp.is_zero() {
                        continue;
                    }
                    let p = RatFunc::from_poly(t.factor.clone());
                    let q = &RatFunc::from_poly(dp) / &p;
                    g = &g + &q.scale(&t.coeff);
                }
                g
            })
            .collect()
    }

    /// Fails outside the connected region where every `P_i / P_i(base)`
    /// stays positive.
    pub fn evaluate_f64(&self, x: &[f64]) -> Result<f64> {
        let mut h = self.rational.evaluate(x, &Reals::default())?;
        for t in &self.logs {
            let r = t.factor.evaluate(x, &Reals::default())? / rational_to_f64(&t.base_value);
            if r <= 0.0 || !r.is_finite() {
                return Err(Error::Pole);
            }
            h += rational_to_f64(&t.coeff) * r.ln();
        }
        Ok(h)
    }

    /// `e^{-h}` when it is rational: no rational part and integer log
    /// coefficients.
    pub fn exp_neg(&self) -> Option<RatFunc> {
        if !self.rational.is_zero() {
            return None;
        }
        let n = self.nvars();
        let mut f = RatFunc::one(n);
        for t in &self.logs {
            if !t.coeff.is_integer() {
                return None;
            }
            let k = t.coeff.to_integer().to_i64()?;
            let e = u32::try_from(k.unsigned_abs()).ok()?;
            let p = RatFunc::from_poly(t.factor.scale(&t.base_value.recip()));
            let pe = p.pow(e);
            f = if k > 0 { &f / &pe } else { &f * &pe };
        }
        Some(f)
    }

    /// Printable summands.
    pub fn terms(&self, names: &[String]) -> Vec<String> {
        let mut out = Vec::new();
        if !self.rational.is_zero() {
            out.push(self.rational.display(names).to_string());
        }
        for t in &self.logs {
            out.push(format!(
                "{}*log(({})/({}))",
                t.coeff,
                t.factor.display(names),
                t.base_value
            ));
        }
        out
    }

    pub fn display(&self, names: &[String]) -> String {
        let t = self.terms(names);
        if t.is_empty() {
            "0".into()
        } else {
            t.join(" + ")
        }
    }

    /// `e^{-h}` as a printable product.
    pub fn display_exp_neg(&self, names: &[String]) -> String {
        let mut parts = Vec::new();
        if !self.rational.is_zero() {
            parts.push(format!("exp(-({}))", self.rational.display(names)));
        }
        for t in &self.logs {
            parts.push(format!(
                "(({})/({}))^({})",
                t.factor.display(names),
                t.base_value,
                -&t.coeff
            ));
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

fn monomials_up_to(nvars: usize, deg: u32) -> Vec<Monomial> {
    let mut out = vec![vec![0u16; nvars]];
    let mut frontier = out.clone();
    for _ in 0..deg {
        let mut next = Vec::new();
        for m in &frontier {
            let last = m.iter().rposition(|&e| e > 0).unwrap_or(0);
            for v in last..nvars {
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

fn is_closed(form: &[RatFunc]) -> bool {
    let n = form.len();
    (0..n).all(|i| (0..i).all(|j| form[j].partial(i) == form[i].partial(j)))
}

/// Symbolic potential of the closed form `form` vanishing at `base`, or
/// `None` when the ansatz has no solution.
pub fn antiderivative(form: &[RatFunc], base: &[BigRational]) -> Result<Option<Potential>> {
    let n = form.len();
    if form.iter().all(RatFunc::is_zero) {
        return Ok(Some(Potential::zero(n)));
    }
    if !is_closed(form) {
        return Err(Error::Internal("integrand is not a closed form".into()));
    }
    let refs: Vec<&RatFunc> = form.iter().collect();
    let base_factors = denominator_base(&refs);
    let one = MultiPoly::one(n);
    let mut s = one.clone();
    let mut d = one.clone();
    let mut l = one.clone();
    for (p, e) in &base_factors {
        s = &s * p;
        d = &d * &p.pow(e - 1);
        l = &l * &p.pow(*e);
    }
    let lr = RatFunc::from_poly(l.clone());
    let mut targets = Vec::with_capacity(n);
    for a in form {
        let t = &lr * a;
        if !t.is_polynomial() {
            return Ok(None);
        }
        targets.push(t.numer().clone());
    }
    let excess = targets
        .iter()
        .filter(|t| !t.is_zero())
        .map(|t| t.total_degree() as i64 - l.total_degree() as i64)
        .max()
        .unwrap_or(0);
    let bound = (d.total_degree() as i64 + excess + 2).max(0) as u32;
    let monos = monomials_up_to(n, bound);
    if monos.len() + base_factors.len() > MAX_ANSATZ {
        return Ok(None);
    }
    // Σ_i (e_i - 1) (S / P_i) ∂_j P_i, and (L / P_i) ∂_j P_i.
    let s_over: Vec<MultiPoly> = base_factors
        .iter()
        .map(|(p, _)| s.div_exact(p).expect("factor divides"))
        .collect();
    let l_over: Vec<MultiPoly> = base_factors
        .iter()
        .map(|(p, _)| l.div_exact(p).expect("factor divides"))
        .collect();
    let t_j: Vec<MultiPoly> = (0..n)
        .map(|j| {
            let mut acc = MultiPoly::zero(n);
            for (k, (p, e)) in base_factors.iter().enumerate() {
                if *e > 1 {
                    let c = BigRational::from_integer((*e - 1).into());
                    acc = &acc + &(&s_over[k] * &p.partial(j)).scale(&c);
                }
            }
            acc
        })
        .collect();
    let mut columns: Vec<Vec<MultiPoly>> = Vec::with_capacity(monos.len() + base_factors.len());
    for m in &monos {
        let mp = MultiPoly::monomial(m.clone(), BigRational::one());
        columns.push(
            (0..n)
                .map(|j| &(&s * &mp.partial(j)) - &(&mp * &t_j[j]))
                .collect(),
        );
    }
    for (k, (p, _)) in base_factors.iter().enumerate() {
        columns.push((0..n).map(|j| &l_over[k] * &p.partial(j)).collect());
    }
    let mut index: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
    for polys in columns.iter().chain(std::iter::once(&targets)) {
        for (j, p) in polys.iter().enumerate() {
            for (m, _) in p.terms() {
                let len = index.len();
                index.entry((j, m.clone())).or_insert(len);
            }
        }
    }
    let flatten = |polys: &[MultiPoly]| {
        let mut v = vec![BigRational::zero(); index.len()];
        for (j, p) in polys.iter().enumerate() {
            for (m, c) in p.terms() {
                v[index[&(j, m.clone())]] = c.clone();
            }
        }
        v
    };
    let basis: Vec<Vec<BigRational>> = columns.iter().map(|c| flatten(c)).collect();
    let target = flatten(&targets);
    let Some(coeffs) = solve_in_span(&Rationals, &basis, &target) else {
        return Ok(None);
    };
    let num = MultiPoly::from_terms(n, monos.iter().cloned().zip(coeffs.iter().cloned()));
    let mut rational = RatFunc::from_poly(num);
    for (p, e) in &base_factors {
        if *e > 1 {
            let inv = RatFunc::from_poly(p.clone()).recip()?;
            rational = &rational * &inv.pow(e - 1);
        }
    }
    let r0 = rational.evaluate(base, &Rationals)?;
    rational = &rational - &RatFunc::constant(n, r0);
    let mut logs = Vec::new();
    for (k, (p, _)) in base_factors.iter().enumerate() {
        let q = &coeffs[monos.len() + k];
        if q.is_zero() {
            continue;
        }
        let base_value = p.evaluate(base, &Rationals)?;
        if base_value.is_zero() {
            return Err(Error::Pole);
        }
        logs.push(LogTerm {
            coeff: q.clone(),
            factor: p.clone(),
            base_value,
        });
    }
    let h = Potential { rational, logs };
    let ok = h.gradient().iter().zip(form).all(|(a, b)| a == b);
    Ok(ok.then_some(h))
}

/// Numerical potential of a closed form by path integration from `base`.
#[derive(Clone, Debug)]
pub struct PathIntegrator {
    form: Vec<RatFunc>,
    base: Vec<f64>,
    tol: f64,
}

/// Value of a path integral and the disagreement of a second path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PathValue {
    pub value: f64,
    /// `|I_1 - I_2|`; `None` when only one admissible path was found.
    pub path_discrepancy: Option<f64>,
}

/// Axis orders tried in turn: the identity, its reverse, then rotations.
fn axis_orders(n: usize) -> Vec<Vec<usize>> {
    let id: Vec<usize> = (0..n).collect();
    let mut out = vec![id.clone(), id.iter().rev().copied().collect()];
    for r in 1..n {
        let rot: Vec<usize> = (0..n).map(|i| (i + r) % n).collect();
        if !out.contains(&rot) {
            out.push(rot);
        }
    }
    out
}

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &mut dyn FnMut(f64) -> Result<f64>, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn rec(
        f: &mut dyn FnMut(f64) -> Result<f64>,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm)?;
        let frm = f(rm)?;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        Ok(rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
            + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
    }
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

impl PathIntegrator {
    pub fn new(form: Vec<RatFunc>, base: &[BigRational], tol: f64) -> Self {
        Self {
            form,
            base: base.iter().map(rational_to_f64).collect(),
            tol,
        }
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Rejects segments along which a denominator factor changes sign or
    /// comes close to zero.
    fn segment_clear(&self, c: usize, start: &[f64], a: f64, b: f64) -> bool {
        const PROBES: usize = 64;
        let mut pt = start.to_vec();
        for r in &self.form {
            for (p, _) in r.denom_factors() {
                let mut prev: Option<f64> = None;
                let mut scale: f64 = 0.0;
                let mut vals = Vec::with_capacity(PROBES + 1);
                for s in 0..=PROBES {
                    pt[c] = a + (b - a) * s as f64 / PROBES as f64;
                    let Ok(v) = p.evaluate(&pt, &Reals::default()) else {
                        return false;
                    };
                    scale = scale.max(v.abs());
                    vals.push(v);
                }
                for v in vals {
                    if let Some(w) = prev {
                        if v.signum() != w.signum() {
                            return false;
                        }
                    }
                    if v.abs() <= 1e-9 * scale.max(1.0) {
                        return false;
                    }
                    prev = Some(v);
                }
            }
        }
        true
    }

    fn along(&self, x: &[f64], order: &[usize]) -> Result<f64> {
        let mut cur = self.base.clone();
        let mut total = 0.0;
        let seg_tol = self.tol / order.len() as f64;
        for &c in order {
            let (a, b) = (cur[c], x[c]);
            if a != b {
                if !self.segment_clear(c, &cur, a, b) {
                    return Err(Error::Pole);
                }
                if !self.form[c].is_zero() {
                    let mut pt = cur.clone();
                    let comp = &self.form[c];
                    let mut g = |t: f64| {
                        pt[c] = t;
                        comp.evaluate(&pt, &Reals::default())
                    };
                    total += adaptive_simpson(&mut g, a, b, seg_tol)?;
                }
            }
            cur[c] = b;
        }
        Ok(total)
    }

    /// Integral from the base point to `x`, cross-checked on a second
    /// admissible path.
    pub fn value(&self, x: &[f64]) -> Result<PathValue> {
        let mut found = Vec::new();
        for order in axis_orders(x.len()) {
            if let Ok(v) = self.along(x, &order) {
                found.push(v);
                if found.len() == 2 {
                    break;
                }
            }
        }
        match found.as_slice() {
            [] => Err(Error::NoAdmissiblePath(format!("{x:?}"))),
            [v] => Ok(PathValue {
                value: *v,
                path_discrepancy: None,
            }),
            [v, w, ..] => Ok(PathValue {
                value: *v,
                path_discrepancy: Some((v - w).abs()),
            }),
        }
    }
}

/// Path integral of `e^{-h} θ` along the axis polyline in `order`, where
/// `dh = α`: the state `(h, ∫ e^{-h} θ)` is advanced by classical
/// Runge-Kutta with step doubling.
pub fn weighted_path_integral(
    alpha: &[RatFunc],
    theta: &[Vec<RatFunc>],
    base: &[f64],
    x: &[f64],
    order: &[usize],
    tol: f64,
) -> Result<Vec<f64>> {
    let k = theta.len();
    let mut cur = base.to_vec();
    let mut state = vec![0.0; k + 1];
    let reals = Reals::default();
    for &c in order {
        let (a, b) = (cur[c], x[c]);
        if a == b {
            continue;
        }
        let rhs = |t: f64, s: &[f64], pt: &mut Vec<f64>| -> Result<Vec<f64>> {
            pt[c] = t;
            let w = (-s[0]).exp();
            let mut out = Vec::with_capacity(k + 1);
            out.push(alpha[c].evaluate(pt, &reals)?);
            for row in theta {
                out.push(w * row[c].evaluate(pt, &reals)?);
            }
            Ok(out)
        };
        let mut pt = cur.clone();
        let step = |t: f64, h: f64, s: &[f64], pt: &mut Vec<f64>| -> Result<Vec<f64>> {
            let k1 = rhs(t, s, pt)?;
            let y2: Vec<f64> = s.iter().zip(&k1).map(|(y, d)| y + 0.5 * h * d).collect();
            let k2 = rhs(t + 0.5 * h, &y2, pt)?;
            let y3: Vec<f64> = s.iter().zip(&k2).map(|(y, d)| y + 0.5 * h * d).collect();
            let k3 = rhs(t + 0.5 * h, &y3, pt)?;
            let y4: Vec<f64> = s.iter().zip(&k3).map(|(y, d)| y + h * d).collect();
            let k4 = rhs(t + h, &y4, pt)?;
            Ok((0..s.len())
                .map(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect())
        };
        let len = b - a;
        let mut t = a;
        let mut h = len / 16.0;
        let mut guard = 0;
        while (b - t).abs() > 1e-15 * len.abs().max(1.0) {
            guard += 1;
            if guard > 200_000 {
                return Err(Error::NoAdmissiblePath("step size collapsed".into()));
            }
            if (t + h - b) * len.signum() > 0.0 {
                h = b - t;
            }
            let full = step(t, h, &state, &mut pt)?;
            let half = step(t, h / 2.0, &state, &mut pt)?;
            let two = step(t + h / 2.0, h / 2.0, &half, &mut pt)?;
            let err = full
                .iter()
                .zip(&two)
                .map(|(p, q)| (p - q).abs())
                .fold(0.0, f64::max);
            let local = tol * (h / len).abs();
            if err <= local.max(1e-300) || h.abs() < 1e-12 * len.abs() {
                state = two.iter().zip(&full).map(|(q, p)| q + (q - p) / 15.0).collect();
                t += h;
                if err < local / 32.0 {
                    h *= 2.0;
                }
            } else {
                h /= 2.0;
            }
        }
        cur[c] = b;
    }
    Ok(state)
}

/// `|c|` as a float, for reporting.
pub fn magnitude(c: &BigRational) -> f64 {
    rational_to_f64(&c.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcfield::parse_ratfunc;

    fn r(s: &str) -> RatFunc {
        parse_ratfunc(s, &["x1", "x2", "x3"]).unwrap()
    }

    fn origin() -> Vec<BigRational> {
        vec![BigRational::zero(); 3]
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(monomials_up_to(3, 2).len(), 10);
        assert_eq!(monomials_up_to(2, 0).len(), 1);
    }

    #[test]
    fn logarithmic_potential() {
        let form = vec![r("1/(1-x1)"), r("0"), r("0")];
        let h = antiderivative(&form, &origin()).unwrap().unwrap();
        assert!(h.rational.is_zero());
        assert_eq!(h.logs.len(), 1);
        assert_eq!(h.logs[0].coeff, BigRational::from_integer((-1).into()));
        assert_eq!(h.exp_neg().unwrap(), r("1-x1"));
    }

    #[test]
    fn rational_and_mixed_potentials() {
        let form = vec![r("2*x1*x2"), r("x1^2 + 1"), r("0")];
        let h = antiderivative(&form, &origin()).unwrap().unwrap();
        assert_eq!(h.rational, r("x1^2*x2 + x2"));
        let form = vec![r("1/(1+x1)^2 + 3/(1+x1)"), r("1/(2+x2)"), r("0")];
        let h = antiderivative(&form, &origin()).unwrap().unwrap();
        assert_eq!(h.gradient(), form);
        assert_eq!(h.logs.len(), 2);
        assert!(h.exp_neg().is_none());
        let x = [0.3, -0.4, 0.0];
        let expect = (1.0 - 1.0 / 1.3) + 3.0 * 1.3f64.ln() + (1.6f64 / 2.0).ln();
        assert!((h.evaluate_f64(&x).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn non_closed_form_is_internal_error() {
        let form = vec![r("x2"), r("0"), r("0")];
        assert!(matches!(antiderivative(&form, &origin()), Err(Error::Internal(_))));
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let form = vec![r("1/(1-x1)"), r("x3"), r("x2")];
        let q = PathIntegrator::new(form, &origin(), 1e-10);
        let v = q.value(&[0.5, 0.25, 2.0]).unwrap();
        let expect = -(0.5f64).ln() + 0.5;
        assert!((v.value - expect).abs() < 1e-9);
        assert!(v.path_discrepancy.unwrap() < 1e-9);
        assert!(q.value(&[2.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn weighted_integral_of_rescaled_model() {
        // α = dx1/(1-x1), θ = dx/(1-x1): e^{-h} θ = dx.
        let alpha = vec![r("1/(1-x1)"), r("0"), r("0")];
        let s = r("1/(1-x1)");
        let z = r("0");
        let theta = vec![
            vec![s.clone(), z.clone(), z.clone()],
            vec![z.clone(), s.clone(), z.clone()],
            vec![z.clone(), z.clone(), s.clone()],
        ];
        let out = weighted_path_integral(&alpha, &theta, &[0.0; 3], &[0.5, -0.3, 0.2], &[0, 1, 2], 1e-10).unwrap();
        assert!((out[0] + (0.5f64).ln()).abs() < 1e-9);
        for (a, b) in out[1..].iter().zip([0.5, -0.3, 0.2]) {
            assert!((a - b).abs() < 1e-9, "{a} {b}");
        }
    }
}
