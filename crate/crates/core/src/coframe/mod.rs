//! Coframes on a rational chart.
//!
//! A coframe is stored as its coefficient matrix: `ω^k = Σ_j A[k][j] dx_j`.
//! The value space V is the column space with its standard basis.
//!
//! Antisymmetric index pairs `(i, j)` are stored once, for `i > j`, at
//! position [`pair_index`]. Components of a V-valued 2-form or of a
//! structure function are kept as `table[k][pair_index(i, j)]` and read
//! back with the sign restored by [`pair_sign`].

pub mod checks;
pub mod tangent;
pub mod vector_field;

use std::sync::OnceLock;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::funcfield::{BigRational, RatFunc, Scalars};
use crate::linalg;

pub use checks::{CheckMode, IdentityReport};
pub use tangent::{InducedCoframe, TangentChart, TangentFrame};
pub use vector_field::VectorField;

/// Number of unordered pairs `i > j` among `n` indices.
pub fn npairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Storage slot of the pair `{i, j}`, `i != j`.
pub fn pair_index(i: usize, j: usize) -> usize {
    let (hi, lo) = if i > j { (i, j) } else { (j, i) };
    hi * (hi - 1) / 2 + lo
}

/// `+1` if `(i, j)` is stored as-is (`i > j`), `-1` if it is the swapped
/// partner, `0` on the diagonal.
pub fn pair_sign(i: usize, j: usize) -> i8 {
    match i.cmp(&j) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
    }
}

/// The pairs `(i, j)` with `i > j` in storage order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(npairs(n));
    for i in 1..n {
        for j in 0..i {
            out.push((i, j));
        }
    }
    out
}

fn signed(r: &RatFunc, i: usize, j: usize) -> RatFunc {
    match pair_sign(i, j) {
        1 => r.clone(),
        -1 => -r,
        _ => RatFunc::zero(r.nvars()),
    }
}

/// A rational coordinate chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    variables: Vec<String>,
    base_point: Vec<BigRational>,
    domain_note: Option<String>,
}

impl Chart {
    pub fn new(variables: Vec<String>, base_point: Vec<BigRational>) -> Result<Self> {
        let n = variables.len();
        if n < 3 {
            return Err(Error::DimensionTooSmall(n));
        }
        if base_point.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: base_point.len(),
            });
        }
        for (i, v) in variables.iter().enumerate() {
            if variables[..i].contains(v) {
                return Err(Error::InvalidInput(format!("duplicate variable `{v}`")));
            }
        }
        Ok(Self {
            variables,
            base_point,
            domain_note: None,
        })
    }

    /// Variables `x1..xn`, base point at the origin.
    pub fn standard(n: usize) -> Result<Self> {
        Self::new(
            crate::funcfield::default_names(n),
            vec![BigRational::zero(); n],
        )
    }

    pub fn n(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn base_point(&self) -> &[BigRational] {
        &self.base_point
    }

    pub fn domain_note(&self) -> Option<&str> {
        self.domain_note.as_deref()
    }

    pub fn with_base_point(mut self, base_point: Vec<BigRational>) -> Result<Self> {
        if base_point.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: base_point.len(),
            });
        }
        self.base_point = base_point;
        Ok(self)
    }
}

/// A coframe `ω^k = Σ_j A[k][j] dx_j` with `det A` nonzero.
#[derive(Clone, Debug)]
pub struct Coframe {
    chart: Chart,
    a: Vec<Vec<RatFunc>>,
    b: Vec<Vec<RatFunc>>,
    det: RatFunc,
    derivs: OnceLock<Vec<Vec<Vec<RatFunc>>>>,
}

impl Coframe {
    pub fn new(mut chart: Chart, a: Vec<Vec<RatFunc>>) -> Result<Self> {
        let n = chart.n();
        if a.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.len(),
            });
        }
        for row in &a {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            for e in row {
                if e.nvars() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: e.nvars(),
                    });
                }
                e.check_size()?;
            }
        }
        let det = linalg::ratfunc_det(&a);
        if det.is_zero() {
            return Err(Error::SingularCoframe("det A vanishes identically".into()));
        }
        let base = chart.base_point().to_vec();
        for row in &a {
            for e in row {
                if e.evaluate(&base, &crate::funcfield::Rationals).is_err() {
                    return Err(Error::SingularCoframe(
                        "a coefficient has a pole at the base point".into(),
                    ));
                }
            }
        }
        match det.evaluate(&base, &crate::funcfield::Rationals) {
            Ok(v) if !v.is_zero() => {}
            _ => return Err(Error::SingularCoframe("det A vanishes at the base point".into())),
        }
        let b = linalg::ratfunc_inverse(&a)
            .ok_or_else(|| Error::SingularCoframe("matrix is not invertible".into()))?;
        let mut dens: Vec<String> = Vec::new();
        for e in a.iter().flatten().chain(std::iter::once(&det)) {
            let d = e.denom();
            if !d.is_constant() {
                let s = d.display(chart.variables()).to_string();
                if !dens.contains(&s) {
                    dens.push(s);
                }
            }
        }
        if !det.numer().is_constant() {
            let s = det.numer().display(chart.variables()).to_string();
            if !dens.contains(&s) {
                dens.push(s);
            }
        }
        if !dens.is_empty() {
            chart.domain_note = Some(format!("avoid zeros of: {}", dens.join("; ")));
        }
        Ok(Self {
            chart,
            a,
            b,
            det,
            derivs: OnceLock::new(),
        })
    }

    /// Parse entries in the chart's variables.
    pub fn from_strings<S: AsRef<str>>(chart: Chart, entries: &[Vec<S>]) -> Result<Self> {
        let a = entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| crate::funcfield::parse_ratfunc(s.as_ref(), chart.variables()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(chart, a)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn n(&self) -> usize {
        self.chart.n()
    }

    pub fn matrix(&self) -> &[Vec<RatFunc>] {
        &self.a
    }

    pub fn entry(&self, k: usize, j: usize) -> &RatFunc {
        &self.a[k][j]
    }

    pub fn det(&self) -> &RatFunc {
        &self.det
    }

    /// Inverse matrix `B = A^{-1}`.
    pub fn inverse(&self) -> &[Vec<RatFunc>] {
        &self.b
    }

    /// `dA[l][k][j] = ∂_l A[k][j]`.
    pub fn derivatives(&self) -> &[Vec<Vec<RatFunc>>] {
        self.derivs.get_or_init(|| {
            (0..self.n())
                .map(|l| {
                    self.a
                        .iter()
                        .map(|row| row.iter().map(|e| e.partial(l)).collect())
                        .collect()
                })
                .collect()
        })
    }

    pub fn dual_frame(&self) -> FrameField {
        FrameField {
            nvars: self.n(),
            b: self.b.clone(),
        }
    }

    pub fn exterior_derivative(&self) -> VValuedForm2 {
        let n = self.n();
        let d = self.derivatives();
        let comps = (0..n)
            .map(|k| {
                pairs(n)
                    .into_iter()
                    .map(|(i, j)| &d[i][k][j] - &d[j][k][i])
                    .collect()
            })
            .collect();
        VValuedForm2 { nvars: n, comps }
    }

    pub fn structure_function(&self) -> StructureFunction {
        let w = self.exterior_derivative();
        StructureFunction {
            n: self.n(),
            comps: transform_pairs(&w.comps, &self.b),
        }
    }

    /// Multiply every coefficient by `s`.
    pub fn scaled(&self, s: &RatFunc) -> Result<Self> {
        let a = self
            .a
            .iter()
            .map(|row| row.iter().map(|e| e * s).collect())
            .collect();
        Self::new(self.chart.clone(), a)
    }

    pub fn matrix_at<F: Scalars>(&self, point: &[F::Elem], field: &F) -> Result<Vec<Vec<F::Elem>>> {
        self.a
            .iter()
            .map(|row| row.iter().map(|e| e.evaluate(point, field)).collect())
            .collect()
    }

    /// Structure function at a point, evaluated numerically from `A` and
    /// its first derivatives. Coordinates follow the layout
    /// `k * npairs(n) + pair_index(i, j)`.
    pub fn structure_at<F: Scalars>(&self, point: &[F::Elem], field: &F) -> Result<Vec<F::Elem>> {
        let n = self.n();
        let a = self.matrix_at(point, field)?;
        let b = linalg::invert(field, &a).ok_or(Error::Pole)?;
        let d = self.derivatives();
        let mut dv = vec![vec![vec![field.zero(); n]; n]; n];
        for l in 0..n {
            for k in 0..n {
                for j in 0..n {
                    if !d[l][k][j].is_zero() {
                        dv[l][k][j] = d[l][k][j].evaluate(point, field)?;
                    }
                }
            }
        }
        let pr = pairs(n);
        let mut out = Vec::with_capacity(n * pr.len());
        for k in 0..n {
            let w: Vec<F::Elem> = pr
                .iter()
                .map(|&(i, j)| field.sub(&dv[i][k][j], &dv[j][k][i]))
                .collect();
            for &(a_, b_) in &pr {
                let mut acc = field.zero();
                for (wi, &(i, j)) in w.iter().zip(&pr) {
                    if field.is_zero(wi) {
                        continue;
                    }
                    let minor = field.sub(
                        &field.mul(&b[i][a_], &b[j][b_]),
                        &field.mul(&b[j][a_], &b[i][b_]),
                    );
                    acc = field.add(&acc, &field.mul(wi, &minor));
                }
                out.push(acc);
            }
        }
        Ok(out)
    }

    /// Seeded rational sample points with small numerators and
    /// denominators, rejecting poles and zeros of `det A`.
    pub fn sample_points(&self, count: usize, seed: u64) -> Result<Vec<Vec<BigRational>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let max_attempts = 100 * count + 100;
        let mut attempts = 0;
        while out.len() < count {
            if attempts == max_attempts {
                return Err(Error::SamplingFailure {
                    found: out.len(),
                    needed: count,
                    attempts,
                });
            }
            attempts += 1;
            let p: Vec<BigRational> = (0..self.n()).map(|_| small_rational(&mut rng)).collect();
            if self.is_admissible(&p) {
                out.push(p);
            }
        }
        Ok(out)
    }

    pub fn is_admissible(&self, p: &[BigRational]) -> bool {
        let q = crate::funcfield::Rationals;
        self.a.iter().flatten().all(|e| e.evaluate(p, &q).is_ok())
            && matches!(self.det.evaluate(p, &q), Ok(v) if !v.is_zero())
    }
}

/// A rational number with numerator and denominator of absolute value at most 10.
pub fn small_rational<R: Rng>(rng: &mut R) -> BigRational {
    let num: i64 = rng.gen_range(-10..=10);
    let den: i64 = rng.gen_range(1..=10);
    BigRational::new(num.into(), den.into())
}

/// `out^k_{ab} = Σ_{i>j} w^k_{ij} (M[i][a] M[j][b] - M[j][a] M[i][b])`:
/// the change of basis for antisymmetric pairs induced by `M`.
pub(crate) fn transform_pairs(w: &[Vec<RatFunc>], m: &[Vec<RatFunc>]) -> Vec<Vec<RatFunc>> {
    let rows = m.len();
    let cols = m[0].len();
    let nv = m[0][0].nvars();
    let src = pairs(rows);
    let dst = pairs(cols);
    let mut minors: Vec<Vec<Option<RatFunc>>> = vec![vec![None; dst.len()]; src.len()];
    let mut out = Vec::with_capacity(w.len());
    for wk in w {
        let mut ck = vec![RatFunc::zero(nv); dst.len()];
        for (s, &(i, j)) in src.iter().enumerate() {
            if wk[s].is_zero() {
                continue;
            }
            for (t, &(a, b)) in dst.iter().enumerate() {
                let minor = minors[s][t].get_or_insert_with(|| {
                    &(&m[i][a] * &m[j][b]) - &(&m[j][a] * &m[i][b])
                });
                if !minor.is_zero() {
                    ck[t] = &ck[t] + &(&wk[s] * minor);
                }
            }
        }
        out.push(ck);
    }
    out
}

/// Vector fields `D_a = Σ_j B[j][a] ∂_j`, one per column of `B`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameField {
    nvars: usize,
    b: Vec<Vec<RatFunc>>,
}

impl FrameField {
    pub fn new(b: Vec<Vec<RatFunc>>) -> Self {
        let nvars = b.len();
        Self { nvars, b }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.b.first().map_or(0, |r| r.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn matrix(&self) -> &[Vec<RatFunc>] {
        &self.b
    }

    pub fn field(&self, a: usize) -> VectorField {
        VectorField::new(self.b.iter().map(|row| row[a].clone()).collect())
    }

    pub fn fields(&self) -> Vec<VectorField> {
        (0..self.len()).map(|a| self.field(a)).collect()
    }
}

/// A V-valued 2-form `Σ_{i<j} w^k_{ij} dx_i ∧ dx_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct VValuedForm2 {
    nvars: usize,
    comps: Vec<Vec<RatFunc>>,
}

impl VValuedForm2 {
    pub fn from_components(nvars: usize, comps: Vec<Vec<RatFunc>>) -> Self {
        Self { nvars, comps }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rank(&self) -> usize {
        self.comps.len()
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> RatFunc {
        if i == j {
            return RatFunc::zero(self.nvars);
        }
        signed(&self.comps[k][pair_index(i, j)], i, j)
    }

    pub fn components(&self) -> &[Vec<RatFunc>] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().flatten().all(RatFunc::is_zero)
    }

    /// `(dw)^k_{ijl} = ∂_i w_{jl} + ∂_j w_{li} + ∂_l w_{ij}` for `i < j < l`.
    pub fn exterior_derivative(&self) -> Vec<Vec<RatFunc>> {
        let n = self.nvars;
        (0..self.rank())
            .map(|k| {
                let mut out = Vec::new();
                for i in 0..n {
                    for j in i + 1..n {
                        for l in j + 1..n {
                            let t = &(&self.get(k, j, l).partial(i) + &self.get(k, l, i).partial(j))
                                + &self.get(k, i, j).partial(l);
                            out.push(t);
                        }
                    }
                }
                out
            })
            .collect()
    }
}

/// The structure function `c^k_{ij}` of a coframe, with
/// `dω^k = Σ_{i<j} c^k_{ij} ω^i ∧ ω^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureFunction {
    n: usize,
    comps: Vec<Vec<RatFunc>>,
}

impl StructureFunction {
    pub fn from_components(n: usize, comps: Vec<Vec<RatFunc>>) -> Self {
        Self { n, comps }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.comps
            .first()
            .and_then(|r| r.first())
            .map_or(self.n, RatFunc::nvars)
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> RatFunc {
        if i == j {
            return RatFunc::zero(self.nvars());
        }
        signed(&self.comps[k][pair_index(i, j)], i, j)
    }

    pub fn components(&self) -> &[Vec<RatFunc>] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().flatten().all(RatFunc::is_zero)
    }

    /// Coefficients of the bracket relation `[D_a, D_b] = Σ_k δ^k_{ab} D_k`;
    /// `δ = -c` for the dual frame.
    pub fn delta(&self, k: usize, a: usize, b: usize) -> RatFunc {
        -self.get(k, a, b)
    }

    /// Rebuild `dω` in the coordinate basis from `c` and `A`.
    pub fn reconstruct(&self, coframe: &Coframe) -> VValuedForm2 {
        let comps = transform_pairs(&self.comps, &coframe.a);
        VValuedForm2 {
            nvars: coframe.n(),
            comps,
        }
    }

    /// Evaluate at a point in the layout `k * npairs(n) + pair_index(i, j)`.
    pub fn evaluate<F: Scalars>(&self, point: &[F::Elem], field: &F) -> Result<Vec<F::Elem>> {
        self.comps
            .iter()
            .flatten()
            .map(|c| {
                if c.is_zero() {
                    Ok(field.zero())
                } else {
                    c.evaluate(point, field)
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcfield::parse_ratfunc;

    fn r(s: &str) -> RatFunc {
        parse_ratfunc(s, &["x1", "x2", "x3"]).unwrap()
    }

    fn coframe(rows: [[&str; 3]; 3]) -> Coframe {
        let a = rows.iter().map(|row| row.iter().map(|s| r(s)).collect()).collect();
        Coframe::new(Chart::standard(3).unwrap(), a).unwrap()
    }

    fn heisenberg() -> Coframe {
        coframe([["1", "0", "0"], ["0", "1", "0"], ["0", "x1", "1"]])
    }

    fn rescaled() -> Coframe {
        let s = "1/(1-x1)";
        coframe([[s, "0", "0"], ["0", s, "0"], ["0", "0", s]])
    }

    #[test]
    fn pair_layout() {
        assert_eq!(pairs(3), vec![(1, 0), (2, 0), (2, 1)]);
        assert_eq!(pair_index(0, 2), 1);
        assert_eq!(pair_sign(0, 2), -1);
        assert_eq!(npairs(5), 10);
    }

    #[test]
    fn dimension_guard() {
        assert!(matches!(Chart::standard(2), Err(Error::DimensionTooSmall(2))));
    }

    #[test]
    fn identity_coframe() {
        let c = coframe([["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]);
        assert_eq!(c.inverse()[1][1], r("1"));
        assert!(c.exterior_derivative().is_zero());
        assert!(c.structure_function().is_zero());
    }

    #[test]
    fn heisenberg_inverse_and_structure() {
        let c = heisenberg();
        assert_eq!(c.inverse()[2][1], r("-x1"));
        let w = c.exterior_derivative();
        assert_eq!(w.get(2, 0, 1), r("1"));
        assert_eq!(w.get(2, 1, 0), r("-1"));
        let s = c.structure_function();
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let expect = match (k, i, j) {
                        (2, 0, 1) => r("1"),
                        (2, 1, 0) => r("-1"),
                        _ => r("0"),
                    };
                    assert_eq!(s.get(k, i, j), expect, "c^{k}_{i}{j}");
                }
            }
        }
    }

    #[test]
    fn rescaled_structure() {
        let c = rescaled();
        assert_eq!(c.inverse()[0][0], r("1-x1"));
        let w = c.exterior_derivative();
        assert_eq!(w.get(1, 0, 1), r("1/(1-x1)^2"));
        assert_eq!(w.get(0, 0, 1), r("0"));
        let s = c.structure_function();
        assert_eq!(s.get(1, 0, 1), r("1"));
        assert_eq!(s.get(2, 0, 2), r("1"));
        assert_eq!(s.get(2, 2, 0), r("-1"));
        assert_eq!(s.get(2, 1, 2), r("0"));
        assert_eq!(s.get(0, 0, 1), r("0"));
    }

    #[test]
    fn reconstruction_matches_derivative() {
        for c in [heisenberg(), rescaled()] {
            let s = c.structure_function();
            assert_eq!(s.reconstruct(&c), c.exterior_derivative());
        }
    }

    #[test]
    fn numeric_structure_matches_symbolic() {
        let c = rescaled();
        let p: Vec<BigRational> = vec![
            BigRational::new(1.into(), 3.into()),
            BigRational::new((-2).into(), 1.into()),
            BigRational::new(5.into(), 7.into()),
        ];
        let q = crate::funcfield::Rationals;
        assert_eq!(
            c.structure_at(&p, &q).unwrap(),
            c.structure_function().evaluate(&p, &q).unwrap()
        );
    }

    #[test]
    fn singular_coframes_rejected() {
        let a = vec![vec![r("1"), r("0"), r("0")], vec![r("1"), r("0"), r("0")], vec![r("0"), r("0"), r("1")]];
        assert!(matches!(
            Coframe::new(Chart::standard(3).unwrap(), a),
            Err(Error::SingularCoframe(_))
        ));
        let a = vec![vec![r("x1"), r("0"), r("0")], vec![r("0"), r("1"), r("0")], vec![r("0"), r("0"), r("1")]];
        assert!(matches!(
            Coframe::new(Chart::standard(3).unwrap(), a),
            Err(Error::SingularCoframe(_))
        ));
    }

    #[test]
    fn samples_avoid_poles() {
        let c = rescaled();
        let pts = c.sample_points(30, 4).unwrap();
        assert_eq!(pts.len(), 30);
        assert!(pts.iter().all(|p| p[0] != BigRational::from_integer(1.into())));
        assert_eq!(pts, c.sample_points(30, 4).unwrap());
    }
}
