//! Constant tensors in `Hom(Λ²V, V)`: the contraction `ι`, the subspace
//! `Ξ_V = ι(V*)`, and membership tests over exact and floating fields.
//!
//! A tensor `σ` is stored by its coordinates `c^k_{ij}` for `i > j` at
//! index `k * npairs(n) + pair_index(i, j)`, the layout used by
//! [`crate::coframe::Coframe::structure_at`]. `σ(e_i, e_j) = Σ_k c^k_{ij} e_k`.

pub mod constraints;

use serde::{Deserialize, Serialize};

use crate::coframe::{npairs, pair_index, pairs, transform_pairs, Coframe, IdentityReport};
use crate::error::{Error, Result};
use crate::funcfield::{
    rational_to_f64, BigRational, PrimeField, RatFunc, Rationals, RationalFunctions, Reals, Scalars,
};
use crate::linalg::{least_squares, solve_in_span, Echelon};

pub use constraints::{
    assemble_xiz_constraints_float, assemble_xiz_constraints_modp, span_check, tangent_lines_nondegenerate,
    xi_z, ConstraintBatch, RankReport, XiConfig, XiReport, XiZ,
};

/// Dimension of `Hom(Λ²V, V)` for `dim V = n`.
pub fn tensor_dim(n: usize) -> usize {
    n * npairs(n)
}

/// Coordinate index and sign of `c^k_{ij}`; `None` on the diagonal.
pub fn coord(n: usize, k: usize, i: usize, j: usize) -> Option<(usize, bool)> {
    if i == j {
        return None;
    }
    let (hi, lo, neg) = if i > j { (i, j, false) } else { (j, i, true) };
    Some((k * npairs(n) + pair_index(hi, lo), neg))
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomTensor<T> {
    n: usize,
    coords: Vec<T>,
}

impl<T: Clone> HomTensor<T> {
    pub fn from_coords(n: usize, coords: Vec<T>) -> Result<Self> {
        if coords.len() != tensor_dim(n) {
            return Err(Error::DimensionMismatch {
                expected: tensor_dim(n),
                found: coords.len(),
            });
        }
        Ok(Self { n, coords })
    }

    pub fn zero<F: Scalars<Elem = T>>(field: &F, n: usize) -> Self {
        Self {
            n,
            coords: vec![field.zero(); tensor_dim(n)],
        }
    }

    /// Build from `c(k, i, j)` evaluated for `i > j`.
    pub fn from_fn(n: usize, mut c: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut coords = Vec::with_capacity(tensor_dim(n));
        for k in 0..n {
            for (i, j) in pairs(n) {
                coords.push(c(k, i, j));
            }
        }
        Self { n, coords }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    /// `c^k_{ij}` with antisymmetry applied.
    pub fn get<F: Scalars<Elem = T>>(&self, field: &F, k: usize, i: usize, j: usize) -> T {
        match coord(self.n, k, i, j) {
            None => field.zero(),
            Some((idx, false)) => self.coords[idx].clone(),
            Some((idx, true)) => field.neg(&self.coords[idx]),
        }
    }

    /// `σ(u, v) = Σ_{i>j} c_{ij} (u_i v_j - u_j v_i)`.
    pub fn apply<F: Scalars<Elem = T>>(&self, field: &F, u: &[T], v: &[T]) -> Vec<T> {
        let pr = pairs(self.n);
        let minors: Vec<T> = pr
            .iter()
            .map(|&(i, j)| field.sub(&field.mul(&u[i], &v[j]), &field.mul(&u[j], &v[i])))
            .collect();
        (0..self.n)
            .map(|k| {
                let mut acc = field.zero();
                for (p, m) in minors.iter().enumerate() {
                    let c = &self.coords[k * pr.len() + p];
                    if !field.is_zero(c) && !field.is_zero(m) {
                        acc = field.add(&acc, &field.mul(c, m));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> HomTensor<U> {
        HomTensor {
            n: self.n,
            coords: self.coords.iter().map(f).collect(),
        }
    }

    pub fn try_map<U>(&self, f: impl FnMut(&T) -> Result<U>) -> Result<HomTensor<U>> {
        Ok(HomTensor {
            n: self.n,
            coords: self.coords.iter().map(f).collect::<Result<_>>()?,
        })
    }
}

impl HomTensor<BigRational> {
    pub fn to_field<F: Scalars>(&self, field: &F) -> Result<HomTensor<F::Elem>> {
        self.try_map(|c| field.from_rational(c))
    }

    pub fn to_f64(&self) -> HomTensor<f64> {
        self.map(rational_to_f64)
    }
}

/// `ι(η)`: `c^k_{ij} = η_i δ^k_j - η_j δ^k_i`, so `ι(η)(u, v) = η(u) v - η(v) u`.
pub fn iota<F: Scalars>(field: &F, eta: &[F::Elem]) -> HomTensor<F::Elem> {
    let n = eta.len();
    HomTensor::from_fn(n, |k, i, j| {
        if k == j {
            eta[i].clone()
        } else if k == i {
            field.neg(&eta[j])
        } else {
            field.zero()
        }
    })
}

/// Inverse of `ι` on its image: `η_j = Σ_k c^k_{kj} / (1 - n)`.
/// Returns `None` unless `ι(η)` reproduces `σ` (exactly, or within
/// `tol * ‖σ‖` for floating fields).
pub fn recover_eta<F: XiField>(field: &F, sigma: &HomTensor<F::Elem>, tol: f64) -> Result<Option<Vec<F::Elem>>> {
    let n = sigma.n();
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    let inv = field
        .inv(&field.from_i64(1 - n as i64))
        .ok_or_else(|| Error::FieldMismatch(format!("1 - n = {} is not invertible", 1 - n as i64)))?;
    let eta: Vec<F::Elem> = (0..n)
        .map(|j| {
            let mut t = field.zero();
            for k in 0..n {
                if k != j {
                    t = field.add(&t, &sigma.get(field, k, k, j));
                }
            }
            field.mul(&t, &inv)
        })
        .collect();
    let back = iota(field, &eta);
    let scale = norm(field, sigma.coords());
    let ok = back
        .coords()
        .iter()
        .zip(sigma.coords())
        .all(|(a, b)| field.negligible(&field.sub(a, b), scale, tol));
    Ok(ok.then_some(eta))
}

fn norm<F: Scalars>(field: &F, v: &[F::Elem]) -> f64 {
    v.iter().map(|x| field.magnitude(x).powi(2)).sum::<f64>().sqrt()
}

/// Which field a subspace lives over.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldTag {
    Rational,
    Prime(u64),
    Float { tol: f64 },
    Function { nvars: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Membership<E> {
    Member { coefficients: Vec<E> },
    /// `residual` is absolute; `relative` divides by `‖σ‖`. In a prime
    /// field only the nonvanishing of the residual is meaningful.
    NonMember { residual: f64, relative: f64 },
}

impl<E> Membership<E> {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }

    pub fn relative_residual(&self) -> f64 {
        match self {
            Membership::Member { .. } => 0.0,
            Membership::NonMember { relative, .. } => *relative,
        }
    }
}

/// Scalar fields supporting subspace membership.
pub trait XiField: Scalars {
    fn tag(&self) -> FieldTag;

    /// Decide whether `target` lies in the span of `basis`.
    fn solve(&self, basis: &[Vec<Self::Elem>], target: &[Self::Elem], _tol: f64) -> Membership<Self::Elem> {
        exact_solve(self, basis, target)
    }

    /// Whether `a` counts as zero relative to `scale`.
    fn negligible(&self, a: &Self::Elem, _scale: f64, _tol: f64) -> bool {
        self.is_zero(a)
    }
}

fn exact_solve<F: Scalars>(field: &F, basis: &[Vec<F::Elem>], target: &[F::Elem]) -> Membership<F::Elem> {
    if let Some(c) = solve_in_span(field, basis, target) {
        return Membership::Member { coefficients: c };
    }
    let mut e = Echelon::new(field.clone(), target.len());
    for b in basis {
        e.insert(b);
    }
    let rem = e.reduce(target);
    let residual = norm(field, &rem);
    let scale = norm(field, target);
    Membership::NonMember {
        residual,
        relative: if scale > 0.0 { residual / scale } else { f64::INFINITY },
    }
}

impl XiField for Rationals {
    fn tag(&self) -> FieldTag {
        FieldTag::Rational
    }

    /// Exact decision; the residual of a nonmember is the least-squares
    /// distance in double precision.
    fn solve(&self, basis: &[Vec<BigRational>], target: &[BigRational], _tol: f64) -> Membership<BigRational> {
        match solve_in_span(self, basis, target) {
            Some(c) => Membership::Member { coefficients: c },
            None => {
                let b: Vec<Vec<f64>> = basis.iter().map(|v| v.iter().map(rational_to_f64).collect()).collect();
                let t: Vec<f64> = target.iter().map(rational_to_f64).collect();
                let (_, residual) = least_squares(&b, &t);
                let scale = t.iter().map(|x| x * x).sum::<f64>().sqrt();
                Membership::NonMember {
                    residual,
                    relative: residual / scale,
                }
            }
        }
    }
}

impl XiField for PrimeField {
    fn tag(&self) -> FieldTag {
        FieldTag::Prime(self.modulus())
    }
}

impl XiField for RationalFunctions {
    fn tag(&self) -> FieldTag {
        FieldTag::Function { nvars: self.nvars }
    }
}

impl XiField for Reals {
    fn tag(&self) -> FieldTag {
        FieldTag::Float { tol: self.tol }
    }

    /// Least squares; a member iff the residual is below `tol * ‖target‖`.
    fn solve(&self, basis: &[Vec<f64>], target: &[f64], tol: f64) -> Membership<f64> {
        let scale = target.iter().map(|x| x * x).sum::<f64>().sqrt();
        if scale == 0.0 {
            return Membership::Member {
                coefficients: vec![0.0; basis.len()],
            };
        }
        let (coefficients, residual) = least_squares(basis, target);
        if residual < tol * scale {
            Membership::Member { coefficients }
        } else {
            Membership::NonMember {
                residual,
                relative: residual / scale,
            }
        }
    }

    fn negligible(&self, a: &f64, scale: f64, tol: f64) -> bool {
        a.abs() <= tol * scale.max(f64::MIN_POSITIVE)
    }
}

/// A subspace of `Hom(Λ²V, V)` with a basis over a stated field.
#[derive(Clone, Debug)]
pub struct TensorSubspace<F: XiField> {
    n: usize,
    field: F,
    basis: Vec<HomTensor<F::Elem>>,
    tol: f64,
}

impl<F: XiField> TensorSubspace<F> {
    /// The span of `vectors`; dependent vectors are dropped (exact fields).
    pub fn spanned_by(field: F, n: usize, vectors: Vec<HomTensor<F::Elem>>, tol: f64) -> Result<Self> {
        let mut e = Echelon::new(field.clone(), tensor_dim(n));
        let mut basis = Vec::new();
        for v in vectors {
            if v.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.n(),
                });
            }
            if e.insert(v.coords()) {
                basis.push(v);
            }
        }
        Ok(Self { n, field, basis, tol })
    }

    /// A basis known to be independent (for example a float kernel basis).
    pub fn from_basis(field: F, n: usize, basis: Vec<HomTensor<F::Elem>>, tol: f64) -> Self {
        Self { n, field, basis, tol }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn tag(&self) -> FieldTag {
        self.field.tag()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn basis(&self) -> &[HomTensor<F::Elem>] {
        &self.basis
    }

    pub fn membership(&self, sigma: &HomTensor<F::Elem>) -> Result<Membership<F::Elem>> {
        if sigma.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: sigma.n(),
            });
        }
        let basis: Vec<Vec<F::Elem>> = self.basis.iter().map(|b| b.coords().to_vec()).collect();
        Ok(self.field.solve(&basis, sigma.coords(), self.tol))
    }

    /// Membership of a tensor with rational coordinates, mapped into this field.
    pub fn membership_rational(&self, sigma: &HomTensor<BigRational>) -> Result<Membership<F::Elem>> {
        self.membership(&sigma.to_field(&self.field)?)
    }

    /// Whether every basis vector of `other` lies in this subspace.
    pub fn contains(&self, other: &TensorSubspace<F>) -> Result<bool> {
        if self.field.tag() != other.field.tag() {
            return Err(Error::FieldMismatch(format!("{:?} vs {:?}", self.tag(), other.tag())));
        }
        for b in other.basis() {
            if !self.membership(b)?.is_member() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `Ξ_V` with basis `ι(e^1), ..., ι(e^n)`.
pub fn xi_v<F: XiField>(field: F, n: usize) -> Result<TensorSubspace<F>> {
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    let basis = (0..n)
        .map(|a| {
            let eta: Vec<F::Elem> = (0..n).map(|i| if i == a { field.one() } else { field.zero() }).collect();
            iota(&field, &eta)
        })
        .collect();
    TensorSubspace::spanned_by(field, n, basis, 1e-8)
}

/// The pointwise `Ξ_V` predicate: `σ(u, v)` lies in the span of `u` and `v`.
pub fn in_span_of_arguments<F: Scalars>(field: &F, sigma: &HomTensor<F::Elem>, u: &[F::Elem], v: &[F::Elem]) -> bool {
    let s = sigma.apply(field, u, v);
    let mut e = Echelon::new(field.clone(), u.len());
    e.insert(u);
    e.insert(v);
    let r = e.reduce(&s);
    r.iter().all(|x| field.is_zero(x))
}

/// Checks `ι(η)♯(ω∧ω) = (η♯ω)∧ω` as 2-forms in the coordinate basis.
/// The left side goes through the change of basis used for structure
/// functions; the right side expands the wedge directly.
pub fn iota_identity(eta: &[RatFunc], omega: &Coframe) -> IdentityReport {
    let n = omega.n();
    let field = RationalFunctions { nvars: n };
    let sigma = iota(&field, eta);
    let comps: Vec<Vec<RatFunc>> = (0..n)
        .map(|k| sigma.coords()[k * npairs(n)..(k + 1) * npairs(n)].to_vec())
        .collect();
    let lhs = transform_pairs(&comps, omega.matrix());
    let a = omega.matrix();
    let alpha: Vec<RatFunc> = (0..n)
        .map(|j| {
            let mut t = RatFunc::zero(n);
            for k in 0..n {
                t = &t + &(&eta[k] * &a[k][j]);
            }
            t
        })
        .collect();
    let mut residuals = Vec::new();
    for k in 0..n {
        for (p, (i, j)) in pairs(n).into_iter().enumerate() {
            let rhs = &(&alpha[i] * &a[k][j]) - &(&alpha[j] * &a[k][i]);
            residuals.push(&lhs[k][p] - &rhs);
        }
    }
    IdentityReport::symbolic("iota_defining_identity", &residuals, omega.chart().base_point())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn heisenberg() -> HomTensor<BigRational> {
        HomTensor::from_fn(3, |k, i, j| if (k, i, j) == (2, 1, 0) { -q(1) } else { q(0) })
    }

    #[test]
    fn iota_of_first_covector() {
        let s = iota(&Rationals, &[q(1), q(0), q(0)]);
        let f = Rationals;
        assert_eq!(s.get(&f, 1, 0, 1), q(1));
        assert_eq!(s.get(&f, 2, 0, 2), q(1));
        assert_eq!(s.get(&f, 1, 1, 0), q(-1));
        let nonzero = s.coords().iter().filter(|c| !c.is_zero()).count();
        assert_eq!(nonzero, 2);
        assert_ne!(s, iota(&f, &[q(0), q(1), q(0)]));
        assert!(iota(&f, &[q(0), q(0), q(0)]).coords().iter().all(Zero::is_zero));
    }

    #[test]
    fn xi_v_dimension_and_guard() {
        for n in 3..=8 {
            assert_eq!(xi_v(Rationals, n).unwrap().dim(), n);
        }
        assert!(matches!(xi_v(Rationals, 2), Err(Error::DimensionTooSmall(2))));
    }

    #[test]
    fn membership_cases() {
        let v = xi_v(Rationals, 3).unwrap();
        let z = HomTensor::zero(&Rationals, 3);
        assert_eq!(
            v.membership(&z).unwrap(),
            Membership::Member {
                coefficients: vec![q(0); 3]
            }
        );
        let s = iota(&Rationals, &[q(1), q(2), q(0)]);
        assert_eq!(
            v.membership(&s).unwrap(),
            Membership::Member {
                coefficients: vec![q(1), q(2), q(0)]
            }
        );
        match v.membership(&heisenberg()).unwrap() {
            Membership::NonMember { residual, .. } => assert!(residual > 0.5),
            m => panic!("{m:?}"),
        }
    }

    #[test]
    fn recover_eta_cases() {
        let f = Rationals;
        let e1 = iota(&f, &[q(1), q(0), q(0)]);
        // Σ_k c^k_{k1} = c^2_{21} + c^3_{31} = -1 - 1 = -2, and -2 / (1 - 3) = 1.
        assert_eq!(e1.get(&f, 1, 1, 0) + e1.get(&f, 2, 2, 0), q(-2));
        assert_eq!(recover_eta(&f, &e1, 0.0).unwrap(), Some(vec![q(1), q(0), q(0)]));
        assert_eq!(recover_eta(&f, &HomTensor::zero(&f, 3), 0.0).unwrap(), Some(vec![q(0); 3]));
        assert_eq!(recover_eta(&f, &heisenberg(), 0.0).unwrap(), None);
    }

    #[test]
    fn float_membership_threshold() {
        let v = xi_v(Reals::default(), 4).unwrap();
        let mut s = iota(&Reals::default(), &[1.0, -2.0, 0.5, 3.0]).into_coords();
        assert!(v.membership(&HomTensor::from_coords(4, s.clone()).unwrap()).unwrap().is_member());
        s[5] += 1e-3;
        let m = v.membership(&HomTensor::from_coords(4, s).unwrap()).unwrap();
        assert!(!m.is_member() && m.relative_residual() > 1e-5);
    }

    #[test]
    fn xi_v_elements_satisfy_span_predicate() {
        let f = PrimeField::new(1_000_003).unwrap();
        let s = iota(&f, &[3, 5, 7, 11]);
        assert!(in_span_of_arguments(&f, &s, &[1, 2, 3, 4], &[9, 8, 7, 5]));
        let h = heisenberg().to_field(&f).unwrap();
        assert!(!in_span_of_arguments(&f, &h, &[1, 0, 0], &[0, 1, 0]));
    }
}
