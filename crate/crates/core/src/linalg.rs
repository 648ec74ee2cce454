//! Linear algebra kernels.
//!
//! Exact routines are generic over [`Scalars`] and must only be used with
//! exact fields (rationals, prime fields). The float routines work through
//! singular values with a relative threshold.

use nalgebra::DMatrix;

use crate::funcfield::{RatFunc, Scalars};

/// Row echelon form kept in reduced form, fed one row at a time.
#[derive(Clone, Debug)]
pub struct Echelon<F: Scalars> {
    field: F,
    ncols: usize,
    /// Reduced rows, each with a leading 1 at `pivots[i]`.
    rows: Vec<Vec<F::Elem>>,
    pivots: Vec<usize>,
}

impl<F: Scalars> Echelon<F> {
    pub fn new(field: F, ncols: usize) -> Self {
        Self {
            field,
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Reduce `row` against the current basis; returns the residual row.
    pub fn reduce(&self, row: &[F::Elem]) -> Vec<F::Elem> {
        let f = &self.field;
        let mut r = row.to_vec();
        for (basis, &p) in self.rows.iter().zip(&self.pivots) {
            if f.is_zero(&r[p]) {
                continue;
            }
            let c = r[p].clone();
            for (x, b) in r.iter_mut().zip(basis) {
                if !f.is_zero(b) {
                    *x = f.sub(x, &f.mul(&c, b));
                }
            }
        }
        r
    }

    /// Insert a row; returns true if the rank grew.
    pub fn insert(&mut self, row: &[F::Elem]) -> bool {
        assert_eq!(row.len(), self.ncols);
        if self.rows.len() == self.ncols {
            return false;
        }
        let f = self.field.clone();
        let mut r = self.reduce(row);
        let Some(p) = r.iter().position(|x| !f.is_zero(x)) else {
            return false;
        };
        let inv = f.inv(&r[p]).expect("nonzero pivot");
        for x in r.iter_mut() {
            *x = f.mul(x, &inv);
        }
        // Keep the basis fully reduced.
        for basis in self.rows.iter_mut() {
            if f.is_zero(&basis[p]) {
                continue;
            }
            let c = basis[p].clone();
            for (x, y) in basis.iter_mut().zip(&r) {
                if !f.is_zero(y) {
                    *x = f.sub(x, &f.mul(&c, y));
                }
            }
        }
        self.rows.push(r);
        self.pivots.push(p);
        true
    }

    /// Basis of the null space `{x : row . x = 0 for all rows}`.
    pub fn kernel(&self) -> Vec<Vec<F::Elem>> {
        let f = &self.field;
        let free: Vec<usize> = (0..self.ncols).filter(|c| !self.pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![f.zero(); self.ncols];
                v[fc] = f.one();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    v[p] = f.neg(&row[fc]);
                }
                v
            })
            .collect()
    }
}

pub fn rank<F: Scalars>(field: &F, rows: &[Vec<F::Elem>], ncols: usize) -> usize {
    let mut e = Echelon::new(field.clone(), ncols);
    for r in rows {
        e.insert(r);
        if e.rank() == ncols {
            break;
        }
    }
    e.rank()
}

pub fn kernel<F: Scalars>(field: &F, rows: &[Vec<F::Elem>], ncols: usize) -> Vec<Vec<F::Elem>> {
    let mut e = Echelon::new(field.clone(), ncols);
    for r in rows {
        e.insert(r);
    }
    e.kernel()
}

/// Coefficients `c` with `sum_i c_i basis[i] = target`, if any.
/// The basis vectors need not be independent.
pub fn solve_in_span<F: Scalars>(
    field: &F,
    basis: &[Vec<F::Elem>],
    target: &[F::Elem],
) -> Option<Vec<F::Elem>> {
    let m = target.len();
    let k = basis.len();
    // Augmented system: m equations, k unknowns.
    let mut rows: Vec<Vec<F::Elem>> = (0..m)
        .map(|i| {
            let mut r: Vec<F::Elem> = basis.iter().map(|b| b[i].clone()).collect();
            r.push(target[i].clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut lead = 0;
    for col in 0..k {
        let Some(pr) = (lead..m).find(|&r| !field.is_zero(&rows[r][col])) else {
            continue;
        };
        rows.swap(lead, pr);
        let inv = field.inv(&rows[lead][col]).unwrap();
        for x in rows[lead].iter_mut() {
            *x = field.mul(x, &inv);
        }
        for r in 0..m {
            if r != lead && !field.is_zero(&rows[r][col]) {
                let c = rows[r][col].clone();
                let pivot_row = rows[lead].clone();
                for (x, y) in rows[r].iter_mut().zip(&pivot_row) {
                    *x = field.sub(x, &field.mul(&c, y));
                }
            }
        }
        pivots.push(col);
        lead += 1;
        if lead == m {
            break;
        }
    }
    if rows[lead..].iter().any(|r| !field.is_zero(&r[k])) {
        return None;
    }
    let mut sol = vec![field.zero(); k];
    for (i, &c) in pivots.iter().enumerate() {
        sol[c] = rows[i][k].clone();
    }
    Some(sol)
}

/// Inverse of a square matrix over an exact field.
pub fn invert<F: Scalars>(field: &F, a: &[Vec<F::Elem>]) -> Option<Vec<Vec<F::Elem>>> {
    let n = a.len();
    let mut m: Vec<Vec<F::Elem>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { field.one() } else { field.zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pr = (col..n)
            .filter(|&r| !field.is_zero(&m[r][col]))
            .max_by(|&r, &s| field.magnitude(&m[r][col]).total_cmp(&field.magnitude(&m[s][col])))?;
        m.swap(col, pr);
        let inv = field.inv(&m[col][col])?;
        for x in m[col].iter_mut() {
            *x = field.mul(x, &inv);
        }
        let prow = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == col || field.is_zero(&row[col]) {
                continue;
            }
            let c = row[col].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                *x = field.sub(x, &field.mul(&c, y));
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Null space from singular values: a singular value counts as zero when
/// it is below `rel_tol * sigma_max`.
#[derive(Clone, Debug)]
pub struct FloatKernel {
    pub dim: usize,
    pub singular_values: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
}

pub fn float_kernel(rows: &[Vec<f64>], ncols: usize, rel_tol: f64) -> FloatKernel {
    let m = rows.len().max(ncols);
    let mut a = DMatrix::<f64>::zeros(m, ncols);
    for (i, r) in rows.iter().enumerate() {
        for (j, &x) in r.iter().enumerate() {
            a[(i, j)] = x;
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let smax = sv.first().copied().unwrap_or(0.0);
    let basis: Vec<Vec<f64>> = order
        .iter()
        .filter(|&&i| svd.singular_values[i] <= rel_tol * smax || smax == 0.0)
        .map(|&i| v_t.row(i).iter().copied().collect())
        .collect();
    FloatKernel {
        dim: basis.len(),
        singular_values: sv,
        basis,
    }
}

/// Least-squares coefficients and the Euclidean residual norm.
pub fn least_squares(basis: &[Vec<f64>], target: &[f64]) -> (Vec<f64>, f64) {
    let m = target.len();
    let k = basis.len();
    if k == 0 {
        let r = target.iter().map(|x| x * x).sum::<f64>().sqrt();
        return (Vec::new(), r);
    }
    let a = DMatrix::<f64>::from_fn(m, k, |i, j| basis[j][i]);
    let b = DMatrix::<f64>::from_fn(m, 1, |i, _| target[i]);
    let svd = a.clone().svd(true, true);
    let c = svd.solve(&b, 1e-14).expect("SVD solve");
    let resid = &a * &c - &b;
    (c.iter().copied().collect(), resid.norm())
}

/// Inverse of a square matrix of rational functions, or `None` if singular.
pub fn ratfunc_inverse(a: &[Vec<RatFunc>]) -> Option<Vec<Vec<RatFunc>>> {
    let n = a.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let nv = a[0][0].nvars();
    let mut m: Vec<Vec<RatFunc>> = a.to_vec();
    let mut inv: Vec<Vec<RatFunc>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { RatFunc::one(nv) } else { RatFunc::zero(nv) })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pr = (col..n)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| size(&m[r][col]))?;
        m.swap(col, pr);
        inv.swap(col, pr);
        let p = m[col][col].recip().ok()?;
        if !p.is_constant() || p.constant_value() != Some(num_traits::One::one()) {
            for x in m[col].iter_mut() {
                *x = &*x * &p;
            }
            for x in inv[col].iter_mut() {
                *x = &*x * &p;
            }
        }
        let (prow, pinv) = (m[col].clone(), inv[col].clone());
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let c = m[r][col].clone();
            for j in 0..n {
                if !prow[j].is_zero() {
                    m[r][j] = &m[r][j] - &(&c * &prow[j]);
                }
                if !pinv[j].is_zero() {
                    inv[r][j] = &inv[r][j] - &(&c * &pinv[j]);
                }
            }
        }
    }
    Some(inv)
}

/// Determinant by fraction-producing elimination.
pub fn ratfunc_det(a: &[Vec<RatFunc>]) -> RatFunc {
    let n = a.len();
    let nv = a[0][0].nvars();
    let mut m = a.to_vec();
    let mut det = RatFunc::one(nv);
    for col in 0..n {
        let Some(pr) = (col..n)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| size(&m[r][col]))
        else {
            return RatFunc::zero(nv);
        };
        if pr != col {
            m.swap(col, pr);
            det = -det;
        }
        let p = m[col][col].clone();
        det = &det * &p;
        let pinv = p.recip().expect("nonzero pivot");
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let c = &m[r][col] * &pinv;
            for j in col..n {
                if !m[col][j].is_zero() {
                    m[r][j] = &m[r][j] - &(&c * &m[col][j]);
                }
            }
        }
    }
    det
}

fn size(r: &RatFunc) -> usize {
    r.numer().num_terms() + r.denom().num_terms()
}

pub fn ratfunc_matmul(a: &[Vec<RatFunc>], b: &[Vec<RatFunc>]) -> Vec<Vec<RatFunc>> {
    let nv = a[0][0].nvars();
    let inner = b.len();
    let cols = b[0].len();
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = RatFunc::zero(nv);
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc = &acc + &(&row[k] * &b[k][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}
