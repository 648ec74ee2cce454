//! `Ξ_Z` for a hypersurface cone `Ẑ = {f = 0}`, as the kernel of the linear
//! conditions `∇f(u) · σ(u, v) = 0` for `u ∈ Ẑ` and `v ∈ ker ∇f(u)`.
//!
//! Rows are generated at sampled points and stacked until the kernel
//! dimension is unchanged by doubling the sample. The prime-field backend
//! is exact; the float backend samples complex points and splits each row
//! into real and imaginary parts.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{iota, tensor_dim, xi_v, HomTensor, TensorSubspace};
use crate::coframe::{npairs, pairs};
use crate::cone::{ComplexSampler, Hypersurface, ModSampler};
use crate::error::{Error, Result};
use crate::funcfield::{Complexes, PrimeField, Reals, Scalars};
use crate::linalg::{float_kernel, Echelon};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct XiConfig {
    pub primes: Vec<u64>,
    /// Also run the floating-point backend.
    pub float: bool,
    /// Sampled points in the first round; 0 picks a size from the dimension.
    pub samples: usize,
    pub seed: u64,
    /// Relative singular-value threshold and membership tolerance.
    pub tol: f64,
    pub max_doublings: usize,
}

impl Default for XiConfig {
    fn default() -> Self {
        Self {
            primes: vec![2_147_483_647, 1_073_741_827],
            float: true,
            samples: 0,
            seed: 1,
            tol: 1e-8,
            max_doublings: 4,
        }
    }
}

impl XiConfig {
    /// First-round sample size: enough rows to cover every coordinate twice.
    pub fn initial_samples(&self, n: usize) -> usize {
        if self.samples > 0 {
            self.samples
        } else {
            2 * tensor_dim(n).div_ceil(n - 1) + 4
        }
    }
}

/// Rows of the constraint system, each with the `(u, v)` it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintBatch<E, P> {
    pub ncols: usize,
    pub rows: Vec<Vec<E>>,
    pub provenance: Vec<(Vec<P>, Vec<P>)>,
}

/// The functional `σ ↦ g · σ(u, v)` in tensor coordinates.
pub fn constraint_row<F: Scalars>(field: &F, g: &[F::Elem], u: &[F::Elem], v: &[F::Elem]) -> Vec<F::Elem> {
    let n = g.len();
    let minors: Vec<F::Elem> = pairs(n)
        .into_iter()
        .map(|(i, j)| field.sub(&field.mul(&u[i], &v[j]), &field.mul(&u[j], &v[i])))
        .collect();
    let mut row = Vec::with_capacity(tensor_dim(n));
    for gk in g {
        for m in &minors {
            row.push(field.mul(gk, m));
        }
    }
    row
}

/// A basis of `ker g`: `e_j - (g_j / g_m) e_m` for `j ≠ m`, where `g_m ≠ 0`.
pub fn tangent_basis<F: Scalars>(field: &F, g: &[F::Elem]) -> Option<Vec<Vec<F::Elem>>> {
    let n = g.len();
    let m = (0..n).find(|&i| !field.is_zero(&g[i]))?;
    let inv = field.inv(&g[m])?;
    Some(
        (0..n)
            .filter(|&j| j != m)
            .map(|j| {
                let mut v = vec![field.zero(); n];
                v[j] = field.one();
                v[m] = field.neg(&field.mul(&g[j], &inv));
                v
            })
            .collect(),
    )
}

type ModRows = (Vec<Vec<u64>>, Vec<(Vec<u64>, Vec<u64>)>);

fn modp_rows(sampler: &ModSampler, seed: u64, range: std::ops::Range<usize>) -> (ModRows, usize) {
    let field = *sampler.field();
    let per_point: Vec<Option<ModRows>> = range
        .into_par_iter()
        .map(|i| {
            let u = sampler.point(seed, i as u64, true)?;
            let g = sampler.gradient(&u);
            let basis = tangent_basis(&field, &g)?;
            let mut rows = Vec::new();
            let mut prov = Vec::new();
            for v in basis {
                rows.push(constraint_row(&field, &g, &u, &v));
                prov.push((u.clone(), v));
            }
            Some((rows, prov))
        })
        .collect();
    let found = per_point.iter().filter(|p| p.is_some()).count();
    let mut rows = Vec::new();
    let mut prov = Vec::new();
    for (r, p) in per_point.into_iter().flatten() {
        rows.extend(r);
        prov.extend(p);
    }
    ((rows, prov), found)
}

type FloatRows = (Vec<Vec<f64>>, Vec<(Vec<Complex64>, Vec<Complex64>)>);

fn float_rows(sampler: &ComplexSampler, seed: u64, range: std::ops::Range<usize>) -> (FloatRows, usize) {
    let c = Complexes;
    let per_point: Vec<Option<FloatRows>> = range
        .into_par_iter()
        .map(|i| {
            let u = sampler.point(seed, i as u64)?;
            let g = sampler.gradient(&u);
            // Pivot on the largest gradient entry for conditioning.
            let m = (0..g.len()).max_by(|&a, &b| g[a].norm().total_cmp(&g[b].norm()))?;
            let basis: Vec<Vec<Complex64>> = (0..g.len())
                .filter(|&j| j != m)
                .map(|j| {
                    let mut v = vec![Complex64::new(0.0, 0.0); g.len()];
                    v[j] = Complex64::new(1.0, 0.0);
                    v[m] = -g[j] / g[m];
                    v
                })
                .collect();
            let mut rows = Vec::new();
            let mut prov = Vec::new();
            for v in basis {
                let row = constraint_row(&c, &g, &u, &v);
                let norm = row.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                if norm == 0.0 {
                    continue;
                }
                rows.push(row.iter().map(|x| x.re / norm).collect());
                rows.push(row.iter().map(|x| x.im / norm).collect());
                prov.push((u.clone(), v.clone()));
                prov.push((u.clone(), v));
            }
            Some((rows, prov))
        })
        .collect();
    let found = per_point.iter().filter(|p| p.is_some()).count();
    let mut rows = Vec::new();
    let mut prov = Vec::new();
    for (r, p) in per_point.into_iter().flatten() {
        rows.extend(r);
        prov.extend(p);
    }
    ((rows, prov), found)
}

fn check_count(n: usize, count: usize) -> Result<()> {
    if count * (n - 1) < tensor_dim(n) {
        return Err(Error::InvalidInput(format!(
            "{count} points give fewer rows than the {} tensor coordinates",
            tensor_dim(n)
        )));
    }
    Ok(())
}

/// Constraint rows at `count` sampled points of `Ẑ` over `F_p`.
pub fn assemble_xiz_constraints_modp(
    z: &Hypersurface,
    count: usize,
    seed: u64,
    p: u64,
) -> Result<ConstraintBatch<u64, u64>> {
    let n = z.n();
    check_count(n, count)?;
    let sampler = ModSampler::new(z, p)?;
    let ((rows, provenance), found) = modp_rows(&sampler, seed, 0..count);
    if found < count {
        return Err(Error::SamplingFailure {
            found,
            needed: count,
            attempts: count,
        });
    }
    Ok(ConstraintBatch {
        ncols: tensor_dim(n),
        rows,
        provenance,
    })
}

/// Real constraint rows at `count` sampled complex points of `Ẑ`.
pub fn assemble_xiz_constraints_float(
    z: &Hypersurface,
    count: usize,
    seed: u64,
) -> Result<ConstraintBatch<f64, Complex64>> {
    let n = z.n();
    check_count(n, count)?;
    let sampler = ComplexSampler::new(z);
    let ((rows, provenance), found) = float_rows(&sampler, seed, 0..count);
    if found < count {
        return Err(Error::SamplingFailure {
            found,
            needed: count,
            attempts: count,
        });
    }
    Ok(ConstraintBatch {
        ncols: tensor_dim(n),
        rows,
        provenance,
    })
}

/// Kernel dimension of one backend after each sampling round.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BackendRun {
    pub backend: String,
    pub dim: usize,
    pub samples: usize,
    pub rounds: Vec<usize>,
}

/// `Ξ_Z` over each requested backend.
#[derive(Clone, Debug)]
pub struct XiZ {
    pub n: usize,
    pub prime: Vec<TensorSubspace<PrimeField>>,
    pub float: Option<TensorSubspace<Reals>>,
    pub runs: Vec<BackendRun>,
    pub contains_xi_v: bool,
    pub stable: bool,
    pub seed: u64,
    pub tol: f64,
}

/// The report fields emitted by the `xi` command.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XiReport {
    #[serde(rename = "dim_xi_V")]
    pub dim_xi_v: usize,
    #[serde(rename = "dim_xi_Z")]
    pub dim_xi_z: usize,
    pub backend: String,
    pub primes: Vec<u64>,
    pub samples: usize,
    pub seed: u64,
    #[serde(rename = "contains_xi_V")]
    pub contains_xi_v: bool,
    pub stable: bool,
    pub runs: Vec<BackendRun>,
}

impl XiZ {
    /// Dimension from the first backend.
    pub fn dim(&self) -> usize {
        self.runs[0].dim
    }

    pub fn dim_xi_v(&self) -> usize {
        self.n
    }

    /// `Ξ_Z = Ξ_V` on every backend.
    pub fn equals_xi_v(&self) -> bool {
        self.contains_xi_v && self.runs.iter().all(|r| r.dim == self.n)
    }

    pub fn report(&self) -> XiReport {
        let backend = self.runs.iter().map(|r| r.backend.as_str()).collect::<Vec<_>>().join("+");
        XiReport {
            dim_xi_v: self.n,
            dim_xi_z: self.dim(),
            backend,
            primes: self
                .prime
                .iter()
                .map(|s| s.field().modulus())
                .collect(),
            samples: self.runs.iter().map(|r| r.samples).max().unwrap_or(0),
            seed: self.seed,
            contains_xi_v: self.contains_xi_v,
            stable: self.stable,
            runs: self.runs.clone(),
        }
    }
}

/// Grow the sample until the kernel dimension survives a doubling.
fn saturate(
    n: usize,
    cfg: &XiConfig,
    mut add_rows: impl FnMut(std::ops::Range<usize>) -> Result<usize>,
) -> Result<(usize, Vec<usize>)> {
    let mut count = cfg.initial_samples(n);
    let mut dims = vec![add_rows(0..count)?];
    for _ in 0..cfg.max_doublings {
        let d = add_rows(count..2 * count)?;
        count *= 2;
        let prev = *dims.last().unwrap();
        dims.push(d);
        if d == prev {
            return Ok((count, dims));
        }
    }
    Err(Error::NotSaturated {
        doublings: cfg.max_doublings,
        dims,
    })
}

fn sampling_guard(found: usize, needed: usize) -> Result<()> {
    if found < needed {
        return Err(Error::SamplingFailure {
            found,
            needed,
            attempts: needed,
        });
    }
    Ok(())
}

pub fn xi_z(z: &Hypersurface, cfg: &XiConfig) -> Result<XiZ> {
    let n = z.n();
    let ncols = tensor_dim(n);
    if cfg.primes.is_empty() && !cfg.float {
        return Err(Error::InvalidInput("no backend selected".into()));
    }
    let mut runs = Vec::new();
    let mut prime = Vec::new();
    let mut contains = true;
    for &p in &cfg.primes {
        let sampler = ModSampler::new(z, p)?;
        let field = *sampler.field();
        let mut ech = Echelon::new(field, ncols);
        let (samples, rounds) = saturate(n, cfg, |range| {
            let needed = range.len();
            let ((rows, _), found) = modp_rows(&sampler, cfg.seed, range);
            sampling_guard(found, needed)?;
            for r in &rows {
                ech.insert(r);
            }
            Ok(ncols - ech.rank())
        })?;
        let basis: Vec<HomTensor<u64>> = ech
            .kernel()
            .into_iter()
            .map(|v| HomTensor::from_coords(n, v))
            .collect::<Result<_>>()?;
        let space = TensorSubspace::from_basis(field, n, basis, cfg.tol);
        contains &= space.contains(&xi_v(field, n)?)?;
        runs.push(BackendRun {
            backend: format!("modp:{p}"),
            dim: space.dim(),
            samples,
            rounds,
        });
        prime.push(space);
    }
    let mut float = None;
    if cfg.float {
        let sampler = ComplexSampler::new(z);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut last = None;
        let (samples, rounds) = saturate(n, cfg, |range| {
            let needed = range.len();
            let ((r, _), found) = float_rows(&sampler, cfg.seed, range);
            sampling_guard(found, needed)?;
            rows.extend(r);
            let k = float_kernel(&rows, ncols, cfg.tol);
            let d = k.dim;
            last = Some(k);
            Ok(d)
        })?;
        let k = last.expect("at least one round");
        let field = Reals { tol: cfg.tol };
        let basis: Vec<HomTensor<f64>> = k
            .basis
            .into_iter()
            .map(|v| HomTensor::from_coords(n, v))
            .collect::<Result<_>>()?;
        let space = TensorSubspace::from_basis(field, n, basis, cfg.tol);
        contains &= space.contains(&xi_v(field, n)?)?;
        runs.push(BackendRun {
            backend: "float".into(),
            dim: space.dim(),
            samples,
            rounds,
        });
        float = Some(space);
    }
    let stable = runs.iter().all(|r| r.dim == runs[0].dim);
    Ok(XiZ {
        n,
        prime,
        float,
        runs,
        contains_xi_v: contains,
        stable,
        seed: cfg.seed,
        tol: cfg.tol,
    })
}

/// A sampled rank against its expected maximum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankReport {
    pub rank: usize,
    pub expected: usize,
    pub pass: bool,
    pub samples: usize,
    pub prime: u64,
}

fn first_prime(cfg: &XiConfig) -> u64 {
    cfg.primes.first().copied().unwrap_or(2_147_483_647)
}

/// Rank of `{u ∧ v : u ∈ Ẑ smooth, v ∈ ker ∇f(u)}` in `Λ²V`; nondegenerate
/// when it is `n(n-1)/2`.
pub fn tangent_lines_nondegenerate(z: &Hypersurface, cfg: &XiConfig) -> Result<RankReport> {
    let n = z.n();
    let p = first_prime(cfg);
    let sampler = ModSampler::new(z, p)?;
    let field = *sampler.field();
    let target = npairs(n);
    let mut ech = Echelon::new(field, target);
    let budget = 4 * cfg.initial_samples(n);
    let mut used = 0;
    let mut found = 0;
    while used < budget && ech.rank() < target {
        if let Some(u) = sampler.point(cfg.seed ^ 0x7a9e, used as u64, true) {
            found += 1;
            let g = sampler.gradient(&u);
            for v in tangent_basis(&field, &g).unwrap_or_default() {
                let plucker: Vec<u64> = pairs(n)
                    .into_iter()
                    .map(|(i, j)| field.sub(&field.mul(&u[i], &v[j]), &field.mul(&u[j], &v[i])))
                    .collect();
                ech.insert(&plucker);
            }
        }
        used += 1;
    }
    if found == 0 {
        return Err(Error::SamplingFailure {
            found,
            needed: 1,
            attempts: used,
        });
    }
    Ok(RankReport {
        rank: ech.rank(),
        expected: target,
        pass: ech.rank() == target,
        samples: used,
        prime: p,
    })
}

/// Whether sampled points of `Ẑ` span `V`. Singular points count here.
pub fn span_check(z: &Hypersurface, cfg: &XiConfig) -> Result<RankReport> {
    let n = z.n();
    let p = first_prime(cfg);
    let sampler = ModSampler::new(z, p)?;
    let mut ech = Echelon::new(*sampler.field(), n);
    let budget = 4 * cfg.initial_samples(n);
    let mut used = 0;
    let mut found = 0;
    while used < budget && ech.rank() < n {
        if let Some(u) = sampler.point(cfg.seed ^ 0x5a4e, used as u64, false) {
            found += 1;
            ech.insert(&u);
        }
        used += 1;
    }
    if found == 0 {
        return Err(Error::SamplingFailure {
            found,
            needed: 1,
            attempts: used,
        });
    }
    Ok(RankReport {
        rank: ech.rank(),
        expected: n,
        pass: ech.rank() == n,
        samples: used,
        prime: p,
    })
}

/// Every row annihilates `Ξ_V`: `g · (η(u) v - η(v) u) = 0` when `g·u = g·v = 0`.
pub fn rows_annihilate_xi_v(batch: &ConstraintBatch<u64, u64>, field: &PrimeField, n: usize) -> bool {
    (0..n).all(|a| {
        let eta: Vec<u64> = (0..n).map(|i| u64::from(i == a)).collect();
        let s = iota(field, &eta);
        batch.rows.iter().all(|r| {
            r.iter()
                .zip(s.coords())
                .fold(0, |acc, (x, y)| field.add(&acc, &field.mul(x, y)))
                == 0
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fermat_quartic_xi_z_equals_xi_v() {
        let z = Hypersurface::fermat(3, 4).unwrap();
        let x = xi_z(&z, &XiConfig::default()).unwrap();
        assert_eq!(x.dim(), 3);
        assert!(x.stable && x.contains_xi_v && x.equals_xi_v());
        assert_eq!(x.runs.len(), 3);
    }

    #[test]
    fn batches_are_deterministic_and_annihilate_xi_v() {
        let z = Hypersurface::fermat(3, 4).unwrap();
        let p = 2_147_483_647;
        let a = assemble_xiz_constraints_modp(&z, 100, 9, p).unwrap();
        assert_eq!(a.rows.len(), 200);
        assert_eq!(a, assemble_xiz_constraints_modp(&z, 100, 9, p).unwrap());
        assert!(rows_annihilate_xi_v(&a, &PrimeField::new(p).unwrap(), 3));
        assert!(assemble_xiz_constraints_modp(&z, 4, 9, p).is_err());
    }

    #[test]
    fn tangent_lines_and_span() {
        let cfg = XiConfig::default();
        let z = Hypersurface::fermat(3, 4).unwrap();
        let t = tangent_lines_nondegenerate(&z, &cfg).unwrap();
        assert_eq!((t.rank, t.pass), (3, true));
        let s = span_check(&z, &cfg).unwrap();
        assert_eq!((s.rank, s.pass), (3, true));
        // f independent of x3: every tangent line meets the x3-axis direction.
        let deg = Hypersurface::parse("x1^2 - x2^2", 3).unwrap();
        let t = tangent_lines_nondegenerate(&deg, &cfg).unwrap();
        assert!(!t.pass && t.rank == 2);
        // The cone {x3^2 = 0} lies in a hyperplane.
        let flat = Hypersurface::parse("x3^2", 3).unwrap();
        let s = span_check(&flat, &cfg).unwrap();
        assert!(!s.pass && s.rank == 2);
    }
}
