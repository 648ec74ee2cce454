//! Independent oracles: plain Gaussian elimination over `Z/p` and `Q`,
//! brute-force point enumeration, and a pointwise closedness system.

#![allow(dead_code)]

use ccc_core::funcfield::{BigInt, Rationals};
use ccc_core::{BigRational, Coframe, RatFunc};
use num_traits::{One, Zero};

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Row echelon form over `Z/p` for small `p`; returns the rank.
pub fn rank_mod(rows: &mut [Vec<u64>], p: u64) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = pow_mod(rows[rank][c], p - 2, p);
        for x in rows[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let f = rows[r][c];
                for k in 0..ncols {
                    rows[r][k] = (rows[r][k] + p * p - f * rows[rank][k] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Pair `(i, j)` with `i > j` in the order `(1,0), (2,0), (2,1), ...`.
pub fn pair_list(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 1..n {
        for j in 0..i {
            out.push((i, j));
        }
    }
    out
}

/// Coordinate of `c^k_{ij}` in a tensor with `k` outermost.
pub fn tensor_index(n: usize, k: usize, i: usize, j: usize) -> usize {
    k * n * (n - 1) / 2 + i * (i - 1) / 2 + j
}

/// `ι(e_a)` as a coordinate vector: `c^k_{ij} = δ_{ia} δ^k_j - δ_{ja} δ^k_i`.
pub fn iota_basis(n: usize, a: usize, p: u64) -> Vec<u64> {
    let mut v = vec![0u64; n * n * (n - 1) / 2];
    for (i, j) in pair_list(n) {
        for k in 0..n {
            let mut c = 0i64;
            if i == a && k == j {
                c += 1;
            }
            if j == a && k == i {
                c -= 1;
            }
            v[tensor_index(n, k, i, j)] = c.rem_euclid(p as i64) as u64;
        }
    }
    v
}

pub struct BruteForce {
    pub points: usize,
    pub rows: Vec<Vec<u64>>,
    pub kernel_dim: usize,
    pub contains_iota: bool,
}

/// Enumerates every point of `x1^d + x2^d + x3^d = 0` in `P^2(F_p)` and
/// writes one constraint `g · σ(u, v) = 0` per point, `u ∧ v` spanning
/// the tangent plane. Reports the kernel dimension of the system.
pub fn fermat_plane_curve_brute_force(d: u64, p: u64) -> BruteForce {
    let n = 3;
    let mut pts: Vec<[u64; 3]> = Vec::new();
    for a in 0..p {
        for b in 0..p {
            if (1 + pow_mod(a, d, p) + pow_mod(b, d, p)) % p == 0 {
                pts.push([1, a, b]);
            }
        }
    }
    for b in 0..p {
        if (1 + pow_mod(b, d, p)) % p == 0 {
            pts.push([0, 1, b]);
        }
    }
    let mut rows = Vec::new();
    for x in &pts {
        let g: Vec<u64> = x.iter().map(|&t| d * pow_mod(t, d - 1, p) % p).collect();
        let mut tangent: Vec<Vec<u64>> = Vec::new();
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let mut t = vec![0u64; 3];
            t[a] = g[b];
            t[b] = (p - g[a]) % p;
            if t.iter().any(|&c| c != 0) {
                tangent.push(t);
            }
        }
        let mut ech = tangent.clone();
        let r = rank_mod(&mut ech, p);
        assert_eq!(r, 2, "singular point {x:?}");
        let (u, v) = (&ech[0], &ech[1]);
        let mut row = vec![0u64; n * n * (n - 1) / 2];
        for (i, j) in pair_list(n) {
            let w = (u[i] * v[j] % p + p - u[j] * v[i] % p) % p;
            for k in 0..n {
                row[tensor_index(n, k, i, j)] = g[k] * w % p;
            }
        }
        rows.push(row);
    }
    let mut ech = rows.clone();
    let rank = rank_mod(&mut ech, p);
    let kernel_dim = n * n * (n - 1) / 2 - rank;
    let contains_iota = (0..n).all(|a| {
        let e = iota_basis(n, a, p);
        rows.iter()
            .all(|r| r.iter().zip(&e).fold(0, |acc, (x, y)| (acc + x * y) % p) == 0)
    });
    BruteForce {
        points: pts.len(),
        rows,
        kernel_dim,
        contains_iota,
    }
}

/// `true` when the augmented system `[M | b]` over `Q` is consistent.
pub fn consistent_q(mut rows: Vec<Vec<BigRational>>) -> bool {
    let ncols = rows.first().map_or(0, |r| r.len() - 1);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = rows[rank][c].recip();
        for x in rows[rank].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = rows[r][c].clone();
                for k in 0..=ncols {
                    let t = &f * &rows[rank][k];
                    rows[r][k] = &rows[r][k] - &t;
                }
            }
        }
        rank += 1;
    }
    rows[rank..].iter().all(|r| r[ncols].is_zero())
}

fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub struct JetGrid {
    pub points: usize,
    pub consistent: usize,
}

/// At each point `x` of a `k`-per-axis grid on `[-1, 1]^n` where `ω` is
/// regular, asks whether some `g = df(x)` with `f(x) = 1` satisfies
/// `g ∧ ω^k + dω^k = 0` for every `k`.
pub fn jet_grid_closedness(omega: &Coframe, per_axis: usize) -> JetGrid {
    let n = omega.n();
    let a = omega.matrix();
    let ticks: Vec<BigRational> = (0..per_axis)
        .map(|t| q(2 * t as i64 - (per_axis as i64 - 1), per_axis as i64 - 1))
        .collect();
    let derivs: Vec<Vec<Vec<RatFunc>>> = a
        .iter()
        .map(|row| row.iter().map(|e| (0..n).map(|i| e.diff(i).unwrap()).collect()).collect())
        .collect();
    let mut idx = vec![0usize; n];
    let mut points = 0;
    let mut consistent = 0;
    loop {
        let x: Vec<BigRational> = idx.iter().map(|&t| ticks[t].clone()).collect();
        let eval = |f: &RatFunc| f.evaluate(&x, &Rationals).ok();
        let av: Option<Vec<Vec<BigRational>>> = a.iter().map(|r| r.iter().map(eval).collect()).collect();
        let dv: Option<Vec<Vec<Vec<BigRational>>>> = derivs
            .iter()
            .map(|r| r.iter().map(|e| e.iter().map(eval).collect()).collect())
            .collect();
        if let (Some(av), Some(dv)) = (av, dv) {
            if !det_q(&av).is_zero() {
                points += 1;
                let mut rows = Vec::new();
                for k in 0..n {
                    for (i, j) in pair_list(n) {
                        let mut row = vec![BigRational::zero(); n + 1];
                        row[i] = av[k][j].clone();
                        row[j] = -av[k][i].clone();
                        row[n] = -(&dv[k][j][i] - &dv[k][i][j]);
                        rows.push(row);
                    }
                }
                if consistent_q(rows) {
                    consistent += 1;
                }
            }
        }
        let mut c = 0;
        loop {
            if c == n {
                return JetGrid { points, consistent };
            }
            idx[c] += 1;
            if idx[c] < per_axis {
                break;
            }
            idx[c] = 0;
            c += 1;
        }
    }
}

/// Determinant over `Q` by elimination.
pub fn det_q(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if piv != c {
            a.swap(c, piv);
            det = -det;
        }
        det = &det * &a[c][c];
        for r in c + 1..n {
            let f = &a[r][c] / &a[c][c];
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] = &a[r][k] - &t;
            }
        }
    }
    det
}

/// Rank of `ι(e_1), ..., ι(e_n)` over `Z/p`.
pub fn xi_v_rank(n: usize, p: u64) -> usize {
    let mut rows: Vec<Vec<u64>> = (0..n).map(|a| iota_basis(n, a, p)).collect();
    rank_mod(&mut rows, p)
}
