mod common;

use ccc_core::models;
use ccc_core::xi::{xi_v, TensorSubspace};
use ccc_core::funcfield::{PrimeField, Rationals};
use ccc_core::{xi_z, Hypersurface, XiConfig};

#[test]
fn brute_force_fermat_quartic_matches_sampled_xi_z() {
    let p = 10_007;
    let bf = common::fermat_plane_curve_brute_force(4, p);
    assert!(bf.points > 1000, "{} points", bf.points);
    assert_eq!(bf.kernel_dim, 3);
    assert!(bf.contains_iota);

    let z = Hypersurface::fermat(3, 4).unwrap();
    let lib = xi_z(&z, &XiConfig::default()).unwrap();
    assert_eq!(lib.dim(), 3);
    for s in &lib.prime {
        assert_eq!(s.dim(), bf.kernel_dim);
    }
    assert_eq!(lib.float.as_ref().unwrap().dim(), 3);

    let small = xi_z(
        &z,
        &XiConfig {
            primes: vec![p],
            float: false,
            ..XiConfig::default()
        },
    )
    .unwrap();
    let space: &TensorSubspace<PrimeField> = &small.prime[0];
    assert_eq!(space.dim(), 3);
    for b in space.basis() {
        for row in &bf.rows {
            let dot = row.iter().zip(b.coords()).fold(0u64, |acc, (x, y)| (acc + x * y) % p);
            assert_eq!(dot, 0);
        }
    }
}

#[test]
fn brute_force_conic_matches_sampled_xi_z() {
    let p = 10_007;
    let bf = common::fermat_plane_curve_brute_force(2, p);
    assert!(bf.contains_iota);
    let z = Hypersurface::fermat(3, 2).unwrap();
    let cfg = XiConfig {
        primes: vec![p],
        float: false,
        ..XiConfig::default()
    };
    assert_eq!(xi_z(&z, &cfg).unwrap().dim(), bf.kernel_dim);
}

#[test]
fn xi_v_rank_matches_oracle() {
    for n in 3..=6 {
        assert_eq!(common::xi_v_rank(n, 10_007), n);
        assert_eq!(xi_v(Rationals, n).unwrap().dim(), n);
    }
}

#[test]
fn jet_grid_agrees_with_closedness_verdicts() {
    let resc = common::jet_grid_closedness(&models::rescaled_default(3).unwrap(), 5);
    assert!(resc.points > 0);
    assert_eq!(resc.consistent, resc.points);

    let flat = common::jet_grid_closedness(&models::flat(ccc_core::Chart::standard(3).unwrap()).unwrap(), 5);
    assert_eq!(flat.points, 125);
    assert_eq!(flat.consistent, 125);

    for c in [models::twisted_default(3).unwrap(), models::heisenberg(3).unwrap()] {
        let g = common::jet_grid_closedness(&c, 5);
        assert!(g.points > 0);
        assert_eq!(g.consistent, 0);
    }
}

#[test]
fn jet_grid_accepts_round_trips() {
    for seed in 0..3 {
        let rt = models::round_trip(3, seed).unwrap();
        let g = common::jet_grid_closedness(&rt.coframe, 5);
        assert_eq!(g.consistent, g.points, "seed {seed}");
    }
}
