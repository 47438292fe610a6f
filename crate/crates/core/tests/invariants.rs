//! Property tests for the Gaussian engine under random canonical transformations.

use cge_core::gaussian::{entanglement_entropy, CovarianceMatrix};
use cge_core::lattice::LatticeModel;
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Orthogonal matrix from the QR factor of a square array of entries.
fn orthogonal(n: usize, entries: &[f64]) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |i, j| entries[i * n + j] + if i == j { 3.0 } else { 0.0 });
    a.qr().q()
}

/// Random symplectic map on `(q_1..q_n, p_1..p_n)`: passive mixing, local
/// squeezing and phase rotations, then a second passive mixing.
fn symplectic(n: usize, mix1: &[f64], mix2: &[f64], squeeze: &[f64], phase: &[f64]) -> DMatrix<f64> {
    let passive = |o: DMatrix<f64>| {
        let mut s = DMatrix::zeros(2 * n, 2 * n);
        s.view_mut((0, 0), (n, n)).copy_from(&o);
        s.view_mut((n, n), (n, n)).copy_from(&o);
        s
    };
    let mut local = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let (s, c) = phase[i].sin_cos();
        let (e, f) = (squeeze[i].exp(), (-squeeze[i]).exp());
        // Rotation times diag(e^r, e^-r) on (q_i, p_i).
        local[(i, i)] = c * e;
        local[(i, n + i)] = -s * f;
        local[(n + i, i)] = s * e;
        local[(n + i, n + i)] = c * f;
    }
    passive(orthogonal(n, mix1)) * local * passive(orthogonal(n, mix2))
}

fn omega(n: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        w[(i, n + i)] = 1.0;
        w[(n + i, i)] = -1.0;
    }
    w
}

fn embed(total: usize, modes: &[usize], s: &DMatrix<f64>) -> DMatrix<f64> {
    let k = modes.len();
    let mut big = DMatrix::identity(2 * total, 2 * total);
    for (a, &i) in modes.iter().enumerate() {
        for (b, &j) in modes.iter().enumerate() {
            big[(i, j)] = s[(a, b)];
            big[(i, total + j)] = s[(a, k + b)];
            big[(total + i, j)] = s[(k + a, b)];
            big[(total + i, total + j)] = s[(k + a, k + b)];
        }
    }
    big
}

fn symplectic_input(max_modes: usize) -> impl Strategy<Value = (usize, Vec<f64>)> {
    (1..=max_modes).prop_flat_map(|n| {
        let len = 2 * n * n + 2 * n;
        (Just(n), prop::collection::vec(-1.0f64..1.0, len))
    })
}

fn split(n: usize, v: &[f64]) -> DMatrix<f64> {
    let (mix1, rest) = v.split_at(n * n);
    let (mix2, rest) = rest.split_at(n * n);
    let (squeeze, phase) = rest.split_at(n);
    let phase: Vec<f64> = phase.iter().map(|x| x * std::f64::consts::PI).collect();
    symplectic(n, mix1, mix2, squeeze, &phase)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_maps_are_symplectic((n, v) in symplectic_input(6)) {
        let s = split(n, &v);
        let w = omega(n);
        let defect = (&s * &w * s.transpose() - &w).abs().max();
        prop_assert!(defect < 1e-12, "defect {defect}");
    }

    #[test]
    fn pure_states_stay_pure((n, v) in symplectic_input(6)) {
        let half = DMatrix::identity(n, n) * 0.5;
        let vacuum = CovarianceMatrix::canonical(half.clone(), half);
        let squeezed = vacuum.symplectic_transform(&split(n, &v)).unwrap();
        let spectrum = squeezed.symplectic_spectrum().unwrap();
        prop_assert!((spectrum.max() - 0.5).abs() < 1e-9, "{:?}", spectrum.values());
        prop_assert!(squeezed.entropy().unwrap() < 1e-7);
    }

    #[test]
    fn local_maps_leave_the_entropy_unchanged(
        (k, v) in symplectic_input(4),
        offset in 0usize..12,
    ) {
        let model = LatticeModel::new(16, 0.3).unwrap();
        let region: Vec<usize> = (offset..offset + k).collect();
        let cov = model.vacuum_covariance().unwrap();
        let before = cov.restrict(&region).unwrap().entropy().unwrap();
        let moved = cov.symplectic_transform(&embed(16, &region, &split(k, &v))).unwrap();
        let after = moved.restrict(&region).unwrap().entropy().unwrap();
        prop_assert!((before - after).abs() < 1e-8, "{before} vs {after}");
    }

    #[test]
    fn complementary_regions_share_entropy(mask in 1u32..((1 << 10) - 1), mass in 0.05f64..2.0) {
        let model = LatticeModel::new(10, mass).unwrap();
        let region: Vec<usize> = (0..10).filter(|i| mask & (1 << i) != 0).collect();
        let rest: Vec<usize> = (0..10).filter(|i| mask & (1 << i) == 0).collect();
        let a = entanglement_entropy(&model, &region).unwrap();
        let b = entanglement_entropy(&model, &rest).unwrap();
        prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}
