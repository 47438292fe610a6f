//! Periodic lattice regularization of the free 1D Klein-Gordon field.
//!
//! The field on `N` sites with spacing `a` is a ring of coupled oscillators
//! with Hamiltonian `H = 1/2 sum_i [p_i^2 + (q_{i+1} - q_i)^2 + (m a)^2 q_i^2]`
//! in lattice units. Quadratures are normalized so that `[q_i, p_j] = i delta_ij`,
//! which makes every covariance dimensionless.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::gaussian::CovarianceMatrix;

/// Default zero-mode regulator `m_reg * a` for massless models.
pub const DEFAULT_ZERO_MODE_REGULATOR: f64 = 1e-6;

/// Which dispersion relation assigns frequencies to the momentum grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DispersionKind {
    /// `omega^2 = m^2 + (2/a)^2 sin^2(k a / 2)`, the exact normal modes of the chain.
    #[default]
    Lattice,
    /// `omega^2 = k^2 + m^2`, the continuum relation evaluated on the grid.
    Continuum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeModel {
    num_sites: usize,
    spacing: f64,
    mass: f64,
    dispersion: DispersionKind,
    zero_mode_regulator: Option<f64>,
}

/// Discrete momenta of the periodic lattice and their quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    pub wavenumbers: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LatticeModel {
    /// Unit-spacing lattice with `mass` given in lattice units (`m a`).
    pub fn new(num_sites: usize, mass: f64) -> Result<Self> {
        Self::with_spacing(num_sites, 1.0, mass)
    }

    pub fn with_spacing(num_sites: usize, spacing: f64, mass: f64) -> Result<Self> {
        if num_sites == 0 {
            return Err(invalid("num_sites", "need at least one site"));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(invalid("spacing", format!("must be positive, got {spacing}")));
        }
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(invalid("mass", format!("must be non-negative, got {mass}")));
        }
        Ok(Self {
            num_sites,
            spacing,
            mass,
            dispersion: DispersionKind::Lattice,
            zero_mode_regulator: None,
        })
    }

    /// Massless unit-spacing lattice regulated with [`DEFAULT_ZERO_MODE_REGULATOR`].
    pub fn massless(num_sites: usize) -> Result<Self> {
        Ok(Self::new(num_sites, 0.0)?.with_zero_mode_regulator(DEFAULT_ZERO_MODE_REGULATOR))
    }

    pub fn with_dispersion(mut self, kind: DispersionKind) -> Self {
        self.dispersion = kind;
        self
    }

    /// Regulator `m_reg * a` substituted for the mass when the mass is zero.
    pub fn with_zero_mode_regulator(mut self, regulator: f64) -> Self {
        self.zero_mode_regulator = Some(regulator);
        self
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn dispersion_kind(&self) -> DispersionKind {
        self.dispersion
    }

    pub fn zero_mode_regulator(&self) -> Option<f64> {
        self.zero_mode_regulator
    }

    /// Total length `N a`, the infrared cutoff.
    pub fn total_length(&self) -> f64 {
        self.num_sites as f64 * self.spacing
    }

    /// Mass entering the dispersion: the bare mass, or the regulator when massless.
    pub fn effective_mass(&self) -> Result<f64> {
        if self.mass > 0.0 {
            return Ok(self.mass);
        }
        match self.zero_mode_regulator {
            Some(reg) if reg > 0.0 => Ok(reg / self.spacing),
            _ => Err(Error::SingularZeroMode),
        }
    }

    /// `k_n = 2 pi n / (N a)` for `n = -floor(N/2) ..= ceil(N/2) - 1`.
    pub fn momentum_grid(&self) -> MomentumGrid {
        let n = self.num_sites as i64;
        let length = self.total_length();
        let wavenumbers: Vec<f64> = (-(n / 2)..(n - n / 2))
            .map(|j| 2.0 * PI * j as f64 / length)
            .collect();
        let weights = vec![1.0 / self.num_sites as f64; wavenumbers.len()];
        MomentumGrid {
            wavenumbers,
            weights,
        }
    }

    /// Angular frequency of the mode with wavenumber `k`, using the regulated mass.
    ///
    /// For an unregulated massless model this is `|k|` (lattice: `2/a |sin(ka/2)|`),
    /// which vanishes at `k = 0`.
    pub fn dispersion(&self, k: f64) -> f64 {
        let m = self.effective_mass().unwrap_or(0.0);
        match self.dispersion {
            DispersionKind::Continuum => (k * k + m * m).sqrt(),
            DispersionKind::Lattice => {
                let s = 2.0 / self.spacing * (0.5 * k * self.spacing).sin();
                (m * m + s * s).sqrt()
            }
        }
    }

    /// Exact ground-state covariance of the lattice field.
    ///
    /// `X_ij = 1/N sum_k cos(k a (i-j)) / (2 omega_k a)` and
    /// `P_ij = 1/N sum_k cos(k a (i-j)) omega_k a / 2`; the cross block vanishes.
    pub fn vacuum_covariance(&self) -> Result<CovarianceMatrix> {
        self.effective_mass()?;
        let n = self.num_sites;
        let a = self.spacing;
        let grid = self.momentum_grid();
        let omegas: Vec<f64> = grid
            .wavenumbers
            .iter()
            .map(|&k| self.dispersion(k) * a)
            .collect();

        let mut x_profile = vec![0.0; n];
        let mut p_profile = vec![0.0; n];
        for (dist, (xv, pv)) in x_profile.iter_mut().zip(p_profile.iter_mut()).enumerate() {
            let (mut sx, mut sp) = (0.0, 0.0);
            for ((&k, &w), &omega) in grid.wavenumbers.iter().zip(&grid.weights).zip(&omegas) {
                let c = (k * a * dist as f64).cos();
                sx += w * c / (2.0 * omega);
                sp += w * c * omega / 2.0;
            }
            *xv = sx;
            *pv = sp;
        }

        // Circulant: entries depend only on (i - j) mod N. Symmetrize the profile
        // so that X_ij == X_ji bit for bit.
        let circulant = |profile: &[f64]| {
            DMatrix::from_fn(n, n, |i, j| {
                let d = (i + n - j) % n;
                let e = (j + n - i) % n;
                0.5 * (profile[d] + profile[e])
            })
        };
        Ok(CovarianceMatrix::canonical(
            circulant(&x_profile),
            circulant(&p_profile),
        ))
    }

    /// Potential matrix `K` of the dimensionless chain Hamiltonian
    /// `H = 1/2 sum_i p_i^2 + 1/2 sum_ij K_ij q_i q_j`, whose normal-mode
    /// frequencies are `omega_k a`. For the lattice dispersion this is the
    /// circulant with `m^2 a^2 + 2` on the diagonal and `-1` between neighbours.
    pub fn coupling_matrix(&self) -> Result<DMatrix<f64>> {
        self.effective_mass()?;
        let n = self.num_sites;
        let a = self.spacing;
        let grid = self.momentum_grid();
        let profile: Vec<f64> = (0..n)
            .map(|dist| {
                grid.wavenumbers
                    .iter()
                    .zip(&grid.weights)
                    .map(|(&k, &w)| {
                        let omega = self.dispersion(k) * a;
                        w * omega * omega * (k * a * dist as f64).cos()
                    })
                    .sum()
            })
            .collect();
        Ok(DMatrix::from_fn(n, n, |i, j| {
            let d = (i + n - j) % n;
            let e = (j + n - i) % n;
            0.5 * (profile[d] + profile[e])
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_n_points_and_pairs_up() {
        for n in [1usize, 2, 5, 8, 9] {
            let model = LatticeModel::new(n, 1.0).unwrap();
            let grid = model.momentum_grid();
            assert_eq!(grid.wavenumbers.len(), n);
            let unpaired = grid
                .wavenumbers
                .iter()
                .filter(|&&k| !grid.wavenumbers.iter().any(|&q| (q + k).abs() < 1e-12))
                .count();
            assert_eq!(unpaired, if n % 2 == 0 { 1 } else { 0 }, "n = {n}");
        }
    }

    #[test]
    fn coupling_matrix_is_the_nearest_neighbour_laplacian() {
        let k = LatticeModel::new(5, 0.5).unwrap().coupling_matrix().unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let expected = match (i + 5 - j) % 5 {
                    0 => 2.25,
                    1 | 4 => -1.0,
                    _ => 0.0,
                };
                assert!((k[(i, j)] - expected).abs() < 1e-12, "({i}, {j})");
            }
        }
    }

    #[test]
    fn dispersion_examples() {
        let lat = LatticeModel::new(8, 1.0).unwrap();
        let cont = lat.clone().with_dispersion(DispersionKind::Continuum);
        assert_eq!(lat.dispersion(0.0), 1.0);
        assert_eq!(cont.dispersion(0.0), 1.0);
        assert!((lat.dispersion(PI) - 5f64.sqrt()).abs() < 1e-14);

        let massless = LatticeModel::new(8, 0.0)
            .unwrap()
            .with_dispersion(DispersionKind::Continuum);
        assert_eq!(massless.dispersion(-0.75), 0.75);
    }

    #[test]
    fn massless_without_regulator_is_rejected() {
        let model = LatticeModel::new(16, 0.0).unwrap();
        assert_eq!(model.vacuum_covariance().unwrap_err(), Error::SingularZeroMode);
        assert!(LatticeModel::massless(16).unwrap().vacuum_covariance().is_ok());
    }

    #[test]
    fn single_oscillator_vacuum() {
        let cov = LatticeModel::new(1, 1.0).unwrap().vacuum_covariance().unwrap();
        assert!((cov.x()[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((cov.p()[(0, 0)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn translation_invariance() {
        let n = 37;
        let cov = LatticeModel::new(n, 0.3).unwrap().vacuum_covariance().unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let r = (j + n - i) % n;
                worst = worst.max((cov.x()[(i, j)] - cov.x()[(0, r)]).abs());
                worst = worst.max((cov.p()[(i, j)] - cov.p()[(0, r)]).abs());
            }
        }
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn correlations_decay_on_the_compton_scale() {
        // For m a = 0.5 the lattice correlator decays as exp(-kappa r) / sqrt(r)
        // with 2 sinh(kappa / 2) = m a; kappa -> m in the continuum.
        let cov = LatticeModel::new(64, 0.5).unwrap().vacuum_covariance().unwrap();
        let (rs, logs): (Vec<f64>, Vec<f64>) = (6..24)
            .map(|r| (r as f64, (cov.x()[(0, r)] * (r as f64).sqrt()).ln()))
            .unzip();
        let slope = crate::stats::least_squares(&rs, &logs).slope;
        let decay_length = -1.0 / slope;
        let expected = 1.0 / (2.0 * (0.25f64).asinh());
        assert!((decay_length - expected).abs() / expected < 0.02, "{decay_length}");
        // within 5% of the continuum value 1/m
        assert!((decay_length - 2.0).abs() / 2.0 < 0.05);
    }
}
