//! Gaussian-state engine: covariance restriction, symplectic spectra and
//! von Neumann entropy.
//!
//! A covariance matrix stores the symmetrized second moments of `n` pairs of
//! quadratures `(q_i, p_i)` together with the commutator Gram matrix
//! `[q_i, p_j] / i`. For bona fide modes the Gram matrix is the identity; raw
//! coarse-grained modes carry their profile overlaps there instead, and must be
//! orthonormalized before a spectrum can be taken.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lattice::LatticeModel;
use crate::linalg::{identity_deviation, sqrt_spd, symmetrize};

/// Symplectic eigenvalues this far below 1/2 are treated as rounding noise.
pub const CLAMP_TOLERANCE: f64 = 1e-9;

/// Largest allowed `|gram - I|` for modes to count as canonical.
pub const CANONICAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    x: DMatrix<f64>,
    p: DMatrix<f64>,
    c: DMatrix<f64>,
    gram: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Builds a covariance from its four blocks, checking shapes and symmetry.
    pub fn new(
        x: DMatrix<f64>,
        p: DMatrix<f64>,
        c: DMatrix<f64>,
        gram: DMatrix<f64>,
    ) -> Result<Self> {
        let n = x.nrows();
        for (name, m) in [("x", &x), ("p", &p), ("c", &c), ("gram", &gram)] {
            if m.shape() != (n, n) {
                return Err(Error::GridMismatch(format!(
                    "block {name} has shape {:?}, expected ({n}, {n})",
                    m.shape()
                )));
            }
        }
        if n == 0 {
            return Err(Error::EmptySubset);
        }
        Ok(Self {
            x: symmetrize(&x),
            p: symmetrize(&p),
            c,
            gram,
        })
    }

    /// Covariance of canonical modes with vanishing `q`-`p` correlations.
    pub fn canonical(x: DMatrix<f64>, p: DMatrix<f64>) -> Self {
        let n = x.nrows();
        assert_eq!(x.shape(), (n, n), "x must be square");
        assert_eq!(p.shape(), (n, n), "p must match x");
        Self {
            x,
            p,
            c: DMatrix::zeros(n, n),
            gram: DMatrix::identity(n, n),
        }
    }

    /// Rebuilds canonical modes from a full `2n x 2n` covariance ordered `(q, p)`.
    pub fn from_full(gamma: &DMatrix<f64>) -> Result<Self> {
        let dim = gamma.nrows();
        if dim == 0 || dim % 2 != 0 || gamma.ncols() != dim {
            return Err(Error::GridMismatch(format!(
                "full covariance must be 2n x 2n, got {:?}",
                gamma.shape()
            )));
        }
        let n = dim / 2;
        let g = symmetrize(gamma);
        Ok(Self {
            x: g.view((0, 0), (n, n)).into_owned(),
            p: g.view((n, n), (n, n)).into_owned(),
            c: g.view((0, n), (n, n)).into_owned(),
            gram: DMatrix::identity(n, n),
        })
    }

    pub fn num_modes(&self) -> usize {
        self.x.nrows()
    }

    /// `<q_i q_j>` block.
    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    /// `<p_i p_j>` block.
    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    /// Symmetrized `<q_i p_j + p_j q_i> / 2` block.
    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    /// Commutator Gram matrix `[q_i, p_j] / i`.
    pub fn commutator_gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Full covariance `[[X, C], [C^T, P]]`.
    pub fn full(&self) -> DMatrix<f64> {
        let n = self.num_modes();
        let mut g = DMatrix::zeros(2 * n, 2 * n);
        g.view_mut((0, 0), (n, n)).copy_from(&self.x);
        g.view_mut((n, n), (n, n)).copy_from(&self.p);
        g.view_mut((0, n), (n, n)).copy_from(&self.c);
        g.view_mut((n, 0), (n, n)).copy_from(&self.c.transpose());
        g
    }

    pub fn is_canonical(&self) -> bool {
        identity_deviation(&self.gram) <= CANONICAL_TOLERANCE
    }

    fn has_cross_correlations(&self) -> bool {
        self.c.iter().any(|v| *v != 0.0)
    }

    /// Partial trace onto `subset`: the sub-blocks of every moment matrix.
    pub fn restrict(&self, subset: &[usize]) -> Result<Self> {
        let n = self.num_modes();
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut seen = vec![false; n];
        for &i in subset {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(crate::error::invalid(
                    "subset",
                    format!("index {i} appears twice"),
                ));
            }
        }
        let pick = |m: &DMatrix<f64>| {
            DMatrix::from_fn(subset.len(), subset.len(), |a, b| m[(subset[a], subset[b])])
        };
        Ok(Self {
            x: pick(&self.x),
            p: pick(&self.p),
            c: pick(&self.c),
            gram: pick(&self.gram),
        })
    }

    /// New modes `q' = T q`, `p' = T p` (the same linear map on both quadratures).
    ///
    /// The result has Gram matrix `T G T^T`; it stays canonical iff `T` is orthogonal
    /// (or, more generally, maps `G` to the identity).
    pub fn transform_modes(&self, t: &DMatrix<f64>) -> Result<Self> {
        if t.ncols() != self.num_modes() {
            return Err(Error::GridMismatch(format!(
                "map has {} columns for {} modes",
                t.ncols(),
                self.num_modes()
            )));
        }
        let tt = t.transpose();
        Ok(Self {
            x: symmetrize(&(t * &self.x * &tt)),
            p: symmetrize(&(t * &self.p * &tt)),
            c: t * &self.c * &tt,
            gram: t * &self.gram * &tt,
        })
    }

    /// `Gamma -> S Gamma S^T` for a symplectic `S` acting on `(q, p)`.
    pub fn symplectic_transform(&self, s: &DMatrix<f64>) -> Result<Self> {
        let dim = 2 * self.num_modes();
        if s.shape() != (dim, dim) {
            return Err(Error::GridMismatch(format!(
                "symplectic map must be {dim} x {dim}, got {:?}",
                s.shape()
            )));
        }
        let mut out = Self::from_full(&(s * self.full() * s.transpose()))?;
        out.gram = self.gram.clone();
        Ok(out)
    }

    /// Symplectic eigenvalues, sorted descending.
    ///
    /// Without cross correlations these are the eigenvalues of the principal square
    /// root of `X P`, obtained from the symmetric matrix `X^{1/2} P X^{1/2}`.
    /// Otherwise the general route through `Omega Gamma` is taken.
    pub fn symplectic_spectrum(&self) -> Result<SymplecticSpectrum> {
        self.require_canonical()?;
        if self.has_cross_correlations() {
            return self.symplectic_spectrum_general();
        }
        let sx = sqrt_spd(&self.x, "position covariance")?;
        let m = symmetrize(&(&sx * &self.p * &sx));
        let eig = nalgebra::SymmetricEigen::new(m);
        let values = eig
            .eigenvalues
            .iter()
            .map(|&v| if v > 0.0 { v.sqrt() } else { 0.0 })
            .collect();
        SymplecticSpectrum::from_values(values)
    }

    /// Symplectic eigenvalues as the positive imaginary parts of the spectrum of
    /// `Omega Gamma`, with `Omega = [[0, I], [-I, 0]]`.
    pub fn symplectic_spectrum_general(&self) -> Result<SymplecticSpectrum> {
        self.require_canonical()?;
        let n = self.num_modes();
        let gamma = self.full();
        let min = nalgebra::SymmetricEigen::new(gamma.clone()).eigenvalues.min();
        if !(min > 0.0) {
            return Err(Error::NotPositiveDefinite {
                what: "covariance",
                min_eigenvalue: min,
            });
        }
        let mut omega = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            omega[(i, n + i)] = 1.0;
            omega[(n + i, i)] = -1.0;
        }
        let eigs = (omega * gamma).complex_eigenvalues();
        let mut imag: Vec<f64> = eigs.iter().map(|z| z.im).collect();
        imag.sort_by(|a, b| b.total_cmp(a));
        // Eigenvalues come in pairs +-i nu; keep the upper half.
        SymplecticSpectrum::from_values(imag.into_iter().take(n).collect())
    }

    pub fn entropy(&self) -> Result<f64> {
        Ok(self.symplectic_spectrum()?.entropy())
    }

    fn require_canonical(&self) -> Result<()> {
        let deviation = identity_deviation(&self.gram);
        if deviation > CANONICAL_TOLERANCE {
            return Err(Error::NotCanonical { deviation });
        }
        Ok(())
    }
}

/// Symplectic eigenvalues `nu_i >= 1/2`, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum {
    values: Vec<f64>,
}

impl SymplecticSpectrum {
    /// Validates and sorts raw symplectic eigenvalues.
    ///
    /// Values within [`CLAMP_TOLERANCE`] below 1/2 are clamped to 1/2.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        for v in values.iter_mut() {
            if !v.is_finite() || *v < 0.5 - CLAMP_TOLERANCE {
                return Err(Error::UncertaintyViolation { value: *v });
            }
            if *v < 0.5 {
                *v = 0.5;
            }
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.5)
    }

    /// Von Neumann entropy in nats.
    pub fn entropy(&self) -> f64 {
        self.values.iter().map(|&nu| mode_entropy(nu)).sum()
    }
}

/// Entropy of a single mode with symplectic eigenvalue `nu`:
/// `(nu + 1/2) ln(nu + 1/2) - (nu - 1/2) ln(nu - 1/2)`, zero at `nu = 1/2`.
pub fn mode_entropy(nu: f64) -> f64 {
    let plus = nu + 0.5;
    let minus = nu - 0.5;
    let lower = if minus > 0.0 { minus * minus.ln() } else { 0.0 };
    plus * plus.ln() - lower
}

/// Vacuum entanglement entropy (nats) of the lattice sites in `region`.
pub fn entanglement_entropy(model: &LatticeModel, region: &[usize]) -> Result<f64> {
    model.vacuum_covariance()?.restrict(region)?.entropy()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn single(x: f64, p: f64) -> CovarianceMatrix {
        CovarianceMatrix::canonical(DMatrix::from_element(1, 1, x), DMatrix::from_element(1, 1, p))
    }

    fn two_mode_squeezer(r: f64) -> DMatrix<f64> {
        // q_pm = (q1 +- q2)/sqrt 2 squeezed by e^{-+r}; p's get the inverse.
        let (e, ei) = (r.exp(), (-r).exp());
        let (a, b) = (0.5 * (e + ei), 0.5 * (e - ei));
        DMatrix::from_row_slice(
            4,
            4,
            &[
                a, b, 0.0, 0.0, //
                b, a, 0.0, 0.0, //
                0.0, 0.0, a, -b, //
                0.0, 0.0, -b, a,
            ],
        )
    }

    #[test]
    fn single_mode_spectra() {
        let vac = single(0.5, 0.5).symplectic_spectrum().unwrap();
        assert_eq!(vac.values(), &[0.5]);
        assert_eq!(vac.entropy(), 0.0);

        let thermal = single(1.5, 1.5).symplectic_spectrum().unwrap();
        assert_abs_diff_eq!(thermal.values()[0], 1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(thermal.entropy(), 2.0 * 2f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn entropy_of_pure_spectrum_is_zero() {
        let s = SymplecticSpectrum::from_values(vec![0.5, 0.5, 0.5]).unwrap();
        assert_eq!(s.entropy(), 0.0);
    }

    #[test]
    fn clamping_and_violations() {
        let s = SymplecticSpectrum::from_values(vec![0.5 - 5e-10, 0.7]).unwrap();
        assert_eq!(s.values(), &[0.7, 0.5]);
        assert!(matches!(
            SymplecticSpectrum::from_values(vec![0.49]),
            Err(Error::UncertaintyViolation { .. })
        ));
        assert!(single(0.1, 0.1).symplectic_spectrum().is_err());
    }

    #[test]
    fn two_mode_squeezed_vacuum() {
        let r = 1.0;
        let vac = CovarianceMatrix::canonical(
            DMatrix::identity(2, 2) * 0.5,
            DMatrix::identity(2, 2) * 0.5,
        );
        let tmsv = vac.symplectic_transform(&two_mode_squeezer(r)).unwrap();
        let full = tmsv.symplectic_spectrum().unwrap();
        for v in full.values() {
            assert_abs_diff_eq!(*v, 0.5, epsilon = 1e-12);
        }
        let one = tmsv.restrict(&[0]).unwrap().symplectic_spectrum().unwrap();
        assert_abs_diff_eq!(one.values()[0], (2.0 * r).cosh() / 2.0, epsilon = 1e-12);
        // pure-state symmetry
        let other = tmsv.restrict(&[1]).unwrap().entropy().unwrap();
        assert_abs_diff_eq!(one.entropy(), other, epsilon = 1e-12);
    }

    #[test]
    fn general_route_handles_cross_correlations() {
        // Squeeze then rotate by 45 degrees: pure state with C != 0.
        let r: f64 = 0.7;
        let (c, s) = (std::f64::consts::FRAC_PI_4.cos(), std::f64::consts::FRAC_PI_4.sin());
        let rot = DMatrix::from_row_slice(2, 2, &[c, s, -s, c]);
        let sq = DMatrix::from_row_slice(2, 2, &[r.exp(), 0.0, 0.0, (-r).exp()]);
        let thermal = single(1.5, 1.5);
        let state = thermal.symplectic_transform(&(rot * sq)).unwrap();
        assert!(state.c()[(0, 0)].abs() > 0.1);
        let nu = state.symplectic_spectrum().unwrap();
        assert_abs_diff_eq!(nu.values()[0], 1.5, epsilon = 1e-12);
    }

    #[test]
    fn both_routes_agree_without_cross_correlations() {
        let model = LatticeModel::new(24, 0.2).unwrap();
        let block = model
            .vacuum_covariance()
            .unwrap()
            .restrict(&[3, 4, 5, 6, 7, 8])
            .unwrap();
        let a = block.symplectic_spectrum().unwrap();
        let b = block.symplectic_spectrum_general().unwrap();
        for (u, v) in a.values().iter().zip(b.values()) {
            assert_abs_diff_eq!(*u, *v, epsilon = 1e-9);
        }
    }

    #[test]
    fn restrict_examples() {
        let cov = LatticeModel::new(10, 0.4).unwrap().vacuum_covariance().unwrap();
        let all: Vec<usize> = (0..10).collect();
        assert_eq!(cov.restrict(&all).unwrap(), cov);
        assert_eq!(cov.restrict(&[]).unwrap_err(), Error::EmptySubset);
        assert_eq!(
            cov.restrict(&[1, 10]).unwrap_err(),
            Error::IndexOutOfRange { index: 10, len: 10 }
        );
        assert!(cov.restrict(&[2, 2]).is_err());

        let decoupled = CovarianceMatrix::canonical(
            DMatrix::identity(2, 2) * 0.5,
            DMatrix::identity(2, 2) * 0.5,
        );
        let one = decoupled.restrict(&[0]).unwrap();
        assert_eq!(one.x()[(0, 0)], 0.5);
        assert_eq!(one.p()[(0, 0)], 0.5);
    }

    #[test]
    fn lattice_block_is_mixed() {
        let region: Vec<usize> = (0..8).collect();
        let block = LatticeModel::new(64, 0.1)
            .unwrap()
            .vacuum_covariance()
            .unwrap()
            .restrict(&region)
            .unwrap();
        assert!(block.symplectic_spectrum().unwrap().max() > 0.5 + 1e-6);
    }

    #[test]
    fn vacuum_is_pure() {
        for (n, m) in [(2, 1.0), (17, 0.05), (64, 0.5)] {
            let cov = LatticeModel::new(n, m).unwrap().vacuum_covariance().unwrap();
            for v in cov.symplectic_spectrum().unwrap().values() {
                assert_abs_diff_eq!(*v, 0.5, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn global_state_has_zero_entropy() {
        let model = LatticeModel::new(32, 0.3).unwrap();
        let all: Vec<usize> = (0..32).collect();
        assert!(entanglement_entropy(&model, &all).unwrap().abs() < 1e-8);
    }

    #[test]
    fn complement_symmetry() {
        let model = LatticeModel::new(128, 0.1).unwrap();
        let a: Vec<usize> = (10..50).collect();
        let b: Vec<usize> = (0..10).chain(50..128).collect();
        let sa = entanglement_entropy(&model, &a).unwrap();
        let sb = entanglement_entropy(&model, &b).unwrap();
        assert!((sa - sb).abs() < 1e-6, "{sa} vs {sb}");
    }

    #[test]
    fn entropy_decreases_with_mass() {
        let region: Vec<usize> = (0..16).collect();
        let s: Vec<f64> = [0.01, 0.1, 0.5, 1.0]
            .iter()
            .map(|&m| entanglement_entropy(&LatticeModel::new(128, m).unwrap(), &region).unwrap())
            .collect();
        assert!(s.windows(2).all(|w| w[1] < w[0]), "{s:?}");
    }

    #[test]
    fn non_canonical_modes_are_rejected() {
        let mut cov = single(0.5, 0.5);
        cov.gram[(0, 0)] = 0.9;
        assert!(matches!(cov.symplectic_spectrum(), Err(Error::NotCanonical { .. })));
    }
}
