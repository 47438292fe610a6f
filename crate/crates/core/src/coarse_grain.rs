//! Gaussian detection profiles and the coarse-grained mode algebra.
//!
//! A profile of width `eps` centered at `c` samples
//! `G(x) = (2 pi eps^2)^{-1/4} exp(-(x - c)^2 / (4 eps^2))` on the lattice
//! sites (minimum-image distance on the ring) and is renormalized so that
//! `sum_i g_i^2 a = 1`. A family of `M` such profiles at centers `j d` defines
//! coarse-grained quadratures `q_j = sum_i sqrt(a) g_j(x_i) q_i` (likewise for
//! `p`), whose commutators `[q_j, p_k] = i G_jk` are given by the profile
//! overlap matrix `G`.

use nalgebra::{Complex, DMatrix, SymmetricEigen};

use crate::error::{invalid, Error, Result};
use crate::gaussian::CovarianceMatrix;
use crate::lattice::LatticeModel;
use crate::linalg::{inv_sqrt_spd, symmetrize};

/// Profiles whose nearest-neighbour overlap `exp(-d^2 / 8 eps^2)` is below this
/// count as approximately canonical.
pub const CANONICAL_OVERLAP_THRESHOLD: f64 = 1e-4;

/// Largest sample allowed at the point of the ring farthest from the center.
pub const EDGE_TOLERANCE: f64 = 1e-12;

/// Analytic overlap `int G_eps(x) G_eps(x - d) dx` of two continuum profiles.
pub fn analytic_overlap(distance: f64, epsilon: f64) -> f64 {
    (-distance * distance / (8.0 * epsilon * epsilon)).exp()
}

/// Continuum profile `G_eps(x)`.
pub fn gaussian_profile(x: f64, epsilon: f64) -> f64 {
    (2.0 * std::f64::consts::PI * epsilon * epsilon).powf(-0.25)
        * (-x * x / (4.0 * epsilon * epsilon)).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    center: f64,
    epsilon: f64,
    spacing: f64,
    samples: Vec<f64>,
}

impl Profile {
    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `g(x_i)` for every lattice site `x_i = i a`.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Discrete `sum_i g(x_i) h(x_i) a`.
    pub fn overlap(&self, other: &Profile) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.spacing
    }
}

/// Samples a normalized Gaussian detection profile on the lattice of `model`.
pub fn make_profile(center: f64, epsilon: f64, model: &LatticeModel) -> Result<Profile> {
    let a = model.spacing();
    if !(epsilon.is_finite() && epsilon >= 2.0 * a) {
        return Err(invalid(
            "epsilon",
            format!("width {epsilon} is below the resolvable floor 2a = {}", 2.0 * a),
        ));
    }
    if !center.is_finite() {
        return Err(invalid("center", "must be finite"));
    }
    let length = model.total_length();
    let mut samples: Vec<f64> = (0..model.num_sites())
        .map(|i| {
            let dx = (i as f64 * a - center).rem_euclid(length);
            let dx = if dx >= 0.5 * length { dx - length } else { dx };
            gaussian_profile(dx, epsilon)
        })
        .collect();
    let norm = (samples.iter().map(|g| g * g).sum::<f64>() * a).sqrt();
    samples.iter_mut().for_each(|g| *g /= norm);
    let edge_value = samples.iter().copied().fold(f64::INFINITY, f64::min);
    if edge_value > EDGE_TOLERANCE {
        return Err(Error::ProfileTruncated { edge_value });
    }
    Ok(Profile {
        center,
        epsilon,
        spacing: a,
        samples,
    })
}

/// `M` equally spaced profiles of common width at centers `j d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeFamily {
    profiles: Vec<Profile>,
    spacing: f64,
    epsilon: f64,
    ladder_mass: f64,
    num_sites: usize,
    lattice_spacing: f64,
}

impl ModeFamily {
    /// Builds `count` profiles at `j * spacing`, `j = 0..count`.
    ///
    /// `ladder_mass` is the mass `m'` used to form ladder operators from the
    /// coarse-grained quadratures.
    pub fn new(
        model: &LatticeModel,
        count: usize,
        spacing: f64,
        epsilon: f64,
        ladder_mass: f64,
    ) -> Result<Self> {
        if count == 0 {
            return Err(invalid("M", "family needs at least one profile"));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(invalid("d", format!("spacing must be positive, got {spacing}")));
        }
        if !(ladder_mass.is_finite() && ladder_mass > 0.0) {
            return Err(invalid(
                "ladder_mass",
                format!("m' must be positive, got {ladder_mass}"),
            ));
        }
        let profiles = (0..count)
            .map(|j| make_profile(j as f64 * spacing, epsilon, model))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            profiles,
            spacing,
            epsilon,
            ladder_mass,
            num_sites: model.num_sites(),
            lattice_spacing: model.spacing(),
        })
    }

    pub fn with_ladder_mass(mut self, ladder_mass: f64) -> Result<Self> {
        if !(ladder_mass.is_finite() && ladder_mass > 0.0) {
            return Err(invalid(
                "ladder_mass",
                format!("m' must be positive, got {ladder_mass}"),
            ));
        }
        self.ladder_mass = ladder_mass;
        Ok(self)
    }

    pub fn profiles(&self) -> &[Profile] {
        &self.profiles
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn ladder_mass(&self) -> f64 {
        self.ladder_mass
    }

    pub fn centers(&self) -> Vec<f64> {
        self.profiles.iter().map(Profile::center).collect()
    }

    /// `d / eps`.
    pub fn separation_ratio(&self) -> f64 {
        self.spacing / self.epsilon
    }

    /// Nearest-neighbour overlap of the continuum profiles, `exp(-d^2 / 8 eps^2)`.
    pub fn neighbour_overlap(&self) -> f64 {
        analytic_overlap(self.spacing, self.epsilon)
    }

    /// Whether `d >> eps` holds in the operational sense of
    /// [`CANONICAL_OVERLAP_THRESHOLD`]. A lone profile has no neighbours.
    pub fn is_approximately_canonical(&self) -> bool {
        self.len() == 1 || self.neighbour_overlap() < CANONICAL_OVERLAP_THRESHOLD
    }

    /// Discrete profile overlap matrix `G_jk = sum_i g_j(x_i) g_k(x_i) a`.
    pub fn gram(&self) -> DMatrix<f64> {
        let m = self.len();
        DMatrix::from_fn(m, m, |j, k| self.profiles[j].overlap(&self.profiles[k]))
    }

    fn check_grid(&self, model: &LatticeModel) -> Result<()> {
        if model.num_sites() != self.num_sites || model.spacing() != self.lattice_spacing {
            return Err(Error::GridMismatch(format!(
                "family sampled on {} sites (a = {}), model has {} sites (a = {})",
                self.num_sites,
                self.lattice_spacing,
                model.num_sites(),
                model.spacing()
            )));
        }
        Ok(())
    }
}

/// `[q_{j,eps}, p_{k,eps}] / i`, i.e. the profile Gram matrix.
pub fn commutator_matrix(family: &ModeFamily) -> DMatrix<f64> {
    family.gram()
}

/// Linear maps from lattice quadratures to coarse-grained quadratures.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureMaps {
    /// `M x N`, `q_cg = q_map * q_lattice`.
    pub q_map: DMatrix<f64>,
    /// `M x N`, `p_cg = p_map * p_lattice`.
    pub p_map: DMatrix<f64>,
}

pub fn quadrature_maps(family: &ModeFamily, model: &LatticeModel) -> Result<QuadratureMaps> {
    family.check_grid(model)?;
    let scale = model.spacing().sqrt();
    let rows = DMatrix::from_fn(family.len(), model.num_sites(), |j, i| {
        family.profiles[j].samples[i] * scale
    });
    Ok(QuadratureMaps {
        q_map: rows.clone(),
        p_map: rows,
    })
}

/// Symmetric (Loewdin) orthonormalizer `G^{-1/2}` of a Gram matrix.
pub fn lowdin(gram: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    inv_sqrt_spd(gram, "profile Gram matrix")
}

/// Rows are the Loewdin-orthonormalized profiles `G^{-1/2} g`, scaled by `sqrt(a)`
/// so that they are orthonormal in `R^N`.
pub fn orthonormal_profiles(family: &ModeFamily, model: &LatticeModel) -> Result<DMatrix<f64>> {
    let maps = quadrature_maps(family, model)?;
    let t = lowdin(&family.gram())?;
    Ok(t * maps.q_map)
}

/// Vacuum state of the coarse-grained modes.
///
/// With `orthonormalize = false` the raw moments are returned and the Gram matrix
/// is recorded as the commutator matrix; this requires an approximately canonical
/// family. With `orthonormalize = true` the modes are first passed through
/// [`lowdin`], so the result is exactly canonical.
pub fn reduced_cg_covariance(
    family: &ModeFamily,
    model: &LatticeModel,
    orthonormalize: bool,
) -> Result<CovarianceMatrix> {
    if !orthonormalize && !family.is_approximately_canonical() {
        return Err(invalid(
            "d",
            format!(
                "d / eps = {:.3} is too small for raw coarse-grained modes; request orthonormalization",
                family.separation_ratio()
            ),
        ));
    }
    let vacuum = model.vacuum_covariance()?;
    let maps = quadrature_maps(family, model)?;
    let raw = vacuum.transform_modes(&maps.q_map)?;
    if !orthonormalize {
        return Ok(raw);
    }
    let t = lowdin(raw.commutator_gram())?;
    let mut canonical = raw.transform_modes(&t)?;
    // T G T = I up to rounding; store the exact identity.
    let m = family.len();
    canonical = CovarianceMatrix::new(
        canonical.x().clone(),
        canonical.p().clone(),
        canonical.c().clone(),
        DMatrix::identity(m, m),
    )?;
    Ok(canonical)
}

/// Number and anomalous moments of the coarse-grained ladder operators
/// `a_j = (sqrt(m') q_j + i p_j / sqrt(m')) / sqrt 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderMoments {
    /// `<a_j^dagger a_k>`.
    pub number: DMatrix<Complex<f64>>,
    /// `<a_j a_k>`.
    pub anomalous: DMatrix<Complex<f64>>,
}

impl LadderMoments {
    /// Largest diagonal occupation `<a_j^dagger a_j>`.
    pub fn max_occupation(&self) -> f64 {
        self.number
            .diagonal()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Ladder moments from a coarse-grained covariance with mass `m'`.
///
/// `<a_j^dagger a_k> = (m' X + P / m' - G)/2 + i (C - C^T)/2` and
/// `<a_j a_k> = (m' X - P / m')/2 + i (C + C^T)/2`, where `G` is the commutator
/// Gram matrix of the modes.
pub fn ladder_moments_from(cov: &CovarianceMatrix, ladder_mass: f64) -> Result<LadderMoments> {
    if !(ladder_mass.is_finite() && ladder_mass > 0.0) {
        return Err(invalid(
            "ladder_mass",
            format!("m' must be positive, got {ladder_mass}"),
        ));
    }
    let (x, p, c, g) = (cov.x(), cov.p(), cov.c(), cov.commutator_gram());
    let n = cov.num_modes();
    let number = DMatrix::from_fn(n, n, |j, k| {
        Complex::new(
            0.5 * (ladder_mass * x[(j, k)] + p[(j, k)] / ladder_mass - g[(j, k)]),
            0.5 * (c[(j, k)] - c[(k, j)]),
        )
    });
    let anomalous = DMatrix::from_fn(n, n, |j, k| {
        Complex::new(
            0.5 * (ladder_mass * x[(j, k)] - p[(j, k)] / ladder_mass),
            0.5 * (c[(j, k)] + c[(k, j)]),
        )
    });
    Ok(LadderMoments { number, anomalous })
}

/// Vacuum ladder moments of a family, using its `ladder_mass` and raw moments.
pub fn ladder_moments(family: &ModeFamily, model: &LatticeModel) -> Result<LadderMoments> {
    family.check_grid(model)?;
    let vacuum = model.vacuum_covariance()?;
    let maps = quadrature_maps(family, model)?;
    let raw = vacuum.transform_modes(&maps.q_map)?;
    ladder_moments_from(&raw, family.ladder_mass())
}

/// How the inaccessible complement of the profile span is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Completion {
    /// Eigenvectors of the complementary projector `I - V^T V`.
    #[default]
    Projector,
    /// Modified Gram-Schmidt over the standard basis, in site order.
    GramSchmidt,
}

/// Orthogonal `N x N` matrix whose first `M` rows are the orthonormalized
/// profiles and whose remaining rows span the fine-grained complement.
///
/// Used as `q' = O q`, `p' = O p`, this is a canonical transformation splitting
/// the lattice modes into accessible and inaccessible subsystems.
pub fn complete_basis(
    family: &ModeFamily,
    model: &LatticeModel,
    method: Completion,
) -> Result<DMatrix<f64>> {
    let n = model.num_sites();
    let m = family.len();
    if m >= n {
        return Err(invalid("M", format!("need M < N, got M = {m}, N = {n}")));
    }
    let v = orthonormal_profiles(family, model).map_err(|e| match e {
        Error::NotPositiveDefinite { .. } => Error::RankDeficient,
        other => other,
    })?;
    let complement: Vec<nalgebra::DVector<f64>> = match method {
        Completion::Projector => {
            let projector = symmetrize(&(DMatrix::identity(n, n) - v.transpose() * &v));
            let eig = SymmetricEigen::new(projector);
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
            if eig.eigenvalues[order[n - m - 1]] < 0.5 {
                return Err(Error::RankDeficient);
            }
            order[..n - m]
                .iter()
                .map(|&i| eig.eigenvectors.column(i).into_owned())
                .collect()
        }
        Completion::GramSchmidt => {
            let mut basis: Vec<nalgebra::DVector<f64>> =
                v.row_iter().map(|r| r.transpose()).collect();
            let mut out = Vec::with_capacity(n - m);
            for i in 0..n {
                if out.len() == n - m {
                    break;
                }
                let mut w = nalgebra::DVector::zeros(n);
                w[i] = 1.0;
                // two passes for numerical orthogonality
                for _ in 0..2 {
                    for b in &basis {
                        let proj = b.dot(&w);
                        w.axpy(-proj, b, 1.0);
                    }
                }
                let norm = w.norm();
                if norm > 1e-6 {
                    w /= norm;
                    basis.push(w.clone());
                    out.push(w);
                }
            }
            if out.len() != n - m {
                return Err(Error::RankDeficient);
            }
            out
        }
    };
    let mut o = DMatrix::zeros(n, n);
    o.view_mut((0, 0), (m, n)).copy_from(&v);
    for (r, w) in complement.iter().enumerate() {
        o.row_mut(m + r).copy_from(&w.transpose());
    }
    Ok(o)
}
