//! Newton-Wigner kernels under Gaussian coarse graining.
//!
//! All continuum integrals are done in momentum space against the Fourier
//! transform of the detection profile,
//! `g(k) = int G_eps(x) e^{-ikx} dx = (8 pi eps^2)^{1/4} exp(-eps^2 k^2)`,
//! so the distributional kernels `R`, `R^{-1}` are never sampled pointwise.
//! Writing `w = omega_k / m`,
//!
//! ```text
//! R_eps(x)    = int dk/2pi  sqrt(omega_k) g(k) e^{ikx}
//! Rinv_eps(x) = int dk/2pi  g(k) e^{ikx} / sqrt(omega_k)
//! f+-_eps(x)  = int dk/2pi  g(k) e^{ikx} (sqrt(w) +- 1/sqrt(w)) / 2
//! ```
//!
//! In units of `eps` every kernel depends on `mu = m eps` only:
//! `R_eps(x) = R(x/eps; mu)/eps`, `Rinv_eps(x) = Rinv(x/eps; mu)` and
//! `f+-_eps(x) = f+-(x/eps; mu)/sqrt(eps)`. Tables are cached per `mu`.
//!
//! The momentum-space width of the smeared kernels is fixed by the exact
//! transform above (`exp(-eps^2 k^2)`); after rescaling `k -> m k` this is a
//! Gaussian of width parameter `1/(2 m eps)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::Complex;

use crate::coarse_grain::{gaussian_profile, ModeFamily};
use crate::error::{invalid, Error, Result};
use crate::quadrature::{self, composite_nodes, cosine_transform, gaussian_cutoff, Estimate};

/// Requested absolute accuracy of kernel samples and norms.
pub const QUADRATURE_TARGET: f64 = 1e-12;

/// Largest per-sample error bound a kernel table may carry.
pub const CERTIFIED_TOLERANCE: f64 = 1e-10;

/// Range of `m eps` over which the convergence metrics are supported.
pub const MU_RANGE: (f64, f64) = (0.1, 100.0);

/// Default kernel grid: `[-8 eps, 8 eps]` with 1025 points.
pub const DEFAULT_HALF_WIDTH: f64 = 8.0;
pub const DEFAULT_POINTS: usize = 1025;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    REps,
    RinvEps,
    FPlus,
    FMinus,
    GaussProfile,
}

/// Symmetric uniform position grid.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelGrid {
    points: Vec<f64>,
}

impl KernelGrid {
    /// `count` points evenly spaced on `[-half_width, half_width]`; `count` must be odd.
    pub fn uniform(half_width: f64, count: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(invalid("half_width", format!("must be positive, got {half_width}")));
        }
        if count < 3 || count % 2 == 0 {
            return Err(invalid("points", format!("need an odd count >= 3, got {count}")));
        }
        let c = (count / 2) as f64;
        let h = half_width / c;
        let points = (0..count).map(|i| (i as f64 - c) * h).collect();
        Ok(Self { points })
    }

    /// `[-8 eps, 8 eps]`, 1025 points.
    pub fn default_for(epsilon: f64) -> Result<Self> {
        Self::uniform(DEFAULT_HALF_WIDTH * epsilon, DEFAULT_POINTS)
    }

    /// A grid with the default resolution (`eps / 64`) that is wide enough for the
    /// `exp(-m |x|)` tails of the kernels to fall below `1e-12`.
    pub fn covering(epsilon: f64, mass: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(invalid("mass", "must be positive"));
        }
        let half = DEFAULT_HALF_WIDTH * epsilon + 40.0 / mass;
        let step = 2.0 * DEFAULT_HALF_WIDTH * epsilon / (DEFAULT_POINTS - 1) as f64;
        let half_count = (half / step).ceil() as usize;
        Self::uniform(half_count as f64 * step, 2 * half_count + 1)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn step(&self) -> f64 {
        self.points[1] - self.points[0]
    }
}

/// Sampled kernel with a per-sample absolute error bound.
///
/// Samples are real: every kernel here is the transform of an even real function
/// of `k`, evaluated as a cosine transform, so imaginary parts vanish identically.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub kind: KernelKind,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub quadrature_tol: f64,
}

impl KernelTable {
    /// Trapezoidal `int |v|^2 dx` over the grid, with the error propagated from
    /// `quadrature_tol`.
    pub fn l2_norm_squared(&self) -> Estimate {
        let h = self.grid[1] - self.grid[0];
        let n = self.values.len();
        let weight = |i: usize| if i == 0 || i + 1 == n { 0.5 * h } else { h };
        let mut value = 0.0;
        let mut abs_sum = 0.0;
        let mut width = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let w = weight(i);
            value += w * v * v;
            abs_sum += w * v.abs();
            width += w;
        }
        let t = self.quadrature_tol;
        Estimate {
            value,
            error: 2.0 * t * abs_sum + t * t * width,
        }
    }

    pub fn l2_norm(&self) -> Estimate {
        let sq = self.l2_norm_squared();
        let value = sq.value.sqrt();
        let error = if value > 0.0 {
            sq.error / (2.0 * value)
        } else {
            sq.error.sqrt()
        };
        Estimate { value, error }
    }

    /// `max |v(x) - v(-x)|`, assuming the grid is symmetric.
    pub fn parity_defect(&self) -> f64 {
        let n = self.values.len();
        (0..n / 2).fold(0.0f64, |acc, i| {
            acc.max((self.values[i] - self.values[n - 1 - i]).abs())
        })
    }

    /// Largest magnitude among the two end samples.
    pub fn edge_magnitude(&self) -> f64 {
        self.values[0].abs().max(self.values[self.values.len() - 1].abs())
    }

    /// Pointwise difference `self - other` as a table of the given kind.
    pub fn difference(&self, other: &KernelTable, kind: KernelKind) -> Result<KernelTable> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("kernel tables on different grids".into()));
        }
        Ok(KernelTable {
            kind,
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
            quadrature_tol: self.quadrature_tol + other.quadrature_tol,
        })
    }
}

/// Momentum weights of the four kernels in units `eps = 1`, `m = mu`.
fn momentum_weight(kind: KernelKind, mu: f64) -> impl Fn(f64) -> f64 {
    let ghat0 = (8.0 * PI).powf(0.25);
    move |u: f64| {
        let g = ghat0 * (-u * u).exp() / PI; // dk/2pi over the full line = dk/pi on k >= 0
        let omega = (u * u + mu * mu).sqrt();
        match kind {
            KernelKind::REps => g * omega.sqrt(),
            KernelKind::RinvEps => g / omega.sqrt(),
            KernelKind::FPlus | KernelKind::FMinus => {
                let w = (omega / mu).sqrt();
                let sign = if kind == KernelKind::FPlus { 1.0 } else { -1.0 };
                g * 0.5 * (w + sign / w)
            }
            KernelKind::GaussProfile => g,
        }
    }
}

type CacheKey = (KernelKind, u64, Vec<u64>);

fn cache() -> &'static RwLock<HashMap<CacheKey, Arc<(Vec<f64>, f64)>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<(Vec<f64>, f64)>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Dimensionless table (units `eps = 1`) for `mu` on the scaled grid.
fn dimensionless_table(kind: KernelKind, mu: f64, scaled: &[f64]) -> Result<Arc<(Vec<f64>, f64)>> {
    let key = (kind, mu.to_bits(), scaled.iter().map(|x| x.to_bits()).collect());
    if let Some(hit) = cache().read().expect("kernel cache poisoned").get(&key) {
        return Ok(Arc::clone(hit));
    }
    let (values, tol) = cosine_transform(
        momentum_weight(kind, mu),
        gaussian_cutoff(),
        scaled,
        QUADRATURE_TARGET,
    )?;
    if tol > CERTIFIED_TOLERANCE {
        return Err(Error::QuadratureNotConverged {
            estimate: tol,
            tolerance: CERTIFIED_TOLERANCE,
        });
    }
    let entry = Arc::new((values, tol));
    let mut guard = cache().write().expect("kernel cache poisoned");
    Ok(Arc::clone(guard.entry(key).or_insert(entry)))
}

fn check_width_and_mass(epsilon: f64, mass: f64) -> Result<()> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(invalid("epsilon", format!("must be positive, got {epsilon}")));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(invalid("mass", format!("must be positive, got {mass}")));
    }
    Ok(())
}

fn physical_table(kind: KernelKind, epsilon: f64, mass: f64, grid: &KernelGrid) -> Result<KernelTable> {
    check_width_and_mass(epsilon, mass)?;
    let mu = mass * epsilon;
    let scaled: Vec<f64> = grid.points.iter().map(|x| x / epsilon).collect();
    let table = dimensionless_table(kind, mu, &scaled)?;
    let factor = match kind {
        KernelKind::REps => 1.0 / epsilon,
        KernelKind::RinvEps => 1.0,
        _ => 1.0 / epsilon.sqrt(),
    };
    Ok(KernelTable {
        kind,
        grid: grid.points.clone(),
        values: table.0.iter().map(|v| v * factor).collect(),
        quadrature_tol: (table.1 * factor).max(quadrature::ERROR_FLOOR),
    })
}

/// Smeared `R_eps` and `R^{-1}_eps` sampled on `grid`.
pub fn smeared_r_kernels(epsilon: f64, mass: f64, grid: &KernelGrid) -> Result<(KernelTable, KernelTable)> {
    Ok((
        physical_table(KernelKind::REps, epsilon, mass, grid)?,
        physical_table(KernelKind::RinvEps, epsilon, mass, grid)?,
    ))
}

/// `f+_eps` and `f-_eps` sampled on `grid`, each from its own momentum integrand.
pub fn f_kernels(epsilon: f64, mass: f64, grid: &KernelGrid) -> Result<(KernelTable, KernelTable)> {
    Ok((
        physical_table(KernelKind::FPlus, epsilon, mass, grid)?,
        physical_table(KernelKind::FMinus, epsilon, mass, grid)?,
    ))
}

/// Exact samples of the detection profile `G_eps`.
pub fn gauss_profile_table(epsilon: f64, grid: &KernelGrid) -> KernelTable {
    KernelTable {
        kind: KernelKind::GaussProfile,
        grid: grid.points.clone(),
        values: grid.points.iter().map(|&x| gaussian_profile(x, epsilon)).collect(),
        quadrature_tol: 0.0,
    }
}

/// How far the coarse-grained Newton-Wigner operators are from the
/// coarse-grained local ladder operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceMetrics {
    /// `||f-|| / ||f+||`.
    pub ratio: f64,
    /// `||f+ - G_eps|| / ||G_eps||`.
    pub gauss_distance: f64,
    /// `||f-||^2` (the kernel-path vacuum occupation).
    pub minus_norm_squared: Estimate,
    pub plus_norm_squared: Estimate,
}

/// L2 metrics of `f+-` computed by Parseval in momentum space.
pub fn convergence_metrics(epsilon: f64, mass: f64) -> Result<ConvergenceMetrics> {
    check_width_and_mass(epsilon, mass)?;
    let mu = mass * epsilon;
    if !(MU_RANGE.0..=MU_RANGE.1).contains(&mu) {
        return Err(invalid(
            "m*eps",
            format!("{mu} outside the supported window [{}, {}]", MU_RANGE.0, MU_RANGE.1),
        ));
    }
    // |g(k)|^2 / 2pi over the full line, folded onto k >= 0.
    let g2 = move |k: f64| (8.0 * PI).sqrt() * epsilon * (-2.0 * epsilon * epsilon * k * k).exp() / PI;
    let half = move |k: f64, sign: f64| {
        let w = ((k * k + mass * mass).sqrt() / mass).sqrt();
        0.5 * (w + sign / w)
    };
    let k_max = gaussian_cutoff() / epsilon;
    let tol = QUADRATURE_TARGET;
    let minus = quadrature::integrate(|k| g2(k) * half(k, -1.0).powi(2), 0.0, k_max, tol)?;
    let plus = quadrature::integrate(|k| g2(k) * half(k, 1.0).powi(2), 0.0, k_max, tol)?;
    let dist = quadrature::integrate(|k| g2(k) * (half(k, 1.0) - 1.0).powi(2), 0.0, k_max, tol)?;
    let norm_g = quadrature::integrate(g2, 0.0, k_max, tol)?;
    Ok(ConvergenceMetrics {
        ratio: (minus.value / plus.value).sqrt(),
        gauss_distance: (dist.value / norm_g.value).sqrt(),
        minus_norm_squared: minus,
        plus_norm_squared: plus,
    })
}

/// How `<Omega| a_NW^dagger a_NW |Omega>` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumberPath {
    /// The smeared NW annihilator is a combination of `a_k` only: exactly zero.
    Momentum,
    /// Rebuilt from the position kernels `f+-` acting on local modes treated as
    /// vacuum-annihilating; evaluates to `int |f-_eps|^2`.
    Kernel,
}

/// Vacuum occupation of the smeared NW mode centered at `center`.
pub fn nw_vacuum_number(epsilon: f64, mass: f64, center: f64, path: NumberPath) -> Result<Estimate> {
    check_width_and_mass(epsilon, mass)?;
    if !center.is_finite() {
        return Err(invalid("center", "must be finite"));
    }
    match path {
        NumberPath::Momentum => Ok(Estimate { value: 0.0, error: 0.0 }),
        NumberPath::Kernel => {
            // translation invariance: the integral does not depend on the center
            let grid = KernelGrid::covering(epsilon, mass)?;
            let (_, minus) = f_kernels(epsilon, mass, &grid)?;
            Ok(minus.l2_norm_squared())
        }
    }
}

/// One-particle wavefunction in momentum space, sampled on a quadrature grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavepacket {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    amplitudes: Vec<Complex<f64>>,
}

const PACKET_PANELS: usize = 512;

impl Wavepacket {
    /// Samples `f` on `[k_min, k_max]` and normalizes so that `int |f|^2 dk = 1`.
    pub fn from_fn(k_min: f64, k_max: f64, f: impl Fn(f64) -> Complex<f64>) -> Result<Self> {
        if !(k_min < k_max) {
            return Err(invalid("k_range", format!("empty range [{k_min}, {k_max}]")));
        }
        let (nodes, weights): (Vec<f64>, Vec<f64>) =
            composite_nodes(k_min, k_max, PACKET_PANELS).into_iter().unzip();
        let mut amplitudes: Vec<Complex<f64>> = nodes.iter().map(|&k| f(k)).collect();
        let norm: f64 = amplitudes
            .iter()
            .zip(&weights)
            .map(|(a, w)| w * a.norm_sqr())
            .sum::<f64>()
            .sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::VanishingNorm);
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(Self {
            nodes,
            weights,
            amplitudes,
        })
    }

    /// Packet whose position wavefunction is `G_width(x - center)`.
    pub fn gaussian(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(invalid("width", "must be positive"));
        }
        let k_max = gaussian_cutoff() / width;
        let g0 = (8.0 * PI * width * width).powf(0.25) / (2.0 * PI).sqrt();
        Self::from_fn(-k_max, k_max, |k| {
            Complex::from_polar(g0 * (-width * width * k * k).exp(), -k * center)
        })
    }

    /// The state `a^dagger_{eps}(center) |Omega>` built with ladder mass `ladder_mass`.
    pub fn coarse_grained_excitation(
        center: f64,
        epsilon: f64,
        mass: f64,
        ladder_mass: f64,
    ) -> Result<Self> {
        check_width_and_mass(epsilon, mass)?;
        let k_max = gaussian_cutoff() / epsilon;
        Self::from_fn(-k_max, k_max, |k| excitation_amplitude(k, center, epsilon, mass, ladder_mass))
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&self.weights)
            .map(|(a, w)| w * a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Position-space wavefunction `int dk/sqrt(2 pi) f(k) e^{ikx}`.
    pub fn position_amplitude(&self, x: f64) -> Complex<f64> {
        let s: Complex<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.amplitudes)
            .map(|((&k, &w), a)| a * Complex::from_polar(w, k * x))
            .sum();
        s / (2.0 * PI).sqrt()
    }

    /// Largest `|k|` where `|f(k)|` exceeds `1e-6` of its peak.
    fn bandwidth(&self) -> f64 {
        let peak = self.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max);
        self.nodes
            .iter()
            .zip(&self.amplitudes)
            .filter(|(_, a)| a.norm() > 1e-6 * peak)
            .map(|(k, _)| k.abs())
            .fold(0.0, f64::max)
    }
}

/// Momentum wavefunction of `a^dagger_{eps}(x) |Omega>`:
/// `e^{-ikx} g(k) (sqrt(m'/omega) + sqrt(omega/m')) / (2 sqrt(2 pi))`.
fn excitation_amplitude(k: f64, center: f64, epsilon: f64, mass: f64, ladder_mass: f64) -> Complex<f64> {
    let ghat = (8.0 * PI * epsilon * epsilon).powf(0.25) * (-epsilon * epsilon * k * k).exp();
    let omega = (k * k + mass * mass).sqrt();
    let r = (ladder_mass / omega).sqrt();
    let amp = ghat * 0.5 * (r + 1.0 / r) / (2.0 * PI).sqrt();
    Complex::from_polar(amp, -k * center)
}

/// `|<psi|psi_eff>|^2 / <psi_eff|psi_eff>` with
/// `psi_eff = sum_j d psi~(x_j) a^dagger_{j,eps} |Omega>`, all overlaps taken in
/// momentum space.
pub fn one_particle_localization_fidelity(
    packet: &Wavepacket,
    family: &ModeFamily,
    mass: f64,
) -> Result<f64> {
    let epsilon = family.epsilon();
    check_width_and_mass(epsilon, mass)?;
    let d = family.spacing();
    let nyquist = PI / d;
    let bandwidth = packet.bandwidth();
    if bandwidth > nyquist {
        return Err(invalid(
            "packet",
            format!("bandwidth {bandwidth:.4} exceeds the family Nyquist limit {nyquist:.4}"),
        ));
    }
    let ladder_mass = family.ladder_mass();
    let centers = family.centers();
    let coeffs: Vec<Complex<f64>> = centers
        .iter()
        .map(|&x| packet.position_amplitude(x) * d)
        .collect();

    // <psi | h_j>
    let overlap: Complex<f64> = centers
        .iter()
        .zip(&coeffs)
        .map(|(&x, c)| {
            let inner: Complex<f64> = packet
                .nodes
                .iter()
                .zip(&packet.weights)
                .zip(&packet.amplitudes)
                .map(|((&k, &w), f)| {
                    f.conj() * excitation_amplitude(k, x, epsilon, mass, ladder_mass) * w
                })
                .sum();
            c * inner
        })
        .sum();

    // <h_j | h_l> depends on x_j - x_l only: a cosine transform of |h|^2.
    let mut separations: Vec<f64> = Vec::new();
    let mut pair_index = vec![vec![0usize; centers.len()]; centers.len()];
    for (j, xj) in centers.iter().enumerate() {
        for (l, xl) in centers.iter().enumerate() {
            let s = (xj - xl).abs();
            let idx = match separations.iter().position(|t| (t - s).abs() <= 1e-12 * (1.0 + s)) {
                Some(i) => i,
                None => {
                    separations.push(s);
                    separations.len() - 1
                }
            };
            pair_index[j][l] = idx;
        }
    }
    let weight = |k: f64| {
        let a = excitation_amplitude(k, 0.0, epsilon, mass, ladder_mass).re;
        2.0 * a * a
    };
    let (gram, _) = cosine_transform(weight, gaussian_cutoff() / epsilon, &separations, QUADRATURE_TARGET)?;
    let mut norm_sq = Complex::new(0.0, 0.0);
    for (j, cj) in coeffs.iter().enumerate() {
        for (l, cl) in coeffs.iter().enumerate() {
            norm_sq += cj.conj() * cl * gram[pair_index[j][l]];
        }
    }
    let norm_sq = norm_sq.re;
    if !(norm_sq > 1e-300) {
        return Err(Error::VanishingNorm);
    }
    Ok((overlap.norm_sqr() / norm_sq).min(1.0))
}
