//! Truncated bosonic Fock space over a few coarse-grained modes.
//!
//! States live in the span of occupation tuples with total occupation at most
//! `N`. With spin enabled every physical mode carries two internal states, which
//! is modelled by doubling the mode count: effective index `2 * mode` is spin up
//! and `2 * mode + 1` spin down.
//!
//! ```
//! use std::sync::Arc;
//! use cge_core::fock::{reduced_entropy, singlet_state, FockBasis};
//!
//! let basis = Arc::new(FockBasis::new(2, 2, true).unwrap());
//! let singlet = singlet_state(0, 1, &basis).unwrap();
//! let s = reduced_entropy(&singlet, &[0]).unwrap();
//! assert!((s.nats - 2f64.ln()).abs() < 1e-10);
//! ```

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};

pub type Complex64 = Complex<f64>;

/// Largest basis dimension the simulator will enumerate.
pub const DIMENSION_CAP: u128 = 1_000_000;

/// Largest number of stored occupation numbers (dimension times effective modes).
pub const STORAGE_CAP: u128 = 100_000_000;

/// Allowed deviation of `sum |amplitude|^2` from one.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Slack added to the bound in [`bound_check`].
pub const BOUND_SLACK: f64 = 1e-9;

/// Number of ways to place `particles` bosons in `modes` modes.
pub fn dim_exact(modes: usize, particles: usize) -> Result<u128> {
    if modes == 0 {
        return Err(invalid("modes", "at least one mode is required"));
    }
    binomial(modes as u128 + particles as u128 - 1, particles as u128).ok_or_else(|| {
        Error::DimensionOverflow(format!("C({modes}, {particles}) exceeds u128"))
    })
}

/// Dimension of the subspace of `modes` modes holding at most `max_total`
/// particles.
///
/// Both the sum over sectors and the closed form `(M + N)! / (M! N!)` are
/// evaluated in exact integer arithmetic and cross-checked.
pub fn dim_bounded(modes: usize, max_total: usize) -> Result<u128> {
    let overflow = || Error::DimensionOverflow(format!("D({modes}, {max_total}) exceeds u128"));
    let mut sum: u128 = 0;
    for n in 0..=max_total {
        sum = sum.checked_add(dim_exact(modes, n)?).ok_or_else(overflow)?;
    }
    let closed = binomial(modes as u128 + max_total as u128, max_total as u128).ok_or_else(overflow)?;
    assert_eq!(sum, closed, "sector sum and closed form disagree");
    Ok(closed)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 1..=k {
        // r * x / i is exact; dividing out gcd(r, i) first keeps the product small.
        let x = n - k + i;
        let g = gcd(r, i);
        r = (r / g).checked_mul(x / (i / g))?;
    }
    Some(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

/// Occupation-number basis in graded lexicographic order: sectors by total
/// occupation, and within a sector tuples in descending lexicographic order
/// (`00, 10, 01, 20, 11, 02, ...`).
#[derive(Debug, Clone)]
pub struct FockBasis {
    num_modes: usize,
    max_total: usize,
    spin: bool,
    occupations: Vec<u32>,
    index: HashMap<Box<[u32]>, usize>,
}

impl FockBasis {
    pub fn new(num_modes: usize, max_total: usize, spin: bool) -> Result<Self> {
        if num_modes == 0 {
            return Err(invalid("num_modes", "at least one mode is required"));
        }
        if max_total > u32::MAX as usize {
            return Err(invalid("max_total", "occupations are stored as u32"));
        }
        let m_eff = num_modes * if spin { 2 } else { 1 };
        let dim = dim_bounded(m_eff, max_total)?;
        if dim > DIMENSION_CAP {
            return Err(Error::DimensionOverflow(format!(
                "basis dimension {dim} exceeds the cap {DIMENSION_CAP}"
            )));
        }
        if dim * m_eff as u128 > STORAGE_CAP {
            return Err(Error::DimensionOverflow(format!(
                "{dim} states of {m_eff} modes exceed the storage cap {STORAGE_CAP}"
            )));
        }
        let dim = dim as usize;
        let mut occupations = Vec::with_capacity(dim * m_eff);
        let mut c = vec![0u32; m_eff];
        for n in 0..=max_total as u32 {
            c.fill(0);
            c[0] = n;
            loop {
                occupations.extend_from_slice(&c);
                // Step to the lexicographically next smaller tuple with the same sum.
                let Some(i) = (0..m_eff - 1).rev().find(|&i| c[i] > 0) else {
                    break;
                };
                let tail: u32 = c[i + 1..].iter().sum();
                c[i] -= 1;
                c[i + 1..].fill(0);
                c[i + 1] = tail + 1;
            }
        }
        debug_assert_eq!(occupations.len(), dim * m_eff);
        let index = occupations
            .chunks(m_eff)
            .enumerate()
            .map(|(i, occ)| (occ.into(), i))
            .collect();
        Ok(Self {
            num_modes,
            max_total,
            spin,
            occupations,
            index,
        })
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn max_total(&self) -> usize {
        self.max_total
    }

    pub fn has_spin(&self) -> bool {
        self.spin
    }

    /// Number of single-particle states, twice the mode count with spin.
    pub fn effective_modes(&self) -> usize {
        self.num_modes * if self.spin { 2 } else { 1 }
    }

    pub fn dimension(&self) -> usize {
        self.index.len()
    }

    /// Occupation tuple of basis state `i`, indexed by effective mode.
    pub fn occupation(&self, i: usize) -> &[u32] {
        let m = self.effective_modes();
        &self.occupations[i * m..(i + 1) * m]
    }

    pub fn index_of(&self, occupation: &[u32]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    /// Effective index of a physical mode; `spin` must be given exactly when the
    /// basis carries spin.
    pub fn mode_index(&self, mode: usize, spin: Option<Spin>) -> Result<usize> {
        if mode >= self.num_modes {
            return Err(Error::IndexOutOfRange {
                index: mode,
                len: self.num_modes,
            });
        }
        match (self.spin, spin) {
            (false, None) => Ok(mode),
            (true, Some(Spin::Up)) => Ok(2 * mode),
            (true, Some(Spin::Down)) => Ok(2 * mode + 1),
            (true, None) => Err(invalid("spin", "basis carries spin; give a spin label")),
            (false, Some(_)) => Err(invalid("spin", "basis has no spin")),
        }
    }

    /// Effective modes belonging to a set of physical modes. Rejects duplicates
    /// and out-of-range indices.
    fn effective_subset(&self, modes: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.effective_modes()];
        let per_mode = if self.spin { 2 } else { 1 };
        for &m in modes {
            if m >= self.num_modes {
                return Err(Error::IndexOutOfRange {
                    index: m,
                    len: self.num_modes,
                });
            }
            if mask[m * per_mode] {
                return Err(invalid("mode_subset", format!("mode {m} listed twice")));
            }
            mask[m * per_mode..(m + 1) * per_mode].fill(true);
        }
        Ok(mask)
    }
}

/// Normalized amplitude vector over a [`FockBasis`].
#[derive(Debug, Clone)]
pub struct FockState {
    basis: Arc<FockBasis>,
    amplitudes: DVector<Complex64>,
}

impl FockState {
    /// Wraps an amplitude vector, which must already be normalized.
    pub fn new(basis: Arc<FockBasis>, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dimension() {
            return Err(Error::GridMismatch(format!(
                "{} amplitudes for a basis of dimension {}",
                amplitudes.len(),
                basis.dimension()
            )));
        }
        let norm = amplitudes.norm_squared();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(invalid("amplitudes", format!("squared norm {norm} is not 1")));
        }
        Ok(Self { basis, amplitudes })
    }

    /// Rescales an amplitude vector to unit norm.
    pub fn normalized(basis: Arc<FockBasis>, amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::VanishingNorm);
        }
        Self::new(basis, amplitudes.unscale(norm))
    }

    pub fn vacuum(basis: Arc<FockBasis>) -> Self {
        let mut amplitudes = DVector::zeros(basis.dimension());
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { basis, amplitudes }
    }

    /// Normalized `sum_t c_t prod_{m in t} a_m^dagger |0>` for terms `(c_t, t)`,
    /// with `t` a list of effective mode indices and bosonic `sqrt(n + 1)` factors.
    pub fn from_creations(basis: Arc<FockBasis>, terms: &[(Complex64, Vec<usize>)]) -> Result<Self> {
        let m_eff = basis.effective_modes();
        let mut amplitudes = DVector::zeros(basis.dimension());
        for (coefficient, modes) in terms {
            if modes.len() > basis.max_total() {
                return Err(invalid(
                    "max_total",
                    format!("{} creations exceed the cutoff {}", modes.len(), basis.max_total()),
                ));
            }
            let mut occ = vec![0u32; m_eff];
            let mut factor = 1.0;
            for &m in modes {
                if m >= m_eff {
                    return Err(Error::IndexOutOfRange { index: m, len: m_eff });
                }
                occ[m] += 1;
                factor *= f64::from(occ[m]).sqrt();
            }
            let i = basis.index_of(&occ).expect("occupation within the cutoff");
            amplitudes[i] += coefficient * factor;
        }
        Self::normalized(basis, amplitudes)
    }

    /// Haar-like random state: independent complex Gaussian amplitudes, normalized.
    pub fn random<R: Rng + ?Sized>(basis: Arc<FockBasis>, rng: &mut R) -> Self {
        let amplitudes = DVector::from_fn(basis.dimension(), |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        Self::normalized(basis, amplitudes).expect("Gaussian sample has nonzero norm")
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    /// `<self|other>`; both states must share a basis.
    pub fn inner(&self, other: &FockState) -> Result<Complex64> {
        let (a, b) = (&self.basis, &other.basis);
        if (a.num_modes, a.max_total, a.spin) != (b.num_modes, b.max_total, b.spin) {
            return Err(Error::GridMismatch("states live in different bases".into()));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

/// Spin singlet `(a_{i up}^dagger a_{j down}^dagger - a_{i down}^dagger a_{j up}^dagger)|0> / sqrt 2`.
pub fn singlet_state(i: usize, j: usize, basis: &Arc<FockBasis>) -> Result<FockState> {
    if !basis.has_spin() {
        return Err(invalid("basis", "the singlet needs a basis with spin"));
    }
    if i == j {
        return Err(invalid("j", "the two sites must differ"));
    }
    if basis.max_total() < 2 {
        return Err(invalid("max_total", "the singlet holds two particles"));
    }
    let iu = basis.mode_index(i, Some(Spin::Up))?;
    let id = basis.mode_index(i, Some(Spin::Down))?;
    let ju = basis.mode_index(j, Some(Spin::Up))?;
    let jd = basis.mode_index(j, Some(Spin::Down))?;
    let c = std::f64::consts::FRAC_1_SQRT_2;
    let mut amplitudes = DVector::zeros(basis.dimension());
    for (modes, sign) in [([iu, jd], 1.0), ([id, ju], -1.0)] {
        let mut occ = vec![0u32; basis.effective_modes()];
        for m in modes {
            occ[m] += 1;
        }
        amplitudes[basis.index_of(&occ).expect("two particles fit")] = Complex64::new(sign * c, 0.0);
    }
    FockState::new(Arc::clone(basis), amplitudes)
}

/// Entanglement entropy of a bipartition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedEntropy {
    pub nats: f64,
    /// Set when the subset is empty or covers every mode, so the entropy is zero
    /// by construction.
    pub trivial: bool,
}

/// Von Neumann entropy of the reduced state on a set of physical modes (both
/// spin components of each listed mode belong to the subsystem).
pub fn reduced_entropy(state: &FockState, mode_subset: &[usize]) -> Result<ReducedEntropy> {
    let basis = state.basis();
    let mask = basis.effective_subset(mode_subset)?;
    if mode_subset.is_empty() || mode_subset.len() == basis.num_modes() {
        return Ok(ReducedEntropy {
            nats: 0.0,
            trivial: true,
        });
    }
    let nats = entropy_of_schmidt(&schmidt_matrix(state, &mask));
    Ok(ReducedEntropy {
        nats,
        trivial: false,
    })
}

/// Coefficient matrix `psi[a, b]` of the state in the product basis of the
/// subsystem (rows) and its complement (columns).
fn schmidt_matrix(state: &FockState, mask: &[bool]) -> DMatrix<Complex64> {
    let basis = state.basis();
    let mut a_index: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut b_index: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut entries = Vec::with_capacity(basis.dimension());
    for (s, amp) in state.amplitudes().iter().enumerate() {
        let occ = basis.occupation(s);
        let (a, b): (Vec<(u32, bool)>, Vec<(u32, bool)>) =
            occ.iter().zip(mask).map(|(&n, &m)| (n, m)).partition(|&(_, m)| m);
        let a: Vec<u32> = a.into_iter().map(|(n, _)| n).collect();
        let b: Vec<u32> = b.into_iter().map(|(n, _)| n).collect();
        let next = a_index.len();
        let ia = *a_index.entry(a).or_insert(next);
        let next = b_index.len();
        let ib = *b_index.entry(b).or_insert(next);
        entries.push((ia, ib, *amp));
    }
    let mut psi = DMatrix::zeros(a_index.len(), b_index.len());
    for (ia, ib, amp) in entries {
        psi[(ia, ib)] = amp;
    }
    psi
}

fn entropy_of_schmidt(psi: &DMatrix<Complex64>) -> f64 {
    let rho = if psi.nrows() <= psi.ncols() {
        psi * psi.adjoint()
    } else {
        psi.adjoint() * psi
    };
    rho.symmetric_eigenvalues()
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub entropy: f64,
    /// `ln D(M_A, N)` with `M_A` the effective mode count of the subset.
    pub bound: f64,
    pub satisfied: bool,
}

/// Compares the subsystem entropy with the dimension bound `ln D(M_A, N)`.
pub fn bound_check(state: &FockState, mode_subset: &[usize]) -> Result<BoundCheck> {
    let basis = state.basis();
    let entropy = reduced_entropy(state, mode_subset)?.nats;
    let m_a = mode_subset.len() * if basis.has_spin() { 2 } else { 1 };
    let bound = if m_a == 0 {
        0.0
    } else {
        (dim_bounded(m_a, basis.max_total())? as f64).ln()
    };
    Ok(BoundCheck {
        entropy,
        bound,
        satisfied: entropy <= bound + BOUND_SLACK,
    })
}

/// A state whose reduced state on `mode_subset` is maximally mixed over all
/// subsystem configurations with at most `N` particles, so that its entropy
/// equals the bound of [`bound_check`].
///
/// Each subsystem configuration is paired with a distinct complement
/// configuration such that the total stays within the cutoff. Such a pairing
/// exists only when at most one subsystem configuration holds the full `N`
/// particles, i.e. for a single effective mode (or `N = 0`); otherwise an error
/// is returned.
pub fn saturating_state(basis: &Arc<FockBasis>, mode_subset: &[usize]) -> Result<FockState> {
    let mask = basis.effective_subset(mode_subset)?;
    let split = |occ: &[u32]| -> (Vec<u32>, Vec<u32>) {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (&n, &m) in occ.iter().zip(&mask) {
            if m { a.push(n) } else { b.push(n) }
        }
        (a, b)
    };
    let mut a_configs: Vec<Vec<u32>> = Vec::new();
    let mut b_configs: Vec<Vec<u32>> = Vec::new();
    for s in 0..basis.dimension() {
        let (a, b) = split(basis.occupation(s));
        let a_empty = a.iter().all(|&n| n == 0);
        if b.iter().all(|&n| n == 0) {
            a_configs.push(a);
        }
        if a_empty {
            b_configs.push(b);
        }
    }
    // The admissible partner sets are nested, so serving the most constrained
    // configurations first never blocks a later one.
    let total = |c: &[u32]| c.iter().map(|&n| n as usize).sum::<usize>();
    a_configs.sort_by_key(|a| std::cmp::Reverse(total(a)));
    let mut used = vec![false; b_configs.len()];
    let mut amplitudes = DVector::zeros(basis.dimension());
    for a in &a_configs {
        let room = basis.max_total() - total(a);
        let Some(k) = (0..b_configs.len()).find(|&k| !used[k] && total(&b_configs[k]) <= room) else {
            return Err(invalid(
                "mode_subset",
                "no state within the cutoff saturates the bound for this subset",
            ));
        };
        used[k] = true;
        let mut occ = Vec::with_capacity(mask.len());
        let (mut ia, mut ib) = (a.iter(), b_configs[k].iter());
        for &m in &mask {
            occ.push(if m { *ia.next().unwrap() } else { *ib.next().unwrap() });
        }
        amplitudes[basis.index_of(&occ).expect("pair fits the cutoff")] = Complex64::new(1.0, 0.0);
    }
    FockState::normalized(Arc::clone(basis), amplitudes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(dim_exact(7, 0).unwrap(), 1);
        assert_eq!(dim_exact(2, 2).unwrap(), 3);
        assert_eq!(dim_exact(3, 2).unwrap(), 6);
        assert_eq!(dim_bounded(2, 1).unwrap(), 3);
        assert_eq!(dim_bounded(50, 3).unwrap(), 23426);
        assert!(dim_exact(0, 1).is_err());
    }

    #[test]
    fn dimension_identities_hold_exactly() {
        for m in 1..=64 {
            for n in 0..=6 {
                let sum: u128 = (0..=n).map(|k| dim_exact(m, k).unwrap()).sum();
                assert_eq!(sum, dim_bounded(m, n).unwrap());
            }
        }
    }

    #[test]
    fn large_dimensions_do_not_overflow_silently() {
        assert_eq!(dim_bounded(1000, 2).unwrap(), 501501);
        assert!(matches!(dim_bounded(10_000, 100), Err(Error::DimensionOverflow(_))));
        let d = dim_bounded(1000, 2).unwrap() as f64;
        assert!((d.ln() / (2.0 * 1000f64.ln()) - 1.0).abs() < 0.15);
    }

    #[test]
    fn basis_order_is_graded_lexicographic() {
        let b = FockBasis::new(2, 2, false).unwrap();
        let tuples: Vec<_> = (0..b.dimension()).map(|i| b.occupation(i).to_vec()).collect();
        assert_eq!(
            tuples,
            vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]
        );
        let b = FockBasis::new(2, 2, true).unwrap();
        assert_eq!(b.dimension(), 15);
        for i in 0..b.dimension() {
            assert_eq!(b.index_of(b.occupation(i)), Some(i));
        }
    }

    #[test]
    fn basis_respects_caps() {
        assert!(matches!(FockBasis::new(64, 6, false), Err(Error::DimensionOverflow(_))));
        assert!(FockBasis::new(0, 2, false).is_err());
    }

    #[test]
    fn singlet_amplitudes_and_entropy() {
        let basis = Arc::new(FockBasis::new(2, 2, true).unwrap());
        let s = singlet_state(0, 1, &basis).unwrap();
        let nonzero: Vec<_> = s.amplitudes().iter().filter(|a| a.norm() > 0.0).collect();
        assert_eq!(nonzero.len(), 2);
        for a in &nonzero {
            assert!((a.re.abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-16);
            assert_eq!(a.im, 0.0);
        }
        assert!((s.amplitudes().norm_squared() - 1.0).abs() < 1e-15);

        let si = reduced_entropy(&s, &[0]).unwrap().nats;
        let sj = reduced_entropy(&s, &[1]).unwrap().nats;
        assert!((si - 2f64.ln()).abs() < 1e-10);
        assert!((si - sj).abs() < 1e-12);

        let check = bound_check(&s, &[0]).unwrap();
        assert!((check.bound - 6f64.ln()).abs() < 1e-15);
        assert!(check.satisfied);
    }

    #[test]
    fn swapping_singlet_sites_flips_the_sign() {
        let basis = Arc::new(FockBasis::new(3, 2, true).unwrap());
        let a = singlet_state(0, 2, &basis).unwrap();
        let b = singlet_state(2, 0, &basis).unwrap();
        assert_eq!(a.amplitudes(), &(-b.amplitudes()));
        assert!(singlet_state(1, 1, &basis).is_err());
        let spinless = Arc::new(FockBasis::new(3, 2, false).unwrap());
        assert!(singlet_state(0, 1, &spinless).is_err());
    }

    #[test]
    fn singlet_matches_creation_operator_form() {
        let basis = Arc::new(FockBasis::new(2, 2, true).unwrap());
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let built = FockState::from_creations(
            Arc::clone(&basis),
            &[(c(r), vec![0, 3]), (c(-r), vec![1, 2])],
        )
        .unwrap();
        let direct = singlet_state(0, 1, &basis).unwrap();
        assert!((built.amplitudes() - direct.amplitudes()).norm() < 1e-15);
    }

    #[test]
    fn product_states_have_zero_entropy() {
        let basis = Arc::new(FockBasis::new(3, 2, true).unwrap());
        let up = basis.mode_index(1, Some(Spin::Up)).unwrap();
        let s = FockState::from_creations(Arc::clone(&basis), &[(c(1.0), vec![up])]).unwrap();
        for subset in [&[0][..], &[1], &[2], &[0, 1], &[1, 2]] {
            assert!(reduced_entropy(&s, subset).unwrap().nats.abs() < 1e-12);
        }
    }

    #[test]
    fn trivial_bipartitions_are_flagged() {
        let basis = Arc::new(FockBasis::new(2, 2, false).unwrap());
        let s = FockState::vacuum(basis);
        assert!(reduced_entropy(&s, &[]).unwrap().trivial);
        assert!(reduced_entropy(&s, &[1, 0]).unwrap().trivial);
        assert!(reduced_entropy(&s, &[0, 0]).is_err());
        assert!(reduced_entropy(&s, &[2]).is_err());
    }

    #[test]
    fn bosonic_factors() {
        let basis = Arc::new(FockBasis::new(1, 3, false).unwrap());
        // (a^dagger)^2 |0> = sqrt(2) |2>, normalized to |2>.
        let s = FockState::from_creations(Arc::clone(&basis), &[(c(1.0), vec![0, 0])]).unwrap();
        assert!((s.amplitudes()[2].re - 1.0).abs() < 1e-15);
        // |1> + (a^dagger)^2|0> / sqrt 2 has equal weights.
        let s = FockState::from_creations(
            Arc::clone(&basis),
            &[(c(1.0), vec![0]), (c(std::f64::consts::FRAC_1_SQRT_2), vec![0, 0])],
        )
        .unwrap();
        assert!((s.amplitudes()[1].norm() - s.amplitudes()[2].norm()).abs() < 1e-15);
        assert!(FockState::from_creations(basis, &[(c(1.0), vec![0; 4])]).is_err());
    }

    #[test]
    fn single_excitation_superposition_matches_schmidt_form() {
        let basis = Arc::new(FockBasis::new(2, 2, false).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let alpha = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            let beta = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            let s = FockState::from_creations(
                Arc::clone(&basis),
                &[(alpha, vec![0]), (beta, vec![1])],
            )
            .unwrap();
            let p = alpha.norm_sqr() / (alpha.norm_sqr() + beta.norm_sqr());
            let expected = -p * p.ln() - (1.0 - p) * (1.0 - p).ln();
            assert!((reduced_entropy(&s, &[0]).unwrap().nats - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn random_states_satisfy_symmetry_and_bound() {
        let basis = Arc::new(FockBasis::new(4, 2, false).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..1000 {
            let s = FockState::random(Arc::clone(&basis), &mut rng);
            let mask: u32 = rng.random_range(1..15);
            let subset: Vec<usize> = (0..4).filter(|k| mask & (1 << k) != 0).collect();
            let complement: Vec<usize> = (0..4).filter(|k| mask & (1 << k) == 0).collect();
            let check = bound_check(&s, &subset).unwrap();
            assert!(check.satisfied, "{check:?}");
            let other = reduced_entropy(&s, &complement).unwrap().nats;
            assert!((check.entropy - other).abs() < 1e-10);
        }
    }

    #[test]
    fn saturation_witness_reaches_the_bound() {
        let basis = Arc::new(FockBasis::new(4, 3, false).unwrap());
        let s = saturating_state(&basis, &[2]).unwrap();
        let check = bound_check(&s, &[2]).unwrap();
        assert!((check.entropy - check.bound).abs() < 1e-9);
        assert!((check.bound - 4f64.ln()).abs() < 1e-15);
        // Two subsystem modes would need two partners for the fully occupied sector.
        assert!(saturating_state(&basis, &[0, 1]).is_err());
    }
}
