//! One-particle localization fidelity against an independent adaptive-quadrature
//! evaluation of the same momentum-space overlaps.

use cge_core::coarse_grain::ModeFamily;
use cge_core::lattice::LatticeModel;
use cge_core::newton_wigner::{one_particle_localization_fidelity, Wavepacket};

const EPS: f64 = 4.0;
const M: usize = 64;

fn fidelity(mu: f64) -> f64 {
    let d = EPS / 2.0;
    let mass = mu / EPS;
    let lat = LatticeModel::new(256, mass).unwrap();
    let family = ModeFamily::new(&lat, M, d, EPS, mass).unwrap();
    let center = (M - 1) as f64 * d / 2.0;
    let packet = Wavepacket::gaussian(center, 3.0 * EPS).unwrap();
    one_particle_localization_fidelity(&packet, &family, mass).unwrap()
}

#[test]
fn matches_reference_values() {
    for (mu, reference) in [
        (10.0, 0.9986142881986417),
        (1.0, 0.9986249038479097),
        (0.2, 0.9996103643098374),
    ] {
        let f = fidelity(mu);
        println!("m*eps = {mu}: fidelity {f:.15}");
        assert!((f - reference).abs() < 1e-8, "mu {mu}: {f} vs {reference}");
    }
}

#[test]
fn high_fidelity_in_the_local_limit() {
    assert!(fidelity(10.0) > 0.99);
}
