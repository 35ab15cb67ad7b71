//! Cross-oracle self-tests: each family compares two independent routes to
//! the same quantity over a deterministic sample and reports the largest
//! residual.

use std::f64::consts::PI;

use modent_core::cavity1d::{self, InitialState};
use modent_core::cavity3d::{self, Cavity3DParams, Regime};
use modent_core::gaussian_core::{self, symplectic, Mat4, TwoModeCovariance};
use modent_core::{measures, specfun, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed of the random sample used by [`property_suite`].
pub const DEFAULT_SEED: u64 = 0x5eed_0fc0_ffee;

/// Outcome of one identity family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyReport {
    pub name: &'static str,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl FamilyReport {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

struct Tracker {
    name: &'static str,
    tolerance: f64,
    samples: usize,
    max: f64,
}

impl Tracker {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Tracker { name, tolerance, samples: 0, max: 0.0 }
    }

    fn record(&mut self, residual: f64) {
        self.samples += 1;
        // NaN must surface as a failure.
        if residual.is_nan() || residual > self.max {
            self.max = if residual.is_nan() { f64::INFINITY } else { residual };
        }
    }

    fn report(self) -> FamilyReport {
        FamilyReport { name: self.name, samples: self.samples, max_residual: self.max, tolerance: self.tolerance }
    }
}

fn random_symplectic(rng: &mut ChaCha8Rng) -> Mat4 {
    let mut angle = || rng.gen_range(0.0..2.0 * PI);
    let (a, b, c, d, e) = (angle(), angle(), angle(), angle(), angle());
    let sq1 = rng.gen_range(-1.0..1.0);
    let sq2 = rng.gen_range(-1.0..1.0);
    let tms = rng.gen_range(-1.2..1.2);
    symplectic::local_rotation(a, b)
        * symplectic::local_squeeze(sq1, sq2)
        * symplectic::beam_splitter(c)
        * symplectic::two_mode_squeeze(tms)
        * symplectic::local_rotation(d, e)
}

/// A random state: thermal (or vacuum when `pure`) followed by a random
/// symplectic map.
fn random_state(rng: &mut ChaCha8Rng, pure: bool) -> Result<TwoModeCovariance> {
    let (t1, t2) = if pure { (1.0, 1.0) } else { (rng.gen_range(1.0..6.0), rng.gen_range(1.0..6.0)) };
    TwoModeCovariance::thermal(t1, t2)?.transformed(&random_symplectic(rng))
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// The property families: local-rotation invariance, `K² = L̃(2 − L̃)`,
/// pure-state relations, symplectic Vieta identities, the closed pair
/// spectrum against the generic one, the Legendre relation and the
/// elliptic-integral derivatives.
pub fn property_suite(seed: u64, samples: usize) -> Result<Vec<FamilyReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut rotation = Tracker::new("local-rotation invariance", 1e-10);
    let mut group = Tracker::new("K2 = Ltilde (2 - Ltilde)", 1e-12);
    let mut vieta = Tracker::new("symplectic Vieta identities", 1e-10);
    for _ in 0..samples {
        let cov = random_state(&mut rng, false)?;
        let base = measures::measure_set(&cov)?;
        let rot = symplectic::local_rotation(rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));
        let turned = measures::measure_set(&cov.transformed(&rot)?)?;
        rotation.record(base.max_abs_diff(&turned));

        let l = measures::purity_coefficient(&cov)?;
        group.record((measures::group_correlation(&cov)? - l * (2.0 - l)).abs());

        let sp = gaussian_core::symplectic_spectrum(&cov)?;
        let (k1, k2) = (sp.kappa1 * sp.kappa1, sp.kappa2 * sp.kappa2);
        let d2 = cov.q11().determinant() + cov.q22().determinant() + 2.0 * cov.q12().determinant();
        vieta.record(relative(k1 + k2, d2));
        vieta.record(relative(k1 * k2, cov.matrix().determinant()));
    }

    let mut pure = Tracker::new("pure-state relations", 1e-8);
    for _ in 0..samples {
        let cov = random_state(&mut rng, true)?;
        // Purities of pure states round to slightly above one.
        let mu = gaussian_core::purity(&cov)?.min(1.0);
        let mu1 = gaussian_core::single_mode_purity(&cov, 1)?.min(1.0);
        let mu2 = gaussian_core::single_mode_purity(&cov, 2)?.min(1.0);
        let l_tilde = measures::purity_coefficient(&cov)?;
        let (l, _, _) = measures::linear_entropy_measures(mu, mu1, mu2)?;
        pure.record((l_tilde - (1.0 - mu1 * mu1)).abs());
        pure.record((l_tilde - 0.25 * l * (4.0 - l)).abs());
        let s1 = measures::reduced_entropy(&cov, 1)?;
        pure.record(relative(measures::index_of_correlation(&cov)?, 2.0 * s1));
    }

    let mut pair = Tracker::new("pair spectrum vs generic spectrum", 1e-10);
    for &(r, s) in &[(1, 3), (1, 5), (3, 5), (1, 7), (5, 9)] {
        for i in 1..=20 {
            let tau = 0.1 * i as f64;
            let cov = cavity1d::p2_pair_covariance(r, s, tau)?;
            record_pair_spectrum(&mut pair, &cov)?;
        }
    }
    for i in 0..samples.min(200) {
        let state = InitialState::squeezed_with_photons(rng.gen_range(0.0..1000.0));
        let tau = 0.03 * i as f64;
        let pm = cavity1d::p1_pair_moments(&state, 1, 2, tau)?;
        record_pair_spectrum(&mut pair, &gaussian_core::moments_to_covariance(&pm.moments)?)?;
    }

    let mut legendre = Tracker::new("Legendre relation", 1e-6);
    let mut derivative = Tracker::new("elliptic derivatives by finite differences", 1e-6);
    for i in 1..=99 {
        let k = 0.01 * i as f64;
        let kt = ((1.0 - k) * (1.0 + k)).sqrt();
        let a = specfun::elliptic_ke_pair(k, kt)?;
        let b = specfun::elliptic_ke_pair(kt, k)?;
        legendre.record((a.e_big * b.k_big + b.e_big * a.k_big - a.k_big * b.k_big - PI / 2.0).abs());

        let h = 1e-6;
        let at = |x: f64| specfun::elliptic_ke_pair(x, ((1.0 - x) * (1.0 + x)).sqrt());
        let (lo, hi) = (at(k - h)?, at(k + h)?);
        let dk_fd = (hi.k_big - lo.k_big) / (2.0 * h);
        let de_fd = (hi.e_big - lo.e_big) / (2.0 * h);
        let dk = (a.e_big - kt * kt * a.k_big) / (k * kt * kt);
        let de = (a.e_big - a.k_big) / k;
        derivative.record(relative(dk_fd, dk));
        derivative.record(relative(de_fd, de));
    }

    Ok(vec![
        rotation.report(),
        group.report(),
        pure.report(),
        vieta.report(),
        pair.report(),
        legendre.report(),
        derivative.report(),
    ])
}

fn record_pair_spectrum(t: &mut Tracker, cov: &TwoModeCovariance) -> Result<()> {
    let f = cavity1d::pair_symplectic_values(cov)?;
    let sp = gaussian_core::symplectic_spectrum(cov)?;
    t.record(relative(f.f_plus, sp.kappa1.max(sp.kappa2)));
    t.record(relative(f.f_minus, sp.kappa1.min(sp.kappa2)));
    Ok(())
}

/// Model-level oracles: 3D zeros, 1D closed forms against integration and
/// against the hypergeometric table, and photon conservation for `p = 1`.
pub fn model_suite() -> Result<Vec<FamilyReport>> {
    let mut zeros = Tracker::new("3D exact-resonance zeros at rho tau = n pi", 1e-10);
    for theta in [(1.0, 1.0), (140.0, 140.0 / 3.0)] {
        let p = Cavity3DParams::new(50.0 / 3.0, theta.0, theta.1, Regime::Symmetric)?;
        for n in 1..=5 {
            let m = cavity3d::symmetric_entanglement(&p, n as f64 * PI / p.rho())?;
            zeros.record(m.values().iter().fold(0.0, |a, v| a.max(v.abs())));
        }
    }

    let mut moments = Tracker::new("p = 2 closed moments vs integration", 1e-7);
    for &(r, s) in &[(1, 1), (3, 3), (5, 5), (1, 3), (1, 5), (3, 5)] {
        for i in 0..5 {
            let tau = 0.5 * (0.1 + 0.2 * i as f64).atanh();
            let closed = cavity1d::p2_moments_closed(r, s, tau)?;
            let ode = cavity1d::p2_moments_ode(r, s, tau)?;
            let (e_r, e_s) = ode.energies();
            moments.record((closed.e_r - e_r).abs().max((closed.e_s - e_s).abs()));
            moments.record((closed.adag_r_a_s - ode.moments.adag_r_a_s.re).abs());
            if let Some(a) = closed.a_rs {
                moments.record((a - ode.moments.a_rs.re).abs());
            }
        }
    }

    let mut rho = Tracker::new("p = 2 elliptic coefficients vs hypergeometric form", 1e-10);
    for m in -5i64..=5 {
        if m % 2 == 0 {
            continue;
        }
        for i in 1..=10 {
            let tau = 0.15 * i as f64;
            let closed = cavity1d::rho(m, 1, 2, tau)?;
            rho.record(relative(cavity1d::rho_elliptic(m, tau)?, closed));
        }
    }

    let mut photons = Tracker::new("p = 1 photon conservation", 1e-10);
    for i in 0..=12 {
        photons.record((cavity1d::p1_zeta_square_sum(0.5 * i as f64)? - 1.0).abs());
    }

    Ok(vec![zeros.report(), moments.report(), rho.report(), photons.report()])
}
