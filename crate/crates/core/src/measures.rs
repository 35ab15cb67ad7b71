//! Entanglement measures of a two-mode Gaussian state.
//!
//! Trace-based covariance coefficients `Y`, `Ỹ`; determinant-based purity
//! coefficient `L̃` and group correlation `K²`; the Hilbert–Schmidt distance
//! coefficient `Z`; and the entropic index of correlation `I_c` with its
//! compact form `J_c = 1 − e^{−I_c}`.

use crate::error::{Error, Result};
use crate::gaussian_core::{self, Mat2, TwoModeCovariance};

/// All scalar measures for one state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeasureSet {
    pub y: f64,
    pub y_tilde: f64,
    pub l_tilde: f64,
    pub k2: f64,
    pub z: f64,
    pub i_c: f64,
    pub j_c: f64,
}

impl MeasureSet {
    /// Largest absolute difference over the seven fields.
    pub fn max_abs_diff(&self, other: &MeasureSet) -> f64 {
        self.values().iter().zip(other.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// `[y, y_tilde, l_tilde, k2, z, i_c, j_c]`.
    pub fn values(&self) -> [f64; 7] {
        [self.y, self.y_tilde, self.l_tilde, self.k2, self.z, self.i_c, self.j_c]
    }
}

fn det2(m: &Mat2) -> f64 {
    m.determinant()
}

fn trace_q12_q21(cov: &TwoModeCovariance) -> f64 {
    (cov.q12() * cov.q21()).trace()
}

/// `(Y, Ỹ)` with `Y = √(Tr Q12Q21 / (Tr Q11 Tr Q22))` and
/// `Ỹ = 2√(Tr Q12Q21)/Tr Q`.
pub fn covariance_coefficients(cov: &TwoModeCovariance) -> (f64, f64) {
    let t = trace_q12_q21(cov).max(0.0);
    let (t11, t22) = (cov.q11().trace(), cov.q22().trace());
    ((t / (t11 * t22)).sqrt(), 2.0 * t.sqrt() / (t11 + t22))
}

/// `det Q / (det Q11 det Q22)`, which is `(μ1μ2/μ)²`.
fn determinant_ratio(cov: &TwoModeCovariance, op: &'static str) -> Result<f64> {
    let denom = det2(&cov.q11()) * det2(&cov.q22());
    if !(denom > 0.0) {
        return Err(Error::singular(op, format!("det Q11 det Q22 = {denom}")));
    }
    Ok(cov.matrix().determinant() / denom)
}

/// `L̃ = 1 − √(det Q/(det Q11 det Q22))`.
pub fn purity_coefficient(cov: &TwoModeCovariance) -> Result<f64> {
    Ok(1.0 - determinant_ratio(cov, "purity_coefficient")?.sqrt())
}

/// `K² = 1 − det Q/(det Q11 det Q22)`.
pub fn group_correlation(cov: &TwoModeCovariance) -> Result<f64> {
    Ok(1.0 - determinant_ratio(cov, "group_correlation")?)
}

fn check_purities(op: &'static str, mu: f64, mu1: f64, mu2: f64) -> Result<()> {
    for (name, v) in [("mu", mu), ("mu1", mu1), ("mu2", mu2)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::domain(op, format!("{name} = {v} outside (0, 1]")));
        }
    }
    Ok(())
}

/// `K̃² = 1 − (μ1μ2/μ)²` from the three purities of an arbitrary state.
pub fn k_tilde_squared(mu: f64, mu1: f64, mu2: f64) -> Result<f64> {
    check_purities("k_tilde_squared", mu, mu1, mu2)?;
    let ratio = mu1 * mu2 / mu;
    if ratio > 1.0 + 1e-9 {
        return Err(Error::domain("k_tilde_squared", format!("mu1 mu2 / mu = {ratio} exceeds 1")));
    }
    Ok(1.0 - ratio * ratio)
}

/// `(L, L_fact, L̃)`: linear entropy `1 + μ − μ1 − μ2`, its factorised form
/// `(1 − μ1)(1 − μ2)` and the normalised coefficient `1 − μ1μ2/μ`.
pub fn linear_entropy_measures(mu: f64, mu1: f64, mu2: f64) -> Result<(f64, f64, f64)> {
    check_purities("linear_entropy_measures", mu, mu1, mu2)?;
    Ok((1.0 + mu - mu1 - mu2, (1.0 - mu1) * (1.0 - mu2), 1.0 - mu1 * mu2 / mu))
}

/// Distance coefficient
/// `Z = 1 + √(det Q/(det Q11 det Q22)) − 2√(det 2Q / det Q_z)`, where `Q_z`
/// has doubled diagonal blocks.
pub fn distance_coefficient(cov: &TwoModeCovariance) -> Result<f64> {
    let ratio = determinant_ratio(cov, "distance_coefficient")?;
    let mut qz = *cov.matrix();
    for i in 0..2 {
        for j in 0..2 {
            qz[(i, j)] *= 2.0;
            qz[(i + 2, j + 2)] *= 2.0;
        }
    }
    let det_z = qz.determinant();
    if !(det_z > 0.0) {
        return Err(Error::singular("distance_coefficient", format!("det Q_z = {det_z}")));
    }
    let det_2q = 16.0 * cov.matrix().determinant();
    Ok(1.0 + ratio.sqrt() - 2.0 * (det_2q / det_z).sqrt())
}

fn x_ln_x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Von Neumann entropy of a single-mode thermal state with symplectic
/// eigenvalue `kappa ≥ ½`.
pub fn thermal_entropy(kappa: f64) -> f64 {
    x_ln_x(kappa + 0.5) - x_ln_x(kappa - 0.5)
}

/// Entropy of the joint two-mode state.
pub fn gaussian_entropy_two_mode(cov: &TwoModeCovariance) -> Result<f64> {
    let sp = gaussian_core::symplectic_spectrum(cov)?;
    Ok(thermal_entropy(sp.kappa1) + thermal_entropy(sp.kappa2))
}

/// Entropy of the reduced state of `mode`, with symplectic eigenvalue
/// `√det Q_kk`.
pub fn reduced_entropy(cov: &TwoModeCovariance, mode: u8) -> Result<f64> {
    let delta = det2(&cov.block(mode));
    if !(delta > 0.0) {
        return Err(Error::singular("reduced_entropy", format!("det Q{mode}{mode} = {delta}")));
    }
    Ok(thermal_entropy(delta.sqrt()))
}

/// Index of correlation `I_c = S1 + S2 − S12`.
pub fn index_of_correlation(cov: &TwoModeCovariance) -> Result<f64> {
    Ok(reduced_entropy(cov, 1)? + reduced_entropy(cov, 2)? - gaussian_entropy_two_mode(cov)?)
}

/// Compact entropy `J_c = 1 − e^{−I_c}`.
pub fn compact_entropy(i_c: f64) -> f64 {
    -(-i_c).exp_m1()
}

/// Trace approximation `½ Tr(Q12 Q22⁻¹ Q21 Q11⁻¹)` to `L̃` for weak
/// correlations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallEntanglement {
    pub value: f64,
    /// Spectral radius of `Q12 Q22⁻¹ Q21 Q11⁻¹`.
    pub spectral_radius: f64,
    /// Set when the spectral radius is at least 0.1, outside the regime
    /// where the approximation is meaningful.
    pub out_of_domain: bool,
}

pub fn small_entanglement_approx(cov: &TwoModeCovariance) -> Result<SmallEntanglement> {
    let op = "small_entanglement_approx";
    let inv = |m: Mat2| m.try_inverse().ok_or_else(|| Error::singular(op, "diagonal block"));
    let m = cov.q12() * inv(cov.q22())? * cov.q21() * inv(cov.q11())?;
    let (tr, det) = (m.trace(), m.determinant());
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    let spectral_radius = (0.5 * tr + disc).abs().max((0.5 * tr - disc).abs());
    Ok(SmallEntanglement { value: 0.5 * tr, spectral_radius, out_of_domain: spectral_radius >= 0.1 })
}

/// Every measure of the state.
pub fn measure_set(cov: &TwoModeCovariance) -> Result<MeasureSet> {
    let (y, y_tilde) = covariance_coefficients(cov);
    let ratio = determinant_ratio(cov, "measure_set")?;
    let l_tilde = 1.0 - ratio.sqrt();
    let i_c = index_of_correlation(cov)?;
    Ok(MeasureSet {
        y,
        y_tilde,
        l_tilde,
        k2: 1.0 - ratio,
        z: distance_coefficient(cov)?,
        i_c,
        j_c: compact_entropy(i_c),
    })
}
