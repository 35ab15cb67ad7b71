//! Two-mode Gaussian covariance matrices.
//!
//! Quadratures are ordered `(x1, p1, x2, p2)`, ħ = 1, and the vacuum
//! covariance is `I/2`. Blocks are indexed as in
//! `Q = [[Q11, Q12], [Q21, Q22]]` with `Q21 = Q12ᵀ`.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Mat4 = Matrix4<f64>;
pub type Mat2 = Matrix2<f64>;

const SYMMETRY_TOL: f64 = 1e-12;
const UNCERTAINTY_TOL: f64 = 1e-9;
const EXPANSION_TOL: f64 = 1e-8;

/// Real symmetric 4×4 covariance of a two-mode state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCovariance {
    q: Mat4,
}

/// Second moments of a mode pair `(r, s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMoments {
    /// ⟨a_r a_s⟩
    pub a_rs: Complex64,
    /// ⟨a_r† a_s⟩
    pub adag_r_a_s: Complex64,
    /// ⟨a_r† a_r⟩
    pub n_r: f64,
    /// ⟨a_s† a_s⟩
    pub n_s: f64,
    /// ⟨a_r²⟩
    pub a_rr: Complex64,
    /// ⟨a_s²⟩
    pub a_ss: Complex64,
}

/// Symplectic eigenvalues together with the invariants they solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticSpectrum {
    pub kappa1: f64,
    pub kappa2: f64,
    pub d2: f64,
    pub d0: f64,
}

impl TwoModeCovariance {
    /// Validates `q`: symmetric, positive definite and compatible with the
    /// two-mode uncertainty relations.
    pub fn new(q: Mat4) -> Result<Self> {
        let cov = Self::from_matrix_unchecked(q)?;
        for k in 1..=4 {
            let minor = q.view((0, 0), (k, k)).determinant();
            if !(minor > 0.0) {
                return Err(Error::InvalidCovariance(format!("leading minor of order {k} is {minor}")));
            }
        }
        let (d2, d0) = universal_invariants(&cov)?;
        uncertainty_check(d2, d0, diagonal_scale(&q))?;
        Ok(cov)
    }

    /// Accepts any symmetric matrix; only symmetry is checked.
    ///
    /// Used for covariances propagated by approximate (not exactly
    /// symplectic) transfer matrices.
    pub fn from_matrix_unchecked(q: Mat4) -> Result<Self> {
        let scale = q.amax().max(1.0);
        let asym = (q - q.transpose()).amax();
        if !(asym <= SYMMETRY_TOL * scale) {
            return Err(Error::InvalidCovariance(format!("asymmetry {asym:e}")));
        }
        Ok(TwoModeCovariance { q: 0.5 * (q + q.transpose()) })
    }

    pub fn vacuum() -> Self {
        TwoModeCovariance { q: Mat4::identity() * 0.5 }
    }

    /// Product of thermal states, `diag(θ1, θ1, θ2, θ2)/2`.
    pub fn thermal(theta1: f64, theta2: f64) -> Result<Self> {
        Self::new(Mat4::from_diagonal(&nalgebra::Vector4::new(theta1 / 2.0, theta1 / 2.0, theta2 / 2.0, theta2 / 2.0)))
    }

    pub fn from_blocks(q11: Mat2, q12: Mat2, q22: Mat2) -> Result<Self> {
        let mut q = Mat4::zeros();
        q.fixed_view_mut::<2, 2>(0, 0).copy_from(&q11);
        q.fixed_view_mut::<2, 2>(0, 2).copy_from(&q12);
        q.fixed_view_mut::<2, 2>(2, 0).copy_from(&q12.transpose());
        q.fixed_view_mut::<2, 2>(2, 2).copy_from(&q22);
        Self::new(q)
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.q
    }

    pub fn q11(&self) -> Mat2 {
        self.q.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn q12(&self) -> Mat2 {
        self.q.fixed_view::<2, 2>(0, 2).into_owned()
    }

    pub fn q21(&self) -> Mat2 {
        self.q.fixed_view::<2, 2>(2, 0).into_owned()
    }

    pub fn q22(&self) -> Mat2 {
        self.q.fixed_view::<2, 2>(2, 2).into_owned()
    }

    /// Diagonal block of mode 1 or 2.
    pub fn block(&self, mode: u8) -> Mat2 {
        if mode == 1 {
            self.q11()
        } else {
            self.q22()
        }
    }

    /// `S Q Sᵀ`, validated.
    pub fn transformed(&self, s: &Mat4) -> Result<Self> {
        Self::new(s * self.q * s.transpose())
    }

    /// Row-major upper triangle: q11 q12 q13 q14 q22 q23 q24 q33 q34 q44.
    pub fn upper_triangle(&self) -> [f64; 10] {
        let mut out = [0.0; 10];
        let mut k = 0;
        for i in 0..4 {
            for j in i..4 {
                out[k] = self.q[(i, j)];
                k += 1;
            }
        }
        out
    }

    pub fn from_upper_triangle(v: &[f64; 10]) -> Result<Self> {
        let mut q = Mat4::zeros();
        let mut k = 0;
        for i in 0..4 {
            for j in i..4 {
                q[(i, j)] = v[k];
                q[(j, i)] = v[k];
                k += 1;
            }
        }
        Self::new(q)
    }
}

/// Slack for the uncertainty relations. Roundoff in `D0` grows with the
/// product of the diagonal entries `scale`.
fn uncertainty_tol(scale: f64) -> f64 {
    UNCERTAINTY_TOL + 1e-12 * scale
}

fn diagonal_scale(q: &Mat4) -> f64 {
    (q[(0, 0)] * q[(1, 1)] * q[(2, 2)] * q[(3, 3)]).abs().max(1.0)
}

fn uncertainty_check(d2: f64, d0: f64, scale: f64) -> Result<()> {
    let root = 2.0 * d0.max(0.0).sqrt();
    let tol = uncertainty_tol(scale);
    if d2 < root - tol * d2.max(1.0) || root < 0.5 - tol {
        return Err(Error::Uncertainty { d2, d0 });
    }
    Ok(())
}

fn det2(m: &Mat2) -> f64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

fn inv2(m: &Mat2, op: &'static str) -> Result<Mat2> {
    let d = det2(m);
    if d == 0.0 || !d.is_finite() {
        return Err(Error::singular(op, format!("2x2 block with determinant {d}")));
    }
    Ok(Mat2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / d)
}

/// Purity `μ = [det(2Q)]^{−1/2}`.
pub fn purity(cov: &TwoModeCovariance) -> Result<f64> {
    let d = (2.0 * cov.q).determinant();
    if !(d > 0.0) {
        return Err(Error::singular("purity", format!("det(2Q) = {d}")));
    }
    Ok(1.0 / d.sqrt())
}

/// Purity of the reduced state of `mode` (1 or 2), `1/(2√Δ)`.
pub fn single_mode_purity(cov: &TwoModeCovariance, mode: u8) -> Result<f64> {
    let delta = det2(&cov.block(mode));
    if !(delta > 0.0) {
        return Err(Error::singular("single_mode_purity", format!("det Q{mode}{mode} = {delta}")));
    }
    Ok(0.5 / delta.sqrt())
}

/// Block inverse through the Schur complement `Q* = Q22 − Q21 Q11⁻¹ Q12`.
pub fn frobenius_inverse(cov: &TwoModeCovariance) -> Result<Mat4> {
    let op = "frobenius_inverse";
    let a_inv = inv2(&cov.q11(), op)?;
    let b = cov.q12();
    let c = cov.q21();
    let schur_inv = inv2(&(cov.q22() - c * a_inv * b), op)?;
    let upper_right = -a_inv * b * schur_inv;
    let lower_left = -schur_inv * c * a_inv;
    let upper_left = a_inv + a_inv * b * schur_inv * c * a_inv;
    let mut out = Mat4::zeros();
    out.fixed_view_mut::<2, 2>(0, 0).copy_from(&upper_left);
    out.fixed_view_mut::<2, 2>(0, 2).copy_from(&upper_right);
    out.fixed_view_mut::<2, 2>(2, 0).copy_from(&lower_left);
    out.fixed_view_mut::<2, 2>(2, 2).copy_from(&schur_inv);
    Ok(out)
}

/// Determinant of a two-mode covariance written out in second moments.
fn determinant_expansion(q: &Mat4) -> f64 {
    let a = q[(0, 0)]; // x1 x1
    let b = q[(1, 1)]; // p1 p1
    let c = q[(2, 2)]; // x2 x2
    let d = q[(3, 3)]; // p2 p2
    let e = q[(0, 1)]; // x1 p1
    let f = q[(2, 3)]; // x2 p2
    let g = q[(0, 2)]; // x1 x2
    let h = q[(1, 3)]; // p1 p2
    let i = q[(0, 3)]; // x1 p2
    let j = q[(1, 2)]; // p1 x2
    (b * d - h * h) * (a * c - g * g) + (e * f - i * j).powi(2)
        - c * b * i * i
        - a * d * j * j
        - c * d * e * e
        - a * b * f * f
        + 2.0 * g * (b * i * f + d * j * e)
        + 2.0 * h * (c * i * e + a * j * f)
        - 2.0 * g * h * (e * f + i * j)
}

/// `(D2, D0)`: `D2 = Δ1 + Δ2 + 2 det Q12` and `D0 = det Q`.
///
/// `D0` is evaluated both by the explicit 17-term expansion and by LU
/// factorisation; a relative disagreement above 1e−8 is reported as a
/// self-check error carrying the matrix. The LU value is returned, since the
/// expansion loses digits to cancellation when the entries are large.
pub fn universal_invariants(cov: &TwoModeCovariance) -> Result<(f64, f64)> {
    let q = &cov.q;
    let d2 = det2(&cov.q11()) + det2(&cov.q22()) + 2.0 * det2(&cov.q12());
    let expanded = determinant_expansion(q);
    let direct = q.determinant();
    let scale = diagonal_scale(q);
    if (expanded - direct).abs() > EXPANSION_TOL * scale {
        return Err(Error::SelfCheck {
            op: "universal_invariants",
            detail: format!("expansion {expanded:e} vs direct {direct:e}; upper triangle {:?}", cov.upper_triangle()),
        });
    }
    Ok((d2, direct))
}

/// Symplectic eigenvalues `κ1 ≥ κ2 ≥ ½`.
///
/// The closed-form roots of the biquadratic are used unless the two
/// eigenvalues nearly coincide (pure or nearly pure states). There
/// `κ1 − κ2 = √(D2 − 2√D0)` turns 1e−16 roundoff into 1e−8 errors, so the
/// squares are taken instead from the symmetric matrix `(ΩL)ᵀ Q (ΩL)` with
/// the Cholesky factor `Q = L Lᵀ`, whose eigenvalues are `κ1², κ1², κ2², κ2²`.
pub fn symplectic_spectrum(cov: &TwoModeCovariance) -> Result<SymplecticSpectrum> {
    let (d2, d0) = universal_invariants(cov)?;
    let closed = spectrum_scaled(d2, d0, diagonal_scale(&cov.q))?;
    if d2 - 2.0 * d0.sqrt() > 1e-6 * d2 {
        return Ok(closed);
    }
    let l = nalgebra::Cholesky::new(cov.q)
        .ok_or_else(|| Error::InvalidCovariance("covariance is not positive definite".into()))?
        .l();
    let w = symplectic::omega() * l;
    let mut sq: Vec<f64> =
        nalgebra::SymmetricEigen::new(w.transpose() * cov.q * w).eigenvalues.iter().copied().collect();
    sq.sort_by(f64::total_cmp);
    let k1 = (0.5 * (sq[2] + sq[3])).sqrt();
    let k2 = (0.5 * (sq[0] + sq[1])).sqrt();
    // The closed form has already enforced the uncertainty relation.
    Ok(SymplecticSpectrum { kappa1: k1.max(0.5), kappa2: k2.max(0.5), d2, d0 })
}

/// Solves `κ⁴ − D2 κ² + D0 = 0` for its two positive roots.
///
/// Roots below ½ are clamped when `(κ1² − ¼)(κ2² − ¼) = D0 − D2/4 + 1/16`
/// is within 1e−9 of zero: for pure states the roots carry square-root
/// amplified roundoff, while this polynomial does not.
pub fn spectrum_from_invariants(d2: f64, d0: f64) -> Result<SymplecticSpectrum> {
    spectrum_scaled(d2, d0, d0.max(1.0))
}

fn spectrum_scaled(d2: f64, d0: f64, scale: f64) -> Result<SymplecticSpectrum> {
    uncertainty_check(d2, d0, scale)?;
    let root = d0.max(0.0).sqrt();
    let plus = (d2 + 2.0 * root).sqrt();
    let minus = (d2 - 2.0 * root).max(0.0).sqrt();
    let k1 = 0.5 * (plus + minus);
    // κ2 = √D0/κ1 avoids the cancellation in (plus − minus)/2.
    let k2 = if k1 > 0.0 { root / k1 } else { 0.0 };
    let excess = d0 - 0.25 * d2 + 0.0625;
    let clamp = |k: f64| -> Result<f64> {
        if k >= 0.5 {
            Ok(k)
        } else if excess.abs() <= uncertainty_tol(scale) {
            Ok(0.5)
        } else {
            Err(Error::Uncertainty { d2, d0 })
        }
    };
    Ok(SymplecticSpectrum { kappa1: clamp(k1)?, kappa2: clamp(k2)?, d2, d0 })
}

/// Covariance of the pair described by `m`.
pub fn moments_to_covariance(m: &SecondMoments) -> Result<TwoModeCovariance> {
    let (a, n) = (m.a_rs, m.adag_r_a_s);
    let mut q = Mat4::zeros();
    q[(0, 0)] = m.n_r + m.a_rr.re + 0.5;
    q[(1, 1)] = m.n_r - m.a_rr.re + 0.5;
    q[(0, 1)] = m.a_rr.im;
    q[(2, 2)] = m.n_s + m.a_ss.re + 0.5;
    q[(3, 3)] = m.n_s - m.a_ss.re + 0.5;
    q[(2, 3)] = m.a_ss.im;
    q[(0, 2)] = a.re + n.re;
    q[(1, 3)] = n.re - a.re;
    q[(0, 3)] = a.im + n.im;
    q[(1, 2)] = a.im - n.im;
    for i in 0..4 {
        for j in 0..i {
            q[(i, j)] = q[(j, i)];
        }
    }
    TwoModeCovariance::new(q)
}

/// Inverse of [`moments_to_covariance`].
pub fn covariance_to_moments(cov: &TwoModeCovariance) -> SecondMoments {
    let q = &cov.q;
    SecondMoments {
        a_rs: Complex64::new(0.5 * (q[(0, 2)] - q[(1, 3)]), 0.5 * (q[(0, 3)] + q[(1, 2)])),
        adag_r_a_s: Complex64::new(0.5 * (q[(0, 2)] + q[(1, 3)]), 0.5 * (q[(0, 3)] - q[(1, 2)])),
        n_r: 0.5 * (q[(0, 0)] + q[(1, 1)]) - 0.5,
        n_s: 0.5 * (q[(2, 2)] + q[(3, 3)]) - 0.5,
        a_rr: Complex64::new(0.5 * (q[(0, 0)] - q[(1, 1)]), q[(0, 1)]),
        a_ss: Complex64::new(0.5 * (q[(2, 2)] - q[(3, 3)]), q[(2, 3)]),
    }
}

impl SecondMoments {
    pub fn to_covariance(&self) -> Result<TwoModeCovariance> {
        moments_to_covariance(self)
    }

    /// Moments after the local phase rotations `a_r → e^{iφ_r} a_r`,
    /// `a_s → e^{iφ_s} a_s`.
    pub fn rotated(&self, phi_r: f64, phi_s: f64) -> Self {
        let e = |phi: f64| Complex64::from_polar(1.0, phi);
        SecondMoments {
            a_rs: self.a_rs * e(phi_r + phi_s),
            adag_r_a_s: self.adag_r_a_s * e(phi_s - phi_r),
            n_r: self.n_r,
            n_s: self.n_s,
            a_rr: self.a_rr * e(2.0 * phi_r),
            a_ss: self.a_ss * e(2.0 * phi_s),
        }
    }
}

/// Symplectic matrices on `(x1, p1, x2, p2)`, used to build valid states.
pub mod symplectic {
    use super::Mat4;

    /// `Ω = ⊕ [[0, 1], [−1, 0]]`.
    pub fn omega() -> Mat4 {
        let mut w = Mat4::zeros();
        w[(0, 1)] = 1.0;
        w[(1, 0)] = -1.0;
        w[(2, 3)] = 1.0;
        w[(3, 2)] = -1.0;
        w
    }

    /// Largest entry of `S Ω Sᵀ − Ω`.
    pub fn defect(s: &Mat4) -> f64 {
        (s * omega() * s.transpose() - omega()).amax()
    }

    /// Independent phase-space rotations of the two modes.
    pub fn local_rotation(phi1: f64, phi2: f64) -> Mat4 {
        let (s1, c1) = phi1.sin_cos();
        let (s2, c2) = phi2.sin_cos();
        let mut m = Mat4::zeros();
        m[(0, 0)] = c1;
        m[(0, 1)] = s1;
        m[(1, 0)] = -s1;
        m[(1, 1)] = c1;
        m[(2, 2)] = c2;
        m[(2, 3)] = s2;
        m[(3, 2)] = -s2;
        m[(3, 3)] = c2;
        m
    }

    /// Single-mode squeezers `diag(e^{−r1}, e^{r1}, e^{−r2}, e^{r2})`.
    pub fn local_squeeze(r1: f64, r2: f64) -> Mat4 {
        Mat4::from_diagonal(&nalgebra::Vector4::new((-r1).exp(), r1.exp(), (-r2).exp(), r2.exp()))
    }

    /// Beam splitter with mixing angle `theta`.
    pub fn beam_splitter(theta: f64) -> Mat4 {
        let (s, c) = theta.sin_cos();
        let mut m = Mat4::zeros();
        m[(0, 0)] = c;
        m[(1, 1)] = c;
        m[(2, 2)] = c;
        m[(3, 3)] = c;
        m[(0, 2)] = s;
        m[(1, 3)] = s;
        m[(2, 0)] = -s;
        m[(3, 1)] = -s;
        m
    }

    /// Two-mode squeezer with parameter `r`.
    pub fn two_mode_squeeze(r: f64) -> Mat4 {
        let (ch, sh) = (r.cosh(), r.sinh());
        let mut m = Mat4::zeros();
        m[(0, 0)] = ch;
        m[(1, 1)] = ch;
        m[(2, 2)] = ch;
        m[(3, 3)] = ch;
        m[(0, 2)] = sh;
        m[(2, 0)] = sh;
        m[(1, 3)] = -sh;
        m[(3, 1)] = -sh;
        m
    }
}

#[cfg(test)]
mod tests {
    use super::symplectic::*;
    use super::*;
    use proptest::prelude::*;

    fn thermal(a: f64, b: f64) -> TwoModeCovariance {
        TwoModeCovariance::thermal(a, b).unwrap()
    }

    /// A generic mixed state: thermal product pushed through squeezers,
    /// a beam splitter, a two-mode squeezer and rotations.
    fn generic(p: [f64; 8]) -> TwoModeCovariance {
        let s = local_rotation(p[0], p[1]) * two_mode_squeeze(p[2]) * beam_splitter(p[3]) * local_squeeze(p[4], p[5]);
        thermal(p[6], p[7]).transformed(&s).unwrap()
    }

    fn state_params() -> impl Strategy<Value = [f64; 8]> {
        (-3.0..3.0f64, -3.0..3.0f64, -1.2..1.2f64, -3.0..3.0f64, -0.8..0.8f64, -0.8..0.8f64, 1.0..6.0f64, 1.0..6.0f64)
            .prop_map(|t| [t.0, t.1, t.2, t.3, t.4, t.5, t.6, t.7])
    }

    #[test]
    fn vacuum_purity_and_invariants() {
        let v = TwoModeCovariance::vacuum();
        assert!((purity(&v).unwrap() - 1.0).abs() < 1e-15);
        let (d2, d0) = universal_invariants(&v).unwrap();
        assert!((d2 - 0.5).abs() < 1e-15 && (d0 - 1.0 / 16.0).abs() < 1e-15);
        let sp = symplectic_spectrum(&v).unwrap();
        assert_eq!((sp.kappa1, sp.kappa2), (0.5, 0.5));
    }

    #[test]
    fn thermal_product_values() {
        let t = thermal(3.0, 2.0);
        assert!((purity(&t).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        let (d2, d0) = universal_invariants(&t).unwrap();
        assert!((d2 - 13.0 / 4.0).abs() < 1e-14);
        assert!((d0 - 36.0 / 16.0).abs() < 1e-14);
        let sp = symplectic_spectrum(&t).unwrap();
        assert!((sp.kappa1 - 1.5).abs() < 1e-14 && (sp.kappa2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn single_mode_purity_examples() {
        assert!((single_mode_purity(&TwoModeCovariance::vacuum(), 1).unwrap() - 1.0).abs() < 1e-15);
        let t = thermal(140.0, 1.0);
        assert!((single_mode_purity(&t, 1).unwrap() - 1.0 / 140.0).abs() < 1e-15);
        let q11 = Mat2::new(1.0, 0.5, 0.5, 1.0);
        let cov = TwoModeCovariance::from_blocks(q11, Mat2::zeros(), Mat2::identity() * 0.5).unwrap();
        assert!((single_mode_purity(&cov, 1).unwrap() - 1.0 / (2.0 * 0.75f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn invariants_of_pure_transformed_vacuum() {
        let s = two_mode_squeeze(0.7) * beam_splitter(0.4) * local_squeeze(0.3, -0.2);
        let cov = TwoModeCovariance::vacuum().transformed(&s).unwrap();
        let (d2, d0) = universal_invariants(&cov).unwrap();
        assert!((d2 - 0.5).abs() < 1e-9 && (d0 - 1.0 / 16.0).abs() < 1e-9);
        let sp = symplectic_spectrum(&cov).unwrap();
        assert!((sp.kappa1 - 0.5).abs() < 1e-6 && (sp.kappa2 - 0.5).abs() < 1e-6);
    }

    #[test]
    fn nearly_pure_spectrum_with_close_covariance_eigenvalues() {
        // Weakly coupled near-vacuum pair whose x and p blocks each carry an
        // eigenvalue within 4e-9 of ½.
        let (a, b, c) = (4.975_286_452_763_749e-1, 4.999_999_848_216_9e-1, 5.302_435_947_564_846e-6);
        let (d, e, f) = (5.024_836_306_447_881e-1, 5.000_000_152_348_214e-1, -5.328_774_694_131_485e-6);
        let q11 = Mat2::new(a, 0.0, 0.0, d);
        let q12 = Mat2::new(c, 0.0, 0.0, f);
        let q22 = Mat2::new(b, 0.0, 0.0, e);
        let cov = TwoModeCovariance::from_blocks(q11, q12, q22).unwrap();
        let sp = symplectic_spectrum(&cov).unwrap();
        // 50-digit reference: κ1 − ½ = 2.8e−16, κ2 − ½ = −1.8e−17.
        assert!((sp.kappa1 - 0.5).abs() < 1e-14, "{}", sp.kappa1 - 0.5);
        assert!((sp.kappa2 - 0.5).abs() < 1e-14, "{}", sp.kappa2 - 0.5);
    }

    #[test]
    fn frobenius_inverse_examples() {
        let id = Mat4::identity();
        let inv = frobenius_inverse(&TwoModeCovariance::new(id).unwrap()).unwrap();
        assert!((inv - id).amax() < 1e-15);
        let t = thermal(3.0, 5.0);
        let inv = frobenius_inverse(&t).unwrap();
        assert!((inv[(0, 0)] - 2.0 / 3.0).abs() < 1e-15 && inv[(0, 2)] == 0.0);
    }

    #[test]
    fn moments_round_trip_and_quadrature_algebra() {
        let zero = SecondMoments {
            a_rs: Complex64::new(0.0, 0.0),
            adag_r_a_s: Complex64::new(0.0, 0.0),
            n_r: 0.0,
            n_s: 0.0,
            a_rr: Complex64::new(0.0, 0.0),
            a_ss: Complex64::new(0.0, 0.0),
        };
        assert_eq!(*moments_to_covariance(&zero).unwrap().matrix(), Mat4::identity() * 0.5);
        let sq = SecondMoments { n_r: 0.3, a_rr: Complex64::new(0.2, 0.0), ..zero };
        let q = moments_to_covariance(&sq).unwrap();
        assert!((q.matrix()[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((q.matrix()[(1, 1)] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn upper_triangle_round_trip() {
        let cov = generic([0.3, -1.0, 0.5, 0.9, 0.2, -0.4, 2.0, 3.0]);
        let back = TwoModeCovariance::from_upper_triangle(&cov.upper_triangle()).unwrap();
        assert_eq!(cov, back);
    }

    #[test]
    fn rejects_invalid_matrices() {
        let mut q = Mat4::identity() * 0.5;
        q[(0, 0)] = 0.1;
        assert!(matches!(TwoModeCovariance::new(q), Err(Error::Uncertainty { .. })));
        let mut q = Mat4::identity();
        q[(0, 1)] = 0.3;
        assert!(TwoModeCovariance::new(q).is_err());
        assert!(TwoModeCovariance::new(-Mat4::identity()).is_err());
    }

    proptest! {
        #[test]
        fn expansion_matches_direct_determinant(p in state_params()) {
            let cov = generic(p);
            let direct = cov.matrix().determinant();
            prop_assert!((determinant_expansion(cov.matrix()) - direct).abs() <= 1e-10 * direct.abs().max(1.0));
        }

        #[test]
        fn frobenius_inverse_multiplies_back(p in state_params()) {
            let cov = generic(p);
            let inv = frobenius_inverse(&cov).unwrap();
            prop_assert!((cov.matrix() * inv - Mat4::identity()).amax() < 1e-12 * cov.matrix().amax().max(1.0) * inv.amax().max(1.0));
        }

        #[test]
        fn block_determinant_formula(p in state_params()) {
            let cov = generic(p);
            let schur = cov.q11() - cov.q12() * inv2(&cov.q22(), "test").unwrap() * cov.q21();
            let det = det2(&schur) * det2(&cov.q22());
            let direct = cov.matrix().determinant();
            prop_assert!((det - direct).abs() < 1e-10 * direct.max(1.0));
        }

        #[test]
        fn vieta_identities(p in state_params()) {
            let sp = symplectic_spectrum(&generic(p)).unwrap();
            let scale = sp.d2.max(1.0);
            prop_assert!((sp.kappa1.powi(2) + sp.kappa2.powi(2) - sp.d2).abs() < 1e-10 * scale);
            prop_assert!((sp.kappa1.powi(2) * sp.kappa2.powi(2) - sp.d0).abs() < 1e-10 * sp.d0.max(1.0));
            prop_assert!(sp.kappa1 >= sp.kappa2 && sp.kappa2 >= 0.5 - 1e-9);
        }

        #[test]
        fn symplectic_spectrum_of_thermal_input(p in state_params()) {
            // The spectrum is the pair of thermal half-temperatures, whatever the
            // symplectic transformation.
            let sp = symplectic_spectrum(&generic(p)).unwrap();
            let (hi, lo) = (p[6].max(p[7]) / 2.0, p[6].min(p[7]) / 2.0);
            prop_assert!((sp.kappa1 - hi).abs() < 1e-9 * hi.max(1.0));
            prop_assert!((sp.kappa2 - lo).abs() < 1e-9 * hi.max(1.0));
        }

        #[test]
        fn invariants_under_local_rotation(p in state_params(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
            let cov = generic(p);
            let rot = cov.transformed(&local_rotation(a, b)).unwrap();
            let (d2, d0) = universal_invariants(&cov).unwrap();
            let (e2, e0) = universal_invariants(&rot).unwrap();
            prop_assert!((d2 - e2).abs() < 1e-10 * d2.max(1.0));
            prop_assert!((d0 - e0).abs() < 1e-10 * d0.max(1.0));
        }

        #[test]
        fn purity_under_moment_phase_map(p in state_params(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
            let m = covariance_to_moments(&generic(p));
            let mu = purity(&m.to_covariance().unwrap()).unwrap();
            let mu_rot = purity(&m.rotated(a, b).to_covariance().unwrap()).unwrap();
            prop_assert!((mu - mu_rot).abs() < 1e-12);
        }

        #[test]
        fn moments_covariance_round_trip(p in state_params()) {
            let cov = generic(p);
            let back = moments_to_covariance(&covariance_to_moments(&cov)).unwrap();
            prop_assert!((back.matrix() - cov.matrix()).amax() < 1e-12 * cov.matrix().amax());
        }

        #[test]
        fn builders_are_symplectic(a in -2.0..2.0f64, r in -1.0..1.0f64) {
            for s in [local_rotation(a, -a), local_squeeze(r, -r), beam_splitter(a), two_mode_squeeze(r)] {
                prop_assert!(defect(&s) < 1e-14);
            }
        }
    }
}
