//! Two resonant modes of a rectangular 3D cavity with one vibrating wall.
//!
//! The modes have unperturbed frequencies 1 and 3 and the wall oscillates
//! near twice the lower one. Closed-form propagators are provided for the
//! exact (symmetric) resonance and for the detuning-compensated asymmetric
//! resonance, together with the derived energies and entanglement measures.
//! [`ode_oracle`] integrates the underlying equations of motion directly.
//!
//! Transfer matrices act on raw variables `(x1, p1, x3, p3)`. Covariances
//! are built in normalized variables `x̃_k = √ω_k x_k`, `p̃_k = p_k/√ω_k`.

use std::f64::consts::PI;

use nalgebra::Vector4;

use crate::error::{Error, Result};
use crate::gaussian_core::{Mat4, TwoModeCovariance};
use crate::measures::{self, MeasureSet};
use crate::ode::Rk4;

/// Agreement required between the closed-form and covariance routes.
pub const DUAL_PATH_TOL: f64 = 1e-8;

/// Smallest `ν` accepted by the asymmetric-resonance formulas, which drop
/// terms of order `ν⁻²`.
pub const ASYMMETRIC_MIN_NU: f64 = 20.0;

/// Largest wall amplitude accepted by [`ode_oracle`].
pub const ODE_MAX_EPSILON: f64 = 0.01;

/// Eigenfrequency of mode `(kx, ky, kz)` in a box `lx × ly × lz`.
pub fn mode_frequency(kx: u32, ky: u32, kz: u32, lx: f64, ly: f64, lz: f64) -> Result<f64> {
    if !(lx > 0.0 && ly > 0.0 && lz > 0.0) {
        return Err(Error::domain("mode_frequency", format!("dimensions ({lx}, {ly}, {lz})")));
    }
    if kx == 0 && ky == 0 && kz == 0 {
        return Err(Error::domain("mode_frequency", "all mode indices are zero"));
    }
    let q = |k: u32, l: f64| (k as f64 / l).powi(2);
    Ok(PI * (q(kx, lx) + q(ky, ly) + q(kz, lz)).sqrt())
}

/// Coupling coefficient `m_kj` between modes `k` and `j` induced by motion
/// of a wall perpendicular to x. Zero unless the transverse indices agree.
pub fn coupling_coefficient(k: (u32, u32, u32), j: (u32, u32, u32)) -> f64 {
    if k.1 != j.1 || k.2 != j.2 || k.0 == j.0 {
        return 0.0;
    }
    let (kx, jx) = (k.0 as f64, j.0 as f64);
    let sign = if (k.0 + j.0) % 2 == 0 { 1.0 } else { -1.0 };
    sign * 2.0 * kx * jx / (jx * jx - kx * kx)
}

/// `ν = 96μ²` with `μ = jx/(12kx)` for a resonant pair sharing transverse
/// indices.
pub fn nu_from_modes(kx: u32, jx: u32) -> f64 {
    let mu = jx as f64 / (12.0 * kx as f64);
    96.0 * mu * mu
}

/// `θ3/θ1` for modes at a common initial temperature, given `θ1`.
pub fn equal_temperature_ratio(theta1: f64) -> f64 {
    let t2 = theta1 * theta1;
    (t2 + 3.0) / (3.0 * t2 + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Exact resonance, `δ = Δ = 0`.
    Symmetric,
    /// `δ = ε`, `3δ − Δ = εν/2`.
    Asymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cavity3DParams {
    /// `ν = 96μ²`.
    pub nu: f64,
    pub mu_coupling: f64,
    /// `θ_k = coth(kβ_k/2)`; the initial state is thermal with
    /// `diag(θ1, θ1, θ3, θ3)/2` in normalized variables.
    pub theta1: f64,
    pub theta3: f64,
    pub regime: Regime,
    /// Wall amplitude. Enters only the fast-time mapping and the ODE oracle.
    pub epsilon: f64,
}

impl Cavity3DParams {
    /// Parameters with `μ = √(ν/96)` and `ε = 0`.
    pub fn new(nu: f64, theta1: f64, theta3: f64, regime: Regime) -> Result<Self> {
        let p = Cavity3DParams { nu, mu_coupling: (nu / 96.0).sqrt(), theta1, theta3, regime, epsilon: 0.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn vacuum(nu: f64, regime: Regime) -> Result<Self> {
        Self::new(nu, 1.0, 1.0, regime)
    }

    /// Both modes start at the temperature fixed by `θ1`.
    pub fn equal_temperature(nu: f64, theta1: f64, regime: Regime) -> Result<Self> {
        Self::new(nu, theta1, theta1 * equal_temperature_ratio(theta1), regime)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        self.epsilon = epsilon;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let op = "Cavity3DParams";
        if !(self.nu > 0.5 && self.nu.is_finite()) {
            return Err(Error::domain(op, format!("ν = {} must exceed 1/2", self.nu)));
        }
        if !(self.mu_coupling.is_finite()) {
            return Err(Error::domain(op, "μ is not finite"));
        }
        if !(self.theta1 >= 1.0 && self.theta3 >= 1.0) || !self.theta1.is_finite() || !self.theta3.is_finite() {
            return Err(Error::domain(
                op,
                format!("θ1 = {}, θ3 = {} must be finite and ≥ 1", self.theta1, self.theta3),
            ));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::domain(op, format!("ε = {}", self.epsilon)));
        }
        Ok(())
    }

    /// `ρ = √(2ν − 1)`.
    pub fn rho(&self) -> f64 {
        (2.0 * self.nu - 1.0).sqrt()
    }

    pub fn theta31(&self) -> f64 {
        self.theta3 / self.theta1
    }

    pub fn theta13(&self) -> f64 {
        self.theta1 / self.theta3
    }

    /// `R = 1 − 2/ν`.
    pub fn growth_rate(&self) -> f64 {
        1.0 - 2.0 / self.nu
    }

    /// `J = ν/2 + 1`.
    pub fn phase_rate(&self) -> f64 {
        0.5 * self.nu + 1.0
    }

    /// `(δ, Δ)` detunings of the wall and of the upper mode.
    pub fn detunings(&self) -> (f64, f64) {
        match self.regime {
            Regime::Symmetric => (0.0, 0.0),
            Regime::Asymmetric => {
                let delta = self.epsilon;
                (delta, 3.0 * delta - 0.5 * self.epsilon * self.nu)
            }
        }
    }

    /// `ω̄ = 1 + δ`.
    pub fn omega_bar(&self) -> f64 {
        1.0 + self.detunings().0
    }

    fn require(&self, regime: Regime, op: &'static str) -> Result<()> {
        self.validate()?;
        if self.regime != regime {
            return Err(Error::domain(op, format!("expects {regime:?} parameters")));
        }
        if regime == Regime::Asymmetric && self.nu < ASYMMETRIC_MIN_NU {
            return Err(Error::Validity(format!(
                "asymmetric resonance formulas need ν ≥ {ASYMMETRIC_MIN_NU}, got {}",
                self.nu
            )));
        }
        Ok(())
    }
}

/// Slow time `τ = εt/2` and an independently settable fast time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlowTime {
    pub tau: f64,
    pub fast_t: f64,
}

impl SlowTime {
    pub fn new(tau: f64, fast_t: f64) -> Result<Self> {
        if !(tau >= 0.0 && tau.is_finite()) || !fast_t.is_finite() {
            return Err(Error::domain("SlowTime", format!("τ = {tau}, t = {fast_t}")));
        }
        Ok(SlowTime { tau, fast_t })
    }

    /// Fast time `2τ/ε`, or 0 when `ε = 0`.
    pub fn from_epsilon(tau: f64, epsilon: f64) -> Result<Self> {
        let fast_t = if epsilon > 0.0 { 2.0 * tau / epsilon } else { 0.0 };
        Self::new(tau, fast_t)
    }
}

/// `C_k^±` and `S_k^±` at amplitude argument `a` and phase `kω̄t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoshSin {
    pub c_plus: f64,
    pub c_minus: f64,
    pub s_plus: f64,
    pub s_minus: f64,
}

impl CoshSin {
    pub fn new(a: f64, phase: f64) -> Self {
        let (ch, sh) = (a.cosh(), a.sinh());
        let (s, c) = phase.sin_cos();
        CoshSin { c_plus: ch * c + sh * s, c_minus: ch * c - sh * s, s_plus: sh * c + ch * s, s_minus: sh * c - ch * s }
    }
}

/// Transfer matrix for the exact resonance.
pub fn symmetric_transfer_matrix(p: &Cavity3DParams, st: SlowTime) -> Result<Mat4> {
    p.require(Regime::Symmetric, "symmetric_transfer_matrix")?;
    let rho = p.rho();
    let (sin_rt, cr) = (rho * st.tau).sin_cos();
    let sr = sin_rt / rho;
    let w = p.omega_bar() * st.fast_t;
    let m1 = CoshSin::new(st.tau, w);
    let m3 = CoshSin::new(st.tau, 3.0 * w);
    let g = 8.0 * p.mu_coupling * sr;
    #[rustfmt::skip]
    let m = Mat4::new(
        m1.c_minus * cr + m1.s_minus * sr, -(m1.s_minus * cr + m1.c_minus * sr),
        3.0 * g * m1.s_minus, g * m1.c_minus,
        -(m1.s_plus * cr + m1.c_plus * sr), m1.c_plus * cr + m1.s_plus * sr,
        -3.0 * g * m1.c_plus, -g * m1.s_plus,
        -g * m3.s_plus, g * m3.c_plus,
        m3.c_plus * cr - m3.s_plus * sr, (m3.s_plus * cr - m3.c_plus * sr) / 3.0,
        -3.0 * g * m3.c_minus, 3.0 * g * m3.s_minus,
        3.0 * (m3.s_minus * cr - m3.c_minus * sr), m3.c_minus * cr - m3.s_minus * sr,
    );
    Ok(m)
}

/// Transfer matrix for the asymmetric resonance, accurate to `O(ν⁻²)`.
pub fn asymmetric_transfer_matrix(p: &Cavity3DParams, st: SlowTime) -> Result<Mat4> {
    p.require(Regime::Asymmetric, "asymmetric_transfer_matrix")?;
    let (a, b) = (1.0 - 2.0 / p.nu, 2.0 / p.nu);
    let mu = p.mu_coupling;
    let w = p.omega_bar() * st.fast_t;
    let amp = 2.0 * p.growth_rate() * st.tau;
    let drift = 2.0 * p.phase_rate() * st.tau;
    let m1 = CoshSin::new(amp, w);
    let m3 = CoshSin::new(amp, 3.0 * w);
    let (s1, c1) = (w - drift).sin_cos();
    let (s3, c3) = (3.0 * w - drift).sin_cos();
    #[rustfmt::skip]
    let m = Mat4::new(
        a * m1.c_minus + b * c1, -(a * m1.s_minus - b * s1),
        (m1.c_minus - c1) / (4.0 * mu), -(m1.s_minus + s1) / (12.0 * mu),
        -(a * m1.s_plus + b * s1), a * m1.c_plus + b * c1,
        -(m1.s_plus - s1) / (4.0 * mu), (m1.c_plus - c1) / (12.0 * mu),
        (m3.c_minus - c3) / (12.0 * mu), -(m3.s_minus + s3) / (12.0 * mu),
        a * c3 + b * m3.c_minus, (a * s3 - b * m3.s_minus) / 3.0,
        -(m3.s_plus - s3) / (4.0 * mu), (m3.c_plus - c3) / (4.0 * mu),
        -3.0 * (a * s3 + b * m3.s_plus), a * c3 + b * m3.c_plus,
    );
    Ok(m)
}

/// Transfer matrix for `p.regime`.
pub fn transfer_matrix(p: &Cavity3DParams, st: SlowTime) -> Result<Mat4> {
    match p.regime {
        Regime::Symmetric => symmetric_transfer_matrix(p, st),
        Regime::Asymmetric => asymmetric_transfer_matrix(p, st),
    }
}

/// Conjugates a raw-variable map into normalized variables.
pub fn normalize_transfer(m: &Mat4) -> Mat4 {
    let r3 = 3f64.sqrt();
    let n = Vector4::new(1.0, 1.0, r3, 1.0 / r3);
    Mat4::from_fn(|i, j| n[i] * m[(i, j)] / n[j])
}

/// Covariance at `st` in normalized variables, propagated from the initial
/// thermal state. Asymmetric propagators are only approximately symplectic,
/// so their output is not checked against the uncertainty relations.
pub fn propagated_covariance(p: &Cavity3DParams, st: SlowTime) -> Result<TwoModeCovariance> {
    let t = normalize_transfer(&transfer_matrix(p, st)?);
    let q0 = Mat4::from_diagonal(&Vector4::new(p.theta1, p.theta1, p.theta3, p.theta3)) * 0.5;
    let q = t * q0 * t.transpose();
    match p.regime {
        Regime::Symmetric => TwoModeCovariance::new(q),
        Regime::Asymmetric => TwoModeCovariance::from_matrix_unchecked(q),
    }
}

/// Normalized mean energies `E_k = ⟨p_k² + ω_k² x_k²⟩/(2ω_k)`, which equal
/// half the trace of each normalized block.
pub fn energies_from_covariance(cov: &TwoModeCovariance) -> (f64, f64) {
    (0.5 * cov.q11().trace(), 0.5 * cov.q22().trace())
}

/// Closed-form `(E1, E3)` for the exact resonance.
pub fn symmetric_energies(p: &Cavity3DParams, tau: f64) -> Result<(f64, f64)> {
    p.require(Regime::Symmetric, "symmetric_energies")?;
    let rho = p.rho();
    let (s, c) = (rho * tau).sin_cos();
    let (ch, sh) = ((2.0 * tau).cosh(), (2.0 * tau).sinh());
    let osc = sh * (2.0 * rho * tau).sin() / rho;
    let base = |ratio: f64| ch * (s * s / (rho * rho) * (1.0 + 2.0 * p.nu * ratio) + c * c);
    Ok((0.5 * p.theta1 * (base(p.theta31()) + osc), 0.5 * p.theta3 * (base(p.theta13()) - osc)))
}

/// Closed-form `(E1, E3)` for the asymmetric resonance.
pub fn asymmetric_energies(p: &Cavity3DParams, tau: f64) -> Result<(f64, f64)> {
    p.require(Regime::Asymmetric, "asymmetric_energies")?;
    let (nu, r) = (p.nu, p.growth_rate());
    let psi = (2.0 * r * tau).cosh() * (2.0 * p.phase_rate() * tau).cos();
    let c4 = (4.0 * r * tau).cosh();
    let mix = c4 + 1.0 - 2.0 * psi;
    Ok((
        0.5 * p.theta1 * ((1.0 - 4.0 / nu) * c4 + 4.0 * psi / nu) + p.theta3 / nu * mix,
        0.5 * p.theta3 * (1.0 - 4.0 / nu + 4.0 * psi / nu) + p.theta1 / nu * mix,
    ))
}

/// `(x + 1) ln(x + 1) − (x − 1) ln(x − 1)` for `x ≥ 1`.
fn entropy_kernel(x: f64) -> f64 {
    let lower = x - 1.0;
    let tail = if lower > 0.0 { lower * lower.ln() } else { 0.0 };
    (x + 1.0) * (x + 1.0).ln() - tail
}

/// `I_c` of a state whose reduced determinants are `θ_k² g_k²/4` and whose
/// total determinant is conserved.
fn index_from_g(theta1: f64, g1: f64, theta3: f64, g3: f64) -> f64 {
    0.5 * [(theta1, g1), (theta3, g3)].iter().map(|&(t, g)| entropy_kernel(t * g) - entropy_kernel(t)).sum::<f64>()
}

/// Measures from `F`, energies and `g1, g3`.
fn closed_measures(f: f64, e1: f64, e3: f64, g1: f64, g3: f64, p: &Cavity3DParams) -> MeasureSet {
    let f = f.max(0.0);
    let l_tilde = 1.0 - 1.0 / (g1 * g3);
    let i_c = index_from_g(p.theta1, g1, p.theta3, g3);
    MeasureSet {
        y: (f / (4.0 * e1 * e3)).sqrt(),
        y_tilde: f.sqrt() / (e1 + e3),
        l_tilde,
        k2: l_tilde * (2.0 - l_tilde),
        z: 0.0,
        i_c,
        j_c: measures::compact_entropy(i_c),
    }
}

/// `(g1, g3)` for the exact resonance.
fn symmetric_g(p: &Cavity3DParams, tau: f64) -> (f64, f64) {
    let (nu, rho) = (p.nu, p.rho());
    let (s, c) = (rho * tau).sin_cos();
    let s2r = (2.0 * rho * tau).sin();
    let g = |ratio: f64| {
        let a = (2.0 * nu * ratio + 1.0) / (2.0 * nu - 1.0);
        (c.powi(4) + s2r * s2r * (2.0 * nu * ratio - 1.0) / (2.0 * (2.0 * nu - 1.0)) + s.powi(4) * a * a).sqrt()
    };
    (g(p.theta31()), g(p.theta13()))
}

/// Entanglement measures for the exact resonance.
///
/// `Y`, `Ỹ`, `L̃`, `I_c` and `J_c` come from the closed forms and are
/// cross-checked against the same measures of the propagated covariance;
/// a disagreement above [`DUAL_PATH_TOL`] is reported as
/// [`Error::SelfCheck`]. `K² = L̃(2 − L̃)`, and `Z` is taken from the
/// covariance.
pub fn symmetric_entanglement(p: &Cavity3DParams, tau: f64) -> Result<MeasureSet> {
    let (e1, e3) = symmetric_energies(p, tau)?;
    let (nu, rho) = (p.nu, p.rho());
    let (s, c) = (rho * tau).sin_cos();
    let (t1, t3) = (p.theta1, p.theta3);
    let f = nu / (2.0 * nu - 1.0)
        * s
        * s
        * ((4.0 * tau).cosh() * (c * c * (t1 - t3).powi(2) + s * s / (rho * rho) * (t1 + t3).powi(2))
            + (2.0 * rho * tau).sin() / rho * (4.0 * tau).sinh() * (t1 * t1 - t3 * t3));
    let (g1, g3) = symmetric_g(p, tau);
    let mut closed = closed_measures(f, e1, e3, g1, g3, p);

    let cov = propagated_covariance(p, SlowTime::new(tau, 0.0)?)?;
    let numeric = measures::measure_set(&cov)?;
    closed.z = numeric.z;
    let pairs = [
        ("Y", closed.y, numeric.y),
        ("Ỹ", closed.y_tilde, numeric.y_tilde),
        ("L̃", closed.l_tilde, numeric.l_tilde),
        ("I_c", closed.i_c, numeric.i_c),
        ("J_c", closed.j_c, numeric.j_c),
    ];
    for (name, a, b) in pairs {
        if !((a - b).abs() <= DUAL_PATH_TOL * a.abs().max(1.0)) {
            return Err(Error::SelfCheck {
                op: "symmetric_entanglement",
                detail: format!("{name}: closed form {a:e}, covariance {b:e} at τ = {tau}"),
            });
        }
    }
    Ok(closed)
}

/// Intermediate minima of `L̃` and `I_c` reached at `cos ρτ = 0` in the
/// high-temperature exact resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntermediateMinima {
    pub l_min: f64,
    /// High-temperature limit `ln(g1 g3)`.
    pub ic_min: f64,
}

impl IntermediateMinima {
    /// Upper envelope `2e^{−4τ}√L̃_min` of the intermediate minima of `Y`.
    pub fn y_star_envelope(&self, tau: f64) -> f64 {
        2.0 * (-4.0 * tau).exp() * self.l_min.sqrt()
    }
}

pub fn symmetric_intermediate_minima(p: &Cavity3DParams) -> Result<IntermediateMinima> {
    p.require(Regime::Symmetric, "symmetric_intermediate_minima")?;
    let nu = p.nu;
    let sum = p.theta31() + p.theta13();
    let num = 2.0 * nu * (sum + 2.0);
    Ok(IntermediateMinima {
        l_min: num / (4.0 * nu * nu + 1.0 + 2.0 * nu * sum),
        ic_min: (num / (2.0 * nu - 1.0).powi(2)).ln_1p(),
    })
}

/// Entanglement measures for the asymmetric resonance, to `O(ν⁻²)`.
///
/// `Z` is evaluated on the propagated covariance.
pub fn asymmetric_entanglement(p: &Cavity3DParams, tau: f64) -> Result<MeasureSet> {
    let (e1, e3) = asymmetric_energies(p, tau)?;
    let (nu, r) = (p.nu, p.growth_rate() * tau);
    let (t1, t3) = (p.theta1, p.theta3);
    let ch = |x: f64| x.cosh();
    let sh = |x: f64| x.sinh();
    let c0 = (-2.0 * p.phase_rate() * tau).cos();
    let (c2, c4, c6) = (ch(2.0 * r), ch(4.0 * r), ch(6.0 * r));
    let k = 2.0 / nu;
    let f = k
        * (t1
            * t1
            * (c4 * c4 + sh(2.0 * r).powi(2) - c6 * c0
                + k * (c0 * (c2 + 3.0 * c6) - 2.0 * c2 * c2 * c0 * c0 - 2.0 * c4 - 2.0 * sh(4.0 * r).powi(2)))
            + t3 * t3 * (c2 * c2 - c2 * c0 + k * (c0 * (c6 + 3.0 * c2) - 2.0 * c2 * c2 * c0 * c0 - 2.0 * c4))
            + 2.0
                * t1
                * t3
                * (c4 * (c2 * c0 - 1.0)
                    + k * (-2.0 * c0 * (c6 + c2) + 2.0 * c2 * c2 * c0 * c0 + 4.0 * c2.powi(4) - 2.0)));
    let psi = c2 * (2.0 * p.phase_rate() * tau).cos();
    let g = |ratio: f64| (1.0 + 8.0 / nu * ((1.0 - ratio) * psi - 1.0 + ratio * c2 * c2)).sqrt();
    let mut out = closed_measures(f, e1, e3, g(p.theta31()), g(p.theta13()), p);
    let cov = propagated_covariance(p, SlowTime::new(tau, 0.0)?)?;
    out.z = measures::distance_coefficient(&cov)?;
    Ok(out)
}

/// Closed-form measures for `p.regime`.
pub fn entanglement(p: &Cavity3DParams, tau: f64) -> Result<MeasureSet> {
    match p.regime {
        Regime::Symmetric => symmetric_entanglement(p, tau),
        Regime::Asymmetric => asymmetric_entanglement(p, tau),
    }
}

/// Closed-form energies for `p.regime`.
pub fn energies(p: &Cavity3DParams, tau: f64) -> Result<(f64, f64)> {
    match p.regime {
        Regime::Symmetric => symmetric_energies(p, tau),
        Regime::Asymmetric => asymmetric_energies(p, tau),
    }
}

/// Default oracle step, a thousandth of the upper mode's period.
pub fn default_ode_step(p: &Cavity3DParams) -> f64 {
    2.0 * PI / (1000.0 * 3.0 * p.omega_bar())
}

/// Largest oracle step accepted, a hundredth of the upper mode's period.
pub fn max_ode_step(p: &Cavity3DParams) -> f64 {
    2.0 * PI / (100.0 * 3.0 * p.omega_bar())
}

/// Fundamental matrix at fast time `t_end` of the second-order system for
/// `x1`, `x3` with a wall oscillating as `cos 2ω̄t`, integrated by RK4.
///
/// Columns are the images of unit initial data in `(x1, ẋ1, x3, ẋ3)`;
/// velocities coincide with the canonical momenta at zeroth order in `ε`.
/// The parametric term on `x3` is omitted, as in [`ode_oracle_with`] with
/// `eps_tilde = 0`.
pub fn ode_oracle(p: &Cavity3DParams, t_end: f64, step: f64) -> Result<Mat4> {
    ode_oracle_with(p, t_end, step, 0.0)
}

/// [`ode_oracle`] with the parametric modulation `ε̃ cos(2ω̄t)` of the
/// upper-mode frequency included.
pub fn ode_oracle_with(p: &Cavity3DParams, t_end: f64, step: f64, eps_tilde: f64) -> Result<Mat4> {
    p.validate()?;
    let op = "ode_oracle";
    if !(p.epsilon <= ODE_MAX_EPSILON) {
        return Err(Error::domain(op, format!("ε = {} exceeds {ODE_MAX_EPSILON}", p.epsilon)));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::domain(op, format!("t_end = {t_end}")));
    }
    let limit = max_ode_step(p);
    if !(step > 0.0 && step <= limit) {
        return Err(Error::StepTooLarge { step, limit });
    }
    let eps = p.epsilon;
    let (_, big_delta) = p.detunings();
    let wb2 = 2.0 * p.omega_bar();
    let cpl = 24.0 * p.mu_coupling * eps;
    let mut rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let (s, c) = (wb2 * t).sin_cos();
        let w1 = 1.0 + 4.0 * eps * c;
        let w3 = 9.0 + 6.0 * big_delta + eps_tilde * c;
        for col in 0..4 {
            let o = 4 * col;
            let (x1, v1, x3, v3) = (y[o], y[o + 1], y[o + 2], y[o + 3]);
            dy[o] = v1;
            dy[o + 1] = -w1 * x1 + cpl * (c * x3 + s * v3);
            dy[o + 2] = v3;
            dy[o + 3] = -w3 * x3 - cpl * (c * x1 + s * v1);
        }
    };
    let mut y = [0.0; 16];
    for col in 0..4 {
        y[5 * col] = 1.0;
    }
    let steps = (t_end / step).ceil() as usize;
    Rk4::new(16).integrate(&mut rhs, 0.0, t_end, steps, &mut y);
    Ok(Mat4::from_fn(|i, j| y[4 * j + i]))
}
