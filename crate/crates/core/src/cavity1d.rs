//! One-dimensional cavity with a wall oscillating at `p` times the
//! fundamental frequency.
//!
//! The Bogoliubov coefficients `ρ_m^{(n)}(τ)` mix the initial operators
//! `b_n` into the final ones `a_m`. They are available from the
//! hypergeometric closed form ([`rho_closed_form`]), from elliptic-integral
//! forms for `p = 2` ([`rho_elliptic`]) and from a truncated RK4 integration
//! of the coupled equations ([`rho_ode_table`]).
//!
//! For `p = 2` and an initial vacuum the pair moments follow from exact
//! finite ODEs ([`p2_moments_ode`]) and printed closed forms
//! ([`p2_moments_closed`]). For `p = 1` every mode is driven by the single
//! coefficient `ρ_m^{(1)}`, and [`p1_entanglement`] handles several initial
//! states of the first mode.
//!
//! `κ = tanh(pτ)` and `κ̃ = sech(pτ)` are always evaluated separately so that
//! `κ̃²` never comes from the cancelling difference `1 − κ²`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian_core::{self, SecondMoments, TwoModeCovariance};
use crate::measures::{self, MeasureSet};
use crate::ode::{rk4_linear_propagator, Rk4};
use crate::specfun::{self, EllipticPair};

/// Agreement required between independent routes to the same measure.
pub const DUAL_PATH_TOL: f64 = 1e-8;

/// Agreement required between the pair-symplectic formula and the generic
/// symplectic spectrum.
pub const SPECTRUM_TOL: f64 = 1e-10;

/// Window-doubling stops once the reported window changes by less than this.
pub const WINDOW_TOL: f64 = 1e-8;

/// Largest step accepted by the RK4 integrations.
pub const MAX_STEP: f64 = 1e-3;

/// The truncated integration never uses a step above
/// `STABILITY_FACTOR / (p K)` for truncation `K`.
pub const STABILITY_FACTOR: f64 = 0.02;

/// Largest truncation tried by [`rho_ode_table`] is `MAX_TRUNCATION_PER_P · p`,
/// which keeps every residue class at most `2 MAX_TRUNCATION_PER_P` rows.
pub const MAX_TRUNCATION_PER_P: usize = 640;

/// Below this `κ` the elliptic forms lose digits to cancellation and
/// [`rho_elliptic`] uses the hypergeometric forms instead.
const ELLIPTIC_MIN_KAPPA: f64 = 0.1;

/// `(κ, κ̃) = (tanh pτ, sech pτ)`.
pub fn compact_time(p: u32, tau: f64) -> (f64, f64) {
    let x = p as f64 * tau;
    (x.tanh(), 1.0 / x.cosh())
}

/// `σ = (−1)^p`.
fn sigma_pow(p: u32, d: i64) -> f64 {
    if (p as i64 * d).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_tau(op: &'static str, tau: f64) -> Result<()> {
    if tau >= 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("tau = {tau} must be finite and non-negative")))
    }
}

fn check_p(op: &'static str, p: u32) -> Result<()> {
    if p >= 1 {
        Ok(())
    } else {
        Err(Error::domain(op, "resonance order p must be at least 1"))
    }
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

/// `ρ_{j+mp}^{(j+np)}(τ)` from the hypergeometric closed form.
///
/// `0 ≤ j < p` and `j + np ≥ 1`. A non-positive integer `1 + n − m` is
/// handled through the regularized `₂F₁`, and a pole of `Γ(1 + m + j/p)`
/// gives an exact zero.
pub fn rho_closed_form(j: u32, m: i64, n: i64, p: u32, tau: f64) -> Result<f64> {
    let op = "rho_closed_form";
    check_p(op, p)?;
    check_tau(op, tau)?;
    if j >= p {
        return Err(Error::domain(op, format!("residue j = {j} must be below p = {p}")));
    }
    if j as i64 + n * p as i64 <= 0 {
        return Err(Error::domain(op, format!("upper index j + np = {} < 1", j as i64 + n * p as i64)));
    }
    if tau == 0.0 {
        return Ok(if m == n { 1.0 } else { 0.0 });
    }
    let (kappa, kappa_tilde) = compact_time(p, tau);
    let jp = j as f64 / p as f64;
    let (nf, mf) = (n as f64, m as f64);
    let d = n - m;
    let Some((ln_den, sign_den)) = specfun::ln_gamma_signed(1.0 + mf + jp) else {
        return Ok(0.0);
    };
    let f =
        specfun::hyp2f1_regularized_split(nf + jp, -mf - jp, 1.0 + d as f64, kappa * kappa, kappa_tilde * kappa_tilde)?;
    if f == 0.0 {
        return Ok(0.0);
    }
    let ln_mag = specfun::ln_gamma(1.0 + nf + jp)? - ln_den + d as f64 * kappa.ln() + f.abs().ln();
    Ok(sign_den * sigma_pow(p, d) * f.signum() * ln_mag.exp())
}

/// `ρ_lower^{(upper)}(τ)` for any lower index and `upper ≥ 1`; zero when the
/// indices lie in different residue classes modulo `p`.
pub fn rho(lower: i64, upper: i64, p: u32, tau: f64) -> Result<f64> {
    check_p("rho", p)?;
    if upper < 1 {
        return Err(Error::domain("rho", format!("upper index {upper} < 1")));
    }
    let pi = p as i64;
    let j = upper.rem_euclid(pi);
    if lower == 0 || (lower - j).rem_euclid(pi) != 0 {
        check_tau("rho", tau)?;
        return Ok(0.0);
    }
    rho_closed_form(j as u32, (lower - j) / pi, (upper - j) / pi, p, tau)
}

/// Shared evaluation context for the `p = 2` coefficients `ρ_{±(2m+1)}^{(1)}`
/// at one instant.
struct OddRho {
    kappa: f64,
    kappa_tilde: f64,
    ke: Option<EllipticPair>,
}

impl OddRho {
    fn new(tau: f64) -> Result<Self> {
        let (kappa, kappa_tilde) = compact_time(2, tau);
        let ke = if kappa >= ELLIPTIC_MIN_KAPPA { Some(specfun::elliptic_ke_pair(kappa, kappa_tilde)?) } else { None };
        Ok(OddRho { kappa, kappa_tilde, ke })
    }

    fn value(&self, lower: i64) -> Result<f64> {
        if self.kappa == 0.0 {
            return Ok(if lower == 1 { 1.0 } else { 0.0 });
        }
        match (self.ke, lower) {
            (Some(ke), -5..=5) => Ok(self.elliptic(&ke, lower)),
            _ => self.hypergeometric(lower),
        }
    }

    fn elliptic(&self, ke: &EllipticPair, lower: i64) -> f64 {
        let (k, kt2) = (self.kappa, self.kappa_tilde * self.kappa_tilde);
        let k2 = k * k;
        let (kk, ee) = (ke.k_big, ke.e_big);
        match lower {
            1 => 2.0 / PI * ee,
            -1 => 2.0 / (PI * k) * (ee - kt2 * kk),
            3 => 2.0 / (3.0 * PI * k) * ((1.0 - 2.0 * k2) * ee - kt2 * kk),
            -3 => -2.0 / (3.0 * PI * k2) * ((2.0 - k2) * ee - 2.0 * kt2 * kk),
            5 => 2.0 / (15.0 * PI * k2) * ((8.0 * k2 * k2 - 3.0 * k2 - 2.0) * ee + kt2 * (4.0 * k2 + 2.0) * kk),
            -5 => -2.0 / (15.0 * PI * k2 * k) * ((2.0 * k2 * k2 + 3.0 * k2 - 8.0) * ee + kt2 * (k2 + 8.0) * kk),
            _ => unreachable!("elliptic forms cover |lower| ≤ 5"),
        }
    }

    fn hypergeometric(&self, lower: i64) -> Result<f64> {
        let (z, zc) = (self.kappa * self.kappa, self.kappa_tilde * self.kappa_tilde);
        let m = (lower.abs() - 1) / 2;
        let mf = m as f64;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        // Γ(m + ½)/Γ(½) = (½)_m
        let half_poch = (specfun::ln_gamma(mf + 0.5)? - specfun::ln_gamma(0.5)?).exp();
        if lower > 0 {
            let f = specfun::hyp2f1_regularized_split(mf + 0.5, -0.5, 1.0 + mf, z, zc)?;
            Ok(sign * half_poch * self.kappa.powi(m as i32) * f)
        } else {
            // Γ(m + ½)Γ(3/2)/π = (½)_m · ½
            let f = specfun::hyp2f1_regularized_split(mf + 0.5, 0.5, 2.0 + mf, z, zc)?;
            Ok(sign * half_poch * 0.5 * self.kappa.powi(m as i32 + 1) * f)
        }
    }
}

fn check_odd(op: &'static str, m: i64) -> Result<()> {
    if m.rem_euclid(2) == 1 {
        Ok(())
    } else {
        Err(Error::domain(op, format!("index {m} must be odd")))
    }
}

/// `ρ_{m}^{(1)}(τ)` for `p = 2` and odd `m` of either sign.
///
/// Uses the complete elliptic integrals for `|m| ≤ 5` once `κ ≥ 0.1` and
/// the hypergeometric series in `κ²` otherwise.
pub fn rho_elliptic(m_signed: i64, tau: f64) -> Result<f64> {
    check_odd("rho_elliptic", m_signed)?;
    check_tau("rho_elliptic", tau)?;
    OddRho::new(tau)?.value(m_signed)
}

// ---------------------------------------------------------------------------
// Bogoliubov table from the truncated equations
// ---------------------------------------------------------------------------

/// Dense table of `ρ_m^{(n)}` for `0 < |m| ≤ m_max`, `1 ≤ n ≤ n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovTable {
    pub p: u32,
    pub tau: f64,
    /// `tanh(pτ)`.
    pub kappa_time: f64,
    /// `sech(pτ)`.
    pub kappa_tilde: f64,
    m_max: usize,
    n_max: usize,
    truncation: usize,
    certified: Option<(usize, usize)>,
    /// Row `m + m_max`, column `n − 1`; the row for `m = 0` stays zero.
    values: Vec<f64>,
}

impl BogoliubovTable {
    fn zeros(p: u32, tau: f64, m_max: usize, n_max: usize, truncation: usize) -> Self {
        let (kappa_time, kappa_tilde) = compact_time(p, tau);
        BogoliubovTable {
            p,
            tau,
            kappa_time,
            kappa_tilde,
            m_max,
            n_max,
            truncation,
            certified: None,
            values: vec![0.0; (2 * m_max + 1) * n_max],
        }
    }

    /// The table at `τ = 0`, `ρ_m^{(n)} = δ_mn`.
    pub fn identity(p: u32, m_max: usize, n_max: usize) -> Self {
        let mut t = Self::zeros(p, 0.0, m_max, n_max, m_max);
        for n in 1..=m_max.min(n_max) {
            t.set(n as i64, n as i64, 1.0);
        }
        t
    }

    fn slot(&self, m: i64, n: i64) -> Option<usize> {
        let mm = self.m_max as i64;
        if m == 0 || m.abs() > mm || n < 1 || n > self.n_max as i64 {
            return None;
        }
        Some((m + mm) as usize * self.n_max + (n - 1) as usize)
    }

    fn set(&mut self, m: i64, n: i64, v: f64) {
        let i = self.slot(m, n).expect("index inside the table");
        self.values[i] = v;
    }

    /// `ρ_m^{(n)}`, zero outside the table.
    pub fn get(&self, m: i64, n: i64) -> f64 {
        self.slot(m, n).map_or(0.0, |i| self.values[i])
    }

    /// `(m_max, n_max)`.
    pub fn window(&self) -> (usize, usize) {
        (self.m_max, self.n_max)
    }

    /// Truncation `|m| ≤ K` of the integrated system.
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Window on which window doubling certified convergence, if any.
    pub fn certified_window(&self) -> Option<(usize, usize)> {
        self.certified
    }

    /// Copy limited to `|m| ≤ window.0`, `n ≤ window.1`.
    pub fn restrict(&self, window: (usize, usize)) -> Result<Self> {
        let (m_max, n_max) = window;
        if m_max > self.m_max || n_max > self.n_max || m_max == 0 || n_max == 0 {
            return Err(Error::domain(
                "BogoliubovTable::restrict",
                format!("window {window:?} not inside {:?}", self.window()),
            ));
        }
        let mut t = Self::zeros(self.p, self.tau, m_max, n_max, self.truncation);
        t.certified = self.certified.filter(|&(a, b)| a <= m_max && b <= n_max);
        for m in -(m_max as i64)..=m_max as i64 {
            for n in 1..=n_max as i64 {
                if m != 0 {
                    t.set(m, n, self.get(m, n));
                }
            }
        }
        Ok(t)
    }

    /// Largest `|Δρ|` against `other` over `|m| ≤ window.0`, `n ≤ window.1`.
    pub fn max_abs_diff(&self, other: &BogoliubovTable, window: (usize, usize)) -> f64 {
        let mut worst = 0.0f64;
        for m in -(window.0 as i64)..=window.0 as i64 {
            for n in 1..=window.1 as i64 {
                worst = worst.max((self.get(m, n) - other.get(m, n)).abs());
            }
        }
        worst
    }

    /// Text dump: a `p tau m_max n_max` header, then one `m n value` line
    /// per entry.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {:e} {} {}", self.p, self.tau, self.m_max, self.n_max);
        for m in -(self.m_max as i64)..=self.m_max as i64 {
            if m == 0 {
                continue;
            }
            for n in 1..=self.n_max as i64 {
                let _ = writeln!(out, "{m} {n} {:e}", self.get(m, n));
            }
        }
        out
    }

    /// Parses the output of [`BogoliubovTable::dump`].
    pub fn from_dump(text: &str) -> Result<Self> {
        let bad = |line: usize, what: &str| Error::domain("BogoliubovTable::from_dump", format!("line {line}: {what}"));
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| bad(1, "missing header"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 4 {
            return Err(bad(1, "header must be `p tau m_max n_max`"));
        }
        let p: u32 = h[0].parse().map_err(|_| bad(1, "p"))?;
        let tau: f64 = h[1].parse().map_err(|_| bad(1, "tau"))?;
        let m_max: usize = h[2].parse().map_err(|_| bad(1, "m_max"))?;
        let n_max: usize = h[3].parse().map_err(|_| bad(1, "n_max"))?;
        let mut t = Self::zeros(p, tau, m_max, n_max, m_max);
        for (i, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(bad(i + 1, "expected `m n value`"));
            }
            let m: i64 = f[0].parse().map_err(|_| bad(i + 1, "m"))?;
            let n: i64 = f[1].parse().map_err(|_| bad(i + 1, "n"))?;
            let v: f64 = f[2].parse().map_err(|_| bad(i + 1, "value"))?;
            let slot = t.slot(m, n).ok_or_else(|| bad(i + 1, "index outside the window"))?;
            t.values[slot] = v;
        }
        Ok(t)
    }
}

/// Table of the system truncated to `|m| ≤ truncation`, with every
/// coefficient outside held at zero, on the square window
/// `(truncation, truncation)`.
///
/// The equations are linear with constant coefficients, so each residue
/// class modulo `p` is advanced by the RK4 step matrix raised to the number
/// of steps. The step is `min(step, STABILITY_FACTOR/(p K))`, rounded down
/// so that it divides `τ`.
pub fn rho_ode_truncated(p: u32, tau: f64, truncation: usize, step: f64) -> Result<BogoliubovTable> {
    let op = "rho_ode_truncated";
    check_p(op, p)?;
    check_tau(op, tau)?;
    if !(step > 0.0) {
        return Err(Error::domain(op, format!("step = {step} must be positive")));
    }
    if step > MAX_STEP {
        return Err(Error::StepTooLarge { step, limit: MAX_STEP });
    }
    if truncation == 0 {
        return Err(Error::domain(op, "truncation must be positive"));
    }
    if tau == 0.0 {
        return Ok(BogoliubovTable::identity(p, truncation, truncation));
    }
    let k = truncation as i64;
    let pi = p as i64;
    let h_target = step.min(STABILITY_FACTOR / (p as f64 * truncation as f64));
    let steps = (tau / h_target).ceil() as usize;
    let h = tau / steps as f64;
    let sigma = sigma_pow(p, 1);

    let mut table = BogoliubovTable::zeros(p, tau, truncation, truncation, truncation);
    for class in 0..pi {
        let lowers: Vec<i64> = (-k..=k).filter(|&m| m != 0 && m.rem_euclid(pi) == class).collect();
        let dim = lowers.len();
        let index = |m: i64| lowers.binary_search(&m).ok();
        let mut a = DMatrix::<f64>::zeros(dim, dim);
        for (row, &m) in lowers.iter().enumerate() {
            if let Some(col) = index(m + pi) {
                a[(row, col)] += sigma * (m + pi) as f64;
            }
            if let Some(col) = index(m - pi) {
                a[(row, col)] -= sigma * (m - pi) as f64;
            }
        }
        let u = rk4_linear_propagator(&a, h, steps);
        for n in (1..=k).filter(|n| n.rem_euclid(pi) == class) {
            let col = index(n).expect("positive upper index is a row of its class");
            for (row, &m) in lowers.iter().enumerate() {
                table.set(m, n, u[(row, col)]);
            }
        }
    }
    Ok(table)
}

/// Certified table on `window = (m_max, n_max)`.
///
/// The truncation starts at `max(⌈4pτ + 20⌉, 40, m_max, n_max)` and doubles
/// until the entries inside `window` change by less than [`WINDOW_TOL`].
/// The returned table covers the whole final truncation, with
/// [`BogoliubovTable::certified_window`] set to `window`.
pub fn rho_ode_table(p: u32, tau: f64, window: (usize, usize), step: f64) -> Result<BogoliubovTable> {
    let op = "rho_ode_table";
    check_p(op, p)?;
    check_tau(op, tau)?;
    if window.0 == 0 || window.1 == 0 {
        return Err(Error::domain(op, format!("window {window:?} must be non-empty")));
    }
    let start = ((4.0 * p as f64 * tau + 20.0).ceil() as usize).max(40).max(window.0).max(window.1);
    let limit = MAX_TRUNCATION_PER_P * p as usize;
    let mut k = start;
    let mut prev = rho_ode_truncated(p, tau, k, step)?;
    loop {
        if 2 * k > limit.max(start) {
            return Err(Error::no_convergence(
                op,
                format!("window {window:?} at τ = {tau} not stable up to truncation {k}"),
            ));
        }
        let next = rho_ode_truncated(p, tau, 2 * k, step)?;
        let change = prev.max_abs_diff(&next, window);
        if change < WINDOW_TOL {
            let mut t = next;
            t.certified = Some(window);
            return Ok(t);
        }
        prev = next;
        k *= 2;
    }
}

/// Largest deviations from the three unitarity identities
///
/// - `Σ_m m ρ_m^{(n)} ρ_m^{(k)} = n δ_nk`,
/// - `Σ_n (m/n)[ρ_m^{(n)} ρ_j^{(n)} − ρ_{−m}^{(n)} ρ_{−j}^{(n)}] = δ_mj`,
/// - `Σ_n (1/n)[ρ_m^{(n)} ρ_{−j}^{(n)} − ρ_j^{(n)} ρ_{−m}^{(n)}] = 0`,
///
/// with sums over the whole table. The free indices run over the certified
/// window when the table has one and over the full table otherwise, in both
/// cases stopping `p` short of the edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitarityResiduals {
    pub r81: f64,
    pub r82: f64,
    pub r83: f64,
}

impl UnitarityResiduals {
    pub fn max(&self) -> f64 {
        self.r81.max(self.r82).max(self.r83)
    }
}

pub fn unitarity_residuals(table: &BogoliubovTable) -> UnitarityResiduals {
    let (m_max, n_max) = table.window();
    let p = table.p as usize;
    let pos = DMatrix::from_fn(m_max, n_max, |i, j| table.get(i as i64 + 1, j as i64 + 1));
    let neg = DMatrix::from_fn(m_max, n_max, |i, j| table.get(-(i as i64) - 1, j as i64 + 1));

    let (m_free, n_free) = table.certified_window().unwrap_or((m_max, n_max));
    let n_in = n_free.saturating_sub(p);
    let weighted_pos = DMatrix::from_fn(m_max, n_max, |i, j| (i + 1) as f64 * pos[(i, j)]);
    let weighted_neg = DMatrix::from_fn(m_max, n_max, |i, j| (i + 1) as f64 * neg[(i, j)]);
    let g81 = pos.transpose() * &weighted_pos - neg.transpose() * &weighted_neg;
    let mut r81 = 0.0f64;
    for n in 0..n_in {
        for k in 0..n_in {
            let target = if n == k { (n + 1) as f64 } else { 0.0 };
            r81 = r81.max((g81[(n, k)] - target).abs());
        }
    }

    let m_in = m_free.saturating_sub(p);
    let ratio = DMatrix::from_fn(m_max, n_max, |i, j| (i + 1) as f64 / (j + 1) as f64);
    let inv_n = DMatrix::from_fn(m_max, n_max, |_, j| 1.0 / (j + 1) as f64);
    let g82 = pos.component_mul(&ratio) * pos.transpose() - neg.component_mul(&ratio) * neg.transpose();
    let b83 = pos.component_mul(&inv_n) * neg.transpose();
    let (mut r82, mut r83) = (0.0f64, 0.0f64);
    for m in 0..m_in {
        for j in 0..m_in {
            let target = if m == j { 1.0 } else { 0.0 };
            r82 = r82.max((g82[(m, j)] - target).abs());
            r83 = r83.max((b83[(m, j)] - b83[(j, m)]).abs());
        }
    }
    UnitarityResiduals { r81, r82, r83 }
}

/// Largest residual of the recurrences in the upper index,
///
/// `dρ_m^{(n)}/dτ = nσ[ρ_m^{(n−p)} − ρ_m^{(n+p)}]` for `n ≥ p`, and
/// `dρ_m^{(n)}/dτ = nσ[ρ_{−m}^{(p−n)} − ρ_m^{(p+n)}]` for `n < p`,
///
/// over `|m| ≤ window.0`, `n ≤ window.1`, with the derivative taken by a
/// five-point central difference of tables at a common certified
/// truncation. Requires `τ ≥ 2δ` with `δ = 2·10⁻³`.
pub fn upper_recurrence_residual(p: u32, tau: f64, window: (usize, usize), step: f64) -> Result<f64> {
    let op = "upper_recurrence_residual";
    const DELTA: f64 = 2e-3;
    if tau < 2.0 * DELTA {
        return Err(Error::domain(op, format!("tau = {tau} below the stencil width {}", 2.0 * DELTA)));
    }
    let reach = (window.0 + p as usize, window.1 + p as usize);
    let centre = rho_ode_table(p, tau, reach, step)?;
    let k = centre.truncation();
    let at = |dt: f64| rho_ode_truncated(p, tau + dt, k, step);
    let (m2, m1, p1, p2) = (at(-2.0 * DELTA)?, at(-DELTA)?, at(DELTA)?, at(2.0 * DELTA)?);
    let sigma = sigma_pow(p, 1);
    let pi = p as i64;
    let mut worst = 0.0f64;
    for m in -(window.0 as i64)..=window.0 as i64 {
        if m == 0 {
            continue;
        }
        for n in 1..=window.1 as i64 {
            let deriv = (m2.get(m, n) - 8.0 * m1.get(m, n) + 8.0 * p1.get(m, n) - p2.get(m, n)) / (12.0 * DELTA);
            let rhs = if n >= pi {
                let lower = if n == pi { 0.0 } else { centre.get(m, n - pi) };
                n as f64 * sigma * (lower - centre.get(m, n + pi))
            } else {
                n as f64 * sigma * (centre.get(-m, pi - n) - centre.get(m, pi + n))
            };
            worst = worst.max((deriv - rhs).abs());
        }
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Parametric resonance, p = 2
// ---------------------------------------------------------------------------

/// Second moments of the mode pair `(r, s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMoments1D {
    pub r: i64,
    pub s: i64,
    pub moments: SecondMoments,
}

impl PairMoments1D {
    /// `(E_r, E_s)` with `E = ⟨a†a⟩ + ½`.
    pub fn energies(&self) -> (f64, f64) {
        (self.moments.n_r + 0.5, self.moments.n_s + 0.5)
    }
}

fn check_mode(op: &'static str, r: i64) -> Result<()> {
    if r >= 1 {
        Ok(())
    } else {
        Err(Error::domain(op, format!("mode index {r} must be at least 1")))
    }
}

/// Pair moments for `p = 2` from the vacuum, by RK4 integration of
///
/// `d⟨a_r a_s⟩/dτ = −√(rs)[ρ_r ρ_s + ρ_{−r} ρ_{−s}]`,
/// `d⟨a_r† a_s⟩/dτ = √(rs)[ρ_r ρ_{−s} + ρ_{−r} ρ_s]`,
///
/// with `ρ_k = ρ_k^{(1)}` from [`rho_elliptic`] and a step of at most
/// [`MAX_STEP`]. Even modes are never excited and are rejected.
pub fn p2_moments_ode(r: i64, s: i64, tau: f64) -> Result<PairMoments1D> {
    let mut path = p2_moments_path(r, s, &[tau])?;
    Ok(path.remove(0))
}

/// [`p2_moments_ode`] at every point of an ascending grid, integrating once
/// with at most [`MAX_STEP`] between consecutive points.
pub fn p2_moments_path(r: i64, s: i64, taus: &[f64]) -> Result<Vec<PairMoments1D>> {
    let op = "p2_moments_ode";
    check_mode(op, r)?;
    check_mode(op, s)?;
    check_odd(op, r)?;
    check_odd(op, s)?;
    for &tau in taus {
        check_tau(op, tau)?;
    }
    if taus.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain(op, "time grid must be ascending"));
    }
    let (rf, sf) = (r as f64, s as f64);
    let rs = (rf * sf).sqrt();
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    // y = [⟨a_r a_s⟩, ⟨a_r† a_s⟩, ⟨a_r† a_r⟩, ⟨a_s† a_s⟩, ⟨a_r²⟩, ⟨a_s²⟩]
    let mut rhs = |t: f64, _y: &[f64], dy: &mut [f64]| {
        let vals = OddRho::new(t).and_then(|ctx| Ok([ctx.value(r)?, ctx.value(-r)?, ctx.value(s)?, ctx.value(-s)?]));
        let [pr, mr, ps, ms] = match vals {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                [0.0; 4]
            }
        };
        dy[0] = -rs * (pr * ps + mr * ms);
        dy[1] = rs * (pr * ms + mr * ps);
        dy[2] = 2.0 * rf * pr * mr;
        dy[3] = 2.0 * sf * ps * ms;
        dy[4] = -rf * (pr * pr + mr * mr);
        dy[5] = -sf * (ps * ps + ms * ms);
    };
    let mut y = [0.0; 6];
    let mut rk = Rk4::new(6);
    let mut t = 0.0;
    let mut out = Vec::with_capacity(taus.len());
    for &tau in taus {
        let steps = ((tau - t) / MAX_STEP).ceil() as usize;
        if steps > 0 {
            rk.integrate(&mut rhs, t, tau, steps, &mut y);
        }
        t = tau;
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        out.push(PairMoments1D {
            r,
            s,
            moments: SecondMoments {
                a_rs: Complex64::new(y[0], 0.0),
                adag_r_a_s: Complex64::new(y[1], 0.0),
                n_r: y[2],
                n_s: y[3],
                a_rr: Complex64::new(y[4], 0.0),
                a_ss: Complex64::new(y[5], 0.0),
            },
        });
    }
    Ok(out)
}

/// Printed elliptic-integral closed forms of the `p = 2` pair moments.
///
/// `⟨a_5²⟩` has no printed form, so the squared moments are optional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedPairMoments {
    pub r: i64,
    pub s: i64,
    /// `⟨a_r a_s⟩`.
    pub a_rs: Option<f64>,
    /// `⟨a_r† a_s⟩`.
    pub adag_r_a_s: f64,
    /// `E_r = ⟨a_r† a_r⟩ + ½`.
    pub e_r: f64,
    pub e_s: f64,
    /// `⟨a_r²⟩`.
    pub a_rr: Option<f64>,
    /// `⟨a_s²⟩`.
    pub a_ss: Option<f64>,
}

/// The closed forms as functions of `(κ, κ̃)`.
struct ClosedForms {
    k: f64,
    k2: f64,
    kt2: f64,
    kk: f64,
    ee: f64,
}

impl ClosedForms {
    fn new(tau: f64) -> Result<Self> {
        let (k, kt) = compact_time(2, tau);
        let ke = specfun::elliptic_ke_pair(k, kt)?;
        Ok(ClosedForms { k, k2: k * k, kt2: kt * kt, kk: ke.k_big, ee: ke.e_big })
    }

    fn energy(&self, r: i64) -> f64 {
        let ClosedForms { k2, kt2, kk, ee, .. } = *self;
        let pi2 = PI * PI;
        match r {
            1 => 2.0 / pi2 * kk * (2.0 * ee - kt2 * kk),
            3 => 2.0 / (3.0 * pi2 * k2) * ((3.0 * k2 - 2.0) * kk * (2.0 * ee - kt2 * kk) + 2.0 * (1.0 + k2) * ee * ee),
            5 => {
                let k4 = k2 * k2;
                -2.0 / (45.0 * pi2 * k4)
                    * (kt2 * (47.0 * k4 - 30.0 * k2 - 8.0) * kk * kk
                        + 2.0 * (4.0 * k4 * k2 - 47.0 * k4 + 26.0 * k2 + 8.0) * ee * kk
                        - 2.0 * (k2 + 1.0) * (4.0 * k4 + 11.0 * k2 + 4.0) * ee * ee)
            }
            _ => unreachable!(),
        }
    }

    fn square(&self, r: i64) -> Option<f64> {
        let ClosedForms { k, k2, kt2, kk, ee } = *self;
        let pi2 = PI * PI;
        match r {
            1 => Some(2.0 / (pi2 * k) * (kt2 * kk * kk - 2.0 * ee * kk + ee * ee)),
            3 => Some(
                2.0 / (9.0 * pi2 * k2 * k)
                    * (kt2 * (4.0 - k2) * kk * kk - 2.0 * (2.0 * k2 * k2 - 3.0 * k2 + 4.0) * ee * kk
                        + (4.0 * k2 * k2 - k2 + 4.0) * ee * ee),
            ),
            _ => None,
        }
    }

    /// `(⟨a_r a_s⟩, ⟨a_r† a_s⟩)` for `r < s`.
    fn cross(&self, r: i64, s: i64) -> (f64, f64) {
        let ClosedForms { k, k2, kt2, kk, ee } = *self;
        let pi2 = PI * PI;
        let k4 = k2 * k2;
        match (r, s) {
            (1, 3) => {
                let c = 2.0 * 3f64.sqrt();
                (
                    -c / (3.0 * pi2 * k2) * (kt2 * kk * kk - 2.0 * ee * kk + (1.0 + k2) * ee * ee),
                    c / (pi2 * k) * (kt2 / 3.0 * kk * kk + 2.0 / 3.0 * (k2 - 2.0) * ee * kk + ee * ee),
                )
            }
            (1, 5) => {
                let c = 2.0 * 5f64.sqrt();
                (
                    c / (45.0 * pi2 * k2 * k)
                        * (kt2 * (k2 + 8.0) * kk * kk - 2.0 * (k4 + 8.0) * ee * kk
                            + (8.0 * k4 + 7.0 * k2 + 8.0) * ee * ee),
                    -c / (3.0 * pi2 * k2)
                        * (kt2 / 5.0 * (2.0 * k2 + 1.0) * kk * kk
                            + 2.0 / 5.0 * (2.0 * k4 - 2.0 * k2 - 3.0) * ee * kk
                            + (k2 + 1.0) * ee * ee),
                )
            }
            (3, 5) => {
                let c = 2.0 * 15f64.sqrt();
                (
                    c / (45.0 * pi2 * k4)
                        * (kt2 * (k2 + 2.0) * (k2 - 2.0) * kk * kk
                            + 2.0 * (2.0 * k4 * k2 - k4 - 2.0 * k2 + 4.0) * ee * kk
                            - 4.0 * (k2 + 1.0) * (k4 - k2 + 1.0) * ee * ee),
                    c / (45.0 * pi2 * k2 * k)
                        * (kt2 * (7.0 * k2 - 4.0) * kk * kk + 2.0 * (8.0 * k4 - 15.0 * k2 + 4.0) * ee * kk
                            - (4.0 * k4 - 19.0 * k2 + 4.0) * ee * ee),
                )
            }
            _ => unreachable!(),
        }
    }
}

/// Closed-form `p = 2` moments for
/// `(r, s) ∈ {(1,1), (3,3), (5,5), (1,3), (1,5), (3,5)}` (either order).
///
/// At `τ = 0` the vacuum values are returned directly; the forms are `0/0`
/// there.
pub fn p2_moments_closed(r: i64, s: i64, tau: f64) -> Result<ClosedPairMoments> {
    check_tau("p2_moments_closed", tau)?;
    let supported =
        |a: i64, b: i64| matches!((a.min(b), a.max(b)), (1, 1) | (3, 3) | (5, 5) | (1, 3) | (1, 5) | (3, 5));
    if !supported(r, s) {
        return Err(Error::UnsupportedPair(r, s));
    }
    if tau == 0.0 {
        let sq = |m: i64| (m != 5).then_some(0.0);
        return Ok(ClosedPairMoments {
            r,
            s,
            a_rs: if r == s { sq(r) } else { Some(0.0) },
            adag_r_a_s: 0.0,
            e_r: 0.5,
            e_s: 0.5,
            a_rr: sq(r),
            a_ss: sq(s),
        });
    }
    let cf = ClosedForms::new(tau)?;
    let (e_r, e_s) = (cf.energy(r), cf.energy(s));
    let (a_rs, adag_r_a_s) = if r == s {
        (cf.square(r), e_r - 0.5)
    } else {
        let (a, n) = cf.cross(r.min(s), r.max(s));
        (Some(a), n)
    };
    Ok(ClosedPairMoments { r, s, a_rs, adag_r_a_s, e_r, e_s, a_rr: cf.square(r), a_ss: cf.square(s) })
}

/// `⟨a_r a_s⟩` and `⟨a_r† a_s⟩` summed over the upper indices of `table`,
/// `−√(rs) Σ_n ρ_r^{(n)} ρ_{−s}^{(n)}/n` and `√(rs) Σ_n ρ_{−r}^{(n)} ρ_{−s}^{(n)}/n`.
///
/// A truncated diagnostic for the finite ODEs of [`p2_moments_ode`].
pub fn p2_moments_series(table: &BogoliubovTable, r: i64, s: i64) -> Result<(f64, f64)> {
    check_mode("p2_moments_series", r)?;
    check_mode("p2_moments_series", s)?;
    let (m_max, n_max) = table.window();
    if r.max(s) as usize > m_max {
        return Err(Error::domain("p2_moments_series", "mode index outside the table"));
    }
    let rs = ((r * s) as f64).sqrt();
    let (mut a, mut n_sum) = (0.0, 0.0);
    for n in 1..=n_max as i64 {
        let w = 1.0 / n as f64;
        a += w * table.get(r, n) * table.get(-s, n);
        n_sum += w * table.get(-r, n) * table.get(-s, n);
    }
    Ok((-rs * a, rs * n_sum))
}

/// `L̃ = 1 − √((1 − r_x²)(1 − r_p²))` from the position and momentum
/// correlation coefficients of a state without x–p covariances.
pub fn purity_from_correlations(r_x: f64, r_p: f64) -> f64 {
    1.0 - ((1.0 - r_x * r_x) * (1.0 - r_p * r_p)).sqrt()
}

/// `Z` from the position and momentum correlation coefficients.
pub fn distance_from_correlations(r_x: f64, r_p: f64) -> f64 {
    let q = (1.0 - r_x * r_x) * (1.0 - r_p * r_p);
    let quarter = (1.0 - 0.25 * r_x * r_x) * (1.0 - 0.25 * r_p * r_p);
    1.0 + q.sqrt() - 2.0 * (q / quarter).sqrt()
}

/// Split of a covariance without x–p covariances into its position and
/// momentum blocks, `([σ_x1x1, σ_x1x2, σ_x2x2], [σ_p1p1, σ_p1p2, σ_p2p2])`.
fn position_momentum_blocks(cov: &TwoModeCovariance, op: &'static str) -> Result<([f64; 3], [f64; 3])> {
    let q = cov.matrix();
    let scale = q.diagonal().max();
    for (i, j) in [(0, 1), (0, 3), (1, 2), (2, 3)] {
        if q[(i, j)].abs() > 1e-12 * scale {
            return Err(Error::domain(op, format!("x–p covariance Q[{i},{j}] = {:e}", q[(i, j)])));
        }
    }
    Ok(([q[(0, 0)], q[(0, 2)], q[(2, 2)]], [q[(1, 1)], q[(1, 3)], q[(3, 3)]]))
}

/// Correlation coefficients `(r_x, r_p)` of a covariance without x–p
/// covariances.
pub fn correlation_coefficients(cov: &TwoModeCovariance) -> Result<(f64, f64)> {
    let (x, p) = position_momentum_blocks(cov, "correlation_coefficients")?;
    Ok((x[1] / (x[0] * x[2]).sqrt(), p[1] / (p[0] * p[2]).sqrt()))
}

/// Local symplectic values `f_k = √(σ_pkpk σ_xkxk)` and the pair values
/// `(f⁺, f⁻)` of a covariance without x–p covariances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSymplecticValues {
    pub f_r: f64,
    pub f_s: f64,
    pub f_plus: f64,
    pub f_minus: f64,
}

/// `2f^± = √(X + 2√D) ± √(X − 2√D)` with
/// `X = σ_p1p1σ_x1x1 + σ_p2p2σ_x2x2 + 2σ_p1p2σ_x1x2` and
/// `D = det Σ_x det Σ_p`.
///
/// `X − 2√D` is evaluated as `(X² − 4D)/(X + 2√D)`, with `X² − 4D` written
/// through the entries of `M = Σ_x Σ_p` so that it never cancels.
pub fn pair_symplectic_values(cov: &TwoModeCovariance) -> Result<PairSymplecticValues> {
    let (x, p) = position_momentum_blocks(cov, "pair_symplectic_values")?;
    let m11 = x[0] * p[0] + x[1] * p[1];
    let m12 = x[0] * p[1] + x[1] * p[2];
    let m21 = x[1] * p[0] + x[2] * p[1];
    let m22 = x[1] * p[1] + x[2] * p[2];
    let big_x = m11 + m22;
    let det_x = x[0] * x[2] - x[1] * x[1];
    let det_p = p[0] * p[2] - p[1] * p[1];
    let root_d = (det_x * det_p).max(0.0).sqrt();
    let plus = big_x + 2.0 * root_d;
    let disc = ((m11 - m22).powi(2) + 4.0 * m12 * m21).max(0.0);
    let minus = disc / plus;
    let (sp, sm) = (plus.sqrt(), minus.sqrt());
    Ok(PairSymplecticValues {
        f_r: (p[0] * x[0]).sqrt(),
        f_s: (p[2] * x[2]).sqrt(),
        f_plus: 0.5 * (sp + sm),
        f_minus: 0.5 * (sp - sm),
    })
}

/// Covariance of the pair `(r, s)` for `p = 2` from the vacuum.
pub fn p2_pair_covariance(r: i64, s: i64, tau: f64) -> Result<TwoModeCovariance> {
    gaussian_core::moments_to_covariance(&p2_moments_ode(r, s, tau)?.moments)
}

fn dual_check(op: &'static str, tau: f64, pairs: &[(&str, f64, f64)], tol: f64) -> Result<()> {
    for &(name, a, b) in pairs {
        if !((a - b).abs() <= tol * a.abs().max(1.0)) {
            return Err(Error::SelfCheck { op, detail: format!("{name}: {a:e} vs {b:e} at τ = {tau}") });
        }
    }
    Ok(())
}

/// Entanglement of modes `r ≠ s` for `p = 2` from the vacuum.
///
/// `Y`, `Ỹ` come from the moments; `L̃` and `Z` from the correlation
/// coefficients; `I_c` from the local values `f_k` and the pair values
/// `f^±`. Each is cross-checked against [`measures::measure_set`] on the
/// same covariance to [`DUAL_PATH_TOL`], and `f^±` against
/// [`gaussian_core::symplectic_spectrum`] to [`SPECTRUM_TOL`].
pub fn p2_entanglement(r: i64, s: i64, tau: f64) -> Result<MeasureSet> {
    if r == s {
        return Err(Error::domain("p2_entanglement", "modes r and s must differ"));
    }
    p2_entanglement_from_moments(&p2_moments_ode(r, s, tau)?, tau)
}

/// [`p2_entanglement`] along an ascending grid of `τ`.
pub fn p2_entanglement_path(r: i64, s: i64, taus: &[f64]) -> Result<Vec<MeasureSet>> {
    if r == s {
        return Err(Error::domain("p2_entanglement", "modes r and s must differ"));
    }
    p2_moments_path(r, s, taus)?.iter().zip(taus).map(|(pm, &tau)| p2_entanglement_from_moments(pm, tau)).collect()
}

fn p2_entanglement_from_moments(pm: &PairMoments1D, tau: f64) -> Result<MeasureSet> {
    let op = "p2_entanglement";
    let cov = gaussian_core::moments_to_covariance(&pm.moments)?;
    let (e_r, e_s) = pm.energies();
    let (a, n) = (pm.moments.a_rs.re, pm.moments.adag_r_a_s.re);
    let num = a * a + n * n;
    let y = (num / (2.0 * e_r * e_s)).sqrt();
    let y_tilde = (2.0 * num).sqrt() / (e_r + e_s);
    let (r_x, r_p) = correlation_coefficients(&cov)?;
    let l_tilde = purity_from_correlations(r_x, r_p);
    let z = distance_from_correlations(r_x, r_p);
    let f = pair_symplectic_values(&cov)?;
    let i_c = measures::thermal_entropy(f.f_r) + measures::thermal_entropy(f.f_s)
        - measures::thermal_entropy(f.f_plus)
        - measures::thermal_entropy(f.f_minus);
    let closed =
        MeasureSet { y, y_tilde, l_tilde, k2: l_tilde * (2.0 - l_tilde), z, i_c, j_c: measures::compact_entropy(i_c) };

    let generic = measures::measure_set(&cov)?;
    let spectrum = gaussian_core::symplectic_spectrum(&cov)?;
    dual_check(
        op,
        tau,
        &[
            ("f⁺", f.f_plus, spectrum.kappa1.max(spectrum.kappa2)),
            ("f⁻", f.f_minus, spectrum.kappa1.min(spectrum.kappa2)),
        ],
        SPECTRUM_TOL,
    )?;
    dual_check(
        op,
        tau,
        &[
            ("Y", closed.y, generic.y),
            ("Ỹ", closed.y_tilde, generic.y_tilde),
            ("L̃", closed.l_tilde, generic.l_tilde),
            ("K²", closed.k2, generic.k2),
            ("Z", closed.z, generic.z),
            ("I_c", closed.i_c, generic.i_c),
            ("J_c", closed.j_c, generic.j_c),
        ],
        DUAL_PATH_TOL,
    )?;
    Ok(closed)
}

// ---------------------------------------------------------------------------
// Semi-resonance, p = 1
// ---------------------------------------------------------------------------

/// `ρ_m^{(1)} = (tanh τ)^{m−1}/cosh²τ` for `p = 1`; zero for `m ≤ 0`.
pub fn p1_rho(m: i64, tau: f64) -> f64 {
    if m <= 0 {
        return 0.0;
    }
    let sech = 1.0 / tau.cosh();
    tau.tanh().powi((m - 1) as i32) * sech * sech
}

/// `ζ_m = √m ρ_m^{(1)}`.
pub fn p1_zeta(m: i64, tau: f64) -> Result<f64> {
    check_mode("p1_zeta", m)?;
    check_tau("p1_zeta", tau)?;
    Ok((m as f64).sqrt() * p1_rho(m, tau))
}

/// State of the first mode at `τ = 0`; all other modes start in vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    Coherent {
        alpha: Complex64,
    },
    Fock {
        n: u32,
    },
    Thermal {
        n_bar: f64,
    },
    /// `exp[R(b†² − b²)/2]|0⟩`, mean photon number `sinh²R`.
    SqueezedVacuum {
        r: f64,
    },
    EvenCoherent {
        alpha: Complex64,
    },
    OddCoherent {
        alpha: Complex64,
    },
}

impl InitialState {
    /// Squeezed vacuum with mean photon number `nu`.
    pub fn squeezed_with_photons(nu: f64) -> Self {
        InitialState::SqueezedVacuum { r: nu.sqrt().asinh() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            InitialState::Coherent { alpha }
            | InitialState::EvenCoherent { alpha }
            | InitialState::OddCoherent { alpha } => alpha.norm().is_finite(),
            InitialState::Fock { .. } => true,
            InitialState::Thermal { n_bar } => n_bar >= 0.0 && n_bar.is_finite(),
            InitialState::SqueezedVacuum { r } => r.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain("InitialState", format!("{self:?}")))
        }
    }

    /// Whether the state is Gaussian.
    pub fn is_gaussian(&self) -> bool {
        matches!(
            self,
            InitialState::Coherent { .. } | InitialState::Thermal { .. } | InitialState::SqueezedVacuum { .. }
        )
    }

    /// `⟨b†b⟩`.
    pub fn mean_photons(&self) -> f64 {
        match *self {
            InitialState::Coherent { alpha } => alpha.norm_sqr(),
            InitialState::Fock { n } => n as f64,
            InitialState::Thermal { n_bar } => n_bar,
            InitialState::SqueezedVacuum { r } => r.sinh().powi(2),
            InitialState::EvenCoherent { alpha } => {
                let x = alpha.norm_sqr();
                x * x.tanh()
            }
            InitialState::OddCoherent { alpha } => {
                let x = alpha.norm_sqr();
                if x == 0.0 {
                    1.0
                } else {
                    x / x.tanh()
                }
            }
        }
    }

    /// `⟨b²⟩`.
    pub fn squared_amplitude(&self) -> Complex64 {
        match *self {
            InitialState::Coherent { alpha }
            | InitialState::EvenCoherent { alpha }
            | InitialState::OddCoherent { alpha } => alpha * alpha,
            InitialState::SqueezedVacuum { r } => Complex64::new(r.sinh() * r.cosh(), 0.0),
            InitialState::Fock { .. } | InitialState::Thermal { .. } => Complex64::new(0.0, 0.0),
        }
    }

    /// `⟨b⟩`.
    pub fn amplitude(&self) -> Complex64 {
        match *self {
            InitialState::Coherent { alpha } => alpha,
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Central moments `(⟨b†b⟩ − |⟨b⟩|², ⟨b²⟩ − ⟨b⟩²)`.
    fn central(&self) -> (f64, Complex64) {
        let beta = self.amplitude();
        (self.mean_photons() - beta.norm_sqr(), self.squared_amplitude() - beta * beta)
    }
}

/// Central second moments of modes `(r, s)` for `p = 1`:
/// `⟨a_r† a_s⟩ = ζ_r ζ_s N`, `⟨a_r a_s⟩ = ζ_r ζ_s M` with the central
/// moments `N`, `M` of the initial first mode.
pub fn p1_pair_moments(state: &InitialState, r: i64, s: i64, tau: f64) -> Result<PairMoments1D> {
    state.validate()?;
    let (zr, zs) = (p1_zeta(r, tau)?, p1_zeta(s, tau)?);
    let (n, m) = state.central();
    Ok(PairMoments1D {
        r,
        s,
        moments: SecondMoments {
            a_rs: m * (zr * zs),
            adag_r_a_s: Complex64::new(n * zr * zs, 0.0),
            n_r: n * zr * zr,
            n_s: n * zs * zs,
            a_rr: m * (zr * zr),
            a_ss: m * (zs * zs),
        },
    })
}

/// Measures of modes `(r, s)` for `p = 1`.
///
/// For non-Gaussian initial states only `Y` and `Ỹ` are exact; `L̃`, `K²`,
/// `Z`, `I_c` and `J_c` belong to the Gaussian state with the same
/// covariance and `gaussian_equivalent` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P1Entanglement {
    pub measures: MeasureSet,
    pub gaussian_equivalent: bool,
}

/// `Y_{r,s}` from the central moments,
/// `ζ_rζ_s √(|M|² + N²)/√(2(Nζ_r² + ½)(Nζ_s² + ½))`.
pub fn p1_covariance_coefficient(state: &InitialState, r: i64, s: i64, tau: f64) -> Result<f64> {
    state.validate()?;
    let (zr, zs) = (p1_zeta(r, tau)?, p1_zeta(s, tau)?);
    let (n, m) = state.central();
    Ok(zr * zs * (m.norm_sqr() + n * n).sqrt() / (2.0 * (n * zr * zr + 0.5) * (n * zs * zs + 0.5)).sqrt())
}

/// The printed single-formula expressions for `Y_{r,s}`:
/// `nζ_rζ_s/√(2(nζ_r² + ½)(nζ_s² + ½))` for Fock states,
/// `ζ_rζ_s√(ν(2ν + 1))/…` for squeezed vacuum and
/// `ζ_rζ_s√(ν(ν + |α|²))/…` for even and odd coherent states, and zero for
/// coherent states. `None` for thermal states.
pub fn p1_printed_covariance_coefficient(state: &InitialState, r: i64, s: i64, tau: f64) -> Result<Option<f64>> {
    state.validate()?;
    let (zr, zs) = (p1_zeta(r, tau)?, p1_zeta(s, tau)?);
    let nu = state.mean_photons();
    let den = (2.0 * (nu * zr * zr + 0.5) * (nu * zs * zs + 0.5)).sqrt();
    Ok(match *state {
        InitialState::Coherent { .. } => Some(0.0),
        InitialState::Fock { n } => Some(n as f64 * zr * zs / den),
        InitialState::SqueezedVacuum { .. } => Some(zr * zs * (nu * (2.0 * nu + 1.0)).sqrt() / den),
        InitialState::EvenCoherent { alpha } | InitialState::OddCoherent { alpha } => {
            Some(zr * zs * (nu * (nu + alpha.norm_sqr())).sqrt() / den)
        }
        InitialState::Thermal { .. } => None,
    })
}

/// Correlation coefficients `(r_x, r_p)` of modes `(i, j)` for a squeezed
/// vacuum start,
/// `r_x = χζ_iζ_j/√((1 + χζ_i²)(1 + χζ_j²))`,
/// `r_p = −λζ_iζ_j/√((1 − λζ_i²)(1 − λζ_j²))`,
/// with `χ = e^{2R} − 1`, `λ = 1 − e^{−2R}`.
pub fn p1_squeezed_correlations(r_squeeze: f64, i: i64, j: i64, tau: f64) -> Result<(f64, f64)> {
    let (zi, zj) = (p1_zeta(i, tau)?, p1_zeta(j, tau)?);
    let chi = (2.0 * r_squeeze).exp_m1();
    let lambda = -(-2.0 * r_squeeze).exp_m1();
    let r_x = chi * zi * zj / ((1.0 + chi * zi * zi) * (1.0 + chi * zj * zj)).sqrt();
    let r_p = -lambda * zi * zj / ((1.0 - lambda * zi * zi) * (1.0 - lambda * zj * zj)).sqrt();
    Ok((r_x, r_p))
}

/// Entanglement of modes `r ≠ s` for `p = 1`.
///
/// `Y` is checked against the central-moment formula for every state and
/// against the printed formula for Fock and squeezed states; for squeezed
/// states `L̃` and `Z` are also checked against the correlation-coefficient
/// forms. Even and odd coherent states use the central-moment value of `Y`,
/// see [`p1_printed_covariance_coefficient`].
pub fn p1_entanglement(state: &InitialState, r: i64, s: i64, tau: f64) -> Result<P1Entanglement> {
    let op = "p1_entanglement";
    if r == s {
        return Err(Error::domain(op, "modes r and s must differ"));
    }
    let pm = p1_pair_moments(state, r, s, tau)?;
    let cov = gaussian_core::moments_to_covariance(&pm.moments)?;
    let generic = measures::measure_set(&cov)?;
    let y = p1_covariance_coefficient(state, r, s, tau)?;
    dual_check(op, tau, &[("Y", y, generic.y)], DUAL_PATH_TOL)?;
    match state {
        InitialState::Fock { .. } | InitialState::SqueezedVacuum { .. } | InitialState::Coherent { .. } => {
            let printed = p1_printed_covariance_coefficient(state, r, s, tau)?.unwrap_or(y);
            dual_check(op, tau, &[("printed Y", printed, y)], 1e-10)?;
        }
        _ => {}
    }
    if let InitialState::SqueezedVacuum { r: big_r } = *state {
        let (r_x, r_p) = p1_squeezed_correlations(big_r, r, s, tau)?;
        dual_check(
            op,
            tau,
            &[
                ("L̃", purity_from_correlations(r_x, r_p), generic.l_tilde),
                ("Z", distance_from_correlations(r_x, r_p), generic.z),
            ],
            DUAL_PATH_TOL,
        )?;
    }
    Ok(P1Entanglement { measures: MeasureSet { y, ..generic }, gaussian_equivalent: !state.is_gaussian() })
}

/// `⟨a_m† a_m⟩ = ζ_m² ⟨b†b⟩` for `p = 1`.
pub fn p1_mean_photons(state: &InitialState, m: i64, tau: f64) -> Result<f64> {
    state.validate()?;
    let z = p1_zeta(m, tau)?;
    Ok(z * z * state.mean_photons())
}

/// Largest number of modes [`p1_total_photons`] will sum.
pub const P1_MAX_MODES: i64 = 50_000_000;

/// `Σ_m ζ_m²` over an adaptive window, stopped once a geometric bound on
/// the remaining tail falls below `1e−16`.
pub fn p1_zeta_square_sum(tau: f64) -> Result<f64> {
    check_tau("p1_zeta_square_sum", tau)?;
    let t2 = tau.tanh().powi(2);
    let sech2 = 1.0 / tau.cosh().powi(2);
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    // ζ_m² = m t^{2(m−1)} sech⁴τ
    let mut power = sech2 * sech2;
    for m in 1..=P1_MAX_MODES {
        let term = m as f64 * power;
        let y = term - comp;
        let next = sum + y;
        comp = (next - sum) - y;
        sum = next;
        let ratio = (m + 1) as f64 / m as f64 * t2;
        if ratio < 1.0 {
            let tail = term * ratio / (1.0 - ratio);
            if tail < 1e-16 {
                return Ok(sum);
            }
        }
        power *= t2;
    }
    Err(Error::no_convergence(
        "p1_zeta_square_sum",
        format!("tail above 1e-16 after {P1_MAX_MODES} modes at τ = {tau}"),
    ))
}

/// `Σ_m ⟨a_m† a_m⟩`, equal to `⟨b†b⟩` by photon-number conservation.
pub fn p1_total_photons(state: &InitialState, tau: f64) -> Result<f64> {
    state.validate()?;
    Ok(p1_zeta_square_sum(tau)? * state.mean_photons())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ke_at(kappa: f64) -> (f64, f64, f64) {
        let kt = ((1.0 - kappa) * (1.0 + kappa)).sqrt();
        let ke = specfun::elliptic_ke(kt).unwrap();
        (ke.k_big, ke.e_big, kt)
    }

    fn tau_at(kappa: f64, p: u32) -> f64 {
        kappa.atanh() / p as f64
    }

    #[test]
    fn closed_form_at_zero_is_identity() {
        for p in 1..=3u32 {
            for lower in -6i64..=6 {
                for upper in 1i64..=6 {
                    let v = rho(lower, upper, p, 0.0).unwrap();
                    assert_eq!(v, if lower == upper { 1.0 } else { 0.0 }, "p={p} ({lower},{upper})");
                }
            }
        }
    }

    #[test]
    fn closed_form_lowest_coefficient_is_elliptic_e() {
        let tau = tau_at(0.5, 2);
        let (_, e, _) = ke_at(0.5);
        let v = rho_closed_form(1, 0, 0, 2, tau).unwrap();
        assert!((v - 2.0 / PI * e).abs() < 1e-13, "{v}");
    }

    #[test]
    fn closed_form_large_time_limit() {
        for m in 0..=4i64 {
            let expect = 2.0 * if m % 2 == 0 { 1.0 } else { -1.0 } / (PI * (2 * m + 1) as f64);
            let v = rho(2 * m + 1, 1, 2, 8.0).unwrap();
            assert!((v - expect).abs() < 1e-3, "m={m}: {v} vs {expect}");
            let v = rho(-2 * m - 1, 1, 2, 8.0).unwrap();
            assert!((v - expect).abs() < 1e-3, "m={m}: {v} vs {expect}");
        }
    }

    #[test]
    fn closed_form_selection_rule() {
        for (lower, upper) in [(2, 1), (-2, 3), (4, 5), (1, 2)] {
            assert_eq!(rho(lower, upper, 2, 0.7).unwrap(), 0.0);
        }
        for (lower, upper) in [(2, 1), (4, 3), (3, 2)] {
            assert_eq!(rho(lower, upper, 3, 0.7).unwrap(), 0.0, "({lower},{upper})");
        }
    }

    #[test]
    fn semi_resonance_negative_lower_indices_vanish() {
        for lower in -8i64..=0 {
            for upper in 1..=5 {
                assert_eq!(rho(lower, upper, 1, 0.9).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn semi_resonance_closed_form_matches_geometric_coefficient() {
        for m in 1..=12 {
            for tau in [0.1, 0.8, 2.5] {
                let a = rho(m, 1, 1, tau).unwrap();
                let b = p1_rho(m, tau);
                assert!((a - b).abs() < 1e-13, "m={m} τ={tau}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn elliptic_examples() {
        let kappa = 0.6;
        let tau = tau_at(kappa, 2);
        let (kk, e, kt) = ke_at(kappa);
        let m1 = rho_elliptic(-1, tau).unwrap();
        assert!((m1 - 2.0 / (PI * kappa) * (e - kt * kt * kk)).abs() < 1e-13);
        let p3 = rho_elliptic(3, tau).unwrap();
        let expect = 2.0 / (3.0 * PI * kappa) * ((1.0 - 2.0 * kappa * kappa) * e - kt * kt * kk);
        assert!((p3 - expect).abs() < 1e-13);
    }

    #[test]
    fn elliptic_rejects_even_index() {
        assert!(matches!(rho_elliptic(2, 0.3), Err(Error::Domain { .. })));
    }

    #[test]
    fn elliptic_agrees_with_closed_form() {
        for lower in [-9i64, -7, -5, -3, -1, 1, 3, 5, 7, 9] {
            for kappa in [0.01, 0.05, 0.099, 0.1, 0.3, 0.6, 0.9, 0.99, 0.999999] {
                let tau = tau_at(kappa, 2);
                let a = rho_elliptic(lower, tau).unwrap();
                let b = rho(lower, 1, 2, tau).unwrap();
                assert!((a - b).abs() < 1e-10, "lower={lower} κ={kappa}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn elliptic_survives_unit_modulus() {
        let v = rho_elliptic(1, 40.0).unwrap();
        assert!((v - 2.0 / PI).abs() < 1e-12);
        let v = rho_elliptic(-7, 40.0).unwrap();
        assert!((v + 2.0 / (7.0 * PI)).abs() < 1e-12, "{v}");
    }

    #[test]
    fn ode_table_at_zero_is_identity() {
        let t = rho_ode_table(2, 0.0, (10, 10), 1e-3).unwrap();
        for m in -10i64..=10 {
            for n in 1..=10 {
                assert_eq!(t.get(m, n), if m == n { 1.0 } else { 0.0 });
            }
        }
        let r = unitarity_residuals(&t);
        assert_eq!((r.r81, r.r82, r.r83), (0.0, 0.0, 0.0));
    }

    #[test]
    fn ode_table_matches_closed_form() {
        for p in [1u32, 2, 3] {
            let t = rho_ode_table(p, 1.0 / p as f64, (12, 12), 1e-3).unwrap();
            let mut worst = 0.0f64;
            for m in -12i64..=12 {
                for n in 1..=12 {
                    if m != 0 {
                        let c = rho(m, n, p, 1.0 / p as f64).unwrap();
                        worst = worst.max((t.get(m, n) - c).abs());
                    }
                }
            }
            assert!(worst < 1e-7, "p={p}: {worst}");
        }
    }

    #[test]
    fn ode_table_rejects_coarse_step() {
        assert!(matches!(rho_ode_table(2, 1.0, (5, 5), 2e-3), Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn ode_table_reports_non_convergence() {
        assert!(matches!(rho_ode_table(1, 12.0, (4, 4), 1e-3), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn upper_recurrences_hold() {
        for p in [1u32, 2, 3] {
            let r = upper_recurrence_residual(p, 0.5, (8, 8), 1e-3).unwrap();
            assert!(r < 1e-5, "p={p}: {r}");
        }
    }

    #[test]
    fn unitarity_on_square_truncation() {
        let t = rho_ode_truncated(2, 0.5, 60, 1e-4).unwrap();
        let r = unitarity_residuals(&t);
        assert!(r.max() < 1e-6, "{r:?}");
    }

    #[test]
    fn unitarity_fails_on_tiny_window() {
        let t = rho_ode_truncated(2, 2.0, 160, 1e-3).unwrap();
        let r = unitarity_residuals(&t.restrict((5, 5)).unwrap());
        assert!(r.max() > 1e-3, "{r:?}");
    }

    #[test]
    fn unitarity_on_certified_window() {
        let t = rho_ode_table(2, 0.5, (10, 10), 1e-3).unwrap();
        let r = unitarity_residuals(&t);
        assert!(r.max() < 1e-8, "{r:?}");
    }

    #[test]
    fn dump_round_trips() {
        let t = rho_ode_truncated(2, 0.3, 8, 1e-3).unwrap();
        let text = t.dump();
        assert!(text.starts_with("2 3e-1 8 8\n"));
        let back = BogoliubovTable::from_dump(&text).unwrap();
        assert_eq!(back.window(), (8, 8));
        assert!(back.max_abs_diff(&t, (8, 8)) == 0.0);
    }

    #[test]
    fn p2_ode_vanishes_at_zero() {
        let m = p2_moments_ode(1, 3, 0.0).unwrap().moments;
        assert_eq!((m.a_rs.re, m.adag_r_a_s.re, m.n_r, m.n_s), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn p2_ode_rejects_even_modes() {
        assert!(matches!(p2_moments_ode(2, 3, 0.5), Err(Error::Domain { .. })));
    }

    #[test]
    fn p2_ode_examples() {
        let kappa = 0.5;
        let tau = tau_at(kappa, 2);
        let (kk, e, kt) = ke_at(kappa);
        let m11 = p2_moments_ode(1, 1, tau).unwrap();
        let e1 = 2.0 / (PI * PI) * kk * (2.0 * e - kt * kt * kk);
        assert!((m11.energies().0 - e1).abs() < 1e-8);
        let m13 = p2_moments_ode(1, 3, tau).unwrap();
        let a13 = -2.0 * 3f64.sqrt() / (3.0 * PI * PI * kappa * kappa)
            * (kt * kt * kk * kk - 2.0 * e * kk + (1.0 + kappa * kappa) * e * e);
        assert!((m13.moments.a_rs.re - a13).abs() < 1e-8);
    }

    #[test]
    fn p2_closed_vacuum_limit() {
        let c = p2_moments_closed(3, 5, 0.0).unwrap();
        assert_eq!((c.e_r, c.e_s, c.a_rs, c.adag_r_a_s), (0.5, 0.5, Some(0.0), 0.0));
        for (r, s) in [(1, 3), (1, 5), (3, 5)] {
            let c = p2_moments_closed(r, s, tau_at(0.02, 2)).unwrap();
            assert!((c.e_r - 0.5).abs() < 1e-3 && (c.e_s - 0.5).abs() < 1e-3);
            assert!(c.adag_r_a_s.abs() < 1e-2 && c.a_rs.unwrap().abs() < 1e-2, "{c:?}");
        }
    }

    #[test]
    fn p2_closed_rejects_other_pairs() {
        assert_eq!(p2_moments_closed(1, 7, 0.3), Err(Error::UnsupportedPair(1, 7)));
    }

    #[test]
    fn p2_closed_matches_ode() {
        let kappa = 0.6;
        let tau = tau_at(kappa, 2);
        for (r, s) in [(1, 1), (3, 3), (5, 5), (1, 3), (1, 5), (3, 5)] {
            let c = p2_moments_closed(r, s, tau).unwrap();
            let o = p2_moments_ode(r, s, tau).unwrap();
            let (er, es) = o.energies();
            assert!((c.e_r - er).abs() < 1e-8 && (c.e_s - es).abs() < 1e-8, "({r},{s})");
            assert!((c.adag_r_a_s - o.moments.adag_r_a_s.re).abs() < 1e-8, "({r},{s})");
            if let Some(a) = c.a_rs {
                assert!((a - o.moments.a_rs.re).abs() < 1e-8, "({r},{s})");
            }
        }
    }

    #[test]
    fn p2_energy_of_fifth_mode_is_positive() {
        for kappa in [0.1, 0.4, 0.8, 0.99] {
            let c = p2_moments_closed(5, 5, tau_at(kappa, 2)).unwrap();
            assert!(c.e_r > 0.5, "κ={kappa}: {}", c.e_r);
        }
    }

    #[test]
    fn p2_large_time_growth_rate() {
        for (r, s) in [(1, 3), (1, 5), (3, 5)] {
            let (a, b) = (p2_moments_ode(r, s, 6.0).unwrap(), p2_moments_ode(r, s, 10.0).unwrap());
            let slope = (b.moments.adag_r_a_s.re - a.moments.adag_r_a_s.re) / 4.0;
            let sign = if ((r - s) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            let expect = 8.0 / (PI * PI * ((r * s) as f64).sqrt()) * sign;
            assert!(((slope - expect) / expect).abs() < 0.05, "({r},{s}): {slope} vs {expect}");
            let slope_a = (b.moments.a_rs.re - a.moments.a_rs.re) / 4.0;
            assert!(((slope_a + expect) / expect).abs() < 0.05, "({r},{s}): {slope_a}");
        }
    }

    #[test]
    fn series_moments_agree_with_ode() {
        let tau = 0.4;
        let t = rho_ode_table(2, tau, (8, 40), 1e-3).unwrap();
        for (r, s) in [(1, 1), (1, 3), (3, 5)] {
            let (a, n) = p2_moments_series(&t, r, s).unwrap();
            let o = p2_moments_ode(r, s, tau).unwrap().moments;
            assert!((a - o.a_rs.re).abs() < 1e-6, "({r},{s}) a: {a} vs {}", o.a_rs.re);
            assert!((n - o.adag_r_a_s.re).abs() < 1e-6, "({r},{s}) n: {n} vs {}", o.adag_r_a_s.re);
        }
    }

    #[test]
    fn p2_entanglement_vanishes_at_zero() {
        let m = p2_entanglement(1, 3, 0.0).unwrap();
        assert!(m.values().iter().all(|v| v.abs() < 1e-14), "{m:?}");
    }

    #[test]
    fn p2_path_matches_pointwise_integration() {
        let taus = [0.0, 0.05, 0.3, 0.3, 0.71, 1.2];
        let path = p2_entanglement_path(3, 5, &taus).unwrap();
        for (m, &tau) in path.iter().zip(&taus) {
            let direct = p2_entanglement(3, 5, tau).unwrap();
            assert!(m.max_abs_diff(&direct) < 1e-10, "tau = {tau}");
        }
        assert!(p2_moments_path(1, 3, &[0.5, 0.2]).is_err());
    }

    #[test]
    fn p2_covariance_has_no_position_momentum_terms() {
        let cov = p2_pair_covariance(1, 5, 0.7).unwrap();
        let q = cov.matrix();
        for (i, j) in [(0, 1), (0, 3), (1, 2), (2, 3)] {
            assert_eq!(q[(i, j)], 0.0);
        }
    }

    #[test]
    fn p2_covariance_coefficient_is_monotone_and_ordered() {
        let mut last = (0.0, 0.0);
        for i in 1..=20 {
            let kappa = 0.99 * i as f64 / 20.0;
            let tau = tau_at(kappa, 2);
            let y13 = p2_entanglement(1, 3, tau).unwrap().y;
            let y35 = p2_entanglement(3, 5, tau).unwrap().y;
            assert!(y13 >= last.0 && y35 >= last.1, "κ={kappa}");
            assert!(y13 > y35, "κ={kappa}: {y13} vs {y35}");
            last = (y13, y35);
        }
        assert!(last.0 > 0.45, "{last:?}");
        let late = p2_entanglement(1, 3, 40.0).unwrap().y;
        assert!(late > 0.9 && late < 1.0, "{late}");
    }

    #[test]
    fn pair_symplectic_values_match_generic_spectrum() {
        let cov = p2_pair_covariance(1, 3, tau_at(0.5, 2)).unwrap();
        let f = pair_symplectic_values(&cov).unwrap();
        let sp = gaussian_core::symplectic_spectrum(&cov).unwrap();
        assert!((f.f_plus - sp.kappa1.max(sp.kappa2)).abs() < 1e-10);
        assert!((f.f_minus - sp.kappa1.min(sp.kappa2)).abs() < 1e-10);
    }

    #[test]
    fn local_values_reproduce_reduced_entropy() {
        let cov = p2_pair_covariance(3, 5, 0.8).unwrap();
        let f = pair_symplectic_values(&cov).unwrap();
        let s1 = measures::reduced_entropy(&cov, 1).unwrap();
        assert!((measures::thermal_entropy(f.f_r) - s1).abs() < 1e-12);
    }

    #[test]
    fn zeta_initial_values_and_bound() {
        assert_eq!(p1_zeta(1, 0.0).unwrap(), 1.0);
        for m in 2..6 {
            assert_eq!(p1_zeta(m, 0.0).unwrap(), 0.0);
        }
        for m in 1..200 {
            for tau in [0.1, 0.5, 1.0, 3.0, 10.0] {
                assert!(p1_zeta(m, tau).unwrap() <= 1.0);
            }
        }
    }

    #[test]
    fn zeta_squares_sum_to_one() {
        for tau in [0.0, 0.3, 1.0, 3.0, 6.0] {
            let s = p1_zeta_square_sum(tau).unwrap();
            assert!((s - 1.0).abs() < 1e-10, "τ={tau}: {s}");
        }
    }

    #[test]
    fn coherent_start_is_unentangled() {
        let st = InitialState::Coherent { alpha: Complex64::new(1.3, -0.4) };
        let e = p1_entanglement(&st, 1, 2, 0.7).unwrap();
        assert!(e.measures.values().iter().all(|v| v.abs() < 1e-12), "{e:?}");
        assert!(!e.gaussian_equivalent);
    }

    #[test]
    fn fock_coefficient_bounded() {
        let mut best = 0.0f64;
        for n in [1u32, 50, 1000, 1_000_000] {
            for i in 0..=600 {
                let tau = i as f64 * 0.01;
                let e = p1_entanglement(&InitialState::Fock { n }, 1, 2, tau).unwrap();
                assert!(e.measures.y <= std::f64::consts::FRAC_1_SQRT_2 + 1e-10);
                assert!(e.gaussian_equivalent);
                best = best.max(e.measures.y);
            }
        }
        assert!(best > 0.7);
    }

    #[test]
    fn squeezed_rises_then_decays() {
        let st = InitialState::squeezed_with_photons(1000.0);
        let y = |tau: f64| p1_entanglement(&st, 1, 2, tau).unwrap().measures.y;
        assert!(y(0.8) > 0.99);
        assert!(y(12.0) < 0.05);
    }

    #[test]
    fn even_odd_printed_form_differs_from_moments() {
        let alpha = Complex64::new(1.5, 0.0);
        for st in [InitialState::EvenCoherent { alpha }, InitialState::OddCoherent { alpha }] {
            let derived = p1_covariance_coefficient(&st, 1, 2, 0.5).unwrap();
            let printed = p1_printed_covariance_coefficient(&st, 1, 2, 0.5).unwrap().unwrap();
            let (zr, zs) = (p1_zeta(1, 0.5).unwrap(), p1_zeta(2, 0.5).unwrap());
            let nu = st.mean_photons();
            let x = alpha.norm_sqr();
            let expect =
                zr * zs * (x * x + nu * nu).sqrt() / (2.0 * (nu * zr * zr + 0.5) * (nu * zs * zs + 0.5)).sqrt();
            assert!((derived - expect).abs() < 1e-14);
            assert!((derived - printed).abs() > 1e-3);
        }
    }

    #[test]
    fn photons_migrate_and_are_conserved() {
        let st = InitialState::Fock { n: 1 };
        assert_eq!(p1_mean_photons(&st, 1, 0.0).unwrap(), 1.0);
        assert_eq!(p1_mean_photons(&st, 2, 0.0).unwrap(), 0.0);
        for m in 1..5 {
            assert!(p1_mean_photons(&st, m, 12.0).unwrap() < 1e-8);
        }
        let st = InitialState::Thermal { n_bar: 3.0 };
        assert!((p1_total_photons(&st, 2.0).unwrap() - 3.0).abs() < 1e-8);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn elliptic_dual_pathway(kappa in 0.05f64..0.95, m in 0i64..4, neg in any::<bool>()) {
            let lower = if neg { -(2 * m + 1) } else { 2 * m + 1 };
            let tau = tau_at(kappa, 2);
            let a = rho_elliptic(lower, tau).unwrap();
            let b = rho(lower, 1, 2, tau).unwrap();
            prop_assert!((a - b).abs() < 1e-10);
        }

        #[test]
        fn p1_measures_in_range(nu in 0.0f64..2000.0, tau in 0.0f64..8.0, r in 1i64..5, ds in 1i64..4) {
            let s = r + ds;
            for st in [InitialState::squeezed_with_photons(nu), InitialState::Thermal { n_bar: nu }] {
                let e = p1_entanglement(&st, r, s, tau).unwrap().measures;
                let bounded = [e.y, e.y_tilde, e.l_tilde, e.k2, e.z, e.j_c];
                for v in bounded {
                    prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v), "{:?}", e);
                }
                prop_assert!(e.i_c >= -1e-12);
            }
        }

        #[test]
        fn p2_measures_in_range(tau in 0.0f64..3.0, r in 0i64..3, ds in 1i64..3) {
            let (r, s) = (2 * r + 1, 2 * (r + ds) + 1);
            let e = p2_entanglement(r, s, tau).unwrap();
            let bounded = [e.y, e.y_tilde, e.l_tilde, e.k2, e.z, e.j_c];
            for v in bounded {
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v), "{:?}", e);
            }
            prop_assert!(e.i_c >= -1e-12);
        }
    }
}
