//! Special functions: log-gamma, digamma, the Gauss hypergeometric
//! function ₂F₁ on `[0, 1]`, and complete elliptic integrals.
//!
//! The hypergeometric routines are built around the regularized function
//! `F(a,b;c;z)/Γ(c)`, which stays finite when `c` is a non-positive integer.
//! Callers that know `1 − z` more accurately than `z` (for instance
//! `sech²` next to `tanh²`) pass it separately.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_TOL: f64 = 1e-16;
const SERIES_QUIET_TERMS: usize = 3;
const SERIES_CAP: usize = 100_000;
const SERIES_SWITCH: f64 = 0.75;

/// Complete elliptic integrals of the first and second kind at modulus
/// `kappa`, together with the complementary modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticPair {
    pub k_big: f64,
    pub e_big: f64,
    pub kappa: f64,
    pub kappa_tilde: f64,
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("ln_gamma", format!("x = {x} must be positive")));
    }
    Ok(ln_gamma_pos(x))
}

fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x)Γ(1−x) = π / sin(πx), with sin(πx) > 0 on (0, ½).
        return (PI / (PI * x).sin()).ln() - ln_gamma_pos(1.0 - x);
    }
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + acc.ln()
}

/// `(ln|Γ(x)|, sign Γ(x))` for any real `x` that is not a pole.
///
/// Returns `None` at non-positive integers.
pub fn ln_gamma_signed(x: f64) -> Option<(f64, f64)> {
    if x > 0.0 {
        return Some((ln_gamma_pos(x), 1.0));
    }
    if x == x.floor() {
        return None;
    }
    let s = (PI * x).sin();
    let lg = (PI / s.abs()).ln() - ln_gamma_pos(1.0 - x);
    Some((lg, s.signum()))
}

/// `1/Γ(x)`, exactly zero at the poles of Γ.
pub fn rgamma(x: f64) -> f64 {
    match ln_gamma_signed(x) {
        Some((lg, sign)) => sign * (-lg).exp(),
        None => 0.0,
    }
}

/// Digamma function `ψ(x) = Γ'(x)/Γ(x)` for real `x` away from the poles.
pub fn digamma(x: f64) -> f64 {
    if x <= 0.0 {
        if x == x.floor() {
            return f64::NAN;
        }
        // ψ(1−x) − ψ(x) = π cot(πx)
        return digamma(1.0 - x) - PI / (PI * x).tan();
    }
    let mut acc = 0.0;
    let mut y = x;
    while y < 10.0 {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let r = 1.0 / (y * y);
    let tail = r
        * (1.0 / 12.0
            - r * (1.0 / 120.0
                - r * (1.0 / 252.0 - r * (1.0 / 240.0 - r * (1.0 / 132.0 - r * (691.0 / 32_760.0 - r / 12.0))))));
    acc + y.ln() - 0.5 / y - tail
}

/// Gauss hypergeometric function `₂F₁(a, b; c; z)` for `z ∈ [0, 1]`.
///
/// At `z = 1` the Gauss summation formula is used and `c − a − b > 0` is
/// required.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if c <= 0.0 && c == c.floor() {
        return Err(Error::domain("hyp2f1", format!("c = {c} is a pole")));
    }
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::domain("hyp2f1", format!("z = {z} outside [0, 1]")));
    }
    if z == 1.0 {
        let s = c - a - b;
        if s <= 0.0 {
            return Err(Error::domain("hyp2f1", format!("divergent at z = 1: c - a - b = {s}")));
        }
        return Ok(gamma_ratio(&[c, s], &[c - a, c - b]));
    }
    if z <= SERIES_SWITCH {
        return series(a, b, c, z, "hyp2f1");
    }
    let (lg, sign) = ln_gamma_signed(c).expect("c is not a pole");
    Ok(sign * lg.exp() * hyp2f1_regularized_split(a, b, c, z, 1.0 - z)?)
}

/// Regularized function `₂F₁(a, b; c; z)/Γ(c)` for `z ∈ [0, 1)`.
pub fn hyp2f1_regularized(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    hyp2f1_regularized_split(a, b, c, z, 1.0 - z)
}

/// As [`hyp2f1_regularized`], with `zc = 1 − z` supplied by the caller.
///
/// Near `z = 1` all transformation formulas work with `zc`, so passing an
/// accurately computed complement preserves relative accuracy.
pub fn hyp2f1_regularized_split(a: f64, b: f64, c: f64, z: f64, zc: f64) -> Result<f64> {
    // z may round to 1 when zc is tiny but still positive.
    if !(0.0..=1.0).contains(&z) || !(zc > 0.0) {
        return Err(Error::domain("hyp2f1_regularized", format!("z = {z}, 1 - z = {zc} outside [0, 1)")));
    }
    if z == 0.0 {
        return Ok(rgamma(c));
    }
    if let Some(poly) = polynomial(a, b, c, z)? {
        return Ok(poly);
    }
    if z <= SERIES_SWITCH || is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        // A terminating series with a pole of c is summed through the limit
        // formula, which is exact for every z.
        return regularized_series(a, b, c, z);
    }
    regularized_near_one(a, b, c, z, zc)
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Terminating series when `a` or `b` is a non-positive integer.
fn polynomial(a: f64, b: f64, c: f64, z: f64) -> Result<Option<f64>> {
    let degree = match (is_nonpositive_integer(a), is_nonpositive_integer(b)) {
        (true, true) => (-a).min(-b),
        (true, false) => -a,
        (false, true) => -b,
        (false, false) => return Ok(None),
    };
    if is_nonpositive_integer(c) && -c < degree {
        // The pole of c is reached before the series terminates.
        return Ok(None);
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..degree as usize {
        let n = n as f64;
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        sum += term;
    }
    Ok(Some(sum * rgamma(c)))
}

/// Plain power series, with the stopping rule |term| < 1e−16·|sum| for
/// three consecutive terms.
fn series(a: f64, b: f64, c: f64, z: f64, op: &'static str) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut quiet = 0;
    for n in 0..SERIES_CAP {
        let n = n as f64;
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if term.abs() < SERIES_TOL * sum.abs() {
            quiet += 1;
            if quiet >= SERIES_QUIET_TERMS {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::no_convergence(
        op,
        format!("series for (a, b, c, z) = ({a}, {b}, {c}, {z}) exceeded {SERIES_CAP} terms"),
    ))
}

fn regularized_series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if is_nonpositive_integer(c) {
        // lim F(a,b;c;z)/Γ(c) at c = −k is
        // (a)_{k+1} (b)_{k+1} / (k+1)! · z^{k+1} · F(a+k+1, b+k+1; k+2; z).
        let k = -c;
        let mut pre = 1.0;
        for i in 0..=(k as usize) {
            let i = i as f64;
            pre *= (a + i) * (b + i) / (i + 1.0) * z;
        }
        if pre == 0.0 {
            return Ok(0.0);
        }
        return Ok(pre * series(a + k + 1.0, b + k + 1.0, k + 2.0, z, "hyp2f1_regularized")?);
    }
    Ok(series(a, b, c, z, "hyp2f1_regularized")? * rgamma(c))
}

/// `Π Γ(num) / Π Γ(den)` evaluated in log space; zero if a denominator
/// argument is a pole.
fn gamma_ratio(num: &[f64], den: &[f64]) -> f64 {
    let mut lg = 0.0;
    let mut sign = 1.0;
    for &x in den {
        match ln_gamma_signed(x) {
            Some((l, s)) => {
                lg -= l;
                sign *= s;
            }
            None => return 0.0,
        }
    }
    for &x in num {
        let (l, s) = ln_gamma_signed(x).expect("numerator gamma argument is a pole");
        lg += l;
        sign *= s;
    }
    sign * lg.exp()
}

fn nearest_integer(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() <= 1e-9 * x.abs().max(1.0)).then_some(r as i64)
}

/// Regularized ₂F₁ via the connection formulas around `z = 1`.
fn regularized_near_one(a: f64, b: f64, c: f64, z: f64, zc: f64) -> Result<f64> {
    let s = c - a - b;
    match nearest_integer(s) {
        Some(m) if m < 0 => {
            // Euler: F(a,b;c;z) = (1−z)^{c−a−b} F(c−a, c−b; c; z).
            let inner = regularized_near_one(c - a, c - b, c, z, zc)?;
            Ok(zc.powi(m as i32) * inner)
        }
        Some(m) => regularized_log_case(a, b, m as usize, z, zc),
        None => {
            let first = gamma_ratio(&[s], &[c - a, c - b]);
            let first = if first == 0.0 { 0.0 } else { first * series(a, b, 1.0 - s, zc, "hyp2f1")? };
            let second = gamma_ratio(&[-s], &[a, b]);
            let second =
                if second == 0.0 { 0.0 } else { second * zc.powf(s) * series(c - a, c - b, 1.0 + s, zc, "hyp2f1")? };
            Ok(first + second)
        }
    }
}

/// Logarithmic case `c = a + b + m`, `m = 0, 1, 2, …`, divided by `Γ(c)`.
///
/// F/Γ(c) = Γ(m)/(Γ(a+m)Γ(b+m)) Σ_{n<m} (a)_n (b)_n/(n! (1−m)_n) w^n
///        − (−w)^m/(Γ(a)Γ(b)) Σ_n (a+m)_n (b+m)_n/(n! (n+m)!) w^n
///            · [ln w − ψ(n+1) − ψ(n+m+1) + ψ(a+n+m) + ψ(b+n+m)],
/// with `w = 1 − z`.
fn regularized_log_case(a: f64, b: f64, m: usize, _z: f64, w: f64) -> Result<f64> {
    let mf = m as f64;
    let mut finite = 0.0;
    if m > 0 {
        let pre = gamma_ratio(&[mf], &[a + mf, b + mf]);
        if pre != 0.0 {
            let mut term = 1.0;
            let mut sum = 1.0;
            for n in 0..m.saturating_sub(1) {
                let n = n as f64;
                term *= (a + n) * (b + n) / ((n + 1.0) * (1.0 - mf + n)) * w;
                sum += term;
            }
            finite = pre * sum;
        }
    }
    let pre = gamma_ratio(&[], &[a, b]);
    if pre == 0.0 {
        return Ok(finite);
    }
    let ln_w = w.ln();
    let mut factorial_m = 1.0;
    for i in 1..=m {
        factorial_m *= i as f64;
    }
    let mut coef = 1.0 / factorial_m;
    let mut psi_n1 = -EULER_GAMMA;
    let mut psi_nm1 = digamma(mf + 1.0);
    let mut psi_a = digamma(a + mf);
    let mut psi_b = digamma(b + mf);
    let mut sum = 0.0;
    let mut quiet = 0;
    let mut converged = false;
    for n in 0..SERIES_CAP {
        let nf = n as f64;
        let term = coef * (ln_w - psi_n1 - psi_nm1 + psi_a + psi_b);
        sum += term;
        if term.abs() < SERIES_TOL * sum.abs() || coef == 0.0 {
            quiet += 1;
            if quiet >= SERIES_QUIET_TERMS || coef == 0.0 {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
        coef *= (a + mf + nf) * (b + mf + nf) / ((nf + 1.0) * (nf + mf + 1.0)) * w;
        psi_n1 += 1.0 / (nf + 1.0);
        psi_nm1 += 1.0 / (nf + mf + 1.0);
        psi_a += 1.0 / (a + mf + nf);
        psi_b += 1.0 / (b + mf + nf);
    }
    if !converged {
        return Err(Error::no_convergence(
            "hyp2f1",
            format!("logarithmic series for (a, b, m) = ({a}, {b}, {m}) exceeded {SERIES_CAP} terms"),
        ));
    }
    let sign_m = if m % 2 == 0 { 1.0 } else { -1.0 };
    Ok(finite - sign_m * w.powi(m as i32) * pre * sum)
}

/// Complete elliptic integrals `K(κ)`, `E(κ)` from the complementary
/// modulus `κ̃ = √(1 − κ²)`, by the arithmetic–geometric mean.
pub fn elliptic_ke(kappa_tilde: f64) -> Result<EllipticPair> {
    if !(kappa_tilde > 0.0 && kappa_tilde <= 1.0) {
        return Err(Error::domain("elliptic_ke", format!("kappa_tilde = {kappa_tilde} outside (0, 1]")));
    }
    let kappa = ((1.0 - kappa_tilde) * (1.0 + kappa_tilde)).sqrt();
    Ok(agm_pair(kappa, kappa_tilde))
}

/// As [`elliptic_ke`] when both moduli are already known accurately, for
/// example `tanh(pτ)` and `sech(pτ)`.
pub fn elliptic_ke_pair(kappa: f64, kappa_tilde: f64) -> Result<EllipticPair> {
    if !(kappa_tilde > 0.0 && kappa_tilde <= 1.0) || !(0.0..=1.0).contains(&kappa) {
        return Err(Error::domain("elliptic_ke", format!("moduli ({kappa}, {kappa_tilde}) outside [0, 1] x (0, 1]")));
    }
    Ok(agm_pair(kappa, kappa_tilde))
}

fn agm_pair(kappa: f64, kappa_tilde: f64) -> EllipticPair {
    let mut a = 1.0;
    let mut b = kappa_tilde;
    let mut c = kappa;
    let mut weight = 0.5;
    let mut deficit = weight * c * c;
    for _ in 0..64 {
        if c.abs() <= f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        c = 0.5 * (a - b);
        b = (a * b).sqrt();
        a = an;
        weight *= 2.0;
        deficit += weight * c * c;
    }
    let k_big = PI / (2.0 * a);
    EllipticPair { k_big, e_big: k_big * (1.0 - deficit), kappa, kappa_tilde }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn ln_factorial(n: u32) -> f64 {
        (1..=n).map(|k| (k as f64).ln()).sum()
    }

    #[test]
    fn ln_gamma_at_integers_matches_factorials() {
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert!(rel(ln_gamma(10.0).unwrap(), 362_880f64.ln()) < 1e-14);
        for n in 3..=200u32 {
            let got = ln_gamma(n as f64).unwrap();
            assert!(rel(got, ln_factorial(n - 1)) < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn ln_gamma_at_half_integers() {
        assert!((ln_gamma(0.5).unwrap() - 0.572_364_942_924_700_1).abs() < 1e-15);
        // Γ(n + ½) = (2n)! √π / (4ⁿ n!)
        for n in 1..=150u32 {
            let expect = ln_factorial(2 * n) + 0.5 * PI.ln() - n as f64 * 4f64.ln() - ln_factorial(n);
            let got = ln_gamma(n as f64 + 0.5).unwrap();
            assert!(rel(got, expect) < 1e-13, "n = {n}: {got} vs {expect}");
        }
    }

    #[test]
    fn ln_gamma_rejects_non_positive() {
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
    }

    #[test]
    fn signed_gamma_on_negative_axis() {
        // Γ(−½) = −2√π, Γ(−3/2) = 4√π/3
        let (lg, s) = ln_gamma_signed(-0.5).unwrap();
        assert!(rel(s * lg.exp(), -2.0 * PI.sqrt()) < 1e-14);
        let (lg, s) = ln_gamma_signed(-1.5).unwrap();
        assert!(rel(s * lg.exp(), 4.0 * PI.sqrt() / 3.0) < 1e-14);
        assert!(ln_gamma_signed(-3.0).is_none());
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-7.0), 0.0);
    }

    #[test]
    fn digamma_reference_values() {
        assert!((digamma(1.0) + EULER_GAMMA).abs() < 1e-15);
        assert!((digamma(0.5) + EULER_GAMMA + 2.0 * 2f64.ln()).abs() < 1e-14);
        let mut harmonic = 0.0;
        for n in 1..=60 {
            harmonic += 1.0 / n as f64;
            let got = digamma(n as f64 + 1.0);
            assert!((got - (harmonic - EULER_GAMMA)).abs() < 1e-14 * got.abs().max(1.0));
        }
    }

    #[test]
    fn digamma_reflection() {
        for &x in &[0.1, 0.3, 0.77, 1.4, 2.5] {
            let lhs = digamma(1.0 - x) - digamma(x);
            assert!((lhs - PI / (PI * x).tan()).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn hyp2f1_at_zero_is_one() {
        for &(a, b, c) in &[(0.5, 0.5, 1.0), (3.5, -2.5, 2.0), (-1.0, 4.0, 0.5)] {
            assert_eq!(hyp2f1(a, b, c, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn hyp2f1_gauss_sum() {
        let (a, b) = (1.5, -0.5);
        let got = hyp2f1(a, b, a + b + 1.0, 1.0).unwrap();
        let expect = rgamma(a + 1.0) * rgamma(b + 1.0) / rgamma(a + b + 1.0);
        assert!(rel(got, expect) < 1e-13);
        assert!(hyp2f1(1.0, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn hyp2f1_quarter_period() {
        let kappa: f64 = 0.5;
        let pair = elliptic_ke(((1.0 - kappa) * (1.0 + kappa)).sqrt()).unwrap();
        let f = hyp2f1(0.5, 0.5, 1.0, kappa * kappa).unwrap();
        assert!(rel(f, 2.0 / PI * pair.k_big) < 1e-13);
    }

    #[test]
    fn hyp2f1_logarithm_identity_through_transformation() {
        // F(1, 1; 2; z) = −ln(1−z)/z, c − a − b = 0.
        for &w in &[0.3, 0.1, 1e-3, 1e-9, 1e-14] {
            let z = 1.0 - w;
            let got = hyp2f1_regularized_split(1.0, 1.0, 2.0, z, w).unwrap();
            let expect = -w.ln() / z;
            assert!(rel(got, expect) < 1e-13, "w = {w}: {got} vs {expect}");
        }
    }

    #[test]
    fn hyp2f1_integer_excess_one() {
        // F(1, 1; 3; z) = 2[z + (1−z) ln(1−z)]/z², c − a − b = 1.
        for &w in &[0.6, 0.2, 1e-2, 1e-8, 1e-13] {
            let z = 1.0 - w;
            let got = hyp2f1_regularized_split(1.0, 1.0, 3.0, z, w).unwrap() * 2.0;
            let expect = 2.0 * (z + w * w.ln()) / (z * z);
            assert!(rel(got, expect) < 1e-12, "w = {w}: {got} vs {expect}");
        }
    }

    #[test]
    fn hyp2f1_non_integer_excess() {
        // F(a, b; b; z) = (1−z)^{−a}
        for &w in &[0.5, 0.2, 1e-3, 1e-10] {
            let z = 1.0 - w;
            let got = hyp2f1_regularized_split(0.3, 2.0, 2.0, z, w).unwrap();
            assert!(rel(got, w.powf(-0.3)) < 1e-12, "w = {w}");
        }
    }

    /// Euler integral Γ(c)/(Γ(b)Γ(c−b)) ∫ t^{b−1}(1−t)^{c−b−1}(1−zt)^{−a} dt,
    /// with t = sin²θ and composite Gauss–Legendre in θ.
    fn euler_integral(a: f64, b: f64, c: f64, z: f64) -> f64 {
        let nodes = [
            (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
            (-0.538_469_310_105_683, 0.478_628_670_499_366_5),
            (0.0, 0.568_888_888_888_888_9),
            (0.538_469_310_105_683, 0.478_628_670_499_366_5),
            (0.906_179_845_938_664, 0.236_926_885_056_189_1),
        ];
        let panels = 2000;
        let h = PI / 2.0 / panels as f64;
        let mut sum = 0.0;
        for i in 0..panels {
            let mid = (i as f64 + 0.5) * h;
            for &(x, w) in &nodes {
                let (sn, cs) = (mid + 0.5 * h * x).sin_cos();
                let t = sn * sn;
                sum +=
                    0.5 * h * w * 2.0 * sn.powf(2.0 * b - 1.0) * cs.powf(2.0 * (c - b) - 1.0) * (1.0 - z * t).powf(-a);
            }
        }
        sum / (rgamma(c) / (rgamma(b) * rgamma(c - b)))
    }

    #[test]
    fn hyp2f1_against_euler_integral() {
        for &(a, b, c) in &[(1.5, 1.5, 4.0), (1.5, 2.0, 4.0), (0.7, 2.0, 5.0)] {
            for &z in &[0.2, 0.7, 0.8, 0.95, 0.99] {
                let got = hyp2f1(a, b, c, z).unwrap();
                let expect = euler_integral(a, b, c, z);
                assert!(rel(got, expect) < 1e-10, "({a},{b},{c},{z}): {got} vs {expect}");
            }
        }
    }

    #[test]
    fn hyp2f1_terminating_matches_polynomial() {
        for m in 0..8 {
            let b = -(m as f64);
            for &z in &[0.1, 0.5, 0.8, 0.99] {
                let (a, c) = (2.5, 1.5);
                let mut term = 1.0;
                let mut direct = 1.0;
                for n in 0..m {
                    let n = n as f64;
                    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
                    direct += term;
                }
                let got = hyp2f1(a, b, c, z).unwrap();
                assert!((got - direct).abs() <= 1e-14 * direct.abs().max(1.0));
            }
        }
    }

    #[test]
    fn regularized_pole_matches_symmetric_limit() {
        // F/Γ(c) at c = −k from the symmetric difference quotient around the pole.
        for &(a, b, k) in &[(1.5, -0.5, 0.0), (2.5, -1.5, 1.0), (0.5, 0.5, 2.0)] {
            for &z in &[0.3, 0.6] {
                let d = 1e-5;
                let lo = hyp2f1(a, b, -k - d, z).unwrap() * rgamma(-k - d);
                let hi = hyp2f1(a, b, -k + d, z).unwrap() * rgamma(-k + d);
                let expect = 0.5 * (lo + hi);
                let got = hyp2f1_regularized(a, b, -k, z).unwrap();
                assert!((got - expect).abs() < 1e-8 * expect.abs().max(1.0), "{got} vs {expect}");
            }
        }
    }

    #[test]
    fn regularized_terminating_series_with_pole_near_one() {
        // F(1, −2; c; z)/Γ(c) → −2z(1 − z) as c → 0.
        for z in [0.3, 0.97, 0.999_999] {
            let got = hyp2f1_regularized(1.0, -2.0, 0.0, z).unwrap();
            let expect = -2.0 * z * (1.0 - z);
            assert!((got - expect).abs() < 1e-14, "z = {z}: {got} vs {expect}");
        }
    }

    #[test]
    fn regularized_is_continuous_across_the_switch() {
        for &(a, b, c) in &[(2.5, -3.5, 0.0), (1.5, -1.5, 1.0), (3.5, -0.5, 4.0), (0.5, -2.5, -1.0)] {
            let lo = hyp2f1_regularized(a, b, c, SERIES_SWITCH).unwrap();
            let hi = hyp2f1_regularized(a, b, c, SERIES_SWITCH + 1e-12).unwrap();
            assert!((lo - hi).abs() < 1e-10 * lo.abs().max(1.0), "({a},{b},{c}): {lo} vs {hi}");
        }
    }

    #[test]
    fn split_argument_accepts_rounded_unit_z() {
        // F(a, b; a+b+1; 1)/Γ(a+b+1) = 1/(Γ(a+1)Γ(b+1)).
        let got = hyp2f1_regularized_split(0.5, 0.5, 2.0, 1.0, 1e-35).unwrap();
        assert!(rel(got, 4.0 / PI) < 1e-12, "{got}");
        let pair = elliptic_ke_pair(1.0, 1e-30).unwrap();
        assert!(pair.k_big.is_finite() && (pair.e_big - 1.0).abs() < 1e-12);
    }

    #[test]
    fn elliptic_at_zero_modulus() {
        let p = elliptic_ke(1.0).unwrap();
        assert!((p.k_big - PI / 2.0).abs() < 1e-15);
        assert!((p.e_big - PI / 2.0).abs() < 1e-15);
        assert_eq!(p.kappa, 0.0);
    }

    #[test]
    fn elliptic_near_unit_modulus() {
        let kt = 1e-6;
        let p = elliptic_ke(kt).unwrap();
        assert!(rel(p.k_big, (4.0 / kt).ln()) < 1e-5);
        assert!(rel(p.e_big, 1.0) < 1e-5);
        assert!(elliptic_ke(0.0).is_err());
    }

    fn quad_k_e(kappa: f64) -> (f64, f64) {
        // Composite Simpson on the smooth, periodic defining integrands.
        let n = 2000;
        let h = PI / 2.0 / n as f64;
        let (mut k, mut e) = (0.0, 0.0);
        for i in 0..=n {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let s = (i as f64 * h).sin();
            let r = (1.0 - kappa * kappa * s * s).sqrt();
            k += w / r;
            e += w * r;
        }
        (k * h / 3.0, e * h / 3.0)
    }

    #[test]
    fn elliptic_matches_quadrature() {
        let kappa = 0.5f64;
        let p = elliptic_ke((1.0 - kappa * kappa).sqrt()).unwrap();
        let (k, e) = quad_k_e(kappa);
        assert!(rel(p.k_big, k) < 1e-13);
        assert!(rel(p.e_big, e) < 1e-13);
    }

    #[test]
    fn legendre_relation() {
        for i in 1..=9 {
            let kappa = i as f64 / 10.0;
            let kt = (1.0 - kappa * kappa).sqrt();
            let p = elliptic_ke_pair(kappa, kt).unwrap();
            let q = elliptic_ke_pair(kt, kappa).unwrap();
            let lhs = p.e_big * q.k_big + q.e_big * p.k_big - p.k_big * q.k_big;
            assert!((lhs - PI / 2.0).abs() < 1e-12, "kappa = {kappa}");
        }
    }

    #[test]
    fn elliptic_derivatives() {
        let h = 1e-6;
        let at = |k: f64| elliptic_ke_pair(k, (1.0 - k * k).sqrt()).unwrap();
        for i in 1..=9 {
            let k = i as f64 / 10.0;
            let p = at(k);
            let kt2 = 1.0 - k * k;
            let dk = (at(k + h).k_big - at(k - h).k_big) / (2.0 * h);
            let de = (at(k + h).e_big - at(k - h).e_big) / (2.0 * h);
            assert!((dk - (p.e_big / (k * kt2) - p.k_big / k)).abs() < 1e-6);
            assert!((de - (p.e_big - p.k_big) / k).abs() < 1e-6);
        }
    }

    #[test]
    fn e_below_k() {
        for i in 1..100 {
            let kt = i as f64 / 100.0;
            let p = elliptic_ke(kt).unwrap();
            assert!(p.e_big < p.k_big);
        }
    }
}
