//! Classical fixed-step fourth-order Runge–Kutta integration.

use nalgebra::DMatrix;

/// Advances `y` from `t` to `t + h` for `dy/dt = f(t, y)`.
///
/// `f` writes the derivative into its third argument. Scratch buffers are
/// allocated per call; use [`Rk4`] in hot loops.
pub fn rk4_step<F>(f: &mut F, t: f64, y: &mut [f64], h: f64)
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    Rk4::new(y.len()).step(f, t, y, h);
}

/// RK4 stepper that owns its stage buffers.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(n: usize) -> Self {
        Rk4 { k1: vec![0.0; n], k2: vec![0.0; n], k3: vec![0.0; n], k4: vec![0.0; n], tmp: vec![0.0; n] }
    }

    pub fn step<F>(&mut self, f: &mut F, t: f64, y: &mut [f64], h: f64)
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let n = y.len();
        debug_assert_eq!(n, self.k1.len());
        f(t, y, &mut self.k1);
        for ((tmp, &yi), &k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k1) {
            *tmp = yi + 0.5 * h * k;
        }
        f(t + 0.5 * h, &self.tmp, &mut self.k2);
        for ((tmp, &yi), &k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k2) {
            *tmp = yi + 0.5 * h * k;
        }
        f(t + 0.5 * h, &self.tmp, &mut self.k3);
        for ((tmp, &yi), &k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k3) {
            *tmp = yi + h * k;
        }
        f(t + h, &self.tmp, &mut self.k4);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += h / 6.0 * (self.k1[i] + 2.0 * (self.k2[i] + self.k3[i]) + self.k4[i]);
        }
    }

    /// Integrates over `[t0, t1]` with `steps` equal steps.
    pub fn integrate<F>(&mut self, f: &mut F, t0: f64, t1: f64, steps: usize, y: &mut [f64])
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        if steps == 0 {
            return;
        }
        let h = (t1 - t0) / steps as f64;
        for i in 0..steps {
            self.step(f, t0 + i as f64 * h, y, h);
        }
    }
}

/// One RK4 step of the autonomous linear system `dy/dτ = A y` is the
/// matrix `P(hA) = I + hA + (hA)²/2 + (hA)³/6 + (hA)⁴/24`; `steps` steps are
/// `P(hA)^steps`, formed here by repeated squaring.
pub fn rk4_linear_propagator(a: &DMatrix<f64>, h: f64, steps: usize) -> DMatrix<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "rk4_linear_propagator needs a square matrix");
    let identity = DMatrix::<f64>::identity(n, n);
    let ha = a * h;
    let mut step = &identity + &ha * 0.25;
    for k in [3.0, 2.0, 1.0] {
        step = &identity + (&ha * &step) / k;
    }
    let mut result = identity;
    let mut base = step;
    let mut remaining = steps;
    let mut first = true;
    while remaining > 0 {
        if remaining & 1 == 1 {
            result = if first { base.clone() } else { &result * &base };
            first = false;
        }
        remaining >>= 1;
        if remaining > 0 {
            base = &base * &base;
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(_t: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = -y[0];
    }

    #[test]
    fn exponential_decay_is_fourth_order() {
        let err = |steps: usize| {
            let mut y = [1.0];
            Rk4::new(1).integrate(&mut decay, 0.0, 1.0, steps, &mut y);
            (y[0] - (-1.0f64).exp()).abs()
        };
        let ratio = err(20) / err(40);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn harmonic_oscillator_period() {
        let mut f = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let mut y = [1.0, 0.0];
        Rk4::new(2).integrate(&mut f, 0.0, 2.0 * std::f64::consts::PI, 2000, &mut y);
        assert!((y[0] - 1.0).abs() < 1e-10 && y[1].abs() < 1e-10);
    }

    #[test]
    fn single_step_helper_matches_stepper() {
        let mut f = |t: f64, y: &[f64], dy: &mut [f64]| dy[0] = t * y[0];
        let mut a = [1.0];
        let mut b = [1.0];
        rk4_step(&mut f, 0.3, &mut a, 0.1);
        Rk4::new(1).step(&mut f, 0.3, &mut b, 0.1);
        assert_eq!(a, b);
    }

    #[test]
    fn linear_propagator_matches_stepping() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -2.0, 0.0, 3.0, 0.0, -1.0, 0.5]);
        let (h, steps) = (0.01, 37);
        let u = rk4_linear_propagator(&a, h, steps);
        let mut f = |_t: f64, y: &[f64], dy: &mut [f64]| {
            for i in 0..3 {
                dy[i] = (0..3).map(|j| a[(i, j)] * y[j]).sum();
            }
        };
        for col in 0..3 {
            let mut y = [0.0; 3];
            y[col] = 1.0;
            Rk4::new(3).integrate(&mut f, 0.0, h * steps as f64, steps, &mut y);
            for row in 0..3 {
                assert!((u[(row, col)] - y[row]).abs() < 1e-13, "({row}, {col})");
            }
        }
        assert_eq!(rk4_linear_propagator(&a, h, 0), DMatrix::identity(3, 3));
    }
}
