//! Special functions used by the rate and capacity formulas.
//!
//! `exp_int` follows the convention E₁(x) = ∫ₓ^∞ e^{−t}/t dt. This is what
//! the closed-form rate expressions need; it is *not* the two-sided
//! exponential integral Ei(x) found in some libraries.

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const FPMIN: f64 = 1e-300;

/// Stopping rule shared by the iterative kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-12,
            rel: 1e-10,
            max_iter: 200,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64, max_iter: usize) -> Result<Self> {
        if !(abs > 0.0) {
            return Err(Error::param("abs", abs, "must be > 0"));
        }
        if !(rel > 0.0) {
            return Err(Error::param("rel", rel, "must be > 0"));
        }
        if max_iter == 0 {
            return Err(Error::param("max_iter", 0.0, "must be >= 1"));
        }
        Ok(Tolerance { abs, rel, max_iter })
    }
}

/// E₁(x) = ∫ₓ^∞ e^{−t}/t dt for x > 0.
pub fn exp_int(x: f64) -> Result<f64> {
    exp_int_with(x, &Tolerance::default())
}

pub fn exp_int_with(x: f64, tol: &Tolerance) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("exp_int", x, "x > 0"));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    // Power series and the continued fraction each stop once their
    // increments drop below machine precision, which is tighter than any
    // admissible `tol.rel`.
    let eps = tol.rel.min(f64::EPSILON);
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut fact = 1.0;
        for k in 1..=tol.max_iter.max(60) {
            let kf = k as f64;
            fact *= -x / kf;
            let term = -fact / kf;
            sum += term;
            if term.abs() < eps * sum.abs() {
                return Ok(-EULER_GAMMA - x.ln() + sum);
            }
        }
        Err(Error::NoConvergence {
            what: "exp_int series",
            iterations: tol.max_iter,
        })
    } else {
        // Modified Lentz evaluation of the continued fraction.
        let mut b = x + 1.0;
        let mut c = 1.0 / FPMIN;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=tol.max_iter {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < eps {
                return Ok(h * (-x).exp());
            }
        }
        Err(Error::NoConvergence {
            what: "exp_int continued fraction",
            iterations: tol.max_iter,
        })
    }
}

/// Principal branch W₀ of the Lambert-W function, defined for x ≥ −1/e.
pub fn lambert_w0(x: f64) -> Result<f64> {
    lambert_w0_with(x, &Tolerance::default())
}

pub fn lambert_w0_with(x: f64, tol: &Tolerance) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("lambert_w0", x, "x >= -1/e"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return if x > 0.0 {
            Ok(f64::INFINITY)
        } else {
            Err(Error::domain("lambert_w0", x, "x >= -1/e"))
        };
    }

    // Distance to the branch point, scaled so that q = 0 at x = -1/e.
    let q = E * x + 1.0;
    if q < -4.0 * f64::EPSILON {
        return Err(Error::domain("lambert_w0", x, "x >= -1/e"));
    }
    let p = (2.0 * q.max(0.0)).sqrt();
    if p < 1e-3 {
        return Ok(branch_series(p));
    }

    let mut w = if x < -0.3 {
        branch_series(p)
    } else {
        // Winitzki's approximation.
        let l = x.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    };

    for _ in 0..tol.max_iter {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= tol.rel * w.abs().max(tol.abs) || step.abs() < tol.abs * 1e-3 {
            return Ok(w);
        }
    }
    Err(Error::NoConvergence {
        what: "lambert_w0 Halley iteration",
        iterations: tol.max_iter,
    })
}

// Puiseux expansion of W₀ about the branch point in p = sqrt(2(ex + 1)).
fn branch_series(p: f64) -> f64 {
    const C: [f64; 6] = [-1.0, 1.0, -1.0 / 3.0, 11.0 / 72.0, -43.0 / 540.0, 769.0 / 17280.0];
    C.iter().rev().fold(0.0, |acc, c| acc * p + c)
}

/// Γ(2, x) = (1 + x)e^{−x}.
pub fn gamma_upper_2(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain("gamma_upper_2", x, "x >= 0"));
    }
    Ok((1.0 + x) * (-x).exp())
}

/// Z_δ = ∫₀^∞ du / (1 + u^{1/δ}) for 0 < δ < 1, evaluated as πδ / sin(πδ).
pub fn z_delta(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain("z_delta", delta, "0 < delta < 1"));
    }
    let x = PI * delta;
    Ok(x / x.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{integrate, integrate_to_infinity};

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    // Independent bisection for w e^w = x on the principal branch.
    fn w0_bisect(x: f64) -> f64 {
        let (mut lo, mut hi) = (-1.0, 1.0_f64.max(x.ln_1p() + 1.0));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * mid.exp() < x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn e1_quad(x: f64) -> f64 {
        integrate_to_infinity(|t| (-t).exp() / t, x, 1e-15, 1e-13).unwrap()
    }

    #[test]
    fn exp_int_reference_values() {
        // Frozen from adaptive quadrature of the defining integral.
        let one = e1_quad(1.0);
        let tenth = e1_quad(0.1);
        assert!((one - 0.219384).abs() < 5e-7, "{one}");
        assert!((tenth - 1.822924).abs() < 5e-7, "{tenth}");
        assert!(rel_err(exp_int(1.0).unwrap(), one) < 1e-10);
        assert!(rel_err(exp_int(0.1).unwrap(), tenth) < 1e-10);
    }

    #[test]
    fn exp_int_bracketing_bounds() {
        for &x in &[1e-3, 0.2, 0.9, 1.0, 1.1, 3.0, 10.0, 50.0, 200.0] {
            let v = exp_int(x).unwrap();
            let ex = (-x).exp();
            assert!(v < ex / x, "upper bound at {x}");
            assert!(v > ex / (x + 1.0), "lower bound at {x}");
        }
    }

    #[test]
    fn exp_int_is_strictly_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 1..400 {
            let v = exp_int(i as f64 * 0.025).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn exp_int_domain() {
        assert!(matches!(exp_int(0.0), Err(Error::Domain { .. })));
        assert!(exp_int(-1.0).is_err());
        assert!(exp_int(f64::NAN).is_err());
    }

    #[test]
    fn lambert_w0_fixed_points() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        let bp = -(-1.0f64).exp();
        assert!((lambert_w0(bp).unwrap() + 1.0).abs() < 1e-7);
        let omega = w0_bisect(1.0);
        assert!((omega - 0.567143).abs() < 5e-7);
        assert!((lambert_w0(1.0).unwrap() - omega).abs() < 1e-12);
    }

    #[test]
    fn lambert_w0_matches_bisection() {
        for &x in &[-0.36, -0.3, -0.1, 1e-8, 0.5, 2.0, 10.0, 1e3, 1e6] {
            let w = lambert_w0(x).unwrap();
            assert!((w - w0_bisect(x)).abs() < 1e-9 * w.abs().max(1.0), "x = {x}");
        }
    }

    #[test]
    fn lambert_w0_domain() {
        assert!(lambert_w0(-0.37).is_err());
        assert!(lambert_w0(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn gamma_upper_2_matches_quadrature() {
        assert_eq!(gamma_upper_2(0.0).unwrap(), 1.0);
        assert!((gamma_upper_2(1.0).unwrap() - 0.735759).abs() < 5e-7);
        for &x in &[0.0, 0.5, 1.0, 2.0, 5.0, 10.0] {
            let q = integrate_to_infinity(|t| t * (-t).exp(), x, 1e-15, 1e-13).unwrap();
            assert!(rel_err(gamma_upper_2(x).unwrap(), q) < 1e-8, "x = {x}");
        }
        assert!(gamma_upper_2(-0.1).is_err());
    }

    #[test]
    fn z_delta_values_and_trend() {
        assert!((z_delta(0.5).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        assert!((z_delta(2.0 / 3.0).unwrap() - 2.418399).abs() < 5e-7);
        let direct = integrate(|v| 1.0 / (1.0 + v * v), 0.0, 1.0, 1e-15, 1e-13).unwrap() * 2.0;
        assert!(rel_err(z_delta(0.5).unwrap(), direct) < 1e-12);
        let mut prev = f64::INFINITY;
        for i in (1..100).rev() {
            let v = z_delta(i as f64 / 100.0).unwrap();
            assert!(v < prev && v > 1.0);
            prev = v;
        }
        assert!(z_delta(1.0).is_err());
        assert!(z_delta(0.0).is_err());
    }
}
