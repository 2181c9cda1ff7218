//! Smooth test functions with analytic derivatives through order 4.
//!
//! The kernel verification needs periodic probe functions (y, y', y'' equal at
//! the interval ends) together with their fourth derivatives for the integral
//! term of the inner product. Derivatives are hand-coded so the battery stays
//! independent of the symbolic differentiation layer it is sometimes used to
//! cross-check.

use std::f64::consts::PI;

/// A scalar function on [0, 1] exposing derivatives up to order 4.
pub trait SmoothFunction {
    fn eval(&self, t: f64, order: usize) -> f64;
    fn name(&self) -> &str;

    /// Max violation of y(0)=y(1), y'(0)=y'(1), y''(0)=y''(1).
    fn periodic_defect(&self) -> f64 {
        (0..3)
            .map(|k| (self.eval(0.0, k) - self.eval(1.0, k)).abs())
            .fold(0.0, f64::max)
    }
}

/// The constant function 1.
pub struct One;

impl SmoothFunction for One {
    fn eval(&self, _t: f64, order: usize) -> f64 {
        if order == 0 {
            1.0
        } else {
            0.0
        }
    }
    fn name(&self) -> &str {
        "1"
    }
}

/// sin(2 pi t).
pub struct SinTwoPi;

impl SmoothFunction for SinTwoPi {
    fn eval(&self, t: f64, order: usize) -> f64 {
        let w = 2.0 * PI;
        let u = w * t;
        let cycle = match order % 4 {
            0 => u.sin(),
            1 => u.cos(),
            2 => -u.sin(),
            _ => -u.cos(),
        };
        w.powi(order as i32) * cycle
    }
    fn name(&self) -> &str {
        "sin(2*pi*t)"
    }
}

/// cos(2 pi t).
pub struct CosTwoPi;

impl SmoothFunction for CosTwoPi {
    fn eval(&self, t: f64, order: usize) -> f64 {
        let w = 2.0 * PI;
        let u = w * t;
        let cycle = match order % 4 {
            0 => u.cos(),
            1 => -u.sin(),
            2 => -u.cos(),
            _ => u.sin(),
        };
        w.powi(order as i32) * cycle
    }
    fn name(&self) -> &str {
        "cos(2*pi*t)"
    }
}

/// t^2 (1 - t)^2, the lowest-degree nontrivial polynomial satisfying the
/// periodic conditions.
pub struct QuarticBump;

impl SmoothFunction for QuarticBump {
    fn eval(&self, t: f64, order: usize) -> f64 {
        // t^2 - 2 t^3 + t^4
        match order {
            0 => t * t * (1.0 - t) * (1.0 - t),
            1 => 2.0 * t - 6.0 * t * t + 4.0 * t * t * t,
            2 => 2.0 - 12.0 * t + 12.0 * t * t,
            3 => -12.0 + 24.0 * t,
            4 => 24.0,
            _ => 0.0,
        }
    }
    fn name(&self) -> &str {
        "t^2*(1-t)^2"
    }
}

/// exp(sin(2 pi t)), a non-polynomial periodic probe. Derivatives come from
/// the Faa di Bruno expansion of exp(g).
pub struct ExpSinTwoPi;

impl SmoothFunction for ExpSinTwoPi {
    fn eval(&self, t: f64, order: usize) -> f64 {
        let w = 2.0 * PI;
        let u = w * t;
        let g = u.sin();
        let g1 = w * u.cos();
        let g2 = -w * w * u.sin();
        let g3 = -w * w * w * u.cos();
        let g4 = w * w * w * w * u.sin();
        let e = g.exp();
        match order {
            0 => e,
            1 => g1 * e,
            2 => (g2 + g1 * g1) * e,
            3 => (g3 + 3.0 * g1 * g2 + g1 * g1 * g1) * e,
            4 => (g4 + 4.0 * g1 * g3 + 3.0 * g2 * g2 + 6.0 * g1 * g1 * g2 + g1.powi(4)) * e,
            _ => unimplemented!("derivatives above order 4 are not needed"),
        }
    }
    fn name(&self) -> &str {
        "exp(sin(2*pi*t))"
    }
}

/// The standard periodic probe battery.
pub fn periodic_battery() -> Vec<Box<dyn SmoothFunction>> {
    vec![
        Box::new(One),
        Box::new(SinTwoPi),
        Box::new(CosTwoPi),
        Box::new(QuarticBump),
        Box::new(ExpSinTwoPi),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_is_periodic() {
        for f in periodic_battery() {
            assert!(f.periodic_defect() < 1e-12, "{} not periodic", f.name());
        }
    }

    #[test]
    fn derivatives_match_central_differences() {
        let h = 1e-6;
        for f in periodic_battery() {
            for order in 0..4 {
                for &t in &[0.11, 0.43, 0.78] {
                    let fd = (f.eval(t + h, order) - f.eval(t - h, order)) / (2.0 * h);
                    let an = f.eval(t, order + 1);
                    assert!(
                        (fd - an).abs() <= 1e-5 * an.abs().max(1.0),
                        "{} order {order} at {t}: fd={fd} analytic={an}",
                        f.name()
                    );
                }
            }
        }
    }
}
