use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpringParams {
    /// Mass.
    pub m: f64,
    /// Friction.
    pub b: f64,
    /// Stiffness.
    pub k: f64,
}

impl Default for SpringParams {
    fn default() -> Self {
        SpringParams {
            m: 1.0,
            b: 2.0,
            k: 1.0 + 4.0 * std::f64::consts::PI * std::f64::consts::PI,
        }
    }
}

impl SpringParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(Error::invalid(format!("m = {} must be positive", self.m)));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::invalid(format!("k = {} must be positive", self.k)));
        }
        if !(self.b >= 0.0 && self.b.is_finite()) {
            return Err(Error::invalid(format!(
                "b = {} must be non-negative",
                self.b
            )));
        }
        Ok(())
    }
}

/// Acceleration `(f − b·v − k·x) / m` under external force `f`.
pub fn spring_accel(x: f64, v: f64, p: &SpringParams, f: f64) -> f64 {
    (f - p.b * v - p.k * x) / p.m
}

/// Mechanical energy `½mv² + ½kx²`.
pub fn spring_energy(x: f64, v: f64, p: &SpringParams) -> f64 {
    0.5 * p.m * v * v + 0.5 * p.k * x * x
}

/// Free oscillation from `(x0, v0)` with classical RK4. Returns the `n + 1`
/// states including the initial one.
pub fn simulate_spring(
    p: &SpringParams,
    x0: f64,
    v0: f64,
    dt: f64,
    n: usize,
) -> Result<Vec<(f64, f64)>> {
    p.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid(format!("dt = {dt} must be positive")));
    }
    if n == 0 {
        return Err(Error::invalid("spring integration needs at least one step"));
    }
    let accel = |x: f64, v: f64| spring_accel(x, v, p, 0.0);
    let mut out = Vec::with_capacity(n + 1);
    let (mut x, mut v) = (x0, v0);
    out.push((x, v));
    for step in 1..=n {
        let (k1x, k1v) = (v, accel(x, v));
        let (k2x, k2v) = (
            v + 0.5 * dt * k1v,
            accel(x + 0.5 * dt * k1x, v + 0.5 * dt * k1v),
        );
        let (k3x, k3v) = (
            v + 0.5 * dt * k2v,
            accel(x + 0.5 * dt * k2x, v + 0.5 * dt * k2v),
        );
        let (k4x, k4v) = (v + dt * k3v, accel(x + dt * k3x, v + dt * k3v));
        x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if !(x.is_finite() && v.is_finite()) {
            return Err(Error::Diverged {
                step,
                detail: format!("spring state became ({x}, {v})"),
            });
        }
        out.push((x, v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn accel_examples() {
        let unit = SpringParams {
            m: 1.0,
            b: 0.0,
            k: 1.0,
        };
        assert_eq!(spring_accel(0.0, 0.0, &unit, 0.0), 0.0);
        assert_eq!(spring_accel(1.0, 0.0, &unit, 0.0), -1.0);
        let p = SpringParams {
            m: 2.0,
            b: 1.0,
            k: 3.0,
        };
        assert_eq!(spring_accel(1.0, 1.0, &p, 0.0), -2.0);
    }

    #[test]
    fn damped_matches_closed_form() {
        let p = SpringParams::default();
        let dt = 1e-4;
        let xs = simulate_spring(&p, 1.0, -1.0, dt, 50_000).unwrap();
        let err = xs
            .iter()
            .enumerate()
            .map(|(i, (x, _))| {
                let t = i as f64 * dt;
                (x - (-t).exp() * (2.0 * PI * t).cos()).abs()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-3, "max error {err}");
    }

    #[test]
    fn conservative_energy() {
        let p = SpringParams {
            m: 1.0,
            b: 0.0,
            k: 4.0 * PI * PI,
        };
        let xs = simulate_spring(&p, 1.0, 0.0, 1e-3, 1000).unwrap();
        let e0 = spring_energy(1.0, 0.0, &p);
        for (x, v) in xs {
            assert!((spring_energy(x, v, &p) - e0).abs() < 1e-3 * e0);
        }
    }

    #[test]
    fn rest_stays_at_rest() {
        let xs = simulate_spring(&SpringParams::default(), 0.0, 0.0, 0.01, 100).unwrap();
        assert!(xs.iter().all(|&s| s == (0.0, 0.0)));
    }

    #[test]
    fn unstable_step_reports_divergence() {
        let p = SpringParams {
            m: 1.0,
            b: 0.0,
            k: 1e6,
        };
        let err = simulate_spring(&p, 1.0, 0.0, 1.0, 10_000).unwrap_err();
        assert!(matches!(err, Error::Diverged { .. }));
    }

    #[test]
    fn rejects_invalid() {
        assert!(simulate_spring(
            &SpringParams {
                m: 0.0,
                b: 0.0,
                k: 1.0
            },
            1.0,
            0.0,
            0.1,
            1
        )
        .is_err());
        assert!(simulate_spring(&SpringParams::default(), 1.0, 0.0, 0.0, 1).is_err());
        assert!(simulate_spring(&SpringParams::default(), 1.0, 0.0, 0.1, 0).is_err());
    }

    #[test]
    fn damped_energy_never_increases() {
        let p = SpringParams {
            m: 1.5,
            b: 0.3,
            k: 7.0,
        };
        let xs = simulate_spring(&p, 0.7, 2.0, 1e-3, 20_000).unwrap();
        for w in xs.windows(2) {
            let (e0, e1) = (
                spring_energy(w[0].0, w[0].1, &p),
                spring_energy(w[1].0, w[1].1, &p),
            );
            assert!(e1 <= e0 + 1e-9);
        }
    }
}
