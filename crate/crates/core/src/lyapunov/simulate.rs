//! Fixed-step RK4 trajectories, optionally annotated with `V(x(t))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{DynSystem, SparsePoly};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Option<f64>,
}

/// Integrates `ẋ = f(x)` from `x0` over `[0, t_end]`; the last step is
/// shortened to land on `t_end`.
pub fn simulate(f: &DynSystem, x0: &[f64], t_end: f64, dt: f64, v: Option<&SparsePoly>) -> Result<Vec<Sample>> {
    if !(dt > 0.0) || !(t_end > 0.0) || !dt.is_finite() || !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "time step and horizon must be positive, got dt = {dt}, t_end = {t_end}"
        )));
    }
    if x0.len() != f.nvars() {
        return Err(Error::DimensionMismatch {
            expected: f.nvars(),
            found: x0.len(),
        });
    }
    if let Some(v) = v {
        f.vars().check_same(v.vars())?;
    }
    let level = |x: &[f64]| v.map(|v| v.evaluate(x)).transpose();
    let steps = (t_end / dt).ceil() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut x = x0.to_vec();
    let mut t = 0.0;
    out.push(Sample {
        t,
        x: x.clone(),
        v: level(&x)?,
    });
    for k in 1..=steps {
        let next_t = (k as f64 * dt).min(t_end);
        let h = next_t - t;
        x = rk4_step(f, &x, h)?;
        t = next_t;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t });
        }
        out.push(Sample {
            t,
            x: x.clone(),
            v: level(&x)?,
        });
    }
    Ok(out)
}

fn rk4_step(f: &DynSystem, x: &[f64], h: f64) -> Result<Vec<f64>> {
    let shifted = |k: &[f64], s: f64| -> Vec<f64> { x.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    let k1 = f.eval(x)?;
    let k2 = f.eval(&shifted(&k1, h / 2.0))?;
    let k3 = f.eval(&shifted(&k2, h / 2.0))?;
    let k4 = f.eval(&shifted(&k3, h))?;
    Ok((0..x.len())
        .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}
