//! Hamilton equations on `V*` and fixed-step RK4 integration.

use crate::affgebroid::{CoSection, HamiltonianSection};
use crate::{Error, Real, Result};

pub const DEFAULT_STEP: f64 = 1e-3;

/// States on the grid `t0, t0 + step, …`, the last interval shortened to end
/// exactly at the requested final time.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub t0: T,
    pub step: T,
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    /// Why integration stopped early, if it did.
    pub aborted: Option<String>,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &[T] {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn is_complete(&self) -> bool {
        self.aborted.is_none()
    }

    /// The trajectory, or an integration error if it was aborted.
    pub fn into_result(self) -> Result<Self> {
        match &self.aborted {
            None => Ok(self),
            Some(reason) => Err(Error::Integration {
                t: self.times.last().map_or(f64::NAN, |t| t.as_f64()),
                reason: reason.clone(),
            }),
        }
    }
}

/// `(ẋ, ẏ)` at `(x, y)`:
///
/// ```text
/// ẋ^i = ρ^i_0 + ∂H/∂y_α ρ^i_α
/// ẏ_α = −ρ^i_α ∂H/∂x^i + y_γ (C^γ_{0α} + C^γ_{βα} ∂H/∂y_β)
/// ```
pub fn hamilton_rhs<T: Real>(h: &HamiltonianSection, state: &[T]) -> Result<Vec<T>> {
    let chart = h.chart();
    let (m, n) = (chart.base_dim(), chart.affine_rank());
    if state.len() != m + n {
        return Err(Error::Dimension(format!("state needs {} entries, got {}", m + n, state.len())));
    }
    let r = n + 1;
    let (_, grad) = h.value_grad(state)?;
    let (hx, hy) = grad.split_at(m);
    let y = &state[m..];
    let (anchor, c) = chart.anchor_and_structure(&state[..m])?;
    let mut out = vec![T::zero(); m + n];
    for i in 0..m {
        let mut v = anchor[i];
        for a in 0..n {
            v = v + hy[a] * anchor[(1 + a) * m + i];
        }
        out[i] = v;
    }
    for a in 0..n {
        let mut v = T::zero();
        for i in 0..m {
            v = v - anchor[(1 + a) * m + i] * hx[i];
        }
        for g in 0..n {
            let mut coeff = c[(1 + a) * r + 1 + g];
            for b in 0..n {
                coeff = coeff + c[((1 + b) * r + 1 + a) * r + 1 + g] * hy[b];
            }
            v = v + y[g] * coeff;
        }
        out[m + a] = v;
    }
    Ok(out)
}

/// `X^i(x) = ρ^i_0(x) + ∂H/∂y_α(x, α_V(x)) ρ^i_α(x)`.
pub fn reduced_field<T: Real>(alpha: &CoSection, h: &HamiltonianSection, x: &[T]) -> Result<Vec<T>> {
    let chart = h.chart();
    let m = chart.base_dim();
    if x.len() != m {
        return Err(Error::Dimension(format!("base point needs {m} entries, got {}", x.len())));
    }
    let values = alpha.values(x)?;
    let xy: Vec<T> = x.iter().copied().chain(values[1..].iter().copied()).collect();
    let (_, grad) = h.value_grad(&xy)?;
    let (anchor, _) = chart.anchor_and_structure(x)?;
    Ok((0..m)
        .map(|i| {
            grad[m..]
                .iter()
                .enumerate()
                .fold(anchor[i], |acc, (a, &hy)| acc + hy * anchor[(1 + a) * m + i])
        })
        .collect())
}

/// Classical RK4 for the autonomous system `ż = field(z)` from `t0` to
/// `t_end` in either direction; `step` is the magnitude of the time step.
pub fn integrate_field<T, F>(field: F, z0: &[T], t0: T, t_end: T, step: T) -> Result<Trajectory<T>>
where
    T: Real,
    F: Fn(&[T]) -> Result<Vec<T>>,
{
    if !(step > T::zero()) || !step.is_finite() {
        return Err(Error::Invalid(format!("step must be positive, got {step}")));
    }
    if !t0.is_finite() || !t_end.is_finite() || t_end == t0 {
        return Err(Error::Invalid(format!("empty time interval [{t0}, {t_end}]")));
    }
    let span = t_end - t0;
    let dir = span.signum();
    let count = (span.abs() / step - T::lit(1e-9)).ceil().max(T::one());
    let count = count.to_usize().ok_or_else(|| Error::Invalid("too many steps".into()))?;

    let mut traj = Trajectory {
        t0,
        step,
        times: vec![t0],
        states: vec![z0.to_vec()],
        aborted: None,
    };
    if z0.iter().any(|v| !v.is_finite()) {
        traj.aborted = Some("initial state is not finite".into());
        return Ok(traj);
    }
    let half = T::lit(0.5);
    let sixth = T::lit(1.0 / 6.0);
    let axpy = |z: &[T], a: T, k: &[T]| -> Vec<T> { z.iter().zip(k).map(|(&z, &k)| z + a * k).collect() };
    let mut z = z0.to_vec();
    for k in 0..count {
        let t = t0 + dir * step * T::lit(k as f64);
        let (t_next, dt) = if k + 1 == count { (t_end, t_end - t) } else { (t0 + dir * step * T::lit((k + 1) as f64), dir * step) };
        let stage = || -> Result<Vec<T>> {
            let k1 = field(&z)?;
            let k2 = field(&axpy(&z, half * dt, &k1))?;
            let k3 = field(&axpy(&z, half * dt, &k2))?;
            let k4 = field(&axpy(&z, dt, &k3))?;
            Ok((0..z.len())
                .map(|i| z[i] + dt * sixth * (k1[i] + (k2[i] + k3[i]) * T::lit(2.0) + k4[i]))
                .collect())
        };
        match stage() {
            Ok(next) if next.iter().all(|v| v.is_finite()) => {
                z = next;
                traj.times.push(t_next);
                traj.states.push(z.clone());
            }
            Ok(_) => {
                traj.aborted = Some(format!("state became non-finite after t = {t}"));
                break;
            }
            Err(e) => {
                traj.aborted = Some(format!("evaluation failed after t = {t}: {e}"));
                break;
            }
        }
    }
    Ok(traj)
}

fn check_forward<T: Real>(t0: T, t_end: T) -> Result<()> {
    if !(t_end > t0) {
        return Err(Error::Invalid(format!("t_end = {t_end} must exceed t0 = {t0}")));
    }
    Ok(())
}

/// Integrates the Hamilton equations from `state0 = (x, y)`.
pub fn integrate<T: Real>(h: &HamiltonianSection, state0: &[T], t0: T, t_end: T, step: T) -> Result<Trajectory<T>> {
    check_forward(t0, t_end)?;
    let dim = h.chart().base_dim() + h.chart().affine_rank();
    if state0.len() != dim {
        return Err(Error::Dimension(format!("state needs {dim} entries, got {}", state0.len())));
    }
    integrate_field(|z| hamilton_rhs(h, z), state0, t0, t_end, step)
}

/// Integrates the reduced field of `α` from `x0`.
pub fn integrate_reduced<T: Real>(
    alpha: &CoSection,
    h: &HamiltonianSection,
    x0: &[T],
    t0: T,
    t_end: T,
    step: T,
) -> Result<Trajectory<T>> {
    check_forward(t0, t_end)?;
    if x0.len() != h.chart().base_dim() {
        return Err(Error::Dimension(format!("x0 needs {} entries", h.chart().base_dim())));
    }
    integrate_field(|x| reduced_field(alpha, h, x), x0, t0, t_end, step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_lands_on_end() {
        let traj = integrate_field(|z: &[f64]| Ok(vec![1.0 + 0.0 * z[0]]), &[0.0], 0.0, 1.05, 0.1).unwrap();
        assert_eq!(traj.len(), 12);
        assert_eq!(*traj.times.last().unwrap(), 1.05);
        assert!((traj.times[3] - 0.3).abs() < 1e-15);
        assert!((traj.last()[0] - 1.05).abs() < 1e-14);
    }

    #[test]
    fn backward_direction() {
        let traj = integrate_field(|z: &[f64]| Ok(vec![z[0]]), &[1.0], 0.0, -1.0, 1e-3).unwrap();
        assert!((traj.last()[0] - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn aborts_on_blow_up() {
        let traj = integrate_field(|z: &[f64]| Ok(vec![z[0] * z[0]]), &[1.0], 0.0, 2.0, 1e-2).unwrap();
        assert!(!traj.is_complete());
        assert!(traj.len() >= 2);
        assert!(matches!(traj.into_result(), Err(Error::Integration { .. })));
    }

    #[test]
    fn rejects_bad_steps() {
        let f = |z: &[f64]| Ok(z.to_vec());
        assert!(integrate_field(f, &[1.0], 0.0, 1.0, 0.0).is_err());
        assert!(integrate_field(f, &[1.0], 0.0, 1.0, -0.1).is_err());
        assert!(integrate_field(f, &[1.0], 1.0, 1.0, 0.1).is_err());
    }
}
