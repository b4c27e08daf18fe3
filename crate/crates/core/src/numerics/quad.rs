//! The nonlocal functional
//! `J(f, g)(t) = 1/Γ(1−α) ∫_0^t ∫_t^T f(τ) g(μ) (μ−τ)^{−α} dμ dτ`
//! and the fractional integrals appearing in its time derivative.
//!
//! Both ranges are halved. The halves meeting at the corner `τ = μ = t`
//! use the grading `s^{1/(1−α)}` toward `t`, which absorbs the kernel
//! singularity. The outer halves are graded with `s^{1/α}` toward `0` and
//! `T`, which absorbs end-point behaviour like `τ^{α−1}` and `(T−μ)^{α−1}`.
//! Each half carries a `k`-point Gauss–Legendre rule.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use super::grid::GridFunction;
use super::special::rgamma;
use crate::error::{Error, Result};

/// Default nodes per direction.
pub const DEFAULT_NODES: usize = 64;

fn rule(k: usize) -> Result<Vec<(f64, f64)>> {
    let k = NonZeroUsize::new(k).ok_or_else(|| Error::InvalidArgument("quadrature needs k >= 1".into()))?;
    // map from [-1, 1] to [0, 1]
    Ok(GaussLegendre::new(k)
        .as_node_weight_pairs()
        .iter()
        .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect())
}

fn check(alpha: f64, t: f64, t_end: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} outside (0, 1)")));
    }
    if !(t > 0.0 && t < t_end) {
        return Err(Error::InvalidArgument(format!("t = {t} outside (0, {t_end})")));
    }
    Ok(())
}

/// Nodes `(point, distance to t, weight)` on `[t − d, t]` graded toward
/// `t` with exponent `p`, or toward `t − d` when `outer`.
fn graded(q: &[(f64, f64)], t: f64, d: f64, p: f64, outer: bool, sign: f64) -> Vec<(f64, f64, f64)> {
    q.iter()
        .map(|&(s, w)| {
            let sp = s.powf(p);
            let jac = w * d * p * s.powf(p - 1.0);
            let dist = if outer { 2.0 * d - d * sp } else { d * sp };
            (t - sign * dist, dist, jac)
        })
        .collect()
}

/// `J(f, g)(t)` for callables.
pub fn j_quadrature_fn(
    f: impl Fn(f64) -> f64,
    g: impl Fn(f64) -> f64,
    alpha: f64,
    t: f64,
    t_end: f64,
    k: usize,
) -> Result<f64> {
    check(alpha, t, t_end)?;
    let q = rule(k)?;
    let (p, r) = (1.0 / (1.0 - alpha), 1.0 / alpha);
    let (a, b) = (0.5 * t, 0.5 * (t_end - t));
    let mut taus = graded(&q, t, a, p, false, 1.0);
    taus.extend(graded(&q, t, a, r, true, 1.0));
    let mut mus = graded(&q, t, b, p, false, -1.0);
    mus.extend(graded(&q, t, b, r, true, -1.0));
    let gv: Vec<(f64, f64)> = mus.iter().map(|&(m, dm, wm)| (dm, wm * g(m))).collect();
    let mut acc = 0.0;
    for &(tau, dt, wt) in &taus {
        let fv = f(tau);
        if fv == 0.0 {
            continue;
        }
        let inner: f64 = gv.iter().map(|&(dm, wg)| wg * (dt + dm).powf(-alpha)).sum();
        acc += wt * fv * inner;
    }
    Ok(acc * rgamma(1.0 - alpha))
}

/// `J(f, g)(t)` for sampled functions of `t`, linearly interpolated.
pub fn j_quadrature(
    f: &GridFunction,
    g: &GridFunction,
    alpha: f64,
    t: f64,
    t_end: f64,
    k: usize,
) -> Result<f64> {
    for h in [f, g] {
        if h.dim() != 0 {
            return Err(Error::InvalidArgument("J quadrature takes functions of t alone".into()));
        }
        let a = h.t_axis();
        if a.start > 1e-12 || a.end() < t_end - 1e-12 {
            return Err(Error::InvalidArgument(format!("samples must cover [0, {t_end}]")));
        }
    }
    let fi = |x: f64| f.interp_time(x).unwrap_or(f64::NAN);
    let gi = |x: f64| g.interp_time(x).unwrap_or(f64::NAN);
    let v = j_quadrature_fn(fi, gi, alpha, t, t_end, k)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite("J quadrature".into()))
    }
}

/// Left fractional integral `₀I_t^β f = 1/Γ(β) ∫_0^t (t−τ)^{β−1} f(τ) dτ`,
/// `β ∈ (0, 1]`, via `τ = t(1 − s^{1/β})`.
pub fn left_integral(f: impl Fn(f64) -> f64, beta: f64, t: f64, k: usize) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) || !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("left integral of order {beta} at t = {t}")));
    }
    let s: f64 = rule(k)?.iter().map(|&(s, w)| w * f(t * (1.0 - s.powf(1.0 / beta)))).sum();
    Ok(t.powf(beta) * rgamma(1.0 + beta) * s)
}

/// Right fractional integral `_tI_T^β g = 1/Γ(β) ∫_t^T (μ−t)^{β−1} g(μ) dμ`.
pub fn right_integral(g: impl Fn(f64) -> f64, beta: f64, t: f64, t_end: f64, k: usize) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) || !(t <= t_end) {
        return Err(Error::InvalidArgument(format!("right integral of order {beta} at t = {t}")));
    }
    let d = t_end - t;
    let s: f64 = rule(k)?.iter().map(|&(r, w)| w * g(t + d * r.powf(1.0 / beta))).sum();
    Ok(d.powf(beta) * rgamma(1.0 + beta) * s)
}
