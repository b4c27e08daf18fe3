//! Residuals of sampled solutions and numeric invariance of transformed
//! solutions.

use rayon::prelude::*;

use super::grid::{Axis, GridFunction};
use super::rl::{Direction, FracDerivSpec, RlOperator};
use crate::catalog::{HeatEquation, Regime};
use crate::error::{Error, Result};
use crate::prolong::PointTransformation;

const MIN_AXIS: usize = 16;
/// Residuals below this are treated as exact when comparing.
const RESIDUAL_FLOOR: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    /// over all nodes with `t > 0` and interior spatial index
    pub max: f64,
    /// over nodes with `t ≥ t_cut`
    pub interior_max: f64,
    pub t_cut: f64,
    pub interior_points: usize,
}

/// `D_t^α u − Δu` with the time derivative from `spec` and second-order
/// central differences in space. `t_cut` defaults to `0.1 T`.
pub fn residual_on_grid(
    eq: &HeatEquation,
    u: &GridFunction,
    spec: &FracDerivSpec,
    t_cut: Option<f64>,
) -> Result<ResidualReport> {
    match eq.regime {
        Regime::Integer if spec.alpha != 1.0 => {
            return Err(Error::InvalidArgument("integer regime needs alpha = 1".into()))
        }
        Regime::Fractional if !(spec.alpha < 1.0) => {
            return Err(Error::InvalidArgument("fractional regime needs alpha < 1".into()))
        }
        _ => {}
    }
    if spec.direction != Direction::Left {
        return Err(Error::InvalidArgument("residual uses the left derivative".into()));
    }
    if u.dim() != eq.n {
        return Err(Error::DimensionMismatch(format!(
            "grid has {} spatial axes, equation {}",
            u.dim(),
            eq.n
        )));
    }
    let t = u.t_axis();
    if t.len < MIN_AXIS || u.x_axes().iter().any(|a| a.len < MIN_AXIS) {
        return Err(Error::InvalidArgument(format!(
            "grid too coarse: every axis needs at least {MIN_AXIS} points"
        )));
    }
    if t.start != 0.0 {
        return Err(Error::InvalidArgument("time axis must start at 0".into()));
    }
    let t_cut = t_cut.unwrap_or(0.1 * t.end());
    let op = RlOperator::new(spec, t.step, t.len - 1)?;
    let axes = u.x_axes();
    let m = u.space_points();
    let strides: Vec<usize> = (0..axes.len())
        .map(|i| axes[i + 1..].iter().map(|a| a.len).product())
        .collect();
    let interior: Vec<usize> = (0..m)
        .filter(|&s| {
            axes.iter()
                .zip(&strides)
                .all(|(a, st)| (1..a.len - 1).contains(&((s / st) % a.len)))
        })
        .collect();
    let per_point: Vec<(f64, f64, usize)> = interior
        .par_iter()
        .map(|&s| {
            let d = op.apply(&u.time_series(s))?;
            let (mut mx, mut imx, mut cnt) = (0.0f64, 0.0f64, 0usize);
            for (k, dk) in d.iter().enumerate().skip(1) {
                let mut lap = 0.0;
                let c = u.get(k, s);
                for (a, st) in axes.iter().zip(&strides) {
                    lap += (u.get(k, s + st) - 2.0 * c + u.get(k, s - st)) / (a.step * a.step);
                }
                let r = (dk - lap).abs();
                mx = mx.max(r);
                if t.value(k) >= t_cut - 1e-12 {
                    imx = imx.max(r);
                    cnt += 1;
                }
            }
            Ok((mx, imx, cnt))
        })
        .collect::<Result<_>>()?;
    let (max, interior_max, interior_points) = per_point
        .iter()
        .fold((0.0f64, 0.0f64, 0usize), |acc, p| (acc.0.max(p.0), acc.1.max(p.1), acc.2 + p.2));
    Ok(ResidualReport {
        max,
        interior_max,
        t_cut,
        interior_points,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport {
    pub transformation: String,
    pub eps: f64,
    pub base: ResidualReport,
    pub transformed: ResidualReport,
    pub passed: bool,
}

impl InvarianceReport {
    pub fn ratio(&self) -> f64 {
        self.transformed.interior_max / self.base.interior_max.max(RESIDUAL_FLOOR)
    }
}

/// Sample `ũ = exp(εX)·u` on the grid and compare its residual with that of
/// `u`. The preimage of every node with `t̃ > 0` must have `t > 0`.
pub fn transformed_grid(
    solution: &(dyn Fn(f64, &[f64]) -> f64 + Sync),
    transform: &PointTransformation,
    t_axis: &Axis,
    x_axes: &[Axis],
) -> Result<GridFunction> {
    let m: usize = x_axes.iter().map(|a| a.len).product();
    let probe = GridFunction::new(t_axis.clone(), x_axes.to_vec(), vec![0.0; t_axis.len * m])?;
    let values: Vec<f64> = (0..t_axis.len * m)
        .into_par_iter()
        .map(|idx| {
            let (k, s) = (idx / m, idx % m);
            let tt = t_axis.value(k);
            if tt <= 0.0 {
                return Ok(0.0);
            }
            let xt = probe.space_point(s);
            let (t0, x0, _) = transform.inverse(tt, &xt, 0.0)?;
            if !(t0 > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "transformed domain leaves the sampled window: node t = {tt} pulls back to t = {t0}"
                )));
            }
            let u0 = solution(t0, &x0);
            let (_, _, ut) = transform.forward(t0, &x0, u0)?;
            if ut.is_finite() {
                Ok(ut)
            } else {
                Err(Error::NonFinite(format!("transformed solution at t = {tt}")))
            }
        })
        .collect::<Result<_>>()?;
    GridFunction::new(t_axis.clone(), x_axes.to_vec(), values)
}

/// Pass iff the transformed residual is within 3× the untransformed one.
#[allow(clippy::too_many_arguments)]
pub fn invariance_check(
    eq: &HeatEquation,
    solution: &(dyn Fn(f64, &[f64]) -> f64 + Sync),
    transform: &PointTransformation,
    t_axis: &Axis,
    x_axes: &[Axis],
    spec: &FracDerivSpec,
    t_cut: Option<f64>,
) -> Result<InvarianceReport> {
    if transform.eps.abs() > 0.5 {
        return Err(Error::InvalidArgument(format!("|eps| = {} exceeds 0.5", transform.eps.abs())));
    }
    let base_grid = GridFunction::from_fn(t_axis.clone(), x_axes.to_vec(), solution)?;
    let base = residual_on_grid(eq, &base_grid, spec, t_cut)?;
    let moved = transformed_grid(solution, transform, t_axis, x_axes)?;
    let transformed = residual_on_grid(eq, &moved, spec, t_cut)?;
    let passed = transformed.interior_max <= 3.0 * base.interior_max.max(RESIDUAL_FLOOR);
    Ok(InvarianceReport {
        transformation: transform.name.clone(),
        eps: transform.eps,
        base,
        transformed,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::mittag_leffler;

    fn eigen(alpha: f64, k: f64) -> impl Fn(f64, &[f64]) -> f64 + Sync {
        move |t: f64, x: &[f64]| {
            t.powf(alpha - 1.0)
                * mittag_leffler(alpha, alpha, -k * k * t.powf(alpha)).unwrap_or(f64::NAN)
                * (k * x[0]).cos()
        }
    }

    #[test]
    fn kernel_solutions_have_small_residual() {
        let eq = HeatEquation::fractional(1);
        let spec = FracDerivSpec::left(0.5).unwrap();
        let t = Axis::time(1.0, 2000).unwrap();
        let x = vec![Axis::new(0.0, 1.0, 17).unwrap()];
        for f in [|t: f64, _: &[f64]| t.powf(-0.5), |t: f64, x: &[f64]| x[0] * t.powf(-0.5)] {
            let g = GridFunction::from_fn(t.clone(), x.clone(), f).unwrap();
            let r = residual_on_grid(&eq, &g, &spec, None).unwrap();
            assert!(r.interior_max < 5e-3, "{r:?}");
        }
        let zero = GridFunction::from_fn(t.clone(), x.clone(), |_, _| 0.0).unwrap();
        assert_eq!(residual_on_grid(&eq, &zero, &spec, None).unwrap().max, 0.0);
    }

    #[test]
    fn coarse_grid_rejected() {
        let eq = HeatEquation::fractional(1);
        let g = GridFunction::from_fn(Axis::time(1.0, 10).unwrap(), vec![Axis::new(0.0, 1.0, 20).unwrap()], |_, _| 1.0)
            .unwrap();
        assert!(residual_on_grid(&eq, &g, &FracDerivSpec::left(0.5).unwrap(), None).is_err());
    }

    #[test]
    fn heat_kernel_integer_residual() {
        let eq = HeatEquation::integer(1);
        let spec = FracDerivSpec::left(1.0).unwrap();
        let f = |t: f64, x: &[f64]| (-(x[0] * x[0]) / (4.0 * (t + 0.5))).exp() / (t + 0.5).sqrt();
        let mut prev = f64::INFINITY;
        for k in [100, 200, 400] {
            let g = GridFunction::from_fn(Axis::time(1.0, k).unwrap(), vec![Axis::new(-2.0, 2.0, 81).unwrap()], f)
                .unwrap();
            let r = residual_on_grid(&eq, &g, &spec, None).unwrap();
            assert!(r.interior_max < prev);
            prev = r.interior_max;
        }
        assert!(prev < 1e-2);
    }

    #[test]
    fn identity_transformation_changes_nothing() {
        use crate::catalog::generators;
        use crate::prolong::exponentiate_catalog;
        let eq = HeatEquation::fractional(1);
        let gens = generators(&eq).unwrap();
        let tr = exponentiate_catalog(&gens[1], 0.0, 0.5).unwrap();
        let t = Axis::time(1.0, 200).unwrap();
        let x = vec![Axis::new(-1.0, 1.0, 21).unwrap()];
        let spec = FracDerivSpec::left(0.5).unwrap();
        let f = eigen(0.5, 1.0);
        let rep = invariance_check(&eq, &f, &tr, &t, &x, &spec, None).unwrap();
        assert_eq!(rep.base, rep.transformed);
        assert!(rep.passed);
    }
}
