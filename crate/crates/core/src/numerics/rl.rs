//! Left and right Riemann–Liouville derivatives on uniform grids.
//!
//! Both schemes use a Lubich-type starting correction: the sample at the
//! singular end point is dropped and a few starting weights are fitted so
//! that `t^σ` is differentiated exactly for each `σ` in
//! [`FracDerivSpec::starting`]. The default `{α−1, 2α−1}` covers the two
//! leading terms of the singular solutions `t^{α−1} E_{α,α}(·)`, for which
//! the uncorrected sums converge only like `h^α`.

use rayon::prelude::*;

use super::grid::GridFunction;
use super::special::{power_rule, rgamma};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Grünwald–Letnikov binomial weights
    Gl,
    /// piecewise-linear (L1) product integration
    L1,
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gl" => Ok(Scheme::Gl),
            "l1" => Ok(Scheme::L1),
            _ => Err(Error::InvalidArgument(format!("unknown scheme `{s}` (gl or l1)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// from 0 up to t
    Left,
    /// from t up to T
    Right,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FracDerivSpec {
    pub alpha: f64,
    /// smallest integer `≥ α`
    pub m: u32,
    pub scheme: Scheme,
    pub direction: Direction,
    /// exponents reproduced exactly by the starting correction
    pub starting: Vec<f64>,
}

impl FracDerivSpec {
    /// `α ∈ (0, 1]`; `α = 1` gives the first difference.
    pub fn new(alpha: f64, scheme: Scheme, direction: Direction) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidArgument(format!("alpha = {alpha} outside (0, 1]")));
        }
        let starting = if alpha < 1.0 {
            vec![alpha - 1.0, 2.0 * alpha - 1.0]
        } else {
            Vec::new()
        };
        Ok(FracDerivSpec {
            alpha,
            m: 1,
            scheme,
            direction,
            starting,
        })
    }

    pub fn left(alpha: f64) -> Result<Self> {
        FracDerivSpec::new(alpha, Scheme::Gl, Direction::Left)
    }

    pub fn right(alpha: f64) -> Result<Self> {
        FracDerivSpec::new(alpha, Scheme::Gl, Direction::Right)
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn with_starting(mut self, exps: Vec<f64>) -> Self {
        self.starting = exps;
        self
    }

    /// Uncorrected sums, using the sample at the end point.
    pub fn plain(self) -> Self {
        self.with_starting(Vec::new())
    }
}

/// `w_0 = 1`, `w_j = w_{j−1}(1 − (α+1)/j)` for `j = 1..=count`.
pub fn gl_weights(alpha: f64, count: usize) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} outside (0, 1)")));
    }
    Ok(binomial_weights(alpha, count))
}

fn binomial_weights(alpha: f64, count: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(count + 1);
    w.push(1.0);
    for j in 1..=count {
        let prev = w[j - 1];
        w.push(prev * (1.0 - (alpha + 1.0) / j as f64));
    }
    w
}

/// A left derivative operator prepared for a fixed grid.
#[derive(Clone, Debug)]
pub struct RlOperator {
    alpha: f64,
    h: f64,
    k: usize,
    scheme: Scheme,
    weights: Vec<f64>,
    starting: Vec<f64>,
    start_w: Vec<Vec<f64>>,
}

impl RlOperator {
    /// Operator on the nodes `t_j = j h`, `j = 0..=k`.
    pub fn new(spec: &FracDerivSpec, h: f64, k: usize) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid step {h} must be positive")));
        }
        if spec.starting.len() > k {
            return Err(Error::InvalidArgument(format!(
                "{} starting exponents need at least as many grid steps, got {k}",
                spec.starting.len()
            )));
        }
        let alpha = spec.alpha;
        let weights = match spec.scheme {
            Scheme::Gl => binomial_weights(alpha, k),
            Scheme::L1 => (0..k)
                .map(|j| ((j + 1) as f64).powf(1.0 - alpha) - (j as f64).powf(1.0 - alpha))
                .collect(),
        };
        let mut op = RlOperator {
            alpha,
            h,
            k,
            scheme: spec.scheme,
            weights,
            starting: spec.starting.clone(),
            start_w: Vec::new(),
        };
        op.fit_starting_weights()?;
        Ok(op)
    }

    fn corrected(&self) -> bool {
        !self.starting.is_empty()
    }

    fn raw(&self, f: &[f64]) -> Vec<f64> {
        let (k, h, a) = (self.k, self.h, self.alpha);
        let f0 = if self.corrected() { 0.0 } else { f[0] };
        let at = |j: usize| if j == 0 { f0 } else { f[j] };
        let scale = h.powf(-a);
        let mut out = vec![0.0; k + 1];
        match self.scheme {
            Scheme::Gl => {
                for (n, o) in out.iter_mut().enumerate() {
                    let mut s = 0.0;
                    for j in 0..=n {
                        s += self.weights[j] * at(n - j);
                    }
                    *o = scale * s;
                }
            }
            Scheme::L1 => {
                let c = scale * rgamma(2.0 - a);
                let c0 = rgamma(1.0 - a);
                for (n, o) in out.iter_mut().enumerate().skip(1) {
                    let mut s = 0.0;
                    for j in 0..n {
                        s += self.weights[j] * (at(n - j) - at(n - j - 1));
                    }
                    *o = c * s + f0 * c0 * (n as f64 * h).powf(-a);
                }
            }
        }
        out
    }

    fn fit_starting_weights(&mut self) -> Result<()> {
        let s = self.starting.len();
        if s == 0 {
            return Ok(());
        }
        let t = |j: usize| j as f64 * self.h;
        // a[r][i] = t_{i+1}^{σ_r}
        let a: Vec<Vec<f64>> = self
            .starting
            .iter()
            .map(|&sg| (1..=s).map(|i| t(i).powf(sg)).collect())
            .collect();
        let mut defects = Vec::with_capacity(s);
        for &sg in &self.starting {
            let g: Vec<f64> = (0..=self.k)
                .map(|j| if j == 0 { 0.0 } else { t(j).powf(sg) })
                .collect();
            let r = self.raw(&g);
            defects.push(
                (0..=self.k)
                    .map(|n| if n == 0 { 0.0 } else { power_rule(sg, self.alpha, t(n)) - r[n] })
                    .collect::<Vec<f64>>(),
            );
        }
        let lu = Lu::new(a).ok_or_else(|| {
            Error::InvalidArgument(format!("starting exponents {:?} are not distinct", self.starting))
        })?;
        self.start_w = (0..=self.k)
            .map(|n| {
                if n == 0 {
                    vec![0.0; s]
                } else {
                    lu.solve(&defects.iter().map(|d| d[n]).collect::<Vec<_>>())
                }
            })
            .collect();
        Ok(())
    }

    /// `D^α f` at every node; the value at `t = 0` is reported as 0.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.k + 1 {
            return Err(Error::DimensionMismatch(format!(
                "series of length {} on an operator for {} nodes",
                f.len(),
                self.k + 1
            )));
        }
        let mut out = self.raw(f);
        if self.corrected() {
            for (n, o) in out.iter_mut().enumerate().skip(1) {
                for (i, w) in self.start_w[n].iter().enumerate() {
                    *o += w * f[i + 1];
                }
            }
        }
        out[0] = 0.0;
        Ok(out)
    }

    /// Right derivative by reflection `t ↦ T − t`.
    pub fn apply_right(&self, f: &[f64]) -> Result<Vec<f64>> {
        let rev: Vec<f64> = f.iter().rev().copied().collect();
        let mut out = self.apply(&rev)?;
        out.reverse();
        Ok(out)
    }
}

/// Dense LU with partial pivoting for the small starting systems.
struct Lu {
    a: Vec<Vec<f64>>,
    piv: Vec<usize>,
}

impl Lu {
    fn new(mut a: Vec<Vec<f64>>) -> Option<Self> {
        let n = a.len();
        let mut piv: Vec<usize> = (0..n).collect();
        for c in 0..n {
            let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
            if a[p][c].abs() < 1e-300 {
                return None;
            }
            a.swap(c, p);
            piv.swap(c, p);
            for r in c + 1..n {
                let m = a[r][c] / a[c][c];
                a[r][c] = m;
                for k in c + 1..n {
                    a[r][k] -= m * a[c][k];
                }
            }
        }
        Some(Lu { a, piv })
    }

    /// Solves `A w = b`.
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.a.len();
        let mut y: Vec<f64> = self.piv.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            for c in 0..r {
                y[r] -= self.a[r][c] * y[c];
            }
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                y[r] -= self.a[r][c] * y[c];
            }
            y[r] /= self.a[r][r];
        }
        y
    }
}

/// Grünwald–Letnikov value at the last node `t_n = n h` of a series
/// sampled at `t_j = j h`. `order > 0` is a derivative, `order < 0` the
/// integral `₀I^{−order}`. The sample at `t = 0` is ignored and replaced by
/// starting weights exact for `t^σ`, `σ ∈ starting`; only this node is
/// formed, so the cost is `O(n)`.
pub fn gl_at(f: &[f64], order: f64, h: f64, starting: &[f64]) -> Result<f64> {
    if !(order > -1.0 && order < 1.0) || order == 0.0 {
        return Err(Error::InvalidArgument(format!("order {order} outside (-1, 0) and (0, 1)")));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("grid step {h} must be positive")));
    }
    let n = f.len().saturating_sub(1);
    let s = starting.len();
    if n == 0 || s > n {
        return Err(Error::InvalidArgument(format!(
            "{} samples cannot carry {s} starting exponents",
            f.len()
        )));
    }
    let w = binomial_weights(order, n);
    let scale = h.powf(-order);
    let raw = |g: &dyn Fn(usize) -> f64| scale * (0..n).map(|j| w[j] * g(n - j)).sum::<f64>();
    let mut v = raw(&|j| f[j]);
    if s > 0 {
        let t = |j: usize| j as f64 * h;
        let a: Vec<Vec<f64>> = starting
            .iter()
            .map(|&sg| (1..=s).map(|i| t(i).powf(sg)).collect())
            .collect();
        let defects: Vec<f64> = starting
            .iter()
            .map(|&sg| power_rule(sg, order, t(n)) - raw(&|j| t(j).powf(sg)))
            .collect();
        let lu = Lu::new(a)
            .ok_or_else(|| Error::InvalidArgument(format!("starting exponents {starting:?} are not distinct")))?;
        for (i, c) in lu.solve(&defects).iter().enumerate() {
            v += c * f[i + 1];
        }
    }
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite("Grünwald–Letnikov sum".into()))
    }
}

/// Left derivative of a series sampled at `t_j = j h`.
pub fn rl_derivative_series(f: &[f64], h: f64, spec: &FracDerivSpec) -> Result<Vec<f64>> {
    if f.len() < 2 {
        return Err(Error::InvalidArgument("series needs at least two samples".into()));
    }
    RlOperator::new(spec, h, f.len() - 1)?.apply(f)
}

/// Right derivative of a series sampled at `t_j = j h` up to `T`.
pub fn right_rl_derivative_series(f: &[f64], h: f64, spec: &FracDerivSpec) -> Result<Vec<f64>> {
    if f.len() < 2 {
        return Err(Error::InvalidArgument("series needs at least two samples".into()));
    }
    RlOperator::new(spec, h, f.len() - 1)?.apply_right(f)
}

fn along_time(u: &GridFunction, spec: &FracDerivSpec, right: bool) -> Result<GridFunction> {
    let t = u.t_axis();
    if !right && t.start != 0.0 {
        return Err(Error::InvalidArgument(format!(
            "left derivative needs samples from t = 0, grid starts at {}",
            t.start
        )));
    }
    let op = RlOperator::new(spec, t.step, t.len - 1)?;
    let m = u.space_points();
    let cols: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|s| {
            let series = u.time_series(s);
            if right {
                op.apply_right(&series)
            } else {
                op.apply(&series)
            }
        })
        .collect::<Result<_>>()?;
    let mut values = vec![0.0; u.values().len()];
    for (s, col) in cols.iter().enumerate() {
        for (k, v) in col.iter().enumerate() {
            values[k * m + s] = *v;
        }
    }
    GridFunction::new(t.clone(), u.x_axes().to_vec(), values)
}

/// Left RL derivative along `t` at every spatial node.
pub fn rl_derivative_grid(u: &GridFunction, spec: &FracDerivSpec) -> Result<GridFunction> {
    if spec.direction != Direction::Left {
        return Err(Error::InvalidArgument("rl_derivative_grid needs a left spec".into()));
    }
    along_time(u, spec, false)
}

/// Right RL derivative along `t`, mirrored from the end of the grid.
pub fn right_rl_derivative_grid(u: &GridFunction, spec: &FracDerivSpec) -> Result<GridFunction> {
    if spec.direction != Direction::Right {
        return Err(Error::InvalidArgument("right_rl_derivative_grid needs a right spec".into()));
    }
    along_time(u, spec, true)
}
