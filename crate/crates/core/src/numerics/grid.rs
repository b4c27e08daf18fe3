//! Sampled functions on uniform tensor grids over `(t, x_1..x_n)`.
//!
//! Values are stored row-major with `t` slowest. Two file formats:
//!
//! * CSV with header `t,x1,...,xn,value`, one row per node;
//! * binary: the 7 bytes `FHGRID1`, one byte `d` (number of axes, `t`
//!   first), then per axis `start: f64`, `step: f64`, `len: u64`, then the
//!   values as `f64`, all little-endian.

use std::io::{BufRead, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

const MAGIC: &[u8; 7] = b"FHGRID1";
const MIN_POINTS: usize = 2;

/// `start + i·step` for `i = 0..len`.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl Axis {
    /// `len` nodes covering `[start, end]`.
    pub fn new(start: f64, end: f64, len: usize) -> Result<Self> {
        if len < MIN_POINTS || !(end > start) || !start.is_finite() || !end.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "axis [{start}, {end}] with {len} nodes"
            )));
        }
        Ok(Axis {
            start,
            step: (end - start) / (len - 1) as f64,
            len,
        })
    }

    /// `[0, T]` split into `k` steps.
    pub fn time(t_end: f64, k: usize) -> Result<Self> {
        Axis::new(0.0, t_end, k + 1)
    }

    pub fn value(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.value(self.len - 1)
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.value(i)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    t: Axis,
    x: Vec<Axis>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(t: Axis, x: Vec<Axis>, values: Vec<f64>) -> Result<Self> {
        let expected = x.iter().fold(t.len, |acc, a| acc * a.len);
        if values.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a grid of {expected} nodes",
                values.len()
            )));
        }
        if t.len < MIN_POINTS || x.iter().any(|a| a.len < MIN_POINTS) {
            return Err(Error::InvalidArgument("every axis needs at least two nodes".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("grid value #{i}")));
        }
        Ok(GridFunction { t, x, values })
    }

    /// Sample `f(t, x)`. A non-finite value on the slice `t = 0` (where the
    /// singular solutions blow up) is stored as 0; the corrected derivative
    /// schemes never read it.
    pub fn from_fn(t: Axis, x: Vec<Axis>, f: impl Fn(f64, &[f64]) -> f64 + Sync) -> Result<Self> {
        use rayon::prelude::*;
        let m: usize = x.iter().map(|a| a.len).product();
        let values: Vec<f64> = (0..t.len * m)
            .into_par_iter()
            .map(|idx| {
                let (k, s) = (idx / m, idx % m);
                let tv = t.value(k);
                let pt = space_point(&x, s);
                let v = f(tv, &pt);
                if !v.is_finite() && k == 0 && tv == 0.0 {
                    0.0
                } else {
                    v
                }
            })
            .collect();
        GridFunction::new(t, x, values)
    }

    pub fn t_axis(&self) -> &Axis {
        &self.t
    }

    pub fn x_axes(&self) -> &[Axis] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Number of spatial nodes (1 for a function of `t` alone).
    pub fn space_points(&self) -> usize {
        self.x.iter().map(|a| a.len).product()
    }

    /// Coordinates of spatial node `s`.
    pub fn space_point(&self, s: usize) -> Vec<f64> {
        space_point(&self.x, s)
    }

    /// Flat spatial index of a multi-index.
    pub fn space_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.x).fold(0, |acc, (i, a)| acc * a.len + i)
    }

    pub fn get(&self, k: usize, s: usize) -> f64 {
        self.values[k * self.space_points() + s]
    }

    pub fn time_series(&self, s: usize) -> Vec<f64> {
        let m = self.space_points();
        (0..self.t.len).map(|k| self.values[k * m + s]).collect()
    }

    /// Linear interpolation in `t` of a function of `t` alone.
    pub fn interp_time(&self, t: f64) -> Result<f64> {
        if !self.x.is_empty() {
            return Err(Error::InvalidArgument("interp_time needs a function of t alone".into()));
        }
        let pos = (t - self.t.start) / self.t.step;
        if !(pos >= -1e-9 && pos <= (self.t.len - 1) as f64 + 1e-9) {
            return Err(Error::InvalidArgument(format!("t = {t} outside the grid")));
        }
        let pos = pos.clamp(0.0, (self.t.len - 1) as f64);
        let i = (pos.floor() as usize).min(self.t.len - 2);
        let w = pos - i as f64;
        Ok(self.values[i] * (1.0 - w) + self.values[i + 1] * w)
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.dim()).map(|i| format!("x{i}")));
        header.push("value".into());
        writeln!(w, "{}", header.join(","))?;
        let m = self.space_points();
        for k in 0..self.t.len {
            for s in 0..m {
                let mut row = vec![format!("{:?}", self.t.value(k))];
                row.extend(self.space_point(s).iter().map(|v| format!("{v:?}")));
                row.push(format!("{:?}", self.values[k * m + s]));
                writeln!(w, "{}", row.join(","))?;
            }
        }
        Ok(())
    }

    pub fn read_csv(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty CSV".into()))??;
        let cols: Vec<&str> = header.trim().split(',').collect();
        if cols.len() < 2 || cols[0] != "t" || cols[cols.len() - 1] != "value" {
            return Err(Error::Format(format!("CSV header `{header}`")));
        }
        let ncoord = cols.len() - 1;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (ln, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Format(format!("CSV line {}: {e}", ln + 2)))?;
            if row.len() != cols.len() {
                return Err(Error::Format(format!("CSV line {}: expected {} fields", ln + 2, cols.len())));
            }
            rows.push(row);
        }
        let mut axes = Vec::with_capacity(ncoord);
        for c in 0..ncoord {
            let mut vals: Vec<f64> = rows.iter().map(|r| r[c]).collect();
            vals.sort_by(f64::total_cmp);
            vals.dedup();
            axes.push(axis_from_nodes(&vals)?);
        }
        let t = axes.remove(0);
        let g = GridFunction {
            t,
            x: axes,
            values: Vec::new(),
        };
        let m = g.space_points();
        let total = g.t.len * m;
        if rows.len() != total {
            return Err(Error::Format(format!("CSV has {} rows for {total} nodes", rows.len())));
        }
        let mut values = vec![f64::NAN; total];
        for r in &rows {
            let k = node_index(&g.t, r[0])?;
            let mut idx = Vec::with_capacity(ncoord - 1);
            for (a, v) in g.x.iter().zip(&r[1..ncoord]) {
                idx.push(node_index(a, *v)?);
            }
            values[k * m + g.space_index(&idx)] = r[ncoord];
        }
        GridFunction::new(g.t, g.x, values)
    }

    pub fn write_binary(&self, mut w: impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&[(self.dim() + 1) as u8])?;
        for a in std::iter::once(&self.t).chain(&self.x) {
            w.write_all(&a.start.to_le_bytes())?;
            w.write_all(&a.step.to_le_bytes())?;
            w.write_all(&(a.len as u64).to_le_bytes())?;
        }
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 7];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("missing FHGRID1 header".into()));
        }
        let mut d = [0u8; 1];
        r.read_exact(&mut d)?;
        if d[0] == 0 {
            return Err(Error::Format("grid with no axes".into()));
        }
        let mut f8 = [0u8; 8];
        let mut axes = Vec::with_capacity(d[0] as usize);
        for _ in 0..d[0] {
            r.read_exact(&mut f8)?;
            let start = f64::from_le_bytes(f8);
            r.read_exact(&mut f8)?;
            let step = f64::from_le_bytes(f8);
            r.read_exact(&mut f8)?;
            let len = u64::from_le_bytes(f8) as usize;
            if !(step > 0.0) || !start.is_finite() {
                return Err(Error::Format("bad axis in binary grid".into()));
            }
            axes.push(Axis { start, step, len });
        }
        let total = axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.len));
        let total = total.ok_or_else(|| Error::Format("grid too large".into()))?;
        let mut values = Vec::with_capacity(total.min(1 << 24));
        for _ in 0..total {
            r.read_exact(&mut f8)?;
            values.push(f64::from_le_bytes(f8));
        }
        let t = axes.remove(0);
        GridFunction::new(t, axes, values)
    }

    /// Save by extension: `.csv` as CSV, anything else binary.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        if is_csv(path) {
            self.write_csv(file)
        } else {
            self.write_binary(file)
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        if is_csv(path) {
            GridFunction::read_csv(file)
        } else {
            GridFunction::read_binary(file)
        }
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn space_point(x: &[Axis], mut s: usize) -> Vec<f64> {
    let mut pt = vec![0.0; x.len()];
    for (i, a) in x.iter().enumerate().rev() {
        pt[i] = a.value(s % a.len);
        s /= a.len;
    }
    pt
}

fn axis_from_nodes(v: &[f64]) -> Result<Axis> {
    if v.len() < MIN_POINTS {
        return Err(Error::Format("axis with fewer than two nodes".into()));
    }
    let step = (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64;
    for (i, x) in v.iter().enumerate() {
        if (x - (v[0] + i as f64 * step)).abs() > 1e-9 * step.abs().max(1.0) {
            return Err(Error::Format("nonuniform grid axis".into()));
        }
    }
    Ok(Axis {
        start: v[0],
        step,
        len: v.len(),
    })
}

fn node_index(a: &Axis, v: f64) -> Result<usize> {
    let pos = ((v - a.start) / a.step).round();
    if pos < 0.0 || pos as usize >= a.len {
        return Err(Error::Format(format!("coordinate {v} off the axis")));
    }
    Ok(pos as usize)
}
