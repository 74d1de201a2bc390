//! Uniform 1-D grids, sampled complex fields and the trigonometric-sum
//! kernels used to synthesize them.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x0: f64,
    pub x1: f64,
    pub n_points: usize,
}

impl GridSpec {
    /// `n_points == 1` is a single sample at `x0` and requires `x1 == x0`.
    pub fn new(x0: f64, x1: f64, n_points: usize) -> Result<Self> {
        if !(x0.is_finite() && x1.is_finite()) {
            return Err(Error::invalid("grid endpoints must be finite"));
        }
        match n_points {
            0 => Err(Error::invalid("grid needs at least one point")),
            1 if x1 != x0 => Err(Error::invalid("single-point grid needs x1 == x0")),
            1 => Ok(GridSpec { x0, x1, n_points }),
            _ if !(x1 > x0) => Err(Error::invalid("grid needs x1 > x0")),
            _ => Ok(GridSpec { x0, x1, n_points }),
        }
    }

    pub fn unit(n_points: usize) -> Result<Self> {
        Self::new(0.0, 1.0, n_points)
    }

    pub fn spacing(&self) -> f64 {
        if self.n_points < 2 {
            0.0
        } else {
            (self.x1 - self.x0) / (self.n_points - 1) as f64
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    /// Trapezoid weights.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let h = self.spacing();
        let mut w = vec![h; self.n_points];
        if self.n_points >= 2 {
            w[0] *= 0.5;
            w[self.n_points - 1] *= 0.5;
        } else {
            w[0] = 1.0;
        }
        w
    }
}

/// Complex samples of a field on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

impl GridField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points {
            return Err(Error::invalid(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.n_points
            )));
        }
        Ok(GridField { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.points().into_iter().map(f).collect();
        GridField { grid, values }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        GridField { grid, values: vec![Complex64::new(0.0, 0.0); grid.n_points] }
    }

    pub fn n_points(&self) -> usize {
        self.grid.n_points
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let values = self.values.iter().enumerate().map(|(i, &v)| f(self.grid.x(i), v)).collect();
        GridField { grid: self.grid, values }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|_, v| v * c)
    }

    /// Trapezoid integral of the samples.
    pub fn integral(&self) -> Complex64 {
        self.grid.trapezoid_weights().iter().zip(&self.values).map(|(w, v)| v * w).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,re,im\n");
        for (i, v) in self.values.iter().enumerate() {
            writeln!(s, "{},{},{}", self.grid.x(i), v.re, v.im).unwrap();
        }
        s
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    /// Parse the `x,re,im` format; the x column must describe a uniform grid.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::invalid("empty field CSV"))??;
        if header.trim() != "x,re,im" {
            return Err(Error::invalid(format!("unexpected header {header:?}")));
        }
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|e| {
                    Error::invalid(format!("line {}: {e}", lineno + 2))
                })
            };
            if cols.len() != 3 {
                return Err(Error::invalid(format!("line {}: expected 3 columns", lineno + 2)));
            }
            xs.push(parse(cols[0])?);
            values.push(Complex64::new(parse(cols[1])?, parse(cols[2])?));
        }
        let n = xs.len();
        if n == 0 {
            return Err(Error::invalid("field CSV has no rows"));
        }
        let grid = GridSpec::new(xs[0], xs[n - 1], n)?;
        for (i, &x) in xs.iter().enumerate() {
            if (x - grid.x(i)).abs() > 1e-9 * (1.0 + x.abs()) {
                return Err(Error::invalid("x column is not a uniform grid"));
            }
        }
        GridField::new(grid, values)
    }
}

/// Table of e^{i j dφ}, j < len, built by doubling so rounding stays O(log len).
fn rotation_table(dphi: f64, len: usize) -> (Vec<f64>, Vec<f64>) {
    let mut re = vec![0.0; len];
    let mut im = vec![0.0; len];
    if len == 0 {
        return (re, im);
    }
    re[0] = 1.0;
    let mut filled = 1;
    while filled < len {
        let (s, c) = (dphi * filled as f64).sin_cos();
        let take = filled.min(len - filled);
        for j in 0..take {
            re[filled + j] = re[j] * c - im[j] * s;
            im[filled + j] = re[j] * s + im[j] * c;
        }
        filled += take;
    }
    (re, im)
}

const BLOCK: usize = 64;

/// Terms r_k e^{i(ψ_k − ω_k x)} evaluated on a uniform grid.
///
/// Calls `visit(k, re, im)` once per term with the term's values on the grid.
fn for_each_term_on_grid(
    amp: &[f64],
    phase: &[f64],
    freq: &[f64],
    grid: &GridSpec,
    mut visit: impl FnMut(usize, &[f64], &[f64]),
) {
    let n = grid.n_points;
    let h = grid.spacing();
    let blk = n.min(BLOCK);
    let mut zr = vec![0.0; n];
    let mut zi = vec![0.0; n];
    for k in 0..amp.len() {
        let (rr, ri) = rotation_table(-freq[k] * h, blk);
        let mut start = 0;
        while start < n {
            let len = blk.min(n - start);
            let (s, c) = (phase[k] - freq[k] * grid.x(start)).sin_cos();
            let (wr, wi) = (amp[k] * c, amp[k] * s);
            for j in 0..len {
                zr[start + j] = wr * rr[j] - wi * ri[j];
                zi[start + j] = wr * ri[j] + wi * rr[j];
            }
            start += len;
        }
        visit(k, &zr, &zi);
    }
}

/// Σ_k c_k e^{−i ω_k x} on a uniform grid.
pub fn exp_sum_on_grid(coef: &[Complex64], freq: &[f64], grid: &GridSpec) -> Vec<Complex64> {
    let amp: Vec<f64> = coef.iter().map(|c| c.norm()).collect();
    let phase: Vec<f64> = coef.iter().map(|c| c.arg()).collect();
    let mut sr = vec![0.0; grid.n_points];
    let mut si = vec![0.0; grid.n_points];
    for_each_term_on_grid(&amp, &phase, freq, grid, |_, zr, zi| {
        for i in 0..zr.len() {
            sr[i] += zr[i];
            si[i] += zi[i];
        }
    });
    sr.into_iter().zip(si).map(|(r, i)| Complex64::new(r, i)).collect()
}

/// −Σ_k Log(1 − r_k e^{i(ψ_k − ω_k x)}) on a uniform grid, r_k < 1.
///
/// Factors are multiplied in chunks whose summed bound −Σ log(1 − r_k) stays
/// below 3, so the principal log of each chunk product equals the sum of the
/// factorwise principal logs.
pub fn euler_log_on_grid(amp: &[f64], phase: &[f64], freq: &[f64], grid: &GridSpec) -> Vec<Complex64> {
    const CHUNK_BOUND: f64 = 3.0;
    let n = grid.n_points;
    let mut pr = vec![1.0; n];
    let mut pi = vec![0.0; n];
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let mut budget = 0.0;
    let flush = |pr: &mut [f64], pi: &mut [f64], out: &mut [Complex64]| {
        for i in 0..n {
            out[i] -= Complex64::new(pr[i], pi[i]).ln();
            pr[i] = 1.0;
            pi[i] = 0.0;
        }
    };
    let count = amp.len();
    for_each_term_on_grid(amp, phase, freq, grid, |k, zr, zi| {
        let bound = -(1.0 - amp[k]).ln();
        if budget + bound > CHUNK_BOUND {
            flush(&mut pr, &mut pi, &mut out);
            budget = 0.0;
        }
        budget += bound;
        for i in 0..n {
            let fr = 1.0 - zr[i];
            let fi = -zi[i];
            let r = pr[i] * fr - pi[i] * fi;
            pi[i] = pr[i] * fi + pi[i] * fr;
            pr[i] = r;
        }
        if k + 1 == count {
            flush(&mut pr, &mut pi, &mut out);
        }
    });
    out
}

const STENCIL: usize = 12;

/// Local Lagrange interpolation of samples on `coarse` at the points of `fine`.
pub fn interpolate(coarse: &GridSpec, values: &[Complex64], fine: &GridSpec) -> Vec<Complex64> {
    let nc = coarse.n_points;
    let m = STENCIL.min(nc);
    let h = coarse.spacing();
    // Barycentric weights of m equispaced nodes: (−1)^j C(m−1, j).
    let mut bw = vec![1.0; m];
    for j in 1..m {
        bw[j] = -bw[j - 1] * (m - j) as f64 / j as f64;
    }
    (0..fine.n_points)
        .map(|i| {
            let x = fine.x(i);
            let t = (x - coarse.x0) / h;
            let centre = t.floor() as isize - (m as isize) / 2 + 1;
            let first = centre.clamp(0, (nc - m) as isize) as usize;
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = 0.0;
            for j in 0..m {
                let d = t - (first + j) as f64;
                if d.abs() < 1e-13 {
                    return values[first + j];
                }
                let w = bw[j] / d;
                num += values[first + j] * w;
                den += w;
            }
            num / den
        })
        .collect()
}

/// Coarse grid over the same interval that resolves angular frequencies up to
/// `omega` with at least ~40 samples per period, or None when it would not be
/// coarser than `grid`.
pub fn coarse_for_bandwidth(grid: &GridSpec, omega: f64) -> Option<GridSpec> {
    if grid.n_points < 2 {
        return None;
    }
    let len = grid.x1 - grid.x0;
    let h = (0.15 / omega.max(1e-300)).min(0.1);
    let n = ((len / h).ceil() as usize + 1).max(24);
    if n >= grid.n_points {
        None
    } else {
        Some(GridSpec { x0: grid.x0, x1: grid.x1, n_points: n })
    }
}
