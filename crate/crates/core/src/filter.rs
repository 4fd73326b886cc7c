//! Trapezoidal discretization of the Cauchy projector on a circle.

use std::f64::consts::PI;

use crate::{Error, Result, C64};

/// Search region: the closed disk of the given center and radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub center: C64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: C64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.re.is_finite() || !center.im.is_finite() {
            return Err(Error::InvalidRadius(radius));
        }
        Ok(Disk { center, radius })
    }

    pub fn unit() -> Self {
        Disk { center: C64::new(0.0, 0.0), radius: 1.0 }
    }

    pub fn contains(&self, z: C64) -> bool {
        (z - self.center).norm() <= self.radius
    }
}

/// Poles and weights of `rho(z) = sum_j w_j / (z - z_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub disk: Disk,
    /// Phase offset in units of `2 pi / N`: `theta_j = 2 pi (j + offset) / N`.
    pub offset: f64,
    pub poles: Vec<C64>,
    pub weights: Vec<C64>,
}

/// Midpoint phases: `theta_j = 2 pi (j - 1/2) / N` for `j = 1..N`.
pub const MIDPOINT_OFFSET: f64 = 0.5;

/// Trapezoidal rule of order `n` with midpoint phases.
pub fn trapezoidal_rule(disk: Disk, n: usize) -> Result<QuadratureRule> {
    trapezoidal_rule_with_offset(disk, n, MIDPOINT_OFFSET)
}

/// Trapezoidal rule with `theta_j = 2 pi (j + offset) / N`, `j = 0..N-1`.
/// `offset = 0` puts the poles on the scaled roots of unity.
pub fn trapezoidal_rule_with_offset(disk: Disk, n: usize, offset: f64) -> Result<QuadratureRule> {
    if n < 2 {
        return Err(Error::InvalidOrder(n));
    }
    let disk = Disk::new(disk.center, disk.radius)?;
    let mut poles = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for j in 0..n {
        let theta = 2.0 * PI * (j as f64 + offset) / n as f64;
        let e = C64::from_polar(1.0, theta);
        poles.push(disk.center + e * disk.radius);
        weights.push(-e * (disk.radius / n as f64));
    }
    Ok(QuadratureRule { disk, offset, poles, weights })
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.poles.len()
    }

    /// Same rule with every phase advanced by `pi / (4 N)`.
    pub fn rotated(&self) -> Self {
        trapezoidal_rule_with_offset(self.disk, self.order(), self.offset + 0.125)
            .expect("valid rule stays valid")
    }

    /// `rho(z)`; errors when `z` is within `1e-14 r` of a pole.
    pub fn rho(&self, z: C64) -> Result<C64> {
        let mut s = C64::new(0.0, 0.0);
        for (j, (&p, &w)) in self.poles.iter().zip(&self.weights).enumerate() {
            let d = z - p;
            if d.norm() < 1e-14 * self.disk.radius {
                return Err(Error::PoleHit(j));
            }
            s += w / d;
        }
        Ok(s)
    }
}

/// `rho(z)` for the given rule.
pub fn rho_eval(rule: &QuadratureRule, z: C64) -> Result<C64> {
    rule.rho(z)
}

/// Rectangle `[x0, x1] × [y0, y1]` sampled at `nx × ny` points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
}

/// `(x, y, |rho(x + iy)|)`, row-major in `y` then `x`. Points within
/// `1e-14 r` of a pole carry `+inf`.
pub fn filter_grid(rule: &QuadratureRule, grid: &Grid) -> Result<Vec<(f64, f64, f64)>> {
    if grid.nx < 2 || grid.ny < 2 {
        return Err(Error::InvalidConfig(format!("grid resolution {}x{} below 2", grid.nx, grid.ny)));
    }
    let mut out = Vec::with_capacity(grid.nx * grid.ny);
    for iy in 0..grid.ny {
        let y = grid.y0 + (grid.y1 - grid.y0) * iy as f64 / (grid.ny - 1) as f64;
        for ix in 0..grid.nx {
            let x = grid.x0 + (grid.x1 - grid.x0) * ix as f64 / (grid.nx - 1) as f64;
            let v = match rule.rho(C64::new(x, y)) {
                Ok(r) => r.norm(),
                Err(Error::PoleHit(_)) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            out.push((x, y, v));
        }
    }
    Ok(out)
}
