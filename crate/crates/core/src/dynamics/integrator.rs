//! Fixed-step integration of `ẏ = f(y)` on flat real state vectors.

// Unused whenever std is linked and its inherent f64 methods take over.
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{IntegratorConfig, Scheme};
use crate::error::{Error, Result};

const MIDPOINT_MAX_ITER: usize = 100;

pub(crate) struct Stepper {
    scheme: Scheme,
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Stepper {
    pub(crate) fn new(scheme: Scheme, dim: usize) -> Self {
        Stepper { scheme, k: [vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]], tmp: vec![0.0; dim] }
    }

    /// Advances `y` by `h`. `t` is the time at the start of the step.
    pub(crate) fn step<F>(&mut self, y: &mut [f64], t: f64, h: f64, rhs: &mut F) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    {
        match self.scheme {
            Scheme::RungeKutta4 => self.rk4(y, t, h, rhs),
            Scheme::Midpoint => self.implicit_midpoint(y, t, h, rhs),
        }
    }

    fn rk4<F>(&mut self, y: &mut [f64], t: f64, h: f64, rhs: &mut F) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    {
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        rhs(t, y, k1)?;
        axpy_into(tmp, y, 0.5 * h, k1);
        rhs(t + 0.5 * h, tmp, k2)?;
        axpy_into(tmp, y, 0.5 * h, k2);
        rhs(t + 0.5 * h, tmp, k3)?;
        axpy_into(tmp, y, h, k3);
        rhs(t + h, tmp, k4)?;
        let w = h / 6.0;
        for i in 0..y.len() {
            y[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        Ok(())
    }

    /// `y' = y + h f((y + y')/2)`, solved by fixed-point iteration on the slope.
    fn implicit_midpoint<F>(&mut self, y: &mut [f64], t: f64, h: f64, rhs: &mut F) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    {
        let [slope, next, _, _] = &mut self.k;
        let mid = &mut self.tmp;
        rhs(t, y, slope)?;
        let scale = 1.0 + y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for _ in 0..MIDPOINT_MAX_ITER {
            axpy_into(mid, y, 0.5 * h, slope);
            rhs(t + 0.5 * h, mid, next)?;
            let change = slope.iter().zip(next.iter()).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            slope.copy_from_slice(next);
            if h * change <= 1e-14 * scale {
                for i in 0..y.len() {
                    y[i] += h * slope[i];
                }
                return Ok(());
            }
        }
        Err(Error::StepTooLarge { t })
    }
}

/// `out = y + a x`.
fn axpy_into(out: &mut [f64], y: &[f64], a: f64, x: &[f64]) {
    for ((o, &yi), &xi) in out.iter_mut().zip(y).zip(x) {
        *o = yi + a * xi;
    }
}

/// Uniform sampling grid `t_k = k t_final / (n_samples − 1)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TimeGrid {
    pub t_final: f64,
    pub n_samples: usize,
}

impl TimeGrid {
    pub(crate) fn new(t_final: f64, n_samples: usize) -> Result<Self> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::InvalidParameter("t_final must be positive and finite"));
        }
        if n_samples < 2 {
            return Err(Error::InvalidParameter("n_samples must be at least 2"));
        }
        Ok(TimeGrid { t_final, n_samples })
    }

    pub(crate) fn time(&self, k: usize) -> f64 {
        if k + 1 == self.n_samples {
            self.t_final
        } else {
            self.t_final * k as f64 / (self.n_samples - 1) as f64
        }
    }

    pub(crate) fn sample_interval(&self) -> f64 {
        self.t_final / (self.n_samples - 1) as f64
    }
}

/// Integrates from the grid's first to last sample, calling `observe` at
/// every sample (including `t = 0`). The step actually taken is the
/// largest value not exceeding `config.step` that divides the sample
/// interval evenly.
pub(crate) fn drive<R, O>(
    y: &mut [f64],
    grid: TimeGrid,
    config: &IntegratorConfig,
    mut rhs: R,
    mut observe: O,
) -> Result<()>
where
    R: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    O: FnMut(usize, f64, &[f64]) -> Result<()>,
{
    config.validate()?;
    let interval = grid.sample_interval();
    let substeps = (interval / config.step * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let h = interval / substeps as f64;
    let mut stepper = Stepper::new(config.scheme, y.len());
    observe(0, 0.0, y)?;
    for k in 1..grid.n_samples {
        let t0 = grid.time(k - 1);
        for s in 0..substeps {
            stepper.step(y, t0 + s as f64 * h, h, &mut rhs)?;
        }
        observe(k, grid.time(k), y)?;
    }
    Ok(())
}
