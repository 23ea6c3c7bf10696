//! Monotone finite-difference solve of the Dirichlet problem on a uniform
//! grid of `[0, 2]²`, used as an independent check of the analytic field.
//!
//! Each interior node is replaced by the value `t` that balances the steepest
//! ascent and descent over a discrete ball of neighbours,
//!
//! ```text
//! max_j (u_j - t) / d_j = max_k (t - u_k) / d_k,
//! ```
//!
//! which is `(max + min) / 2` when all distances are equal. The update is
//! nondecreasing in every neighbour value, so the scheme is monotone.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Potential;
use crate::minimax::PlanePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Init {
    /// The cone `1 - |x - (1, 1)|` clipped to `[0, 1]`.
    LowerBound,
    AllOnes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepOrder {
    /// In-place Gauss–Seidel in row-major order.
    Lexicographic,
    /// Two colour classes by `(i + j) mod 2`; each class is updated from the
    /// values at the start of its half-sweep, in parallel.
    RedBlack,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Nodes per side; odd so that the centre is a node.
    pub n: usize,
    pub stencil_radius: usize,
    pub sweep_tol: f64,
    pub max_sweeps: usize,
    pub init: Init,
    pub order: SweepOrder,
    /// Over-relaxation factor in `(0, 2)`. The fixed point does not depend on
    /// it; only `1` keeps every sweep monotone.
    pub relaxation: f64,
}

impl GridSpec {
    pub fn new(n: usize) -> Self {
        GridSpec { n, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 17 || self.n.is_multiple_of(2) {
            return Err(Error::Policy(format!("grid size must be odd and at least 17, got {}", self.n)));
        }
        if self.stencil_radius < 1 {
            return Err(Error::Policy("stencil radius must be at least 1".into()));
        }
        if !(self.sweep_tol > 0.0) {
            return Err(Error::Policy(format!("sweep_tol must be positive, got {}", self.sweep_tol)));
        }
        if self.max_sweeps == 0 {
            return Err(Error::Policy("max_sweeps must be at least 1".into()));
        }
        if !(self.relaxation > 0.0 && self.relaxation < 2.0) {
            return Err(Error::Policy(format!("relaxation must lie in (0, 2), got {}", self.relaxation)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 / (self.n - 1) as f64
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        2.0 * i as f64 / (self.n - 1) as f64
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n: 101,
            stencil_radius: 3,
            sweep_tol: 1e-10,
            max_sweeps: 1_000_000,
            init: Init::LowerBound,
            order: SweepOrder::Lexicographic,
            relaxation: 1.0,
        }
    }
}

/// The balancing value for neighbours given as `(value, 1 / distance)`,
/// starting the search at `t0`. Exact up to rounding.
pub fn balanced_midpoint(nb: &[(f64, f64)], t0: f64) -> f64 {
    let (mut lo, mut hi) = nb.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(u, _)| (lo.min(u), hi.max(u)));
    if hi <= lo {
        return lo;
    }
    let mut t = t0.clamp(lo, hi);
    for _ in 0..200 {
        let (mut up, mut j) = (f64::NEG_INFINITY, 0);
        let (mut down, mut k) = (f64::NEG_INFINITY, 0);
        for (idx, &(u, w)) in nb.iter().enumerate() {
            let a = (u - t) * w;
            if a > up {
                up = a;
                j = idx;
            }
            let b = (t - u) * w;
            if b > down {
                down = b;
                k = idx;
            }
        }
        let f = up - down;
        if f == 0.0 {
            return t;
        }
        if f > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        // crossing of the two active slopes
        let ((uj, wj), (uk, wk)) = (nb[j], nb[k]);
        let mut next = (wj * uj + wk * uk) / (wj + wk);
        if (next - t).abs() <= 4.0 * f64::EPSILON * t.abs() {
            // rounding-level step: t already balances the active pair
            return t;
        }
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
            if next <= lo || next >= hi {
                return t;
            }
        }
        t = next;
    }
    t
}

/// Grid state and sweeps. Values are row-major with `y` outer.
#[derive(Debug, Clone)]
pub struct DiscreteSolver {
    spec: GridSpec,
    values: Vec<f64>,
    /// `(di, dj, 1 / distance)` over the punctured ball.
    offsets: Vec<(isize, isize, f64)>,
    /// Flat index shifts matching `offsets`, for nodes whose ball is inside.
    shifts: Vec<(isize, f64)>,
    sweeps: usize,
}

impl DiscreteSolver {
    pub fn new(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.n;
        let rad = spec.stencil_radius as isize;
        let mut offsets = Vec::new();
        for dj in -rad..=rad {
            for di in -rad..=rad {
                let rr = di * di + dj * dj;
                if rr > 0 && rr <= rad * rad {
                    offsets.push((di, dj, 1.0 / (rr as f64).sqrt()));
                }
            }
        }
        let mut values = vec![0.0; n * n];
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                values[j * n + i] = match spec.init {
                    Init::AllOnes => 1.0,
                    Init::LowerBound => {
                        let (x, y) = (spec.coordinate(i), spec.coordinate(j));
                        (1.0 - (1.0 - x).hypot(1.0 - y)).clamp(0.0, 1.0)
                    }
                };
            }
        }
        let c = n / 2;
        values[c * n + c] = 1.0;
        let shifts = offsets.iter().map(|&(di, dj, w)| (dj * n as isize + di, w)).collect();
        Ok(DiscreteSolver { spec, values, offsets, shifts, sweeps: 0 })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    fn is_free(&self, i: usize, j: usize) -> bool {
        let n = self.spec.n;
        let c = n / 2;
        i > 0 && j > 0 && i < n - 1 && j < n - 1 && !(i == c && j == c)
    }

    /// The unrelaxed scheme value `T(u)_i`.
    fn target(&self, values: &[f64], i: usize, j: usize, nb: &mut Vec<(f64, f64)>) -> f64 {
        let n = self.spec.n;
        let rad = self.spec.stencil_radius;
        let idx = j * n + i;
        nb.clear();
        if i >= rad && j >= rad && i + rad < n && j + rad < n {
            nb.extend(self.shifts.iter().map(|&(s, w)| (values[(idx as isize + s) as usize], w)));
        } else {
            let m = n as isize;
            for &(di, dj, w) in &self.offsets {
                let (a, b) = (i as isize + di, j as isize + dj);
                if a >= 0 && b >= 0 && a < m && b < m {
                    nb.push((values[(b * m + a) as usize], w));
                }
            }
        }
        balanced_midpoint(nb, values[idx])
    }

    fn update(&self, values: &[f64], i: usize, j: usize, nb: &mut Vec<(f64, f64)>) -> f64 {
        let target = self.target(values, i, j, nb);
        let omega = self.spec.relaxation;
        if omega == 1.0 {
            target
        } else {
            let old = values[j * self.spec.n + i];
            (old + omega * (target - old)).clamp(0.0, 1.0)
        }
    }

    /// One sweep; returns the largest change of any node.
    pub fn sweep(&mut self) -> f64 {
        let n = self.spec.n;
        self.sweeps += 1;
        match self.spec.order {
            SweepOrder::Lexicographic => {
                let mut nb = Vec::with_capacity(self.offsets.len());
                let mut delta = 0.0f64;
                for j in 1..n - 1 {
                    for i in 1..n - 1 {
                        if !self.is_free(i, j) {
                            continue;
                        }
                        let new = self.update(&self.values, i, j, &mut nb);
                        let idx = j * n + i;
                        delta = delta.max((new - self.values[idx]).abs());
                        self.values[idx] = new;
                    }
                }
                delta
            }
            SweepOrder::RedBlack => {
                let mut delta = 0.0f64;
                for colour in 0..2 {
                    let this: &Self = self;
                    let updates: Vec<(usize, f64)> = (1..n - 1)
                        .into_par_iter()
                        .flat_map_iter(|j| {
                            let mut nb = Vec::with_capacity(this.offsets.len());
                            (1..n - 1)
                                .filter(|&i| (i + j) % 2 == colour && this.is_free(i, j))
                                .map(|i| (j * n + i, this.update(&this.values, i, j, &mut nb)))
                                .collect::<Vec<_>>()
                        })
                        .collect();
                    for (idx, v) in updates {
                        delta = delta.max((v - self.values[idx]).abs());
                        self.values[idx] = v;
                    }
                }
                delta
            }
        }
    }

    /// Largest `|T(u)_i - u_i|` over free nodes, without modifying the grid.
    pub fn residual(&self) -> f64 {
        let n = self.spec.n;
        (1..n - 1)
            .into_par_iter()
            .map(|j| {
                let mut nb = Vec::with_capacity(self.offsets.len());
                (1..n - 1)
                    .filter(|&i| self.is_free(i, j))
                    .map(|i| (self.target(&self.values, i, j, &mut nb) - self.values[j * n + i]).abs())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Sweep until the largest change falls below `sweep_tol`.
    pub fn run(mut self) -> Result<DiscreteSolution> {
        let mut last = f64::INFINITY;
        while self.sweeps < self.spec.max_sweeps {
            last = self.sweep();
            if last <= self.spec.sweep_tol {
                let residual = self.residual();
                return Ok(DiscreteSolution {
                    spec: self.spec,
                    values: self.values,
                    sweeps: self.sweeps,
                    last_update: last,
                    residual,
                });
            }
        }
        Err(Error::NoConvergence { iterations: self.sweeps, residual: last })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSolution {
    pub spec: GridSpec,
    /// Row-major, `y` outer.
    pub values: Vec<f64>,
    pub sweeps: usize,
    pub last_update: f64,
    /// Fixed-point residual after the final sweep.
    pub residual: f64,
}

impl DiscreteSolution {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.spec.n + i]
    }

    /// Central differences inside, one-sided on the edges.
    pub fn gradient(&self, i: usize, j: usize) -> [f64; 2] {
        let n = self.spec.n;
        let h = self.spec.spacing();
        let diff = |a: f64, b: f64, steps: usize| (b - a) / (steps as f64 * h);
        let (il, ir) = (i.saturating_sub(1), (i + 1).min(n - 1));
        let (jl, jr) = (j.saturating_sub(1), (j + 1).min(n - 1));
        [diff(self.at(il, j), self.at(ir, j), ir - il), diff(self.at(i, jl), self.at(i, jr), jr - jl)]
    }
}

pub fn solve_discrete(spec: GridSpec) -> Result<DiscreteSolution> {
    DiscreteSolver::new(spec)?.run()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub n: usize,
    pub sup_gap: f64,
    /// Root-mean-square gap over all nodes.
    pub l2_gap: f64,
    /// `|u_h - u|` per node, row-major with `y` outer.
    pub gap: Vec<f64>,
    pub sweeps: usize,
    pub residual: f64,
}

/// Gaps between a discrete solution and the analytic field at every node.
pub fn compare_solution(sol: &DiscreteSolution, potential: &Potential) -> Result<Comparison> {
    let n = sol.spec.n;
    let gap = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % n, idx / n);
            let p = PlanePoint::new(sol.spec.coordinate(i), sol.spec.coordinate(j))?;
            Ok((potential.eval_u(p)? - sol.values[idx]).abs())
        })
        .collect::<Result<Vec<_>>>()?;
    let sup_gap = gap.iter().copied().fold(0.0, f64::max);
    let l2_gap = (gap.iter().map(|g| g * g).sum::<f64>() / gap.len() as f64).sqrt();
    Ok(Comparison { n, sup_gap, l2_gap, gap, sweeps: sol.sweeps, residual: sol.residual })
}

pub fn compare_fields(spec: GridSpec, potential: &Potential) -> Result<Comparison> {
    compare_solution(&solve_discrete(spec)?, potential)
}
