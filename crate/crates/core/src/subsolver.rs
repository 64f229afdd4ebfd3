//! Desk-scale global minimization over a simple set: a dense grid scan
//! combined with multistart projected descent. The grid scan and the
//! multistart loop are data-parallel; with the `parallel` feature they run
//! on rayon, otherwise sequentially. Both paths produce identical results:
//! the reduction orders candidates by value with a lexicographic tie-break.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::cones::PenaltyParameter;
use crate::penalty::{eval_penalized, ProblemInstance, SimpleSet};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Dimensions above this bound get no grid certification (multistart only).
pub const GRID_DIM_LIMIT: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SubsolverConfig {
    /// Grid resolution for dimensions <= 3; capped at 9 for dimensions 4..=6.
    pub grid_points_per_dim: usize,
    pub multistart_count: usize,
    pub local_iters: usize,
    pub local_tol: f64,
    pub rng_seed: u64,
}

impl Default for SubsolverConfig {
    fn default() -> Self {
        SubsolverConfig {
            grid_points_per_dim: 25,
            multistart_count: 20,
            local_iters: 200,
            local_tol: 1e-8,
            rng_seed: 42,
        }
    }
}

impl SubsolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points_per_dim < 2 {
            return Err(Error::Validation("subsolver.grid_points_per_dim: must be >= 2".into()));
        }
        if self.multistart_count < 1 {
            return Err(Error::Validation("subsolver.multistart_count: must be >= 1".into()));
        }
        if !(self.local_tol > 0.0) {
            return Err(Error::Validation("subsolver.local_tol: must be > 0".into()));
        }
        Ok(())
    }

    fn effective_grid(&self, dim: usize) -> usize {
        if dim <= 3 {
            self.grid_points_per_dim
        } else {
            self.grid_points_per_dim.min(9)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsolverResult {
    pub x_best: Vec<f64>,
    pub value: f64,
    pub evaluations: u64,
    pub certified_on_grid: bool,
}

/// Candidate ordering: by value, ties broken lexicographically on coordinates.
fn better(a: &(f64, Vec<f64>), b: &(f64, Vec<f64>)) -> bool {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => {
            for (u, v) in a.1.iter().zip(&b.1) {
                match u.total_cmp(v) {
                    std::cmp::Ordering::Less => return true,
                    std::cmp::Ordering::Greater => return false,
                    std::cmp::Ordering::Equal => {}
                }
            }
            false
        }
    }
}

const TOP_K: usize = 4;

/// Result of a dense grid scan: the best `TOP_K` projected nodes in order.
#[derive(Debug, Clone)]
pub struct GridScan {
    pub best: Vec<(f64, Vec<f64>)>,
    pub evaluations: u64,
}

fn decode_node(set: &SimpleSet, points: usize, mut index: usize) -> Vec<f64> {
    let d = set.dim();
    let mut x = vec![0.0; d];
    for i in 0..d {
        let k = index % points;
        index /= points;
        x[i] = set.lo[i] + k as f64 * (set.hi[i] - set.lo[i]) / (points - 1) as f64;
    }
    x
}

fn scan_range<F: Fn(&[f64]) -> f64>(
    set: &SimpleSet,
    f: &F,
    points: usize,
    range: std::ops::Range<usize>,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let mut top: Vec<(f64, Vec<f64>)> = Vec::with_capacity(TOP_K + 1);
    for idx in range {
        let node = decode_node(set, points, idx);
        let x = set.project(&node)?;
        let v = f(&x);
        let cand = (v, x);
        let pos = top.iter().position(|t| better(&cand, t)).unwrap_or(top.len());
        if pos < TOP_K {
            top.insert(pos, cand);
            top.truncate(TOP_K);
        }
    }
    Ok(top)
}

fn merge_top(mut a: Vec<(f64, Vec<f64>)>, b: Vec<(f64, Vec<f64>)>) -> Vec<(f64, Vec<f64>)> {
    for cand in b {
        let pos = a.iter().position(|t| better(&cand, t)).unwrap_or(a.len());
        if pos < TOP_K {
            a.insert(pos, cand);
            a.truncate(TOP_K);
        }
    }
    a
}

/// Sequential dense grid scan over the (projected) box grid.
pub fn grid_scan_sequential<F: Fn(&[f64]) -> f64 + Sync>(
    set: &SimpleSet,
    f: &F,
    points: usize,
) -> Result<GridScan> {
    let total = points.pow(set.dim() as u32);
    let best = scan_range(set, f, points, 0..total)?;
    Ok(GridScan {
        best,
        evaluations: total as u64,
    })
}

/// Parallel dense grid scan; identical output to the sequential scan.
#[cfg(feature = "parallel")]
pub fn grid_scan_parallel<F: Fn(&[f64]) -> f64 + Sync>(
    set: &SimpleSet,
    f: &F,
    points: usize,
) -> Result<GridScan> {
    let total = points.pow(set.dim() as u32);
    let chunk = (total / 64).max(1024);
    let tops: Result<Vec<_>> = (0..total)
        .into_par_iter()
        .step_by(chunk)
        .map(|start| scan_range(set, f, points, start..(start + chunk).min(total)))
        .collect();
    let best = tops?.into_iter().fold(Vec::new(), merge_top);
    Ok(GridScan {
        best,
        evaluations: total as u64,
    })
}

fn grid_scan<F: Fn(&[f64]) -> f64 + Sync>(
    set: &SimpleSet,
    f: &F,
    points: usize,
) -> Result<GridScan> {
    #[cfg(feature = "parallel")]
    {
        grid_scan_parallel(set, f, points)
    }
    #[cfg(not(feature = "parallel"))]
    {
        grid_scan_sequential(set, f, points)
    }
}

fn fd_gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], evals: &mut u64) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let h = 1e-6 * (1.0 + x[i].abs());
        xp[i] = x[i] + h;
        let fp = f(&xp);
        xp[i] = x[i] - h;
        let fm = f(&xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
        *evals += 2;
    }
    g
}

/// Projected descent from `x0`: finite-difference gradient steps with
/// backtracking and a spectral (Barzilai-Borwein) step length, followed by a
/// compass-search polish that handles the kinks of the penalized objective.
/// Never returns a point worse than `x0`.
pub fn refine<F: Fn(&[f64]) -> f64>(
    set: &SimpleSet,
    f: &F,
    x0: &[f64],
    cfg: &SubsolverConfig,
) -> Result<(Vec<f64>, f64, u64)> {
    let d = set.dim();
    let mut evals: u64 = 0;
    let mut x = set.project(x0)?;
    let mut fx = f(&x);
    evals += 1;
    if !fx.is_finite() {
        return Ok((x, fx, evals));
    }

    // gradient phase
    let mut alpha = 1.0_f64;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None; // (x, g)
    for _ in 0..cfg.local_iters {
        let g = fd_gradient(f, &x, &mut evals);
        if let Some((px, pg)) = &prev {
            let mut ss = 0.0;
            let mut sy = 0.0;
            for i in 0..d {
                let s = x[i] - px[i];
                let y = g[i] - pg[i];
                ss += s * s;
                sy += s * y;
            }
            alpha = if sy > 1e-30 { (ss / sy).clamp(1e-12, 1e10) } else { 1.0 };
        }
        let trial: Vec<f64> = (0..d).map(|i| x[i] - alpha * g[i]).collect();
        let proj = set.project(&trial)?;
        let dir: Vec<f64> = (0..d).map(|i| proj[i] - x[i]).collect();
        let dir_norm2: f64 = dir.iter().map(|v| v * v).sum();
        if dir_norm2.sqrt() < cfg.local_tol {
            break;
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand: Vec<f64> = (0..d).map(|i| x[i] + t * dir[i]).collect();
            let fc = f(&cand);
            evals += 1;
            if fc < fx - 1e-4 * t * dir_norm2 {
                prev = Some((x.clone(), g.clone()));
                x = cand;
                fx = fc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }

    // compass polish: expand the radius after sustained progress so long
    // descents cost O(log) rounds, shrink it on failure
    let scale: Vec<f64> = (0..d).map(|i| set.hi[i] - set.lo[i]).collect();
    let diag = (d as f64).sqrt();
    let mut radius = 1e-2;
    let mut streak = 0usize;
    let mut rounds = 0usize;
    while radius > cfg.local_tol && rounds < 5_000 {
        rounds += 1;
        let mut best: Option<(f64, Vec<f64>)> = None;
        let consider = |cand: Vec<f64>, fc: f64, best: &mut Option<(f64, Vec<f64>)>| {
            if fc < fx {
                let c = (fc, cand);
                if best.as_ref().map_or(true, |b| better(&c, b)) {
                    *best = Some(c);
                }
            }
        };
        for i in 0..d {
            for sign in [1.0, -1.0] {
                let mut trial = x.clone();
                trial[i] += sign * radius * scale[i];
                let cand = set.project(&trial)?;
                let fc = f(&cand);
                evals += 1;
                consider(cand, fc, &mut best);
            }
        }
        for sign in [1.0, -1.0] {
            let trial: Vec<f64> = (0..d)
                .map(|i| x[i] + sign * radius * scale[i] / diag)
                .collect();
            let cand = set.project(&trial)?;
            let fc = f(&cand);
            evals += 1;
            consider(cand, fc, &mut best);
        }
        match best {
            Some((fc, cand)) => {
                x = cand;
                fx = fc;
                streak += 1;
                if streak >= 3 {
                    radius = (radius * 2.0).min(0.1);
                    streak = 0;
                }
            }
            None => {
                radius *= 0.5;
                streak = 0;
            }
        }
    }

    Ok((x, fx, evals))
}

fn latin_hypercube(set: &SimpleSet, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let d = set.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perms: Vec<Vec<usize>> = Vec::with_capacity(d);
    for _ in 0..d {
        let mut p: Vec<usize> = (0..count).collect();
        for i in (1..count).rev() {
            let j = rng.gen_range(0..=i);
            p.swap(i, j);
        }
        perms.push(p);
    }
    (0..count)
        .map(|s| {
            (0..d)
                .map(|i| {
                    let u: f64 = rng.gen();
                    set.lo[i] + (perms[i][s] as f64 + u) * (set.hi[i] - set.lo[i]) / count as f64
                })
                .collect()
        })
        .collect()
}

/// Global minimization of an arbitrary objective over a simple set: grid scan
/// (when the dimension permits) plus multistart projected descent.
pub fn minimize_function<F: Fn(&[f64]) -> f64 + Sync>(
    set: &SimpleSet,
    f: &F,
    cfg: &SubsolverConfig,
) -> Result<SubsolverResult> {
    cfg.validate()?;
    set.validate()?;
    let d = set.dim();
    let mut evaluations: u64 = 0;

    let (grid_best, certified) = if d <= GRID_DIM_LIMIT {
        let scan = grid_scan(set, f, cfg.effective_grid(d))?;
        evaluations += scan.evaluations;
        (scan.best, true)
    } else {
        (Vec::new(), false)
    };

    // starts: best grid cells, the projected box center, Latin hypercube fill
    let mut starts: Vec<Vec<f64>> = grid_best.iter().map(|(_, x)| x.clone()).collect();
    let center: Vec<f64> = (0..d).map(|i| 0.5 * (set.lo[i] + set.hi[i])).collect();
    starts.push(set.project(&center)?);
    if starts.len() < cfg.multistart_count {
        let fill = cfg.multistart_count - starts.len();
        starts.extend(latin_hypercube(set, fill, cfg.rng_seed));
    }

    #[cfg(feature = "parallel")]
    let refined: Result<Vec<_>> = starts.par_iter().map(|s| refine(set, f, s, cfg)).collect();
    #[cfg(not(feature = "parallel"))]
    let refined: Result<Vec<_>> = starts.iter().map(|s| refine(set, f, s, cfg)).collect();

    let mut best: Option<(f64, Vec<f64>)> = None;
    for (x, v, e) in refined? {
        evaluations += e;
        let cand = (v, x);
        if best.as_ref().map_or(true, |b| better(&cand, b)) {
            best = Some(cand);
        }
    }
    let (value, x_best) = best.ok_or(Error::InfeasibleModel)?;
    if !value.is_finite() {
        return Err(Error::InfeasibleModel);
    }
    if let Some((gv, _)) = grid_best.first() {
        debug_assert!(value <= *gv + 1e-12, "refinement must dominate the grid");
    }
    Ok(SubsolverResult {
        x_best,
        value,
        evaluations,
        certified_on_grid: certified,
    })
}

/// Global minimization of the penalized objective `Phi_tau` over Q.
pub fn global_minimize(
    inst: &ProblemInstance,
    tau: &PenaltyParameter,
    cfg: &SubsolverConfig,
) -> Result<SubsolverResult> {
    let f = |x: &[f64]| eval_penalized(inst, tau, x);
    minimize_function(&inst.feasible_set, &f, cfg)
}

/// Local refinement of the penalized objective from `x0 in Q`.
pub fn local_refine(
    inst: &ProblemInstance,
    tau: &PenaltyParameter,
    x0: &[f64],
    cfg: &SubsolverConfig,
) -> Result<Vec<f64>> {
    let f = |x: &[f64]| eval_penalized(inst, tau, x);
    let (x, _, _) = refine(&inst.feasible_set, &f, x0, cfg)?;
    Ok(x)
}
