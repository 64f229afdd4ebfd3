//! Penalty-update loops: geometric scaling, adaptive violation-driven
//! updates, their combination, and the periodic-correction variant.

use serde::{Deserialize, Serialize};

use crate::cones::{cone_norm, dual_norm, embed, p_k, ConeElement, DualElement, PenaltyParameter};
use crate::error::{Error, Result};
use crate::penalty::ProblemInstance;
use crate::subsolver::{global_minimize, SubsolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum Strategy {
    /// tau_{n+1} = theta * tau_n
    Geometric { theta: f64 },
    /// tau_{n+1} = tau_n + s_n i(phi(x_n))
    Adaptive,
    /// tau_{n+1} = tau_n + delta tau_1 + s_n i(phi(x_n))
    Combined { delta: f64 },
    /// adaptive update with the delta tau_1 correction only every `period` iterations
    PeriodicCombined { delta: f64, period: usize },
}

impl Strategy {
    pub fn tag(&self) -> &'static str {
        match self {
            Strategy::Geometric { .. } => "geometric",
            Strategy::Adaptive => "adaptive",
            Strategy::Combined { .. } => "combined",
            Strategy::PeriodicCombined { .. } => "periodic_combined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scaling", rename_all = "snake_case")]
pub enum Scaling {
    /// s_n = 1
    Unit,
    /// s_n = gamma / ||phi(x_n)||
    InverseViolation { gamma: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodConfig {
    pub strategy: Strategy,
    pub scaling: Scaling,
    pub tau1: DualElement,
    pub eps_feas: f64,
    pub eps_phi: f64,
    pub max_iters: usize,
}

impl MethodConfig {
    /// Defaults from penalty-method folklore: theta = 10, delta = 0.1,
    /// gamma = 1, period 5, unit scaling, feasibility tolerance 1e-6.
    pub fn geometric_default(tau1: DualElement) -> Self {
        MethodConfig {
            strategy: Strategy::Geometric { theta: 10.0 },
            scaling: Scaling::Unit,
            tau1,
            eps_feas: 1e-6,
            eps_phi: 1e-8,
            max_iters: 100,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.strategy {
            Strategy::Geometric { theta } => {
                if !(*theta > 1.0) {
                    return Err(Error::Validation("method.theta: must satisfy theta > 1".into()));
                }
            }
            Strategy::Adaptive => {}
            Strategy::Combined { delta } => {
                if !(*delta > 0.0) {
                    return Err(Error::Validation("method.delta: must satisfy delta > 0".into()));
                }
            }
            Strategy::PeriodicCombined { delta, period } => {
                if !(*delta > 0.0) {
                    return Err(Error::Validation("method.delta: must satisfy delta > 0".into()));
                }
                if *period < 1 {
                    return Err(Error::Validation("method.period: must satisfy period >= 1".into()));
                }
            }
        }
        if let Scaling::InverseViolation { gamma } = &self.scaling {
            if !(*gamma > 0.0) {
                return Err(Error::Validation("method.gamma: must satisfy gamma > 0".into()));
            }
        }
        if !(self.eps_feas > 0.0) {
            return Err(Error::Validation("method.eps_feas: must be > 0".into()));
        }
        if !(self.eps_phi > 0.0) {
            return Err(Error::Validation("method.eps_phi: must be > 0".into()));
        }
        if self.max_iters < 1 {
            return Err(Error::Validation("method.max_iters: must be >= 1".into()));
        }
        // theorem hypotheses require tau1 in K*_{++} for geometric/combined
        let needs_strict = matches!(
            self.strategy,
            Strategy::Geometric { .. } | Strategy::Combined { .. } | Strategy::PeriodicCombined { .. }
        );
        if needs_strict && !(p_k(&self.tau1) > 0.0) {
            return Err(Error::Validation(
                "method.tau1: must satisfy p_K(tau1) > 0 for this strategy".into(),
            ));
        }
        if !self.tau1.is_strictly_positive() {
            return Err(Error::Validation("method.tau1: must be strictly positive".into()));
        }
        Ok(())
    }
}

/// Per-iteration state of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateRecord {
    pub n: usize,
    pub x: Vec<f64>,
    pub tau: DualElement,
    pub phi_value: f64,
    pub f_value: f64,
    pub infeas: f64,
    pub s_n: Option<f64>,
    pub subsolver_evals: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    ConvergedFeasible,
    StoppedPhiEqual,
    MaxItersReached,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub strategy: Strategy,
    pub records: Vec<IterateRecord>,
    pub outcome: Outcome,
    pub final_x: Vec<f64>,
}

impl RunTrace {
    pub fn total_evaluations(&self) -> u64 {
        self.records.iter().map(|r| r.subsolver_evals).sum()
    }
}

/// A run failure carrying the iterates completed before the error.
#[derive(Debug)]
pub struct RunFailure {
    pub error: Error,
    pub partial: Vec<IterateRecord>,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (after {} completed iterations)", self.error, self.partial.len())
    }
}

impl std::error::Error for RunFailure {}

/// Geometric update: tau <- theta * tau.
pub fn step_geometric(tau: &PenaltyParameter, theta: f64) -> PenaltyParameter {
    debug_assert!(theta > 1.0);
    tau.scale(theta)
}

/// Adaptive update: tau <- tau + s * i(phi(x)). Coordinates of satisfied
/// constraints are unchanged bit-for-bit.
pub fn step_adaptive(
    tau: &PenaltyParameter,
    phi_x: &ConeElement,
    s: f64,
) -> Result<PenaltyParameter> {
    debug_assert!(s > 0.0);
    let inc = embed(phi_x)?;
    let coords = tau
        .coords
        .iter()
        .zip(&inc.coords)
        .map(|(t, p)| t + s * p)
        .collect();
    DualElement::new(tau.space.clone(), coords)
}

/// Combined update: tau <- tau + delta * tau1 + s * i(phi(x)).
pub fn step_combined(
    tau: &PenaltyParameter,
    tau1: &PenaltyParameter,
    phi_x: &ConeElement,
    s: f64,
    delta: f64,
) -> Result<PenaltyParameter> {
    debug_assert!(s > 0.0 && delta > 0.0);
    let inc = embed(phi_x)?;
    let coords = tau
        .coords
        .iter()
        .zip(tau1.coords.iter().zip(&inc.coords))
        .map(|(t, (t1, p))| t + delta * t1 + s * p)
        .collect();
    DualElement::new(tau.space.clone(), coords)
}

/// Scaling coefficient s_n for the adaptive-style updates.
pub fn compute_scaling(scaling: &Scaling, phi_x: &ConeElement) -> Result<f64> {
    match scaling {
        Scaling::Unit => Ok(1.0),
        Scaling::InverseViolation { gamma } => {
            let norm = cone_norm(phi_x);
            if norm < 1e-8 {
                return Err(Error::Domain(format!(
                    "inverse-violation scaling at ||phi|| = {norm}; the stop condition should have fired"
                )));
            }
            Ok(gamma / norm)
        }
    }
}

/// Run one penalty-update loop to termination.
///
/// Every iterate comes from `global_minimize`. The run stops when the
/// infeasibility falls below `eps_feas`, when (geometric strategy only) two
/// consecutive penalized values agree to `eps_phi` in relative terms, or at
/// `max_iters`.
pub fn run_method(
    inst: &ProblemInstance,
    cfg: &MethodConfig,
    sub: &SubsolverConfig,
) -> std::result::Result<RunTrace, RunFailure> {
    if let Err(e) = cfg.validate() {
        return Err(RunFailure {
            error: e,
            partial: Vec::new(),
        });
    }
    let mut records: Vec<IterateRecord> = Vec::new();
    let mut tau = cfg.tau1.clone();
    let mut outcome = Outcome::MaxItersReached;

    for n in 1..=cfg.max_iters {
        let res = match global_minimize(inst, &tau, sub) {
            Ok(r) => r,
            Err(e) => {
                return Err(RunFailure {
                    error: e,
                    partial: records,
                })
            }
        };
        let phi_x = inst.penalty_term(&res.x_best);
        let infeas = cone_norm(&phi_x);
        let f_value = inst.objective(&res.x_best);
        records.push(IterateRecord {
            n,
            x: res.x_best.clone(),
            tau: tau.clone(),
            phi_value: res.value,
            f_value,
            infeas,
            s_n: None,
            subsolver_evals: res.evaluations,
        });

        if infeas <= cfg.eps_feas {
            outcome = Outcome::ConvergedFeasible;
            break;
        }
        if let Strategy::Geometric { .. } = cfg.strategy {
            if n >= 2 {
                let prev = records[records.len() - 2].phi_value;
                if (res.value - prev).abs() <= cfg.eps_phi * (1.0 + res.value.abs()) {
                    outcome = Outcome::StoppedPhiEqual;
                    break;
                }
            }
        }
        if n == cfg.max_iters {
            break;
        }

        let step = match &cfg.strategy {
            Strategy::Geometric { theta } => Ok(step_geometric(&tau, *theta)),
            Strategy::Adaptive => compute_scaling(&cfg.scaling, &phi_x).and_then(|s| {
                records.last_mut().unwrap().s_n = Some(s);
                step_adaptive(&tau, &phi_x, s)
            }),
            Strategy::Combined { delta } => compute_scaling(&cfg.scaling, &phi_x).and_then(|s| {
                records.last_mut().unwrap().s_n = Some(s);
                step_combined(&tau, &cfg.tau1, &phi_x, s, *delta)
            }),
            Strategy::PeriodicCombined { delta, period } => {
                compute_scaling(&cfg.scaling, &phi_x).and_then(|s| {
                    records.last_mut().unwrap().s_n = Some(s);
                    if n % period == 0 {
                        step_combined(&tau, &cfg.tau1, &phi_x, s, *delta)
                    } else {
                        step_adaptive(&tau, &phi_x, s)
                    }
                })
            }
        };
        tau = match step {
            Ok(t) => t,
            Err(e) => {
                return Err(RunFailure {
                    error: e,
                    partial: records,
                })
            }
        };
    }

    let final_x = records.last().expect("max_iters >= 1").x.clone();
    Ok(RunTrace {
        strategy: cfg.strategy.clone(),
        records,
        outcome,
        final_x,
    })
}

/// Render a trace as CSV, one row per iterate, 17 significant digits.
/// Column order is fixed: `n,phi_value,f_value,infeas,p_k_tau,dual_norm_tau,s_n,evals`.
pub fn trace_to_csv(trace: &RunTrace) -> String {
    let mut out = String::from("n,phi_value,f_value,infeas,p_k_tau,dual_norm_tau,s_n,evals\n");
    for r in &trace.records {
        let s_n = r.s_n.map(|s| format!("{s:.16e}")).unwrap_or_default();
        out.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}\n",
            r.n,
            r.phi_value,
            r.f_value,
            r.infeas,
            p_k(&r.tau),
            dual_norm(&r.tau),
            s_n,
            r.subsolver_evals
        ));
    }
    out
}

/// The JSON summary written next to the trace CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub outcome: Outcome,
    pub final_x: Vec<f64>,
    pub iterations: usize,
    pub total_evaluations: u64,
}

impl RunSummary {
    pub fn from_trace(trace: &RunTrace) -> Self {
        RunSummary {
            outcome: trace.outcome,
            final_x: trace.final_x.clone(),
            iterations: trace.records.len(),
            total_evaluations: trace.total_evaluations(),
        }
    }
}
