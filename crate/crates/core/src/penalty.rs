//! The penalized objective, the scalar comparison penalty, and the
//! problem-instance data model.

use serde::{Deserialize, Serialize};

use crate::cones::{
    cone_norm, dual_norm, p_k, pairing, project, unpack_symmetric, ConeElement, ConeSpace,
    DualElement, PenaltyParameter,
};
use crate::error::{Error, Result};

/// One affine equality `a . x = b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineRow {
    pub a: Vec<f64>,
    pub b: f64,
}

/// A box, optionally intersected with one affine equality. Projection onto
/// the set is exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimpleSet {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub affine: Option<AffineRow>,
}

impl SimpleSet {
    pub fn new_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let set = SimpleSet {
            lo,
            hi,
            affine: None,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lo.len() != self.hi.len() || self.lo.is_empty() {
            return Err(Error::Validation("box bounds must be nonempty and equal-length".into()));
        }
        if self.lo.iter().zip(&self.hi).any(|(l, h)| !(l < h)) {
            return Err(Error::Validation("box bounds must satisfy lo < hi componentwise".into()));
        }
        if let Some(aff) = &self.affine {
            if aff.a.len() != self.lo.len() {
                return Err(Error::Validation("affine row length must match box dimension".into()));
            }
            if aff.a.iter().all(|c| *c == 0.0) {
                return Err(Error::Validation("affine row must be nonzero".into()));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    fn clamp(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(v, (l, h))| v.max(*l).min(*h))
            .collect()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        let in_box = x
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (l, h))| *v >= l - tol && *v <= h + tol);
        let on_plane = match &self.affine {
            None => true,
            Some(aff) => {
                let r: f64 = aff.a.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - aff.b;
                r.abs() <= tol * (1.0 + aff.b.abs())
            }
        };
        in_box && on_plane
    }

    /// Exact Euclidean projection onto the set. For box-plus-hyperplane the
    /// multiplier is located by bisection on the monotone residual and the
    /// free coordinates are then corrected exactly.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        let aff = match &self.affine {
            None => return Ok(self.clamp(x)),
            Some(aff) => aff,
        };
        let residual = |lam: f64| -> f64 {
            let mut r = -aff.b;
            for i in 0..x.len() {
                let z = (x[i] + lam * aff.a[i]).max(self.lo[i]).min(self.hi[i]);
                r += aff.a[i] * z;
            }
            r
        };
        // residual is nondecreasing in lam; bracket the root.
        let (mut lam_lo, mut lam_hi) = (-1.0, 1.0);
        let mut grow = 1.0;
        while residual(lam_lo) > 0.0 {
            grow *= 2.0;
            lam_lo -= grow;
            if grow > 1e12 {
                return Err(Error::EmptyFeasibleSet);
            }
        }
        grow = 1.0;
        while residual(lam_hi) < 0.0 {
            grow *= 2.0;
            lam_hi += grow;
            if grow > 1e12 {
                return Err(Error::EmptyFeasibleSet);
            }
        }
        for _ in 0..80 {
            let mid = 0.5 * (lam_lo + lam_hi);
            if residual(mid) < 0.0 {
                lam_lo = mid;
            } else {
                lam_hi = mid;
            }
        }
        let lam = 0.5 * (lam_lo + lam_hi);
        let mut z: Vec<f64> = (0..x.len())
            .map(|i| (x[i] + lam * aff.a[i]).max(self.lo[i]).min(self.hi[i]))
            .collect();
        // exact correction on the free coordinates
        let mut free = Vec::new();
        let mut clamped_dot = 0.0;
        let mut free_norm2 = 0.0;
        for i in 0..z.len() {
            let interior = z[i] > self.lo[i] + 1e-12 && z[i] < self.hi[i] - 1e-12;
            if interior && aff.a[i] != 0.0 {
                free.push(i);
                free_norm2 += aff.a[i] * aff.a[i];
            } else {
                clamped_dot += aff.a[i] * z[i];
            }
        }
        if !free.is_empty() {
            let free_dot: f64 = free.iter().map(|&i| aff.a[i] * z[i]).sum();
            let corr = (aff.b - clamped_dot - free_dot) / free_norm2;
            for &i in &free {
                z[i] += corr * aff.a[i];
            }
        }
        let check: f64 = aff.a.iter().zip(&z).map(|(a, v)| a * v).sum();
        if (check - aff.b).abs() > 1e-8 * (1.0 + aff.b.abs()) {
            return Err(Error::EmptyFeasibleSet);
        }
        Ok(z)
    }
}

/// Quadratic scalar function `c + b.x + x'Qx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quadratic {
    pub constant: f64,
    pub linear: Vec<f64>,
    #[serde(default)]
    pub quad: Vec<Vec<f64>>,
}

impl Quadratic {
    pub fn linear_fn(linear: Vec<f64>, constant: f64) -> Self {
        Quadratic {
            constant,
            linear,
            quad: Vec::new(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut v = self.constant;
        for (b, xi) in self.linear.iter().zip(x) {
            v += b * xi;
        }
        for (i, row) in self.quad.iter().enumerate() {
            for (j, q) in row.iter().enumerate() {
                v += q * x[i] * x[j];
            }
        }
        v
    }
}

/// Coefficient data for the nonlinear programming family (l1-type penalty
/// over the orthant cone).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NlpData {
    pub objective: Quadratic,
    pub inequalities: Vec<Quadratic>,
    pub equalities: Vec<Quadratic>,
}

/// Coefficient data for the semidefinite family: `G(x) = A_0 + sum x_i A_i`
/// constrained negative semidefinite; the penalty term is the PSD projection
/// of `G(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpData {
    pub objective: Quadratic,
    pub side: usize,
    /// Packed symmetric matrices A_0, A_1, ..., A_d.
    pub matrices: Vec<Vec<f64>>,
}

/// Coefficient data for the discretized state-constrained control family.
/// The decision variable is the piecewise-constant control; the scalar state
/// is rebuilt by forward Euler and the boundary condition is one affine row
/// folded into the feasible set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlData {
    pub horizon: f64,
    pub nodes: usize,
    pub x0: f64,
    pub x_target: f64,
    pub control_bound: f64,
    pub state_bound: f64,
    /// The state constraint is enforced at nodes with t_k <= bound_window.
    pub bound_window: f64,
}

impl ControlData {
    pub fn step(&self) -> f64 {
        self.horizon / self.nodes as f64
    }

    /// Forward-Euler states x_1, ..., x_N rebuilt from the controls.
    pub fn states(&self, u: &[f64]) -> Vec<f64> {
        let h = self.step();
        let mut x = self.x0;
        u.iter()
            .map(|uk| {
                x += h * uk;
                x
            })
            .collect()
    }

    fn node_time(&self, k: usize) -> f64 {
        (k + 1) as f64 * self.step()
    }
}

/// Instance family tag plus all coefficient data; evaluators are total
/// functions of this data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Nlp(NlpData),
    Sdp(SdpData),
    Control(ControlData),
}

/// Known reference optimum used by acceptance tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub x_star: Vec<f64>,
    pub f_star: f64,
    /// Tolerance at which the stored value was certified by the pre-build oracle.
    pub tolerance: f64,
}

/// The constrained problem: objective, cone-valued penalty term, simple
/// feasible set, and optional reference data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub name: String,
    #[serde(flatten)]
    pub family: Family,
    pub cone: ConeSpace,
    pub feasible_set: SimpleSet,
    pub reference: Option<Reference>,
    /// A penalty parameter known (by the pre-build oracle) to be globally exact.
    pub exact_tau: Option<Vec<f64>>,
}

impl ProblemInstance {
    pub fn dim(&self) -> usize {
        self.feasible_set.dim()
    }

    pub fn validate(&self) -> Result<()> {
        self.cone.validate()?;
        self.feasible_set.validate()?;
        let d = self.dim();
        match &self.family {
            Family::Nlp(data) => {
                if data.inequalities.len() + data.equalities.len() != self.cone.ambient_dim() {
                    return Err(Error::Validation(
                        "nlp constraint count must match cone dimension".into(),
                    ));
                }
                if data.objective.linear.len() != d {
                    return Err(Error::Validation("objective dimension mismatch".into()));
                }
            }
            Family::Sdp(data) => {
                let packed = data.side * (data.side + 1) / 2;
                if data.matrices.len() != d + 1 {
                    return Err(Error::Validation("sdp needs d+1 coefficient matrices".into()));
                }
                if data.matrices.iter().any(|m| m.len() != packed) {
                    return Err(Error::Validation("sdp matrix storage length mismatch".into()));
                }
                if self.cone != (ConeSpace::Psd { side: data.side }) {
                    return Err(Error::Validation("sdp cone must be Psd of matching side".into()));
                }
            }
            Family::Control(data) => {
                if data.nodes != d {
                    return Err(Error::Validation("control nodes must match dimension".into()));
                }
                if !(data.horizon > 0.0) {
                    return Err(Error::Validation("control horizon must be positive".into()));
                }
            }
        }
        if let Some(tau) = &self.exact_tau {
            if tau.len() != self.cone.ambient_dim() {
                return Err(Error::Validation("exact_tau length must match cone dimension".into()));
            }
        }
        Ok(())
    }

    /// Objective value f(x).
    pub fn objective(&self, x: &[f64]) -> f64 {
        match &self.family {
            Family::Nlp(data) => data.objective.eval(x),
            Family::Sdp(data) => data.objective.eval(x),
            Family::Control(data) => {
                // running cost L = u^2 under the quadrature w_k = h
                let h = data.step();
                h * x.iter().map(|u| u * u).sum::<f64>()
            }
        }
    }

    /// Cone-valued penalty term phi(x); zero exactly on the constraint set M.
    pub fn penalty_term(&self, x: &[f64]) -> ConeElement {
        match &self.family {
            Family::Nlp(data) => {
                let mut coords = Vec::with_capacity(self.cone.ambient_dim());
                for g in &data.inequalities {
                    coords.push(g.eval(x).max(0.0));
                }
                for g in &data.equalities {
                    coords.push(g.eval(x).abs());
                }
                ConeElement::new(self.cone.clone(), coords).expect("validated instance")
            }
            Family::Sdp(data) => {
                let packed = data.side * (data.side + 1) / 2;
                let mut g = data.matrices[0].clone();
                for (i, xi) in x.iter().enumerate() {
                    for k in 0..packed {
                        g[k] += xi * data.matrices[i + 1][k];
                    }
                }
                project(&self.cone, &g).expect("validated instance")
            }
            Family::Control(data) => {
                let states = data.states(x);
                let coords = states
                    .iter()
                    .enumerate()
                    .map(|(k, xk)| {
                        if data.node_time(k) <= data.bound_window + 1e-12 {
                            (xk - data.state_bound).max(0.0)
                        } else {
                            0.0
                        }
                    })
                    .collect();
                ConeElement::new(self.cone.clone(), coords).expect("validated instance")
            }
        }
    }

    /// Closed-form membership in the constraint set M, up to `tol`.
    pub fn is_member(&self, x: &[f64], tol: f64) -> bool {
        match &self.family {
            Family::Nlp(data) => {
                data.inequalities.iter().all(|g| g.eval(x) <= tol)
                    && data.equalities.iter().all(|g| g.eval(x).abs() <= tol)
            }
            Family::Sdp(data) => {
                let packed = data.side * (data.side + 1) / 2;
                let mut g = data.matrices[0].clone();
                for (i, xi) in x.iter().enumerate() {
                    for k in 0..packed {
                        g[k] += xi * data.matrices[i + 1][k];
                    }
                }
                let m = unpack_symmetric(data.side, &g);
                let eigs = m.symmetric_eigen().eigenvalues;
                eigs.iter().all(|e| *e <= tol)
            }
            Family::Control(data) => {
                let states = data.states(x);
                states.iter().enumerate().all(|(k, xk)| {
                    data.node_time(k) > data.bound_window + 1e-12
                        || *xk <= data.state_bound + tol
                })
            }
        }
    }

    /// A cheap family-specific projection of `x` toward the constraint set,
    /// used to warm-start distance estimation. Returns `None` when the family
    /// provides no closed form.
    pub fn feasible_projection_hint(&self, x: &[f64]) -> Option<Vec<f64>> {
        match &self.family {
            Family::Nlp(data) => {
                // radial projection for a single circle-type equality x'x = r^2
                if data.inequalities.is_empty() && data.equalities.len() == 1 {
                    let g = &data.equalities[0];
                    let d = x.len();
                    let is_sphere = g.linear.iter().all(|b| *b == 0.0)
                        && g.constant < 0.0
                        && g.quad.len() == d
                        && (0..d).all(|i| {
                            (0..d).all(|j| {
                                let v = g.quad[i][j];
                                if i == j {
                                    v == 1.0
                                } else {
                                    v == 0.0
                                }
                            })
                        });
                    if is_sphere {
                        let r = (-g.constant).sqrt();
                        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                        if norm > 1e-12 {
                            return Some(x.iter().map(|v| v * r / norm).collect());
                        }
                    }
                }
                None
            }
            _ => None,
        }
    }

    /// The recorded exact penalty parameter, if the instance carries one.
    pub fn exact_tau_param(&self) -> Option<DualElement> {
        self.exact_tau
            .as_ref()
            .map(|c| DualElement::new(self.cone.clone(), c.clone()).expect("validated instance"))
    }
}

/// `Phi_tau(x) = f(x) + <tau, phi(x)>`.
pub fn eval_penalized(inst: &ProblemInstance, tau: &PenaltyParameter, x: &[f64]) -> f64 {
    let f = inst.objective(x);
    if !f.is_finite() {
        return f64::INFINITY;
    }
    let phi = inst.penalty_term(x);
    f + pairing(tau, &phi).expect("tau must share the instance cone")
}

/// Scalar comparison penalty `Psi_c(x) = f(x) + c ||phi(x)||`.
pub fn eval_scalar_penalty(inst: &ProblemInstance, c: f64, x: &[f64]) -> f64 {
    debug_assert!(c >= 0.0);
    let f = inst.objective(x);
    if !f.is_finite() {
        return f64::INFINITY;
    }
    f + c * cone_norm(&inst.penalty_term(x))
}

/// Constraint-violation measure `||phi(x)||`.
pub fn infeasibility(inst: &ProblemInstance, x: &[f64]) -> f64 {
    cone_norm(&inst.penalty_term(x))
}

/// The two-sided scalar-penalty sandwich
/// `Psi_{p_K(tau)}(x) <= Phi_tau(x) <= Psi_{||tau||*}(x)`.
pub fn sandwich_bounds(
    inst: &ProblemInstance,
    tau: &PenaltyParameter,
    x: &[f64],
) -> Result<(f64, f64, f64)> {
    let pk = p_k(tau);
    if pk <= 0.0 {
        return Err(Error::Precondition(format!(
            "sandwich_bounds requires p_K(tau) > 0, got {pk}"
        )));
    }
    let lower = eval_scalar_penalty(inst, pk, x);
    let value = eval_penalized(inst, tau, x);
    let upper = eval_scalar_penalty(inst, dual_norm(tau), x);
    Ok((lower, value, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::dual_geq;
    use crate::instances::{build_nlp_circle, build_nlp_mixed, build_sdp_small};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn penalized_equals_objective_on_feasible() {
        let inst = build_nlp_circle();
        let tau = DualElement::new(inst.cone.clone(), vec![7.0]).unwrap();
        let x = [1.0, 0.0];
        assert_relative_eq!(eval_penalized(&inst, &tau, &x), inst.objective(&x));
    }

    #[test]
    fn penalized_example_linear_in_tau() {
        let inst = build_nlp_circle();
        let tau0 = DualElement::new(inst.cone.clone(), vec![3.0]).unwrap();
        let tau2 = tau0.scale(2.0);
        let x = [1.5, 0.3];
        let f = inst.objective(&x);
        let gap0 = eval_penalized(&inst, &tau0, &x) - f;
        let gap2 = eval_penalized(&inst, &tau2, &x) - f;
        assert_relative_eq!(gap2, 2.0 * gap0, epsilon = 1e-12);
    }

    #[test]
    fn ell1_penalty_formula() {
        // f(3) + 2 * max(0, g1(3)) with g1(x) = x - 1
        let data = NlpData {
            objective: Quadratic::linear_fn(vec![1.0], 0.0),
            inequalities: vec![Quadratic::linear_fn(vec![1.0], -1.0)],
            equalities: vec![],
        };
        let inst = ProblemInstance {
            name: "line".into(),
            family: Family::Nlp(data),
            cone: ConeSpace::Orthant { dim: 1 },
            feasible_set: SimpleSet::new_box(vec![-5.0], vec![5.0]).unwrap(),
            reference: None,
            exact_tau: None,
        };
        let tau = DualElement::new(inst.cone.clone(), vec![2.0]).unwrap();
        let x = [3.0];
        assert_relative_eq!(eval_penalized(&inst, &tau, &x), inst.objective(&x) + 4.0);
    }

    #[test]
    fn scalar_penalty_examples() {
        let inst = build_nlp_mixed();
        let x = [0.0, 0.0]; // feasible
        assert_relative_eq!(eval_scalar_penalty(&inst, 0.0, &[2.5, 0.0]), inst.objective(&[2.5, 0.0]));
        assert_relative_eq!(eval_scalar_penalty(&inst, 9.0, &x), inst.objective(&x));
    }

    #[test]
    fn infeasibility_circle_origin() {
        let inst = build_nlp_circle();
        assert_relative_eq!(infeasibility(&inst, &[0.0, 0.0]), 1.0);
        assert_relative_eq!(infeasibility(&inst, &[1.0, 0.0]), 0.0);
    }

    #[test]
    fn sandwich_ordering_and_examples() {
        let inst = build_nlp_mixed();
        let cone = inst.cone.clone();
        // tau=(1,1), phi=(1,0) style check at a point violating only g1
        let tau = DualElement::new(cone, vec![1.0, 1.0]).unwrap();
        let x = [1.0, 0.0]; // g1 = 1, g2 = -1
        let f = inst.objective(&x);
        let (lo, v, hi) = sandwich_bounds(&inst, &tau, &x).unwrap();
        assert_relative_eq!(lo, f + 1.0, epsilon = 1e-12);
        assert_relative_eq!(v, f + 1.0, epsilon = 1e-12);
        assert_relative_eq!(hi, f + 2.0_f64.sqrt(), epsilon = 1e-12);

        // feasible point: all three equal f
        let xf = [0.0, 0.5];
        let (lo, v, hi) = sandwich_bounds(&inst, &tau, &xf).unwrap();
        assert_relative_eq!(lo, inst.objective(&xf));
        assert_relative_eq!(v, inst.objective(&xf));
        assert_relative_eq!(hi, inst.objective(&xf));
    }

    #[test]
    fn sandwich_rejects_degenerate_tau() {
        let inst = build_nlp_mixed();
        let tau = DualElement::new(inst.cone.clone(), vec![0.0, 1.0]).unwrap();
        assert!(sandwich_bounds(&inst, &tau, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn sandwich_holds_on_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for inst in [build_nlp_circle(), build_nlp_mixed(), build_sdp_small()] {
            for _ in 0..1000 {
                let x: Vec<f64> = inst
                    .feasible_set
                    .lo
                    .iter()
                    .zip(&inst.feasible_set.hi)
                    .map(|(l, h)| rng.gen_range(*l..*h))
                    .collect();
                let tau_coords: Vec<f64> = (0..inst.cone.ambient_dim())
                    .map(|_| rng.gen_range(0.1..5.0))
                    .collect();
                let tau = match &inst.cone {
                    ConeSpace::Psd { side } => {
                        // diagonal-dominant symmetric positive definite draw
                        let mut c = tau_coords.clone();
                        for i in 0..*side {
                            c[crate::cones::packed_index(*side, i, i)] += 5.0;
                        }
                        DualElement::new(inst.cone.clone(), c).unwrap()
                    }
                    _ => DualElement::new(inst.cone.clone(), tau_coords).unwrap(),
                };
                let (lo, v, hi) = sandwich_bounds(&inst, &tau, &x).unwrap();
                assert!(lo <= v + 1e-9, "{lo} > {v}");
                assert!(v <= hi + 1e-9, "{v} > {hi}");
            }
        }
    }

    #[test]
    fn monotone_in_tau() {
        let inst = build_nlp_mixed();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..500 {
            let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let t1 = DualElement::new(inst.cone.clone(), vec![rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0)]).unwrap();
            let bump: Vec<f64> = t1.coords.iter().map(|c| c + rng.gen_range(0.0..2.0)).collect();
            let t2 = DualElement::new(inst.cone.clone(), bump).unwrap();
            assert!(dual_geq(&t2, &t1).unwrap());
            assert!(eval_penalized(&inst, &t2, &x) >= eval_penalized(&inst, &t1, &x) - 1e-12);
        }
    }

    #[test]
    fn box_hyperplane_projection_exact() {
        let set = SimpleSet {
            lo: vec![-1.0; 3],
            hi: vec![1.0; 3],
            affine: Some(AffineRow {
                a: vec![1.0, 1.0, 1.0],
                b: 1.5,
            }),
        };
        let z = set.project(&[2.0, 0.0, -2.0]).unwrap();
        let s: f64 = z.iter().sum();
        assert!((s - 1.5).abs() < 1e-12);
        assert!(z.iter().all(|v| *v >= -1.0 - 1e-12 && *v <= 1.0 + 1e-12));
        // projection is idempotent
        let z2 = set.project(&z).unwrap();
        for (a, b) in z.iter().zip(&z2) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn unreachable_hyperplane_is_structural_error() {
        let set = SimpleSet {
            lo: vec![0.0, 0.0],
            hi: vec![1.0, 1.0],
            affine: Some(AffineRow {
                a: vec![1.0, 1.0],
                b: 5.0,
            }),
        };
        assert!(set.project(&[0.5, 0.5]).is_err());
    }
}
