//! Bundled problem instances and JSON (de)serialization.
//!
//! Each builder fixes the instance coefficients and carries a reference
//! optimum computed once by a dense-grid / convex-programming oracle before
//! the build, together with a penalty parameter verified to be globally exact
//! by the same oracle.

use crate::cones::ConeSpace;
use crate::error::{Error, Result};
use crate::penalty::{
    AffineRow, ControlData, Family, NlpData, ProblemInstance, Quadratic, Reference, SdpData,
    SimpleSet,
};

/// Names of the bundled instances, in a fixed order.
pub fn bundled_names() -> &'static [&'static str] {
    &["nlp_circle", "nlp_mixed", "sdp_small", "control_toy"]
}

/// Look up a bundled instance by name.
pub fn bundled(name: &str) -> Option<ProblemInstance> {
    match name {
        "nlp_circle" => Some(build_nlp_circle()),
        "nlp_mixed" => Some(build_nlp_mixed()),
        "sdp_small" => Some(build_sdp_small()),
        "control_toy" => Some(build_control_toy()),
        _ => None,
    }
}

/// Linear objective on the unit circle: f(x) = x1 + x2 subject to
/// x1^2 + x2^2 = 1 on the box [-2, 2]^2. Optimum (-sqrt2/2, -sqrt2/2),
/// f* = -sqrt2 (Lagrange computation confirmed by a 400^2-grid oracle).
pub fn build_nlp_circle() -> ProblemInstance {
    let circle = Quadratic {
        constant: -1.0,
        linear: vec![0.0, 0.0],
        quad: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
    };
    let inst = ProblemInstance {
        name: "nlp_circle".into(),
        family: Family::Nlp(NlpData {
            objective: Quadratic::linear_fn(vec![1.0, 1.0], 0.0),
            inequalities: vec![],
            equalities: vec![circle],
        }),
        cone: ConeSpace::Orthant { dim: 1 },
        feasible_set: SimpleSet::new_box(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap(),
        reference: Some(Reference {
            x_star: vec![-(2.0_f64.sqrt()) / 2.0, -(2.0_f64.sqrt()) / 2.0],
            f_star: -(2.0_f64.sqrt()),
            tolerance: 1e-4,
        }),
        exact_tau: Some(vec![1.2]),
    };
    debug_assert!(inst.validate().is_ok());
    inst
}

/// Mixed inequality NLP: f(x) = (x1-2)^2 + (x2-1)^2 with x1^2 - x2 <= 0 and
/// x1 + x2 - 2 <= 0 on [-3, 3]^2. Optimum (1, 1), f* = 1 (both constraints
/// active with multipliers 2/3; confirmed by the grid oracle).
pub fn build_nlp_mixed() -> ProblemInstance {
    let g1 = Quadratic {
        constant: 0.0,
        linear: vec![0.0, -1.0],
        quad: vec![vec![1.0, 0.0], vec![0.0, 0.0]],
    };
    let g2 = Quadratic::linear_fn(vec![1.0, 1.0], -2.0);
    let objective = Quadratic {
        constant: 5.0,
        linear: vec![-4.0, -2.0],
        quad: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
    };
    let inst = ProblemInstance {
        name: "nlp_mixed".into(),
        family: Family::Nlp(NlpData {
            objective,
            inequalities: vec![g1, g2],
            equalities: vec![],
        }),
        cone: ConeSpace::Orthant { dim: 2 },
        feasible_set: SimpleSet::new_box(vec![-3.0, -3.0], vec![3.0, 3.0]).unwrap(),
        reference: Some(Reference {
            x_star: vec![1.0, 1.0],
            f_star: 1.0,
            tolerance: 1e-4,
        }),
        exact_tau: Some(vec![5.0, 5.0]),
    };
    debug_assert!(inst.validate().is_ok());
    inst
}

/// Small nonlinear semidefinite instance: f(x) = -0.3 x1 + 0.5 x2^2 with
/// G(x) = [[x1 - 1, x2], [x2, -1]] required negative semidefinite on
/// [-2, 2]^2. The feasibility condition is x1 <= 1 - x2^2 in closed form;
/// optimum (1, 0), f* = -0.3 (boundary analysis confirmed by the grid oracle).
pub fn build_sdp_small() -> ProblemInstance {
    // packed upper triangle of [[a, b], [b, c]] is [a, b, c]
    let a0 = vec![-1.0, 0.0, -1.0];
    let a1 = vec![1.0, 0.0, 0.0]; // x1 enters the (0,0) entry
    let a2 = vec![0.0, 1.0, 0.0]; // x2 enters the off-diagonal entry
    let objective = Quadratic {
        constant: 0.0,
        linear: vec![-0.3, 0.0],
        quad: vec![vec![0.0, 0.0], vec![0.0, 0.5]],
    };
    let inst = ProblemInstance {
        name: "sdp_small".into(),
        family: Family::Sdp(SdpData {
            objective,
            side: 2,
            matrices: vec![a0, a1, a2],
        }),
        cone: ConeSpace::Psd { side: 2 },
        feasible_set: SimpleSet::new_box(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap(),
        reference: Some(Reference {
            x_star: vec![1.0, 0.0],
            f_star: -0.3,
            tolerance: 1e-4,
        }),
        // 0.6 * identity, packed
        exact_tau: Some(vec![0.6, 0.0, 0.6]),
    };
    debug_assert!(inst.validate().is_ok());
    inst
}

/// Discretized state-constrained control toy: scalar dynamics xdot = u,
/// x(0) = 0, x(1) = 1, running cost u^2, 20 forward-Euler nodes, controls in
/// [-4, 4], state bound x(t) <= 0.6 enforced for t <= 0.65. The boundary
/// condition becomes the affine row (1/20) sum u_k = 1 inside Q. The optimum
/// holds u = 6/7 on the constrained window and u = 4/3 afterwards, with
/// f* = 92/91 (convex quadratic program solved by the pre-build oracle).
pub fn build_control_toy() -> ProblemInstance {
    let nodes = 20usize;
    let h = 1.0 / nodes as f64;
    let mut u_star = vec![12.0 / 13.0; 13];
    u_star.extend(vec![8.0 / 7.0; 7]);
    let inst = ProblemInstance {
        name: "control_toy".into(),
        family: Family::Control(ControlData {
            horizon: 1.0,
            nodes,
            x0: 0.0,
            x_target: 1.0,
            control_bound: 4.0,
            state_bound: 0.6,
            bound_window: 0.65,
        }),
        cone: ConeSpace::WeightedGrid {
            weights: vec![h; nodes],
        },
        feasible_set: SimpleSet {
            lo: vec![-4.0; nodes],
            hi: vec![4.0; nodes],
            affine: Some(AffineRow {
                a: vec![h; nodes],
                b: 1.0,
            }),
        },
        reference: Some(Reference {
            x_star: u_star,
            f_star: 92.0 / 91.0,
            tolerance: 1e-4,
        }),
        exact_tau: Some(vec![12.0; nodes]),
    };
    debug_assert!(inst.validate().is_ok());
    inst
}

/// Serialize an instance to a pretty-printed JSON document.
pub fn serialize_instance(inst: &ProblemInstance) -> Result<String> {
    serde_json::to_string_pretty(inst).map_err(|e| Error::Parse(e.to_string()))
}

/// Parse and validate an instance from a JSON document.
pub fn deserialize_instance(doc: &str) -> Result<ProblemInstance> {
    let inst: ProblemInstance = serde_json::from_str(doc).map_err(|e| {
        Error::Parse(format!(
            "line {}, column {}: {}",
            e.line(),
            e.column(),
            e
        ))
    })?;
    inst.validate()?;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penalty::infeasibility;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn circle_penalty_values() {
        let inst = build_nlp_circle();
        assert_eq!(inst.penalty_term(&[1.0, 0.0]).coords, vec![0.0]);
        assert_eq!(inst.penalty_term(&[0.0, 0.0]).coords, vec![1.0]);
        let r = inst.reference.as_ref().unwrap();
        assert_relative_eq!(inst.objective(&r.x_star), -(2.0_f64.sqrt()), epsilon = 1e-12);
    }

    #[test]
    fn mixed_penalty_values() {
        let inst = build_nlp_mixed();
        assert_eq!(inst.penalty_term(&[0.0, 0.0]).coords, vec![0.0, 0.0]);
        assert_eq!(inst.penalty_term(&[2.0, 0.0]).coords, vec![4.0, 0.0]);
        assert_relative_eq!(inst.objective(&[1.0, 1.0]), 1.0);
    }

    #[test]
    fn sdp_penalty_values() {
        let inst = build_sdp_small();
        // (0,0): G = diag(-1,-1), projection is zero
        assert!(infeasibility(&inst, &[0.0, 0.0]) < 1e-12);
        // (1,0): G = diag(0,-1), boundary of membership
        assert!(infeasibility(&inst, &[1.0, 0.0]) < 1e-12);
        // (2,0): G = diag(1,-1), projection diag(1,0), Frobenius 1
        assert_relative_eq!(infeasibility(&inst, &[2.0, 0.0]), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn sdp_closed_form_matches_eigen_oracle() {
        let inst = build_sdp_small();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..1000 {
            let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0_f64..2.0)];
            let closed = x[0] - 1.0 + x[1] * x[1] <= 1e-9;
            assert_eq!(inst.is_member(&x, 1e-9), closed, "at {x:?}");
        }
    }

    #[test]
    fn control_states_and_penalty() {
        let inst = build_control_toy();
        // u = 1 everywhere: boundary row satisfied, states x_k = k/20 exceed
        // 0.6 from node 13 on; the window covers nodes with t_k <= 0.65.
        let u = vec![1.0; 20];
        let phi = inst.penalty_term(&u);
        for (k, c) in phi.coords.iter().enumerate() {
            let t = (k + 1) as f64 / 20.0;
            let state = (k + 1) as f64 / 20.0;
            if t <= 0.65 && state > 0.6 {
                assert!(*c > 0.0, "node {k}");
            } else {
                assert_eq!(*c, 0.0, "node {k}");
            }
        }
        // reference controls are feasible and attain f*
        let r = inst.reference.clone().unwrap();
        assert!(infeasibility(&inst, &r.x_star) < 1e-12);
        assert!(inst.feasible_set.contains(&r.x_star, 1e-9));
        assert_relative_eq!(inst.objective(&r.x_star), 92.0 / 91.0, epsilon = 1e-12);
    }

    #[test]
    fn control_boundary_row_enforced_by_projection() {
        let inst = build_control_toy();
        let u = vec![0.0; 20];
        assert!(!inst.feasible_set.contains(&u, 1e-9));
        let z = inst.feasible_set.project(&u).unwrap();
        let s: f64 = z.iter().sum::<f64>() / 20.0;
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn membership_matches_zero_infeasibility() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for name in bundled_names() {
            let inst = bundled(name).unwrap();
            let d = inst.dim();
            for _ in 0..1000 {
                let x: Vec<f64> = (0..d)
                    .map(|i| rng.gen_range(inst.feasible_set.lo[i]..inst.feasible_set.hi[i]))
                    .collect();
                let member = inst.is_member(&x, 1e-9);
                let infeas = infeasibility(&inst, &x);
                if member {
                    assert!(infeas <= 1e-7, "{name}: member but infeas {infeas}");
                } else {
                    assert!(infeas > 0.0, "{name}: non-member with zero infeasibility");
                }
            }
        }
    }

    #[test]
    fn serialization_round_trip() {
        for name in bundled_names() {
            let inst = bundled(name).unwrap();
            let doc = serialize_instance(&inst).unwrap();
            let back = deserialize_instance(&doc).unwrap();
            assert_eq!(inst, back, "{name}");
        }
    }

    #[test]
    fn missing_family_is_parse_error() {
        let doc = r#"{"name": "x", "cone": {"kind": "orthant", "dim": 1},
            "feasible_set": {"lo": [-1.0], "hi": [1.0], "affine": null},
            "reference": null, "exact_tau": null}"#;
        let err = deserialize_instance(doc).unwrap_err();
        assert!(err.to_string().contains("family"), "{err}");
    }

    #[test]
    fn reference_preserved_to_full_precision() {
        let inst = build_nlp_circle();
        let doc = serialize_instance(&inst).unwrap();
        let back = deserialize_instance(&doc).unwrap();
        assert_eq!(
            inst.reference.unwrap().f_star.to_bits(),
            back.reference.unwrap().f_star.to_bits()
        );
    }
}
