//! Finite-dimensional ordered cones, their dual pairings, and the Moreau projection.
//!
//! Three cone models are supported: the nonnegative orthant with the Euclidean
//! norm, positive semidefinite matrices with the Frobenius norm, and a weighted
//! grid cone (nonnegative grid functions with a weighted L1 norm) that stands in
//! for the cone of nonnegative continuous functions under a quadrature rule.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the smallest eigenvalue when testing PSD membership.
pub const PSD_TOL: f64 = 1e-9;

/// The ambient ordered-cone model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeSpace {
    /// Nonnegative orthant in `R^dim`.
    Orthant { dim: usize },
    /// Positive semidefinite `side x side` symmetric matrices,
    /// stored packed (upper triangle, row major).
    Psd { side: usize },
    /// Nonnegative grid functions with strictly positive quadrature weights.
    WeightedGrid { weights: Vec<f64> },
}

impl ConeSpace {
    /// Number of stored coordinates.
    pub fn ambient_dim(&self) -> usize {
        match self {
            ConeSpace::Orthant { dim } => *dim,
            ConeSpace::Psd { side } => side * (side + 1) / 2,
            ConeSpace::WeightedGrid { weights } => weights.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            ConeSpace::Orthant { dim } => *dim >= 1,
            ConeSpace::Psd { side } => *side >= 1,
            ConeSpace::WeightedGrid { weights } => {
                !weights.is_empty() && weights.iter().all(|w| *w > 0.0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Validation(
                "cone space must have dim >= 1 and strictly positive weights".into(),
            ))
        }
    }

    fn check_coords(&self, coords: &[f64]) -> Result<()> {
        if coords.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                got: coords.len(),
            });
        }
        Ok(())
    }
}

/// Packed index of entry `(i, j)`, `i <= j`, of a `side x side` symmetric matrix.
pub fn packed_index(side: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < side);
    i * (2 * side - i + 1) / 2 + (j - i)
}

/// Expand packed upper-triangular storage into a dense symmetric matrix.
pub fn unpack_symmetric(side: usize, packed: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(side, side);
    for i in 0..side {
        for j in i..side {
            let v = packed[packed_index(side, i, j)];
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Pack a dense symmetric matrix into upper-triangular storage.
pub fn pack_symmetric(m: &DMatrix<f64>) -> Vec<f64> {
    let side = m.nrows();
    let mut packed = vec![0.0; side * (side + 1) / 2];
    for i in 0..side {
        for j in i..side {
            packed[packed_index(side, i, j)] = 0.5 * (m[(i, j)] + m[(j, i)]);
        }
    }
    packed
}

fn sym_eigen(side: usize, packed: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = unpack_symmetric(side, packed);
    let eig = m.symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// An element of the cone's ambient space, with an improper `inf` sentinel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeElement {
    pub space: ConeSpace,
    pub coords: Vec<f64>,
    /// The improper element with norm +inf; all pairings short-circuit to +inf.
    pub infinite: bool,
}

impl ConeElement {
    pub fn new(space: ConeSpace, coords: Vec<f64>) -> Result<Self> {
        space.check_coords(&coords)?;
        Ok(ConeElement {
            space,
            coords,
            infinite: false,
        })
    }

    pub fn zero(space: ConeSpace) -> Self {
        let n = space.ambient_dim();
        ConeElement {
            space,
            coords: vec![0.0; n],
            infinite: false,
        }
    }

    pub fn infinity(space: ConeSpace) -> Self {
        let n = space.ambient_dim();
        ConeElement {
            space,
            coords: vec![0.0; n],
            infinite: true,
        }
    }

    /// Membership in K, up to `PSD_TOL` on the smallest eigenvalue for PSD.
    pub fn in_cone(&self) -> bool {
        if self.infinite {
            return false;
        }
        match &self.space {
            ConeSpace::Orthant { .. } | ConeSpace::WeightedGrid { .. } => {
                self.coords.iter().all(|c| *c >= 0.0)
            }
            ConeSpace::Psd { side } => {
                let (eigs, _) = sym_eigen(*side, &self.coords);
                eigs.iter().all(|e| *e >= -PSD_TOL)
            }
        }
    }
}

/// An element of the dual cone representation; the vectorial penalty parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualElement {
    pub space: ConeSpace,
    pub coords: Vec<f64>,
}

pub type PenaltyParameter = DualElement;

impl DualElement {
    pub fn new(space: ConeSpace, coords: Vec<f64>) -> Result<Self> {
        space.check_coords(&coords)?;
        Ok(DualElement { space, coords })
    }

    /// The unit parameter: all-ones for orthant/grid, identity matrix for PSD.
    pub fn unit(space: ConeSpace) -> Self {
        let coords = match &space {
            ConeSpace::Orthant { dim } => vec![1.0; *dim],
            ConeSpace::WeightedGrid { weights } => vec![1.0; weights.len()],
            ConeSpace::Psd { side } => {
                let mut c = vec![0.0; side * (side + 1) / 2];
                for i in 0..*side {
                    c[packed_index(*side, i, i)] = 1.0;
                }
                c
            }
        };
        DualElement { space, coords }
    }

    pub fn scale(&self, alpha: f64) -> Self {
        DualElement {
            space: self.space.clone(),
            coords: self.coords.iter().map(|c| alpha * c).collect(),
        }
    }

    /// Strict positivity test: tau in K*_+ (strictly positive coordinates /
    /// positive definite).
    pub fn is_strictly_positive(&self) -> bool {
        match &self.space {
            ConeSpace::Orthant { .. } | ConeSpace::WeightedGrid { .. } => {
                self.coords.iter().all(|c| *c > 0.0)
            }
            ConeSpace::Psd { side } => {
                let (eigs, _) = sym_eigen(*side, &self.coords);
                eigs.iter().all(|e| *e > 0.0)
            }
        }
    }
}

fn check_same_space(a: &ConeSpace, b: &ConeSpace) -> Result<()> {
    if a != b {
        return Err(Error::ConeMismatch(format!("{a:?} vs {b:?}")));
    }
    Ok(())
}

/// Canonical duality pairing `<tau, y>`.
///
/// Orthant: dot product; weighted grid: quadrature sum `sum w_k tau_k y_k`;
/// PSD: `trace(tau * y)`. The improper element pairs to +inf.
pub fn pairing(tau: &DualElement, y: &ConeElement) -> Result<f64> {
    check_same_space(&tau.space, &y.space)?;
    if y.infinite {
        return Ok(f64::INFINITY);
    }
    Ok(match &tau.space {
        ConeSpace::Orthant { .. } => tau
            .coords
            .iter()
            .zip(&y.coords)
            .map(|(t, v)| t * v)
            .sum(),
        ConeSpace::WeightedGrid { weights } => weights
            .iter()
            .zip(tau.coords.iter().zip(&y.coords))
            .map(|(w, (t, v))| w * t * v)
            .sum(),
        ConeSpace::Psd { side } => {
            // trace(AB) over packed storage: off-diagonal entries count twice.
            let mut acc = 0.0;
            for i in 0..*side {
                for j in i..*side {
                    let idx = packed_index(*side, i, j);
                    let factor = if i == j { 1.0 } else { 2.0 };
                    acc += factor * tau.coords[idx] * y.coords[idx];
                }
            }
            acc
        }
    })
}

/// Norm on the primal space: Euclidean (orthant), Frobenius (PSD),
/// weighted L1 (grid). The improper element has norm +inf.
pub fn cone_norm(y: &ConeElement) -> f64 {
    if y.infinite {
        return f64::INFINITY;
    }
    match &y.space {
        ConeSpace::Orthant { .. } => y.coords.iter().map(|c| c * c).sum::<f64>().sqrt(),
        ConeSpace::WeightedGrid { weights } => weights
            .iter()
            .zip(&y.coords)
            .map(|(w, c)| w * c.abs())
            .sum(),
        ConeSpace::Psd { side } => {
            let mut acc = 0.0;
            for i in 0..*side {
                for j in i..*side {
                    let v = y.coords[packed_index(*side, i, j)];
                    let factor = if i == j { 1.0 } else { 2.0 };
                    acc += factor * v * v;
                }
            }
            acc.sqrt()
        }
    }
}

/// Dual norm of the penalty parameter: Euclidean (orthant), Frobenius (PSD),
/// max coordinate (grid, the dual of the weighted L1 norm).
pub fn dual_norm(tau: &DualElement) -> f64 {
    match &tau.space {
        ConeSpace::Orthant { .. } => tau.coords.iter().map(|c| c * c).sum::<f64>().sqrt(),
        ConeSpace::WeightedGrid { .. } => tau
            .coords
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.abs())),
        ConeSpace::Psd { side } => {
            let mut acc = 0.0;
            for i in 0..*side {
                for j in i..*side {
                    let v = tau.coords[packed_index(*side, i, j)];
                    let factor = if i == j { 1.0 } else { 2.0 };
                    acc += factor * v * v;
                }
            }
            acc.sqrt()
        }
    }
}

/// Largest constant `c` with `<tau, y> >= c ||y||` on K.
///
/// Orthant and weighted grid: the minimum coordinate; PSD: the smallest
/// eigenvalue. May return a value <= 0 when tau is not in K*_{++};
/// callers requiring strict domination must check the sign.
pub fn p_k(tau: &DualElement) -> f64 {
    match &tau.space {
        ConeSpace::Orthant { .. } | ConeSpace::WeightedGrid { .. } => tau
            .coords
            .iter()
            .fold(f64::INFINITY, |m, c| m.min(*c)),
        ConeSpace::Psd { side } => {
            let (eigs, _) = sym_eigen(*side, &tau.coords);
            eigs.iter().fold(f64::INFINITY, |m, e| m.min(*e))
        }
    }
}

/// Moreau projection of an ambient point onto K.
///
/// Componentwise clipping for orthant/grid; eigenvalue clipping for PSD.
pub fn project(space: &ConeSpace, ambient: &[f64]) -> Result<ConeElement> {
    space.check_coords(ambient)?;
    let coords = match space {
        ConeSpace::Orthant { .. } | ConeSpace::WeightedGrid { .. } => {
            ambient.iter().map(|c| c.max(0.0)).collect()
        }
        ConeSpace::Psd { side } => {
            let (eigs, vecs) = sym_eigen(*side, ambient);
            if eigs.iter().any(|e| !e.is_finite()) {
                return Err(Error::Numerical("eigensolver returned non-finite values".into()));
            }
            let clipped = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                *side,
                eigs.iter().map(|e| e.max(0.0)),
            ));
            let proj = &vecs * clipped * vecs.transpose();
            pack_symmetric(&proj)
        }
    };
    ConeElement::new(space.clone(), coords)
}

/// Embedding `i: K -> K*`; the coordinate identity for all three cone kinds
/// (each is self-dual under its pairing).
pub fn embed(y: &ConeElement) -> Result<DualElement> {
    if y.infinite {
        return Err(Error::Domain("cannot embed the improper element".into()));
    }
    DualElement::new(y.space.clone(), y.coords.clone())
}

/// Dual-cone order: `tau1 >= tau2` iff `tau1 - tau2` lies in K*.
pub fn dual_geq(tau1: &DualElement, tau2: &DualElement) -> Result<bool> {
    check_same_space(&tau1.space, &tau2.space)?;
    let diff: Vec<f64> = tau1
        .coords
        .iter()
        .zip(&tau2.coords)
        .map(|(a, b)| a - b)
        .collect();
    Ok(match &tau1.space {
        ConeSpace::Orthant { .. } | ConeSpace::WeightedGrid { .. } => {
            diff.iter().all(|d| *d >= 0.0)
        }
        ConeSpace::Psd { side } => {
            let (eigs, _) = sym_eigen(*side, &diff);
            eigs.iter().all(|e| *e >= -PSD_TOL)
        }
    })
}
