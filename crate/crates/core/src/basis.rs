//! Collocation basis over a node grid.
//!
//! For each node tᵢ the function ψᵢ(t) = ∂ₛ³K(t, s)|_{s = tᵢ} represents the
//! functional y ↦ y'''(tᵢ): by kernel symmetry, ⟨y, ψᵢ⟩ = y'''(tᵢ). Taking the
//! parameter route (rather than ∂ₜ³) keeps each ψᵢ an explicit piecewise
//! polynomial in t, so Gram entries are exact product integrals; the ∂ₜ³ route
//! survives as an independent cross-check of the same matrix.
//!
//! The Gram matrix is then orthonormalized by modified Gram-Schmidt in the
//! G-inner-product with one full reorthogonalization pass, producing the
//! lower-triangular coefficients β with ψ̄ᵢ = Σ_{k≤i} βᵢₖ ψₖ orthonormal.

use thiserror::Error;

use crate::kernel::{synthesize_kernel_at, KernelError};
use crate::linalg::Matrix;
use crate::polynomial::{integrate_product, PiecewisePolynomial};

#[derive(Debug, Error)]
pub enum BasisError {
    #[error("invalid grid: {reason}")]
    InvalidGrid { reason: String },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(
        "Gram cross-check failed at ({row},{col}): inner-product route {primary:e} vs \
         collocation route {check:e}"
    )]
    CrossCheckFailure {
        row: usize,
        col: usize,
        primary: f64,
        check: f64,
    },
    #[error("Gram-Schmidt breakdown at index {index}: pivot {pivot:e} below tolerance; \
             nodes are effectively duplicated, reduce n")]
    Breakdown { index: usize, pivot: f64 },
}

/// Relative disagreement tolerated between the two Gram routes.
pub const GRAM_CROSS_CHECK_TOL: f64 = 1e-7;
/// A Gram-Schmidt pivot below this fraction of the largest pivot so far stops
/// the orthonormalization.
pub const BREAKDOWN_TOL: f64 = 1e-12;

/// Collocation grid on [0, 1].
#[derive(Debug, Clone)]
pub struct GridSpec {
    nodes: Vec<f64>,
}

impl GridSpec {
    /// The uniform grid tᵢ = (i - 1) / (n - 1), i = 1..n.
    pub fn uniform(n: usize) -> Result<Self, BasisError> {
        if n < 2 {
            return Err(BasisError::InvalidGrid {
                reason: format!("need at least 2 nodes, got {n}"),
            });
        }
        let nodes = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        Ok(Self { nodes })
    }

    /// An explicit node set; must be strictly increasing from 0 to 1.
    pub fn custom(nodes: Vec<f64>) -> Result<Self, BasisError> {
        if nodes.len() < 2 {
            return Err(BasisError::InvalidGrid {
                reason: "need at least 2 nodes".into(),
            });
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
            return Err(BasisError::InvalidGrid {
                reason: "grid must start at 0 and end at 1".into(),
            });
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(BasisError::InvalidGrid {
                reason: "nodes must be strictly increasing".into(),
            });
        }
        Ok(Self { nodes })
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
}

/// One collocation function: the third parameter derivative of the kernel at
/// its node, as a piecewise polynomial in t with a breakpoint at the node.
#[derive(Debug, Clone)]
pub struct PsiFunction {
    pub index: usize,
    pub pw: PiecewisePolynomial,
}

impl PsiFunction {
    pub fn eval(&self, t: f64, order: usize) -> f64 {
        // psi functions live on [0, 1] by construction
        self.pw.eval(t, order).expect("psi evaluated outside [0, 1]")
    }
}

/// Build the ψ functions for every grid node.
pub fn build_psi(grid: &GridSpec) -> Result<Vec<PsiFunction>, BasisError> {
    grid.nodes()
        .iter()
        .enumerate()
        .map(|(index, &node)| {
            let slice = synthesize_kernel_at(node)?;
            Ok(PsiFunction {
                index,
                pw: slice.to_piecewise(3),
            })
        })
        .collect()
}

/// The W₂⁴ inner product of two piecewise polynomials:
/// Σ_{i=0..3} u⁽ⁱ⁾(0) v⁽ⁱ⁾(0) plus the exact integral of u'''' v'''' split at
/// the union of both breakpoint sets.
pub fn inner_w24(u: &PiecewisePolynomial, v: &PiecewisePolynomial) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        acc += u.eval(0.0, i).unwrap() * v.eval(0.0, i).unwrap();
    }
    let mut cuts: Vec<f64> = u
        .breakpoints()
        .iter()
        .chain(v.breakpoints())
        .copied()
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let pu = u.piece_on(a, b).derivative(4);
        let pv = v.piece_on(a, b).derivative(4);
        acc += integrate_product(&pu, &pv, a, b);
    }
    acc
}

/// Gram matrix via the inner product (the stored, authoritative route).
pub fn gram_matrix(psis: &[PsiFunction]) -> Matrix {
    let n = psis.len();
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = inner_w24(&psis[i].pw, &psis[j].pw);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// Gram matrix via collocation: Gᵢⱼ = ∂ₜ³ψⱼ(tᵢ). Independent of the
/// inner-product route; any disagreement flags a kernel-derivative bug.
pub fn gram_via_collocation(psis: &[PsiFunction], grid: &GridSpec) -> Matrix {
    let n = psis.len();
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = psis[j].eval(grid.nodes()[i], 3);
        }
    }
    g
}

fn cross_check(primary: &Matrix, check: &Matrix) -> Result<(), BasisError> {
    let n = primary.n_rows();
    let floor = primary.max_abs() * 1e-12;
    for i in 0..n {
        for j in 0..n {
            let p = primary[(i, j)];
            let c = check[(i, j)];
            if (p - c).abs() > GRAM_CROSS_CHECK_TOL * p.abs().max(floor) {
                return Err(BasisError::CrossCheckFailure {
                    row: i,
                    col: j,
                    primary: p,
                    check: c,
                });
            }
        }
    }
    Ok(())
}

/// Modified Gram-Schmidt in the G-inner-product with one reorthogonalization
/// pass. Row i of the result holds the coefficients of ψ̄ᵢ over ψ₁..ψᵢ.
pub fn gram_schmidt(gram: &Matrix) -> Result<Matrix, BasisError> {
    let n = gram.n_rows();
    let mut beta = Matrix::zeros(n, n);
    let mut largest_pivot = 0.0f64;
    let mut v = vec![0.0; n];
    for i in 0..n {
        v.iter_mut().for_each(|x| *x = 0.0);
        v[i] = 1.0;
        for _pass in 0..2 {
            for j in 0..i {
                let gv = gram.matvec(&v);
                let proj: f64 = (0..n).map(|k| beta[(j, k)] * gv[k]).sum();
                for k in 0..=j {
                    v[k] -= proj * beta[(j, k)];
                }
            }
        }
        let gv = gram.matvec(&v);
        let pivot: f64 = v.iter().zip(&gv).map(|(a, b)| a * b).sum();
        if pivot <= 0.0 || pivot < BREAKDOWN_TOL * largest_pivot {
            return Err(BasisError::Breakdown { index: i, pivot });
        }
        largest_pivot = largest_pivot.max(pivot);
        let inv_norm = 1.0 / pivot.sqrt();
        for k in 0..=i {
            beta[(i, k)] = v[k] * inv_norm;
        }
    }
    Ok(beta)
}

/// Grid, ψ functions, Gram matrix, and orthonormalization coefficients.
#[derive(Debug, Clone)]
pub struct BasisSet {
    grid: GridSpec,
    psis: Vec<PsiFunction>,
    gram: Matrix,
    beta: Matrix,
}

impl BasisSet {
    /// Full construction: ψ synthesis, both Gram routes with the cross-check,
    /// and Gram-Schmidt.
    pub fn build(grid: GridSpec) -> Result<Self, BasisError> {
        let psis = build_psi(&grid)?;
        let gram = gram_matrix(&psis);
        let check = gram_via_collocation(&psis, &grid);
        cross_check(&gram, &check)?;
        let beta = gram_schmidt(&gram)?;
        Ok(Self {
            grid,
            psis,
            gram,
            beta,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn psis(&self) -> &[PsiFunction] {
        &self.psis
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    /// Lower-triangular orthonormalization coefficients (row i holds βᵢₖ).
    pub fn beta(&self) -> &Matrix {
        &self.beta
    }

    /// Σⱼ weights[j] ∂ₜ^order ψⱼ(t).
    pub fn eval_combination(&self, weights: &[f64], t: f64, order: usize) -> f64 {
        weights
            .iter()
            .zip(&self.psis)
            .map(|(w, psi)| w * psi.eval(t, order))
            .sum()
    }

    /// Orthonormality defect max|B G Bᵀ - I|.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            let bi: Vec<f64> = (0..n).map(|k| self.beta[(i, k)]).collect();
            let gbi = self.gram.matvec(&bi);
            for j in 0..n {
                let mut dot = 0.0;
                for k in 0..n {
                    dot += self.beta[(j, k)] * gbi[k];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}
