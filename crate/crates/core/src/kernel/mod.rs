//! Synthesis of the reproducing kernel of the periodic W₂⁴[0, 1] space.
//!
//! For a fixed parameter s the kernel K_s(t) is a piecewise degree-7
//! polynomial in t with a single breakpoint at t = s. Its 16 branch
//! coefficients and 3 boundary multipliers are not taken from any tabulated
//! closed form: they are synthesized from first principles by solving the
//! 19-constraint linear system assembled in [`constraints`] — periodicity,
//! the adjoint boundary conditions that cancel the integration-by-parts
//! terms, continuity of orders 0..6 at t = s, and a unit jump of the seventh
//! derivative there. Parameter derivatives ∂ₛᵏ K (k ≤ 3), which the basis
//! layer turns into collocation functions, come from solving the
//! s-differentiated systems against the same factorization.
//!
//! The defining identity, and the gate every synthesized slice must pass, is
//! the reproducing property ⟨y, K_s⟩ = y(s) under the inner product
//!
//! ```text
//! <y, z> = sum_{i=0..3} y^(i)(0) z^(i)(0) + int_0^1 y'''' z'''' dv
//! ```

mod constraints;
mod reference;

pub use constraints::{assemble, matrix_s_derivative, ConstraintSystem, SYSTEM_SIZE};
pub use reference::{reference_kernel_eval, ReferenceKernelTable, ALPHAS};

use std::sync::OnceLock;

use thiserror::Error;

use crate::linalg::LuFactors;
use crate::polynomial::{PiecewisePolynomial, Polynomial};
use crate::quadrature::gauss_legendre;
use crate::smooth::{SinTwoPi, SmoothFunction};

/// Condition-number threshold above which a slice is flagged.
pub const CONDITION_WARN_THRESHOLD: f64 = 1e12;

#[derive(Debug, Error)]
pub enum KernelError {
    /// The constraint factorization detected rank < 19; this indicates an
    /// assembly bug, not bad data.
    #[error("kernel constraint system is singular at s = {s}")]
    SingularSystem { s: f64 },
    #[error("kernel evaluation out of range: t = {t}, t_order = {t_order}, s_order = {s_order}")]
    OutOfRange { t: f64, t_order: usize, s_order: usize },
    #[error("test function violates the periodic conditions (defect {defect:e})")]
    BcViolation { defect: f64 },
    #[error("no kernel configuration reproduces point evaluation (best residual {best:e})")]
    Unresolvable { best: f64 },
}

/// Sign of the unit jump of the seventh t-derivative at t = s.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpSign {
    Negative,
    Positive,
}

impl JumpSign {
    pub fn value(self) -> f64 {
        match self {
            JumpSign::Negative => -1.0,
            JumpSign::Positive => 1.0,
        }
    }
}

impl std::fmt::Display for JumpSign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            JumpSign::Negative => write!(f, "-1"),
            JumpSign::Positive => write!(f, "+1"),
        }
    }
}

/// The two candidate forms of the adjoint boundary row that pairs a low-order
/// derivative with the fourth at t = 0. Both circulate in derivations of this
/// kernel; only one of them actually cancels the third-derivative boundary
/// term, and which one is decided empirically by the reproducing gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdjointVariant {
    /// d^5 K(0) - d^4 K(0) = 0
    FifthMinusFourth,
    /// d^3 K(0) - d^4 K(0) = 0
    ThirdMinusFourth,
}

impl std::fmt::Display for AdjointVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AdjointVariant::FifthMinusFourth => write!(f, "d5-d4"),
            AdjointVariant::ThirdMinusFourth => write!(f, "d3-d4"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelConfig {
    pub adjoint: AdjointVariant,
    pub jump: JumpSign,
}

static RESOLVED: OnceLock<KernelConfig> = OnceLock::new();

/// The empirically resolved kernel configuration.
///
/// Candidates are probed in a fixed order, starting from the jump sign -1 and
/// the fifth-order adjoint pairing; a candidate is accepted when a trial
/// slice at s = 0.37 reproduces sin(2πt) to better than 1e-4 (the probe point
/// is chosen with sin(2πs) well away from zero so a sign error cannot hide).
/// The result is computed once and cached for concurrent use.
///
/// Panics if no candidate passes, which would mean the constraint assembly
/// itself is broken.
pub fn resolved_config() -> KernelConfig {
    *RESOLVED.get_or_init(|| match resolve_config() {
        Ok(cfg) => cfg,
        Err(e) => panic!("kernel self-check failed: {e}"),
    })
}

fn resolve_config() -> Result<KernelConfig, KernelError> {
    let candidates = [
        (AdjointVariant::FifthMinusFourth, JumpSign::Negative),
        (AdjointVariant::FifthMinusFourth, JumpSign::Positive),
        (AdjointVariant::ThirdMinusFourth, JumpSign::Negative),
        (AdjointVariant::ThirdMinusFourth, JumpSign::Positive),
    ];
    let probe = SinTwoPi;
    let s = 0.37;
    let mut best = f64::INFINITY;
    for (adjoint, jump) in candidates {
        let config = KernelConfig { adjoint, jump };
        let Ok(slice) = synthesize_with(s, &config) else {
            continue;
        };
        let residual = (inner_against(&slice, &probe, 0) - probe.eval(s, 0)).abs();
        best = best.min(residual);
        if residual <= 1e-4 {
            return Ok(config);
        }
    }
    Err(KernelError::Unresolvable { best })
}

/// A synthesized kernel slice at fixed s: the left/right branch polynomials of
/// ∂ₛᵏ K_s for k = 0..3, the boundary multipliers of the order-0 system, and
/// the condition estimate of the factorization that produced it.
#[derive(Debug, Clone)]
pub struct KernelSlice {
    s: f64,
    /// pieces[k][0] = left branch (t <= s), pieces[k][1] = right branch.
    pieces: [[Polynomial; 2]; 4],
    multipliers: [f64; 3],
    condition: f64,
}

impl KernelSlice {
    pub fn s(&self) -> f64 {
        self.s
    }

    /// Branch polynomial of the `s_order` parameter derivative.
    pub fn piece(&self, s_order: usize, right: bool) -> &Polynomial {
        &self.pieces[s_order][usize::from(right)]
    }

    pub fn multipliers(&self) -> [f64; 3] {
        self.multipliers
    }

    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    pub fn condition_warning(&self) -> bool {
        self.condition > CONDITION_WARN_THRESHOLD
    }

    /// ∂ₜ^t_order ∂ₛ^s_order K at (t, s), left branch winning at t = s.
    pub fn eval(&self, t: f64, t_order: usize, s_order: usize) -> Result<f64, KernelError> {
        if !(0.0..=1.0).contains(&t) || t_order > 7 || s_order > 3 {
            return Err(KernelError::OutOfRange { t, t_order, s_order });
        }
        Ok(self.eval_unchecked(t, t_order, s_order))
    }

    pub(crate) fn eval_unchecked(&self, t: f64, t_order: usize, s_order: usize) -> f64 {
        let side = usize::from(t > self.s);
        self.pieces[s_order][side].eval(t, t_order)
    }

    /// Jump of the seventh t-derivative across the breakpoint.
    pub fn t7_jump(&self) -> f64 {
        self.pieces[0][1].eval(self.s, 7) - self.pieces[0][0].eval(self.s, 7)
    }

    /// Repackage one parameter-derivative order as a piecewise polynomial in
    /// t with the breakpoint at s. At s ∈ {0, 1} the vanishing side collapses
    /// and the survivor covers all of [0, 1]; order-6 continuity makes the
    /// collapsed representation agree with branch evaluation at the endpoint.
    pub fn to_piecewise(&self, s_order: usize) -> PiecewisePolynomial {
        let [left, right] = &self.pieces[s_order];
        if self.s <= 0.0 {
            PiecewisePolynomial::single(right.clone())
        } else if self.s >= 1.0 {
            PiecewisePolynomial::single(left.clone())
        } else {
            PiecewisePolynomial::new(
                vec![0.0, self.s, 1.0],
                vec![left.clone(), right.clone()],
            )
            .expect("slice breakpoints are valid by construction")
        }
    }
}

/// Synthesize the kernel slice at s under the resolved configuration.
pub fn synthesize_kernel_at(s: f64) -> Result<KernelSlice, KernelError> {
    synthesize_with(s, &resolved_config())
}

/// Synthesize under an explicit configuration (diagnostics and the resolver
/// itself go through here).
pub fn synthesize_with(s: f64, config: &KernelConfig) -> Result<KernelSlice, KernelError> {
    let sys = assemble(s, config);
    let lu = LuFactors::factor(&sys.matrix).map_err(|_| KernelError::SingularSystem { s })?;
    let condition = lu.condition_1(&sys.matrix);

    let x0 = lu.solve(&sys.rhs);
    // d/ds of A x = b with constant b: A x' = -A' x, and Leibniz onward
    let neg = |v: Vec<f64>| v.into_iter().map(|t| -t).collect::<Vec<f64>>();
    let a1 = &sys.matrix_s_derivs[0];
    let a2 = &sys.matrix_s_derivs[1];
    let a3 = &sys.matrix_s_derivs[2];
    let x1 = lu.solve(&neg(a1.matvec(&x0)));
    let r2: Vec<f64> = a1
        .matvec(&x1)
        .iter()
        .zip(a2.matvec(&x0))
        .map(|(u, v)| -(2.0 * u + v))
        .collect();
    let x2 = lu.solve(&r2);
    let r3: Vec<f64> = a1
        .matvec(&x2)
        .iter()
        .zip(a2.matvec(&x1))
        .zip(a3.matvec(&x0))
        .map(|((u, v), w)| -(3.0 * u + 3.0 * v + w))
        .collect();
    let x3 = lu.solve(&r3);

    let branch = |x: &[f64], right: bool| {
        let lo = if right { 8 } else { 0 };
        Polynomial::new(x[lo..lo + 8].to_vec())
    };
    let pieces = [&x0, &x1, &x2, &x3].map(|x| [branch(x, false), branch(x, true)]);
    let multipliers = [x0[16], x0[17], x0[18]];
    Ok(KernelSlice {
        s,
        pieces,
        multipliers,
        condition,
    })
}

/// The reproducing kernel of W₂¹[0, 1]: 1 + min(t, s).
pub fn q_kernel_eval(t: f64, s: f64) -> f64 {
    if t <= s {
        1.0 + t
    } else {
        1.0 + s
    }
}

/// The W₂⁴ inner product of a smooth function against ∂ₛ^s_order K_s,
/// with the integral term done by composite 16-point Gauss-Legendre on 32
/// panels split at the kernel breakpoint.
pub fn inner_against(slice: &KernelSlice, f: &dyn SmoothFunction, s_order: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        acc += f.eval(0.0, i) * slice.eval_unchecked(0.0, i, s_order);
    }
    let s = slice.s();
    let segments: &[(f64, f64, usize)] = if s <= 0.0 {
        &[(0.0, 1.0, 32)]
    } else if s >= 1.0 {
        &[(0.0, 1.0, 32)]
    } else {
        &[(0.0, s, 16), (s, 1.0, 16)]
    };
    let (nodes, weights) = gauss_legendre(16);
    for &(a, b, panels) in segments {
        let h = (b - a) / panels as f64;
        for k in 0..panels {
            let mid = a + (k as f64 + 0.5) * h;
            let half = 0.5 * h;
            for (x, w) in nodes.iter().zip(&weights) {
                let t = mid + half * x;
                acc += w * half * f.eval(t, 4) * slice.eval_unchecked(t, 4, s_order);
            }
        }
    }
    acc
}

/// Residual of the reproducing property |<y, K_s> - y(s)| for a periodic test
/// function. Functions that fail the periodic conditions are rejected since
/// the identity is meaningless for them.
pub fn verify_reproducing(
    slice: &KernelSlice,
    f: &dyn SmoothFunction,
) -> Result<f64, KernelError> {
    let defect = f.periodic_defect();
    if defect > 1e-10 {
        return Err(KernelError::BcViolation { defect });
    }
    Ok((inner_against(slice, f, 0) - f.eval(slice.s(), 0)).abs())
}
