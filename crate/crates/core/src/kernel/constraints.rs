//! Assembly of the 19x19 linear system that determines a kernel slice.
//!
//! Unknown ordering (fixed; everything downstream relies on it):
//! columns 0..8 are the left-branch coefficients a0..a7, columns 8..16 the
//! right-branch coefficients b0..b7, columns 16..19 the boundary multipliers
//! c1, c2, c3.
//!
//! Row layout:
//! - rows 0..3: periodicity of orders 0, 1, 2 between t = 0 (left branch) and
//!   t = 1 (right branch);
//! - rows 3..11: the eight adjoint boundary conditions that cancel the
//!   integration-by-parts boundary terms of the inner product;
//! - rows 11..18: continuity of t-derivative orders 0..6 across t = s;
//! - row 18: the unit jump of the seventh t-derivative at t = s.
//!
//! Only the smoothness rows and nothing else depend on s, and they do so as
//! monomials, so the s-derivatives of the matrix needed by the differentiated
//! solves are available in closed form.

use crate::linalg::Matrix;

use super::{AdjointVariant, KernelConfig};

pub const SYSTEM_SIZE: usize = 19;
const COL_A: usize = 0;
const COL_B: usize = 8;
const COL_C1: usize = 16;
const COL_C2: usize = 17;
const COL_C3: usize = 18;

/// The constraint system at a fixed parameter s: the matrix, its analytic
/// s-derivatives up to order 3, the right-hand side (zero except the jump
/// row), and one label per row.
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    pub matrix: Matrix,
    pub rhs: Vec<f64>,
    pub matrix_s_derivs: [Matrix; 3],
    pub rhs_s_derivs: [Vec<f64>; 3],
    pub labels: Vec<&'static str>,
}

/// Falling factorial i! / (i - m)!; zero once the order exhausts the degree.
fn falling(i: usize, m: usize) -> f64 {
    if m > i {
        return 0.0;
    }
    (i - m + 1..=i).map(|k| k as f64).product()
}

/// Coefficient row of d^m/dt^m sum(x_i t^i) at a fixed endpoint t.
fn endpoint_row(t: f64, m: usize) -> [f64; 8] {
    let mut row = [0.0; 8];
    for (i, slot) in row.iter_mut().enumerate() {
        let f = falling(i, m);
        if f != 0.0 {
            let p = (i - m) as i32;
            *slot = f * if p == 0 { 1.0 } else { t.powi(p) };
        }
    }
    row
}

/// Coefficient row of the `sder`-th s-derivative of d^m/dt^m sum(x_i t^i)
/// evaluated at t = s.
fn diagonal_row(s: f64, m: usize, sder: usize) -> [f64; 8] {
    let mut row = [0.0; 8];
    for (i, slot) in row.iter_mut().enumerate() {
        let f = falling(i, m);
        if f == 0.0 {
            continue;
        }
        let g = falling(i - m, sder);
        if g == 0.0 {
            continue;
        }
        let p = (i - m - sder) as i32;
        *slot = f * g * if p == 0 { 1.0 } else { s.powi(p) };
    }
    row
}

fn set_left(matrix: &mut Matrix, row: usize, coeffs: &[f64; 8], sign: f64) {
    for (j, &c) in coeffs.iter().enumerate() {
        matrix[(row, COL_A + j)] += sign * c;
    }
}

fn set_right(matrix: &mut Matrix, row: usize, coeffs: &[f64; 8], sign: f64) {
    for (j, &c) in coeffs.iter().enumerate() {
        matrix[(row, COL_B + j)] += sign * c;
    }
}

/// The `sder`-th s-derivative of the constraint matrix. Everything except the
/// smoothness block is constant in s.
pub fn matrix_s_derivative(s: f64, sder: usize, config: &KernelConfig) -> Matrix {
    let mut m = Matrix::zeros(SYSTEM_SIZE, SYSTEM_SIZE);
    if sder == 0 {
        // periodicity rows
        for order in 0..3 {
            set_left(&mut m, order, &endpoint_row(0.0, order), 1.0);
            set_right(&mut m, order, &endpoint_row(1.0, order), -1.0);
        }
        // adjoint boundary rows
        set_right(&mut m, 3, &endpoint_row(1.0, 4), 1.0);
        let low_order = match config.adjoint {
            AdjointVariant::FifthMinusFourth => 5,
            AdjointVariant::ThirdMinusFourth => 3,
        };
        set_left(&mut m, 4, &endpoint_row(0.0, low_order), 1.0);
        set_left(&mut m, 4, &endpoint_row(0.0, 4), -1.0);
        set_left(&mut m, 5, &endpoint_row(0.0, 0), 1.0);
        set_left(&mut m, 5, &endpoint_row(0.0, 7), 1.0);
        m[(5, COL_C1)] = 1.0;
        set_right(&mut m, 6, &endpoint_row(1.0, 7), 1.0);
        m[(6, COL_C1)] = 1.0;
        set_right(&mut m, 7, &endpoint_row(1.0, 6), 1.0);
        m[(7, COL_C2)] = -1.0;
        set_left(&mut m, 8, &endpoint_row(0.0, 1), 1.0);
        set_left(&mut m, 8, &endpoint_row(0.0, 6), -1.0);
        m[(8, COL_C2)] = 1.0;
        set_left(&mut m, 9, &endpoint_row(0.0, 2), 1.0);
        set_left(&mut m, 9, &endpoint_row(0.0, 5), 1.0);
        m[(9, COL_C3)] = 1.0;
        set_right(&mut m, 10, &endpoint_row(1.0, 5), 1.0);
        m[(10, COL_C3)] = 1.0;
    }
    // smoothness rows depend on s at every derivative order
    for order in 0..7 {
        let row = 11 + order;
        let coeffs = diagonal_row(s, order, sder);
        set_left(&mut m, row, &coeffs, 1.0);
        set_right(&mut m, row, &coeffs, -1.0);
    }
    if sder == 0 {
        // unit jump of the seventh t-derivative: only the t^7 coefficients
        // survive seven differentiations (factor 7! = 5040)
        m[(18, COL_B + 7)] = 5040.0;
        m[(18, COL_A + 7)] = -5040.0;
    }
    m
}

pub fn assemble(s: f64, config: &KernelConfig) -> ConstraintSystem {
    let matrix = matrix_s_derivative(s, 0, config);
    let matrix_s_derivs = [
        matrix_s_derivative(s, 1, config),
        matrix_s_derivative(s, 2, config),
        matrix_s_derivative(s, 3, config),
    ];
    let mut rhs = vec![0.0; SYSTEM_SIZE];
    rhs[18] = config.jump.value();
    let rhs_s_derivs = [
        vec![0.0; SYSTEM_SIZE],
        vec![0.0; SYSTEM_SIZE],
        vec![0.0; SYSTEM_SIZE],
    ];
    ConstraintSystem {
        matrix,
        rhs,
        matrix_s_derivs,
        rhs_s_derivs,
        labels: row_labels(),
    }
}

fn row_labels() -> Vec<&'static str> {
    vec![
        "periodic value",
        "periodic first derivative",
        "periodic second derivative",
        "adjoint: d4 at 1",
        "adjoint: low-order pair at 0",
        "adjoint: value + d7 at 0 with c1",
        "adjoint: d7 at 1 with c1",
        "adjoint: d6 at 1 with c2",
        "adjoint: d1 - d6 at 0 with c2",
        "adjoint: d2 + d5 at 0 with c3",
        "adjoint: d5 at 1 with c3",
        "continuity order 0",
        "continuity order 1",
        "continuity order 2",
        "continuity order 3",
        "continuity order 4",
        "continuity order 5",
        "continuity order 6",
        "jump of order 7",
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::JumpSign;

    fn config() -> KernelConfig {
        KernelConfig {
            adjoint: AdjointVariant::ThirdMinusFourth,
            jump: JumpSign::Positive,
        }
    }

    #[test]
    fn has_nineteen_labeled_rows() {
        let sys = assemble(0.5, &config());
        assert_eq!(sys.matrix.n_rows(), 19);
        assert_eq!(sys.labels.len(), 19);
    }

    #[test]
    fn jump_row_structure() {
        let sys = assemble(0.4, &config());
        assert_eq!(sys.matrix[(18, 15)], 5040.0);
        assert_eq!(sys.matrix[(18, 7)], -5040.0);
        for j in 0..19 {
            if j != 7 && j != 15 {
                assert_eq!(sys.matrix[(18, j)], 0.0);
            }
        }
        assert_eq!(sys.rhs[18], 1.0);
        assert!(sys.rhs[..18].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn periodicity_row_zero_pattern() {
        // K(0) - K(1) = 0 reads a0 - (b0 + ... + b7) = 0
        let sys = assemble(0.3, &config());
        assert_eq!(sys.matrix[(0, 0)], 1.0);
        for j in 1..8 {
            assert_eq!(sys.matrix[(0, j)], 0.0);
        }
        for j in 8..16 {
            assert_eq!(sys.matrix[(0, j)], -1.0);
        }
    }

    #[test]
    fn rhs_derivatives_are_zero() {
        let sys = assemble(0.7, &config());
        for d in &sys.rhs_s_derivs {
            assert!(d.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn smoothness_rows_differentiate_consistently() {
        // finite difference of the order-0 matrix vs the analytic s-derivative
        let cfg = config();
        let h = 1e-6;
        let m_plus = matrix_s_derivative(0.43 + h, 0, &cfg);
        let m_minus = matrix_s_derivative(0.43 - h, 0, &cfg);
        let d1 = matrix_s_derivative(0.43, 1, &cfg);
        for i in 0..19 {
            for j in 0..19 {
                let fd = (m_plus[(i, j)] - m_minus[(i, j)]) / (2.0 * h);
                assert!(
                    (fd - d1[(i, j)]).abs() <= 1e-4 * d1[(i, j)].abs().max(1.0),
                    "entry ({i},{j}): fd={fd} analytic={}",
                    d1[(i, j)]
                );
            }
        }
    }
}
