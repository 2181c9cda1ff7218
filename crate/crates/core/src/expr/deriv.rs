//! Symbolic differentiation with chain, product and quotient rules, plus the
//! light constant folding that keeps repeated derivatives from blowing up.

use super::{BinOp, ExprAst, ExprError, UnaryFn, Variable};

/// Exact symbolic derivative with respect to `var`. Other variables are
/// treated as constants. Powers with a constant exponent use the power rule
/// (integer exponents evaluate by repeated multiplication, so negative bases
/// stay safe); a power whose base and exponent both vary is unsupported.
pub fn differentiate(ast: &ExprAst, var: Variable) -> Result<ExprAst, ExprError> {
    Ok(fold(&derive(ast, var)?))
}

fn derive(ast: &ExprAst, var: Variable) -> Result<ExprAst, ExprError> {
    Ok(match ast {
        ExprAst::Number(_) => ExprAst::Number(0.0),
        ExprAst::Var(v) => {
            if *v == var {
                ExprAst::Number(1.0)
            } else {
                ExprAst::Number(0.0)
            }
        }
        ExprAst::Unary(f, a) => {
            let da = derive(a, var)?;
            let outer = unary_outer_derivative(*f, a);
            mul(outer, da)
        }
        ExprAst::Binary(op, a, b) => {
            let da = derive(a, var)?;
            let db = derive(b, var)?;
            match op {
                BinOp::Add => add(da, db),
                BinOp::Sub => sub(da, db),
                BinOp::Mul => add(mul((**a).clone(), db), mul((**b).clone(), da)),
                BinOp::Div => {
                    // (u/v)' = (v u' - u v') / v^2
                    let num = sub(mul((**b).clone(), da), mul((**a).clone(), db));
                    let den = pow((**b).clone(), ExprAst::Number(2.0));
                    ExprAst::binary(BinOp::Div, num, den)
                }
                BinOp::Pow => derive_pow(a, b, da, db)?,
            }
        }
    })
}

fn derive_pow(
    base: &ExprAst,
    expo: &ExprAst,
    dbase: ExprAst,
    dexpo: ExprAst,
) -> Result<ExprAst, ExprError> {
    match (expo, base) {
        // (u^c)' = c u^(c-1) u'
        (ExprAst::Number(c), _) => {
            let power = pow((*base).clone(), ExprAst::Number(c - 1.0));
            Ok(mul(mul(ExprAst::Number(*c), power), dbase))
        }
        // (a^v)' = a^v ln(a) v'
        (_, ExprAst::Number(a)) => {
            let outer = mul(
                pow(ExprAst::Number(*a), (*expo).clone()),
                ExprAst::Number(a.ln()),
            );
            Ok(mul(outer, dexpo))
        }
        _ => Err(ExprError::Unsupported(
            "derivative of a power with non-constant base and exponent".into(),
        )),
    }
}

fn unary_outer_derivative(f: UnaryFn, arg: &ExprAst) -> ExprAst {
    let a = arg.clone();
    match f {
        UnaryFn::Sin => ExprAst::unary(UnaryFn::Cos, a),
        UnaryFn::Cos => ExprAst::unary(UnaryFn::Neg, ExprAst::unary(UnaryFn::Sin, a)),
        // tan' = 1 + tan^2
        UnaryFn::Tan => add(
            ExprAst::Number(1.0),
            pow(ExprAst::unary(UnaryFn::Tan, a), ExprAst::Number(2.0)),
        ),
        UnaryFn::Exp => ExprAst::unary(UnaryFn::Exp, a),
        UnaryFn::Log => ExprAst::binary(BinOp::Div, ExprAst::Number(1.0), a),
        UnaryFn::Sinh => ExprAst::unary(UnaryFn::Cosh, a),
        UnaryFn::Cosh => ExprAst::unary(UnaryFn::Sinh, a),
        // tanh' = 1 - tanh^2
        UnaryFn::Tanh => sub(
            ExprAst::Number(1.0),
            pow(ExprAst::unary(UnaryFn::Tanh, a), ExprAst::Number(2.0)),
        ),
        // acosh' = 1 / sqrt(x^2 - 1)
        UnaryFn::Acosh => ExprAst::binary(
            BinOp::Div,
            ExprAst::Number(1.0),
            ExprAst::unary(
                UnaryFn::Sqrt,
                sub(pow(a, ExprAst::Number(2.0)), ExprAst::Number(1.0)),
            ),
        ),
        // sqrt' = 1 / (2 sqrt(x))
        UnaryFn::Sqrt => ExprAst::binary(
            BinOp::Div,
            ExprAst::Number(1.0),
            mul(ExprAst::Number(2.0), ExprAst::unary(UnaryFn::Sqrt, a)),
        ),
        UnaryFn::Neg => ExprAst::Number(-1.0),
    }
}

fn add(a: ExprAst, b: ExprAst) -> ExprAst {
    ExprAst::binary(BinOp::Add, a, b)
}

fn sub(a: ExprAst, b: ExprAst) -> ExprAst {
    ExprAst::binary(BinOp::Sub, a, b)
}

fn mul(a: ExprAst, b: ExprAst) -> ExprAst {
    ExprAst::binary(BinOp::Mul, a, b)
}

fn pow(a: ExprAst, b: ExprAst) -> ExprAst {
    ExprAst::binary(BinOp::Pow, a, b)
}

fn as_number(ast: &ExprAst) -> Option<f64> {
    match ast {
        ExprAst::Number(v) => Some(*v),
        _ => None,
    }
}

/// Bottom-up constant folding with the obvious algebraic identities.
pub(crate) fn fold(ast: &ExprAst) -> ExprAst {
    match ast {
        ExprAst::Number(_) | ExprAst::Var(_) => ast.clone(),
        ExprAst::Unary(f, a) => {
            let a = fold(a);
            if let Some(v) = as_number(&a) {
                if *f == UnaryFn::Neg {
                    return ExprAst::Number(-v);
                }
            }
            if *f == UnaryFn::Neg {
                if let ExprAst::Unary(UnaryFn::Neg, inner) = &a {
                    return (**inner).clone();
                }
            }
            ExprAst::unary(*f, a)
        }
        ExprAst::Binary(op, a, b) => {
            let a = fold(a);
            let b = fold(b);
            if let (Some(x), Some(y)) = (as_number(&a), as_number(&b)) {
                if let Ok(v) = super::eval_binary_public(*op, x, y) {
                    if v.is_finite() {
                        return ExprAst::Number(v);
                    }
                }
            }
            match op {
                BinOp::Add => {
                    if as_number(&a) == Some(0.0) {
                        return b;
                    }
                    if as_number(&b) == Some(0.0) {
                        return a;
                    }
                }
                BinOp::Sub => {
                    if as_number(&b) == Some(0.0) {
                        return a;
                    }
                    if as_number(&a) == Some(0.0) {
                        return ExprAst::unary(UnaryFn::Neg, b);
                    }
                }
                BinOp::Mul => {
                    if as_number(&a) == Some(0.0) || as_number(&b) == Some(0.0) {
                        return ExprAst::Number(0.0);
                    }
                    if as_number(&a) == Some(1.0) {
                        return b;
                    }
                    if as_number(&b) == Some(1.0) {
                        return a;
                    }
                }
                BinOp::Div => {
                    if as_number(&b) == Some(1.0) {
                        return a;
                    }
                }
                BinOp::Pow => {
                    if as_number(&b) == Some(1.0) {
                        return a;
                    }
                    if as_number(&b) == Some(0.0) {
                        return ExprAst::Number(1.0);
                    }
                }
            }
            ExprAst::binary(*op, a, b)
        }
    }
}
