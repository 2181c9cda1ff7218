//! A small arithmetic expression language for problem definitions.
//!
//! Expressions are immutable trees over the variables `t, y, y1, y2, y3` and
//! the constant `pi`, the unary functions
//! `sin cos tan exp log sinh cosh tanh acosh sqrt neg`, and the binary
//! operators `+ - * / ^`. They are parsed from text ([`parse`]), evaluated
//! against an environment ([`eval_ast`]), differentiated symbolically
//! ([`differentiate`]), and printed back out in re-parseable form.
//!
//! Evaluation has two domain policies. The strict one reports a
//! [`ExprError::Domain`] wherever `log`, `sqrt`, `acosh` or a fractional
//! power leave their real domains. The relaxed one substitutes the real part
//! of the principal complex value (so `acosh` is 0 on [-1, 1], `sqrt` is 0
//! below zero, `log` becomes `ln|x|`); the solver evaluates through it so
//! that iterates grazing a domain boundary behave the way CAS-driven
//! numerics do, and genuine blow-ups still surface as non-finite values.

mod deriv;
mod parser;
pub mod problem;

pub use deriv::differentiate;
pub use parser::{parse, ParseError};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ExprError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("variable {0} is not bound in the environment")]
    Unbound(Variable),
    #[error("{function}({argument}) is outside the real domain")]
    Domain { function: &'static str, argument: f64 },
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variable {
    T,
    Y,
    Y1,
    Y2,
    Y3,
    Pi,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::T => "t",
            Variable::Y => "y",
            Variable::Y1 => "y1",
            Variable::Y2 => "y2",
            Variable::Y3 => "y3",
            Variable::Pi => "pi",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "t" => Variable::T,
            "y" => Variable::Y,
            "y1" => Variable::Y1,
            "y2" => Variable::Y2,
            "y3" => Variable::Y3,
            "pi" => Variable::Pi,
            _ => return None,
        })
    }
}

impl std::fmt::Display for Variable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryFn {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sinh,
    Cosh,
    Tanh,
    Acosh,
    Sqrt,
    Neg,
}

impl UnaryFn {
    pub fn name(self) -> &'static str {
        match self {
            UnaryFn::Sin => "sin",
            UnaryFn::Cos => "cos",
            UnaryFn::Tan => "tan",
            UnaryFn::Exp => "exp",
            UnaryFn::Log => "log",
            UnaryFn::Sinh => "sinh",
            UnaryFn::Cosh => "cosh",
            UnaryFn::Tanh => "tanh",
            UnaryFn::Acosh => "acosh",
            UnaryFn::Sqrt => "sqrt",
            UnaryFn::Neg => "neg",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => UnaryFn::Sin,
            "cos" => UnaryFn::Cos,
            "tan" => UnaryFn::Tan,
            "exp" => UnaryFn::Exp,
            "log" => UnaryFn::Log,
            "sinh" => UnaryFn::Sinh,
            "cosh" => UnaryFn::Cosh,
            "tanh" => UnaryFn::Tanh,
            "acosh" => UnaryFn::Acosh,
            "sqrt" => UnaryFn::Sqrt,
            "neg" => UnaryFn::Neg,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

/// Immutable expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Number(f64),
    Var(Variable),
    Unary(UnaryFn, Box<ExprAst>),
    Binary(BinOp, Box<ExprAst>, Box<ExprAst>),
}

impl ExprAst {
    pub fn number(v: f64) -> Self {
        ExprAst::Number(v)
    }

    pub fn var(v: Variable) -> Self {
        ExprAst::Var(v)
    }

    pub fn unary(f: UnaryFn, arg: ExprAst) -> Self {
        ExprAst::Unary(f, Box::new(arg))
    }

    pub fn binary(op: BinOp, lhs: ExprAst, rhs: ExprAst) -> Self {
        ExprAst::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// All variables occurring in the tree (`pi` excluded; it is a constant).
    pub fn variables(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut Vec<Variable>) {
        match self {
            ExprAst::Number(_) => {}
            ExprAst::Var(v) => {
                if *v != Variable::Pi && !out.contains(v) {
                    out.push(*v);
                }
            }
            ExprAst::Unary(_, a) => a.collect_variables(out),
            ExprAst::Binary(_, a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
        }
    }

    /// Replace variables by subtrees.
    pub fn substitute(&self, bindings: &[(Variable, &ExprAst)]) -> ExprAst {
        match self {
            ExprAst::Number(v) => ExprAst::Number(*v),
            ExprAst::Var(v) => bindings
                .iter()
                .find(|(var, _)| var == v)
                .map(|(_, sub)| (*sub).clone())
                .unwrap_or(ExprAst::Var(*v)),
            ExprAst::Unary(f, a) => ExprAst::unary(*f, a.substitute(bindings)),
            ExprAst::Binary(op, a, b) => {
                ExprAst::binary(*op, a.substitute(bindings), b.substitute(bindings))
            }
        }
    }
}

/// Variable bindings for evaluation. `pi` never needs to be bound.
#[derive(Debug, Clone, Copy, Default)]
pub struct Env {
    pub t: Option<f64>,
    pub y: Option<f64>,
    pub y1: Option<f64>,
    pub y2: Option<f64>,
    pub y3: Option<f64>,
}

impl Env {
    pub fn with_t(t: f64) -> Self {
        Env {
            t: Some(t),
            ..Default::default()
        }
    }

    pub fn with_state(t: f64, y: f64, y1: f64, y2: f64) -> Self {
        Env {
            t: Some(t),
            y: Some(y),
            y1: Some(y1),
            y2: Some(y2),
            y3: None,
        }
    }

    fn lookup(&self, v: Variable) -> Result<f64, ExprError> {
        let slot = match v {
            Variable::T => self.t,
            Variable::Y => self.y,
            Variable::Y1 => self.y1,
            Variable::Y2 => self.y2,
            Variable::Y3 => self.y3,
            Variable::Pi => Some(std::f64::consts::PI),
        };
        slot.ok_or(ExprError::Unbound(v))
    }
}

/// How to treat arguments outside a function's real domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainPolicy {
    /// Report a domain error.
    Strict,
    /// Return the real part of the principal complex value.
    PrincipalRealPart,
}

/// Strict IEEE double evaluation.
pub fn eval_ast(ast: &ExprAst, env: &Env) -> Result<f64, ExprError> {
    eval_with_policy(ast, env, DomainPolicy::Strict)
}

pub fn eval_with_policy(
    ast: &ExprAst,
    env: &Env,
    policy: DomainPolicy,
) -> Result<f64, ExprError> {
    match ast {
        ExprAst::Number(v) => Ok(*v),
        ExprAst::Var(v) => env.lookup(*v),
        ExprAst::Unary(f, a) => {
            let x = eval_with_policy(a, env, policy)?;
            eval_unary(*f, x, policy)
        }
        ExprAst::Binary(op, a, b) => {
            let lhs = eval_with_policy(a, env, policy)?;
            let rhs = eval_with_policy(b, env, policy)?;
            eval_binary(*op, lhs, rhs, policy)
        }
    }
}

fn eval_unary(f: UnaryFn, x: f64, policy: DomainPolicy) -> Result<f64, ExprError> {
    let strict = policy == DomainPolicy::Strict;
    Ok(match f {
        UnaryFn::Sin => x.sin(),
        UnaryFn::Cos => x.cos(),
        UnaryFn::Tan => x.tan(),
        UnaryFn::Exp => x.exp(),
        UnaryFn::Log => {
            if x > 0.0 {
                x.ln()
            } else if strict {
                return Err(ExprError::Domain { function: "log", argument: x });
            } else {
                // Re(log z) = ln|z|
                x.abs().ln()
            }
        }
        UnaryFn::Sinh => x.sinh(),
        UnaryFn::Cosh => x.cosh(),
        UnaryFn::Tanh => x.tanh(),
        UnaryFn::Acosh => {
            if x >= 1.0 {
                x.acosh()
            } else if strict {
                return Err(ExprError::Domain { function: "acosh", argument: x });
            } else if x >= -1.0 {
                // acosh on [-1, 1] is purely imaginary
                0.0
            } else {
                // Re(acosh(-u)) = acosh(u) for u > 1
                (-x).acosh()
            }
        }
        UnaryFn::Sqrt => {
            if x >= 0.0 {
                x.sqrt()
            } else if strict {
                return Err(ExprError::Domain { function: "sqrt", argument: x });
            } else {
                0.0
            }
        }
        UnaryFn::Neg => -x,
    })
}

fn is_integer_valued(v: f64) -> bool {
    v.fract() == 0.0 && v.abs() <= i32::MAX as f64
}

pub(crate) fn eval_binary_public(op: BinOp, lhs: f64, rhs: f64) -> Result<f64, ExprError> {
    eval_binary(op, lhs, rhs, DomainPolicy::Strict)
}

fn eval_binary(op: BinOp, lhs: f64, rhs: f64, policy: DomainPolicy) -> Result<f64, ExprError> {
    Ok(match op {
        BinOp::Add => lhs + rhs,
        BinOp::Sub => lhs - rhs,
        BinOp::Mul => lhs * rhs,
        BinOp::Div => lhs / rhs,
        BinOp::Pow => {
            if is_integer_valued(rhs) {
                lhs.powi(rhs as i32)
            } else if lhs >= 0.0 {
                lhs.powf(rhs)
            } else if policy == DomainPolicy::Strict {
                return Err(ExprError::Domain { function: "pow", argument: lhs });
            } else {
                // Re((-u)^p) = u^p cos(pi p)
                (-lhs).powf(rhs) * (std::f64::consts::PI * rhs).cos()
            }
        }
    })
}

impl std::fmt::Display for ExprAst {
    /// Re-parseable rendering; binary subexpressions are parenthesized
    /// conservatively rather than minimally.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExprAst::Number(v) => {
                if *v < 0.0 || v.is_sign_negative() {
                    write!(f, "({v})")
                } else {
                    write!(f, "{v}")
                }
            }
            ExprAst::Var(v) => write!(f, "{v}"),
            ExprAst::Unary(UnaryFn::Neg, a) => write!(f, "(-{a})"),
            ExprAst::Unary(func, a) => write!(f, "{}({a})", func.name()),
            ExprAst::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn eval_polynomial_example() {
        let ast = parse("t^2*(1-t)^2").unwrap();
        let v = eval_ast(&ast, &Env::with_t(0.5)).unwrap();
        assert!((v - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn acosh_at_domain_edge_and_outside() {
        let ast = parse("acosh(y)").unwrap();
        let env = Env {
            y: Some(1.0),
            ..Default::default()
        };
        assert_eq!(eval_ast(&ast, &env).unwrap(), 0.0);
        let env = Env {
            y: Some(0.5),
            ..Default::default()
        };
        assert!(matches!(
            eval_ast(&ast, &env),
            Err(ExprError::Domain { function: "acosh", .. })
        ));
        // relaxed policy: purely imaginary values project to 0
        assert_eq!(
            eval_with_policy(&ast, &env, DomainPolicy::PrincipalRealPart).unwrap(),
            0.0
        );
    }

    #[test]
    fn principal_real_part_extensions() {
        let log = parse("log(t)").unwrap();
        let env = Env::with_t(-2.0);
        assert!(
            (eval_with_policy(&log, &env, DomainPolicy::PrincipalRealPart).unwrap()
                - 2.0f64.ln())
            .abs()
                < 1e-15
        );
        let sqrt = parse("sqrt(t)").unwrap();
        assert_eq!(
            eval_with_policy(&sqrt, &env, DomainPolicy::PrincipalRealPart).unwrap(),
            0.0
        );
        let acosh = parse("acosh(t)").unwrap();
        let env = Env::with_t(-2.0);
        assert!(
            (eval_with_policy(&acosh, &env, DomainPolicy::PrincipalRealPart).unwrap()
                - 2.0f64.acosh())
            .abs()
                < 1e-15
        );
    }

    #[test]
    fn unbound_variable_reported() {
        let ast = parse("y1 + t").unwrap();
        assert_eq!(
            eval_ast(&ast, &Env::with_t(0.2)),
            Err(ExprError::Unbound(Variable::Y1))
        );
    }

    #[test]
    fn pi_is_self_binding() {
        let ast = parse("sin(2*pi*t)").unwrap();
        let v = eval_ast(&ast, &Env::with_t(0.25)).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn integer_powers_of_negative_bases() {
        let ast = parse("t^3").unwrap();
        assert_eq!(eval_ast(&ast, &Env::with_t(-2.0)).unwrap(), -8.0);
    }

    #[test]
    fn substitution_replaces_state_slots() {
        let g = parse("2*sinh(y)*cosh(y)*y1").unwrap();
        let u = parse("t^2").unwrap();
        let u1 = parse("2*t").unwrap();
        let out = g.substitute(&[(Variable::Y, &u), (Variable::Y1, &u1)]);
        assert!(out.variables() == vec![Variable::T]);
    }

    fn arb_expr() -> impl Strategy<Value = ExprAst> {
        let leaf = prop_oneof![
            (-3.0f64..3.0).prop_map(ExprAst::Number),
            Just(ExprAst::Var(Variable::T)),
            Just(ExprAst::Var(Variable::Pi)),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone(), prop_oneof![
                    Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul)
                ])
                    .prop_map(|(a, b, op)| ExprAst::binary(op, a, b)),
                (inner.clone(), prop_oneof![
                    Just(UnaryFn::Sin), Just(UnaryFn::Cos), Just(UnaryFn::Exp),
                    Just(UnaryFn::Sinh), Just(UnaryFn::Tanh), Just(UnaryFn::Neg),
                ])
                    .prop_map(|(a, f)| ExprAst::unary(f, a)),
                (inner, 1u32..4).prop_map(|(a, k)| ExprAst::binary(
                    BinOp::Pow,
                    a,
                    ExprAst::Number(k as f64)
                )),
            ]
        })
    }

    proptest! {
        // printing and re-parsing preserves the evaluated value
        #[test]
        fn print_parse_round_trip(ast in arb_expr(), t in 0.0f64..1.0) {
            let printed = ast.to_string();
            let reparsed = parse(&printed).unwrap_or_else(|e| {
                panic!("printer produced unparseable text {printed:?}: {e}")
            });
            let env = Env::with_t(t);
            let v1 = eval_ast(&ast, &env).unwrap();
            let v2 = eval_ast(&reparsed, &env).unwrap();
            if v1.is_finite() {
                prop_assert!((v1 - v2).abs() <= 1e-14 * v1.abs().max(1.0));
            }
        }
    }
}
