//! Problem-file parsing and manufactured forcing.
//!
//! A problem file is UTF-8, line-oriented `key = value` text describing the
//! equation `y''' + G(t, y, y', y'') = f(t)` with periodic conditions:
//!
//! ```text
//! name = <identifier>
//! lhs_extra = <expression in t, y, y1, y2>      # the G term
//! forcing = manufactured | <expression in t>
//! exact = <expression in t>                     # required iff manufactured
//! default_n = <positive integer>
//! ```
//!
//! Lines starting with `#` are comments, keys may appear in any order, and a
//! duplicated key is an error. When `forcing = manufactured`, the forcing is
//! derived symbolically as f = u''' + G(t, u, u', u'') from the exact
//! solution u, which must satisfy the periodic conditions.

use thiserror::Error;

use super::{
    differentiate, eval_with_policy, parse, DomainPolicy, Env, ExprAst, ExprError, Variable,
};

#[derive(Debug, Error)]
pub enum ProblemFileError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("line {line}: duplicate key '{key}'")]
    DuplicateKey { key: String, line: usize },
    #[error("missing required key '{key}'")]
    MissingKey { key: &'static str },
    #[error("key '{key}': {reason}")]
    InvalidValue { key: &'static str, reason: String },
    #[error("key '{key}': {source}")]
    Expr {
        key: &'static str,
        #[source]
        source: ExprError,
    },
    #[error("exact solution violates the periodic conditions (defect {defect:e})")]
    BcViolation { defect: f64 },
    #[error("manufactured forcing is non-finite at t = {t}")]
    NonFiniteForcing { t: f64 },
}

/// The forcing side of the equation.
#[derive(Debug, Clone)]
pub enum Forcing {
    /// Derive f from the exact solution.
    Manufactured,
    /// Explicit expression in t.
    Explicit(ExprAst),
}

/// A parsed and validated problem definition.
#[derive(Debug, Clone)]
pub struct ProblemFile {
    pub name: String,
    pub lhs_extra: ExprAst,
    pub forcing: Forcing,
    pub exact: Option<ExprAst>,
    pub default_n: usize,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, ProblemFileError> {
        let mut name: Option<(String, usize)> = None;
        let mut lhs_extra: Option<(String, usize)> = None;
        let mut forcing: Option<(String, usize)> = None;
        let mut exact: Option<(String, usize)> = None;
        let mut default_n: Option<(String, usize)> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ProblemFileError::Syntax {
                    line: line_no,
                    reason: format!("expected 'key = value', got {line:?}"),
                });
            };
            let key = key.trim();
            let value = value.trim().to_string();
            let slot = match key {
                "name" => &mut name,
                "lhs_extra" => &mut lhs_extra,
                "forcing" => &mut forcing,
                "exact" => &mut exact,
                "default_n" => &mut default_n,
                other => {
                    return Err(ProblemFileError::Syntax {
                        line: line_no,
                        reason: format!("unknown key '{other}'"),
                    })
                }
            };
            if slot.is_some() {
                return Err(ProblemFileError::DuplicateKey {
                    key: key.to_string(),
                    line: line_no,
                });
            }
            *slot = Some((value, line_no));
        }

        let (name, _) = name.ok_or(ProblemFileError::MissingKey { key: "name" })?;
        let (lhs_text, _) = lhs_extra.ok_or(ProblemFileError::MissingKey { key: "lhs_extra" })?;
        let (forcing_text, _) = forcing.ok_or(ProblemFileError::MissingKey { key: "forcing" })?;
        let (n_text, _) = default_n.ok_or(ProblemFileError::MissingKey { key: "default_n" })?;

        let lhs_ast = parse(&lhs_text).map_err(|e| ProblemFileError::Expr {
            key: "lhs_extra",
            source: e.into(),
        })?;
        let allowed = [Variable::T, Variable::Y, Variable::Y1, Variable::Y2];
        for var in lhs_ast.variables() {
            if !allowed.contains(&var) {
                return Err(ProblemFileError::InvalidValue {
                    key: "lhs_extra",
                    reason: format!(
                        "variable '{var}' not allowed (the equation is third order with y''' \
                         isolated on the left)"
                    ),
                });
            }
        }

        let exact_ast = match &exact {
            Some((text, _)) => {
                let ast = parse(text).map_err(|e| ProblemFileError::Expr {
                    key: "exact",
                    source: e.into(),
                })?;
                for var in ast.variables() {
                    if var != Variable::T {
                        return Err(ProblemFileError::InvalidValue {
                            key: "exact",
                            reason: format!("must be an expression in t only, found '{var}'"),
                        });
                    }
                }
                Some(ast)
            }
            None => None,
        };

        let forcing = if forcing_text == "manufactured" {
            if exact_ast.is_none() {
                return Err(ProblemFileError::InvalidValue {
                    key: "exact",
                    reason: "required when forcing = manufactured".into(),
                });
            }
            Forcing::Manufactured
        } else {
            let ast = parse(&forcing_text).map_err(|e| ProblemFileError::Expr {
                key: "forcing",
                source: e.into(),
            })?;
            for var in ast.variables() {
                if var != Variable::T {
                    return Err(ProblemFileError::InvalidValue {
                        key: "forcing",
                        reason: format!("must be an expression in t only, found '{var}'"),
                    });
                }
            }
            Forcing::Explicit(ast)
        };

        let default_n: usize = n_text.parse().map_err(|_| ProblemFileError::InvalidValue {
            key: "default_n",
            reason: format!("expected a positive integer, got {n_text:?}"),
        })?;
        if default_n < 2 {
            return Err(ProblemFileError::InvalidValue {
                key: "default_n",
                reason: "must be at least 2".into(),
            });
        }

        let problem = ProblemFile {
            name,
            lhs_extra: lhs_ast,
            forcing,
            exact: exact_ast,
            default_n,
        };
        problem.validate_exact()?;
        Ok(problem)
    }

    /// Check the periodic conditions of the exact solution at load time.
    fn validate_exact(&self) -> Result<(), ProblemFileError> {
        let Some(exact) = &self.exact else {
            return Ok(());
        };
        let d1 = differentiate(exact, Variable::T)
            .map_err(|e| ProblemFileError::Expr { key: "exact", source: e })?;
        let d2 = differentiate(&d1, Variable::T)
            .map_err(|e| ProblemFileError::Expr { key: "exact", source: e })?;
        let mut defect = 0.0f64;
        for ast in [exact, &d1, &d2] {
            let v0 = eval_with_policy(ast, &Env::with_t(0.0), DomainPolicy::PrincipalRealPart)
                .map_err(|e| ProblemFileError::Expr { key: "exact", source: e })?;
            let v1 = eval_with_policy(ast, &Env::with_t(1.0), DomainPolicy::PrincipalRealPart)
                .map_err(|e| ProblemFileError::Expr { key: "exact", source: e })?;
            defect = defect.max((v0 - v1).abs());
        }
        if defect > 1e-9 {
            return Err(ProblemFileError::BcViolation { defect });
        }
        Ok(())
    }

    /// The forcing as a single expression in t: either the explicit one, or
    /// f = u''' + G(t, u, u', u'') manufactured from the exact solution.
    pub fn derive_forcing(&self) -> Result<ExprAst, ProblemFileError> {
        let ast = match &self.forcing {
            Forcing::Explicit(ast) => ast.clone(),
            Forcing::Manufactured => {
                let u = self.exact.as_ref().expect("validated at parse time");
                let wrap = |e: ExprError| ProblemFileError::Expr { key: "exact", source: e };
                let u1 = differentiate(u, Variable::T).map_err(wrap)?;
                let u2 = differentiate(&u1, Variable::T).map_err(wrap)?;
                let u3 = differentiate(&u2, Variable::T).map_err(wrap)?;
                let g_of_u = self.lhs_extra.substitute(&[
                    (Variable::Y, u),
                    (Variable::Y1, &u1),
                    (Variable::Y2, &u2),
                ]);
                super::deriv::fold(&ExprAst::binary(super::BinOp::Add, u3, g_of_u))
            }
        };
        // finiteness spot-check across the interval
        for i in 0..=10 {
            let t = i as f64 / 10.0;
            let v = eval_with_policy(&ast, &Env::with_t(t), DomainPolicy::PrincipalRealPart)
                .map_err(|e| ProblemFileError::Expr { key: "forcing", source: e })?;
            if !v.is_finite() {
                return Err(ProblemFileError::NonFiniteForcing { t });
            }
        }
        Ok(ast)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::eval_ast;

    const EXAMPLE_2: &str = "\
# nonlinear problem with a polynomial exact solution
name = example2
lhs_extra = -cos(t)*y2^3 + 2*sinh(y)*cosh(y)*y1
forcing = manufactured
exact = t^2*(1-t)^2/2
default_n = 36
";

    #[test]
    fn parses_a_complete_file() {
        let p = ProblemFile::parse(EXAMPLE_2).unwrap();
        assert_eq!(p.name, "example2");
        assert_eq!(p.default_n, 36);
        assert!(matches!(p.forcing, Forcing::Manufactured));
    }

    #[test]
    fn manufactured_forcing_value_at_zero() {
        // u = t^2 (1-t)^2 / 2: u''(0) = 1, u'''(0) = -6, so
        // f(0) = u'''(0) - cos(0) u''(0)^3 + 0 = -7
        let p = ProblemFile::parse(EXAMPLE_2).unwrap();
        let f = p.derive_forcing().unwrap();
        let v = eval_ast(&f, &Env::with_t(0.0)).unwrap();
        assert!((v - -7.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn manufactured_forcing_for_bump_exponential() {
        // u = exp(t^2 (1-t)^2) with G = t y2: f(0) = u'''(0) = -12
        let text = "\
name = example1
lhs_extra = t*y2
forcing = manufactured
exact = exp(t^2*(1-t)^2)
default_n = 51
";
        let p = ProblemFile::parse(text).unwrap();
        let f = p.derive_forcing().unwrap();
        let v = eval_ast(&f, &Env::with_t(0.0)).unwrap();
        assert!((v - -12.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn manufactured_forcing_for_pure_sine() {
        // G = 0, u = sin(2 pi t): f = u''' = -(2 pi)^3 cos(2 pi t)
        let text = "\
name = sine
lhs_extra = 0
forcing = manufactured
exact = sin(2*pi*t)
default_n = 11
";
        let p = ProblemFile::parse(text).unwrap();
        let f = p.derive_forcing().unwrap();
        let v = eval_ast(&f, &Env::with_t(0.0)).unwrap();
        let want = -(2.0 * std::f64::consts::PI).powi(3);
        assert!((v - want).abs() < 1e-9 * want.abs(), "{v} vs {want}");
    }

    #[test]
    fn duplicate_key_rejected() {
        let text = "name = a\nname = b\nlhs_extra = 0\nforcing = 0\ndefault_n = 5\n";
        assert!(matches!(
            ProblemFile::parse(text),
            Err(ProblemFileError::DuplicateKey { .. })
        ));
    }

    #[test]
    fn missing_exact_with_manufactured_rejected() {
        let text = "name = a\nlhs_extra = 0\nforcing = manufactured\ndefault_n = 5\n";
        assert!(matches!(
            ProblemFile::parse(text),
            Err(ProblemFileError::InvalidValue { key: "exact", .. })
        ));
    }

    #[test]
    fn y3_in_lhs_rejected() {
        let text = "name = a\nlhs_extra = y3\nforcing = 0\ndefault_n = 5\n";
        assert!(matches!(
            ProblemFile::parse(text),
            Err(ProblemFileError::InvalidValue { key: "lhs_extra", .. })
        ));
    }

    #[test]
    fn non_periodic_exact_rejected() {
        let text = "name = a\nlhs_extra = 0\nforcing = manufactured\nexact = t\ndefault_n = 5\n";
        assert!(matches!(
            ProblemFile::parse(text),
            Err(ProblemFileError::BcViolation { .. })
        ));
    }

    #[test]
    fn comments_keys_in_any_order() {
        let text = "\
# leading comment
default_n = 7
forcing = sin(2*pi*t)

lhs_extra = t*y2
name = reordered
";
        let p = ProblemFile::parse(text).unwrap();
        assert_eq!(p.name, "reordered");
        assert!(p.exact.is_none());
    }

    #[test]
    fn manufactured_identity_holds_pointwise() {
        // u''' + G(t, u, u', u'') - f(t) must vanish identically
        for text in [
            EXAMPLE_2,
            "name = e3\nlhs_extra = y2 + t*y1^2 - acosh(y)\nforcing = manufactured\nexact = cosh(t^2-t)\ndefault_n = 26\n",
        ] {
            let p = ProblemFile::parse(text).unwrap();
            let f = p.derive_forcing().unwrap();
            let u = p.exact.clone().unwrap();
            let u1 = differentiate(&u, Variable::T).unwrap();
            let u2 = differentiate(&u1, Variable::T).unwrap();
            let u3 = differentiate(&u2, Variable::T).unwrap();
            for i in 0..=100 {
                let t = i as f64 / 100.0;
                let envt = Env::with_t(t);
                let env = Env::with_state(
                    t,
                    eval_ast(&u, &envt).unwrap(),
                    eval_ast(&u1, &envt).unwrap(),
                    eval_ast(&u2, &envt).unwrap(),
                );
                let lhs = eval_ast(&u3, &envt).unwrap()
                    + eval_with_policy(&p.lhs_extra, &env, DomainPolicy::PrincipalRealPart)
                        .unwrap();
                let rhs =
                    eval_with_policy(&f, &envt, DomainPolicy::PrincipalRealPart).unwrap();
                assert!(
                    (lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0),
                    "{} at t = {t}: {lhs} vs {rhs}",
                    p.name
                );
            }
        }
    }
}
