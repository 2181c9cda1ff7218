//! Recursive-descent Pratt parser for the expression language.
//!
//! Grammar conventions: `^` binds tightest and associates right, then unary
//! minus, then `* /`, then `+ -`, all left-associative. Function application
//! requires parentheses, whitespace is insignificant, and every error carries
//! the byte offset plus the set of tokens that would have been accepted.

use thiserror::Error;

use super::{BinOp, ExprAst, UnaryFn, Variable};

#[derive(Debug, Error, PartialEq)]
#[error("parse error at byte {offset}: found {found}, expected {}", expected.join(", "))]
pub struct ParseError {
    pub offset: usize,
    pub found: String,
    pub expected: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(v) => format!("number {v}"),
            Token::Ident(s) => format!("identifier '{s}'"),
            Token::Plus => "'+'".into(),
            Token::Minus => "'-'".into(),
            Token::Star => "'*'".into(),
            Token::Slash => "'/'".into(),
            Token::Caret => "'^'".into(),
            Token::LParen => "'('".into(),
            Token::RParen => "')'".into(),
            Token::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            text: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_whitespace(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next_token(&mut self) -> Result<(usize, Token), ParseError> {
        self.skip_whitespace();
        let start = self.pos;
        if self.pos >= self.text.len() {
            return Ok((start, Token::Eof));
        }
        let c = self.text[self.pos];
        let simple = match c {
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            self.pos += 1;
            return Ok((start, tok));
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.lex_number(start);
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self.pos < self.text.len()
                && (self.text[self.pos].is_ascii_alphanumeric() || self.text[self.pos] == b'_')
            {
                self.pos += 1;
            }
            let ident = std::str::from_utf8(&self.text[start..self.pos])
                .expect("ascii slice")
                .to_string();
            return Ok((start, Token::Ident(ident)));
        }
        Err(ParseError {
            offset: start,
            found: format!("character {:?}", c as char),
            expected: vec!["number", "identifier", "operator", "'('"],
        })
    }

    fn lex_number(&mut self, start: usize) -> Result<(usize, Token), ParseError> {
        let mut seen_dot = false;
        while self.pos < self.text.len() {
            let c = self.text[self.pos];
            if c.is_ascii_digit() {
                self.pos += 1;
            } else if c == b'.' && !seen_dot {
                seen_dot = true;
                self.pos += 1;
            } else {
                break;
            }
        }
        // optional exponent
        if self.pos < self.text.len()
            && (self.text[self.pos] == b'e' || self.text[self.pos] == b'E')
        {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.text.len()
                && (self.text[self.pos] == b'+' || self.text[self.pos] == b'-')
            {
                self.pos += 1;
            }
            if self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
                while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                // not an exponent after all (e.g. "2e" followed by junk)
                self.pos = mark;
            }
        }
        let raw = std::str::from_utf8(&self.text[start..self.pos]).expect("ascii slice");
        raw.parse::<f64>()
            .map(|v| (start, Token::Number(v)))
            .map_err(|_| ParseError {
                offset: start,
                found: format!("malformed number {raw:?}"),
                expected: vec!["number"],
            })
    }
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    cursor: usize,
    end_offset: usize,
}

impl Parser {
    fn peek(&self) -> &(usize, Token) {
        &self.tokens[self.cursor]
    }

    fn advance(&mut self) -> (usize, Token) {
        let tok = self.tokens[self.cursor].clone();
        if self.cursor + 1 < self.tokens.len() {
            self.cursor += 1;
        }
        tok
    }

    fn expect(&mut self, want: &Token, expected: &'static str) -> Result<(), ParseError> {
        let (offset, tok) = self.advance();
        if &tok == want {
            Ok(())
        } else {
            Err(ParseError {
                offset,
                found: tok.describe(),
                expected: vec![expected],
            })
        }
    }

    fn parse_expr(&mut self, min_bp: u8) -> Result<ExprAst, ParseError> {
        let mut lhs = self.parse_prefix()?;
        loop {
            let (_, tok) = self.peek();
            let (op, lbp, rbp) = match tok {
                Token::Plus => (BinOp::Add, 10, 11),
                Token::Minus => (BinOp::Sub, 10, 11),
                Token::Star => (BinOp::Mul, 20, 21),
                Token::Slash => (BinOp::Div, 20, 21),
                Token::Caret => (BinOp::Pow, 41, 40), // right-associative
                _ => break,
            };
            if lbp < min_bp {
                break;
            }
            self.advance();
            let rhs = self.parse_expr(rbp)?;
            lhs = ExprAst::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_prefix(&mut self) -> Result<ExprAst, ParseError> {
        let (offset, tok) = self.advance();
        match tok {
            Token::Number(v) => Ok(ExprAst::Number(v)),
            Token::Minus => {
                // unary minus: tighter than * /, looser than ^
                let inner = self.parse_expr(30)?;
                Ok(ExprAst::unary(UnaryFn::Neg, inner))
            }
            Token::LParen => {
                let inner = self.parse_expr(0)?;
                self.expect(&Token::RParen, "')'")?;
                Ok(inner)
            }
            Token::Ident(name) => self.parse_ident(offset, &name),
            other => Err(ParseError {
                offset,
                found: other.describe(),
                expected: vec!["number", "identifier", "'('", "'-'"],
            }),
        }
    }

    fn parse_ident(&mut self, offset: usize, name: &str) -> Result<ExprAst, ParseError> {
        if let Some(func) = UnaryFn::from_name(name) {
            let (paren_offset, tok) = self.peek().clone();
            if tok != Token::LParen {
                return Err(ParseError {
                    offset: if tok == Token::Eof { self.end_offset } else { paren_offset },
                    found: tok.describe(),
                    expected: vec!["'('"],
                });
            }
            self.advance();
            let (inner_offset, inner_tok) = self.peek().clone();
            if inner_tok == Token::RParen {
                return Err(ParseError {
                    offset: inner_offset,
                    found: "')' (empty argument)".into(),
                    expected: vec!["expression"],
                });
            }
            let arg = self.parse_expr(0)?;
            self.expect(&Token::RParen, "')'")?;
            return Ok(ExprAst::unary(func, arg));
        }
        if let Some(var) = Variable::from_name(name) {
            return Ok(ExprAst::Var(var));
        }
        Err(ParseError {
            offset,
            found: format!("unknown identifier '{name}'"),
            expected: vec!["variable", "function name"],
        })
    }
}

/// Parse an expression from text.
pub fn parse(text: &str) -> Result<ExprAst, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut tokens = Vec::new();
    loop {
        let (offset, tok) = lexer.next_token()?;
        let is_eof = tok == Token::Eof;
        tokens.push((offset, tok));
        if is_eof {
            break;
        }
    }
    let mut parser = Parser {
        tokens,
        cursor: 0,
        end_offset: text.len(),
    };
    let ast = parser.parse_expr(0)?;
    let (offset, tok) = parser.peek().clone();
    if tok != Token::Eof {
        return Err(ParseError {
            offset,
            found: tok.describe(),
            expected: vec!["operator", "end of input"],
        });
    }
    Ok(ast)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{eval_ast, Env};

    fn eval_t(text: &str, t: f64) -> f64 {
        eval_ast(&parse(text).unwrap(), &Env::with_t(t)).unwrap()
    }

    #[test]
    fn multiplication_binds_tighter_than_addition() {
        assert_eq!(eval_t("1+2*3", 0.0), 7.0);
    }

    #[test]
    fn power_binds_tightest_and_associates_right() {
        assert_eq!(eval_t("2^3^2", 0.0), 512.0);
        assert_eq!(eval_t("-2^2", 0.0), -4.0);
        assert_eq!(eval_t("2*t^2", 3.0), 18.0);
    }

    #[test]
    fn left_associativity_of_sub_and_div() {
        assert_eq!(eval_t("8-3-2", 0.0), 3.0);
        assert_eq!(eval_t("16/4/2", 0.0), 2.0);
    }

    #[test]
    fn unary_minus_interactions() {
        assert_eq!(eval_t("-t*3", 2.0), -6.0);
        assert_eq!(eval_t("2*-t", 3.0), -6.0);
        assert_eq!(eval_t("--t", 5.0), 5.0);
    }

    #[test]
    fn function_application() {
        assert!((eval_t("cosh(t^2-t)", 1.0) - 1.0).abs() < 1e-15);
        assert!((eval_t("neg(t)", 0.25) + 0.25).abs() < 1e-15);
    }

    #[test]
    fn unclosed_function_call_reports_offset() {
        let err = parse("sin(").unwrap_err();
        assert_eq!(err.offset, 4);
    }

    #[test]
    fn scientific_notation() {
        assert_eq!(eval_t("1.5e2", 0.0), 150.0);
        assert_eq!(eval_t("2E-1", 0.0), 0.2);
    }

    #[test]
    fn malformed_corpus_all_rejected() {
        let corpus = [
            "",
            "sin(",
            "1+",
            "(2*3",
            "foo(t)",
            "1..2",
            "t y",
            "^2",
            "2**3",
            "sin()",
            "sin t",
            ")",
            "1 + * 2",
            "cosh(t))",
            "t @ 2",
            "exp(-)",
        ];
        for text in corpus {
            let result = parse(text);
            assert!(result.is_err(), "{text:?} unexpectedly parsed");
            let err = result.unwrap_err();
            assert!(!err.expected.is_empty(), "{text:?}: no expected set");
            assert!(err.offset <= text.len());
        }
    }
}
