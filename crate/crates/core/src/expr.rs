//! The element expression grammar used by the CLI and element files:
//!
//! ```text
//! element := ['-'] term (('+'|'-') term)*
//! term    := [scalar ['*']] word | scalar
//! scalar  := integer ['/' integer]
//! word    := token+      token := id['*']
//! ```
//!
//! A word multiplies its generators left to right (`y1 y1*` is y1·y1*). A
//! bare id names the vertex of that name if one exists, otherwise the edge;
//! a trailing `*` always names a ghost edge. A bare scalar k stands for
//! k·(sum of all vertices), the identity of the finite-graph algebra. Any
//! word is legal input; composability is semantic and handled by reduction.

use num_bigint::BigInt;

use crate::element::Element;
use crate::error::AlgebraError;
use crate::quiver::GraphRef;
use crate::rewrite::{reduce_combination, resolve_generator, RawWord};
use crate::scalar::{FieldSpec, Scalar};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Id { name: String, ghost: bool },
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
}

fn err(position: usize, msg: impl Into<String>) -> AlgebraError {
    AlgebraError::Expr { position, msg: msg.into() }
}

fn lex(input: &str) -> Result<Vec<(usize, Token)>, AlgebraError> {
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        match c {
            '+' => {
                tokens.push((start, Token::Plus));
                i += 1;
            }
            '-' => {
                tokens.push((start, Token::Minus));
                i += 1;
            }
            '*' => {
                tokens.push((start, Token::Star));
                i += 1;
            }
            '/' => {
                tokens.push((start, Token::Slash));
                i += 1;
            }
            '0'..='9' => {
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = input[start..i].parse().expect("digits parse");
                tokens.push((start, Token::Int(n)));
            }
            _ if c.is_ascii_alphabetic() || c == '(' => {
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    if d.is_ascii_alphanumeric() || matches!(d, '_' | '(' | ')' | ',' | '.') {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let name = input[start..i].to_string();
                // a star glued to the id marks a ghost edge
                let ghost = i < bytes.len() && bytes[i] as char == '*';
                if ghost {
                    i += 1;
                }
                tokens.push((start, Token::Id { name, ghost }));
            }
            other => return Err(err(start, format!("unexpected character `{other}`"))),
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    graph: &'a GraphRef,
    field: FieldSpec,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn parse_scalar(&mut self) -> Result<Scalar, AlgebraError> {
        let at = self.here();
        let num = match self.bump() {
            Some(Token::Int(n)) => n,
            _ => return Err(err(at, "expected integer")),
        };
        if matches!(self.peek(), Some(Token::Slash)) {
            self.bump();
            let at = self.here();
            let den = match self.bump() {
                Some(Token::Int(d)) => d,
                _ => return Err(err(at, "expected denominator after `/`")),
            };
            self.field.ratio(&num, &den)
        } else {
            self.field.ratio(&num, &BigInt::from(1))
        }
    }

    fn parse_word(&mut self) -> Result<RawWord, AlgebraError> {
        let mut word = RawWord::new();
        while let Some(Token::Id { name, ghost }) = self.peek().cloned() {
            let at = self.here();
            self.bump();
            let gen = resolve_generator(self.graph, &name, ghost)
                .map_err(|e| err(at, e.to_string()))?;
            word.push(gen);
        }
        if word.is_empty() {
            return Err(err(self.here(), "expected a word of generators"));
        }
        Ok(word)
    }

    /// One term: scalar, word, or scalar [*] word.
    fn parse_term(&mut self) -> Result<(Scalar, Option<RawWord>), AlgebraError> {
        match self.peek() {
            Some(Token::Int(_)) => {
                let k = self.parse_scalar()?;
                if matches!(self.peek(), Some(Token::Star)) {
                    self.bump();
                    let word = self.parse_word()?;
                    Ok((k, Some(word)))
                } else if matches!(self.peek(), Some(Token::Id { .. })) {
                    let word = self.parse_word()?;
                    Ok((k, Some(word)))
                } else {
                    Ok((k, None))
                }
            }
            Some(Token::Id { .. }) => {
                let word = self.parse_word()?;
                Ok((self.field.one(), Some(word)))
            }
            _ => Err(err(self.here(), "expected a term")),
        }
    }

    fn parse_element(&mut self) -> Result<Element, AlgebraError> {
        let mut terms: Vec<(Scalar, RawWord)> = Vec::new();
        let mut constant = self.field.zero();

        let mut sign_negative = false;
        if matches!(self.peek(), Some(Token::Minus)) {
            self.bump();
            sign_negative = true;
        }
        loop {
            let (k, word) = self.parse_term()?;
            let k = if sign_negative { k.neg() } else { k };
            match word {
                Some(w) => terms.push((k, w)),
                None => constant = constant.add(&k),
            }
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    sign_negative = false;
                }
                Some(Token::Minus) => {
                    self.bump();
                    sign_negative = true;
                }
                None => break,
                _ => return Err(err(self.here(), "expected `+`, `-`, or end of expression")),
            }
        }

        let mut out = reduce_combination(self.graph, self.field, &terms)?;
        if !constant.is_zero() {
            let identity = Element::identity(self.graph.clone(), self.field);
            out = out.add(&identity.scale(&constant)?)?;
        }
        Ok(out)
    }
}

/// Parses one expression into a normal-form element.
pub fn parse_element(g: &GraphRef, field: FieldSpec, input: &str) -> Result<Element, AlgebraError> {
    let tokens = lex(input)?;
    if tokens.is_empty() {
        return Err(err(0, "empty expression"));
    }
    let mut p = Parser { tokens, pos: 0, graph: g, field, end: input.len() };
    let el = p.parse_element()?;
    if p.pos != p.tokens.len() {
        return Err(err(p.here(), "trailing input"));
    }
    Ok(el)
}

/// Parses an element file: one expression per line; `#` comments and blank
/// lines are skipped. Errors carry the line number.
pub fn parse_element_file(
    g: &GraphRef,
    field: FieldSpec,
    text: &str,
) -> Result<Vec<(usize, Element)>, AlgebraError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let el = parse_element(g, field, trimmed).map_err(|e| match e {
            AlgebraError::Expr { position, msg } => {
                AlgebraError::Expr { position, msg: format!("line {line}: {msg}") }
            }
            other => other,
        })?;
        out.push((line, el));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::Graph;
    use std::sync::Arc;

    const Q: FieldSpec = FieldSpec::Rational;

    fn rose(n: usize) -> GraphRef {
        let mut b = Graph::builder();
        b.vertex("v");
        for i in 1..=n {
            b.edge(format!("y{i}"), "v", "v");
        }
        Arc::new(b.build().unwrap())
    }

    #[test]
    fn ck1_through_the_grammar() {
        let g = rose(2);
        let el = parse_element(&g, Q, "y1* y1").unwrap();
        assert_eq!(el.display(), "v");
    }

    #[test]
    fn ck2_through_the_grammar() {
        let g = rose(2);
        let el = parse_element(&g, Q, "v - y1 y1* - y2 y2*").unwrap();
        assert!(el.is_zero());
    }

    #[test]
    fn scalars_combine() {
        let g = rose(2);
        let el = parse_element(&g, Q, "2/3 v + 1/3 v").unwrap();
        assert_eq!(el.display(), "v");
        let el = parse_element(&g, Q, "2 * y1 - y1").unwrap();
        assert_eq!(el.display(), "y1");
        let el = parse_element(&g, Q, "-y1 + y1").unwrap();
        assert!(el.is_zero());
    }

    #[test]
    fn bare_scalar_is_a_multiple_of_the_identity() {
        let g = rose(1); // single vertex: identity = v
        let el = parse_element(&g, Q, "3").unwrap();
        assert_eq!(el.display(), "3 v");
        let zero = parse_element(&g, Q, "0").unwrap();
        assert!(zero.is_zero());
    }

    #[test]
    fn errors_carry_positions() {
        let g = rose(1);
        match parse_element(&g, Q, "y1 + zz") {
            Err(AlgebraError::Expr { position, .. }) => assert_eq!(position, 5),
            other => panic!("expected position error, got {other:?}"),
        }
        assert!(parse_element(&g, Q, "1/0 v").is_err());
        assert!(parse_element(&g, Q, "").is_err());
    }

    #[test]
    fn element_files_report_lines() {
        let g = rose(2);
        let els = parse_element_file(&g, Q, "# a comment\nv + y1\n\ny2 y2*\n").unwrap();
        assert_eq!(els.len(), 2);
        assert_eq!(els[0].0, 2);
        assert_eq!(els[1].1.display(), "y2 y2*");
        let err = parse_element_file(&g, Q, "v\nqq\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn fp_scalars_parse() {
        let g = rose(1);
        let f5 = FieldSpec::fp(5).unwrap();
        let el = parse_element(&g, f5, "7 v").unwrap();
        assert_eq!(el.display(), "2 v");
        let el = parse_element(&g, f5, "1/2 v").unwrap();
        assert_eq!(el.display(), "3 v"); // 2^{-1} = 3 mod 5
    }
}
