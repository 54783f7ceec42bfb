//! Recursive-descent parser for the formula language.
//!
//! ```text
//! formula   ::= and ( '|' and )*
//! and       ::= unary ( '&' unary )*
//! unary     ::= '!' unary | modality | atom
//! modality  ::= '<' '{' agents '}' [ ':' bound ] '>' ( 'X' unary | 'G' unary | '(' formula 'U' formula ')' )
//! agents    ::= [ name ( ',' name )* ]
//! bound     ::= amount ( ',' amount )*
//! amount    ::= digits | 'inf'
//! atom      ::= 'true' | 'false' | name | '(' formula ')'
//! ```
//!
//! With endowments enabled, the coalition may instead list one row per
//! member, `<{a:1,0; b:2,1}>`, which is replaced by the per-resource sum.

use std::fmt;

use thiserror::Error;

use super::{Coalition, Formula};
use crate::vector::{Amount, BoundVec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("at {pos}: bound components must be natural numbers or `inf`, found `-{found}`")]
    NegativeBound { pos: usize, found: String },
    #[error("at {pos}: coalition member `{agent}` has no endowment row")]
    MissingEndowment { pos: usize, agent: String },
    #[error("at {pos}: endowment rows have different lengths")]
    EndowmentLength { pos: usize },
    #[error("at {pos}: endowment sum overflows")]
    EndowmentOverflow { pos: usize },
    #[error("at {pos}: endowments are only accepted by `translate`")]
    EndowmentNotAllowed { pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lt,
    Gt,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Comma,
    Semi,
    Bang,
    Bar,
    Amp,
    Minus,
    Word(String),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Colon => ":",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Bang => "!",
            Tok::Bar => "|",
            Tok::Amp => "&",
            Tok::Minus => "-",
            Tok::Word(w) => return write!(f, "`{w}`"),
            Tok::Eof => return write!(f, "end of input"),
        };
        write!(f, "`{s}`")
    }
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        let tok = match c {
            c if c.is_whitespace() => {
                chars.next();
                continue;
            }
            '<' => Tok::Lt,
            '>' => Tok::Gt,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ':' => Tok::Colon,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '!' => Tok::Bang,
            '|' => Tok::Bar,
            '&' => Tok::Amp,
            '-' => Tok::Minus,
            c if is_word_char(c) => {
                let mut w = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if !is_word_char(c) {
                        break;
                    }
                    w.push(c);
                    chars.next();
                }
                out.push((pos, Tok::Word(w)));
                continue;
            }
            other => {
                return Err(ParseError::Syntax { pos, msg: format!("unexpected character `{other}`") })
            }
        };
        chars.next();
        out.push((pos, tok));
    }
    out.push((text.len(), Tok::Eof));
    Ok(out)
}

const KEYWORDS: [&str; 5] = ["X", "G", "U", "true", "false"];

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    endowments: bool,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if t != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {want}, found {}", self.peek()))
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Tok::Word(w) if w == kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let r = self.conjunction()?;
            f = Formula::or(f, r);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let r = self.unary()?;
            f = Formula::and(f, r);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Lt => self.modality(),
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Word(w) => match w.as_str() {
                "true" => {
                    self.bump();
                    Ok(Formula::True)
                }
                "false" => {
                    self.bump();
                    Ok(Formula::False)
                }
                kw if KEYWORDS.contains(&kw) => {
                    self.error(format!("keyword `{kw}` cannot be used as a proposition"))
                }
                _ => {
                    self.bump();
                    Ok(Formula::Prop(w))
                }
            },
            other => self.error(format!("expected a formula, found {other}")),
        }
    }

    fn name(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Word(w) => {
                self.bump();
                Ok(w)
            }
            other => self.error(format!("expected {what}, found {other}")),
        }
    }

    fn amount(&mut self) -> Result<Amount, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                let found = match self.peek() {
                    Tok::Word(w) => w.clone(),
                    _ => String::new(),
                };
                Err(ParseError::NegativeBound { pos, found })
            }
            Tok::Word(w) if w == "inf" => {
                self.bump();
                Ok(Amount::Infinite)
            }
            Tok::Word(w) if w.chars().all(|c| c.is_ascii_digit()) => {
                self.bump();
                w.parse::<u64>()
                    .map(Amount::Finite)
                    .map_err(|_| ParseError::Syntax { pos, msg: format!("bound `{w}` is too large") })
            }
            other => self.error(format!("expected a natural number or `inf`, found {other}")),
        }
    }

    fn bound(&mut self) -> Result<BoundVec, ParseError> {
        let mut v = vec![self.amount()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            v.push(self.amount()?);
        }
        Ok(BoundVec::new(v))
    }

    /// Parses `{...}` followed by an optional `: bound` and the closing `>`.
    fn annotation(&mut self) -> Result<(Coalition, BoundVec), ParseError> {
        self.expect(Tok::LBrace)?;
        if *self.peek() == Tok::RBrace {
            self.bump();
            return self.plain_bound(Coalition::empty());
        }
        let start = self.pos();
        let first = self.name("an agent name")?;
        if *self.peek() == Tok::Colon {
            if !self.endowments {
                return Err(ParseError::EndowmentNotAllowed { pos: start });
            }
            return self.endowment(start, first);
        }
        let mut agents = vec![first];
        while *self.peek() == Tok::Comma {
            self.bump();
            agents.push(self.name("an agent name")?);
        }
        self.expect(Tok::RBrace)?;
        self.plain_bound(Coalition::new(agents))
    }

    fn plain_bound(&mut self, c: Coalition) -> Result<(Coalition, BoundVec), ParseError> {
        let b = if *self.peek() == Tok::Colon {
            self.bump();
            if *self.peek() == Tok::Gt {
                BoundVec::new(vec![])
            } else {
                self.bound()?
            }
        } else {
            BoundVec::new(vec![])
        };
        self.expect(Tok::Gt)?;
        Ok((c, b))
    }

    fn endowment(&mut self, start: usize, first: String) -> Result<(Coalition, BoundVec), ParseError> {
        let mut rows: Vec<(String, BoundVec)> = Vec::new();
        let mut agent = first;
        loop {
            self.expect(Tok::Colon)?;
            let row = self.bound()?;
            if rows.iter().any(|(a, _)| *a == agent) {
                return self.error(format!("agent `{agent}` has two endowment rows"));
            }
            rows.push((agent, row));
            if *self.peek() == Tok::Semi {
                self.bump();
                agent = self.name("an agent name")?;
            } else {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        // An explicit coalition may follow: `<{a:1; b:2} {a,b}>`.
        let coalition = if *self.peek() == Tok::LBrace {
            self.bump();
            let mut agents = Vec::new();
            if *self.peek() != Tok::RBrace {
                agents.push(self.name("an agent name")?);
                while *self.peek() == Tok::Comma {
                    self.bump();
                    agents.push(self.name("an agent name")?);
                }
            }
            self.expect(Tok::RBrace)?;
            Coalition::new(agents)
        } else {
            Coalition::new(rows.iter().map(|(a, _)| a.clone()))
        };
        self.expect(Tok::Gt)?;

        let len = rows[0].1.len();
        if rows.iter().any(|(_, r)| r.len() != len) {
            return Err(ParseError::EndowmentLength { pos: start });
        }
        let mut sum = BoundVec::zero(len);
        for a in coalition.iter() {
            let row = rows
                .iter()
                .find(|(name, _)| name == a)
                .map(|(_, r)| r)
                .ok_or_else(|| ParseError::MissingEndowment { pos: start, agent: a.to_string() })?;
            sum = sum
                .checked_add(row)
                .map_err(|_| ParseError::EndowmentOverflow { pos: start })?;
        }
        Ok((coalition, sum))
    }

    fn modality(&mut self) -> Result<Formula, ParseError> {
        self.expect(Tok::Lt)?;
        let (c, b) = self.annotation()?;
        if self.keyword("X") {
            return Ok(Formula::next(c, b, self.unary()?));
        }
        if self.keyword("G") {
            return Ok(Formula::always(c, b, self.unary()?));
        }
        if *self.peek() == Tok::LParen {
            self.bump();
            let l = self.formula()?;
            if !self.keyword("U") {
                return self.error(format!("expected `U`, found {}", self.peek()));
            }
            let r = self.formula()?;
            self.expect(Tok::RParen)?;
            return Ok(Formula::until(c, b, l, r));
        }
        self.error(format!("expected `X`, `G` or `(`, found {}", self.peek()))
    }
}

fn run(text: &str, endowments: bool) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0, endowments };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {} after formula", p.peek()));
    }
    Ok(f)
}

/// Parses a formula in the bound syntax.
///
/// ```
/// use rbatl::formula::parse_formula;
///
/// let f = parse_formula("<{a1}: 3,1> (true U p)").unwrap();
/// assert_eq!(f.to_string(), "<{a1}: 3,1> (true U p)");
/// ```
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    run(text, false)
}

/// Parses a formula whose modalities may carry per-agent endowments and
/// replaces each endowment by its per-resource sum over the coalition.
pub fn translate_endowments(text: &str) -> Result<Formula, ParseError> {
    run(text, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn until_example() {
        assert_eq!(
            p("<{a1}: 3,1> (true U p)"),
            Formula::until(Coalition::new(["a1"]), BoundVec::finite(&[3, 1]), Formula::True, Formula::prop("p"))
        );
    }

    #[test]
    fn infinite_bound() {
        assert_eq!(
            p("<{a1}: inf,inf> G p"),
            Formula::always(Coalition::new(["a1"]), BoundVec::infinite(2), Formula::prop("p"))
        );
    }

    #[test]
    fn negative_bound_rejected() {
        assert!(matches!(parse_formula("<{a1}: -1> X p"), Err(ParseError::NegativeBound { pos: 7, .. })));
    }

    #[test]
    fn precedence() {
        assert_eq!(
            p("!a | b & c"),
            Formula::or(
                Formula::not(Formula::prop("a")),
                Formula::and(Formula::prop("b"), Formula::prop("c"))
            )
        );
        assert_eq!(
            p("<{}: 0> X a | b"),
            Formula::or(
                Formula::next(Coalition::empty(), BoundVec::finite(&[0]), Formula::prop("a")),
                Formula::prop("b")
            )
        );
    }

    #[test]
    fn empty_bound_for_zero_resources() {
        let f = p("<{a}> G p");
        assert_eq!(f.bound().unwrap().len(), 0);
        assert_eq!(p("<{a}:> G p"), f);
        assert_eq!(f.to_string(), "<{a}> G p");
    }

    #[test]
    fn errors_carry_positions() {
        match parse_formula("p & ") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert!(parse_formula("<{a}: 1> (p U)").is_err());
        assert!(parse_formula("<{a}: 1> p").is_err());
        assert!(parse_formula("X").is_err());
        assert!(parse_formula("p q").is_err());
        assert!(parse_formula("p $ q").is_err());
        assert!(matches!(
            parse_formula("<{a:1}> X p"),
            Err(ParseError::EndowmentNotAllowed { .. })
        ));
    }

    #[test]
    fn endowment_sum() {
        assert_eq!(
            translate_endowments("<{a:1; b:2}> X p").unwrap(),
            p("<{a,b}: 3> X p")
        );
        assert_eq!(translate_endowments("<{a:4,1}> G q").unwrap(), p("<{a}: 4,1> G q"));
        assert_eq!(
            translate_endowments("<{a:1,inf; b:2,0}> (true U p)").unwrap(),
            p("<{a,b}: 3,inf> (true U p)")
        );
        // Plain bounds pass through unchanged.
        assert_eq!(translate_endowments("<{a}: 1> X p").unwrap(), p("<{a}: 1> X p"));
        // Nested endowments are translated recursively.
        assert_eq!(
            translate_endowments("<{a:1}> X <{a:2; b:3}> G p").unwrap(),
            p("<{a}: 1> X <{a,b}: 5> G p")
        );
    }

    #[test]
    fn endowment_errors() {
        assert!(matches!(
            translate_endowments("<{a:1; b:2} {a,c}> X p"),
            Err(ParseError::MissingEndowment { agent, .. }) if agent == "c"
        ));
        assert_eq!(
            translate_endowments("<{a:1; b:2} {a}> X p").unwrap(),
            p("<{a}: 1> X p")
        );
        assert!(matches!(
            translate_endowments("<{a:1; b:2,0}> X p"),
            Err(ParseError::EndowmentLength { .. })
        ));
    }
}
