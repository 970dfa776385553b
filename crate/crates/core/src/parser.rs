//! Recursive-descent parser for the ASCII formula grammar.
//!
//! Precedence from tightest to loosest: `~` and the quantifier prefixes
//! `forall x.` / `exists x.`, then `&`, `|` (both left associative), then `->`
//! (right associative) and `<->`. A quantifier prefix binds like negation, so
//! `exists x. P(x) & Q` is a conjunction; write `exists x. (P(x) & Q)` to
//! widen the scope. Unicode spellings `¬ ∧ ∨ → ↔ ⊤ ⊥ ∀ ∃ ∈` are accepted.

use crate::error::{Error, Result};
use crate::formula::{self, Formula, Lang, EQ, IN};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Imp,
    Iff,
    Forall,
    Exists,
    In,
    Eq,
    LParen,
    RParen,
    Comma,
    Dot,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::True => "`true`".into(),
        Tok::False => "`false`".into(),
        Tok::Not => "`~`".into(),
        Tok::And => "`&`".into(),
        Tok::Or => "`|`".into(),
        Tok::Imp => "`->`".into(),
        Tok::Iff => "`<->`".into(),
        Tok::Forall => "`forall`".into(),
        Tok::Exists => "`exists`".into(),
        Tok::In => "`in`".into(),
        Tok::Eq => "`=`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Dot => "`.`".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut ident = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if c.is_alphanumeric() || c == '_' || c == '\'' {
                    ident.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            let tok = match ident.as_str() {
                "true" => Tok::True,
                "false" => Tok::False,
                "forall" => Tok::Forall,
                "exists" => Tok::Exists,
                "in" => Tok::In,
                _ => Tok::Ident(ident),
            };
            out.push((pos, tok));
            continue;
        }
        chars.next();
        let tok = match c {
            '~' | '¬' => Tok::Not,
            '&' | '∧' => Tok::And,
            '|' | '∨' => Tok::Or,
            '→' => Tok::Imp,
            '↔' => Tok::Iff,
            '⊤' => Tok::True,
            '⊥' => Tok::False,
            '∀' => Tok::Forall,
            '∃' => Tok::Exists,
            '∈' => Tok::In,
            '=' => Tok::Eq,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '-' => match chars.next() {
                Some((_, '>')) => Tok::Imp,
                _ => {
                    return Err(Error::Syntax {
                        pos,
                        msg: "expected `->`".into(),
                    })
                }
            },
            '<' => match (chars.next(), chars.next()) {
                (Some((_, '-')), Some((_, '>'))) => Tok::Iff,
                _ => {
                    return Err(Error::Syntax {
                        pos,
                        msg: "expected `<->`".into(),
                    })
                }
            },
            other => {
                return Err(Error::Syntax {
                    pos,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((pos, tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => self.err(format!(
                    "expected {}, found {}",
                    describe(t),
                    describe(found)
                )),
                None => self.err(format!("expected {}, found end of input", describe(t))),
            }
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.at += 1;
                Ok(s)
            }
            Some(found) => self.err(format!("expected identifier, found {}", describe(&found))),
            None => self.err("expected identifier, found end of input"),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Imp) {
            Ok(formula::implies(lhs, self.formula()?))
        } else if self.eat(&Tok::Iff) {
            Ok(formula::iff(lhs, self.disjunction()?))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut acc = self.conjunction()?;
        while self.eat(&Tok::Or) {
            acc = formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut acc = self.unary()?;
        while self.eat(&Tok::And) {
            acc = formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(Tok::Not) => {
                self.at += 1;
                Ok(formula::not(self.unary()?))
            }
            Some(Tok::Forall) | Some(Tok::Exists) => {
                let universal = self.peek() == Some(&Tok::Forall);
                self.at += 1;
                let var = self.ident()?;
                self.expect(&Tok::Dot)?;
                let body = Box::new(self.unary()?);
                Ok(if universal {
                    Formula::Forall(var, body)
                } else {
                    Formula::Exists(var, body)
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula> {
        match self.peek().cloned() {
            Some(Tok::True) => {
                self.at += 1;
                Ok(Formula::Top)
            }
            Some(Tok::False) => {
                self.at += 1;
                Ok(Formula::Bot)
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let f = self.formula()?;
                self.expect(&Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                if self.eat(&Tok::In) {
                    let rhs = self.ident()?;
                    return Ok(Formula::Atom(IN.into(), vec![name, rhs]));
                }
                if self.eat(&Tok::Eq) {
                    let rhs = self.ident()?;
                    return Ok(Formula::Atom(EQ.into(), vec![name, rhs]));
                }
                let mut args = Vec::new();
                if self.eat(&Tok::LParen) {
                    loop {
                        args.push(self.ident()?);
                        if self.eat(&Tok::RParen) {
                            break;
                        }
                        self.expect(&Tok::Comma)?;
                    }
                }
                Ok(Formula::Atom(name, args))
            }
            Some(found) => self.err(format!("unexpected {}", describe(&found))),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses `text` and checks it against the invariants of `lang`.
pub fn parse_formula(text: &str, lang: Lang) -> Result<Formula> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        end: text.len(),
    };
    let f = p.formula()?;
    if let Some(t) = p.peek() {
        let t = describe(t);
        return p.err(format!("trailing input starting with {t}"));
    }
    f.check_lang(lang)?;
    Ok(f)
}

/// Parses a propositional formula.
pub fn prop(text: &str) -> Result<Formula> {
    parse_formula(text, Lang::Propositional)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::*;

    #[test]
    fn identity_implication() {
        assert_eq!(prop("p -> p").unwrap(), implies(atom("p"), atom("p")));
    }

    #[test]
    fn quantifier_prefix_binds_tightly() {
        let f = parse_formula("exists x. P(x) & exists x. ~P(x)", Lang::FirstOrder).unwrap();
        let expected = and(
            exists("x", pred("P", &["x"])),
            exists("x", not(pred("P", &["x"]))),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn stray_symbol_in_set_language() {
        let e = parse_formula("forall x. (x in a -> phi)", Lang::SetTheoretic).unwrap_err();
        assert!(matches!(e, Error::Language { .. }));
    }

    #[test]
    fn quantifier_rejected_in_propositional() {
        assert!(parse_formula("forall x. P(x)", Lang::Propositional).is_err());
    }

    #[test]
    fn associativity() {
        assert_eq!(
            prop("p -> q -> r").unwrap(),
            implies(atom("p"), implies(atom("q"), atom("r")))
        );
        assert_eq!(
            prop("p & q & r").unwrap(),
            and(and(atom("p"), atom("q")), atom("r"))
        );
        assert_eq!(
            prop("~p | q & r").unwrap(),
            or(not(atom("p")), and(atom("q"), atom("r")))
        );
    }

    #[test]
    fn unicode_aliases() {
        assert_eq!(
            prop("¬p ∨ ⊤ → ⊥").unwrap(),
            prop("~p | true -> false").unwrap()
        );
        assert_eq!(
            parse_formula("∀x. ∃y. x ∈ y", Lang::SetTheoretic).unwrap(),
            parse_formula("forall x. exists y. x in y", Lang::SetTheoretic).unwrap()
        );
    }

    #[test]
    fn syntax_errors_carry_position() {
        match prop("p & ") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        match prop("p $ q") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("{other:?}"),
        }
        assert!(prop("(p").is_err());
        assert!(prop("p q").is_err());
    }

    #[test]
    fn arity_mismatch() {
        assert!(matches!(
            parse_formula("P(x) & P(x,y)", Lang::FirstOrder),
            Err(Error::Arity { .. })
        ));
    }

    #[test]
    fn round_trip_samples() {
        for s in [
            "forall x. (x in a -> false)",
            "~~(p | ~p)",
            "(p -> q) -> p",
            "p & (q | r)",
            "exists x. ~P(x) & forall y. (Q(y,x) -> R)",
            "~forall x. x = y",
        ] {
            let f = parse_formula(s, Lang::FirstOrder).unwrap();
            assert_eq!(render_formula(&f), s);
        }
    }
}
