use super::{Formula, Letter, Term};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Token<'a> {
    Open,
    Close,
    Word(&'a str),
}

struct Lexer<'a> {
    text: &'a str,
    tokens: Vec<(usize, Token<'a>)>,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        let mut tokens = Vec::new();
        let bytes = text.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            match bytes[i] {
                b'(' => {
                    tokens.push((i, Token::Open));
                    i += 1;
                }
                b')' => {
                    tokens.push((i, Token::Close));
                    i += 1;
                }
                b if b.is_ascii_whitespace() => i += 1,
                _ => {
                    let start = i;
                    while i < bytes.len()
                        && !bytes[i].is_ascii_whitespace()
                        && bytes[i] != b'('
                        && bytes[i] != b')'
                    {
                        i += 1;
                    }
                    tokens.push((start, Token::Word(&text[start..i])));
                }
            }
        }
        Lexer {
            text,
            tokens,
            pos: 0,
        }
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(o, _)| *o)
            .unwrap_or(self.text.len())
    }

    fn next(&mut self) -> Result<(usize, Token<'a>)> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::parse(self.text.len(), "unexpected end of input"))?;
        self.pos += 1;
        Ok(tok)
    }

    fn expect_open(&mut self) -> Result<()> {
        match self.next()? {
            (_, Token::Open) => Ok(()),
            (o, t) => Err(Error::parse(o, format!("expected `(`, found {t:?}"))),
        }
    }

    fn expect_close(&mut self) -> Result<()> {
        match self.next()? {
            (_, Token::Close) => Ok(()),
            (o, t) => Err(Error::parse(o, format!("expected `)`, found {t:?}"))),
        }
    }

    fn word(&mut self) -> Result<(usize, &'a str)> {
        match self.next()? {
            (o, Token::Word(w)) => Ok((o, w)),
            (o, t) => Err(Error::parse(o, format!("expected a name, found {t:?}"))),
        }
    }
}

fn is_var_name(w: &str) -> bool {
    let mut chars = w.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        && !matches!(w, "min" | "max")
}

fn is_set_name(w: &str) -> bool {
    let mut chars = w.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses the s-expression syntax produced by [`print`](super::print).
pub fn parse(text: &str) -> Result<Formula> {
    let mut lx = Lexer::new(text);
    let f = formula(&mut lx)?;
    if lx.pos != lx.tokens.len() {
        return Err(Error::parse(lx.offset(), "trailing input"));
    }
    Ok(f)
}

fn term(lx: &mut Lexer<'_>) -> Result<Term> {
    let (o, w) = lx.word()?;
    match w {
        "min" => Ok(Term::Min),
        "max" => Ok(Term::Max),
        v if is_var_name(v) => Ok(Term::Var(v.to_string())),
        v => Err(Error::parse(o, format!("unknown variable `{v}`"))),
    }
}

fn var(lx: &mut Lexer<'_>) -> Result<String> {
    let (o, w) = lx.word()?;
    if is_var_name(w) {
        Ok(w.to_string())
    } else {
        Err(Error::parse(o, format!("`{w}` is not a variable name")))
    }
}

fn set_var(lx: &mut Lexer<'_>) -> Result<String> {
    let (o, w) = lx.word()?;
    if is_set_name(w) {
        Ok(w.to_string())
    } else {
        Err(Error::parse(o, format!("`{w}` is not a set variable name")))
    }
}

fn formula(lx: &mut Lexer<'_>) -> Result<Formula> {
    lx.expect_open()?;
    let (o, head) = lx.word()?;
    let f = match head {
        "<" => Formula::Less(term(lx)?, term(lx)?),
        "=" => Formula::Equal(term(lx)?, term(lx)?),
        "succ" => Formula::Succ(term(lx)?, term(lx)?),
        "letter" => {
            let (lo, name) = lx.word()?;
            let l: Letter = name
                .parse()
                .map_err(|_| Error::parse(lo, format!("unknown letter `{name}`")))?;
            Formula::Letter(l, term(lx)?)
        }
        "in" => {
            let t = term(lx)?;
            Formula::Member(t, set_var(lx)?)
        }
        "not" => Formula::not(formula(lx)?),
        "and" => Formula::and(formula(lx)?, formula(lx)?),
        "or" => Formula::or(formula(lx)?, formula(lx)?),
        "imp" => Formula::imp(formula(lx)?, formula(lx)?),
        "exists" => {
            let v = var(lx)?;
            Formula::exists(v, formula(lx)?)
        }
        "forall" => {
            let v = var(lx)?;
            Formula::forall(v, formula(lx)?)
        }
        "existsSet" => {
            let x = set_var(lx)?;
            Formula::exists_set(x, formula(lx)?)
        }
        "forallSet" => {
            let x = set_var(lx)?;
            Formula::forall_set(x, formula(lx)?)
        }
        other => return Err(Error::parse(o, format!("unknown operator `{other}`"))),
    };
    lx.expect_close()?;
    Ok(f)
}
