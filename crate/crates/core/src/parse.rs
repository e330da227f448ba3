//! Text grammar for formulas.
//!
//! ```text
//! formula  := disj
//! disj     := conj ("or" conj)*
//! conj     := unary ("and" unary)*
//! unary    := "not" unary | "exists" IDENT+ "." formula | primary
//! primary  := "true" | "false" | expr REL expr | "(" formula ")"
//! expr     := term (("+" | "-") term)*
//! term     := factor ("*" factor)*
//! factor   := "-" factor | power
//! power    := base ("^" INT)?
//! base     := INT ("/" INT)? | IDENT | "(" expr ")"
//! REL      := "<=" | ">=" | "=" | "<" | ">"
//! ```
//!
//! A formula file starts with a `vars: x1 x2 ...` header line.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::formula::{Formula, Relation};
use crate::poly::{Polynomial, Rational};
use crate::vars::VarList;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Bad(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    Dot,
    Rel(Relation),
    And,
    Or,
    Not,
    Exists,
    True,
    False,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let push = |out: &mut Vec<Token>, tok| {
            out.push(Token {
                tok,
                line: tl,
                column: tc,
            })
        };
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            // Decimal points and exponents are outside the grammar.
            let mut bad = false;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '.' && i + 1 < chars.len() && chars[i + 1].is_ascii_digit()) {
                bad = true;
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            if bad {
                push(&mut out, Tok::Bad(s));
            } else {
                push(&mut out, Tok::Int(s.parse().unwrap()));
            }
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = match s.as_str() {
                "and" => Tok::And,
                "or" => Tok::Or,
                "not" => Tok::Not,
                "exists" => Tok::Exists,
                "true" => Tok::True,
                "false" => Tok::False,
                _ => Tok::Ident(s),
            };
            push(&mut out, tok);
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, len) = match (c, next) {
            ('<', Some('=')) => (Tok::Rel(Relation::Le), 2),
            ('>', Some('=')) => (Tok::Rel(Relation::Ge), 2),
            ('<', _) => (Tok::Rel(Relation::Lt), 1),
            ('>', _) => (Tok::Rel(Relation::Gt), 1),
            ('=', _) => (Tok::Rel(Relation::Eq), 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('^', _) => (Tok::Caret, 1),
            ('/', _) => (Tok::Slash, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('.', _) => (Tok::Dot, 1),
            _ => {
                return Err(Error::Syntax {
                    line,
                    column: col,
                    message: format!("unexpected character `{c}`"),
                })
            }
        };
        push(&mut out, tok);
        i += len;
        col += len;
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    vars: VarList,
    /// Names in scope, innermost binding last.
    scope: Vec<(String, usize)>,
    nvars: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let (line, column) = self.here();
        Err(Error::Syntax {
            line,
            column,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut parts = vec![self.conj()?];
        while *self.peek() == Tok::Or {
            self.bump();
            parts.push(self.conj()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::or(parts)
        })
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::And {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::and(parts)
        })
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Exists => {
                self.bump();
                let mut bound = Vec::new();
                while let Tok::Ident(name) = self.peek().clone() {
                    self.bump();
                    let idx = self.vars.index_of(&name).filter(|&i| i >= self.nvars_free());
                    let idx = match idx {
                        Some(i) => i,
                        None => {
                            self.vars.push(name.clone());
                            self.vars.len() - 1
                        }
                    };
                    self.scope.push((name, idx));
                    bound.push(idx);
                }
                if bound.is_empty() {
                    return self.err("expected bound variable after `exists`");
                }
                self.expect(Tok::Dot, "`.` after bound variables")?;
                let body = self.formula()?;
                self.scope.truncate(self.scope.len() - bound.len());
                Ok(Formula::exists(bound, body))
            }
            _ => self.primary(),
        }
    }

    fn nvars_free(&self) -> usize {
        self.nvars
    }

    fn primary(&mut self) -> Result<Formula> {
        match self.peek() {
            Tok::True => {
                self.bump();
                return Ok(Formula::tt());
            }
            Tok::False => {
                self.bump();
                return Ok(Formula::ff());
            }
            _ => {}
        }
        if *self.peek() == Tok::LParen {
            // Either a parenthesized formula or an atom whose left side starts
            // with a parenthesized expression; try the atom first.
            let save = self.pos;
            let saved_vars = self.vars.clone();
            match self.atom() {
                Ok(f) => return Ok(f),
                Err(atom_err) => {
                    let atom_pos = self.pos;
                    self.pos = save;
                    self.vars = saved_vars;
                    self.bump();
                    match self.formula().and_then(|f| {
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(f)
                    }) {
                        Ok(f) => return Ok(f),
                        Err(group_err) => {
                            return Err(if atom_pos > self.pos { atom_err } else { group_err });
                        }
                    }
                }
            }
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula> {
        let lhs = self.expr()?;
        let rel = match self.peek() {
            Tok::Rel(r) => *r,
            other => return self.err(format!("expected comparison, found {}", describe(other))),
        };
        self.bump();
        let rhs = self.expr()?;
        let (lhs, rhs) = self.align(lhs, rhs);
        Ok(Formula::atom(&lhs - &rhs, rel))
    }

    /// Pads polynomials parsed before a later `exists` grew the variable list.
    fn align(&self, a: Polynomial, b: Polynomial) -> (Polynomial, Polynomial) {
        let n = self.vars.len();
        let widen = |p: Polynomial| {
            if p.nvars() == n {
                p
            } else {
                let map: Vec<usize> = (0..p.nvars()).collect();
                p.remap(n, &map)
            }
        };
        (widen(a), widen(b))
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let t = self.term()?;
                    let (a, t) = self.align(acc, t);
                    acc = &a + &t;
                }
                Tok::Minus => {
                    self.bump();
                    let t = self.term()?;
                    let (a, t) = self.align(acc, t);
                    acc = &a - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let f = self.factor()?;
            let (a, f) = self.align(acc, f);
            acc = &a * &f;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-&self.factor()?);
        }
        let base = self.base()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            match self.peek().clone() {
                Tok::Int(e) => {
                    self.bump();
                    let e: u32 = e
                        .try_into()
                        .or_else(|_| self.err("exponent too large"))?;
                    Ok(base.pow(e))
                }
                other => self.err(format!("expected integer exponent, found {}", describe(&other))),
            }
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<Polynomial> {
        let n = self.vars.len();
        let (line, column) = self.here();
        match self.peek().clone() {
            Tok::Int(num) => {
                self.bump();
                if *self.peek() == Tok::Slash {
                    self.bump();
                    match self.peek().clone() {
                        Tok::Int(den) if !den.is_zero() => {
                            self.bump();
                            Ok(Polynomial::constant(n, Rational::new(num, den)))
                        }
                        Tok::Int(den) => Err(Error::NonRationalLiteral {
                            text: format!("{num}/{den}"),
                            line,
                            column,
                        }),
                        other => self.err(format!(
                            "expected integer denominator, found {}",
                            describe(&other)
                        )),
                    }
                } else {
                    Ok(Polynomial::constant(n, Rational::from_integer(num)))
                }
            }
            Tok::Bad(text) => Err(Error::NonRationalLiteral { text, line, column }),
            Tok::Ident(name) => {
                self.bump();
                let idx = self
                    .scope
                    .iter()
                    .rev()
                    .find(|(s, _)| *s == name)
                    .map(|(_, i)| *i)
                    .or_else(|| self.vars.index_of(&name).filter(|&i| i < self.nvars));
                match idx {
                    Some(i) => Ok(Polynomial::var(n, i)),
                    None => Err(Error::UnknownVariable { name, line, column }),
                }
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            other => self.err(format!("expected expression, found {}", describe(&other))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(i) => format!("`{i}`"),
        Tok::Bad(s) => format!("`{s}`"),
        Tok::End => "end of input".into(),
        Tok::Rel(r) => format!("`{}`", r.symbol()),
        other => format!("{other:?}").to_lowercase(),
    }
}

/// Parses a formula whose free variables are `vars`. Variables bound by
/// `exists` blocks are appended after `vars`; the returned list includes them.
pub fn parse_formula_ext(text: &str, vars: &VarList) -> Result<(Formula, VarList)> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        vars: vars.clone(),
        scope: Vec::new(),
        nvars: vars.len(),
    };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return p.err(format!("unexpected {}", describe(p.peek())));
    }
    let n = p.vars.len();
    // Atoms parsed before a later binder appeared have fewer variables.
    let f = if n > vars.len() {
        widen(&f, n)
    } else {
        f
    };
    Ok((f, p.vars))
}

fn widen(f: &Formula, n: usize) -> Formula {
    f.map_atoms(&mut |a| {
        let p = a.poly();
        if p.nvars() == n {
            Formula::Atom(a.clone())
        } else {
            let map: Vec<usize> = (0..p.nvars()).collect();
            Formula::atom(p.remap(n, &map), a.relation())
        }
    })
}

/// Parses a quantifier-free formula over exactly `vars`.
pub fn parse_formula(text: &str, vars: &VarList) -> Result<Formula> {
    let (f, all) = parse_formula_ext(text, vars)?;
    if all.len() != vars.len() {
        return Err(Error::Format(
            "existential blocks are only allowed in intermediate files".into(),
        ));
    }
    Ok(f)
}

/// Formula file: `vars:` header plus body. Bound variables live after the
/// free ones in `vars`; `free` counts the header variables.
#[derive(Clone, Debug, PartialEq)]
pub struct FormulaFile {
    pub vars: VarList,
    pub free: usize,
    pub formula: Formula,
}

impl FormulaFile {
    pub fn new(vars: VarList, formula: Formula) -> Self {
        let free = vars.len();
        FormulaFile {
            vars,
            free,
            formula,
        }
    }

    pub fn parse(text: &str) -> Result<FormulaFile> {
        let mut lines = text.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((_, l)) if l.trim().is_empty() || l.trim_start().starts_with('#') => continue,
                Some((i, l)) => break (i, l),
                None => {
                    return Err(Error::Syntax {
                        line: 1,
                        column: 1,
                        message: "missing `vars:` header".into(),
                    })
                }
            }
        };
        let rest = header.1.trim_start().strip_prefix("vars:").ok_or(Error::Syntax {
            line: header.0 + 1,
            column: 1,
            message: "expected `vars:` header".into(),
        })?;
        let vars = VarList::new(rest.split_whitespace());
        let body_start = header.0 + 1;
        let body: String = text
            .lines()
            .skip(body_start)
            .collect::<Vec<_>>()
            .join("\n");
        let (formula, all) = parse_formula_ext(&body, &vars).map_err(|e| shift_line(e, body_start))?;
        Ok(FormulaFile {
            free: vars.len(),
            vars: all,
            formula,
        })
    }

    pub fn render(&self) -> String {
        let header = VarList::new(self.vars.names()[..self.free].iter().cloned());
        format!("vars: {}\n{}\n", header, self.formula.display(&self.vars))
    }
}

fn shift_line(e: Error, by: usize) -> Error {
    match e {
        Error::Syntax {
            line,
            column,
            message,
        } => Error::Syntax {
            line: line + by,
            column,
            message,
        },
        Error::UnknownVariable { name, line, column } => Error::UnknownVariable {
            name,
            line: line + by,
            column,
        },
        Error::NonRationalLiteral { text, line, column } => Error::NonRationalLiteral {
            text,
            line: line + by,
            column,
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    fn xy() -> VarList {
        VarList::new(["x", "y"])
    }

    #[test]
    fn parses_disk_atom() {
        let f = parse_formula("x^2 + y^2 - 1 <= 0", &xy()).unwrap();
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let p = &(&x.pow(2) + &y.pow(2)) - &Polynomial::one(2);
        assert_eq!(f, Formula::atom(p, Relation::Le));
        assert!(f.eval_point(&[int(0), int(0)]).unwrap());
        assert!(!f.eval_point(&[int(1), int(1)]).unwrap());
    }

    #[test]
    fn parses_conjunction_with_products() {
        let vars = VarList::new(["x", "y", "z"]);
        let f = parse_formula("(y - z*x = 0) and (x >= 0)", &vars).unwrap();
        match &f {
            Formula::And(cs) => assert_eq!(cs.len(), 2),
            other => panic!("expected conjunction, got {other:?}"),
        }
    }

    #[test]
    fn negation_is_not_closed() {
        let f = parse_formula("not (x < 0)", &xy()).unwrap();
        assert!(matches!(f, Formula::Not(_)));
        assert!(!f.is_closed());
    }

    #[test]
    fn comparison_sugar_normalizes() {
        let a = parse_formula("x <= y", &xy()).unwrap();
        let b = parse_formula("x - y <= 0", &xy()).unwrap();
        assert_eq!(a, b);
        let c = parse_formula("5 - x >= 0", &xy()).unwrap();
        assert_eq!(c.display(&xy()).to_string(), "x - 5 <= 0");
    }

    #[test]
    fn parenthesized_expression_atom() {
        let f = parse_formula("(x + 1) * y >= 0 or (x > 0 and y < 1/2)", &xy()).unwrap();
        assert!(f.eval_point(&[int(1), int(1)]).unwrap());
        assert!(!f.eval_point(&[int(-2), int(1)]).unwrap());
        assert!(f.eval_point(&[rat(1, 3), int(0)]).unwrap());
    }

    #[test]
    fn error_positions() {
        match parse_formula("x + \n  w >= 0", &xy()) {
            Err(Error::UnknownVariable { name, line, column }) => {
                assert_eq!((name.as_str(), line, column), ("w", 2, 3));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_formula("x >= 1.5", &xy()),
            Err(Error::NonRationalLiteral { .. })
        ));
        assert!(matches!(
            parse_formula("x >= 1/0", &xy()),
            Err(Error::NonRationalLiteral { .. })
        ));
        assert!(matches!(parse_formula("x >= ", &xy()), Err(Error::Syntax { .. })));
        assert!(matches!(parse_formula("(x >= 0", &xy()), Err(Error::Syntax { .. })));
    }

    #[test]
    fn canonical_text_round_trips() {
        let texts = [
            "x^2 + y^2 - 1 <= 0",
            "(x >= 0 and y <= 0) or not (x - y = 0)",
            "true",
            "false",
            "x*y - 1/2*x + 3 > 0 and (x < 0 or y >= 0)",
        ];
        for t in texts {
            let f = parse_formula(t, &xy()).unwrap();
            let printed = f.display(&xy()).to_string();
            let again = parse_formula(&printed, &xy()).unwrap();
            assert_eq!(f, again, "{t}");
            assert_eq!(again.display(&xy()).to_string(), printed);
        }
    }

    #[test]
    fn file_with_exists_block() {
        let text = "vars: x t\nexists z . (x - t*z = 0) and z^2 - 1 <= 0\n";
        let file = FormulaFile::parse(text).unwrap();
        assert_eq!(file.free, 2);
        assert_eq!(file.vars.names(), &["x", "t", "z"]);
        assert!(file.formula.is_quantified());
        let again = FormulaFile::parse(&file.render()).unwrap();
        assert_eq!(again, file);
    }
}
