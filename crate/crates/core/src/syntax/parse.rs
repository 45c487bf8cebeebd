//! Recursive-descent parsers for the two formula languages and for
//! signature files.
//!
//! Both parsers first build a small surface tree carrying the sugar forms
//! (`|`, `->`, `forall`, set-valued dependence), then lower it into the core
//! AST. Lowering routes raw existentials through the guard-recognizing
//! constructor so that printing and reparsing is the identity.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::syntax::{FoFormula, LfdFormula, LfdVar, Signature, VarSet};
use crate::Result;

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Name(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Amp,
    Pipe,
    Tilde,
    Arrow,
    Equal,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            '[' => {
                toks.push((i, Tok::LBrack));
                i += 1;
            }
            ']' => {
                toks.push((i, Tok::RBrack));
                i += 1;
            }
            ',' => {
                toks.push((i, Tok::Comma));
                i += 1;
            }
            '.' => {
                toks.push((i, Tok::Dot));
                i += 1;
            }
            '&' => {
                toks.push((i, Tok::Amp));
                i += 1;
            }
            '|' => {
                toks.push((i, Tok::Pipe));
                i += 1;
            }
            '~' => {
                toks.push((i, Tok::Tilde));
                i += 1;
            }
            '=' => {
                toks.push((i, Tok::Equal));
                i += 1;
            }
            '-' => {
                if i + 1 < bytes.len() && bytes[i + 1] as char == '>' {
                    toks.push((i, Tok::Arrow));
                    i += 2;
                } else {
                    return Err(Error::Parse {
                        pos: i,
                        msg: "stray `-`".into(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                let mut name = String::new();
                while i < bytes.len() {
                    let c = bytes[i] as char;
                    if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                        name.push(c);
                        i += 1;
                    } else if c == '{' {
                        // Brace group inside a proxy relation name, consumed
                        // atomically so spaces are allowed inside.
                        name.push(c);
                        i += 1;
                        loop {
                            if i >= bytes.len() {
                                return Err(Error::Parse {
                                    pos: start,
                                    msg: "unterminated `{` in name".into(),
                                });
                            }
                            let c = bytes[i] as char;
                            if c == '}' {
                                name.push(c);
                                i += 1;
                                break;
                            }
                            if c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == ' ' {
                                name.push(c);
                                i += 1;
                            } else {
                                return Err(Error::Parse {
                                    pos: i,
                                    msg: format!("bad character `{c}` inside name braces"),
                                });
                            }
                        }
                    } else {
                        break;
                    }
                }
                toks.push((start, Tok::Name(name)));
            }
            other => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    Ok(toks)
}

struct Stream {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl Stream {
    fn new(src: &str) -> Result<Stream> {
        Ok(Stream {
            toks: lex(src)?,
            pos: 0,
            len: src.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn byte_pos(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.len)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let pos = self.byte_pos();
        match self.next() {
            Some(t) if t == want => Ok(()),
            _ => Err(Error::Parse {
                pos,
                msg: format!("expected {what}"),
            }),
        }
    }

    fn take_name(&mut self, what: &str) -> Result<String> {
        let pos = self.byte_pos();
        match self.next() {
            Some(Tok::Name(n)) => Ok(n),
            _ => Err(Error::Parse {
                pos,
                msg: format!("expected {what}"),
            }),
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.byte_pos(),
            msg: msg.into(),
        })
    }

    fn done(&self) -> Result<()> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(Error::Parse {
                pos: self.byte_pos(),
                msg: "trailing input".into(),
            })
        }
    }
}

// Surface tree for the dependence language.
enum LSurf {
    Atom(String, Vec<String>),
    Dep(Vec<String>, Vec<String>),
    And(Box<LSurf>, Box<LSurf>),
    Or(Box<LSurf>, Box<LSurf>),
    Imp(Box<LSurf>, Box<LSurf>),
    Not(Box<LSurf>),
    E(Vec<String>, Box<LSurf>),
}

fn l_expr(s: &mut Stream) -> Result<LSurf> {
    let lhs = l_or(s)?;
    if s.peek() == Some(&Tok::Arrow) {
        s.next();
        let rhs = l_expr(s)?;
        Ok(LSurf::Imp(Box::new(lhs), Box::new(rhs)))
    } else {
        Ok(lhs)
    }
}

fn l_or(s: &mut Stream) -> Result<LSurf> {
    let mut acc = l_and(s)?;
    while s.peek() == Some(&Tok::Pipe) {
        s.next();
        let rhs = l_and(s)?;
        acc = LSurf::Or(Box::new(acc), Box::new(rhs));
    }
    Ok(acc)
}

fn l_and(s: &mut Stream) -> Result<LSurf> {
    let mut acc = l_unary(s)?;
    while s.peek() == Some(&Tok::Amp) {
        s.next();
        let rhs = l_unary(s)?;
        acc = LSurf::And(Box::new(acc), Box::new(rhs));
    }
    Ok(acc)
}

fn bracket_vars(s: &mut Stream) -> Result<Vec<String>> {
    s.expect(Tok::LBrack, "`[`")?;
    let mut vars = Vec::new();
    while let Some(Tok::Name(_)) = s.peek() {
        vars.push(s.take_name("variable")?);
    }
    s.expect(Tok::RBrack, "`]`")?;
    Ok(vars)
}

fn l_unary(s: &mut Stream) -> Result<LSurf> {
    match s.peek() {
        Some(Tok::Tilde) => {
            s.next();
            Ok(LSurf::Not(Box::new(l_unary(s)?)))
        }
        Some(Tok::LParen) => {
            s.next();
            let inner = l_expr(s)?;
            s.expect(Tok::RParen, "`)`")?;
            Ok(inner)
        }
        Some(Tok::Name(n)) if n == "E" && s.toks.get(s.pos + 1).map(|(_, t)| t) == Some(&Tok::LBrack) => {
            s.next();
            let vars = bracket_vars(s)?;
            Ok(LSurf::E(vars, Box::new(l_unary(s)?)))
        }
        Some(Tok::Name(n)) if n == "D" && s.toks.get(s.pos + 1).map(|(_, t)| t) == Some(&Tok::LBrack) => {
            s.next();
            let base = bracket_vars(s)?;
            match s.peek() {
                Some(Tok::LBrack) => {
                    let targets = bracket_vars(s)?;
                    if targets.is_empty() {
                        return s.err("dependence needs at least one target variable");
                    }
                    Ok(LSurf::Dep(base, targets))
                }
                Some(Tok::Name(_)) => {
                    let target = s.take_name("variable")?;
                    Ok(LSurf::Dep(base, vec![target]))
                }
                _ => s.err("expected a target variable after `D[...]`"),
            }
        }
        Some(Tok::Name(_)) => {
            let rel = s.take_name("relation")?;
            s.expect(Tok::LParen, "`(` after relation name")?;
            let mut args = Vec::new();
            if s.peek() != Some(&Tok::RParen) {
                loop {
                    args.push(s.take_name("variable")?);
                    if s.peek() == Some(&Tok::Comma) {
                        s.next();
                    } else {
                        break;
                    }
                }
            }
            s.expect(Tok::RParen, "`)`")?;
            Ok(LSurf::Atom(rel, args))
        }
        _ => s.err("expected a formula"),
    }
}

struct LBinder<'a> {
    lookup: &'a dyn Fn(&str) -> Option<LfdVar>,
    arity: &'a dyn Fn(&str) -> Option<usize>,
}

fn l_lower(surf: &LSurf, ctx: &LBinder) -> Result<LfdFormula> {
    let var = |name: &str| (ctx.lookup)(name).ok_or_else(|| Error::UnknownVar(name.to_string()));
    let set = |names: &[String]| -> Result<VarSet> {
        let mut s = VarSet::EMPTY;
        for n in names {
            s = s.with(var(n)?);
        }
        Ok(s)
    };
    match surf {
        LSurf::Atom(rel, args) => {
            let arity = (ctx.arity)(rel).ok_or_else(|| Error::UnknownRelation(rel.clone()))?;
            if args.len() != arity {
                return Err(Error::ArityMismatch {
                    rel: rel.clone(),
                    expected: arity,
                    got: args.len(),
                });
            }
            let args = args.iter().map(|a| var(a)).collect::<Result<Vec<_>>>()?;
            Ok(LfdFormula::Atom(rel.clone(), args))
        }
        LSurf::Dep(base, targets) => {
            let base = set(base)?;
            let parts = targets
                .iter()
                .map(|t| Ok(LfdFormula::dep(base, var(t)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(LfdFormula::conj_all(parts).unwrap())
        }
        LSurf::And(a, b) => Ok(LfdFormula::and(l_lower(a, ctx)?, l_lower(b, ctx)?)),
        LSurf::Or(a, b) => {
            let (a, b) = (l_lower(a, ctx)?, l_lower(b, ctx)?);
            Ok(LfdFormula::not(LfdFormula::and(
                LfdFormula::not(a),
                LfdFormula::not(b),
            )))
        }
        LSurf::Imp(a, b) => {
            let (a, b) = (l_lower(a, ctx)?, l_lower(b, ctx)?);
            Ok(LfdFormula::not(LfdFormula::and(a, LfdFormula::not(b))))
        }
        LSurf::Not(a) => Ok(LfdFormula::not(l_lower(a, ctx)?)),
        LSurf::E(vars, a) => Ok(LfdFormula::e(set(vars)?, l_lower(a, ctx)?)),
    }
}

/// Parses a dependence-language formula against a signature.
pub fn parse_lfd(src: &str, sig: &Signature) -> Result<LfdFormula> {
    let mut s = Stream::new(src)?;
    let surf = l_expr(&mut s)?;
    s.done()?;
    l_lower(
        &surf,
        &LBinder {
            lookup: &|n| sig.var(n),
            arity: &|r| sig.arity(r),
        },
    )
}

/// Parses a dependence-language formula given only the variable list,
/// inferring relation arities from first use.
pub fn parse_lfd_infer(src: &str, vars: &[String]) -> Result<(Signature, LfdFormula)> {
    let mut s = Stream::new(src)?;
    let surf = l_expr(&mut s)?;
    s.done()?;
    fn collect(surf: &LSurf, out: &mut BTreeMap<String, usize>) -> Result<()> {
        match surf {
            LSurf::Atom(rel, args) => {
                if let Some(prev) = out.insert(rel.clone(), args.len()) {
                    if prev != args.len() {
                        return Err(Error::ArityMismatch {
                            rel: rel.clone(),
                            expected: prev,
                            got: args.len(),
                        });
                    }
                }
                Ok(())
            }
            LSurf::Dep(..) => Ok(()),
            LSurf::And(a, b) | LSurf::Or(a, b) | LSurf::Imp(a, b) => {
                collect(a, out)?;
                collect(b, out)
            }
            LSurf::Not(a) | LSurf::E(_, a) => collect(a, out),
        }
    }
    let mut rels = BTreeMap::new();
    collect(&surf, &mut rels)?;
    let sig = Signature::new(rels, vars.to_vec())?;
    let phi = l_lower(
        &surf,
        &LBinder {
            lookup: &|n| sig.var(n),
            arity: &|r| sig.arity(r),
        },
    )?;
    Ok((sig, phi))
}

// Surface tree for the first-order language.
enum FSurf {
    Atom(String, Vec<String>),
    Eq(String, String),
    And(Box<FSurf>, Box<FSurf>),
    Or(Box<FSurf>, Box<FSurf>),
    Imp(Box<FSurf>, Box<FSurf>),
    Not(Box<FSurf>),
    Exists(Vec<String>, Box<FSurf>),
    Forall(Vec<String>, Box<FSurf>),
}

fn f_expr(s: &mut Stream) -> Result<FSurf> {
    let lhs = f_or(s)?;
    if s.peek() == Some(&Tok::Arrow) {
        s.next();
        let rhs = f_expr(s)?;
        Ok(FSurf::Imp(Box::new(lhs), Box::new(rhs)))
    } else {
        Ok(lhs)
    }
}

fn f_or(s: &mut Stream) -> Result<FSurf> {
    let mut acc = f_and(s)?;
    while s.peek() == Some(&Tok::Pipe) {
        s.next();
        let rhs = f_and(s)?;
        acc = FSurf::Or(Box::new(acc), Box::new(rhs));
    }
    Ok(acc)
}

fn f_and(s: &mut Stream) -> Result<FSurf> {
    let mut acc = f_unary(s)?;
    while s.peek() == Some(&Tok::Amp) {
        s.next();
        let rhs = f_unary(s)?;
        acc = FSurf::And(Box::new(acc), Box::new(rhs));
    }
    Ok(acc)
}

fn binder_list(s: &mut Stream) -> Result<Vec<String>> {
    let mut vars = Vec::new();
    while let Some(Tok::Name(_)) = s.peek() {
        vars.push(s.take_name("variable")?);
    }
    if vars.is_empty() {
        return s.err("quantifier binds no variables");
    }
    let mut seen = std::collections::BTreeSet::new();
    for v in &vars {
        if !seen.insert(v) {
            return s.err(format!("duplicate bound variable `{v}`"));
        }
    }
    s.expect(Tok::Dot, "`.` after quantified variables")?;
    Ok(vars)
}

fn f_unary(s: &mut Stream) -> Result<FSurf> {
    match s.peek() {
        Some(Tok::Tilde) => {
            s.next();
            Ok(FSurf::Not(Box::new(f_unary(s)?)))
        }
        Some(Tok::LParen) => {
            s.next();
            let inner = f_expr(s)?;
            s.expect(Tok::RParen, "`)`")?;
            Ok(inner)
        }
        Some(Tok::Name(n)) if n == "exists" => {
            s.next();
            let vars = binder_list(s)?;
            Ok(FSurf::Exists(vars, Box::new(f_unary(s)?)))
        }
        Some(Tok::Name(n)) if n == "forall" => {
            s.next();
            let vars = binder_list(s)?;
            Ok(FSurf::Forall(vars, Box::new(f_unary(s)?)))
        }
        Some(Tok::Name(_)) => {
            let name = s.take_name("relation or variable")?;
            match s.peek() {
                Some(Tok::LParen) => {
                    s.next();
                    let mut args = Vec::new();
                    if s.peek() != Some(&Tok::RParen) {
                        loop {
                            args.push(s.take_name("variable")?);
                            if s.peek() == Some(&Tok::Comma) {
                                s.next();
                            } else {
                                break;
                            }
                        }
                    }
                    s.expect(Tok::RParen, "`)`")?;
                    Ok(FSurf::Atom(name, args))
                }
                Some(Tok::Equal) => {
                    s.next();
                    let rhs = s.take_name("variable")?;
                    Ok(FSurf::Eq(name, rhs))
                }
                _ => s.err("expected `(` or `=` after a name"),
            }
        }
        _ => s.err("expected a formula"),
    }
}

fn f_lower(surf: &FSurf, eq_mode: bool) -> Result<FoFormula> {
    match surf {
        FSurf::Atom(rel, args) => Ok(FoFormula::Atom(rel.clone(), args.clone())),
        FSurf::Eq(a, b) => {
            if !eq_mode {
                return Err(Error::Validation(
                    "equality atoms require equality mode".into(),
                ));
            }
            Ok(FoFormula::eq(a.clone(), b.clone()))
        }
        FSurf::And(a, b) => Ok(FoFormula::and(f_lower(a, eq_mode)?, f_lower(b, eq_mode)?)),
        FSurf::Or(a, b) => {
            let (a, b) = (f_lower(a, eq_mode)?, f_lower(b, eq_mode)?);
            Ok(FoFormula::not(FoFormula::and(
                FoFormula::not(a),
                FoFormula::not(b),
            )))
        }
        FSurf::Imp(a, b) => Ok(FoFormula::implies(
            f_lower(a, eq_mode)?,
            f_lower(b, eq_mode)?,
        )),
        FSurf::Not(a) => Ok(FoFormula::not(f_lower(a, eq_mode)?)),
        FSurf::Exists(vars, body) => Ok(FoFormula::exists(vars.clone(), f_lower(body, eq_mode)?)),
        FSurf::Forall(vars, body) => {
            // forall ȳ (G -> f) reads as the negated guarded existential.
            let inner = match &**body {
                FSurf::Imp(a, b) => FoFormula::and(
                    f_lower(a, eq_mode)?,
                    FoFormula::not(f_lower(b, eq_mode)?),
                ),
                other => FoFormula::not(f_lower(other, eq_mode)?),
            };
            Ok(FoFormula::not(FoFormula::exists(vars.clone(), inner)))
        }
    }
}

/// Parses a first-order formula. Equality atoms are rejected unless
/// `eq_mode` is set.
pub fn parse_fo(src: &str, eq_mode: bool) -> Result<FoFormula> {
    let mut s = Stream::new(src)?;
    let surf = f_expr(&mut s)?;
    s.done()?;
    f_lower(&surf, eq_mode)
}

/// Parses a signature file: one `vars x y z` line and any number of
/// `rel NAME ARITY` lines. `#` starts a comment.
pub fn parse_signature(src: &str) -> Result<Signature> {
    let mut vars: Option<Vec<String>> = None;
    let mut rels: Vec<(String, usize)> = Vec::new();
    for (lineno, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("vars") => {
                let vs: Vec<String> = parts.map(|s| s.to_string()).collect();
                if vars.replace(vs).is_some() {
                    return Err(Error::InvalidSignature(format!(
                        "line {}: duplicate vars line",
                        lineno + 1
                    )));
                }
            }
            Some("rel") => {
                let name = parts.next().ok_or_else(|| {
                    Error::InvalidSignature(format!("line {}: missing relation name", lineno + 1))
                })?;
                let arity: usize = parts
                    .next()
                    .and_then(|a| a.parse().ok())
                    .ok_or_else(|| {
                        Error::InvalidSignature(format!("line {}: missing arity", lineno + 1))
                    })?;
                if parts.next().is_some() {
                    return Err(Error::InvalidSignature(format!(
                        "line {}: trailing tokens",
                        lineno + 1
                    )));
                }
                rels.push((name.to_string(), arity));
            }
            Some(other) => {
                return Err(Error::InvalidSignature(format!(
                    "line {}: unknown directive `{other}`",
                    lineno + 1
                )));
            }
            None => {}
        }
    }
    let vars = vars.ok_or_else(|| Error::InvalidSignature("missing vars line".into()))?;
    Signature::new(rels, vars)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::print::print_lfd;
    use crate::syntax::GfClass;

    fn sig() -> Signature {
        Signature::new(
            vec![("P".to_string(), 1), ("R".to_string(), 2)],
            vec!["x".into(), "y".into()],
        )
        .unwrap()
    }

    #[test]
    fn parses_lfd_forms() {
        let sig = sig();
        let f = parse_lfd("(P(x) & ~E[] R(x,y))", &sig).unwrap();
        assert_eq!(
            f,
            LfdFormula::and(
                LfdFormula::atom("P", vec![LfdVar(0)]),
                LfdFormula::not(LfdFormula::e(
                    VarSet::EMPTY,
                    LfdFormula::atom("R", vec![LfdVar(0), LfdVar(1)])
                ))
            )
        );
        let d = parse_lfd("D[x] y", &sig).unwrap();
        assert_eq!(d, LfdFormula::dep(VarSet(0b01), LfdVar(1)));
        let dset = parse_lfd("D[][x y]", &sig).unwrap();
        assert_eq!(
            dset,
            LfdFormula::and(
                LfdFormula::dep(VarSet::EMPTY, LfdVar(0)),
                LfdFormula::dep(VarSet::EMPTY, LfdVar(1))
            )
        );
    }

    #[test]
    fn lfd_sugar_desugars() {
        let sig = sig();
        let f = parse_lfd("P(x) | P(y)", &sig).unwrap();
        let (a, b) = (
            LfdFormula::atom("P", vec![LfdVar(0)]),
            LfdFormula::atom("P", vec![LfdVar(1)]),
        );
        assert_eq!(
            f,
            LfdFormula::not(LfdFormula::and(
                LfdFormula::not(a.clone()),
                LfdFormula::not(b.clone())
            ))
        );
        let g = parse_lfd("P(x) -> P(y)", &sig).unwrap();
        assert_eq!(g, LfdFormula::not(LfdFormula::and(a, LfdFormula::not(b))));
    }

    #[test]
    fn lfd_rejects_bad_input() {
        let sig = sig();
        assert!(matches!(
            parse_lfd("Q(x)", &sig),
            Err(Error::UnknownRelation(_))
        ));
        assert!(matches!(
            parse_lfd("P(z)", &sig),
            Err(Error::UnknownVar(_))
        ));
        assert!(matches!(
            parse_lfd("P(x,y)", &sig),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(parse_lfd("P(x) &", &sig).is_err());
        assert!(parse_lfd("D[x][]", &sig).is_err());
    }

    #[test]
    fn parses_fo_with_guard_recognition() {
        let f = parse_fo("exists y . (R(x,y) & P(y))", false).unwrap();
        match &f {
            FoFormula::GuardedExists {
                guard_rel, bound, ..
            } => {
                assert_eq!(guard_rel, "R");
                assert_eq!(bound, &vec!["y".to_string()]);
            }
            other => panic!("expected guarded form, got {other:?}"),
        }
        assert_eq!(f.classify(), GfClass::Gf);

        let raw = parse_fo("exists x . P(x)", false).unwrap();
        assert!(matches!(raw, FoFormula::Exists(..)));
        assert_eq!(raw.classify(), GfClass::Gf);
    }

    #[test]
    fn forall_desugars_through_the_guard() {
        let f = parse_fo("forall y . (R(x,y) -> P(y))", false).unwrap();
        let expected = FoFormula::not(FoFormula::guarded_exists(
            "R",
            vec!["x".into(), "y".into()],
            vec!["y".into()],
            FoFormula::not(FoFormula::atom("P", vec!["y".into()])),
        ));
        assert_eq!(f, expected);
    }

    #[test]
    fn equality_needs_mode() {
        assert!(parse_fo("x = y", false).is_err());
        assert_eq!(
            parse_fo("x = y", true).unwrap(),
            FoFormula::eq("x", "y")
        );
    }

    #[test]
    fn proxy_names_lex() {
        let f = parse_fo("R_{x y}_{y}(x, y)", false).unwrap();
        assert_eq!(
            f,
            FoFormula::atom("R_{x y}_{y}", vec!["x".into(), "y".into()])
        );
        let g = parse_fo("R_{}_{x}()", false).unwrap();
        assert_eq!(g, FoFormula::atom("R_{}_{x}", Vec::new()));
    }

    #[test]
    fn infer_mode_builds_signature() {
        let (sig, f) = parse_lfd_infer("(Q(x,y) & E[x] Q(y,x))", &["x".into(), "y".into()]).unwrap();
        assert_eq!(sig.arity("Q"), Some(2));
        f.validate(&sig).unwrap();
    }

    #[test]
    fn signature_file_roundtrip() {
        let sig = parse_signature("# comment\nvars x y\nrel P 1\nrel R 2\n").unwrap();
        assert_eq!(sig.k(), 2);
        assert_eq!(sig.arity("R"), Some(2));
        assert!(parse_signature("rel P 1\n").is_err());
    }

    #[test]
    fn print_then_parse_is_identity() {
        let sig = sig();
        for src in [
            "(P(x) & ~E[x y] R(x,y))",
            "D[] x",
            "E[] ~(D[x] y & P(y))",
            "~~P(x)",
        ] {
            let f = parse_lfd(src, &sig).unwrap();
            let printed = print_lfd(&f, &sig);
            let g = parse_lfd(&printed, &sig).unwrap();
            assert_eq!(f, g, "roundtrip failed for {src}");
            assert_eq!(printed, print_lfd(&g, &sig));
        }
    }
}
