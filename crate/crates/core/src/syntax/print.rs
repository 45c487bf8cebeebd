//! Canonical text rendering for both languages. Printing then parsing is the
//! identity on the core AST, and parsing canonical text then printing
//! reproduces it character for character.

use std::fmt;

use crate::syntax::{FoFormula, LfdFormula, Signature};

/// Renders a dependence-language formula using the signature's variable names.
pub fn print_lfd(phi: &LfdFormula, sig: &Signature) -> String {
    let mut out = String::new();
    write_lfd(phi, sig, &mut out);
    out
}

fn write_lfd(phi: &LfdFormula, sig: &Signature, out: &mut String) {
    match phi {
        LfdFormula::Atom(rel, args) => {
            out.push_str(rel);
            out.push('(');
            for (i, v) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(sig.var_name(*v));
            }
            out.push(')');
        }
        LfdFormula::Dep(v, u) => {
            out.push_str("D[");
            out.push_str(&sig.set_names(*v).join(" "));
            out.push_str("] ");
            out.push_str(sig.var_name(*u));
        }
        LfdFormula::And(a, b) => {
            out.push('(');
            write_lfd(a, sig, out);
            out.push_str(" & ");
            write_lfd(b, sig, out);
            out.push(')');
        }
        LfdFormula::Not(a) => {
            out.push('~');
            write_lfd(a, sig, out);
        }
        LfdFormula::E(v, a) => {
            out.push_str("E[");
            out.push_str(&sig.set_names(*v).join(" "));
            out.push_str("] ");
            write_lfd(a, sig, out);
        }
    }
}

impl fmt::Display for FoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoFormula::Atom(rel, args) => {
                write!(f, "{rel}({})", args.join(","))
            }
            FoFormula::Eq(a, b) => write!(f, "{a} = {b}"),
            FoFormula::And(a, b) => write!(f, "({a} & {b})"),
            FoFormula::Not(a) => write!(f, "~{a}"),
            FoFormula::Exists(bound, body) => {
                write!(f, "exists {} . {body}", bound.join(" "))
            }
            FoFormula::GuardedExists {
                guard_rel,
                guard_args,
                bound,
                body,
            } => {
                write!(
                    f,
                    "exists {} . ({guard_rel}({}) & {body})",
                    bound.join(" "),
                    guard_args.join(",")
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_fo;

    #[test]
    fn fo_print_parse_roundtrip() {
        for src in [
            "exists y . (R(x,y) & P(y))",
            "exists x . P(x)",
            "(exists x . P(x) & ~exists y . P(y))",
            "~exists x y . (R(x,y) & ~P(y))",
            "R_{x}_{y}(x)",
        ] {
            let f = parse_fo(src, false).unwrap();
            let printed = f.to_string();
            let g = parse_fo(&printed, false).unwrap();
            assert_eq!(f, g, "roundtrip failed for `{src}`");
            assert_eq!(printed, g.to_string());
        }
    }

    #[test]
    fn eq_print_parse_roundtrip() {
        let f = parse_fo("~(x = y & P(x))", true).unwrap();
        let g = parse_fo(&f.to_string(), true).unwrap();
        assert_eq!(f, g);
    }
}
