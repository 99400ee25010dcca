use std::fmt;

use super::term::{Inequality, QuasiInequality, Term, Var};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Bot => f.write_str("bot"),
            Term::Top => f.write_str("top"),
            Term::Prop(p) | Term::FpVar(p) => f.write_str(p),
            Term::Nom(k) => write!(f, "j{k}"),
            Term::CoNom(k) => write!(f, "m{k}"),
            Term::Meet(a, b) => {
                f.write_str("(")?;
                operand(f, a)?;
                f.write_str(" /\\ ")?;
                operand(f, b)?;
                f.write_str(")")
            }
            Term::Join(a, b) => {
                f.write_str("(")?;
                operand(f, a)?;
                f.write_str(" \\/ ")?;
                operand(f, b)?;
                f.write_str(")")
            }
            Term::App(c, args) => {
                write!(f, "{}(", c.name)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Term::Binder(kind, x, body) => write!(f, "{} {}. {}", kind.keyword(), x, body),
        }
    }
}

// A binder extends as far right as possible, so it needs parentheses inside a lattice operation.
fn operand(f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
    if matches!(t, Term::Binder(..)) {
        write!(f, "({t})")
    } else {
        write!(f, "{t}")
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Prop(p) | Var::Fp(p) => f.write_str(p),
            Var::Nom(k) => write!(f, "j{k}"),
            Var::CoNom(k) => write!(f, "m{k}"),
        }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= {}", self.lhs, self.rhs)
    }
}

impl fmt::Display for QuasiInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.antecedents.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{a}")?;
        }
        if !self.antecedents.is_empty() {
            f.write_str(" ")?;
        }
        write!(f, "=> {}", self.consequent)
    }
}
