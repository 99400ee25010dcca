//! Syntactically (almost) open and closed terms.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{Family, Polarity, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SyntacticShape {
    pub open: bool,
    pub closed: bool,
    pub almost_open: bool,
    pub almost_closed: bool,
}

impl SyntacticShape {
    const ALL: SyntacticShape = SyntacticShape { open: true, closed: true, almost_open: true, almost_closed: true };

    fn and(self, o: SyntacticShape) -> SyntacticShape {
        SyntacticShape {
            open: self.open && o.open,
            closed: self.closed && o.closed,
            almost_open: self.almost_open && o.almost_open,
            almost_closed: self.almost_closed && o.almost_closed,
        }
    }

    /// Shape seen through an antitone coordinate: open and closed trade places.
    fn dual(self) -> SyntacticShape {
        SyntacticShape {
            open: self.closed,
            closed: self.open,
            almost_open: self.almost_closed,
            almost_closed: self.almost_open,
        }
    }

    pub fn flags(self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for (b, name) in [
            (self.open, "open"),
            (self.closed, "closed"),
            (self.almost_open, "almost_open"),
            (self.almost_closed, "almost_closed"),
        ] {
            if b {
                out.push(name);
            }
        }
        out
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("`{0}` uses a non-star binder; shapes are defined on star terms")]
pub struct ShapeError(pub String);

pub fn syntactic_shape(t: &Term) -> Result<SyntacticShape, ShapeError> {
    Ok(match t {
        Term::Bot | Term::Top | Term::Prop(_) | Term::FpVar(_) => SyntacticShape::ALL,
        Term::Nom(_) => SyntacticShape { closed: true, almost_closed: true, ..Default::default() },
        Term::CoNom(_) => SyntacticShape { open: true, almost_open: true, ..Default::default() },
        Term::Meet(a, b) | Term::Join(a, b) => syntactic_shape(a)?.and(syntactic_shape(b)?),
        Term::App(c, args) => {
            let mut acc = SyntacticShape::ALL;
            for (i, a) in args.iter().enumerate() {
                let s = syntactic_shape(a)?;
                acc = acc.and(match c.polarity(i) {
                    Polarity::Pos => s,
                    Polarity::Neg => s.dual(),
                });
            }
            if c.is_residual() {
                match c.family {
                    Family::F => {
                        acc.open = false;
                        acc.almost_open = false;
                    }
                    Family::G => {
                        acc.closed = false;
                        acc.almost_closed = false;
                    }
                }
            }
            acc
        }
        Term::Binder(kind, _, body) => {
            if !kind.is_star() {
                return Err(ShapeError(t.to_string()));
            }
            let b = syntactic_shape(body)?;
            if kind.is_least() {
                SyntacticShape { open: false, ..b }
            } else {
                SyntacticShape { closed: false, ..b }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, Signature};

    fn shape(text: &str) -> Vec<&'static str> {
        let sig = Signature::default_unary().tense().unwrap();
        syntactic_shape(&parse_term(text, &sig).unwrap()).unwrap().flags()
    }

    #[test]
    fn examples() {
        assert_eq!(shape("m1"), vec!["open", "almost_open"]);
        assert_eq!(shape("j1"), vec!["closed", "almost_closed"]);
        assert_eq!(shape("mu* X. (p \\/ f(X))"), vec!["closed", "almost_open", "almost_closed"]);
        assert_eq!(shape("nu* X. g(X)"), vec!["open", "almost_open", "almost_closed"]);
    }

    #[test]
    fn residuals_and_coordinates() {
        assert_eq!(shape("f#1(m1)"), vec!["open", "almost_open"]);
        assert_eq!(shape("f#1(j1)"), Vec::<&str>::new());
        assert_eq!(shape("gb1(j1)"), vec!["closed", "almost_closed"]);
        assert_eq!(shape("f(j1) /\\ g(m1)"), Vec::<&str>::new());
        assert_eq!(shape("f(j1) /\\ g(p)"), vec!["closed", "almost_closed"]);
    }

    #[test]
    fn non_star_binder_is_an_error() {
        let sig = Signature::default_unary();
        assert!(syntactic_shape(&parse_term("mu X. X", &sig).unwrap()).is_err());
    }
}
