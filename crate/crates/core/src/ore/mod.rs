//! The operator ring `D = K[d1, ..., dn]`, operator matrices and the formal adjoint.

mod multiindex;
mod op;
mod row;

pub use multiindex::{binomial, MultiIndex};
pub use op::{compose, matrix_compose, OpMatrix, ScalarOp};
pub use row::{Jet, Row};

use crate::coefficients::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OreError {
    #[error("shape")]
    Shape,
}

/// Display names for coordinates and unknowns.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Names {
    pub vars: Vec<String>,
    pub unknowns: Vec<String>,
}

impl Names {
    pub fn new(vars: Vec<String>, unknowns: Vec<String>) -> Self {
        Names { vars, unknowns }
    }

    /// `x1..xn` and `y1..ym` (or plain `y` when `m = 1`).
    pub fn standard(n: usize, m: usize) -> Self {
        let vars = (1..=n).map(|i| format!("x{i}")).collect();
        let unknowns = if m == 1 { vec!["y".to_string()] } else { (1..=m).map(|k| format!("y{k}")).collect() };
        Names { vars, unknowns }
    }

    pub fn unknown(&self, k: usize) -> String {
        self.unknowns.get(k).cloned().unwrap_or_else(|| format!("u{}", k + 1))
    }

    pub fn with_unknowns(&self, unknowns: Vec<String>) -> Names {
        Names { vars: self.vars.clone(), unknowns }
    }

    /// Jet in DSL syntax, e.g. `D[1,3] y`.
    pub fn jet_dsl(&self, j: &Jet) -> String {
        if j.mu.is_zero() {
            self.unknown(j.unknown)
        } else {
            let axes: Vec<String> = j.mu.axes().iter().map(|a| (a + 1).to_string()).collect();
            format!("D[{}] {}", axes.join(","), self.unknown(j.unknown))
        }
    }

    /// Jet in subscript syntax, e.g. `y_13`.
    pub fn jet_sub(&self, j: &Jet) -> String {
        if j.mu.is_zero() {
            self.unknown(j.unknown)
        } else {
            format!("{}_{}", self.unknown(j.unknown), j.mu.subscript())
        }
    }

    pub fn scalar(&self, s: &Scalar) -> String {
        s.render(&self.vars)
    }

    /// Render a row with the leader first, in DSL syntax.
    pub fn row(&self, r: &Row) -> String {
        self.row_with(r, |j| self.jet_dsl(j))
    }

    /// Render a row with the leader first, in subscript syntax.
    pub fn row_sub(&self, r: &Row) -> String {
        self.row_with(r, |j| self.jet_sub(j))
    }

    fn row_with(&self, r: &Row, jet: impl Fn(&Jet) -> String) -> String {
        if r.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (j, c)) in r.terms().rev().enumerate() {
            let (neg, mag) = if c.is_negative_leading() { (true, -c) } else { (false, c.clone()) };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if !mag.is_one() {
                let s = self.scalar(&mag);
                if mag.is_compound() {
                    out.push_str(&format!("({s})*"));
                } else {
                    out.push_str(&format!("{s}*"));
                }
            }
            out.push_str(&jet(j));
        }
        out
    }

    /// Render a scalar operator such as `d1 + x2`.
    pub fn op(&self, p: &ScalarOp) -> String {
        if p.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (mu, c)) in p.terms().rev().enumerate() {
            let (neg, mag) = if c.is_negative_leading() { (true, -c) } else { (false, c.clone()) };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let d = if mu.is_zero() { String::new() } else { format!("d{}", mu.subscript()) };
            if mag.is_one() && !d.is_empty() {
                out.push_str(&d);
            } else {
                let s = self.scalar(&mag);
                let s = if mag.is_compound() && !d.is_empty() { format!("({s})") } else { s };
                out.push_str(&s);
                if !d.is_empty() {
                    out.push('*');
                    out.push_str(&d);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_dsl_rows() {
        let names = Names::standard(3, 1);
        let r = Row::from_terms([
            (Jet::new(0, MultiIndex::from_axes(&[0, 2])), Scalar::one()),
            (Jet::new(0, MultiIndex::unit(1)), Scalar::from_int(-1)),
        ]);
        assert_eq!(names.row(&r), "D[1,3] y - D[2] y");
        assert_eq!(names.row_sub(&r), "y_13 - y_2");
        let p = &ScalarOp::d(0) + &ScalarOp::coeff(Scalar::var(1));
        assert_eq!(names.op(&p), "d1 + x2");
    }
}
