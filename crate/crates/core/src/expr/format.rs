use std::fmt;

use super::Expr;

// Binding strength used to decide parenthesisation. Negative constants bind
// loosest so they are always parenthesised as operands; fraction constants
// sit between products and powers.
const NEG_CONST: u8 = 0;
const SUM: u8 = 2;
const PRODUCT: u8 = 4;
const FRACTION: u8 = 5;
const POWER: u8 = 6;
const ATOM: u8 = 8;

fn strength(e: &Expr) -> u8 {
    match e {
        Expr::Const(c) if c.is_negative() => NEG_CONST,
        Expr::Const(c) if !c.is_integer() => FRACTION,
        Expr::Const(_) | Expr::Var => ATOM,
        Expr::Add(..) | Expr::Sub(..) => SUM,
        Expr::Mul(..) | Expr::Div(..) => PRODUCT,
        Expr::PowInt(..) => POWER,
        Expr::Sqrt(_) | Expr::Sin(_) | Expr::Cos(_) | Expr::Abs(_) | Expr::Sgn(_) => ATOM,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if strength(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Canonical text form; `parse(e.to_string())` reproduces `e` exactly.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binary =
            |f: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr, left: u8, right: u8| {
                write_operand(f, a, left)?;
                write!(f, " {op} ")?;
                write_operand(f, b, right)
            };
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var => f.write_str("x"),
            Expr::Add(a, b) => binary(f, a, "+", b, SUM, SUM + 1),
            Expr::Sub(a, b) => binary(f, a, "-", b, SUM, SUM + 1),
            Expr::Mul(a, b) => binary(f, a, "*", b, PRODUCT, FRACTION),
            Expr::Div(a, b) => binary(f, a, "/", b, PRODUCT, POWER),
            Expr::PowInt(base, n) => {
                write_operand(f, base, POWER)?;
                write!(f, "^{n}")
            }
            Expr::Sqrt(e) => write!(f, "sqrt({e})"),
            Expr::Sin(e) => write!(f, "sin({e})"),
            Expr::Cos(e) => write!(f, "cos({e})"),
            Expr::Abs(e) => write!(f, "abs({e})"),
            Expr::Sgn(e) => write!(f, "sgn({e})"),
        }
    }
}
