use serde::ser::{Serialize, SerializeMap, Serializer};

use super::Expr;

/// Node-tagged JSON form: `{"node": "add", "lhs": .., "rhs": ..}`, constants
/// as exact fraction strings.
impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        match self {
            Expr::Const(c) => {
                map.serialize_entry("node", "const")?;
                map.serialize_entry("value", c)?;
            }
            Expr::Var => map.serialize_entry("node", "var")?,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let tag = match self {
                    Expr::Add(..) => "add",
                    Expr::Sub(..) => "sub",
                    Expr::Mul(..) => "mul",
                    _ => "div",
                };
                map.serialize_entry("node", tag)?;
                map.serialize_entry("lhs", a)?;
                map.serialize_entry("rhs", b)?;
            }
            Expr::PowInt(base, n) => {
                map.serialize_entry("node", "pow_int")?;
                map.serialize_entry("base", base)?;
                map.serialize_entry("exponent", n)?;
            }
            Expr::Sqrt(e) | Expr::Sin(e) | Expr::Cos(e) | Expr::Abs(e) | Expr::Sgn(e) => {
                let tag = match self {
                    Expr::Sqrt(_) => "sqrt",
                    Expr::Sin(_) => "sin",
                    Expr::Cos(_) => "cos",
                    Expr::Abs(_) => "abs",
                    _ => "sgn",
                };
                map.serialize_entry("node", tag)?;
                map.serialize_entry("arg", e)?;
            }
        }
        map.end()
    }
}
