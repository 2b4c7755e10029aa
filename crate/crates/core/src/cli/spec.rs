use std::fmt;

use crate::dfield::expr::parse_expr_at;
use crate::dfield::{check_odd_prime, reduce_mod_p, Elem, Expr, RatFunc, Rational};
use crate::ecurve::{Curve, CurvePoint};
use crate::error::{Error, Result};
use crate::pfgm::Family;

const KEYS: [&str; 7] = ["p", "a2", "a4", "a6", "base_x", "base_y", "family"];

/// A curve `y² = x³ + a₂x² + a₄x + a₆` read from a spec file.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveSpec {
    pub p: Option<u64>,
    pub a2: Expr,
    pub a4: Expr,
    pub a6: Expr,
    pub base_point: Option<(Expr, Expr)>,
    /// Coefficients are read in characteristic 0.
    pub family: bool,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn parse_bool(v: &str, line: usize, column: usize) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(parse_err(line, column, format!("expected true or false, found `{v}`"))),
    }
}

/// Parses `key=value` lines. `#` starts a comment.
pub fn parse_spec(text: &str) -> Result<CurveSpec> {
    let mut p: Option<u64> = None;
    let mut exprs: [Option<Expr>; 5] = Default::default();
    let mut family = None;
    let mut seen: Vec<&str> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        let Some(eq) = content.find('=') else {
            return Err(parse_err(line, indent + 1, "expected `key=value`"));
        };
        let key = content[..eq].trim();
        let rest = &content[eq + 1..];
        let vstart = eq + 1 + (rest.len() - rest.trim_start().len());
        let value = rest.trim();
        let vcol = content[..vstart].chars().count() + 1;
        let Some(slot) = KEYS.iter().position(|k| *k == key) else {
            return Err(parse_err(line, indent + 1, format!("unknown key `{key}`")));
        };
        if seen.contains(&KEYS[slot]) {
            return Err(parse_err(line, indent + 1, format!("duplicate key `{key}`")));
        }
        seen.push(KEYS[slot]);
        if value.is_empty() {
            return Err(parse_err(line, vcol, format!("missing value for `{key}`")));
        }
        match key {
            "p" => {
                let n = value
                    .parse::<u64>()
                    .map_err(|_| parse_err(line, vcol, format!("expected an unsigned integer, found `{value}`")))?;
                p = Some(n);
            }
            "family" => family = Some(parse_bool(value, line, vcol)?),
            _ => exprs[slot - 1] = Some(parse_expr_at(value, line, vcol)?),
        }
    }
    let family = family.unwrap_or(false);
    if let Some(n) = p {
        check_odd_prime(n).map_err(|_| Error::Validation(format!("p = {n} is not an odd prime")))?;
    } else if !family {
        return Err(Error::Validation("missing key `p`".into()));
    }
    let [a2, a4, a6, bx, by] = exprs;
    let need = |e: Option<Expr>, k: &str| e.ok_or_else(|| Error::Validation(format!("missing key `{k}`")));
    let base_point = match (bx, by) {
        (Some(x), Some(y)) => Some((x, y)),
        (None, None) => None,
        _ => return Err(Error::Validation("base_x and base_y must be given together".into())),
    };
    let spec = CurveSpec {
        p,
        a2: need(a2, "a2")?,
        a4: need(a4, "a4")?,
        a6: need(a6, "a6")?,
        base_point,
        family,
    };
    spec.validate()?;
    Ok(spec)
}

impl CurveSpec {
    fn coeffs(&self) -> Result<[RatFunc<Rational>; 3]> {
        Ok([
            self.a2.eval_rational()?,
            self.a4.eval_rational()?,
            self.a6.eval_rational()?,
        ])
    }

    fn validate(&self) -> Result<()> {
        if self.family {
            self.as_family().map_err(|e| match e {
                Error::DegenerateFamily(m) => Error::Validation(m),
                other => other,
            })?;
        }
        if let Some(p) = self.p {
            match self.curve_mod(p) {
                Err(Error::BadReduction(m)) if !self.family => return Err(Error::Validation(m)),
                Err(Error::BadReduction(_)) | Ok(_) => {}
                Err(e) => return Err(e),
            }
            if let Some(pt) = self.base_point_mod(p)? {
                if !self.curve_mod(p)?.is_on(&pt) {
                    return Err(Error::Validation("base point is not on the curve".into()));
                }
            }
        }
        Ok(())
    }

    /// The curve over `Q(t)`.
    pub fn as_family(&self) -> Result<Family> {
        let [a2, a4, a6] = self.coeffs()?;
        Family::new(a2, a4, a6)
    }

    /// The curve over `F_p(t)`; `BadReduction` if a coefficient is not
    /// `p`-integral or the reduction is singular.
    pub fn curve_mod(&self, p: u64) -> Result<Curve<Elem>> {
        let [a2, a4, a6] = self.coeffs()?;
        let r = |a: &RatFunc<Rational>| reduce_mod_p(a, p).map(Elem::from_ratfunc);
        match Curve::new(r(&a2)?, r(&a4)?, r(&a6)?) {
            Err(Error::Validation(m)) => Err(Error::BadReduction(m)),
            other => other,
        }
    }

    pub fn base_point_mod(&self, p: u64) -> Result<Option<CurvePoint<Elem>>> {
        let Some((x, y)) = &self.base_point else {
            return Ok(None);
        };
        let r = |e: &Expr| -> Result<Elem> { Ok(Elem::from_ratfunc(reduce_mod_p(&e.eval_rational()?, p)?)) };
        Ok(Some(CurvePoint::Affine(r(x)?, r(y)?)))
    }
}

/// Canonical spec text; parsing it back yields the same spec.
impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.p {
            writeln!(f, "p={p}")?;
        }
        writeln!(f, "a2={}", self.a2)?;
        writeln!(f, "a4={}", self.a4)?;
        writeln!(f, "a6={}", self.a6)?;
        if let Some((x, y)) = &self.base_point {
            writeln!(f, "base_x={x}")?;
            writeln!(f, "base_y={y}")?;
        }
        if self.family {
            writeln!(f, "family=true")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_spec() {
        let s = parse_spec("p=3\na2=-(1+t)\na4=t\na6=0").unwrap();
        assert_eq!(s.p, Some(3));
        assert_eq!(s.curve_mod(3).unwrap(), crate::ecurve::tests::legendre(3));
        assert_eq!(parse_spec(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn rejections() {
        assert!(matches!(parse_spec("p=4\na2=0\na4=1\na6=t"), Err(Error::Validation(_))));
        assert!(matches!(parse_spec("p=2\na2=0\na4=1\na6=t"), Err(Error::Validation(_))));
        // x³ over F_3(t) is singular
        assert!(matches!(parse_spec("p=3\na2=0\na4=0\na6=0"), Err(Error::Validation(_))));
        assert!(matches!(
            parse_spec("a2=t\na4=t^2/3\na6=t^3/27\nfamily=true"),
            Err(Error::Validation(_))
        ));
        assert_eq!(
            parse_spec("p=3\na2=((1+t)\na4=t\na6=0").unwrap_err(),
            Error::Parse {
                line: 2,
                column: 4,
                message: "unbalanced parenthesis".into()
            }
        );
        let Err(Error::Parse { line, column, .. }) = parse_spec("p=3\n  colour=red") else {
            panic!("unknown key accepted");
        };
        assert_eq!((line, column), (2, 3));
        assert!(matches!(
            parse_spec("p=3\na2=0\na4=t\na6=0\nbase_x=1"),
            Err(Error::Validation(_))
        ));
        assert!(matches!(parse_spec("p=3\np=5"), Err(Error::Parse { .. })));
    }

    #[test]
    fn comments_and_family() {
        let s = parse_spec("# Legendre\nfamily = true\na2 = -(1+t)  # shifted\na4 = t\na6 = 0\n").unwrap();
        assert!(s.family);
        assert_eq!(s.p, None);
        assert_eq!(s.as_family().unwrap(), Family::legendre());
    }
}
