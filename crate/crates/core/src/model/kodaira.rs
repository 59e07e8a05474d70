use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt;

/// Kodaira fiber type of a degenerate fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FiberType {
    Smooth,
    I(u32),
    II,
    III,
    IV,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

/// Simply-laced algebra attached to a fiber type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgebraHint {
    Trivial,
    A(u32),
    D(u32),
    E(u32),
}

impl fmt::Display for FiberType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberType::Smooth => write!(f, "smooth"),
            FiberType::I(n) => write!(f, "I{n}"),
            FiberType::II => write!(f, "II"),
            FiberType::III => write!(f, "III"),
            FiberType::IV => write!(f, "IV"),
            FiberType::IStar(n) => write!(f, "I{n}*"),
            FiberType::IVStar => write!(f, "IV*"),
            FiberType::IIIStar => write!(f, "III*"),
            FiberType::IIStar => write!(f, "II*"),
        }
    }
}

impl fmt::Display for AlgebraHint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraHint::Trivial => write!(f, "trivial"),
            AlgebraHint::A(n) => write!(f, "A{n}"),
            AlgebraHint::D(n) => write!(f, "D{n}"),
            AlgebraHint::E(n) => write!(f, "E{n}"),
        }
    }
}

impl Serialize for FiberType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for AlgebraHint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FiberType {
    pub fn algebra(self) -> AlgebraHint {
        match self {
            FiberType::Smooth | FiberType::II => AlgebraHint::Trivial,
            FiberType::I(n) if n <= 1 => AlgebraHint::Trivial,
            FiberType::I(n) => AlgebraHint::A(n - 1),
            FiberType::III => AlgebraHint::A(1),
            FiberType::IV => AlgebraHint::A(2),
            FiberType::IStar(n) => AlgebraHint::D(n + 4),
            FiberType::IVStar => AlgebraHint::E(6),
            FiberType::IIIStar => AlgebraHint::E(7),
            FiberType::IIStar => AlgebraHint::E(8),
        }
    }

    /// Vanishing order of the discriminant.
    pub fn disc_order(self) -> u32 {
        match self {
            FiberType::Smooth => 0,
            FiberType::I(n) => n,
            FiberType::II => 2,
            FiberType::III => 3,
            FiberType::IV => 4,
            FiberType::IStar(n) => n + 6,
            FiberType::IVStar => 8,
            FiberType::IIIStar => 9,
            FiberType::IIStar => 10,
        }
    }

    /// Accepts `I3`, `III`, `I0*`, `I2star`, `IVstar`, ...
    pub fn parse(name: &str) -> Option<FiberType> {
        let n = name.trim().replace("star", "*");
        Some(match n.as_str() {
            "smooth" | "I0" => FiberType::Smooth,
            "II" => FiberType::II,
            "III" => FiberType::III,
            "IV" => FiberType::IV,
            "IV*" => FiberType::IVStar,
            "III*" => FiberType::IIIStar,
            "II*" => FiberType::IIStar,
            _ => {
                let rest = n.strip_prefix('I')?;
                if let Some(k) = rest.strip_suffix('*') {
                    FiberType::IStar(k.parse().ok()?)
                } else {
                    match rest.parse().ok()? {
                        0 => FiberType::Smooth,
                        k => FiberType::I(k),
                    }
                }
            }
        })
    }
}

/// Vanishing order; `None` stands for an identically zero coefficient.
pub type Order = Option<u32>;

fn at_least(o: Order, k: u32) -> bool {
    o.is_none_or(|v| v >= k)
}

fn exactly(o: Order, k: u32) -> bool {
    o == Some(k)
}

/// Kodaira's table: fiber type from the orders of `f`, `g` and the discriminant.
pub fn classify_kodaira(f: Order, g: Order, disc: Order) -> Result<FiberType> {
    let unknown = || Error::UnknownKodaira { f: fmt_order(f), g: fmt_order(g), disc: fmt_order(disc) };
    let d = disc.ok_or_else(unknown)?;
    let t = if d == 0 {
        FiberType::Smooth
    } else if exactly(f, 0) && exactly(g, 0) {
        FiberType::I(d)
    } else if at_least(f, 1) && exactly(g, 1) && d == 2 {
        FiberType::II
    } else if exactly(f, 1) && at_least(g, 2) && d == 3 {
        FiberType::III
    } else if at_least(f, 2) && exactly(g, 2) && d == 4 {
        FiberType::IV
    } else if d >= 6 && ((exactly(f, 2) && at_least(g, 3)) || (at_least(f, 2) && exactly(g, 3))) {
        FiberType::IStar(d - 6)
    } else if at_least(f, 3) && exactly(g, 4) && d == 8 {
        FiberType::IVStar
    } else if exactly(f, 3) && at_least(g, 5) && d == 9 {
        FiberType::IIIStar
    } else if at_least(f, 4) && exactly(g, 5) && d == 10 {
        FiberType::IIStar
    } else {
        return Err(unknown());
    };
    Ok(t)
}

fn fmt_order(o: Order) -> String {
    o.map_or("inf".to_string(), |v| v.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_orders_count_as_large() {
        assert!(at_least(None, 7));
        assert!(!exactly(None, 7));
        assert_eq!(fmt_order(None), "inf");
        assert_eq!(classify_kodaira(None, Some(1), Some(2)).unwrap(), FiberType::II);
        assert!(classify_kodaira(Some(0), Some(0), None).is_err());
    }

    #[test]
    fn non_minimal_orders_are_rejected() {
        assert!(classify_kodaira(Some(4), Some(6), Some(12)).is_err());
        assert!(classify_kodaira(Some(0), Some(1), Some(1)).is_err());
    }
}
