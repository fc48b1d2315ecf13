//! Dimensional quantities, physical constants and the unit whitelist.
//!
//! Every value is stored in SI base units together with its [`Dimension`].
//! Prefixes are resolved once, at parse time. The accepted unit grammar is
//!
//! ```text
//! quantity := number ws? unit
//! unit     := term (('/' | '*') term)*
//! term     := symbol ('^' int)?
//! symbol   := W | mW | uW | nW | pW | fW | J
//!           | kg | g | m | mm | um | nm | pm | fm
//!           | s | h | day | K | mK | uK | mol | 1
//! ```
//!
//! `number` is anything `f64::from_str` accepts in decimal or exponent form
//! (`10`, `-1.5`, `0.146e-20`). Operators are applied left to right, so
//! `W/kg/s` means watts per kilogram per second.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Significant digits used by [`format_quantity`] and [`format_auto`].
pub const DEFAULT_SIG_DIGITS: usize = 4;

/// Exponents over the SI base dimensions used in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Dimension {
    pub mass: i8,
    pub length: i8,
    pub time: i8,
    pub temperature: i8,
    pub amount: i8,
}

impl Dimension {
    pub const fn new(mass: i8, length: i8, time: i8, temperature: i8, amount: i8) -> Self {
        Self {
            mass,
            length,
            time,
            temperature,
            amount,
        }
    }

    pub const DIMENSIONLESS: Dimension = Dimension::new(0, 0, 0, 0, 0);
    pub const MASS: Dimension = Dimension::new(1, 0, 0, 0, 0);
    pub const LENGTH: Dimension = Dimension::new(0, 1, 0, 0, 0);
    pub const TIME: Dimension = Dimension::new(0, 0, 1, 0, 0);
    pub const TEMPERATURE: Dimension = Dimension::new(0, 0, 0, 1, 0);
    pub const AMOUNT: Dimension = Dimension::new(0, 0, 0, 0, 1);
    pub const AREA: Dimension = Dimension::new(0, 2, 0, 0, 0);
    pub const ENERGY: Dimension = Dimension::new(1, 2, -2, 0, 0);
    pub const POWER: Dimension = Dimension::new(1, 2, -3, 0, 0);
    /// W/kg
    pub const SPECIFIC_POWER: Dimension = Dimension::new(0, 2, -3, 0, 0);
    /// W/mol
    pub const MOLAR_POWER: Dimension = Dimension::new(1, 2, -3, 0, -1);
    /// kg/mol
    pub const MOLAR_MASS: Dimension = Dimension::new(1, 0, 0, 0, -1);
    /// J·s
    pub const ACTION: Dimension = Dimension::new(1, 2, -1, 0, 0);
    /// m³·kg⁻¹·s⁻²
    pub const GRAVITATIONAL: Dimension = Dimension::new(-1, 3, -2, 0, 0);

    fn exponents(self) -> [i8; 5] {
        [
            self.mass,
            self.length,
            self.time,
            self.temperature,
            self.amount,
        ]
    }

    fn from_exponents(e: [i8; 5]) -> Self {
        Self::new(e[0], e[1], e[2], e[3], e[4])
    }

    fn zip(self, other: Self, f: impl Fn(i8, i8) -> Option<i8>) -> Option<Self> {
        let a = self.exponents();
        let b = other.exponents();
        let mut out = [0i8; 5];
        for i in 0..5 {
            out[i] = f(a[i], b[i])?;
        }
        Some(Self::from_exponents(out))
    }

    pub fn try_mul(self, other: Self) -> Result<Self> {
        self.zip(other, i8::checked_add)
            .ok_or_else(|| Error::Domain("dimension exponent overflow".into()))
    }

    pub fn try_div(self, other: Self) -> Result<Self> {
        self.zip(other, i8::checked_sub)
            .ok_or_else(|| Error::Domain("dimension exponent overflow".into()))
    }

    pub fn powi(self, n: i8) -> Result<Self> {
        self.zip(Self::DIMENSIONLESS, |a, _| a.checked_mul(n))
            .ok_or_else(|| Error::Domain("dimension exponent overflow".into()))
    }

    /// Integer root; fails unless every exponent is divisible by `n`.
    pub fn root(self, n: i8) -> Result<Self> {
        if n <= 0 {
            return Err(Error::Domain(format!("invalid root index {n}")));
        }
        self.zip(Self::DIMENSIONLESS, |a, _| (a % n == 0).then_some(a / n))
            .ok_or_else(|| Error::Domain(format!("dimension {self} has no exact {n}-th root")))
    }

    pub fn is_dimensionless(self) -> bool {
        self == Self::DIMENSIONLESS
    }

    /// Renders the dimension as a product of SI base units, e.g. `m^2*s^-3`.
    pub fn si_unit(self) -> String {
        const SYMBOLS: [&str; 5] = ["kg", "m", "s", "K", "mol"];
        let parts: Vec<String> = self
            .exponents()
            .iter()
            .zip(SYMBOLS)
            .filter(|(e, _)| **e != 0)
            .map(|(e, s)| {
                if *e == 1 {
                    s.to_string()
                } else {
                    format!("{s}^{e}")
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.si_unit())
    }
}

/// A finite value in SI base units paired with its dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    value: f64,
    dim: Dimension,
}

impl Quantity {
    pub fn new(value: f64, dim: Dimension) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Domain(format!("non-finite value {value} ({dim})")));
        }
        Ok(Self { value, dim })
    }

    pub fn meters(value: f64) -> Result<Self> {
        Self::new(value, Dimension::LENGTH)
    }

    pub fn kilograms(value: f64) -> Result<Self> {
        Self::new(value, Dimension::MASS)
    }

    pub fn watts(value: f64) -> Result<Self> {
        Self::new(value, Dimension::POWER)
    }

    pub fn watts_per_kg(value: f64) -> Result<Self> {
        Self::new(value, Dimension::SPECIFIC_POWER)
    }

    pub fn watts_per_mol(value: f64) -> Result<Self> {
        Self::new(value, Dimension::MOLAR_POWER)
    }

    pub fn moles(value: f64) -> Result<Self> {
        Self::new(value, Dimension::AMOUNT)
    }

    pub fn dimensionless(value: f64) -> Result<Self> {
        Self::new(value, Dimension::DIMENSIONLESS)
    }

    /// Value in SI base units.
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    /// Returns `self` if it has dimension `dim`, otherwise a dimension error.
    pub fn expect(self, dim: Dimension) -> Result<Self> {
        if self.dim == dim {
            Ok(self)
        } else {
            Err(Error::Dimension {
                expected: dim,
                found: self.dim,
            })
        }
    }

    /// Value expressed in `unit` (e.g. `"pW/kg"`).
    pub fn in_unit(&self, unit: &str) -> Result<f64> {
        let u = parse_unit(unit)?;
        self.expect(u.dim)?;
        Ok(self.value / u.scale)
    }

    pub fn try_add(self, rhs: Self) -> Result<Self> {
        let rhs = rhs.expect(self.dim)?;
        Self::new(self.value + rhs.value, self.dim)
    }

    pub fn try_sub(self, rhs: Self) -> Result<Self> {
        let rhs = rhs.expect(self.dim)?;
        Self::new(self.value - rhs.value, self.dim)
    }

    pub fn try_mul(self, rhs: Self) -> Result<Self> {
        Self::new(self.value * rhs.value, self.dim.try_mul(rhs.dim)?)
    }

    pub fn try_div(self, rhs: Self) -> Result<Self> {
        if rhs.value == 0.0 {
            return Err(Error::Domain("division by zero quantity".into()));
        }
        Self::new(self.value / rhs.value, self.dim.try_div(rhs.dim)?)
    }

    /// Multiplies by a dimensionless factor.
    pub fn scale(self, factor: f64) -> Result<Self> {
        Self::new(self.value * factor, self.dim)
    }

    pub fn powi(self, n: i8) -> Result<Self> {
        Self::new(self.value.powi(n as i32), self.dim.powi(n)?)
    }

    pub fn sqrt(self) -> Result<Self> {
        if self.value < 0.0 {
            return Err(Error::Domain(format!("square root of negative {self}")));
        }
        Self::new(self.value.sqrt(), self.dim.root(2)?)
    }

    pub fn cbrt(self) -> Result<Self> {
        Self::new(self.value.cbrt(), self.dim.root(3)?)
    }

    /// Ordering between quantities of equal dimension.
    pub fn try_cmp(&self, other: &Self) -> Result<Ordering> {
        let other = other.expect(self.dim)?;
        Ok(self.value.total_cmp(&other.value))
    }
}

/// Full-precision rendering in SI base units; re-parses to the identical value.
impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} {}", self.value, self.dim.si_unit())
    }
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_quantity(s)
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_quantity(&s).map_err(serde::de::Error::custom)
    }
}

/// A parsed unit expression: SI scale factor and dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unit {
    pub scale: f64,
    pub dim: Dimension,
}

const SYMBOLS: &[(&str, f64, Dimension)] = &[
    ("W", 1.0, Dimension::POWER),
    ("mW", 1e-3, Dimension::POWER),
    ("uW", 1e-6, Dimension::POWER),
    ("nW", 1e-9, Dimension::POWER),
    ("pW", 1e-12, Dimension::POWER),
    ("fW", 1e-15, Dimension::POWER),
    ("J", 1.0, Dimension::ENERGY),
    ("kg", 1.0, Dimension::MASS),
    ("g", 1e-3, Dimension::MASS),
    ("m", 1.0, Dimension::LENGTH),
    ("mm", 1e-3, Dimension::LENGTH),
    ("um", 1e-6, Dimension::LENGTH),
    ("nm", 1e-9, Dimension::LENGTH),
    ("pm", 1e-12, Dimension::LENGTH),
    ("fm", 1e-15, Dimension::LENGTH),
    ("s", 1.0, Dimension::TIME),
    ("h", 3600.0, Dimension::TIME),
    ("day", 86400.0, Dimension::TIME),
    ("K", 1.0, Dimension::TEMPERATURE),
    ("mK", 1e-3, Dimension::TEMPERATURE),
    ("uK", 1e-6, Dimension::TEMPERATURE),
    ("mol", 1.0, Dimension::AMOUNT),
    ("1", 1.0, Dimension::DIMENSIONLESS),
];

fn parse_term(term: &str) -> Result<Unit> {
    let term = term.trim();
    if term.is_empty() {
        return Err(Error::parse(term, "empty unit term"));
    }
    let (symbol, power) = match term.split_once('^') {
        Some((s, p)) => {
            let p = p.trim();
            let n: i8 = p
                .parse()
                .map_err(|_| Error::parse(p, "unit exponent must be a small integer"))?;
            (s.trim(), n)
        }
        None => (term, 1),
    };
    let &(_, scale, dim) = SYMBOLS
        .iter()
        .find(|(s, _, _)| *s == symbol)
        .ok_or_else(|| Error::parse(symbol, "unknown unit symbol"))?;
    Ok(Unit {
        scale: scale.powi(power as i32),
        dim: dim.powi(power)?,
    })
}

/// Parses a unit expression such as `pW/kg` or `m^2`.
pub fn parse_unit(text: &str) -> Result<Unit> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::parse("", "missing unit"));
    }
    let first_op = text.find(['/', '*']).unwrap_or(text.len());
    let mut acc = parse_term(&text[..first_op])?;
    let mut rest = &text[first_op..];
    while let Some(op) = rest.chars().next() {
        rest = &rest[1..];
        let end = rest.find(['/', '*']).unwrap_or(rest.len());
        let term = parse_term(&rest[..end])?;
        acc = if op == '*' {
            Unit {
                scale: acc.scale * term.scale,
                dim: acc.dim.try_mul(term.dim)?,
            }
        } else {
            Unit {
                scale: acc.scale / term.scale,
                dim: acc.dim.try_div(term.dim)?,
            }
        };
        rest = &rest[end..];
    }
    Ok(acc)
}

/// Length of the leading numeric literal in `text`.
fn number_prefix_len(text: &str) -> usize {
    let b = text.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let digits_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    if i < b.len() && b[i] == b'.' {
        i += 1;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i == digits_start || (i == digits_start + 1 && b[digits_start] == b'.') {
        return 0;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        if j < b.len() && b[j].is_ascii_digit() {
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    i
}

/// Parses `<number><ws?><unit>` into an SI-normalized [`Quantity`].
pub fn parse_quantity(text: &str) -> Result<Quantity> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::parse("", "empty quantity"));
    }
    let n = number_prefix_len(text);
    if n == 0 {
        let token = text.split_whitespace().next().unwrap_or(text);
        return Err(Error::parse(token, "expected a number"));
    }
    let (num, unit) = text.split_at(n);
    let value: f64 = num
        .parse()
        .map_err(|_| Error::parse(num, "malformed number"))?;
    let unit = unit.trim();
    if unit.is_empty() {
        return Err(Error::parse(text, "missing unit"));
    }
    let u = parse_unit(unit)?;
    Quantity::new(value * u.scale, u.dim)
        .map_err(|_| Error::parse(text, "value overflows after unit conversion"))
}

/// Renders `value` with `sig` significant digits.
///
/// Fixed notation is used when the decimal exponent lies in `[-3, sig)`,
/// scientific (`1.235e5`) otherwise. Zero renders as `0`.
pub fn render_number(value: f64, sig: usize) -> String {
    let sig = sig.max(1);
    if value == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", sig - 1, value);
    let exp: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .unwrap_or(0);
    if (-3..sig as i32).contains(&exp) {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        format!("{:.*}", decimals, value)
    } else {
        sci
    }
}

/// Formats `q` in `target_unit` with the default number of significant digits.
pub fn format_quantity(q: &Quantity, target_unit: &str) -> Result<String> {
    format_quantity_sig(q, target_unit, DEFAULT_SIG_DIGITS)
}

pub fn format_quantity_sig(q: &Quantity, target_unit: &str, sig: usize) -> Result<String> {
    let v = q.in_unit(target_unit)?;
    Ok(format!("{} {}", render_number(v, sig), target_unit.trim()))
}

/// Display units tried by [`format_auto`], smallest scale first within each dimension.
const AUTO_UNITS: &[&str] = &[
    "fm", "pm", "nm", "um", "mm", "m", //
    "fW", "pW", "nW", "uW", "mW", "W", //
    "fW/kg", "pW/kg", "nW/kg", "uW/kg", "mW/kg", "W/kg", //
    "fW/mol", "pW/mol", "nW/mol", "uW/mol", "mW/mol", "W/mol", //
    "g", "kg", "m^2", "s", "mol", "kg/mol", "uK", "mK", "K",
];

/// Conventional unprefixed unit name for `dim` (`W/kg`, `m^2`), falling back
/// to the SI base form.
pub fn base_unit(dim: Dimension) -> String {
    AUTO_UNITS
        .iter()
        .find(|s| parse_unit(s).is_ok_and(|u| u.dim == dim && u.scale == 1.0))
        .map(|s| s.to_string())
        .unwrap_or_else(|| dim.si_unit())
}

/// Formats `q` choosing an SI prefix that puts the mantissa in `[1, 1000)`.
///
/// Zero and out-of-range values use the unprefixed unit; dimensions with no
/// named unit fall back to the SI base form.
pub fn format_auto(q: &Quantity, sig: usize) -> String {
    let candidates: Vec<(&str, Unit)> = AUTO_UNITS
        .iter()
        .filter_map(|s| parse_unit(s).ok().map(|u| (*s, u)))
        .filter(|(_, u)| u.dim == q.dim)
        .collect();
    let base = base_unit(q.dim);
    if q.value != 0.0 {
        for (sym, u) in &candidates {
            let v = q.value / u.scale;
            let rounded: f64 = render_number(v, sig).parse().unwrap_or(v);
            if (1.0..1000.0).contains(&rounded.abs()) {
                return format!("{} {}", render_number(v, sig), sym);
            }
        }
    }
    let v = q.value / parse_unit(&base).map(|u| u.scale).unwrap_or(1.0);
    format!("{} {}", render_number(v, sig), base)
}

/// Gravitational constant and reduced Planck constant in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    g: f64,
    hbar: f64,
}

impl PhysicalConstants {
    /// CODATA-2018 values.
    pub const fn codata2018() -> Self {
        Self {
            g: 6.674_30e-11,
            hbar: 1.054_571_817e-34,
        }
    }

    /// Overridden constants, e.g. for sensitivity studies.
    pub fn new(g: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("G", g), ("hbar", hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self { g, hbar })
    }

    /// G in m³·kg⁻¹·s⁻².
    pub fn gravitational_constant(&self) -> Quantity {
        Quantity {
            value: self.g,
            dim: Dimension::GRAVITATIONAL,
        }
    }

    /// ħ in J·s.
    pub fn reduced_planck(&self) -> Quantity {
        Quantity {
            value: self.hbar,
            dim: Dimension::ACTION,
        }
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata2018()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    name: String,
    molar_mass: Quantity,
    debye_waller_b: Option<Quantity>,
}

impl Material {
    pub fn new(
        name: impl Into<String>,
        molar_mass: Quantity,
        debye_waller_b: Option<Quantity>,
    ) -> Result<Self> {
        let molar_mass = molar_mass.expect(Dimension::MOLAR_MASS)?;
        if molar_mass.value() <= 0.0 {
            return Err(Error::Domain("molar mass must be positive".into()));
        }
        if let Some(b) = debye_waller_b {
            if b.expect(Dimension::AREA)?.value() < 0.0 {
                return Err(Error::Domain(
                    "Debye-Waller factor must be non-negative".into(),
                ));
            }
        }
        Ok(Self {
            name: name.into(),
            molar_mass,
            debye_waller_b,
        })
    }

    /// Copper: 63.546 g/mol, low-temperature Debye-Waller factor 0.146e-20 m².
    pub fn copper() -> Self {
        Self {
            name: "copper".into(),
            molar_mass: Quantity {
                value: 0.063_546,
                dim: Dimension::MOLAR_MASS,
            },
            debye_waller_b: Some(Quantity {
                value: 1.46e-21,
                dim: Dimension::AREA,
            }),
        }
    }

    /// Looks up a built-in material by name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "copper" | "cu" => Some(Self::copper()),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn molar_mass(&self) -> Quantity {
        self.molar_mass
    }

    pub fn debye_waller_b(&self) -> Option<Quantity> {
        self.debye_waller_b
    }

    /// Amount of substance in `mass` of this material.
    pub fn moles_in(&self, mass: Quantity) -> Result<Quantity> {
        mass.expect(Dimension::MASS)?.try_div(self.molar_mass)
    }
}

/// Converts a power per mole into a power per kilogram of `material`.
pub fn molar_to_specific(p: Quantity, material: &Material) -> Result<Quantity> {
    p.expect(Dimension::MOLAR_POWER)?
        .try_div(material.molar_mass())?
        .expect(Dimension::SPECIFIC_POWER)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        if a == b {
            0.0
        } else {
            ((a - b) / b).abs()
        }
    }

    #[test]
    fn parses_common_units() {
        let q = parse_quantity("10 pW/kg").unwrap();
        assert_eq!(q.dim(), Dimension::SPECIFIC_POWER);
        assert!(rel(q.value(), 1.0e-11) < 1e-15);

        let q = parse_quantity("100 nW/kg").unwrap();
        assert_eq!(q.dim(), Dimension::SPECIFIC_POWER);
        assert!(rel(q.value(), 1.0e-7) < 1e-15);

        let q = parse_quantity("0.146e-20 m^2").unwrap();
        assert_eq!(q.dim(), Dimension::AREA);
        assert!(rel(q.value(), 1.46e-21) < 1e-15);

        let q = parse_quantity("1 pW/mol").unwrap();
        assert_eq!(q.dim(), Dimension::MOLAR_POWER);
        assert_eq!(parse_quantity("4.3pm").unwrap().dim(), Dimension::LENGTH);
        assert_eq!(parse_quantity("17 kg").unwrap().value(), 17.0);
        assert_eq!(parse_quantity("500 g").unwrap().value(), 0.5);
    }

    #[test]
    fn parse_errors_name_the_token() {
        match parse_quantity("10 furlongs") {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "furlongs"),
            other => panic!("{other:?}"),
        }
        match parse_quantity("abc pW") {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "abc"),
            other => panic!("{other:?}"),
        }
        match parse_quantity("3 m^x") {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "x"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_quantity(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_quantity("   "), Err(Error::Parse { .. })));
        assert!(matches!(parse_quantity("12"), Err(Error::Parse { .. })));
        assert!(matches!(parse_quantity("1 pW/"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_quantity("1e400 m"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn molar_conversion_copper() {
        let cu = Material::copper();
        let one = molar_to_specific(parse_quantity("1 pW/mol").unwrap(), &cu).unwrap();
        assert!(rel(one.value(), 1e-12 / 0.063546) < 1e-14);
        assert!(rel(one.value(), 1.5737e-11) < 1e-4);

        let zero = molar_to_specific(parse_quantity("0 pW/mol").unwrap(), &cu).unwrap();
        assert_eq!(zero.value(), 0.0);

        let two = molar_to_specific(parse_quantity("2 pW/mol").unwrap(), &cu).unwrap();
        assert_eq!(two.value(), 2.0 * one.value());

        let wrong = molar_to_specific(parse_quantity("1 pW/kg").unwrap(), &cu);
        assert!(matches!(wrong, Err(Error::Dimension { .. })));
    }

    #[test]
    fn formatting_examples() {
        let q = Quantity::watts_per_kg(1.0e-11).unwrap();
        assert_eq!(format_quantity(&q, "pW/kg").unwrap(), "10.00 pW/kg");
        let l = Quantity::meters(4.6e-12).unwrap();
        assert_eq!(format_quantity(&l, "pm").unwrap(), "4.600 pm");
        assert!(matches!(
            format_quantity(&l, "pW/kg"),
            Err(Error::Dimension { .. })
        ));
        let back = parse_quantity(&format_quantity(&q, "pW/kg").unwrap()).unwrap();
        assert!(rel(back.value(), q.value()) < 1e-12);
    }

    #[test]
    fn render_number_edges() {
        assert_eq!(render_number(9.9996, 4), "10.00");
        assert_eq!(render_number(0.0, 4), "0");
        assert_eq!(render_number(123456.0, 4), "1.235e5");
        assert_eq!(render_number(0.00123456, 4), "0.001235");
        assert_eq!(render_number(-4.3, 3), "-4.30");
    }

    #[test]
    fn auto_formatting_picks_prefix() {
        assert_eq!(
            format_auto(&Quantity::meters(4.3e-12).unwrap(), 4),
            "4.300 pm"
        );
        assert_eq!(format_auto(&Quantity::meters(0.0).unwrap(), 4), "0 m");
        assert_eq!(
            format_auto(&Quantity::watts_per_kg(1.2488e-11).unwrap(), 4),
            "12.49 pW/kg"
        );
        assert_eq!(
            format_auto(&Quantity::watts(2.1230e-10).unwrap(), 4),
            "212.3 pW"
        );
        assert_eq!(
            format_auto(&Quantity::watts_per_kg(9.93e-25).unwrap(), 4),
            "9.930e-25 W/kg"
        );
        assert_eq!(
            format_auto(&Quantity::meters(999.96e-12).unwrap(), 4),
            "1.000 nm"
        );
    }

    #[test]
    fn display_round_trips_exactly() {
        let g = PhysicalConstants::codata2018().gravitational_constant();
        let back = parse_quantity(&g.to_string()).unwrap();
        assert_eq!(back, g);
        let d = Quantity::dimensionless(0.5).unwrap();
        assert_eq!(parse_quantity(&d.to_string()).unwrap(), d);
    }

    #[test]
    fn arithmetic_enforces_dimensions() {
        let a = Quantity::meters(1.0).unwrap();
        let b = Quantity::kilograms(1.0).unwrap();
        assert!(matches!(a.try_add(b), Err(Error::Dimension { .. })));
        assert!(a.try_cmp(&b).is_err());
        assert!(a.try_mul(b).unwrap().sqrt().is_err());
        assert!(Quantity::new(f64::NAN, Dimension::LENGTH).is_err());
        assert!(Quantity::new(f64::INFINITY, Dimension::LENGTH).is_err());
        assert!(Quantity::new(1e300, Dimension::LENGTH)
            .unwrap()
            .try_mul(Quantity::new(1e300, Dimension::LENGTH).unwrap())
            .is_err());
    }

    #[test]
    fn constants_and_materials_validate() {
        assert!(PhysicalConstants::new(0.0, 1.0).is_err());
        assert!(PhysicalConstants::new(1.0, f64::NAN).is_err());
        let kgmol = parse_quantity("1 kg/mol").unwrap();
        assert!(Material::new("x", kgmol.scale(-1.0).unwrap(), None).is_err());
        assert!(Material::new("x", kgmol, Some(parse_quantity("-1 m^2").unwrap())).is_err());
        assert!(Material::new("x", parse_quantity("1 kg").unwrap(), None).is_err());
        assert!(Material::builtin("unobtainium").is_none());
        let cu = Material::builtin("copper").unwrap();
        assert_eq!(cu.molar_mass().value(), 0.063546);
        assert_eq!(cu.debye_waller_b().unwrap().value(), 1.46e-21);
    }

    fn arb_dim() -> impl Strategy<Value = Dimension> {
        (-4i8..=4, -4i8..=4, -4i8..=4, -4i8..=4, -4i8..=4)
            .prop_map(|(a, b, c, d, e)| Dimension::new(a, b, c, d, e))
    }

    const UNIT_CHOICES: &[&str] = &[
        "W", "pW", "nW", "kg", "g", "m", "pm", "s", "K", "mol", "pW/kg", "nW/kg", "pW/mol", "m^2",
        "W/kg/s", "kg*m^2", "J/K",
    ];

    proptest! {
        #[test]
        fn dimension_mul_div_inverse(a in arb_dim(), b in arb_dim()) {
            prop_assert_eq!(a.try_mul(b).unwrap().try_div(b).unwrap(), a);
        }

        #[test]
        fn parse_format_parse_is_idempotent(
            mantissa in 1.0f64..10.0,
            exp in -30i32..30,
            neg in any::<bool>(),
            unit_idx in 0..UNIT_CHOICES.len(),
            sig in 1usize..10,
        ) {
            let unit = UNIT_CHOICES[unit_idx];
            let v = if neg { -mantissa } else { mantissa } * 10f64.powi(exp);
            let text = format!("{v:e} {unit}");
            let q1 = parse_quantity(&text).unwrap();
            let q2 = parse_quantity(&format_quantity_sig(&q1, unit, sig).unwrap()).unwrap();
            let q3 = parse_quantity(&format_quantity_sig(&q2, unit, sig).unwrap()).unwrap();
            prop_assert!(rel(q3.value(), q2.value()) <= 1e-12);
            prop_assert!(rel(q2.value(), q1.value()) <= 10f64.powi(1 - sig as i32));
            let exact = parse_quantity(&format_quantity_sig(&q1, unit, 17).unwrap()).unwrap();
            prop_assert!(rel(exact.value(), q1.value()) <= 1e-12);
            let disp = parse_quantity(&q1.to_string()).unwrap();
            prop_assert_eq!(disp, q1);
        }

        #[test]
        fn molar_to_specific_is_linear(p in 0.0f64..1e-6, k in 0.0f64..100.0, mm in 1e-3f64..1.0) {
            let mat = Material::new("m", Quantity::new(mm, Dimension::MOLAR_MASS).unwrap(), None).unwrap();
            let a = molar_to_specific(Quantity::watts_per_mol(p).unwrap(), &mat).unwrap();
            let b = molar_to_specific(Quantity::watts_per_mol(k * p).unwrap(), &mat).unwrap();
            prop_assert!((b.value() - k * a.value()).abs() <= 1e-14 * b.value().abs().max(1e-300));
        }
    }
}
