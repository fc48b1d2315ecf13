//! Closed-form heating laws and their inversion into length bounds.
//!
//! The DP specific heating power is `G·ħ / (4√π·R0³)`; the classical-channel
//! variant drops the `4√π` and uses the length `a` in place of `R0`. Both are
//! exactly invertible, so bounds come from a cube root rather than a search.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantities::{Dimension, PhysicalConstants, Quantity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Diósi-Penrose, length parameter R0.
    #[serde(rename = "dp")]
    DiosiPenrose,
    /// Classical-channel gravity, length parameter a.
    #[serde(rename = "ccg")]
    ClassicalChannel,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::DiosiPenrose => "dp",
            ModelKind::ClassicalChannel => "ccg",
        }
    }

    /// Symbol of the length parameter bounded for this model.
    pub fn length_symbol(self) -> &'static str {
        match self {
            ModelKind::DiosiPenrose => "R0",
            ModelKind::ClassicalChannel => "a",
        }
    }

    /// Dimensionless factor dividing `G·ħ/L³`.
    fn denominator(self) -> f64 {
        match self {
            ModelKind::DiosiPenrose => 4.0 * PI.sqrt(),
            ModelKind::ClassicalChannel => 1.0,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dp" | "diosi-penrose" => Ok(ModelKind::DiosiPenrose),
            "ccg" | "classical-channel" => Ok(ModelKind::ClassicalChannel),
            other => Err(Error::parse(other, "unknown model (expected dp or ccg)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatingModel {
    pub kind: ModelKind,
    pub constants: PhysicalConstants,
}

impl HeatingModel {
    pub fn new(kind: ModelKind, constants: PhysicalConstants) -> Self {
        Self { kind, constants }
    }

    pub fn dp() -> Self {
        Self::new(ModelKind::DiosiPenrose, PhysicalConstants::codata2018())
    }

    pub fn classical_channel() -> Self {
        Self::new(ModelKind::ClassicalChannel, PhysicalConstants::codata2018())
    }

    /// `G·ħ / denominator`, dimension m⁵·s⁻³.
    fn coupling(&self) -> Result<Quantity> {
        self.constants
            .gravitational_constant()
            .try_mul(self.constants.reduced_planck())?
            .scale(1.0 / self.kind.denominator())
    }

    /// Heating power per unit mass at length parameter `length`.
    pub fn specific_power(&self, length: Quantity) -> Result<Quantity> {
        let length = length.expect(Dimension::LENGTH)?;
        if length.value() <= 0.0 {
            return Err(Error::Domain(format!(
                "length must be positive, got {length}"
            )));
        }
        self.coupling()?
            .try_div(length.powi(3)?)
            .map_err(|_| Error::Domain(format!("specific power overflows at {length}")))?
            .expect(Dimension::SPECIFIC_POWER)
    }

    /// Heating power of a body of `mass`.
    pub fn total_power(&self, length: Quantity, mass: Quantity) -> Result<Quantity> {
        let mass = mass.expect(Dimension::MASS)?;
        if mass.value() < 0.0 {
            return Err(Error::Domain(format!(
                "mass must be non-negative, got {mass}"
            )));
        }
        self.specific_power(length)?.try_mul(mass)
    }

    /// Smallest length parameter compatible with a specific-power limit.
    pub fn invert_bound(&self, power_limit: Quantity) -> Result<LengthBound> {
        let source = format!(
            "{} heating inverted at P = {}",
            self.kind,
            crate::quantities::format_auto(&power_limit, 4)
        );
        self.invert_bound_with_source(power_limit, source)
    }

    pub fn invert_bound_with_source(
        &self,
        power_limit: Quantity,
        source: impl Into<String>,
    ) -> Result<LengthBound> {
        let p = power_limit.expect(Dimension::SPECIFIC_POWER)?;
        if p.value() <= 0.0 {
            return Err(Error::Domain(format!(
                "power limit must be positive, got {p}"
            )));
        }
        let length = self
            .coupling()?
            .try_div(p)
            .map_err(|_| Error::Domain(format!("inversion overflows at {p}")))?
            .cbrt()?;
        LengthBound::new(length, self.kind, source)
    }
}

/// Lower bound on a model's length parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthBound {
    pub value: Quantity,
    pub model: ModelKind,
    pub source: String,
}

impl LengthBound {
    pub fn new(value: Quantity, model: ModelKind, source: impl Into<String>) -> Result<Self> {
        let value = value.expect(Dimension::LENGTH)?;
        if value.value() <= 0.0 {
            return Err(Error::Domain(format!(
                "length bound must be positive, got {value}"
            )));
        }
        Ok(Self {
            value,
            model,
            source: source.into(),
        })
    }

    /// Bounds always exclude lengths below `value`.
    pub fn is_lower(&self) -> bool {
        true
    }

    pub fn meters(&self) -> f64 {
        self.value.value()
    }

    /// Compares two bounds on the same model; cross-model comparison is an error.
    pub fn try_cmp(&self, other: &Self) -> Result<Ordering> {
        if self.model != other.model {
            return Err(Error::IncomparableBounds {
                left: self.model.to_string(),
                right: other.model.to_string(),
            });
        }
        self.value.try_cmp(&other.value)
    }
}

/// Root-mean-square nuclear displacement `sqrt(B / 8π²)` from a Debye-Waller factor.
pub fn urms_from_debye_waller(b: Quantity) -> Result<Quantity> {
    let b = b.expect(Dimension::AREA)?;
    if b.value() < 0.0 {
        return Err(Error::Domain(format!(
            "Debye-Waller factor must be non-negative, got {b}"
        )));
    }
    b.scale(1.0 / (8.0 * PI * PI))?.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn m(v: f64) -> Quantity {
        Quantity::meters(v).unwrap()
    }

    fn wkg(v: f64) -> Quantity {
        Quantity::watts_per_kg(v).unwrap()
    }

    // Direct evaluation with the CODATA-2018 constants typed out, kept apart
    // from the Quantity arithmetic used by the implementation.
    fn dp_oracle(l: f64) -> f64 {
        6.674_30e-11 * 1.054_571_817e-34 / (4.0 * std::f64::consts::PI.sqrt() * l * l * l)
    }

    #[test]
    fn dp_specific_power_examples() {
        let dp = HeatingModel::dp();
        let p = dp.specific_power(m(4.3e-12)).unwrap().value();
        assert!(rel(p, dp_oracle(4.3e-12)) < 1e-14);
        assert!(rel(p, 1.249e-11) < 1e-3);
        assert!(rel(p, 12e-12) < 0.05);

        let p = dp.specific_power(m(1.0e-7)).unwrap().value();
        assert!(rel(p, dp_oracle(1.0e-7)) < 1e-14);
        assert!(rel(p, 9.93e-25) < 1e-3);

        let l = 3.1e-12;
        let ratio = dp.specific_power(m(l)).unwrap().value()
            / dp.specific_power(m(2.0 * l)).unwrap().value();
        assert!(rel(ratio, 8.0) < 1e-14);
    }

    #[test]
    fn specific_power_domain_errors() {
        let dp = HeatingModel::dp();
        assert!(matches!(dp.specific_power(m(0.0)), Err(Error::Domain(_))));
        assert!(matches!(
            dp.specific_power(m(-1e-12)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            dp.specific_power(Quantity::kilograms(1.0).unwrap()),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            dp.specific_power(m(1e-200)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn total_power_examples() {
        let dp = HeatingModel::dp();
        let kg = |v| Quantity::kilograms(v).unwrap();
        let p = dp.total_power(m(4.3e-12), kg(17.0)).unwrap();
        assert_eq!(p.dim(), Dimension::POWER);
        assert!(rel(p.value(), 17.0 * dp_oracle(4.3e-12)) < 1e-14);
        assert!(rel(p.value(), 2.12e-10) < 2e-3);
        assert_eq!(dp.total_power(m(4.3e-12), kg(0.0)).unwrap().value(), 0.0);
        let one = dp.total_power(m(5e-12), kg(3.0)).unwrap().value();
        let two = dp.total_power(m(5e-12), kg(6.0)).unwrap().value();
        assert_eq!(two, 2.0 * one);
        assert!(matches!(
            dp.total_power(m(5e-12), kg(-1.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn inversion_examples() {
        let dp = HeatingModel::dp();
        let ccg = HeatingModel::classical_channel();
        let cases = [
            (dp, 1.0e-11, 4.63e-12),
            (dp, 2.0e-11, 3.67e-12),
            (dp, 1.0e-7, 2.15e-13),
            (ccg, 1.0e-11, 8.90e-12),
        ];
        for (model, p, expected) in cases {
            let b = model.invert_bound(wkg(p)).unwrap();
            assert_eq!(b.model, model.kind);
            assert!(b.is_lower());
            assert!(rel(b.meters(), expected) < 5e-3, "{p}: {}", b.meters());
        }
        assert!(matches!(dp.invert_bound(wkg(0.0)), Err(Error::Domain(_))));
        assert!(matches!(dp.invert_bound(wkg(-1.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn urms_examples() {
        let area = |v| Quantity::new(v, Dimension::AREA).unwrap();
        let u = urms_from_debye_waller(area(1.46e-21)).unwrap();
        assert_eq!(u.dim(), Dimension::LENGTH);
        assert!(rel(u.value(), 4.30e-12) < 1e-2);
        assert_eq!(urms_from_debye_waller(area(0.0)).unwrap().value(), 0.0);
        let one = urms_from_debye_waller(area(8.0 * PI * PI)).unwrap().value();
        assert!(rel(one, 1.0) < 1e-15);
        assert!(matches!(
            urms_from_debye_waller(area(-1e-21)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn bounds_compare_within_model_only() {
        let dp = HeatingModel::dp();
        let ccg = HeatingModel::classical_channel();
        let a = dp.invert_bound(wkg(1e-11)).unwrap();
        let b = dp.invert_bound(wkg(2e-11)).unwrap();
        assert_eq!(a.try_cmp(&b).unwrap(), Ordering::Greater);
        let c = ccg.invert_bound(wkg(1e-11)).unwrap();
        assert!(matches!(
            a.try_cmp(&c),
            Err(Error::IncomparableBounds { .. })
        ));
        assert!(LengthBound::new(m(0.0), ModelKind::DiosiPenrose, "x").is_err());
    }

    #[test]
    fn model_kind_parsing() {
        assert_eq!("dp".parse::<ModelKind>().unwrap(), ModelKind::DiosiPenrose);
        assert_eq!(
            "CCG".parse::<ModelKind>().unwrap(),
            ModelKind::ClassicalChannel
        );
        assert!("csl".parse::<ModelKind>().is_err());
    }

    #[test]
    fn overridden_constants_propagate() {
        let c = PhysicalConstants::new(2.0 * 6.674_30e-11, 1.054_571_817e-34).unwrap();
        let doubled = HeatingModel::new(ModelKind::DiosiPenrose, c);
        let r = doubled.specific_power(m(4e-12)).unwrap().value()
            / HeatingModel::dp().specific_power(m(4e-12)).unwrap().value();
        assert!(rel(r, 2.0) < 1e-14);
    }

    fn arb_model() -> impl Strategy<Value = HeatingModel> {
        prop_oneof![
            Just(HeatingModel::dp()),
            Just(HeatingModel::classical_channel())
        ]
    }

    proptest! {
        #[test]
        fn invert_then_predict_round_trips(model in arb_model(), log_p in -30.0f64..-3.0) {
            let p = 10f64.powf(log_p);
            let b = model.invert_bound(wkg(p)).unwrap();
            let back = model.specific_power(b.value).unwrap().value();
            prop_assert!(rel(back, p) <= 1e-12);
        }

        #[test]
        fn monotone_in_both_directions(model in arb_model(), a in -30.0f64..-3.0, b in -30.0f64..-3.0) {
            prop_assume!(a != b);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let l_lo = model.invert_bound(wkg(10f64.powf(lo))).unwrap().meters();
            let l_hi = model.invert_bound(wkg(10f64.powf(hi))).unwrap().meters();
            prop_assert!(l_lo > l_hi);
            let p_small = model.specific_power(m(l_hi)).unwrap().value();
            let p_large = model.specific_power(m(l_lo)).unwrap().value();
            prop_assert!(p_small > p_large);
        }

        #[test]
        fn ccg_over_dp_is_four_root_pi(log_l in -15.0f64..-5.0) {
            let l = m(10f64.powf(log_l));
            let r = HeatingModel::classical_channel().specific_power(l).unwrap().value()
                / HeatingModel::dp().specific_power(l).unwrap().value();
            prop_assert!(rel(r, 4.0 * PI.sqrt()) <= 1e-14);
        }

        #[test]
        fn cubic_scaling(model in arb_model(), log_l in -14.0f64..-6.0, k in 0.1f64..10.0) {
            let l = 10f64.powf(log_l);
            let base = model.specific_power(m(l)).unwrap().value();
            let scaled = model.specific_power(m(k * l)).unwrap().value();
            prop_assert!(rel(scaled, base / (k * k * k)) <= 1e-12);
        }
    }
}
