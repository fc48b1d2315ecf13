//! Registry of experimental heating constraints and exclusion-plot data.
//!
//! The built-in catalog is `data/catalog.toml`, compiled into the binary.
//! A different file in the same format can be selected with the
//! `COLLAPSE_BOUNDS_CATALOG` environment variable.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{HeatingModel, LengthBound, ModelKind};
use crate::quantities::{Dimension, Material, Quantity};

pub const CATALOG_ENV_VAR: &str = "COLLAPSE_BOUNDS_CATALOG";
pub const CATALOG_VERSION: u32 = 1;

const BUILTIN_CATALOG: &str = include_str!("../data/catalog.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Constraint {
    /// Upper limit on heating power per unit mass, W/kg.
    SpecificPowerLimit { limit: Quantity },
    /// A lower length bound obtained by other means, valid for one model only.
    DirectLengthBound { length: Quantity, model: ModelKind },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub name: String,
    pub constraint: Constraint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub material: Option<String>,
    #[serde(default)]
    pub temperature_note: String,
    pub provenance: String,
    /// Published, rounded value for comparison with the computed bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reported: Option<String>,
}

impl ExperimentRecord {
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::Input("record name is empty".into()));
        }
        match &self.constraint {
            Constraint::SpecificPowerLimit { limit } => {
                if limit.expect(Dimension::SPECIFIC_POWER)?.value() <= 0.0 {
                    return Err(Error::Domain(format!(
                        "{}: limit must be positive",
                        self.name
                    )));
                }
            }
            Constraint::DirectLengthBound { length, .. } => {
                if length.expect(Dimension::LENGTH)?.value() <= 0.0 {
                    return Err(Error::Domain(format!(
                        "{}: length must be positive",
                        self.name
                    )));
                }
            }
        }
        if let Some(m) = &self.material {
            if Material::builtin(m).is_none() {
                return Err(Error::Input(format!(
                    "{}: unknown material `{m}`",
                    self.name
                )));
            }
        }
        Ok(())
    }

    pub fn material(&self) -> Option<Material> {
        self.material.as_deref().and_then(Material::builtin)
    }

    /// Whether [`derive_bound`] can succeed for `model`.
    pub fn applies_to(&self, model: ModelKind) -> bool {
        match &self.constraint {
            Constraint::SpecificPowerLimit { .. } => true,
            Constraint::DirectLengthBound { model: m, .. } => *m == model,
        }
    }
}

/// Non-numeric note attached to the catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub name: String,
    pub note: String,
    #[serde(default)]
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub version: u32,
    #[serde(default)]
    pub annotations: Vec<Annotation>,
    #[serde(default)]
    pub records: Vec<ExperimentRecord>,
}

impl Catalog {
    pub fn builtin() -> Self {
        Self::from_toml_str(BUILTIN_CATALOG).expect("built-in catalog is valid")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let catalog: Catalog =
            toml::from_str(text).map_err(|e| Error::parse("catalog", e.to_string()))?;
        catalog.validate()?;
        Ok(catalog)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("catalog serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// The file named by `COLLAPSE_BOUNDS_CATALOG`, or the built-in catalog.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(CATALOG_ENV_VAR) {
            Some(path) if !path.is_empty() => Self::load(path),
            _ => Ok(Self::builtin()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CATALOG_VERSION {
            return Err(Error::Input(format!(
                "unsupported catalog version {} (expected {CATALOG_VERSION})",
                self.version
            )));
        }
        for (i, r) in self.records.iter().enumerate() {
            r.validate()?;
            if self.records[..i].iter().any(|o| o.name == r.name) {
                return Err(Error::Input(format!("duplicate record `{}`", r.name)));
            }
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&ExperimentRecord> {
        self.records
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::Input(format!("unknown record `{name}`")))
    }

    /// Records usable with `model`, in catalog order.
    pub fn applicable(&self, model: ModelKind) -> Vec<ExperimentRecord> {
        self.records
            .iter()
            .filter(|r| r.applies_to(model))
            .cloned()
            .collect()
    }
}

/// Length bound implied by one record under `model`.
pub fn derive_bound(record: &ExperimentRecord, model: &HeatingModel) -> Result<LengthBound> {
    record.validate()?;
    let mut source = format!("{}: {}", record.name, record.provenance);
    if let Some(reported) = &record.reported {
        let _ = write!(source, " (reported {reported})");
    }
    match &record.constraint {
        Constraint::SpecificPowerLimit { limit } => model.invert_bound_with_source(*limit, source),
        Constraint::DirectLengthBound {
            length,
            model: kind,
        } => {
            if *kind != model.kind {
                return Err(Error::ModelMismatch {
                    record: kind.to_string(),
                    requested: model.kind.to_string(),
                });
            }
            LengthBound::new(*length, *kind, source)
        }
    }
}

/// Bounds sorted strongest first; equal bounds are ordered by record name.
pub fn rank_bounds(
    records: &[ExperimentRecord],
    model: &HeatingModel,
) -> Result<Vec<(String, LengthBound)>> {
    if records.is_empty() {
        return Err(Error::Input("no records to rank".into()));
    }
    let mut ranked = records
        .iter()
        .map(|r| derive_bound(r, model).map(|b| (r.name.clone(), b)))
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|(na, a), (nb, b)| b.meters().total_cmp(&a.meters()).then_with(|| na.cmp(nb)));
    Ok(ranked)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitLine {
    pub label: String,
    /// W/kg.
    pub specific_power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkerLine {
    pub label: String,
    /// m.
    pub length: f64,
}

/// Where the model curve meets a limit line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossing {
    pub label: String,
    pub length: f64,
    pub specific_power: f64,
}

/// Data for a log-log plot of specific power against length parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExclusionDataset {
    pub model: ModelKind,
    /// (length m, specific power W/kg), lengths increasing.
    pub model_curve: Vec<(f64, f64)>,
    pub limit_lines: Vec<LimitLine>,
    pub marker_lines: Vec<MarkerLine>,
    /// m.
    pub length_range: (f64, f64),
}

/// Samples the model curve log-uniformly over `length_range` and collects
/// the specific-power limits of `records` and the vertical `markers`.
pub fn exclusion_dataset(
    model: &HeatingModel,
    records: &[ExperimentRecord],
    markers: &[(String, Quantity)],
    length_range: (Quantity, Quantity),
    n_points: usize,
) -> Result<ExclusionDataset> {
    let lo = length_range.0.expect(Dimension::LENGTH)?.value();
    let hi = length_range.1.expect(Dimension::LENGTH)?.value();
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Input(format!("invalid length range ({lo}, {hi})")));
    }
    if n_points < 2 {
        return Err(Error::Input("at least 2 curve points required".into()));
    }
    let (l0, l1) = (lo.ln(), hi.ln());
    let model_curve = (0..n_points)
        .map(|i| {
            let l = match i {
                0 => lo,
                i if i == n_points - 1 => hi,
                i => (l0 + (l1 - l0) * i as f64 / (n_points - 1) as f64).exp(),
            };
            Ok((l, model.specific_power(Quantity::meters(l)?)?.value()))
        })
        .collect::<Result<Vec<_>>>()?;

    let limit_lines = records
        .iter()
        .filter_map(|r| match &r.constraint {
            Constraint::SpecificPowerLimit { limit } => Some(LimitLine {
                label: r.name.clone(),
                specific_power: limit.value(),
            }),
            Constraint::DirectLengthBound { .. } => None,
        })
        .collect();

    let marker_lines = markers
        .iter()
        .map(|(label, q)| {
            let l = q.expect(Dimension::LENGTH)?.value();
            if !(lo..=hi).contains(&l) {
                return Err(Error::Input(format!(
                    "marker `{label}` at {l:e} m lies outside the length range"
                )));
            }
            Ok(MarkerLine {
                label: label.clone(),
                length: l,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ExclusionDataset {
        model: model.kind,
        model_curve,
        limit_lines,
        marker_lines,
        length_range: (lo, hi),
    })
}

impl ExclusionDataset {
    /// Length at which the sampled curve reaches `power`, interpolated
    /// linearly in log-log space between the bracketing samples.
    pub fn crossing_length(&self, power: f64) -> Option<f64> {
        self.model_curve.windows(2).find_map(|w| {
            let ((la, pa), (lb, pb)) = (w[0], w[1]);
            if power <= pa && power >= pb {
                if pa == pb {
                    return Some(la);
                }
                let f = (power.ln() - pa.ln()) / (pb.ln() - pa.ln());
                Some((la.ln() + f * (lb.ln() - la.ln())).exp())
            } else {
                None
            }
        })
    }

    pub fn crossings(&self) -> Vec<Crossing> {
        self.limit_lines
            .iter()
            .filter_map(|line| {
                self.crossing_length(line.specific_power)
                    .map(|length| Crossing {
                        label: line.label.clone(),
                        length,
                        specific_power: line.specific_power,
                    })
            })
            .collect()
    }

    /// Delimited-text export, one `# section:` block per element.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# exclusion dataset: model {}, length range {:e} m to {:e} m",
            self.model, self.length_range.0, self.length_range.1
        );
        out.push_str("# section: model_curve\nlength_m,specific_power_w_per_kg\n");
        for (l, p) in &self.model_curve {
            let _ = writeln!(out, "{l:e},{p:e}");
        }
        out.push_str("# section: limit_lines\nlabel,specific_power_w_per_kg\n");
        for line in &self.limit_lines {
            let _ = writeln!(out, "{},{:e}", line.label, line.specific_power);
        }
        out.push_str("# section: marker_lines\nlabel,length_m\n");
        for m in &self.marker_lines {
            let _ = writeln!(out, "{},{:e}", m.label, m.length);
        }
        out.push_str("# section: crossings\nlabel,length_m,specific_power_w_per_kg\n");
        for c in self.crossings() {
            let _ = writeln!(out, "{},{:e},{:e}", c.label, c.length, c.specific_power);
        }
        out
    }

    /// Log-log SVG: red model curve, blue horizontal limits, black dashed markers.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 480.0;
        const LEFT: f64 = 90.0;
        const RIGHT: f64 = 30.0;
        const TOP: f64 = 30.0;
        const BOTTOM: f64 = 70.0;

        let (x_lo, x_hi) = (self.length_range.0.log10(), self.length_range.1.log10());
        let powers = self
            .model_curve
            .iter()
            .map(|p| p.1)
            .chain(self.limit_lines.iter().map(|l| l.specific_power));
        let (p_min, p_max) = powers.fold((f64::INFINITY, 0.0f64), |(lo, hi), p| {
            (lo.min(p), hi.max(p))
        });
        let mut y_lo = p_min.log10().floor();
        let mut y_hi = p_max.log10().ceil();
        if y_hi <= y_lo {
            y_lo -= 1.0;
            y_hi += 1.0;
        }
        let px = |l: f64| LEFT + (l.log10() - x_lo) / (x_hi - x_lo) * (W - LEFT - RIGHT);
        let py = |p: f64| TOP + (y_hi - p.log10()) / (y_hi - y_lo) * (H - TOP - BOTTOM);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<g id="axes"><rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            W - LEFT - RIGHT,
            H - TOP - BOTTOM
        );
        // decade ticks; x axis only when a decade falls inside the range
        for d in (x_lo.ceil() as i32)..=(x_hi.floor() as i32) {
            let x = px(10f64.powi(d));
            let _ = writeln!(
                s,
                r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{d}</text>"##,
                H - BOTTOM,
                H - BOTTOM + 18.0
            );
        }
        for d in (y_lo as i32)..=(y_hi as i32) {
            let y = py(10f64.powi(d));
            let _ = writeln!(
                s,
                r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"##,
                W - RIGHT,
                LEFT - 6.0,
                y + 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{} (m)</text>"#,
            LEFT + (W - LEFT - RIGHT) / 2.0,
            H - 20.0,
            self.model.length_symbol()
        );
        let _ = writeln!(
            s,
            r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">specific power (W/kg)</text></g>"#,
            TOP + (H - TOP - BOTTOM) / 2.0,
            TOP + (H - TOP - BOTTOM) / 2.0
        );

        let points: Vec<String> = self
            .model_curve
            .iter()
            .map(|&(l, p)| format!("{:.2},{:.2}", px(l), py(p)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline id="model-curve" fill="none" stroke="red" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        for line in &self.limit_lines {
            let y = py(line.specific_power);
            let _ = writeln!(
                s,
                r#"<g class="limit-line"><line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="blue" stroke-width="2"/><text x="{:.2}" y="{:.2}" fill="blue" text-anchor="end">{}</text></g>"#,
                W - RIGHT,
                W - RIGHT - 4.0,
                y - 4.0,
                xml_escape(&line.label)
            );
        }
        for m in &self.marker_lines {
            let x = px(m.length);
            let _ = writeln!(
                s,
                r#"<g class="marker-line"><line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="black" stroke-width="1.5" stroke-dasharray="6 4"/><text x="{:.2}" y="{:.2}">{}</text></g>"#,
                H - BOTTOM,
                x + 4.0,
                TOP + 14.0,
                xml_escape(&m.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::urms_from_debye_waller;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn m(v: f64) -> Quantity {
        Quantity::meters(v).unwrap()
    }

    #[test]
    fn builtin_records_match_reported_values() {
        let cat = Catalog::builtin();
        assert_eq!(cat.records.len(), 4);
        let dp = HeatingModel::dp();
        let ccg = HeatingModel::classical_channel();
        let check = |name: &str, model: &HeatingModel, expected: f64, tol: f64| {
            let b = derive_bound(cat.get(name).unwrap(), model).unwrap();
            assert!(rel(b.meters(), expected) < tol, "{name}: {}", b.meters());
            assert!(b.source.starts_with(name));
        };
        check("neptune", &dp, 3.7e-12, 0.03);
        check("neptune", &dp, 3.67e-12, 0.005);
        check("lisa-pathfinder", &dp, 8.2e-14, 1e-15);
        check("cryostat-heatleak", &dp, 4.6e-12, 0.03);
        check("cryostat-heatleak", &ccg, 0.9e-11, 0.03);
        check("neutron-stars", &dp, 2.15e-13, 0.03);
        assert_eq!(
            cat.get("cryostat-heatleak")
                .unwrap()
                .material()
                .unwrap()
                .name(),
            "copper"
        );
    }

    #[test]
    fn direct_bound_rejects_other_model() {
        let cat = Catalog::builtin();
        let lisa = cat.get("lisa-pathfinder").unwrap();
        assert!(matches!(
            derive_bound(lisa, &HeatingModel::classical_channel()),
            Err(Error::ModelMismatch { .. })
        ));
        assert!(!lisa.applies_to(ModelKind::ClassicalChannel));
        assert_eq!(cat.applicable(ModelKind::ClassicalChannel).len(), 3);
    }

    #[test]
    fn xray_result_is_an_annotation_only() {
        let cat = Catalog::builtin();
        assert!(cat.annotations.iter().any(|a| a.name == "x-ray-emission"));
        assert!(cat.get("x-ray-emission").is_err());
    }

    #[test]
    fn ranking_orders_strongest_first() {
        let cat = Catalog::builtin();
        let ranked = rank_bounds(&cat.records, &HeatingModel::dp()).unwrap();
        let names: Vec<&str> = ranked.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(
            names,
            [
                "cryostat-heatleak",
                "neptune",
                "neutron-stars",
                "lisa-pathfinder"
            ]
        );
        let single = rank_bounds(&cat.records[..1], &HeatingModel::dp()).unwrap();
        assert_eq!(single.len(), 1);
        assert!(rank_bounds(&[], &HeatingModel::dp()).is_err());
        assert!(rank_bounds(&cat.records, &HeatingModel::classical_channel()).is_err());
    }

    #[test]
    fn ranking_ties_break_by_name() {
        let mk = |name: &str| ExperimentRecord {
            name: name.into(),
            constraint: Constraint::SpecificPowerLimit {
                limit: Quantity::watts_per_kg(1e-11).unwrap(),
            },
            material: None,
            temperature_note: String::new(),
            provenance: "test".into(),
            reported: None,
        };
        let ranked = rank_bounds(&[mk("zeta"), mk("alpha")], &HeatingModel::dp()).unwrap();
        assert_eq!(ranked[0].0, "alpha");
        assert_eq!(ranked[1].0, "zeta");
    }

    #[test]
    fn catalog_round_trips_through_toml() {
        let cat = Catalog::builtin();
        let text = cat.to_toml_string();
        assert_eq!(Catalog::from_toml_str(&text).unwrap(), cat);
    }

    #[test]
    fn catalog_validation_errors() {
        let bad_version = "version = 2\n";
        assert!(Catalog::from_toml_str(bad_version).is_err());
        let dup = r#"
version = 1
[[records]]
name = "a"
provenance = "x"
constraint = { kind = "specific-power-limit", limit = "1 pW/kg" }
[[records]]
name = "a"
provenance = "x"
constraint = { kind = "specific-power-limit", limit = "2 pW/kg" }
"#;
        assert!(matches!(Catalog::from_toml_str(dup), Err(Error::Input(_))));
        let wrong_dim = r#"
version = 1
[[records]]
name = "a"
provenance = "x"
constraint = { kind = "specific-power-limit", limit = "1 pW" }
"#;
        assert!(matches!(
            Catalog::from_toml_str(wrong_dim),
            Err(Error::Dimension { .. })
        ));
        let bad_unit = r#"
version = 1
[[records]]
name = "a"
provenance = "x"
constraint = { kind = "specific-power-limit", limit = "1 furlong" }
"#;
        assert!(Catalog::from_toml_str(bad_unit).is_err());
    }

    #[test]
    fn exclusion_curve_crosses_cryostat_limit() {
        let cat = Catalog::builtin();
        let dp = HeatingModel::dp();
        let urms = urms_from_debye_waller(Material::copper().debye_waller_b().unwrap()).unwrap();
        let ds = exclusion_dataset(
            &dp,
            &[cat.get("cryostat-heatleak").unwrap().clone()],
            &[("u_rms".into(), urms)],
            (m(1e-12), m(1e-11)),
            100,
        )
        .unwrap();
        assert_eq!(ds.model_curve.len(), 100);
        assert!(ds
            .model_curve
            .windows(2)
            .all(|w| w[1].1 < w[0].1 && w[1].0 > w[0].0));
        assert!(ds
            .model_curve
            .iter()
            .all(|(l, _)| (1e-12..=1e-11).contains(l)));
        let crossing = ds.crossing_length(1e-11).unwrap();
        let exact = dp
            .invert_bound(Quantity::watts_per_kg(1e-11).unwrap())
            .unwrap()
            .meters();
        let step = (1e-11f64 / 1e-12).ln() / 99.0;
        assert!((crossing.ln() - exact.ln()).abs() <= step);
        assert!(rel(crossing, 4.63e-12) < 2e-3);
        let p = dp.specific_power(m(4.3e-12)).unwrap().value();
        assert!(rel(p, 1.249e-11) < 1e-3);
        assert_eq!(ds.marker_lines[0].label, "u_rms");
        assert_eq!(ds.crossings().len(), 1);
    }

    #[test]
    fn two_point_dataset_is_endpoints() {
        let ds = exclusion_dataset(&HeatingModel::dp(), &[], &[], (m(1e-12), m(1e-11)), 2).unwrap();
        assert_eq!(ds.model_curve.len(), 2);
        assert_eq!(ds.model_curve[0].0, 1e-12);
        assert_eq!(ds.model_curve[1].0, 1e-11);
        assert!(ds.model_curve[1].1 < ds.model_curve[0].1);
    }

    #[test]
    fn dataset_input_errors() {
        let dp = HeatingModel::dp();
        assert!(exclusion_dataset(&dp, &[], &[], (m(1e-11), m(1e-12)), 10).is_err());
        assert!(exclusion_dataset(&dp, &[], &[], (m(0.0), m(1e-12)), 10).is_err());
        assert!(exclusion_dataset(&dp, &[], &[], (m(1e-12), m(1e-11)), 1).is_err());
        assert!(exclusion_dataset(
            &dp,
            &[],
            &[("far".into(), m(1e-9))],
            (m(1e-12), m(1e-11)),
            10
        )
        .is_err());
    }

    #[test]
    fn exports_have_all_sections() {
        let cat = Catalog::builtin();
        let ds = exclusion_dataset(
            &HeatingModel::dp(),
            &cat.records,
            &[("u_rms".into(), m(4.3e-12))],
            (m(1e-12), m(1e-11)),
            20,
        )
        .unwrap();
        let csv = ds.to_csv();
        for section in ["model_curve", "limit_lines", "marker_lines", "crossings"] {
            assert!(csv.contains(&format!("# section: {section}")));
        }
        let svg = ds.to_svg();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("stroke=\"red\""));
        assert!(svg.contains("stroke-dasharray"));
        assert_eq!(svg.matches("class=\"limit-line\"").count(), 3);
    }
}
