//! Experiment configuration: the JSON schema, flag-level parsing helpers and
//! validation into runnable points.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize};
use zenoberry_core::photon::{MirrorPolygon, PhotonState};
use zenoberry_core::zeno::{HamiltonianSpec, MeasurementPlan};
use zenoberry_core::UnitVec3;

/// Polar angle of the entering photon when none is configured.
pub const DEFAULT_THETA0: f64 = PI / 4.0;
/// Upper bound on the number of sweep points.
pub const MAX_SWEEP_POINTS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    SpinFree,
    SpinHamiltonian,
    PhotonPolygon,
    Sweep,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::SpinFree => "spin-free",
            Mode::SpinHamiltonian => "spin-hamiltonian",
            Mode::PhotonPolygon => "photon-polygon",
            Mode::Sweep => "sweep",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub axis: [f64; 3],
    #[serde(deserialize_with = "de_angle")]
    pub total_angle: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub mu: f64,
    pub axis: [f64; 3],
    pub total_time: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Steps,
    CosTheta,
    Mu,
    PolygonSides,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Steps => "steps",
            SweepParameter::CosTheta => "cos_theta",
            SweepParameter::Mu => "mu",
            SweepParameter::PolygonSides => "polygon_sides",
        }
    }

    fn is_integer(self) -> bool {
        matches!(self, SweepParameter::Steps | SweepParameter::PolygonSides)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepScale {
    #[default]
    Additive,
    Multiplicative,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    #[serde(default)]
    pub scale: StepScale,
}

impl SweepConfig {
    /// Parses `PARAM:START:STOP:STEP`; a `*` before `STEP` makes it a factor.
    pub fn parse(spec: &str) -> Result<Self, String> {
        let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
        let [parameter, start, stop, step] = parts[..] else {
            return Err(format!("sweep must look like PARAM:START:STOP:STEP, got {spec:?}"));
        };
        let parameter = match parameter {
            "steps" => SweepParameter::Steps,
            "cos_theta" => SweepParameter::CosTheta,
            "mu" => SweepParameter::Mu,
            "polygon_sides" => SweepParameter::PolygonSides,
            other => return Err(format!("unknown sweep parameter {other:?}")),
        };
        let (scale, step) = if let Some(factor) = step.strip_prefix('*') {
            (StepScale::Multiplicative, factor)
        } else {
            (StepScale::Additive, step.strip_prefix('+').unwrap_or(step))
        };
        let number =
            |s: &str, what: &str| s.parse::<f64>().map_err(|_| format!("sweep {what} {s:?} is not a number"));
        Ok(Self {
            parameter,
            start: number(start, "start")?,
            stop: number(stop, "stop")?,
            step: number(step, "step")?,
            scale,
        })
    }

    /// The sweep points in order. Integer parameters must land on integers.
    pub fn values(&self) -> Result<Vec<f64>, String> {
        let Self { start, stop, step, .. } = *self;
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err("sweep bounds and step must be finite".into());
        }
        let count = match self.scale {
            StepScale::Additive => {
                if step == 0.0 {
                    return Err("additive sweep step must be nonzero".into());
                }
                let span = (stop - start) / step;
                if span < -1e-9 {
                    return Err("additive sweep step points away from stop".into());
                }
                (span + 1e-9).floor() + 1.0
            }
            StepScale::Multiplicative => {
                if !(start > 0.0 && stop > 0.0) {
                    return Err("multiplicative sweep needs positive start and stop".into());
                }
                if step <= 0.0 || step == 1.0 {
                    return Err("multiplicative sweep factor must be positive and not 1".into());
                }
                let span = (stop / start).ln() / step.ln();
                if span < -1e-9 {
                    return Err("multiplicative sweep factor points away from stop".into());
                }
                (span + 1e-9).floor() + 1.0
            }
        };
        if count > MAX_SWEEP_POINTS as f64 {
            return Err(format!("sweep has more than {MAX_SWEEP_POINTS} points"));
        }
        let values: Vec<f64> = (0..count as usize)
            .map(|k| match self.scale {
                StepScale::Additive => start + k as f64 * step,
                StepScale::Multiplicative => start * step.powi(k as i32),
            })
            .collect();
        if self.parameter.is_integer() {
            if let Some(v) = values.iter().find(|v| (*v - v.round()).abs() > 1e-9 * v.abs().max(1.0)) {
                return Err(format!("{} must be an integer, sweep reaches {v}", self.parameter.name()));
            }
            return Ok(values.into_iter().map(f64::round).collect());
        }
        Ok(values)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<HamiltonianConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon_sides: Option<usize>,
    #[serde(default, deserialize_with = "de_opt_angle", skip_serializing_if = "Option::is_none")]
    pub theta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// One runnable experiment.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    SpinFree(MeasurementPlan),
    SpinHamiltonian(MeasurementPlan, HamiltonianSpec),
    Photon { polygon: MirrorPolygon, theta0: f64 },
}

/// A validated configuration: the points to run, in output order.
#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub points: Vec<Point>,
    pub sweep: Option<SweepParameter>,
}

impl ExperimentConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            plan: None,
            hamiltonian: None,
            polygon_sides: None,
            theta0: None,
            sweep: None,
            output: OutputConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("config: {e}"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<Experiment, String> {
        if self.mode != Mode::Sweep {
            if self.sweep.is_some() {
                return Err(format!("mode {} does not take a sweep", self.mode.name()));
            }
            return Ok(Experiment { points: vec![self.point()?], sweep: None });
        }

        let sweep = self.sweep.as_ref().ok_or("mode sweep needs a sweep section")?;
        let base = self.sweep_base(sweep.parameter);
        let points = sweep
            .values()?
            .into_iter()
            .map(|v| {
                let mut cfg = self.clone();
                cfg.mode = base;
                cfg.sweep = None;
                cfg.substitute(sweep.parameter, v)?;
                cfg.point().map_err(|e| format!("sweep point {}={v}: {e}", sweep.parameter.name()))
            })
            .collect::<Result<Vec<_>, String>>()?;
        Ok(Experiment { points, sweep: Some(sweep.parameter) })
    }

    fn sweep_base(&self, parameter: SweepParameter) -> Mode {
        if parameter == SweepParameter::PolygonSides || self.polygon_sides.is_some() {
            Mode::PhotonPolygon
        } else if self.hamiltonian.is_some() || parameter == SweepParameter::Mu {
            Mode::SpinHamiltonian
        } else {
            Mode::SpinFree
        }
    }

    fn substitute(&mut self, parameter: SweepParameter, value: f64) -> Result<(), String> {
        match parameter {
            SweepParameter::Steps => {
                let plan = self.plan.as_mut().ok_or("a steps sweep needs a plan")?;
                plan.steps = value as usize;
            }
            SweepParameter::CosTheta => {
                if !(-1.0..=1.0).contains(&value) {
                    return Err(format!("cos_theta {value} is outside [-1, 1]"));
                }
                let plan = self.plan.as_mut().ok_or("a cos_theta sweep needs a plan")?;
                plan.axis = [(1.0 - value * value).sqrt(), 0.0, value];
            }
            SweepParameter::Mu => {
                let h = self.hamiltonian.as_mut().ok_or("a mu sweep needs a hamiltonian")?;
                h.mu = value;
            }
            SweepParameter::PolygonSides => self.polygon_sides = Some(value as usize),
        }
        Ok(())
    }

    fn point(&self) -> Result<Point, String> {
        let forbid = |present: bool, field: &str| {
            if present {
                Err(format!("mode {} does not take {field}", self.mode.name()))
            } else {
                Ok(())
            }
        };
        match self.mode {
            Mode::SpinFree => {
                forbid(self.hamiltonian.is_some(), "a hamiltonian")?;
                forbid(self.polygon_sides.is_some(), "polygon_sides")?;
                forbid(self.theta0.is_some(), "theta0")?;
                Ok(Point::SpinFree(self.plan()?))
            }
            Mode::SpinHamiltonian => {
                forbid(self.polygon_sides.is_some(), "polygon_sides")?;
                forbid(self.theta0.is_some(), "theta0")?;
                let h = self.hamiltonian.as_ref().ok_or("mode spin-hamiltonian needs a hamiltonian")?;
                let axis = unit(h.axis, "hamiltonian axis")?;
                if !h.mu.is_finite() || !h.total_time.is_finite() {
                    return Err("hamiltonian mu and total_time must be finite".into());
                }
                let spec = HamiltonianSpec::new(h.mu, axis, h.total_time).map_err(|e| e.to_string())?;
                Ok(Point::SpinHamiltonian(self.plan()?, spec))
            }
            Mode::PhotonPolygon => {
                forbid(self.plan.is_some(), "a plan")?;
                forbid(self.hamiltonian.is_some(), "a hamiltonian")?;
                let sides = self.polygon_sides.ok_or("mode photon-polygon needs polygon_sides")?;
                let polygon = MirrorPolygon::regular(sides).map_err(|e| e.to_string())?;
                let theta0 = self.theta0.unwrap_or(DEFAULT_THETA0);
                PhotonState::entering(&polygon, theta0).map_err(|e| e.to_string())?;
                Ok(Point::Photon { polygon, theta0 })
            }
            Mode::Sweep => Err("nested sweeps are not supported".into()),
        }
    }

    fn plan(&self) -> Result<MeasurementPlan, String> {
        let p = self.plan.as_ref().ok_or_else(|| format!("mode {} needs a plan", self.mode.name()))?;
        let axis = unit(p.axis, "plan axis")?;
        MeasurementPlan::new(axis, p.total_angle, p.steps).map_err(|e| e.to_string())
    }
}

fn unit(v: [f64; 3], what: &str) -> Result<UnitVec3, String> {
    UnitVec3::new(v[0], v[1], v[2]).map_err(|e| format!("{what}: {e}"))
}

/// Reads an angle in radians, optionally written as `pi*X`, `pi` or `-pi*X`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) if rest.starts_with("pi") => (-1.0, rest),
        _ => (1.0, t),
    };
    let value = if body == "pi" {
        PI
    } else if let Some(factor) = body.strip_prefix("pi*") {
        PI * factor
            .trim()
            .parse::<f64>()
            .map_err(|_| format!("angle {text:?}: {factor:?} is not a number"))?
    } else {
        body.parse::<f64>().map_err(|_| format!("angle {text:?} is not a number"))?
    };
    if !value.is_finite() {
        return Err(format!("angle {text:?} is not finite"));
    }
    Ok(sign * value)
}

/// Reads `x,y,z`.
pub fn parse_vector(text: &str) -> Result<[f64; 3], String> {
    let parts = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| format!("vector {text:?} must be three comma-separated numbers"))?;
    parts.try_into().map_err(|_| format!("vector {text:?} must have exactly three components"))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AngleRepr {
    Radians(f64),
    Text(String),
}

fn de_angle<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    match AngleRepr::deserialize(d)? {
        AngleRepr::Radians(x) => Ok(x),
        AngleRepr::Text(s) => parse_angle(&s).map_err(serde::de::Error::custom),
    }
}

fn de_opt_angle<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    match Option::<AngleRepr>::deserialize(d)? {
        None => Ok(None),
        Some(AngleRepr::Radians(x)) => Ok(Some(x)),
        Some(AngleRepr::Text(s)) => parse_angle(&s).map(Some).map_err(serde::de::Error::custom),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi*0.5").unwrap(), PI * 0.5);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-pi*0.25").unwrap(), -PI * 0.25);
        assert_eq!(parse_angle("1.5").unwrap(), 1.5);
        assert_eq!(parse_angle("-2").unwrap(), -2.0);
        assert!(parse_angle("pi*x").is_err());
        assert!(parse_angle("tau").is_err());
    }

    #[test]
    fn theta0_forms() {
        let base = r#"{"mode": "photon-polygon", "polygon_sides": 4"#;
        let parse = |tail: &str| ExperimentConfig::from_json(&format!("{base}{tail}}}")).unwrap().theta0;
        assert_eq!(parse(""), None);
        assert_eq!(parse(r#", "theta0": null"#), None);
        assert_eq!(parse(r#", "theta0": 0.5"#), Some(0.5));
        assert_eq!(parse(r#", "theta0": "pi*0.5""#), Some(PI * 0.5));
    }

    #[test]
    fn vectors() {
        assert_eq!(parse_vector("1, 0,-0.5").unwrap(), [1.0, 0.0, -0.5]);
        assert!(parse_vector("1,0").is_err());
        assert!(parse_vector("1,0,a").is_err());
    }

    #[test]
    fn sweep_spec() {
        let s = SweepConfig::parse("steps:8:1024:*2").unwrap();
        assert_eq!(s.scale, StepScale::Multiplicative);
        assert_eq!(s.values().unwrap(), vec![8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0]);
        let s = SweepConfig::parse("cos_theta:-1:1:0.5").unwrap();
        assert_eq!(s.values().unwrap(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(SweepConfig::parse("polygon_sides:3:12:+1").unwrap().values().unwrap().len(), 10);
        assert!(SweepConfig::parse("steps:1:4:0.5").unwrap().values().is_err());
        assert!(SweepConfig::parse("steps:8:4:1").unwrap().values().is_err());
        assert!(SweepConfig::parse("steps:8:4:*1").unwrap().values().is_err());
        assert!(SweepConfig::parse("spin:1:2:1").is_err());
        assert!(SweepConfig::parse("steps:1:2").is_err());
    }

    #[test]
    fn json_angle_forms() {
        let cfg = ExperimentConfig::from_json(
            r#"{"mode":"spin-free","plan":{"axis":[1,0,0],"total_angle":"pi","steps":4}}"#,
        )
        .unwrap();
        assert_eq!(cfg.plan.unwrap().total_angle, PI);
    }

    #[test]
    fn mode_fields_are_exclusive() {
        let mut cfg = ExperimentConfig::new(Mode::SpinFree);
        assert!(cfg.validate().is_err());
        cfg.plan = Some(PlanConfig { axis: [0.0, 0.0, 1.0], total_angle: PI, steps: 4 });
        assert!(cfg.validate().is_ok());
        cfg.polygon_sides = Some(4);
        assert!(cfg.validate().is_err());
        cfg.polygon_sides = None;
        cfg.plan.as_mut().unwrap().axis = [1.0, 1.0, 0.0];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"mode":"spin-free","colour":1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"mode":"warp"}"#).is_err());
    }

    #[test]
    fn sweep_expands_points() {
        let mut cfg = ExperimentConfig::new(Mode::Sweep);
        cfg.sweep = Some(SweepConfig::parse("polygon_sides:3:6:1").unwrap());
        let exp = cfg.validate().unwrap();
        assert_eq!(exp.points.len(), 4);
        assert!(matches!(&exp.points[0], Point::Photon { polygon, .. } if polygon.sides() == 3));
    }
}
