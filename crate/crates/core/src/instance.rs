//! 3-RPR manipulator instances and their JSON file format.

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{parse_rational, QI};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Point2 {
    pub x: BigRational,
    pub y: BigRational,
}

impl Point2 {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        Point2 { x, y }
    }

    pub fn from_ratios(x: (i64, i64), y: (i64, i64)) -> Self {
        Point2::new(
            BigRational::new(x.0.into(), x.1.into()),
            BigRational::new(y.0.into(), y.1.into()),
        )
    }

    pub fn sub(&self, o: &Point2) -> Point2 {
        Point2::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.x * &self.x + &self.y * &self.y
    }

    pub fn scaled(&self, c: &BigRational) -> Point2 {
        Point2::new(&self.x * c, &self.y * c)
    }

    /// Isotropic pair `(x + iy, x − iy)`.
    pub fn isotropic(&self) -> (QI, QI) {
        (QI::new(self.x.clone(), self.y.clone()), QI::new(self.x.clone(), -self.y.clone()))
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [crate::field::rat_to_f64(&self.x), crate::field::rat_to_f64(&self.y)]
    }
}

/// The given configuration γ of the moving platform.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GivenPose {
    /// Rotation by the exact pair `(cos, sin)` followed by a translation.
    Motion { cos: BigRational, sin: BigRational, translation: Point2 },
    /// Fixed-frame platform points supplied directly.
    Points([Point2; 3]),
}

/// A user-supplied curve inside a representation's parameter space, given as the
/// common zero set of polynomial equations on the chart where `chart` equals 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownCurve {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<String>,
    pub equations: Vec<String>,
}

/// Optional instance-specific reference data; absent for generic instances.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceChecks {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centroid: Option<[String; 2]>,
    /// Keyed by representation name (`bgr`, `dckr`, ...).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub known_curves: BTreeMap<String, Vec<KnownCurve>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub expected: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManipulatorInstance {
    pub base: [Point2; 3],
    pub platform_local: [Point2; 3],
    pub pose: GivenPose,
    pub checks: Option<ReferenceChecks>,
}

impl ManipulatorInstance {
    pub fn new(base: [Point2; 3], platform_local: [Point2; 3], pose: GivenPose) -> Result<Self> {
        let inst = ManipulatorInstance { base, platform_local, pose, checks: None };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, pts) in [("base", &self.base), ("platform", &self.platform_local)] {
            for i in 0..3 {
                for j in i + 1..3 {
                    if pts[i] == pts[j] {
                        return Err(Error::Config(format!(
                            "{name} points {} and {} coincide",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        match &self.pose {
            GivenPose::Motion { cos, sin, .. } => {
                if cos * cos + sin * sin != BigRational::one() {
                    return Err(Error::Config(format!(
                        "pose rotation ({cos}, {sin}) does not satisfy cos^2 + sin^2 = 1"
                    )));
                }
            }
            GivenPose::Points(p) => {
                for i in 0..3 {
                    for j in i + 1..3 {
                        if p[i] == p[j] {
                            return Err(Error::Config(format!(
                                "given platform points {} and {} coincide",
                                i + 1,
                                j + 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Fixed-frame platform points `Pᵢ^γ` of the given configuration.
    pub fn given_points(&self) -> [Point2; 3] {
        match &self.pose {
            GivenPose::Points(p) => p.clone(),
            GivenPose::Motion { cos, sin, translation } => self.platform_local.clone().map(|p| {
                Point2::new(
                    cos * &p.x - sin * &p.y + &translation.x,
                    sin * &p.x + cos * &p.y + &translation.y,
                )
            }),
        }
    }

    pub fn given_centroid(&self) -> Point2 {
        let g = self.given_points();
        let three = BigRational::from_integer(3.into());
        Point2::new(
            (&g[0].x + &g[1].x + &g[2].x) / &three,
            (&g[0].y + &g[1].y + &g[2].y) / &three,
        )
    }

    /// The same manipulator with every length multiplied by `c`.
    pub fn scaled(&self, c: &BigRational) -> ManipulatorInstance {
        let pose = match &self.pose {
            GivenPose::Motion { cos, sin, translation } => GivenPose::Motion {
                cos: cos.clone(),
                sin: sin.clone(),
                translation: translation.scaled(c),
            },
            GivenPose::Points(p) => GivenPose::Points(p.clone().map(|q| q.scaled(c))),
        };
        ManipulatorInstance {
            base: self.base.clone().map(|q| q.scaled(c)),
            platform_local: self.platform_local.clone().map(|q| q.scaled(c)),
            pose,
            checks: None,
        }
    }

    /// The manipulator whose given pose is `γ` itself but with every quantity
    /// expressed as given-pose points; useful for tests.
    pub fn with_given_points(&self, pts: [Point2; 3]) -> ManipulatorInstance {
        ManipulatorInstance { pose: GivenPose::Points(pts), ..self.clone() }
    }

    pub fn to_file(&self) -> InstanceFile {
        let pt = |p: &Point2| [p.x.to_string(), p.y.to_string()];
        let (pose, platform_given) = match &self.pose {
            GivenPose::Motion { cos, sin, translation } => (
                Some(PoseFile {
                    cos: cos.to_string().into(),
                    sin: sin.to_string().into(),
                    translation: [translation.x.to_string().into(), translation.y.to_string().into()],
                }),
                None,
            ),
            GivenPose::Points(p) => {
                (None, Some(p.iter().map(|q| pt(q).map(NumberValue::from)).collect::<Vec<_>>()))
            }
        };
        InstanceFile {
            base: self.base.iter().map(|q| pt(q).map(NumberValue::from)).collect(),
            platform_local: self.platform_local.iter().map(|q| pt(q).map(NumberValue::from)).collect(),
            pose,
            platform_given,
            reference_checks: self.checks.clone(),
        }
    }

    /// SHA-256 over the canonical JSON form.
    pub fn hash(&self) -> String {
        let mut f = self.to_file();
        f.reference_checks = None;
        let json = serde_json::to_string(&f).expect("instance serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn from_json(text: &str, inexact: bool) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        file.into_instance(inexact)
    }

    pub fn load(path: &Path, inexact: bool) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text, inexact)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance serializes")
    }
}

/// A number in an instance file: an exact rational string, or a JSON number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberValue {
    Text(String),
    Number(serde_json::Number),
}

impl From<String> for NumberValue {
    fn from(s: String) -> Self {
        NumberValue::Text(s)
    }
}

impl NumberValue {
    fn to_rational(&self, inexact: bool) -> Result<BigRational> {
        match self {
            NumberValue::Text(s) => parse_rational(s),
            NumberValue::Number(n) => {
                if let Some(i) = n.as_i64() {
                    return Ok(BigRational::from_integer(i.into()));
                }
                let f = n.as_f64().ok_or_else(|| Error::Parse(format!("bad number {n}")))?;
                if !inexact {
                    return Err(Error::Parse(format!(
                        "floating-point value {n} needs --inexact or an exact rational string"
                    )));
                }
                QI::rationalize(f, 1e-12)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PoseFile {
    pub cos: NumberValue,
    pub sin: NumberValue,
    pub translation: [NumberValue; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub base: Vec<[NumberValue; 2]>,
    pub platform_local: Vec<[NumberValue; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pose: Option<PoseFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub platform_given: Option<Vec<[NumberValue; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_checks: Option<ReferenceChecks>,
}

fn three_points(v: &[[NumberValue; 2]], what: &str, inexact: bool) -> Result<[Point2; 3]> {
    if v.len() != 3 {
        return Err(Error::Config(format!("{what}: expected 3 points, got {}", v.len())));
    }
    let pts: Vec<Point2> = v
        .iter()
        .map(|[x, y]| Ok(Point2::new(x.to_rational(inexact)?, y.to_rational(inexact)?)))
        .collect::<Result<_>>()?;
    Ok([pts[0].clone(), pts[1].clone(), pts[2].clone()])
}

impl InstanceFile {
    pub fn into_instance(self, inexact: bool) -> Result<ManipulatorInstance> {
        let base = three_points(&self.base, "base", inexact)?;
        let platform_local = three_points(&self.platform_local, "platform_local", inexact)?;
        let pose = match (self.pose, self.platform_given) {
            (Some(p), None) => {
                let mut cos = p.cos.to_rational(inexact)?;
                let mut sin = p.sin.to_rational(inexact)?;
                if inexact && &cos * &cos + &sin * &sin != BigRational::one() {
                    // snap onto the unit circle with the rational parametrisation
                    let t = if (&cos + BigRational::one()).is_zero() {
                        None
                    } else {
                        Some(&sin / (&cos + BigRational::one()))
                    };
                    match t {
                        Some(t) => {
                            let d = BigRational::one() + &t * &t;
                            cos = (BigRational::one() - &t * &t) / &d;
                            sin = (BigRational::from_integer(2.into()) * &t) / &d;
                        }
                        None => {
                            cos = -BigRational::one();
                            sin = BigRational::zero();
                        }
                    }
                }
                GivenPose::Motion {
                    cos,
                    sin,
                    translation: Point2::new(
                        p.translation[0].to_rational(inexact)?,
                        p.translation[1].to_rational(inexact)?,
                    ),
                }
            }
            (None, Some(g)) => GivenPose::Points(three_points(&g, "platform_given", inexact)?),
            (Some(_), Some(_)) => {
                return Err(Error::Config("supply either 'pose' or 'platform_given', not both".into()))
            }
            (None, None) => return Err(Error::Config("missing 'pose' or 'platform_given'".into())),
        };
        let mut inst = ManipulatorInstance { base, platform_local, pose, checks: self.reference_checks };
        inst.validate()?;
        if inst.checks.as_ref().is_some_and(|c| *c == ReferenceChecks::default()) {
            inst.checks = None;
        }
        Ok(inst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{"base": [["0","0"],["7","0"],["3","5"]],
        "platform_local": [["0","0"],["2","0"],["1","3/2"]],
        "pose": {"cos": "0", "sin": "1", "translation": ["11/6", "1"]}}"#;

    #[test]
    fn parses_and_round_trips() {
        let inst = ManipulatorInstance::from_json(SAMPLE, false).unwrap();
        let again = ManipulatorInstance::from_json(&inst.to_json(), false).unwrap();
        assert_eq!(inst, again);
        assert_eq!(inst.hash(), again.hash());
        let g = inst.given_points();
        // rotation by a quarter turn: (x, y) -> (-y, x)
        assert_eq!(g[1], Point2::from_ratios((11, 6), (3, 1)));
    }

    #[test]
    fn rejects_bad_rotation_and_duplicates() {
        let bad = SAMPLE.replace(r#""cos": "0""#, r#""cos": "1""#);
        assert!(matches!(ManipulatorInstance::from_json(&bad, false), Err(Error::Config(_))));
        let dup = SAMPLE.replace(r#"["7","0"]"#, r#"["0","0"]"#);
        assert!(matches!(ManipulatorInstance::from_json(&dup, false), Err(Error::Config(_))));
    }

    #[test]
    fn floats_need_inexact_flag() {
        let f = SAMPLE.replace(r#"["1","3/2"]"#, "[1, 1.5]");
        assert!(ManipulatorInstance::from_json(&f, false).is_err());
        let inst = ManipulatorInstance::from_json(&f, true).unwrap();
        assert_eq!(inst.platform_local[2].y, BigRational::new(3.into(), 2.into()));
    }

    #[test]
    fn given_points_variant() {
        let f = r#"{"base": [["0","0"],["7","0"],["3","5"]],
            "platform_local": [["0","0"],["2","0"],["1","3/2"]],
            "platform_given": [["1","1"],["1","3"],["-1/2","2"]]}"#;
        let inst = ManipulatorInstance::from_json(f, false).unwrap();
        assert_eq!(inst.given_centroid(), Point2::from_ratios((1, 2), (2, 1)));
    }
}
