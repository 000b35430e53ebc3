//! Parsers for the textual mesh, potential and ambient specifications.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::{self, TriangleMesh};
use crate::spectra::AmbientSpace;
use crate::{Error, Result};

/// Where a mesh comes from: a built-in generator or an OFF file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MeshSource {
    Icosphere { level: u32 },
    Ellipsoid { a: f64, b: f64, c: f64, level: u32 },
    FlatTorus { l1: f64, l2: f64, res: usize },
    Cap { angle: f64, level: u32 },
    Clifford { res: usize },
    Disc { radius: f64, rings: usize },
    File(PathBuf),
}

fn field<T: FromStr>(parts: &[&str], i: usize, spec: &str) -> Result<T> {
    parts
        .get(i)
        .and_then(|p| p.trim().parse().ok())
        .ok_or_else(|| Error::invalid(format!("cannot read parameter {i} of generator {spec:?}")))
}

impl MeshSource {
    /// Parses `icosphere:L`, `ellipsoid:a:b:c:L`, `torus:L1:L2:res`,
    /// `cap:angle:level`, `clifford:res` or `disc:radius:rings`.
    pub fn parse_generator(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        let expect = |count: usize| -> Result<()> {
            if parts.len() == count + 1 {
                Ok(())
            } else {
                Err(Error::invalid(format!(
                    "generator {:?} takes {count} parameter(s), got {}",
                    parts[0],
                    parts.len() - 1
                )))
            }
        };
        let source = match parts[0] {
            "icosphere" => {
                expect(1)?;
                MeshSource::Icosphere { level: field(&parts, 1, spec)? }
            }
            "ellipsoid" => {
                expect(4)?;
                MeshSource::Ellipsoid {
                    a: field(&parts, 1, spec)?,
                    b: field(&parts, 2, spec)?,
                    c: field(&parts, 3, spec)?,
                    level: field(&parts, 4, spec)?,
                }
            }
            "torus" => {
                expect(3)?;
                MeshSource::FlatTorus {
                    l1: field(&parts, 1, spec)?,
                    l2: field(&parts, 2, spec)?,
                    res: field(&parts, 3, spec)?,
                }
            }
            "cap" => {
                expect(2)?;
                MeshSource::Cap {
                    angle: field(&parts, 1, spec)?,
                    level: field(&parts, 2, spec)?,
                }
            }
            "clifford" => {
                expect(1)?;
                MeshSource::Clifford { res: field(&parts, 1, spec)? }
            }
            "disc" => {
                expect(2)?;
                MeshSource::Disc {
                    radius: field(&parts, 1, spec)?,
                    rings: field(&parts, 2, spec)?,
                }
            }
            other => return Err(Error::invalid(format!("unknown mesh generator {other:?}"))),
        };
        Ok(source)
    }

    pub fn build(&self) -> Result<TriangleMesh> {
        match self {
            MeshSource::Icosphere { level } => geometry::icosphere(*level),
            MeshSource::Ellipsoid { a, b, c, level } => geometry::ellipsoid(*a, *b, *c, *level),
            MeshSource::FlatTorus { l1, l2, res } => geometry::flat_torus(*l1, *l2, *res),
            MeshSource::Cap { angle, level } => geometry::spherical_cap(*angle, *level),
            MeshSource::Clifford { res } => geometry::clifford_torus(*res),
            MeshSource::Disc { radius, rings } => geometry::disc(*radius, *rings),
            MeshSource::File(path) => geometry::load_off(path),
        }
    }
}

impl fmt::Display for MeshSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshSource::Icosphere { level } => write!(f, "icosphere:{level}"),
            MeshSource::Ellipsoid { a, b, c, level } => write!(f, "ellipsoid:{a}:{b}:{c}:{level}"),
            MeshSource::FlatTorus { l1, l2, res } => write!(f, "torus:{l1}:{l2}:{res}"),
            MeshSource::Cap { angle, level } => write!(f, "cap:{angle}:{level}"),
            MeshSource::Clifford { res } => write!(f, "clifford:{res}"),
            MeshSource::Disc { radius, rings } => write!(f, "disc:{radius}:{rings}"),
            MeshSource::File(path) => write!(f, "{}", path.display()),
        }
    }
}

/// The potential `q` of `H = −Δ + q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PotentialSpec {
    Zero,
    Constant(f64),
    /// `q = g·|h|²`, the family `H_g`.
    CurvatureScaled(f64),
}

impl PotentialSpec {
    pub fn is_zero(&self) -> bool {
        matches!(self, PotentialSpec::Zero)
    }

    pub fn evaluate(&self, h_sq: &[f64]) -> Vec<f64> {
        match *self {
            PotentialSpec::Zero => vec![0.0; h_sq.len()],
            PotentialSpec::Constant(c) => vec![c; h_sq.len()],
            PotentialSpec::CurvatureScaled(g) => h_sq.iter().map(|h| g * h).collect(),
        }
    }
}

impl FromStr for PotentialSpec {
    type Err = Error;

    /// `zero`, `const:c` or `gh2:g`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("potential must be zero, const:c or gh2:g, got {s:?}"));
        let number = |t: &str| -> Result<f64> {
            t.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad)
        };
        match s.split_once(':') {
            None if s.trim() == "zero" => Ok(PotentialSpec::Zero),
            Some(("const", c)) => Ok(PotentialSpec::Constant(number(c)?)),
            Some(("gh2", g)) => Ok(PotentialSpec::CurvatureScaled(number(g)?)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialSpec::Zero => write!(f, "zero"),
            PotentialSpec::Constant(c) => write!(f, "const:{c}"),
            PotentialSpec::CurvatureScaled(g) => write!(f, "gh2:{g}"),
        }
    }
}

/// Ambient space flag for mesh verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AmbientSpec {
    Sphere,
    Rp,
    Cp,
    Qp,
}

impl AmbientSpec {
    pub fn space(self) -> AmbientSpace {
        match self {
            AmbientSpec::Sphere => AmbientSpace::Sphere,
            AmbientSpec::Rp => AmbientSpace::RealProjective,
            AmbientSpec::Cp => AmbientSpace::ComplexProjective,
            AmbientSpec::Qp => AmbientSpace::QuaternionicProjective,
        }
    }
}

impl FromStr for AmbientSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere" => Ok(AmbientSpec::Sphere),
            "rp" => Ok(AmbientSpec::Rp),
            "cp" => Ok(AmbientSpec::Cp),
            "qp" => Ok(AmbientSpec::Qp),
            _ => Err(Error::invalid(format!("ambient must be sphere, rp, cp or qp, got {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_specs() {
        assert_eq!(MeshSource::parse_generator("icosphere:3").unwrap(), MeshSource::Icosphere { level: 3 });
        assert_eq!(
            MeshSource::parse_generator("cap:1.25:3").unwrap(),
            MeshSource::Cap { angle: 1.25, level: 3 }
        );
        for spec in ["ellipsoid:1:1:1.5:3", "torus:1:2:16", "clifford:64", "disc:1:8"] {
            let s = MeshSource::parse_generator(spec).unwrap();
            assert_eq!(s.to_string(), spec);
        }
        for bad in ["icosphere", "icosphere:x", "blob:3", "torus:1:2", "clifford:1:2"] {
            assert!(MeshSource::parse_generator(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn potential_specs() {
        assert_eq!("zero".parse::<PotentialSpec>().unwrap(), PotentialSpec::Zero);
        assert_eq!("const:1".parse::<PotentialSpec>().unwrap(), PotentialSpec::Constant(1.0));
        assert_eq!("gh2:0.25".parse::<PotentialSpec>().unwrap(), PotentialSpec::CurvatureScaled(0.25));
        for bad in ["", "const", "const:x", "gh2:nan", "one:1"] {
            assert!(bad.parse::<PotentialSpec>().is_err(), "{bad}");
        }
        assert_eq!(PotentialSpec::CurvatureScaled(0.5).evaluate(&[2.0, 4.0]), vec![1.0, 2.0]);
    }

    #[test]
    fn ambient_specs() {
        assert_eq!("cp".parse::<AmbientSpec>().unwrap().space(), AmbientSpace::ComplexProjective);
        assert!("hp".parse::<AmbientSpec>().is_err());
    }
}
