//! JSON problem and benchmark configurations.

use std::path::Path;

use laminate_core::geometry::SurfaceMap;
use laminate_core::{ExtrudedGeometry, Layup, LayupFamily, OrthotropicConstants, ProblemSetup, TensorProductSpace};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Assembly backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Standard,
    Fast,
    #[serde(alias = "voigt-free")]
    VoigtFree,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Standard, Backend::Fast, Backend::VoigtFree];

    pub fn name(self) -> &'static str {
        match self {
            Backend::Standard => "standard",
            Backend::Fast => "fast",
            Backend::VoigtFree => "voigt_free",
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Engineering constants, keyed as in the config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialSpec {
    #[serde(rename = "E1")]
    pub e1: f64,
    #[serde(rename = "E2")]
    pub e2: f64,
    #[serde(rename = "E3")]
    pub e3: f64,
    #[serde(rename = "G12")]
    pub g12: f64,
    #[serde(rename = "G13")]
    pub g13: f64,
    #[serde(rename = "G23")]
    pub g23: f64,
    pub nu12: f64,
    pub nu13: f64,
    pub nu23: f64,
}

impl Default for MaterialSpec {
    fn default() -> Self {
        OrthotropicConstants::pagano().into()
    }
}

impl From<OrthotropicConstants> for MaterialSpec {
    fn from(c: OrthotropicConstants) -> Self {
        Self { e1: c.e1, e2: c.e2, e3: c.e3, g12: c.g12, g13: c.g13, g23: c.g23, nu12: c.nu12, nu13: c.nu13, nu23: c.nu23 }
    }
}

impl From<MaterialSpec> for OrthotropicConstants {
    fn from(m: MaterialSpec) -> Self {
        Self { e1: m.e1, e2: m.e2, e3: m.e3, g12: m.g12, g13: m.g13, g23: m.g23, nu12: m.nu12, nu13: m.nu13, nu23: m.nu23 }
    }
}

/// Stacking-sequence family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    #[serde(rename = "cross_ply_0_90", alias = "cross_ply")]
    CrossPly,
    #[serde(rename = "quad_ply_0_p45_m45_90", alias = "quad_ply")]
    QuadPly,
    #[serde(rename = "custom")]
    Custom,
}

/// Layup section: either a family with a layer count or explicit angles in degrees.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayupSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interfaces: Option<Vec<f64>>,
}

impl LayupSpec {
    /// Ply angles in radians.
    pub fn angles_rad(&self) -> Result<Vec<f64>> {
        match (&self.family, &self.angles) {
            (Some(_), Some(_)) => Err(Error::Config("layup: give either `family` or `angles`, not both".into())),
            (Some(FamilyKind::Custom), None) => Err(Error::Config("layup: family `custom` needs `angles`".into())),
            (Some(kind), None) => {
                let m = self.layers.ok_or_else(|| Error::Config("layup: `family` needs `layers`".into()))?;
                if m == 0 {
                    return Err(Error::Config("layup: `layers` must be at least 1".into()));
                }
                Ok(family(*kind).expect("non-custom family").angles(m))
            }
            (None, Some(angles)) => {
                if angles.is_empty() {
                    return Err(Error::Config("layup: `angles` is empty".into()));
                }
                if let Some(m) = self.layers {
                    if m != angles.len() {
                        return Err(Error::Config(format!("layup: {} angles for {m} layers", angles.len())));
                    }
                }
                Ok(angles.iter().map(|a| a.to_radians()).collect())
            }
            (None, None) => Err(Error::Config("layup: `family` or `angles` is required".into())),
        }
    }

    pub fn build(&self, material: OrthotropicConstants) -> Result<Layup> {
        let angles = self.angles_rad()?;
        let layers: Vec<_> = angles.iter().map(|&a| (material, a)).collect();
        Ok(match &self.interfaces {
            Some(t) => Layup::new(t.clone(), &layers)?,
            None => Layup::equal_thickness(&layers)?,
        })
    }
}

pub(crate) fn family(kind: FamilyKind) -> Option<LayupFamily> {
    match kind {
        FamilyKind::CrossPly => Some(LayupFamily::CrossPly),
        FamilyKind::QuadPly => Some(LayupFamily::QuadPly),
        FamilyKind::Custom => None,
    }
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationSpec {
    pub degree: usize,
    pub elements: [usize; 2],
    #[serde(default = "one")]
    pub thickness_elements: usize,
}

/// Plate geometry: `Lx x Ly` rectangle extruded along `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometrySpec {
    #[serde(rename = "Lx")]
    pub lx: f64,
    #[serde(rename = "Ly")]
    pub ly: f64,
    pub a: [f64; 3],
}

impl Default for GeometrySpec {
    fn default() -> Self {
        Self { lx: 1.0, ly: 1.0, a: [0.0, 0.0, 0.1] }
    }
}

impl GeometrySpec {
    pub fn build(&self) -> Result<ExtrudedGeometry> {
        if !(self.lx > 0.0 && self.ly > 0.0) {
            return Err(Error::Config("geometry: `Lx` and `Ly` must be positive".into()));
        }
        let a = Vector3::from(self.a);
        let geom = ExtrudedGeometry::new(SurfaceMap::Rectangle { lx: self.lx, ly: self.ly }, a);
        geom.frame_at([0.5, 0.5])?;
        Ok(geom)
    }
}

/// A single assembly problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    #[serde(default)]
    pub material: MaterialSpec,
    pub layup: LayupSpec,
    pub discretization: DiscretizationSpec,
    #[serde(default)]
    pub geometry: GeometrySpec,
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn setup(&self) -> Result<ProblemSetup> {
        let d = &self.discretization;
        if d.degree == 0 || d.elements.contains(&0) || d.thickness_elements == 0 {
            return Err(Error::Config("discretization: degree and element counts must be at least 1".into()));
        }
        let space = TensorProductSpace::uniform(d.degree, d.elements, d.thickness_elements)?;
        let layup = self.layup.build(self.material.into())?;
        Ok(ProblemSetup::new(space, self.geometry.build()?, layup)?)
    }
}

/// Plate dimensions of the benchmark grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateSpec {
    #[serde(rename = "Lx")]
    pub lx: f64,
    #[serde(rename = "Ly")]
    pub ly: f64,
    pub thickness: f64,
}

impl Default for PlateSpec {
    fn default() -> Self {
        Self { lx: 1.0, ly: 1.0, thickness: 0.1 }
    }
}

fn default_repetitions() -> usize {
    5
}

fn default_backends() -> Vec<Backend> {
    vec![Backend::Standard, Backend::Fast]
}

/// Benchmark grid over degrees, in-plane element counts and layer counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub degrees: Vec<usize>,
    /// Elements per in-plane direction.
    pub inplane_elements: Vec<usize>,
    pub layer_counts: Vec<usize>,
    pub layup_family: FamilyKind,
    /// Ply angles in degrees for the `custom` family, repeated cyclically.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom_angles: Option<Vec<f64>>,
    #[serde(default)]
    pub material: MaterialSpec,
    #[serde(default)]
    pub geometry: PlateSpec,
    #[serde(default = "one")]
    pub thickness_elements: usize,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default = "default_backends")]
    pub backends: Vec<Backend>,
    #[serde(default)]
    pub decompose_angles: bool,
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let lists = [
            ("degrees", self.degrees.is_empty()),
            ("inplane_elements", self.inplane_elements.is_empty()),
            ("layer_counts", self.layer_counts.is_empty()),
            ("backends", self.backends.is_empty()),
        ];
        if let Some((name, _)) = lists.iter().find(|(_, empty)| *empty) {
            return Err(Error::Config(format!("`{name}` must be nonempty")));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("`repetitions` must be at least 1".into()));
        }
        if self.degrees.contains(&0) || self.inplane_elements.contains(&0) || self.layer_counts.contains(&0) {
            return Err(Error::Config("degrees, element and layer counts must be at least 1".into()));
        }
        if self.thickness_elements == 0 {
            return Err(Error::Config("`thickness_elements` must be at least 1".into()));
        }
        if !(self.geometry.lx > 0.0 && self.geometry.ly > 0.0 && self.geometry.thickness > 0.0) {
            return Err(Error::Config("plate dimensions must be positive".into()));
        }
        match (self.layup_family, &self.custom_angles) {
            (FamilyKind::Custom, None) => Err(Error::Config("family `custom` needs `custom_angles`".into())),
            (FamilyKind::Custom, Some(a)) if a.is_empty() => Err(Error::Config("`custom_angles` is empty".into())),
            _ => Ok(()),
        }
    }

    /// Ply angles in radians for `m` layers.
    pub fn angles(&self, m: usize) -> Vec<f64> {
        match family(self.layup_family) {
            Some(f) => f.angles(m),
            None => {
                let custom = self.custom_angles.as_deref().unwrap_or(&[0.0]);
                custom.iter().cycle().take(m).map(|a| a.to_radians()).collect()
            }
        }
    }

    pub fn setup(&self, p: usize, elements: usize, m: usize) -> Result<ProblemSetup> {
        let material: OrthotropicConstants = self.material.into();
        let layers: Vec<_> = self.angles(m).into_iter().map(|a| (material, a)).collect();
        let layup = Layup::equal_thickness(&layers)?;
        let space = TensorProductSpace::uniform(p, [elements, elements], self.thickness_elements)?;
        let g = &self.geometry;
        Ok(ProblemSetup::new(space, ExtrudedGeometry::plate(g.lx, g.ly, g.thickness), layup)?)
    }
}
