//! Energy ratios `χ_s, χ_t, χ_e, χ_b` and the rod stiffnesses they identify.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{AxialStressField, Direction, TangentialStressField};
use crate::geometry::{Material, SectionProps};

/// Relative size below which a resultant is treated as absent.
pub const RESULTANT_CUTOFF: f64 = 1e-8;

/// Relative agreement required between the two stiffness routes.
pub const IDENTIFICATION_TOL: f64 = 1e-12;

/// `∫ (S31² + S32²) dA`
pub fn tangential_energy(field: &TangentialStressField) -> f64 {
    field.norm_sq()
}

/// `∫ S33² dA`
pub fn axial_energy(field: &AxialStressField) -> f64 {
    field.norm_sq()
}

#[derive(Debug, Clone, Copy)]
pub enum FieldRef<'a> {
    Tangential(&'a TangentialStressField),
    Axial(&'a AxialStressField),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Resultants {
    Tangential {
        #[serde(rename = "T1")]
        t1: f64,
        #[serde(rename = "T2")]
        t2: f64,
        #[serde(rename = "Mt")]
        mt: f64,
    },
    Axial {
        #[serde(rename = "N")]
        n: f64,
        /// `∫ x2 S33 dA`
        #[serde(rename = "M")]
        m: f64,
        /// `∫ x1 S33 dA`
        #[serde(rename = "M_x2")]
        m_x2: f64,
    },
}

pub fn resultants(field: FieldRef<'_>) -> Resultants {
    match field {
        FieldRef::Tangential(f) => {
            let [t1, t2] = f.resultant();
            Resultants::Tangential { t1, t2, mt: f.moment() }
        }
        FieldRef::Axial(f) => Resultants::Axial { n: f.force(), m: f.moment_about_e1(), m_x2: f.moment_about_e2() },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FactorKind {
    Shear { direction: Direction },
    Torsion,
    Extension,
    /// `axis: E1` is bending about the `x1` axis (`M = ∫ x2 S33`, `J = I1`).
    Bending { axis: Direction },
}

impl FactorKind {
    pub fn label(self) -> String {
        match self {
            FactorKind::Shear { direction } => format!("shear_{}", direction.label()),
            FactorKind::Torsion => "torsion".into(),
            FactorKind::Extension => "extension".into(),
            FactorKind::Bending { axis: Direction::E1 } => "bending".into(),
            FactorKind::Bending { axis: Direction::E2 } => "bending_x2".into(),
        }
    }

    /// Area or second moment multiplying the energy in the factor.
    pub fn geometric(self, props: &SectionProps) -> f64 {
        match self {
            FactorKind::Shear { .. } | FactorKind::Extension => props.area,
            FactorKind::Torsion => props.jo,
            FactorKind::Bending { axis: Direction::E1 } => props.i1,
            FactorKind::Bending { axis: Direction::E2 } => props.i2,
        }
    }

    pub fn modulus(self, material: &Material) -> f64 {
        match self {
            FactorKind::Shear { .. } | FactorKind::Torsion => material.shear_modulus,
            FactorKind::Extension | FactorKind::Bending { .. } => material.young(),
        }
    }
}

/// A factor together with the integrals it was formed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Factor {
    pub kind: FactorKind,
    pub chi: f64,
    pub energy: f64,
    pub resultant: f64,
    pub geometric: f64,
}

impl Factor {
    /// Forms `geometric · energy / resultant²`, rejecting negligible resultants.
    pub fn from_integrals(kind: FactorKind, energy: f64, resultant: f64, geometric: f64) -> Result<Self> {
        let scale = (geometric * energy).abs().sqrt();
        if !(resultant.abs() > RESULTANT_CUTOFF * scale) {
            return Err(Error::IllPosedFactor { kind: kind.label(), resultant, scale });
        }
        Ok(Factor { kind, chi: geometric * energy / (resultant * resultant), energy, resultant, geometric })
    }
}

pub fn compute_factor_detail(kind: FactorKind, field: FieldRef<'_>, props: &SectionProps) -> Result<Factor> {
    let (energy, resultant) = match (kind, field) {
        (FactorKind::Shear { direction }, FieldRef::Tangential(f)) => {
            let r = f.resultant();
            (f.norm_sq(), if direction == Direction::E1 { r[0] } else { r[1] })
        }
        (FactorKind::Torsion, FieldRef::Tangential(f)) => (f.norm_sq(), f.moment()),
        (FactorKind::Extension, FieldRef::Axial(f)) => (f.norm_sq(), f.force()),
        (FactorKind::Bending { axis: Direction::E1 }, FieldRef::Axial(f)) => (f.norm_sq(), f.moment_about_e1()),
        (FactorKind::Bending { axis: Direction::E2 }, FieldRef::Axial(f)) => (f.norm_sq(), f.moment_about_e2()),
        _ => return Err(Error::FieldKindMismatch(kind.label())),
    };
    Factor::from_integrals(kind, energy, resultant, kind.geometric(props))
}

pub fn compute_factor(kind: FactorKind, field: FieldRef<'_>, props: &SectionProps) -> Result<f64> {
    compute_factor_detail(kind, field, props).map(|f| f.chi)
}

/// A stiffness modulus obtained both as `modulus · geometric / χ` and as
/// `modulus · resultant² / energy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stiffness {
    pub kind: FactorKind,
    pub value: f64,
    pub energy_route: f64,
    pub gap: f64,
}

impl Stiffness {
    /// Rod energy per unit length `resultant² / (2 stiffness)`.
    pub fn rod_energy(&self, resultant: f64) -> f64 {
        resultant * resultant / (2.0 * self.value)
    }
}

pub fn identify_stiffness(factor: &Factor, material: &Material) -> Result<Stiffness> {
    let modulus = factor.kind.modulus(material);
    let value = modulus * factor.geometric / factor.chi;
    let energy_route = modulus * factor.resultant * factor.resultant / factor.energy;
    let gap = (value - energy_route).abs() / value.abs();
    if !(gap <= IDENTIFICATION_TOL) || !(value > 0.0) {
        return Err(Error::IdentificationMismatch { kind: factor.kind.label(), gap });
    }
    Ok(Stiffness { kind: factor.kind, value, energy_route, gap })
}

/// Section energy per unit length `(1/2μ) ∫ |σ|²` matching [`Stiffness::rod_energy`].
pub fn section_energy(factor: &Factor, material: &Material) -> f64 {
    factor.energy / (2.0 * factor.kind.modulus(material))
}
