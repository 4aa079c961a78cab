//! Seeded random admissible stress fields and the inequalities checked on them.
//!
//! Generator: xorshift64* (shifts 12, 25, 27; multiplier 0x2545F4914F6CDD1D)
//! with its state initialized by one splitmix64 step of the seed. Uniform
//! draws in `[-1, 1)` are `(x >> 11) / 2^53 · 2 - 1`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factors::{Factor, FactorKind, RESULTANT_CUTOFF};
use crate::fem::{gradient_field, SolverOptions};
use crate::field::{equality_deviation, AxialStressField, Direction, FieldOrigin, TangentialStressField};
use crate::flexure::{particular_field, solve_flexure};
use crate::geometry::SectionProps;
use crate::mesh::{mesh_props, ScalarField, TriMesh};
use crate::quadrature;

/// Tolerance on factor bounds `χ ≥ 1`.
pub const EPS_FACTOR: f64 = 1e-6;
/// Relative slack for inequalities between quadrature sums.
pub const EPS_QUADRATURE: f64 = 1e-12;
/// Resampling attempts before a sample is declared degenerate.
pub const MAX_ATTEMPTS: u64 = 16;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        let s = splitmix64(seed);
        Rng { state: if s == 0 { 0x9E37_79B9_7F4A_7C15 } else { s } }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform in `[-1, 1)`.
    pub fn symmetric(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }
}

/// Seed used for resampling attempt `offset`.
pub fn attempt_seed(seed: u64, offset: u64) -> u64 {
    seed.wrapping_add(offset << 32)
}

fn neighbours(mesh: &TriMesh) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); mesh.node_count()];
    for tri in mesh.triangles() {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// One Jacobi pass replacing each value by the mean over the node and its
/// neighbours. Nodes with `keep[i]` set are left unchanged.
pub fn smooth(mesh: &TriMesh, values: &[f64], keep: &[bool]) -> Vec<f64> {
    let adj = neighbours(mesh);
    (0..values.len())
        .map(|i| {
            if keep[i] {
                values[i]
            } else {
                (values[i] + adj[i].iter().map(|&j| values[j]).sum::<f64>()) / (adj[i].len() + 1) as f64
            }
        })
        .collect()
}

fn random_nodal(mesh: &TriMesh, rng: &mut Rng, pinned: &[bool]) -> Vec<f64> {
    let raw: Vec<f64> = pinned.iter().map(|&p| if p { 0.0 } else { rng.symmetric() }).collect();
    smooth(mesh, &raw, pinned)
}

fn curl(phi: &ScalarField) -> Vec<[f64; 2]> {
    gradient_field(phi).iter().map(|g| [g[1], -g[0]]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SampleKind {
    #[serde(rename = "torsion-like")]
    TorsionLike,
    #[serde(rename = "shear-like")]
    ShearLike,
    #[serde(rename = "axial")]
    Axial,
}

impl SampleKind {
    pub fn label(self) -> &'static str {
        match self {
            SampleKind::TorsionLike => "torsion-like",
            SampleKind::ShearLike => "shear-like",
            SampleKind::Axial => "axial",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AxialKind {
    Extension,
    Bending,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NuSource {
    /// Perturb the exact flexure field for ν = 0.3.
    On,
    /// Perturb the exact flexure field for ν = 0.
    Off,
}

/// Tangential field `curl φ` of a potential that is zero on every boundary
/// loop, with `Mt = 2∫φ`.
#[derive(Debug, Clone)]
pub struct TorsionLike {
    pub phi: ScalarField,
    pub field: TangentialStressField,
    pub mt: f64,
    pub offset: u64,
}

/// Builds the torsion-like field of a given potential.
pub fn torsion_like_from_potential(phi: ScalarField, origin: FieldOrigin) -> Result<TorsionLike> {
    let field = TangentialStressField::from_elements(Arc::clone(&phi.mesh), &curl(&phi), origin)?;
    let mt = 2.0 * phi.integral();
    Ok(TorsionLike { phi, field, mt, offset: 0 })
}

pub fn random_torsion_like(mesh: &Arc<TriMesh>, seed: u64) -> Result<TorsionLike> {
    let pinned: Vec<bool> = mesh.node_loops().iter().map(|t| t.is_some()).collect();
    let jo = mesh_props(mesh).jo;
    for offset in 0..MAX_ATTEMPTS {
        let mut rng = Rng::new(attempt_seed(seed, offset));
        let phi = ScalarField::new(Arc::clone(mesh), random_nodal(mesh, &mut rng, &pinned))?;
        let origin = FieldOrigin::Fuzz { family: SampleKind::TorsionLike.label().into(), seed };
        let mut sample = torsion_like_from_potential(phi, origin)?;
        let scale = (jo * sample.field.norm_sq()).sqrt();
        if sample.mt.abs() > RESULTANT_CUTOFF * scale {
            sample.offset = offset;
            return Ok(sample);
        }
    }
    Err(Error::DegenerateSample { kind: SampleKind::TorsionLike.label().into(), seed, attempts: MAX_ATTEMPTS })
}

/// Exact flexure potentials of one mesh, shared by all shear-like samples.
#[derive(Debug, Clone)]
pub struct ShearFamily {
    mesh: Arc<TriMesh>,
    inertia: f64,
    base: ScalarField,
    amplitude: f64,
    nu_source: NuSource,
    /// `χ_s` of the exact ν = 0 field, the minimum over the family.
    pub chi_reference: f64,
}

impl ShearFamily {
    pub fn new(mesh: &Arc<TriMesh>, nu_source: NuSource, opts: &SolverOptions) -> Result<Self> {
        let props = mesh_props(mesh);
        let reference = solve_flexure(mesh, 0.0, Direction::E2, opts)?;
        let ref_factor = Factor::from_integrals(
            FactorKind::Shear { direction: Direction::E2 },
            reference.stress.norm_sq(),
            reference.resultant[1],
            props.area,
        )?;
        let base = match nu_source {
            NuSource::Off => reference.potential,
            NuSource::On => solve_flexure(mesh, 0.3, Direction::E2, opts)?.potential,
        };
        let amplitude = base.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(ShearFamily {
            mesh: Arc::clone(mesh),
            inertia: props.i1,
            base,
            amplitude: if amplitude > 0.0 { amplitude } else { 1.0 },
            nu_source,
            chi_reference: ref_factor.chi,
        })
    }

    pub fn nu_source(&self) -> NuSource {
        self.nu_source
    }

    /// `s0 + curl(φ_exact + amplitude·δ)` with `δ` supported on interior nodes.
    pub fn field_from_perturbation(&self, delta: &[f64], origin: FieldOrigin) -> Result<TangentialStressField> {
        let values = self.base.values.iter().zip(delta).map(|(b, d)| b + self.amplitude * d).collect();
        let phi = ScalarField::new(Arc::clone(&self.mesh), values)?;
        let c = curl(&phi);
        let samples = (0..self.mesh.triangle_count())
            .map(|t| {
                quadrature::points(&self.mesh.vertices(t)).map(|p| {
                    let s0 = particular_field(Direction::E2, self.inertia, p);
                    [s0[0] + c[t][0], s0[1] + c[t][1]]
                })
            })
            .collect();
        TangentialStressField::from_samples(Arc::clone(&self.mesh), samples, origin)
    }

    pub fn sample(&self, seed: u64) -> Result<TangentialStressField> {
        let pinned: Vec<bool> = self.mesh.node_loops().iter().map(|t| t.is_some()).collect();
        let mut rng = Rng::new(seed);
        let delta = random_nodal(&self.mesh, &mut rng, &pinned);
        self.field_from_perturbation(&delta, FieldOrigin::Fuzz { family: SampleKind::ShearLike.label().into(), seed })
    }
}

pub fn random_shear_like(mesh: &Arc<TriMesh>, nu_source: NuSource, seed: u64) -> Result<TangentialStressField> {
    ShearFamily::new(mesh, nu_source, &SolverOptions::default())?.sample(seed)
}

#[derive(Debug, Clone)]
pub struct AxialSample {
    pub field: AxialStressField,
    pub kind: AxialKind,
    pub offset: u64,
}

/// Random smooth `S33` rescaled to unit `N` (extension) or unit `M` (bending).
pub fn random_axial(mesh: &Arc<TriMesh>, kind: AxialKind, seed: u64) -> Result<AxialSample> {
    let props = mesh_props(mesh);
    let free = vec![false; mesh.node_count()];
    for offset in 0..MAX_ATTEMPTS {
        let mut rng = Rng::new(attempt_seed(seed, offset));
        let origin = FieldOrigin::Fuzz { family: format!("axial-{}", axial_label(kind)), seed };
        let values = random_nodal(mesh, &mut rng, &free);
        let field = AxialStressField::new(ScalarField::new(Arc::clone(mesh), values)?, origin);
        let (resultant, geometric) = match kind {
            AxialKind::Extension => (field.force(), props.area),
            AxialKind::Bending => (field.moment_about_e1(), props.i1),
        };
        if resultant.abs() > RESULTANT_CUTOFF * (geometric * field.norm_sq()).sqrt() {
            let scaled = field.values.values.iter().map(|v| v / resultant).collect();
            let field = AxialStressField::new(ScalarField::new(Arc::clone(mesh), scaled)?, field.origin);
            return Ok(AxialSample { field, kind, offset });
        }
    }
    Err(Error::DegenerateSample { kind: format!("axial-{}", axial_label(kind)), seed, attempts: MAX_ATTEMPTS })
}

fn axial_label(kind: AxialKind) -> &'static str {
    match kind {
        AxialKind::Extension => "extension",
        AxialKind::Bending => "bending",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// `lhs ≥ rhs - tol`
    AtLeast,
    /// `lhs > rhs`
    Greater,
    /// `|lhs - rhs| ≤ tol`
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub id: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs` as evaluated.
    pub margin: f64,
    pub relation: Relation,
    pub tol: f64,
    pub violated: bool,
}

impl BoundRow {
    pub fn new(id: &'static str, lhs: f64, rhs: f64, relation: Relation, tol: f64) -> Self {
        let margin = lhs - rhs;
        let violated = match relation {
            Relation::AtLeast => !(margin >= -tol),
            Relation::Greater => !(margin > 0.0),
            Relation::Equal => !(margin.abs() <= tol),
        };
        BoundRow { id, lhs, rhs, margin, relation, tol, violated }
    }
}

/// Field under test for [`check_bounds`].
#[derive(Debug, Clone, Copy)]
pub enum SampleField<'a> {
    Torsion { field: &'a TangentialStressField, mt_potential: Option<f64> },
    Shear { field: &'a TangentialStressField, chi_reference: Option<f64> },
    Axial { field: &'a AxialStressField, kind: AxialKind },
}

/// Evaluates every inequality that applies to the field.
pub fn check_bounds(sample: SampleField<'_>, props: &SectionProps) -> Vec<BoundRow> {
    let mut rows = Vec::new();
    match sample {
        SampleField::Torsion { field, mt_potential } => {
            let energy = field.norm_sq();
            let mt = field.moment();
            rows.push(BoundRow::new("chi_t_ge_1", props.jo * energy / (mt * mt), 1.0, Relation::AtLeast, EPS_FACTOR));
            let rhs = mt * mt;
            rows.push(BoundRow::new("cbs_moment", props.jo * energy, rhs, Relation::AtLeast, EPS_QUADRATURE * rhs));
            if let Some(m) = mt_potential {
                rows.push(BoundRow::new("green_moment", mt, m, Relation::Equal, 1e-10 * m.abs()));
            }
        }
        SampleField::Shear { field, chi_reference } => {
            let total = field.norm_sq();
            let s32 = field.integrate(|_, s| s[1] * s[1]);
            let t = field.resultant()[1];
            let a = props.area;
            let chi = a * total / (t * t);
            rows.push(BoundRow::new("chi_s_gt_1", chi, 1.0, Relation::Greater, 0.0));
            rows.push(BoundRow::new("jensen_1", a * total, a * s32, Relation::AtLeast, EPS_QUADRATURE * a * total));
            rows.push(BoundRow::new("jensen_2", a * s32, t * t, Relation::AtLeast, EPS_QUADRATURE * a * s32));
            if let Some(r) = chi_reference {
                rows.push(BoundRow::new("chi_s_ge_exact", chi, r, Relation::AtLeast, EPS_FACTOR));
            }
        }
        SampleField::Axial { field, kind } => {
            let energy = field.norm_sq();
            let (id, cbs, geometric, resultant) = match kind {
                AxialKind::Extension => ("chi_e_ge_1", "cbs_axial_force", props.area, field.force()),
                AxialKind::Bending => ("chi_b_ge_1", "cbs_axial_moment", props.i1, field.moment_about_e1()),
            };
            let rhs = resultant * resultant;
            rows.push(BoundRow::new(id, geometric * energy / rhs, 1.0, Relation::AtLeast, EPS_FACTOR));
            rows.push(BoundRow::new(cbs, geometric * energy, rhs, Relation::AtLeast, EPS_QUADRATURE * rhs));
        }
    }
    rows
}

/// One CSV row of a campaign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusRow {
    pub seed: u64,
    pub kind: SampleKind,
    pub section: String,
    pub inequality_id: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    #[serde(skip)]
    pub violated: bool,
}

/// A section prepared for a campaign.
#[derive(Debug, Clone)]
pub struct FuzzSection {
    pub name: String,
    pub mesh: Arc<TriMesh>,
    pub props: SectionProps,
    /// `None` for multiply connected sections, which have no shear-like family.
    pub shear: Option<[ShearFamily; 2]>,
}

impl FuzzSection {
    pub fn new(name: impl Into<String>, mesh: Arc<TriMesh>, opts: &SolverOptions) -> Result<Self> {
        let props = mesh_props(&mesh);
        let shear = if mesh.hole_count() == 0 {
            Some([ShearFamily::new(&mesh, NuSource::Off, opts)?, ShearFamily::new(&mesh, NuSource::On, opts)?])
        } else {
            None
        };
        Ok(FuzzSection { name: name.into(), mesh, props, shear })
    }
}

fn section_rows(section: &FuzzSection, seed: u64, kinds: &[SampleKind]) -> Result<Vec<CorpusRow>> {
    let mut out = Vec::new();
    let mut push = |kind: SampleKind, rows: Vec<BoundRow>| {
        out.extend(rows.into_iter().map(|r| CorpusRow {
            seed,
            kind,
            section: section.name.clone(),
            inequality_id: r.id,
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin,
            violated: r.violated,
        }))
    };
    for &kind in kinds {
        match kind {
            SampleKind::TorsionLike => {
                let s = random_torsion_like(&section.mesh, seed)?;
                push(kind, check_bounds(SampleField::Torsion { field: &s.field, mt_potential: Some(s.mt) }, &section.props));
            }
            SampleKind::ShearLike => {
                let Some(families) = &section.shear else { continue };
                // odd seeds perturb the ν = 0.3 field
                let family = &families[(seed & 1) as usize];
                let field = family.sample(seed)?;
                push(
                    kind,
                    check_bounds(SampleField::Shear { field: &field, chi_reference: Some(family.chi_reference) }, &section.props),
                );
            }
            SampleKind::Axial => {
                for ak in [AxialKind::Extension, AxialKind::Bending] {
                    let s = random_axial(&section.mesh, ak, seed)?;
                    push(kind, check_bounds(SampleField::Axial { field: &s.field, kind: ak }, &section.props));
                }
            }
        }
    }
    Ok(out)
}

/// Runs `samples` seeds starting at `seed` on every section; rows are ordered
/// by seed, then section, then kind.
pub fn run_campaign(sections: &[FuzzSection], samples: u64, seed: u64, kinds: &[SampleKind]) -> Result<Vec<CorpusRow>> {
    let per_seed: Vec<Vec<CorpusRow>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i);
            let mut rows = Vec::new();
            for section in sections {
                rows.extend(section_rows(section, s, kinds)?);
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per_seed.into_iter().flatten().collect())
}

pub const CORPUS_HEADER: &str = "seed,kind,section,inequality_id,lhs,rhs,margin";

pub fn corpus_csv(rows: &[CorpusRow]) -> String {
    let mut s = String::from(CORPUS_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{:.16e},{:.16e},{:.16e}\n",
            r.seed,
            r.kind.label(),
            r.section,
            r.inequality_id,
            r.lhs,
            r.rhs,
            r.margin
        ));
    }
    s
}

/// Equality check on a torsion-like field: `(deviation, χ_t - 1)`.
pub fn equality_link(field: &TangentialStressField, props: &SectionProps) -> Result<(f64, f64)> {
    let d = equality_deviation(field)?;
    let mt = field.moment();
    Ok((d.deviation, props.jo * field.norm_sq() / (mt * mt) - 1.0))
}
