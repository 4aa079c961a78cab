//! End-to-end runs: refinement ladder, extrapolation, reports, convergence
//! tables and fuzz campaigns.

use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::factors::{identify_stiffness, Factor, FactorKind};
use crate::fem::SolverOptions;
use crate::field::{AxialStressField, Direction, FieldOrigin};
use crate::flexure::{solve_flexure, FlexureSolution};
use crate::fuzz::{run_campaign, CorpusRow, FuzzSection, SampleKind};
use crate::geometry::{normalize_section, SectionSpec};
use crate::mesh::vtk::VtkWriter;
use crate::mesh::{element_budget, mesh_props, refine, triangulate_with_budget, ScalarField, TriMesh};
use crate::report::*;
use crate::torsion::{solve_torsion, TorsionSolution};

/// Inputs of a compute or converge run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub section: SectionSpec,
    /// Target circumdiameter of the coarsest level; defaults to a sixteenth
    /// of the section diameter.
    pub h: Option<f64>,
    /// Number of mesh levels, each a uniform refinement of the previous one.
    pub refinements: usize,
    /// Poisson ratios for the flexure solves; `None` means `{0, ν_material}`.
    pub nu: Option<Vec<f64>>,
    pub directions: Vec<Direction>,
    pub solver: SolverOptions,
    pub budget: usize,
}

impl RunConfig {
    pub fn new(section: SectionSpec) -> Self {
        RunConfig {
            section,
            h: None,
            refinements: 3,
            nu: None,
            directions: vec![Direction::E1, Direction::E2],
            solver: SolverOptions::default(),
            budget: element_budget(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.section.validate()?;
        if self.refinements < 1 {
            return Err(Error::Config("refinements must be at least 1".into()));
        }
        if let Some(list) = &self.nu {
            if list.is_empty() {
                return Err(Error::Config("empty nu list".into()));
            }
            if let Some(bad) = list.iter().find(|v| !(**v > -1.0 && **v < 0.5)) {
                return Err(Error::Config(format!("nu {bad} outside (-1, 0.5)")));
            }
        }
        if let Some(h) = self.h {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Config(format!("h must be positive, got {h}")));
            }
        }
        Ok(())
    }

    pub fn h_target(&self) -> f64 {
        self.h.unwrap_or(self.section.shape.diameter() / 16.0)
    }

    pub fn nu_list(&self) -> Vec<f64> {
        let mut list = self.nu.clone().unwrap_or_else(|| vec![0.0, self.section.material.nu]);
        list.sort_by(f64::total_cmp);
        list.dedup();
        list
    }
}

/// `f_fine + (f_fine - f_coarse) / 3`.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    fine + (fine - coarse) / 3.0
}

/// `log2((f0 - f1) / (f1 - f2))` for three successive halvings of `h`.
pub fn observed_order(f0: f64, f1: f64, f2: f64) -> Option<f64> {
    let r = (f0 - f1) / (f1 - f2);
    (r > 0.0 && r.is_finite()).then(|| r.log2())
}

/// Solutions on the finest level, kept for field export.
#[derive(Debug, Clone)]
pub struct FinestFields {
    pub mesh: Arc<TriMesh>,
    pub torsion: TorsionSolution,
    pub flexure: Vec<FlexureSolution>,
}

#[derive(Debug, Clone)]
pub struct Ladder {
    pub levels: Vec<LevelRecord>,
    pub finest: FinestFields,
    pub notes: Vec<String>,
    pub h_target: f64,
}

fn solver_out(s: &crate::fem::SolveStats) -> SolverOut {
    SolverOut { method: s.method, iterations: s.iterations, relative_residual: s.relative_residual }
}

fn shear_level(f: &FlexureSolution, area: f64) -> ShearLevel {
    let (along, across) = match f.direction {
        Direction::E1 => (f.resultant[0], f.resultant[1]),
        Direction::E2 => (f.resultant[1], f.resultant[0]),
    };
    let energy = f.stress.norm_sq();
    ShearLevel {
        direction: f.direction,
        nu: f.nu,
        energy,
        t: along,
        t_transverse: across,
        chi_s: area * energy / (along * along),
        closure_defect: f.closure_defect,
        mantle_defect: f.stress.mantle_defect(),
    }
}

fn axial_chi(mesh: &Arc<TriMesh>) -> Result<[f64; 3]> {
    let props = mesh_props(mesh);
    let ext = AxialStressField::new(ScalarField::from_fn(Arc::clone(mesh), |_| 1.0), FieldOrigin::Synthetic);
    let b1 = AxialStressField::new(ScalarField::from_fn(Arc::clone(mesh), |x| x[1]), FieldOrigin::Synthetic);
    let b2 = AxialStressField::new(ScalarField::from_fn(Arc::clone(mesh), |x| x[0]), FieldOrigin::Synthetic);
    Ok([
        Factor::from_integrals(FactorKind::Extension, ext.norm_sq(), ext.force(), props.area)?.chi,
        Factor::from_integrals(FactorKind::Bending { axis: Direction::E1 }, b1.norm_sq(), b1.moment_about_e1(), props.i1)?.chi,
        Factor::from_integrals(FactorKind::Bending { axis: Direction::E2 }, b2.norm_sq(), b2.moment_about_e2(), props.i2)?.chi,
    ])
}

enum Job {
    Torsion,
    Flexure(Direction, f64),
}

enum Done {
    Torsion(Box<TorsionSolution>),
    Flexure(Box<FlexureSolution>),
}

/// Meshes the normalized section and solves every level.
pub fn run_ladder(config: &RunConfig) -> Result<(Ladder, crate::geometry::RigidTransform)> {
    config.validate()?;
    let normalized = normalize_section(&config.section)?;
    let spec = &normalized.spec;
    let h_target = config.h_target();
    let mut notes = Vec::new();
    let holes = spec.shape.hole_count();
    let shear_jobs: Vec<(Direction, f64)> = if holes > 0 {
        if config.nu.is_some() {
            return Err(Error::MultiplyConnected { holes });
        }
        notes.push(format!("shear factors skipped: section has {holes} hole(s)"));
        Vec::new()
    } else {
        config.nu_list().into_iter().flat_map(|nu| config.directions.iter().map(move |&d| (d, nu))).collect()
    };
    let mut mesh = Arc::new(triangulate_with_budget(spec, h_target, config.budget)?);
    let mut levels = Vec::new();
    let mut finest = None;
    for level in 0..config.refinements {
        if level > 0 {
            let requested = 4 * mesh.triangle_count();
            if requested > config.budget {
                return Err(Error::ElementBudget { requested, budget: config.budget });
            }
            mesh = Arc::new(refine(&mesh));
        }
        let jobs: Vec<Job> =
            std::iter::once(Job::Torsion).chain(shear_jobs.iter().map(|&(d, nu)| Job::Flexure(d, nu))).collect();
        let done: Vec<Done> = jobs
            .par_iter()
            .map(|job| match *job {
                Job::Torsion => solve_torsion(&mesh, &config.solver).map(|t| Done::Torsion(Box::new(t))),
                Job::Flexure(d, nu) => solve_flexure(&mesh, nu, d, &config.solver).map(|f| Done::Flexure(Box::new(f))),
            })
            .collect::<Result<_>>()
            .map_err(|e| e.context(format!("level {level} (h = {:e})", mesh.h())))?;
        let mut torsion = None;
        let mut flexure = Vec::new();
        for d in done {
            match d {
                Done::Torsion(t) => torsion = Some(*t),
                Done::Flexure(f) => flexure.push(*f),
            }
        }
        let torsion = torsion.expect("torsion job is always scheduled");
        let props = mesh_props(&mesh);
        let moment = torsion.stress.moment();
        let [chi_e, chi_b, chi_b_x2] = axial_chi(&mesh)?;
        levels.push(LevelRecord {
            level,
            h: mesh.h(),
            nodes: mesh.node_count(),
            triangles: mesh.triangle_count(),
            a: props.area,
            i1: props.i1,
            i2: props.i2,
            jo: props.jo,
            jt: torsion.jt,
            torsion_energy: torsion.energy,
            torsion_moment: moment,
            duality_gap: (torsion.energy - torsion.jt).abs() / torsion.jt,
            chi_t: props.jo * torsion.stress.norm_sq() / (moment * moment),
            hole_constants: torsion.hole_constants.clone(),
            torsion_solver: solver_out(&torsion.stats),
            shear: flexure.iter().map(|f| shear_level(f, props.area)).collect(),
            chi_e,
            chi_b,
            chi_b_x2,
        });
        finest = Some(FinestFields { mesh: Arc::clone(&mesh), torsion, flexure });
    }
    let ladder = Ladder { levels, finest: finest.expect("at least one level"), notes, h_target };
    Ok((ladder, normalized.transform))
}

fn extrapolate(levels: &[LevelRecord], f: impl Fn(&LevelRecord) -> f64) -> f64 {
    match levels {
        [.., a, b] => richardson(f(a), f(b)),
        [b] => f(b),
        [] => f64::NAN,
    }
}

/// Runs the ladder and assembles the report.
pub fn compute(config: &RunConfig) -> Result<(FactorReport, FinestFields)> {
    let (ladder, transform) = run_ladder(config)?;
    let levels = &ladder.levels;
    let material = config.section.material;
    let (a, i1, i2, jo) =
        (extrapolate(levels, |l| l.a), extrapolate(levels, |l| l.i1), extrapolate(levels, |l| l.i2), extrapolate(levels, |l| l.jo));
    let jt = extrapolate(levels, |l| l.jt);
    let e_t = extrapolate(levels, |l| l.torsion_energy);
    let mut checks = Vec::new();
    let mut worst_gap = 0.0f64;

    let tf = Factor::from_integrals(FactorKind::Torsion, e_t, jt, jo)?;
    let ts = identify_stiffness(&tf, &material)?;
    worst_gap = worst_gap.max(ts.gap);
    let torsion = TorsionOut { jt, chi_t: tf.chi, stiff_t: ts.value };

    let mut shear = Vec::new();
    let n_shear = levels[0].shear.len();
    for k in 0..n_shear {
        let e = extrapolate(levels, |l| l.shear[k].energy);
        let t = extrapolate(levels, |l| l.shear[k].t);
        let first = &levels[0].shear[k];
        let f = Factor::from_integrals(FactorKind::Shear { direction: first.direction }, e, t, a)?;
        let s = identify_stiffness(&f, &material)?;
        worst_gap = worst_gap.max(s.gap);
        shear.push(ShearOut { direction: first.direction, nu: first.nu, chi_s: f.chi, stiff_s: s.value });
    }

    let last = levels.last().expect("at least one level");
    let young = material.young();
    let axial = AxialOut {
        chi_e: last.chi_e,
        stiff_e: young * a / last.chi_e,
        chi_b: last.chi_b,
        stiff_b: young * i1 / last.chi_b,
        chi_b_x2: last.chi_b_x2,
        stiff_b_x2: young * i2 / last.chi_b_x2,
    };

    let max_duality = levels.iter().map(|l| l.duality_gap).fold(0.0, f64::max);
    checks.push(Check { id: "duality_gap".into(), value: max_duality, limit: 1e-6, passed: max_duality <= 1e-6 });
    let min_chi_t = levels.iter().map(|l| l.chi_t).fold(f64::INFINITY, f64::min).min(torsion.chi_t);
    checks.push(Check { id: "chi_t_ge_1".into(), value: min_chi_t, limit: 1.0 - 1e-3, passed: min_chi_t >= 1.0 - 1e-3 });
    if n_shear > 0 {
        let min_chi_s = levels.iter().flat_map(|l| l.shear.iter().map(|s| s.chi_s)).fold(f64::INFINITY, f64::min);
        checks.push(Check { id: "chi_s_gt_1".into(), value: min_chi_s, limit: 1.0, passed: min_chi_s > 1.0 });
        let mut worst_drop = f64::NEG_INFINITY;
        for d in &config.directions {
            let seq: Vec<&ShearOut> = shear.iter().filter(|s| s.direction == *d && s.nu >= 0.0).collect();
            for w in seq.windows(2) {
                worst_drop = worst_drop.max((w[0].chi_s - w[1].chi_s) / w[0].chi_s);
            }
        }
        if worst_drop.is_finite() {
            checks.push(Check { id: "chi_s_monotone_in_nu".into(), value: worst_drop, limit: 1e-9, passed: worst_drop <= 1e-9 });
        }
    }
    checks.push(Check { id: "identification_identity".into(), value: worst_gap, limit: 1e-12, passed: worst_gap <= 1e-12 });
    let finest = &ladder.finest;
    let base = mesh_props(&finest.mesh);
    let chi = |s: &crate::field::TangentialStressField| base.jo * s.norm_sq() / s.moment().powi(2);
    let scaled_gap = (chi(&finest.torsion.stress) - chi(&finest.torsion.stress.scaled(-7.0))).abs() / chi(&finest.torsion.stress);
    checks.push(Check { id: "scaling_invariance".into(), value: scaled_gap, limit: 1e-12, passed: scaled_gap <= 1e-12 });

    let observed_order_jt = match levels.as_slice() {
        [.., x, y, z] => observed_order(x.jt, y.jt, z.jt),
        _ => None,
    };
    let report = FactorReport {
        props: PropsOut { a, i1, i2, jo },
        torsion,
        shear,
        axial,
        provenance: Provenance {
            section: config.section.name.clone(),
            material: MaterialOut::from(&material),
            transform,
            h_target: ladder.h_target,
            h_finest: last.h,
            refinements: config.refinements,
            rtol: config.solver.rtol,
            conventions: Conventions::default(),
            observed_order_jt,
            notes: ladder.notes.clone(),
            checks,
            levels: ladder.levels.clone(),
        },
    };
    Ok((report, ladder.finest))
}

/// Writes the finest-level fields as legacy VTK.
pub fn write_fields(fields: &FinestFields, path: &Path) -> Result<()> {
    let torsion = fields.torsion.stress.element_values();
    let shear: Vec<(String, Vec<[f64; 2]>)> = {
        let many_nu = fields.flexure.iter().filter(|f| f.direction == Direction::E2).count() > 1;
        fields
            .flexure
            .iter()
            .map(|f| {
                let name = if many_nu {
                    format!("shear_{}_nu{}", f.direction.label(), f.nu)
                } else {
                    format!("shear_{}", f.direction.label())
                };
                (name, f.stress.element_values())
            })
            .collect()
    };
    let mut w = VtkWriter::new(&fields.mesh, "cross-section stress fields")
        .point_scalars("phi", &fields.torsion.phi.values)
        .cell_vectors("torsion", &torsion);
    for (name, values) in &shear {
        w = w.cell_vectors(name, values);
    }
    w.write(path).map_err(|e| Error::from(e).context(format!("writing {}", path.display())))
}

/// Convergence table; needs at least three levels.
pub fn converge(config: &RunConfig) -> Result<(Vec<LevelRecord>, String)> {
    if config.refinements < 3 {
        return Err(Error::Config("converge needs at least 3 refinement levels".into()));
    }
    let (ladder, _) = run_ladder(config)?;
    Ok((ladder.levels.clone(), convergence_csv(&ladder.levels)))
}

pub fn convergence_csv(levels: &[LevelRecord]) -> String {
    let fmt = format_f64;
    let mut header = vec!["level", "h", "triangles", "A", "Jo", "Jt", "chi_t"].into_iter().map(String::from).collect::<Vec<_>>();
    if let Some(first) = levels.first() {
        header.extend(first.shear.iter().map(|s| format!("chi_s_{}_nu{}", s.direction.label(), s.nu)));
    }
    header.push("order_Jt".into());
    let mut out = header.join(",");
    out.push('\n');
    for (k, l) in levels.iter().enumerate() {
        let mut row = vec![l.level.to_string(), fmt(l.h), l.triangles.to_string(), fmt(l.a), fmt(l.jo), fmt(l.jt), fmt(l.chi_t)];
        row.extend(l.shear.iter().map(|s| fmt(s.chi_s)));
        let order = if k >= 2 { observed_order(levels[k - 2].jt, levels[k - 1].jt, l.jt) } else { None };
        row.push(order.map(fmt).unwrap_or_default());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub sections: Vec<SectionSpec>,
    pub h: Option<f64>,
    pub samples: u64,
    pub seed: u64,
    pub kinds: Vec<SampleKind>,
    pub solver: SolverOptions,
}

impl FuzzConfig {
    pub fn new(sections: Vec<SectionSpec>, samples: u64, seed: u64) -> Self {
        FuzzConfig {
            sections,
            h: None,
            samples,
            seed,
            kinds: vec![SampleKind::TorsionLike, SampleKind::ShearLike, SampleKind::Axial],
            solver: SolverOptions::default(),
        }
    }
}

/// Runs a seeded campaign; returns the rows and the number of violations.
pub fn fuzz(config: &FuzzConfig) -> Result<(Vec<CorpusRow>, usize)> {
    let sections = config
        .sections
        .iter()
        .map(|s| {
            let spec = normalize_section(s)?.spec;
            let h = config.h.unwrap_or(spec.shape.diameter() / 16.0);
            let mesh = Arc::new(triangulate_with_budget(&spec, h, element_budget())?);
            FuzzSection::new(spec.name.clone(), mesh, &config.solver)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = run_campaign(&sections, config.samples, config.seed, &config.kinds)?;
    let violations = rows.iter().filter(|r| r.violated).count();
    Ok((rows, violations))
}
