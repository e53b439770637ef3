//! Pose-error sweeps: salience metrics as a function of misalignment.

mod csv;
mod plot;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::compositor::{compose, BlendMode, Pose2D, VisMode};
use crate::saliency::{metrics, saliency_map, SaliencyParams};
use crate::scene::Scene;
use crate::{Error, Result};

pub use plot::{plot_curves, plot_model, render_plot, PlotModel, PlotPanel, PlotSeries};

/// Pose component varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    /// Pixels.
    TranslationX,
    /// Pixels.
    TranslationY,
    /// Radians.
    Rotation,
    /// Unitless factor; identity is 1.
    Scale,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 4] = [
        SweepAxis::TranslationX,
        SweepAxis::TranslationY,
        SweepAxis::Rotation,
        SweepAxis::Scale,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::TranslationX => "translation_x",
            SweepAxis::TranslationY => "translation_y",
            SweepAxis::Rotation => "rotation",
            SweepAxis::Scale => "scale",
        }
    }

    pub fn unit(&self) -> &'static str {
        match self {
            SweepAxis::TranslationX | SweepAxis::TranslationY => "px",
            SweepAxis::Rotation => "rad",
            SweepAxis::Scale => "x",
        }
    }

    /// Offset value meaning "no misalignment".
    pub fn identity(&self) -> f64 {
        match self {
            SweepAxis::Scale => 1.0,
            _ => 0.0,
        }
    }

    /// Pose with this component set to `offset` and the rest at identity.
    pub fn pose(&self, offset: f64) -> Result<Pose2D> {
        let id = Pose2D::IDENTITY;
        match self {
            SweepAxis::TranslationX => Pose2D::new(offset, 0.0, 0.0, 1.0),
            SweepAxis::TranslationY => Pose2D::new(0.0, offset, 0.0, 1.0),
            SweepAxis::Rotation => Pose2D::new(0.0, 0.0, offset, 1.0),
            SweepAxis::Scale => Pose2D::new(id.tx, id.ty, id.theta, offset),
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "translation_x" | "tx" => Ok(SweepAxis::TranslationX),
            "translation_y" | "ty" => Ok(SweepAxis::TranslationY),
            "rotation" | "theta" => Ok(SweepAxis::Rotation),
            "scale" => Ok(SweepAxis::Scale),
            other => Err(Error::Parse(format!("unknown sweep axis `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub offsets: Vec<f64>,
    pub modes: Vec<VisMode>,
    pub blend: BlendMode,
    pub alpha: f64,
}

impl SweepSpec {
    /// Offsets must be non-empty, strictly increasing and include the
    /// axis identity.
    pub fn new(axis: SweepAxis, offsets: Vec<f64>, modes: Vec<VisMode>, blend: BlendMode, alpha: f64) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::InvalidArgument("sweep needs at least one offset".into()));
        }
        if offsets.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("offsets must be finite".into()));
        }
        if offsets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("offsets must be strictly increasing".into()));
        }
        if !offsets.contains(&axis.identity()) {
            return Err(Error::InvalidArgument(format!(
                "offsets must include the identity value {}",
                axis.identity()
            )));
        }
        if modes.is_empty() {
            return Err(Error::InvalidArgument("sweep needs at least one mode".into()));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidArgument(format!("alpha {alpha} outside [0, 1]")));
        }
        for &o in &offsets {
            axis.pose(o)?;
        }
        Ok(Self {
            axis,
            offsets,
            modes,
            blend,
            alpha,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub mode: VisMode,
    pub axis: SweepAxis,
    pub offset: f64,
    pub integral: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Run manifest (scene id, parameters, parameter hash), echoed into CSV comments.
    pub metadata: BTreeMap<String, String>,
}

impl SweepResult {
    pub fn rows_for(&self, mode: VisMode) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.mode == mode)
    }

    /// Modes in order of first appearance.
    pub fn modes(&self) -> Vec<VisMode> {
        let mut out = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.mode) {
                out.push(r.mode);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Serial,
}

pub fn run_sweep(scene: &Scene, spec: &SweepSpec) -> Result<SweepResult> {
    run_sweep_with(scene, spec, &SaliencyParams::default(), Execution::Parallel)
}

/// Scores one `(mode, pose)` cell.
pub fn evaluate(
    scene: &Scene,
    mode: VisMode,
    pose: &Pose2D,
    blend: BlendMode,
    alpha: f64,
    params: &SaliencyParams,
) -> Result<crate::saliency::SaliencyMetrics> {
    let frame = compose(scene, mode, pose, blend, alpha)?;
    Ok(metrics(&saliency_map(&frame, params)))
}

pub fn run_sweep_with(
    scene: &Scene,
    spec: &SweepSpec,
    params: &SaliencyParams,
    execution: Execution,
) -> Result<SweepResult> {
    if let Some(&missing) = spec.modes.iter().find(|m| scene.asset(**m).is_none()) {
        return Err(Error::MissingAsset(missing));
    }
    let cells: Vec<(VisMode, f64)> = spec
        .modes
        .iter()
        .flat_map(|&m| spec.offsets.iter().map(move |&o| (m, o)))
        .collect();
    let run_cell = |&(mode, offset): &(VisMode, f64)| -> Result<SweepRow> {
        let pose = spec.axis.pose(offset)?;
        let m = evaluate(scene, mode, &pose, spec.blend, spec.alpha, params)?;
        Ok(SweepRow {
            mode,
            axis: spec.axis,
            offset,
            integral: m.integral,
            max: m.max,
        })
    };
    let rows = match execution {
        Execution::Parallel => cells.par_iter().map(run_cell).collect::<Result<Vec<_>>>()?,
        Execution::Serial => cells.iter().map(run_cell).collect::<Result<Vec<_>>>()?,
    };
    Ok(SweepResult {
        rows,
        metadata: run_metadata(scene, spec, params),
    })
}

fn run_metadata(scene: &Scene, spec: &SweepSpec, params: &SaliencyParams) -> BTreeMap<String, String> {
    let modes: Vec<&str> = spec.modes.iter().map(VisMode::name).collect();
    let offsets: Vec<String> = spec.offsets.iter().map(|o| format!("{o:?}")).collect();
    let mut meta = BTreeMap::new();
    meta.insert("scene".to_string(), scene.id.clone());
    meta.insert("axis".to_string(), spec.axis.name().to_string());
    meta.insert("modes".to_string(), modes.join(" "));
    meta.insert("offsets".to_string(), offsets.join(" "));
    meta.insert("blend".to_string(), spec.blend.name().to_string());
    meta.insert("alpha".to_string(), format!("{:?}", spec.alpha));
    meta.insert("work_max_dim".to_string(), params.work_max_dim.to_string());
    meta.insert("sigma".to_string(), format!("{:?}", params.sigma));

    let mut hasher = Sha256::new();
    hasher.update(scene.manifest.to_text().as_bytes());
    for (k, v) in &meta {
        hasher.update(format!("{k}={v}\n").as_bytes());
    }
    let digest = hasher.finalize();
    let hash: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
    meta.insert("params_hash".to_string(), hash);
    meta
}

/// One row of a combined-axis grid run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub mode: VisMode,
    pub pose: Pose2D,
    pub integral: f64,
    pub max: f64,
}

/// Cartesian product of two sweep axes. No ordering claims attach to grids.
pub fn run_grid(
    scene: &Scene,
    modes: &[VisMode],
    axes: [(SweepAxis, &[f64]); 2],
    blend: BlendMode,
    alpha: f64,
    params: &SaliencyParams,
) -> Result<Vec<GridRow>> {
    let [(a1, o1), (a2, o2)] = axes;
    if a1 == a2 {
        return Err(Error::InvalidArgument("grid axes must differ".into()));
    }
    let mut cells = Vec::new();
    for &mode in modes {
        if scene.asset(mode).is_none() {
            return Err(Error::MissingAsset(mode));
        }
        for &v1 in o1 {
            for &v2 in o2 {
                let p1 = a1.pose(v1)?;
                let p2 = a2.pose(v2)?;
                // each axis pose differs from identity in exactly one component
                let pose = Pose2D::new(p1.tx + p2.tx, p1.ty + p2.ty, p1.theta + p2.theta, p1.scale * p2.scale)?;
                cells.push((mode, pose));
            }
        }
    }
    cells
        .par_iter()
        .map(|&(mode, pose)| {
            let m = evaluate(scene, mode, &pose, blend, alpha, params)?;
            Ok(GridRow {
                mode,
                pose,
                integral: m.integral,
                max: m.max,
            })
        })
        .collect()
}

pub use csv::{export_csv, export_grid_csv, format_csv, format_grid_csv, parse_csv, GRID_HEADER, HEADER};
