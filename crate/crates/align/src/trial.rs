//! Alignment-trial scoring and the append-only JSON-lines trial log.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use comptex::compositor::wrap_angle;
use comptex::Pose2D;
use serde::{Deserialize, Serialize};

/// Pose as it travels over the wire. Missing fields default to identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoseDto {
    pub tx: f64,
    pub ty: f64,
    pub theta: f64,
    pub scale: f64,
}

impl Default for PoseDto {
    fn default() -> Self {
        Pose2D::IDENTITY.into()
    }
}

impl From<Pose2D> for PoseDto {
    fn from(p: Pose2D) -> Self {
        Self {
            tx: p.tx,
            ty: p.ty,
            theta: p.theta,
            scale: p.scale,
        }
    }
}

impl TryFrom<PoseDto> for Pose2D {
    type Error = comptex::Error;

    fn try_from(p: PoseDto) -> comptex::Result<Pose2D> {
        Pose2D::new(p.tx, p.ty, p.theta, p.scale)
    }
}

/// Misalignment of a committed pose against the ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseErrors {
    /// Euclidean translation error in pixels.
    pub translation_err: f64,
    /// Absolute wrapped rotation error in degrees.
    pub rotation_err: f64,
    /// `|ln(scale / truth_scale)|`.
    pub scale_err: f64,
}

pub fn pose_errors(pose: &Pose2D, truth: &Pose2D) -> PoseErrors {
    PoseErrors {
        translation_err: (pose.tx - truth.tx).hypot(pose.ty - truth.ty),
        rotation_err: wrap_angle(pose.theta - truth.theta).abs().to_degrees(),
        scale_err: (pose.scale / truth.scale).ln().abs(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub session_id: String,
    pub scene: String,
    pub mode: String,
    pub blend: String,
    pub pose: PoseDto,
    pub elapsed_ms: u64,
    pub translation_err: f64,
    pub rotation_err: f64,
    pub scale_err: f64,
}

/// Append-only JSON-lines file, one [`TrialRecord`] per line.
#[derive(Debug)]
pub struct TrialLog {
    path: PathBuf,
    file: File,
}

impl TrialLog {
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Self { path, file })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&mut self, record: &TrialRecord) -> io::Result<()> {
        let mut line = serde_json::to_string(record).map_err(io::Error::other)?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.flush()
    }
}

/// Replays a trial log. Blank lines are skipped; any other malformed line is an error.
pub fn read_log(path: impl AsRef<Path>) -> io::Result<Vec<TrialRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("line {}: {e}", i + 1)))?;
        out.push(rec);
    }
    Ok(out)
}
