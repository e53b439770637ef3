//! Alignment scenes and their `key = value` manifest files.
//!
//! ```text
//! # checker fixture
//! id = checker
//! texture = builtin:checker
//! frame = 128x128
//! background = 0.5,0.5,0.5
//! modes = photometric, geometric, silhouette, wireframe, fresnel
//! ```
//!
//! Relative texture, mask and patch paths resolve against the manifest's
//! directory. Keys prefixed `meta.` are carried along untouched.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::compositor::{fresnel_field, real_only, VisMode};
use crate::geometry::{geometric_complement, rasterize, ComplementConfig, Polygon2D};
use crate::image::{ColorRGB, Image, Mask, Rgba};
use crate::texture::{
    invert_complement, patch_complement, predominant_color, vst_complement, DEFAULT_HISTOGRAM_BINS,
    DEFAULT_VST_TOLERANCE,
};
use crate::{Error, Result};

/// Names of the built-in scenes.
pub const FIXTURES: [&str; 2] = ["checker", "triangles"];

pub const CHECKER_MANIFEST: &str = "\
id = checker
name = Checker 8x8
texture = builtin:checker
frame = 128x128
background = 0.5,0.5,0.5
modes = photometric, geometric, silhouette, wireframe, fresnel
";

pub const TRIANGLES_MANIFEST: &str = "\
id = triangles
name = Black and white triangles
texture = builtin:triangles
frame = 128x128
background = 0.5,0.5,0.5
modes = photometric, geometric, silhouette, wireframe, fresnel
meta.physical_edge_cm = 9.1
";

/// 8x8 black/white checker with 8 px cells (black top-left).
pub fn checker_texture() -> Image {
    Image::from_fn(64, 64, |x, y| {
        let v = ((x / 8 + y / 8) % 2) as f64;
        Rgba::new(v, v, v, 1.0)
    })
}

/// Black and white triangles of four sizes: each quadrant is tiled with
/// square blocks (32, 16, 8 and 4 px) split along a diagonal.
pub fn triangles_texture() -> Image {
    Image::from_fn(64, 64, |x, y| {
        let quadrant = (y / 32) * 2 + x / 32;
        let block = 32 >> quadrant;
        let (bx, by) = (x / block, y / block);
        let (u, v) = (x % block, y % block);
        // alternate the diagonal direction from block to block
        let black = if (bx + by) % 2 == 0 { u + v < block - 1 } else { u < v };
        let c = if black { 0.0 } else { 1.0 };
        Rgba::new(c, c, c, 1.0)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhotometricKind {
    Invert,
    Vst,
    Patch,
}

/// Parsed manifest; every field has a default except the texture.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneManifest {
    pub id: String,
    pub name: String,
    pub texture: String,
    pub frame: (usize, usize),
    pub object: Option<(usize, usize)>,
    pub background: ColorRGB,
    pub modes: Vec<VisMode>,
    pub photometric: PhotometricKind,
    pub target: ColorRGB,
    pub vst_tol: f64,
    pub mask: Option<String>,
    pub patch: Option<String>,
    pub geometric: ComplementConfig,
    pub silhouette_width: f64,
    pub overlay_color: ColorRGB,
    pub wireframe_grid: usize,
    pub fresnel_band: f64,
    pub fresnel_power: f64,
    pub fresnel_tint: ColorRGB,
    pub meta: BTreeMap<String, String>,
}

impl Default for SceneManifest {
    fn default() -> Self {
        Self {
            id: "scene".into(),
            name: String::new(),
            texture: String::new(),
            frame: (128, 128),
            object: None,
            background: ColorRGB::gray(0.5),
            modes: VisMode::ALL.to_vec(),
            photometric: PhotometricKind::Invert,
            target: ColorRGB::WHITE,
            vst_tol: DEFAULT_VST_TOLERANCE,
            mask: None,
            patch: None,
            geometric: ComplementConfig::default(),
            silhouette_width: 1.0,
            overlay_color: ColorRGB::WHITE,
            wireframe_grid: 8,
            fresnel_band: 8.0,
            fresnel_power: 2.0,
            fresnel_tint: ColorRGB::WHITE,
            meta: BTreeMap::new(),
        }
    }
}

fn parse_size(v: &str) -> Result<(usize, usize)> {
    let (w, h) = v
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::Parse(format!("expected WxH, got `{v}`")))?;
    let dim = |s: &str| -> Result<usize> {
        let n: usize = s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad dimension `{s}`")))?;
        if n == 0 || n > 4096 {
            return Err(Error::Parse(format!("dimension {n} outside 1..=4096")));
        }
        Ok(n)
    };
    Ok((dim(w)?, dim(h)?))
}

fn parse_num(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| Error::Parse(format!("{key}: bad number `{v}`")))?;
    if !x.is_finite() {
        return Err(Error::Parse(format!("{key}: must be finite")));
    }
    Ok(x)
}

impl SceneManifest {
    pub fn parse(text: &str) -> Result<Self> {
        let mut m = SceneManifest::default();
        let mut has_name = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "id" => {
                    if value.is_empty() || !value.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                        return Err(Error::Parse(format!("bad scene id `{value}`")));
                    }
                    m.id = value.to_string();
                }
                "name" => {
                    m.name = value.to_string();
                    has_name = true;
                }
                "texture" => m.texture = value.to_string(),
                "frame" => m.frame = parse_size(value)?,
                "object" => m.object = Some(parse_size(value)?),
                "background" => m.background = value.parse()?,
                "modes" => {
                    m.modes = value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(str::parse)
                        .collect::<Result<_>>()?;
                    m.modes.sort();
                    m.modes.dedup();
                }
                "photometric" => {
                    m.photometric = match value {
                        "invert" => PhotometricKind::Invert,
                        "vst" => PhotometricKind::Vst,
                        "patch" => PhotometricKind::Patch,
                        _ => return Err(Error::Parse(format!("unknown photometric kind `{value}`"))),
                    }
                }
                "target" => m.target = value.parse()?,
                "vst_tol" => {
                    m.vst_tol = parse_num(key, value)?;
                    if m.vst_tol < 0.0 {
                        return Err(Error::Parse("vst_tol must be >= 0".into()));
                    }
                }
                "mask" => m.mask = Some(value.to_string()),
                "patch" => m.patch = Some(value.to_string()),
                "geometric" => {
                    let grid = m.geometric.delaunay_grid;
                    let mut cfg = ComplementConfig::none();
                    cfg.delaunay_grid = grid;
                    for kind in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        match kind {
                            "edges" => cfg.edges = true,
                            "diagonals" => cfg.diagonals = true,
                            "bisectors" => cfg.bisectors = true,
                            "incircle" => cfg.incircle = true,
                            "circumcircle" => cfg.circumcircle = true,
                            "delaunay" => cfg.delaunay = true,
                            _ => return Err(Error::Parse(format!("unknown primitive kind `{kind}`"))),
                        }
                    }
                    m.geometric = cfg;
                }
                "geometric_grid" => m.geometric.delaunay_grid = parse_count(key, value)?,
                "stroke_width" => m.geometric.stroke_width = parse_width(key, value)?,
                "silhouette_width" => m.silhouette_width = parse_width(key, value)?,
                "overlay_color" => m.overlay_color = value.parse()?,
                "wireframe_grid" => m.wireframe_grid = parse_count(key, value)?,
                "fresnel_band" => {
                    m.fresnel_band = parse_num(key, value)?;
                    if m.fresnel_band < 1.0 {
                        return Err(Error::Parse("fresnel_band must be >= 1".into()));
                    }
                }
                "fresnel_power" => {
                    m.fresnel_power = parse_num(key, value)?;
                    if m.fresnel_power <= 0.0 {
                        return Err(Error::Parse("fresnel_power must be > 0".into()));
                    }
                }
                "fresnel_tint" => m.fresnel_tint = value.parse()?,
                _ if key.starts_with("meta.") && key.len() > 5 => {
                    m.meta.insert(key[5..].to_string(), value.to_string());
                }
                _ => return Err(Error::Parse(format!("line {}: unknown key `{key}`", lineno + 1))),
            }
        }
        if m.texture.is_empty() {
            return Err(Error::Parse("manifest has no `texture`".into()));
        }
        if m.photometric == PhotometricKind::Patch && (m.mask.is_none() || m.patch.is_none()) {
            return Err(Error::Parse("photometric = patch needs `mask` and `patch`".into()));
        }
        if !has_name {
            m.name = m.id.clone();
        }
        Ok(m)
    }

    /// Canonical `key = value` rendering; parsing it yields the same manifest.
    pub fn to_text(&self) -> String {
        let mut lines = vec![
            format!("id = {}", self.id),
            format!("name = {}", self.name),
            format!("texture = {}", self.texture),
            format!("frame = {}x{}", self.frame.0, self.frame.1),
        ];
        if let Some((w, h)) = self.object {
            lines.push(format!("object = {w}x{h}"));
        }
        lines.push(format!("background = {}", self.background));
        let modes: Vec<&str> = self.modes.iter().map(VisMode::name).collect();
        lines.push(format!("modes = {}", modes.join(", ")));
        lines.push(format!(
            "photometric = {}",
            match self.photometric {
                PhotometricKind::Invert => "invert",
                PhotometricKind::Vst => "vst",
                PhotometricKind::Patch => "patch",
            }
        ));
        lines.push(format!("target = {}", self.target));
        lines.push(format!("vst_tol = {}", self.vst_tol));
        if let Some(mask) = &self.mask {
            lines.push(format!("mask = {mask}"));
        }
        if let Some(patch) = &self.patch {
            lines.push(format!("patch = {patch}"));
        }
        let g = &self.geometric;
        let kinds: Vec<&str> = [
            (g.edges, "edges"),
            (g.diagonals, "diagonals"),
            (g.bisectors, "bisectors"),
            (g.incircle, "incircle"),
            (g.circumcircle, "circumcircle"),
            (g.delaunay, "delaunay"),
        ]
        .into_iter()
        .filter_map(|(on, name)| on.then_some(name))
        .collect();
        lines.push(format!("geometric = {}", kinds.join(", ")));
        lines.push(format!("geometric_grid = {}", g.delaunay_grid));
        lines.push(format!("stroke_width = {}", g.stroke_width));
        lines.push(format!("silhouette_width = {}", self.silhouette_width));
        lines.push(format!("overlay_color = {}", self.overlay_color));
        lines.push(format!("wireframe_grid = {}", self.wireframe_grid));
        lines.push(format!("fresnel_band = {}", self.fresnel_band));
        lines.push(format!("fresnel_power = {}", self.fresnel_power));
        lines.push(format!("fresnel_tint = {}", self.fresnel_tint));
        for (k, v) in &self.meta {
            lines.push(format!("meta.{k} = {v}"));
        }
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }
}

fn parse_count(key: &str, v: &str) -> Result<usize> {
    let n: usize = v.parse().map_err(|_| Error::Parse(format!("{key}: bad count `{v}`")))?;
    if n > 64 {
        return Err(Error::Parse(format!("{key}: at most 64")));
    }
    Ok(n)
}

fn parse_width(key: &str, v: &str) -> Result<f64> {
    let w = parse_num(key, v)?;
    if !(1.0..=64.0).contains(&w) {
        return Err(Error::Parse(format!("{key}: must be in [1, 64]")));
    }
    Ok(w)
}

/// Placement of the real texture inside the frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObjectRect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

/// A static real object in a frame plus the replica assets for each mode.
#[derive(Debug, Clone)]
pub struct Scene {
    pub id: String,
    pub name: String,
    pub frame: (usize, usize),
    pub background: ColorRGB,
    pub real_texture: Image,
    pub object_rect: ObjectRect,
    /// Outline of the texture in texture pixel coordinates.
    pub silhouette: Polygon2D,
    pub manifest: SceneManifest,
    assets: BTreeMap<VisMode, Image>,
    real_layer: Image,
}

impl Scene {
    /// Built-in scene by name (see [`FIXTURES`]).
    pub fn fixture(name: &str) -> Result<Scene> {
        let text = match name {
            "checker" => CHECKER_MANIFEST,
            "triangles" => TRIANGLES_MANIFEST,
            _ => return Err(Error::InvalidArgument(format!("unknown fixture `{name}`"))),
        };
        Scene::from_manifest(&SceneManifest::parse(text)?, Path::new("."))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Scene> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Scene::from_manifest(&SceneManifest::parse(&text)?, base)
    }

    /// Loads a fixture name, or a manifest path when `spec` is not a fixture name.
    pub fn resolve(spec: &str) -> Result<Scene> {
        if FIXTURES.contains(&spec) {
            Scene::fixture(spec)
        } else {
            Scene::load(spec)
        }
    }

    pub fn from_manifest(m: &SceneManifest, base: &Path) -> Result<Scene> {
        let resolve = |p: &str| -> PathBuf {
            let p = Path::new(p);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        };
        let real_texture = match m.texture.as_str() {
            "builtin:checker" => checker_texture(),
            "builtin:triangles" => triangles_texture(),
            path => Image::load_png(resolve(path))?,
        };
        let (w, h) = real_texture.dimensions();
        if let Some(obj) = m.object {
            if obj != (w, h) {
                return Err(Error::DimensionMismatch {
                    expected: obj,
                    found: (w, h),
                });
            }
        }
        if w > m.frame.0 || h > m.frame.1 {
            return Err(Error::InvalidArgument(format!(
                "texture {w}x{h} does not fit in frame {}x{}",
                m.frame.0, m.frame.1
            )));
        }
        if w < 2 || h < 2 {
            return Err(Error::InvalidArgument("texture must be at least 2x2".into()));
        }
        let object_rect = ObjectRect {
            x: (m.frame.0 - w) / 2,
            y: (m.frame.1 - h) / 2,
            w,
            h,
        };
        let silhouette = Polygon2D::rectangle(0.0, 0.0, (w - 1) as f64, (h - 1) as f64)?;

        let mut assets = BTreeMap::new();
        for &mode in &m.modes {
            let asset = match mode {
                VisMode::ComplementaryPhotometric => match m.photometric {
                    PhotometricKind::Invert => invert_complement(&real_texture, m.target),
                    PhotometricKind::Vst => {
                        let dominant = predominant_color(&real_texture, DEFAULT_HISTOGRAM_BINS)?;
                        vst_complement(&real_texture, dominant, m.vst_tol)?
                    }
                    PhotometricKind::Patch => {
                        let mask_path = m.mask.as_deref().expect("validated at parse");
                        let patch_path = m.patch.as_deref().expect("validated at parse");
                        let mask = Mask::from_image(&Image::load_png(resolve(mask_path))?);
                        let patch = Image::load_png(resolve(patch_path))?;
                        patch_complement(&real_texture, &mask, &patch)?
                    }
                },
                VisMode::ComplementaryGeometric => {
                    let mut cfg = m.geometric.clone();
                    cfg.stroke_color = m.overlay_color;
                    rasterize(&geometric_complement(&silhouette, &cfg)?, w, h)
                }
                VisMode::Silhouette => {
                    let cfg = ComplementConfig {
                        edges: true,
                        stroke_width: m.silhouette_width,
                        stroke_color: m.overlay_color,
                        ..ComplementConfig::none()
                    };
                    rasterize(&geometric_complement(&silhouette, &cfg)?, w, h)
                }
                VisMode::Wireframe => {
                    let cfg = ComplementConfig {
                        stroke_color: m.overlay_color,
                        ..ComplementConfig::wireframe(m.wireframe_grid)
                    };
                    rasterize(&geometric_complement(&silhouette, &cfg)?, w, h)
                }
                VisMode::Fresnel => {
                    fresnel_field(&silhouette, (w, h), m.fresnel_band, m.fresnel_power, m.fresnel_tint)?
                }
            };
            assets.insert(mode, asset);
        }

        let origin = (object_rect.x as f64, object_rect.y as f64);
        let real_layer = real_only(m.frame, m.background, &real_texture, origin);
        Ok(Scene {
            id: m.id.clone(),
            name: m.name.clone(),
            frame: m.frame,
            background: m.background,
            real_texture,
            object_rect,
            silhouette,
            manifest: m.clone(),
            assets,
            real_layer,
        })
    }

    pub fn asset(&self, mode: VisMode) -> Option<&Image> {
        self.assets.get(&mode)
    }

    pub fn modes(&self) -> Vec<VisMode> {
        self.assets.keys().copied().collect()
    }

    pub fn object_origin(&self) -> (f64, f64) {
        (self.object_rect.x as f64, self.object_rect.y as f64)
    }

    /// Background with the real object at identity pose.
    pub fn real_layer(&self) -> &Image {
        &self.real_layer
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checker_fixture_layout() {
        let s = Scene::fixture("checker").unwrap();
        assert_eq!(s.frame, (128, 128));
        assert_eq!(
            s.object_rect,
            ObjectRect {
                x: 32,
                y: 32,
                w: 64,
                h: 64
            }
        );
        assert_eq!(s.modes(), VisMode::ALL.to_vec());
        assert_eq!(s.real_layer().get(32, 32), Rgba::new(0.0, 0.0, 0.0, 1.0));
        assert_eq!(s.real_layer().get(40, 32), Rgba::new(1.0, 1.0, 1.0, 1.0));
        assert_eq!(s.real_layer().get(0, 0), Rgba::new(0.5, 0.5, 0.5, 1.0));
        for m in VisMode::ALL {
            assert_eq!(s.asset(m).unwrap().dimensions(), (64, 64));
        }
    }

    #[test]
    fn triangles_fixture_has_both_colors() {
        let s = Scene::fixture("triangles").unwrap();
        let tex = &s.real_texture;
        let blacks = tex.pixels().iter().filter(|p| p.r == 0.0).count();
        assert!(blacks > 1000 && blacks < 3000, "{blacks}");
        assert_eq!(s.manifest.meta.get("physical_edge_cm").map(String::as_str), Some("9.1"));
    }

    #[test]
    fn manifest_round_trip() {
        let m = SceneManifest::parse(TRIANGLES_MANIFEST).unwrap();
        assert_eq!(SceneManifest::parse(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn manifest_errors() {
        for bad in [
            "frame = 10x10\n",
            "texture = a.png\nframe = 0x5\n",
            "texture = a.png\nbogus = 1\n",
            "texture = a.png\nmodes = photometric, laser\n",
            "texture = a.png\nphotometric = patch\n",
            "texture = a.png\nno equals sign\n",
            "texture = a.png\nid = ../x\n",
            "texture = a.png\nfresnel_power = -1\n",
            "texture = a.png\nstroke_width = inf\n",
        ] {
            assert!(SceneManifest::parse(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn missing_texture_file() {
        let m = SceneManifest::parse("texture = nope.png\n").unwrap();
        assert!(matches!(
            Scene::from_manifest(&m, Path::new("/nonexistent")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn unknown_fixture() {
        assert!(Scene::fixture("moon").is_err());
    }
}
