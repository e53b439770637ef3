//! Alignment scene rendering: a static real object plus a posed virtual
//! replica, blended as an optical (additive) or video (source-over)
//! see-through display would show them.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::geometry::{Point, Polygon2D};
use crate::image::{ColorRGB, Image, Rgba};
use crate::scene::Scene;
use crate::{Error, Result};

/// Planar similarity pose of the virtual replica relative to the real object.
///
/// Scale stands in for misalignment in depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose2D {
    pub tx: f64,
    pub ty: f64,
    pub theta: f64,
    pub scale: f64,
}

impl Default for Pose2D {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Pose2D {
    pub const IDENTITY: Pose2D = Pose2D {
        tx: 0.0,
        ty: 0.0,
        theta: 0.0,
        scale: 1.0,
    };
    pub const MIN_SCALE: f64 = 0.1;
    pub const MAX_SCALE: f64 = 10.0;

    /// Validates the components and normalizes `theta` into `(-pi, pi]`.
    pub fn new(tx: f64, ty: f64, theta: f64, scale: f64) -> Result<Self> {
        if !(tx.is_finite() && ty.is_finite() && theta.is_finite() && scale.is_finite()) {
            return Err(Error::InvalidPose("components must be finite".into()));
        }
        if !(Self::MIN_SCALE..=Self::MAX_SCALE).contains(&scale) {
            return Err(Error::InvalidPose(format!(
                "scale {scale} outside [{}, {}]",
                Self::MIN_SCALE,
                Self::MAX_SCALE
            )));
        }
        Ok(Self {
            tx,
            ty,
            theta: wrap_angle(theta),
            scale,
        })
    }

    pub fn translation(tx: f64, ty: f64) -> Self {
        Self {
            tx,
            ty,
            ..Self::IDENTITY
        }
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// How the virtual replica is visualized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VisMode {
    ComplementaryPhotometric,
    ComplementaryGeometric,
    Silhouette,
    Wireframe,
    Fresnel,
}

impl VisMode {
    pub const ALL: [VisMode; 5] = [
        VisMode::ComplementaryPhotometric,
        VisMode::ComplementaryGeometric,
        VisMode::Silhouette,
        VisMode::Wireframe,
        VisMode::Fresnel,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            VisMode::ComplementaryPhotometric => "photometric",
            VisMode::ComplementaryGeometric => "geometric",
            VisMode::Silhouette => "silhouette",
            VisMode::Wireframe => "wireframe",
            VisMode::Fresnel => "fresnel",
        }
    }
}

impl fmt::Display for VisMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VisMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "photometric" | "complementary_photometric" | "complementary" => Ok(VisMode::ComplementaryPhotometric),
            "geometric" | "complementary_geometric" => Ok(VisMode::ComplementaryGeometric),
            "silhouette" => Ok(VisMode::Silhouette),
            "wireframe" => Ok(VisMode::Wireframe),
            "fresnel" => Ok(VisMode::Fresnel),
            other => Err(Error::Parse(format!("unknown visualization mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlendMode {
    /// Optical see-through: replica light adds to the scene.
    AdditiveOST,
    /// Video see-through: replica is composited over the camera image.
    OverVST,
}

impl BlendMode {
    /// Replica opacity used when the caller does not choose one.
    pub fn default_alpha(&self) -> f64 {
        match self {
            BlendMode::AdditiveOST => 1.0,
            BlendMode::OverVST => 0.6,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BlendMode::AdditiveOST => "additive",
            BlendMode::OverVST => "over",
        }
    }
}

impl fmt::Display for BlendMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BlendMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "additive" | "ost" | "additive_ost" => Ok(BlendMode::AdditiveOST),
            "over" | "vst" | "over_vst" => Ok(BlendMode::OverVST),
            other => Err(Error::Parse(format!("unknown blend mode `{other}`"))),
        }
    }
}

/// Places `img` into a `frame`-sized canvas with its top-left corner at
/// `origin`, then applies `pose` about the image center.
///
/// Samples are bilinear on premultiplied color; samples outside the source
/// are transparent. Samples landing exactly on a source pixel copy it
/// bit for bit.
pub fn warp(img: &Image, pose: &Pose2D, frame: (usize, usize), origin: (f64, f64)) -> Image {
    let center = Point::new((img.width() as f64 - 1.0) / 2.0, (img.height() as f64 - 1.0) / 2.0);
    let anchor = Point::new(origin.0 + center.x + pose.tx, origin.1 + center.y + pose.ty);
    let (sin, cos) = if pose.theta == 0.0 {
        (0.0, 1.0)
    } else {
        pose.theta.sin_cos()
    };
    let inv_scale = 1.0 / pose.scale;

    Image::from_fn(frame.0, frame.1, |x, y| {
        let d = Point::new(x as f64, y as f64) - anchor;
        // inverse rotation then inverse scale
        let q = Point::new(
            center.x + (cos * d.x + sin * d.y) * inv_scale,
            center.y + (-sin * d.x + cos * d.y) * inv_scale,
        );
        sample_bilinear(img, q)
    })
}

fn pixel_or_clear(img: &Image, x: i64, y: i64) -> Rgba {
    if x < 0 || y < 0 || x >= img.width() as i64 || y >= img.height() as i64 {
        Rgba::TRANSPARENT
    } else {
        img.get(x as usize, y as usize)
    }
}

fn sample_bilinear(img: &Image, q: Point) -> Rgba {
    let (x0, y0) = (q.x.floor(), q.y.floor());
    let (fx, fy) = (q.x - x0, q.y - y0);
    let (xi, yi) = (x0 as i64, y0 as i64);
    if fx == 0.0 && fy == 0.0 {
        return pixel_or_clear(img, xi, yi);
    }
    let taps = [
        (xi, yi, (1.0 - fx) * (1.0 - fy)),
        (xi + 1, yi, fx * (1.0 - fy)),
        (xi, yi + 1, (1.0 - fx) * fy),
        (xi + 1, yi + 1, fx * fy),
    ];
    let (mut r, mut g, mut b, mut a) = (0.0, 0.0, 0.0, 0.0);
    for (x, y, w) in taps {
        if w == 0.0 {
            continue;
        }
        let p = pixel_or_clear(img, x, y);
        let wa = w * p.a;
        r += wa * p.r;
        g += wa * p.g;
        b += wa * p.b;
        a += wa;
    }
    if a <= 0.0 {
        return Rgba::TRANSPARENT;
    }
    Rgba::new(r / a, g / a, b / a, a)
}

/// Blends `overlay` onto `base`.
///
/// `AdditiveOST`: `clamp(base + a_o * overlay)`, alpha of `base` kept.
/// `OverVST`: `a_o * overlay + (1 - a_o) * base` (source-over).
pub fn blend(base: &Image, overlay: &Image, mode: BlendMode) -> Result<Image> {
    base.ensure_same_size(overlay.dimensions())?;
    let (w, h) = base.dimensions();
    Ok(Image::from_fn(w, h, |x, y| {
        let (b, o) = (base.get(x, y), overlay.get(x, y));
        match mode {
            BlendMode::AdditiveOST => Rgba::new(b.r + o.a * o.r, b.g + o.a * o.g, b.b + o.a * o.b, b.a),
            BlendMode::OverVST => Rgba::new(
                o.a * o.r + (1.0 - o.a) * b.r,
                o.a * o.g + (1.0 - o.a) * b.g,
                o.a * o.b + (1.0 - o.a) * b.b,
                o.a + (1.0 - o.a) * b.a,
            ),
        }
    }))
}

/// Rim band inside a silhouette, the planar stand-in for a Fresnel shader.
///
/// An interior pixel at boundary distance `d <= band_w` gets intensity
/// `(1 - d / band_w)^power`, color `tint * intensity` and alpha `intensity`.
pub fn fresnel_field(
    silhouette: &Polygon2D,
    frame: (usize, usize),
    band_w: f64,
    power: f64,
    tint: ColorRGB,
) -> Result<Image> {
    if !(band_w >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "fresnel band must be >= 1, got {band_w}"
        )));
    }
    if !(power > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "fresnel power must be > 0, got {power}"
        )));
    }
    Ok(Image::from_fn(frame.0, frame.1, |x, y| {
        let p = Point::new(x as f64, y as f64);
        let d = silhouette.boundary_distance(p);
        let inside = d <= 1e-9 || silhouette.contains(p);
        if !inside || d > band_w {
            return Rgba::TRANSPARENT;
        }
        let i = (1.0 - d / band_w).powf(power);
        Rgba::new(tint.r * i, tint.g * i, tint.b * i, i)
    }))
}

/// The replica as drawn for `mode`, posed and faded by `alpha`.
pub fn render_virtual(scene: &Scene, mode: VisMode, pose: &Pose2D, alpha: f64) -> Result<Image> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} outside [0, 1]")));
    }
    let asset = scene.asset(mode).ok_or(Error::MissingAsset(mode))?;
    let placed = warp(asset, pose, scene.frame, scene.object_origin());
    Ok(placed.map(|p| Rgba { a: p.a * alpha, ..p }))
}

/// Background, then the real object (static, identity pose), then the
/// posed replica blended with `blend_mode`.
pub fn compose(scene: &Scene, mode: VisMode, pose: &Pose2D, blend_mode: BlendMode, alpha: f64) -> Result<Image> {
    let overlay = render_virtual(scene, mode, pose, alpha)?;
    blend(scene.real_layer(), &overlay, blend_mode)
}

/// Background with the real texture composited over it at identity pose.
pub(crate) fn real_only(scene_frame: (usize, usize), background: ColorRGB, real: &Image, origin: (f64, f64)) -> Image {
    let bg = Image::filled(scene_frame.0, scene_frame.1, Rgba::opaque(background));
    let placed = warp(real, &Pose2D::IDENTITY, scene_frame, origin);
    blend(&bg, &placed, BlendMode::OverVST).expect("same frame size")
}
