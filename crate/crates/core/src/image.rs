//! RGBA raster, color and mask types plus PNG input/output.
//!
//! Channels are linear reals in `[0, 1]`. PNG data is taken as already
//! linear: no gamma conversion is applied on load or save.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::Error;

/// A straight (non-premultiplied) RGBA sample.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Rgba {
    pub r: f64,
    pub g: f64,
    pub b: f64,
    pub a: f64,
}

impl Rgba {
    pub const TRANSPARENT: Rgba = Rgba::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(r: f64, g: f64, b: f64, a: f64) -> Self {
        Self { r, g, b, a }
    }

    pub const fn opaque(color: ColorRGB) -> Self {
        Self::new(color.r, color.g, color.b, 1.0)
    }

    pub fn rgb(&self) -> ColorRGB {
        ColorRGB::new(self.r, self.g, self.b)
    }

    pub fn channels(&self) -> [f64; 4] {
        [self.r, self.g, self.b, self.a]
    }
}

/// An RGB color with channels in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ColorRGB {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl ColorRGB {
    pub const WHITE: ColorRGB = ColorRGB::new(1.0, 1.0, 1.0);
    pub const BLACK: ColorRGB = ColorRGB::new(0.0, 0.0, 0.0);

    pub const fn new(r: f64, g: f64, b: f64) -> Self {
        Self { r, g, b }
    }

    pub const fn gray(v: f64) -> Self {
        Self::new(v, v, v)
    }

    /// Checked constructor: every channel must be finite and in `[0, 1]`.
    pub fn try_new(r: f64, g: f64, b: f64) -> Result<Self, Error> {
        for v in [r, g, b] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidColor(v));
            }
        }
        Ok(Self::new(r, g, b))
    }

    pub fn distance(&self, other: &ColorRGB) -> f64 {
        let (dr, dg, db) = (self.r - other.r, self.g - other.g, self.b - other.b);
        (dr * dr + dg * dg + db * db).sqrt()
    }

    pub fn array(&self) -> [f64; 3] {
        [self.r, self.g, self.b]
    }
}

impl std::str::FromStr for ColorRGB {
    type Err = Error;

    /// Parses `r,g,b` with real channels, or `#rrggbb`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(hex) = s.strip_prefix('#') {
            if hex.len() != 6 || !hex.is_ascii() {
                return Err(Error::Parse(format!("bad hex color `{s}`")));
            }
            let channel = |i: usize| {
                u8::from_str_radix(&hex[i..i + 2], 16)
                    .map(|v| f64::from(v) / 255.0)
                    .map_err(|_| Error::Parse(format!("bad hex color `{s}`")))
            };
            return Ok(Self::new(channel(0)?, channel(2)?, channel(4)?));
        }
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected `r,g,b`, got `{s}`")));
        }
        let mut v = [0.0; 3];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad color channel `{p}`")))?;
        }
        Self::try_new(v[0], v[1], v[2])
    }
}

impl std::fmt::Display for ColorRGB {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{}", self.r, self.g, self.b)
    }
}

/// Row-major RGBA raster.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<Rgba>,
}

impl Image {
    /// Image filled with one value. Panics on zero dimensions.
    pub fn filled(width: usize, height: usize, fill: Rgba) -> Self {
        assert!(width >= 1 && height >= 1, "image dimensions must be positive");
        Self {
            width,
            height,
            pixels: vec![fill; width * height],
        }
    }

    pub fn transparent(width: usize, height: usize) -> Self {
        Self::filled(width, height, Rgba::TRANSPARENT)
    }

    pub fn from_pixels(width: usize, height: usize, pixels: Vec<Rgba>) -> Result<Self, Error> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyDimensions);
        }
        if pixels.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                found: (pixels.len(), 1),
            });
        }
        if let Some(bad) = pixels
            .iter()
            .flat_map(|p| p.channels())
            .find(|v| !(0.0..=1.0).contains(v))
        {
            return Err(Error::InvalidColor(bad));
        }
        Ok(Self { width, height, pixels })
    }

    /// Builds an image from a per-pixel function of `(x, y)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> Rgba) -> Self {
        assert!(width >= 1 && height >= 1, "image dimensions must be positive");
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(clamp_rgba(f(x, y)));
            }
        }
        Self { width, height, pixels }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[Rgba] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> Rgba {
        self.pixels[y * self.width + x]
    }

    /// Stores a pixel, clamping every channel into `[0, 1]`.
    pub fn set(&mut self, x: usize, y: usize, p: Rgba) {
        self.pixels[y * self.width + x] = clamp_rgba(p);
    }

    /// Applies a function to every pixel; the result is clamped.
    pub fn map(&self, mut f: impl FnMut(Rgba) -> Rgba) -> Image {
        Image {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&p| clamp_rgba(f(p))).collect(),
        }
    }

    pub(crate) fn ensure_same_size(&self, other: (usize, usize)) -> Result<(), Error> {
        if self.dimensions() != other {
            return Err(Error::DimensionMismatch {
                expected: self.dimensions(),
                found: other,
            });
        }
        Ok(())
    }

    /// Decodes a PNG byte stream. Any bit depth and color type is accepted
    /// and expanded to 8-bit RGBA first.
    pub fn decode_png(reader: impl Read) -> Result<Image, Error> {
        let mut decoder = png::Decoder::new(reader);
        decoder.set_transformations(png::Transformations::normalize_to_color8());
        let mut reader = decoder.read_info()?;
        let (width, height) = {
            let info = reader.info();
            (info.width as usize, info.height as usize)
        };
        if width == 0 || height == 0 {
            return Err(Error::EmptyDimensions);
        }
        let mut buf = vec![0; reader.output_buffer_size()];
        let frame = reader.next_frame(&mut buf)?;
        let bytes = &buf[..frame.buffer_size()];
        let samples = frame.color_type.samples();
        if frame.bit_depth != png::BitDepth::Eight {
            return Err(Error::Decode(format!("unsupported bit depth {:?}", frame.bit_depth)));
        }
        let unit = |v: u8| f64::from(v) / 255.0;
        let pixels = bytes
            .chunks_exact(samples)
            .take(width * height)
            .map(|s| match frame.color_type {
                png::ColorType::Grayscale => Rgba::new(unit(s[0]), unit(s[0]), unit(s[0]), 1.0),
                png::ColorType::GrayscaleAlpha => Rgba::new(unit(s[0]), unit(s[0]), unit(s[0]), unit(s[1])),
                png::ColorType::Rgb => Rgba::new(unit(s[0]), unit(s[1]), unit(s[2]), 1.0),
                _ => Rgba::new(unit(s[0]), unit(s[1]), unit(s[2]), unit(s[3])),
            })
            .collect::<Vec<_>>();
        if pixels.len() != width * height {
            return Err(Error::Decode("truncated image data".into()));
        }
        Ok(Image { width, height, pixels })
    }

    /// Encodes as 8-bit RGBA PNG.
    pub fn encode_png(&self, writer: impl Write) -> Result<(), Error> {
        let data: Vec<u8> = self.pixels.iter().flat_map(|p| p.channels()).map(quantize).collect();
        write_png(writer, self.width, self.height, png::ColorType::Rgba, &data)
    }

    pub fn to_png_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.encode_png(&mut out).expect("encoding into memory cannot fail");
        out
    }

    pub fn load_png(path: impl AsRef<Path>) -> Result<Image, Error> {
        let file = File::open(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
        Self::decode_png(BufReader::new(file))
    }

    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<(), Error> {
        let file = File::create(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
        let mut w = BufWriter::new(file);
        self.encode_png(&mut w)?;
        w.flush().map_err(|e| Error::io(path.as_ref(), e))
    }
}

pub(crate) fn write_png(
    writer: impl Write,
    width: usize,
    height: usize,
    color: png::ColorType,
    data: &[u8],
) -> Result<(), Error> {
    let mut encoder = png::Encoder::new(writer, width as u32, height as u32);
    encoder.set_color(color);
    encoder.set_depth(png::BitDepth::Eight);
    encoder.set_compression(png::Compression::Default);
    let mut w = encoder.write_header()?;
    w.write_image_data(data)?;
    w.finish()?;
    Ok(())
}

/// Rounds a `[0, 1]` real to the nearest 8-bit level.
pub fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

fn clamp_rgba(p: Rgba) -> Rgba {
    let c = |v: f64| if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
    Rgba::new(c(p.r), c(p.g), c(p.b), c(p.a))
}

/// Boolean region-of-interest grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    width: usize,
    height: usize,
    values: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize, value: bool) -> Self {
        Self {
            width,
            height,
            values: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self { width, height, values }
    }

    /// Mask from an image: a pixel is set when its alpha-weighted luminance exceeds one half.
    pub fn from_image(img: &Image) -> Self {
        Self::from_fn(img.width(), img.height(), |x, y| {
            let p = img.get(x, y);
            (p.r + p.g + p.b) / 3.0 * p.a > 0.5
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.values[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.values[y * self.width + x] = v;
    }
}
