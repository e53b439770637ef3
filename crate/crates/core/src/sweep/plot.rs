use std::path::Path;

use super::SweepResult;
use crate::compositor::VisMode;
use crate::font;
use crate::image::{ColorRGB, Image, Rgba};
use crate::{Error, Result};

const WIDTH: usize = 960;
const HEIGHT: usize = 420;
const MARGIN_LEFT: usize = 86;
const MARGIN_RIGHT: usize = 24;
const MARGIN_TOP: usize = 64;
const MARGIN_BOTTOM: usize = 48;

pub fn mode_color(mode: VisMode) -> ColorRGB {
    match mode {
        VisMode::ComplementaryPhotometric => ColorRGB::new(0.84, 0.15, 0.16),
        VisMode::ComplementaryGeometric => ColorRGB::new(1.0, 0.5, 0.05),
        VisMode::Silhouette => ColorRGB::new(0.12, 0.47, 0.71),
        VisMode::Wireframe => ColorRGB::new(0.17, 0.63, 0.17),
        VisMode::Fresnel => ColorRGB::new(0.58, 0.4, 0.74),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub mode: VisMode,
    /// Polyline vertices in image pixel coordinates, in offset order.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotPanel {
    pub title: String,
    /// Plot area `(x0, y0, x1, y1)` in pixels.
    pub area: (usize, usize, usize, usize),
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub x_label: String,
    pub series: Vec<PlotSeries>,
}

/// Geometry of a sweep chart: an integral panel and a max panel sharing
/// one legend.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotModel {
    pub width: usize,
    pub height: usize,
    pub legend: Vec<VisMode>,
    pub panels: Vec<PlotPanel>,
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi > lo {
        (lo, hi)
    } else {
        let pad = (lo.abs() * 0.1).max(1e-12);
        (lo - pad, hi + pad)
    }
}

type Metric = (&'static str, fn(&super::SweepRow) -> f64);

pub fn plot_model(result: &SweepResult) -> Result<PlotModel> {
    if result.rows.is_empty() {
        return Err(Error::InvalidArgument("nothing to plot: sweep has no rows".into()));
    }
    let legend = result.modes();
    let axis = result.rows[0].axis;
    let x_range = padded_range(result.rows.iter().map(|r| r.offset));
    let panel_w = WIDTH / 2;
    let metrics: [Metric; 2] = [("INTEGRAL", |r| r.integral), ("MAX", |r| r.max)];

    let panels = metrics
        .iter()
        .enumerate()
        .map(|(k, (title, get))| {
            let area = (
                k * panel_w + MARGIN_LEFT,
                MARGIN_TOP,
                (k + 1) * panel_w - MARGIN_RIGHT,
                HEIGHT - MARGIN_BOTTOM,
            );
            let y_range = padded_range(result.rows.iter().map(get));
            let to_px = |x: f64, y: f64| {
                let fx = (x - x_range.0) / (x_range.1 - x_range.0);
                let fy = (y - y_range.0) / (y_range.1 - y_range.0);
                (
                    area.0 as f64 + fx * (area.2 - area.0) as f64,
                    area.3 as f64 - fy * (area.3 - area.1) as f64,
                )
            };
            let series = legend
                .iter()
                .map(|&mode| {
                    let mut rows: Vec<_> = result.rows_for(mode).collect();
                    rows.sort_by(|a, b| a.offset.total_cmp(&b.offset));
                    PlotSeries {
                        mode,
                        points: rows.iter().map(|r| to_px(r.offset, get(r))).collect(),
                    }
                })
                .collect();
            PlotPanel {
                title: title.to_string(),
                area,
                x_range,
                y_range,
                x_label: format!("{} ({})", axis.name(), axis.unit()),
                series,
            }
        })
        .collect();
    Ok(PlotModel {
        width: WIDTH,
        height: HEIGHT,
        legend,
        panels,
    })
}

struct Canvas(Image);

impl Canvas {
    fn dot(&mut self, x: i64, y: i64, c: ColorRGB) {
        if x >= 0 && y >= 0 && (x as usize) < self.0.width() && (y as usize) < self.0.height() {
            self.0.set(x as usize, y as usize, Rgba::opaque(c));
        }
    }

    fn rect(&mut self, x0: i64, y0: i64, x1: i64, y1: i64, c: ColorRGB) {
        for y in y0..=y1 {
            for x in x0..=x1 {
                self.dot(x, y, c);
            }
        }
    }

    /// Two-pixel-wide line by uniform stepping.
    fn line(&mut self, a: (f64, f64), b: (f64, f64), c: ColorRGB) {
        let steps = ((b.0 - a.0).abs().max((b.1 - a.1).abs()).ceil() as usize).max(1);
        for i in 0..=steps {
            let t = i as f64 / steps as f64;
            let x = (a.0 + (b.0 - a.0) * t).round() as i64;
            let y = (a.1 + (b.1 - a.1) * t).round() as i64;
            self.rect(x, y, x + 1, y + 1, c);
        }
    }

    fn text(&mut self, x: usize, y: usize, s: &str, c: ColorRGB) {
        font::for_each_pixel(s, |dx, dy| self.dot((x + dx) as i64, (y + dy) as i64, c));
    }
}

pub fn render_plot(result: &SweepResult) -> Result<Image> {
    let model = plot_model(result)?;
    let black = ColorRGB::BLACK;
    let grid = ColorRGB::gray(0.85);
    let mut canvas = Canvas(Image::filled(model.width, model.height, Rgba::opaque(ColorRGB::WHITE)));

    // legend across the top
    let mut lx = MARGIN_LEFT;
    for &mode in &model.legend {
        let c = mode_color(mode);
        canvas.rect(lx as i64, 14, lx as i64 + 17, 19, c);
        canvas.text(lx + 22, 13, mode.name(), black);
        lx += 22 + font::text_width(mode.name()) + 24;
    }

    for panel in &model.panels {
        let (x0, y0, x1, y1) = panel.area;
        for k in 1..4 {
            let gy = y0 + (y1 - y0) * k / 4;
            canvas.rect(x0 as i64, gy as i64, x1 as i64, gy as i64, grid);
        }
        canvas.rect(x0 as i64, y0 as i64, x1 as i64, y0 as i64, black);
        canvas.rect(x0 as i64, y1 as i64, x1 as i64, y1 as i64, black);
        canvas.rect(x0 as i64, y0 as i64, x0 as i64, y1 as i64, black);
        canvas.rect(x1 as i64, y0 as i64, x1 as i64, y1 as i64, black);

        canvas.text(
            x0 + (x1 - x0 - font::text_width(&panel.title)) / 2,
            y0 - 14,
            &panel.title,
            black,
        );
        let ymax = format!("{:.3e}", panel.y_range.1);
        let ymin = format!("{:.3e}", panel.y_range.0);
        canvas.text(x0.saturating_sub(font::text_width(&ymax) + 4), y0, &ymax, black);
        canvas.text(
            x0.saturating_sub(font::text_width(&ymin) + 4),
            y1 - font::GLYPH_H,
            &ymin,
            black,
        );
        let xmin = format!("{:.3}", panel.x_range.0);
        let xmax = format!("{:.3}", panel.x_range.1);
        canvas.text(x0, y1 + 6, &xmin, black);
        canvas.text(x1.saturating_sub(font::text_width(&xmax)), y1 + 6, &xmax, black);
        canvas.text(
            x0 + (x1 - x0).saturating_sub(font::text_width(&panel.x_label)) / 2,
            y1 + 22,
            &panel.x_label,
            black,
        );

        for s in &panel.series {
            let c = mode_color(s.mode);
            for w in s.points.windows(2) {
                canvas.line(w[0], w[1], c);
            }
            for &(x, y) in &s.points {
                let (x, y) = (x.round() as i64, y.round() as i64);
                canvas.rect(x - 2, y - 2, x + 2, y + 2, c);
            }
        }
    }
    Ok(canvas.0)
}

/// Renders the sweep chart to an RGB PNG.
pub fn plot_curves(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    let img = render_plot(result)?;
    let path = path.as_ref();
    let data: Vec<u8> = img
        .pixels()
        .iter()
        .flat_map(|p| [p.r, p.g, p.b])
        .map(crate::image::quantize)
        .collect();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    crate::image::write_png(
        std::io::BufWriter::new(file),
        img.width(),
        img.height(),
        png::ColorType::Rgb,
        &data,
    )
}
