//! Deterministic rasterization of colored point sets into RGBA8 buffers.
//!
//! The canvas is origin-centered with uniform scale and the imaginary axis
//! pointing up. Every point is stamped as a filled integer disk. Classes are
//! drawn as layers: within one layer a pixel is either the class color or
//! transparent, and layers are alpha-composited over the background in layer
//! order, so a flat render is exactly the composite of the exported layers.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::periods::PeriodSet;
use crate::{Error, Result};

/// Straight (non-premultiplied) RGBA8 color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rgba(pub [u8; 4]);

impl Rgba {
    pub const TRANSPARENT: Rgba = Rgba([0, 0, 0, 0]);
    pub const WHITE: Rgba = Rgba([255, 255, 255, 255]);
    pub const BLACK: Rgba = Rgba([0, 0, 0, 255]);

    pub fn alpha(self) -> u8 {
        self.0[3]
    }

    /// `self` composited over `dst` ("source over"), integer arithmetic.
    pub fn over(self, dst: Rgba) -> Rgba {
        let sa = self.0[3] as u32;
        if sa == 0 {
            return dst;
        }
        if sa == 255 {
            return self;
        }
        let da = dst.0[3] as u32;
        let dw = da * (255 - sa); // dst weight, scaled by 255
        let out_a255 = sa * 255 + dw; // out alpha scaled by 255
        if out_a255 == 0 {
            return Rgba::TRANSPARENT;
        }
        let mut out = [0u8; 4];
        for i in 0..3 {
            let num = self.0[i] as u32 * sa * 255 + dst.0[i] as u32 * dw;
            out[i] = ((num + out_a255 / 2) / out_a255) as u8;
        }
        out[3] = ((out_a255 + 127) / 255) as u8;
        Rgba(out)
    }

    /// HSV color with all components in `[0, 1]`, opaque.
    pub fn from_hsv(h: f64, s: f64, v: f64) -> Rgba {
        let h6 = (h - libm::floor(h)) * 6.0;
        let sector = libm::floor(h6) as u32 % 6;
        let f = h6 - libm::floor(h6);
        let p = v * (1.0 - s);
        let q = v * (1.0 - s * f);
        let t = v * (1.0 - s * (1.0 - f));
        let (r, g, b) = match sector {
            0 => (v, t, p),
            1 => (q, v, p),
            2 => (p, v, t),
            3 => (p, q, v),
            4 => (t, p, v),
            _ => (v, p, q),
        };
        let to8 = |x: f64| libm::round(x.clamp(0.0, 1.0) * 255.0) as u8;
        Rgba([to8(r), to8(g), to8(b), 255])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Palette {
    /// Class `i` of `k` gets hue `i / k` at full saturation, value 0.85.
    #[default]
    Auto,
    Fixed(Vec<Rgba>),
}

impl Palette {
    pub const AUTO_VALUE: f64 = 0.85;

    pub fn colors(&self, class_count: usize) -> Result<Vec<Rgba>> {
        match self {
            Palette::Auto => Ok((0..class_count)
                .map(|i| Rgba::from_hsv(i as f64 / class_count as f64, 1.0, Self::AUTO_VALUE))
                .collect()),
            Palette::Fixed(colors) if colors.len() >= class_count => Ok(colors.clone()),
            Palette::Fixed(colors) => Err(Error::PaletteTooSmall {
                needed: class_count,
                got: colors.len(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    pub width: u32,
    pub height: u32,
    /// Fraction of the half-size left empty around the plot.
    pub margin: f64,
    /// Disk radius in pixels; 0 stamps single pixels.
    pub point_radius: f64,
    pub palette: Palette,
    pub background: Rgba,
    /// Class ids in drawing order, later over earlier. `None` means ascending.
    pub layer_order: Option<Vec<u32>>,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self {
            width: 1024,
            height: 1024,
            margin: 0.05,
            point_radius: 1.0,
            palette: Palette::Auto,
            background: Rgba::WHITE,
            layer_order: None,
        }
    }
}

impl RenderSpec {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidDimension {
                width: self.width,
                height: self.height,
            });
        }
        Ok(())
    }

    /// Drawing order of the class ids, checked to be a permutation.
    pub fn order(&self, class_count: usize) -> Result<Vec<u32>> {
        match &self.layer_order {
            None => Ok((0..class_count as u32).collect()),
            Some(order) => {
                let mut seen = vec![false; class_count];
                let ok = order.len() == class_count
                    && order.iter().all(|&id| {
                        (id as usize) < class_count && !core::mem::replace(&mut seen[id as usize], true)
                    });
                if ok {
                    Ok(order.clone())
                } else {
                    Err(Error::InvalidLayerOrder { class_count })
                }
            }
        }
    }

    /// Pixels per unit for a plot of the given extent.
    pub fn scale(&self, extent: f64) -> f64 {
        let half = self.width.min(self.height) as f64 / 2.0;
        half * (1.0 - self.margin) / extent
    }
}

/// Plot extent: largest modulus, at least 1.
pub fn extent_of(values: impl IntoIterator<Item = Complex64>) -> f64 {
    values.into_iter().map(|z| z.norm()).fold(1.0, f64::max)
}

/// Continuous canvas coordinates `(x, y)` of a value, y pointing down in pixel
/// space (so positive imaginary parts land above the center).
pub fn map_to_canvas(value: Complex64, extent: f64, spec: &RenderSpec) -> (f64, f64) {
    let s = spec.scale(extent);
    (
        spec.width as f64 / 2.0 + value.re * s,
        spec.height as f64 / 2.0 - value.im * s,
    )
}

/// Pixel containing the continuous position.
pub fn pixel_of(pos: (f64, f64)) -> (i64, i64) {
    (libm::floor(pos.0) as i64, libm::floor(pos.1) as i64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbaImage {
    pub width: u32,
    pub height: u32,
    /// Row-major RGBA8.
    pub data: Vec<u8>,
}

impl RgbaImage {
    pub fn filled(width: u32, height: u32, color: Rgba) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize * 4);
        for _ in 0..width as usize * height as usize {
            data.extend_from_slice(&color.0);
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> Rgba {
        let i = (y as usize * self.width as usize + x as usize) * 4;
        Rgba([self.data[i], self.data[i + 1], self.data[i + 2], self.data[i + 3]])
    }

    #[inline]
    fn set_index(&mut self, pixel: usize, color: Rgba) {
        self.data[pixel * 4..pixel * 4 + 4].copy_from_slice(&color.0);
    }

    /// Composites `layer` over `self` pixelwise.
    pub fn composite_over(&mut self, layer: &RgbaImage) {
        assert_eq!((self.width, self.height), (layer.width, layer.height));
        for (dst, src) in self.data.chunks_exact_mut(4).zip(layer.data.chunks_exact(4)) {
            let out = Rgba([src[0], src[1], src[2], src[3]])
                .over(Rgba([dst[0], dst[1], dst[2], dst[3]]));
            dst.copy_from_slice(&out.0);
        }
    }
}

/// Integer offsets of a disk of the given radius.
fn disk_offsets(radius: f64) -> Vec<(i64, i64)> {
    let r2 = libm::floor(radius.max(0.0) * radius.max(0.0)) as i64;
    let r = libm::floor(radius.max(0.0)) as i64;
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r2 {
                out.push((dx, dy));
            }
        }
    }
    out
}

/// Pixel indices covered by the disks of `points`, deduplicated, ascending.
fn stamp_mask(centers: &[(i64, i64)], disk: &[(i64, i64)], width: u32, height: u32, scratch: &mut [bool]) -> Vec<usize> {
    let mut touched = Vec::new();
    for &(cx, cy) in centers {
        for &(dx, dy) in disk {
            let (x, y) = (cx + dx, cy + dy);
            if x < 0 || y < 0 || x >= width as i64 || y >= height as i64 {
                continue;
            }
            let idx = y as usize * width as usize + x as usize;
            if !scratch[idx] {
                scratch[idx] = true;
                touched.push(idx);
            }
        }
    }
    for &idx in &touched {
        scratch[idx] = false;
    }
    touched.sort_unstable();
    touched
}

/// Prepared drawing job shared by the flat and layered paths.
struct Plan {
    colors: Vec<Rgba>,
    order: Vec<u32>,
    /// Pixel centers per class.
    centers: Vec<Vec<(i64, i64)>>,
    disk: Vec<(i64, i64)>,
}

fn plan(points: &[(Complex64, u32)], class_count: usize, spec: &RenderSpec) -> Result<Plan> {
    spec.validate()?;
    let colors = spec.palette.colors(class_count)?;
    let order = spec.order(class_count)?;
    let extent = extent_of(points.iter().map(|p| p.0));
    let mut centers = vec![Vec::new(); class_count];
    for &(z, class) in points {
        centers[class as usize].push(pixel_of(map_to_canvas(z, extent, spec)));
    }
    Ok(Plan {
        colors,
        order,
        centers,
        disk: disk_offsets(spec.point_radius),
    })
}

/// Flat render of arbitrary colored points; classes must be `< class_count`.
pub fn rasterize_points(points: &[(Complex64, u32)], class_count: usize, spec: &RenderSpec) -> Result<RgbaImage> {
    let plan = plan(points, class_count, spec)?;
    let mut img = RgbaImage::filled(spec.width, spec.height, spec.background);
    let mut scratch = vec![false; spec.width as usize * spec.height as usize];
    for &class in &plan.order {
        let color = plan.colors[class as usize];
        let mask = stamp_mask(&plan.centers[class as usize], &plan.disk, spec.width, spec.height, &mut scratch);
        for idx in mask {
            let i = idx * 4;
            let dst = Rgba([img.data[i], img.data[i + 1], img.data[i + 2], img.data[i + 3]]);
            img.set_index(idx, color.over(dst));
        }
    }
    Ok(img)
}

/// Transparent layer holding only the disks of one class.
pub fn render_layer_points(points: &[(Complex64, u32)], class_count: usize, class: u32, spec: &RenderSpec) -> Result<RgbaImage> {
    let plan = plan(points, class_count, spec)?;
    let mut img = RgbaImage::filled(spec.width, spec.height, Rgba::TRANSPARENT);
    let mut scratch = vec![false; spec.width as usize * spec.height as usize];
    let color = plan.colors[class as usize];
    for idx in stamp_mask(&plan.centers[class as usize], &plan.disk, spec.width, spec.height, &mut scratch) {
        img.set_index(idx, color);
    }
    Ok(img)
}

pub fn rasterize(set: &PeriodSet, spec: &RenderSpec) -> Result<RgbaImage> {
    rasterize_points(&set.colored_points(), set.class_count, spec)
}

pub fn render_layer(set: &PeriodSet, class: u32, spec: &RenderSpec) -> Result<RgbaImage> {
    render_layer_points(&set.colored_points(), set.class_count, class, spec)
}

/// Background with the given layers composited in order.
pub fn composite(width: u32, height: u32, background: Rgba, layers: &[&RgbaImage]) -> RgbaImage {
    let mut img = RgbaImage::filled(width, height, background);
    for layer in layers {
        img.composite_over(layer);
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periods::ColoringMode;
    use alloc::collections::BTreeSet;

    fn spec(w: u32, h: u32) -> RenderSpec {
        RenderSpec {
            width: w,
            height: h,
            ..RenderSpec::default()
        }
    }

    #[test]
    fn canvas_mapping() {
        let s = RenderSpec {
            margin: 0.1,
            ..spec(200, 100)
        };
        assert_eq!(map_to_canvas(Complex64::new(0.0, 0.0), 2.0, &s), (100.0, 50.0));
        // half = 50, usable = 45 pixels for |z| = extent
        assert_eq!(map_to_canvas(Complex64::new(2.0, 0.0), 2.0, &s), (145.0, 50.0));
        assert_eq!(map_to_canvas(Complex64::new(0.0, 2.0), 2.0, &s), (100.0, 5.0));
    }

    #[test]
    fn over_blending() {
        let red = Rgba([255, 0, 0, 255]);
        assert_eq!(red.over(Rgba::WHITE), red);
        assert_eq!(Rgba::TRANSPARENT.over(red), red);
        let half = Rgba([0, 0, 255, 128]);
        let out = half.over(Rgba::WHITE);
        assert_eq!(out.alpha(), 255);
        assert_eq!(out.0[2], 255);
        assert!((126..=128).contains(&out.0[0]));
        assert_eq!(half.over(Rgba::TRANSPARENT), half);
    }

    #[test]
    fn auto_palette_is_distinct() {
        let colors = Palette::Auto.colors(6).unwrap();
        assert_eq!(colors.iter().collect::<BTreeSet<_>>().len(), 6);
        assert_eq!(colors[0], Rgba([217, 0, 0, 255]));
        assert!(matches!(
            Palette::Fixed(vec![Rgba::BLACK]).colors(2),
            Err(Error::PaletteTooSmall { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn empty_points_give_background() {
        let s = spec(8, 8);
        let img = rasterize_points(&[], 0, &s).unwrap();
        assert_eq!(img, RgbaImage::filled(8, 8, Rgba::WHITE));
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(matches!(
            rasterize_points(&[], 0, &spec(0, 8)),
            Err(Error::InvalidDimension { .. })
        ));
    }

    #[test]
    fn layer_order_must_be_permutation() {
        let s = RenderSpec {
            layer_order: Some(vec![0, 0]),
            ..spec(4, 4)
        };
        assert!(s.order(2).is_err());
        let s = RenderSpec {
            layer_order: Some(vec![1, 0]),
            ..spec(4, 4)
        };
        assert_eq!(s.order(2).unwrap(), [1, 0]);
    }

    #[test]
    fn twelve_five_nested_diamonds() {
        // c = 3: the outer diamond 2 G(4,5) is class 0, the inner one class 1
        let set = PeriodSet::compute(12, 5, 3, ColoringMode::Standard).unwrap();
        for o in &set.orbits {
            let outer = (o.value.norm() - 2.0).abs() < 1e-9;
            assert_eq!(o.color_class == 0, outer, "{o:?}");
        }
        let s = RenderSpec {
            point_radius: 0.0,
            ..spec(101, 101)
        };
        let img = rasterize(&set, &s).unwrap();
        let colors = Palette::Auto.colors(2).unwrap();
        let extent = 2.0;
        let at = |z: Complex64| {
            let (x, y) = pixel_of(map_to_canvas(z, extent, &s));
            img.get(x as u32, y as u32)
        };
        assert_eq!(at(Complex64::new(2.0, 0.0)), colors[0]);
        assert_eq!(at(Complex64::new(0.0, -2.0)), colors[0]);
        let inner = set.orbits.iter().find(|o| o.color_class == 1).unwrap();
        assert_eq!(at(inner.value), colors[1]);
    }

    #[test]
    fn layers_composite_to_flat() {
        let set = PeriodSet::compute(63, 2, 9, ColoringMode::Standard).unwrap();
        let s = RenderSpec {
            palette: Palette::Fixed(
                (0..set.class_count as u8)
                    .map(|i| Rgba([i * 40, 255 - i * 30, 7 * i, 100 + i * 20]))
                    .collect(),
            ),
            point_radius: 2.0,
            ..spec(64, 48)
        };
        let flat = rasterize(&set, &s).unwrap();
        let layers: Vec<RgbaImage> = (0..set.class_count as u32)
            .map(|c| render_layer(&set, c, &s).unwrap())
            .collect();
        let refs: Vec<&RgbaImage> = layers.iter().collect();
        assert_eq!(composite(64, 48, s.background, &refs), flat);
    }
}
