//! PNG encoding and layer export.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use gperiods_core::raster::{render_layer, RgbaImage};
use gperiods_core::{PeriodSet, RenderSpec};
use rayon::prelude::*;
use serde::Serialize;

use crate::export::ParamsJson;
use crate::spec_args::format_color;

/// 8-bit RGBA PNG bytes. Deterministic for identical images.
pub fn encode_png(img: &RgbaImage) -> Vec<u8> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, img.width, img.height);
        enc.set_color(png::ColorType::Rgba);
        enc.set_depth(png::BitDepth::Eight);
        enc.set_compression(png::Compression::Fast);
        let mut writer = enc.write_header().expect("in-memory PNG header");
        writer.write_image_data(&img.data).expect("in-memory PNG data");
    }
    out
}

/// Decodes an 8-bit RGBA PNG.
pub fn decode_png(bytes: &[u8]) -> io::Result<RgbaImage> {
    let invalid = |e: png::DecodingError| io::Error::new(io::ErrorKind::InvalidData, e);
    let decoder = png::Decoder::new(bytes);
    let mut reader = decoder.read_info().map_err(invalid)?;
    let mut data = vec![0; reader.output_buffer_size()];
    let info = reader.next_frame(&mut data).map_err(invalid)?;
    if info.color_type != png::ColorType::Rgba || info.bit_depth != png::BitDepth::Eight {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "expected 8-bit RGBA"));
    }
    data.truncate(info.buffer_size());
    Ok(RgbaImage {
        width: info.width,
        height: info.height,
        data,
    })
}

pub fn layer_file_name(class: u32) -> String {
    format!("layer_{class}.png")
}

/// Everything needed to reproduce a render.
#[derive(Debug, Clone, Serialize)]
pub struct RenderSidecar {
    pub params: ParamsJson,
    pub c: u64,
    pub mode: gperiods_core::ColoringMode,
    pub class_count: usize,
    pub width: u32,
    pub height: u32,
    pub margin: f64,
    pub point_radius: f64,
    pub background: String,
    pub palette: Vec<String>,
    pub layer_order: Vec<u32>,
    pub layers: Vec<String>,
}

impl RenderSidecar {
    pub fn new(set: &PeriodSet, spec: &RenderSpec, layers: Vec<String>) -> gperiods_core::Result<Self> {
        Ok(Self {
            params: (&set.params).into(),
            c: set.c,
            mode: set.mode,
            class_count: set.class_count,
            width: spec.width,
            height: spec.height,
            margin: spec.margin,
            point_radius: spec.point_radius,
            background: format_color(spec.background),
            palette: spec
                .palette
                .colors(set.class_count)?
                .into_iter()
                .map(format_color)
                .collect(),
            layer_order: spec.order(set.class_count)?,
            layers,
        })
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LayerError {
    #[error(transparent)]
    Render(#[from] gperiods_core::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Writes one transparent PNG per class plus `render.json` into `dir`.
/// Layers are rendered in parallel on the current rayon pool.
pub fn export_layers(set: &PeriodSet, spec: &RenderSpec, dir: &Path) -> Result<Vec<PathBuf>, LayerError> {
    // surface palette/order problems before touching the filesystem
    let sidecar = RenderSidecar::new(
        set,
        spec,
        (0..set.class_count as u32).map(layer_file_name).collect(),
    )?;
    fs::create_dir_all(dir)?;
    let paths = (0..set.class_count as u32)
        .into_par_iter()
        .map(|class| -> Result<PathBuf, LayerError> {
            let layer = render_layer(set, class, spec)?;
            let path = dir.join(layer_file_name(class));
            fs::write(&path, encode_png(&layer))?;
            Ok(path)
        })
        .collect::<Result<Vec<_>, _>>()?;
    sidecar.write(&dir.join("render.json"))?;
    Ok(paths)
}
