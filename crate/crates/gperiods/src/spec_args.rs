//! Render options shared by the command line and the HTTP API.

use clap::Args;
use gperiods_core::{Palette, RenderSpec, Rgba};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("invalid {flag}: {reason}")]
pub struct ArgError {
    pub flag: &'static str,
    pub reason: String,
}

fn arg_err(flag: &'static str, reason: impl Into<String>) -> ArgError {
    ArgError {
        flag,
        reason: reason.into(),
    }
}

/// `#rrggbb` or `#rrggbbaa` (leading `#` optional).
pub fn parse_color(s: &str) -> Option<Rgba> {
    let hex = s.trim().trim_start_matches('#');
    if !matches!(hex.len(), 6 | 8) || !hex.is_ascii() {
        return None;
    }
    let byte = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).ok();
    let alpha = if hex.len() == 8 { byte(6)? } else { 255 };
    Some(Rgba([byte(0)?, byte(2)?, byte(4)?, alpha]))
}

pub fn format_color(c: Rgba) -> String {
    let [r, g, b, a] = c.0;
    format!("#{r:02x}{g:02x}{b:02x}{a:02x}")
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderArgs {
    /// Canvas width in pixels.
    #[arg(long, default_value_t = 1024)]
    pub width: u32,
    /// Canvas height in pixels.
    #[arg(long, default_value_t = 1024)]
    pub height: u32,
    /// Empty border as a fraction of the half-size.
    #[arg(long, default_value_t = 0.05)]
    pub margin: f64,
    /// Point disk radius in pixels.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Background color, `#rrggbb[aa]`.
    #[arg(long, default_value = "#ffffff")]
    pub background: String,
    /// Comma-separated class colors; automatic hues when omitted.
    #[arg(long)]
    pub palette: Option<String>,
    /// Comma-separated class ids in drawing order (later on top).
    #[arg(long)]
    pub layer_order: Option<String>,
}

impl Default for RenderArgs {
    fn default() -> Self {
        Self {
            width: 1024,
            height: 1024,
            margin: 0.05,
            radius: 1.0,
            background: "#ffffff".into(),
            palette: None,
            layer_order: None,
        }
    }
}

impl RenderArgs {
    pub fn to_spec(&self) -> Result<RenderSpec, ArgError> {
        if self.width == 0 || self.height == 0 {
            return Err(arg_err("--width/--height", "dimensions must be positive"));
        }
        if !(0.0..1.0).contains(&self.margin) {
            return Err(arg_err("--margin", "must be in [0, 1)"));
        }
        if !(self.radius >= 0.0 && self.radius <= 64.0) {
            return Err(arg_err("--radius", "must be in [0, 64]"));
        }
        let background = parse_color(&self.background)
            .ok_or_else(|| arg_err("--background", format!("not a color: {}", self.background)))?;
        let palette = match &self.palette {
            None => Palette::Auto,
            Some(list) => Palette::Fixed(
                list.split(',')
                    .map(|s| parse_color(s).ok_or_else(|| arg_err("--palette", format!("not a color: {s}"))))
                    .collect::<Result<_, _>>()?,
            ),
        };
        let layer_order = match &self.layer_order {
            None => None,
            Some(list) => Some(
                list.split(',')
                    .map(|s| s.trim().parse::<u32>().map_err(|_| arg_err("--layer-order", format!("not a class id: {s}"))))
                    .collect::<Result<_, _>>()?,
            ),
        };
        Ok(RenderSpec {
            width: self.width,
            height: self.height,
            margin: self.margin,
            point_radius: self.radius,
            palette,
            background,
            layer_order,
        })
    }
}
