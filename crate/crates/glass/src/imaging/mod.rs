//! Image decoding, the in-memory raster type, bilinear resize, and crop
//! extraction.

mod manifest;
mod synth;

pub use manifest::{
    load_manifest, save_manifest, scan_directory, split_dataset, DatasetManifest, Label,
    ManifestEntry, Split,
};
pub use synth::{synth_base, synth_corpus, SynthParams};

use crate::error::{GlassError, Result};
use crate::CROP_SIDE;
use std::path::Path;

/// Decoded RGB raster: channel-major `f32` values in `[0, 1]`.
///
/// `data[c * h * w + y * w + x]` is channel `c` of the pixel at row `y`,
/// column `x`. Channel order is R, G, B.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuf {
    pub height: usize,
    pub width: usize,
    pub data: Vec<f32>,
}

impl ImageBuf {
    pub const CHANNELS: usize = 3;

    pub fn zeros(height: usize, width: usize) -> Self {
        ImageBuf {
            height,
            width,
            data: vec![0.0; Self::CHANNELS * height * width],
        }
    }

    pub fn filled(height: usize, width: usize, value: f32) -> Self {
        ImageBuf {
            height,
            width,
            data: vec![value; Self::CHANNELS * height * width],
        }
    }

    #[inline]
    pub fn get(&self, c: usize, y: usize, x: usize) -> f32 {
        self.data[(c * self.height + y) * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, c: usize, y: usize, x: usize, v: f32) {
        self.data[(c * self.height + y) * self.width + x] = v;
    }

    /// One channel plane as a slice of `height * width` values.
    pub fn channel(&self, c: usize) -> &[f32] {
        let plane = self.height * self.width;
        &self.data[c * plane..(c + 1) * plane]
    }

    /// Checks the structural invariants: exact buffer length and every
    /// value finite in `[0, 1]`.
    pub fn validate(&self) -> Result<()> {
        let expect = Self::CHANNELS * self.height * self.width;
        if self.data.len() != expect {
            return Err(GlassError::ShapeMismatch(format!(
                "image buffer holds {} values, expected {expect}",
                self.data.len()
            )));
        }
        if !self.data.iter().all(|v| v.is_finite() && (0.0..=1.0).contains(v)) {
            return Err(GlassError::InvalidArgument(
                "image values must be finite and within [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Compact 8-bit interleaved-RGB raster, used to hold decoded datasets in
/// memory without the 4x cost of `f32` planes.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster8 {
    pub height: usize,
    pub width: usize,
    pub rgb: Vec<u8>,
}

impl Raster8 {
    pub fn to_image_buf(&self) -> ImageBuf {
        let (h, w) = (self.height, self.width);
        let mut out = ImageBuf::zeros(h, w);
        let plane = h * w;
        for i in 0..plane {
            for c in 0..3 {
                out.data[c * plane + i] = self.rgb[i * 3 + c] as f32 / 255.0;
            }
        }
        out
    }
}

/// Decodes a PNG or PPM/PGM file to an [`ImageBuf`], mapping 8-bit value
/// `v` to `v / 255`.
///
/// Accepts any dimensions; pipeline entry points separately enforce the
/// 224-pixel minimum via [`ensure_min_dims`].
pub fn decode_image(path: &Path) -> Result<ImageBuf> {
    Ok(decode_raster8(path)?.to_image_buf())
}

/// Same as [`decode_image`] but keeps the 8-bit interleaved form.
pub fn decode_raster8(path: &Path) -> Result<Raster8> {
    let reader = image::ImageReader::open(path).map_err(|e| GlassError::io(path, e))?;
    let decoded = reader
        .decode()
        .map_err(|e| GlassError::Decode {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?
        .to_rgb8();
    Ok(Raster8 {
        height: decoded.height() as usize,
        width: decoded.width() as usize,
        rgb: decoded.into_raw(),
    })
}

/// Writes an [`ImageBuf`] as an 8-bit RGB PNG, rounding `v * 255`.
pub fn save_png(img: &ImageBuf, path: &Path) -> Result<()> {
    let (h, w) = (img.height, img.width);
    let plane = h * w;
    let mut rgb = vec![0u8; plane * 3];
    for i in 0..plane {
        for c in 0..3 {
            let v = img.data[c * plane + i];
            rgb[i * 3 + c] = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
        }
    }
    let buf = image::RgbImage::from_raw(w as u32, h as u32, rgb)
        .expect("raw buffer length matches dimensions");
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| GlassError::Decode {
            path: path.to_path_buf(),
            reason: format!("encode failed: {e}"),
        })
}

/// Rejects images smaller than 224 pixels in either dimension.
pub fn ensure_min_dims(img: &ImageBuf) -> Result<()> {
    if img.height < CROP_SIDE || img.width < CROP_SIDE {
        return Err(GlassError::ImageTooSmall {
            height: img.height,
            width: img.width,
            min: CROP_SIDE,
        });
    }
    Ok(())
}

/// Bilinear resize with the half-pixel-center convention.
///
/// Output index `d` samples source coordinate
/// `s = (d + 0.5) * (in / out) - 0.5`, clamped to `[0, in - 1]`; the four
/// neighbouring pixels are blended per channel. Resizing to the identical
/// size reproduces the input bit for bit because every sample lands exactly
/// on a pixel center.
pub fn resize_bilinear(img: &ImageBuf, out_h: usize, out_w: usize) -> ImageBuf {
    assert!(out_h >= 1 && out_w >= 1, "output dimensions must be positive");
    let (in_h, in_w) = (img.height, img.width);
    let map = |d: usize, out: usize, inn: usize| -> (usize, usize, f32) {
        let s = ((d as f64 + 0.5) * inn as f64 / out as f64 - 0.5).clamp(0.0, (inn - 1) as f64);
        let lo = s.floor() as usize;
        let hi = (lo + 1).min(inn - 1);
        (lo, hi, (s - lo as f64) as f32)
    };
    let xs: Vec<(usize, usize, f32)> = (0..out_w).map(|d| map(d, out_w, in_w)).collect();
    let ys: Vec<(usize, usize, f32)> = (0..out_h).map(|d| map(d, out_h, in_h)).collect();

    let mut out = ImageBuf::zeros(out_h, out_w);
    for c in 0..ImageBuf::CHANNELS {
        let src = img.channel(c);
        let dst_plane = c * out_h * out_w;
        for (oy, &(y0, y1, wy)) in ys.iter().enumerate() {
            let row0 = &src[y0 * in_w..y0 * in_w + in_w];
            let row1 = &src[y1 * in_w..y1 * in_w + in_w];
            let dst_row = dst_plane + oy * out_w;
            for (ox, &(x0, x1, wx)) in xs.iter().enumerate() {
                let top = row0[x0] * (1.0 - wx) + row0[x1] * wx;
                let bot = row1[x0] * (1.0 - wx) + row1[x1] * wx;
                out.data[dst_row + ox] = top * (1.0 - wy) + bot * wy;
            }
        }
    }
    out
}

/// Top-left corner of one fixed-size square crop window, in original
/// resolution pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CropRect {
    pub top: usize,
    pub left: usize,
    pub side: usize,
}

impl CropRect {
    pub fn new(top: usize, left: usize) -> Self {
        CropRect {
            top,
            left,
            side: CROP_SIDE,
        }
    }

    /// True when the two windows share at least one pixel.
    pub fn overlaps(&self, other: &CropRect) -> bool {
        let row_overlap = self.top < other.top + other.side && other.top < self.top + self.side;
        let col_overlap = self.left < other.left + other.side && other.left < self.left + self.side;
        row_overlap && col_overlap
    }
}

/// Copies the crop window out of `img` with no resampling: output pixel
/// `(c, i, j)` equals input pixel `(c, top + i, left + j)`.
pub fn extract_crop(img: &ImageBuf, rect: &CropRect) -> Result<ImageBuf> {
    let side = rect.side;
    if rect.top + side > img.height || rect.left + side > img.width {
        return Err(GlassError::CropOutOfBounds {
            top: rect.top,
            left: rect.left,
            side,
            height: img.height,
            width: img.width,
        });
    }
    let mut out = ImageBuf::zeros(side, side);
    for c in 0..ImageBuf::CHANNELS {
        let src = img.channel(c);
        for i in 0..side {
            let src_off = (rect.top + i) * img.width + rect.left;
            let dst_off = (c * side + i) * side;
            out.data[dst_off..dst_off + side].copy_from_slice(&src[src_off..src_off + side]);
        }
    }
    Ok(out)
}

/// Upscales so the short side reaches 224 pixels, preserving aspect ratio.
/// Images already large enough are returned unchanged.
pub fn upscale_to_min(img: &ImageBuf) -> ImageBuf {
    let short = img.height.min(img.width);
    if short >= CROP_SIDE {
        return img.clone();
    }
    let scale = CROP_SIDE as f64 / short as f64;
    let out_h = ((img.height as f64 * scale).round() as usize).max(CROP_SIDE);
    let out_w = ((img.width as f64 * scale).round() as usize).max(CROP_SIDE);
    resize_bilinear(img, out_h, out_w)
}
