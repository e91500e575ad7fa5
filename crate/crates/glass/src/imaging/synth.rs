//! Synthetic desk-scale corpus.
//!
//! "Real" images are band-limited smooth textures: a random mixture of
//! low-frequency cosines plus low-amplitude white noise. "Fake" images add
//! small checkerboard patches whose alternation period is 2 pixels. A
//! 2-pixel period sits above the Nyquist limit of a 224-pixel global resize
//! for any source of 448 pixels or more, so the artifact survives in
//! original-resolution crops but averages away in the resized global view;
//! that is the property the two-stream classifier is meant to exploit.

use super::{save_png, DatasetManifest, ImageBuf, Label, ManifestEntry, Split};
use crate::error::{GlassError, Result};
use crate::rng::SeedRng;
use crate::SCHEMA_VERSION;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthParams {
    /// Training images per class.
    pub train_per_class: usize,
    /// Validation images per class.
    pub val_per_class: usize,
    /// Test images per class.
    pub test_per_class: usize,
    pub height: usize,
    pub width: usize,
    pub seed: u64,
    /// Side of each checkerboard artifact patch.
    pub patch_size: usize,
    /// Number of artifact patches per fake image.
    pub patch_count: usize,
    /// Peak amplitude of the checkerboard, in [0,1] pixel units.
    pub amplitude: f32,
    /// Peak amplitude of the per-pixel white noise in both classes.
    pub noise_amp: f32,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            train_per_class: 250,
            val_per_class: 50,
            test_per_class: 100,
            height: 448,
            width: 448,
            seed: 0,
            patch_size: 32,
            patch_count: 12,
            amplitude: 0.06,
            noise_amp: 0.01,
        }
    }
}

const COSINE_COMPONENTS: usize = 6;
const COSINE_TOTAL_AMP: f64 = 0.25;
const CHANNEL_TINT: f64 = 0.03;

/// One band-limited smooth base image.
///
/// The luminance pattern is shared across channels; each channel adds a
/// small constant tint and independent white noise. All values stay well
/// inside [0, 1] so later artifact patches never clip.
pub fn synth_base(height: usize, width: usize, noise_amp: f32, rng: &mut SeedRng) -> ImageBuf {
    // Random low-frequency cosine mixture, 0.5 to 3.5 cycles per axis.
    let mut comps = Vec::with_capacity(COSINE_COMPONENTS);
    let mut raw_amps = [0.0f64; COSINE_COMPONENTS];
    let mut amp_sum = 0.0;
    for a in raw_amps.iter_mut() {
        *a = 0.5 + rng.unit_f64();
        amp_sum += *a;
    }
    for raw in raw_amps {
        let fy = 0.5 + 3.0 * rng.unit_f64();
        let fx = 0.5 + 3.0 * rng.unit_f64();
        let phase = std::f64::consts::TAU * rng.unit_f64();
        let amp = COSINE_TOTAL_AMP * raw / amp_sum;
        comps.push((fy, fx, phase, amp));
    }

    let mut base = vec![0.0f32; height * width];
    for y in 0..height {
        for x in 0..width {
            let mut v = 0.5;
            for &(fy, fx, phase, amp) in &comps {
                let arg = std::f64::consts::TAU
                    * (fy * y as f64 / height as f64 + fx * x as f64 / width as f64)
                    + phase;
                v += amp * arg.cos();
            }
            base[y * width + x] = v as f32;
        }
    }

    let mut img = ImageBuf::zeros(height, width);
    let plane = height * width;
    for c in 0..ImageBuf::CHANNELS {
        let tint = (CHANNEL_TINT * (2.0 * rng.unit_f64() - 1.0)) as f32;
        for i in 0..plane {
            let noise = noise_amp * (2.0 * rng.unit_f64() as f32 - 1.0);
            img.data[c * plane + i] = (base[i] + tint + noise).clamp(0.0, 1.0);
        }
    }
    img
}

/// Stamps `patch_count` checkerboard patches onto `img` in place.
///
/// Patch corners are aligned to even pixel coordinates so a 2x bilinear
/// downscale averages each +amp/-amp pair exactly to zero.
pub fn apply_artifact_patches(img: &mut ImageBuf, params: &SynthParams, rng: &mut SeedRng) {
    let (h, w, ps) = (img.height, img.width, params.patch_size);
    assert!(h >= ps && w >= ps, "patch larger than image");
    let plane = h * w;
    for _ in 0..params.patch_count {
        let top = 2 * rng.int_in(0, (h - ps) / 2);
        let left = 2 * rng.int_in(0, (w - ps) / 2);
        for dy in 0..ps {
            for dx in 0..ps {
                let sign = if (dy + dx) % 2 == 0 { 1.0 } else { -1.0 };
                let delta = sign * params.amplitude;
                let at = (top + dy) * w + left + dx;
                for c in 0..ImageBuf::CHANNELS {
                    let v = &mut img.data[c * plane + at];
                    *v = (*v + delta).clamp(0.0, 1.0);
                }
            }
        }
    }
}

/// Generates the full corpus under `out_dir` and writes `manifest.json`.
///
/// Layout is `<out_dir>/real/*.png` and `<out_dir>/fake/*.png`; the split
/// assignment (train/val/test) is fixed at generation time from the
/// per-split counts. Every image gets its own RNG substream, so the corpus
/// bytes are a pure function of `params`.
pub fn synth_corpus(params: &SynthParams, out_dir: &Path) -> Result<DatasetManifest> {
    if params.height < 448 || params.width < 448 {
        return Err(GlassError::InvalidArgument(format!(
            "synthetic corpus requires height and width >= 448, got {}x{}",
            params.height, params.width
        )));
    }
    let per_class = params.train_per_class + params.val_per_class + params.test_per_class;
    if params.train_per_class == 0 {
        return Err(GlassError::InvalidArgument(
            "train_per_class must be at least 1".into(),
        ));
    }

    let mut entries = Vec::with_capacity(2 * per_class);
    for (class_id, label) in [Label::Real, Label::Fake].into_iter().enumerate() {
        let class_name = match label {
            Label::Real => "real",
            Label::Fake => "fake",
        };
        let class_dir = out_dir.join(class_name);
        std::fs::create_dir_all(&class_dir).map_err(|e| GlassError::io(&class_dir, e))?;

        for i in 0..per_class {
            let mut rng =
                SeedRng::substream(params.seed, (class_id * per_class + i) as u64);
            let mut img = synth_base(params.height, params.width, params.noise_amp, &mut rng);
            if label == Label::Fake {
                apply_artifact_patches(&mut img, params, &mut rng);
            }
            let split = if i < params.train_per_class {
                Split::Train
            } else if i < params.train_per_class + params.val_per_class {
                Split::Val
            } else {
                Split::Test
            };
            let path = class_dir.join(format!("{class_name}_{i:05}.png"));
            save_png(&img, &path)?;
            entries.push(ManifestEntry {
                path: path.to_string_lossy().into_owned(),
                label,
                split: Some(split),
            });
        }
    }

    let manifest = DatasetManifest {
        schema_version: SCHEMA_VERSION,
        entries,
        seed: Some(params.seed),
        ratios: None,
    };
    super::save_manifest(&manifest, &out_dir.join("manifest.json"))?;
    Ok(manifest)
}

/// Mean absolute horizontal first difference, a cheap high-frequency
/// energy measure used to verify that artifacts survive at full resolution.
pub fn horizontal_energy(img: &ImageBuf) -> f64 {
    let (h, w) = (img.height, img.width);
    let mut total = 0.0f64;
    for c in 0..ImageBuf::CHANNELS {
        let plane = img.channel(c);
        for y in 0..h {
            for x in 1..w {
                total += (plane[y * w + x] - plane[y * w + x - 1]).abs() as f64;
            }
        }
    }
    total / (ImageBuf::CHANNELS * h * (w - 1)) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::resize_bilinear;

    fn paired(seed: u64) -> (ImageBuf, ImageBuf, SynthParams) {
        let params = SynthParams::default();
        let mut rng = SeedRng::substream(seed, 0);
        let real = synth_base(448, 448, params.noise_amp, &mut rng);
        let mut fake = real.clone();
        apply_artifact_patches(&mut fake, &params, &mut rng);
        (real, fake, params)
    }

    #[test]
    fn artifacts_vanish_in_global_resize() {
        // 20 paired images: after the 2x downscale the checkerboard should
        // cancel, leaving only sub-0.01 residue.
        let mut worst = 0.0f64;
        for seed in 0..20 {
            let (real, fake, _) = paired(seed);
            let real_small = resize_bilinear(&real, 224, 224);
            let fake_small = resize_bilinear(&fake, 224, 224);
            let mad = real_small
                .data
                .iter()
                .zip(&fake_small.data)
                .map(|(a, b)| (a - b).abs() as f64)
                .sum::<f64>()
                / real_small.data.len() as f64;
            worst = worst.max(mad);
        }
        assert!(worst < 0.01, "max per-pixel MAD after downscale: {worst}");
    }

    #[test]
    fn artifacts_double_high_frequency_energy_in_crops() {
        use crate::imaging::{extract_crop, CropRect};
        let mut checked = 0;
        for seed in 0..20 {
            let (real, fake, params) = paired(100 + seed);
            // find a crop that definitely contains a patch: scan the
            // difference image for the first artifact pixel
            let diff_at = fake
                .data
                .iter()
                .zip(&real.data)
                .position(|(f, r)| (f - r).abs() > params.amplitude / 2.0)
                .expect("fake image contains artifacts");
            let plane = 448 * 448;
            let y = (diff_at % plane) / 448;
            let x = diff_at % 448;
            let rect = CropRect::new(y.min(448 - 224), x.min(448 - 224));
            let real_crop = extract_crop(&real, &rect).unwrap();
            let fake_crop = extract_crop(&fake, &rect).unwrap();
            let ratio = horizontal_energy(&fake_crop) / horizontal_energy(&real_crop);
            assert!(ratio >= 2.0, "seed {seed}: energy ratio {ratio}");
            checked += 1;
        }
        assert_eq!(checked, 20);
    }

    #[test]
    fn corpus_regeneration_is_byte_identical() {
        let params = SynthParams {
            train_per_class: 2,
            val_per_class: 1,
            test_per_class: 1,
            seed: 42,
            ..SynthParams::default()
        };
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let man_a = synth_corpus(&params, dir_a.path()).unwrap();
        let man_b = synth_corpus(&params, dir_b.path()).unwrap();
        assert_eq!(man_a.entries.len(), 8);
        for (ea, eb) in man_a.entries.iter().zip(&man_b.entries) {
            let ba = std::fs::read(&ea.path).unwrap();
            let bb = std::fs::read(&eb.path).unwrap();
            assert_eq!(ba, bb, "bytes differ for {}", ea.path);
            assert_eq!(ea.label, eb.label);
            assert_eq!(ea.split, eb.split);
        }
    }

    #[test]
    fn corpus_split_counts_match_params() {
        let params = SynthParams {
            train_per_class: 3,
            val_per_class: 2,
            test_per_class: 1,
            seed: 1,
            ..SynthParams::default()
        };
        let dir = tempfile::tempdir().unwrap();
        let man = synth_corpus(&params, dir.path()).unwrap();
        for label in [Label::Real, Label::Fake] {
            let count = |s| {
                man.entries
                    .iter()
                    .filter(|e| e.label == label && e.split == Some(s))
                    .count()
            };
            assert_eq!(count(Split::Train), 3);
            assert_eq!(count(Split::Val), 2);
            assert_eq!(count(Split::Test), 1);
        }
    }

    #[test]
    fn undersized_corpus_rejected() {
        let params = SynthParams {
            height: 300,
            ..SynthParams::default()
        };
        let dir = tempfile::tempdir().unwrap();
        assert!(synth_corpus(&params, dir.path()).is_err());
    }
}
