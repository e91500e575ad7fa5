//! Dataset manifests: directory scanning, JSON (de)serialization, and
//! deterministic stratified splitting.

use crate::error::{GlassError, Result};
use crate::rng::SeedRng;
use crate::SCHEMA_VERSION;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Real,
    Fake,
}

impl Label {
    /// Class index used by the model: real = 0, fake = 1.
    pub fn index(self) -> usize {
        match self {
            Label::Real => 0,
            Label::Fake => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

pub const SPLITS: [Split; 3] = [Split::Train, Split::Val, Split::Test];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub label: Label,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub entries: Vec<ManifestEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratios: Option<[f64; 3]>,
}

impl DatasetManifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Self {
        DatasetManifest {
            schema_version: SCHEMA_VERSION,
            entries,
            seed: None,
            ratios: None,
        }
    }

    /// Entries assigned to one split.
    pub fn split_entries(&self, split: Split) -> Vec<&ManifestEntry> {
        self.entries
            .iter()
            .filter(|e| e.split == Some(split))
            .collect()
    }
}

/// Builds a manifest from `<root>/real/*.{png,ppm}` and
/// `<root>/fake/*.{png,ppm}`, sorted by path for a stable order.
pub fn scan_directory(root: &Path) -> Result<DatasetManifest> {
    let mut entries = Vec::new();
    for (dir, label) in [("real", Label::Real), ("fake", Label::Fake)] {
        let class_dir = root.join(dir);
        if !class_dir.is_dir() {
            continue;
        }
        let mut paths = Vec::new();
        for item in std::fs::read_dir(&class_dir).map_err(|e| GlassError::io(&class_dir, e))? {
            let path = item.map_err(|e| GlassError::io(&class_dir, e))?.path();
            let ext = path
                .extension()
                .and_then(|e| e.to_str())
                .map(|e| e.to_ascii_lowercase());
            if matches!(ext.as_deref(), Some("png") | Some("ppm") | Some("pgm")) {
                paths.push(path.to_string_lossy().into_owned());
            }
        }
        paths.sort();
        entries.extend(paths.into_iter().map(|path| ManifestEntry {
            path,
            label,
            split: None,
        }));
    }
    if entries.is_empty() {
        return Err(GlassError::Dataset(format!(
            "no .png/.ppm files under {}/real or {}/fake",
            root.display(),
            root.display()
        )));
    }
    Ok(DatasetManifest::new(entries))
}

pub fn save_manifest(manifest: &DatasetManifest, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(manifest)?;
    std::fs::write(path, json).map_err(|e| GlassError::io(path, e))
}

pub fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| GlassError::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Deterministic stratified split.
///
/// Entries are grouped by class, canonically ordered by path, shuffled with
/// a per-class substream of `seed`, and divided by the largest-remainder
/// rule, so each split's per-class count differs from `ratio * class_size`
/// by less than one sample.
pub fn split_dataset(
    manifest: &DatasetManifest,
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<DatasetManifest> {
    let r = [ratios.0, ratios.1, ratios.2];
    if r.iter().any(|&f| f <= 0.0) {
        return Err(GlassError::InvalidArgument(
            "split ratios must all be positive".into(),
        ));
    }
    if (r.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(GlassError::InvalidArgument(format!(
            "split ratios must sum to 1, got {}",
            r.iter().sum::<f64>()
        )));
    }
    if manifest.entries.is_empty() {
        return Err(GlassError::Dataset("cannot split an empty manifest".into()));
    }

    let mut out = manifest.clone();
    out.seed = Some(seed);
    out.ratios = Some(r);

    for (class_id, label) in [Label::Real, Label::Fake].into_iter().enumerate() {
        let mut idx: Vec<usize> = manifest
            .entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.label == label)
            .map(|(i, _)| i)
            .collect();
        if idx.is_empty() {
            continue;
        }
        if idx.len() < SPLITS.len() {
            return Err(GlassError::Dataset(format!(
                "class {label:?} has {} samples, fewer than the {} splits",
                idx.len(),
                SPLITS.len()
            )));
        }
        // Canonical order first so the result does not depend on the
        // incoming entry order.
        idx.sort_by(|&a, &b| manifest.entries[a].path.cmp(&manifest.entries[b].path));
        let mut rng = SeedRng::substream(seed, class_id as u64);
        rng.shuffle(&mut idx);

        let counts = largest_remainder(idx.len(), &r);
        let mut cursor = 0;
        for (split, &count) in SPLITS.iter().zip(counts.iter()) {
            for &i in &idx[cursor..cursor + count] {
                out.entries[i].split = Some(*split);
            }
            cursor += count;
        }
    }
    Ok(out)
}

/// Integer apportionment of `n` items by fractions `fracs`: floor first,
/// then hand the leftover items to the largest fractional parts (ties go to
/// the earlier split).
fn largest_remainder(n: usize, fracs: &[f64; 3]) -> [usize; 3] {
    let mut counts = [0usize; 3];
    let mut rema: Vec<(usize, f64)> = Vec::with_capacity(3);
    let mut assigned = 0;
    for (i, &f) in fracs.iter().enumerate() {
        let exact = f * n as f64;
        counts[i] = exact.floor() as usize;
        assigned += counts[i];
        rema.push((i, exact - exact.floor()));
    }
    rema.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for k in 0..n - assigned {
        counts[rema[k % 3].0] += 1;
    }
    counts
}
