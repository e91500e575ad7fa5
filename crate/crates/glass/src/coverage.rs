//! Expected coverage of `n` sampled crops: exact analytics, a closed-form
//! approximation, and a Monte Carlo oracle.
//!
//! For the stratified grid strategy crops never overlap, so coverage is
//! exactly `100 * n * p^2 / (H * W)`. For uniform placement over the whole
//! image, the chance that pixel `(x, y)` is inside one crop factorizes into
//! row and column terms: `p_xy = a_y * b_x / ((H - p + 1) * (W - p + 1))`,
//! where `a_y` counts the crop offsets that cover row `y` (and `b_x` the
//! same along the width). Expected coverage is then the double sum of
//! `1 - (1 - p_xy)^n` over all pixels, normalized to a percentage. Bounding
//! by Jensen's inequality gives the cheaper closed form
//! `100 * (1 - (1 - p^2 / (W * H))^n)`, an upper bound on the exact value.

use crate::error::{GlassError, Result};
use crate::rng::SeedRng;
use crate::sampler::{plan, sample_rects, GridPlan, Strategy};
use crate::CROP_SIDE;
use serde::{Deserialize, Serialize};

/// Default pixel cap for the Monte Carlo bitmap.
pub const DEFAULT_MC_PIXEL_CAP: usize = 32_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageQuery {
    pub height: usize,
    pub width: usize,
    pub crop_side: usize,
    pub n: usize,
}

impl CoverageQuery {
    pub fn new(height: usize, width: usize, n: usize) -> Self {
        CoverageQuery {
            height,
            width,
            crop_side: CROP_SIDE,
            n,
        }
    }

    fn check(&self) -> Result<()> {
        if self.height < self.crop_side || self.width < self.crop_side {
            return Err(GlassError::ImageTooSmall {
                height: self.height,
                width: self.width,
                min: self.crop_side,
            });
        }
        if self.n == 0 {
            return Err(GlassError::InvalidArgument(
                "crop count must be at least 1".into(),
            ));
        }
        if self.crop_side != CROP_SIDE {
            // The grid-size rule is defined in units of the fixed 224 crop;
            // other sides would need their own plan rule.
            return Err(GlassError::InvalidArgument(format!(
                "crop side must be {CROP_SIDE}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactSum,
    ClosedFormApprox,
    GridExact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageResult {
    /// Expected covered-area percentage in `[0, 100]`.
    pub percent: f64,
    pub strategy: Strategy,
    pub method: Method,
    /// Standard error of the mean; only set by the Monte Carlo estimator.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
}

/// Number of valid crop offsets `t` in `[0, extent - p]` with
/// `t <= y <= t + p - 1`, i.e. the count of crop positions covering row
/// (or column) `y`.
///
/// Equals `min(y, extent - p) - max(0, y - p + 1) + 1`; for
/// `extent >= 2p - 1` this reduces to the familiar ramp/plateau/ramp
/// piecewise form, and it remains correct for `p <= extent < 2p - 1` where
/// the plateau would be ill-defined.
pub fn row_cover_count(y: usize, extent: usize, p: usize) -> Result<usize> {
    if extent < p {
        return Err(GlassError::InvalidArgument(format!(
            "extent {extent} shorter than crop side {p}"
        )));
    }
    if y >= extent {
        return Err(GlassError::InvalidArgument(format!(
            "row {y} out of range for extent {extent}"
        )));
    }
    let hi = y.min(extent - p);
    let lo = y.saturating_sub(p - 1);
    Ok(hi - lo + 1)
}

/// Exact expected coverage.
///
/// Dispatches on the sampling plan: grid strategy coverage is closed-form
/// (no overlaps are possible); uniform-entire coverage evaluates the
/// per-pixel inclusion double sum in double precision.
pub fn expected_coverage_exact(q: &CoverageQuery) -> Result<CoverageResult> {
    q.check()?;
    let plan = plan(q.height, q.width, q.n)?;
    match plan.strategy {
        Strategy::StratifiedGrid => Ok(CoverageResult {
            percent: grid_percent(q),
            strategy: Strategy::StratifiedGrid,
            method: Method::GridExact,
            std_error: None,
        }),
        Strategy::UniformEntire => {
            let (h, w, p) = (q.height, q.width, q.crop_side);
            let ay: Vec<f64> = (0..h)
                .map(|y| row_cover_count(y, h, p).expect("y < h") as f64)
                .collect();
            let bx: Vec<f64> = (0..w)
                .map(|x| row_cover_count(x, w, p).expect("x < w") as f64)
                .collect();
            let denom = ((h - p + 1) * (w - p + 1)) as f64;
            let n = q.n as i32;
            let mut total = 0.0f64;
            for &a in &ay {
                for &b in &bx {
                    let pxy = a * b / denom;
                    total += 1.0 - (1.0 - pxy).powi(n);
                }
            }
            Ok(CoverageResult {
                percent: 100.0 * total / (h as f64 * w as f64),
                strategy: Strategy::UniformEntire,
                method: Method::ExactSum,
                std_error: None,
            })
        }
    }
}

fn grid_percent(q: &CoverageQuery) -> f64 {
    100.0 * (q.n * q.crop_side * q.crop_side) as f64 / (q.height as f64 * q.width as f64)
}

/// Closed-form approximation `100 * (1 - (1 - p^2 / (W*H))^n)`.
///
/// An upper bound on the exact uniform-entire value (Jensen's inequality:
/// `(1 - t)^n` is convex in `t`).
pub fn expected_coverage_approx(q: &CoverageQuery) -> Result<CoverageResult> {
    q.check()?;
    let plan = plan(q.height, q.width, q.n)?;
    let area_frac =
        (q.crop_side * q.crop_side) as f64 / (q.width as f64 * q.height as f64);
    Ok(CoverageResult {
        percent: 100.0 * (1.0 - (1.0 - area_frac).powi(q.n as i32)),
        strategy: plan.strategy,
        method: Method::ClosedFormApprox,
        std_error: None,
    })
}

/// Monte Carlo coverage oracle: runs the real sampler on an `H x W`
/// stamp map and averages the covered fraction over `trials`.
///
/// Each trial uses substream `t` of `seed`, so trials are independent and
/// the result is reproducible. Returns the mean percentage and its standard
/// error. Errors out if `H * W` exceeds `pixel_cap` (grid-strategy queries
/// of that size are closed-form exact anyway).
pub fn mc_coverage(
    q: &CoverageQuery,
    trials: usize,
    seed: u64,
    pixel_cap: usize,
) -> Result<CoverageResult> {
    q.check()?;
    if trials == 0 {
        return Err(GlassError::InvalidArgument("trials must be >= 1".into()));
    }
    let pixels = q.height * q.width;
    if pixels > pixel_cap {
        return Err(GlassError::BitmapTooLarge {
            pixels,
            cap: pixel_cap,
        });
    }
    let plan = plan(q.height, q.width, q.n)?;

    // Stamp map: a cell is covered in trial t iff stamp[i] == t + 1.
    // Avoids clearing the whole map between trials.
    let mut stamps: Vec<u32> = vec![0; pixels];
    let mut fractions = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut rng = SeedRng::substream(seed, trial as u64);
        let rects = sample_rects(&plan, q.height, q.width, &mut rng)?;
        let mark = trial as u32 + 1;
        let mut covered = 0usize;
        for rect in rects {
            for dy in 0..rect.side {
                let row = (rect.top + dy) * q.width + rect.left;
                for s in &mut stamps[row..row + rect.side] {
                    if *s != mark {
                        *s = mark;
                        covered += 1;
                    }
                }
            }
        }
        fractions.push(covered as f64 / pixels as f64);
    }

    let mean = fractions.iter().sum::<f64>() / trials as f64;
    let var = fractions
        .iter()
        .map(|f| (f - mean) * (f - mean))
        .sum::<f64>()
        / trials as f64;
    let std_error = 100.0 * (var / trials as f64).sqrt();
    Ok(CoverageResult {
        percent: 100.0 * mean,
        strategy: plan.strategy,
        method: Method::MonteCarlo,
        std_error: Some(std_error),
    })
}

/// One cell of a coverage table.
#[derive(Debug, Clone, Serialize)]
pub struct CoverageCell {
    pub height: usize,
    pub width: usize,
    pub n: usize,
    pub strategy: Strategy,
    /// Exact percentage rounded half-away-from-zero to one decimal.
    pub percent: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverageTable {
    pub sizes: Vec<(usize, usize)>,
    pub ns: Vec<usize>,
    pub cells: Vec<CoverageCell>,
}

/// Image sizes of the reference coverage table, as `(height, width)`.
pub fn reference_sizes() -> Vec<(usize, usize)> {
    vec![
        (224, 224),
        (256, 256),
        (480, 640),
        (768, 1024),
        (720, 1280),
        (1080, 1920),
        (1440, 2560),
        (2160, 3840),
        (2880, 5120),
        (4320, 7680),
    ]
}

/// Crop counts of the reference coverage table: even n from 2 to 16.
pub fn reference_ns() -> Vec<usize> {
    (1..=8).map(|k| 2 * k).collect()
}

/// Round half away from zero to one decimal place.
pub fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// Evaluates [`expected_coverage_exact`] over a size/crop-count grid.
pub fn coverage_table(sizes: &[(usize, usize)], ns: &[usize]) -> Result<CoverageTable> {
    let mut cells = Vec::with_capacity(sizes.len() * ns.len());
    for &(h, w) in sizes {
        for &n in ns {
            let q = CoverageQuery::new(h, w, n);
            let r = expected_coverage_exact(&q)?;
            cells.push(CoverageCell {
                height: h,
                width: w,
                n,
                strategy: r.strategy,
                percent: round1(r.percent),
            });
        }
    }
    Ok(CoverageTable {
        sizes: sizes.to_vec(),
        ns: ns.to_vec(),
        cells,
    })
}

impl CoverageTable {
    /// CSV with one row per cell: `height,width,n,strategy,percent`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("height,width,n,strategy,percent\n");
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{:.1}\n",
                c.height, c.width, c.n, c.strategy, c.percent
            ));
        }
        out
    }

    /// Aligned markdown grid, one row per image size, annotated with the
    /// strategy of each cell.
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| Image Size |");
        for n in &self.ns {
            out.push_str(&format!(" n={n} |"));
        }
        out.push('\n');
        out.push_str("|---|");
        for _ in &self.ns {
            out.push_str("---|");
        }
        out.push('\n');
        for &(h, w) in &self.sizes {
            out.push_str(&format!("| {w} x {h} |"));
            for &n in &self.ns {
                let cell = self
                    .cells
                    .iter()
                    .find(|c| c.height == h && c.width == w && c.n == n)
                    .expect("cell exists");
                out.push_str(&format!(" {:.1} ({}) |", cell.percent, cell.strategy));
            }
            out.push('\n');
        }
        out
    }
}
