//! Local crop sampler: the grid-size rule, strategy selection, and the two
//! crop placement strategies.
//!
//! For an `H x W` image the grid size is `G = min(floor(min(H, W) / 224), 8)`,
//! partitioning the image into `G^2` cells of `floor(H/G) x floor(W/G)`
//! pixels (leftover pixels on the bottom/right edges belong to no cell).
//! With `n` crops requested, the sampler picks one of two strategies:
//!
//! - `G^2 >= n`: **stratified grid** — `n` distinct cells are chosen by a
//!   partial Fisher-Yates shuffle and one crop is placed uniformly inside
//!   each, which makes the crops pairwise disjoint;
//! - `G^2 < n`: **uniform over the entire image** — each crop's top-left
//!   corner is drawn independently from all valid positions, overlaps
//!   allowed.

use crate::error::{GlassError, Result};
use crate::imaging::{extract_crop, CropRect, ImageBuf};
use crate::rng::SeedRng;
use crate::{CROP_SIDE, MAX_GRID};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Uniform random placement over the whole image; overlaps permitted.
    UniformEntire,
    /// One crop per distinct grid cell; crops never overlap.
    StratifiedGrid,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Strategy::UniformEntire => write!(f, "entire"),
            Strategy::StratifiedGrid => write!(f, "grid"),
        }
    }
}

/// Resolved sampling plan for one `(H, W, n)` triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridPlan {
    pub grid_size: usize,
    pub cell_height: usize,
    pub cell_width: usize,
    pub strategy: Strategy,
    pub n_crops: usize,
}

/// `G = min(floor(min(H, W) / 224), 8)`.
pub fn grid_size(height: usize, width: usize) -> Result<usize> {
    if height < CROP_SIDE || width < CROP_SIDE {
        return Err(GlassError::ImageTooSmall {
            height,
            width,
            min: CROP_SIDE,
        });
    }
    Ok((height.min(width) / CROP_SIDE).min(MAX_GRID))
}

/// Chooses the strategy for `n` crops on an `H x W` image.
pub fn plan(height: usize, width: usize, n: usize) -> Result<GridPlan> {
    if n == 0 {
        return Err(GlassError::InvalidArgument(
            "crop count must be at least 1".into(),
        ));
    }
    let g = grid_size(height, width)?;
    let strategy = if g * g >= n {
        Strategy::StratifiedGrid
    } else {
        Strategy::UniformEntire
    };
    Ok(GridPlan {
        grid_size: g,
        cell_height: height / g,
        cell_width: width / g,
        strategy,
        n_crops: n,
    })
}

/// `n` crop windows with top-left corners uniform over all valid positions.
///
/// Tops are drawn from the inclusive range `[0, H - 224]` and lefts from
/// `[0, W - 224]`, independently per crop.
pub fn sample_uniform(height: usize, width: usize, n: usize, rng: &mut SeedRng) -> Vec<CropRect> {
    (0..n)
        .map(|_| {
            let top = rng.int_in(0, height - CROP_SIDE);
            let left = rng.int_in(0, width - CROP_SIDE);
            CropRect::new(top, left)
        })
        .collect()
}

/// One crop in each of `n` distinct grid cells.
///
/// Cell indices are chosen by a partial Fisher-Yates shuffle (uniform over
/// cell subsets); within cell `(r, c)` the top is uniform over
/// `[r * cell_h, r * cell_h + cell_h - 224]` and the left analogously, so
/// each crop stays inside its own cell.
pub fn sample_stratified(
    plan: &GridPlan,
    height: usize,
    width: usize,
    rng: &mut SeedRng,
) -> Result<Vec<CropRect>> {
    if plan.strategy != Strategy::StratifiedGrid {
        return Err(GlassError::InvalidArgument(
            "sample_stratified called with a uniform-entire plan".into(),
        ));
    }
    let g = plan.grid_size;
    debug_assert!(plan.n_crops <= g * g);
    debug_assert!(height / g == plan.cell_height && width / g == plan.cell_width);

    let mut cells: Vec<usize> = (0..g * g).collect();
    rng.partial_shuffle(&mut cells, plan.n_crops);

    Ok(cells[..plan.n_crops]
        .iter()
        .map(|&cell| {
            let (row, col) = (cell / g, cell % g);
            let origin_row = row * plan.cell_height;
            let origin_col = col * plan.cell_width;
            let top = rng.int_in(origin_row, origin_row + plan.cell_height - CROP_SIDE);
            let left = rng.int_in(origin_col, origin_col + plan.cell_width - CROP_SIDE);
            CropRect::new(top, left)
        })
        .collect())
}

/// Plans, samples, and extracts `n` crops at original resolution.
///
/// Returns the crop images and their windows in sampling order.
pub fn sample_crops(
    img: &ImageBuf,
    n: usize,
    rng: &mut SeedRng,
) -> Result<(Vec<ImageBuf>, Vec<CropRect>)> {
    let plan = plan(img.height, img.width, n)?;
    let rects = sample_rects(&plan, img.height, img.width, rng)?;
    let crops = rects
        .iter()
        .map(|r| extract_crop(img, r))
        .collect::<Result<Vec<_>>>()?;
    Ok((crops, rects))
}

/// Rect-only form of [`sample_crops`], shared with the Monte Carlo
/// coverage oracle so both paths exercise identical placement code.
pub fn sample_rects(
    plan: &GridPlan,
    height: usize,
    width: usize,
    rng: &mut SeedRng,
) -> Result<Vec<CropRect>> {
    match plan.strategy {
        Strategy::UniformEntire => Ok(sample_uniform(height, width, plan.n_crops, rng)),
        Strategy::StratifiedGrid => sample_stratified(plan, height, width, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_size_formula_cases() {
        assert_eq!(grid_size(224, 224).unwrap(), 1);
        assert_eq!(grid_size(1920, 1080).unwrap(), 4);
        assert_eq!(grid_size(5120, 2880).unwrap(), 8); // capped
        assert_eq!(grid_size(447, 9000).unwrap(), 1);
        assert!(grid_size(223, 500).is_err());
    }

    #[test]
    fn cell_dims_always_at_least_crop_side() {
        for (h, w) in [
            (224, 224),
            (256, 256),
            (640, 480),
            (1024, 768),
            (1280, 720),
            (1920, 1080),
            (2560, 1440),
            (3840, 2160),
            (449, 673),
            (7680, 4320),
        ] {
            let p = plan(h, w, 1).unwrap();
            assert!(p.cell_height >= CROP_SIDE, "{h}x{w}");
            assert!(p.cell_width >= CROP_SIDE, "{h}x{w}");
        }
    }

    #[test]
    fn strategy_selection_matches_rule() {
        // G=2, G^2=4
        assert_eq!(
            plan(640, 480, 4).unwrap().strategy,
            Strategy::StratifiedGrid
        );
        assert_eq!(plan(640, 480, 6).unwrap().strategy, Strategy::UniformEntire);
        // G=1 forces uniform for n >= 2
        assert_eq!(plan(224, 224, 2).unwrap().strategy, Strategy::UniformEntire);
        // n=1 is always stratified
        assert_eq!(
            plan(224, 224, 1).unwrap().strategy,
            Strategy::StratifiedGrid
        );
    }

    #[test]
    fn uniform_single_position_image() {
        let mut rng = SeedRng::new(0);
        let rects = sample_uniform(224, 224, 3, &mut rng);
        assert_eq!(rects.len(), 3);
        assert!(rects.iter().all(|r| r.top == 0 && r.left == 0));
    }

    #[test]
    fn uniform_rects_within_bounds() {
        let mut rng = SeedRng::new(5);
        for rect in sample_uniform(300, 400, 200, &mut rng) {
            assert!(rect.top <= 76);
            assert!(rect.left <= 176);
        }
    }

    #[test]
    fn uniform_is_deterministic_per_seed() {
        let a = sample_uniform(500, 600, 8, &mut SeedRng::new(7));
        let b = sample_uniform(500, 600, 8, &mut SeedRng::new(7));
        let c = sample_uniform(500, 600, 8, &mut SeedRng::new(8));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn stratified_448_forces_cell_origins() {
        let p = plan(448, 448, 4).unwrap();
        assert_eq!(p.strategy, Strategy::StratifiedGrid);
        let mut rects = sample_stratified(&p, 448, 448, &mut SeedRng::new(3)).unwrap();
        rects.sort_by_key(|r| (r.top, r.left));
        let expect: Vec<CropRect> = [(0, 0), (0, 224), (224, 0), (224, 224)]
            .iter()
            .map(|&(t, l)| CropRect::new(t, l))
            .collect();
        assert_eq!(rects, expect);
    }

    #[test]
    fn stratified_rects_are_pairwise_disjoint() {
        for seed in 0..50 {
            let p = plan(1920, 1080, 2).unwrap();
            let rects = sample_stratified(&p, 1920, 1080, &mut SeedRng::new(seed)).unwrap();
            assert!(!rects[0].overlaps(&rects[1]), "seed {seed}: {rects:?}");

            let p16 = plan(7680, 4320, 16).unwrap();
            assert_eq!(p16.strategy, Strategy::StratifiedGrid);
            let rects16 = sample_stratified(&p16, 7680, 4320, &mut SeedRng::new(seed)).unwrap();
            for i in 0..rects16.len() {
                for j in i + 1..rects16.len() {
                    assert!(!rects16[i].overlaps(&rects16[j]));
                }
            }
        }
    }

    #[test]
    fn stratified_exhausts_cells_at_full_count() {
        let p = plan(900, 700, 9).unwrap();
        assert_eq!(p.grid_size, 3);
        let rects = sample_stratified(&p, 900, 700, &mut SeedRng::new(1)).unwrap();
        let mut cells: Vec<(usize, usize)> = rects
            .iter()
            .map(|r| (r.top / p.cell_height, r.left / p.cell_width))
            .collect();
        cells.sort_unstable();
        cells.dedup();
        assert_eq!(cells.len(), 9);
    }

    #[test]
    fn stratified_rejects_uniform_plan() {
        let p = plan(224, 224, 2).unwrap();
        assert!(sample_stratified(&p, 224, 224, &mut SeedRng::new(0)).is_err());
    }

    #[test]
    fn sample_crops_matches_extract_crop() {
        let mut img = ImageBuf::zeros(300, 280);
        for (i, v) in img.data.iter_mut().enumerate() {
            *v = ((i * 31) % 997) as f32 / 997.0;
        }
        let (crops, rects) = sample_crops(&img, 3, &mut SeedRng::new(11)).unwrap();
        assert_eq!(crops.len(), 3);
        for (crop, rect) in crops.iter().zip(&rects) {
            assert_eq!(crop, &extract_crop(&img, rect).unwrap());
            assert_eq!((crop.height, crop.width), (CROP_SIDE, CROP_SIDE));
        }
    }

    #[test]
    fn changing_seed_changes_some_rect() {
        let img = ImageBuf::zeros(500, 500);
        let (_, a) = sample_crops(&img, 4, &mut SeedRng::new(1)).unwrap();
        let (_, b) = sample_crops(&img, 4, &mut SeedRng::new(2)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn uniform_positions_pass_chi_square() {
        // 1e5 draws over the 77 valid tops of a 300-pixel extent, 7 bins of
        // 11 positions each; reject only below the p=0.001 critical value.
        let mut rng = SeedRng::new(12345);
        let mut bins = [0u32; 7];
        let draws = 100_000;
        for rect in sample_uniform(300, 300, draws, &mut rng) {
            bins[rect.top / 11] += 1;
        }
        let expected = draws as f64 / bins.len() as f64;
        let chi2: f64 = bins
            .iter()
            .map(|&o| {
                let d = o as f64 - expected;
                d * d / expected
            })
            .sum();
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let dist = ChiSquared::new((bins.len() - 1) as f64).unwrap();
        let p_value = 1.0 - dist.cdf(chi2);
        assert!(p_value > 0.001, "chi2 {chi2}, p {p_value}");
    }
}
