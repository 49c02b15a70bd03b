use std::collections::BTreeSet;
use std::time::Instant;

use tracegrow_core::eval::{final_score, iou, ScoreInput};
use tracegrow_core::trace::decode_mask_png_checked;
use tracegrow_core::*;

// Written with PIL as a mode-"P" image using the 256-entry VOC color map.
const PASCAL_STYLE_GT: &[u8] = include_bytes!("fixtures/pascal_style_gt.png");

#[test]
fn decodes_a_pascal_style_annotation() {
    let gt = decode_mask_png_checked(PASCAL_STYLE_GT, &Palette::pascal_voc()).unwrap();
    assert_eq!((gt.width(), gt.height()), (32, 24));
    let count = |v: u8| gt.labels().iter().filter(|&&l| l == v).count();
    assert_eq!((count(0), count(12), count(15), count(255)), (401, 111, 196, 60));
    assert_eq!(gt.label(12, 10), 15);
    assert_eq!(gt.label(25, 15), 12);
    assert_eq!(gt.label(5, 3), UNLABELED);
    let again = decode_mask_png(&encode_mask_png(&gt, &Palette::pascal_voc()).unwrap()).unwrap();
    assert_eq!(again, gt);
}

/// Paints the ground truth's regions with distinct colors, scribbles inside
/// each region and checks the grown mask recovers the regions.
#[test]
fn scribbles_recover_flat_regions() {
    let gt = decode_mask_png(PASCAL_STYLE_GT).unwrap();
    let color = |l: u8| match l {
        0 => [40, 90, 40],
        12 => [200, 140, 60],
        15 => [230, 200, 180],
        _ => [40, 90, 40],
    };
    // Void pixels sit on the person's outline; give them the background color.
    let image = RgbImage::from_fn(32, 24, |x, y| color(gt.label(x, y)));
    let strokes = vec![
        Stroke::line(0, 1, (1, 1), (30, 1)),
        Stroke::line(15, 2, (9, 8), (16, 14)),
        Stroke::line(12, 2, (22, 19), (28, 19)),
    ];
    let trace = raster_from_strokes(32, 24, &strokes).unwrap();
    let out = refine(&image, &trace, &RgrConfig64::with_seed(3)).unwrap();
    let report: IouReport64 = iou(&out.mask, &gt, &BTreeSet::from([0, 12, 15])).unwrap();
    assert!(report.mean_iou > 0.95, "{report:?}");
    let score = final_score(ScoreInput { mean_iou: report.mean_iou, elapsed: 30.0, objects: 2 }).unwrap();
    assert_eq!(score.bonus, 2.0);
}

#[test]
fn f32_and_f64_agree_on_clear_images() {
    let image = RgbImage::from_fn(48, 32, |x, y| if (x / 12 + y / 16) % 2 == 0 { [250, 250, 250] } else { [10, 10, 120] });
    let mut strokes = Vec::new();
    for (i, (x, y)) in [(6, 8), (18, 8), (30, 8), (42, 8), (6, 24), (18, 24), (30, 24), (42, 24)].iter().enumerate() {
        let cat = ((i % 4 + i / 4) % 2) as u8 + 1;
        strokes.push(Stroke::pencil(cat, 2, vec![(*x - 2, *y), (*x + 2, *y)]));
    }
    let trace = raster_from_strokes(48, 32, &strokes).unwrap();
    let a = refine(&image, &trace, &RgrConfig64::with_seed(11)).unwrap();
    let b = refine(&image, &trace, &RgrConfig32::with_seed(11)).unwrap();
    assert_eq!(a.mask, b.mask);
}

#[test]
fn pascal_sized_refine_is_fast() {
    let (w, h) = (500u32, 375u32);
    let image = RgbImage::from_fn(w, h, |x, y| {
        let cell = (x / 100 + 5 * (y / 75)) as u8;
        [cell.wrapping_mul(37), cell.wrapping_mul(91), (((x ^ y) & 15) as u8).wrapping_add(cell.wrapping_mul(13))]
    });
    let mut strokes = Vec::new();
    for cy in 0..5 {
        for cx in 0..5 {
            let cat = ((cx + 5 * cy) % 20) as u8;
            let (x0, y0) = (cx * 100 + 20, cy * 75 + 20);
            strokes.push(Stroke::pencil(cat, 2, vec![(x0, y0), (x0 + 50, y0 + 30)]));
        }
    }
    let trace = raster_from_strokes(w, h, &strokes).unwrap();
    let start = Instant::now();
    let out = refine(&image, &trace, &RgrConfig64::with_seed(1)).unwrap();
    let took = start.elapsed();
    eprintln!("500x375 refine: {took:?}");
    assert_eq!(out.likelihood.num_categories(), 20);
    assert!(took.as_secs_f64() <= 2.0);
}
