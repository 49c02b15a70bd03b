//! sRGB to CIELab conversion (D65 white, 2° observer).

use crate::grid::RgbImage;
use crate::scalar::Real;

// sRGB (linear) -> XYZ, D65.
const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.412_456_4, 0.357_576_1, 0.180_437_5],
    [0.212_672_9, 0.715_152_2, 0.072_175_0],
    [0.019_333_9, 0.119_192_0, 0.950_304_1],
];

const WHITE_D65: [f64; 3] = [0.950_47, 1.0, 1.088_83];

/// Per-pixel CIELab values with the dimensions of the source image.
#[derive(Debug, Clone, PartialEq)]
pub struct LabColorPlane<T> {
    width: u32,
    height: u32,
    values: Vec<[T; 3]>,
}

impl<T: Real> LabColorPlane<T> {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn values(&self) -> &[[T; 3]] {
        &self.values
    }

    pub fn at(&self, x: u32, y: u32) -> [T; 3] {
        self.values[y as usize * self.width as usize + x as usize]
    }
}

fn srgb_to_linear(c: u8) -> f64 {
    let v = f64::from(c) / 255.0;
    if v <= 0.040_45 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

fn lab_f<T: Real>(t: T) -> T {
    let delta = T::lit(6.0 / 29.0);
    if t > delta * delta * delta {
        t.cbrt()
    } else {
        t / (T::lit(3.0) * delta * delta) + T::lit(4.0 / 29.0)
    }
}

/// Converts one sRGB triple to (L, a, b).
pub fn srgb_to_lab<T: Real>(rgb: [u8; 3]) -> [T; 3] {
    let lin = rgb.map(srgb_to_linear);
    lab_from_linear(lin.map(T::lit))
}

fn lab_from_linear<T: Real>(lin: [T; 3]) -> [T; 3] {
    let mut xyz = [T::zero(); 3];
    for (row, out) in RGB_TO_XYZ.iter().zip(xyz.iter_mut()) {
        *out = T::lit(row[0]) * lin[0] + T::lit(row[1]) * lin[1] + T::lit(row[2]) * lin[2];
    }
    let fx = lab_f(xyz[0] / T::lit(WHITE_D65[0]));
    let fy = lab_f(xyz[1] / T::lit(WHITE_D65[1]));
    let fz = lab_f(xyz[2] / T::lit(WHITE_D65[2]));
    [
        T::lit(116.0) * fy - T::lit(16.0),
        T::lit(500.0) * (fx - fy),
        T::lit(200.0) * (fy - fz),
    ]
}

/// Converts a whole image. Dimensions are preserved.
pub fn to_lab<T: Real>(image: &RgbImage) -> LabColorPlane<T> {
    let lut: Vec<T> = (0..=255u8).map(|c| T::lit(srgb_to_linear(c))).collect();
    let values = image
        .pixels()
        .map(|[r, g, b]| lab_from_linear([lut[r as usize], lut[g as usize], lut[b as usize]]))
        .collect();
    LabColorPlane { width: image.width(), height: image.height(), values }
}

/// Euclidean distance between two Lab triples.
pub fn delta_e<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    let d0 = a[0] - b[0];
    let d1 = a[1] - b[1];
    let d2 = a[2] - b[2];
    (d0 * d0 + d1 * d1 + d2 * d2).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: [f64; 3], b: [f64; 3], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn black_and_white_endpoints() {
        let black: [f64; 3] = srgb_to_lab([0, 0, 0]);
        assert!(close(black, [0.0, 0.0, 0.0], 1e-9), "{black:?}");
        let white: [f64; 3] = srgb_to_lab([255, 255, 255]);
        assert!(close(white, [100.0, 0.0, 0.0], 1e-3), "{white:?}");
    }

    // Reference values from scikit-image `rgb2lab` (D65, 2°).
    #[test]
    fn matches_reference_converter() {
        let cases: [([u8; 3], [f64; 3]); 5] = [
            ([255, 0, 0], [53.240_587_94, 80.092_308_23, 67.202_751_04]),
            ([0, 255, 0], [87.735_099_49, -86.183_029_74, 83.179_703_18]),
            ([0, 0, 255], [32.295_672_57, 79.185_590_91, -107.857_300_2]),
            ([128, 128, 128], [53.585_013_45, -0.001_472_65, 0.002_791_45]),
            ([12, 200, 77], [70.815_744_60, -66.543_544_23, 48.873_178_45]),
        ];
        for (rgb, want) in cases {
            let got: [f64; 3] = srgb_to_lab(rgb);
            assert!(close(got, want, 0.1), "{rgb:?}: {got:?} vs {want:?}");
            let got32: [f32; 3] = srgb_to_lab(rgb);
            assert!(close(got32.map(f64::from), want, 0.1), "f32 {rgb:?}: {got32:?}");
        }
    }

    #[test]
    fn plane_keeps_dimensions() {
        let img = RgbImage::from_fn(5, 3, |x, y| [x as u8 * 40, y as u8 * 80, 0]);
        let lab = to_lab::<f32>(&img);
        assert_eq!((lab.width(), lab.height(), lab.values().len()), (5, 3, 15));
        let direct: [f32; 3] = srgb_to_lab(img.pixel(4, 2));
        assert_eq!(lab.at(4, 2), direct);
    }
}
