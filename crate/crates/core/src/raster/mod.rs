//! Raster grayscale images, the watershed vertex-placement pipeline, and
//! random pixel sampling.

mod pgm;
mod watershed;

pub use pgm::{encode_pgm, load_pgm, parse_pgm, save_pgm, PgmFormat};
pub use watershed::{assign_watershed_lines, watershed_segments};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{GacError, Result};
use crate::geometry::Point2;

/// Row-major grayscale image with intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(GacError::EmptyInput("image has no pixels"));
        }
        if width.checked_mul(height) != Some(pixels.len()) {
            return Err(GacError::InvalidParameter(format!(
                "{width}x{height} image needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        if let Some(i) = pixels.iter().position(|p| !(0.0..=1.0).contains(p)) {
            return Err(GacError::InvalidParameter(format!(
                "pixel {i} has intensity {} outside [0, 1]",
                pixels[i]
            )));
        }
        Ok(RasterImage { width, height, pixels })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let pixels = (0..height).flat_map(|r| (0..width).map(move |c| (r, c))).map(|(r, c)| f(c, r)).collect();
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    /// Intensity at column `x`, row `y`.
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    /// Normalized position of a pixel center. Both axes are divided by the
    /// larger image dimension so distances stay isotropic.
    pub fn pixel_center(&self, x: usize, y: usize) -> Point2 {
        let s = self.width.max(self.height) as f64;
        Point2::new((x as f64 + 0.5) / s, (y as f64 + 0.5) / s)
    }
}

/// Row-major segment ids; 0 marks watershed-line pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
}

impl LabelMap {
    pub fn new(width: usize, height: usize, labels: Vec<u32>) -> Result<Self> {
        if width.checked_mul(height) != Some(labels.len()) {
            return Err(GacError::InvalidParameter(format!(
                "{width}x{height} label map needs {} labels, got {}",
                width * height,
                labels.len()
            )));
        }
        Ok(LabelMap { width, height, labels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Largest label in use.
    pub fn basin_count(&self) -> usize {
        self.labels.iter().copied().max().unwrap_or(0) as usize
    }

    pub fn line_pixel_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 0).count()
    }
}

const SOBEL_MIN: usize = 3;

/// 3x3 Sobel gradient magnitude with replicated borders, rescaled so the
/// global maximum is 1 (all zeros for a flat image).
pub fn sobel_gradient_magnitude(img: &RasterImage) -> Result<RasterImage> {
    let (w, h) = (img.width, img.height);
    if w < SOBEL_MIN || h < SOBEL_MIN {
        return Err(GacError::ImageTooSmall { width: w, height: h, min: SOBEL_MIN });
    }
    let at = |x: isize, y: isize| {
        let cx = x.clamp(0, w as isize - 1) as usize;
        let cy = y.clamp(0, h as isize - 1) as usize;
        img.pixels[cy * w + cx]
    };
    let mut mag = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
            let gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
            mag.push(gx.hypot(gy));
        }
    }
    let max = mag.iter().copied().fold(0.0, f64::max);
    if max > 0.0 {
        for m in &mut mag {
            *m /= max;
        }
    }
    RasterImage::new(w, h, mag)
}

/// One vertex per basin, ordered by label: the mean normalized pixel-center
/// position and the mean intensity over the basin. Line pixels are ignored,
/// so callers normally run [`assign_watershed_lines`] first.
pub fn segment_centroids(labels: &LabelMap, img: &RasterImage) -> Result<Vec<(Point2, f64)>> {
    if labels.width != img.width || labels.height != img.height {
        return Err(GacError::InvalidParameter(format!(
            "label map is {}x{} but image is {}x{}",
            labels.width, labels.height, img.width, img.height
        )));
    }
    let k = labels.basin_count();
    if k == 0 {
        return Err(GacError::EmptyInput("label map has no basins"));
    }
    let mut acc = vec![(0.0f64, 0.0f64, 0.0f64, 0usize); k];
    for y in 0..img.height {
        for x in 0..img.width {
            let l = labels.get(x, y) as usize;
            if l == 0 {
                continue;
            }
            let a = &mut acc[l - 1];
            a.0 += x as f64 + 0.5;
            a.1 += y as f64 + 0.5;
            a.2 += img.get(x, y);
            a.3 += 1;
        }
    }
    let s = img.width.max(img.height) as f64;
    Ok(acc
        .into_iter()
        .filter(|a| a.3 > 0)
        .map(|(sx, sy, si, n)| {
            let n = n as f64;
            (Point2::new(sx / n / s, sy / n / s), si / n)
        })
        .collect())
}

/// `n` distinct pixels drawn uniformly without replacement, returned in
/// draw order as normalized pixel centers with their intensities.
pub fn sample_image_random(img: &RasterImage, n: usize, seed: u64) -> Result<Vec<(Point2, f64)>> {
    let total = img.pixels.len();
    if n == 0 {
        return Err(GacError::EmptyInput("sample count must be at least 1"));
    }
    if n > total {
        return Err(GacError::InvalidParameter(format!("cannot sample {n} pixels from an image with {total}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(index::sample(&mut rng, total, n)
        .into_iter()
        .map(|i| {
            let (x, y) = (i % img.width, i / img.width);
            (img.pixel_center(x, y), img.pixels[i])
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use std::collections::HashSet;

    #[test]
    fn image_validation() {
        assert!(RasterImage::new(2, 2, vec![0.0; 3]).is_err());
        assert!(RasterImage::new(1, 1, vec![1.5]).is_err());
        assert!(RasterImage::new(0, 3, vec![]).is_err());
        let img = RasterImage::from_fn(3, 2, |x, y| (x + 3 * y) as f64 / 5.0).unwrap();
        assert_eq!(img.get(2, 1), 1.0);
        assert_eq!(img.pixel_center(0, 0), Point2::new(0.5 / 3.0, 0.5 / 3.0));
    }

    #[test]
    fn sobel_constant_and_small() {
        let img = RasterImage::new(4, 4, vec![0.3; 16]).unwrap();
        assert!(sobel_gradient_magnitude(&img).unwrap().pixels().iter().all(|&p| p == 0.0));
        let tiny = RasterImage::new(2, 5, vec![0.0; 10]).unwrap();
        assert!(matches!(sobel_gradient_magnitude(&tiny), Err(GacError::ImageTooSmall { .. })));
    }

    #[test]
    fn sobel_step_edge() {
        let img = RasterImage::from_fn(10, 6, |x, _| if x < 5 { 0.0 } else { 1.0 }).unwrap();
        let m = sobel_gradient_magnitude(&img).unwrap();
        for y in 0..6 {
            assert_eq!(m.get(4, y), 1.0);
            assert_eq!(m.get(5, y), 1.0);
            assert_eq!(m.get(0, y), 0.0);
            assert_eq!(m.get(9, y), 0.0);
        }
    }

    #[test]
    fn sobel_matches_naive_convolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (w, h) = (16usize, 16usize);
        let img = RasterImage::new(w, h, (0..w * h).map(|_| rng.gen()).collect()).unwrap();
        let m = sobel_gradient_magnitude(&img).unwrap();
        let kx = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
        let mut raw = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                let (mut gx, mut gy) = (0.0, 0.0);
                for (j, row) in kx.iter().enumerate() {
                    for (i, &k) in row.iter().enumerate() {
                        let sx = (x as isize + i as isize - 1).clamp(0, w as isize - 1) as usize;
                        let sy = (y as isize + j as isize - 1).clamp(0, h as isize - 1) as usize;
                        let p = img.get(sx, sy);
                        gx += k * p;
                        // Transposed kernel for the vertical response.
                        gy += kx[i][j] * p;
                    }
                }
                raw[y * w + x] = (gx * gx + gy * gy).sqrt();
            }
        }
        let max = raw.iter().copied().fold(0.0, f64::max);
        for (a, b) in m.pixels().iter().zip(&raw) {
            assert!((a - b / max).abs() < 1e-12);
        }
    }

    #[test]
    fn centroid_single_basin() {
        let img = RasterImage::new(4, 4, vec![0.25; 16]).unwrap();
        let labels = LabelMap::new(4, 4, vec![1; 16]).unwrap();
        let c = segment_centroids(&labels, &img).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c[0].0.x - 0.5).abs() < 1e-15 && (c[0].0.y - 0.5).abs() < 1e-15);
        assert_eq!(c[0].1, 0.25);
    }

    #[test]
    fn centroid_half_planes() {
        let img = RasterImage::new(8, 8, vec![0.0; 64]).unwrap();
        let labels = LabelMap::new(8, 8, (0..64).map(|i| if i % 8 < 4 { 1 } else { 2 }).collect()).unwrap();
        let c = segment_centroids(&labels, &img).unwrap();
        assert!((c[0].0.x - 0.25).abs() < 1e-15 && (c[1].0.x - 0.75).abs() < 1e-15);
    }

    #[test]
    fn centroid_matches_accumulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (w, h) = (13usize, 9usize);
        let img = RasterImage::new(w, h, (0..w * h).map(|_| rng.gen()).collect()).unwrap();
        let labels = LabelMap::new(w, h, (0..w * h).map(|_| rng.gen_range(1..=5)).collect()).unwrap();
        let c = segment_centroids(&labels, &img).unwrap();
        for l in 1..=5u32 {
            let pix: Vec<usize> = (0..w * h).filter(|&i| labels.labels()[i] == l).collect();
            let n = pix.len() as f64;
            let mx = pix.iter().map(|&i| (i % w) as f64 + 0.5).sum::<f64>() / n / 13.0;
            let my = pix.iter().map(|&i| (i / w) as f64 + 0.5).sum::<f64>() / n / 13.0;
            let mi = pix.iter().map(|&i| img.pixels()[i]).sum::<f64>() / n;
            let (p, v) = c[l as usize - 1];
            assert!((p.x - mx).abs() < 1e-12 && (p.y - my).abs() < 1e-12 && (v - mi).abs() < 1e-12);
        }
        assert!(segment_centroids(&LabelMap::new(w, h, vec![0; w * h]).unwrap(), &img).is_err());
    }

    #[test]
    fn random_sampling_contract() {
        let img = RasterImage::from_fn(6, 5, |x, y| (x * 5 + y) as f64 / 30.0).unwrap();
        let all = sample_image_random(&img, 30, 3).unwrap();
        let distinct: HashSet<(u64, u64)> = all.iter().map(|(p, _)| (p.x.to_bits(), p.y.to_bits())).collect();
        assert_eq!(distinct.len(), 30);
        assert_eq!(sample_image_random(&img, 10, 3).unwrap(), sample_image_random(&img, 10, 3).unwrap());
        assert!(sample_image_random(&img, 31, 3).is_err());
        assert!(sample_image_random(&img, 0, 3).is_err());
    }
}
