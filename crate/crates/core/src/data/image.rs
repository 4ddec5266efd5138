use serde::{Deserialize, Serialize};

use super::BinaryPattern;
use crate::{Error, Result};

/// Row-major 8-bit grayscale image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

/// Resampling kernel used to shrink images before thresholding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DownsampleKernel {
    /// Bilinear interpolation on half-pixel centres without antialiasing.
    /// For an integer factor `f` with odd `f` this samples source pixel
    /// `f·i + (f-1)/2` exactly.
    #[default]
    Bilinear,
    /// Mean over each `f × f` block.
    BlockMean,
}

impl std::str::FromStr for DownsampleKernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bilinear" => Ok(DownsampleKernel::Bilinear),
            "block-mean" | "blockmean" | "area" => Ok(DownsampleKernel::BlockMean),
            other => Err(Error::arg(format!("unknown downsample kernel `{other}`"))),
        }
    }
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::arg(format!(
                "{} pixels for a {width}×{height} image",
                pixels.len()
            )));
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        GrayImage {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// 255 - pixel.
    pub fn invert(&self) -> Self {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|p| 255 - p).collect(),
        }
    }

    /// Bit = 1 iff pixel ≥ threshold, row-major.
    pub fn binarize(&self, threshold: u8) -> BinaryPattern {
        BinaryPattern::new(self.pixels.iter().map(|&p| (p >= threshold) as u8).collect())
            .expect("bits are 0/1 by construction")
    }

    pub fn downsample(&self, out_w: usize, out_h: usize) -> Result<Self> {
        self.downsample_with(out_w, out_h, DownsampleKernel::default())
    }

    pub fn downsample_with(&self, out_w: usize, out_h: usize, kernel: DownsampleKernel) -> Result<Self> {
        if out_w == 0 || out_h == 0 || self.width % out_w != 0 || self.height % out_h != 0 {
            return Err(Error::arg(format!(
                "{out_w}×{out_h} does not evenly divide {}×{}",
                self.width, self.height
            )));
        }
        let pixels = match kernel {
            DownsampleKernel::BlockMean => self.block_mean(out_w, out_h),
            DownsampleKernel::Bilinear => self.bilinear(out_w, out_h),
        };
        Ok(GrayImage {
            width: out_w,
            height: out_h,
            pixels,
        })
    }

    fn block_mean(&self, out_w: usize, out_h: usize) -> Vec<u8> {
        let (fx, fy) = (self.width / out_w, self.height / out_h);
        let area = (fx * fy) as u32;
        let mut out = Vec::with_capacity(out_w * out_h);
        for by in 0..out_h {
            for bx in 0..out_w {
                let mut sum = 0u32;
                for y in by * fy..(by + 1) * fy {
                    for x in bx * fx..(bx + 1) * fx {
                        sum += self.get(x, y) as u32;
                    }
                }
                // round half up
                out.push(((2 * sum + area) / (2 * area)) as u8);
            }
        }
        out
    }

    fn bilinear(&self, out_w: usize, out_h: usize) -> Vec<u8> {
        let source_coord = |i: usize, scale: f64, len: usize| {
            let c = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, (len - 1) as f64);
            let lo = c.floor() as usize;
            (lo, (lo + 1).min(len - 1), c - lo as f64)
        };
        let sx = self.width as f64 / out_w as f64;
        let sy = self.height as f64 / out_h as f64;
        let mut out = Vec::with_capacity(out_w * out_h);
        for oy in 0..out_h {
            let (y0, y1, ty) = source_coord(oy, sy, self.height);
            for ox in 0..out_w {
                let (x0, x1, tx) = source_coord(ox, sx, self.width);
                let top = self.get(x0, y0) as f64 * (1.0 - tx) + self.get(x1, y0) as f64 * tx;
                let bottom = self.get(x0, y1) as f64 * (1.0 - tx) + self.get(x1, y1) as f64 * tx;
                let v = top * (1.0 - ty) + bottom * ty;
                out.push(v.round().clamp(0.0, 255.0) as u8);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_hot_block(bx: usize, by: usize) -> GrayImage {
        let mut img = GrayImage::filled(28, 28, 0);
        for y in by * 7..(by + 1) * 7 {
            for x in bx * 7..(bx + 1) * 7 {
                img.pixels[y * 28 + x] = 255;
            }
        }
        img
    }

    #[test]
    fn constant_images_stay_constant() {
        for kernel in [DownsampleKernel::Bilinear, DownsampleKernel::BlockMean] {
            for v in [0u8, 255] {
                let small = GrayImage::filled(28, 28, v).downsample_with(4, 4, kernel).unwrap();
                assert_eq!(small, GrayImage::filled(4, 4, v));
            }
        }
    }

    #[test]
    fn single_block_maps_to_single_pixel() {
        for kernel in [DownsampleKernel::Bilinear, DownsampleKernel::BlockMean] {
            let small = one_hot_block(2, 1).downsample_with(4, 4, kernel).unwrap();
            let lit: Vec<usize> = (0..16).filter(|&i| small.pixels[i] == 255).collect();
            assert_eq!(lit, vec![6]);
            assert_eq!(small.pixels.iter().filter(|&&p| p == 0).count(), 15);
        }
    }

    #[test]
    fn bilinear_samples_block_centres() {
        let img = GrayImage::new(28, 28, (0..784).map(|i| (i % 251) as u8).collect()).unwrap();
        let small = img.downsample(4, 4).unwrap();
        for oy in 0..4 {
            for ox in 0..4 {
                assert_eq!(small.get(ox, oy), img.get(7 * ox + 3, 7 * oy + 3));
            }
        }
    }

    #[test]
    fn block_mean_rounds_to_nearest() {
        let img = GrayImage::new(2, 1, vec![0, 3]).unwrap();
        assert_eq!(img.downsample_with(1, 1, DownsampleKernel::BlockMean).unwrap().pixels, vec![2]);
        let img = GrayImage::new(2, 1, vec![0, 2]).unwrap();
        assert_eq!(img.downsample_with(1, 1, DownsampleKernel::BlockMean).unwrap().pixels, vec![1]);
    }

    #[test]
    fn rejects_non_divisible() {
        assert!(GrayImage::filled(28, 28, 0).downsample(5, 4).is_err());
        assert!(GrayImage::filled(28, 28, 0).downsample(0, 4).is_err());
    }

    #[test]
    fn binarize_threshold_is_inclusive() {
        let img = GrayImage::new(3, 1, vec![127, 128, 0]).unwrap();
        assert_eq!(img.binarize(128).bits(), &[0, 1, 0]);
        assert_eq!(GrayImage::filled(2, 2, 0).binarize(128), BinaryPattern::zeros(4));
    }

    #[test]
    fn invert_examples() {
        let img = GrayImage::new(3, 1, vec![0, 255, 100]).unwrap();
        assert_eq!(img.invert().pixels, vec![255, 0, 155]);
        assert_eq!(img.invert().invert(), img);
    }
}
