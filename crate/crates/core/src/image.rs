//! Planar RGB images with `f32` samples in `[0, 1]`.

use std::path::Path;

use ::image::{ImageBuffer, Rgb, RgbImage};

use crate::{Error, Result};

pub const CHANNELS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    height: usize,
    width: usize,
    /// C×H×W, row-major within each plane.
    data: Vec<f32>,
}

impl Image {
    pub fn new(height: usize, width: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != CHANNELS * height * width {
            return Err(Error::shape(format!(
                "expected {} samples for a {}x{} RGB image, got {}",
                CHANNELS * height * width,
                height,
                width,
                data.len()
            )));
        }
        Ok(Self { height, width, data })
    }

    pub fn filled(height: usize, width: usize, rgb: [f32; 3]) -> Self {
        let mut data = Vec::with_capacity(CHANNELS * height * width);
        for v in rgb {
            data.extend(std::iter::repeat(v).take(height * width));
        }
        Self { height, width, data }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn plane(&self, c: usize) -> &[f32] {
        let n = self.height * self.width;
        &self.data[c * n..(c + 1) * n]
    }

    pub fn plane_mut(&mut self, c: usize) -> &mut [f32] {
        let n = self.height * self.width;
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn get(&self, c: usize, y: usize, x: usize) -> f32 {
        self.data[(c * self.height + y) * self.width + x]
    }

    pub fn set(&mut self, c: usize, y: usize, x: usize, v: f32) {
        self.data[(c * self.height + y) * self.width + x] = v;
    }

    pub fn to_rgb8(&self) -> RgbImage {
        ImageBuffer::from_fn(self.width as u32, self.height as u32, |x, y| {
            let px = |c| (self.get(c, y as usize, x as usize).clamp(0.0, 1.0) * 255.0).round() as u8;
            Rgb([px(0), px(1), px(2)])
        })
    }

    pub fn from_rgb8(img: &RgbImage) -> Self {
        let (w, h) = (img.width() as usize, img.height() as usize);
        let mut data = vec![0.0; CHANNELS * h * w];
        for (x, y, px) in img.enumerate_pixels() {
            for c in 0..CHANNELS {
                data[(c * h + y as usize) * w + x as usize] = px.0[c] as f32 / 255.0;
            }
        }
        Self {
            height: h,
            width: w,
            data,
        }
    }

    /// Quantizes to 8 bits per sample, as any stored image would be.
    pub fn quantized(&self) -> Self {
        Self::from_rgb8(&self.to_rgb8())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let img = ::image::open(path)?.to_rgb8();
        Ok(Self::from_rgb8(&img))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.to_rgb8().save(path)?;
        Ok(())
    }

    /// Resizes to `height`×`width` after a center crop to the target aspect ratio.
    pub fn resize_center_crop(&self, height: usize, width: usize) -> Self {
        let target = width as f64 / height as f64;
        let current = self.width as f64 / self.height as f64;
        let (ch, cw) = if current > target {
            (self.height, ((self.height as f64) * target).round() as usize)
        } else {
            (((self.width as f64) / target).round() as usize, self.width)
        };
        let (oy, ox) = ((self.height - ch) / 2, (self.width - cw) / 2);
        let cropped =
            ::image::imageops::crop_imm(&self.to_rgb8(), ox as u32, oy as u32, cw as u32, ch as u32).to_image();
        let resized = ::image::imageops::resize(
            &cropped,
            width as u32,
            height as u32,
            ::image::imageops::FilterType::Triangle,
        );
        Self::from_rgb8(&resized)
    }
}

/// Peak signal-to-noise ratio in dB for unit-range images.
pub fn psnr(reference: &Image, test: &Image) -> f64 {
    assert_eq!(reference.data.len(), test.data.len(), "psnr: size mismatch");
    let mse: f64 = reference
        .data
        .iter()
        .zip(&test.data)
        .map(|(a, b)| {
            let d = (*a as f64) - (*b as f64);
            d * d
        })
        .sum::<f64>()
        / reference.data.len() as f64;
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (1.0 / mse).log10()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rgb8_round_trip_is_exact_after_quantization() {
        let mut img = Image::filled(4, 6, [0.2, 0.5, 0.9]);
        img.set(1, 2, 3, 0.33);
        let q = img.quantized();
        assert_eq!(q, q.quantized());
        assert_eq!(psnr(&q, &q), f64::INFINITY);
    }

    #[test]
    fn resize_produces_target_shape() {
        let img = Image::filled(40, 100, [0.1, 0.2, 0.3]);
        let out = img.resize_center_crop(16, 8);
        assert_eq!((out.height(), out.width()), (16, 8));
    }
}
