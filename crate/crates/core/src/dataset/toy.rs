//! Procedural desk-scale corpus: small vehicle-like glyphs whose identity is
//! a fixed shape/color signature, seen from a "front" and a "back" viewpoint
//! over random background clutter.
//!
//! Training identities are captured by cameras 0 and 1. Held-out identities
//! form the query set (again cameras 0 and 1, the cooperating users) and the
//! gallery, which is captured by server-side cameras 2 (front view) and
//! 3 (back view).

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{DatasetSplit, ImageSource, Normalization, Record};
use crate::image::Image;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToyConfig {
    pub train_identities: usize,
    pub test_identities: usize,
    pub images_per_camera: usize,
    pub query_images_per_camera: usize,
    pub gallery_images_per_camera: usize,
    pub image_size: usize,
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self {
            train_identities: 20,
            test_identities: 20,
            images_per_camera: 30,
            query_images_per_camera: 10,
            gallery_images_per_camera: 5,
            image_size: 32,
        }
    }
}

/// Identity-level appearance parameters, shared by every view.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleSignature {
    pub body: [f32; 3],
    pub roof: [f32; 3],
    pub front_light: [f32; 3],
    pub rear_light: [f32; 3],
    pub kind: u8,
    pub length: f32,
    pub height: f32,
    pub cabin_start: f32,
    pub cabin_len: f32,
    pub stripe: bool,
}

fn hsv(h: f32, s: f32, v: f32) -> [f32; 3] {
    let h6 = (h.rem_euclid(1.0)) * 6.0;
    let c = v * s;
    let x = c * (1.0 - ((h6 % 2.0) - 1.0).abs());
    let (r, g, b) = match h6 as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [r + m, g + m, b + m]
}

impl VehicleSignature {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let hue: f32 = rng.random();
        Self {
            body: hsv(hue, rng.random_range(0.45..1.0), rng.random_range(0.45..0.95)),
            roof: hsv(rng.random(), rng.random_range(0.0..0.8), rng.random_range(0.2..0.9)),
            front_light: hsv(rng.random(), rng.random_range(0.3..1.0), rng.random_range(0.7..1.0)),
            rear_light: hsv(rng.random(), rng.random_range(0.6..1.0), rng.random_range(0.5..1.0)),
            kind: rng.random_range(0..3),
            length: rng.random_range(0.55..0.8),
            height: rng.random_range(0.2..0.32),
            cabin_start: rng.random_range(0.15..0.45),
            cabin_len: rng.random_range(0.3..0.5),
            stripe: rng.random_bool(0.5),
        }
    }
}

fn blend(dst: &mut [f32; 3], src: [f32; 3], alpha: f32) {
    for c in 0..3 {
        dst[c] = dst[c] * (1.0 - alpha) + src[c] * alpha;
    }
}

/// Renders one view (`0` = front, `1` = back) with per-capture jitter.
pub fn render_vehicle<R: Rng + ?Sized>(sig: &VehicleSignature, view: u8, size: usize, rng: &mut R) -> Image {
    render_capture(sig, view, size, size, 0.03, rng)
}

/// [`render_vehicle`] at an arbitrary `height`×`width` with sensor noise of
/// standard deviation `noise_sd`.
pub fn render_capture<R: Rng + ?Sized>(
    sig: &VehicleSignature,
    view: u8,
    height: usize,
    width: usize,
    noise_sd: f32,
    rng: &mut R,
) -> Image {
    let (sh, sw) = (height as f32, width as f32);
    let mut pixels = vec![[0f32; 3]; height * width];

    // Background: a tinted gradient plus a few translucent clutter boxes.
    let base = hsv(rng.random(), rng.random_range(0.0..0.4), rng.random_range(0.25..0.65));
    let tilt: f32 = rng.random_range(-0.15..0.15);
    for y in 0..height {
        for x in 0..width {
            let g = 1.0 + tilt * (y as f32 / sh - 0.5);
            pixels[y * width + x] = [base[0] * g, base[1] * g, base[2] * g];
        }
    }
    for _ in 0..rng.random_range(2..5) {
        let color = hsv(rng.random(), rng.random_range(0.0..0.7), rng.random_range(0.2..0.9));
        let (x0, y0) = (rng.random_range(0..width), rng.random_range(0..height));
        let (w, h) = (
            rng.random_range(2..width.max(6) / 2),
            rng.random_range(2..height.max(6) / 2),
        );
        let alpha = rng.random_range(0.25..0.6);
        for y in y0..(y0 + h).min(height) {
            for x in x0..(x0 + w).min(width) {
                blend(&mut pixels[y * width + x], color, alpha);
            }
        }
    }

    // Vehicle geometry in normalized coordinates centred on the image.
    let scale = rng.random_range(0.88..1.12) * if view == 0 { 1.0 } else { 0.92 };
    let cx = 0.5 + rng.random_range(-0.08..0.08);
    let cy = 0.55 + rng.random_range(-0.08..0.08);
    let shade = rng.random_range(0.85..1.15) * if view == 0 { 1.0 } else { 0.8 };
    let half_len = sig.length * 0.5;
    let body_top = -sig.height * 0.2;
    let body_bottom = sig.height * 0.8;
    let wheel_r = sig.height * 0.35;

    for y in 0..height {
        for x in 0..width {
            let mut u = ((x as f32 + 0.5) / sw - cx) / scale;
            let v = ((y as f32 + 0.5) / sh - cy) / scale;
            // The back view is mirrored so the rear of the vehicle faces the camera side.
            if view == 1 {
                u = -u;
            }
            let t = (u + half_len) / sig.length; // 0 at rear, 1 at front
            let px = &mut pixels[y * width + x];
            let inside_body = (-half_len..=half_len).contains(&u) && (body_top..=body_bottom).contains(&v);
            let cabin_top = match sig.kind {
                0 => body_top - sig.height * 0.7,
                1 => body_top - sig.height * 1.1,
                _ => body_top - sig.height * 0.45,
            };
            let cabin_range = match sig.kind {
                // truck: tall box over the rear part
                1 => 0.0..=(sig.cabin_start + sig.cabin_len),
                _ => sig.cabin_start..=(sig.cabin_start + sig.cabin_len),
            };
            let inside_cabin = cabin_range.contains(&t) && (cabin_top..body_top).contains(&v);
            if inside_body {
                *px = sig.body.map(|c| c * shade);
                if sig.stripe && (v - sig.height * 0.3).abs() < sig.height * 0.08 {
                    *px = sig.roof.map(|c| c * shade);
                }
            }
            if inside_cabin {
                *px = sig.roof.map(|c| c * shade);
            }
            // Lights: front view shows the front lights, back view the rear ones.
            let light_zone = if view == 0 { t > 0.9 } else { t < 0.1 };
            if inside_body && light_zone && v < body_top + sig.height * 0.45 {
                *px = if view == 0 { sig.front_light } else { sig.rear_light };
            }
            for wx in [-half_len * 0.6, half_len * 0.6] {
                let d2 = (u - wx).powi(2) + (v - body_bottom).powi(2);
                if d2 < wheel_r * wheel_r {
                    *px = [0.08, 0.08, 0.08];
                }
            }
        }
    }

    let mut img = Image::filled(height, width, [0.0; 3]);
    for y in 0..height {
        for x in 0..width {
            for c in 0..3 {
                let noise: f32 = rng.sample::<f32, _>(StandardNormal) * noise_sd;
                img.set(c, y, x, (pixels[y * width + x][c] + noise).clamp(0.0, 1.0));
            }
        }
    }
    img.quantized()
}

fn record(img: Image, identity: u32, camera: u32) -> Record {
    Record {
        source: ImageSource::Memory(Arc::new(img)),
        identity,
        camera,
    }
}

/// Deterministic toy split; identities `0..train` train, the next `test`
/// identities form query and gallery.
pub fn generate_toy_dataset(config: &ToyConfig, seed: u64) -> DatasetSplit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = config.train_identities + config.test_identities;
    let signatures: Vec<VehicleSignature> = (0..total).map(|_| VehicleSignature::random(&mut rng)).collect();
    let size = config.image_size;

    let mut train = Vec::new();
    let mut query = Vec::new();
    let mut gallery = Vec::new();
    for (id, sig) in signatures.iter().enumerate() {
        let id = id as u32;
        if (id as usize) < config.train_identities {
            for cam in 0..2u32 {
                for _ in 0..config.images_per_camera {
                    train.push(record(render_vehicle(sig, cam as u8, size, &mut rng), id, cam));
                }
            }
        } else {
            for cam in 0..2u32 {
                for _ in 0..config.query_images_per_camera {
                    query.push(record(render_vehicle(sig, cam as u8, size, &mut rng), id, cam));
                }
            }
            for cam in 2..4u32 {
                for _ in 0..config.gallery_images_per_camera {
                    gallery.push(record(render_vehicle(sig, (cam - 2) as u8, size, &mut rng), id, cam));
                }
            }
        }
    }

    let normalization = Normalization::estimate(train.iter().map(|r| match &r.source {
        ImageSource::Memory(img) => img.as_ref(),
        ImageSource::File(_) => unreachable!("toy records live in memory"),
    }));
    DatasetSplit {
        profile: "toy".into(),
        image_height: size,
        image_width: size,
        train,
        query,
        gallery,
        normalization,
    }
}
