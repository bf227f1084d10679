//! Integer-exact image operators for the day/night preprocessor demo.
//!
//! Every operator is a pure function with fixed rounding, so NoC-vs-oracle
//! comparisons are bit-exact. Arithmetic is integer or Q16 fixed point
//! throughout; no floating point touches pixel data.

pub mod netpbm;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyImage { width: u32, height: u32 },
    #[error("pixel buffer length {got} does not match {width}x{height}x{channels}")]
    BufferMismatch {
        width: u32,
        height: u32,
        channels: u32,
        got: usize,
    },
    #[error("operator {op} requires an image of at least {min}x{min}, got {width}x{height}")]
    TooSmall {
        op: &'static str,
        min: u32,
        width: u32,
        height: u32,
    },
    #[error("channel plane dimensions differ: {0}x{1} vs {2}x{3}")]
    PlaneMismatch(u32, u32, u32, u32),
}

/// Single-channel 8-bit image, row-major dense storage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

/// Three-channel 8-bit image, row-major, interleaved R,G,B.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyImage { width, height });
        }
        if pixels.len() != (width * height) as usize {
            return Err(ImageError::BufferMismatch {
                width,
                height,
                channels: 1,
                got: pixels.len(),
            });
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: u32, height: u32, value: u8) -> Self {
        GrayImage {
            width,
            height,
            pixels: vec![value; (width * height) as usize],
        }
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.pixels[(y * self.width + x) as usize]
    }

    /// Pixel lookup with edge replication: coordinates are clamped to the
    /// image border.
    #[inline]
    fn get_clamped(&self, x: i64, y: i64) -> u8 {
        let cx = x.clamp(0, self.width as i64 - 1) as u32;
        let cy = y.clamp(0, self.height as i64 - 1) as u32;
        self.get(cx, cy)
    }
}

impl RgbImage {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyImage { width, height });
        }
        if pixels.len() != (width * height * 3) as usize {
            return Err(ImageError::BufferMismatch {
                width,
                height,
                channels: 3,
                got: pixels.len(),
            });
        }
        Ok(RgbImage {
            width,
            height,
            pixels,
        })
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let i = ((y * self.width + x) * 3) as usize;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }
}

/// 3x3 Gaussian smoothing with kernel [[1,2,1],[2,4,2],[1,2,1]].
/// Output pixel = (weighted sum + 8) div 16; borders replicate edge pixels.
pub fn gauss3(img: &GrayImage) -> GrayImage {
    const KERNEL: [[u32; 3]; 3] = [[1, 2, 1], [2, 4, 2], [1, 2, 1]];
    let mut out = Vec::with_capacity(img.pixels.len());
    for y in 0..img.height as i64 {
        for x in 0..img.width as i64 {
            let mut acc = 0u32;
            for (ky, row) in KERNEL.iter().enumerate() {
                for (kx, w) in row.iter().enumerate() {
                    acc += w * img.get_clamped(x + kx as i64 - 1, y + ky as i64 - 1) as u32;
                }
            }
            out.push(((acc + 8) / 16) as u8);
        }
    }
    GrayImage {
        width: img.width,
        height: img.height,
        pixels: out,
    }
}

/// Per-channel gain applied by [`grayworld`], in Q16 fixed point, plus a flag
/// for channels whose mean was zero (those fall back to the identity gain).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrayworldGains {
    pub q16: [u64; 3],
    pub zero_mean: [bool; 3],
}

/// Gains for gray-world color constancy: gain_c = (mean_R+mean_G+mean_B) /
/// (3 * mean_c), floored into Q16. The pixel count cancels, so the gains are
/// computed from channel sums directly. A zero-mean channel gets gain 1.
pub fn grayworld_gains(img: &RgbImage) -> GrayworldGains {
    let mut sums = [0u64; 3];
    for chunk in img.pixels.chunks_exact(3) {
        for c in 0..3 {
            sums[c] += chunk[c] as u64;
        }
    }
    let total: u64 = sums.iter().sum();
    let mut q16 = [1u64 << 16; 3];
    let mut zero_mean = [false; 3];
    for c in 0..3 {
        if sums[c] == 0 {
            zero_mean[c] = true;
        } else {
            q16[c] = ((total as u128) << 16) as u64 / (3 * sums[c]);
        }
    }
    GrayworldGains { q16, zero_mean }
}

/// Gray-world color constancy: out = clamp((p * gain_q16 + 2^15) >> 16, 0, 255).
pub fn grayworld(img: &RgbImage) -> RgbImage {
    let gains = grayworld_gains(img);
    let mut out = Vec::with_capacity(img.pixels.len());
    for (i, &p) in img.pixels.iter().enumerate() {
        let g = gains.q16[i % 3];
        let v = (p as u64 * g + (1 << 15)) >> 16;
        out.push(v.min(255) as u8);
    }
    RgbImage {
        width: img.width,
        height: img.height,
        pixels: out,
    }
}

/// Histogram equalization by CDF remap:
/// out(v) = floor((cdf(v) - cdf_min) * 255 / (Npix - cdf_min)), where cdf_min
/// is the smallest nonzero CDF value. A constant image (Npix == cdf_min) is
/// returned unchanged.
pub fn hist_eq(img: &GrayImage) -> GrayImage {
    let mut hist = [0u64; 256];
    for &p in &img.pixels {
        hist[p as usize] += 1;
    }
    let mut cdf = [0u64; 256];
    let mut acc = 0u64;
    for v in 0..256 {
        acc += hist[v];
        cdf[v] = acc;
    }
    let npix = img.pixels.len() as u64;
    let cdf_min = cdf.iter().copied().find(|&c| c > 0).unwrap_or(0);
    if npix == cdf_min {
        return img.clone();
    }
    let mut lut = [0u8; 256];
    for v in 0..256 {
        if cdf[v] >= cdf_min {
            lut[v] = ((cdf[v] - cdf_min) * 255 / (npix - cdf_min)) as u8;
        }
    }
    GrayImage {
        width: img.width,
        height: img.height,
        pixels: img.pixels.iter().map(|&p| lut[p as usize]).collect(),
    }
}

/// Canny edge extraction, binary 0/255 output.
///
/// Pipeline: Sobel 3x3 gradients with border replication, magnitude
/// |gx| + |gy|, gradient direction quantized to 4 sectors by the 2:1 slope
/// rule, non-maximum suppression (strict against the first neighbor, ties
/// kept against the second, out-of-bounds neighbors count as 0), double
/// threshold T_low=40 / T_high=100, then hysteresis flood from strong pixels
/// over 8-neighborhoods.
pub fn canny(img: &GrayImage) -> Result<GrayImage, ImageError> {
    canny_with_thresholds(img, 40, 100)
}

pub fn canny_with_thresholds(
    img: &GrayImage,
    t_low: u32,
    t_high: u32,
) -> Result<GrayImage, ImageError> {
    if img.width < 3 || img.height < 3 {
        return Err(ImageError::TooSmall {
            op: "canny",
            min: 3,
            width: img.width,
            height: img.height,
        });
    }
    let (w, h) = (img.width as i64, img.height as i64);
    let n = (w * h) as usize;

    let mut gx = vec![0i32; n];
    let mut gy = vec![0i32; n];
    let mut mag = vec![0u32; n];
    for y in 0..h {
        for x in 0..w {
            let p = |dx: i64, dy: i64| img.get_clamped(x + dx, y + dy) as i32;
            let sx = -p(-1, -1) + p(1, -1) - 2 * p(-1, 0) + 2 * p(1, 0) - p(-1, 1) + p(1, 1);
            let sy = -p(-1, -1) - 2 * p(0, -1) - p(1, -1) + p(-1, 1) + 2 * p(0, 1) + p(1, 1);
            let i = (y * w + x) as usize;
            gx[i] = sx;
            gy[i] = sy;
            mag[i] = sx.unsigned_abs() + sy.unsigned_abs();
        }
    }

    // Non-maximum suppression along the quantized gradient direction.
    let mag_at = |x: i64, y: i64| -> u32 {
        if x < 0 || y < 0 || x >= w || y >= h {
            0
        } else {
            mag[(y * w + x) as usize]
        }
    };
    let mut thin = vec![0u32; n];
    for y in 0..h {
        for x in 0..w {
            let i = (y * w + x) as usize;
            let m = mag[i];
            if m == 0 {
                continue;
            }
            let (ax, ay) = (gx[i].unsigned_abs(), gy[i].unsigned_abs());
            // Sector by 2:1 slope; n1 is compared strictly, n2 allows ties.
            let (n1, n2) = if 2 * ay <= ax {
                ((x - 1, y), (x + 1, y))
            } else if 2 * ax <= ay {
                ((x, y - 1), (x, y + 1))
            } else if (gx[i] > 0) == (gy[i] > 0) {
                ((x - 1, y - 1), (x + 1, y + 1))
            } else {
                ((x + 1, y - 1), (x - 1, y + 1))
            };
            if m > mag_at(n1.0, n1.1) && m >= mag_at(n2.0, n2.1) {
                thin[i] = m;
            }
        }
    }

    // Double threshold + hysteresis flood from strong pixels over 8-neighbors.
    let mut out = vec![0u8; n];
    let mut stack: Vec<(i64, i64)> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let i = (y * w + x) as usize;
            if thin[i] >= t_high {
                out[i] = 255;
                stack.push((x, y));
            }
        }
    }
    while let Some((x, y)) = stack.pop() {
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w || ny >= h {
                    continue;
                }
                let j = (ny * w + nx) as usize;
                if out[j] == 0 && thin[j] >= t_low {
                    out[j] = 255;
                    stack.push((nx, ny));
                }
            }
        }
    }

    Ok(GrayImage {
        width: img.width,
        height: img.height,
        pixels: out,
    })
}

/// Luma extraction from RGB, integer BT.601-style weights that sum to 256:
/// (77 R + 150 G + 29 B + 128) >> 8. A gray input (R=G=B=v) maps exactly to v.
pub fn luma(img: &RgbImage) -> GrayImage {
    let pixels = img
        .pixels
        .chunks_exact(3)
        .map(|c| ((77 * c[0] as u32 + 150 * c[1] as u32 + 29 * c[2] as u32 + 128) >> 8) as u8)
        .collect();
    GrayImage {
        width: img.width,
        height: img.height,
        pixels,
    }
}

/// Splits an RGB image into its three channel planes (R, G, B).
pub fn split_rgb(img: &RgbImage) -> (GrayImage, GrayImage, GrayImage) {
    let n = (img.width * img.height) as usize;
    let mut planes = [
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    ];
    for chunk in img.pixels.chunks_exact(3) {
        for c in 0..3 {
            planes[c].push(chunk[c]);
        }
    }
    let [r, g, b] = planes;
    let mk = |pixels| GrayImage {
        width: img.width,
        height: img.height,
        pixels,
    };
    (mk(r), mk(g), mk(b))
}

/// Interleaves three channel planes back into an RGB image; the inverse of
/// [`split_rgb`]. Errors if the plane dimensions differ.
pub fn merge_rgb(r: &GrayImage, g: &GrayImage, b: &GrayImage) -> Result<RgbImage, ImageError> {
    for plane in [g, b] {
        if plane.width != r.width || plane.height != r.height {
            return Err(ImageError::PlaneMismatch(
                r.width,
                r.height,
                plane.width,
                plane.height,
            ));
        }
    }
    let mut pixels = Vec::with_capacity(r.pixels.len() * 3);
    for i in 0..r.pixels.len() {
        pixels.push(r.pixels[i]);
        pixels.push(g.pixels[i]);
        pixels.push(b.pixels[i]);
    }
    Ok(RgbImage {
        width: r.width,
        height: r.height,
        pixels,
    })
}
