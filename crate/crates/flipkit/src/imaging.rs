//! Image decoding, grayscale conversion, bilinear resizing, and grid-based
//! patch extraction.
//!
//! Intensities are carried as `f64` in the canonical range `[0, 255]` but are
//! not renormalized: the descriptor's global rescale makes the absolute range
//! irrelevant, so values outside the canonical range (e.g. after an affine
//! intensity transform) flow through unchanged.

use std::path::Path;

use crate::error::{Error, Result};

/// Luma weights applied to R, G, B when collapsing a color raster.
pub const GRAY_WEIGHTS: [f64; 3] = [0.2125, 0.7154, 0.0721];

/// Single-channel intensity raster, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    /// Wraps a row-major buffer. Fails if the length does not match the
    /// dimensions or any value is non-finite.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput(format!(
                "image dimensions must be >= 1, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "buffer length {} does not match {width}x{height}",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite intensity {v} in image data"
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds an image by evaluating `f(row, col)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        debug_assert!(row < self.height && col < self.width);
        self.data[row * self.width + col]
    }

    /// One row of pixels.
    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.width..(row + 1) * self.width]
    }

    /// Mean intensity over all pixels.
    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }
}

/// Interleaved multi-channel raster as decoded from disk.
#[derive(Debug, Clone)]
pub struct Raster {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl Raster {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || channels == 0 {
            return Err(Error::InvalidInput(format!(
                "raster dimensions must be >= 1, got {width}x{height}x{channels}"
            )));
        }
        if data.len() != width * height * channels {
            return Err(Error::InvalidInput(format!(
                "buffer length {} does not match {width}x{height}x{channels}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }
}

/// Collapses a raster to a single channel.
///
/// 3-channel input is combined as `0.2125 R + 0.7154 G + 0.0721 B`, clamped
/// per pixel to `[min(R,G,B), max(R,G,B)]` so the result is an exact convex
/// combination even under floating-point rounding. Single-channel input
/// passes through unchanged.
pub fn to_grayscale(raster: &Raster) -> Result<GrayImage> {
    match raster.channels {
        1 => GrayImage::new(raster.width, raster.height, raster.data.clone()),
        3 => {
            let [wr, wg, wb] = GRAY_WEIGHTS;
            let data = raster
                .data
                .chunks_exact(3)
                .map(|px| {
                    let (r, g, b) = (px[0], px[1], px[2]);
                    (wr * r + wg * g + wb * b).clamp(r.min(g).min(b), r.max(g).max(b))
                })
                .collect();
            GrayImage::new(raster.width, raster.height, data)
        }
        n => Err(Error::InvalidInput(format!(
            "expected 1 or 3 channels, got {n}"
        ))),
    }
}

/// Downscales by `scale` in `(0, 1]` using bilinear interpolation with
/// half-pixel-center coordinate mapping, clamped at the borders. Output
/// dimensions are `round(scale * dim)`.
pub fn resize_bilinear(img: &GrayImage, scale: f64) -> Result<GrayImage> {
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "scale must be in (0, 1], got {scale}"
        )));
    }
    let out_w = (scale * img.width as f64).round() as usize;
    let out_h = (scale * img.height as f64).round() as usize;
    if out_w == 0 || out_h == 0 {
        return Err(Error::InvalidInput(format!(
            "scale {scale} collapses {}x{} to an empty image",
            img.width, img.height
        )));
    }
    if out_w == img.width && out_h == img.height {
        return Ok(img.clone());
    }

    let x_ratio = img.width as f64 / out_w as f64;
    let y_ratio = img.height as f64 / out_h as f64;
    let mut data = Vec::with_capacity(out_w * out_h);
    for oy in 0..out_h {
        let sy = ((oy as f64 + 0.5) * y_ratio - 0.5).max(0.0);
        let y0 = sy.floor() as usize;
        let fy = sy - y0 as f64;
        let y1 = (y0 + 1).min(img.height - 1);
        for ox in 0..out_w {
            let sx = ((ox as f64 + 0.5) * x_ratio - 0.5).max(0.0);
            let x0 = sx.floor() as usize;
            let fx = sx - x0 as f64;
            let x1 = (x0 + 1).min(img.width - 1);
            let top = img.get(y0, x0) * (1.0 - fx) + img.get(y0, x1) * fx;
            let bottom = img.get(y1, x0) * (1.0 - fx) + img.get(y1, x1) * fx;
            data.push(top * (1.0 - fy) + bottom * fy);
        }
    }
    GrayImage::new(out_w, out_h, data)
}

/// Grid geometry for patch extraction: top-left anchored windows of
/// `patch_size` pixels placed every `stride` pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchSpec {
    patch_size: usize,
    stride: usize,
}

impl PatchSpec {
    pub fn new(patch_size: usize, stride: usize) -> Result<Self> {
        if patch_size == 0 {
            return Err(Error::Config("patch size must be >= 1".into()));
        }
        if stride == 0 || stride > patch_size {
            return Err(Error::Config(format!(
                "stride must be in [1, patch_size], got stride {stride} for size {patch_size}"
            )));
        }
        Ok(Self { patch_size, stride })
    }

    pub fn patch_size(&self) -> usize {
        self.patch_size
    }

    pub fn stride(&self) -> usize {
        self.stride
    }
}

/// A fixed-size crop of a source scan.
#[derive(Debug, Clone)]
pub struct Patch {
    pub image: GrayImage,
    pub source_id: String,
    /// Top-left pixel row of the crop in the source.
    pub row: usize,
    /// Top-left pixel column of the crop in the source.
    pub col: usize,
}

/// Extracts all fully-contained patches on the regular grid, row-major.
/// Partial windows at the right/bottom edges are dropped. Returns an empty
/// list when the image is smaller than the patch size.
pub fn grid_patches(img: &GrayImage, spec: &PatchSpec, source_id: &str) -> Vec<Patch> {
    let size = spec.patch_size;
    if img.width < size || img.height < size {
        return Vec::new();
    }
    let across = (img.width - size) / spec.stride + 1;
    let down = (img.height - size) / spec.stride + 1;
    let mut patches = Vec::with_capacity(across * down);
    for pr in 0..down {
        let row = pr * spec.stride;
        for pc in 0..across {
            let col = pc * spec.stride;
            let mut data = Vec::with_capacity(size * size);
            for r in row..row + size {
                data.extend_from_slice(&img.row(r)[col..col + size]);
            }
            patches.push(Patch {
                image: GrayImage::new(size, size, data).expect("crop of a valid image"),
                source_id: source_id.to_string(),
                row,
                col,
            });
        }
    }
    patches
}

/// Decodes an image file (PNG, JPEG, TIFF, BMP) and converts it to grayscale.
pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let reader = image::ImageReader::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let decoded = reader.decode().map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })?;
    let raster = match decoded {
        image::DynamicImage::ImageLuma8(img) => {
            let (w, h) = img.dimensions();
            let data = img.into_raw().into_iter().map(f64::from).collect();
            Raster::new(w as usize, h as usize, 1, data)?
        }
        other => {
            // Alpha is dropped; 16-bit and float sources quantize to 8 bits.
            let rgb = other.to_rgb8();
            let (w, h) = rgb.dimensions();
            let data = rgb.into_raw().into_iter().map(f64::from).collect();
            Raster::new(w as usize, h as usize, 3, data)?
        }
    };
    to_grayscale(&raster)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gray(width: usize, height: usize, data: Vec<f64>) -> GrayImage {
        GrayImage::new(width, height, data).unwrap()
    }

    #[test]
    fn grayscale_white_black_red() {
        let raster = Raster::new(
            3,
            1,
            3,
            vec![255.0, 255.0, 255.0, 0.0, 0.0, 0.0, 255.0, 0.0, 0.0],
        )
        .unwrap();
        let img = to_grayscale(&raster).unwrap();
        assert_eq!(img.data(), &[255.0, 0.0, 54.1875]);
    }

    #[test]
    fn grayscale_single_channel_passthrough() {
        let raster = Raster::new(2, 2, 1, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let img = to_grayscale(&raster).unwrap();
        assert_eq!(img.data(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn grayscale_rejects_bad_channel_count() {
        let raster = Raster::new(1, 1, 4, vec![0.0; 4]).unwrap();
        assert!(matches!(
            to_grayscale(&raster),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn image_rejects_non_finite() {
        assert!(GrayImage::new(2, 1, vec![0.0, f64::NAN]).is_err());
        assert!(GrayImage::new(2, 1, vec![0.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn image_rejects_length_mismatch() {
        assert!(GrayImage::new(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn resize_identity_is_bit_exact() {
        let img = gray(3, 2, vec![0.0, 10.5, 255.0, 3.25, 7.0, 1.0]);
        let out = resize_bilinear(&img, 1.0).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn resize_constant_stays_constant() {
        let img = gray(7, 5, vec![42.0; 35]);
        for scale in [0.9, 0.75, 0.5, 0.3] {
            let out = resize_bilinear(&img, scale).unwrap();
            assert!(out.data().iter().all(|&v| v == 42.0), "scale {scale}");
        }
    }

    #[test]
    fn resize_ramp_golden() {
        // 4x4 ramp f(r,c) = 4r + c at scale 0.5 samples the four window
        // centers (0.5, 0.5), (0.5, 2.5), (2.5, 0.5), (2.5, 2.5).
        let img = GrayImage::from_fn(4, 4, |r, c| (4 * r + c) as f64).unwrap();
        let out = resize_bilinear(&img, 0.5).unwrap();
        assert_eq!((out.width(), out.height()), (2, 2));
        assert_eq!(out.data(), &[2.5, 4.5, 10.5, 12.5]);
    }

    #[test]
    fn resize_rejects_bad_scale() {
        let img = gray(4, 4, vec![0.0; 16]);
        assert!(resize_bilinear(&img, 0.0).is_err());
        assert!(resize_bilinear(&img, 1.5).is_err());
        assert!(resize_bilinear(&img, 0.05).is_err()); // rounds to 0x0
    }

    #[test]
    fn grid_patch_counts() {
        let img100 = gray(100, 100, vec![0.0; 100 * 100]);
        let spec50 = PatchSpec::new(50, 50).unwrap();
        assert_eq!(grid_patches(&img100, &spec50, "s").len(), 4);

        let img1000 = GrayImage::from_fn(1000, 1000, |_, _| 0.0).unwrap();
        let spec1000 = PatchSpec::new(1000, 1000).unwrap();
        assert_eq!(grid_patches(&img1000, &spec1000, "s").len(), 1);

        // 10-pixel remainder on each edge is dropped.
        let img110 = gray(110, 110, vec![0.0; 110 * 110]);
        assert_eq!(grid_patches(&img110, &spec50, "s").len(), 4);
    }

    #[test]
    fn grid_patches_too_small_image_is_empty() {
        let img = gray(10, 10, vec![0.0; 100]);
        let spec = PatchSpec::new(50, 50).unwrap();
        assert!(grid_patches(&img, &spec, "s").is_empty());
    }

    #[test]
    fn grid_patch_contents_and_coords() {
        let img = GrayImage::from_fn(4, 4, |r, c| (4 * r + c) as f64).unwrap();
        let spec = PatchSpec::new(2, 2).unwrap();
        let patches = grid_patches(&img, &spec, "scan7");
        assert_eq!(patches.len(), 4);
        assert_eq!((patches[1].row, patches[1].col), (0, 2));
        assert_eq!(patches[1].image.data(), &[2.0, 3.0, 6.0, 7.0]);
        assert_eq!((patches[2].row, patches[2].col), (2, 0));
        assert_eq!(patches[2].image.data(), &[8.0, 9.0, 12.0, 13.0]);
        assert!(patches.iter().all(|p| p.source_id == "scan7"));
    }

    #[test]
    fn patch_spec_validation() {
        assert!(PatchSpec::new(0, 1).is_err());
        assert!(PatchSpec::new(10, 0).is_err());
        assert!(PatchSpec::new(10, 11).is_err());
        assert!(PatchSpec::new(10, 10).is_ok());
    }

    #[test]
    fn load_roundtrip_gray_png() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gray.png");
        let buf: image::GrayImage =
            image::ImageBuffer::from_fn(3, 2, |x, y| image::Luma([(x * 10 + y) as u8]));
        buf.save(&path).unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!((img.width(), img.height()), (3, 2));
        assert_eq!(img.data(), &[0.0, 10.0, 20.0, 1.0, 11.0, 21.0]);
    }

    #[test]
    fn load_white_pixel_png() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("white.png");
        let buf: image::RgbImage = image::ImageBuffer::from_pixel(1, 1, image::Rgb([255u8; 3]));
        buf.save(&path).unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!(img.data(), &[255.0]);
    }

    #[test]
    fn load_truncated_file_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("broken.png");
        std::fs::write(&path, b"\x89PNG\r\n\x1a\n junk").unwrap();
        assert!(matches!(load_image(&path), Err(Error::Image { .. })));
    }

    #[test]
    fn load_missing_file_is_io_error() {
        assert!(matches!(
            load_image("/nonexistent/zz.png"),
            Err(Error::Io { .. })
        ));
    }

    proptest! {
        #[test]
        fn grid_count_matches_closed_form(
            w in 1usize..60, h in 1usize..60, size in 1usize..20, stride in 1usize..20
        ) {
            prop_assume!(stride <= size);
            let img = gray(w, h, vec![0.0; w * h]);
            let spec = PatchSpec::new(size, stride).unwrap();
            let n = grid_patches(&img, &spec, "s").len();
            let expect = if w >= size && h >= size {
                ((w - size) / stride + 1) * ((h - size) / stride + 1)
            } else {
                0
            };
            prop_assert_eq!(n, expect);
        }

        #[test]
        fn grayscale_is_convex_per_pixel(px in proptest::collection::vec(0.0f64..=255.0, 3)) {
            let raster = Raster::new(1, 1, 3, px.clone()).unwrap();
            let g = to_grayscale(&raster).unwrap().data()[0];
            let lo = px.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = px.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(g >= lo && g <= hi);
        }

        #[test]
        fn resize_respects_input_range(
            data in proptest::collection::vec(0.0f64..=255.0, 36),
            scale in 0.2f64..=1.0
        ) {
            let img = gray(6, 6, data.clone());
            let out = resize_bilinear(&img, scale).unwrap();
            let lo = data.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = data.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            // Bilinear weights are convex; a half-ulp of slack absorbs rounding.
            let eps = 1e-9;
            prop_assert!(out.data().iter().all(|&v| v >= lo - eps && v <= hi + eps));
        }
    }
}
