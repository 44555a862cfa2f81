//! Binary event frames and Sobel-gradient contrast.
//!
//! A frame marks each pixel that fired at least one event inside a time
//! window; contrast is the sample standard deviation of the frame's Sobel
//! gradient magnitudes. Polarity never enters: the frame is single-channel
//! occupancy.

use std::io::Write;

use crate::error::{Error, Result};
use crate::event::{EventStream, SensorGeometry};

/// Occupancy value of a pixel that fired within the window.
pub const ON_VALUE: u8 = 255;

/// A binary occupancy image for one accumulation window.
///
/// Pixel values are exactly 0 or 255, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventFrame {
    geometry: SensorGeometry,
    pixels: Vec<u8>,
    window: (u64, u64),
}

impl EventFrame {
    /// Builds a frame from a boolean occupancy mask in row-major order.
    ///
    /// Panics if the mask length does not equal the pixel count; that is a
    /// programming error, not a data error.
    pub fn from_mask(geometry: SensorGeometry, mask: &[bool], window: (u64, u64)) -> Self {
        assert_eq!(mask.len(), geometry.pixel_count(), "mask length mismatch");
        let pixels = mask
            .iter()
            .map(|&on| if on { ON_VALUE } else { 0 })
            .collect();
        EventFrame {
            geometry,
            pixels,
            window,
        }
    }

    pub fn geometry(&self) -> SensorGeometry {
        self.geometry
    }

    /// The half-open accumulation window `[t0, t1)` in microseconds.
    pub fn window(&self) -> (u64, u64) {
        self.window
    }

    /// Row-major pixel data, values in {0, 255}.
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn value(&self, x: u16, y: u16) -> u8 {
        self.pixels[y as usize * self.geometry.width() as usize + x as usize]
    }

    /// Number of pixels at 255, the frame's scalar activity statistic.
    pub fn on_pixel_count(&self) -> usize {
        self.pixels.iter().filter(|&&v| v == ON_VALUE).count()
    }

    /// Writes the frame as a binary PGM (P5, maxval 255) image.
    pub fn write_pgm<W: Write>(&self, sink: &mut W) -> Result<()> {
        write!(
            sink,
            "P5\n{} {}\n255\n",
            self.geometry.width(),
            self.geometry.height()
        )?;
        sink.write_all(&self.pixels)?;
        Ok(())
    }
}

/// Accumulates events with `t0 <= t < t1` into a binary frame.
///
/// A pixel is 255 iff at least one event hit it inside the window,
/// regardless of polarity. The window must lie within the stream bounds.
pub fn accumulate_frame(stream: &EventStream, t0: u64, t1: u64) -> Result<EventFrame> {
    if t0 > t1 || t0 < stream.t_start() || t1 > stream.t_end() {
        return Err(Error::IntervalOutOfBounds {
            t0,
            t1,
            start: stream.t_start(),
            end: stream.t_end(),
        });
    }
    let geometry = stream.geometry();
    let width = geometry.width() as usize;
    let mut pixels = vec![0u8; geometry.pixel_count()];
    let events = stream.events();
    let lo = events.partition_point(|e| e.t < t0);
    let hi = events.partition_point(|e| e.t < t1);
    for event in &events[lo..hi] {
        pixels[event.y as usize * width + event.x as usize] = ON_VALUE;
    }
    Ok(EventFrame {
        geometry,
        pixels,
        window: (t0, t1),
    })
}

/// Per-pixel Sobel gradient magnitudes of a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    geometry: SensorGeometry,
    magnitudes: Vec<f64>,
}

impl GradientField {
    pub fn geometry(&self) -> SensorGeometry {
        self.geometry
    }

    /// Row-major magnitudes, all non-negative.
    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    pub fn magnitude(&self, x: u16, y: u16) -> f64 {
        self.magnitudes[y as usize * self.geometry.width() as usize + x as usize]
    }
}

// Sobel magnitude at one pixel with replicate border padding. Clamped
// fetches realize the padding without materializing a padded image.
#[inline]
fn sobel_magnitude_at(pixels: &[u8], width: usize, height: usize, x: usize, y: usize) -> f64 {
    let xm = x.saturating_sub(1);
    let xp = (x + 1).min(width - 1);
    let ym = y.saturating_sub(1);
    let yp = (y + 1).min(height - 1);
    let (rm, r0, rp) = (ym * width, y * width, yp * width);
    let a = pixels[rm + xm] as i32;
    let b = pixels[rm + x] as i32;
    let c = pixels[rm + xp] as i32;
    let d = pixels[r0 + xm] as i32;
    let f = pixels[r0 + xp] as i32;
    let g = pixels[rp + xm] as i32;
    let h = pixels[rp + x] as i32;
    let i = pixels[rp + xp] as i32;
    let gx = (c + 2 * f + i) - (a + 2 * d + g);
    let gy = (g + 2 * h + i) - (a + 2 * b + c);
    ((gx * gx + gy * gy) as f64).sqrt()
}

/// Computes the Sobel gradient magnitude field of a frame.
///
/// Kernels are the standard 3x3 pair `[[-1,0,1],[-2,0,2],[-1,0,1]]` and its
/// transpose; borders use replicate padding so constant frames come out
/// exactly zero.
pub fn sobel_gradient(frame: &EventFrame) -> GradientField {
    let width = frame.geometry.width() as usize;
    let height = frame.geometry.height() as usize;
    let mut magnitudes = Vec::with_capacity(frame.pixels.len());
    for y in 0..height {
        for x in 0..width {
            magnitudes.push(sobel_magnitude_at(&frame.pixels, width, height, x, y));
        }
    }
    GradientField {
        geometry: frame.geometry,
        magnitudes,
    }
}

/// Contrast of a frame: the sample standard deviation (divisor N-1) of its
/// N Sobel gradient magnitudes.
///
/// Magnitudes are consumed by a single Welford pass without materializing
/// the gradient field. Requires at least two pixels.
pub fn contrast(frame: &EventFrame) -> Result<f64> {
    let width = frame.geometry.width() as usize;
    let height = frame.geometry.height() as usize;
    let n = width * height;
    if n < 2 {
        return Err(Error::FrameTooSmall);
    }
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    let mut count = 0.0f64;
    for y in 0..height {
        for x in 0..width {
            let value = sobel_magnitude_at(&frame.pixels, width, height, x, y);
            count += 1.0;
            let delta = value - mean;
            mean += delta / count;
            m2 += delta * (value - mean);
        }
    }
    // Welford keeps m2 >= 0 in exact arithmetic; guard the rounding residue.
    Ok((m2.max(0.0) / (n as f64 - 1.0)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::{Event, Polarity};
    use approx::assert_relative_eq;
    use rand::Rng;

    fn geom(w: u16, h: u16) -> SensorGeometry {
        SensorGeometry::new(w, h).unwrap()
    }

    fn ev(t: u64, x: u16, y: u16) -> Event {
        Event {
            t,
            x,
            y,
            polarity: Polarity::On,
        }
    }

    fn frame_from(values: &[&[u8]]) -> EventFrame {
        let h = values.len() as u16;
        let w = values[0].len() as u16;
        let mask: Vec<bool> = values
            .iter()
            .flat_map(|row| row.iter().map(|&v| v != 0))
            .collect();
        EventFrame::from_mask(geom(w, h), &mask, (0, 1))
    }

    /// Independent reference: explicit kernel loops over a clamped fetch,
    /// then a plain two-pass mean/variance.
    fn reference_contrast(frame: &EventFrame) -> f64 {
        const KX: [[i32; 3]; 3] = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]];
        const KY: [[i32; 3]; 3] = [[-1, -2, -1], [0, 0, 0], [1, 2, 1]];
        let w = frame.geometry().width() as i64;
        let h = frame.geometry().height() as i64;
        let fetch = |x: i64, y: i64| -> i32 {
            let cx = x.clamp(0, w - 1) as usize;
            let cy = y.clamp(0, h - 1) as usize;
            frame.pixels()[cy * w as usize + cx] as i32
        };
        let mut mags = Vec::new();
        for y in 0..h {
            for x in 0..w {
                let mut gx = 0i32;
                let mut gy = 0i32;
                for (ky, row) in KX.iter().enumerate() {
                    for (kx, &coef) in row.iter().enumerate() {
                        let v = fetch(x + kx as i64 - 1, y + ky as i64 - 1);
                        gx += coef * v;
                        gy += KY[ky][kx] * v;
                    }
                }
                mags.push(((gx * gx + gy * gy) as f64).sqrt());
            }
        }
        let n = mags.len() as f64;
        let mean = mags.iter().sum::<f64>() / n;
        let var = mags.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1.0);
        var.sqrt()
    }

    #[test]
    fn empty_window_gives_all_zero_frame() {
        let s = EventStream::new(geom(8, 8), vec![ev(50, 3, 3)], 0, 100).unwrap();
        let f = accumulate_frame(&s, 0, 40).unwrap();
        assert!(f.pixels().iter().all(|&v| v == 0));
        assert_eq!(f.on_pixel_count(), 0);
    }

    #[test]
    fn single_event_sets_exactly_one_pixel() {
        let s = EventStream::new(geom(10, 10), vec![ev(5, 5, 7)], 0, 10).unwrap();
        let f = accumulate_frame(&s, 0, 10).unwrap();
        assert_eq!(f.on_pixel_count(), 1);
        assert_eq!(f.value(5, 7), 255);
    }

    #[test]
    fn full_coverage_saturates_frame() {
        let g = geom(4, 4);
        let events = (0..16)
            .map(|i| ev(i as u64, (i % 4) as u16, (i / 4) as u16))
            .collect();
        let s = EventStream::new(g, events, 0, 20).unwrap();
        let f = accumulate_frame(&s, 0, 20).unwrap();
        assert!(f.pixels().iter().all(|&v| v == 255));
    }

    #[test]
    fn window_is_half_open() {
        let s = EventStream::new(geom(8, 8), vec![ev(10, 1, 1), ev(20, 2, 2)], 0, 30).unwrap();
        let f = accumulate_frame(&s, 10, 20).unwrap();
        assert_eq!(f.value(1, 1), 255);
        assert_eq!(f.value(2, 2), 0);
    }

    #[test]
    fn window_outside_bounds_is_an_error() {
        let s = EventStream::new(geom(8, 8), vec![], 10, 20).unwrap();
        assert!(matches!(
            accumulate_frame(&s, 5, 15),
            Err(Error::IntervalOutOfBounds { .. })
        ));
        assert!(matches!(
            accumulate_frame(&s, 15, 25),
            Err(Error::IntervalOutOfBounds { .. })
        ));
    }

    #[test]
    fn uniform_frames_have_zero_gradient_and_contrast() {
        for on in [false, true] {
            let f = EventFrame::from_mask(geom(7, 5), &[on; 35], (0, 1));
            let field = sobel_gradient(&f);
            assert!(field.magnitudes().iter().all(|&g| g == 0.0));
            assert_eq!(contrast(&f).unwrap(), 0.0);
        }
    }

    #[test]
    fn single_pixel_gradient_matches_hand_convolution() {
        let f = frame_from(&[
            &[0, 0, 0, 0, 0],
            &[0, 0, 0, 0, 0],
            &[0, 0, 1, 0, 0],
            &[0, 0, 0, 0, 0],
            &[0, 0, 0, 0, 0],
        ]);
        let field = sobel_gradient(&f);
        assert_eq!(field.magnitude(2, 2), 0.0);
        for (x, y) in [(1, 2), (3, 2), (2, 1), (2, 3)] {
            assert_eq!(field.magnitude(x, y), 510.0);
        }
        let diag = 255.0 * std::f64::consts::SQRT_2;
        for (x, y) in [(1, 1), (3, 1), (1, 3), (3, 3)] {
            assert_relative_eq!(field.magnitude(x, y), diag, max_relative = 1e-15);
        }
        // Everything two or more pixels away from the lit pixel is flat.
        for y in 0..5u16 {
            for x in 0..5u16 {
                if x.abs_diff(2) > 1 || y.abs_diff(2) > 1 {
                    assert_eq!(field.magnitude(x, y), 0.0);
                }
            }
        }
    }

    #[test]
    fn vertical_step_edge_gradient() {
        let f = frame_from(&[
            &[0, 0, 0, 1, 1, 1],
            &[0, 0, 0, 1, 1, 1],
            &[0, 0, 0, 1, 1, 1],
            &[0, 0, 0, 1, 1, 1],
            &[0, 0, 0, 1, 1, 1],
            &[0, 0, 0, 1, 1, 1],
        ]);
        let field = sobel_gradient(&f);
        for y in 0..6u16 {
            for x in 0..6u16 {
                let expected = if x == 2 || x == 3 { 1020.0 } else { 0.0 };
                assert_eq!(field.magnitude(x, y), expected, "at ({x}, {y})");
            }
        }
    }

    #[test]
    fn contrast_matches_two_pass_reference_on_random_frames() {
        let mut rng = crate::testutil::rng(11);
        for trial in 0..40 {
            let w = rng.random_range(2..60u16);
            let h = rng.random_range(2..60u16);
            let density: f64 = rng.random_range(0.02..0.9);
            let mask: Vec<bool> = (0..w as usize * h as usize)
                .map(|_| rng.random_bool(density))
                .collect();
            let f = EventFrame::from_mask(geom(w, h), &mask, (0, 1));
            let got = contrast(&f).unwrap();
            let want = reference_contrast(&f);
            assert_relative_eq!(got, want, epsilon = 1e-12, max_relative = 1e-9);
            assert!(got >= 0.0, "trial {trial}");
        }
    }

    #[test]
    fn contrast_rejects_single_pixel_frame() {
        let f = EventFrame::from_mask(geom(1, 1), &[true], (0, 1));
        assert!(matches!(contrast(&f), Err(Error::FrameTooSmall)));
    }

    #[test]
    fn contrast_is_invariant_under_flips_and_rotation() {
        let mut rng = crate::testutil::rng(7);
        for _ in 0..20 {
            let w = rng.random_range(2..30) as usize;
            let h = rng.random_range(2..30) as usize;
            let mask: Vec<bool> = (0..w * h).map(|_| rng.random_bool(0.3)).collect();
            let flip_h: Vec<bool> = (0..h)
                .flat_map(|y| (0..w).map(move |x| (y, w - 1 - x)))
                .map(|(y, x)| mask[y * w + x])
                .collect();
            let flip_v: Vec<bool> = (0..h)
                .flat_map(|y| (0..w).map(move |x| (h - 1 - y, x)))
                .map(|(y, x)| mask[y * w + x])
                .collect();
            let rot: Vec<bool> = (0..h)
                .flat_map(|y| (0..w).map(move |x| (h - 1 - y, w - 1 - x)))
                .map(|(y, x)| mask[y * w + x])
                .collect();
            let g = geom(w as u16, h as u16);
            let base = contrast(&EventFrame::from_mask(g, &mask, (0, 1))).unwrap();
            for variant in [flip_h, flip_v, rot] {
                let c = contrast(&EventFrame::from_mask(g, &variant, (0, 1))).unwrap();
                assert_relative_eq!(base, c, epsilon = 1e-12, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn contrast_respects_analytic_cap() {
        let cap = 4.0 * 255.0 * std::f64::consts::SQRT_2;
        let mut rng = crate::testutil::rng(3);
        for _ in 0..30 {
            let w = rng.random_range(2..40u16);
            let h = rng.random_range(2..40u16);
            let mask: Vec<bool> = (0..w as usize * h as usize)
                .map(|_| rng.random_bool(0.5))
                .collect();
            let f = EventFrame::from_mask(geom(w, h), &mask, (0, 1));
            assert!(contrast(&f).unwrap() <= cap);
        }
    }

    #[test]
    fn pgm_output_is_byte_exact() {
        let f = EventFrame::from_mask(geom(2, 2), &[true, false, false, true], (0, 10));
        let mut buf = Vec::new();
        f.write_pgm(&mut buf).unwrap();
        assert_eq!(buf, b"P5\n2 2\n255\n\xff\x00\x00\xff");
    }
}
