/// A dense image: row-major, channels interleaved.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<f64>,
}

impl Raster {
    pub fn new(width: usize, height: usize, channels: usize) -> Self {
        Self::filled(width, height, channels, 0.0)
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: f64) -> Self {
        Raster {
            width,
            height,
            channels,
            data: vec![value; width * height * channels],
        }
    }

    #[inline]
    fn offset(&self, col: usize, row: usize) -> usize {
        (row * self.width + col) * self.channels
    }

    /// Channel values of one pixel.
    #[inline]
    pub fn pixel(&self, col: usize, row: usize) -> &[f64] {
        let o = self.offset(col, row);
        &self.data[o..o + self.channels]
    }

    #[inline]
    pub fn pixel_mut(&mut self, col: usize, row: usize) -> &mut [f64] {
        let o = self.offset(col, row);
        &mut self.data[o..o + self.channels]
    }

    pub fn set_pixel(&mut self, col: usize, row: usize, value: &[f64]) {
        self.pixel_mut(col, row).copy_from_slice(value);
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Every sample multiplied by `scale`.
    pub fn scaled(&self, scale: f64) -> Raster {
        Raster {
            data: self.data.iter().map(|v| v * scale).collect(),
            width: self.width,
            height: self.height,
            channels: self.channels,
        }
    }
}

/// Rec. 709 luminance of a pixel; single-channel pixels pass through.
pub fn luminance(pixel: &[f64]) -> f64 {
    match pixel {
        [g] => *g,
        [r, g, b] => 0.2126 * r + 0.7152 * g + 0.0722 * b,
        _ => panic!("unsupported channel count {}", pixel.len()),
    }
}
