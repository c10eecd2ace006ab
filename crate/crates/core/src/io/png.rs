//! Grayscale PNG input. 8- and 16-bit gray or RGB images are accepted; RGB is
//! reduced with luma weights `0.299 R + 0.587 G + 0.114 B`.

use std::fs::File;
use std::io::{BufRead, BufReader, Cursor, Seek};
use std::path::Path;

use ::png::{BitDepth, ColorType, Decoder, Transformations};

use super::{fs_err, IoError};
use crate::types::FeatureMap;

/// A decoded plane with samples scaled to `[0, 1]`.
///
/// Unlike [`FeatureMap`] this carries no minimum size; conversion applies the
/// usual checks.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    pub height: usize,
    pub width: usize,
    pub values: Vec<f32>,
}

impl GrayImage {
    pub fn into_feature_map(self) -> Result<FeatureMap<f32>, IoError> {
        Ok(FeatureMap::new(1, self.height, self.width, self.values)?)
    }
}

fn decode<R: BufRead + Seek>(reader: R) -> Result<GrayImage, IoError> {
    let mut decoder = Decoder::new(reader);
    decoder.set_transformations(Transformations::IDENTITY);
    let mut reader = decoder
        .read_info()
        .map_err(|e| IoError::Decode(e.to_string()))?;
    let (color, depth) = {
        let info = reader.info();
        (info.color_type, info.bit_depth)
    };
    let channels = match color {
        ColorType::Grayscale => 1,
        ColorType::Rgb => 3,
        other => return Err(IoError::UnsupportedColorType(format!("{other:?}"))),
    };
    let (bytes_per_sample, max) = match depth {
        BitDepth::Eight => (1, 255.0),
        BitDepth::Sixteen => (2, 65535.0),
        other => return Err(IoError::UnsupportedBitDepth(other as u8)),
    };
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| IoError::Decode("image too large".into()))?;
    let mut buf = vec![0; size];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| IoError::Decode(e.to_string()))?;
    let (width, height) = (frame.width as usize, frame.height as usize);

    let mut values = Vec::with_capacity(width * height);
    for row in buf.chunks_exact(frame.line_size).take(height) {
        let samples = row[..width * channels * bytes_per_sample]
            .chunks_exact(bytes_per_sample)
            .map(|s| match s {
                [b] => *b as f64,
                [hi, lo] => u16::from_be_bytes([*hi, *lo]) as f64,
                _ => unreachable!(),
            });
        if channels == 1 {
            values.extend(samples.map(|v| (v / max) as f32));
        } else {
            let rgb: Vec<f64> = samples.collect();
            values.extend(
                rgb.chunks_exact(3)
                    .map(|p| ((0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / max) as f32),
            );
        }
    }
    Ok(GrayImage {
        height,
        width,
        values,
    })
}

pub fn decode_png_gray(bytes: &[u8]) -> Result<GrayImage, IoError> {
    decode(Cursor::new(bytes))
}

pub fn read_png_gray(path: impl AsRef<Path>) -> Result<GrayImage, IoError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(fs_err(path))?;
    decode(BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn encode(w: u32, h: u32, color: ColorType, depth: BitDepth, data: &[u8]) -> Vec<u8> {
        let mut out = Vec::new();
        {
            let mut enc = ::png::Encoder::new(&mut out, w, h);
            enc.set_color(color);
            enc.set_depth(depth);
            if color == ColorType::Indexed {
                enc.set_palette(vec![0u8, 0, 0, 255, 255, 255]);
            }
            let mut writer = enc.write_header().unwrap();
            writer.write_image_data(data).unwrap();
        }
        out
    }

    #[test]
    fn constant_gray8() {
        let png = encode(4, 3, ColorType::Grayscale, BitDepth::Eight, &[128; 12]);
        let img = decode_png_gray(&png).unwrap();
        assert_eq!((img.height, img.width), (3, 4));
        assert!(img.values.iter().all(|&v| v == (128.0f64 / 255.0) as f32));
        assert_eq!(img.into_feature_map().unwrap().shape(), (1, 3, 4));
    }

    #[test]
    fn checkerboard() {
        let png = encode(2, 2, ColorType::Grayscale, BitDepth::Eight, &[0, 255, 255, 0]);
        let img = decode_png_gray(&png).unwrap();
        assert_eq!(img.values, vec![0.0, 1.0, 1.0, 0.0]);
        // too small to score
        assert!(matches!(img.into_feature_map(), Err(IoError::Invalid(_))));
    }

    #[test]
    fn gray16_is_big_endian() {
        let png = encode(1, 2, ColorType::Grayscale, BitDepth::Sixteen, &[0xff, 0xff, 0x80, 0x00]);
        let img = decode_png_gray(&png).unwrap();
        assert_eq!(img.values, vec![1.0, (32768.0f64 / 65535.0) as f32]);
    }

    #[test]
    fn rgb_uses_luma() {
        let png = encode(2, 1, ColorType::Rgb, BitDepth::Eight, &[255, 0, 0, 10, 20, 30]);
        let img = decode_png_gray(&png).unwrap();
        assert_eq!(img.values[0], (0.299f64) as f32);
        assert_eq!(
            img.values[1],
            ((0.299 * 10.0 + 0.587 * 20.0 + 0.114 * 30.0) / 255.0f64) as f32
        );
    }

    #[test]
    fn unsupported() {
        let png = encode(2, 1, ColorType::Indexed, BitDepth::Eight, &[0, 1]);
        assert!(matches!(decode_png_gray(&png), Err(IoError::UnsupportedColorType(_))));
        let png = encode(1, 1, ColorType::GrayscaleAlpha, BitDepth::Eight, &[9, 255]);
        assert!(matches!(decode_png_gray(&png), Err(IoError::UnsupportedColorType(_))));
        let png = encode(8, 1, ColorType::Grayscale, BitDepth::One, &[0b1010_1010]);
        assert!(matches!(decode_png_gray(&png), Err(IoError::UnsupportedBitDepth(1))));
        assert!(matches!(decode_png_gray(b"not a png"), Err(IoError::Decode(_))));
    }
}
