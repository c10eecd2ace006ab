//! `.npy` reading and writing for single little-endian `f32`/`f64` tensors in
//! C order, rank 2 (`H×W`, read as one channel) or rank 3 (`C×H×W`).

use std::fs;
use std::path::Path;

use super::{fs_err, IoError};
use crate::types::{Element, FeatureMap};

const MAGIC: &[u8; 6] = b"\x93NUMPY";
const ALIGN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DType {
    F32,
    F64,
}

impl DType {
    pub fn descr(self) -> &'static str {
        match self {
            DType::F32 => f32::DESCR,
            DType::F64 => f64::DESCR,
        }
    }

    pub fn size(self) -> usize {
        match self {
            DType::F32 => 4,
            DType::F64 => 8,
        }
    }

    fn of<T: Element>() -> Self {
        if T::SIZE == 4 {
            DType::F32
        } else {
            DType::F64
        }
    }
}

/// Rank written to disk. A rank-2 file holds a single channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rank {
    Two,
    #[default]
    Three,
}

/// The parsed header dictionary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayFileHeader {
    pub dtype: DType,
    pub fortran_order: bool,
    pub shape: Vec<usize>,
}

impl ArrayFileHeader {
    /// `(C, H, W)`, treating rank 2 as one channel.
    pub fn chw(&self) -> Result<(usize, usize, usize), IoError> {
        match self.shape[..] {
            [h, w] => Ok((1, h, w)),
            [c, h, w] => Ok((c, h, w)),
            _ => Err(IoError::UnsupportedRank(self.shape.len())),
        }
    }

    fn to_dict(&self) -> String {
        let dims: Vec<String> = self.shape.iter().map(|d| d.to_string()).collect();
        let shape = if dims.len() == 1 {
            format!("({},)", dims[0])
        } else {
            format!("({})", dims.join(", "))
        };
        format!(
            "{{'descr': '{}', 'fortran_order': {}, 'shape': {}, }}",
            self.dtype.descr(),
            if self.fortran_order { "True" } else { "False" },
            shape
        )
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReadOptions {
    /// Accept `<f8` payloads by rounding them to `f32`.
    pub narrow_f64: bool,
}

/// A map in whichever element type the file stored.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyFeatureMap {
    F32(FeatureMap<f32>),
    F64(FeatureMap<f64>),
}

impl AnyFeatureMap {
    pub fn dtype(&self) -> DType {
        match self {
            AnyFeatureMap::F32(_) => DType::F32,
            AnyFeatureMap::F64(_) => DType::F64,
        }
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        match self {
            AnyFeatureMap::F32(fm) => fm.shape(),
            AnyFeatureMap::F64(fm) => fm.shape(),
        }
    }
}

// Minimal reader for the Python-literal header dict.
struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), IoError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(malformed(format!("expected '{}' at byte {}", c as char, self.pos)))
        }
    }

    fn string(&mut self) -> Result<&'a str, IoError> {
        let quote = self.peek().filter(|&q| q == b'\'' || q == b'"');
        let quote = quote.ok_or_else(|| malformed(format!("expected string at byte {}", self.pos)))?;
        self.pos += 1;
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos] != quote {
            self.pos += 1;
        }
        if self.pos == self.s.len() {
            return Err(malformed("unterminated string".into()));
        }
        let out = std::str::from_utf8(&self.s[start..self.pos])
            .map_err(|_| malformed("non-UTF-8 string".into()))?;
        self.pos += 1;
        Ok(out)
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("")
    }

    fn tuple(&mut self) -> Result<Vec<usize>, IoError> {
        self.expect(b'(')?;
        let mut dims = Vec::new();
        loop {
            if self.eat(b')') {
                return Ok(dims);
            }
            let word = self.word();
            let dim = word
                .parse::<usize>()
                .map_err(|_| malformed(format!("bad shape entry {word:?}")))?;
            dims.push(dim);
            if !self.eat(b',') {
                self.expect(b')')?;
                return Ok(dims);
            }
        }
    }
}

fn malformed(msg: String) -> IoError {
    IoError::MalformedHeader(msg)
}

fn parse_dict(text: &str) -> Result<ArrayFileHeader, IoError> {
    let mut cur = Cursor {
        s: text.as_bytes(),
        pos: 0,
    };
    let (mut descr, mut fortran, mut shape) = (None, None, None);
    cur.expect(b'{')?;
    loop {
        if cur.eat(b'}') {
            break;
        }
        let key = cur.string()?;
        cur.expect(b':')?;
        match key {
            "descr" => descr = Some(cur.string()?.to_owned()),
            "fortran_order" => {
                fortran = Some(match cur.word() {
                    "True" => true,
                    "False" => false,
                    other => return Err(malformed(format!("fortran_order = {other:?}"))),
                })
            }
            "shape" => shape = Some(cur.tuple()?),
            other => return Err(malformed(format!("unexpected key {other:?}"))),
        }
        if !cur.eat(b',') {
            cur.expect(b'}')?;
            break;
        }
    }
    let descr = descr.ok_or_else(|| malformed("missing 'descr'".into()))?;
    let fortran_order = fortran.ok_or_else(|| malformed("missing 'fortran_order'".into()))?;
    let shape = shape.ok_or_else(|| malformed("missing 'shape'".into()))?;
    let dtype = match descr.as_str() {
        "<f4" => DType::F32,
        "<f8" => DType::F64,
        _ => return Err(IoError::UnsupportedDType(descr)),
    };
    Ok(ArrayFileHeader {
        dtype,
        fortran_order,
        shape,
    })
}

/// Splits a file into its validated header and raw payload.
fn split(bytes: &[u8]) -> Result<(ArrayFileHeader, &[u8]), IoError> {
    if bytes.len() < 8 || &bytes[..6] != MAGIC {
        return Err(IoError::BadMagic);
    }
    let (major, minor) = (bytes[6], bytes[7]);
    let (len_bytes, start) = match major {
        1 => (2, 10),
        2 | 3 => (4, 12),
        _ => return Err(IoError::UnsupportedVersion(major, minor)),
    };
    if bytes.len() < start {
        return Err(malformed("truncated header".into()));
    }
    let header_len = if len_bytes == 2 {
        u16::from_le_bytes([bytes[8], bytes[9]]) as usize
    } else {
        u32::from_le_bytes([bytes[8], bytes[9], bytes[10], bytes[11]]) as usize
    };
    let end = start
        .checked_add(header_len)
        .filter(|&e| e <= bytes.len())
        .ok_or_else(|| malformed("header runs past end of file".into()))?;
    let text = std::str::from_utf8(&bytes[start..end])
        .map_err(|_| malformed("header is not text".into()))?;
    let header = parse_dict(text)?;
    header.chw()?;
    if header.fortran_order {
        return Err(IoError::ColumnMajorUnsupported);
    }
    let payload = &bytes[end..];
    let expected = header
        .shape
        .iter()
        .try_fold(header.dtype.size(), |acc, &d| acc.checked_mul(d))
        .unwrap_or(usize::MAX);
    if payload.len() != expected {
        return Err(IoError::PayloadLength {
            expected,
            actual: payload.len(),
        });
    }
    Ok((header, payload))
}

fn decode_values<T: Element>(payload: &[u8]) -> Vec<T> {
    payload.chunks_exact(T::SIZE).map(T::read_le).collect()
}

fn build<T: Element>(header: &ArrayFileHeader, values: Vec<T>) -> Result<FeatureMap<T>, IoError> {
    let (c, h, w) = header.chw()?;
    Ok(FeatureMap::new(c, h, w, values)?)
}

/// Decodes `.npy` bytes into a map of the stored element type.
pub fn decode_npy(bytes: &[u8]) -> Result<AnyFeatureMap, IoError> {
    let (header, payload) = split(bytes)?;
    Ok(match header.dtype {
        DType::F32 => AnyFeatureMap::F32(build(&header, decode_values(payload))?),
        DType::F64 => AnyFeatureMap::F64(build(&header, decode_values(payload))?),
    })
}

/// Serializes a map. Identical maps produce identical bytes.
pub fn encode_npy<T: Element>(fm: &FeatureMap<T>, rank: Rank) -> Result<Vec<u8>, IoError> {
    let (c, h, w) = fm.shape();
    let shape = match rank {
        Rank::Three => vec![c, h, w],
        Rank::Two if c == 1 => vec![h, w],
        Rank::Two => {
            return Err(IoError::UnsupportedRank(2));
        }
    };
    let header = ArrayFileHeader {
        dtype: DType::of::<T>(),
        fortran_order: false,
        shape,
    };
    let mut dict = header.to_dict();
    // pad with spaces so the payload starts on an ALIGN boundary, then '\n'
    let unpadded = MAGIC.len() + 2 + 2 + dict.len() + 1;
    let pad = (ALIGN - unpadded % ALIGN) % ALIGN;
    dict.extend(std::iter::repeat_n(' ', pad));
    dict.push('\n');
    let header_len = u16::try_from(dict.len())
        .map_err(|_| malformed("header longer than 65535 bytes".into()))?;

    let mut out = Vec::with_capacity(10 + dict.len() + fm.values().len() * T::SIZE);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&[1, 0]);
    out.extend_from_slice(&header_len.to_le_bytes());
    out.extend_from_slice(dict.as_bytes());
    for &v in fm.values() {
        v.write_le(&mut out);
    }
    Ok(out)
}

pub fn read_array_any(path: impl AsRef<Path>) -> Result<AnyFeatureMap, IoError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(fs_err(path))?;
    decode_npy(&bytes)
}

/// Reads an `f32` map. `<f8` files are accepted only with
/// [`ReadOptions::narrow_f64`].
pub fn read_array(path: impl AsRef<Path>, opts: ReadOptions) -> Result<FeatureMap<f32>, IoError> {
    match read_array_any(path)? {
        AnyFeatureMap::F32(fm) => Ok(fm),
        AnyFeatureMap::F64(fm) if opts.narrow_f64 => {
            let (c, h, w) = fm.shape();
            let narrowed = fm.into_values().into_iter().map(|v| v as f32).collect();
            Ok(FeatureMap::new(c, h, w, narrowed)?)
        }
        AnyFeatureMap::F64(_) => Err(IoError::UnsupportedDType(
            "<f8 (enable f64 narrowing to read as f32)".into(),
        )),
    }
}

/// Reads a map whose stored dtype must be exactly `T`.
pub fn read_array_as<T: Element>(path: impl AsRef<Path>) -> Result<FeatureMap<T>, IoError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(fs_err(path))?;
    let (header, payload) = split(&bytes)?;
    if header.dtype != DType::of::<T>() {
        return Err(IoError::UnsupportedDType(format!(
            "{} (expected {})",
            header.dtype.descr(),
            T::DESCR
        )));
    }
    build(&header, decode_values(payload))
}

pub fn write_array<T: Element>(fm: &FeatureMap<T>, path: impl AsRef<Path>) -> Result<(), IoError> {
    write_array_with_rank(fm, path, Rank::Three)
}

pub fn write_array_with_rank<T: Element>(
    fm: &FeatureMap<T>,
    path: impl AsRef<Path>,
    rank: Rank,
) -> Result<(), IoError> {
    let path = path.as_ref();
    let bytes = encode_npy(fm, rank)?;
    fs::write(path, bytes).map_err(fs_err(path))
}
