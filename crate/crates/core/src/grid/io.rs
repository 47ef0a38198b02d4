//! Bit-exact readers and writers for binary PBM (P4) images and the `VOX`
//! volume format: an ASCII header line `VOX <nx> <ny> <nz>` followed by
//! `nx*ny*nz` bits packed MSB-first, x fastest, with no per-row padding.

use std::fs;
use std::path::Path;

use super::{BinaryGrid, Dims};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridFormat {
    /// Binary portable bitmap, 2D only.
    Pbm,
    /// Packed-bit volume, 3D only.
    Vox,
}

impl GridFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "pbm" => Some(GridFormat::Pbm),
            "vox" => Some(GridFormat::Vox),
            _ => None,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            GridFormat::Pbm => "pbm",
            GridFormat::Vox => "vox",
        }
    }

    pub fn for_ndim(ndim: usize) -> Self {
        if ndim == 3 {
            GridFormat::Vox
        } else {
            GridFormat::Pbm
        }
    }
}

/// Loads a grid and enforces a one-cell background frame.
pub fn load_grid(path: impl AsRef<Path>, format: GridFormat) -> Result<BinaryGrid> {
    let bytes = fs::read(path)?;
    read_grid(&bytes, format)
}

pub fn read_grid(bytes: &[u8], format: GridFormat) -> Result<BinaryGrid> {
    let grid = match format {
        GridFormat::Pbm => parse_pbm(bytes)?,
        GridFormat::Vox => parse_vox(bytes)?,
    };
    if grid.is_blank() {
        return Err(Error::Domain("empty shape".into()));
    }
    Ok(grid.ensure_padded())
}

pub fn save_grid(grid: &BinaryGrid, path: impl AsRef<Path>, format: GridFormat) -> Result<()> {
    let bytes = write_grid(grid, format)?;
    fs::write(path, bytes)?;
    Ok(())
}

pub fn write_grid(grid: &BinaryGrid, format: GridFormat) -> Result<Vec<u8>> {
    let dims = grid.dims();
    match (format, dims.ndim()) {
        (GridFormat::Pbm, 2) => {
            let (w, h) = (dims.extent(0), dims.extent(1));
            let mut out = format!("P4\n{w} {h}\n").into_bytes();
            let row_bytes = w.div_ceil(8);
            for y in 0..h {
                let mut row = vec![0u8; row_bytes];
                for x in 0..w {
                    if grid.get(dims.index([x, y, 0])) {
                        row[x / 8] |= 0x80 >> (x % 8);
                    }
                }
                out.extend_from_slice(&row);
            }
            Ok(out)
        }
        (GridFormat::Vox, 3) => {
            let [nx, ny, nz] = dims.raw();
            let mut out = format!("VOX {nx} {ny} {nz}\n").into_bytes();
            let mut packed = vec![0u8; dims.len().div_ceil(8)];
            for (i, &b) in grid.data().iter().enumerate() {
                if b {
                    packed[i / 8] |= 0x80 >> (i % 8);
                }
            }
            out.extend_from_slice(&packed);
            Ok(out)
        }
        (f, n) => Err(Error::Dimension(format!(
            "{} format cannot hold a {n}D grid",
            f.extension()
        ))),
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Format {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn expect(&mut self, token: &[u8]) -> Result<()> {
        if self.bytes[self.pos..].starts_with(token) {
            self.pos += token.len();
            Ok(())
        } else {
            self.fail(format!("expected {:?}", String::from_utf8_lossy(token)))
        }
    }

    fn number(&mut self) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            self.pos = start;
            return self.fail("expected an unsigned integer");
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .map_or_else(|| self.fail("integer out of range"), Ok)
    }

    /// Consumes the single whitespace byte that ends a header.
    fn header_end(&mut self) -> Result<()> {
        match self.bytes.get(self.pos) {
            Some(c) if c.is_ascii_whitespace() => {
                self.pos += 1;
                Ok(())
            }
            _ => self.fail("expected whitespace after header"),
        }
    }

    fn payload(&self, len: usize) -> Result<&'a [u8]> {
        let rest = &self.bytes[self.pos..];
        match rest.len() {
            n if n < len => self.fail(format!("payload truncated: need {len} bytes, found {n}")),
            n if n > len => Err(Error::Format {
                offset: self.pos + len,
                message: format!("{} trailing bytes after payload", n - len),
            }),
            _ => Ok(rest),
        }
    }
}

fn parse_pbm(bytes: &[u8]) -> Result<BinaryGrid> {
    let mut cur = Cursor { bytes, pos: 0 };
    cur.expect(b"P4")?;
    let w = cur.number()?;
    let h = cur.number()?;
    if w == 0 || h == 0 {
        return cur.fail("zero image extent");
    }
    cur.header_end()?;
    let row_bytes = w.div_ceil(8);
    let payload = cur.payload(row_bytes * h)?;
    let dims = Dims::new2(w, h);
    Ok(BinaryGrid::from_fn(dims, |c| {
        payload[c[1] * row_bytes + c[0] / 8] & (0x80 >> (c[0] % 8)) != 0
    }))
}

fn parse_vox(bytes: &[u8]) -> Result<BinaryGrid> {
    let mut cur = Cursor { bytes, pos: 0 };
    cur.expect(b"VOX")?;
    let nx = cur.number()?;
    let ny = cur.number()?;
    let nz = cur.number()?;
    if nx == 0 || ny == 0 || nz == 0 {
        return cur.fail("zero volume extent");
    }
    cur.header_end()?;
    let dims = Dims::new3(nx, ny, nz);
    let payload = cur.payload(dims.len().div_ceil(8))?;
    let data = (0..dims.len())
        .map(|i| payload[i / 8] & (0x80 >> (i % 8)) != 0)
        .collect();
    BinaryGrid::from_data(dims, data)
}
