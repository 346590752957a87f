//! Binary snapshot files.
//!
//! Layout, all little-endian:
//!
//! | field            | type        |
//! |------------------|-------------|
//! | magic `NLSP`     | 4 bytes     |
//! | format version   | u32 (= 1)   |
//! | dims             | u32         |
//! | components C     | u32         |
//! | points per axis  | u32 × 3     |
//! | length per axis  | f64 × 3     |
//! | values           | C·N × (f64 re, f64 im) |
//!
//! Unused axes store one point and length 0; readers ignore both. Values are
//! component-major, each component row-major with axis 0 slowest, the same
//! order as [`WaveFunction::data`].

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Grid, WaveFunction, MAX_DIMS};
use crate::num::{Complex, Real};

pub const MAGIC: &[u8; 4] = b"NLSP";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 * 3 + 4 * 3 + 8 * 3;

/// Decoded header of a snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct Header {
    pub version: u32,
    pub components: usize,
    pub points: Vec<usize>,
    pub lengths: Vec<f64>,
}

impl Header {
    pub fn total_points(&self) -> usize {
        self.points.iter().product()
    }
}

pub fn write_snapshot<T: Real, W: Write>(psi: &WaveFunction<T>, mut out: W) -> Result<()> {
    let grid = psi.grid();
    let mut buf = Vec::with_capacity(HEADER_LEN + psi.data().len() * 16);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(grid.dims() as u32).to_le_bytes());
    buf.extend_from_slice(&(psi.components() as u32).to_le_bytes());
    for axis in 0..MAX_DIMS {
        let n = grid.points().get(axis).copied().unwrap_or(1);
        buf.extend_from_slice(&(n as u32).to_le_bytes());
    }
    for axis in 0..MAX_DIMS {
        let l = grid.lengths().get(axis).map_or(0.0, |l| l.as_f64());
        buf.extend_from_slice(&l.to_le_bytes());
    }
    for z in psi.data() {
        buf.extend_from_slice(&z.re.as_f64().to_le_bytes());
        buf.extend_from_slice(&z.im.as_f64().to_le_bytes());
    }
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

pub fn save<T: Real>(psi: &WaveFunction<T>, path: impl AsRef<Path>) -> Result<()> {
    write_snapshot(psi, BufWriter::new(File::create(path)?))
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("slice of four bytes"))
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("slice of eight bytes"))
}

pub fn parse_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Snapshot(format!(
            "file too short for header ({} of {HEADER_LEN} bytes)",
            bytes.len()
        )));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Snapshot("bad magic, not an NLSP snapshot".into()));
    }
    let version = u32_at(bytes, 4);
    if version != VERSION {
        return Err(Error::Snapshot(format!(
            "unsupported format version {version} (expected {VERSION})"
        )));
    }
    let dims = u32_at(bytes, 8) as usize;
    if !(1..=MAX_DIMS).contains(&dims) {
        return Err(Error::Snapshot(format!("invalid dims {dims}")));
    }
    let components = u32_at(bytes, 12) as usize;
    if components == 0 {
        return Err(Error::Snapshot("zero components".into()));
    }
    let points: Vec<usize> = (0..dims).map(|a| u32_at(bytes, 16 + 4 * a) as usize).collect();
    let lengths: Vec<f64> = (0..dims).map(|a| f64_at(bytes, 28 + 8 * a)).collect();
    Ok(Header {
        version,
        components,
        points,
        lengths,
    })
}

/// Decodes a snapshot, building a fresh grid from its header.
pub fn read_snapshot<T: Real, R: Read>(mut input: R) -> Result<WaveFunction<T>> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    decode(&bytes)
}

pub fn load<T: Real>(path: impl AsRef<Path>) -> Result<WaveFunction<T>> {
    read_snapshot(BufReader::new(File::open(path)?))
}

pub fn decode<T: Real>(bytes: &[u8]) -> Result<WaveFunction<T>> {
    let header = parse_header(bytes)?;
    let lengths: Vec<T> = header.lengths.iter().map(|&l| T::of(l)).collect();
    let grid = Grid::new(&header.points, &lengths)
        .map_err(|e| Error::Snapshot(format!("header describes an invalid grid: {e}")))?;
    let count = header.components * header.total_points();
    let expected = HEADER_LEN + count * 16;
    if bytes.len() != expected {
        return Err(Error::Snapshot(format!(
            "payload size mismatch: expected {expected} bytes, found {}",
            bytes.len()
        )));
    }
    let data = (0..count)
        .map(|i| {
            let at = HEADER_LEN + 16 * i;
            Complex::new(T::of(f64_at(bytes, at)), T::of(f64_at(bytes, at + 8)))
        })
        .collect();
    WaveFunction::from_data(&grid, header.components, data)
}

/// Reads a one-component snapshot as a real table on `grid`; imaginary
/// parts are ignored. Used for tabulated external potentials.
pub fn load_real_field<T: Real>(path: impl AsRef<Path>, grid: &Grid<T>) -> Result<Vec<T>> {
    let psi: WaveFunction<T> = load(path)?;
    if psi.grid().points() != grid.points() {
        return Err(Error::Snapshot(format!(
            "table grid {:?} does not match run grid {:?}",
            psi.grid().points(),
            grid.points()
        )));
    }
    if psi.components() != 1 {
        return Err(Error::ComponentMismatch {
            expected: 1,
            found: psi.components(),
        });
    }
    Ok(psi.data().iter().map(|z| z.re).collect())
}
