//! On-disk cache of single sums `S(m, n, c)` in ascending `c`.
//!
//! Layout (little-endian): magic `KLSM`, version `u16`, `m: i64`, `n: i64`,
//! kind `u8`, then records `(c: u64, re: f64, im: f64)` for `c = 1, 2, …`.
//! Writes go to a temporary file that is renamed into place, so readers
//! only ever see complete files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kloosterman::partial::{single_value, SumOptions};
use crate::kloosterman::fast::Scratch;
use crate::kloosterman::SumKind;

pub const MAGIC: &[u8; 4] = b"KLSM";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 4 + 2 + 8 + 8 + 1;
pub const RECORD_LEN: usize = 24;

/// Parsed cache header.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CacheHeader {
    pub version: u16,
    pub m: i64,
    pub n: i64,
    pub kind: SumKind,
}

/// Serialize a header and the records for `c = 1..=values.len()`.
pub fn encode(m: i64, n: i64, kind: SumKind, values: &[Complex64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + RECORD_LEN * values.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&m.to_le_bytes());
    out.extend_from_slice(&n.to_le_bytes());
    out.push(kind.code());
    for (i, v) in values.iter().enumerate() {
        out.extend_from_slice(&(i as u64 + 1).to_le_bytes());
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

fn le_u64(b: &[u8]) -> u64 {
    u64::from_le_bytes(b.try_into().expect("8 bytes"))
}

/// Parse a cache image, checking magic, version, kind and record order.
pub fn decode(bytes: &[u8]) -> Result<(CacheHeader, Vec<Complex64>)> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::CacheFormat("truncated header".into()));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::CacheFormat("bad magic".into()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(Error::CacheFormat(format!("unsupported version {version}")));
    }
    let m = le_u64(&bytes[6..14]) as i64;
    let n = le_u64(&bytes[14..22]) as i64;
    let kind = SumKind::from_code(bytes[22]).ok_or_else(|| Error::CacheFormat(format!("unknown kind {}", bytes[22])))?;
    let body = &bytes[HEADER_LEN..];
    if body.len() % RECORD_LEN != 0 {
        return Err(Error::CacheFormat("truncated record".into()));
    }
    let mut values = Vec::with_capacity(body.len() / RECORD_LEN);
    for (i, rec) in body.chunks_exact(RECORD_LEN).enumerate() {
        let c = le_u64(&rec[..8]);
        if c != i as u64 + 1 {
            return Err(Error::CacheFormat(format!("record {i} has c = {c}, expected {}", i + 1)));
        }
        let re = f64::from_bits(le_u64(&rec[8..16]));
        let im = f64::from_bits(le_u64(&rec[16..24]));
        values.push(Complex64::new(re, im));
    }
    Ok((CacheHeader { version, m, n, kind }, values))
}

/// Directory of cache files, one per `(m, n, kind)`.
#[derive(Clone, Debug)]
pub struct SumCache {
    dir: PathBuf,
}

impl SumCache {
    pub fn new(dir: &Path) -> Self {
        SumCache { dir: dir.to_path_buf() }
    }

    pub fn path(&self, m: i64, n: i64, kind: SumKind) -> PathBuf {
        self.dir.join(format!("{kind}_{m}_{n}.klsm"))
    }

    /// Cached values for `c = 1, 2, …`; empty when no file exists.
    pub fn load(&self, m: i64, n: i64, kind: SumKind) -> Result<Vec<Complex64>> {
        let path = self.path(m, n, kind);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        let (h, values) = decode(&bytes)?;
        if h.m != m || h.n != n || h.kind != kind {
            return Err(Error::CacheFormat(format!("{} holds a different (m, n, kind)", path.display())));
        }
        Ok(values)
    }

    /// Replace the file for `(m, n, kind)` atomically.
    pub fn store(&self, m: i64, n: i64, kind: SumKind, values: &[Complex64]) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path(m, n, kind);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&encode(m, n, kind, values))?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// `(m, n, kind, records)` for every readable cache file, sorted by name.
    pub fn entries(&self) -> Result<Vec<(i64, i64, SumKind, usize)>> {
        let rd = match fs::read_dir(&self.dir) {
            Ok(rd) => rd,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        let mut paths: Vec<PathBuf> = rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "klsm"))
            .collect();
        paths.sort();
        let mut out = Vec::new();
        for p in paths {
            let (h, values) = decode(&fs::read(&p)?)?;
            out.push((h.m, h.n, h.kind, values.len()));
        }
        Ok(out)
    }

    /// Recompute the records at `cs` and return those whose stored bits differ.
    pub fn audit(&self, m: i64, n: i64, kind: SumKind, cs: &[u64], opts: &SumOptions) -> Result<Vec<u64>> {
        let values = self.load(m, n, kind)?;
        let opts = SumOptions { kind, ..opts.clone() };
        let mut scratch = Scratch::default();
        let mut bad = Vec::new();
        for &c in cs {
            if c == 0 || c as usize > values.len() {
                continue;
            }
            let fresh = single_value(m, n, c, &opts, &mut scratch);
            let stored = values[c as usize - 1];
            if fresh.re.to_bits() != stored.re.to_bits() || fresh.im.to_bits() != stored.im.to_bits() {
                bad.push(c);
            }
        }
        Ok(bad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let vals = vec![Complex64::new(0.1, -0.0), Complex64::new(f64::MIN_POSITIVE, 1e300), Complex64::new(-3.5, 2.25)];
        let (h, back) = decode(&encode(-7, 12, SumKind::EtaConjugate, &vals)).unwrap();
        assert_eq!(h, CacheHeader { version: VERSION, m: -7, n: 12, kind: SumKind::EtaConjugate });
        for (a, b) in vals.iter().zip(&back) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn rejects_damage() {
        let bytes = encode(1, 1, SumKind::Eta, &[Complex64::new(1.0, 0.0); 3]);
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode(&bad), Err(Error::CacheFormat(_))));
        assert!(matches!(decode(&bytes[..bytes.len() - 1]), Err(Error::CacheFormat(_))));
        let mut out_of_order = bytes.clone();
        out_of_order[HEADER_LEN] = 9;
        assert!(matches!(decode(&out_of_order), Err(Error::CacheFormat(_))));
    }

    #[test]
    fn missing_file_is_empty() {
        let dir = tempfile::tempdir().unwrap();
        assert!(SumCache::new(dir.path()).load(1, 1, SumKind::Eta).unwrap().is_empty());
    }
}
