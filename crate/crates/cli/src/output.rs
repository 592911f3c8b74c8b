//! Deterministic file output: atomic writes, CSV tables, raw snapshots.

use kkp_core::spectral::Grid2D;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// Shortest decimal that round-trips to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Writes `bytes` to a sibling temporary file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp: PathBuf = path.with_file_name(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// A CSV table built in memory.
#[derive(Debug, Clone, Default)]
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let columns = header.len();
        let text = header.iter().map(|h| h.as_ref()).collect::<Vec<_>>().join(",") + "\n";
        Self { text, columns }
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) {
        assert_eq!(cells.len(), self.columns, "row width does not match header");
        let joined = cells.iter().map(|c| c.as_ref()).collect::<Vec<_>>().join(",");
        let _ = writeln!(self.text, "{joined}");
    }

    pub fn numbers(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|v| fmt_f64(*v)).collect();
        self.row(&cells);
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        write_atomic(path, self.text.as_bytes())
    }
}

/// `KKP1 nx ny lx ly t\n` followed by `nx·ny` little-endian `f64` values,
/// row-major with `x` fastest.
pub fn encode_snapshot(grid: &Grid2D, t: f64, field: &[f64]) -> Vec<u8> {
    assert_eq!(field.len(), grid.len());
    let header = format!("KKP1 {} {} {} {} {}\n", grid.nx, grid.ny, fmt_f64(grid.lx), fmt_f64(grid.ly), fmt_f64(t));
    let mut bytes = header.into_bytes();
    bytes.reserve(field.len() * 8);
    for v in field {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    bytes
}

/// Inverse of [`encode_snapshot`].
pub fn decode_snapshot(bytes: &[u8]) -> Option<(Grid2D, f64, Vec<f64>)> {
    let end = bytes.iter().position(|b| *b == b'\n')?;
    let header = std::str::from_utf8(&bytes[..end]).ok()?;
    let parts: Vec<&str> = header.split(' ').collect();
    if parts.len() != 6 || parts[0] != "KKP1" {
        return None;
    }
    let grid =
        Grid2D::new(parts[1].parse().ok()?, parts[2].parse().ok()?, parts[3].parse().ok()?, parts[4].parse().ok()?)
            .ok()?;
    let t: f64 = parts[5].parse().ok()?;
    let payload = &bytes[end + 1..];
    if payload.len() != grid.len() * 8 {
        return None;
    }
    let field = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Some((grid, t, field))
}

pub fn snapshot_name(index: usize) -> String {
    format!("snapshot_{index:04}.kkp")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0, -36.0 / 169.0, 1e-300, 6.02e23, 0.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(0.1), "0.1");
    }

    #[test]
    fn snapshot_round_trip() {
        let g = Grid2D::new(4, 2, 3.5, 1.0).unwrap();
        let field: Vec<f64> = (0..8).map(|i| i as f64 * 0.25 - 1.0).collect();
        let bytes = encode_snapshot(&g, 0.5, &field);
        assert!(bytes.starts_with(b"KKP1 4 2 3.5 1.0 0.5\n"));
        assert_eq!(bytes.len(), "KKP1 4 2 3.5 1.0 0.5\n".len() + 64);
        let (g2, t, f2) = decode_snapshot(&bytes).unwrap();
        assert_eq!((g2, t, f2), (g, 0.5, field));
        assert!(decode_snapshot(&bytes[..bytes.len() - 1]).is_none());
    }

    #[test]
    fn csv_layout() {
        let mut csv = Csv::new(&["a", "b"]);
        csv.numbers(&[1.0, 0.5]);
        csv.row(&["x", "undefined"]);
        assert_eq!(csv.as_str(), "a,b\n1.0,0.5\nx,undefined\n");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/file.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
