//! Dataset export: CSV (coordinates then label, one row per point) and a
//! little-endian binary form.

use std::io::{BufRead, Read, Write};

use nalgebra::DMatrix;

use super::Dataset;
use crate::error::{Error, Result};

const BINARY_MAGIC: &[u8; 8] = b"LPFDS\0\0\x01";

impl Dataset {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let header: Vec<String> = (1..=self.ambient_dim()).map(|i| format!("x{i}")).collect();
        writeln!(out, "{},label", header.join(","))?;
        for i in 0..self.len() {
            let mut line = String::new();
            for v in self.point(i) {
                line.push_str(&format!("{v:?},"));
            }
            line.push_str(&self.labels()[i].to_string());
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    /// Reads the CSV written by [`Dataset::write_csv`]. A header row is
    /// optional; a trailing `label` column is required.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Dataset> {
        let mut coords = Vec::new();
        let mut labels = Vec::new();
        let mut width = None;
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with('x')) {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() < 2 {
                return Err(Error::Parse(format!("line {}: need coordinates and a label", lineno + 1)));
            }
            match width {
                None => width = Some(fields.len()),
                Some(w) if w != fields.len() => {
                    return Err(Error::Parse(format!("line {}: expected {w} fields", lineno + 1)))
                }
                _ => {}
            }
            for f in &fields[..fields.len() - 1] {
                coords.push(f.parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?);
            }
            let label = fields[fields.len() - 1];
            labels.push(label.parse::<usize>().map_err(|e| Error::Parse(format!("line {}: label: {e}", lineno + 1)))?);
        }
        let ambient = width.map(|w| w - 1).ok_or_else(|| Error::Empty("CSV has no data rows".into()))?;
        Dataset::new(DMatrix::from_column_slice(ambient, labels.len(), &coords), labels, 0)
    }

    /// Layout: magic, N, D, seed (u64 each), N·D f64 point-major, N u32 labels.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(BINARY_MAGIC)?;
        out.write_all(&(self.len() as u64).to_le_bytes())?;
        out.write_all(&(self.ambient_dim() as u64).to_le_bytes())?;
        out.write_all(&self.seed().to_le_bytes())?;
        for v in self.points().as_slice() {
            out.write_all(&v.to_le_bytes())?;
        }
        for &l in self.labels() {
            out.write_all(&(l as u32).to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Dataset> {
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic)?;
        if &magic != BINARY_MAGIC {
            return Err(Error::Parse("not a dataset binary file".into()));
        }
        let mut word = [0u8; 8];
        let mut next_u64 = |input: &mut R| -> Result<u64> {
            input.read_exact(&mut word)?;
            Ok(u64::from_le_bytes(word))
        };
        let n = next_u64(&mut input)? as usize;
        let ambient = next_u64(&mut input)? as usize;
        let seed = next_u64(&mut input)?;
        let mut values = vec![0.0; n * ambient];
        let mut buf = [0u8; 8];
        for v in values.iter_mut() {
            input.read_exact(&mut buf)?;
            *v = f64::from_le_bytes(buf);
        }
        let mut labels = Vec::with_capacity(n);
        let mut lb = [0u8; 4];
        for _ in 0..n {
            input.read_exact(&mut lb)?;
            labels.push(u32::from_le_bytes(lb) as usize);
        }
        Dataset::new(DMatrix::from_column_slice(ambient, n, &values), labels, seed)
    }
}
