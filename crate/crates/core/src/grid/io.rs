//! Field serialization.
//!
//! Binary layout (little-endian): `u64 dim`, `f64 side`, `u64 cells`, then
//! `cells^dim` `f64` values in row-major order (last axis fastest).
//! JSON layout: `{"dim":..,"side":..,"cells":..,"values":[..]}`.

use super::{Geometry, GridField};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

pub fn write_binary(field: &GridField, mut w: impl Write) -> Result<()> {
    let g = field.geometry();
    w.write_all(&(g.dim as u64).to_le_bytes())?;
    w.write_all(&g.side.to_le_bytes())?;
    w.write_all(&(g.cells as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(field.values().len() * 8);
    for v in field.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_binary(mut r: impl Read) -> Result<GridField> {
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let dim = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let side = f64::from_le_bytes(word);
    r.read_exact(&mut word)?;
    let cells = u64::from_le_bytes(word) as usize;
    let geom = Geometry::new(dim, side, cells)?;
    let mut bytes = vec![0u8; geom.len() * 8];
    r.read_exact(&mut bytes)?;
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    GridField::from_values(geom, values)
}

#[derive(Serialize, Deserialize)]
struct JsonField {
    dim: usize,
    side: f64,
    cells: usize,
    values: Vec<f64>,
}

pub fn write_json(field: &GridField, w: impl Write) -> Result<()> {
    let g = field.geometry();
    let j = JsonField { dim: g.dim, side: g.side, cells: g.cells, values: field.values().to_vec() };
    serde_json::to_writer(w, &j).map_err(|e| Error::Serde(e.to_string()))
}

pub fn read_json(r: impl Read) -> Result<GridField> {
    let j: JsonField = serde_json::from_reader(r).map_err(|e| Error::Serde(e.to_string()))?;
    GridField::from_values(Geometry::new(j.dim, j.side, j.cells)?, j.values)
}
