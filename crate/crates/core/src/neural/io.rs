//! `CMNN 1` model files: a header, the embedding digest, the dimensions,
//! then every parameter block as `block <name> <rows> <cols>` followed by
//! one line per row.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::corpus::decode_utf8;
use crate::embed::EmbeddingTable;
use crate::error::{Error, ParseError, Result};
use crate::hmm::{parse_f64, parse_usize, Lines};

use super::{Arch, CellKind, NeuralDims, NeuralModel};

impl NeuralModel {
    pub fn to_text(&self) -> String {
        let mut out = format!("CMNN 1 {}\n", self.arch);
        writeln!(out, "embedding {}", self.embedding).unwrap();
        let d = &self.dims;
        writeln!(
            out,
            "dims input {} hidden {} tag {} encoder {}",
            d.input, d.hidden, d.tag_dim, d.encoder
        )
        .unwrap();
        for (name, m) in self.blocks() {
            writeln!(out, "block {name} {} {}", m.rows, m.cols).unwrap();
            for r in 0..m.rows {
                let row: Vec<String> = m.row(r).iter().map(|v| v.to_string()).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    /// Loads a model and checks it was trained on `table`.
    pub fn load(path: impl AsRef<Path>, table: &EmbeddingTable) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let model = parse_neural_bytes(&bytes).map_err(|e| Error::parse_file(path, e))?;
        model.check_embedding(table)?;
        Ok(model)
    }
}

pub fn parse_neural(text: &str) -> Result<NeuralModel, ParseError> {
    let mut lines = Lines::new(text);
    let header = lines.next_line("header")?;
    let arch: Arch = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["CMNN", "1", a] => a.parse().map_err(|e: String| lines.err(e))?,
        _ => return Err(lines.err("expected header `CMNN 1 <arch>`")),
    };
    let embedding = match lines.keyed("embedding")?.as_slice() {
        [d] if d.len() == 64 && d.bytes().all(|b| b.is_ascii_hexdigit()) => d.to_string(),
        _ => return Err(lines.err("expected `embedding <sha256 hex>`")),
    };
    let dims = match lines.keyed("dims")?.as_slice() {
        ["input", i, "hidden", h, "tag", t, "encoder", e] => NeuralDims {
            input: parse_usize(&lines, i)?,
            hidden: parse_usize(&lines, h)?,
            tag_dim: parse_usize(&lines, t)?,
            encoder: e.parse::<CellKind>().map_err(|m| lines.err(m))?,
        },
        _ => return Err(lines.err("expected `dims input N hidden H tag E encoder tanh|lstm`")),
    };
    if dims.input == 0 || dims.hidden == 0 || dims.tag_dim == 0 {
        return Err(lines.err("dimensions must be at least 1"));
    }
    // refuse absurd sizes before allocating
    let budget = 1usize << 24;
    let h = dims.hidden;
    let approx = dims
        .hidden
        .checked_mul(dims.input + 4 * h + dims.tag_dim + 8)
        .and_then(|v| v.checked_mul(16));
    if approx.is_none_or(|v| v > budget) {
        return Err(lines.err("model dimensions too large"));
    }
    let mut model = NeuralModel::init(arch, dims, embedding, 0);
    let names: Vec<&'static str> = model.blocks().iter().map(|(n, _)| *n).collect();
    for (name, block) in names.into_iter().zip(model.blocks_mut()) {
        let fields = lines.keyed("block")?;
        match fields.as_slice() {
            [n, r, c] if *n == name => {
                let (r, c) = (parse_usize(&lines, r)?, parse_usize(&lines, c)?);
                if (r, c) != (block.rows, block.cols) {
                    return Err(lines.err(format!(
                        "block {name} has shape {r}x{c}, expected {}x{}",
                        block.rows, block.cols
                    )));
                }
            }
            _ => return Err(lines.err(format!("expected `block {name} <rows> <cols>`"))),
        }
        for r in 0..block.rows {
            let line = lines.next_line("block row")?;
            let values = line.split(' ').map(|v| parse_f64(&lines, v)).collect::<Result<Vec<_>, _>>()?;
            if values.len() != block.cols {
                return Err(lines.err(format!("expected {} values, found {}", block.cols, values.len())));
            }
            block.row_mut(r).copy_from_slice(&values);
        }
    }
    lines.finish()?;
    Ok(model)
}

pub fn parse_neural_bytes(bytes: &[u8]) -> Result<NeuralModel, ParseError> {
    parse_neural(decode_utf8(bytes)?)
}
