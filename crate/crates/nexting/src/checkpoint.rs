//! Weight checkpoint format: a compact binary dump of every learner's
//! weight vector.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic   "NXW1"            4 bytes
//! count   u64               number of learners
//! n       u64               feature dimension
//! then per learner:
//!   id    u64
//!   theta n x f64
//! ```

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::learner::Learner;

const MAGIC: &[u8; 4] = b"NXW1";

/// Writes all learner weights to a checkpoint file.
pub fn write_checkpoint(path: &Path, learners: &[Learner]) -> Result<()> {
    let n = learners.first().map(|l| l.n()).unwrap_or(0);
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    out.write_all(MAGIC)?;
    out.write_all(&(learners.len() as u64).to_le_bytes())?;
    out.write_all(&(n as u64).to_le_bytes())?;
    for learner in learners {
        if learner.n() != n {
            return Err(Error::Input(format!(
                "learner {} has dimension {}, checkpoint expects {n}",
                learner.id(),
                learner.n()
            )));
        }
        out.write_all(&(learner.id() as u64).to_le_bytes())?;
        for w in learner.theta() {
            out.write_all(&w.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

/// One learner's record in a checkpoint: its id and weight vector.
pub type CheckpointEntry = (u64, Vec<f64>);

/// Reads a checkpoint back as (id, weights) pairs plus the dimension.
pub fn read_checkpoint(path: &Path) -> Result<(usize, Vec<CheckpointEntry>)> {
    let mut input = BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Input(format!(
            "{} is not a weight checkpoint (bad magic)",
            path.display()
        )));
    }
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    let count = u64::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let n = u64::from_le_bytes(word) as usize;

    let mut learners = Vec::with_capacity(count);
    let mut buf = vec![0u8; n * 8];
    for _ in 0..count {
        input.read_exact(&mut word)?;
        let id = u64::from_le_bytes(word);
        input.read_exact(&mut buf)?;
        let theta: Vec<f64> = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        learners.push((id, theta));
    }
    Ok((n, learners))
}
