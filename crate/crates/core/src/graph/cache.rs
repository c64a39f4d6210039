//! Binary graph cache.
//!
//! All integers and floats are little-endian.
//!
//! ```text
//! offset  size                 field
//! 0       8                    magic "BHPPGRPH"
//! 8       4                    version (u32, currently 1)
//! 12      8                    |U| (u64)
//! 20      8                    |V| (u64)
//! 28      8                    |E| (u64)
//! ..      8·(|U|+1)            U offsets (u64)
//! ..      4·|E|                U-side neighbor indices (u32, ascending per node)
//! ..      8·|E|                U-side weights (f64)
//! ..      8·(|V|+1)            V offsets (u64)
//! ..      4·|E|                V-side neighbor indices (u32)
//! ..      8·|E|                V-side weights (f64)
//! ..      variable             |U| labels then |V| labels, each a u32 byte
//!                              length followed by UTF-8 bytes
//! ```

use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use super::{index_labels, weight_sums, with_probs, BipartiteGraph, Csr};
use crate::error::{Error, Result};

pub const CACHE_MAGIC: &[u8; 8] = b"BHPPGRPH";
pub const CACHE_VERSION: u32 = 1;

pub fn write_cache<W: Write>(g: &BipartiteGraph, mut out: W) -> Result<()> {
    out.write_all(CACHE_MAGIC)?;
    out.write_u32::<LE>(CACHE_VERSION)?;
    out.write_u64::<LE>(g.u_count() as u64)?;
    out.write_u64::<LE>(g.v_count() as u64)?;
    out.write_u64::<LE>(g.edge_count() as u64)?;
    for csr in [&g.u_adj, &g.v_adj] {
        for &o in &csr.offsets {
            out.write_u64::<LE>(o as u64)?;
        }
        for &t in &csr.targets {
            out.write_u32::<LE>(t)?;
        }
        for &w in &csr.weights {
            out.write_f64::<LE>(w)?;
        }
    }
    for label in g.u_labels.iter().chain(&g.v_labels) {
        out.write_u32::<LE>(label.len() as u32)?;
        out.write_all(label.as_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Serialized bytes of the graph; also the input to metadata fingerprints.
pub(crate) fn cache_bytes(g: &BipartiteGraph) -> Vec<u8> {
    let mut buf = Vec::with_capacity(36 + g.edge_count() * 24 + (g.u_count() + g.v_count()) * 16);
    write_cache(g, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

pub fn read_cache<R: Read>(mut input: R, path: &Path) -> Result<BipartiteGraph> {
    let bad = |message: &str| Error::Cache { path: path.to_path_buf(), message: message.into() };
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != CACHE_MAGIC {
        return Err(bad("wrong magic bytes"));
    }
    let version = input.read_u32::<LE>()?;
    if version != CACHE_VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let u_count = input.read_u64::<LE>()? as usize;
    let v_count = input.read_u64::<LE>()? as usize;
    let m = input.read_u64::<LE>()? as usize;

    let mut read_side = |n: usize, other: usize| -> Result<Csr> {
        let mut offsets = vec![0u64; n + 1];
        input.read_u64_into::<LE>(&mut offsets)?;
        let offsets: Vec<usize> = offsets.into_iter().map(|o| o as usize).collect();
        if offsets[0] != 0 || offsets[n] != m || offsets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("offsets not strictly increasing from 0 to |E|"));
        }
        let mut targets = vec![0u32; m];
        input.read_u32_into::<LE>(&mut targets)?;
        if targets.iter().any(|&t| t as usize >= other) {
            return Err(bad("neighbor index out of range"));
        }
        let mut weights = vec![0f64; m];
        input.read_f64_into::<LE>(&mut weights)?;
        if weights.iter().any(|&w| !(w.is_finite() && w > 0.0)) {
            return Err(bad("non-positive weight"));
        }
        Ok(Csr { offsets, targets, weights, probs: Vec::new() })
    };
    let u_raw = read_side(u_count, v_count)?;
    let v_raw = read_side(v_count, u_count)?;

    let mut labels = Vec::with_capacity(u_count + v_count);
    for _ in 0..u_count + v_count {
        let len = input.read_u32::<LE>()? as usize;
        let mut bytes = vec![0u8; len];
        input.read_exact(&mut bytes)?;
        labels.push(String::from_utf8(bytes).map_err(|_| bad("label is not UTF-8"))?);
    }
    let v_labels = labels.split_off(u_count);
    let u_labels = labels;

    let ws_u = weight_sums(&u_raw);
    let ws_v = weight_sums(&v_raw);
    let u_adj = with_probs(u_raw, &ws_v);
    let v_adj = with_probs(v_raw, &ws_u);
    let u_index = index_labels(&u_labels, "U")?;
    let v_index = index_labels(&v_labels, "V")?;
    Ok(BipartiteGraph { u_adj, v_adj, ws_u, ws_v, u_labels, v_labels, u_index, v_index })
}

impl BipartiteGraph {
    pub fn save_cache(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        write_cache(self, std::io::BufWriter::new(file))
    }

    pub fn open_cache(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        read_cache(std::io::BufReader::new(file), path)
    }

    /// Hex SHA-256 of the cache encoding.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(cache_bytes(self));
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{synth_bipartite, SynthParams, WeightRange};
    use proptest::prelude::*;

    #[test]
    fn rejects_wrong_magic() {
        let mut bytes = cache_bytes(&crate::graph::fixtures::g3());
        bytes[0] = b'X';
        let err = read_cache(bytes.as_slice(), Path::new("mem")).unwrap_err();
        assert!(err.to_string().contains("magic"));
    }

    #[test]
    fn header_layout() {
        let bytes = cache_bytes(&crate::graph::fixtures::g3());
        assert_eq!(&bytes[..8], CACHE_MAGIC);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(bytes[12..20].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(bytes[28..36].try_into().unwrap()), 3);
    }

    proptest! {
        #[test]
        fn cache_round_trip_is_identical(nu in 1usize..20, nv in 1usize..20, seed: u64) {
            let m = (nu.max(nv) + (seed % 7) as usize).min(nu * nv);
            let g = synth_bipartite(&SynthParams {
                u_count: nu, v_count: nv, edge_count: m,
                weights: WeightRange::new(0.0, 10.0).unwrap(), degree_skew: Some(1.0),
            }, seed).unwrap();
            let bytes = cache_bytes(&g);
            let back = read_cache(bytes.as_slice(), Path::new("mem")).unwrap();
            prop_assert!(back == g);
            prop_assert_eq!(back.ws_u_all(), g.ws_u_all());
            prop_assert_eq!(cache_bytes(&back), bytes);
        }
    }
}
