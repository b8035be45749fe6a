//! Binary ciphertext format.
//!
//! ```text
//! "QHE1" | tag u8 | b r t n m as u32 LE
//! tag 0x01: branches u64 | amplitudes u64 | per branch: weight f64, (re f64, im f64)*
//! tag 0x02: terms u64 | per term: column mask u64, labels u64, coefficient f64
//! ```
//! All numbers are little-endian. Pauli terms are sorted by label vector.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{CipherState, DenseCipher, PauliCipher};
use crate::error::{Error, Result};
use crate::params::Gamma;

pub const MAGIC: &[u8; 4] = b"QHE1";
pub const TAG_DENSE: u8 = 0x01;
pub const TAG_PAULI: u8 = 0x02;
const HEADER_LEN: usize = 4 + 1 + 5 * 4;

pub fn encode(state: &CipherState) -> Result<Vec<u8>> {
    let gamma = state.gamma();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(match state {
        CipherState::Dense(_) => TAG_DENSE,
        CipherState::Pauli(_) => TAG_PAULI,
    });
    for v in [gamma.b(), gamma.r(), gamma.t(), gamma.n(), gamma.m()] {
        let v = u32::try_from(v).map_err(|_| Error::InvalidParams(format!("{v} does not fit in u32")))?;
        out.extend_from_slice(&v.to_le_bytes());
    }
    match state {
        CipherState::Dense(c) => {
            let branches = c.materialize()?;
            let amps = 1u64 << (gamma.p() * gamma.q());
            out.extend_from_slice(&(branches.len() as u64).to_le_bytes());
            out.extend_from_slice(&amps.to_le_bytes());
            out.reserve(branches.len() * (8 + 16 * amps as usize));
            for (w, v) in &branches {
                out.extend_from_slice(&w.to_le_bytes());
                for a in v {
                    out.extend_from_slice(&a.re.to_le_bytes());
                    out.extend_from_slice(&a.im.to_le_bytes());
                }
            }
        }
        CipherState::Pauli(c) => {
            let mask = c.column_mask();
            out.extend_from_slice(&(c.term_count() as u64).to_le_bytes());
            for (&k, &coeff) in c.terms() {
                out.extend_from_slice(&mask.to_le_bytes());
                out.extend_from_slice(&k.to_le_bytes());
                out.extend_from_slice(&coeff.to_le_bytes());
            }
        }
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Decode(format!("truncated at byte {}", self.pos)))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}

/// Header fields without decoding the body.
pub fn peek_header(bytes: &[u8]) -> Result<(u8, Gamma)> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(Error::Decode("missing QHE1 header".into()));
    }
    let mut r = Reader { bytes, pos: 5 };
    let mut g = [0usize; 5];
    for slot in &mut g {
        *slot = r.u32()? as usize;
    }
    let gamma = Gamma::new(g[0], g[1], g[2], g[3], g[4]).map_err(|e| Error::Decode(e.to_string()))?;
    Ok((bytes[4], gamma))
}

pub fn decode(bytes: &[u8]) -> Result<CipherState> {
    let (tag, gamma) = peek_header(bytes)?;
    let mut r = Reader {
        bytes,
        pos: HEADER_LEN,
    };
    let state = match tag {
        TAG_DENSE => {
            let count = r.u64()? as usize;
            let amps = r.u64()? as usize;
            let expected = 1u64.checked_shl((gamma.p() * gamma.q()) as u32).unwrap_or(0) as usize;
            if amps != expected {
                return Err(Error::Decode(format!("{amps} amplitudes per branch, expected {expected}")));
            }
            let per = 8 + 16 * amps;
            if count.checked_mul(per) != Some(r.remaining()) {
                return Err(Error::Decode(format!("{count} branches do not match the body length")));
            }
            let mut branches = Vec::with_capacity(count);
            for _ in 0..count {
                let w = r.f64()?;
                let mut v = Vec::with_capacity(amps);
                for _ in 0..amps {
                    let re = r.f64()?;
                    v.push(Complex64::new(re, r.f64()?));
                }
                branches.push((w, v));
            }
            CipherState::Dense(DenseCipher::from_branches(gamma, branches)?)
        }
        TAG_PAULI => {
            let count = r.u64()? as usize;
            if count.checked_mul(24) != Some(r.remaining()) {
                return Err(Error::Decode(format!("{count} terms do not match the body length")));
            }
            let mut mask = None;
            let mut terms = BTreeMap::new();
            let mut last = None;
            for _ in 0..count {
                let m = r.u64()?;
                let k = r.u64()?;
                let c = r.f64()?;
                if *mask.get_or_insert(m) != m {
                    return Err(Error::Decode("terms disagree on the code column set".into()));
                }
                if last.is_some_and(|l| l >= k) {
                    return Err(Error::Decode("terms are not sorted by label vector".into()));
                }
                last = Some(k);
                terms.insert(k, c);
            }
            let mask = mask.unwrap_or(0);
            let columns: Vec<usize> = (0..64).filter(|y| mask & (1 << y) != 0).collect();
            CipherState::Pauli(PauliCipher::from_parts(gamma, columns, terms)?)
        }
        other => return Err(Error::Decode(format!("unknown backend tag {other:#04x}"))),
    };
    if r.remaining() != 0 {
        return Err(Error::Decode("trailing bytes".into()));
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::MixturePolicy;
    use crate::scheme::input::{assemble_input, PlainState};
    use crate::scheme::key::keygen;

    fn sample(gamma: Gamma) -> (CipherState, CipherState) {
        let block = assemble_input(&PlainState::random_pure(gamma.r(), 2), &gamma).unwrap();
        let key = keygen(&gamma, 6);
        (
            CipherState::Dense(DenseCipher::encrypt(&key, &block, MixturePolicy::Enumerate).unwrap()),
            CipherState::Pauli(PauliCipher::encrypt(&key, &block).unwrap()),
        )
    }

    #[test]
    fn round_trip_both_tags() {
        let g = Gamma::new(1, 1, 0, 5, 1).unwrap();
        let (dense, pauli) = sample(g);
        for ct in [dense, pauli] {
            let bytes = encode(&ct).unwrap();
            assert_eq!(&bytes[..4], MAGIC);
            let back = decode(&bytes).unwrap();
            assert_eq!(encode(&back).unwrap(), bytes);
            assert_eq!(back.gamma(), &g);
        }
    }

    #[test]
    fn dense_layout() {
        let g = Gamma::new(1, 1, 0, 5, 1).unwrap();
        let (dense, _) = sample(g);
        let bytes = encode(&dense).unwrap();
        assert_eq!(bytes[4], TAG_DENSE);
        assert_eq!(bytes.len(), HEADER_LEN + 16 + 32 * (8 + 16 * 64));
    }

    #[test]
    fn rejects_corruption() {
        let g = Gamma::new(1, 1, 0, 5, 1).unwrap();
        let (_, pauli) = sample(g);
        let bytes = encode(&pauli).unwrap();
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode(&extra).is_err());
        let mut tag = bytes.clone();
        tag[4] = 0x09;
        assert!(decode(&tag).is_err());
        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert!(decode(&magic).is_err());
        let mut gamma = bytes;
        gamma[17] = 4;
        assert!(decode(&gamma).is_err());
    }
}
