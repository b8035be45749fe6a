//! Scheme parameters `γ = (b, r, t, n, m)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::check_code_length;

/// `b` copies of an `r`-qubit input, `t` magic states per copy, code length
/// `n = 4n'+1` and `m` ancilla columns. The grid has `p = b(r+t)` rows and
/// `q = n+m` columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGamma", into = "RawGamma")]
pub struct Gamma {
    b: usize,
    r: usize,
    t: usize,
    n: usize,
    m: usize,
}

#[derive(Serialize, Deserialize)]
struct RawGamma {
    b: usize,
    r: usize,
    t: usize,
    n: usize,
    m: usize,
}

impl TryFrom<RawGamma> for Gamma {
    type Error = Error;

    fn try_from(raw: RawGamma) -> Result<Self> {
        Gamma::new(raw.b, raw.r, raw.t, raw.n, raw.m)
    }
}

impl From<Gamma> for RawGamma {
    fn from(g: Gamma) -> Self {
        RawGamma {
            b: g.b,
            r: g.r,
            t: g.t,
            n: g.n,
            m: g.m,
        }
    }
}

impl Gamma {
    pub fn new(b: usize, r: usize, t: usize, n: usize, m: usize) -> Result<Self> {
        if b == 0 {
            return Err(Error::InvalidParams("b must be at least 1".into()));
        }
        if r == 0 {
            return Err(Error::InvalidParams("r must be at least 1".into()));
        }
        if m == 0 {
            return Err(Error::InvalidParams("m must be at least 1".into()));
        }
        check_code_length(n)?;
        Ok(Gamma { b, r, t, n, m })
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Rows per copy, `r + t`.
    pub fn rows_per_copy(&self) -> usize {
        self.r + self.t
    }

    /// Grid rows, `b(r+t)`.
    pub fn p(&self) -> usize {
        self.b * (self.r + self.t)
    }

    /// Grid columns, `n+m`.
    pub fn q(&self) -> usize {
        self.n + self.m
    }

    /// Global row of data qubit `z` (0-based) in copy `copy` (0-based).
    pub fn data_row(&self, copy: usize, z: usize) -> usize {
        debug_assert!(z < self.r);
        copy * self.rows_per_copy() + z
    }

    /// Global row of the `i`-th magic state (0-based) in copy `copy`.
    pub fn magic_row(&self, copy: usize, i: usize) -> usize {
        debug_assert!(i < self.t);
        copy * self.rows_per_copy() + self.r + i
    }

    pub fn data_rows(&self, copy: usize) -> Vec<usize> {
        (0..self.r).map(|z| self.data_row(copy, z)).collect()
    }

    pub fn magic_rows(&self, copy: usize) -> Vec<usize> {
        (0..self.t).map(|i| self.magic_row(copy, i)).collect()
    }

    /// Parses either an inline `b,r,t,n,m` tuple or a JSON object.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.starts_with('{') {
            serde_json::from_str(trimmed).map_err(|e| Error::InvalidParams(e.to_string()))
        } else {
            trimmed.parse()
        }
    }
}

impl FromStr for Gamma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(Error::InvalidParams(format!("expected b,r,t,n,m, got '{s}'")));
        }
        let mut v = [0usize; 5];
        for (slot, part) in v.iter_mut().zip(&parts) {
            *slot = part
                .parse()
                .map_err(|_| Error::InvalidParams(format!("'{part}' is not a non-negative integer")))?;
        }
        Gamma::new(v[0], v[1], v[2], v[3], v[4])
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{},{})", self.b, self.r, self.t, self.n, self.m)
    }
}
