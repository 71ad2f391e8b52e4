//! Bijection between flat indices k >= 1 and block coordinates (q, j, sign).
//!
//! Every positive integer k is uniquely k = (2q^2 + 1)/2 + sign * (2j - 1)/2
//! with q >= 1, 1 <= j <= q and sign in {-1, +1}. Block q occupies exactly
//! the integer interval [q(q-1)+1, q(q+1)]: the minus half descends from
//! j = 1 at k = q^2 down to j = q at k = q(q-1)+1, the plus half ascends
//! from j = 1 at k = q^2+1 up to j = q at k = q(q+1).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The sign epsilon distinguishing the two halves of a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    #[inline]
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Plus => 1.0,
        }
    }

    #[inline]
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }
}

/// The triple (q, j, sign) identifying one tent interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCoordinates {
    pub q: u64,
    pub j: u64,
    pub sign: Sign,
}

impl BlockCoordinates {
    pub fn new(q: u64, j: u64, sign: Sign) -> Result<Self> {
        if q == 0 || j == 0 || j > q {
            return Err(Error::PositionOutOfBlock { q, j });
        }
        Ok(Self { q, j, sign })
    }
}

/// First index of block q: q(q-1) + 1.
#[inline]
pub fn block_first(q: u64) -> u64 {
    q * (q - 1) + 1
}

/// Last index of block q: q(q+1).
#[inline]
pub fn block_last(q: u64) -> u64 {
    q * (q + 1)
}

/// Largest supported flat index; keeps q below 2^31 so the block and
/// coordinate arithmetic stays far from u64 overflow.
pub const MAX_INDEX: u64 = 1 << 62;

/// The block q(k) containing index k.
pub fn block_of(k: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::NonPositiveIndex);
    }
    if k > MAX_INDEX {
        return Err(Error::IndexDepthExceeded);
    }
    // Initial guess from the square root, then exact integer fix-up.
    let mut q = (k as f64).sqrt().round() as u64;
    q = q.max(1);
    while block_first(q) > k {
        q -= 1;
    }
    while block_last(q) < k {
        q += 1;
    }
    Ok(q)
}

/// Decompose a flat index into its unique block coordinates.
pub fn decode(k: u64) -> Result<BlockCoordinates> {
    let q = block_of(k)?;
    let sq = q * q;
    if k <= sq {
        BlockCoordinates::new(q, sq + 1 - k, Sign::Minus)
    } else {
        BlockCoordinates::new(q, k - sq, Sign::Plus)
    }
}

/// Inverse of [`decode`].
pub fn encode(c: BlockCoordinates) -> Result<u64> {
    if c.q == 0 || c.j == 0 || c.j > c.q {
        return Err(Error::PositionOutOfBlock { q: c.q, j: c.j });
    }
    let sq = c.q * c.q;
    Ok(match c.sign {
        Sign::Minus => sq + 1 - c.j,
        Sign::Plus => sq + c.j,
    })
}

/// Deterministic basis-coordinate assignment for the witness vector at
/// position (q, j): q(q-1)/2 + j. Triangular numbering keeps supports of
/// different blocks disjoint, so inter-block sums decompose exactly in
/// the quasi-norm.
pub fn coordinate(q: u64, j: u64) -> Result<u64> {
    if q == 0 || j == 0 || j > q {
        return Err(Error::PositionOutOfBlock { q, j });
    }
    Ok(q * (q - 1) / 2 + j)
}
