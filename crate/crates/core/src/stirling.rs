//! Unsigned Stirling numbers of the first kind and the Lambert W series
//! coefficients built from them.
//!
//! `[p, q]` counts permutations of `p` objects with exactly `q` cycles. The
//! table is filled once from `[p+1, q] = p [p, q] + [p, q-1]` and is read-only
//! afterwards.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_P: usize = 128;

#[derive(Debug, Clone)]
pub struct StirlingTable {
    max_p: usize,
    // rows[p][q] for 0 <= q <= p
    rows: Vec<Vec<BigUint>>,
}

impl StirlingTable {
    pub fn new(max_p: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(max_p + 1);
        rows.push(vec![BigUint::one()]);
        for p in 0..max_p {
            let prev = &rows[p];
            let mut next = vec![BigUint::zero(); p + 2];
            for q in 1..=p + 1 {
                let mut v = if q <= p {
                    &prev[q] * BigUint::from(p)
                } else {
                    BigUint::zero()
                };
                v += &prev[q - 1];
                next[q] = v;
            }
            rows.push(next);
        }
        Self { max_p, rows }
    }

    pub fn max_p(&self) -> usize {
        self.max_p
    }

    /// `[p, q]`; zero when `q > p`.
    pub fn get(&self, p: usize, q: usize) -> Result<BigUint> {
        if p > self.max_p {
            return Err(Error::Capacity {
                limit: self.max_p,
                requested: p,
            });
        }
        Ok(self.rows[p].get(q).cloned().unwrap_or_default())
    }

    pub fn coefficient(&self, j: usize, m: usize) -> Result<SeriesCoefficient> {
        if m == 0 {
            return Err(Error::ZeroOrder(m));
        }
        let cycles = self.get(j + m, j + 1)?;
        let factorial: BigUint = (1..=m as u64).map(BigUint::from).product();
        let mut numer = BigInt::from(cycles);
        if j % 2 == 1 {
            numer = -numer;
        }
        let value = BigRational::new(numer, BigInt::from(factorial));
        let approx = value.to_f64().unwrap_or(f64::NAN);
        Ok(SeriesCoefficient {
            j,
            m,
            value,
            approx,
        })
    }
}

/// `c_{j,m} = (-1)^j [j+m, j+1] / m!`, kept exactly alongside its `f64` rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoefficient {
    pub j: usize,
    pub m: usize,
    pub value: BigRational,
    pub approx: f64,
}

fn shared_table() -> &'static StirlingTable {
    static TABLE: OnceLock<StirlingTable> = OnceLock::new();
    TABLE.get_or_init(|| StirlingTable::new(DEFAULT_MAX_P))
}

/// Unsigned Stirling number of the first kind from the shared default table.
pub fn stirling_cycle(p: usize, q: usize) -> Result<BigUint> {
    shared_table().get(p, q)
}

pub fn series_coefficient(j: usize, m: usize) -> Result<SeriesCoefficient> {
    shared_table().coefficient(j, m)
}

/// Double renderings of every `c_{j,m}` with `j + m <= max_weight`, indexed
/// as `[n][m - 1]` for weight `n = j + m`.
pub(crate) fn coefficient_layers(max_weight: usize) -> &'static [Vec<f64>] {
    static LAYERS: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    let layers = LAYERS.get_or_init(|| {
        let table = shared_table();
        (0..=crate::lambert::MAX_WEIGHT)
            .map(|n| {
                (1..=n)
                    .map(|m| table.coefficient(n - m, m).expect("within table").approx)
                    .collect()
            })
            .collect()
    });
    &layers[..=max_weight.min(crate::lambert::MAX_WEIGHT)]
}
