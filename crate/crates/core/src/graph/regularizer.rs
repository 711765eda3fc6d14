use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Symmetric graph regularizer split as `PL = PD - PA`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphRegularizer {
    adjacency: Array2<f64>,
    degree: Array1<f64>,
}

impl GraphRegularizer {
    /// Validates `adjacency` (square, symmetric, nonnegative, zero diagonal)
    /// and derives the degrees from it.
    pub fn from_adjacency(adjacency: Array2<f64>) -> Result<Self> {
        let (m, m2) = adjacency.dim();
        if m != m2 {
            return Err(Error::Dimension(format!("adjacency is {m} x {m2}")));
        }
        for i in 0..m {
            if adjacency[[i, i]] != 0.0 {
                return Err(Error::OutOfRange(format!(
                    "adjacency diagonal at {i} is nonzero"
                )));
            }
            for j in 0..i {
                let v = adjacency[[i, j]];
                if !(v >= 0.0 && v.is_finite()) || v != adjacency[[j, i]] {
                    return Err(Error::OutOfRange(format!(
                        "adjacency ({i},{j}) = {v} vs ({j},{i}) = {}",
                        adjacency[[j, i]]
                    )));
                }
            }
        }
        let degree = adjacency.sum_axis(ndarray::Axis(1));
        Ok(Self { adjacency, degree })
    }

    pub fn len(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.nrows() == 0
    }

    /// `PA`.
    pub fn adjacency(&self) -> &Array2<f64> {
        &self.adjacency
    }

    /// Diagonal of `PD`.
    pub fn degree(&self) -> &Array1<f64> {
        &self.degree
    }

    /// `PD` as a dense diagonal matrix.
    pub fn degree_matrix(&self) -> Array2<f64> {
        Array2::from_diag(&self.degree)
    }

    /// `PL = PD - PA`.
    pub fn laplacian(&self) -> Array2<f64> {
        let mut l = -&self.adjacency;
        for (i, d) in self.degree.iter().enumerate() {
            l[[i, i]] = *d;
        }
        l
    }

    /// `c * self`; used to check linearity in the weights.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::from_adjacency(&self.adjacency * c)
    }
}

/// Nonnegative per-level weights of a filtration, at least one positive.
#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationWeights(Vec<f64>);

impl FiltrationWeights {
    pub fn new(zeta: Vec<f64>) -> Result<Self> {
        if zeta.is_empty() {
            return Err(Error::OutOfRange(
                "filtration needs at least one level".into(),
            ));
        }
        if zeta.iter().any(|z| !(z.is_finite() && *z >= 0.0)) {
            return Err(Error::OutOfRange(format!(
                "weights must be nonnegative: {zeta:?}"
            )));
        }
        if zeta.iter().all(|z| *z == 0.0) {
            return Err(Error::OutOfRange(
                "at least one weight must be positive".into(),
            ));
        }
        Ok(Self(zeta))
    }

    /// All weights equal to one.
    pub fn ones(levels: usize) -> Result<Self> {
        Self::new(vec![1.0; levels])
    }

    /// Binary weights from a bit mask; bit `t` switches on level `t + 1`.
    pub fn from_mask(levels: usize, mask: u64) -> Result<Self> {
        Self::new((0..levels).map(|t| ((mask >> t) & 1) as f64).collect())
    }

    /// Every nonzero binary weight vector of the given length, in mask
    /// order `1..2^T`.
    pub fn binary_sweep(levels: usize) -> impl Iterator<Item = FiltrationWeights> {
        assert!((1..64).contains(&levels), "sweep needs 1..64 levels");
        (1u64..(1u64 << levels)).map(move |mask| Self::from_mask(levels, mask).unwrap())
    }

    pub fn levels(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `suffix[s] = zeta[s] + ... + zeta[T-1]`, plus a trailing zero.
    pub(crate) fn suffix_sums(&self) -> Vec<f64> {
        let mut suffix = vec![0.0; self.0.len() + 1];
        for t in (0..self.0.len()).rev() {
            suffix[t] = suffix[t + 1] + self.0[t];
        }
        suffix
    }
}

/// Comma separated, e.g. `1,0,1` or `0.5,1`.
impl fmt::Display for FiltrationWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|z| z.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for FiltrationWeights {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let zeta = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad filtration weight `{p}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(zeta)
    }
}
