use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::GraphRegularizer;

pub const DEFAULT_EPS: f64 = 1e-10;
pub const DEFAULT_MAX_ITERS: usize = 500;
pub const DEFAULT_REL_TOL: f64 = 1e-6;

/// Which regularizer a variant needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    None,
    HeatKernel,
    CutoffFiltration,
    KnnFiltration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "NMF")]
    Nmf,
    #[serde(rename = "rNMF")]
    RNmf,
    #[serde(rename = "GNMF")]
    Gnmf,
    #[serde(rename = "rGNMF")]
    RGnmf,
    #[serde(rename = "TNMF")]
    Tnmf,
    #[serde(rename = "rTNMF")]
    RTnmf,
    #[serde(rename = "kTNMF")]
    KTnmf,
    #[serde(rename = "krTNMF")]
    KrTnmf,
}

impl Variant {
    pub const ALL: [Variant; 8] = [
        Variant::KrTnmf,
        Variant::RTnmf,
        Variant::KTnmf,
        Variant::Tnmf,
        Variant::RGnmf,
        Variant::Gnmf,
        Variant::RNmf,
        Variant::Nmf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Nmf => "NMF",
            Variant::RNmf => "rNMF",
            Variant::Gnmf => "GNMF",
            Variant::RGnmf => "rGNMF",
            Variant::Tnmf => "TNMF",
            Variant::RTnmf => "rTNMF",
            Variant::KTnmf => "kTNMF",
            Variant::KrTnmf => "krTNMF",
        }
    }

    /// `l2,1` loss instead of squared Frobenius.
    pub fn is_robust(self) -> bool {
        matches!(
            self,
            Variant::RNmf | Variant::RGnmf | Variant::RTnmf | Variant::KrTnmf
        )
    }

    pub fn graph_kind(self) -> GraphKind {
        match self {
            Variant::Nmf | Variant::RNmf => GraphKind::None,
            Variant::Gnmf | Variant::RGnmf => GraphKind::HeatKernel,
            Variant::Tnmf | Variant::RTnmf => GraphKind::CutoffFiltration,
            Variant::KTnmf | Variant::KrTnmf => GraphKind::KnnFiltration,
        }
    }

    pub fn is_regularized(self) -> bool {
        self.graph_kind() != GraphKind::None
    }

    /// Variants built on a filtration, whose weights can be swept.
    pub fn is_topological(self) -> bool {
        matches!(
            self.graph_kind(),
            GraphKind::CutoffFiltration | GraphKind::KnnFiltration
        )
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    /// Case-insensitive; accepts `k-rTNMF` style hyphenation.
    fn from_str(s: &str) -> Result<Self> {
        let key = s.replace('-', "").to_ascii_lowercase();
        Variant::ALL
            .into_iter()
            .find(|v| v.name().to_ascii_lowercase() == key)
            .ok_or_else(|| Error::Config(format!("unknown method `{s}`")))
    }
}

/// Everything the solver needs besides the data and the initial factors.
#[derive(Debug, Clone)]
pub struct MethodConfig {
    pub variant: Variant,
    pub rank: usize,
    /// Regularization weight; ignored by the unregularized variants.
    pub lambda: f64,
    pub graph: Option<Arc<GraphRegularizer>>,
    pub max_iters: usize,
    /// Stop once `|f_prev - f| / (1 + |f|)` falls below this.
    pub rel_tol: f64,
    pub seed: u64,
    /// Added to every denominator entry of the updates.
    pub eps: f64,
}

impl MethodConfig {
    pub fn new(variant: Variant, rank: usize) -> Self {
        Self {
            variant,
            rank,
            lambda: 1.0,
            graph: None,
            max_iters: DEFAULT_MAX_ITERS,
            rel_tol: DEFAULT_REL_TOL,
            seed: 0,
            eps: DEFAULT_EPS,
        }
    }

    pub fn with_graph(mut self, graph: Arc<GraphRegularizer>) -> Self {
        self.graph = Some(graph);
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    /// Lambda actually applied to the graph term.
    pub fn effective_lambda(&self) -> f64 {
        if self.variant.is_regularized() {
            self.lambda
        } else {
            0.0
        }
    }

    pub fn validate(&self, cells: usize) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::OutOfRange("rank must be at least 1".into()));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::OutOfRange(format!(
                "lambda = {} must be >= 0",
                self.lambda
            )));
        }
        if self.eps.is_nan() || self.eps <= 0.0 {
            return Err(Error::OutOfRange(format!(
                "eps = {} must be positive",
                self.eps
            )));
        }
        if self.variant.is_regularized() {
            match &self.graph {
                None => {
                    return Err(Error::Config(format!(
                        "{} requires a graph regularizer",
                        self.variant
                    )))
                }
                Some(g) if g.len() != cells => {
                    return Err(Error::Dimension(format!(
                        "graph has {} nodes, data has {cells} cells",
                        g.len()
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert_eq!("k-rTNMF".parse::<Variant>().unwrap(), Variant::KrTnmf);
        assert_eq!("gnmf".parse::<Variant>().unwrap(), Variant::Gnmf);
        assert!("pca".parse::<Variant>().is_err());
    }

    #[test]
    fn regularized_needs_graph() {
        let cfg = MethodConfig::new(Variant::Tnmf, 2);
        assert!(cfg.validate(10).is_err());
        assert!(MethodConfig::new(Variant::RNmf, 2).validate(10).is_ok());
        assert!(MethodConfig::new(Variant::Nmf, 0).validate(10).is_err());
    }
}
