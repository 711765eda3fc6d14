use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::data::{MatrixFormat, DEFAULT_MIN_CELLS};
use crate::error::{Error, Result};
use crate::graph::FiltrationWeights;
use crate::nmf::{Variant, DEFAULT_EPS, DEFAULT_MAX_ITERS, DEFAULT_REL_TOL};

/// How the factorization rank is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankPolicy {
    /// Number of classes after filtering.
    #[default]
    Classes,
    /// `floor(sqrt(M))`.
    SqrtCells,
    Explicit(usize),
}

impl RankPolicy {
    pub fn resolve(self, classes: Option<usize>, cells: usize) -> Result<usize> {
        let r = match self {
            RankPolicy::Classes => classes.ok_or_else(|| {
                Error::Config(
                    "rank policy `classes` needs labels or an explicit cluster count".into(),
                )
            })?,
            RankPolicy::SqrtCells => sqrt_rank(cells),
            RankPolicy::Explicit(r) => r,
        };
        if r == 0 {
            return Err(Error::Config("rank resolved to 0".into()));
        }
        Ok(r)
    }
}

/// Meta-gene count used for visualization exports: `floor(sqrt(M))`.
pub fn sqrt_rank(cells: usize) -> usize {
    let mut r = (cells as f64).sqrt() as usize;
    while (r + 1) * (r + 1) <= cells {
        r += 1;
    }
    while r * r > cells {
        r -= 1;
    }
    r
}

impl fmt::Display for RankPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankPolicy::Classes => f.write_str("classes"),
            RankPolicy::SqrtCells => f.write_str("sqrt"),
            RankPolicy::Explicit(r) => write!(f, "{r}"),
        }
    }
}

impl FromStr for RankPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "classes" => Ok(RankPolicy::Classes),
            "sqrt" => Ok(RankPolicy::SqrtCells),
            other => other.parse().map(RankPolicy::Explicit).map_err(|_| {
                Error::Config(format!("bad rank `{s}`: use classes, sqrt or an integer"))
            }),
        }
    }
}

/// Filtration weights for the topological methods.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ZetaMode {
    /// Ones on the lower half of the levels, zeros above.
    #[default]
    LowerHalf,
    Fixed(FiltrationWeights),
    /// Every nonzero binary vector of length `T`.
    Sweep,
}

impl ZetaMode {
    pub fn is_sweep(&self) -> bool {
        matches!(self, ZetaMode::Sweep)
    }

    /// Candidate weight vectors for a filtration with `levels` steps.
    pub fn candidates(&self, levels: usize) -> Result<Vec<FiltrationWeights>> {
        match self {
            ZetaMode::LowerHalf => {
                let on = levels.div_ceil(2);
                Ok(vec![FiltrationWeights::new(
                    (0..levels)
                        .map(|t| if t < on { 1.0 } else { 0.0 })
                        .collect(),
                )?])
            }
            ZetaMode::Fixed(w) if w.levels() == levels => Ok(vec![w.clone()]),
            ZetaMode::Fixed(w) => Err(Error::Config(format!(
                "zeta has {} entries but {levels} filtration levels are configured",
                w.levels()
            ))),
            ZetaMode::Sweep => Ok(FiltrationWeights::binary_sweep(levels).collect()),
        }
    }
}

impl fmt::Display for ZetaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZetaMode::LowerHalf => f.write_str("lower-half"),
            ZetaMode::Fixed(w) => w.fmt(f),
            ZetaMode::Sweep => f.write_str("sweep"),
        }
    }
}

impl FromStr for ZetaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sweep" => Ok(ZetaMode::Sweep),
            "lower-half" | "default" => Ok(ZetaMode::LowerHalf),
            other => other.parse().map(ZetaMode::Fixed),
        }
    }
}

/// Heat-kernel width for GNMF / rGNMF.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SigmaPolicy {
    /// Mean squared k-NN edge length.
    #[default]
    Auto,
    Value(f64),
}

impl fmt::Display for SigmaPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaPolicy::Auto => f.write_str("auto"),
            SigmaPolicy::Value(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for SigmaPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" => Ok(SigmaPolicy::Auto),
            other => match other.parse::<f64>() {
                Ok(v) if v > 0.0 && v.is_finite() => Ok(SigmaPolicy::Value(v)),
                _ => Err(Error::Config(format!(
                    "bad sigma `{s}`: use auto or a positive number"
                ))),
            },
        }
    }
}

// String-backed serde for the policy types; integers and floats are
// accepted too so `rank = 5` works in TOML.
#[derive(Deserialize)]
#[serde(untagged)]
enum Scalar {
    Int(u64),
    Float(f64),
    Str(String),
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_string())
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let text = match Scalar::deserialize(d)? {
                    Scalar::Int(i) => i.to_string(),
                    Scalar::Float(f) => f.to_string(),
                    Scalar::Str(s) => s,
                };
                text.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(RankPolicy);
string_serde!(ZetaMode);
string_serde!(SigmaPolicy);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Preprocessing {
    /// Drop classes with fewer cells; `None` disables the filter.
    pub min_cells_per_class: Option<usize>,
    /// Drop genes expressed in fewer cells; off unless set.
    pub min_cells_per_gene: Option<usize>,
    pub log: bool,
    pub unit_scale: bool,
}

impl Default for Preprocessing {
    fn default() -> Self {
        Self {
            min_cells_per_class: Some(DEFAULT_MIN_CELLS),
            min_cells_per_gene: None,
            log: true,
            unit_scale: true,
        }
    }
}

/// Per-method overrides of the shared solver settings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MethodOverride {
    pub lambda: Option<f64>,
    pub max_iters: Option<usize>,
    pub rel_tol: Option<f64>,
}

/// Everything a benchmark run needs. Mirrors the config file layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSpec {
    /// Name used in the result table; defaults to the data file stem.
    pub name: Option<String>,
    pub data: Option<PathBuf>,
    pub format: Option<MatrixFormat>,
    pub labels: Option<PathBuf>,
    pub preprocessing: Preprocessing,
    pub methods: Vec<Variant>,
    pub rank: RankPolicy,
    pub lambda: f64,
    /// Neighbors for the heat-kernel graph.
    pub knn: usize,
    /// Filtration levels `T` for both persistent Laplacians.
    pub filtrations: usize,
    pub zeta: ZetaMode,
    pub sigma: SigmaPolicy,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub eps: f64,
    pub kmeans_restarts: usize,
    /// k-means cluster count when no labels are given.
    pub clusters: Option<usize>,
    pub overrides: BTreeMap<Variant, MethodOverride>,
    pub seed: u64,
    pub out: PathBuf,
    pub plots: bool,
    pub dump_graphs: bool,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            name: None,
            data: None,
            format: None,
            labels: None,
            preprocessing: Preprocessing::default(),
            methods: Variant::ALL.to_vec(),
            rank: RankPolicy::default(),
            lambda: 1.0,
            knn: 8,
            filtrations: 8,
            zeta: ZetaMode::default(),
            sigma: SigmaPolicy::default(),
            max_iters: DEFAULT_MAX_ITERS,
            rel_tol: DEFAULT_REL_TOL,
            eps: DEFAULT_EPS,
            kmeans_restarts: crate::eval::DEFAULT_RESTARTS,
            clusters: None,
            overrides: BTreeMap::new(),
            seed: 0,
            out: PathBuf::from("out"),
            plots: false,
            dump_graphs: false,
        }
    }
}

impl RunSpec {
    /// Reads a TOML or JSON config, chosen by extension (`.json` is JSON,
    /// anything else TOML).
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().and_then(|e| e.to_str()) == Some("json") {
            Ok(serde_json::from_str(&text)?)
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        }
    }

    pub fn dataset_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            self.data
                .as_deref()
                .and_then(Path::file_stem)
                .and_then(|s| s.to_str())
                .unwrap_or("dataset")
                .to_owned()
        })
    }
}
