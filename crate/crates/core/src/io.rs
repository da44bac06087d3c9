//! JSON and CSV interchange.
//!
//! Operators travel as `{"dim": d, "re": [[...]], "im": [[...]]}` with
//! row-major real and imaginary parts. Frame files wrap a labeled family
//! of operators with a `kind` of `"frame"` or `"dual"`, and loading
//! re-validates every constraint the kind declares (Hermiticity always;
//! identity sum for frames; unit traces for duals). Floats are written in
//! the shortest form that parses back to the same value, so emitting,
//! loading, and re-emitting a file reproduces it byte for byte.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extend::ConvexSample;
use crate::frames::{DualFrame, Frame, OnticSpace};
use crate::nogo::{RestartPoint, SearchResult};
use crate::opalg::{DensityOperator, Effect, HermitianOperator, Povm};
use crate::repr::{QuasiDistribution, ResponseFunctions};

/// Row-major numeric form of a Hermitian operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl OperatorJson {
    pub fn from_operator(op: &HermitianOperator) -> Self {
        let d = op.dim();
        let m = op.matrix();
        let re = (0..d)
            .map(|i| (0..d).map(|j| m[(i, j)].re).collect())
            .collect();
        let im = (0..d)
            .map(|i| (0..d).map(|j| m[(i, j)].im).collect())
            .collect();
        Self { dim: d, re, im }
    }

    pub fn to_operator(&self) -> Result<HermitianOperator> {
        let d = self.dim;
        let shape_ok = self.re.len() == d
            && self.im.len() == d
            && self.re.iter().all(|row| row.len() == d)
            && self.im.iter().all(|row| row.len() == d);
        if !shape_ok {
            return Err(Error::Parse {
                message: format!("operator matrix shape does not match dim {d}"),
            });
        }
        let m = DMatrix::from_fn(d, d, |i, j| Complex64::new(self.re[i][j], self.im[i][j]));
        HermitianOperator::new(m)
    }
}

/// On-disk form of a frame or dual frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameFileJson {
    pub dim: usize,
    pub labels: Vec<String>,
    pub operators: Vec<OperatorJson>,
    pub kind: String,
}

/// A frame file after validation, tagged by its declared kind.
#[derive(Debug, Clone)]
pub enum LoadedFrame {
    Frame(Frame),
    Dual(DualFrame),
}

impl LoadedFrame {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Frame(_) => "frame",
            Self::Dual(_) => "dual",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Frame(f) => f.dim(),
            Self::Dual(g) => g.dim(),
        }
    }

    pub fn space(&self) -> &OnticSpace {
        match self {
            Self::Frame(f) => f.space(),
            Self::Dual(g) => g.space(),
        }
    }

    pub fn ops(&self) -> &[HermitianOperator] {
        match self {
            Self::Frame(f) => f.ops(),
            Self::Dual(g) => g.ops(),
        }
    }
}

impl FrameFileJson {
    pub fn from_frame(f: &Frame) -> Self {
        Self {
            dim: f.dim(),
            labels: f.space().labels().to_vec(),
            operators: f.ops().iter().map(OperatorJson::from_operator).collect(),
            kind: "frame".into(),
        }
    }

    pub fn from_dual(g: &DualFrame) -> Self {
        Self {
            dim: g.dim(),
            labels: g.space().labels().to_vec(),
            operators: g.ops().iter().map(OperatorJson::from_operator).collect(),
            kind: "dual".into(),
        }
    }

    pub fn validate(&self) -> Result<LoadedFrame> {
        let ops: Vec<HermitianOperator> = self
            .operators
            .iter()
            .map(|o| {
                if o.dim != self.dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim,
                        found: o.dim,
                    });
                }
                o.to_operator()
            })
            .collect::<Result<_>>()?;
        let space = OnticSpace::new(self.labels.clone())?;
        match self.kind.as_str() {
            "frame" => Ok(LoadedFrame::Frame(Frame::new(space, ops)?)),
            "dual" => Ok(LoadedFrame::Dual(DualFrame::new(space, ops)?)),
            other => Err(Error::Parse {
                message: format!("frame kind must be \"frame\" or \"dual\", got {other:?}"),
            }),
        }
    }
}

/// On-disk form of a POVM: a list of effects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmJson {
    pub outcomes: Vec<OperatorJson>,
}

impl PovmJson {
    pub fn from_povm(m: &Povm) -> Self {
        Self {
            outcomes: m
                .outcomes()
                .iter()
                .map(|e| OperatorJson::from_operator(e.op()))
                .collect(),
        }
    }

    pub fn to_povm(&self) -> Result<Povm> {
        let effects = self
            .outcomes
            .iter()
            .map(|o| Effect::new(o.to_operator()?))
            .collect::<Result<Vec<_>>>()?;
        Povm::new(effects)
    }
}

/// On-disk form of sampled functional values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplesJson {
    pub operators: Vec<OperatorJson>,
    pub values: Vec<f64>,
}

impl SamplesJson {
    pub fn from_sample(s: &ConvexSample) -> Self {
        Self {
            operators: s
                .operators()
                .iter()
                .map(OperatorJson::from_operator)
                .collect(),
            values: s.values().to_vec(),
        }
    }

    pub fn to_sample(&self) -> Result<ConvexSample> {
        let ops = self
            .operators
            .iter()
            .map(|o| o.to_operator())
            .collect::<Result<Vec<_>>>()?;
        ConvexSample::new(ops, self.values.clone())
    }
}

/// On-disk form of a negativity-minimizer outcome. The dual family is
/// stored as raw operators because projection steps need not preserve
/// unit traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResultJson {
    pub best_total_negativity: f64,
    pub duality_residual: f64,
    pub iterations: usize,
    pub frame: FrameFileJson,
    pub dual_operators: Vec<OperatorJson>,
    pub restart_trace: Vec<RestartPoint>,
}

impl SearchResultJson {
    pub fn from_result(r: &SearchResult) -> Self {
        Self {
            best_total_negativity: r.best_total_negativity,
            duality_residual: r.duality_residual,
            iterations: r.iterations,
            frame: FrameFileJson::from_frame(&r.frame),
            dual_operators: r
                .dual_ops
                .iter()
                .map(OperatorJson::from_operator)
                .collect(),
            restart_trace: r.restart_trace.clone(),
        }
    }

    pub fn to_result(&self) -> Result<SearchResult> {
        let frame = match self.frame.validate()? {
            LoadedFrame::Frame(f) => f,
            LoadedFrame::Dual(_) => {
                return Err(Error::Parse {
                    message: "search result frame must have kind \"frame\"".into(),
                })
            }
        };
        let dual_ops = self
            .dual_operators
            .iter()
            .map(|o| o.to_operator())
            .collect::<Result<Vec<_>>>()?;
        if dual_ops.len() != frame.len() {
            return Err(Error::LengthMismatch {
                left: dual_ops.len(),
                right: frame.len(),
            });
        }
        Ok(SearchResult {
            best_total_negativity: self.best_total_negativity,
            duality_residual: self.duality_residual,
            iterations: self.iterations,
            frame,
            dual_ops,
            restart_trace: self.restart_trace.clone(),
        })
    }
}

/// Serializes any interchange value to pretty JSON with a trailing
/// newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse {
        message: e.to_string(),
    })?;
    text.push('\n');
    Ok(text)
}

/// Parses a JSON string, reporting the offending line and column on
/// failure.
pub fn from_json_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        message: e.to_string(),
    })
}

pub fn read_json<T: DeserializeOwned, P: AsRef<Path>>(path: P) -> Result<T> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    from_json_str(&text)
}

pub fn write_json<T: Serialize, P: AsRef<Path>>(path: P, value: &T) -> Result<()> {
    let path = path.as_ref();
    let text = to_json_string(value)?;
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn load_operator<P: AsRef<Path>>(path: P) -> Result<HermitianOperator> {
    read_json::<OperatorJson, _>(path)?.to_operator()
}

pub fn load_state<P: AsRef<Path>>(path: P) -> Result<DensityOperator> {
    DensityOperator::new(load_operator(path)?)
}

pub fn load_povm<P: AsRef<Path>>(path: P) -> Result<Povm> {
    read_json::<PovmJson, _>(path)?.to_povm()
}

pub fn save_povm<P: AsRef<Path>>(path: P, m: &Povm) -> Result<()> {
    write_json(path, &PovmJson::from_povm(m))
}

pub fn load_frame_file<P: AsRef<Path>>(path: P) -> Result<LoadedFrame> {
    read_json::<FrameFileJson, _>(path)?.validate()
}

pub fn save_frame<P: AsRef<Path>>(path: P, f: &Frame) -> Result<()> {
    write_json(path, &FrameFileJson::from_frame(f))
}

pub fn save_dual<P: AsRef<Path>>(path: P, g: &DualFrame) -> Result<()> {
    write_json(path, &FrameFileJson::from_dual(g))
}

pub fn load_samples<P: AsRef<Path>>(path: P) -> Result<ConvexSample> {
    read_json::<SamplesJson, _>(path)?.to_sample()
}

pub fn save_samples<P: AsRef<Path>>(path: P, s: &ConvexSample) -> Result<()> {
    write_json(path, &SamplesJson::from_sample(s))
}

pub fn load_search_result<P: AsRef<Path>>(path: P) -> Result<SearchResult> {
    read_json::<SearchResultJson, _>(path)?.to_result()
}

pub fn save_search_result<P: AsRef<Path>>(path: P, r: &SearchResult) -> Result<()> {
    write_json(path, &SearchResultJson::from_result(r))
}

/// On-disk JSON form of a quasiprobability distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionJson {
    pub labels: Vec<String>,
    pub values: Vec<f64>,
}

impl DistributionJson {
    pub fn from_distribution(dist: &QuasiDistribution) -> Self {
        Self {
            labels: dist.space().labels().to_vec(),
            values: dist.values().iter().copied().collect(),
        }
    }
}

/// On-disk JSON form of a family of response functions, one row per
/// measurement outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponsesJson {
    pub labels: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ResponsesJson {
    pub fn from_responses(resp: &ResponseFunctions) -> Self {
        Self {
            labels: resp.space().labels().to_vec(),
            rows: resp
                .rows()
                .iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
        }
    }
}

fn csv_from_rows(labels: &[String], rows: &[Vec<f64>]) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(labels).map_err(|e| Error::Parse {
        message: e.to_string(),
    })?;
    for row in rows {
        let rendered: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        wtr.write_record(&rendered).map_err(|e| Error::Parse {
            message: e.to_string(),
        })?;
    }
    let bytes = wtr.into_inner().map_err(|e| Error::Parse {
        message: e.to_string(),
    })?;
    String::from_utf8(bytes).map_err(|e| Error::Parse {
        message: e.to_string(),
    })
}

/// CSV with the ontic labels as header and the distribution as one row.
pub fn distribution_csv(dist: &QuasiDistribution) -> Result<String> {
    let row: Vec<f64> = dist.values().iter().copied().collect();
    csv_from_rows(dist.space().labels(), &[row])
}

/// CSV with the ontic labels as header and one row per outcome.
pub fn responses_csv(resp: &ResponseFunctions) -> Result<String> {
    let rows: Vec<Vec<f64>> = resp
        .rows()
        .iter()
        .map(|r| r.iter().copied().collect())
        .collect();
    csv_from_rows(resp.space().labels(), &rows)
}

pub fn write_text<P: AsRef<Path>>(path: P, text: &str) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
