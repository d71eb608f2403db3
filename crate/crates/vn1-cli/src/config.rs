//! Structured run configuration: TOML schema, validation, and conversion
//! into library types.
//!
//! Complex entries are explicit `[re, im]` pairs; matrices are row-major.
//! Every slot accepts exactly one specification.

use serde::Deserialize;
use vn1_core::detector::{
    DetectorModel, DiscreteCanonicalDetector, GaussianDetector, MatrixDetector,
};
use vn1_core::engine::{MeasurementSetup, Readout};
use vn1_core::linalg::{matrix_from_pairs, vector_from_pairs, CMatrix};
use vn1_core::spin::SpinOperator;
use vn1_core::states::{Postselection, SystemState};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    pub system: SystemSection,
    pub preparation: StateSection,
    #[serde(default)]
    pub postselection: Option<StateSection>,
    pub detector: DetectorSection,
    #[serde(default)]
    pub readout: Option<ReadoutSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub tolerances: ToleranceSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_lambda() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub dim: usize,
    /// Row-major [re, im] pairs, dim² of them.
    pub data: Vec<[f64; 2]>,
}

impl MatrixSpec {
    pub fn build(&self, what: &str) -> Result<CMatrix, CliError> {
        matrix_from_pairs(self.dim, &self.data)
            .map_err(|e| CliError::config(format!("{what}: {e}")))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    #[serde(default)]
    pub axis: Option<[f64; 3]>,
    #[serde(default)]
    pub matrix: Option<MatrixSpec>,
    /// Lift a 3-dimensional observable into the 4-dimensional two-qubit
    /// block form.
    #[serde(default)]
    pub embed_two_qubit: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    /// Amplitude vector as [re, im] pairs (normalized on load).
    #[serde(default)]
    pub pure: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub matrix: Option<MatrixSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    #[serde(default)]
    pub gaussian: Option<GaussianSection>,
    #[serde(default)]
    pub discrete: Option<DiscreteSection>,
    #[serde(default)]
    pub matrix: Option<MatrixDetectorSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSection {
    #[serde(default)]
    pub mean_q: f64,
    #[serde(default)]
    pub mean_p: f64,
    #[serde(default = "default_sigma_q")]
    pub sigma_q: f64,
    #[serde(default = "default_sigma_p")]
    pub sigma_p: f64,
    #[serde(default)]
    pub cov_qp: f64,
}

fn default_sigma_q() -> f64 {
    0.5
}
fn default_sigma_p() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteSection {
    pub d: usize,
    /// Pointer basis index 0..d (0 is the lowest readout eigenvalue).
    #[serde(default)]
    pub pointer_index: Option<usize>,
    #[serde(default)]
    pub state_matrix: Option<MatrixSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDetectorSection {
    pub rho: MatrixSpec,
    pub q_op: MatrixSpec,
    pub o_op: MatrixSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutSection {
    pub kind: ReadoutKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadoutKind {
    CanonicalP,
    Explicit,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    #[serde(default = "default_scale")]
    pub scale: SweepScale,
}

fn default_scale() -> SweepScale {
    SweepScale::Log
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Lambda,
    SigmaQ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepScale {
    Log,
    Linear,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    #[serde(default = "default_omega_floor")]
    pub omega_floor: f64,
    #[serde(default = "default_oracle_tol")]
    pub oracle: f64,
    #[serde(default = "default_wcond")]
    pub wcond_threshold: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_omega_floor() -> f64 {
    vn1_core::tolerances::OMEGA_FLOOR
}
fn default_oracle_tol() -> f64 {
    vn1_core::tolerances::ORACLE_DEFAULT
}
fn default_wcond() -> f64 {
    0.1
}
fn default_delta() -> f64 {
    0.2
}

impl Default for ToleranceSection {
    fn default() -> Self {
        Self {
            omega_floor: default_omega_floor(),
            oracle: default_oracle_tol(),
            wcond_threshold: default_wcond(),
            delta: default_delta(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[clap(rename_all = "snake_case")]
pub enum OutputFormat {
    Record,
    Csv,
}

pub fn load_config(path: &std::path::Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let config: RunConfig = toml::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    fn validate(&self) -> Result<(), CliError> {
        if !self.lambda.is_finite() {
            return Err(CliError::config("lambda must be finite"));
        }
        exactly_one(
            "system",
            &[("axis", self.system.axis.is_some()), ("matrix", self.system.matrix.is_some())],
        )?;
        exactly_one(
            "preparation",
            &[
                ("pure", self.preparation.pure.is_some()),
                ("matrix", self.preparation.matrix.is_some()),
            ],
        )?;
        if let Some(post) = &self.postselection {
            exactly_one(
                "postselection",
                &[("pure", post.pure.is_some()), ("matrix", post.matrix.is_some())],
            )?;
        }
        exactly_one(
            "detector",
            &[
                ("gaussian", self.detector.gaussian.is_some()),
                ("discrete", self.detector.discrete.is_some()),
                ("matrix", self.detector.matrix.is_some()),
            ],
        )?;
        if let Some(d) = &self.detector.discrete {
            exactly_one(
                "detector.discrete",
                &[
                    ("pointer_index", d.pointer_index.is_some()),
                    ("state_matrix", d.state_matrix.is_some()),
                ],
            )?;
        }
        if let Some(sweep) = &self.sweep {
            if sweep.steps < 2 {
                return Err(CliError::config("sweep.steps must be at least 2"));
            }
            if !(sweep.from.is_finite() && sweep.to.is_finite()) || sweep.from >= sweep.to {
                return Err(CliError::config(
                    "empty sweep range: sweep.from must be finite and below sweep.to",
                ));
            }
            if sweep.scale == SweepScale::Log && sweep.from <= 0.0 {
                return Err(CliError::config("log sweeps need a positive sweep.from"));
            }
        }
        Ok(())
    }

    pub fn observable(&self) -> Result<SpinOperator, CliError> {
        let base = if let Some(axis) = self.system.axis {
            SpinOperator::from_axis(axis).map_err(CliError::from_core_config)?
        } else {
            let spec = self.system.matrix.as_ref().expect("validated");
            SpinOperator::validate(spec.build("system.matrix")?)
                .map_err(CliError::from_core_config)?
        };
        if self.system.embed_two_qubit {
            base.embed_two_qubit().map_err(CliError::from_core_config)
        } else {
            Ok(base)
        }
    }

    pub fn preparation(&self, dim: usize) -> Result<SystemState, CliError> {
        build_state(&self.preparation, dim, "preparation")
    }

    pub fn postselection_operator(&self, dim: usize) -> Result<Option<Postselection>, CliError> {
        match &self.postselection {
            None => Ok(None),
            Some(section) => {
                if let Some(pure) = &section.pure {
                    check_len(pure.len(), dim, "postselection.pure")?;
                    Postselection::pure(&vector_from_pairs(pure))
                        .map(Some)
                        .map_err(CliError::from_core_config)
                } else {
                    let spec = section.matrix.as_ref().expect("validated");
                    let m = spec.build("postselection.matrix")?;
                    check_len(m.nrows(), dim, "postselection.matrix")?;
                    Postselection::new(m).map(Some).map_err(CliError::from_core_config)
                }
            }
        }
    }

    pub fn detector_model(&self) -> Result<DetectorModel, CliError> {
        if let Some(g) = &self.detector.gaussian {
            return GaussianDetector::new(g.mean_q, g.mean_p, g.sigma_q, g.sigma_p, g.cov_qp)
                .map(DetectorModel::Gaussian)
                .map_err(CliError::from_core_config);
        }
        if let Some(d) = &self.detector.discrete {
            let det = if let Some(index) = d.pointer_index {
                DiscreteCanonicalDetector::pointer_state(d.d, index)
            } else {
                let spec = d.state_matrix.as_ref().expect("validated");
                DiscreteCanonicalDetector::new(d.d, spec.build("detector.discrete.state_matrix")?)
            };
            return det.map(DetectorModel::Discrete).map_err(CliError::from_core_config);
        }
        let m = self.detector.matrix.as_ref().expect("validated");
        MatrixDetector::new(
            m.rho.build("detector.matrix.rho")?,
            m.q_op.build("detector.matrix.q_op")?,
            m.o_op.build("detector.matrix.o_op")?,
        )
        .map(DetectorModel::Matrix)
        .map_err(CliError::from_core_config)
    }

    pub fn readout(&self) -> Readout {
        match &self.readout {
            Some(section) => match section.kind {
                ReadoutKind::CanonicalP => Readout::CanonicalP,
                ReadoutKind::Explicit => Readout::Explicit,
            },
            // default by family: explicit for matrix detectors, canonical
            // otherwise
            None => {
                if self.detector.matrix.is_some() {
                    Readout::Explicit
                } else {
                    Readout::CanonicalP
                }
            }
        }
    }

    /// Assemble the full setup.
    pub fn setup(&self) -> Result<MeasurementSetup, CliError> {
        let observable = self.observable()?;
        let dim = observable.dim();
        let system = self.preparation(dim)?;
        let post = self.postselection_operator(dim)?;
        let detector = self.detector_model()?;
        MeasurementSetup::new(system, post, observable, detector, self.lambda, self.readout())
            .map(|s| s.with_omega_floor(self.tolerances.omega_floor))
            .map_err(CliError::from_core_config)
    }
}

fn build_state(section: &StateSection, dim: usize, what: &str) -> Result<SystemState, CliError> {
    if let Some(pure) = &section.pure {
        check_len(pure.len(), dim, what)?;
        SystemState::pure(&vector_from_pairs(pure)).map_err(CliError::from_core_config)
    } else {
        let spec = section.matrix.as_ref().expect("validated");
        let m = spec.build(&format!("{what}.matrix"))?;
        check_len(m.nrows(), dim, what)?;
        SystemState::new(m).map_err(CliError::from_core_config)
    }
}

fn check_len(got: usize, want: usize, what: &str) -> Result<(), CliError> {
    if got != want {
        return Err(CliError::config(format!(
            "{what}: dimension {got} does not match the observable dimension {want}"
        )));
    }
    Ok(())
}

fn exactly_one(slot: &str, options: &[(&str, bool)]) -> Result<(), CliError> {
    let given: Vec<&str> = options
        .iter()
        .filter(|(_, present)| *present)
        .map(|(name, _)| *name)
        .collect();
    match given.len() {
        1 => Ok(()),
        0 => Err(CliError::config(format!(
            "{slot}: exactly one of {} is required, none given",
            options.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
        ))),
        _ => Err(CliError::config(format!(
            "{slot}: exactly one specification allowed, got {}",
            given.join(" and ")
        ))),
    }
}
