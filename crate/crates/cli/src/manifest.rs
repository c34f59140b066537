//! TOML run manifests, one flat table per subcommand.

use std::path::{Path, PathBuf};

use conical_core::regularization::{Mollifier, MollifierConfig};
use conical_core::wave::InitialData;
use conical_core::ConicalParams;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// A manifest that cannot be used; reported with exit status 2.
#[derive(Debug)]
pub struct ManifestError(pub String);

impl std::fmt::Display for ManifestError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

type Result<T> = std::result::Result<T, ManifestError>;

fn bad(msg: impl Into<String>) -> ManifestError {
    ManifestError(msg.into())
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| bad(format!("cannot read manifest {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| bad(format!("invalid manifest {}: {e}", path.display())))
}

fn params(alpha: f64) -> Result<ConicalParams> {
    ConicalParams::new(alpha).map_err(|e| bad(format!("alpha: {e}")))
}

fn check_eps(eps: &[f64], required: bool) -> Result<()> {
    if required && eps.is_empty() {
        return Err(bad("eps list must not be empty"));
    }
    if let Some(e) = eps.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(bad(format!("eps values must be positive, got {e}")));
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(bad(
            "eps values must be sorted in strictly descending order",
        ));
    }
    Ok(())
}

fn resolve(base: &Path, p: &Path) -> Result<PathBuf> {
    let full = if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    };
    if !full.exists() {
        return Err(bad(format!(
            "referenced path {} does not exist",
            full.display()
        )));
    }
    Ok(full)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MollifierKind {
    Gaussian,
    Bump,
    MomentCorrected,
    StrictNet,
}

fn default_moments() -> usize {
    1
}

fn mollifier(kind: MollifierKind, moments: usize) -> Result<Mollifier> {
    let cfg = match kind {
        MollifierKind::Gaussian => MollifierConfig::Gaussian,
        MollifierKind::Bump => MollifierConfig::Bump,
        MollifierKind::MomentCorrected => MollifierConfig::MomentCorrected { moments },
        MollifierKind::StrictNet => MollifierConfig::StrictNet,
    };
    Mollifier::new(cfg).map_err(|e| bad(format!("mollifier: {e}")))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyMetric {
    pub alpha: f64,
    #[serde(default = "d_1e5")]
    pub eigen_samples: usize,
    #[serde(default = "d_1e4")]
    pub pullback_samples: usize,
    #[serde(default = "d_1e6")]
    pub bound_samples: usize,
    #[serde(default = "d_eig_tol")]
    pub eigen_tol: f64,
    #[serde(default = "d_1e_12")]
    pub pullback_tol: f64,
    #[serde(default = "d_1e_12")]
    pub bound_tol: f64,
    #[serde(default = "d_3")]
    pub sobolev_k_min: u32,
    #[serde(default = "d_12")]
    pub sobolev_k_max: u32,
    #[serde(default = "d_0_05")]
    pub sobolev_stability: f64,
    #[serde(default = "d_1_5")]
    pub l1_decay: f64,
}

impl VerifyMetric {
    pub fn validate(&self) -> Result<ConicalParams> {
        if self.sobolev_k_min < 1 || self.sobolev_k_max < self.sobolev_k_min + 5 {
            return Err(bad(
                "sobolev octaves need 1 <= k_min and k_max >= k_min + 5",
            ));
        }
        params(self.alpha)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Regularize {
    pub alpha: f64,
    pub mollifier: MollifierKind,
    #[serde(default = "default_moments")]
    pub moments: usize,
    #[serde(default)]
    pub eps: Vec<f64>,
    /// Decide admissibility for this `‖φ‖₁` without sampling.
    pub l1_norm: Option<f64>,
    #[serde(default = "d_1e5")]
    pub samples: usize,
    #[serde(default = "d_1e_10")]
    pub tol: f64,
    #[serde(default = "d_256")]
    pub profile_points: usize,
    #[serde(default = "d_10")]
    pub threshold_k_max: u32,
}

impl Regularize {
    pub fn validate(&self) -> Result<(ConicalParams, Mollifier)> {
        let p = params(self.alpha)?;
        if let Some(l1) = self.l1_norm {
            if !(l1 >= 1.0 && l1.is_finite()) {
                return Err(bad(format!("l1_norm must be at least 1, got {l1}")));
            }
        }
        check_eps(&self.eps, self.l1_norm.is_none())?;
        Ok((p, mollifier(self.mollifier, self.moments)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveTask {
    Convergence,
    Drift,
    EpsStudy,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Wave {
    pub task: WaveTask,
    #[serde(default = "d_one")]
    pub alpha: f64,
    #[serde(default = "d_gaussian")]
    pub mollifier: MollifierKind,
    #[serde(default = "default_moments")]
    pub moments: usize,
    #[serde(default)]
    pub eps: Vec<f64>,
    #[serde(default = "d_128")]
    pub n: usize,
    #[serde(default = "d_one")]
    pub half_width: f64,
    #[serde(default = "d_0_5")]
    pub t_final: f64,
    pub data: Option<InitialData>,
    #[serde(default = "d_sizes")]
    pub sizes: Vec<usize>,
    #[serde(default = "d_mode")]
    pub mode: [u32; 2],
    #[serde(default = "d_1_9")]
    pub min_order: f64,
    #[serde(default = "d_1e_4")]
    pub drift_tol: f64,
    #[serde(default = "d_1")]
    pub record_every: usize,
    /// When false the eps study is recorded without asserting monotonicity.
    #[serde(default = "d_true")]
    pub assert_decreasing: bool,
}

impl Wave {
    pub fn validate(&self) -> Result<(ConicalParams, Mollifier)> {
        let p = params(self.alpha)?;
        let need_eps = matches!(self.task, WaveTask::Drift | WaveTask::EpsStudy);
        check_eps(&self.eps, need_eps)?;
        if self.task == WaveTask::EpsStudy && self.eps.len() < 2 {
            return Err(bad("eps_study needs at least two eps values"));
        }
        if self.n < 2
            || !self.n.is_multiple_of(2)
            || self.sizes.iter().any(|n| !n.is_multiple_of(2) || *n < 2)
        {
            return Err(bad("grid sizes must be even and at least 2"));
        }
        if !(self.half_width > 0.0 && self.t_final > 0.0) {
            return Err(bad("half_width and t_final must be positive"));
        }
        Ok((p, mollifier(self.mollifier, self.moments)?))
    }

    pub fn initial_data(&self) -> InitialData {
        self.data.unwrap_or(InitialData::Bump {
            center: [0.5, 0.3],
            radius: 0.3,
            amplitude: 1.0,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvesTask {
    Crossing,
    Canonicality,
    Extraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Oscillating,
    Escaping,
    Helix,
    File,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Curves {
    pub task: CurvesTask,
    #[serde(default = "d_half")]
    pub alpha: f64,
    #[serde(default = "d_gaussian")]
    pub mollifier: MollifierKind,
    #[serde(default = "default_moments")]
    pub moments: usize,
    #[serde(default = "d_family")]
    pub family: FamilyKind,
    pub family_file: Option<PathBuf>,
    #[serde(default)]
    pub eps: Vec<f64>,
    #[serde(default = "d_one")]
    pub window: f64,
    #[serde(default = "d_201")]
    pub nodes: usize,
    #[serde(default = "d_one")]
    pub q_exponent: f64,
    pub compact_radius: Option<f64>,
    pub expect_c_bounded: Option<bool>,
    #[serde(default = "d_50")]
    pub corpus_size: usize,
    #[serde(default = "d_0_95")]
    pub min_time_speed: f64,
    #[serde(default)]
    pub curve_files: Vec<PathBuf>,
    #[serde(default = "d_1e_8")]
    pub tol: f64,
    #[serde(default = "d_1000")]
    pub count: usize,
    #[serde(default = "d_2049")]
    pub curve_nodes: usize,
    #[serde(default = "d_start")]
    pub start: [f64; 4],
    #[serde(default = "d_end")]
    pub end: [f64; 4],
    #[serde(default = "d_normal")]
    pub normal: [f64; 4],
    #[serde(default = "d_8")]
    pub depth: u32,
    #[serde(default = "d_8usize")]
    pub min_keep: usize,
    #[serde(default = "d_1e_3")]
    pub limit_tol: f64,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Curves {
    pub fn validate(&mut self, manifest: &Path) -> Result<(ConicalParams, Mollifier)> {
        let p = params(self.alpha)?;
        self.base_dir = manifest.parent().unwrap_or(Path::new(".")).to_path_buf();
        if self.task == CurvesTask::Crossing {
            match self.family {
                FamilyKind::File => {
                    let f = self
                        .family_file
                        .as_ref()
                        .ok_or_else(|| bad("family = \"file\" needs family_file"))?;
                    self.family_file = Some(resolve(&self.base_dir, f)?);
                }
                _ => check_eps(&self.eps, true)?,
            }
        }
        self.curve_files = self
            .curve_files
            .iter()
            .map(|f| resolve(&self.base_dir, f))
            .collect::<Result<_>>()?;
        if self.nodes < 3 || self.curve_nodes < 3 {
            return Err(bad("node counts must be at least 3"));
        }
        if !(self.min_time_speed > 0.0 && self.min_time_speed < 1.0) {
            return Err(bad("min_time_speed must lie in (0, 1)"));
        }
        Ok((p, mollifier(self.mollifier, self.moments)?))
    }
}

fn d_1e5() -> usize {
    100_000
}
fn d_1e4() -> usize {
    10_000
}
fn d_1e6() -> usize {
    1_000_000
}
fn d_eig_tol() -> f64 {
    1e-10
}
fn d_1e_12() -> f64 {
    1e-12
}
fn d_1e_10() -> f64 {
    1e-10
}
fn d_1e_8() -> f64 {
    1e-8
}
fn d_1e_4() -> f64 {
    1e-4
}
fn d_1e_3() -> f64 {
    1e-3
}
fn d_3() -> u32 {
    3
}
fn d_8() -> u32 {
    8
}
fn d_8usize() -> usize {
    8
}
fn d_10() -> u32 {
    10
}
fn d_12() -> u32 {
    12
}
fn d_0_05() -> f64 {
    0.05
}
fn d_0_5() -> f64 {
    0.5
}
fn d_half() -> f64 {
    0.5
}
fn d_0_95() -> f64 {
    0.95
}
fn d_1_5() -> f64 {
    1.5
}
fn d_1_9() -> f64 {
    1.9
}
fn d_one() -> f64 {
    1.0
}
fn d_1() -> usize {
    1
}
fn d_50() -> usize {
    50
}
fn d_128() -> usize {
    128
}
fn d_201() -> usize {
    201
}
fn d_256() -> usize {
    256
}
fn d_1000() -> usize {
    1000
}
fn d_2049() -> usize {
    2049
}
fn d_true() -> bool {
    true
}
fn d_sizes() -> Vec<usize> {
    vec![64, 128, 256, 512]
}
fn d_mode() -> [u32; 2] {
    [1, 2]
}
fn d_gaussian() -> MollifierKind {
    MollifierKind::Gaussian
}
fn d_family() -> FamilyKind {
    FamilyKind::Oscillating
}
fn d_start() -> [f64; 4] {
    [0.0, 0.5, 0.3, 0.0]
}
fn d_end() -> [f64; 4] {
    [1.0, 0.6, 0.3, 0.0]
}
fn d_normal() -> [f64; 4] {
    [0.0, 0.0, 0.25, 0.0]
}
