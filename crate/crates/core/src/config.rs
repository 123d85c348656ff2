//! Scenario files.
//!
//! A scenario is one TOML document. Every key carries its unit in the name
//! and every section except `[object]` is optional, falling back to the
//! library defaults. Unknown keys are rejected. The fully resolved document
//! (defaults included) is what runs echo into their manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{DynamicsKind, DynamicsRegistry, DynamicsSpec};
use crate::gating::{AspectBounds, GateConfig};
use crate::geometry::{CameraModel, Pose, Quaternion};
use crate::frontend_sim::{Event, EventKind, NoiseSpec, Scenario, Shape, Trajectory};
use crate::tracker::{Extent, InitStd, ObjectModel, Symmetry, Tracker, TrackerConfig};
use crate::ukf::{Ukf, UkfParams};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceMode {
    #[default]
    Synthetic,
    Recorded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Initialization {
    /// Start from the true initial pose plus bounded noise, skipping detection.
    #[default]
    Perturbed,
    /// Start in detection mode and initialize from the first accepted detection.
    Detection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraSection {
    pub fx_px: f64,
    pub fy_px: f64,
    pub cx_px: f64,
    pub cy_px: f64,
    pub width_px: u32,
    pub height_px: u32,
}

impl Default for CameraSection {
    fn default() -> Self {
        let c = CameraModel::default();
        Self {
            fx_px: c.fx,
            fy_px: c.fy,
            cx_px: c.cx,
            cy_px: c.cy,
            width_px: c.width,
            height_px: c.height,
        }
    }
}

/// Process noise densities per error-state block, applied to all three axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProcessNoiseSection {
    pub position_m2_per_s: f64,
    pub velocity_m2_per_s3: f64,
    pub rotation_rad2_per_s: f64,
    pub angular_velocity_rad2_per_s3: f64,
}

impl Default for ProcessNoiseSection {
    fn default() -> Self {
        let q = DynamicsSpec::default().process_noise;
        Self {
            position_m2_per_s: q[0],
            velocity_m2_per_s3: q[3],
            rotation_rad2_per_s: q[6],
            angular_velocity_rad2_per_s3: q[9],
        }
    }
}

impl ProcessNoiseSection {
    fn to_array(&self) -> [f64; 12] {
        let mut q = [0.0; 12];
        for (block, v) in [
            self.position_m2_per_s,
            self.velocity_m2_per_s3,
            self.rotation_rad2_per_s,
            self.angular_velocity_rad2_per_s3,
        ]
        .into_iter()
        .enumerate()
        {
            q[3 * block..3 * block + 3].fill(v);
        }
        q
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObjectSection {
    pub class: String,
    pub shape: Shape,
    pub width_m: f64,
    pub height_m: f64,
    pub length_m: f64,
    /// Object-frame symmetry axis; overrides the shape's default when set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry_axis: Option<[f64; 3]>,
    /// Canonical orientation used by detection-based initialization.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init_orientation_wxyz: Option<[f64; 4]>,
    /// Transition model name; `constant-velocity` or a registered custom model.
    pub dynamics: String,
    pub process_noise: ProcessNoiseSection,
}

impl Default for ObjectSection {
    fn default() -> Self {
        Self {
            class: "box".into(),
            shape: Shape::Box,
            width_m: 0.3,
            height_m: 0.2,
            length_m: 0.25,
            symmetry_axis: None,
            init_orientation_wxyz: None,
            dynamics: "constant-velocity".into(),
            process_noise: ProcessNoiseSection::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrajectoryKind {
    #[default]
    ConstantVelocity,
    Waypoints,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Waypoint {
    pub t_s: f64,
    pub position_m: [f64; 3],
    pub orientation_wxyz: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrajectorySection {
    pub kind: TrajectoryKind,
    pub frame_rate_hz: f64,
    pub duration_s: f64,
    pub start_position_m: [f64; 3],
    pub start_orientation_wxyz: [f64; 4],
    pub velocity_mps: [f64; 3],
    pub body_rate_radps: [f64; 3],
    pub knot_spacing_s: f64,
    pub waypoints: Vec<Waypoint>,
}

impl Default for TrajectorySection {
    fn default() -> Self {
        Self {
            kind: TrajectoryKind::ConstantVelocity,
            frame_rate_hz: 30.0,
            duration_s: 10.0,
            start_position_m: [0.0, 0.0, 3.0],
            // a slightly oblique view; head-on poses are a degenerate case
            start_orientation_wxyz: [0.9362934889, 0.1894521183, 0.2863390145, 0.0593925841],
            velocity_mps: [0.0; 3],
            body_rate_radps: [0.0; 3],
            knot_spacing_s: 0.5,
            waypoints: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    pub pixel_sigma_px: f64,
    pub size_sigma_frac: f64,
    pub alpha_sigma_rad: f64,
    pub tracker_drift_px_per_frame: f64,
    pub occlusion_drift_px_per_frame: f64,
    pub detection_dropout: f64,
    pub distractor_prob: f64,
    pub init_translation_noise_m: f64,
    pub init_box_noise_frac: f64,
}

impl From<NoiseSpec> for NoiseSection {
    fn from(n: NoiseSpec) -> Self {
        Self {
            pixel_sigma_px: n.pixel_sigma,
            size_sigma_frac: n.size_sigma_frac,
            alpha_sigma_rad: n.alpha_sigma,
            tracker_drift_px_per_frame: n.tracker_drift_rate,
            occlusion_drift_px_per_frame: n.occlusion_drift_rate,
            detection_dropout: n.detection_dropout,
            distractor_prob: n.distractor_prob,
            init_translation_noise_m: n.init_translation_noise,
            init_box_noise_frac: n.init_box_noise_frac,
        }
    }
}

impl Default for NoiseSection {
    fn default() -> Self {
        NoiseSpec::default().into()
    }
}

impl NoiseSection {
    pub fn to_spec(&self) -> NoiseSpec {
        NoiseSpec {
            pixel_sigma: self.pixel_sigma_px,
            size_sigma_frac: self.size_sigma_frac,
            alpha_sigma: self.alpha_sigma_rad,
            tracker_drift_rate: self.tracker_drift_px_per_frame,
            occlusion_drift_rate: self.occlusion_drift_px_per_frame,
            detection_dropout: self.detection_dropout,
            distractor_prob: self.distractor_prob,
            init_translation_noise: self.init_translation_noise_m,
            init_box_noise_frac: self.init_box_noise_frac,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventSection {
    pub kind: EventKind,
    pub start_t_s: f64,
    pub end_t_s: f64,
    #[serde(default)]
    pub offset_m: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UkfSection {
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    pub center_var_px2: f64,
    pub size_var_px2: f64,
    pub angle_var_rad2: f64,
}

impl Default for UkfSection {
    fn default() -> Self {
        let p = UkfParams::default();
        Self {
            alpha: p.alpha,
            beta: p.beta,
            kappa: p.kappa,
            center_var_px2: p.measurement_noise[0],
            size_var_px2: p.measurement_noise[2],
            angle_var_rad2: p.measurement_noise[4],
        }
    }
}

impl UkfSection {
    pub fn to_params(&self) -> UkfParams {
        UkfParams {
            alpha: self.alpha,
            beta: self.beta,
            kappa: self.kappa,
            measurement_noise: [
                self.center_var_px2,
                self.center_var_px2,
                self.size_var_px2,
                self.size_var_px2,
                self.angle_var_rad2,
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AspectSection {
    pub gamma_min: f64,
    pub gamma_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GateSection {
    pub chi2_quantile: f64,
    pub ztest_quantile: f64,
    pub d_min_px: f64,
    pub aspect_ratio: BTreeMap<String, AspectSection>,
}

impl Default for GateSection {
    fn default() -> Self {
        let g = GateConfig::default();
        Self {
            chi2_quantile: g.chi2_quantile,
            ztest_quantile: g.ztest_quantile,
            d_min_px: g.d_min,
            aspect_ratio: BTreeMap::new(),
        }
    }
}

impl GateSection {
    pub fn to_config(&self) -> GateConfig {
        GateConfig {
            chi2_quantile: self.chi2_quantile,
            ztest_quantile: self.ztest_quantile,
            d_min: self.d_min_px,
            aspect_ratio: self
                .aspect_ratio
                .iter()
                .map(|(k, v)| (k.clone(), AspectBounds { min: v.gamma_min, max: v.gamma_max }))
                .collect(),
        }
    }
}

/// Initial standard deviations of the filter belief.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitStdSection {
    pub lateral_m: f64,
    /// Depth standard deviation as a fraction of the initial depth, floored at `lateral_m`.
    pub depth_frac: f64,
    pub velocity_mps: f64,
    pub rotation_rad: f64,
    pub angular_velocity_radps: f64,
}

impl From<InitStd> for InitStdSection {
    fn from(s: InitStd) -> Self {
        Self {
            lateral_m: s.lateral_m,
            depth_frac: s.depth_frac,
            velocity_mps: s.velocity_mps,
            rotation_rad: s.rotation_rad,
            angular_velocity_radps: s.angular_velocity_radps,
        }
    }
}

impl InitStdSection {
    pub fn to_std(&self) -> InitStd {
        InitStd {
            lateral_m: self.lateral_m,
            depth_frac: self.depth_frac,
            velocity_mps: self.velocity_mps,
            rotation_rad: self.rotation_rad,
            angular_velocity_radps: self.angular_velocity_radps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerSection {
    pub redetect_period_frames: u32,
    pub redetect_hard_fail: u32,
    pub uncertainty_trace_px2: f64,
    /// Prior around a pose recovered from a detection.
    pub detection_init: InitStdSection,
    /// Prior around a supplied initial pose (perturbed initialization).
    pub pose_init: InitStdSection,
}

impl Default for TrackerSection {
    fn default() -> Self {
        let c = TrackerConfig::default();
        Self {
            redetect_period_frames: c.redetect_period,
            redetect_hard_fail: c.redetect_hard_fail,
            uncertainty_trace_px2: c.uncertainty_trace,
            detection_init: c.detection_init.into(),
            pose_init: c.pose_init.into(),
        }
    }
}

impl TrackerSection {
    pub fn to_config(&self) -> TrackerConfig {
        TrackerConfig {
            redetect_period: self.redetect_period_frames,
            redetect_hard_fail: self.redetect_hard_fail,
            uncertainty_trace: self.uncertainty_trace_px2,
            detection_init: self.detection_init.to_std(),
            pose_init: self.pose_init.to_std(),
        }
    }
}

/// A whole scenario file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: SourceMode,
    pub initialization: Initialization,
    pub seed: u64,
    /// Measurement recording, relative to the scenario file; recorded mode only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recording: Option<PathBuf>,
    pub camera: CameraSection,
    pub object: ObjectSection,
    pub trajectory: TrajectorySection,
    pub noise: NoiseSection,
    pub ukf: UkfSection,
    pub gate: GateSection,
    pub tracker: TrackerSection,
    pub events: Vec<EventSection>,
}

fn quat(wxyz: [f64; 4]) -> Quaternion {
    Quaternion::new(wxyz[0], wxyz[1], wxyz[2], wxyz[3])
}

fn quat_ok(wxyz: &[f64; 4]) -> bool {
    wxyz.iter().all(|v| v.is_finite()) && wxyz.iter().map(|v| v * v).sum::<f64>() > 1e-12
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml(&text).map_err(|message| ConfigError::Parse {
            path: path.to_owned(),
            message,
        })
    }

    /// The resolved configuration, defaults included.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always serializable")
    }

    /// Every schema violation; empty when the configuration can run.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let cam = self.camera();
        if cam.check().is_err() {
            out.push("camera: focal lengths and image size must be positive".into());
        }
        let o = &self.object;
        if !(o.width_m > 0.0 && o.height_m > 0.0 && o.length_m > 0.0) {
            out.push("object: width_m, height_m and length_m must be positive".into());
        }
        if o.class.is_empty() || o.class.contains(char::is_whitespace) {
            out.push("object.class must be a non-empty label without whitespace".into());
        }
        if let Some(a) = o.symmetry_axis {
            if !(Vector3::from(a).norm() > 1e-12) {
                out.push("object.symmetry_axis must be a non-zero vector".into());
            }
        }
        if let Some(q) = &o.init_orientation_wxyz {
            if !quat_ok(q) {
                out.push("object.init_orientation_wxyz must be a non-zero quaternion".into());
            }
        }
        let pn = o.process_noise.to_array();
        if pn.iter().any(|v| !(*v >= 0.0)) {
            out.push("object.process_noise entries must be >= 0".into());
        }
        if let Err(e) = self.ukf.to_params().validate() {
            out.push(format!("ukf: {e}"));
        }
        out.extend(self.gate.to_config().violations());
        let t = &self.tracker;
        if t.redetect_period_frames == 0 {
            out.push("tracker.redetect_period_frames must be >= 1".into());
        }
        if !(t.detection_init.to_std().is_valid() && t.pose_init.to_std().is_valid()) || !(t.uncertainty_trace_px2 > 0.0) {
            out.push("tracker: initial standard deviations and uncertainty_trace_px2 must be > 0".into());
        }

        match self.mode {
            SourceMode::Synthetic => {
                if self.recording.is_some() {
                    out.push("recording is only used in recorded mode".into());
                }
                match self.scenario() {
                    Ok(sc) => out.extend(sc.violations()),
                    Err(e) => out.push(e),
                }
            }
            SourceMode::Recorded => {
                if self.recording.is_none() {
                    out.push("recorded mode needs a `recording` file".into());
                }
                if self.initialization == Initialization::Perturbed {
                    out.push("recorded mode supports only initialization = \"detection\"".into());
                }
            }
        }
        out
    }

    pub fn camera(&self) -> CameraModel {
        let c = &self.camera;
        CameraModel {
            fx: c.fx_px,
            fy: c.fy_px,
            cx: c.cx_px,
            cy: c.cy_px,
            width: c.width_px,
            height: c.height_px,
        }
    }

    pub fn object_model(&self) -> ObjectModel {
        let o = &self.object;
        let extent = Extent {
            width: o.width_m,
            height: o.height_m,
            length: o.length_m,
        };
        let mut model = o.shape.model(&o.class, extent);
        if let Some(a) = o.symmetry_axis {
            model.symmetry = Symmetry::AxisSymmetric(Vector3::from(a).normalize());
        }
        model.init_orientation = o.init_orientation_wxyz.map(quat);
        let kind = match o.dynamics.as_str() {
            "constant-velocity" => DynamicsKind::ConstantVelocity,
            other => DynamicsKind::Custom(other.to_owned()),
        };
        model.dynamics = DynamicsSpec {
            kind,
            process_noise: o.process_noise.to_array(),
        };
        model
    }

    pub fn trajectory(&self) -> Result<Trajectory, String> {
        let t = &self.trajectory;
        let built = match t.kind {
            TrajectoryKind::ConstantVelocity => {
                if !quat_ok(&t.start_orientation_wxyz) {
                    return Err("trajectory.start_orientation_wxyz must be a non-zero quaternion".into());
                }
                if !(t.duration_s > 0.0) {
                    return Err("trajectory.duration_s must be > 0".into());
                }
                Trajectory::constant_velocity(
                    Pose::new(quat(t.start_orientation_wxyz), Vector3::from(t.start_position_m)),
                    Vector3::from(t.velocity_mps),
                    Vector3::from(t.body_rate_radps),
                    0.0,
                    t.duration_s,
                    t.knot_spacing_s,
                )
            }
            TrajectoryKind::Waypoints => {
                if t.waypoints.iter().any(|w| !quat_ok(&w.orientation_wxyz)) {
                    return Err("trajectory.waypoints: orientations must be non-zero quaternions".into());
                }
                Trajectory::new(
                    t.waypoints
                        .iter()
                        .map(|w| (w.t_s, Pose::new(quat(w.orientation_wxyz), Vector3::from(w.position_m))))
                        .collect(),
                )
            }
        };
        built.map_err(|e| format!("trajectory: {e}"))
    }

    pub fn scenario(&self) -> Result<Scenario, String> {
        Ok(Scenario {
            camera: self.camera(),
            object: self.object_model(),
            trajectory: self.trajectory()?,
            noise: self.noise.to_spec(),
            events: self
                .events
                .iter()
                .map(|e| Event {
                    kind: e.kind,
                    start_t: e.start_t_s,
                    end_t: e.end_t_s,
                    offset_m: Vector3::from(e.offset_m),
                })
                .collect(),
            frame_rate_hz: self.trajectory.frame_rate_hz,
        })
    }

    pub fn tracker(&self) -> Tracker {
        self.tracker_with(DynamicsRegistry::default())
    }

    /// Builds the tracker with custom transition models available to it.
    pub fn tracker_with(&self, registry: DynamicsRegistry) -> Tracker {
        Tracker::new(
            self.object_model(),
            self.camera(),
            Ukf::with_registry(self.ukf.to_params(), registry),
            self.gate.to_config(),
            self.tracker.to_config(),
        )
    }
}
