//! Detect/track orchestration for a single object.
//!
//! The tracker starts in [`Mode::Detecting`]. A detection that survives the
//! class, aspect-ratio and edge-distance gates seeds the box tracker (and the
//! filter, when no belief exists yet) and switches to [`Mode::Tracking`]. In
//! tracking mode every frame runs a filter prediction and, if the tracked box
//! is consistent with the predicted box distribution, a measurement update.
//! A failed chi-squared gate, a failed edge z-test or the periodic timer sends
//! the tracker back to detection.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{DynamicsSpec, State13};
use crate::gating::{
    aspect_ratio_gate, chi2_gate, edge_distance_gate, edge_ztest, mahalanobis, EdgeTests, GateConfig, MEAS_DOF,
};
use crate::geometry::{
    predict_measurement, to_axis_aligned, AngledBox, AxisAlignedBox, CameraModel, Pose, Quaternion, VertexSet,
};
use crate::ukf::{Cov12, MeasurementStats, StateBelief, Ukf, UkfError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrackerError {
    #[error("bounding box is degenerate")]
    DegenerateBox,
    #[error("object model has no symmetry axis")]
    NoSymmetry,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extent {
    pub width: f64,
    pub height: f64,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum Symmetry {
    #[default]
    None,
    /// Rotations about this object-frame axis are unobservable and ignored.
    AxisSymmetric(Vector3<f64>),
}

/// Everything the tracker knows about one object class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectModel {
    pub class_label: String,
    pub verts: VertexSet,
    pub extent: Extent,
    pub dynamics: DynamicsSpec,
    pub symmetry: Symmetry,
    /// Canonical orientation used at initialization (e.g. upright), before the
    /// in-plane roll taken from the box.
    pub init_orientation: Option<Quaternion>,
}

impl ObjectModel {
    pub fn cuboid(class_label: &str, width: f64, height: f64, length: f64) -> Self {
        Self {
            class_label: class_label.to_owned(),
            verts: VertexSet::cuboid(width, height, length),
            extent: Extent { width, height, length },
            dynamics: DynamicsSpec::default(),
            symmetry: Symmetry::None,
            init_orientation: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Detecting,
    Tracking,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Detecting => "detecting",
            Mode::Tracking => "tracking",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub bbox: AxisAlignedBox,
    pub class_label: String,
    pub confidence: f64,
}

/// What the front-end delivered for one frame.
#[derive(Debug, Clone, PartialEq)]
pub enum FrameInput {
    Detections(Vec<Detection>),
    /// Output of the frame-to-frame box tracker; `None` when it lost the object.
    Tracked(Option<AngledBox>),
}

/// Standard deviations of a freshly initialized belief. Depth uses the larger
/// of `lateral_m` and `depth_frac` times the initial depth.
///
/// A single box constrains five of the six pose coordinates, so the remaining
/// direction (depth traded against out-of-plane rotation) is held only by this
/// prior. A loose angular-velocity prior lets the estimate slide along it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitStd {
    pub lateral_m: f64,
    pub depth_frac: f64,
    pub velocity_mps: f64,
    pub rotation_rad: f64,
    pub angular_velocity_radps: f64,
}

impl InitStd {
    /// Prior around the coarse pose recovered from a single detection.
    pub fn from_detection() -> Self {
        Self {
            lateral_m: 0.05,
            depth_frac: 0.1,
            velocity_mps: 0.1,
            rotation_rad: 0.3,
            angular_velocity_radps: 0.005,
        }
    }

    /// Prior around an externally supplied pose accurate to a few centimeters.
    pub fn from_given_pose() -> Self {
        Self {
            lateral_m: 0.025,
            depth_frac: 0.0,
            velocity_mps: 0.1,
            rotation_rad: 0.02,
            angular_velocity_radps: 0.005,
        }
    }

    pub fn belief(&self, pose: &Pose) -> StateBelief {
        let depth = (self.depth_frac * pose.translation.z.abs()).max(self.lateral_m);
        let (l, v, r, w) = (self.lateral_m, self.velocity_mps, self.rotation_rad, self.angular_velocity_radps);
        StateBelief::with_diagonal(State13::at_rest(pose), &[l, l, depth, v, v, v, r, r, r, w, w, w])
    }

    pub fn is_valid(&self) -> bool {
        [self.lateral_m, self.velocity_mps, self.rotation_rad, self.angular_velocity_radps]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite())
            && self.depth_frac >= 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackerConfig {
    /// Tracked frames after which detection is forced.
    pub redetect_period: u32,
    /// Consecutive gate failures after which a re-detection reinitializes the pose.
    pub redetect_hard_fail: u32,
    /// Above this `trace(Ŝ)` (px²) the belief is too uncertain to rank detections.
    pub uncertainty_trace: f64,
    pub detection_init: InitStd,
    pub pose_init: InitStd,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            redetect_period: 30,
            redetect_hard_fail: 5,
            uncertainty_trace: 200.0,
            detection_init: InitStd::from_detection(),
            pose_init: InitStd::from_given_pose(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackerState {
    pub mode: Mode,
    pub belief: Option<StateBelief>,
    pub last_box: Option<AngledBox>,
    pub frames_since_detection: u32,
    pub stats: Option<MeasurementStats>,
    pub gate_fail_streak: u32,
    pub last_t: Option<f64>,
}

impl Default for TrackerState {
    fn default() -> Self {
        Self {
            mode: Mode::Detecting,
            belief: None,
            last_box: None,
            frames_since_detection: 0,
            stats: None,
            gate_fail_streak: 0,
            last_t: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoseEstimate {
    pub t: f64,
    pub pose: Pose,
    pub cov: Cov12,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RedetectReason {
    Chi2Gate,
    EdgeZTest,
    Periodic,
    TrackerLost,
    FilterFault,
}

impl RedetectReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            RedetectReason::Chi2Gate => "chi2",
            RedetectReason::EdgeZTest => "edge",
            RedetectReason::Periodic => "periodic",
            RedetectReason::TrackerLost => "lost",
            RedetectReason::FilterFault => "fault",
        }
    }
}

/// Gate results for one tracked measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateOutcome {
    pub mahalanobis: f64,
    pub chi2_pass: bool,
    pub edges: EdgeTests,
}

/// Everything that happened during one [`Tracker::step`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub t: f64,
    pub mode_before: Mode,
    pub mode_after: Mode,
    pub estimate: Option<PoseEstimate>,
    pub gates: Option<GateOutcome>,
    pub redetect: Option<RedetectReason>,
    pub reinitialized: bool,
    pub fault: Option<UkfError>,
}

/// Coarse pose from a single box: depth by similar triangles on the object's
/// apparent size, center by back-projection, roll from the box angle.
pub fn init_pose_from_box(b: &AngledBox, model: &ObjectModel, camera: &CameraModel) -> Result<Pose, TrackerError> {
    if !(b.w > 0.0 && b.h > 0.0) || !b.w.is_finite() {
        return Err(TrackerError::DegenerateBox);
    }
    let canonical = model.init_orientation.unwrap_or_default();
    let r = canonical.rotation_matrix();
    let e = Vector3::new(model.extent.width, model.extent.height, model.extent.length);
    // image-plane extents of the canonically oriented object
    let apparent_w: f64 = (0..3).map(|j| r[(0, j)].abs() * e[j]).sum();
    let apparent_h: f64 = (0..3).map(|j| r[(1, j)].abs() * e[j]).sum();
    let (size, roll) = if apparent_w >= apparent_h {
        (apparent_w, b.alpha)
    } else {
        (apparent_h, b.alpha + FRAC_PI_2)
    };
    let depth = camera.fx * size / b.w;
    if !(depth.is_finite() && depth > 0.0) {
        return Err(TrackerError::DegenerateBox);
    }
    let translation = camera.back_project(b.x, b.y, depth);
    let rotation = Quaternion::from_axis_angle(&Vector3::z(), roll) * canonical;
    Ok(Pose::new(rotation, translation))
}

/// Pose with the given attitude whose projected axis-aligned extent matches
/// the detection `b` in center and long side, found by rescaling the depth.
pub fn place_on_box(
    b: &AxisAlignedBox,
    model: &ObjectModel,
    camera: &CameraModel,
    rotation: Quaternion,
) -> Result<Pose, TrackerError> {
    let long = b.w.max(b.h);
    if !(b.w > 0.0 && b.h > 0.0) || !long.is_finite() {
        return Err(TrackerError::DegenerateBox);
    }
    let e = &model.extent;
    let mut depth = camera.fx * e.width.max(e.height).max(e.length) / long;
    for _ in 0..3 {
        let pose = Pose::new(rotation, camera.back_project(b.x, b.y, depth));
        let reference = predict_measurement(camera, &pose, &model.verts).map_err(|_| TrackerError::DegenerateBox)?;
        let r = to_axis_aligned(&reference);
        depth *= r.w.max(r.h) / long;
    }
    if !(depth.is_finite() && depth > 0.0) {
        return Err(TrackerError::DegenerateBox);
    }
    Ok(Pose::new(rotation, camera.back_project(b.x, b.y, depth)))
}

/// Rotation with the twist about the model's symmetry axis removed.
pub fn apply_symmetry(model: &ObjectModel, pose: &Pose) -> Result<Pose, TrackerError> {
    match model.symmetry {
        Symmetry::AxisSymmetric(axis) => {
            let (swing, _) = pose.rotation.swing_twist(&axis);
            Ok(Pose::new(swing, pose.translation))
        }
        Symmetry::None => Err(TrackerError::NoSymmetry),
    }
}

fn lift(b: &AxisAlignedBox) -> AngledBox {
    AngledBox::from(*b)
}

/// Picks the detection to (re)initialize from: class and validity gates first,
/// then nearest in Mahalanobis distance when the belief is confident, else
/// the most confident one.
pub fn select_detection<'a>(
    dets: &'a [Detection],
    state: &TrackerState,
    model: &ObjectModel,
    camera: &CameraModel,
    gate: &GateConfig,
    cfg: &TrackerConfig,
) -> Option<&'a Detection> {
    let candidates: Vec<&Detection> = dets
        .iter()
        .filter(|d| d.class_label == model.class_label)
        .filter(|d| aspect_ratio_gate(&d.bbox, &d.class_label, gate))
        .filter(|d| edge_distance_gate(&d.bbox, camera, gate))
        .collect();

    let confident = match (&state.belief, &state.stats) {
        (Some(_), Some(stats)) if stats.s_hat.trace() <= cfg.uncertainty_trace => Some(stats),
        _ => None,
    };
    match confident {
        Some(stats) => candidates.into_iter().min_by(|a, b| {
            let da = mahalanobis(&lift(&a.bbox).as_vector(), stats).unwrap_or(f64::INFINITY);
            let db = mahalanobis(&lift(&b.bbox).as_vector(), stats).unwrap_or(f64::INFINITY);
            da.total_cmp(&db)
        }),
        None => candidates
            .into_iter()
            .rev()
            .max_by(|a, b| a.confidence.total_cmp(&b.confidence)),
    }
}

/// Why the tracker should leave tracking mode after measurement `z`, if at all.
pub fn redetect_reason(
    stats: &MeasurementStats,
    z: &AngledBox,
    state: &TrackerState,
    camera: &CameraModel,
    gate: &GateConfig,
    redetect_period: u32,
) -> Option<RedetectReason> {
    let consistent = mahalanobis(&z.as_vector(), stats)
        .map(|d| chi2_gate(d, MEAS_DOF, gate))
        .unwrap_or(false);
    if !consistent {
        Some(RedetectReason::Chi2Gate)
    } else if !edge_ztest(stats, camera, gate).all_pass() {
        Some(RedetectReason::EdgeZTest)
    } else if state.frames_since_detection >= redetect_period {
        Some(RedetectReason::Periodic)
    } else {
        None
    }
}

pub fn should_redetect(
    stats: &MeasurementStats,
    z: &AngledBox,
    state: &TrackerState,
    camera: &CameraModel,
    gate: &GateConfig,
    redetect_period: u32,
) -> bool {
    redetect_reason(stats, z, state, camera, gate, redetect_period).is_some()
}

/// Single-object tracker: filter, gates and the detect/track state machine.
#[derive(Debug, Clone)]
pub struct Tracker {
    pub model: ObjectModel,
    pub camera: CameraModel,
    pub ukf: Ukf,
    pub gate: GateConfig,
    pub cfg: TrackerConfig,
    pub state: TrackerState,
}

impl Tracker {
    pub fn new(model: ObjectModel, camera: CameraModel, ukf: Ukf, gate: GateConfig, cfg: TrackerConfig) -> Self {
        Self {
            model,
            camera,
            ukf,
            gate,
            cfg,
            state: TrackerState::default(),
        }
    }

    pub fn mode(&self) -> Mode {
        self.state.mode
    }

    pub fn belief(&self) -> Option<&StateBelief> {
        self.state.belief.as_ref()
    }

    /// Starts tracking from an externally supplied pose and first box.
    pub fn initialize(&mut self, t: f64, pose: &Pose, first_box: &AngledBox) {
        self.state = TrackerState {
            mode: Mode::Tracking,
            belief: Some(self.cfg.pose_init.belief(pose)),
            last_box: Some(*first_box),
            frames_since_detection: 0,
            stats: None,
            gate_fail_streak: 0,
            last_t: Some(t),
        };
    }

    fn drop_track(&mut self) {
        self.state.belief = None;
        self.state.stats = None;
        self.state.mode = Mode::Detecting;
    }

    fn estimate(&self, t: f64) -> Option<PoseEstimate> {
        match (self.state.mode, &self.state.belief) {
            (Mode::Tracking, Some(b)) => Some(PoseEstimate {
                t,
                pose: b.mean.pose(),
                cov: b.cov,
            }),
            _ => None,
        }
    }

    /// Advances the tracker to time `t` with the front-end's output.
    pub fn step(&mut self, t: f64, input: &FrameInput) -> StepReport {
        let mode_before = self.state.mode;
        let dt = self.state.last_t.map_or(0.0, |last| t - last);
        self.state.last_t = Some(t);
        let mut report = StepReport {
            t,
            mode_before,
            mode_after: mode_before,
            estimate: None,
            gates: None,
            redetect: None,
            reinitialized: false,
            fault: None,
        };

        if let Some(belief) = &self.state.belief {
            match self.ukf.predict(belief, dt, &self.model.dynamics) {
                Ok(b) => self.state.belief = Some(b),
                Err(e) => {
                    report.fault = Some(e);
                    if self.state.mode == Mode::Tracking {
                        report.redetect = Some(RedetectReason::FilterFault);
                    }
                    self.drop_track();
                }
            }
        }

        match (self.state.mode, input) {
            (Mode::Tracking, FrameInput::Tracked(Some(z))) => self.track(z, &mut report),
            (Mode::Tracking, FrameInput::Tracked(None)) => {
                report.redetect = Some(RedetectReason::TrackerLost);
                self.state.mode = Mode::Detecting;
            }
            (_, FrameInput::Detections(dets)) => self.detect(dets, &mut report),
            // a tracker output without an initialized tracker carries no usable information
            (Mode::Detecting, FrameInput::Tracked(_)) => {}
        }

        report.mode_after = self.state.mode;
        report.estimate = self.estimate(t);
        report
    }

    fn track(&mut self, z: &AngledBox, report: &mut StepReport) {
        let Some(belief) = self.state.belief.clone() else {
            self.state.mode = Mode::Detecting;
            return;
        };
        let prediction = match self.ukf.predict_measurement(&belief, &self.camera, &self.model.verts) {
            Ok(p) => p,
            Err(e) => {
                report.fault = Some(e);
                report.redetect = Some(RedetectReason::FilterFault);
                self.drop_track();
                return;
            }
        };
        let stats = prediction.stats;
        let d = mahalanobis(&z.as_vector(), &stats).unwrap_or(f64::INFINITY);
        let chi2_pass = chi2_gate(d, MEAS_DOF, &self.gate);
        report.gates = Some(GateOutcome {
            mahalanobis: d,
            chi2_pass,
            edges: edge_ztest(&stats, &self.camera, &self.gate),
        });

        if chi2_pass {
            match self.ukf.correct(&belief, &prediction, z) {
                Ok(post) => {
                    self.state.belief = Some(post);
                    self.state.gate_fail_streak = 0;
                }
                Err(e) => {
                    report.fault = Some(e);
                    report.redetect = Some(RedetectReason::FilterFault);
                    self.drop_track();
                    return;
                }
            }
        } else {
            self.state.gate_fail_streak += 1;
        }

        self.state.stats = Some(stats);
        self.state.last_box = Some(*z);
        self.state.frames_since_detection += 1;
        let reason = redetect_reason(&stats, z, &self.state, &self.camera, &self.gate, self.cfg.redetect_period);
        if reason.is_some() {
            report.redetect = reason;
            self.state.mode = Mode::Detecting;
        }
    }

    fn detect(&mut self, dets: &[Detection], report: &mut StepReport) {
        self.state.mode = Mode::Detecting;
        // fresh predicted box distribution for ranking detections
        self.state.stats = self
            .state
            .belief
            .as_ref()
            .and_then(|b| self.ukf.predict_measurement(b, &self.camera, &self.model.verts).ok())
            .map(|p| p.stats);

        let Some(det) = select_detection(dets, &self.state, &self.model, &self.camera, &self.gate, &self.cfg) else {
            return;
        };
        let seed = lift(&det.bbox);
        let reinit = self.state.belief.is_none() || self.state.gate_fail_streak >= self.cfg.redetect_hard_fail;
        if reinit {
            // axis-aligned detections say nothing about roll; a lost track
            // keeps its attitude, a new one starts from the canonical one
            let attitude = match &self.state.belief {
                Some(b) => b.mean.q,
                None => self.model.init_orientation.unwrap_or_default(),
            };
            let placed = place_on_box(&det.bbox, &self.model, &self.camera, attitude);
            match placed {
                Ok(pose) => {
                    self.state.belief = Some(self.cfg.detection_init.belief(&pose));
                    self.state.stats = None;
                    self.state.gate_fail_streak = 0;
                    report.reinitialized = true;
                }
                Err(_) => return,
            }
        }
        self.state.last_box = Some(seed);
        self.state.frames_since_detection = 0;
        self.state.mode = Mode::Tracking;
    }
}
