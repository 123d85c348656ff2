//! Measurement sources standing in for the learned detector and box tracker.
//!
//! [`SyntheticSource`] renders boxes from a ground-truth trajectory and
//! corrupts them with a drift-plus-Gaussian model of a visual tracker.
//! [`RecordedSource`] replays a measurement file. Both implement
//! [`MeasurementSource`], which the tracker loop pulls from frame by frame.

mod recorded;
mod shapes;

pub use recorded::{read_recorded, write_recorded, ParseError, RecordedSource};
pub use shapes::{Shape, RIM_SAMPLES};

use nalgebra::{Vector2, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    predict_measurement, to_axis_aligned, AngledBox, AxisAlignedBox, CameraModel, GeometryError, Pose, Quaternion,
};
use crate::tracker::{Detection, FrameInput, Mode, ObjectModel};

/// Label attached to synthetic clutter detections.
pub const DISTRACTOR_LABEL: &str = "distractor";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("time {0} is outside the trajectory span")]
    OutOfSpan(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

/// Corruption applied to synthetic measurements. Rates are per frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub pixel_sigma: f64,
    pub size_sigma_frac: f64,
    pub alpha_sigma: f64,
    pub tracker_drift_rate: f64,
    /// Drift of the box tracker while the object is occluded.
    pub occlusion_drift_rate: f64,
    pub detection_dropout: f64,
    pub distractor_prob: f64,
    pub init_translation_noise: f64,
    pub init_box_noise_frac: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            pixel_sigma: 1.0,
            size_sigma_frac: 0.01,
            alpha_sigma: 0.01,
            tracker_drift_rate: 0.0,
            occlusion_drift_rate: 5.0,
            detection_dropout: 0.0,
            distractor_prob: 0.0,
            init_translation_noise: 0.04,
            init_box_noise_frac: 0.05,
        }
    }
}

impl NoiseSpec {
    pub fn zero() -> Self {
        Self {
            pixel_sigma: 0.0,
            size_sigma_frac: 0.0,
            alpha_sigma: 0.0,
            tracker_drift_rate: 0.0,
            occlusion_drift_rate: 0.0,
            detection_dropout: 0.0,
            distractor_prob: 0.0,
            init_translation_noise: 0.0,
            init_box_noise_frac: 0.0,
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let named = [
            ("pixel_sigma_px", self.pixel_sigma),
            ("size_sigma_frac", self.size_sigma_frac),
            ("alpha_sigma_rad", self.alpha_sigma),
            ("tracker_drift_px_per_frame", self.tracker_drift_rate),
            ("occlusion_drift_px_per_frame", self.occlusion_drift_rate),
            ("detection_dropout", self.detection_dropout),
            ("distractor_prob", self.distractor_prob),
            ("init_translation_noise_m", self.init_translation_noise),
            ("init_box_noise_frac", self.init_box_noise_frac),
        ];
        for (name, v) in named {
            if !(v >= 0.0 && v.is_finite()) {
                out.push(format!("noise.{name} must be a finite value >= 0, got {v}"));
            }
        }
        for (name, v) in [("detection_dropout", self.detection_dropout), ("distractor_prob", self.distractor_prob)] {
            if v > 1.0 {
                out.push(format!("noise.{name} is a probability and must be <= 1, got {v}"));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    /// Detector sees nothing and the box tracker latches onto background.
    Occlusion,
    /// The object moves by `offset_m` and back along a triangular excursion.
    ExitFrame,
    /// The object jumps by `offset_m` for the duration of the event.
    Teleport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub start_t: f64,
    pub end_t: f64,
    /// Camera-frame displacement used by `ExitFrame` and `Teleport`.
    pub offset_m: Vector3<f64>,
}

impl Event {
    pub fn active(&self, t: f64) -> bool {
        t >= self.start_t && t < self.end_t
    }

    fn displacement(&self, t: f64) -> Vector3<f64> {
        if !self.active(t) {
            return Vector3::zeros();
        }
        match self.kind {
            EventKind::Occlusion => Vector3::zeros(),
            EventKind::Teleport => self.offset_m,
            EventKind::ExitFrame => {
                let s = (t - self.start_t) / (self.end_t - self.start_t);
                self.offset_m * (1.0 - (2.0 * s - 1.0).abs())
            }
        }
    }
}

/// Ground-truth knots, interpolated linearly in position and by slerp in rotation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    knots: Vec<(f64, Pose)>,
}

impl Trajectory {
    pub fn new(knots: Vec<(f64, Pose)>) -> Result<Self, SimError> {
        if knots.is_empty() {
            return Err(SimError::InvalidScenario("trajectory has no knots".into()));
        }
        if knots.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(SimError::InvalidScenario("trajectory timestamps must be strictly increasing".into()));
        }
        if knots
            .iter()
            .any(|(t, p)| !t.is_finite() || !p.rotation.is_finite() || !p.translation.iter().all(|x| x.is_finite()))
        {
            return Err(SimError::InvalidScenario("trajectory contains non-finite values".into()));
        }
        Ok(Self { knots })
    }

    pub fn stationary(pose: Pose, t0: f64, t1: f64) -> Result<Self, SimError> {
        Self::new(vec![(t0, pose), (t1, pose)])
    }

    /// Constant linear velocity (camera frame) and body rate, sampled every `dt`.
    pub fn constant_velocity(
        start: Pose,
        velocity: Vector3<f64>,
        body_rate: Vector3<f64>,
        t0: f64,
        t1: f64,
        dt: f64,
    ) -> Result<Self, SimError> {
        if !(dt > 0.0) {
            return Err(SimError::InvalidScenario("knot spacing must be positive".into()));
        }
        let n = ((t1 - t0) / dt - 1e-9).ceil().max(1.0) as usize;
        let knots = (0..=n)
            .map(|k| {
                let t = (t0 + k as f64 * dt).min(t1);
                let s = t - t0;
                let pose = Pose::new(start.rotation * Quaternion::exp(&(body_rate * s)), start.translation + velocity * s);
                (t, pose)
            })
            .collect();
        Self::new(knots)
    }

    pub fn knots(&self) -> &[(f64, Pose)] {
        &self.knots
    }

    pub fn start(&self) -> f64 {
        self.knots[0].0
    }

    pub fn end(&self) -> f64 {
        self.knots[self.knots.len() - 1].0
    }

    pub fn interpolate(&self, t: f64) -> Result<Pose, SimError> {
        if !(t >= self.start() && t <= self.end()) {
            return Err(SimError::OutOfSpan(t));
        }
        let i = self.knots.partition_point(|(kt, _)| *kt <= t);
        if i == self.knots.len() {
            return Ok(self.knots[i - 1].1);
        }
        let (t0, p0) = &self.knots[i - 1];
        let (t1, p1) = &self.knots[i];
        let s = (t - t0) / (t1 - t0);
        if s == 0.0 {
            return Ok(*p0);
        }
        Ok(Pose::new(
            p0.rotation.slerp(&p1.rotation, s),
            p0.translation + (p1.translation - p0.translation) * s,
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub camera: CameraModel,
    pub object: ObjectModel,
    pub trajectory: Trajectory,
    pub noise: NoiseSpec,
    pub events: Vec<Event>,
    pub frame_rate_hz: f64,
}

impl Scenario {
    pub fn violations(&self) -> Vec<String> {
        let mut out = self.noise.violations();
        if let Err(e) = self.camera.check() {
            out.push(format!("camera: {e}"));
        }
        if !(self.frame_rate_hz > 0.0 && self.frame_rate_hz.is_finite()) {
            out.push(format!("frame_rate_hz must be positive, got {}", self.frame_rate_hz));
        }
        let (a, b) = (self.trajectory.start(), self.trajectory.end());
        for (i, e) in self.events.iter().enumerate() {
            if !(e.start_t < e.end_t) {
                out.push(format!("events[{i}]: start_t_s must be < end_t_s"));
            }
            if e.start_t < a || e.end_t > b {
                out.push(format!("events[{i}]: [{}, {}] is outside the trajectory span [{a}, {b}]", e.start_t, e.end_t));
            }
        }
        out
    }

    /// Frame timestamps covering the trajectory span.
    pub fn frame_times(&self) -> Vec<f64> {
        let (a, b) = (self.trajectory.start(), self.trajectory.end());
        let n = ((b - a) * self.frame_rate_hz + 1e-9).floor() as usize;
        (0..=n).map(|k| a + k as f64 / self.frame_rate_hz).collect()
    }

    pub fn truth_pose(&self, t: f64) -> Result<Pose, SimError> {
        let mut pose = self.trajectory.interpolate(t)?;
        for e in &self.events {
            pose.translation += e.displacement(t);
        }
        Ok(pose)
    }

    pub fn occluded(&self, t: f64) -> bool {
        self.events.iter().any(|e| e.kind == EventKind::Occlusion && e.active(t))
    }
}

pub fn ground_truth_box(scenario: &Scenario, t: f64) -> Result<AngledBox, SimError> {
    let pose = scenario.truth_pose(t)?;
    Ok(predict_measurement(&scenario.camera, &pose, &scenario.object.verts)?)
}

fn gauss(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    let n: f64 = StandardNormal.sample(rng);
    n * sigma
}

/// Accumulated box-tracker drift, restarted at every (re)detection.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Drift {
    pub offset: Vector2<f64>,
    pub direction: Vector2<f64>,
}

impl Drift {
    pub fn reset(&mut self, rng: &mut ChaCha8Rng) {
        let a = rng.random_range(0.0..std::f64::consts::TAU);
        self.offset = Vector2::zeros();
        self.direction = Vector2::new(a.cos(), a.sin());
    }

    fn advance(&mut self, rate: f64) {
        self.offset += self.direction * rate;
    }
}

fn outside_image(b: &AngledBox, camera: &CameraModel) -> bool {
    let a = to_axis_aligned(b);
    a.right() < 0.0 || a.bottom() < 0.0 || a.left() > camera.width_f() || a.top() > camera.height_f()
}

/// One frame of the simulated box tracker, seeded with its previous output.
pub fn emit_tracker_measurement(
    scenario: &Scenario,
    t: f64,
    prev_box: &AngledBox,
    drift: &mut Drift,
    rng: &mut ChaCha8Rng,
) -> Option<AngledBox> {
    let n = &scenario.noise;
    if scenario.occluded(t) {
        drift.advance(n.occlusion_drift_rate);
        let step = drift.direction * n.occlusion_drift_rate;
        return AngledBox::new(
            prev_box.x + step.x + gauss(rng, n.pixel_sigma),
            prev_box.y + step.y + gauss(rng, n.pixel_sigma),
            prev_box.w,
            prev_box.h,
            prev_box.alpha,
        )
        .ok();
    }
    let truth = ground_truth_box(scenario, t).ok()?;
    if outside_image(&truth, &scenario.camera) {
        return None;
    }
    drift.advance(n.tracker_drift_rate);
    let (ex, ey) = (gauss(rng, n.pixel_sigma), gauss(rng, n.pixel_sigma));
    let (ew, eh) = (gauss(rng, n.size_sigma_frac), gauss(rng, n.size_sigma_frac));
    let ea = gauss(rng, n.alpha_sigma);
    AngledBox::new(
        truth.x + ex + drift.offset.x,
        truth.y + ey + drift.offset.y,
        truth.w * (1.0 + ew),
        truth.h * (1.0 + eh),
        truth.alpha + ea,
    )
    .ok()
}

/// Simulated detector output for the frame at `t`.
pub fn emit_detections(scenario: &Scenario, t: f64, rng: &mut ChaCha8Rng) -> Vec<Detection> {
    let n = &scenario.noise;
    let cam = &scenario.camera;
    let dropped = rng.random::<f64>() < n.detection_dropout;
    let mut out = Vec::new();
    if !dropped && !scenario.occluded(t) {
        if let Ok(truth) = ground_truth_box(scenario, t) {
            let a = to_axis_aligned(&truth);
            let x = a.x + gauss(rng, n.pixel_sigma);
            let y = a.y + gauss(rng, n.pixel_sigma);
            let w = a.w * (1.0 + gauss(rng, n.size_sigma_frac));
            let h = a.h * (1.0 + gauss(rng, n.size_sigma_frac));
            let confidence = rng.random_range(0.5..=1.0);
            let (l, tp, r, bt) = (x - w / 2.0, y - h / 2.0, x + w / 2.0, y + h / 2.0);
            let clipped = if l >= 0.0 && tp >= 0.0 && r <= cam.width_f() && bt <= cam.height_f() {
                AxisAlignedBox::new(x, y, w, h)
            } else {
                AxisAlignedBox::from_bounds(l.max(0.0), tp.max(0.0), r.min(cam.width_f()), bt.min(cam.height_f()))
            };
            if let Ok(bbox) = clipped {
                out.push(Detection {
                    bbox,
                    class_label: scenario.object.class_label.clone(),
                    confidence,
                });
            }
        }
    }
    if rng.random::<f64>() < n.distractor_prob {
        let w = rng.random_range(20.0..120.0);
        let h = rng.random_range(20.0..120.0);
        let x = rng.random_range(w / 2.0..cam.width_f() - w / 2.0);
        let y = rng.random_range(h / 2.0..cam.height_f() - h / 2.0);
        if let Ok(bbox) = AxisAlignedBox::new(x, y, w, h) {
            out.push(Detection {
                bbox,
                class_label: DISTRACTOR_LABEL.into(),
                confidence: rng.random_range(0.5..=1.0),
            });
        }
    }
    out
}

/// Noisy first pose and box for tracker-only evaluation: the true initial
/// pose shifted by uniform translation noise, and the box predicted from that
/// pose with uniform noise on row and width scaled by the width, and on
/// column and height scaled by the height.
pub fn perturbed_initialization(scenario: &Scenario, rng: &mut ChaCha8Rng) -> Result<(Pose, AngledBox), SimError> {
    let n = &scenario.noise;
    let t0 = scenario.trajectory.start();
    let mut pose = scenario.truth_pose(t0)?;
    let b = n.init_translation_noise;
    for i in 0..3 {
        pose.translation[i] += if b > 0.0 { rng.random_range(-b..=b) } else { 0.0 };
    }
    let z = predict_measurement(&scenario.camera, &pose, &scenario.object.verts)?;
    let f = n.init_box_noise_frac;
    let mut u = || if f > 0.0 { rng.random_range(-f..=f) } else { 0.0 };
    let (du_y, du_w, du_x, du_h) = (u(), u(), u(), u());
    let first = AngledBox::new(z.x + du_x * z.h, z.y + du_y * z.w, z.w + du_w * z.w, z.h + du_h * z.h, z.alpha)?;
    Ok((pose, first))
}

/// What the tracker asks of a source before each frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameRequest {
    pub mode: Mode,
    pub prev_box: Option<AngledBox>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub t: f64,
    pub input: FrameInput,
}

/// A sequential stream of front-end outputs.
pub trait MeasurementSource {
    fn next_frame(&mut self, request: &FrameRequest) -> Option<Frame>;
}

/// Detector and box tracker simulated over a [`Scenario`].
#[derive(Debug, Clone)]
pub struct SyntheticSource {
    scenario: Scenario,
    times: Vec<f64>,
    next: usize,
    drift: Drift,
    rng: ChaCha8Rng,
}

impl SyntheticSource {
    /// Emits one frame per entry of [`Scenario::frame_times`] from index `first_frame`.
    pub fn new(scenario: Scenario, rng: ChaCha8Rng, first_frame: usize) -> Self {
        let times = scenario.frame_times();
        let mut src = Self {
            scenario,
            times,
            next: first_frame,
            drift: Drift::default(),
            rng,
        };
        src.drift.reset(&mut src.rng);
        src
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

impl MeasurementSource for SyntheticSource {
    fn next_frame(&mut self, request: &FrameRequest) -> Option<Frame> {
        let t = *self.times.get(self.next)?;
        self.next += 1;
        let input = match (request.mode, request.prev_box) {
            (Mode::Tracking, Some(prev)) => FrameInput::Tracked(emit_tracker_measurement(
                &self.scenario,
                t,
                &prev,
                &mut self.drift,
                &mut self.rng,
            )),
            _ => {
                self.drift.reset(&mut self.rng);
                FrameInput::Detections(emit_detections(&self.scenario, t, &mut self.rng))
            }
        };
        Some(Frame { t, input })
    }
}
