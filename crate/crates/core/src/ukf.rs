//! Unscented Kalman filter over [`State13`] with a 12-dimensional error-state
//! covariance.
//!
//! Sigma points are generated in the error space and mapped onto the state with
//! [`State13::boxplus`]; the quaternion part of a sigma-point mean is recovered
//! by iterative rotation-vector averaging. The measurement function is
//! [`predict_measurement`], so each update also yields the predicted box
//! distribution `(ẑ, Ŝ)` used by the gates.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::{Matrix5, SMatrix, SymmetricEigen, Vector5};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{DynamicsError, DynamicsRegistry, DynamicsSpec, ErrorVector, State13};
use crate::geometry::{predict_measurement, AngledBox, CameraModel, GeometryError, VertexSet};

pub const STATE_DIM: usize = 12;
pub const MEAS_DIM: usize = 5;
pub const SIGMA_COUNT: usize = 2 * STATE_DIM + 1;

pub type Cov12 = SMatrix<f64, 12, 12>;
pub type CrossCov = SMatrix<f64, 12, 5>;

const QUAT_MEAN_MAX_ITERS: usize = 10;
const QUAT_MEAN_TOL: f64 = 1e-10;
const INNOVATION_JITTER: f64 = 1e-9;
const MAX_INNOVATION_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UkfError {
    #[error("covariance is not positive semi-definite")]
    CholeskyFailure,
    #[error("measurement undefined for a sigma point: {0}")]
    MeasurementUndefined(GeometryError),
    #[error("innovation covariance is not positive definite or is ill-conditioned")]
    InnovationNotPSD,
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("invalid filter parameters: {0}")]
    InvalidParams(&'static str),
}

/// Gaussian belief over the state: mean plus error-state covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateBelief {
    pub mean: State13,
    pub cov: Cov12,
}

impl StateBelief {
    pub fn new(mean: State13, cov: Cov12) -> Self {
        Self { mean, cov }
    }

    pub fn with_diagonal(mean: State13, std: &[f64; 12]) -> Self {
        let cov = Cov12::from_diagonal(&ErrorVector::from_fn(|i, _| std[i] * std[i]));
        Self { mean, cov }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.cov).eigenvalues.min()
    }

    pub fn asymmetry(&self) -> f64 {
        (self.cov - self.cov.transpose()).abs().max()
    }
}

/// Predicted measurement distribution: box mean `ẑ` and covariance `Ŝ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementStats {
    pub z_hat: Vector5<f64>,
    pub s_hat: Matrix5<f64>,
}

impl MeasurementStats {
    /// Innovation `z − ẑ` with the angle differenced on the box-angle circle.
    pub fn innovation(&self, z: &Vector5<f64>) -> Vector5<f64> {
        let mut nu = z - self.z_hat;
        nu[4] = wrap_alpha_residual(z[4], self.z_hat[4]);
        nu
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UkfParams {
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    /// Diagonal measurement noise variances for `[x, y, w, h, α]` (px², px², px², px², rad²).
    pub measurement_noise: [f64; 5],
}

impl Default for UkfParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 2.0,
            kappa: 0.0,
            measurement_noise: [4.0, 4.0, 16.0, 16.0, 0.05 * 0.05],
        }
    }
}

impl UkfParams {
    pub fn lambda(&self) -> f64 {
        let n = STATE_DIM as f64;
        self.alpha * self.alpha * (n + self.kappa) - n
    }

    pub fn validate(&self) -> Result<(), UkfError> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(UkfError::InvalidParams("alpha must lie in (0, 1]"));
        }
        if !(STATE_DIM as f64 + self.lambda() > 0.0) {
            return Err(UkfError::InvalidParams("n + lambda must be positive"));
        }
        let w = self.weights();
        if !(w.mean0 >= 0.0 && w.cov0 >= 0.0) {
            return Err(UkfError::InvalidParams("central sigma-point weights must be non-negative"));
        }
        if self.measurement_noise.iter().any(|r| !(*r >= 0.0)) {
            return Err(UkfError::InvalidParams("measurement noise must be non-negative"));
        }
        Ok(())
    }

    /// Scaled unscented-transform weights `(W_m, W_c)` for the mean point and
    /// for every other point.
    pub fn weights(&self) -> Weights {
        let lambda = self.lambda();
        let c = STATE_DIM as f64 + lambda;
        let wm0 = lambda / c;
        Weights {
            mean0: wm0,
            cov0: wm0 + (1.0 - self.alpha * self.alpha + self.beta),
            other: 1.0 / (2.0 * c),
        }
    }

    fn noise_matrix(&self) -> Matrix5<f64> {
        Matrix5::from_diagonal(&Vector5::from_row_slice(&self.measurement_noise))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub mean0: f64,
    pub cov0: f64,
    pub other: f64,
}

impl Weights {
    pub fn mean(&self, i: usize) -> f64 {
        if i == 0 {
            self.mean0
        } else {
            self.other
        }
    }

    pub fn cov(&self, i: usize) -> f64 {
        if i == 0 {
            self.cov0
        } else {
            self.other
        }
    }
}

/// The `2n + 1` sigma states with their error-space offsets from the mean.
#[derive(Debug, Clone)]
pub struct SigmaPoints {
    pub points: Vec<State13>,
    pub offsets: Vec<ErrorVector>,
    pub weights: Weights,
}

/// Residual between two box angles, reduced modulo π/2 into `[-π/4, π/4)`.
///
/// A rectangle's angle is only meaningful up to quarter turns once width and
/// height may swap, so residuals are taken on that circle.
pub fn wrap_alpha_residual(a: f64, b: f64) -> f64 {
    let d = a - b;
    d - FRAC_PI_2 * ((d + FRAC_PI_4) / FRAC_PI_2).floor()
}

fn wrap_half_turn(a: f64) -> f64 {
    a - PI * ((a + FRAC_PI_2) / PI).floor()
}

/// Any `L` with `L Lᵀ = m` for symmetric PSD `m`.
fn psd_sqrt(m: &Cov12) -> Result<Cov12, UkfError> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(UkfError::CholeskyFailure);
    }
    if let Some(ch) = m.cholesky() {
        return Ok(ch.l());
    }
    let eig = SymmetricEigen::new(*m);
    let scale = eig.eigenvalues.abs().max().max(1e-300);
    if eig.eigenvalues.min() < -1e-9 * scale.max(1.0) {
        return Err(UkfError::CholeskyFailure);
    }
    let root = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    Ok(eig.eigenvectors * Cov12::from_diagonal(&root))
}

fn symmetrize(m: &Cov12) -> Cov12 {
    (m + m.transpose()) * 0.5
}

/// Weighted mean of sigma states; the quaternion by iterative averaging of
/// rotation vectors about a running reference.
pub fn recombine(points: &[State13], weights: &Weights) -> State13 {
    let mut p = nalgebra::Vector3::zeros();
    let mut v = nalgebra::Vector3::zeros();
    let mut omega = nalgebra::Vector3::zeros();
    for (i, s) in points.iter().enumerate() {
        let w = weights.mean(i);
        p += s.p * w;
        v += s.v * w;
        omega += s.omega * w;
    }
    let mut q = points[0].q;
    for _ in 0..QUAT_MEAN_MAX_ITERS {
        let mut e = nalgebra::Vector3::zeros();
        for (i, s) in points.iter().enumerate() {
            e += s.q.boxminus(&q) * weights.mean(i);
        }
        q = q.boxplus(&e);
        if e.norm() < QUAT_MEAN_TOL {
            break;
        }
    }
    State13 { p, v, q, omega }
}

/// Weighted error-space covariance of `points` about `mean`.
pub fn spread(points: &[State13], mean: &State13, weights: &Weights) -> Cov12 {
    let mut cov = Cov12::zeros();
    for (i, s) in points.iter().enumerate() {
        let d = s.boxminus(mean);
        cov += d * d.transpose() * weights.cov(i);
    }
    symmetrize(&cov)
}

/// Predicted measurement together with the state/measurement cross covariance.
#[derive(Debug, Clone)]
pub struct MeasurementPrediction {
    pub stats: MeasurementStats,
    pub cross_cov: CrossCov,
}

/// Unscented Kalman filter configured with spread parameters and the
/// dynamics models it may dispatch to.
#[derive(Debug, Clone, Default)]
pub struct Ukf {
    pub params: UkfParams,
    pub registry: DynamicsRegistry,
}

impl Ukf {
    pub fn new(params: UkfParams) -> Self {
        Self {
            params,
            registry: DynamicsRegistry::default(),
        }
    }

    pub fn with_registry(params: UkfParams, registry: DynamicsRegistry) -> Self {
        Self { params, registry }
    }

    pub fn sigma_points(&self, belief: &StateBelief) -> Result<SigmaPoints, UkfError> {
        sigma_points(belief, &self.params)
    }

    /// Time update through the transition model, with additive process noise
    /// scaled by `dt`.
    pub fn predict(&self, belief: &StateBelief, dt: f64, spec: &DynamicsSpec) -> Result<StateBelief, UkfError> {
        let sp = self.sigma_points(belief)?;
        let propagated = sp
            .points
            .iter()
            .map(|s| self.registry.propagate(s, dt, spec))
            .collect::<Result<Vec<_>, _>>()?;
        let mean = recombine(&propagated, &sp.weights);
        let mut cov = spread(&propagated, &mean, &sp.weights);
        for (i, q) in spec.process_noise.iter().enumerate() {
            cov[(i, i)] += q * dt;
        }
        Ok(StateBelief { mean, cov })
    }

    /// Predicted box distribution `(ẑ, Ŝ)` and cross covariance for `belief`.
    pub fn predict_measurement(
        &self,
        belief: &StateBelief,
        camera: &CameraModel,
        verts: &VertexSet,
    ) -> Result<MeasurementPrediction, UkfError> {
        let sp = self.sigma_points(belief)?;
        let w = &sp.weights;
        let boxes = sp
            .points
            .iter()
            .map(|s| predict_measurement(camera, &s.pose(), verts).map(|b| b.as_vector()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(UkfError::MeasurementUndefined)?;

        let ref_alpha = boxes[0][4];
        let mut z_hat = Vector5::zeros();
        let mut alpha_offset = 0.0;
        for (i, z) in boxes.iter().enumerate() {
            z_hat += z * w.mean(i);
            alpha_offset += wrap_alpha_residual(z[4], ref_alpha) * w.mean(i);
        }
        z_hat[4] = wrap_half_turn(ref_alpha + alpha_offset);

        let mut s_hat = Matrix5::zeros();
        let mut cross_cov = CrossCov::zeros();
        for (i, z) in boxes.iter().enumerate() {
            let mut dz = z - z_hat;
            dz[4] = wrap_alpha_residual(z[4], z_hat[4]);
            s_hat += dz * dz.transpose() * w.cov(i);
            cross_cov += sp.offsets[i] * dz.transpose() * w.cov(i);
        }
        s_hat = (s_hat + s_hat.transpose()) * 0.5
            + self.params.noise_matrix()
            + Matrix5::identity() * INNOVATION_JITTER;

        let eig = SymmetricEigen::new(s_hat).eigenvalues;
        let (lo, hi) = (eig.min(), eig.max());
        if !(lo > 0.0) || hi / lo > MAX_INNOVATION_CONDITION {
            return Err(UkfError::InnovationNotPSD);
        }
        Ok(MeasurementPrediction {
            stats: MeasurementStats { z_hat, s_hat },
            cross_cov,
        })
    }

    /// Measurement update with a precomputed prediction.
    pub fn correct(
        &self,
        belief: &StateBelief,
        prediction: &MeasurementPrediction,
        z: &AngledBox,
    ) -> Result<StateBelief, UkfError> {
        let s = prediction.stats.s_hat;
        let s_inv = s.cholesky().ok_or(UkfError::InnovationNotPSD)?.inverse();
        let gain = prediction.cross_cov * s_inv;
        let nu = prediction.stats.innovation(&z.as_vector());
        let mean = belief.mean.boxplus(&(gain * nu));
        let cov = symmetrize(&(belief.cov - gain * s * gain.transpose()));
        Ok(StateBelief { mean, cov })
    }

    /// Full measurement update. Returns the posterior belief and the prior
    /// predicted box distribution that the update used.
    pub fn update(
        &self,
        belief: &StateBelief,
        z: &AngledBox,
        camera: &CameraModel,
        verts: &VertexSet,
    ) -> Result<(StateBelief, MeasurementStats), UkfError> {
        let prediction = self.predict_measurement(belief, camera, verts)?;
        let posterior = self.correct(belief, &prediction, z)?;
        Ok((posterior, prediction.stats))
    }
}

/// Sigma states `mean ⊞ ±col_i(√((n+λ)·cov))` plus the mean itself.
pub fn sigma_points(belief: &StateBelief, params: &UkfParams) -> Result<SigmaPoints, UkfError> {
    params.validate()?;
    let c = STATE_DIM as f64 + params.lambda();
    let root = psd_sqrt(&symmetrize(&(belief.cov * c)))?;
    let mut points = Vec::with_capacity(SIGMA_COUNT);
    let mut offsets = Vec::with_capacity(SIGMA_COUNT);
    points.push(belief.mean);
    offsets.push(ErrorVector::zeros());
    for sign in [1.0, -1.0] {
        for j in 0..STATE_DIM {
            let d: ErrorVector = root.column(j) * sign;
            points.push(belief.mean.boxplus(&d));
            offsets.push(d);
        }
    }
    Ok(SigmaPoints {
        points,
        offsets,
        weights: params.weights(),
    })
}
