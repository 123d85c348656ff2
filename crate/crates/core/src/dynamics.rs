//! State propagation models used by the filter's prediction step.
//!
//! The built-in model is constant velocity. Class-specific models are plain
//! closures registered by name in a [`DynamicsRegistry`] and selected through
//! [`DynamicsSpec::kind`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{SVector, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Pose, Quaternion};

/// Rigid-body state `[p, v, q, ω]`.
///
/// `p` and `v` are expressed in the camera frame, `q` rotates object-frame
/// vectors into the camera frame and `ω` is the body-frame angular velocity.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State13 {
    pub p: Vector3<f64>,
    pub v: Vector3<f64>,
    pub q: Quaternion,
    pub omega: Vector3<f64>,
}

/// Error-state vector `[δp, δv, δθ, δω]`.
pub type ErrorVector = SVector<f64, 12>;

impl State13 {
    pub fn at_rest(pose: &Pose) -> Self {
        Self {
            p: pose.translation,
            v: Vector3::zeros(),
            q: pose.rotation,
            omega: Vector3::zeros(),
        }
    }

    pub fn pose(&self) -> Pose {
        Pose::new(self.q, self.p)
    }

    /// Applies an error-state perturbation.
    pub fn boxplus(&self, d: &ErrorVector) -> Self {
        Self {
            p: self.p + d.fixed_rows::<3>(0),
            v: self.v + d.fixed_rows::<3>(3),
            q: self.q.boxplus(&d.fixed_rows::<3>(6).into_owned()),
            omega: self.omega + d.fixed_rows::<3>(9),
        }
    }

    /// Error-state difference `self ⊟ other`.
    pub fn boxminus(&self, other: &Self) -> ErrorVector {
        let mut d = ErrorVector::zeros();
        d.fixed_rows_mut::<3>(0).copy_from(&(self.p - other.p));
        d.fixed_rows_mut::<3>(3).copy_from(&(self.v - other.v));
        d.fixed_rows_mut::<3>(6).copy_from(&self.q.boxminus(&other.q));
        d.fixed_rows_mut::<3>(9).copy_from(&(self.omega - other.omega));
        d
    }

    pub fn is_finite(&self) -> bool {
        self.p.iter().chain(self.v.iter()).chain(self.omega.iter()).all(|x| x.is_finite())
            && self.q.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("no dynamics model registered under {0:?}")]
    UnknownModel(String),
    #[error("a dynamics model named {0:?} is already registered")]
    DuplicateName(String),
    #[error("time step must be non-negative and finite")]
    NegativeDt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DynamicsKind {
    ConstantVelocity,
    Custom(String),
}

/// Which transition model to use, plus the additive process noise densities
/// (per second) for each error-state axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsSpec {
    pub kind: DynamicsKind,
    pub process_noise: [f64; 12],
}

impl Default for DynamicsSpec {
    fn default() -> Self {
        Self {
            kind: DynamicsKind::ConstantVelocity,
            process_noise: [
                1e-6, 1e-6, 1e-6, // position, m²/s
                1e-5, 1e-5, 1e-5, // velocity, (m/s)²/s
                1e-6, 1e-6, 1e-6, // rotation, rad²/s
                1e-6, 1e-6, 1e-6, // angular velocity, (rad/s)²/s
            ],
        }
    }
}

impl DynamicsSpec {
    pub fn constant_velocity(process_noise: [f64; 12]) -> Self {
        Self {
            kind: DynamicsKind::ConstantVelocity,
            process_noise,
        }
    }

    pub fn custom(name: impl Into<String>, process_noise: [f64; 12]) -> Self {
        Self {
            kind: DynamicsKind::Custom(name.into()),
            process_noise,
        }
    }
}

pub type TransitionFn = dyn Fn(&State13, f64) -> State13 + Send + Sync;

/// Handle returned by [`DynamicsRegistry::register`].
#[derive(Clone)]
pub struct ModelHandle {
    name: String,
    transition: Arc<TransitionFn>,
}

impl ModelHandle {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn spec(&self, process_noise: [f64; 12]) -> DynamicsSpec {
        DynamicsSpec::custom(self.name.clone(), process_noise)
    }

    pub fn apply(&self, state: &State13, dt: f64) -> State13 {
        (self.transition)(state, dt)
    }
}

impl fmt::Debug for ModelHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelHandle").field("name", &self.name).finish()
    }
}

/// Named custom transition models. Populated at configuration time, read-only
/// afterwards; clones share the same models.
#[derive(Clone, Default, Debug)]
pub struct DynamicsRegistry {
    models: BTreeMap<String, ModelHandle>,
}

impl DynamicsRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register<F>(&mut self, name: &str, transition: F) -> Result<ModelHandle, DynamicsError>
    where
        F: Fn(&State13, f64) -> State13 + Send + Sync + 'static,
    {
        if self.models.contains_key(name) {
            return Err(DynamicsError::DuplicateName(name.to_owned()));
        }
        let handle = ModelHandle {
            name: name.to_owned(),
            transition: Arc::new(transition),
        };
        self.models.insert(name.to_owned(), handle.clone());
        Ok(handle)
    }

    pub fn get(&self, name: &str) -> Option<&ModelHandle> {
        self.models.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.models.contains_key(name)
    }

    /// Propagates `state` by `dt` seconds under `spec`.
    pub fn propagate(&self, state: &State13, dt: f64, spec: &DynamicsSpec) -> Result<State13, DynamicsError> {
        if !(dt >= 0.0) || !dt.is_finite() {
            return Err(DynamicsError::NegativeDt);
        }
        let mut out = match &spec.kind {
            DynamicsKind::ConstantVelocity => constant_velocity(state, dt),
            DynamicsKind::Custom(name) => self
                .get(name)
                .ok_or_else(|| DynamicsError::UnknownModel(name.clone()))?
                .apply(state, dt),
        };
        out.q = out.q.normalize();
        Ok(out)
    }
}

/// `p' = p + v·dt`, `q' = q ⊗ exp(ω·dt)`, velocities unchanged.
pub fn constant_velocity(state: &State13, dt: f64) -> State13 {
    State13 {
        p: state.p + state.v * dt,
        v: state.v,
        q: state.q.boxplus(&(state.omega * dt)),
        omega: state.omega,
    }
}

/// Propagation with only the built-in models available.
pub fn propagate(state: &State13, dt: f64, spec: &DynamicsSpec) -> Result<State13, DynamicsError> {
    DynamicsRegistry::default().propagate(state, dt, spec)
}
