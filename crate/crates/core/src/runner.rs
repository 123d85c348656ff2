//! Tracking episodes and their output files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::{ConfigError, Initialization, RunConfig, SourceMode};
use crate::dynamics::DynamicsRegistry;
use crate::metrics::{ecdf, ecdf_csv, errors_csv, pose_error_at, summarize, summary_csv, FrameError, Summary};
use crate::frontend_sim::{
    perturbed_initialization, write_recorded, Frame, FrameRequest, MeasurementSource, ParseError, RecordedSource,
    Scenario, SimError, SyntheticSource,
};
use crate::tracker::{StepReport, Tracker};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("scenario: {0}")]
    Scenario(#[from] SimError),
    #[error(transparent)]
    Recording(#[from] ParseError),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
}

/// Everything one episode produced.
#[derive(Debug, Clone)]
pub struct Episode {
    /// Measurements in the order they were consumed.
    pub frames: Vec<Frame>,
    pub reports: Vec<StepReport>,
    /// One entry per emitted estimate with available ground truth.
    pub errors: Vec<FrameError>,
}

impl Episode {
    pub fn summary(&self) -> Option<Summary> {
        summarize(&self.errors).ok()
    }
}

/// Drives `tracker` with `source` until the stream ends, scoring estimates
/// against `truth` when it is given.
pub fn run_tracker(tracker: &mut Tracker, source: &mut dyn MeasurementSource, truth: Option<&Scenario>) -> Episode {
    let mut ep = Episode {
        frames: Vec::new(),
        reports: Vec::new(),
        errors: Vec::new(),
    };
    loop {
        let request = FrameRequest {
            mode: tracker.mode(),
            prev_box: tracker.state.last_box,
        };
        let Some(frame) = source.next_frame(&request) else { break };
        let report = tracker.step(frame.t, &frame.input);
        if let (Some(est), Some(sc)) = (&report.estimate, truth) {
            if let Ok(gt) = sc.truth_pose(frame.t) {
                ep.errors.push(pose_error_at(frame.t, &est.pose, &gt, &sc.object));
            }
        }
        ep.reports.push(report);
        ep.frames.push(frame);
    }
    ep
}

/// Runs a synthetic scenario with every random draw taken from `seed`.
pub fn run_synthetic(
    scenario: &Scenario,
    tracker: &mut Tracker,
    init: Initialization,
    seed: u64,
) -> Result<Episode, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first_frame = match init {
        Initialization::Perturbed => {
            let (pose, first_box) = perturbed_initialization(scenario, &mut rng)?;
            tracker.initialize(scenario.trajectory.start(), &pose, &first_box);
            1
        }
        Initialization::Detection => 0,
    };
    let mut source = SyntheticSource::new(scenario.clone(), rng, first_frame);
    Ok(run_tracker(tracker, &mut source, Some(scenario)))
}

/// Runs one scenario file. Relative recording paths resolve against `base_dir`.
pub fn run_config(cfg: &RunConfig, base_dir: &Path, seed: u64) -> Result<Episode, RunError> {
    run_config_with(cfg, base_dir, seed, DynamicsRegistry::default())
}

/// [`run_config`] with custom transition models that `object.dynamics` may name.
pub fn run_config_with(
    cfg: &RunConfig,
    base_dir: &Path,
    seed: u64,
    registry: DynamicsRegistry,
) -> Result<Episode, RunError> {
    let mut violations = cfg.violations();
    let name = &cfg.object.dynamics;
    if name != "constant-velocity" && !registry.contains(name) {
        violations.push(format!("object.dynamics: no model registered under {name:?}"));
    }
    if !violations.is_empty() {
        return Err(ConfigError::Invalid(violations).into());
    }
    let mut tracker = cfg.tracker_with(registry);
    match cfg.mode {
        SourceMode::Synthetic => {
            let scenario = cfg.scenario().map_err(|e| ConfigError::Invalid(vec![e]))?;
            Ok(run_synthetic(&scenario, &mut tracker, cfg.initialization, seed)?)
        }
        SourceMode::Recorded => {
            let rel = cfg.recording.as_ref().expect("validated");
            let mut source = RecordedSource::load(&base_dir.join(rel))?;
            // ground truth is optional for recordings
            let truth = cfg.scenario().ok();
            Ok(run_tracker(&mut tracker, &mut source, truth.as_ref()))
        }
    }
}

pub const ESTIMATES_HEADER: &str = "t_s,mode,x_m,y_m,z_m,qw,qx,qy,qz,cov_trace,mahalanobis,chi2_pass,edges_pass,redetect,reinit";

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn estimates_csv(reports: &[StepReport]) -> String {
    let mut out = format!("{ESTIMATES_HEADER}\n");
    for r in reports {
        let pose = match &r.estimate {
            Some(e) => {
                let p = &e.pose;
                let q = p.rotation;
                format!(
                    "{},{},{},{},{},{},{},{}",
                    p.translation.x,
                    p.translation.y,
                    p.translation.z,
                    q.w,
                    q.x,
                    q.y,
                    q.z,
                    e.cov.trace()
                )
            }
            None => ",,,,,,,".into(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.t,
            r.mode_after.as_str(),
            pose,
            opt(r.gates.map(|g| g.mahalanobis)),
            opt(r.gates.map(|g| g.chi2_pass)),
            opt(r.gates.map(|g| g.edges.all_pass())),
            opt(r.redetect.map(|x| x.as_str())),
            r.reinitialized,
        );
    }
    out
}

/// Files written by [`write_outputs`], in write order.
pub const OUTPUT_FILES: [&str; 9] = [
    "manifest.toml",
    "measurements.rec",
    "estimates.csv",
    "errors.csv",
    "summary.csv",
    "ecdf_t_err.csv",
    "ecdf_r_err.csv",
    "ecdf_inplane_err.csv",
    "ecdf_depth_err.csv",
];

pub fn write_outputs(ep: &Episode, cfg: &RunConfig, seed: u64, dir: &Path) -> Result<(), RunError> {
    let write = |name: &str, text: String| {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|source| RunError::Output { path, source })
    };
    std::fs::create_dir_all(dir).map_err(|source| RunError::Output {
        path: dir.to_owned(),
        source,
    })?;
    let resolved = RunConfig { seed, ..cfg.clone() };
    write(
        "manifest.toml",
        format!(
            "# {} {}\n{}",
            env!("CARGO_PKG_NAME"),
            env!("CARGO_PKG_VERSION"),
            resolved.to_toml()
        ),
    )?;
    write("measurements.rec", write_recorded(&ep.frames))?;
    write("estimates.csv", estimates_csv(&ep.reports))?;
    write("errors.csv", errors_csv(&ep.errors))?;
    write(
        "summary.csv",
        match ep.summary() {
            Some(s) => summary_csv(&s),
            None => "metric,mean,median\n".into(),
        },
    )?;
    type Column = (&'static str, &'static str, fn(&FrameError) -> f64);
    let columns: [Column; 4] = [
        ("ecdf_t_err.csv", "m", |e| e.t_err),
        ("ecdf_r_err.csv", "deg", |e| e.r_err),
        ("ecdf_inplane_err.csv", "m", |e| e.inplane_err),
        ("ecdf_depth_err.csv", "m", |e| e.depth_err),
    ];
    for (name, unit, f) in columns {
        let values: Vec<f64> = ep.errors.iter().map(f).collect();
        let steps = ecdf(&values).unwrap_or_default();
        write(name, ecdf_csv(&steps, unit))?;
    }
    Ok(())
}
