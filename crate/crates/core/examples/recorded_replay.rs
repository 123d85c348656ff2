//! Feeds a recorded front-end stream to the tracker, then writes it back out.
//!
//! cargo run --example recorded_replay

use monopose::config::RunConfig;
use monopose::runner::run_tracker;
use monopose::frontend_sim::{read_recorded, write_recorded, RecordedSource};
use monopose::tracker::FrameInput;

const SCENARIO: &str = include_str!("../scenarios/recorded-replay.toml");
const RECORDING: &str = include_str!("../scenarios/mug-detection.rec");

fn main() {
    let cfg = RunConfig::from_toml(SCENARIO).unwrap();
    let frames = read_recorded(RECORDING).unwrap();
    let detections = frames
        .iter()
        .filter(|f| matches!(f.input, FrameInput::Detections(_)))
        .count();
    println!("{} records, {} of them detector output", frames.len(), detections);

    let mut tracker = cfg.tracker();
    let truth = cfg.scenario().unwrap();
    let ep = run_tracker(&mut tracker, &mut RecordedSource::new(frames.clone()), Some(&truth));
    let s = ep.summary().unwrap();
    println!(
        "median t_err {:.4} m, r_err {:.2} deg over {} scored frames",
        s.t_err.median, s.r_err.median, s.frames
    );

    // the text format round-trips exactly
    assert_eq!(read_recorded(&write_recorded(&frames)).unwrap(), frames);
    print!("first records:\n{}", write_recorded(&frames[..3]));
}
