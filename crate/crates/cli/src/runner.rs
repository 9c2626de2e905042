//! Scenario execution: admissibility gate, solve, and atomic artifact
//! output. Exit codes: 0 success, 1 config or verification failure,
//! 2 admissibility rejection, 3 runtime solver error.

use std::fs;
use std::path::{Path, PathBuf};

use relvac::solver::csv::{snapshot_csv, tame_report_csv};
use relvac::solver::frames::{
    solve_boosted, solve_lab, solve_nonrelativistic, SolveOptions, TameRunReport, Trajectory,
};

use crate::config::{ConfigError, FrameChoice, ScenarioConfig};
use crate::suites;

/// Marker file left in the output directory when a run fails after the
/// admissibility gate; its contents are the error message.
pub const FAILURE_MARKER: &str = "FAILED.txt";

pub fn run(config_path: &Path, out_override: Option<&Path>, seed_override: Option<u64>) -> i32 {
    let text = match fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("config error: cannot read {}: {e}", config_path.display());
            return 1;
        }
    };
    let name = config_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".to_string());
    let scenario = match ScenarioConfig::from_json(&text).and_then(|c| c.into_scenario(name)) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("config error: {}", e.message());
            return 1;
        }
    };

    // physics gate before any compute or filesystem work
    let eos = match scenario.admissibility_gate() {
        Ok(eos) => eos,
        Err(ConfigError::Inadmissible(msg)) => {
            eprintln!("inadmissible scenario: {msg}");
            return 2;
        }
        Err(ConfigError::Structural(msg)) => {
            eprintln!("config error: {msg}");
            return 1;
        }
    };

    let out_dir = out_override
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("out").join(&scenario.name));
    if let Err(e) = fs::create_dir_all(&out_dir) {
        eprintln!("cannot create output directory {}: {e}", out_dir.display());
        return 3;
    }
    // a fresh attempt clears the previous failure marker, if any
    let _ = fs::remove_file(out_dir.join(FAILURE_MARKER));

    let opts = SolveOptions {
        cfl: scenario.cfl,
        output_times: scenario.output_times.clone(),
        periodic: scenario.periodic,
        ..SolveOptions::default()
    };
    let solved: Result<(Trajectory, TameRunReport), relvac::error::Error> = match scenario.frame {
        FrameChoice::Lab => solve_lab(&eos, &scenario.initial, scenario.t_end, &opts),
        FrameChoice::Boosted => solve_boosted(&eos, &scenario.initial, scenario.t_end, &opts)
            .map(|(traj, report, _cert)| (traj, report)),
        FrameChoice::Galilean => solve_nonrelativistic(
            &eos,
            &scenario.initial,
            scenario.t_end,
            scenario.shift.as_ref().expect("validated at config time"),
            &opts,
        ),
    };
    let (trajectory, report) = match solved {
        Ok(pair) => pair,
        Err(e) => {
            let msg = format!("solver error: {e}");
            eprintln!("{msg}");
            if let Err(io) = fs::write(out_dir.join(FAILURE_MARKER), format!("{msg}\n")) {
                eprintln!("additionally failed to write the failure marker: {io}");
            }
            return 3;
        }
    };

    // render every artifact before writing any, so output is all-or-nothing
    let mut artifacts: Vec<(String, String)> = Vec::new();
    for (i, (t, slice)) in trajectory
        .times
        .iter()
        .zip(&trajectory.slices)
        .enumerate()
    {
        match snapshot_csv(&eos, slice, *t) {
            Ok(csv) => artifacts.push((format!("snapshot_{i:04}.csv"), csv)),
            Err(e) => {
                let msg = format!("solver error: snapshot at t = {t} is not representable: {e}");
                eprintln!("{msg}");
                let _ = fs::write(out_dir.join(FAILURE_MARKER), format!("{msg}\n"));
                return 3;
            }
        }
    }
    artifacts.push(("tame_report.csv".to_string(), tame_report_csv(&report)));

    let mut verification_failed = false;
    if let Some(block) = &scenario.verify {
        let seed = seed_override.unwrap_or(block.seed);
        let mut summary = String::new();
        for suite in &block.suites {
            match suites::run_suite(suite, block.samples, seed) {
                Some(reports) => {
                    for r in reports {
                        verification_failed |= !r.passed();
                        summary.push_str(&r.render());
                    }
                }
                None => {
                    eprintln!("config error: unknown verify suite '{suite}'");
                    return 1;
                }
            }
        }
        print!("{summary}");
        artifacts.push(("verification.txt".to_string(), summary));
    }

    for (file, contents) in &artifacts {
        if let Err(e) = write_atomic(&out_dir.join(file), contents) {
            eprintln!("cannot write {file}: {e}");
            let _ = fs::write(
                out_dir.join(FAILURE_MARKER),
                format!("artifact write failed: {e}\n"),
            );
            return 3;
        }
    }
    if !report.warnings.is_empty() {
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
    }
    println!(
        "wrote {} snapshots and the run report to {}",
        trajectory.slices.len(),
        out_dir.display()
    );
    if verification_failed {
        eprintln!("verification failed; see verification.txt");
        return 1;
    }
    0
}

/// Writes through a temporary sibling and renames, so a crash can truncate
/// only the `.tmp` file, never a finished artifact.
fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}
