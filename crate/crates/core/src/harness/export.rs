use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::dynamics::{Outcome, Sample, Trajectory};
use crate::error::{Error, Result};
use crate::model::{BodyState, ContactForces};

pub const TRAJECTORY_HEADER: &str = "t,x,v,alpha,omega,S_L,S_R,F_N_L,F_N_R,F_s_L,F_s_R,outcome";

/// Outcome column value for every row but the last.
pub const RUNNING: &str = "running";

/// Writes the trajectory as CSV. `f64` `Display` is the shortest string that
/// parses back to the same value.
pub fn write_trajectory<W: Write>(traj: &Trajectory, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    let n = traj.samples.len();
    for (i, s) in traj.samples.iter().enumerate() {
        let outcome = if i + 1 == n { traj.outcome.as_str() } else { RUNNING };
        let b = &s.body;
        let f = &s.forces;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            s.t, b.x, b.v, b.alpha, b.omega, s.s_left, s.s_right, f.normal_left, f.normal_right, f.shear_left,
            f.shear_right, outcome
        )?;
    }
    out.flush()
}

pub fn export_trajectory(traj: &Trajectory, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io)?;
    write_trajectory(traj, BufWriter::new(file)).map_err(io)
}

/// Reads a CSV written by [`write_trajectory`]. Belt speeds are not part of
/// the file and come back as zero; contact flags are recovered from the
/// normal forces.
pub fn read_trajectory<R: Read>(input: R) -> Result<Trajectory> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| Error::Parse(format!("trajectory csv: {e}")))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != TRAJECTORY_HEADER {
        return Err(Error::Parse(format!("trajectory csv: unexpected header `{header}`")));
    }
    let mut samples = Vec::new();
    let mut outcome = Outcome::Completed;
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("trajectory csv: {e}")))?;
        let num = |i: usize| -> Result<f64> {
            record[i]
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("trajectory csv row {}: column {i}: {e}", line + 1)))
        };
        let normal_left = num(7)?;
        let normal_right = num(8)?;
        let sample = Sample {
            t: num(0)?,
            body: BodyState {
                x: num(1)?,
                v: num(2)?,
                alpha: num(3)?,
                omega: num(4)?,
                in_contact: (normal_left > 0.0, normal_right > 0.0),
            },
            s_left: num(5)?,
            s_right: num(6)?,
            v_belt_left: 0.0,
            v_belt_right: 0.0,
            forces: ContactForces {
                normal_left,
                normal_right,
                shear_left: num(9)?,
                shear_right: num(10)?,
            },
        };
        if let Some(prev) = samples.last().map(|p: &Sample| p.t) {
            if !(sample.t > prev) {
                return Err(Error::Parse(format!("trajectory csv row {}: time not increasing", line + 1)));
            }
        }
        let tag = &record[11];
        if tag != RUNNING {
            outcome = Outcome::parse(tag)
                .ok_or_else(|| Error::Parse(format!("trajectory csv row {}: unknown outcome `{tag}`", line + 1)))?;
        }
        samples.push(sample);
    }
    Ok(Trajectory {
        initial: None,
        samples,
        outcome,
    })
}

pub fn import_trajectory(path: impl AsRef<Path>) -> Result<Trajectory> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_trajectory(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(t: f64, x: f64) -> Sample {
        Sample {
            t,
            body: BodyState {
                x,
                v: 0.1,
                alpha: -0.25,
                omega: 1e-7,
                in_contact: (true, true),
            },
            s_left: 0.3,
            s_right: 1.0 / 3.0,
            forces: ContactForces {
                normal_left: 2.5,
                normal_right: 2.5,
                shear_left: 0.1,
                shear_right: -0.2,
            },
            ..Sample::default()
        }
    }

    #[test]
    fn golden_header() {
        assert_eq!(TRAJECTORY_HEADER, "t,x,v,alpha,omega,S_L,S_R,F_N_L,F_N_R,F_s_L,F_s_R,outcome");
        let empty = Trajectory {
            initial: None,
            samples: vec![],
            outcome: Outcome::Completed,
        };
        let mut buf = Vec::new();
        write_trajectory(&empty, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{TRAJECTORY_HEADER}\n"));
    }

    #[test]
    fn rows_and_outcome_column() {
        let traj = Trajectory {
            initial: None,
            samples: vec![sample(1e-4, 0.05), sample(2e-4, 0.0501)],
            outcome: Outcome::Dropped,
        };
        let mut buf = Vec::new();
        write_trajectory(&traj, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "0.0001,0.05,0.1,-0.25,0.0000001,0.3,0.3333333333333333,2.5,2.5,0.1,-0.2,running");
        assert!(lines[2].ends_with(",dropped"));

        let back = read_trajectory(text.as_bytes()).unwrap();
        assert_eq!(back.outcome, Outcome::Dropped);
        assert_eq!(back.samples, traj.samples);
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(read_trajectory("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn rejects_time_going_backwards() {
        let text = format!("{TRAJECTORY_HEADER}\n0.2,0,0,0,0,0,0,0,0,0,0,running\n0.1,0,0,0,0,0,0,0,0,0,0,completed\n");
        assert!(read_trajectory(text.as_bytes()).is_err());
    }

    #[test]
    fn io_error_names_path() {
        let traj = Trajectory {
            initial: None,
            samples: vec![],
            outcome: Outcome::Completed,
        };
        let err = export_trajectory(&traj, "/nonexistent-dir/x.csv").unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
