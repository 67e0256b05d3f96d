//! Piecewise-constant drive scripts.
//!
//! One command per line, `t_seconds v_mps delta_rad`, whitespace separated.
//! A command holds from its timestamp until the next one; the last line marks
//! the end of the script. Blank lines and `#` comments are ignored.

use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("trajectory has no commands")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Command {
    pub time: f64,
    pub velocity: f64,
    pub steering: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    commands: Vec<Command>,
}

/// Constant command over `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub velocity: f64,
    pub steering: f64,
}

impl Trajectory {
    pub fn new(commands: Vec<Command>) -> Result<Self, TrajectoryError> {
        if commands.is_empty() {
            return Err(TrajectoryError::Empty);
        }
        for (i, w) in commands.windows(2).enumerate() {
            if w[1].time < w[0].time {
                return Err(TrajectoryError::Parse {
                    line: i + 2,
                    msg: format!("time {} goes backwards", w[1].time),
                });
            }
        }
        Ok(Self { commands })
    }

    /// Drive `velocity` with fixed `steering` for `duration` seconds.
    pub fn constant(velocity: f64, steering: f64, duration: f64) -> Self {
        Self {
            commands: vec![
                Command {
                    time: 0.0,
                    velocity,
                    steering,
                },
                Command {
                    time: duration,
                    velocity: 0.0,
                    steering,
                },
            ],
        }
    }

    pub fn parse(text: &str) -> Result<Self, TrajectoryError> {
        let mut commands = Vec::new();
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(TrajectoryError::Parse {
                    line,
                    msg: format!("expected `t v delta`, found {} fields", fields.len()),
                });
            }
            let num = |k: usize, what: &str| -> Result<f64, TrajectoryError> {
                fields[k]
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| TrajectoryError::Parse {
                        line,
                        msg: format!("{what} `{}` is not a finite number", fields[k]),
                    })
            };
            let cmd = Command {
                time: num(0, "time")?,
                velocity: num(1, "velocity")?,
                steering: num(2, "steering")?,
            };
            if let Some(prev) = commands.last() {
                let prev: &Command = prev;
                if cmd.time < prev.time {
                    return Err(TrajectoryError::Parse {
                        line,
                        msg: format!("time {} is earlier than line {last_line}", cmd.time),
                    });
                }
            }
            commands.push(cmd);
            last_line = line;
        }
        Self::new(commands)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TrajectoryError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn commands(&self) -> &[Command] {
        &self.commands
    }

    pub fn start(&self) -> f64 {
        self.commands[0].time
    }

    pub fn end(&self) -> f64 {
        self.commands[self.commands.len() - 1].time
    }

    pub fn duration(&self) -> f64 {
        self.end() - self.start()
    }

    /// Non-empty constant segments in time order.
    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.commands
            .windows(2)
            .filter(|w| w[1].time > w[0].time)
            .map(|w| Segment {
                start: w[0].time,
                end: w[1].time,
                velocity: w[0].velocity,
                steering: w[0].steering,
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_script() {
        let t = Trajectory::parse("# drive\n0 0.1 0.0\n10 0.1 0.2 # turn\n\n15 0 0\n").unwrap();
        assert_eq!(t.commands().len(), 3);
        assert_eq!(t.duration(), 15.0);
        let segs: Vec<_> = t.segments().collect();
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[1].steering, 0.2);
        assert_eq!((segs[1].start, segs[1].end), (10.0, 15.0));
    }

    #[test]
    fn single_line_has_zero_duration() {
        let t = Trajectory::parse("0 1 0\n").unwrap();
        assert_eq!(t.duration(), 0.0);
        assert_eq!(t.segments().count(), 0);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(Trajectory::parse(""), Err(TrajectoryError::Empty)));
        assert!(matches!(
            Trajectory::parse("0 1\n"),
            Err(TrajectoryError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            Trajectory::parse("0 1 0\n5 x 0\n"),
            Err(TrajectoryError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            Trajectory::parse("5 1 0\n# c\n1 1 0\n"),
            Err(TrajectoryError::Parse { line: 3, .. })
        ));
    }
}
