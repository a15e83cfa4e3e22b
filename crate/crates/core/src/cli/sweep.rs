use serde::{Deserialize, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

use crate::experiment::DetectorStrategy;
use crate::spin_chsh::SpinDirection;

/// Tolerance on the norm of directions typed on the command line, which are
/// usually rounded to a few decimals.
pub const CLI_DIRECTION_SLACK: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepVariable {
    Time,
    Eta,
    SeparationR,
    Trials,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Logarithmic,
}

/// `VARIABLE:START:STOP:POINTS[:lin|log]`, e.g. `time:1:1000:13:log`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    return self.stop;
                }
                let f = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start + f * (self.stop - self.start),
                    Spacing::Logarithmic => self.start * (self.stop / self.start).powf(f),
                }
            })
            .collect()
    }
}

impl FromStr for SweepSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(format!("expected VARIABLE:START:STOP:POINTS[:lin|log], got '{s}'"));
        }
        let variable = match parts[0] {
            "time" | "t" => SweepVariable::Time,
            "eta" => SweepVariable::Eta,
            "separation-r" | "r" => SweepVariable::SeparationR,
            "trials" => SweepVariable::Trials,
            other => return Err(format!("unknown sweep variable '{other}'")),
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad number '{v}': {e}"));
        let start = num(parts[1])?;
        let stop = num(parts[2])?;
        let points: usize = parts[3].trim().parse().map_err(|e| format!("bad point count '{}': {e}", parts[3]))?;
        let spacing = match parts.get(4).copied() {
            None | Some("lin") | Some("linear") => Spacing::Linear,
            Some("log") | Some("logarithmic") => Spacing::Logarithmic,
            Some(other) => return Err(format!("unknown spacing '{other}'")),
        };
        if !(start.is_finite() && stop.is_finite()) || start >= stop {
            return Err(format!("sweep needs finite start < stop, got {start} and {stop}"));
        }
        if points < 2 {
            return Err(format!("sweep needs at least 2 points, got {points}"));
        }
        if spacing == Spacing::Logarithmic && start <= 0.0 {
            return Err("logarithmic sweep needs a positive start".into());
        }
        Ok(Self { variable, start, stop, points, spacing })
    }
}

/// Detector placement as typed on the command line: `adaptive`, a number, or
/// `schedule:T=ETA,T=ETA,...`.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaArg(pub DetectorStrategy);

impl FromStr for EtaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("adaptive") {
            return Ok(Self(DetectorStrategy::Adaptive));
        }
        if let Some(rest) = s.strip_prefix("schedule:") {
            let points = rest
                .split(',')
                .map(|pair| {
                    let (t, e) = pair.split_once('=').ok_or_else(|| format!("schedule entry '{pair}' is not T=ETA"))?;
                    let t: f64 = t.trim().parse().map_err(|e| format!("bad schedule time '{t}': {e}"))?;
                    let e: f64 = e.trim().parse().map_err(|err| format!("bad schedule eta '{e}': {err}"))?;
                    Ok((t, e))
                })
                .collect::<Result<Vec<_>, String>>()?;
            return DetectorStrategy::schedule(points).map(Self).map_err(|e| e.to_string());
        }
        let eta: f64 = s.parse().map_err(|_| format!("eta must be 'adaptive', a number or 'schedule:...', got '{s}'"))?;
        if !eta.is_finite() {
            return Err(format!("eta must be finite, got {eta}"));
        }
        Ok(Self(DetectorStrategy::Static { eta }))
    }
}

impl fmt::Display for EtaArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            DetectorStrategy::Adaptive => write!(f, "adaptive"),
            DetectorStrategy::Static { eta } => write!(f, "{eta}"),
            DetectorStrategy::Schedule(points) => {
                let body: Vec<String> = points.iter().map(|(t, e)| format!("{t}={e}")).collect();
                write!(f, "schedule:{}", body.join(","))
            }
        }
    }
}

/// `x,y,z` with the norm checked against [`CLI_DIRECTION_SLACK`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionArg(pub SpinDirection);

impl FromStr for DirectionArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let c: Vec<f64> = s
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| format!("bad component '{v}': {e}")))
            .collect::<Result<_, _>>()?;
        if c.len() != 3 {
            return Err(format!("direction needs 3 components, got {}", c.len()));
        }
        SpinDirection::with_slack(c[0], c[1], c[2], CLI_DIRECTION_SLACK).map(Self).map_err(|e| e.to_string())
    }
}

impl fmt::Display for DirectionArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = self.0.components();
        write!(f, "{x},{y},{z}")
    }
}

impl Serialize for EtaArg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for DirectionArg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sweeps() {
        let s: SweepSpec = "time:1:1000:4:log".parse().unwrap();
        assert_eq!(s.variable, SweepVariable::Time);
        let v = s.values();
        assert_eq!(v.len(), 4);
        assert!((v[1] - 10.0).abs() < 1e-12 && (v[2] - 100.0).abs() < 1e-9);
        assert_eq!(v[3], 1000.0);
        let s: SweepSpec = "eta:0:3:4".parse().unwrap();
        assert_eq!(s.values(), vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_bad_sweeps() {
        for bad in ["time:5:1:3", "time:0:1:1", "time:0:10:5:log", "speed:0:1:3", "time:0:1", "time:a:1:3"] {
            assert!(bad.parse::<SweepSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn parses_eta() {
        assert_eq!("adaptive".parse::<EtaArg>().unwrap().0, DetectorStrategy::Adaptive);
        assert_eq!("2.5".parse::<EtaArg>().unwrap().0, DetectorStrategy::Static { eta: 2.5 });
        let s = "schedule:0=0,10=5".parse::<EtaArg>().unwrap();
        assert_eq!(s.0, DetectorStrategy::Schedule(vec![(0.0, 0.0), (10.0, 5.0)]));
        assert_eq!(s.to_string(), "schedule:0=0,10=5");
        assert!("schedule:1=0,1=2".parse::<EtaArg>().is_err());
        assert!("nowhere".parse::<EtaArg>().is_err());
    }

    #[test]
    fn rounded_directions_accepted() {
        let d: DirectionArg = "-0.7071,0,-0.7071".parse().unwrap();
        let n: f64 = d.0.components().iter().map(|c| c * c).sum();
        assert!((n - 1.0).abs() < 1e-12);
        assert!("1,1,0".parse::<DirectionArg>().is_err());
        assert!("1,0".parse::<DirectionArg>().is_err());
    }
}
