use std::fmt;
use std::str::FromStr;

use mpemba_core::grid::{lin_space, log_space};

/// `start:stop:count:log|lin`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub log: bool,
}

impl GridSpec {
    pub fn points(&self) -> mpemba_core::Result<Vec<f64>> {
        if self.log {
            log_space(self.start, self.stop, self.count)
        } else {
            Ok(lin_space(self.start, self.stop, self.count))
        }
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, count, kind] = parts[..] else {
            return Err(format!("expected start:stop:count:log|lin, got '{s}'"));
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad grid bound '{v}': {e}"));
        let (start, stop) = (num(start)?, num(stop)?);
        if !start.is_finite() || !stop.is_finite() {
            return Err("grid bounds must be finite".into());
        }
        let count = count.trim().parse::<usize>().map_err(|e| format!("bad grid count '{count}': {e}"))?;
        let log = match kind.trim() {
            "log" => true,
            "lin" => false,
            other => return Err(format!("grid spacing must be 'log' or 'lin', got '{other}'")),
        };
        if log && count > 0 && (start <= 0.0 || stop <= 0.0) {
            return Err("log grid bounds must be positive".into());
        }
        Ok(GridSpec { start, stop, count, log })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.log { "log" } else { "lin" };
        write!(f, "{}:{}:{}:{kind}", self.start, self.stop, self.count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints() {
        let g: GridSpec = "1e-2:1000:50:log".parse().unwrap();
        assert_eq!(g, GridSpec { start: 0.01, stop: 1000.0, count: 50, log: true });
        assert_eq!(g.points().unwrap().len(), 50);
        assert_eq!(g.to_string(), "0.01:1000:50:log");
        let l: GridSpec = "0:1:3:lin".parse().unwrap();
        assert_eq!(l.points().unwrap(), [0.0, 0.5, 1.0]);
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["1:2:3", "a:2:3:lin", "1:2:x:lin", "1:2:3:cubic", "0:1:5:log", "1:inf:3:lin"] {
            assert!(bad.parse::<GridSpec>().is_err(), "{bad}");
        }
        assert!("0:1:0:log".parse::<GridSpec>().unwrap().points().unwrap().is_empty());
    }
}
