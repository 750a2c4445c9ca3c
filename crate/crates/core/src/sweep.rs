//! One-parameter sweeps over the squeezed thermal, mode-mixed thermal and symmetric families.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::discord::{self, CorrelationReport};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::states::{MtsParams, StsParams};
use crate::symplectic::StandardForm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Two-mode squeezed thermal: `nbar1`, `nbar2` (or `kappa1`, `kappa2`), `r`.
    Sts,
    /// Mode-mixed thermal: `kappa1`, `kappa2`, `theta`.
    Mts,
    /// Symmetric `(b, b, c, dsign · c)`: `b`, one of `c` or `det` (= b² − c²), `dsign` = ±1.
    Symmetric,
}

impl Family {
    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            Family::Sts => &["nbar1", "nbar2", "kappa1", "kappa2", "r"],
            Family::Mts => &["kappa1", "kappa2", "theta"],
            Family::Symmetric => &["b", "c", "det", "dsign"],
        }
    }

    /// Unscaled standard form for a full parameter assignment.
    pub fn standard_form(self, params: &BTreeMap<String, f64>) -> Result<StandardForm> {
        for key in params.keys() {
            if !self.parameter_names().contains(&key.as_str()) {
                return Err(Error::InvalidParams(format!("unknown {self} parameter '{key}'")));
            }
        }
        let get = |k: &str| params.get(k).copied();
        let need = |k: &str| get(k).ok_or_else(|| Error::InvalidParams(format!("missing {self} parameter '{k}'")));
        let sf = match self {
            Family::Sts => {
                let occupancy = |n: &str, k: &str| match (get(n), get(k)) {
                    (Some(v), None) => Ok(v),
                    (None, Some(kappa)) => Ok(kappa - 0.5),
                    (Some(_), Some(_)) => Err(Error::InvalidParams(format!("give only one of '{n}' and '{k}'"))),
                    (None, None) => Err(Error::InvalidParams(format!("missing sts parameter '{n}' or '{k}'"))),
                };
                StsParams::new(occupancy("nbar1", "kappa1")?, occupancy("nbar2", "kappa2")?, need("r")?)
                    .standard_form()?
            }
            Family::Mts => MtsParams::new(need("kappa1")?, need("kappa2")?, need("theta")?).standard_form()?,
            Family::Symmetric => {
                let b = need("b")?;
                let c = match (get("c"), get("det")) {
                    (Some(c), None) => c,
                    (None, Some(det)) => {
                        let c2 = b * b - det;
                        if c2 < 0.0 {
                            return Err(Error::InvalidParams(format!("b² < det ({b}² < {det})")));
                        }
                        c2.sqrt()
                    }
                    _ => return Err(Error::InvalidParams("give exactly one of 'c' and 'det'".into())),
                };
                let dsign = get("dsign").unwrap_or(-1.0);
                if dsign != 1.0 && dsign != -1.0 {
                    return Err(Error::InvalidParams(format!("dsign must be +1 or -1, got {dsign}")));
                }
                StandardForm::symmetric(b, c, dsign * c)
            }
        };
        sf.validate()?;
        Ok(sf)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Sts => "sts",
            Family::Mts => "mts",
            Family::Symmetric => "symmetric",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sts" => Ok(Family::Sts),
            "mts" => Ok(Family::Mts),
            "symmetric" | "sym" => Ok(Family::Symmetric),
            other => Err(Error::InvalidParams(format!("unknown family '{other}'"))),
        }
    }
}

/// A column of sweep output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Hellinger,
    MaxAffinity,
    Entropic,
    Mutual,
    Classical,
    Eof,
    Separable,
}

impl Measure {
    pub const ALL: [Measure; 7] = [
        Measure::Hellinger,
        Measure::MaxAffinity,
        Measure::Entropic,
        Measure::Mutual,
        Measure::Classical,
        Measure::Eof,
        Measure::Separable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Hellinger => "hellinger",
            Measure::MaxAffinity => "max_affinity",
            Measure::Entropic => "entropic",
            Measure::Mutual => "mutual",
            Measure::Classical => "classical",
            Measure::Eof => "eof",
            Measure::Separable => "separable",
        }
    }

    /// Numeric value; `separable` maps to 1 or 0. `None` when undefined for the state.
    pub fn value(self, r: &CorrelationReport) -> Option<f64> {
        match self {
            Measure::Hellinger => Some(r.hellinger_discord),
            Measure::MaxAffinity => Some(r.max_affinity),
            Measure::Entropic => r.entropic_discord,
            Measure::Mutual => Some(r.mutual_information),
            Measure::Classical => r.classical_correlations,
            Measure::Eof => r.eof,
            Measure::Separable => Some(if r.separable { 1.0 } else { 0.0 }),
        }
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown measure '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepRange {
    /// `steps` evenly spaced points including both ends.
    pub fn points(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

impl FromStr for SweepRange {
    type Err = Error;

    /// `start:stop:steps`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("range must be start:stop:steps, got '{s}'"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
        Ok(Self { start, stop, steps })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub family: Family,
    pub fixed: BTreeMap<String, f64>,
    pub sweep_param: String,
    pub range: SweepRange,
    pub outputs: Vec<Measure>,
}

/// One evaluated sweep point; `report` is `None` when the point is not a physical state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub standard_form: Option<StandardForm>,
    pub report: Option<CorrelationReport>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn physical(&self) -> bool {
        self.report.is_some()
    }

    pub fn measure(&self, m: Measure) -> Option<f64> {
        self.report.as_ref().and_then(|r| m.value(r))
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.family.parameter_names().contains(&self.sweep_param.as_str()) {
            return Err(Error::InvalidParams(format!(
                "'{}' is not a {} parameter",
                self.sweep_param, self.family
            )));
        }
        if self.fixed.contains_key(&self.sweep_param) {
            return Err(Error::InvalidParams(format!(
                "'{}' is both swept and fixed",
                self.sweep_param
            )));
        }
        if self.range.steps < 2 {
            return Err(Error::InvalidParams("a sweep needs at least 2 steps".into()));
        }
        if !self.range.start.is_finite() || !self.range.stop.is_finite() {
            return Err(Error::InvalidParams("range ends must be finite".into()));
        }
        if self.outputs.is_empty() {
            return Err(Error::InvalidParams("no output measures selected".into()));
        }
        Ok(())
    }

    fn row(&self, value: f64) -> SweepRow {
        let mut params = self.fixed.clone();
        params.insert(self.sweep_param.clone(), value);
        let outcome = self
            .family
            .standard_form(&params)
            .and_then(|sf| discord::correlation_report(&sf.to_cm(), &[0.0; 4]).map(|r| (sf, r)));
        match outcome {
            Ok((sf, report)) => SweepRow {
                value,
                standard_form: Some(sf),
                report: Some(report),
                error: None,
            },
            Err(e) => SweepRow {
                value,
                standard_form: None,
                report: None,
                error: Some(e.to_string()),
            },
        }
    }

    /// Evaluates every point, in range order. Invalid points come back flagged, not as errors.
    pub fn run(&self, execution: Execution) -> Result<Vec<SweepRow>> {
        self.validate()?;
        Ok(execution.map(&self.range.points(), |&x| self.row(x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: Family, fixed: &[(&str, f64)], param: &str, range: &str) -> SweepSpec {
        SweepSpec {
            family,
            fixed: fixed.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            sweep_param: param.into(),
            range: range.parse().unwrap(),
            outputs: Measure::ALL.to_vec(),
        }
    }

    #[test]
    fn range_points() {
        let r: SweepRange = "0:1:5".parse().unwrap();
        assert_eq!(r.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!("0:1".parse::<SweepRange>().is_err());
        assert!("a:1:3".parse::<SweepRange>().is_err());
    }

    #[test]
    fn family_forms() {
        let p: BTreeMap<String, f64> = [
            ("kappa1".to_string(), 0.5),
            ("kappa2".to_string(), 20.5),
            ("r".to_string(), 0.3),
        ]
        .into_iter()
        .collect();
        let sf = Family::Sts.standard_form(&p).unwrap();
        let direct = StsParams::new(0.0, 20.0, 0.3).standard_form().unwrap();
        assert!(sf.max_abs_diff(&direct) < 1e-14);

        let p: BTreeMap<String, f64> = [
            ("b".to_string(), 4.0),
            ("det".to_string(), 6.25),
            ("dsign".to_string(), 1.0),
        ]
        .into_iter()
        .collect();
        let sf = Family::Symmetric.standard_form(&p).unwrap();
        assert!((sf.b1 * sf.b1 - sf.c * sf.c - 6.25).abs() < 1e-12 && sf.d == sf.c);
    }

    #[test]
    fn validation() {
        let s = spec(Family::Sts, &[("nbar1", 0.0), ("nbar2", 1.0)], "r", "0:1:3");
        assert!(s.validate().is_ok());
        let s = spec(Family::Sts, &[("nbar1", 0.0), ("r", 1.0)], "r", "0:1:3");
        assert!(s.validate().is_err());
        let s = spec(Family::Sts, &[("nbar1", 0.0), ("nbar2", 1.0)], "theta", "0:1:3");
        assert!(s.validate().is_err());
        let s = spec(Family::Sts, &[("nbar1", 0.0), ("nbar2", 1.0)], "r", "0:1:1");
        assert!(s.validate().is_err());
    }

    #[test]
    fn unphysical_points_are_flagged() {
        let s = spec(Family::Symmetric, &[("det", 6.25)], "b", "2.0:3.0:3");
        let rows = s.run(Execution::Sequential).unwrap();
        assert!(!rows[0].physical() && rows[0].error.is_some());
        assert!(rows[1].physical() && rows[2].physical());
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let s = spec(Family::Mts, &[("kappa1", 3.0), ("kappa2", 0.7)], "theta", "0:3.14:17");
        assert_eq!(
            s.run(Execution::Sequential).unwrap(),
            s.run(Execution::Parallel).unwrap()
        );
    }
}
