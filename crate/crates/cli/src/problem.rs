//! Problem files (JSON or TOML) and named presets.
//!
//! ```toml
//! problem = "sw"
//! pmf = [[0.7, 0.1], [0.1, 0.1]]
//! ```
//!
//! A MAC file carries `p_q`, `p_x1_given_q`, `p_x2_given_q` and `w[x1][x2][y]`;
//! an ABC file carries `p_ux` and `w[x][y1][y2]`. Any file may instead name a
//! `preset`.

use std::path::Path;

use dispersia::net_stats::{abc_statistics, mac_statistics, AbcSpec, InfoDispersion, MacSpec};
use dispersia::sw_stats::{dsbs, sw_statistics};
use dispersia::{EntropyTriple, JointPmf2, SwDispersion};
use serde::Deserialize;

use crate::{invalid, Error, Result};

pub const PRESETS: [&str; 4] = ["dsbs", "paper-a01", "paper-fig-angle", "paper-mac-b01"];

pub const DEFAULT_ZETA: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Sw,
    Mac,
    Abc,
}

/// The document as written, before validation.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub problem: Option<Kind>,
    pub preset: Option<String>,
    /// DSBS crossover, only with `preset = "dsbs"`.
    pub zeta: Option<f64>,
    pub pmf: Option<Vec<Vec<f64>>>,
    pub p_q: Option<Vec<f64>>,
    pub p_x1_given_q: Option<Vec<Vec<f64>>>,
    pub p_x2_given_q: Option<Vec<Vec<f64>>>,
    pub p_ux: Option<Vec<Vec<f64>>>,
    pub w: Option<Vec<Vec<Vec<f64>>>>,
}

/// A validated problem instance.
#[derive(Debug, Clone)]
pub enum Instance {
    Sw(JointPmf2),
    Mac(MacSpec),
    Abc(AbcSpec),
}

/// An instance together with its statistics.
#[derive(Debug, Clone)]
pub enum Stats {
    Sw { pmf: JointPmf2, h: EntropyTriple, d: SwDispersion },
    Net { kind: Kind, info: InfoDispersion },
}

impl ProblemSpec {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
            || text.trim_start().starts_with('{');
        if json {
            serde_json::from_str(text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn preset(name: &str) -> Self {
        ProblemSpec { preset: Some(name.to_string()), ..Default::default() }
    }

    pub fn resolve(&self) -> Result<Instance> {
        if let Some(name) = &self.preset {
            let explicit = self.pmf.is_some()
                || self.p_q.is_some()
                || self.p_x1_given_q.is_some()
                || self.p_x2_given_q.is_some()
                || self.p_ux.is_some()
                || self.w.is_some();
            if explicit {
                return invalid("a preset cannot be combined with explicit matrices");
            }
            if self.zeta.is_some() && name != "dsbs" {
                return invalid("zeta only applies to the dsbs preset");
            }
            let inst = expand_preset(name, self.zeta)?;
            if let Some(k) = self.problem {
                if k != inst.kind() {
                    return invalid(format!("preset {name} is not a {k:?} problem"));
                }
            }
            return Ok(inst);
        }
        if self.zeta.is_some() {
            return invalid("zeta only applies to the dsbs preset");
        }
        let Some(kind) = self.problem else {
            return invalid("missing field `problem` (one of sw, mac, abc)");
        };
        let stray = |fields: &[(&str, bool)]| -> Result<()> {
            match fields.iter().find(|(_, set)| *set) {
                Some((f, _)) => invalid(format!("field `{f}` does not apply to a {kind:?} problem")),
                None => Ok(()),
            }
        };
        let need = |name: &str| Error::Invalid(format!("missing field `{name}`"));
        match kind {
            Kind::Sw => {
                stray(&[
                    ("p_q", self.p_q.is_some()),
                    ("p_x1_given_q", self.p_x1_given_q.is_some()),
                    ("p_x2_given_q", self.p_x2_given_q.is_some()),
                    ("p_ux", self.p_ux.is_some()),
                    ("w", self.w.is_some()),
                ])?;
                let pmf = self.pmf.as_ref().ok_or_else(|| need("pmf"))?;
                Ok(Instance::Sw(JointPmf2::new(pmf)?))
            }
            Kind::Mac => {
                stray(&[("pmf", self.pmf.is_some()), ("p_ux", self.p_ux.is_some())])?;
                let spec = MacSpec::new(
                    self.p_q.clone().ok_or_else(|| need("p_q"))?,
                    self.p_x1_given_q.clone().ok_or_else(|| need("p_x1_given_q"))?,
                    self.p_x2_given_q.clone().ok_or_else(|| need("p_x2_given_q"))?,
                    self.w.clone().ok_or_else(|| need("w"))?,
                )?;
                Ok(Instance::Mac(spec))
            }
            Kind::Abc => {
                stray(&[
                    ("pmf", self.pmf.is_some()),
                    ("p_q", self.p_q.is_some()),
                    ("p_x1_given_q", self.p_x1_given_q.is_some()),
                    ("p_x2_given_q", self.p_x2_given_q.is_some()),
                ])?;
                let spec = AbcSpec::new(
                    self.p_ux.clone().ok_or_else(|| need("p_ux"))?,
                    self.w.clone().ok_or_else(|| need("w"))?,
                )?;
                Ok(Instance::Abc(spec))
            }
        }
    }
}

pub fn expand_preset(name: &str, zeta: Option<f64>) -> Result<Instance> {
    match name {
        "dsbs" => Ok(Instance::Sw(dsbs(zeta.unwrap_or(DEFAULT_ZETA))?.0)),
        "paper-a01" | "paper-fig-angle" => {
            let pmf = JointPmf2::new(&[vec![0.7, 0.1], vec![0.1, 0.1]])?;
            Ok(Instance::Sw(pmf))
        }
        "paper-mac-b01" => {
            // binary adder MAC, flip 0.1, inputs Bern(0.1) and Bern(0.9)
            let (keep, flip) = (vec![0.9, 0.1], vec![0.1, 0.9]);
            let w = vec![vec![keep.clone(), flip.clone()], vec![flip.clone(), keep.clone()]];
            Ok(Instance::Mac(MacSpec::new(vec![1.0], vec![keep], vec![flip], w)?))
        }
        _ => invalid(format!("unknown preset `{name}` (known: {})", PRESETS.join(", "))),
    }
}

impl Instance {
    pub fn kind(&self) -> Kind {
        match self {
            Instance::Sw(_) => Kind::Sw,
            Instance::Mac(_) => Kind::Mac,
            Instance::Abc(_) => Kind::Abc,
        }
    }

    pub fn stats(&self) -> Result<Stats> {
        Ok(match self {
            Instance::Sw(pmf) => {
                let (h, d) = sw_statistics(pmf)?;
                Stats::Sw { pmf: pmf.clone(), h, d }
            }
            Instance::Mac(s) => Stats::Net { kind: Kind::Mac, info: mac_statistics(s)? },
            Instance::Abc(s) => Stats::Net { kind: Kind::Abc, info: abc_statistics(s)? },
        })
    }

    pub fn sw_pmf(&self) -> Result<&JointPmf2> {
        match self {
            Instance::Sw(p) => Ok(p),
            other => invalid(format!("this command needs an sw problem, got {:?}", other.kind())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toml(text: &str) -> Result<Instance> {
        ProblemSpec::parse(text, Path::new("x.toml"))?.resolve()
    }

    #[test]
    fn presets_expand_exactly() {
        let Instance::Sw(p) = expand_preset("paper-a01", None).unwrap() else { panic!() };
        assert_eq!(p.to_matrix(), vec![vec![0.7, 0.1], vec![0.1, 0.1]]);
        let Instance::Sw(q) = expand_preset("paper-fig-angle", None).unwrap() else { panic!() };
        assert_eq!(p, q);
        let Instance::Mac(m) = expand_preset("paper-mac-b01", None).unwrap() else { panic!() };
        assert_eq!(m.p_x1_given_q, vec![vec![0.9, 0.1]]);
        assert_eq!(m.p_x2_given_q, vec![vec![0.1, 0.9]]);
        assert_eq!(m.w[0][0], vec![0.9, 0.1]);
        assert_eq!(m.w[0][1], vec![0.1, 0.9]);
        let reference = dispersia::net_stats::binary_adder_mac(0.1, 0.1, 0.9).unwrap();
        for (a, b) in m.joint().iter().zip(reference.joint()) {
            assert!((a - b).abs() < 1e-15);
        }
        let Instance::Sw(d) = expand_preset("dsbs", Some(0.1)).unwrap() else { panic!() };
        assert_eq!(d.get(0, 1), 0.05);
    }

    #[test]
    fn json_and_toml_agree() {
        let a = toml("problem = \"sw\"\npmf = [[0.5, 0.25], [0.125, 0.125]]\n").unwrap();
        let b = ProblemSpec::parse(r#"{"problem":"sw","pmf":[[0.5,0.25],[0.125,0.125]]}"#, Path::new("x.json"))
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!(a.sw_pmf().unwrap(), b.sw_pmf().unwrap());
    }

    #[test]
    fn schema_errors() {
        assert!(toml("pmf = [[1.0]]").is_err());
        assert!(toml("problem = \"sw\"").is_err());
        assert!(toml("problem = \"sw\"\npmf = [[0.5, 0.6]]").is_err());
        assert!(toml("problem = \"sw\"\npmf = [[0.5, 0.5]]\nbogus = 1").is_err());
        assert!(toml("problem = \"mac\"\npmf = [[0.5, 0.5]]").is_err());
        assert!(toml("preset = \"nope\"").is_err());
        assert!(toml("preset = \"paper-a01\"\nzeta = 0.1").is_err());
        assert!(toml("preset = \"paper-a01\"\nproblem = \"mac\"").is_err());
        assert!(matches!(toml("problem = \"sw\"\npmf = [[0.5, 0.6]]"), Err(Error::Core(_))));
    }

    #[test]
    fn abc_file() {
        let t = "problem = \"abc\"\np_ux = [[0.25, 0.25], [0.25, 0.25]]\n\
                 w = [[[0.81, 0.09], [0.09, 0.01]], [[0.01, 0.09], [0.09, 0.81]]]\n";
        let inst = toml(t).unwrap();
        assert_eq!(inst.kind(), Kind::Abc);
        assert!(inst.stats().is_ok());
    }
}
