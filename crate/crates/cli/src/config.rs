//! Flat run configuration read from a TOML file and overridden by flags.

use serde::{Deserialize, Serialize};
use stablewalk::law::{AtomRule, Family, TailSpec};
use stablewalk::{presets, Error, Result};
use std::path::Path;

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// named reference law; explicit tail fields below override its values
    pub preset: Option<String>,
    pub alpha: Option<f64>,
    pub family: Option<String>,
    pub b_scale: Option<f64>,
    pub q_plus: Option<f64>,
    pub q_minus: Option<f64>,
    pub beta_neg: Option<f64>,
    pub atom_rule: Option<String>,
    pub tail_start: Option<i64>,
    pub support_radius: Option<u64>,

    pub seed: Option<u64>,
    /// horizons for reports and tables
    pub ns: Option<Vec<usize>>,
    /// cap on the final deviation of checked series
    pub cap: Option<f64>,

    /// start point for kernel and Monte Carlo runs
    pub start: Option<i64>,
    /// "origin", "half_line" or a list of sites
    pub killing: Option<Killing>,
    pub half_width: Option<i64>,
    pub x_max: Option<i64>,
    pub trials: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Killing {
    Named(String),
    Sites(Vec<i64>),
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Parse errors carry the line and column of the offending key.
    pub fn parse(text: &str) -> Result<RunConfig> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn has_law(&self) -> bool {
        self.preset.is_some() || self.alpha.is_some()
    }

    /// Law name and tail specification.
    pub fn tail_spec(&self) -> Result<(String, TailSpec)> {
        let (name, mut spec) = match (&self.preset, self.alpha) {
            (Some(p), _) => (p.clone(), presets::by_name(p)?),
            (None, Some(alpha)) => {
                let family = Family::parse(self.family.as_deref().unwrap_or("two_sided_pareto"))?;
                let spec = TailSpec::new(alpha, family, self.b_scale.unwrap_or(1.0));
                (format!("{}-{alpha}", family.name()), spec)
            }
            (None, None) => return Err(Error::Config("no law: set `preset` or `alpha`".into())),
        };
        if let Some(a) = self.alpha {
            spec.alpha = a;
        }
        if let Some(f) = &self.family {
            spec.family = Family::parse(f)?;
        }
        if let Some(b) = self.b_scale {
            spec.b_scale = b;
        }
        if self.q_plus.is_some() || self.q_minus.is_some() {
            spec.q_plus = self.q_plus.unwrap_or(spec.q_plus);
            spec.q_minus = self.q_minus.unwrap_or(1.0 - spec.q_plus);
        }
        if let Some(b) = self.beta_neg {
            spec.beta_neg = Some(b);
        }
        if let Some(r) = &self.atom_rule {
            spec.atom_rule = AtomRule::parse(r)?;
        }
        if let Some(s) = self.tail_start {
            spec.tail_start = Some(s);
        }
        if let Some(r) = self.support_radius {
            spec.support_radius = r;
        }
        spec.validate()?;
        Ok((name, spec))
    }

    pub fn killing_set(&self) -> Result<stablewalk::killed::KillingSet> {
        use stablewalk::killed::KillingSet;
        match &self.killing {
            None => Ok(KillingSet::Finite(vec![0])),
            Some(Killing::Named(s)) => match s.as_str() {
                "origin" => Ok(KillingSet::Finite(vec![0])),
                "half_line" => Ok(KillingSet::AtOrBelow(0)),
                "none" => Ok(KillingSet::Empty),
                other => Err(Error::Config(format!(
                    "killing = {other:?}; expected \"origin\", \"half_line\", \"none\" or a list of sites"
                ))),
            },
            Some(Killing::Sites(v)) if v.is_empty() => Err(Error::Config("empty killing set".into())),
            Some(Killing::Sites(v)) => Ok(KillingSet::finite(v)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_errors_name_the_line() {
        let e = RunConfig::parse("preset = \"symmetric-1.5\"\nalpha = \"x\"\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse("alpah = 1.5").is_err());
    }

    #[test]
    fn explicit_fields_override_the_preset() {
        let c = RunConfig::parse("preset = \"symmetric-1.5\"\nb_scale = 0.5\n").unwrap();
        let (_, spec) = c.tail_spec().unwrap();
        assert_eq!(spec.b_scale, 0.5);
        assert_eq!(spec.alpha, 1.5);
    }

    #[test]
    fn killing_forms() {
        let c = RunConfig::parse("killing = [-1, 0, 2]").unwrap();
        assert_eq!(c.killing_set().unwrap(), stablewalk::killed::KillingSet::Finite(vec![-1, 0, 2]));
        let c = RunConfig::parse("killing = \"half_line\"").unwrap();
        assert_eq!(c.killing_set().unwrap(), stablewalk::killed::KillingSet::AtOrBelow(0));
    }
}
