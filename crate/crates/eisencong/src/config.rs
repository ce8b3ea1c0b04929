//! The TOML configuration: presets, characters, batteries and settings.
//!
//! ```toml
//! [settings]
//! cap = 200000
//! report_dir = "reports"
//!
//! [presets.zeta9]
//! builtin = "zeta9"
//!
//! [presets.zeta9-wide]
//! builtin = "zeta9"
//! top_unit_cap = 3
//!
//! [characters.quad5]
//! modulus = 5
//! order = 2
//!
//! [batteries.zeta9-quick]
//! preset = "zeta9"
//! weights = [1, 2]
//! bound = 12
//! ```
//!
//! Unknown keys anywhere are errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use eisencong_core::classgroups::DEFAULT_CAP;
use eisencong_core::local::chars::DirichletChar;
use eisencong_core::presets::PresetData;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub settings: Settings,
    #[serde(default)]
    pub presets: BTreeMap<String, PresetEntry>,
    #[serde(default)]
    pub characters: BTreeMap<String, CharacterEntry>,
    #[serde(default)]
    pub batteries: BTreeMap<String, BatteryEntry>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Node budget for principality searches.
    pub cap: Option<usize>,
    /// Directory for JSON reports; the environment variable wins.
    pub report_dir: Option<PathBuf>,
}

/// A tower preset. With `builtin` set, the remaining keys override the
/// built-in values; otherwise every field except the optional ones is
/// required.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetEntry {
    pub builtin: Option<String>,
    pub base_label: Option<String>,
    pub base_poly: Option<Vec<i64>>,
    pub top_label: Option<String>,
    pub top_poly: Option<Vec<i64>>,
    pub p: Option<u64>,
    pub base_image: Option<Vec<i64>>,
    pub gamma_image: Option<Vec<i64>>,
    pub alpha: Option<u32>,
    pub level_f: Option<u64>,
    pub k0: Option<(i64, i64)>,
    pub frak_n: Option<u64>,
    pub frak_f: Option<(i64, i64)>,
    pub base_unit_cap: Option<i64>,
    pub top_unit_cap: Option<i64>,
    pub top_units: Option<Vec<Vec<i64>>>,
    pub xi: Option<Vec<i64>>,
    pub xi_depth: Option<u32>,
}

/// Selects a primitive Dirichlet character: the `index`-th (in the
/// canonical enumeration) among those of the given modulus and order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterEntry {
    pub modulus: u64,
    pub order: Option<u64>,
    #[serde(default)]
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryEntry {
    pub preset: String,
    #[serde(default = "default_weights")]
    pub weights: Vec<u32>,
    #[serde(default = "default_bound")]
    pub bound: u64,
    /// Indices into the generated battery; all when absent.
    pub select: Option<Vec<usize>>,
}

fn default_weights() -> Vec<u32> {
    vec![1, 2]
}

fn default_bound() -> u64 {
    30
}

impl Config {
    /// The catalogue used when no file is given: the built-in presets.
    pub fn builtin() -> Self {
        let mut c = Config::default();
        for name in PresetData::builtin_names() {
            c.presets.insert(name.into(), PresetEntry { builtin: Some(name.into()), ..Default::default() });
        }
        c
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let c: Config = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    fn validate(&self) -> Result<(), CliError> {
        for name in self.presets.keys() {
            self.preset_data(name)?;
        }
        for (name, c) in &self.characters {
            self.character(name).map_err(|e| CliError::Config(format!("character {name} (modulus {}): {e}", c.modulus)))?;
        }
        for (name, b) in &self.batteries {
            if !self.presets.contains_key(&b.preset) {
                return Err(CliError::Config(format!("battery {name}: unknown preset {}", b.preset)));
            }
            if b.weights.is_empty() || b.weights.contains(&0) {
                return Err(CliError::Config(format!("battery {name}: weights must be positive")));
            }
        }
        Ok(())
    }

    pub fn cap(&self) -> usize {
        self.settings.cap.unwrap_or(DEFAULT_CAP)
    }

    pub fn preset_data(&self, name: &str) -> Result<PresetData, CliError> {
        let e = self
            .presets
            .get(name)
            .ok_or_else(|| CliError::Config(format!("unknown preset {name}; known: {}", self.preset_names().join(", "))))?;
        e.resolve(name)
    }

    pub fn preset_names(&self) -> Vec<String> {
        self.presets.keys().cloned().collect()
    }

    pub fn character(&self, name: &str) -> Result<DirichletChar, CliError> {
        let e = self.characters.get(name).ok_or_else(|| CliError::Config(format!("unknown character {name}")))?;
        select_character(e.modulus, e.order, e.index)
    }
}

/// The `index`-th nontrivial primitive character mod `modulus`, optionally
/// of a given order.
pub fn select_character(modulus: u64, order: Option<u64>, index: usize) -> Result<DirichletChar, CliError> {
    let all = DirichletChar::all_mod(modulus).map_err(|e| CliError::Config(e.to_string()))?;
    let mut cands = all
        .into_iter()
        .filter(|c| c.is_primitive() && !c.is_trivial() && order.is_none_or(|o| c.char_order() == o));
    cands.nth(index).ok_or_else(|| {
        CliError::Config(format!(
            "no primitive character mod {modulus}{} at index {index}",
            order.map(|o| format!(" of order {o}")).unwrap_or_default()
        ))
    })
}

impl PresetEntry {
    pub fn resolve(&self, name: &str) -> Result<PresetData, CliError> {
        let base = match &self.builtin {
            Some(b) => Some(
                PresetData::builtin(b).ok_or_else(|| CliError::Config(format!("preset {name}: unknown builtin {b}")))?,
            ),
            None => None,
        };
        let missing = |field: &str| CliError::Config(format!("preset {name}: missing {field}"));
        macro_rules! pick {
            ($f:ident) => {
                match (&self.$f, &base) {
                    (Some(v), _) => v.clone(),
                    (None, Some(b)) => b.$f.clone(),
                    (None, None) => return Err(missing(stringify!($f))),
                }
            };
        }
        macro_rules! pick_opt {
            ($f:ident) => {
                match (&self.$f, &base) {
                    (Some(v), _) => Some(v.clone()),
                    (None, Some(b)) => b.$f.clone(),
                    (None, None) => None,
                }
            };
        }
        Ok(PresetData {
            name: name.into(),
            base_label: pick!(base_label),
            base_poly: pick!(base_poly),
            top_label: pick!(top_label),
            top_poly: pick!(top_poly),
            p: pick!(p),
            base_image: pick!(base_image),
            gamma_image: pick!(gamma_image),
            alpha: pick!(alpha),
            level_f: pick!(level_f),
            k0: pick!(k0),
            frak_n: pick!(frak_n),
            frak_f: pick!(frak_f),
            base_unit_cap: pick!(base_unit_cap),
            top_unit_cap: pick!(top_unit_cap),
            top_units: pick_opt!(top_units),
            xi: pick_opt!(xi),
            xi_depth: pick!(xi_depth),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_override() {
        let c = Config::parse("[presets.z]\nbuiltin = \"zeta9\"\ntop_unit_cap = 3\n").unwrap();
        let d = c.preset_data("z").unwrap();
        assert_eq!(d.top_unit_cap, 3);
        assert_eq!(d.top_poly, PresetData::zeta9().top_poly);
        assert_eq!(d.name, "z");
    }

    #[test]
    fn unknown_keys_fail() {
        assert!(Config::parse("[presets.z]\nbuiltin = \"zeta9\"\ntop_polly = [1]\n").is_err());
        assert!(Config::parse("[setting]\ncap = 3\n").is_err());
        assert!(Config::parse("[characters.c]\nmodulus = 5\nordr = 2\n").is_err());
    }

    #[test]
    fn incomplete_preset_fails() {
        let e = Config::parse("[presets.z]\np = 3\n").unwrap_err();
        assert!(e.to_string().contains("missing base_label"), "{e}");
    }

    #[test]
    fn characters_and_batteries_are_checked() {
        assert!(Config::parse("[characters.c]\nmodulus = 6\n").is_err());
        let c = Config::parse("[characters.c]\nmodulus = 5\norder = 2\n").unwrap();
        assert_eq!(c.character("c").unwrap().char_order(), 2);
        assert!(Config::parse("[batteries.b]\npreset = \"nope\"\n").is_err());
    }
}
