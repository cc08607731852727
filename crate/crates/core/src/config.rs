//! JSON run configuration: a strict typed schema (unknown keys are errors),
//! dotted-path overrides for command-line `--set`, and constructors that turn
//! the validated document into core objects with error messages naming the
//! offending key.

use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use crate::bernstein::{ExponentKind, ExponentSpec};
use crate::error::{Error, Result};
use crate::kernels::QuadratureConfig;
use crate::special::log_grid;
use crate::thinness::{AxisBox, ProfileSpec, SetKind, SetSpec};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub dimension: usize,
    pub process: ProcessSection,
    #[serde(default)]
    pub set: Option<SetSection>,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub quad: QuadSection,
    #[serde(default)]
    pub kernels: KernelsSection,
    #[serde(default)]
    pub thinness: ThinnessSection,
    #[serde(default)]
    pub mc: Option<McSection>,
    #[serde(default)]
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessSection {
    pub kind: String,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub m: Option<f64>,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub b: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSection {
    pub kind: String,
    #[serde(default)]
    pub profile: Option<ProfileSection>,
    #[serde(default)]
    pub lipschitz_a: Option<f64>,
    #[serde(default)]
    pub boxes: Option<Vec<BoxSection>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    pub kind: String,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub grid: Option<Vec<f64>>,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub lipschitz: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSection {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub r_lo: f64,
    pub r_hi: f64,
    pub per_decade: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { r_lo: 1e-3, r_hi: 1.0, per_decade: 8 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadSection {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_refinements: u32,
    pub tail_cutoff_multiplier: f64,
}

impl Default for QuadSection {
    fn default() -> Self {
        let q = QuadratureConfig::default();
        QuadSection {
            abs_tol: q.abs_tol,
            rel_tol: q.rel_tol,
            max_refinements: q.max_refinements,
            tail_cutoff_multiplier: q.tail_cutoff_multiplier,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelsSection {
    pub spread_bound: f64,
}

impl Default for KernelsSection {
    fn default() -> Self {
        KernelsSection { spread_bound: 20.0 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThinnessSection {
    pub max_shells: u32,
}

impl Default for ThinnessSection {
    fn default() -> Self {
        ThinnessSection { max_shells: 60 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub seed: u64,
    pub n_paths: u64,
    pub dt: f64,
    #[serde(default = "default_max_time")]
    pub max_time: f64,
    pub heights: Vec<f64>,
    #[serde(default = "default_refine")]
    pub refine_near_boundary: bool,
}

fn default_max_time() -> f64 {
    crate::montecarlo::DEFAULT_MAX_TIME
}

fn default_refine() -> bool {
    true
}

/// Splits one `--set key=value` argument. The value is parsed as JSON when
/// possible (numbers, booleans, arrays) and kept as a string otherwise.
pub fn parse_override(arg: &str) -> Result<(Vec<String>, Value)> {
    let (key, raw) = arg
        .split_once('=')
        .ok_or_else(|| Error::config(format!("override '{arg}' must have the form key=value")))?;
    if key.is_empty() || key.split('.').any(|part| part.is_empty()) {
        return Err(Error::config(format!("override '{arg}' has an empty key segment")));
    }
    let value = serde_json::from_str(raw).unwrap_or(Value::String(raw.to_string()));
    Ok((key.split('.').map(str::to_string).collect(), value))
}

/// Sets `path` inside a JSON object tree, creating intermediate objects.
pub fn apply_override(root: &mut Value, path: &[String], value: Value) -> Result<()> {
    let mut node = root;
    for (i, part) in path.iter().enumerate() {
        let obj = node.as_object_mut().ok_or_else(|| {
            Error::config(format!(
                "override path '{}' descends into a non-object at '{}'",
                path.join("."),
                path[..i].join(".")
            ))
        })?;
        if i + 1 == path.len() {
            obj.insert(part.clone(), value);
            return Ok(());
        }
        node = obj.entry(part.clone()).or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("override paths are non-empty");
}

/// Parses a config document, applies dotted overrides, and deserializes the
/// strict schema. Error messages name the offending key.
pub fn load_config_str(text: &str, overrides: &[String]) -> Result<Config> {
    let mut value: Value = serde_json::from_str(text)
        .map_err(|e| Error::config(format!("config is not valid JSON: {e}")))?;
    if !value.is_object() {
        return Err(Error::config("config must be a JSON object"));
    }
    for arg in overrides {
        let (path, v) = parse_override(arg)?;
        apply_override(&mut value, &path, v)?;
    }
    serde_json::from_value(value).map_err(|e| Error::config(format!("config: {e}")))
}

pub fn load_config(path: &Path, overrides: &[String]) -> Result<Config> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
    load_config_str(&text, overrides)
}

fn require(value: Option<f64>, key: &str, kind: &str) -> Result<f64> {
    value.ok_or_else(|| Error::config(format!("{key} is required for kind \"{kind}\"")))
}

fn forbid(value: Option<f64>, key: &str, kind: &str) -> Result<()> {
    if value.is_some() {
        return Err(Error::config(format!("{key} is not used by kind \"{kind}\"")));
    }
    Ok(())
}

fn check_alpha_range(alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && 0.0 < alpha && alpha < 2.0) {
        return Err(Error::config("process.alpha out of range (0,2)"));
    }
    Ok(alpha)
}

impl Config {
    /// Builds the process specification, prefixing validation failures with
    /// the config key they came from.
    pub fn process_spec(&self) -> Result<ExponentSpec> {
        let p = &self.process;
        let kind = match p.kind.as_str() {
            "stable" => {
                forbid(p.beta, "process.beta", "stable")?;
                forbid(p.m, "process.m", "stable")?;
                forbid(p.a, "process.a", "stable")?;
                forbid(p.b, "process.b", "stable")?;
                let alpha = check_alpha_range(require(p.alpha, "process.alpha", "stable")?)?;
                ExponentKind::Stable { alpha }
            }
            "relativistic_stable" => {
                forbid(p.beta, "process.beta", "relativistic_stable")?;
                forbid(p.a, "process.a", "relativistic_stable")?;
                forbid(p.b, "process.b", "relativistic_stable")?;
                let alpha =
                    check_alpha_range(require(p.alpha, "process.alpha", "relativistic_stable")?)?;
                let m = require(p.m, "process.m", "relativistic_stable")?;
                if !(m.is_finite() && m > 0.0) {
                    return Err(Error::config("process.m must be positive"));
                }
                ExponentKind::RelativisticStable { alpha, m }
            }
            "stable_mix" => {
                forbid(p.m, "process.m", "stable_mix")?;
                forbid(p.a, "process.a", "stable_mix")?;
                forbid(p.b, "process.b", "stable_mix")?;
                let alpha = check_alpha_range(require(p.alpha, "process.alpha", "stable_mix")?)?;
                let beta = require(p.beta, "process.beta", "stable_mix")?;
                if !(beta.is_finite() && 0.0 < beta && beta < alpha) {
                    return Err(Error::config("process.beta out of range (0, alpha)"));
                }
                ExponentKind::StableMix { alpha, beta }
            }
            "brownian_plus_stable" => {
                forbid(p.alpha, "process.alpha", "brownian_plus_stable")?;
                forbid(p.m, "process.m", "brownian_plus_stable")?;
                let a = require(p.a, "process.a", "brownian_plus_stable")?;
                if !(a.is_finite() && a > 0.0) {
                    return Err(Error::config("process.a must be positive"));
                }
                let b = require(p.b, "process.b", "brownian_plus_stable")?;
                if !(b.is_finite() && b > 0.0) {
                    return Err(Error::config("process.b must be positive"));
                }
                let beta = require(p.beta, "process.beta", "brownian_plus_stable")?;
                if !(beta.is_finite() && 0.0 < beta && beta < 2.0) {
                    return Err(Error::config("process.beta out of range (0,2)"));
                }
                ExponentKind::BrownianPlusStable { a, b, beta }
            }
            other => {
                return Err(Error::config(format!(
                    "process.kind \"{other}\" is not one of stable, relativistic_stable, stable_mix, brownian_plus_stable"
                )));
            }
        };
        ExponentSpec::new(kind, self.dimension).map_err(|e| Error::config(format!("process: {e}")))
    }

    /// Builds the target set. Requires the `set` section.
    pub fn set_spec(&self) -> Result<SetSpec> {
        let s = self
            .set
            .as_ref()
            .ok_or_else(|| Error::config("set section is required for this command"))?;
        let kind = match s.kind.as_str() {
            "lipschitz_graph" => {
                if s.boxes.is_some() {
                    return Err(Error::config("set.boxes is not used by kind \"lipschitz_graph\""));
                }
                let profile = build_profile(s.profile.as_ref(), "lipschitz_graph")?;
                let lipschitz_a = s.lipschitz_a.ok_or_else(|| {
                    Error::config("set.lipschitz_a is required for kind \"lipschitz_graph\"")
                })?;
                SetKind::LipschitzGraph { profile, lipschitz_a }
            }
            "thorn" => {
                if s.boxes.is_some() {
                    return Err(Error::config("set.boxes is not used by kind \"thorn\""));
                }
                if s.lipschitz_a.is_some() {
                    return Err(Error::config("set.lipschitz_a is not used by kind \"thorn\""));
                }
                SetKind::Thorn { profile: build_profile(s.profile.as_ref(), "thorn")? }
            }
            "box_union" => {
                if s.profile.is_some() {
                    return Err(Error::config("set.profile is not used by kind \"box_union\""));
                }
                if s.lipschitz_a.is_some() {
                    return Err(Error::config("set.lipschitz_a is not used by kind \"box_union\""));
                }
                let sections = s
                    .boxes
                    .as_ref()
                    .ok_or_else(|| Error::config("set.boxes is required for kind \"box_union\""))?;
                let boxes: Result<Vec<AxisBox>> = sections
                    .iter()
                    .map(|b| {
                        AxisBox::new(b.lo.clone(), b.hi.clone())
                            .map_err(|e| Error::config(format!("set.boxes: {e}")))
                    })
                    .collect();
                SetKind::BoxUnion { boxes: boxes? }
            }
            other => {
                return Err(Error::config(format!(
                    "set.kind \"{other}\" is not one of lipschitz_graph, thorn, box_union"
                )));
            }
        };
        SetSpec::new(kind, self.dimension).map_err(|e| Error::config(format!("set: {e}")))
    }

    pub fn r_grid(&self) -> Result<Vec<f64>> {
        log_grid(self.grid.r_lo, self.grid.r_hi, self.grid.per_decade)
            .map_err(|e| Error::config(format!("grid: {e}")))
    }

    pub fn quadrature(&self) -> Result<QuadratureConfig> {
        let q = QuadratureConfig {
            abs_tol: self.quad.abs_tol,
            rel_tol: self.quad.rel_tol,
            max_refinements: self.quad.max_refinements,
            tail_cutoff_multiplier: self.quad.tail_cutoff_multiplier,
        };
        q.validate().map_err(|e| Error::config(format!("quad: {e}")))?;
        Ok(q)
    }

    pub fn spread_bound(&self) -> Result<f64> {
        let b = self.kernels.spread_bound;
        if !(b.is_finite() && b >= 1.0) {
            return Err(Error::config("kernels.spread_bound must be at least 1"));
        }
        Ok(b)
    }

    pub fn max_shells(&self) -> Result<u32> {
        if self.thinness.max_shells < 12 {
            return Err(Error::config("thinness.max_shells must be at least 12"));
        }
        Ok(self.thinness.max_shells)
    }

    /// Validated Monte Carlo section. Requires `mc`.
    pub fn mc_section(&self) -> Result<&McSection> {
        let mc = self
            .mc
            .as_ref()
            .ok_or_else(|| Error::config("mc section is required for this command"))?;
        if mc.n_paths == 0 {
            return Err(Error::config("mc.n_paths must be >= 1"));
        }
        if !(mc.dt.is_finite() && mc.dt > 0.0) {
            return Err(Error::config("mc.dt must be positive"));
        }
        if !(mc.max_time.is_finite() && mc.max_time > 0.0) {
            return Err(Error::config("mc.max_time must be positive"));
        }
        if mc.heights.is_empty() || !mc.heights.iter().all(|h| h.is_finite() && *h > 0.0) {
            return Err(Error::config("mc.heights must be non-empty and positive"));
        }
        Ok(mc)
    }
}

fn build_profile(section: Option<&ProfileSection>, set_kind: &str) -> Result<ProfileSpec> {
    let p = section.ok_or_else(|| {
        Error::config(format!("set.profile is required for kind \"{set_kind}\""))
    })?;
    let profile = match p.kind.as_str() {
        "power_law" => {
            forbid(p.p, "set.profile.p", "power_law")?;
            forbid_tab(p, "power_law")?;
            ProfileSpec::power_law(
                require(p.c, "set.profile.c", "power_law")?,
                require(p.beta, "set.profile.beta", "power_law")?,
            )
        }
        "power_log" => {
            forbid_tab(p, "power_log")?;
            ProfileSpec::power_log(
                require(p.c, "set.profile.c", "power_log")?,
                require(p.beta, "set.profile.beta", "power_log")?,
                require(p.p, "set.profile.p", "power_log")?,
            )
        }
        "tabulated" => {
            forbid(p.c, "set.profile.c", "tabulated")?;
            forbid(p.beta, "set.profile.beta", "tabulated")?;
            forbid(p.p, "set.profile.p", "tabulated")?;
            let grid = p.grid.clone().ok_or_else(|| {
                Error::config("set.profile.grid is required for kind \"tabulated\"")
            })?;
            let values = p.values.clone().ok_or_else(|| {
                Error::config("set.profile.values is required for kind \"tabulated\"")
            })?;
            let lipschitz = p.lipschitz.ok_or_else(|| {
                Error::config("set.profile.lipschitz is required for kind \"tabulated\"")
            })?;
            ProfileSpec::tabulated(grid, values, lipschitz)
        }
        other => {
            return Err(Error::config(format!(
                "set.profile.kind \"{other}\" is not one of power_law, power_log, tabulated"
            )));
        }
    };
    profile.map_err(|e| Error::config(format!("set.profile: {e}")))
}

fn forbid_tab(p: &ProfileSection, kind: &str) -> Result<()> {
    if p.grid.is_some() {
        return Err(Error::config(format!("set.profile.grid is not used by kind \"{kind}\"")));
    }
    if p.values.is_some() {
        return Err(Error::config(format!("set.profile.values is not used by kind \"{kind}\"")));
    }
    if p.lipschitz.is_some() {
        return Err(Error::config(format!(
            "set.profile.lipschitz is not used by kind \"{kind}\""
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(kind: &str) -> String {
        format!(r#"{{"dimension": 3, "process": {{"kind": "{kind}", "alpha": 1.0}}}}"#)
    }

    #[test]
    fn minimal_stable_config_parses_with_defaults() {
        let cfg = load_config_str(&minimal("stable"), &[]).unwrap();
        assert_eq!(cfg.dimension, 3);
        assert_eq!(cfg.grid.per_decade, 8);
        assert_eq!(cfg.thinness.max_shells, 60);
        assert_eq!(cfg.kernels.spread_bound, 20.0);
        assert!(cfg.threads.is_none());
        let spec = cfg.process_spec().unwrap();
        assert_eq!(spec.dimension(), 3);
        assert_eq!(cfg.r_grid().unwrap().len(), 25);
        cfg.quadrature().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let err = load_config_str(
            r#"{"dimension": 3, "process": {"kind": "stable", "alpha": 1.0}, "extra": 1}"#,
            &[],
        )
        .unwrap_err();
        assert!(err.to_string().contains("extra"), "{err}");

        let err = load_config_str(
            r#"{"dimension": 3, "process": {"kind": "stable", "alpha": 1.0, "gamma": 2}}"#,
            &[],
        )
        .unwrap_err();
        assert!(err.to_string().contains("gamma"), "{err}");
    }

    #[test]
    fn alpha_out_of_range_names_the_key() {
        let cfg = load_config_str(&minimal("stable"), &["process.alpha=3".into()]).unwrap();
        let err = cfg.process_spec().unwrap_err();
        assert_eq!(err.to_string(), "process.alpha out of range (0,2)");
    }

    #[test]
    fn overrides_parse_numbers_strings_and_nested_paths() {
        let cfg = load_config_str(
            &minimal("stable"),
            &[
                "process.alpha=1.5".into(),
                "threads=4".into(),
                "grid.per_decade=2".into(),
                "mc.seed=7".into(),
                "mc.n_paths=10".into(),
                "mc.dt=0.5".into(),
                "mc.heights=[0.4,0.2]".into(),
            ],
        )
        .unwrap();
        assert_eq!(cfg.threads, Some(4));
        assert_eq!(cfg.grid.per_decade, 2);
        let mc = cfg.mc_section().unwrap();
        assert_eq!(mc.seed, 7);
        assert_eq!(mc.heights, vec![0.4, 0.2]);
        assert_eq!(mc.max_time, crate::montecarlo::DEFAULT_MAX_TIME);
        assert!(mc.refine_near_boundary);

        let err = parse_override("no-equals").unwrap_err();
        assert!(err.to_string().contains("key=value"));
        let err = parse_override("a..b=1").unwrap_err();
        assert!(err.to_string().contains("empty key segment"));
    }

    #[test]
    fn override_into_scalar_path_is_an_error() {
        let err = load_config_str(&minimal("stable"), &["dimension.x=1".into()]).unwrap_err();
        assert!(err.to_string().contains("non-object"), "{err}");
    }

    #[test]
    fn process_kinds_build_and_reject_extraneous_fields() {
        let cfg = load_config_str(
            r#"{"dimension": 3, "process": {"kind": "relativistic_stable", "alpha": 1.0, "m": 1.0}}"#,
            &[],
        )
        .unwrap();
        cfg.process_spec().unwrap();

        let cfg = load_config_str(
            r#"{"dimension": 3, "process": {"kind": "stable_mix", "alpha": 1.5, "beta": 0.5}}"#,
            &[],
        )
        .unwrap();
        cfg.process_spec().unwrap();

        let cfg = load_config_str(
            r#"{"dimension": 3, "process": {"kind": "brownian_plus_stable", "a": 1.0, "b": 1.0, "beta": 1.0}}"#,
            &[],
        )
        .unwrap();
        cfg.process_spec().unwrap();

        let cfg = load_config_str(
            r#"{"dimension": 3, "process": {"kind": "stable", "alpha": 1.0, "m": 2.0}}"#,
            &[],
        )
        .unwrap();
        let err = cfg.process_spec().unwrap_err();
        assert!(err.to_string().contains("process.m"), "{err}");

        let cfg = load_config_str(
            r#"{"dimension": 3, "process": {"kind": "maxwell", "alpha": 1.0}}"#,
            &[],
        )
        .unwrap();
        let err = cfg.process_spec().unwrap_err();
        assert!(err.to_string().contains("process.kind"), "{err}");
    }

    #[test]
    fn set_sections_build_every_kind() {
        let graph = r#"{
            "dimension": 3,
            "process": {"kind": "stable", "alpha": 1.0},
            "set": {
                "kind": "lipschitz_graph",
                "profile": {"kind": "power_law", "c": 1.0, "beta": 1.5},
                "lipschitz_a": 2.0
            }
        }"#;
        let cfg = load_config_str(graph, &[]).unwrap();
        assert_eq!(cfg.set_spec().unwrap().dimension(), 3);

        let thorn = r#"{
            "dimension": 3,
            "process": {"kind": "stable", "alpha": 1.0},
            "set": {
                "kind": "thorn",
                "profile": {"kind": "power_log", "c": 1.0, "beta": 1.0, "p": 2.0}
            }
        }"#;
        let cfg = load_config_str(thorn, &[]).unwrap();
        cfg.set_spec().unwrap();

        let boxes = r#"{
            "dimension": 3,
            "process": {"kind": "stable", "alpha": 1.0},
            "set": {
                "kind": "box_union",
                "boxes": [{"lo": [-1.0, -1.0, 0.5], "hi": [1.0, 1.0, 2.0]}]
            }
        }"#;
        let cfg = load_config_str(boxes, &[]).unwrap();
        cfg.set_spec().unwrap();

        let tab = r#"{
            "dimension": 3,
            "process": {"kind": "stable", "alpha": 1.0},
            "set": {
                "kind": "thorn",
                "profile": {"kind": "tabulated", "grid": [0.5, 1.0], "values": [0.25, 1.0], "lipschitz": 2.0}
            }
        }"#;
        let cfg = load_config_str(tab, &[]).unwrap();
        cfg.set_spec().unwrap();
    }

    #[test]
    fn set_validation_names_offending_keys() {
        let cfg = load_config_str(&minimal("stable"), &[]).unwrap();
        let err = cfg.set_spec().unwrap_err();
        assert!(err.to_string().contains("set section"), "{err}");

        let missing_profile = r#"{
            "dimension": 3,
            "process": {"kind": "stable", "alpha": 1.0},
            "set": {"kind": "thorn"}
        }"#;
        let cfg = load_config_str(missing_profile, &[]).unwrap();
        let err = cfg.set_spec().unwrap_err();
        assert!(err.to_string().contains("set.profile"), "{err}");

        let stray_boxes = r#"{
            "dimension": 3,
            "process": {"kind": "stable", "alpha": 1.0},
            "set": {
                "kind": "thorn",
                "profile": {"kind": "power_law", "c": 1.0, "beta": 2.0},
                "boxes": []
            }
        }"#;
        let cfg = load_config_str(stray_boxes, &[]).unwrap();
        let err = cfg.set_spec().unwrap_err();
        assert!(err.to_string().contains("set.boxes"), "{err}");
    }

    #[test]
    fn mc_section_validation() {
        let base = r#"{
            "dimension": 2,
            "process": {"kind": "stable", "alpha": 1.0},
            "mc": {"seed": 42, "n_paths": 100, "dt": 0.01, "heights": [0.4, 0.2, 0.1]}
        }"#;
        let cfg = load_config_str(base, &[]).unwrap();
        let mc = cfg.mc_section().unwrap();
        assert_eq!(mc.seed, 42);

        let cfg = load_config_str(base, &["mc.n_paths=0".into()]).unwrap();
        let err = cfg.mc_section().unwrap_err();
        assert!(err.to_string().contains("mc.n_paths"), "{err}");

        let cfg = load_config_str(base, &["mc.heights=[]".into()]).unwrap();
        assert!(cfg.mc_section().is_err());
    }
}
