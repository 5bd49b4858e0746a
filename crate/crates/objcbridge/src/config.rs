//! The tool's configuration file.
//!
//! A line-oriented format: `key = value` pairs at the top level, then
//! optional `[typedefs]`, `[exports]` and `[base-chain]` sections. Blank
//! lines and lines starting with `#` are ignored.
//!
//! ```text
//! class = Heatbug
//! opaque = HeatValue Color
//! bridge = step
//!
//! [typedefs]
//! HeatValue = int
//! maxHeat = extern const HeatValue
//!
//! [exports]
//! objc_getHeat = int [HeatSpace heatobj getValueAtX: (int) px Y: (int) py]
//!
//! [base-chain]
//! Heatbug = SwarmObject
//! ```

use std::collections::BTreeMap;

use objcbridge_core::reverse::{ReverseConfig, SelectorExportSpec, TypedefSpec};
use objcbridge_core::OpaqueTypedefs;

pub const DEFAULT_CPP: &str = "/usr/local/gcc2/bin/g++";
pub const DEFAULT_LIBS: &[&str] = &[
    "-L/usr/local/lib/gcc-lib/i686-pc-linux-gnu/2.95/",
    "-L/usr/local/lib/libstdc++.so -lgcc -lobjc",
];
pub const DEFAULT_APPLICATION: &str = "main";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}: error: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

/// Free-form strings copied into emitted build text; never executed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompilerSettings {
    /// Value of `CPP` in the environment fragment.
    pub cpp: String,
    /// `LIBS` continuation lines in the forward Makefile.
    pub libs: Vec<String>,
}

impl Default for CompilerSettings {
    fn default() -> Self {
        CompilerSettings {
            cpp: DEFAULT_CPP.to_string(),
            libs: DEFAULT_LIBS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToolConfig {
    pub class_name: Option<String>,
    pub opaque_typedefs: Vec<String>,
    /// Selectors implemented in C++ (reverse direction).
    pub bridged_methods: Vec<String>,
    pub base_chain: BTreeMap<String, String>,
    pub selector_exports: Vec<SelectorExportSpec>,
    pub typedef_specs: Vec<TypedefSpec>,
    /// Targets for `#import` in the selector export file.
    pub objc_imports: Vec<String>,
    pub compiler_paths: CompilerSettings,
    /// Name of the linked program.
    pub application: String,
    /// Objective-C objects of the host application (reverse Makefile).
    pub host_objects: Vec<String>,
    /// Prerequisites of `main.o`.
    pub main_deps: Vec<String>,
}

impl Default for ToolConfig {
    fn default() -> Self {
        ToolConfig {
            class_name: None,
            opaque_typedefs: Vec::new(),
            bridged_methods: Vec::new(),
            base_chain: BTreeMap::new(),
            selector_exports: Vec::new(),
            typedef_specs: Vec::new(),
            objc_imports: Vec::new(),
            compiler_paths: CompilerSettings::default(),
            application: DEFAULT_APPLICATION.to_string(),
            host_objects: Vec::new(),
            main_deps: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Top,
    Typedefs,
    Exports,
    BaseChain,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl ToolConfig {
    pub fn parse(text: &str) -> Result<ToolConfig, ConfigError> {
        let mut cfg = ToolConfig::default();
        let mut section = Section::Top;
        let mut seen_keys = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| ConfigError { line, message };
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if let Some(name) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = match name.trim() {
                    "typedefs" => Section::Typedefs,
                    "exports" => Section::Exports,
                    "base-chain" => Section::BaseChain,
                    other => return Err(err(format!("unknown section `[{}]`", other))),
                };
                continue;
            }
            let (key, value) = trimmed
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, found `{}`", trimmed)))?;
            let key = key.trim();
            let value = value.trim();
            if !is_identifier(key) {
                return Err(err(format!("invalid key `{}`", key)));
            }
            match section {
                Section::Top => {
                    if seen_keys.contains(&key.to_string()) {
                        return Err(err(format!("duplicate key `{}`", key)));
                    }
                    seen_keys.push(key.to_string());
                    cfg.set_top(key, value).map_err(err)?;
                }
                Section::Typedefs => {
                    if value.is_empty() {
                        return Err(err(format!("typedef `{}` has no underlying type", key)));
                    }
                    if cfg.typedef_specs.iter().any(|t| t.alias == key) {
                        return Err(err(format!("duplicate typedef alias `{}`", key)));
                    }
                    cfg.typedef_specs.push(TypedefSpec {
                        alias: key.to_string(),
                        underlying_text: value.to_string(),
                    });
                }
                Section::Exports => {
                    let spec = SelectorExportSpec::parse(trimmed).map_err(err)?;
                    if cfg
                        .selector_exports
                        .iter()
                        .any(|e| e.export_function_name == spec.export_function_name)
                    {
                        return Err(err(format!(
                            "duplicate export function `{}`",
                            spec.export_function_name
                        )));
                    }
                    cfg.selector_exports.push(spec);
                }
                Section::BaseChain => {
                    if !is_identifier(value) {
                        return Err(err(format!("invalid base class `{}`", value)));
                    }
                    if cfg.base_chain.insert(key.to_string(), value.to_string()).is_some() {
                        return Err(err(format!("duplicate base-chain entry for `{}`", key)));
                    }
                }
            }
        }
        Ok(cfg)
    }

    fn set_top(&mut self, key: &str, value: &str) -> Result<(), String> {
        let words = || value.split_whitespace().map(str::to_string).collect::<Vec<_>>();
        match key {
            "class" => {
                if !is_identifier(value) {
                    return Err(format!("invalid class name `{}`", value));
                }
                self.class_name = Some(value.to_string());
            }
            "opaque" => self.opaque_typedefs = words(),
            "bridge" => self.bridged_methods = words(),
            "objc_imports" => self.objc_imports = words(),
            "host_objects" => self.host_objects = words(),
            "main_deps" => self.main_deps = words(),
            "application" => {
                if value.is_empty() || value.contains(char::is_whitespace) {
                    return Err(format!("invalid application name `{}`", value));
                }
                self.application = value.to_string();
            }
            "cpp" => self.compiler_paths.cpp = value.to_string(),
            "libs" => {
                self.compiler_paths.libs = value
                    .split('\\')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect()
            }
            other => return Err(format!("unknown key `{}`", other)),
        }
        Ok(())
    }

    /// Names treated as bridgeable scalar types: the `opaque` list plus
    /// every non-constant alias from `[typedefs]`.
    pub fn typedefs(&self) -> OpaqueTypedefs {
        let mut t: OpaqueTypedefs = self.opaque_typedefs.iter().cloned().collect();
        for spec in self.typedef_specs.iter().filter(|s| !s.is_extern()) {
            t.insert(spec.alias.clone());
        }
        t
    }

    pub fn reverse_config(&self) -> ReverseConfig {
        ReverseConfig {
            bridged_methods: self.bridged_methods.clone(),
            base_chain: self.base_chain.clone(),
            typedefs: self.typedefs(),
            typedef_specs: self.typedef_specs.clone(),
            selector_exports: self.selector_exports.clone(),
            objc_imports: self.objc_imports.clone(),
        }
    }
}
