//! The tool's commands as functions from inputs to output files.
//!
//! Every command first computes all of its outputs in memory and only then
//! hands them to [`commit`], so an error never leaves partial output behind.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use objcbridge_core::diag::{Diagnostic, Severity};
use objcbridge_core::forward::translation_trace;
use objcbridge_core::header::parse_header_with_warnings;
use objcbridge_core::reverse::{generate_reverse, parse_objc_interface, ReverseError};
use objcbridge_core::{generate, parse_cd, ClassDescription};

use crate::build_plan::{environment_fragment, forward_plan, reverse_plan};
use crate::config::ToolConfig;
use crate::support::{SUPPORT_HEADER, SUPPORT_HEADER_NAME};

pub const MAKEFILE_NAME: &str = "Makefile";
pub const ENVIRONMENT_FILE_NAME: &str = "Makefile.environment";

#[derive(Debug, thiserror::Error)]
pub enum ToolError {
    /// Problems in the user's input files, reported per line.
    #[error("{}", format_diagnostics(file, diagnostics))]
    Input {
        file: String,
        diagnostics: Vec<Diagnostic>,
    },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
}

impl ToolError {
    /// 1 for input problems, 2 for failures of the tool itself.
    pub fn exit_code(&self) -> i32 {
        match self {
            ToolError::Input { .. } | ToolError::Usage(_) | ToolError::Read { .. } => 1,
            ToolError::Write { .. } => 2,
        }
    }

    fn input(file: &str, d: Diagnostic) -> ToolError {
        ToolError::Input {
            file: file.to_string(),
            diagnostics: vec![d],
        }
    }
}

pub fn format_diagnostic(file: &str, d: &Diagnostic) -> String {
    let sev = match d.severity {
        Severity::Error => "error",
        Severity::Warning => "warning",
    };
    if d.line == 0 {
        format!("{}: {}: {}", file, sev, d.message)
    } else {
        format!("{}:{}: {}: {}", file, d.line, sev, d.message)
    }
}

fn format_diagnostics(file: &str, ds: &[Diagnostic]) -> String {
    ds.iter()
        .map(|d| format_diagnostic(file, d))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Settings shared by all commands.
#[derive(Debug, Clone, Default)]
pub struct Invocation {
    pub config: ToolConfig,
    /// Shown in diagnostics about configuration contents.
    pub config_label: String,
    /// `--class`, overriding the configured class name.
    pub class_override: Option<String>,
}

impl Invocation {
    pub fn load(config_path: Option<&Path>, class_override: Option<String>) -> Result<Invocation, ToolError> {
        let (config, config_label) = match config_path {
            Some(p) => {
                let label = p.display().to_string();
                let text = read_input(p)?;
                let cfg = ToolConfig::parse(&text).map_err(|e| {
                    ToolError::input(&label, Diagnostic::error(e.line, e.message))
                })?;
                (cfg, label)
            }
            None => (ToolConfig::default(), "<config>".to_string()),
        };
        Ok(Invocation {
            config,
            config_label,
            class_override,
        })
    }

    pub fn class_name(&self) -> Option<&str> {
        self.class_override
            .as_deref()
            .or(self.config.class_name.as_deref())
    }

    fn require_class(&self) -> Result<&str, ToolError> {
        self.class_name()
            .ok_or_else(|| ToolError::Usage("no class name: pass --class or set `class` in the config".into()))
    }

    fn check_class(&self, file: &str, found: &str) -> Result<(), ToolError> {
        match self.class_name() {
            Some(want) if want != found => Err(ToolError::input(
                file,
                Diagnostic::error(0, format!("declares class `{}`, expected `{}`", found, want)),
            )),
            _ => Ok(()),
        }
    }
}

/// Files to write plus text for the user.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub files: Vec<(String, String)>,
    /// Progress lines for standard output.
    pub trace: Vec<String>,
    /// Formatted warnings for standard error.
    pub warnings: Vec<String>,
}

pub fn read_input(path: &Path) -> Result<String, ToolError> {
    fs::read_to_string(path).map_err(|source| ToolError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn load_header(path: &Path, inv: &Invocation) -> Result<(ClassDescription, Vec<String>), ToolError> {
    let label = path.display().to_string();
    let text = read_input(path)?;
    let (cd, warnings) = parse_header_with_warnings(&text, &inv.config.typedefs()).map_err(|ds| {
        ToolError::Input {
            file: label.clone(),
            diagnostics: ds.0,
        }
    })?;
    inv.check_class(&label, &cd.class_name)?;
    let warnings = warnings.iter().map(|d| format_diagnostic(&label, d)).collect();
    Ok((cd, warnings))
}

fn load_class(path: &Path, inv: &Invocation) -> Result<(ClassDescription, Vec<String>), ToolError> {
    if path.extension().is_some_and(|e| e == "cd") {
        let label = path.display().to_string();
        let text = read_input(path)?;
        let cd = parse_cd(&text, &inv.config.typedefs()).map_err(|d| ToolError::input(&label, d))?;
        inv.check_class(&label, &cd.class_name)?;
        Ok((cd, Vec::new()))
    } else {
        load_header(path, inv)
    }
}

/// Header -> `<Class>.cd`.
pub fn describe(header: &Path, inv: &Invocation) -> Result<Outcome, ToolError> {
    let (cd, warnings) = load_header(header, inv)?;
    let set = generate(&cd);
    let (name, text) = set.cd_file();
    Ok(Outcome {
        files: vec![(name, text.to_string())],
        trace: Vec::new(),
        warnings,
    })
}

/// Header or `.cd` file -> `.mh`, `.m` and `ExportCpp.cc`.
pub fn translate(input: &Path, inv: &Invocation) -> Result<Outcome, ToolError> {
    let (cd, warnings) = load_class(input, inv)?;
    let set = generate(&cd);
    Ok(Outcome {
        files: set
            .interface_files()
            .iter()
            .map(|(n, t)| (n.clone(), t.to_string()))
            .collect(),
        trace: translation_trace(&cd),
        warnings,
    })
}

/// Objective-C interface -> C++ class template and bridge files.
pub fn reverse(interface: &Path, inv: &Invocation) -> Result<Outcome, ToolError> {
    let label = interface.display().to_string();
    let text = read_input(interface)?;
    let iface = parse_objc_interface(&text).map_err(|d| ToolError::input(&label, d))?;
    inv.check_class(&label, &iface.class_name)?;
    let set = generate_reverse(&iface, &inv.config.reverse_config()).map_err(|e| {
        let file = match e {
            ReverseError::Parse(_) => &label,
            _ => &inv.config_label,
        };
        ToolError::input(file, Diagnostic::error(0, e.to_string()))
    })?;
    Ok(Outcome {
        files: set
            .files()
            .into_iter()
            .map(|(n, t)| (n, t.to_string()))
            .collect(),
        trace: Vec::new(),
        warnings: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Reverse,
}

/// Makefile for the configured class, or the environment fragment.
pub fn emit_build(inv: &Invocation, direction: Direction, environment: bool) -> Result<Outcome, ToolError> {
    if environment {
        return Ok(Outcome {
            files: vec![(ENVIRONMENT_FILE_NAME.to_string(), environment_fragment(&inv.config))],
            ..Outcome::default()
        });
    }
    let class = inv.require_class()?;
    let plan = match direction {
        Direction::Forward => forward_plan(class, &inv.config),
        Direction::Reverse => reverse_plan(class, &inv.config),
    };
    Ok(Outcome {
        files: vec![(MAKEFILE_NAME.to_string(), plan.render())],
        ..Outcome::default()
    })
}

pub fn emit_support() -> Outcome {
    Outcome {
        files: vec![(SUPPORT_HEADER_NAME.to_string(), SUPPORT_HEADER.to_string())],
        ..Outcome::default()
    }
}

/// Describe, translate and emit the forward Makefile in one step.
pub fn run_pipeline(header: &Path, inv: &Invocation) -> Result<Outcome, ToolError> {
    let (cd, warnings) = load_header(header, inv)?;
    let set = generate(&cd);
    let (cd_name, cd_text) = set.cd_file();
    let mut files = vec![(cd_name, cd_text.to_string())];
    files.extend(set.interface_files().iter().map(|(n, t)| (n.clone(), t.to_string())));
    files.push((
        MAKEFILE_NAME.to_string(),
        forward_plan(&cd.class_name, &inv.config).render(),
    ));
    Ok(Outcome {
        files,
        trace: translation_trace(&cd),
        warnings,
    })
}

/// Writes `files` into `out_dir`, skipping files whose contents are
/// unchanged. Everything is staged in temporary files first and renamed
/// into place only once all of them were written.
pub fn commit(out_dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>, ToolError> {
    let werr = |path: &Path| {
        let path = path.display().to_string();
        move |source| ToolError::Write { path, source }
    };
    let mut staged = Vec::new();
    for (name, text) in files {
        let dest = out_dir.join(name);
        if fs::read(&dest).is_ok_and(|old| old == text.as_bytes()) {
            continue;
        }
        if staged.is_empty() {
            fs::create_dir_all(out_dir).map_err(werr(out_dir))?;
        }
        let mut tmp = tempfile::NamedTempFile::new_in(out_dir).map_err(werr(&dest))?;
        tmp.write_all(text.as_bytes()).map_err(werr(&dest))?;
        #[cfg(unix)]
        {
            use std::os::unix::fs::PermissionsExt;
            tmp.as_file()
                .set_permissions(fs::Permissions::from_mode(0o644))
                .map_err(werr(&dest))?;
        }
        staged.push((tmp, dest));
    }
    let mut written = Vec::new();
    for (tmp, dest) in staged {
        tmp.persist(&dest).map_err(|e| ToolError::Write {
            path: dest.display().to_string(),
            source: e.error,
        })?;
        written.push(dest);
    }
    Ok(written)
}
