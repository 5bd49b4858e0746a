//! C++ -> Objective-C: the interface template (`.mh`), the trampoline
//! implementation (`.m`) and the C-linkage export shims (`ExportCpp.cc`).
//!
//! Every translated method `m` of class `C` gets one shim
//! `cpp_C_m(C * obj, ...)` defined in the export file and one trampoline
//! method in the `.m` file that forward-declares and calls it. `- init`
//! is paired with `cpp_C_construct`, which default-constructs the C++
//! members in place inside the object the Objective-C runtime allocated.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::describe::emit_cd;
use crate::header::{ClassDescription, MethodDescriptor, PassingMode};
use crate::lex;

pub fn mangle(class_name: &str, method_name: &str) -> String {
    format!("cpp_{}_{}", class_name, method_name)
}

/// Name of the shim that `- init` calls.
pub fn construct_shim(class_name: &str) -> String {
    mangle(class_name, "construct")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectorPiece {
    pub keyword: String,
    /// Empty for a unary selector.
    pub param_type: String,
    pub param_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjCDeclaration {
    /// Empty means the default object return.
    pub return_type_text: String,
    pub pieces: Vec<SelectorPiece>,
    pub is_varargs: bool,
}

impl ObjCDeclaration {
    /// The method declaration without its trailing `;`, e.g.
    /// `- (double) sum2_x1: (double) x1 x2: (double) x2`.
    pub fn render(&self) -> String {
        let mut s = String::from("-");
        if !self.return_type_text.is_empty() {
            s.push_str(" (");
            s.push_str(&self.return_type_text);
            s.push(')');
        }
        for (i, p) in self.pieces.iter().enumerate() {
            s.push(' ');
            s.push_str(&p.keyword);
            if !p.param_name.is_empty() {
                s.push_str(": (");
                s.push_str(&p.param_type);
                s.push_str(") ");
                s.push_str(&p.param_name);
            }
            if i == 0 && self.is_varargs {
                s.push_str(", ...");
            }
        }
        s
    }

    /// The selector name, e.g. `sum2_x1:x2:`.
    pub fn selector(&self) -> String {
        let mut s = String::new();
        for p in &self.pieces {
            s.push_str(&p.keyword);
            if !p.param_name.is_empty() {
                s.push(':');
            }
        }
        s
    }
}

/// Builds the Objective-C declaration for a method, or `None` for a
/// C++-only method.
pub fn translate_prototype(m: &MethodDescriptor) -> Option<ObjCDeclaration> {
    if m.passing_mode == PassingMode::CppOnly {
        return None;
    }
    let return_type_text = if m.return_type.is_void() {
        String::new()
    } else {
        m.return_type.render()
    };
    let named = match m.passing_mode {
        PassingMode::Varargs => &m.params[..1],
        _ => &m.params[..],
    };
    let pieces = if named.is_empty() {
        alloc::vec![SelectorPiece {
            keyword: m.name.clone(),
            param_type: String::new(),
            param_name: String::new(),
        }]
    } else {
        named
            .iter()
            .enumerate()
            .map(|(i, p)| SelectorPiece {
                keyword: if i == 0 { m.name.clone() } else { p.name.clone() },
                param_type: p.ty.render(),
                param_name: p.name.clone(),
            })
            .collect()
    };
    Some(ObjCDeclaration {
        return_type_text,
        pieces,
        is_varargs: m.passing_mode == PassingMode::Varargs,
    })
}

/// The shim's C signature: `RET cpp_C_m(C * obj, T1 a1, ...)`.
pub fn shim_signature(class_name: &str, m: &MethodDescriptor) -> String {
    let mut params = alloc::vec![format!("{} * obj", class_name)];
    match m.passing_mode {
        PassingMode::Varargs => {
            params.push(m.params[0].ty.declare(&m.params[0].name));
            params.push("va_list * ap".to_string());
        }
        _ => params.extend(m.params.iter().map(|p| p.ty.declare(&p.name))),
    }
    format!(
        "{} {}({})",
        m.return_type.render(),
        mangle(class_name, &m.name),
        params.join(", ")
    )
}

/// The forward declaration and method definition for one translated method.
pub fn trampoline(class_name: &str, m: &MethodDescriptor) -> Option<String> {
    let decl = translate_prototype(m)?;
    Some(trampoline_with(class_name, m, &decl))
}

/// Like [`trampoline`] but with a caller-supplied Objective-C declaration,
/// used when the selector already exists on the Objective-C side.
///
/// A void C++ method returns `self` unless the declaration itself returns
/// `void`.
pub fn trampoline_with(class_name: &str, m: &MethodDescriptor, decl: &ObjCDeclaration) -> String {
    let shim = mangle(class_name, &m.name);
    let void = m.return_type.is_void();
    let tail = if decl.return_type_text == "void" { "" } else { " return self;" };
    let body = if m.passing_mode == PassingMode::Varargs {
        let first = &m.params[0].name;
        if void {
            format!(
                "{{ va_list ap; va_start(ap, {first});\n  {shim}(self, {first}, &ap);\n  va_end(ap);\n {tail} }}"
            )
        } else {
            format!(
                "{{ {ret} rtnvalue; va_list ap; va_start(ap, {first});\n  rtnvalue = {shim}(self, {first}, &ap);\n  va_end(ap);\n  return rtnvalue; }}",
                ret = m.return_type.render()
            )
        }
    } else {
        let mut args = alloc::vec!["self".to_string()];
        args.extend(m.params.iter().map(|p| p.name.clone()));
        let call = format!("{}({})", shim, args.join(", "));
        if void {
            format!("{{ {};{} }}", call, tail)
        } else {
            format!("{{ return {}; }}", call)
        }
    };
    format!("{};\n{}\n{}\n", shim_signature(class_name, m), decl.render(), body)
}

/// The C-linkage definition forwarding to the member function.
pub fn export_shim(class_name: &str, m: &MethodDescriptor) -> Option<String> {
    if !m.is_translated() {
        return None;
    }
    let ret = if m.return_type.is_void() { "" } else { "return " };
    let body = match m.passing_mode {
        PassingMode::Varargs => format!(
            "{{ objc_t buffer; buffer.ap = ap; {}obj->{}({}, buffer); }}",
            ret, m.name, m.params[0].name
        ),
        _ => {
            let args: Vec<&str> = m.params.iter().map(|p| p.name.as_str()).collect();
            format!("{{ {}obj->{}({}); }}", ret, m.name, args.join(", "))
        }
    };
    Some(format!(
        "extern \"C\"\n{}\n{}\n",
        shim_signature(class_name, m),
        body
    ))
}

pub fn emit_interface_header(cd: &ClassDescription) -> String {
    let mut out = String::from("#import <objc/Object.h>\n\n");
    out.push_str(&format!("@interface {} : Object\n{{ @public\n", cd.class_name));
    for f in &cd.fields {
        out.push_str("    ");
        out.push_str(&f.ty.declare(&f.name));
        out.push_str(";\n");
    }
    out.push_str("}\n- init;\n");
    for m in &cd.methods {
        if let Some(decl) = translate_prototype(m) {
            out.push_str(&decl.render());
            out.push_str(";\n");
        }
    }
    out.push_str("@end\n");
    out
}

pub fn emit_trampolines(cd: &ClassDescription) -> String {
    let c = &cd.class_name;
    let mut out = format!("#import \"{}.mh\"\n#include <stdarg.h>\n\n@implementation {}\n", c, c);
    out.push_str(&format!(
        "void {shim}({c} * obj);\n- init\n{{ {shim}(self); return self; }}\n",
        shim = construct_shim(c)
    ));
    for m in &cd.methods {
        if let Some(t) = trampoline(c, m) {
            out.push('\n');
            out.push_str(&t);
        }
    }
    out.push_str("@end\n");
    out
}

pub fn emit_export_shims(cd: &ClassDescription) -> String {
    let c = &cd.class_name;
    let mut out = format!("#include <new>\n#include \"{}.h\"\n\n", c);
    out.push_str(&format!(
        "extern \"C\"\nvoid {}({c} * obj)\n{{ new (obj) {c}; }}\n",
        construct_shim(c)
    ));
    for m in &cd.methods {
        if let Some(s) = export_shim(c, m) {
            out.push('\n');
            out.push_str(&s);
        }
    }
    out
}

/// Progress lines in the order the members are visited.
pub fn translation_trace(cd: &ClassDescription) -> Vec<String> {
    let mut out = alloc::vec![
        "C++ to ObjC parsing ...".to_string(),
        "Starts parsing C++ class to ObjC ...".to_string(),
    ];
    for f in &cd.fields {
        let mut scalar = f.ty.clone();
        scalar.array_extents.clear();
        let simple = format!(
            "Translating simple data type: \"{}\" of-type \"{}\"",
            f.name,
            scalar.render()
        );
        if f.ty.is_array() {
            out.push(format!(
                "Translating array: \"{}{}\" - {}",
                f.name,
                f.ty.extents_text(),
                simple
            ));
        } else {
            out.push(simple);
        }
    }
    for m in cd.translated_methods() {
        let mut line = format!("Translating function: {} {}(", m.return_type.render(), m.name);
        // each source token followed by one space
        if let Ok(toks) = lex::tokenize(&m.arg_text) {
            for t in toks {
                line.push_str(&t.text());
                line.push(' ');
            }
        }
        line.push(')');
        out.push(line);
    }
    out.push("End translation.".to_string());
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedFileSet {
    pub class_name: String,
    pub mh_text: String,
    pub m_text: String,
    pub export_cc_text: String,
    pub cd_text: String,
}

impl GeneratedFileSet {
    /// `(file name, contents)` for the three interface files.
    pub fn interface_files(&self) -> [(String, &str); 3] {
        let c = &self.class_name;
        [
            (format!("{}.mh", c), self.mh_text.as_str()),
            (format!("{}.m", c), self.m_text.as_str()),
            (format!("{}ExportCpp.cc", c), self.export_cc_text.as_str()),
        ]
    }

    pub fn cd_file(&self) -> (String, &str) {
        (format!("{}.cd", self.class_name), self.cd_text.as_str())
    }
}

pub fn generate(cd: &ClassDescription) -> GeneratedFileSet {
    GeneratedFileSet {
        class_name: cd.class_name.clone(),
        mh_text: emit_interface_header(cd),
        m_text: emit_trampolines(cd),
        export_cc_text: emit_export_shims(cd),
        cd_text: emit_cd(cd),
    }
}
