//! Objective-C -> C++: mirror an existing Objective-C class as a C++ class
//! template so chosen methods can be implemented in C++, and export the
//! Objective-C messages that C++ code needs as plain functions.
//!
//! The C++ mirror derives from `objc_obj` (the `isa` slot) and lists every
//! instance variable in declaration order. Classes descending from
//! `SwarmObject` get an extra leading `unsigned zbits;` for the zone bits
//! the host framework stores there. Protocol qualifiers are dropped and
//! pointers to Objective-C classes become `id`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::diag::Diagnostic;
use crate::forward::{export_shim, trampoline_with, ObjCDeclaration, SelectorPiece};
use crate::header::{classify_method, MethodDescriptor, ParameterDescriptor, PassingMode};
use crate::lex::{self, Token, TokenKind};
use crate::types::{is_primitive_name, parse_type_text, OpaqueTypedefs, TypeRef, PRIMITIVE_WORDS};

/// Host root class whose descendants carry the `zbits` slot.
pub const ZONE_ROOT: &str = "SwarmObject";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReverseError {
    Parse(Diagnostic),
    UnknownBridgedMethod(String),
    DuplicateAlias(String),
    DuplicateExport(String),
    Unbridgeable { selector: String, reason: String },
}

impl fmt::Display for ReverseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReverseError::Parse(d) => write!(f, "{}", d),
            ReverseError::UnknownBridgedMethod(s) => {
                write!(f, "bridged method `{}` is not declared in the interface", s)
            }
            ReverseError::DuplicateAlias(a) => write!(f, "duplicate typedef alias `{}`", a),
            ReverseError::DuplicateExport(n) => write!(f, "duplicate export function `{}`", n),
            ReverseError::Unbridgeable { selector, reason } => {
                write!(f, "cannot bridge `{}`: {}", selector, reason)
            }
        }
    }
}

impl core::error::Error for ReverseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ivar {
    pub name: String,
    /// Base type without indirection, e.g. `double`, `HeatSpace`, `id`.
    pub type_text: String,
    pub is_pointer: bool,
    pub extents: Vec<u32>,
    /// `Grid2d` in `id <Grid2d> world`.
    pub protocol_qualifier: Option<String>,
    /// Index of the declaration this ivar came from; `int x, y;` shares one.
    pub decl_group: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjCMethodSig {
    pub is_class_method: bool,
    /// `None` when no return type is written (object return).
    pub return_type: Option<String>,
    pub pieces: Vec<SelectorPiece>,
    pub is_varargs: bool,
}

impl ObjCMethodSig {
    pub fn selector(&self) -> String {
        self.declaration().selector()
    }

    pub fn declaration(&self) -> ObjCDeclaration {
        ObjCDeclaration {
            return_type_text: self.return_type.clone().unwrap_or_default(),
            pieces: self.pieces.clone(),
            is_varargs: self.is_varargs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjCInterfaceDescription {
    pub class_name: String,
    pub base_name: String,
    pub ivars: Vec<Ivar>,
    pub methods: Vec<ObjCMethodSig>,
}

impl ObjCInterfaceDescription {
    pub fn method_selectors(&self) -> Vec<String> {
        self.methods.iter().map(ObjCMethodSig::selector).collect()
    }

    pub fn find_method(&self, selector: &str) -> Option<&ObjCMethodSig> {
        self.methods
            .iter()
            .find(|m| !m.is_class_method && m.selector() == selector)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedefSpec {
    pub alias: String,
    /// A C type, an `enum {...}` body, or `extern const T` for a constant.
    pub underlying_text: String,
}

impl TypedefSpec {
    pub fn is_extern(&self) -> bool {
        self.underlying_text.starts_with("extern")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportPiece {
    pub keyword: String,
    /// `None` for a unary selector.
    pub arg: Option<(String, String)>,
}

/// One Objective-C message exported to C++ as a plain function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectorExportSpec {
    pub export_function_name: String,
    pub receiver_class: String,
    pub receiver_param: String,
    pub selector_pieces: Vec<ExportPiece>,
    pub return_type_text: String,
}

impl SelectorExportSpec {
    pub fn selector(&self) -> String {
        let mut s = String::new();
        for p in &self.selector_pieces {
            s.push_str(&p.keyword);
            if p.arg.is_some() {
                s.push(':');
            }
        }
        s
    }

    pub fn arity(&self) -> usize {
        1 + self.selector_pieces.iter().filter(|p| p.arg.is_some()).count()
    }

    /// Parses `NAME = RET [Receiver recv kw: (T) a kw2: (T2) b]`.
    ///
    /// ```
    /// use objcbridge_core::reverse::SelectorExportSpec;
    /// let s = SelectorExportSpec::parse(
    ///     "objc_getHeat = int [HeatSpace heatobj getValueAtX: (int) px Y: (int) py]",
    /// ).unwrap();
    /// assert_eq!(s.selector(), "getValueAtX:Y:");
    /// assert_eq!(s.arity(), 3);
    /// ```
    pub fn parse(text: &str) -> Result<SelectorExportSpec, String> {
        let toks = lex::tokenize(text).map_err(|e| e.message)?;
        let ident = |k: usize, what: &str| -> Result<String, String> {
            toks.get(k)
                .and_then(Token::ident)
                .map(str::to_string)
                .ok_or_else(|| format!("expected {} in export `{}`", what, text))
        };
        let name = ident(0, "export function name")?;
        if !toks.get(1).is_some_and(|t| t.is_punct("=")) {
            return Err(format!("expected `=` after `{}`", name));
        }
        let open = toks
            .iter()
            .position(|t| t.is_punct("["))
            .ok_or_else(|| format!("export `{}` has no `[receiver selector]` message", name))?;
        if open == 2 {
            return Err(format!("export `{}` has no return type", name));
        }
        let return_type_text = lex::join_spaced(&toks[2..open]);
        if !toks.last().is_some_and(|t| t.is_punct("]")) {
            return Err(format!("export `{}` must end with `]`", name));
        }
        let receiver_class = ident(open + 1, "receiver class")?;
        let receiver_param = ident(open + 2, "receiver parameter name")?;
        let body = &toks[open + 3..toks.len() - 1];
        let mut pieces = Vec::new();
        let mut k = 0;
        while k < body.len() {
            let kw = body[k]
                .ident()
                .ok_or_else(|| format!("expected selector keyword in export `{}`", name))?
                .to_string();
            k += 1;
            if !body.get(k).is_some_and(|t| t.is_punct(":")) {
                if !pieces.is_empty() || k != body.len() {
                    return Err(format!("malformed selector in export `{}`", name));
                }
                pieces.push(ExportPiece { keyword: kw, arg: None });
                break;
            }
            k += 1;
            let (ty, next) = paren_type(body, k)
                .ok_or_else(|| format!("expected `(type)` after `{}:` in export `{}`", kw, name))?;
            let arg = body
                .get(next)
                .and_then(Token::ident)
                .ok_or_else(|| format!("expected argument name after `{}:` in export `{}`", kw, name))?
                .to_string();
            pieces.push(ExportPiece {
                keyword: kw,
                arg: Some((ty, arg)),
            });
            k = next + 1;
        }
        if pieces.is_empty() {
            return Err(format!("export `{}` has an empty selector", name));
        }
        let mut names = BTreeSet::new();
        names.insert(receiver_param.clone());
        for p in &pieces {
            if let Some((_, a)) = &p.arg {
                if !names.insert(a.clone()) {
                    return Err(format!("duplicate argument `{}` in export `{}`", a, name));
                }
            }
        }
        Ok(SelectorExportSpec {
            export_function_name: name,
            receiver_class,
            receiver_param,
            selector_pieces: pieces,
            return_type_text,
        })
    }
}

/// Reads `( type tokens )` starting at `k`; returns the type text and the
/// index after `)`.
fn paren_type(toks: &[Token], k: usize) -> Option<(String, usize)> {
    if !toks.get(k)?.is_punct("(") {
        return None;
    }
    let close = k + toks[k..].iter().position(|t| t.is_punct(")"))?;
    if close == k + 1 {
        return None;
    }
    Some((lex::join_spaced(&toks[k + 1..close]), close + 1))
}

pub fn parse_objc_interface(text: &str) -> Result<ObjCInterfaceDescription, Diagnostic> {
    let toks = lex::tokenize(text).map_err(|e| Diagnostic::error(e.line, e.message))?;
    let at = |k: usize, kw: &str| {
        toks.get(k).is_some_and(|t| t.is_punct("@")) && toks.get(k + 1).is_some_and(|t| t.is_ident(kw))
    };
    let start = (0..toks.len())
        .find(|&k| at(k, "interface"))
        .ok_or_else(|| Diagnostic::error(1, "no @interface found"))?;
    let mut p = IfaceParser { toks: &toks, pos: start + 2 };

    let class_name = p.ident("class name")?;
    if p.peek().is_some_and(|t| t.is_punct("(")) {
        return Err(Diagnostic::error(p.line(), "categories are not supported"));
    }
    if !p.eat(":") {
        return Err(Diagnostic::error(p.line(), format!("interface `{}` must name a superclass", class_name)));
    }
    let base_name = p.ident("superclass name")?;
    if p.eat("<") {
        p.skip_past(">")?;
    }

    let mut ivars = Vec::new();
    if p.eat("{") {
        let mut group = 0;
        while !p.eat("}") {
            if p.peek().is_none() {
                return Err(Diagnostic::error(p.line(), "unterminated instance variable block"));
            }
            if p.peek().is_some_and(|t| t.is_punct("@")) {
                p.pos += 2; // @public, @private, @protected, @package
                continue;
            }
            p.ivar_decl(group, &mut ivars)?;
            group += 1;
        }
    }
    for (i, v) in ivars.iter().enumerate() {
        if ivars[..i].iter().any(|w: &Ivar| w.name == v.name) {
            return Err(Diagnostic::error(p.line(), format!("duplicate instance variable `{}`", v.name)));
        }
    }

    let mut methods = Vec::new();
    loop {
        let Some(t) = p.peek() else {
            return Err(Diagnostic::error(p.line(), format!("missing @end for interface `{}`", class_name)));
        };
        if t.is_punct("@") {
            if p.toks.get(p.pos + 1).is_some_and(|t| t.is_ident("end")) {
                p.pos += 2;
                break;
            }
            return Err(Diagnostic::error(t.line, "unexpected directive inside @interface"));
        }
        if t.is_punct("-") || t.is_punct("+") {
            methods.push(p.method_decl()?);
        } else {
            return Err(Diagnostic::error(t.line, format!("unexpected `{}` in @interface", t.text())));
        }
    }
    if (p.pos..toks.len()).any(|k| at(k, "interface")) {
        return Err(Diagnostic::error(p.line(), "more than one @interface"));
    }
    Ok(ObjCInterfaceDescription {
        class_name,
        base_name,
        ivars,
        methods,
    })
}

struct IfaceParser<'a> {
    toks: &'a [Token],
    pos: usize,
}

impl<'a> IfaceParser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn line(&self) -> usize {
        self.peek().or(self.toks.last()).map_or(1, |t| t.line)
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.peek().is_some_and(|t| t.is_punct(p)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, Diagnostic> {
        match self.peek() {
            Some(t) => match t.ident() {
                Some(i) => {
                    self.pos += 1;
                    Ok(i.to_string())
                }
                None => Err(Diagnostic::error(t.line, format!("expected {}, found `{}`", what, t.text()))),
            },
            None => Err(Diagnostic::error(self.line(), format!("expected {}, found end of input", what))),
        }
    }

    fn skip_past(&mut self, p: &str) -> Result<(), Diagnostic> {
        while let Some(t) = self.peek() {
            self.pos += 1;
            if t.is_punct(p) {
                return Ok(());
            }
        }
        Err(Diagnostic::error(self.line(), format!("missing `{}`", p)))
    }

    fn ivar_decl(&mut self, group: usize, out: &mut Vec<Ivar>) -> Result<(), Diagnostic> {
        let mut words = Vec::new();
        while let Some(w) = self.peek().and_then(Token::ident) {
            if PRIMITIVE_WORDS.contains(&w) {
                words.push(w);
                self.pos += 1;
            } else {
                break;
            }
        }
        let type_text = if words.is_empty() {
            self.ident("instance variable type")?
        } else {
            words.join(" ")
        };
        let protocol_qualifier = if self.eat("<") {
            let mut protos = Vec::new();
            loop {
                protos.push(self.ident("protocol name")?);
                if self.eat(">") {
                    break;
                }
                if !self.eat(",") {
                    return Err(Diagnostic::error(self.line(), "malformed protocol qualifier"));
                }
            }
            Some(protos.join(", "))
        } else {
            None
        };
        loop {
            let is_pointer = self.eat("*");
            let name = self.ident("instance variable name")?;
            let mut extents = Vec::new();
            while self.eat("[") {
                let t = self.peek().ok_or_else(|| Diagnostic::error(self.line(), "expected array extent"))?;
                let n = match &t.kind {
                    TokenKind::Number(n) => n.parse::<u32>().ok().filter(|&n| n > 0),
                    _ => None,
                }
                .ok_or_else(|| Diagnostic::error(t.line, "array extent must be a positive integer literal"))?;
                extents.push(n);
                self.pos += 1;
                if !self.eat("]") {
                    return Err(Diagnostic::error(self.line(), "expected `]`"));
                }
            }
            out.push(Ivar {
                name,
                type_text: type_text.clone(),
                is_pointer,
                extents,
                protocol_qualifier: protocol_qualifier.clone(),
                decl_group: group,
            });
            if self.eat(",") {
                continue;
            }
            if self.eat(";") {
                return Ok(());
            }
            return Err(Diagnostic::error(self.line(), "expected `,` or `;` after instance variable"));
        }
    }

    fn method_decl(&mut self) -> Result<ObjCMethodSig, Diagnostic> {
        let is_class_method = self.peek().is_some_and(|t| t.is_punct("+"));
        self.pos += 1;
        let return_type = match paren_type(self.toks, self.pos) {
            Some((t, next)) => {
                self.pos = next;
                Some(t)
            }
            None => None,
        };
        let mut pieces = Vec::new();
        let mut is_varargs = false;
        loop {
            if self.eat(";") {
                break;
            }
            let keyword = self.ident("selector keyword")?;
            if !self.eat(":") {
                if !pieces.is_empty() {
                    return Err(Diagnostic::error(self.line(), "malformed selector"));
                }
                pieces.push(SelectorPiece {
                    keyword,
                    param_type: String::new(),
                    param_name: String::new(),
                });
                if !self.eat(";") {
                    return Err(Diagnostic::error(self.line(), "expected `;` after unary selector"));
                }
                break;
            }
            let (param_type, next) = match paren_type(self.toks, self.pos) {
                Some(x) => x,
                None => ("id".to_string(), self.pos),
            };
            self.pos = next;
            let param_name = self.ident("parameter name")?;
            pieces.push(SelectorPiece {
                keyword,
                param_type,
                param_name,
            });
            if self.eat(",") {
                if !self.eat("...") {
                    return Err(Diagnostic::error(self.line(), "expected `...`"));
                }
                is_varargs = true;
            }
        }
        if pieces.is_empty() {
            return Err(Diagnostic::error(self.line(), "empty method declaration"));
        }
        Ok(ObjCMethodSig {
            is_class_method,
            return_type,
            pieces,
            is_varargs,
        })
    }
}

/// Settings for the reverse direction.
#[derive(Debug, Clone, Default)]
pub struct ReverseConfig {
    /// Selectors whose implementation moves to C++, e.g. `step`.
    pub bridged_methods: Vec<String>,
    /// Class -> superclass links beyond what the interface states.
    pub base_chain: BTreeMap<String, String>,
    /// Scalar typedefs that keep their name when pointed to.
    pub typedefs: OpaqueTypedefs,
    pub typedef_specs: Vec<TypedefSpec>,
    pub selector_exports: Vec<SelectorExportSpec>,
    /// Import lines for the export file, e.g. `"HeatSpace.h"` or `<space.h>`.
    pub objc_imports: Vec<String>,
}

/// Whether `base` is, or descends from, the zone root.
pub fn reaches_zone_root(base: &str, chain: &BTreeMap<String, String>) -> bool {
    let mut cur = base;
    for _ in 0..=chain.len() {
        if cur == ZONE_ROOT {
            return true;
        }
        match chain.get(cur) {
            Some(next) => cur = next,
            None => return false,
        }
    }
    false
}

/// Type text as seen from C++: pointers to anything other than primitives
/// and known typedefs become `id`.
fn cpp_side_type(base: &str, is_pointer: bool, typedefs: &OpaqueTypedefs) -> (String, bool) {
    if is_pointer && !is_primitive_name(base) && !typedefs.contains(base) && base != "id" {
        ("id".to_string(), false)
    } else {
        (base.to_string(), is_pointer)
    }
}

fn cpp_type_of(text: &str, typedefs: &OpaqueTypedefs) -> Result<TypeRef, String> {
    let toks = lex::tokenize(text).map_err(|e| e.message)?;
    // drop protocol qualifiers: id <P> -> id
    let mut cleaned: Vec<Token> = Vec::new();
    let mut depth = 0;
    for t in toks {
        if t.is_punct("<") {
            depth += 1;
        } else if t.is_punct(">") {
            depth -= 1;
        } else if depth == 0 {
            cleaned.push(t);
        }
    }
    let is_pointer = cleaned.last().is_some_and(|t| t.is_punct("*"));
    let base_toks = if is_pointer { &cleaned[..cleaned.len() - 1] } else { &cleaned[..] };
    let base = lex::join_spaced(base_toks);
    let (base, is_pointer) = cpp_side_type(&base, is_pointer, typedefs);
    let mut t = parse_type_text(&base, typedefs)?;
    t.is_pointer = is_pointer;
    Ok(t)
}

/// The C++ member function standing in for an Objective-C method.
pub fn bridged_method_descriptor(
    sig: &ObjCMethodSig,
    typedefs: &OpaqueTypedefs,
) -> Result<MethodDescriptor, ReverseError> {
    let selector = sig.selector();
    let fail = |reason: String| ReverseError::Unbridgeable {
        selector: selector.clone(),
        reason,
    };
    if sig.is_varargs {
        return Err(fail("variadic selectors are not supported".to_string()));
    }
    if sig.is_class_method {
        return Err(fail("class methods cannot be bridged".to_string()));
    }
    let return_type = match sig.return_type.as_deref() {
        None | Some("void") => TypeRef::void(),
        Some(t) => cpp_type_of(t, typedefs).map_err(fail)?,
    };
    let mut params = Vec::new();
    for p in sig.pieces.iter().filter(|p| !p.param_name.is_empty()) {
        let ty = cpp_type_of(&p.param_type, typedefs).map_err(fail)?;
        params.push(ParameterDescriptor {
            name: p.param_name.clone(),
            ty,
            position: params.len(),
        });
    }
    let types: Vec<TypeRef> = params.iter().map(|p| p.ty.clone()).collect();
    let name = sig.pieces[0].keyword.clone();
    let passing_mode = classify_method(&name, &return_type, &types);
    if passing_mode != PassingMode::Standard {
        return Err(fail("the C++ member would not be a plain bridged method".to_string()));
    }
    let arg_text = params
        .iter()
        .map(|p| p.ty.declare(&p.name))
        .collect::<Vec<_>>()
        .join(", ");
    let m = MethodDescriptor {
        name,
        return_type,
        params,
        passing_mode,
        arg_text,
    };
    crate::header::check_translated_method(&m).map_err(fail)?;
    Ok(m)
}

fn resolve_bridged<'a>(
    iface: &'a ObjCInterfaceDescription,
    bridged: &[String],
    typedefs: &OpaqueTypedefs,
) -> Result<Vec<(&'a ObjCMethodSig, MethodDescriptor)>, ReverseError> {
    let mut out: Vec<(&ObjCMethodSig, MethodDescriptor)> = Vec::new();
    for sel in bridged {
        let sig = iface
            .find_method(sel)
            .ok_or_else(|| ReverseError::UnknownBridgedMethod(sel.clone()))?;
        let m = bridged_method_descriptor(sig, typedefs)?;
        if out.iter().any(|(_, other)| other.name == m.name) {
            return Err(ReverseError::Unbridgeable {
                selector: sel.clone(),
                reason: format!("another bridged selector already maps to C++ member `{}`", m.name),
            });
        }
        out.push((sig, m));
    }
    Ok(out)
}

pub fn emit_cpp_class_template(
    iface: &ObjCInterfaceDescription,
    bridged: &[String],
    config: &ReverseConfig,
    types_header: Option<&str>,
) -> Result<String, ReverseError> {
    let methods = resolve_bridged(iface, bridged, &config.typedefs)?;
    let mut out = String::from("#include \"ObjCsupport.h\"\n");
    if let Some(h) = types_header {
        out.push_str(&format!("#include \"{}\"\n", h));
    }
    out.push_str(&format!("\nclass {} : public objc_obj {{\npublic:\n", iface.class_name));
    if reaches_zone_root(&iface.base_name, &config.base_chain) {
        out.push_str("    unsigned zbits; // SwarmObject zone bits\n");
    }

    // re-group declarators that came from one declaration and still agree
    let mut k = 0;
    while k < iface.ivars.len() {
        let v = &iface.ivars[k];
        let (base, _) = cpp_side_type(&v.type_text, v.is_pointer, &config.typedefs);
        let mut decls = Vec::new();
        let mut j = k;
        while j < iface.ivars.len() {
            let w = &iface.ivars[j];
            let (wbase, wptr) = cpp_side_type(&w.type_text, w.is_pointer, &config.typedefs);
            if w.decl_group != v.decl_group || wbase != base {
                break;
            }
            let mut d = String::new();
            if wptr {
                d.push('*');
            }
            d.push_str(&w.name);
            for e in &w.extents {
                d.push_str(&format!("[{}]", e));
            }
            decls.push(d);
            j += 1;
        }
        out.push_str(&format!("    {} {};\n", base, decls.join(", ")));
        k = j;
    }
    if !methods.is_empty() {
        out.push_str("public:\n");
        for (_, m) in &methods {
            out.push_str(&format!(
                "    {} {}({});\n",
                m.return_type.render(),
                m.name,
                m.arg_text
            ));
        }
    }
    out.push_str("};\n");
    Ok(out)
}

pub fn emit_typedef_bridge(specs: &[TypedefSpec]) -> Result<String, ReverseError> {
    let mut seen = BTreeSet::new();
    let mut out = String::new();
    for s in specs {
        if !seen.insert(s.alias.as_str()) {
            return Err(ReverseError::DuplicateAlias(s.alias.clone()));
        }
        if s.is_extern() {
            out.push_str(&format!("{} {};\n", s.underlying_text, s.alias));
        } else {
            out.push_str(&format!("typedef {} {};\n", s.underlying_text, s.alias));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodBridge {
    /// Forward declaration plus replacement method body, for the class's
    /// `@implementation`.
    pub objc_text: String,
    /// The C-linkage shim calling the C++ member.
    pub cpp_shim_text: String,
}

pub fn emit_method_bridge(
    class_name: &str,
    sig: &ObjCMethodSig,
    typedefs: &OpaqueTypedefs,
) -> Result<MethodBridge, ReverseError> {
    let m = bridged_method_descriptor(sig, typedefs)?;
    let objc_text = trampoline_with(class_name, &m, &sig.declaration());
    let cpp_shim_text = export_shim(class_name, &m).unwrap_or_default();
    Ok(MethodBridge {
        objc_text,
        cpp_shim_text,
    })
}

pub fn emit_selector_exports(
    specs: &[SelectorExportSpec],
    imports: &[String],
) -> Result<String, ReverseError> {
    let mut seen = BTreeSet::new();
    for s in specs {
        if !seen.insert(s.export_function_name.as_str()) {
            return Err(ReverseError::DuplicateExport(s.export_function_name.clone()));
        }
    }
    let mut out = String::new();
    for i in imports {
        out.push_str(&format!("#import {}\n", i));
    }
    for s in specs {
        if !out.is_empty() {
            out.push('\n');
        }
        let mut params = alloc::vec![format!("void * {}", s.receiver_param)];
        let mut message = String::new();
        for p in &s.selector_pieces {
            message.push(' ');
            message.push_str(&p.keyword);
            if let Some((ty, arg)) = &p.arg {
                params.push(format!("{} {}", ty, arg));
                message.push_str(&format!(": {}", arg));
            }
        }
        let ret = if s.return_type_text == "void" { "" } else { "return " };
        out.push_str(&format!(
            "extern {} {}({})\n{{ {}[({} *) {}{}]; }}\n",
            s.return_type_text,
            s.export_function_name,
            params.join(", "),
            ret,
            s.receiver_class,
            s.receiver_param,
            message
        ));
    }
    Ok(out)
}

/// C++ prototypes for the selector exports, so C++ code can call them.
pub fn emit_selector_export_decls(specs: &[SelectorExportSpec], class_header: &str) -> String {
    let mut out = format!("#include \"{}\"\n\nextern \"C\" {{\n", class_header);
    for s in specs {
        let mut params = alloc::vec![format!("void * {}", s.receiver_param)];
        params.extend(
            s.selector_pieces
                .iter()
                .filter_map(|p| p.arg.as_ref())
                .map(|(ty, arg)| format!("{} {}", ty, arg)),
        );
        out.push_str(&format!(
            "{} {}({});\n",
            s.return_type_text,
            s.export_function_name,
            params.join(", ")
        ));
    }
    out.push_str("}\n");
    out
}

/// All reverse-direction outputs for one interface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReverseFileSet {
    pub class_name: String,
    /// `<Class>.h`
    pub class_template: String,
    /// `<Class>Types.h`, when typedefs are configured.
    pub types_header: Option<String>,
    /// `<Class>ExportCpp.cc`
    pub export_cpp: String,
    /// `<Class>ExportObjc.m`, when selector exports are configured.
    pub export_objc: Option<String>,
    /// `<Class>ExportObjc.h`: C++ prototypes for the exports.
    pub export_objc_decls: Option<String>,
    /// `<Class>Bridge.m`: method bodies to place in the `@implementation`.
    pub objc_bridge: String,
}

impl ReverseFileSet {
    pub fn files(&self) -> Vec<(String, &str)> {
        let c = &self.class_name;
        let mut v = alloc::vec![(format!("{}.h", c), self.class_template.as_str())];
        if let Some(t) = &self.types_header {
            v.push((format!("{}Types.h", c), t.as_str()));
        }
        v.push((format!("{}ExportCpp.cc", c), self.export_cpp.as_str()));
        if let Some(e) = &self.export_objc {
            v.push((format!("{}ExportObjc.m", c), e.as_str()));
        }
        if let Some(d) = &self.export_objc_decls {
            v.push((format!("{}ExportObjc.h", c), d.as_str()));
        }
        v.push((format!("{}Bridge.m", c), self.objc_bridge.as_str()));
        v
    }
}

pub fn generate_reverse(
    iface: &ObjCInterfaceDescription,
    config: &ReverseConfig,
) -> Result<ReverseFileSet, ReverseError> {
    let c = &iface.class_name;
    let types_header = if config.typedef_specs.is_empty() {
        None
    } else {
        Some(emit_typedef_bridge(&config.typedef_specs)?)
    };
    let types_name = format!("{}Types.h", c);
    let class_template = emit_cpp_class_template(
        iface,
        &config.bridged_methods,
        config,
        types_header.as_ref().map(|_| types_name.as_str()),
    )?;
    let mut export_cpp = format!("#include \"{}.h\"\n", c);
    let mut objc_bridge = format!("// method bodies for @implementation {}\n#include <stdarg.h>\n", c);
    for (sig, _) in resolve_bridged(iface, &config.bridged_methods, &config.typedefs)? {
        let b = emit_method_bridge(c, sig, &config.typedefs)?;
        export_cpp.push('\n');
        export_cpp.push_str(&b.cpp_shim_text);
        objc_bridge.push('\n');
        objc_bridge.push_str(&b.objc_text);
    }
    let export_objc = if config.selector_exports.is_empty() {
        None
    } else {
        Some(emit_selector_exports(&config.selector_exports, &config.objc_imports)?)
    };
    let export_objc_decls = export_objc
        .as_ref()
        .map(|_| emit_selector_export_decls(&config.selector_exports, &format!("{}.h", c)));
    Ok(ReverseFileSet {
        class_name: c.clone(),
        class_template,
        types_header,
        export_cpp,
        export_objc,
        export_objc_decls,
        objc_bridge,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lex::normalized_tokens;

    const HEATBUG: &str = r#"
#import <objectbase/SwarmObject.h>
#import <space.h>
#import "HeatSpace.h"

@interface Heatbug: SwarmObject
{
@public
  double unhappiness;
  int x, y;
  HeatValue idealTemperature;
  HeatValue outputHeat;
  float randomMoveProbability;
  id <Grid2d> world;
  int worldXSize, worldYSize;
  HeatSpace *heat;
  Color bugColor;
}
- setWorld: (id <Grid2d>) w Heat: (HeatSpace *) h;
- (int) getX;
- step;
+ createBegin: aZone;
@end
"#;

    fn td() -> OpaqueTypedefs {
        ["HeatValue", "Color"].into_iter().collect()
    }

    fn tok_eq(a: &str, b: &str) {
        assert_eq!(normalized_tokens(a), normalized_tokens(b), "\n{}\n---\n{}", a, b);
    }

    #[test]
    fn parses_heatbug_interface() {
        let i = parse_objc_interface(HEATBUG).unwrap();
        assert_eq!(i.class_name, "Heatbug");
        assert_eq!(i.base_name, "SwarmObject");
        assert_eq!(i.ivars.len(), 11);
        let world = i.ivars.iter().find(|v| v.name == "world").unwrap();
        assert_eq!(world.protocol_qualifier.as_deref(), Some("Grid2d"));
        assert_eq!(i.ivars[1].decl_group, i.ivars[2].decl_group);
        assert_eq!(
            i.method_selectors(),
            ["setWorld:Heat:", "getX", "step", "createBegin:"]
        );
        assert!(i.find_method("step").is_some());
        assert!(i.find_method("createBegin:").is_none());
    }

    #[test]
    fn minimal_and_broken_interfaces() {
        let i = parse_objc_interface("@interface X : Object { } @end").unwrap();
        assert!(i.ivars.is_empty() && i.methods.is_empty());
        let i = parse_objc_interface("@interface X : Object @end").unwrap();
        assert!(i.ivars.is_empty());
        let e = parse_objc_interface("@interface X : Object { int a; }\n- step;\n").unwrap_err();
        assert!(e.message.contains("@end"));
        assert!(parse_objc_interface("@interface X { } @end").is_err());
        assert!(parse_objc_interface("int x;").is_err());
        assert!(parse_objc_interface("@interface X : Object { int a; int a; } @end").is_err());
    }

    #[test]
    fn class_template() {
        let i = parse_objc_interface(HEATBUG).unwrap();
        let cfg = ReverseConfig {
            typedefs: td(),
            ..Default::default()
        };
        let h = emit_cpp_class_template(&i, &["step".to_string()], &cfg, None).unwrap();
        tok_eq(
            &h,
            "#include \"ObjCsupport.h\"
             class Heatbug : public objc_obj {
             public:
               unsigned zbits;
               double unhappiness;
               int x, y;
               HeatValue idealTemperature;
               HeatValue outputHeat;
               float randomMoveProbability;
               id world;
               int worldXSize, worldYSize;
               id heat;
               Color bugColor;
             public:
               void step();
             };",
        );
        let e = emit_cpp_class_template(&i, &["jump".to_string()], &cfg, None).unwrap_err();
        assert_eq!(e, ReverseError::UnknownBridgedMethod("jump".to_string()));
    }

    #[test]
    fn zbits_only_under_swarm_object() {
        let i = parse_objc_interface("@interface P : Object { int a; Foo *bar; } @end").unwrap();
        let cfg = ReverseConfig::default();
        let h = emit_cpp_class_template(&i, &[], &cfg, None).unwrap();
        assert!(!h.contains("zbits"));
        assert!(h.contains("    id bar;\n"));
        assert_eq!(h.matches("public:").count(), 1);

        let i = parse_objc_interface("@interface Q : Agent { int a; } @end").unwrap();
        let mut cfg = ReverseConfig::default();
        assert!(!emit_cpp_class_template(&i, &[], &cfg, None).unwrap().contains("zbits"));
        cfg.base_chain.insert("Agent".into(), "SwarmObject".into());
        assert!(emit_cpp_class_template(&i, &[], &cfg, None).unwrap().contains("zbits"));
        // cycles terminate
        cfg.base_chain.insert("Agent".into(), "Loop".into());
        cfg.base_chain.insert("Loop".into(), "Agent".into());
        assert!(!reaches_zone_root("Agent", &cfg.base_chain));
    }

    #[test]
    fn argumented_bridge_keeps_selector() {
        let i = parse_objc_interface(HEATBUG).unwrap();
        let sig = i.find_method("setWorld:Heat:").unwrap();
        let b = emit_method_bridge("Heatbug", sig, &td()).unwrap();
        tok_eq(
            &b.objc_text,
            "void cpp_Heatbug_setWorld(Heatbug * obj, id w, id h);
             - setWorld: (id <Grid2d>) w Heat: (HeatSpace *) h
             { cpp_Heatbug_setWorld(self, w, h); return self; }",
        );
        let sig = i.find_method("getX").unwrap();
        let b = emit_method_bridge("Heatbug", sig, &td()).unwrap();
        tok_eq(
            &b.cpp_shim_text,
            "extern \"C\" int cpp_Heatbug_getX(Heatbug * obj) { return obj->getX(); }",
        );
    }

    #[test]
    fn void_declared_method_does_not_return_self() {
        let i = parse_objc_interface("@interface T : Object { } - (void) tick; @end").unwrap();
        let b = emit_method_bridge("T", &i.methods[0], &OpaqueTypedefs::new()).unwrap();
        assert!(!b.objc_text.contains("return"));
    }

    #[test]
    fn step_bridge_pair() {
        let i = parse_objc_interface("@interface X : Object { } - tick; @end").unwrap();
        let b = emit_method_bridge("X", &i.methods[0], &OpaqueTypedefs::new()).unwrap();
        tok_eq(&b.objc_text, "void cpp_X_tick(X * obj); - tick { cpp_X_tick(self); return self; }");
        tok_eq(&b.cpp_shim_text, "extern \"C\" void cpp_X_tick(X * obj) { obj->tick(); }");
    }

    #[test]
    fn typedefs() {
        let specs = [
            TypedefSpec { alias: "HeatValue".into(), underlying_text: "int".into() },
            TypedefSpec { alias: "Color".into(), underlying_text: "unsigned char".into() },
            TypedefSpec { alias: "HeatExtremeType".into(), underlying_text: "enum {cold,hot}".into() },
            TypedefSpec { alias: "maxHeat".into(), underlying_text: "extern const HeatValue".into() },
        ];
        tok_eq(
            &emit_typedef_bridge(&specs).unwrap(),
            "typedef int HeatValue; typedef unsigned char Color;
             typedef enum {cold,hot} HeatExtremeType; extern const HeatValue maxHeat;",
        );
        assert_eq!(emit_typedef_bridge(&[]).unwrap(), "");
        let dup = [specs[0].clone(), specs[0].clone()];
        assert_eq!(
            emit_typedef_bridge(&dup).unwrap_err(),
            ReverseError::DuplicateAlias("HeatValue".into())
        );
    }

    #[test]
    fn selector_exports() {
        let get = SelectorExportSpec::parse(
            "objc_getHeat = int [HeatSpace heatobj getValueAtX: (int) px Y: (int) py]",
        )
        .unwrap();
        tok_eq(
            &emit_selector_exports(&[get.clone()], &[]).unwrap(),
            "extern int objc_getHeat(void * heatobj, int px, int py)
             { return [(HeatSpace *) heatobj getValueAtX: px Y: py]; }",
        );
        let add = SelectorExportSpec::parse(
            "objc_addHeat = void [HeatSpace heatobj addHeat: (HeatValue) h X: (int) px Y: (int) py]",
        )
        .unwrap();
        let text = emit_selector_exports(&[add], &[]).unwrap();
        assert!(!text.contains("return"));
        let unary = SelectorExportSpec::parse("objc_next = double [Dist d getDouble]").unwrap();
        assert_eq!(unary.arity(), 1);
        assert_eq!(unary.selector(), "getDouble");
        assert_eq!(
            emit_selector_exports(&[get.clone(), get], &[]).unwrap_err(),
            ReverseError::DuplicateExport("objc_getHeat".into())
        );
    }

    #[test]
    fn export_spec_errors() {
        for bad in [
            "objc_f int [A a f: (int) x]",
            "objc_f = [A a f: (int) x]",
            "objc_f = int A a f: (int) x",
            "objc_f = int [A a f: x]",
            "objc_f = int [A a f: (int)]",
            "objc_f = int [A a f: (int) x g]",
            "objc_f = int [A a]",
            "objc_f = int [A a f: (int) a]",
        ] {
            assert!(SelectorExportSpec::parse(bad).is_err(), "{}", bad);
        }
    }
}
