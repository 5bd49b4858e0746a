//! Parsing of the supported C++ header subset into a [`ClassDescription`].
//!
//! Accepted input is one class deriving publicly from `objc_obj`, whose
//! public section holds scalar or array fields and plain member functions
//! with named parameters. Preprocessor lines, comments, forward class
//! declarations and other top-level statements (typedefs, `extern`
//! declarations, `using`) are skipped. Members outside a `public:` section
//! are dropped. Constructors and destructors are dropped with a warning.
//!
//! Everything else the bridge cannot represent faithfully (templates,
//! namespaces, overloads, default arguments, operators, cv-qualifiers,
//! C-style `...`) is rejected with the offending line.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::diag::{Diagnostic, Diagnostics};
use crate::lex::{self, Token};
use crate::types::{parse_type, OpaqueTypedefs, TypeKind, TypeRef, MAX_ARRAY_DIMS};

/// The base class every bridged class must derive from.
pub const BRIDGE_BASE: &str = "objc_obj";

/// Names the generated code uses for its own locals and parameters.
pub const RESERVED_PARAM_NAMES: &[&str] = &["obj", "self", "_cmd", "ap", "rtnvalue", "buffer"];

/// Method names taken by the generated initializer and its shim.
pub const RESERVED_METHOD_NAMES: &[&str] = &["init", "construct"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PassingMode {
    /// Fixed arguments, one selector keyword per parameter.
    Standard,
    /// `T f(T1 first, objc_t& rest)`: open argument list through a cursor.
    Varargs,
    /// Not bridged.
    CppOnly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDescriptor {
    pub name: String,
    pub ty: TypeRef,
    pub declaration_order: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterDescriptor {
    pub name: String,
    pub ty: TypeRef,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDescriptor {
    pub name: String,
    pub return_type: TypeRef,
    pub params: Vec<ParameterDescriptor>,
    pub passing_mode: PassingMode,
    /// The parameter list as written, whitespace runs collapsed to one space.
    pub arg_text: String,
}

impl MethodDescriptor {
    pub fn is_translated(&self) -> bool {
        self.passing_mode != PassingMode::CppOnly
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDescription {
    pub class_name: String,
    pub base_name: String,
    pub fields: Vec<FieldDescriptor>,
    pub methods: Vec<MethodDescriptor>,
}

impl ClassDescription {
    pub fn new(class_name: impl Into<String>) -> Self {
        ClassDescription {
            class_name: class_name.into(),
            base_name: BRIDGE_BASE.to_string(),
            fields: Vec::new(),
            methods: Vec::new(),
        }
    }

    pub fn translated_methods(&self) -> impl Iterator<Item = &MethodDescriptor> {
        self.methods.iter().filter(|m| m.is_translated())
    }

    /// This description with every C++-only method removed.
    pub fn without_cpp_only(&self) -> ClassDescription {
        ClassDescription {
            methods: self.translated_methods().cloned().collect(),
            ..self.clone()
        }
    }
}

/// Classifies a member function by name and signature.
///
/// A method is C++-only when its name contains `cpp_` or any of its types
/// cannot cross the bridge; otherwise it is variadic when it has exactly two
/// parameters and the second is `objc_t&`; otherwise it is standard.
pub fn classify_method(name: &str, return_type: &TypeRef, params: &[TypeRef]) -> PassingMode {
    let cpp_typed = return_type.kind == TypeKind::CppOnly
        || params.iter().any(|p| p.kind == TypeKind::CppOnly);
    if name.contains("cpp_") || cpp_typed {
        PassingMode::CppOnly
    } else if params.len() == 2 && params[1].kind == TypeKind::ObjcTRef {
        PassingMode::Varargs
    } else {
        PassingMode::Standard
    }
}

/// Parses a single prototype such as `double sumN_x1(double x1, objc_t& buf);`
/// and classifies it.
pub fn classify_prototype(text: &str, typedefs: &OpaqueTypedefs) -> Result<PassingMode, Diagnostic> {
    let tokens = lex::tokenize(text).map_err(|e| Diagnostic::error(e.line, e.message))?;
    let mut p = Parser::new(&tokens, typedefs);
    let (ret, pos) = parse_type(&tokens, 0, typedefs).map_err(|(l, m)| Diagnostic::error(l, m))?;
    p.pos = pos;
    let name = p.expect_ident("method name")?;
    let method = p.method_rest(name, ret)?;
    if p.peek().is_some_and(|t| t.is_punct(";")) {
        p.pos += 1;
    }
    if let Some(t) = p.peek() {
        return Err(Diagnostic::error(t.line, format!("unexpected `{}` after prototype", t.text())));
    }
    Ok(method.passing_mode)
}

/// Parses the parameter-list text of a method (the part between the
/// parentheses).
pub fn parse_arg_list(
    text: &str,
    typedefs: &OpaqueTypedefs,
) -> Result<Vec<ParameterDescriptor>, Diagnostic> {
    let tokens = lex::tokenize(text).map_err(|e| Diagnostic::error(e.line, e.message))?;
    let mut p = Parser::new(&tokens, typedefs);
    let params = p.params_until(None)?;
    Ok(params)
}

pub fn parse_header(src: &str, typedefs: &OpaqueTypedefs) -> Result<ClassDescription, Diagnostics> {
    parse_header_with_warnings(src, typedefs).map(|(cd, _)| cd)
}

/// Like [`parse_header`], also returning the warnings collected on success.
pub fn parse_header_with_warnings(
    src: &str,
    typedefs: &OpaqueTypedefs,
) -> Result<(ClassDescription, Vec<Diagnostic>), Diagnostics> {
    let tokens = lex::tokenize(src)
        .map_err(|e| Diagnostics::single(Diagnostic::error(e.line, e.message)))?;
    let mut p = Parser::new(&tokens, typedefs);
    match p.header() {
        Ok(cd) => Ok((cd, p.warnings)),
        Err(e) => {
            let mut all = p.warnings;
            all.push(e);
            Err(Diagnostics(all))
        }
    }
}

/// Checks the constraints a translated method must meet for the generated
/// code to be valid on both sides. Returns warnings on success.
pub fn check_translated_method(m: &MethodDescriptor) -> Result<Vec<String>, String> {
    let mut warnings = Vec::new();
    if !m.is_translated() {
        return Ok(warnings);
    }
    if RESERVED_METHOD_NAMES.contains(&m.name.as_str()) {
        return Err(format!(
            "method name `{}` is reserved for the generated initializer",
            m.name
        ));
    }
    if m.return_type.is_reference {
        return Err(format!("method `{}` returns a reference", m.name));
    }
    for p in &m.params {
        if RESERVED_PARAM_NAMES.contains(&p.name.as_str()) {
            return Err(format!(
                "parameter name `{}` in method `{}` clashes with generated code",
                p.name, m.name
            ));
        }
        let varargs_slot = m.passing_mode == PassingMode::Varargs && p.position == 1;
        if p.ty.kind == TypeKind::ObjcTRef && !varargs_slot {
            return Err(format!(
                "`objc_t&` in method `{}` must be the second of exactly two parameters",
                m.name
            ));
        }
        if p.ty.is_reference && p.ty.kind != TypeKind::ObjcTRef {
            return Err(format!(
                "reference parameter `{}` in method `{}` cannot cross the bridge; \
                 pass by value or pointer, or mark the method C++-only",
                p.name, m.name
            ));
        }
        if p.ty.is_void() {
            return Err(format!("parameter `{}` has type void", p.name));
        }
    }
    if m.passing_mode == PassingMode::Varargs && m.params[0].ty.is_promotable() {
        warnings.push(format!(
            "first parameter of variadic method `{}` has promotable type `{}`; \
             va_start on it is undefined",
            m.name,
            m.params[0].ty.render()
        ));
    }
    Ok(warnings)
}

pub fn check_field(f: &FieldDescriptor) -> Result<(), String> {
    if f.ty.kind == TypeKind::CppOnly {
        return Err(format!(
            "field `{}` has C++-only type `{}` and cannot be mirrored in the Objective-C layout",
            f.name, f.ty.base_name
        ));
    }
    if f.ty.base_name == "objc_t" {
        return Err(format!("field `{}` cannot have type objc_t", f.name));
    }
    if f.ty.is_reference {
        return Err(format!("reference field `{}` is not supported", f.name));
    }
    if f.ty.is_void() {
        return Err(format!("field `{}` has type void", f.name));
    }
    if f.ty.array_extents.len() > MAX_ARRAY_DIMS {
        return Err(format!(
            "field `{}` has {} array dimensions; at most {} are supported",
            f.name,
            f.ty.array_extents.len(),
            MAX_ARRAY_DIMS
        ));
    }
    if f.ty.array_extents.contains(&0) {
        return Err(format!("field `{}` has a zero array extent", f.name));
    }
    if f.ty.is_array() && f.ty.is_pointer {
        return Err(format!("array of pointers `{}` is not supported", f.name));
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Access {
    Public,
    Hidden,
}

const UNSUPPORTED_MEMBER_KEYWORDS: &[&str] = &[
    "virtual", "static", "friend", "typedef", "enum", "class", "struct", "union", "using",
    "template", "explicit", "mutable", "const", "volatile", "operator",
];

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    typedefs: &'a OpaqueTypedefs,
    warnings: Vec<Diagnostic>,
}

type PResult<T> = Result<T, Diagnostic>;

impl<'a> Parser<'a> {
    fn new(toks: &'a [Token], typedefs: &'a OpaqueTypedefs) -> Self {
        Parser {
            toks,
            pos: 0,
            typedefs,
            warnings: Vec::new(),
        }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, k: usize) -> Option<&'a Token> {
        self.toks.get(self.pos + k)
    }

    fn line(&self) -> usize {
        self.peek().or(self.toks.last()).map_or(0, |t| t.line)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.peek().is_some_and(|t| t.is_punct(p)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{}`", p)))
        }
    }

    fn expect_ident(&mut self, what: &str) -> PResult<String> {
        match self.peek().and_then(Token::ident) {
            Some(i) => {
                self.pos += 1;
                Ok(i.to_string())
            }
            None => Err(self.unexpected(what)),
        }
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        match self.peek() {
            Some(t) => Diagnostic::error(t.line, format!("expected {}, found `{}`", expected, t.text())),
            None => Diagnostic::error(self.line(), format!("expected {}, found end of input", expected)),
        }
    }

    fn ty(&mut self) -> PResult<TypeRef> {
        let (t, pos) =
            parse_type(self.toks, self.pos, self.typedefs).map_err(|(l, m)| Diagnostic::error(l, m))?;
        self.pos = pos;
        if t.base_name == "objc_t" && !t.is_reference {
            return Err(Diagnostic::error(self.line(), "objc_t must be passed by reference"));
        }
        Ok(t)
    }

    /// Skips one statement: up to and including `;` at brace depth zero, or
    /// a braced body (plus an optional trailing `;`).
    fn skip_statement(&mut self) -> PResult<()> {
        let start = self.line();
        let mut depth = 0usize;
        while let Some(t) = self.bump() {
            if t.is_punct("{") {
                depth += 1;
            } else if t.is_punct("}") {
                if depth == 0 {
                    self.pos -= 1;
                    return Ok(());
                }
                depth -= 1;
                if depth == 0 {
                    self.eat_punct(";");
                    return Ok(());
                }
            } else if t.is_punct(";") && depth == 0 {
                return Ok(());
            }
        }
        Err(Diagnostic::error(start, "unterminated declaration"))
    }

    fn skip_body(&mut self) -> PResult<()> {
        let start = self.line();
        let mut depth = 0usize;
        while let Some(t) = self.bump() {
            if t.is_punct("{") {
                depth += 1;
            } else if t.is_punct("}") {
                depth -= 1;
                if depth == 0 {
                    return Ok(());
                }
            }
        }
        Err(Diagnostic::error(start, "unterminated function body"))
    }

    fn header(&mut self) -> PResult<ClassDescription> {
        let mut found: Option<ClassDescription> = None;
        while let Some(t) = self.peek() {
            match t.ident() {
                Some(kw @ ("class" | "struct")) => {
                    let is_forward = self.peek_at(1).is_some_and(|t| t.ident().is_some())
                        && self.peek_at(2).is_some_and(|t| t.is_punct(";"));
                    if is_forward {
                        self.pos += 3;
                        continue;
                    }
                    if found.is_some() {
                        return Err(Diagnostic::error(
                            t.line,
                            "more than one class definition in header",
                        ));
                    }
                    self.pos += 1;
                    found = Some(self.class_def(kw == "struct")?);
                }
                Some("template") => {
                    return Err(Diagnostic::error(t.line, "templates are not supported"))
                }
                Some("namespace") => {
                    return Err(Diagnostic::error(t.line, "namespaces are not supported"))
                }
                _ => self.skip_statement()?,
            }
            if self.peek().is_some_and(|t| t.is_punct("}")) {
                let t = self.peek().unwrap();
                return Err(Diagnostic::error(t.line, "unbalanced `}`"));
            }
        }
        found.ok_or_else(|| Diagnostic::error(self.line().max(1), "no class definition found"))
    }

    fn class_def(&mut self, is_struct: bool) -> PResult<ClassDescription> {
        let name_line = self.line();
        let class_name = self.expect_ident("class name")?;
        let base_err = || {
            Diagnostic::error(
                name_line,
                format!("class `{}` must derive from `public {}`", class_name, BRIDGE_BASE),
            )
        };
        if !self.eat_punct(":") {
            return Err(base_err());
        }
        let access = match self.peek().and_then(Token::ident) {
            Some("public") => {
                self.pos += 1;
                true
            }
            Some("private") | Some("protected") => false,
            _ => is_struct,
        };
        if self.peek().is_some_and(|t| t.is_ident("virtual")) {
            return Err(Diagnostic::error(self.line(), "virtual inheritance is not supported"));
        }
        let base = self.expect_ident("base class name")?;
        if !access || base != BRIDGE_BASE {
            return Err(base_err());
        }
        if self.peek().is_some_and(|t| t.is_punct(",")) {
            return Err(Diagnostic::error(self.line(), "multiple inheritance is not supported"));
        }
        if self.peek().is_some_and(|t| t.is_punct("<")) {
            return Err(Diagnostic::error(self.line(), "templates are not supported"));
        }
        self.expect_punct("{")?;

        let mut cd = ClassDescription::new(class_name);
        cd.base_name = base;
        let mut field_lines: Vec<usize> = Vec::new();
        let mut method_lines: Vec<usize> = Vec::new();
        let mut access = if is_struct { Access::Public } else { Access::Hidden };
        loop {
            let Some(t) = self.peek() else {
                return Err(Diagnostic::error(name_line, "unterminated class body"));
            };
            if t.is_punct("}") {
                self.pos += 1;
                break;
            }
            if let Some(kw @ ("public" | "private" | "protected")) = t.ident() {
                if self.peek_at(1).is_some_and(|t| t.is_punct(":")) {
                    access = if kw == "public" { Access::Public } else { Access::Hidden };
                    self.pos += 2;
                    continue;
                }
            }
            if access == Access::Hidden {
                self.skip_statement()?;
                continue;
            }
            self.member(&mut cd, &mut field_lines, &mut method_lines)?;
        }
        self.expect_punct(";")?;

        for (i, f) in cd.fields.iter().enumerate() {
            if cd.fields[..i].iter().any(|g| g.name == f.name) {
                return Err(Diagnostic::error(field_lines[i], format!("duplicate field `{}`", f.name)));
            }
            check_field(f).map_err(|m| Diagnostic::error(field_lines[i], m))?;
        }
        for (i, m) in cd.methods.iter().enumerate() {
            if cd.methods[..i].iter().any(|g| g.name == m.name) {
                return Err(Diagnostic::error(
                    method_lines[i],
                    format!("overloaded method {}", m.name),
                ));
            }
            let warnings =
                check_translated_method(m).map_err(|msg| Diagnostic::error(method_lines[i], msg))?;
            for w in warnings {
                self.warnings.push(Diagnostic::warning(method_lines[i], w));
            }
        }
        Ok(cd)
    }

    fn member(
        &mut self,
        cd: &mut ClassDescription,
        field_lines: &mut Vec<usize>,
        method_lines: &mut Vec<usize>,
    ) -> PResult<()> {
        let line = self.line();
        if self.peek().is_some_and(|t| t.is_ident("inline")) {
            self.pos += 1;
        }
        let t = self.peek().ok_or_else(|| self.unexpected("member"))?;
        if let Some(kw) = t.ident().filter(|k| UNSUPPORTED_MEMBER_KEYWORDS.contains(k)) {
            let what = if kw == "operator" {
                "operator overloads are not supported".to_string()
            } else {
                format!("`{}` members are not supported", kw)
            };
            return Err(Diagnostic::error(t.line, what));
        }
        let is_ctor = t.is_ident(&cd.class_name) && self.peek_at(1).is_some_and(|n| n.is_punct("("));
        if t.is_punct("~") || is_ctor {
            let what = if is_ctor { "constructor" } else { "destructor" };
            self.skip_statement()?;
            self.warnings.push(Diagnostic::warning(
                line,
                format!("{} of `{}` is not bridged; `- init` runs the default constructor", what, cd.class_name),
            ));
            return Ok(());
        }
        if t.is_punct(";") {
            self.pos += 1;
            return Ok(());
        }

        let ty = self.ty()?;
        if self.peek().is_some_and(|t| t.is_ident("operator")) {
            return Err(Diagnostic::error(self.line(), "operator overloads are not supported"));
        }
        let name = self.expect_ident("member name")?;
        if self.peek().is_some_and(|t| t.is_punct("(")) {
            let m = self.method_rest(name, ty)?;
            if self.peek().is_some_and(|t| t.is_ident("const")) {
                return Err(Diagnostic::error(self.line(), "const member functions are not supported"));
            }
            if self.peek().is_some_and(|t| t.is_punct("=")) {
                return Err(Diagnostic::error(self.line(), "pure or defaulted member functions are not supported"));
            }
            if self.peek().is_some_and(|t| t.is_punct("{")) {
                self.skip_body()?;
                self.eat_punct(";");
            } else {
                self.expect_punct(";")?;
            }
            cd.methods.push(m);
            method_lines.push(line);
            return Ok(());
        }

        // field declarators: name[extents] {, [*]name[extents]} ;
        let mut first = true;
        let mut name = name;
        loop {
            let mut fty = ty.clone();
            if !first {
                fty.is_pointer = false;
                if self.eat_punct("*") {
                    fty.is_pointer = true;
                }
                name = self.expect_ident("field name")?;
            }
            first = false;
            while self.eat_punct("[") {
                let t = self.bump().ok_or_else(|| self.unexpected("array extent"))?;
                let n: u32 = match &t.kind {
                    lex::TokenKind::Number(n) => n.parse().map_err(|_| {
                        Diagnostic::error(t.line, format!("array extent `{}` is not a decimal integer", n))
                    })?,
                    _ => {
                        return Err(Diagnostic::error(
                            t.line,
                            format!("array extent must be an integer literal, found `{}`", t.text()),
                        ))
                    }
                };
                fty.array_extents.push(n);
                self.expect_punct("]")?;
            }
            if self.peek().is_some_and(|t| t.is_punct("=")) {
                return Err(Diagnostic::error(self.line(), "member initializers are not supported"));
            }
            if self.peek().is_some_and(|t| t.is_punct(":")) {
                return Err(Diagnostic::error(self.line(), "bit-fields are not supported"));
            }
            let order = cd.fields.len();
            cd.fields.push(FieldDescriptor {
                name: name.clone(),
                ty: fty,
                declaration_order: order,
            });
            field_lines.push(line);
            if self.eat_punct(",") {
                continue;
            }
            self.expect_punct(";")?;
            return Ok(());
        }
    }

    /// Parses `( params )` after a method name and classifies the method.
    fn method_rest(&mut self, name: String, return_type: TypeRef) -> PResult<MethodDescriptor> {
        self.expect_punct("(")?;
        let open = self.pos;
        let params = self.params_until(Some(")"))?;
        let arg_text = lex::join_spaced(&self.toks[open..self.pos]);
        self.expect_punct(")")?;
        let types: Vec<TypeRef> = params.iter().map(|p| p.ty.clone()).collect();
        let passing_mode = classify_method(&name, &return_type, &types);
        Ok(MethodDescriptor {
            name,
            return_type,
            params,
            passing_mode,
            arg_text,
        })
    }

    /// Parses `type name, type name, ...` up to (not including) `close`, or
    /// to end of input when `close` is `None`.
    fn params_until(&mut self, close: Option<&str>) -> PResult<Vec<ParameterDescriptor>> {
        let at_close = |p: &Self| match close {
            Some(c) => p.peek().is_none_or(|t| t.is_punct(c)),
            None => p.peek().is_none(),
        };
        let mut params: Vec<ParameterDescriptor> = Vec::new();
        if at_close(self) {
            return Ok(params);
        }
        if self.peek().is_some_and(|t| t.is_ident("void"))
            && {
                let save = self.pos;
                self.pos += 1;
                let closed = at_close(self);
                self.pos = save;
                closed
            }
        {
            self.pos += 1;
            return Ok(params);
        }
        loop {
            if self.peek().is_some_and(|t| t.is_punct("...")) {
                return Err(Diagnostic::error(
                    self.line(),
                    "C-style `...` is not supported; take `objc_t& buf` as the second parameter",
                ));
            }
            let ty = self.ty()?;
            let name = match self.peek().and_then(Token::ident) {
                Some(n) => {
                    self.pos += 1;
                    n.to_string()
                }
                None => return Err(Diagnostic::error(self.line(), "parameters must be named")),
            };
            if self.peek().is_some_and(|t| t.is_punct("[")) {
                return Err(Diagnostic::error(self.line(), "array parameters are not supported"));
            }
            if self.peek().is_some_and(|t| t.is_punct("=")) {
                return Err(Diagnostic::error(self.line(), "default arguments are not supported"));
            }
            if params.iter().any(|p| p.name == name) {
                return Err(Diagnostic::error(self.line(), format!("duplicate parameter `{}`", name)));
            }
            let position = params.len();
            params.push(ParameterDescriptor { name, ty, position });
            if at_close(self) {
                return Ok(params);
            }
            if !self.eat_punct(",") {
                return Err(self.unexpected("`,` or `)`"));
            }
        }
    }
}
