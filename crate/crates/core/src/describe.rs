//! The class-description (`.cd`) file: one `writeobjc` action per bridged
//! member inside an inline function named after the class.
//!
//! ```text
//! #include "writeobjc_base.h"
//! inline void writeobjc(writeobjc_t* targ, eco_string desc,class myCounter& arg)
//! {
//! writeobjc(targ,desc+"",(objc_obj&)arg);
//! writeobjc(targ,desc+".sName",is_array(),arg.sName[0],"[20]"); // char
//! writeobjc(targ,desc+".dVal",arg.dVal); // double
//! writeobjc(targ,desc+".sum2_x1",arg,&myCounter::sum2_x1, "double", "double x1, double x2");
//! }
//! ```
//!
//! Field lines end with a `// <type>` comment naming the element type, which
//! the action itself leaves to C++ overload resolution. C++-only methods are
//! never written.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::diag::Diagnostic;
use crate::header::{
    check_field, check_translated_method, classify_method, parse_arg_list, ClassDescription,
    FieldDescriptor, MethodDescriptor,
};
use crate::lex::{self, Token, TokenKind};
use crate::types::{parse_type_text, OpaqueTypedefs, TypeRef};

pub const INCLUDE_LINE: &str = "#include \"writeobjc_base.h\"";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CdLine {
    BaseCast {
        base: String,
    },
    ScalarField {
        name: String,
        type_text: String,
    },
    ArrayField {
        name: String,
        /// e.g. `[2][4]`
        extents: String,
        element_type: String,
    },
    Method {
        name: String,
        return_type: String,
        arg_text: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CdDocument {
    pub class_name: String,
    pub lines: Vec<CdLine>,
}

impl CdDocument {
    pub fn from_class(cd: &ClassDescription) -> Self {
        let mut lines = Vec::with_capacity(1 + cd.fields.len() + cd.methods.len());
        lines.push(CdLine::BaseCast {
            base: cd.base_name.clone(),
        });
        for f in &cd.fields {
            let mut scalar = f.ty.clone();
            scalar.array_extents.clear();
            if f.ty.is_array() {
                lines.push(CdLine::ArrayField {
                    name: f.name.clone(),
                    extents: f.ty.extents_text(),
                    element_type: scalar.render(),
                });
            } else {
                lines.push(CdLine::ScalarField {
                    name: f.name.clone(),
                    type_text: scalar.render(),
                });
            }
        }
        for m in cd.translated_methods() {
            lines.push(CdLine::Method {
                name: m.name.clone(),
                return_type: m.return_type.render(),
                arg_text: m.arg_text.clone(),
            });
        }
        CdDocument {
            class_name: cd.class_name.clone(),
            lines,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(INCLUDE_LINE);
        out.push('\n');
        out.push_str(&format!(
            "inline void writeobjc(writeobjc_t* targ, eco_string desc,class {}& arg)\n{{\n",
            self.class_name
        ));
        for line in &self.lines {
            out.push_str(&self.render_line(line));
            out.push('\n');
        }
        out.push_str("}\n");
        out
    }

    fn render_line(&self, line: &CdLine) -> String {
        match line {
            CdLine::BaseCast { base } => format!("writeobjc(targ,desc+\"\",({}&)arg);", base),
            CdLine::ScalarField { name, type_text } => {
                format!("writeobjc(targ,desc+\".{0}\",arg.{0}); // {1}", name, type_text)
            }
            CdLine::ArrayField {
                name,
                extents,
                element_type,
            } => {
                let dims = extents.matches('[').count();
                format!(
                    "writeobjc(targ,desc+\".{0}\",is_array(),arg.{0}{1},\"{2}\"); // {3}",
                    name,
                    "[0]".repeat(dims),
                    extents,
                    element_type
                )
            }
            CdLine::Method {
                name,
                return_type,
                arg_text,
            } => format!(
                "writeobjc(targ,desc+\".{0}\",arg,&{1}::{0}, \"{2}\", \"{3}\");",
                name, self.class_name, return_type, arg_text
            ),
        }
    }

    /// Parses `.cd` text into its line structure without interpreting types.
    pub fn parse(text: &str) -> Result<CdDocument, Diagnostic> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        match lines.next() {
            Some((_, l)) if l == INCLUDE_LINE => {}
            Some((n, _)) => {
                return Err(Diagnostic::error(n, format!("expected `{}`", INCLUDE_LINE)))
            }
            None => return Err(Diagnostic::error(1, "empty class description")),
        }
        let (n, opener) = lines
            .next()
            .ok_or_else(|| Diagnostic::error(1, "missing writeobjc function opener"))?;
        let class_name = parse_opener(opener).map_err(|m| Diagnostic::error(n, m))?;
        match lines.next() {
            Some((_, "{")) => {}
            Some((n, _)) => return Err(Diagnostic::error(n, "expected `{`")),
            None => return Err(Diagnostic::error(n, "missing function body")),
        }

        let mut doc = CdDocument {
            class_name,
            lines: Vec::new(),
        };
        let mut closed = false;
        let mut last = n;
        for (n, l) in lines {
            last = n;
            if closed {
                return Err(Diagnostic::error(n, "content after closing `}`"));
            }
            if l == "}" {
                closed = true;
                continue;
            }
            let parsed = parse_member_line(l, &doc.class_name).map_err(|m| Diagnostic::error(n, m))?;
            let is_base = matches!(parsed, CdLine::BaseCast { .. });
            if is_base != doc.lines.is_empty() {
                return Err(Diagnostic::error(
                    n,
                    "the base-class action must appear exactly once, first",
                ));
            }
            doc.lines.push(parsed);
        }
        if !closed {
            return Err(Diagnostic::error(last, "missing closing `}`"));
        }
        if doc.lines.is_empty() {
            return Err(Diagnostic::error(last, "missing base-class action"));
        }
        Ok(doc)
    }
}

pub fn emit_cd(cd: &ClassDescription) -> String {
    CdDocument::from_class(cd).render()
}

/// Parses `.cd` text back into a [`ClassDescription`]. Passing modes are
/// re-derived from the quoted argument lists.
pub fn parse_cd(text: &str, typedefs: &OpaqueTypedefs) -> Result<ClassDescription, Diagnostic> {
    let doc = CdDocument::parse(text)?;
    // member lines in `doc.lines` map back to source lines for diagnostics
    let source_lines: Vec<usize> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| l.trim().starts_with("writeobjc("))
        .map(|(i, _)| i + 1)
        .collect();
    let line_of = |k: usize| source_lines.get(k).copied().unwrap_or(0);

    let mut cd = ClassDescription::new(doc.class_name.clone());
    for (k, line) in doc.lines.iter().enumerate() {
        let n = line_of(k);
        match line {
            CdLine::BaseCast { base } => cd.base_name = base.clone(),
            CdLine::ScalarField { name, type_text } => {
                let ty = parse_type_text(type_text, typedefs).map_err(|m| Diagnostic::error(n, m))?;
                push_field(&mut cd, name, ty, n)?;
            }
            CdLine::ArrayField {
                name,
                extents,
                element_type,
            } => {
                let mut ty =
                    parse_type_text(element_type, typedefs).map_err(|m| Diagnostic::error(n, m))?;
                ty.array_extents = parse_extents(extents).map_err(|m| Diagnostic::error(n, m))?;
                push_field(&mut cd, name, ty, n)?;
            }
            CdLine::Method {
                name,
                return_type,
                arg_text,
            } => {
                let return_type =
                    parse_type_text(return_type, typedefs).map_err(|m| Diagnostic::error(n, m))?;
                let params = parse_arg_list(arg_text, typedefs)
                    .map_err(|d| Diagnostic::error(n, d.message))?;
                let types: Vec<TypeRef> = params.iter().map(|p| p.ty.clone()).collect();
                let m = MethodDescriptor {
                    passing_mode: classify_method(name, &return_type, &types),
                    name: name.clone(),
                    return_type,
                    params,
                    arg_text: arg_text.clone(),
                };
                if cd.methods.iter().any(|g| g.name == m.name) {
                    return Err(Diagnostic::error(n, format!("overloaded method {}", m.name)));
                }
                check_translated_method(&m).map_err(|msg| Diagnostic::error(n, msg))?;
                cd.methods.push(m);
            }
        }
    }
    Ok(cd)
}

fn push_field(cd: &mut ClassDescription, name: &str, ty: TypeRef, line: usize) -> Result<(), Diagnostic> {
    if cd.fields.iter().any(|f| f.name == name) {
        return Err(Diagnostic::error(line, format!("duplicate field `{}`", name)));
    }
    let f = FieldDescriptor {
        name: name.to_string(),
        ty,
        declaration_order: cd.fields.len(),
    };
    check_field(&f).map_err(|m| Diagnostic::error(line, m))?;
    cd.fields.push(f);
    Ok(())
}

/// Parses concatenated bracketed integers such as `[2][4]`.
pub fn parse_extents(text: &str) -> Result<Vec<u32>, String> {
    let bad = || format!("malformed array extents `{}`", text);
    let mut out = Vec::new();
    let mut rest = text;
    if rest.is_empty() {
        return Err(bad());
    }
    while !rest.is_empty() {
        let inner = rest.strip_prefix('[').ok_or_else(bad)?;
        let close = inner.find(']').ok_or_else(bad)?;
        let digits = &inner[..close];
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        out.push(digits.parse().map_err(|_| bad())?);
        rest = &inner[close + 1..];
    }
    Ok(out)
}

fn parse_opener(line: &str) -> Result<String, String> {
    let toks = lex::tokenize(line).map_err(|e| e.message)?;
    let mut c = Cursor::new(&toks);
    let ok = c.ident("inline")
        && c.ident("void")
        && c.ident("writeobjc")
        && c.punct("(")
        && c.ident("writeobjc_t")
        && c.punct("*")
        && c.ident("targ")
        && c.punct(",")
        && c.ident("eco_string")
        && c.ident("desc")
        && c.punct(",")
        && c.ident("class");
    let name = c.any_ident();
    match name {
        Some(name) if ok && c.punct("&") && c.ident("arg") && c.punct(")") && c.done() => Ok(name),
        _ => Err("malformed writeobjc function opener".to_string()),
    }
}

/// Splits a line into its code and a trailing `//` comment, ignoring `//`
/// inside string literals.
fn split_comment(line: &str) -> (&str, Option<&str>) {
    let bytes = line.as_bytes();
    let mut in_str = false;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' if in_str => i += 1,
            b'"' => in_str = !in_str,
            b'/' if !in_str && bytes.get(i + 1) == Some(&b'/') => {
                return (&line[..i], Some(line[i + 2..].trim()))
            }
            _ => {}
        }
        i += 1;
    }
    (line, None)
}

fn parse_member_line(line: &str, class_name: &str) -> Result<CdLine, String> {
    let (code, comment) = split_comment(line);
    let toks = lex::tokenize(code).map_err(|e| e.message)?;
    let mut c = Cursor::new(&toks);
    let head = c.ident("writeobjc")
        && c.punct("(")
        && c.ident("targ")
        && c.punct(",")
        && c.ident("desc")
        && c.punct("+");
    if !head {
        return Err("unknown line kind".to_string());
    }
    let desc = c.string().ok_or("expected member path string")?;
    if !c.punct(",") {
        return Err("expected `,` after member path".to_string());
    }
    let tail = |c: &mut Cursor| c.punct(")") && c.punct(";") && c.done();

    if desc.is_empty() {
        // (base&)arg
        let ok = c.punct("(");
        let base = c.any_ident();
        return match base {
            Some(base) if ok && c.punct("&") && c.punct(")") && c.ident("arg") && tail(&mut c) => {
                Ok(CdLine::BaseCast { base })
            }
            _ => Err("malformed base-class action".to_string()),
        };
    }
    let name = desc
        .strip_prefix('.')
        .filter(|n| is_identifier(n))
        .ok_or_else(|| format!("malformed member path `{}`", desc))?
        .to_string();
    let type_comment = || {
        comment
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .ok_or_else(|| format!("field `{}` is missing its `// <type>` annotation", name))
    };

    if c.ident("is_array") {
        if !(c.punct("(") && c.punct(")") && c.punct(",") && c.ident("arg") && c.punct(".") && c.ident(&name)) {
            return Err(format!("malformed array action for `{}`", name));
        }
        let mut subscripts = 0;
        while c.punct("[") {
            if !(c.number("0") && c.punct("]")) {
                return Err(format!("malformed element access for `{}`", name));
            }
            subscripts += 1;
        }
        if subscripts == 0 || !c.punct(",") {
            return Err(format!("malformed array action for `{}`", name));
        }
        let extents = c.string().ok_or("expected extents string")?;
        parse_extents(&extents)?;
        if !tail(&mut c) {
            return Err(format!("malformed array action for `{}`", name));
        }
        let element_type = type_comment()?;
        return Ok(CdLine::ArrayField {
            name,
            extents,
            element_type,
        });
    }
    if c.ident("arg") {
        if c.punct(".") {
            if !(c.ident(&name) && tail(&mut c)) {
                return Err(format!("malformed scalar action for `{}`", name));
            }
            let type_text = type_comment()?;
            return Ok(CdLine::ScalarField { name, type_text });
        }
        let ok = c.punct(",") && c.punct("&") && c.ident(class_name) && c.punct("::") && c.ident(&name) && c.punct(",");
        if !ok {
            return Err(format!("malformed method action for `{}`", name));
        }
        let return_type = c.string().ok_or("expected return type string")?;
        if !c.punct(",") {
            return Err(format!("malformed method action for `{}`", name));
        }
        let arg_text = c.string().ok_or("expected argument list string")?;
        if !tail(&mut c) {
            return Err(format!("malformed method action for `{}`", name));
        }
        return Ok(CdLine::Method {
            name,
            return_type,
            arg_text,
        });
    }
    Err("unknown line kind".to_string())
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Token]) -> Self {
        Cursor { toks, pos: 0 }
    }

    fn eat(&mut self, f: impl FnOnce(&Token) -> bool) -> bool {
        if self.toks.get(self.pos).is_some_and(f) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self, s: &str) -> bool {
        self.eat(|t| t.is_ident(s))
    }

    fn punct(&mut self, p: &str) -> bool {
        self.eat(|t| t.is_punct(p))
    }

    fn number(&mut self, n: &str) -> bool {
        self.eat(|t| matches!(&t.kind, TokenKind::Number(m) if m == n))
    }

    fn any_ident(&mut self) -> Option<String> {
        let s = self.toks.get(self.pos)?.ident()?.to_string();
        self.pos += 1;
        Some(s)
    }

    fn string(&mut self) -> Option<String> {
        match &self.toks.get(self.pos)?.kind {
            TokenKind::Str(s) => {
                let s = s.clone();
                self.pos += 1;
                Some(s)
            }
            _ => None,
        }
    }

    fn done(&self) -> bool {
        self.pos == self.toks.len()
    }
}
