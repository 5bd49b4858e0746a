//! Types that may appear in bridged fields and member-function signatures.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::lex::Token;

/// Words that may be combined to name a primitive C type.
pub const PRIMITIVE_WORDS: &[&str] = &[
    "void", "char", "short", "int", "long", "unsigned", "float", "double",
];

/// Maximum number of array dimensions accepted on a field.
pub const MAX_ARRAY_DIMS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeKind {
    Primitive,
    ObjcId,
    ObjcTRef,
    OpaqueTypedef,
    CppOnly,
}

/// Names of user typedefs that are bridged as plain scalars.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OpaqueTypedefs(BTreeSet<String>);

impl OpaqueTypedefs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>) {
        self.0.insert(name.into());
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

impl<S: Into<String>> FromIterator<S> for OpaqueTypedefs {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        OpaqueTypedefs(iter.into_iter().map(Into::into).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeRef {
    pub base_name: String,
    pub is_reference: bool,
    pub is_pointer: bool,
    pub array_extents: Vec<u32>,
    pub kind: TypeKind,
}

pub fn is_primitive_name(name: &str) -> bool {
    !name.is_empty() && name.split(' ').all(|w| PRIMITIVE_WORDS.contains(&w))
}

pub fn classify_base(base_name: &str, is_reference: bool, typedefs: &OpaqueTypedefs) -> TypeKind {
    if is_primitive_name(base_name) {
        TypeKind::Primitive
    } else if base_name == "id" {
        TypeKind::ObjcId
    } else if base_name == "objc_t" && is_reference {
        TypeKind::ObjcTRef
    } else if typedefs.contains(base_name) {
        TypeKind::OpaqueTypedef
    } else if base_name == "objc_t" {
        // by-value objc_t is rejected by the parsers; keep the kind total
        TypeKind::OpaqueTypedef
    } else {
        TypeKind::CppOnly
    }
}

impl TypeRef {
    pub fn new(base_name: &str, typedefs: &OpaqueTypedefs) -> Self {
        TypeRef {
            base_name: base_name.to_string(),
            is_reference: false,
            is_pointer: false,
            array_extents: Vec::new(),
            kind: classify_base(base_name, false, typedefs),
        }
    }

    pub fn void() -> Self {
        TypeRef::new("void", &OpaqueTypedefs::new())
    }

    pub fn is_void(&self) -> bool {
        self.base_name == "void" && !self.is_pointer && !self.is_reference
    }

    pub fn is_array(&self) -> bool {
        !self.array_extents.is_empty()
    }

    /// The type without any array extents, written as in a cast:
    /// `double`, `char *`, `objc_t &`.
    pub fn render(&self) -> String {
        let mut s = self.base_name.clone();
        if self.is_pointer {
            s.push_str(" *");
        }
        if self.is_reference {
            s.push_str(" &");
        }
        s
    }

    /// A C declaration of `name` with this type, without trailing `;`.
    pub fn declare(&self, name: &str) -> String {
        let mut s = self.base_name.clone();
        s.push(' ');
        if self.is_pointer {
            s.push('*');
        }
        if self.is_reference {
            s.push('&');
        }
        s.push_str(name);
        s.push_str(&self.extents_text());
        s
    }

    /// Concatenated bracketed extents, e.g. `[2][4]`.
    pub fn extents_text(&self) -> String {
        let mut s = String::new();
        for e in &self.array_extents {
            s.push('[');
            s.push_str(&e.to_string());
            s.push(']');
        }
        s
    }

    /// Scalars a variadic call promotes: reading these through `va_arg`
    /// at their declared width is undefined.
    pub fn is_promotable(&self) -> bool {
        !self.is_pointer
            && !self.is_reference
            && matches!(
                self.base_name.as_str(),
                "float" | "char" | "short" | "unsigned char" | "unsigned short" | "short int"
                    | "unsigned short int"
            )
    }
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())?;
        f.write_str(&self.extents_text())
    }
}

/// Parses the type-specifier prefix of `tokens` starting at `pos`.
///
/// Handles primitive word runs, identifiers (optionally `::`-qualified and
/// with template arguments) and at most one `*` or `&`. Returns the type
/// and the index of the first unconsumed token.
pub(crate) fn parse_type(
    tokens: &[Token],
    mut pos: usize,
    typedefs: &OpaqueTypedefs,
) -> Result<(TypeRef, usize), (usize, String)> {
    let line_at = |p: usize| tokens.get(p).or(tokens.last()).map_or(0, |t| t.line);
    let mut words: Vec<String> = Vec::new();
    while let Some(w) = tokens.get(pos).and_then(Token::ident) {
        if PRIMITIVE_WORDS.contains(&w) {
            words.push(w.to_string());
            pos += 1;
        } else {
            break;
        }
    }
    let base_name = if !words.is_empty() {
        words.join(" ")
    } else {
        match tokens.get(pos).and_then(Token::ident) {
            Some("const") | Some("volatile") => {
                return Err((line_at(pos), "cv-qualified types are not supported".to_string()))
            }
            Some(name) => {
                let mut text = name.to_string();
                pos += 1;
                loop {
                    if tokens.get(pos).is_some_and(|t| t.is_punct("::")) {
                        match tokens.get(pos + 1).and_then(Token::ident) {
                            Some(next) => {
                                text.push_str("::");
                                text.push_str(next);
                                pos += 2;
                            }
                            None => return Err((line_at(pos), "malformed qualified name".to_string())),
                        }
                    } else if tokens.get(pos).is_some_and(|t| t.is_punct("<")) {
                        let (args, next) = template_args(tokens, pos)?;
                        text.push_str(&args);
                        pos = next;
                    } else {
                        break;
                    }
                }
                text
            }
            None => return Err((line_at(pos), "expected a type".to_string())),
        }
    };
    let mut ty = TypeRef {
        base_name,
        is_reference: false,
        is_pointer: false,
        array_extents: Vec::new(),
        kind: TypeKind::Primitive,
    };
    while let Some(t) = tokens.get(pos) {
        if t.is_punct("*") {
            if ty.is_pointer || ty.is_reference {
                return Err((t.line, "only a single level of indirection is supported".to_string()));
            }
            ty.is_pointer = true;
        } else if t.is_punct("&") {
            if ty.is_pointer || ty.is_reference {
                return Err((t.line, "only a single level of indirection is supported".to_string()));
            }
            ty.is_reference = true;
        } else {
            break;
        }
        pos += 1;
    }
    ty.kind = classify_base(&ty.base_name, ty.is_reference, typedefs);
    Ok((ty, pos))
}

fn template_args(tokens: &[Token], open: usize) -> Result<(String, usize), (usize, String)> {
    let mut depth = 0usize;
    let mut text = String::new();
    let mut pos = open;
    while let Some(t) = tokens.get(pos) {
        if t.is_punct("<") {
            depth += 1;
        } else if t.is_punct(">") {
            depth -= 1;
        } else if t.is_punct(";") || t.is_punct("{") || t.is_punct("(") {
            break;
        }
        if t.is_punct(",") {
            text.push_str(", ");
        } else {
            text.push_str(&t.text());
        }
        pos += 1;
        if depth == 0 {
            return Ok((text, pos));
        }
    }
    Err((tokens[open].line, "unterminated template argument list".to_string()))
}

/// Parses a complete type text such as `char *` or `unsigned int`.
pub fn parse_type_text(text: &str, typedefs: &OpaqueTypedefs) -> Result<TypeRef, String> {
    let tokens = crate::lex::tokenize(text).map_err(|e| e.message)?;
    let (ty, end) = parse_type(&tokens, 0, typedefs).map_err(|(_, m)| m)?;
    if end != tokens.len() {
        return Err(alloc::format!("unexpected `{}` in type `{}`", tokens[end].text(), text));
    }
    Ok(ty)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn td() -> OpaqueTypedefs {
        ["HeatValue", "Color"].into_iter().collect()
    }

    #[test]
    fn kinds() {
        let t = td();
        assert_eq!(parse_type_text("int", &t).unwrap().kind, TypeKind::Primitive);
        assert_eq!(parse_type_text("unsigned char", &t).unwrap().kind, TypeKind::Primitive);
        assert_eq!(parse_type_text("id", &t).unwrap().kind, TypeKind::ObjcId);
        assert_eq!(parse_type_text("objc_t&", &t).unwrap().kind, TypeKind::ObjcTRef);
        assert_eq!(parse_type_text("HeatValue", &t).unwrap().kind, TypeKind::OpaqueTypedef);
        let v = parse_type_text("vector<int>", &t).unwrap();
        assert_eq!(v.kind, TypeKind::CppOnly);
        assert_eq!(v.base_name, "vector<int>");
        let m = parse_type_text("std::map<int, std::vector<int> >", &t).unwrap();
        assert_eq!(m.base_name, "std::map<int, std::vector<int>>");
        assert_eq!(m.kind, TypeKind::CppOnly);
    }

    #[test]
    fn rendering() {
        let t = td();
        let p = parse_type_text("char*", &t).unwrap();
        assert!(p.is_pointer);
        assert_eq!(p.render(), "char *");
        assert_eq!(p.declare("s"), "char *s");
        let mut a = parse_type_text("int", &t).unwrap();
        a.array_extents = alloc::vec![2, 4];
        assert_eq!(a.declare("iaX"), "int iaX[2][4]");
        assert_eq!(a.extents_text(), "[2][4]");
    }

    #[test]
    fn rejects() {
        let t = td();
        assert!(parse_type_text("char **", &t).is_err());
        assert!(parse_type_text("const char *", &t).is_err());
        assert!(parse_type_text("int *&", &t).is_err());
    }
}
