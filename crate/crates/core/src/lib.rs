//! Generation of Objective-C <-> C++ bridges for classes shared between the
//! two runtimes.
//!
//! The forward direction parses a restricted C++ header into a
//! [`ClassDescription`], serializes it as a class-description (`.cd`) file,
//! and emits the Objective-C interface, trampoline implementation and
//! C-linkage export shims. The reverse direction mirrors an Objective-C
//! interface as a C++ class template and emits the glue needed to run
//! selected methods in C++.
//!
//! Everything here is a pure text-to-text transformation; file handling
//! lives in the `objcbridge` crate.

#![no_std]

extern crate alloc;

pub mod describe;
pub mod diag;
pub mod forward;
pub mod header;
pub mod lex;
pub mod reverse;
pub mod types;

pub use describe::{emit_cd, parse_cd, CdDocument, CdLine};
pub use forward::{generate, mangle, translate_prototype, GeneratedFileSet, ObjCDeclaration};


pub use diag::{Diagnostic, Diagnostics, Severity};

pub use header::{
    classify_method, classify_prototype, parse_header, ClassDescription, FieldDescriptor,
    MethodDescriptor, ParameterDescriptor, PassingMode,
};
pub use types::{OpaqueTypedefs, TypeKind, TypeRef};
