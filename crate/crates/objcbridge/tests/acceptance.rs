//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the per-criterion lines are always
//! printed; exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant, SystemTime};

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, TestRng, TestRunner};

use objcbridge::{forward_plan, reverse_plan, ToolConfig};
use objcbridge_core::lex::normalized_tokens;
use objcbridge_core::{
    classify_prototype, emit_cd, generate, parse_cd, ClassDescription, FieldDescriptor,
    MethodDescriptor, OpaqueTypedefs, ParameterDescriptor, PassingMode, TypeKind, TypeRef,
};

type Check = Result<String, String>;

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn expected(name: &str) -> String {
    fs::read_to_string(golden("expected").join(name)).unwrap()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_objcbridge"))
        .args(args)
        .output()
        .expect("run objcbridge")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tokens_equal(what: &str, actual: &str, expected: &str) -> Result<(), String> {
    let a = normalized_tokens(actual);
    let e = normalized_tokens(expected);
    if a == e {
        return Ok(());
    }
    let at = a.iter().zip(&e).position(|(x, y)| x != y).unwrap_or(a.len().min(e.len()));
    Err(format!(
        "{}: tokens differ at {}: got {:?}, expected {:?}",
        what,
        at,
        &a[at..(at + 6).min(a.len())],
        &e[at..(at + 6).min(e.len())]
    ))
}

fn contains_tokens(what: &str, hay: &str, needle: &str) -> Result<(), String> {
    let h = normalized_tokens(hay);
    let n = normalized_tokens(needle);
    ensure(h.windows(n.len()).any(|w| w == n.as_slice()), || {
        format!("{}: token sequence not found:\n{}", what, needle)
    })
}

fn out_dir(tag: &str) -> tempfile::TempDir {
    tempfile::Builder::new().prefix(tag).tempdir().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{}: {}", name, e))
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn criterion_1() -> Check {
    let dir = out_dir("c1");
    let d = dir.path().to_str().unwrap();
    let header = golden("myCounter.h");
    let (out, took) = timed(|| run(&["pipeline", header.to_str().unwrap(), "--out-dir", d]));
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into())?;
    ensure(took < Duration::from_secs(1), || format!("took {:?}", took))?;

    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    ensure(
        names == ["Makefile", "myCounter.cd", "myCounter.m", "myCounter.mh", "myCounterExportCpp.cc"],
        || format!("unexpected output set {:?}", names),
    )?;

    tokens_equal("myCounter.mh", &read(dir.path(), "myCounter.mh"), &expected("myCounter.mh"))?;
    let m = read(dir.path(), "myCounter.m");
    let cc = read(dir.path(), "myCounterExportCpp.cc");
    for block in expected("trampolines.m").split("\n\n") {
        contains_tokens("myCounter.m", &m, block)?;
    }
    for block in expected("shims.cc").split("\n\n") {
        contains_tokens("myCounterExportCpp.cc", &cc, block)?;
    }

    let cd = read(dir.path(), "myCounter.cd");
    let cd_lines: Vec<Vec<String>> = cd.lines().map(normalized_tokens).collect();
    for want in expected("myCounter.cd").lines() {
        let w = normalized_tokens(want);
        ensure(cd_lines.contains(&w), || format!("myCounter.cd lacks line {}", want))?;
    }
    Ok(format!("5 files, expected texts matched, {:?}", took))
}

fn criterion_2() -> Check {
    let dir = out_dir("c2");
    let d = dir.path().to_str().unwrap();
    let iface = golden("Heatbug.mh");
    let conf = golden("heatbug.conf");
    let (out, took) = timed(|| {
        run(&[
            "reverse",
            iface.to_str().unwrap(),
            "--config",
            conf.to_str().unwrap(),
            "--out-dir",
            d,
        ])
    });
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into())?;
    ensure(took < Duration::from_secs(1), || format!("took {:?}", took))?;

    let h = read(dir.path(), "Heatbug.h");
    let class_start = h.find("class Heatbug").ok_or("no class in Heatbug.h")?;
    tokens_equal("Heatbug.h", &h[class_start..], &expected("Heatbug.h"))?;
    let members: usize = h
        .lines()
        .filter(|l| l.starts_with("    ") && l.contains(';') && !l.contains('('))
        .map(|l| l.matches(',').count() + 1)
        .sum();
    ensure(members == 12, || format!("expected 11 instance variables plus zbits, got {}", members))?;
    tokens_equal("HeatbugTypes.h", &read(dir.path(), "HeatbugTypes.h"), &expected("HeatbugTypes.h"))?;
    contains_tokens("HeatbugBridge.m", &read(dir.path(), "HeatbugBridge.m"), &expected("HeatbugBridge.m"))?;
    contains_tokens(
        "HeatbugExportCpp.cc",
        &read(dir.path(), "HeatbugExportCpp.cc"),
        &expected("HeatbugExportCpp.cc"),
    )?;
    contains_tokens(
        "HeatbugExportObjc.m",
        &read(dir.path(), "HeatbugExportObjc.m"),
        &expected("HeatbugExportObjc.m"),
    )?;
    Ok(format!("template, typedefs, bridge pair and export matched, {:?}", took))
}

/// One type from the signature grammar, labelled with the category the
/// generator chose it from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Label {
    Plain,
    ObjcTRef,
    CppOnly,
}

const PLAIN_TYPES: &[&str] = &[
    "int", "char", "short", "long", "unsigned", "float", "double", "unsigned char",
    "unsigned int", "long int", "long double", "int *", "char *", "double *", "id", "HeatValue",
    "Color", "Color *", "int &", "double &",
];
const CPP_TYPES: &[&str] = &[
    "vector<int>", "std::string", "std::map<int, std::vector<int>>", "Widget", "Widget *",
    "std::string &", "Widget &", "const_iterator",
];

fn type_strategy() -> impl Strategy<Value = (String, Label)> {
    prop_oneof![
        6 => proptest::sample::select(PLAIN_TYPES).prop_map(|t| (t.to_string(), Label::Plain)),
        1 => proptest::sample::select(CPP_TYPES).prop_map(|t| (t.to_string(), Label::CppOnly)),
        3 => Just(("objc_t &".to_string(), Label::ObjcTRef)),
        1 => Just(("objc_t&".to_string(), Label::ObjcTRef)),
    ]
}

fn name_strategy() -> impl Strategy<Value = String> {
    (
        proptest::sample::select(&["sum", "get", "step", "x", "run_", "cpp"][..]),
        proptest::sample::select(&["", "", "", "", "", "cpp_", "_cpp", "Cpp_", "cpp_x", "2"][..]),
        proptest::sample::select(&["", "N", "_x1", "", "", "", "cpp_"][..]),
    )
        .prop_map(|(a, b, c)| format!("{}{}{}", a, b, c))
}

#[derive(Debug, Clone)]
struct Signature {
    name: String,
    ret: (String, Label),
    params: Vec<(String, Label)>,
}

impl Signature {
    fn text(&self) -> String {
        let params: Vec<String> = self
            .params
            .iter()
            .enumerate()
            .map(|(i, (t, _))| format!("{} p{}", t, i))
            .collect();
        format!("{} {}({});", self.ret.0, self.name, params.join(", "))
    }
}

fn signature_strategy() -> impl Strategy<Value = Signature> {
    let ret = prop_oneof![
        1 => Just(("void".to_string(), Label::Plain)),
        5 => type_strategy().prop_filter("no objc_t return", |(_, l)| *l != Label::ObjcTRef),
    ];
    let params = prop_oneof![
        3 => proptest::collection::vec(type_strategy(), 0..5),
        1 => proptest::collection::vec(type_strategy(), 2..3),
    ];
    (name_strategy(), ret, params)
        .prop_map(|(name, ret, params)| Signature { name, ret, params })
}

/// The translation decision, straight from the algorithm's pseudocode:
/// C++-only first, then the two-argument `objc_t&` case, else standard.
fn brute_force_mode(sig: &Signature) -> PassingMode {
    let mut cpp_only = false;
    let mut i = 0;
    let name = sig.name.as_bytes();
    while i + 4 <= name.len() {
        if &name[i..i + 4] == b"cpp_" {
            cpp_only = true;
        }
        i += 1;
    }
    if sig.ret.1 == Label::CppOnly {
        cpp_only = true;
    }
    for p in &sig.params {
        if p.1 == Label::CppOnly {
            cpp_only = true;
        }
    }
    if cpp_only {
        PassingMode::CppOnly
    } else if sig.params.len() == 2 && sig.params[1].1 == Label::ObjcTRef {
        PassingMode::Varargs
    } else {
        PassingMode::Standard
    }
}

fn criterion_3() -> Check {
    let typedefs: OpaqueTypedefs = ["HeatValue", "Color"].into_iter().collect();
    let mut runner = TestRunner::new_with_rng(Config::default(), TestRng::deterministic_rng(Default::default()));
    let strategy = signature_strategy();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for _ in 0..10_000 {
        let sig = strategy.new_tree(&mut runner).unwrap().current();
        let want = brute_force_mode(&sig);
        let got = classify_prototype(&sig.text(), &typedefs)
            .map_err(|d| format!("`{}` rejected: {}", sig.text(), d.message))?;
        ensure(got == want, || format!("`{}`: got {:?}, oracle {:?}", sig.text(), got, want))?;
        *counts.entry(format!("{:?}", want)).or_default() += 1;
    }
    ensure(counts.len() == 3, || format!("not all modes covered: {:?}", counts))?;
    Ok(format!("10000 signatures, 0 disagreements {:?}", counts))
}

const FIELD_BASES: &[&str] = &[
    "int", "char", "double", "float", "short", "long", "unsigned", "unsigned char", "long double",
    "id", "HeatValue",
];
const SCALAR_PARAMS: &[&str] = &["int", "double", "float", "char", "long", "unsigned", "id", "HeatValue"];
const RESERVED: &[&str] = &["obj", "self", "_cmd", "ap", "rtnvalue", "buffer", "init", "construct"];

fn kind_of(base: &str) -> TypeKind {
    match base {
        "id" => TypeKind::ObjcId,
        "HeatValue" => TypeKind::OpaqueTypedef,
        "objc_t" => TypeKind::ObjcTRef,
        "vector<int>" | "Widget" => TypeKind::CppOnly,
        _ => TypeKind::Primitive,
    }
}

fn type_ref(base: &str, pointer: bool, reference: bool, extents: Vec<u32>) -> TypeRef {
    TypeRef {
        base_name: base.to_string(),
        is_reference: reference,
        is_pointer: pointer,
        array_extents: extents,
        kind: kind_of(base),
    }
}

fn ident_strategy() -> impl Strategy<Value = String> {
    "[a-z][a-zA-Z0-9]{0,6}".prop_filter("not reserved", |s| {
        !RESERVED.contains(&s.as_str()) && !s.contains("cpp_")
    })
}

fn field_strategy() -> impl Strategy<Value = TypeRef> {
    (
        proptest::sample::select(FIELD_BASES),
        any::<bool>(),
        proptest::collection::vec(1u32..9, 0..4),
    )
        .prop_map(|(base, ptr, extents)| {
            let pointer = ptr && extents.is_empty() && base != "id";
            type_ref(base, pointer, false, extents)
        })
}

#[derive(Debug, Clone)]
enum MethodShape {
    Standard(Vec<TypeRef>),
    Varargs(TypeRef),
    CppOnlyByName(Vec<TypeRef>),
    CppOnlyByType(Vec<TypeRef>),
}

fn param_type() -> impl Strategy<Value = TypeRef> + Clone {
    (proptest::sample::select(SCALAR_PARAMS), any::<bool>())
        .prop_map(|(b, p)| type_ref(b, p && b != "id", false, vec![]))
}

fn method_shape() -> impl Strategy<Value = MethodShape> {
    let params = proptest::collection::vec(param_type(), 0..5);
    prop_oneof![
        4 => params.clone().prop_map(MethodShape::Standard),
        2 => param_type().prop_map(MethodShape::Varargs),
        1 => params.clone().prop_map(MethodShape::CppOnlyByName),
        1 => (params, proptest::sample::select(&["vector<int>", "Widget"][..])).prop_map(|(mut ps, b)| {
            ps.push(type_ref(b, false, false, vec![]));
            MethodShape::CppOnlyByType(ps)
        }),
    ]
}

fn build_method(name: String, ret: TypeRef, shape: MethodShape) -> MethodDescriptor {
    let (name, types, mode) = match shape {
        MethodShape::Standard(ts) => (name, ts, PassingMode::Standard),
        MethodShape::Varargs(t) => (
            name,
            vec![t, type_ref("objc_t", false, true, vec![])],
            PassingMode::Varargs,
        ),
        MethodShape::CppOnlyByName(ts) => (format!("cpp_{}", name), ts, PassingMode::CppOnly),
        MethodShape::CppOnlyByType(ts) => (name, ts, PassingMode::CppOnly),
    };
    let params: Vec<ParameterDescriptor> = types
        .into_iter()
        .enumerate()
        .map(|(i, ty)| ParameterDescriptor {
            name: format!("a{}", i),
            ty,
            position: i,
        })
        .collect();
    let arg_text = params
        .iter()
        .map(|p| p.ty.declare(&p.name))
        .collect::<Vec<_>>()
        .join(", ");
    MethodDescriptor {
        name,
        return_type: ret,
        params,
        passing_mode: mode,
        arg_text,
    }
}

fn class_strategy() -> impl Strategy<Value = ClassDescription> {
    let ret = prop_oneof![
        Just(TypeRef {
            base_name: "void".into(),
            is_reference: false,
            is_pointer: false,
            array_extents: vec![],
            kind: TypeKind::Primitive
        }),
        param_type(),
    ];
    (
        "[A-Z][a-zA-Z0-9]{0,8}",
        proptest::collection::btree_map(ident_strategy(), field_strategy(), 0..7),
        proptest::collection::btree_map(ident_strategy(), (ret, method_shape()), 0..7),
    )
        .prop_map(|(class, fields, methods)| {
            let mut cd = ClassDescription::new(class);
            cd.fields = fields
                .into_iter()
                .enumerate()
                .map(|(i, (name, ty))| FieldDescriptor {
                    name: format!("f_{}", name),
                    ty,
                    declaration_order: i,
                })
                .collect();
            cd.methods = methods
                .into_iter()
                .map(|(name, (ret, shape))| build_method(format!("m_{}", name), ret, shape))
                .collect();
            cd
        })
}

fn random_classes(n: usize) -> Vec<ClassDescription> {
    let mut runner = TestRunner::new_with_rng(Config::default(), TestRng::deterministic_rng(Default::default()));
    let s = class_strategy();
    (0..n).map(|_| s.new_tree(&mut runner).unwrap().current()).collect()
}

fn typedefs() -> OpaqueTypedefs {
    ["HeatValue"].into_iter().collect()
}

fn criterion_4() -> Check {
    let mut methods = 0;
    for d in random_classes(1000) {
        let text = emit_cd(&d);
        let back = parse_cd(&text, &typedefs()).map_err(|e| format!("{}\n{}", e, text))?;
        let want = d.without_cpp_only();
        ensure(back == want, || format!("round trip differs for\n{}\n{:#?}\n{:#?}", text, back, want))?;
        ensure(emit_cd(&back) == text, || format!("emit_cd not idempotent for\n{}", text))?;
        methods += want.methods.len();
    }
    Ok(format!("1000 classes, {} translated methods round-tripped", methods))
}

/// `(mangled name, parameter type token lists)` parsed from a prototype
/// line such as `double cpp_C_m(C * obj, double x1, va_list * ap)`.
fn parse_shim_signature(line: &str) -> Option<(String, Vec<Vec<String>>)> {
    let open = line.find('(')?;
    let close = line.rfind(')')?;
    let name = line[..open].split_whitespace().last()?.to_string();
    let params = line[open + 1..close]
        .split(',')
        .map(|p| {
            let mut t = normalized_tokens(p);
            t.pop();
            t
        })
        .collect();
    Some((name, params))
}

fn criterion_5() -> Check {
    let mut checked = 0;
    for d in random_classes(1000) {
        let set = generate(&d);
        let c = &d.class_name;
        let m_lines: Vec<&str> = set.m_text.lines().collect();
        let mut tramps = BTreeMap::new();
        for (i, l) in m_lines.iter().enumerate() {
            if l.contains(&format!("cpp_{}_", c)) && l.ends_with(");") && !l.starts_with(['{', ' ']) {
                let (name, params) = parse_shim_signature(l).ok_or("bad trampoline decl")?;
                let objc_decl = m_lines.get(i + 1).copied().unwrap_or("");
                ensure(tramps.insert(name.clone(), (params, objc_decl.to_string())).is_none(), || {
                    format!("duplicate trampoline {}", name)
                })?;
            }
        }
        let mut shims = BTreeMap::new();
        let cc_lines: Vec<&str> = set.export_cc_text.lines().collect();
        for w in cc_lines.windows(2) {
            if w[0] == "extern \"C\"" {
                let (name, params) = parse_shim_signature(w[1]).ok_or("bad shim")?;
                ensure(shims.insert(name.clone(), params).is_none(), || format!("duplicate shim {}", name))?;
            }
        }
        let construct = format!("cpp_{}_construct", c);
        ensure(tramps.remove(&construct).is_some() && shims.remove(&construct).is_some(), || {
            format!("missing construct pair for {}", c)
        })?;
        let translated: Vec<&MethodDescriptor> = d.translated_methods().collect();
        ensure(tramps.len() == translated.len() && shims.len() == translated.len(), || {
            format!(
                "{}: {} methods, {} trampolines, {} shims",
                c,
                translated.len(),
                tramps.len(),
                shims.len()
            )
        })?;
        for m in translated {
            let mangled = format!("cpp_{}_{}", c, m.name);
            let (tparams, objc_decl) = tramps.get(&mangled).ok_or(format!("no trampoline {}", mangled))?;
            let sparams = shims.get(&mangled).ok_or(format!("no shim {}", mangled))?;
            ensure(tparams == sparams, || format!("{}: parameter types differ", mangled))?;
            let mut want = vec![normalized_tokens(&format!("{} *", c))];
            match m.passing_mode {
                PassingMode::Varargs => {
                    want.push(normalized_tokens(&m.params[0].ty.render()));
                    want.push(normalized_tokens("va_list *"));
                }
                _ => want.extend(m.params.iter().map(|p| normalized_tokens(&p.ty.render()))),
            }
            ensure(*tparams == want, || {
                format!("{}: shim parameters {:?}, method {:?}", mangled, tparams, want)
            })?;
            if m.passing_mode == PassingMode::Standard {
                let colons = objc_decl.matches(':').count();
                ensure(colons == m.params.len(), || {
                    format!("{}: {} colons for {} params", objc_decl, colons, m.params.len())
                })?;
            }
            checked += 1;
        }
    }
    Ok(format!("{} trampoline/shim pairs consistent", checked))
}

fn snapshot(dir: &Path) -> BTreeMap<String, (Vec<u8>, SystemTime)> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            let meta = e.metadata().unwrap();
            (
                e.file_name().into_string().unwrap(),
                (fs::read(e.path()).unwrap(), meta.modified().unwrap()),
            )
        })
        .collect()
}

fn criterion_6() -> Check {
    let dir = out_dir("c6");
    let d = dir.path().to_str().unwrap();
    let header = golden("myCounter.h");
    let h = header.to_str().unwrap();
    let first = run(&["pipeline", h, "--out-dir", d]);
    ensure(first.status.success(), || "first run failed".into())?;
    let before = snapshot(dir.path());
    let second = run(&["pipeline", h, "--out-dir", d]);
    ensure(second.status.success(), || "second run failed".into())?;
    ensure(first.stdout == second.stdout, || "trace differs between runs".into())?;
    ensure(snapshot(dir.path()) == before, || "rerun changed output bytes or rewrote files".into())?;

    let other = out_dir("c6b");
    let o = other.path().to_str().unwrap();
    run(&["pipeline", h, "--out-dir", o]);
    for (name, (bytes, _)) in &before {
        ensure(fs::read(other.path().join(name)).ok().as_ref() == Some(bytes), || {
            format!("{} differs between output directories", name)
        })?;
    }

    let bad = dir.path().join("bad.h");
    fs::write(
        &bad,
        "class myCounter : public objc_obj {\npublic:\n  int f(int a);\n  int f(double b);\n};\n",
    )
    .unwrap();
    let before = snapshot(dir.path());
    let out = run(&["pipeline", bad.to_str().unwrap(), "--out-dir", d]);
    ensure(out.status.code() == Some(1), || format!("exit {:?}", out.status.code()))?;
    let err = String::from_utf8_lossy(&out.stderr);
    ensure(err.contains("bad.h:4: error") && err.contains("f"), || format!("stderr: {}", err))?;
    ensure(snapshot(dir.path()) == before, || "erroring run modified the output directory".into())?;

    let fresh = dir.path().join("never");
    let out = run(&["translate", bad.to_str().unwrap(), "--out-dir", fresh.to_str().unwrap()]);
    ensure(out.status.code() == Some(1) && !fresh.exists(), || "erroring run created output".into())?;
    Ok("byte-identical reruns; failed runs leave outputs untouched".into())
}

fn criterion_7() -> Check {
    let dir = out_dir("c7");
    let header = golden("myCounter.h");
    let out = run(&["translate", header.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into())?;
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    let want_text = expected("trace.txt");
    let want: Vec<&str> = want_text.lines().collect();
    ensure(lines.first() == want.first() && lines.get(1) == want.get(1), || "trace header".into())?;
    for w in &want[2..want.len() - 1] {
        ensure(lines.contains(w), || format!("trace lacks `{}`", w))?;
    }
    ensure(lines.last() == want.last(), || format!("trace ends with {:?}", lines.last()))?;
    let functions = lines.iter().filter(|l| l.starts_with("Translating function:")).count();
    ensure(functions == 2, || format!("{} function lines for 2 translated methods", functions))?;
    Ok(format!("{} trace lines, expected entries present", lines.len()))
}

fn make_words(text: &str, var: &str) -> Vec<String> {
    let joined = text.replace("\\\n", " ");
    joined
        .lines()
        .filter_map(|l| l.strip_prefix(var).and_then(|r| r.trim_start().strip_prefix('=')))
        .flat_map(|r| r.split_whitespace().map(str::to_string))
        .collect()
}

fn dependency_lines(text: &str) -> Vec<Vec<String>> {
    text.replace("\\\n", " ")
        .lines()
        .filter(|l| !l.starts_with(['#', '\t', ' ', '.']) && l.contains(": ") && !l.contains('='))
        .map(normalized_tokens)
        .collect()
}

fn criterion_8() -> Check {
    let dir = out_dir("c8");
    let d = dir.path().to_str().unwrap();
    let out = run(&["emit-build", "--class", "myCounter", "--out-dir", d]);
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into())?;
    let forward = read(dir.path(), "Makefile");
    tokens_equal("forward Makefile", &forward, &expected("Makefile.myCounter"))?;

    let renamed = run(&["emit-build", "--class", "Foo", "--out-dir", d]);
    ensure(renamed.status.success(), || "emit-build Foo failed".into())?;
    let foo = read(dir.path(), "Makefile");
    ensure(foo == forward.replace("myCounter", "Foo"), || "rename is not a pure substitution".into())?;

    let conf = golden("heatbug.conf");
    let out = run(&["emit-build", "--direction", "reverse", "--config", conf.to_str().unwrap(), "--out-dir", d]);
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into())?;
    let reverse = read(dir.path(), "Makefile");
    let want_text = expected("Makefile.Heatbug");
    for var in ["CPPOBJ", "OBJCOBJ", "OBJECTS"] {
        let want = make_words(&want_text, var);
        let got = make_words(&reverse, var);
        ensure(got.starts_with(&want), || format!("{}: {:?} vs {:?}", var, got, want))?;
    }
    let got_deps = dependency_lines(&reverse);
    for dep in dependency_lines(&want_text) {
        ensure(got_deps.contains(&dep), || format!("missing dependency line {:?}", dep))?;
    }

    let cfg = ToolConfig::parse(&fs::read_to_string(&conf).unwrap()).map_err(|e| e.to_string())?;
    let fwd = forward_plan("myCounter", &ToolConfig::default());
    fwd.check_closure().map_err(|m| format!("forward plan not closed: {:?}", m))?;
    for f in ["myCounter.cd", "myCounter.mh", "myCounter.m", "myCounterExportCpp.cc"] {
        ensure(fwd.mentions(f), || format!("forward plan never mentions {}", f))?;
    }
    let rev = reverse_plan("Heatbug", &cfg);
    rev.check_closure().map_err(|m| format!("reverse plan not closed: {:?}", m))?;
    for f in ["Heatbug.h", "HeatbugTypes.h", "HeatbugExportCpp.cc", "HeatbugExportObjc.m", "HeatbugBridge.m"] {
        ensure(rev.mentions(f), || format!("reverse plan never mentions {}", f))?;
    }
    Ok("forward plan matches the expected text; reverse lists and dependencies present; both closed".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("myCounter golden set", criterion_1),
        ("Heatbug golden set", criterion_2),
        ("passing-mode partition vs brute-force oracle", criterion_3),
        ("class description round trip", criterion_4),
        ("three-artifact consistency", criterion_5),
        ("determinism and no partial writes", criterion_6),
        ("translation trace fidelity", criterion_7),
        ("build-plan golden and closure", criterion_8),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(detail) => println!("criterion {} PASS: {} ({})", i + 1, name, detail),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL: {}: {}", i + 1, name, why);
            }
        }
    }
    if failed > 0 {
        println!("{} of {} criteria failed", failed, criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
