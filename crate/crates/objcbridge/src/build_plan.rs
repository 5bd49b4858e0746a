//! Makefile text for building mixed C++/Objective-C applications.
//!
//! The forward plan compiles a C++ model together with its generated
//! Objective-C interface; the reverse plan adds a C++ half to an existing
//! host application. Rules the host framework already provides are kept in
//! the plan, for the closure check, but rendered as comments.

use std::collections::{BTreeMap, BTreeSet};

use crate::config::ToolConfig;

/// The suffixes registered with `make`; `.xm` is carried along unused.
pub const SUFFIXES: &str = ".SUFFIXES: .o .m .mo .mh .cd .cc .xm";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    /// A suffix pattern such as `.m.mo`, or a target name.
    pub target: String,
    pub prerequisites: Vec<String>,
    pub recipe: Vec<String>,
    /// Supplied by the host build environment; rendered as a comment.
    pub external: bool,
}

impl Rule {
    fn new(target: &str, prerequisites: &[&str], recipe: &[&str]) -> Rule {
        Rule {
            target: target.to_string(),
            prerequisites: prerequisites.iter().map(|s| s.to_string()).collect(),
            recipe: recipe.iter().map(|s| s.to_string()).collect(),
            external: false,
        }
    }

    fn external(mut self) -> Rule {
        self.external = true;
        self
    }

    /// `(from, to)` extensions of a suffix rule, e.g. `(".m", ".mo")`.
    fn suffix_pair(&self) -> Option<(&str, &str)> {
        let t = self.target.strip_prefix('.')?;
        let dot = t.find('.')?;
        Some((&self.target[..dot + 1], &t[dot..]))
    }

    fn render(&self, out: &mut String) {
        let prefix = if self.external { "# " } else { "" };
        out.push_str(prefix);
        out.push_str(&self.target);
        out.push(':');
        for p in &self.prerequisites {
            out.push(' ');
            out.push_str(p);
        }
        out.push('\n');
        for r in &self.recipe {
            out.push_str(prefix);
            out.push('\t');
            out.push_str(r);
            out.push('\n');
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    /// Appends with `+=` instead of assigning.
    pub append: bool,
    /// Continuation lines; the words of all lines form the value.
    pub lines: Vec<String>,
}

impl Variable {
    fn new(name: &str, words: &[String]) -> Variable {
        Variable {
            name: name.to_string(),
            append: false,
            lines: vec![words.join(" ")],
        }
    }

    fn words(&self) -> impl Iterator<Item = &str> {
        self.lines.iter().flat_map(|l| l.split_whitespace())
    }

    fn render(&self, out: &mut String) {
        out.push_str(&self.name);
        out.push_str(if self.append { " += " } else { "=" });
        for (i, l) in self.lines.iter().enumerate() {
            if i > 0 {
                out.push_str(" \\\n\t");
            }
            out.push_str(l);
        }
        out.push('\n');
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BuildPlan {
    pub suffix_rules: Vec<Rule>,
    pub object_lists: Vec<Variable>,
    pub link_rule: Option<Rule>,
    pub dependency_edges: Vec<(String, Vec<String>)>,
    pub clean_rule: Option<Rule>,
    /// Files written by hand, or by this tool before `make` runs.
    pub sources: Vec<String>,
    /// Files a rule writes besides its target: `(target, extras)`.
    pub side_outputs: Vec<(String, Vec<String>)>,
}

impl BuildPlan {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.suffix_rules {
            r.render(&mut out);
        }
        if !self.suffix_rules.is_empty() {
            out.push('\n');
        }
        for v in &self.object_lists {
            v.render(&mut out);
        }
        if let Some(l) = &self.link_rule {
            l.render(&mut out);
        }
        out.push('\n');
        for (target, prereqs) in &self.dependency_edges {
            out.push_str(target);
            out.push(':');
            for p in prereqs {
                out.push(' ');
                out.push_str(p);
            }
            out.push('\n');
        }
        if let Some(c) = &self.clean_rule {
            out.push('\n');
            c.render(&mut out);
        }
        out
    }

    /// Whether `file` is a target or prerequisite of some dependency line.
    pub fn mentions(&self, file: &str) -> bool {
        self.dependency_edges
            .iter()
            .any(|(t, ps)| t == file || ps.iter().any(|p| p == file))
    }

    fn expand(&self, word: &str, out: &mut Vec<String>, depth: usize) {
        let var = word.strip_prefix("$(").and_then(|w| w.strip_suffix(')'));
        match var {
            Some(name) if depth < 16 => {
                for v in self.object_lists.iter().filter(|v| v.name == name) {
                    for w in v.words() {
                        self.expand(w, out, depth + 1);
                    }
                }
            }
            _ => out.push(word.to_string()),
        }
    }

    /// Files the link rule consumes, with variables expanded.
    pub fn link_inputs(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(l) = &self.link_rule {
            for p in &l.prerequisites {
                self.expand(p, &mut out, 0);
            }
        }
        out
    }

    /// Checks that every link input can be produced from the declared
    /// sources by the plan's rules. Returns the files that cannot.
    pub fn check_closure(&self) -> Result<(), Vec<String>> {
        let edges: BTreeMap<&str, Vec<&str>> = {
            let mut m: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
            for (t, ps) in &self.dependency_edges {
                m.entry(t).or_default().extend(ps.iter().map(String::as_str));
            }
            m
        };
        let mut memo: BTreeMap<String, bool> = BTreeMap::new();
        let missing: Vec<String> = self
            .link_inputs()
            .into_iter()
            .filter(|f| !self.producible(f, &edges, &mut memo, &mut BTreeSet::new()))
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(missing)
        }
    }

    fn producible(
        &self,
        file: &str,
        edges: &BTreeMap<&str, Vec<&str>>,
        memo: &mut BTreeMap<String, bool>,
        visiting: &mut BTreeSet<String>,
    ) -> bool {
        if let Some(&b) = memo.get(file) {
            return b;
        }
        if self.sources.iter().any(|s| s == file) {
            return true;
        }
        if !visiting.insert(file.to_string()) {
            return false;
        }
        let by_side_output = self
            .side_outputs
            .iter()
            .filter(|(_, extras)| extras.iter().any(|e| e == file))
            .map(|(t, _)| t.clone())
            .collect::<Vec<_>>();
        let mut ok = by_side_output
            .iter()
            .any(|t| self.producible(t, edges, memo, visiting));
        if !ok {
            let prereqs_ok = edges.get(file).map_or(true, |ps| {
                ps.iter().all(|p| self.producible(p, edges, memo, visiting))
            });
            ok = prereqs_ok
                && self.suffix_rules.iter().any(|r| match r.suffix_pair() {
                    Some((from, to)) => file.strip_suffix(to).is_some_and(|stem| {
                        let src = format!("{}{}", stem, from);
                        self.producible(&src, edges, memo, visiting)
                    }),
                    None => false,
                });
        }
        visiting.remove(file);
        memo.insert(file.to_string(), ok);
        ok
    }
}

fn words(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// Makefile for a C++ model with a generated Objective-C interface.
pub fn forward_plan(class: &str, config: &ToolConfig) -> BuildPlan {
    let c = class;
    let app = config.application.as_str();
    let cd = format!("{c}.cd");
    let mh = format!("{c}.mh");
    let m = format!("{c}.m");
    let h = format!("{c}.h");
    let cc = format!("{c}.cc");
    let o = format!("{c}.o");
    let mo = format!("{c}.mo");
    let export_cc = format!("{c}ExportCpp.cc");
    let export_o = format!("{c}ExportCpp.o");
    let suffix_rules = vec![
        Rule::new(".h.cd", &[], &["classdesc -objc writeobjc < $< > $@"]),
        Rule::new(
            ".h.mh",
            &[],
            &[
                &format!("$(CPP) -g -c {cc}"),
                &format!("$(CPP) -g -DCNAME={c} -o write_objc $(CPPOBJ) $(OBJC_TRANSLATOR)"),
                "write_objc",
            ],
        ),
        Rule::new(".m.mo", &[], &["$(CC) -c -o $@ -Wno-import $(CFLAGS) $<"]),
        Rule::new(".m.o", &[], &["$(CC) -c -Wno-import $(CFLAGS) $<"]),
        Rule::new(".cc.o", &[], &["$(CPP) -g -c $(OPTFLAGS) $<"]),
    ];
    let libs = Variable {
        name: "LIBS".to_string(),
        append: false,
        lines: config.compiler_paths.libs.clone(),
    };
    let object_lists = vec![
        libs,
        Variable::new("OBJC_cd", &[cd.clone()]),
        Variable::new("OBJC_mh", &[mh.clone()]),
        Variable::new("CPPOBJ", &[o.clone()]),
        Variable::new("INTERFACE_OBJ", &[export_o.clone()]),
        Variable::new("OBJC_TRANSLATOR", &words(&["write_objc.cc"])),
        Variable::new("OBJCOBJ", &["main.o".to_string(), mo.clone()]),
        Variable::new("OBJ", &words(&["$(OBJCOBJ)", "$(CPPOBJ)", "$(INTERFACE_OBJ)"])),
    ];
    let link_rule = Rule::new(
        "appl",
        &["$(OBJC_cd)", "$(OBJC_mh)", "$(OBJ)"],
        &[&format!("$(CPP) $(CFLAGS) -o {app} $(OBJ) $(LIBS)")],
    );
    let main_deps = if config.main_deps.is_empty() {
        words(&["main.m"])
    } else {
        config.main_deps.clone()
    };
    let dependency_edges = vec![
        ("main.o".to_string(), main_deps.clone()),
        (cd.clone(), vec![h.clone()]),
        (mo.clone(), vec![mh.clone(), m.clone()]),
        (o.clone(), vec![h.clone(), cc.clone()]),
        (export_o, vec![h.clone(), export_cc.clone()]),
        (mh.clone(), vec![h.clone(), cc.clone()]),
    ];
    let clean_rule = Rule::new(
        "clean",
        &[],
        &[
            &format!("rm -f *.o *.mo *.*~ *~ {app} *.cd *,D"),
            &format!("rm {export_cc} write_objc {mh} {m}"),
        ],
    );
    let mut sources = vec![h, cc];
    sources.extend(main_deps);
    BuildPlan {
        suffix_rules,
        object_lists,
        link_rule: Some(link_rule),
        dependency_edges,
        clean_rule: Some(clean_rule),
        sources,
        side_outputs: vec![(mh, vec![m, export_cc])],
    }
}

/// Which optional reverse-direction files exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReverseExtras {
    pub types_header: bool,
    pub selector_exports: bool,
}

impl ReverseExtras {
    pub fn from_config(config: &ToolConfig) -> ReverseExtras {
        ReverseExtras {
            types_header: !config.typedef_specs.is_empty(),
            selector_exports: !config.selector_exports.is_empty(),
        }
    }
}

/// Makefile additions for a host application with one class moved to C++.
pub fn reverse_plan(class: &str, config: &ToolConfig) -> BuildPlan {
    let c = class;
    let extras = ReverseExtras::from_config(config);
    let export_objc_o = format!("{c}ExportObjc.o");
    let export_objc_m = format!("{c}ExportObjc.m");
    let mut objc_objects = vec![format!("{c}.mo")];
    objc_objects.extend(config.host_objects.iter().cloned());
    if !config.host_objects.iter().any(|o| o == "main.o") {
        objc_objects.push("main.o".to_string());
    }
    if extras.selector_exports {
        objc_objects.push(export_objc_o.clone());
    }
    let mut objcobj = Variable::new("OBJCOBJ", &[]);
    objcobj.lines = objc_objects.chunks(3).map(|ch| ch.join(" ")).collect();
    let object_lists = vec![
        Variable::new("CPPOBJ", &[format!("{c}.o")]),
        objcobj,
        Variable::new("OBJECTS", &words(&["$(OBJCOBJ)", "$(CPPOBJ)"])),
        Variable::new("INTERFACE_OBJ", &[format!("{c}ExportCpp.o")]),
        Variable {
            name: "OBJECTS".to_string(),
            append: true,
            lines: vec!["$(INTERFACE_OBJ)".to_string()],
        },
    ];
    let suffix_rules = vec![
        Rule::new(
            ".m.o",
            &[],
            &["$(OBJC) -c $(OBJCFLAGS) $(CPPFLAGS) $(SWARMINCLUDES) $<"],
        )
        .external(),
        Rule::new(
            ".m.mo",
            &[],
            &["$(OBJC) -c -o $@ $(OBJCFLAGS) $(CPPFLAGS) $(DLLCPPFLAGS) $(EXTRACPPFLAGS) $(SWARMINCLUDES) $<"],
        )
        .external(),
        Rule::new(".cc.o", &[], &["$(CPP) -g -c $(OPTFLAGS) $<"]).external(),
    ];
    let link_rule = Rule::new(
        "$(APPEXE)",
        &["$(OBJECTS)"],
        &["$(SHELL) $(bindir)/libtool-swarm --mode link $(CPP) $(CFLAGS) $(LDFLAGS) -o $@ $(OBJECTS) $(LIBS)"],
    )
    .external();

    let main_deps = if config.main_deps.is_empty() {
        vec!["main.m".to_string(), format!("{c}.mh")]
    } else {
        config.main_deps.clone()
    };
    let mut dependency_edges = vec![
        ("main.o".to_string(), main_deps.clone()),
        (format!("{c}.mo"), vec![format!("{c}.m"), format!("{c}.mh")]),
        (format!("{c}.o"), vec![format!("{c}.cc"), format!("{c}.h")]),
        (
            format!("{c}ExportCpp.o"),
            vec![format!("{c}ExportCpp.cc"), format!("{c}.h")],
        ),
    ];
    if extras.selector_exports {
        dependency_edges.push((export_objc_o, vec![export_objc_m.clone()]));
    }
    dependency_edges.push((format!("{c}.mo"), vec![format!("{c}Bridge.m")]));
    if extras.types_header {
        dependency_edges.push((format!("{c}.h"), vec![format!("{c}Types.h")]));
    }

    let mut sources = vec![
        format!("{c}.mh"),
        format!("{c}.m"),
        format!("{c}.cc"),
        format!("{c}.h"),
        format!("{c}ExportCpp.cc"),
        format!("{c}Bridge.m"),
    ];
    if extras.types_header {
        sources.push(format!("{c}Types.h"));
    }
    if extras.selector_exports {
        sources.push(export_objc_m);
        sources.push(format!("{c}ExportObjc.h"));
    }
    for obj in objc_objects.iter().filter(|o| o.ends_with(".o")) {
        let stem = &obj[..obj.len() - 2];
        if !(extras.selector_exports && stem == format!("{c}ExportObjc")) {
            sources.push(format!("{stem}.m"));
        }
    }
    for d in main_deps {
        if !sources.contains(&d) {
            sources.push(d);
        }
    }
    BuildPlan {
        suffix_rules,
        object_lists,
        link_rule: Some(link_rule),
        dependency_edges,
        clean_rule: None,
        sources,
        side_outputs: Vec::new(),
    }
}

/// The changes a host build environment needs: a C++ compiler setting,
/// the extra suffix rules, and linking with the C++ driver.
pub fn environment_fragment(config: &ToolConfig) -> String {
    let mut out = String::new();
    out.push_str("# Makefile.common: the C++ compiler\n");
    out.push_str(&format!("CPP={}\n\n", config.compiler_paths.cpp));
    out.push_str("# Makefile.rule: .m.mo and .cc.o rules\n");
    out.push_str(SUFFIXES);
    out.push('\n');
    Rule::new(
        ".m.mo",
        &[],
        &["$(OBJC) -c -o $@ $(OBJCFLAGS) $(CPPFLAGS) $(DLLCPPFLAGS) $(EXTRACPPFLAGS) $(SWARMINCLUDES) $<"],
    )
    .render(&mut out);
    Rule::new(".cc.o", &[], &["$(CPP) -g -c $(OPTFLAGS) $<"]).render(&mut out);
    out.push_str("\n# Makefile.appl: link with the C++ driver\n");
    Rule::new(
        "$(APPEXE)",
        &["$(OBJECTS)"],
        &["$(SHELL) $(bindir)/libtool-swarm --mode link $(CPP) $(CFLAGS) $(LDFLAGS) -o $@ $(OBJECTS) $(LIBS)"],
    )
    .render(&mut out);
    out
}
