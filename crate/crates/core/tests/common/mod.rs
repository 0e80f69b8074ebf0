//! Seeded fixture generators shared by the integration and acceptance tests.
//!
//! Every generator is a pure function of its seed. Names and literal values
//! are randomized, literal kinds and statement shapes are not.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sugarmine::calibration::KotlinSugar;
use sugarmine::catalog::CatalogIdiom;
use sugarmine::frontend::{build_file, MethodCfg, MethodRef};
use sugarmine::mining::MiningGraph;

const WORDS: [&str; 16] = [
    "alpha", "bravo", "cargo", "delta", "ember", "fable", "gamma", "harbor", "ivory", "jolly", "kayak", "lumen",
    "maple", "nectar", "orbit", "pixel",
];

/// Identifier source that never repeats within one fixture.
pub struct Names {
    rng: ChaCha8Rng,
    counter: usize,
}

impl Names {
    pub fn new(seed: u64) -> Self {
        Names { rng: ChaCha8Rng::seed_from_u64(seed), counter: 0 }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Lower-camel identifier such as `mapleOrbit17`.
    pub fn var(&mut self) -> String {
        self.counter += 1;
        let a = WORDS.choose(&mut self.rng).unwrap();
        let b = WORDS.choose(&mut self.rng).unwrap();
        let mut b = b.to_string();
        b[..1].make_ascii_uppercase();
        format!("{a}{b}{}", self.counter)
    }

    /// Upper-camel user class name.
    pub fn class(&mut self) -> String {
        let mut v = self.var();
        v[..1].make_ascii_uppercase();
        v
    }

    pub fn int(&mut self) -> i64 {
        self.rng.gen_range(2..10_000)
    }

    pub fn text(&mut self) -> String {
        let n = self.rng.gen_range(1..4);
        (0..n).map(|_| *WORDS.choose(&mut self.rng).unwrap()).collect::<Vec<_>>().join(" ")
    }
}

/// Generated method plus the facts known by construction.
#[derive(Debug, Clone)]
pub struct Method {
    pub name: String,
    pub body: String,
}

fn method(name: String, body: String) -> Method {
    Method { name, body }
}

// ---------------------------------------------------------------- idioms

pub fn idiom_method(idiom: CatalogIdiom, n: &mut Names) -> Method {
    let m = n.var();
    let body = match idiom {
        CatalogIdiom::MultipleAssignment => {
            let (p, f1, f2, f3, call) = (n.var(), n.var(), n.var(), n.var(), n.var());
            let (k, s) = (n.int(), n.text());
            format!(
                "    void {m}(int {p}) {{\n        {f1} = {p};\n        {f2} = {k};\n        {f3} = \"{s}\";\n        {call}({p});\n    }}\n"
            )
        }
        CatalogIdiom::MultipleIncrement => {
            let (p, v) = (n.var(), n.var());
            format!("    int {m}(int {p}) {{\n        int {v} = {p};\n        {v}++;\n        {v}++;\n        return {v};\n    }}\n")
        }
        CatalogIdiom::Unless => {
            let (p, call) = (n.var(), n.var());
            format!("    void {m}(boolean {p}) {{\n        if (!{p}) {{\n            {call}();\n        }}\n    }}\n")
        }
        CatalogIdiom::AnyAll => {
            let (a, b, c) = (n.var(), n.var(), n.var());
            let (x, y, z) = (n.int(), n.int(), n.int());
            format!(
                "    boolean {m}(int {a}, int {b}, int {c}) {{\n        if ({a} > {x} || {b} > {y} || {c} > {z}) {{\n            return true;\n        }}\n        return false;\n    }}\n"
            )
        }
        CatalogIdiom::NullIfNull => {
            let p = n.var();
            format!("    String {m}(String {p}) {{\n        if ({p} == null) {{\n            return null;\n        }}\n        return {p}.trim();\n    }}\n")
        }
        CatalogIdiom::RequireType => {
            let (p, cls, call, s) = (n.var(), n.class(), n.var(), n.text());
            format!(
                "    void {m}(Object {p}) {{\n        if ({p} instanceof {cls}) {{\n            {call}({p});\n        }} else {{\n            throw new IllegalArgumentException(\"{s}\");\n        }}\n    }}\n"
            )
        }
        CatalogIdiom::Rethrow => {
            let (call, exc, e) = (n.var(), n.class(), n.var());
            format!(
                "    void {m}() throws Exception {{\n        try {{\n            {call}();\n        }} catch ({exc} {e}) {{\n            throw {e};\n        }}\n    }}\n"
            )
        }
    };
    method(m, body)
}

/// Three separate UNLESS instances in one method.
pub fn triple_unless(n: &mut Names) -> Method {
    let m = n.var();
    let (a, b, c) = (n.var(), n.var(), n.var());
    let (x, y, z) = (n.var(), n.var(), n.var());
    let body = format!(
        "    void {m}(boolean {a}, boolean {b}, boolean {c}) {{\n        if (!{a}) {{\n            {x}();\n        }}\n        if (!{b}) {{\n            {y}();\n        }}\n        if (!{c}) {{\n            {z}();\n        }}\n    }}\n"
    );
    method(m, body)
}

/// Methods free of every catalog idiom and every calibration sugar.
pub fn filler_method(n: &mut Names) -> Method {
    let m = n.var();
    let body = match n.rng().gen_range(0..3) {
        0 => {
            let (p, v, call) = (n.var(), n.var(), n.var());
            let (k, j) = (n.int(), n.int());
            format!("    int {m}(int {p}) {{\n        int {v} = {p} * {k};\n        {call}({v});\n        return {v} + {j};\n    }}\n")
        }
        1 => {
            let (p, x, call) = (n.var(), n.var(), n.var());
            format!(
                "    void {m}(java.util.List<String> {p}) {{\n        for (String {x} : {p}) {{\n            {call}({x});\n        }}\n    }}\n"
            )
        }
        _ => {
            let (p, q, call) = (n.var(), n.var(), n.var());
            let k = n.int();
            format!(
                "    long {m}(long {p}, long {q}) {{\n        while ({p} < {q}) {{\n            {p} = {p} + {k};\n        }}\n        {call}({p}, {q});\n        return {p};\n    }}\n"
            )
        }
    };
    method(m, body)
}

pub fn getter_method(n: &mut Names) -> Method {
    let (m, f) = (n.var(), n.var());
    method(m.clone(), format!("    int {m}() {{\n        return this.{f};\n    }}\n"))
}

/// Java files with the methods distributed over classes of `per_class`
/// methods each, in order.
pub fn into_files(methods: &[Method], per_class: usize, n: &mut Names) -> Vec<(String, String)> {
    methods
        .chunks(per_class)
        .map(|chunk| {
            let cls = n.class();
            let mut src = format!("package fixture;\n\npublic class {cls} {{\n");
            for m in chunk {
                src.push('\n');
                src.push_str(&m.body);
            }
            src.push_str("}\n");
            (format!("fixture/{cls}.java"), src)
        })
        .collect()
}

pub fn write_files(root: &Path, files: &[(String, String)]) {
    for (rel, text) in files {
        let path = root.join(rel);
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(path, text).unwrap();
    }
}

/// CFGs of all files, in file order.
pub fn build_all(files: &[(String, String)]) -> Vec<MethodCfg> {
    files
        .iter()
        .flat_map(|(rel, text)| {
            let (cfgs, warnings) = build_file(rel, text);
            assert!(warnings.is_empty(), "fixture {rel} produced warnings: {warnings:?}");
            cfgs
        })
        .collect()
}

pub fn method_name(r: &MethodRef) -> &str {
    r.method_signature.split('(').next().unwrap()
}

#[derive(Debug, Clone)]
pub struct PlantedCorpus {
    pub files: Vec<(String, String)>,
    /// Methods containing each idiom, by construction.
    pub planted: BTreeMap<CatalogIdiom, usize>,
    /// Method name to its planted idiom.
    pub idiom_of: BTreeMap<String, CatalogIdiom>,
    /// Name of the method holding three UNLESS instances.
    pub triple: String,
    pub methods: usize,
}

/// `per_idiom` methods for each of the seven idioms (one UNLESS method holds
/// three instances), `fillers` idiom-free methods and `getters` trivial
/// getters, shuffled and packed eight to a class.
pub fn planted_corpus(seed: u64, per_idiom: usize, fillers: usize, getters: usize) -> PlantedCorpus {
    let mut n = Names::new(seed);
    let mut methods = Vec::new();
    let mut idiom_of = BTreeMap::new();
    for idiom in CatalogIdiom::ALL {
        for k in 0..per_idiom {
            let m = if idiom == CatalogIdiom::Unless && k == 0 { triple_unless(&mut n) } else { idiom_method(idiom, &mut n) };
            idiom_of.insert(m.name.clone(), idiom);
            methods.push(m);
        }
    }
    let triple = methods[per_idiom * 2].name.clone();
    methods.extend((0..fillers).map(|_| filler_method(&mut n)));
    methods.extend((0..getters).map(|_| getter_method(&mut n)));
    let total = methods.len();
    methods.shuffle(n.rng());
    let files = into_files(&methods, 8, &mut n);
    PlantedCorpus {
        files,
        planted: CatalogIdiom::ALL.iter().map(|&i| (i, per_idiom)).collect(),
        idiom_of,
        triple,
        methods: total,
    }
}

// ----------------------------------------------------------- calibration

pub fn sugar_method(sugar: KotlinSugar, n: &mut Names) -> Method {
    let m = n.var();
    let body = match sugar {
        KotlinSugar::StringInterpolation => {
            let (p, v, s) = (n.var(), n.var(), n.text());
            format!("    String {m}(String {p}) {{\n        String {v} = \"{s}: \" + {p};\n        return {v};\n    }}\n")
        }
        KotlinSugar::Elvis => {
            let (p, s) = (n.var(), n.text());
            format!("    String {m}(String {p}) {{\n        if ({p} == null) {{\n            {p} = \"{s}\";\n        }}\n        return {p};\n    }}\n")
        }
        KotlinSugar::GetterSetter => {
            let f = n.var();
            if n.rng().gen_bool(0.5) {
                format!("    int {m}() {{\n        return this.{f};\n    }}\n")
            } else {
                let p = n.var();
                format!("    void {m}(int {p}) {{\n        this.{f} = {p};\n    }}\n")
            }
        }
        KotlinSugar::NotNullAssertion => {
            let (p, call) = (n.var(), n.var());
            format!(
                "    void {m}(Object {p}) {{\n        if ({p} == null) {{\n            throw new NullPointerException();\n        }}\n        {call}({p});\n    }}\n"
            )
        }
    };
    method(m, body)
}

/// Shape near-misses that no calibration detector may accept.
pub fn negative_method(n: &mut Names, variant: usize) -> Method {
    let m = n.var();
    let body = match variant % 4 {
        0 => {
            let (p, call) = (n.var(), n.var());
            format!("    void {m}(Object {p}) {{\n        if ({p} == null) {{\n            {call}();\n        }}\n    }}\n")
        }
        1 => {
            let (v, a, b, call) = (n.var(), n.text(), n.text(), n.var());
            format!("    void {m}() {{\n        String {v} = \"{a}\" + \"{b}\";\n        {call}({v});\n    }}\n")
        }
        2 => {
            let (f, k) = (n.var(), n.int());
            format!("    int {m}() {{\n        return this.{f} + {k};\n    }}\n")
        }
        _ => {
            let (f, k) = (n.var(), n.int());
            format!("    void {m}() {{\n        this.{f} = {k};\n    }}\n")
        }
    };
    method(m, body)
}

#[derive(Debug, Clone)]
pub struct CalibrationCorpus {
    pub files: Vec<(String, String)>,
    pub sugar_of: BTreeMap<String, KotlinSugar>,
    pub negatives: Vec<String>,
    pub methods: usize,
}

/// `total` methods: `plants[i]` instances of `KotlinSugar::ALL[i]`,
/// `negatives` near-misses and idiom-free fillers for the rest.
pub fn calibration_corpus(seed: u64, total: usize, plants: [usize; 4], negatives: usize) -> CalibrationCorpus {
    let mut n = Names::new(seed);
    let mut methods = Vec::new();
    let mut sugar_of = BTreeMap::new();
    for (sugar, count) in KotlinSugar::ALL.into_iter().zip(plants) {
        for _ in 0..count {
            let m = sugar_method(sugar, &mut n);
            sugar_of.insert(m.name.clone(), sugar);
            methods.push(m);
        }
    }
    let mut negative_names = Vec::new();
    for k in 0..negatives {
        let m = negative_method(&mut n, k);
        negative_names.push(m.name.clone());
        methods.push(m);
    }
    assert!(methods.len() <= total);
    while methods.len() < total {
        methods.push(filler_method(&mut n));
    }
    methods.shuffle(n.rng());
    let files = into_files(&methods, 10, &mut n);
    CalibrationCorpus { files, sugar_of, negatives: negative_names, methods: total }
}

// ------------------------------------------------------------ graph dbs

pub const NODE_LABELS: [&str; 4] = ["A", "B", "C", "D"];
pub const EDGE_LABELS: [&str; 2] = ["x", "y"];
pub const THRESHOLDS: [f64; 4] = [0.34, 0.5, 0.66, 1.0];

/// Random database within the oracle's limits: at most 8 graphs of at most
/// 6 nodes and 8 edges over at most 4 node and 2 edge labels.
pub fn random_db(rng: &mut ChaCha8Rng) -> Vec<MiningGraph> {
    let graphs = rng.gen_range(1..=8);
    let node_labels = rng.gen_range(1..=4);
    let edge_labels = rng.gen_range(1..=2);
    (0..graphs)
        .map(|gi| {
            let n = rng.gen_range(1..=6);
            let labels = (0..n).map(|_| NODE_LABELS[rng.gen_range(0..node_labels)].to_string()).collect();
            let m = if n > 1 { rng.gen_range(0..=8) } else { 0 };
            let edges = (0..m)
                .filter_map(|_| {
                    let a = rng.gen_range(0..n);
                    let b = rng.gen_range(0..n);
                    (a != b).then(|| (a, b, EDGE_LABELS[rng.gen_range(0..edge_labels)].to_string()))
                })
                .collect();
            graph(&format!("G{gi}"), labels, edges)
        })
        .collect()
}

pub fn graph(name: &str, labels: Vec<String>, edges: Vec<(usize, usize, String)>) -> MiningGraph {
    MiningGraph {
        method: MethodRef { file_path: format!("{name}.java"), method_signature: "m()".into(), method_index: 0 },
        node_ids: (0..labels.len()).collect(),
        labels,
        edges,
    }
}

// ------------------------------------------------------- mutation pairs

/// Method templates over placeholders: `$vN` local or parameter names,
/// `$cN` user class names, `$iN` int literals, `$sN` string literals,
/// `$fN` field names and `$mN` called method names.
pub const TEMPLATES: [&str; 8] = [
    "void run(int $v0, String $v1) { int $v2 = $v0 + $i0; String $v3 = $v1 + \"$s0\"; $m0($v2, $v3); }",
    "int run($c0 $v0) { if ($v0 == null) { return $i0; } int $v1 = $v0.$m0(); return $v1 * $i1; }",
    "void run(java.util.List<$c0> $v0) { for ($c0 $v1 : $v0) { if ($v1.$m0() > $i0) { $m1($v1); } } }",
    "String run(String $v0) { String $v1 = $v0 != null ? $v0 : \"$s0\"; $f0 = $v1; return $v1; }",
    "void run(Object $v0) { if ($v0 instanceof $c0) { $m0(($c0) $v0); } else { throw new $c1(\"$s0\"); } }",
    "void run(int $v0) { try { $m0($v0, \"$s0\"); } catch ($c0 $v1) { $m1($v1); throw $v1; } }",
    "int run(int $v0, int $v1) { int $v2 = $i0; while ($v2 < $v0) { $v2++; $v1 += $i1; } return $v1 - $v2; }",
    "void run($c0 $v0) { $c1 $v1 = new $c1($v0, \"$s0\", $i0); $v1.$m0(); $f0 = $v1; $f1 = \"$s1\"; }",
];

/// Concrete values for every placeholder kind.
#[derive(Debug, Clone)]
pub struct Binding {
    pub vars: Vec<String>,
    pub classes: Vec<String>,
    pub ints: Vec<i64>,
    pub strings: Vec<String>,
    pub fields: Vec<String>,
    pub calls: Vec<String>,
}

impl Binding {
    pub fn random(n: &mut Names) -> Self {
        Binding {
            vars: (0..4).map(|_| n.var()).collect(),
            classes: (0..2).map(|_| n.class()).collect(),
            ints: (0..2).map(|_| n.int()).collect(),
            strings: (0..2).map(|_| n.text()).collect(),
            fields: (0..2).map(|_| n.var()).collect(),
            calls: (0..2).map(|_| n.var()).collect(),
        }
    }

    pub fn instantiate(&self, template: &str) -> String {
        let mut out = template.to_string();
        let subst = |out: &mut String, tag: char, values: &[String]| {
            for (k, v) in values.iter().enumerate() {
                *out = out.replace(&format!("${tag}{k}"), v);
            }
        };
        subst(&mut out, 'v', &self.vars);
        subst(&mut out, 'c', &self.classes);
        subst(&mut out, 'i', &self.ints.iter().map(|i| i.to_string()).collect::<Vec<_>>());
        subst(&mut out, 's', &self.strings);
        subst(&mut out, 'f', &self.fields);
        subst(&mut out, 'm', &self.calls);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    RenameVariables,
    RenameClasses,
    ChangeLiterals,
}

pub const MUTATIONS: [Mutation; 3] = [Mutation::RenameVariables, Mutation::RenameClasses, Mutation::ChangeLiterals];

/// Source pair differing only by `mutation`.
pub fn mutation_pair(template: &str, mutation: Mutation, n: &mut Names) -> (String, String) {
    let base = Binding::random(n);
    let mut other = base.clone();
    let fresh = Binding::random(n);
    match mutation {
        Mutation::RenameVariables => {
            other.vars = fresh.vars;
            other.fields = fresh.fields;
            other.calls = fresh.calls;
        }
        Mutation::RenameClasses => other.classes = fresh.classes,
        Mutation::ChangeLiterals => {
            other.ints = fresh.ints;
            other.strings = fresh.strings;
        }
    }
    (base.instantiate(template), other.instantiate(template))
}

pub fn method_ref(name: &str) -> MethodRef {
    MethodRef { file_path: format!("{name}.java"), method_signature: "run()".into(), method_index: 0 }
}
