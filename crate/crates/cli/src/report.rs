//! Deterministic JSON reports.

use std::collections::BTreeMap;
use std::io;

use kcompound::certify::{Certificate, Evidence};
use kcompound::Matrix64;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Map, Value};

/// Pretty JSON with every float printed with 17 significant digits.
struct Fixed17<'a>(PrettyFormatter<'a>);

impl Formatter for Fixed17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn end_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_key(w)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes with sorted keys (maps are ordered) and fixed float formatting.
pub fn to_json_string(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fixed17(PrettyFormatter::with_indent(b"  ")));
    v.serialize(&mut ser).expect("in-memory serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Finite floats as numbers, anything else as a string.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or_else(|| Value::String(v.to_string()), Value::Number)
}

pub fn vector(v: &[f64]) -> Value {
    Value::Array(v.iter().copied().map(num).collect())
}

pub fn matrix(a: &Matrix64) -> Value {
    Value::Array((0..a.rows()).map(|i| vector(a.row(i))).collect())
}

pub fn certificate(c: &Certificate<f64>) -> Value {
    let mut witness = Map::new();
    let w = &c.witness;
    if let Some(t) = &w.scaling {
        witness.insert("scaling".into(), matrix(t));
    }
    if let Some(d) = &w.weights {
        witness.insert("weights".into(), vector(d));
    }
    if let Some(i) = w.worst_index {
        witness.insert("worst_index".into(), json!(i));
    }
    if let Some((t, x)) = &w.worst_sample {
        witness.insert("worst_sample".into(), json!({ "t": num(*t), "x": vector(x) }));
    }
    if let Some(d) = w.determinant {
        witness.insert("determinant".into(), num(d));
    }
    if let Some(v) = w.violations {
        witness.insert("violations".into(), json!(v));
    }
    let evidence = match &c.evidence {
        Evidence::Exact => json!({ "kind": "exact" }),
        Evidence::Sampled { times, states } => json!({ "kind": "sampled", "times": times, "states": states }),
    };
    json!({
        "method": c.method.name(),
        "k": c.k,
        "p": c.p.map(|p| p.to_string()),
        "bound": num(c.bound),
        "rate_eta": num(c.rate_eta),
        "requested_eta": num(c.requested_eta),
        "passed": c.passed,
        "evidence": evidence,
        "witness": Value::Object(witness),
    })
}

/// Outcome a command reports through its exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Pass,
    Fail,
}

impl Status {
    pub fn from_pass(passed: bool) -> Self {
        if passed {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Pass => "pass",
            Status::Fail => "fail",
        }
    }
}

/// Everything a command prints on stdout.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub args: Map<String, Value>,
    /// Input role to SHA-256 of the file bytes.
    pub inputs: BTreeMap<String, String>,
    pub results: Value,
    pub status: Status,
    /// Wall-clock seconds; left out unless requested so reports stay reproducible.
    pub timing: Option<f64>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            args: Map::new(),
            inputs: BTreeMap::new(),
            results: Value::Null,
            status: Status::Ok,
            timing: None,
        }
    }

    pub fn arg(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.args.insert(key.into(), v.into());
        self
    }

    pub fn input(&mut self, role: &str, digest: &str) -> &mut Self {
        self.inputs.insert(role.into(), digest.into());
        self
    }

    pub fn to_value(&self) -> Value {
        let mut v = json!({
            "command": { "name": self.command, "args": Value::Object(self.args.clone()) },
            "inputs": self.inputs,
            "results": self.results,
            "status": self.status.label(),
            "versions": { "kcompound": kcompound::VERSION, "kcompound-cli": env!("CARGO_PKG_VERSION") },
        });
        if let Some(t) = self.timing {
            v["timing"] = json!({ "elapsed_s": num(t) });
        }
        v
    }

    pub fn render(&self) -> String {
        to_json_string(&self.to_value())
    }
}
