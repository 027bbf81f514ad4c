use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use powercast::Scalar;

/// Keys whose string values are names, never scalars.
const NAME_KEYS: &[&str] = &["node", "nodes", "u", "v", "edge", "path", "sha256", "argv", "version", "turn", "kind"];

pub struct Output {
    pub body: Value,
    pub code: u8,
    /// Replaces the JSON body on stdout when set.
    pub csv: Option<String>,
}

impl Output {
    pub fn ok(body: Value) -> Self {
        Output { body, code: 0, csv: None }
    }

    pub fn with_code(body: Value, success: bool) -> Self {
        Output { body, code: if success { 0 } else { 1 }, csv: None }
    }

    pub fn emit(&self, decimal: Option<usize>) {
        let mut stdout = std::io::stdout().lock();
        if let Some(csv) = &self.csv {
            let _ = write!(stdout, "{csv}");
            return;
        }
        let mut body = self.body.clone();
        if let Some(k) = decimal {
            to_decimal(&mut body, k, false);
        }
        let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&body).expect("json renders"));
    }
}

fn to_decimal(v: &mut Value, k: usize, is_name: bool) {
    match v {
        Value::String(s) if !is_name => {
            if s.bytes().any(|b| b.is_ascii_digit()) {
                if let Ok(x) = s.parse::<Scalar>() {
                    *s = x.to_decimal(k);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|x| to_decimal(x, k, is_name)),
        Value::Object(map) => {
            for (key, x) in map.iter_mut() {
                if key != "invocation" {
                    to_decimal(x, k, NAME_KEYS.contains(&key.as_str()));
                }
            }
        }
        _ => {}
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Reads an input file and records its hash for the invocation header.
pub struct Inputs {
    files: Vec<Value>,
}

impl Inputs {
    pub fn new() -> Self {
        Inputs { files: Vec::new() }
    }

    pub fn read(&mut self, path: &Path) -> Result<String, String> {
        let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
        self.files.push(json!({ "path": path.display().to_string(), "sha256": sha256_hex(&bytes) }));
        String::from_utf8(bytes).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Puts the invocation header first, followed by the result fields.
    pub fn header(self, argv: &[String], seed: Option<u64>, result: Value) -> Value {
        let mut head = Map::new();
        head.insert("argv".into(), json!(argv));
        head.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        head.insert("inputs".into(), Value::Array(self.files));
        if let Some(s) = seed {
            head.insert("seed".into(), json!(s));
        }
        let mut out = Map::new();
        out.insert("invocation".into(), Value::Object(head));
        match result {
            Value::Object(m) => out.extend(m),
            other => {
                out.insert("result".into(), other);
            }
        }
        Value::Object(out)
    }
}
