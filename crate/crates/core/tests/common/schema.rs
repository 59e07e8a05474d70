//! Just enough of JSON Schema to check reports against `schema/report.json`.
//! Keywords outside the supported set make the check fail loudly, so the
//! schema cannot grow past what is actually verified.

use serde_json::Value;

const IGNORED: [&str; 5] = ["$schema", "$id", "title", "description", "$defs"];

pub fn load() -> Value {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../schema/report.json");
    serde_json::from_str(&std::fs::read_to_string(path).expect("schema file")).expect("schema is JSON")
}

/// All violations, as `path: reason`.
pub fn validate(schema: &Value, doc: &Value) -> Vec<String> {
    let mut errs = Vec::new();
    check(schema, schema, doc, "$", &mut errs);
    errs
}

fn resolve<'a>(root: &'a Value, r: &str) -> &'a Value {
    let ptr = r.strip_prefix('#').unwrap_or_else(|| panic!("only local refs are supported: {r}"));
    root.pointer(ptr).unwrap_or_else(|| panic!("dangling ref {r}"))
}

fn type_ok(t: &str, v: &Value) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64(),
        other => panic!("unknown type {other}"),
    }
}

fn check(root: &Value, s: &Value, v: &Value, at: &str, errs: &mut Vec<String>) {
    let obj = s.as_object().unwrap_or_else(|| panic!("schema at {at} is not an object"));
    for (key, sub) in obj {
        match key.as_str() {
            k if IGNORED.contains(&k) => {}
            "$ref" => check(root, resolve(root, sub.as_str().unwrap()), v, at, errs),
            "oneOf" => {
                let hits = sub.as_array().unwrap().iter().filter(|alt| validate_at(root, alt, v, at)).count();
                if hits != 1 {
                    errs.push(format!("{at}: matches {hits} oneOf branches"));
                }
            }
            "type" => {
                let ok = match sub {
                    Value::String(t) => type_ok(t, v),
                    Value::Array(ts) => ts.iter().any(|t| type_ok(t.as_str().unwrap(), v)),
                    _ => panic!("bad type keyword"),
                };
                if !ok {
                    errs.push(format!("{at}: expected type {sub}, got {v}"));
                }
            }
            "const" if v != sub => errs.push(format!("{at}: expected {sub}")),
            "enum" if !sub.as_array().unwrap().contains(v) => errs.push(format!("{at}: {v} not in {sub}")),
            "const" | "enum" => {}
            "required" => {
                if let Some(o) = v.as_object() {
                    for k in sub.as_array().unwrap() {
                        if !o.contains_key(k.as_str().unwrap()) {
                            errs.push(format!("{at}: missing {k}"));
                        }
                    }
                }
            }
            "properties" => {
                if let Some(o) = v.as_object() {
                    for (k, ps) in sub.as_object().unwrap() {
                        if let Some(x) = o.get(k) {
                            check(root, ps, x, &format!("{at}.{k}"), errs);
                        }
                    }
                }
            }
            "additionalProperties" => {
                let Some(o) = v.as_object() else { continue };
                let known = obj.get("properties").and_then(Value::as_object);
                for (k, x) in o {
                    if known.is_some_and(|p| p.contains_key(k)) {
                        continue;
                    }
                    match sub {
                        Value::Bool(false) => errs.push(format!("{at}: unexpected key {k}")),
                        Value::Bool(true) => {}
                        s => check(root, s, x, &format!("{at}.{k}"), errs),
                    }
                }
            }
            "items" => {
                if let Some(a) = v.as_array() {
                    for (i, x) in a.iter().enumerate() {
                        check(root, sub, x, &format!("{at}[{i}]"), errs);
                    }
                }
            }
            "minItems" | "maxItems" => {
                if let Some(a) = v.as_array() {
                    let n = sub.as_u64().unwrap() as usize;
                    if (key == "minItems" && a.len() < n) || (key == "maxItems" && a.len() > n) {
                        errs.push(format!("{at}: {key} {n}, got {}", a.len()));
                    }
                }
            }
            "minimum" | "maximum" | "exclusiveMinimum" => {
                if let Some(x) = v.as_f64() {
                    let b = sub.as_f64().unwrap();
                    let ok = match key.as_str() {
                        "minimum" => x >= b,
                        "maximum" => x <= b,
                        _ => x > b,
                    };
                    if !ok {
                        errs.push(format!("{at}: {x} violates {key} {b}"));
                    }
                }
            }
            other => panic!("unsupported schema keyword {other} at {at}"),
        }
    }
}

fn validate_at(root: &Value, s: &Value, v: &Value, at: &str) -> bool {
    let mut e = Vec::new();
    check(root, s, v, at, &mut e);
    e.is_empty()
}
