//! JSON encodings. Rationals are strings (`"3"`, `"3/2"`), series use the
//! text form `1*t^(1/2)+O(t^(4))`, and every report carries
//! `"schema_version"`.

use almostperiods_core::eldiv::EldivSeq;
use almostperiods_core::koszul::LineModule;
use almostperiods_core::matrix::Matrix;
use almostperiods_core::module::{Factor, Flag, ModuleMap, TorsionModule};
use almostperiods_core::rational::{check_input_size, fmt_q_short, parse_q, qi};
use almostperiods_core::witt::{WittRing, WittVector};
use almostperiods_core::zpm::{ModuleType, ZpmMatrix};
use almostperiods_core::{BaseRing, Error, ModelParams, Puiseux, Result, Q};
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u64 = 1;

pub fn q_str(x: Q) -> String {
    fmt_q_short(x)
}

pub fn bad(what: &str) -> Error {
    Error::Parse(what.to_string())
}

pub fn parse_q_value(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => parse_q(s),
        Value::Number(n) => {
            check_input_size(n.as_i64().map(qi).ok_or_else(|| bad("rational must be an integer or \"a/b\""))?)
        }
        _ => Err(bad("rational must be a string \"a/b\"")),
    }
}

fn get_u32(v: &Value, key: &str, default: u32) -> Result<u32> {
    match v.get(key) {
        None => Ok(default),
        Some(x) => x
            .as_u64()
            .and_then(|x| u32::try_from(x).ok())
            .ok_or_else(|| bad(&format!("{key} must be a small nonnegative integer"))),
    }
}

/// `{"p", "s", "L", "N", "m", "d"}`; all but `p` optional.
pub fn params_from_json(v: &Value) -> Result<ModelParams> {
    if !v.is_object() {
        return Err(bad("params must be an object"));
    }
    let p = v.get("p").and_then(Value::as_u64).ok_or_else(|| bad("params.p is required"))? as u32;
    let prec = match v.get("N") {
        None => qi(8),
        Some(x) => parse_q_value(x)?,
    };
    ModelParams::new(p, get_u32(v, "s", 1)?, get_u32(v, "L", 1)?, prec, get_u32(v, "m", 2)?, get_u32(v, "d", 1)?)
}

pub fn params_json(p: &ModelParams) -> Value {
    json!({"p": p.p, "s": p.s, "L": p.level, "N": q_str(p.prec), "m": p.m, "d": p.d})
}

pub fn series_from_json(base: BaseRing, v: &Value) -> Result<Puiseux> {
    match v {
        Value::String(s) => Puiseux::parse(base, s),
        Value::Number(_) => Puiseux::parse(base, &v.to_string()),
        _ => Err(bad("series must be a string such as \"1*t^(1/2)+t\"")),
    }
}

/// The `"entries"` member of an object, or the value itself.
fn unwrap_field<'a>(v: &'a Value, key: &str) -> &'a Value {
    v.get(key).unwrap_or(v)
}

/// `{"rows": k, "cols": l, "entries": [[...]]}` or a bare array of rows.
pub fn matrix_from_json(base: BaseRing, v: &Value) -> Result<Matrix> {
    let rows = unwrap_field(v, "entries").as_array().ok_or_else(|| bad("matrix must be an array of rows"))?;
    let declared = |key: &str| v.get(key).and_then(Value::as_u64).map(|x| x as usize);
    let cols = rows.first().and_then(Value::as_array).map_or(0, Vec::len);
    let cols = if rows.is_empty() { declared("cols").unwrap_or(0) } else { cols };
    if declared("rows").is_some_and(|r| r != rows.len()) || declared("cols").is_some_and(|c| c != cols) {
        return Err(Error::ShapeMismatch("declared shape differs from entries".into()));
    }
    let mut data = Vec::with_capacity(rows.len() * cols);
    for r in rows {
        let r = r.as_array().ok_or_else(|| bad("matrix rows must be arrays"))?;
        if r.len() != cols {
            return Err(Error::ShapeMismatch("ragged matrix rows".into()));
        }
        for x in r {
            data.push(series_from_json(base, x)?);
        }
    }
    Matrix::new(base, rows.len(), cols, data)
}

pub fn matrix_json(m: &Matrix) -> Value {
    let entries: Vec<Value> =
        (0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(|x| json!(x.to_string())).collect())).collect();
    json!({"rows": m.rows(), "cols": m.cols(), "entries": entries})
}

pub fn eldiv_json(s: &EldivSeq) -> Value {
    Value::Array(s.entries().iter().map(|&x| json!(q_str(x))).collect())
}

/// `{"entries": [...]}` or a bare array.
pub fn eldiv_from_json(v: &Value) -> Result<EldivSeq> {
    let a = unwrap_field(v, "entries").as_array().ok_or_else(|| bad("sequence must be an array of rationals"))?;
    EldivSeq::new(a.iter().map(parse_q_value).collect::<Result<Vec<_>>>()?)
}

/// Factors as `"γ"` (closed) or `{"gamma": "γ", "open": true}`.
pub fn module_from_json(v: &Value) -> Result<TorsionModule> {
    let a = v.as_array().ok_or_else(|| bad("module must be an array of factors"))?;
    let factors = a
        .iter()
        .map(|f| {
            if let Some(obj) = f.as_object() {
                let gamma = parse_q_value(obj.get("gamma").ok_or_else(|| bad("factor needs gamma"))?)?;
                let open = obj.get("open").and_then(Value::as_bool).unwrap_or(false);
                Ok(Factor { gamma, flag: if open { Flag::Open } else { Flag::Closed } })
            } else {
                Ok(Factor { gamma: parse_q_value(f)?, flag: Flag::Closed })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    TorsionModule::new(factors)
}

pub fn module_json(m: &TorsionModule) -> Value {
    Value::Array(
        m.factors()
            .iter()
            .map(|f| match f.flag {
                Flag::Closed => json!(q_str(f.gamma)),
                Flag::Open => json!({"gamma": q_str(f.gamma), "open": true}),
            })
            .collect(),
    )
}

/// `{"source": [...], "target": [...], "matrix": [[...]]}`.
pub fn map_from_json(base: BaseRing, v: &Value) -> Result<ModuleMap> {
    let src = module_from_json(v.get("source").ok_or_else(|| bad("map needs source"))?)?;
    let tgt = module_from_json(v.get("target").ok_or_else(|| bad("map needs target"))?)?;
    let mat = match v.get("matrix") {
        Some(m) if m.as_array().is_some_and(|a| !a.is_empty()) => matrix_from_json(base, m)?,
        _ => Matrix::zeros(base, tgt.len(), src.len()),
    };
    ModuleMap::new(src, tgt, mat)
}

pub fn map_json(f: &ModuleMap) -> Value {
    json!({"source": module_json(f.source()), "target": module_json(f.target()), "matrix": matrix_json(f.matrix())})
}

pub fn zpm_from_json(p: u32, m: u32, v: &Value) -> Result<ZpmMatrix> {
    let rows = unwrap_field(v, "entries").as_array().ok_or_else(|| bad("matrix must be an array of rows"))?;
    let rows = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| bad("matrix rows must be arrays"))?
                .iter()
                .map(|x| x.as_i64().ok_or_else(|| bad("entries must be integers")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    ZpmMatrix::from_rows(p, m, &rows)
}

pub fn zpm_json(a: &ZpmMatrix) -> Value {
    json!({"p": a.p, "m": a.m, "rows": a.rows, "cols": a.cols, "entries": a.to_rows()})
}

pub fn module_type_json(t: &ModuleType) -> Value {
    json!({"orders": t.orders, "free_rank": t.free_rank})
}

pub fn line_module_json(h: &LineModule) -> Value {
    json!({"orders": h.orders.iter().map(|&x| q_str(x)).collect::<Vec<_>>(), "free_rank": h.free_rank})
}

/// `{"digits": [...]}`, series strings over the digit ring.
pub fn witt_json(w: &WittVector) -> Value {
    json!({"digits": w.digits().iter().map(|d| d.to_string()).collect::<Vec<_>>()})
}

/// Digits parsed over the user ring and embedded; missing digits are zero.
pub fn witt_from_json(ring: &WittRing, v: &Value) -> Result<WittVector> {
    let a = unwrap_field(v, "digits").as_array().ok_or_else(|| bad("Witt vector must be an array of digits"))?;
    if a.len() > ring.len() {
        return Err(Error::ShapeMismatch(format!("at most {} digits", ring.len())));
    }
    let mut digits =
        a.iter().map(|d| ring.embed(&series_from_json(ring.user_base(), d)?)).collect::<Result<Vec<_>>>()?;
    while digits.len() < ring.len() {
        digits.push(Puiseux::zero(ring.base()));
    }
    ring.from_digits(digits)
}

/// Adds `schema_version` and `command` in front of a result object.
pub fn envelope(command: &str, body: Map<String, Value>) -> Value {
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    m.extend(body);
    Value::Object(m)
}
