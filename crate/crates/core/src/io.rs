//! JSON text formats for states, observables and pure-state families.
//!
//! ```text
//! state:      {"dims": [2, 2], "matrix": [[[re, im], ...], ...]}
//! observable: {"local_dim": 2, "matrix": [[[re, im], ...], ...]}
//! family:     {"dims": [2, 2], "amplitudes": [[re, im], ...]}
//! ```
//!
//! Numbers are written in shortest round-trip form, so write → parse returns
//! bit-identical values. Parsers validate with the same tolerances as the
//! in-memory constructors and name the offending field on failure.

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Dims};
use crate::observables::Observable;
use crate::scalar::{cx, Cx, Real};
use crate::states::{DensityMatrix, NoisyFamily, PureState};

fn parse_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { field: field.into(), message: message.into() }
}

fn parse_object(text: &str) -> Result<Map<String, Value>> {
    match serde_json::from_str::<Value>(text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(parse_err("<root>", "expected a JSON object")),
        Err(e) => Err(parse_err("<root>", e.to_string())),
    }
}

fn field<'a>(map: &'a Map<String, Value>, name: &str) -> Result<&'a Value> {
    map.get(name).ok_or_else(|| parse_err(name, "missing field"))
}

fn positive_int(v: &Value, path: &str) -> Result<usize> {
    match v.as_u64() {
        Some(n) if n > 0 => Ok(n as usize),
        _ => Err(parse_err(path, format!("expected a positive integer, got {v}"))),
    }
}

fn parse_dims(v: &Value) -> Result<Dims> {
    let arr = v.as_array().ok_or_else(|| parse_err("dims", "expected an array of integers"))?;
    let dims = arr
        .iter()
        .enumerate()
        .map(|(i, d)| positive_int(d, &format!("dims[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Dims::new(dims).map_err(|e| parse_err("dims", e.to_string()))
}

fn parse_complex<T: Real>(v: &Value, path: &str) -> Result<Cx<T>> {
    let pair = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| parse_err(path, "expected [re, im]"))?;
    let part = |k: usize| {
        pair[k]
            .as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| parse_err(format!("{path}[{k}]"), format!("expected a finite number, got {}", pair[k])))
    };
    Ok(cx(T::lit(part(0)?), T::lit(part(1)?)))
}

fn parse_matrix<T: Real>(v: &Value) -> Result<ComplexMatrix<T>> {
    let rows = v.as_array().ok_or_else(|| parse_err("matrix", "expected an array of rows"))?;
    let n = rows.len();
    if n == 0 {
        return Err(parse_err("matrix", "matrix has no rows"));
    }
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| parse_err(format!("matrix[{i}]"), "expected an array"))?;
        if row.len() != n {
            return Err(parse_err(format!("matrix[{i}]"), format!("row has {} entries, expected {n}", row.len())));
        }
        for (j, z) in row.iter().enumerate() {
            data.push(parse_complex(z, &format!("matrix[{i}][{j}]"))?);
        }
    }
    ComplexMatrix::from_row_major(n, data).map_err(|e| parse_err("matrix", e.to_string()))
}

fn parse_vector<T: Real>(v: &Value, name: &str) -> Result<Vec<Cx<T>>> {
    let arr = v.as_array().ok_or_else(|| parse_err(name, "expected an array of [re, im] pairs"))?;
    arr.iter().enumerate().map(|(i, z)| parse_complex(z, &format!("{name}[{i}]"))).collect()
}

fn number(x: f64) -> String {
    serde_json::to_string(&x).expect("finite f64 serializes")
}

fn write_complex<T: Real>(z: Cx<T>) -> String {
    format!("[{}, {}]", number(z.re.as_f64()), number(z.im.as_f64()))
}

fn write_matrix<T: Real>(m: &ComplexMatrix<T>) -> String {
    let rows: Vec<String> = (0..m.dim())
        .map(|i| {
            let entries: Vec<String> = m.row(i).iter().map(|&z| write_complex(z)).collect();
            format!("    [{}]", entries.join(", "))
        })
        .collect();
    format!("[\n{}\n  ]", rows.join(",\n"))
}

fn write_dims(d: &Dims) -> String {
    let parts: Vec<String> = d.as_slice().iter().map(|n| n.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

/// Parses a state file and validates it as a density matrix.
pub fn parse_state<T: Real>(text: &str) -> Result<DensityMatrix<T>> {
    let map = parse_object(text)?;
    let dims = parse_dims(field(&map, "dims")?)?;
    let matrix = parse_matrix(field(&map, "matrix")?)?;
    if dims.total() != matrix.dim() {
        return Err(parse_err(
            "dims",
            format!("product {} does not match the {}x{} matrix", dims.total(), matrix.dim(), matrix.dim()),
        ));
    }
    DensityMatrix::new(matrix, dims).map_err(|e| match e {
        Error::Parse { .. } => e,
        other => parse_err("matrix", other.to_string()),
    })
}

pub fn write_state<T: Real>(rho: &DensityMatrix<T>) -> String {
    format!("{{\n  \"dims\": {},\n  \"matrix\": {}\n}}\n", write_dims(rho.dims()), write_matrix(rho.matrix()))
}

pub fn parse_observable<T: Real>(text: &str) -> Result<Observable<T>> {
    let map = parse_object(text)?;
    let local_dim = positive_int(field(&map, "local_dim")?, "local_dim")?;
    let matrix = parse_matrix(field(&map, "matrix")?)?;
    if matrix.dim() != local_dim {
        return Err(parse_err("local_dim", format!("{local_dim} does not match the {0}x{0} matrix", matrix.dim())));
    }
    Observable::new(matrix).map_err(|e| parse_err("matrix", e.to_string()))
}

pub fn write_observable<T: Real>(op: &Observable<T>) -> String {
    format!("{{\n  \"local_dim\": {},\n  \"matrix\": {}\n}}\n", op.local_dim(), write_matrix(op.matrix()))
}

/// Parses a pure state; the white-noise family is built around it.
pub fn parse_family<T: Real>(text: &str) -> Result<NoisyFamily<T>> {
    let map = parse_object(text)?;
    let dims = parse_dims(field(&map, "dims")?)?;
    let amplitudes = parse_vector(field(&map, "amplitudes")?, "amplitudes")?;
    let psi = PureState::new(amplitudes, dims).map_err(|e| parse_err("amplitudes", e.to_string()))?;
    Ok(NoisyFamily::new(psi))
}

pub fn write_family<T: Real>(family: &NoisyFamily<T>) -> String {
    let amps: Vec<String> = family.psi().amplitudes().iter().map(|&z| write_complex(z)).collect();
    format!("{{\n  \"dims\": {},\n  \"amplitudes\": [{}]\n}}\n", write_dims(family.dims()), amps.join(", "))
}
