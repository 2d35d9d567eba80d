//! JSON input schemas and deterministic JSON output.
//!
//! Algebra: `{"dim": n, "labels": [..], "brackets": [[i, j, [k, c], ..], ..]}`
//! with 0-based indices and `i < j`. Anywhere an algebra is expected, a
//! registry name (`"so3"`, `"euclidean(2)"`) or a relative path to a `.json`
//! file may be given instead.
//!
//! Operator: `{"g": alg, "h": alg, "action": "ad" | "zero" | [matrices], "b": matrix}`
//! or `{"builtin": name}`, optionally with a `"group"` block for integration:
//! `{"g": group, "h": group, "action": "adjoint" | "trivial" | {"conjugation": "pad" | "top_left_scalar"},
//!   "radius": ρ, "analytic": registry operator}`.
//!
//! Group: a registry name or `{"name", "ambient_dim", "algebra_basis": [matrices]}`.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::group::{
    group_by_name, Conjugation, Embedding, GroupAction, MatrixGroup, TrivialAction,
};
use crate::lie::{algebra_by_name, ActionPhi, LieAlgebra};
use crate::linalg::Matrix;
use crate::rbo::{builtin, ModifiedR, RelRbo};

pub const SCHEMA: &str = "rbo-lab/1";

fn perr(at: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{at}: {msg}"))
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| perr(&path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| perr(&path.display().to_string(), e))
}

fn as_usize(v: &Value, at: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| perr(at, "expected a non-negative integer"))
}

fn as_f64(v: &Value, at: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| perr(at, "expected a number"))
}

pub fn parse_matrix(v: &Value, at: &str) -> Result<Matrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| perr(at, "expected a list of rows"))?;
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let at = format!("{at}[{i}]");
            r.as_array()
                .ok_or_else(|| perr(&at, "expected a row"))?
                .iter()
                .enumerate()
                .map(|(j, x)| as_f64(x, &format!("{at}[{j}]")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Ok(Matrix::zeros(0, 0));
    }
    Matrix::from_rows(&rows).map_err(|e| perr(at, e))
}

fn parse_matrices(v: &Value, at: &str) -> Result<Vec<Matrix>> {
    v.as_array()
        .ok_or_else(|| perr(at, "expected a list of matrices"))?
        .iter()
        .enumerate()
        .map(|(i, m)| parse_matrix(m, &format!("{at}[{i}]")))
        .collect()
}

/// Algebra from the bracket schema.
pub fn parse_algebra(v: &Value, at: &str) -> Result<LieAlgebra> {
    let dim = as_usize(
        v.get("dim").ok_or_else(|| perr(at, "missing \"dim\""))?,
        &format!("{at}.dim"),
    )?;
    let labels = match v.get("labels") {
        None => (0..dim).map(|i| format!("e{i}")).collect(),
        Some(l) => {
            let l = l
                .as_array()
                .ok_or_else(|| perr(at, "\"labels\" must be a list"))?;
            l.iter()
                .map(|s| {
                    s.as_str()
                        .map(String::from)
                        .ok_or_else(|| perr(at, "labels must be strings"))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let mut entries = Vec::new();
    let brackets = match v.get("brackets") {
        None => Vec::new(),
        Some(b) => b
            .as_array()
            .ok_or_else(|| perr(at, "\"brackets\" must be a list"))?
            .clone(),
    };
    for (n, e) in brackets.iter().enumerate() {
        let at = format!("{at}.brackets[{n}]");
        let e = e
            .as_array()
            .ok_or_else(|| perr(&at, "expected [i, j, [k, c], ...]"))?;
        if e.len() < 2 {
            return Err(perr(&at, "expected [i, j, [k, c], ...]"));
        }
        let (i, j) = (as_usize(&e[0], &at)?, as_usize(&e[1], &at)?);
        let terms = e[2..]
            .iter()
            .map(|t| match t.as_array().map(Vec::as_slice) {
                Some([k, c]) => Ok((as_usize(k, &at)?, as_f64(c, &at)?)),
                _ => Err(perr(&at, "terms must be [k, coeff]")),
            })
            .collect::<Result<Vec<_>>>()?;
        entries.push((i, j, terms));
    }
    LieAlgebra::from_brackets(dim, labels, &entries).map_err(|e| perr(at, e))
}

pub fn algebra_to_json(a: &LieAlgebra) -> Value {
    let brackets: Vec<Value> = a
        .bracket_entries()
        .into_iter()
        .map(|(i, j, terms)| {
            let mut row = vec![Value::from(i), Value::from(j)];
            row.extend(
                terms
                    .into_iter()
                    .map(|(k, c)| Value::from(vec![Value::from(k), Value::from(c)])),
            );
            Value::from(row)
        })
        .collect();
    serde_json::json!({ "dim": a.dim(), "labels": a.labels(), "brackets": brackets })
}

fn resolve(base: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Registry name, relative `.json` path, or inline object.
pub fn algebra_ref(v: &Value, base: &Path, at: &str) -> Result<LieAlgebra> {
    match v {
        Value::String(s) if s.ends_with(".json") => {
            let path = resolve(base, s);
            parse_algebra(&read_json(&path)?, &path.display().to_string())
        }
        Value::String(s) => algebra_by_name(s).map_err(|e| perr(at, e)),
        Value::Object(_) => parse_algebra(v, at),
        _ => Err(perr(
            at,
            "expected a registry name, a path or an algebra object",
        )),
    }
}

pub fn parse_action(v: &Value, g: &LieAlgebra, h: &LieAlgebra, at: &str) -> Result<ActionPhi> {
    match v {
        Value::String(s) if s == "ad" => {
            if g != h {
                return Err(perr(at, "\"ad\" needs h = g"));
            }
            Ok(ActionPhi::adjoint(g))
        }
        Value::String(s) if s == "zero" => Ok(ActionPhi::zero(g, h)),
        Value::Array(_) => {
            ActionPhi::new(g.clone(), h.clone(), parse_matrices(v, at)?).map_err(|e| perr(at, e))
        }
        _ => Err(perr(
            at,
            "action must be \"ad\", \"zero\" or a list of matrices",
        )),
    }
}

/// Group-level data attached to an operator for integration.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    pub g: MatrixGroup,
    pub h: MatrixGroup,
    pub action: Arc<dyn GroupAction>,
    pub radius: f64,
    /// Registry name of a known analytic group operator integrating this one.
    pub analytic: Option<String>,
}

pub fn parse_group(v: &Value, base: &Path, at: &str) -> Result<MatrixGroup> {
    match v {
        Value::String(s) if s.ends_with(".json") => {
            let path = resolve(base, s);
            parse_group(&read_json(&path)?, base, &path.display().to_string())
        }
        Value::String(s) => group_by_name(s).map_err(|e| perr(at, e)),
        Value::Object(o) => {
            let name = o
                .get("name")
                .and_then(Value::as_str)
                .unwrap_or("group")
                .to_string();
            let n = as_usize(
                o.get("ambient_dim")
                    .ok_or_else(|| perr(at, "missing \"ambient_dim\""))?,
                at,
            )?;
            let basis = parse_matrices(
                o.get("algebra_basis")
                    .ok_or_else(|| perr(at, "missing \"algebra_basis\""))?,
                at,
            )?;
            let labels = (0..basis.len()).map(|i| format!("e{i}")).collect();
            MatrixGroup::new(name, n, basis, labels).map_err(|e| perr(at, e))
        }
        _ => Err(perr(at, "expected a registry name or a group descriptor")),
    }
}

pub fn parse_group_action(
    v: &Value,
    g: &MatrixGroup,
    h: &MatrixGroup,
    at: &str,
) -> Result<Arc<dyn GroupAction>> {
    let embedding = match v {
        Value::String(s) if s == "trivial" => return Ok(Arc::new(TrivialAction)),
        Value::String(s) if s == "adjoint" => Embedding::Identity,
        Value::Object(o) => match o.get("conjugation").and_then(Value::as_str) {
            Some("identity") => Embedding::Identity,
            Some("pad") => Embedding::PadIdentity,
            Some("top_left_scalar") => Embedding::TopLeftScalar,
            _ => {
                return Err(perr(
                    at,
                    "conjugation must be \"identity\", \"pad\" or \"top_left_scalar\"",
                ))
            }
        },
        _ => {
            return Err(perr(
                at,
                "group action must be \"adjoint\", \"trivial\" or {\"conjugation\": ..}",
            ))
        }
    };
    if embedding == Embedding::Identity && g.ambient_dim() != h.ambient_dim() {
        return Err(perr(at, "adjoint action needs equal ambient dimensions"));
    }
    Ok(Arc::new(Conjugation {
        embedding,
        target_dim: h.ambient_dim(),
    }))
}

fn parse_group_spec(v: &Value, base: &Path, at: &str) -> Result<GroupSpec> {
    let g = parse_group(
        v.get("g").ok_or_else(|| perr(at, "missing \"g\""))?,
        base,
        &format!("{at}.g"),
    )?;
    let h = match v.get("h") {
        Some(h) => parse_group(h, base, &format!("{at}.h"))?,
        None => g.clone(),
    };
    let action = parse_group_action(
        v.get("action").unwrap_or(&Value::from("adjoint")),
        &g,
        &h,
        &format!("{at}.action"),
    )?;
    let radius = match v.get("radius") {
        Some(r) => as_f64(r, &format!("{at}.radius"))?,
        None => crate::group::DEFAULT_RADIUS,
    };
    let analytic = v.get("analytic").and_then(Value::as_str).map(String::from);
    Ok(GroupSpec {
        g,
        h,
        action,
        radius,
        analytic,
    })
}

/// An operator file after parsing.
#[derive(Clone, Debug)]
pub struct RboInput {
    pub name: String,
    pub rbo: RelRbo,
    pub group: Option<GroupSpec>,
}

pub fn parse_rbo(v: &Value, base: &Path, at: &str) -> Result<RboInput> {
    let name = v
        .get("name")
        .and_then(Value::as_str)
        .unwrap_or(at)
        .to_string();
    let rbo = if let Some(b) = v.get("builtin") {
        let b = b
            .as_str()
            .ok_or_else(|| perr(at, "\"builtin\" must be a name"))?;
        builtin(b).map_err(|e| perr(at, e))?
    } else {
        let g = algebra_ref(
            v.get("g").ok_or_else(|| perr(at, "missing \"g\""))?,
            base,
            &format!("{at}.g"),
        )?;
        let h = match v.get("h") {
            Some(h) => algebra_ref(h, base, &format!("{at}.h"))?,
            None => g.clone(),
        };
        let phi = parse_action(
            v.get("action").unwrap_or(&Value::from("ad")),
            &g,
            &h,
            &format!("{at}.action"),
        )?;
        let b = parse_matrix(
            v.get("b").ok_or_else(|| perr(at, "missing \"b\""))?,
            &format!("{at}.b"),
        )?;
        let b = if b.rows() == 0 {
            Matrix::zeros(g.dim(), h.dim())
        } else {
            b
        };
        RelRbo::new(phi, b).map_err(|e| perr(at, e))?
    };
    let group = match v.get("group") {
        Some(gs) => Some(parse_group_spec(gs, base, &format!("{at}.group"))?),
        None => None,
    };
    Ok(RboInput { name, rbo, group })
}

pub fn load_rbo(path: &Path) -> Result<RboInput> {
    let v = read_json(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("operator");
    let mut input = parse_rbo(&v, base, &path.display().to_string())?;
    if v.get("name").is_none() {
        input.name = stem.to_string();
    }
    Ok(input)
}

pub fn rbo_to_json(o: &RelRbo) -> Value {
    let action: Value = if o.phi.is_adjoint(0.0) {
        Value::from("ad")
    } else {
        Value::from(
            o.phi
                .mats
                .iter()
                .map(|m| serde_json::to_value(m).unwrap_or(Value::Null))
                .collect::<Vec<_>>(),
        )
    };
    serde_json::json!({
        "g": algebra_to_json(o.g()),
        "h": algebra_to_json(o.h()),
        "action": action,
        "b": serde_json::to_value(&o.b).unwrap_or(Value::Null),
    })
}

/// `{"g": alg, "r": matrix}`
pub fn parse_modified_r(v: &Value, base: &Path, at: &str) -> Result<ModifiedR> {
    let g = algebra_ref(
        v.get("g").ok_or_else(|| perr(at, "missing \"g\""))?,
        base,
        &format!("{at}.g"),
    )?;
    let r = parse_matrix(
        v.get("r").ok_or_else(|| perr(at, "missing \"r\""))?,
        &format!("{at}.r"),
    )?;
    ModifiedR::new(g, r).map_err(|e| perr(at, e))
}

struct SignificantDigits;

impl serde_json::ser::Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + std::io::Write>(
        &mut self,
        w: &mut W,
        value: f64,
    ) -> std::io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + std::io::Write>(
        &mut self,
        w: &mut W,
        value: f32,
    ) -> std::io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

/// Compact JSON with every float printed to 17 significant digits; non-finite
/// values become `null`.
pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SignificantDigits);
    v.serialize(&mut ser)
        .map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(out).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra_roundtrip() {
        for name in ["so3", "euclidean(3)", "up2"] {
            let a = algebra_by_name(name).unwrap();
            let back = parse_algebra(&algebra_to_json(&a), "x").unwrap();
            assert_eq!(back.constants_distance(&a), 0.0);
            assert_eq!(back.labels(), a.labels());
        }
    }

    #[test]
    fn rbo_roundtrip() {
        for name in ["line_up2", "euclidean(2)", "gauss(2)"] {
            let o = builtin(name).unwrap();
            let back = parse_rbo(&rbo_to_json(&o), Path::new("."), "x")
                .unwrap()
                .rbo;
            assert_eq!(back, o);
        }
    }

    #[test]
    fn malformed_inputs_are_parse_errors() {
        let cases = [
            serde_json::json!({"dim": 2, "brackets": [[0, 1, [5, 1.0]]]}),
            serde_json::json!({"dim": "two"}),
            serde_json::json!({"dim": 2, "brackets": [[0]]}),
            serde_json::json!({"dim": 2, "brackets": [[0, 1, [0]]]}),
        ];
        for c in cases {
            assert!(
                matches!(parse_algebra(&c, "x"), Err(Error::Parse(_))),
                "{c}"
            );
        }
        let bad = serde_json::json!({"g": "so3", "b": [[1.0, 0.0]]});
        assert!(matches!(
            parse_rbo(&bad, Path::new("."), "x"),
            Err(Error::Parse(_))
        ));
        let bad = serde_json::json!({"g": "nonsense", "b": []});
        assert!(matches!(
            parse_rbo(&bad, Path::new("."), "x"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn floats_have_seventeen_digits() {
        let s =
            to_json(&serde_json::json!({"x": 0.1, "y": [1.0, -2.5e-7], "z": f64::NAN})).unwrap();
        assert_eq!(
            s,
            r#"{"x":1.0000000000000001e-1,"y":[1.0000000000000000e0,-2.4999999999999999e-7],"z":null}"#
        );
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["x"].as_f64().unwrap(), 0.1);
    }

    #[test]
    fn group_spec_parses() {
        let v = serde_json::json!({
            "builtin": "line_up2",
            "group": {"g": "up2", "h": "line", "action": {"conjugation": "top_left_scalar"}, "radius": 0.3, "analytic": "up2"}
        });
        let inp = parse_rbo(&v, Path::new("."), "x").unwrap();
        let gs = inp.group.unwrap();
        assert_eq!(gs.h.dim(), 1);
        assert_eq!(gs.analytic.as_deref(), Some("up2"));
        let desc = serde_json::json!({"name": "line", "ambient_dim": 2, "algebra_basis": [[[0.0, 1.0], [0.0, 0.0]]]});
        assert_eq!(parse_group(&desc, Path::new("."), "x").unwrap().dim(), 1);
    }
}
