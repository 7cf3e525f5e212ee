//! Canonical JSON: sorted keys, compact separators, and integers outside
//! the 53-bit range written as decimal strings.

use serde_json::{json, Map, Value};

use crate::cohomology::{CohomologyTable, PushforwardDatum};
use crate::collections::{Block, CollectionObject, ExceptionalCollection, Provenance, Shape};
use crate::divisors::Rational;
use crate::error::{Error, Result};
use crate::fan::{StackyFan, Wall};
use crate::lattice::IntMatrix;
use crate::mmp::{FiberData, MmpStep, StepKind, StratumData, WallRelation};
use crate::verify::VerificationReport;

const SAFE: i64 = 1 << 53;

pub fn int(v: i64) -> Value {
    if v.abs() > SAFE {
        Value::String(v.to_string())
    } else {
        Value::from(v)
    }
}

pub fn ints(v: &[i64]) -> Value {
    Value::Array(v.iter().map(|x| int(*x)).collect())
}

fn indices(v: &[usize]) -> Value {
    Value::Array(v.iter().map(|x| Value::from(*x as u64)).collect())
}

fn rational(q: &Rational) -> Value {
    Value::String(q.to_string())
}

fn parse_rational(v: &Value) -> Result<Rational> {
    let s = v
        .as_str()
        .ok_or_else(|| Error::Format(format!("expected a rational string, got {v}")))?;
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: i64 = n
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("bad rational {s:?}")))?;
    let d: i64 = d
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("bad rational {s:?}")))?;
    if d == 0 {
        return Err(Error::Format(format!("zero denominator in {s:?}")));
    }
    Ok(crate::divisors::rational(n, d))
}

pub fn parse_int(v: &Value) -> Result<i64> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .ok_or_else(|| Error::Format(format!("{n} is not an integer"))),
        Value::String(s) => s.parse().map_err(|_| Error::Format(format!("{s:?} is not an integer"))),
        _ => Err(Error::Format(format!("expected an integer, got {v}"))),
    }
}

fn parse_ints(v: &Value) -> Result<Vec<i64>> {
    v.as_array()
        .ok_or_else(|| Error::Format(format!("expected an array, got {v}")))?
        .iter()
        .map(parse_int)
        .collect()
}

fn parse_indices(v: &Value) -> Result<Vec<usize>> {
    parse_ints(v)?
        .into_iter()
        .map(|i| usize::try_from(i).map_err(|_| Error::Format(format!("negative index {i}"))))
        .collect()
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::Format(format!("missing field {key:?}")))
}

pub fn to_canonical_string(v: &Value) -> String {
    // serde_json maps are ordered by key unless `preserve_order` is enabled.
    serde_json::to_string(v).expect("JSON values always serialize")
}

pub fn fan_to_value(fan: &StackyFan) -> Value {
    json!({
        "dim": fan.dim,
        "rays": Value::Array(fan.rays.iter().map(|r| ints(r)).collect()),
        "mult": ints(&fan.mult),
        "max_cones": Value::Array(fan.max_cones.iter().map(|c| indices(c)).collect()),
    })
}

pub fn fan_to_json(fan: &StackyFan) -> String {
    to_canonical_string(&fan_to_value(fan))
}

pub fn fan_from_value(v: &Value) -> Result<StackyFan> {
    let dim = usize::try_from(parse_int(field(v, "dim")?)?).map_err(|_| Error::Format("negative dimension".into()))?;
    let rays = field(v, "rays")?
        .as_array()
        .ok_or_else(|| Error::Format("rays must be an array".into()))?
        .iter()
        .map(parse_ints)
        .collect::<Result<Vec<_>>>()?;
    let mult = match v.get("mult") {
        Some(m) => parse_ints(m)?,
        None => vec![1; rays.len()],
    };
    let cones = field(v, "max_cones")?
        .as_array()
        .ok_or_else(|| Error::Format("max_cones must be an array".into()))?
        .iter()
        .map(parse_indices)
        .collect::<Result<Vec<_>>>()?;
    Ok(StackyFan::new(dim, rays, mult, cones))
}

pub fn fan_from_json(s: &str) -> Result<StackyFan> {
    fan_from_value(&serde_json::from_str(s)?)
}

pub fn table_to_value(t: &CohomologyTable) -> Value {
    json!({ "dims": t.dims })
}

fn matrix(m: &IntMatrix) -> Value {
    match m.to_i64_rows() {
        Ok(rows) => Value::Array(rows.iter().map(|r| ints(r)).collect()),
        Err(_) => Value::Array(
            (0..m.rows())
                .map(|r| Value::Array(m.row(r).iter().map(|x| Value::String(x.to_string())).collect()))
                .collect(),
        ),
    }
}

fn option_indices(v: &[Option<usize>]) -> Value {
    Value::Array(
        v.iter()
            .map(|x| x.map_or(Value::Null, |i| Value::from(i as u64)))
            .collect(),
    )
}

pub fn relation_to_value(rel: &WallRelation) -> Value {
    json!({
        "involved": indices(&rel.involved),
        "a": ints(&rel.a),
        "r": ints(&rel.r),
        "alpha": rel.alpha,
        "beta": rel.beta,
        "deg_kb": rational(&rel.deg_kb),
    })
}

fn wall_to_value(w: &Wall) -> Value {
    json!({ "wall_rays": indices(&w.wall_rays), "side_a": w.side_a, "side_b": w.side_b })
}

fn fiber_to_value(f: &FiberData) -> Value {
    json!({
        "fiber_rays": indices(&f.fiber_rays),
        "base": fan_to_value(&f.base),
        "proj": matrix(&f.proj),
        "s": ints(&f.s),
        "ray_map": option_indices(&f.ray_map),
    })
}

fn stratum_to_value(s: &StratumData) -> Value {
    json!({
        "stratum": indices(&s.star.stratum),
        "star": fan_to_value(&s.star.fan),
        "adjacent": indices(&s.star.adjacent),
        "t": ints(&s.star.t),
        "abar": ints(&s.abar),
        "t_gcd": int(s.t),
        "fibration": fiber_to_value(&s.fiber),
    })
}

pub fn step_to_value(step: &MmpStep) -> Value {
    let mut m = Map::new();
    m.insert("kind".into(), Value::from(step.name()));
    m.insert("source".into(), fan_to_value(&step.source));
    m.insert("class".into(), ints(&step.class));
    m.insert(
        "walls".into(),
        Value::Array(step.walls.iter().map(wall_to_value).collect()),
    );
    m.insert("relation".into(), relation_to_value(step.relation()));
    match &step.kind {
        StepKind::Fano { .. } => {}
        StepKind::MoriFiber { fiber, .. } => {
            m.insert("fibration".into(), fiber_to_value(fiber));
        }
        StepKind::Divisorial {
            target,
            contracted_ray,
            ray_map,
            stratum,
            ..
        } => {
            m.insert("target".into(), fan_to_value(target));
            m.insert("contracted_ray".into(), Value::from(*contracted_ray as u64));
            m.insert("ray_map".into(), option_indices(ray_map));
            m.insert("stratum".into(), stratum_to_value(stratum));
        }
        StepKind::Flip { target, stratum, .. } => {
            m.insert("target".into(), fan_to_value(target));
            m.insert("stratum".into(), stratum_to_value(stratum));
        }
    }
    Value::Object(m)
}

pub fn steps_to_value(steps: &[MmpStep]) -> Value {
    Value::Array(steps.iter().map(step_to_value).collect())
}

fn shape_to_value(s: &Shape) -> Value {
    match s {
        Shape::LineBundle { class } => json!({ "kind": "line_bundle", "class": ints(class) }),
        Shape::Pushforward(p) => json!({
            "kind": "pushforward",
            "stratum": indices(&p.stratum),
            "class": ints(&p.class),
            "twist": ints(&p.twist),
        }),
    }
}

fn object_to_value(o: &CollectionObject) -> Value {
    json!({
        "shape": shape_to_value(&o.shape),
        "provenance": {
            "path": o.provenance.path,
            "degree": o.provenance.degree.as_ref().map_or(Value::Null, rational),
        },
    })
}

fn block_to_value(b: &Block) -> Value {
    json!({
        "start": b.start,
        "len": b.len,
        "degree": b.degree.as_ref().map_or(Value::Null, rational),
        "retwist": Value::Array(b.retwist.iter().map(|r| ints(r)).collect()),
    })
}

pub fn collection_to_value(c: &ExceptionalCollection) -> Value {
    json!({
        "objects": Value::Array(c.objects.iter().map(object_to_value).collect()),
        "blocks": Value::Array(c.blocks.iter().map(block_to_value).collect()),
    })
}

fn shape_from_value(v: &Value) -> Result<Shape> {
    match field(v, "kind")?.as_str() {
        Some("line_bundle") => Ok(Shape::LineBundle {
            class: parse_ints(field(v, "class")?)?,
        }),
        Some("pushforward") => Ok(Shape::Pushforward(PushforwardDatum {
            stratum: parse_indices(field(v, "stratum")?)?,
            class: parse_ints(field(v, "class")?)?,
            twist: parse_ints(field(v, "twist")?)?,
        })),
        _ => Err(Error::Format(format!("unknown object kind in {v}"))),
    }
}

fn optional_rational(v: Option<&Value>) -> Result<Option<Rational>> {
    match v {
        None | Some(Value::Null) => Ok(None),
        Some(q) => parse_rational(q).map(Some),
    }
}

pub fn collection_from_value(v: &Value) -> Result<ExceptionalCollection> {
    let objects = field(v, "objects")?
        .as_array()
        .ok_or_else(|| Error::Format("objects must be an array".into()))?
        .iter()
        .map(|o| {
            let prov = o.get("provenance");
            let path = prov
                .and_then(|p| p.get("path"))
                .and_then(Value::as_array)
                .map(|a| a.iter().filter_map(|s| s.as_str().map(String::from)).collect())
                .unwrap_or_default();
            Ok(CollectionObject {
                shape: shape_from_value(field(o, "shape")?)?,
                provenance: Provenance {
                    path,
                    degree: optional_rational(prov.and_then(|p| p.get("degree")))?,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let blocks = match v.get("blocks").and_then(Value::as_array) {
        Some(bs) => bs
            .iter()
            .map(|b| {
                Ok(Block {
                    start: usize::try_from(parse_int(field(b, "start")?)?)
                        .map_err(|_| Error::Format("negative block start".into()))?,
                    len: usize::try_from(parse_int(field(b, "len")?)?)
                        .map_err(|_| Error::Format("negative block length".into()))?,
                    degree: optional_rational(b.get("degree"))?,
                    retwist: match b.get("retwist").and_then(Value::as_array) {
                        Some(r) => r.iter().map(parse_ints).collect::<Result<_>>()?,
                        None => Vec::new(),
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    Ok(ExceptionalCollection { objects, blocks })
}

pub fn collection_from_json(s: &str) -> Result<ExceptionalCollection> {
    collection_from_value(&serde_json::from_str(s)?)
}

pub fn report_to_value(r: &VerificationReport) -> Value {
    serde_json::to_value(r).expect("reports always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    #[test]
    fn fan_round_trip_is_byte_identical() {
        for (name, fan) in builtin::all() {
            let s = fan_to_json(&fan);
            let back = fan_from_json(&s).unwrap();
            assert_eq!(back, fan, "{name}");
            assert_eq!(fan_to_json(&back), s, "{name}");
        }
    }

    #[test]
    fn canonical_keys_are_sorted() {
        let s = fan_to_json(&builtin::p1());
        assert_eq!(s, r#"{"dim":1,"max_cones":[[0],[1]],"mult":[1,1],"rays":[[1],[-1]]}"#);
    }

    #[test]
    fn large_integers_are_strings() {
        assert_eq!(int(1 << 60), Value::String((1i64 << 60).to_string()));
        assert_eq!(parse_int(&int(1 << 60)).unwrap(), 1 << 60);
        assert_eq!(int(7), Value::from(7));
    }

    #[test]
    fn collection_round_trip() {
        let f = builtin::f1();
        let c = crate::collections::build(&f).unwrap();
        let v = collection_to_value(&c);
        let back = collection_from_value(&v).unwrap();
        assert_eq!(back, c);
    }
}
