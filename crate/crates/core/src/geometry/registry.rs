//! Name-keyed registry of shape kernels.
//!
//! Region files carry a `type` tag per shape; the registry maps that tag to
//! the kernel parser, so new kernels plug in by adding one row. Schema:
//!
//! ```json
//! { "dim": 2, "shape": { "type": "ball", "center": [0.0, 0.0], "radius": 1.0 } }
//! ```
//!
//! Recognised types: `half_space`, `ball`, `axis_box`, `interval_union`,
//! `convex_polygon`, `finite_union`. Region files use the `.region.json`
//! extension.

use super::shapes::{AxisBox, Ball, ConvexPolygon, FiniteUnion, HalfSpace, IntervalUnion, Shape};
use super::Region;
use crate::error::{Error, Result};
use serde_json::Value;
use std::sync::Arc;

type ShapeParser = fn(&Value, usize) -> Result<Arc<dyn Shape>>;

/// Registered kernel parsers, keyed by the JSON `type` tag.
pub const SHAPE_REGISTRY: &[(&str, ShapeParser)] = &[
    ("half_space", parse_half_space),
    ("ball", parse_ball),
    ("axis_box", parse_axis_box),
    ("interval_union", parse_interval_union),
    ("convex_polygon", parse_convex_polygon),
    ("finite_union", parse_finite_union),
];

pub fn registered_kinds() -> Vec<&'static str> {
    SHAPE_REGISTRY.iter().map(|(name, _)| *name).collect()
}

/// Parses one shape object, dispatching on its `type` tag.
pub fn parse_shape(value: &Value, dim: usize) -> Result<Arc<dyn Shape>> {
    let tag = value
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::InvalidRegion("shape.type: missing or not a string".into()))?;
    for (name, parser) in SHAPE_REGISTRY {
        if *name == tag {
            return parser(value, dim);
        }
    }
    Err(Error::UnsupportedShape(format!(
        "{tag} (known: {})",
        registered_kinds().join(", ")
    )))
}

/// Parses a full region document.
pub fn region_from_json(value: &Value) -> Result<Region> {
    let dim = value
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::InvalidRegion("dim: missing or not an integer".into()))?
        as usize;
    if !(1..=3).contains(&dim) {
        return Err(Error::UnsupportedDimension(dim));
    }
    let shape_value = value
        .get("shape")
        .ok_or_else(|| Error::InvalidRegion("shape: missing".into()))?;
    let shape = parse_shape(shape_value, dim)?;
    Region::new(dim, shape)
}

pub fn region_from_str(text: &str) -> Result<Region> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::InvalidRegion(format!("invalid JSON: {e}")))?;
    region_from_json(&value)
}

pub fn region_to_json(region: &Region) -> Value {
    serde_json::json!({
        "dim": region.dim(),
        "shape": region.shape().to_json(),
    })
}

fn field<'v>(value: &'v Value, name: &str) -> Result<&'v Value> {
    value
        .get(name)
        .ok_or_else(|| Error::InvalidRegion(format!("shape.{name}: missing")))
}

fn number(value: &Value, name: &str) -> Result<f64> {
    field(value, name)?
        .as_f64()
        .ok_or_else(|| Error::InvalidRegion(format!("shape.{name}: expected a number")))
}

fn vector(value: &Value, name: &str, dim: usize) -> Result<[f64; 3]> {
    let arr = field(value, name)?
        .as_array()
        .ok_or_else(|| Error::InvalidRegion(format!("shape.{name}: expected an array")))?;
    if arr.len() != dim {
        return Err(Error::InvalidRegion(format!(
            "shape.{name}: expected {dim} components, found {}",
            arr.len()
        )));
    }
    let mut out = [0.0; 3];
    for (k, v) in arr.iter().enumerate() {
        out[k] = v.as_f64().ok_or_else(|| {
            Error::InvalidRegion(format!("shape.{name}[{k}]: expected a number"))
        })?;
    }
    Ok(out)
}

fn parse_half_space(value: &Value, dim: usize) -> Result<Arc<dyn Shape>> {
    let normal = vector(value, "normal", dim)?;
    let offset = number(value, "offset")?;
    Ok(Arc::new(HalfSpace::new(dim, normal, offset)?))
}

fn parse_ball(value: &Value, dim: usize) -> Result<Arc<dyn Shape>> {
    let center = vector(value, "center", dim)?;
    let radius = number(value, "radius")?;
    Ok(Arc::new(Ball::new(dim, center, radius)?))
}

fn parse_axis_box(value: &Value, dim: usize) -> Result<Arc<dyn Shape>> {
    let lo = vector(value, "lower", dim)?;
    let hi = vector(value, "upper", dim)?;
    Ok(Arc::new(AxisBox::new(dim, lo, hi)?))
}

fn parse_interval_union(value: &Value, dim: usize) -> Result<Arc<dyn Shape>> {
    if dim != 1 {
        return Err(Error::InvalidRegion(
            "interval_union: only valid for dim = 1".into(),
        ));
    }
    let arr = field(value, "intervals")?
        .as_array()
        .ok_or_else(|| Error::InvalidRegion("shape.intervals: expected an array".into()))?;
    let mut intervals = Vec::with_capacity(arr.len());
    for (k, pair) in arr.iter().enumerate() {
        let pair = pair.as_array().ok_or_else(|| {
            Error::InvalidRegion(format!("shape.intervals[{k}]: expected [a, b]"))
        })?;
        if pair.len() != 2 {
            return Err(Error::InvalidRegion(format!(
                "shape.intervals[{k}]: expected exactly two endpoints"
            )));
        }
        let a = pair[0].as_f64().ok_or_else(|| {
            Error::InvalidRegion(format!("shape.intervals[{k}][0]: expected a number"))
        })?;
        let b = pair[1].as_f64().ok_or_else(|| {
            Error::InvalidRegion(format!("shape.intervals[{k}][1]: expected a number"))
        })?;
        intervals.push((a, b));
    }
    Ok(Arc::new(IntervalUnion::new(intervals)?))
}

fn parse_convex_polygon(value: &Value, dim: usize) -> Result<Arc<dyn Shape>> {
    if dim != 2 {
        return Err(Error::InvalidRegion(
            "convex_polygon: only valid for dim = 2".into(),
        ));
    }
    let arr = field(value, "vertices")?
        .as_array()
        .ok_or_else(|| Error::InvalidRegion("shape.vertices: expected an array".into()))?;
    let mut vertices = Vec::with_capacity(arr.len());
    for (k, v) in arr.iter().enumerate() {
        let v = v.as_array().ok_or_else(|| {
            Error::InvalidRegion(format!("shape.vertices[{k}]: expected [x, y]"))
        })?;
        if v.len() != 2 {
            return Err(Error::InvalidRegion(format!(
                "shape.vertices[{k}]: expected exactly two coordinates"
            )));
        }
        let x = v[0].as_f64().ok_or_else(|| {
            Error::InvalidRegion(format!("shape.vertices[{k}][0]: expected a number"))
        })?;
        let y = v[1].as_f64().ok_or_else(|| {
            Error::InvalidRegion(format!("shape.vertices[{k}][1]: expected a number"))
        })?;
        vertices.push([x, y]);
    }
    Ok(Arc::new(ConvexPolygon::new(vertices)?))
}

fn parse_finite_union(value: &Value, dim: usize) -> Result<Arc<dyn Shape>> {
    let arr = field(value, "members")?
        .as_array()
        .ok_or_else(|| Error::InvalidRegion("shape.members: expected an array".into()))?;
    let mut members = Vec::with_capacity(arr.len());
    for member in arr {
        members.push(parse_shape(member, dim)?);
    }
    Ok(Arc::new(FiniteUnion::new(dim, members)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    #[test]
    fn round_trips_a_union() {
        let text = r#"{
            "dim": 2,
            "shape": {
                "type": "finite_union",
                "members": [
                    {"type": "ball", "center": [0.0, 0.0], "radius": 1.0},
                    {"type": "axis_box", "lower": [2.0, 0.0], "upper": [3.0, 1.0]}
                ]
            }
        }"#;
        let region = region_from_str(text).unwrap();
        assert!(region.contains(&Point::new2(0.1, 0.2)));
        assert!(region.contains(&Point::new2(2.5, 0.5)));
        assert!(!region.contains(&Point::new2(1.5, 0.5)));

        let emitted = region_to_json(&region);
        let region2 = region_from_json(&emitted).unwrap();
        assert!(region2.contains(&Point::new2(2.5, 0.5)));
    }

    #[test]
    fn errors_name_the_offending_field() {
        let err = region_from_str(r#"{"dim": 2, "shape": {"type": "ball", "center": [0, 0]}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("radius"), "{err}");

        let err = region_from_str(r#"{"dim": 2, "shape": {"type": "wedge"}}"#).unwrap_err();
        assert!(matches!(err, Error::UnsupportedShape(_)));

        let err = region_from_str(r#"{"shape": {"type": "ball"}}"#).unwrap_err();
        assert!(err.to_string().contains("dim"), "{err}");
    }
}
