//! The ordered item stream exchanged between the product-description parser
//! and the digital twin, plus its text file format.
//!
//! A stream is a sequence of `parameter`, `create` and `connection` records.
//! Parameters declare the type-level 3D coordinates of connection points,
//! creates instantiate parts, connections join two instances by interface
//! name. The text format is one record per line, space separated, kind
//! first; blank lines and lines starting with `#` are ignored. Files use the
//! `.items` extension and UTF-8.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::caex::{is_presentation_attribute, parse_point3, resolve_link_endpoint, validate_caex,
    CaexDocument, CaexError, Severity};
use crate::geom::{Orientation, Point3};

#[derive(Debug, Error)]
pub enum ItemsError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("invalid item stream: {0}")]
    Invalid(String),
    #[error(transparent)]
    Caex(#[from] CaexError),
    #[error("document fails validation: {0}")]
    Diagnostics(String),
}

/// One record of the exchange format.
#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    /// 3D coordinate of a connection point, shared by all instances of the
    /// type. Keyed as `type_name.param_name`.
    Parameter { type_name: String, param_name: String, point: Point3 },
    /// Instantiates a part of a previously parameterized type.
    Create { type_name: String, instance_name: String, color: String, orientation: Orientation },
    /// Connects two instances at the named points.
    Connection { instance_a: String, point_a: String, instance_b: String, point_b: String },
}

/// A validated, ordered sequence of items: parameters first, then creates,
/// then connections, with every reference resolvable.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ItemStream {
    items: Vec<Item>,
}

impl ItemStream {
    /// Validates ordering and referential integrity.
    pub fn new(items: Vec<Item>) -> Result<Self, ItemsError> {
        let mut phase = 0usize; // 0=parameters, 1=creates, 2=connections
        let mut params: BTreeMap<(String, String), Point3> = BTreeMap::new();
        let mut instances: BTreeMap<String, String> = BTreeMap::new();
        for item in &items {
            match item {
                Item::Parameter { type_name, param_name, point } => {
                    if phase > 0 {
                        return Err(ItemsError::Invalid(
                            "parameter items must precede create and connection items".into(),
                        ));
                    }
                    check_token(type_name, "type name")?;
                    check_token(param_name, "parameter name")?;
                    let key = (type_name.clone(), param_name.clone());
                    if let Some(existing) = params.get(&key) {
                        if *existing != *point {
                            return Err(ItemsError::Invalid(format!(
                                "conflicting values for parameter {}.{}",
                                type_name, param_name
                            )));
                        }
                    }
                    params.insert(key, *point);
                }
                Item::Create { type_name, instance_name, color, .. } => {
                    if phase > 1 {
                        return Err(ItemsError::Invalid(
                            "create items must precede connection items".into(),
                        ));
                    }
                    phase = 1;
                    check_token(type_name, "type name")?;
                    check_token(instance_name, "instance name")?;
                    check_token(color, "color")?;
                    if instances.insert(instance_name.clone(), type_name.clone()).is_some() {
                        return Err(ItemsError::Invalid(format!(
                            "duplicate instance name '{}'",
                            instance_name
                        )));
                    }
                }
                Item::Connection { instance_a, point_a, instance_b, point_b } => {
                    phase = 2;
                    for (instance, point) in [(instance_a, point_a), (instance_b, point_b)] {
                        check_token(instance, "instance name")?;
                        check_token(point, "point name")?;
                        let type_name = instances.get(instance).ok_or_else(|| {
                            ItemsError::Invalid(format!(
                                "connection references unknown instance '{}'",
                                instance
                            ))
                        })?;
                        if !params.contains_key(&(type_name.clone(), point.clone())) {
                            return Err(ItemsError::Invalid(format!(
                                "connection point '{}' has no parameter for type '{}'",
                                point, type_name
                            )));
                        }
                    }
                }
            }
        }
        Ok(ItemStream { items })
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

fn check_token(token: &str, what: &str) -> Result<(), ItemsError> {
    if token.is_empty() {
        return Err(ItemsError::Invalid(format!("{} must not be empty", what)));
    }
    if token.chars().any(char::is_whitespace) {
        return Err(ItemsError::Invalid(format!("{} '{}' contains whitespace", what, token)));
    }
    Ok(())
}

/// Canonical real rendering: `.` separator, shortest text that reparses to
/// the same value, no exponent for the magnitudes used here.
pub fn fmt_real(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    format!("{}", v)
}

fn fmt_orientation(o: Orientation) -> String {
    format!("{},{}", fmt_real(o.yaw), fmt_real(o.pitch))
}

/// Parses `"yaw,pitch"` in degrees.
pub fn parse_orientation(text: &str) -> Option<Orientation> {
    let (yaw, pitch) = text.split_once(',')?;
    let yaw: f64 = yaw.trim().parse().ok()?;
    let pitch: f64 = pitch.trim().parse().ok()?;
    (yaw.is_finite() && pitch.is_finite()).then(|| Orientation::new(yaw, pitch))
}

/// Flattens a validated document into the item stream: one parameter per
/// coordinate-bearing class attribute, one create per typed leaf element in
/// document order, one connection per internal link with endpoints resolved
/// to instance names. Missing color and orientation attributes default to
/// `gray` and `0,0`.
pub fn extract_items(doc: &CaexDocument) -> Result<ItemStream, ItemsError> {
    let errors: Vec<String> = validate_caex(doc)
        .into_iter()
        .filter(|d| d.severity == Severity::Error)
        .map(|d| d.to_string())
        .collect();
    if !errors.is_empty() {
        return Err(ItemsError::Diagnostics(errors.join("; ")));
    }

    let mut items = Vec::new();
    for lib in &doc.system_unit_libs {
        for class in &lib.classes {
            for attr in &class.attributes {
                if is_presentation_attribute(&attr.name) {
                    continue;
                }
                if let Some(raw) = &attr.default_value {
                    let point = parse_point3(raw).expect("validated coordinate");
                    items.push(Item::Parameter {
                        type_name: class.name.clone(),
                        param_name: attr.name.clone(),
                        point,
                    });
                }
            }
        }
    }

    let elements = doc.walk_elements();
    let mut instance_names: BTreeMap<&str, &str> = BTreeMap::new();
    for element in &elements {
        if !element.children.is_empty() {
            continue;
        }
        let Some(class) = doc.class_of(element) else { continue };
        instance_names.insert(element.id.as_str(), element.name.as_str());
        let color = effective_attribute(doc, element, "color").unwrap_or_else(|| "gray".to_string());
        let orientation_text =
            effective_attribute(doc, element, "orientation").unwrap_or_else(|| "0,0".to_string());
        let orientation = parse_orientation(&orientation_text).ok_or_else(|| {
            ItemsError::Invalid(format!(
                "instance '{}' has malformed orientation '{}'",
                element.name, orientation_text
            ))
        })?;
        items.push(Item::Create {
            type_name: class.name.clone(),
            instance_name: element.name.clone(),
            color,
            orientation,
        });
    }

    for link in doc.walk_links() {
        let (id_a, point_a) = resolve_link_endpoint(doc, &link.ref_partner_a)?;
        let (id_b, point_b) = resolve_link_endpoint(doc, &link.ref_partner_b)?;
        let name_of = |id: &str| -> Result<String, ItemsError> {
            instance_names.get(id).map(|n| n.to_string()).ok_or_else(|| {
                ItemsError::Invalid(format!(
                    "link '{}' endpoint '{}' is not a leaf part instance",
                    link.name, id
                ))
            })
        };
        items.push(Item::Connection {
            instance_a: name_of(&id_a)?,
            point_a,
            instance_b: name_of(&id_b)?,
            point_b,
        });
    }

    ItemStream::new(items)
}

/// Instance `Value` wins over instance `DefaultValue`, which wins over the
/// class-level `Value` and `DefaultValue`.
fn effective_attribute(doc: &CaexDocument, element: &crate::caex::InternalElement, name: &str) -> Option<String> {
    if let Some(attr) = element.attributes.iter().find(|a| a.name == name) {
        if let Some(v) = attr.value.clone().or_else(|| attr.default_value.clone()) {
            return Some(v);
        }
    }
    let class = doc.class_of(element)?;
    let attr = class.attributes.iter().find(|a| a.name == name)?;
    attr.value.clone().or_else(|| attr.default_value.clone())
}

/// Renders the stream in the text exchange format, one line per item with a
/// trailing newline; the empty stream renders as empty text.
pub fn write_items(stream: &ItemStream) -> String {
    let mut out = String::new();
    for item in stream.items() {
        match item {
            Item::Parameter { type_name, param_name, point } => {
                out.push_str(&format!(
                    "parameter {} {} {} {} {}\n",
                    type_name,
                    param_name,
                    fmt_real(point.x),
                    fmt_real(point.y),
                    fmt_real(point.z)
                ));
            }
            Item::Create { type_name, instance_name, color, orientation } => {
                out.push_str(&format!(
                    "create {} {} {} {}\n",
                    type_name,
                    instance_name,
                    color,
                    fmt_orientation(*orientation)
                ));
            }
            Item::Connection { instance_a, point_a, instance_b, point_b } => {
                out.push_str(&format!(
                    "connection {} {} {} {}\n",
                    instance_a, point_a, instance_b, point_b
                ));
            }
        }
    }
    out
}

/// Parses the text exchange format. Inverse of [`write_items`] on its image.
pub fn read_items(text: &str) -> Result<ItemStream, ItemsError> {
    let mut items = Vec::new();
    for (index, raw_line) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let fail = |message: String| ItemsError::Format { line: line_no, message };
        let real = |token: &str| -> Result<f64, ItemsError> {
            token
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| fail(format!("'{}' is not a real number", token)))
        };
        match tokens[0] {
            "parameter" => {
                if tokens.len() != 6 {
                    return Err(fail(format!("parameter expects 5 fields, got {}", tokens.len() - 1)));
                }
                items.push(Item::Parameter {
                    type_name: tokens[1].to_string(),
                    param_name: tokens[2].to_string(),
                    point: Point3::new(real(tokens[3])?, real(tokens[4])?, real(tokens[5])?),
                });
            }
            "create" => {
                if tokens.len() != 5 {
                    return Err(fail(format!("create expects 4 fields, got {}", tokens.len() - 1)));
                }
                let orientation = parse_orientation(tokens[4])
                    .ok_or_else(|| fail(format!("'{}' is not a yaw,pitch orientation", tokens[4])))?;
                items.push(Item::Create {
                    type_name: tokens[1].to_string(),
                    instance_name: tokens[2].to_string(),
                    color: tokens[3].to_string(),
                    orientation,
                });
            }
            "connection" => {
                if tokens.len() != 5 {
                    return Err(fail(format!("connection expects 4 fields, got {}", tokens.len() - 1)));
                }
                items.push(Item::Connection {
                    instance_a: tokens[1].to_string(),
                    point_a: tokens[2].to_string(),
                    instance_b: tokens[3].to_string(),
                    point_b: tokens[4].to_string(),
                });
            }
            kind => return Err(fail(format!("unknown item kind '{}'", kind))),
        }
    }
    ItemStream::new(items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caex::parse_caex;
    use proptest::prelude::*;

    fn sample_stream() -> ItemStream {
        ItemStream::new(vec![
            Item::Parameter {
                type_name: "FaceplateBack".into(),
                param_name: "shaft".into(),
                point: Point3::new(-0.006, 0.0, 0.226),
            },
            Item::Create {
                type_name: "FaceplateBack".into(),
                instance_name: "back".into(),
                color: "pink".into(),
                orientation: Orientation::IDENTITY,
            },
        ])
        .unwrap()
    }

    #[test]
    fn writes_parameter_line_with_canonical_reals() {
        let text = write_items(&sample_stream());
        assert!(text.starts_with("parameter FaceplateBack shaft -0.006 0 0.226\n"), "{text}");
    }

    #[test]
    fn empty_stream_writes_empty_text() {
        assert_eq!(write_items(&ItemStream::default()), "");
    }

    #[test]
    fn writes_connection_line() {
        let stream = ItemStream::new(vec![
            Item::Parameter { type_name: "A".into(), param_name: "square_left".into(), point: Point3::ZERO },
            Item::Parameter { type_name: "B".into(), param_name: "bottom".into(), point: Point3::ZERO },
            Item::Create { type_name: "A".into(), instance_name: "back".into(), color: "pink".into(), orientation: Orientation::IDENTITY },
            Item::Create { type_name: "B".into(), instance_name: "boltA1".into(), color: "green".into(), orientation: Orientation::IDENTITY },
            Item::Connection { instance_a: "back".into(), point_a: "square_left".into(), instance_b: "boltA1".into(), point_b: "bottom".into() },
        ])
        .unwrap();
        assert!(write_items(&stream).ends_with("connection back square_left boltA1 bottom\n"));
    }

    #[test]
    fn read_parses_create_grammar() {
        let stream = read_items("create Block b1 red 0,0\n").unwrap();
        assert_eq!(
            stream.items()[0],
            Item::Create {
                type_name: "Block".into(),
                instance_name: "b1".into(),
                color: "red".into(),
                orientation: Orientation::IDENTITY,
            }
        );
    }

    #[test]
    fn read_rejects_bad_real_with_line_number() {
        let err = read_items("parameter Block top 0 0.5 zz\n").unwrap_err();
        match err {
            ItemsError::Format { line, .. } => assert_eq!(line, 1),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn read_skips_blanks_and_comments() {
        let stream = read_items("\n# comment\nparameter T p 1 2 3\n").unwrap();
        assert_eq!(stream.items().len(), 1);
    }

    #[test]
    fn round_trip_is_identity() {
        let stream = sample_stream();
        let again = read_items(&write_items(&stream)).unwrap();
        assert_eq!(stream, again);
    }

    #[test]
    fn stream_rejects_connection_before_create() {
        let err = ItemStream::new(vec![
            Item::Connection { instance_a: "a".into(), point_a: "p".into(), instance_b: "b".into(), point_b: "p".into() },
        ])
        .unwrap_err();
        assert!(matches!(err, ItemsError::Invalid(_)));
    }

    #[test]
    fn stream_rejects_uncovered_connection_point() {
        let err = ItemStream::new(vec![
            Item::Create { type_name: "T".into(), instance_name: "a".into(), color: "gray".into(), orientation: Orientation::IDENTITY },
            Item::Create { type_name: "T".into(), instance_name: "b".into(), color: "gray".into(), orientation: Orientation::IDENTITY },
            Item::Connection { instance_a: "a".into(), point_a: "p".into(), instance_b: "b".into(), point_b: "p".into() },
        ])
        .unwrap_err();
        assert!(err.to_string().contains("no parameter"));
    }

    const FACEPLATE_DOC: &str = r#"<CAEXFile>
  <InterfaceClassLib Name="InterfaceClassLib1">
    <InterfaceClass Name="IBolt" />
    <InterfaceClass Name="IBoltAngular" />
    <InterfaceClass Name="IShaft" />
  </InterfaceClassLib>
  <SystemUnitClassLib Name="SystemUnitClassLib1">
    <SystemUnitClass Name="FaceplateBack">
      <Attribute Name="color" AttributeDataType="xs:string"><Description>color</Description></Attribute>
      <Attribute Name="orientation" AttributeDataType="xs:string"><Description>orientation</Description></Attribute>
      <Attribute Name="square_left"><DefaultValue>-0.656,0,1.151</DefaultValue></Attribute>
      <Attribute Name="square_right" AttributeDataType="xs:string"><DefaultValue>0.664,0,1.151</DefaultValue></Attribute>
      <Attribute Name="circle_left" AttributeDataType="xs:string"><DefaultValue>-1.021,0,-0.774</DefaultValue></Attribute>
      <Attribute Name="circle_right" AttributeDataType="xs:string"><DefaultValue>1.019,0,-0.774</DefaultValue></Attribute>
      <Attribute Name="shaft" AttributeDataType="xs:string"><DefaultValue>-0.006,0,0.226</DefaultValue></Attribute>
      <ExternalInterface Name="circle_left" RefBaseClassPath="InterfaceClassLib1/IBolt" ID="5c244537-0fea-46a5-bf81-7c81252e232e" />
      <ExternalInterface Name="circle_right" RefBaseClassPath="InterfaceClassLib1/IBolt" ID="041ad697-85aa-4c55-8f74-f81c279655b2" />
      <ExternalInterface Name="shaft" RefBaseClassPath="InterfaceClassLib1/IShaft" ID="b430fdb5-6397-438a-b080-1d0f41d67b9e" />
      <ExternalInterface Name="square_left" RefBaseClassPath="InterfaceClassLib1/IBoltAngular" ID="91946ab4-5e02-4c2c-b90a-6484c342bfcc" />
      <ExternalInterface Name="square_right" RefBaseClassPath="InterfaceClassLib1/IBoltAngular" ID="5c0dd7bb-adee-423f-8d69-7387a65d05d1" />
    </SystemUnitClass>
  </SystemUnitClassLib>
  <InstanceHierarchy Name="P">
    <InternalElement Name="group" ID="bbe6b4c5-43ad-43cc-9cf8-594fe7e255bb">
      <InternalElement Name="back" RefBaseSystemUnitPath="SystemUnitClassLib1/FaceplateBack" ID="2ddc2cf5-1127-471f-b174-dc5b088c9d23">
        <Attribute Name="color" AttributeDataType="xs:string"><Description>color</Description><Value>pink</Value></Attribute>
      </InternalElement>
    </InternalElement>
  </InstanceHierarchy>
</CAEXFile>"#;

    #[test]
    fn extract_counts_parameters_creates_connections() {
        let doc = parse_caex(FACEPLATE_DOC).unwrap();
        let stream = extract_items(&doc).unwrap();
        let parameters = stream.items().iter().filter(|i| matches!(i, Item::Parameter { .. })).count();
        let creates = stream.items().iter().filter(|i| matches!(i, Item::Create { .. })).count();
        let connections = stream.items().iter().filter(|i| matches!(i, Item::Connection { .. })).count();
        assert_eq!((parameters, creates, connections), (5, 1, 0));
        assert!(stream.items().contains(&Item::Parameter {
            type_name: "FaceplateBack".into(),
            param_name: "shaft".into(),
            point: Point3::new(-0.006, 0.0, 0.226),
        }));
        // instance-level Value overrides: back is pink, not the gray default
        assert!(stream.items().contains(&Item::Create {
            type_name: "FaceplateBack".into(),
            instance_name: "back".into(),
            color: "pink".into(),
            orientation: Orientation::IDENTITY,
        }));
    }

    fn arb_real() -> impl Strategy<Value = f64> {
        // finite, moderate magnitude, includes negatives and exact zero
        prop_oneof![
            Just(0.0),
            -100.0f64..100.0,
        ]
    }

    prop_compose! {
        fn arb_stream()(
            n_params in 1usize..4,
            n_creates in 1usize..5,
            coords in proptest::collection::vec((arb_real(), arb_real(), arb_real()), 8),
            yaws in proptest::collection::vec(0.0f64..360.0, 8),
        ) -> ItemStream {
            let mut items = Vec::new();
            for p in 0..n_params {
                let (x, y, z) = coords[p % coords.len()];
                items.push(Item::Parameter {
                    type_name: "T".into(),
                    param_name: format!("p{p}"),
                    point: Point3::new(x, y, z),
                });
            }
            for c in 0..n_creates {
                items.push(Item::Create {
                    type_name: "T".into(),
                    instance_name: format!("i{c}"),
                    color: "gray".into(),
                    orientation: Orientation::new(yaws[c % yaws.len()], 0.0),
                });
            }
            for c in 1..n_creates {
                items.push(Item::Connection {
                    instance_a: format!("i{}", c - 1),
                    point_a: "p0".into(),
                    instance_b: format!("i{c}"),
                    point_b: "p0".into(),
                });
            }
            ItemStream::new(items).unwrap()
        }
    }

    proptest! {
        #[test]
        fn round_trip_identity_on_random_streams(stream in arb_stream()) {
            let again = read_items(&write_items(&stream)).unwrap();
            prop_assert_eq!(stream, again);
        }
    }
}
