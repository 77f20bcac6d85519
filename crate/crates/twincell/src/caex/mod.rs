//! CAEX (IEC 62424) document model, parser, writer and lint rules.
//!
//! Only the CAEX subset used by product descriptions is modeled:
//! `InterfaceClassLib`, `RoleClassLib`, `SystemUnitClassLib` and
//! `InstanceHierarchy`, with `InternalElement`, `InternalLink`,
//! `ExternalInterface`, `Attribute`, `DefaultValue`, `Value`, `Description`
//! and `Version`. Elements are matched by local name so namespace prefixes
//! from different exporters do not matter. Unknown elements are skipped.

mod parse;
mod validate;
mod write;

pub use parse::parse_caex;
pub use validate::{validate_caex, Diagnostic, Severity};
pub use write::write_caex;

use crate::geom::Point3;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CaexError {
    #[error("XML parse error at line {line}: {message}")]
    Parse { line: u32, message: String },
    #[error("structural error at line {line}: {message}")]
    Structural { line: u32, message: String },
    #[error("link endpoint '{0}' has no ':' separator")]
    MalformedRef(String),
    #[error("link endpoint references unknown InternalElement id '{id}'")]
    DanglingLink { id: String },
    #[error("element '{element}' declares no external interface named '{interface}'")]
    InterfaceMismatch { element: String, interface: String },
}

/// An interface type usable by `ExternalInterface` declarations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterfaceClass {
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterfaceClassLib {
    pub name: String,
    pub version: Option<String>,
    pub classes: Vec<InterfaceClass>,
}

/// Role class libraries are parsed and retained but never interpreted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleClassLib {
    pub name: String,
    pub version: Option<String>,
}

/// A named attribute carrying an optional type-wide `DefaultValue` and an
/// optional per-instance `Value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeDef {
    pub name: String,
    pub data_type: Option<String>,
    pub description: Option<String>,
    pub default_value: Option<String>,
    pub value: Option<String>,
}

/// Declares that instances of a system unit class expose a connectable
/// interface. The name matches the attribute holding the interface's 3D
/// coordinates in its `DefaultValue`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalInterfaceDef {
    pub name: String,
    pub interface_class_path: String,
    pub id: String,
}

/// A component type: attributes plus declared external interfaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemUnitClass {
    pub name: String,
    pub attributes: Vec<AttributeDef>,
    pub external_interfaces: Vec<ExternalInterfaceDef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemUnitClassLib {
    pub name: String,
    pub version: Option<String>,
    pub classes: Vec<SystemUnitClass>,
}

/// A product instance node. Leaf elements with a `RefBaseSystemUnitPath`
/// become parts; elements with children act as grouping containers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InternalElement {
    pub name: String,
    /// RFC 4122 UUID, unique document-wide.
    pub id: String,
    pub ref_system_unit_path: Option<String>,
    pub attributes: Vec<AttributeDef>,
    pub children: Vec<InternalElement>,
    pub internal_links: Vec<InternalLink>,
}

/// A connection between two instances, each side encoded as
/// `"<element-id>:<interface-name>"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InternalLink {
    pub name: String,
    pub ref_partner_a: String,
    pub ref_partner_b: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceHierarchy {
    pub name: String,
    pub version: Option<String>,
    pub elements: Vec<InternalElement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CaexDocument {
    pub interface_libs: Vec<InterfaceClassLib>,
    pub role_libs: Vec<RoleClassLib>,
    pub system_unit_libs: Vec<SystemUnitClassLib>,
    pub instance_hierarchies: Vec<InstanceHierarchy>,
}

impl CaexDocument {
    /// Depth-first traversal of every `InternalElement` in document order.
    pub fn walk_elements(&self) -> Vec<&InternalElement> {
        fn visit<'a>(element: &'a InternalElement, out: &mut Vec<&'a InternalElement>) {
            out.push(element);
            for child in &element.children {
                visit(child, out);
            }
        }
        let mut out = Vec::new();
        for hierarchy in &self.instance_hierarchies {
            for element in &hierarchy.elements {
                visit(element, &mut out);
            }
        }
        out
    }

    /// All `InternalLink`s in document order.
    pub fn walk_links(&self) -> Vec<&InternalLink> {
        self.walk_elements()
            .into_iter()
            .flat_map(|e| e.internal_links.iter())
            .collect()
    }

    pub fn find_element(&self, id: &str) -> Option<&InternalElement> {
        self.walk_elements().into_iter().find(|e| e.id == id)
    }

    /// Resolves a `RefBaseSystemUnitPath` like `"LibName/ClassName"`. A bare
    /// class name is searched across all system unit libraries.
    pub fn resolve_system_unit_class(&self, path: &str) -> Option<&SystemUnitClass> {
        match path.split_once('/') {
            Some((lib, class)) => self
                .system_unit_libs
                .iter()
                .find(|l| l.name == lib)
                .and_then(|l| l.classes.iter().find(|c| c.name == class)),
            None => self
                .system_unit_libs
                .iter()
                .flat_map(|l| l.classes.iter())
                .find(|c| c.name == path),
        }
    }

    /// The system unit class of an element, if any.
    pub fn class_of(&self, element: &InternalElement) -> Option<&SystemUnitClass> {
        element
            .ref_system_unit_path
            .as_deref()
            .and_then(|p| self.resolve_system_unit_class(p))
    }
}

/// Splits a link partner reference at the first `':'` and verifies that the
/// element exists and its system unit class declares the named interface.
/// Returns `(element_id, interface_name)`.
pub fn resolve_link_endpoint(doc: &CaexDocument, endpoint: &str) -> Result<(String, String), CaexError> {
    let (id, interface) = endpoint
        .split_once(':')
        .ok_or_else(|| CaexError::MalformedRef(endpoint.to_string()))?;
    let element = doc
        .find_element(id)
        .ok_or_else(|| CaexError::DanglingLink { id: id.to_string() })?;
    let declares = doc
        .class_of(element)
        .map(|class| class.external_interfaces.iter().any(|e| e.name == interface))
        .unwrap_or(false);
    if !declares {
        return Err(CaexError::InterfaceMismatch {
            element: element.name.clone(),
            interface: interface.to_string(),
        });
    }
    Ok((id.to_string(), interface.to_string()))
}

/// Attribute names with presentation semantics rather than 3D coordinates.
pub(crate) fn is_presentation_attribute(name: &str) -> bool {
    name == "color" || name == "orientation"
}

/// Strict coordinate grammar: exactly three reals separated by commas with
/// optional surrounding whitespace and `.` as the decimal separator.
pub fn parse_point3(text: &str) -> Option<Point3> {
    let mut parts = text.split(',');
    let x: f64 = parts.next()?.trim().parse().ok()?;
    let y: f64 = parts.next()?.trim().parse().ok()?;
    let z: f64 = parts.next()?.trim().parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    let p = Point3::new(x, y, z);
    p.is_finite().then_some(p)
}
