//! Lint rules over a parsed document.

use std::collections::{BTreeMap, BTreeSet};

use super::{is_presentation_attribute, parse_point3, resolve_link_endpoint, CaexDocument};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl std::fmt::Display for Severity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Severity::Error => write!(f, "error"),
            Severity::Warning => write!(f, "warning"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub rule: &'static str,
    /// Human-readable location such as a link or element name.
    pub location: String,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}[{}] {}: {}", self.severity, self.rule, self.location, self.message)
    }
}

/// Checks the structural rules a usable product description must satisfy.
///
/// Error-level findings: internal links that do not resolve on both sides,
/// unresolvable `RefBaseSystemUnitPath` references, and coordinate attributes
/// whose `DefaultValue` does not parse as `x,y,z`. Warning-level findings:
/// leaf elements without a type, external interfaces without a matching
/// coordinate attribute, and a disconnected connection graph.
pub fn validate_caex(doc: &CaexDocument) -> Vec<Diagnostic> {
    let mut diagnostics = Vec::new();

    for lib in &doc.system_unit_libs {
        for class in &lib.classes {
            for attr in &class.attributes {
                if is_presentation_attribute(&attr.name) {
                    continue;
                }
                if let Some(raw) = &attr.default_value {
                    if parse_point3(raw).is_none() {
                        diagnostics.push(Diagnostic {
                            severity: Severity::Error,
                            rule: "malformed-coordinate",
                            location: format!("{}/{}.{}", lib.name, class.name, attr.name),
                            message: format!("DefaultValue '{}' does not parse as x,y,z", raw),
                        });
                    }
                }
            }
            for iface in &class.external_interfaces {
                let has_coordinate = class
                    .attributes
                    .iter()
                    .any(|a| a.name == iface.name && a.default_value.as_deref().and_then(parse_point3).is_some());
                if !has_coordinate {
                    diagnostics.push(Diagnostic {
                        severity: Severity::Warning,
                        rule: "unmatched-interface",
                        location: format!("{}/{}.{}", lib.name, class.name, iface.name),
                        message: "ExternalInterface has no attribute with parseable coordinates".into(),
                    });
                }
            }
        }
    }

    let elements = doc.walk_elements();
    for element in &elements {
        match &element.ref_system_unit_path {
            Some(path) => {
                if doc.resolve_system_unit_class(path).is_none() {
                    diagnostics.push(Diagnostic {
                        severity: Severity::Error,
                        rule: "unresolvable-type",
                        location: element.name.clone(),
                        message: format!("RefBaseSystemUnitPath '{}' does not resolve", path),
                    });
                }
            }
            None => {
                if element.children.is_empty() {
                    diagnostics.push(Diagnostic {
                        severity: Severity::Warning,
                        rule: "missing-type",
                        location: element.name.clone(),
                        message: "leaf InternalElement has no RefBaseSystemUnitPath".into(),
                    });
                }
            }
        }
    }

    // Link resolution plus the instance connection graph.
    let parts: Vec<&str> = elements
        .iter()
        .filter(|e| e.children.is_empty() && e.ref_system_unit_path.is_some())
        .map(|e| e.id.as_str())
        .collect();
    let mut component: BTreeMap<&str, usize> = parts.iter().enumerate().map(|(i, id)| (*id, i)).collect();

    for element in &elements {
        for link in &element.internal_links {
            let mut endpoint_ids = Vec::new();
            for endpoint in [&link.ref_partner_a, &link.ref_partner_b] {
                match resolve_link_endpoint(doc, endpoint) {
                    Ok((id, _)) => endpoint_ids.push(id),
                    Err(err) => diagnostics.push(Diagnostic {
                        severity: Severity::Error,
                        rule: "dangling-link",
                        location: link.name.clone(),
                        message: err.to_string(),
                    }),
                }
            }
            if let [a, b] = endpoint_ids.as_slice() {
                union(&mut component, a, b);
            }
        }
    }

    if parts.len() >= 2 {
        let roots: BTreeSet<usize> = parts.iter().map(|id| find(&component, id)).collect();
        if roots.len() > 1 {
            diagnostics.push(Diagnostic {
                severity: Severity::Warning,
                rule: "disconnected",
                location: "instance hierarchy".into(),
                message: format!("connection graph splits into {} components", roots.len()),
            });
        }
    }

    diagnostics
}

fn find(component: &BTreeMap<&str, usize>, id: &str) -> usize {
    component.get(id).copied().unwrap_or(usize::MAX)
}

fn union(component: &mut BTreeMap<&str, usize>, a: &str, b: &str) {
    let (ra, rb) = (find(component, a), find(component, b));
    if ra == usize::MAX || rb == usize::MAX || ra == rb {
        return;
    }
    let (keep, merge) = (ra.min(rb), ra.max(rb));
    for slot in component.values_mut() {
        if *slot == merge {
            *slot = keep;
        }
    }
}
