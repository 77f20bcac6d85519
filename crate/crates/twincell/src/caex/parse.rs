//! CAEX XML parsing on top of a DOM tree.

use std::collections::HashSet;

use roxmltree::{Document, Node};

use super::{
    AttributeDef, CaexDocument, CaexError, ExternalInterfaceDef, InstanceHierarchy,
    InterfaceClass, InterfaceClassLib, InternalElement, InternalLink, RoleClassLib,
    SystemUnitClass, SystemUnitClassLib,
};

/// Parses CAEX XML into a [`CaexDocument`].
///
/// The capture is lossless for the recognized vocabulary and preserves
/// element order; unrecognized elements are skipped. Fails on malformed XML
/// (with a line number), on duplicate or non-UUID `InternalElement` IDs, and
/// on empty or duplicated class names.
pub fn parse_caex(xml_text: &str) -> Result<CaexDocument, CaexError> {
    let dom = Document::parse(xml_text).map_err(|e| CaexError::Parse {
        line: e.pos().row,
        message: e.to_string(),
    })?;

    let mut doc = CaexDocument::default();
    let mut seen_ids = HashSet::new();

    for node in dom.root_element().children().filter(Node::is_element) {
        match node.tag_name().name() {
            "InterfaceClassLib" => doc.interface_libs.push(parse_interface_lib(&dom, node)?),
            "RoleClassLib" => doc.role_libs.push(RoleClassLib {
                name: required_attr(&dom, node, "Name")?,
                version: child_text(node, "Version"),
            }),
            "SystemUnitClassLib" => doc.system_unit_libs.push(parse_system_unit_lib(&dom, node)?),
            "InstanceHierarchy" => {
                let mut elements = Vec::new();
                for child in node.children().filter(Node::is_element) {
                    if child.tag_name().name() == "InternalElement" {
                        elements.push(parse_internal_element(&dom, child, &mut seen_ids)?);
                    }
                }
                doc.instance_hierarchies.push(InstanceHierarchy {
                    name: required_attr(&dom, node, "Name")?,
                    version: child_text(node, "Version"),
                    elements,
                });
            }
            _ => {}
        }
    }
    Ok(doc)
}

fn line_of(dom: &Document, node: Node) -> u32 {
    dom.text_pos_at(node.range().start).row
}

fn structural(dom: &Document, node: Node, message: String) -> CaexError {
    CaexError::Structural { line: line_of(dom, node), message }
}

fn required_attr(dom: &Document, node: Node, name: &str) -> Result<String, CaexError> {
    match node.attribute(name) {
        Some(v) if !v.is_empty() => Ok(v.to_string()),
        _ => Err(structural(
            dom,
            node,
            format!("<{}> requires a non-empty {} attribute", node.tag_name().name(), name),
        )),
    }
}

fn child_text(node: Node, name: &str) -> Option<String> {
    node.children()
        .filter(Node::is_element)
        .find(|c| c.tag_name().name() == name)
        .map(|c| c.text().unwrap_or_default().trim().to_string())
}

fn parse_interface_lib(dom: &Document, node: Node) -> Result<InterfaceClassLib, CaexError> {
    let name = required_attr(dom, node, "Name")?;
    let mut classes: Vec<InterfaceClass> = Vec::new();
    for child in node.children().filter(Node::is_element) {
        if child.tag_name().name() == "InterfaceClass" {
            let class_name = required_attr(dom, child, "Name")?;
            if classes.iter().any(|c| c.name == class_name) {
                return Err(structural(
                    dom,
                    child,
                    format!("duplicate InterfaceClass '{}' in library '{}'", class_name, name),
                ));
            }
            classes.push(InterfaceClass { name: class_name });
        }
    }
    Ok(InterfaceClassLib { name, version: child_text(node, "Version"), classes })
}

fn parse_system_unit_lib(dom: &Document, node: Node) -> Result<SystemUnitClassLib, CaexError> {
    let name = required_attr(dom, node, "Name")?;
    let mut classes: Vec<SystemUnitClass> = Vec::new();
    for child in node.children().filter(Node::is_element) {
        if child.tag_name().name() == "SystemUnitClass" {
            let class = parse_system_unit_class(dom, child)?;
            if classes.iter().any(|c| c.name == class.name) {
                return Err(structural(
                    dom,
                    child,
                    format!("duplicate SystemUnitClass '{}' in library '{}'", class.name, name),
                ));
            }
            classes.push(class);
        }
    }
    Ok(SystemUnitClassLib { name, version: child_text(node, "Version"), classes })
}

fn parse_system_unit_class(dom: &Document, node: Node) -> Result<SystemUnitClass, CaexError> {
    let name = required_attr(dom, node, "Name")?;
    let mut attributes: Vec<AttributeDef> = Vec::new();
    let mut external_interfaces = Vec::new();
    for child in node.children().filter(Node::is_element) {
        match child.tag_name().name() {
            "Attribute" => {
                let attr = parse_attribute(dom, child)?;
                if attributes.iter().any(|a| a.name == attr.name) {
                    return Err(structural(
                        dom,
                        child,
                        format!("duplicate Attribute '{}' in SystemUnitClass '{}'", attr.name, name),
                    ));
                }
                attributes.push(attr);
            }
            "ExternalInterface" => external_interfaces.push(ExternalInterfaceDef {
                name: required_attr(dom, child, "Name")?,
                interface_class_path: child.attribute("RefBaseClassPath").unwrap_or("").to_string(),
                id: child.attribute("ID").unwrap_or("").to_string(),
            }),
            _ => {}
        }
    }
    Ok(SystemUnitClass { name, attributes, external_interfaces })
}

fn parse_attribute(dom: &Document, node: Node) -> Result<AttributeDef, CaexError> {
    Ok(AttributeDef {
        name: required_attr(dom, node, "Name")?,
        data_type: node.attribute("AttributeDataType").map(str::to_string),
        description: child_text(node, "Description"),
        default_value: child_text(node, "DefaultValue"),
        value: child_text(node, "Value"),
    })
}

fn parse_internal_element(
    dom: &Document,
    node: Node,
    seen_ids: &mut HashSet<String>,
) -> Result<InternalElement, CaexError> {
    let name = required_attr(dom, node, "Name")?;
    let id = required_attr(dom, node, "ID")?;
    if uuid::Uuid::parse_str(&id).is_err() {
        return Err(structural(
            dom,
            node,
            format!("InternalElement '{}' has ID '{}' which is not an RFC 4122 UUID", name, id),
        ));
    }
    if !seen_ids.insert(id.clone()) {
        return Err(structural(
            dom,
            node,
            format!("duplicate InternalElement ID '{}' (element '{}')", id, name),
        ));
    }

    let mut attributes = Vec::new();
    let mut children = Vec::new();
    let mut internal_links = Vec::new();
    for child in node.children().filter(Node::is_element) {
        match child.tag_name().name() {
            "Attribute" => attributes.push(parse_attribute(dom, child)?),
            "InternalElement" => children.push(parse_internal_element(dom, child, seen_ids)?),
            "InternalLink" => internal_links.push(InternalLink {
                name: required_attr(dom, child, "Name")?,
                ref_partner_a: required_attr(dom, child, "RefPartnerSideA")?,
                ref_partner_b: required_attr(dom, child, "RefPartnerSideB")?,
            }),
            _ => {}
        }
    }

    Ok(InternalElement {
        name,
        id,
        ref_system_unit_path: node.attribute("RefBaseSystemUnitPath").map(str::to_string),
        attributes,
        children,
        internal_links,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caex::resolve_link_endpoint;

    const MINI: &str = r#"<?xml version="1.0" encoding="utf-8"?>
<CAEXFile FileName="mini.aml">
  <InterfaceClassLib Name="Ifaces">
    <Version>1.0.0</Version>
    <InterfaceClass Name="IPlug" />
  </InterfaceClassLib>
  <SystemUnitClassLib Name="Lib">
    <SystemUnitClass Name="Block">
      <Attribute Name="color" AttributeDataType="xs:string">
        <Description>color</Description>
      </Attribute>
      <Attribute Name="top">
        <DefaultValue>0,0.5,0</DefaultValue>
      </Attribute>
      <ExternalInterface Name="top" RefBaseClassPath="Ifaces/IPlug" ID="11111111-1111-4111-8111-111111111111" />
    </SystemUnitClass>
  </SystemUnitClassLib>
  <InstanceHierarchy Name="Product">
    <InternalElement Name="root" ID="00000000-0000-4000-8000-000000000001">
      <InternalElement Name="b1" RefBaseSystemUnitPath="Lib/Block" ID="00000000-0000-4000-8000-000000000002">
        <Attribute Name="color"><Value>red</Value></Attribute>
      </InternalElement>
      <InternalLink Name="L1" RefPartnerSideA="00000000-0000-4000-8000-000000000002:top" RefPartnerSideB="00000000-0000-4000-8000-000000000002:top" />
    </InternalElement>
  </InstanceHierarchy>
</CAEXFile>"#;

    #[test]
    fn parses_recognized_vocabulary() {
        let doc = parse_caex(MINI).unwrap();
        assert_eq!(doc.interface_libs.len(), 1);
        assert_eq!(doc.interface_libs[0].classes[0].name, "IPlug");
        assert_eq!(doc.system_unit_libs[0].classes[0].name, "Block");
        let block = &doc.system_unit_libs[0].classes[0];
        assert_eq!(block.attributes[1].default_value.as_deref(), Some("0,0.5,0"));
        let b1 = doc.find_element("00000000-0000-4000-8000-000000000002").unwrap();
        assert_eq!(b1.name, "b1");
        assert_eq!(b1.attributes[0].value.as_deref(), Some("red"));
        assert_eq!(doc.walk_links().len(), 1);
    }

    #[test]
    fn empty_instance_hierarchy_yields_no_elements() {
        let doc = parse_caex(
            r#"<CAEXFile><InstanceHierarchy Name="Empty"></InstanceHierarchy></CAEXFile>"#,
        )
        .unwrap();
        assert!(doc.walk_elements().is_empty());
    }

    #[test]
    fn malformed_xml_reports_line_number() {
        let err = parse_caex("<CAEXFile>\n  <oops\n</CAEXFile>").unwrap_err();
        match err {
            CaexError::Parse { line, .. } => assert!(line >= 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_internal_element_ids_are_rejected() {
        let xml = r#"<CAEXFile><InstanceHierarchy Name="H">
            <InternalElement Name="a" ID="00000000-0000-4000-8000-00000000000a" />
            <InternalElement Name="b" ID="00000000-0000-4000-8000-00000000000a" />
        </InstanceHierarchy></CAEXFile>"#;
        let err = parse_caex(xml).unwrap_err();
        assert!(matches!(err, CaexError::Structural { .. }), "{err:?}");
    }

    #[test]
    fn non_uuid_ids_are_rejected() {
        let xml = r#"<CAEXFile><InstanceHierarchy Name="H">
            <InternalElement Name="a" ID="not-a-uuid" />
        </InstanceHierarchy></CAEXFile>"#;
        assert!(matches!(parse_caex(xml), Err(CaexError::Structural { .. })));
    }

    #[test]
    fn link_endpoints_resolve_and_mismatch() {
        let doc = parse_caex(MINI).unwrap();
        let (id, iface) =
            resolve_link_endpoint(&doc, "00000000-0000-4000-8000-000000000002:top").unwrap();
        assert_eq!(iface, "top");
        assert_eq!(doc.find_element(&id).unwrap().name, "b1");

        assert!(matches!(
            resolve_link_endpoint(&doc, "x"),
            Err(CaexError::MalformedRef(_))
        ));
        assert!(matches!(
            resolve_link_endpoint(&doc, "00000000-0000-4000-8000-0000000000ff:top"),
            Err(CaexError::DanglingLink { .. })
        ));
        assert!(matches!(
            resolve_link_endpoint(&doc, "00000000-0000-4000-8000-000000000002:nosuch"),
            Err(CaexError::InterfaceMismatch { .. })
        ));
    }
}
