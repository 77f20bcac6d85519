//! Serializes the retained document model back to CAEX XML.

use std::fmt::Write;

use super::{AttributeDef, CaexDocument, InternalElement};

/// Renders the document model as CAEX XML. Reparsing the output yields an
/// equal model, so round-trips are lossless on retained content.
pub fn write_caex(doc: &CaexDocument) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n");
    out.push_str("<CAEXFile>\n");
    for lib in &doc.interface_libs {
        let _ = writeln!(out, "  <InterfaceClassLib Name=\"{}\">", escape(&lib.name));
        if let Some(version) = &lib.version {
            let _ = writeln!(out, "    <Version>{}</Version>", escape(version));
        }
        for class in &lib.classes {
            let _ = writeln!(out, "    <InterfaceClass Name=\"{}\" />", escape(&class.name));
        }
        out.push_str("  </InterfaceClassLib>\n");
    }
    for lib in &doc.role_libs {
        let _ = write!(out, "  <RoleClassLib Name=\"{}\">", escape(&lib.name));
        if let Some(version) = &lib.version {
            let _ = write!(out, "<Version>{}</Version>", escape(version));
        }
        out.push_str("</RoleClassLib>\n");
    }
    for lib in &doc.system_unit_libs {
        let _ = writeln!(out, "  <SystemUnitClassLib Name=\"{}\">", escape(&lib.name));
        if let Some(version) = &lib.version {
            let _ = writeln!(out, "    <Version>{}</Version>", escape(version));
        }
        for class in &lib.classes {
            let _ = writeln!(out, "    <SystemUnitClass Name=\"{}\">", escape(&class.name));
            for attr in &class.attributes {
                write_attribute(&mut out, attr, 6);
            }
            for iface in &class.external_interfaces {
                let _ = writeln!(
                    out,
                    "      <ExternalInterface Name=\"{}\" RefBaseClassPath=\"{}\" ID=\"{}\" />",
                    escape(&iface.name),
                    escape(&iface.interface_class_path),
                    escape(&iface.id),
                );
            }
            out.push_str("    </SystemUnitClass>\n");
        }
        out.push_str("  </SystemUnitClassLib>\n");
    }
    for hierarchy in &doc.instance_hierarchies {
        let _ = writeln!(out, "  <InstanceHierarchy Name=\"{}\">", escape(&hierarchy.name));
        if let Some(version) = &hierarchy.version {
            let _ = writeln!(out, "    <Version>{}</Version>", escape(version));
        }
        for element in &hierarchy.elements {
            write_element(&mut out, element, 4);
        }
        out.push_str("  </InstanceHierarchy>\n");
    }
    out.push_str("</CAEXFile>\n");
    out
}

fn write_attribute(out: &mut String, attr: &AttributeDef, indent: usize) {
    let pad = " ".repeat(indent);
    let _ = write!(out, "{pad}<Attribute Name=\"{}\"", escape(&attr.name));
    if let Some(dt) = &attr.data_type {
        let _ = write!(out, " AttributeDataType=\"{}\"", escape(dt));
    }
    let no_body = attr.description.is_none() && attr.default_value.is_none() && attr.value.is_none();
    if no_body {
        out.push_str(" />\n");
        return;
    }
    out.push_str(">\n");
    if let Some(text) = &attr.description {
        let _ = writeln!(out, "{pad}  <Description>{}</Description>", escape(text));
    }
    if let Some(text) = &attr.default_value {
        let _ = writeln!(out, "{pad}  <DefaultValue>{}</DefaultValue>", escape(text));
    }
    if let Some(text) = &attr.value {
        let _ = writeln!(out, "{pad}  <Value>{}</Value>", escape(text));
    }
    let _ = writeln!(out, "{pad}</Attribute>");
}

fn write_element(out: &mut String, element: &InternalElement, indent: usize) {
    let pad = " ".repeat(indent);
    let _ = write!(out, "{pad}<InternalElement Name=\"{}\"", escape(&element.name));
    if let Some(path) = &element.ref_system_unit_path {
        let _ = write!(out, " RefBaseSystemUnitPath=\"{}\"", escape(path));
    }
    let _ = writeln!(out, " ID=\"{}\">", escape(&element.id));
    for attr in &element.attributes {
        write_attribute(out, attr, indent + 2);
    }
    for child in &element.children {
        write_element(out, child, indent + 2);
    }
    for link in &element.internal_links {
        let _ = writeln!(
            out,
            "{pad}  <InternalLink Name=\"{}\" RefPartnerSideA=\"{}\" RefPartnerSideB=\"{}\" />",
            escape(&link.name),
            escape(&link.ref_partner_a),
            escape(&link.ref_partner_b),
        );
    }
    let _ = writeln!(out, "{pad}</InternalElement>");
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caex::parse_caex;

    #[test]
    fn round_trip_preserves_model() {
        let xml = r#"<CAEXFile>
  <InterfaceClassLib Name="Ifaces"><InterfaceClass Name="IPlug" /></InterfaceClassLib>
  <RoleClassLib Name="Roles"><Version>2</Version></RoleClassLib>
  <SystemUnitClassLib Name="Lib">
    <SystemUnitClass Name="Block">
      <Attribute Name="color" AttributeDataType="xs:string"><Description>c &amp; d</Description></Attribute>
      <Attribute Name="top"><DefaultValue>0,0.5,0</DefaultValue></Attribute>
      <ExternalInterface Name="top" RefBaseClassPath="Ifaces/IPlug" ID="11111111-1111-4111-8111-111111111111" />
    </SystemUnitClass>
  </SystemUnitClassLib>
  <InstanceHierarchy Name="P">
    <InternalElement Name="root" ID="00000000-0000-4000-8000-000000000001">
      <InternalElement Name="b1" RefBaseSystemUnitPath="Lib/Block" ID="00000000-0000-4000-8000-000000000002">
        <Attribute Name="color"><Value>red</Value></Attribute>
      </InternalElement>
      <InternalLink Name="L1" RefPartnerSideA="00000000-0000-4000-8000-000000000002:top" RefPartnerSideB="00000000-0000-4000-8000-000000000002:top" />
    </InternalElement>
  </InstanceHierarchy>
</CAEXFile>"#;
        let doc = parse_caex(xml).unwrap();
        let rendered = write_caex(&doc);
        let reparsed = parse_caex(&rendered).unwrap();
        assert_eq!(doc, reparsed);
        // and the writer is stable on its own output
        assert_eq!(rendered, write_caex(&reparsed));
    }
}
