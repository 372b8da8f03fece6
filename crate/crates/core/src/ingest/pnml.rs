//! PNML (P/T net) import and export.
//!
//! Only `place`, `transition` and `arc` elements are read, wherever they sit
//! below `<net>`; pages are flattened and graphics are ignored. Element ids
//! become node names.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::net::{Marking, NetBuilder, PetriNet, PlaceId, TransitionId};

const PNML_NS: &str = "http://www.pnml.org/version-2009/grammar/pnml";
const PTNET_TYPE: &str = "http://www.pnml.org/version-2009/grammar/ptnet";

#[derive(Clone, Copy)]
enum Endpoint {
    Place(PlaceId),
    Transition(TransitionId),
}

/// Text content of `<child><text>..</text></child>` (or `<value>`, used by
/// older PNML dialects).
fn labelled_number(node: roxmltree::Node, child: &str, id: &str) -> Result<Option<u64>> {
    let Some(label) = node.children().find(|c| c.has_tag_name(child)) else {
        return Ok(None);
    };
    let text = label
        .children()
        .find(|c| c.has_tag_name("text") || c.has_tag_name("value"))
        .and_then(|c| c.text())
        .or_else(|| label.text())
        .unwrap_or("")
        .trim();
    if text.is_empty() {
        return Ok(None);
    }
    text.parse::<u64>()
        .map(Some)
        .map_err(|_| Error::Format(format!("`{id}`: {child} `{text}` is not a natural number")))
}

pub fn parse_pnml(xml: &str) -> Result<(PetriNet, Marking)> {
    let doc = roxmltree::Document::parse(xml).map_err(|e| Error::Format(e.to_string()))?;
    let net_node = doc
        .descendants()
        .find(|n| n.has_tag_name("net"))
        .ok_or_else(|| Error::Format("no <net> element".into()))?;

    let mut b = NetBuilder::new();
    let mut ids: HashMap<String, Endpoint> = HashMap::new();
    let mut initial = Vec::new();
    let id_of = |n: roxmltree::Node| -> Result<String> {
        n.attribute("id")
            .map(str::to_string)
            .ok_or_else(|| Error::Format(format!("<{}> without id", n.tag_name().name())))
    };
    let dup = |e: Error| match e {
        Error::DuplicateName(id) => Error::Format(format!("duplicate id `{id}`")),
        other => other,
    };

    for n in net_node.descendants() {
        if n.has_tag_name("place") {
            let id = id_of(n)?;
            let p = b.add_place(id.clone()).map_err(dup)?;
            ids.insert(id.clone(), Endpoint::Place(p));
            initial.push(labelled_number(n, "initialMarking", &id)?.unwrap_or(0));
        } else if n.has_tag_name("transition") {
            let id = id_of(n)?;
            let t = b.add_transition(id.clone()).map_err(dup)?;
            ids.insert(id, Endpoint::Transition(t));
        }
    }

    for n in net_node.descendants().filter(|n| n.has_tag_name("arc")) {
        let id = n.attribute("id").unwrap_or("?");
        let end = |attr: &str| -> Result<Endpoint> {
            let r = n
                .attribute(attr)
                .ok_or_else(|| Error::Format(format!("arc `{id}` has no {attr}")))?;
            ids.get(r)
                .copied()
                .ok_or_else(|| Error::Format(format!("arc `{id}`: unknown {attr} `{r}`")))
        };
        let weight = labelled_number(n, "inscription", id)?.unwrap_or(1);
        match (end("source")?, end("target")?) {
            (Endpoint::Place(p), Endpoint::Transition(t)) => b.add_input(p, t, weight)?,
            (Endpoint::Transition(t), Endpoint::Place(p)) => b.add_output(t, p, weight)?,
            _ => {
                return Err(Error::Format(format!(
                    "arc `{id}` connects two nodes of the same kind"
                )))
            }
        }
    }

    Ok((b.build(), Marking::from_vec(initial)))
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Writes places, then transitions, then arcs, each in index order.
pub fn export_pnml(net: &PetriNet, marking: &Marking) -> String {
    export_pnml_named(net, marking, "net")
}

pub fn export_pnml_named(net: &PetriNet, marking: &Marking, net_id: &str) -> String {
    let mut x = String::new();
    let _ = writeln!(x, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(x, r#"<pnml xmlns="{PNML_NS}">"#);
    let _ = writeln!(x, r#"  <net id="{}" type="{PTNET_TYPE}">"#, escape(net_id));
    let _ = writeln!(x, r#"    <page id="page0">"#);
    for p in net.places() {
        let name = escape(net.place_name(p));
        let tokens = marking.as_slice().get(p.0).copied().unwrap_or(0);
        let _ = write!(x, r#"      <place id="{name}"><name><text>{name}</text></name>"#);
        if tokens > 0 {
            let _ = write!(x, "<initialMarking><text>{tokens}</text></initialMarking>");
        }
        let _ = writeln!(x, "</place>");
    }
    for t in net.transitions() {
        let name = escape(net.transition_name(t));
        let _ = writeln!(x, r#"      <transition id="{name}"><name><text>{name}</text></name></transition>"#);
    }
    let mut arc_no = 0;
    let mut arc = |x: &mut String, src: &str, dst: &str, w: u64| {
        let _ = write!(x, r#"      <arc id="a{arc_no}" source="{}" target="{}">"#, escape(src), escape(dst));
        if w != 1 {
            let _ = write!(x, "<inscription><text>{w}</text></inscription>");
        }
        let _ = writeln!(x, "</arc>");
        arc_no += 1;
    };
    for t in net.transitions() {
        for &(p, w) in net.inputs(t) {
            arc(&mut x, net.place_name(p), net.transition_name(t), w);
        }
        for &(p, w) in net.outputs(t) {
            arc(&mut x, net.transition_name(t), net.place_name(p), w);
        }
    }
    let _ = writeln!(x, "    </page>");
    let _ = writeln!(x, "  </net>");
    let _ = writeln!(x, "</pnml>");
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    const MINIMAL: &str = r#"<pnml><net id="n" type="x"><page id="g">
        <place id="p"><initialMarking><text>2</text></initialMarking>
          <graphics><position x="1" y="2"/></graphics></place>
        <transition id="t"/>
        <arc id="a" source="p" target="t"/>
    </page></net></pnml>"#;

    #[test]
    fn minimal_document() {
        let (net, m) = parse_pnml(MINIMAL).unwrap();
        assert_eq!(net.num_places(), 1);
        assert_eq!(net.weight_pt(PlaceId(0), TransitionId(0)), 1);
        assert_eq!(m.as_slice(), &[2]);
    }

    #[test]
    fn inscriptions_are_weights() {
        let xml = MINIMAL.replace(
            r#"<arc id="a" source="p" target="t"/>"#,
            r#"<arc id="a" source="p" target="t"><inscription><text>3</text></inscription></arc>"#,
        );
        let (net, _) = parse_pnml(&xml).unwrap();
        assert_eq!(net.weight_pt(PlaceId(0), TransitionId(0)), 3);
    }

    #[test]
    fn rejects_same_kind_arcs_and_unknown_ids() {
        let xml = MINIMAL.replace(r#"target="t""#, r#"target="p""#);
        assert!(matches!(parse_pnml(&xml), Err(Error::Format(_))));
        let xml = MINIMAL.replace(r#"target="t""#, r#"target="nowhere""#);
        assert!(matches!(parse_pnml(&xml), Err(Error::Format(m)) if m.contains("nowhere")));
        assert!(matches!(parse_pnml("<pnml>"), Err(Error::Format(_))));
        assert!(matches!(parse_pnml("<pnml/>"), Err(Error::Format(_))));
    }

    #[test]
    fn empty_net_exports_an_empty_page() {
        let net = NetBuilder::new().build();
        let xml = export_pnml(&net, &Marking::zero(&net));
        assert!(xml.contains(r#"<page id="page0">"#));
        let (back, _) = parse_pnml(&xml).unwrap();
        assert_eq!(back.num_places() + back.num_transitions(), 0);
    }

    #[test]
    fn enzyme_element_counts() {
        let (net, m) = corpus::enzyme();
        let xml = export_pnml(&net, &m);
        assert_eq!(xml.matches("<place ").count(), 4);
        assert_eq!(xml.matches("<transition ").count(), 3);
        assert_eq!(xml.matches("<arc ").count(), 9);
        let (back, m2) = parse_pnml(&xml).unwrap();
        assert_eq!(back, net);
        assert_eq!(m2, m);
    }

    #[test]
    fn names_are_escaped() {
        let mut b = NetBuilder::new();
        b.add_place("a<b&\"c\"").unwrap();
        let net = b.build();
        let (back, _) = parse_pnml(&export_pnml(&net, &Marking::zero(&net))).unwrap();
        assert_eq!(back.place_name(PlaceId(0)), "a<b&\"c\"");
    }
}
