use morphtile::builtins;
use morphtile::geometry::Isometry;
use morphtile::patch::Patch;
use morphtile::protoset::PlacedTile;
use morphtile::render::{render_patch, render_protoset, RenderError, RenderStyle};
use morphtile::scalar::Scalar;

const SVG: &str = "http://www.w3.org/2000/svg";

/// Well-formed, in the SVG namespace, and only the elements and
/// attributes SVG 1.1 defines for them.
fn check_svg(text: &str) -> roxmltree::Document<'_> {
    let doc = roxmltree::Document::parse(text).expect("well-formed XML");
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(root.attribute("version"), Some("1.1"));
    for n in doc.descendants().filter(|n| n.is_element()) {
        assert_eq!(n.tag_name().namespace(), Some(SVG));
        let allowed: &[&str] = match n.tag_name().name() {
            "svg" => &["version", "width", "height", "viewBox"],
            "g" => &["class", "stroke", "stroke-width", "stroke-linejoin", "fill", "font-family", "font-size", "text-anchor"],
            "path" => &["d", "fill", "data-tile"],
            "text" => &["x", "y"],
            other => panic!("unexpected element {other}"),
        };
        for a in n.attributes() {
            assert!(allowed.contains(&a.name()), "{} on {}", a.name(), n.tag_name().name());
        }
    }
    doc
}

fn tile_paths<'a>(doc: &'a roxmltree::Document<'a>) -> Vec<roxmltree::Node<'a, 'a>> {
    doc.descendants().filter(|n| n.has_tag_name("path") && n.attribute("data-tile").is_some()).collect()
}

#[test]
fn unit_square_patch() {
    let ps = builtins::unit_square();
    let svg = render_patch(&ps, &Patch::single("square"), &RenderStyle::default()).unwrap();
    let doc = check_svg(&svg);
    let paths = tile_paths(&doc);
    assert_eq!(paths.len(), 1);
    let d = paths[0].attribute("d").unwrap();
    assert_eq!(d.matches('M').count() + d.matches('L').count(), 4);
    assert!(d.ends_with('Z'));
    assert!(d.starts_with("M 2.000000000 102.000000000"));
}

#[test]
fn fig7_with_marks() {
    let ps = morphtile::convexify::build_fig7_instance().unwrap();
    let style = RenderStyle { show_marks: true, ..RenderStyle::default() };
    let svg = render_protoset(&ps, &style).unwrap();
    let doc = check_svg(&svg);
    assert_eq!(tile_paths(&doc).len(), 6);
    let marks = doc.descendants().find(|n| n.attribute("class") == Some("marks")).expect("mark overlay");
    assert_eq!(marks.attribute("stroke"), Some("#e00000"));
    let n_marks: usize = ps.tiles.iter().map(|t| t.marks.len()).sum();
    assert!(n_marks > 0);
    assert_eq!(marks.children().filter(|n| n.has_tag_name("path")).count(), n_marks);
}

#[test]
fn labels_and_decimals() {
    let ps = builtins::sigma3_fig5();
    let style = RenderStyle { show_labels: true, decimals: 2, ..RenderStyle::default() };
    let svg = render_protoset(&ps, &style).unwrap();
    let doc = check_svg(&svg);
    let texts: Vec<&str> = doc.descendants().filter(|n| n.has_tag_name("text")).filter_map(|n| n.text()).collect();
    assert!(texts.contains(&"+a") && texts.contains(&"-a"));
    let d = tile_paths(&doc)[0].attribute("d").unwrap();
    assert!(d.split(' ').filter(|w| w.contains('.')).all(|w| w.split('.').nth(1).unwrap().len() == 2));
    assert!(!svg.contains("-0.00 ") && !svg.contains("\"-0.00\""));
}

#[test]
fn byte_identical() {
    let ps = builtins::schmitt_fig4();
    let patch = Patch::new(vec![
        PlacedTile::new("right", Isometry::identity()),
        PlacedTile::new("left", Isometry::rotation_30(1, &morphtile::geometry::Point::int(7, 0))),
    ]);
    let style = RenderStyle { show_labels: true, show_marks: true, ..RenderStyle::default() };
    let a = render_patch(&ps, &patch, &style).unwrap();
    let b = render_patch(&ps, &patch, &style).unwrap();
    assert_eq!(a.as_bytes(), b.as_bytes());
}

#[test]
fn refuses_bad_input() {
    let ps = builtins::unit_square();
    let style = RenderStyle { scale: Scalar::zero(), ..RenderStyle::default() };
    assert!(matches!(render_patch(&ps, &Patch::single("square"), &style), Err(RenderError::Scale)));
    assert!(matches!(render_patch(&ps, &Patch::new(vec![]), &RenderStyle::default()), Err(RenderError::Empty)));
    assert!(render_patch(&ps, &Patch::single("nope"), &RenderStyle::default()).is_err());
}
