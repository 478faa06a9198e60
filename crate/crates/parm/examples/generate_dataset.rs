//! Generates a synthetic graph, writes the TSV pair, and loads it back.
//!
//! Run with: `cargo run --example generate_dataset`

use std::io::Cursor;

use parm::gen::{generate, GenParams};
use parm::PropertyGraph;

fn main() {
    let params = GenParams {
        vertices: 500,
        edges: 1_500,
        labels: 5,
        attributes: 10,
        attrs_per_vertex: 1.8,
        attr_skew: 1.0,
        seed: 42,
        ..GenParams::default()
    };
    let graph = generate(&params).unwrap();

    let dir = std::env::temp_dir().join("parm_generated");
    std::fs::create_dir_all(&dir).unwrap();
    let vpath = dir.join("demo.vertices.tsv");
    let epath = dir.join("demo.edges.tsv");
    let mut vbuf = Vec::new();
    let mut ebuf = Vec::new();
    graph.save(&mut vbuf, &mut ebuf).unwrap();
    std::fs::write(&vpath, &vbuf).unwrap();
    std::fs::write(&epath, &ebuf).unwrap();
    println!("wrote {} and {}", vpath.display(), epath.display());

    let (reloaded, report) =
        PropertyGraph::load(Cursor::new(vbuf), Cursor::new(ebuf)).unwrap();
    assert_eq!(reloaded, graph, "round trip must be lossless");
    println!(
        "round trip ok: {} vertices, {} edges, {} implicit, max in-degree {}",
        reloaded.vertex_count(),
        reloaded.edge_count(),
        report.implicit_vertices,
        reloaded.max_in_degree()
    );
    let top = (0..reloaded.attributes().len() as u32)
        .max_by_key(|&a| reloaded.attr_carriers(a).len())
        .unwrap();
    println!(
        "most common attribute: {} on {} vertices",
        reloaded.attributes().name(top),
        reloaded.attr_carriers(top).len()
    );
}
