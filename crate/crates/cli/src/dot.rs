//! DOT rendering of intersection graphs. With a reduction trace, vertices get
//! their gadget labels and edges are colored by their role in the
//! construction; unexpected edges come out bold red.

use std::collections::HashMap;

use sortsupport::instance::build_intersection_graph;
use sortsupport::reduction::{EdgeKind, ReductionTrace};
use sortsupport::SortInstance;

fn color(kind: EdgeKind) -> &'static str {
    match kind {
        EdgeKind::Up => "blue",
        EdgeKind::Down => "red",
        EdgeKind::UpLinking => "skyblue",
        EdgeKind::DownLinking => "orange",
        EdgeKind::Lateral => "forestgreen",
        EdgeKind::Completion => "gray50",
    }
}

pub fn render(inst: &SortInstance, trace: Option<&ReductionTrace>) -> String {
    let graph = build_intersection_graph(inst);
    let mut out = String::from("graph sortsupport {\n  rankdir=LR;\n  node [shape=box];\n");
    let label = |side: char, i: usize| -> String {
        match trace {
            Some(t) if side == 'u' => t.u_labels[i].clone(),
            Some(t) => t.v_labels[i].clone(),
            None => format!("{side}_{}", i + 1),
        }
    };
    for i in 0..inst.n {
        out.push_str(&format!("  u{} [label=\"{}\"];\n", i + 1, label('u', i)));
    }
    for j in 0..inst.n {
        out.push_str(&format!(
            "  v{} [label=\"{}\", style=rounded];\n",
            j + 1,
            label('v', j)
        ));
    }
    let kinds: HashMap<(usize, usize), EdgeKind> = trace
        .map(|t| t.edges.iter().map(|e| ((e.u, e.v), e.kind)).collect())
        .unwrap_or_default();
    for (u, v) in graph.edges() {
        let attrs = match (trace, kinds.get(&(u, v))) {
            (None, _) => String::new(),
            (Some(_), Some(kind)) => format!(" [color={}]", color(*kind)),
            (Some(_), None) => " [color=red, penwidth=3]".to_string(),
        };
        out.push_str(&format!("  u{} -- v{}{};\n", u + 1, v + 1, attrs));
    }
    out.push_str("}\n");
    out
}
