//! Graphviz export of round graphs.

use std::fmt::Write;

use super::trace::vertex_label;
use super::{Resolution, RoundTrace, Vertex};
use crate::model::Instance;
use crate::Scalar;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One `digraph` for the round: real agents as circles labelled with their
/// current target, virtual owners as filled red double circles, edges
/// labelled with their weight to two decimals. The resolution order is
/// listed in the graph label.
pub fn round_to_dot<F: Scalar>(instance: &Instance<F>, trace: &RoundTrace<F>) -> String {
    let g = &trace.graph;
    let label = |v: Vertex| vertex_label(instance, g, v);
    let mut out = String::new();
    let _ = writeln!(out, "digraph round_{} {{", trace.round);
    let _ = writeln!(out, "  rankdir=LR;");

    let mut notes = vec![format!("round {}", trace.round)];
    let mut step = 0;
    let mut annotate = |kind: &str, rs: &[Resolution<F>]| {
        for r in rs {
            step += 1;
            let names: Vec<String> = r.vertices.iter().map(|&v| label(v)).collect();
            notes.push(format!(
                "{step}. {kind} ({}) score {:.2} {}",
                names.join(" -> "),
                r.score,
                if r.resolved { "resolved" } else { "skipped" }
            ));
        }
    };
    annotate("cycle", &trace.cycles);
    annotate("chain", &trace.chains);
    let graph_label: String = notes.iter().map(|n| format!("{n}\\l")).collect();
    let _ = writeln!(out, "  label=\"{}\";", graph_label.replace('"', "\\\""));
    let _ = writeln!(out, "  labelloc=b;");

    for v in g.vertices() {
        match v {
            Vertex::Agent(i) => {
                let target = g
                    .out_edges(i)
                    .map(|e| format!("\\n-> {}", instance.resources[e.resource].id))
                    .unwrap_or_default();
                let _ = writeln!(
                    out,
                    "  {} [shape=circle, label=\"{}{}\"];",
                    quote(&label(v)),
                    instance.agents[i].id,
                    target
                );
            }
            Vertex::Virtual(_) => {
                let _ = writeln!(
                    out,
                    "  {} [shape=doublecircle, style=filled, fillcolor=\"#f4cccc\", color=red];",
                    quote(&label(v))
                );
            }
        }
    }
    for e in g.edges() {
        let _ = writeln!(
            out,
            "  {} -> {} [label=\"{:.2}\"];",
            quote(&label(e.from)),
            quote(&label(e.to)),
            e.weight
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run;
    use crate::model::fixtures::fig3a;

    #[test]
    fn fig3a_round_one() {
        let inst = fig3a();
        let out = run(&inst).unwrap();
        let dot = round_to_dot(&inst, &out.rounds[0]);
        assert!(dot.starts_with("digraph round_1 {"));
        for edge in [
            "\"a1\" -> \"a3\" [label=\"1.00\"]",
            "\"a2\" -> \"a1\" [label=\"1.00\"]",
            "\"a3\" -> \"a2\" [label=\"0.29\"]",
            "\"a3\" -> \"a4\" [label=\"0.29\"]",
            "\"a4\" -> \"a3\" [label=\"0.29\"]",
        ] {
            assert!(dot.contains(edge), "missing {edge} in\n{dot}");
        }
        assert_eq!(dot.matches(" -> \"").count(), 5);
        assert!(dot.contains("1. cycle (a1 -> a3 -> a2) score 1.00 resolved"));
        assert!(dot.contains("2. cycle (a3 -> a4) score 0.29 skipped"));
    }
}
