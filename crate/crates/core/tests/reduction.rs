use proptest::prelude::*;

use transitmap::graph::Ordering;
use transitmap::instance::{Instance, WeightPolicy};
use transitmap::optimize::{brute_force, evaluate, DEFAULT_BUDGET};
use transitmap::reduce::{prune, rule1_applicable, split_components, unfold, unfold_components, Action, ReductionMap};
use transitmap::synth::{build, junction, random_graph, station, RandomSpec};

fn policy(uniform: bool) -> WeightPolicy {
    if uniform {
        WeightPolicy::uniform()
    } else {
        WeightPolicy::default()
    }
}

/// Brute-force optimum of every component, unfolded onto the input.
fn reduced_optimum(inst: &Instance) -> (i64, Ordering) {
    let red = prune(inst);
    let parts = split_components(&red.core);
    let mut total = 0;
    let mut ords = Vec::new();
    for c in &parts.components {
        let (o, b) = brute_force(&c.instance, DEFAULT_BUDGET).unwrap();
        total += b.objective;
        ords.push(o);
    }
    let core = unfold_components(red.core.graph.edges.len(), &parts, &ords).unwrap();
    (total, unfold(&red.map, &core).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn reductions_preserve_the_optimum(seed in 0u64..1_000_000, sep: bool, uniform: bool, branch: bool) {
        let spec = RandomSpec { branch_prob: if branch { 0.4 } else { 0.0 }, ..RandomSpec::default() };
        let inst = Instance::new(random_graph(seed, &spec), &policy(uniform)).with_separations(sep);
        let (_, whole) = brute_force(&inst, DEFAULT_BUDGET).unwrap();
        let (total, unfolded) = reduced_optimum(&inst);
        prop_assert_eq!(evaluate(&inst, &unfolded).unwrap().objective, total);
        prop_assert_eq!(total, whole.objective);
    }

    #[test]
    fn pruning_reaches_a_fixed_point(seed in 0u64..1_000_000, sep: bool, uniform: bool) {
        let spec = RandomSpec { nodes: 8, max_edges: 10, lines: 5, max_line_len: 6, branch_prob: 0.2, station_prob: 0.6 };
        let inst = Instance::new(random_graph(seed, &spec), &policy(uniform)).with_separations(sep);
        let once = prune(&inst);
        let twice = prune(&once.core);
        prop_assert!(twice.map.is_identity(), "{:?}", twice.map.actions);
        for v in 0..once.core.graph.nodes.len() {
            prop_assert!(!rule1_applicable(&once.core, v));
        }
    }

    #[test]
    fn chain_rule_applies_to_every_w_node_without_branching(seed in 0u64..1_000_000) {
        // with uniform weights and no branching lines every degree-2 node
        // with equal line sets on both sides is contracted
        let spec = RandomSpec { nodes: 8, max_edges: 10, lines: 4, max_line_len: 6, branch_prob: 0.0, station_prob: 0.5 };
        let inst = Instance::new(random_graph(seed, &spec), &WeightPolicy::uniform());
        let core = prune(&inst).core;
        let adj = core.graph.adjacency();
        for (v, inc) in adj.iter().enumerate() {
            if let [e, f] = inc[..] {
                let (ge, gf) = (&core.graph.edges[e], &core.graph.edges[f]);
                let w_member = ge.lines == gf.lines && ge.other(v) != gf.other(v);
                prop_assert!(!w_member, "node {} still in W", core.graph.nodes[v].id);
            }
        }
    }

    #[test]
    fn unfolded_objective_equals_component_sum(seed in 0u64..1_000_000, sep: bool) {
        // any component orderings, not only optimal ones, transfer exactly
        let spec = RandomSpec { branch_prob: 0.3, ..RandomSpec::default() };
        let inst = Instance::new(random_graph(seed, &spec), &WeightPolicy::default()).with_separations(sep);
        let red = prune(&inst);
        let parts = split_components(&red.core);
        let ords: Vec<Ordering> = parts
            .components
            .iter()
            .map(|c| {
                let mut o = Ordering::identity(&c.instance.graph);
                for (i, e) in o.edges.iter_mut().enumerate() {
                    if (seed >> (i % 60)) & 1 == 1 {
                        e.reverse();
                    }
                }
                o
            })
            .collect();
        let total: i64 = parts
            .components
            .iter()
            .zip(&ords)
            .map(|(c, o)| evaluate(&c.instance, o).unwrap().objective)
            .sum();
        let core = unfold_components(red.core.graph.edges.len(), &parts, &ords).unwrap();
        let o = unfold(&red.map, &core).unwrap();
        prop_assert_eq!(evaluate(&inst, &o).unwrap().objective, total);
    }
}

#[test]
fn path_collapses_to_one_edge() {
    // line 3 continues past C so the merged edge is not a terminus edge
    let g = build(
        vec![
            station("A", 0.0, 0.0),
            station("B", 100.0, 0.0),
            station("C", 200.0, 10.0),
            station("D", 300.0, 80.0),
            station("E", 300.0, -80.0),
        ],
        &[(0, 1, &[0, 1]), (1, 2, &[0, 1]), (2, 3, &[0, 2]), (2, 4, &[1, 2])],
        &["1", "2", "3"],
    );
    // the bundle rule would also fire here; price separations to isolate
    // the chain rule
    let inst = Instance::new(g, &WeightPolicy::default()).with_separations(true);
    let red = prune(&inst);
    assert!(matches!(red.map.actions[0], Action::ChainContraction { .. }));
    let core = &red.core.graph;
    let ab = core
        .edges
        .iter()
        .filter(|e| {
            let ends = [core.nodes[e.a].id.as_str(), core.nodes[e.b].id.as_str()];
            ends.contains(&"A") || ends.contains(&"B")
        })
        .collect::<Vec<_>>();
    assert_eq!(ab.len(), 1);
    let ends = [core.nodes[ab[0].a].id.as_str(), core.nodes[ab[0].b].id.as_str()];
    assert!(ends == ["A", "C"] || ends == ["C", "A"], "{ends:?}");
    assert_eq!(ab[0].lines.len(), 2);
    assert!(core.nodes.iter().all(|n| n.id != "B"));
}

#[test]
fn fully_terminating_path_vanishes() {
    let g = build(
        vec![station("A", 0.0, 0.0), station("B", 100.0, 0.0), station("C", 200.0, 10.0)],
        &[(0, 1, &[0, 1]), (1, 2, &[0, 1])],
        &["1", "2"],
    );
    let red = prune(&Instance::new(g, &WeightPolicy::default()).with_separations(true));
    assert!(red.core.graph.edges.is_empty());
    assert!(red.map.actions.iter().any(|a| matches!(a, Action::TerminusEdgeRemoval { .. })));
    let o = unfold(&red.map, &Ordering { edges: vec![] }).unwrap();
    assert_eq!(o.edges.len(), 2);
}

#[test]
fn identity_map_returns_input() {
    // a three-way junction with branching lines: nothing to prune
    let g = build(
        vec![
            junction("c", 0.0, 0.0),
            station("x", 100.0, 0.0),
            station("y", -100.0, 5.0),
            station("z", 0.0, 100.0),
        ],
        &[(0, 1, &[0, 1]), (0, 2, &[0, 2]), (0, 3, &[1, 2])],
        &["a", "b", "c"],
    );
    let inst = Instance::new(g, &WeightPolicy::default());
    let red = prune(&inst);
    assert!(red.map.is_identity());
    let o = Ordering {
        edges: vec![vec![1, 0], vec![2, 0], vec![2, 1]],
    };
    assert_eq!(unfold(&red.map, &o).unwrap(), o);
}

#[test]
fn collapsed_bundle_expands_in_recorded_order() {
    let map = ReductionMap {
        edge_ids: vec!["e".into()],
        original_edges: 1,
        line_ids: vec!["A".into(), "B".into(), "C".into(), "D".into()],
        actions: vec![Action::BundleCollapse {
            line: 0,
            members: vec![0, 1],
            edges: vec![0],
            reversed_on: vec![],
        }],
        core_edges: vec![0],
        core_lines: vec![0, 2, 3],
    };
    // core lines: X (= A+B), C, D; X at position 2
    let core = Ordering {
        edges: vec![vec![1, 0, 2]],
    };
    let o = unfold(&map, &core).unwrap();
    assert_eq!(o.edges[0], vec![2, 0, 1, 3]);
    let pos = |l: usize| o.edges[0].iter().position(|&x| x == l).unwrap() + 1;
    assert_eq!((pos(0), pos(1)), (2, 3));
}

#[test]
fn single_line_chain_splits_into_trivial_components() {
    // alternating station/junction chain with one line and bends, so the
    // chain rule cannot merge across the kinks of differently weighted nodes
    let g = build(
        vec![
            station("a", 0.0, 0.0),
            junction("b", 100.0, 30.0),
            station("c", 200.0, 0.0),
            junction("d", 300.0, 40.0),
        ],
        &[(0, 1, &[0]), (1, 2, &[0]), (2, 3, &[0])],
        &["L"],
    );
    let inst = Instance::new(g, &WeightPolicy::default()).with_separations(true);
    let red = prune(&inst);
    let parts = split_components(&red.core);
    assert!(parts.components.iter().all(|c| c.instance.graph.edges.len() == 1));
    assert!(parts.components.iter().all(|c| c.instance.is_trivial()));
    assert_eq!(parts.nontrivial(), 0);
}

#[test]
fn reduction_map_serializes() {
    let g = build(
        vec![station("A", 0.0, 0.0), station("B", 100.0, 0.0), station("C", 200.0, 10.0)],
        &[(0, 1, &[0, 1]), (1, 2, &[0, 1])],
        &["1", "2"],
    );
    let red = prune(&Instance::new(g, &WeightPolicy::default()));
    let text = red.map.to_json();
    let back: ReductionMap = serde_json::from_str(&text).unwrap();
    assert_eq!(back, red.map);
    assert!(text.contains("\"action\""));
}
