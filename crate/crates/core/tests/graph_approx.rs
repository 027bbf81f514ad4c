mod common;

use common::{line, random_graph};
use powercast::graph_approx::{
    apsp, cross_distance,
    brute_force_separation, graph_broadcast_4approx, known_graph_convergecast, separation, separation_witness,
};
use powercast::instance_gen::gen_random_line;
use powercast::line_broadcast::compute_optimal_broadcast;
use powercast::line_convergecast::compute_optimal_convergecast;
use powercast::strategy::{max_power_used, verify_broadcast, verify_convergecast};
use powercast::model::Location;
use powercast::{sc, simulate, Network, Scalar, WeightedGraph};

fn graphs() -> impl Iterator<Item = WeightedGraph> {
    (0..200u64).map(|seed| {
        let nodes = 10 + (seed as usize * 7) % 5;
        let agents = 2 + (seed as usize * 5) % 9;
        random_graph(seed, nodes, (seed as usize) % 6, agents)
    })
}

#[test]
fn separation_matches_brute_force() {
    for g in graphs() {
        let a = g.agent_nodes();
        assert_eq!(separation(&g, a).unwrap(), brute_force_separation(&g, a).unwrap());
        let (d, side) = separation_witness(&g, a).unwrap();
        assert_eq!(d, separation(&g, a).unwrap());
        if a.len() > 1 {
            assert!(!side.is_empty() && side.len() < a.len());
        }
    }
}

#[test]
fn known_graph_convergecast_uses_exactly_separation() {
    for g in graphs() {
        let d = separation(&g, g.agent_nodes()).unwrap();
        let (s, _) = known_graph_convergecast(&g).unwrap();
        let tr = simulate(Network::Graph(&g), &s, &d).unwrap();
        assert!(verify_convergecast(&tr).is_ok());
        assert_eq!(max_power_used(&tr).0, d);
    }
}

#[test]
fn broadcast_within_twice_separation() {
    for (i, g) in graphs().enumerate() {
        let d = separation(&g, g.agent_nodes()).unwrap();
        let source = 1 + i % g.agent_count();
        let s = graph_broadcast_4approx(&g, source).unwrap();
        let tr = simulate(Network::Graph(&g), &s, &d.twice()).unwrap();
        assert!(verify_broadcast(&tr, source).is_ok());
        assert!(max_power_used(&tr).0 <= d.twice());
    }
}

#[test]
fn separation_at_most_twice_line_optimum() {
    for seed in 0..500u64 {
        let c = gen_random_line(2 + (seed as usize) % 39, seed);
        let g = WeightedGraph::path_from_line(&c);
        let d = separation(&g, g.agent_nodes()).unwrap();
        let p = compute_optimal_convergecast(&c).power;
        assert!(d <= p.twice(), "seed {seed}: D = {d}, P* = {p}");
    }
}

#[test]
fn two_agents_witness_ratio_four() {
    let c = line(&[0, 10]);
    let g = WeightedGraph::path_from_line(&c);
    let d = separation(&g, g.agent_nodes()).unwrap();
    assert_eq!(d, sc("10"));
    let (opt, _) = compute_optimal_broadcast(&c, 1);
    assert_eq!(opt, sc("5"));
    let s = graph_broadcast_4approx(&g, 1).unwrap();
    let tr = simulate(Network::Graph(&g), &s, &d.twice()).unwrap();
    let used = max_power_used(&tr).0;
    assert_eq!(&used / &opt, Scalar::from_int(4));
}

#[test]
fn separation_is_the_max_over_bipartitions() {
    for g in graphs().take(120) {
        let a = g.agent_nodes();
        let d = apsp(&g).unwrap();
        let sep = separation(&g, a).unwrap();
        let k = a.len();
        for mask in 1..(1u32 << (k - 1)) {
            let side: Vec<bool> = (0..k).map(|i| mask >> i & 1 == 1).collect();
            assert!(cross_distance(&d, a, &side) <= sep);
        }
        let (_, witness) = separation_witness(&g, a).unwrap();
        let side: Vec<bool> = (0..k).map(|i| witness.contains(&i)).collect();
        assert_eq!(cross_distance(&d, a, &side), sep);
    }
}

#[test]
fn known_graph_convergecast_moves_each_agent_in_one_trip() {
    for g in graphs() {
        let (s, _) = known_graph_convergecast(&g).unwrap();
        for agent in 1..=g.agent_count() {
            let legs: Vec<_> = s.moves.iter().filter(|m| m.agent == agent).collect();
            for w in legs.windows(2) {
                let len = g.edge(g.edge_between(node(&w[0].from), node(&w[0].to)).unwrap()).w.clone();
                assert_eq!(w[1].from, w[0].to);
                assert_eq!(w[1].depart, &w[0].depart + &len);
            }
            if let (Some(first), Some(last)) = (legs.first(), legs.last()) {
                assert_eq!(first.from, Location::Node(g.agent_node(agent)));
                assert_ne!(last.to, first.from);
            }
        }
    }
}

fn node(l: &Location) -> usize {
    match l {
        Location::Node(x) => *x,
        other => panic!("expected a node, got {other:?}"),
    }
}
