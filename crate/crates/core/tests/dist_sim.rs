use powercast::dist_sim::{competitive_report, run_distributed_broadcast, run_unknown_tree, DistEvent};
use powercast::graph_approx::separation;
use powercast::instance_gen::{gen_random_tree, gen_random_tree_with};
use powercast::strategy::{verify_broadcast, verify_convergecast};
use powercast::{sc, simulate, Location, Network, Scalar, WeightedGraph, WeightedTree};
use rand::seq::SliceRandom;
use rand::SeedableRng;

fn trees(count: u64) -> impl Iterator<Item = WeightedTree> {
    (0..count).map(|seed| {
        let n = 2 + (seed as usize * 37) % 199;
        if seed % 4 == 3 {
            gen_random_tree_with(n, seed, 0.25)
        } else {
            gen_random_tree(n, seed)
        }
    })
}

fn d_of(t: &WeightedTree) -> powercast::Scalar {
    separation(t.graph(), t.graph().agent_nodes()).unwrap()
}

#[test]
fn unknown_tree_within_separation() {
    for (i, t) in trees(500).enumerate() {
        let d = d_of(&t);
        let out = run_unknown_tree(&t, &d).unwrap();
        assert!(out.achieved, "tree {i}");
        assert!(out.max_power() <= d, "tree {i}");
        assert!(out.stranded.is_none());
    }
}

#[test]
fn distributed_broadcast_within_twice_separation() {
    for (i, t) in trees(500).enumerate() {
        let d = d_of(&t);
        let g = t.graph();
        let leaves = t.leaves();
        let source = g.agent_at(leaves[i % leaves.len()]).unwrap();
        let out = run_distributed_broadcast(&t, source, &d.twice()).unwrap();
        assert!(out.achieved, "tree {i}");
        assert!(out.max_power() <= d.twice(), "tree {i}");
    }
}

#[test]
fn port_relabelling_keeps_the_guarantee() {
    for (i, t) in trees(60).enumerate() {
        let d = d_of(&t);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(i as u64);
        for _ in 0..10 {
            let r = t.relabel_ports(|_, deg| {
                let mut p: Vec<usize> = (0..deg).collect();
                p.shuffle(&mut rng);
                p
            });
            let out = run_unknown_tree(&r, &d).unwrap();
            assert!(out.achieved && out.max_power() <= d, "tree {i}");
        }
    }
}

#[test]
fn runs_are_deterministic() {
    for t in trees(30) {
        let d = d_of(&t);
        assert_eq!(run_unknown_tree(&t, &d).unwrap(), run_unknown_tree(&t, &d).unwrap());
    }
}

#[test]
fn trajectories_replay_in_the_simulator() {
    for (i, t) in trees(60).enumerate() {
        let d = d_of(&t);
        let g: &WeightedGraph = t.graph();
        let out = run_unknown_tree(&t, &d).unwrap();
        let tr = simulate(Network::Graph(g), &out.trajectories, &d).unwrap();
        assert_eq!(tr.power, out.power, "tree {i}");
        assert!(verify_convergecast(&tr).is_ok(), "tree {i}");

        let source = g.agent_at(t.leaves()[0]).unwrap();
        let out = run_distributed_broadcast(&t, source, &d.twice()).unwrap();
        let tr = simulate(Network::Graph(g), &out.trajectories, &d.twice()).unwrap();
        assert!(verify_broadcast(&tr, source).is_ok(), "tree {i}");
    }
}

#[test]
fn star_fixture() {
    let g = WeightedGraph::new(
        ["c", "l1", "l2", "l3"].map(String::from).to_vec(),
        vec![(0, 1, sc("1")), (0, 2, sc("2")), (0, 3, sc("3"))],
        vec![1, 2, 3],
        None,
    )
    .unwrap();
    let t = WeightedTree::new(g).unwrap();
    assert_eq!(d_of(&t), sc("4"));
    let out = run_unknown_tree(&t, &sc("4")).unwrap();
    assert!(out.achieved);
    assert_eq!(out.power, vec![sc("3/2"), sc("2"), sc("5/2")]);
    let rep = competitive_report(&t).unwrap();
    assert_eq!((rep.max_power, rep.separation, rep.ratio), (sc("5/2"), sc("4"), sc("5/4")));
}

#[test]
fn too_small_budget_fails_honestly() {
    let t = gen_random_tree(40, 9);
    let d = d_of(&t);
    let out = run_unknown_tree(&t, &d.half()).unwrap();
    assert!(out.max_power() <= d.half());
}

/// Position along `edge` measured from its first endpoint, if `l` lies on it.
fn along(t: &WeightedTree, edge: usize, l: &Location) -> Option<Scalar> {
    let e = t.graph().edge(edge);
    match l {
        Location::Node(x) if *x == e.u => Some(Scalar::zero()),
        Location::Node(x) if *x == e.v => Some(e.w.clone()),
        Location::Interior { edge: f, offset } if *f == edge => Some(offset.clone()),
        _ => None,
    }
}

#[test]
fn no_move_crosses_an_agent_stopped_inside_an_edge() {
    let mut stops = 0;
    for (i, t) in trees(150).enumerate() {
        let d = d_of(&t);
        let out = run_unknown_tree(&t, &d).unwrap();
        let net = Network::Graph(t.graph());
        for ev in &out.events {
            let DistEvent::Stop { time, location: Location::Interior { edge, offset }, .. } = ev else {
                continue;
            };
            stops += 1;
            for m in &out.trajectories.moves {
                let (Some(a), Some(b)) = (along(&t, *edge, &m.from), along(&t, *edge, &m.to)) else {
                    continue;
                };
                let end = &m.depart + &net.move_length(&m.from, &m.to).unwrap();
                let crosses = Scalar::min_of(&a, &b) < *offset && *offset < Scalar::max_of(&a, &b);
                assert!(!(crosses && &end > time), "tree {i}: move {m:?} crosses a stop at {offset} after {time}");
            }
        }
    }
    assert!(stops > 0);
}
