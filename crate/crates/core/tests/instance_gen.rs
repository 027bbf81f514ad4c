use powercast::instance_gen::{
    gen_lower_bound_line, gen_random_line, proof_strategy_for_partition, restricted_star_check, LowerBoundFamily,
    Task, ThreePartitionInstance,
};
use powercast::line_convergecast::decide_convergecast;
use powercast::strategy::{max_power_used, verify_broadcast, verify_convergecast};
use powercast::{sc, simulate, Network};

fn round_trip(xs: Vec<u64>, parts: Vec<Vec<usize>>) {
    let inst = ThreePartitionInstance::new(xs).unwrap();
    let (st, s) = proof_strategy_for_partition(&inst, &parts, Task::Convergecast).unwrap();
    let tr = simulate(Network::Graph(st.tree.graph()), &s, &st.power).unwrap();
    assert!(verify_convergecast(&tr).is_ok());
    assert_eq!(max_power_used(&tr).0, st.power);

    let (st, s) = proof_strategy_for_partition(&inst, &parts, Task::Broadcast).unwrap();
    let tr = simulate(Network::Graph(st.tree.graph()), &s, &st.power).unwrap();
    assert!(verify_broadcast(&tr, st.source.unwrap()).is_ok());
    assert_eq!(max_power_used(&tr).0, st.power);
}

#[test]
fn yes_instances_verify_at_the_threshold() {
    round_trip(vec![6, 7, 7], vec![vec![0, 1, 2]]);
    round_trip(vec![6, 7, 7, 7, 6, 7], vec![vec![0, 1, 5], vec![2, 3, 4]]);
    round_trip(vec![26, 33, 41, 27, 35, 38, 30, 31, 39], vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]]);
}

#[test]
fn proof_strategy_fails_below_threshold() {
    let inst = ThreePartitionInstance::new(vec![6, 7, 7]).unwrap();
    let (st, s) = proof_strategy_for_partition(&inst, &[vec![0, 1, 2]], Task::Convergecast).unwrap();
    assert_eq!(st.power, sc("41"));
    assert!(simulate(Network::Graph(st.tree.graph()), &s, &sc("40")).is_err());
}

#[test]
fn wrong_partitions_are_rejected() {
    let inst = ThreePartitionInstance::new(vec![6, 7, 7, 7, 6, 7]).unwrap();
    assert!(proof_strategy_for_partition(&inst, &[vec![0, 1, 2], vec![3, 4, 5]], Task::Convergecast).is_ok());
    assert!(proof_strategy_for_partition(&inst, &[vec![0, 4, 1], vec![2, 3, 5]], Task::Broadcast).is_err());
    let no = ThreePartitionInstance::new(vec![11, 11, 11, 13, 17, 17]).unwrap();
    assert_eq!(restricted_star_check(&no).unwrap(), None);
}

#[test]
fn lower_bound_lines_are_centrally_feasible() {
    for (d, p) in [("1/2", "8"), ("1", "4"), ("1/4", "3")] {
        let f = LowerBoundFamily::new(&sc(d), &sc(p)).unwrap();
        let c = gen_lower_bound_line(&sc(d), &sc(p)).unwrap();
        assert_eq!(c.n(), f.n);
        assert!(decide_convergecast(&c, &sc(p)).is_some(), "delta {d}, P {p}");
    }
}

#[test]
fn random_lines_differ_by_seed() {
    assert_ne!(gen_random_line(20, 1), gen_random_line(20, 2));
}

#[test]
fn star_weights_lie_in_their_bands() {
    use powercast::instance_gen::{gen_3p_broadcast_star, gen_3p_convergecast_star};
    use powercast::Scalar;
    let inst = ThreePartitionInstance::new(vec![26, 33, 41, 27, 35, 38, 30, 31, 39]).unwrap();
    let r = Scalar::from_int(inst.r() as i64);
    for (st, base) in [(gen_3p_convergecast_star(&inst), 2), (gen_3p_broadcast_star(&inst), 4)] {
        let g = st.tree.graph();
        let lo = Scalar::from_int(base) * &r + Scalar::one();
        for &b in &st.b {
            let w = &g.edge(g.edge_between(0, g.agent_node(b)).unwrap()).w;
            assert!(w > &(&lo + &(&r / &Scalar::from_int(4))));
            assert!(w < &(&lo + &r.half()));
        }
    }
}

#[test]
fn lower_bound_line_reports_the_relaxed_threshold() {
    let (d, p) = (sc("1/2"), sc("8"));
    let c = gen_lower_bound_line(&d, &p).unwrap();
    let relaxed = (sc("2") - d) * p;
    println!("decide at (2 - delta) P = {relaxed}: {:?}", decide_convergecast(&c, &relaxed));
}
