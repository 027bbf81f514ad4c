use std::path::Path;

use serde_json::{json, Value};

use powercast::dist_sim::{run_distributed_broadcast, run_unknown_tree};
use powercast::graph_approx::{graph_broadcast_4approx, known_graph_convergecast, separation_witness};
use powercast::instance_gen::{
    gen_3p_broadcast_star, gen_3p_convergecast_star, gen_lower_bound_line, gen_random_line, gen_random_tree_with,
    LowerBoundFamily, ThreePartitionInstance,
};
use powercast::line_broadcast::{compute_optimal_broadcast, decide_broadcast, emit_broadcast_strategy};
use powercast::line_convergecast::{compute_optimal_convergecast, decide_convergecast, emit_convergecast_strategy};
use powercast::model::validate_tree_for_distributed;
use powercast::strategy::{strategy_from_json, strategy_to_json, verify_broadcast, verify_convergecast};
use powercast::{load_configuration, simulate, Instance, LineConfig, Network, Scalar, Strategy, WeightedGraph, WeightedTree};

use crate::output::{Inputs, Output};
use crate::{Algorithm, Cli, Command, GenCommand, Mode};

type Res<T> = Result<T, String>;

fn load(inputs: &mut Inputs, path: &Path) -> Res<Instance> {
    let text = inputs.read(path)?;
    load_configuration(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn line_of(inst: Instance) -> Res<LineConfig> {
    match inst {
        Instance::Line(c) => Ok(c),
        _ => Err("this command needs a line instance".into()),
    }
}

fn graph_of(inst: Instance) -> WeightedGraph {
    match inst {
        Instance::Line(c) => WeightedGraph::path_from_line(&c),
        Instance::Graph(g) => g,
        Instance::Tree(t) => t.into_graph(),
    }
}

fn tree_of(inst: Instance) -> Res<WeightedTree> {
    let t = match inst {
        Instance::Line(c) => WeightedTree::new(WeightedGraph::path_from_line(&c)).map_err(|e| e.to_string())?,
        Instance::Graph(g) => WeightedTree::new(g).map_err(|e| e.to_string())?,
        Instance::Tree(t) => t,
    };
    validate_tree_for_distributed(&t).map_err(|e| e.to_string())?;
    Ok(t)
}

fn source_of(flag: Option<usize>, recorded: Option<usize>, agents: usize) -> Res<usize> {
    let k = flag.or(recorded).ok_or("a source agent is required (--source K)")?;
    if k == 0 || k > agents {
        return Err(format!("source {k} is not an agent id in 1..={agents}"));
    }
    Ok(k)
}

fn strategy_json(net: Network<'_>, s: &Strategy) -> Value {
    serde_json::from_str(&strategy_to_json(net, s)).expect("strategy json is valid")
}

pub fn run(cli: &Cli, argv: &[String]) -> Res<Output> {
    let mut inputs = Inputs::new();
    let (result, success, seed) = match &cli.command {
        Command::LineConvergecast { file, strategy } => {
            let c = line_of(load(&mut inputs, file)?)?;
            let o = compute_optimal_convergecast(&c);
            let mut v = json!({
                "optimal_power": o.power,
                "split": o.split,
                "plan": { "b": o.plan.b, "f": o.plan.f },
                "stack_ops": o.stack_ops,
            });
            if *strategy {
                let s = emit_convergecast_strategy(&c, &o.plan).map_err(|e| e.to_string())?;
                v["strategy"] = strategy_json(Network::Line(&c), &s);
            }
            (v, true, None)
        }
        Command::LineBroadcast { file, source, strategy } => {
            let c = line_of(load(&mut inputs, file)?)?;
            let k = source_of(*source, c.source(), c.n())?;
            let (p, plan) = compute_optimal_broadcast(&c, k);
            let mut v = json!({ "optimal_power": p, "source": k, "turn": plan.turn, "plan": plan });
            if *strategy {
                let s = emit_broadcast_strategy(&c, &plan).map_err(|e| e.to_string())?;
                v["strategy"] = strategy_json(Network::Line(&c), &s);
            }
            (v, true, None)
        }
        Command::Decide { file, mode, power, source } => {
            let c = line_of(load(&mut inputs, file)?)?;
            if power.is_negative() {
                return Err("power must be non-negative".into());
            }
            match mode {
                Mode::Conv => {
                    let split = decide_convergecast(&c, power);
                    (json!({ "feasible": split.is_some(), "power": power, "split": split }), split.is_some(), None)
                }
                Mode::Bcast => {
                    let k = source_of(*source, c.source(), c.n())?;
                    let ok = decide_broadcast(&c, k, power);
                    (json!({ "feasible": ok, "power": power, "source": k }), ok, None)
                }
            }
        }
        Command::GraphApprox { file, mode, source, strategy } => {
            let g = graph_of(load(&mut inputs, file)?);
            let (d, side) = separation_witness(&g, g.agent_nodes()).map_err(|e| e.to_string())?;
            let side_ids: Vec<usize> = side.iter().map(|i| i + 1).collect();
            let (s, budget, extra) = match mode {
                Mode::Conv => {
                    let (s, collector) = known_graph_convergecast(&g).map_err(|e| e.to_string())?;
                    (s, d.clone(), json!({ "collector": collector }))
                }
                Mode::Bcast => {
                    let k = source_of(*source, g.source(), g.agent_count())?;
                    let s = graph_broadcast_4approx(&g, k).map_err(|e| e.to_string())?;
                    (s, d.twice(), json!({ "source": k }))
                }
            };
            let net = Network::Graph(&g);
            let tr = simulate(net, &s, &budget).map_err(|e| e.to_string())?;
            let verified = match mode {
                Mode::Conv => verify_convergecast(&tr).is_ok(),
                Mode::Bcast => verify_broadcast(&tr, extra["source"].as_u64().unwrap_or(1) as usize).is_ok(),
            };
            let mut v = json!({
                "separation": d,
                "witness_side": side_ids,
                "budget": budget,
                "max_power": tr.power.iter().max().cloned().unwrap_or_else(Scalar::zero),
                "power": tr.power,
                "verified": verified,
            });
            if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
                m.extend(e);
            }
            if *strategy {
                v["strategy"] = strategy_json(net, &s);
            }
            (v, verified, None)
        }
        Command::Simulate { file, tree, algorithm, budget, source, trace } => {
            let path = file.as_ref().or(tree.as_ref()).expect("clap requires one of them");
            let t = tree_of(load(&mut inputs, path)?)?;
            let d = powercast::graph_approx::separation(t.graph(), t.graph().agent_nodes()).map_err(|e| e.to_string())?;
            let (out, budget) = match algorithm {
                Algorithm::UnknownTree => {
                    let b = budget.clone().unwrap_or_else(|| d.clone());
                    (run_unknown_tree(&t, &b).map_err(|e| e.to_string())?, b)
                }
                Algorithm::DistBroadcast => {
                    let k = source_of(*source, t.graph().source(), t.graph().agent_count())?;
                    let b = budget.clone().unwrap_or_else(|| d.twice());
                    (run_distributed_broadcast(&t, k, &b).map_err(|e| e.to_string())?, b)
                }
            };
            let mut v = out.to_json(&t, *trace);
            v["budget"] = json!(budget);
            v["separation"] = json!(d);
            (v, out.achieved, None)
        }
        Command::Verify { file, strategy_file, budget, mode, source, trace } => {
            let inst = load(&mut inputs, file)?;
            let text = inputs.read(strategy_file)?;
            let (line, graph) = match inst {
                Instance::Line(c) => (Some(c), None),
                other => (None, Some(graph_of(other))),
            };
            let net = match (&line, &graph) {
                (Some(c), _) => Network::Line(c),
                (_, Some(g)) => Network::Graph(g),
                _ => unreachable!(),
            };
            let s = strategy_from_json(net, &text).map_err(|e| format!("{}: {e}", strategy_file.display()))?;
            let recorded = line.as_ref().and_then(|c| c.source()).or(graph.as_ref().and_then(|g| g.source()));
            match simulate(net, &s, budget) {
                Err(e) => (json!({ "valid": false, "error": e.to_string() }), false, None),
                Ok(tr) => {
                    let max = tr.power.iter().max().cloned().unwrap_or_else(Scalar::zero);
                    let mut v = json!({ "budget": budget, "max_power": max, "power": tr.power });
                    let ok = match mode {
                        Mode::Conv => match verify_convergecast(&tr) {
                            Ok(w) => {
                                v["witness"] = json!({
                                    "agent": w.agent,
                                    "time": w.time,
                                    "location": powercast::strategy::location_to_json(net, &w.location),
                                });
                                true
                            }
                            Err(sets) => {
                                v["maximal_information_sets"] = json!(sets);
                                false
                            }
                        },
                        Mode::Bcast => {
                            let k = source_of(*source, recorded, net.agent_count())?;
                            v["source"] = json!(k);
                            match verify_broadcast(&tr, k) {
                                Ok(()) => true,
                                Err(missing) => {
                                    v["uninformed"] = json!(missing);
                                    false
                                }
                            }
                        }
                    };
                    v["valid"] = json!(ok);
                    if *trace {
                        v["trace"] = tr.to_json(net);
                    }
                    (v, ok, None)
                }
            }
        }
        Command::Gen { what } => return generate(what, argv),
        Command::Bench(args) => return crate::bench::run(args, argv),
    };
    Ok(Output::with_code(inputs.header(argv, seed, result), success))
}

/// Generated instances are printed as plain instance documents so they can
/// be fed back to the other subcommands; the invocation goes to stderr.
fn generate(what: &GenCommand, argv: &[String]) -> Res<Output> {
    let doc = match what {
        GenCommand::Line { n, seed } => {
            if *n == 0 {
                return Err("--n must be at least 1".into());
            }
            gen_random_line(*n, *seed).to_json()
        }
        GenCommand::Tree { n, seed, inner_agents } => {
            if *n == 0 || !(0.0..=1.0).contains(inner_agents) {
                return Err("--n must be at least 1 and --inner-agents within [0, 1]".into());
            }
            gen_random_tree_with(*n, *seed, *inner_agents).to_json()
        }
        GenCommand::Star { mode, values } => {
            let inst = ThreePartitionInstance::new(values.clone()).map_err(|e| e.to_string())?;
            let st = match mode {
                Mode::Conv => gen_3p_convergecast_star(&inst),
                Mode::Bcast => gen_3p_broadcast_star(&inst),
            };
            eprintln!("power {} (R = {})", st.power, inst.r());
            st.tree.to_json()
        }
        GenCommand::LowerBound { delta, power } => {
            let f = LowerBoundFamily::new(delta, power).map_err(|e| e.to_string())?;
            eprintln!("epsilon {} sigma {} l {} k {} n {}", f.epsilon, f.sigma, f.l, f.k, f.n);
            gen_lower_bound_line(delta, power).map_err(|e| e.to_string())?.to_json()
        }
    };
    eprintln!("generated by: {}", argv.join(" "));
    let body: Value = serde_json::from_str(&doc).expect("instance json is valid");
    Ok(Output::ok(body))
}
