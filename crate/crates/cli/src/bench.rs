use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use powercast::dist_sim::{run_distributed_broadcast, run_unknown_tree};
use powercast::graph_approx::separation;
use powercast::instance_gen::{gen_random_line, gen_random_tree};
use powercast::line_broadcast::{bisection_oracle_broadcast, compute_optimal_broadcast};
use powercast::line_convergecast::{compute_optimal_convergecast, quadratic_oracle_convergecast};
use powercast::sc;

use crate::output::{Inputs, Output};
use crate::{BenchArgs, Format, Suite};

struct Row {
    index: usize,
    size: usize,
    wall_ms: f64,
    ok: bool,
    note: String,
}

fn timed(index: usize, size: usize, f: impl FnOnce() -> (bool, String)) -> Row {
    let start = Instant::now();
    let (ok, note) = f();
    Row { index, size, wall_ms: start.elapsed().as_secs_f64() * 1e3, ok, note }
}

fn oracle_equivalence(seed: u64) -> Row {
    let c = gen_random_line(2 + (seed as usize) % 99, seed);
    timed(seed as usize, c.n(), || {
        let conv = compute_optimal_convergecast(&c).power;
        let quad = quadratic_oracle_convergecast(&c);
        let k = 1 + (seed as usize) % c.n();
        let (p, _) = compute_optimal_broadcast(&c, k);
        let (lo, hi) = bisection_oracle_broadcast(&c, k, &sc("1/1000000000"));
        let ok = conv == quad && lo <= p && p <= hi;
        (ok, format!("convergecast {conv} vs {quad}; broadcast k={k} {p} in [{lo}, {hi}]"))
    })
}

fn distributed_bounds(seed: u64) -> Row {
    let t = gen_random_tree(2 + (seed as usize * 37) % 199, seed);
    timed(seed as usize, t.graph().node_count(), || {
        let d = separation(t.graph(), t.graph().agent_nodes()).expect("at least two leaves");
        let conv = run_unknown_tree(&t, &d).expect("valid tree");
        let source = t.graph().agent_at(t.leaves()[0]).expect("leaf agent");
        let bcast = run_distributed_broadcast(&t, source, &d.twice()).expect("valid tree");
        let ok = conv.achieved && conv.max_power() <= d && bcast.achieved && bcast.max_power() <= d.twice();
        (ok, format!("D {d}; convergecast {}; broadcast {}", conv.max_power(), bcast.max_power()))
    })
}

fn scaling(index: usize, n: usize) -> Row {
    let c = gen_random_line(n, n as u64);
    timed(index, n, || {
        let o = compute_optimal_convergecast(&c);
        (o.stack_ops <= 6 * n, format!("{} stack operations", o.stack_ops))
    })
}

pub fn run(args: &BenchArgs, argv: &[String]) -> Result<Output, String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.max(1))
        .build()
        .map_err(|e| e.to_string())?;
    let (name, rows): (&str, Vec<Row>) = pool.install(|| match args.suite {
        Suite::OracleEquivalence => {
            let n = args.seeds.unwrap_or(1000);
            ("oracle-equivalence", (0..n).into_par_iter().map(oracle_equivalence).collect())
        }
        Suite::DistributedBounds => {
            let n = args.seeds.unwrap_or(500);
            ("distributed-bounds", (0..n).into_par_iter().map(distributed_bounds).collect())
        }
        Suite::Scaling => {
            let sizes = args.sizes.clone().unwrap_or_else(|| vec![100, 1000, 5000]);
            // sizes run one after another so wall times are comparable
            ("scaling", sizes.iter().enumerate().map(|(i, &n)| scaling(i, n)).collect())
        }
    });
    let failures = rows.iter().filter(|r| !r.ok).count();
    let mut out = match args.format {
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| json!({ "index": r.index, "size": r.size, "wall_ms": r.wall_ms, "ok": r.ok, "note": r.note }))
                .collect();
            let body = json!({ "suite": name, "instances": rows.len(), "failures": failures, "rows": rows });
            Output::ok(Inputs::new().header(argv, None, body))
        }
        Format::Csv => {
            let mut csv = String::from("index,size,wall_ms,ok\n");
            for r in &rows {
                csv.push_str(&format!("{},{},{:.3},{}\n", r.index, r.size, r.wall_ms, r.ok));
            }
            Output { body: Value::Null, code: 0, csv: Some(csv) }
        }
    };
    out.code = if failures == 0 { 0 } else { 1 };
    Ok(out)
}
