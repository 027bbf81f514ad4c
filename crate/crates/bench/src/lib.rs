//! Fixed benchmark inputs shared by the criterion benches.

use powercast::instance_gen::{gen_random_line, gen_random_tree};
use powercast::{LineConfig, WeightedTree};

pub const LINE_SIZES: [usize; 3] = [100, 1000, 5000];
pub const TREE_SIZES: [usize; 3] = [10, 50, 200];

pub fn line(n: usize) -> LineConfig {
    gen_random_line(n, n as u64)
}

pub fn tree(n: usize) -> WeightedTree {
    gen_random_tree(n, n as u64)
}
