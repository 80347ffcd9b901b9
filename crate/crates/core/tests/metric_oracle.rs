//! Scar distances against a dense-graph shortest-path oracle on the boundary.

mod common;

use std::time::Instant;

use common::DenseOracle;
use paperfold::rational::{fmt_rat, rat, Rat};
use paperfold::scar::ScarPair;
use paperfold::scheme::{builtin_example, truncate, BoundaryParam};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LOG2_STEP: u32 = 14;
const PAIRS: usize = 50;
/// Grid allowance: partners are rounded to the grid and pairings below one step are dropped.
const SLACK_UNITS: i128 = 2;

fn check(name: &str) {
    let start = Instant::now();
    let scheme = builtin_example(name).unwrap();
    let fs = truncate(&scheme, &rat(1, 256)).unwrap();
    let depth = fs.pairings.iter().map(|g| g.depth).max().unwrap().max(10);
    let tail = fs.tail_measure;
    let pair = ScarPair::build(fs).unwrap();
    let oracle = DenseOracle::new(&scheme, depth, LOG2_STEP);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ca7);
    let mut worst_below = Rat::from_integer(0);
    let mut worst_above = Rat::from_integer(0);
    for _ in 0..PAIRS {
        let (i, j) = (rng.gen_range(0..oracle.n), rng.gen_range(0..oracle.n));
        let (x, y) = (BoundaryParam::new(0, rat(i as i128, oracle.scale)), BoundaryParam::new(0, rat(j as i128, oracle.scale)));
        let b = pair.distance(&x, &y).unwrap();
        let d = oracle.to_rat(oracle.distances(i)[j]);
        assert!(b.lo <= b.hi);
        assert!(b.gap() <= tail * Rat::from_integer(2), "{name}: bracket width {} exceeds twice the tail", fmt_rat(&b.gap()));
        worst_below = worst_below.max(b.lo - d);
        worst_above = worst_above.max(d - b.hi);
    }
    println!("{name}: oracle below lo by {} at most, above hi by {} at most, {:?}", fmt_rat(&worst_below), fmt_rat(&worst_above), start.elapsed());
    let slack = rat(SLACK_UNITS, oracle.scale);
    assert!(worst_below <= slack && worst_above <= slack, "{name}: oracle outside the bracket");
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn seq_brackets_oracle() {
    check("seq");
}

#[test]
fn cantor_brackets_oracle() {
    check("cantor");
}
