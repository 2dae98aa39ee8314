#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_constellations"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

pub fn tweet_line(id: usize, user: &str, text: &str) -> String {
    json!({"id": id.to_string(), "user": user, "text": text}).to_string()
}

/// Two communities of `per_side` users who retweet inside their own side,
/// plus `bridges` cross-side retweets.
pub fn two_cluster_corpus(per_side: usize, tweets: usize, bridges: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = Vec::with_capacity(tweets + bridges);
    for id in 0..tweets {
        let side = if id % 2 == 0 { "a" } else { "b" };
        let u = rng.random_range(0..per_side);
        let mut v = rng.random_range(0..per_side - 1);
        if v >= u {
            v += 1;
        }
        lines.push(tweet_line(
            id,
            &format!("{side}{u}"),
            &format!("RT @{side}{v}: message {id}"),
        ));
    }
    for b in 0..bridges {
        let u = rng.random_range(0..per_side);
        let v = rng.random_range(0..per_side);
        lines.push(tweet_line(
            tweets + b,
            &format!("a{u}"),
            &format!("RT @b{v}: bridge"),
        ));
    }
    lines.join("\n") + "\n"
}
