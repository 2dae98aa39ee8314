//! Retweet graphs built from the `RT @user` convention.

mod layout;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use layout::{layout, ForceLayout, DEFAULT_ITERATIONS};

pub const MAX_HANDLE_LEN: usize = 15;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub id: String,
    pub user: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_at: Option<String>,
}

/// Original author of a retweet, if `text` starts (after whitespace) with
/// `RT @handle`. "RT" is case-insensitive; handles are 1 to 15 ASCII letters,
/// digits or underscores.
pub fn parse_retweet(text: &str) -> Option<&str> {
    let rest = text.trim_start();
    let prefix = rest.get(..2)?;
    if !prefix.eq_ignore_ascii_case("rt") {
        return None;
    }
    let rest = &rest[2..];
    let after_space = rest.trim_start_matches([' ', '\t']);
    if after_space.len() == rest.len() {
        return None;
    }
    let handle_part = after_space.strip_prefix('@')?;
    let len = handle_part
        .bytes()
        .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
        .count();
    if len == 0 || len > MAX_HANDLE_LEN {
        return None;
    }
    Some(&handle_part[..len])
}

/// Directed weighted graph: edge `(retweeter, author)` counts retweets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RetweetGraph {
    nodes: BTreeSet<String>,
    edges: BTreeMap<(String, String), u64>,
}

impl RetweetGraph {
    pub fn nodes(&self) -> &BTreeSet<String> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeMap<(String, String), u64> {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn add_node(&mut self, handle: &str) {
        if !self.nodes.contains(handle) {
            self.nodes.insert(handle.to_string());
        }
    }

    /// Adds `weight` to the edge, creating endpoints as needed. Self-loops are
    /// ignored apart from registering the node.
    pub fn add_edge(&mut self, source: &str, target: &str, weight: u64) {
        self.add_node(source);
        self.add_node(target);
        if source != target && weight > 0 {
            *self
                .edges
                .entry((source.to_string(), target.to_string()))
                .or_insert(0) += weight;
        }
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    /// Total incoming weight per node (nodes without incoming edges omitted).
    pub fn in_weights(&self) -> BTreeMap<&str, u64> {
        let mut m = BTreeMap::new();
        for ((_, t), w) in &self.edges {
            *m.entry(t.as_str()).or_insert(0) += w;
        }
        m
    }
}

pub fn build_graph(tweets: &[TweetRecord]) -> RetweetGraph {
    let mut g = RetweetGraph::default();
    for t in tweets {
        match parse_retweet(&t.text) {
            Some(author) => g.add_edge(&t.user, author, 1),
            None => g.add_node(&t.user),
        }
    }
    g
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetweetedProfile {
    pub handle: String,
    pub in_weight: u64,
}

/// Most retweeted handles: descending in-weight, ties by handle.
pub fn top_retweeted(graph: &RetweetGraph, n: usize) -> Vec<RetweetedProfile> {
    let mut all: Vec<(&str, u64)> = graph.in_weights().into_iter().collect();
    all.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    all.into_iter()
        .take(n)
        .map(|(h, w)| RetweetedProfile {
            handle: h.to_string(),
            in_weight: w,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// Balance of each node's edge weight across a two-sided partition:
/// `2 * min(w_A, w_B) / (w_A + w_B)`, counting both directions. Isolated
/// nodes score 0.
pub fn gatekeeper_scores(
    graph: &RetweetGraph,
    partition: &HashMap<String, Side>,
) -> Result<BTreeMap<String, f64>> {
    if let Some(missing) = graph.nodes.iter().find(|v| !partition.contains_key(*v)) {
        return Err(Error::domain(format!("partition misses node `{missing}`")));
    }
    let mut towards: HashMap<&str, [u64; 2]> = HashMap::new();
    let slot = |s: Side| match s {
        Side::A => 0,
        Side::B => 1,
    };
    for ((u, v), &w) in &graph.edges {
        towards.entry(u).or_default()[slot(partition[v])] += w;
        towards.entry(v).or_default()[slot(partition[u])] += w;
    }
    Ok(graph
        .nodes
        .iter()
        .map(|v| {
            let [a, b] = towards.get(v.as_str()).copied().unwrap_or_default();
            let total = a + b;
            let score = if total == 0 {
                0.0
            } else {
                2.0 * a.min(b) as f64 / total as f64
            };
            (v.clone(), score)
        })
        .collect())
}
