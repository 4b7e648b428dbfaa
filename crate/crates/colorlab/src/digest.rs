//! SHA-256 content digests of instances, for output headers and verdict logs.

use colorlab_core::{Graph, ListAssignment};
use sha2::{Digest, Sha256};

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn graph_text(g: &Graph) -> String {
    let mut s = format!("{} {}\n", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}

/// Digest of the edge-list text; equal labelled graphs share it.
pub fn graph_digest(g: &Graph) -> String {
    hex(&Sha256::digest(graph_text(g)))
}

pub fn lists_digest(lists: &ListAssignment) -> String {
    let mut h = Sha256::new();
    for l in lists.lists() {
        let line: Vec<String> = l.iter().map(|c| c.to_string()).collect();
        h.update(line.join(" "));
        h.update("\n");
    }
    hex(&h.finalize())
}

/// Digest of a whole corpus, in order.
pub fn corpus_digest<'a>(graphs: impl IntoIterator<Item = &'a Graph>) -> String {
    let mut h = Sha256::new();
    for g in graphs {
        h.update(graph_text(g));
        h.update("--\n");
    }
    hex(&h.finalize())
}

/// First 16 hex digits, for table cells.
pub fn short(digest: &str) -> &str {
    &digest[..16]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digests_are_stable() {
        // sha256 of "2 1\n0 1\n"
        assert_eq!(
            graph_digest(&Graph::path(2)),
            "4a6ae7226283a4b6277ce3e77a91585c0cad93929046f3c7bd9105d7ed101834"
        );
        assert_ne!(graph_digest(&Graph::path(3)), graph_digest(&Graph::complete(3)));
        assert_ne!(
            lists_digest(&ListAssignment::uniform(2, 3)),
            lists_digest(&ListAssignment::uniform(3, 2))
        );
    }
}
