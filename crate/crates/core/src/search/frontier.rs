use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use super::tree::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Entry {
    weight: u32,
    depth: u32,
    seq: u64,
    id: NodeId,
}

// `BinaryHeap` pops the greatest entry, so "greater" here means "expand
// sooner": fewer assumptions, then deeper, then inserted earlier.
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .weight
            .cmp(&self.weight)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Open nodes ordered by (weight, deeper first, FIFO).
#[derive(Clone, Debug, Default)]
pub struct Frontier {
    heap: BinaryHeap<Entry>,
    next_seq: u64,
}

impl Frontier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, id: NodeId, weight: u32, depth: u32) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Entry {
            weight,
            depth,
            seq,
            id,
        });
    }

    pub fn pop(&mut self) -> Option<NodeId> {
        self.heap.pop().map(|e| e.id)
    }

    pub fn peek(&self) -> Option<NodeId> {
        self.heap.peek().map(|e| e.id)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.heap.iter().any(|e| e.id == id)
    }
}
