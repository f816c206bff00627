//! Dinic max-flow on integer capacities.
//!
//! Deterministic given the edge insertion order: level graphs are built by
//! BFS in insertion order and the blocking flow scans adjacency lists with
//! monotone pointers.

#[derive(Clone, Debug)]
struct Edge {
    to: u32,
    cap: u64,
}

#[derive(Clone, Debug, Default)]
pub struct FlowGraph {
    edges: Vec<Edge>,
    adj: Vec<Vec<u32>>,
}

impl FlowGraph {
    pub fn new(n: usize) -> Self {
        FlowGraph { edges: Vec::new(), adj: vec![Vec::new(); n] }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Undirected capacity is modeled by equal forward/backward caps.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: u64, rev_cap: u64) {
        let id = self.edges.len() as u32;
        self.edges.push(Edge { to: v as u32, cap });
        self.edges.push(Edge { to: u as u32, cap: rev_cap });
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
    }

    /// Max-flow value and number of augmenting paths.
    pub fn max_flow(&mut self, s: usize, t: usize) -> (u64, u64) {
        let n = self.node_count();
        let mut flow = 0u64;
        let mut augmentations = 0u64;
        let mut level = vec![-1i32; n];
        let mut queue = Vec::with_capacity(n);
        let mut iter = vec![0usize; n];
        loop {
            // BFS level graph over residual edges.
            level.iter_mut().for_each(|l| *l = -1);
            queue.clear();
            queue.push(s as u32);
            level[s] = 0;
            let mut qi = 0;
            while qi < queue.len() {
                let u = queue[qi] as usize;
                qi += 1;
                for &eid in &self.adj[u] {
                    let e = &self.edges[eid as usize];
                    if e.cap > 0 && level[e.to as usize] < 0 {
                        level[e.to as usize] = level[u] + 1;
                        queue.push(e.to);
                    }
                }
            }
            if level[t] < 0 {
                return (flow, augmentations);
            }
            iter.iter_mut().for_each(|i| *i = 0);
            // Iterative blocking flow: walk a path forward, saturate, retreat.
            let mut path: Vec<u32> = Vec::new();
            let mut u = s;
            loop {
                if u == t {
                    let mut bottleneck = u64::MAX;
                    for &eid in &path {
                        bottleneck = bottleneck.min(self.edges[eid as usize].cap);
                    }
                    let mut retreat_to = 0usize;
                    for (k, &eid) in path.iter().enumerate() {
                        self.edges[eid as usize].cap -= bottleneck;
                        self.edges[(eid ^ 1) as usize].cap += bottleneck;
                        if self.edges[eid as usize].cap == 0 && retreat_to == 0 {
                            retreat_to = k;
                            // keep updating the rest of the path
                        }
                    }
                    flow += bottleneck;
                    augmentations += 1;
                    // Retreat to the tail of the first saturated edge.
                    path.truncate(retreat_to);
                    u = match path.last() {
                        Some(&eid) => self.edges[eid as usize].to as usize,
                        None => s,
                    };
                    continue;
                }
                let mut advanced = false;
                while iter[u] < self.adj[u].len() {
                    let eid = self.adj[u][iter[u]];
                    let e = &self.edges[eid as usize];
                    if e.cap > 0 && level[e.to as usize] == level[u] + 1 {
                        path.push(eid);
                        u = e.to as usize;
                        advanced = true;
                        break;
                    }
                    iter[u] += 1;
                }
                if advanced {
                    continue;
                }
                // Dead end: remove u from this phase and step back.
                level[u] = -1;
                match path.pop() {
                    Some(eid) => {
                        let prev = self.edges[(eid ^ 1) as usize].to as usize;
                        iter[prev] += 1;
                        u = prev;
                    }
                    None => break,
                }
            }
        }
    }

    /// Nodes reachable from `s` in the residual graph (the source side of a
    /// minimum cut after `max_flow`).
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for &eid in &self.adj[u] {
                let e = &self.edges[eid as usize];
                if e.cap > 0 && !seen[e.to as usize] {
                    seen[e.to as usize] = true;
                    stack.push(e.to as usize);
                }
            }
        }
        seen
    }
}
