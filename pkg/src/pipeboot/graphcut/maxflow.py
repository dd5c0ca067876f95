"""Max-flow / min-cut on sparse directed graphs.

The solver is Edmonds-Karp: repeatedly augment along a shortest residual
path found by breadth-first search. Slow asymptotically but exact, simple
to audit, and fast enough for the grid graphs used here once the inner
loop is compiled. Arc traversal order is a fixed function of insertion
order, so the returned flow, cut side assignment and operation count are
all deterministic.

Operation counts tally elementary work on capacity values: one op per
residual-capacity check during search, per bottleneck comparison and per
capacity update during augmentation. Bookkeeping (queue pushes, index
arithmetic) is free.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

SOURCE = -1
SINK = -2


@dataclass
class MaxFlowResult:
    flow: float
    source_side: np.ndarray  # bool per node: reachable from SOURCE in the residual
    ops: int


@njit(cache=True)
def _edmonds_karp(starts, adj, to, cap, source, sink):
    n = starts.shape[0] - 1
    parent = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    flow = 0.0
    ops = 0
    while True:
        parent[:] = -1
        parent[source] = -2
        queue[0] = source
        qh, qt = 0, 1
        found = False
        while qh < qt:
            u = queue[qh]
            qh += 1
            for i in range(starts[u], starts[u + 1]):
                e = adj[i]
                v = to[e]
                ops += 1
                if parent[v] == -1 and cap[e] > 0.0:
                    parent[v] = e
                    if v == sink:
                        found = True
                        qh = qt
                        break
                    queue[qt] = v
                    qt += 1
        if not found:
            break
        bottleneck = np.inf
        v = sink
        while v != source:
            e = parent[v]
            ops += 1
            if cap[e] < bottleneck:
                bottleneck = cap[e]
            v = to[e ^ 1]
        v = sink
        while v != source:
            e = parent[v]
            cap[e] -= bottleneck
            cap[e ^ 1] += bottleneck
            ops += 2
            v = to[e ^ 1]
        flow += bottleneck
        ops += 1
    # the terminating search visited exactly the residual source component
    reachable = parent != -1
    return flow, ops, reachable


class FlowGraph:
    """Flow network over node_count nodes plus the SOURCE / SINK sentinels."""

    def __init__(self, node_count):
        node_count = int(node_count)
        if node_count < 0:
            raise ValueError(f"node_count must be >= 0, got {node_count}")
        self.node_count = node_count
        self._tails = []
        self._heads = []
        self._caps = []

    def _map_nodes(self, nodes):
        arr = np.asarray(nodes, dtype=np.int64)
        plain = (arr != SOURCE) & (arr != SINK)
        if (plain & ((arr < 0) | (arr >= self.node_count))).any():
            raise ValueError("node id out of range (use SOURCE / SINK for the terminals)")
        return np.where(arr == SOURCE, self.node_count,
                        np.where(arr == SINK, self.node_count + 1, arr))

    def add_arc(self, u, v, capacity):
        """Directed arc u -> v. Terminals are the SOURCE / SINK sentinels."""
        self.add_arcs(np.array([u]), np.array([v]), np.array([float(capacity)]))

    def add_arcs(self, us, vs, caps):
        """Bulk form of add_arc for parallel construction from arrays."""
        caps = np.asarray(caps, dtype=np.float64)
        if (caps < 0).any():
            raise ValueError("arc capacities must be non-negative")
        us = self._map_nodes(us)
        vs = self._map_nodes(vs)
        if us.shape != vs.shape or us.shape != caps.shape:
            raise ValueError("us, vs and caps must have identical shapes")
        if (us == vs).any():
            raise ValueError("self-arcs are not allowed")
        self._tails.append(us)
        self._heads.append(vs)
        self._caps.append(caps)

    def _assemble(self):
        """Paired arc arrays (even = forward, odd = zero-capacity reverse)."""
        if self._tails:
            tails = np.concatenate(self._tails)
            heads = np.concatenate(self._heads)
            caps = np.concatenate(self._caps)
        else:
            tails = heads = np.empty(0, dtype=np.int64)
            caps = np.empty(0, dtype=np.float64)
        m = tails.shape[0]
        to = np.empty(2 * m, dtype=np.int64)
        to[0::2] = heads
        to[1::2] = tails
        cap = np.zeros(2 * m, dtype=np.float64)
        cap[0::2] = caps
        arc_tail = np.empty(2 * m, dtype=np.int64)
        arc_tail[0::2] = tails
        arc_tail[1::2] = heads
        n_total = self.node_count + 2
        adj = np.argsort(arc_tail, kind="stable").astype(np.int64)
        counts = np.bincount(arc_tail, minlength=n_total)
        starts = np.zeros(n_total + 1, dtype=np.int64)
        np.cumsum(counts, out=starts[1:])
        return starts, adj, to, cap

    def max_flow(self):
        """Solve for the maximum SOURCE -> SINK flow.

        Returns a MaxFlowResult whose source_side marks, for each ordinary
        node, whether it lies on the source side of a minimum cut (reachable
        from SOURCE in the final residual graph). Repeated calls re-solve
        from the original capacities.
        """
        starts, adj, to, cap = self._assemble()
        flow, ops, reachable = _edmonds_karp(starts, adj, to, cap,
                                             self.node_count, self.node_count + 1)
        return MaxFlowResult(flow=float(flow), source_side=reachable[:self.node_count],
                             ops=int(ops))
