"""Runs one candidate function on one instance.

Reads {"code": <base64 source>, "request": <instance>} from stdin and writes a
single JSON line to stdout:

    {"status": "ok", "value": ...}
    {"status": "error", "type": "exception" | "protocol", "message": ...}

Candidate output written with print() goes to stderr. The exit code is 0 for
every candidate fault; anything else means the shim itself broke.

For mcs the two graphs are networkx.Graph objects when networkx imports,
otherwise StandInGraph, which supports: nodes(), edges(), neighbors(n),
degree[n] / degree(n) / iteration over (node, degree), has_edge(u, v),
has_node(n), subgraph(nodes), number_of_nodes(), number_of_edges(), len(G),
iteration over nodes, `n in G`, G[n] and G.adj[n] (neighbor mappings).
"""

import base64
import json
import sys
import traceback


def emit(obj):
    sys.__stdout__.write(json.dumps(obj) + "\n")
    sys.__stdout__.flush()


def fail(kind, message):
    emit({"status": "error", "type": kind, "message": message or kind})


class _DegreeView:
    def __init__(self, graph):
        self._g = graph

    def __getitem__(self, n):
        return len(self._g._adj[n])

    def __call__(self, n=None):
        if n is None:
            return self
        if isinstance(n, (list, tuple, set)):
            return [(v, self[v]) for v in n]
        return self[n]

    def __iter__(self):
        return ((n, len(nbrs)) for n, nbrs in self._g._adj.items())

    def __len__(self):
        return len(self._g._adj)


class StandInGraph:
    def __init__(self, nodes=(), edges=()):
        self._adj = {n: {} for n in nodes}
        for u, v in edges:
            self._adj.setdefault(u, {})[v] = {}
            self._adj.setdefault(v, {})[u] = {}

    @property
    def adj(self):
        return self._adj

    @property
    def degree(self):
        return _DegreeView(self)

    def nodes(self):
        return list(self._adj)

    def edges(self):
        return [(u, v) for u in self._adj for v in self._adj[u] if u < v]

    def neighbors(self, n):
        return iter(self._adj[n])

    def has_edge(self, u, v):
        return u in self._adj and v in self._adj[u]

    def has_node(self, n):
        return n in self._adj

    def subgraph(self, nodes):
        keep = set(nodes) & set(self._adj)
        return StandInGraph(
            sorted(keep),
            [(u, v) for u, v in self.edges() if u in keep and v in keep],
        )

    def copy(self):
        return StandInGraph(self.nodes(), self.edges())

    def number_of_nodes(self):
        return len(self._adj)

    def number_of_edges(self):
        return len(self.edges())

    def __len__(self):
        return len(self._adj)

    def __iter__(self):
        return iter(self._adj)

    def __contains__(self, n):
        return n in self._adj

    def __getitem__(self, n):
        return self._adj[n]


def graph_container(spec):
    n = spec["n"]
    edges = [tuple(e) for e in spec["edges"]]
    if not isinstance(n, int) or n < 0:
        raise ValueError("graph node count must be a non-negative integer")
    try:
        import networkx as nx
    except ImportError:
        return StandInGraph(range(n), edges)
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(edges)
    return g


def adapt(task, payload):
    if task in ("cn", "sp"):
        return [payload["adj"], payload["u"], payload["v"]]
    if task in ("cc", "gd", "mis", "mvc", "mcp"):
        return [payload["adj"]]
    if task == "mcs":
        return [graph_container(payload["g1"]), graph_container(payload["g2"])]
    if task == "tsp":
        return [payload["matrix"]]
    raise ValueError("unknown task %r" % (task,))


def as_int(x):
    if isinstance(x, bool):
        raise TypeError("expected an integer result, got bool")
    if isinstance(x, int):
        return x
    if isinstance(x, float) and x.is_integer():
        return int(x)
    try:
        import numbers

        if isinstance(x, numbers.Integral):
            return int(x)
    except Exception:
        pass
    raise TypeError("expected an integer result, got %s: %r" % (type(x).__name__, x))


def normalize(task, result):
    if task == "cn":
        if isinstance(result, (str, bytes)) or not hasattr(result, "__iter__"):
            raise TypeError("expected a list of nodes, got %s" % type(result).__name__)
        return sorted({as_int(x) for x in result})
    if isinstance(result, (list, tuple, set, frozenset)):
        raise TypeError(
            "expected a single integer, got %s of length %d"
            % (type(result).__name__, len(result))
        )
    return as_int(result)


def describe(exc):
    lines = traceback.format_exception_only(type(exc), exc)
    tb = [
        frame
        for frame in traceback.extract_tb(exc.__traceback__)
        if frame.filename == "<candidate>"
    ]
    where = ""
    if tb:
        f = tb[-1]
        where = "line %d, in %s\n" % (f.lineno, f.name)
    return (where + "".join(lines)).strip()


def main():
    try:
        raw = json.loads(sys.stdin.read())
        source = base64.b64decode(raw["code"]).decode("utf-8")
        request = raw["request"]
        task = request["task"]
        name = request["function_name"]
        args = adapt(task, request["instance"])
    except Exception as exc:
        fail("protocol", "bad request: %s: %s" % (type(exc).__name__, exc))
        return

    sys.stdout = sys.stderr
    try:
        namespace = {"__name__": "__candidate__"}
        exec(compile(source, "<candidate>", "exec"), namespace)
        fn = namespace.get(name)
        if not callable(fn):
            raise NameError("function '%s' is not defined" % name)
        value = normalize(task, fn(*args))
    except BaseException as exc:
        if isinstance(exc, KeyboardInterrupt):
            raise
        fail("exception", describe(exc))
        return
    finally:
        sys.stdout = sys.__stdout__
    emit({"status": "ok", "value": value})


if __name__ == "__main__":
    main()
