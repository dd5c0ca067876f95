"""Built-in cross-checks against small independent oracles.

Each check recomputes expected answers from first principles (exhaustive
enumeration, finite differences, a direct double-loop metric) and compares
the package's fast implementations against them. The implementations under
test are resolved at call time, so a corrupted function or constant is
caught no matter when it was patched in.
"""

import itertools
import time

import numpy as np

from . import metrics
from .graphcut import SOURCE, SINK, CrfParams, FlowGraph, energy, expansion_move
from .nn import build_skip_autoencoder, mse_loss, network_backward, network_run
from .rng import Rng


def _brute_force_cut(node_count, arcs):
    """Minimum s-t cut capacity by trying every source-side subset."""
    best = np.inf
    for bits in range(2 ** node_count):
        side = [(bits >> i) & 1 == 1 for i in range(node_count)]

        def on_source(v):
            return True if v == SOURCE else False if v == SINK else side[v]

        cap = sum(c for u, v, c in arcs if on_source(u) and not on_source(v))
        best = min(best, cap)
    return best


def _check_maxflow():
    r = Rng(101)
    for trial in range(20):
        n = int(r.randint(2, 7))
        arcs = []
        for u in range(n):
            arcs.append((SOURCE, u, float(r.randint(0, 8))))
            arcs.append((u, SINK, float(r.randint(0, 8))))
        for u in range(n):
            for v in range(n):
                if u != v and r.uniform() < 0.4:
                    arcs.append((u, v, float(r.randint(0, 8))))
        g = FlowGraph(n)
        for u, v, c in arcs:
            g.add_arc(u, v, c)
        got = g.max_flow().flow
        want = _brute_force_cut(n, arcs)
        if got != want:
            return f"trial {trial}: flow {got} != min cut {want}"
    return None


def _check_moves():
    params = CrfParams(num_labels=3, smoothness_weight=2.0, smoothness_cap=40.0)
    r = Rng(202)
    for trial in range(6):
        image = r.uniform(4).reshape(2, 2) * 255.0
        base = r.randint(0, 3, 4).reshape(2, 2)
        for alpha in range(3):
            moved, _ = expansion_move(base, image, alpha, params)
            got = energy(moved, image, params)[0]
            best = np.inf
            for keep in itertools.product([False, True], repeat=4):
                cand = np.where(np.array(keep).reshape(2, 2), base, alpha)
                best = min(best, energy(cand, image, params)[0])
            if not np.isclose(got, best, rtol=0, atol=1e-9):
                return f"trial {trial} alpha {alpha}: move energy {got} != optimum {best}"
    return None


def _check_gradients():
    r = Rng(303)
    net = build_skip_autoencoder(2, 3, seed=7)
    x = r.uniform(2 * 1 * 6 * 6).reshape(2, 1, 6, 6)
    target = r.uniform(2 * 1 * 6 * 6).reshape(2, 1, 6, 6)

    def loss_value():
        return mse_loss(network_run(net, x)[0], target)[0]

    out, trace = network_run(net, x)
    _, grad_out = mse_loss(out, target)
    grads, _ = network_backward(net, trace, grad_out)
    eps = 1e-5
    for li, layer_grads in enumerate(grads):
        if layer_grads is None:
            continue
        for pi, (param, grad) in enumerate(zip(net.layers[li].params(), layer_grads)):
            flat = param.reshape(-1)
            idx = int(r.randint(0, flat.size))
            keep = flat[idx]
            flat[idx] = keep + eps
            up = loss_value()
            flat[idx] = keep - eps
            down = loss_value()
            flat[idx] = keep
            numeric = (up - down) / (2 * eps)
            analytic = grad.reshape(-1)[idx]
            denom = max(abs(numeric), abs(analytic), 1e-8)
            if abs(numeric - analytic) / denom > 1e-4:
                return (f"layer {li} param {pi}: analytic {analytic:.6g} "
                        f"vs numeric {numeric:.6g}")
    return None


def _naive_ssim(a, b):
    cfg = metrics.SsimConfig()
    win = metrics.gaussian_window(cfg)
    c1 = (cfg.k1 * cfg.data_range) ** 2
    c2 = (cfg.k2 * cfg.data_range) ** 2
    h, w = a.shape
    k = cfg.window_size
    vals = []
    for y in range(h - k + 1):
        for x in range(w - k + 1):
            pa = a[y:y + k, x:x + k]
            pb = b[y:y + k, x:x + k]
            ma = (win * pa).sum()
            mb = (win * pb).sum()
            va = (win * (pa - ma) ** 2).sum()
            vb = (win * (pb - mb) ** 2).sum()
            cov = (win * (pa - ma) * (pb - mb)).sum()
            vals.append(((2 * ma * mb + c1) * (2 * cov + c2))
                        / ((ma * ma + mb * mb + c1) * (va + vb + c2)))
    return float(np.mean(vals))


def _check_ssim():
    r = Rng(404)
    for trial in range(4):
        a = r.uniform(16 * 16).reshape(16, 16) * 255.0
        b = np.clip(a + r.normal(16 * 16).reshape(16, 16) * 12.0, 0.0, 255.0)
        if metrics.ssim(a, a) != 1.0:
            return f"trial {trial}: ssim(x,x) != 1"
        got = metrics.ssim(a, b)
        want = _naive_ssim(a, b)
        if abs(got - want) > 1e-9:
            return f"trial {trial}: ssim {got:.12f} != oracle {want:.12f}"
    return None


CHECKS = (
    ("maxflow", _check_maxflow),
    ("moves", _check_moves),
    ("gradients", _check_gradients),
    ("ssim", _check_ssim),
)

TIME_BUDGET_SECONDS = 60.0


def run_selftest(out=print):
    """Run every check; returns the list of failing check names."""
    started = time.time()
    failures = []
    for name, check in CHECKS:
        t0 = time.time()
        try:
            problem = check()
        except Exception as exc:
            problem = f"raised {type(exc).__name__}: {exc}"
        status = "ok" if problem is None else f"FAIL ({problem})"
        out(f"{name}: {status} [{time.time() - t0:.1f}s]")
        if problem is not None:
            failures.append(name)
    elapsed = time.time() - started
    if elapsed > TIME_BUDGET_SECONDS:
        out(f"warning: selftest took {elapsed:.0f}s, budget {TIME_BUDGET_SECONDS:.0f}s")
    return failures
