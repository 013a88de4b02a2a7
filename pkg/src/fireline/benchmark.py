"""Benchmark the compiled kernel against the pure-Python engine.

Run as:  python3 -m fireline.benchmark [--quick]

Each workload runs on both implementations (when the compiled kernel is
available), verifies the final states agree bit for bit, and reports wall
times and the speedup.
"""

import argparse
import time

from .engine import COMPILED, make_engine


def _mixed_chain(force, n_sites, horizon):
    eng = make_engine(n_sites, 5.0, 0.1, 2024, 0, force=force)
    eng.advance_to(horizon)
    return eng


def _propagation(force, horizon):
    radius = int(9.0 * horizon + 10.0 * (9.0 * horizon) ** 0.5) + 10
    eng = make_engine(
        2 * radius + 1, 9.0, 0.0, 7, 0,
        initial_occupied=True, ignite_site=radius, track_fronts=True,
        force=force,
    )
    eng.advance_to(horizon)
    return eng


def _cascades(force, reps, n_sites):
    last = None
    for r in range(reps):
        eng = make_engine(
            n_sites, 50.0, 0.0, 99, r,
            initial_occupied=True, injected_t=[0.01], injected_site=[0],
            force=force,
        )
        eng.advance_to(0.01)
        eng.run_while_burning(10.0)
        last = eng
    return last


def _time(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return time.perf_counter() - t0, out


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="python3 -m fireline.benchmark", description=__doc__
    )
    parser.add_argument(
        "--quick", action="store_true", help="smaller workloads for a fast check"
    )
    args = parser.parse_args(argv)

    if args.quick:
        workloads = [
            ("mixed chain", _mixed_chain, (1000, 20.0)),
            ("propagation", _propagation, (30.0,)),
            ("match cascades", _cascades, (10, 200)),
        ]
    else:
        workloads = [
            ("mixed chain", _mixed_chain, (4000, 60.0)),
            ("propagation", _propagation, (120.0,)),
            ("match cascades", _cascades, (50, 400)),
        ]

    if not COMPILED:
        print("compiled kernel unavailable; timing the pure-Python engine only")

    print(f"{'workload':<16} {'python':>10} {'compiled':>10} {'speedup':>9}  events")
    for name, fn, fn_args in workloads:
        t_py, eng_py = _time(fn, "python", *fn_args)
        if COMPILED:
            t_cy, eng_cy = _time(fn, "compiled", *fn_args)
            if eng_py.state_view() != eng_cy.state_view():
                raise AssertionError(f"{name}: engines diverged")
            if eng_py.event_count != eng_cy.event_count:
                raise AssertionError(f"{name}: event counts diverged")
            print(
                f"{name:<16} {t_py:>9.3f}s {t_cy:>9.3f}s {t_py / t_cy:>8.1f}x"
                f"  {eng_py.event_count}"
            )
        else:
            print(f"{name:<16} {t_py:>9.3f}s {'-':>10} {'-':>9}  {eng_py.event_count}")
    print("final states verified identical" if COMPILED else "")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
