"""mubkit command line: gen, check, orbit, group, verify-theorem1.

Exit codes: 0 success / all checks pass, 1 a requested check failed,
2 usage error or unreadable input.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .clifford import enumerate_group
from .designs import CHECKS, DEFAULT_TOL, BadGroupingError, DimensionMismatchError, unitary_2design_potential
from .gf import field_for_q, prime_power
from .orbits import highly_symmetric_check, orbit, stabilizer, theorem1_experiment
from .states import PureState, StateSet, canonical_mub, haar_state, hesse_sic

SUPPORTED_Q = (2, 3, 4, 5, 7, 8, 9)
log = logging.getLogger("mubkit")


class UsageError(Exception):
    pass


@dataclass
class CommandConfig:
    subcommand: str
    q: int | None = None
    tolerance: float = DEFAULT_TOL
    rng_seed: int = 0
    input: str | None = None
    output: str | None = None
    tests: list[str] = field(default_factory=list)
    threads: int = 0
    verbosity: int = 0

    def __post_init__(self):
        if self.tolerance <= 0:
            raise UsageError("tolerance must be > 0")
        if self.q is not None and self.q not in SUPPORTED_Q:
            raise UsageError("q must be a prime power ≤ 9")

    @property
    def workers(self) -> int:
        n = self.threads or int(os.environ.get("MUBKIT_THREADS", "0") or 0)
        return n if n > 0 else (os.cpu_count() or 1)


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=False)


def _emit(obj, out_path: str | None):
    text = dumps(obj) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _load_states(path: str) -> StateSet:
    obj = _read_json(path)
    try:
        if isinstance(obj, list):
            arr = np.array([[complex(re, im) for re, im in v] for v in obj], dtype=complex)
            return StateSet(arr, arr.shape[1])
        return StateSet.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed StateSet in {path}: {exc}") from exc


def cmd_gen(args, cfg: CommandConfig) -> int:
    if args.kind == "mub":
        if cfg.q is None:
            raise UsageError("gen mub needs --q")
        S = canonical_mub(field_for_q(cfg.q))
    else:
        if cfg.q not in (None, 3):
            raise UsageError("the Hesse SIC lives in dimension 3")
        S = hesse_sic()
    _emit(S.to_json(), cfg.output)
    return 0


def cmd_check(args, cfg: CommandConfig) -> int:
    S = _load_states(cfg.input)
    unknown = [t for t in cfg.tests if t not in CHECKS]
    if unknown:
        raise UsageError(f"unknown tests {unknown}; choose from {sorted(CHECKS)}")
    reports = []
    for t in cfg.tests:
        try:
            reports.append(CHECKS[t](S, cfg.tolerance).to_json())
        except (BadGroupingError, DimensionMismatchError) as exc:
            reports.append({"test": t, "passed": False, "residual": None,
                            "tolerance": cfg.tolerance, "details": [{"error": str(exc)}], "info": {}})
    _emit(reports, cfg.output)
    return 0 if all(r["passed"] for r in reports) else 1


def _seed_state(spec: str, q: int, rng_seed: int) -> tuple[str, np.ndarray]:
    f = field_for_q(q)
    if spec == "mub0":
        return spec, canonical_mub(f).states[0]
    if spec == "hesse":
        if q != 3:
            raise UsageError("--seed-state hesse requires --q 3")
        return spec, hesse_sic().states[0]
    if spec == "random":
        return f"random(rng_seed={rng_seed})", haar_state(q, np.random.default_rng(rng_seed)).amplitudes
    if spec.startswith("file:"):
        S = _load_states(spec[5:])
        if S.dim != q:
            raise UsageError(f"state in {spec[5:]} has dimension {S.dim}, expected {q}")
        return spec, PureState.from_vector(S.states[0]).amplitudes
    raise UsageError(f"unknown seed state {spec!r}")


def cmd_orbit(args, cfg: CommandConfig) -> int:
    q = cfg.q
    name, psi = _seed_state(args.seed_state, q, cfg.rng_seed)
    G = enumerate_group(field_for_q(q))
    O = orbit(psi, G)
    stab = stabilizer(O.states.states[0], G)
    report = {
        "q": q,
        "seed": name,
        "group_order": len(G),
        "orbit_size": len(O),
        "stabilizer_order": stab.order,
        "orbit_stabilizer_ok": len(O) * stab.order == len(G),
        "design2": CHECKS["design2"](O.states, 1e-7).to_json(),
        "highly_symmetric": highly_symmetric_check(O, G).to_json() if len(O) < len(G) else None,
    }
    if args.states_out:
        with open(args.states_out, "w") as fh:
            fh.write(dumps(O.states.to_json()) + "\n")
    _emit(report, cfg.output)
    return 0


def cmd_group(args, cfg: CommandConfig) -> int:
    f = field_for_q(cfg.q)
    G = enumerate_group(f)
    if args.dump_matrices or cfg.output:
        _emit(G.to_json(matrices=args.dump_matrices), cfg.output)
        return 0
    stats = {"q": cfg.q, "field": f.to_json(), "order": len(G), "expected_order": G.expected_order,
             "generators": ["A", "B", "X", "Z"],
             "max_word_length": max(len(w) for w in G.words)}
    if args.potential:
        sampled = cfg.q > 5
        val, se = unitary_2design_potential(G, sampled=sampled, rng=np.random.default_rng(cfg.rng_seed))
        stats["frame_potential"] = {"value": float(f"{val:.10g}"), "stderr": float(f"{se:.4g}"),
                                    "mode": "sampled" if sampled else "exhaustive", "haar_value": 2}
    _emit(stats, None)
    return 0


def cmd_verify(args, cfg: CommandConfig) -> int:
    report = theorem1_experiment(field_for_q(cfg.q), args.samples, cfg.rng_seed, cfg.workers)
    _emit(report, cfg.output)
    return 0 if report["all_pass"] else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mubkit", description=__doc__.splitlines()[0])
    ap.add_argument("--threads", type=int, default=0, help="worker cap (0 = auto, env MUBKIT_THREADS)")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="write a StateSet (canonical MUB or Hesse SIC)")
    g.add_argument("kind", choices=["mub", "sic"])
    g.add_argument("--q", type=int)
    g.add_argument("--hesse", action="store_true", help="the Hesse SIC (only SIC available)")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", help="run design checks on a StateSet file")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--tests", default="mub,design2,sic,frame")
    c.add_argument("--tol", type=float, default=DEFAULT_TOL)
    c.add_argument("--out")
    c.set_defaults(func=cmd_check)

    o = sub.add_parser("orbit", help="orbit of a seed state under the restricted Clifford group")
    o.add_argument("--q", type=int, required=True)
    o.add_argument("--seed-state", default="mub0", help="mub0 | hesse | random | file:<path>")
    o.add_argument("--rng-seed", type=int, default=0)
    o.add_argument("--states-out", help="also write the orbit as a StateSet")
    o.add_argument("--out")
    o.set_defaults(func=cmd_orbit)

    gr = sub.add_parser("group", help="enumerate the restricted Clifford group")
    gr.add_argument("--q", type=int, required=True)
    gr.add_argument("--dump-matrices", action="store_true")
    gr.add_argument("--potential", action="store_true", help="also report the frame potential")
    gr.add_argument("--rng-seed", type=int, default=0)
    gr.add_argument("--out")
    gr.set_defaults(func=cmd_group)

    v = sub.add_parser("verify-theorem1", help="minimal-orbit experiment")
    v.add_argument("--q", type=int, required=True)
    v.add_argument("--samples", type=int, default=20)
    v.add_argument("--rng-seed", type=int, default=0)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        q = getattr(args, "q", None)
        if q is not None and (prime_power(q) is None or q not in SUPPORTED_Q):
            raise UsageError("q must be a prime power ≤ 9")
        cfg = CommandConfig(
            subcommand=args.cmd, q=q,
            tolerance=getattr(args, "tol", DEFAULT_TOL),
            rng_seed=getattr(args, "rng_seed", 0),
            input=getattr(args, "input", None),
            output=getattr(args, "out", None),
            tests=[t.strip() for t in getattr(args, "tests", "").split(",") if t.strip()],
            threads=args.threads, verbosity=args.verbose)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"mubkit {args.cmd}: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
