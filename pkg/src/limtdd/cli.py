"""Command-line entry points: sim, func, bench, export-dot.

Every command emits a machine-readable run report (JSON by default, CSV on
request).  The benchmark command fans runs out over a process pool, one
manager per run.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import circuits as qc
from .dd import DDManager

CSV_COLUMNS = ["run", "seed", "mode", "precision", "final_nodes",
               "peak_nodes", "time_ms"]


@dataclass
class RunReport:
    command: str
    circuit: str
    n_qubits: int
    n_gates: int
    precision: int
    mode: str
    stab_mode: str
    seed: int | None
    final_nodes: int
    peak_nodes: int
    wall_time_ms: float
    fidelity_vs_oracle: float | None = None

    def validate(self):
        assert self.final_nodes <= self.peak_nodes
        assert self.final_nodes >= 1 and self.peak_nodes >= 1
        return self


def _load_circuit(args):
    if args.file:
        with open(args.file) as fh:
            circ = qc.parse_qasm(fh.read())
        return circ, args.file
    if not args.gen:
        raise qc.CircuitError("need --file or --gen")
    if args.gen == "cliffordt":
        circ = qc.gen_random_cliffordt(args.n, args.gates, args.t_prob,
                                       args.seed or 0)
    else:
        circ = qc.build_circuit(args.gen, args.n)
    return circ, f"{args.gen}_{args.n}"


def _manager(args):
    return DDManager(precision=args.precision, mode=args.mode,
                     stab_mode=args.stab)


def _report(args, command, circ, desc, mgr, final, dt, fidelity=None):
    return RunReport(
        command=command, circuit=desc, n_qubits=circ.n, n_gates=circ.n_gates,
        precision=mgr.N if mgr.mode == "limtdd" else 0, mode=mgr.mode,
        stab_mode=mgr.stab_mode, seed=args.seed,
        final_nodes=mgr.size(final), peak_nodes=mgr.peak_nodes,
        wall_time_ms=round(dt * 1000.0, 3),
        fidelity_vs_oracle=fidelity).validate()


def cmd_sim(args, out):
    circ, desc = _load_circuit(args)
    mgr = _manager(args)
    bits = args.input or "0" * circ.n
    t0 = time.perf_counter()
    state, wires = qc.simulate(circ, bits, mgr)
    dt = time.perf_counter() - t0
    fidelity = None
    if args.verify:
        if circ.n > 12:
            raise qc.CircuitError("--verify needs <= 12 qubits")
        want = qc.statevector(circ, bits)
        got = mgr.to_tensor(state, wires.live_indices()).data
        fidelity = float(np.max(np.abs(got - want)))
    rep = _report(args, "sim", circ, desc, mgr, state, dt, fidelity)
    payload = asdict(rep)
    if args.amplitudes:
        amps = []
        for i in range(min(args.amplitudes, 2 ** circ.n)):
            bits_i = format(i, f"0{circ.n}b")
            asg = {wires.live(q): int(bits_i[circ.n - 1 - q])
                   for q in range(circ.n)}
            a = mgr.amplitude(state, asg)
            amps.append([bits_i, float(a.real), float(a.imag)])
        payload["amplitudes"] = amps
    _emit(payload, args, out)
    return 0


def cmd_func(args, out):
    circ, desc = _load_circuit(args)
    mgr = _manager(args)
    t0 = time.perf_counter()
    func, wires = qc.functionality(circ, mgr)
    dt = time.perf_counter() - t0
    fidelity = None
    if args.verify:
        if circ.n > 6:
            raise qc.CircuitError("--verify for functionality needs <= 6 qubits")
        U = qc.unitary_matrix(circ)
        names = []
        for q in reversed(range(circ.n)):
            names.append(wires.live(q))
            names.append(wires.input_name(q))
        arr = mgr.to_tensor(func, tuple(names)).array()
        perm = ([2 * i for i in range(circ.n)]
                + [2 * i + 1 for i in range(circ.n)])
        got = np.transpose(arr, perm).reshape(2 ** circ.n, 2 ** circ.n)
        fidelity = float(np.max(np.abs(got - U)))
    rep = _report(args, "func", circ, desc, mgr, func, dt, fidelity)
    _emit(asdict(rep), args, out)
    return 0


def _bench_one(payload):
    run, seed, mode, precision, stab, n, gates, t_prob = payload
    circ = qc.gen_random_cliffordt(n, gates, t_prob, seed)
    mgr = DDManager(precision=max(precision, 1) if mode == "limtdd" else 8,
                    mode=mode, stab_mode=stab)
    t0 = time.perf_counter()
    state, _ = qc.simulate(circ, "0" * n, mgr)
    dt = time.perf_counter() - t0
    return {"run": run, "seed": seed, "mode": mode, "precision": precision,
            "final_nodes": mgr.size(state), "peak_nodes": mgr.peak_nodes,
            "time_ms": round(dt * 1000.0, 3)}


def cmd_bench(args, out):
    base_seed = args.seed if args.seed is not None else 0
    cells = []
    for mode in args.modes:
        if mode == "tdd":
            cells.append(("tdd", 0))
        else:
            for p in args.precisions:
                cells.append(("limtdd", p))
    jobs = []
    for mode, prec in cells:
        for run in range(args.runs):
            jobs.append((run, base_seed + run, mode, prec, args.stab,
                         args.n, args.gates, args.t_prob))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    aggregates = []
    for mode, prec in cells:
        cell = [r for r in rows if r["mode"] == mode and r["precision"] == prec]
        peaks = [r["peak_nodes"] for r in cell]
        aggregates.append({
            "mode": mode, "precision": prec, "runs": len(cell),
            "mean_peak_nodes": statistics.mean(peaks),
            "median_peak_nodes": statistics.median(peaks),
            "mean_time_ms": round(statistics.mean(r["time_ms"] for r in cell), 3),
        })
    if args.report == "csv":
        w = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(r)
    else:
        json.dump({"command": "bench", "n_qubits": args.n,
                   "n_gates": args.gates, "t_prob": args.t_prob,
                   "seed": base_seed, "stab_mode": args.stab,
                   "runs": rows, "aggregates": aggregates}, out, indent=2)
        out.write("\n")
    return 0


def cmd_export_dot(args, out):
    circ, desc = _load_circuit(args)
    mgr = _manager(args)
    if args.what == "functionality":
        handle, _ = qc.functionality(circ, mgr)
    else:
        handle, _ = qc.simulate(circ, args.input or "0" * circ.n, mgr)
    dot = mgr.export_dot(handle)
    with open(args.output, "w") as fh:
        fh.write(dot + "\n")
    json.dump({"command": "export-dot", "circuit": desc,
               "output": args.output, "nodes": mgr.size(handle)}, out)
    out.write("\n")
    return 0


def _emit(payload, args, out):
    if args.report == "csv":
        w = csv.DictWriter(out, fieldnames=list(payload), lineterminator="\n")
        w.writeheader()
        w.writerow(payload)
    else:
        json.dump(payload, out, indent=2)
        out.write("\n")


def _add_common(p, bench=False):
    p.add_argument("--file", help="QASM 2.0 circuit file")
    p.add_argument("--gen", help="built-in generator "
                   "(ghz, qft, fig9, remark2, cliffordt)")
    p.add_argument("--n", type=int, default=4, help="qubit count for --gen")
    p.add_argument("--gates", type=int, default=400,
                   help="gate count for random generators")
    p.add_argument("--t-prob", type=float, default=0.02, dest="t_prob")
    p.add_argument("--precision", type=int, default=8)
    p.add_argument("--mode", choices=["tdd", "limtdd"], default="limtdd")
    p.add_argument("--stab", choices=["fast", "full"], default="fast")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--report", choices=["json", "csv"], default="json")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="limtdd",
        description="Tensor decision diagrams with XP edge maps: simulate "
                    "circuits, build functionalities, benchmark, export DOT.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sim", help="simulate a circuit on a basis input")
    _add_common(p)
    p.add_argument("--input", help="basis input bits, qubit n-1 first")
    p.add_argument("--amplitudes", type=int, default=0, metavar="K",
                   help="print the K lexicographically first amplitudes")
    p.add_argument("--verify", action="store_true",
                   help="compare against the dense oracle (<= 12 qubits)")
    p.set_defaults(fn=cmd_sim)

    p = sub.add_parser("func", help="build the circuit functionality diagram")
    _add_common(p)
    p.add_argument("--verify", action="store_true",
                   help="compare against the dense unitary (<= 6 qubits)")
    p.set_defaults(fn=cmd_func)

    p = sub.add_parser("bench", help="benchmark random Clifford+T circuits")
    _add_common(p)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--precisions", type=int, nargs="+", default=[8])
    p.add_argument("--modes", nargs="+", choices=["tdd", "limtdd"],
                   default=["limtdd"])
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("export-dot", help="write a diagram as graphviz DOT")
    _add_common(p)
    p.add_argument("--what", choices=["state", "functionality"],
                   default="state")
    p.add_argument("--input", help="basis input bits for --what state")
    p.add_argument("output", help="output path for the DOT text")
    p.set_defaults(fn=cmd_export_dot)
    return ap


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args, out)
    except (qc.CircuitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
