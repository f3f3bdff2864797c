"""Acceptance suite: ten end-to-end criteria, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines. Several
criteria run full synthesis and take minutes; nothing here is skipped in a
normal run.
"""
import re

import numpy as np
import pytest

from pamc.circuit import emit_qasm
from pamc.library import build, ccx, fully_interacting, nearest_neighbor_chain, qft
from pamc.pam import SweepConfig, compile_circuit, absorb
from pamc.partition import Block, quick_partition
from pamc.permutation import all_permutations, identity, permute_unitary
from pamc.synthesis import (SynthesisConfig, SynthesisError, SynthesisStats,
                            SynthesisTable, fullpas, hs_distance, qsearch,
                            resynthesize_block, seqpas)
from pamc.topology import (SubTopology, distance_matrix,
                           enumerate_subtopologies, preset)
from pamc.verify import communication_score, verify
from tests.conftest import random_circuit

PATH = SubTopology(3, [(0, 1), (1, 2)])
TRIANGLE = SubTopology(3, [(0, 1), (0, 2), (1, 2)])


def report(num, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail}")
    assert ok, f"criterion {num}: {detail}"


def test_criterion_1_fullpas_qft3_path():
    last = None
    for seed in (0, 1, 2):  # retry across seeds permitted
        res = fullpas(qft(3).unitary(), PATH, SynthesisConfig(seed=seed))
        last = (res.circuit.cnot_count(), res.distance)
        if last[0] <= 5 and last[1] <= 1e-10:
            break
    ok = last[0] <= 5 and last[1] <= 1e-10
    report(1, ok, f"FullPAS qft3/path: {last[0]} CNOTs, "
                  f"distance {last[1]:.1e} (need <=5, <=1e-10)")


def test_criterion_2_qsearch_qft3_path():
    c = qsearch(qft(3).unitary(), PATH, SynthesisConfig(seed=0))
    report(2, c.cnot_count() <= 6,
           f"qsearch qft3/path: {c.cnot_count()} CNOTs (need <=6)")


def test_criterion_3_fullpas_toffoli():
    u = ccx().unitary()
    cfg = SynthesisConfig(seed=1)
    path_n = fullpas(u, PATH, cfg).circuit.cnot_count()
    tri_n = fullpas(u, TRIANGLE, cfg).circuit.cnot_count()
    ok = path_n <= 7 and tri_n <= 6
    report(3, ok, f"FullPAS ccx: path {path_n} (need <=7), "
                  f"triangle {tri_n} (need <=6)")


def test_criterion_4_fullpas_swap_free():
    res = fullpas(build("swap2").unitary(), SubTopology(2, [(0, 1)]),
                  SynthesisConfig(seed=0))
    ok = res.circuit.cnot_count() == 0 and res.p_o.map == (1, 0)
    report(4, ok, f"FullPAS swap: {res.circuit.cnot_count()} CNOTs, "
                  f"P_o {list(res.p_o.map)} (need 0 CNOTs, [1, 0])")


def _cheap_block():
    c = build("cxx")
    pc = quick_partition(c, 3)
    assert len(pc.blocks) == 1
    return pc.blocks[0]


def test_criterion_5_instrumented_call_counts():
    u = build("cxx").unitary()
    cfg = SynthesisConfig(seed=0)
    st_seq = SynthesisStats()
    seqpas(u, PATH, cfg, st_seq)
    st_full = SynthesisStats()
    fullpas(u, PATH, cfg, st_full)
    st_tbl = SynthesisStats()
    table = resynthesize_block(_cheap_block(), enumerate_subtopologies(3),
                               cfg, stats=st_tbl)
    n_entries = len(table.block_entries(0))
    ok = (st_seq.qsearch_calls == 12 and st_full.qsearch_calls == 36
          and n_entries == 144 and st_tbl.direct_syntheses <= 24)
    report(5, ok, f"SeqPAS {st_seq.qsearch_calls} calls (need 12), "
                  f"FullPAS {st_full.qsearch_calls} (need 36), table "
                  f"{n_entries} entries (need 144) from "
                  f"{st_tbl.direct_syntheses} direct (need <=24)")


def test_criterion_6_derived_entry_fidelity():
    rng = np.random.default_rng(12)
    feas = [s for s in enumerate_subtopologies(3) if len(s.edges) == 2]
    cfg = SynthesisConfig(seed=0)
    worst = 0.0
    checked = 0
    for trial in range(5):
        c = random_circuit(rng, 3, 6, p_cnot=0.4)
        pc = quick_partition(c, 3)
        blk = Block(0, (0, 1, 2), tuple(c.gates), tuple(range(len(c.gates))))
        u = blk.unitary()
        table = resynthesize_block(blk, feas, cfg)
        for (edges, pi_map, po_map), entry in table.block_entries(0).items():
            if entry.derived_from is None or entry.circuit is None:
                continue
            from pamc.permutation import Permutation
            target = permute_unitary(u, Permutation(pi_map), Permutation(po_map))
            d = hs_distance(target, entry.circuit.unitary())
            worst = max(worst, d)
            checked += 1
    ok = checked > 0 and worst <= 1e-8
    report(6, ok, f"{checked} derived entries over 5 random blocks, worst "
                  f"HS distance {worst:.1e} (need <=1e-8)")


def test_criterion_7_end_to_end_qft5_line5():
    c = qft(5)
    g = preset("line-5")
    pas = compile_circuit(c, g, SweepConfig(seed=0), SynthesisConfig(seed=0),
                          mode="sequential_both")
    base = compile_circuit(c, g, SweepConfig(seed=0), SynthesisConfig(seed=0),
                           mode="sabre_baseline")
    legal = all(g.has_edge(*gate.qubits) for gate in pas.circuit.gates
                if gate.arity == 2)
    rep = verify(c, pas.circuit, pas.initial_wires, pas.final_wires)
    ok = legal and rep.ok and pas.cnot_count <= base.cnot_count
    report(7, ok, f"qft5/line-5 sequential_both: {pas.cnot_count} CNOTs, "
                  f"legal={legal}, verify dist {rep.distance:.1e}, "
                  f"baseline {base.cnot_count} CNOTs")


def test_criterion_8_communication_score():
    chain = communication_score(nearest_neighbor_chain(12))
    full = communication_score(fully_interacting(12))
    ok = abs(chain - 0.1667) <= 0.0005 and full == 1.0
    report(8, ok, f"communication: chain-12 {chain:.4f} "
                  f"(need 0.1667±0.0005), clique-12 {full} (need 1.0)")


def test_criterion_9_property_suites():
    failures = []

    # partition properties, 200 random circuits
    rng = np.random.default_rng(7)
    for _ in range(200):
        c = random_circuit(rng, int(rng.integers(2, 7)), int(rng.integers(1, 25)))
        pc = quick_partition(c, 3)
        src = sorted(i for b in pc.blocks for i in b.source_indices)
        if src != list(range(len(c.gates))) or any(b.width > 3 for b in pc.blocks):
            failures.append("partition")
            break

    # permutation algebra exhaustively for k <= 3
    from pamc.permutation import compose, inverse, permutation_matrix
    for k in (1, 2, 3):
        for a in all_permutations(k):
            for b in all_permutations(k):
                if not np.allclose(permutation_matrix(compose(a, b)),
                                   permutation_matrix(a) @ permutation_matrix(b)):
                    failures.append("permutation")

    # heuristic automorphism invariance + swap instrumentation + determinism
    from pamc.pam import MappingState, heuristic_h, extended_set
    g = preset("ring-6")
    d = distance_matrix(g)
    cfg = SweepConfig(seed=0)
    c = random_circuit(np.random.default_rng(3), 4, 10)
    pc = quick_partition(c, 3)
    fr = [pc.blocks[i] for i in pc.front(set())]
    ex = [pc.blocks[i] for i in extended_set(pc, set(), pc.front(set()), cfg)]
    lay = [0, 2, 4, 5]
    h1 = heuristic_h(fr, ex, MappingState(4, 6, lay), d, cfg)
    h2 = heuristic_h(fr, ex, MappingState(4, 6, [(p + 1) % 6 for p in lay]), d, cfg)
    if abs(h1 - h2) > 1e-12:
        failures.append("heuristic-automorphism")

    rng = np.random.default_rng(31)
    for trial in range(10):
        cc = random_circuit(rng, 4, 10)
        r1 = compile_circuit(cc, preset("line-5"), SweepConfig(seed=trial),
                             mode="sabre_baseline")
        r2 = compile_circuit(cc, preset("line-5"), SweepConfig(seed=trial),
                             mode="sabre_baseline")
        if r1.intra_block_swaps != 0:
            failures.append("swap-restriction")
        if emit_qasm(r1.circuit) != emit_qasm(r2.circuit):
            failures.append("determinism")

    # absorb monotonicity on 50 random compiled circuits
    scfg = SynthesisConfig(seed=0)
    rng = np.random.default_rng(17)
    for trial in range(50):
        cc = random_circuit(rng, 3, int(rng.integers(2, 7)), p_cnot=0.4)
        r = compile_circuit(cc, preset("line-3"), SweepConfig(seed=trial),
                            mode="sabre_baseline")
        r2 = absorb(r, preset("line-3"), 3, scfg)
        if r2.cnot_count > r.cnot_count:
            failures.append("absorb-monotonicity")
            break
        rep = verify(cc, r2.circuit, r2.initial_wires, r2.final_wires)
        if not rep.ok:
            failures.append("absorb-correctness")
            break

    # gradient vs central finite differences (1e-5 relative, 100 points)
    from pamc.synthesis import root_template
    tpl = root_template(3).extended((0, 1)).extended((1, 2))
    rng = np.random.default_rng(23)
    target = np.linalg.qr(rng.normal(size=(8, 8)) +
                          1j * rng.normal(size=(8, 8)))[0]
    f = tpl.objective(target)
    eps = 1e-6
    for _ in range(100):
        th = rng.uniform(-np.pi, np.pi, tpl.num_params)
        _, grad = f(th)
        j = int(rng.integers(tpl.num_params))
        tp, tm = th.copy(), th.copy()
        tp[j] += eps
        tm[j] -= eps
        fd = (f(tp)[0] - f(tm)[0]) / (2 * eps)
        if abs(grad[j] - fd) / max(1.0, abs(fd)) > 1e-5:
            failures.append("gradient")
            break

    report(9, not failures, "property suites all green" if not failures
           else f"failing suites: {sorted(set(failures))}")


def test_criterion_10_long_bench_methodology(tmp_path, monkeypatch, capsys):
    """The full-scale benchmark tables are out of CI reach; check that the
    --long harness reproduces the methodology (columns, modes, >=5 seeds)
    on a reduced instance, and report the soft mode ordering."""
    import pamc.cli as cli
    monkeypatch.setattr(cli, "_long_suite", lambda: [
        ("cxx", "line-3", m)
        for m in ("sabre_baseline", "synth_no_perm", "sequential_both")])
    out = tmp_path / "long.csv"
    code = cli.main(["bench", "--long", "--out", str(out),
                     "--cache-dir", str(tmp_path / "cache")])
    text = out.read_text()
    rows = text.strip().splitlines()
    header = rows[0].split(",")
    modes = {r.split(",")[1] for r in rows[1:]}
    ok = (code == 0 and len(rows) == 16
          and header == ["benchmark", "mode", "cnot_count", "swap_count",
                         "depth", "communication_before",
                         "communication_after", "wall_ms", "verified"]
          and modes == {"sabre_baseline", "synth_no_perm", "sequential_both"}
          and all(r.split(",")[-1] == "True" for r in rows[1:]))
    err = capsys.readouterr().err
    means = dict(re.findall(r"(\w+): ([0-9.]+)", err))
    report(10, ok, f"--long harness: {len(rows) - 1} rows x 5 seeds, "
                   f"columns/modes reproduced; mean CNOTs by mode "
                   f"(soft, reported not asserted): {means}")
