"""Acceptance criteria 1-11; each test prints one PASS/FAIL line.

Run with ``pytest -v tests/test_acceptance.py`` or directly as a script.
"""
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))
from helpers import extract_sine_block, sine_block  # noqa: E402

from qpoisson.analysis import (
    SweepConfig,
    builder_setup,
    circuit_metrics,
    ideal_probabilities,
    reference_circuit,
    reference_setup,
    run_sweep,
)
from qpoisson.noise import CHANNEL_CODES
from qpoisson.poisson import (
    PoissonInstance,
    build_sine_transform,
    builtin_instance,
    eigen_recip,
    eigen_system,
    oracle_distribution,
    solve,
)
from qpoisson.qasm import ParseError, parse, serialize

# mean deviations tabulated for the two sizes; rows i = 1..9
REFERENCE_DBAR = {
    2: {
        "ad": [.0341, .0177, .0543, .0696, .1588, .2701, .4608, .6660, .8118],
        "pd": [.0206, .0275, .0396, .0310, .0196, .0412, .0606, .1504, .2412],
        "dp": [.0175, .0350, .0848, .0697, .1288, .2591, .4171, .5901, .7074],
        "bf": [.0161, .0293, .1001, .1184, .2381, .3782, .5390, .6528, .7047],
    },
    3: {
        "ad": [.0745, .1205, .1363, .2031, .3497, .4702, .5709, .6358, .7105],
        "pd": [.0625, .0498, .0372, .0842, .0900, .1781, .1993, .3257, .4825],
        "dp": [.0310, .1069, .1471, .2183, .3481, .4811, .6183, .5904, .6418],
        "bf": [.0778, .1580, .2116, .3565, .5365, .5875, .6690, .6736, .6212],
    },
}
REFERENCE_THRESHOLD = {2: 7.1e-4, 3: 1.9e-4}
FOUR = ("ad", "pd", "bf", "dp")


def verdict(capsys, number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok


@pytest.fixture(scope="module")
def sweeps():
    start = time.perf_counter()
    reports = {n: run_sweep(SweepConfig(n=n, noise_types=FOUR)) for n in (2, 3)}
    return reports, time.perf_counter() - start


def check_1(capsys=None):
    start = time.perf_counter()
    res = solve(builtin_instance(2))
    elapsed = time.perf_counter() - start
    got = [res.post_selected_probs[k] for k in (1, 2, 3)]
    ok = np.allclose(got, [0.205, 0.304, 0.161], atol=0.005) and elapsed < 1.0
    return verdict(capsys, 1, ok, f"n=2 probabilities {np.round(got, 4).tolist()} in {elapsed:.2f}s")


def check_2(capsys=None):
    start = time.perf_counter()
    res = solve(builtin_instance(3))
    elapsed = time.perf_counter() - start
    got = [res.post_selected_probs[k] for k in range(1, 8)]
    want = [0.029, 0.078, 0.118, 0.132, 0.114, 0.073, 0.025]
    ok = np.allclose(got, want, atol=0.005) and elapsed < 5.0
    return verdict(capsys, 2, ok, f"n=3 probabilities {np.round(got, 4).tolist()} in {elapsed:.2f}s")


def check_3(capsys=None):
    start = time.perf_counter()
    worst, cases = 0.0, 0
    for n in range(2, 11):
        lam = eigen_system(n).lambdas
        for j in range(1, 1 << n):
            worst = max(worst, abs(eigen_recip(j, n) - 8.0 / lam[j - 1]))
            cases += 1
    elapsed = time.perf_counter() - start
    ok = worst < 1e-12 and elapsed < 1.0
    return verdict(capsys, 3, ok, f"{cases} cases, max error {worst:.1e}, {elapsed:.2f}s")


def check_4(capsys=None):
    errs = []
    for n in (2, 3, 4):
        block = extract_sine_block(build_sine_transform(n), n)
        errs.append(float(np.max(np.abs(block - (-1j) * sine_block(n)))))
    ok = max(errs) < 1e-9
    return verdict(capsys, 4, ok, f"|block - (-i)ST| max per n=2,3,4: {[f'{e:.1e}' for e in errs]}")


def check_5(capsys=None):
    errs = []
    for n in (2, 3):
        a = ideal_probabilities(reference_setup(n))
        b = ideal_probabilities(builder_setup(n))
        errs.append(max(abs(a[k] - b[k]) for k in a))
    ok = max(errs) < 1e-6
    return verdict(capsys, 5, ok, f"listing vs builder max difference n=2,3: {[f'{e:.1e}' for e in errs]}")


def check_6(capsys=None):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for n in (2, 3):
        for _ in range(20):
            inst = PoissonInstance(n, rng.normal(size=(1 << n) - 1))
            res = solve(inst)
            got = np.array([res.post_selected_probs[k] for k in range(1, 1 << n)])
            got = got / got.sum()
            worst = max(worst, float(np.max(np.abs(got - oracle_distribution(inst)["normalized"]))))
    ok = worst < 1e-6
    return verdict(capsys, 6, ok, f"40 random instances, max |P - |Cv|^2| = {worst:.1e}")


def check_7(capsys=None):
    worst_c, worst_t = 0.0, 0.0
    rho = np.array([[0.6, 0.3 - 0.2j], [0.3 + 0.2j, 0.4]])
    for code in FOUR:
        for p in (0.0, 1.926e-4, 2.646e-3, 1.8e-2, 3.637e-2, 1.0):
            ch = CHANNEL_CODES[code](p)
            worst_c = max(worst_c, ch.completeness_error())
            worst_t = max(worst_t, abs(np.trace(ch(rho)) - 1.0))
    ok = worst_c < 1e-12 and worst_t < 1e-12
    return verdict(capsys, 7, ok, f"completeness error {worst_c:.1e}, trace error {worst_t:.1e}")


def check_8(reports, capsys=None):
    problems = []
    for n, r in reports.items():
        for i in range(4, 10):
            vals = {c: r.dbar(c, i) for c in FOUR}
            if min(vals, key=vals.get) != "pd":
                problems.append(f"n={n} i={i}: pd not smallest {vals}")
        for i in range(4, 8):
            vals = {c: r.dbar(c, i) for c in FOUR}
            if max(vals, key=vals.get) != "bf":
                problems.append(f"n={n} i={i}: bf not largest {vals}")
        for code in FOUR:
            for i, expected in enumerate(REFERENCE_DBAR[n][code], start=1):
                if expected <= 0.05:
                    continue
                ours = r.dbar(code, i)
                ratio = max(ours / expected, expected / ours)
                if ratio > 3.0:
                    problems.append(f"n={n} {code} i={i}: {ours:.4f} vs {expected:.4f} (x{ratio:.2f})")
    detail = "ordering and factor-3 agreement hold" if not problems else "; ".join(problems)
    return verdict(capsys, 8, not problems, detail)


def check_9(reports, elapsed, capsys=None):
    parts, ok = [], elapsed < 600
    for n, r in reports.items():
        p = r.worst_threshold(0.10)
        target = REFERENCE_THRESHOLD[n]
        good = p is not None and target / 3 <= p <= target * 3
        ok &= good
        shown = "none" if p is None else f"{p:.3e}"
        parts.append(f"n={n} worst-channel p={shown} (reference {target:.1e})")
    parts.append(f"sweep {elapsed:.0f}s")
    return verdict(capsys, 9, ok, ", ".join(parts))


def check_10(capsys=None):
    count = circuit_metrics(reference_circuit(3)).one_two_qubit_gate_count
    problems = [] if abs(count - 217) <= 10 else [f"listing count {count} not within 10 of 217"]
    for n in range(2, 6):
        m = circuit_metrics(build_sine_transform(n))
        bound = 3 * n * n + 2 * n - 1
        if m.one_two_qubit_gate_count > bound:
            problems.append(f"n={n}: ST count {m.one_two_qubit_gate_count} > {bound}")
        if m.depth > 2 * n:
            problems.append(f"n={n}: ST depth {m.depth} > {2 * n}")
    detail = f"n=3 listing count {count}"
    if problems:
        detail += "; discrepancies: " + "; ".join(problems)
    return verdict(capsys, 10, not problems, detail)


def check_11(capsys=None):
    rng = np.random.default_rng(7)
    crashes = []
    for _ in range(100_000):
        data = rng.integers(0, 256, size=int(rng.integers(0, 64)), dtype=np.uint8).tobytes()
        try:
            parse(data)
        except ParseError:
            pass
        except Exception as exc:  # noqa: BLE001 - any other exception is a crash
            crashes.append(repr(exc))
    trips = all(parse(serialize(reference_circuit(n))) == reference_circuit(n) for n in (2, 3))
    ok = not crashes and trips
    return verdict(capsys, 11, ok, f"1e5 fuzz inputs, {len(crashes)} crashes, round-trip {'ok' if trips else 'broken'}")


def test_criterion_01(capsys):
    assert check_1(capsys)


def test_criterion_02(capsys):
    assert check_2(capsys)


def test_criterion_03(capsys):
    assert check_3(capsys)


def test_criterion_04(capsys):
    assert check_4(capsys)


def test_criterion_05(capsys):
    assert check_5(capsys)


def test_criterion_06(capsys):
    assert check_6(capsys)


def test_criterion_07(capsys):
    assert check_7(capsys)


def test_criterion_08(sweeps, capsys):
    reports, _ = sweeps
    assert check_8(reports, capsys)


def test_criterion_09(sweeps, capsys):
    reports, elapsed = sweeps
    assert check_9(reports, elapsed, capsys)


def test_criterion_10(capsys):
    assert check_10(capsys)


def test_criterion_11(capsys):
    assert check_11(capsys)


if __name__ == "__main__":
    for check in (check_1, check_2, check_3, check_4, check_5, check_6, check_7):
        check()
    t0 = time.perf_counter()
    reps = {n: run_sweep(SweepConfig(n=n, noise_types=FOUR)) for n in (2, 3)}
    check_8(reps)
    check_9(reps, time.perf_counter() - t0)
    check_10()
    check_11()
