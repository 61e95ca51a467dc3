"""The sixteen acceptance criteria, each at its stated tolerance.

Every test records a one-line PASS/FAIL summary, printed at the end of the
pytest run (see conftest.py).
"""
import math
import time


from projgasket import fractal_analysis as fa
from projgasket.cli import main
from projgasket.dimension_lab import (boxcount_barycenters, boxcount_set, build_ledger, count_samples,
                                      default_cloud_range, eps_schedule, loglog_fit, minkowski_band_n3,
                                      minkowski_table, midpoint_levels, reference_root)
from projgasket.lattice_tree import E_C, E_T, NAMED_BASES, barycenter, fibonacci_section, simplex_basis


def _cloud_slope(root, depth, child_rule=None):
    levels = range(0, 17)
    counts, dropped = boxcount_barycenters(root, depth, levels, child_rule=child_rule)
    npts = sum(len(root) ** d for d in range(depth + 1)) - dropped
    return loglog_fit(count_samples(counts), default_cloud_range(counts, npts))


def test_c01_series_n2(record):
    t = time.perf_counter()
    rep = fa.c_sum(2)
    dt = time.perf_counter() - t
    v = rep.constants["value"]
    exact = 253 / 36 - 2 * math.pi**2 / 3
    ok = abs(v - exact) <= 1e-6 and v < 0.5 and dt < 1.0 and rep.ok
    record(1, ok, f"sum={v:.9f} closed form={exact:.9f} runtime={dt:.2f}s")


def test_c02_series_n3(record):
    rep = fa.c_sum(3)
    v = rep.constants["value"]
    flagged = "printed_constant_13" in rep.constants and "discrepancy" in rep.constants
    ok = abs(v - 0.22397) <= 1e-5 and v < 1 / 3 and flagged
    record(2, ok, f"sum={v:.7f} target 0.22397+-1e-5 (|diff|={abs(v - 0.22397):.2e}); "
                  f"13-vs-23 flagged={flagged}")


def test_c03_f_maxima(record):
    bad = []
    for n in range(2, 6):
        for k in range(0, 11):
            rep = fa.verify_f_max(n, k)
            if not rep.ok:
                bad.append((n, k, rep.violations))
    origin = fa.verify_f_max(2, 0).constants["argmax"]
    ok = not bad and max(abs(x) for x in origin) <= 1e-6
    record(3, ok, f"44 (n,k) cases, failures={len(bad)}, n=2 k=0 maximizer={origin}")


def test_c04_tribonacci_section(record):
    sec = fibonacci_section(simplex_basis(2), 2, -1, 40)
    bs = [barycenter(b) for _, b in sec]
    want = [(1, 1, 3), (1, 3, 5), (3, 5, 9), (5, 9, 17), (9, 17, 31), (17, 31, 57)]
    b = bs[-1]
    lim = (b[0] / b[2], b[1] / b[2])
    dist = max(abs(lim[0] - 0.296), abs(lim[1] - 0.544))
    ok = bs[:6] == want and dist <= 1e-3
    record(4, ok, f"barycenters={bs[:6]} limit=({lim[0]:.4f},{lim[1]:.4f})")


def test_c05_psi_invariance(record):
    t = time.perf_counter()
    reps = [fa.psi_invariance_check(NAMED_BASES["n1"], 6),
            fa.psi_invariance_check(simplex_basis(2), 6),
            fa.psi_invariance_check(simplex_basis(3), 6)]
    dt = time.perf_counter() - t
    nodes = sum(r.nodes for r in reps)
    ok = all(r.ok for r in reps) and dt < 10
    record(5, ok, f"nodes={nodes} violations={sum(len(r.violations) for r in reps)} runtime={dt:.2f}s")


def test_c06_partition_identity(record):
    reps = [fa.partition_check(simplex_basis(n), 6, tol=1e-12) for n in (2, 3)]
    err = max(r.constants.get("max_error", 0.0) for r in reps)
    ok = all(r.ok for r in reps)
    record(6, ok, f"nodes={sum(r.nodes for r in reps)} max error={err:.2e}")


def test_c07_body_volume_bounds(record):
    r2 = fa.body_volume_check(simplex_basis(2), 10)
    r3 = fa.body_volume_check(simplex_basis(3), 6)
    root = fa.root_body_bounds(simplex_basis(3))
    ok = r2.ok and r3.ok and root.ok and r2.nodes == 88573 and r3.nodes == 5461
    record(7, ok, f"n=2 bodies={r2.nodes} viol={len(r2.violations)}; n=3 bodies={r3.nodes} "
                  f"viol={len(r3.violations)}; root b_inf=4 ok={root.ok}")


def test_c08_barycenter_recursion(record):
    rep = fa.barycenter_recursion_check(simplex_basis(2), 8)
    record(8, rep.ok, f"bodies={rep.nodes} violations={len(rep.violations)}")


def test_c09_weight_propagation(record):
    reps = [fa.weights_check(n, trials=10_000, depth=12, seed=0) for n in (2, 3, 4)]
    ok = all(r.ok for r in reps)
    record(9, ok, "violations n=2,3,4: " + ",".join(str(len(r.violations)) for r in reps))


def test_c10_n1(record):
    rep = fa.n1_check(depth=20)
    record(10, rep.ok, f"nodes={rep.nodes} violations={len(rep.violations)}")


def test_c11_calibration(record):
    t = time.perf_counter()
    s = _cloud_slope(reference_root(2), 12, midpoint_levels)
    t_s = time.perf_counter() - t
    t = time.perf_counter()
    tx = _cloud_slope(reference_root(3), 8, midpoint_levels)
    t_t = time.perf_counter() - t
    ok = (abs(s.slope - 1.585) <= 0.06 and abs(tx.slope - 2.0) <= 0.06
          and t_s < 120 and t_t < 120)
    record(11, ok, f"Sierpinski={s.slope:.3f} ({t_s:.1f}s)  Tetrix={tx.slope:.3f} ({t_t:.1f}s)")


def test_c12_fc(record):
    t = time.perf_counter()
    cloud = _cloud_slope(E_C, 13)
    counts = boxcount_set(E_C, 12, range(0, 12))
    est = loglog_fit(count_samples(counts), (2, 11))
    dt = time.perf_counter() - t
    ok = abs(cloud.slope - 1.69) <= 0.05 and abs(est.slope - 1.7) <= 0.1 and dt < 600
    record(12, ok, f"cloud slope={cloud.slope:.3f} set slope l=2..11={est.slope:.3f} runtime={dt:.0f}s")


def test_c13_et_cloud(record):
    t = time.perf_counter()
    est = _cloud_slope(E_T, 9)
    dt = time.perf_counter() - t
    ok = abs(est.slope - 2.20) <= 0.12 and dt < 900
    record(13, ok, f"depth 9 cloud slope={est.slope:.3f} fit l={est.fit_range} runtime={dt:.1f}s")


def test_c14_minkowski_n2(record):
    ledger = build_ledger(E_C, 1.2**-50)
    tab = minkowski_table(ledger, eps_schedule(1.2, 50))
    d = tab[-1]["dimension"]
    slope, _ = ledger.decay_exponent()
    ok = 1.65 <= d <= 1.85 and abs(slope + 0.69) <= 0.05
    record(14, ok, f"estimate at m=50: {d:.4f}; radius decay exponent {slope:.3f}")


def test_c15_minkowski_n3(record):
    ledger = build_ledger(E_T, 1.2**-48)
    band = minkowski_band_n3(ledger)
    lo, hi = band["lower"], band["upper"]
    slope = band["radius_exponent"]
    ok = lo <= 2 <= hi and 1.5 <= lo and hi <= 2.9 and abs(slope + 0.57) <= 0.05
    record(15, ok, f"band=[{lo:.3f},{hi:.3f}] radius decay exponent {slope:.3f}")


DETERMINISM_RUNS = [
    ["gen", "--basis", "EC", "--depth", "5"],
    ["gen", "--basis", "ET", "--depth", "3"],
    ["reference", "tetrix", "--depth", "3"],
    ["verify", "weights"],
    ["verify", "barycenter", "--depth", "5"],
    ["export", "--basis", "ET", "--depth", "3", "--format", "ply"],
    ["export", "--basis", "EC", "--depth", "4", "--format", "json", "--what", "bodies"],
    ["section", "--start", "2", "--direction", "-1", "--length", "30"],
]

PARALLEL_RUNS = [
    ["dims", "boxset", "--basis", "EC", "--depth", "7"],
    ["dims", "boxbary", "--basis", "ET", "--depth", "8"],
    ["dims", "boxset", "--reference", "tetrix", "--depth", "5"],
    ["dims", "minkowski", "--basis", "EC", "--mmax", "25"],
]


def _run_to_bytes(args, out):
    """Exit code and (suffix, bytes) of every file the command wrote."""
    code = main(args + ["--out", str(out)])
    paths = sorted(out.parent.glob(out.name + "*"))
    return code, tuple((p.name[len(out.name):], p.read_bytes()) for p in paths)


def test_c16_determinism(record, tmp_path):
    bad = []
    for i, args in enumerate(DETERMINISM_RUNS):
        a = _run_to_bytes(args, tmp_path / f"a{i}")
        b = _run_to_bytes(args, tmp_path / f"b{i}")
        if a != b or not a[1]:
            bad.append(" ".join(args))
    for i, args in enumerate(PARALLEL_RUNS):
        outs = [_run_to_bytes(args + ["--workers", str(w)], tmp_path / f"p{i}w{w}")
                for w in (1, 2, 8)]
        if len(set(outs)) != 1 or outs[0][0] != 0:
            bad.append(" ".join(args) + " (workers)")
    record(16, not bad, f"{len(DETERMINISM_RUNS)} commands x2 runs, {len(PARALLEL_RUNS)} x workers 1/2/8; "
                        f"mismatches={bad}")
