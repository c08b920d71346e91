"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

Thresholds and sample sizes are the stated ones; nothing here is relaxed to
make a criterion pass.
"""

import io
import json
import time
from contextlib import redirect_stdout

import numpy as np

from momentcurve.cli import main
from momentcurve.geometry import bflat_outline, shell_mesh
from momentcurve.kernel import eval_coeffs, eval_f
from momentcurve.moments import (
    MomentVector,
    TraceInput,
    feasible_tn,
    power_sums,
    solve_exact_n3,
    traces_from_angles,
    traces_to_power_sums,
)
from momentcurve.oracle import build, random_probes
from momentcurve.region import (
    UPPER,
    RegionConfig,
    Verdict,
    bflat_status_many,
    classify,
    member_many,
    z_range_many,
)

BOUNDARY = {Verdict.UPPER, Verdict.LOWER, Verdict.RIM}


def curve(t):
    t = np.asarray(t, float)
    return np.stack([t, t * t, t**3], axis=-1)


def cli_json(*argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(list(argv))
    return code, json.loads(buf.getvalue())


def test_c1_discriminant_identity(criterion):
    rng = np.random.default_rng(1)
    N = 100_000
    start = time.perf_counter()
    k = rng.integers(1, 13, N)
    l = rng.integers(1, 13, N)
    x, y = rng.uniform(-10, 10, size=(2, N))
    a, b, c, d = eval_coeffs(k, l, x, y)
    lhs = b * b - 4 * a * c
    rhs = 4 * k * l * (l - k) ** 2 * d**3
    rel = np.abs(lhs - rhs) / (1 + np.abs(b * b) + np.abs(4 * a * c))
    elapsed = time.perf_counter() - start
    ok = rel.max() <= 1e-6 and elapsed < 1.0
    criterion("C1 discriminant identity", ok, f"max rel {rel.max():.2e}, {elapsed:.3f}s")


def test_c2_square_identity(criterion):
    rng = np.random.default_rng(2)
    N = 10_000
    k = rng.integers(1, 13, N)
    x, y, z = rng.uniform(-10, 10, size=(3, N))
    a, b, _, _ = eval_coeffs(k, k, x, y)
    f = eval_f(k, k, x, y, z)
    rel = np.abs(f - a * (z + b / (2 * a)) ** 2) / (1 + np.abs(f))
    criterion("C2 k=l square identity", rel.max() <= 1e-6, f"max rel {rel.max():.2e}")


def test_c3_membership_soundness(criterion):
    rng = np.random.default_rng(3)
    start = time.perf_counter()
    rejected = 0
    for n in range(3, 9):
        ts = rng.uniform(-1, 1, size=(10_000, n))
        pts = curve(ts).sum(axis=1)
        rejected += int((~member_many(RegionConfig(n), pts)).sum())
    elapsed = time.perf_counter() - start
    criterion(
        "C3 membership soundness", rejected == 0 and elapsed < 5.0, f"{rejected} rejected, {elapsed:.2f}s"
    )


def test_c4_oracle_equivalence(criterion):
    start = time.perf_counter()
    reports = []
    for n, h, seed in ((3, 0.05, 41), (4, 0.1, 42)):
        oracle = build(n, h)
        reports.append(oracle.agreement(random_probes(n, 10_000, seed)))
    elapsed = time.perf_counter() - start
    bad = sum(r["sound_violations"] + r["complete_violations"] for r in reports)
    detail = "; ".join(
        f"n={r['n']}: {r['tuples']} tuples, sound {r['sound_violations']}, complete {r['complete_violations']}"
        for r in reports
    )
    criterion("C4 oracle equivalence", bad == 0 and elapsed < 30.0, f"{detail}, {elapsed:.2f}s")


def _bflat_samples(cfg, count, rng):
    n, out = cfg.n, []
    while sum(len(o) for o in out) < count:
        xy = rng.uniform([-n, 0], [n, n], size=(4 * count, 2))
        inside, _ = bflat_status_many(cfg, xy)
        out.append(xy[inside])
    return np.vstack(out)[:count]


def test_c5_rim_criterion(criterion):
    rng = np.random.default_rng(5)
    problems = []
    for n in (3, 5, 10):
        cfg = RegionConfig(n)
        xy = _bflat_samples(cfg, 10_000, rng)
        zm, zp, _, _, ok = z_range_many(cfg, xy)
        _, edge = bflat_status_many(cfg, xy)
        gap = zp - zm
        order = int((~ok | (zm > zp + cfg.tol.eps)).sum())
        mismatch = int(((gap <= 1e-6) != edge).sum())
        # boundary sampled separately along its arcs
        arcs = np.vstack([a.xy for a in bflat_outline(cfg, 200).boundary])
        azm, azp, _, _, aok = z_range_many(cfg, arcs)
        _, aedge = bflat_status_many(cfg, arcs)
        arc_bad = int((~aok | ~aedge | (azp - azm > 1e-6)).sum())
        if order or mismatch or arc_bad:
            problems.append(f"n={n}: order {order}, iff-mismatch {mismatch}, arc {arc_bad}")
    criterion("C5 z-range rim criterion", not problems, "; ".join(problems) or "all n")


def test_c6_witness_fidelity(criterion):
    n = 5
    cfg = RegionConfig(n)
    mesh = shell_mesh(cfg, 32)
    misclassified = worst = too_free = 0
    for p in mesh.vertices:
        cl = classify(cfg, p, want_witness=True)
        if cl.verdict not in BOUNDARY:
            misclassified += 1
            continue
        err = max(abs(a - b) for a, b in zip(cl.witness.power_sums(), p))
        worst = max(worst, err)
        too_free += len(cl.witness.free_values()) > 2
    ok = misclassified == 0 and worst <= 1e-8 * n and too_free == 0
    criterion(
        "C6 witness fidelity",
        ok,
        f"{len(mesh.vertices)} vertices, {misclassified} misclassified, max err {worst:.1e}, {too_free} with >2 free",
    )


def test_c7_interior_claims(criterion):
    rng = np.random.default_rng(7)
    cfg = RegionConfig(4)
    st = np.sort(rng.uniform(-1, 1, size=(1000, 2)), axis=1)
    s, t = curve(st[:, 0]), curve(st[:, 1])
    up, down = np.ones(3), np.array([-1.0, 1.0, -1.0])
    families = {
        "2s+2t": 2 * s + 2 * t,
        "s+t+up+down": s + t + up + down,
        "s+2t+up": s + 2 * t + up,
        "2s+t+down": 2 * s + t + down,
    }
    failures = []
    for name, pts in families.items():
        zm, zp, _, _, _ = z_range_many(cfg, pts[:, :2])
        margin = np.minimum(zp - pts[:, 2], pts[:, 2] - zm)
        not_interior = sum(classify(cfg, p).verdict is not Verdict.INTERIOR for p in pts)
        if not_interior or margin.min() <= 0:
            failures.append(f"{name}: {not_interior}/1000 not Interior, min margin {margin.min():.1e}")
    criterion("C7 interior claims at n=4", not failures, "; ".join(failures) or "all families")


def test_c8_moment_recovery(criterion):
    rng = np.random.default_rng(8)
    problems = []

    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        theta = rng.uniform(0, np.pi, n)
        det = int(rng.choice([1, -1]))
        tr = traces_from_angles(theta, det)
        ((_, mv),) = traces_to_power_sums(TraceInput(2 * n + 1, tr, det))
        worst = max(worst, max(abs(a - b) for a, b in zip(mv.as_tuple(), power_sums(np.cos(theta)))))
    if worst > 1e-10:
        problems.append(f"trace round trip {worst:.1e}")

    worst = 0.0
    for ts in rng.uniform(-1, 1, size=(500, 3)):
        sols = solve_exact_n3(MomentVector(3, *power_sums(ts)))
        if len(sols) != 1:
            worst = np.inf
            break
        worst = max(worst, np.abs(np.array(sols[0].values()) - np.sort(ts)).max())
    if worst > 1e-7:
        problems.append(f"n=3 recovery {worst:.1e}")

    missed = 0
    for i in range(200):
        n = 4 + i % 5
        ts = rng.uniform(-1, 1, n)
        iset = feasible_tn(MomentVector(n, *power_sums(ts)))
        missed += not all(iset.contains(t, 1e-7) for t in ts)
    if missed:
        problems.append(f"containment missed {missed}/200")

    if feasible_tn(MomentVector(4, 4, 4, 4)).intervals != ((1.0, 1.0),):
        problems.append("(4,4,4) not [1,1]")
    if feasible_tn(MomentVector(4, 0, 4, 0)).intervals != ((-1.0, -1.0), (1.0, 1.0)):
        problems.append("(0,4,0) not {-1} u {1}")
    criterion("C8 moment recovery", not problems, "; ".join(problems) or "all parts")


def test_c9_figures(criterion, tmp_path):
    problems = []
    code, out = cli_json("mesh", "--n", "5", "--subdiv", "64", "--out", str(tmp_path / "a35.obj"))
    if code != 0 or out["groups"] != 8:
        problems.append(f"groups {out.get('groups')}")
    mesh = shell_mesh(RegionConfig(5), 64)
    v = mesh.vertices
    if not np.any(np.all(np.abs(v - [5, 5, 5]) <= 1e-12, axis=1)):
        problems.append("(5,5,5) not a vertex")
    if not (np.allclose(out["bbox_max"], [5, 5, 5], atol=1e-12) and np.allclose(out["bbox_min"], [-5, 0, -5], atol=1e-12)):
        problems.append(f"extremes {out['bbox_min']} / {out['bbox_max']}")
    resid = []
    for p, sh in zip(v, mesh.vertex_sheets):
        if sh.sign == UPPER:
            resid.append(abs(eval_f(sh.index, 1, *(p - sh.shift))))
        else:
            resid.append(abs(eval_f(1, sh.index, *(p - sh.shift * np.array([-1.0, 1.0, -1.0])))))
    if max(resid) > 1e-8 * 5**6:
        problems.append(f"residual {max(resid):.1e}")
    code, out = cli_json("outline", "--n", "6", "--out", str(tmp_path / "b6.svg"))
    if code != 0 or (out["arcs"], out["seams"]) != (7, 4):
        problems.append(f"outline {out.get('arcs')} arcs / {out.get('seams')} seams")
    criterion("C9 figure reproduction", not problems, "; ".join(problems) or "mesh and outline")
