"""Configuration space integrals: geometry, exact linking, Monte Carlo."""

import math
import os
import subprocess
import sys
from fractions import Fraction

import pytest

from homlink import csintegral
from homlink.accept import BORROMEAN_WORD, alpha_vector
from homlink.csintegral import (
    IntegralEstimate,
    PolyLink,
    Strand,
    edge_form_factor,
    exact_linking,
    from_braid,
    integrate_cocycle,
    integrate_diagram,
    kernel_backend,
    split_link,
)
from homlink.diagrams import Diagram, diagram_from_key, enumerate_chord

CHORD = enumerate_chord(1, 2)[0]


def test_exact_linking_anchors():
    clasp = from_braid("A(1,2)", 2)
    assert exact_linking(clasp, 1, 2) == Fraction(1)
    inverse = from_braid("A(1,2)^-1", 2)
    assert exact_linking(inverse, 1, 2) == Fraction(-1)
    assert exact_linking(split_link(2), 1, 2) == Fraction(0)
    borr = from_braid(BORROMEAN_WORD, 3)
    for i, j in ((1, 2), (1, 3), (2, 3)):
        assert exact_linking(borr, i, j) == Fraction(0)


def test_exact_linking_repeated_generator():
    doubled = from_braid("A(1,2) A(1,2)", 2)
    assert exact_linking(doubled, 1, 2) == Fraction(2)


def test_from_braid_geometry_sane():
    borr = from_braid(BORROMEAN_WORD, 3)
    assert borr.m == 3
    # the Monte Carlo variance budget needs real clearance
    assert borr.min_distance() > 0.5


def test_polylink_json_round_trip(tmp_path):
    borr = from_braid(BORROMEAN_WORD, 3)
    assert PolyLink.from_json(borr.to_json()) == borr
    path = tmp_path / "link.json"
    borr.dump(str(path))
    assert PolyLink.load(str(path)) == borr


def test_polylink_rejects_parallel_tails():
    s1 = Strand(((0.0, 0.0, -1.0), (0.0, 0.0, 1.0)), (0.0, 0.0, 1.0), (0.0, 0.0, 1.0))
    s2 = Strand(((1.0, 0.0, -1.0), (1.0, 0.0, 1.0)), (0.0, 0.0, 1.0), (0.0, 0.0, 1.0))
    with pytest.raises(ValueError):
        PolyLink((s1, s2))


def test_strand_needs_two_points():
    with pytest.raises(ValueError):
        Strand(((0.0, 0.0, 0.0),), (0.0, 0.0, 1.0), (0.0, 0.0, 1.0))


def test_edge_form_factor():
    w, direction = edge_form_factor((0.0, 0.0, 0.0), (0.0, 0.0, 2.0))
    assert w == pytest.approx(1.0 / (16.0 * math.pi))
    assert direction == (0.0, 0.0, 1.0)
    assert edge_form_factor((1.0, 2.0, 3.0), (1.0, 2.0, 3.0))[0] == 0.0


def test_clasp_integral_near_linking_number():
    est = integrate_diagram(CHORD, from_braid("A(1,2)", 2), 10**5, seed=11)
    assert abs(est.value - 1.0) < 5 * est.std_error
    assert est.std_error < 0.05


def test_split_integral_near_zero():
    est = integrate_diagram(CHORD, split_link(2), 10**5, seed=12)
    assert abs(est.value) < 4 * est.std_error + 1e-9


def test_estimates_deterministic():
    clasp = from_braid("A(1,2)", 2)
    a = integrate_diagram(CHORD, clasp, 4096, seed=5)
    b = integrate_diagram(CHORD, clasp, 4096, seed=5)
    assert a == b
    c = integrate_diagram(CHORD, clasp, 4096, seed=6)
    assert a != c


def test_thread_count_does_not_change_values():
    clasp = from_braid("A(1,2)", 2)
    a = integrate_diagram(CHORD, clasp, 200_000, seed=5, threads=1)
    b = integrate_diagram(CHORD, clasp, 200_000, seed=5, threads=4)
    assert a.value == b.value and a.std_error == b.std_error


def test_backends_bit_identical():
    clasp = from_braid("A(1,2)", 2)
    py = integrate_diagram(CHORD, clasp, 8192, seed=7, backend="python")
    native = integrate_diagram(CHORD, clasp, 8192, seed=7)
    assert py.value == native.value
    assert py.std_error == native.std_error


def test_pure_env_forces_python_backend():
    code = (
        "from homlink.csintegral import kernel_backend; print(kernel_backend())"
    )
    env = dict(os.environ, HOMLINK_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.stdout.strip() == "python"


def test_translation_invariance_bitwise():
    # geometry is packed relative to the exact bounding-box center, so
    # whenever the translated coordinates are exactly representable the
    # whole sample stream is reproduced bit for bit
    link = split_link(2)
    moved = link.translated((4.0, -2.5, 8.0))
    a = integrate_diagram(CHORD, link, 8192, seed=9)
    b = integrate_diagram(CHORD, moved, 8192, seed=9)
    assert a.value == b.value and a.std_error == b.std_error


def test_translation_invariance_rounded_geometry():
    # braid fixtures carry non-dyadic coordinates (thirds from the
    # crossing detours), so translating rounds the inputs themselves;
    # the estimate moves by at most a few ulps, not by resampling noise
    chord3 = enumerate_chord(1, 3)[0]
    borr = from_braid(BORROMEAN_WORD, 3)
    moved = borr.translated((4.0, -2.5, 8.0))
    a = integrate_diagram(chord3, borr, 8192, seed=9)
    b = integrate_diagram(chord3, moved, 8192, seed=9)
    assert abs(a.value - b.value) < 1e-9


def test_edge_reversal_negates_exactly():
    clasp = from_braid("A(1,2)", 2)
    d = diagram_from_key(CHORD)
    ((t, h),) = d.edges
    flipped = Diagram(d.m, d.seg_vertices, d.free_vertices, ((h, t),), d.sign)
    e1 = integrate_diagram(d, clasp, 50_000, seed=21)
    e2 = integrate_diagram(flipped, clasp, 50_000, seed=21)
    assert e1.value == -e2.value
    assert e1.std_error == e2.std_error


def test_stderr_scales_like_sqrt_n():
    clasp = from_braid("A(1,2)", 2)
    small = integrate_diagram(CHORD, clasp, 10**5, seed=31)
    big = integrate_diagram(CHORD, clasp, 4 * 10**5, seed=31)
    ratio = small.std_error / big.std_error
    assert 1.5 < ratio < 2.6


def test_integrate_cocycle_is_linear_in_coefficients():
    borr = from_braid(BORROMEAN_WORD, 3)
    alpha = alpha_vector()
    combo = integrate_cocycle(alpha, borr, 16384, seed=13)
    manual = 0.0
    err2 = 0.0
    for key in sorted(alpha):
        est = integrate_diagram(key, borr, 16384, seed=13)
        manual += float(alpha[key]) * est.value
        err2 += (float(alpha[key]) * est.std_error) ** 2
    assert combo.value == pytest.approx(manual, abs=0.0)
    assert combo.std_error == pytest.approx(math.sqrt(err2), abs=0.0)


def test_estimate_arithmetic():
    a = IntegralEstimate(1.0, 0.1, 100, 1)
    b = IntegralEstimate(2.0, 0.2, 100, 1)
    s = a + b
    assert s.value == 3.0
    assert s.std_error == pytest.approx(math.hypot(0.1, 0.2))
    assert a.scaled(-2.0).value == -2.0
    assert a.scaled(-2.0).std_error == pytest.approx(0.2)
    assert set(a.to_json()) == {"value", "stderr", "samples", "seed"}


def test_requires_two_samples():
    with pytest.raises(ValueError):
        integrate_diagram(CHORD, from_braid("A(1,2)", 2), 1, seed=1)


def test_kernel_backend_reports_known_name():
    assert kernel_backend() in ("cython", "python")
