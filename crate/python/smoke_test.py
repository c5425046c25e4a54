"""Smoke test for the pygraphif extension module.

Build and install first, for example:

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/pygraphif-*.whl
    python python/smoke_test.py
"""

import math

import pygraphif as gi


def corr(a, b):
    n = len(a)
    ma, mb = sum(a) / n, sum(b) / n
    cov = sum((x - ma) * (y - mb) for x, y in zip(a, b))
    va = sum((x - ma) ** 2 for x in a)
    vb = sum((y - mb) ** 2 for y in b)
    return cov / math.sqrt(va * vb)


def close(a, b, tol):
    return all(abs(x - y) <= tol * (1.0 + abs(y)) for x, y in zip(a, b))


def main():
    angles, signal, b0, b1 = gi.example1(n=256, seed=1)
    g = gi.Graph.ring(angles)
    assert g.n == 256 and g.is_connected()

    basis = gi.SpectralBasis(g)
    coeffs = basis.gft(signal)
    assert close(basis.igft(coeffs), signal, 1e-10)
    assert abs(sum(c * c for c in coeffs) - sum(s * s for s in signal)) < 1e-9 * sum(s * s for s in signal)

    for name, res in [
        ("db_if", gi.db_if(g, signal, max_imfs=1)),
        ("gft_if", gi.gft_if(basis, g, signal, cutoffs=[4.0], max_imfs=1)),
    ]:
        assert len(res) == 1, name
        assert res.reconstruction_error(signal) < 1e-12, name
        r0, r1 = corr(res.imfs[0], b0), corr(res.residual, b1)
        assert r0 > 0.9 and r1 > 0.9, (name, r0, r1)
        print(f"{name}: corr(IMF, b0) = {r0:.4f}, corr(residual, b1) = {r1:.4f}")

    _, signal_eq, b0_eq, _ = gi.example1(n=256, equispaced=True)
    res = gi.fif(signal_eq, max_imfs=1)
    assert corr(res.imfs[0], b0_eq) > 0.99
    print(f"fif: corr(IMF, b0) = {corr(res.imfs[0], b0_eq):.4f}")

    points, signal2, _, _ = gi.example2(n=200, seed=3)
    g2 = gi.Graph.delaunay(points)
    res = gi.db_if(g2, signal2, distances="shortest_path", max_imfs=2)
    assert res.reconstruction_error(signal2) < 1e-12

    w = [[0.5, 0.0], [0.0, 0.0]]
    assert close(gi.sifting_limit(w, [1.0, 2.0]), [0.0, 2.0], 1e-12)
    err, ok, violated = gi.limit_check(trials=10)
    assert ok and violated, (err, ok, violated)

    try:
        gi.gft_if(basis, g, signal, cutoffs=[0.0])
    except ValueError as e:
        print(f"rejected zero cutoff: {e}")
    else:
        raise AssertionError("zero cutoff accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
