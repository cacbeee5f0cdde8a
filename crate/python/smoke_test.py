"""Smoke test for the quasinv Python extension.

Build and install first:

    pip install maturin
    maturin build --release -m crates/py/Cargo.toml -o dist
    pip install dist/quasinv-*.whl
"""

import math

import quasinv


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol


def phase_distance(a, b):
    overlap = sum(b[i][j].conjugate() * a[i][j] for i in range(2) for j in range(2))
    na = sum(abs(a[i][j]) ** 2 for i in range(2) for j in range(2))
    nb = sum(abs(b[i][j]) ** 2 for i in range(2) for j in range(2))
    return math.sqrt(max(na + nb - 2 * abs(overlap), 0.0))


def main():
    e = quasinv.zoo("pauli", [0.1, 0.6, 0.2, 0.1])
    r = e.quasi_inverse()
    assert close(r.delta_mstd, 0.2), r
    assert phase_distance(r.unitary, [[0, 1], [1, 0]]) < 1e-9
    assert close(r.mstd_before - r.mstd_after, r.delta_mstd)

    depol = quasinv.AffineChannel([[0, 0, 0]] * 3, [0, 0, 0])
    assert close(depol.mstd(), 0.15)
    assert close(depol.mstd(surface=True), 0.25)
    value, stderr = depol.mstd_monte_carlo(200_000, seed=7)
    assert abs(value - 0.15) <= 4 * stderr
    assert depol.mstd_monte_carlo(200_000, seed=7) == (value, stderr)

    flip = quasinv.AffineChannel([[1, 0, 0], [0, 1, 0], [0, 0, -1]], [0, 0, 0])
    passed, min_eig = flip.validate_cptp()
    assert not passed and min_eig < 0
    try:
        flip.quasi_inverse()
    except quasinv.QuasinvError:
        pass
    else:
        raise AssertionError("non-CPTP input accepted")

    s = 1 / math.sqrt(2)
    hadamard = quasinv.AffineChannel.from_kraus([[[s, s], [s, -s]]])
    r = hadamard.quasi_inverse()
    assert close(r.mstd_after, 0.0) and close(r.delta_mstd, 0.4)

    gad = quasinv.zoo("gad", [-0.5, 0.2])
    q = gad.q_matrix()
    assert q[0][0] == 0.0 and close(q[3][3], 0.5)
    assert close(gad.delta_mstd(0.0, [0.0, 0.0, 1.0]), 0.2)

    for seed in range(5):
        c = quasinv.random_channel(seed, n_kraus=1 + seed % 4)
        assert c.validate_cptp()[0]
        ok, solver, best = c.verify(samples=20_000, seed=seed)
        assert ok and best <= solver + 1e-9

    t = quasinv.zoo("tetrahedron", [0.3, 0.1]).quasi_inverse()
    assert close(t.delta_mstd, 0.08, 1e-15)

    print("python smoke test passed")


if __name__ == "__main__":
    main()
