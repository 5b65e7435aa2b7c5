"""Regenerate the packaged fixture designs under src/designforge/fixtures/v1/.

Everything here is deterministic: the F_9 quadruple comes from an
exhaustive lexicographic search, and the SIC fiducials are written from
closed forms and re-verified before being saved.
"""

import itertools
import math
import os

import numpy as np

from designforge import io
from designforge.cdesigns import CEnsemble, sic_from_fiducial
from designforge.ffcore import build_field
from designforge.ffdesigns import (
    FFEnsemble,
    certify_tight_2design,
    check_2design_naive,
    check_2design_psi,
    check_etf,
)
from designforge.fflinalg import frobenius_array

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "designforge", "fixtures", "v1")


def f9_quadruple() -> FFEnsemble:
    """First norm-zero (0,1,0)-ETF quadruple in F_9^2, lexicographically."""
    ctx = build_field(3, 2)
    vecs = []
    for i in range(9):
        for j in range(9):
            if i == 0 and j == 0:
                continue
            vecs.append([ctx.from_int(i).coeffs, ctx.from_int(j).coeffs])
    data = np.array(vecs, dtype=np.int64)  # (80, 2, 2)
    fr = frobenius_array(ctx, data)
    # Hermitian norms <v, v> = sum_i frob(v_i) v_i
    norms = []
    for idx in range(data.shape[0]):
        acc = ctx.zero()
        for col in range(2):
            acc = acc + ctx.element(fr[idx, col]) * ctx.element(data[idx, col])
        norms.append(acc.is_zero())
    iso = data[np.array(norms)]
    assert iso.shape[0] == 32, iso.shape
    m = iso.shape[0]
    # pairwise product norms N(<v_i, v_j>) and outer products, precomputed
    pairn = np.zeros((m, m), dtype=np.int64)
    outers = np.zeros((m, 2, 2, 2), dtype=np.int64)
    elems = [[ctx.element(iso[i, c]) for c in range(2)] for i in range(m)]
    frel = [[ctx.element(frobenius_array(ctx, iso[i : i + 1])[0, c]) for c in range(2)] for i in range(m)]
    for i in range(m):
        for a in range(2):
            for b in range(2):
                outers[i, a, b] = (elems[i][a] * frel[i][b]).coeffs
        for j in range(m):
            g = frel[i][0] * elems[j][0] + frel[i][1] * elems[j][1]
            gg = g * ctx.element(frobenius_array(ctx, g.coeffs[None, None])[0, 0])
            pairn[i, j] = gg.coeffs[0]
            assert gg.coeffs[1] == 0
    for quad in itertools.combinations(range(m), 4):
        ok = all(pairn[a, b] == 1 for a, b in itertools.combinations(quad, 2))
        if not ok:
            continue
        if np.any(outers[list(quad)].sum(axis=0) % 3):
            continue
        ens = FFEnsemble(
            ctx,
            iso[list(quad)],
            metadata={"kind": "norm-zero-etf", "family": "f9-quadruple", "search": "exhaustive-lex"},
        )
        res = check_etf(ens)
        assert res and all(
            v.to_int() == e for v, e in zip(res.params, (0, 1, 0))
        ), "search postcondition violated"
        return ens
    raise AssertionError("no quadruple found")


def main():
    os.makedirs(OUT, exist_ok=True)

    ens = f9_quadruple()
    ctx = ens.ctx
    c2n = check_2design_naive(ens)
    c2p = check_2design_psi(ens)
    cert = certify_tight_2design(ens)
    assert c2n is not None and c2p is not None and c2n == c2p == ctx.one()
    assert cert.is_design and [v.to_int() for v in cert.design] == [0, 0, 1]
    path = os.path.join(OUT, "f9_d2_design.json")
    io.save_design(path, ens)
    print("wrote", path, "vectors:", ens.data.tolist())

    # d = 2 SIC fiducial: |<f, D f>|^2 = 1/3 on the Weyl-Heisenberg orbit
    c = 1.0 / math.sqrt(3.0)
    fid2 = np.array(
        [math.sqrt((1 + c) / 2.0), math.sqrt((1 - c) / 2.0) * np.exp(1j * math.pi / 4)]
    )
    orbit = sic_from_fiducial(fid2)
    assert orbit.n == 4
    path = os.path.join(OUT, "sic_d2_fiducial.json")
    io.save_design(path, CEnsemble(fid2[None, :], None))
    print("wrote", path)

    fid3 = np.array([0.0, 1.0, -1.0], dtype=np.complex128) / math.sqrt(2.0)
    orbit = sic_from_fiducial(fid3)
    assert orbit.n == 9
    path = os.path.join(OUT, "sic_d3_fiducial.json")
    io.save_design(path, CEnsemble(fid3[None, :], None))
    print("wrote", path)

    with open(os.path.join(OUT, "NOTES.md"), "w") as fh:
        fh.write(
            """# Fixture provenance (v1)

- `f9_d2_design.json`: the lexicographically first quadruple of norm-zero
  vectors in F_9^2 forming a (0,1,0) equiangular tight frame, found by the
  exhaustive search in `tools/make_fixtures.py`.  Certified on generation as
  a (0,0,1) projective 2-design by both dense verification routes and the
  parameter-condition certificate.
- `sic_d2_fiducial.json`: unit vector in C^2 whose Weyl-Heisenberg orbit is
  the 4-vector equiangular tight 2-design (squared overlaps 1/3); written
  from the closed form sqrt((1 +- 1/sqrt(3))/2) with a pi/4 phase.
- `sic_d3_fiducial.json`: the vector (0, 1, -1)/sqrt(2) in C^3; its orbit is
  the 9-vector equiangular tight 2-design (squared overlaps 1/4).

Fiducial orbits are re-verified every time they are expanded; nothing in
the package trusts these files blindly.  Regenerate with
`python3 tools/make_fixtures.py` — output is byte-stable.
"""
        )
    print("wrote NOTES.md")


if __name__ == "__main__":
    main()
