import time

import numpy as np

from designforge import cdesigns as cd

t0 = time.time()

# --- SIC d=2 tetrahedron ---
sic2 = cd.sic_catalog(2)
g2 = np.abs(cd.gram(sic2)) ** 2
off = g2[~np.eye(4, dtype=bool)]
print("sic2 overlaps^2 max dev from 1/3:", np.max(np.abs(off - 1 / 3)))
print("sic2 potential t=2:", cd.frame_potential(sic2, 2), "vs", cd.potential_bound(2, 2))
print("sic2 moment residual:", cd.check_weighted_2design(sic2))

# --- Hesse d=3 ---
hesse = cd.sic_catalog(3)
print("hesse n:", hesse.n)
g2 = np.abs(cd.gram(hesse)) ** 2
off = g2[~np.eye(9, dtype=bool)]
print("hesse overlaps^2 max dev from 1/4:", np.max(np.abs(off - 0.25)))
print("hesse potential t=2:", cd.frame_potential(hesse, 2), "vs", cd.potential_bound(3, 2))
print("hesse moment residual:", cd.check_weighted_2design(hesse))

# --- MUBs ---
for d in (2, 3, 5, 7):
    mub = cd.mub_ensemble(d)
    print(
        f"mub d={d}: n={mub.n}",
        "pot:", abs(cd.frame_potential(mub, 2) - cd.potential_bound(d, 2)),
        "resid:", cd.check_weighted_2design(mub),
    )
try:
    cd.mub_ensemble(4)
    print("FAIL: mub d=4 accepted")
except cd.UnsupportedDimension:
    print("mub d=4 rejected ok")

# --- choi identity d=2..8 ---
t1 = time.time()
worst = 0.0
for d in range(2, 9):
    ch = cd.transpose_compose(cd.depolarizing_channel(d))
    target = (2.0 / (d + 1)) * cd.symmetric_projector(d)
    r = float(np.max(np.abs(cd.choi(ch) - target)))
    worst = max(worst, r)
print(f"choi identity d=2..8 worst residual: {worst:.3e} in {time.time()-t1:.2f}s")

# --- probe identity on a random Kraus channel ---
rng = np.random.default_rng(7)
d = 4
kraus = [rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for _ in range(3)]
ch = cd.Channel(d, d, kraus=kraus)
c = ch.choi()
worst = 0.0
for _ in range(100):
    w, x, y, z = (rng.normal(size=d) + 1j * rng.normal(size=d) for _ in range(4))
    lhs = np.kron(w, x) @ c @ np.kron(y, z)
    rhs = x @ ch.apply(np.outer(w, y)) @ z
    worst = max(worst, abs(lhs - rhs))
print("choi probe identity worst:", worst)

# --- design -> kraus certificates ---
kr, cert = cd.design_to_kraus(sic2, provenance="SIC")
print("sic2 cert:", cert.bound, cert.residuals, cert.ok)
herm = max(float(np.max(np.abs(r - r.conj().T))) for r in kr)
eigs = [np.linalg.eigvalsh(r) for r in kr]
print("kraus hermitian dev:", herm, "min eig:", min(float(e[0]) for e in eigs))

kr3, cert3 = cd.design_to_kraus(hesse, provenance="SIC")
print("hesse cert:", cert3.bound, cert3.ok)
for d in (2, 3, 5, 7):
    _, certm = cd.design_to_kraus(cd.mub_ensemble(d), provenance="MUB")
    print(f"mub d={d} cert bound {certm.bound} (= {d*d+d}) ok={certm.ok}")

# --- round trip ---
def roundtrip(ens, tag):
    kr, _ = cd.design_to_kraus(ens)
    rec = cd.kraus_to_design(kr)
    # match up projectively
    ov = np.abs(rec.vectors.conj() @ ens.vectors.T)
    perm = np.argmax(ov, axis=1)
    worst_ov = min(ov[i, perm[i]] for i in range(rec.n))
    worst_w = max(abs(rec.weights[i] - ens.weights[perm[i]]) for i in range(rec.n))
    print(f"roundtrip {tag}: perm={sorted(perm)==list(range(ens.n))} overlap>={worst_ov:.15f} wdev={worst_w:.2e}")

roundtrip(sic2, "sic2")
roundtrip(hesse, "hesse")
roundtrip(cd.mub_ensemble(3), "mub3")
roundtrip(cd.mub_ensemble(5), "mub5")

# --- asymmetry detection ---
kr, _ = cd.design_to_kraus(sic2)
bad = [k.copy() for k in kr]
bad[0] = bad[0] + 1e-3 * np.array([[0, 1], [-1, 0]])
try:
    cd.kraus_to_design(bad)
    print("FAIL: asymmetric kraus accepted")
except cd.AsymmetricTerm as e:
    print("asymmetric kraus rejected:", e)
except cd.CDesignError as e:
    print("asymmetric kraus rejected (other):", type(e).__name__, e)

try:
    cd.kraus_to_design([np.eye(2)])
    print("FAIL: rank-2 kraus accepted")
except cd.NotRankOne:
    print("rank-2 kraus rejected ok")

# --- kraus_from_choi / choi_from_kraus ---
dep = cd.depolarizing_channel(2)
terms = []
for x, w in zip(sic2.vectors, sic2.weights):
    r = np.sqrt(2 * w) * np.outer(x.conj(), x)
    a, b = cd._rank1_factor(r)
    terms.append((a, b))
kr2 = cd.kraus_from_choi(dep, terms)
print("kraus_from_choi ok, n =", len(kr2))
print(
    "choi_from_kraus matches:",
    float(np.max(np.abs(cd.choi_from_kraus(kr2, 2) - dep.choi()))),
)
badterms = terms[:3]
try:
    cd.kraus_from_choi(dep, badterms)
    print("FAIL: partial terms accepted")
except cd.ChoiMismatch:
    print("partial terms rejected ok")

# --- transpose_compose kraus transport on rank-1 channel ---
kr, _ = cd.design_to_kraus(sic2)
zch = cd.Channel(2, 2, kraus=kr)
tch = cd.transpose_compose(zch)
print("transpose kraus transported:", tch.kraus is not None)
x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
via_kraus = sum(r @ x @ r.conj().T for r in tch.kraus)
print("transport action dev:", float(np.max(np.abs(via_kraus - zch.apply(x).T))))
print("depolarizing transpose kraus dropped:", cd.transpose_compose(dep).kraus is None)

# --- pruning ---
t2 = time.time()
u_rot = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
sic_rot = cd.CEnsemble(sic2.vectors @ u_rot.T)
mub2 = cd.mub_ensemble(2)
mix_v = np.vstack([sic_rot.vectors, mub2.vectors])
mix_w = np.concatenate([0.5 * sic_rot.weights, 0.5 * mub2.weights])
mix = cd.CEnsemble(mix_v, mix_w)
print("mix n:", mix.n, "resid:", cd.check_weighted_2design(mix))
pruned = cd.caratheodory_prune(mix)
print(
    f"pruned: n={pruned.n} resid={cd.check_weighted_2design(pruned):.3e} "
    f"wsum={pruned.weights.sum():.17f} in {time.time()-t2:.2f}s"
)
# duplicate-merging path: plain sic + mub share (1,0)
mix2 = cd.CEnsemble(
    np.vstack([sic2.vectors, mub2.vectors]),
    np.concatenate([0.5 * sic2.weights, 0.5 * mub2.weights]),
)
pruned2 = cd.caratheodory_prune(mix2)
print("dup-merge prune: n =", pruned2.n, "resid:", cd.check_weighted_2design(pruned2))
# prune something bigger: sic3 + mub3 in d=3, target 36
mix3 = cd.CEnsemble(
    np.vstack([hesse.vectors, cd.mub_ensemble(3).vectors]),
    np.concatenate([0.5 * hesse.weights, 0.5 * cd.mub_ensemble(3).weights]),
)
print("mix3 n:", mix3.n, "-> target", (3 * 4 // 2) ** 2)
pr3 = cd.caratheodory_prune(mix3)
print("mix3 pruned n:", pr3.n, "resid:", cd.check_weighted_2design(pr3))

try:
    cd.caratheodory_prune(cd.CEnsemble(np.eye(2, dtype=complex)))
    print("FAIL: non-design pruned")
except cd.NotADesign:
    print("non-design prune rejected ok")

# --- ebr table ---
for d in (2, 3, 4, 6):
    rows = cd.ebr_bound_table(d)
    print(f"ebr d={d}:", [(r.bound, r.rule, r.constructive) for r in rows])

print("total", time.time() - t0, "s")
