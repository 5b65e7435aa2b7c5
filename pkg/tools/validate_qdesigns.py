import time

import numpy as np

from designforge import qdesigns as qd

t0 = time.time()
rng = np.random.default_rng(11)

# --- quaternion unit table ---
print("i*i:", qd.qmul(qd.Q_I, qd.Q_I), "ij:", qd.qmul(qd.Q_I, qd.Q_J), "ji:", qd.qmul(qd.Q_J, qd.Q_I))
a = rng.standard_normal(4)
b = rng.standard_normal(4)
print("|uv|=|u||v| dev:", abs(np.sqrt(qd.qabs2(qd.qmul(a, b))) - np.sqrt(qd.qabs2(a) * qd.qabs2(b))))

# --- complex embedding ---
print("f(1) = I:", np.max(np.abs(qd.complex_embed(qd.Q_ONE) - np.eye(2))))
print("f(i)f(j)-f(k):", np.max(np.abs(qd.complex_embed(qd.Q_I) @ qd.complex_embed(qd.Q_J) - qd.complex_embed(qd.Q_K))))
print("f(ab)-f(a)f(b):", np.max(np.abs(qd.complex_embed(qd.qmul(a, b)) - qd.complex_embed(a) @ qd.complex_embed(b))))
print("tr f(a) - 2Re a:", abs(np.trace(qd.complex_embed(a)) - 2 * a[0]))

# Re tr(AB) = Re tr(BA) on rectangular quaternion matrices via lift
A = rng.standard_normal((2, 3, 4))
B = rng.standard_normal((3, 2, 4))
ab = qd.qmatmul(A, B)
ba = qd.qmatmul(B, A)
retr_ab = 0.5 * np.trace(qd.complex_lift(ab)).real
retr_ba = 0.5 * np.trace(qd.complex_lift(ba)).real
print("Re tr AB vs BA:", abs(retr_ab - retr_ba))
# lift multiplicativity
print("lift(AB) vs lift(A)lift(B):", np.max(np.abs(qd.complex_lift(ab) - qd.complex_lift(A) @ qd.complex_lift(B))))

# --- re_trace_inner ---
M = rng.standard_normal((3, 3, 4))
print("<I,I> = d:", qd.re_trace_inner(np.stack([np.eye(3)] + [np.zeros((3, 3))] * 3, axis=-1), np.stack([np.eye(3)] + [np.zeros((3, 3))] * 3, axis=-1)))
H = 0.5 * (M + qd.conj_transpose(M))
S = 0.5 * (M - qd.conj_transpose(M))
print("herm vs antiherm orthogonal:", abs(qd.re_trace_inner(H, S)))
N2 = rng.standard_normal((3, 3, 4))
print("inner = vec dot:", abs(qd.re_trace_inner(M, N2) - np.dot(M.ravel(), N2.ravel())))

# --- s_basis ---
x = rng.standard_normal((3, 4))
x /= np.sqrt(np.sum(x * x))
sb = qd.s_basis(x)
for e in sb.elements:
    assert np.max(np.abs(qd.conj_transpose(e) + e)) < 1e-12, "not anti-hermitian"
gram3 = np.array([[qd.re_trace_inner(p, q) for q in sb.elements] for p in sb.elements])
print("s_basis gram vs I3:", np.max(np.abs(gram3 - np.eye(3))))
e1 = np.zeros((3, 4)); e1[0] = qd.Q_ONE
sb1 = qd.s_basis(e1)
print("s_basis(e1) entries:", sb1.elements[0][0, 0], sb1.elements[1][0, 0], sb1.elements[2][0, 0], "rest:", np.max(np.abs(sb1.elements[:, 1:, :, :])), np.max(np.abs(sb1.elements[:, :, 1:, :])))
try:
    qd.s_basis(np.zeros((2, 4)))
    print("FAIL zero vector accepted")
except qd.ZeroVector:
    print("zero vector rejected ok")

# --- cross_gramian ---
print("G(x,x) vs I3:", np.max(np.abs(qd.cross_gramian(x, x) - np.eye(3))))
y = rng.standard_normal((3, 4)); y /= np.sqrt(np.sum(y * y))
G = qd.cross_gramian(x, y)
q = qd.q_herm_inner(x, y)
a2 = qd.qabs2(q)
print("G^T G vs |q|^4 I:", np.max(np.abs(G.T @ G - a2**2 * np.eye(3))))
print("det Q sign:", np.linalg.det(G / a2) if a2 > 1e-12 else "n/a", "(want +1)")
print("|G|_F^2 vs 3|q|^4:", abs(np.sum(G * G) - 3 * a2**2))
# orthogonal pair
xo = np.zeros((3, 4)); xo[0] = qd.Q_ONE
yo = np.zeros((3, 4)); yo[1] = qd.Q_J
print("G on orthogonal pair:", np.max(np.abs(qd.cross_gramian(xo, yo))))
# gram matches elementwise re_trace_inner of s_basis
sbx, sby = qd.s_basis(x), qd.s_basis(y)
G2 = np.array([[qd.re_trace_inner(p, r) for r in sby.elements] for p in sbx.elements])
print("cross_gramian vs direct:", np.max(np.abs(G - G2)))

# --- simplex design ---
ens = qd.simplex_design_d2()
sq = qd.overlap_matrix(ens)
off = sq[~np.eye(6, dtype=bool)]
print("simplex |<x,y>|^2 dev from 2/5:", np.max(np.abs(off - 0.4)))
m1, m2 = qd.q_design_moments(ens)
print("simplex moments:", m1, m2, "targets:", qd.design_targets(2))
chk = qd.check_tight_q_design(ens, tol=1e-12)
print("check_tight_q_design:", chk.ok, "b =", chk.b)

# single vector + orthonormal basis
one = qd.QEnsemble(qd._renormalize(rng.standard_normal((1, 3, 4))))
print("single vector moments:", qd.q_design_moments(one))
basis = np.zeros((3, 3, 4)); basis[np.arange(3), np.arange(3), 0] = 1.0
ob = qd.QEnsemble(basis)
print("orthonormal basis moments:", qd.q_design_moments(ob), "(want 1/3, 1/3)")
print("orthonormal basis check:", qd.check_tight_q_design(ob).ok, qd.check_tight_q_design(ob).reason)

# non-equiangular negative with witness
bad = np.zeros((6, 2, 4))
bad[:5] = ens.vectors[:5]
bad[5] = ens.vectors[0] * 0.6 + ens.vectors[1] * 0.4
bad[5] /= np.sqrt(np.sum(bad[5] ** 2))
chk_bad = qd.check_tight_q_design(qd.QEnsemble(bad))
print("bad check:", chk_bad.ok, chk_bad.reason, "witness:", chk_bad.witness)

# --- fusion certificate ---
cert = qd.certify_fusion_frame(ens, tol=1e-10)
print("fusion: iso =", cert.isoclinic, "alpha =", cert.alpha, "pot =", cert.potential, "target =", cert.target)
print("fusion residuals:", cert.residuals)
cert_ob = qd.certify_fusion_frame(ob)
print("orthobasis fusion: iso =", cert_ob.isoclinic, "witness =", cert_ob.witness, "alpha =", cert_ob.alpha)

# --- gradient FD validation ---
v = qd._renormalize(rng.standard_normal((5, 2, 4)))
g = qd.q_potential_gradient(v)
eps = 1e-6
worst = 0.0
for _ in range(25):
    direction = rng.standard_normal(v.shape)
    direction /= np.linalg.norm(direction)
    fp = qd.q_frame_potential(v + eps * direction)
    fm = qd.q_frame_potential(v - eps * direction)
    fd = (fp - fm) / (2 * eps)
    an = float(np.sum(g * direction))
    worst = max(worst, abs(fd - an) / max(abs(fd), 1e-12))
print("gradient FD worst relative dev:", worst)

# --- optimizer ---
t1 = time.time()
res1 = qd.optimize_design(1, 1, seed=0, iters=10)
print("d=1 n=1: potential", res1.potential, "gap", res1.gap)
wins = 0
for seed in range(10):
    r = qd.optimize_design(2, 6, seed=seed)
    passed = r.gap < 1e-8 and qd.check_tight_q_design(r.ensemble, tol=1e-6).ok
    wins += passed
    mono = all(b <= a + 1e-15 for a, b in zip(r.trace, r.trace[1:]))
    print(f"  seed {seed}: gap {r.gap:.3e} iters {r.iterations} pass {passed} monotone {mono}")
print(f"optimizer wins: {wins}/10 in {time.time()-t1:.1f}s")
t2 = time.time()
r28 = qd.optimize_design(4, 28, seed=0, iters=400)
print(f"d=4 n=28: gap {r28.gap:.3e} in {time.time()-t2:.1f}s (no pass expected)")

# --- dimension audit ---
for d in range(1, 6):
    hb = qd.hermitian_basis(d)
    ab_ = qd.anti_hermitian_basis(d)
    rk_h = np.linalg.matrix_rank(hb.reshape(len(hb), -1))
    rk_a = np.linalg.matrix_rank(ab_.reshape(len(ab_), -1))
    total = rk_h + rk_a
    print(f"d={d}: herm {rk_h} (= {d + 4 * (d * (d - 1)) // 2}) anti {rk_a} (= {3 * d + 4 * (d * (d - 1)) // 2}) sum {total} = {4 * d * d}")

print("total", time.time() - t0, "s")
