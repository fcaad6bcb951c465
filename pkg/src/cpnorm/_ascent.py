"""Batched multi-start gradient ascent on scale-invariant objectives.

Every objective handed to :func:`ascend` is invariant under positive rescaling
of its argument (log of a norm ratio), so a plain gradient step followed by
renormalization is a projected ascent step on the constraint sphere.
"""

import numpy as np

ARMIJO = 1e-4
ETA_MAX = 1e6
FD_STEP = 1e-6
FD_MAX_TRIES = 4


def restart_rng(seed, index):
    """Independent RNG stream for restart ``index``; scheduling-independent."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def _sqnorm(G):
    return np.sum(np.abs(G.reshape(G.shape[0], -1)) ** 2, axis=1)


def _bcast(v, X):
    return v.reshape((-1,) + (1,) * (X.ndim - 1))


def _fd_gradient(value_fn, x):
    """Central finite-difference gradient of a scalar function of one complex array."""
    flat = x.ravel()
    n = flat.size
    probes = np.empty((4 * n,) + x.shape, dtype=complex)
    for i in range(n):
        for s, (unit, sign) in enumerate(((1, 1), (1, -1), (1j, 1), (1j, -1))):
            e = flat.copy()
            e[i] += sign * unit * FD_STEP
            probes[4 * i + s] = e.reshape(x.shape)
    v = value_fn(probes).reshape(n, 4)
    g = (v[:, 0] - v[:, 1]) / (2 * FD_STEP) + 1j * (v[:, 2] - v[:, 3]) / (2 * FD_STEP)
    return g.reshape(x.shape)


def ascend(objective, X0, normalize, max_iters, step_tol, grad_tol):
    """Maximize a batched objective from starting points ``X0`` (restart axis first).

    ``objective(X)`` returns ``(values, grads)`` where ``grads`` is the real
    gradient written as a complex array shaped like ``X``. Steps use an adaptive
    step length with an Armijo acceptance test; a restart stops once its
    gradient norm drops below ``grad_tol`` or its accepted step length falls
    below ``step_tol``. A restart that stalls with a large gradient (a kink in
    the objective) gets a finite-difference step before it is abandoned.

    Returns ``(X, values, iterations)``.
    """
    X = normalize(np.array(X0, dtype=complex))
    val, grad = objective(X)
    n = X.shape[0]
    eta = np.ones(n)
    iters = np.zeros(n, dtype=int)
    fd_tries = np.zeros(n, dtype=int)
    active = np.ones(n, dtype=bool)

    def value_only(Y):
        return objective(Y)[0]

    for _ in range(max_iters):
        gn2 = _sqnorm(grad)
        gn = np.sqrt(gn2)
        small_grad = gn < grad_tol
        stalled = (eta * gn < step_tol) & ~small_grad
        active &= ~small_grad
        for i in np.flatnonzero(active & stalled):
            if fd_tries[i] >= FD_MAX_TRIES:
                active[i] = False
                continue
            fd_tries[i] += 1
            moved = _fd_step(value_only, normalize, X, val, i)
            if moved is None:
                active[i] = False
            else:
                X[i], val[i] = moved
                v, g = objective(X[i : i + 1])
                val[i], grad[i] = v[0], g[0]
                eta[i] = 1.0
        if not active.any():
            break
        idx = np.flatnonzero(active)
        Xc = normalize(X[idx] + _bcast(eta[idx], X) * grad[idx])
        vc, gc = objective(Xc)
        ok = vc >= val[idx] + ARMIJO * eta[idx] * gn2[idx]
        acc = idx[ok]
        X[acc], val[acc], grad[acc] = Xc[ok], vc[ok], gc[ok]
        eta[acc] = np.minimum(2 * eta[acc], ETA_MAX)
        eta[idx[~ok]] *= 0.5
        iters[idx] += 1
    return X, val, iters


def _fd_step(value_fn, normalize, X, val, i):
    g = _fd_gradient(value_fn, X[i])
    gn = np.linalg.norm(g)
    if not np.isfinite(gn) or gn == 0:
        return None
    steps = 10.0 ** -np.arange(0, 10)
    cand = normalize(X[i][None] + steps.reshape((-1,) + (1,) * X[i].ndim) * (g / gn)[None])
    v = value_fn(cand)
    best = int(np.argmax(v))
    if v[best] > val[i]:
        return cand[best], v[best]
    return None
