"""Independent reference computations used by the tests.

Nothing here calls the package's numerical code paths.
"""

import cmath
import math

import numpy as np


def direct_dft(x, inverse=False):
    """O(N^2) unitary DFT by explicit summation."""
    n = len(x)
    sign = 1 if inverse else -1
    out = []
    for k in range(n):
        acc = 0j
        for t in range(n):
            acc += complex(x[t]) * cmath.exp(sign * 2j * math.pi * k * t / n)
        out.append(acc / math.sqrt(n))
    return np.array(out)


def straight_line_mlp(weights, biases, activations, x):
    """Scalar-loop forward pass of a fully connected net."""
    acts = {
        "relu": lambda v: v if v > 0 else 0.0,
        "tanh": math.tanh,
        "sigmoid": lambda v: 1.0 / (1.0 + math.exp(-v)),
        "identity": lambda v: v,
    }
    h = [float(v) for v in x]
    for w, b, act in zip(weights, biases, activations):
        nxt = []
        for i in range(len(b)):
            s = float(b[i])
            for j in range(len(h)):
                s += float(w[i][j]) * h[j]
            nxt.append(acts[act](s))
        h = nxt
    return np.array(h)


def masked_l1_direct(gen_out, x, bits):
    """Masked spectral L1 distance with the direct DFT and complex modulus."""
    g = direct_dft(gen_out)
    r = direct_dft(x)
    return sum(abs(g[k] - r[k]) for k in range(len(bits)) if bits[k])


def complex_fd_grad(f, z, step=1e-6):
    """Central-difference gradient of a real function of a complex vector.

    Returns dF/dRe + 1j * dF/dIm per entry.
    """
    z = np.array(z, dtype=complex)
    out = np.zeros(z.size, dtype=complex)
    for i in range(z.size):
        for unit, part in ((1.0, "re"), (1j, "im")):
            zp = z.copy()
            zm = z.copy()
            zp[i] += unit * step
            zm[i] -= unit * step
            d = (f(zp) - f(zm)) / (2 * step)
            out[i] += d if part == "re" else 1j * d
    return out


def random_complex(rng, n):
    return rng.normal(size=n) + 1j * rng.normal(size=n)
