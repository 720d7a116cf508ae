"""Hypothesis strategies for small dense tensors."""
import numpy as np
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

finite = st.floats(-2.0, 2.0, allow_nan=False, allow_infinity=False)


def dims(lo=2, hi=5):
    return st.integers(lo, hi)


@st.composite
def sym2(draw, n):
    a = draw(arrays(np.float64, (n, n), elements=finite))
    return 0.5 * (a + a.T)


@st.composite
def metrics(draw, n, indefinite=True):
    """Well-conditioned symmetric metrics, optionally of mixed signature."""
    q, _ = np.linalg.qr(draw(arrays(np.float64, (n, n), elements=finite)) + 3 * np.eye(n))
    mags = draw(arrays(np.float64, (n,), elements=st.floats(0.5, 2.0)))
    signs = draw(arrays(np.int8, (n,), elements=st.sampled_from([-1, 1]))) if indefinite else np.ones(n)
    return q @ np.diag(mags * signs) @ q.T


@st.composite
def tensors(draw, n, k):
    return draw(arrays(np.float64, (n,) * k, elements=finite))
