"""Pure numpy versions of the compiled kernels in ``_ckernels.pyx``."""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def polyphase_resample(x, phases, half, up, down, n_out):
    x = np.asarray(x, dtype=np.float64)
    taps = phases.shape[1]
    pos = np.arange(n_out, dtype=np.int64) * down
    base = pos // up
    p = pos - base * up
    # pad so every tap index is in range; padding is zeros
    lead = half
    trail = max(0, int(base[-1]) - half + taps - len(x)) if n_out else 0
    xp = np.concatenate([np.zeros(lead), x, np.zeros(trail)])
    out = np.empty(n_out)
    chunk = 8192
    for s in range(0, n_out, chunk):
        b = base[s:s + chunk]
        idx = b[:, None] + np.arange(taps)[None, :]  # (base - half + j) + lead
        out[s:s + chunk] = np.einsum("ij,ij->i", phases[p[s:s + chunk]], xp[idx])
    return out


def conv1d_same(x, w, b):
    c_in, t_len = x.shape
    c_out, _, k = w.shape
    pad = k // 2
    xp = np.pad(x, ((0, 0), (pad, k - 1 - pad)))
    cols = sliding_window_view(xp, k, axis=1)  # (c_in, t_len, k)
    return np.einsum("oci,cti->ot", w, cols) + b[:, None]


def overlap_add(frames, hop, out_len):
    n_frames, width = frames.shape
    out = np.zeros(max(out_len, (n_frames - 1) * hop + width) if n_frames else out_len)
    for f in range(n_frames):
        out[f * hop:f * hop + width] += frames[f]
    return out[:out_len]
