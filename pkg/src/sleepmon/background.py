"""Adaptive per-pixel Gaussian-mixture background models and mask smoothing.

Each visual channel (depth, luma) keeps an independent model: every pixel is
described by K weighted Gaussians kept sorted by weight/sqrt(variance)
descending.  A new frame updates the first matching component per pixel and
classifies the pixel against the high-weight prefix of the mixture.  The two
channels share no state, so depth masks are immune to lighting changes by
construction.

State is stored as per-component (H, W) float32 planes and every step is
plane arithmetic, which keeps a 320x350 grid well above real-time rate on a
single core.  Updates are per-pixel independent (no cross-pixel reads), so
the result is bitwise independent of any data-parallel schedule; updating one
model from two frames concurrently is not supported.

Depth pixels holding 0 mean "no reading" from the sensor: they are classified
background and leave the model untouched.  A pixel whose very first
observation is 0 is flagged never-observed and is re-seeded from its first
valid reading instead of treating that reading as foreground.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEPTH_CHANNEL = "depth"
LUMA_CHANNEL = "luma"

_F = np.float32


@dataclass(frozen=True)
class GmmParams:
    """Mixture parameters; defaults are the standard operating point.

    ``initial_variance`` is channel-scaled: 50**2 for raw depth units,
    30**2 for 8-bit luma.
    """

    components: int = 3
    match_k: float = 2.5
    learning_rate: float = 0.01
    background_fraction: float = 0.7
    initial_variance: float = 50.0 ** 2
    variance_floor: float = 4.0
    replacement_weight: float = 0.05

    def __post_init__(self):
        if self.components < 1:
            raise ValueError("components must be >= 1")
        if not 0.0 < self.learning_rate < 1.0:
            raise ValueError("learning rate out of range (0, 1)")
        if not 0.0 < self.background_fraction <= 1.0:
            raise ValueError("background fraction out of range (0, 1]")
        if self.match_k <= 0.0:
            raise ValueError("match_k must be positive")
        if self.variance_floor <= 0.0:
            raise ValueError("variance floor must be positive")
        if self.initial_variance < self.variance_floor:
            raise ValueError("initial variance must be >= variance floor")
        if not 0.0 < self.replacement_weight < 1.0:
            raise ValueError("replacement weight out of range (0, 1)")


DEPTH_PARAMS = GmmParams(initial_variance=50.0 ** 2)
LUMA_PARAMS = GmmParams(initial_variance=30.0 ** 2)


def luma(color_frame: np.ndarray) -> np.ndarray:
    """Collapse an (H, W, 3) rgb frame to rounded luma, as float32."""
    c = color_frame.astype(np.float64)
    y = 0.299 * c[..., 0] + 0.587 * c[..., 1] + 0.114 * c[..., 2]
    return np.rint(y).astype(_F)


class BackgroundModel:
    """Per-pixel Gaussian mixture over one single-valued channel."""

    def __init__(self, params: GmmParams, first_frame: np.ndarray,
                 channel: str = DEPTH_CHANNEL):
        if channel not in (DEPTH_CHANNEL, LUMA_CHANNEL):
            raise ValueError(f"unknown channel kind {channel!r}")
        if first_frame.ndim != 2:
            raise ValueError("first observation must be a 2-D single-channel frame")
        self.params = params
        self.channel = channel
        self.shape = first_frame.shape
        k = params.components
        x0 = first_frame.astype(_F)
        self._w = [np.ones(self.shape, _F)] + [np.zeros(self.shape, _F) for _ in range(k - 1)]
        self._mu = [x0.copy()] + [np.zeros(self.shape, _F) for _ in range(k - 1)]
        self._var = [np.full(self.shape, params.initial_variance, _F) for _ in range(k)]
        if channel == DEPTH_CHANNEL:
            self._never_observed = np.asarray(first_frame) == 0
            self._has_never = bool(self._never_observed.any())
        else:
            self._never_observed = np.zeros(self.shape, bool)
            self._has_never = False

    # Read-only views of the mixture, stacked (H, W, K); for inspection/tests.
    @property
    def weights(self) -> np.ndarray:
        return np.stack(self._w, axis=2)

    @property
    def means(self) -> np.ndarray:
        return np.stack(self._mu, axis=2)

    @property
    def variances(self) -> np.ndarray:
        return np.stack(self._var, axis=2)

    @property
    def never_observed(self) -> np.ndarray:
        return self._never_observed.copy()

    def update_and_classify(self, frame: np.ndarray) -> np.ndarray:
        """Fold one frame into the model and return the boolean foreground mask.

        Matched component: weights decay toward it, its mean and variance move
        with rate rho = alpha / matched_weight (clamped to [alpha, 1]).  No
        match: the lowest-ranked component is replaced by a low-weight
        component centered on the observation.  A pixel is foreground unless
        its matched component sits inside the smallest weight prefix
        exceeding ``background_fraction``.
        """
        if frame.shape != self.shape:
            raise ValueError(
                f"dimension mismatch: frame {frame.shape} vs model {self.shape}")
        p = self.params
        k = p.components
        w, mu, var = self._w, self._mu, self._var
        alpha = _F(p.learning_rate)
        one_minus = _F(1.0 - p.learning_rate)
        mk2 = _F(p.match_k * p.match_k)

        skip = None
        saved = None
        if self.channel == DEPTH_CHANNEL:
            zeros = np.asarray(frame) == 0
            if zeros.any():
                skip = zeros
                saved = ([a.copy() for a in w], [a.copy() for a in mu],
                         [a.copy() for a in var])
        reseed = None
        if self._has_never:
            reseed = self._never_observed.copy()
            if skip is not None:
                reseed &= ~skip
            if not reseed.any():
                reseed = None

        x = frame.astype(_F, copy=False)

        # First matching component in rank order, per pixel.
        matched = []
        taken = None
        for i in range(k):
            d = x - mu[i]
            near = d * d <= mk2 * var[i]
            if taken is None:
                f = near
                taken = near.copy()
            else:
                f = near & ~taken
                taken |= near
            matched.append(f)
        any_match = taken
        none_match = ~any_match

        w_pre = matched[0] * w[0]
        for i in range(1, k):
            w_pre = w_pre + matched[i] * w[i]
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            rho = np.clip(alpha / w_pre, alpha, _F(1.0)).astype(_F, copy=False)

        floor = _F(p.variance_floor)
        for i in range(k):
            np.multiply(w[i], one_minus, out=w[i], where=any_match)
            np.add(w[i], alpha, out=w[i], where=matched[i])
            np.add(mu[i], rho * (x - mu[i]), out=mu[i], where=matched[i])
            d = x - mu[i]
            vn = var[i] + rho * (d * d - var[i])
            np.copyto(var[i], np.maximum(vn, floor), where=matched[i])

        np.copyto(w[k - 1], _F(p.replacement_weight), where=none_match)
        np.copyto(mu[k - 1], x, where=none_match)
        np.copyto(var[k - 1], _F(p.initial_variance), where=none_match)

        total = w[0].copy()
        for i in range(1, k):
            total += w[i]
        for i in range(k):
            w[i] /= total

        # Rank by weight/sqrt(variance) descending via the equivalent
        # weight**2/variance (weights are non-negative); ties keep the
        # earlier component first.
        metric = [w[i] * w[i] / var[i] for i in range(k)]
        rank = [np.zeros(self.shape, np.int8) for _ in range(k)]
        for i in range(k):
            for j in range(k):
                if j < i:
                    rank[i] += metric[j] >= metric[i]
                elif j > i:
                    rank[i] += metric[j] > metric[i]
        order_changed = any(bool((rank[i] != i).any()) for i in range(k))

        matched_rank = matched[0] * rank[0]
        for i in range(1, k):
            matched_rank = matched_rank + matched[i] * rank[i]

        if order_changed:
            for planes in (w, mu, var):
                old = [a for a in planes]
                for dest in range(k):
                    acc = old[k - 1]
                    for src in range(k - 2, -1, -1):
                        acc = np.where(rank[src] == dest, old[src], acc)
                    planes[dest] = acc

        # Exclusive prefix weight of the matched component's final rank;
        # background iff that prefix does not exceed the fraction threshold.
        prefix = np.zeros(self.shape, _F)
        acc = np.zeros(self.shape, _F)
        for r in range(1, k):
            acc = acc + w[r - 1]
            prefix = np.where(matched_rank == r, acc, prefix)
        foreground = none_match | (prefix > _F(p.background_fraction))

        if reseed is not None:
            for i in range(k):
                np.copyto(self._w[i], _F(1.0 if i == 0 else 0.0), where=reseed)
                np.copyto(self._mu[i], x if i == 0 else _F(0.0), where=reseed)
                np.copyto(self._var[i], _F(p.initial_variance), where=reseed)
            foreground &= ~reseed
            self._never_observed &= ~reseed
            self._has_never = bool(self._never_observed.any())
        if skip is not None:
            sw, smu, svar = saved
            for i in range(k):
                np.copyto(self._w[i], sw[i], where=skip)
                np.copyto(self._mu[i], smu[i], where=skip)
                np.copyto(self._var[i], svar[i], where=skip)
            foreground &= ~skip
        self._w, self._mu, self._var = w, mu, var
        return foreground


def new_model(dims: tuple[int, int], params: GmmParams, first_frame: np.ndarray,
              channel: str = DEPTH_CHANNEL) -> BackgroundModel:
    """Create a model of the given grid size seeded from the first observation."""
    if tuple(first_frame.shape) != tuple(dims):
        raise ValueError(f"dimension mismatch: frame {first_frame.shape} vs dims {dims}")
    return BackgroundModel(params, first_frame, channel)


def _erode3(mask: np.ndarray) -> np.ndarray:
    h, w = mask.shape
    p = np.zeros((h + 2, w + 2), bool)
    p[1:-1, 1:-1] = mask
    rows = p[:-2] & p[1:-1] & p[2:]
    return rows[:, :-2] & rows[:, 1:-1] & rows[:, 2:]


def _dilate3(mask: np.ndarray) -> np.ndarray:
    h, w = mask.shape
    p = np.zeros((h + 2, w + 2), bool)
    p[1:-1, 1:-1] = mask
    rows = p[:-2] | p[1:-1] | p[2:]
    return rows[:, :-2] | rows[:, 1:-1] | rows[:, 2:]


def open3(mask: np.ndarray) -> np.ndarray:
    """Binary opening with a 3x3 square element; out-of-grid is background."""
    return _dilate3(_erode3(mask))


def close3(mask: np.ndarray) -> np.ndarray:
    """Binary closing with a 3x3 square element; out-of-grid is background."""
    return _erode3(_dilate3(mask))


def morph_smooth(mask: np.ndarray) -> np.ndarray:
    """Opening then closing with a 3x3 square element.

    Removes isolated speckle while leaving solid regions (anything containing
    a 3x3 block) intact; never creates foreground in a neighborhood that was
    entirely background.
    """
    return close3(open3(np.asarray(mask, bool)))


def dilate3(mask: np.ndarray) -> np.ndarray:
    """Binary dilation with a 3x3 square element (exposed for diagnostics)."""
    return _dilate3(np.asarray(mask, bool))


def foreground_area(mask: np.ndarray) -> int:
    """Number of foreground pixels in a mask."""
    return int(np.count_nonzero(mask))
