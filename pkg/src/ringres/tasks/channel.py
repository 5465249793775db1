"""
Nonlinear wireless channel equalization.

PAM-4 symbols d(n) pass a 10-tap FIR channel with two non-causal taps,

    q(n) = 0.08 d(n+2) - 0.12 d(n+1) + d(n) + 0.18 d(n-1) - 0.1 d(n-2)
           + 0.091 d(n-3) - 0.05 d(n-4) + 0.04 d(n-5) + 0.03 d(n-6) + 0.01 d(n-7)

followed by a memoryless nonlinearity and white Gaussian noise,

    u(n) = q(n) + 0.036 q(n)^2 - 0.011 q(n)^3 + v(n)

The received u(n) is shifted by +5 before masking; the readout recovers
d(n - D). Symbols and noise come from independent sub-streams of the seed.
"""

from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ringres.errors import PreconditionError
from ringres.readout.metrics import PAM4_ALPHABET
from ringres.tasks.base import Split, TaskDataset, TaskMetadata, TaskPlugin, resolve_split

# taps for d(n+2), d(n+1), d(n), ..., d(n-7)
CHANNEL_TAPS: tuple[float, ...] = (0.08, -0.12, 1.0, 0.18, -0.1, 0.091, -0.05, 0.04, 0.03, 0.01)
LEAD = 2
RECEIVER_SHIFT = 5.0
# fraction of [0, 1] the training range is mapped onto; test samples may exceed it
CONDITIONING_HEADROOM = 0.9
EQUALIZE_SPLIT = Split(warmup=200, train=10_000, test=100_000, test_subsets=10)

SYMBOL_STREAM = 0
NOISE_STREAM = 1


@dataclass(frozen=True)
class ChannelModel:
    taps: tuple[float, ...] = CHANNEL_TAPS
    quadratic: float = 0.036
    cubic: float = -0.011
    snr_db: float = 32.0

    def linear_response(self, symbols: ArrayLike) -> NDArray[np.float64]:
        """q(n), with symbols outside the sequence taken as zero."""
        d = np.asarray(symbols, dtype=np.float64).ravel()
        full = np.convolve(d, np.asarray(self.taps))
        return full[LEAD : LEAD + d.size]

    def distort(self, q: ArrayLike) -> NDArray[np.float64]:
        x = np.asarray(q, dtype=np.float64)
        return x + self.quadratic * x**2 + self.cubic * x**3

    def noise_variance(self, q: ArrayLike) -> float:
        return float(np.var(np.asarray(q, dtype=np.float64))) / 10.0 ** (self.snr_db / 10.0)

    def received(self, symbols: ArrayLike, rng: Optional[np.random.Generator] = None) -> NDArray[np.float64]:
        """u(n) before the receiver shift; noiseless when ``rng`` is None."""
        q = self.linear_response(symbols)
        u = self.distort(q)
        if rng is not None:
            u = u + rng.normal(0.0, np.sqrt(self.noise_variance(q)), size=q.size)
        return u


def delayed(symbols: NDArray[np.float64], delay: int) -> NDArray[np.float64]:
    if delay == 0:
        return symbols.copy()
    return np.concatenate([np.zeros(delay), symbols[:-delay]])


def gen_channel_equalization(
    length: Optional[int] = None,
    seed: int = 0,
    snr_db: float = 32.0,
    split: Optional[Split] = None,
    delay: int = 2,
    channel: Optional[ChannelModel] = None,
) -> TaskDataset:
    layout = resolve_split(length, split, EQUALIZE_SPLIT)
    if layout.total < len(CHANNEL_TAPS):
        raise PreconditionError(
            f"channel equalization needs at least {len(CHANNEL_TAPS)} samples, got {layout.total}"
        )
    if delay < 0:
        raise PreconditionError(f"target delay must be >= 0, got {delay}")
    model = channel or ChannelModel(snr_db=snr_db)

    symbol_rng = np.random.default_rng([seed, SYMBOL_STREAM])
    noise_rng = np.random.default_rng([seed, NOISE_STREAM])
    d = symbol_rng.choice(np.asarray(PAM4_ALPHABET), size=layout.total)
    u = model.received(d, noise_rng)

    train_stop = layout.warmup + layout.train
    peak = float(np.max(u[:train_stop] + RECEIVER_SHIFT))
    return TaskDataset(
        name="equalize",
        inputs=u,
        targets=delayed(d, delay),
        split=layout,
        metric_kind="ser",
        mask_range=(-1.0, 1.0),
        input_bias_preshift=RECEIVER_SHIFT,
        input_scale=CONDITIONING_HEADROOM / peak if peak > 0 else 1.0,
        seed=seed,
        metadata={"snr_db": model.snr_db, "delay": delay},
    )


class ChannelEqualizationTask(TaskPlugin):
    split: Split
    snr_db: float
    delay: int

    @property
    def metadata(self) -> TaskMetadata:
        return TaskMetadata(
            name="equalize",
            version="1.0.0",
            description="Nonlinear channel equalization of PAM-4 symbols",
            metric="ser",
            parameters={
                "snr_db": {
                    "type": "float",
                    "default": 32.0,
                    "description": "Signal-to-noise ratio of the channel in dB",
                    "required": False,
                },
                "delay": {
                    "type": "int",
                    "default": 2,
                    "description": "Target is d(n - delay)",
                    "required": False,
                },
                "test_subsets": {
                    "type": "int",
                    "default": EQUALIZE_SPLIT.test_subsets,
                    "description": "Independent test subsets, each with its own warm-up",
                    "required": False,
                },
            },
        )

    def initialize(self, config: dict[str, Any]) -> None:
        self.split = self._split_from(config, EQUALIZE_SPLIT)
        self.snr_db = float(config.get("snr_db", 32.0))
        self.delay = int(config.get("delay", 2))

    def generate(self, seed: int) -> TaskDataset:
        return gen_channel_equalization(
            seed=seed, snr_db=self.snr_db, split=self.split, delay=self.delay
        )

    def validate(self) -> list[str]:
        errors: list[str] = []
        if self.delay < 0:
            errors.append(f"equalize.delay must be >= 0, got {self.delay}")
        if self.split.total < len(CHANNEL_TAPS):
            errors.append("equalize needs at least 10 samples")
        return errors
