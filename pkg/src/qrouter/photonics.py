"""dB and single-photon probability arithmetic for multiplexer-based routers.

Conventions: insertion loss ``IL`` is a positive dB figure, crosstalk ``FC`` is
a negative dB figure measured relative to the correctly routed output. All
ratios are probabilities for one photon, so absolute powers never appear.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ChannelRangeError, NotALeakError, QRouterError


def db_to_ratio(db: float) -> float:
    """Transmission ratio for a loss of ``db`` decibels, ``10**(-db/10)``."""
    return 10.0 ** (-db / 10.0)


def ratio_to_db(ratio: float) -> float:
    """Loss in dB for a transmission ratio; inverse of :func:`db_to_ratio`."""
    if ratio <= 0:
        return math.inf
    return -10.0 * math.log10(ratio)


@dataclass(frozen=True)
class MuxSpec:
    """Optical figures of one wavelength multiplexer.

    ``crosstalk_matrix_db`` optionally overrides the two-valued model with
    measured data: entry ``[i-1][j-1]`` is the crosstalk of channel i into
    port j. The diagonal is ignored. ``-inf`` crosstalk means perfect isolation.
    """

    channel_count: int = 40
    insertion_loss_db: float = 5.0
    adjacent_crosstalk_db: float = -25.0
    nonadjacent_crosstalk_db: float = -30.0
    crosstalk_matrix_db: tuple | None = field(default=None, compare=True)

    def __post_init__(self):
        if isinstance(self.channel_count, bool) or int(self.channel_count) != self.channel_count:
            raise QRouterError(f"channel_count must be an integer, got {self.channel_count!r}")
        if self.channel_count < 2:
            raise QRouterError(f"channel_count must be >= 2, got {self.channel_count}")
        if not (self.insertion_loss_db >= 0):
            raise QRouterError(f"insertion_loss_db must be >= 0, got {self.insertion_loss_db}")
        if not (self.adjacent_crosstalk_db < 0):
            raise QRouterError(
                f"adjacent_crosstalk_db must be < 0, got {self.adjacent_crosstalk_db}")
        if not (self.nonadjacent_crosstalk_db < 0):
            raise QRouterError(
                f"nonadjacent_crosstalk_db must be < 0, got {self.nonadjacent_crosstalk_db}")
        if self.adjacent_crosstalk_db < self.nonadjacent_crosstalk_db:
            raise QRouterError("adjacent crosstalk must be at least the non-adjacent crosstalk")
        if self.crosstalk_matrix_db is not None:
            m = tuple(tuple(float(x) for x in row) for row in self.crosstalk_matrix_db)
            n = self.channel_count
            if len(m) != n or any(len(row) != n for row in m):
                raise QRouterError(f"crosstalk_matrix_db must be {n}x{n}")
            for i, row in enumerate(m):
                for j, x in enumerate(row):
                    if i != j and not x < 0:
                        raise QRouterError(
                            f"crosstalk_matrix_db[{i}][{j}] must be < 0, got {x}")
            object.__setattr__(self, "crosstalk_matrix_db", m)

    def crosstalk_db(self, signal_channel: int, offset: int) -> float:
        """Crosstalk figure for a photon on ``signal_channel`` leaking ``offset`` ports away."""
        if offset == 0:
            raise NotALeakError("offset 0 is the signal path, not a leak")
        if self.crosstalk_matrix_db is not None:
            j = signal_channel + offset
            check_channel(self, signal_channel)
            check_channel(self, j)
            return self.crosstalk_matrix_db[signal_channel - 1][j - 1]
        if abs(offset) == 1:
            return self.adjacent_crosstalk_db
        return self.nonadjacent_crosstalk_db

    def mid_band_channel(self) -> int:
        return (self.channel_count + 1) // 2


def check_channel(spec: MuxSpec, channel: int) -> int:
    if not 1 <= channel <= spec.channel_count:
        raise ChannelRangeError(
            f"channel {channel} outside 1..{spec.channel_count}")
    return channel


def interfering_offsets(spec: MuxSpec, signal_channel: int) -> list[int]:
    """Offsets ``j - i`` of every in-band channel other than the signal."""
    check_channel(spec, signal_channel)
    return [j - signal_channel for j in range(1, spec.channel_count + 1)
            if j != signal_channel]


def leak_ratio_per_pass(spec: MuxSpec, offset: int, signal_channel: int | None = None) -> float:
    """Probability that one pass sends the photon to the port ``offset`` away.

    ``10**((FC - IL)/10)``, i.e. the crosstalk ratio composed with the
    insertion loss. ``signal_channel`` only matters with a crosstalk matrix.
    """
    if signal_channel is None:
        signal_channel = spec.mid_band_channel()
    fc = spec.crosstalk_db(signal_channel, offset)
    return 10.0 ** ((fc - spec.insertion_loss_db) / 10.0)


def router_insertion_loss_db(spec: MuxSpec) -> float:
    # Each router transit crosses two multiplexers.
    return 2 * spec.insertion_loss_db


def two_pass_crosstalk_ratio(spec: MuxSpec, offset: int, signal_channel: int | None = None) -> float:
    """Leak-to-signal ratio after two passes, ``10**(2*FC/10)``.

    The insertion loss cancels between numerator and denominator.
    """
    if signal_channel is None:
        signal_channel = spec.mid_band_channel()
    fc = spec.crosstalk_db(signal_channel, offset)
    return 10.0 ** (2.0 * fc / 10.0)


@dataclass(frozen=True)
class CrosstalkAssessment:
    signal_channel: int
    pre_router_loss_db: float
    per_channel_ratio: float
    worst_case_sum: float
    contributions: dict
    truncated_index_sum: float

    @property
    def worst_case_percent(self) -> float:
        return 100.0 * self.worst_case_sum


def worst_case_crosstalk_sum(spec: MuxSpec, pre_router_loss_db: float = 0.0,
                             signal_channel: int | None = None) -> CrosstalkAssessment:
    """Crosstalk-to-signal ratio when the signal alone suffered ``pre_router_loss_db``.

    Sums ``10**((X + 2*FC_j)/10)`` over all N - 1 interfering channels j.
    Band-edge channels have a single adjacent neighbour. ``per_channel_ratio``
    is the strongest single interferer at X = 0. ``truncated_index_sum``
    restricts j to 1..N-1 (so N - 2 interferers for a mid-band signal) and is
    kept for comparison with figures computed that way.
    """
    if pre_router_loss_db < 0:
        raise QRouterError(f"pre-router loss must be >= 0, got {pre_router_loss_db}")
    if signal_channel is None:
        signal_channel = spec.mid_band_channel()
    offsets = interfering_offsets(spec, signal_channel)
    fc = np.array([spec.crosstalk_db(signal_channel, o) for o in offsets])
    terms = 10.0 ** ((pre_router_loss_db + 2.0 * fc) / 10.0)
    channels = [signal_channel + o for o in offsets]
    contributions = {j: float(x) for j, x in zip(channels, terms)}
    truncated = [x for j, x in zip(channels, terms) if j <= spec.channel_count - 1]
    return CrosstalkAssessment(
        signal_channel=signal_channel,
        pre_router_loss_db=float(pre_router_loss_db),
        per_channel_ratio=float(np.max(10.0 ** (2.0 * fc / 10.0))),
        worst_case_sum=math.fsum(terms),
        contributions=contributions,
        truncated_index_sum=math.fsum(truncated),
    )
