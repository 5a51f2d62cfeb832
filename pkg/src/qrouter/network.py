"""Star network model: one router, one arterial fiber per user."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidNodeError, QRouterError, SelfLinkError, UnboundedReachError
from .photonics import MuxSpec, router_insertion_loss_db, worst_case_crosstalk_sum
from .wiring import WiringPlan, build_plan, node_label, wavelength_for

DEFAULT_ATTENUATION_DB_PER_KM = 0.2


@dataclass(frozen=True)
class FeasibilityPolicy:
    max_loss_budget_db: float = 20.0
    max_crosstalk_ratio: float = 1e-3

    def __post_init__(self):
        if not self.max_loss_budget_db > 0:
            raise QRouterError(f"max_loss_budget_db must be > 0, got {self.max_loss_budget_db}")
        if not self.max_crosstalk_ratio > 0:
            raise QRouterError(f"max_crosstalk_ratio must be > 0, got {self.max_crosstalk_ratio}")


@dataclass(frozen=True)
class StarNetwork:
    """``arm_lengths_km[u]`` is the arterial fiber of the user on router port u."""

    plan: WiringPlan
    mux: MuxSpec
    arm_lengths_km: tuple
    fiber_attenuation_db_per_km: float = DEFAULT_ATTENUATION_DB_PER_KM

    def __post_init__(self):
        lengths = tuple(float(x) for x in self.arm_lengths_km)
        object.__setattr__(self, "arm_lengths_km", lengths)
        if len(lengths) != self.plan.n_nodes:
            raise QRouterError(
                f"{len(lengths)} arm lengths for a {self.plan.n_nodes}-port router")
        for u, length in enumerate(lengths):
            if not length >= 0:
                raise QRouterError(f"arm length of {node_label(u)} must be >= 0, got {length}")
        if not self.fiber_attenuation_db_per_km >= 0:
            raise QRouterError("fiber attenuation must be >= 0")
        if self.mux.channel_count < self.plan.color_count:
            raise QRouterError(
                f"MUX has {self.mux.channel_count} channels but the wiring needs "
                f"{self.plan.color_count} wavelengths")

    @classmethod
    def uniform(cls, n_users: int, arm_km: float, mux: MuxSpec | None = None,
                attenuation: float = DEFAULT_ATTENUATION_DB_PER_KM) -> "StarNetwork":
        return cls(build_plan(n_users), mux or MuxSpec(), (arm_km,) * n_users, attenuation)

    @property
    def n_users(self) -> int:
        return self.plan.n_nodes

    def arm_loss_db(self, u: int) -> float:
        return self.arm_lengths_km[u] * self.fiber_attenuation_db_per_km


@dataclass(frozen=True)
class LinkBudget:
    pair: tuple
    wavelength: int
    sender_loss_db: float
    router_loss_db: float
    receiver_loss_db: float
    total_loss_db: float
    crosstalk_sum: float
    loss_ok: bool
    crosstalk_ok: bool

    @property
    def feasible(self) -> bool:
        return self.loss_ok and self.crosstalk_ok


def link_budget(net: StarNetwork, u: int, v: int,
                policy: FeasibilityPolicy | None = None) -> LinkBudget:
    """Loss and worst-case crosstalk for photons sent from user u to user v.

    The crosstalk term treats the sender's arm loss as the extra attenuation
    the signal suffers relative to unattenuated interferers, evaluated on the
    pair's own wavelength channel.
    """
    policy = policy or FeasibilityPolicy()
    for x in (u, v):
        if not 0 <= x < net.n_users:
            raise InvalidNodeError(f"node {x} outside 0..{net.n_users - 1}")
    if u == v:
        raise SelfLinkError(f"no link from {node_label(u)} to itself")
    wavelength = wavelength_for(net.plan, u, v)
    sender = net.arm_loss_db(u)
    receiver = net.arm_loss_db(v)
    router = router_insertion_loss_db(net.mux)
    # fsum is exactly rounded, so u->v and v->u give bit-identical totals
    total = math.fsum((sender, router, receiver))
    xt = worst_case_crosstalk_sum(net.mux, sender, wavelength).worst_case_sum
    return LinkBudget(
        pair=(u, v),
        wavelength=wavelength,
        sender_loss_db=sender,
        router_loss_db=router,
        receiver_loss_db=receiver,
        total_loss_db=total,
        crosstalk_sum=xt,
        loss_ok=total <= policy.max_loss_budget_db,
        crosstalk_ok=xt <= policy.max_crosstalk_ratio,
    )


def max_reach_km(net: StarNetwork, policy: FeasibilityPolicy | None = None) -> float:
    """Longest equal arm length that still fits the loss budget (per arm)."""
    policy = policy or FeasibilityPolicy()
    alpha = net.fiber_attenuation_db_per_km
    if alpha == 0:
        raise UnboundedReachError("fiber attenuation is zero; reach is unbounded")
    spare = policy.max_loss_budget_db - router_insertion_loss_db(net.mux)
    return max(0.0, spare / (2.0 * alpha))


@dataclass(frozen=True)
class NetworkReport:
    budgets: tuple
    policy: FeasibilityPolicy
    attenuation_db_per_km: float
    reach_per_arm_km: float | None

    @property
    def n_pairs(self) -> int:
        return len(self.budgets)

    @property
    def n_feasible(self) -> int:
        return sum(b.feasible for b in self.budgets)

    @property
    def all_feasible(self) -> bool:
        return self.n_feasible == self.n_pairs

    @property
    def worst(self) -> LinkBudget | None:
        return self.budgets[0] if self.budgets else None

    @property
    def reach_end_to_end_km(self) -> float | None:
        return None if self.reach_per_arm_km is None else 2 * self.reach_per_arm_km


def network_report(net: StarNetwork, policy: FeasibilityPolicy | None = None) -> NetworkReport:
    """One budget per unordered pair, worst loss first.

    Each pair is oriented so the sender is the user with the longer arm
    (lower index on ties), which is the worse direction for crosstalk.
    """
    policy = policy or FeasibilityPolicy()
    budgets = []
    for u, v in net.plan.pairs():
        if net.arm_lengths_km[v] > net.arm_lengths_km[u]:
            u, v = v, u
        budgets.append(link_budget(net, u, v, policy))
    budgets.sort(key=lambda b: (-b.total_loss_db, min(b.pair), max(b.pair)))
    try:
        reach = max_reach_km(net, policy)
    except UnboundedReachError:
        reach = None
    return NetworkReport(tuple(budgets), policy, net.fiber_attenuation_db_per_km, reach)
