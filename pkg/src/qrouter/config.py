"""Configuration file loading.

A config is one JSON document with optional sections ``mux``, ``network``,
``policy`` and ``sim``. Every value falls back to :data:`DEFAULTS`. Errors
carry the line of the offending value.

Example::

    {
      "mux": {"channel_count": 40, "insertion_loss_db": 5.0},
      "network": {"attenuation_db_per_km": 0.2,
                  "users": [25.0, 25.0, {"node": "C", "length_km": 30.0}]},
      "policy": {"max_loss_budget_db": 20.0},
      "sim": {"trials": 1000000, "seed": 42}
    }

``users`` entries are either a bare arm length (node = list position) or an
object naming the node by letter or index.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, QRouterError
from .network import FeasibilityPolicy, StarNetwork
from .photonics import MuxSpec
from .transport import SimConfig
from .wiring import build_plan, parse_node

# Provenance: "device" = typical commercial DWDM figures the router analysis
# is built around; "assumed" = engineering default chosen here.
DEFAULTS = {
    "mux": {
        "channel_count": 40,              # device: common DWDM product size
        "insertion_loss_db": 5.0,         # device: typical MUX insertion loss
        "adjacent_crosstalk_db": -25.0,   # device: neighbour-channel isolation
        "nonadjacent_crosstalk_db": -30.0,  # device: far-channel isolation
    },
    "network": {
        "attenuation_db_per_km": 0.2,     # assumed: SMF-28 near 1550 nm
    },
    "policy": {
        "max_loss_budget_db": 20.0,       # assumed: point-to-point QKD tolerance
        "max_crosstalk_ratio": 1e-3,      # assumed: crosstalk-induced error ceiling
    },
    "sim": {
        "trials": 1_000_000,
        "seed": 42,
        "passes": 2,                      # a router transit crosses two MUXs
        "signal_channel": None,           # None = mid-band
        "weighted": True,
        "workers": 1,
    },
}

SECTIONS = tuple(DEFAULTS)


def _ws(text: str, i: int) -> int:
    while i < len(text) and text[i] in " \t\r\n":
        i += 1
    return i


def index_lines(text: str) -> dict:
    """Map every JSON path (tuple of keys / indices) to its 1-based line."""
    decoder = json.JSONDecoder()
    lines = {}

    def line_at(i):
        return text.count("\n", 0, i) + 1

    def walk(i, path):
        i = _ws(text, i)
        lines[path] = line_at(i)
        if i < len(text) and text[i] == "{":
            i = _ws(text, i + 1)
            if text[i] == "}":
                return i + 1
            while True:
                key, i = decoder.raw_decode(text, i)
                lines[path + (key,)] = line_at(i)
                i = _ws(text, i) + 1  # colon
                i = walk(i, path + (key,))
                i = _ws(text, i)
                if text[i] == ",":
                    i = _ws(text, i + 1)
                    continue
                return i + 1
        if i < len(text) and text[i] == "[":
            i = _ws(text, i + 1)
            if text[i] == "]":
                return i + 1
            k = 0
            while True:
                i = walk(i, path + (k,))
                i = _ws(text, i)
                k += 1
                if text[i] == ",":
                    i += 1
                    continue
                return i + 1
        _, end = decoder.raw_decode(text, i)
        return end

    walk(0, ())
    return lines


@dataclass(frozen=True)
class ConfigFile:
    mux: MuxSpec
    policy: FeasibilityPolicy
    attenuation_db_per_km: float
    arm_lengths_km: tuple | None
    sim: dict
    raw: dict

    def network(self) -> StarNetwork:
        if self.arm_lengths_km is None:
            raise ConfigError("network.users is required for this command")
        plan = build_plan(len(self.arm_lengths_km))
        return StarNetwork(plan, self.mux, self.arm_lengths_km, self.attenuation_db_per_km)

    def sim_config(self) -> SimConfig:
        s = self.sim
        return SimConfig(trials=s["trials"], seed=s["seed"], spec=self.mux,
                         passes=s["passes"], signal_channel=s["signal_channel"],
                         weighted=s["weighted"])


class _Loader:
    def __init__(self, text, source):
        self.text = text
        self.source = source
        try:
            self.doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc.msg}", exc.lineno, source) from None
        if not isinstance(self.doc, dict):
            raise ConfigError("top level must be a JSON object", 1, source)
        self.lines = index_lines(text)

    def fail(self, path, message):
        line = None
        for cut in range(len(path), -1, -1):
            if path[:cut] in self.lines:
                line = self.lines[path[:cut]]
                break
        dotted = ".".join(str(p) for p in path)
        raise ConfigError(f"{dotted}: {message}" if dotted else message, line, self.source)

    def section(self, name):
        value = self.doc.get(name, {})
        if not isinstance(value, dict):
            self.fail((name,), "must be an object")
        known = set(DEFAULTS[name]) | ({"users"} if name == "network" else set())
        if name == "mux":
            known.add("crosstalk_matrix_db")
        for key in value:
            if key not in known:
                self.fail((name, key), "unknown key")
        return value

    def number(self, path, value, *, integer=False, allow_none=False):
        if value is None and allow_none:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(path, f"expected a number, got {json.dumps(value)}")
        if integer and (isinstance(value, float) and not value.is_integer()):
            self.fail(path, f"expected an integer, got {value}")
        if not integer and not math.isfinite(value):
            self.fail(path, "must be finite")
        return int(value) if integer else float(value)

    def get(self, section, name, key, **kw):
        value = section.get(key, DEFAULTS[name][key])
        return self.number((name, key), value, **kw)


def _check(loader, path, ok, message):
    if not ok:
        loader.fail(path, message)


def _build(loader, path, factory, **kwargs):
    try:
        return factory(**kwargs)
    except (TypeError, ValueError) as exc:
        loader.fail(path, str(exc))


def loads(text: str, source: str | None = None) -> ConfigFile:
    ld = _Loader(text, source)
    for key in ld.doc:
        if key not in SECTIONS:
            ld.fail((key,), "unknown section")

    m = ld.section("mux")
    mux_kw = {k: ld.get(m, "mux", k, integer=(k == "channel_count")) for k in DEFAULTS["mux"]}
    _check(ld, ("mux", "channel_count"), mux_kw["channel_count"] >= 2, "must be >= 2")
    _check(ld, ("mux", "insertion_loss_db"), mux_kw["insertion_loss_db"] >= 0, "must be >= 0")
    for key in ("adjacent_crosstalk_db", "nonadjacent_crosstalk_db"):
        _check(ld, ("mux", key), mux_kw[key] < 0, "must be < 0")
    if "crosstalk_matrix_db" in m:
        mux_kw["crosstalk_matrix_db"] = m["crosstalk_matrix_db"]
    mux = _build(ld, ("mux",), MuxSpec, **mux_kw)

    p = ld.section("policy")
    policy_kw = {k: ld.get(p, "policy", k) for k in DEFAULTS["policy"]}
    for key, value in policy_kw.items():
        _check(ld, ("policy", key), value > 0, "must be > 0")
    policy = _build(ld, ("policy",), FeasibilityPolicy, **policy_kw)

    net = ld.section("network")
    alpha = ld.get(net, "network", "attenuation_db_per_km")
    if alpha < 0:
        ld.fail(("network", "attenuation_db_per_km"), "must be >= 0")
    arms = None
    if "users" in net:
        arms = _users(ld, net["users"])

    s = ld.section("sim")
    sim = {
        "trials": ld.get(s, "sim", "trials", integer=True),
        "seed": ld.get(s, "sim", "seed", integer=True),
        "passes": ld.get(s, "sim", "passes", integer=True),
        "signal_channel": ld.get(s, "sim", "signal_channel", integer=True, allow_none=True),
        "workers": ld.get(s, "sim", "workers", integer=True),
    }
    weighted = s.get("weighted", DEFAULTS["sim"]["weighted"])
    if not isinstance(weighted, bool):
        ld.fail(("sim", "weighted"), "expected true or false")
    sim["weighted"] = weighted
    if sim["trials"] < 1:
        ld.fail(("sim", "trials"), "must be >= 1")
    if not 0 <= sim["seed"] < 2**64:
        ld.fail(("sim", "seed"), "must be a 64-bit unsigned integer")
    if not 0 <= sim["passes"] <= 2:
        ld.fail(("sim", "passes"), "must be 0, 1 or 2")
    if sim["workers"] < 1:
        ld.fail(("sim", "workers"), "must be >= 1")
    sc = sim["signal_channel"]
    if sc is not None and not 1 <= sc <= mux.channel_count:
        ld.fail(("sim", "signal_channel"), f"must be in 1..{mux.channel_count}")

    return ConfigFile(mux, policy, alpha, arms, sim, ld.doc)


def _users(ld, users):
    path = ("network", "users")
    if not isinstance(users, list) or len(users) < 2:
        ld.fail(path, "must be a list of at least 2 users")
    arms = {}
    for k, entry in enumerate(users):
        if isinstance(entry, dict):
            extra = set(entry) - {"node", "length_km"}
            if extra:
                ld.fail(path + (k, sorted(extra)[0]), "unknown key")
            if "length_km" not in entry:
                ld.fail(path + (k,), "missing length_km")
            node = entry.get("node", k)
            try:
                node = parse_node(node)
            except QRouterError as exc:
                ld.fail(path + (k, "node"), str(exc))
            length = ld.number(path + (k, "length_km"), entry["length_km"])
            where = path + (k, "length_km")
        else:
            node = k
            length = ld.number(path + (k,), entry)
            where = path + (k,)
        if length < 0:
            ld.fail(where, "arm length must be >= 0")
        if node in arms:
            ld.fail(path + (k,), f"node {node} listed twice")
        arms[node] = length
    n = len(users)
    for k, node in enumerate(arms):
        if not 0 <= node < n:
            ld.fail(path + (k,), f"node {node} does not exist in a {n}-port router")
    return tuple(arms[u] for u in range(n))


def load(path) -> ConfigFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read: {exc.strerror}", None, str(path)) from None
    return loads(text, str(path))
