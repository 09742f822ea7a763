"""Grid files for cross-method validation.

Plain text, one ``key = v1, v2, ...`` per line, ``#`` starts a comment.
A line consisting of ``---`` closes a block; each block is expanded as the
Cartesian product of its value lists, blocks are concatenated in file order.
Keys: mu, alpha, beta, gamma, delta, tau (numbers) and methods (names).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from importlib import resources

from .evaluate import METHODS
from .params import Parameters

NUMERIC_KEYS = ("mu", "alpha", "beta", "gamma", "delta", "tau")
RESONANCE_BAND = (0.999, 1.001)


class GridError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class GridSpec:
    mu_values: tuple[float, ...]
    alpha_values: tuple[float, ...]
    beta_values: tuple[float, ...]
    gamma_values: tuple[float, ...]
    delta_values: tuple[float, ...]
    tau_values: tuple[float, ...]
    methods: tuple[str, ...] = METHODS

    def points(self):
        """(Parameters, tau) pairs; tau varies fastest."""
        for mu, al, be, ga, de in itertools.product(
            self.mu_values, self.alpha_values, self.beta_values, self.gamma_values, self.delta_values
        ):
            params = Parameters(mu, al, be, ga, de)
            for tau in self.tau_values:
                yield params, tau


def in_resonance_band(tau: float) -> bool:
    return RESONANCE_BAND[0] <= tau <= RESONANCE_BAND[1]


def _finish(block: dict, line: int) -> GridSpec:
    missing = [k for k in NUMERIC_KEYS if k not in block]
    if missing:
        raise GridError(f"block is missing {', '.join(missing)}", line)
    return GridSpec(
        tuple(block["mu"]), tuple(block["alpha"]), tuple(block["beta"]),
        tuple(block["gamma"]), tuple(block["delta"]), tuple(block["tau"]),
        tuple(block.get("methods", METHODS)),
    )


def parse_grid(text: str) -> list[GridSpec]:
    blocks: list[GridSpec] = []
    block: dict = {}
    block_start = None
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "---":
            if block:
                blocks.append(_finish(block, block_start))
            block = {}
            block_start = None
            continue
        if "=" not in line:
            raise GridError(f"expected 'key = values', got {raw.strip()!r}", lineno)
        key, _, rhs = (s.strip() for s in line.partition("="))
        if block_start is None:
            block_start = lineno
        if key in block:
            raise GridError(f"duplicate key {key!r}", lineno)
        items = [s.strip() for s in rhs.split(",") if s.strip()]
        if not items:
            raise GridError(f"no values for {key!r}", lineno)
        if key == "methods":
            bad = [m for m in items if m not in METHODS]
            if bad:
                raise GridError(f"unknown method(s) {', '.join(bad)}", lineno)
            block[key] = items
        elif key in NUMERIC_KEYS:
            try:
                vals = [float(s) for s in items]
            except ValueError as exc:
                raise GridError(f"bad number in {key!r}: {exc}", lineno) from None
            if key == "tau":
                for t in vals:
                    if not t > 0:
                        raise GridError(f"tau must be positive, got {t}", lineno)
                    if in_resonance_band(t):
                        raise GridError(f"tau = {t} lies in the resonance band {RESONANCE_BAND}", lineno)
            block[key] = vals
        else:
            raise GridError(f"unknown key {key!r}", lineno)
    if block:
        blocks.append(_finish(block, block_start))
    if not blocks:
        raise GridError("grid is empty", lineno or None)
    return blocks


def bundled_grid_text() -> str:
    return resources.files("fourbessel").joinpath("data/acceptance.grid").read_text()
