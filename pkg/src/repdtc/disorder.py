"""Disorder sampling and reproducible random-stream bookkeeping.

Every random quantity in a run is drawn from a stream addressed by
(master seed, realization index, purpose string).  Parameter draws use
one stream per scalar value, so adding a site or another parameter
family never shifts what anything else receives.  Time-ordered noise
(gate-angle jitter, measurement shots) uses one sequential stream per
realization instead.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .models import ChainLayout, CnotParams, ModelParams

IDEAL_X = math.pi / 2
IDEAL_ZX = math.pi / 4
# Component signs of the ideal transversal CNOT: (zx, z, x).
CNOT_SIGNS = {"zx": 1.0, "z": -1.0, "x": -1.0}


def _purpose_entropy(purpose: str) -> int:
    digest = hashlib.sha256(purpose.encode("utf-8")).digest()
    return int.from_bytes(digest[:16], "little")


@dataclass(frozen=True)
class SeedPlan:
    """Derives independent generators from one master seed."""

    master_seed: int

    def stream(self, realization: int, purpose: str) -> np.random.Generator:
        seq = np.random.SeedSequence(
            [self.master_seed, realization, _purpose_entropy(purpose)]
        )
        return np.random.Generator(np.random.PCG64(seq))

    def value(self, realization: int, purpose: str, low: float, high: float) -> float:
        """One uniform draw from the stream addressed by ``purpose``."""
        return float(self.stream(realization, purpose).uniform(low, high))


@dataclass(frozen=True)
class DisorderSpec:
    """Uniform interval [mean - half_width, mean + half_width]."""

    mean: float
    half_width: float = 0.0

    def __post_init__(self):
        if self.half_width < 0:
            raise ValueError("half_width must be nonnegative")

    @property
    def low(self) -> float:
        return self.mean - self.half_width

    @property
    def high(self) -> float:
        return self.mean + self.half_width

    def draw(self, plan: SeedPlan, realization: int, purpose: str) -> float:
        if self.half_width == 0.0:
            return self.mean
        return plan.value(realization, purpose, self.low, self.high)


def sample_uniform(spec: DisorderSpec, stream: np.random.Generator) -> float:
    """Uniform draw on [mean - half_width, mean + half_width]."""
    if spec.half_width == 0.0:
        return spec.mean
    return float(stream.uniform(spec.low, spec.high))


def sample_error_fraction(
    stream: np.random.Generator,
    low: float,
    high: float,
    signed: bool = True,
) -> float:
    """Fractional error with magnitude in [low, high].

    With ``signed`` the sign is an independent fair coin, so (a, a)
    yields exactly +-a.  The magnitude is drawn before the sign.
    """
    magnitude = float(stream.uniform(low, high))
    if signed:
        if stream.random() < 0.5:
            magnitude = -magnitude
    return magnitude


@dataclass(frozen=True)
class TemporalNoise:
    """Fresh per-gate angle jitter, as fractional half-widths.

    ``single_error`` scales every single-qubit rotation angle by
    (1 + eps), |eps| <= single_error; ``iswap_error`` does the same for
    iSWAP angles.  Requires the native-iswap lowering level.
    """

    single_error: float = 0.0
    iswap_error: float = 0.0

    def __post_init__(self):
        if self.single_error < 0 or self.iswap_error < 0:
            raise ValueError("noise half-widths must be nonnegative")

    @property
    def active(self) -> bool:
        return self.single_error > 0.0 or self.iswap_error > 0.0


@dataclass(frozen=True)
class ModelDisorder:
    """Per-family randomness of one experiment.

    Ising couplings always come from explicit intervals, one spec per
    chain.  Gate angles come either from explicit intervals (``x_spec``,
    ``cnot_spec``, optional ``scale_spec``) or, when ``error_fraction``
    is set, from ideal values scaled by (1 + eps) with |eps| drawn from
    the given [low, high] interval, independently per parameter.
    """

    model: str
    layout: ChainLayout
    coupling_specs: tuple[DisorderSpec, ...]
    x_spec: DisorderSpec | None = None
    cnot_spec: DisorderSpec | None = None
    scale_spec: DisorderSpec | None = None
    z_spec: DisorderSpec | None = None
    error_fraction: tuple[float, float] | None = None
    error_signed: bool = True
    alpha: float = 1.5

    def __post_init__(self):
        if len(self.coupling_specs) != self.layout.n_chains:
            raise ValueError("need one coupling spec per chain")
        if self.error_fraction is not None:
            low, high = self.error_fraction
            if not 0 <= low <= high:
                raise ValueError("error fraction interval must satisfy 0 <= low <= high")
            if self.x_spec is not None or self.cnot_spec is not None:
                raise ValueError(
                    "error-fraction mode and explicit gate intervals are exclusive"
                )


def _n_cnot_layers(model: str) -> int:
    return {"u4": 1, "u4lr": 1, "u8": 1, "u3": 3}.get(model, 0)


def _n_scale_layers(model: str, n_chains: int) -> int:
    if model == "u8":
        return 1
    if model == "u2n":
        return n_chains - 1
    return 0


def sample_model_params(
    disorder: ModelDisorder, plan: SeedPlan, realization: int
) -> ModelParams:
    """Draw one realization of every model parameter."""
    layout = disorder.layout
    model = disorder.model
    sites = layout.sites

    def fraction(purpose: str) -> float:
        low, high = disorder.error_fraction
        return sample_error_fraction(
            plan.stream(realization, purpose), low, high, disorder.error_signed
        )

    couplings = np.zeros((layout.n_chains, sites - 1))
    for c, spec in enumerate(disorder.coupling_specs):
        for b in range(sites - 1):
            couplings[c][b] = spec.draw(plan, realization, f"J/c{c}/b{b}")

    long_range = None
    if model == "u4lr":
        long_range = np.zeros((layout.n_chains, sites, sites))
        for c, spec in enumerate(disorder.coupling_specs):
            for j in range(1, sites):
                for k in range(j):
                    long_range[c][j][k] = spec.draw(
                        plan, realization, f"lr/c{c}/j{j}/k{k}"
                    )

    x_field = np.empty(sites)
    for j in range(sites):
        if disorder.error_fraction is not None:
            x_field[j] = IDEAL_X * (1.0 + fraction(f"h/s{j}"))
        elif disorder.x_spec is not None:
            x_field[j] = disorder.x_spec.draw(plan, realization, f"h/s{j}")
        else:
            x_field[j] = IDEAL_X

    z_field = None
    if disorder.z_spec is not None:
        z_field = np.array(
            [
                disorder.z_spec.draw(plan, realization, f"hz/s{j}")
                for j in range(sites)
            ]
        )

    cnots = []
    for i in range(_n_cnot_layers(model)):
        comps = {}
        for comp in ("zx", "z", "x"):
            values = np.empty(sites)
            for j in range(sites):
                purpose = f"cnot{i}/{comp}/s{j}"
                if disorder.error_fraction is not None:
                    values[j] = CNOT_SIGNS[comp] * IDEAL_ZX * (1.0 + fraction(purpose))
                elif disorder.cnot_spec is not None:
                    values[j] = CNOT_SIGNS[comp] * disorder.cnot_spec.draw(
                        plan, realization, purpose
                    )
                else:
                    values[j] = CNOT_SIGNS[comp] * IDEAL_ZX
            comps[comp] = values
        cnots.append(CnotParams(**comps))

    scales = []
    for i in range(_n_scale_layers(model, layout.n_chains)):
        values = np.empty(sites)
        for j in range(sites):
            purpose = f"scale{i}/s{j}"
            if disorder.error_fraction is not None:
                values[j] = 1.0 + fraction(purpose)
            elif disorder.scale_spec is not None:
                values[j] = disorder.scale_spec.draw(plan, realization, purpose)
            else:
                values[j] = 1.0
        scales.append(values)

    return ModelParams(
        couplings=couplings,
        x_field=x_field,
        z_field=z_field,
        cnots=tuple(cnots),
        scales=tuple(scales),
        long_range=long_range,
        alpha=disorder.alpha,
    )


def sample_init_jitter(
    plan: SeedPlan, realization: int, n_qubits: int, half_width: float
) -> np.ndarray:
    """Per-qubit fractional offsets for the initial tilt angles."""
    if half_width == 0.0:
        return np.zeros(n_qubits)
    return np.array(
        [
            plan.value(realization, f"init/q{q}", -half_width, half_width)
            for q in range(n_qubits)
        ]
    )
