"""Floquet operators for repetition-code time crystals.

A model is a product of layers applied once per driving period: an Ising
stabilizer layer exp(+i sum J ZZ), a transversal X drive on the first
chain, and transversal controlled-NOT-type couplings between chains.
Layers are stored in application order (the layer written rightmost in
operator notation comes first).  Every rotation uses the exp(-i*theta*P)
convention, so the stabilizer layer carries angles -J.

Registered models:

* ``u4``   two chains, period-4 logical cycle
* ``u4lr`` two chains with power-law long-range stabilizer couplings
* ``u3``   three chains driven by three CNOTs, period-3 logical cycles
* ``u8``   three chains with a CCNOT on top, period-8 logical cycle
* ``u2n``  n chains with the full generalized-CNOT ladder, period 2**n
* ``2t``   single-chain reference model with longitudinal fields
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .pauli import PauliRotation, PauliString, all_commute

MODELS = ("u4", "u4lr", "u3", "u8", "u2n", "2t")


@dataclass(frozen=True)
class ChainLayout:
    """n_chains open chains of ``sites`` qubits each.

    Qubit index of (chain c, site j), both zero-based, is c*sites + j.
    Adjacency means neighboring sites on one chain or the same site on
    neighboring chains.
    """

    n_chains: int
    sites: int

    def __post_init__(self):
        if self.n_chains < 1 or self.sites < 1:
            raise ValueError("layout needs at least one chain and one site")

    @property
    def n_qubits(self) -> int:
        return self.n_chains * self.sites

    def qubit(self, chain: int, site: int) -> int:
        if not 0 <= chain < self.n_chains:
            raise ValueError(f"chain {chain} out of range")
        if not 0 <= site < self.sites:
            raise ValueError(f"site {site} out of range")
        return chain * self.sites + site

    def chain_site(self, qubit: int) -> tuple[int, int]:
        if not 0 <= qubit < self.n_qubits:
            raise ValueError(f"qubit {qubit} out of range")
        return divmod(qubit, self.sites)

    def adjacent(self, qubit_a: int, qubit_b: int) -> bool:
        ca, ja = self.chain_site(qubit_a)
        cb, jb = self.chain_site(qubit_b)
        if ca == cb:
            return abs(ja - jb) == 1
        if ja == jb:
            return abs(ca - cb) == 1
        return False


def logical_basis_index(layout: ChainLayout, j: int) -> int:
    """Basis index of the logical product state |j-bar>.

    Bit k of j selects whether chain k sits in all-ones or all-zeros.
    """
    if not 0 <= j < (1 << layout.n_chains):
        raise ValueError(f"logical label {j} out of range")
    index = 0
    ones = (1 << layout.sites) - 1
    for chain in range(layout.n_chains):
        if (j >> chain) & 1:
            index |= ones << (chain * layout.sites)
    return index


@dataclass(frozen=True)
class CnotParams:
    """Per-site angles of one transversal CNOT layer.

    ``zx`` couples Z(control) X(target); ``z`` and ``x`` are the local
    compensating fields.  Ideal values are +pi/4, -pi/4, -pi/4.
    """

    zx: np.ndarray
    z: np.ndarray
    x: np.ndarray


@dataclass(frozen=True)
class ModelParams:
    """Disorder-resolved parameters of one Floquet operator.

    couplings[c][b] is the Ising coupling on bond b of chain c.  The
    optional blocks are consumed by the models that need them: x_field
    by every model, z_field by ``2t``, cnots by the CNOT layers in
    application order, scales by CCNOT/generalized layers in application
    order, long_range (with exponent alpha) by ``u4lr``.
    """

    couplings: np.ndarray
    x_field: np.ndarray
    z_field: np.ndarray | None = None
    cnots: tuple[CnotParams, ...] = ()
    scales: tuple[np.ndarray, ...] = ()
    long_range: np.ndarray | None = None
    alpha: float = 1.5


@dataclass(frozen=True)
class Layer:
    """One internally commuting slice of the period.

    ``phase`` records scalar factors from identity terms that are never
    applied to the state.  ``meta`` keeps enough structure (chain roles,
    per-site scales) for the compiler to re-derive gadget lowerings.
    """

    name: str
    kind: str
    rotations: tuple[PauliRotation, ...]
    phase: complex = 1.0 + 0j
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        assert all_commute(self.rotations), (
            f"layer {self.name!r} contains non-commuting rotations"
        )


@dataclass(frozen=True)
class FloquetProgram:
    """One driving period as an ordered tuple of layers."""

    layout: ChainLayout
    model: str
    layers: tuple[Layer, ...]

    @property
    def n_qubits(self) -> int:
        return self.layout.n_qubits

    @property
    def global_phase(self) -> complex:
        phase = 1.0 + 0j
        for layer in self.layers:
            phase *= layer.phase
        return phase

    def all_rotations(self) -> Iterator[PauliRotation]:
        for layer in self.layers:
            yield from layer.rotations

    def apply_to(self, state) -> None:
        """Apply one full period in place."""
        for rot in self.all_rotations():
            state.apply_rotation(rot)

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "chains": self.layout.n_chains,
            "sites": self.layout.sites,
            "global_phase": [self.global_phase.real, self.global_phase.imag],
            "layers": [
                {
                    "name": layer.name,
                    "kind": layer.kind,
                    "phase": [layer.phase.real, layer.phase.imag],
                    "rotations": [
                        {"angle": float(r.angle), "pauli": str(r.pauli)}
                        for r in layer.rotations
                    ],
                }
                for layer in self.layers
            ],
        }


# -- layer builders --------------------------------------------------------


def build_h_rep_layer(layout: ChainLayout, couplings: np.ndarray) -> Layer:
    """exp(+i sum_{c,b} J[c][b] Z Z) over nearest-neighbor bonds."""
    couplings = np.asarray(couplings, dtype=float)
    if couplings.shape != (layout.n_chains, layout.sites - 1):
        raise ValueError("couplings must have shape (n_chains, sites-1)")
    n = layout.n_qubits
    rotations = []
    for c in range(layout.n_chains):
        for b in range(layout.sites - 1):
            pauli = PauliString.from_ops(
                n, {layout.qubit(c, b): "Z", layout.qubit(c, b + 1): "Z"}
            )
            rotations.append(PauliRotation(pauli, -float(couplings[c][b])))
    return Layer("stabilizer", "stabilizer", tuple(rotations))


def build_long_range_stabilizer_layer(
    layout: ChainLayout, couplings: np.ndarray, alpha: float = 1.5
) -> Layer:
    """exp(-i sum_{c, j>k} J[c][j][k] Z_j Z_k / |j-k|**alpha)."""
    couplings = np.asarray(couplings, dtype=float)
    if couplings.shape != (layout.n_chains, layout.sites, layout.sites):
        raise ValueError("long-range couplings must have shape (n_chains, N, N)")
    n = layout.n_qubits
    rotations = []
    for c in range(layout.n_chains):
        for j in range(1, layout.sites):
            for k in range(j):
                strength = float(couplings[c][j][k]) / abs(j - k) ** alpha
                pauli = PauliString.from_ops(
                    n, {layout.qubit(c, j): "Z", layout.qubit(c, k): "Z"}
                )
                rotations.append(PauliRotation(pauli, strength))
    return Layer("stabilizer-lr", "stabilizer-lr", tuple(rotations))


def build_logical_x_layer(
    layout: ChainLayout, x_field: np.ndarray, chain: int = 0
) -> Layer:
    """exp(-i sum_j h[j] X_j) on one chain; h = pi/2 realizes logical X."""
    x_field = np.asarray(x_field, dtype=float)
    if x_field.shape != (layout.sites,):
        raise ValueError("x_field must have one angle per site")
    n = layout.n_qubits
    rotations = tuple(
        PauliRotation(
            PauliString.from_ops(n, {layout.qubit(chain, j): "X"}),
            float(x_field[j]),
        )
        for j in range(layout.sites)
    )
    return Layer("drive-x", "x", rotations, meta={"chain": chain})


def build_transversal_cnot_layer(
    layout: ChainLayout, control: int, target: int, params: CnotParams
) -> Layer:
    """Sitewise exp(-i [zx Z_c X_t + z Z_c + x X_t]).

    At the ideal angles (+pi/4, -pi/4, -pi/4) each site enacts a CNOT
    (Z-basis control, X-flip target) up to a global phase.
    """
    for arr in (params.zx, params.z, params.x):
        if np.asarray(arr).shape != (layout.sites,):
            raise ValueError("CNOT parameter arrays must have one entry per site")
    if control == target:
        raise ValueError("control and target chains must differ")
    n = layout.n_qubits
    rotations = []
    for j in range(layout.sites):
        qc, qt = layout.qubit(control, j), layout.qubit(target, j)
        rotations.append(
            PauliRotation(
                PauliString.from_ops(n, {qc: "Z", qt: "X"}), float(params.zx[j])
            )
        )
        rotations.append(
            PauliRotation(PauliString.from_ops(n, {qc: "Z"}), float(params.z[j]))
        )
        rotations.append(
            PauliRotation(PauliString.from_ops(n, {qt: "X"}), float(params.x[j]))
        )
    return Layer(
        f"cnot-{control}-{target}",
        "cnot",
        tuple(rotations),
        meta={"control": control, "target": target},
    )


# (sign, control letters applied, X on target?) for the 7 non-identity
# terms of (1 - Z_a)(1 - Z_b)(1 - X_t).
_CCNOT_TERMS = (
    (-1, ("a",), False),
    (-1, ("b",), False),
    (-1, (), True),
    (+1, ("a", "b"), False),
    (+1, ("a",), True),
    (+1, ("b",), True),
    (-1, ("a", "b"), True),
)


def build_transversal_ccnot_layer(
    layout: ChainLayout,
    control_a: int,
    control_b: int,
    target: int,
    scales: np.ndarray,
) -> Layer:
    """Sitewise exp(-i g (pi/8) (1 - Z_a)(1 - Z_b)(1 - X_t)).

    The expansion has eight Pauli terms; the identity term only
    contributes the recorded layer phase exp(-i g pi/8) per site.
    """
    scales = np.asarray(scales, dtype=float)
    if scales.shape != (layout.sites,):
        raise ValueError("scales must have one entry per site")
    if len({control_a, control_b, target}) != 3:
        raise ValueError("CCNOT chains must be distinct")
    n = layout.n_qubits
    rotations = []
    phase = 1.0 + 0j
    for j in range(layout.sites):
        base = float(scales[j]) * math.pi / 8
        qubit_of = {
            "a": layout.qubit(control_a, j),
            "b": layout.qubit(control_b, j),
        }
        qt = layout.qubit(target, j)
        phase *= complex(math.cos(base), -math.sin(base))
        for sign, controls, has_x in _CCNOT_TERMS:
            ops = {qubit_of[c]: "Z" for c in controls}
            if has_x:
                ops[qt] = "X"
            rotations.append(
                PauliRotation(PauliString.from_ops(n, ops), sign * base)
            )
    return Layer(
        f"ccnot-{control_a}{control_b}-{target}",
        "ccnot",
        tuple(rotations),
        phase,
        meta={
            "controls": (control_a, control_b),
            "target": target,
            "scales": scales,
        },
    )


def build_generalized_cnot_layer(
    layout: ChainLayout,
    controls: Sequence[int],
    target: int,
    scales: np.ndarray,
) -> Layer:
    """Sitewise exp(-i g (pi/2**(j+1)) prod_c (1 - Z_c) (1 - X_t)).

    j = len(controls).  Expands into 2**(j+1) Pauli terms with signs
    (-1)**(|subset| + x); the identity term is recorded as layer phase.
    """
    scales = np.asarray(scales, dtype=float)
    if scales.shape != (layout.sites,):
        raise ValueError("scales must have one entry per site")
    controls = tuple(controls)
    if len(set(controls)) != len(controls) or target in controls:
        raise ValueError("control and target chains must be distinct")
    j_rank = len(controls)
    if j_rank < 1:
        raise ValueError("need at least one control chain")
    n = layout.n_qubits
    rotations = []
    phase = 1.0 + 0j
    for site in range(layout.sites):
        base = float(scales[site]) * math.pi / 2 ** (j_rank + 1)
        qt = layout.qubit(target, site)
        for r in range(j_rank + 1):
            for subset in itertools.combinations(controls, r):
                for has_x in (False, True):
                    sign = (-1) ** (len(subset) + (1 if has_x else 0))
                    if not subset and not has_x:
                        phase *= complex(math.cos(base), -math.sin(base))
                        continue
                    ops = {layout.qubit(c, site): "Z" for c in subset}
                    if has_x:
                        ops[qt] = "X"
                    rotations.append(
                        PauliRotation(PauliString.from_ops(n, ops), sign * base)
                    )
    return Layer(
        f"c{j_rank}not-{''.join(map(str, controls))}-{target}",
        "generalized",
        tuple(rotations),
        phase,
        meta={"controls": controls, "target": target, "scales": scales},
    )


# -- model assembly ---------------------------------------------------------


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValueError(message)


def build_model(
    model: str, layout: ChainLayout, params: ModelParams
) -> FloquetProgram:
    """Assemble one driving period for a registered model."""
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; choose from {MODELS}")
    layers: list[Layer] = []

    if model == "2t":
        _require(layout.n_chains == 1, "2t model is a single chain")
        couplings = np.asarray(params.couplings, dtype=float)
        stab = list(build_h_rep_layer(layout, couplings).rotations)
        if params.z_field is not None:
            z_field = np.asarray(params.z_field, dtype=float)
            _require(z_field.shape == (layout.sites,), "z_field needs one entry per site")
            n = layout.n_qubits
            for j in range(layout.sites):
                stab.append(
                    PauliRotation(
                        PauliString.from_ops(n, {layout.qubit(0, j): "Z"}),
                        -float(z_field[j]),
                    )
                )
        layers.append(Layer("stabilizer", "stabilizer", tuple(stab)))
        layers.append(build_logical_x_layer(layout, params.x_field))
        return FloquetProgram(layout, model, tuple(layers))

    if model in ("u4", "u4lr"):
        _require(layout.n_chains == 2, f"{model} model needs exactly two chains")
        _require(len(params.cnots) == 1, f"{model} model needs one CNOT parameter set")
        if model == "u4lr":
            _require(params.long_range is not None, "u4lr needs long_range couplings")
            layers.append(
                build_long_range_stabilizer_layer(
                    layout, params.long_range, params.alpha
                )
            )
        else:
            layers.append(build_h_rep_layer(layout, params.couplings))
        layers.append(build_logical_x_layer(layout, params.x_field))
        layers.append(build_transversal_cnot_layer(layout, 0, 1, params.cnots[0]))
        return FloquetProgram(layout, model, tuple(layers))

    if model == "u3":
        _require(layout.n_chains == 3, "u3 model needs exactly three chains")
        _require(len(params.cnots) == 3, "u3 model needs three CNOT parameter sets")
        layers.append(build_h_rep_layer(layout, params.couplings))
        layers.append(build_logical_x_layer(layout, params.x_field))
        # Application order: control 2 -> target 1, then 0 -> 1, then 1 -> 0.
        for (control, target), cp in zip(((2, 1), (0, 1), (1, 0)), params.cnots):
            layers.append(build_transversal_cnot_layer(layout, control, target, cp))
        return FloquetProgram(layout, model, tuple(layers))

    if model == "u8":
        _require(layout.n_chains == 3, "u8 model needs exactly three chains")
        _require(len(params.cnots) == 1, "u8 model needs one CNOT parameter set")
        _require(len(params.scales) == 1, "u8 model needs one CCNOT scale array")
        layers.append(build_h_rep_layer(layout, params.couplings))
        layers.append(build_logical_x_layer(layout, params.x_field))
        layers.append(build_transversal_cnot_layer(layout, 0, 1, params.cnots[0]))
        layers.append(
            build_transversal_ccnot_layer(layout, 0, 1, 2, params.scales[0])
        )
        return FloquetProgram(layout, model, tuple(layers))

    # u2n
    n = layout.n_chains
    _require(n >= 2, "u2n model needs at least two chains")
    _require(
        len(params.scales) == n - 1,
        "u2n model needs one scale array per generalized layer",
    )
    layers.append(build_h_rep_layer(layout, params.couplings))
    layers.append(build_logical_x_layer(layout, params.x_field))
    for j in range(1, n):
        layers.append(
            build_generalized_cnot_layer(
                layout, tuple(range(j)), j, params.scales[j - 1]
            )
        )
    return FloquetProgram(layout, model, tuple(layers))


def ideal_model_params(
    model: str,
    layout: ChainLayout,
    couplings: np.ndarray | float = 1.0,
    z_field: np.ndarray | None = None,
    long_range: np.ndarray | None = None,
    alpha: float = 1.5,
) -> ModelParams:
    """ModelParams with ideal gate angles and the given Ising couplings."""
    if np.isscalar(couplings):
        couplings = np.full((layout.n_chains, layout.sites - 1), float(couplings))
    couplings = np.asarray(couplings, dtype=float)
    sites = layout.sites
    x_field = np.full(sites, math.pi / 2)
    quarter = math.pi / 4
    ideal_cnot = CnotParams(
        zx=np.full(sites, quarter),
        z=np.full(sites, -quarter),
        x=np.full(sites, -quarter),
    )
    n_cnots = {"u4": 1, "u4lr": 1, "u8": 1, "u3": 3}.get(model, 0)
    if model == "u8":
        scales: tuple[np.ndarray, ...] = (np.ones(sites),)
    elif model == "u2n":
        scales = tuple(np.ones(sites) for _ in range(layout.n_chains - 1))
    else:
        scales = ()
    return ModelParams(
        couplings=couplings,
        x_field=x_field,
        z_field=z_field,
        cnots=tuple(ideal_cnot for _ in range(n_cnots)),
        scales=scales,
        long_range=long_range,
        alpha=alpha,
    )


def model_period(model: str, n_chains: int) -> int:
    """Subharmonic period in driving cycles of the ideal logical dynamics."""
    if model == "u3":
        return 3
    if model == "2t":
        return 2
    if model in ("u4", "u4lr"):
        return 4
    if model == "u8":
        return 8
    return 2**n_chains


def default_targets(model: str, n_chains: int) -> tuple[float, ...]:
    """Spectral bins of the subharmonic response: 2*pi/period and its mirror."""
    period = model_period(model, n_chains)
    omega = 2 * math.pi / period
    mirror = 2 * math.pi - omega
    if abs(mirror - omega) < 1e-12:
        return (omega,)
    return (omega, mirror)


def readout_chain(model: str, n_chains: int) -> int | None:
    """Chain whose magnetization isolates the slowest subharmonic.

    Under the decrement action chain k flips with period 2^(k+1), so the
    full average of a counter model mixes every harmonic and the fastest
    chain dominates it.  The last chain's own series is antiperiodic
    under a half-period shift, which cancels all faster lines exactly
    and leaves the 2^n T response on top.  For u3 no chain is fast (one
    register never flips, the other two share the 3T line), and for 2t
    there is only one chain; both read out the plain average (None).
    """
    if model in ("u4", "u4lr"):
        return 1
    if model == "u8":
        return 2
    if model == "u2n":
        return n_chains - 1
    return None
