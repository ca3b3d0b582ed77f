"""Heralded programmable-CPHASE circuit: netlist assembly and gate extraction.

The default netlist implements the three-photon polarization scheme:
the target splits by polarization at PBS1, the upper (H) arm is
attenuated by F1, the lower (V) arm is rotated by HWP1 and interferes
with the control at the PPBS, whose two-photon interference imprints a
pi phase on the lower arm exactly when both qubits are |1>.  The filter
F2 balances the control path, a Hadamard-form plate (HWP2) collapses
the lower arm to H for control |0> and V for control |1>, PBS3 merges
the program photon into the lower arm (its V component) while routing
the lower arm's V to the detector arm, HWP3 mixes the lower arm so its
V portion reflects into T_OUT at PBS2, and the detector measures the
PBS3 side arm in the rotated (+-45 degree) basis.

A successful run heralds on one photon at T_OUT, one at C_OUT and one
detector click; each computational-basis input then heralds with
probability 1/48 and the realized operator is diag(1, 1, 1, e^{i phi}).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import Any, Mapping, Sequence

import numpy as np

from .fock import (
    H,
    V,
    HeraldPattern,
    Mode,
    Polarization,
    PureState,
    modes_for_ports,
    program_state,
    project_herald,
    qubit_state,
    tensor,
)
from .elements import (
    HADAMARD_MATRIX,
    ElementMatrix,
    apply_element,
    attenuating_filter,
    beam_splitter,
    compose_circuit_matrix,
    partially_polarizing_beam_splitter,
    perturbed_pbs,
    phase_shift,
    polarizing_beam_splitter,
    wave_plate,
)

SQ3 = math.sqrt(3.0)

PORT_ROLES = ("input", "output", "io", "internal", "loss", "detector", "program")

ELEMENT_KINDS = (
    "pbs",
    "ppbs",
    "beamsplitter",
    "filter",
    "waveplate",
    "phaseshift",
    "detector",
    "dump",
)


class NetlistError(ValueError):
    """Raised when a netlist fails validation."""


@dataclass(frozen=True)
class PortDecl:
    name: str
    role: str = "internal"

    def __post_init__(self):
        if self.role not in PORT_ROLES:
            raise NetlistError(f"unknown port role {self.role!r} for {self.name!r}")


@dataclass(frozen=True)
class ElementSpec:
    """One circuit element as data: kind, wired ports, kind-specific params."""

    name: str
    kind: str
    ports: tuple[str, ...]
    params: tuple[tuple[str, Any], ...] = ()

    def __post_init__(self):
        if self.kind not in ELEMENT_KINDS:
            raise NetlistError(f"unknown element kind {self.kind!r} ({self.name})")

    @property
    def param_dict(self) -> dict[str, Any]:
        return dict(self.params)

    def with_params(self, **updates: Any) -> "ElementSpec":
        merged = dict(self.params)
        merged.update(updates)
        return replace(self, params=tuple(sorted(merged.items())))


def spec(name: str, kind: str, ports: Sequence[str], **params: Any) -> ElementSpec:
    return ElementSpec(name, kind, tuple(ports), tuple(sorted(params.items())))


@dataclass(frozen=True)
class HeraldTerm:
    """Exact-count condition: `count` photons total over ports x pols."""

    ports: tuple[str, ...]
    pols: tuple[Polarization, ...]
    count: int


@dataclass(frozen=True)
class QubitEncoding:
    target: str
    control: str
    program: str


@dataclass(frozen=True)
class Netlist:
    ports: tuple[PortDecl, ...]
    elements: tuple[ElementSpec, ...]
    herald: tuple[HeraldTerm, ...]
    encoding: QubitEncoding

    def __post_init__(self):
        self.validate()

    # -- structure ---------------------------------------------------------

    @property
    def port_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.ports)

    @property
    def modes(self) -> tuple[Mode, ...]:
        """Canonical mode ordering: declared port order, H before V."""
        return modes_for_ports(self.port_names)

    def element(self, name: str) -> ElementSpec:
        for el in self.elements:
            if el.name == name:
                return el
        raise KeyError(f"no element named {name!r}")

    def validate(self) -> None:
        names = self.port_names
        if len(set(names)) != len(names):
            raise NetlistError("duplicate port declarations")
        seen = set()
        for el in self.elements:
            if el.name in seen:
                raise NetlistError(f"duplicate element name {el.name!r}")
            seen.add(el.name)
            if len(set(el.ports)) != len(el.ports):
                raise NetlistError(f"element {el.name!r} wires a port twice")
            for p in el.ports:
                if p not in names:
                    raise NetlistError(
                        f"element {el.name!r} wired to undeclared port {p!r}"
                    )
        if not self.herald:
            raise NetlistError("herald pattern is empty")
        for term in self.herald:
            for p in term.ports:
                if p not in names:
                    raise NetlistError(f"herald references unknown port {p!r}")
            if term.count < 0:
                raise NetlistError("herald count must be non-negative")
        for qport in (self.encoding.target, self.encoding.control, self.encoding.program):
            if qport not in names:
                raise NetlistError(f"encoding references unknown port {qport!r}")
        if len({self.encoding.target, self.encoding.control, self.encoding.program}) != 3:
            raise NetlistError("target, control and program ports must be distinct")

    # -- realization -------------------------------------------------------

    def build_matrices(self) -> list[ElementMatrix]:
        """Element matrices in application order (detector basis rotation included)."""
        out = []
        for el in self.elements:
            m = build_element(el)
            if m is not None:
                out.append(m)
        return out

    def herald_pattern(self) -> HeraldPattern:
        modes = self.modes
        constraints = []
        for term in self.herald:
            subset = [
                Mode(p, pol) for p in term.ports for pol in term.pols
            ]
            constraints.append((subset, term.count))
        return HeraldPattern.on_modes(modes, constraints)

    def with_overrides(self, overrides: Mapping[str, ElementSpec]) -> "Netlist":
        """Replace named elements (used to inject imperfect devices)."""
        for name in overrides:
            self.element(name)  # raises KeyError on unknown name
        new_elements = tuple(
            overrides.get(el.name, el) for el in self.elements
        )
        return replace(self, elements=new_elements)

    def census(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for el in self.elements:
            counts[el.kind] = counts.get(el.kind, 0) + 1
        return counts


def build_element(el: ElementSpec) -> ElementMatrix | None:
    """Realize one ElementSpec as an ElementMatrix (None for pure markers)."""
    p = el.param_dict
    if el.kind == "pbs":
        if "theta_h" in p or "theta_v" in p:
            return perturbed_pbs(
                *el.ports,
                theta_h=p.get("theta_h", 0.0),
                theta_v=p.get("theta_v", math.pi / 2.0),
            )
        return polarizing_beam_splitter(*el.ports)
    if el.kind == "ppbs":
        if "theta_h" in p or "theta_v" in p:
            th = p.get("theta_h", 0.0)
            tv = p.get("theta_v", math.acos(p.get("bar_v", 1.0 / SQ3)))
            return beam_splitter(
                *el.ports,
                t_h=math.cos(th),
                r_h=math.sin(th),
                t_v=math.cos(tv),
                r_v=math.sin(tv),
            )
        return partially_polarizing_beam_splitter(
            *el.ports,
            bar_h=p.get("bar_h", 1.0),
            bar_v=p.get("bar_v", 1.0 / SQ3),
        )
    if el.kind == "beamsplitter":
        return beam_splitter(
            *el.ports,
            t_h=p["t_h"],
            r_h=p["r_h"],
            t_v=p.get("t_v"),
            r_v=p.get("r_v"),
        )
    if el.kind == "filter":
        if "theta_h" in p or "theta_v" in p:
            th = p.get("theta_h", math.acos(p["t_h"]))
            tv = p.get("theta_v", math.acos(p["t_v"]))
            return beam_splitter(
                el.ports[0],
                el.ports[1],
                t_h=math.cos(th),
                r_h=math.sin(th),
                t_v=math.cos(tv),
                r_v=math.sin(tv),
            )
        return attenuating_filter(
            el.ports[0], el.ports[1], t_h=p["t_h"], t_v=p["t_v"]
        )
    if el.kind == "waveplate":
        matrix = p.get("matrix")
        if matrix is None:
            matrix = p["preset"]
        else:
            matrix = np.asarray(matrix, dtype=complex)
        return wave_plate(el.ports[0], matrix)
    if el.kind == "phaseshift":
        return phase_shift(
            el.ports[0], phase_h=p.get("phase_h", 0.0), phase_v=p.get("phase_v", 0.0)
        )
    if el.kind == "detector":
        # rotated detectors measure in the +-45 degree basis; the basis
        # change is part of the detector assembly, applied before the
        # heralded projection onto the port's V mode.
        if p.get("rotated", False):
            return wave_plate(el.ports[0], HADAMARD_MATRIX)
        return None
    if el.kind == "dump":
        return None
    raise NetlistError(f"unhandled element kind {el.kind!r}")


def default_netlist() -> Netlist:
    """The shipped reconstruction of the programmable CPHASE circuit."""
    ports = (
        PortDecl("T", "io"),
        PortDecl("L", "internal"),
        PortDecl("C", "io"),
        PortDecl("P", "program"),
        PortDecl("F1_LOSS", "loss"),
        PortDecl("F2_LOSS", "loss"),
    )
    elements = (
        spec("PBS1", "pbs", ("T", "L")),
        spec("F1", "filter", ("T", "F1_LOSS"), t_h=0.5, t_v=0.5),
        spec("HWP1", "waveplate", ("L",), preset="hwp1"),
        spec("PPBS", "ppbs", ("L", "C"), bar_h=1.0, bar_v=1.0 / SQ3),
        spec("F2", "filter", ("C", "F2_LOSS"), t_h=1.0 / SQ3, t_v=1.0),
        spec("HWP2", "waveplate", ("L",), preset="hadamard"),
        spec("PBS3", "pbs", ("L", "P")),
        spec("HWP3", "waveplate", ("L",), preset="hadamard"),
        spec("PBS2", "pbs", ("T", "L")),
        spec("DET", "detector", ("P",), rotated=True),
    )
    herald = (
        HeraldTerm(("T",), (H, V), 1),
        HeraldTerm(("C",), (H, V), 1),
        HeraldTerm(("P",), (V,), 1),
    )
    return Netlist(ports, elements, herald, QubitEncoding("T", "C", "P"))


@dataclass(frozen=True)
class ProgramState:
    """Program qubit (|0> + e^{i phi}|1>)/sqrt(2); phi in radians."""

    phi: float


def prepare_input(
    netlist: Netlist,
    target: tuple[complex, complex],
    control: tuple[complex, complex],
    program: ProgramState,
) -> PureState:
    """Three-photon product input on the netlist's encoded ports.

    target and control are (alpha, beta) with |alpha|^2 + |beta|^2 = 1;
    the program photon is (|H> + e^{i phi}|V>)/sqrt(2).
    """
    enc = netlist.encoding
    t_modes = modes_for_ports([enc.target])
    c_modes = modes_for_ports([enc.control])
    p_modes = modes_for_ports([enc.program])
    st = tensor(
        tensor(
            qubit_state(t_modes, enc.target, target[0], target[1]),
            qubit_state(c_modes, enc.control, control[0], control[1]),
        ),
        program_state(p_modes, enc.program, program.phi),
    )
    return extend_state(st, netlist.modes)


def extend_state(state: PureState, modes: Sequence[Mode]) -> PureState:
    """Re-express a state on a superset mode list (vacuum elsewhere)."""
    modes = list(modes)
    mapping = []
    for m in state.modes:
        if m not in modes:
            raise KeyError(f"mode {m!r} not present in target mode list")
        mapping.append(modes.index(m))
    terms = {}
    for vec, amp in state.items():
        new = [0] * len(modes)
        for src, dst in enumerate(mapping):
            new[dst] = vec[src]
        terms[tuple(new)] = amp
    return PureState(modes, terms, subnormalized=state.subnormalized)


def run_elements(netlist: Netlist, state: PureState) -> PureState:
    for el in netlist.build_matrices():
        state = apply_element(state, el)
    return state


def run_heralded(netlist: Netlist, state: PureState) -> tuple[PureState, float]:
    """Apply all elements in order, then project onto the herald pattern.

    Returns the sub-normalized heralded branch and the herald probability.
    """
    out = run_elements(netlist, state)
    return project_herald(out, netlist.herald_pattern())


BASIS_LABELS = ("00", "01", "10", "11")
_BASIS_AMPLITUDES = {
    "0": (1.0 + 0.0j, 0.0 + 0.0j),
    "1": (0.0 + 0.0j, 1.0 + 0.0j),
}


@dataclass(frozen=True)
class GateResult:
    """Extracted heralded two-qubit operator on (target tensor control).

    operator columns are the unnormalized heralded output amplitudes for
    each basis input, ordered |00>, |01>, |10>, |11>; column norms squared
    equal the herald probabilities.
    """

    operator: np.ndarray
    herald_probability: dict[str, float]
    phi_in: float
    fidelity: float

    @property
    def measured_phase(self) -> float:
        """arg(d33 / d00), the realized controlled phase, in [0, 2pi)."""
        ratio = self.operator[3, 3] / self.operator[0, 0]
        return cmath.phase(ratio) % (2 * math.pi)

    @property
    def max_offdiagonal(self) -> float:
        off = self.operator - np.diag(np.diag(self.operator))
        return float(np.max(np.abs(off)))


def heralded_output_amplitudes(
    netlist: Netlist, branch: PureState
) -> np.ndarray:
    """Amplitudes of the four logical outputs in a heralded branch.

    The heralded branch of a three-photon run has exactly one photon on
    the target port, one on the control port and one in the detector
    mode; the logical output is read from the two output polarizations.
    """
    enc = netlist.encoding
    modes = list(branch.modes)
    det_pol = _detector_pol(netlist)
    idx = {
        "tH": modes.index(Mode(enc.target, H)),
        "tV": modes.index(Mode(enc.target, V)),
        "cH": modes.index(Mode(enc.control, H)),
        "cV": modes.index(Mode(enc.control, V)),
        "det": modes.index(Mode(enc.program, det_pol)),
    }
    out = np.zeros(4, dtype=complex)
    for vec, amp in branch.items():
        t_pol = None
        c_pol = None
        if vec[idx["tH"]] == 1 and vec[idx["tV"]] == 0:
            t_pol = 0
        elif vec[idx["tV"]] == 1 and vec[idx["tH"]] == 0:
            t_pol = 1
        if vec[idx["cH"]] == 1 and vec[idx["cV"]] == 0:
            c_pol = 0
        elif vec[idx["cV"]] == 1 and vec[idx["cH"]] == 0:
            c_pol = 1
        if t_pol is None or c_pol is None or vec[idx["det"]] != 1:
            continue
        out[2 * t_pol + c_pol] += amp
    return out


def _detector_pol(netlist: Netlist) -> Polarization:
    for term in netlist.herald:
        if netlist.encoding.program in term.ports and len(term.pols) == 1:
            return term.pols[0]
    return V


def extract_gate(netlist: Netlist, phi: float) -> GateResult:
    """Run the four computational-basis inputs and assemble the 4x4 operator.

    The simulation is linear in the input state, so the basis columns
    determine the heralded map completely.
    """
    op = np.zeros((4, 4), dtype=complex)
    probs: dict[str, float] = {}
    for col, label in enumerate(BASIS_LABELS):
        target = _BASIS_AMPLITUDES[label[0]]
        control = _BASIS_AMPLITUDES[label[1]]
        state = prepare_input(netlist, target, control, ProgramState(phi))
        branch, prob = run_heralded(netlist, state)
        probs[label] = prob
        op[:, col] = heralded_output_amplitudes(netlist, branch)
    fidelity = process_fidelity(op, ideal_cphase(phi))
    return GateResult(op, probs, phi, fidelity)


def ideal_cphase(phi: float) -> np.ndarray:
    """diag(1, 1, 1, e^{i phi}) on (target tensor control)."""
    return np.diag([1.0, 1.0, 1.0, cmath.exp(1j * phi)]).astype(complex)


def process_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """|Tr(A^dag B)|^2 / (Tr(A^dag A) Tr(B^dag B)); 1 iff A is proportional to B."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    na = float(np.real(np.trace(a.conj().T @ a)))
    nb = float(np.real(np.trace(b.conj().T @ b)))
    if na <= 0.0 or nb <= 0.0:
        raise ValueError("process fidelity is undefined for a zero operator")
    overlap = np.trace(a.conj().T @ b)
    return float(abs(overlap) ** 2 / (na * nb))


def circuit_matrix(netlist: Netlist) -> np.ndarray:
    """Full single-photon mode matrix of the netlist (for the permanent oracle)."""
    return compose_circuit_matrix(netlist.build_matrices(), netlist.modes)
