"""Full-circuit equivalence of sequential simulation and the permanent oracle."""

import itertools

import numpy as np

from fockgate.fock import H, V, Mode, PureState
from fockgate.elements import amplitude_via_permanent
from fockgate.gate import circuit_matrix, default_netlist, run_elements


def all_occupations(n_modes, n_photons):
    for cuts in itertools.combinations(range(n_modes + n_photons - 1), n_modes - 1):
        vec = []
        prev = -1
        for c in cuts:
            vec.append(c - prev - 1)
            prev = c
        vec.append(n_modes + n_photons - 2 - prev)
        yield tuple(vec)


def test_full_netlist_matches_permanent_oracle_on_all_inputs():
    netlist = default_netlist()
    unitary = circuit_matrix(netlist)
    modes = list(netlist.modes)
    assert len(modes) == 12

    enc = netlist.encoding
    choices = (None, H, V)
    worst = 0.0
    compared = 0
    for t, c, p in itertools.product(choices, repeat=3):
        vec = [0] * len(modes)
        for port, pol in ((enc.target, t), (enc.control, c), (enc.program, p)):
            if pol is not None:
                vec[modes.index(Mode(port, pol))] = 1
        in_vec = tuple(vec)
        out = run_elements(netlist, PureState(modes, {in_vec: 1.0}))
        seq = dict(out.items())
        for out_vec in all_occupations(len(modes), sum(in_vec)):
            oracle = amplitude_via_permanent(unitary, in_vec, out_vec)
            worst = max(worst, abs(seq.get(out_vec, 0.0) - oracle))
            compared += 1
    assert compared > 1000
    assert worst < 1e-10


def test_circuit_matrix_is_unitary():
    unitary = circuit_matrix(default_netlist())
    dev = np.max(np.abs(unitary @ unitary.conj().T - np.eye(unitary.shape[0])))
    assert dev < 1e-12
