"""Write the STO-6G water active-space qubit Hamiltonian in the forge text format.

Seven spatial orbitals; orbitals 0 (O 1s) and 4 (out-of-plane O 2p) are frozen
doubly occupied, leaving five active orbitals and three electrons per spin.
Jordan-Wigner: spin-up orbital p on qubit p, spin-down on qubit 5 + p, and the
leftmost Pauli letter is qubit 0.

usage: python3 tools/water_hamiltonian.py [out.ham] [bond_angstrom] [angle_deg]
"""

import sys
from collections import defaultdict

import numpy as np
from pyscf import ao2mo, gto, mcscf, scf

FROZEN = [0, 4]
ACTIVE = [1, 2, 3, 5, 6]
# Orbital signs are arbitrary, but hop angles are not invariant under them.
# Negating orbital 2 (the occupied b2 orbital) relative to the SCF output puts
# the orbitals in the phase convention of the shipped hop-angle table; it was
# picked by scanning all sign choices of the active orbitals.
PHASE_FLIPS = [2]
N = len(ACTIVE)


def molecule(r, theta):
    half = np.radians(theta) / 2
    geom = [
        ("O", (0.0, 0.0, 0.0)),
        ("H", (r * np.sin(half), 0.0, r * np.cos(half))),
        ("H", (-r * np.sin(half), 0.0, r * np.cos(half))),
    ]
    return gto.M(atom=geom, basis="sto-6g", unit="angstrom", verbose=0)


def active_integrals(mol):
    mf = scf.RHF(mol).run()
    c = mf.mo_coeff.copy()
    c[:, PHASE_FLIPS] *= -1
    h_ao = mf.get_hcore()
    eri = ao2mo.restore(1, ao2mo.kernel(mol, c), c.shape[1])
    h = c.T @ h_ao @ c
    core = mol.energy_nuc()
    for i in FROZEN:
        core += 2 * h[i, i]
        for j in FROZEN:
            core += 2 * eri[i, i, j, j] - eri[i, j, j, i]
    h_eff = h.copy()
    for i in FROZEN:
        h_eff += 2 * eri[:, :, i, i] - eri[:, i, i, :]
    a = np.ix_(ACTIVE, ACTIVE)
    g = eri[np.ix_(ACTIVE, ACTIVE, ACTIVE, ACTIVE)]
    cas = mcscf.CASCI(mf, N, 6)
    cas.frozen = FROZEN
    cas.verbose = 0
    e_cas = cas.kernel(mo_coeff=c[:, FROZEN + ACTIVE])[0]
    return core, h_eff[a], g, float(mf.e_tot), float(e_cas)


# A Pauli operator is a dict from letter tuples to complex coefficients.
MUL = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}


def multiply(a, b):
    out = defaultdict(complex)
    for pa, ca in a.items():
        for pb, cb in b.items():
            phase, letters = 1, []
            for x, y in zip(pa, pb):
                f, l = MUL[(x, y)]
                phase *= f
                letters.append(l)
            out[tuple(letters)] += ca * cb * phase
    return out


def ladder(j, dagger, nq):
    z = ["Z"] * j + ["I"] * (nq - j)
    x, y = list(z), list(z)
    x[j], y[j] = "X", "Y"
    s = -0.5j if dagger else 0.5j
    return {tuple(x): 0.5, tuple(y): s}


def qubit_hamiltonian(core, h, g):
    nq = 2 * N
    up = [ladder(q, True, nq) for q in range(nq)]
    dn = [ladder(q, False, nq) for q in range(nq)]
    total = defaultdict(complex)
    total[tuple("I" * nq)] += core

    def so(p, s):
        return p + s * N

    for s in (0, 1):
        for p in range(N):
            for q in range(N):
                if abs(h[p, q]) > 1e-14:
                    for k, v in multiply(up[so(p, s)], dn[so(q, s)]).items():
                        total[k] += h[p, q] * v
    for s in (0, 1):
        for t in (0, 1):
            for p in range(N):
                for q in range(N):
                    for r in range(N):
                        for w in range(N):
                            v = 0.5 * g[p, q, r, w]
                            if abs(v) < 1e-14 or (s == t and (p == r)):
                                continue
                            op = multiply(multiply(up[so(p, s)], up[so(r, t)]), multiply(dn[so(w, t)], dn[so(q, s)]))
                            for k, c in op.items():
                                total[k] += v * c
    return {k: c for k, c in total.items() if abs(c) > 1e-12}


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "water_sto6g.ham"
    r = float(sys.argv[2]) if len(sys.argv) > 2 else 0.958
    theta = float(sys.argv[3]) if len(sys.argv) > 3 else 104.478
    core, h, g, e_hf, e_cas = active_integrals(molecule(r, theta))
    terms = qubit_hamiltonian(core, h, g)
    assert all(abs(c.imag) < 1e-10 for c in terms.values())
    lines = [(float(c.real), "".join(k)) for k, c in sorted(terms.items())]
    checksum = float(sum(abs(c) for c, _ in lines))
    with open(out, "w") as f:
        f.write(f"# STO-6G water, O-H {r} angstrom, H-O-H {theta} degrees; RHF energy {e_hf!r}\n")
        f.write(f"# CASCI(6e, 5o) energy from pyscf: {e_cas!r}\n")
        f.write(f"# orbital phase flips: {PHASE_FLIPS}\n")
        f.write("qubits 10 partition 5\n")
        f.write(f"manifest terms {len(lines)} checksum {checksum!r}\n")
        for c, p in lines:
            f.write(f"{c!r} {p}\n")
    print(f"{len(lines)} terms, HF {e_hf}, CASCI {e_cas}")


if __name__ == "__main__":
    main()
