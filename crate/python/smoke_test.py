#!/usr/bin/env python3
"""Build the extension module and drive its main entry points end to end."""

import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def build_and_import():
    subprocess.run(["cargo", "build", "-p", "koenigslab-py"], cwd=ROOT, check=True)
    debug = ROOT / "target" / "debug"
    for name in ("libkoenigslab.so", "libkoenigslab.dylib", "koenigslab.dll"):
        lib = debug / name
        if lib.exists():
            break
    else:
        sys.exit("extension library not found under target/debug")
    staging = Path(tempfile.mkdtemp(prefix="koenigslab-py-"))
    shutil.copy2(lib, staging / "koenigslab.so")
    sys.path.insert(0, str(staging))


build_and_import()
import koenigslab as kl  # noqa: E402

# Dirichlet convolution: (1 + 2^-s)(1 + 3^-s) = 1 + 2^-s + 3^-s + 6^-s
f = [1, 1, 0, 0, 0, 0, 0, 0]
g = [1, 0, 1, 0, 0, 0, 0, 0]
prod = kl.dmul(f, g)
assert prod == [1, 1, 1, 0, 0, 1, 0, 0], prod

# Conjugacy of the affine symbol 2s + 1 is s + 1
r = kl.koenigs_map(2, [1, 0, 0, 0, 0, 0, 0, 0])
assert r["scheme"] == "recurrence"
assert r["u"]["c0"] == 1
assert r["u"]["psi"]["coeffs"] == [[1, 1.0, 0.0]], r
assert r["residual"] <= 1e-14

# Its commuting companion of characteristic 3 is 3s + 2
comp = kl.companion(2, [1, 0, 0, 0, 0, 0, 0, 0], 3)
assert comp["c0"] == 3
assert comp["psi"]["coeffs"] == [[1, 2.0, 0.0]], comp

# Characteristic >= 2 spectrum is {0, 1}
spec = kl.spectrum(2, [1, 0, 0, 0, 0, 0, 0, 0], m_max=8)
assert spec["class"] == "characteristic_at_least_two"
assert sorted(tuple(p) for p in spec["points"]) == [(0.0, 0.0), (1.0, 0.0)]

# Resolvent at lambda = 2 inverts on a basis vector (checked exactly in the
# Rust suite; here just shape and leading behavior)
res = kl.resolvent(2, [1, 0, 0, 0, 0, 0, 0, 0], 2, [0, 1, 0, 0, 0, 0, 0, 0])
assert len(res) == 8 and res[0] == 0

# Eigenfunction 2^(-u) of s + 2 + 2^-s starts at index 2
eig = kl.eigenfunction(1, [2, 1, 0, 0, 0, 0, 0, 0], 2)
assert eig[0] == 0 and abs(eig[1]) > 0

# Power term support: 3^-(2s+1) sits at 9 with coefficient 1/3
pt = kl.power_term(3, 2, [1, 0, 0, 0, 0, 0, 0, 0, 0])
assert all(abs(z) == 0 for i, z in enumerate(pt) if i != 8)
assert math.isclose(abs(pt[8] - 1 / 3), 0, abs_tol=1e-15), pt[8]

# Superattracting conjugacy of z^2 is z itself
u = kl.boettcher([0, 0, 1, 0, 0], 2, 1)
assert u == [0, 1, 0, 0, 0], u

# Verdicts arrive as dicts with SCREAMING statuses
v = kl.example76(2.5, 0.5)
assert v["status"] == "PASS", v
v = kl.example48(1.0, 0.25)
assert v["status"] == "FAIL", v
v = kl.disc_check(1 / 3, [0, 0.5])
assert v["status"] == "PASS", v

# Shift families round-trip through plain dicts
fam = kl.canonical_family(2, 1, 10, 4)
assert fam["K"] == 4
assert sorted(int(m) for m in fam["blocks"]) == [2, 3, 5, 6, 7, 8, 10]
classes = kl.equivalence_classes(fam, mode="closed-form")
assert classes["classes"] == [[2, 3, 5, 6, 7, 8, 10]]
assert classes["verdict"]["status"] == "PASS"
assert classes["verdict"]["detail"] == "double commutant property holds"

alt = kl.alternating_family(63)
split = kl.equivalence_classes(alt, mode="finite-horizon")
assert split["classes"] == [[1], [2]]
assert split["verdict"]["status"] == "FAIL"

small = kl.canonical_family(2, 1, 3, 6)
ces = kl.cesaro(small, [1e-5, 1e-5 + 1e-5j], l_max=100, tol=1e-6)
assert ces["fejer_bound_ok"] and ces["monotone"] and ces["converged"], ces

com = kl.commutant_blocks(small)
assert com["all_patterned"] and com["total_dimension"] == 4 * 7, com

dc = kl.double_commutant(small, growth_window=4)
assert dc["single_shared_pattern"] and dc["dimension"] == 7, dc

print("smoke test passed: 14 binding checks")
