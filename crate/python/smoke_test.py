"""Smoke test for the tessera Python extension.

Builds the extension with cargo if no compiled library is found, loads it
from a temporary directory and exercises the main entry points.
"""

import importlib.util
import json
import math
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def find_library():
    for profile in ("release", "debug"):
        for name in ("libtessera_py.so", "libtessera_py.dylib", "tessera_py.dll"):
            p = ROOT / "target" / profile / name
            if p.exists():
                return p
    return None


def load():
    lib = find_library()
    if lib is None:
        subprocess.run(
            ["cargo", "build", "--release", "-p", "tessera-py", "--features", "extension-module"],
            cwd=ROOT,
            check=True,
        )
        lib = find_library()
    suffix = ".pyd" if lib.suffix == ".dll" else ".so"
    tmp = pathlib.Path(tempfile.mkdtemp())
    target = tmp / ("tessera" + suffix)
    shutil.copy(lib, target)
    spec = importlib.util.spec_from_file_location("tessera", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main():
    ts = load()

    t = ts.generate("voronoi", {"lambda": 100.0, "window": {"edge_mode": {"mode": "periodic"}}}, seed=7)
    r = t.report()
    assert r["gamma0"] == 2 * r["gamma2"] and r["gamma1"] == 3 * r["gamma2"], r
    assert abs(r["A2"] * r["gamma2"] - 1.0) < 1e-9
    assert len(t) == len(t.cells()) > 0
    assert t.zero_cell(0.5, 0.5) is not None

    back = ts.Realization.from_json(t.to_json())
    assert back.report() == r
    assert back.to_json() == t.to_json()
    assert t.svg().count("<polygon ") == len(t)

    s = ts.generate("stit", json.dumps({"a": 8.0}), seed=3)
    seg = s.segments()
    assert seg["I"] == s.diagnostics["splits"], (seg, s.diagnostics)
    assert s.report()["frac_T"] == 1.0

    o = ts.oracle("pv2", {"lambda": 1.0})
    assert o["A2"] == 1.0 and o["P2"] == 4.0
    assert ts.oracle("gilbert") is None

    lam, per_formula, spread = ts.estimate_lambda(ts.oracle("pdt", {"lambda": 30.0}), "pdt")
    assert abs(lam - 30.0) < 1e-9 and spread < 1e-9 and per_formula

    rows = ts.validate("pv2", {"lambda": 50.0}, reps=20, seed=1)
    assert all(z is None or abs(z) < 5 for (_, _, _, _, z) in rows), rows

    tris = ts.pdt_typical_cells(100.0, n=2000, seed=5)
    mean_area = sum(
        abs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])) / 2 for a, b, c in tris
    ) / len(tris)
    assert abs(mean_area * 200.0 - 1.0) < 0.1, mean_area

    jm = ts.johnson_mehl_mu(4.0, {"kind": "constant", "value": 0.0}, 2, 1)
    assert abs(jm - 2.0 * math.sqrt(4.0)) < 1e-6
    assert abs(ts.voronoi_mu(1.0, 3, 1) - 5.832) < 1e-3

    try:
        ts.generate("voronoi", {"lambda": -1.0})
    except ValueError:
        pass
    else:
        raise AssertionError("negative intensity accepted")

    print("python smoke test: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
