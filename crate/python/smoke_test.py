"""Smoke test for the repgeo_py extension.

Build first with `cargo build -p repgeo-py` (or `--release`); the script
imports an installed `repgeo_py` if there is one and otherwise loads the
library straight from target/.
"""

import importlib.machinery
import importlib.util
import json
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import repgeo_py

        return repgeo_py
    except ImportError:
        pass
    for profile in ("release", "debug"):
        for name in ("librepgeo_py.so", "librepgeo_py.dylib", "repgeo_py.dll"):
            path = ROOT / "target" / profile / name
            if path.exists():
                loader = importlib.machinery.ExtensionFileLoader("repgeo_py", str(path))
                spec = importlib.util.spec_from_loader("repgeo_py", loader)
                module = importlib.util.module_from_spec(spec)
                loader.exec_module(module)
                return module
    sys.exit("repgeo_py not found: run `cargo build -p repgeo-py` first")


def main():
    rg = load()

    assert rg.lyndon_counts(2, 6) == [2, 1, 2, 3, 6, 9]
    assert [rg.witt_number(2, n) for n in range(1, 7)] == [2, 1, 2, 3, 6, 9]

    s = rg.Scalar("1 + sqrt(2)")
    assert s * s.conj() == rg.Scalar("-1")
    assert str(rg.Field("Q(sqrt 2)")) and rg.Field("Q(sqrt 2)").automorphisms() == ["id", "conj"]

    v = rg.Variety("Q(sqrt 2)")
    f = v.free(2, 1)
    assert f.module_dim == 63
    for n1, n2 in [(1, 1), (2, 1), (2, 2), (3, 2)]:
        assert v.free(n1, n2).ibn_invariants() == (n1, n2)

    w = rg.WordSystem("1", "conj")
    assert w.then(w.inverse()).is_identity()
    assert not v.is_inner(w)
    assert v.is_inner(rg.WordSystem("1 + sqrt(2)"))
    assert v.group_order() == 2
    assert rg.Variety("Q").group_order() == 1

    twist = f.twist(rg.WordSystem("2"))
    assert twist.passed, twist.narrative

    inner = v.inner(w)
    cert = inner.certificate_json()
    assert json.loads(cert)["schema"] == "repgeo/certificate"
    assert rg.verify(cert) == "inner certificate"

    c = rg.Variety("Q").closure("x1*v1", "n1 = 1\nn2 = 1\n", n1=1, n2=1)
    assert "is closed" in c.narrative
    c.verify()
    rg.verify(c.certificate_json())

    try:
        rg.Scalar("1 +")
    except ValueError:
        pass
    else:
        raise AssertionError("parse error not raised")

    print("repgeo_py smoke test passed")


if __name__ == "__main__":
    main()
