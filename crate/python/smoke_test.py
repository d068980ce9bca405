"""Smoke test for the riverkron Python module.

Build and install first:  pip install --no-build-isolation -e crates/python
"""

import json
import math
import tempfile
from pathlib import Path

import riverkron


def close(a, b, tol):
    scale = max([1.0] + [abs(v) for v in a] + [abs(v) for v in b])
    return all(abs(x - y) <= tol * scale for x, y in zip(a, b))


def main():
    assert riverkron.evaluate7("AsAh", "2c7d9hJc3s")[0] == 1
    assert riverkron.gamma("AsAh", "KsKh", "2c7d9hJc3s") == 1
    assert riverkron.gamma("KsKh", "AsAh", "2c7d9hJc3s") == -1
    try:
        riverkron.gamma("Zx2c", "KsKh", "2c7d9hJc3s")
        raise AssertionError("bad card accepted")
    except ValueError as e:
        assert str(e).startswith("E_UNKNOWN_CARD"), e

    inst = riverkron.Instance.load("fig1")
    assert inst.num_sequences(1) == 16 and inst.num_sequences(2) == 16
    assert inst.initial_pot == 3750.0
    again = riverkron.Instance.from_json(inst.to_json())
    assert again.hands(1) == inst.hands(1)
    assert json.loads(inst.to_json())["schema_version"] == 1

    dense = inst.dense()
    x = [math.sin(i + 1.0) for i in range(inst.dim(2))]
    y = [math.cos(i + 1.0) for i in range(inst.dim(1))]
    ax = [sum(r * v for r, v in zip(row, x)) for row in dense]
    aty = [sum(dense[i][j] * y[i] for i in range(len(dense))) for j in range(len(x))]
    for technique in ("a", "b"):
        s = inst.sparsify(technique)
        assert s.size()["total"] < inst.dense_nnz()
        assert close(s.matvec(x), ax, 1e-9)
        assert close(s.matvec_transpose(y), aty, 1e-9)
        with tempfile.TemporaryDirectory() as d:
            s.save(Path(d))
            back = riverkron.Sparsification.load(Path(d))
            assert back.size() == s.size() and back.technique == technique

    result = riverkron.solve(inst, iters=1000)
    lo, hi = result["value_bounds"]
    assert lo <= hi + 1e-9
    assert result["trace"][-1][2] < result["trace"][0][2]
    assert result["exploitability"] < 0.01

    bluff = riverkron.Instance.load("bluff")
    det, xdet = riverkron.deterministic(bluff, 1)
    mixed = riverkron.solve(bluff, iters=20000)["value_bounds"][0]
    pod = riverkron.price_of_determinism(max(mixed, det), det, bluff.initial_pot)
    assert abs(pod - 0.25) < 1e-6, pod
    assert set(xdet) <= {0.0, 1.0}

    with tempfile.TemporaryDirectory() as d:
        stats = riverkron.export_lp(inst, Path(d) / "p1.lp", 1, None)
        sparse = riverkron.export_lp(inst, Path(d) / "p1s.lp", 1, "b")
        milp = riverkron.export_lp(inst, Path(d) / "p1.milp.lp", 1, "b", milp=True)
        assert "Binaries" in (Path(d) / "p1.milp.lp").read_text()
        assert milp["binaries"] == inst.dim(1) + 1
        print("lp nonzeros:", stats["nonzeros"], "sparsified:", sparse["nonzeros"])

    print("riverkron smoke test passed")


if __name__ == "__main__":
    main()
