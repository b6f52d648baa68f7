"""Quick end-to-end check of the Python bindings."""

import json

import weightfn


def main():
    w = weightfn.weight("plus", 3, depth=3)
    r = weightfn.weight_recursive(3, depth=3)
    assert w.equals(r), "closed and recursive forms differ"
    assert w.n == 3 and w.orientation == "plus"
    print(repr(w))

    doc = json.loads(w.to_json())
    assert doc["schema"] == "weight" and doc["n"] == 3

    m = weightfn.weight("minus", 2, depth=2).modes(3)
    assert m.window == 3 and len(m) > 0
    assert json.loads(m.to_json())["schema"] == "modes"

    pairs = weightfn.admissible_pairs(4, 2, "plus")
    assert sorted(pairs) == [([1, 2], [4, 3]), ([2, 1], [4, 3]), ([3, 1], [4, 2])], pairs

    rho = weightfn.block("rho", 2, [1], 2, 1)
    assert all(sum(a) == 0 for a, _ in rho.expand(3))
    print("rho:", rho.latex())

    t = weightfn.tau([1], [2], 1, 2)
    print("tau:", t.latex())

    assert weightfn.cartan_coeff_at(1, 2, 1) == "3/7"
    factors = weightfn.rmatrix(order=1, depth=2, window=3)
    labels = [label for label, _ in factors]
    assert len(labels) == 4, labels

    print(weightfn.latex_structure(2, "plus"))

    rep = weightfn.verify("enumeration", n=5)
    assert rep.passed, rep.failures
    print(repr(rep))
    print("ok")


if __name__ == "__main__":
    main()
