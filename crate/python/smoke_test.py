"""Quick end-to-end check of the Python bindings.

Build first:  pip install --no-build-isolation -e crates/py
Run:          python python/smoke_test.py
"""

import treecut_py as tc


def check_random_multicut():
    for seed in range(30):
        inst = tc.generate(seed=seed, edges=9, requests=6)
        size, cut, stats = tc.solve_min(inst)
        opt, _ = tc.brute_force_min(inst)
        assert size == opt, (seed, size, opt)
        assert inst.verify(cut)
        assert stats.fallback == 0
        assert stats.leaves <= stats.leaf_bound
        if size > 0:
            below, _ = tc.solve_decision(inst, size - 1)
            assert below is None


def check_weighted_dp():
    for seed in range(30):
        inst = tc.generate(seed=seed, edges=8, mode="wgmwct", q=2, max_cost=9)
        cost, cut = tc.solve_wgmwct(inst)
        opt, _ = tc.brute_force_min(inst)
        assert cost == opt, (seed, cost, opt)
        assert inst.verify(cut)


def check_reduce():
    for seed in range(30):
        inst = tc.generate(seed=seed, edges=10, requests=8)
        red = tc.reduce(inst)
        assert not red.violations
        if red.infeasible:
            continue
        size, _, _ = tc.solve_min(inst)
        rest, _, _ = tc.solve_min(red.instance)
        assert size == rest + len(red.forced_cuts), seed


def check_text_and_gadgets():
    inst = tc.Instance(4, [(0, 1), (0, 2), (0, 3)], requests=[(1, 2), (2, 3), (1, 3)])
    assert tc.Instance.parse(inst.to_text()) == inst
    assert tc.solve_min(inst)[0] == 2
    names = tc.gadget_names()
    assert "special-quadruple" in names
    g = tc.gadget("special-quadruple")
    size, _, stats = tc.solve_min(g)
    assert size == 4 and stats.fallback == 0
    assert any(r.startswith("Case") for r in stats.rules)
    try:
        tc.Instance.parse("p tct 3 mct\ne 1 2\ne 2 3 4\n")
    except ValueError as e:
        assert "line 3" in str(e)
    else:
        raise AssertionError("bad file accepted")


if __name__ == "__main__":
    check_random_multicut()
    check_weighted_dp()
    check_reduce()
    check_text_and_gadgets()
    print("smoke test passed")
