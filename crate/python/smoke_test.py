"""Smoke test for the Python bindings: sample, corrupt, recover, score."""

import blockmodel_lab_py as bl


def main() -> None:
    params = bl.SbmParams(2000, 2, 80.0, eps=1.0, eta=0.01)
    dq = params.derived()
    assert dq["a"] > dq["b"] > 0
    assert abs(bl.c_tilde(dq["a"], dq["b"], 1.0) - dq["c"]) < 1e-9 * dq["c"]

    g, truth = bl.sample_sbm(params, seed=7)
    assert g.n == 2000 and len(truth) == 2000
    assert truth.sizes() == [1000, 1000]

    h, corrupted = bl.corrupt(g, truth, params, "random_rewire", seed=1)
    assert len(corrupted) == 20

    labels, metrics = bl.run_pipeline(h, params, seed=3, truth=truth)
    err = bl.error_k(labels, truth)
    assert err == metrics["final_error"]
    assert err < 0.05, err

    _, blind = bl.run_pipeline(h, params, seed=3)
    assert blind["final_error"] is None

    try:
        bl.SbmParams(2000, 3, 80.0)
    except ValueError:
        pass
    else:
        raise AssertionError("k must be a power of two")
    print(f"ok: final error {err:.4f}, {metrics['total_ms']:.0f} ms")


if __name__ == "__main__":
    main()
