"""Smoke test of the Python bindings.

Run after installing the package (`pip install -e . --no-build-isolation`
from the repository root):

    python python/smoke_test.py
"""

import json

import qcgeom_py as q


def run(chart, **kwargs):
    return json.loads(q.check(chart, **kwargs))


def main() -> None:
    # Flat chart: everything vanishes and every required check is zero.
    flat = q.Chart.heisenberg(1)
    assert flat.n == 1 and flat.dim == 7 and len(flat.coordinates) == 7
    report = run(flat, points=2, seed=7)
    assert report["all_required_zero"], "flat chart must pass"
    point = report["points"][0]
    assert point["scalars"] == {"s": "0", "scal": "0"}
    assert point["classification"]["verdict"] == "torsion-free, Scal = 0"

    # Conformal deformation: torsion appears, required checks still hold,
    # and the informative 4-form check reports a witness.
    deformed = flat.conformal_deform("1 + x1^2")
    report = run(deformed, points=1, seed=3)
    assert report["all_required_zero"], "deformed chart must still pass"
    point = report["points"][0]
    assert point["classification"]["verdict"] == "generic (torsion ≠ 0)"
    four_form = next(c for c in point["checks"] if c["name"] == "four_form_closed")
    assert four_form["status"] == "nonzero" and four_form["witness"]

    # Round sphere: the reference scalar values and the cone detection.
    sphere = q.Chart.sphere_3sasakian(1)
    report = run(sphere, points=1, seed=1)
    assert report["all_required_zero"], "sphere chart must pass"
    point = report["points"][0]
    assert point["scalars"] == {"s": "2", "scal": "48"}
    assert point["classification"]["verdict"] == "3-Sasakian-homothetic candidate"
    assert point["cone"]["detected_epsilon"] == 1

    # Chart JSON round trip.
    again = q.Chart.from_json(flat.to_json())
    assert again.label == flat.label and again.coordinates == flat.coordinates

    # Determinism: identical configurations give identical reports.
    assert q.check(flat, points=2, seed=7) == q.check(flat, points=2, seed=7)

    # Errors surface as ValueError.
    try:
        flat.conformal_deform("1 + bogus^2")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown symbols must be rejected")

    print("smoke test passed")


if __name__ == "__main__":
    main()
