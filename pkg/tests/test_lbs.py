from fractions import Fraction

import pytest

from tyzlab.curvature import contract, point_images, scalars_at
from tyzlab.lbs import MODELS, axis_defect, axis_jets, lbs_metric, second_derivative_table

F = Fraction


@pytest.mark.parametrize("model", MODELS)
def test_dim2_exact_and_series_paths_agree(model):
    a = axis_defect(2, model, path="exact")
    b = axis_defect(2, model, path="series")
    assert a.coefficients == b.coefficients
    # computed leading values, identical for all three models
    assert (a.coefficients["normR2"], a.coefficients["normRic2"], a.coefficients["defect"]) == (8, 2, 0)


def test_dim2_potential_model_is_scalar_flat():
    # exact for n = 2; for n >= 3 the truncated potential is scalar flat only at leading order
    m = lbs_metric(2, "potential")
    for v in ([1, 2], [3, F(1, 2)], [F(2, 7), 5]):
        s = sum(F(c) ** 2 for c in v)
        assert scalars_at(m, point_images(v, v, s)).rho == 0


@pytest.mark.parametrize("model", MODELS)
def test_axis_values_are_unitarily_invariant(model):
    # on the axis (1, 0) with t = 5 versus the point (1, 2) with |v|^2 = 5
    m = lbs_metric(2, model)
    axis = contract(axis_jets(m, "exact"))
    off = scalars_at(m, point_images([1, 2], [1, 2], 5))
    if model == "potential":
        for name in ("rho", "normR2", "normRic2"):
            assert getattr(axis, name).evaluate([F(5)]) == getattr(off, name)
    else:
        # Hermitian but not U(n)-invariant: only the axis itself is meaningful
        assert axis.normR2.evaluate([F(5)]) > 0


def test_higher_dims_potential_model():
    res = axis_defect(3)
    assert res.model == "potential" and res.path == "series"
    assert res.coefficients["rho"] == 0
    assert res.coefficients["defect"] == 384
    assert any("tail perturbation" in note for note in res.notes)
    assert not res.matches["defect"]


def test_displayed_model_dim3():
    res = axis_defect(3, "displayed")
    assert res.coefficients["defect"] == -1362 and res.defect_negative


def test_second_derivative_table_dim2():
    table = second_derivative_table(2)
    got = {(e.i, e.l, e.k, e.j): e.coefficient for e in table["entries"]}
    assert got[(1, 1, 2, 2)] == -2 and got[(2, 2, 2, 2)] == 1
    assert got[(1, 1, 1, 1)] == 1          # reference lists -5
    assert got[(1, 2, 1, 2)] == -1          # reference key (2,1,1,2) carries this value
    assert got[(2, 1, 1, 2)] == 0


def test_second_derivative_table_dim3_matches_reference():
    table = second_derivative_table(3)
    checked = [e for e in table["entries"] if e.reference is not None]
    assert len(checked) == 5 and all(e.matches for e in checked)


def test_bad_dimension():
    with pytest.raises(ValueError):
        axis_defect(9)
