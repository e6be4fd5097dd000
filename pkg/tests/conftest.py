import pytest

from splinelike.spectral import FamilySpec

ZOO = [
    FamilySpec.spline(1), FamilySpec.spline(2), FamilySpec.spline(3),
    FamilySpec.gaussian(1), FamilySpec.gaussian(4), FamilySpec.gaussian(16),
    FamilySpec.poisson(1), FamilySpec.poisson(2), FamilySpec.poisson(4),
    FamilySpec.multiquadric_i(1, 1.0), FamilySpec.multiquadric_i(2, 1.0),
    FamilySpec.multiquadric_ii(1.0, 0.5), FamilySpec.multiquadric_ii(2.0, 0.5),
    FamilySpec.multiquadric_ii(4.0, 0.5),
]


def zoo_id(spec):
    return f"{spec.label}-{spec.escalation_value:g}"


@pytest.fixture(params=ZOO, ids=zoo_id)
def zoo_spec(request):
    return request.param
