"""Smoke tests for the _ccgeo extension module.

Run against a built module, e.g.:
    PYTHONPATH=build pytest tests/python
"""
import json
import math

import pytest

ccgeo = pytest.importorskip("_ccgeo")


def test_signature_and_duality():
    q = ccgeo.standard_form(2, 1)
    sig = ccgeo.signature_of(q)
    assert (sig.plus, sig.minus, sig.zero) == (2, 1, 0)
    d = ccgeo.dual_form(q)
    dsig = ccgeo.signature_of(d)
    assert (dsig.plus, dsig.minus) == (2, 1)


def test_gauss_identity_at_point():
    # q*(dQ, dQ) = 4 Q must hold exactly for diagonal forms.
    q = ccgeo.standard_form(2, 1)
    x = [0.3, -1.2, 0.7]
    grad = [2 * x[0], 2 * x[1], -2 * x[2]]
    assert abs(ccgeo.dual_value(q, grad) - 4 * q(x)) < 1e-12


def test_restricted_signature_prediction():
    q = ccgeo.standard_form(2, 2)
    ell = [1.0, 0.0, 0.0, 0.0]
    predicted = ccgeo.predict_restricted_signature(q, ell)
    restricted_form, _ = ccgeo.restrict_to_hyperplane(q, ell)
    restricted = ccgeo.signature_of(restricted_form)
    assert (predicted.plus, predicted.minus, predicted.zero) == (
        restricted.plus,
        restricted.minus,
        restricted.zero,
    )


def test_strip_build_and_certificates():
    s = ccgeo.build_strip(8, 1.0 / 1024.0, 4.0)
    inv = ccgeo.strip_invariants_certificate(s)
    assert inv.pass_
    cc = ccgeo.strip_cc_certificate(s, 128)
    assert cc.pass_ and cc.margin > -1e-12
    assert ccgeo.rho_nonproportionality(s) > 0.1
    # far tail: support is the rescaled cone support
    assert s.support(3.5, 0.0) > 0
    assert abs(s.perp_displacement(3.9)) < 1e-6


def test_strip_line_search():
    s = ccgeo.build_strip(8, 1.0 / 1024.0, 4.0)
    r = ccgeo.strip_line_search(s, 10.0, 8, 1)
    assert r["margin"] > 0


def test_section_distance_exact():
    # point (3, 0) against the unit disc stretched along a vertical segment
    d = ccgeo.section_distance(3.0, 0.0, 1.0, (0.0, -2.0), (0.0, 2.0))
    assert abs(d - 2.0) < 1e-12
    # point inside the hull
    assert ccgeo.section_distance(0.0, 0.5, 1.0, (0.0, -2.0), (0.0, 2.0)) == 0.0


def test_arnold_certificate():
    cert = ccgeo.arnold_certificate(ccgeo.hyperbolic_quadric(), 200, 7, 1e-6)
    assert cert.pass_
    assert ccgeo.duality_involution_error(ccgeo.hyperbolic_quadric()) < 1e-12


def test_certificate_to_dict_roundtrips_json():
    s = ccgeo.build_strip(6, 1.0 / 512.0, 4.0)
    d = ccgeo.strip_invariants_certificate(s).to_dict()
    assert json.loads(json.dumps(d)) == d
    assert d["pass"] is True
