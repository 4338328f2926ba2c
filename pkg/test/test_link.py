"""
Test link families
Checks cdf/pdf values, derivative consistency and tail clamping
"""
import sys
from pathlib import Path

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import numpy as np

from bigcpm.core.link import LinkFamily, link_eval
from bigcpm.errors import ArgumentError, LinkDomainError
from suite import run_suite

ALL_LINKS = list(LinkFamily)


def test_known_values():
    """Direct evaluations at simple points"""
    print("\n[TEST] Testing Known Link Values")
    print("=" * 40)

    logit = link_eval("logit", 0.0)
    assert logit.cdf == 0.5 and abs(logit.pdf - 0.25) < 1e-15 and abs(logit.pdf_deriv) < 1e-15
    assert not logit.clamped
    assert abs(link_eval("loglog", 0.0).cdf - np.exp(-1.0)) < 1e-15
    assert abs(link_eval("cloglog", 0.0).cdf - (1.0 - np.exp(-1.0))) < 1e-15
    assert abs(link_eval("probit", 1.959964).cdf - 0.975) < 1e-6
    print("[PASS] logit, loglog, cloglog and probit values")


def test_ppf_inverts_cdf():
    print("\n[TEST] Testing Link Inverse")
    print("=" * 40)

    probs = np.array([0.01, 0.2, 0.5, 0.8, 0.99])
    for link in ALL_LINKS:
        assert np.allclose(link.cdf(link.ppf(probs)), probs, rtol=0, atol=1e-12), link
        assert np.allclose(link.cdf(probs) + link.sf(probs), 1.0, atol=1e-15), link
    try:
        LinkFamily.LOGIT.ppf([0.0, 0.5])
        raise AssertionError("ppf(0) should be rejected")
    except ArgumentError:
        pass
    print("[PASS] cdf(ppf(p)) = p and cdf + sf = 1 for every link")


def test_derivatives_match_finite_differences():
    """pdf and pdf_deriv against central differences"""
    print("\n[TEST] Testing Link Derivatives")
    print("=" * 40)

    h = 1e-5
    for link in ALL_LINKS:
        # the Gumbel links are steep on one side; stay where differences are accurate
        grid = np.linspace(-3.0, 3.0, 61) if link in (LinkFamily.LOGLOG, LinkFamily.CLOGLOG) \
            else np.linspace(-6.0, 6.0, 121)
        value = link_eval(link, grid)
        # difference whichever tail is small so the increment stays representable
        upper = grid > 0
        increment = np.where(upper, link.sf(grid - h) - link.sf(grid + h),
                             link.cdf(grid + h) - link.cdf(grid - h))
        fd_pdf = increment / (2 * h)
        fd_deriv = (link.pdf(grid + h) - link.pdf(grid - h)) / (2 * h)
        assert np.max(np.abs(fd_pdf - value.pdf) / value.pdf) < 1e-6, link
        # pdf_deriv crosses zero at the mode; measure relative to the density there
        scale = np.maximum(np.abs(value.pdf_deriv), value.pdf)
        assert np.max(np.abs(fd_deriv - value.pdf_deriv) / scale) < 1e-6, link
        print(f"  {link.value}: [PASS]")
    print("[PASS] pdf and pdf_deriv agree with finite differences to relative error 1e-6")


def test_log_domain_probabilities():
    print("\n[TEST] Testing Log-Domain Probabilities")
    print("=" * 40)

    grid = np.linspace(-4.0, 4.0, 33)
    for link in ALL_LINKS:
        assert np.allclose(link.log_cdf(grid), np.log(link.cdf(grid)), rtol=1e-12), link
        assert np.allclose(link.log_sf(grid), np.log(link.sf(grid)), rtol=1e-12), link
    # far tails stay finite where cdf itself underflows
    assert np.isfinite(LinkFamily.LOGIT.log_cdf(-800.0))
    assert np.isfinite(LinkFamily.PROBIT.log_sf(40.0))
    print("[PASS] log_cdf/log_sf consistent and finite in the tails")


def test_tail_clamping_and_errors():
    print("\n[TEST] Testing Tail Clamping")
    print("=" * 40)

    for link in ALL_LINKS:
        for u in (-800.0, 800.0):
            value = link_eval(link, u)
            assert 0.0 < value.cdf < 1.0, (link, u)
            assert np.isfinite(value.pdf) and np.isfinite(value.pdf_deriv), (link, u)
    assert link_eval("logit", 800.0).clamped
    assert link_eval("logit", np.array([-800.0, 0.0])).clamped

    try:
        link_eval("probit", np.nan)
        raise AssertionError("NaN argument should be rejected")
    except LinkDomainError:
        pass
    try:
        link_eval("cauchit", 0.0)
        raise AssertionError("Unknown link should be rejected")
    except ArgumentError as e:
        assert "logit" in str(e)
    print("[PASS] cdf stays inside (0, 1); bad input is rejected")


if __name__ == "__main__":
    success = run_suite("bigcpm Link Test Suite", [
        test_known_values,
        test_ppf_inverts_cdf,
        test_derivatives_match_finite_differences,
        test_log_domain_probabilities,
        test_tail_clamping_and_errors,
    ])
    sys.exit(0 if success else 1)
