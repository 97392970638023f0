import pytest

from qwell1d.validate import Check, ValidateOptions, check_oracle, convergence_slope, run_suite


def test_broken_check_is_isolated():
    def boom(opts):
        raise RuntimeError("kaput")

    def fine(opts):
        return Check("fine", True, "ok")

    out = run_suite(ValidateOptions(), (boom, fine))
    assert [c.passed for c in out] == [False, True]
    assert "kaput" in out[0].measured and out[0].line().startswith("[FAIL]")


@pytest.mark.parametrize("dx0", [0.08, 0.5])
def test_numerov_order_is_four(dx0):
    # even a coarse starting step stays in the asymptotic regime for mode 10
    assert convergence_slope(dx0)[0] == pytest.approx(4.0, abs=0.3)


def test_plain_stencil_order_is_two():
    assert convergence_slope(0.08, stencil="three-point")[0] == pytest.approx(2.0, abs=0.1)


def test_sign_injection_is_caught():
    opts = ValidateOptions(n_points=200)
    assert check_oracle(opts).passed
    assert not check_oracle(ValidateOptions(n_points=200, inject_sign_error=True)).passed


def test_options_ignore_unknown_keys():
    assert ValidateOptions.from_dict({"dx": 0.01, "colour": "red"}).dx == 0.01
