from qfpc.kernels import Channel
from qfpc.validation import pipeline_f, run_suite


def test_quick_suite_passes():
    report = run_suite("quick")
    assert report.passed, [c for c in report.checks if not c.passed]
    assert {c.name for c in report.checks} >= {"zero_velocity", "signs_quick_grid"}


def test_flipped_xz_sign_is_caught():
    good = pipeline_f()

    def mutant(v, z):
        vals = dict(good(v, z))
        vals[Channel.XZ] = -vals[Channel.XZ]
        return vals

    report = run_suite("quick", f=mutant)
    failed = {c.name for c in report.checks if not c.passed}
    assert "signs_quick_grid" in failed
    assert not report.passed


def test_nonzero_static_friction_is_caught():
    good = pipeline_f()

    def mutant(v, z):
        vals = dict(good(v, z))
        if v == 0:
            vals[Channel.XX] = -1e-30
        return vals

    report = run_suite("quick", f=mutant)
    assert not report.passed
