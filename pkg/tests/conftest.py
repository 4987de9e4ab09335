import pytest

from curecheck.survival import validate_sample


@pytest.fixture(scope="session")
def long_followup_sample():
    """1000 subjects with a long censored plateau.

    743 events spread over (0, 10], the remaining 257 all censored at
    17.7248.  The KM product telescopes, so the terminal survival is
    257/1000 = 0.2570 up to float accumulation.
    """
    recs = [((j + 1) / 743 * 10.0, True) for j in range(743)]
    recs += [(17.7248, False)] * 257
    return validate_sample(recs)
