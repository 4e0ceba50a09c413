import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def oracles():
    with open(DATA / "oracles.json") as fh:
        return json.load(fh)


def cval(pair):
    return complex(pair[0], pair[1])


@pytest.fixture(scope="session")
def zeta_run():
    """The orbit(4 + 0.4i) construction on disc(1/2, 2), shared across modules."""
    from lambda_forge import complexfn as cf
    from lambda_forge.interpolation import DiscRegion, InterpolationSet, PlantedZeroSet
    from lambda_forge.perturb import LFunctionHandle, build_nu, epsilon_budget, perturb, restore

    disc = DiscRegion(0.5, 2.0)
    f = LFunctionHandle.zeta()
    eq = cf.FunctionalEquation()
    m, eps0 = epsilon_budget(f, disc, 1e-3)
    planted = PlantedZeroSet((4 + 0.4j,))
    interp = InterpolationSet.symmetric([(1.0, 1)])
    nr = build_nu(planted, interp, disc, eps0)
    g = perturb(f, nr.nu, disc)
    rr = restore(g, nr.nu, disc, [], 1e-3)
    return {"disc": disc, "f": f, "eq": eq, "m": m, "eps0": eps0, "planted": planted,
            "interp": interp, "nr": nr, "g": g, "rr": rr}


def rng(seed=0):
    return np.random.default_rng(seed)


ACCEPTANCE_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = {}


@pytest.fixture
def acceptance(request):
    """Record a criterion verdict; printed as one line per criterion after the run."""
    lines = request.config.stash[ACCEPTANCE_KEY]

    def record(n, checks, elapsed, limit):
        ok = all(v for v in checks.values()) and (limit is None or elapsed < limit)
        failed = [k for k, v in checks.items() if not v]
        if limit is not None and elapsed >= limit:
            failed.append(f"runtime {elapsed:.1f}s >= {limit}s")
        detail = "; ".join(failed) if failed else f"{len(checks)} checks"
        lines[n] = f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} ({detail}, {elapsed:.2f} s)"
        print(lines[n])
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
