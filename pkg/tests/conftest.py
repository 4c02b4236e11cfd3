import numpy as np
import pytest
from PIL import Image

skdata = pytest.importorskip("skimage.data")

NATURAL = ("camera", "moon", "coins", "clock", "brick")


def natural_image(name: str, size: int = 256) -> np.ndarray:
    """A bundled scikit-image photograph resized to ``size`` x ``size``."""
    arr = getattr(skdata, name)()
    return np.asarray(Image.fromarray(arr).resize((size, size), Image.BILINEAR), dtype=np.uint8)


@pytest.fixture(scope="session")
def camera():
    return natural_image("camera")


@pytest.fixture(scope="session")
def naturals():
    return {name: natural_image(name) for name in NATURAL}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# criterion number -> list of (part, ok, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}
ACCEPTANCE_TITLES = {
    1: "round-trip fidelity",
    2: "differential strength",
    3: "histogram uniformity",
    4: "correlation collapse",
    5: "key sensitivity",
    6: "known-plaintext attack failure",
    7: "component oracles",
    8: "determinism / golden vectors",
}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[n]
        ok = all(p[1] for p in parts)
        failed = "; ".join(f"{p[0]}: {p[2]}" for p in parts if not p[1])
        if failed:
            detail = failed
        elif len(parts) > 4:
            detail = f"{len(parts)}/{len(parts)} checks passed"
        else:
            detail = "; ".join(f"{p[0]}: {p[2]}" for p in parts)
        tr.write_line(f"criterion {n} ({ACCEPTANCE_TITLES[n]}): {'PASS' if ok else 'FAIL'} | {detail}")
