import numpy as np
import pytest

from adkstego import PlaneImage

# Reference window: coefficient magnitudes, their quality-50 quantization, and
# the table itself. Entry (1,1) is 50.05; the variant 5.05 quantizes to 0 and
# would not produce the quantized grid below.
GOLDEN_COEFFS = np.array([
    [851.00, 90.77, 43.38, 10.01, 3.75, 11.16, 9.36, 3.81],
    [99.03, 50.05, 25.84, 23.17, 14.71, 12.01, 1.20, 4.47],
    [41.64, 25.15, 25.30, 25.85, 11.82, 7.19, 1.48, 0.62],
    [10.24, 14.34, 13.41, 11.91, 6.95, 4.09, 4.10, 1.82],
    [6.75, 15.26, 9.91, 5.94, 4.50, 2.19, 2.38, 2.24],
    [9.84, 12.56, 5.18, 2.48, 2.35, 3.26, 0.98, 1.98],
    [7.10, 1.39, 0.98, 2.26, 2.40, 1.21, 0.19, 0.64],
    [3.13, 3.91, 1.07, 3.13, 2.06, 0.79, 0.50, 0.22],
])

GOLDEN_QUANTIZED = np.array([
    [53, 8, 4, 1, 0, 0, 0, 0],
    [8, 4, 2, 1, 1, 0, 0, 0],
    [3, 2, 2, 1, 0, 0, 0, 0],
    [1, 1, 1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
])

GOLDEN_Q = np.array([
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
])


def _natural_images():
    from skimage import data

    retina = data.retina()
    h, w = retina.shape[:2]
    top, left = (h - 512) // 2, (w - 512) // 2
    return {
        "astronaut": data.astronaut(),
        "immunohistochemistry": data.immunohistochemistry(),
        "retina": retina[top:top + 512, left:left + 512],
        "camera": data.camera(),
    }


@pytest.fixture(scope="session")
def natural_covers():
    pytest.importorskip("skimage")
    return {name: PlaneImage.from_hwc(a) for name, a in _natural_images().items()}


@pytest.fixture(scope="session")
def natural_secret():
    skdata = pytest.importorskip("skimage.data")
    return PlaneImage.from_hwc(skdata.coffee()[:256, 100:356])


def flat_image(value=128, size=512, channels=3):
    return PlaneImage(np.full((channels, size, size), value, dtype=np.uint8))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
