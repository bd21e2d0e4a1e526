import numpy as np
import pytest
from PIL import Image


@pytest.fixture
def image_dir(tmp_path):
    """Directory of three tiny distinct grayscale PNGs: img1, img2, img10."""
    d = tmp_path / "frames"
    d.mkdir()
    rng = np.random.default_rng(42)
    for name in ("img2.png", "img10.png", "img1.png"):
        arr = rng.integers(0, 256, size=(48, 64), dtype=np.uint8)
        Image.fromarray(arr, mode="L").save(d / name)
    return d


def make_image_dir(path, count, size=(48, 64), seed=0):
    path.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    for i in range(count):
        arr = rng.integers(0, 256, size=size, dtype=np.uint8)
        Image.fromarray(arr, mode="L").save(path / f"frame{i:03d}.png")
    return path
