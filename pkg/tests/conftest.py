import numpy as np
import pytest

from sparsepaint import GrayImage, save_image


def synth_image(seed: int, n: int = 128) -> GrayImage:
    """Deterministic natural-ish test image: Gaussian blobs plus a step edge."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:n, 0:n].astype(np.float64)
    img = np.zeros((n, n))
    for _ in range(6):
        cx, cy = rng.uniform(0, n, 2)
        s = rng.uniform(n / 16, n / 4)
        a = rng.uniform(40, 120)
        img += a * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * s * s))
    img += 30.0 * (x > rng.uniform(n / 4, 3 * n / 4))
    img = 255.0 * (img - img.min()) / (img.max() - img.min())
    return GrayImage(img)


def random_mask(seed: int, shape, count: int):
    rng = np.random.default_rng(seed)
    n = shape[0] * shape[1]
    known = np.zeros(n, dtype=np.bool_)
    known[rng.choice(n, size=count, replace=False)] = True
    return known.reshape(shape)


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    """Five synthetic 128x128 PGM images."""
    d = tmp_path_factory.mktemp("corpus")
    for i in range(5):
        save_image(synth_image(100 + i, 128), d / f"img{i}.pgm")
    return d
