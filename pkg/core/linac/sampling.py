from typing import Optional

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def _center(center, n: int) -> np.ndarray:
    return np.zeros(n, dtype=complex) if center is None else np.asarray(center, dtype=complex)


def polydisc(rng: np.random.Generator, count: int, n: int, radius: float, center=None) -> np.ndarray:
    """count points uniform in the polydisc |x_j - c_j| < radius; shape (count, n)."""
    modulus = radius * np.sqrt(rng.random((count, n)))
    phase = np.exp(2j * np.pi * rng.random((count, n)))
    return _center(center, n) + modulus * phase


def polydisc_boundary(rng: np.random.Generator, count: int, n: int, radius: float, center=None) -> np.ndarray:
    """Points of the polydisc with one randomly chosen coordinate pushed onto its circle."""
    pts = polydisc(rng, count, n, radius)
    axis = rng.integers(0, n, size=count)
    rows = np.arange(count)
    pts[rows, axis] = radius * np.exp(2j * np.pi * rng.random(count))
    return _center(center, n) + pts


def group_parameters(rng: np.random.Generator, count: int, s_min: float, s_max: float) -> np.ndarray:
    """s with log-uniform modulus in [s_min, s_max] and uniform argument."""
    modulus = np.exp(rng.uniform(np.log(s_min), np.log(s_max), size=count))
    return modulus * np.exp(2j * np.pi * rng.random(count))


def complex_times(rng: np.random.Generator, count: int, re_z: float, im_z: float) -> np.ndarray:
    """z uniform in the rectangle |Re z| <= re_z, |Im z| <= im_z."""
    return rng.uniform(-re_z, re_z, size=count) + 1j * rng.uniform(-im_z, im_z, size=count)


def circle_nodes(m: int, radius: float) -> np.ndarray:
    return radius * np.exp(2j * np.pi * np.arange(m) / m)


def tensor_circle_grid(n: int, m: int, radius: float, center: Optional[np.ndarray] = None) -> np.ndarray:
    """Tensor product of m circle nodes on each of the n axes; shape (m**n, n)."""
    nodes = circle_nodes(m, radius)
    mesh = np.meshgrid(*([nodes] * n), indexing="ij")
    grid = np.stack([axis.ravel() for axis in mesh], axis=-1)
    return _center(center, n) + grid
