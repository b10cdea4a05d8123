"""The numpy fallback must reproduce the compiled kernels bit for bit."""

import os
import subprocess
import sys

import numpy as np
import pytest

from mahcm import SyntheticSpec, generate_synthetic
from mahcm._backend import NUMBA_AVAILABLE
from mahcm._nnchain import nn_chain_core
from mahcm.kernels import _dtw_numpy, _dtw_scalar, _pairwise_numpy

if NUMBA_AVAILABLE:
    from mahcm.kernels import _dtw_njit, _nn_chain_njit, _pairwise_njit


def random_frames(rng, max_len=25, dim=None):
    dim = dim or int(rng.integers(1, 40))
    return rng.normal(size=(int(rng.integers(1, max_len + 1)), dim))


class TestNumpyPathInternalConsistency:
    def test_antidiagonal_equals_scalar_reference(self):
        rng = np.random.default_rng(61)
        for _ in range(60):
            dim = int(rng.integers(1, 40))
            a = random_frames(rng, dim=dim)
            b = random_frames(rng, dim=dim)
            for squared in (False, True):
                for norm in (False, True):
                    got = _dtw_numpy(a, b, squared, norm)
                    ref = _dtw_scalar(a, b, squared, norm)
                    assert got == ref  # bitwise


@pytest.mark.skipif(not NUMBA_AVAILABLE, reason="numba not importable")
class TestCompiledVsNumpy:
    def test_dtw_bitwise_equal(self):
        rng = np.random.default_rng(62)
        for _ in range(80):
            dim = int(rng.integers(1, 40))
            a = random_frames(rng, dim=dim)
            b = random_frames(rng, dim=dim)
            for squared in (False, True):
                for norm in (False, True):
                    assert _dtw_numpy(a, b, squared, norm) == _dtw_njit(a, b, squared, norm)

    def test_pairwise_bitwise_equal(self):
        ds = generate_synthetic(SyntheticSpec(
            n_classes=4, class_sizes=10, dim=5, min_len=3, max_len=12,
            jitter=0.5, warp=0.2, seed=63,
        ))
        members = np.arange(ds.n, dtype=np.int64)
        compiled = _pairwise_njit(ds.flat, ds.offsets, members, False, False)
        plain = _pairwise_numpy(ds.flat, ds.offsets, members)
        assert np.array_equal(compiled, plain)

    def test_nn_chain_bitwise_equal(self):
        rng = np.random.default_rng(64)
        for n in (2, 3, 10, 40):
            vals = rng.random(n * (n - 1) // 2) + 0.01
            a1, b1, h1 = _nn_chain_njit(vals.copy(), n)
            a2, b2, h2 = nn_chain_core(vals.copy(), n)
            assert np.array_equal(a1, a2)
            assert np.array_equal(b1, b2)
            assert np.array_equal(h1, h2)


@pytest.mark.skipif(not NUMBA_AVAILABLE, reason="needs both backends")
class TestEnvFlagSelectsBackend:
    def test_full_run_identical_without_numba(self, tmp_path):
        # a small end-to-end run in a subprocess with the fallback forced
        script = (
            "import numpy as np\n"
            "import mahcm\n"
            "ds = mahcm.generate_synthetic(mahcm.SyntheticSpec(\n"
            "    n_classes=4, class_sizes=8, dim=2, min_len=3, max_len=6,\n"
            "    jitter=0.3, warp=0.1, seed=65))\n"
            "res = mahcm.run(ds, mahcm.MahcConfig(p0=2, beta=16, max_iters=3, seed=1))\n"
            "print('BACKEND', mahcm.using_numba())\n"
            "print('LABELS', ','.join(map(str, res.assignment.labels.tolist())))\n"
            "print('F', repr(res.stats[-1].fmeasure))\n"
        )
        outputs = {}
        for flag in ("0", "1"):
            env = dict(os.environ, MAHCM_NO_NUMBA=flag)
            proc = subprocess.run([sys.executable, "-c", script], env=env,
                                  capture_output=True, text=True, timeout=600)
            assert proc.returncode == 0, proc.stderr
            lines = dict(line.split(" ", 1) for line in proc.stdout.strip().splitlines())
            assert lines["BACKEND"] == ("True" if flag == "0" else "False")
            outputs[flag] = (lines["LABELS"], lines["F"])
        assert outputs["0"] == outputs["1"]
