#!/usr/bin/env python3
"""Smoke test for the histlight_py extension module.

Build the module first, then run this script:

    cargo build -p histlight-py
    python3 python/smoke_test.py

The script copies the compiled cdylib into a temporary directory under
the importable name histlight_py.so, imports it, and exercises each
exposed operation once.
"""

import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def find_library() -> Path:
    candidates = [
        ROOT / "target" / profile / "libhistlight_py.so"
        for profile in ("release", "debug")
    ]
    for path in candidates:
        if path.exists():
            return path
    sys.exit(
        "libhistlight_py.so not found; run `cargo build -p histlight-py` first"
    )


def checker_rgb(width: int, height: int) -> bytes:
    """A lit-window checkerboard, the kind of night scene the pipeline
    is calibrated for."""
    px = []
    for y in range(height):
        for x in range(width):
            v = 190 if (x + y) % 2 == 0 else 9
            px += [v, v, v]
    return bytes(px)


def main() -> None:
    lib = find_library()
    with tempfile.TemporaryDirectory() as tmp:
        shutil.copy2(lib, Path(tmp) / "histlight_py.so")
        sys.path.insert(0, tmp)
        import histlight_py as hl

        print(f"module version {hl.__version__}")

        # Decomposition conserves mass and reports one trace entry per
        # update step (three per iteration).
        source = [0.0] * 16
        source[2], source[3], source[12] = 180.0, 60.0, 16.0
        gradient = [0.0] * 16
        gradient[0], gradient[15] = 200.0, 56.0
        out = hl.decompose_histograms(source, gradient, alpha=0.1, beta=0.1, max_iter=10)
        n = sum(source)
        assert abs(sum(out["illumination"]) - n) < 1e-6 * n
        assert abs(sum(out["reflectance"]) - n) < 1e-6 * n
        assert len(out["objective_trace"]) == 3 * out["iterations"]
        assert out["iterations"] >= 1

        # Brightening never lowers the recomposed histogram's mean level.
        def mean_level(hist):
            return sum(i * m for i, m in enumerate(hist)) / sum(hist)

        flat = hl.brighten_histogram(out["reflectance"], out["illumination"], gamma=1.0)
        lifted = hl.brighten_histogram(out["reflectance"], out["illumination"], gamma=2.2)
        assert abs(sum(flat) - n) < 1e-6 * n
        assert mean_level(lifted) >= mean_level(flat) - 1e-9

        # Raw-buffer enhancement keeps the buffer layout and changes pixels.
        w, h = 24, 18
        data = checker_rgb(w, h)
        enhanced = hl.enhance_rgb(data, w, h, gamma=2.2, max_iter=3)
        assert isinstance(enhanced, bytes)
        assert len(enhanced) == len(data)
        assert enhanced != data

        # Out-of-range gamma is rejected with the library's message.
        try:
            hl.enhance_rgb(data, w, h, gamma=0.5)
        except ValueError as e:
            assert "gamma must be >= 1" in str(e), str(e)
        else:
            raise AssertionError("gamma=0.5 must raise ValueError")

        # File pipeline plus metrics: an image compared to itself is perfect.
        from PIL import Image

        workdir = Path(tmp)
        inp = workdir / "in.png"
        outp = workdir / "out.png"
        Image.frombytes("RGB", (w, h), data).save(inp)
        iterations = hl.enhance_file(str(inp), str(outp), gamma=2.2, max_iter=3)
        assert outp.exists()
        assert 1 <= iterations <= 3
        scores = hl.image_metrics(str(inp), str(inp))
        assert scores["psnr"] == 99.0
        assert scores["ssim"] == 1.0
        assert scores["loe"] == 0.0

    print("PASS")


if __name__ == "__main__":
    main()
