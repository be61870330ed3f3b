"""Extract 128x128 grayscale test crops from scikit-image's bundled samples.

Crops are converted to luma with BT.601 weights and written as 8-bit PNG.
The crop origin is the 128x128 window (on a 16-pixel lattice) with the
largest mean gradient magnitude, so every crop carries texture.
"""
import os
import sys

import numpy as np
from PIL import Image
from skimage import data

NAMES = [
    "astronaut", "camera", "coffee", "chelsea", "brick", "grass", "gravel",
    "moon", "coins", "page", "text", "rocket", "hubble_deep_field", "retina",
]


def luma(img):
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 3:
        img = img[..., :3] @ np.array([0.299, 0.587, 0.114])
    return img


def best_crop(y, size=128, step=16):
    gy, gx = np.gradient(y)
    mag = np.hypot(gx, gy)
    best, where = -1.0, (0, 0)
    for r in range(0, y.shape[0] - size + 1, step):
        for c in range(0, y.shape[1] - size + 1, step):
            m = mag[r:r + size, c:c + size].mean()
            if m > best:
                best, where = m, (r, c)
    r, c = where
    return y[r:r + size, c:c + size]


def main(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    for name in NAMES:
        y = luma(getattr(data, name)())
        crop = np.clip(np.floor(best_crop(y) + 0.5), 0, 255).astype(np.uint8)
        Image.fromarray(crop, mode="L").save(os.path.join(out_dir, f"{name}.png"))
        print(name, crop.shape)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/qomega/tests/data/natural")
