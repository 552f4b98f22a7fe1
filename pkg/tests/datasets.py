"""Small synthetic datasets for CLI and end-to-end tests."""
import datetime as dt
from pathlib import Path

import numpy as np

from grf_toolkit.imageio import write_mask, write_rgb_png


def write_metadata(path, n, seed=0, with_hdd=True, postcodes=False):
    rng = np.random.default_rng(seed)
    lines = ["image_id,patient_id,dob,gender,hdd,postcode"]
    for k in range(n):
        dob = dt.date(1930, 1, 1) + dt.timedelta(days=int(rng.integers(0, 70 * 365)))
        gender = "male" if rng.random() < 0.5 else "female"
        hdd = str(int(rng.integers(1, 11))) if with_hdd else ""
        pc = f"M{k} {k}AB" if postcodes else ""
        lines.append(f"img{k:03d},p{k // 2:03d},{dob.isoformat()},{gender},{hdd},{pc}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return [f"img{k:03d}" for k in range(n)]


def write_rgb_images(directory, ids, width=640, height=480, seed=1):
    rng = np.random.default_rng(seed)
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for image_id in ids:
        write_rgb_png(rng.integers(0, 256, (height, width, 3), dtype=np.uint8), directory / f"{image_id}.png")


def ellipse(shape, cy, cx, ry, rx):
    y, x = np.mgrid[0 : shape[0], 0 : shape[1]]
    return ((y - cy) / ry) ** 2 + ((x - cx) / rx) ** 2 <= 1.0


def write_mask_sets(root, ids, n_pred=3, shape=(120, 160), seed=2):
    """Ground truth ellipses plus ``n_pred`` jittered prediction directories."""
    rng = np.random.default_rng(seed)
    root = Path(root)
    gt_dir = root / "gt"
    pred_dirs = [root / f"pred{k}" for k in range(n_pred)]
    for d in [gt_dir, *pred_dirs]:
        d.mkdir(parents=True, exist_ok=True)
    for image_id in ids:
        cy, cx = rng.uniform(40, 80), rng.uniform(50, 110)
        ry, rx = rng.uniform(15, 30), rng.uniform(15, 40)
        write_mask(ellipse(shape, cy, cx, ry, rx), gt_dir / f"{image_id}.png")
        for d in pred_dirs:
            j = rng.normal(0, 4, 4)
            write_mask(ellipse(shape, cy + j[0], cx + j[1], max(3, ry + j[2]), max(3, rx + j[3])), d / f"{image_id}.png")
    return gt_dir, pred_dirs
