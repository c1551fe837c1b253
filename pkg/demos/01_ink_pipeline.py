"""From raw pen samples to model-ready drawings.

A raw stroke is whatever the device gives us: (x, y) at uneven timestamps,
in screen pixels. The model wants unit-height drawings sampled on a regular
time grid. This script walks one stroke through that pipeline by hand, then
does the same for a whole file the way `cose ingest` does.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from cose import (
    Drawing,
    Stroke,
    load_drawings,
    normalize_drawing,
    resample_stroke,
    save_drawings,
)

# --- 1. a fake device stroke: jittery timestamps, pixel coordinates

rng = np.random.default_rng(0)
t = np.cumsum(rng.uniform(5.0, 25.0, size=40))  # ms, irregular
x = 200.0 + 0.6 * t
y = 300.0 + 80.0 * np.sin(t / 60.0)
raw = Stroke(np.stack([x, y], axis=1), times=t)
print(f"raw stroke: {len(raw)} points, "
      f"dt in [{np.diff(t).min():.1f}, {np.diff(t).max():.1f}] ms")

# --- 2. resample onto a 20 ms grid

even = resample_stroke(raw, step_ms=20.0)
print(f"resampled:  {len(even)} points, dt = "
      f"{np.diff(even.times)[0]:.1f} ms everywhere")

# --- 3. normalize the whole drawing to unit height

drawing = normalize_drawing(Drawing([even]))
lo, hi = drawing.bounding_box()
print(f"normalized: height {hi[1] - lo[1]:.3f}, width {hi[0] - lo[0]:.3f}")

# --- 4. drawings round-trip through ndjson, one drawing per line

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "drawings.ndjson"
    save_drawings(path, [drawing])
    back = load_drawings(path)
    line = json.loads(path.read_text().splitlines()[0])
    print(f"ndjson round-trip: {len(back)} drawing(s), "
          f"first line has keys {sorted(line)}")
    same = np.array_equal(back[0].strokes[0].points, drawing.strokes[0].points)
    print(f"points survive exactly: {same}")

# The CLI wraps the same steps for the two common raw formats:
#
#   cose ingest --format quickdraw --input raw.ndjson --out clean.ndjson
#   cose ingest --format didi --input raw.ndjson --out clean.ndjson
#
# Both resample at 20 ms and normalize unless --no-normalize is given.
