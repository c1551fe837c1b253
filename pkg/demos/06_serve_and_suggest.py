"""Run the completion service and talk to it like a canvas client would.

The server owns the model; clients send plain point lists and get point
lists back. Two endpoints do the work: /suggest proposes next strokes for
a partial drawing, /rollout keeps drawing autoregressively. Same seed,
same bytes, so a client can replay a rollout deterministically.

Spawns `cose serve` on a free port, makes the calls, shuts it down.
"""

import json
import socket
import subprocess
import sys
import time
import urllib.error
import urllib.request

from _shared import TOY_DIR, toy_checkpoint

ckpt = toy_checkpoint()

# --- 1. start the server on a free port

with socket.socket() as s:
    s.bind(("127.0.0.1", 0))
    port = s.getsockname()[1]
base = f"http://127.0.0.1:{port}"

server = subprocess.Popen(
    [sys.executable, "-m", "cose.cli", "serve", "--ckpt", str(TOY_DIR),
     "--port", str(port)],
    stdout=subprocess.DEVNULL,
    stderr=subprocess.DEVNULL,
)


def call(path, payload=None):
    data = None if payload is None else json.dumps(payload).encode()
    req = urllib.request.Request(
        base + path, data=data,
        headers={"Content-Type": "application/json"} if data else {},
    )
    with urllib.request.urlopen(req, timeout=10) as resp:
        return json.loads(resp.read())


try:
    # --- 2. wait for /health

    for _ in range(100):
        try:
            health = call("/health")
            break
        except (urllib.error.URLError, ConnectionError):
            time.sleep(0.2)
    else:
        raise RuntimeError("server never came up")
    print(f"serving {health['checkpoint']}: latent_dim {health['latent_dim']}, "
          f"{health['parameters']:,} parameters")

    # --- 3. a partial drawing: one box, normalized scale

    box = [[0.0, 0.0], [0.5, 0.0], [0.5, 0.36], [0.0, 0.36], [0.0, 0.0]]
    out = call("/suggest", {"strokes": [box], "n_positions": 2, "n_per_position": 1})
    weights = out["position_mixture"]["weights"]
    print(f"position mixture: {len(weights)} components, "
          f"top weight {max(weights):.2f}")
    for i, sug in enumerate(out["suggestions"]):
        x0, y0 = sug["points"][0]
        print(f"suggestion {i}: {len(sug['points'])} points starting at "
              f"({x0:+.2f}, {y0:+.2f}), p_pos={sug['position_weight']:.2f}")

    # --- 4. let the model keep drawing on its own

    out = call("/rollout", {"strokes": [box], "steps": 3, "seed": 0,
                            "temperature": 0.5})
    print(f"rollout: {len(out['strokes'])} strokes total, "
          f"model drew {out['generated_indices']}")

    again = call("/rollout", {"strokes": [box], "steps": 3, "seed": 0,
                              "temperature": 0.5})
    print(f"replay with same seed is identical: {out == again}")
finally:
    server.terminate()
    server.wait(timeout=10)
