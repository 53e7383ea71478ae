#!/usr/bin/env python3
"""Convert the digit JSON files shipped in the `mnist` npm package to IDX.

Usage: mnist_json_to_idx.py <package>/src/digits <out-dir>

Writes images-idx3-ubyte (28x28, magic 0x00000803) and labels-idx1-ubyte
(magic 0x00000801). Digits are emitted class by class, 0 through 9.
"""
import json
import pathlib
import struct
import sys


def main() -> int:
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 2
    src, out = pathlib.Path(sys.argv[1]), pathlib.Path(sys.argv[2])
    out.mkdir(parents=True, exist_ok=True)
    pixels, labels = bytearray(), bytearray()
    for digit in range(10):
        raw = json.loads((src / f"{digit}.json").read_text())["data"]
        if len(raw) % 784:
            raise SystemExit(f"{digit}.json: length {len(raw)} is not a multiple of 784")
        pixels += bytes(min(255, max(0, round(v * 255))) for v in raw)
        labels += bytes([digit]) * (len(raw) // 784)
    count = len(labels)
    (out / "images-idx3-ubyte").write_bytes(struct.pack(">IIII", 0x803, count, 28, 28) + pixels)
    (out / "labels-idx1-ubyte").write_bytes(struct.pack(">II", 0x801, count) + labels)
    print(f"wrote {count} images to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
