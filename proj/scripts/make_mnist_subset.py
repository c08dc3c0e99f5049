#!/usr/bin/env python3
"""Builds a small MNIST subset in IDX format from the digit JSON files shipped
with the `mnist` npm package (10k MNIST digits, MIT licensed).

    npm pack mnist && tar xzf mnist-*.tgz
    python3 scripts/make_mnist_subset.py package/src/digits data/ --per-class 100
"""
import argparse
import json
import random
import struct
from pathlib import Path


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("digits_dir")
    ap.add_argument("out_dir")
    ap.add_argument("--per-class", type=int, default=100)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    samples = []
    for label in range(10):
        data = json.loads((Path(args.digits_dir) / f"{label}.json").read_text())["data"]
        count = len(data) // 784
        for k in range(min(args.per_class, count)):
            pixels = bytes(round(v * 255) for v in data[k * 784:(k + 1) * 784])
            samples.append((pixels, label))
    random.Random(args.seed).shuffle(samples)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n = len(samples)
    with open(out / "mnist1k-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, n, 28, 28))
        for pixels, _ in samples:
            f.write(pixels)
    with open(out / "mnist1k-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x00000801, n))
        f.write(bytes(label for _, label in samples))
    print(f"wrote {n} samples to {out}")


if __name__ == "__main__":
    main()
