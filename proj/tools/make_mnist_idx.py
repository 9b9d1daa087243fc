#!/usr/bin/env python3
"""Convert a pixel CSV (784 columns 0-255 then the label) to IDX files.

Usage: make_mnist_idx.py SOURCE.csv[.gz] OUT_DIR
Writes OUT_DIR/images.idx3-ubyte and OUT_DIR/labels.idx1-ubyte.
The 5k MNIST subset shipped with mlxtend (mlxtend/data/data/mnist_5k.csv.gz)
is what data/mnist was built from.
"""
import gzip
import os
import struct
import sys

import numpy as np


def main():
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    src, out = sys.argv[1], sys.argv[2]
    opener = gzip.open if src.endswith(".gz") else open
    with opener(src, "rt") as f:
        rows = np.loadtxt(f, delimiter=",")
    pixels = np.clip(np.rint(rows[:, :-1]), 0, 255).astype(np.uint8)
    labels = rows[:, -1].astype(np.uint8)
    if pixels.shape[1] != 784:
        sys.exit("expected 784 pixel columns, got %d" % pixels.shape[1])
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "images.idx3-ubyte"), "wb") as f:
        f.write(struct.pack(">IIII", 0x803, len(pixels), 28, 28))
        f.write(pixels.tobytes())
    with open(os.path.join(out, "labels.idx1-ubyte"), "wb") as f:
        f.write(struct.pack(">II", 0x801, len(labels)))
        f.write(labels.tobytes())
    print("%d images -> %s" % (len(pixels), out))


if __name__ == "__main__":
    main()
