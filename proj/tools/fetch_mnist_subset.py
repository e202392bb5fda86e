#!/usr/bin/env python3
# Copyright 2026 The sidescore Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Builds gzipped IDX files for a desk-scale MNIST subset.

Source: the 10,000 digits bundled with the npm package `mnist` (1.1.0),
fetched through npm; nothing is downloaded from the original MNIST host.
After a fixed-seed shuffle the first 8,000 images form the train split and
the remaining 2,000 the test split.
"""

import argparse
import gzip
import json
import os
import random
import struct
import subprocess
import tarfile
import tempfile


def write_idx(path, images, labels_path, labels):
    with gzip.GzipFile(path, "wb", mtime=0) as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), 28, 28))
        for img in images:
            f.write(bytes(img))
    with gzip.GzipFile(labels_path, "wb", mtime=0) as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(bytes(labels))


def npm_digits(workdir):
    subprocess.run(["npm", "pack", "mnist@1.1.0"], cwd=workdir, check=True,
                   stdout=subprocess.DEVNULL)
    tgz = os.path.join(workdir, "mnist-1.1.0.tgz")
    images, labels = [], []
    with tarfile.open(tgz) as tar:
        for digit in range(10):
            raw = tar.extractfile(f"package/src/digits/{digit}.json").read()
            data = json.loads(raw)["data"]
            for i in range(0, len(data) - 783, 784):
                images.append([min(255, max(0, round(v * 255))) for v in data[i:i + 784]])
                labels.append(digit)
    # Stored grouped by digit; shuffle once with a fixed seed.
    order = list(range(len(images)))
    random.Random(20240101).shuffle(order)
    return [images[i] for i in order], [labels[i] for i in order]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "mnist-subset"))
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        x, y = npm_digits(tmp)
    tr_x, tr_y = x[:8000], y[:8000]
    te_x, te_y = x[8000:], y[8000:]
    write_idx(os.path.join(args.out, "train-images-idx3-ubyte.gz"), tr_x,
              os.path.join(args.out, "train-labels-idx1-ubyte.gz"), tr_y)
    write_idx(os.path.join(args.out, "test-images-idx3-ubyte.gz"), te_x,
              os.path.join(args.out, "test-labels-idx1-ubyte.gz"), te_y)
    print(f"train: {len(tr_x)} images, test: {len(te_x)} images -> {args.out}")


if __name__ == "__main__":
    main()
