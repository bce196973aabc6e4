"""Builds the MNIST 0/1 fixture CSVs from the 5000-image MNIST subset bundled
with the mlxtend wheel (mlxtend/data/data/mnist_5k.csv.gz, 500 images per digit).

    pip download mlxtend --no-deps -d /tmp/mlx
    python make_mnist_fixture.py /tmp/mlx/mlxtend-*.whl

Only digits 0 and 1 are kept (1000 images). Rows are shuffled with a fixed seed
and split 700 train / 100 val / 200 test. Pixels are scaled to [0, 1].
"""
import gzip
import io
import sys
import zipfile

import numpy as np

MEMBER = "mlxtend/data/data/mnist_5k.csv.gz"


def write_split(path, labels, pixels):
    with open(path, "w", newline="\n") as fh:
        fh.write("label," + ",".join(f"f{i}" for i in range(pixels.shape[1])) + "\n")
        for y, row in zip(labels, pixels):
            cells = ["0" if v == 0 else f"{v / 255.0:.6g}" for v in row]
            fh.write(f"{int(y)}," + ",".join(cells) + "\n")


def main(wheel):
    with zipfile.ZipFile(wheel) as zf:
        raw = gzip.decompress(zf.read(MEMBER))
    data = np.loadtxt(io.BytesIO(raw), delimiter=",")
    labels = data[:, -1].astype(int)
    pixels = data[:, :-1].astype(int)
    keep = labels <= 1
    labels, pixels = labels[keep], pixels[keep]
    order = np.random.default_rng(0).permutation(len(labels))
    labels, pixels = labels[order], pixels[order]
    write_split("mnist01_train.csv", labels[:700], pixels[:700])
    write_split("mnist01_val.csv", labels[700:800], pixels[700:800])
    write_split("mnist01_test.csv", labels[800:], pixels[800:])


if __name__ == "__main__":
    main(sys.argv[1])
