"""Command line mirror of AdapterConfig.

    actr-extract --input img.png --slice s0.png --slice s1.png ... \
                 --out-dir features/ [--encoder vgg16]

Exit codes: 0 success, 2 on any input or weight failure.
"""

from __future__ import annotations

import argparse
import sys

from .errors import AdapterError
from .extract import AdapterConfig, extract


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="actr-extract",
        description="Extract encoder features, mask and occupancy tensors "
                    "from an input image and its slice images.",
    )
    parser.add_argument("--input", required=True, help="input view image (PNG)")
    parser.add_argument("--slice", action="append", required=True,
                        dest="slices", help="repeat once per slice, front to rear")
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--encoder", default="vgg16",
                        help="vgg16 | vgg16-random | random-CxHxW")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = AdapterConfig(
        input_image=args.input,
        slice_images=tuple(args.slices),
        output_dir=args.out_dir,
        encoder=args.encoder,
    )
    try:
        paths = extract(config)
    except (AdapterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    written = [paths["input_features"], *paths["slice_features"],
               paths["mask"], paths["occupancy"]]
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
