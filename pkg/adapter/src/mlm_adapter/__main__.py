"""CLI: ``mlm-adapter --model ID --device D [--no-space-prefix]``."""

from __future__ import annotations

import argparse
import sys

from .server import AdapterConfig, serve


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="mlm-adapter",
        description="Serve a masked LM over the scramblekit-score line protocol",
    )
    parser.add_argument(
        "--model", required=True,
        help="transformers model id or path, or stub:FILE.json for a fixed distribution",
    )
    parser.add_argument("--device", default="cpu")
    parser.add_argument(
        "--no-space-prefix", dest="space_prefix", action="store_false",
        help="tokenize candidates without the leading-space convention",
    )
    parser.add_argument("--timeout", type=float, default=30.0,
                        help="advisory per-batch timeout recorded in the config")
    args = parser.parse_args(argv)
    config = AdapterConfig(
        model=args.model,
        device=args.device,
        space_prefix=args.space_prefix,
        batch_timeout_s=args.timeout,
    )
    return serve(config)


if __name__ == "__main__":
    sys.exit(main())
