"""Entry point: `python -m nli_reference_backend [serve|finetune] ...`."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import BackendConfig, BackendConfigError, parse_label_mapping


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nli-reference-backend")
    sub = parser.add_subparsers(dest="command")

    serve_p = sub.add_parser("serve", help="speak the wire protocol on stdio")
    serve_p.add_argument("--model", default="overlap", help="HF model id/path, or 'overlap'")
    serve_p.add_argument("--device", default="cpu")
    serve_p.add_argument("--batch-size", type=int, default=16)
    serve_p.add_argument(
        "--label-mapping",
        default="entailment=0,neutral=1,contradiction=2",
        help="which model output index carries each outcome",
    )

    tune_p = sub.add_parser("finetune", help="fine-tune a checkpoint on entailment pairs")
    tune_p.add_argument("--train-file", required=True)
    tune_p.add_argument("--output-dir", required=True)
    tune_p.add_argument("--base-model", default="GroNLP/bert-base-dutch-cased")
    tune_p.add_argument("--epochs", type=int, default=20)
    tune_p.add_argument("--validation-size", type=int, default=495)
    tune_p.add_argument("--device", default="cpu")

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # bare invocation serves: the gateway launches this as its child process
    if not argv or argv[0].startswith("--"):
        argv = ["serve", *argv]
    args = build_parser().parse_args(argv)

    if args.command == "serve":
        from .server import serve

        try:
            config = BackendConfig(
                model=args.model,
                device=args.device,
                batch_size=args.batch_size,
                label_mapping=parse_label_mapping(args.label_mapping),
            )
            serve(config)
        except BackendConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        except Exception as exc:  # model load failure must exit non-zero
            print(f"error: cannot serve: {exc}", file=sys.stderr)
            return 1
        return 0

    if args.command == "finetune":
        from .finetune import FinetuneConfig, TrainingError, finetune

        try:
            checkpoint = finetune(
                FinetuneConfig(
                    train_file=Path(args.train_file),
                    output_dir=Path(args.output_dir),
                    base_model=args.base_model,
                    num_train_epochs=args.epochs,
                    validation_size=args.validation_size,
                    device=args.device,
                )
            )
        except TrainingError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(f"selected checkpoint: {checkpoint}")
        return 0

    build_parser().print_help()
    return 2


if __name__ == "__main__":
    sys.exit(main())
