"""Command-line entry point: ``chartomo <verb> --config NAME_OR_PATH [options]``.

Verbs run the pipeline up to a stage and write that stage's artifacts:

* ``simulate``: readout records
* ``reconstruct``: records, completed chi grid and DFT Wigner grid
* ``fit``: records and the fit result
* ``report``: everything, plus plot matrices, PNG figures and a text report
* ``oracle``: the DFT error oracle only

A summary is printed to stdout as tab-separated ``key value`` lines.
Exit status is 0 on success, 2 for a bad config or arguments and 3 when a
pipeline stage fails.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import BUNDLED, ConfigError, config_hash, resolve, with_overrides
from .dataio import read_records_csv
from .pipeline import PipelineError, metrics_rows, oracle, run_experiment, write_bundle

EXIT_OK, EXIT_CONFIG, EXIT_PIPELINE = 0, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chartomo", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="verb", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True,
                        help=f"bundled config name ({', '.join(BUNDLED)}) or path to a JSON config")
    common.add_argument("--seed", type=int, help="override the master seed")
    common.add_argument("--out", help="output directory (default: the config's output_dir)")
    common.add_argument("--shots", type=int, help="override shots per point")
    common.add_argument("--pad-factor", type=float, help="override the DFT zero-padding factor")
    for verb, text in (("simulate", "simulate readout records"),
                       ("reconstruct", "records -> chi grid -> Wigner grid"),
                       ("fit", "fit the configured model to the records"),
                       ("report", "full pipeline with figures and report"),
                       ("oracle", "DFT error oracle for the configured grid")):
        p = sub.add_parser(verb, parents=[common], help=text)
        if verb in ("reconstruct", "fit", "report"):
            p.add_argument("--records", help="analyse this records CSV instead of simulating")
    return parser


def _emit(rows, stream):
    for key, value in rows:
        stream.write(f"{key}\t{value}\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = with_overrides(resolve(args.config), seed=args.seed, shots=args.shots,
                             pad_factor=args.pad_factor, output_dir=args.out)
    except (ConfigError, OSError) as exc:
        print(f"chartomo: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(cfg["output_dir"])
    try:
        if args.verb == "oracle":
            pct = oracle(cfg)
            _emit([("experiment", cfg.get("name", "")), ("config_sha256", config_hash(cfg)),
                   ("dft_error_percent", repr(pct))], sys.stdout)
            return EXIT_OK
        records = None
        if getattr(args, "records", None):
            _, records = read_records_csv(args.records)
        bundle = run_experiment(cfg, until=args.verb, records=records)
        paths = write_bundle(bundle, out, figures=args.verb == "report")
    except PipelineError as exc:
        print(f"chartomo: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    except (OSError, ValueError) as exc:
        print(f"chartomo: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    _emit(metrics_rows(bundle) + [("wrote", str(p)) for p in paths], sys.stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
