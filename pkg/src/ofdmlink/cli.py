"""Experiment runner CLI: ``sweep``, ``image`` and ``tables`` commands.

Options can also come from a flat ``key=value`` config file (same names
as the long flags); explicit flags win over the file, the file wins
over built-in defaults.  All outputs are a pure function of the config,
inputs and seed.
"""

from __future__ import annotations

import argparse
import sys

from .channel import (
    CHANNEL_KINDS,
    DEFAULT_MULTIPATH_TAPS,
    ChannelModel,
    ebn0_from_symbol_snr,
)
from .imageio import read_pgm, write_pgm
from .metrics import BerRecord, theory_bpsk_awgn, theory_bpsk_rayleigh
from .modem import BPSK, QAM16, QAM64, QPSK, SCHEMES
from .simulate import ESTIMATION_MODES, RunConfig, run_image, run_sweep

__all__ = ["main", "cmd_sweep", "cmd_image", "cmd_tables"]

_BUILTIN = {
    "scheme": "bpsk",
    "channel": "awgn",
    "taps": DEFAULT_MULTIPATH_TAPS,
    "snr": (0.0, 2.0, 4.0),
    "estimation": "on",
    "lambda": 0.9,
    "pilot-period": 8,
    "bits": 2_000_000,
    "seed": 0,
    "fft-size": 64,
    "cp-len": 16,
    "frame-symbols": None,
    "jobs": 1,
    "out": "-",
    "scatter-out": None,
    "scatter-max": 1000,
}

_SWEEP_KEYS = (
    "scheme", "channel", "taps", "snr", "estimation", "lambda", "pilot-period",
    "bits", "seed", "fft-size", "cp-len", "frame-symbols", "jobs", "out",
)
_IMAGE_KEYS = (
    "scheme", "channel", "taps", "snr", "estimation", "lambda", "pilot-period",
    "seed", "fft-size", "cp-len", "frame-symbols", "out", "scatter-out",
    "scatter-max",
)
_TABLES_KEYS = ("bits", "seed", "jobs", "out")


def _parse_snr(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(","))
    except ValueError:
        raise ValueError(f"snr: cannot parse {text!r} as comma-separated dB values")
    if not values:
        raise ValueError("snr: empty list")
    return values


def _parse_taps(text: str) -> tuple[tuple[int, float], ...]:
    taps = []
    for part in text.split(","):
        delay, sep, power = part.partition(":")
        if not sep:
            raise ValueError(f"taps: {part!r} is not delay:power_db")
        try:
            taps.append((int(delay), float(power)))
        except ValueError:
            raise ValueError(f"taps: cannot parse {part!r}") from None
    return tuple(taps)


_CONVERT = {
    "scheme": str,
    "channel": str,
    "taps": _parse_taps,
    "snr": _parse_snr,
    "estimation": str,
    "lambda": float,
    "pilot-period": int,
    "bits": int,
    "seed": int,
    "fft-size": int,
    "cp-len": int,
    "frame-symbols": int,
    "jobs": int,
    "out": str,
    "scatter-out": str,
    "scatter-max": int,
}


def _read_config_file(path: str) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            values[key.strip().replace("_", "-")] = value.strip()
    return values


def _dest(key: str) -> str:
    return {"lambda": "lam"}.get(key, key.replace("-", "_"))


def _merge_options(
    args: argparse.Namespace, keys: tuple[str, ...], overrides: dict | None = None
) -> dict:
    merged = {key: _BUILTIN[key] for key in keys}
    if overrides:
        merged.update(overrides)
    if getattr(args, "config", None):
        for key, text in _read_config_file(args.config).items():
            if key not in keys:
                raise ValueError(f"config: unknown key {key!r}")
            merged[key] = _CONVERT[key](text)
    for key in keys:
        value = getattr(args, _dest(key), None)
        if value is not None:
            merged[key] = value
    return merged


def _build_run_config(opts: dict, snr_db: tuple[float, ...]) -> RunConfig:
    scheme = SCHEMES.get(opts["scheme"])
    if scheme is None:
        raise ValueError(f"scheme: {opts['scheme']!r} not one of {sorted(SCHEMES)}")
    if opts["channel"] not in CHANNEL_KINDS:
        raise ValueError(f"channel: {opts['channel']!r} not one of {CHANNEL_KINDS}")
    channel = ChannelModel(kind=opts["channel"], taps=opts["taps"])
    cfg = RunConfig(
        scheme=scheme,
        channel=channel,
        snr_db=snr_db,
        estimation=opts["estimation"],
        forgetting=opts["lambda"],
        pilot_period=opts["pilot-period"],
        n_subcarriers=opts["fft-size"],
        cp_len=opts["cp-len"],
        bit_budget=opts.get("bits", _BUILTIN["bits"]),
        frame_data_symbols=opts["frame-symbols"],
        seed=opts["seed"],
    )
    cfg.validate()
    return cfg


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii", newline="") as handle:
            handle.write(text)


def _sweep_csv(records: list[BerRecord], cfg: RunConfig) -> str:
    lines = ["snr_db,scheme,channel,estimation,ber,bits,errors,seed"]
    for r in records:
        lines.append(
            f"{r.snr_db:g},{cfg.scheme.name},{cfg.channel.kind},{cfg.estimation},"
            f"{r.ber:.8e},{r.bits_total},{r.bits_error},{cfg.seed}"
        )
    return "\n".join(lines) + "\n"


def cmd_sweep(args: argparse.Namespace) -> int:
    opts = _merge_options(args, _SWEEP_KEYS)
    cfg = _build_run_config(opts, opts["snr"])
    records = run_sweep(cfg, jobs=opts["jobs"])
    _write_text(opts["out"], _sweep_csv(records, cfg))
    return 0


def cmd_image(args: argparse.Namespace) -> int:
    opts = _merge_options(args, _IMAGE_KEYS)
    if len(opts["snr"]) != 1:
        raise ValueError("snr: the image command takes a single Eb/N0 value")
    if opts["out"] == "-":
        raise ValueError("out: the image command needs an output .pgm path")
    cfg = _build_run_config(opts, opts["snr"])
    with open(args.input, "rb") as handle:
        img = read_pgm(handle.read())
    scatter_max = opts["scatter-max"] if opts["scatter-out"] else 0
    decoded, record, scatter = run_image(img, cfg, opts["snr"][0], scatter_max)
    with open(opts["out"], "wb") as handle:
        handle.write(write_pgm(decoded))
    if opts["scatter-out"]:
        rows = ["re,im"] + [f"{re:.8e},{im:.8e}" for re, im in scatter]
        _write_text(opts["scatter-out"], "\n".join(rows) + "\n")
    print(
        f"ber={record.ber:.6e} errors={record.bits_error} bits={record.bits_total} "
        f"snr_db={record.snr_db:g} scheme={cfg.scheme.name} "
        f"channel={cfg.channel.kind} estimation={cfg.estimation}"
    )
    return 0


def _tables_report(bits: int, seed: int, jobs: int) -> str:
    lines = []
    ref_points = (0.0, 2.0, 4.0)

    lines.append("== Reference reproduction: BPSK, AWGN vs flat Rayleigh ==")
    lines.append("(quantitative: measured against the closed-form coherent curves)")
    awgn_cfg = RunConfig(
        scheme=BPSK, channel=ChannelModel("awgn"), snr_db=ref_points,
        estimation="off", bit_budget=bits, frame_data_symbols=255, seed=seed,
    )
    lines.append("BPSK / AWGN / estimation off")
    lines.append("  snr_db       measured      reference    rel_err")
    for r in run_sweep(awgn_cfg, jobs=jobs):
        ref = theory_bpsk_awgn(r.snr_db)
        lines.append(
            f"  {r.snr_db:6g}  {r.ber:.6e}  {ref:.6e}  {abs(r.ber - ref) / ref:7.2%}"
        )
    rayleigh_cfg = RunConfig(
        scheme=BPSK, channel=ChannelModel("rayleigh"), snr_db=ref_points,
        estimation="perfect", bit_budget=bits, seed=seed + 1,
    )
    lines.append("BPSK / flat Rayleigh (per-frame fading) / genie equalization")
    lines.append("  snr_db       measured      reference    rel_err")
    for r in run_sweep(rayleigh_cfg, jobs=jobs):
        ref = theory_bpsk_rayleigh(r.snr_db)
        lines.append(
            f"  {r.snr_db:6g}  {r.ber:.6e}  {ref:.6e}  {abs(r.ber - ref) / ref:7.2%}"
        )

    lines.append("")
    lines.append("== Channel estimation gain over multipath fading ==")
    lines.append("(qualitative: the original experiment's fading profile is not")
    lines.append(" published, so only orderings are comparable, not values;")
    lines.append(" snr_db here is per-symbol SNR so schemes share one noise floor)")
    lines.append("  scheme  snr_db   without_est     with_est")
    fading_points = (5.0, 10.0, 15.0)
    for index, scheme in enumerate((BPSK, QPSK, QAM16, QAM64)):
        ebn0 = tuple(ebn0_from_symbol_snr(snr, scheme) for snr in fading_points)
        base = RunConfig(
            scheme=scheme, channel=ChannelModel("multipath"), snr_db=ebn0,
            estimation="off", bit_budget=bits, seed=seed + 2 + 2 * index,
        )
        with_est = RunConfig(
            scheme=scheme, channel=ChannelModel("multipath"), snr_db=ebn0,
            estimation="on", bit_budget=bits, seed=seed + 3 + 2 * index,
        )
        off_records = run_sweep(base, jobs=jobs)
        on_records = run_sweep(with_est, jobs=jobs)
        for snr, off_r, on_r in zip(fading_points, off_records, on_records):
            lines.append(
                f"  {scheme.name:6s}  {snr:6g}   {off_r.ber:.6e}    {on_r.ber:.6e}"
            )
    return "\n".join(lines) + "\n"


def cmd_tables(args: argparse.Namespace) -> int:
    # 30 Monte-Carlo points in one report; default to a lighter budget
    # than a sweep so the command stays interactive.
    opts = _merge_options(args, _TABLES_KEYS, overrides={"bits": 500_000})
    _write_text(opts["out"], _tables_report(opts["bits"], opts["seed"], opts["jobs"]))
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file; flags override it")
    parser.add_argument("--scheme", choices=sorted(SCHEMES))
    parser.add_argument("--channel", choices=CHANNEL_KINDS)
    parser.add_argument("--taps", type=_parse_taps,
                        help="multipath profile as delay:power_db[,delay:power_db...]")
    parser.add_argument("--snr", type=_parse_snr, help="comma-separated Eb/N0 in dB")
    parser.add_argument("--estimation", choices=ESTIMATION_MODES)
    parser.add_argument("--lambda", dest="lam", type=float,
                        help="estimator forgetting factor in (0, 1]")
    parser.add_argument("--pilot-period", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--fft-size", type=int)
    parser.add_argument("--cp-len", type=int)
    parser.add_argument("--frame-symbols", type=int,
                        help="data symbols per frame (fading realization unit)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ofdmlink",
        description="OFDM link simulator: BER sweeps, image transmission, reports",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="Monte-Carlo BER vs Eb/N0, CSV output")
    _add_common(sweep)
    sweep.add_argument("--bits", type=int, help="info bits per Eb/N0 point")
    sweep.add_argument("--jobs", type=int, help="parallel workers across points")
    sweep.add_argument("--out", help="CSV path, or - for stdout")
    sweep.set_defaults(func=cmd_sweep)

    image = sub.add_parser("image", help="transmit a PGM image once")
    image.add_argument("input", help="input .pgm (binary P5, maxval 255)")
    _add_common(image)
    image.add_argument("--out", help="decoded image path (.pgm)")
    image.add_argument("--scatter-out", help="CSV of equalized tones (re,im)")
    image.add_argument("--scatter-max", type=int, help="max scatter points")
    image.set_defaults(func=cmd_image)

    tables = sub.add_parser("tables", help="reference-table reproduction report")
    tables.add_argument("--config", help="key=value config file; flags override it")
    tables.add_argument("--bits", type=int, help="info bits per point")
    tables.add_argument("--seed", type=int)
    tables.add_argument("--jobs", type=int)
    tables.add_argument("--out", help="report path, or - for stdout")
    tables.set_defaults(func=cmd_tables)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
