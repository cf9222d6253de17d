"""``mayektts`` command line: one subcommand per pipeline stage.

Exit status: 0 success, 1 data/validation error (details on stderr),
2 usage error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import audio, corpus, features, g2p
from .config import Config
from .errors import MayekError
from .nncore import backward, init_params, load_weights, tacotron_forward
from .normalize import normalize_text
from .script import validate_script


def _texts(arg: str) -> list[str]:
    if arg == "-":
        return [ln.rstrip("\n") for ln in sys.stdin if ln.strip()]
    return [arg]


def _emit(text: str) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()


def cmd_validate(args, cfg: Config) -> int:
    classes = cfg.load_classes()
    status = 0
    for text in _texts(args.text):
        report = validate_script(text, classes)
        if report.ok:
            _emit("ok\n")
        else:
            _emit("invalid\n")
            print(report.format(), file=sys.stderr)
            status = 1
    return status


def cmd_normalize(args, cfg: Config) -> int:
    rules = cfg.load_rules()
    for text in _texts(args.text):
        _emit(normalize_text(text, rules).text + "\n")
    return 0


def _phonemes(text: str, cfg: Config, rules, classes, mapping) -> g2p.PhonemeSeq:
    norm = normalize_text(text, rules)
    report = validate_script(norm.text, classes)
    if not report.ok:
        raise MayekError("script validation failed:\n" + report.format())
    return g2p.to_phonemes(norm, mapping, classes)


def cmd_g2p(args, cfg: Config) -> int:
    rules, classes, mapping = cfg.load_rules(), cfg.load_classes(), cfg.load_mapping()
    for text in _texts(args.text):
        _emit(str(_phonemes(text, cfg, rules, classes, mapping)) + "\n")
    return 0


def cmd_audio_prep(args, cfg: Config) -> int:
    buf = audio.read_wav(args.input)
    trimmed = audio.trim_silence(buf, cfg.trim)
    if trimmed.all_silent:
        print(f"{args.input}: every frame is below {cfg.trim_threshold_db} dBFS; left untrimmed", file=sys.stderr)
        audio.write_wav(args.output, audio.resample(trimmed.audio, cfg.sample_rate))
        return 1
    loud = audio.normalize_loudness(trimmed.audio, cfg.loudness_target_db)
    if loud.peak_limited:
        print(f"{args.input}: gain limited to {loud.gain:.4f} to keep peaks within full scale", file=sys.stderr)
    audio.write_wav(args.output, audio.resample(loud.audio, cfg.sample_rate))
    return 0


def cmd_featurize(args, cfg: Config) -> int:
    buf = audio.read_wav(args.wav)
    if buf.sample_rate != cfg.sample_rate:
        buf = audio.resample(buf, cfg.sample_rate)
    mel = features.mel_spectrogram(buf, cfg.stft, cfg.mel)
    features.save_mel(args.mels, mel)
    _emit(f"{mel.n_frames} frames x {cfg.n_mels} mels\n")
    return 0


def cmd_build_corpus(args, cfg: Config) -> int:
    out = Path(args.out)
    manifest, report = corpus.build_manifest(args.list, args.wavdir, cfg.load_rules(), cfg.load_mapping(),
                                             cfg.load_classes(), base_dir=out.parent, jobs=args.jobs)
    manifest.write(out)
    _emit(f"{len(manifest)} entries written to {out}\n")
    if not report.ok:
        print(report.format(), file=sys.stderr)
        return 1
    return 0


def cmd_split(args, cfg: Config) -> int:
    manifest = corpus.Manifest.read(args.manifest)
    spec = corpus.SplitSpec((cfg.split_train, cfg.split_val, cfg.split_test), cfg.seed_split)
    out_dir = Path(args.out_dir) if args.out_dir else Path(args.manifest).parent
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, part in zip(("train", "val", "test"), corpus.split_corpus(manifest, spec)):
        part.write(out_dir / f"{name}.psv")
        _emit(f"{name}\t{len(part)}\n")
    return 0


def cmd_stats(args, cfg: Config) -> int:
    manifest = corpus.Manifest.read(args.manifest)
    stats = corpus.compute_stats(manifest)
    _emit(stats.format_kv() if args.format == "kv" else stats.format_table())
    if args.check:
        report = corpus.validate_corpus(manifest, cfg.load_classes(), cfg.load_mapping(), cfg.limits, cfg.trim)
        if not report.ok:
            print(report.format(), file=sys.stderr)
            return 1
    return 0


def cmd_synth(args, cfg: Config) -> int:
    rules, classes, mapping = cfg.load_rules(), cfg.load_classes(), cfg.load_mapping()
    ids = g2p.phonemes_to_ids(_phonemes(args.text, cfg, rules, classes, mapping), mapping, append_eos=True)
    if args.weights:
        params = load_weights(args.weights)
        if params.dims.n_symbols != mapping.n_symbols:
            raise MayekError(f"weights expect {params.dims.n_symbols} symbols, mapping has {mapping.n_symbols}")
    else:
        params = init_params(cfg.model_dims(mapping.n_symbols), cfg.seed_model)
    out = tacotron_forward(ids, params, cfg.max_frames, cfg.stop_threshold, cfg.seed_forward)
    mel = features.MelSpec(out.mel_post, cfg.mel)
    mag = features.mel_to_linear(mel, cfg.n_fft)
    gl = features.griffin_lim(mag, cfg.stft, cfg.griffin_lim_iters, cfg.seed_griffin_lim, cfg.sample_rate)
    samples = gl.audio.samples
    peak = float(np.max(np.abs(samples))) if len(samples) else 0.0
    if peak > 0:
        samples = samples * (0.9 / peak)
    audio.write_wav(args.output, audio.AudioBuffer(samples, cfg.sample_rate))
    _emit(f"{len(ids)} symbols -> {out.mel.shape[0]} frames -> {len(samples)} samples @ {cfg.sample_rate} Hz\n")
    return 0


def cmd_gradcheck(args, cfg: Config) -> int:
    rng = np.random.default_rng(args.seed)
    status = 0
    for name, check in backward.CHECKS.items():
        worst = max(check(rng) for _ in range(args.instances))
        verdict = "ok" if worst < args.tol else "FAIL"
        if worst >= args.tol:
            status = 1
        _emit(f"{name:<16} max_rel_err={worst:.3e}  {verdict}\n")
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mayektts", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key = value configuration file")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("validate", help="check text against the script grammar")
    p.add_argument("text", help="text, or - to read lines from stdin")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("normalize", help="print canonical text")
    p.add_argument("text")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("g2p", help="print the phoneme sequence")
    p.add_argument("text")
    p.set_defaults(func=cmd_g2p)

    p = sub.add_parser("audio-prep", help="trim, loudness-normalize and resample a WAV")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_audio_prep)

    p = sub.add_parser("featurize", help="write a MELS log-mel file for a WAV")
    p.add_argument("wav")
    p.add_argument("mels")
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("build-corpus", help="pair id|text lines with WAVs into a manifest")
    p.add_argument("list")
    p.add_argument("wavdir")
    p.add_argument("out")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_build_corpus)

    p = sub.add_parser("split", help="write train/val/test manifests")
    p.add_argument("manifest")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("stats", help="corpus summary table")
    p.add_argument("manifest")
    p.add_argument("--format", choices=("table", "kv"), default="table")
    p.add_argument("--check", action="store_true", help="also run corpus validation")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("synth", help="text to WAV through the toy acoustic model and Griffin-Lim")
    p.add_argument("text")
    p.add_argument("output")
    p.add_argument("--weights", help="MTTW weight file; seeded random weights otherwise")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("gradcheck", help="finite-difference check of the analytic gradients")
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-5)
    p.set_defaults(func=cmd_gradcheck)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = Config.load(args.config) if args.config else Config()
        return args.func(args, cfg)
    except (MayekError, OSError) as exc:
        print(f"mayektts {args.command}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
