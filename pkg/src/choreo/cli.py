"""Command-line surface wiring the pipeline end to end.

Exit codes: 0 success, 1 usage error, 2 input/data error. All errors go to
stderr as a single line prefixed ``error:``.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .audio import DEFAULT_SAMPLE_RATE, MfccConfig, compute_mfcc, load_audio
from .baselines import RNG_ALGORITHM, BaselineKind, generate_baseline
from .dance import AgentConfig
from .errors import ChoreoError
from .evaluate import format_text, save_score_figure, score_table, to_csv
from .features import (
    beats_to_steps,
    detect_beats,
    music_matrix,
    save_matrix_csv,
    save_matrix_png,
)
from .objective import alignment_score
from .render import Visualization, encode_gif, render_frames, write_frames
from .search import SearchConfig, exhaustive_search, greedy_chunked_search
from .trace import AudioInfo, read_trace, trace_from_sequence, write_trace

_REPR_CHOICES = {"state": "state", "action": "action", "state-action": "state_action"}
_VIS_CHOICES = {
    "grid-dot": "grid_dot",
    "pulse-disc": "pulse_disc",
    "stick-figure": "stick_figure",
}


def _audio_options(f):
    options = [
        click.option("--rate", type=int, default=DEFAULT_SAMPLE_RATE, show_default=True,
                     help="Resample target in Hz."),
        click.option("--n-fft", type=int, default=2048, show_default=True,
                     help="FFT window size."),
        click.option("--hop-length", type=int, default=512, show_default=True,
                     help="Samples per analysis hop."),
        click.option("--n-mels", type=int, default=128, show_default=True,
                     help="Mel bands in the filterbank."),
        click.option("--n-coeffs", type=int, default=20, show_default=True,
                     help="MFCC coefficients kept."),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _pipeline(audio_path, rate, n_fft, hop_length, n_mels, n_coeffs):
    audio = load_audio(audio_path, rate)
    config = MfccConfig(n_fft=n_fft, hop_length=hop_length, n_mels=n_mels, n_coeffs=n_coeffs)
    matrix = music_matrix(compute_mfcc(audio, config))
    return audio, config, matrix


def _audio_info(audio, path) -> AudioInfo:
    return AudioInfo(path=str(path), duration_s=audio.duration_s, sample_rate=audio.sample_rate)


def _fmt_score(value) -> str:
    return "undefined" if value is None else f"{value:.10f}"


# flag names whose click parameter is spelled differently
_CONFIG_ALIASES = {
    "repr": "representation",
    "beats": "beats_path",
    "gif": "gif_path",
    "frames": "frames_dir",
    "csv": "csv_path",
    "fig": "fig_path",
}


def _parse_config_file(path: str) -> dict[str, str]:
    defaults: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise click.UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        key = key.strip().replace("-", "_")
        defaults[_CONFIG_ALIASES.get(key, key)] = value.strip()
    return defaults


@click.group(name="choreo")
@click.option("-c", "--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="key=value file of option defaults (flags win on conflict).")
@click.pass_context
def cli(ctx, config_path):
    """Generate, inspect and render dances aligned to music structure."""
    if config_path:
        defaults = _parse_config_file(config_path)
        ctx.default_map = {name: defaults for name in cli.commands}


@cli.command()
@click.argument("audio_path", type=click.Path(dir_okay=False))
@click.option("--matrix-png", type=click.Path(dir_okay=False), default=None,
              help="Write the self-similarity matrix as a grayscale heatmap.")
@click.option("--matrix-csv", type=click.Path(dir_okay=False), default=None,
              help="Write the self-similarity matrix as CSV.")
@click.option("--beats", "beats_path", type=click.Path(dir_okay=False), default=None,
              help="Write detected beat times and tempo as JSON.")
@_audio_options
def analyze(audio_path, matrix_png, matrix_csv, beats_path, rate, n_fft, hop_length,
            n_mels, n_coeffs):
    """Compute the music matrix and beat grid for AUDIO_PATH."""
    audio, _, matrix = _pipeline(audio_path, rate, n_fft, hop_length, n_mels, n_coeffs)
    click.echo(
        f"frames={matrix.m} hop_s={matrix.frame_hop_seconds:.6f} "
        f"duration_s={audio.duration_s:.3f}"
    )
    if matrix_png:
        save_matrix_png(matrix, matrix_png)
        click.echo(f"matrix-png={matrix_png}")
    if matrix_csv:
        save_matrix_csv(matrix, matrix_csv)
        click.echo(f"matrix-csv={matrix_csv}")
    if beats_path:
        beats = detect_beats(audio)
        payload = {"tempo_bpm": beats.tempo_bpm, "times_s": list(beats.times)}
        Path(beats_path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        click.echo(f"beats={beats_path} tempo_bpm={beats.tempo_bpm:.2f} count={len(beats.times)}")


@cli.command()
@click.argument("audio_path", type=click.Path(dir_okay=False))
@click.option("--steps", type=int, default=100, show_default=True, help="Dance steps N.")
@click.option("--states", type=int, default=20, show_default=True, help="Agent states K.")
@click.option("--repr", "representation", type=click.Choice(sorted(_REPR_CHOICES)),
              default="action", show_default=True, help="Similarity representation.")
@click.option("--chunk", type=int, default=5, show_default=True, help="Steps per search chunk.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True,
              help="Trace JSON destination.")
@_audio_options
def choreograph(audio_path, steps, states, representation, chunk, output, rate, n_fft,
                hop_length, n_mels, n_coeffs):
    """Search for the dance whose structure best matches AUDIO_PATH."""
    audio, _, matrix = _pipeline(audio_path, rate, n_fft, hop_length, n_mels, n_coeffs)
    agent = AgentConfig(k_states=states, n_steps=steps)
    cfg = SearchConfig(agent=agent, representation=_REPR_CHOICES[representation],
                       chunk_size=chunk)
    seq, score = greedy_chunked_search(matrix, cfg)
    trace = trace_from_sequence(
        seq,
        _audio_info(audio, audio_path),
        approach="search",
        representation=cfg.representation,
        score=score.pearson,
    )
    write_trace(trace, output)
    click.echo(f"score={_fmt_score(score.pearson)} steps={steps} states={states} "
               f"repr={representation} trace={output}")


@cli.command()
@click.argument("audio_path", type=click.Path(dir_okay=False))
@click.option("--kind", type=click.Choice(sorted(k.value for k in BaselineKind)),
              required=True, help="Baseline generator.")
@click.option("--steps", type=int, default=100, show_default=True, help="Dance steps N.")
@click.option("--states", type=int, default=20, show_default=True, help="Agent states K.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="RNG seed (random kinds).")
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True,
              help="Trace JSON destination.")
@_audio_options
def baseline(audio_path, kind, steps, states, seed, output, rate, n_fft, hop_length,
             n_mels, n_coeffs):
    """Generate one of the four baseline dances for AUDIO_PATH."""
    audio = load_audio(audio_path, rate)
    agent = AgentConfig(k_states=states, n_steps=steps)
    baseline_kind = BaselineKind(kind)
    beats = None
    beat_steps: set[int] = set()
    if baseline_kind.synced:
        beats = detect_beats(audio, MfccConfig(n_fft=n_fft, hop_length=hop_length,
                                               n_mels=n_mels, n_coeffs=n_coeffs))
        beat_steps = beats_to_steps(beats, steps, audio.duration_s)
    seq = generate_baseline(baseline_kind, agent, beat_steps, seed=seed)
    trace = trace_from_sequence(
        seq,
        _audio_info(audio, audio_path),
        approach=baseline_kind.value,
        seed=seed if baseline_kind.random else None,
        rng=RNG_ALGORITHM if baseline_kind.random else None,
        beats_s=None if beats is None else beats.times,
    )
    write_trace(trace, output)
    click.echo(f"kind={kind} steps={steps} states={states} seed={seed} trace={output}")


@cli.command()
@click.argument("trace_path", type=click.Path(dir_okay=False))
@click.option("--vis", type=click.Choice(sorted(_VIS_CHOICES)), default="grid-dot",
              show_default=True, help="Visualization kind.")
@click.option("--fps", type=float, default=20.0, show_default=True, help="Frames per second.")
@click.option("--width", type=int, default=320, show_default=True)
@click.option("--height", type=int, default=240, show_default=True)
@click.option("--gif", "gif_path", type=click.Path(dir_okay=False), default=None,
              help="Animated GIF destination.")
@click.option("--frames", "frames_dir", type=click.Path(file_okay=False), default=None,
              help="Directory for frame_%06d.png dumps.")
def render(trace_path, vis, fps, width, height, gif_path, frames_dir):
    """Render TRACE_PATH to an animated GIF and/or PNG frames."""
    if gif_path is None and frames_dir is None:
        raise click.UsageError("pass --gif and/or --frames to produce output")
    trace = read_trace(trace_path)
    visualization = Visualization(kind=_VIS_CHOICES[vis], width=width, height=height, fps=fps)
    frames = render_frames(trace, visualization)
    if not frames:
        raise ChoreoError("trace renders to zero frames (duration x fps too small)")
    if gif_path:
        encode_gif(frames, fps, gif_path)
        click.echo(f"gif={gif_path} frames={len(frames)}")
    if frames_dir:
        written = write_frames(frames, frames_dir)
        click.echo(f"frames-dir={frames_dir} frames={len(written)}")


@cli.command()
@click.argument("trace_path", type=click.Path(dir_okay=False))
@click.argument("audio_path", type=click.Path(dir_okay=False))
@click.option("--repr", "representation", type=click.Choice(sorted(_REPR_CHOICES)),
              default="action", show_default=True, help="Similarity representation.")
@_audio_options
def score(trace_path, audio_path, representation, rate, n_fft, hop_length, n_mels, n_coeffs):
    """Recompute the alignment score of TRACE_PATH against AUDIO_PATH."""
    trace = read_trace(trace_path)
    _, _, matrix = _pipeline(audio_path, rate, n_fft, hop_length, n_mels, n_coeffs)
    result = alignment_score(matrix, trace.to_sequence(), _REPR_CHOICES[representation])
    click.echo(f"pearson={_fmt_score(result.pearson)} l_steps={result.l_steps} "
               f"m_frames={result.m_frames}")


@cli.command()
@click.argument("audio_path", type=click.Path(dir_okay=False))
@click.option("--steps", type=int, default=100, show_default=True, help="Dance steps N.")
@click.option("--states", type=int, default=20, show_default=True, help="Agent states K.")
@click.option("--seeds", default="0,1,2,3,4", show_default=True,
              help="Comma-separated seeds for the random baselines.")
@click.option("--chunk", type=int, default=5, show_default=True, help="Steps per search chunk.")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
              help="Write the table as CSV.")
@click.option("--fig", "fig_path", type=click.Path(dir_okay=False), default=None,
              help="Write the table as a bar-chart figure.")
@_audio_options
def table(audio_path, steps, states, seeds, chunk, csv_path, fig_path, rate, n_fft,
          hop_length, n_mels, n_coeffs):
    """Score all seven approaches on AUDIO_PATH and print the comparison."""
    try:
        seed_list = [int(s) for s in seeds.split(",") if s.strip() != ""]
    except ValueError as exc:
        raise click.BadParameter(f"--seeds must be comma-separated integers: {exc}")
    if not seed_list:
        raise click.BadParameter("--seeds must name at least one seed")
    audio, _, matrix = _pipeline(audio_path, rate, n_fft, hop_length, n_mels, n_coeffs)
    beats = detect_beats(audio)
    agent = AgentConfig(k_states=states, n_steps=steps)
    result = score_table(matrix, beats, agent, seed_list, chunk_size=chunk)
    click.echo(format_text(result), nl=False)
    if csv_path:
        Path(csv_path).write_text(to_csv(result), encoding="utf-8")
        click.echo(f"csv={csv_path}")
    if fig_path:
        save_score_figure(result, fig_path)
        click.echo(f"fig={fig_path}")


def _check_oracle_steps(ctx, param, value):
    if value > 10:
        raise click.BadParameter("exhaustive oracle is limited to --steps <= 10")
    if value < 1:
        raise click.BadParameter("--steps must be >= 1")
    return value


@cli.command(name="oracle-check")
@click.argument("audio_path", type=click.Path(dir_okay=False))
@click.option("--steps", type=int, default=5, show_default=True, callback=_check_oracle_steps,
              help="Dance steps N (<= 10).")
@click.option("--states", type=int, default=20, show_default=True, help="Agent states K.")
@click.option("--repr", "representation", type=click.Choice(sorted(_REPR_CHOICES)),
              default="action", show_default=True, help="Similarity representation.")
@click.option("--chunk", type=int, default=5, show_default=True, help="Steps per search chunk.")
@_audio_options
def oracle_check(audio_path, steps, states, representation, chunk, rate, n_fft, hop_length,
                 n_mels, n_coeffs):
    """Compare the greedy search against exhaustive enumeration."""
    _, _, matrix = _pipeline(audio_path, rate, n_fft, hop_length, n_mels, n_coeffs)
    agent = AgentConfig(k_states=states, n_steps=steps)
    cfg = SearchConfig(agent=agent, representation=_REPR_CHOICES[representation],
                       chunk_size=chunk)
    greedy_seq, greedy_score = greedy_chunked_search(matrix, cfg)
    exhaustive_seq, exhaustive_score = exhaustive_search(matrix, cfg)
    click.echo(f"greedy     score={_fmt_score(greedy_score.pearson)} "
               f"actions={''.join(a.name[0] for a in greedy_seq.actions)}")
    click.echo(f"exhaustive score={_fmt_score(exhaustive_score.pearson)} "
               f"actions={''.join(a.name[0] for a in exhaustive_seq.actions)}")
    if greedy_seq.actions == exhaustive_seq.actions:
        click.echo("result: identical")
    else:
        gap = exhaustive_score.value - greedy_score.value
        click.echo(f"result: exhaustive better by {gap:.6e}")


def main(argv=None) -> int:
    """Run the CLI, mapping failures onto the documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.Abort:
        click.echo("error: aborted", err=True)
        return 1
    except (ChoreoError, ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


def entry() -> None:
    sys.exit(main())
