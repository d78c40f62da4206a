"""choreo: discover dance choreographies aligned to music structure.

The pipeline: decode audio -> MFCC frames -> music self-similarity matrix
-> greedy chunked search over discrete dance actions maximizing Pearson
correlation between the music matrix and the (upsampled) dance matrix.
Baseline generators, an exhaustive search oracle, renderers and a
comparison harness round out the toolkit.
"""

from .audio import (
    DEFAULT_SAMPLE_RATE,
    AudioBuffer,
    MfccConfig,
    MfccFrames,
    compute_mfcc,
    load_audio,
)
from .baselines import BaselineKind, SplitMix64, allowed_actions, generate_baseline
from .dance import (
    ACTION_ORDER,
    REPRESENTATIONS,
    Action,
    AgentConfig,
    DanceMatrix,
    DanceSequence,
    apply_actions,
    dance_matrix,
    upsample_nearest,
)
from .errors import (
    AudioDecodeError,
    AudioTooShortError,
    ChoreoError,
    EmptyAudioError,
    TraceError,
    UnsupportedAudioError,
)
from .evaluate import ScoreTable, score_table
from .features import (
    BeatTimes,
    MusicMatrix,
    beats_to_steps,
    detect_beats,
    music_matrix,
)
from .objective import AlignmentScore, alignment_score, music_window, pearson
from .render import Visualization, encode_gif, render_frames, write_frames
from .search import SearchConfig, exhaustive_search, greedy_chunked_search
from .trace import (
    AudioInfo,
    DanceTrace,
    TraceParams,
    read_trace,
    trace_from_sequence,
    write_trace,
)

__version__ = "0.1.0"
