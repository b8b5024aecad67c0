"""scramblekit: corpus word-order perturbation and masked-LM probing tools."""

__version__ = "0.1.0"

from .corpus import (
    Atom,
    AtomSequence,
    SeedPolicy,
    Sentence,
    effective_seed,
    iter_corpus,
    rng_from_seed,
    tokenize,
)
from .errors import (
    AllSkipped,
    AllTokensSkipped,
    DerangementInfeasible,
    DuplicateId,
    EmptyClass,
    EmptyCorpus,
    EmptyReference,
    EmptySentence,
    InvalidMaskIndex,
    InvalidSpan,
    Misaligned,
    MissingNumberClass,
    ProtocolError,
    ScorerTimeout,
    ScramblekitError,
    StimulusParseError,
    ZeroDenominator,
)
from .metrics import BleuReport, DeltaInput, corpus_shuffle_report, relative_difference, sentence_bleu
from .permute import (
    PermuteConfig,
    WindowConfig,
    conjoin_ngrams,
    derange,
    derangement_feasible,
    permute_sentence,
    permute_sentence_spans,
    window_shuffle,
)
from .pll import BpllResult, PllResult, bpll, pll
from .probe import (
    ConditionStats,
    ProbeReport,
    Stimulus,
    balance_stimuli,
    convert_tsv,
    load_stimuli,
    run_probe,
)
from .resample import (
    AtomTable,
    CorpusShape,
    EntityAnnotation,
    build_atom_table,
    load_annotations,
    resample_corpus,
    resample_lines,
)
from .scorers import (
    PROTOCOL_NAME,
    PROTOCOL_VERSION,
    RemoteScorer,
    Scorer,
    ScoreRequest,
    ScoreResponse,
    UniformScorer,
    UnigramScorer,
)
