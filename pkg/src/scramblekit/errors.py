"""Exception types shared across the toolkit."""


class ScramblekitError(Exception):
    """Base class for all toolkit errors."""


class DerangementInfeasible(ScramblekitError):
    """No zero-fixed-point permutation exists for the given atoms."""


class EmptyCorpus(ScramblekitError):
    """Corpus contains no sentences."""


class InvalidSpan(ScramblekitError):
    """Entity annotation span is out of bounds, overlapping, or unsorted."""


class Misaligned(ScramblekitError):
    """Two corpora expected to be line-aligned differ in shape."""


class EmptyReference(ScramblekitError):
    """BLEU reference token list is empty."""


class ZeroDenominator(ScramblekitError):
    """Relative-difference denominator is zero for the selected mode."""


class ProtocolError(ScramblekitError):
    """Remote scorer violated the wire protocol."""


class ScorerTimeout(ScramblekitError):
    """Remote scorer did not answer within the configured timeout."""


class EmptySentence(ScramblekitError):
    """PLL requested for a sentence with no tokens."""


class AllTokensSkipped(ScramblekitError):
    """Scorer skipped every token of a sentence; PLL undefined."""


class StimulusParseError(ScramblekitError):
    """Stimulus file line failed validation."""


class InvalidMaskIndex(StimulusParseError):
    """Stimulus mask index is outside the token list."""


class DuplicateId(StimulusParseError):
    """Two stimuli share an id."""


class MissingNumberClass(ScramblekitError):
    """Balancing requires number_class on every stimulus."""


class EmptyClass(ScramblekitError):
    """A condition has no stimuli for one inflection class."""


class AllSkipped(ScramblekitError):
    """Every probe item was skipped; accuracy undefined."""
