"""Exception hierarchy with stable machine-readable error codes.

Every error raised by this package carries a ``code`` string that is stable
across releases; the CLI surfaces it in a structured JSON error object.
"""

from __future__ import annotations


class DedupError(Exception):
    """Base class for all package errors."""

    code = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def to_json(self) -> dict:
        return {"code": self.code, "message": self.message}


class SchemaError(DedupError):
    """Malformed input file or record."""

    code = "schema"


class UnknownIdError(DedupError):
    """An id that is not part of the dataset."""

    code = "unknown-id"


class InvalidPairError(DedupError):
    """Pair with identical endpoints."""

    code = "invalid-pair"


class InvalidClusteringError(DedupError):
    """Blocks that are not a partition of the expected id set."""

    code = "invalid-clustering"


class InvalidTreeError(DedupError):
    """Tree that is not strictly binary or whose leaves mismatch the dataset."""

    code = "invalid-tree"


class InvalidPruningError(DedupError):
    """Frontier that is not an antichain covering all leaves."""

    code = "invalid-pruning"


class MissingGroundTruthError(DedupError):
    """Operation requires cluster labels on the dataset."""

    code = "missing-ground-truth"


class MissingTextError(DedupError):
    """Text-based distance requested for a record with no text."""

    code = "missing-text"


class MissingDistanceError(DedupError):
    """Precomputed matrix does not cover a requested pair."""

    code = "missing-distance"


class InvalidDistanceError(DedupError):
    """Distance outside [0, 1] or other distance-model violation."""

    code = "invalid-distance"


class NoPositivePairsError(DedupError):
    """No same-cluster pair exists; alpha is undefined."""

    code = "no-positive-pairs"


class NoPairsUnderThresholdError(DedupError):
    """No pair within the distance threshold; beta is undefined."""

    code = "no-pairs-under-threshold"


class NoNegativePairsError(DedupError):
    """Every pair is same-cluster; the negative-pair sampler cannot terminate."""

    code = "no-negative-pairs"


class EmptySupportError(DedupError):
    """A reference distribution has empty support."""

    code = "empty-support"


class EmptyIndexError(DedupError):
    """Neighbor index has no pair under the threshold."""

    code = "empty-index"


class BudgetExhaustedError(DedupError):
    """Rejection loop hit its attempt cap without accepting a pair."""

    code = "budget-exhausted"


class EmptySampleError(DedupError):
    """Loss estimation over an empty sample."""

    code = "empty-sample"


class InvalidSampleError(DedupError):
    """Sample with the wrong label kind or an invalid requested size."""

    code = "invalid-sample"


class DegenerateTruthError(DedupError):
    """Ground truth with no positive or no negative pairs where both are needed."""

    code = "degenerate-truth"


class DegenerateWeightsError(DedupError):
    """Loss weights and skew that make the normalizing denominator zero."""

    code = "degenerate-weights"


class ParameterError(DedupError):
    """Out-of-range numeric parameter."""

    code = "parameter"


class InstanceTooLargeError(DedupError):
    """Exhaustive solver invoked beyond its enforced size cap."""

    code = "instance-too-large"


class PairSetTooLargeError(DedupError):
    """Shattering check invoked on more pairs than the enumeration cap."""

    code = "pair-set-too-large"


class OracleTimeoutError(DedupError):
    """Interactive oracle did not receive an answer in time."""

    code = "oracle-timeout"


class OracleClosedError(DedupError):
    """Interactive oracle session was closed before an answer arrived."""

    code = "oracle-closed"
