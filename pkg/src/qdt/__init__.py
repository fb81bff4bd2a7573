"""Question Decomposition Trees: grammar, clue-guided separator insertion, metrics."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    Kind, Token, TokenSeq, QdtTree, QuestionNode, DescriptionNode, TextSegment, InnerQuestion,
    ValidationReport, tokenize, parse_linear, serialize, strip_separators, validate, depth, to_graph,
)
from .decipher import (  # noqa: E402
    Clue, Query, CandidateOption, Branch, Scorer, AlignScorer, derive_queries, approximate_position,
    build_options, align_score, select_branch, merge_branches, decipher, degrade_to_pair,
)
from .corruption import CorruptionRates, TrainingRecord, extract_branches, negative_options, corrupt, generate_training_set  # noqa: E402,E501
