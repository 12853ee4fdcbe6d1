"""Zero-shot implicit discourse relation classification toolkit.

Pipeline: parse discourse-annotated corpora into canonical JSONL, attach
precomputed multilingual sentence vectors (EMB1 files), compose relation
vectors, train one-vs-other binary MLP classifiers with balanced negative
resampling, and evaluate cross-lingually with multi-run statistics and
Mann-Whitney significance testing.
"""

__version__ = "0.1.0"

from .corpus import (
    PDTB_STANDARD,
    DiscourseRelation,
    ParseError,
    PipeColumnMap,
    SenseTop,
    SplitScheme,
    assign_split,
    parse_jsonl,
    parse_pipe_file,
    select_implicit,
    sense_histogram,
    top_sense,
    write_jsonl,
)
from .embeddings import (
    CoverageError,
    EmbeddingStore,
    check_coverage,
    missing_keys,
    read_embedding_file,
    write_embedding_file,
)
from .evaluation import (
    ConfusionCounts,
    SignificanceResult,
    always_positive_baseline,
    confusion,
    evaluate_model,
    f1,
    macro_average,
    mann_whitney_u,
    report,
)
from .features import compose
from .model import MlpClassifier, TrainExample, bce_loss, load_model
from .training import (
    BinaryTask,
    RunDistribution,
    TrainConfig,
    balanced_epoch,
    build_task,
    derive_seed,
    run_experiment,
    train_run,
)

__all__ = [
    "__version__",
    "PDTB_STANDARD",
    "DiscourseRelation",
    "ParseError",
    "PipeColumnMap",
    "SenseTop",
    "SplitScheme",
    "assign_split",
    "parse_jsonl",
    "parse_pipe_file",
    "select_implicit",
    "sense_histogram",
    "top_sense",
    "write_jsonl",
    "CoverageError",
    "EmbeddingStore",
    "check_coverage",
    "missing_keys",
    "read_embedding_file",
    "write_embedding_file",
    "ConfusionCounts",
    "SignificanceResult",
    "always_positive_baseline",
    "confusion",
    "evaluate_model",
    "f1",
    "macro_average",
    "mann_whitney_u",
    "report",
    "compose",
    "MlpClassifier",
    "TrainExample",
    "bce_loss",
    "load_model",
    "BinaryTask",
    "RunDistribution",
    "TrainConfig",
    "balanced_epoch",
    "build_task",
    "derive_seed",
    "run_experiment",
    "train_run",
]
