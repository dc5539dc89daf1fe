"""Table quality metrics: relevancy, faithfulness, missingness, inconsistency."""
from .metrics import (
    RECONSTRUCTED_QUESTIONS,
    QualityScores,
    QualityThresholds,
    TableQuality,
    answer_relevancy,
    column_inconsistency,
    context_relevancy,
    faithfulness,
    flag_records,
    inconsistency,
    missingness,
    record_answer_text,
    score_record,
    score_records,
    split_sentences,
    table_quality,
)

__all__ = [
    "QualityScores",
    "QualityThresholds",
    "TableQuality",
    "RECONSTRUCTED_QUESTIONS",
    "answer_relevancy",
    "context_relevancy",
    "faithfulness",
    "missingness",
    "inconsistency",
    "column_inconsistency",
    "record_answer_text",
    "split_sentences",
    "score_record",
    "score_records",
    "flag_records",
    "table_quality",
]
