"""Python interface to the litscape analysis core."""

from ._litscape import (
    ConfigError,
    Corpus,
    DegenerateSample,
    Error,
    Lexicon,
    MalformedLine,
    MissingStage,
    RunReport,
    TermVocabulary,
    attach_metadata,
    compare_counts,
    compile_lexicon,
    emit_plot_data,
    extract_terms,
    from_canonical,
    heading_article_counts,
    make_title,
    mention_counts,
    parse_pubtator,
    pdc_cluster,
    read_pubtator,
    run_pipeline,
    tag_text,
    vocabulary_from_sets,
    weekly_histogram,
    wilson_interval,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.3.0"
