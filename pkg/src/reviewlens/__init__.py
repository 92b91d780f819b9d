"""reviewlens: voice-of-customer analytics from review text.

Pipeline: ingest a review corpus, discover and consolidate an
attribute/feature catalog, extract per-review sentiment records through a
multi-step prompting pipeline, validate against reference annotations, and
turn the structured records into rating models, importance weights,
perceptual maps, and what-if uplift simulations served over HTTP.
"""

__version__ = "0.1.0"
