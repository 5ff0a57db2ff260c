"""Weakly-supervised retrieval and classification of complaint posts.

The pipeline ingests already-collected social media posts, grows a lexicon of
trigger phrases by iterative bootstrapping, extracts linguistic / sentiment /
information-cue features, and trains an elastic-net logistic regression to
separate complaints from non-complaints.  A small HTTP service and web UI put
human annotators in the loop.
"""

__version__ = "0.1.0"
