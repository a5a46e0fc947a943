# Copyright (C) 2026 The f2f Authors
# SPDX-License-Identifier: Apache-2.0
"""Python bindings for the f2f image-editing-through-video toolkit."""

from ._f2f import (
    DEFAULT_STRIDE,
    Error,
    cache_key,
    caption_instruction,
    collage_digest,
    edit,
    fit_pca,
    load_manifest,
    parse_selection_reply,
    pixel_digest,
    postprocess,
    preprocess,
    read_image,
    sampled_indices,
    selection_instruction,
    stub_image_embed,
    stub_image_similarity,
    stub_perceptual,
    stub_text_image_score,
    write_png,
)

__version__ = "0.1.0"
