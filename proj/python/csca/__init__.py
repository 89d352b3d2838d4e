# Copyright 2026 The CSCA Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Creativity scoring of drawings on a frozen vision-language backbone."""

from ._csca import (
    Checkpoint,
    ChannelStats,
    ConfigError,
    CscaError,
    DegenerateInputError,
    DimensionError,
    DrawingRecord,
    EncoderBundle,
    ImageError,
    ParseError,
    Predictor,
    TrainedRun,
    ablation_config,
    assign_primary_splits,
    average_ranks,
    binned_rating_means,
    config_fingerprint,
    default_config,
    evaluate,
    ingest,
    ink_intensity,
    load_inverted,
    load_store,
    make_synthetic,
    plcc,
    preprocess,
    pretrained_bundle,
    resolve_config,
    save_store,
    set_log_level,
    spearman_p_value,
    srcc,
    style_rating_correlation,
    toy_bundle,
    train,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
