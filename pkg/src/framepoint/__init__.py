"""framepoint: frame-level event timestamping.

Per-frame scores from a lightweight scorer are trained with either a
class-reweighted binary objective or an inhomogeneous-Poisson likelihood
over a piecewise-constant intensity; timestamps are then extracted in a
single parallel pass, exactly, from the trained scores.
"""

from . import _kernels
from .errors import (CheckpointFormatError, ConfigError, DatasetFormatError,
                     DomainError, EvaluationError, FramepointError,
                     GenerationError, ShapeError, TrainingDivergedError)
from .extract import (PosteriorDensity, TimestampPrediction, binary_extract,
                      grid_oracle_mode, posterior_log_density, posterior_mode,
                      posterior_modes_all, sample_ihp)
from .grid import EventLabels, FrameGrid, frames_to_seconds
from .hazard import (CumulativeHazard, IntensityProfile, build_cumulative,
                     eval_cumulative, eval_hazard, invert_cumulative)
from .losses import (AUTO_WEIGHT, FrameScores, LossResult, binary_loss,
                     binary_loss_from_marks, interpolated_loss, poisson_nll,
                     poisson_nll_from_times)
from .metrics import MetricReport, score, stratify
from .scorer import (ScorerConfig, ScorerModel, init_model, load_model,
                     save_model, score_frames)
from .synth import (FrameFeatures, GenConfig, TrainingSet, generate,
                    read_dataset, write_dataset)
from .training import TrainConfig, TrainResult, train

__version__ = "0.1.0"

kernel_backend = _kernels.active_name
