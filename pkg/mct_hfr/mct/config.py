"""Model hyper-parameters."""

from typing import Optional
from dataclasses import dataclass

import numpy as np

from mct_hfr.errors import ConfigError
from mct_hfr.models import DataModel
from mct_hfr.util import MODALITIES


@dataclass
class ModelConfig(DataModel):
    """
    Architecture hyper-parameters of the modality-collaborative
    transformer and its reconstruction branch.

    Keyword arguments:
    classes -- class count C
               (default 4)
    dims -- per-modality input feature dimensions (d_a, d_v, d_l)
            (default (20, 16, 24))
    d -- shared hidden dimension
         (default 128)
    layers -- number N of stacked re-scaled attention layers
              (default 4)
    heads -- attention heads
             (default 4)
    d_k -- per-head dimension; `heads * d_k` has to equal `d`
           (default 32)
    kernel_sizes -- odd temporal kernel sizes per modality
                    (default (3, 3, 1))
    max_lengths -- per-modality maximum sequence lengths
                   (default (400, 40, 50))
    ffn_hidden -- inner dimension of the feed-forward blocks
                  (default None; uses 2 * d)
    classifier_layers -- number of affine layers of the classifier;
                         hidden layers have width d and use ReLU
                         (default 1)
    hfr -- whether the reconstruction branch exists at all
           (default True)
    use_lfi -- enable local feature imagination (decoders)
               (default True)
    use_gfa -- enable global feature alignment
               (default True)
    gfa_metric -- distance used by the alignment loss, one of 'cmd',
                  'cosine', 'jsd', 'smooth_l1'
                  (default 'cmd')
    cmd_order -- highest central moment K used by 'cmd'
                 (default 5)
    decoder_blocks -- number of self-/cross-attention block pairs per
                      decoder
                      (default 1)
    use_gamma_b -- apply the per-modality balance factor to keys
                   (default True)
    use_gamma_e -- apply the shared extrapolation factor to keys
                   (default True)
    ln_eps -- layer normalization epsilon
              (default 1e-5)
    dtype -- floating point precision ('float32' or 'float64')
             (default 'float32')
    """

    classes: int = 4
    dims: tuple[int, int, int] = (20, 16, 24)
    d: int = 128
    layers: int = 4
    heads: int = 4
    d_k: int = 32
    kernel_sizes: tuple[int, int, int] = (3, 3, 1)
    max_lengths: tuple[int, int, int] = (400, 40, 50)
    ffn_hidden: Optional[int] = None
    classifier_layers: int = 1
    hfr: bool = True
    use_lfi: bool = True
    use_gfa: bool = True
    gfa_metric: str = "cmd"
    cmd_order: int = 5
    decoder_blocks: int = 1
    use_gamma_b: bool = True
    use_gamma_e: bool = True
    ln_eps: float = 1e-5
    dtype: str = "float32"

    def __post_init__(self):
        # pylint: disable=import-outside-toplevel
        from mct_hfr.hfr.metrics import METRIC_OPTIONS

        self.dims = tuple(self.dims)
        self.kernel_sizes = tuple(self.kernel_sizes)
        self.max_lengths = tuple(self.max_lengths)
        problems = []
        for name in ("dims", "kernel_sizes", "max_lengths"):
            if len(getattr(self, name)) != len(MODALITIES):
                problems.append(
                    f"{name} needs {len(MODALITIES)} entries (got "
                    + f"{len(getattr(self, name))})."
                )
        if self.heads < 1 or self.d_k < 1 or self.heads * self.d_k != self.d:
            problems.append(
                f"heads * d_k must equal d (got {self.heads} * {self.d_k} "
                + f"!= {self.d})."
            )
        if any(k < 1 or k % 2 == 0 for k in self.kernel_sizes):
            problems.append(
                f"kernel sizes must be odd (got {list(self.kernel_sizes)})."
            )
        if any(t < 1 for t in self.max_lengths) or any(
            dim < 1 for dim in self.dims
        ):
            problems.append("max_lengths and dims must be positive.")
        elif sum(self.max_lengths) < 2:
            problems.append("max_lengths must sum to at least 2.")
        if self.classes < 2:
            problems.append(
                f"classes must be at least 2 (got {self.classes})."
            )
        if self.layers < 0:
            problems.append(
                f"layers must be non-negative (got {self.layers})."
            )
        if self.ffn_hidden is not None and self.ffn_hidden < 1:
            problems.append("ffn_hidden must be positive.")
        if self.classifier_layers < 1:
            problems.append("classifier_layers must be at least 1.")
        if self.decoder_blocks < 1:
            problems.append("decoder_blocks must be at least 1.")
        if self.cmd_order < 1:
            problems.append("cmd_order must be at least 1.")
        if self.gfa_metric not in METRIC_OPTIONS:
            problems.append(
                f"unknown gfa_metric '{self.gfa_metric}' (allowed: "
                + ", ".join(sorted(METRIC_OPTIONS))
                + ")."
            )
        if self.dtype not in ("float32", "float64"):
            problems.append(
                f"dtype must be 'float32' or 'float64' (got '{self.dtype}')."
            )
        if problems:
            raise ConfigError(problems)

    @property
    def hidden(self) -> int:
        """Returns the feed-forward inner dimension."""
        return 2 * self.d if self.ffn_hidden is None else self.ffn_hidden

    @property
    def numpy_dtype(self) -> np.dtype:
        """Returns the numpy dtype of parameters and activations."""
        return np.dtype(self.dtype)

    @property
    def lfi_enabled(self) -> bool:
        """Returns `True` if decoders are part of the model."""
        return self.hfr and self.use_lfi

    @property
    def gfa_enabled(self) -> bool:
        """Returns `True` if the alignment map is part of the model."""
        return self.hfr and self.use_gfa
