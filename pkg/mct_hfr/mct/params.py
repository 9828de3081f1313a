"""
Parameter layout and storage.

Canonical parameter order (also the checkpoint order):
1. `encoder.<m>.conv.{weight,bias}` for m in a, v, l
2. `mrau.<i>.<m>.{wq,wk,wv,wo,ffn1.weight,ffn1.bias,ffn2.weight,
   ffn2.bias,ln1.gain,ln1.bias,ln2.gain,ln2.bias}` per layer i, then m
3. `pool.<m>.query`
4. `classifier.<j>.{weight,bias}`
5. if decoders are enabled: `lfi.<m>.proj_in.{weight,bias}`,
   `lfi.<m>.block.<k>.{sau,cau}.{wq,wk,wv,wo,ln.gain,ln.bias}`,
   `lfi.<m>.proj_out.{weight,bias}`
6. if alignment is enabled: `gfa.align.{weight,bias}`
"""

from typing import Iterator
from collections.abc import Mapping

import numpy as np

from mct_hfr.util import MODALITIES, get_rng, STREAM_INIT
from mct_hfr.tensorlab import Tensor, xavier_uniform, zeros, ones
from .config import ModelConfig


_ATTENTION = ("wq", "wk", "wv", "wo")


def _attention_shapes(
    prefix: str, d: int
) -> list[tuple[str, tuple[int, ...]]]:
    return [(f"{prefix}.{w}", (d, d)) for w in _ATTENTION]


def _ln_shapes(prefix: str, d: int) -> list[tuple[str, tuple[int, ...]]]:
    return [(f"{prefix}.gain", (d,)), (f"{prefix}.bias", (d,))]


def _affine_shapes(
    prefix: str, d_in: int, d_out: int
) -> list[tuple[str, tuple[int, ...]]]:
    return [(f"{prefix}.weight", (d_in, d_out)), (f"{prefix}.bias", (d_out,))]


def mrau_layer_shapes(
    cfg: ModelConfig, layer: int = 0
) -> list[tuple[str, tuple[int, ...]]]:
    """Returns the parameter layout of one re-scaled attention layer."""
    shapes = []
    for m in MODALITIES:
        prefix = f"mrau.{layer}.{m}"
        shapes += _attention_shapes(prefix, cfg.d)
        shapes += _affine_shapes(f"{prefix}.ffn1", cfg.d, cfg.hidden)
        shapes += _affine_shapes(f"{prefix}.ffn2", cfg.hidden, cfg.d)
        shapes += _ln_shapes(f"{prefix}.ln1", cfg.d)
        shapes += _ln_shapes(f"{prefix}.ln2", cfg.d)
    return shapes


def classifier_widths(cfg: ModelConfig) -> list[int]:
    """Returns input/output widths of the classifier layers."""
    return (
        [len(MODALITIES) * cfg.d]
        + [cfg.d] * (cfg.classifier_layers - 1)
        + [cfg.classes]
    )


def param_shapes(
    cfg: ModelConfig, inference: bool = False
) -> list[tuple[str, tuple[int, ...]]]:
    """
    Returns the canonical `(name, shape)`-layout for `cfg`.

    Keyword arguments:
    cfg -- model configuration
    inference -- if `True`, omit the reconstruction branch
                 (default False)
    """
    shapes = []
    for m, dim, k in zip(MODALITIES, cfg.dims, cfg.kernel_sizes):
        shapes += [
            (f"encoder.{m}.conv.weight", (k, dim, cfg.d)),
            (f"encoder.{m}.conv.bias", (cfg.d,)),
        ]
    for layer in range(cfg.layers):
        shapes += mrau_layer_shapes(cfg, layer)
    shapes += [(f"pool.{m}.query", (cfg.d,)) for m in MODALITIES]
    widths = classifier_widths(cfg)
    for j, (d_in, d_out) in enumerate(zip(widths[:-1], widths[1:])):
        shapes += _affine_shapes(f"classifier.{j}", d_in, d_out)
    if inference:
        return shapes
    if cfg.lfi_enabled:
        for m, dim in zip(MODALITIES, cfg.dims):
            shapes += _affine_shapes(f"lfi.{m}.proj_in", dim, cfg.d)
            for k in range(cfg.decoder_blocks):
                for kind in ("sau", "cau"):
                    prefix = f"lfi.{m}.block.{k}.{kind}"
                    shapes += _attention_shapes(prefix, cfg.d)
                    shapes += _ln_shapes(f"{prefix}.ln", cfg.d)
            shapes += _affine_shapes(f"lfi.{m}.proj_out", cfg.d, dim)
    if cfg.gfa_enabled:
        fused = len(MODALITIES) * cfg.d
        shapes += _affine_shapes("gfa.align", fused, fused)
    return shapes


def _fans(shape: tuple[int, ...]) -> tuple[int, int]:
    if len(shape) == 3:
        # temporal kernel (k, d_in, d_out)
        return shape[0] * shape[1], shape[0] * shape[2]
    if len(shape) == 2:
        return shape
    return shape[0], 1


class ParamStore(Mapping):
    """
    Ordered, name-addressable collection of parameter tensors.

    Keyword arguments:
    tensors -- mapping of names to tensors in canonical order
    """

    def __init__(self, tensors: Mapping[str, Tensor]) -> None:
        self._tensors = dict(tensors)

    def __getitem__(self, name: str) -> Tensor:
        return self._tensors[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._tensors)

    def __len__(self) -> int:
        return len(self._tensors)

    @property
    def num_parameters(self) -> int:
        """Returns the total number of scalar parameters."""
        return sum(t.size for t in self._tensors.values())

    def signature(self) -> str:
        """Returns a compact shape signature `name:shape;...`."""
        return signature(
            [(name, t.shape) for name, t in self._tensors.items()]
        )

    def subset(self, *prefixes: str) -> "ParamStore":
        """Returns the (shared) tensors whose names start with `prefixes`."""
        return ParamStore(
            {
                name: t
                for name, t in self._tensors.items()
                if name.startswith(prefixes)
            }
        )

    def zero_grad(self) -> None:
        """Resets all gradient buffers."""
        for t in self._tensors.values():
            t.zero_grad()

    def gradients(self) -> dict[str, np.ndarray]:
        """
        Returns gradients by name; parameters without gradient (unused
        in the last backward) report zeros.
        """
        return {
            name: np.zeros_like(t.values) if t.grad is None else t.grad
            for name, t in self._tensors.items()
        }

    def clone(self) -> "ParamStore":
        """Returns a deep copy without gradients."""
        return ParamStore(
            {
                name: Tensor(
                    t.values.copy(), requires_grad=True, name=name
                )
                for name, t in self._tensors.items()
            }
        )


def signature(shapes: list[tuple[str, tuple[int, ...]]]) -> str:
    """Returns a compact signature for a parameter layout."""
    return ";".join(
        f"{name}:{'x'.join(map(str, shape))}" for name, shape in shapes
    )


def init_params(cfg: ModelConfig, seed: int) -> ParamStore:
    """
    Initializes all parameters for `cfg` in canonical order.

    Matrices and temporal kernels are drawn from a Xavier-uniform
    distribution, biases are zero, layer normalization gains one.

    Keyword arguments:
    cfg -- model configuration
    seed -- initialization seed
    """
    rng = get_rng(seed, STREAM_INIT)
    dtype = cfg.numpy_dtype
    tensors = {}
    for name, shape in param_shapes(cfg):
        if name.endswith(".bias"):
            tensors[name] = zeros(shape, dtype=dtype, name=name)
        elif name.endswith(".gain"):
            tensors[name] = ones(shape, dtype=dtype, name=name)
        else:
            tensors[name] = xavier_uniform(
                rng, shape, *_fans(shape), dtype=dtype, name=name
            )
    return ParamStore(tensors)
