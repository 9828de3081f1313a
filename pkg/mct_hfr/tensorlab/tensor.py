"""
Definition of the `Tensor`-class: a dense numpy-backed array that
records the operations applied to it so that gradients can be
computed in reverse mode.
"""

from typing import Any, Callable, Iterable, Optional, Sequence
from contextlib import contextmanager
import threading

import numpy as np

from mct_hfr.errors import DimensionError, GraphError


_state = threading.local()


def grad_enabled() -> bool:
    """Returns `True` if operations are currently being recorded."""
    return getattr(_state, "enabled", True)


@contextmanager
def no_grad():
    """
    Context manager that disables graph recording for the current
    thread, e.g., during evaluation.
    """
    previous = grad_enabled()
    _state.enabled = False
    try:
        yield
    finally:
        _state.enabled = previous


def unbroadcast(grad: np.ndarray, shape: Sequence[int]) -> np.ndarray:
    """
    Sums `grad` over the axes that were introduced or expanded when
    broadcasting an operand of `shape`.
    """
    shape = tuple(shape)
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class Tensor:
    """
    Dense n-dimensional floating point array participating in a
    reverse-mode computation graph.

    Leaves are created by the user (e.g. parameters with
    `requires_grad=True`); every operation on tensors that require
    gradients returns a non-leaf that remembers its inputs and a
    backward-closure.

    Keyword arguments:
    values -- array-like data; integer data is converted to float64
    requires_grad -- whether gradients are accumulated for this leaf
                     (default False)
    dtype -- optional dtype override
             (default None; keeps floating dtype of `values`)
    name -- optional name (used in error messages)
            (default None)
    """

    __array_priority__ = 100

    def __init__(
        self,
        values: Any,
        requires_grad: bool = False,
        dtype: Optional[np.dtype | type] = None,
        name: Optional[str] = None,
    ) -> None:
        array = np.asarray(values, dtype=dtype)
        if not np.issubdtype(array.dtype, np.floating):
            array = array.astype(np.float64)
        self.values: np.ndarray = array
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.name = name
        self._parents: tuple["Tensor", ...] = ()
        self._backward_fn: Optional[BackwardFn] = None
        self._op: Optional[str] = None
        self._consumed = False

    # ------------------------------------------------------------------
    # basic properties
    @property
    def shape(self) -> tuple[int, ...]:
        """Returns the tensor's extents."""
        return self.values.shape

    @property
    def ndim(self) -> int:
        """Returns number of dimensions."""
        return self.values.ndim

    @property
    def size(self) -> int:
        """Returns number of elements."""
        return self.values.size

    @property
    def dtype(self) -> np.dtype:
        """Returns the tensor's dtype."""
        return self.values.dtype

    @property
    def is_leaf(self) -> bool:
        """Returns `True` if this tensor was not produced by an op."""
        return self._op is None

    def numpy(self) -> np.ndarray:
        """Returns (a view on) the value buffer."""
        return self.values

    def item(self) -> float:
        """Returns the value of a single-element tensor."""
        return float(self.values.reshape(-1)[0])

    def detach(self) -> "Tensor":
        """Returns a new leaf sharing this tensor's values."""
        return Tensor(self.values, dtype=self.dtype)

    def zero_grad(self) -> None:
        """Resets the gradient buffer."""
        self.grad = None

    def __repr__(self) -> str:
        return (
            f"Tensor(shape={list(self.shape)}, dtype={self.dtype}"
            + (f", name='{self.name}'" if self.name else "")
            + (", requires_grad=True" if self.requires_grad else "")
            + ")"
        )

    # ------------------------------------------------------------------
    # graph construction
    def _const(self, other: Any) -> "Tensor":
        if isinstance(other, Tensor):
            return other
        return Tensor(np.asarray(other, dtype=self.dtype))

    @staticmethod
    def _make(
        values: np.ndarray,
        parents: tuple["Tensor", ...],
        backward_fn: BackwardFn,
        op: str,
    ) -> "Tensor":
        out = Tensor(values)
        out._op = op
        if grad_enabled() and any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._parents = parents
            out._backward_fn = backward_fn
        return out

    # ------------------------------------------------------------------
    # reverse mode
    def _topological_order(self) -> list["Tensor"]:
        order: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))
        assert len(order) == len(visited), "computation graph has a cycle"
        return order

    def backward(self) -> None:
        """
        Computes gradients of this scalar w.r.t. every leaf with
        `requires_grad=True` reachable in its graph. Reachable leaves
        that receive no gradient (every path is cut by an op that
        reports `None`) get zeros.

        A graph can be consumed only once; leaves must not hold a
        gradient from an earlier call (reset with `zero_grad`).
        """
        if self._consumed:
            raise GraphError(
                "Backward called on a consumed computation graph."
            )
        if self.size != 1:
            raise GraphError(
                f"Backward requires a scalar loss but got shape "
                + f"{list(self.shape)}."
            )
        if not self.requires_grad:
            raise GraphError("Loss does not depend on any leaf gradient.")

        order = self._topological_order()
        for node in order:
            if node.is_leaf and node.grad is not None:
                raise GraphError(
                    f"Leaf '{node.name or repr(node)}' holds a gradient "
                    + "from a previous backward; call 'zero_grad' first."
                )

        grads: dict[int, np.ndarray] = {
            id(self): np.ones_like(self.values)
        }
        for node in reversed(order):
            grad = grads.pop(id(node), None)
            if grad is None:
                continue
            if node.is_leaf:
                node.grad = grad.astype(node.dtype, copy=False)
                continue
            for parent, parent_grad in zip(
                node._parents, node._backward_fn(grad)
            ):
                if parent_grad is None or not parent.requires_grad:
                    continue
                if id(parent) in grads:
                    grads[id(parent)] = grads[id(parent)] + parent_grad
                else:
                    grads[id(parent)] = parent_grad

        for node in order:
            if not node.is_leaf:
                node._consumed = True
            elif node.requires_grad and node.grad is None:
                node.grad = np.zeros_like(node.values)
                node._parents = ()
                node._backward_fn = None

    # ------------------------------------------------------------------
    # elementwise arithmetic
    def __add__(self, other: Any) -> "Tensor":
        other = self._const(other)
        a_shape, b_shape = self.shape, other.shape
        return Tensor._make(
            self.values + other.values,
            (self, other),
            lambda g: (unbroadcast(g, a_shape), unbroadcast(g, b_shape)),
            "add",
        )

    __radd__ = __add__

    def __neg__(self) -> "Tensor":
        return Tensor._make(-self.values, (self,), lambda g: (-g,), "neg")

    def __sub__(self, other: Any) -> "Tensor":
        other = self._const(other)
        a_shape, b_shape = self.shape, other.shape
        return Tensor._make(
            self.values - other.values,
            (self, other),
            lambda g: (unbroadcast(g, a_shape), -unbroadcast(g, b_shape)),
            "sub",
        )

    def __rsub__(self, other: Any) -> "Tensor":
        return self._const(other) - self

    def __mul__(self, other: Any) -> "Tensor":
        other = self._const(other)
        a, b = self.values, other.values
        return Tensor._make(
            a * b,
            (self, other),
            lambda g: (
                unbroadcast(g * b, a.shape),
                unbroadcast(g * a, b.shape),
            ),
            "mul",
        )

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "Tensor":
        other = self._const(other)
        a, b = self.values, other.values
        return Tensor._make(
            a / b,
            (self, other),
            lambda g: (
                unbroadcast(g / b, a.shape),
                unbroadcast(-g * a / (b * b), b.shape),
            ),
            "div",
        )

    def __rtruediv__(self, other: Any) -> "Tensor":
        return self._const(other) / self

    def __pow__(self, power: float) -> "Tensor":
        a = self.values
        return Tensor._make(
            a**power,
            (self,),
            lambda g: (g * power * a ** (power - 1),),
            "pow",
        )

    def exp(self) -> "Tensor":
        """Elementwise exponential."""
        out = np.exp(self.values)
        return Tensor._make(out, (self,), lambda g: (g * out,), "exp")

    def log(self) -> "Tensor":
        """Elementwise natural logarithm."""
        a = self.values
        return Tensor._make(np.log(a), (self,), lambda g: (g / a,), "log")

    def sqrt(self) -> "Tensor":
        """Elementwise square root."""
        out = np.sqrt(self.values)
        return Tensor._make(
            out, (self,), lambda g: (g * 0.5 / out,), "sqrt"
        )

    def relu(self) -> "Tensor":
        """Elementwise rectifier."""
        a = self.values
        return Tensor._make(
            np.maximum(a, 0), (self,), lambda g: (g * (a > 0),), "relu"
        )

    def clip_min(self, minimum: float) -> "Tensor":
        """Elementwise `max(x, minimum)`; gradient passes where x > minimum."""
        a = self.values
        return Tensor._make(
            np.maximum(a, minimum),
            (self,),
            lambda g: (g * (a > minimum),),
            "clip_min",
        )

    # ------------------------------------------------------------------
    # reductions
    def sum(
        self,
        axis: Optional[int | tuple[int, ...]] = None,
        keepdims: bool = False,
    ) -> "Tensor":
        """Sum over `axis` (default: all axes)."""
        shape = self.shape

        def backward(g):
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            return (np.broadcast_to(g, shape).copy(),)

        return Tensor._make(
            np.asarray(self.values.sum(axis=axis, keepdims=keepdims)),
            (self,),
            backward,
            "sum",
        )

    def mean(
        self,
        axis: Optional[int | tuple[int, ...]] = None,
        keepdims: bool = False,
    ) -> "Tensor":
        """Arithmetic mean over `axis` (default: all axes)."""
        if axis is None:
            count = self.size
        else:
            axes = (axis,) if isinstance(axis, int) else axis
            count = int(np.prod([self.shape[a] for a in axes]))
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / count)

    # ------------------------------------------------------------------
    # structural
    def reshape(self, *shape: int) -> "Tensor":
        """Returns tensor with the same values in a new shape."""
        original = self.shape
        return Tensor._make(
            self.values.reshape(*shape),
            (self,),
            lambda g: (g.reshape(original),),
            "reshape",
        )

    def transpose(self, *axes: int) -> "Tensor":
        """Permutes axes (default: reverse)."""
        _axes = axes or tuple(reversed(range(self.ndim)))
        inverse = np.argsort(_axes)
        return Tensor._make(
            self.values.transpose(_axes),
            (self,),
            lambda g: (g.transpose(inverse),),
            "transpose",
        )

    def swapaxes(self, axis1: int, axis2: int) -> "Tensor":
        """Interchanges two axes."""
        return Tensor._make(
            np.swapaxes(self.values, axis1, axis2),
            (self,),
            lambda g: (np.swapaxes(g, axis1, axis2),),
            "swapaxes",
        )

    def __getitem__(self, index) -> "Tensor":
        shape, dtype = self.shape, self.dtype

        def backward(g):
            out = np.zeros(shape, dtype=dtype)
            np.add.at(out, index, g)
            return (out,)

        return Tensor._make(self.values[index], (self,), backward, "index")

    def __matmul__(self, other: "Tensor") -> "Tensor":
        return matmul(self, other)


def as_tensor(values: Any, dtype: Optional[np.dtype | type] = None) -> Tensor:
    """Returns `values` as (constant) `Tensor` unless already one."""
    if isinstance(values, Tensor):
        return values
    return Tensor(values, dtype=dtype)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """
    (Batched) matrix product `a @ b` of tensors with at least two
    dimensions; leading dimensions broadcast.
    """
    if (
        a.ndim < 2
        or b.ndim < 2
        or a.shape[-1] != b.shape[-2]
    ):
        raise DimensionError("matmul", a.shape, b.shape)
    try:
        out = np.matmul(a.values, b.values)
    except ValueError as exc_info:
        raise DimensionError(
            "matmul", a.shape, b.shape, detail=str(exc_info)
        ) from exc_info
    av, bv = a.values, b.values
    return Tensor._make(
        out,
        (a, b),
        lambda g: (
            unbroadcast(np.matmul(g, np.swapaxes(bv, -1, -2)), av.shape),
            unbroadcast(np.matmul(np.swapaxes(av, -1, -2), g), bv.shape),
        ),
        "matmul",
    )


def concat(tensors: Iterable[Tensor], axis: int = 0) -> Tensor:
    """Concatenates tensors along `axis`."""
    _tensors = tuple(tensors)
    try:
        out = np.concatenate([t.values for t in _tensors], axis=axis)
    except ValueError as exc_info:
        raise DimensionError(
            "concat", *(t.shape for t in _tensors), detail=str(exc_info)
        ) from exc_info
    bounds = np.cumsum([t.shape[axis] for t in _tensors])[:-1]
    return Tensor._make(
        out,
        _tensors,
        lambda g: tuple(np.split(g, bounds, axis=axis)),
        "concat",
    )
