"""
Two-layer projection heads.

A head maps rows independently: relu(X·W1 + b1)·W2 + b2. The text head f and
the visual head g are separate, unshared heads; together they are the
trainable parameters of the aligner.
"""

from dataclasses import dataclass

import numpy as np

from commentary_align.core.errors import DimensionError

DEFAULT_DIM = 512

# Fixed parameter block order, shared by the optimizer and the checkpoint codec
HEAD_BLOCKS: tuple[str, ...] = ("W1", "b1", "W2", "b2")
PARAM_ORDER: tuple[str, ...] = tuple(
    f"{side}.{block}" for side in ("text", "visual") for block in HEAD_BLOCKS
)


@dataclass(frozen=True, eq=False)
class MlpHead:
    """Parameters of one projection head.

    Attributes:
        W1: (d_in, d_h) first-layer weights.
        b1: (d_h,) first-layer bias.
        W2: (d_h, d_out) second-layer weights.
        b2: (d_out,) second-layer bias.
    """

    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    def __post_init__(self) -> None:
        d_in, d_h = self.W1.shape
        if self.b1.shape != (d_h,) or self.W2.shape[0] != d_h:
            raise DimensionError(
                f"hidden width mismatch: W1 {self.W1.shape}, b1 {self.b1.shape}, W2 {self.W2.shape}"
            )
        if self.b2.shape != (self.W2.shape[1],):
            raise DimensionError(f"b2 {self.b2.shape} does not match W2 {self.W2.shape}")

    @property
    def d_in(self) -> int:
        return int(self.W1.shape[0])

    @property
    def d_h(self) -> int:
        return int(self.W1.shape[1])

    @property
    def d_out(self) -> int:
        return int(self.W2.shape[1])

    @property
    def dtype(self) -> np.dtype:
        return self.W1.dtype

    def blocks(self) -> dict[str, np.ndarray]:
        return {"W1": self.W1, "b1": self.b1, "W2": self.W2, "b2": self.b2}


@dataclass(frozen=True)
class HeadGrads:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    X: np.ndarray

    def blocks(self) -> dict[str, np.ndarray]:
        return {"W1": self.W1, "b1": self.b1, "W2": self.W2, "b2": self.b2}


@dataclass(frozen=True, eq=False)
class ProjectionHeads:
    """Text head f, visual head g and the seed they were initialised from."""

    text: MlpHead
    visual: MlpHead
    seed: int = 0

    def __post_init__(self) -> None:
        if (self.text.d_in, self.text.d_h, self.text.d_out) != (
            self.visual.d_in,
            self.visual.d_h,
            self.visual.d_out,
        ):
            raise DimensionError("text and visual heads must share d_in, d_h and d_out")

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.text.d_in, self.text.d_h, self.text.d_out

    def parameters(self) -> dict[str, np.ndarray]:
        """Every parameter block keyed `<side>.<block>`, in `PARAM_ORDER`."""
        params = {f"text.{k}": v for k, v in self.text.blocks().items()}
        params.update({f"visual.{k}": v for k, v in self.visual.blocks().items()})
        return {name: params[name] for name in PARAM_ORDER}

    @classmethod
    def from_parameters(cls, params: dict[str, np.ndarray], seed: int = 0) -> "ProjectionHeads":
        missing = [name for name in PARAM_ORDER if name not in params]
        if missing:
            raise DimensionError(f"missing parameter blocks: {missing}")
        text = MlpHead(**{b: params[f"text.{b}"] for b in HEAD_BLOCKS})
        visual = MlpHead(**{b: params[f"visual.{b}"] for b in HEAD_BLOCKS})
        return cls(text=text, visual=visual, seed=seed)

    def project_text(self, X: np.ndarray) -> np.ndarray:
        return head_forward(self.text, X)

    def project_visual(self, X: np.ndarray) -> np.ndarray:
        return head_forward(self.visual, X)


def _check_input(head: MlpHead, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[1] != head.d_in:
        raise DimensionError(f"head expects (m, {head.d_in}) input, got {X.shape}")
    return X


def head_forward(head: MlpHead, X: np.ndarray) -> np.ndarray:
    """Project the rows of X: relu(X·W1 + b1)·W2 + b2.

    Raises:
        DimensionError: If X is not (m, d_in).
    """
    X = _check_input(head, X).astype(head.dtype, copy=False)
    hidden = np.maximum(X @ head.W1 + head.b1, 0)
    return hidden @ head.W2 + head.b2


def head_backward(head: MlpHead, X: np.ndarray, upstream_grad: np.ndarray) -> HeadGrads:
    """Exact gradients of `head_forward` given dL/d(output).

    The forward pass is recomputed, so the call is pure in its inputs. The
    rectifier's derivative at exactly zero is taken as 0.

    Raises:
        DimensionError: If X or `upstream_grad` do not match the head.
    """
    X = _check_input(head, X).astype(head.dtype, copy=False)
    upstream_grad = np.asarray(upstream_grad)
    if upstream_grad.shape != (X.shape[0], head.d_out):
        raise DimensionError(
            f"upstream gradient must be {(X.shape[0], head.d_out)}, got {upstream_grad.shape}"
        )
    upstream_grad = upstream_grad.astype(head.dtype, copy=False)

    pre = X @ head.W1 + head.b1
    hidden = np.maximum(pre, 0)

    d_hidden = upstream_grad @ head.W2.T
    d_pre = d_hidden * (pre > 0)
    return HeadGrads(
        W1=X.T @ d_pre,
        b1=d_pre.sum(axis=0),
        W2=hidden.T @ upstream_grad,
        b2=upstream_grad.sum(axis=0),
        X=d_pre @ head.W1.T,
    )


def init_head(
    d_in: int,
    d_h: int,
    d_out: int,
    rng: np.random.Generator,
    dtype: np.dtype | type = np.float32,
) -> MlpHead:
    """Initialise a head uniformly in ±1/sqrt(fan_in), weights and biases alike."""
    bound1 = 1.0 / np.sqrt(d_in)
    bound2 = 1.0 / np.sqrt(d_h)
    return MlpHead(
        W1=rng.uniform(-bound1, bound1, size=(d_in, d_h)).astype(dtype),
        b1=rng.uniform(-bound1, bound1, size=d_h).astype(dtype),
        W2=rng.uniform(-bound2, bound2, size=(d_h, d_out)).astype(dtype),
        b2=rng.uniform(-bound2, bound2, size=d_out).astype(dtype),
    )


def init_heads(
    d_in: int = DEFAULT_DIM,
    d_h: int = DEFAULT_DIM,
    d_out: int = DEFAULT_DIM,
    seed: int = 0,
    dtype: np.dtype | type = np.float32,
) -> ProjectionHeads:
    """Initialise the text and visual heads from one seeded generator."""
    rng = np.random.default_rng(seed)
    text = init_head(d_in, d_h, d_out, rng, dtype)
    visual = init_head(d_in, d_h, d_out, rng, dtype)
    return ProjectionHeads(text=text, visual=visual, seed=seed)


def exact_linear_head(W: np.ndarray, dtype: np.dtype | type = np.float64) -> MlpHead:
    """A head computing exactly X·W, with hidden width 2·d_in.

    Uses relu(x) − relu(−x) = x: the first layer stacks [W, −W] and the second
    recombines both halves.
    """
    W = np.asarray(W, dtype=dtype)
    d_in, d_out = W.shape
    eye = np.eye(d_in, dtype=dtype)
    return MlpHead(
        W1=np.concatenate([eye, -eye], axis=1),
        b1=np.zeros(2 * d_in, dtype=dtype),
        W2=np.concatenate([W, -W], axis=0),
        b2=np.zeros(d_out, dtype=dtype),
    )
