"""Orbit decomposition of cubed tensors and the pool/broadcast/pointwise primitives.

A rank-3 tensor over [n]^3 with d channels splits into five components, one per
orbit of the diagonal S_n action on index triples:

    iii  (n, d)        root nodes
    iij  (n, n, d)     connections into roots
    iji  (n, n, d)     connections out of roots
    ijj  (n, n, d)     non-root nodes
    ijk  (n, n, n, d)  connections between non-roots

Entries whose indices violate the orbit's distinctness pattern are forced to
zero.  Pooling sums over dropped free indices in ascending *value* order (sort
then fixed pairwise reduction), which makes every primitive S_n-equivariant
bit for bit, not merely up to roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BadChannel, BadSignature, DomainError, ShapeMismatch
from .graphs import Permutation

TAGS = ("iii", "iij", "iji", "ijj", "ijk")

# free axes per component and their placement into the cube (i, j, k)
AXES = {"iii": ("i",), "iij": ("i", "j"), "iji": ("i", "j"), "ijj": ("i", "j"), "ijk": ("i", "j", "k")}
SLOTS = {"iii": (0, 0, 0), "iij": (0, 0, 1), "iji": (0, 1, 0), "ijj": (0, 1, 1), "ijk": (0, 1, 2)}


@lru_cache(maxsize=None)
def _offdiag_mask(n: int) -> np.ndarray:
    m = ~np.eye(n, dtype=np.bool_)
    m.setflags(write=False)
    return m


@lru_cache(maxsize=None)
def _distinct3_mask(n: int) -> np.ndarray:
    idx = np.arange(n)
    i, j, k = np.meshgrid(idx, idx, idx, indexing="ij")
    m = (i != j) & (j != k) & (i != k)
    m.setflags(write=False)
    return m


def _force_zero(tag: str, values: np.ndarray) -> np.ndarray:
    n = values.shape[0]
    out = np.array(values, dtype=np.float64)
    if tag in ("iij", "iji", "ijj", "ij"):
        out *= _offdiag_mask(n)[:, :, None]
    elif tag == "ijk":
        out *= _distinct3_mask(n)[:, :, :, None]
    return out


def orbit_partition(n: int):
    """The five orbits of S_n on [n]^3, as arrays of index triples."""
    triples = {tag: [] for tag in TAGS}
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if a == b == c:
                    tag = "iii"
                elif a == b:
                    tag = "iij"
                elif a == c:
                    tag = "iji"
                elif b == c:
                    tag = "ijj"
                else:
                    tag = "ijk"
                triples[tag].append((a, b, c))
    return {tag: np.array(t, dtype=np.int64).reshape(-1, 3) for tag, t in triples.items()}


@dataclass(frozen=True)
class OrbitTensor3:
    x_iii: np.ndarray
    x_iij: np.ndarray
    x_iji: np.ndarray
    x_ijj: np.ndarray
    x_ijk: np.ndarray

    def __post_init__(self):
        n, d = self.x_iii.shape
        expect = {"iii": (n, d), "iij": (n, n, d), "iji": (n, n, d), "ijj": (n, n, d), "ijk": (n, n, n, d)}
        for tag in TAGS:
            arr = _force_zero(tag, getattr(self, f"x_{tag}"))
            if arr.shape != expect[tag]:
                raise ShapeMismatch(f"component {tag}: {arr.shape} != {expect[tag]}")
            arr.setflags(write=False)
            object.__setattr__(self, f"x_{tag}", arr)

    @property
    def n(self) -> int:
        return self.x_iii.shape[0]

    @property
    def d(self) -> int:
        return self.x_iii.shape[1]

    def component(self, tag: str) -> np.ndarray:
        return getattr(self, f"x_{tag}")

    @staticmethod
    def zeros(n: int, d: int) -> "OrbitTensor3":
        return OrbitTensor3(
            np.zeros((n, d)), np.zeros((n, n, d)), np.zeros((n, n, d)),
            np.zeros((n, n, d)), np.zeros((n, n, n, d)),
        )

    @staticmethod
    def from_components(comp: dict) -> "OrbitTensor3":
        return OrbitTensor3(*(comp[tag] for tag in TAGS))

    def permute(self, sigma: Permutation) -> "OrbitTensor3":
        if sigma.n != self.n:
            raise ShapeMismatch("permutation size mismatch")
        inv = sigma.inverse
        return OrbitTensor3(
            self.x_iii[inv],
            self.x_iij[np.ix_(inv, inv)],
            self.x_iji[np.ix_(inv, inv)],
            self.x_ijj[np.ix_(inv, inv)],
            self.x_ijk[np.ix_(inv, inv, inv)],
        )

    def max_abs_diff(self, other: "OrbitTensor3") -> float:
        return max(
            float(np.max(np.abs(self.component(t) - other.component(t)), initial=0.0))
            for t in TAGS
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, OrbitTensor3):
            return NotImplemented
        return all(np.array_equal(self.component(t), other.component(t)) for t in TAGS)


def random_orbit_tensor(n: int, d: int, rng) -> OrbitTensor3:
    comp = {}
    for tag in TAGS:
        shape = (n,) * len(AXES[tag]) + (d,)
        comp[tag] = rng.normals(shape)
    return OrbitTensor3.from_components(comp)


# ---------------------------------------------------------------------------
# pooling and broadcasting


def _exact_sum(values: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    """Sum over ``axes`` in ascending value order: bit-exact under any permutation
    of the summed indices (the summand multiset determines the result)."""
    if not axes:
        return values.copy()
    rest = [ax for ax in range(values.ndim) if ax not in axes]
    v = np.transpose(values, list(axes) + rest)
    v = v.reshape((-1,) + v.shape[len(axes):])
    v = np.sort(v, axis=0)
    return v.sum(axis=0)


@dataclass(frozen=True)
class Face:
    """An intermediate face-vector: named free axes plus a channel axis."""

    axes: tuple[str, ...]
    values: np.ndarray


def as_face(tag: str, values: np.ndarray) -> Face:
    return Face(AXES[tag], np.asarray(values, dtype=np.float64))


def pool(face: Face, keep: tuple[str, ...]) -> Face:
    """Sum over the dropped free indices (distinct-index entries only, which the
    zero-forced representation guarantees)."""
    if not set(keep) <= set(face.axes) or len(set(keep)) != len(keep):
        raise BadSignature(f"keep {keep} not a subset of axes {face.axes}")
    kept = tuple(ax for ax in face.axes if ax in keep)
    dropped = tuple(i for i, ax in enumerate(face.axes) if ax not in keep)
    return Face(kept, _exact_sum(face.values, dropped))


def _parse_pattern(pattern) -> tuple[str, ...]:
    if isinstance(pattern, str):
        pattern = tuple(tok.strip() for tok in pattern.split(","))
    return tuple(pattern)


def _pattern_tag(tokens: tuple[str, ...]) -> str:
    """Target component tag from the equality structure of the slot tokens."""
    star_count = 0
    names = []
    for tok in tokens:
        if tok == "*":
            names.append(f"!{star_count}")
            star_count += 1
        else:
            names.append(tok)
    groups = {}
    for pos, name in enumerate(names):
        groups.setdefault(name, []).append(pos)
    key = frozenset(tuple(v) for v in groups.values())
    table_3 = {
        frozenset({(0, 1, 2)}): "iii",
        frozenset({(0, 1), (2,)}): "iij",
        frozenset({(0, 2), (1,)}): "iji",
        frozenset({(1, 2), (0,)}): "ijj",
        frozenset({(0,), (1,), (2,)}): "ijk",
    }
    table_2 = {frozenset({(0, 1)}): "ii", frozenset({(0,), (1,)}): "ij"}
    table = table_3 if len(tokens) == 3 else table_2 if len(tokens) == 2 else None
    if table is None or key not in table:
        raise BadSignature(f"pattern {tokens} does not describe an orbit component")
    return table[key]


def broadcast(face: Face, pattern) -> tuple[str, np.ndarray]:
    """Place/broadcast a face-vector onto a target orbit component.

    Pattern tokens name either a source axis (possibly repeated, fixing an
    equality in the target), ``*`` for a fresh anonymous broadcast index, or
    ``*name`` for a fresh named index that may repeat.  Returns (target tag,
    values for the target's free axes); forbidden entries are zeroed by the
    caller or the OrbitTensor3 constructor.
    """
    tokens = _parse_pattern(pattern)
    src_names = set(face.axes)
    norm = []
    star_count = 0
    for tok in tokens:
        if tok == "*":
            norm.append(f"!{star_count}")
            star_count += 1
        elif tok.startswith("*"):
            name = tok[1:]
            if name in src_names:
                raise BadSignature(f"star index {tok} collides with a source axis")
            norm.append(f"*{name}")
        else:
            if tok not in src_names:
                raise BadSignature(f"unknown source axis {tok!r} in pattern {tokens}")
            norm.append(tok)
    used = {t for t in norm if not t.startswith(("!", "*"))}
    if used != src_names:
        raise BadSignature(f"pattern {tokens} must reference every source axis of {face.axes}")

    tag = _pattern_tag(tokens)
    out_names = []
    for t in norm:
        if t not in out_names:
            out_names.append(t)
    n = face.values.shape[0] if face.axes else None
    if n is None:
        raise BadSignature("cannot broadcast a fully pooled face without a size hint")

    # transpose source axes into their order of appearance, then insert new axes
    src_order = [face.axes.index(t) for t in out_names if t in src_names]
    vals = np.transpose(face.values, src_order + [face.values.ndim - 1])
    shape = []
    src_pos = 0
    expand_at = []
    for pos, t in enumerate(out_names):
        if t in src_names:
            shape.append(vals.shape[src_pos])
            src_pos += 1
        else:
            shape.append(n)
            expand_at.append(pos)
    for pos in expand_at:
        vals = np.expand_dims(vals, axis=pos)
    vals = np.broadcast_to(vals, tuple(shape) + (face.values.shape[-1],))
    if tag in ("iij", "iji", "ijj", "ijk", "ij"):
        return tag, _force_zero(tag, vals)
    return tag, np.array(vals, dtype=np.float64)


def broadcast_from(tag: str, values: np.ndarray, pattern) -> tuple[str, np.ndarray]:
    return broadcast(as_face(tag, values), pattern)


def pool_component(tag: str, values: np.ndarray, keep: tuple[str, ...]) -> Face:
    return pool(as_face(tag, values), tuple(keep))


# ---------------------------------------------------------------------------
# pointwise primitives (channel-wise, identical at every orbit position)


def _check_channels(values: np.ndarray, chs) -> None:
    for c in chs:
        if not (0 <= c < values.shape[-1]):
            raise BadChannel(f"channel {c} out of range for width {values.shape[-1]}")


def pw_linear(values: np.ndarray, w: np.ndarray, b: np.ndarray | None = None) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.shape[1] != values.shape[-1]:
        raise ShapeMismatch(f"weight {w.shape} does not match width {values.shape[-1]}")
    out = values @ w.T
    if b is not None:
        out = out + np.asarray(b, dtype=np.float64)
    return out


def pw_relu(values: np.ndarray, channels=None) -> np.ndarray:
    out = np.array(values)
    if channels is None:
        return np.maximum(out, 0.0)
    _check_channels(values, channels)
    out[..., list(channels)] = np.maximum(out[..., list(channels)], 0.0)
    return out


def pw_route(values: np.ndarray, src: tuple[int, int], dst: tuple[int, int], out_channels: int) -> np.ndarray:
    a, b = src
    e, f = dst
    if b - a != f - e:
        raise BadChannel(f"route {src}->{dst} has mismatched widths")
    if b > values.shape[-1] or f > out_channels or a < 0 or e < 0:
        raise BadChannel(f"route {src}->{dst} out of range")
    out = np.zeros(values.shape[:-1] + (out_channels,))
    out[..., e:f] = values[..., a:b]
    return out


def pw_concat(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if x.shape[:-1] != y.shape[:-1]:
        raise ShapeMismatch("concat operands disagree on orbit shape")
    return np.concatenate([x, y], axis=-1)


def pw_logical_and(values: np.ndarray, a: int, b: int, c: int) -> np.ndarray:
    """Exact AND of binary channels a, b into channel c: y = relu(2a + 2b - 3)."""
    _check_channels(values, (a, b, c))
    for ch in (a, b):
        col = values[..., ch]
        if not np.all((col == 0.0) | (col == 1.0)):
            raise DomainError(f"logical_and input channel {ch} is not binary")
    out = np.array(values)
    out[..., c] = np.maximum(2.0 * values[..., a] + 2.0 * values[..., b] - 3.0, 0.0)
    return out


def pw_clip1(values: np.ndarray, channels) -> np.ndarray:
    """min(x, 1) realised as y = -relu(-x + 1) + 1."""
    _check_channels(values, channels)
    out = np.array(values)
    sel = list(channels)
    out[..., sel] = -np.maximum(-out[..., sel] + 1.0, 0.0) + 1.0
    return out


def pw_gate(values: np.ndarray, value_channels, mask_channel: int) -> np.ndarray:
    """Multiply value channels by the 0/1 indicator of the mask channel being nonzero."""
    _check_channels(values, tuple(value_channels) + (mask_channel,))
    out = np.array(values)
    indicator = (values[..., mask_channel] != 0.0).astype(np.float64)
    for ch in value_channels:
        out[..., ch] = out[..., ch] * indicator
    return out


def pw_mlp(values: np.ndarray, weights: list) -> np.ndarray:
    """Apply an MLP (alternating linear + ReLU, no ReLU after the last layer)."""
    out = values
    for li, (w, b) in enumerate(weights):
        out = pw_linear(out, w, b)
        if li < len(weights) - 1:
            out = np.maximum(out, 0.0)
    return out


def pointwise(values: np.ndarray, op: str, **kwargs) -> np.ndarray:
    """Dispatching front end for the pointwise primitive family."""
    table = {
        "linear": pw_linear,
        "relu": pw_relu,
        "route": pw_route,
        "concat": pw_concat,
        "logical_and": pw_logical_and,
        "clip1": pw_clip1,
        "gate": pw_gate,
        "mlp": pw_mlp,
    }
    if op not in table:
        raise BadSignature(f"unknown pointwise op {op!r}")
    return table[op](values, **kwargs)


# ---------------------------------------------------------------------------


def check_equivariance(fn, y: OrbitTensor3, sigma: Permutation, tol: float = 0.0) -> float:
    """max over entries of |fn(sigma . y) - sigma . fn(y)|; fn may also be an Ign3Program.

    The return value is the measured deviation; ``tol`` is the caller's
    acceptance threshold and is not applied here.
    """
    from .programs import Ign3Program, run_program

    if isinstance(fn, Ign3Program):
        prog = fn
        fn = lambda t: run_program(prog, t)
    lhs = fn(y.permute(sigma))
    rhs = fn(y).permute(sigma)
    return lhs.max_abs_diff(rhs)
