"""Remote-call overhead of parameter types under JVM object-layout rules.

A plain object instance is header + field data, padded so the total is a
multiple of the alignment unit; arrays carry a longer header (the extra word
holds the length). Referenced object fields are costed deeply, since a remote
call serializes the whole object graph; recursion is depth-limited and
cycle-safe, beyond which a reference costs one reference slot.
"""

from __future__ import annotations

from dataclasses import dataclass

from .records import (
    BOOLEAN_ARRAY_ELEMENT_SIZE,
    PRIMITIVE_SIZES,
    ObjectLayout,
    OpaqueLayout,
    PrimitiveLayout,
    TypeCatalog,
    TypeRef,
)


@dataclass(frozen=True)
class SizeModel:
    """Knobs of the object-layout cost model (bytes unless noted)."""

    header_plain: int = 12
    header_array: int = 16
    ref_slot: int = 4
    alignment: int = 8
    default_unknown: int = 16
    max_depth: int = 8
    assumed_array_len: int = 0

    def __post_init__(self):
        if self.alignment <= 0 or self.alignment & (self.alignment - 1):
            raise ValueError("alignment must be a power of two")
        if self.header_plain > self.header_array:
            raise ValueError("header_plain must be <= header_array")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")

    def align(self, size: int) -> int:
        return -(-size // self.alignment) * self.alignment


def api_estimate(t: TypeRef, catalog: TypeCatalog, model: SizeModel | None = None) -> int:
    """Estimated serialized size, in bytes, of one parameter of type ``t``.

    Unknown type names cost ``default_unknown`` rather than failing, so an
    incomplete catalog degrades gracefully.
    """
    model = model or SizeModel()
    return _estimate(t, catalog, model, depth=0, visiting=frozenset())


def edge_cost(callee_params: list[TypeRef] | tuple[TypeRef, ...], catalog: TypeCatalog,
              model: SizeModel | None = None) -> int:
    """Weight of one method-call edge: total parameter overhead plus one."""
    model = model or SizeModel()
    return sum(api_estimate(p, catalog, model) for p in callee_params) + 1


def _estimate(t: TypeRef, catalog: TypeCatalog, model: SizeModel,
              depth: int, visiting: frozenset[str]) -> int:
    if t.array_rank > 0:
        element = TypeRef(t.name, t.array_rank - 1)
        if element.array_rank == 0 and element.name in PRIMITIVE_SIZES:
            if element.name == "boolean":
                elem_size = BOOLEAN_ARRAY_ELEMENT_SIZE
            else:
                elem_size = PRIMITIVE_SIZES[element.name]
        else:
            elem_size = _estimate(element, catalog, model, depth + 1, visiting)
        return model.align(model.header_array + model.assumed_array_len * elem_size)

    layout = catalog.lookup(t.name)
    if layout is None:
        return model.default_unknown
    if isinstance(layout, PrimitiveLayout):
        return PRIMITIVE_SIZES[layout.kind]
    if isinstance(layout, OpaqueLayout):
        return layout.size_bytes
    assert isinstance(layout, ObjectLayout)
    if depth >= model.max_depth or t.name in visiting:
        return model.ref_slot
    visiting = visiting | {t.name}
    data = 0
    for f in layout.fields:
        data += _estimate(f, catalog, model, depth + 1, visiting)
    return model.align(model.header_plain + data)
