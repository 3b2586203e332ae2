"""JSONPath utilities for addressing cells of reference tables."""

from __future__ import annotations

from typing import Any

from jsonpath_ng import parse as jsonpath_parse
from jsonpath_ng.exceptions import JSONPathError
from jsonpath_ng.jsonpath import Child, Fields, Index, Root, This


class JSONPathMatcher:
    """Utility class for JSONPath matching over reference table documents."""

    # Cache for compiled JSONPath expressions
    _cache: dict = {}

    @classmethod
    def compile(cls, path: str):
        """Compile and cache a JSONPath expression."""
        if path not in cls._cache:
            try:
                cls._cache[path] = jsonpath_parse(path)
            except JSONPathError as e:
                raise ValueError(f"Invalid JSONPath expression '{path}': {e}")
        return cls._cache[path]

    @classmethod
    def canonical(cls, full_path: Any) -> str:
        """Render a jsonpath-ng full path as '$.rows[3].eta_5_2' from its nodes."""
        return "$" + "".join(cls._segments(full_path))

    @classmethod
    def _segments(cls, node: Any) -> list[str]:
        if isinstance(node, Child):
            return cls._segments(node.left) + cls._segments(node.right)
        if isinstance(node, (Root, This)):
            return []
        if isinstance(node, Fields):
            return ["." + ".".join(node.fields)]
        if isinstance(node, Index):
            # newer jsonpath-ng releases keep a tuple in Index.indices
            indices = getattr(node, "indices", None) or (node.index,)
            return ["[" + ",".join(str(i) for i in indices) + "]"]
        return ["." + str(node)]

    @classmethod
    def find_matches(cls, data: Any, path: str) -> list:
        """Raw jsonpath-ng matches; their full_path can be reused on another document."""
        return cls.compile(path).find(data)

    @classmethod
    def find_all(cls, data: Any, path: str) -> list[tuple[str, Any]]:
        """
        Find all matches for a JSONPath expression.

        Returns:
            List of (canonical_path, value) tuples
        """
        try:
            return [(cls.canonical(m.full_path), m.value) for m in cls.find_matches(data, path)]
        except ValueError:
            raise
        except Exception:
            return []

    @classmethod
    def value_at(cls, data: Any, full_path: Any) -> tuple[bool, Any]:
        """Follow a concrete full path taken from another document."""
        found = full_path.find(data)
        if not found:
            return False, None
        return True, found[0].value
