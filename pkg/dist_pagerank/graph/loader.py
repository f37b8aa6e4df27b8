"""Edge-list reading and writing.

Format: an optional first content line ``n <N>``, then one ``src dst`` pair per
line with 0-based ids. ``#`` starts a comment and blank lines are ignored.
"""

from pathlib import Path
from typing import Dict, List, Optional, TextIO, Union

from loguru import logger

from ..errors import EdgeListParseError, GraphValidationError
from .webgraph import WebGraph


def load_edge_list(text: Union[str, TextIO]) -> WebGraph:
    """Parse an edge list into a web graph.

    Duplicate edges collapse to one link, in first-seen order.

    Args:
        text: Edge-list text or an open text stream

    Returns:
        Parsed graph with ``n`` as declared, or ``max id + 1``

    Raises:
        EdgeListParseError: On a malformed line
        GraphValidationError: On a self-loop, an id beyond the declared ``n``
            or fewer than two pages
    """
    lines = text.splitlines() if isinstance(text, str) else text.read().splitlines()

    declared: Optional[int] = None
    seen_content = False
    links: Dict[int, List[int]] = {}
    seen_edges = set()
    max_id = -1

    for line_number, raw in enumerate(lines, start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        tokens = content.split()

        if tokens[0] == "n":
            if seen_content:
                raise EdgeListParseError(line_number, "'n <N>' must be the first content line")
            if len(tokens) != 2:
                raise EdgeListParseError(line_number, "expected 'n <N>'")
            declared = _parse_id(tokens[1], line_number)
            seen_content = True
            continue
        seen_content = True

        if len(tokens) != 2:
            raise EdgeListParseError(line_number, f"expected 'src dst', got {content!r}")
        src = _parse_id(tokens[0], line_number)
        dst = _parse_id(tokens[1], line_number)
        if src == dst:
            raise GraphValidationError(f"line {line_number}: self-loop on page {src}")
        if declared is not None and max(src, dst) >= declared:
            raise GraphValidationError(
                f"line {line_number}: page id {max(src, dst)} is not below declared n={declared}"
            )
        if (src, dst) in seen_edges:
            continue
        seen_edges.add((src, dst))
        links.setdefault(src, []).append(dst)
        max_id = max(max_id, src, dst)

    n = declared if declared is not None else max_id + 1
    if n < 2:
        raise GraphValidationError(f"a web graph needs at least 2 pages, got n={n}")

    logger.debug(f"Loaded edge list: n={n}, {len(seen_edges)} distinct edges")
    return WebGraph(n, [links.get(page, []) for page in range(n)])


def load_edge_list_file(path: Union[str, Path]) -> WebGraph:
    """Read and parse an edge-list file."""
    with open(path, "r", encoding="utf-8") as handle:
        return load_edge_list(handle)


def dump_edge_list(graph: WebGraph) -> str:
    """Render a graph in the edge-list format, with an ``n`` header."""
    lines = [f"n {graph.n}"]
    lines.extend(f"{src} {dst}" for src, dst in graph.edges())
    return "\n".join(lines) + "\n"


def _parse_id(token: str, line_number: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise EdgeListParseError(line_number, f"page id {token!r} is not an integer") from None
    if value < 0:
        raise EdgeListParseError(line_number, f"page id {value} is negative")
    return value
