"""Web graph and hyperlink matrix types."""

from typing import Iterable, Iterator, List, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from loguru import logger

from ..errors import GraphValidationError, MatrixValidationError

STOCHASTIC_TOL = 1e-12
PROBABILITY_TOL = 1e-9

# Page-value vectors are plain float arrays of length n.
RankVector = np.ndarray


class WebGraph:
    """Directed graph of pages with 0-based ids.

    Instances are immutable after construction and can be shared between
    concurrent simulation runs.
    """

    def __init__(self, n: int, out_links: Sequence[Iterable[int]]):
        """Create a web graph.

        Args:
            n: Number of pages (at least 2)
            out_links: For each page, the distinct pages it links to

        Raises:
            GraphValidationError: If the graph has self-loops, repeated links,
                out-of-range ids or fewer than two pages
        """
        if n < 2:
            raise GraphValidationError(f"a web graph needs at least 2 pages, got n={n}")
        if len(out_links) != n:
            raise GraphValidationError(
                f"expected out-links for {n} pages, got {len(out_links)} entries"
            )

        links: List[Tuple[int, ...]] = []
        in_links: List[List[int]] = [[] for _ in range(n)]
        for page, targets in enumerate(out_links):
            row = tuple(int(t) for t in targets)
            if len(set(row)) != len(row):
                raise GraphValidationError(f"page {page} has repeated out-links")
            for target in row:
                if target == page:
                    raise GraphValidationError(f"self-loop on page {page}")
                if not 0 <= target < n:
                    raise GraphValidationError(
                        f"page {page} links to {target}, outside [0, {n})"
                    )
                in_links[target].append(page)
            links.append(row)

        self._n = n
        self._out_links = tuple(links)
        self._in_links = tuple(tuple(sources) for sources in in_links)

    @property
    def n(self) -> int:
        return self._n

    @property
    def out_links(self) -> Tuple[Tuple[int, ...], ...]:
        return self._out_links

    @property
    def in_links(self) -> Tuple[Tuple[int, ...], ...]:
        """In-neighbors of every page; the transpose of ``out_links``."""
        return self._in_links

    def out_degree(self, page: int) -> int:
        return len(self._out_links[page])

    def dangling_pages(self) -> List[int]:
        """Pages without out-links."""
        return [page for page, targets in enumerate(self._out_links) if not targets]

    def edges(self) -> Iterator[Tuple[int, int]]:
        """Iterate over ``(src, dst)`` pairs in page order."""
        for src, targets in enumerate(self._out_links):
            for dst in targets:
                yield src, dst

    @property
    def edge_count(self) -> int:
        return sum(len(targets) for targets in self._out_links)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WebGraph):
            return NotImplemented
        return self._n == other._n and self._out_links == other._out_links

    def __hash__(self) -> int:
        return hash((self._n, self._out_links))

    def __repr__(self) -> str:
        return f"WebGraph(n={self._n}, edges={self.edge_count})"

    def __reduce__(self):
        return (WebGraph, (self._n, self._out_links))


class LinkMatrix:
    """Sparse column-stochastic hyperlink matrix with zero diagonal.

    Column ``j`` holds ``1/n_j`` at every page ``j`` links to. Both CSC and CSR
    layouts are kept so that a page's column (who it links to) and its row
    (who links to it) can be sliced in O(degree).
    """

    def __init__(self, matrix: sp.spmatrix):
        """Wrap a sparse matrix after checking the link-matrix invariants.

        Args:
            matrix: Square sparse matrix

        Raises:
            MatrixValidationError: If the matrix is not square, has a negative,
                zero or diagonal entry, or a column that does not sum to 1
        """
        csc = sp.csc_matrix(matrix, dtype=float)
        csc.sum_duplicates()
        csc.eliminate_zeros()
        if csc.shape[0] != csc.shape[1]:
            raise MatrixValidationError(f"link matrix must be square, got {csc.shape}")
        if csc.nnz and csc.data.min() <= 0.0:
            raise MatrixValidationError("link matrix entries must be positive")
        if np.any(csc.diagonal() != 0.0):
            raise MatrixValidationError("link matrix must have a zero diagonal")
        column_sums = np.asarray(csc.sum(axis=0)).ravel()
        if np.any(np.abs(column_sums - 1.0) > STOCHASTIC_TOL):
            raise MatrixValidationError("every column of the link matrix must sum to 1")

        self._csc = csc
        self._csr = csc.tocsr()
        self._n = csc.shape[0]

    @property
    def n(self) -> int:
        return self._n

    @property
    def csc(self) -> sp.csc_matrix:
        return self._csc

    @property
    def csr(self) -> sp.csr_matrix:
        return self._csr

    def column(self, page: int) -> Tuple[np.ndarray, np.ndarray]:
        """Rows and values of column ``page``: the pages it links to and ``1/n_page``."""
        start, end = self._csc.indptr[page], self._csc.indptr[page + 1]
        return self._csc.indices[start:end], self._csc.data[start:end]

    def row(self, page: int) -> Tuple[np.ndarray, np.ndarray]:
        """Columns and values of row ``page``: its in-neighbors ``l`` and ``a_{page,l}``."""
        start, end = self._csr.indptr[page], self._csr.indptr[page + 1]
        return self._csr.indices[start:end], self._csr.data[start:end]

    def rows_of(self, pages: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Gather the rows of several pages.

        Returns:
            ``(owner, columns, values)`` where ``owner[t]`` is the position in
            ``pages`` of the row entry ``t`` belongs to
        """
        return _gather(self._csr, pages)

    def columns_of(self, pages: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Gather the columns of several pages, as ``(owner, rows, values)``."""
        return _gather(self._csc, pages)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self._csc @ x

    def to_dense(self) -> np.ndarray:
        return self._csc.toarray()

    def __repr__(self) -> str:
        return f"LinkMatrix(n={self._n}, nnz={self._csc.nnz})"


def _gather(matrix: sp.spmatrix, pages: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    pages = np.asarray(pages, dtype=np.intp)
    starts = matrix.indptr[pages]
    lengths = matrix.indptr[pages + 1] - starts
    total = int(lengths.sum())
    owner = np.repeat(np.arange(len(pages)), lengths)
    if total == 0:
        return owner, np.empty(0, dtype=np.intp), np.empty(0)
    offsets = np.repeat(starts - np.cumsum(lengths) + lengths, lengths) + np.arange(total)
    return owner, matrix.indices[offsets], matrix.data[offsets]


def patch_dangling(graph: WebGraph) -> WebGraph:
    """Give every dangling page artificial out-links.

    A dangling page links back to its in-neighbors; a dangling page nobody
    links to links to every other page. In-neighbors are taken from the input
    graph, so the result does not depend on patching order.

    Args:
        graph: Graph to patch

    Returns:
        The same graph when nothing dangles, otherwise a patched copy
    """
    dangling = graph.dangling_pages()
    if not dangling:
        return graph

    out_links = [list(targets) for targets in graph.out_links]
    fallback = 0
    for page in dangling:
        sources = graph.in_links[page]
        if sources:
            out_links[page] = sorted(sources)
        else:
            out_links[page] = [other for other in range(graph.n) if other != page]
            fallback += 1

    logger.debug(
        f"Patched {len(dangling)} dangling pages ({fallback} without in-links) in n={graph.n}"
    )
    return WebGraph(graph.n, out_links)


def link_matrix(graph: WebGraph) -> LinkMatrix:
    """Build the hyperlink matrix ``a_ij = 1/n_j`` for every link ``j -> i``.

    Raises:
        GraphValidationError: If a page has no out-links
    """
    dangling = graph.dangling_pages()
    if dangling:
        raise GraphValidationError(
            f"{len(dangling)} dangling pages (first: {dangling[0]}); call patch_dangling first"
        )

    degrees = np.array([graph.out_degree(j) for j in range(graph.n)], dtype=float)
    cols = np.repeat(np.arange(graph.n), degrees.astype(np.intp))
    rows = np.fromiter((dst for _, dst in graph.edges()), dtype=np.intp, count=len(cols))
    values = 1.0 / degrees[cols]
    matrix = sp.csc_matrix((values, (rows, cols)), shape=(graph.n, graph.n))
    return LinkMatrix(matrix)


def apply_google(link: LinkMatrix, m: float, x: np.ndarray) -> np.ndarray:
    """Apply the damped matrix ``M = (1-m)A + (m/n)S`` to ``x``.

    ``S`` is the all-ones matrix; its action is the column sum broadcast to
    every entry, so ``M`` is never materialized. ``x`` may be a vector or an
    ``n x p`` block of vectors.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[0] != link.n:
        raise MatrixValidationError(f"vector of length {x.shape[0]} does not match n={link.n}")
    return (1.0 - m) * (link.csc @ x) + (m / link.n) * x.sum(axis=0)


def uniform_vector(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def random_probability_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw a random probability vector with positive entries."""
    values = rng.random(n) + np.finfo(float).tiny
    return values / values.sum()


def is_probability_vector(x: np.ndarray, tol: float = PROBABILITY_TOL) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(np.all(x >= -tol) and abs(x.sum() - 1.0) <= tol)
