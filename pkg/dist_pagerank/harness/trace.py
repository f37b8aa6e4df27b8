"""Sampled simulation traces and their CSV/JSON forms."""

import csv
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, TextIO, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field, model_validator

TRACE_COLUMNS = ["k", "err_l1", "err_linf", "sum_y", "ms_bound"]
TERM_COLUMNS = ["page", "term_k"]
SUMMARY_COLUMNS = ["k", "mean_sq_error", "sq_error_var", "ms_bound"]


class OutputFormat(Enum):
    """Trace file formats."""

    CSV = "csv"
    JSON = "json"


class TraceSample(BaseModel):
    """Error metrics of one sampled step."""

    k: int = Field(ge=0)
    err_l1: float
    err_linf: float
    sum_y: float
    ms_bound: Optional[float] = None


class TraceMeta(BaseModel):
    """Scheme, parameters and seed a trace was produced with."""

    scheme: str
    n: int
    m: Optional[float] = None
    alpha: Optional[float] = None
    mhat: Optional[float] = None
    delta: Optional[float] = None
    ns: Optional[int] = None
    seed: int = 0
    stream: int = 0
    steps: int = 0
    converged_at: Optional[int] = None


class SimTrace(BaseModel):
    """Sampled trajectory of one run.

    ``states`` holds the sampled ``(x, y)`` vectors and ``final_x``/``final_y``
    the last state; they stay in memory and are not serialized.
    """

    meta: TraceMeta
    samples: List[TraceSample]
    term_times: Optional[List[Optional[int]]] = None
    page_paths: Dict[int, List[float]] = Field(default_factory=dict)
    states: List[Any] = Field(default_factory=list, exclude=True, repr=False)
    final_x: Any = Field(default=None, exclude=True, repr=False)
    final_y: Any = Field(default=None, exclude=True, repr=False)

    @model_validator(mode="after")
    def _check_sample_order(self) -> "SimTrace":
        ks = [sample.k for sample in self.samples]
        if ks and ks[0] != 0:
            raise ValueError("the first sample must be at k=0")
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError("sample steps must be strictly increasing")
        return self

    @property
    def ks(self) -> List[int]:
        return [sample.k for sample in self.samples]

    def column(self, name: str) -> np.ndarray:
        """Values of one metric over the samples, as a float array."""
        return np.array(
            [np.nan if getattr(s, name) is None else getattr(s, name) for s in self.samples]
        )


class MCSummary(BaseModel):
    """Mean squared error of the time average over independent runs."""

    scheme: str
    runs: int = Field(ge=2)
    seed_base: int
    streams: List[int]
    ks: List[int]
    mean_sq_error: List[float]
    sq_error_var: List[float]
    ms_bound: List[Optional[float]]


class TraceRecorder:
    """Collects samples while a simulator runs.

    With a reference vector the metrics are errors of the estimate against
    it. Without one they measure disagreement: ``err_linf`` is ``max - min``
    and ``err_l1`` the l1 distance to the mean.
    """

    def __init__(
        self,
        reference: Optional[np.ndarray],
        sample_every: int = 1,
        bound: Optional[Callable[[int], float]] = None,
        keep_states: bool = True,
        track_pages: Sequence[int] = (),
    ):
        if sample_every < 1:
            raise ValueError(f"sample_every must be positive, got {sample_every}")
        self.reference = reference
        self.sample_every = sample_every
        self.bound = bound
        self.keep_states = keep_states
        self.track_pages = list(track_pages)
        self.samples: List[TraceSample] = []
        self.states: List[Any] = []
        self.page_paths: Dict[int, List[float]] = {page: [] for page in self.track_pages}

    def record(self, k: int, x: np.ndarray, estimate: np.ndarray, force: bool = False) -> None:
        """Store a sample when ``k`` is on the sampling grid (or ``force`` is set)."""
        if self.samples and self.samples[-1].k == k:
            return
        if not force and k % self.sample_every != 0:
            return

        if self.reference is not None:
            err = estimate - self.reference
            err_l1 = float(np.abs(err).sum())
            err_linf = float(np.abs(err).max())
        else:
            err_l1 = float(np.abs(estimate - estimate.mean()).sum())
            err_linf = float(estimate.max() - estimate.min())

        self.samples.append(
            TraceSample(
                k=k,
                err_l1=err_l1,
                err_linf=err_linf,
                sum_y=float(estimate.sum()),
                ms_bound=self.bound(k) if self.bound is not None else None,
            )
        )
        if self.keep_states:
            self.states.append((x.copy(), estimate.copy()))
        for page in self.track_pages:
            self.page_paths[page].append(float(estimate[page]))

    def build(
        self,
        meta: TraceMeta,
        x: np.ndarray,
        estimate: np.ndarray,
        term_times: Optional[List[Optional[int]]] = None,
    ) -> SimTrace:
        """Close the trace with the final state, which is always sampled."""
        self.record(meta.steps, x, estimate, force=True)
        return SimTrace(
            meta=meta,
            samples=self.samples,
            term_times=term_times,
            page_paths=self.page_paths,
            states=self.states,
            final_x=x.copy(),
            final_y=estimate.copy(),
        )


def write_trace_csv(trace: SimTrace, stream: TextIO) -> None:
    """Write one row per sample under the ``k,err_l1,err_linf,sum_y,ms_bound`` header."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for s in trace.samples:
        bound = "" if s.ms_bound is None else repr(s.ms_bound)
        writer.writerow([s.k, repr(s.err_l1), repr(s.err_linf), repr(s.sum_y), bound])


def read_trace_csv(stream: TextIO) -> List[TraceSample]:
    """Parse rows written by ``write_trace_csv``."""
    reader = csv.DictReader(stream)
    if reader.fieldnames != TRACE_COLUMNS:
        raise ValueError(f"unexpected trace header {reader.fieldnames}")
    return [
        TraceSample(
            k=int(row["k"]),
            err_l1=float(row["err_l1"]),
            err_linf=float(row["err_linf"]),
            sum_y=float(row["sum_y"]),
            ms_bound=float(row["ms_bound"]) if row["ms_bound"] else None,
        )
        for row in reader
    ]


def write_term_times_csv(term_times: Sequence[Optional[int]], stream: TextIO) -> None:
    """Write ``page,term_k`` rows; pages that never froze get an empty ``term_k``."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(TERM_COLUMNS)
    for page, term_k in enumerate(term_times):
        writer.writerow([page, "" if term_k is None else term_k])


def read_term_times_csv(stream: TextIO) -> List[Optional[int]]:
    reader = csv.DictReader(stream)
    return [int(row["term_k"]) if row["term_k"] else None for row in reader]


def write_summary_csv(summary: MCSummary, stream: TextIO) -> None:
    """Write one row per sampled step of a Monte Carlo summary."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    for k, mean, var, bound in zip(
        summary.ks, summary.mean_sq_error, summary.sq_error_var, summary.ms_bound
    ):
        writer.writerow([k, repr(mean), repr(var), "" if bound is None else repr(bound)])


def save_trace(
    trace: SimTrace, path: Union[str, Path], fmt: OutputFormat = OutputFormat.CSV
) -> List[Path]:
    """Write a trace to disk.

    CSV output goes to ``path``, with termination times in a companion
    ``<stem>_term.csv`` when the trace has them. JSON output is the trace
    model, meta block included.

    Returns:
        Paths written
    """
    path = Path(path)
    written = [path]
    if fmt is OutputFormat.JSON:
        path.write_text(trace.model_dump_json(indent=2), encoding="utf-8")
    else:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            write_trace_csv(trace, handle)
        if trace.term_times is not None:
            term_path = path.with_name(f"{path.stem}_term.csv")
            with open(term_path, "w", encoding="utf-8", newline="") as handle:
                write_term_times_csv(trace.term_times, handle)
            written.append(term_path)
    logger.info(f"Wrote {trace.meta.scheme} trace to {', '.join(str(p) for p in written)}")
    return written
