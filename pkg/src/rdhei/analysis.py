"""Capacity accounting, image metrics and the security experiments."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .blocks import BlockModel, to_blocks
from .errors import CapacityError, DimensionMismatch
from .prediction import NPLANES, PeImage
from .raster_io import check_image
from .wire import AuxLayout


@dataclass
class PlaneCapacity:
    plane: int
    n_ub: int
    n_nub: int
    n_embeddable_nub: int
    embeddable: bool
    aux_bits: int
    net_bits: int


@dataclass
class CapacityReport:
    """Per-plane and total capacity of one reserved image.

    ``total_net_bits`` is the sum of the per-plane net capacities; the
    32-bit payload length prefix comes out of it, leaving ``payload_bits``
    for the body. ``er`` is ``payload_bits / (M*N)``.
    """

    shape: tuple[int, int]
    planes: list[PlaneCapacity]
    overflow_pixels: int
    prefix_bits: int = 32
    error: str | None = None

    @property
    def total_net_bits(self) -> int:
        return sum(p.net_bits for p in self.planes)

    @property
    def total_aux_bits(self) -> int:
        return sum(p.aux_bits for p in self.planes)

    @property
    def payload_bits(self) -> int:
        return max(0, self.total_net_bits - self.prefix_bits)

    @property
    def pixels(self) -> int:
        return self.shape[0] * self.shape[1]

    @property
    def er(self) -> float:
        return self.payload_bits / self.pixels

    @property
    def overflow_fraction(self) -> float:
        return self.overflow_pixels / self.pixels

    def summary(self) -> str:
        lines = [f"{'plane':>5} {'UB':>7} {'NUB':>7} {'emb-NUB':>7} {'aux':>7} {'net':>8}"]
        for p in self.planes:
            mark = "" if p.embeddable else "  (raw)"
            lines.append(f"{p.plane:>5} {p.n_ub:>7} {p.n_nub:>7} {p.n_embeddable_nub:>7} "
                         f"{p.aux_bits:>7} {p.net_bits:>8}{mark}")
        lines.append(f"overflow pixels: {self.overflow_pixels} "
                     f"({100 * self.overflow_fraction:.3f}%)")
        lines.append(f"net payload: {self.payload_bits} bits, ER = {self.er:.4f} bpp")
        if self.error:
            lines.append(f"error: {self.error}")
        return "\n".join(lines)


def capacity_report(models: Sequence[BlockModel], layout: AuxLayout | None,
                    pe: PeImage) -> CapacityReport:
    rows = []
    for p, model in enumerate(models, start=1):
        pl = layout.planes.get(p) if layout is not None else None
        rows.append(PlaneCapacity(
            plane=p, n_ub=model.n_ub, n_nub=model.n_nub,
            n_embeddable_nub=model.n_embeddable_nub, embeddable=pl is not None,
            aux_bits=len(pl.aux) if pl else 0, net_bits=pl.capacity if pl else 0))
    return CapacityReport(tuple(pe.shape), rows, int(pe.overflow.sum()))


def measure_er(image: np.ndarray) -> CapacityReport:
    """Plan the reservation of ``image`` and report its capacity.

    An image that cannot be reserved yields a report with ER 0 and the
    error recorded instead of raising.
    """
    from .pipeline import plan_reservation

    try:
        return plan_reservation(image).report
    except CapacityError as exc:
        from .blocks import classify_blocks
        from .prediction import compute_pe, pe_to_planes

        pe = compute_pe(image)
        planes = pe_to_planes(pe)
        models = [classify_blocks(planes[p], reserved=p == 0) for p in range(NPLANES)]
        report = capacity_report(models, None, pe)
        report.error = f"CapacityError: {exc}"
        return report


def mse(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    return float(np.mean((a - b) ** 2))


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    err = mse(a, b)
    return math.inf if err == 0 else 10 * math.log10(255 ** 2 / err)


def ones_per_block_histogram(plane: np.ndarray) -> np.ndarray:
    """Count of 4x4 blocks holding 0, 1, ..., 16 ones."""
    counts = to_blocks(np.asarray(plane, dtype=np.uint8)).sum(axis=1)
    return np.bincount(counts, minlength=17)


def entropy(counts: np.ndarray) -> float:
    counts = np.asarray(counts, dtype=np.float64)
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log2(p)).sum())


def histogram_and_entropy(image: np.ndarray) -> tuple[np.ndarray, float]:
    hist = np.bincount(check_image(image).ravel(), minlength=256)
    return hist, entropy(hist)


def pe_entropy(pe: PeImage) -> float:
    """Empirical entropy of the prediction errors at non-reference pixels."""
    values = pe.pe[1:, 1:].astype(np.int64).ravel()
    return entropy(np.unique(values, return_counts=True)[1])


def chi2_homogeneity(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """Chi-square test that two count histograms come from one distribution.

    Bins empty in both histograms are dropped. Returns ``(statistic, p)``.
    """
    table = np.vstack([np.asarray(a), np.asarray(b)]).astype(np.float64)
    table = table[:, table.sum(axis=0) > 0]
    res = stats.chi2_contingency(table, correction=False)
    return float(res.statistic), float(res.pvalue)


def binomial_fit(hist: np.ndarray) -> tuple[float, float]:
    """Goodness of fit of a ones-per-block histogram to Binomial(16, 1/2)."""
    hist = np.asarray(hist, dtype=np.float64)
    expected = stats.binom.pmf(np.arange(17), 16, 0.5) * hist.sum()
    # pool the sparse tails so every expected count is at least 5
    keep = expected >= 5
    obs = np.append(hist[keep], hist[~keep].sum())
    exp = np.append(expected[keep], expected[~keep].sum())
    res = stats.chisquare(obs, exp)
    return float(res.statistic), float(res.pvalue)


# -- CSV ----------------------------------------------------------------------

CSV_FIELDS = (["name", "M", "N", "overflow_pct"]
              + [f"net_bits_p{p}" for p in range(1, NPLANES + 1)]
              + ["payload_bits", "er_bpp", "mse"])


@dataclass
class BenchRow:
    name: str
    report: CapacityReport
    mse: float | None = None
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        r = self.report
        row = {"name": self.name, "M": r.shape[0], "N": r.shape[1],
               "overflow_pct": f"{100 * r.overflow_fraction:.4f}"}
        for p in r.planes:
            row[f"net_bits_p{p.plane}"] = p.net_bits
        row["payload_bits"] = r.payload_bits
        row["er_bpp"] = f"{r.er:.4f}"
        row["mse"] = "" if self.mse is None else f"{self.mse:g}"
        return row


def write_csv(rows: Iterable[BenchRow], stream: io.TextIOBase) -> None:
    writer = csv.DictWriter(stream, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.as_dict())
