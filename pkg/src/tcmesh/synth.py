"""Planted-contagion synthetic data.

Supplier log growth is planted as ``beta * x + eps`` where ``x`` is the
weighted customer purchase growth and ``eps ~ N(0, sigma_supplier)``. Macro
drift ``mu`` enters through customer purchase growth only, so with
``beta = 1`` and no noise actual and predicted growth coincide.

Randomness comes from numpy's PCG64 bit generator (raw 64-bit output only);
uniforms, normals and all transcendental functions are computed here with
the ``math`` module so generated files do not depend on numpy's
distribution code or SIMD dispatch.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Mapping

import numpy as np

from .ingest import (
    YEARS,
    BalanceRecord,
    Dataset,
    InvoiceRecord,
    SectorCode,
    assemble_dataset,
    format_balance,
    format_invoices,
)
from .stats import rating_class

RNG_ALGORITHM = "numpy.random.PCG64 raw output, 53-bit uniforms, Box-Muller normals"

DEFAULT_SECTOR_MIX = {"C": 0.02, "D": 0.48, "E": 0.02, "F": 0.12, "G": 0.22, "H": 0.04, "I": 0.06, "K": 0.03, "O": 0.01}
MAX_WEIGHT_EUR = 1e12


@dataclass(frozen=True)
class SynthConfig:
    n_suppliers: int = 500
    # density exponent of the in-degree law; CCDF slope is 1 - degree_exponent
    degree_exponent: float = 2.3
    weight_tail_exponent: float = 1.5
    matching_range: tuple[float, float] = (0.8, 1.2)
    coverage_min: float = 1.0
    beta: float | Mapping[str, float] = 1.0
    mu: tuple[float, float] = (0.0, 0.0)
    sigma_supplier: float = 0.0
    sigma_customer: float = 0.1
    rating_mix: tuple[float, ...] = (1 / 9,) * 9
    sector_mix: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_SECTOR_MIX))
    seed: int = 42
    customer_pool_factor: int = 16
    weight_scale: float = 10_000.0
    beta_sector: Mapping[str, float] | None = None

    def __post_init__(self):
        if self.n_suppliers <= 0:
            raise ValueError("n_suppliers must be positive")
        if self.degree_exponent <= 1 or self.weight_tail_exponent <= 1:
            raise ValueError("exponents must exceed 1")
        lo, hi = self.matching_range
        if not (0 < lo < hi < math.inf):
            raise ValueError("matching_range must satisfy 0 < lo < hi < inf")
        if self.coverage_min < 1:
            raise ValueError("coverage_min must be >= 1")
        if self.sigma_supplier < 0 or self.sigma_customer < 0:
            raise ValueError("noise scales must be non-negative")
        if len(self.rating_mix) != 9:
            raise ValueError("rating_mix needs 9 probabilities")
        for name, probs in (("rating_mix", self.rating_mix), ("sector_mix", list(self.sector_mix.values()))):
            if any(p < 0 for p in probs) or abs(math.fsum(probs) - 1.0) > 1e-12:
                raise ValueError(f"{name} must be a probability vector")
        if not set(self.sector_mix) <= set("CDEFGHIKO"):
            raise ValueError("unknown sector letter in sector_mix")
        if isinstance(self.beta, Mapping) and set(self.beta) != {"A", "B", "C"}:
            raise ValueError("beta map must have keys A, B, C")
        if len(self.mu) != 2:
            raise ValueError("mu needs one drift per period")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        pool = self.n_suppliers * self.customer_pool_factor
        if pool > 10**8:
            raise ValueError("customer pool too large")

    @property
    def pool_size(self) -> int:
        return self.n_suppliers * self.customer_pool_factor

    def beta_for(self, rating: int, sector: str) -> float:
        if self.beta_sector and sector in self.beta_sector:
            return float(self.beta_sector[sector])
        if isinstance(self.beta, Mapping):
            return float(self.beta[rating_class(rating)])
        return float(self.beta)

    def to_json(self) -> dict:
        d = asdict(self)
        d["beta"] = dict(self.beta) if isinstance(self.beta, Mapping) else self.beta
        d["sector_mix"] = dict(self.sector_mix)
        return d


@dataclass(frozen=True)
class SupplierTruth:
    supplier: str
    x: tuple[float, float]
    eps: tuple[float, float]
    rating_class: str
    beta: float
    matching: float


@dataclass(frozen=True)
class PlantedTruth:
    mu: tuple[float, float]
    suppliers: dict[str, SupplierTruth]
    rng: str = RNG_ALGORITHM

    def to_json(self) -> str:
        doc = {
            "rng": self.rng,
            "mu": {"2006-2007": self.mu[0], "2007-2008": self.mu[1]},
            "suppliers": [
                {
                    "supplier_id": t.supplier,
                    "x": {"2006-2007": t.x[0], "2007-2008": t.x[1]},
                    "eps": {"2006-2007": t.eps[0], "2007-2008": t.eps[1]},
                    "rating_class": t.rating_class,
                    "beta": t.beta,
                    "matching": t.matching,
                }
                for t in self.suppliers.values()
            ],
        }
        return json.dumps(doc, indent=2) + "\n"


class Stream:
    """Deterministic draws from a PCG64 bit stream."""

    def __init__(self, seed: int):
        self._bits = np.random.PCG64(seed)

    def uniforms(self, n: int) -> list[float]:
        """n floats in the open interval (0, 1)."""
        if n == 0:
            return []
        raw = self._bits.random_raw(n).tolist()
        return [((r >> 11) + 0.5) * 2.0**-53 for r in raw]

    def uniform(self) -> float:
        return self.uniforms(1)[0]

    def below(self, m: int) -> int:
        return min(int(self.uniform() * m), m - 1)

    def normals(self, n: int, mean: float = 0.0, sd: float = 1.0) -> list[float]:
        u = self.uniforms(2 * n)
        return [
            mean + sd * math.sqrt(-2.0 * math.log(u[2 * k])) * math.cos(2.0 * math.pi * u[2 * k + 1])
            for k in range(n)
        ]

    def choice(self, probs) -> int:
        u, acc = self.uniform(), 0.0
        for idx, p in enumerate(probs):
            acc += p
            if u < acc:
                return idx
        return max(i for i, p in enumerate(probs) if p > 0)


def draw_in_degrees(stream: Stream, n: int, exponent: float, cap: int) -> list[int]:
    """Discrete power law with P(K >= k) = k^(1 - exponent), truncated at ``cap``."""
    a = exponent - 1.0
    tail = (cap + 1.0) ** -a
    out = []
    for u in stream.uniforms(n):
        v = tail + u * (1.0 - tail)
        out.append(max(1, min(cap, math.floor(v ** (-1.0 / a)))))
    return out


def _sample_distinct(stream: Stream, k: int, m: int) -> list[int]:
    # Floyd's algorithm: k distinct integers from range(m)
    chosen: set[int] = set()
    for top in range(m - k, m):
        t = stream.below(top + 1)
        chosen.add(top if t in chosen else t)
    return sorted(chosen)


def _sector(stream: Stream, letters: list[str], probs: list[float]) -> SectorCode:
    letter = letters[stream.choice(probs)]
    if letter == "D":
        return SectorCode("D", f"{15 + stream.below(23):02d}{stream.below(100):02d}")
    return SectorCode(letter)


def generate(config: SynthConfig) -> tuple[Dataset, PlantedTruth]:
    s = Stream(config.seed)
    n, pool = config.n_suppliers, config.pool_size
    sup_ids = [f"S{k:06d}" for k in range(n)]
    width = max(7, len(str(pool)))
    cus_id = lambda k: f"C{k:0{width}d}"  # noqa: E731
    letters = sorted(config.sector_mix)
    sector_probs = [config.sector_mix[c] for c in letters]

    # 1-2: in-degrees and distinct customers per supplier
    degrees = draw_in_degrees(s, n, config.degree_exponent, pool)
    neighbours = [_sample_distinct(s, k, pool) for k in degrees]

    # 3: heavy-tailed flows, rounded to cents
    weights = []
    for cs in neighbours:
        us = s.uniforms(len(cs))
        weights.append(
            [max(0.01, round(min(MAX_WEIGHT_EUR, config.weight_scale * u ** (-1.0 / config.weight_tail_exponent)), 2)) for u in us]
        )

    # 4: 2007 sales from a matching ratio strictly inside the range
    lo, hi = config.matching_range
    margin = 1e-6 * (hi - lo)
    matching = [lo + margin + u * (hi - lo - 2 * margin) for u in s.uniforms(n)]
    invoiced = [math.fsum(ws) for ws in weights]
    sales07 = [p / m for p, m in zip(invoiced, matching)]

    # 5: customer 2007 purchases cover at least their in-network spend
    spend: dict[int, list[float]] = {}
    for cs, ws in zip(neighbours, weights):
        for c, w in zip(cs, ws):
            spend.setdefault(c, []).append(w)
    customers = sorted(spend)
    cover = [config.coverage_min - math.log(u) for u in s.uniforms(len(customers))]
    p07 = {c: cv * math.fsum(spend[c]) for c, cv in zip(customers, cover)}

    # 6: customer purchase growth per period
    g1 = s.normals(len(customers), config.mu[0], config.sigma_customer)
    g2 = s.normals(len(customers), config.mu[1], config.sigma_customer)
    purchases = {}
    for c, a, b in zip(customers, g1, g2):
        purchases[c] = (p07[c] * math.exp(-a), p07[c], p07[c] * math.exp(b))

    # 9 (drawn before 8 so beta can depend on class/sector)
    sup_rating = [1 + s.choice(config.rating_mix) for _ in range(n)]
    sup_sector = [_sector(s, letters, sector_probs) for _ in range(n)]
    cus_rating = [1 + s.choice(config.rating_mix) for _ in customers]
    cus_sector = [_sector(s, letters, sector_probs) for _ in customers]

    # 7-8: planted supplier growth
    eps1 = s.normals(n, 0.0, config.sigma_supplier)
    eps2 = s.normals(n, 0.0, config.sigma_supplier)
    truth: dict[str, SupplierTruth] = {}
    sup_sales = []
    for k in range(n):
        cs, ws = neighbours[k], weights[k]
        base = math.fsum(ws)
        back = math.fsum(purchases[c][0] / purchases[c][1] * w for c, w in zip(cs, ws))
        fwd = math.fsum(purchases[c][2] / purchases[c][1] * w for c, w in zip(cs, ws))
        x1, x2 = math.log(base / back), math.log(fwd / base)
        beta = config.beta_for(sup_rating[k], sup_sector[k].letter)
        r07 = sales07[k]
        r06 = r07 * math.exp(-(beta * x1 + eps1[k]))
        r08 = r07 * math.exp(beta * x2 + eps2[k])
        sup_sales.append((r06, r07, r08))
        truth[sup_ids[k]] = SupplierTruth(
            sup_ids[k], (x1, x2), (eps1[k], eps2[k]), rating_class(sup_rating[k]), beta, matching[k]
        )

    # 10: remaining balance items (not used by the analyses)
    records: list[BalanceRecord] = []
    for k in range(n):
        share = [0.5 + 0.4 * u for u in s.uniforms(3)]
        for y, r, f in zip(YEARS, sup_sales[k], share):
            records.append(BalanceRecord(sup_ids[k], y, r, r * f, sup_rating[k], sup_sector[k]))
    for idx, c in enumerate(customers):
        markup = [1.1 + 0.4 * u for u in s.uniforms(3)]
        for y, p, f in zip(YEARS, purchases[c], markup):
            records.append(BalanceRecord(cus_id(c), y, p * f, p, cus_rating[idx], cus_sector[idx]))

    invoices = [
        InvoiceRecord(sup_ids[k], cus_id(c), w)
        for k in range(n)
        for c, w in zip(neighbours[k], weights[k])
    ]
    dataset = assemble_dataset(records, invoices, policy="keep")
    return dataset, PlantedTruth(tuple(config.mu), truth)


def scenario_boom_bust(config: SynthConfig, mu: tuple[float, float] = (0.05, -0.05)) -> tuple[Dataset, PlantedTruth]:
    """Expansion in 2006-2007 followed by contraction in 2007-2008."""
    return generate(replace(config, mu=tuple(mu)))


def write_dataset(dataset: Dataset, truth: PlantedTruth, out_dir: str | Path, config: SynthConfig | None = None) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "balance": out / "balance.csv",
        "invoices": out / "invoices.csv",
        "truth": out / "truth.json",
    }
    records = sorted(dataset.balances.values(), key=lambda r: (r.firm, r.year))
    paths["balance"].write_text(format_balance(records), encoding="utf-8")
    paths["invoices"].write_text(format_invoices(dataset.invoices), encoding="utf-8")
    paths["truth"].write_text(truth.to_json(), encoding="utf-8")
    if config is not None:
        paths["config"] = out / "config.json"
        paths["config"].write_text(json.dumps(config.to_json(), indent=2) + "\n", encoding="utf-8")
    return paths
