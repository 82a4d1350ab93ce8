"""Monte Carlo harness for empirical size and power.

Replication ``r`` of a scenario draws its data from ``RngState(base_seed, r)``
keyed by the distribution, dimension and sample size, and each test gets its
own sub-stream keyed by its label. Results therefore do not depend on the
number of worker processes or on execution order, and different shift sizes
of the same cell reuse the same underlying samples.
"""
from __future__ import annotations

import io
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .estimators import make_named_test
from .exceptions import ConfigurationError, DegenerateSplitError, ScenarioError
from .statdist import (
    RngState,
    SkewNormalSpec,
    sample_doubleexp,
    sample_mvnormal,
    sample_mvt1,
    sample_skewnormal2,
)

DISTRIBUTIONS = ("NORMAL", "T1", "DOUBLEEXP", "SKEWNORMAL")
DIRECTIONS = ("ONES", "E1")
DELTAS = (0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30)
TABLE1_TESTS = ("RAN-R1", "RAN-R2", "RAN-H", "SYM-R2", "SYM-H", "HOT")
TABLE1_HEADER = "d,n,ran_r1,ran_r2,ran_h,sym_r2,sym_h,hot,spat"
FIGURES = {
    "NORM": ("NORMAL", TABLE1_TESTS),
    "T1": ("T1", TABLE1_TESTS),
    "DEXP": ("DOUBLEEXP", TABLE1_TESTS),
    "SN": ("SKEWNORMAL", ("RAN-R2", "SYM-R2", "HOT")),
    "MARG": ("DOUBLEEXP", ("SYM-R2", "MARG")),
}
MAX_RETRIES = 5

_DIST_ALIASES = {
    "normal": "NORMAL", "norm": "NORMAL", "t1": "T1", "cauchy": "T1",
    "doubleexp": "DOUBLEEXP", "dexp": "DOUBLEEXP", "double-exp": "DOUBLEEXP",
    "skewnormal": "SKEWNORMAL", "sn": "SKEWNORMAL",
}


def _key(text: str) -> int:
    return zlib.crc32(text.encode())


def _test_label(test) -> str:
    return test if isinstance(test, str) else test[0]


@dataclass(frozen=True)
class Scenario:
    """One simulation cell.

    ``tests`` holds labels understood by :func:`~corank.estimators.make_named_test`
    or ``(label, estimator)`` pairs for custom tests. ``slant`` is the
    skew-normal parameter and is ignored by the other distributions.
    """

    distribution: str = "NORMAL"
    d: int = 2
    n: int = 150
    n_R: int = 6
    shift_delta: float = 0.0
    shift_dir: str = "ONES"
    tests: tuple = ("SYM-R2",)
    reps: int = 500
    base_seed: int = 42
    alpha: float = 0.05
    slant: float = 0.0

    def __post_init__(self):
        dist = _DIST_ALIASES.get(str(self.distribution).lower(), str(self.distribution).upper())
        if dist not in DISTRIBUTIONS:
            raise ConfigurationError(f"unknown distribution {self.distribution!r}")
        object.__setattr__(self, "distribution", dist)
        direction = {"1": "ONES", "2": "E1"}.get(str(self.shift_dir), str(self.shift_dir).upper())
        if direction not in DIRECTIONS:
            raise ConfigurationError(f"unknown shift direction {self.shift_dir!r}")
        object.__setattr__(self, "shift_dir", direction)
        object.__setattr__(self, "tests", tuple(self.tests))
        if self.reps < 1:
            raise ConfigurationError("reps must be at least 1")
        if not self.tests:
            raise ConfigurationError("a scenario needs at least one test")
        if dist == "SKEWNORMAL" and self.d != 2:
            raise ConfigurationError("the skew-normal scenario is bivariate")
        if self.d < 1 or self.n < 2 or self.n_R < 1:
            raise ConfigurationError(f"invalid scenario sizes d={self.d}, n={self.n}, n_R={self.n_R}")
        if not 0 < self.alpha < 1:
            raise ConfigurationError("alpha must lie in (0, 1)")
        for t in self.tests:
            if isinstance(t, str):
                make_named_test(t, self.n_R, self.alpha)

    def shift_vector(self) -> np.ndarray:
        s = np.ones(self.d) if self.shift_dir == "ONES" else np.eye(self.d)[0]
        return self.shift_delta * s

    def data_key(self) -> int:
        return _key(f"{self.distribution}|{self.slant!r}|{self.d}|{self.n}")

    def sample(self, rep: int) -> np.ndarray:
        """Shifted data of replication ``rep``."""
        gen = RngState(self.base_seed, rep).generator(self.data_key())
        if self.distribution == "NORMAL":
            X = sample_mvnormal(self.n, self.d, gen)
        elif self.distribution == "T1":
            X = sample_mvt1(self.n, self.d, gen)
        elif self.distribution == "DOUBLEEXP":
            X = sample_doubleexp(self.n, self.d, gen)
        else:
            X = sample_skewnormal2(self.n, SkewNormalSpec(self.slant), gen)
        return X + self.shift_vector()


@dataclass(frozen=True)
class PowerRow:
    test_id: str
    distribution: str
    slant: float
    d: int
    n: int
    n_R: int
    delta: float
    direction: str
    alpha: float
    reps: int
    rejections: int
    retries: int

    @property
    def rejection_rate(self) -> float:
        return self.rejections / self.reps


CSV_FIELDS = ("test_id", "distribution", "slant", "d", "n", "n_R", "delta", "direction",
              "alpha", "reps", "rejections", "retries", "rejection_rate")


@dataclass
class PowerTable:
    """Rejection counts keyed by test and scenario.

    ``wall_time`` (seconds) is informational and never written to CSV, so
    that repeated runs produce identical files.
    """

    rows: list = field(default_factory=list)
    wall_time: float = 0.0

    def __add__(self, other: "PowerTable") -> "PowerTable":
        return PowerTable(self.rows + other.rows, self.wall_time + other.wall_time)

    def rate(self, test_id: str, **where) -> float:
        hits = [r for r in self.select(test_id=test_id, **where)]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} rows match {test_id} {where}")
        return hits[0].rejection_rate

    def select(self, **where) -> list:
        return [r for r in self.rows if all(getattr(r, k) == v for k, v in where.items())]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(CSV_FIELDS) + "\n")
        for r in self.rows:
            vals = [r.test_id, r.distribution, _fmt(r.slant), r.d, r.n, r.n_R, _fmt(r.delta), r.direction,
                    _fmt(r.alpha), r.reps, r.rejections, r.retries, _fmt(r.rejection_rate)]
            buf.write(",".join(str(v) for v in vals) + "\n")
        return buf.getvalue()


def _fmt(x: float) -> str:
    return format(float(x), ".10g")


# ---------------------------------------------------------------------------
# execution

def _estimators(scenario: Scenario):
    labels = [_test_label(t) for t in scenario.tests]
    ests = [make_named_test(t, scenario.n_R, scenario.alpha) if isinstance(t, str) else t[1]
            for t in scenario.tests]
    return labels, ests


def _replicate(scenario: Scenario, rep: int, labels, estimators, retries: list[int]):
    """Outcomes of every test on replication ``rep``; degenerate splits are retried."""
    X = scenario.sample(rep)
    state = RngState(scenario.base_seed, rep)
    outcomes = []
    for k, (label, est) in enumerate(zip(labels, estimators)):
        for attempt in range(MAX_RETRIES + 1):
            if "random_state" in est.get_params():
                est.set_params(random_state=state.generator(_key(label), attempt))
            try:
                outcomes.append(est.test(X))
                break
            except DegenerateSplitError:
                retries[k] += 1
        else:
            raise ScenarioError(f"{label}: more than {MAX_RETRIES} degenerate splits in replication {rep}")
    return outcomes


def _run_block(scenario: Scenario, start: int, stop: int) -> tuple[list[int], list[int]]:
    labels, estimators = _estimators(scenario)
    rejections = [0] * len(labels)
    retries = [0] * len(labels)
    for rep in range(start, stop):
        for k, outcome in enumerate(_replicate(scenario, rep, labels, estimators, retries)):
            rejections[k] += outcome.rejects(scenario.alpha)
    return rejections, retries


def _statistics_block(scenario: Scenario, start: int, stop: int) -> np.ndarray:
    labels, estimators = _estimators(scenario)
    retries = [0] * len(labels)
    out = np.empty((stop - start, len(labels)))
    for i, rep in enumerate(range(start, stop)):
        out[i] = [o.statistic for o in _replicate(scenario, rep, labels, estimators, retries)]
    return out


def _blocks(reps: int, parallelism: int) -> list[tuple[int, int]]:
    n_blocks = min(reps, 4 * parallelism)
    edges = np.linspace(0, reps, n_blocks + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def run_scenario(s: Scenario, parallelism: int = 1) -> PowerTable:
    """Run every test of ``s`` on ``s.reps`` replications.

    Replications are split into contiguous blocks across ``parallelism``
    worker processes; counts are summed, so the result does not depend on
    the split.
    """
    t0 = time.perf_counter()
    labels = [_test_label(t) for t in s.tests]
    if parallelism <= 1 or s.reps == 1:
        rej, ret = _run_block(s, 0, s.reps)
    else:
        rej, ret = [0] * len(labels), [0] * len(labels)
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            futures = [pool.submit(_run_block, s, a, b) for a, b in _blocks(s.reps, parallelism)]
            for fut in futures:
                r1, r2 = fut.result()
                rej = [a + b for a, b in zip(rej, r1)]
                ret = [a + b for a, b in zip(ret, r2)]
    rows = [PowerRow(label, s.distribution, float(s.slant), s.d, s.n, s.n_R, float(s.shift_delta), s.shift_dir,
                     float(s.alpha), s.reps, int(r), int(t)) for label, r, t in zip(labels, rej, ret)]
    return PowerTable(rows, time.perf_counter() - t0)


def run_statistics(s: Scenario, parallelism: int = 1) -> dict[str, np.ndarray]:
    """Raw test statistics per replication, keyed by test label.

    Uses the same streams as :func:`run_scenario`, so thresholding these
    values at the tests' critical values reproduces its rejection counts.
    """
    labels = [_test_label(t) for t in s.tests]
    if parallelism <= 1 or s.reps == 1:
        values = _statistics_block(s, 0, s.reps)
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            futures = [pool.submit(_statistics_block, s, a, b) for a, b in _blocks(s.reps, parallelism)]
            values = np.vstack([f.result() for f in futures])
    return {label: values[:, k].copy() for k, label in enumerate(labels)}


def run_scenarios(scenarios, parallelism: int = 1) -> PowerTable:
    table = PowerTable()
    for s in scenarios:
        table = table + run_scenario(s, parallelism)
    return table


# ---------------------------------------------------------------------------
# suites

def table1_scenarios(reps: int = 500, seed: int = 42, distributions=("NORMAL", "T1", "DOUBLEEXP"),
                     dims=(2, 4, 6), sizes=(150, 300), n_R: int = 6, alpha: float = 0.05) -> list[Scenario]:
    return [Scenario(dist, d, n, n_R, 0.0, "ONES", TABLE1_TESTS, reps, seed, alpha)
            for dist in distributions for d in dims for n in sizes]


def table1_suite(reps: int = 500, seed: int = 42, parallelism: int = 1, **kwargs) -> PowerTable:
    """Empirical sizes in the layout of the published size table."""
    return run_scenarios(table1_scenarios(reps, seed, **kwargs), parallelism)


def format_table1(table: PowerTable) -> str:
    """Wide CSV: one row per (distribution, d, n) block in input order.

    Distribution blocks follow the order of the rows in ``table``; the
    spatial-rank column is not computed and holds ``NA``.
    """
    cells: dict = {}
    for r in table.rows:
        cells.setdefault((r.distribution, r.d, r.n), {})[r.test_id] = r.rejection_rate
    lines = [TABLE1_HEADER]
    for (_, d, n), rates in cells.items():
        vals = [format(rates[t], ".4f") if t in rates else "NA" for t in TABLE1_TESTS]
        lines.append(",".join([str(d), str(n)] + vals + ["NA"]))
    return "\n".join(lines) + "\n"


def power_curve_scenarios(figure: str, reps: int = 500, seed: int = 42, dims=None, sizes=(150, 300),
                          deltas=DELTAS, directions=DIRECTIONS, n_R: int = 6, alpha: float = 0.05,
                          slants=(1.0, 3.0, 5.0)) -> list[Scenario]:
    fig = figure.upper()
    if fig not in FIGURES:
        raise ConfigurationError(f"unknown figure {figure!r}; choose from {sorted(FIGURES)}")
    dist, tests = FIGURES[fig]
    out = []
    if fig == "SN":
        # Skewed data are shifted along the first axis only.
        for a in slants:
            for n in sizes:
                for delta in deltas:
                    out.append(Scenario(dist, 2, n, n_R, delta, "E1", tests, reps, seed, alpha, slant=a))
        return out
    for direction in directions:
        for d in dims or (2, 4, 6):
            for n in sizes:
                for delta in deltas:
                    out.append(Scenario(dist, d, n, n_R, delta, direction, tests, reps, seed, alpha))
    return out


def power_curves(figure: str, reps: int = 500, seed: int = 42, parallelism: int = 1, **kwargs) -> PowerTable:
    """Power over the shift grid for one figure (``NORM``, ``T1``, ``DEXP``, ``SN``, ``MARG``)."""
    return run_scenarios(power_curve_scenarios(figure, reps, seed, **kwargs), parallelism)


# ---------------------------------------------------------------------------
# SVG output

_COLORS = ("#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666")


def power_svg(rows: list, title: str = "") -> str:
    """One panel: x = shift size, y = rejection rate, a polyline per (test, n)."""
    W, H, L, R, T, B = 420, 300, 50, 110, 30, 40
    deltas = sorted({r.delta for r in rows})
    xmax = max(deltas) if deltas and max(deltas) > 0 else 1.0

    def px(x):
        return L + (W - L - R) * x / xmax

    def py(y):
        return H - B - (H - T - B) * y

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
           f'<rect x="0" y="0" width="{W}" height="{H}" style="fill:#ffffff"/>',
           f'<line x1="{L}" y1="{py(0):.1f}" x2="{W - R}" y2="{py(0):.1f}" style="stroke:#000000"/>',
           f'<line x1="{L}" y1="{py(0):.1f}" x2="{L}" y2="{py(1):.1f}" style="stroke:#000000"/>']
    for y in (0.0, 0.25, 0.5, 0.75, 1.0):
        out.append(f'<text x="{L - 6}" y="{py(y) + 4:.1f}" style="font:10px sans-serif;text-anchor:end">{y:g}</text>')
    for x in deltas:
        out.append(f'<text x="{px(x):.1f}" y="{H - B + 14}" style="font:10px sans-serif;text-anchor:middle">{x:g}</text>')
    out.append(f'<text x="{(L + W - R) / 2:.1f}" y="{H - 6}" style="font:12px sans-serif;text-anchor:middle">&#948;</text>')
    out.append(f'<text x="14" y="{(T + H - B) / 2:.1f}" transform="rotate(-90 14 {(T + H - B) / 2:.1f})" '
               f'style="font:12px sans-serif;text-anchor:middle">power</text>')
    if title:
        out.append(f'<text x="{W / 2:.1f}" y="18" style="font:12px sans-serif;text-anchor:middle">{title}</text>')
    tests = list(dict.fromkeys(r.test_id for r in rows))
    sizes = sorted({r.n for r in rows})
    for i, test in enumerate(tests):
        color = _COLORS[i % len(_COLORS)]
        for j, n in enumerate(sizes):
            pts = sorted((r.delta, r.rejection_rate) for r in rows if r.test_id == test and r.n == n)
            if not pts:
                continue
            dash = "" if j == len(sizes) - 1 else ";stroke-dasharray:6,3,2,3"
            coords = " ".join(f"{px(x):.1f},{py(y):.1f}" for x, y in pts)
            out.append(f'<polyline points="{coords}" style="fill:none;stroke:{color};stroke-width:1.5{dash}"/>')
        out.append(f'<text x="{W - R + 8}" y="{T + 14 * (i + 1)}" style="font:10px sans-serif;fill:{color}">{test}</text>')
    for j, n in enumerate(sizes):
        style = "solid" if j == len(sizes) - 1 else "dash-dot"
        out.append(f'<text x="{W - R + 8}" y="{T + 14 * (len(tests) + j + 2)}" style="font:10px sans-serif">n={n} {style}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_power_svgs(table: PowerTable, outdir) -> list[Path]:
    """Write one SVG per (distribution, slant, d, direction) panel."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    panels: dict = {}
    for r in table.rows:
        panels.setdefault((r.distribution, r.slant, r.d, r.direction), []).append(r)
    paths = []
    for (dist, slant, d, direction), rows in panels.items():
        name = f"{dist.lower()}_d{d}_{direction.lower()}"
        title = f"{dist} d={d} dir={direction}"
        if dist == "SKEWNORMAL":
            name += f"_a{slant:g}"
            title += f" alpha={slant:g}"
        path = outdir / f"{name}.svg"
        path.write_text(power_svg(rows, title))
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# scenario files

_LIST_KEYS = {"d", "n", "delta", "direction", "tests", "distribution", "slant"}
_KNOWN_KEYS = _LIST_KEYS | {"suite", "figure", "n_r", "reps", "seed", "alpha", "parallelism"}


def parse_scenario_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment, lists are comma-separated."""
    cfg: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.lower()
        if key not in _KNOWN_KEYS:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        if key in cfg:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
        items = [v.strip() for v in value.split(",") if v.strip()]
        if not items:
            raise ConfigurationError(f"line {lineno}: empty value for {key!r}")
        cfg[key] = items if key in _LIST_KEYS else items[0]
    return cfg


@dataclass(frozen=True)
class SimulationPlan:
    suite: str
    scenarios: tuple
    parallelism: int = 1

    def run(self, parallelism: int | None = None) -> PowerTable:
        return run_scenarios(self.scenarios, parallelism or self.parallelism)

    def render(self, table: PowerTable) -> str:
        return format_table1(table) if self.suite == "table1" else table.to_csv()


def _ints(values, key):
    try:
        return [int(v) for v in values]
    except ValueError:
        raise ConfigurationError(f"{key} must be integers, got {values}") from None


def _floats(values, key):
    try:
        return [float(v) for v in values]
    except ValueError:
        raise ConfigurationError(f"{key} must be numbers, got {values}") from None


def plan_from_config(cfg: dict, reps: int | None = None, seed: int | None = None) -> SimulationPlan:
    """Build a plan; ``reps``/``seed`` override the file when given."""
    suite = cfg.get("suite", "cells").lower()
    reps = reps if reps is not None else int(cfg.get("reps", 500))
    seed = seed if seed is not None else int(cfg.get("seed", 42))
    alpha = float(cfg.get("alpha", 0.05))
    n_R = int(cfg.get("n_r", 6))
    parallelism = int(cfg.get("parallelism", 1))
    common = dict(n_R=n_R, alpha=alpha)
    if "d" in cfg:
        common["dims"] = tuple(_ints(cfg["d"], "d"))
    if "n" in cfg:
        common["sizes"] = tuple(_ints(cfg["n"], "n"))
    if suite == "table1":
        if "distribution" in cfg:
            common["distributions"] = tuple(cfg["distribution"])
        scenarios = table1_scenarios(reps, seed, **common)
    elif suite == "figure":
        if "figure" not in cfg:
            raise ConfigurationError("suite = figure needs a 'figure' key")
        if "delta" in cfg:
            common["deltas"] = tuple(_floats(cfg["delta"], "delta"))
        if "direction" in cfg:
            common["directions"] = tuple(v.upper() for v in cfg["direction"])
        if "slant" in cfg:
            common["slants"] = tuple(_floats(cfg["slant"], "slant"))
        scenarios = power_curve_scenarios(cfg["figure"], reps, seed, **common)
    elif suite == "cells":
        scenarios = []
        for dist in cfg.get("distribution", ["normal"]):
            for slant in _floats(cfg.get("slant", ["0"]), "slant"):
                for d in common.get("dims", (2,)):
                    for n in common.get("sizes", (150,)):
                        for direction in cfg.get("direction", ["ones"]):
                            for delta in _floats(cfg.get("delta", ["0"]), "delta"):
                                scenarios.append(Scenario(dist, d, n, n_R, delta, direction,
                                                          tuple(cfg.get("tests", ["SYM-R2"])),
                                                          reps, seed, alpha, slant))
    else:
        raise ConfigurationError(f"unknown suite {suite!r}")
    return SimulationPlan(suite, tuple(scenarios), parallelism)


def load_scenario_file(path, reps: int | None = None, seed: int | None = None) -> SimulationPlan:
    return plan_from_config(parse_scenario_text(Path(path).read_text()), reps, seed)
