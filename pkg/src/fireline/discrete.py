"""Finite-box forest-fire chain and the pure propagation process.

DiscreteFFP wraps the event engine in lattice coordinates: sites are the
integers in [-A_sites, A_sites] with permanently vacant ghosts outside,
macroscopic time t corresponds to raw clock time a*t, and macroscopic
space x to site floor(n*x).  Observables follow the rescaled conventions:
the cluster through x, its macroscopic extent D, the occupied fraction K
in a window of half-width m, and the logarithmic sizes Z and W.

run_propagation drives the one-fire variant: every site occupied, the
center burning, no matches, raw time.  It records front advance times,
first burn times, sparks (burning sites away from the fronts), and the
per-site vacancy-window indicators behind each front.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .engine import make_engine
from .rng import Mark
from .scales import Scales, compute_scales

STATE_VACANT, STATE_OCCUPIED, STATE_BURNING = 0, 1, 2

MEMORY_CAP_SITES = 2**30

_MATCH_MODES = ("poisson", "injected", "none")


class ResourceLimitError(RuntimeError):
    """A requested simulation exceeds the configured memory cap."""


def _check_box(n_sites: int) -> None:
    if n_sites > MEMORY_CAP_SITES:
        raise ResourceLimitError(
            f"box of {n_sites} sites exceeds the cap of {MEMORY_CAP_SITES}"
        )


@dataclass(frozen=True)
class ClusterObservables:
    """Observables at one space-time point.

    cluster: occupied interval through the queried site (lattice indices),
      or None when that site is not occupied.
    D: the cluster rescaled by n, as a macroscopic interval, or None.
    size: number of sites in the cluster (0 when empty).
    K: occupied fraction in the window of half-width m around the site,
      clipped at the box edge.
    Z: min(-log(1-K)/log(1/lambda), 1), the window occupancy on log scale.
    W: min(log(size)/log(1/lambda), 1), the cluster size on log scale.
    """

    cluster: Optional[Tuple[int, int]]
    D: Optional[Tuple[float, float]]
    size: int
    K: float
    Z: float
    W: float


def match_schedule_from_marks(
    marks: Sequence[Mark], scales: Scales, a_sites: int
) -> Tuple[List[float], List[int]]:
    """Map macroscopic marks (x, t) to a lattice match schedule.

    A mark at x lands on site floor(n*x); its time stays macroscopic (the
    wrapper converts to raw time on injection).  Marks outside the box are
    rejected.
    """
    times: List[float] = []
    sites: List[int] = []
    for mark in marks:
        site = math.floor(scales.n * mark.x)
        if abs(site) > a_sites:
            raise ValueError(f"mark at x={mark.x} maps to site {site}, outside the box")
        times.append(mark.t)
        sites.append(site)
    return times, sites


class DiscreteFFP:
    """Forest-fire chain on the box [-A_sites, A_sites], A_sites = floor(A*n).

    match_mode selects how matches arrive: "poisson" (rate lambda clocks on
    every site), "injected" (only the given (t_macro, site) schedule), or
    "none".  Seeds always run at rate 1 and burning sites always extinguish
    at rate pi.
    """

    def __init__(
        self,
        lam: float,
        pi: float,
        A: float,
        seed: int,
        *,
        stream_id: int = 0,
        match_mode: str = "poisson",
        injected_matches: Sequence[Tuple[float, int]] = (),
        initial: str = "vacant",
        engine: str = "auto",
    ):
        if A <= 0.0:
            raise ValueError("A must be positive")
        if match_mode not in _MATCH_MODES:
            raise ValueError(f"match_mode must be one of {_MATCH_MODES}")
        if match_mode != "injected" and injected_matches:
            raise ValueError('an injected schedule requires match_mode="injected"')
        if initial not in ("vacant", "occupied"):
            raise ValueError('initial must be "vacant" or "occupied"')

        self.scales = compute_scales(lam, pi)
        self.lam = lam
        self.pi = pi
        self.A = A
        self.seed = seed
        self.stream_id = stream_id
        self.a_sites = math.floor(A * self.scales.n)
        self.n_sites = 2 * self.a_sites + 1
        _check_box(self.n_sites)

        a = self.scales.a
        inj_t = [a * t for t, _ in injected_matches]
        inj_s = [s + self.a_sites for _, s in injected_matches]
        for (t, s), idx in zip(injected_matches, inj_s):
            if not 0 <= idx < self.n_sites:
                raise ValueError(f"injected match at site {s} is outside the box")
            if t < 0.0:
                raise ValueError("injected match times must be nonnegative")

        self._eng = make_engine(
            self.n_sites,
            pi,
            lam if match_mode == "poisson" else 0.0,
            seed,
            stream_id,
            initial_occupied=(initial == "occupied"),
            injected_t=inj_t,
            injected_site=inj_s,
            force=engine,
        )

    # -- time bookkeeping ----------------------------------------------------

    @property
    def now_raw(self) -> float:
        return self._eng.now

    @property
    def now(self) -> float:
        """Current macroscopic time."""
        return self._eng.now / self.scales.a

    @property
    def event_count(self) -> int:
        return self._eng.event_count

    def advance_to(self, t: float) -> None:
        """Run the chain up to macroscopic time t."""
        self._eng.advance_to(self.scales.a * t)

    def run_while_burning(self, t_cap: float) -> Optional[float]:
        """Run until no site burns; macroscopic end time, or None at the cap."""
        end = self._eng.run_while_burning(self.scales.a * t_cap)
        return None if end < 0.0 else end / self.scales.a

    def run_until_interval_occupied(
        self, lo: int, hi: int, t_cap: float
    ) -> Optional[float]:
        """Run until sites lo..hi (lattice) are simultaneously occupied.

        Returns the macroscopic hit time, or None if t_cap comes first.
        """
        hit = self._eng.run_until_interval_occupied(
            lo + self.a_sites, hi + self.a_sites, self.scales.a * t_cap
        )
        return None if hit < 0.0 else hit / self.scales.a

    # -- state access ---------------------------------------------------------

    def states(self) -> bytes:
        """State bytes for sites -A_sites..A_sites, left to right."""
        return self._eng.state_view()

    def site_state(self, site: int) -> int:
        if abs(site) > self.a_sites:
            return STATE_VACANT  # ghost sites never change
        return self._eng.state_view()[site + self.a_sites]

    def burning_count(self) -> int:
        return self._eng.burning_count

    def burned_bounds(self) -> Optional[Tuple[int, int]]:
        """Lattice interval touched by ignitions since the last reset."""
        if self._eng.burn_hi < self._eng.burn_lo:
            return None
        return (self._eng.burn_lo - self.a_sites, self._eng.burn_hi - self.a_sites)

    def reset_burned_bounds(self) -> None:
        self._eng.reset_burn_bounds()

    def matches(self) -> List[Tuple[float, int, bool]]:
        """Processed match events as (t_macro, lattice site, had an effect)."""
        a = self.scales.a
        return [(t / a, s - self.a_sites, e) for t, s, e in self._eng.match_log]

    # -- observables -----------------------------------------------------------

    def observables(self, x: float) -> ClusterObservables:
        """Cluster and window observables at macroscopic position x."""
        sc = self.scales
        site0 = math.floor(sc.n * x)
        if abs(site0) > self.a_sites:
            raise ValueError(f"x={x} maps to site {site0}, outside the box")
        st = self._eng.state_view()
        idx = site0 + self.a_sites

        if st[idx] == STATE_OCCUPIED:
            lo = idx
            while lo - 1 >= 0 and st[lo - 1] == STATE_OCCUPIED:
                lo -= 1
            hi = idx
            while hi + 1 < self.n_sites and st[hi + 1] == STATE_OCCUPIED:
                hi += 1
            cluster = (lo - self.a_sites, hi - self.a_sites)
            size = hi - lo + 1
            d = (cluster[0] / sc.n, cluster[1] / sc.n)
            w = min(math.log(size) / sc.a, 1.0)
        else:
            cluster = None
            size = 0
            d = None
            w = 0.0

        wlo = max(idx - sc.m, 0)
        whi = min(idx + sc.m, self.n_sites - 1)
        occ = sum(1 for i in range(wlo, whi + 1) if st[i] == STATE_OCCUPIED)
        k = occ / (whi - wlo + 1)
        if k >= 1.0:
            z = 1.0
        else:
            z = min(-math.log1p(-k) / sc.a, 1.0)
        return ClusterObservables(cluster=cluster, D=d, size=size, K=k, Z=z, W=w)

    def cluster_size_at_origin(self, t: float) -> int:
        """Advance to macroscopic time t and return |C| at x=0."""
        self.advance_to(t)
        return self.observables(0.0).size

    # -- export ----------------------------------------------------------------

    def snapshot(self) -> dict:
        """Run-length-encoded state snapshot with full parameters."""
        st = self._eng.state_view()
        runs: List[List[int]] = []
        cur = st[0]
        count = 1
        for b in st[1:]:
            if b == cur:
                count += 1
            else:
                runs.append([count, cur])
                cur = b
                count = 1
        runs.append([count, cur])
        return {
            "schema": "ffp-snapshot/1",
            "lambda": self.lam,
            "pi": self.pi,
            "A": self.A,
            "seed": self.seed,
            "stream": self.stream_id,
            "t_macro": self.now,
            "t_raw": self.now_raw,
            "encoding": "rle",
            "states": runs,
        }


# -- propagation process -------------------------------------------------------


def suggested_radius(pi: float, horizon: float) -> int:
    """Box half-width so the fronts stay inside with large margin.

    Each front advances like a Poisson process of rate pi, so pi*horizon
    plus ten standard deviations is comfortably past any realistic run.
    """
    mean = pi * horizon
    return math.ceil(mean + 10.0 * math.sqrt(mean)) + 10


@dataclass
class PropagationRun:
    """One realization of the propagation process.

    Fronts start at the center (offset 0).  The k-th entry of times_plus is
    the raw time the right front reached offset k; mirrored for times_minus.
    burn_times maps each offset to its first ignition time.  spark_log lists
    burning intervals of sites ignited away from a front tip.  omega_right
    and omega_left hold one indicator per closed vacancy window: True when
    no seed landed on the site between the two successive front extinctions
    bracketing the window.
    """

    pi: float
    horizon: float
    radius: int
    seed: int
    stream_id: int
    truncated: bool
    times_plus: np.ndarray
    times_minus: np.ndarray
    burn_times: Dict[int, float]
    spark_log: List[Tuple[int, float, float]]
    omega_right: np.ndarray
    omega_left: np.ndarray
    event_count: int = 0

    def front_position(self, t: float, side: str = "right") -> int:
        """Front offset at raw time t (number of advances up to t)."""
        if side == "right":
            return int(np.searchsorted(self.times_plus, t, side="right"))
        if side == "left":
            return int(np.searchsorted(self.times_minus, t, side="right"))
        raise ValueError('side must be "right" or "left"')

    def omega1_fraction(self) -> Tuple[float, int]:
        """Pooled fraction of clean vacancy windows and the window count."""
        total = len(self.omega_right) + len(self.omega_left)
        if total == 0:
            return (float("nan"), 0)
        clean = int(self.omega_right.sum()) + int(self.omega_left.sum())
        return (clean / total, total)


def run_propagation(
    pi: float,
    horizon: float,
    radius: Optional[int] = None,
    seed: int = 0,
    stream_id: int = 0,
    engine: str = "auto",
) -> PropagationRun:
    """Run the propagation process (raw time) up to the given horizon.

    Initial state: every site occupied, the center burning.  No matches.
    """
    if horizon <= 0.0:
        raise ValueError("horizon must be positive")
    if not pi > 0.0:
        raise ValueError("pi must be positive")
    if radius is None:
        radius = suggested_radius(pi, horizon)
    if radius < 1:
        raise ValueError("radius must be at least 1")
    n_sites = 2 * radius + 1
    _check_box(n_sites)

    eng = make_engine(
        n_sites,
        pi,
        0.0,
        seed,
        stream_id,
        initial_occupied=True,
        ignite_site=radius,
        track_fronts=True,
        force=engine,
    )
    eng.advance_to(horizon)

    center = radius
    return PropagationRun(
        pi=pi,
        horizon=horizon,
        radius=radius,
        seed=seed,
        stream_id=stream_id,
        truncated=eng.truncated,
        times_plus=np.array([t for t, _ in eng.front_plus], dtype=np.float64),
        times_minus=np.array([t for t, _ in eng.front_minus], dtype=np.float64),
        burn_times={s - center: t for s, t in eng.burn_times.items()},
        spark_log=[(s - center, t0, t1) for s, t0, t1 in eng.spark_log],
        omega_right=np.array(eng.omega_right, dtype=bool),
        omega_left=np.array(eng.omega_left, dtype=bool),
        event_count=eng.event_count,
    )
