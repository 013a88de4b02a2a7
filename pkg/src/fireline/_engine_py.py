"""Pure-Python event-driven engine for the finite-box forest-fire chain.

This is the fallback twin of the compiled kernel in _kernel.pyx.  The two
must stay bit-identical: every clock draw is the counter-based exponential
draw_u64(master_seed, stream_id, purpose, site, index), so a trajectory is
a pure function of the constructor arguments, independent of event
interleaving or which implementation runs it.

Sites are internal indices 0..n_sites-1; the public wrapper maps lattice
coordinates.  States: 0 vacant, 1 occupied, 2 burning.  Transitions:
seed clocks (rate 1) turn vacant sites occupied, match clocks (rate
match_rate, or an injected schedule) turn occupied sites burning, and a
burning site's propagation clock (rate pi) turns it vacant while igniting
any occupied neighbors.  Clocks for every site are always live; events
with no effect are consumed and the clock resampled (discard-and-resample,
exact by memorylessness).  The event queue is keyed by (time, site, kind)
with kind priority propagate < match < seed.
"""

import math
from heapq import heappop, heappush

from .rng import PURPOSE_MATCH, PURPOSE_PROPAGATE, PURPOSE_SEED, draw_u64

VACANT, OCCUPIED, BURNING = 0, 1, 2
KIND_PROPAGATE, KIND_MATCH, KIND_SEED = 0, 1, 2

_INV53 = 1.0 / 9007199254740992.0
_MODE_PLAIN, _MODE_WATCH, _MODE_QUIET = 0, 1, 2


class PyEngineCore:
    """Event loop core; see module docstring for the dynamics."""

    def __init__(
        self,
        n_sites,
        pi,
        match_rate,
        master_seed,
        stream_id,
        initial_occupied=False,
        ignite_site=-1,
        injected_t=(),
        injected_site=(),
        track_fronts=False,
    ):
        if n_sites < 1:
            raise ValueError("n_sites must be at least 1")
        if not pi > 0.0:
            raise ValueError("pi must be positive")
        if match_rate < 0.0:
            raise ValueError("match_rate must be nonnegative")
        if len(injected_t) != len(injected_site):
            raise ValueError("injected match times and sites differ in length")
        if len(injected_t) > 0 and match_rate > 0.0:
            raise ValueError("injected matches require match_rate == 0")
        if ignite_site >= 0 and not initial_occupied:
            raise ValueError("igniting a site requires an occupied initial state")
        if not 0 <= master_seed < 2**64:
            raise ValueError("master_seed must fit in 64 bits")
        if not 0 <= stream_id < 2**64:
            raise ValueError("stream_id must fit in 64 bits")

        self.n_sites = n_sites
        self.pi = pi
        self.match_rate = match_rate
        self.master_seed = master_seed
        self.stream_id = stream_id
        self.now = 0.0
        self.event_count = 0
        self.burning_count = 0
        self.truncated = False

        self._states = bytearray([OCCUPIED if initial_occupied else VACANT] * n_sites)
        self._k_seed = [0] * n_sites
        self._k_match = [0] * n_sites
        self._k_prop = [0] * n_sites
        self._heap = []

        # burned-interval tracking (internal indices), reset by the caller
        self.burn_lo = n_sites
        self.burn_hi = -1

        # occupied-interval watch
        self._watch_active = False
        self._wlo = 0
        self._whi = -1
        self._wsize = 0
        self._occ_count = 0

        # propagation-mode recording
        self._track = bool(track_fronts)
        self._ignite_site = ignite_site
        self._right_front = ignite_site
        self._left_front = ignite_site
        self.front_plus = []  # (raw time, internal site) right-front advances
        self.front_minus = []
        self.burn_times = {}  # internal site -> first ignition raw time
        self.spark_log = []  # (internal site, ignite time, extinguish time)
        self._spark_open = {}
        self._rw_site = -1  # open vacancy window behind the right front
        self._rw_clean = True
        self._lw_site = -1
        self._lw_clean = True
        self.omega_right = []
        self.omega_left = []

        self.match_log = []  # (raw time, internal site, effective)

        for i in range(n_sites):
            heappush(self._heap, (self._exp_seed(i), i, KIND_SEED))
        if match_rate > 0.0:
            for i in range(n_sites):
                heappush(self._heap, (self._exp_match(i), i, KIND_MATCH))
        for t, i in zip(injected_t, injected_site):
            if not 0 <= i < n_sites:
                raise ValueError(f"injected match site {i} outside the box")
            heappush(self._heap, (float(t), int(i), KIND_MATCH))
        if ignite_site >= 0:
            if not 0 <= ignite_site < n_sites:
                raise ValueError(f"ignite_site {ignite_site} outside the box")
            self._ignite(ignite_site, 0.0, -1)

    # -- clock draws --------------------------------------------------------

    def _exp_seed(self, site):
        k = self._k_seed[site]
        self._k_seed[site] = k + 1
        x = draw_u64(self.master_seed, self.stream_id, PURPOSE_SEED, site, k)
        return -math.log(((x >> 11) + 1) * _INV53)

    def _exp_match(self, site):
        k = self._k_match[site]
        self._k_match[site] = k + 1
        x = draw_u64(self.master_seed, self.stream_id, PURPOSE_MATCH, site, k)
        return -math.log(((x >> 11) + 1) * _INV53) / self.match_rate

    def _exp_prop(self, site):
        k = self._k_prop[site]
        self._k_prop[site] = k + 1
        x = draw_u64(self.master_seed, self.stream_id, PURPOSE_PROPAGATE, site, k)
        return -math.log(((x >> 11) + 1) * _INV53) / self.pi

    # -- state transitions --------------------------------------------------

    def _ignite(self, site, t, source):
        # occupied -> burning, schedule the site's propagation clock
        self._states[site] = BURNING
        self.burning_count += 1
        if site < self.burn_lo:
            self.burn_lo = site
        if site > self.burn_hi:
            self.burn_hi = site
        if self._watch_active and self._wlo <= site <= self._whi:
            self._occ_count -= 1
        heappush(self._heap, (t + self._exp_prop(site), site, KIND_PROPAGATE))
        if self._track:
            if site not in self.burn_times:
                self.burn_times[site] = t
            if source == self._right_front and site == source + 1:
                self._right_front = site
                self.front_plus.append((t, site))
                if site == self.n_sites - 1:
                    self.truncated = True
            elif source == self._left_front and site == source - 1:
                self._left_front = site
                self.front_minus.append((t, site))
                if site == 0:
                    self.truncated = True
            elif source >= 0:
                self._spark_open[site] = t

    def _step(self):
        t, site, kind = heappop(self._heap)
        self.now = t
        self.event_count += 1
        states = self._states
        if kind == KIND_SEED:
            if states[site] == VACANT:
                states[site] = OCCUPIED
                if self._watch_active and self._wlo <= site <= self._whi:
                    self._occ_count += 1
                if self._track:
                    if site == self._rw_site:
                        self._rw_clean = False
                    if site == self._lw_site:
                        self._lw_clean = False
            heappush(self._heap, (t + self._exp_seed(site), site, KIND_SEED))
        elif kind == KIND_MATCH:
            effective = states[site] == OCCUPIED
            if effective:
                self._ignite(site, t, -1)
            if self.match_rate > 0.0:
                heappush(self._heap, (t + self._exp_match(site), site, KIND_MATCH))
            self.match_log.append((t, site, effective))
        else:  # KIND_PROPAGATE: a burning site's own clock, always effective
            if self._track:
                if site in self._spark_open:
                    self.spark_log.append((site, self._spark_open.pop(site), t))
                # a front site's extinguish closes the vacancy window of the
                # site behind it and opens its own
                if site == self._right_front:
                    if self._rw_site >= 0:
                        self.omega_right.append(self._rw_clean)
                    self._rw_site = site
                    self._rw_clean = True
                if site == self._left_front:
                    # the origin's window is counted once, on the right side
                    if self._lw_site >= 0 and self._lw_site != self._ignite_site:
                        self.omega_left.append(self._lw_clean)
                    self._lw_site = site
                    self._lw_clean = True
            states[site] = VACANT
            self.burning_count -= 1
            left = site - 1
            if left >= 0 and states[left] == OCCUPIED:
                self._ignite(left, t, site)
            right = site + 1
            if right < self.n_sites and states[right] == OCCUPIED:
                self._ignite(right, t, site)

    def _run(self, t_limit, mode):
        heap = self._heap
        if mode == _MODE_QUIET and self.burning_count == 0:
            return self.now
        while heap and heap[0][0] <= t_limit:
            self._step()
            if mode == _MODE_WATCH:
                if self._occ_count == self._wsize:
                    return self.now
            elif mode == _MODE_QUIET:
                if self.burning_count == 0:
                    return self.now
        return -1.0

    # -- public driving methods ---------------------------------------------

    def advance_to(self, t_raw):
        """Process every event up to and including raw time t_raw."""
        if t_raw < self.now:
            raise ValueError(f"cannot advance backwards: now={self.now}, target={t_raw}")
        self._run(t_raw, _MODE_PLAIN)
        self.now = t_raw

    def run_while_burning(self, t_cap):
        """Process events until no site burns; returns that raw time, or -1.0
        if t_cap is reached first (now is then t_cap)."""
        end = self._run(t_cap, _MODE_QUIET)
        if end < 0.0:
            self.now = t_cap
        return end

    def run_until_interval_occupied(self, lo, hi, t_cap):
        """Process events until every site in [lo, hi] is occupied; returns
        that raw time, or -1.0 if t_cap is reached first (now is then t_cap)."""
        if lo > hi:
            return self.now
        if not (0 <= lo and hi < self.n_sites):
            raise ValueError(f"watch interval [{lo}, {hi}] outside the box")
        states = self._states
        self._wlo = lo
        self._whi = hi
        self._wsize = hi - lo + 1
        self._occ_count = sum(1 for i in range(lo, hi + 1) if states[i] == OCCUPIED)
        if self._occ_count == self._wsize:
            return self.now
        self._watch_active = True
        try:
            hit = self._run(t_cap, _MODE_WATCH)
        finally:
            self._watch_active = False
        if hit < 0.0:
            self.now = t_cap
        return hit

    def reset_burn_bounds(self):
        self.burn_lo = self.n_sites
        self.burn_hi = -1

    def state_view(self):
        """The raw state bytes (internal indices)."""
        return bytes(self._states)
