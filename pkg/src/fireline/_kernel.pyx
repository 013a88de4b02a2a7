# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled event engine, bit-identical to the pure-Python twin.

Same clocks, same counter-based Philox4x64-10 draws, same (time, site,
kind) event order; the heap and state arrays live in C.  Any divergence
from fireline._engine_py.PyEngineCore is a bug; the parity tests compare
the two realization by realization.
"""

from cpython.bytes cimport PyBytes_FromStringAndSize
from libc.math cimport log
from libc.stdint cimport uint32_t, uint64_t
from libc.stdlib cimport free, malloc

cdef extern from *:
    ctypedef unsigned long long uint128 "unsigned __int128"

cdef uint64_t M0 = (<uint64_t>0xD2E7470E << 32) | <uint64_t>0xE14C6C93
cdef uint64_t M1 = (<uint64_t>0xCA5A8263 << 32) | <uint64_t>0x95121157
cdef uint64_t W0 = (<uint64_t>0x9E3779B9 << 32) | <uint64_t>0x7F4A7C15
cdef uint64_t W1 = (<uint64_t>0xBB67AE85 << 32) | <uint64_t>0x84CAA73B

cdef double INV53 = 1.0 / 9007199254740992.0

cdef uint64_t PURP_SEED = 1
cdef uint64_t PURP_MATCH = 2
cdef uint64_t PURP_PROP = 3

cdef unsigned char VACANT = 0
cdef unsigned char OCCUPIED = 1
cdef unsigned char BURNING = 2


cdef inline uint64_t philox_word0(uint64_t c0, uint64_t c1, uint64_t c2,
                                  uint64_t c3, uint64_t k0, uint64_t k1) noexcept nogil:
    cdef int r
    cdef uint128 p0, p1
    cdef uint64_t n0, n1, n2, n3
    for r in range(10):
        p0 = <uint128>c0 * <uint128>M0
        p1 = <uint128>c2 * <uint128>M1
        n0 = (<uint64_t>(p1 >> 64)) ^ c1 ^ k0
        n1 = <uint64_t>p1
        n2 = (<uint64_t>(p0 >> 64)) ^ c3 ^ k1
        n3 = <uint64_t>p0
        c0 = n0
        c1 = n1
        c2 = n2
        c3 = n3
        k0 = k0 + W0
        k1 = k1 + W1
    return c0


cdef class CyEngineCore:
    """C twin of PyEngineCore; see fireline._engine_py for the semantics."""

    cdef public int n_sites
    cdef public double pi
    cdef public double match_rate
    cdef public unsigned long long master_seed
    cdef public unsigned long long stream_id
    cdef public double now
    cdef public long long event_count
    cdef public int burning_count
    cdef public bint truncated
    cdef public int burn_lo
    cdef public int burn_hi

    cdef unsigned char* states
    cdef uint32_t* kseed
    cdef uint32_t* kmatch
    cdef uint32_t* kprop
    cdef double* ht
    cdef int* hs
    cdef unsigned char* hk
    cdef int hsize
    cdef int hcap

    cdef bint watch_active
    cdef int wlo
    cdef int whi
    cdef int wsize
    cdef int occ_count

    cdef bint track
    cdef int ignite_origin
    cdef int right_front
    cdef int left_front
    cdef int rw_site
    cdef int lw_site
    cdef bint rw_clean
    cdef bint lw_clean

    cdef public list front_plus
    cdef public list front_minus
    cdef public dict burn_times
    cdef public list spark_log
    cdef public list omega_right
    cdef public list omega_left
    cdef public list match_log
    cdef dict spark_open

    def __cinit__(
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

        cdef int S = n_sites
        cdef int n_injected = len(injected_t)
        self.n_sites = S
        self.pi = pi
        self.match_rate = match_rate
        self.master_seed = master_seed
        self.stream_id = stream_id
        self.now = 0.0
        self.event_count = 0
        self.burning_count = 0
        self.truncated = False
        self.burn_lo = S
        self.burn_hi = -1
        self.watch_active = False
        self.wlo = 0
        self.whi = -1
        self.wsize = 0
        self.occ_count = 0

        self.track = bool(track_fronts)
        self.ignite_origin = ignite_site
        self.right_front = ignite_site
        self.left_front = ignite_site
        self.rw_site = -1
        self.rw_clean = True
        self.lw_site = -1
        self.lw_clean = True
        self.front_plus = []
        self.front_minus = []
        self.burn_times = {}
        self.spark_log = []
        self.spark_open = {}
        self.omega_right = []
        self.omega_left = []
        self.match_log = []

        self.hcap = 3 * S + n_injected + 8
        self.states = <unsigned char*>malloc(S)
        self.kseed = <uint32_t*>malloc(S * sizeof(uint32_t))
        self.kmatch = <uint32_t*>malloc(S * sizeof(uint32_t))
        self.kprop = <uint32_t*>malloc(S * sizeof(uint32_t))
        self.ht = <double*>malloc(self.hcap * sizeof(double))
        self.hs = <int*>malloc(self.hcap * sizeof(int))
        self.hk = <unsigned char*>malloc(self.hcap)
        if (self.states == NULL or self.kseed == NULL or self.kmatch == NULL
                or self.kprop == NULL or self.ht == NULL or self.hs == NULL
                or self.hk == NULL):
            raise MemoryError("engine allocation failed")
        self.hsize = 0

        cdef unsigned char init_state = OCCUPIED if initial_occupied else VACANT
        cdef int i
        for i in range(S):
            self.states[i] = init_state
            self.kseed[i] = 0
            self.kmatch[i] = 0
            self.kprop[i] = 0

        for i in range(S):
            self._push(self._exp_seed(i), i, 2)
        if self.match_rate > 0.0:
            for i in range(S):
                self._push(self._exp_match(i), i, 1)
        cdef int s
        cdef double t
        for j in range(n_injected):
            t = injected_t[j]
            s = injected_site[j]
            if not 0 <= s < S:
                raise ValueError(f"injected match site {s} outside the box")
            self._push(t, s, 1)
        if ignite_site >= 0:
            if not 0 <= ignite_site < S:
                raise ValueError(f"ignite_site {ignite_site} outside the box")
            self._ignite(ignite_site, 0.0, -1)

    def __dealloc__(self):
        if self.states != NULL:
            free(self.states)
        if self.kseed != NULL:
            free(self.kseed)
        if self.kmatch != NULL:
            free(self.kmatch)
        if self.kprop != NULL:
            free(self.kprop)
        if self.ht != NULL:
            free(self.ht)
        if self.hs != NULL:
            free(self.hs)
        if self.hk != NULL:
            free(self.hk)

    # -- clock draws ----------------------------------------------------------

    cdef inline double _exp_seed(self, int site) noexcept nogil:
        cdef uint32_t k = self.kseed[site]
        self.kseed[site] = k + 1
        cdef uint64_t x = philox_word0(
            PURP_SEED, <uint64_t>site, <uint64_t>k, 0,
            self.master_seed, self.stream_id)
        return -log((<double>((x >> 11) + 1)) * INV53)

    cdef inline double _exp_match(self, int site) noexcept nogil:
        cdef uint32_t k = self.kmatch[site]
        self.kmatch[site] = k + 1
        cdef uint64_t x = philox_word0(
            PURP_MATCH, <uint64_t>site, <uint64_t>k, 0,
            self.master_seed, self.stream_id)
        return -log((<double>((x >> 11) + 1)) * INV53) / self.match_rate

    cdef inline double _exp_prop(self, int site) noexcept nogil:
        cdef uint32_t k = self.kprop[site]
        self.kprop[site] = k + 1
        cdef uint64_t x = philox_word0(
            PURP_PROP, <uint64_t>site, <uint64_t>k, 0,
            self.master_seed, self.stream_id)
        return -log((<double>((x >> 11) + 1)) * INV53) / self.pi

    # -- heap ------------------------------------------------------------------

    cdef inline bint _lt(self, int i, int j) noexcept nogil:
        if self.ht[i] != self.ht[j]:
            return self.ht[i] < self.ht[j]
        if self.hs[i] != self.hs[j]:
            return self.hs[i] < self.hs[j]
        return self.hk[i] < self.hk[j]

    cdef inline void _swap(self, int i, int j) noexcept nogil:
        cdef double t = self.ht[i]
        cdef int s = self.hs[i]
        cdef unsigned char k = self.hk[i]
        self.ht[i] = self.ht[j]
        self.hs[i] = self.hs[j]
        self.hk[i] = self.hk[j]
        self.ht[j] = t
        self.hs[j] = s
        self.hk[j] = k

    cdef int _push(self, double t, int s, unsigned char k) except -1:
        if self.hsize >= self.hcap:
            raise RuntimeError("event heap overflow")
        cdef int i = self.hsize
        cdef int parent
        self.ht[i] = t
        self.hs[i] = s
        self.hk[i] = k
        self.hsize = i + 1
        while i > 0:
            parent = (i - 1) >> 1
            if self._lt(i, parent):
                self._swap(i, parent)
                i = parent
            else:
                break
        return 0

    cdef void _pop(self) noexcept nogil:
        cdef int n = self.hsize - 1
        cdef int i = 0
        cdef int l, r, m
        self.hsize = n
        if n == 0:
            return
        self.ht[0] = self.ht[n]
        self.hs[0] = self.hs[n]
        self.hk[0] = self.hk[n]
        while True:
            l = 2 * i + 1
            if l >= n:
                break
            m = l
            r = l + 1
            if r < n and self._lt(r, l):
                m = r
            if self._lt(m, i):
                self._swap(m, i)
                i = m
            else:
                break

    # -- transitions ------------------------------------------------------------

    cdef int _ignite(self, int site, double t, int source) except -1:
        self.states[site] = BURNING
        self.burning_count += 1
        if site < self.burn_lo:
            self.burn_lo = site
        if site > self.burn_hi:
            self.burn_hi = site
        if self.watch_active and self.wlo <= site <= self.whi:
            self.occ_count -= 1
        self._push(t + self._exp_prop(site), site, 0)
        if self.track:
            if site not in self.burn_times:
                self.burn_times[site] = t
            if source == self.right_front and site == source + 1:
                self.right_front = site
                self.front_plus.append((t, site))
                if site == self.n_sites - 1:
                    self.truncated = True
            elif source == self.left_front and site == source - 1:
                self.left_front = site
                self.front_minus.append((t, site))
                if site == 0:
                    self.truncated = True
            elif source >= 0:
                self.spark_open[site] = t
        return 0

    cdef int _step(self) except -1:
        cdef double t = self.ht[0]
        cdef int site = self.hs[0]
        cdef unsigned char kind = self.hk[0]
        cdef bint effective
        cdef int nbr
        self._pop()
        self.now = t
        self.event_count += 1
        if kind == 2:  # seed
            if self.states[site] == VACANT:
                self.states[site] = OCCUPIED
                if self.watch_active and self.wlo <= site <= self.whi:
                    self.occ_count += 1
                if self.track:
                    if site == self.rw_site:
                        self.rw_clean = False
                    if site == self.lw_site:
                        self.lw_clean = False
            self._push(t + self._exp_seed(site), site, 2)
        elif kind == 1:  # match
            effective = self.states[site] == OCCUPIED
            if effective:
                self._ignite(site, t, -1)
            if self.match_rate > 0.0:
                self._push(t + self._exp_match(site), site, 1)
            self.match_log.append((t, site, True if effective else False))
        else:  # propagate
            if self.track:
                if site in self.spark_open:
                    self.spark_log.append((site, self.spark_open.pop(site), t))
                if site == self.right_front:
                    if self.rw_site >= 0:
                        self.omega_right.append(True if self.rw_clean else False)
                    self.rw_site = site
                    self.rw_clean = True
                if site == self.left_front:
                    # the origin's window is counted once, on the right side
                    if self.lw_site >= 0 and self.lw_site != self.ignite_origin:
                        self.omega_left.append(True if self.lw_clean else False)
                    self.lw_site = site
                    self.lw_clean = True
            self.states[site] = VACANT
            self.burning_count -= 1
            nbr = site - 1
            if nbr >= 0 and self.states[nbr] == OCCUPIED:
                self._ignite(nbr, t, site)
            nbr = site + 1
            if nbr < self.n_sites and self.states[nbr] == OCCUPIED:
                self._ignite(nbr, t, site)
        return 0

    cdef double _run(self, double t_limit, int mode) except *:
        if mode == 2 and self.burning_count == 0:
            return self.now
        while self.hsize > 0 and self.ht[0] <= t_limit:
            self._step()
            if mode == 1:
                if self.occ_count == self.wsize:
                    return self.now
            elif mode == 2:
                if self.burning_count == 0:
                    return self.now
        return -1.0

    # -- public driving methods ---------------------------------------------

    def advance_to(self, double t_raw):
        """Process every event up to and including raw time t_raw."""
        if t_raw < self.now:
            raise ValueError(f"cannot advance backwards: now={self.now}, target={t_raw}")
        self._run(t_raw, 0)
        self.now = t_raw

    def run_while_burning(self, double t_cap):
        """Process events until no site burns; returns that raw time, or -1.0
        if t_cap is reached first (now is then t_cap)."""
        cdef double end = self._run(t_cap, 2)
        if end < 0.0:
            self.now = t_cap
        return end

    def run_until_interval_occupied(self, int lo, int hi, double t_cap):
        """Process events until every site in [lo, hi] is occupied; returns
        that raw time, or -1.0 if t_cap is reached first (now is then t_cap)."""
        cdef int i
        cdef int occ
        cdef double hit
        if lo > hi:
            return self.now
        if not (0 <= lo and hi < self.n_sites):
            raise ValueError(f"watch interval [{lo}, {hi}] outside the box")
        occ = 0
        for i in range(lo, hi + 1):
            if self.states[i] == OCCUPIED:
                occ += 1
        self._wlo_set(lo, hi, occ)
        if occ == hi - lo + 1:
            self.watch_active = False
            return self.now
        self.watch_active = True
        try:
            hit = self._run(t_cap, 1)
        finally:
            self.watch_active = False
        if hit < 0.0:
            self.now = t_cap
        return hit

    cdef void _wlo_set(self, int lo, int hi, int occ) noexcept nogil:
        self.wlo = lo
        self.whi = hi
        self.wsize = hi - lo + 1
        self.occ_count = occ

    def reset_burn_bounds(self):
        self.burn_lo = self.n_sites
        self.burn_hi = -1

    def state_view(self):
        """The raw state bytes (internal indices)."""
        return PyBytes_FromStringAndSize(<char*>self.states, self.n_sites)
