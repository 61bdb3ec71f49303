# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled event loops for the scheduling disciplines.

Each loop mirrors the pure-Python engine plus policy object pair event for
event: the same event ordering at equal timestamps (real completion, then
policy bookkeeping, then arrival) and the same job tie keys, so the two
backends agree up to floating-point associativity.  Jobs are identified by
their index in the arrival-sorted input arrays.
"""

import numpy as np

cdef double INF = float("inf")
cdef double LAS_TOL = 1e-9


cdef void _fifo(double[::1] arr, double[::1] size, double[::1] out, Py_ssize_t n):
    cdef Py_ssize_t i
    cdef double t = 0.0
    for i in range(n):
        if arr[i] > t:
            t = arr[i]
        t += size[i]
        out[i] = t


cdef void _ps(double[::1] arr, double[::1] size, double[::1] out, Py_ssize_t n):
    cdef double[::1] rem = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t[::1] present = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t p = 0, ndone = 0, nxt = 0, i, k, jmin, kmin
    cdef double now = 0.0, tc, ta, t, share, best

    while ndone < n:
        tc = INF
        jmin = -1
        kmin = -1
        best = INF
        for k in range(p):
            i = present[k]
            if rem[i] < best or (rem[i] == best and i < jmin):
                best = rem[i]
                jmin = i
                kmin = k
        if p > 0:
            tc = now + best * p
        ta = arr[nxt] if nxt < n else INF
        if tc <= ta:
            t = tc if tc > now else now
            share = (t - now) / p
            for k in range(p):
                rem[present[k]] -= share
            now = t
            out[jmin] = now
            present[kmin] = present[p - 1]
            p -= 1
            ndone += 1
        else:
            t = ta if ta > now else now
            if p > 0:
                share = (t - now) / p
                for k in range(p):
                    rem[present[k]] -= share
            now = t
            present[p] = nxt
            rem[nxt] = size[nxt]
            p += 1
            nxt += 1


cdef void _las(double[::1] arr, double[::1] size, double[::1] out, Py_ssize_t n):
    cdef double[::1] rem = np.empty(n, dtype=np.float64)
    cdef double[::1] att = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t[::1] present = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t p = 0, ndone = 0, nxt = 0, i, k, jmin, kmin, b
    cdef double now = 0.0, tc, tx, ta, t, share, floor, minrem, nextlev

    while ndone < n:
        tc = INF
        tx = INF
        jmin = -1
        kmin = -1
        b = 0
        if p > 0:
            floor = INF
            for k in range(p):
                i = present[k]
                if att[i] < floor:
                    floor = att[i]
            minrem = INF
            nextlev = INF
            for k in range(p):
                i = present[k]
                if att[i] <= floor + LAS_TOL:
                    b += 1
                    if rem[i] < minrem or (rem[i] == minrem and i < jmin):
                        minrem = rem[i]
                        jmin = i
                        kmin = k
                elif att[i] < nextlev:
                    nextlev = att[i]
            tc = now + minrem * b
            if nextlev < INF:
                tx = now + (nextlev - floor) * b
        ta = arr[nxt] if nxt < n else INF

        if tc <= tx and tc <= ta:
            t = tc
        elif tx <= ta:
            t = tx
        else:
            t = ta
        if t < now:
            t = now
        if b > 0:
            share = (t - now) / b
            for k in range(p):
                i = present[k]
                if att[i] <= floor + LAS_TOL:
                    att[i] += share
                    rem[i] -= share
        now = t

        if tc <= tx and tc <= ta:
            out[jmin] = now
            present[kmin] = present[p - 1]
            p -= 1
            ndone += 1
        elif tx <= ta:
            pass  # bands merge; next pass recomputes them
        else:
            present[p] = nxt
            att[nxt] = 0.0
            rem[nxt] = size[nxt]
            p += 1
            nxt += 1


cdef void _srpt_like(double[::1] arr, double[::1] size, double[::1] est,
                     double[::1] out, Py_ssize_t n):
    # Serves the smallest estimated remaining work at full rate.  Exact SRPT
    # is this same loop fed the true sizes as estimates.
    cdef double[::1] rem = np.empty(n, dtype=np.float64)
    cdef double[::1] erem = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t[::1] present = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t p = 0, ndone = 0, nxt = 0, i, k, jserve, kserve
    cdef double now = 0.0, tc, ta, t, best

    while ndone < n:
        tc = INF
        jserve = -1
        kserve = -1
        best = INF
        for k in range(p):
            i = present[k]
            if erem[i] < best or (erem[i] == best and i < jserve):
                best = erem[i]
                jserve = i
                kserve = k
        if p > 0:
            tc = now + rem[jserve]
        ta = arr[nxt] if nxt < n else INF
        if tc <= ta:
            t = tc if tc > now else now
            rem[jserve] -= t - now
            erem[jserve] -= t - now
            now = t
            out[jserve] = now
            present[kserve] = present[p - 1]
            p -= 1
            ndone += 1
        else:
            t = ta if ta > now else now
            if p > 0:
                rem[jserve] -= t - now
                erem[jserve] -= t - now
            now = t
            present[p] = nxt
            rem[nxt] = size[nxt]
            erem[nxt] = est[nxt]
            p += 1
            nxt += 1


cdef void _fspe(double[::1] arr, double[::1] size, double[::1] est,
                double[::1] out, Py_ssize_t n, bint share_late):
    # Virtual PS run over the estimates decides the service order; jobs whose
    # virtual copy finished early ("late" jobs) pre-empt everything, either
    # one at a time in the order they went late or sharing the server evenly.
    cdef double[::1] w = np.empty(n, dtype=np.float64)
    cdef double[::1] rem = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t[::1] vlist = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] late = np.empty(n, dtype=np.intp)
    cdef unsigned char[::1] done = np.zeros(n, dtype=np.uint8)
    cdef Py_ssize_t vcount = 0, lcount = 0, lhead = 0
    cdef Py_ssize_t ndone = 0, nxt = 0, i, k
    cdef Py_ssize_t vhead, kvhead, cjob, served, nlate
    cdef double now = 0.0, tc, tv, ta, t, dt, sv, best, minlrem

    while ndone < n:
        while lhead < lcount and done[late[lhead]]:
            lhead += 1
        nlate = 0
        served = -1
        cjob = -1
        minlrem = INF
        for k in range(lhead, lcount):
            i = late[k]
            if done[i]:
                continue
            nlate += 1
            if served < 0:
                served = i  # earliest still-present late job
            if rem[i] < minlrem or (rem[i] == minlrem and i < cjob):
                minlrem = rem[i]
                cjob = i

        tv = INF
        vhead = -1
        kvhead = -1
        best = INF
        for k in range(vcount):
            i = vlist[k]
            if w[i] < best or (w[i] == best and i < vhead):
                best = w[i]
                vhead = i
                kvhead = k
        if vcount > 0:
            tv = now + best * vcount

        tc = INF
        if nlate > 0:
            if share_late:
                tc = now + minlrem * nlate
            else:
                cjob = served
                tc = now + rem[served]
        else:
            best = INF
            for k in range(vcount):
                i = vlist[k]
                if done[i]:
                    continue
                if w[i] < best or (w[i] == best and i < served):
                    best = w[i]
                    served = i
            if served >= 0:
                cjob = served
                tc = now + rem[served]
        ta = arr[nxt] if nxt < n else INF

        if tc <= tv and tc <= ta:
            t = tc
        elif tv <= ta:
            t = tv
        else:
            t = ta
        if t < now:
            t = now
        dt = t - now

        if vcount > 0:
            sv = dt / vcount
            for k in range(vcount):
                i = vlist[k]
                w[i] -= sv
                if w[i] < 0.0:
                    w[i] = 0.0
        if nlate > 0 and share_late:
            sv = dt / nlate
            for k in range(lhead, lcount):
                i = late[k]
                if not done[i]:
                    rem[i] -= sv
        elif served >= 0:
            rem[served] -= dt
        now = t

        if tc <= tv and tc <= ta:
            done[cjob] = 1
            out[cjob] = now
            ndone += 1
            # A still-virtually-present entry stays in the virtual run as an
            # inactive placeholder and keeps draining.
        elif tv <= ta:
            w[vhead] = 0.0
            vlist[kvhead] = vlist[vcount - 1]
            vcount -= 1
            if not done[vhead]:
                late[lcount] = vhead
                lcount += 1
        else:
            vlist[vcount] = nxt
            vcount += 1
            w[nxt] = est[nxt]
            rem[nxt] = size[nxt]
            nxt += 1


def simulate(arrivals, sizes, estimates, policy):
    """Completion times (indexed by job position) for one run.

    Inputs must be sorted by arrival time; ties must be in input order.
    """
    a = np.ascontiguousarray(arrivals, dtype=np.float64)
    s = np.ascontiguousarray(sizes, dtype=np.float64)
    e = np.ascontiguousarray(estimates, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0]
    out = np.zeros(n, dtype=np.float64)
    if n == 0:
        return out
    if s.shape[0] != n or e.shape[0] != n:
        raise ValueError("arrivals, sizes, and estimates must have equal length")
    if policy == "fifo":
        _fifo(a, s, out, n)
    elif policy == "ps":
        _ps(a, s, out, n)
    elif policy == "las":
        _las(a, s, out, n)
    elif policy in ("srpt", "srpte"):
        _srpt_like(a, s, e, out, n)
    elif policy == "fspe":
        _fspe(a, s, e, out, n, 0)
    elif policy == "fspe+ps":
        _fspe(a, s, e, out, n, 1)
    else:
        raise ValueError(f"unknown policy {policy!r}")
    return out
