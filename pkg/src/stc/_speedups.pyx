# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the kernels in ``_purepy``."""

from cpython.unicode cimport Py_UNICODE_ISALNUM, Py_UNICODE_ISSPACE


def word_punct_count(str text):
    cdef Py_ssize_t count = 0
    cdef bint in_run = False
    cdef Py_UCS4 ch
    for ch in text:
        if Py_UNICODE_ISALNUM(ch):
            if not in_run:
                count += 1
                in_run = True
        elif Py_UNICODE_ISSPACE(ch):
            in_run = False
        else:
            count += 1
            in_run = False
    return count


def greedy_pack(weights, long long joiner_weight, long long divisor, long long budget):
    cdef list starts = []
    cdef long long acc = -1
    cdef long long limit = budget * divisor
    cdef long long w, cand
    cdef Py_ssize_t i = 0
    for obj in weights:
        w = obj
        if acc < 0:
            starts.append(i)
            acc = w
        else:
            cand = acc + joiner_weight + w
            if cand > limit:
                starts.append(i)
                acc = w
            else:
                acc = cand
        i += 1
    return starts


def token_starts(str text):
    cdef list out = []
    cdef bint in_run = False
    cdef Py_UCS4 ch
    cdef Py_ssize_t i = 0
    for ch in text:
        if Py_UNICODE_ISALNUM(ch):
            if not in_run:
                out.append(i)
                in_run = True
        elif Py_UNICODE_ISSPACE(ch):
            in_run = False
        else:
            out.append(i)
            in_run = False
        i += 1
    return out
