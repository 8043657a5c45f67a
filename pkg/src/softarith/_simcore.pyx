# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled simulation backend: lane-parallel evaluation over uint64 words."""

import numpy as np
cimport numpy as cnp

cdef enum:
    OP_CONST0 = 0
    OP_CONST1 = 1
    OP_NOT = 2
    OP_AND = 3
    OP_OR = 4
    OP_XOR = 5
    OP_MUX = 6
    OP_FASUM = 7
    OP_FACARRY = 8
    OP_LUT = 9


def run(cnp.int32_t[::1] code,
        cnp.int32_t[::1] a0,
        cnp.int32_t[::1] a1,
        cnp.int32_t[::1] a2,
        cnp.int32_t[::1] out,
        cnp.int32_t[::1] aux,
        cnp.uint64_t[::1] lut_tt,
        cnp.int32_t[::1] lut_off,
        cnp.int32_t[::1] lut_k,
        cnp.int32_t[::1] lut_in,
        cnp.uint64_t[:, ::1] words):
    cdef Py_ssize_t n_ops = code.shape[0]
    cdef Py_ssize_t n_words = words.shape[1]
    cdef Py_ssize_t i, w, row, j
    cdef int op, o, x0, x1, x2, lid, k, off
    cdef cnp.uint64_t a, b, c, s, acc, term, tt
    cdef cnp.uint64_t ones = <cnp.uint64_t>0xFFFFFFFFFFFFFFFFULL

    for i in range(n_ops):
        op = code[i]
        o = out[i]
        x0 = a0[i]
        x1 = a1[i]
        x2 = a2[i]
        if op == OP_AND:
            for w in range(n_words):
                words[o, w] = words[x0, w] & words[x1, w]
        elif op == OP_XOR:
            for w in range(n_words):
                words[o, w] = words[x0, w] ^ words[x1, w]
        elif op == OP_OR:
            for w in range(n_words):
                words[o, w] = words[x0, w] | words[x1, w]
        elif op == OP_NOT:
            for w in range(n_words):
                words[o, w] = ~words[x0, w]
        elif op == OP_FASUM:
            for w in range(n_words):
                words[o, w] = words[x0, w] ^ words[x1, w] ^ words[x2, w]
        elif op == OP_FACARRY:
            for w in range(n_words):
                a = words[x0, w]
                b = words[x1, w]
                c = words[x2, w]
                words[o, w] = (a & b) | (c & (a ^ b))
        elif op == OP_MUX:
            for w in range(n_words):
                s = words[x0, w]
                words[o, w] = (words[x2, w] & s) | (words[x1, w] & ~s)
        elif op == OP_CONST0:
            for w in range(n_words):
                words[o, w] = 0
        elif op == OP_CONST1:
            for w in range(n_words):
                words[o, w] = ones
        elif op == OP_LUT:
            lid = aux[i]
            tt = lut_tt[lid]
            k = lut_k[lid]
            off = lut_off[lid]
            for w in range(n_words):
                acc = 0
                for row in range(1 << k):
                    if not (tt >> row) & <cnp.uint64_t>1:
                        continue
                    term = ones
                    for j in range(k):
                        if (row >> j) & 1:
                            term &= words[lut_in[off + j], w]
                        else:
                            term &= ~words[lut_in[off + j], w]
                    acc |= term
                words[o, w] = acc
        else:
            raise ValueError(f"bad opcode {op}")
