"""Numba kernels for the single-site heat-bath chain.

The conditional for relabeling node v to class c only involves blocks in
row/column c (all other blocks are identical across candidates and cancel
in the softmax), so one update costs O(deg(v) + k^2) table lookups.

Block score terms are table-driven: f(e, N) = t_e[e] + t_ne[N-e] - t_n[N].
With t_e[x] = lgamma(x+a), t_ne[x] = lgamma(x+b), t_n[x] = lgamma(x+a+b)
this is the beta-integrated block term (up to a constant that cancels);
with all three tables x*ln(x) it is the maximum-likelihood block term.

RNG is splitmix64, one independent stream per chain, so results are
bit-reproducible for a given (seed, chain id) regardless of scheduling.
"""

import numpy as np
from numba import njit, uint64

_INV_2_53 = 1.0 / (1 << 53)


@njit(cache=True, inline="always")
def _next_u64(state):
    state[0] += uint64(0x9E3779B97F4A7C15)
    z = state[0]
    z = (z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)
    return z ^ (z >> uint64(31))


@njit(cache=True, inline="always")
def _uniform(state):
    return (_next_u64(state) >> uint64(11)) * _INV_2_53


@njit(cache=True, inline="always")
def _heat_bath_step(out_indptr, out_indices, in_indptr, in_indices,
                    directed, self_loops, t_e, t_ne, t_n,
                    labels, nvec, emat, v, u_draw,
                    cnt_out, cnt_in, logw, probs):
    """Resample labels[v] from its exact conditional; fills `probs`."""
    k = nvec.shape[0]
    for j in range(k):
        cnt_out[j] = 0
        cnt_in[j] = 0
    sl = 0
    for idx in range(out_indptr[v], out_indptr[v + 1]):
        u = out_indices[idx]
        if u == v:
            sl = 1
        else:
            cnt_out[labels[u]] += 1
    if directed:
        for idx in range(in_indptr[v], in_indptr[v + 1]):
            u = in_indices[idx]
            if u != v:
                cnt_in[labels[u]] += 1

    a = labels[v]
    nvec[a] -= 1
    if directed:
        for j in range(k):
            emat[a, j] -= cnt_out[j]
            emat[j, a] -= cnt_in[j]
        emat[a, a] -= sl
    else:
        for j in range(k):
            if j >= a:
                emat[a, j] -= cnt_out[j]
            else:
                emat[j, a] -= cnt_out[j]
        emat[a, a] -= sl

    # logw[c] = sum over blocks in row/column c of
    #   f(counts with v inserted into c) - f(counts with v removed);
    # blocks outside row/column c are identical across candidates and
    # cancel, but the removed-state baseline must be subtracted because
    # the affected block set differs per candidate.
    for c in range(k):
        nr = nvec[c]
        nc = nr + 1
        s = 0.0
        if directed:
            for j in range(k):
                if j == c:
                    continue
                nj = nvec[j]
                N = nc * nj
                Nr = nr * nj
                e = emat[c, j] + cnt_out[j]
                s += t_e[e] + t_ne[N - e] - t_n[N]
                er = emat[c, j]
                s -= t_e[er] + t_ne[Nr - er] - t_n[Nr]
                e = emat[j, c] + cnt_in[j]
                s += t_e[e] + t_ne[N - e] - t_n[N]
                er = emat[j, c]
                s -= t_e[er] + t_ne[Nr - er] - t_n[Nr]
            N = nc * nc if self_loops else nc * (nc - 1)
            Nr = nr * nr if self_loops else nr * (nr - 1)
            e = emat[c, c] + cnt_out[c] + cnt_in[c] + sl
            s += t_e[e] + t_ne[N - e] - t_n[N]
            er = emat[c, c]
            s -= t_e[er] + t_ne[Nr - er] - t_n[Nr]
        else:
            for j in range(k):
                if j == c:
                    continue
                N = nc * nvec[j]
                Nr = nr * nvec[j]
                er = emat[c, j] if j >= c else emat[j, c]
                e = er + cnt_out[j]
                s += t_e[e] + t_ne[N - e] - t_n[N]
                s -= t_e[er] + t_ne[Nr - er] - t_n[Nr]
            N = nc * (nc + 1) // 2 if self_loops else nc * (nc - 1) // 2
            Nr = nr * (nr + 1) // 2 if self_loops else nr * (nr - 1) // 2
            e = emat[c, c] + cnt_out[c] + sl
            s += t_e[e] + t_ne[N - e] - t_n[N]
            er = emat[c, c]
            s -= t_e[er] + t_ne[Nr - er] - t_n[Nr]
        logw[c] = s

    m = logw[0]
    for c in range(1, k):
        if logw[c] > m:
            m = logw[c]
    z = 0.0
    for c in range(k):
        probs[c] = np.exp(logw[c] - m)
        z += probs[c]
    for c in range(k):
        probs[c] /= z
    acc = 0.0
    b = k - 1
    for c in range(k):
        acc += probs[c]
        if u_draw < acc:
            b = c
            break

    nvec[b] += 1
    if directed:
        for j in range(k):
            emat[b, j] += cnt_out[j]
            emat[j, b] += cnt_in[j]
        emat[b, b] += sl
    else:
        for j in range(k):
            if j >= b:
                emat[b, j] += cnt_out[j]
            else:
                emat[j, b] += cnt_out[j]
        emat[b, b] += sl
    labels[v] = b
    return b


@njit(cache=True, nogil=True)
def run_chain(out_indptr, out_indices, in_indptr, in_indices,
              directed, self_loops, t_e, t_ne, t_n,
              labels, nvec, emat, free_nodes,
              steps, burn_in, rng_state,
              cond_sum, ent_sum, visits,
              record_steps, records):
    """One chain: `steps` single-site updates, accumulating post-burn-in
    conditionals; snapshots labels at each index in `record_steps`."""
    k = nvec.shape[0]
    cnt_out = np.zeros(k, np.int64)
    cnt_in = np.zeros(k, np.int64)
    logw = np.zeros(k, np.float64)
    probs = np.zeros(k, np.float64)
    nf = free_nodes.shape[0]
    rec_pos = 0
    for step in range(steps):
        v = free_nodes[int(_uniform(rng_state) * nf)]
        u2 = _uniform(rng_state)
        _heat_bath_step(out_indptr, out_indices, in_indptr, in_indices,
                        directed, self_loops, t_e, t_ne, t_n,
                        labels, nvec, emat, v, u2,
                        cnt_out, cnt_in, logw, probs)
        if step >= burn_in:
            ent = 0.0
            for c in range(k):
                p = probs[c]
                cond_sum[v, c] += p
                if p > 0.0:
                    ent += p * np.log(p)
            ent_sum[v] += ent
            visits[v] += 1
        if rec_pos < record_steps.shape[0] and record_steps[rec_pos] == step:
            records[rec_pos, :] = labels
            rec_pos += 1


@njit(cache=True, nogil=True)
def run_pair(out_indptr, out_indices, in_indptr, in_indices,
             directed, self_loops, t_e, t_ne, t_n,
             labels1, nvec1, emat1, labels2, nvec2, emat2,
             free_nodes, steps, burn_in, rng_state1, rng_state2,
             cond_sum, ent_sum, visits,
             agree_cnt, agree_sum):
    """Two independent chains stepped in lockstep; each post-burn-in step
    contributes one sample pair to the agreement statistics. Returns the
    number of pairs drawn."""
    n = labels1.shape[0]
    k = nvec1.shape[0]
    cnt_out = np.zeros(k, np.int64)
    cnt_in = np.zeros(k, np.int64)
    logw = np.zeros(k, np.float64)
    probs = np.zeros(k, np.float64)
    nf = free_nodes.shape[0]
    pairs = 0
    for step in range(steps):
        v1 = free_nodes[int(_uniform(rng_state1) * nf)]
        u = _uniform(rng_state1)
        _heat_bath_step(out_indptr, out_indices, in_indptr, in_indices,
                        directed, self_loops, t_e, t_ne, t_n,
                        labels1, nvec1, emat1, v1, u,
                        cnt_out, cnt_in, logw, probs)
        if step >= burn_in:
            ent = 0.0
            for c in range(k):
                p = probs[c]
                cond_sum[v1, c] += p
                if p > 0.0:
                    ent += p * np.log(p)
            ent_sum[v1] += ent
            visits[v1] += 1

        v2 = free_nodes[int(_uniform(rng_state2) * nf)]
        u = _uniform(rng_state2)
        _heat_bath_step(out_indptr, out_indices, in_indptr, in_indices,
                        directed, self_loops, t_e, t_ne, t_n,
                        labels2, nvec2, emat2, v2, u,
                        cnt_out, cnt_in, logw, probs)
        if step >= burn_in:
            ent = 0.0
            for c in range(k):
                p = probs[c]
                cond_sum[v2, c] += p
                if p > 0.0:
                    ent += p * np.log(p)
            ent_sum[v2] += ent
            visits[v2] += 1

            total = 0
            for w in range(n):
                if labels1[w] == labels2[w]:
                    total += 1
            for w in range(n):
                if labels1[w] == labels2[w]:
                    agree_cnt[w] += 1
                    agree_sum[w] += total
            pairs += 1
    return pairs


@njit(cache=True, nogil=True)
def pooled_pair_stats(recs, agree_cnt, agree_sum):
    """Agreement statistics over all cross-chain pairs at matched snapshot
    indices. recs is (chains, snapshots, n); returns pairs drawn."""
    C, S, n = recs.shape
    pairs = 0
    for a in range(C):
        for b in range(a + 1, C):
            for s in range(S):
                total = 0
                for w in range(n):
                    if recs[a, s, w] == recs[b, s, w]:
                        total += 1
                for w in range(n):
                    if recs[a, s, w] == recs[b, s, w]:
                        agree_cnt[w] += 1
                        agree_sum[w] += total
                pairs += 1
    return pairs
