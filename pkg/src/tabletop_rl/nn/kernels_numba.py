"""Numba-compiled hot kernels: same contracts as kernels_numpy.

Matrix products run through BLAS inside nopython code; the masked
softmax, per-sample PPO terms and the GAE scan are explicit loops where
compilation actually wins. Compiled lazily per dtype signature;
cache=True persists compilation across processes.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

MASK_FILL = -1e9
PROB_FLOOR = 1e-12


@njit(cache=True)
def _forward_core(obs, mask, w0, b0, w1, b1, wp, bp, wv, bv):
    h1 = np.tanh(obs @ w0 + b0)
    h2 = np.tanh(h1 @ w1 + b1)
    logits = h2 @ wp + bp
    values = (h2 @ wv)[:, 0] + bv[0]
    B, A = logits.shape
    for i in range(B):
        hi = -1e30
        for j in range(A):
            if mask[i, j] <= 0.5:
                logits[i, j] = MASK_FILL
            if logits[i, j] > hi:
                hi = logits[i, j]
        for j in range(A):
            logits[i, j] -= hi
    probs = np.exp(logits)
    for i in range(B):
        tot = 0.0
        for j in range(A):
            tot += probs[i, j]
        tot2 = 0.0
        for j in range(A):
            p = probs[i, j] / tot
            if p < PROB_FLOOR:
                p = 0.0
            probs[i, j] = p
            tot2 += p
        for j in range(A):
            probs[i, j] = probs[i, j] / tot2
    return h1, h2, probs, values


def policy_forward(obs, mask, w0, b0, w1, b1, wp, bp, wv, bv):
    _, _, probs, values = _forward_core(obs, mask, w0, b0, w1, b1, wp, bp, wv, bv)
    return probs, values


@njit(cache=True)
def _grads_core(obs, mask, actions, old_logp, adv, returns,
                w0, b0, w1, b1, wp, bp, wv, bv,
                clip, ent_coef, vf_coef):
    B = obs.shape[0]
    h1, h2, probs, values = _forward_core(
        obs, mask, w0, b0, w1, b1, wp, bp, wv, bv
    )
    dlogits = np.zeros_like(probs)
    dvalues = np.zeros_like(values)
    pg_sum = 0.0
    v_sum = 0.0
    ent_sum = 0.0
    clip_sum = 0.0
    kl_sum = 0.0
    A = probs.shape[1]
    for i in range(B):
        a = actions[i]
        logp = math.log(probs[i, a])
        ratio = math.exp(logp - old_logp[i])
        r_cl = ratio
        if r_cl < 1.0 - clip:
            r_cl = 1.0 - clip
        elif r_cl > 1.0 + clip:
            r_cl = 1.0 + clip
        unclipped = -adv[i] * ratio
        clipped = -adv[i] * r_cl
        pg_sum += max(unclipped, clipped)
        if abs(ratio - 1.0) > clip:
            clip_sum += 1.0
        kl_sum += (ratio - 1.0) - (logp - old_logp[i])
        ent = 0.0
        for j in range(A):
            p = probs[i, j]
            if p > 0.0:
                ent -= p * math.log(p)
        ent_sum += ent
        g_logp = 0.0
        if unclipped >= clipped:
            g_logp = -adv[i] * ratio / B
        for j in range(A):
            p = probs[i, j]
            d = -g_logp * p
            if p > 0.0:
                d += (ent_coef / B) * p * (math.log(p) + ent)
            dlogits[i, j] = d
        dlogits[i, a] += g_logp
        diff = values[i] - returns[i]
        v_sum += 0.5 * diff * diff
        dvalues[i] = vf_coef * diff / B

    h2t = np.ascontiguousarray(h2.T)
    gwp = h2t @ dlogits
    gbp = np.sum(dlogits, axis=0)
    gwv = (h2t @ dvalues.reshape(B, 1))
    gbv_val = np.sum(dvalues)
    wpt = np.ascontiguousarray(wp.T)
    dh2 = dlogits @ wpt + dvalues.reshape(B, 1) * wv[:, 0]
    # dz = dh * (1 - h^2), written literal-free to stay in the input dtype
    dz2 = dh2 - dh2 * (h2 * h2)
    gw1 = np.ascontiguousarray(h1.T) @ dz2
    gb1 = np.sum(dz2, axis=0)
    dh1 = dz2 @ np.ascontiguousarray(w1.T)
    dz1 = dh1 - dh1 * (h1 * h1)
    gw0 = np.ascontiguousarray(obs.T) @ dz1
    gb0 = np.sum(dz1, axis=0)

    stats = np.empty(6, dtype=np.float64)
    stats[0] = pg_sum / B
    stats[1] = v_sum / B
    stats[2] = ent_sum / B
    stats[3] = clip_sum / B
    stats[4] = kl_sum / B
    stats[5] = stats[0] - ent_coef * stats[2] + vf_coef * stats[1]
    return gw0, gb0, gw1, gb1, gwp, gbp, gwv, gbv_val, stats


def ppo_grads(obs, mask, actions, old_logp, adv, returns,
              w0, b0, w1, b1, wp, bp, wv, bv,
              clip, ent_coef, vf_coef):
    out = _grads_core(obs, mask, actions, old_logp, adv, returns,
                      w0, b0, w1, b1, wp, bp, wv, bv,
                      float(clip), float(ent_coef), float(vf_coef))
    gw0, gb0, gw1, gb1, gwp, gbp, gwv, gbv_val, stats = out
    gbv = np.array([gbv_val], dtype=obs.dtype)
    return (gw0, gb0, gw1, gb1, gwp, gbp, gwv, gbv), stats


def ppo_loss(obs, mask, actions, old_logp, adv, returns,
             w0, b0, w1, b1, wp, bp, wv, bv,
             clip, ent_coef, vf_coef):
    _, stats = ppo_grads(obs, mask, actions, old_logp, adv, returns,
                         w0, b0, w1, b1, wp, bp, wv, bv,
                         clip, ent_coef, vf_coef)
    return float(stats[5])


@njit(cache=True)
def _gae_core(rewards, values, dones, bootstrap, gamma, lam, adv):
    T = rewards.shape[0]
    last = 0.0
    for t in range(T - 1, -1, -1):
        nonterminal = 1.0 - dones[t]
        next_value = bootstrap if t == T - 1 else values[t + 1]
        delta = rewards[t] + gamma * next_value * nonterminal - values[t]
        last = delta + gamma * lam * nonterminal * last
        adv[t] = last
    return adv


def gae(rewards, values, dones, bootstrap, gamma, lam):
    adv = np.empty_like(rewards)
    _gae_core(rewards, values, dones, float(bootstrap), float(gamma), float(lam), adv)
    return adv
