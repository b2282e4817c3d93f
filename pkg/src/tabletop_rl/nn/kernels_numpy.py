"""Pure-numpy reference implementations of the hot kernels.

Shapes: obs (B, O), mask (B, A) with 0/1 in the same float dtype as obs,
weights stored (in, out). All functions work in the dtype of their inputs,
so the gradient-check oracle can run them in float64.
"""
from __future__ import annotations

import numpy as np

MASK_FILL = -1e9
PROB_FLOOR = 1e-12


def policy_forward(obs, mask, w0, b0, w1, b1, wp, bp, wv, bv):
    """Masked-softmax action probabilities and state values."""
    h1 = np.tanh(obs @ w0 + b0)
    h2 = np.tanh(h1 @ w1 + b1)
    logits = h2 @ wp + bp
    values = (h2 @ wv)[:, 0] + bv[0]
    logits = np.where(mask > 0.5, logits, logits.dtype.type(MASK_FILL))
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    probs = e / e.sum(axis=1, keepdims=True)
    probs = np.where(probs < PROB_FLOOR, 0.0, probs).astype(obs.dtype)
    probs /= probs.sum(axis=1, keepdims=True)
    return probs, values


def _hidden(obs, w0, b0, w1, b1):
    h1 = np.tanh(obs @ w0 + b0)
    h2 = np.tanh(h1 @ w1 + b1)
    return h1, h2


def ppo_loss(obs, mask, actions, old_logp, adv, returns,
             w0, b0, w1, b1, wp, bp, wv, bv,
             clip, ent_coef, vf_coef):
    """Scalar PPO loss: clipped surrogate - entropy bonus + value loss."""
    probs, values = policy_forward(obs, mask, w0, b0, w1, b1, wp, bp, wv, bv)
    b_idx = np.arange(obs.shape[0])
    logp = np.log(probs[b_idx, actions])
    ratio = np.exp(logp - old_logp)
    pg = np.maximum(-adv * ratio, -adv * np.clip(ratio, 1.0 - clip, 1.0 + clip))
    logp_all = np.where(probs > 0, np.log(np.where(probs > 0, probs, 1.0)), 0.0)
    entropy = -(probs * logp_all).sum(axis=1)
    v_loss = 0.5 * np.mean((values - returns) ** 2)
    return float(np.mean(pg) - ent_coef * np.mean(entropy) + vf_coef * v_loss)


def ppo_grads(obs, mask, actions, old_logp, adv, returns,
              w0, b0, w1, b1, wp, bp, wv, bv,
              clip, ent_coef, vf_coef):
    """Analytic gradients of :func:`ppo_loss` plus training statistics.

    Returns ((gw0, gb0, gw1, gb1, gwp, gbp, gwv, gbv), stats) where stats =
    [pg_loss, v_loss, entropy, clip_frac, approx_kl, total_loss].
    """
    B = obs.shape[0]
    h1, h2 = _hidden(obs, w0, b0, w1, b1)
    logits = h2 @ wp + bp
    values = (h2 @ wv)[:, 0] + bv[0]
    logits = np.where(mask > 0.5, logits, logits.dtype.type(MASK_FILL))
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    probs = e / e.sum(axis=1, keepdims=True)
    probs = np.where(probs < PROB_FLOOR, 0.0, probs).astype(obs.dtype)
    probs /= probs.sum(axis=1, keepdims=True)

    b_idx = np.arange(B)
    p_a = probs[b_idx, actions]
    logp = np.log(p_a)
    ratio = np.exp(logp - old_logp)
    ratio_cl = np.clip(ratio, 1.0 - clip, 1.0 + clip)
    unclipped = -adv * ratio
    clipped = -adv * ratio_cl
    pg_per = np.maximum(unclipped, clipped)

    logp_all = np.where(probs > 0, np.log(np.where(probs > 0, probs, 1.0)), 0.0)
    entropy = -(probs * logp_all).sum(axis=1)

    # d(mean pg)/d logp: only where the unclipped branch is the max
    active = unclipped >= clipped
    g_logp = np.where(active, -adv * ratio, 0.0) / B
    dlogits = g_logp[:, None] * (-probs)
    dlogits[b_idx, actions] += g_logp
    # entropy bonus: d(-c * mean H)/d logits
    dlogits += (ent_coef / B) * probs * (logp_all + entropy[:, None])
    dvalues = (vf_coef / B) * (values - returns)

    gwp = h2.T @ dlogits
    gbp = dlogits.sum(axis=0)
    gwv = (h2.T @ dvalues)[:, None]
    gbv = np.array([dvalues.sum()], dtype=obs.dtype)
    dh2 = dlogits @ wp.T + dvalues[:, None] * wv[:, 0]
    dz2 = dh2 * (1.0 - h2 * h2)
    gw1 = h1.T @ dz2
    gb1 = dz2.sum(axis=0)
    dh1 = dz2 @ w1.T
    dz1 = dh1 * (1.0 - h1 * h1)
    gw0 = obs.T @ dz1
    gb0 = dz1.sum(axis=0)

    v_loss = 0.5 * np.mean((values - returns) ** 2)
    total = float(np.mean(pg_per) - ent_coef * np.mean(entropy) + vf_coef * v_loss)
    stats = np.array([
        float(np.mean(pg_per)),
        float(v_loss),
        float(np.mean(entropy)),
        float(np.mean((np.abs(ratio - 1.0) > clip).astype(np.float64))),
        float(np.mean((ratio - 1.0) - np.log(ratio))),
        total,
    ], dtype=np.float64)
    grads = (gw0.astype(obs.dtype), gb0.astype(obs.dtype),
             gw1.astype(obs.dtype), gb1.astype(obs.dtype),
             gwp.astype(obs.dtype), gbp.astype(obs.dtype),
             gwv.astype(obs.dtype), gbv,
             )
    return grads, stats


def gae(rewards, values, dones, bootstrap, gamma, lam):
    """Generalized advantage estimation over one env segment."""
    T = rewards.shape[0]
    adv = np.zeros(T, dtype=np.float64)
    last = 0.0
    for t in range(T - 1, -1, -1):
        nonterminal = 1.0 - dones[t]
        next_value = bootstrap if t == T - 1 else values[t + 1]
        delta = rewards[t] + gamma * next_value * nonterminal - values[t]
        last = delta + gamma * lam * nonterminal * last
        adv[t] = last
    return adv.astype(rewards.dtype)
