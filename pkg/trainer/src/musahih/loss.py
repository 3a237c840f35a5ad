"""Label-smoothed divergence loss.

The target distribution puts 1 - epsilon on the gold symbol and spreads
epsilon evenly over the remaining |V| - 1 symbols. The loss is the KL
divergence from that target to the predicted log-distribution, averaged
over non-PAD target positions. With epsilon = 0 the target is one-hot
and a uniform prediction scores exactly ln|V|.
"""

import torch

from .vocab import PAD


def smoothed_kl_loss(
    log_probs: torch.Tensor,
    targets: torch.Tensor,
    epsilon: float = 0.1,
    pad_id: int = PAD,
    check_normalized: bool = True,
) -> torch.Tensor:
    """KL(smoothed one-hot || prediction), mean over non-PAD positions.

    log_probs: (..., V) log-distributions. targets: (...) gold ids.
    """
    if not 0.0 <= epsilon < 1.0:
        raise ValueError("epsilon must be in [0, 1)")
    vocab_size = log_probs.size(-1)
    if check_normalized:
        total = torch.logsumexp(log_probs.detach(), dim=-1)
        if not torch.allclose(
            total, torch.zeros_like(total), atol=1e-4
        ):
            raise ValueError("predictions are not normalized log-distributions")
    flat_logp = log_probs.reshape(-1, vocab_size)
    flat_targets = targets.reshape(-1)
    keep = flat_targets != pad_id
    if not keep.any():
        raise ValueError("no non-PAD target positions")
    flat_logp = flat_logp[keep]
    flat_targets = flat_targets[keep]

    off = epsilon / (vocab_size - 1)
    target_dist = torch.full_like(flat_logp, off)
    target_dist.scatter_(
        1, flat_targets.unsqueeze(1), 1.0 - epsilon
    )
    # sum t * (ln t - logp), with the t = 0 cells contributing nothing
    safe_log_t = torch.where(
        target_dist > 0, target_dist.log(), torch.zeros_like(target_dist)
    )
    divergence = (target_dist * (safe_log_t - flat_logp)).sum(dim=1)
    return divergence.mean()
