"""Learning-rate schedules and the smoothed divergence loss."""

import math

import pytest
import torch

from musahih import (
    PAD,
    Exponential,
    WarmupInverseSqrt,
    schedule_from_dict,
    smoothed_kl_loss,
)


class TestExponential:
    def test_initial_rate_exact(self):
        assert Exponential().lr_at(0) == 1e-4

    def test_literal_decay_factor(self):
        schedule = Exponential()
        assert schedule.lr_at(1) == pytest.approx(1e-4 * (1 - 15e-4 / 100),
                                                  rel=1e-12)

    def test_strictly_decreasing(self):
        schedule = Exponential()
        rates = [schedule.lr_at(step) for step in range(0, 5000, 250)]
        assert all(a > b for a, b in zip(rates, rates[1:]))

    def test_negative_step_rejected(self):
        with pytest.raises(ValueError):
            Exponential().lr_at(-1)

    def test_update_one_runs_at_initial_rate(self):
        assert Exponential().lr_for_update(1) == 1e-4


class TestWarmupInverseSqrt:
    def test_peak_exactly_at_warmup(self):
        schedule = WarmupInverseSqrt(warmup_steps=4000, model_dim=512)
        rates = {step: schedule.lr_at(step) for step in range(1, 20001)}
        assert max(rates, key=rates.get) == 4000
        assert rates[3999] < rates[4000] > rates[4001]

    def test_linear_ramp(self):
        schedule = WarmupInverseSqrt(warmup_steps=4000, model_dim=512)
        assert schedule.lr_at(2000) == pytest.approx(
            0.5 * schedule.lr_at(4000), rel=1e-12
        )

    def test_dimension_scaling(self):
        small = WarmupInverseSqrt(warmup_steps=100, model_dim=64)
        large = WarmupInverseSqrt(warmup_steps=100, model_dim=256)
        assert small.lr_at(50) == pytest.approx(2 * large.lr_at(50), rel=1e-12)

    def test_step_zero_rejected(self):
        with pytest.raises(ValueError):
            WarmupInverseSqrt().lr_at(0)


def test_schedule_dict_roundtrip():
    for schedule in (Exponential(2e-4, 1e-3),
                     WarmupInverseSqrt(800, 128)):
        assert schedule_from_dict(schedule.to_dict()) == schedule


class TestSmoothedKlLoss:
    def test_uniform_prediction_unsmoothed_is_log_vocab(self):
        size = 40
        log_probs = torch.full((3, 7, size), -math.log(size),
                               dtype=torch.float64)
        targets = torch.randint(3, size, (3, 7))
        loss = smoothed_kl_loss(log_probs, targets, epsilon=0.0)
        assert abs(loss.item() - math.log(size)) < 1e-6

    def test_prediction_equal_to_target_scores_zero(self):
        size = 11
        epsilon = 0.1
        targets = torch.tensor([[4, 7, 9]])
        dist = torch.full((1, 3, size), epsilon / (size - 1),
                          dtype=torch.float64)
        for j, gold in enumerate(targets[0]):
            dist[0, j, gold] = 1 - epsilon
        loss = smoothed_kl_loss(dist.log(), targets, epsilon=epsilon)
        assert abs(loss.item()) < 1e-12

    def test_non_negative(self):
        torch.manual_seed(0)
        for _ in range(20):
            log_probs = torch.log_softmax(torch.randn(2, 5, 9), dim=-1)
            targets = torch.randint(3, 9, (2, 5))
            assert smoothed_kl_loss(log_probs, targets).item() >= 0

    def test_pad_positions_masked(self):
        torch.manual_seed(1)
        logits = torch.randn(1, 4, 9)
        log_probs = torch.log_softmax(logits, dim=-1)
        targets = torch.tensor([[5, 6, PAD, PAD]])
        trimmed = smoothed_kl_loss(log_probs[:, :2], targets[:, :2])
        padded = smoothed_kl_loss(log_probs, targets)
        assert padded.item() == pytest.approx(trimmed.item(), rel=1e-6)

    def test_all_pad_rejected(self):
        log_probs = torch.log_softmax(torch.randn(1, 2, 9), dim=-1)
        with pytest.raises(ValueError):
            smoothed_kl_loss(log_probs, torch.tensor([[PAD, PAD]]))

    def test_unnormalized_prediction_rejected(self):
        bad = torch.zeros(1, 2, 9)    # logsumexp = ln 9, not 0
        with pytest.raises(ValueError):
            smoothed_kl_loss(bad, torch.tensor([[3, 4]]))

    def test_epsilon_range_validated(self):
        log_probs = torch.log_softmax(torch.randn(1, 2, 9), dim=-1)
        targets = torch.tensor([[3, 4]])
        with pytest.raises(ValueError):
            smoothed_kl_loss(log_probs, targets, epsilon=1.0)
        with pytest.raises(ValueError):
            smoothed_kl_loss(log_probs, targets, epsilon=-0.1)
