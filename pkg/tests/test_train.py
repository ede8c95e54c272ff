import numpy as np
import pytest

import framepoint.training as train_mod
from framepoint import (ConfigError, GenConfig, ScorerConfig,
                        TrainConfig, TrainingDivergedError, generate,
                        save_model, train)


def small_dataset(seed=0, num=20, events=1):
    return generate(GenConfig(num_examples=num, duration_frames=40,
                              feature_dim=6, num_event_types=3,
                              events_per_example=events, noise_sigma=0.05,
                              seed=seed))


class TestTrainConfig:
    def test_validation(self):
        with pytest.raises(ConfigError):
            TrainConfig(epochs=0)
        with pytest.raises(ConfigError):
            TrainConfig(epochs=1, batch_size=0)
        with pytest.raises(ConfigError):
            TrainConfig(epochs=1, loss_kind="token")
        with pytest.raises(ConfigError):
            TrainConfig(epochs=1, learning_rate=-1.0)


class TestTraining:
    def test_zero_learning_rate_keeps_weights(self):
        dataset = small_dataset()
        config = TrainConfig(epochs=1, learning_rate=0.0, loss_kind="poisson",
                             seed=5)
        scorer_config = ScorerConfig(feature_dim=6)
        from framepoint.scorer import init_weights
        initial = init_weights(scorer_config, config.seed)
        result = train(config, scorer_config, dataset)
        for key, value in initial.items():
            np.testing.assert_array_equal(result.model.weights[key], value)

    def test_full_batch_descent_decreases_loss(self):
        dataset = small_dataset(num=10)
        train_split = dataset.subset("train")
        config = TrainConfig(epochs=30, learning_rate=5e-3,
                             batch_size=len(train_split), loss_kind="poisson",
                             seed=1, weight_decay=0.0)
        result = train(config, ScorerConfig(feature_dim=6), dataset)
        losses = [m.train_loss for m in result.history]
        assert all(b <= a + 1e-9 for a, b in zip(losses, losses[1:]))
        assert losses[-1] < losses[0]

    @pytest.mark.parametrize("loss_kind", ["binary", "poisson", "interp"])
    def test_deterministic_checkpoints(self, loss_kind, tmp_path):
        dataset = small_dataset(num=16)
        config = TrainConfig(epochs=3, learning_rate=1e-2,
                             loss_kind=loss_kind, seed=7)
        scorer_config = ScorerConfig(
            feature_dim=6,
            head_kind="binary" if loss_kind == "binary" else "poisson")
        a = train(config, scorer_config, dataset)
        b = train(config, scorer_config, dataset)
        pa, pb = tmp_path / "a.json", tmp_path / "b.json"
        save_model(a.model, pa)
        save_model(b.model, pb)
        assert pa.read_bytes() == pb.read_bytes()

    def test_selected_epoch_is_first_best(self):
        dataset = small_dataset(num=24)
        config = TrainConfig(epochs=5, learning_rate=1e-2, loss_kind="poisson",
                             seed=3)
        result = train(config, ScorerConfig(feature_dim=6), dataset)
        accuracies = [m.dev_accuracy for m in result.history]
        assert result.selected_epoch == int(np.argmax(accuracies))

    def test_nan_loss_aborts_with_diagnostic(self, monkeypatch):
        dataset = small_dataset(num=8)

        class FakeResult:
            value = float("nan")
            gradient = np.zeros(40)

        monkeypatch.setattr(train_mod, "example_loss",
                            lambda *args, **kwargs: FakeResult())
        config = TrainConfig(epochs=1, learning_rate=1e-3, seed=0)
        with pytest.raises(TrainingDivergedError) as err:
            train(config, ScorerConfig(feature_dim=6), dataset)
        assert "epoch 0" in str(err.value)

    def test_feature_dim_mismatch_rejected(self):
        dataset = small_dataset()
        with pytest.raises(ConfigError):
            train(TrainConfig(epochs=1), ScorerConfig(feature_dim=9), dataset)

    def test_interp_uses_coefficient(self):
        # coefficient 0 must reduce interp to the pure binary objective
        dataset = small_dataset(num=12)
        scorer_config = ScorerConfig(feature_dim=6, head_kind="binary")
        base = TrainConfig(epochs=2, learning_rate=1e-2, loss_kind="binary",
                           seed=2)
        zero = TrainConfig(epochs=2, learning_rate=1e-2, loss_kind="interp",
                           interp_coefficient=0.0, seed=2)
        a = train(base, scorer_config, dataset)
        b = train(zero, scorer_config, dataset)
        for key in a.model.weights:
            np.testing.assert_array_equal(a.model.weights[key],
                                          b.model.weights[key])
        nonzero = TrainConfig(epochs=2, learning_rate=1e-2, loss_kind="interp",
                              interp_coefficient=0.5, seed=2)
        c = train(nonzero, scorer_config, dataset)
        assert any(not np.array_equal(a.model.weights[k], c.model.weights[k])
                   for k in a.model.weights)

    def test_quick_poisson_learns_separable_task(self):
        dataset = generate(GenConfig(num_examples=60, duration_frames=60,
                                     feature_dim=8, num_event_types=2,
                                     events_per_example=1, noise_sigma=0.05,
                                     signal_amplitude=1.0, seed=13))
        config = TrainConfig(epochs=10, learning_rate=5e-2,
                             loss_kind="poisson", seed=0)
        result = train(config, ScorerConfig(feature_dim=8), dataset)
        assert max(m.dev_accuracy for m in result.history) >= 0.8
