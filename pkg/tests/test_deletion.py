import numpy as np
import pytest

from jetsketch import (
    CircuitBuilder,
    ComposedProgram,
    DeletionSet,
    MeasurementConfig,
    TrainerConfig,
    UsageError,
    build_measurement,
    build_trainer,
    initial_parameters,
    normalize_key,
    precompute,
    predict,
    retrain_oracle,
    select_parameters,
    sketch,
    sketch_eval,
)

KEY = normalize_key(90210)


def toy_setup(n=8, d=3, lr=0.05, epochs=2, seed=11):
    rng = np.random.default_rng(seed)
    cfg = TrainerConfig(
        model="linear_regression",
        features=rng.standard_normal((n, d)),
        targets=0.5 * rng.standard_normal(n),
        learning_rate=lr,
        epochs=epochs,
        init_seed=seed,
    )
    trainer = build_trainer(cfg)
    mcfg = MeasurementConfig(
        kind="loss_on_example",
        features=rng.standard_normal(d),
        target=0.2,
    )
    phi = build_measurement(mcfg, cfg.num_parameters)
    return cfg, trainer, phi


class TestDeletionSet:
    def test_sorts_and_dedups(self):
        d = DeletionSet.of([7, 3, 3, 1], 8)
        assert d.indices == (1, 3, 7)
        assert d.d == 3

    def test_range_checked(self):
        with pytest.raises(UsageError):
            DeletionSet.of([0], 8)
        with pytest.raises(UsageError):
            DeletionSet.of([9], 8)

    def test_indicator(self):
        w = DeletionSet.of([2, 4], 5).indicator(5)
        np.testing.assert_array_equal(w, [0, 1, 0, 1, 0])
        w = DeletionSet.of([2], 3).indicator(3, weight=0.25)
        np.testing.assert_array_equal(w, [0, 0.25, 0])


class TestSelectParameters:
    def test_worked_example(self):
        c = select_parameters(0.125, 0.01)
        assert (c.s, c.m, c.k) == (2, 48, 49152)

    def test_half_epsilon(self):
        assert select_parameters(0.5, 0.1).s == 1

    def test_monotone_in_delta(self):
        a = select_parameters(0.25, 0.1)
        b = select_parameters(0.25, 0.001)
        assert b.m >= a.m and b.k >= a.k

    def test_range_validation(self):
        for eps, delta in [(0.0, 0.1), (1.5, 0.1), (0.1, 0.0), (0.1, 1.0)]:
            with pytest.raises(UsageError):
                select_parameters(eps, delta)


class TestPrecompute:
    def test_constant_trainer(self):
        cfg, trainer, _ = toy_setup(lr=0.0)
        sk = precompute(trainer, 3, 40, seed=KEY)
        theta0 = initial_parameters(cfg.init_seed, cfg.num_parameters)
        np.testing.assert_array_equal(
            sk.taylor[:, 0, :], np.broadcast_to(theta0, (40, 3))
        )
        assert np.all(sk.taylor[:, 1:, :] == 0)

    def test_order_zero_equals_retrain_at_zero(self):
        cfg, trainer, _ = toy_setup()
        sk = precompute(trainer, 3, 500, seed=KEY)
        trained = retrain_oracle(trainer, np.zeros(cfg.num_examples))
        np.testing.assert_array_equal(sk.taylor[0, 0, :], trained)
        np.testing.assert_array_equal(
            sk.taylor[:, 0, :], np.broadcast_to(trained, (500, 3))
        )

    def test_worker_counts_bit_identical(self):
        _, trainer, _ = toy_setup()
        a = precompute(trainer, 3, 64, seed=KEY, workers=1)
        b = precompute(trainer, 3, 64, seed=KEY, workers=4)
        np.testing.assert_array_equal(a.taylor, b.taylor)


class TestPredict:
    def test_empty_deletion_exact(self):
        cfg, trainer, phi = toy_setup()
        sk = precompute(trainer, 3, 50, seed=KEY)
        nu = predict(sk, DeletionSet.of([], cfg.num_examples), phi, 8)
        theta = retrain_oracle(trainer, np.zeros(cfg.num_examples))
        from jetsketch import ComplexRing, evaluate

        truth = evaluate(phi, ComplexRing(), list(theta))[0]
        assert nu == complex(truth)

    def test_constant_measurement(self):
        cfg, trainer, _ = toy_setup()
        b = CircuitBuilder(cfg.num_parameters)
        b.output(b.const(9.25))
        sk = precompute(trainer, 2, 30, seed=KEY)
        nu = predict(sk, DeletionSet.of([1, 5], cfg.num_examples), b.build(), 5)
        assert nu == 9.25 + 0j

    def test_composition_identity_bit_exact(self):
        cfg, trainer, phi = toy_setup()
        composed = ComposedProgram(phi, trainer)
        s, k, m = 3, 64, 8
        sk_trainer = precompute(trainer, s, k, seed=KEY)
        sk_composed = sketch(
            np.zeros(cfg.num_examples, dtype=np.complex128), composed, s, k,
            seed=KEY,
        )
        for dels in [[2], [1, 4], [3, 5, 8], [1, 2, 3, 4], []]:
            dset = DeletionSet.of(dels, cfg.num_examples)
            via_predict = predict(sk_trainer, dset, phi, m)
            via_eval = sketch_eval(
                sk_composed, dset.indicator(cfg.num_examples), m
            )[0]
            assert via_predict == complex(via_eval)

    def test_measurement_agnostic_reuse(self):
        cfg, trainer, phi = toy_setup()
        sk = precompute(trainer, 3, 2000, seed=KEY)
        dset = DeletionSet.of([4], cfg.num_examples)
        w = dset.indicator(cfg.num_examples)
        theta = retrain_oracle(trainer, w)
        from jetsketch import ComplexRing, evaluate

        probes = [phi] + [
            build_measurement(
                MeasurementConfig(kind="parameter_probe", index=j + 1),
                cfg.num_parameters,
            )
            for j in range(cfg.num_parameters)
        ]
        for probe_fn in probes:
            nu = predict(sk, dset, probe_fn, 8)
            truth = complex(evaluate(probe_fn, ComplexRing(), list(theta))[0])
            assert abs(nu - truth) <= 0.05 * max(1.0, abs(truth))

    def test_fractional_downweight_tracks_retrain(self):
        cfg, trainer, phi = toy_setup()
        sk = precompute(trainer, 3, 4000, seed=KEY)
        dset = DeletionSet.of([2, 6], cfg.num_examples)
        from jetsketch import ComplexRing, evaluate

        for z in (0.25, 0.5, 0.75):
            nu = predict(sk, dset, phi, 8, downweight=z)
            theta = retrain_oracle(
                trainer, dset.indicator(cfg.num_examples, weight=z)
            )
            truth = complex(evaluate(phi, ComplexRing(), list(theta))[0])
            assert abs(nu.real - truth.real) <= 0.05 * max(1.0, abs(truth))
            assert abs(nu.imag) < 0.02

    def test_imaginary_part_shrinks_with_k(self):
        cfg, trainer, phi = toy_setup()
        dset = DeletionSet.of([3], cfg.num_examples)
        imags = []
        for k in (100, 6400):
            sk = precompute(trainer, 3, k, seed=KEY)
            imags.append(abs(predict(sk, dset, phi, 8).imag))
        assert imags[-1] < imags[0]

    def test_arity_checks(self):
        cfg, trainer, phi = toy_setup()
        sk = precompute(trainer, 2, 20, seed=KEY)
        b = CircuitBuilder(cfg.num_parameters + 1)
        b.output(b.input(1))
        with pytest.raises(UsageError):
            predict(sk, DeletionSet.of([1], cfg.num_examples), b.build(), 4)

    def test_deletion_list_coerced(self):
        cfg, trainer, phi = toy_setup()
        sk = precompute(trainer, 2, 20, seed=KEY)
        nu1 = predict(sk, [5, 2], phi, 4)
        nu2 = predict(sk, DeletionSet.of([2, 5], cfg.num_examples), phi, 4)
        assert nu1 == nu2
