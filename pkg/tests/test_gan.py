import inspect

import numpy as np
import pytest

from bandgan import gan, nn
from bandgan.errors import DimensionError
from bandgan.gradcheck import oracle_suite
from bandgan.signal import RawSignal
from bandgan.spectrum import NotchMask, apply_mask, gen_notch_mask
from oracles import complex_fd_grad, direct_dft, masked_l1_direct, random_complex


def _pair(rng, n, seed=0):
    x = RawSignal(random_complex(rng, n))
    m = gen_notch_mask(n, 1, 0.5, seed) if n >= 2 else NotchMask(np.ones(n))
    return gan.TrainingPair(x, apply_mask(x, m), m)


def test_pack_unpack_round_trip(rng):
    z = random_complex(rng, 6)
    v = gan.pack(z)
    np.testing.assert_array_equal(v, np.concatenate([z.real, z.imag]))
    np.testing.assert_array_equal(gan.unpack(v), z)


# -- content loss -------------------------------------------------------------

def test_content_loss_zero_at_target(rng):
    x = random_complex(rng, 8)
    loss, grad = gan.content_loss(x, x, NotchMask(np.ones(8)))
    assert loss == 0.0
    np.testing.assert_array_equal(grad, 0)


def test_content_loss_all_zero_mask(rng):
    loss, _ = gan.content_loss(random_complex(rng, 8), random_complex(rng, 8), NotchMask(np.zeros(8)))
    assert loss == 0.0


def test_content_loss_hand_example():
    # x has spectrum (1, 0), gen_out has spectrum (0, 0): |0 - 1| + |0 - 0| = 1
    x = direct_dft([1, 0], inverse=True)
    loss, _ = gan.content_loss(np.zeros(2), x, NotchMask([1, 1]))
    assert loss == pytest.approx(1.0, abs=1e-12)


def test_content_loss_uses_complex_modulus():
    # a single bin difference of 3 + 4j costs 5, not 7
    spec = np.array([3 + 4j, 0, 0, 0])
    x = direct_dft(spec, inverse=True)
    loss, _ = gan.content_loss(np.zeros(4), x, NotchMask([1, 1, 1, 1]))
    assert loss == pytest.approx(5.0, abs=1e-12)


def test_content_loss_matches_direct_oracle(rng):
    g, x = random_complex(rng, 8), random_complex(rng, 8)
    bits = [1, 0, 1, 1, 0, 0, 1, 1]
    loss, _ = gan.content_loss(g, x, NotchMask(bits))
    assert loss == pytest.approx(masked_l1_direct(g, x, bits), abs=1e-12)


def test_content_loss_gradient_matches_fd(rng):
    x = random_complex(rng, 8)
    g = random_complex(rng, 8)
    m = NotchMask([1, 0, 1, 1, 0, 1, 1, 1])
    _, grad = gan.content_loss(g, x, m)
    fd = complex_fd_grad(lambda v: gan.content_loss(v, x, m)[0], g)
    np.testing.assert_allclose(grad, fd, rtol=1e-5, atol=1e-8)


def test_content_loss_ignores_notched_bins(rng):
    x = random_complex(rng, 16)
    g = random_complex(rng, 16)
    m = gen_notch_mask(16, 2, 0.5, 4)
    base, _ = gan.content_loss(g, x, m)
    perturb = np.where(m.bits == 0, random_complex(rng, 16) * 10, 0)
    g2 = g + np.fft.ifft(perturb, norm="ortho")
    assert gan.content_loss(g2, x, m)[0] == pytest.approx(base, abs=1e-12)


def test_content_loss_dimension_error(rng):
    with pytest.raises(DimensionError):
        gan.content_loss(random_complex(rng, 8), random_complex(rng, 8), NotchMask(np.ones(7)))


# -- adversarial / discriminator losses ----------------------------------------

def _constant_critic(n, output, act):
    w1 = np.zeros((2, 2 * n))
    b1 = np.zeros(2)
    w2 = np.zeros((1, 2))
    return nn.MlpParams((w1, w2), (b1, np.array([output])), ("relu", act))


def test_adversarial_standard_values():
    z = np.zeros(4)
    # logit 800 saturates the sigmoid at exactly 1.0
    assert gan.adversarial_loss_g(_constant_critic(4, 800.0, "sigmoid"), z, "standard_gan")[0] == 0.0
    # sigmoid(a) = e^-1 at a = -log(e - 1)
    a = -np.log(np.e - 1)
    assert gan.adversarial_loss_g(_constant_critic(4, a, "sigmoid"), z, "standard_gan")[0] == pytest.approx(1.0)


def test_adversarial_wgan_gradient_matches_fd(rng):
    critic = nn.init_params([8, 4, 1], ["relu", "identity"], rng)
    critic = nn.MlpParams(critic.weights, tuple(rng.uniform(-0.5, 0.5, b.shape) for b in critic.biases), critic.activations)
    g = random_complex(rng, 4)
    loss, grad = gan.adversarial_loss_g(critic, g, "wgan")
    assert loss == pytest.approx(-nn.forward(critic, gan.pack(g))[0][0])
    fd = complex_fd_grad(lambda v: gan.adversarial_loss_g(critic, v, "wgan")[0], g)
    np.testing.assert_allclose(grad, fd, rtol=1e-4, atol=1e-9)


def test_adversarial_standard_clamps():
    critic = _constant_critic(4, -800.0, "sigmoid")
    loss, grad = gan.adversarial_loss_g(critic, np.zeros(4), "standard_gan")
    assert loss == pytest.approx(-np.log(gan.LOG_EPS))
    np.testing.assert_array_equal(grad, 0)


def test_discriminator_standard_perfect():
    n = 2
    # critic that reads only the first real input: large positive for x, large negative for gen_out
    w1 = np.zeros((1, 2 * n))
    w1[0, 0] = 1.0
    critic = nn.MlpParams((w1, np.array([[1000.0]])), (np.array([0.0]), np.array([-500.0])), ("relu", "sigmoid"))
    x = np.array([1.0 + 0j, 0])
    fake = np.array([0.0 + 0j, 0])
    loss, _ = gan.discriminator_loss(x, fake, critic, "standard_gan")
    assert loss == 0.0


def test_discriminator_wgan_symmetric_scores(rng):
    critic = _constant_critic(4, 0.3, "identity")
    loss, _ = gan.discriminator_loss(random_complex(rng, 4), random_complex(rng, 4), critic, "wgan")
    assert loss == 0.0


def test_gradient_oracle_suite():
    for name, report in oracle_suite(n=4, seed=1):
        assert report.passed, f"{name}: {report}"


# -- composite loss -------------------------------------------------------------

@pytest.fixture
def tiny(rng):
    n = 4
    cfg = gan.TrainConfig(hidden=6, lam=0.0)
    state = gan.create_trainer(n, cfg)
    pair = _pair(rng, n)
    return state, pair, cfg


def test_generator_loss_lambda_zero_equals_content(tiny):
    state, pair, cfg = tiny
    loss, _ = gan.generator_loss(pair, state.gen, state.disc, cfg)
    content, _ = gan.content_loss(gan.recover(state.gen, pair.z), pair.x, pair.mask)
    assert loss == content


@pytest.mark.parametrize("mode", ["wgan", "standard_gan"])
def test_generator_loss_linear_in_lambda(rng, mode):
    n = 4
    state = gan.create_trainer(n, gan.TrainConfig(hidden=6, mode=mode))
    pair = _pair(rng, n)
    out = gan.recover(state.gen, pair.z)
    content, _ = gan.content_loss(out, pair.x, pair.mask)
    adv, _ = gan.adversarial_loss_g(state.disc, out, mode)
    for lam in (0.0, 0.5, 1.0, 2.0):
        cfg = gan.TrainConfig(hidden=6, mode=mode, lam=lam)
        assert gan.generator_loss(pair, state.gen, state.disc, cfg)[0] == pytest.approx(content + lam * adv, abs=1e-12)


def test_generator_loss_zero_when_reproducing_target(rng):
    # identity generator on an unnotched pair reproduces x exactly
    n = 4
    eye = np.eye(2 * n)
    gen = nn.MlpParams((eye, eye), (np.zeros(2 * n), np.zeros(2 * n)), ("identity", "identity"))
    x = RawSignal(random_complex(rng, n))
    m = NotchMask(np.ones(n))
    pair = gan.TrainingPair(x, apply_mask(x, m), m)
    disc = gan.create_trainer(n, gan.TrainConfig(hidden=3)).disc
    assert gan.generator_loss(pair, gen, disc, gan.TrainConfig(lam=0.0))[0] == pytest.approx(0.0, abs=1e-12)


def test_composite_gradient_check_on_tiny_net(rng):
    # [8, 6, 8] generator, N = 4
    n = 4
    cfg = gan.TrainConfig(lam=0.5)
    gen = nn.init_params([8, 6, 8], ["relu", "identity"], rng)
    gen = nn.MlpParams(gen.weights, tuple(rng.uniform(-0.5, 0.5, b.shape) for b in gen.biases), gen.activations)
    disc = nn.init_params([8, 4, 1], ["relu", "identity"], rng)
    pairs = [_pair(rng, n, s) for s in range(3)]
    report = nn.grad_check(lambda p: gan.generator_loss(pairs, p, disc, cfg), gen)
    assert gen.n_params <= 200
    assert report.passed, str(report)


# -- recovery -------------------------------------------------------------------

def test_recover_zero_generator(rng):
    gen = nn.init_params([8, 5, 5, 8], ["relu", "relu", "identity"], rng).map(np.zeros_like)
    out = gan.recover(gen, random_complex(rng, 4))
    np.testing.assert_array_equal(out.samples, 0)


def test_recover_takes_no_mask():
    params = inspect.signature(gan.recover).parameters
    assert list(params) == ["gen", "z"]
    assert not any("mask" in name for name in params)
    source = inspect.getsource(gan.recover)
    assert "mask" not in source.split('"""')[-1]


def test_recover_dimension_error(rng):
    gen = nn.init_params([8, 5, 8], ["relu", "identity"], rng)
    with pytest.raises(DimensionError):
        gan.recover(gen, random_complex(rng, 5))


def test_training_pair_validation(rng):
    pair = _pair(rng, 8)
    pair.validate()
    bad = gan.TrainingPair(pair.x, RawSignal(pair.z.samples + 1e-6), pair.mask)
    with pytest.raises(Exception):
        bad.validate()
