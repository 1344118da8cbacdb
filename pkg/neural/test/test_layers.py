import pytest
import torch
from torch.autograd import gradcheck

from neural.layers import (
    ChannelAttention,
    ConditionalResidualBlock,
    pixel_shuffle,
    pixel_unshuffle,
    stretch_kernel,
    upscale_factors,
)


@pytest.fixture(autouse=True)
def seeded():
    torch.manual_seed(0)


def test_crb_gradcheck():
    block = ConditionalResidualBlock(4, 2, reduction=2).double()
    basic = torch.randn(1, 4, 5, 5, dtype=torch.float64, requires_grad=True)
    cond = torch.randn(1, 2, 5, 5, dtype=torch.float64, requires_grad=True)
    assert gradcheck(block, (basic, cond), eps=1e-6, atol=1e-5)


def test_channel_attention_gradcheck():
    attention = ChannelAttention(4, reduction=2).double()
    x = torch.randn(2, 4, 3, 3, dtype=torch.float64, requires_grad=True)
    assert gradcheck(attention, (x,), eps=1e-6, atol=1e-5)


def test_shuffle_and_stretch_gradcheck():
    x = torch.randn(1, 8, 2, 3, dtype=torch.float64, requires_grad=True)
    assert gradcheck(lambda t: pixel_shuffle(t, 2), (x,))
    coeffs = torch.randn(2, 3, dtype=torch.float64, requires_grad=True)
    assert gradcheck(lambda c: stretch_kernel(c, 4, 5), (coeffs,))


def test_crb_with_zero_residual_is_identity():
    block = ConditionalResidualBlock(8, 3, reduction=4)
    with torch.no_grad():
        block.conv2.weight.zero_()
        block.conv2.bias.zero_()
    basic = torch.randn(2, 8, 6, 6)
    cond = torch.randn(2, 3, 6, 6)
    assert torch.equal(block(basic, cond), basic)


def test_crb_output_depends_on_condition():
    block = ConditionalResidualBlock(8, 3, reduction=4).double()
    basic = torch.randn(1, 8, 6, 6, dtype=torch.float64)
    cond = torch.randn(1, 3, 6, 6, dtype=torch.float64, requires_grad=True)
    block(basic, cond).sum().backward()
    assert cond.grad.abs().sum() > 0


def test_crb_rejects_mismatched_condition():
    block = ConditionalResidualBlock(4, 2, reduction=2)
    with pytest.raises(ValueError):
        block(torch.randn(1, 4, 5, 5), torch.randn(1, 2, 4, 5))


def test_attention_gate_in_unit_interval():
    attention = ChannelAttention(8, reduction=4)
    gate = attention.gate(torch.randn(3, 8, 4, 4))
    assert gate.shape == (3, 8, 1, 1)
    assert torch.all((gate > 0) & (gate < 1))


@pytest.mark.parametrize("r", [2, 3])
def test_pixel_shuffle_index_map(r):
    c, h, w = 2, 3, 4
    x = torch.arange(c * r * r * h * w, dtype=torch.float32).reshape(1, c * r * r, h, w)
    out = pixel_shuffle(x, r)
    assert out.shape == (1, c, h * r, w * r)
    for ch in range(c):
        for i in range(h):
            for j in range(w):
                for a in range(r):
                    for b in range(r):
                        assert out[0, ch, i * r + a, j * r + b] == x[0, ch * r * r + a * r + b, i, j]
    assert torch.equal(pixel_unshuffle(out, r), x)


def test_pixel_shuffle_channel_check():
    with pytest.raises(ValueError):
        pixel_shuffle(torch.zeros(1, 6, 2, 2), 2)


def test_stretch_kernel_constant_planes():
    coeffs = torch.tensor([[1.0, -2.0, 0.5]])
    maps = stretch_kernel(coeffs, 3, 4)
    assert maps.shape == (1, 3, 3, 4)
    for j in range(3):
        assert torch.all(maps[0, j] == coeffs[0, j])


@pytest.mark.parametrize("scale, factors", [(1, []), (2, [2]), (3, [3]), (4, [2, 2])])
def test_upscale_factors(scale, factors):
    assert upscale_factors(scale) == factors
