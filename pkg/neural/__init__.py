from .checkpoint import load_checkpoint, save_checkpoint
from .contracts import NeuralEstimator, NeuralRestorer
from .layers import ChannelAttention, ConditionalResidualBlock, pixel_shuffle, stretch_kernel
from .networks import DAN, Estimator, Restorer, dan_forward
from .trainer import TrainResult, make_training_batch, train_toy

__all__ = [
    "ChannelAttention",
    "ConditionalResidualBlock",
    "DAN",
    "Estimator",
    "NeuralEstimator",
    "NeuralRestorer",
    "Restorer",
    "TrainResult",
    "dan_forward",
    "load_checkpoint",
    "make_training_batch",
    "pixel_shuffle",
    "save_checkpoint",
    "stretch_kernel",
    "train_toy",
]
