from .input_facade import InputAdapter
from .preprocess import CropSampler
from .stream import ImageStream

__all__ = ["CropSampler", "ImageStream", "InputAdapter"]
