"""
PNG input/output for Image rasters (8-bit RGB, non-interlaced).
"""

from pathlib import Path

import numpy as np
from PIL import Image as PILImage

from .types import Image
from .validation import ValidationError


def validate_image(image: Image) -> Image:
    """Check the declared dimensions against the pixel buffer."""
    pixels = image.pixels
    if not isinstance(pixels, np.ndarray) or pixels.dtype != np.uint8:
        raise ValidationError("Image buffer must be a uint8 array")
    if pixels.shape != (image.height, image.width, 3):
        raise ValidationError(
            f"Image buffer shape {pixels.shape} does not match declared "
            f"{image.width}x{image.height} RGB ({image.height}, {image.width}, 3)"
        )
    return image


def write_png(path, image: Image) -> None:
    validate_image(image)
    PILImage.fromarray(image.pixels).save(Path(path), format="PNG", optimize=False)


def read_png(path) -> Image:
    with PILImage.open(Path(path)) as im:
        pixels = np.asarray(im.convert("RGB"), dtype=np.uint8).copy()
    height, width = pixels.shape[:2]
    return Image(width, height, pixels)
